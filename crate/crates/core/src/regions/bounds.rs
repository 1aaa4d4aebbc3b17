use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::RelayChannelDMC;
use crate::error::{Error, Result};
use crate::info::{
    build_joint, build_joint_p2, build_joint_stoch, mutual_info, zeta, AuxInput, AuxInputP2, AuxInputStoch, CardinalityCaps,
};
use crate::var::Var::*;

/// A rate triple in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    pub r0: f64,
    pub r1: f64,
    pub re: f64,
}

impl RatePoint {
    pub fn new(r0: f64, r1: f64, re: f64) -> Self {
        RatePoint { r0, r1, re }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r0, self.r1, self.re]
    }

    pub fn dot(&self, w: &[f64; 3]) -> f64 {
        w[0] * self.r0 + w[1] * self.r1 + w[2] * self.re
    }
}

impl From<[f64; 3]> for RatePoint {
    fn from(v: [f64; 3]) -> Self {
        RatePoint::new(v[0], v[1], v[2])
    }
}

/// Bound families.
///
/// | family    | aux     | shape |
/// |-----------|---------|-------|
/// | TildeIn   | P1      | `R1 ≤ I(X;Y|US)`, `Re ≤ [I(X;Y|US)−I(X;Z|US)]⁺` |
/// | TildeOut  | P1/P2   | `R1 ≤ I(X;YZ|US)`, `R0+R1 ≤ I(XS;Y)`, `Re ≤ I(X;Y|ZUS)` |
/// | RIn, ROut | P1, P2  | `R0+R1 ≤ I(X;Y|US) + min{I(Z;U|S), I(Y;US)}` |
/// | HatOut    | P1      | the `R` form corrected by `ζ(U,S,Y,Z)` |
/// | StochIn/Out | Q1, Q2 | the `R` form with `V` in place of `X` |
///
/// All families also carry `R0 ≤ min{I(Y;US), I(Z;U|S)}` and `Re ≤ R1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    TildeIn,
    TildeOut,
    RIn,
    ROut,
    HatOut,
    StochIn,
    StochOut,
    GaussianIn,
    GaussianOut,
}

impl Family {
    pub const DMC: [Family; 7] = [
        Family::TildeIn,
        Family::TildeOut,
        Family::RIn,
        Family::ROut,
        Family::HatOut,
        Family::StochIn,
        Family::StochOut,
    ];

    /// Whether points of this family are achievable (inner bound).
    pub fn is_inner(self) -> bool {
        matches!(self, Family::TildeIn | Family::RIn | Family::StochIn | Family::GaussianIn)
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Family::StochIn | Family::StochOut)
    }

    /// Whether the family admits auxiliaries where `U` depends on `Z`.
    pub fn accepts_p2(self) -> bool {
        matches!(self, Family::TildeOut | Family::ROut)
    }

    pub fn caps(self, ch: &RelayChannelDMC) -> CardinalityCaps {
        match self {
            Family::TildeOut | Family::ROut => CardinalityCaps::p2(ch),
            Family::StochIn => CardinalityCaps::q1(ch),
            Family::StochOut => CardinalityCaps::q2(ch),
            _ => CardinalityCaps::p1(ch),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::TildeIn => "tilde-in",
            Family::TildeOut => "tilde-out",
            Family::RIn => "r-in",
            Family::ROut => "r-out",
            Family::HatOut => "hat-out",
            Family::StochIn => "stoch-in",
            Family::StochOut => "stoch-out",
            Family::GaussianIn => "gaussian-in",
            Family::GaussianOut => "gaussian-out",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = Family::DMC.iter().chain(&[Family::GaussianIn, Family::GaussianOut]);
        all.copied()
            .find(|f| f.name() == s.to_ascii_lowercase().replace('_', "-"))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown family '{s}'")))
    }
}

/// Slices of the three-dimensional region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Slice {
    #[default]
    Full,
    /// `R0 = 0`: the `(R1, Re)` plane.
    NoCommon,
    /// `Re = R1`: the `(R0, R1)` secrecy plane.
    Secrecy,
}

/// An auxiliary input of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Aux {
    P1(AuxInput),
    P2(AuxInputP2),
    Stoch(AuxInputStoch),
}

impl Aux {
    pub fn kind(&self) -> &'static str {
        match self {
            Aux::P1(_) => "P1",
            Aux::P2(_) => "P2",
            Aux::Stoch(_) => "stochastic",
        }
    }
}

/// One half-space `coeffs · (r0, r1, re) ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: [f64; 3],
    pub bound: f64,
    pub label: String,
}

impl Constraint {
    pub fn new(coeffs: [f64; 3], bound: f64, label: impl Into<String>) -> Self {
        Constraint {
            coeffs,
            bound,
            label: label.into(),
        }
    }

    pub fn slack(&self, p: &RatePoint) -> f64 {
        self.bound - p.dot(&self.coeffs)
    }
}

/// Linear constraints on `(R0, R1, Re)` evaluated at one auxiliary input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConstraintSet {
    pub family: Family,
    pub slice: Slice,
    /// Information quantities the constraints were assembled from, in bits.
    pub constants: BTreeMap<String, f64>,
    pub constraints: Vec<Constraint>,
}

pub(crate) fn pos(a: f64) -> f64 {
    a.max(0.0)
}

impl RateConstraintSet {
    /// Starts a set holding `r ≥ 0` and `Re ≤ R1`.
    pub fn base(family: Family) -> Self {
        RateConstraintSet {
            family,
            slice: Slice::Full,
            constants: BTreeMap::new(),
            constraints: vec![
                Constraint::new([-1.0, 0.0, 0.0], 0.0, "R0 >= 0"),
                Constraint::new([0.0, -1.0, 0.0], 0.0, "R1 >= 0"),
                Constraint::new([0.0, 0.0, -1.0], 0.0, "Re >= 0"),
                Constraint::new([0.0, -1.0, 1.0], 0.0, "Re <= R1"),
            ],
        }
    }

    pub fn push(&mut self, coeffs: [f64; 3], bound: f64, label: &str) {
        self.constraints.push(Constraint::new(coeffs, bound, label));
    }

    /// Restricts to a slice by adding its defining constraint.
    pub fn sliced(mut self, slice: Slice) -> Self {
        match slice {
            Slice::Full => {}
            Slice::NoCommon => self.push([1.0, 0.0, 0.0], 0.0, "R0 <= 0"),
            Slice::Secrecy => self.push([0.0, 1.0, -1.0], 0.0, "R1 <= Re"),
        }
        self.slice = slice;
        self
    }

    /// Whether `p` satisfies every constraint within `tol`.
    pub fn contains(&self, p: &RatePoint, tol: f64) -> bool {
        self.constraints.iter().all(|c| c.slack(p) >= -tol)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}

/// Named information quantities used by the bound families.
pub mod names {
    pub const I_Y_US: &str = "I(Y;US)";
    pub const I_Z_U_GIVEN_S: &str = "I(Z;U|S)";
    pub const I_X_Y_GIVEN_US: &str = "I(X;Y|US)";
    pub const I_X_Z_GIVEN_US: &str = "I(X;Z|US)";
    pub const I_X_YZ_GIVEN_US: &str = "I(X;YZ|US)";
    pub const I_X_Y_GIVEN_ZUS: &str = "I(X;Y|ZUS)";
    pub const I_XS_Y: &str = "I(XS;Y)";
    pub const ZETA: &str = "zeta";
    pub const I_V_Y_GIVEN_US: &str = "I(V;Y|US)";
    pub const I_V_Z_GIVEN_US: &str = "I(V;Z|US)";
}

fn check_caps(family: Family, ch: &RelayChannelDMC, nu: usize, nv: Option<usize>) -> Result<()> {
    let caps = family.caps(ch);
    if nu > caps.u {
        return Err(Error::CardinalityCapExceeded {
            family: format!("{family} (U)"),
            size: nu,
            cap: caps.u,
        });
    }
    if let (Some(nv), Some(cap)) = (nv, caps.v) {
        if nv > cap {
            return Err(Error::CardinalityCapExceeded {
                family: format!("{family} (V)"),
                size: nv,
                cap,
            });
        }
    }
    Ok(())
}

/// Evaluates the constraints of `family` at one auxiliary input.
pub fn evaluate_bounds(aux: &Aux, ch: &RelayChannelDMC, family: Family) -> Result<RateConstraintSet> {
    use names::*;
    let mismatch = || Error::FamilyAuxMismatch {
        family: family.to_string(),
        aux: aux.kind().to_string(),
    };
    let joint = match (aux, family) {
        (_, Family::GaussianIn | Family::GaussianOut) => return Err(mismatch()),
        (Aux::Stoch(a), f) if f.is_stochastic() => {
            check_caps(f, ch, a.nu(), Some(a.nv()))?;
            build_joint_stoch(a, ch)?
        }
        (Aux::P1(a), f) if !f.is_stochastic() => {
            check_caps(f, ch, a.nu(), None)?;
            build_joint(a, ch)?
        }
        (Aux::P2(a), f) if f.accepts_p2() => {
            check_caps(f, ch, a.nu, None)?;
            build_joint_p2(a, ch)?
        }
        _ => return Err(mismatch()),
    };

    let mut set = RateConstraintSet::base(family);
    let i_y_us = mutual_info(&joint, &[Y], &[U, S], &[])?;
    let i_z_u_s = mutual_info(&joint, &[Z], &[U], &[S])?;
    let common = i_y_us.min(i_z_u_s);
    set.constants.insert(I_Y_US.into(), i_y_us);
    set.constants.insert(I_Z_U_GIVEN_S.into(), i_z_u_s);
    set.push([1.0, 0.0, 0.0], common, "R0 <= min{I(Y;US),I(Z;U|S)}");

    match family {
        Family::TildeIn => {
            let i1 = mutual_info(&joint, &[X], &[Y], &[U, S])?;
            let i2 = mutual_info(&joint, &[X], &[Z], &[U, S])?;
            set.constants.insert(I_X_Y_GIVEN_US.into(), i1);
            set.constants.insert(I_X_Z_GIVEN_US.into(), i2);
            set.push([0.0, 1.0, 0.0], i1, "R1 <= I(X;Y|US)");
            set.push([0.0, 0.0, 1.0], pos(i1 - i2), "Re <= [I(X;Y|US)-I(X;Z|US)]+");
        }
        Family::TildeOut => {
            let i_x_yz = mutual_info(&joint, &[X], &[Y, Z], &[U, S])?;
            let i_xs_y = mutual_info(&joint, &[X, S], &[Y], &[])?;
            let i_x_y_zus = mutual_info(&joint, &[X], &[Y], &[Z, U, S])?;
            set.constants.insert(I_X_YZ_GIVEN_US.into(), i_x_yz);
            set.constants.insert(I_XS_Y.into(), i_xs_y);
            set.constants.insert(I_X_Y_GIVEN_ZUS.into(), i_x_y_zus);
            set.push([0.0, 1.0, 0.0], i_x_yz, "R1 <= I(X;YZ|US)");
            set.push([1.0, 1.0, 0.0], i_xs_y, "R0+R1 <= I(XS;Y)");
            set.push([0.0, 0.0, 1.0], i_x_y_zus, "Re <= I(X;Y|ZUS)");
        }
        Family::RIn | Family::ROut => {
            let i1 = mutual_info(&joint, &[X], &[Y], &[U, S])?;
            let i2 = mutual_info(&joint, &[X], &[Z], &[U, S])?;
            set.constants.insert(I_X_Y_GIVEN_US.into(), i1);
            set.constants.insert(I_X_Z_GIVEN_US.into(), i2);
            set.push([1.0, 1.0, 0.0], i1 + common, "R0+R1 <= I(X;Y|US)+min{I(Z;U|S),I(Y;US)}");
            set.push([0.0, 0.0, 1.0], pos(i1 - i2), "Re <= [I(X;Y|US)-I(X;Z|US)]+");
        }
        Family::HatOut => {
            let i1 = mutual_info(&joint, &[X], &[Y], &[U, S])?;
            let i2 = mutual_info(&joint, &[X], &[Z], &[U, S])?;
            let z = zeta(&joint)?;
            set.constants.insert(I_X_Y_GIVEN_US.into(), i1);
            set.constants.insert(I_X_Z_GIVEN_US.into(), i2);
            set.constants.insert(ZETA.into(), z);
            set.push(
                [1.0, 1.0, 0.0],
                i1 + pos(z) + common,
                "R0+R1 <= I(X;Y|US)+[zeta]+ +min{I(Z;U|S),I(Y;US)}",
            );
            set.push([0.0, 0.0, 1.0], pos(i1 - i2 + z), "Re <= [I(X;Y|US)-I(X;Z|US)+zeta]+");
        }
        Family::StochIn | Family::StochOut => {
            let iv_y = mutual_info(&joint, &[V], &[Y], &[U, S])?;
            let iv_z = mutual_info(&joint, &[V], &[Z], &[U, S])?;
            set.constants.insert(I_V_Y_GIVEN_US.into(), iv_y);
            set.constants.insert(I_V_Z_GIVEN_US.into(), iv_z);
            set.push([1.0, 1.0, 0.0], iv_y + common, "R0+R1 <= I(V;Y|US)+min{I(Y;US),I(Z;U|S)}");
            set.push([0.0, 0.0, 1.0], pos(iv_y - iv_z), "Re <= [I(V;Y|US)-I(V;Z|US)]+");
        }
        Family::GaussianIn | Family::GaussianOut => unreachable!(),
    }
    Ok(set)
}
