//! Closed-form regions of the Gaussian relay channel with confidential messages.

use serde::{Deserialize, Serialize};

use crate::channel::GaussianRelayParams;
use crate::error::{Error, Result};
use crate::regions::{
    enumerate_vertices, pos, weight_grid, Family, FrontierSample, RateConstraintSet, RateRegion, RegionBounds, RegionPoint, Slice,
    DEFAULT_RESOLUTION,
};

/// Default number of η samples when maximizing the common rate.
pub const DEFAULT_ETA_POINTS: usize = 257;

/// `C(x) = ½ log2(1 + x)`.
pub fn cfun(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeArgument(x));
    }
    Ok(0.5 * x.ln_1p() / std::f64::consts::LN_2)
}

fn c(x: f64) -> f64 {
    0.5 * x.max(0.0).ln_1p() / std::f64::consts::LN_2
}

/// Quantities of the equivalent channel `Ỹ = Y − aZ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDerived {
    pub a: f64,
    pub ntilde1: f64,
    pub ntilde2: f64,
}

pub fn derived(p: &GaussianRelayParams) -> GaussianDerived {
    let cross = p.rho * (p.n1 * p.n2).sqrt();
    let ntilde2 = p.n1 + p.n2 - 2.0 * cross;
    GaussianDerived {
        a: (p.n2 - cross) / ntilde2,
        ntilde1: (1.0 - p.rho * p.rho) * p.n1 * p.n2 / ntilde2,
        ntilde2,
    }
}

/// `[0, 1/(n-1), …, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval {
            name: name.to_string(),
            value: v,
        })
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    grid.iter().try_for_each(|&v| check_unit(name, v))
}

/// Constraint constants at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussCaps {
    pub theta: f64,
    pub eta: f64,
    pub r0: f64,
    pub r1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<f64>,
    pub re: f64,
}

fn common_cap(p: &GaussianRelayParams, theta: f64, eta: f64) -> f64 {
    let (tb, eb) = (1.0 - theta, 1.0 - eta);
    let coop = 2.0 * (tb * eb * p.p1 * p.p2).sqrt();
    let to_receiver = c((tb * p.p1 + p.p2 + coop) / (theta * p.p1 + p.n1));
    let to_relay = c(tb * eta * p.p1 / (theta * p.p1 + p.n2));
    to_receiver.min(to_relay)
}

/// `(max_η common cap, argmax η)` over `eta_grid`; the first maximizer wins.
fn best_common(p: &GaussianRelayParams, theta: f64, eta_grid: &[f64]) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &eta in eta_grid {
        let v = common_cap(p, theta, eta);
        if v > best.0 {
            best = (v, eta);
        }
    }
    if best.0.is_finite() {
        best
    } else {
        (0.0, 0.0)
    }
}

/// Inner-region caps at `theta`, with the common rate maximized over `eta_grid`.
pub fn inner_caps(p: &GaussianRelayParams, theta: f64, eta_grid: &[f64]) -> Result<GaussCaps> {
    check_unit("theta", theta)?;
    check_grid("eta", eta_grid)?;
    let (r0, eta) = best_common(p, theta, eta_grid);
    let r1 = c(theta * p.p1 / p.n1);
    Ok(GaussCaps {
        theta,
        eta,
        r0,
        r1,
        sum: None,
        re: pos(r1 - c(theta * p.p1 / p.n2)),
    })
}

/// Outer-region caps at `(theta, eta)`.
pub fn outer_caps(p: &GaussianRelayParams, theta: f64, eta: f64) -> Result<GaussCaps> {
    check_unit("theta", theta)?;
    check_unit("eta", eta)?;
    let d = derived(p);
    let r1 = c(theta * p.p1 / d.ntilde1);
    let coop = 2.0 * ((1.0 - theta) * (1.0 - eta) * p.p1 * p.p2).sqrt();
    Ok(GaussCaps {
        theta,
        eta,
        r0: common_cap(p, theta, eta),
        r1,
        sum: Some(c((p.p1 + p.p2 + coop) / p.n1)),
        re: pos(r1 - c(theta * p.p1 / p.n2)),
    })
}

fn caps_set(family: Family, caps: &GaussCaps) -> RateConstraintSet {
    let mut set = RateConstraintSet::base(family);
    set.constants.insert("theta".into(), caps.theta);
    set.constants.insert("eta".into(), caps.eta);
    set.push([1.0, 0.0, 0.0], caps.r0, "R0 <= common cap");
    set.push([0.0, 1.0, 0.0], caps.r1, "R1 <= private cap");
    if let Some(sum) = caps.sum {
        set.push([1.0, 1.0, 0.0], sum, "R0+R1 <= sum cap");
    }
    set.push([0.0, 0.0, 1.0], caps.re, "Re <= secrecy cap");
    set
}

fn union_region(family: Family, slice: Slice, sets: Vec<(GaussCaps, RateConstraintSet)>) -> Result<RateRegion> {
    let mut region = RateRegion::new(family, slice);
    for (caps, set) in &sets {
        for v in enumerate_vertices(set)? {
            let mut p = RegionPoint::from(v);
            p.theta = Some(caps.theta);
            p.eta = Some(caps.eta);
            region.add_point(p);
        }
    }
    for w in weight_grid(slice, DEFAULT_RESOLUTION) {
        let value = region.support(&w);
        region.frontier.push(FrontierSample {
            w,
            value,
            constraints: None,
            aux: None,
        });
    }
    Ok(region)
}

/// Union over `theta_grid` of the inner-bound polytopes.
pub fn inner_region(p: &GaussianRelayParams, theta_grid: &[f64], eta_grid: &[f64]) -> Result<RateRegion> {
    let sets = theta_grid
        .iter()
        .map(|&t| inner_caps(p, t, eta_grid).map(|caps| (caps, caps_set(Family::GaussianIn, &caps))))
        .collect::<Result<Vec<_>>>()?;
    union_region(Family::GaussianIn, Slice::Full, sets)
}

/// Union over the `(theta, eta)` grid of the outer-bound polytopes.
pub fn outer_region(p: &GaussianRelayParams, theta_grid: &[f64], eta_grid: &[f64]) -> Result<RateRegion> {
    let mut sets = Vec::with_capacity(theta_grid.len() * eta_grid.len());
    for &t in theta_grid {
        for &e in eta_grid {
            let caps = outer_caps(p, t, e)?;
            sets.push((caps, caps_set(Family::GaussianOut, &caps)));
        }
    }
    union_region(Family::GaussianOut, Slice::Full, sets)
}

/// Inner and outer secrecy regions over `(R0, R1)`, reported with `Re = R1`.
pub fn cds_region(p: &GaussianRelayParams, theta_grid: &[f64], eta_grid: &[f64]) -> Result<RegionBounds> {
    let d = derived(p);
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for &theta in theta_grid {
        let caps = inner_caps(p, theta, eta_grid)?;
        let secret_out = pos(c(theta * p.p1 / d.ntilde1) - c(theta * p.p1 / p.n2));
        let cin = GaussCaps {
            r1: caps.re,
            ..caps
        };
        let cout = GaussCaps {
            r1: secret_out,
            re: secret_out,
            ..caps
        };
        inner.push((cin, caps_set(Family::GaussianIn, &cin).sliced(Slice::Secrecy)));
        outer.push((cout, caps_set(Family::GaussianOut, &cout).sliced(Slice::Secrecy)));
    }
    Ok(RegionBounds {
        inner: union_region(Family::GaussianIn, Slice::Secrecy, inner)?,
        outer: union_region(Family::GaussianOut, Slice::Secrecy, outer)?,
        outer_independent: None,
    })
}

/// Bounds on the secrecy capacity.
pub fn secrecy_capacity_gauss(p: &GaussianRelayParams) -> (f64, f64) {
    let d = derived(p);
    let lower = pos(c(p.p1 / p.n1) - c(p.p1 / p.n2));
    let upper = pos(c(p.p1 / d.ntilde1) - c(p.p1 / p.n2));
    (lower, upper)
}

/// Both parametrizations of a Gaussian input split.
///
/// `θ = βα` and `α = 1 − (1−θ)(1−η)`. At `θ = 1` the value of `η` is
/// irrelevant and reported as 0; at `α = 0` `β` is irrelevant and reported as 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussParamPoint {
    pub theta: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// One side of the parameter bijection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussParamInput {
    AlphaBeta { alpha: f64, beta: f64 },
    ThetaEta { theta: f64, eta: f64 },
}

pub fn param_map(input: GaussParamInput) -> Result<GaussParamPoint> {
    match input {
        GaussParamInput::AlphaBeta { alpha, beta } => {
            check_unit("alpha", alpha)?;
            check_unit("beta", beta)?;
            let theta = beta * alpha;
            let eta = if theta < 1.0 {
                ((alpha - theta) / (1.0 - theta)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            Ok(GaussParamPoint { theta, eta, alpha, beta })
        }
        GaussParamInput::ThetaEta { theta, eta } => {
            check_unit("theta", theta)?;
            check_unit("eta", eta)?;
            let alpha = 1.0 - (1.0 - theta) * (1.0 - eta);
            let beta = if alpha > 0.0 { (theta / alpha).min(1.0) } else { 1.0 };
            Ok(GaussParamPoint { theta, eta, alpha, beta })
        }
    }
}
