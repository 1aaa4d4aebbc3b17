//! Exact Shannon measures on finite joint distributions, and construction of
//! those joints from auxiliary inputs and a relay channel.
//!
//! All logarithms are base 2, so every quantity is in bits. `0·log 0 = 0`.

use serde::{Deserialize, Serialize};

use crate::channel::RelayChannelDMC;
use crate::error::{Error, Result};
use crate::var::{fmt_vars, Var};

/// Base of every logarithm in this crate.
pub const LOG_BASE: f64 = 2.0;

/// Mutual informations in `(-MI_CLAMP, 0)` are rounding noise and become 0.
pub const MI_CLAMP: f64 = 1e-12;

const NORM_TOL: f64 = 1e-9;

/// Dense pmf over a product alphabet, row-major with the last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    vars: Vec<Var>,
    sizes: Vec<usize>,
    pmf: Vec<f64>,
}

impl JointDist {
    pub fn new(dims: Vec<(Var, usize)>, pmf: Vec<f64>) -> Result<Self> {
        let (vars, sizes): (Vec<Var>, Vec<usize>) = dims.into_iter().unzip();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::OverlappingVariableSets(format!("{v} listed twice")));
            }
        }
        if let Some(i) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::EmptyAlphabet(vars[i].to_string()));
        }
        let cells: usize = sizes.iter().product();
        if pmf.len() != cells {
            return Err(Error::DimensionMismatch(format!("pmf has {} cells, alphabets give {cells}", pmf.len())));
        }
        if let Some(&p) = pmf.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::NegativeProbability {
                location: "joint pmf".into(),
                value: p,
            });
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::RowSumViolation {
                location: "joint pmf".into(),
                sum,
            });
        }
        Ok(JointDist { vars, sizes, pmf })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn size_of(&self, v: Var) -> Option<usize> {
        self.position(v).map(|p| self.sizes[p])
    }

    pub fn has(&self, v: Var) -> bool {
        self.vars.contains(&v)
    }

    fn position(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    fn require(&self, vars: &[Var]) -> Result<()> {
        match vars.iter().find(|v| !self.has(**v)) {
            Some(v) => Err(Error::MissingVariable(v.to_string())),
            None => Ok(()),
        }
    }

    /// Marginal pmf over `vars`, laid out in the order given.
    pub fn marginal_pmf(&self, vars: &[Var]) -> Result<Vec<f64>> {
        self.require(vars)?;
        let mut tstride = vec![0usize; self.vars.len()];
        let mut stride = 1;
        for v in vars.iter().rev() {
            let p = self.position(*v).unwrap();
            if tstride[p] != 0 {
                return Err(Error::OverlappingVariableSets(format!("{v} repeated")));
            }
            tstride[p] = stride;
            stride *= self.sizes[p];
        }
        let mut out = vec![0.0; stride];
        let k = self.vars.len();
        let mut counters = vec![0usize; k];
        let mut t = 0usize;
        for &p in &self.pmf {
            out[t] += p;
            let mut d = k;
            while d > 0 {
                d -= 1;
                counters[d] += 1;
                t += tstride[d];
                if counters[d] < self.sizes[d] {
                    break;
                }
                t -= tstride[d] * self.sizes[d];
                counters[d] = 0;
            }
        }
        Ok(out)
    }

    pub fn marginal(&self, vars: &[Var]) -> Result<JointDist> {
        let pmf = self.marginal_pmf(vars)?;
        let sizes = vars.iter().map(|v| self.size_of(*v).unwrap()).collect();
        Ok(JointDist {
            vars: vars.to_vec(),
            sizes,
            pmf,
        })
    }

    /// `H(vars)` in bits.
    pub fn entropy(&self, vars: &[Var]) -> Result<f64> {
        Ok(entropy_of(&self.marginal_pmf(vars)?))
    }

    /// `H(a | c)` in bits.
    pub fn cond_entropy(&self, a: &[Var], c: &[Var]) -> Result<f64> {
        disjoint(&[a, c])?;
        let ac: Vec<Var> = a.iter().chain(c).copied().collect();
        Ok(self.entropy(&ac)? - self.entropy(c)?)
    }
}

pub(crate) fn entropy_of(pmf: &[f64]) -> f64 {
    -pmf.iter().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

fn disjoint(sets: &[&[Var]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(v) = a.iter().find(|v| b.contains(v)) {
                return Err(Error::OverlappingVariableSets(format!(
                    "{v} appears in both {} and {}",
                    fmt_vars(a),
                    fmt_vars(b)
                )));
            }
        }
    }
    Ok(())
}

/// `I(A;B|C)` in bits, computed from exact marginals.
///
/// Variables of `C` that also appear in `A` or `B` are dropped from those
/// sets (they carry no information once conditioned on), so `I(X;Y|X) = 0`.
/// `A` and `B` themselves must be disjoint.
pub fn mutual_info(j: &JointDist, a: &[Var], b: &[Var], c: &[Var]) -> Result<f64> {
    j.require(a)?;
    j.require(b)?;
    j.require(c)?;
    disjoint(&[a, b])?;
    let a: Vec<Var> = a.iter().copied().filter(|v| !c.contains(v)).collect();
    let b: Vec<Var> = b.iter().copied().filter(|v| !c.contains(v)).collect();
    let (a, b) = (&a[..], &b[..]);
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let abc: Vec<Var> = a.iter().chain(b).chain(c).copied().collect();
    let m = j.marginal_pmf(&abc)?;
    let size = |vs: &[Var]| vs.iter().map(|v| j.size_of(*v).unwrap()).product::<usize>();
    let (da, db, dc) = (size(a), size(b), size(c));
    let mut pac = vec![0.0; da * dc];
    let mut pbc = vec![0.0; db * dc];
    let mut pc = vec![0.0; dc];
    for ia in 0..da {
        for ib in 0..db {
            for ic in 0..dc {
                let p = m[(ia * db + ib) * dc + ic];
                pac[ia * dc + ic] += p;
                pbc[ib * dc + ic] += p;
                pc[ic] += p;
            }
        }
    }
    let mut total = 0.0;
    for ia in 0..da {
        for ib in 0..db {
            for ic in 0..dc {
                let p = m[(ia * db + ib) * dc + ic];
                if p > 0.0 {
                    total += p * ((p * pc[ic]) / (pac[ia * dc + ic] * pbc[ib * dc + ic])).log2();
                }
            }
        }
    }
    clamp_mi(total, || format!("I({};{}|{})", fmt_vars(a), fmt_vars(b), fmt_vars(c)))
}

fn clamp_mi(v: f64, what: impl Fn() -> String) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v > -MI_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!("{} = {v} is negative", what())))
    }
}

/// Outcome of [`check_markov`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub passes: bool,
    /// `I(A;C|B)` in bits.
    pub residual: f64,
}

/// Checks the Markov chain `A → B → C` via `I(A;C|B) ≤ tol`.
pub fn check_markov(j: &JointDist, a: &[Var], b: &[Var], c: &[Var], tol: f64) -> Result<MarkovCheck> {
    let residual = mutual_info(j, a, c, b)?;
    Ok(MarkovCheck {
        passes: residual <= tol,
        residual,
    })
}

/// `ζ(U,S,Y,Z) = I(S;Y|U) − I(S;Z|U)`; may be negative.
pub fn zeta(j: &JointDist) -> Result<f64> {
    j.require(&[Var::U, Var::S, Var::Y, Var::Z])?;
    Ok(mutual_info(j, &[Var::S], &[Var::Y], &[Var::U])? - mutual_info(j, &[Var::S], &[Var::Z], &[Var::U])?)
}

/// `Δ = I(X;Z|YUS)`, the gap between the inner and outer equivocation caps.
pub fn delta_gap(j: &JointDist) -> Result<f64> {
    j.require(&[Var::U, Var::S, Var::X, Var::Y, Var::Z])?;
    mutual_info(j, &[Var::X], &[Var::Z], &[Var::Y, Var::U, Var::S])
}

/// Cardinality caps on auxiliary alphabets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityCaps {
    pub u: usize,
    pub v: Option<usize>,
}

impl CardinalityCaps {
    /// `|U| ≤ |X||S| + 3`.
    pub fn p1(ch: &RelayChannelDMC) -> Self {
        CardinalityCaps {
            u: ch.nx() * ch.ns() + 3,
            v: None,
        }
    }

    /// `|U| ≤ |Z||X||S| + 3`.
    pub fn p2(ch: &RelayChannelDMC) -> Self {
        CardinalityCaps {
            u: ch.nz() * ch.nx() * ch.ns() + 3,
            v: None,
        }
    }

    pub fn q1(ch: &RelayChannelDMC) -> Self {
        let k = ch.nx() * ch.ns();
        CardinalityCaps {
            u: k + 3,
            v: Some(k * k + 4 * k + 3),
        }
    }

    pub fn q2(ch: &RelayChannelDMC) -> Self {
        let k = ch.nz() * ch.nx() * ch.ns();
        CardinalityCaps {
            u: k + 3,
            v: Some(k * k + 4 * k + 3),
        }
    }
}

/// Deterministic-encoder auxiliary input in family P1: `p(u,s)` and
/// `p(x|u,s)`. The chain `U → XS → YZ` holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AuxInputFile", into = "AuxInputFile")]
pub struct AuxInput {
    nu: usize,
    ns: usize,
    nx: usize,
    p_us: Vec<f64>,
    p_x_given_us: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuxInputFile {
    pub p_us: Vec<Vec<f64>>,
    pub p_x_given_us: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<AuxInputFile> for AuxInput {
    type Error = Error;

    fn try_from(f: AuxInputFile) -> Result<Self> {
        AuxInput::new(f.p_us, f.p_x_given_us)
    }
}

impl From<AuxInput> for AuxInputFile {
    fn from(a: AuxInput) -> Self {
        AuxInputFile {
            p_us: a.p_us.chunks(a.ns).map(<[f64]>::to_vec).collect(),
            p_x_given_us: a
                .p_x_given_us
                .chunks(a.ns * a.nx)
                .map(|per_u| per_u.chunks(a.nx).map(<[f64]>::to_vec).collect())
                .collect(),
        }
    }
}

fn flatten2(rows: &[Vec<f64>], width: usize, what: &str) -> Result<Vec<f64>> {
    if rows.is_empty() || width == 0 {
        return Err(Error::EmptyAlphabet(what.into()));
    }
    let mut out = Vec::with_capacity(rows.len() * width);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::NotRectangular(format!("{what}[{i}] has {} entries, expected {width}", r.len())));
        }
        out.extend_from_slice(r);
    }
    Ok(out)
}

/// Validates and renormalizes each consecutive `width`-block as a pmf.
fn normalize_blocks(v: &mut [f64], width: usize, what: &str) -> Result<()> {
    for (i, block) in v.chunks_mut(width).enumerate() {
        if let Some(&p) = block.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::NegativeProbability {
                location: format!("{what} block {i}"),
                value: p,
            });
        }
        let sum: f64 = block.iter().sum();
        if (sum - 1.0).abs() >= NORM_TOL {
            return Err(Error::RowSumViolation {
                location: format!("{what} block {i}"),
                sum,
            });
        }
        block.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

impl AuxInput {
    /// `p_us[u][s]` and `p_x_given_us[u][s][x]`.
    pub fn new(p_us: Vec<Vec<f64>>, p_x_given_us: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let nu = p_us.len();
        let ns = p_us.first().map_or(0, Vec::len);
        let mut flat_us = flatten2(&p_us, ns, "p_us")?;
        normalize_blocks(&mut flat_us, nu * ns, "p_us")?;
        if p_x_given_us.len() != nu {
            return Err(Error::DimensionMismatch(format!(
                "p_x_given_us has {} rows for |U| = {nu}",
                p_x_given_us.len()
            )));
        }
        let nx = p_x_given_us[0].first().map_or(0, Vec::len);
        let mut flat_x = Vec::with_capacity(nu * ns * nx);
        for (u, rows) in p_x_given_us.iter().enumerate() {
            if rows.len() != ns {
                return Err(Error::NotRectangular(format!("p_x_given_us[{u}] has {} rows, expected {ns}", rows.len())));
            }
            flat_x.extend(flatten2(rows, nx, "p_x_given_us")?);
        }
        normalize_blocks(&mut flat_x, nx, "p_x_given_us")?;
        Ok(AuxInput {
            nu,
            ns,
            nx,
            p_us: flat_us,
            p_x_given_us: flat_x,
        })
    }

    /// Builds from flat arrays that are already normalized.
    pub(crate) fn from_flat(nu: usize, ns: usize, nx: usize, p_us: Vec<f64>, p_x_given_us: Vec<f64>) -> Self {
        debug_assert_eq!(p_us.len(), nu * ns);
        debug_assert_eq!(p_x_given_us.len(), nu * ns * nx);
        AuxInput {
            nu,
            ns,
            nx,
            p_us,
            p_x_given_us,
        }
    }

    /// `U` and `S` constant, `X` drawn from `p_x`.
    pub fn constant(ns: usize, p_x: &[f64]) -> Result<Self> {
        let mut p_us = vec![vec![0.0; ns]];
        p_us[0][0] = 1.0;
        AuxInput::new(p_us, vec![vec![p_x.to_vec(); ns]])
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn p_us(&self, u: usize, s: usize) -> f64 {
        self.p_us[u * self.ns + s]
    }

    pub fn p_x_given_us(&self, u: usize, s: usize, x: usize) -> f64 {
        self.p_x_given_us[(u * self.ns + s) * self.nx + x]
    }

    /// `p(s)`.
    pub fn p_s(&self) -> Vec<f64> {
        (0..self.ns).map(|s| (0..self.nu).map(|u| self.p_us(u, s)).sum()).collect()
    }
}

/// Deterministic-encoder auxiliary input in family P2, where `U` may also
/// depend on the relay output: `p(s,x)` and `p(u|s,x,z)`, so only
/// `U → XSZ → Y` is guaranteed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxInputP2 {
    pub nu: usize,
    pub ns: usize,
    pub nx: usize,
    pub nz: usize,
    /// `[s][x]`, flattened.
    pub p_sx: Vec<f64>,
    /// `[s][x][z][u]`, flattened.
    pub p_u_given_sxz: Vec<f64>,
}

impl AuxInputP2 {
    pub fn new(nu: usize, ns: usize, nx: usize, nz: usize, mut p_sx: Vec<f64>, mut p_u_given_sxz: Vec<f64>) -> Result<Self> {
        if nu == 0 {
            return Err(Error::EmptyAlphabet("U".into()));
        }
        if p_sx.len() != ns * nx || p_u_given_sxz.len() != ns * nx * nz * nu {
            return Err(Error::DimensionMismatch("P2 auxiliary arrays have the wrong length".into()));
        }
        normalize_blocks(&mut p_sx, ns * nx, "p_sx")?;
        normalize_blocks(&mut p_u_given_sxz, nu, "p_u_given_sxz")?;
        Ok(AuxInputP2 {
            nu,
            ns,
            nx,
            nz,
            p_sx,
            p_u_given_sxz,
        })
    }

    /// Re-expresses a P1 input; `U` then ignores `Z`.
    pub fn from_p1(aux: &AuxInput, nz: usize) -> Self {
        let (nu, ns, nx) = (aux.nu, aux.ns, aux.nx);
        let mut p_sx = vec![0.0; ns * nx];
        for u in 0..nu {
            for s in 0..ns {
                for x in 0..nx {
                    p_sx[s * nx + x] += aux.p_us(u, s) * aux.p_x_given_us(u, s, x);
                }
            }
        }
        let mut p_u = vec![0.0; ns * nx * nz * nu];
        for s in 0..ns {
            for x in 0..nx {
                let mass = p_sx[s * nx + x];
                for z in 0..nz {
                    for u in 0..nu {
                        p_u[((s * nx + x) * nz + z) * nu + u] = if mass > 0.0 {
                            aux.p_us(u, s) * aux.p_x_given_us(u, s, x) / mass
                        } else {
                            1.0 / nu as f64
                        };
                    }
                }
            }
        }
        AuxInputP2 {
            nu,
            ns,
            nx,
            nz,
            p_sx,
            p_u_given_sxz: p_u,
        }
    }
}

/// Stochastic-encoder auxiliary input: `p(u,s,v)` and `p(x|v)`, so
/// `US → V → X` holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AuxInputStochFile", into = "AuxInputStochFile")]
pub struct AuxInputStoch {
    nu: usize,
    nv: usize,
    ns: usize,
    nx: usize,
    p_usv: Vec<f64>,
    p_x_given_v: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuxInputStochFile {
    pub p_usv: Vec<Vec<Vec<f64>>>,
    pub p_x_given_v: Vec<Vec<f64>>,
}

impl TryFrom<AuxInputStochFile> for AuxInputStoch {
    type Error = Error;

    fn try_from(f: AuxInputStochFile) -> Result<Self> {
        let nu = f.p_usv.len();
        let ns = f.p_usv.first().map_or(0, Vec::len);
        let nv = f.p_x_given_v.len();
        let nx = f.p_x_given_v.first().map_or(0, Vec::len);
        let mut p_usv = Vec::with_capacity(nu * ns * nv);
        for (u, rows) in f.p_usv.iter().enumerate() {
            if rows.len() != ns {
                return Err(Error::NotRectangular(format!("p_usv[{u}] has {} rows", rows.len())));
            }
            p_usv.extend(flatten2(rows, nv, "p_usv")?);
        }
        let p_x = flatten2(&f.p_x_given_v, nx, "p_x_given_v")?;
        AuxInputStoch::from_parts(nu, nv, ns, nx, p_usv, p_x)
    }
}

impl From<AuxInputStoch> for AuxInputStochFile {
    fn from(a: AuxInputStoch) -> Self {
        AuxInputStochFile {
            p_usv: a
                .p_usv
                .chunks(a.ns * a.nv)
                .map(|per_u| per_u.chunks(a.nv).map(<[f64]>::to_vec).collect())
                .collect(),
            p_x_given_v: a.p_x_given_v.chunks(a.nx).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl AuxInputStoch {
    /// Flat `p_usv[u][s][v]` and `p_x_given_v[v][x]`.
    pub fn from_parts(nu: usize, nv: usize, ns: usize, nx: usize, mut p_usv: Vec<f64>, mut p_x_given_v: Vec<f64>) -> Result<Self> {
        if nu == 0 || nv == 0 || ns == 0 || nx == 0 {
            return Err(Error::EmptyAlphabet("stochastic auxiliary".into()));
        }
        if p_usv.len() != nu * ns * nv || p_x_given_v.len() != nv * nx {
            return Err(Error::DimensionMismatch("stochastic auxiliary arrays have the wrong length".into()));
        }
        normalize_blocks(&mut p_usv, nu * ns * nv, "p_usv")?;
        normalize_blocks(&mut p_x_given_v, nx, "p_x_given_v")?;
        Ok(AuxInputStoch {
            nu,
            nv,
            ns,
            nx,
            p_usv,
            p_x_given_v,
        })
    }

    pub(crate) fn from_flat(nu: usize, nv: usize, ns: usize, nx: usize, p_usv: Vec<f64>, p_x_given_v: Vec<f64>) -> Self {
        AuxInputStoch {
            nu,
            nv,
            ns,
            nx,
            p_usv,
            p_x_given_v,
        }
    }

    /// Embeds a deterministic input with `V = X`.
    pub fn from_deterministic(aux: &AuxInput) -> Self {
        let (nu, ns, nx) = (aux.nu, aux.ns, aux.nx);
        let mut p_usv = vec![0.0; nu * ns * nx];
        for u in 0..nu {
            for s in 0..ns {
                for x in 0..nx {
                    p_usv[(u * ns + s) * nx + x] = aux.p_us(u, s) * aux.p_x_given_us(u, s, x);
                }
            }
        }
        let mut p_x_given_v = vec![0.0; nx * nx];
        for v in 0..nx {
            p_x_given_v[v * nx + v] = 1.0;
        }
        AuxInputStoch {
            nu,
            nv: nx,
            ns,
            nx,
            p_usv,
            p_x_given_v,
        }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
}

fn check_dims(ch: &RelayChannelDMC, ns: usize, nx: usize) -> Result<()> {
    if ns != ch.ns() || nx != ch.nx() {
        return Err(Error::DimensionMismatch(format!(
            "auxiliary input has |S|={ns}, |X|={nx}; channel has |S|={}, |X|={}",
            ch.ns(),
            ch.nx()
        )));
    }
    Ok(())
}

/// `p(u,s,x,y,z) = p(u,s) p(x|u,s) Γ(y,z|x,s)` over `(U,S,X,Y,Z)`.
pub fn build_joint(aux: &AuxInput, ch: &RelayChannelDMC) -> Result<JointDist> {
    check_dims(ch, aux.ns, aux.nx)?;
    let (nu, ns, nx) = (aux.nu, aux.ns, aux.nx);
    let w = ch.ny() * ch.nz();
    let mut pmf = Vec::with_capacity(nu * ns * nx * w);
    for u in 0..nu {
        for s in 0..ns {
            let pus = aux.p_us(u, s);
            for x in 0..nx {
                let pusx = pus * aux.p_x_given_us(u, s, x);
                pmf.extend(ch.row(x, s).iter().map(|g| pusx * g));
            }
        }
    }
    Ok(JointDist {
        vars: vec![Var::U, Var::S, Var::X, Var::Y, Var::Z],
        sizes: vec![nu, ns, nx, ch.ny(), ch.nz()],
        pmf,
    })
}

/// `p(u,s,x,y,z) = p(s,x) Γ(y,z|x,s) p(u|s,x,z)` over `(U,S,X,Y,Z)`.
pub fn build_joint_p2(aux: &AuxInputP2, ch: &RelayChannelDMC) -> Result<JointDist> {
    check_dims(ch, aux.ns, aux.nx)?;
    if aux.nz != ch.nz() {
        return Err(Error::DimensionMismatch(format!("auxiliary |Z|={} vs channel |Z|={}", aux.nz, ch.nz())));
    }
    let (nu, ns, nx, ny, nz) = (aux.nu, aux.ns, aux.nx, ch.ny(), ch.nz());
    let mut pmf = vec![0.0; nu * ns * nx * ny * nz];
    for s in 0..ns {
        for x in 0..nx {
            let psx = aux.p_sx[s * nx + x];
            for y in 0..ny {
                for z in 0..nz {
                    let base = psx * ch.prob(x, s, y, z);
                    for u in 0..nu {
                        let pu = aux.p_u_given_sxz[((s * nx + x) * nz + z) * nu + u];
                        pmf[(((u * ns + s) * nx + x) * ny + y) * nz + z] = base * pu;
                    }
                }
            }
        }
    }
    Ok(JointDist {
        vars: vec![Var::U, Var::S, Var::X, Var::Y, Var::Z],
        sizes: vec![nu, ns, nx, ny, nz],
        pmf,
    })
}

/// `p(u,v,s,x,y,z) = p(u,s,v) p(x|v) Γ(y,z|x,s)` over `(U,V,S,X,Y,Z)`.
pub fn build_joint_stoch(aux: &AuxInputStoch, ch: &RelayChannelDMC) -> Result<JointDist> {
    check_dims(ch, aux.ns, aux.nx)?;
    let (nu, nv, ns, nx) = (aux.nu, aux.nv, aux.ns, aux.nx);
    let w = ch.ny() * ch.nz();
    let mut pmf = Vec::with_capacity(nu * nv * ns * nx * w);
    for u in 0..nu {
        for v in 0..nv {
            for s in 0..ns {
                let p = aux.p_usv[(u * ns + s) * nv + v];
                for x in 0..nx {
                    let pp = p * aux.p_x_given_v[v * nx + x];
                    pmf.extend(ch.row(x, s).iter().map(|g| pp * g));
                }
            }
        }
    }
    Ok(JointDist {
        vars: vec![Var::U, Var::V, Var::S, Var::X, Var::Y, Var::Z],
        sizes: vec![nu, nv, ns, nx, ch.ny(), ch.nz()],
        pmf,
    })
}
