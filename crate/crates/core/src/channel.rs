//! Discrete memoryless relay channels `Γ(y,z|x,s)`, Gaussian parameter sets,
//! and structural classification by degradedness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::var::{fmt_vars, Var};

/// Default tolerance for [`classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Row sums closer to one than this are renormalized, others rejected.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Stochastic matrix `Γ(y,z|x,s)` stored densely, indexed `[x][s][y][z]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelFile", into = "ChannelFile")]
pub struct RelayChannelDMC {
    nx: usize,
    ns: usize,
    ny: usize,
    nz: usize,
    prob: Vec<f64>,
}

/// On-disk layout of a channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub nx: usize,
    pub ns: usize,
    pub ny: usize,
    pub nz: usize,
    pub prob: Vec<Vec<Vec<Vec<f64>>>>,
}

impl TryFrom<ChannelFile> for RelayChannelDMC {
    type Error = Error;

    fn try_from(file: ChannelFile) -> Result<Self> {
        let ch = validate_channel(&file.prob)?;
        if (ch.nx, ch.ns, ch.ny, ch.nz) != (file.nx, file.ns, file.ny, file.nz) {
            return Err(Error::DimensionMismatch(format!(
                "declared sizes ({}, {}, {}, {}) but prob has shape ({}, {}, {}, {})",
                file.nx, file.ns, file.ny, file.nz, ch.nx, ch.ns, ch.ny, ch.nz
            )));
        }
        Ok(ch)
    }
}

impl From<RelayChannelDMC> for ChannelFile {
    fn from(ch: RelayChannelDMC) -> Self {
        let prob = (0..ch.nx)
            .map(|x| {
                (0..ch.ns)
                    .map(|s| {
                        (0..ch.ny)
                            .map(|y| (0..ch.nz).map(|z| ch.prob(x, s, y, z)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChannelFile {
            nx: ch.nx,
            ns: ch.ns,
            ny: ch.ny,
            nz: ch.nz,
            prob,
        }
    }
}

/// Validates a raw `[x][s][y][z]` array into a channel.
///
/// Rows whose sum is within [`ROW_SUM_TOL`] of one are rescaled to sum to one
/// exactly; larger deviations are rejected.
pub fn validate_channel(raw: &[Vec<Vec<Vec<f64>>>]) -> Result<RelayChannelDMC> {
    let nx = raw.len();
    if nx == 0 {
        return Err(Error::EmptyAlphabet("X".into()));
    }
    let ns = raw[0].len();
    if ns == 0 {
        return Err(Error::EmptyAlphabet("S".into()));
    }
    let ny = raw[0][0].len();
    if ny == 0 {
        return Err(Error::EmptyAlphabet("Y".into()));
    }
    let nz = raw[0][0][0].len();
    if nz == 0 {
        return Err(Error::EmptyAlphabet("Z".into()));
    }
    let mut prob = Vec::with_capacity(nx * ns * ny * nz);
    for (x, by_s) in raw.iter().enumerate() {
        if by_s.len() != ns {
            return Err(Error::NotRectangular(format!("prob[{x}] has {} entries, expected {ns}", by_s.len())));
        }
        for (s, by_y) in by_s.iter().enumerate() {
            if by_y.len() != ny {
                return Err(Error::NotRectangular(format!(
                    "prob[{x}][{s}] has {} entries, expected {ny}",
                    by_y.len()
                )));
            }
            let start = prob.len();
            for (y, by_z) in by_y.iter().enumerate() {
                if by_z.len() != nz {
                    return Err(Error::NotRectangular(format!(
                        "prob[{x}][{s}][{y}] has {} entries, expected {nz}",
                        by_z.len()
                    )));
                }
                for (z, &p) in by_z.iter().enumerate() {
                    if !p.is_finite() || p < 0.0 {
                        return Err(Error::NegativeProbability {
                            location: format!("[{x}][{s}][{y}][{z}]"),
                            value: p,
                        });
                    }
                    prob.push(p);
                }
            }
            normalize_row(&mut prob[start..], || format!("[{x}][{s}]"))?;
        }
    }
    Ok(RelayChannelDMC { nx, ns, ny, nz, prob })
}

fn normalize_row(row: &mut [f64], location: impl Fn() -> String) -> Result<()> {
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() >= ROW_SUM_TOL {
        return Err(Error::RowSumViolation { location: location(), sum });
    }
    if sum != 1.0 {
        row.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

impl RelayChannelDMC {
    /// Builds a channel from a probability function `f(x, s, y, z)`.
    pub fn from_fn(
        nx: usize,
        ns: usize,
        ny: usize,
        nz: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let raw: Vec<Vec<Vec<Vec<f64>>>> = (0..nx)
            .map(|x| {
                (0..ns)
                    .map(|s| (0..ny).map(|y| (0..nz).map(|z| f(x, s, y, z)).collect()).collect())
                    .collect()
            })
            .collect();
        validate_channel(&raw)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    #[inline]
    pub fn prob(&self, x: usize, s: usize, y: usize, z: usize) -> f64 {
        self.prob[((x * self.ns + s) * self.ny + y) * self.nz + z]
    }

    /// The `ny * nz` block `Γ(·,·|x,s)`, `y`-major.
    #[inline]
    pub fn row(&self, x: usize, s: usize) -> &[f64] {
        let w = self.ny * self.nz;
        let start = (x * self.ns + s) * w;
        &self.prob[start..start + w]
    }

    /// `Γ(y|x,s)`, indexed `[x][s][y]`.
    pub fn y_given_xs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.ns * self.ny];
        for x in 0..self.nx {
            for s in 0..self.ns {
                for y in 0..self.ny {
                    out[(x * self.ns + s) * self.ny + y] = (0..self.nz).map(|z| self.prob(x, s, y, z)).sum();
                }
            }
        }
        out
    }

    /// `Γ(z|x,s)`, indexed `[x][s][z]`.
    pub fn z_given_xs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.ns * self.nz];
        for x in 0..self.nx {
            for s in 0..self.ns {
                for y in 0..self.ny {
                    for z in 0..self.nz {
                        out[(x * self.ns + s) * self.nz + z] += self.prob(x, s, y, z);
                    }
                }
            }
        }
        out
    }

    /// Returns the same channel with alphabet labels permuted. `perm_x[x]` is
    /// the new label of old symbol `x`, and likewise for the other alphabets.
    pub fn relabel(&self, perm_x: &[usize], perm_s: &[usize], perm_y: &[usize], perm_z: &[usize]) -> Result<Self> {
        if perm_x.len() != self.nx || perm_s.len() != self.ns || perm_y.len() != self.ny || perm_z.len() != self.nz {
            return Err(Error::DimensionMismatch("permutation sizes differ from alphabet sizes".into()));
        }
        let mut out = self.clone();
        for x in 0..self.nx {
            for s in 0..self.ns {
                for y in 0..self.ny {
                    for z in 0..self.nz {
                        let idx = ((perm_x[x] * self.ns + perm_s[s]) * self.ny + perm_y[y]) * self.nz + perm_z[z];
                        out.prob[idx] = self.prob(x, s, y, z);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Gaussian relay channel `Y = X + S + ξ1`, `Z = X + ξ2` with noise
/// covariance `[[N1, ρ√(N1N2)], [ρ√(N1N2), N2]]` and power limits `P1`, `P2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianFile", into = "GaussianFile")]
pub struct GaussianRelayParams {
    pub n1: f64,
    pub n2: f64,
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussianFile {
    #[serde(rename = "N1")]
    pub n1: f64,
    #[serde(rename = "N2")]
    pub n2: f64,
    pub rho: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
}

impl TryFrom<GaussianFile> for GaussianRelayParams {
    type Error = Error;

    fn try_from(f: GaussianFile) -> Result<Self> {
        GaussianRelayParams::new(f.n1, f.n2, f.rho, f.p1, f.p2)
    }
}

impl From<GaussianRelayParams> for GaussianFile {
    fn from(p: GaussianRelayParams) -> Self {
        GaussianFile {
            n1: p.n1,
            n2: p.n2,
            rho: p.rho,
            p1: p.p1,
            p2: p.p2,
        }
    }
}

impl GaussianRelayParams {
    pub fn new(n1: f64, n2: f64, rho: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(n1 > 0.0 && n1.is_finite()) || !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::InvalidParams(format!("noise variances must be positive, got N1={n1}, N2={n2}")));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParams(format!("|rho| must be below 1, got {rho}")));
        }
        if !(p1 >= 0.0 && p1.is_finite()) || !(p2 >= 0.0 && p2.is_finite()) {
            return Err(Error::InvalidParams(format!("powers must be nonnegative, got P1={p1}, P2={p2}")));
        }
        Ok(GaussianRelayParams { n1, n2, rho, p1, p2 })
    }

    /// `N1 ≤ N2` and `ρ = √(N1/N2)` up to `tol`.
    pub fn is_reversely_degraded(&self, tol: f64) -> bool {
        self.n1 <= self.n2 && (self.rho - (self.n1 / self.n2).sqrt()).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    Degraded,
    ReverselyDegraded,
    Independent,
    General,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::Degraded => "Degraded",
            ClassTag::ReverselyDegraded => "ReverselyDegraded",
            ClassTag::Independent => "Independent",
            ClassTag::General => "General",
        };
        f.write_str(s)
    }
}

/// Result of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelClass {
    /// First satisfied class in the order Degraded, ReverselyDegraded,
    /// Independent; `General` when none holds.
    pub tag: ClassTag,
    pub satisfied: Vec<ClassTag>,
    /// Largest factorization violation per class.
    pub residuals: BTreeMap<ClassTag, f64>,
    pub tol: f64,
}

impl ChannelClass {
    pub fn is(&self, tag: ClassTag) -> bool {
        self.satisfied.contains(&tag)
    }
}

/// Classifies a channel by which factorizations of `Γ` hold within `tol`.
///
/// * Degraded: `Y ⊥ X | (Z, S)` pointwise over inputs.
/// * Reversely degraded: `Z ⊥ X | (Y, S)` pointwise over inputs.
/// * Independent: `Y ⊥ Z | (X, S)` and `Γ(z|x,s)` free of `s`.
///
/// Conditionals on events of probability at most `tol` are unconstrained.
pub fn classify(ch: &RelayChannelDMC, tol: f64) -> ChannelClass {
    let tol = tol.max(0.0);
    let y_xs = ch.y_given_xs();
    let z_xs = ch.z_given_xs();
    let (nx, ns, ny, nz) = (ch.nx, ch.ns, ch.ny, ch.nz);

    let degraded = pointwise_residual(nx, ns, nz, ny, tol, |x, s, z| z_xs[(x * ns + s) * nz + z], |x, s, z, y| {
        ch.prob(x, s, y, z)
    });
    let reversely = pointwise_residual(nx, ns, ny, nz, tol, |x, s, y| y_xs[(x * ns + s) * ny + y], |x, s, y, z| {
        ch.prob(x, s, y, z)
    });

    let mut product_gap: f64 = 0.0;
    for x in 0..nx {
        for s in 0..ns {
            for y in 0..ny {
                for z in 0..nz {
                    let fact = y_xs[(x * ns + s) * ny + y] * z_xs[(x * ns + s) * nz + z];
                    product_gap = product_gap.max((ch.prob(x, s, y, z) - fact).abs());
                }
            }
        }
    }
    let mut relay_gap: f64 = 0.0;
    for x in 0..nx {
        for z in 0..nz {
            let vals = (0..ns).map(|s| z_xs[(x * ns + s) * nz + z]);
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            relay_gap = relay_gap.max(hi - lo);
        }
    }
    let independent = product_gap.max(relay_gap);

    let mut residuals = BTreeMap::new();
    residuals.insert(ClassTag::Degraded, degraded);
    residuals.insert(ClassTag::ReverselyDegraded, reversely);
    residuals.insert(ClassTag::Independent, independent);

    let satisfied: Vec<ClassTag> = [ClassTag::Degraded, ClassTag::ReverselyDegraded, ClassTag::Independent]
        .into_iter()
        .filter(|t| residuals[t] <= tol)
        .collect();
    let tag = satisfied.first().copied().unwrap_or(ClassTag::General);
    ChannelClass {
        tag,
        satisfied,
        residuals,
        tol,
    }
}

// Max over (s, c, x, x') with both P(c|x,s), P(c|x',s) > tol of
// max_o |P(o|c,x,s) - P(o|c,x',s)|. `c` is the conditioning output, `o` the other.
fn pointwise_residual(
    nx: usize,
    ns: usize,
    nc: usize,
    no: usize,
    tol: f64,
    cond: impl Fn(usize, usize, usize) -> f64,
    joint: impl Fn(usize, usize, usize, usize) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(nx);
    for s in 0..ns {
        for c in 0..nc {
            rows.clear();
            for x in 0..nx {
                let pc = cond(x, s, c);
                if pc > tol {
                    rows.push((0..no).map(|o| joint(x, s, c, o) / pc).collect());
                }
            }
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    for o in 0..no {
                        worst = worst.max((rows[i][o] - rows[j][o]).abs());
                    }
                }
            }
        }
    }
    worst
}

/// Conditional table of channel outputs given inputs and possibly the other
/// output. Values are `None` where the conditioning event has probability 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CondTable {
    pub given: Vec<Var>,
    pub target: Vec<Var>,
    pub given_sizes: Vec<usize>,
    pub target_sizes: Vec<usize>,
    pub values: Vec<Option<f64>>,
}

impl CondTable {
    /// Entry at `given` symbol tuple and `target` symbol tuple.
    pub fn get(&self, given: &[usize], target: &[usize]) -> Option<f64> {
        let gi = flat_index(given, &self.given_sizes);
        let ti = flat_index(target, &self.target_sizes);
        let width: usize = self.target_sizes.iter().product();
        self.values[gi * width + ti]
    }
}

fn flat_index(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &n)| acc * n + i)
}

/// Computes `Γ(target | given)` by exact marginalization.
///
/// `target` must be a nonempty subset of `{Y, Z}`; `given` must contain `X`
/// and `S` and may contain the output not in `target`. Fails with
/// `UndefinedConditional` when some value of a conditioning output cannot
/// occur for any input.
pub fn conditional_marginal(ch: &RelayChannelDMC, target: &[Var], given: &[Var]) -> Result<CondTable> {
    if target.is_empty() {
        return Err(Error::InvalidConfig("empty target set".into()));
    }
    for v in target {
        if !matches!(v, Var::Y | Var::Z) {
            return Err(Error::InvalidConfig(format!("target {v} is not a channel output")));
        }
        if given.contains(v) {
            return Err(Error::OverlappingVariableSets(format!("{v} in both target and given")));
        }
    }
    for v in given {
        if !matches!(v, Var::X | Var::S | Var::Y | Var::Z) {
            return Err(Error::MissingVariable(v.to_string()));
        }
    }
    if !given.contains(&Var::X) || !given.contains(&Var::S) {
        return Err(Error::InvalidConfig("conditioning set must contain X and S".into()));
    }
    let size = |v: &Var| match v {
        Var::X => ch.nx,
        Var::S => ch.ns,
        Var::Y => ch.ny,
        Var::Z => ch.nz,
        _ => unreachable!(),
    };
    let given_sizes: Vec<usize> = given.iter().map(size).collect();
    let target_sizes: Vec<usize> = target.iter().map(size).collect();
    let ng: usize = given_sizes.iter().product();
    let nt: usize = target_sizes.iter().product();
    let mut values = vec![None; ng * nt];

    let given_outputs: Vec<Var> = given.iter().copied().filter(|v| matches!(v, Var::Y | Var::Z)).collect();
    let mut output_seen = vec![false; ng];
    let mut gvals = vec![0usize; given.len()];
    let mut tvals = vec![0usize; target.len()];
    for gi in 0..ng {
        unflatten(gi, &given_sizes, &mut gvals);
        let lookup = |v: Var, tv: &[usize]| -> Option<usize> {
            given
                .iter()
                .position(|g| *g == v)
                .map(|p| gvals[p])
                .or_else(|| target.iter().position(|t| *t == v).map(|p| tv[p]))
        };
        let x = lookup(Var::X, &[]).unwrap();
        let s = lookup(Var::S, &[]).unwrap();
        // P(given outputs | x, s)
        let denom: f64 = (0..ch.ny)
            .flat_map(|y| (0..ch.nz).map(move |z| (y, z)))
            .filter(|&(y, z)| {
                given_outputs.iter().all(|v| match v {
                    Var::Y => lookup(Var::Y, &[]) == Some(y),
                    Var::Z => lookup(Var::Z, &[]) == Some(z),
                    _ => true,
                })
            })
            .map(|(y, z)| ch.prob(x, s, y, z))
            .sum();
        if denom <= 0.0 {
            continue;
        }
        output_seen[gi] = true;
        for ti in 0..nt {
            unflatten(ti, &target_sizes, &mut tvals);
            let num: f64 = (0..ch.ny)
                .flat_map(|y| (0..ch.nz).map(move |z| (y, z)))
                .filter(|&(y, z)| {
                    [Var::Y, Var::Z].iter().all(|v| {
                        let want = lookup(*v, &tvals);
                        match (v, want) {
                            (_, None) => true,
                            (Var::Y, Some(w)) => w == y,
                            (Var::Z, Some(w)) => w == z,
                            _ => true,
                        }
                    })
                })
                .map(|(y, z)| ch.prob(x, s, y, z))
                .sum();
            values[gi * nt + ti] = Some(num / denom);
        }
    }

    // An output value that no input can produce makes the table meaningless.
    if !given_outputs.is_empty() {
        let pos: Vec<usize> = given_outputs
            .iter()
            .map(|v| given.iter().position(|g| g == v).unwrap())
            .collect();
        let mut possible: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
        for gi in 0..ng {
            unflatten(gi, &given_sizes, &mut gvals);
            let key: Vec<usize> = pos.iter().map(|&p| gvals[p]).collect();
            *possible.entry(key).or_insert(false) |= output_seen[gi];
        }
        if let Some((key, _)) = possible.iter().find(|(_, ok)| !**ok) {
            return Err(Error::UndefinedConditional(format!(
                "{}={:?} has probability 0 for every input",
                fmt_vars(&given_outputs),
                key
            )));
        }
    }

    Ok(CondTable {
        given: given.to_vec(),
        target: target.to_vec(),
        given_sizes,
        target_sizes,
        values,
    })
}

pub(crate) fn unflatten(mut idx: usize, sizes: &[usize], out: &mut [usize]) {
    for k in (0..sizes.len()).rev() {
        out[k] = idx % sizes[k];
        idx /= sizes[k];
    }
}
