use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::RelayChannelDMC;
use crate::error::{Error, Result};
use crate::info::{AuxInput, AuxInputP2, AuxInputStoch};
use crate::regions::bounds::{evaluate_bounds, Aux, Family, RatePoint, RateConstraintSet, Slice};
use crate::regions::vertices::{enumerate_vertices, weighted_max};

/// Optimization budget for the auxiliary search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptBudget {
    /// Number of Nelder–Mead starts. Start 0 is the uniform distribution.
    pub restarts: usize,
    /// Objective evaluations per start.
    pub max_evals: usize,
    /// `|U|`; `None` uses the family cap.
    pub nu: Option<usize>,
    /// `|V|` for stochastic families; `None` uses the family cap.
    pub nv: Option<usize>,
    /// Also search P2 inputs for families that accept them.
    pub use_p2: bool,
}

impl Default for OptBudget {
    fn default() -> Self {
        OptBudget {
            restarts: 64,
            max_evals: 2000,
            nu: None,
            nv: None,
            use_p2: true,
        }
    }
}

impl OptBudget {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// Minimizes `f` with the adaptive Nelder–Mead simplex method.
///
/// Returns the best point and value. Stops after `max_evals` evaluations or
/// once the simplex values agree within `ftol`.
pub fn nelder_mead(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, max_evals: usize, ftol: f64) -> (Vec<f64>, f64) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f(x0));
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;

    let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> { c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect() };

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[n] - values[0]).abs() <= ftol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / nf;
            }
        }
        let worst = simplex[n].clone();
        let xr = point(&centroid, &worst, -alpha);
        let fr = f(&xr);
        evals += 1;

        if fr < values[0] {
            let xe = point(&centroid, &worst, -alpha * gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = point(&centroid, &xr, rho);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = point(&centroid, &worst, rho);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = point(&best, &simplex[i], sigma);
                    values[i] = f(&simplex[i]);
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    (simplex[best].clone(), values[best])
}

fn softmax_into(logits: &[f64], out: &mut Vec<f64>) {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let start = out.len();
    let mut total = 0.0;
    for &l in logits {
        let e = (l - m).exp();
        total += e;
        out.push(e);
    }
    for v in &mut out[start..] {
        *v /= total;
    }
}

fn softmax_blocks(logits: &[f64], block: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for chunk in logits.chunks(block) {
        softmax_into(chunk, &mut out);
    }
    out
}

/// Unconstrained parametrization of one auxiliary family by softmax logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxShape {
    P1 { nu: usize, ns: usize, nx: usize },
    P2 { nu: usize, ns: usize, nx: usize, nz: usize },
    Stoch { nu: usize, nv: usize, ns: usize, nx: usize },
}

impl AuxShape {
    pub fn dim(self) -> usize {
        match self {
            AuxShape::P1 { nu, ns, nx } => nu * ns + nu * ns * nx,
            AuxShape::P2 { nu, ns, nx, nz } => ns * nx + ns * nx * nz * nu,
            AuxShape::Stoch { nu, nv, ns, nx } => nu * ns * nv + nv * nx,
        }
    }

    pub fn decode(self, theta: &[f64]) -> Aux {
        match self {
            AuxShape::P1 { nu, ns, nx } => {
                let (a, b) = theta.split_at(nu * ns);
                Aux::P1(AuxInput::from_flat(nu, ns, nx, softmax_blocks(a, nu * ns), softmax_blocks(b, nx)))
            }
            AuxShape::P2 { nu, ns, nx, nz } => {
                let (a, b) = theta.split_at(ns * nx);
                Aux::P2(AuxInputP2 {
                    nu,
                    ns,
                    nx,
                    nz,
                    p_sx: softmax_blocks(a, ns * nx),
                    p_u_given_sxz: softmax_blocks(b, nu),
                })
            }
            AuxShape::Stoch { nu, nv, ns, nx } => {
                let (a, b) = theta.split_at(nu * ns * nv);
                Aux::Stoch(AuxInputStoch::from_flat(
                    nu,
                    nv,
                    ns,
                    nx,
                    softmax_blocks(a, nu * ns * nv),
                    softmax_blocks(b, nx),
                ))
            }
        }
    }
}

/// Auxiliary shapes searched for `family` under `budget`.
pub fn shapes_for(ch: &RelayChannelDMC, family: Family, budget: &OptBudget) -> Result<Vec<AuxShape>> {
    let caps = family.caps(ch);
    let nu = budget.nu.unwrap_or(caps.u);
    if nu == 0 || nu > caps.u {
        return Err(Error::CardinalityCapExceeded {
            family: format!("{family} (U)"),
            size: nu,
            cap: caps.u,
        });
    }
    let (ns, nx, nz) = (ch.ns(), ch.nx(), ch.nz());
    if family.is_stochastic() {
        let cap = caps.v.unwrap_or(usize::MAX);
        let nv = budget.nv.unwrap_or(cap);
        if nv == 0 || nv > cap {
            return Err(Error::CardinalityCapExceeded {
                family: format!("{family} (V)"),
                size: nv,
                cap,
            });
        }
        return Ok(vec![AuxShape::Stoch { nu, nv, ns, nx }]);
    }
    let p1_cap = crate::info::CardinalityCaps::p1(ch).u;
    let mut shapes = vec![AuxShape::P1 { nu: nu.min(p1_cap), ns, nx }];
    if family.accepts_p2() && budget.use_p2 {
        shapes.push(AuxShape::P2 { nu, ns, nx, nz });
    }
    Ok(shapes)
}

/// Outcome of one weighted-sum maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarResult {
    pub w: [f64; 3],
    /// `max w·r` found.
    pub value: f64,
    /// A vertex attaining `value` at the best auxiliary input.
    pub point: RatePoint,
    pub aux: Aux,
    pub constraints: RateConstraintSet,
    pub vertices: Vec<RatePoint>,
}

fn scalar_value(aux: &Aux, ch: &RelayChannelDMC, family: Family, slice: Slice, w: &[f64; 3]) -> Option<f64> {
    let set = evaluate_bounds(aux, ch, family).ok()?.sliced(slice);
    let v = enumerate_vertices(&set).ok()?;
    weighted_max(&v, w).map(|(val, _)| val)
}

/// Independent RNG for optimization task `task` under `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn start_point(dim: usize, restart: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if restart == 0 {
        return vec![0.0; dim];
    }
    // Alternate between mild and sharp starts; sharp ones sit near the
    // boundary of the simplex where deterministic inputs live.
    let scale = [1.0, 3.0, 6.0][restart % 3];
    (0..dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        })
        .collect()
}

/// Maximizes `w·r` over the region of `family` restricted to `slice`.
///
/// Each start `k` draws from its own stream keyed by `(seed, k)`, so the
/// starts of a budget are a prefix of the starts of any larger budget and
/// the result is non-decreasing in `budget.restarts`.
pub fn scalarize_max(
    ch: &RelayChannelDMC,
    family: Family,
    slice: Slice,
    w: [f64; 3],
    budget: &OptBudget,
    seed: u64,
) -> Result<ScalarResult> {
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParams(format!("weights {w:?} must be finite and nonnegative")));
    }
    let shapes = shapes_for(ch, family, budget)?;
    let mut best: Option<(f64, Aux)> = None;
    for (si, shape) in shapes.iter().enumerate() {
        let dim = shape.dim();
        for restart in 0..budget.restarts.max(1) {
            let mut rng = task_rng(seed, ((si as u64) << 32) | restart as u64);
            let x0 = start_point(dim, restart, &mut rng);
            let mut obj = |theta: &[f64]| -> f64 {
                scalar_value(&shape.decode(theta), ch, family, slice, &w).map_or(f64::INFINITY, |v| -v)
            };
            let (x, fx) = nelder_mead(&mut obj, &x0, 1.0, budget.max_evals, 1e-12);
            if !fx.is_finite() {
                continue;
            }
            let val = -fx;
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, shape.decode(&x)));
            }
        }
    }
    let (_, aux) = best.ok_or_else(|| Error::InternalConsistency(format!("{family}: no feasible auxiliary input found")))?;
    let constraints = evaluate_bounds(&aux, ch, family)?.sliced(slice);
    let vertices = enumerate_vertices(&constraints)?;
    let (value, point) = weighted_max(&vertices, &w)
        .ok_or_else(|| Error::InternalConsistency(format!("{family}: empty region at the optimum")))?;
    Ok(ScalarResult {
        w,
        value,
        point,
        aux,
        constraints,
        vertices,
    })
}
