//! Rate regions of discrete memoryless relay channels.

mod bounds;
pub mod hull;
mod optimize;
mod vertices;

use serde::{Deserialize, Serialize};

pub(crate) use bounds::pos;
pub use bounds::{evaluate_bounds, names, Aux, Constraint, Family, RateConstraintSet, RatePoint, Slice};
pub use optimize::{nelder_mead, scalarize_max, shapes_for, task_rng, AuxShape, OptBudget, ScalarResult};
pub use vertices::{enumerate_vertices, weighted_max, FEAS_TOL};

use crate::channel::{classify, ClassTag, RelayChannelDMC, DEFAULT_CLASSIFY_TOL};
use crate::error::Result;

/// Default number of weight samples per simplex edge.
pub const DEFAULT_RESOLUTION: usize = 9;

/// How far a region's points can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// Every point is achievable.
    CertifiedInnerPoint,
    /// Numerical estimate of an outer bound; the optimizer may under-estimate it.
    OuterBoundEstimate,
}

impl RegionKind {
    pub fn for_family(f: Family) -> Self {
        if f.is_inner() {
            RegionKind::CertifiedInnerPoint
        } else {
            RegionKind::OuterBoundEstimate
        }
    }
}

/// A point of a traced region. Gaussian regions also carry the power split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub r0: f64,
    pub r1: f64,
    pub re: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl RegionPoint {
    pub fn rate(&self) -> RatePoint {
        RatePoint::new(self.r0, self.r1, self.re)
    }
}

impl From<RatePoint> for RegionPoint {
    fn from(p: RatePoint) -> Self {
        RegionPoint {
            r0: p.r0,
            r1: p.r1,
            re: p.re,
            theta: None,
            eta: None,
        }
    }
}

/// One support-function sample `max_{r∈region} w·r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierSample {
    pub w: [f64; 3],
    pub value: f64,
    /// Constraint set at the maximizing auxiliary input.
    #[serde(skip)]
    pub constraints: Option<RateConstraintSet>,
    #[serde(skip)]
    pub aux: Option<Aux>,
}

/// A traced rate region: vertices of the polytopes found along the frontier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub family: Family,
    pub slice: Slice,
    pub kind: RegionKind,
    pub points: Vec<RegionPoint>,
    pub frontier: Vec<FrontierSample>,
}

impl RateRegion {
    pub fn new(family: Family, slice: Slice) -> Self {
        RateRegion {
            family,
            slice,
            kind: RegionKind::for_family(family),
            points: Vec::new(),
            frontier: Vec::new(),
        }
    }

    /// Adds a point unless an equal one is already present.
    pub fn add_point(&mut self, p: RegionPoint) {
        let same = |q: &RegionPoint| (q.r0 - p.r0).abs() <= 1e-12 && (q.r1 - p.r1).abs() <= 1e-12 && (q.re - p.re).abs() <= 1e-12;
        if !self.points.iter().any(same) {
            self.points.push(p);
        }
    }

    /// `max w·r` over the stored points.
    pub fn support(&self, w: &[f64; 3]) -> f64 {
        self.points.iter().map(|p| p.rate().dot(w)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_r0(&self) -> f64 {
        self.support(&[1.0, 0.0, 0.0])
    }

    pub fn max_r1(&self) -> f64 {
        self.support(&[0.0, 1.0, 0.0])
    }

    pub fn max_re(&self) -> f64 {
        self.support(&[0.0, 0.0, 1.0])
    }

    /// Hull vertices of the stored points.
    pub fn hull(&self) -> Result<Vec<RegionPoint>> {
        let pts: Vec<[f64; 3]> = self.points.iter().map(|p| p.rate().as_array()).collect();
        let plane = match self.slice {
            Slice::Full => None,
            Slice::NoCommon => Some([1, 2]),
            Slice::Secrecy => Some([0, 1]),
        };
        Ok(hull::hull_indices(&pts, plane)?.into_iter().map(|i| self.points[i]).collect())
    }
}

/// Weight vectors on the simplex with `resolution` samples per edge.
///
/// For the planar slices only the two free rates are weighted.
pub fn weight_grid(slice: Slice, resolution: usize) -> Vec<[f64; 3]> {
    let m = resolution.max(2) - 1;
    let step = 1.0 / m as f64;
    match slice {
        Slice::Full => {
            let mut out = Vec::new();
            for i in 0..=m {
                for j in 0..=m - i {
                    let k = m - i - j;
                    out.push([i as f64 * step, j as f64 * step, k as f64 * step]);
                }
            }
            out
        }
        Slice::NoCommon => (0..=m).map(|i| [0.0, i as f64 * step, (m - i) as f64 * step]).collect(),
        Slice::Secrecy => (0..=m).map(|i| [i as f64 * step, (m - i) as f64 * step, 0.0]).collect(),
    }
}

/// Traces `family` on `slice` by maximizing each weight of `weights`.
///
/// Every auxiliary input that wins some weight is also tried on all other
/// weights, so the frontier values are consistent with the stored points.
pub fn trace_weights(
    ch: &RelayChannelDMC,
    family: Family,
    slice: Slice,
    weights: &[[f64; 3]],
    budget: &OptBudget,
    seed: u64,
) -> Result<RateRegion> {
    let mut winners: Vec<ScalarResult> = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        let r = scalarize_max(ch, family, slice, *w, budget, seed.wrapping_add(i as u64))?;
        if !winners.iter().any(|q| q.aux == r.aux) {
            winners.push(r);
        }
    }
    let mut region = RateRegion::new(family, slice);
    for r in &winners {
        for v in &r.vertices {
            region.add_point((*v).into());
        }
    }
    for w in weights {
        let best = winners
            .iter()
            .map(|r| (weighted_max(&r.vertices, w).map_or(f64::NEG_INFINITY, |(v, _)| v), r))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((value, r)) = best {
            region.frontier.push(FrontierSample {
                w: *w,
                value,
                constraints: Some(r.constraints.clone()),
                aux: Some(r.aux.clone()),
            });
        }
    }
    Ok(region)
}

/// Traces the full three-dimensional region of `family`.
pub fn trace_region(ch: &RelayChannelDMC, family: Family, resolution: usize, budget: &OptBudget, seed: u64) -> Result<RateRegion> {
    trace_weights(ch, family, Slice::Full, &weight_grid(Slice::Full, resolution), budget, seed)
}

/// Encoder class of a region computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoder {
    #[default]
    Deterministic,
    Stochastic,
}

impl std::str::FromStr for Encoder {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic" | "det" => Ok(Encoder::Deterministic),
            "stochastic" | "stoch" => Ok(Encoder::Stochastic),
            other => Err(crate::error::Error::InvalidConfig(format!("unknown encoder '{other}'"))),
        }
    }
}

/// Inner and outer estimates of one planar slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBounds {
    pub inner: RateRegion,
    pub outer: RateRegion,
    /// Tighter outer estimate, present for channels with independent outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_independent: Option<RateRegion>,
}

fn is_independent(ch: &RelayChannelDMC) -> bool {
    classify(ch, DEFAULT_CLASSIFY_TOL).is(ClassTag::Independent)
}

fn slice_bounds(
    ch: &RelayChannelDMC,
    (inner, outer): (Family, Family),
    slice: Slice,
    with_hat: bool,
    resolution: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<RegionBounds> {
    let weights = weight_grid(slice, resolution);
    let inner = trace_weights(ch, inner, slice, &weights, budget, seed)?;
    let outer = trace_weights(ch, outer, slice, &weights, budget, seed)?;
    let outer_independent = if with_hat && is_independent(ch) {
        Some(trace_weights(ch, Family::HatOut, slice, &weights, budget, seed)?)
    } else {
        None
    };
    Ok(RegionBounds {
        inner,
        outer,
        outer_independent,
    })
}

/// Bounds on the secrecy region `{(R0, R1) : (R0, R1, R1) achievable}`.
pub fn secrecy_capacity_region(
    ch: &RelayChannelDMC,
    encoder: Encoder,
    resolution: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<RegionBounds> {
    let (fams, hat) = match encoder {
        Encoder::Deterministic => ((Family::TildeIn, Family::ROut), true),
        Encoder::Stochastic => ((Family::StochIn, Family::StochOut), false),
    };
    slice_bounds(ch, fams, Slice::Secrecy, hat, resolution, budget, seed)
}

/// Bounds on the `(R1, Re)` region with no common message.
pub fn r1e_region(ch: &RelayChannelDMC, encoder: Encoder, resolution: usize, budget: &OptBudget, seed: u64) -> Result<RegionBounds> {
    let (fams, hat) = match encoder {
        Encoder::Deterministic => ((Family::RIn, Family::ROut), true),
        Encoder::Stochastic => ((Family::StochIn, Family::StochOut), false),
    };
    slice_bounds(ch, fams, Slice::NoCommon, hat, resolution, budget, seed)
}

/// Lower and upper estimates of the secrecy capacity `max R1` with `Re = R1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBounds {
    pub lower: f64,
    pub upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_independent: Option<f64>,
    pub lower_aux: Aux,
    pub upper_aux: Aux,
}

pub fn secrecy_capacity(ch: &RelayChannelDMC, encoder: Encoder, budget: &OptBudget, seed: u64) -> Result<CapacityBounds> {
    let (inner, outer, hat) = match encoder {
        Encoder::Deterministic => (Family::TildeIn, Family::ROut, true),
        Encoder::Stochastic => (Family::StochIn, Family::StochOut, false),
    };
    let w = [0.0, 1.0, 0.0];
    let lo = scalarize_max(ch, inner, Slice::Secrecy, w, budget, seed)?;
    let hi = scalarize_max(ch, outer, Slice::Secrecy, w, budget, seed)?;
    let upper_independent = if hat && is_independent(ch) {
        Some(scalarize_max(ch, Family::HatOut, Slice::Secrecy, w, budget, seed)?.value)
    } else {
        None
    };
    Ok(CapacityBounds {
        lower: lo.value,
        upper: hi.value,
        upper_independent,
        lower_aux: lo.aux,
        upper_aux: hi.aux,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_budget() -> OptBudget {
        OptBudget {
            restarts: 3,
            max_evals: 200,
            nu: Some(2),
            nv: Some(2),
            use_p2: false,
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(weight_grid(Slice::Full, 9).len(), 45);
        assert_eq!(weight_grid(Slice::Secrecy, 9).len(), 9);
        for w in weight_grid(Slice::Full, 5) {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_blind_region() {
        let ch = RelayChannelDMC::from_fn(2, 1, 2, 1, |x, _, y, _| if y == x { 1.0 } else { 0.0 }).unwrap();
        let r = trace_region(&ch, Family::TildeIn, 3, &small_budget(), 0).unwrap();
        assert_eq!(r.kind, RegionKind::CertifiedInnerPoint);
        assert!(r.max_r0().abs() < 1e-9);
        assert!((r.max_r1() - 1.0).abs() < 1e-6);
        assert!((r.max_re() - 1.0).abs() < 1e-6);
        for s in &r.frontier {
            let set = s.constraints.as_ref().unwrap();
            for p in enumerate_vertices(set).unwrap() {
                assert!(set.contains(&p, 1e-9));
            }
        }
        let cap = secrecy_capacity(&ch, Encoder::Deterministic, &small_budget(), 0).unwrap();
        assert!((cap.lower - 1.0).abs() < 1e-6);
        assert!(cap.upper >= cap.lower - 1e-9);
    }

    #[test]
    fn hull_of_slice() {
        let ch = RelayChannelDMC::from_fn(2, 1, 2, 1, |x, _, y, _| if y == x { 1.0 } else { 0.0 }).unwrap();
        let b = r1e_region(&ch, Encoder::Deterministic, 3, &small_budget(), 0).unwrap();
        assert_eq!(b.outer.kind, RegionKind::OuterBoundEstimate);
        let h = b.inner.hull().unwrap();
        assert!(h.iter().any(|p| (p.r1 - 1.0).abs() < 1e-6 && (p.re - 1.0).abs() < 1e-6));
    }
}
