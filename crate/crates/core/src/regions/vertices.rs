use crate::error::{Error, Result};
use crate::regions::bounds::{RatePoint, RateConstraintSet};

/// Feasibility tolerance for candidate vertices.
pub const FEAS_TOL: f64 = 1e-9;

const DET_TOL: f64 = 1e-12;

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(&a);
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if d.abs() <= DET_TOL * scale.powi(3).max(1.0) {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][k] = b[row];
        }
        *slot = det3(&m) / d;
    }
    Some(out)
}

/// Vertices of the polytope `{r : A r ≤ b}`.
///
/// Every triple of constraint planes is intersected; intersections feasible
/// within [`FEAS_TOL`] are kept and near-duplicates merged. The result is
/// sorted lexicographically. An infeasible set yields an empty list.
pub fn enumerate_vertices(set: &RateConstraintSet) -> Result<Vec<RatePoint>> {
    if let Some(c) = set.constraints.iter().find(|c| c.coeffs.iter().all(|&v| v == 0.0)) {
        return Err(Error::DegenerateConstraintSet(c.label.clone()));
    }
    let cs = &set.constraints;
    let mut out: Vec<RatePoint> = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            for k in j + 1..cs.len() {
                let a = [cs[i].coeffs, cs[j].coeffs, cs[k].coeffs];
                let b = [cs[i].bound, cs[j].bound, cs[k].bound];
                let Some(v) = solve3(a, b) else { continue };
                // Snap round-off so that points on the coordinate planes are exact.
                let v = v.map(|x| if x.abs() < 1e-13 { 0.0 } else { x });
                let p = RatePoint::from(v);
                if !set.contains(&p, FEAS_TOL) {
                    continue;
                }
                let dup = out.iter().any(|q| {
                    (q.r0 - p.r0).abs() <= FEAS_TOL && (q.r1 - p.r1).abs() <= FEAS_TOL && (q.re - p.re).abs() <= FEAS_TOL
                });
                if !dup {
                    out.push(p);
                }
            }
        }
    }
    out.sort_by(|a, b| a.as_array().partial_cmp(&b.as_array()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// `max_v w·v` over the vertices, or `None` for an empty polytope.
pub fn weighted_max(vertices: &[RatePoint], w: &[f64; 3]) -> Option<(f64, RatePoint)> {
    vertices
        .iter()
        .map(|p| (p.dot(w), *p))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::bounds::Family;

    fn box_set(a: f64, b: f64, c: f64) -> RateConstraintSet {
        let mut s = RateConstraintSet::base(Family::TildeIn);
        s.push([1.0, 0.0, 0.0], a, "R0 <= a");
        s.push([0.0, 1.0, 0.0], b, "R1 <= b");
        s.push([0.0, 0.0, 1.0], c, "Re <= c");
        s
    }

    /// Brute force over a fine lattice: the vertices are exactly the lattice
    /// points that are feasible and not the midpoint of two other feasible
    /// points along any axis-aligned or diagonal direction.
    fn lattice_extreme_points(set: &RateConstraintSet, step: f64, n: usize) -> Vec<[f64; 3]> {
        let feasible = |p: [f64; 3]| set.contains(&RatePoint::from(p), 1e-12);
        let mut out = Vec::new();
        let dirs: Vec<[f64; 3]> = (0..27)
            .map(|k| [(k % 3) as f64 - 1.0, ((k / 3) % 3) as f64 - 1.0, (k / 9) as f64 - 1.0])
            .filter(|d| d.iter().any(|&v| v != 0.0))
            .collect();
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let p = [i as f64 * step, j as f64 * step, k as f64 * step];
                    if !feasible(p) {
                        continue;
                    }
                    let interior = dirs.iter().any(|d| {
                        let a = [p[0] + d[0] * step, p[1] + d[1] * step, p[2] + d[2] * step];
                        let b = [p[0] - d[0] * step, p[1] - d[1] * step, p[2] - d[2] * step];
                        feasible(a) && feasible(b)
                    });
                    if !interior {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn clipped_box_matches_lattice_oracle() {
        // a=1, b=2, c=1 with Re ≤ R1 clipping the box.
        let set = box_set(1.0, 2.0, 1.0);
        let v = enumerate_vertices(&set).unwrap();
        let oracle = lattice_extreme_points(&set, 0.5, 5);
        assert_eq!(v.len(), oracle.len());
        assert_eq!(v.len(), 8);
        for p in &oracle {
            assert!(v.iter().any(|q| q.as_array() == *p), "{p:?} missing");
        }
        // Re ≤ R1 is inactive once c ≥ b: the clipped box has 6 vertices.
        let set = box_set(1.0, 1.0, 2.0);
        assert_eq!(enumerate_vertices(&set).unwrap().len(), 6);
        assert_eq!(lattice_extreme_points(&set, 0.5, 4).len(), 6);
    }

    #[test]
    fn sum_rate_face() {
        let mut set = box_set(1.0, 1.0, 1.0);
        set.push([1.0, 1.0, 0.0], 1.5, "R0+R1 <= 1.5");
        let v = enumerate_vertices(&set).unwrap();
        let oracle = lattice_extreme_points(&set, 0.5, 4);
        assert_eq!(v.len(), oracle.len());
        let (best, p) = weighted_max(&v, &[1.0, 1.0, 0.0]).unwrap();
        assert!((best - 1.5).abs() < 1e-12);
        assert!(set.contains(&p, 0.0));
    }

    #[test]
    fn infeasible_and_degenerate() {
        let mut set = box_set(1.0, 1.0, 1.0);
        set.push([1.0, 0.0, 0.0], -1.0, "R0 <= -1");
        assert!(enumerate_vertices(&set).unwrap().is_empty());
        assert!(weighted_max(&[], &[1.0, 0.0, 0.0]).is_none());

        let mut set = box_set(1.0, 1.0, 1.0);
        set.push([0.0, 0.0, 0.0], 1.0, "0 <= 1");
        assert_eq!(enumerate_vertices(&set).unwrap_err().name(), "DegenerateConstraintSet");
    }

    #[test]
    fn zero_box_is_origin() {
        let v = enumerate_vertices(&box_set(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(v, vec![RatePoint::default()]);
    }
}
