use chull::ConvexHullWrapper;

use crate::error::{Error, Result};

const SPREAD_TOL: f64 = 1e-12;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the convex hull of planar points, counter-clockwise (Andrew's monotone chain).
pub fn hull_2d(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap_or(std::cmp::Ordering::Equal));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(points[lower[lower.len() - 2]], points[lower[lower.len() - 1]], points[i]) <= SPREAD_TOL {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(points[upper[upper.len() - 2]], points[upper[upper.len() - 1]], points[i]) <= SPREAD_TOL {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Indices of the hull vertices of `points` in three dimensions.
///
/// Point sets spanning fewer than three axes are hulled in the span of the
/// remaining axes. `plane` forces a projection onto two coordinates, for
/// point sets that lie in a known tilted plane.
pub fn hull_indices(points: &[[f64; 3]], plane: Option<[usize; 2]>) -> Result<Vec<usize>> {
    if points.len() <= 1 {
        return Ok((0..points.len()).collect());
    }
    let axes: Vec<usize> = match plane {
        Some(p) => p.to_vec(),
        None => (0..3)
            .filter(|&k| {
                let (lo, hi) = points.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
                hi - lo > SPREAD_TOL
            })
            .collect(),
    };
    match axes.len() {
        0 => Ok(vec![0]),
        1 => {
            let k = axes[0];
            let lo = (0..points.len()).min_by(|&a, &b| points[a][k].total_cmp(&points[b][k])).unwrap_or(0);
            let hi = (0..points.len()).max_by(|&a, &b| points[a][k].total_cmp(&points[b][k])).unwrap_or(0);
            Ok(vec![lo, hi])
        }
        2 => {
            let flat: Vec<[f64; 2]> = points.iter().map(|p| [p[axes[0]], p[axes[1]]]).collect();
            Ok(hull_2d(&flat))
        }
        _ => {
            let pts: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
            match ConvexHullWrapper::try_new(&pts, None) {
                Ok(h) => {
                    let (verts, _) = h.vertices_indices();
                    let mut out: Vec<usize> = verts
                        .iter()
                        .filter_map(|v| points.iter().position(|p| p.iter().zip(v).all(|(a, b)| a == b)))
                        .collect();
                    out.sort_unstable();
                    out.dedup();
                    Ok(out)
                }
                Err(e) => Err(Error::Hull(format!("{e:?}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_point() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        let mut h = hull_2d(&pts);
        h.sort_unstable();
        assert_eq!(h, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cube_hull() {
        let mut pts: Vec<[f64; 3]> = (0..8).map(|k| [(k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64]).collect();
        pts.push([0.5, 0.5, 0.5]);
        let h = hull_indices(&pts, None).unwrap();
        assert_eq!(h, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn planar_and_collinear_sets() {
        let pts = [[0.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [0.5, 0.5, 0.5]];
        let mut h = hull_indices(&pts, Some([0, 1])).unwrap();
        h.sort_unstable();
        assert_eq!(h, vec![0, 1, 2, 3]);
        let line = [[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 1.0, 0.0]];
        assert_eq!(hull_indices(&line, None).unwrap(), vec![0, 1]);
    }
}
