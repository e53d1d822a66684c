use alloc::vec::Vec;

use crate::{Error, Result, Vector};

/// Removes points that do not affect the support function.
///
/// In two dimensions the extreme points are returned in counter-clockwise
/// order (Andrew's monotone chain, collinear points dropped); in one
/// dimension the extremes; in higher dimensions duplicates are removed and
/// the order is kept.
pub fn hull_prune(points: &[Vector]) -> Result<Vec<Vector>> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut v = points.to_vec();
    prune_in_place(&mut v);
    Ok(v)
}

pub(crate) fn prune_in_place(points: &mut Vec<Vector>) {
    if points.len() <= 1 {
        return;
    }
    match points[0].dim() {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            points.clear();
            points.push(Vector::from([lo]));
            if hi != lo {
                points.push(Vector::from([hi]));
            }
        }
        2 => {
            let hull = monotone_chain(points);
            *points = hull;
        }
        _ => {
            let mut out: Vec<Vector> = Vec::with_capacity(points.len());
            for p in points.drain(..) {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            *points = out;
        }
    }
}

fn cross(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn monotone_chain(points: &[Vector]) -> Vec<Vector> {
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Vector> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p.clone());
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn collinear_interior_point_removed() {
        let v = vec![
            Vector::from([0.0, 0.0]),
            Vector::from([1.0, 0.0]),
            Vector::from([0.5, 0.0]),
        ];
        assert_eq!(
            hull_prune(&v).unwrap(),
            vec![Vector::from([0.0, 0.0]), Vector::from([1.0, 0.0])]
        );
    }

    #[test]
    fn singleton_and_empty() {
        let v = vec![Vector::from([0.0, 0.0])];
        assert_eq!(hull_prune(&v).unwrap(), v);
        assert_eq!(hull_prune(&[]), Err(Error::EmptyPointSet));
    }

    #[test]
    fn square_with_center_is_ccw() {
        let v = vec![
            Vector::from([1.0, 1.0]),
            Vector::from([0.5, 0.5]),
            Vector::from([0.0, 0.0]),
            Vector::from([0.0, 1.0]),
            Vector::from([1.0, 0.0]),
        ];
        let h = hull_prune(&v).unwrap();
        assert_eq!(
            h,
            vec![
                Vector::from([0.0, 0.0]),
                Vector::from([1.0, 0.0]),
                Vector::from([1.0, 1.0]),
                Vector::from([0.0, 1.0]),
            ]
        );
    }

    #[test]
    fn one_dimensional_extremes() {
        let v = vec![Vector::from([0.3]), Vector::from([-1.0]), Vector::from([2.0])];
        assert_eq!(
            hull_prune(&v).unwrap(),
            vec![Vector::from([-1.0]), Vector::from([2.0])]
        );
    }
}
