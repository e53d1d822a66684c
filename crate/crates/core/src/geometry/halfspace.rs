use alloc::vec::Vec;

use crate::{tol, Error, Norm, Result, Vector};

/// The closed halfspace `{δ : normal·δ <= offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    /// Same halfspace with a unit Euclidean normal; `None` for a zero normal.
    pub fn normalized(&self) -> Option<Halfspace> {
        let n = self.normal.norm(Norm::L2);
        (n > 0.0).then(|| Halfspace {
            normal: self.normal.scaled(1.0 / n),
            offset: self.offset / n,
        })
    }

    /// Signed Euclidean distance past the boundary (nonpositive inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let n = self.normal.norm(Norm::L2);
        let v = self.normal.dot(x) - self.offset;
        if n > 0.0 {
            v / n
        } else if v > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// A convex region `{δ : aₖ·δ <= bₖ for all k}`, possibly unbounded.
/// With no halfspaces it is the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceRegion {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl HalfspaceRegion {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        for h in &halfspaces {
            if h.normal.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.normal.dim(),
                });
            }
            if !h.normal.is_finite() || !h.offset.is_finite() {
                return Err(Error::NonFinite("halfspace"));
            }
        }
        Ok(HalfspaceRegion { dim, halfspaces })
    }

    pub fn whole(dim: usize) -> Self {
        HalfspaceRegion {
            dim,
            halfspaces: Vec::new(),
        }
    }

    /// The box `{δ : |δᵢ| <= radius}`.
    pub fn cube(dim: usize, radius: f64) -> Self {
        let mut hs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            hs.push(Halfspace::new(Vector::axis(dim, i, 1.0), radius));
            hs.push(Halfspace::new(Vector::axis(dim, i, -1.0), radius));
        }
        HalfspaceRegion { dim, halfspaces: hs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn push(&mut self, h: Halfspace) {
        self.halfspaces.push(h);
    }

    /// Intersection, realized by concatenating the halfspace lists.
    pub fn intersect(&self, other: &HalfspaceRegion) -> HalfspaceRegion {
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        HalfspaceRegion {
            dim: self.dim,
            halfspaces: hs,
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.halfspaces.iter().all(|h| h.offset >= 0.0)
    }

    /// Largest normalized violation over the halfspaces (`-∞` for the whole
    /// space).
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.violation(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.violation(x) <= tol::GEOMETRY
    }

    /// `sup {t >= 0 : t·u ∈ region}` for a region containing the origin.
    pub fn radial(&self, u: &[f64]) -> f64 {
        let mut t = f64::INFINITY;
        for h in &self.halfspaces {
            let a = h.normal.dot(u);
            if a > 0.0 {
                t = t.min((h.offset / a).max(0.0));
            }
        }
        t
    }

    /// Unit-normal copy with trivially satisfied rows (`0·δ <= b`, `b >= 0`)
    /// dropped. Infeasible zero rows are kept so the region stays empty.
    pub fn normalized(&self) -> HalfspaceRegion {
        let halfspaces = self
            .halfspaces
            .iter()
            .filter_map(|h| match h.normalized() {
                Some(n) => Some(n),
                None if h.offset >= 0.0 => None,
                None => Some(h.clone()),
            })
            .collect();
        HalfspaceRegion {
            dim: self.dim,
            halfspaces,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn membership_and_radial() {
        let r = HalfspaceRegion::new(
            2,
            vec![
                Halfspace::new(Vector::from([2.0, 0.0]), 1.0),
                Halfspace::new(Vector::from([0.0, -1.0]), 3.0),
            ],
        )
        .unwrap();
        assert!(r.contains(&[0.5, -3.0]));
        assert!(!r.contains(&[0.51, 0.0]));
        assert_eq!(r.radial(&[1.0, 0.0]), 0.5);
        assert_eq!(r.radial(&[0.0, 1.0]), f64::INFINITY);
        assert!(r.contains_origin());
    }

    #[test]
    fn normalization_drops_trivial_rows() {
        let r = HalfspaceRegion::new(
            1,
            vec![
                Halfspace::new(Vector::from([0.0]), 1.0),
                Halfspace::new(Vector::from([4.0]), 2.0),
            ],
        )
        .unwrap()
        .normalized();
        assert_eq!(r.halfspaces(), &[Halfspace::new(Vector::from([1.0]), 0.5)]);
    }
}
