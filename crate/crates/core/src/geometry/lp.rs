//! Dense two-phase simplex for `max c·δ s.t. Aδ <= b` with free `δ`.

use alloc::vec;
use alloc::vec::Vec;

use super::halfspace::HalfspaceRegion;
use crate::{tol, Error, Result, Vector};

/// Pivot and reduced-cost threshold. Rows are normalized to unit normals
/// before solving, so coefficients are of order one.
const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vector },
    /// The objective grows without bound along `ray` (which stays feasible).
    Unbounded { ray: Vector },
    Infeasible,
}

impl LpOutcome {
    /// Optimal value, `+∞` when unbounded and `-∞` when infeasible.
    pub fn value(&self) -> f64 {
        match self {
            LpOutcome::Optimal { value, .. } => *value,
            LpOutcome::Unbounded { .. } => f64::INFINITY,
            LpOutcome::Infeasible => f64::NEG_INFINITY,
        }
    }
}

/// Maximizes `objective·δ` over the region.
pub fn lp_maximize(objective: &[f64], region: &HalfspaceRegion) -> Result<LpOutcome> {
    let d = region.dim();
    if objective.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: objective.len(),
        });
    }
    if !objective.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("objective"));
    }
    let region = region.normalized();
    let rows = region.halfspaces();
    if rows.iter().any(|h| h.normal.iter().all(|a| *a == 0.0)) {
        // Only infeasible zero rows survive normalization.
        return Ok(LpOutcome::Infeasible);
    }
    Ok(Tableau::build(objective, &region).solve())
}

struct Tableau {
    /// Structural variables: `d` positive parts, `d` negative parts.
    d: usize,
    m: usize,
    /// Total columns excluding the right-hand side.
    n: usize,
    first_artificial: usize,
    /// Row-major `m × (n + 1)`; the last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
    objective: Vec<f64>,
}

impl Tableau {
    fn build(objective: &[f64], region: &HalfspaceRegion) -> Tableau {
        let d = objective.len();
        let rows = region.halfspaces();
        let m = rows.len();
        let n_art = rows.iter().filter(|h| h.offset < 0.0).count();
        let first_artificial = 2 * d + m;
        let n = first_artificial + n_art;
        let w = n + 1;
        let mut a = vec![0.0; m * w];
        let mut basis = vec![0; m];
        let mut next_art = first_artificial;
        for (i, h) in rows.iter().enumerate() {
            let sign = if h.offset < 0.0 { -1.0 } else { 1.0 };
            let row = &mut a[i * w..(i + 1) * w];
            for j in 0..d {
                row[j] = sign * h.normal[j];
                row[d + j] = -sign * h.normal[j];
            }
            row[2 * d + i] = sign;
            row[n] = sign * h.offset;
            if h.offset < 0.0 {
                row[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = 2 * d + i;
            }
        }
        let mut obj = vec![0.0; n];
        for j in 0..d {
            obj[j] = objective[j];
            obj[d + j] = -objective[j];
        }
        Tableau {
            d,
            m,
            n,
            first_artificial,
            a,
            basis,
            objective: obj,
        }
    }

    fn solve(mut self) -> LpOutcome {
        if self.first_artificial < self.n {
            let phase1: Vec<f64> = (0..self.n)
                .map(|j| if j >= self.first_artificial { -1.0 } else { 0.0 })
                .collect();
            // Phase one is bounded above by zero.
            let _ = self.run(&phase1, self.n);
            if self.value(&phase1) < -tol::GEOMETRY {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
        }
        let cost = core::mem::take(&mut self.objective);
        match self.run(&cost, self.first_artificial) {
            Ok(()) => {
                let value = self.value(&cost);
                LpOutcome::Optimal {
                    value,
                    point: self.point(),
                }
            }
            Err(entering) => LpOutcome::Unbounded {
                ray: self.ray(entering),
            },
        }
    }

    fn width(&self) -> usize {
        self.n + 1
    }

    fn value(&self, cost: &[f64]) -> f64 {
        let w = self.width();
        (0..self.m)
            .map(|i| cost[self.basis[i]] * self.a[i * w + self.n])
            .sum()
    }

    /// Primal simplex with Bland's rule over columns `< allowed`. Returns the
    /// entering column when the problem is unbounded.
    fn run(&mut self, cost: &[f64], allowed: usize) -> core::result::Result<(), usize> {
        let w = self.width();
        let mut is_basic = vec![false; self.n];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if is_basic[j] {
                    continue;
                }
                let mut r = cost[j];
                for i in 0..self.m {
                    r -= cost[self.basis[i]] * self.a[i * w + j];
                }
                if r > EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aij = self.a[i * w + j];
                if aij > EPS {
                    let t = self.a[i * w + self.n] / aij;
                    leave = match leave {
                        None => Some((i, t)),
                        Some((k, tk)) => {
                            if t < tk - EPS || (t <= tk + EPS && self.basis[i] < self.basis[k]) {
                                Some((i, t))
                            } else {
                                Some((k, tk))
                            }
                        }
                    };
                }
            }
            let Some((i, _)) = leave else {
                return Err(j);
            };
            is_basic[self.basis[i]] = false;
            is_basic[j] = true;
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.a[row * w + col];
        for k in 0..w {
            self.a[row * w + k] /= p;
        }
        self.a[row * w + col] = 1.0;
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.a[i * w + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..w {
                self.a[i * w + k] -= f * self.a[row * w + k];
            }
            self.a[i * w + col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Replaces zero-valued basic artificials by structural or slack columns.
    /// Rows with no such column are redundant and keep their artificial.
    fn drive_out_artificials(&mut self) {
        let w = self.width();
        for i in 0..self.m {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            let col = (0..self.first_artificial)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.a[i * w + j].abs() > tol::GEOMETRY);
            if let Some(j) = col {
                self.pivot(i, j);
            }
        }
    }

    fn point(&self) -> Vector {
        let w = self.width();
        let mut x = vec![0.0; 2 * self.d];
        for i in 0..self.m {
            if self.basis[i] < 2 * self.d {
                x[self.basis[i]] = self.a[i * w + self.n];
            }
        }
        Vector::new((0..self.d).map(|j| x[j] - x[self.d + j]).collect())
    }

    fn ray(&self, entering: usize) -> Vector {
        let w = self.width();
        let mut x = vec![0.0; self.n];
        x[entering] = 1.0;
        for i in 0..self.m {
            x[self.basis[i]] = -self.a[i * w + entering];
        }
        Vector::new((0..self.d).map(|j| x[j] - x[self.d + j]).collect())
    }
}
