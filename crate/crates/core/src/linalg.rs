use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Deref, Index};

use crate::math;
use crate::{Error, Result};

/// A point, direction or perturbation in `R^d`.
#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector scaled by `value`.
    pub fn axis(dim: usize, i: usize, value: f64) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = value;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|a| alpha * a).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        norm.eval(&self.0)
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An `ℓp` norm, `p ∈ [1, ∞]`.
///
/// `p = 1`, `2` and `∞` are explicit variants so their duals never go
/// through `1/p` arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L1,
    L2,
    LInf,
    /// General `1 < p < ∞`, `p ≠ 2`.
    Lp(f64),
}

impl Norm {
    pub fn from_p(p: f64) -> Result<Norm> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "norm exponent p = {p} must lie in [1, ∞]"
            )));
        }
        Ok(if p == 1.0 {
            Norm::L1
        } else if p == 2.0 {
            Norm::L2
        } else if p == f64::INFINITY {
            Norm::LInf
        } else {
            Norm::Lp(p)
        })
    }

    pub fn p(self) -> f64 {
        match self {
            Norm::L1 => 1.0,
            Norm::L2 => 2.0,
            Norm::LInf => f64::INFINITY,
            Norm::Lp(p) => p,
        }
    }

    /// Hölder conjugate: `1/p + 1/q = 1`.
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::LInf,
            Norm::LInf => Norm::L1,
            Norm::L2 => Norm::L2,
            Norm::Lp(p) => Norm::Lp(p / (p - 1.0)),
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Norm::L1 => x.iter().map(|v| v.abs()).sum(),
            Norm::L2 => math::sqrt(x.iter().map(|v| v * v).sum()),
            Norm::LInf => x.iter().map(|v| v.abs()).fold(0.0, f64::max),
            Norm::Lp(p) => {
                // Rescale by the largest entry to avoid overflow in |x|^p.
                let m = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = x.iter().map(|v| math::powf(v.abs() / m, p)).sum();
                m * math::powf(s, 1.0 / p)
            }
        }
    }

    /// A unit-norm vector `s` maximizing `s·x` over the unit ball of `self`,
    /// so that `s·x` equals the dual norm of `x`.
    pub fn dual_maximizer(self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        match self {
            Norm::L1 => {
                let mut s = vec![0.0; d];
                if let Some((k, v)) = x
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                {
                    if *v != 0.0 {
                        s[k] = v.signum();
                    }
                }
                s
            }
            Norm::LInf => x
                .iter()
                .map(|v| if *v == 0.0 { 0.0 } else { v.signum() })
                .collect(),
            Norm::L2 => {
                let n = Norm::L2.eval(x);
                if n == 0.0 {
                    vec![0.0; d]
                } else {
                    x.iter().map(|v| v / n).collect()
                }
            }
            Norm::Lp(p) => {
                let q = p / (p - 1.0);
                let n = Norm::Lp(q).eval(x);
                if n == 0.0 {
                    return vec![0.0; d];
                }
                x.iter()
                    .map(|v| v.signum() * math::powf(v.abs() / n, q - 1.0))
                    .collect()
            }
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => f.write_str("l1"),
            Norm::L2 => f.write_str("l2"),
            Norm::LInf => f.write_str("linf"),
            Norm::Lp(p) => write!(f, "l{p}"),
        }
    }
}

/// A dense square matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Matrix {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    pub fn diagonal(diag: &[f64]) -> Matrix {
        let n = diag.len();
        let mut m = Self::identity(n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data.chunks(self.n).map(|row| dot(row, x)).collect()
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Lower-triangular Cholesky factor; fails unless the matrix is
    /// symmetric positive definite.
    pub fn cholesky(&self) -> Result<Matrix> {
        let scale = self.data.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !self.is_symmetric(1e-12 * scale.max(1.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::NotPositiveDefinite);
                    }
                    l[i * n + i] = math::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Matrix { n, data: l })
    }

    /// Inverse of a symmetric positive definite matrix.
    pub fn spd_inverse(&self) -> Result<Matrix> {
        let l = self.cholesky()?;
        let n = self.n;
        let mut inv = vec![0.0; n * n];
        for col in 0..n {
            let e: Vec<f64> = (0..n).map(|i| if i == col { 1.0 } else { 0.0 }).collect();
            let x = l.cholesky_solve(&e);
            for row in 0..n {
                inv[row * n + col] = x[row];
            }
        }
        // Symmetrize away rounding.
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (inv[i * n + j] + inv[j * n + i]);
                inv[i * n + j] = m;
                inv[j * n + i] = m;
            }
        }
        Ok(Matrix { n, data: inv })
    }

    /// Solves `L Lᵀ x = b` where `self` is the lower factor `L`.
    fn cholesky_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.data[i * n + k] * y[k];
            }
            y[i] = s / self.data[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.data[k * n + i] * x[k];
            }
            x[i] = s / self.data[i * n + i];
        }
        x
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n)).finish()
    }
}
