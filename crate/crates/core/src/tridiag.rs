//! Symmetric tridiagonal matrices and generalized pencils.
//!
//! The spectral counting routines only ever need three operations on a
//! pencil `(B, A)` with `A` positive definite:
//!
//! * `count_above(s)`: the number of generalized eigenvalues `> s`, read
//!   off the inertia of `B - s A` (Sylvester's law applied to the
//!   `L D L^T` pivots);
//! * individual eigenvalues, isolated by bisection on that count;
//! * `trace` of `A^{-1} B`, via one tridiagonal solve per column.
//!
//! Everything is dense-free and `O(n)` per factorization.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` has length `n`, `off` length
/// `n - 1` (`off[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Domain("empty matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(off.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite matrix entry".into()));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product `y = T x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Solves `T x = rhs` by the Thomas algorithm (no pivoting; intended
    /// for positive definite `T`).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::Domain("rhs length mismatch".into()));
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Numeric("singular tridiagonal solve".into()));
        }
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::Numeric("singular tridiagonal solve".into()));
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}

/// Generalized symmetric pencil: eigenpairs of `numerator x = s denominator x`
/// with `denominator` positive definite.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub numerator: SymTridiag,
    pub denominator: SymTridiag,
}

impl Pencil {
    pub fn new(numerator: SymTridiag, denominator: SymTridiag) -> Result<Self> {
        if numerator.n() != denominator.n() {
            return Err(Error::Domain("pencil dimension mismatch".into()));
        }
        Ok(Pencil { numerator, denominator })
    }

    pub fn n(&self) -> usize {
        self.numerator.n()
    }

    /// Number of generalized eigenvalues strictly above `s`.
    ///
    /// Counts the positive pivots of `L D L^T` applied to
    /// `numerator - s * denominator`; an exact zero pivot is treated as
    /// negative, so an eigenvalue equal to `s` is not counted.
    pub fn count_above(&self, s: f64) -> usize {
        let n = self.n();
        let b = &self.numerator;
        let a = &self.denominator;
        let mut positive = 0usize;
        let mut prev_pivot = 0.0f64;
        for i in 0..n {
            let t = b.diag[i] - s * a.diag[i];
            let mut pivot = if i == 0 {
                t
            } else {
                let e = b.off[i - 1] - s * a.off[i - 1];
                t - e * e / prev_pivot
            };
            if pivot == 0.0 {
                // Nudge exact ties off the axis; keeps the Sturm sequence
                // well-defined without altering any other count.
                pivot = -f64::MIN_POSITIVE;
            }
            if pivot > 0.0 {
                positive += 1;
            }
            prev_pivot = pivot;
        }
        positive
    }

    /// The `k`-th largest generalized eigenvalue (`k >= 1`), isolated by
    /// bisection on `count_above`.
    pub fn eigenvalue_k(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.n() {
            return Err(Error::Domain(format!(
                "eigenvalue index {k} out of range 1..={}",
                self.n()
            )));
        }
        // Bracket: grow hi until nothing lies above it, lo until at least
        // k eigenvalues do.
        let mut hi = 1.0f64;
        for _ in 0..2100 {
            if self.count_above(hi) == 0 {
                break;
            }
            hi *= 2.0;
        }
        let mut lo = -1.0f64;
        for _ in 0..2100 {
            if self.count_above(lo) >= k {
                break;
            }
            lo *= 2.0;
        }
        if self.count_above(lo) < k {
            return Err(Error::Numeric("failed to bracket eigenvalue".into()));
        }
        // Invariant: count_above(lo) >= k > count_above(hi).
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_above(mid) >= k {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() <= 1e-14 * hi.abs().max(lo.abs()).max(1e-30) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// All generalized eigenvalues strictly above `cutoff`, descending.
    pub fn eigenvalues_above(&self, cutoff: f64, max_count: usize) -> Result<Vec<f64>> {
        let m = self.count_above(cutoff).min(max_count);
        let mut out = Vec::with_capacity(m);
        for k in 1..=m {
            out.push(self.eigenvalue_k(k)?);
        }
        Ok(out)
    }

    /// Trace of `denominator^{-1} * numerator`, one solve per column.
    pub fn trace(&self) -> Result<f64> {
        let n = self.n();
        let b = &self.numerator;
        let mut tr = 0.0;
        let mut col = vec![0.0f64; n];
        for i in 0..n {
            col[i] = b.diag[i];
            if i > 0 {
                col[i - 1] = b.off[i - 1];
            }
            if i + 1 < n {
                col[i + 1] = b.off[i];
            }
            let y = self.denominator.solve(&col)?;
            tr += y[i];
            col[i] = 0.0;
            if i > 0 {
                col[i - 1] = 0.0;
            }
            if i + 1 < n {
                col[i + 1] = 0.0;
            }
        }
        Ok(tr)
    }
}
