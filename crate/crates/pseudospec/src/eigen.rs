//! Dense complex non-Hermitian eigensolver and the real/complex spectrum
//! partition.
//!
//! The solver is the classical chain: Parlett–Reinsch balancing, unitary
//! reduction to upper Hessenberg form (skipped when the input already is,
//! which covers the tridiagonal discretized Hamiltonians), then implicit
//! single-shift QR iteration with Wilkinson shifts and deflation. Only
//! eigenvalues are iterated; eigenvectors come on demand from inverse
//! iteration with the converged eigenvalue as shift.

use crate::linop::ComplexMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EigenError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("QR iteration did not converge on the block {lo}..={hi}")]
    NoConvergence { lo: usize, hi: usize },
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;
const EXCEPTIONAL_SHIFT_EVERY: usize = 10;

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

// Work matrix: flat row-major storage the iteration mutates in place.
struct Work {
    n: usize,
    a: Vec<Complex64>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    fn overall_scale(&self) -> f64 {
        self.a
            .iter()
            .map(|&z| cabs1(z))
            .fold(0.0, f64::max)
            .max(1.0)
    }
}

/// Complex Givens rotation `[c s; -s̄ c]` with real `c` mapping `(x, y)` to
/// `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == Complex64::new(0.0, 0.0) {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if x == Complex64::new(0.0, 0.0) {
        return (0.0, y.conj() / y.norm());
    }
    let m = x.re.abs().max(x.im.abs()).max(y.re.abs()).max(y.im.abs());
    let xs = x / m;
    let ys = y / m;
    let mag = (xs.norm_sqr() + ys.norm_sqr()).sqrt();
    let c = xs.norm() / mag;
    let s = (xs / xs.norm()) * ys.conj() / mag;
    (c, s)
}

// Parlett–Reinsch balancing: diagonal similarity with powers of two, so the
// eigenvalues are preserved exactly.
fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = w.n;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += cabs1(w.at(j, i));
                    row += cabs1(w.at(i, j));
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut factor = 1.0;
            let mut goal = row / RADIX;
            while col < goal {
                factor *= RADIX;
                col *= sqrdx;
            }
            goal = row * RADIX;
            while col > goal {
                factor /= RADIX;
                col /= sqrdx;
            }
            if (col + row) / factor < 0.95 * total {
                done = false;
                let inv = 1.0 / factor;
                // row i scales by 1/f and column i by f; the diagonal entry
                // picks up both and stays put.
                for j in 0..n {
                    let v = w.at(i, j) * inv;
                    w.set(i, j, v);
                }
                for j in 0..n {
                    let v = w.at(j, i) * factor;
                    w.set(j, i, v);
                }
            }
        }
        if done {
            break;
        }
    }
}

fn is_hessenberg(w: &Work) -> bool {
    for i in 2..w.n {
        for j in 0..i - 1 {
            if w.at(i, j) != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

// Unitary reduction to upper Hessenberg form by Givens rotations.
fn hessenberg_reduce(w: &mut Work) {
    let n = w.n;
    for k in 0..n.saturating_sub(2) {
        for i in k + 2..n {
            let y = w.at(i, k);
            if y == Complex64::new(0.0, 0.0) {
                continue;
            }
            let x = w.at(k + 1, k);
            let (c, s) = givens(x, y);
            // rows (k+1, i) across columns k..n
            for j in k..n {
                let t1 = w.at(k + 1, j);
                let t2 = w.at(i, j);
                w.set(k + 1, j, c * t1 + s * t2);
                w.set(i, j, -s.conj() * t1 + c * t2);
            }
            w.set(i, k, Complex64::new(0.0, 0.0));
            // columns (k+1, i) across all rows
            for r in 0..n {
                let t1 = w.at(r, k + 1);
                let t2 = w.at(r, i);
                w.set(r, k + 1, c * t1 + s.conj() * t2);
                w.set(r, i, -s * t1 + c * t2);
            }
        }
    }
}

// Eigenvalues of a 2x2 complex matrix, product-form corrected for accuracy.
fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = if cabs1(half_tr + disc) >= cabs1(half_tr - disc) {
        half_tr + disc
    } else {
        half_tr - disc
    };
    if l1 == Complex64::new(0.0, 0.0) {
        (l1, half_tr * 2.0 - l1)
    } else {
        (l1, det / l1)
    }
}

// One implicit single-shift QR sweep on the active block [lo, hi].
fn qr_sweep(w: &mut Work, lo: usize, hi: usize, shift: Complex64) {
    let mut x = w.at(lo, lo) - shift;
    let mut y = w.at(lo + 1, lo);
    for k in lo..hi {
        let (c, s) = givens(x, y);
        // rows (k, k+1): annihilate the bulge column first, then the block
        if k > lo {
            let t1 = w.at(k, k - 1);
            let t2 = w.at(k + 1, k - 1);
            w.set(k, k - 1, c * t1 + s * t2);
            w.set(k + 1, k - 1, Complex64::new(0.0, 0.0));
        }
        for j in k..=hi {
            let t1 = w.at(k, j);
            let t2 = w.at(k + 1, j);
            w.set(k, j, c * t1 + s * t2);
            w.set(k + 1, j, -s.conj() * t1 + c * t2);
        }
        // columns (k, k+1), rows down to the bulge row
        let row_end = (k + 2).min(hi);
        for i in lo..=row_end {
            let t1 = w.at(i, k);
            let t2 = w.at(i, k + 1);
            w.set(i, k, c * t1 + s.conj() * t2);
            w.set(i, k + 1, -s * t1 + c * t2);
        }
        if k + 1 < hi {
            x = w.at(k + 1, k);
            y = w.at(k + 2, k);
        }
    }
}

fn qr_eigenvalues(w: &mut Work) -> Result<Vec<Complex64>, EigenError> {
    let n = w.n;
    let mut eigs = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eigs);
    }
    let overall = w.overall_scale();
    let eps = f64::EPSILON;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut total_sweeps = 0usize;
    let mut stalled = 0usize;
    let mut hi = n - 1;

    loop {
        // find the active block [lo, hi]: scan for a negligible subdiagonal
        let mut lo = hi;
        while lo > 0 {
            let sub = cabs1(w.at(lo, lo - 1));
            let mut tst = cabs1(w.at(lo - 1, lo - 1)) + cabs1(w.at(lo, lo));
            if tst == 0.0 {
                tst = overall;
            }
            if sub <= eps * tst {
                w.set(lo, lo - 1, Complex64::new(0.0, 0.0));
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            eigs[hi] = w.at(hi, hi);
            stalled = 0;
            if hi == 0 {
                return Ok(eigs);
            }
            hi -= 1;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig2x2(w.at(lo, lo), w.at(lo, hi), w.at(hi, lo), w.at(hi, hi));
            eigs[lo] = l1;
            eigs[hi] = l2;
            stalled = 0;
            if lo == 0 {
                return Ok(eigs);
            }
            hi = lo - 1;
            continue;
        }

        if total_sweeps >= budget {
            return Err(EigenError::NoConvergence { lo, hi });
        }
        total_sweeps += 1;
        stalled += 1;

        let shift = if stalled.is_multiple_of(EXCEPTIONAL_SHIFT_EVERY) {
            w.at(hi, hi) + Complex64::new(0.75 * cabs1(w.at(hi, hi - 1)), 0.0)
        } else {
            let (l1, l2) = eig2x2(
                w.at(hi - 1, hi - 1),
                w.at(hi - 1, hi),
                w.at(hi, hi - 1),
                w.at(hi, hi),
            );
            // Wilkinson: the 2x2 eigenvalue closer to the corner entry
            let corner = w.at(hi, hi);
            if cabs1(l1 - corner) <= cabs1(l2 - corner) {
                l1
            } else {
                l2
            }
        };
        qr_sweep(w, lo, hi, shift);
    }
}

/// All eigenvalues of a dense complex matrix, sorted by real then imaginary
/// part. Intended for dimensions up to a few thousand.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>, EigenError> {
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    let n = a.dim();
    let mut w = Work {
        n,
        a: a.data().to_vec(),
    };
    if n <= 1 {
        return Ok(if n == 0 { vec![] } else { vec![w.at(0, 0)] });
    }
    balance(&mut w);
    if !is_hessenberg(&w) {
        hessenberg_reduce(&mut w);
    }
    let mut eigs = qr_eigenvalues(&mut w)?;
    eigs.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(eigs)
}

// LU factorization with partial pivoting.
struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
    sign_flips: usize,
    singular: bool,
}

fn lu_factor(a: &ComplexMatrix, regularize: bool) -> LuFactors {
    let n = a.dim();
    let mut lu = a.data().to_vec();
    let mut piv = vec![0usize; n];
    let mut sign_flips = 0usize;
    let mut singular = false;
    let scale = a.max_abs().max(1.0);
    for k in 0..n {
        let mut p = k;
        let mut best = cabs1(lu[k * n + k]);
        for i in k + 1..n {
            let v = cabs1(lu[i * n + k]);
            if v > best {
                best = v;
                p = i;
            }
        }
        piv[k] = p;
        if p != k {
            sign_flips += 1;
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
        }
        if lu[k * n + k] == Complex64::new(0.0, 0.0) {
            singular = true;
            if regularize {
                lu[k * n + k] = Complex64::new(scale * f64::EPSILON, 0.0);
            } else {
                continue;
            }
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            lu[i * n + k] = factor;
            if factor != Complex64::new(0.0, 0.0) {
                for j in k + 1..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
    }
    LuFactors {
        n,
        lu,
        piv,
        sign_flips,
        singular,
    }
}

impl LuFactors {
    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != Complex64::new(0.0, 0.0) {
                for (i, xi) in x.iter_mut().enumerate().skip(k + 1) {
                    *xi -= self.lu[i * n + k] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            x[k] /= self.lu[k * n + k];
            let xk = x[k];
            if xk != Complex64::new(0.0, 0.0) {
                for (i, xi) in x.iter_mut().enumerate().take(k) {
                    *xi -= self.lu[i * n + k] * xk;
                }
            }
        }
        x
    }

    fn determinant(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        let mut det = Complex64::new(
            if self.sign_flips.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            },
            0.0,
        );
        for k in 0..self.n {
            det *= self.lu[k * self.n + k];
        }
        det
    }
}

/// Determinant via LU with partial pivoting — an algebraic route independent
/// of the QR eigenvalue path.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64, EigenError> {
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    Ok(lu_factor(a, false).determinant())
}

/// Solve `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, EigenError> {
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    Ok(lu_factor(a, true).solve(b))
}

/// Eigenvector for a converged eigenvalue by inverse iteration.
pub fn eigenvector(a: &ComplexMatrix, lambda: Complex64) -> Result<Vec<Complex64>, EigenError> {
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    let n = a.dim();
    let mut shifted = a.clone();
    for i in 0..n {
        let v = shifted.get(i, i) - lambda;
        shifted.set(i, i, v);
    }
    let lu = lu_factor(&shifted, true);
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0, (k as f64 * 0.37).sin()))
        .collect();
    normalize(&mut v);
    for _ in 0..4 {
        v = lu.solve(&v);
        normalize(&mut v);
    }
    Ok(v)
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// Grid provenance attached to a spectrum report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridMeta {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub h: f64,
}

/// Real/complex partition of a spectrum below an energy ceiling.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// All eigenvalues, sorted by real part (ties by imaginary part).
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues with `Re λ <= ceiling` and `|Im λ| <= threshold`.
    pub real_subset: Vec<Complex64>,
    /// Eigenvalues with `Re λ <= ceiling` and `|Im λ| > threshold`.
    pub complex_subset: Vec<Complex64>,
    /// Eigenvalues above the ceiling: reported but unclassified, since the
    /// truncation box dominates that region.
    pub above_ceiling: Vec<Complex64>,
    pub im_threshold: f64,
    pub energy_ceiling: f64,
    pub grid: Option<GridMeta>,
}

/// Partition eigenvalues into real and complex subsets below the ceiling.
pub fn spectrum_report(
    eigs: &[Complex64],
    im_threshold: f64,
    energy_ceiling: f64,
    grid: Option<GridMeta>,
) -> SpectrumReport {
    assert!(
        im_threshold > 0.0,
        "imaginary-part threshold must be positive"
    );
    let mut eigenvalues = eigs.to_vec();
    eigenvalues.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    let mut real_subset = Vec::new();
    let mut complex_subset = Vec::new();
    let mut above_ceiling = Vec::new();
    for &e in &eigenvalues {
        if e.re > energy_ceiling {
            above_ceiling.push(e);
        } else if e.im.abs() <= im_threshold {
            real_subset.push(e);
        } else {
            complex_subset.push(e);
        }
    }
    SpectrumReport {
        eigenvalues,
        real_subset,
        complex_subset,
        above_ceiling,
        im_threshold,
        energy_ceiling,
        grid,
    }
}
