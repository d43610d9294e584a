//! The pseudo-Hermitian construction: from a generating function `g` and
//! constants `alpha`, `beta` (plus the kernel eigenvalue's imaginary part
//! `E_i` when fixed), produce the superpotential `f`, the complex potential
//! `V`, the kernel state `phi` with eigenvalue `beta + i E_i`, the algebraic
//! identity checks, and the `alpha` trichotomy classification.
//!
//! All formulas are driven by exact symbolic derivatives of `g`. At a simple
//! zero of `g` the defining ratios are 0/0; provided the regularity condition
//! `E_i = -g'(x0)` holds (and `alpha = g'(x0)^2` for the potential) the
//! singularity is removable, and evaluation switches to power series around
//! the zero inside a small window where direct division would lose precision.

use crate::expr::{EvalError, Expr};
use crate::grid::{
    cumulative_integral, ComplexField, Grid, GridError, NormGrowth, NormalizabilityVerdict,
    ProbeBuildError, ProbeConfig, ProbeError, RealField,
};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Half-width of the window around a simple zero inside which the removable
/// 0/0 ratios are evaluated by series instead of direct division. Direct
/// division keeps ~1e-10 accuracy down to |x - x0| ~ 1e-3 for order-one
/// slopes; the series takes over below that.
const ZERO_WINDOW: f64 = 1e-3;
/// Bisection refinement target for zero locations.
const ZERO_REFINE_TOL: f64 = 1e-12;
/// Minimum |g'(x0)| for a zero to count as simple.
const MIN_SIMPLE_SLOPE: f64 = 1e-8;
/// Tolerance on the regularity conditions `E_i = -g'(x0)` and
/// `alpha = g'(x0)^2`.
const REGULARITY_TOL: f64 = 1e-8;
/// Tolerance on the consistency condition `E_i^2 = alpha`.
const E_IMAG_ALPHA_TOL: f64 = 1e-10;
/// Number of series coefficients kept around each zero.
const SERIES_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("generating function is identically zero on the grid")]
    DegenerateG,
    #[error("zero of g at x = {x0} is not simple (|g'(x0)| = {slope_abs:.3e})")]
    NonSimpleZero { x0: f64, slope_abs: f64 },
    #[error(
        "superpotential is singular at the zero x0 = {x0}: regularity needs e_imag = {required}, got {e_imag}"
    )]
    SingularSuperpotential { x0: f64, required: f64, e_imag: f64 },
    #[error("potential has a non-removable singularity at x = {x}")]
    PotentialSingular { x: f64 },
    #[error("e_imag^2 = {e_sq} is not consistent with alpha = {alpha}")]
    EImagAlphaMismatch { e_sq: f64, alpha: f64 },
    #[error("operation needs e_imag, but none was given and none is derivable")]
    MissingEImag,
    #[error("overflow while sampling {what} at x = {x}")]
    Overflow { what: &'static str, x: f64 },
    #[error("normalizability probe failed: {0}")]
    ProbeFailed(String),
}

/// A generating function together with the construction constants.
///
/// `alpha` is the integration constant of the superpotential relation,
/// `beta` the additive offset of `Re V` (equal to the real part of the
/// kernel eigenvalue), and `e_imag` the imaginary part `E_i` of that
/// eigenvalue when fixed. A kernel state exists only when `e_imag^2 = alpha`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    g: Expr,
    alpha: f64,
    beta: f64,
    e_imag: Option<f64>,
}

impl ModelSpec {
    /// Spec with free kernel eigenvalue; `E_i` is derived from `alpha` and
    /// the zeros of `g` when an operation needs it.
    pub fn new(g: Expr, alpha: f64, beta: f64) -> ModelSpec {
        assert!(alpha.is_finite() && beta.is_finite());
        ModelSpec {
            g,
            alpha,
            beta,
            e_imag: None,
        }
    }

    /// Spec with `E_i` fixed; `alpha` is set to `E_i^2` so the consistency
    /// condition holds exactly.
    pub fn with_e_imag(g: Expr, beta: f64, e_imag: f64) -> ModelSpec {
        assert!(beta.is_finite() && e_imag.is_finite());
        ModelSpec {
            g,
            alpha: e_imag * e_imag,
            beta,
            e_imag: Some(e_imag),
        }
    }

    /// Spec with both `alpha` and `E_i` given; rejects inconsistent pairs.
    pub fn checked(
        g: Expr,
        alpha: f64,
        beta: f64,
        e_imag: Option<f64>,
    ) -> Result<ModelSpec, ModelError> {
        assert!(alpha.is_finite() && beta.is_finite());
        if let Some(e) = e_imag {
            let e_sq = e * e;
            if (e_sq - alpha).abs() > E_IMAG_ALPHA_TOL * alpha.abs().max(1.0) {
                return Err(ModelError::EImagAlphaMismatch { e_sq, alpha });
            }
        }
        Ok(ModelSpec {
            g,
            alpha,
            beta,
            e_imag,
        })
    }

    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn e_imag(&self) -> Option<f64> {
        self.e_imag
    }
}

/// A detected simple zero of the generating function.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimpleZero {
    pub location: f64,
    pub slope: f64,
}

// Truncated power series in delta = x - x0.
#[derive(Debug, Clone, Copy)]
struct Poly {
    c: [f64; SERIES_LEN],
}

impl Poly {
    fn zero() -> Poly {
        Poly {
            c: [0.0; SERIES_LEN],
        }
    }

    fn eval(&self, d: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ck| acc * d + ck)
    }

    fn eval_d1(&self, d: f64) -> f64 {
        let mut acc = 0.0;
        for k in (1..SERIES_LEN).rev() {
            acc = acc * d + k as f64 * self.c[k];
        }
        acc
    }

    fn eval_d2(&self, d: f64) -> f64 {
        let mut acc = 0.0;
        for k in (2..SERIES_LEN).rev() {
            acc = acc * d + (k * (k - 1)) as f64 * self.c[k];
        }
        acc
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for i in 0..SERIES_LEN {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..SERIES_LEN - i {
                out.c[i + j] += self.c[i] * o.c[j];
            }
        }
        out
    }

    fn sub(&self, o: &Poly) -> Poly {
        let mut out = *self;
        for k in 0..SERIES_LEN {
            out.c[k] -= o.c[k];
        }
        out
    }

    fn scale(&self, k: f64) -> Poly {
        let mut out = *self;
        for c in &mut out.c {
            *c *= k;
        }
        out
    }

    /// Drop the first `k` coefficients (divide by delta^k); the dropped
    /// leading coefficients must already vanish.
    fn shift_down(&self, k: usize) -> Poly {
        let mut out = Poly::zero();
        for j in k..SERIES_LEN {
            out.c[j - k] = self.c[j];
        }
        out
    }

    /// Power-series division; `den.c[0]` must be nonzero.
    fn div(num: &Poly, den: &Poly) -> Poly {
        let mut out = Poly::zero();
        for m in 0..SERIES_LEN {
            let mut acc = num.c[m];
            for j in 0..m {
                acc -= out.c[j] * den.c[m - j];
            }
            out.c[m] = acc / den.c[0];
        }
        out
    }
}

// A simple zero with the series data needed for windowed evaluation.
#[derive(Debug, Clone)]
struct ZeroSite {
    x0: f64,
    slope: f64,
    // f = -(E_i + g')/(2g); present when the regularity condition holds.
    f_series: Option<Poly>,
    // (2gg'' - g'^2 + alpha)/(4g^2); present when alpha matches g'(x0)^2.
    ratio_series: Option<Poly>,
}

/// The assembled construction on a grid: symbolic derivatives of `g`,
/// detected simple zeros with their series windows, and the resolved `E_i`.
#[derive(Debug, Clone)]
pub struct Construction {
    spec: ModelSpec,
    grid: Grid,
    // g, g', g'', g''' and, when zeros exist, up to g^(7)
    derivs: Vec<Expr>,
    g_samples: Vec<f64>,
    zeros: Vec<ZeroSite>,
    e_imag: Option<f64>,
    f_expr: Option<Expr>,
    f1_expr: Option<Expr>,
    f2_expr: Option<Expr>,
}

fn e_imag_candidates(alpha: f64) -> Vec<f64> {
    if alpha < 0.0 {
        return Vec::new();
    }
    let s = alpha.sqrt();
    if s == 0.0 {
        vec![0.0]
    } else {
        vec![-s, s]
    }
}

fn regular_at_all(e: f64, zeros: &[(f64, f64)]) -> bool {
    zeros
        .iter()
        .all(|&(_, slope)| (e + slope).abs() <= REGULARITY_TOL * slope.abs().max(1.0))
}

impl Construction {
    pub fn new(spec: ModelSpec, grid: Grid) -> Result<Construction, ModelError> {
        let mut derivs = vec![spec.g.clone()];
        for _ in 0..3 {
            derivs.push(derivs.last().unwrap().differentiate());
        }

        let points = grid.points();
        let mut g_samples = Vec::with_capacity(points.len());
        for &x in &points {
            g_samples.push(spec.g.evaluate(x)?);
        }
        if g_samples.iter().all(|v| v.abs() <= 1e-14) {
            return Err(ModelError::DegenerateG);
        }

        let locations = detect_zeros(&spec.g, &derivs[1], &points, &g_samples)?;
        if !locations.is_empty() {
            while derivs.len() < SERIES_LEN {
                derivs.push(derivs.last().unwrap().differentiate());
            }
        }

        let e_imag = match spec.e_imag {
            Some(e) => Some(e),
            None => e_imag_candidates(spec.alpha)
                .into_iter()
                .find(|&e| regular_at_all(e, &locations)),
        };

        let mut zeros = Vec::with_capacity(locations.len());
        for &(x0, slope) in &locations {
            zeros.push(build_zero_site(x0, slope, &derivs, e_imag, spec.alpha)?);
        }

        let (f_expr, f1_expr, f2_expr) = match e_imag {
            Some(e) => {
                let f = Expr::neg(Expr::div(
                    Expr::add(Expr::constant(e), derivs[1].clone()),
                    Expr::mul(Expr::constant(2.0), derivs[0].clone()),
                ));
                let f1 = f.differentiate();
                let f2 = f1.differentiate();
                (Some(f), Some(f1), Some(f2))
            }
            None => (None, None, None),
        };

        Ok(Construction {
            spec,
            grid,
            derivs,
            g_samples,
            zeros,
            e_imag,
            f_expr,
            f1_expr,
            f2_expr,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The resolved imaginary part of the kernel eigenvalue: the explicit
    /// value when the spec fixes one, otherwise the sign of `±sqrt(alpha)`
    /// that keeps `f` regular at every detected zero.
    pub fn e_imag(&self) -> Option<f64> {
        self.e_imag
    }

    pub fn zeros(&self) -> Vec<SimpleZero> {
        self.zeros
            .iter()
            .map(|z| SimpleZero {
                location: z.x0,
                slope: z.slope,
            })
            .collect()
    }

    fn zero_near(&self, x: f64) -> Option<&ZeroSite> {
        self.zeros.iter().find(|z| (x - z.x0).abs() < ZERO_WINDOW)
    }

    fn require_e_imag(&self) -> Result<f64, ModelError> {
        self.e_imag.ok_or(ModelError::MissingEImag)
    }

    /// Superpotential `f(x) = -(E_i + g'(x)) / (2 g(x))`, with the removable
    /// singularity at a regular simple zero evaluated by series.
    pub fn superpotential_f(&self, x: f64) -> Result<f64, ModelError> {
        let e = self.require_e_imag()?;
        if let Some(site) = self.zero_near(x) {
            return match &site.f_series {
                Some(p) => Ok(p.eval(x - site.x0)),
                None => Err(ModelError::SingularSuperpotential {
                    x0: site.x0,
                    required: -site.slope,
                    e_imag: e,
                }),
            };
        }
        let f = self.f_expr.as_ref().expect("f_expr present when e_imag is");
        Ok(f.evaluate(x)?)
    }

    /// `(f, f', f'')` at a point, by the same hybrid evaluation as
    /// [`Construction::superpotential_f`].
    pub fn superpotential_derivatives(&self, x: f64) -> Result<(f64, f64, f64), ModelError> {
        let e = self.require_e_imag()?;
        if let Some(site) = self.zero_near(x) {
            return match &site.f_series {
                Some(p) => {
                    let d = x - site.x0;
                    Ok((p.eval(d), p.eval_d1(d), p.eval_d2(d)))
                }
                None => Err(ModelError::SingularSuperpotential {
                    x0: site.x0,
                    required: -site.slope,
                    e_imag: e,
                }),
            };
        }
        let f = self.f_expr.as_ref().expect("f_expr present when e_imag is");
        let f1 = self.f1_expr.as_ref().expect("f1_expr present");
        let f2 = self.f2_expr.as_ref().expect("f2_expr present");
        Ok((f.evaluate(x)?, f1.evaluate(x)?, f2.evaluate(x)?))
    }

    fn ratio_direct(&self, x: f64, alpha: f64) -> Result<f64, ModelError> {
        let g = self.derivs[0].evaluate(x)?;
        let g1 = self.derivs[1].evaluate(x)?;
        let g2 = self.derivs[2].evaluate(x)?;
        let den = 4.0 * g * g;
        if den == 0.0 {
            return Err(ModelError::PotentialSingular { x });
        }
        let r = (2.0 * g * g2 - g1 * g1 + alpha) / den;
        if !r.is_finite() {
            return Err(ModelError::Overflow {
                what: "potential ratio",
                x,
            });
        }
        Ok(r)
    }

    fn ratio_at(&self, x: f64, alpha: f64) -> Result<f64, ModelError> {
        if let Some(site) = self.zero_near(x) {
            return match &site.ratio_series {
                Some(p) => Ok(p.eval(x - site.x0)),
                None => Err(ModelError::PotentialSingular { x }),
            };
        }
        self.ratio_direct(x, alpha)
    }

    /// Right-hand side of the superpotential relation,
    /// `(2 g g'' - g'^2 + alpha) / (4 g^2)`, which equals `f^2 - f'`.
    pub fn fsq_minus_fprime(&self, x: f64) -> Result<f64, ModelError> {
        self.ratio_at(x, self.spec.alpha)
    }

    /// The complex potential `V(x)`, assembled from `g`, `g'`, `g''`,
    /// `alpha` and `beta` only.
    pub fn potential(&self, x: f64) -> Result<Complex64, ModelError> {
        let ratio = self.ratio_at(x, self.spec.alpha)?;
        let g = self.derivs[0].evaluate(x)?;
        let g1 = self.derivs[1].evaluate(x)?;
        let re = ratio - g * g + self.spec.beta;
        let im = -2.0 * g1;
        if !re.is_finite() || !im.is_finite() {
            return Err(ModelError::Overflow {
                what: "potential",
                x,
            });
        }
        Ok(Complex64::new(re, im))
    }

    /// `V` sampled on the whole grid.
    pub fn potential_field(&self) -> Result<ComplexField, ModelError> {
        let mut values = Vec::with_capacity(self.grid.n());
        for &x in &self.grid.points() {
            values.push(self.potential(x)?);
        }
        Ok(ComplexField::new(self.grid, values)?)
    }

    pub fn g_field(&self) -> Result<RealField, ModelError> {
        Ok(RealField::new(self.grid, self.g_samples.clone())?)
    }

    pub fn g_prime_field(&self) -> Result<RealField, ModelError> {
        let mut values = Vec::with_capacity(self.grid.n());
        for &x in &self.grid.points() {
            values.push(self.derivs[1].evaluate(x)?);
        }
        Ok(RealField::new(self.grid, values)?)
    }

    pub fn superpotential_field(&self) -> Result<RealField, ModelError> {
        let mut values = Vec::with_capacity(self.grid.n());
        for &x in &self.grid.points() {
            values.push(self.superpotential_f(x)?);
        }
        Ok(RealField::new(self.grid, values)?)
    }

    pub fn superpotential_prime_field(&self) -> Result<RealField, ModelError> {
        let mut values = Vec::with_capacity(self.grid.n());
        for &x in &self.grid.points() {
            values.push(self.superpotential_derivatives(x)?.1);
        }
        Ok(RealField::new(self.grid, values)?)
    }

    /// Kernel state `phi = exp(-∫ (f + i g) dx)` anchored at the domain
    /// midpoint, and its eigenvalue `beta + i E_i`.
    pub fn candidate_eigenfunction(&self) -> Result<(ComplexField, Complex64), ModelError> {
        self.candidate_eigenfunction_from(self.grid.mid_index())
    }

    /// Same state with the integration constant fixed at another grid node;
    /// the result differs by a global complex factor only.
    pub fn candidate_eigenfunction_from(
        &self,
        base_index: usize,
    ) -> Result<(ComplexField, Complex64), ModelError> {
        let e = self.require_e_imag()?;
        let e_sq = e * e;
        if (e_sq - self.spec.alpha).abs() > E_IMAG_ALPHA_TOL * self.spec.alpha.abs().max(1.0) {
            return Err(ModelError::EImagAlphaMismatch {
                e_sq,
                alpha: self.spec.alpha,
            });
        }
        let mut f_samples = Vec::with_capacity(self.grid.n());
        for &x in &self.grid.points() {
            f_samples.push(self.superpotential_f(x)?);
        }
        let f_int = cumulative_integral(&f_samples, &self.grid, base_index);
        let g_int = cumulative_integral(&self.g_samples, &self.grid, base_index);
        let mut values = Vec::with_capacity(self.grid.n());
        for (j, &x) in self.grid.points().iter().enumerate() {
            let v = Complex64::from_polar((-f_int[j]).exp(), -g_int[j]);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(ModelError::Overflow {
                    what: "kernel state",
                    x,
                });
            }
            values.push(v);
        }
        let phi = ComplexField::new(self.grid, values)?;
        Ok((phi, Complex64::new(self.spec.beta, e)))
    }

    /// Maximum absolute residuals of the algebraic identities over interior
    /// grid points, plus the parity diagnostics.
    pub fn check_identities(&self) -> Result<IdentityReport, ModelError> {
        let e = self.require_e_imag()?;
        let alpha_id = e * e;
        let margin = self.grid.interior_margin();
        let points = self.grid.points();

        let mut first_order_max = 0.0f64;
        let mut third_order_max = 0.0f64;
        let mut evenness_max = 0.0f64;
        let mut conjugation_max = 0.0f64;

        for (j, &x) in points
            .iter()
            .enumerate()
            .take(self.grid.n() - margin)
            .skip(margin)
        {
            let (f, f1, f2) = self.superpotential_derivatives(x)?;

            // f^2 - f' from the eigenvalue form versus the integrated form
            // with alpha = E_i^2; identical for every admissible g.
            let u = f * f - f1;
            let rhs = self.ratio_at(x, alpha_id)?;
            first_order_max = first_order_max.max((u - rhs).abs());

            // Unintegrated third-order relation 4g'u + 2gu' = g'''
            // with u = f^2 - f'.
            let g = self.g_samples[j];
            let g1 = self.derivs[1].evaluate(x)?;
            let g3 = self.derivs[3].evaluate(x)?;
            let u_prime = 2.0 * f * f1 - f2;
            third_order_max = third_order_max.max((4.0 * g1 * u + 2.0 * g * u_prime - g3).abs());

            // Parity: g even <=> the Hamiltonian is PT symmetric, in which
            // case V(-x)* = V(x).
            let g_mirror = self.derivs[0].evaluate(-x)?;
            evenness_max = evenness_max.max((g - g_mirror).abs());
            let v = self.potential(x)?;
            let v_mirror = self.potential(-x)?;
            conjugation_max = conjugation_max.max((v_mirror.conj() - v).norm());
        }

        Ok(IdentityReport {
            first_order_max,
            third_order_max,
            evenness_max,
            pt_symmetric: evenness_max <= 1e-10,
            conjugation_max,
        })
    }
}

/// Residuals of the construction identities on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// max |f^2 - f' - (2gg'' - g'^2 + E_i^2)/(4g^2)| with f from the
    /// eigenvalue form.
    pub first_order_max: f64,
    /// max |4g'(f^2-f') + 2g(f^2-f')' - g'''|.
    pub third_order_max: f64,
    /// max |g(x) - g(-x)|.
    pub evenness_max: f64,
    /// Whether `g` is even to 1e-10, the PT-symmetry criterion.
    pub pt_symmetric: bool,
    /// max |V(-x)* - V(x)|.
    pub conjugation_max: f64,
}

fn detect_zeros(
    g: &Expr,
    g_prime: &Expr,
    points: &[f64],
    samples: &[f64],
) -> Result<Vec<(f64, f64)>, ModelError> {
    let mut zeros: Vec<(f64, f64)> = Vec::new();
    let push = |x0: f64, zeros: &mut Vec<(f64, f64)>| -> Result<(), ModelError> {
        let slope = g_prime.evaluate(x0)?;
        if slope.abs() <= MIN_SIMPLE_SLOPE {
            return Err(ModelError::NonSimpleZero {
                x0,
                slope_abs: slope.abs(),
            });
        }
        zeros.push((x0, slope));
        Ok(())
    };

    for (j, &v) in samples.iter().enumerate() {
        if v == 0.0 {
            push(points[j], &mut zeros)?;
        }
    }
    for j in 0..samples.len() - 1 {
        if samples[j] * samples[j + 1] < 0.0 {
            let x0 = bisect_zero(g, points[j], points[j + 1], samples[j])?;
            push(x0, &mut zeros)?;
        }
    }
    zeros.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(zeros)
}

fn bisect_zero(g: &Expr, mut a: f64, mut b: f64, mut ga: f64) -> Result<f64, ModelError> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= ZERO_REFINE_TOL {
            return Ok(m);
        }
        let gm = g.evaluate(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn build_zero_site(
    x0: f64,
    slope: f64,
    derivs: &[Expr],
    e_imag: Option<f64>,
    alpha: f64,
) -> Result<ZeroSite, ModelError> {
    debug_assert_eq!(derivs.len(), SERIES_LEN);
    let mut tay = [0.0f64; SERIES_LEN];
    let mut factorial = 1.0;
    for (k, deriv) in derivs.iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        tay[k] = deriv.evaluate(x0)? / factorial;
    }
    // x0 is a refined zero: clear the residual constant term.
    tay[0] = 0.0;

    let g = Poly { c: tay };
    let mut g1 = Poly::zero();
    let mut g2 = Poly::zero();
    for k in 0..SERIES_LEN - 1 {
        g1.c[k] = (k + 1) as f64 * tay[k + 1];
    }
    for k in 0..SERIES_LEN - 2 {
        g2.c[k] = ((k + 1) * (k + 2)) as f64 * tay[k + 2];
    }

    let ratio_series = {
        let mismatch = (alpha - slope * slope).abs();
        if mismatch <= REGULARITY_TOL * (slope * slope).max(alpha.abs()).max(1.0) {
            let mut p = g.mul(&g2).scale(2.0).sub(&g1.mul(&g1));
            p.c[0] += alpha;
            // Both leading coefficients vanish identically when the
            // regularity condition holds; clear the roundoff residue.
            p.c[0] = 0.0;
            p.c[1] = 0.0;
            let q = g.mul(&g).scale(4.0);
            Some(Poly::div(&p.shift_down(2), &q.shift_down(2)))
        } else {
            None
        }
    };

    let f_series = e_imag.and_then(|e| {
        if (e + slope).abs() <= REGULARITY_TOL * slope.abs().max(1.0) {
            let mut num = g1.scale(-1.0);
            num.c[0] = 0.0; // -(E_i + g'(x0)) vanishes by regularity
            let den = g.scale(2.0);
            Some(Poly::div(&num.shift_down(1), &den.shift_down(1)))
        } else {
            None
        }
    });

    Ok(ZeroSite {
        x0,
        slope,
        f_series,
        ratio_series,
    })
}

/// Outcome of the `alpha` trichotomy for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "variant", content = "detail")]
pub enum Classification {
    /// `alpha < 0`: no kernel state can be an eigenfunction, so the reality
    /// argument has no loophole.
    RealSpectrumGuaranteed,
    /// `alpha = 0` with a regular kernel state: one explicitly known
    /// eigenfunction with the real eigenvalue `beta`.
    KnownRealEigenfunction { energy: f64 },
    /// `alpha >= 0` but the kernel candidate is excluded — either no regular
    /// superpotential exists or the state is not square-integrable.
    RealSpectrumByExclusion { reason: String },
    /// `alpha > 0` with a normalizable kernel state: the spectrum contains
    /// the complex eigenvalue `beta + i E_i`.
    ComplexEigenvaluePresent { energy: Complex64 },
    /// The normalizability probe could not decide.
    Indeterminate { reason: String },
}

impl Classification {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Classification::RealSpectrumGuaranteed => "RealSpectrumGuaranteed",
            Classification::KnownRealEigenfunction { .. } => "KnownRealEigenfunction",
            Classification::RealSpectrumByExclusion { .. } => "RealSpectrumByExclusion",
            Classification::ComplexEigenvaluePresent { .. } => "ComplexEigenvaluePresent",
            Classification::Indeterminate { .. } => "Indeterminate",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::RealSpectrumGuaranteed => write!(f, "RealSpectrumGuaranteed"),
            Classification::KnownRealEigenfunction { energy } => {
                write!(f, "KnownRealEigenfunction {{ E = {energy} }}")
            }
            Classification::RealSpectrumByExclusion { reason } => {
                write!(f, "RealSpectrumByExclusion ({reason})")
            }
            Classification::ComplexEigenvaluePresent { energy } => {
                write!(
                    f,
                    "ComplexEigenvaluePresent {{ E = {} {} {}i }}",
                    energy.re,
                    if energy.im < 0.0 { "-" } else { "+" },
                    energy.im.abs()
                )
            }
            Classification::Indeterminate { reason } => write!(f, "Indeterminate ({reason})"),
        }
    }
}

/// L²-growth evidence for one probed value of `E_i`.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeEvidence {
    pub e_imag: f64,
    pub verdict: NormalizabilityVerdict,
    pub table: Vec<(f64, f64)>,
    pub note: String,
}

/// Classification together with the probe evidence behind it.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub classification: Classification,
    pub alpha: f64,
    pub beta: f64,
    pub probes: Vec<ProbeEvidence>,
}

fn probe_grid(width: f64, h: f64) -> Result<Grid, ModelError> {
    let mut n = (2.0 * width / h).round() as usize + 1;
    if n.is_multiple_of(2) {
        n += 1;
    }
    Ok(Grid::new(-width, width, n.max(5))?)
}

/// Decide the spectral claim the construction supports for `spec`.
///
/// The classification is a reported claim in the sense of the underlying
/// argument: it excludes (or exhibits) the kernel candidate; completeness of
/// the remaining spectrum is assumed, not checked.
pub fn classify(spec: &ModelSpec, cfg: &ProbeConfig) -> Result<ClassificationReport, ModelError> {
    let report = |classification, probes| ClassificationReport {
        classification,
        alpha: spec.alpha,
        beta: spec.beta,
        probes,
    };

    if spec.alpha < 0.0 {
        return Ok(report(Classification::RealSpectrumGuaranteed, Vec::new()));
    }

    let widest = *cfg
        .widths
        .last()
        .ok_or_else(|| ModelError::ProbeFailed("no probe widths".to_string()))?;
    let base = Construction::new(spec.clone(), probe_grid(widest, cfg.h)?)?;
    let zero_data: Vec<(f64, f64)> = base.zeros.iter().map(|z| (z.x0, z.slope)).collect();

    let candidates = match spec.e_imag {
        Some(e) => vec![e],
        None => e_imag_candidates(spec.alpha),
    };
    let regular: Vec<f64> = candidates
        .into_iter()
        .filter(|&e| regular_at_all(e, &zero_data))
        .collect();

    if regular.is_empty() {
        return Ok(report(
            Classification::RealSpectrumByExclusion {
                reason: "no regular kernel eigenfunction".to_string(),
            },
            Vec::new(),
        ));
    }

    if spec.alpha == 0.0 {
        return Ok(report(
            Classification::KnownRealEigenfunction { energy: spec.beta },
            Vec::new(),
        ));
    }

    let mut probes = Vec::new();
    let mut normalizable_e = None;
    let mut all_divergent = true;
    for e in regular {
        let growth = probe_candidate(spec, e, cfg)?;
        match growth.verdict {
            NormalizabilityVerdict::Normalizable => {
                normalizable_e.get_or_insert(e);
                all_divergent = false;
            }
            NormalizabilityVerdict::NotNormalizable => {}
            NormalizabilityVerdict::Indeterminate => all_divergent = false,
        }
        probes.push(ProbeEvidence {
            e_imag: e,
            verdict: growth.verdict,
            table: growth.table,
            note: growth.note,
        });
    }

    let classification = if let Some(e) = normalizable_e {
        Classification::ComplexEigenvaluePresent {
            energy: Complex64::new(spec.beta, e),
        }
    } else if all_divergent {
        Classification::RealSpectrumByExclusion {
            reason: "kernel eigenfunction is not square-integrable".to_string(),
        }
    } else {
        Classification::Indeterminate {
            reason: "normalizability probe inconclusive".to_string(),
        }
    };
    Ok(report(classification, probes))
}

fn probe_candidate(spec: &ModelSpec, e: f64, cfg: &ProbeConfig) -> Result<NormGrowth, ModelError> {
    let builder = |width: f64| -> Result<ComplexField, ProbeBuildError> {
        let build = || -> Result<ComplexField, ModelError> {
            let probe_spec = ModelSpec::with_e_imag(spec.g.clone(), spec.beta, e);
            let construction = Construction::new(probe_spec, probe_grid(width, cfg.h)?)?;
            let (phi, _) = construction.candidate_eigenfunction()?;
            Ok(phi)
        };
        build().map_err(|err| match err {
            ModelError::Overflow { .. } | ModelError::Eval(EvalError::Overflow { .. }) => {
                ProbeBuildError::Overflow
            }
            other => ProbeBuildError::Failed(other.to_string()),
        })
    };
    crate::grid::l2_norm_growth(builder, cfg).map_err(|err| match err {
        ProbeError::Build(msg) => ModelError::ProbeFailed(msg),
        ProbeError::BadWidths => ModelError::ProbeFailed(err.to_string()),
    })
}
