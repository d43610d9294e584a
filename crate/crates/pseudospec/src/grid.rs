//! Uniform grids, cumulative trapezoid quadrature and the growing-domain
//! L² probe used to decide normalizability of kernel states.
//!
//! Everything here is second-order accurate on smooth inputs, matching the
//! 3-point stencils used for the discretized operators, so convergence tests
//! across the crate share a single order.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid requires x_min < x_max")]
    DomainOrder,
    #[error("grid requires at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid requires an odd point count so the midpoint is a node, got {0}")]
    EvenPointCount(usize),
    #[error("interior margin must be at least 1")]
    BadMargin,
    #[error("field values must all be finite")]
    NonFiniteField,
    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// Uniform sample points on `[x_min, x_max]`.
///
/// The point count is odd so the domain midpoint is a grid node (it anchors
/// the quadrature in the kernel-state construction). `interior_margin` is the
/// number of points dropped at each edge by interior-only residual checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    h: f64,
    interior_margin: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Grid, GridError> {
        Grid::with_margin(x_min, x_max, n, 2)
    }

    pub fn with_margin(
        x_min: f64,
        x_max: f64,
        n: usize,
        interior_margin: usize,
    ) -> Result<Grid, GridError> {
        if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
            return Err(GridError::DomainOrder);
        }
        if n < 3 {
            return Err(GridError::TooFewPoints(n));
        }
        if n.is_multiple_of(2) {
            return Err(GridError::EvenPointCount(n));
        }
        if interior_margin < 1 {
            return Err(GridError::BadMargin);
        }
        Ok(Grid {
            x_min,
            x_max,
            n,
            h: (x_max - x_min) / (n - 1) as f64,
            interior_margin,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn interior_margin(&self) -> usize {
        self.interior_margin
    }

    pub fn mid_index(&self) -> usize {
        (self.n - 1) / 2
    }

    /// j-th sample point, built symmetrically around the midpoint so that a
    /// symmetric domain hits its center exactly.
    pub fn point(&self, j: usize) -> f64 {
        let mid = self.mid_index();
        let center = 0.5 * (self.x_min + self.x_max);
        let offset = j as isize - mid as isize;
        center + offset as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Same domain with doubled resolution (`2n - 1` points, spacing `h/2`).
    pub fn refined(&self) -> Grid {
        Grid {
            x_min: self.x_min,
            x_max: self.x_max,
            n: 2 * self.n - 1,
            h: 0.5 * (self.x_max - self.x_min) / (self.n - 1) as f64,
            interior_margin: self.interior_margin,
        }
    }
}

/// Complex samples of a function on a grid.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.n() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                expected: grid.n(),
            });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(GridError::NonFiniteField);
        }
        Ok(ComplexField { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Real samples of a function on a grid.
#[derive(Debug, Clone)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.n() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                expected: grid.n(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(GridError::NonFiniteField);
        }
        Ok(RealField { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Trapezoid-rule antiderivative of `samples` anchored at `base_index`:
/// `F[base_index] = 0` and `F' = samples` to second order.
pub fn cumulative_integral(samples: &[f64], grid: &Grid, base_index: usize) -> Vec<f64> {
    assert_eq!(samples.len(), grid.n(), "sample count must match the grid");
    assert!(base_index < grid.n(), "base index out of range");
    let h = grid.h();
    let mut out = vec![0.0; samples.len()];
    for j in base_index + 1..samples.len() {
        out[j] = out[j - 1] + 0.5 * h * (samples[j - 1] + samples[j]);
    }
    for j in (0..base_index).rev() {
        out[j] = out[j + 1] - 0.5 * h * (samples[j] + samples[j + 1]);
    }
    out
}

/// Trapezoid value of `∫ |phi|² dx` over the field's whole domain.
pub fn l2_norm_squared(phi: &ComplexField) -> f64 {
    let v = phi.values();
    let h = phi.grid().h();
    let mut acc = 0.5 * (v[0].norm_sqr() + v[v.len() - 1].norm_sqr());
    for value in &v[1..v.len() - 1] {
        acc += value.norm_sqr();
    }
    acc * h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormalizabilityVerdict {
    Normalizable,
    NotNormalizable,
    Indeterminate,
}

/// Thresholds for the growing-domain probe. The underlying question — does
/// `∫|phi|²` converge as the domain grows — has no finite test, so the
/// decision constants live here where they are visible and tunable.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Half-widths `L` of the probe domains `[-L, L]`, strictly increasing.
    pub widths: Vec<f64>,
    /// Grid spacing shared by every probe domain.
    pub h: f64,
    /// Declare convergence when the last relative increase of `I(L)` falls
    /// below this and the increments are decreasing.
    pub plateau_rel: f64,
    /// Declare divergence when `I(L)` grows by at least this factor over the
    /// last two steps.
    pub growth_factor: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            widths: vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0],
            h: 0.01,
            plateau_rel: 1e-6,
            growth_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum ProbeError {
    #[error("normalizability probe needs at least 4 strictly increasing widths")]
    BadWidths,
    #[error("building the probe state failed: {0}")]
    Build(String),
}

/// How a probe-state builder reports failure. Overflow is not an error for
/// the probe: a state whose samples leave the representable range is treated
/// as divergent.
#[derive(Debug, Clone)]
pub enum ProbeBuildError {
    Overflow,
    Failed(String),
}

/// Growth table and verdict of the normalizability probe.
#[derive(Debug, Clone, Serialize)]
pub struct NormGrowth {
    /// `(L, I(L))` rows, one per probed width.
    pub table: Vec<(f64, f64)>,
    pub verdict: NormalizabilityVerdict,
    pub note: String,
}

/// Growing-domain estimate of whether `phi` belongs to L².
///
/// `phi_builder(L)` must return the state sampled on `[-L, L]` at the
/// configured spacing. The verdict compares `I(L) = ∫|phi|²` across widths:
/// a plateau means normalizable, sustained geometric growth (or overflow
/// while building the state) means not.
pub fn l2_norm_growth<F>(mut phi_builder: F, cfg: &ProbeConfig) -> Result<NormGrowth, ProbeError>
where
    F: FnMut(f64) -> Result<ComplexField, ProbeBuildError>,
{
    if cfg.widths.len() < 4 || cfg.widths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ProbeError::BadWidths);
    }
    let mut table = Vec::with_capacity(cfg.widths.len());
    for &width in &cfg.widths {
        match phi_builder(width) {
            Ok(phi) => table.push((width, l2_norm_squared(&phi))),
            Err(ProbeBuildError::Overflow) => {
                return Ok(NormGrowth {
                    table,
                    verdict: NormalizabilityVerdict::NotNormalizable,
                    note: format!("state overflowed while sampling on [-{width}, {width}]"),
                });
            }
            Err(ProbeBuildError::Failed(msg)) => return Err(ProbeError::Build(msg)),
        }
    }
    let k = table.len();
    let last = table[k - 1].1;
    if !last.is_finite() {
        return Ok(NormGrowth {
            table,
            verdict: NormalizabilityVerdict::NotNormalizable,
            note: "norm integral overflowed".to_string(),
        });
    }
    if last <= 0.0 {
        return Ok(NormGrowth {
            table,
            verdict: NormalizabilityVerdict::Indeterminate,
            note: "norm integral is identically zero".to_string(),
        });
    }
    if last >= cfg.growth_factor * table[k - 3].1 {
        return Ok(NormGrowth {
            verdict: NormalizabilityVerdict::NotNormalizable,
            note: format!(
                "grew by {:.3}x over the last two steps",
                last / table[k - 3].1
            ),
            table,
        });
    }
    let last_step = table[k - 1].1 - table[k - 2].1;
    let prev_step = table[k - 2].1 - table[k - 3].1;
    let rel = last_step / last;
    if rel < cfg.plateau_rel && last_step <= prev_step {
        return Ok(NormGrowth {
            verdict: NormalizabilityVerdict::Normalizable,
            note: format!("last relative increase {rel:.3e}"),
            table,
        });
    }
    Ok(NormGrowth {
        verdict: NormalizabilityVerdict::Indeterminate,
        note: format!("last relative increase {rel:.3e} has not plateaued"),
        table,
    })
}
