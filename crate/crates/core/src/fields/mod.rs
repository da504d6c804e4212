//! Vector-valued fields on the flat torus `[0, 1)^n` sampled on uniform grids,
//! their discrete Fourier coefficients, and the local, spherical and radial
//! operators realized as frequency multipliers.
//!
//! Coefficients are taken against `e^{2 pi i m . x}`:
//! `u_hat(m) = N^{-n} sum_j u(x_j) e^{-2 pi i m . x_j}`, with `m` in
//! `{-N/2, ..., N/2 - 1}^n`.

mod analysis;
mod multiplier;
mod operators;
mod trig;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

pub use analysis::{
    inner_product, kernel_check_torus, kernel_witness, kernel_witness_on_grid, localization_table, lp_norm,
    KernelEntry, KernelReport, KernelStatus, LocalizationRow, LocalizationTable, WitnessReport,
    INCONCLUSIVE_THRESHOLD, ZERO_THRESHOLD,
};
pub use multiplier::{FrequencyMultiplier, MultiplierKind};
pub use operators::{
    apply_local, apply_radial_direct, apply_radial_direct_with, apply_radial_spectral, apply_spherical_direct, apply_spherical_spectral,
    radial_direct_panels, DIRECT_TAIL_THRESHOLD,
};
pub use trig::{TrigPolynomial, TrigTerm};

/// Default number of grid points per axis.
pub const DEFAULT_GRID: usize = 64;

/// Real field with `components` values per grid point.
///
/// Storage is component-major; within a component, grid points are in row-major
/// order with axis 0 varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    n: usize,
    grid: usize,
    components: usize,
    values: Vec<f64>,
}

fn check_grid(n: usize, grid: usize, components: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidField("dimension must be at least 1".into()));
    }
    if grid < 2 || grid % 2 != 0 {
        return Err(Error::InvalidField(format!("grid size must be even and >= 2, got {grid}")));
    }
    if components == 0 {
        return Err(Error::InvalidField("a field needs at least one component".into()));
    }
    grid.checked_pow(n as u32)
        .ok_or_else(|| Error::InvalidField("grid too large".into()))
}

impl TorusField {
    pub fn new(n: usize, grid: usize, components: usize, values: Vec<f64>) -> Result<Self> {
        let points = check_grid(n, grid, components)?;
        if values.len() != points * components {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                points * components,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value {bad}")));
        }
        Ok(Self {
            n,
            grid,
            components,
            values,
        })
    }

    pub fn zeros(n: usize, grid: usize, components: usize) -> Result<Self> {
        let points = check_grid(n, grid, components)?;
        Ok(Self {
            n,
            grid,
            components,
            values: vec![0.0; points * components],
        })
    }

    /// Samples `f(x, out)` at every grid point.
    pub fn from_fn<F: FnMut(&[f64], &mut [f64])>(n: usize, grid: usize, components: usize, mut f: F) -> Result<Self> {
        let mut field = Self::zeros(n, grid, components)?;
        let points = field.point_count();
        let mut x = vec![0.0; n];
        let mut out = vec![0.0; components];
        for idx in 0..points {
            field.point(idx, &mut x);
            f(&x, &mut out);
            for (c, v) in out.iter().enumerate() {
                field.values[c * points + idx] = *v;
            }
        }
        if let Some(bad) = field.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite sample {bad}")));
        }
        Ok(field)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn point_count(&self) -> usize {
        self.values.len() / self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let p = self.point_count();
        &self.values[c * p..(c + 1) * p]
    }

    /// Coordinates of grid point `idx`.
    pub fn point(&self, idx: usize, x: &mut [f64]) {
        let mut rest = idx;
        for d in (0..self.n).rev() {
            x[d] = (rest % self.grid) as f64 / self.grid as f64;
            rest /= self.grid;
        }
    }

    /// Fiber vector at grid point `idx`.
    pub fn at(&self, idx: usize) -> Vec<f64> {
        let p = self.point_count();
        (0..self.components).map(|c| self.values[c * p + idx]).collect()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n == other.n && self.grid == other.grid && self.components == other.components
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(n={}, N={}, comps={}) vs (n={}, N={}, comps={})",
                self.n, self.grid, self.components, other.n, other.grid, other.components
            )))
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Discrete Fourier coefficients of every component.
    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let points = self.point_count();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(self.grid, FftDirection::Forward);
        let scale = 1.0 / points as f64;
        for chunk in coeffs.chunks_mut(points) {
            transform_axes(chunk, self.n, self.grid, fft.as_ref());
            for c in chunk.iter_mut() {
                *c *= scale;
            }
        }
        Spectrum {
            n: self.n,
            grid: self.grid,
            components: self.components,
            coeffs,
        }
    }
}

fn transform_axes(data: &mut [Complex64], n: usize, grid: usize, fft: &dyn rustfft::Fft<f64>) {
    let points = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); grid];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for d in 0..n {
        let stride = grid.pow((n - 1 - d) as u32);
        for start in 0..points {
            if (start / stride) % grid != 0 {
                continue;
            }
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[start + k * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (k, v) in line.iter().enumerate() {
                data[start + k * stride] = *v;
            }
        }
    }
}

/// Fourier coefficients of a [`TorusField`], same layout as the field values.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    grid: usize,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(n: usize, grid: usize, components: usize) -> Result<Self> {
        let points = check_grid(n, grid, components)?;
        Ok(Self {
            n,
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); points * components],
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn mode_count(&self) -> usize {
        self.coeffs.len() / self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of component `c` at the mode with storage index `idx`.
    pub fn get(&self, c: usize, idx: usize) -> Complex64 {
        self.coeffs[c * self.mode_count() + idx]
    }

    /// Integer frequency of storage index `idx`.
    pub fn mode(&self, idx: usize, m: &mut [i64]) {
        mode_of(self.n, self.grid, idx, m);
    }

    /// Inverse transform; returns the real part.
    pub fn synthesize(&self) -> TorusField {
        let mut data = self.coeffs.clone();
        let points = self.mode_count();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(self.grid, FftDirection::Inverse);
        for chunk in data.chunks_mut(points) {
            transform_axes(chunk, self.n, self.grid, fft.as_ref());
        }
        TorusField {
            n: self.n,
            grid: self.grid,
            components: self.components,
            values: data.iter().map(|z| z.re).collect(),
        }
    }
}

/// Writes the integer frequency of storage index `idx` into `m`.
pub fn mode_of(n: usize, grid: usize, idx: usize, m: &mut [i64]) {
    let mut rest = idx;
    let half = (grid / 2) as i64;
    for d in (0..n).rev() {
        let k = (rest % grid) as i64;
        m[d] = if k < half { k } else { k - grid as i64 };
        rest /= grid;
    }
}

/// True when some coordinate of `m` is the unpaired frequency `-N/2`.
pub fn is_nyquist(grid: usize, m: &[i64]) -> bool {
    m.iter().any(|&k| k == -((grid / 2) as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip() {
        for n in 1..=3 {
            let grid = if n == 3 { 8 } else { 16 };
            let u = TorusField::from_fn(n, grid, 2, |x, out| {
                out[0] = (2.0 * PI * x[0]).sin() + x.iter().sum::<f64>();
                out[1] = (x[n - 1] * 7.0).exp();
            })
            .unwrap();
            let back = u.spectrum().synthesize();
            let err = u.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n}: {err}");
        }
    }

    #[test]
    fn coefficients_follow_the_convention() {
        // sin(2 pi m x) = (e^{2 pi i m x} - e^{-2 pi i m x}) / 2i
        let u = TorusField::from_fn(1, 16, 1, |x, out| out[0] = (2.0 * PI * 3.0 * x[0]).sin()).unwrap();
        let spec = u.spectrum();
        let mut m = [0i64];
        for idx in 0..16 {
            spec.mode(idx, &mut m);
            let c = spec.get(0, idx);
            let expected = match m[0] {
                3 => Complex64::new(0.0, -0.5),
                -3 => Complex64::new(0.0, 0.5),
                _ => Complex64::new(0.0, 0.0),
            };
            assert!((c - expected).norm() < 1e-14, "m={}: {c}", m[0]);
        }
    }

    #[test]
    fn modes_and_nyquist() {
        let mut m = [0i64; 2];
        mode_of(2, 8, 8 * 5 + 3, &mut m);
        assert_eq!(m, [-3, 3]);
        mode_of(2, 8, 4, &mut m);
        assert_eq!(m, [0, -4]);
        assert!(is_nyquist(8, &m));
    }

    #[test]
    fn invalid_fields() {
        assert!(TorusField::zeros(1, 7, 1).is_err());
        assert!(TorusField::new(1, 4, 1, vec![0.0; 3]).is_err());
        assert!(TorusField::new(1, 4, 1, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
