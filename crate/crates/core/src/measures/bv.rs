use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{is_nyquist, TorusField};
use crate::quadrature::{integrate_adaptive, Tolerance};

/// Real function on the line: a 1-periodic smooth part given by grid samples
/// (evaluated by trigonometric interpolation) plus finitely many jumps.
/// The function is right-continuous: a jump at `c` is included for `x > c`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSmooth {
    /// `(m, coefficient)` of the smooth part, Nyquist mode dropped
    modes: Vec<(f64, Complex64)>,
    jumps: Vec<(f64, f64)>,
}

/// Distance below which a point counts as sitting on a jump.
const JUMP_TOLERANCE: f64 = 1e-14;

impl PiecewiseSmooth {
    /// `smooth` must be a scalar field on the one-dimensional torus.
    pub fn new(smooth: Option<&TorusField>, jumps: Vec<(f64, f64)>) -> Result<Self> {
        let mut modes = Vec::new();
        if let Some(u) = smooth {
            if u.dim() != 1 || u.components() != 1 {
                return Err(Error::InvalidField("the smooth part must be a scalar field in one dimension".into()));
            }
            let spec = u.spectrum();
            let mut m = [0i64];
            for idx in 0..spec.mode_count() {
                spec.mode(idx, &mut m);
                let c = spec.get(0, idx);
                if !is_nyquist(u.grid(), &m) && c.norm() > 0.0 {
                    modes.push((m[0] as f64, c));
                }
            }
        }
        if jumps.iter().any(|(x, h)| !x.is_finite() || !h.is_finite()) {
            return Err(Error::InvalidField("non-finite jump".into()));
        }
        Ok(Self { modes, jumps })
    }

    /// Unit step at the origin.
    pub fn heaviside() -> Self {
        Self {
            modes: Vec::new(),
            jumps: vec![(0.0, 1.0)],
        }
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    fn check_off_jumps(&self, x: f64) -> Result<()> {
        match self.jumps.iter().find(|(c, _)| (x - c).abs() <= JUMP_TOLERANCE * c.abs().max(1.0)) {
            Some(_) => Err(Error::AtJump(x)),
            None => Ok(()),
        }
    }

    fn smooth_value(&self, x: f64) -> f64 {
        self.modes
            .iter()
            .map(|(m, c)| (c * Complex64::from_polar(1.0, 2.0 * PI * m * x)).re)
            .sum()
    }

    fn smooth_derivative(&self, x: f64) -> f64 {
        self.modes
            .iter()
            .map(|(m, c)| (c * Complex64::new(0.0, 2.0 * PI * m) * Complex64::from_polar(1.0, 2.0 * PI * m * x)).re)
            .sum()
    }

    /// `u(x)`; erroring on a jump.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_off_jumps(x)?;
        let steps: f64 = self.jumps.iter().filter(|(c, _)| *c < x).map(|(_, h)| h).sum();
        Ok(self.smooth_value(x) + steps)
    }

    /// `Du((lo, hi))`: quadrature of the derivative of the smooth part plus the enclosed jumps.
    pub fn derivative_measure(&self, lo: f64, hi: f64) -> Result<f64> {
        self.check_off_jumps(lo)?;
        self.check_off_jumps(hi)?;
        let est = integrate_adaptive(|t| self.smooth_derivative(t), lo, hi, Tolerance::default());
        let jumps: f64 = self.jumps.iter().filter(|(c, _)| *c > lo && *c < hi).map(|(_, h)| h).sum();
        Ok(est.value + jumps)
    }
}

/// `|Du((x - s, x + s)) - (u(x + s) - u(x - s))|`.
pub fn gauss_green_check(u: &PiecewiseSmooth, s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {s}")));
    }
    let lhs = u.derivative_measure(x - s, x + s)?;
    let rhs = u.eval(x + s)? - u.eval(x - s)?;
    Ok((lhs - rhs).abs())
}
