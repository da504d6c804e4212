use std::f64::consts::PI;

use rand::Rng;

use super::TorusField;
use crate::error::{Error, Result};

/// `cos_amp cos(2 pi m . x) + sin_amp sin(2 pi m . x)` with vector amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub mode: Vec<i64>,
    pub cos_amp: Vec<f64>,
    pub sin_amp: Vec<f64>,
}

/// Finite sum of [`TrigTerm`]s on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    n: usize,
    components: usize,
    terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    pub fn new(n: usize, components: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        if n == 0 || components == 0 {
            return Err(Error::InvalidField("dimension and components must be positive".into()));
        }
        for t in &terms {
            if t.mode.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.mode.len(),
                });
            }
            for amp in [&t.cos_amp, &t.sin_amp] {
                if amp.len() != components {
                    return Err(Error::DimensionMismatch {
                        expected: components,
                        got: amp.len(),
                    });
                }
                if amp.iter().any(|a| !a.is_finite()) {
                    return Err(Error::InvalidField("non-finite amplitude".into()));
                }
            }
        }
        Ok(Self { n, components, terms })
    }

    /// `v sin(2 pi m . x)`.
    pub fn single_sine(mode: Vec<i64>, v: Vec<f64>) -> Result<Self> {
        let n = mode.len();
        let components = v.len();
        let zeros = vec![0.0; components];
        Self::new(
            n,
            components,
            vec![TrigTerm {
                mode,
                cos_amp: zeros,
                sin_amp: v,
            }],
        )
    }

    /// `terms` random modes with `|m_i| <= bandwidth` and amplitudes uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, components: usize, bandwidth: i64, terms: usize) -> Result<Self> {
        if bandwidth < 1 {
            return Err(Error::Domain("bandwidth must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(terms);
        while out.len() < terms {
            let mode: Vec<i64> = (0..n).map(|_| rng.gen_range(-bandwidth..=bandwidth)).collect();
            if mode.iter().all(|&k| k == 0) {
                continue;
            }
            let cos_amp = (0..components).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let sin_amp = (0..components).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            out.push(TrigTerm { mode, cos_amp, sin_amp });
        }
        Self::new(n, components, out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    /// Largest `|m_i|` over all terms.
    pub fn bandwidth(&self) -> i64 {
        self.terms.iter().flat_map(|t| t.mode.iter().map(|k| k.abs())).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in &self.terms {
            let phase = 2.0 * PI * t.mode.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>();
            let (s, c) = phase.sin_cos();
            for (i, o) in out.iter_mut().enumerate() {
                *o += t.cos_amp[i] * c + t.sin_amp[i] * s;
            }
        }
    }

    /// Grid samples; the grid must resolve every mode strictly below `N/2`.
    pub fn sample(&self, grid: usize) -> Result<TorusField> {
        if 2 * self.bandwidth() >= grid as i64 {
            return Err(Error::InvalidField(format!(
                "bandwidth {} is not resolved by a grid of {grid} points",
                self.bandwidth()
            )));
        }
        TorusField::from_fn(self.n, grid, self.components, |x, out| self.eval(x, out))
    }
}
