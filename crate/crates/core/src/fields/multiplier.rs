use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_grid, is_nyquist, mode_of, Spectrum};
use crate::error::{Error, Result};
use crate::operator::FirstOrderOperator;
use crate::special::ball_transform;
use crate::weights::RadialWeight;

#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierKind {
    /// One real factor per mode.
    Scalar(Vec<f64>),
    /// One `dim_w x dim_v` complex matrix per mode, stored as row-major real and
    /// imaginary parts.
    Matrix {
        dim_w: usize,
        dim_v: usize,
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

/// Per-frequency factor on the `N^n` grid of modes (storage order as in [`Spectrum`]).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMultiplier {
    n: usize,
    grid: usize,
    kind: MultiplierKind,
}

impl FrequencyMultiplier {
    /// Radial scalar multiplier `f(|m|)`, evaluated once per distinct `|m|^2`.
    pub fn radial<F: FnMut(f64) -> Result<f64>>(n: usize, grid: usize, f: F) -> Result<Self> {
        Self::radial_where(n, grid, |_| true, f)
    }

    /// [`FrequencyMultiplier::radial`] evaluated only on the mode indices selected by `keep`;
    /// the others are set to zero.
    pub fn radial_where<K, F>(n: usize, grid: usize, keep: K, mut f: F) -> Result<Self>
    where
        K: Fn(usize) -> bool,
        F: FnMut(f64) -> Result<f64>,
    {
        let modes = check_grid(n, grid, 1)?;
        let mut cache: HashMap<i64, f64> = HashMap::new();
        let mut values = Vec::with_capacity(modes);
        let mut m = vec![0i64; n];
        for idx in 0..modes {
            if !keep(idx) {
                values.push(0.0);
                continue;
            }
            mode_of(n, grid, idx, &mut m);
            let key: i64 = m.iter().map(|k| k * k).sum();
            let v = match cache.get(&key) {
                Some(v) => *v,
                None => {
                    let v = f((key as f64).sqrt())?;
                    cache.insert(key, v);
                    v
                }
            };
            values.push(v);
        }
        Ok(Self {
            n,
            grid,
            kind: MultiplierKind::Scalar(values),
        })
    }

    /// `G_s(|m|)`, the multiplier of the normalized ball indicator of radius `s`.
    pub fn ball(n: usize, grid: usize, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {s}")));
        }
        Self::radial(n, grid, |xi| ball_transform(n, s, xi))
    }

    /// `mu_hat(|m|)` of a radial weight (carries the weight's mass).
    pub fn weight(w: &RadialWeight, grid: usize) -> Result<Self> {
        Self::radial(w.dim(), grid, |xi| w.mu_hat(xi).map(|v| v.value))
    }

    /// `2 pi i A(m)`.
    pub fn symbol(op: &FirstOrderOperator, grid: usize) -> Result<Self> {
        let n = op.dim();
        let modes = check_grid(n, grid, 1)?;
        let (dw, dv) = (op.dim_w(), op.dim_v());
        let re = vec![0.0; modes * dw * dv];
        let mut im = Vec::with_capacity(modes * dw * dv);
        let mut m = vec![0i64; n];
        let mut xi = vec![0.0; n];
        for idx in 0..modes {
            mode_of(n, grid, idx, &mut m);
            for (x, k) in xi.iter_mut().zip(&m) {
                *x = *k as f64;
            }
            let a = op.symbol_unchecked(&xi);
            for r in 0..dw {
                for c in 0..dv {
                    im.push(2.0 * PI * a[(r, c)]);
                }
            }
        }
        Ok(Self {
            n,
            grid,
            kind: MultiplierKind::Matrix {
                dim_w: dw,
                dim_v: dv,
                re,
                im,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn kind(&self) -> &MultiplierKind {
        &self.kind
    }

    /// Largest modulus of a scalar multiplier (`None` for matrix multipliers).
    pub fn max_modulus(&self) -> Option<f64> {
        match &self.kind {
            MultiplierKind::Scalar(v) => Some(v.iter().fold(0.0, |m, x| m.max(x.abs()))),
            MultiplierKind::Matrix { .. } => None,
        }
    }

    fn output_components(&self, input: usize) -> Result<usize> {
        match &self.kind {
            MultiplierKind::Scalar(_) => Ok(input),
            MultiplierKind::Matrix { dim_w, dim_v, .. } => {
                if *dim_v != input {
                    Err(Error::DimensionMismatch {
                        expected: *dim_v,
                        got: input,
                    })
                } else {
                    Ok(*dim_w)
                }
            }
        }
    }

    fn apply_mode(&self, idx: usize, input: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        match &self.kind {
            MultiplierKind::Scalar(v) => out.extend(input.iter().map(|z| z * v[idx])),
            MultiplierKind::Matrix { dim_w, dim_v, re, im } => {
                let base = idx * dim_w * dim_v;
                for r in 0..*dim_w {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..*dim_v {
                        let k = base + r * dim_v + c;
                        acc += Complex64::new(re[k], im[k]) * input[c];
                    }
                    out.push(acc);
                }
            }
        }
    }

    /// Applies `chain[last] ... chain[0]` mode by mode. The unpaired `-N/2`
    /// modes are set to zero so real inputs give real outputs.
    pub fn apply_chain(chain: &[&FrequencyMultiplier], spec: &Spectrum) -> Result<Spectrum> {
        let mut comps = spec.components();
        for mult in chain {
            if mult.n != spec.dim() || mult.grid != spec.grid() {
                return Err(Error::GridMismatch(format!(
                    "multiplier on (n={}, N={}) applied to spectrum on (n={}, N={})",
                    mult.n,
                    mult.grid,
                    spec.dim(),
                    spec.grid()
                )));
            }
            comps = mult.output_components(comps)?;
        }
        let modes = spec.mode_count();
        let mut out = Spectrum::zeros(spec.dim(), spec.grid(), comps)?;
        let mut m = vec![0i64; spec.dim()];
        let mut a = Vec::new();
        let mut b = Vec::new();
        for idx in 0..modes {
            mode_of(spec.dim(), spec.grid(), idx, &mut m);
            if is_nyquist(spec.grid(), &m) {
                continue;
            }
            a.clear();
            a.extend((0..spec.components()).map(|c| spec.get(c, idx)));
            for mult in chain {
                mult.apply_mode(idx, &a, &mut b);
                std::mem::swap(&mut a, &mut b);
            }
            let coeffs = out.coeffs_mut();
            for (c, z) in a.iter().enumerate() {
                coeffs[c * modes + idx] = *z;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_multiplier_is_bounded_and_cached() {
        let m = FrequencyMultiplier::ball(2, 16, 0.2).unwrap();
        let max = m.max_modulus().unwrap();
        assert!((max - 1.0).abs() < 1e-15);
        let mut calls = 0;
        FrequencyMultiplier::radial(2, 16, |_| {
            calls += 1;
            Ok(1.0)
        })
        .unwrap();
        // distinct values of k1^2 + k2^2 with k in -8..8
        let mut seen = std::collections::BTreeSet::new();
        for a in -8i64..8 {
            for b in -8i64..8 {
                seen.insert(a * a + b * b);
            }
        }
        assert_eq!(calls, seen.len());
    }

    #[test]
    fn chain_dimension_checks() {
        let grad = FirstOrderOperator::gradient(2);
        let sym = FrequencyMultiplier::symbol(&grad, 8).unwrap();
        let spec = Spectrum::zeros(2, 8, 2).unwrap();
        assert!(FrequencyMultiplier::apply_chain(&[&sym], &spec).is_err());
        let spec = Spectrum::zeros(2, 8, 1).unwrap();
        let out = FrequencyMultiplier::apply_chain(&[&sym], &spec).unwrap();
        assert_eq!(out.components(), 2);
    }
}
