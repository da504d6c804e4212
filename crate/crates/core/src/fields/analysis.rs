use std::fmt;

use nalgebra::DVector;

use super::{apply_local, apply_radial_spectral, apply_spherical_spectral, TorusField, TrigPolynomial, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::operator::FirstOrderOperator;
use crate::special::{bessel_j_with_error, BesselOrder};
use crate::weights::ConcentratingFamily;

/// `|J| < ZERO_THRESHOLD` flags a Bessel zero.
pub const ZERO_THRESHOLD: f64 = 1e-8;
/// `ZERO_THRESHOLD <= |J| <= INCONCLUSIVE_THRESHOLD` is reported as inconclusive.
pub const INCONCLUSIVE_THRESHOLD: f64 = 1e-4;

/// Grid `L^p` norm of the pointwise Euclidean fiber norm, uniform weights `N^{-n}`.
pub fn lp_norm(u: &TorusField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("exponent must be >= 1, got {p}")));
    }
    let points = u.point_count();
    let comps = u.components();
    let vals = u.values();
    let fiber = |idx: usize| -> f64 {
        (0..comps)
            .map(|c| vals[c * points + idx] * vals[c * points + idx])
            .sum::<f64>()
            .sqrt()
    };
    if p.is_infinite() {
        return Ok((0..points).map(fiber).fold(0.0, f64::max));
    }
    let sum: f64 = (0..points).map(|i| fiber(i).powf(p)).sum();
    Ok((sum / points as f64).powf(1.0 / p))
}

/// Grid `L^2` pairing `N^{-n} sum_j u(x_j) . v(x_j)`.
pub fn inner_product(u: &TorusField, v: &TorusField) -> Result<f64> {
    if !u.same_shape(v) {
        return Err(Error::GridMismatch("inner product of fields with different shapes".into()));
    }
    let dot: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
    Ok(dot / u.point_count() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationRow {
    pub eps: f64,
    /// `||A_{rho_eps} u - A u||_p`
    pub error: f64,
    /// `||A_{rho_eps} u||_p`
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationTable {
    pub p: f64,
    /// `||A u||_p`
    pub local_norm: f64,
    pub rows: Vec<LocalizationRow>,
}

impl LocalizationTable {
    /// Errors are non-increasing along the list, allowing each step to grow by `slack`
    /// (relative) once the errors are above round-off.
    pub fn errors_non_increasing(&self, slack: f64) -> bool {
        let floor = 1e-12 * self.local_norm.max(1.0);
        self.rows
            .windows(2)
            .all(|w| w[1].error <= w[0].error * (1.0 + slack) || w[1].error <= floor)
    }

    /// `err(eps_{k+1}) / err(eps_k)` for consecutive rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].error / w[0].error).collect()
    }

    /// Relative gap between the last norm and `||A u||_p`.
    pub fn final_norm_gap(&self) -> Option<f64> {
        self.rows.last().map(|r| {
            if self.local_norm == 0.0 {
                r.norm
            } else {
                (r.norm - self.local_norm).abs() / self.local_norm
            }
        })
    }
}

/// `(eps, ||A_{rho_eps} u - A u||_p, ||A_{rho_eps} u||_p)` along a decreasing `eps_list`.
pub fn localization_table(
    op: &FirstOrderOperator,
    u: &TorusField,
    family: &ConcentratingFamily,
    p: f64,
    eps_list: &[f64],
) -> Result<LocalizationTable> {
    if eps_list.is_empty() {
        return Err(Error::Domain("eps list is empty".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("eps list must be strictly decreasing".into()));
    }
    if family.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: family.dim(),
        });
    }
    let local = apply_local(op, u)?;
    let local_norm = lp_norm(&local, p)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let w = family.member(eps)?;
        let v = apply_radial_spectral(op, u, &w)?;
        rows.push(LocalizationRow {
            eps,
            error: lp_norm(&v.sub(&local)?, p)?,
            norm: lp_norm(&v, p)?,
        });
    }
    Ok(LocalizationTable { p, local_norm, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelStatus {
    /// `m` is outside the wave set; nothing to check.
    NotInWaveSet,
    /// `|J| > INCONCLUSIVE_THRESHOLD`.
    Clear,
    Inconclusive,
    /// Rank positive and `|J| < ZERO_THRESHOLD`: the mode lies in the kernel of `A_s` only.
    Flagged,
}

impl fmt::Display for KernelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelStatus::NotInWaveSet => "not-in-wave-set",
            KernelStatus::Clear => "clear",
            KernelStatus::Inconclusive => "inconclusive",
            KernelStatus::Flagged => "flagged",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelEntry {
    pub mode: Vec<i64>,
    pub mode_norm: f64,
    pub rank: usize,
    pub bessel: f64,
    pub bessel_error: f64,
    pub status: KernelStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub s: f64,
    pub budget: i64,
    pub entries: Vec<KernelEntry>,
}

impl KernelReport {
    pub fn flagged(&self) -> impl Iterator<Item = &KernelEntry> {
        self.entries.iter().filter(|e| e.status == KernelStatus::Flagged)
    }

    pub fn inconclusive(&self) -> impl Iterator<Item = &KernelEntry> {
        self.entries.iter().filter(|e| e.status == KernelStatus::Inconclusive)
    }

    pub fn kernels_coincide(&self) -> bool {
        self.flagged().next().is_none()
    }

    pub fn verdict(&self) -> String {
        if self.kernels_coincide() {
            let inc = self.inconclusive().count();
            if inc == 0 {
                "kernels coincide on tested band".to_string()
            } else {
                format!("kernels coincide on tested band ({inc} inconclusive frequencies)")
            }
        } else {
            let list: Vec<String> = self.flagged().map(|e| format_mode(&e.mode)).collect();
            format!("violating frequencies: {}", list.join(" "))
        }
    }
}

pub(crate) fn format_mode(m: &[i64]) -> String {
    if m.len() == 1 {
        format!("{}", m[0])
    } else {
        let parts: Vec<String> = m.iter().map(|k| k.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Scans `0 < |m|_inf <= budget` for modes of the wave set on which `A_s` vanishes.
pub fn kernel_check_torus(op: &FirstOrderOperator, s: f64, budget: i64) -> Result<KernelReport> {
    if budget < 1 {
        return Err(Error::Domain(format!("frequency budget must be >= 1, got {budget}")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {s}")));
    }
    let n = op.dim();
    let order = BesselOrder::half_dimension(n);
    let side = (2 * budget + 1) as usize;
    let total = side.pow(n as u32);
    let mut entries = Vec::new();
    let mut m = vec![0i64; n];
    let mut xi = vec![0.0; n];
    for code in 0..total {
        let mut rest = code;
        for d in (0..n).rev() {
            m[d] = (rest % side) as i64 - budget;
            rest /= side;
        }
        if m.iter().all(|&k| k == 0) {
            continue;
        }
        for (x, k) in xi.iter_mut().zip(&m) {
            *x = *k as f64;
        }
        let rank = op.wave_rank(&xi)?;
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (bessel, bessel_error) = bessel_j_with_error(order, 2.0 * std::f64::consts::PI * s * norm)?;
        let status = if rank == 0 {
            KernelStatus::NotInWaveSet
        } else if bessel.abs() < ZERO_THRESHOLD {
            KernelStatus::Flagged
        } else if bessel.abs() <= INCONCLUSIVE_THRESHOLD {
            KernelStatus::Inconclusive
        } else {
            KernelStatus::Clear
        };
        entries.push(KernelEntry {
            mode: m.clone(),
            mode_norm: norm,
            rank,
            bessel,
            bessel_error,
            status,
        });
    }
    Ok(KernelReport { s, budget, entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    /// `u(x) = v sin(2 pi m . x)`
    pub field: TorusField,
    /// `||A_s u||_inf`
    pub spherical_sup: f64,
    /// `||A u||_inf`
    pub local_sup: f64,
    pub bessel: f64,
    /// Rank of `A(m)` positive, `A(m) v != 0` and `|J| < ZERO_THRESHOLD`.
    pub certified: bool,
}

/// [`kernel_witness_on_grid`] on the default grid.
pub fn kernel_witness(op: &FirstOrderOperator, s: f64, mode: &[i64], v: &[f64]) -> Result<WitnessReport> {
    kernel_witness_on_grid(op, s, mode, v, DEFAULT_GRID)
}

/// Builds `u = v sin(2 pi m . x)` and reports the sup norms of `A_s u` and `A u`.
pub fn kernel_witness_on_grid(
    op: &FirstOrderOperator,
    s: f64,
    mode: &[i64],
    v: &[f64],
    grid: usize,
) -> Result<WitnessReport> {
    if mode.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: mode.len(),
        });
    }
    if v.len() != op.dim_v() {
        return Err(Error::DimensionMismatch {
            expected: op.dim_v(),
            got: v.len(),
        });
    }
    if mode.iter().all(|&k| k == 0) {
        return Err(Error::Domain("witness frequency must be nonzero".into()));
    }
    let field = TrigPolynomial::single_sine(mode.to_vec(), v.to_vec())?.sample(grid)?;
    let xi: Vec<f64> = mode.iter().map(|&k| k as f64).collect();
    let symbol = op.symbol(&xi)?;
    let rank = op.wave_rank(&xi)?;
    let image = &symbol * DVector::from_column_slice(v);
    let scale = symbol.norm() * v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (bessel, _) = bessel_j_with_error(
        BesselOrder::half_dimension(op.dim()),
        2.0 * std::f64::consts::PI * s * norm,
    )?;
    let certified = rank > 0 && image.norm() > 1e-12 * scale && bessel.abs() < ZERO_THRESHOLD;
    let spherical_sup = lp_norm(&apply_spherical_spectral(op, &field, s)?, f64::INFINITY)?;
    let local_sup = lp_norm(&apply_local(op, &field)?, f64::INFINITY)?;
    Ok(WitnessReport {
        field,
        spherical_sup,
        local_sup,
        bessel,
        certified,
    })
}
