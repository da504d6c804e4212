use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{is_nyquist, mode_of, FrequencyMultiplier, Spectrum, TorusField};
use crate::error::{Error, Result};
use crate::operator::FirstOrderOperator;
use crate::quadrature::SphereRule;
use crate::weights::{RadialPanels, RadialWeight};

/// Tail mass left out beyond the outer radius of the direct radial operator.
pub const DIRECT_TAIL_THRESHOLD: f64 = 1e-8;

fn check_compatible(op: &FirstOrderOperator, u: &TorusField) -> Result<()> {
    if op.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: u.dim(),
        });
    }
    if op.dim_v() != u.components() {
        return Err(Error::DimensionMismatch {
            expected: op.dim_v(),
            got: u.components(),
        });
    }
    Ok(())
}

/// `A u`, coefficients `2 pi i A(m) u_hat(m)`.
pub fn apply_local(op: &FirstOrderOperator, u: &TorusField) -> Result<TorusField> {
    check_compatible(op, u)?;
    let sym = FrequencyMultiplier::symbol(op, u.grid())?;
    Ok(FrequencyMultiplier::apply_chain(&[&sym], &u.spectrum())?.synthesize())
}

/// `A_s u`, coefficients `G_s(|m|) 2 pi i A(m) u_hat(m)`.
pub fn apply_spherical_spectral(op: &FirstOrderOperator, u: &TorusField, s: f64) -> Result<TorusField> {
    check_compatible(op, u)?;
    let sym = FrequencyMultiplier::symbol(op, u.grid())?;
    let ball = FrequencyMultiplier::ball(u.dim(), u.grid(), s)?;
    Ok(FrequencyMultiplier::apply_chain(&[&sym, &ball], &u.spectrum())?.synthesize())
}

/// `A_rho u`, coefficients `mu_hat(|m|) 2 pi i A(m) u_hat(m)`.
pub fn apply_radial_spectral(op: &FirstOrderOperator, u: &TorusField, w: &RadialWeight) -> Result<TorusField> {
    check_compatible(op, u)?;
    if w.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: w.dim(),
        });
    }
    let spec = u.spectrum();
    // the weight multiplier costs a quadrature per |m|, so it is only formed on active modes
    let floor = 1e-14 * spec.coeffs().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let active = |idx: usize| (0..spec.components()).any(|c| spec.get(c, idx).norm() > floor);
    let sym = FrequencyMultiplier::symbol(op, u.grid())?;
    let mu = FrequencyMultiplier::radial_where(u.dim(), u.grid(), active, |xi| {
        w.mu_hat(xi).map(|v| v.value)
    })?;
    Ok(FrequencyMultiplier::apply_chain(&[&sym, &mu], &spec)?.synthesize())
}

/// Nodes of a sphere rule with their symbol matrices.
struct SphereNodes {
    dirs: Vec<Vec<f64>>,
    weights: Vec<f64>,
    symbols: Vec<DMatrix<f64>>,
}

impl SphereNodes {
    fn new(op: &FirstOrderOperator, quad_order: usize) -> Result<Self> {
        let rule = SphereRule::new(op.dim(), quad_order)?;
        let mut dirs = Vec::with_capacity(rule.len());
        let mut weights = Vec::with_capacity(rule.len());
        let mut symbols = Vec::with_capacity(rule.len());
        for (omega, w) in rule.iter() {
            dirs.push(omega.to_vec());
            weights.push(w);
            symbols.push(op.symbol_unchecked(omega));
        }
        Ok(Self { dirs, weights, symbols })
    }
}

/// Accumulates `sum_k c_k n / r_k * avg_q A(omega_q) (u(x + r_k omega_q) - u(x))`
/// in coefficient space. Shifts act on each mode as the phase `e^{2 pi i r m . omega}`,
/// which is exact trigonometric interpolation of the grid samples.
fn difference_quotients(
    op: &FirstOrderOperator,
    u: &TorusField,
    nodes: &SphereNodes,
    radii: &[(f64, f64)],
) -> Result<TorusField> {
    let spec = u.spectrum();
    let n = u.dim();
    let grid = u.grid();
    let modes = spec.mode_count();
    let (dv, dw) = (op.dim_v(), op.dim_w());
    let max = spec.coeffs().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let floor = 1e-14 * max;
    let mut out = Spectrum::zeros(n, grid, dw)?;
    let mut m = vec![0i64; n];
    let mut uh = vec![Complex64::new(0.0, 0.0); dv];
    let mut mixed = vec![Complex64::new(0.0, 0.0); dv];
    let nf = n as f64;
    for idx in 0..modes {
        mode_of(n, grid, idx, &mut m);
        if is_nyquist(grid, &m) {
            continue;
        }
        let mut active = false;
        for (c, slot) in uh.iter_mut().enumerate() {
            *slot = spec.get(c, idx);
            active |= slot.norm() > floor;
        }
        if !active || m.iter().all(|&k| k == 0) {
            continue;
        }
        for q in 0..nodes.dirs.len() {
            let proj: f64 = nodes.dirs[q].iter().zip(&m).map(|(o, &k)| o * k as f64).sum();
            let mut factor = Complex64::new(0.0, 0.0);
            for &(r, c) in radii {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * r * proj) - 1.0;
                factor += phase * (c * nf / r);
            }
            factor *= nodes.weights[q];
            for (c, slot) in mixed.iter_mut().enumerate() {
                *slot = uh[c] * factor;
            }
            let a = &nodes.symbols[q];
            let coeffs = out.coeffs_mut();
            for row in 0..dw {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, z) in mixed.iter().enumerate() {
                    acc += z * a[(row, c)];
                }
                coeffs[row * modes + idx] += acc;
            }
        }
    }
    Ok(out.synthesize())
}

/// `A_s u` by sphere quadrature of the difference quotients.
pub fn apply_spherical_direct(
    op: &FirstOrderOperator,
    u: &TorusField,
    s: f64,
    quad_order: usize,
) -> Result<TorusField> {
    check_compatible(op, u)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {s}")));
    }
    let nodes = SphereNodes::new(op, quad_order)?;
    difference_quotients(op, u, &nodes, &[(s, 1.0)])
}

/// Radial panels on `(delta, R]`: geometric near `delta`, then uniform steps.
pub fn radial_direct_panels(w: &RadialWeight, delta: f64) -> Result<RadialPanels> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("truncation radius must be positive, got {delta}")));
    }
    let outer = w.truncation_radius(DIRECT_TAIL_THRESHOLD)?;
    if delta >= outer {
        return Ok(RadialPanels {
            edges: vec![delta, delta],
            order: 16,
        });
    }
    let step = (0.05f64).min((outer - delta) / 8.0);
    let mut edges = vec![delta];
    let mut r = delta;
    while 2.0 * r - r < step && 2.0 * r < outer {
        r *= 2.0;
        edges.push(r);
    }
    let count = ((outer - r) / step).ceil().max(1.0) as usize;
    for k in 1..=count {
        edges.push(r + (outer - r) * k as f64 / count as f64);
    }
    Ok(RadialPanels { edges, order: 16 })
}

/// Truncated principal value `n int_{|h| > delta} rho(h) A(h/|h|) (u(x+h) - u(x)) / |h| dh`,
/// assembled from spherical operators at the superposition radii.
pub fn apply_radial_direct(
    op: &FirstOrderOperator,
    u: &TorusField,
    w: &RadialWeight,
    delta: f64,
) -> Result<TorusField> {
    let order = match u.dim() {
        1 => 1,
        2 => 64,
        _ => 16,
    };
    apply_radial_direct_with(op, u, w, delta, order)
}

/// [`apply_radial_direct`] with an explicit sphere quadrature order.
pub fn apply_radial_direct_with(
    op: &FirstOrderOperator,
    u: &TorusField,
    w: &RadialWeight,
    delta: f64,
    quad_order: usize,
) -> Result<TorusField> {
    check_compatible(op, u)?;
    if w.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: w.dim(),
        });
    }
    let panels = radial_direct_panels(w, delta)?;
    let measure = w.superposition_measure(&panels)?;
    let radii: Vec<(f64, f64)> = measure
        .radii
        .iter()
        .zip(&measure.weights)
        .filter(|(_, &c)| c != 0.0)
        .map(|(&r, &c)| (r, c))
        .collect();
    let nodes = SphereNodes::new(op, quad_order)?;
    difference_quotients(op, u, &nodes, &radii)
}
