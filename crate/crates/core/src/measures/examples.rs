use std::f64::consts::{LN_2, PI};

use super::{LineMeasure, PlaneAtom, PlaneMeasure};
use crate::error::{Error, Result};
use crate::weights::ConcentratingFamily;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinfGap {
    pub eps: f64,
    /// Largest sampled `|A_{rho_eps} u - u'|` for `u = |t|`.
    pub gap: f64,
    pub argmax: f64,
    /// Value of the gap just below `t = eps`, where it equals `1 - ln 2`.
    pub value_below_eps: f64,
}

impl LinfGap {
    pub const LOWER_BOUND: f64 = 1.0 - LN_2;
}

/// Sup-norm gap between the annulus localization of `u(t) = |t|` and `u' = sign t`
/// on `(-1, 1)`. Outside `[-2 eps, 2 eps]` the two agree exactly, so the samples
/// cover `0 < |t| <= 2 eps`, including points close to the origin and to `eps`.
pub fn linf_gap(eps: f64) -> Result<LinfGap> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Domain(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    let cells = 2000;
    let mu = LineMeasure::from_density_fn(-1.0, 1.0, cells, 1, |x, o| o[0] = x.signum())?;
    let w = ConcentratingFamily::Annulus { n: 1 }.member(eps)?;
    let mut samples: Vec<f64> = (1..=400).map(|k| 2.0 * eps * k as f64 / 400.0).collect();
    samples.extend([eps * 1e-7, eps * 1e-3, eps * (1.0 - 1e-9)]);
    let mut gap = 0.0;
    let mut argmax = f64::NAN;
    for &t in &samples {
        for x in [t, -t] {
            let v = mu.radial_of_measure(&w, x)?[0];
            let d = (v - x.signum()).abs();
            if d > gap {
                gap = d;
                argmax = x;
            }
        }
    }
    let below = eps * (1.0 - 1e-9);
    let value_below_eps = (mu.radial_of_measure(&w, below)?[0] - 1.0).abs();
    Ok(LinfGap {
        eps,
        gap,
        argmax,
        value_below_eps,
    })
}

/// `1 + cos(2 pi x)` on `|x| < 1/2`, zero elsewhere.
pub fn smooth_bump_density(x: f64) -> f64 {
    if x.abs() < 0.5 {
        1.0 + (2.0 * PI * x).cos()
    } else {
        0.0
    }
}

/// Annulus localizations of the derivative of a smooth function (density
/// [`smooth_bump_density`]) sampled at cell midpoints, with the density itself as limit.
pub fn radial_smooth_scenario(eps_list: &[f64], cells: usize) -> Result<(Vec<LineMeasure>, LineMeasure)> {
    let limit = LineMeasure::from_density_fn(-1.0, 1.0, cells, 1, |x, o| o[0] = smooth_bump_density(x))?;
    let family = ConcentratingFamily::Annulus { n: 1 };
    let mut seq = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let w = family.member(eps)?;
        let mut density = Vec::with_capacity(cells);
        for k in 0..cells {
            density.push(limit.radial_of_measure(&w, limit.midpoint(k))?[0]);
        }
        seq.push(LineMeasure::new(-1.0, 1.0, cells, 1, density, Vec::new())?);
    }
    Ok((seq, limit))
}

/// Spherical fields `1_{(-s, s)} / (2 s)` of a unit atom at the origin, against the zero density.
pub fn dirac_spherical_scenario(s_list: &[f64], cells: usize) -> Result<(Vec<LineMeasure>, LineMeasure)> {
    let dirac = LineMeasure::dirac(-1.0, 1.0, cells, 0.0)?;
    let limit = LineMeasure::zero(-1.0, 1.0, cells, 1)?;
    let mut seq = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let mut density = Vec::with_capacity(cells);
        for k in 0..cells {
            // zero extension: balls near the window edge see no mass
            density.push(dirac.ball_mass(dirac.midpoint(k), s)?[0] / (2.0 * s));
        }
        seq.push(LineMeasure::new(-1.0, 1.0, cells, 1, density, Vec::new())?);
    }
    Ok((seq, limit))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicProbe {
    pub point: [f64; 2],
    pub value: f64,
}

/// Probes `(+-h, 0)` and `(0, +-h)` for `h in {0.1, 0.01}`.
pub fn default_atomic_probes() -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for h in [0.1, 0.01] {
        out.extend([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]]);
    }
    out
}

/// Spherical operator of `delta_(0,1) - delta_(1,0)` (the divergence of a planar field) at the probes.
pub fn atomic_divergence_demo(s: f64, probes: &[[f64; 2]]) -> Result<Vec<AtomicProbe>> {
    let mu = PlaneMeasure::new(vec![
        PlaneAtom {
            location: [0.0, 1.0],
            weight: 1.0,
        },
        PlaneAtom {
            location: [1.0, 0.0],
            weight: -1.0,
        },
    ])?;
    probes
        .iter()
        .map(|&p| {
            Ok(AtomicProbe {
                point: p,
                value: mu.spherical_of_measure(s, p)?,
            })
        })
        .collect()
}
