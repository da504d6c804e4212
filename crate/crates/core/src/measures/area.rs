use std::fmt;
use std::sync::Arc;

use super::{norm, LineAtom, LineMeasure};
use crate::error::{Error, Result};

/// Ray length used to approximate a recession function as `g(T z) / T`.
pub const RECESSION_RAY: f64 = 1e6;

type Integrand = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Convex integrand `g` on the fiber space with its recession function `g^inf`.
#[derive(Clone)]
pub struct AreaIntegrand {
    name: String,
    g: Integrand,
    recession: Option<Integrand>,
}

impl fmt::Debug for AreaIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AreaIntegrand")
            .field("name", &self.name)
            .field("analytic_recession", &self.recession.is_some())
            .finish()
    }
}

impl AreaIntegrand {
    /// `sqrt(1 + |z|^2)`, recession `|z|`.
    pub fn area() -> Self {
        Self {
            name: "area".into(),
            g: Arc::new(|z: &[f64]| (1.0 + z.iter().map(|x| x * x).sum::<f64>()).sqrt()),
            recession: Some(Arc::new(norm)),
        }
    }

    /// `sqrt(1 + |z|^2) - 1`, recession `|z|`.
    pub fn shifted_area() -> Self {
        Self {
            name: "shifted-area".into(),
            g: Arc::new(|z: &[f64]| {
                let q: f64 = z.iter().map(|x| x * x).sum();
                // sqrt(1 + q) - 1 without cancellation
                q / ((1.0 + q).sqrt() + 1.0)
            }),
            recession: Some(Arc::new(norm)),
        }
    }

    /// `|z|`, its own recession function.
    pub fn norm() -> Self {
        Self {
            name: "norm".into(),
            g: Arc::new(norm),
            recession: Some(Arc::new(norm)),
        }
    }

    /// User integrand; without `recession` the ray approximation is used.
    pub fn custom(name: impl Into<String>, g: Integrand, recession: Option<Integrand>) -> Self {
        Self {
            name: name.into(),
            g,
            recession,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "area" => Ok(Self::area()),
            "shifted-area" => Ok(Self::shifted_area()),
            "norm" => Ok(Self::norm()),
            other => Err(Error::Domain(format!("unknown area integrand '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        (self.g)(z)
    }

    pub fn recession(&self, z: &[f64]) -> f64 {
        match &self.recession {
            Some(r) => r(z),
            None => {
                let scaled: Vec<f64> = z.iter().map(|x| x * RECESSION_RAY).collect();
                (self.g)(&scaled) / RECESSION_RAY
            }
        }
    }

    /// Checks `g^inf(t z) = t g^inf(z)` for `t in {0.5, 2, 10}` to relative `1e-4`.
    pub fn check_homogeneity(&self, samples: &[Vec<f64>]) -> Result<()> {
        for z in samples {
            let base = self.recession(z);
            if !base.is_finite() {
                return Err(Error::Domain(format!("recession function is not finite at {z:?}")));
            }
            for t in [0.5, 2.0, 10.0] {
                let scaled: Vec<f64> = z.iter().map(|x| x * t).collect();
                let v = self.recession(&scaled);
                if (v - t * base).abs() > 1e-4 * (t * base).abs().max(1e-300) {
                    return Err(Error::Domain(format!(
                        "recession of '{}' is not 1-homogeneous along {z:?}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `I_g(mu) = int_window g(density) + sum g^inf(atom weights)` (window-relative).
pub fn area_functional(mu: &LineMeasure, f: &AreaIntegrand) -> f64 {
    let h = mu.cell_width();
    let dens: f64 = (0..mu.cells()).map(|k| f.eval(&mu.density_in_cell(k)) * h).sum();
    dens + mu.atoms().iter().map(|a| f.recession(&a.weight)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaRow {
    pub s: f64,
    /// `I_g(A_s mu)` over the window
    pub value: f64,
    /// `I_g(mu) - I_g(A_s mu)`
    pub gap: f64,
}

/// `I_g` of the absolutely continuous fields `A_s mu` against `I_g(mu)` along a decreasing `s_list`.
pub fn area_convergence_table(mu: &LineMeasure, f: &AreaIntegrand, s_list: &[f64]) -> Result<Vec<AreaRow>> {
    if s_list.is_empty() {
        return Err(Error::Domain("s list is empty".into()));
    }
    if s_list.windows(2).any(|w| w[1] >= w[0]) || s_list.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Domain("s list must be positive and strictly decreasing".into()));
    }
    mu.check_support_margin(s_list[0])?;
    let limit = area_functional(mu, f);
    s_list
        .iter()
        .map(|&s| {
            let value = mu.spherical_integral(s, |z| f.eval(z))?;
            Ok(AreaRow {
                s,
                value,
                gap: limit - value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaL1Row {
    /// `|mu_k - mu|(window)`
    pub l1: f64,
    /// `|I_g(mu_k) - I_g(mu)|`
    pub area_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaL1Report {
    pub rows: Vec<AreaL1Row>,
    pub l1_vanishes: bool,
    pub area_vanishes: bool,
}

impl AreaL1Report {
    /// Both columns vanish together or neither does.
    pub fn pass(&self) -> bool {
        self.l1_vanishes == self.area_vanishes
    }
}

fn vanishes(col: &[f64]) -> bool {
    match (col.first(), col.last()) {
        (Some(&first), Some(&last)) => last < 1e-12 || (col.len() > 1 && last <= 0.1 * first),
        _ => true,
    }
}

/// `|mu - nu|(window)` for measures on the same grid.
fn variation_distance(mu: &LineMeasure, nu: &LineMeasure) -> f64 {
    let h = mu.cell_width();
    let dens: f64 = (0..mu.cells())
        .map(|k| {
            let a = mu.density_in_cell(k);
            let b = nu.density_in_cell(k);
            let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            norm(&d) * h
        })
        .sum();
    let mut atoms: Vec<LineAtom> = mu.atoms().to_vec();
    for b in nu.atoms() {
        match atoms.iter_mut().find(|a| a.location == b.location) {
            Some(a) => a.weight.iter_mut().zip(&b.weight).for_each(|(x, y)| *x -= y),
            None => atoms.push(LineAtom {
                location: b.location,
                weight: b.weight.iter().map(|y| -y).collect(),
            }),
        }
    }
    dens + atoms.iter().map(|a| norm(&a.weight)).sum::<f64>()
}

/// Compares variation distance and area gap along a sequence converging (or not) to `limit`.
pub fn area_vs_l1(sequence: &[LineMeasure], limit: &LineMeasure, f: &AreaIntegrand) -> Result<AreaL1Report> {
    if sequence.is_empty() {
        return Err(Error::Domain("empty sequence".into()));
    }
    if let Some(bad) = sequence.iter().find(|m| !m.same_grid(limit)) {
        return Err(Error::GridMismatch(format!(
            "sequence member on {:?} with {} cells vs limit on {:?} with {} cells",
            bad.window(),
            bad.cells(),
            limit.window(),
            limit.cells()
        )));
    }
    let target = area_functional(limit, f);
    let rows: Vec<AreaL1Row> = sequence
        .iter()
        .map(|m| AreaL1Row {
            l1: variation_distance(m, limit),
            area_gap: (area_functional(m, f) - target).abs(),
        })
        .collect();
    let l1: Vec<f64> = rows.iter().map(|r| r.l1).collect();
    let gap: Vec<f64> = rows.iter().map(|r| r.area_gap).collect();
    Ok(AreaL1Report {
        l1_vanishes: vanishes(&l1),
        area_vanishes: vanishes(&gap),
        rows,
    })
}
