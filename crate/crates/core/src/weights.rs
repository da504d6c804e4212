//! Radial weights `rho(x) = rho_hat(|x|)`, their masses and tails, concentrating
//! families, and the multiplier
//!
//! ```text
//! mu_hat(xi) = |xi|^{-n/2} int_0^inf n r^{n/2 - 1} rho_hat(r) J_{n/2}(2 pi r |xi|) dr
//! ```
//!
//! of the probability function `mu_rho = int_0^inf n rho_hat(r) 1_{B_r} dr / r`.
//!
//! All radial integrals go through one panel integrator: the range is split at the
//! profile's discontinuities, panels are capped in width (to resolve oscillation),
//! and a panel starting at `r = 0` under a power singularity `rho_hat ~ r^a`
//! (`a < 0`) is mapped by `r = h u^{1/(n+a)}`, which turns the leading behaviour
//! `r^{n-1+a} dr` into a constant in `u`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, Estimate, GaussLegendre, Tolerance};
use crate::special::{ball_transform, bessel_j_with_error, unit_ball_volume, unit_sphere_area, BesselOrder};

/// Tail mass below which unbounded profiles are truncated when computing the mass.
pub const MASS_TAIL_THRESHOLD: f64 = 1e-10;
/// Tighter truncation used by the multiplier and the direct radial operator.
pub const MULTIPLIER_TAIL_THRESHOLD: f64 = 1e-14;

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied profile on a bounded support.
#[derive(Clone)]
pub struct CustomProfile {
    pub name: String,
    pub f: ProfileFn,
    pub support_radius: f64,
    pub singularity_exponent: f64,
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("support_radius", &self.support_radius)
            .field("singularity_exponent", &self.singularity_exponent)
            .finish()
    }
}

/// Radial profiles shipped with the crate.
#[derive(Debug, Clone)]
pub enum Profile {
    /// `r^{s-n}` on `(0, radius]`, `s in (0, 1)`.
    Fractional { s: f64, radius: f64 },
    /// `r^2 G_sigma(r)` with the centered Gaussian density `G_sigma`.
    GaussianModified { sigma: f64 },
    /// `1_{[eps, 2 eps]}(r) / (2 eps)`.
    Annulus { eps: f64 },
    /// `exp(-1 / (1 - (r/radius)^2))` on `[0, radius)`.
    Bump { radius: f64 },
    Custom(CustomProfile),
}

impl Profile {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            Profile::Fractional { s, radius } => {
                if !(*s > 0.0 && *s < 1.0) {
                    return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {s}")));
                }
                positive("radius", *radius)
            }
            Profile::GaussianModified { sigma } => positive("sigma", *sigma),
            Profile::Annulus { eps } => positive("eps", *eps),
            Profile::Bump { radius } => positive("radius", *radius),
            Profile::Custom(c) => positive("support radius", c.support_radius),
        }
    }

    pub fn eval(&self, n: usize, r: f64) -> f64 {
        match self {
            Profile::Fractional { s, radius } => {
                if r > 0.0 && r <= *radius {
                    r.powf(s - n as f64)
                } else {
                    0.0
                }
            }
            Profile::GaussianModified { sigma } => {
                r * r * (-0.5 * r * r / (sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Profile::Annulus { eps } => {
                if r >= *eps && r <= 2.0 * eps {
                    0.5 / eps
                } else {
                    0.0
                }
            }
            Profile::Bump { radius } => {
                let t = r / radius;
                if t < 1.0 {
                    (-1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
            Profile::Custom(c) => {
                if r <= c.support_radius {
                    (c.f)(r)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Profile::Fractional { radius, .. } => Some(*radius),
            Profile::GaussianModified { .. } => None,
            Profile::Annulus { eps } => Some(2.0 * eps),
            Profile::Bump { radius } => Some(*radius),
            Profile::Custom(c) => Some(c.support_radius),
        }
    }

    /// Exponent `a` with `rho_hat(r) ~ r^a` as `r -> 0`.
    pub fn singularity_exponent(&self, n: usize) -> f64 {
        match self {
            Profile::Fractional { s, .. } => s - n as f64,
            Profile::GaussianModified { .. } => 2.0,
            Profile::Annulus { .. } | Profile::Bump { .. } => 0.0,
            Profile::Custom(c) => c.singularity_exponent,
        }
    }

    /// Interior radii where the profile jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Annulus { eps } => vec![*eps],
            Profile::Custom(c) => c.breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// Analytic bound on `int_R^inf n omega_n r^{n-1} rho_hat(r) dr` for unbounded profiles.
    pub fn tail_bound(&self, n: usize, radius: f64) -> Option<f64> {
        match self {
            Profile::GaussianModified { sigma } => {
                // f(r) = r^k exp(-r^2 / 2 sigma^2), k = n + 1; f'/f <= -c on [R, inf)
                let k = n as f64 + 1.0;
                let c = radius / (sigma * sigma) - k / radius;
                if c <= 0.0 {
                    return None;
                }
                let f_r = unit_sphere_area(n) * radius.powf(k) * (-0.5 * radius * radius / (sigma * sigma)).exp()
                    / (sigma * (2.0 * PI).sqrt());
                Some(f_r / c)
            }
            _ => self.support_radius().map(|s| if radius >= s { 0.0 } else { f64::INFINITY }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Profile::Fractional { s, radius } => format!("fractional(s={s}, radius={radius})"),
            Profile::GaussianModified { sigma } => format!("gaussian(sigma={sigma})"),
            Profile::Annulus { eps } => format!("annulus(eps={eps})"),
            Profile::Bump { radius } => format!("bump(radius={radius})"),
            Profile::Custom(c) => format!("custom({})", c.name),
        }
    }
}

/// A radial weight in `R^n`: `scale * profile(|x|)` with its cached `L^1` mass.
#[derive(Debug, Clone)]
pub struct RadialWeight {
    n: usize,
    profile: Profile,
    scale: f64,
    mass: f64,
}

impl RadialWeight {
    /// Validates the profile, scans it for negativity and caches its mass.
    pub fn new(n: usize, profile: Profile) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        profile.validate()?;
        let a = profile.singularity_exponent(n);
        if a <= -(n as f64) {
            return Err(Error::NonIntegrable { exponent: a, n });
        }
        let mut w = Self {
            n,
            profile,
            scale: 1.0,
            mass: f64::NAN,
        };
        let scan_to = w.truncation_radius(MASS_TAIL_THRESHOLD)?;
        for i in 1..=512 {
            let r = scan_to * i as f64 / 512.0;
            let v = w.profile.eval(n, r);
            if v < 0.0 || v.is_nan() {
                return Err(Error::Domain(format!("profile is negative or NaN at r = {r}: {v}")));
            }
        }
        w.mass = w.compute_mass()?;
        Ok(w)
    }

    pub fn fractional(n: usize, s: f64) -> Result<Self> {
        Self::new(n, Profile::Fractional { s, radius: 1.0 })
    }

    pub fn gaussian_modified(n: usize, sigma: f64) -> Result<Self> {
        Self::new(n, Profile::GaussianModified { sigma })
    }

    pub fn annulus(n: usize, eps: f64) -> Result<Self> {
        Self::new(n, Profile::Annulus { eps })
    }

    pub fn bump(n: usize, radius: f64) -> Result<Self> {
        Self::new(n, Profile::Bump { radius })
    }

    /// Looks up a preset by name with its single shape parameter.
    pub fn preset(name: &str, n: usize, param: f64) -> Result<Self> {
        match name {
            "fractional" => Self::fractional(n, param),
            "gaussian" | "gaussian-modified" => Self::gaussian_modified(n, param),
            "annulus" => Self::annulus(n, param),
            "bump" => Self::bump(n, param),
            other => Err(Error::Domain(format!("unknown weight preset '{other}'"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Cached `||rho||_{L^1}`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.profile.support_radius()
    }

    pub fn singularity_exponent(&self) -> f64 {
        self.profile.singularity_exponent(self.n)
    }

    /// `rho_hat(r)` including the normalization scale.
    pub fn eval(&self, r: f64) -> f64 {
        self.scale * self.profile.eval(self.n, r)
    }

    pub fn label(&self) -> String {
        if self.scale == 1.0 {
            self.profile.label()
        } else {
            format!("{} x {:.6e}", self.profile.label(), self.scale)
        }
    }

    /// Smallest radius beyond which the (scaled) tail mass is below `threshold`.
    pub fn truncation_radius(&self, threshold: f64) -> Result<f64> {
        if let Some(r) = self.profile.support_radius() {
            return Ok(r);
        }
        let scale = self.scale;
        let bound = |r: f64| self.profile.tail_bound(self.n, r).map(|b| b * scale);
        let mut hi = 1.0;
        let mut tries = 0;
        while !matches!(bound(hi), Some(b) if b < threshold) {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::MissingTailCertificate);
            }
        }
        let mut lo = hi / 2.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if matches!(bound(mid), Some(b) if b < threshold) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Integrates `g(r) rho_hat(r)` over `[lo, hi]` with panels no wider than
    /// `max_panel`, splitting at the profile's breakpoints.
    fn integrate_radial<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64, max_panel: f64) -> Estimate {
        let mut edges = vec![lo];
        for b in self.profile.breakpoints() {
            if b > lo && b < hi {
                edges.push(b);
            }
        }
        edges.push(hi);
        let a = self.singularity_exponent();
        let singular_start = lo == 0.0 && a < 0.0;
        let q = 1.0 / (self.n as f64 + a);
        let tol = Tolerance {
            abs: 1e-16,
            rel: 1e-13,
            max_segments: 200,
        };
        let mut total = Estimate::exact(0.0);
        for win in edges.windows(2) {
            let (p0, p1) = (win[0], win[1]);
            let pieces = ((p1 - p0) / max_panel).ceil().max(1.0) as usize;
            let h = (p1 - p0) / pieces as f64;
            for k in 0..pieces {
                let x0 = p0 + h * k as f64;
                let x1 = if k + 1 == pieces { p1 } else { x0 + h };
                let est = if singular_start && x0 == 0.0 {
                    // r = x1 * u^q, dr = x1 q u^{q-1} du
                    integrate_adaptive(
                        |u: f64| {
                            if u == 0.0 {
                                return 0.0;
                            }
                            let r = x1 * u.powf(q);
                            let jac = x1 * q * u.powf(q - 1.0);
                            g(r) * self.eval(r) * jac
                        },
                        0.0,
                        1.0,
                        tol,
                    )
                } else {
                    integrate_adaptive(|r| g(r) * self.eval(r), x0, x1, tol)
                };
                total = total + est;
            }
        }
        total
    }

    fn mass_integral(&self, from: f64) -> Result<Estimate> {
        let r_max = self.truncation_radius(MASS_TAIL_THRESHOLD * 1e-4)?;
        if from >= r_max {
            return Ok(Estimate::exact(0.0));
        }
        let area = unit_sphere_area(self.n);
        let nm1 = self.n as i32 - 1;
        let est = self.integrate_radial(|r| area * r.powi(nm1), from, r_max, f64::INFINITY);
        let tail = self.profile.tail_bound(self.n, r_max).unwrap_or(0.0) * self.scale;
        Ok(Estimate {
            value: est.value,
            error: est.error + tail,
            converged: est.converged,
        })
    }

    /// Recomputes `int_0^inf n omega_n r^{n-1} rho_hat(r) dr` by quadrature.
    pub fn compute_mass(&self) -> Result<f64> {
        let est = self.mass_integral(0.0)?;
        if !est.converged && est.error > 1e-8 * est.value.abs() {
            return Err(Error::Quadrature {
                value: est.value,
                error: est.error,
            });
        }
        Ok(est.value)
    }

    /// Returns the weight scaled to unit mass.
    pub fn normalize(&self) -> Result<Self> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::DegenerateMass(self.mass));
        }
        Ok(Self {
            n: self.n,
            profile: self.profile.clone(),
            scale: self.scale / self.mass,
            mass: 1.0,
        })
    }

    /// `||rho||_{L^1(R^n \ B_delta)}`.
    pub fn tail(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("tail radius must be positive, got {delta}")));
        }
        Ok(self.mass_integral(delta)?.value)
    }

    /// The multiplier `mu_hat` at a frequency of norm `xi_norm`, with an error estimate.
    /// For weights that are not normalized the value carries the factor `||rho||_1`.
    pub fn mu_hat(&self, xi_norm: f64) -> Result<MultiplierValue> {
        if !(xi_norm >= 0.0) || !xi_norm.is_finite() {
            return Err(Error::Domain(format!("frequency norm must be finite and >= 0, got {xi_norm}")));
        }
        if xi_norm == 0.0 {
            return Ok(MultiplierValue {
                xi: 0.0,
                value: self.mass,
                error: 0.0,
            });
        }
        let r_max = self.truncation_radius(MULTIPLIER_TAIL_THRESHOLD * self.mass)?;
        let n = self.n;
        let order = BesselOrder::half_dimension(n);
        let nf = n as f64;
        let pref = xi_norm.powf(-0.5 * nf);
        let two_pi_xi = 2.0 * PI * xi_norm;
        let bessel_err = std::cell::Cell::new(0.0f64);
        let est = self.integrate_radial(
            |r| {
                let (j, e) = bessel_j_with_error(order, two_pi_xi * r).unwrap_or((f64::NAN, f64::NAN));
                let factor = nf * r.powf(0.5 * nf - 1.0) * pref;
                bessel_err.set(bessel_err.get().max(e * factor.abs()));
                factor * j
            },
            0.0,
            r_max,
            0.25 / xi_norm,
        );
        if !est.value.is_finite() {
            return Err(Error::Quadrature {
                value: est.value,
                error: est.error,
            });
        }
        let tail = self.profile.tail_bound(n, r_max).unwrap_or(0.0) * self.scale;
        // the ball transform is bounded by one, so the mass tail bounds the multiplier tail
        let error = est.error + tail + bessel_err.get() * self.mass_integral(0.0).map(|m| m.value).unwrap_or(1.0);
        Ok(MultiplierValue {
            xi: xi_norm,
            value: est.value,
            error,
        })
    }

    /// Second route to the multiplier: `int_0^inf n omega_n rho_hat(r) r^{n-1} G_r(xi) dr`
    /// integrated against the discrete superposition measure on uniform panels.
    pub fn mu_hat_by_superposition(&self, xi_norm: f64, panels: usize) -> Result<f64> {
        let r_max = self.truncation_radius(MULTIPLIER_TAIL_THRESHOLD * self.mass)?;
        let edges = RadialPanels::uniform(0.0, r_max, panels.max(1));
        let measure = self.superposition_measure(&edges)?;
        let mut acc = 0.0;
        for (&r, &w) in measure.radii.iter().zip(&measure.weights) {
            acc += w * ball_transform(self.n, r, xi_norm)?;
        }
        Ok(acc)
    }

    /// Quadrature weights approximating `n omega_n rho_hat(r) r^{n-1} dr` on the panels
    /// (edges sorted increasingly, refined at the profile's breakpoints).
    pub fn superposition_measure(&self, panels: &RadialPanels) -> Result<SuperpositionMeasure> {
        let mut edges = panels.edges.clone();
        let mut cuts = self.profile.breakpoints();
        cuts.extend(self.profile.support_radius());
        if edges.len() < 2 || edges.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("radial panels need at least two sorted edges".into()));
        }
        let (lo, hi) = (edges[0], edges[edges.len() - 1]);
        for b in cuts {
            if b > lo && b < hi && !edges.contains(&b) {
                edges.push(b);
            }
        }
        edges.sort_by(f64::total_cmp);
        let gl = GaussLegendre::new(panels.order);
        let area = unit_sphere_area(self.n);
        let nm1 = self.n as i32 - 1;
        let a = self.singularity_exponent();
        let q = 1.0 / (self.n as f64 + a);
        let mut radii = Vec::new();
        let mut weights = Vec::new();
        for win in edges.windows(2) {
            let (x0, x1) = (win[0], win[1]);
            if x1 <= x0 {
                continue;
            }
            if x0 == 0.0 && a < 0.0 {
                for (u, wu) in gl.mapped(0.0, 1.0) {
                    let r = x1 * u.powf(q);
                    let jac = x1 * q * u.powf(q - 1.0);
                    radii.push(r);
                    weights.push(wu * jac * area * r.powi(nm1) * self.eval(r));
                }
            } else {
                for (r, wr) in gl.mapped(x0, x1) {
                    radii.push(r);
                    weights.push(wr * area * r.powi(nm1) * self.eval(r));
                }
            }
        }
        Ok(SuperpositionMeasure { radii, weights })
    }

    /// Evaluates `mu_hat` on a grid and reports the minimum and sign changes.
    pub fn positivity_scan(&self, xi_grid: &[f64]) -> Result<PositivityReport> {
        if xi_grid.is_empty() {
            return Err(Error::Domain("frequency grid is empty".into()));
        }
        if xi_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("frequency grid must be sorted".into()));
        }
        let values = xi_grid
            .iter()
            .map(|&xi| self.mu_hat(xi))
            .collect::<Result<Vec<_>>>()?;
        Ok(PositivityReport::from_values(values))
    }
}

/// Multiplier value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierValue {
    pub xi: f64,
    pub value: f64,
    pub error: f64,
}

/// Edges of radial panels together with the Gauss-Legendre order used on each.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPanels {
    pub edges: Vec<f64>,
    pub order: usize,
}

impl RadialPanels {
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Self {
        let count = count.max(1);
        let edges = (0..=count)
            .map(|k| lo + (hi - lo) * k as f64 / count as f64)
            .collect();
        Self { edges, order: 16 }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.max(1);
        self
    }
}

/// Discrete measure `sum_k weights[k] delta_{radii[k]}` on `(0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionMeasure {
    pub radii: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SuperpositionMeasure {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityVerdict {
    PositiveOnGrid,
    ZeroCrossing,
}

impl fmt::Display for PositivityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositivityVerdict::PositiveOnGrid => f.write_str("positivity certificate on grid"),
            PositivityVerdict::ZeroCrossing => f.write_str("zero crossing detected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub values: Vec<MultiplierValue>,
    pub min: f64,
    pub argmin: f64,
    /// Adjacent grid pairs across which `mu_hat` changes sign.
    pub sign_changes: Vec<(f64, f64)>,
    /// Grid points whose value does not exceed its own error bar.
    pub unresolved: usize,
    pub verdict: PositivityVerdict,
}

impl PositivityReport {
    fn from_values(values: Vec<MultiplierValue>) -> Self {
        let (min, argmin) = values
            .iter()
            .fold((f64::INFINITY, f64::NAN), |(m, a), v| {
                if v.value < m {
                    (v.value, v.xi)
                } else {
                    (m, a)
                }
            });
        let sign_changes: Vec<(f64, f64)> = values
            .windows(2)
            .filter(|w| w[0].value.signum() != w[1].value.signum() || w[1].value == 0.0)
            .map(|w| (w[0].xi, w[1].xi))
            .collect();
        let unresolved = values.iter().filter(|v| v.value.abs() <= v.error).count();
        let verdict = if min > 0.0 && sign_changes.is_empty() {
            PositivityVerdict::PositiveOnGrid
        } else {
            PositivityVerdict::ZeroCrossing
        };
        Self {
            values,
            min,
            argmin,
            sign_changes,
            unresolved,
            verdict,
        }
    }
}

/// Concentrating probability families `rho_eps`, each member normalized to unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcentratingFamily {
    /// `1_{[eps, 2 eps]}(|x|)`, normalized.
    Annulus { n: usize },
    /// `|x|^2 G_eps(|x|)`, normalized.
    GaussianModified { n: usize },
    /// Smooth bump of radius `eps`, normalized.
    Bump { n: usize },
    /// `chi_{B_eps}(x) |x|^{s-n}`, normalized.
    Fractional { n: usize, s: f64 },
}

impl ConcentratingFamily {
    pub fn preset(name: &str, n: usize, param: f64) -> Result<Self> {
        match name {
            "annulus" => Ok(Self::Annulus { n }),
            "gaussian" | "gaussian-modified" => Ok(Self::GaussianModified { n }),
            "bump" => Ok(Self::Bump { n }),
            "fractional" => Ok(Self::Fractional { n, s: param }),
            other => Err(Error::Domain(format!("unknown family '{other}'"))),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::Annulus { n } | Self::GaussianModified { n } | Self::Bump { n } | Self::Fractional { n, .. } => n,
        }
    }

    pub fn member(&self, eps: f64) -> Result<RadialWeight> {
        let w = match *self {
            Self::Annulus { n } => RadialWeight::annulus(n, eps)?,
            Self::GaussianModified { n } => RadialWeight::gaussian_modified(n, eps)?,
            Self::Bump { n } => RadialWeight::bump(n, eps)?,
            Self::Fractional { n, s } => RadialWeight::new(n, Profile::Fractional { s, radius: eps })?,
        };
        w.normalize()
    }

    pub fn label(&self) -> String {
        match self {
            Self::Annulus { n } => format!("annulus family (n={n})"),
            Self::GaussianModified { n } => format!("gaussian family (n={n})"),
            Self::Bump { n } => format!("bump family (n={n})"),
            Self::Fractional { n, s } => format!("fractional family (n={n}, s={s})"),
        }
    }
}

/// `omega_n`, re-exported for callers assembling superposition formulas.
pub fn ball_volume(n: usize) -> f64 {
    unit_ball_volume(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_mass_closed_form(n: usize, sigma: f64) -> f64 {
        let nf = n as f64;
        let half = 0.5 * (nf + 2.0);
        unit_sphere_area(n) / (sigma * (2.0 * PI).sqrt())
            * (2.0 * sigma * sigma).powf(half)
            * libm::tgamma(half)
            / 2.0
    }

    #[test]
    fn annulus_mass_is_one_in_1d() {
        let w = RadialWeight::annulus(1, 0.1).unwrap();
        assert!((w.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fractional_mass() {
        let w = RadialWeight::fractional(1, 0.5).unwrap();
        assert!((w.mass() - 4.0).abs() < 1e-10, "{}", w.mass());
        for n in 1..=3 {
            for s in [0.1, 0.5, 0.9] {
                let w = RadialWeight::fractional(n, s).unwrap();
                let exact = unit_sphere_area(n) / s;
                assert!((w.mass() - exact).abs() < 1e-9 * exact, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn gaussian_mass_matches_gamma_integral() {
        for n in 1..=3 {
            for sigma in [0.05, 0.5, 2.0] {
                let w = RadialWeight::gaussian_modified(n, sigma).unwrap();
                let exact = gaussian_mass_closed_form(n, sigma);
                assert!((w.mass() - exact).abs() < 1e-9 * exact, "n={n} sigma={sigma}");
            }
        }
    }

    #[test]
    fn normalization() {
        let w = RadialWeight::fractional(1, 0.5).unwrap().normalize().unwrap();
        assert!((w.scale() - 0.25).abs() < 1e-12);
        assert!((w.compute_mass().unwrap() - 1.0).abs() < 1e-10);
        let g = RadialWeight::gaussian_modified(2, 0.7).unwrap().normalize().unwrap();
        assert_eq!(g.mass(), 1.0);
        assert!((g.compute_mass().unwrap() - 1.0).abs() < 1e-10);
        let a = RadialWeight::annulus(1, 0.1).unwrap();
        let b = a.normalize().unwrap();
        assert!((a.eval(0.15) - b.eval(0.15)).abs() < 1e-12);
    }

    #[test]
    fn tails() {
        let w = RadialWeight::annulus(1, 0.1).unwrap();
        assert_eq!(w.tail(0.3).unwrap(), 0.0);
        assert!((w.tail(0.15).unwrap() - 0.5).abs() < 1e-12);
        assert!((w.tail(1e-12).unwrap() - w.mass()).abs() < 1e-12);
        let f = RadialWeight::fractional(2, 0.5).unwrap();
        let delta: f64 = 1e-6;
        let exact = unit_sphere_area(2) * (1.0 - delta.sqrt()) / 0.5;
        assert!((f.tail(delta).unwrap() - exact).abs() < 1e-10);
        assert!(w.tail(0.0).is_err());
    }

    #[test]
    fn invalid_weights_are_rejected() {
        assert!(RadialWeight::fractional(1, 1.5).is_err());
        assert!(RadialWeight::annulus(1, -0.1).is_err());
        let bad = Profile::Custom(CustomProfile {
            name: "too singular".into(),
            f: Arc::new(|r: f64| r.powf(-2.5)),
            support_radius: 1.0,
            singularity_exponent: -2.5,
            breakpoints: vec![],
        });
        assert!(matches!(RadialWeight::new(2, bad), Err(Error::NonIntegrable { .. })));
        let negative = Profile::Custom(CustomProfile {
            name: "negative".into(),
            f: Arc::new(|r: f64| r - 0.5),
            support_radius: 1.0,
            singularity_exponent: 0.0,
            breakpoints: vec![],
        });
        assert!(RadialWeight::new(1, negative).is_err());
    }

    #[test]
    fn mu_hat_is_one_at_origin_for_normalized_weights() {
        for w in [
            RadialWeight::fractional(2, 0.5).unwrap(),
            RadialWeight::gaussian_modified(1, 1.0).unwrap(),
            RadialWeight::annulus(1, 0.2).unwrap(),
            RadialWeight::bump(3, 0.5).unwrap(),
        ] {
            assert_eq!(w.normalize().unwrap().mu_hat(0.0).unwrap().value, 1.0);
        }
    }

    #[test]
    fn annulus_multiplier_matches_sinc_average() {
        // n = 1: mu_hat(xi) = (1/eps) int_eps^{2eps} sin(2 pi r xi) / (2 pi r xi) dr
        let eps = 0.3;
        let w = RadialWeight::annulus(1, eps).unwrap();
        for xi in [0.5, 1.0, 3.0, 7.5] {
            let gl = GaussLegendre::new(40);
            let exact = gl.integrate(|r| (2.0 * PI * r * xi).sin() / (2.0 * PI * r * xi), eps, 2.0 * eps) / eps;
            let got = w.mu_hat(xi).unwrap();
            assert!((got.value - exact).abs() < 1e-11, "xi={xi}: {got:?} vs {exact}");
            assert!(got.error < 1e-8);
        }
    }

    #[test]
    fn gaussian_multiplier_is_a_gaussian_in_this_convention() {
        // mu_rho is the centered Gaussian of variance sigma^2 per axis, so
        // mu_hat(xi) = exp(-2 pi^2 sigma^2 |xi|^2) for e^{-2 pi i x . xi} transforms
        for n in 1..=3 {
            let sigma = 0.3;
            let w = RadialWeight::gaussian_modified(n, sigma).unwrap().normalize().unwrap();
            for xi in [0.25, 0.5, 1.0, 1.5] {
                let exact = (-2.0 * PI * PI * sigma * sigma * xi * xi).exp();
                let got = w.mu_hat(xi).unwrap();
                assert!((got.value - exact).abs() < 1e-10, "n={n} xi={xi}: {} vs {exact}", got.value);
            }
        }
    }

    #[test]
    fn two_multiplier_routes_agree() {
        for w in [
            RadialWeight::bump(2, 0.6).unwrap().normalize().unwrap(),
            RadialWeight::gaussian_modified(3, 0.2).unwrap().normalize().unwrap(),
            RadialWeight::fractional(1, 0.5).unwrap().normalize().unwrap(),
        ] {
            for xi in [0.3, 1.0, 2.7] {
                let a = w.mu_hat(xi).unwrap().value;
                let b = w.mu_hat_by_superposition(xi, 200).unwrap();
                assert!((a - b).abs() < 1e-6, "{}: xi={xi}: {a} vs {b}", w.label());
            }
        }
    }

    #[test]
    fn superposition_measure_sums_to_mass() {
        let w = RadialWeight::annulus(1, 0.1).unwrap();
        let m = w.superposition_measure(&RadialPanels::uniform(0.0, 0.5, 7)).unwrap();
        assert!((m.total() - w.mass()).abs() < 1e-8, "{} {}", m.total(), w.mass());
        for (&r, &wt) in m.radii.iter().zip(&m.weights) {
            if wt != 0.0 {
                assert!((0.1..=0.2).contains(&r), "r={r} w={wt}");
            }
        }
        let f = RadialWeight::fractional(2, 0.3).unwrap();
        let mf = f.superposition_measure(&RadialPanels::uniform(0.0, 1.0, 10)).unwrap();
        assert!((mf.total() - f.mass()).abs() < 1e-8 * f.mass());
    }

    #[test]
    fn heaviside_superposition_is_linear_near_origin() {
        // spherical gradient of |t| at radius r is t / r for |t| < r
        let eps = 0.05;
        let w = RadialWeight::annulus(1, eps).unwrap();
        let m = w.superposition_measure(&RadialPanels::uniform(0.0, 3.0 * eps, 9)).unwrap();
        for t in [-eps, -0.3 * eps, 0.0, 0.8 * eps] {
            let v: f64 = m.radii.iter().zip(&m.weights).map(|(&r, &wt)| wt * (t / r).clamp(-1.0, 1.0)).sum();
            assert!((v - t / eps * 2f64.ln()).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn positivity_scans() {
        let g = RadialWeight::gaussian_modified(1, 0.2).unwrap().normalize().unwrap();
        let grid: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
        let rep = g.positivity_scan(&grid).unwrap();
        assert_eq!(rep.verdict, PositivityVerdict::PositiveOnGrid);
        assert!(rep.min > 0.0 && rep.sign_changes.is_empty());

        let a = RadialWeight::annulus(1, 1.0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|k| 0.05 * k as f64).collect();
        let rep = a.positivity_scan(&grid).unwrap();
        assert_eq!(rep.verdict, PositivityVerdict::ZeroCrossing);
        assert!(!rep.sign_changes.is_empty());

        assert!(g.positivity_scan(&[]).is_err());
        assert!(g.positivity_scan(&[1.0, 0.5]).is_err());
    }

    #[test]
    fn families_have_unit_mass_and_vanishing_tails() {
        for fam in [
            ConcentratingFamily::Annulus { n: 1 },
            ConcentratingFamily::GaussianModified { n: 2 },
            ConcentratingFamily::Bump { n: 3 },
            ConcentratingFamily::Fractional { n: 1, s: 0.5 },
        ] {
            for delta in [0.05, 0.2] {
                let mut last = f64::INFINITY;
                for eps in [0.1, 0.03, 0.01, 0.003] {
                    let w = fam.member(eps).unwrap();
                    assert!((w.compute_mass().unwrap() - 1.0).abs() < 1e-9, "{}", fam.label());
                    let t = w.tail(delta).unwrap();
                    assert!(t <= last + 1e-12);
                    last = t;
                }
                assert!(last < 1e-6, "{} delta={delta}: {last}", fam.label());
            }
        }
    }
}
