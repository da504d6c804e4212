//! Bessel functions of the first kind, their positive zeros, and the Fourier
//! transform of the normalized ball indicator.
//!
//! `J_alpha` is evaluated by one of three branches:
//!
//! * ascending series for `t < max(8, 2 alpha)`,
//! * Hankel asymptotic expansion for `t > 30 + alpha^2`,
//! * the Poisson integral otherwise, written with `s = sin(theta)` as
//!   `J_alpha(t) = (t/2)^alpha / (Gamma(alpha + 1/2) sqrt(pi)) * 2 * int_0^{pi/2} cos(t sin theta) cos^{2 alpha} theta dtheta`
//!   and integrated adaptively.
//!
//! Every branch reports an absolute error estimate next to the value.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, Tolerance};

/// Nonnegative real order of a Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!("Bessel order must be >= 0, got {alpha}")))
        }
    }

    /// The order `n / 2` attached to balls in `R^n`.
    pub fn half_dimension(n: usize) -> Self {
        Self(n as f64 / 2.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which evaluation branch [`bessel_j`] picks for a given argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselBranch {
    Series,
    Poisson,
    Asymptotic,
}

pub fn branch_for(alpha: BesselOrder, t: f64) -> BesselBranch {
    let a = alpha.0;
    if t < (2.0 * a).max(8.0) {
        BesselBranch::Series
    } else if t > 30.0 + a * a {
        BesselBranch::Asymptotic
    } else {
        BesselBranch::Poisson
    }
}

/// `J_alpha(t)` with absolute error below `1e-10` on `[0, 1e3]`.
pub fn bessel_j(alpha: BesselOrder, t: f64) -> Result<f64> {
    bessel_j_with_error(alpha, t).map(|(v, _)| v)
}

/// `J_alpha(t)` together with an absolute error estimate of the chosen branch.
pub fn bessel_j_with_error(alpha: BesselOrder, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {t}")));
    }
    Ok(match branch_for(alpha, t) {
        BesselBranch::Series => bessel_j_series(alpha, t),
        BesselBranch::Poisson => bessel_j_poisson(alpha, t),
        BesselBranch::Asymptotic => bessel_j_asymptotic(alpha, t),
    })
}

/// Ascending series `sum_k (-1)^k (t/2)^{2k+alpha} / (k! Gamma(k + alpha + 1))`.
pub fn bessel_j_series(alpha: BesselOrder, t: f64) -> (f64, f64) {
    let a = alpha.0;
    if t == 0.0 {
        return (if a == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let half = 0.5 * t;
    let mut term = (a * half.ln() - libm::lgamma(a + 1.0)).exp();
    let q = -half * half;
    let mut sum = term;
    let mut largest = term.abs();
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + a));
        sum += term;
        largest = largest.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > half {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    // cancellation in the alternating sum dominates the rounding error
    (sum, 4.0 * f64::EPSILON * largest * (1.0 + k.sqrt()))
}

/// Poisson integral branch, valid for every `t >= 0`.
pub fn bessel_j_poisson(alpha: BesselOrder, t: f64) -> (f64, f64) {
    let a = alpha.0;
    if t == 0.0 {
        return (if a == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let two_a = 2.0 * a;
    let integrand = |theta: f64| {
        let c = theta.cos().max(0.0);
        let w = if two_a == 0.0 { 1.0 } else { c.powf(two_a) };
        (t * theta.sin()).cos() * w
    };
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-14,
        max_segments: 4000,
    };
    let est = integrate_adaptive(integrand, 0.0, 0.5 * PI, tol);
    let log_pref = a * (0.5 * t).ln() - libm::lgamma(a + 0.5) - 0.5 * PI.ln();
    let pref = 2.0 * log_pref.exp();
    let value = pref * est.value;
    (value, pref * est.error + 4.0 * f64::EPSILON * value.abs())
}

/// Hankel expansion `sqrt(2/(pi t)) (P cos chi - Q sin chi)`, `chi = t - (alpha/2 + 1/4) pi`.
pub fn bessel_j_asymptotic(alpha: BesselOrder, t: f64) -> (f64, f64) {
    let a = alpha.0;
    let mu = 4.0 * a * a;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut c = 1.0_f64;
    let mut k = 0usize;
    let last_err = loop {
        k += 1;
        let odd = (2 * k - 1) as f64;
        let next = c * (mu - odd * odd) / (8.0 * k as f64 * t);
        if next.abs() >= c.abs() && k > 1 {
            // asymptotic series started to diverge
            break c.abs();
        }
        c = next;
        match k % 4 {
            1 => q += c,
            2 => p -= c,
            3 => q -= c,
            _ => p += c,
        }
        if c.abs() < 1e-17 || k > 200 {
            break c.abs();
        }
    };
    let chi = t - (0.5 * a + 0.25) * PI;
    let amp = (2.0 / (PI * t)).sqrt();
    let value = amp * (p * chi.cos() - q * chi.sin());
    // the phase is reduced modulo 2 pi inside cos/sin: relative rounding of t matters
    let phase_err = t * f64::EPSILON;
    (value, amp * (last_err + phase_err) + 2.0 * f64::EPSILON * value.abs())
}

/// The `k`-th positive zero of `J_alpha` (`k >= 1`), bracketed on a grid of step
/// `pi / 4` starting at `max(alpha, 1)` and refined by bisection.
pub fn bessel_zero(alpha: BesselOrder, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    let step = 0.25 * PI;
    let mut lo = alpha.0.max(1.0);
    let mut f_lo = bessel_j(alpha, lo)?;
    let mut found = 0usize;
    loop {
        let hi = lo + step;
        let f_hi = bessel_j(alpha, hi)?;
        if f_hi == 0.0 {
            found += 1;
            if found == k {
                return Ok(hi);
            }
            // step past the exact zero so it is not counted twice
            lo = hi + 1e-9;
            f_lo = bessel_j(alpha, lo)?;
            continue;
        }
        if f_lo.signum() != f_hi.signum() && f_lo != 0.0 {
            found += 1;
            if found == k {
                return bisect(alpha, lo, hi, f_lo);
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
}

fn bisect(alpha: BesselOrder, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-14 * hi {
            break;
        }
        let f_mid = bessel_j(alpha, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `omega_n = |B_1| = pi^{n/2} / Gamma(n/2 + 1)`, by the recursion `omega_n = 2 pi / n * omega_{n-2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    let (mut v, mut k) = if n % 2 == 0 { (1.0, 0) } else { (2.0, 1) };
    while k < n {
        k += 2;
        v *= 2.0 * PI / k as f64;
    }
    v
}

/// Surface measure of the unit sphere, `n * omega_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

const SERIES_SWITCH: f64 = 1e-3;

/// Fourier transform of `1_{B_r} / |B_r|` at a frequency of norm `xi_norm`:
/// `omega_n^{-1} |r xi|^{-n/2} J_{n/2}(2 pi r |xi|)`, equal to one at the origin.
pub fn ball_transform(n: usize, r: f64, xi_norm: f64) -> Result<f64> {
    ball_transform_with_error(n, r, xi_norm).map(|(v, _)| v)
}

pub fn ball_transform_with_error(n: usize, r: f64, xi_norm: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("ball radius must be positive, got {r}")));
    }
    if !(xi_norm >= 0.0) {
        return Err(Error::Domain(format!("frequency norm must be >= 0, got {xi_norm}")));
    }
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let alpha = n as f64 / 2.0;
    let x = 2.0 * PI * r * xi_norm;
    if x < SERIES_SWITCH {
        // Gamma(alpha + 1) (2/x)^alpha J_alpha(x), series with the leading 1 factored out
        let q = -0.25 * x * x;
        let mut term = 1.0_f64;
        let mut sum = 1.0;
        let mut k = 0.0;
        while term.abs() > 1e-18 {
            k += 1.0;
            term *= q / (k * (k + alpha));
            sum += term;
        }
        return Ok((sum, f64::EPSILON));
    }
    let (j, err) = bessel_j_with_error(BesselOrder(alpha), x)?;
    let scale = (r * xi_norm).powf(-alpha) / unit_ball_volume(n);
    Ok((scale * j, scale * err))
}
