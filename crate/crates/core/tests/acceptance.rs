//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are checked literally and are expected
//! to print FAIL; the README explains why. The process fails if any other
//! criterion fails, or if a known-unattainable one unexpectedly passes.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use nonlocal_core::fields::{
    apply_local, apply_radial_direct, apply_radial_spectral, apply_spherical_direct, apply_spherical_spectral,
    kernel_check_torus, kernel_witness, localization_table, lp_norm, KernelStatus, TorusField, TrigPolynomial,
};
use nonlocal_core::measures::{
    area_convergence_table, area_vs_l1, dirac_spherical_scenario, gauss_green_check, linf_gap, radial_smooth_scenario,
    AreaIntegrand, LineMeasure, LinfGap, PiecewiseSmooth,
};
use nonlocal_core::operator::{FirstOrderOperator, PRESETS};
use nonlocal_core::special::{ball_transform, bessel_j, BesselOrder};
use nonlocal_core::weights::{ConcentratingFamily, PositivityVerdict, RadialWeight};
use nonlocal_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_UNATTAINABLE: [usize; 2] = [6, 9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rel_l2(a: &TorusField, b: &TorusField) -> Result<f64> {
    let d = lp_norm(&a.sub(b)?, 2.0)?;
    let r = lp_norm(b, 2.0)?;
    Ok(if r == 0.0 { d } else { d / r })
}

fn criterion_1() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for name in PRESETS {
        for n in 1..=3 {
            let Ok(op) = FirstOrderOperator::preset(name, n) else { continue };
            for order in [64, 128] {
                worst = worst.max(op.cancellation_residual(order)?);
                checked += 1;
            }
        }
    }
    outcome(worst < 1e-10, format!("max residual {worst:.3e} over {checked} (preset, n, order) cases"))
}

fn criterion_2() -> Result<Outcome> {
    let half = BesselOrder::new(0.5)?;
    let mut worst: f64 = 0.0;
    for k in 0..=4990 {
        let t = 0.1 + 0.01 * k as f64;
        let exact = (2.0 / (PI * t)).sqrt() * t.sin();
        worst = worst.max((bessel_j(half, t)? - exact).abs());
    }
    outcome(worst < 1e-9, format!("max |J_1/2 - closed form| = {worst:.3e}"))
}

fn criterion_3() -> Result<Outcome> {
    let mut at_zero: f64 = 0.0;
    for n in 1..=3 {
        for r in [0.1, 0.5, 1.0, 3.0] {
            at_zero = at_zero.max((ball_transform(n, r, 0.0)? - 1.0).abs());
        }
    }
    let mut sinc: f64 = 0.0;
    for r in [0.5, 1.0] {
        for k in 0..=2000 {
            let xi = 0.01 * k as f64;
            let arg = 2.0 * PI * r * xi;
            let exact = if arg == 0.0 { 1.0 } else { arg.sin() / arg };
            sinc = sinc.max((ball_transform(1, r, xi)? - exact).abs());
        }
    }
    outcome(
        at_zero < 1e-12 && sinc < 1e-10,
        format!("|G(0) - 1| = {at_zero:.3e}, max sinc deviation {sinc:.3e}"),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_spherical: f64 = 0.0;
    for k in 0..20 {
        let n = 1 + k % 2;
        let op = if n == 1 { FirstOrderOperator::derivative() } else { FirstOrderOperator::gradient(2) };
        let u = TrigPolynomial::random(&mut rng, n, 1, 4, 5)?.sample(64)?;
        let s = rng.gen_range(0.05..0.4);
        let spectral = apply_spherical_spectral(&op, &u, s)?;
        let direct = apply_spherical_direct(&op, &u, s, 128)?;
        worst_spherical = worst_spherical.max(rel_l2(&direct, &spectral)?);
    }
    let mut worst_radial: f64 = 0.0;
    let weights = [
        RadialWeight::gaussian_modified(1, 0.1)?.normalize()?,
        RadialWeight::bump(1, 0.25)?.normalize()?,
        RadialWeight::bump(2, 0.25)?.normalize()?,
    ];
    for w in &weights {
        let n = w.dim();
        let op = if n == 1 { FirstOrderOperator::derivative() } else { FirstOrderOperator::gradient(2) };
        let u = TrigPolynomial::random(&mut rng, n, 1, 3, 4)?.sample(64)?;
        let spectral = apply_radial_spectral(&op, &u, w)?;
        let direct = apply_radial_direct(&op, &u, w, 1e-7)?;
        worst_radial = worst_radial.max(rel_l2(&direct, &spectral)?);
    }
    outcome(
        worst_spherical < 1e-6 && worst_radial < 1e-4,
        format!("spherical rel L2 {worst_spherical:.3e} (20 fields), radial rel L2 {worst_radial:.3e} (truncation 1e-7)"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ps = [1.0, 2.0, f64::INFINITY];
    let weights: Vec<Vec<RadialWeight>> = (1..=2)
        .map(|n| -> Result<Vec<RadialWeight>> {
            Ok(vec![
                RadialWeight::gaussian_modified(n, 0.1)?.normalize()?,
                RadialWeight::bump(n, 0.25)?.normalize()?,
            ])
        })
        .collect::<Result<_>>()?;
    let mut worst_ratio: f64 = 0.0;
    for k in 0..100 {
        let n = 1 + k % 2;
        let (op, comps) = match (n, k % 4) {
            (1, _) => (FirstOrderOperator::derivative(), 1),
            (_, 1) => (FirstOrderOperator::gradient(2), 1),
            _ => (FirstOrderOperator::divergence(2), 2),
        };
        let u = TrigPolynomial::random(&mut rng, n, comps, 4, 6)?.sample(64)?;
        let local = apply_local(&op, &u)?;
        let mut outputs = Vec::new();
        for s in [0.3, 0.1] {
            outputs.push((1.0, apply_spherical_spectral(&op, &u, s)?));
        }
        for w in &weights[n - 1] {
            outputs.push((w.mass(), apply_radial_spectral(&op, &u, w)?));
        }
        for p in ps {
            let bound = lp_norm(&local, p)?;
            for (mass, v) in &outputs {
                worst_ratio = worst_ratio.max(lp_norm(v, p)? / (mass * bound));
            }
        }
    }
    outcome(
        worst_ratio <= 1.0 + 1e-8,
        format!("max ||nonlocal||_p / (||rho||_1 ||local||_p) = {worst_ratio:.12} over 100 fields"),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let op = FirstOrderOperator::derivative();
    // at eps = 0.01 the annulus multiplier is 1 - 1.5e-3 m^2 + ..., so the 1% norm
    // check needs |m| <= 2
    let u = TrigPolynomial::random(&mut rng, 1, 1, 2, 4)?.sample(64)?;
    let family = ConcentratingFamily::Annulus { n: 1 };
    let table = localization_table(&op, &u, &family, 2.0, &[0.05, 0.025, 0.0125, 0.00625])?;
    let ratios = table.ratios();
    let ratios_ok = ratios.iter().all(|r| (0.4..=0.6).contains(r));
    let at_001 = localization_table(&op, &u, &family, 2.0, &[0.01])?;
    let norm_gap = at_001.final_norm_gap().unwrap_or(f64::INFINITY);
    let formatted: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        ratios_ok && norm_gap < 0.01,
        format!(
            "ratios err(eps/2)/err(eps) = [{}] (band [0.4, 0.6]), norm gap at eps=0.01 = {norm_gap:.3e}",
            formatted.join(", ")
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let op = FirstOrderOperator::derivative();
    let w = kernel_witness(&op, 0.5, &[1], &[1.0])?;
    let witness_ok = w.spherical_sup < 1e-10 && (w.local_sup - 2.0 * PI).abs() < 1e-6;
    let report = kernel_check_torus(&op, 1.0, 4)?;
    let all_flagged = report.entries.len() == 8 && report.entries.iter().all(|e| e.status == KernelStatus::Flagged);
    outcome(
        witness_ok && all_flagged,
        format!(
            "||A_s u||_inf = {:.3e}, ||A u||_inf - 2 pi = {:.3e}; s=1: {}",
            w.spherical_sup,
            w.local_sup - 2.0 * PI,
            report.verdict()
        ),
    )
}

fn criterion_8() -> Result<Outcome> {
    let mut gaps = Vec::new();
    let mut worst_interior: f64 = 0.0;
    let mu = LineMeasure::from_density_fn(-1.0, 1.0, 2000, 1, |x, o| o[0] = x.signum())?;
    for eps in [0.1, 0.01] {
        gaps.push(linf_gap(eps)?.gap);
        let w = ConcentratingFamily::Annulus { n: 1 }.member(eps)?;
        for k in 1..10 {
            for t in [eps * k as f64 / 10.0, -eps * k as f64 / 10.0] {
                let exact = t / eps * LN_2;
                worst_interior = worst_interior.max((mu.radial_of_measure(&w, t)?[0] - exact).abs());
            }
        }
    }
    let gaps_ok = gaps.iter().all(|g| *g >= LinfGap::LOWER_BOUND - 1e-9);
    outcome(
        gaps_ok && worst_interior < 1e-8,
        format!(
            "gaps {:.6} (eps=0.1), {:.6} (eps=0.01) vs bound {:.7}; interior deviation {worst_interior:.3e}",
            gaps[0],
            gaps[1],
            LinfGap::LOWER_BOUND
        ),
    )
}

fn criterion_9() -> Result<Outcome> {
    let xi_list: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64).collect();
    let mut worst_spread: f64 = 0.0;
    let mut positive = true;
    let mut min_value = f64::INFINITY;
    for sigma in [0.5, 1.0, 2.0] {
        let w = RadialWeight::gaussian_modified(1, sigma)?.normalize()?;
        let ratios: Vec<f64> = xi_list
            .iter()
            .map(|&xi| Ok(w.mu_hat(xi)?.value / ball_transform(1, 1.0 / sigma, xi)?))
            .collect::<Result<_>>()?;
        let first = ratios[0];
        let spread = ratios
            .iter()
            .map(|r| if first == 0.0 || !r.is_finite() { f64::INFINITY } else { (r - first).abs() / first.abs() })
            .fold(0.0, f64::max);
        worst_spread = if spread.is_nan() { f64::INFINITY } else { worst_spread.max(spread) };
        let scan = w.positivity_scan(&xi_list)?;
        min_value = min_value.min(scan.min);
        positive &= scan.verdict == PositivityVerdict::PositiveOnGrid;
    }
    outcome(
        worst_spread < 1e-4 && positive,
        format!("max relative spread of the ratio {worst_spread:.3e} (needs < 1e-4); positivity min {min_value:.3e}"),
    )
}

fn criterion_10() -> Result<Outcome> {
    let mut worst_origin: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    for n in 1..=3 {
        for (name, param) in [("fractional", 0.5), ("gaussian", 0.3), ("annulus", 0.2), ("bump", 0.5)] {
            let w = RadialWeight::preset(name, n, param)?.normalize()?;
            worst_origin = worst_origin.max((w.mu_hat(0.0)?.value - 1.0).abs());
            worst_mass = worst_mass.max((w.compute_mass()? - 1.0).abs());
        }
    }
    let mut decay_ok = true;
    let mut detail = String::new();
    for n in 1..=3 {
        let w = RadialWeight::bump(n, 1.0)?.normalize()?;
        let sup = |lo: f64, hi: f64, count: usize| -> Result<f64> {
            (0..=count).try_fold(0.0f64, |m, k| {
                let xi = lo + (hi - lo) * k as f64 / count as f64;
                Ok(m.max(w.mu_hat(xi)?.value.abs()))
            })
        };
        let low = sup(1.0, 2.0, 40)?;
        let high = sup(50.0, 100.0, 200)?;
        decay_ok &= high < low;
        detail.push_str(&format!(" n={n}: {high:.2e} < {low:.2e};"));
    }
    outcome(
        worst_origin < 1e-8 && worst_mass < 1e-8 && decay_ok,
        format!("|mu_hat(0) - 1| = {worst_origin:.1e}, |mass - 1| = {worst_mass:.1e}; bump decay{detail}"),
    )
}

fn criterion_11() -> Result<Outcome> {
    let dirac = LineMeasure::dirac(-1.0, 1.0, 2000, 0.0)?;
    let s_list = [0.1, 0.05, 0.025];
    let rows = area_convergence_table(&dirac, &AreaIntegrand::area(), &s_list)?;
    let mut worst: f64 = 0.0;
    for r in &rows {
        let closed = (4.0 * r.s * r.s + 1.0).sqrt() + (2.0 - 2.0 * r.s) - 3.0;
        worst = worst.max((r.gap + closed).abs());
    }
    let monotone = rows.windows(2).all(|w| w[1].gap < w[0].gap);
    let (seq, limit) = radial_smooth_scenario(&[0.1, 0.05, 0.025], 400)?;
    let smooth = area_vs_l1(&seq, &limit, &AreaIntegrand::area())?;
    let (seq, limit) = dirac_spherical_scenario(&[0.1, 0.05, 0.025], 400)?;
    let atomic = area_vs_l1(&seq, &limit, &AreaIntegrand::area())?;
    outcome(
        worst < 1e-10 && monotone && smooth.pass() && atomic.pass(),
        format!(
            "closed-form deviation {worst:.3e}, gaps {:.4} {:.4} {:.4}; area_vs_l1 smooth={} atomic={}",
            rows[0].gap,
            rows[1].gap,
            rows[2].gap,
            if smooth.pass() { "PASS" } else { "FAIL" },
            if atomic.pass() { "PASS" } else { "FAIL" }
        ),
    )
}

fn criterion_12() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let heaviside = PiecewiseSmooth::heaviside();
    let smooth = TrigPolynomial::random(&mut rng, 1, 1, 5, 6)?.sample(64)?;
    let jumps = vec![(0.3, 1.5), (-0.45, -0.7)];
    let mixed = PiecewiseSmooth::new(Some(&smooth), jumps.clone())?;
    let clear = |x: f64, s: f64, cuts: &[f64]| cuts.iter().all(|c| (x - s - c).abs() > 1e-6 && (x + s - c).abs() > 1e-6);
    let mut worst_h: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    let mut pairs = 0;
    while pairs < 100 {
        let x = rng.gen_range(-1.0..1.0);
        let s = rng.gen_range(0.01..0.8);
        if !clear(x, s, &[0.0, 0.3, -0.45]) {
            continue;
        }
        worst_h = worst_h.max(gauss_green_check(&heaviside, s, x)?);
        worst_t = worst_t.max(gauss_green_check(&mixed, s, x)?);
        pairs += 1;
    }
    outcome(
        worst_h < 1e-10 && worst_t < 1e-8,
        format!("Heaviside residual {worst_h:.3e}, trig sample with jumps {worst_t:.3e} over {pairs} pairs"),
    )
}

type Criterion = (usize, fn() -> Result<Outcome>, Duration);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(1)),
        (3, criterion_3, Duration::from_secs(1)),
        (4, criterion_4, Duration::from_secs(30)),
        (5, criterion_5, Duration::from_secs(60)),
        (6, criterion_6, Duration::from_secs(10)),
        (7, criterion_7, Duration::from_secs(1)),
        (8, criterion_8, Duration::from_secs(1)),
        (9, criterion_9, Duration::from_secs(5)),
        (10, criterion_10, Duration::from_secs(5)),
        (11, criterion_11, Duration::from_secs(5)),
        (12, criterion_12, Duration::from_secs(1)),
    ];
    let mut unexpected = Vec::new();
    for (id, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable, see README)",
            (false, false) => "FAIL",
        };
        println!(
            "{tag} criterion {id:>2}: {detail} [{:.3} s, budget {} s]",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
