use std::time::Instant;

use nonlocal_core::fields::{
    apply_radial_direct, apply_radial_spectral, apply_spherical_direct, apply_spherical_spectral, kernel_check_torus,
    kernel_witness_on_grid, localization_table, lp_norm, LocalizationTable, TorusField, TrigPolynomial,
    INCONCLUSIVE_THRESHOLD, ZERO_THRESHOLD,
};
use nonlocal_core::measures::{
    area_convergence_table, area_vs_l1, atomic_divergence_demo, default_atomic_probes, dirac_spherical_scenario,
    gauss_green_check, linf_gap, radial_smooth_scenario, LinfGap, PiecewiseSmooth, RECESSION_RAY,
};
use nonlocal_core::special::{bessel_j_with_error, bessel_zero, branch_for, BesselOrder};
use nonlocal_core::weights::{MASS_TAIL_THRESHOLD, MULTIPLIER_TAIL_THRESHOLD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{check_decreasing, linspace, ExperimentConfig};
use crate::error::CliError;
use crate::report::{num, Report};

fn rel_l2(a: &TorusField, b: &TorusField) -> Result<f64, CliError> {
    let d = lp_norm(&a.sub(b)?, 2.0)?;
    let r = lp_norm(b, 2.0)?;
    Ok(if r == 0.0 { d } else { d / r })
}

fn weight_notes(r: &mut Report) {
    r.note("tolerance.mass_tail", format!("{:e}", MASS_TAIL_THRESHOLD));
    r.note("tolerance.multiplier_tail", format!("{:e}", MULTIPLIER_TAIL_THRESHOLD));
    r.note("quadrature.radial", "adaptive Gauss-Kronrod 7/15 on panels of width <= 1/(4 xi)");
}

pub fn localize(cfg: &ExperimentConfig, seed: u64) -> Result<Report, CliError> {
    let eps_list = &cfg.sweep.eps_list;
    check_decreasing("sweep.eps_list", eps_list)?;
    let p = cfg.sweep.p;
    if !(p >= 1.0) {
        return Err(CliError::Config(format!("sweep.p must be >= 1, got {p}")));
    }
    let op = cfg.operator()?;
    let family = cfg.family(op.dim())?;
    let u = cfg.field(&op, seed)?;
    let parts = eps_list
        .par_iter()
        .map(|&eps| localization_table(&op, &u, &family, p, &[eps]))
        .collect::<Result<Vec<_>, _>>()?;
    let table = LocalizationTable {
        p,
        local_norm: parts[0].local_norm,
        rows: parts.iter().flat_map(|t| t.rows.iter().copied()).collect(),
    };
    let mut r = Report::new("localize", &["eps", "error", "norm"]);
    r.note("operator", op.name());
    r.note("family", family.label());
    r.note("grid", u.grid());
    r.note("p", p);
    r.note("local_norm", num(table.local_norm));
    weight_notes(&mut r);
    for row in &table.rows {
        r.rows.push(vec![num(row.eps), num(row.error), num(row.norm)]);
    }
    let gap = table.final_norm_gap().unwrap_or(f64::NAN);
    r.pass = table.errors_non_increasing(1e-6);
    r.verdict = if r.pass {
        format!("errors non-increasing along eps_list; final relative norm gap {gap:.3e}")
    } else {
        "localization error increased along eps_list".into()
    };
    Ok(r)
}

pub fn multiplier(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let w = cfg.weight(cfg.operator.n)?;
    let s = &cfg.sweep;
    let grid = linspace("sweep.xi", s.xi_min, s.xi_max, s.xi_count)?;
    let scan = w.positivity_scan(&grid)?;
    let mut r = Report::new("multiplier", &["xi", "mu_hat", "est_error"]);
    r.note("weight", w.label());
    r.note("mass", num(w.mass()));
    weight_notes(&mut r);
    let mut bounded = true;
    for v in &scan.values {
        bounded &= v.value.abs() <= w.mass() + v.error + 1e-12;
        r.rows.push(vec![num(v.xi), num(v.value), num(v.error)]);
    }
    r.pass = bounded;
    r.verdict = format!(
        "{}; min {:.6e} at xi = {}; {} sign change(s); {} unresolved",
        scan.verdict,
        scan.min,
        scan.argmin,
        scan.sign_changes.len(),
        scan.unresolved
    );
    if !bounded {
        r.verdict.push_str("; |mu_hat| exceeds the mass");
    }
    Ok(r)
}

pub fn kernel_check(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let op = cfg.operator()?;
    let k = &cfg.kernel;
    let report = kernel_check_torus(&op, k.s, k.budget)?;
    let mut header: Vec<String> = (1..=op.dim()).map(|i| format!("m{i}")).collect();
    header.extend(["mode_norm", "rank", "bessel", "bessel_error", "status"].map(String::from));
    let mut r = Report::new("kernel-check", &[]);
    r.header = header;
    r.note("operator", op.name());
    r.note("s", k.s);
    r.note("budget", k.budget);
    r.note("tolerance.zero", format!("{:e}", ZERO_THRESHOLD));
    r.note("tolerance.inconclusive", format!("{:e}", INCONCLUSIVE_THRESHOLD));
    for e in &report.entries {
        let mut row: Vec<String> = e.mode.iter().map(|m| m.to_string()).collect();
        row.extend([num(e.mode_norm), e.rank.to_string(), num(e.bessel), num(e.bessel_error), e.status.to_string()]);
        r.rows.push(row);
    }
    r.verdict = report.verdict();
    Ok(r)
}

pub fn witness(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let op = cfg.operator()?;
    let k = &cfg.kernel;
    let rep = kernel_witness_on_grid(&op, k.s, &k.mode, &k.vector, cfg.field.grid)?;
    let mut r = Report::new("witness", &["s", "mode", "spherical_sup", "local_sup", "bessel", "certified"]);
    r.note("operator", op.name());
    r.note("grid", cfg.field.grid);
    r.note("tolerance.zero", format!("{:e}", ZERO_THRESHOLD));
    let mode: Vec<String> = k.mode.iter().map(|m| m.to_string()).collect();
    r.rows.push(vec![
        num(k.s),
        mode.join(" "),
        num(rep.spherical_sup),
        num(rep.local_sup),
        num(rep.bessel),
        rep.certified.to_string(),
    ]);
    r.pass = rep.certified && rep.spherical_sup < ZERO_THRESHOLD;
    r.verdict = format!(
        "{}: ||A_s u||_inf = {:.3e}, ||A u||_inf = {:.6}",
        if r.pass { "kernel witness" } else { "not a kernel witness" },
        rep.spherical_sup,
        rep.local_sup
    );
    Ok(r)
}

pub fn counterexample_linf(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let eps_list = &cfg.sweep.eps_list;
    check_decreasing("sweep.eps_list", eps_list)?;
    let gaps = eps_list.par_iter().map(|&e| linf_gap(e)).collect::<Result<Vec<_>, _>>()?;
    let mut r = Report::new("counterexample-linf", &["eps", "gap", "argmax", "value_below_eps", "lower_bound"]);
    r.note("cells", 2000);
    r.note("tolerance.bound", "1e-9");
    for g in &gaps {
        r.rows
            .push(vec![num(g.eps), num(g.gap), num(g.argmax), num(g.value_below_eps), num(LinfGap::LOWER_BOUND)]);
    }
    let min = gaps.iter().map(|g| g.gap).fold(f64::INFINITY, f64::min);
    r.pass = min >= LinfGap::LOWER_BOUND - 1e-9;
    r.verdict = format!(
        "min sup-norm gap {min:.7} {} 1 - ln 2 = {:.7}",
        if r.pass { ">=" } else { "<" },
        LinfGap::LOWER_BOUND
    );
    Ok(r)
}

pub fn gauss_green(cfg: &ExperimentConfig, seed: u64) -> Result<Report, CliError> {
    let g = &cfg.gauss_green;
    if g.pairs == 0 || !(g.s_max > 1e-3 && g.s_max.is_finite()) {
        return Err(CliError::Config("gauss_green: need pairs >= 1 and s_max > 1e-3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let smooth = if g.smooth {
        Some(TrigPolynomial::random(&mut rng, 1, 1, 5, 6)?.sample(64)?)
    } else {
        None
    };
    let jumps: Vec<(f64, f64)> = g.jumps.iter().map(|[x, h]| (*x, *h)).collect();
    let u = PiecewiseSmooth::new(smooth.as_ref(), jumps.clone())?;
    let mut pairs = Vec::with_capacity(g.pairs);
    while pairs.len() < g.pairs {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let s: f64 = rng.gen_range(1e-3..g.s_max);
        if jumps.iter().all(|(c, _)| (x - s - c).abs() > 1e-6 && (x + s - c).abs() > 1e-6) {
            pairs.push((x, s));
        }
    }
    let residuals = pairs
        .par_iter()
        .map(|&(x, s)| gauss_green_check(&u, s, x))
        .collect::<Result<Vec<_>, _>>()?;
    let tol = if g.smooth { 1e-8 } else { 1e-10 };
    let mut r = Report::new("gauss-green", &["x", "s", "residual"]);
    r.note("tolerance.residual", format!("{tol:e}"));
    r.note("quadrature.derivative", "adaptive Gauss-Kronrod 7/15");
    for (&(x, s), res) in pairs.iter().zip(&residuals) {
        r.rows.push(vec![num(x), num(s), num(*res)]);
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    r.pass = worst < tol;
    r.verdict = format!("max residual {worst:.3e} over {} pairs (tolerance {tol:e})", pairs.len());
    Ok(r)
}

pub fn area(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let f = cfg.integrand()?;
    match cfg.area.scenario.as_str() {
        "table" => {
            let s_list = &cfg.sweep.s_list;
            check_decreasing("sweep.s_list", s_list)?;
            let mu = cfg.measure()?;
            mu.check_support_margin(s_list[0])?;
            let parts = s_list
                .par_iter()
                .map(|&s| area_convergence_table(&mu, &f, &[s]))
                .collect::<Result<Vec<_>, _>>()?;
            let rows: Vec<_> = parts.into_iter().flatten().collect();
            let mut r = Report::new("area", &["s", "value", "gap"]);
            r.note("integrand", f.name());
            r.note("recession_ray", format!("{:e}", RECESSION_RAY));
            r.note("tolerance.jensen", "1e-8");
            r.note("values", "window-relative");
            for row in &rows {
                r.rows.push(vec![num(row.s), num(row.value), num(row.gap)]);
            }
            let jensen = rows.iter().all(|row| row.gap >= -1e-8);
            let monotone = rows.windows(2).all(|w| w[1].gap <= w[0].gap + 1e-12);
            r.pass = jensen && monotone;
            r.verdict = match (jensen, monotone) {
                (true, true) => format!("area gap decreasing, last {:.6e}", rows[rows.len() - 1].gap),
                (false, _) => "Jensen bound violated".into(),
                (true, false) => "area gap not monotone".into(),
            };
            Ok(r)
        }
        scenario @ ("radial-smooth" | "dirac-spherical") => {
            let (params, (seq, limit)) = if scenario == "radial-smooth" {
                check_decreasing("sweep.eps_list", &cfg.sweep.eps_list)?;
                (&cfg.sweep.eps_list, radial_smooth_scenario(&cfg.sweep.eps_list, cfg.area.cells)?)
            } else {
                check_decreasing("sweep.s_list", &cfg.sweep.s_list)?;
                (&cfg.sweep.s_list, dirac_spherical_scenario(&cfg.sweep.s_list, cfg.area.cells)?)
            };
            let rep = area_vs_l1(&seq, &limit, &f)?;
            let mut r = Report::new("area", &["param", "l1", "area_gap"]);
            r.note("integrand", f.name());
            r.note("scenario", scenario);
            r.note("cells", cfg.area.cells);
            for (p, row) in params.iter().zip(&rep.rows) {
                r.rows.push(vec![num(*p), num(row.l1), num(row.area_gap)]);
            }
            r.pass = rep.pass();
            r.verdict = format!(
                "L1 distance {} and area gap {}",
                if rep.l1_vanishes { "vanishes" } else { "persists" },
                if rep.area_vanishes { "vanishes" } else { "persists" }
            );
            Ok(r)
        }
        other => Err(CliError::Config(format!("area.scenario: unknown scenario '{other}'"))),
    }
}

pub fn atomic_demo(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let a = &cfg.atomic;
    let probes = if a.probes.is_empty() { default_atomic_probes() } else { a.probes.clone() };
    let rows = atomic_divergence_demo(a.s, &probes)?;
    let mut r = Report::new("atomic-demo", &["x1", "x2", "value"]);
    r.note("s", a.s);
    r.note("atoms", "+1 at (0,1), -1 at (1,0)");
    for p in &rows {
        r.rows.push(vec![num(p.point[0]), num(p.point[1]), num(p.value)]);
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.value), hi.max(p.value)));
    r.verdict = format!("values range over [{lo:.6}, {hi:.6}] across the probes");
    Ok(r)
}

pub fn bessel(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let b = &cfg.bessel;
    let order = BesselOrder::new(b.order)?;
    let ts = linspace("bessel.t", b.t_min, b.t_max, b.t_count)?;
    let values = ts
        .par_iter()
        .map(|&t| bessel_j_with_error(order, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = Report::new("bessel", &["t", "value", "error", "branch"]);
    r.note("order", b.order);
    for (&t, &(v, e)) in ts.iter().zip(&values) {
        r.rows.push(vec![num(t), num(v), num(e), format!("{:?}", branch_for(order, t)).to_lowercase()]);
    }
    let worst = values.iter().map(|v| v.1).fold(0.0, f64::max);
    r.pass = values.iter().all(|(v, e)| v.is_finite() && e.is_finite());
    r.verdict = format!("{} values, max error estimate {worst:.3e}", values.len());
    Ok(r)
}

pub fn zeros(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let b = &cfg.bessel;
    let order = BesselOrder::new(b.order)?;
    if b.zeros == 0 {
        return Err(CliError::Config("bessel.zeros must be >= 1".into()));
    }
    let zs = (1..=b.zeros)
        .into_par_iter()
        .map(|k| bessel_zero(order, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = Report::new("zeros", &["k", "zero"]);
    r.note("order", b.order);
    for (k, z) in zs.iter().enumerate() {
        r.rows.push(vec![(k + 1).to_string(), num(*z)]);
    }
    r.pass = zs.windows(2).all(|w| w[1] > w[0]);
    r.verdict = format!("{} positive zeros of J_{}", zs.len(), b.order);
    Ok(r)
}

pub fn bench(cfg: &ExperimentConfig, seed: u64) -> Result<Report, CliError> {
    let op = cfg.operator()?;
    let u = cfg.field(&op, seed)?;
    let w = cfg.weight(op.dim())?;
    let b = &cfg.bench;
    let repeats = b.repeats.max(1);
    let time = |f: &dyn Fn() -> Result<TorusField, CliError>| -> Result<(f64, TorusField), CliError> {
        let start = Instant::now();
        let mut out = f()?;
        for _ in 1..repeats {
            out = f()?;
        }
        Ok((start.elapsed().as_secs_f64() / repeats as f64, out))
    };
    let (t_ss, ss) = time(&|| Ok(apply_spherical_spectral(&op, &u, b.s)?))?;
    let (t_sd, sd) = time(&|| Ok(apply_spherical_direct(&op, &u, b.s, b.quad_order)?))?;
    let (t_rs, rs) = time(&|| Ok(apply_radial_spectral(&op, &u, &w)?))?;
    let (t_rd, rd) = time(&|| Ok(apply_radial_direct(&op, &u, &w, b.delta)?))?;
    let d_s = rel_l2(&sd, &ss)?;
    let d_r = rel_l2(&rd, &rs)?;
    let mut r = Report::new("bench", &["path", "seconds", "rel_l2_vs_spectral"]);
    r.note("operator", op.name());
    r.note("weight", w.label());
    r.note("grid", u.grid());
    r.note("s", b.s);
    r.note("quadrature.sphere_order", b.quad_order);
    r.note("truncation_radius", format!("{:e}", b.delta));
    r.note("timings", "wall clock, mean over repeats; not reproducible byte for byte");
    r.rows.push(vec!["spherical-spectral".into(), num(t_ss), num(0.0)]);
    r.rows.push(vec!["spherical-direct".into(), num(t_sd), num(d_s)]);
    r.rows.push(vec!["radial-spectral".into(), num(t_rs), num(0.0)]);
    r.rows.push(vec!["radial-direct".into(), num(t_rd), num(d_r)]);
    r.pass = d_s < 1e-6 && d_r < 1e-4;
    r.verdict = format!(
        "direct/spectral time ratio: spherical {:.2} (rel L2 {d_s:.2e}), radial {:.2} (rel L2 {d_r:.2e})",
        t_sd / t_ss.max(1e-12),
        t_rd / t_rs.max(1e-12)
    );
    Ok(r)
}
