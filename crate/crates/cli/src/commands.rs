//! One function per subcommand. Each returns the tables to write and the
//! lines to print.

use std::time::Instant;

use singular_ma::analysis::{
    axis_profile, barrier_axis_samples, bootstrap, check_comparison, fit_exponent, log_spaced, minimal_steps,
    mixc_probe, Evaluable,
};
use singular_ma::sampling::seeded_rng;
use singular_ma::solver::{solve, DiscreteSolution};
use singular_ma::verify::{verify_barrier, VerifyOptions};
use singular_ma::{Barrier, Domain, ExplicitKind, RhsSpec};

use crate::acceptance::{self, Solves};
use crate::config::{Command, ExperimentConfig, FitTarget, Profile};
use crate::error::{CliError, CliResult, Context};
use crate::table::{flag, num, Table};

#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub lines: Vec<String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.tables.iter().all(Table::all_pass)
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Report> {
    match cfg.command {
        Command::VerifyBarriers => verify_barriers(cfg),
        Command::Solve => solve_command(cfg),
        Command::FitExponent => fit_command(cfg),
        Command::Compare => compare_command(cfg),
        Command::Bootstrap => bootstrap_command(cfg),
        Command::MixcProbe => mixc_command(cfg),
        Command::ReproduceAll => reproduce_all(cfg),
    }
}

fn unit_cap(n: usize) -> CliResult<Domain> {
    Domain::parabola_cap(n, 1.0, 0.0).context(|| "unit cap".into())
}

/// Barriers selected by the `barrier.*` keys.
pub fn selected_barriers(cfg: &ExperimentConfig) -> CliResult<Vec<Barrier>> {
    let b = &cfg.barrier;
    let (n, p) = (b.n, b.p);
    let nf = n as f64;
    let cap = unit_cap(n)?;
    let ctx = |what: &'static str| move || format!("building {what}");
    let mut out = Vec::new();
    match b.alpha {
        Some(alpha) => {
            if 2.0 / alpha <= nf {
                return Err(CliError::config("barrier.alpha", format!("must be below 2/n = {}", 2.0 / nf)));
            }
            let v = Barrier::sub_valpha(n, alpha, cap.diameter()).context(ctx("subsolution"))?;
            out.push(v.on(cap.clone()).context(ctx("subsolution"))?);
        }
        None => out.push(Barrier::sub_valpha_for_power(&cap, p).context(ctx("subsolution"))?),
    }
    out.push(Barrier::super_w(n, p).context(ctx("supersolution"))?);
    if let Some(t) = b.t {
        out.push(Barrier::super_wt(n, p, t).context(ctx("scaled supersolution"))?);
    }
    if p >= nf + 2.0 {
        out.push(Barrier::super_w2(n, p).context(ctx("sphere-cap supersolution"))?);
    }
    if p == 1.0 {
        out.push(Barrier::explicit(ExplicitKind::P1Cylinder, n).context(ctx("explicit solution"))?);
    }
    if n == 2 && p == 4.0 {
        out.push(Barrier::explicit(ExplicitKind::Ujl, 2).context(ctx("explicit solution"))?);
    }
    if let Some(k) = b.k {
        let d = Domain::parabola_cap(n, 1.0, b.gamma).context(ctx("shifted cap"))?;
        out.push(Barrier::sub_valpha_k(n, k, b.gamma, b.gamma, d.diameter()).context(ctx("subsolution"))?);
        out.push(Barrier::super_wk(n, k, b.gamma).context(ctx("supersolution"))?);
    }
    Ok(out)
}

fn verify_barriers(cfg: &ExperimentConfig) -> CliResult<Report> {
    let opts = VerifyOptions {
        samples: cfg.barrier.samples,
        fd_samples: cfg.barrier.fd_samples,
        margin: cfg.barrier.margin,
        seed: cfg.seed,
    };
    let mut t = Table::new("checks", &["barrier", "check", "samples", "worst_margin", "pass"]);
    let mut report = Report::default();
    for b in selected_barriers(cfg)? {
        for row in verify_barrier(&b, &opts).context(|| format!("verifying {}", b.label()))? {
            report.lines.push(format!(
                "{:<48} {:<16} {}",
                row.barrier,
                row.check,
                if row.pass { "pass" } else { "FAIL" }
            ));
            t.push(vec![row.barrier, row.check.to_string(), row.samples.to_string(), num(row.worst_margin), flag(row.pass)]);
        }
    }
    report.tables.push(t);
    Ok(report)
}

fn rhs_label(rhs: &RhsSpec) -> String {
    match rhs {
        RhsSpec::PowerSingular { p } => format!("power(p={p})"),
        RhsSpec::Degenerate { q } => format!("degenerate(q={q})"),
        RhsSpec::AffineSphere { k } => format!("affine_sphere(k={k})"),
    }
}

fn grid_solve(cfg: &ExperimentConfig) -> CliResult<DiscreteSolution> {
    let domain = cfg.domain.build()?;
    solve(&domain, cfg.rhs, &cfg.solver).context(|| format!("solving on {}", cfg.domain.label()))
}

fn solve_command(cfg: &ExperimentConfig) -> CliResult<Report> {
    let sol = grid_solve(cfg)?;
    let mut report = Report::default();
    report.lines.push(format!(
        "{} nodes, {} iterations, residual {:.3e}, {:.1} s",
        sol.grid.len(),
        sol.iterations,
        sol.residual_norm,
        sol.runtime_seconds
    ));
    let mut t = Table::new(
        "summary",
        &[
            "domain",
            "rhs",
            "h",
            "nodes",
            "iterations",
            "eps_final",
            "residual_norm",
            "sup_norm",
            "min_second_difference",
            "floor_bound",
        ],
    );
    t.push(vec![
        cfg.domain.label(),
        rhs_label(&cfg.rhs),
        num(sol.grid.h),
        sol.grid.len().to_string(),
        sol.iterations.to_string(),
        num(sol.eps_final),
        num(sol.residual_norm),
        num(sol.sup_norm()),
        num(sol.min_second_difference()),
        sol.floor_bound.to_string(),
    ]);
    report.tables.push(t);
    if cfg.dump {
        let mut nodes = Table::new("nodes", &["x1", "x2", "u"]);
        for (x, u) in sol.grid.positions().iter().zip(&sol.values) {
            nodes.push(vec![num(x[0]), num(x[1]), num(*u)]);
        }
        report.tables.push(nodes);
    }
    Ok(report)
}

/// Barrier fitted by `fit-exponent`, with its default window.
fn fit_barrier(cfg: &ExperimentConfig) -> CliResult<(Barrier, (f64, f64))> {
    let n = cfg.domain.n;
    let p = match cfg.rhs {
        RhsSpec::PowerSingular { p } => p,
        _ => 1.0,
    };
    let ctx = || "building the fitted barrier".to_string();
    let standard = (1e-3, 5e-2);
    Ok(match cfg.fit.target {
        FitTarget::SubValpha => (Barrier::sub_valpha_for_power(&unit_cap(n)?, p).context(ctx)?, standard),
        // The linear term dominates away from the flat face.
        FitTarget::SuperW => (Barrier::super_w(n, p).context(ctx)?, (1e-12, 1e-9)),
        FitTarget::SuperWk => {
            let RhsSpec::AffineSphere { k } = cfg.rhs else {
                unreachable!("validated")
            };
            let gamma = if cfg.domain.gamma > 0.0 { cfg.domain.gamma } else { 0.5 };
            (Barrier::super_wk(n, k, gamma).context(ctx)?, acceptance::SUPER_WK_WINDOW)
        }
        FitTarget::P1Cylinder => (Barrier::explicit(ExplicitKind::P1Cylinder, n).context(ctx)?, standard),
        FitTarget::Ujl => (Barrier::explicit(ExplicitKind::Ujl, n).context(ctx)?, standard),
        FitTarget::Solution => unreachable!("solutions are fitted on the grid"),
    })
}

/// Exponent the fit should recover, when one is known.
fn reference_exponent(rhs: &RhsSpec, n: usize) -> Option<f64> {
    let nf = n as f64;
    match *rhs {
        RhsSpec::PowerSingular { p } if p >= 1.0 => Some(2.0 / (nf + p)),
        RhsSpec::AffineSphere { k } => Some(singular_ma::barriers::affine_sphere_exponent(n, k)),
        _ => None,
    }
}

fn fit_command(cfg: &ExperimentConfig) -> CliResult<Report> {
    let f = &cfg.fit;
    let (label, samples, window, reference) = if f.target == FitTarget::Solution {
        let sol = grid_solve(cfg)?;
        let window = (f.window_min.unwrap_or(4.0 * sol.grid.h), f.window_max);
        let base = -cfg.domain.gamma;
        (
            format!("solution {} {}", cfg.domain.label(), rhs_label(&cfg.rhs)),
            axis_profile(&sol, base),
            window,
            reference_exponent(&cfg.rhs, 2),
        )
    } else {
        let (b, default) = fit_barrier(cfg)?;
        let window = match f.window_min {
            Some(lo) => (lo, f.window_max),
            None => default,
        };
        let heights = log_spaced(window.0, window.1, f.points);
        let samples = barrier_axis_samples(&b, &heights).context(|| format!("sampling {}", b.label()))?;
        let reference = Some(b.exponent());
        (b.label(), samples, window, reference)
    };
    let fit = fit_exponent(&samples, window).context(|| format!("fitting {label}"))?;
    let pass = match reference {
        Some(r) => flag((fit.slope - r).abs() <= f.tolerance),
        None => "n/a".to_string(),
    };
    let mut t = Table::new(
        "fit",
        &["target", "window_min", "window_max", "n_points", "slope", "intercept", "r_squared", "reference", "tolerance", "pass"],
    );
    let mut report = Report::default();
    report.lines.push(format!("{label}: slope {:.6} over {} points", fit.slope, fit.n_points));
    t.push(vec![
        label,
        num(window.0),
        num(window.1),
        fit.n_points.to_string(),
        num(fit.slope),
        num(fit.intercept),
        num(fit.r_squared),
        reference.map(num).unwrap_or_default(),
        num(f.tolerance),
        pass,
    ]);
    report.tables.push(t);
    Ok(report)
}

fn profile_label(p: Profile) -> &'static str {
    match p {
        Profile::SubValpha => "sub_valpha",
        Profile::SuperW => "super_w",
        Profile::Solution => "solution",
    }
}

fn compare_command(cfg: &ExperimentConfig) -> CliResult<Report> {
    let domain = cfg.domain.build()?;
    let n = cfg.domain.n;
    let p = match cfg.rhs {
        RhsSpec::PowerSingular { p } => p,
        _ => 1.0,
    };
    let uses_solution = cfg.compare.lower == Profile::Solution || cfg.compare.upper == Profile::Solution;
    let sol = if uses_solution { Some(grid_solve(cfg)?) } else { None };
    let sub = Barrier::sub_valpha_for_power(&domain, p).context(|| "subsolution".into())?;
    let sup = Barrier::super_w(n, p).context(|| "supersolution".into())?;
    let pick = |which: Profile| -> &dyn Evaluable {
        match which {
            Profile::SubValpha => &sub,
            Profile::SuperW => &sup,
            Profile::Solution => sol.as_ref().expect("solved above"),
        }
    };
    let mut rng = seeded_rng(cfg.seed);
    let c = check_comparison(pick(cfg.compare.lower), pick(cfg.compare.upper), &domain, cfg.compare.samples, &mut rng)
        .context(|| "comparison".into())?;
    let point = c.worst_point.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" ");
    let mut t = Table::new("comparison", &["lower", "upper", "domain", "samples", "worst_gap", "worst_point", "pass"]);
    t.push(vec![
        profile_label(cfg.compare.lower).into(),
        profile_label(cfg.compare.upper).into(),
        cfg.domain.label(),
        cfg.compare.samples.to_string(),
        num(c.worst_gap),
        point,
        flag(c.pass),
    ]);
    let mut report = Report::default();
    report.lines.push(format!("worst gap {:.6e}: {}", c.worst_gap, flag(c.pass)));
    report.tables.push(t);
    Ok(report)
}

fn bootstrap_command(cfg: &ExperimentConfig) -> CliResult<Report> {
    let b = &cfg.bootstrap;
    let trace = bootstrap(b.n, b.q, b.steps).context(|| "bootstrap".into())?;
    let mut t = Table::new("steps", &["k", "beta", "error", "closed_form_error", "gap", "pass"]);
    let mut report = Report::default();
    for k in 1..=b.steps {
        let gap = (trace.error(k) - trace.closed_form_error(k)).abs();
        t.push(vec![
            k.to_string(),
            num(trace.betas[k]),
            num(trace.error(k)),
            num(trace.closed_form_error(k)),
            num(gap),
            flag(gap <= 1e-12),
        ]);
    }
    report.lines.push(format!("limit 2/(n-q) = {:.15}", trace.limit));
    report.tables.push(t);
    if let Some(beta) = b.target {
        let k = minimal_steps(b.n, b.q, beta).context(|| "minimal steps".into())?;
        let gap = trace.limit - beta;
        let ok = trace.closed_form_error(k) < gap && (k == 0 || trace.closed_form_error(k - 1) >= gap);
        let mut m = Table::new("target", &["n", "q", "target", "minimal_k", "error_at_k", "pass"]);
        m.push(vec![b.n.to_string(), num(b.q), num(beta), k.to_string(), num(trace.closed_form_error(k)), flag(ok)]);
        report.lines.push(format!("beta_k > {beta} from k = {k}"));
        report.tables.push(m);
    }
    Ok(report)
}

fn mixc_command(cfg: &ExperimentConfig) -> CliResult<Report> {
    let k = match cfg.rhs {
        RhsSpec::AffineSphere { k } => k,
        _ => unreachable!("validated"),
    };
    let gamma = cfg.domain.gamma;
    let sol = grid_solve(cfg)?;
    let window = (cfg.fit.window_min.unwrap_or(4.0 * sol.grid.h), cfg.fit.window_max);
    let r = mixc_probe(&sol, k, gamma, window, cfg.solver.support_floor).context(|| "rate probe".into())?;
    let pass = r.fit.slope >= r.exponent - acceptance::MIXC_SLACK && r.identity_gap <= 1e-12;
    let mut t = Table::new(
        "rate",
        &["n", "k", "gamma", "window_min", "window_max", "n_points", "exponent", "slope", "constant", "min_support", "identity_gap", "pass"],
    );
    t.push(vec![
        "2".into(),
        num(k),
        num(gamma),
        num(window.0),
        num(window.1),
        r.fit.n_points.to_string(),
        num(r.exponent),
        num(r.fit.slope),
        num(r.constant),
        num(r.min_support),
        num(r.identity_gap),
        flag(pass),
    ]);
    let mut report = Report::default();
    report.lines.push(format!("rate exponent {:.4}, measured slope {:.4}", r.exponent, r.fit.slope));
    report.tables.push(t);
    Ok(report)
}

fn reproduce_all(cfg: &ExperimentConfig) -> CliResult<Report> {
    let start = Instant::now();
    let mut solves = Solves::default();
    let mut t = Table::new("summary", &["id", "expected", "measured", "tolerance", "pass", "seed"]);
    let mut report = Report::default();
    for &id in &cfg.criteria {
        let o = acceptance::run(id, cfg.seed, &mut solves)?;
        report.lines.push(o.line());
        t.push(vec![o.id.to_string(), num(o.expected), num(o.measured), num(o.tolerance), flag(o.pass), cfg.seed.to_string()]);
    }
    report.lines.push(format!("total {:.1} s", start.elapsed().as_secs_f64()));
    report.tables.push(t);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, args: &[&str]) -> ExperimentConfig {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        ExperimentConfig::load(command, None, &args).unwrap()
    }

    #[test]
    fn barrier_selection_follows_p_and_n() {
        let labels = |args: &[&str]| selected_barriers(&cfg(Command::VerifyBarriers, args)).unwrap().len();
        // sub, super, explicit p = 1
        assert_eq!(labels(&["n=2", "p=1"]), 3);
        // sub, super, sphere-cap super, UJL
        assert_eq!(labels(&["n=2", "p=4"]), 4);
        assert_eq!(labels(&["n=3", "p=2", "t=0.5", "k=1"]), 5);
    }

    #[test]
    fn alpha_must_match_a_power() {
        let c = cfg(Command::VerifyBarriers, &["n=3", "alpha=0.9"]);
        assert!(matches!(selected_barriers(&c), Err(CliError::Config { field, .. }) if field == "barrier.alpha"));
    }

    #[test]
    fn bootstrap_rows_start_at_step_one() {
        let r = run(&cfg(Command::Bootstrap, &["n=3", "q=1", "steps=10", "target=0.9"])).unwrap();
        assert_eq!(r.tables[0].rows.len(), 10);
        assert_eq!(r.tables[0].rows[0][0], "1");
        assert!(r.all_pass());
    }

    #[test]
    fn barrier_fits_recover_exponents() {
        for (target, rhs) in [("sub_valpha", "power"), ("super_w", "power"), ("p1_cylinder", "power"), ("super_wk", "affine_sphere")] {
            let args = [format!("fit.target={target}"), format!("rhs.kind={rhs}"), "fit.tolerance=1e-3".into()];
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let r = run(&cfg(Command::FitExponent, &args)).unwrap();
            assert!(r.all_pass(), "{target}: {:?}", r.tables[0].rows);
        }
    }
}
