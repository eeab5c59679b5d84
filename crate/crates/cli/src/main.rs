use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sma_cli::{output_dir, run, write_report, CliResult, Command, ExperimentConfig, Status};

/// Barrier checks, grid solves and exponent fits for singular Monge-Ampere
/// equations.
///
/// Settings are `key=value` pairs, read from `--config` and then from the
/// trailing arguments. Bare keys resolve against the subcommand's section.
#[derive(Parser, Debug)]
#[command(name = "sma", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,

    /// `key=value` overrides, applied after the file.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let status = status(&Args::parse(), &mut std::io::stdout());
    ExitCode::from(status as u8)
}

fn status(args: &Args, out: &mut impl std::io::Write) -> Status {
    match execute(args, out) {
        Ok(true) => Status::Pass,
        Ok(false) => Status::CheckFailed,
        Err(e) => {
            eprintln!("error: {e}");
            Status::Error
        }
    }
}

fn execute(args: &Args, out: &mut impl std::io::Write) -> CliResult<bool> {
    let cfg = ExperimentConfig::load(args.command, args.config.as_deref(), &args.overrides)?;
    let report = run(&cfg)?;
    let dir = output_dir(&cfg);
    let io = |source| sma_cli::CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    for line in &report.lines {
        writeln!(out, "{line}").map_err(io)?;
    }
    for path in write_report(&report, cfg.command.prefix(), &dir)? {
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
    }
    Ok(report.all_pass())
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;

    fn args(dir: &Path, argv: &[&str]) -> Args {
        let output = format!("output={}", dir.display());
        let argv = ["sma"].iter().chain(argv).copied().chain([output.as_str()]);
        Args::try_parse_from(argv).unwrap()
    }

    /// Runs the command, returning its exit status and printed lines.
    fn sma(dir: &Path, argv: &[&str]) -> (Status, String) {
        let mut buf = Vec::new();
        let s = status(&args(dir, argv), &mut buf);
        (s, String::from_utf8(buf).unwrap())
    }

    fn error_of(dir: &Path, argv: &[&str]) -> String {
        execute(&args(dir, argv), &mut Vec::new()).unwrap_err().to_string()
    }

    fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
        let mut r = csv::Reader::from_path(path).unwrap();
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
        (header, rows)
    }

    #[test]
    fn bootstrap_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (s, out) = sma(dir.path(), &["bootstrap", "n=3", "q=1", "steps=10"]);
        assert_eq!(s, Status::Pass, "{out}");
        let (header, rows) = read_csv(&dir.path().join("bootstrap_steps.csv"));
        assert_eq!(header, ["k", "beta", "error", "closed_form_error", "gap", "pass"]);
        assert_eq!(rows.len(), 10);
        // beta_k = 2/(n-q) - (2q/(n(n-q))) (q/n)^k with n = 3, q = 1
        for (i, row) in rows.iter().enumerate() {
            let k = i as i32 + 1;
            let beta: f64 = row[1].parse().unwrap();
            let expected = 1.0 - (1.0 / 3.0) * (1.0f64 / 3.0).powi(k);
            assert!((beta - expected).abs() < 1e-14, "k = {k}: {beta} vs {expected}");
            assert_eq!(row[5], "pass");
        }
    }

    #[test]
    fn alpha_outside_the_unit_interval_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(sma(dir.path(), &["verify-barriers", "barrier.alpha=1.5"]).0, Status::Error);
        let err = error_of(dir.path(), &["verify-barriers", "barrier.alpha=1.5"]);
        assert!(err.contains("barrier.alpha") && err.contains("(0, 1)"), "{err}");
        assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
    }

    #[test]
    fn planar_barriers_verify() {
        let dir = tempfile::tempdir().unwrap();
        let (s, out) = sma(dir.path(), &["verify-barriers", "n=2", "p=1"]);
        assert_eq!(s, Status::Pass, "{out}");
        let (header, rows) = read_csv(&dir.path().join("verify_barriers_checks.csv"));
        assert_eq!(header, ["barrier", "check", "samples", "worst_margin", "pass"]);
        assert!(rows.len() >= 15);
        assert!(rows.iter().all(|r| r[4] == "pass"));
    }

    #[test]
    fn identical_seeds_give_identical_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [&a, &b] {
            let argv = ["verify-barriers", "n=3", "p=5", "samples=500", "fd_samples=50", "seed=11"];
            assert_eq!(sma(dir.path(), &argv).0, Status::Pass);
            assert_eq!(sma(dir.path(), &["solve", "h=1/16", "solver.dump=true"]).0, Status::Pass);
        }
        for name in ["verify_barriers_checks.csv", "solve_summary.csv", "solve_nodes.csv"] {
            let x = std::fs::read(a.path().join(name)).unwrap();
            let y = std::fs::read(b.path().join(name)).unwrap();
            assert!(!x.is_empty());
            assert_eq!(x, y, "{name}");
        }
        let (header, rows) = read_csv(&a.path().join("solve_nodes.csv"));
        assert_eq!(header, ["x1", "x2", "u"]);
        assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() < 0.0));
    }

    #[test]
    fn config_file_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# ten steps\nbootstrap.n = 4\nbootstrap.q = 1\nsteps = 10\n").unwrap();
        let (s, out) = sma(dir.path(), &["bootstrap", "--config", cfg.to_str().unwrap(), "--steps=3"]);
        assert_eq!(s, Status::Pass, "{out}");
        assert_eq!(read_csv(&dir.path().join("bootstrap_steps.csv")).1.len(), 3);
    }

    #[test]
    fn exit_status_reflects_checks() {
        let dir = tempfile::tempdir().unwrap();
        let (s, out) = sma(dir.path(), &["reproduce-all", "criteria=3,4,9"]);
        assert_eq!(s, Status::Pass, "{out}");
        assert_eq!(out.lines().filter(|l| l.starts_with("criterion")).count(), 3);
        let (header, rows) = read_csv(&dir.path().join("reproduce_all_summary.csv"));
        assert_eq!(header, ["id", "expected", "measured", "tolerance", "pass", "seed"]);
        assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["3", "4", "9"]);

        // Away from the flat face the linear term bends the profile.
        let argv = ["fit-exponent", "fit.target=super_w", "fit.tolerance=0", "fit.window_min=1e-2", "fit.window_max=0.5"];
        assert_eq!(sma(dir.path(), &argv).0, Status::CheckFailed);

        assert_eq!(sma(dir.path(), &["solve", "solver.h=0"]).0, Status::Error);
        assert!(error_of(dir.path(), &["solve", "solver.h=0"]).contains("solver.h"));
    }

    #[test]
    fn status_codes() {
        assert_eq!([Status::Pass as u8, Status::CheckFailed as u8, Status::Error as u8], [0, 1, 2]);
    }
}
