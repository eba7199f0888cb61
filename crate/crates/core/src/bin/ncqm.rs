use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ncqm::cli::{run_experiment, ExperimentConfig, Format, Report};
use ncqm::Error;

/// Run a configured experiment and report pass/fail against reference values.
#[derive(Parser, Debug)]
#[command(name = "ncqm", version)]
struct Args {
    /// TOML or JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment name; overrides the config.
    #[arg(long)]
    experiment: Option<String>,
    /// Noncommutativity parameter; overrides the config.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Output directory for reports and data files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

const CONFIG_ERROR: u8 = 2;

fn config(args: &Args) -> ncqm::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = &args.experiment {
        cfg.experiment = e.clone();
    }
    if let Some(t) = args.theta {
        cfg.theta = t;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = Some(o.display().to_string());
    }
    if let Some(f) = &args.format {
        cfg.formats = vec![f.parse::<Format>()?];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_rows(report: &Report) {
    for r in &report.rows {
        let reference = r.paper_value.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        println!(
            "{:4} {:<12} {:<48} ref {:>14} got {:>14.6e} tol {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.experiment,
            r.quantity,
            reference,
            r.computed_value,
            r.tolerance
        );
    }
}

fn run(args: &Args) -> u8 {
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return CONFIG_ERROR;
        }
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            return CONFIG_ERROR;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    print_rows(&report);
    if let Some(dir) = &cfg.output_dir {
        if let Err(e) = report.emit(dir.as_ref(), &cfg.formats) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    report.exit_code() as u8
}

fn main() -> ExitCode {
    match Args::try_parse() {
        Ok(args) => ExitCode::from(run(&args)),
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { CONFIG_ERROR } else { 0 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use std::path::Path;

    fn args(list: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("ncqm").chain(list.iter().copied())).unwrap()
    }

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("ncqm-bin-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    fn path(p: &Path) -> &str {
        p.to_str().unwrap()
    }

    #[test]
    fn passing_experiment_exits_zero() {
        let out = scratch("pass");
        assert_eq!(run(&args(&["--experiment", "galilean", "--theta", "0.2", "--out", path(&out)])), 0);
        let csv = fs::read_to_string(out.join("report.csv")).unwrap();
        assert!(csv.starts_with("experiment,quantity,paper_value,computed,tolerance,pass\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn failing_row_exits_one_and_still_writes() {
        let out = scratch("fail");
        assert_eq!(run(&args(&["--experiment", "symplectic", "--format", "json", "--out", path(&out)])), 1);
        let report = Report::from_json(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        assert!(!report.all_pass());
        assert!(out.join("variance_numeric.json").exists());
    }

    #[test]
    fn config_errors_exit_two() {
        assert_eq!(run(&args(&["--experiment", "warp-drive"])), CONFIG_ERROR);
        assert_eq!(run(&args(&["--experiment", "moments", "--theta", "-1"])), CONFIG_ERROR);
        assert_eq!(run(&args(&[])), CONFIG_ERROR);
        let dir = scratch("cfg");
        fs::create_dir_all(&dir).unwrap();
        let bad = dir.join("bad.toml");
        fs::write(&bad, "experiment = \"moments\"\nunknown_key = 3\n").unwrap();
        assert_eq!(run(&args(&["--config", path(&bad)])), CONFIG_ERROR);
        assert_eq!(run(&args(&["--config", "/nonexistent/cfg.toml"])), CONFIG_ERROR);
        assert!(Args::try_parse_from(["ncqm", "--format", "xml"]).is_err());
    }

    #[test]
    fn config_file_and_empty_scan() {
        let dir = scratch("scan");
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("scan.toml");
        fs::write(&cfg, "experiment = \"transition\"\nscan = []\n").unwrap();
        let out = dir.join("out");
        assert_eq!(run(&args(&["--config", path(&cfg), "--out", path(&out)])), 0);
        assert_eq!(fs::read_to_string(out.join("report.csv")).unwrap().lines().count(), 1);
    }

    #[test]
    fn identical_configs_give_identical_csv() {
        let (a, b) = (scratch("det-a"), scratch("det-b"));
        for dir in [&a, &b] {
            run(&args(&["--experiment", "oscillator", "--out", path(dir)]));
        }
        assert_eq!(fs::read(a.join("report.csv")).unwrap(), fs::read(b.join("report.csv")).unwrap());
        assert_eq!(fs::read(a.join("spectrum.csv")).unwrap(), fs::read(b.join("spectrum.csv")).unwrap());
    }
}
