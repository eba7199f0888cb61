//! Runs an experiment from an inline configuration and prints its report.

use ncqm::cli::{run_experiment, ExperimentConfig};

fn main() -> ncqm::Result<()> {
    let cfg = ExperimentConfig::parse(
        r#"
experiment = "moments"
theta = 0.1
m = 1.0
omega = 1.0
"#,
    )?;
    let report = run_experiment(&cfg)?;
    report.write_csv(std::io::stdout())?;
    println!("exit code would be {}", report.exit_code());
    Ok(())
}
