//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion before asserting.

use ncqm::cli::{plane_wave_lattice, positivity_scan, run_experiment, ExperimentConfig, Report, ReportRow};

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn run(experiment: &str) -> Report {
    let cfg = ExperimentConfig { experiment: experiment.into(), ..Default::default() };
    run_experiment(&cfg).unwrap_or_else(|e| panic!("{experiment}: {e}"))
}

fn rows<'a>(report: &'a Report, pred: impl Fn(&ReportRow) -> bool + 'a) -> Vec<&'a ReportRow> {
    report.rows.iter().filter(|r| pred(r)).collect()
}

fn judge(id: usize, name: &'static str, selected: &[&ReportRow]) -> Outcome {
    assert!(!selected.is_empty(), "criterion {id} selected no rows");
    let failed: Vec<String> = selected
        .iter()
        .filter(|r| !r.pass)
        .map(|r| match r.paper_value {
            Some(p) => format!("{}: expected {p:.7} got {:.7}", r.quantity, r.computed_value),
            None => format!("{}: {:.3e} vs bound {:.1e}", r.quantity, r.computed_value, r.tolerance),
        })
        .collect();
    let detail = if failed.is_empty() { format!("{} checks", selected.len()) } else { failed.join("; ") };
    Outcome { id, name, pass: failed.is_empty(), detail }
}

#[test]
fn acceptance() {
    let mut out = Vec::new();

    let (err, secs) = plane_wave_lattice(&[0.0, 0.1, 0.5]).unwrap();
    out.push(Outcome {
        id: 1,
        name: "star oracle",
        pass: err < 1e-10 && secs < 10.0,
        detail: format!("max rel error {err:.2e}, {secs:.2} s"),
    });

    let (min_rho, gap) = positivity_scan(0.1, 100, 7).unwrap();
    out.push(Outcome {
        id: 2,
        name: "positivity",
        pass: min_rho >= -1e-10 && gap < 1e-8,
        detail: format!("min density {min_rho:.3e}, series gap {gap:.2e}"),
    });

    let packet = run("free-packet");
    let widths = rows(&packet, |r| r.quantity.starts_with("width") || r.quantity.starts_with("squeezing"));
    out.push(judge(3, "packet width law", &widths));

    let osc = run("oscillator");
    out.push(judge(4, "spectrum invariance", &rows(&osc, |r| r.quantity.starts_with("E_") || r.quantity.starts_with("gauge"))));

    let moments = run("moments");
    let five = ["<X>", "<T^2>", "<P_x^2>", "dX*dP_x", "dX*dT"];
    out.push(judge(5, "ground-state moments", &rows(&moments, |r| five.iter().any(|q| r.quantity.starts_with(q)))));

    let sym = run("symplectic");
    let six = ["entrywise", "det V", "|det(M V M^T)", "nu1*nu2"];
    out.push(judge(6, "variance matrix", &rows(&sym, |r| six.iter().any(|q| r.quantity.starts_with(q)) && !r.quantity.contains("numeric"))));

    let ehr = run("ehrenfest");
    out.push(judge(7, "continuity and norm", &rows(&ehr, |r| r.quantity.starts_with("continuity") || r.quantity.starts_with("norm"))));
    out.push(judge(8, "ehrenfest", &rows(&ehr, |r| r.quantity.starts_with("residual") || r.quantity.starts_with("halving"))));

    let tr = run("transition");
    out.push(judge(9, "transition scan", &rows(&tr, |r| r.quantity.ends_with("spread") || r.quantity.starts_with("rate(theta=0)"))));

    let gal = run("galilean");
    out.push(judge(10, "galilean algebra", &rows(&gal, |_| true)));

    for o in &out {
        println!("{} criterion {:>2} ({}): {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    }
    let failed: Vec<usize> = out.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
