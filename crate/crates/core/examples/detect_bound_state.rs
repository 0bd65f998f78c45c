//! Bound-state detection for an embedded scenario (default `prop1_bend`):
//! two grid levels per truncation, Richardson extrapolation and a verdict
//! with its margin.

use dnstrip::scenario::{preset, run_scenario, Task};

fn main() -> dnstrip::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "prop1_bend".into());
    let sc = preset(&name)?;
    let run = run_scenario(&sc, &[Task::Solve])?;

    println!("{:<10} {:>6} {:>4} {:>16} {:>10}", "trunc_bc", "ns", "nu", "lambda1", "order");
    for row in &run.report.facts.convergence {
        println!(
            "{:<10} {:>6} {:>4} {:>16.12} {:>10}",
            row.trunc_bc.as_str(),
            row.ns,
            row.nu,
            row.lambda1,
            row.observed_order.map_or("-".into(), |o| format!("{o:.3}"))
        );
    }
    if let Some(d) = &run.detection {
        println!("threshold     {:.12}", d.threshold);
        println!(
            "extrapolated  dirichlet {:.12}  neumann {:.12}",
            d.extrapolated.dirichlet_value, d.extrapolated.neumann_value
        );
        println!("verdict       {} (margin {:.3e})", d.verdict.as_str(), d.margin);
    }
    Ok(())
}
