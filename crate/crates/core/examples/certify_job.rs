//! Certify a job file against the three extension conditions, then break
//! horizontality and certify again.

use heisenberg_whitney::certify::{certify, default_pair_grid};
use heisenberg_whitney::Job;

// (x, x², −2x³/3) on [0, 0.4] ∪ {0.6} ∪ [0.8, 1], m = 2.
const JOB: &str = r#"{
  "m": 2,
  "omega": {"kind": "linear"},
  "K": [{"a": 0.0, "b": 0.4}, {"a": 0.6, "b": 0.6}, {"a": 0.8, "b": 1.0}],
  "jets": {
    "F": [{"component_index": 0, "kind": "poly", "orders": [[0, 1], [1], [0]]},
          {"component_index": 1, "kind": "poly", "orders": [[0, 1], [1], [0]]},
          {"component_index": 2, "kind": "poly", "orders": [[0, 1], [1], [0]]}],
    "G": [{"component_index": 0, "kind": "poly", "orders": [[0, 0, 1], [0, 2], [2]]},
          {"component_index": 1, "kind": "poly", "orders": [[0, 0, 1], [0, 2], [2]]},
          {"component_index": 2, "kind": "poly", "orders": [[0, 0, 1], [0, 2], [2]]}],
    "H": [{"component_index": 0, "kind": "poly", "orders": [[0, 0, 0, -0.6666666666666666], [0, 0, -2], [0, -4]]},
          {"component_index": 1, "kind": "point", "values": [-0.144, -0.72, -2.4]},
          {"component_index": 2, "kind": "poly", "orders": [[0, 0, 0, -0.6666666666666666], [0, 0, -2], [0, -4]]}]
  }
}"#;

fn show(label: &str, job: &Job) -> heisenberg_whitney::Result<()> {
    let pairs = default_pair_grid(&job.triple, 5000, 0);
    let report = certify(&job.triple, &job.omega, &pairs)?;
    println!("{label}: {} pairs", report.pair_count);
    println!(
        "  Whitney constants F {:.3e}, G {:.3e}, H {:.3e}",
        report.whitney_constants.f, report.whitney_constants.g, report.whitney_constants.h
    );
    println!("  horizontality residual {:.3e}", report.horizontality_max_residual);
    println!("  sup |A|/V_ω {:.3e}, sup |A|/(V₁ω) {:.3e}", report.ratio_sup_omega, report.ratio_sup_one_scaled);
    println!("  verdict {:?}", report.verdict);
    if let Err(e) = report.require_extendable() {
        println!("  refused: {e}");
    }
    Ok(())
}

fn main() -> heisenberg_whitney::Result<()> {
    let job = Job::from_json(JOB)?;
    show("horizontal polynomial", &job)?;
    let tilted = Job::from_json(&JOB.replace("[0, 0, -2], [0, -4]]}", "[0, 0, -2.5], [0, -4]]}"))?;
    show("tilted H′", &tilted)?;
    Ok(())
}
