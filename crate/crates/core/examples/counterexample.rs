//! The dyadic construction whose jets satisfy the Whitney and ratio bounds
//! but whose discrepancy ratios diverge, for a few Hölder exponents.

use heisenberg_whitney::counterexample::{build, verify_bounds};
use heisenberg_whitney::Modulus;

fn main() -> heisenberg_whitney::Result<()> {
    let data = build(1, &Modulus::linear(), 12)?;
    for alpha in [1.0, 0.75, 0.5] {
        let report = verify_bounds(&data, alpha)?;
        println!(
            "α = {alpha}: Whitney {:.3} ≤ {}, ratio {:.3} ≤ {}, growth r_11/r_0 = {:.1}",
            report.whitney_constant, report.whitney_bound, report.ratio_sup, report.ratio_bound, report.rn_growth
        );
        if alpha == 1.0 {
            println!("{:>3} {:>12} {:>12} {:>12}", "n", "gap", "r_n", "lower bound");
            for row in &report.rn {
                println!("{:>3} {:>12.4e} {:>12.4e} {:>12.4e}", row.n, row.gap, row.r_n, row.lower_bound);
            }
        }
    }
    Ok(())
}
