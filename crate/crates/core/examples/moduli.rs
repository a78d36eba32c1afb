//! Evaluate and validate moduli of continuity, including a custom
//! piecewise-linear one and a powered modulus parsed from JSON.

use heisenberg_whitney::Modulus;

fn main() -> heisenberg_whitney::Result<()> {
    let custom = Modulus::piecewise(vec![(0.0, 0.0), (0.1, 0.3), (1.0, 0.6)])?;
    let parsed: Modulus = serde_json::from_str(r#"{"kind": "power", "alpha": 0.5}"#)?;
    let moduli = [
        ("linear", Modulus::linear()),
        ("power(0.5)", parsed),
        ("log_lipschitz", Modulus::log_lipschitz()),
        ("log_lipschitz^0.75", Modulus::log_lipschitz().powered(0.75)?),
        ("piecewise", custom),
    ];
    let ts = [1e-6, 1e-3, 0.1, 0.5, 1.0];
    print!("{:<20}", "t");
    for t in ts {
        print!("{t:>12.0e}");
    }
    println!();
    for (name, w) in &moduli {
        print!("{name:<20}");
        for t in ts {
            print!("{:>12.4e}", w.eval(t)?);
        }
        let report = w.validate(&Modulus::default_grid(1.0))?;
        println!("   valid: {}", report.passed);
    }

    // A convex function fails the concavity check and names a witness.
    let convex = Modulus::piecewise(vec![(0.0, 0.0), (0.5, 0.1), (1.0, 1.0)])?;
    let report = convex.validate(&Modulus::default_grid(1.0))?;
    println!("convex knots: concave = {}, witness {:?}", report.concave.passed, report.concave.witness);
    Ok(())
}
