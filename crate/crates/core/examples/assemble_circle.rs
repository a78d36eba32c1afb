//! Assemble a horizontal curve through the jets of the lifted unit circle on
//! two intervals and report how well it matches.

use heisenberg_whitney::lift::{assemble, seminorm_estimate};
use heisenberg_whitney::{CompactSet, ComponentJet, Coord, JetFamily, JetTriple, Modulus};

fn circle(c: Coord) -> ComponentJet {
    ComponentJet::func(move |k, x| match c {
        Coord::F => [x.cos(), -x.sin(), -x.cos(), x.sin()][k % 4],
        Coord::G => [x.sin(), x.cos(), -x.sin(), -x.cos()][k % 4],
        Coord::H => match k {
            0 => -2.0 * x,
            1 => -2.0,
            _ => 0.0,
        },
    })
}

fn main() -> heisenberg_whitney::Result<()> {
    let set = CompactSet::from_intervals(&[(0.0, 0.5), (1.0, 1.5)])?;
    let fam = |c| JetFamily::new(vec![circle(c), circle(c)]);
    let jt = JetTriple::new(2, set, fam(Coord::F), fam(Coord::G), fam(Coord::H))?;
    let omega = Modulus::linear();
    let (curve, report) = assemble(&jt, &omega)?;
    for d in &report.gaps {
        println!(
            "gap ({}, {}): case {:?}, A = {:.3e}, goal residual {:.1e}, height residual {:.1e}",
            d.a, d.b, d.case, d.area, d.goal_residual, d.height_residual
        );
    }
    println!("jet mismatch at welds: {:.2e}", report.max_jet_mismatch);
    println!("horizontality residual: {:.2e}", report.horizontality_max_residual);
    println!("constants: {:?}", report.constants);
    for n in [500, 1000] {
        println!("sampled seminorm ({n} samples): {:.6}", seminorm_estimate(&curve, &omega, n)?);
    }
    println!("Γ(0.75) = {:?}", curve.eval(0.75)?);
    Ok(())
}
