//! Area discrepancy and velocities over pairs of a non-horizontal jet
//! triple, before and after left translation.

use heisenberg_whitney::discrepancy::{translate_left, PairFunctionals};
use heisenberg_whitney::{CompactSet, ComponentJet, JetFamily, JetTriple, Modulus, Poly};

fn main() -> heisenberg_whitney::Result<()> {
    let set = CompactSet::from_intervals(&[(0.0, 0.25), (0.5, 1.0)])?;
    let fam = |p: Poly| JetFamily::new(vec![ComponentJet::from_poly(&p, 1); 2]);
    // (cos-like, sin-like, height with a small error).
    let f = Poly::new(vec![1.0, 0.0, -0.5]);
    let g = Poly::new(vec![0.0, 1.0, 0.0, -1.0 / 6.0]);
    let h = Poly::new(vec![0.0, -2.0, 0.0, 0.1]);
    let jt = JetTriple::new(1, set, fam(f), fam(g), fam(h))?;
    let omega = Modulus::power(0.5)?;

    println!("{:>6} {:>6} {:>12} {:>12} {:>12} {:>12}", "a", "b", "A", "V_omega", "V_one", "|A|/V_omega");
    for (a, b) in [(0.0, 0.1), (0.0, 0.5), (0.2, 0.6), (0.25, 1.0), (0.5, 0.9)] {
        let p = PairFunctionals::compute(&jt, &omega, a, b)?;
        let moved = PairFunctionals::compute(&translate_left(&jt, a)?, &omega, a, b)?;
        println!(
            "{a:>6} {b:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}   after translation: ΔA = {:.1e}",
            p.area,
            p.v_omega,
            p.v_one,
            p.ratio_omega,
            moved.area - p.area
        );
    }
    Ok(())
}
