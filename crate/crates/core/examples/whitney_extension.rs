//! Whitney extension of the jets of sin across the gaps of a three-piece set,
//! compared with sin itself.

use heisenberg_whitney::whitney::extend_field;
use heisenberg_whitney::{CompactSet, ComponentJet, JetFamily};

fn main() -> heisenberg_whitney::Result<()> {
    let m = 3;
    let set = CompactSet::from_intervals(&[(0.0, 0.5), (0.9, 0.9), (1.4, 2.0)])?;
    let sine = || ComponentJet::func(|k, x| [x.sin(), x.cos(), -x.sin(), -x.cos()][k % 4]);
    let family = JetFamily::new((0..set.len()).map(|_| sine()).collect());
    let field = extend_field(&family, m, &set)?;

    for (piece, (a, b)) in field.gap_pieces().iter().zip(set.gaps()) {
        let worst = (0..=100)
            .map(|i| a + (b - a) * i as f64 / 100.0)
            .map(|x| (piece.eval(x) - x.sin()).abs())
            .fold(0.0, f64::max);
        let ends: f64 =
            (0..=m).map(|k| (piece.derivative(k, a) - field.derivative(k, a).unwrap()).abs()).fold(0.0, f64::max);
        println!("gap ({a}, {b}): max |f − sin| = {worst:.3e}, endpoint jet mismatch {ends:.1e}");
    }

    let xs: Vec<f64> = (0..=8).map(|i| 0.25 * i as f64).collect();
    field.write_samples_csv(std::io::stdout().lock(), &xs)?;
    Ok(())
}
