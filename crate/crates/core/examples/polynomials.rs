//! Polynomial tools: Taylor expansions from jets, exact `∫|p|` via real roots,
//! and the Markov-type comparison between `∫|p|` and `max |p|`.

use heisenberg_whitney::Poly;

fn main() -> heisenberg_whitney::Result<()> {
    // Taylor polynomial of exp at 0 from its jet of order 5.
    let t = Poly::taylor_from_jet(&[1.0; 6], 0.0)?;
    println!("T_0^5 exp(0.5) = {:.10} (exp = {:.10})", t.eval(0.5), 0.5f64.exp());

    // (x − 0.2)(x − 0.5)(x − 0.9) changes sign three times in [0, 1].
    let p = Poly::new(vec![-0.09, 0.73, -1.6, 1.0]);
    println!("roots in [0, 1]: {:?}", p.roots_in(0.0, 1.0));
    let signed = p.integrate(0.0, 1.0);
    let abs = p.integral_abs(0.0, 1.0)?;
    let (max, at) = p.max_abs(0.0, 1.0)?;
    println!("∫p = {signed:.6}, ∫|p| = {abs:.6}, max|p| = {max:.6} at x = {at:.4}");
    let deg = p.degree() as f64;
    println!("M/(8·deg²) = {:.6} ≤ ∫|p| ≤ M = {max:.6}", max / (8.0 * deg * deg));

    let (l, r) = p.big_subinterval(0.0, 1.0)?;
    println!("subinterval where |p| ≥ M/2: [{l:.4}, {r:.4}], length {:.4}", r - l);
    Ok(())
}
