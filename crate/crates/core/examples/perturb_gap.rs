//! Solve the perturbation problem on a single gap whose height jump is not
//! the lift of the Euclidean extension, and check the result.

use heisenberg_whitney::perturb::{build_mollifier, check_mollifier, perturb_gap, Constants, GapProblem};
use heisenberg_whitney::whitney::extend_field;
use heisenberg_whitney::{CompactSet, ComponentJet, Coord, JetFamily, JetTriple, Modulus, Poly};

fn main() -> heisenberg_whitney::Result<()> {
    let m = 2;
    let set = CompactSet::from_intervals(&[(0.0, 0.2), (0.7, 1.0)])?;
    let fam = |p: Poly| JetFamily::new(vec![ComponentJet::from_poly(&p, m); 2]);
    let f = Poly::new(vec![0.0, 1.0, 0.3]);
    let g = Poly::new(vec![0.5, -0.2, 0.0, 0.8]);
    let h = Poly::new(vec![0.0, 0.4, -1.0]);
    let jt = JetTriple::new(m, set.clone(), fam(f), fam(g), fam(h))?;
    let omega = Modulus::linear();

    let fx = extend_field(jt.family(Coord::F), m, &set)?;
    let gx = extend_field(jt.family(Coord::G), m, &set)?;
    let gp = GapProblem::new(&jt, &omega, &fx.gap_pieces()[0], &gx.gap_pieces()[0])?;
    println!("gap ({}, {}): 𝒜 = {:.6e}, V = {:.6e}", gp.a, gp.b, gp.area, gp.velocity());

    let c = 1.1 * (gp.area.abs() / gp.velocity()).max(1.0);
    let constants = Constants::new(c, m, set.diameter())?;
    println!(
        "C = {:.3}, C₀ = {:.3e}, B = {:.3e}, C̃ = {:.3e}",
        constants.c, constants.c0, constants.b, constants.c_tilde
    );

    let sol = perturb_gap(&gp, &constants)?;
    let d = &sol.diagnostics;
    println!("case {:?}, sub-case {:?}, λ = {:?}", d.case, d.sub_case, d.lambda);
    println!(
        "goal residual {:.2e}, endpoint flatness {:.2e}, bound ratio {:.2e}",
        d.goal_residual, d.endpoint_flatness, d.bound_ratio
    );
    // The construction rescales its mollifiers; the certificate is stated for
    // the unscaled one on the same interval.
    for spec in &d.mollifiers {
        let unit = build_mollifier(spec.j, spec.gap, &omega, m)?;
        let check = check_mollifier(&unit, &omega, constants.c0, 2000);
        println!(
            "mollifier on [{:.4}, {:.4}] (scale {:.3e}): certificate passed = {}",
            spec.j.0,
            spec.j.1,
            spec.amplitude / unit.amplitude,
            check.passed
        );
    }
    Ok(())
}
