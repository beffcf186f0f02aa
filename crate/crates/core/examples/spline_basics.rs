//! Univariate B-splines: the standard basis, the Curry-Schoenberg basis, Greville
//! abscissae and dyadic refinement.
//!
//! cargo run --example spline_basics

use hbgauge::bspline::{KnotVector, UnivariateSpace};

fn main() -> hbgauge::Result<()> {
    let kv = KnotVector::uniform(2, 4)?;
    println!("knots {:?}", kv.knots());
    let std = UnivariateSpace::standard(kv.clone());
    let cs = UnivariateSpace::curry_schoenberg(kv.clone());
    println!("dim S_p = {}, dim D = {}", std.dim(), cs.dim());
    println!("Greville abscissae {:?}", std.greville_abscissae()?);

    let x = 0.3;
    let (b, db) = std.eval_with_derivative(x)?;
    let d = cs.eval_basis(x, 0)?;
    println!("at x = {x}: B = {:?} (sum {:.15})", b.values, b.values.iter().sum::<f64>());
    // B_i' = D_{i-1} - D_i
    for (t, i) in b.indices().enumerate() {
        let lower = if i > 0 { cs.eval_single(i - 1, x, 0)? } else { 0.0 };
        let upper = if i < cs.dim() { cs.eval_single(i, x, 0)? } else { 0.0 };
        println!("  B_{i}' = {:+.6}   D_{{i-1}} - D_i = {:+.6}", db.values[t], lower - upper);
    }
    println!("D values at x: {:?}", d.values);

    let fine = UnivariateSpace::standard(kv.dyadic_refine());
    let rows = std.refinement_coefficients(&fine)?;
    println!("two-scale relation of B_2: {:?}", rows[2]);
    Ok(())
}
