//! The spline gradient on one level is the signed node-edge incidence matrix of the
//! Greville grid, and gradients have zero curl.
//!
//! cargo run --example de_rham_gradient

use hbgauge::greville::GrevilleGrid;
use hbgauge::tensor::{Geometry, LevelSpace};

fn main() -> hbgauge::Result<()> {
    for p in 1..=3 {
        let space = LevelSpace::build(p, [4, 3], 0)?;
        let grad = space.gradient_operator();
        let grid = GrevilleGrid::build(&space, Geometry::default());
        let same = grad.matrix() == &grid.incidence_matrix();
        println!(
            "p = {p}: dim X0/X1/X2 = {}/{}/{}, gradient == Greville incidence: {same}",
            space.dim(0),
            space.dim(1),
            space.dim(2)
        );

        // gradient of a scalar field, evaluated two ways
        let coeffs: Vec<f64> = (0..space.dim(0)).map(|t| ((t * 7) % 5) as f64 - 2.0).collect();
        let pts = [[0.21, 0.64], [0.9, 0.13]];
        let direct = space.eval_scalar_gradient(&coeffs, &pts)?;
        let via_x1 = space.eval_vector(&grad.apply(&coeffs), &pts)?;
        for (a, b) in direct.iter().zip(&via_x1) {
            println!("  grad = [{:+.12}, {:+.12}]  from X1 = [{:+.12}, {:+.12}]", a[0], a[1], b[0], b[1]);
        }
    }
    Ok(())
}
