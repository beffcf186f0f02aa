//! Maxwell eigenvalues on the square cavity `(0, π)²`: ungauged, tree-cotree gauged,
//! and the plain restriction to the cotree for contrast. Exact values are `m² + n²`.
//!
//! cargo run --release --example maxwell_eigen

use hbgauge::assembly::{assemble, Material};
use hbgauge::eigen::{compare_spectra, solve_gauged, solve_restricted, solve_ungauged, DEFAULT_ZERO_FACTOR};
use hbgauge::gauging::{build_level_tree, build_multilevel_tree, gauge_indices};
use hbgauge::gradient::hierarchical_gradient;
use hbgauge::greville::build_level_graphs;
use hbgauge::hierarchy::{CellBox, HierarchicalMesh, HierarchicalSpace};
use hbgauge::tensor::Geometry;

fn main() -> hbgauge::Result<()> {
    let geometry = Geometry::default();
    let refinement = [vec![CellBox::new([4, 12], [4, 12])], vec![CellBox::new([12, 20], [12, 20])]];
    let mesh = HierarchicalMesh::build(2, [8, 8], &refinement)?;
    let space = HierarchicalSpace::new(&mesh)?;
    let graphs = build_level_graphs(&mesh, &space, geometry)?;
    let trees: Vec<_> = graphs.iter().map(build_level_tree).collect();
    let cotree = gauge_indices(&build_multilevel_tree(&trees, space.basis(1))?);

    let sys = assemble(&mesh, &space, geometry, Material::default())?;
    let ungauged = solve_ungauged(&sys, DEFAULT_ZERO_FACTOR)?;
    let gauged = solve_gauged(&sys, &cotree, &hierarchical_gradient(&mesh, &space)?, DEFAULT_ZERO_FACTOR)?;
    let restricted = solve_restricted(&sys, &cotree, DEFAULT_ZERO_FACTOR)?;
    println!("{} curl DOFs, {} zero eigenvalues without gauge, {} with", sys.len(), ungauged.zero_count, gauged.zero_count);
    println!("  i   ungauged        gauged          plain restriction");
    for i in 0..8 {
        println!(
            "{i:3}   {:.10}   {:.10}   {:.10}",
            ungauged.nonzero()[i],
            gauged.eigenvalues[i],
            restricted.eigenvalues[i]
        );
    }
    println!("max relative difference gauged vs ungauged: {:e}", compare_spectra(&ungauged, &gauged).max_rel_diff());
    Ok(())
}
