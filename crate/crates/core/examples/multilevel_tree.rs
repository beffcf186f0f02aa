//! Per-level Kruskal trees, their verification, and the multi-level tree whose edges
//! are removed from the curl-conforming space.
//!
//! cargo run --example multilevel_tree

use hbgauge::gauging::{build_level_tree, build_multilevel_tree, gauge_indices, verify_level_tree};
use hbgauge::greville::build_level_graphs;
use hbgauge::hierarchy::{CellBox, HierarchicalMesh, HierarchicalSpace};
use hbgauge::tensor::Geometry;

fn main() -> hbgauge::Result<()> {
    let refinement = [vec![CellBox::new([4, 12], [4, 12])], vec![CellBox::new([12, 20], [12, 20])]];
    for p in [1, 3] {
        let mesh = HierarchicalMesh::build(p, [8, 8], &refinement)?;
        let space = HierarchicalSpace::new(&mesh)?;
        let graphs = build_level_graphs(&mesh, &space, Geometry::default())?;
        let trees: Vec<_> = graphs.iter().map(build_level_tree).collect();
        println!("p = {p}");
        for (g, t) in graphs.iter().zip(&trees) {
            let s = verify_level_tree(g, t)?;
            println!(
                "  level {}: |T| = {} = {} nodes - {} components; boundary {}, active {}, deactivated {}",
                s.level, s.tree_edges, s.nodes, s.components, s.boundary_tree_edges, s.active_tree_edges, s.deactivated_tree_edges
            );
        }
        let m = build_multilevel_tree(&trees, space.basis(1))?;
        println!(
            "  |M_L| = {}, dim W0 = {}, cotree keeps {} of {} curl DOFs",
            m.len(),
            space.basis(0).len(),
            gauge_indices(&m).len(),
            space.basis(1).len()
        );
    }
    Ok(())
}
