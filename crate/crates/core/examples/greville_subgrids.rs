//! Greville subgrids of a refined region with a hole: entity classification per level
//! and SVG drawings (written to `out/greville_subgrids`).
//!
//! cargo run --example greville_subgrids

use hbgauge::gauging::build_level_tree;
use hbgauge::greville::{build_level_graphs, EntityClass};
use hbgauge::hierarchy::{CellBox, HierarchicalMesh, HierarchicalSpace};
use hbgauge::report::level_svg;
use hbgauge::tensor::Geometry;

fn main() -> hbgauge::Result<()> {
    let b = CellBox::new;
    let refinement = [
        vec![b([0, 16], [0, 6]), b([0, 16], [10, 16]), b([0, 6], [6, 10]), b([10, 16], [6, 10])],
        vec![b([4, 28], [4, 10]), b([4, 28], [22, 28]), b([4, 10], [10, 22]), b([22, 28], [10, 22])],
    ];
    let mesh = HierarchicalMesh::build(1, [8, 8], &refinement)?;
    let space = HierarchicalSpace::new(&mesh)?;
    let graphs = build_level_graphs(&mesh, &space, Geometry::default())?;
    let dir = std::path::Path::new("out/greville_subgrids");
    std::fs::create_dir_all(dir)?;
    for g in &graphs {
        let count = |c| (g.nodes_of(c).len(), g.edges_of(c).len());
        println!(
            "level {}: {} nodes, {} edges, {} components, {} boundary components",
            g.level(),
            g.nodes().len(),
            g.edges().len(),
            g.num_components(),
            g.num_boundary_components()
        );
        for class in [EntityClass::Boundary, EntityClass::Active, EntityClass::Deactivated] {
            let (n, e) = count(class);
            println!("  {class:?}: {n} nodes, {e} edges (weight {})", class.weight());
        }
        let path = dir.join(format!("level{}.svg", g.level()));
        std::fs::write(&path, level_svg(g, &build_level_tree(g)))?;
        println!("  wrote {}", path.display());
    }
    Ok(())
}
