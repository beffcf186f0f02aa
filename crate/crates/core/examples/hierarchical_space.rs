//! Hierarchical mesh with a centrally refined square (three levels), the active and
//! deactivated functions of each space, and the admissibility report.
//!
//! cargo run --example hierarchical_space

use hbgauge::hierarchy::{check_admissibility, CellBox, HierarchicalMesh, HierarchicalSpace};

fn main() -> hbgauge::Result<()> {
    let refinement = [vec![CellBox::new([4, 12], [4, 12])], vec![CellBox::new([12, 20], [12, 20])]];
    for p in [1, 3] {
        let mesh = HierarchicalMesh::build(p, [8, 8], &refinement)?;
        let space = HierarchicalSpace::new(&mesh)?;
        println!("p = {p}");
        for l in 0..mesh.num_levels() {
            println!(
                "  level {l}: {} active cells, active X0/X1/X2 = {}/{}/{}, deactivated = {}/{}/{}",
                mesh.active_cells(l).len(),
                space.basis(0).active(l).len(),
                space.basis(1).active(l).len(),
                space.basis(2).active(l).len(),
                space.basis(0).deactivated(l).len(),
                space.basis(1).deactivated(l).len(),
                space.basis(2).deactivated(l).len(),
            );
        }
        println!(
            "  dim W0/W1/W2 = {}/{}/{}",
            space.basis(0).len(),
            space.basis(1).len(),
            space.basis(2).len()
        );
        let report = check_admissibility(&mesh);
        println!("  admissible: {}, regions generated by X0 supports: {:?}", report.passed(), report.generated_by_x0);
    }

    // two diagonal blocks touch at a corner: the support of the X0 function there
    // minus the refined region falls apart
    let mesh = HierarchicalMesh::build(1, [4, 4], &[vec![CellBox::new([0, 2], [0, 2]), CellBox::new([2, 4], [2, 4])]])?;
    for f in check_admissibility(&mesh).failures {
        println!("rejected: level {} function {:?}: {:?}", f.level, f.function, f.defect);
    }
    Ok(())
}
