//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use hbgauge::assembly::AssembledSystem;
use hbgauge::config::ExperimentConfig;
use hbgauge::gauging::MultiLevelTree;
use hbgauge::greville::{EntityClass, LevelGraph};
use hbgauge::hierarchy::{CellBox, HierarchicalMesh, HierarchicalSpace};
use hbgauge::quadrature::gauss_on;
use hbgauge::tensor::{Axis, FormSpace, Geometry};
use nalgebra::DMatrix;

pub fn central_square() -> Vec<Vec<CellBox>> {
    vec![vec![CellBox::new([4, 12], [4, 12])], vec![CellBox::new([12, 20], [12, 20])]]
}

pub fn ring_with_hole() -> Vec<Vec<CellBox>> {
    let b = CellBox::new;
    vec![
        vec![b([0, 16], [0, 6]), b([0, 16], [10, 16]), b([0, 6], [6, 10]), b([10, 16], [6, 10])],
        vec![b([4, 28], [4, 10]), b([4, 28], [22, 28]), b([4, 10], [10, 22]), b([22, 28], [10, 22])],
    ]
}

pub fn config(name: &str, degree: usize, base: [usize; 2], refinement: Vec<Vec<CellBox>>) -> ExperimentConfig {
    let text = serde_json::json!({
        "name": name,
        "degree": degree,
        "base_elements": base,
        "levels": refinement.len(),
        "refinement": refinement,
    });
    ExperimentConfig::from_json(&text.to_string()).unwrap()
}

/// The meshes every acceptance criterion is evaluated on.
pub fn acceptance_configs() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for p in [1, 3] {
        out.push(config(&format!("central square p={p}"), p, [8, 8], central_square()));
        out.push(config(&format!("ring with hole p={p}"), p, [8, 8], ring_with_hole()));
    }
    for p in 1..=3 {
        out.push(config(&format!("single level p={p}"), p, [8, 8], vec![]));
    }
    out
}

/// Stiffness and mass assembled without the hierarchy machinery: every hierarchical
/// function is evaluated point by point on every cell of the finest global grid.
pub fn brute_force_system(mesh: &HierarchicalMesh, space: &HierarchicalSpace, geometry: Geometry) -> (DMatrix<f64>, DMatrix<f64>) {
    let basis = space.basis(1);
    let n = basis.len();
    let fine = mesh.level(mesh.finest());
    let q = mesh.degree() + 1;
    let bx = fine.standard(Axis::X).breakpoints().to_vec();
    let by = fine.standard(Axis::Y).breakpoints().to_vec();
    let [a, b] = geometry.scale;
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    for e2 in 0..by.len() - 1 {
        for e1 in 0..bx.len() - 1 {
            let (xs, wx) = gauss_on(q, bx[e1], bx[e1 + 1]);
            let (ys, wy) = gauss_on(q, by[e2], by[e2 + 1]);
            for (qy, &y) in ys.iter().enumerate() {
                for (qx, &x) in xs.iter().enumerate() {
                    let w = wx[qx] * wy[qy];
                    let mut vals = Vec::with_capacity(n);
                    for g in 0..n {
                        let (l, lin) = basis.local(g);
                        let lev = mesh.level(l);
                        let f = lev.unlinear(1, lin);
                        let v = lev.basis_value(f, [x, y]).unwrap();
                        let (comp, curl) = match f.space {
                            FormSpace::X1(Axis::X) => (0, -lev.basis_partial(f, [x, y], Axis::Y).unwrap()),
                            _ => (1, lev.basis_partial(f, [x, y], Axis::X).unwrap()),
                        };
                        vals.push((comp, v, curl));
                    }
                    for (r, &(cr, vr, kr)) in vals.iter().enumerate() {
                        if vr == 0.0 && kr == 0.0 {
                            continue;
                        }
                        for (c, &(cc, vc, kc)) in vals.iter().enumerate() {
                            k[(r, c)] += w * kr * kc / (a * b);
                            if cr == cc {
                                let s = if cr == 0 { b / a } else { a / b };
                                m[(r, c)] += w * vr * vc * s;
                            }
                        }
                    }
                }
            }
        }
    }
    (k, m)
}

pub fn relative_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

pub fn system_gap(sys: &AssembledSystem, oracle: &(DMatrix<f64>, DMatrix<f64>)) -> f64 {
    relative_gap(&sys.stiffness.to_dense(), &oracle.0).max(relative_gap(&sys.mass.to_dense(), &oracle.1))
}

/// A tree/cotree swap that breaks the gauge: a tree edge `t` whose active node `v` is
/// a leaf of the multi-level tree (all other edges at `v` are cotree DOFs) is exchanged
/// for a cotree edge away from `v`. The gradient of the function at `v` then lies in
/// the cotree span.
pub fn breaking_swap(
    graphs: &[LevelGraph],
    space: &HierarchicalSpace,
    tree: &MultiLevelTree,
) -> Option<(usize, usize)> {
    let basis = space.basis(1);
    for graph in graphs {
        let grid = graph.grid();
        let l = graph.level();
        let [nx, ny] = grid.shape();
        for v in graph.nodes_of(EntityClass::Active) {
            let (i, j) = grid.node_ij(v);
            if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                continue;
            }
            let edges = [
                grid.edge_id(Axis::X, i - 1, j),
                grid.edge_id(Axis::X, i, j),
                grid.edge_id(Axis::Y, i, j - 1),
                grid.edge_id(Axis::Y, i, j),
            ];
            let dofs: Option<Vec<usize>> = edges.iter().map(|&e| basis.global(l, e)).collect();
            let Some(dofs) = dofs else { continue };
            let in_tree: Vec<usize> = dofs.iter().copied().filter(|d| tree.tree().binary_search(d).is_ok()).collect();
            if in_tree.len() != 1 {
                continue;
            }
            let c = tree.cotree().iter().copied().find(|c| !dofs.contains(c))?;
            return Some((in_tree[0], c));
        }
    }
    None
}
