//! Discrete gradient between hierarchical spaces, `ℋ⁰_L → ℋ¹_L`.
//!
//! On one level the gradient of `B_{ij}` is a signed sum of level `X¹` functions.
//! Those that are deactivated are rewritten through the two-scale relation on the
//! next level, and so on until every coefficient sits on an active function. A
//! coefficient that lands on a function which is neither active nor deactivated
//! means the hierarchical sequence is not exact and is reported as an error.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hierarchy::{HierarchicalMesh, HierarchicalSpace};
use crate::sparse::CsrMatrix;
use crate::tensor::{Axis, FormSpace, FunctionIndex};

type Rows = Vec<Vec<(usize, f64)>>;

/// Per level: two-scale rows of `[standard x, standard y, CS x, CS y]` towards `ℓ+1`.
fn refinement_tables(mesh: &HierarchicalMesh) -> Result<Vec<[Rows; 4]>> {
    (0..mesh.finest())
        .map(|l| {
            let (c, f) = (mesh.level(l), mesh.level(l + 1));
            Ok([
                c.standard(Axis::X).refinement_coefficients(f.standard(Axis::X))?,
                c.standard(Axis::Y).refinement_coefficients(f.standard(Axis::Y))?,
                c.curry_schoenberg(Axis::X).refinement_coefficients(f.curry_schoenberg(Axis::X))?,
                c.curry_schoenberg(Axis::Y).refinement_coefficients(f.curry_schoenberg(Axis::Y))?,
            ])
        })
        .collect()
}

/// `|ℋ¹_L| × |ℋ⁰_L|` matrix of the gradient in the hierarchical bases.
pub fn hierarchical_gradient(mesh: &HierarchicalMesh, space: &HierarchicalSpace) -> Result<CsrMatrix> {
    let (h0, h1) = (space.basis(0), space.basis(1));
    let tables = refinement_tables(mesh)?;
    let grads: Vec<CsrMatrix> = mesh.levels().iter().map(|s| s.gradient_operator().0.transpose()).collect();
    let mut triplets = Vec::new();

    for col in 0..h0.len() {
        let (l0, t0) = h0.local(col);
        let mut pending: BTreeMap<(usize, usize), f64> = grads[l0].row(t0).map(|(r, v)| ((l0, r), v)).collect();
        while let Some(((l, lin), c)) = pending.pop_first() {
            if c.abs() < 1e-12 {
                continue;
            }
            if let Some(g) = h1.global(l, lin) {
                triplets.push((g, col, c));
                continue;
            }
            if l == mesh.finest() || h1.deactivated(l).binary_search(&lin).is_err() {
                return Err(Error::Consistency(format!(
                    "gradient of X0 DOF {col} reaches level-{l} X1 function {lin}, which is not in the hierarchical basis"
                )));
            }
            let f = mesh.level(l).unlinear(1, lin);
            let [sx, sy, cx, cy] = &tables[l];
            let (rx, ry) = match f.space {
                FormSpace::X1(Axis::X) => (&cx[f.i], &sy[f.j]),
                _ => (&sx[f.i], &cy[f.j]),
            };
            let fine = mesh.level(l + 1);
            for &(j, vy) in ry {
                for &(i, vx) in rx {
                    let child = fine.linear(FunctionIndex { space: f.space, i, j });
                    *pending.entry((l + 1, child)).or_insert(0.0) += c * vx * vy;
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(h1.len(), h0.len(), triplets))
}
