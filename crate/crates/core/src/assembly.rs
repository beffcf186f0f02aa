//! Curl-curl stiffness and mass matrices on the hierarchical curl-conforming space.
//!
//! Integration runs over active cells only, i.e. level-`ℓ` cells of
//! `Ω_ℓ \ Ω_{ℓ+1}`. On such a cell every active function of level `ℓ' ≤ ℓ` is a
//! polynomial, so a `(p+1)²` Gauss rule integrates the mass integrand exactly
//! (and the stiffness one a fortiori) for the affine geometry.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hierarchy::{HierarchicalMesh, HierarchicalSpace};
use crate::quadrature::gauss_on;
use crate::sparse::CsrMatrix;
use crate::tensor::{Axis, FormSpace, FunctionIndex, Geometry, LevelSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Reluctivity `ν` in the curl-curl term.
    pub nu: f64,
    /// Permittivity `ε` in the mass term.
    pub epsilon: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material { nu: 1.0, epsilon: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `∫ ν curl u · curl v`.
    pub stiffness: CsrMatrix,
    /// `∫ ε u · v`.
    pub mass: CsrMatrix,
    pub material: Material,
    pub geometry: Geometry,
}

impl AssembledSystem {
    pub fn len(&self) -> usize {
        self.mass.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One active function seen from one cell: global DOF, component, and per Gauss point
/// its parametric value and parametric curl.
struct LocalFunction {
    dof: usize,
    component: usize,
    values: Vec<f64>,
    curls: Vec<f64>,
}

/// Univariate values and derivatives at the Gauss points of one direction.
struct Tabulated {
    first: usize,
    /// `[point][function]`
    values: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
}

fn tabulate(space: &crate::bspline::UnivariateSpace, points: &[f64]) -> Result<Tabulated> {
    let mut first = None;
    let mut values = Vec::with_capacity(points.len());
    let mut derivs = Vec::with_capacity(points.len());
    for &x in points {
        let (v, d) = if space.eval_degree() == 0 {
            (space.eval_basis(x, 0)?, None)
        } else {
            let (v, d) = space.eval_with_derivative(x)?;
            (v, Some(d))
        };
        if *first.get_or_insert(v.first) != v.first {
            return Err(Error::Consistency("Gauss points of one cell straddle a knot span".into()));
        }
        derivs.push(d.map_or_else(|| vec![0.0; v.values.len()], |d| d.values));
        values.push(v.values);
    }
    Ok(Tabulated { first: first.unwrap(), values, derivs })
}

fn cell_functions(
    mesh: &HierarchicalMesh,
    space: &HierarchicalSpace,
    xs: &[f64],
    ys: &[f64],
    level: usize,
) -> Result<Vec<LocalFunction>> {
    let basis = space.basis(1);
    let nq = xs.len() * ys.len();
    let mut out = Vec::new();
    for l in 0..=level {
        let lev = mesh.level(l);
        let sx = tabulate(lev.standard(Axis::X), xs)?;
        let sy = tabulate(lev.standard(Axis::Y), ys)?;
        let cx = tabulate(lev.curry_schoenberg(Axis::X), xs)?;
        let cy = tabulate(lev.curry_schoenberg(Axis::Y), ys)?;
        for (component, (fx, fy)) in [(&cx, &sy), (&sx, &cy)].into_iter().enumerate() {
            let fs = if component == 0 { FormSpace::X1(Axis::X) } else { FormSpace::X1(Axis::Y) };
            for tj in 0..fy.values[0].len() {
                for ti in 0..fx.values[0].len() {
                    let f = FunctionIndex { space: fs, i: fx.first + ti, j: fy.first + tj };
                    let Some(dof) = basis.global(l, lev.linear(f)) else { continue };
                    let mut values = Vec::with_capacity(nq);
                    let mut curls = Vec::with_capacity(nq);
                    for qy in 0..ys.len() {
                        for qx in 0..xs.len() {
                            values.push(fx.values[qx][ti] * fy.values[qy][tj]);
                            // curl û = ∂₁û₂ - ∂₂û₁
                            curls.push(if component == 0 {
                                -fx.values[qx][ti] * fy.derivs[qy][tj]
                            } else {
                                fx.derivs[qx][ti] * fy.values[qy][tj]
                            });
                        }
                    }
                    out.push(LocalFunction { dof, component, values, curls });
                }
            }
        }
    }
    Ok(out)
}

type Triplets = Vec<(usize, usize, f64)>;

fn cell_contribution(
    mesh: &HierarchicalMesh,
    space: &HierarchicalSpace,
    geometry: &Geometry,
    material: Material,
    level: usize,
    cell: (usize, usize),
) -> Result<(Triplets, Triplets)> {
    let lev = mesh.level(level);
    let q = lev.degree() + 1;
    let bx = lev.standard(Axis::X).breakpoints();
    let by = lev.standard(Axis::Y).breakpoints();
    let (xs, wx) = gauss_on(q, bx[cell.0], bx[cell.0 + 1]);
    let (ys, wy) = gauss_on(q, by[cell.1], by[cell.1 + 1]);
    let weights: Vec<f64> = wy.iter().flat_map(|&b| wx.iter().map(move |&a| a * b)).collect();
    let funcs = cell_functions(mesh, space, &xs, &ys, level)?;

    let [a, b] = geometry.scale;
    let curl_factor = material.nu / (a * b);
    let mass_factor = [material.epsilon * b / a, material.epsilon * a / b];
    let mut k = Vec::with_capacity(funcs.len() * funcs.len());
    let mut m = Vec::with_capacity(funcs.len() * funcs.len() / 2);
    for u in &funcs {
        for v in &funcs {
            let kv: f64 = (0..weights.len()).map(|t| weights[t] * u.curls[t] * v.curls[t]).sum();
            k.push((u.dof, v.dof, curl_factor * kv));
            if u.component == v.component {
                let mv: f64 = (0..weights.len()).map(|t| weights[t] * u.values[t] * v.values[t]).sum();
                m.push((u.dof, v.dof, mass_factor[u.component] * mv));
            }
        }
    }
    Ok((k, m))
}

/// Assembles `K` and `M` on `ℋ¹_L`. Cells are processed in parallel; the triplet
/// lists are concatenated in cell order, so the result does not depend on the
/// number of threads.
pub fn assemble(
    mesh: &HierarchicalMesh,
    space: &HierarchicalSpace,
    geometry: Geometry,
    material: Material,
) -> Result<AssembledSystem> {
    if !(material.nu > 0.0 && material.epsilon > 0.0) {
        return Err(Error::arg(format!(
            "material parameters must be positive (nu = {}, epsilon = {})",
            material.nu, material.epsilon
        )));
    }
    let cells: Vec<(usize, (usize, usize))> =
        (0..mesh.num_levels()).flat_map(|l| mesh.active_cells(l).iter().map(move |c| (l, c)).collect::<Vec<_>>()).collect();
    let parts: Vec<(Triplets, Triplets)> = cells
        .par_iter()
        .map(|&(l, c)| cell_contribution(mesh, space, &geometry, material, l, c))
        .collect::<Result<_>>()?;
    let n = space.basis(1).len();
    let (mut k, mut m) = (Vec::new(), Vec::new());
    for (pk, pm) in parts {
        k.extend(pk);
        m.extend(pm);
    }
    Ok(AssembledSystem {
        stiffness: CsrMatrix::from_triplets(n, n, k),
        mass: CsrMatrix::from_triplets(n, n, m),
        material,
        geometry,
    })
}

/// Mass matrix of all of `X⁰` on one level (boundary functions included), in the
/// physical domain.
pub fn scalar_mass(level: &LevelSpace, geometry: Geometry) -> Result<CsrMatrix> {
    let q = level.degree() + 1;
    let bx = level.standard(Axis::X).breakpoints();
    let by = level.standard(Axis::Y).breakpoints();
    let [m1, m2] = level.elements();
    let mut triplets = Vec::new();
    for e2 in 0..m2 {
        for e1 in 0..m1 {
            let (xs, wx) = gauss_on(q, bx[e1], bx[e1 + 1]);
            let (ys, wy) = gauss_on(q, by[e2], by[e2 + 1]);
            let tx = tabulate(level.standard(Axis::X), &xs)?;
            let ty = tabulate(level.standard(Axis::Y), &ys)?;
            let (nx, ny) = (tx.values[0].len(), ty.values[0].len());
            for bj in 0..ny {
                for bi in 0..nx {
                    for aj in 0..ny {
                        for ai in 0..nx {
                            let mut s = 0.0;
                            for qy in 0..q {
                                for qx in 0..q {
                                    s += wx[qx]
                                        * wy[qy]
                                        * tx.values[qx][ai]
                                        * ty.values[qy][aj]
                                        * tx.values[qx][bi]
                                        * ty.values[qy][bj];
                                }
                            }
                            let f = |i, j| level.linear(FunctionIndex { space: FormSpace::X0, i, j });
                            triplets.push((
                                f(tx.first + ai, ty.first + aj),
                                f(tx.first + bi, ty.first + bj),
                                s * geometry.det_jacobian(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let n = level.dim(0);
    Ok(CsrMatrix::from_triplets(n, n, triplets))
}
