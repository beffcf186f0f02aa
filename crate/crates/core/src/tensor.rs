//! Tensor-product spline de Rham spaces on one level.
//!
//! `X⁰ = S_p ⊗ S_p`, `X¹ = (D ⊗ S_p) × (S_p ⊗ D)`, `X² = D ⊗ D`, where `D` is the
//! Curry-Schoenberg basis of degree `p - 1`. Functions are addressed by a
//! [`FunctionIndex`]; the linear order is component-major, then `j`, then `i`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bspline::{KnotVector, UnivariateSpace};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// One of the three spaces of the sequence; `X1` carries its vector component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormSpace {
    X0,
    X1(Axis),
    X2,
}

impl FormSpace {
    pub fn degree(self) -> usize {
        match self {
            FormSpace::X0 => 0,
            FormSpace::X1(_) => 1,
            FormSpace::X2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionIndex {
    pub space: FormSpace,
    pub i: usize,
    pub j: usize,
}

/// Affine diagonal geometry map `F(x̂) = (a·x̂₁, b·x̂₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub scale: [f64; 2],
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { scale: [std::f64::consts::PI; 2] }
    }
}

impl Geometry {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::arg("domain scale must be positive and finite"));
        }
        Ok(Geometry { scale: [a, b] })
    }

    pub fn unit() -> Self {
        Geometry { scale: [1.0, 1.0] }
    }

    pub fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [self.scale[0] * p[0], self.scale[1] * p[1]]
    }

    pub fn det_jacobian(&self) -> f64 {
        self.scale[0] * self.scale[1]
    }

    /// Covariant push-forward `DF⁻ᵀ û`.
    pub fn push_covariant(&self, u: [f64; 2]) -> [f64; 2] {
        [u[0] / self.scale[0], u[1] / self.scale[1]]
    }

    pub fn area(&self) -> f64 {
        self.det_jacobian()
    }
}

/// The discrete gradient `X⁰ → X¹` in coefficient space: a `{-1, 0, +1}` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientOperator(pub CsrMatrix);

impl GradientOperator {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        self.0.mul_vec(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpace {
    level: usize,
    standard: [UnivariateSpace; 2],
    curry: [UnivariateSpace; 2],
}

impl LevelSpace {
    /// Uniform open knots with `elements[d]·2^level` spans per direction, obtained by
    /// dyadic refinement of the level-0 knots.
    pub fn build(degree: usize, elements: [usize; 2], level: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::arg("degree must be at least 1"));
        }
        if elements.iter().any(|&m| m < 2) {
            return Err(Error::arg("at least 2 elements per direction required"));
        }
        let mut kv = [KnotVector::uniform(degree, elements[0])?, KnotVector::uniform(degree, elements[1])?];
        for _ in 0..level {
            kv = [kv[0].dyadic_refine(), kv[1].dyadic_refine()];
        }
        let [k1, k2] = kv;
        Ok(Self::from_knots(level, k1, k2))
    }

    pub fn from_knots(level: usize, kv1: KnotVector, kv2: KnotVector) -> Self {
        LevelSpace {
            level,
            standard: [UnivariateSpace::standard(kv1.clone()), UnivariateSpace::standard(kv2.clone())],
            curry: [UnivariateSpace::curry_schoenberg(kv1), UnivariateSpace::curry_schoenberg(kv2)],
        }
    }

    /// The next finer level (dyadic refinement in both directions).
    pub fn refine(&self) -> LevelSpace {
        Self::from_knots(
            self.level + 1,
            self.standard[0].knot_vector().dyadic_refine(),
            self.standard[1].knot_vector().dyadic_refine(),
        )
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.standard[0].knot_vector().degree()
    }

    /// `(n₁, n₂)`, the number of degree-`p` functions per direction.
    pub fn n(&self) -> [usize; 2] {
        [self.standard[0].dim(), self.standard[1].dim()]
    }

    pub fn elements(&self) -> [usize; 2] {
        [self.standard[0].num_elements(), self.standard[1].num_elements()]
    }

    pub fn standard(&self, axis: Axis) -> &UnivariateSpace {
        &self.standard[axis.index()]
    }

    pub fn curry_schoenberg(&self, axis: Axis) -> &UnivariateSpace {
        &self.curry[axis.index()]
    }

    /// Univariate factors `(direction 1, direction 2)` of a space.
    pub fn factors(&self, space: FormSpace) -> (&UnivariateSpace, &UnivariateSpace) {
        match space {
            FormSpace::X0 => (&self.standard[0], &self.standard[1]),
            FormSpace::X1(Axis::X) => (&self.curry[0], &self.standard[1]),
            FormSpace::X1(Axis::Y) => (&self.standard[0], &self.curry[1]),
            FormSpace::X2 => (&self.curry[0], &self.curry[1]),
        }
    }

    pub fn shape(&self, space: FormSpace) -> [usize; 2] {
        let (a, b) = self.factors(space);
        [a.dim(), b.dim()]
    }

    /// Dimension of `Xᵏ` (both components for `k = 1`).
    pub fn dim(&self, k: usize) -> usize {
        self.spaces(k).iter().map(|&s| self.shape(s).iter().product::<usize>()).sum()
    }

    /// Component spaces of `Xᵏ`, in linear order.
    pub fn spaces(&self, k: usize) -> Vec<FormSpace> {
        match k {
            0 => vec![FormSpace::X0],
            1 => vec![FormSpace::X1(Axis::X), FormSpace::X1(Axis::Y)],
            2 => vec![FormSpace::X2],
            _ => panic!("form degree {k} out of range"),
        }
    }

    fn offset(&self, space: FormSpace) -> usize {
        match space {
            FormSpace::X1(Axis::Y) => self.shape(FormSpace::X1(Axis::X)).iter().product(),
            _ => 0,
        }
    }

    pub fn linear(&self, f: FunctionIndex) -> usize {
        let [ni, _] = self.shape(f.space);
        self.offset(f.space) + f.j * ni + f.i
    }

    pub fn unlinear(&self, k: usize, idx: usize) -> FunctionIndex {
        let mut rest = idx;
        for space in self.spaces(k) {
            let [ni, nj] = self.shape(space);
            if rest < ni * nj {
                return FunctionIndex { space, i: rest % ni, j: rest / ni };
            }
            rest -= ni * nj;
        }
        panic!("index {idx} out of range for X{k}");
    }

    /// Whether the function survives homogeneous boundary conditions.
    pub fn is_interior(&self, f: FunctionIndex) -> bool {
        let [n1, n2] = self.n();
        let inner = |v: usize, n: usize| v >= 1 && v + 2 <= n;
        match f.space {
            FormSpace::X0 => inner(f.i, n1) && inner(f.j, n2),
            FormSpace::X1(Axis::X) => inner(f.j, n2),
            FormSpace::X1(Axis::Y) => inner(f.i, n1),
            FormSpace::X2 => true,
        }
    }

    pub fn interior_indices(&self, k: usize) -> Vec<usize> {
        (0..self.dim(k)).filter(|&t| self.is_interior(self.unlinear(k, t))).collect()
    }

    /// Level elements covered by the closed support, per direction.
    pub fn support_elements(&self, f: FunctionIndex) -> (Range<usize>, Range<usize>) {
        let (a, b) = self.factors(f.space);
        (a.support_elements(f.i), b.support_elements(f.j))
    }

    /// Coefficient-level gradient: row `(i, j)` of component `X` holds `-1` at node
    /// `(i, j)` and `+1` at node `(i + 1, j)`; component `Y` likewise in `j`.
    pub fn gradient_operator(&self) -> GradientOperator {
        let mut triplets = Vec::with_capacity(2 * self.dim(1));
        for row in 0..self.dim(1) {
            let f = self.unlinear(1, row);
            let (i2, j2) = match f.space {
                FormSpace::X1(Axis::X) => (f.i + 1, f.j),
                _ => (f.i, f.j + 1),
            };
            let lo = self.linear(FunctionIndex { space: FormSpace::X0, i: f.i, j: f.j });
            let hi = self.linear(FunctionIndex { space: FormSpace::X0, i: i2, j: j2 });
            triplets.push((row, lo, -1.0));
            triplets.push((row, hi, 1.0));
        }
        GradientOperator(CsrMatrix::from_triplets(self.dim(1), self.dim(0), triplets))
    }

    /// Value of one basis function (its only nonzero component for `X¹`).
    pub fn basis_value(&self, f: FunctionIndex, pt: [f64; 2]) -> Result<f64> {
        let (a, b) = self.factors(f.space);
        Ok(a.eval_single(f.i, pt[0], 0)? * b.eval_single(f.j, pt[1], 0)?)
    }

    /// Partial derivative of one basis function along `axis`.
    pub fn basis_partial(&self, f: FunctionIndex, pt: [f64; 2], axis: Axis) -> Result<f64> {
        let (a, b) = self.factors(f.space);
        let (dx, dy) = match axis {
            Axis::X => (1, 0),
            Axis::Y => (0, 1),
        };
        Ok(a.eval_single(f.i, pt[0], dx)? * b.eval_single(f.j, pt[1], dy)?)
    }

    fn check_len(&self, k: usize, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.dim(k) {
            return Err(Error::arg(format!(
                "X{k} coefficient vector has length {}, expected {}",
                coeffs.len(),
                self.dim(k)
            )));
        }
        Ok(())
    }

    fn eval_component(&self, space: FormSpace, coeffs: &[f64], pt: [f64; 2], deriv: [usize; 2]) -> Result<f64> {
        let (a, b) = self.factors(space);
        let ba = a.eval_basis(pt[0], deriv[0])?;
        let bb = b.eval_basis(pt[1], deriv[1])?;
        let mut v = 0.0;
        for (tj, j) in bb.indices().enumerate() {
            for (ti, i) in ba.indices().enumerate() {
                let c = coeffs[self.linear(FunctionIndex { space, i, j })];
                v += c * ba.values[ti] * bb.values[tj];
            }
        }
        Ok(v)
    }

    /// Scalar field `Σ c_f B_f` of `X⁰` at parametric points.
    pub fn eval_scalar(&self, coeffs: &[f64], points: &[[f64; 2]]) -> Result<Vec<f64>> {
        self.check_len(0, coeffs)?;
        points.iter().map(|&p| self.eval_component(FormSpace::X0, coeffs, p, [0, 0])).collect()
    }

    /// Parametric gradient of an `X⁰` field, from derivatives of the degree-`p` basis.
    pub fn eval_scalar_gradient(&self, coeffs: &[f64], points: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
        self.check_len(0, coeffs)?;
        points
            .iter()
            .map(|&p| {
                Ok([
                    self.eval_component(FormSpace::X0, coeffs, p, [1, 0])?,
                    self.eval_component(FormSpace::X0, coeffs, p, [0, 1])?,
                ])
            })
            .collect()
    }

    /// Vector field of `X¹` at parametric points.
    pub fn eval_vector(&self, coeffs: &[f64], points: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
        self.check_len(1, coeffs)?;
        points
            .iter()
            .map(|&p| {
                Ok([
                    self.eval_component(FormSpace::X1(Axis::X), coeffs, p, [0, 0])?,
                    self.eval_component(FormSpace::X1(Axis::Y), coeffs, p, [0, 0])?,
                ])
            })
            .collect()
    }

    /// Scalar field in the physical domain at the image of each parametric point.
    pub fn eval_scalar_physical(&self, coeffs: &[f64], points: &[[f64; 2]], _geo: &Geometry) -> Result<Vec<f64>> {
        self.eval_scalar(coeffs, points)
    }

    /// Physical `X¹` field `DF⁻ᵀ û` at the image of each parametric point.
    pub fn eval_vector_physical(&self, coeffs: &[f64], points: &[[f64; 2]], geo: &Geometry) -> Result<Vec<[f64; 2]>> {
        Ok(self.eval_vector(coeffs, points)?.into_iter().map(|u| geo.push_covariant(u)).collect())
    }
}
