//! Univariate B-splines on open knot vectors over `[0, 1]`.
//!
//! Two flavors share one knot vector `Ξ` of degree `p`:
//!
//! * the standard degree-`p` basis `B_i`, `i = 0..n`;
//! * the Curry-Schoenberg degree-`(p-1)` basis `D_j`, `j = 0..n-1`, built on `Ξ'`
//!   (`Ξ` without its first and last knot) and scaled by `p / (Ξ'_{j+p} - Ξ'_j)`.
//!
//! With this scaling the derivative of a standard function is a difference of two
//! consecutive Curry-Schoenberg functions, `B_i' = D_{i-1} - D_i` (zero-based, with
//! `D_{-1} = D_{n-1} = 0`), which is what turns the spline gradient into a signed
//! incidence matrix.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Open knot vector on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::arg("degree must be at least 1"));
        }
        let len = knots.len();
        if len < 2 * (degree + 1) {
            return Err(Error::arg(format!(
                "knot vector of degree {degree} needs at least {} knots, got {len}",
                2 * (degree + 1)
            )));
        }
        if knots.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::arg("knots must be nondecreasing"));
        }
        if knots[..=degree].iter().any(|&k| k != 0.0) || knots[len - degree - 1..].iter().any(|&k| k != 1.0) {
            return Err(Error::arg("knot vector must be open on [0, 1]"));
        }
        let interior = &knots[degree + 1..len - degree - 1];
        if interior.iter().any(|&k| k <= 0.0 || k >= 1.0) {
            return Err(Error::arg("end knots must have multiplicity exactly p + 1"));
        }
        let mut run = 0;
        for (t, &k) in interior.iter().enumerate() {
            run = if t > 0 && interior[t - 1] == k { run + 1 } else { 1 };
            if run > degree {
                return Err(Error::arg(format!("interior knot {k} has multiplicity above {degree}")));
            }
        }
        let kv = KnotVector { degree, knots };
        if kv.num_functions() < degree + 1 {
            return Err(Error::arg("knot vector has fewer than p + 1 functions"));
        }
        Ok(kv)
    }

    /// Uniform open knot vector with `elements` spans; interior knots are `k / elements`.
    pub fn uniform(degree: usize, elements: usize) -> Result<Self> {
        if elements == 0 {
            return Err(Error::arg("at least one element required"));
        }
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..elements).map(|k| k as f64 / elements as f64));
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Self::new(degree, knots)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number `n` of degree-`p` functions.
    pub fn num_functions(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values, i.e. element boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.knots.clone();
        b.dedup();
        b
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints().len() - 1
    }

    /// Inserts the midpoint of every nonempty span once.
    pub fn dyadic_refine(&self) -> KnotVector {
        let mut knots = Vec::with_capacity(2 * self.knots.len());
        for (t, &k) in self.knots.iter().enumerate() {
            knots.push(k);
            if let Some(&next) = self.knots.get(t + 1) {
                if next > k {
                    knots.push(0.5 * (k + next));
                }
            }
        }
        KnotVector { degree: self.degree, knots }
    }
}

/// Which basis a [`UnivariateSpace`] spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Standard,
    CurrySchoenberg,
}

/// Values of the nonzero basis functions (or one of their derivatives) at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    pub first: usize,
    pub values: Vec<f64>,
}

impl BasisValues {
    pub fn indices(&self) -> Range<usize> {
        self.first..self.first + self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSpace {
    kv: KnotVector,
    flavor: Flavor,
    eval_knots: Vec<f64>,
    eval_degree: usize,
    scale: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl UnivariateSpace {
    pub fn new(kv: KnotVector, flavor: Flavor) -> Self {
        let p = kv.degree();
        let (eval_knots, eval_degree) = match flavor {
            Flavor::Standard => (kv.knots().to_vec(), p),
            Flavor::CurrySchoenberg => (kv.knots()[1..kv.knots().len() - 1].to_vec(), p - 1),
        };
        let dim = eval_knots.len() - eval_degree - 1;
        let scale = match flavor {
            Flavor::Standard => vec![1.0; dim],
            Flavor::CurrySchoenberg => (0..dim)
                .map(|j| p as f64 / (eval_knots[j + p] - eval_knots[j]))
                .collect(),
        };
        let breakpoints = kv.breakpoints();
        UnivariateSpace { kv, flavor, eval_knots, eval_degree, scale, breakpoints }
    }

    pub fn standard(kv: KnotVector) -> Self {
        Self::new(kv, Flavor::Standard)
    }

    pub fn curry_schoenberg(kv: KnotVector) -> Self {
        Self::new(kv, Flavor::CurrySchoenberg)
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.kv
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Polynomial degree of the functions actually evaluated (`p` or `p - 1`).
    pub fn eval_degree(&self) -> usize {
        self.eval_degree
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Knot span containing `x`; `x = 1` falls into the last nonempty span.
    fn find_span(&self, x: f64) -> usize {
        let u = &self.eval_knots;
        let q = self.eval_degree;
        let n = self.dim();
        if x >= u[n] {
            return n - 1;
        }
        let (mut lo, mut hi) = (q, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < u[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Nonzero basis functions, or their `deriv_order`-th derivatives, at `x`.
    pub fn eval_basis(&self, x: f64, deriv_order: usize) -> Result<BasisValues> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        if deriv_order > self.kv.degree() {
            return Err(Error::arg(format!(
                "derivative order {deriv_order} exceeds degree {}",
                self.kv.degree()
            )));
        }
        let span = self.find_span(x);
        let q = self.eval_degree;
        let ders = ders_basis_funs(span, x, q, &self.eval_knots, deriv_order);
        let first = span - q;
        let mut values = ders.into_iter().nth(deriv_order).unwrap();
        for (v, s) in values.iter_mut().zip(&self.scale[first..]) {
            *v *= s;
        }
        Ok(BasisValues { first, values })
    }

    /// Values and first derivatives at `x` in one pass.
    pub fn eval_with_derivative(&self, x: f64) -> Result<(BasisValues, BasisValues)> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        let span = self.find_span(x);
        let q = self.eval_degree;
        let first = span - q;
        let mut ders = ders_basis_funs(span, x, q, &self.eval_knots, 1).into_iter();
        let mut value = ders.next().unwrap();
        let mut deriv = ders.next().unwrap();
        for t in 0..=q {
            value[t] *= self.scale[first + t];
            deriv[t] *= self.scale[first + t];
        }
        Ok((BasisValues { first, values: value }, BasisValues { first, values: deriv }))
    }

    /// Value of a single basis function (zero outside its support).
    pub fn eval_single(&self, index: usize, x: f64, deriv_order: usize) -> Result<f64> {
        let b = self.eval_basis(x, deriv_order)?;
        Ok(if b.indices().contains(&index) { b.values[index - b.first] } else { 0.0 })
    }

    /// Elements covered by the closed support of function `index`.
    pub fn support_elements(&self, index: usize) -> Range<usize> {
        let lo = self.eval_knots[index];
        let hi = self.eval_knots[index + self.eval_degree + 1];
        self.element_of_breakpoint(lo)..self.element_of_breakpoint(hi)
    }

    /// Functions that do not vanish identically on element `e`.
    pub fn functions_on_element(&self, e: usize) -> Range<usize> {
        let mid = 0.5 * (self.breakpoints[e] + self.breakpoints[e + 1]);
        let span = self.find_span(mid);
        span - self.eval_degree..span + 1
    }

    fn element_of_breakpoint(&self, v: f64) -> usize {
        self.breakpoints
            .iter()
            .position(|&b| b == v)
            .expect("knot values are breakpoints")
    }

    /// Two-scale coefficients: row `c` lists `(m, r)` with `self_c = Σ r · fine_m`.
    ///
    /// Found by collocation at the centres of the fine supports, which satisfy the
    /// Schoenberg-Whitney condition. Entries below `1e-12` are dropped.
    pub fn refinement_coefficients(&self, fine: &UnivariateSpace) -> Result<Vec<Vec<(usize, f64)>>> {
        if self.flavor != fine.flavor || self.kv.degree() != fine.kv.degree() {
            return Err(Error::arg("refinement needs the same flavor and degree"));
        }
        let fk = fine.kv.knots();
        let mut t = 0;
        for &k in self.kv.knots() {
            while t < fk.len() && fk[t] != k {
                t += 1;
            }
            if t == fk.len() {
                return Err(Error::arg("fine knot vector does not contain the coarse one"));
            }
            t += 1;
        }
        let q = fine.eval_degree;
        let nf = fine.dim();
        let points: Vec<f64> =
            (0..nf).map(|m| 0.5 * (fine.eval_knots[m] + fine.eval_knots[m + q + 1])).collect();
        let mut a = DMatrix::zeros(nf, nf);
        let mut b = DMatrix::zeros(nf, self.dim());
        for (r, &x) in points.iter().enumerate() {
            let fv = fine.eval_basis(x, 0)?;
            for (m, v) in fv.indices().zip(fv.values) {
                a[(r, m)] = v;
            }
            let cv = self.eval_basis(x, 0)?;
            for (c, v) in cv.indices().zip(cv.values) {
                b[(r, c)] = v;
            }
        }
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numerical("singular collocation matrix in refinement".into()))?;
        Ok((0..self.dim())
            .map(|c| (0..nf).filter(|&m| x[(m, c)].abs() > 1e-12).map(|m| (m, x[(m, c)])).collect())
            .collect())
    }

    /// Greville abscissae `(ξ_{i+1} + … + ξ_{i+p}) / p`; standard flavor only.
    pub fn greville_abscissae(&self) -> Result<Vec<f64>> {
        if self.flavor != Flavor::Standard {
            return Err(Error::arg("Greville abscissae are defined for the standard basis only"));
        }
        let p = self.kv.degree();
        let u = self.kv.knots();
        Ok((0..self.dim())
            .map(|i| u[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect())
    }
}

/// Nonzero B-splines of degree `p` and their derivatives up to order `n` on knot span
/// `span` (Piegl and Tiller, algorithm A2.3). `ders[k][j]` is the `k`-th derivative of
/// function `span - p + j`. Orders above `p` are zero.
fn ders_basis_funs(span: usize, x: f64, p: usize, u: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - u[span + 1 - j];
        right[j] = u[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    let mut ders = vec![vec![0.0; p + 1]; n + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let nd = n.min(p);
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0, 1);
        a[0][0] = 1.0;
        for k in 1..=nd {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=nd {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_scale_relation_reproduces_coarse_functions() {
        for p in 1..=3 {
            let kv = KnotVector::uniform(p, 5).unwrap();
            for flavor in [Flavor::Standard, Flavor::CurrySchoenberg] {
                let coarse = UnivariateSpace::new(kv.clone(), flavor);
                let fine = UnivariateSpace::new(kv.dyadic_refine(), flavor);
                let rows = coarse.refinement_coefficients(&fine).unwrap();
                for x in (0..=97).map(|t| t as f64 / 97.0) {
                    for (c, row) in rows.iter().enumerate() {
                        let lhs = coarse.eval_single(c, x, 0).unwrap();
                        let rhs: f64 = row.iter().map(|&(m, r)| r * fine.eval_single(m, x, 0).unwrap()).sum();
                        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
                    }
                }
            }
        }
        let a = UnivariateSpace::standard(KnotVector::uniform(2, 4).unwrap());
        let b = UnivariateSpace::standard(KnotVector::uniform(2, 3).unwrap());
        assert!(a.refinement_coefficients(&b).is_err());
    }

    /// Textbook recursion, evaluated function by function.
    fn cox_de_boor(u: &[f64], i: usize, p: usize, x: f64) -> f64 {
        if p == 0 {
            let last = u[u.len() - 1];
            let inside = u[i] <= x && x < u[i + 1];
            // left-limit convention at the right end
            let at_end = x == last && u[i] < u[i + 1] && u[i + 1] == last;
            return if inside || at_end { 1.0 } else { 0.0 };
        }
        let mut v = 0.0;
        let d1 = u[i + p] - u[i];
        if d1 > 0.0 {
            v += (x - u[i]) / d1 * cox_de_boor(u, i, p - 1, x);
        }
        let d2 = u[i + p + 1] - u[i + 1];
        if d2 > 0.0 {
            v += (u[i + p + 1] - x) / d2 * cox_de_boor(u, i + 1, p - 1, x);
        }
        v
    }

    #[test]
    fn hat_functions_at_midpoint() {
        let s = UnivariateSpace::standard(KnotVector::new(1, vec![0.0, 0.0, 0.5, 1.0, 1.0]).unwrap());
        let b = s.eval_basis(0.25, 0).unwrap();
        assert_eq!(b.first, 0);
        assert_eq!(b.values, vec![0.5, 0.5]);
    }

    #[test]
    fn quadratic_matches_recursion() {
        let knots = vec![0.0, 0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 1.0, 1.0];
        let s = UnivariateSpace::standard(KnotVector::new(2, knots.clone()).unwrap());
        let b = s.eval_basis(0.5, 0).unwrap();
        for (t, v) in b.values.iter().enumerate() {
            assert_abs_diff_eq!(*v, cox_de_boor(&knots, b.first + t, 2, 0.5), epsilon = 1e-14);
        }
        // functions outside the returned window vanish
        for i in 0..s.dim() {
            if !b.indices().contains(&i) {
                assert_eq!(cox_de_boor(&knots, i, 2, 0.5), 0.0);
            }
        }
    }

    #[test]
    fn right_end_uses_left_limit() {
        let s = UnivariateSpace::standard(KnotVector::uniform(3, 4).unwrap());
        let b = s.eval_basis(1.0, 0).unwrap();
        assert_eq!(b.first + b.values.len(), s.dim());
        assert_eq!(*b.values.last().unwrap(), 1.0);
    }

    #[test]
    fn evaluation_errors() {
        let s = UnivariateSpace::standard(KnotVector::uniform(2, 4).unwrap());
        assert!(matches!(s.eval_basis(1.5, 0), Err(Error::Domain(_))));
        assert!(matches!(s.eval_basis(-0.1, 0), Err(Error::Domain(_))));
        assert!(matches!(s.eval_basis(0.3, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn greville_examples() {
        let s = UnivariateSpace::standard(KnotVector::new(2, vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]).unwrap());
        assert_eq!(s.greville_abscissae().unwrap(), vec![0.0, 0.25, 0.75, 1.0]);
        let s = UnivariateSpace::standard(KnotVector::new(1, vec![0.0, 0.0, 0.5, 1.0, 1.0]).unwrap());
        assert_eq!(s.greville_abscissae().unwrap(), vec![0.0, 0.5, 1.0]);

        let s = UnivariateSpace::standard(KnotVector::uniform(3, 8).unwrap());
        let g = s.greville_abscissae().unwrap();
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        for (a, b) in g.iter().zip(g.iter().rev()) {
            assert_abs_diff_eq!(*a, 1.0 - *b, epsilon = 1e-15);
        }
        let cs = UnivariateSpace::curry_schoenberg(KnotVector::uniform(3, 8).unwrap());
        assert!(cs.greville_abscissae().is_err());
    }

    #[test]
    fn dyadic_refine_examples() {
        let kv = KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(kv.dyadic_refine().knots(), &[0.0, 0.0, 0.5, 1.0, 1.0]);
        let kv = KnotVector::new(2, vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(kv.dyadic_refine().knots(), &[0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn knot_vector_validation() {
        assert!(KnotVector::new(0, vec![0.0, 1.0]).is_err());
        assert!(KnotVector::new(1, vec![0.0, 0.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(1, vec![0.0, 0.0, 0.7, 0.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(1, vec![0.0, 0.0, 0.5, 0.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0]).is_ok());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn support_and_element_windows() {
        let s = UnivariateSpace::standard(KnotVector::uniform(2, 4).unwrap());
        assert_eq!(s.support_elements(0), 0..1);
        assert_eq!(s.support_elements(2), 0..3);
        assert_eq!(s.support_elements(5), 3..4);
        assert_eq!(s.functions_on_element(1), 1..4);
        let cs = UnivariateSpace::curry_schoenberg(KnotVector::uniform(2, 4).unwrap());
        assert_eq!(cs.dim(), 5);
        assert_eq!(cs.support_elements(0), 0..1);
        assert_eq!(cs.support_elements(2), 1..3);
        assert_eq!(cs.functions_on_element(0), 0..2);
    }
}
