//! Dense generalized eigensolves of the Maxwell pencil `(K, M)` and spectrum comparison.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Default zero threshold factor: `τ = 1e-10 · λ_max`.
pub const DEFAULT_ZERO_FACTOR: f64 = 1e-10;

/// Sorted eigenvalues `λ = ω²` of one pencil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Zero threshold used for this spectrum.
    pub tau: f64,
    /// Number of eigenvalues below `tau`.
    pub zero_count: usize,
}

impl Spectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, zero_factor: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let max = eigenvalues.last().copied().unwrap_or(0.0);
        let tau = zero_factor * max.abs();
        let zero_count = eigenvalues.iter().filter(|&&l| l < tau).count();
        Spectrum { eigenvalues, tau, zero_count }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues at or above `tau`.
    pub fn nonzero(&self) -> &[f64] {
        &self.eigenvalues[self.zero_count..]
    }

    /// Most negative eigenvalue relative to `tau`; above `-1` for a semidefinite pencil.
    pub fn negativity(&self) -> f64 {
        match self.eigenvalues.first() {
            Some(&l) if self.tau > 0.0 => l / self.tau,
            _ => 0.0,
        }
    }
}

/// Eigenvalues of `K x = λ M x` for dense symmetric `K` and positive definite `M`,
/// through `C = L⁻¹ K L⁻ᵀ` with `M = L Lᵀ`.
pub fn generalized_eigenvalues(k: DMatrix<f64>, m: DMatrix<f64>) -> Result<Vec<f64>> {
    if k.shape() != m.shape() || !k.is_square() {
        return Err(Error::arg("pencil matrices must be square and of equal size"));
    }
    if k.nrows() == 0 {
        return Ok(Vec::new());
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let half = l
        .solve_lower_triangular(&k)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&half.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    Ok(c.symmetric_eigenvalues().iter().copied().collect())
}

/// Full system: gradient fields show up as (numerically) zero eigenvalues.
pub fn solve_ungauged(sys: &AssembledSystem, zero_factor: f64) -> Result<Spectrum> {
    let values = generalized_eigenvalues(sys.stiffness.to_dense(), sys.mass.to_dense())?;
    Ok(Spectrum::from_eigenvalues(values, zero_factor))
}

/// Cotree-gauged system. The stiffness is restricted to the cotree DOFs; the mass is
/// the mass of the quotient modulo gradients expressed on the cotree,
/// `M̃ = M_cc - (MG)_c (GᵀMG)⁻¹ (MG)_cᵀ`, with `G` the hierarchical gradient.
///
/// Since `K G = 0`, writing every field as cotree part plus gradient turns `(K, M)`
/// into `(diag(K_cc, 0), M)` and the nonzero eigenvalues are those of `(K_cc, M̃)`.
/// This holds exactly when the cotree and the gradients together span the space
/// without overlap, which is what a valid gauge means; otherwise `M̃` is singular.
pub fn solve_gauged(sys: &AssembledSystem, cotree: &[usize], gradient: &CsrMatrix, zero_factor: f64) -> Result<Spectrum> {
    check_cotree(sys, cotree)?;
    if gradient.nrows() != sys.len() {
        return Err(Error::arg("gradient rows must match the curl-conforming space"));
    }
    let k = sys.stiffness.dense_principal(cotree);
    let mut m = sys.mass.dense_principal(cotree);
    if gradient.ncols() > 0 {
        let mg = sys.mass.mul_dense(&gradient.to_dense());
        let gmg = gradient.transpose().mul_dense(&mg);
        let gmg = (&gmg + gmg.transpose()) * 0.5;
        let chol = gmg
            .cholesky()
            .ok_or_else(|| Error::Numerical("gradient Gram matrix is not positive definite".into()))?;
        let coupling = DMatrix::from_fn(cotree.len(), mg.ncols(), |r, c| mg[(cotree[r], c)]);
        let half = chol
            .l()
            .solve_lower_triangular(&coupling.transpose())
            .ok_or_else(|| Error::Numerical("singular gradient Gram factor".into()))?;
        m -= half.transpose() * half;
    }
    let values = generalized_eigenvalues(k, m)?;
    Ok(Spectrum::from_eigenvalues(values, zero_factor))
}

/// Plain restriction of `K` and `M` to the cotree DOFs. The kernel is removed as
/// well, but cotree fields keep their gradient part in the mass, so the spectrum
/// lies below the physical one.
pub fn solve_restricted(sys: &AssembledSystem, cotree: &[usize], zero_factor: f64) -> Result<Spectrum> {
    check_cotree(sys, cotree)?;
    let values = generalized_eigenvalues(sys.stiffness.dense_principal(cotree), sys.mass.dense_principal(cotree))?;
    Ok(Spectrum::from_eigenvalues(values, zero_factor))
}

fn check_cotree(sys: &AssembledSystem, cotree: &[usize]) -> Result<()> {
    if cotree.windows(2).any(|w| w[0] >= w[1]) || cotree.last().is_some_and(|&c| c >= sys.len()) {
        return Err(Error::arg("cotree indices must be strictly increasing and in range"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedEigenvalue {
    pub index: usize,
    pub gauged: f64,
    pub ungauged: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub pairs: Vec<PairedEigenvalue>,
    /// Number of nonzero ungauged eigenvalues.
    pub ungauged_nonzero: usize,
    /// Number of gauged eigenvalues.
    pub gauged_len: usize,
}

impl Comparison {
    /// Largest relative difference; infinite if the two lists have different lengths.
    pub fn max_rel_diff(&self) -> f64 {
        if self.ungauged_nonzero != self.gauged_len {
            return f64::INFINITY;
        }
        self.pairs.iter().map(|p| p.rel_diff).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.pairs.iter().map(|p| p.abs_diff).fold(0.0, f64::max)
    }
}

/// Drops the zero block of the ungauged spectrum and pairs the rest with the gauged
/// spectrum in sorted order.
pub fn compare_spectra(ungauged: &Spectrum, gauged: &Spectrum) -> Comparison {
    let nonzero = ungauged.nonzero();
    let pairs = nonzero
        .iter()
        .zip(&gauged.eigenvalues)
        .enumerate()
        .map(|(index, (&u, &g))| {
            let abs_diff = (g - u).abs();
            let rel_diff = if u == 0.0 { abs_diff } else { abs_diff / u.abs() };
            PairedEigenvalue { index, gauged: g, ungauged: u, abs_diff, rel_diff }
        })
        .collect();
    Comparison { pairs, ungauged_nonzero: nonzero.len(), gauged_len: gauged.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_pencil() {
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 6.0, 2.0]));
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 1.0]));
        let s = Spectrum::from_eigenvalues(generalized_eigenvalues(k, m).unwrap(), DEFAULT_ZERO_FACTOR);
        assert_eq!(s.zero_count, 1);
        assert_relative_eq!(s.eigenvalues[1], 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.eigenvalues[2], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn full_pencil_matches_reference() {
        // K = [[2, -1], [-1, 2]], M = [[2, 1], [1, 2]] has λ = 1/3 and 3
        let k = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let mut l = generalized_eigenvalues(k, m).unwrap();
        l.sort_by(f64::total_cmp);
        assert_relative_eq!(l[0], 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(l[1], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn indefinite_mass_is_rejected() {
        let k = DMatrix::identity(2, 2);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(generalized_eigenvalues(k, m), Err(Error::Numerical(_))));
    }

    #[test]
    fn comparison_of_identical_spectra() {
        let u = Spectrum::from_eigenvalues(vec![0.0, 0.0, 1.0, 4.0], DEFAULT_ZERO_FACTOR);
        let g = Spectrum::from_eigenvalues(vec![1.0, 4.0], DEFAULT_ZERO_FACTOR);
        let c = compare_spectra(&u, &g);
        assert_eq!(c.pairs.len(), 2);
        assert_eq!(c.max_abs_diff(), 0.0);
        assert_eq!(c.max_rel_diff(), 0.0);
        let short = Spectrum::from_eigenvalues(vec![1.0], DEFAULT_ZERO_FACTOR);
        assert!(compare_spectra(&u, &short).max_rel_diff().is_infinite());
    }
}
