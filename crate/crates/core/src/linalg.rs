//! Shared dense-matrix helpers: Hermitian eigen plumbing, positivity
//! reports, matrix exponentials of i*Hermitian, and compensated sums.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{CoreError, Result};
use crate::C64;

/// Outcome of a positive-semidefiniteness probe on a Hermitian(-ized) matrix.
#[derive(Debug, Clone)]
pub struct PdReport {
    /// smallest eigenvalue of (A + A*)/2
    pub min_eig: f64,
    /// largest eigenvalue, for scale context
    pub max_eig: f64,
    /// worst |A - A*| entry before Hermitization
    pub herm_defect: f64,
    /// tolerance the verdict was judged against
    pub tol: f64,
    pub passed: bool,
}

/// (A + A*)/2 together with the largest deviation |A - A*|_ij / 2.
pub fn hermitize(a: &Array2<C64>) -> (Array2<C64>, f64) {
    let n = a.nrows();
    let mut h = Array2::<C64>::zeros((n, n));
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            let d = 0.5 * (a[(i, j)] - a[(j, i)].conj());
            defect = defect.max(d.norm());
            h[(i, j)] = s;
        }
    }
    (h, defect)
}

pub fn eigvalsh(h: &Array2<C64>) -> Result<Array1<f64>> {
    let (vals, _) = h
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Eigen(e.to_string()))?;
    Ok(vals)
}

/// PSD check: Hermitize, eigensolve, pass iff min eigenvalue >= -tol * scale
/// where scale = max(1, max |eigenvalue|).
pub fn pd_check(a: &Array2<C64>, tol: f64) -> Result<PdReport> {
    let (h, defect) = hermitize(a);
    let vals = eigvalsh(&h)?;
    let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eig = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0f64.max(min_eig.abs()).max(max_eig.abs());
    let passed = min_eig >= -tol * scale;
    Ok(PdReport {
        min_eig,
        max_eig,
        herm_defect: defect,
        tol,
        passed,
    })
}

/// Hermitian eigendecomposition with verified eigenvectors. The backend
/// may hand back eigenvectors of the transposed (hence conjugated) matrix
/// depending on buffer layout; eigenvalues are unaffected, so we test the
/// first eigenpair and conjugate the basis if it fits better.
pub fn eigh_verified(h: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = h
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Eigen(e.to_string()))?;
    let n = h.nrows();
    let mut res_plain = 0.0f64;
    let mut res_conj = 0.0f64;
    for i in 0..n {
        let mut acc_p = C64::new(0.0, 0.0);
        let mut acc_c = C64::new(0.0, 0.0);
        for j in 0..n {
            acc_p += h[(i, j)] * vecs[(j, 0)];
            acc_c += h[(i, j)] * vecs[(j, 0)].conj();
        }
        res_plain += (acc_p - vals[0] * vecs[(i, 0)]).norm_sqr();
        res_conj += (acc_c - vals[0] * vecs[(i, 0)].conj()).norm_sqr();
    }
    if res_conj < res_plain {
        Ok((vals, vecs.mapv(|c| c.conj())))
    } else {
        Ok((vals, vecs))
    }
}

/// exp(i H) for Hermitian H, via eigendecomposition.
pub fn expm_i_hermitian(h: &Array2<C64>) -> Result<Array2<C64>> {
    let (vals, vecs) = eigh_verified(h)?;
    let n = h.nrows();
    // V diag(e^{i λ}) V*
    let mut scaled = vecs.clone();
    for (j, lam) in vals.iter().enumerate() {
        let phase = C64::from_polar(1.0, *lam);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    let vdag = vecs.t().mapv(|c| c.conj());
    Ok(scaled.dot(&vdag))
}

/// Operator (spectral) norm via the largest eigenvalue of A* A.
pub fn op_norm(a: &Array2<C64>) -> Result<f64> {
    let adag = a.t().mapv(|c| c.conj());
    let gram = adag.dot(a);
    let vals = eigvalsh(&gram)?;
    let top = vals.iter().cloned().fold(0.0f64, f64::max);
    Ok(top.max(0.0).sqrt())
}

/// Neumaier (improved Kahan) compensated sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn hermitize_reports_defect() {
        let a = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            [C64::new(0.0, 1.0), C64::new(2.0, 0.0)]
        ];
        // anti-Hermitian off-diagonal: (i + conj(i))/2 = 0, defect |i - (-i)|/2 = 1
        let (h, d) = hermitize(&a);
        assert_relative_eq!(d, 1.0, epsilon = 1e-15);
        assert_relative_eq!(h[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pd_check_identity() {
        let a = Array2::<C64>::eye(4);
        let rep = pd_check(&a, 1e-12).unwrap();
        assert!(rep.passed);
        assert_relative_eq!(rep.min_eig, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pd_check_indefinite() {
        let mut a = Array2::<C64>::eye(3);
        a[(2, 2)] = C64::new(-0.5, 0.0);
        let rep = pd_check(&a, 1e-12).unwrap();
        assert!(!rep.passed);
        assert_relative_eq!(rep.min_eig, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn expm_pauli_x() {
        // exp(i t σ_x) = cos t · I + i sin t · σ_x ; t = 0.7
        let t = 0.7f64;
        let h = array![
            [C64::new(0.0, 0.0), C64::new(t, 0.0)],
            [C64::new(t, 0.0), C64::new(0.0, 0.0)]
        ];
        let u = expm_i_hermitian(&h).unwrap();
        assert_relative_eq!(u[(0, 0)].re, t.cos(), epsilon = 1e-14);
        assert_relative_eq!(u[(0, 1)].im, t.sin(), epsilon = 1e-14);
        // unitarity
        let udag = u.t().mapv(|c| c.conj());
        let id = udag.dot(&u);
        assert_relative_eq!(id[(0, 0)].re, 1.0, epsilon = 1e-13);
        assert_relative_eq!(id[(0, 1)].norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn expm_pauli_y() {
        // exp(i t σ_y) = cos t · I + i sin t · σ_y — exercises genuinely
        // complex entries, where a transposed-buffer eigensolve would
        // silently conjugate the result
        let t = 0.3f64;
        let h = array![
            [C64::new(0.0, 0.0), C64::new(0.0, -t)],
            [C64::new(0.0, t), C64::new(0.0, 0.0)]
        ];
        let u = expm_i_hermitian(&h).unwrap();
        assert_relative_eq!(u[(0, 0)].re, t.cos(), epsilon = 1e-14);
        assert_relative_eq!(u[(0, 1)].re, t.sin(), epsilon = 1e-14);
        assert_relative_eq!(u[(1, 0)].re, -t.sin(), epsilon = 1e-14);
        assert_relative_eq!(u[(0, 1)].im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn op_norm_diag() {
        let a = array![
            [C64::new(0.0, 3.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-2.0, 0.0)]
        ];
        assert_relative_eq!(op_norm(&a).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn neumaier_catastrophic_cancellation() {
        let s = neumaier_sum([1.0, 1e100, 1.0, -1e100]);
        assert_relative_eq!(s, 2.0, epsilon = 0.0);
    }
}
