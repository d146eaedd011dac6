//! Gauss–Hermite quadrature (Golub–Welsch) and adaptive Gaussian-measure
//! integration on up to a few axes.

use std::collections::HashMap;
use std::sync::Mutex;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use once_cell::sync::Lazy;

use crate::error::{CoreError, Result};
use crate::linalg::neumaier_sum;
use crate::C64;

/// Nodes and weights for ∫ f(t) e^{−t²} dt ≈ Σ w_i f(t_i).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(CoreError::InvalidParameter("quadrature order 0".into()));
    }
    // Jacobi matrix: zero diagonal, off-diagonal sqrt(k/2)
    let mut j = Array2::<f64>::zeros((n, n));
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let (vals, vecs) = j
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Eigen(e.to_string()))?;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let nodes: Vec<f64> = vals.to_vec();
    let weights: Vec<f64> = (0..n).map(|i| sqrt_pi * vecs[(0, i)].powi(2)).collect();
    Ok((nodes, weights))
}

static GH_CACHE: Lazy<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

pub fn gauss_hermite_cached(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(rule) = GH_CACHE.lock().unwrap().get(&n) {
        return Ok(rule.clone());
    }
    let rule = gauss_hermite(n)?;
    GH_CACHE.lock().unwrap().insert(n, rule.clone());
    Ok(rule)
}

/// Factor a PSD covariance into active directions: columns of the returned
/// matrix are sqrt(λ_i)·v_i for eigenvalues above a relative floor; null
/// directions collapse to atoms (they contribute no spread).
pub fn psd_sqrt_active(cov: &Array2<f64>) -> Result<Array2<f64>> {
    let n = cov.nrows();
    let (vals, vecs) = cov
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Eigen(e.to_string()))?;
    let top = vals.iter().cloned().fold(0.0f64, f64::max);
    let floor = 1e-13 * top.max(1e-300);
    for v in vals.iter() {
        if *v < -1e-10 * top.max(1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "covariance not PSD: eigenvalue {v:.3e}"
            )));
        }
    }
    let active: Vec<usize> = (0..n).filter(|&i| vals[i] > floor).collect();
    let mut l = Array2::<f64>::zeros((n, active.len()));
    for (c, &i) in active.iter().enumerate() {
        let s = vals[i].max(0.0).sqrt();
        for r in 0..n {
            l[(r, c)] = s * vecs[(r, i)];
        }
    }
    Ok(l)
}

/// ∫ f dN(mean, cov) for a normalized Gaussian on R^k, by tensor
/// Gauss–Hermite with order doubling 16 → 1024 per axis until successive
/// estimates agree to `rel_tol` relative. Returns (value, error estimate).
pub fn integrate_gaussian<F>(
    mean: &Array1<f64>,
    cov: &Array2<f64>,
    rel_tol: f64,
    f: F,
) -> Result<(C64, f64)>
where
    F: Fn(&[f64]) -> C64,
{
    let l = psd_sqrt_active(cov)?;
    let k = l.ncols();
    if k == 0 {
        // pure atom
        let v = f(mean.as_slice().unwrap());
        return Ok((v, 0.0));
    }
    if k > 3 {
        return Err(CoreError::Unsupported(format!(
            "Gauss–Hermite limited to 3 active axes, got {k}"
        )));
    }
    let norm = std::f64::consts::PI.powf(-(k as f64) / 2.0);
    let mut prev: Option<C64> = None;
    let mut order = 16usize;
    while order <= 1024 {
        let (nodes, weights) = gauss_hermite_cached(order)?;
        let mut re_terms = Vec::new();
        let mut im_terms = Vec::new();
        let mut idx = vec![0usize; k];
        loop {
            let mut w = 1.0;
            let mut x = mean.clone();
            for (axis, &i) in idx.iter().enumerate() {
                w *= weights[i];
                let t = std::f64::consts::SQRT_2 * nodes[i];
                for r in 0..x.len() {
                    x[r] += l[(r, axis)] * t;
                }
            }
            let v = f(x.as_slice().unwrap());
            re_terms.push(w * v.re);
            im_terms.push(w * v.im);
            // odometer over the tensor grid
            let mut axis = 0;
            loop {
                idx[axis] += 1;
                if idx[axis] < nodes.len() {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
                if axis == k {
                    break;
                }
            }
            if axis == k {
                break;
            }
        }
        let est = C64::new(norm * neumaier_sum(re_terms), norm * neumaier_sum(im_terms));
        if let Some(p) = prev {
            let diff = (est - p).norm();
            let scale = 1.0f64.max(est.norm());
            if diff <= rel_tol * scale {
                return Ok((est, diff));
            }
        }
        prev = Some(est);
        order *= 2;
    }
    let achieved = prev.map(|p| p.norm()).unwrap_or(f64::NAN);
    Err(CoreError::QuadratureNoConvergence {
        achieved,
        target: rel_tol,
    })
}
