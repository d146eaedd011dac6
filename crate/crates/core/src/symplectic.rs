//! Finite-dimensional real symplectic phase spaces.
//!
//! A `PhaseSpace` with `d` modes is R^{2d} with interleaved coordinates
//! (q_1, p_1, ..., q_d, p_d). Mode i is the complex amplitude
//! z_i = x[2i] + i x[2i+1], and the symplectic form is the imaginary part
//! of the complex pairing, so ς((1,0),(0,1)) = +1 in one mode.

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSpace {
    modes: usize,
}

impl PhaseSpace {
    /// Standard d-mode space. d = 0 is allowed as the monoidal identity.
    pub fn standard(d: usize) -> PhaseSpace {
        PhaseSpace { modes: d }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Real dimension 2d.
    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
                context: "phase-space vector",
            });
        }
        Ok(())
    }

    /// ‖x‖² = Σ_i (q_i² + p_i²).
    pub fn norm_sq(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(x.iter().map(|v| v * v).sum())
    }

    /// ς(x, y) = Σ_i (q_i(x) p_i(y) − p_i(x) q_i(y)) = Im⟨x, y⟩.
    pub fn form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let mut s = 0.0;
        for i in 0..self.modes {
            s += x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i];
        }
        Ok(s)
    }

    /// Complex view: z_i = x[2i] + i x[2i+1].
    pub fn complex_view(&self, x: &[f64]) -> Result<Vec<C64>> {
        self.check_vector(x)?;
        Ok((0..self.modes)
            .map(|i| C64::new(x[2 * i], x[2 * i + 1]))
            .collect())
    }

    /// Inverse of `complex_view`.
    pub fn real_view(&self, z: &[C64]) -> Result<Vec<f64>> {
        if z.len() != self.modes {
            return Err(CoreError::DimensionMismatch {
                expected: self.modes,
                got: z.len(),
                context: "complex mode vector",
            });
        }
        let mut x = vec![0.0; self.dim()];
        for (i, zi) in z.iter().enumerate() {
            x[2 * i] = zi.re;
            x[2 * i + 1] = zi.im;
        }
        Ok(x)
    }

    /// Matrix J of ς: block-diagonal [[0, 1], [−1, 0]] per mode.
    pub fn form_matrix(&self) -> Array2<f64> {
        let n = self.dim();
        let mut j = Array2::<f64>::zeros((n, n));
        for i in 0..self.modes {
            j[(2 * i, 2 * i + 1)] = 1.0;
            j[(2 * i + 1, 2 * i)] = -1.0;
        }
        j
    }

    pub fn direct_sum(&self, other: &PhaseSpace) -> PhaseSpace {
        PhaseSpace {
            modes: self.modes + other.modes,
        }
    }

    /// Embed (x, y) into the direct sum.
    pub fn pair(&self, other: &PhaseSpace, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        other.check_vector(y)?;
        let mut v = Vec::with_capacity(x.len() + y.len());
        v.extend_from_slice(x);
        v.extend_from_slice(y);
        Ok(v)
    }
}

/// Real linear map between phase spaces, as a 2d_target × 2d_source matrix.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub source: PhaseSpace,
    pub target: PhaseSpace,
    pub matrix: Array2<f64>,
}

impl LinearMap {
    pub fn new(source: PhaseSpace, target: PhaseSpace, matrix: Array2<f64>) -> Result<LinearMap> {
        if matrix.nrows() != target.dim() || matrix.ncols() != source.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: target.dim() * source.dim().max(1),
                got: matrix.nrows() * matrix.ncols().max(1),
                context: "linear-map matrix shape",
            });
        }
        Ok(LinearMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(space: PhaseSpace) -> LinearMap {
        LinearMap {
            source: space,
            target: space,
            matrix: Array2::eye(space.dim()),
        }
    }

    /// Single-mode rotation: multiplication by e^{iθ} on mode `mode`.
    pub fn mode_rotation(space: PhaseSpace, mode: usize, theta: f64) -> LinearMap {
        let mut m = Array2::eye(space.dim());
        let (c, s) = (theta.cos(), theta.sin());
        m[(2 * mode, 2 * mode)] = c;
        m[(2 * mode, 2 * mode + 1)] = -s;
        m[(2 * mode + 1, 2 * mode)] = s;
        m[(2 * mode + 1, 2 * mode + 1)] = c;
        LinearMap {
            source: space,
            target: space,
            matrix: m,
        }
    }

    pub fn scaling(space: PhaseSpace, c: f64) -> LinearMap {
        LinearMap {
            source: space,
            target: space,
            matrix: Array2::eye(space.dim()) * c,
        }
    }

    /// Inclusion of `sub` into the first coordinates of `full`, zero elsewhere.
    pub fn inclusion(sub: PhaseSpace, full: PhaseSpace) -> Result<LinearMap> {
        if sub.dim() > full.dim() {
            return Err(CoreError::InvalidParameter(
                "inclusion source larger than target".into(),
            ));
        }
        let mut m = Array2::<f64>::zeros((full.dim(), sub.dim()));
        for i in 0..sub.dim() {
            m[(i, i)] = 1.0;
        }
        Ok(LinearMap {
            source: sub,
            target: full,
            matrix: m,
        })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.source.check_vector(x)?;
        let mut out = vec![0.0; self.target.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, xj) in x.iter().enumerate() {
                s += self.matrix[(i, j)] * xj;
            }
            *o = s;
        }
        Ok(out)
    }

    /// Transpose, as a map target → source (the ᵗu acting on functionals).
    pub fn transpose_apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.target.check_vector(p)?;
        let mut out = vec![0.0; self.source.dim()];
        for (j, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for (i, pi) in p.iter().enumerate() {
                s += self.matrix[(i, j)] * pi;
            }
            *o = s;
        }
        Ok(out)
    }

    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        if inner.target != self.source {
            return Err(CoreError::SpaceMismatch {
                left: inner.target.modes(),
                right: self.source.modes(),
            });
        }
        Ok(LinearMap {
            source: inner.source,
            target: self.target,
            matrix: self.matrix.dot(&inner.matrix),
        })
    }

    /// τ(u e_i, u e_j) = ς(e_i, e_j) on all basis pairs, within tol.
    pub fn is_symplectic(&self, tol: f64) -> bool {
        let ds = self.source.dim();
        let mut worst = 0.0f64;
        for i in 0..ds {
            let mut ei = vec![0.0; ds];
            ei[i] = 1.0;
            let uei = self.apply(&ei).expect("basis vector fits source");
            for j in 0..ds {
                let mut ej = vec![0.0; ds];
                ej[j] = 1.0;
                let uej = self.apply(&ej).expect("basis vector fits source");
                let lhs = self.target.form(&uei, &uej).expect("image fits target");
                let rhs = self.source.form(&ei, &ej).expect("basis fits source");
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst <= tol
    }
}
