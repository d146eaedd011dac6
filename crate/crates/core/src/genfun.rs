//! h-parameterized generating functionals G(x) = ω_h(W_h(x)) as expression
//! trees, plus the twisted positive-definiteness certifier.
//!
//! States never materialize an algebra: everything factors through the
//! generating functional.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2};

use crate::constants::COHERENT_PHASE_FACTOR;
use crate::error::{CoreError, Result};
use crate::linalg::{pd_check, PdReport};
use crate::schedule::{PhaseSchedule, Schedule};
use crate::symplectic::{LinearMap, PhaseSpace};
use crate::C64;

#[derive(Clone)]
pub enum Node {
    Vacuum,
    Coherent(Vec<C64>),
    QuantumGaussian {
        q: Array2<f64>,
        mean: Array1<f64>,
    },
    GibbsPaper {
        energies: Vec<f64>,
        beta_h: Schedule,
        mu_h: Schedule,
    },
    Mixture {
        weights: Vec<f64>,
        children: Vec<StateFamily>,
    },
    Convolution(Box<StateFamily>, Box<StateFamily>),
    Tensor(Box<StateFamily>, Box<StateFamily>),
    Translate {
        xi: Vec<f64>,
        child: Box<StateFamily>,
    },
    PullBack {
        map: LinearMap,
        phase: PhaseSchedule,
        child: Box<StateFamily>,
    },
    Scale {
        c: f64,
        child: Box<StateFamily>,
    },
    /// Injected functional for negative tests; not reachable from configs.
    Custom {
        label: String,
        f: Arc<dyn Fn(f64, &[f64]) -> C64 + Send + Sync>,
    },
}

#[derive(Clone)]
pub struct StateFamily {
    pub space: PhaseSpace,
    pub node: Node,
}

impl fmt::Debug for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateFamily({} modes, {})", self.space.modes(), self.label())
    }
}

impl StateFamily {
    pub fn vacuum(space: PhaseSpace) -> StateFamily {
        StateFamily {
            space,
            node: Node::Vacuum,
        }
    }

    pub fn coherent(space: PhaseSpace, z: Vec<C64>) -> Result<StateFamily> {
        if z.len() != space.modes() {
            return Err(CoreError::DimensionMismatch {
                expected: space.modes(),
                got: z.len(),
                context: "coherent amplitude",
            });
        }
        Ok(StateFamily {
            space,
            node: Node::Coherent(z),
        })
    }

    pub fn quantum_gaussian(
        space: PhaseSpace,
        q: Array2<f64>,
        mean: Array1<f64>,
    ) -> Result<StateFamily> {
        let n = space.dim();
        if q.nrows() != n || q.ncols() != n || mean.len() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: q.nrows(),
                context: "Gaussian form",
            });
        }
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((q[(i, j)] - q[(j, i)]).abs());
            }
        }
        if asym > 1e-10 {
            return Err(CoreError::InvalidParameter(format!(
                "Gaussian form not symmetric (defect {asym:.3e})"
            )));
        }
        Ok(StateFamily {
            space,
            node: Node::QuantumGaussian { q, mean },
        })
    }

    pub fn gibbs_paper(
        space: PhaseSpace,
        energies: Vec<f64>,
        beta_h: Schedule,
        mu_h: Schedule,
    ) -> Result<StateFamily> {
        if energies.len() != space.modes() {
            return Err(CoreError::DimensionMismatch {
                expected: space.modes(),
                got: energies.len(),
                context: "mode energies",
            });
        }
        if energies.iter().any(|k| *k <= 0.0) {
            return Err(CoreError::InvalidParameter(
                "mode energies must be positive".into(),
            ));
        }
        Ok(StateFamily {
            space,
            node: Node::GibbsPaper {
                energies,
                beta_h,
                mu_h,
            },
        })
    }

    pub fn mixture(weights: Vec<f64>, children: Vec<StateFamily>) -> Result<StateFamily> {
        if weights.len() != children.len() || children.is_empty() {
            return Err(CoreError::InvalidParameter(
                "mixture needs matching nonempty weights/children".into(),
            ));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(CoreError::InvalidParameter(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let space = children[0].space;
        for c in &children[1..] {
            if c.space != space {
                return Err(CoreError::SpaceMismatch {
                    left: space.modes(),
                    right: c.space.modes(),
                });
            }
        }
        Ok(StateFamily {
            space,
            node: Node::Mixture { weights, children },
        })
    }

    pub fn quantum_convolution(a: StateFamily, b: StateFamily) -> Result<StateFamily> {
        if a.space != b.space {
            return Err(CoreError::SpaceMismatch {
                left: a.space.modes(),
                right: b.space.modes(),
            });
        }
        Ok(StateFamily {
            space: a.space,
            node: Node::Convolution(Box::new(a), Box::new(b)),
        })
    }

    pub fn tensor(a: StateFamily, b: StateFamily) -> StateFamily {
        StateFamily {
            space: a.space.direct_sum(&b.space),
            node: Node::Tensor(Box::new(a), Box::new(b)),
        }
    }

    pub fn translate(self, xi: Vec<f64>) -> Result<StateFamily> {
        self.space.check_vector(&xi)?;
        Ok(StateFamily {
            space: self.space,
            node: Node::Translate {
                xi,
                child: Box::new(self),
            },
        })
    }

    /// Pull back along u: eval(h, y) = e^{iF_h(y)} · child(u y). The new
    /// family lives on u's source space.
    pub fn pull_symplectic(self, map: LinearMap, phase: PhaseSchedule) -> Result<StateFamily> {
        if map.target != self.space {
            return Err(CoreError::SpaceMismatch {
                left: map.target.modes(),
                right: self.space.modes(),
            });
        }
        Ok(StateFamily {
            space: map.source,
            node: Node::PullBack {
                map,
                phase,
                child: Box::new(self),
            },
        })
    }

    pub fn scale(self, c: f64) -> Result<StateFamily> {
        if c < 0.0 {
            return Err(CoreError::InvalidParameter("scale must be ≥ 0".into()));
        }
        Ok(StateFamily {
            space: self.space,
            node: Node::Scale {
                c,
                child: Box::new(self),
            },
        })
    }

    pub fn custom<F>(space: PhaseSpace, label: &str, f: F) -> StateFamily
    where
        F: Fn(f64, &[f64]) -> C64 + Send + Sync + 'static,
    {
        StateFamily {
            space,
            node: Node::Custom {
                label: label.to_string(),
                f: Arc::new(f),
            },
        }
    }

    pub fn label(&self) -> String {
        match &self.node {
            Node::Vacuum => "vacuum".into(),
            Node::Coherent(_) => "coherent".into(),
            Node::QuantumGaussian { .. } => "quantum-gaussian".into(),
            Node::GibbsPaper { .. } => "gibbs".into(),
            Node::Mixture { children, .. } => format!("mixture[{}]", children.len()),
            Node::Convolution(a, b) => format!("({} ⋆ {})", a.label(), b.label()),
            Node::Tensor(a, b) => format!("({} ⊗ {})", a.label(), b.label()),
            Node::Translate { child, .. } => format!("translate({})", child.label()),
            Node::PullBack { child, .. } => format!("pullback({})", child.label()),
            Node::Scale { c, child } => format!("{c}·{}", child.label()),
            Node::Custom { label, .. } => format!("custom:{label}"),
        }
    }

    /// G(x) at parameter h. h is accepted in (0, 1]; the closed endpoint
    /// admits the unit-h thermal reference points.
    pub fn eval(&self, h: f64, x: &[f64]) -> Result<C64> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "h must lie in (0, 1], got {h}"
            )));
        }
        self.eval_unchecked(h, x)
    }

    fn eval_unchecked(&self, h: f64, x: &[f64]) -> Result<C64> {
        self.space.check_vector(x)?;
        match &self.node {
            Node::Vacuum => {
                let n2 = self.space.norm_sq(x)?;
                Ok(C64::new((-h * n2 / 2.0).exp(), 0.0))
            }
            Node::Coherent(z) => {
                let n2 = self.space.norm_sq(x)?;
                let zx = self.space.complex_view(x)?;
                // λ_z(x) = 2·Im⟨x, z⟩, pairing conjugate-linear on the left
                let im: f64 = zx.iter().zip(z).map(|(a, b)| (a.conj() * b).im).sum();
                let lambda = COHERENT_PHASE_FACTOR * im;
                Ok(C64::from_polar((-h * n2 / 2.0).exp(), lambda))
            }
            Node::QuantumGaussian { q, mean } => {
                let mut qxx = 0.0;
                let mut lx = 0.0;
                for i in 0..x.len() {
                    lx += mean[i] * x[i];
                    for j in 0..x.len() {
                        qxx += x[i] * q[(i, j)] * x[j];
                    }
                }
                Ok(C64::from_polar((-qxx / 2.0).exp(), lx))
            }
            Node::GibbsPaper {
                energies,
                beta_h,
                mu_h,
            } => {
                let beta = beta_h.eval(h);
                let mu = mu_h.eval(h);
                let eta = self.space.complex_view(x)?;
                let mut expo = 0.0;
                for (k, e) in energies.iter().zip(&eta) {
                    let gap = beta * (k - mu);
                    if gap <= 0.0 {
                        return Err(CoreError::InvalidParameter(format!(
                            "thermal state requires β_h(k − μ_h) > 0, got {gap:.3e}"
                        )));
                    }
                    let nbar = (-gap).exp() / (1.0 - (-gap).exp());
                    expo += nbar * e.norm_sqr();
                }
                Ok(C64::new((-h / 2.0 * expo).exp(), 0.0))
            }
            Node::Mixture { weights, children } => {
                let mut acc = C64::new(0.0, 0.0);
                for (w, c) in weights.iter().zip(children) {
                    acc += *w * c.eval_unchecked(h, x)?;
                }
                Ok(acc)
            }
            Node::Convolution(a, b) => Ok(a.eval_unchecked(h, x)? * b.eval_unchecked(h, x)?),
            Node::Tensor(a, b) => {
                let na = a.space.dim();
                Ok(a.eval_unchecked(h, &x[..na])? * b.eval_unchecked(h, &x[na..])?)
            }
            Node::Translate { xi, child } => {
                let phase = -h * self.space.form(xi, x)?;
                let shifted: Vec<f64> = x.iter().zip(xi).map(|(a, b)| a + b).collect();
                Ok(C64::from_polar(1.0, phase) * child.eval_unchecked(h, &shifted)?)
            }
            Node::PullBack { map, phase, child } => {
                let uy = map.apply(x)?;
                let f = phase.eval(h, x);
                Ok(C64::from_polar(1.0, f) * child.eval_unchecked(h, &uy)?)
            }
            Node::Scale { c, child } => Ok(*c * child.eval_unchecked(h, x)?),
            Node::Custom { f, .. } => Ok(f(h, x)),
        }
    }

    /// Total mass ω_h(1) = G(0).
    pub fn mass(&self, h: f64) -> Result<C64> {
        self.eval(h, &vec![0.0; self.space.dim()])
    }
}

/// Twisted positive-definiteness certificate: forms the Gram matrix
/// B[k][j] = G(x_j − x_k)·e^{i h ς(x_j, x_k)}, Hermitizes, and reports the
/// eigenvalue extremes. Pass iff min eig ≥ −tol·max(1, max |eig|).
pub fn twisted_pd_check(
    s: &StateFamily,
    h: f64,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<PdReport> {
    if points.is_empty() {
        return Err(CoreError::InvalidParameter("no test points".into()));
    }
    let n = points.len();
    let mut b = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        for j in 0..n {
            let diff: Vec<f64> = points[j]
                .iter()
                .zip(&points[k])
                .map(|(a, c)| a - c)
                .collect();
            let twist = h * s.space.form(&points[j], &points[k])?;
            b[(k, j)] = s.eval(h, &diff)? * C64::from_polar(1.0, twist);
        }
    }
    pd_check(&b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn one_mode() -> PhaseSpace {
        PhaseSpace::standard(1)
    }

    #[test]
    fn vacuum_values() {
        let s = StateFamily::vacuum(one_mode());
        // ‖x‖² = 2 at h = 0.5 → e^{−1/2}
        let v = s.eval(0.5, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(v.re, (-0.5f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(v.im, 0.0);
        assert_relative_eq!(s.mass(0.5).unwrap().re, 1.0);
    }

    #[test]
    fn h_domain_enforced() {
        let s = StateFamily::vacuum(one_mode());
        assert!(s.eval(0.0, &[0.0, 0.0]).is_err());
        assert!(s.eval(1.5, &[0.0, 0.0]).is_err());
        assert!(s.eval(1.0, &[0.0, 0.0]).is_ok());
    }

    #[test]
    fn gibbs_reference_value() {
        // one mode, k=1, β=1, μ=0, h=1, ‖η‖²=1 → exp(−(1/2)·e^{−1}/(1−e^{−1}))
        let s = StateFamily::gibbs_paper(
            one_mode(),
            vec![1.0],
            Schedule::constant(1.0),
            Schedule::constant(0.0),
        )
        .unwrap();
        let v = s.eval(1.0, &[1.0, 0.0]).unwrap();
        let nbar = (-1.0f64).exp() / (1.0 - (-1.0f64).exp());
        assert_relative_eq!(v.re, (-0.5 * nbar).exp(), epsilon = 1e-14);
    }

    #[test]
    fn gibbs_rejects_nonpositive_gap() {
        let s = StateFamily::gibbs_paper(
            one_mode(),
            vec![1.0],
            Schedule::constant(1.0),
            Schedule::constant(2.0), // μ above k
        )
        .unwrap();
        assert!(s.eval(0.5, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn coherent_phase_additivity() {
        let sp = one_mode();
        let z = vec![C64::new(1.0, 0.5)];
        let w = vec![C64::new(-0.3, 2.0)];
        let a = StateFamily::coherent(sp, z.clone()).unwrap();
        let b = StateFamily::coherent(sp, w.clone()).unwrap();
        let conv = StateFamily::quantum_convolution(a, b).unwrap();
        let sum = StateFamily::coherent(sp, vec![z[0] + w[0]]).unwrap();
        let x = [0.7, -1.1];
        let h = 0.25;
        // phases add; the Gaussian damping doubles, so compare phases only
        let lhs = conv.eval(h, &x).unwrap();
        let rhs = sum.eval(h, &x).unwrap();
        assert_relative_eq!(lhs.arg(), rhs.arg(), epsilon = 1e-12);
        // and the convolution mass multiplies
        assert_relative_eq!(conv.mass(h).unwrap().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn translate_mass_cost() {
        let xi = vec![1.0, 2.0];
        let s = StateFamily::vacuum(one_mode()).translate(xi.clone()).unwrap();
        let h = 0.3;
        let m = s.mass(h).unwrap();
        assert_relative_eq!(m.re, (-h * 5.0 / 2.0).exp(), epsilon = 1e-14);
        // ξ = 0 is the identity
        let id = StateFamily::vacuum(one_mode()).translate(vec![0.0, 0.0]).unwrap();
        let x = [0.4, -0.9];
        assert_relative_eq!(
            id.eval(h, &x).unwrap().re,
            StateFamily::vacuum(one_mode()).eval(h, &x).unwrap().re,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rotation_fixes_vacuum() {
        let sp = one_mode();
        let u = LinearMap::mode_rotation(sp, 0, 1.3);
        let s = StateFamily::vacuum(sp)
            .pull_symplectic(u, PhaseSchedule::Zero)
            .unwrap();
        let x = [0.8, 0.6];
        let h = 0.4;
        assert_relative_eq!(
            s.eval(h, &x).unwrap().re,
            StateFamily::vacuum(sp).eval(h, &x).unwrap().re,
            epsilon = 1e-14
        );
    }

    #[test]
    fn tensor_splits_components() {
        let sp = one_mode();
        let a = StateFamily::vacuum(sp);
        let b = StateFamily::coherent(sp, vec![C64::new(2.0, 0.0)]).unwrap();
        let t = StateFamily::tensor(a.clone(), b.clone());
        let h = 0.2;
        let x = [0.5, -0.5];
        let both = t.eval(h, &[0.5, -0.5, 0.0, 0.0]).unwrap();
        let first = a.eval(h, &x).unwrap() * b.mass(h).unwrap();
        assert!((both - first).norm() < 1e-14);
    }

    #[test]
    fn twisted_pd_vacuum_passes_antivacuum_fails() {
        let sp = one_mode();
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let rep = twisted_pd_check(&StateFamily::vacuum(sp), 0.3, &pts, 1e-9).unwrap();
        assert!(rep.passed, "vacuum min eig {}", rep.min_eig);
        assert!(rep.min_eig >= -1e-10);

        let anti = StateFamily::custom(sp, "anti-vacuum", |h, x| {
            let n2: f64 = x.iter().map(|v| v * v).sum();
            C64::new((h * n2 / 2.0).exp(), 0.0)
        });
        let rep = twisted_pd_check(&anti, 0.3, &pts, 1e-9).unwrap();
        assert!(!rep.passed, "anti-vacuum min eig {}", rep.min_eig);
    }

    #[test]
    fn single_point_gram_is_mass() {
        let sp = one_mode();
        let rep =
            twisted_pd_check(&StateFamily::vacuum(sp), 0.5, &[vec![0.0, 0.0]], 1e-9).unwrap();
        assert!(rep.passed);
        assert_relative_eq!(rep.min_eig, 1.0, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn hermiticity(xs in proptest::collection::vec(-3.0f64..3.0, 2),
                       h in 0.05f64..0.95) {
            let sp = PhaseSpace::standard(1);
            let members = [
                StateFamily::vacuum(sp),
                StateFamily::coherent(sp, vec![C64::new(1.0, -0.5)]).unwrap(),
                StateFamily::mixture(
                    vec![0.5, 0.5],
                    vec![
                        StateFamily::vacuum(sp),
                        StateFamily::coherent(sp, vec![C64::new(0.0, 2.0)]).unwrap(),
                    ],
                ).unwrap(),
            ];
            let neg: Vec<f64> = xs.iter().map(|v| -v).collect();
            for s in &members {
                let a = s.eval(h, &xs).unwrap();
                let b = s.eval(h, &neg).unwrap();
                prop_assert!((a - b.conj()).norm() <= 1e-12);
            }
        }

        #[test]
        fn twisted_pd_random_points(seed_pts in proptest::collection::vec(
            proptest::collection::vec(-2.0f64..2.0, 2), 2..6),
            h in 0.05f64..0.9)
        {
            let sp = PhaseSpace::standard(1);
            let s = StateFamily::coherent(sp, vec![C64::new(0.7, -0.2)]).unwrap();
            let rep = twisted_pd_check(&s, h, &seed_pts, 1e-9).unwrap();
            prop_assert!(rep.passed, "min eig {}", rep.min_eig);
        }
    }
}
