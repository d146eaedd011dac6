//! Cylindrical measures as characteristic-functional trees, with analytic
//! marginals for the Dirac/Gaussian catalog, the classical Bochner
//! certifier, and Gauss–Hermite integration of cylindrical functions.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::linalg::{pd_check, PdReport};
use crate::quadrature::integrate_gaussian;
use crate::symplectic::{LinearMap, PhaseSpace};
use crate::C64;

#[derive(Clone)]
pub enum MNode {
    /// Point mass at the functional x ↦ p·x.
    Dirac(Array1<f64>),
    Gaussian {
        mean: Array1<f64>,
        q: Array2<f64>,
    },
    Mixture {
        weights: Vec<f64>,
        children: Vec<CylMeasure>,
    },
    Product(Box<CylMeasure>, Box<CylMeasure>),
    /// char(y) = char_child(u y); u maps this space into the child's.
    Pushforward {
        map: LinearMap,
        child: Box<CylMeasure>,
    },
    Convolution(Box<CylMeasure>, Box<CylMeasure>),
    /// char(x) = char_child(x + ξ); complex-valued in general.
    Modulate {
        xi: Vec<f64>,
        child: Box<CylMeasure>,
    },
    Scale {
        c: f64,
        child: Box<CylMeasure>,
    },
    /// Injected functional for negative tests.
    Custom {
        label: String,
        f: Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>,
    },
}

#[derive(Clone)]
pub struct CylMeasure {
    pub space: PhaseSpace,
    pub node: MNode,
}

impl fmt::Debug for CylMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CylMeasure({} modes, {})", self.space.modes(), self.label())
    }
}

/// One Gaussian component of a normal form: (weight, mean functional p,
/// covariance form Q). Dirac is Q = 0.
pub type GaussComponent = (f64, Array1<f64>, Array2<f64>);

/// Finite-dimensional marginal along a chosen base: a mixture of Gaussians
/// (possibly degenerate) on R^k in base coordinates.
#[derive(Debug, Clone)]
pub struct Marginal {
    pub base: Vec<Vec<f64>>,
    pub components: Vec<GaussComponent>,
}

impl Marginal {
    /// Fourier transform at coefficient vector t; must equal
    /// char(Σ t_i base_i) of the parent measure.
    pub fn fourier(&self, t: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (w, mean, cov) in &self.components {
            let mut phase = 0.0;
            let mut quad = 0.0;
            for i in 0..t.len() {
                phase += mean[i] * t[i];
                for j in 0..t.len() {
                    quad += t[i] * cov[(i, j)] * t[j];
                }
            }
            acc += *w * C64::from_polar((-quad / 2.0).exp(), phase);
        }
        acc
    }
}

impl CylMeasure {
    pub fn dirac(space: PhaseSpace, p: Array1<f64>) -> Result<CylMeasure> {
        space.check_vector(p.as_slice().unwrap())?;
        Ok(CylMeasure {
            space,
            node: MNode::Dirac(p),
        })
    }

    pub fn dirac_zero(space: PhaseSpace) -> CylMeasure {
        CylMeasure {
            space,
            node: MNode::Dirac(Array1::zeros(space.dim())),
        }
    }

    pub fn gaussian(space: PhaseSpace, mean: Array1<f64>, q: Array2<f64>) -> Result<CylMeasure> {
        let n = space.dim();
        if mean.len() != n || q.nrows() != n || q.ncols() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: mean.len(),
                context: "Gaussian parameters",
            });
        }
        Ok(CylMeasure {
            space,
            node: MNode::Gaussian { mean, q },
        })
    }

    pub fn mixture(weights: Vec<f64>, children: Vec<CylMeasure>) -> Result<CylMeasure> {
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
        Ok(CylMeasure {
            space,
            node: MNode::Mixture { weights, children },
        })
    }

    pub fn product(a: CylMeasure, b: CylMeasure) -> CylMeasure {
        CylMeasure {
            space: a.space.direct_sum(&b.space),
            node: MNode::Product(Box::new(a), Box::new(b)),
        }
    }

    /// Push forward along ᵗu: the result lives on u's source space.
    pub fn pushforward(self, map: LinearMap) -> Result<CylMeasure> {
        if map.target != self.space {
            return Err(CoreError::SpaceMismatch {
                left: map.target.modes(),
                right: self.space.modes(),
            });
        }
        Ok(CylMeasure {
            space: map.source,
            node: MNode::Pushforward {
                map,
                child: Box::new(self),
            },
        })
    }

    pub fn convolution(a: CylMeasure, b: CylMeasure) -> Result<CylMeasure> {
        if a.space != b.space {
            return Err(CoreError::SpaceMismatch {
                left: a.space.modes(),
                right: b.space.modes(),
            });
        }
        Ok(CylMeasure {
            space: a.space,
            node: MNode::Convolution(Box::new(a), Box::new(b)),
        })
    }

    pub fn modulate(self, xi: Vec<f64>) -> Result<CylMeasure> {
        self.space.check_vector(&xi)?;
        Ok(CylMeasure {
            space: self.space,
            node: MNode::Modulate {
                xi,
                child: Box::new(self),
            },
        })
    }

    pub fn scale(self, c: f64) -> Result<CylMeasure> {
        if c < 0.0 {
            return Err(CoreError::InvalidParameter("scale must be ≥ 0".into()));
        }
        Ok(CylMeasure {
            space: self.space,
            node: MNode::Scale {
                c,
                child: Box::new(self),
            },
        })
    }

    pub fn custom<F>(space: PhaseSpace, label: &str, f: F) -> CylMeasure
    where
        F: Fn(&[f64]) -> C64 + Send + Sync + 'static,
    {
        CylMeasure {
            space,
            node: MNode::Custom {
                label: label.to_string(),
                f: Arc::new(f),
            },
        }
    }

    pub fn label(&self) -> String {
        match &self.node {
            MNode::Dirac(_) => "dirac".into(),
            MNode::Gaussian { .. } => "gaussian".into(),
            MNode::Mixture { children, .. } => format!("mixture[{}]", children.len()),
            MNode::Product(a, b) => format!("({} × {})", a.label(), b.label()),
            MNode::Pushforward { child, .. } => format!("pushforward({})", child.label()),
            MNode::Convolution(a, b) => format!("({} ⊛ {})", a.label(), b.label()),
            MNode::Modulate { child, .. } => format!("modulate({})", child.label()),
            MNode::Scale { c, child } => format!("{c}·{}", child.label()),
            MNode::Custom { label, .. } => format!("custom:{label}"),
        }
    }

    /// Characteristic functional M̂(x).
    pub fn char(&self, x: &[f64]) -> Result<C64> {
        self.space.check_vector(x)?;
        match &self.node {
            MNode::Dirac(p) => {
                let px: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum();
                Ok(C64::from_polar(1.0, px))
            }
            MNode::Gaussian { mean, q } => {
                let mut phase = 0.0;
                let mut quad = 0.0;
                for i in 0..x.len() {
                    phase += mean[i] * x[i];
                    for j in 0..x.len() {
                        quad += x[i] * q[(i, j)] * x[j];
                    }
                }
                Ok(C64::from_polar((-quad / 2.0).exp(), phase))
            }
            MNode::Mixture { weights, children } => {
                let mut acc = C64::new(0.0, 0.0);
                for (w, c) in weights.iter().zip(children) {
                    acc += *w * c.char(x)?;
                }
                Ok(acc)
            }
            MNode::Product(a, b) => {
                let na = a.space.dim();
                Ok(a.char(&x[..na])? * b.char(&x[na..])?)
            }
            MNode::Pushforward { map, child } => child.char(&map.apply(x)?),
            MNode::Convolution(a, b) => Ok(a.char(x)? * b.char(x)?),
            MNode::Modulate { xi, child } => {
                let shifted: Vec<f64> = x.iter().zip(xi).map(|(a, b)| a + b).collect();
                child.char(&shifted)
            }
            MNode::Scale { c, child } => Ok(*c * child.char(x)?),
            MNode::Custom { f, .. } => Ok(f(x)),
        }
    }

    /// Total mass M̂(0).
    pub fn mass(&self) -> Result<C64> {
        self.char(&vec![0.0; self.space.dim()])
    }

    /// Reduce the analytic catalog to a finite Gaussian mixture
    /// Σ w_i·N(p_i, Q_i) in functional coordinates. Modulate and custom
    /// nodes are outside the catalog.
    pub fn normal_form(&self) -> Result<Vec<GaussComponent>> {
        let n = self.space.dim();
        match &self.node {
            MNode::Dirac(p) => Ok(vec![(1.0, p.clone(), Array2::zeros((n, n)))]),
            MNode::Gaussian { mean, q } => Ok(vec![(1.0, mean.clone(), q.clone())]),
            MNode::Mixture { weights, children } => {
                let mut out = Vec::new();
                for (w, c) in weights.iter().zip(children) {
                    for (cw, p, q) in c.normal_form()? {
                        out.push((w * cw, p, q));
                    }
                }
                Ok(out)
            }
            MNode::Product(a, b) => {
                let fa = a.normal_form()?;
                let fb = b.normal_form()?;
                let (na, nb) = (a.space.dim(), b.space.dim());
                let mut out = Vec::new();
                for (wa, pa, qa) in &fa {
                    for (wb, pb, qb) in &fb {
                        let mut p = Array1::zeros(na + nb);
                        let mut q = Array2::zeros((na + nb, na + nb));
                        for i in 0..na {
                            p[i] = pa[i];
                            for j in 0..na {
                                q[(i, j)] = qa[(i, j)];
                            }
                        }
                        for i in 0..nb {
                            p[na + i] = pb[i];
                            for j in 0..nb {
                                q[(na + i, na + j)] = qb[(i, j)];
                            }
                        }
                        out.push((wa * wb, p, q));
                    }
                }
                Ok(out)
            }
            MNode::Pushforward { map, child } => {
                // e^{ip·(uy) − (uy)ᵀQ(uy)/2} = e^{i(uᵀp)·y − yᵀ(uᵀQu)y/2}
                let inner = child.normal_form()?;
                let u = &map.matrix;
                let mut out = Vec::new();
                for (w, p, q) in inner {
                    let pt = Array1::from(map.transpose_apply(p.as_slice().unwrap())?);
                    let qt = u.t().dot(&q).dot(u);
                    out.push((w, pt, qt));
                }
                Ok(out)
            }
            MNode::Convolution(a, b) => {
                let fa = a.normal_form()?;
                let fb = b.normal_form()?;
                let mut out = Vec::new();
                for (wa, pa, qa) in &fa {
                    for (wb, pb, qb) in &fb {
                        out.push((wa * wb, pa + pb, qa + qb));
                    }
                }
                Ok(out)
            }
            MNode::Scale { c, child } => Ok(child
                .normal_form()?
                .into_iter()
                .map(|(w, p, q)| (c * w, p, q))
                .collect()),
            MNode::Modulate { .. } => Err(CoreError::NonAnalytic(
                "modulated (complex) measures have no real marginals".into(),
            )),
            MNode::Custom { label, .. } => Err(CoreError::NonAnalytic(format!(
                "custom functional '{label}'"
            ))),
        }
    }

    /// Marginal onto the span of the base vectors: the Borel measure on R^k
    /// whose Fourier transform at t is char(Σ t_i base_i).
    pub fn marginal(&self, base: &[Vec<f64>]) -> Result<Marginal> {
        if base.is_empty() || base.len() > self.space.dim() {
            return Err(CoreError::InvalidParameter(
                "marginal base must have 1..=2d vectors".into(),
            ));
        }
        for b in base {
            self.space.check_vector(b)?;
        }
        // independence via the Gram matrix
        let k = base.len();
        let mut gram = Array2::<f64>::zeros((k, k));
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = base[i].iter().zip(&base[j]).map(|(a, b)| a * b).sum();
            }
        }
        let gvals = crate::linalg::eigvalsh(&gram.mapv(|v| C64::new(v, 0.0)))?;
        let gmax = gvals.iter().cloned().fold(0.0f64, f64::max);
        if gvals.iter().any(|v| *v < 1e-10 * gmax.max(1.0)) {
            return Err(CoreError::InvalidParameter(
                "marginal base vectors are linearly dependent".into(),
            ));
        }
        let nf = self.normal_form()?;
        let n = self.space.dim();
        let mut bmat = Array2::<f64>::zeros((n, k));
        for (j, b) in base.iter().enumerate() {
            for i in 0..n {
                bmat[(i, j)] = b[i];
            }
        }
        let components = nf
            .into_iter()
            .map(|(w, p, q)| {
                let mean = bmat.t().dot(&p);
                let cov = bmat.t().dot(&q).dot(&bmat);
                (w, mean, cov)
            })
            .collect();
        Ok(Marginal {
            base: base.to_vec(),
            components,
        })
    }

    /// ∫ f(⟨ξ, b₁⟩, …, ⟨ξ, b_k⟩) dM(ξ): exact on atoms, adaptive
    /// Gauss–Hermite on Gaussian components. Returns (value, error estimate).
    pub fn integrate_cyl<F>(&self, base: &[Vec<f64>], f: F) -> Result<(C64, f64)>
    where
        F: Fn(&[f64]) -> C64,
    {
        let marg = self.marginal(base)?;
        let mut acc = C64::new(0.0, 0.0);
        let mut err = 0.0f64;
        for (w, mean, cov) in &marg.components {
            let (v, e) = integrate_gaussian(mean, cov, 1e-9, &f)?;
            acc += *w * v;
            err += w.abs() * e;
        }
        Ok((acc, err))
    }

    /// Invariance under a linear map: |char(s x) − char(x)| ≤ tol at samples.
    pub fn invariance_check(&self, s: &LinearMap, samples: &[Vec<f64>], tol: f64) -> Result<bool> {
        for x in samples {
            let sx = s.apply(x)?;
            if (self.char(&sx)? - self.char(x)?).norm() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Classical Bochner certificate: Gram matrix B[k][j] = char(x_j − x_k),
/// no phase twist.
pub fn bochner_pd_check(m: &CylMeasure, points: &[Vec<f64>], tol: f64) -> Result<PdReport> {
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
            b[(k, j)] = m.char(&diff)?;
        }
    }
    pd_check(&b, tol)
}

/// Report of the almost-periodic functional bound |Σ ζ_j M̂(x_j)| ≤
/// ‖Σ ζ_j e^{i x_j·(·)}‖_∞ · M̂(0).
#[derive(Debug, Clone)]
pub struct ApReport {
    pub value: C64,
    pub sup_bound: f64,
    pub mass: f64,
    pub passed: bool,
}

/// Evaluate Σ ζ_j M̂(x_j) and certify it against the sup-norm bound; the
/// sup norm of the trigonometric polynomial is estimated by seeded random
/// sampling of the dual variable.
pub fn ap_functional(m: &CylMeasure, combo: &[(C64, Vec<f64>)], seed: u64) -> Result<ApReport> {
    if combo.is_empty() {
        return Err(CoreError::InvalidParameter("empty combination".into()));
    }
    let mut value = C64::new(0.0, 0.0);
    for (zeta, x) in combo {
        value += zeta * m.char(x)?;
    }
    let mass = m.mass()?.norm();
    let dim = m.space.dim();
    let poly = |v: &[f64]| -> f64 {
        combo
            .iter()
            .map(|(zeta, x)| {
                let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
                zeta * C64::from_polar(1.0, dot)
            })
            .sum::<C64>()
            .norm()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = poly(&vec![0.0; dim]);
    let mut best = vec![0.0; dim];
    for _ in 0..8192 {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-16.0..16.0)).collect();
        let p = poly(&v);
        if p > sup {
            sup = p;
            best = v;
        }
    }
    // local refinement around the best sample
    let mut step = 0.5;
    for _ in 0..40 {
        let mut improved = false;
        for i in 0..dim {
            for s in [-step, step] {
                let mut v = best.clone();
                v[i] += s;
                let p = poly(&v);
                if p > sup {
                    sup = p;
                    best = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let passed = value.norm() <= sup * mass * (1.0 + 1e-9) + 1e-12;
    Ok(ApReport {
        value,
        sup_bound: sup,
        mass,
        passed,
    })
}
