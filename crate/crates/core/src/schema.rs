//! Declarative config forms for states, measures, schedules, and
//! experiments. Strict: unknown fields are rejected, the version tag must
//! match, and every numeric is a decimal string parsed exactly so configs
//! are reproducible across platforms and locales.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::cylmeasure::CylMeasure;
use crate::error::{CoreError, Result};
use crate::genfun::StateFamily;
use crate::schedule::{PhaseSchedule, Schedule};
use crate::symplectic::{LinearMap, PhaseSpace};
use crate::C64;

pub const SUPPORTED_VERSION: &str = "1";

fn num(s: &str, field: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CoreError::InvalidParameter(format!("{field}: not a decimal number: {s:?}")))
}

fn nums(v: &[String], field: &str) -> Result<Vec<f64>> {
    v.iter().map(|s| num(s, field)).collect()
}

fn matrix(rows: &[Vec<String>], field: &str) -> Result<Array2<f64>> {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CoreError::InvalidParameter(format!("{field}: ragged matrix")));
    }
    let mut m = Array2::<f64>::zeros((r, c));
    for (i, row) in rows.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            m[(i, j)] = num(s, field)?;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Const { value: String },
    /// β·h^{(d−1)/d}
    BetaThermo { beta: String, d: usize },
    /// β·h
    Linear { beta: String },
    /// c·h^a·e^{b·h}
    Explicit { c: String, a: String, b: String },
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<Schedule> {
        Ok(match self {
            ScheduleSpec::Const { value } => Schedule::constant(num(value, "schedule.value")?),
            ScheduleSpec::BetaThermo { beta, d } => {
                if !(1..=3).contains(d) {
                    return Err(CoreError::InvalidParameter(format!(
                        "schedule.d: dimension must be 1-3, got {d}"
                    )));
                }
                Schedule::beta_thermo(num(beta, "schedule.beta")?, *d)
            }
            ScheduleSpec::Linear { beta } => Schedule::linear(num(beta, "schedule.beta")?),
            ScheduleSpec::Explicit { c, a, b } => Schedule {
                c: num(c, "schedule.c")?,
                a: num(a, "schedule.a")?,
                b: num(b, "schedule.b")?,
            },
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseSpec {
    Zero,
    NormSq { coeff: String, a: String },
}

impl PhaseSpec {
    pub fn build(&self) -> Result<PhaseSchedule> {
        Ok(match self {
            PhaseSpec::Zero => PhaseSchedule::Zero,
            PhaseSpec::NormSq { coeff, a } => PhaseSchedule::NormSq {
                coeff: num(coeff, "phase.coeff")?,
                a: num(a, "phase.a")?,
            },
        })
    }
}

/// Declarative state family; mirrors the constructor catalog one-to-one
/// (the test-only custom hook is deliberately unreachable from configs).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Vacuum {
        modes: usize,
    },
    /// amplitudes as a flat real array [re₁, im₁, …]
    Coherent {
        modes: usize,
        z: Vec<String>,
    },
    QuantumGaussian {
        modes: usize,
        q: Vec<Vec<String>>,
        mean: Vec<String>,
    },
    GibbsPaper {
        modes: usize,
        energies: Vec<String>,
        beta_h: ScheduleSpec,
        mu_h: ScheduleSpec,
    },
    Mixture {
        weights: Vec<String>,
        children: Vec<StateSpec>,
    },
    Convolution {
        a: Box<StateSpec>,
        b: Box<StateSpec>,
    },
    Tensor {
        a: Box<StateSpec>,
        b: Box<StateSpec>,
    },
    Translate {
        xi: Vec<String>,
        child: Box<StateSpec>,
    },
    PullBack {
        matrix: Vec<Vec<String>>,
        phase: PhaseSpec,
        child: Box<StateSpec>,
    },
    Scale {
        c: String,
        child: Box<StateSpec>,
    },
}

impl StateSpec {
    pub fn build(&self) -> Result<StateFamily> {
        match self {
            StateSpec::Vacuum { modes } => Ok(StateFamily::vacuum(PhaseSpace::standard(*modes))),
            StateSpec::Coherent { modes, z } => {
                let flat = nums(z, "coherent.z")?;
                if flat.len() != 2 * modes {
                    return Err(CoreError::DimensionMismatch {
                        expected: 2 * modes,
                        got: flat.len(),
                        context: "coherent.z flat array".into(),
                    });
                }
                let amps: Vec<C64> = flat.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
                StateFamily::coherent(PhaseSpace::standard(*modes), amps)
            }
            StateSpec::QuantumGaussian { modes, q, mean } => StateFamily::quantum_gaussian(
                PhaseSpace::standard(*modes),
                matrix(q, "quantum_gaussian.q")?,
                Array1::from_vec(nums(mean, "quantum_gaussian.mean")?),
            ),
            StateSpec::GibbsPaper {
                modes,
                energies,
                beta_h,
                mu_h,
            } => {
                let s = StateFamily::gibbs_paper(
                    PhaseSpace::standard(*modes),
                    nums(energies, "gibbs.energies")?,
                    beta_h.build()?,
                    mu_h.build()?,
                )?;
                // surface β_h(k − μ_h) ≤ 0 violations at config time
                for h in [1e-6, 0.5, 1.0] {
                    s.eval(h, &vec![0.0; s.space.dim()])?;
                }
                Ok(s)
            }
            StateSpec::Mixture { weights, children } => StateFamily::mixture(
                nums(weights, "mixture.weights")?,
                children.iter().map(|c| c.build()).collect::<Result<Vec<_>>>()?,
            ),
            StateSpec::Convolution { a, b } => {
                StateFamily::quantum_convolution(a.build()?, b.build()?)
            }
            StateSpec::Tensor { a, b } => Ok(StateFamily::tensor(a.build()?, b.build()?)),
            StateSpec::Translate { xi, child } => {
                child.build()?.translate(nums(xi, "translate.xi")?)
            }
            StateSpec::PullBack {
                matrix: m,
                phase,
                child,
            } => {
                let child = child.build()?;
                let mat = matrix(m, "pull_back.matrix")?;
                let map = LinearMap::new(child.space, child.space, mat)?;
                child.pull_symplectic(map, phase.build()?)
            }
            StateSpec::Scale { c, child } => child.build()?.scale(num(c, "scale.c")?),
        }
    }
}

/// Declarative cylindrical measure mirroring the measure catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Dirac {
        modes: usize,
        p: Vec<String>,
    },
    Gaussian {
        modes: usize,
        mean: Vec<String>,
        q: Vec<Vec<String>>,
    },
    Mixture {
        weights: Vec<String>,
        children: Vec<MeasureSpec>,
    },
    Product {
        a: Box<MeasureSpec>,
        b: Box<MeasureSpec>,
    },
    Pushforward {
        matrix: Vec<Vec<String>>,
        source_modes: usize,
        child: Box<MeasureSpec>,
    },
    Convolution {
        a: Box<MeasureSpec>,
        b: Box<MeasureSpec>,
    },
    Modulate {
        xi: Vec<String>,
        child: Box<MeasureSpec>,
    },
    Scale {
        c: String,
        child: Box<MeasureSpec>,
    },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<CylMeasure> {
        match self {
            MeasureSpec::Dirac { modes, p } => CylMeasure::dirac(
                PhaseSpace::standard(*modes),
                Array1::from_vec(nums(p, "dirac.p")?),
            ),
            MeasureSpec::Gaussian { modes, mean, q } => CylMeasure::gaussian(
                PhaseSpace::standard(*modes),
                Array1::from_vec(nums(mean, "gaussian.mean")?),
                matrix(q, "gaussian.q")?,
            ),
            MeasureSpec::Mixture { weights, children } => CylMeasure::mixture(
                nums(weights, "mixture.weights")?,
                children.iter().map(|c| c.build()).collect::<Result<Vec<_>>>()?,
            ),
            MeasureSpec::Product { a, b } => Ok(CylMeasure::product(a.build()?, b.build()?)),
            MeasureSpec::Pushforward {
                matrix: m,
                source_modes,
                child,
            } => {
                let child = child.build()?;
                let map = LinearMap::new(
                    PhaseSpace::standard(*source_modes),
                    child.space,
                    matrix(m, "pushforward.matrix")?,
                )?;
                child.pushforward(map)
            }
            MeasureSpec::Convolution { a, b } => CylMeasure::convolution(a.build()?, b.build()?),
            MeasureSpec::Modulate { xi, child } => {
                child.build()?.modulate(nums(xi, "modulate.xi")?)
            }
            MeasureSpec::Scale { c, child } => child.build()?.scale(num(c, "scale.c")?),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum HScheduleSpec {
    /// h_k = 2^{−k}, k = 1..n
    Geometric { n: usize },
    Explicit { values: Vec<String> },
}

impl HScheduleSpec {
    pub fn build(&self) -> Result<Vec<f64>> {
        let hs = match self {
            HScheduleSpec::Geometric { n } => crate::schedule::geometric_schedule(*n),
            HScheduleSpec::Explicit { values } => nums(values, "h_schedule.values")?,
        };
        crate::schedule::check_h_schedule(&hs)?;
        Ok(hs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSpec {
    pub state: StateSpec,
    pub points: Vec<Vec<String>>,
    pub h_schedule: HScheduleSpec,
    pub tol: String,
    #[serde(default)]
    pub candidate: Option<MeasureSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoseSpec {
    pub d: usize,
    pub omega: String,
    pub beta_min: String,
    pub beta_max: String,
    pub beta_steps: usize,
    pub h_list: Vec<String>,
    pub f0_threshold: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BochnerSpec {
    pub measure: MeasureSpec,
    /// number of random points drawn per set (≤ 8), sets seeded from --seed
    pub n_points: usize,
    pub point_sets: usize,
    pub tol: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizeDemoSpec {
    pub state: StateSpec,
    pub measure: MeasureSpec,
    /// Gaussian bump symbol parameters on the 2-d base
    pub center: Vec<String>,
    pub sigma: String,
    pub delta: String,
    pub half_points: usize,
    pub n_trunc: usize,
    pub h_list: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolveSpec {
    pub a: StateSpec,
    pub b: StateSpec,
    pub points: Vec<Vec<String>>,
    pub h_schedule: HScheduleSpec,
    pub tol: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmsSpec {
    pub beta: String,
    pub omega: String,
    /// multiplier on β for the wrong-temperature control run
    pub control_factor: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpTermSpec {
    pub measure: MeasureSpec,
    /// k×k complex weight as [re, im] entry pairs, row-major
    pub weight: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpCheckSpec {
    pub k: usize,
    pub terms: Vec<CpTermSpec>,
    pub points: Vec<Vec<String>>,
    pub tol: String,
}

impl CpTermSpec {
    pub fn weight_matrix(&self, k: usize) -> Result<Array2<C64>> {
        if self.weight.len() != k || self.weight.iter().any(|r| r.len() != k) {
            return Err(CoreError::DimensionMismatch {
                expected: k,
                got: self.weight.len(),
                context: "cp weight".into(),
            });
        }
        let mut m = Array2::<C64>::zeros((k, k));
        for i in 0..k {
            for j in 0..k {
                let e = &self.weight[i][j];
                if e.len() != 2 {
                    return Err(CoreError::InvalidParameter(
                        "cp weight entries must be [re, im] pairs".into(),
                    ));
                }
                m[(i, j)] = C64::new(num(&e[0], "cp.weight.re")?, num(&e[1], "cp.weight.im")?);
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "spec",
    rename_all = "kebab-case",
    deny_unknown_fields
)]
pub enum ExperimentKind {
    Limit(LimitSpec),
    Bose(BoseSpec),
    Bochner(BochnerSpec),
    QuantizeDemo(QuantizeDemoSpec),
    Convolve(ConvolveSpec),
    Kms(KmsSpec),
    CpCheck(CpCheckSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: String,
    pub experiment: ExperimentKind,
}

impl ExperimentConfig {
    pub fn check_version(&self) -> Result<()> {
        if self.version != SUPPORTED_VERSION {
            return Err(CoreError::InvalidParameter(format!(
                "unsupported config version {:?}; this binary supports {SUPPORTED_VERSION:?}",
                self.version
            )));
        }
        Ok(())
    }
}

pub fn parse_points(rows: &[Vec<String>], dim: usize) -> Result<Vec<Vec<f64>>> {
    rows.iter()
        .map(|row| {
            let p = nums(row, "points")?;
            if p.len() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                    context: "test point".into(),
                });
            }
            Ok(p)
        })
        .collect()
}

pub fn parse_num(s: &str, field: &str) -> Result<f64> {
    num(s, field)
}

pub fn parse_nums(v: &[String], field: &str) -> Result<Vec<f64>> {
    nums(v, field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_bad_version() {
        let raw = r#"{
            "version": "1",
            "experiment": {
                "kind": "kms",
                "spec": { "beta": "1.0", "omega": "1.0", "control_factor": "2.0", "extra": 1 }
            }
        }"#;
        let err = serde_json::from_str::<ExperimentConfig>(raw).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");

        let raw = r#"{
            "version": "0",
            "experiment": { "kind": "kms", "spec": { "beta": "1.0", "omega": "1.0", "control_factor": "2.0" } }
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(raw).unwrap();
        assert!(cfg.check_version().is_err());
    }

    #[test]
    fn state_round_trip_builds() {
        let raw = r#"{
            "type": "mixture",
            "weights": ["0.5", "0.5"],
            "children": [
                { "type": "vacuum", "modes": 1 },
                { "type": "coherent", "modes": 1, "z": ["0.5", "-0.25"] }
            ]
        }"#;
        let spec: StateSpec = serde_json::from_str(raw).unwrap();
        let s = spec.build().unwrap();
        assert_eq!(s.space.modes(), 1);
        let v = s.eval(1.0, &[0.0, 0.0]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gibbs_gap_violation_is_named() {
        let raw = r#"{
            "type": "gibbs_paper",
            "modes": 1,
            "energies": ["1.0"],
            "beta_h": { "form": "const", "value": "1.0" },
            "mu_h": { "form": "const", "value": "2.0" }
        }"#;
        let spec: StateSpec = serde_json::from_str(raw).unwrap();
        let err = spec.build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("μ_h"), "{msg}");
    }

    #[test]
    fn measure_and_schedule_specs_build() {
        let raw = r#"{
            "type": "convolution",
            "a": { "type": "dirac", "modes": 1, "p": ["1.0", "0.0"] },
            "b": { "type": "gaussian", "modes": 1, "mean": ["0.0", "0.0"],
                   "q": [["1.0", "0.0"], ["0.0", "1.0"]] }
        }"#;
        let spec: MeasureSpec = serde_json::from_str(raw).unwrap();
        let m = spec.build().unwrap();
        assert!((m.mass().unwrap().re - 1.0).abs() < 1e-14);

        let s = ScheduleSpec::BetaThermo {
            beta: "2.0".into(),
            d: 3,
        }
        .build()
        .unwrap();
        assert!((s.eval(1e-3) - 2.0 * 1e-3f64.powf(2.0 / 3.0)).abs() < 1e-15);

        let hs = HScheduleSpec::Geometric { n: 4 }.build().unwrap();
        assert_eq!(hs, vec![0.5, 0.25, 0.125, 0.0625]);
        // non-decreasing explicit schedules rejected
        assert!(HScheduleSpec::Explicit {
            values: vec!["0.1".into(), "0.2".into()]
        }
        .build()
        .is_err());
    }

    #[test]
    fn numbers_must_be_decimal_strings() {
        let raw = r#"{ "type": "coherent", "modes": 1, "z": ["abc", "0.0"] }"#;
        let spec: StateSpec = serde_json::from_str(raw).unwrap();
        let err = spec.build().unwrap_err();
        assert!(err.to_string().contains("coherent.z"), "{err}");
    }
}
