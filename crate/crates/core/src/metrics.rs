//! Disturbance measures between Bob's conditional and unconditional
//! statistics, and the l1 coherence of the state Alice measures.

use std::fmt;
use std::str::FromStr;

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::measurement::{Conditioning, DensityState, DistributionContext, OutcomeDistribution};
use crate::spin::{Axis, AxisBasis};
use crate::top::{build_floquet, trajectory, FloquetOperator, TopParams};

fn same_len(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(())
}

/// Probabilities below this are rounding noise from the matrix products and
/// enter the Hellinger distance as exact zeros. Without the floor a residue
/// of `1e-17` on a vanishing outcome contributes `√1e-17 ≈ 3e-9`.
pub const HELLINGER_FLOOR: f64 = 1e-14;

fn floored_sqrt(p: f64) -> f64 {
    if p < HELLINGER_FLOOR {
        0.0
    } else {
        p.sqrt()
    }
}

/// `(1/√2) ‖√p − √q‖₂`, in `[0, 1]`.
pub fn hellinger(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    same_len(p, q)?;
    let sum: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| (floored_sqrt(a) - floored_sqrt(b)).powi(2))
        .sum();
    Ok((0.5 * sum).sqrt().clamp(0.0, 1.0))
}

/// Participation ratio `1 / Σ p_k²`, the effective number of occupied
/// outcomes.
pub fn participation(p: &OutcomeDistribution) -> Result<f64> {
    let sum_sq: f64 = p.probs().iter().map(|x| x * x).sum();
    if sum_sq <= 0.0 {
        return Err(Error::InvalidDistribution(
            "participation ratio of an all-zero vector".into(),
        ));
    }
    Ok(1.0 / sum_sq)
}

/// `participation(P_C) − participation(P_B)`.
pub fn delta(p_c: &OutcomeDistribution, p_b: &OutcomeDistribution) -> Result<f64> {
    same_len(p_c, p_b)?;
    Ok(participation(p_c)? - participation(p_b)?)
}

/// Sum of off-diagonal magnitudes of `ρ` in the measurement eigenbasis.
pub fn coherence_l1(rho: &DensityState, basis: &AxisBasis) -> Result<f64> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: rho.dim(),
        });
    }
    Ok(offdiagonal_l1(&rho.in_basis(basis)))
}

pub(crate) fn offdiagonal_l1(m: &CMatrix) -> f64 {
    let mut total = 0.0;
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            if r != col {
                total += m[(r, col)].norm();
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// Hellinger distance `H`.
    Hellinger,
    /// Participation-ratio difference `Δ`.
    Delta,
    /// l1 coherence `C_A` just before Alice's measurement.
    Coherence,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Delta, Metric::Hellinger, Metric::Coherence];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Hellinger => "H",
            Metric::Delta => "Delta",
            Metric::Coherence => "C",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "hellinger" => Ok(Metric::Hellinger),
            "Delta" | "delta" => Ok(Metric::Delta),
            "C" | "coherence" => Ok(Metric::Coherence),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

/// Both distances for one `(t_β, t_α)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSample {
    pub t_beta: usize,
    pub t_alpha: usize,
    pub value_h: f64,
    pub value_delta: f64,
}

impl DistanceSample {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Hellinger => Some(self.value_h),
            Metric::Delta => Some(self.value_delta),
            Metric::Coherence => None,
        }
    }
}

/// Mean and second moment of a metric over Bob's uniform window
/// `t_β ∈ {n, …, n+T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedDistance {
    pub metric: Metric,
    pub n: usize,
    pub window: usize,
    pub mean: f64,
    pub second_moment: f64,
}

impl AveragedDistance {
    pub fn from_samples(metric: Metric, n: usize, window: usize, values: &[f64]) -> Self {
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let second_moment = values.iter().map(|v| v * v).sum::<f64>() / count;
        Self {
            metric,
            n,
            window,
            mean,
            second_moment,
        }
    }
}

/// Initial state, dynamics and measurement axes for one Alice/Bob protocol.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: TopParams,
    pub initial: DensityState,
    pub axis_a: Axis,
    pub axis_b: Axis,
}

/// A scenario with its trajectory `ρ(0..=horizon)` precomputed.
///
/// Conditional statistics use the transition matrix
/// `M_n[b, a] = |⟨b̂,b| U^n |â,a⟩|²`: after Alice's dephasing the state is
/// `Σ_a p_a |â,a⟩⟨â,a|`, so `P_C = M_n p(t_α)`. This agrees with
/// [`crate::measurement::conditional`] but costs `O(d²)` per sample.
#[derive(Debug)]
pub struct ScenarioRun {
    floquet: FloquetOperator,
    basis_a: AxisBasis,
    basis_b: AxisBasis,
    states: Vec<DensityState>,
    alice_pops: Vec<Vec<f64>>,
    bob_pops: Vec<Vec<f64>>,
    transitions: Vec<OnceLock<DMatrix<f64>>>,
}

impl ScenarioRun {
    pub fn new(scenario: &Scenario, horizon: usize) -> Result<Self> {
        let system = &scenario.params.system;
        if scenario.initial.dim() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                got: scenario.initial.dim(),
            });
        }
        let floquet = build_floquet(&scenario.params)?;
        let basis_a = system.axis_basis(scenario.axis_a);
        let basis_b = if scenario.axis_b == scenario.axis_a {
            basis_a.clone()
        } else {
            system.axis_basis(scenario.axis_b)
        };
        let states = trajectory(&scenario.initial, &floquet, horizon);
        let alice_pops = states
            .iter()
            .map(|r| basis_a.diagonal_of(r.matrix()))
            .collect();
        let bob_pops = states
            .iter()
            .map(|r| basis_b.diagonal_of(r.matrix()))
            .collect();
        Ok(Self {
            floquet,
            basis_a,
            basis_b,
            states,
            alice_pops,
            bob_pops,
            transitions: (0..=horizon).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn floquet(&self) -> &FloquetOperator {
        &self.floquet
    }

    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t > self.horizon() {
            return Err(Error::InvalidParams(format!(
                "time {t} beyond precomputed horizon {}",
                self.horizon()
            )));
        }
        Ok(())
    }

    pub fn state(&self, t: usize) -> Result<&DensityState> {
        self.check_time(t)?;
        Ok(&self.states[t])
    }

    /// `|⟨b̂,b| U^n |â,a⟩|²`, rows indexed by Bob's outcome.
    pub fn transition(&self, n: usize) -> Result<&DMatrix<f64>> {
        self.check_time(n)?;
        Ok(self.transitions[n].get_or_init(|| {
            let amplitudes =
                self.basis_b.vectors.adjoint() * self.floquet.power(n) * &self.basis_a.vectors;
            amplitudes.map(|z| z.norm_sqr())
        }))
    }

    pub fn unconditional(&self, t_beta: usize) -> Result<OutcomeDistribution> {
        self.check_time(t_beta)?;
        OutcomeDistribution::from_born(
            self.bob_pops[t_beta].clone(),
            DistributionContext {
                axis: self.basis_b.axis,
                time: Some(t_beta),
                conditioning: Conditioning::Unconditional,
            },
        )
    }

    pub fn conditional(&self, t_alpha: usize, t_beta: usize) -> Result<OutcomeDistribution> {
        if t_alpha >= t_beta {
            return Err(Error::TimeOrdering { t_alpha, t_beta });
        }
        let m = self.transition(t_beta - t_alpha)?;
        let p = DVector::from_column_slice(&self.alice_pops[t_alpha]);
        OutcomeDistribution::from_born(
            (m * p).iter().copied().collect(),
            DistributionContext {
                axis: self.basis_b.axis,
                time: Some(t_beta),
                conditioning: Conditioning::Conditional { t_alpha },
            },
        )
    }

    pub fn sample(&self, t_alpha: usize, t_beta: usize) -> Result<DistanceSample> {
        let p_c = self.conditional(t_alpha, t_beta)?;
        let p_b = self.unconditional(t_beta)?;
        Ok(DistanceSample {
            t_beta,
            t_alpha,
            value_h: hellinger(&p_c, &p_b)?,
            value_delta: delta(&p_c, &p_b)?,
        })
    }

    /// `C_A(t_α⁻)`: coherence in Alice's basis just before she measures.
    pub fn coherence_before(&self, t_alpha: usize) -> Result<f64> {
        coherence_l1(self.state(t_alpha)?, &self.basis_a)
    }

    /// Average of `metric` for fixed separation `n` over `t_β ∈ {n, …, n+T}`
    /// (`t_α ∈ {0, …, T}` for the coherence).
    pub fn averaged(&self, metric: Metric, n: usize, window: usize) -> Result<AveragedDistance> {
        validate_schedule(n)?;
        self.check_time(n + window)?;
        let values = (0..=window)
            .map(|t_alpha| match metric {
                Metric::Coherence => self.coherence_before(t_alpha),
                Metric::Hellinger => Ok(self.sample(t_alpha, t_alpha + n)?.value_h),
                Metric::Delta => Ok(self.sample(t_alpha, t_alpha + n)?.value_delta),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AveragedDistance::from_samples(metric, n, window, &values))
    }
}

fn validate_schedule(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "kick separation n must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `⟨d_n⟩ = 1/(T+1) Σ_{k=0}^{T} d(n+k, k)`.
pub fn averaged_distance(
    metric: Metric,
    scenario: &Scenario,
    n: usize,
    window: usize,
) -> Result<AveragedDistance> {
    validate_schedule(n)?;
    ScenarioRun::new(scenario, n + window)?.averaged(metric, n, window)
}
