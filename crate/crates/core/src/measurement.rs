//! Projective measurements of `J·n̂`, the dephasing channel that models an
//! unrecorded measurement, and the resulting outcome statistics.
//!
//! Alice measures along `â` at `t_α`, Bob along `b̂` at `t_β > t_α`. Bob's
//! unconditional statistics `P_B` ignore Alice; his conditional statistics
//! `P_C` include the (unread) disturbance of her measurement.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c, conjugate, hermitian_eigh, hermiticity_residual, CMatrix, CVector};
use crate::spin::{Axis, AxisBasis, SpinSystem};
use crate::top::{evolve, FloquetOperator};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = -1e-10;
const PROB_CLIP_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-10;
/// Branches of the joint distribution below this weight are dropped.
pub const NEGLIGIBLE_BRANCH: f64 = 1e-14;

/// A density matrix in the `J_z` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
}

impl DensityState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "expected a non-empty square matrix, got {:?}",
                matrix.shape()
            )));
        }
        let herm = hermiticity_residual(&matrix);
        if !(herm <= HERMITIAN_TOL) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if !((trace.re - 1.0).abs() <= TRACE_TOL && trace.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let (values, _) = hermitian_eigh(&matrix);
        let min = values.last().copied().unwrap_or(0.0);
        if min < MIN_EIGENVALUE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !((norm - 1.0).abs() <= 1e-10) {
            return Err(Error::InvalidState(format!(
                "state vector has norm {norm}, expected 1"
            )));
        }
        let psi = psi / c(norm);
        Ok(Self {
            matrix: &psi * psi.adjoint(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) * c(1.0 / dim as f64),
        }
    }

    /// Wraps the image of a valid state under a unitary or a dephasing
    /// channel; both preserve validity so no eigen-check is repeated.
    pub(crate) fn from_evolution(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `ρ` expressed in the given eigenbasis.
    pub fn in_basis(&self, basis: &AxisBasis) -> CMatrix {
        basis.to_basis(&self.matrix)
    }

    /// Whether `ρ` commutes with the measured observable, i.e. is diagonal in
    /// its eigenbasis up to `tol`.
    pub fn is_diagonal_in(&self, basis: &AxisBasis, tol: f64) -> bool {
        let m = self.in_basis(basis);
        (0..m.nrows()).all(|r| (0..m.ncols()).all(|col| r == col || m[(r, col)].norm() <= tol))
    }
}

/// How an outcome distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    /// Born rule on a given state.
    Direct,
    /// Bob's statistics with no earlier measurement.
    Unconditional,
    /// Bob's statistics after Alice's unrecorded measurement at `t_alpha`.
    Conditional { t_alpha: usize },
    /// Bob's marginal of the joint distribution.
    JointMarginal { t_alpha: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionContext {
    pub axis: Axis,
    pub time: Option<usize>,
    pub conditioning: Conditioning,
}

impl DistributionContext {
    pub fn direct(axis: Axis) -> Self {
        Self {
            axis,
            time: None,
            conditioning: Conditioning::Direct,
        }
    }
}

/// Probabilities over `m = j, j-1, …, -j` of `J·n̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    pub context: DistributionContext,
}

impl OutcomeDistribution {
    /// Validates raw Born-rule values: entries in `[-1e-12, 1+1e-12]`, total
    /// within `1e-10` of one. Tiny negatives are clipped to zero and the
    /// vector renormalized.
    pub fn from_born(raw: Vec<f64>, context: DistributionContext) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidDistribution(
                "empty probability vector".into(),
            ));
        }
        for (k, &p) in raw.iter().enumerate() {
            if !p.is_finite() || p < -PROB_CLIP_TOL || p > 1.0 + PROB_CLIP_TOL {
                return Err(Error::NumericalIntegrity(format!(
                    "probability {p:e} at outcome index {k} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::NumericalIntegrity(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        let mut probs: Vec<f64> = raw.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self { probs, context })
    }

    /// A distribution without measurement context, e.g. for metric tests.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Self::from_born(probs, DistributionContext::direct(Axis::Z))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `P(b, a)`: rows index Bob's outcome, columns Alice's.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub matrix: DMatrix<f64>,
    pub t_alpha: usize,
    pub t_beta: usize,
}

impl JointDistribution {
    pub fn alice_marginal(&self) -> Vec<f64> {
        self.matrix.row_sum().iter().copied().collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        self.matrix.column_sum().iter().copied().collect()
    }

    pub fn total(&self) -> f64 {
        self.matrix.sum()
    }
}

/// `A_m = |n̂,m⟩⟨n̂,m|` for `m = j … -j`.
pub fn projectors(system: &SpinSystem, axis: Axis) -> Vec<CMatrix> {
    let basis = system.axis_basis(axis);
    (0..system.dim()).map(|k| basis.projector(k)).collect()
}

fn check_dim(rho: &DensityState, basis: &AxisBasis) -> Result<()> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: rho.dim(),
        });
    }
    Ok(())
}

/// `Σ_m A_m ρ A_m`: keeps the diagonal in the measurement basis and drops
/// every coherence.
pub fn dephase(rho: &DensityState, basis: &AxisBasis) -> Result<DensityState> {
    check_dim(rho, basis)?;
    let in_basis = rho.in_basis(basis);
    let diag = CMatrix::from_diagonal(&in_basis.diagonal());
    Ok(DensityState::from_evolution(basis.from_basis(&diag)))
}

/// Born rule `p_m = ⟨n̂,m|ρ|n̂,m⟩`.
pub fn outcome_distribution(rho: &DensityState, basis: &AxisBasis) -> Result<OutcomeDistribution> {
    outcome_with_context(rho, basis, DistributionContext::direct(basis.axis))
}

fn outcome_with_context(
    rho: &DensityState,
    basis: &AxisBasis,
    context: DistributionContext,
) -> Result<OutcomeDistribution> {
    check_dim(rho, basis)?;
    OutcomeDistribution::from_born(basis.diagonal_of(rho.matrix()), context)
}

/// Bob's statistics at `t_beta` with no intervening measurement.
pub fn unconditional(
    rho0: &DensityState,
    floquet: &FloquetOperator,
    t_beta: usize,
    basis_b: &AxisBasis,
) -> Result<OutcomeDistribution> {
    let rho = evolve(rho0, floquet, t_beta);
    outcome_with_context(
        &rho,
        basis_b,
        DistributionContext {
            axis: basis_b.axis,
            time: Some(t_beta),
            conditioning: Conditioning::Unconditional,
        },
    )
}

fn check_order(t_alpha: usize, t_beta: usize) -> Result<()> {
    if t_alpha >= t_beta {
        return Err(Error::TimeOrdering { t_alpha, t_beta });
    }
    Ok(())
}

/// Bob's statistics at `t_beta` after Alice's unrecorded measurement at
/// `t_alpha`, computed through the dephasing channel.
pub fn conditional(
    rho0: &DensityState,
    floquet: &FloquetOperator,
    t_alpha: usize,
    t_beta: usize,
    basis_a: &AxisBasis,
    basis_b: &AxisBasis,
) -> Result<OutcomeDistribution> {
    check_order(t_alpha, t_beta)?;
    let before = evolve(rho0, floquet, t_alpha);
    conditional_from(&before, floquet, t_alpha, t_beta, basis_a, basis_b)
}

/// [`conditional`] given the state just before Alice's measurement.
pub fn conditional_from(
    before: &DensityState,
    floquet: &FloquetOperator,
    t_alpha: usize,
    t_beta: usize,
    basis_a: &AxisBasis,
    basis_b: &AxisBasis,
) -> Result<OutcomeDistribution> {
    check_order(t_alpha, t_beta)?;
    let after = dephase(before, basis_a)?;
    let at_bob = evolve(&after, floquet, t_beta - t_alpha);
    outcome_with_context(
        &at_bob,
        basis_b,
        DistributionContext {
            axis: basis_b.axis,
            time: Some(t_beta),
            conditioning: Conditioning::Conditional { t_alpha },
        },
    )
}

/// `P(b, a) = Tr[U_{βα} A_a ρ(t_α) A_a U_{βα}† B_b]`, evolving each of
/// Alice's branches separately.
pub fn joint(
    rho0: &DensityState,
    floquet: &FloquetOperator,
    t_alpha: usize,
    t_beta: usize,
    basis_a: &AxisBasis,
    basis_b: &AxisBasis,
) -> Result<JointDistribution> {
    check_order(t_alpha, t_beta)?;
    check_dim(rho0, basis_a)?;
    check_dim(rho0, basis_b)?;
    let d = rho0.dim();
    let before = evolve(rho0, floquet, t_alpha);
    let propagator = floquet.power(t_beta - t_alpha);
    let mut matrix = DMatrix::<f64>::zeros(d, d);
    for a in 0..d {
        let proj = basis_a.projector(a);
        let branch = &proj * before.matrix() * &proj;
        let weight = branch.trace().re;
        if weight < NEGLIGIBLE_BRANCH {
            continue;
        }
        let evolved = conjugate(&propagator, &branch);
        for (b, p) in basis_b.diagonal_of(&evolved).into_iter().enumerate() {
            if p < -PROB_CLIP_TOL {
                return Err(Error::NumericalIntegrity(format!(
                    "joint probability {p:e} at (b={b}, a={a})"
                )));
            }
            matrix[(b, a)] = p.max(0.0);
        }
    }
    let total = matrix.sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::NumericalIntegrity(format!(
            "joint distribution sums to {total}"
        )));
    }
    Ok(JointDistribution {
        matrix,
        t_alpha,
        t_beta,
    })
}

/// Bob's marginal of [`joint`] as an outcome distribution.
pub fn joint_marginal(
    rho0: &DensityState,
    floquet: &FloquetOperator,
    t_alpha: usize,
    t_beta: usize,
    basis_a: &AxisBasis,
    basis_b: &AxisBasis,
) -> Result<OutcomeDistribution> {
    let joint = joint(rho0, floquet, t_alpha, t_beta, basis_a, basis_b)?;
    OutcomeDistribution::from_born(
        joint.bob_marginal(),
        DistributionContext {
            axis: basis_b.axis,
            time: Some(t_beta),
            conditioning: Conditioning::JointMarginal { t_alpha },
        },
    )
}
