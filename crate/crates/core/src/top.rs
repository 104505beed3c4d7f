//! The kicked top Floquet operator `U = T R` with torsion
//! `T = exp(-i κ₀ J_z² / 2j)` and rotation `R = exp(-i J_y π/2)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{conjugate, CMatrix};
use crate::measurement::DensityState;
use crate::spin::{Axis, SpinSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct TopParams {
    pub system: SpinSystem,
    pub kappa0: f64,
}

impl TopParams {
    pub fn new(system: SpinSystem, kappa0: f64) -> Result<Self> {
        if !kappa0.is_finite() || kappa0 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "kick strength must be finite and non-negative, got {kappa0}"
            )));
        }
        Ok(Self { system, kappa0 })
    }
}

/// One kick period. The torsion and rotation factors are kept alongside
/// their product.
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    params: TopParams,
    torsion: DVector<Complex64>,
    rotation: CMatrix,
    unitary: CMatrix,
}

/// Diagonal of `exp(-i κ₀ J_z² / 2j)` in the descending-`m` basis.
pub fn torsion_diagonal(system: &SpinSystem, kappa0: f64) -> DVector<Complex64> {
    let two_j = system.twice_j() as f64;
    DVector::from_iterator(
        system.dim(),
        system
            .m_values()
            .map(|m| Complex64::from_polar(1.0, -kappa0 * m * m / two_j)),
    )
}

pub fn build_floquet(params: &TopParams) -> Result<FloquetOperator> {
    let system = &params.system;
    if system.twice_j() == 0 {
        return Err(Error::InvalidParams(
            "torsion is undefined for j = 0".to_string(),
        ));
    }
    let torsion = torsion_diagonal(system, params.kappa0);
    let rotation = system.rotation_operator(Axis::Y, FRAC_PI_2);
    let unitary = CMatrix::from_fn(system.dim(), system.dim(), |r, col| {
        torsion[r] * rotation[(r, col)]
    });
    Ok(FloquetOperator {
        params: params.clone(),
        torsion,
        rotation,
        unitary,
    })
}

impl FloquetOperator {
    pub fn params(&self) -> &TopParams {
        &self.params
    }

    pub fn system(&self) -> &SpinSystem {
        &self.params.system
    }

    pub fn kappa0(&self) -> f64 {
        self.params.kappa0
    }

    pub fn torsion_diagonal(&self) -> &DVector<Complex64> {
        &self.torsion
    }

    pub fn torsion(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.torsion)
    }

    pub fn rotation(&self) -> &CMatrix {
        &self.rotation
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.unitary
    }

    /// `U^steps`, by repeated squaring.
    pub fn power(&self, steps: usize) -> CMatrix {
        let d = self.system().dim();
        let mut result = CMatrix::identity(d, d);
        let mut base = self.unitary.clone();
        let mut n = steps;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

/// `U^steps ρ U†^steps`, one kick at a time.
pub fn evolve(rho: &DensityState, floquet: &FloquetOperator, steps: usize) -> DensityState {
    let mut m = rho.matrix().clone();
    for _ in 0..steps {
        m = conjugate(floquet.matrix(), &m);
    }
    DensityState::from_evolution(m)
}

/// States `ρ(0), ρ(1), …, ρ(last)` along one stroboscopic trajectory.
pub fn trajectory(
    rho0: &DensityState,
    floquet: &FloquetOperator,
    last: usize,
) -> Vec<DensityState> {
    let mut states = Vec::with_capacity(last + 1);
    states.push(rho0.clone());
    for t in 0..last {
        let next = conjugate(floquet.matrix(), states[t].matrix());
        states.push(DensityState::from_evolution(next));
    }
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, unitarity_residual};
    use crate::spin::Sign;

    fn params(j: f64, kappa0: f64) -> TopParams {
        TopParams::new(SpinSystem::new(j).unwrap(), kappa0).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(TopParams::new(SpinSystem::new(1.0).unwrap(), -1.0).is_err());
        assert!(TopParams::new(SpinSystem::new(1.0).unwrap(), f64::INFINITY).is_err());
        assert!(build_floquet(&params(0.0, 1.0)).is_err());
    }

    #[test]
    fn zero_kick_is_pure_rotation() {
        let f = build_floquet(&params(3.0, 0.0)).unwrap();
        assert_eq!(f.matrix(), f.rotation());
    }

    #[test]
    fn spin_one_torsion() {
        let f = build_floquet(&params(1.0, 2.0)).unwrap();
        let t = f.torsion_diagonal();
        let e = Complex64::from_polar(1.0, -1.0);
        assert!((t[0] - e).norm() < 1e-15);
        assert!((t[1] - c(1.0)).norm() < 1e-15);
        assert!((t[2] - e).norm() < 1e-15);
    }

    #[test]
    fn floquet_is_unitary_product() {
        let f = build_floquet(&params(15.0, 3.0)).unwrap();
        assert!(unitarity_residual(f.matrix()) < 1e-12);
        let tr = f.torsion() * f.rotation();
        assert!(max_abs_diff(&tr, f.matrix()) == 0.0);
    }

    #[test]
    fn power_matches_repeated_product() {
        let f = build_floquet(&params(4.0, 1.3)).unwrap();
        let mut direct = CMatrix::identity(9, 9);
        for _ in 0..7 {
            direct = f.matrix() * direct;
        }
        assert!(max_abs_diff(&direct, &f.power(7)) < 1e-12);
        assert_eq!(f.power(0), CMatrix::identity(9, 9));
    }

    #[test]
    fn zero_steps_is_identity() {
        let s = SpinSystem::new(2.0).unwrap();
        let rho = DensityState::pure(&s.coherent_state(Axis::X, Sign::Plus)).unwrap();
        let f = build_floquet(&params(2.0, 1.0)).unwrap();
        assert_eq!(evolve(&rho, &f, 0).matrix(), rho.matrix());
    }

    #[test]
    fn z_pole_has_period_four_without_kick() {
        for j in [1.0, 5.0, 15.0] {
            let s = SpinSystem::new(j).unwrap();
            let rho = DensityState::pure(&s.coherent_state(Axis::Z, Sign::Plus)).unwrap();
            let f = build_floquet(&params(j, 0.0)).unwrap();
            let back = evolve(&rho, &f, 4);
            assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn y_pole_is_stationary_without_kick() {
        let s = SpinSystem::new(15.0).unwrap();
        let rho = DensityState::pure(&s.coherent_state(Axis::Y, Sign::Plus)).unwrap();
        let f = build_floquet(&params(15.0, 0.0)).unwrap();
        let later = evolve(&rho, &f, 7);
        assert!(max_abs_diff(later.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn evolution_preserves_trace_and_hermiticity() {
        let s = SpinSystem::new(15.0).unwrap();
        let axis = Axis::from_direction(1.0, 2.0, -0.5).unwrap();
        let rho = DensityState::pure(&s.coherent_state(axis, Sign::Plus)).unwrap();
        let f = build_floquet(&params(15.0, 6.0)).unwrap();
        let later = evolve(&rho, &f, 60);
        assert!((later.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(crate::linalg::hermiticity_residual(later.matrix()) < 1e-12);
    }

    #[test]
    fn trajectory_agrees_with_evolve() {
        let s = SpinSystem::new(3.0).unwrap();
        let rho = DensityState::pure(&s.coherent_state(Axis::Z, Sign::Plus)).unwrap();
        let f = build_floquet(&params(3.0, 2.5)).unwrap();
        let traj = trajectory(&rho, &f, 9);
        assert_eq!(traj.len(), 10);
        assert!(max_abs_diff(traj[9].matrix(), evolve(&rho, &f, 9).matrix()) < 1e-14);
    }
}
