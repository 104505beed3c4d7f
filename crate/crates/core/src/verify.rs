//! Numerical checks of the operator identities behind the kicked top
//! dynamics, reported with their residuals.
//!
//! `Z_m`, `X_m`, `Y_m` are projectors onto `|ẑ,m⟩`, `|x̂,m⟩`, `|ŷ,m⟩`;
//! `R = exp(-i J_y π/2)`, `R̄ = exp(-i J_z π/2)`, and `T` the torsion.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::linalg::{
    c, commutator, conjugate, hermiticity_residual, max_abs_diff, outer, unitarity_residual,
    CMatrix, I,
};
use crate::measurement::{dephase, DensityState};
use crate::spin::{axis_spectrum, Axis, Sign, SpinSystem};
use crate::top::{build_floquet, torsion_diagonal, TopParams};

/// Tolerance for exact operator identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Allowed relative deviation of the second-order Baker-Hausdorff residual
/// ratio from 100 when `κ₀` drops tenfold.
pub const BAKER_HAUSDORFF_TOL: f64 = 0.05;
const BH_KAPPAS: (f64, f64) = (0.1, 0.01);
const TORSION_KAPPA: f64 = 2.5;

/// Phase of `|x̂,j−2⟩` in the ladder convention of the commutator identity,
/// relative to the geodesic basis convention.
const LADDER_KET_PHASE: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub j: f64,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] j={:<4} {:<44} residual {:.3e} (tol {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.j,
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Largest residual among the exact-identity checks.
    pub fn max_identity_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.tolerance == IDENTITY_TOL)
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn find(&self, name: &str, j: f64) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name && c.j == j)
    }
}

/// Which identities to run and on which spins.
#[derive(Debug, Clone)]
pub struct IdentitySuite {
    pub spins: Vec<f64>,
    /// `-1` for the physical torsion `exp(-iκ₀J_z²/2j)`; `+1` corrupts it.
    torsion_sign: f64,
}

impl Default for IdentitySuite {
    fn default() -> Self {
        Self {
            spins: vec![1.0, 5.0, 15.0],
            torsion_sign: -1.0,
        }
    }
}

impl IdentitySuite {
    pub fn new(spins: Vec<f64>) -> Self {
        Self {
            spins,
            ..Self::default()
        }
    }

    /// Flip the sign of the torsion phase, for fault-injection runs.
    pub fn with_corrupted_torsion(mut self) -> Self {
        self.torsion_sign = 1.0;
        self
    }

    fn torsion(&self, system: &SpinSystem, kappa0: f64) -> CMatrix {
        let t = torsion_diagonal(system, kappa0);
        let t = if self.torsion_sign > 0.0 {
            t.conjugate()
        } else {
            t
        };
        CMatrix::from_diagonal(&t)
    }

    pub fn run(&self) -> crate::Result<VerifyReport> {
        let mut report = VerifyReport::default();
        for &j in &self.spins {
            let system = SpinSystem::new(j)?;
            self.check_spin(&system, &mut report)?;
        }
        Ok(report)
    }

    fn check_spin(&self, s: &SpinSystem, report: &mut VerifyReport) -> crate::Result<()> {
        let j = s.j();
        let d = s.dim();
        let id = CMatrix::identity(d, d);
        let mut push = |name: &str, residual: f64, tolerance: f64| {
            report.checks.push(CheckResult {
                name: name.to_string(),
                j,
                residual,
                tolerance,
            })
        };

        let (jx, jy, jz) = (s.jx(), s.jy(), s.jz());
        push(
            "generators Hermitian",
            hermiticity_residual(jx)
                .max(hermiticity_residual(jy))
                .max(hermiticity_residual(jz)),
            IDENTITY_TOL,
        );
        push(
            "[Jx,Jy]=iJz and cyclic",
            max_abs_diff(&commutator(jx, jy), &(jz * I))
                .max(max_abs_diff(&commutator(jy, jz), &(jx * I)))
                .max(max_abs_diff(&commutator(jz, jx), &(jy * I))),
            IDENTITY_TOL,
        );
        push(
            "J^2 = j(j+1)",
            max_abs_diff(&(jx * jx + jy * jy + jz * jz), &(&id * c(j * (j + 1.0)))),
            IDENTITY_TOL,
        );

        let oblique = Axis::from_direction(0.3, -0.7, 0.2)?;
        let axes = [Axis::X, Axis::Y, Axis::Z, oblique];
        let mut spectrum = 0.0f64;
        let mut diag = 0.0f64;
        for axis in axes {
            for (k, lambda) in axis_spectrum(s, axis).into_iter().enumerate() {
                spectrum = spectrum.max((lambda - s.m(k)).abs());
            }
            let basis = s.axis_basis(axis);
            let expected =
                CMatrix::from_fn(d, d, |r, col| if r == col { c(s.m(r)) } else { c(0.0) });
            diag = diag.max(max_abs_diff(
                &basis.to_basis(&s.axis_operator(axis)),
                &expected,
            ));
        }
        push("spectrum of J.n is {j..-j}", spectrum, IDENTITY_TOL);
        push("axis basis diagonalizes J.n", diag, IDENTITY_TOL);
        push(
            "rotation composition",
            max_abs_diff(
                &(s.rotation_operator(oblique, 0.4) * s.rotation_operator(oblique, 1.1)),
                &s.rotation_operator(oblique, 1.5),
            ),
            IDENTITY_TOL,
        );

        let r = s.rotation_operator(Axis::Y, FRAC_PI_2);
        let r_bar = s.rotation_operator(Axis::Z, FRAC_PI_2);
        let r4_sign = if s.is_integer() { 1.0 } else { -1.0 };
        let r2 = &r * &r;
        push(
            "R^4 = +-1",
            max_abs_diff(&(&r2 * &r2), &(&id * c(r4_sign))),
            IDENTITY_TOL,
        );

        let zb = s.axis_basis(Axis::Z);
        let xb = s.axis_basis(Axis::X);
        let yb = s.axis_basis(Axis::Y);
        let t = self.torsion(s, TORSION_KAPPA);
        let flip = |k: usize| d - 1 - k;
        let mut res = [0.0f64; 7];
        for k in 0..d {
            let (zm, xm, ym) = (zb.projector(k), xb.projector(k), yb.projector(k));
            res[0] = res[0].max(max_abs_diff(&conjugate(&t, &zm), &zm));
            res[1] = res[1].max(max_abs_diff(&conjugate(&r2, &zm), &zb.projector(flip(k))));
            res[2] = res[2].max(max_abs_diff(&conjugate(&r, &zm), &xm));
            res[3] = res[3].max(max_abs_diff(&conjugate(&r, &xm), &zb.projector(flip(k))));
            res[4] = res[4].max(max_abs_diff(&conjugate(&r, &ym), &ym));
            res[5] = res[5].max(max_abs_diff(&conjugate(&r_bar, &xm), &ym));
            res[6] = res[6].max(max_abs_diff(
                &conjugate(&t, &ym),
                &conjugate(&r_bar, &conjugate(&t, &xm)),
            ));
        }
        let names = [
            "T Z_m T^-1 = Z_m",
            "R^2 Z_m R^-2 = Z_-m",
            "R Z_m R^-1 = X_m",
            "R X_m R^-1 = Z_-m",
            "R Y_m R^-1 = Y_m",
            "Rbar X_m Rbar^-1 = Y_m",
            "T Y_m T^-1 = Rbar (T X_m T^-1) Rbar^-1",
        ];
        for (name, value) in names.iter().zip(res) {
            push(name, value, IDENTITY_TOL);
        }

        if s.twice_j() > 0 {
            let params = TopParams::new(s.clone(), 0.0)?;
            let u = build_floquet(&params)?;
            let mut cycle = 0.0f64;
            for k in 0..d {
                let mut p = zb.projector(k);
                let targets = [
                    xb.projector(k),
                    zb.projector(flip(k)),
                    xb.projector(flip(k)),
                    zb.projector(k),
                ];
                for target in targets {
                    p = conjugate(u.matrix(), &p);
                    cycle = cycle.max(max_abs_diff(&p, &target));
                }
            }
            push(
                "kappa=0 cycle Z_m->X_m->Z_-m->X_-m->Z_m",
                cycle,
                IDENTITY_TOL,
            );

            let kicked = build_floquet(&TopParams::new(s.clone(), 3.0)?)?;
            push(
                "Floquet unitarity",
                unitarity_residual(kicked.matrix()),
                IDENTITY_TOL,
            );
        }

        // Dephasing keeps Alice-basis populations and is idempotent.
        let rho = DensityState::pure(&s.coherent_state(oblique, Sign::Plus))?;
        let once = dephase(&rho, &xb)?;
        let twice = dephase(&once, &xb)?;
        let pops: f64 = xb
            .diagonal_of(rho.matrix())
            .iter()
            .zip(xb.diagonal_of(once.matrix()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        push("dephasing keeps populations", pops, IDENTITY_TOL);
        push(
            "dephasing idempotent",
            max_abs_diff(twice.matrix(), once.matrix()),
            IDENTITY_TOL,
        );

        if s.twice_j() >= 2 {
            let jz2 = jz * jz;
            let xj = xb.projector(0);
            let top = xb.vector(0);
            let lower = xb.vector(2) * c(LADDER_KET_PHASE);
            let expected =
                (outer(&top, &lower) - outer(&lower, &top)) * c(0.5 * (j * (2.0 * j - 1.0)).sqrt());
            push(
                "[Jz^2, X_j] ladder identity",
                max_abs_diff(&commutator(&jz2, &xj), &expected),
                IDENTITY_TOL,
            );

            let bh = |kappa0: f64| {
                let t = self.torsion(s, kappa0);
                let first_order = &xj - commutator(&jz2, &xj) * (I * c(kappa0 / (2.0 * j)));
                max_abs_diff(&conjugate(&t, &xj), &first_order)
            };
            let (coarse, fine) = (bh(BH_KAPPAS.0), bh(BH_KAPPAS.1));
            let expected_ratio = (BH_KAPPAS.0 / BH_KAPPAS.1).powi(2);
            let ratio = coarse / fine;
            push(
                "Baker-Hausdorff O(kappa^2) residual",
                (ratio / expected_ratio - 1.0).abs(),
                BAKER_HAUSDORFF_TOL,
            );
        }
        Ok(())
    }
}
