//! Classical limit of the kicked top: a rotation by π/2 about `y` followed by
//! a twist about `z` proportional to the `z` component, acting on the unit
//! sphere `X² + Y² + Z² = 1`.

use serde::Serialize;

use crate::error::{Error, Result};

const SPHERE_TOL: f64 = 1e-9;
const RENORMALIZE_ABOVE: f64 = 1e-12;

/// Bisection scan resolution and refinement target for stability boundaries.
pub const BOUNDARY_SCAN_STEP: f64 = 1e-3;
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Displacement applied to a pole before testing for divergence.
pub const POLE_PERTURBATION: f64 = 0.01;
pub const DIVERGENCE_STEPS: usize = 1000;
/// An orbit that strays this far from the pole counts as diverged.
pub const DIVERGENCE_RADIUS: f64 = 0.1;

/// Rescaled classical spin `J/j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClassicalPoint {
    pub const NORTH_Y: ClassicalPoint = ClassicalPoint {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const SOUTH_Y: ClassicalPoint = ClassicalPoint {
        x: 0.0,
        y: -1.0,
        z: 0.0,
    };
    pub const NORTH_Z: ClassicalPoint = ClassicalPoint {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = Self { x, y, z };
        if !(p.norm() - 1.0).abs().le(&SPHERE_TOL) {
            return Err(Error::InvalidParams(format!(
                "classical point ({x}, {y}, {z}) is off the unit sphere"
            )));
        }
        Ok(p)
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidParams(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &ClassicalPoint) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2))
            .sqrt()
    }
}

/// One period of the classical map.
pub fn classical_step(p: ClassicalPoint, kappa0: f64) -> ClassicalPoint {
    let (s, c) = (kappa0 * p.x).sin_cos();
    let mut next = ClassicalPoint {
        x: p.z * c + p.y * s,
        y: -p.z * s + p.y * c,
        z: -p.x,
    };
    let drift = (next.norm() - 1.0).abs();
    if drift > RENORMALIZE_ABOVE {
        log::debug!("classical map drift {drift:e}; renormalizing");
        let n = next.norm();
        next = ClassicalPoint {
            x: next.x / n,
            y: next.y / n,
            z: next.z / n,
        };
    }
    next
}

/// `p0` followed by `steps` iterates.
pub fn classical_orbit(p0: ClassicalPoint, kappa0: f64, steps: usize) -> Vec<ClassicalPoint> {
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(p0);
    let mut p = p0;
    for _ in 0..steps {
        p = classical_step(p, kappa0);
        orbit.push(p);
    }
    orbit
}

/// `(2 cos κ₀ + κ₀ sin κ₀)²`; the equatorial 4-cycle is stable below 4.
pub fn cycle_stability_indicator(kappa0: f64) -> f64 {
    (2.0 * kappa0.cos() + kappa0 * kappa0.sin()).powi(2)
}

pub fn cycle_is_stable(kappa0: f64) -> bool {
    cycle_stability_indicator(kappa0) < 4.0
}

/// Kick strengths in `[lo, hi]` where the 4-cycle changes stability, found
/// by a sign-change scan followed by bisection.
pub fn stability_boundaries(lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams(format!(
            "stability scan range [{lo}, {hi}] is empty"
        )));
    }
    let f = |k: f64| cycle_stability_indicator(k) - 4.0;
    let cells = ((hi - lo) / BOUNDARY_SCAN_STEP).ceil() as usize;
    let step = (hi - lo) / cells as f64;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=cells {
        let b = if i == cells { hi } else { lo + i as f64 * step };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(bisect(f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(hi);
    }
    Ok(roots)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > BOUNDARY_TOL {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Distance from `(0,0,1)` after four iterates.
pub fn four_cycle_return(kappa0: f64) -> f64 {
    let orbit = classical_orbit(ClassicalPoint::NORTH_Z, kappa0, 4);
    orbit[4].distance(&ClassicalPoint::NORTH_Z)
}

/// The pole `(0, 1, 0)` nudged by [`POLE_PERTURBATION`] along `x`.
pub fn perturbed_pole() -> ClassicalPoint {
    let e = POLE_PERTURBATION;
    ClassicalPoint::normalized(e, (1.0 - e * e).sqrt(), 0.0).expect("non-zero")
}

/// Largest excursion from `(0,1,0)` of the perturbed pole orbit.
pub fn pole_excursion(kappa0: f64, steps: usize) -> f64 {
    classical_orbit(perturbed_pole(), kappa0, steps)
        .iter()
        .map(|p| p.distance(&ClassicalPoint::NORTH_Y))
        .fold(0.0, f64::max)
}

pub fn pole_diverges(kappa0: f64) -> bool {
    pole_excursion(kappa0, DIVERGENCE_STEPS) > DIVERGENCE_RADIUS
}

/// First kick strength on the grid at which the perturbed pole orbit
/// diverges.
pub fn divergence_onset(grid: &[f64]) -> Option<f64> {
    grid.iter().copied().find(|&k| pole_diverges(k))
}
