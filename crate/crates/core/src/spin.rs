//! Angular momentum operators for a single spin `j`, axis eigenbases and
//! spin coherent states.
//!
//! All matrices are expressed in the `J_z` eigenbasis ordered by descending
//! magnetic number: index `k` carries `m = j - k`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, expm_hermitian, hermitian_eigh, CMatrix, CVector, I};

const AXIS_NORM_TOL: f64 = 1e-12;

/// The `J_x`, `J_y`, `J_z` triple for one spin.
#[derive(Debug, Clone)]
pub struct Generators {
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

/// A spin of total angular momentum `j`, stored as `2j` so half-integers are
/// exact.
#[derive(Clone)]
pub struct SpinSystem {
    twice_j: u32,
    generators: Arc<Generators>,
}

impl SpinSystem {
    pub fn new(j: f64) -> Result<Self> {
        if !j.is_finite() || j < 0.0 {
            return Err(Error::InvalidSpin(j));
        }
        let twice = 2.0 * j;
        if (twice - twice.round()).abs() > 1e-12 || twice > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Self::from_twice_j(twice.round() as u32))
    }

    pub fn from_twice_j(twice_j: u32) -> Self {
        let generators = Arc::new(build_generators(twice_j));
        Self {
            twice_j,
            generators,
        }
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn is_integer(&self) -> bool {
        self.twice_j % 2 == 0
    }

    /// Magnetic number carried by basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        self.j() - k as f64
    }

    /// Basis index of magnetic number `m`, if it belongs to this spin.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let k = self.j() - m;
        if k < -1e-9 || (k - k.round()).abs() > 1e-9 {
            return None;
        }
        let k = k.round() as usize;
        (k < self.dim()).then_some(k)
    }

    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(|k| self.m(k))
    }

    pub fn generators(&self) -> &Generators {
        &self.generators
    }

    pub fn jx(&self) -> &CMatrix {
        &self.generators.jx
    }

    pub fn jy(&self) -> &CMatrix {
        &self.generators.jy
    }

    pub fn jz(&self) -> &CMatrix {
        &self.generators.jz
    }

    /// `J · n̂`
    pub fn axis_operator(&self, axis: Axis) -> CMatrix {
        let [x, y, z] = axis.components();
        self.jx() * c(x) + self.jy() * c(y) + self.jz() * c(z)
    }

    /// `exp(-i angle J·n̂)`.
    pub fn rotation_operator(&self, axis: Axis, angle: f64) -> CMatrix {
        if angle == 0.0 {
            return CMatrix::identity(self.dim(), self.dim());
        }
        expm_hermitian(&self.axis_operator(axis), angle)
    }

    /// Eigenbasis of `J·n̂` with phases fixed by rotating the `J_z` basis
    /// along the geodesic from `ẑ` to `n̂`.
    pub fn axis_basis(&self, axis: Axis) -> AxisBasis {
        let vectors = match geodesic_from_z(axis) {
            None => CMatrix::identity(self.dim(), self.dim()),
            Some((rot_axis, angle)) => self.rotation_operator(rot_axis, angle),
        };
        AxisBasis {
            axis,
            vectors,
            convention: PhaseConvention::GeodesicFromZ,
        }
    }

    /// The extremal eigenvector `|n̂, ±j⟩`.
    pub fn coherent_state(&self, axis: Axis, sign: Sign) -> CVector {
        let basis = self.axis_basis(axis);
        let k = match sign {
            Sign::Plus => 0,
            Sign::Minus => self.dim() - 1,
        };
        basis.vector(k)
    }
}

impl fmt::Debug for SpinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinSystem")
            .field("j", &self.j())
            .field("dim", &self.dim())
            .finish()
    }
}

impl PartialEq for SpinSystem {
    fn eq(&self, other: &Self) -> bool {
        self.twice_j == other.twice_j
    }
}

impl Eq for SpinSystem {}

/// Ladder construction in the descending-`m` `J_z` basis.
pub fn build_generators(twice_j: u32) -> Generators {
    let dim = twice_j as usize + 1;
    let j = twice_j as f64 / 2.0;
    let mut jplus = CMatrix::zeros(dim, dim);
    // J_+ |m⟩ = sqrt(j(j+1) - m(m+1)) |m+1⟩, and m+1 sits at index k-1.
    for k in 1..dim {
        let m = j - k as f64;
        jplus[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus) * c(0.5);
    let jy = (&jplus - &jminus) * (-0.5 * I);
    let jz = CMatrix::from_fn(dim, dim, |r, col| {
        if r == col {
            c(j - r as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Generators { jx, jy, jz }
}

fn geodesic_from_z(axis: Axis) -> Option<(Axis, f64)> {
    let [x, y, z] = axis.components();
    // ẑ × n̂ = (-y, x, 0)
    let cross = (x * x + y * y).sqrt();
    if cross < 1e-15 {
        return if z > 0.0 {
            None
        } else {
            Some((Axis::Y, std::f64::consts::PI))
        };
    }
    let rot_axis = Axis {
        v: [-y / cross, x / cross, 0.0],
    };
    Some((rot_axis, z.clamp(-1.0, 1.0).acos()))
}

/// A unit direction in real space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Axis {
    v: [f64; 3],
}

impl Axis {
    pub const X: Axis = Axis { v: [1.0, 0.0, 0.0] };
    pub const Y: Axis = Axis { v: [0.0, 1.0, 0.0] };
    pub const Z: Axis = Axis { v: [0.0, 0.0, 1.0] };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_NORM_TOL {
            return Err(Error::NonUnitAxis(x, y, z));
        }
        Ok(Self { v: [x, y, z] })
    }

    /// Normalizes an arbitrary non-zero direction.
    pub fn from_direction(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NonUnitAxis(x, y, z));
        }
        Ok(Self {
            v: [x / norm, y / norm, z / norm],
        })
    }

    pub fn components(&self) -> [f64; 3] {
        self.v
    }

    pub fn negated(&self) -> Axis {
        Axis {
            v: [-self.v[0], -self.v[1], -self.v[2]],
        }
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Axis::new(v[0], v[1], v[2])
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.v
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
            Axis { v: [x, y, z] } => write!(f, "({x};{y};{z})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// `|n̂,m⟩ = D(R_{ẑ→n̂}) |ẑ,m⟩` along the shortest rotation; `-ẑ` is
    /// reached by a rotation of π about `ŷ`.
    GeodesicFromZ,
}

/// Ordered eigenvectors `|n̂,m⟩`, `m = j … -j`, stored as matrix columns.
#[derive(Debug, Clone)]
pub struct AxisBasis {
    pub axis: Axis,
    pub vectors: CMatrix,
    pub convention: PhaseConvention,
}

impl AxisBasis {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// Rank-one projector `|n̂,m_k⟩⟨n̂,m_k|`.
    pub fn projector(&self, k: usize) -> CMatrix {
        let v = self.vectors.column(k);
        &v * v.adjoint()
    }

    /// Matrix elements of `op` in this basis: `V† op V`.
    pub fn to_basis(&self, op: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * op * &self.vectors
    }

    /// Inverse of [`AxisBasis::to_basis`].
    pub fn from_basis(&self, op: &CMatrix) -> CMatrix {
        &self.vectors * op * self.vectors.adjoint()
    }

    /// `⟨n̂,m_k| op |n̂,m_k⟩` for every `k`.
    pub fn diagonal_of(&self, op: &CMatrix) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let v = self.vectors.column(k);
                (v.adjoint() * op * v)[(0, 0)].re
            })
            .collect()
    }
}

/// Real eigenvalues of `J·n̂` in descending order.
pub fn axis_spectrum(system: &SpinSystem, axis: Axis) -> Vec<f64> {
    hermitian_eigh(&system.axis_operator(axis)).0
}
