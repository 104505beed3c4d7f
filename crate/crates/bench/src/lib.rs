//! Fixtures shared by the benchmarks.

use kicktop::experiments::InitialState;
use kicktop::metrics::Scenario;
use kicktop::{Axis, SpinSystem, TopParams};

/// The default sweep scenario at one kick strength.
pub fn scenario(j: f64, kappa0: f64, state: InitialState) -> Scenario {
    let system = SpinSystem::new(j).expect("valid spin");
    let initial = state.density(&system).expect("coherent state");
    Scenario {
        params: TopParams::new(system, kappa0).expect("valid kick"),
        initial,
        axis_a: Axis::Z,
        axis_b: Axis::Z,
    }
}
