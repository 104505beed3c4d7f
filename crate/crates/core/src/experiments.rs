//! Batch experiments: κ₀ sweeps of schedule-averaged disturbance, `(t_α, κ₀)`
//! contour grids, the κ₀ = 0 scan, and the classical stability report.
//!
//! Grid points are independent; they are evaluated on a rayon pool and
//! collected in grid order, so output does not depend on the thread count.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{
    classical_orbit, cycle_is_stable, cycle_stability_indicator, divergence_onset,
    four_cycle_return, perturbed_pole, pole_excursion, stability_boundaries, ClassicalPoint,
    DIVERGENCE_RADIUS, DIVERGENCE_STEPS, POLE_PERTURBATION,
};
use crate::error::{Error, Result};
use crate::measurement::DensityState;
use crate::metrics::{Metric, Scenario, ScenarioRun};
use crate::spin::{Axis, Sign, SpinSystem};
use crate::top::TopParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SweepKappa,
    Contour,
    KappaZero,
    OddN,
    Classical,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::SweepKappa,
        ExperimentKind::Contour,
        ExperimentKind::KappaZero,
        ExperimentKind::OddN,
        ExperimentKind::Classical,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SweepKappa => "sweep-kappa",
            ExperimentKind::Contour => "contour",
            ExperimentKind::KappaZero => "kappa-zero",
            ExperimentKind::OddN => "odd-n",
            ExperimentKind::Classical => "classical",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coherent initial state `|n̂, ±j⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub axis: Axis,
    pub sign: Sign,
}

impl InitialState {
    pub const Z: InitialState = InitialState {
        axis: Axis::Z,
        sign: Sign::Plus,
    };
    pub const Y: InitialState = InitialState {
        axis: Axis::Y,
        sign: Sign::Plus,
    };

    pub fn parse(s: &str) -> Result<Self> {
        let (sign, rest) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest),
            None => (Sign::Plus, s.strip_prefix('+').unwrap_or(s)),
        };
        let axis = match rest {
            "x" => Axis::X,
            "y" => Axis::Y,
            "z" => Axis::Z,
            other => {
                return Err(Error::Config(format!(
                    "unknown initial state {other:?}; expected x, y or z with optional sign"
                )))
            }
        };
        Ok(Self { axis, sign })
    }

    pub fn density(&self, system: &SpinSystem) -> Result<DensityState> {
        DensityState::pure(&system.coherent_state(self.axis, self.sign))
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        write!(f, "{}", self.axis)
    }
}

/// Inclusive `min, min+step, …, max` grid of kick strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl KappaGrid {
    pub fn single(kappa0: f64) -> Self {
        Self {
            min: kappa0,
            max: kappa0,
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.min.is_finite() && self.max.is_finite() && self.step.is_finite();
        if !finite || self.min < 0.0 || self.max < self.min || self.step <= 0.0 {
            return Err(Error::Config(format!(
                "invalid kappa grid min={} max={} step={}",
                self.min, self.max, self.step
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                // Round to the grid's decimal resolution so 0.1-steps print cleanly.
                let v = self.min + i as f64 * self.step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub j: f64,
    pub state: InitialState,
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub kappa: KappaGrid,
    pub n_values: Vec<usize>,
    /// Averaging window `T`; Bob's times run over `{n, …, n+T}`.
    pub window: usize,
    /// Alice's times for contour grids: `{0, …, t_alpha_max}`.
    pub t_alpha_max: usize,
    /// Kick strengths at which sample classical orbits are recorded.
    pub orbit_kappas: Vec<f64>,
    pub orbit_steps: usize,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            kind,
            j: 15.0,
            state: InitialState::Z,
            axis_a: Axis::Z,
            axis_b: Axis::Z,
            kappa: KappaGrid {
                min: 0.0,
                max: 7.0,
                step: 0.1,
            },
            n_values: vec![2, 4, 6, 8],
            window: 50,
            t_alpha_max: 50,
            orbit_kappas: vec![1.5, 2.5, 3.5, 6.0],
            orbit_steps: 200,
            threads: None,
        };
        match kind {
            ExperimentKind::SweepKappa | ExperimentKind::Classical => base,
            ExperimentKind::Contour => Self {
                n_values: vec![2],
                ..base
            },
            ExperimentKind::KappaZero => Self {
                n_values: vec![1],
                kappa: KappaGrid::single(0.0),
                ..base
            },
            ExperimentKind::OddN => Self {
                n_values: vec![1, 3, 5, 7],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        SpinSystem::new(self.j).map_err(|e| Error::Config(e.to_string()))?;
        if self.j < 0.5 {
            return Err(Error::Config("j must be at least 1/2".into()));
        }
        self.kappa.validate()?;
        if self.n_values.is_empty() {
            return Err(Error::Config("n list is empty".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::Config("n must be at least 1".into()));
        }
        match self.kind {
            ExperimentKind::Contour if self.n_values.len() != 1 => {
                return Err(Error::Config("contour takes exactly one n".into()));
            }
            ExperimentKind::KappaZero if self.kappa != KappaGrid::single(0.0) => {
                return Err(Error::Config("kappa-zero runs only at kappa0 = 0".into()));
            }
            ExperimentKind::OddN if self.n_values.iter().any(|n| n % 2 == 0) => {
                return Err(Error::Config("odd-n requires odd n values".into()));
            }
            ExperimentKind::Classical => {
                if self.orbit_kappas.iter().any(|k| !k.is_finite()) {
                    return Err(Error::Config("orbit kappas must be finite".into()));
                }
            }
            _ => {}
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    fn scenario(&self, kappa0: f64) -> Result<Scenario> {
        let system = SpinSystem::new(self.j)?;
        let initial = self.state.density(&system)?;
        Ok(Scenario {
            params: TopParams::new(system, kappa0)?,
            initial,
            axis_a: self.axis_a,
            axis_b: self.axis_b,
        })
    }
}

/// One line of the long-format sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: String,
    pub state: String,
    pub axis: String,
    pub j: f64,
    pub kappa0: f64,
    pub n: usize,
    #[serde(rename = "T")]
    pub window: usize,
    pub metric: String,
    pub mean: f64,
    pub second_moment: f64,
}

/// One cell of a `(t_α, κ₀)` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourRow {
    pub scenario: String,
    pub t_alpha: usize,
    pub kappa0: f64,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepResult {
    Sweep(Vec<SweepRow>),
    Contour(Vec<ContourRow>),
}

impl SweepResult {
    pub fn len(&self) -> usize {
        match self {
            SweepResult::Sweep(rows) => rows.len(),
            SweepResult::Contour(rows) => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericalIntegrity(format!("{what} is not finite")))
    }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Averaged `Δ`, `H` and `C` for every `(κ₀, n)`.
pub fn run_kappa_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let horizon = config.n_values.iter().max().copied().unwrap_or(0) + config.window;
    let kappas = config.kappa.values();
    let per_kappa = with_pool(config.threads, || {
        kappas
            .par_iter()
            .map(|&kappa0| -> Result<Vec<SweepRow>> {
                let run = ScenarioRun::new(&config.scenario(kappa0)?, horizon)?;
                let mut rows = Vec::with_capacity(config.n_values.len() * Metric::ALL.len());
                for &n in &config.n_values {
                    for metric in Metric::ALL {
                        let avg = run.averaged(metric, n, config.window)?;
                        rows.push(SweepRow {
                            scenario: config.kind.name().to_string(),
                            state: config.state.to_string(),
                            axis: config.axis_a.to_string(),
                            j: config.j,
                            kappa0,
                            n,
                            window: config.window,
                            metric: metric.name().to_string(),
                            mean: check_finite(avg.mean, "mean")?,
                            second_moment: check_finite(avg.second_moment, "second moment")?,
                        });
                    }
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(per_kappa.into_iter().flatten().collect())
}

/// Same as [`run_kappa_sweep`], for odd separations.
pub fn run_odd_n(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    if config.n_values.iter().any(|n| n % 2 == 0) {
        return Err(Error::Config("odd-n requires odd n values".into()));
    }
    run_kappa_sweep(config)
}

/// Unaveraged `Δ(t_α+n, t_α)` and `C_A(t_α⁻)` over the `(t_α, κ₀)` grid.
pub fn run_contour(config: &ExperimentConfig) -> Result<Vec<ContourRow>> {
    config.validate()?;
    let n = config.n_values[0];
    let horizon = config.t_alpha_max + n;
    let kappas = config.kappa.values();
    let scenario = config.kind.name().to_string();
    let per_kappa = with_pool(config.threads, || {
        kappas
            .par_iter()
            .map(|&kappa0| -> Result<Vec<ContourRow>> {
                let run = ScenarioRun::new(&config.scenario(kappa0)?, horizon)?;
                let mut rows = Vec::with_capacity(2 * (config.t_alpha_max + 1));
                for t_alpha in 0..=config.t_alpha_max {
                    let sample = run.sample(t_alpha, t_alpha + n)?;
                    let coherence = run.coherence_before(t_alpha)?;
                    for (metric, value) in [
                        (Metric::Delta, sample.value_delta),
                        (Metric::Coherence, coherence),
                    ] {
                        rows.push(ContourRow {
                            scenario: scenario.clone(),
                            t_alpha,
                            kappa0,
                            metric: metric.name().to_string(),
                            value: check_finite(value, "contour value")?,
                        });
                    }
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(per_kappa.into_iter().flatten().collect())
}

/// `Δ_n(t_α)` and `H_n(t_α)` at κ₀ = 0 for `t_α ∈ {0, …, T}`.
pub fn run_kappa_zero_scan(config: &ExperimentConfig) -> Result<Vec<ContourRow>> {
    config.validate()?;
    let n = config.n_values[0];
    let run = ScenarioRun::new(&config.scenario(0.0)?, config.window + n)?;
    let mut rows = Vec::with_capacity(2 * (config.window + 1));
    for t_alpha in 0..=config.window {
        let sample = run.sample(t_alpha, t_alpha + n)?;
        for (metric, value) in [
            (Metric::Delta, sample.value_delta),
            (Metric::Hellinger, sample.value_h),
        ] {
            rows.push(ContourRow {
                scenario: config.kind.name().to_string(),
                t_alpha,
                kappa0: 0.0,
                metric: metric.name().to_string(),
                value: check_finite(value, "scan value")?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub kappa0: f64,
    pub indicator: f64,
    pub cycle_stable: bool,
    pub cycle_return: f64,
    pub pole_excursion: f64,
    pub pole_diverged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRow {
    pub orbit: String,
    pub kappa0: f64,
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalReport {
    pub indicator: Vec<IndicatorRow>,
    pub boundaries: Vec<f64>,
    /// First κ₀ (on a 0.01 grid over the configured range) at which the
    /// perturbed pole orbit leaves the divergence radius.
    pub divergence_onset: Option<f64>,
    pub orbits: Vec<OrbitRow>,
}

pub const ONSET_SCAN_STEP: f64 = 0.01;

pub fn run_classical(config: &ExperimentConfig) -> Result<ClassicalReport> {
    config.validate()?;
    let kappas = config.kappa.values();
    let indicator = with_pool(config.threads, || {
        kappas
            .par_iter()
            .map(|&kappa0| {
                let excursion = pole_excursion(kappa0, DIVERGENCE_STEPS);
                IndicatorRow {
                    kappa0,
                    indicator: cycle_stability_indicator(kappa0),
                    cycle_stable: cycle_is_stable(kappa0),
                    cycle_return: four_cycle_return(kappa0),
                    pole_excursion: excursion,
                    pole_diverged: excursion > DIVERGENCE_RADIUS,
                }
            })
            .collect::<Vec<_>>()
    })?;
    let lo = config.kappa.min.max(0.1);
    let boundaries = if config.kappa.max > lo {
        stability_boundaries(lo, config.kappa.max)?
    } else {
        Vec::new()
    };
    let fine = KappaGrid {
        min: config.kappa.min,
        max: config.kappa.max,
        step: ONSET_SCAN_STEP,
    }
    .values();
    let divergence_onset = divergence_onset(&fine);

    let e = POLE_PERTURBATION;
    let starts = [
        ("pole+y", perturbed_pole()),
        (
            "pole-y",
            ClassicalPoint::normalized(e, -(1.0 - e * e).sqrt(), 0.0)?,
        ),
        (
            "cycle",
            ClassicalPoint::normalized(e, 0.0, (1.0 - e * e).sqrt())?,
        ),
    ];
    let mut orbits = Vec::new();
    for &kappa0 in &config.orbit_kappas {
        for (name, start) in starts {
            for (step, p) in classical_orbit(start, kappa0, config.orbit_steps)
                .into_iter()
                .enumerate()
            {
                orbits.push(OrbitRow {
                    orbit: name.to_string(),
                    kappa0,
                    step,
                    x: p.x,
                    y: p.y,
                    z: p.z,
                });
            }
        }
    }
    Ok(ClassicalReport {
        indicator,
        boundaries,
        divergence_onset,
        orbits,
    })
}

/// Means of `metric` per `κ₀`, keyed by `n`, in grid order.
pub fn curves(rows: &[SweepRow], metric: Metric) -> Vec<(usize, Vec<(f64, f64)>)> {
    let mut out: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for row in rows.iter().filter(|r| r.metric == metric.name()) {
        match out.iter_mut().find(|(n, _)| *n == row.n) {
            Some((_, curve)) => curve.push((row.kappa0, row.mean)),
            None => out.push((row.n, vec![(row.kappa0, row.mean)])),
        }
    }
    out
}

/// `(max_n − min_n) / mean_n` of the averaged metric at each κ₀.
pub fn relative_spread_by_kappa(rows: &[SweepRow], metric: Metric) -> Vec<(f64, f64)> {
    let curves = curves(rows, metric);
    let Some((_, first)) = curves.first() else {
        return Vec::new();
    };
    first
        .iter()
        .enumerate()
        .map(|(i, &(kappa0, _))| {
            let values: Vec<f64> = curves.iter().map(|(_, c)| c[i].1).collect();
            let max = values.iter().copied().fold(f64::MIN, f64::max);
            let min = values.iter().copied().fold(f64::MAX, f64::min);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let spread = if mean.abs() > 0.0 {
                (max - min) / mean.abs()
            } else {
                0.0
            };
            (kappa0, spread)
        })
        .collect()
}

/// Mean over odd `t_α` minus mean over even `t_α` of the metric at each κ₀.
pub fn parity_contrast_by_kappa(rows: &[ContourRow], metric: Metric) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, [f64; 2], [usize; 2])> = Vec::new();
    for row in rows.iter().filter(|r| r.metric == metric.name()) {
        let idx = match out.iter().position(|(k, _, _)| *k == row.kappa0) {
            Some(i) => i,
            None => {
                out.push((row.kappa0, [0.0; 2], [0; 2]));
                out.len() - 1
            }
        };
        let parity = row.t_alpha % 2;
        out[idx].1[parity] += row.value;
        out[idx].2[parity] += 1;
    }
    out.into_iter()
        .map(|(k, sums, counts)| {
            let even = sums[0] / counts[0].max(1) as f64;
            let odd = sums[1] / counts[1].max(1) as f64;
            (k, odd - even)
        })
        .collect()
}

/// Average of the `(κ₀, value)` pairs with κ₀ in `[lo, hi]`.
pub fn mean_over(values: &[(f64, f64)], lo: f64, hi: f64) -> Option<f64> {
    let selected: Vec<f64> = values
        .iter()
        .filter(|(k, _)| *k >= lo - 1e-12 && *k <= hi + 1e-12)
        .map(|&(_, v)| v)
        .collect();
    (!selected.is_empty()).then(|| selected.iter().sum::<f64>() / selected.len() as f64)
}
