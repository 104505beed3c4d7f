//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kicktop::classical::{classical_orbit, classical_step, stability_boundaries, ClassicalPoint};
use kicktop::experiments::{
    mean_over, parity_contrast_by_kappa, relative_spread_by_kappa, run_classical, run_contour,
    run_kappa_sweep, run_kappa_zero_scan, ContourRow, ExperimentConfig, ExperimentKind,
    InitialState, SweepRow,
};
use kicktop::measurement::{conditional, joint_marginal, outcome_distribution, unconditional};
use kicktop::metrics::{coherence_l1, delta, hellinger, participation, Scenario, ScenarioRun};
use kicktop::spin::Sign;
use kicktop::top::build_floquet;
use kicktop::verify::IdentitySuite;
use kicktop::{Axis, CVector, DensityState, Metric, SpinSystem, TopParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

// --- Wigner small-d oracle at β = π/2, exact integer sum -------------------

fn factorial(n: i64) -> u128 {
    (1..=n as u128).product()
}

fn binomial(n: i64, k: i64) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    (factorial(n) / (factorial(k) * factorial(n - k))) as i128
}

/// `|d^j_{m'm}(π/2)|²` for integer `j`.
fn wigner_d_sq_half_pi(j: i64, mp: i64, m: i64) -> f64 {
    let mut sum: i128 = 0;
    for s in 0..=(j + m) {
        let sign = if (mp - m + s).rem_euclid(2) == 0 {
            1
        } else {
            -1
        };
        sum += sign * binomial(j + m, s) * binomial(j - m, j - mp - s);
    }
    let ratio = (factorial(j + mp) * factorial(j - mp)) as f64
        / (factorial(j + m) * factorial(j - m)) as f64;
    ratio * (sum as f64).powi(2) / 4f64.powi(j as i32)
}

/// `P_C` after dephasing `|x̂,±j⟩` in the `J_z` basis and one quarter turn,
/// indexed by descending `m`.
fn binomial_convolution(j: i64) -> Vec<f64> {
    let pops: Vec<f64> = (-j..=j)
        .rev()
        .map(|m| wigner_d_sq_half_pi(j, m, j))
        .collect();
    (-j..=j)
        .rev()
        .map(|b| {
            (-j..=j)
                .rev()
                .zip(&pops)
                .map(|(m, p)| p * wigner_d_sq_half_pi(j, b, m))
                .sum()
        })
        .collect()
}

fn oracle_delta_h(j: i64) -> (f64, f64) {
    let pc = binomial_convolution(j);
    let participation = 1.0 / pc.iter().map(|p| p * p).sum::<f64>();
    (participation - 1.0, (1.0 - pc[0].sqrt()).sqrt())
}

// --- Criteria ---------------------------------------------------------------

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let report = match IdentitySuite::default().run() {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("suite error: {e}")),
    };
    let elapsed = start.elapsed();
    let failures: Vec<String> = report.failures().map(|c| c.to_string()).collect();
    let worst = report.max_identity_residual();
    let passed = failures.is_empty() && worst < 1e-9 && elapsed < Duration::from_secs(30);
    outcome(
        passed,
        format!(
            "{} checks on j in {{1,5,15}}, max identity residual {worst:.2e}, {} failures, {:.2?}",
            report.checks.len(),
            failures.len(),
            elapsed
        ),
    )
}

fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> DensityState {
    let v = CVector::from_fn(dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let v = &v / Complex64::new(v.norm(), 0.0);
    DensityState::pure(&v).expect("normalized")
}

fn random_axis(rng: &mut ChaCha8Rng) -> Axis {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return Axis::from_direction(v[0], v[1], v[2]).expect("non-zero");
        }
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let j = [1.0, 2.0, 5.0][rng.random_range(0..3)];
        let kappa0 = rng.random::<f64>() * 7.0;
        let system = SpinSystem::new(j).unwrap();
        let floquet = build_floquet(&TopParams::new(system.clone(), kappa0).unwrap()).unwrap();
        let rho0 = random_pure(&mut rng, system.dim());
        let t_alpha = rng.random_range(0..10);
        let t_beta = t_alpha + rng.random_range(1..10);
        let axis_a = random_axis(&mut rng);
        let axis_b = if case % 2 == 0 {
            axis_a
        } else {
            random_axis(&mut rng)
        };
        let (a, b) = (system.axis_basis(axis_a), system.axis_basis(axis_b));
        let pc = conditional(&rho0, &floquet, t_alpha, t_beta, &a, &b).unwrap();
        let pj = joint_marginal(&rho0, &floquet, t_alpha, t_beta, &a, &b).unwrap();
        for (x, y) in pc.probs().iter().zip(pj.probs()) {
            worst = worst.max((x - y).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-12 && elapsed < Duration::from_secs(60),
        format!("50 random cases, max |P_C - sum_a P(b,a)| = {worst:.2e}, {elapsed:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let system = SpinSystem::new(1.0).unwrap();
    let z = system.axis_basis(Axis::Z);
    let floquet = build_floquet(&TopParams::new(system.clone(), 0.0).unwrap()).unwrap();
    let rho0 = DensityState::pure(&system.coherent_state(Axis::Z, Sign::Plus)).unwrap();
    let pc = conditional(&rho0, &floquet, 1, 2, &z, &z).unwrap();
    let pb = unconditional(&rho0, &floquet, 2, &z).unwrap();
    let before = kicktop::top::evolve(&rho0, &floquet, 1);
    let expected_pc = [0.375, 0.25, 0.375];
    let pc_err = pc
        .probs()
        .iter()
        .zip(expected_pc)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let d = delta(&pc, &pb).unwrap();
    let h = hellinger(&pc, &pb).unwrap();
    let c = coherence_l1(&before, &z).unwrap();
    let d_err = (d - (32.0 / 11.0 - 1.0)).abs();
    let h_err = (h - (1.0 - 0.375f64.sqrt()).sqrt()).abs();
    let c_err = (c - (0.5 + 2f64.sqrt())).abs();
    let tol = 1e-10;
    outcome(
        pc_err < tol && d_err < tol && h_err < tol && c_err < tol,
        format!(
            "P_C err {pc_err:.1e}, Delta={d:.10} (err {d_err:.1e}), H={h:.10} (err {h_err:.1e}), C_Z={c:.10} (err {c_err:.1e})"
        ),
    )
}

fn criterion_4() -> Outcome {
    let j = 15;
    let system = SpinSystem::new(j as f64).unwrap();
    let scenario = Scenario {
        params: TopParams::new(system.clone(), 0.0).unwrap(),
        initial: DensityState::pure(&system.coherent_state(Axis::Z, Sign::Plus)).unwrap(),
        axis_a: Axis::Z,
        axis_b: Axis::Z,
    };
    let run = ScenarioRun::new(&scenario, 52).unwrap();
    let (oracle_d, oracle_h) = oracle_delta_h(j);
    let mut quiet_worst = 0.0f64;
    let mut loud_worst = 0.0f64;
    let mut loud_count = 0;
    for t_beta in 1..=52 {
        for t_alpha in 0..t_beta {
            let s = run.sample(t_alpha, t_beta).unwrap();
            if t_alpha % 2 == 1 && t_beta % 2 == 0 {
                loud_count += 1;
                loud_worst = loud_worst
                    .max((s.value_delta - oracle_d).abs())
                    .max((s.value_h - oracle_h).abs());
            } else {
                quiet_worst = quiet_worst.max(s.value_delta.abs()).max(s.value_h.abs());
            }
        }
    }
    outcome(
        quiet_worst < 1e-10 && loud_worst < 1e-10,
        format!(
            "max |Delta|,|H| off-pattern {quiet_worst:.1e}; {loud_count} odd/even pairs match oracle Delta={oracle_d:.10}, H={oracle_h:.10} within {loud_worst:.1e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let roots = stability_boundaries(0.1, 7.0).unwrap();
    let near = |target: f64, tol: f64| roots.iter().any(|r| (r - target).abs() < tol);
    let passed = near(PI, 1e-6) && near(2.0 * PI, 1e-6) && near(5.6, 0.05);
    outcome(passed, format!("roots in [0.1, 7]: {roots:?}"))
}

fn criterion_6() -> Outcome {
    let cycle = [
        ClassicalPoint {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        },
        ClassicalPoint {
            x: 0.0,
            y: 0.0,
            z: -1.0,
        },
        ClassicalPoint {
            x: -1.0,
            y: 0.0,
            z: 0.0,
        },
        ClassicalPoint::NORTH_Z,
    ];
    let mut cycle_worst = 0.0f64;
    let mut pole_worst = 0.0f64;
    for kappa0 in [0.0, 1.0, 3.0, 6.0] {
        let orbit = classical_orbit(ClassicalPoint::NORTH_Z, kappa0, 4);
        for (p, e) in orbit[1..].iter().zip(cycle) {
            cycle_worst = cycle_worst.max(p.distance(&e));
        }
        for pole in [ClassicalPoint::NORTH_Y, ClassicalPoint::SOUTH_Y] {
            pole_worst = pole_worst.max(classical_step(pole, kappa0).distance(&pole));
        }
    }
    let report = run_classical(&ExperimentConfig::defaults(ExperimentKind::Classical)).unwrap();
    let onset = report.divergence_onset;
    let onset_ok = onset.is_some_and(|k| (1.9..=2.1).contains(&k));
    outcome(
        cycle_worst < 1e-12 && pole_worst < 1e-12 && onset_ok,
        format!(
            "4-cycle error {cycle_worst:.1e}, pole drift {pole_worst:.1e}, divergence onset {onset:?}"
        ),
    )
}

struct DefaultRuns {
    sweep_z: Vec<SweepRow>,
    sweep_y: Vec<SweepRow>,
    contour_z: Vec<ContourRow>,
    kappa_zero: Vec<ContourRow>,
    elapsed: Duration,
}

fn default_runs() -> DefaultRuns {
    let start = Instant::now();
    let sweep = ExperimentConfig::defaults(ExperimentKind::SweepKappa);
    let sweep_z = run_kappa_sweep(&sweep).unwrap();
    let sweep_y = run_kappa_sweep(&ExperimentConfig {
        state: InitialState::Y,
        ..sweep
    })
    .unwrap();
    let contour_z = run_contour(&ExperimentConfig::defaults(ExperimentKind::Contour)).unwrap();
    let kappa_zero =
        run_kappa_zero_scan(&ExperimentConfig::defaults(ExperimentKind::KappaZero)).unwrap();
    DefaultRuns {
        sweep_z,
        sweep_y,
        contour_z,
        kappa_zero,
        elapsed: start.elapsed(),
    }
}

fn criterion_7(runs: &DefaultRuns) -> Outcome {
    let spread = relative_spread_by_kappa(&runs.sweep_z, Metric::Delta);
    let chaotic = mean_over(&spread, 4.0, 7.0).unwrap();
    let regular = mean_over(&spread, 0.5, 2.5).unwrap();
    let a = chaotic < 0.5 * regular;

    let peak = runs
        .sweep_y
        .iter()
        .filter(|r| r.metric == "Delta" && r.n == 2)
        .max_by(|x, y| x.mean.total_cmp(&y.mean))
        .map(|r| r.kappa0)
        .unwrap();
    let b = (1.5..=3.0).contains(&peak);

    let contrast = parity_contrast_by_kappa(&runs.contour_z, Metric::Delta);
    let above_pi = mean_over(&contrast, PI, 7.0).unwrap();
    let regular_contrast = mean_over(&contrast, 1.0, 3.0).unwrap();
    let c = above_pi < regular_contrast;

    let fast = runs.elapsed < Duration::from_secs(600);
    outcome(
        a && b && c && fast,
        format!(
            "(a) rel. spread {chaotic:.3} on [4,7] vs {regular:.3} on [0.5,2.5] [{}]; \
             (b) argmax <Delta_2> for |y,j> at kappa0={peak} [{}]; \
             (c) parity contrast {above_pi:.3} above pi vs {regular_contrast:.3} on [1,3] [{}]; \
             runtime {:.2?}",
            pass_word(a),
            pass_word(b),
            pass_word(c),
            runs.elapsed
        ),
    )
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn criterion_8(runs: &DefaultRuns) -> Outcome {
    let j = 15.0;
    let mut violations = Vec::new();
    let mut check = |what: &str, value: f64, lo: f64, hi: f64| {
        if !(value >= lo && value <= hi) {
            violations.push(format!("{what}={value}"));
        }
    };
    for row in runs.sweep_z.iter().chain(&runs.sweep_y) {
        match row.metric.as_str() {
            "H" => check("mean H", row.mean, 0.0, 1.0),
            "Delta" => check("mean Delta", row.mean, -2.0 * j, 2.0 * j),
            _ => check("mean C", row.mean, 0.0, f64::INFINITY),
        }
    }
    for row in runs.contour_z.iter().chain(&runs.kappa_zero) {
        match row.metric.as_str() {
            "H" => check("H", row.value, 0.0, 1.0),
            "Delta" => check("Delta", row.value, -2.0 * j, 2.0 * j),
            _ => check("C", row.value, 0.0, f64::INFINITY),
        }
    }

    // Per-sample distributions over the sweep grid, both initial states.
    let mut worst_sum = 0.0f64;
    let mut samples = 0usize;
    let system = SpinSystem::new(j).unwrap();
    for state in [Axis::Z, Axis::Y] {
        for step in 0..=70 {
            let kappa0 = step as f64 * 0.1;
            let scenario = Scenario {
                params: TopParams::new(system.clone(), kappa0).unwrap(),
                initial: DensityState::pure(&system.coherent_state(state, Sign::Plus)).unwrap(),
                axis_a: Axis::Z,
                axis_b: Axis::Z,
            };
            let run = ScenarioRun::new(&scenario, 58).unwrap();
            for n in 1..=8 {
                for t_alpha in 0..=50 {
                    let pc = run.conditional(t_alpha, t_alpha + n).unwrap();
                    let pb = run.unconditional(t_alpha + n).unwrap();
                    for p in [&pc, &pb] {
                        worst_sum = worst_sum.max((p.probs().iter().sum::<f64>() - 1.0).abs());
                        check(
                            "participation",
                            participation(p).unwrap(),
                            1.0,
                            2.0 * j + 1.0,
                        );
                    }
                    check("H", hellinger(&pc, &pb).unwrap(), 0.0, 1.0);
                    check("Delta", delta(&pc, &pb).unwrap(), -2.0 * j, 2.0 * j);
                    samples += 1;
                }
            }
        }
    }
    let z = system.axis_basis(Axis::Z);
    let mixed = outcome_distribution(&DensityState::maximally_mixed(31), &z).unwrap();
    check(
        "participation(I/d)",
        participation(&mixed).unwrap(),
        1.0,
        31.0 + 1e-9,
    );
    outcome(
        violations.is_empty() && worst_sum < 1e-10,
        format!(
            "{samples} sample pairs + all default-run rows; {} bound violations; max |sum P - 1| {worst_sum:.1e}",
            violations.len()
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags; listing must not run the suite.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 algebraic identity suite", criterion_1()),
        ("2 dephasing vs joint-marginal oracle", criterion_2()),
        ("3 hand-derived j=1 scenario", criterion_3()),
        ("4 even/odd structure at kappa0=0, j=15", criterion_4()),
        ("5 4-cycle stability boundaries", criterion_5()),
        (
            "6 classical fixed points, cycle, divergence onset",
            criterion_6(),
        ),
    ];
    let runs = default_runs();
    results.push(("7 qualitative features of the default runs", criterion_7(&runs)));
    results.push(("8 metric bounds", criterion_8(&runs)));

    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "criterion {name}: {} -- {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
