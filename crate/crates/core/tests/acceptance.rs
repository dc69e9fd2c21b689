//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Every tolerance is pinned here. Oracles (the three-qubit mediated
//! sequence, closed forms, Monte Carlo estimates) are implemented in this
//! file, independent of the library code paths they check.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hotgate_core::fidelity::{
    choi_fidelity, echo_residual, mediated_fidelity, zz_damping_fidelity, EchoSpec, GateTime,
    TwoQubitChannel,
};
use hotgate_core::geometry::{CouplingLaw, LogicalVector, ModuleLayout};
use hotgate_core::lattice::{LatticeConfig, LatticeSystem, MechanicalState};
use hotgate_core::noise::{
    distribution_collective, sample_coupling, CollectiveGaussianModel, CouplingDistribution,
};
use hotgate_core::optimizer::{infidelity_curve, log_grid, OptimizationConfig};
use hotgate_core::presets::{build_scenario, find_preset, ScenarioModel};
use hotgate_core::runner::{run, RunResult, RunSpec};
use hotgate_core::trap::{
    equilibrium_positions, fidelity_from_couplings, mode_decomposition, thermal_couplings,
    exact_twin_fidelity, TrapPairConfig, TrapSpec,
};

type C64 = Complex<f64>;

fn pass(n: u32, what: &str) {
    println!("acceptance criterion {n:02}: PASS - {what}");
}

fn dist(nodes: Vec<(f64, f64)>) -> CouplingDistribution<f64> {
    CouplingDistribution::new(nodes, true).unwrap()
}

fn t(dt: f64) -> GateTime<f64> {
    GateTime::new(dt).unwrap()
}

fn preset_params(name: &str) -> BTreeMap<String, f64> {
    find_preset(name)
        .unwrap()
        .params
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

// --- criterion 1 -----------------------------------------------------------

#[test]
fn criterion_01_choi_fidelity_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..50 {
        let k = rng.gen_range(1..8);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let nodes: Vec<(f64, f64)> = raw
            .iter()
            .map(|w| (rng.gen_range(-2.0..2.0), w / total))
            .collect();
        let d = dist(nodes);
        let dt = t(rng.gen_range(0.0..2.0));

        let channel = TwoQubitChannel::zz_damping(&d, dt).unwrap();
        let f_choi = choi_fidelity(&channel, std::f64::consts::FRAC_PI_4);
        // Independent evaluation of <cos^2(pi/4 - theta)>.
        let expected: f64 = d
            .nodes()
            .iter()
            .map(|&(mu, w)| w * (std::f64::consts::FRAC_PI_4 - mu * dt.get()).cos().powi(2))
            .sum();
        assert!(
            (f_choi - expected).abs() < 1e-12,
            "choi {f_choi} vs direct {expected}"
        );
    }
    pass(1, "Choi fidelity of the ZZ-damping channel equals <cos^2(pi/4 - theta)> (50 random distributions, 1e-12)");
}

// --- criterion 2 -----------------------------------------------------------

/// Independent simulation of the three-qubit mediated sequence: the channel
/// acting on the two data qubits for fixed interaction angles alpha (pair
/// 0-1) and beta (pair 0-2), computed by evolving every input dyad through
/// the full 8-dimensional sequence.
fn mediated_channel_choi(angle_pairs: &[(f64, f64, f64)]) -> DMatrix<C64> {
    let z = |n: usize, q: usize, s: usize| -> f64 {
        if (s >> (n - 1 - q)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let diag8 = |f: &dyn Fn(usize) -> f64, angle: f64| -> DMatrix<C64> {
        DMatrix::from_fn(8, 8, |r, c| {
            if r == c {
                C64::new(0.0, angle * f(r)).exp()
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    // R = exp(-i pi/4 X_0) on the mediator qubit.
    let mut r_op = DMatrix::<C64>::zeros(8, 8);
    let c = C64::new((std::f64::consts::FRAC_PI_4).cos(), 0.0);
    let s = C64::new(0.0, -(std::f64::consts::FRAC_PI_4).sin());
    for idx in 0..8usize {
        r_op[(idx, idx)] = c;
        r_op[(idx ^ 0b100, idx)] = s;
    }

    let mut choi = DMatrix::<C64>::zeros(16, 16);
    for &(alpha, beta, weight) in angle_pairs {
        let u_int = diag8(&|st| -(z(3, 0, st) * z(3, 1, st)), alpha)
            * diag8(&|st| -(z(3, 0, st) * z(3, 2, st)), beta);
        let g = diag8(
            &|st| 2.0 * z(3, 0, st) + z(3, 1, st) + z(3, 2, st),
            std::f64::consts::FRAC_PI_4,
        );
        let full = &r_op * g * u_int;

        // Evolve each data dyad |i><j| with the mediator starting in |+>.
        for i in 0..4usize {
            for j in 0..4usize {
                let mut rho = DMatrix::<C64>::zeros(8, 8);
                let amp = C64::new(0.5, 0.0); // |+><+| elements
                for mi in 0..2usize {
                    for mj in 0..2usize {
                        rho[(mi * 4 + i, mj * 4 + j)] = amp;
                    }
                }
                let evolved = &full * rho * full.adjoint();
                // Measure the mediator in the Z basis and apply (Z1 Z2)^k.
                let mut out = DMatrix::<C64>::zeros(4, 4);
                for k in 0..2usize {
                    for a in 0..4usize {
                        for b in 0..4usize {
                            let mut v = evolved[(k * 4 + a, k * 4 + b)];
                            if k == 1 {
                                v *= C64::new(
                                    z(2, 0, a) * z(2, 1, a) * z(2, 0, b) * z(2, 1, b),
                                    0.0,
                                );
                            }
                            out[(a, b)] += v;
                        }
                    }
                }
                for a in 0..4usize {
                    for b in 0..4usize {
                        choi[(i * 4 + a, j * 4 + b)] += out[(a, b)] * C64::new(weight, 0.0);
                    }
                }
            }
        }
    }
    choi
}

#[test]
fn criterion_02_mediated_product_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..20 {
        let two_point = |rng: &mut ChaCha8Rng| {
            let w = rng.gen_range(0.1..0.9);
            vec![
                (rng.gen_range(-1.5..1.5), w),
                (rng.gen_range(-1.5..1.5), 1.0 - w),
            ]
        };
        let d1 = dist(two_point(&mut rng));
        let d2 = dist(two_point(&mut rng));
        let product = mediated_fidelity(&d1, &d2, t(1.0));

        let mut pairs = Vec::new();
        for &(a, wa) in d1.nodes() {
            for &(b, wb) in d2.nodes() {
                pairs.push((a, b, wa * wb));
            }
        }
        let channel = TwoQubitChannel::new(mediated_channel_choi(&pairs)).unwrap();
        let brute = choi_fidelity(&channel, std::f64::consts::FRAC_PI_4);
        assert!(
            (product - brute).abs() < 1e-12,
            "product {product} vs brute force {brute}"
        );
    }
    pass(2, "mediated gate fidelity equals F2*F3 against the brute-force 3-qubit sequence (20 random instances, 1e-12)");
}

// --- criterion 3 -----------------------------------------------------------

#[test]
fn criterion_03_echo_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for tau in [0.1, 1.0, std::f64::consts::PI] {
        for i in 0..20usize {
            let k = 2 + (i % 5);
            let fields: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut hzz = DMatrix::<f64>::zeros(k, k);
            for a in 0..k {
                for b in (a + 1)..k {
                    hzz[(a, b)] = rng.gen_range(-1.0..1.0);
                }
            }
            let spec = EchoSpec::new(fields, tau).unwrap();
            let r = echo_residual(&spec, &hzz, k).unwrap();
            assert!(r < 1e-10, "K={k} tau={tau}: residual {r}");
        }
    }
    pass(3, "half-time global-flip echo cancels the background field exactly (K <= 6, residual < 1e-10)");
}

// --- criterion 4 -----------------------------------------------------------

#[test]
fn criterion_04_trap_closed_forms() {
    let x3 = equilibrium_positions::<f64>(3).unwrap();
    let c3 = 1.25f64.powf(1.0 / 3.0);
    assert!((x3[0] + c3).abs() < 1e-10);
    assert!(x3[1].abs() < 1e-10);
    assert!((x3[2] - c3).abs() < 1e-10);

    let modes = mode_decomposition(&TrapSpec::new(3, 1.0, 1.0).unwrap()).unwrap();
    let expected = [1.0f64, 3.0, 29.0 / 5.0];
    for (l, e) in modes.lambdas().iter().zip(expected) {
        assert!((*l - e).abs() < 1e-10, "lambda {l} vs {e}");
    }

    let x2 = equilibrium_positions::<f64>(2).unwrap();
    let c2 = 2.0f64.powf(-2.0 / 3.0);
    assert!((x2[0] + c2).abs() < 1e-10);
    assert!((x2[1] - c2).abs() < 1e-10);
    pass(4, "chain closed forms: K=3 equilibria +-(5/4)^(1/3), spectrum (1, 3, 29/5); K=2 equilibria +-2^(-2/3) (1e-10)");
}

// --- criterion 5 -----------------------------------------------------------

#[test]
fn criterion_05_scaling_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..20 {
        let n_a = rng.gen_range(1..4);
        let n_b = rng.gen_range(1..4);
        let layout_a = ModuleLayout::chain(n_a, rng.gen_range(0.7..1.4), 0.0).unwrap();
        let layout_b = ModuleLayout::chain(n_b, rng.gen_range(0.7..1.4), rng.gen_range(1.0..2.5))
            .unwrap();
        let sigma = rng.gen_range(0.5..3.0);
        let model =
            CollectiveGaussianModel::new(layout_a, layout_b, sigma, vec![0], 257).unwrap();
        let law = CouplingLaw::new(rng.gen_range(0.5..2.0), 1).unwrap();

        let a = LogicalVector::new((0..n_a).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .unwrap();
        let b = LogicalVector::new((0..n_b).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .unwrap();
        let c: f64 = rng.gen_range(0.02..=1.0);
        let dt: f64 = rng.gen_range(0.1..4.0);

        let scaled = a.scaled(c).unwrap();
        let lhs = zz_damping_fidelity(
            &distribution_collective(&model, &scaled, &b, &law).unwrap(),
            t(dt),
        );
        let rhs = zz_damping_fidelity(
            &distribution_collective(&model, &a, &b, &law).unwrap(),
            t(c * dt),
        );
        assert!((lhs - rhs).abs() < 1e-12, "F(ca, dt) {lhs} vs F(a, c dt) {rhs}");
    }
    pass(5, "time-rescaling identity F^{(ca)b}(dt) = F^{ab}(c dt) on random collective models (1e-12)");
}

// --- criterion 6 -----------------------------------------------------------

#[test]
fn criterion_06_quadrature_vs_monte_carlo() {
    for name in ["fig2c", "fig2f", "fig4b"] {
        let def = find_preset(name).unwrap();
        let model = build_scenario(def.scenario, &preset_params(name)).unwrap();
        let ScenarioModel::Kernel {
            kernel,
            n_a,
            n_b,
            sampler: Some((classical, law)),
        } = model
        else {
            panic!("{name} should build a classical kernel");
        };
        let a = LogicalVector::trivial(n_a);
        let b = LogicalVector::trivial(n_b);
        let quad = kernel.distribution(&a, &b).unwrap();

        let n = 1_000_000usize;
        let samples = sample_coupling(&classical, &a, &b, &law, 600 + n_a as u64, n).unwrap();
        let grid = log_grid(def.grid_min, def.grid_max, 10).unwrap();
        for dt in grid {
            let f_quad = zz_damping_fidelity(&quad, t(dt));
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for (i, mu) in samples.iter().enumerate() {
                let x = (std::f64::consts::FRAC_PI_4 - mu * dt).cos().powi(2);
                let delta = x - mean;
                mean += delta / (i as f64 + 1.0);
                m2 += delta * (x - mean);
            }
            let se = (m2 / (n as f64 - 1.0) / n as f64).sqrt();
            assert!(
                (f_quad - mean).abs() < 3.0 * se,
                "{name} dt={dt}: quadrature {f_quad} vs MC {mean} +- {se}"
            );
        }
    }
    pass(6, "quadrature fidelity matches a 1e6-sample Monte Carlo estimate within 3 standard errors (fig2c, fig2f, fig4b; 10 grid points each)");
}

// --- criterion 7 -----------------------------------------------------------

#[test]
fn criterion_07_small_dt_trivial_optimality() {
    let def = find_preset("fig2c").unwrap();
    let model = build_scenario(def.scenario, &preset_params("fig2c")).unwrap();
    let ScenarioModel::Kernel { kernel, .. } = model else {
        panic!("fig2c is a kernel scenario");
    };
    // First decade of the preset grid.
    let full = log_grid(def.grid_min, def.grid_max, def.grid_points).unwrap();
    let decade: Vec<f64> = full
        .iter()
        .copied()
        .filter(|dt| *dt <= def.grid_min * 10.0 * (1.0 + 1e-12))
        .collect();
    assert!(decade.len() >= 20, "decade should hold a fifth of the grid");
    let config = OptimizationConfig {
        seed: 107,
        ..OptimizationConfig::new(decade).unwrap()
    };
    let curve = infidelity_curve(&kernel, &config).unwrap();
    for (p, trivial) in curve.points.iter().zip(&curve.trivial_fidelity) {
        let gain = p.fidelity - trivial;
        assert!(
            gain < 1e-6,
            "dt={}: optimizer gained {gain:.2e} over the trivial encoding",
            p.delta_t
        );
        assert!(gain >= 0.0, "optimizer may not fall below the trivial start");
    }
    pass(7, "in the first grid decade of fig2c the trivial encoding is optimal to < 1e-6");
}

// --- criterion 8 -----------------------------------------------------------

fn optimized_last_infidelity(name: &str, overrides: &[(&str, f64)], points: usize) -> f64 {
    let def = find_preset(name).unwrap();
    let mut spec = RunSpec::from_preset(def).unwrap();
    for (k, v) in overrides {
        spec.params.insert(k.to_string(), *v);
    }
    spec.grid = log_grid(def.grid_min, def.grid_max, points).unwrap();
    spec.seed = 108;
    match run(&spec).unwrap() {
        RunResult::Curve(c) => 1.0 - c.points.last().unwrap().fidelity,
        _ => unreachable!(),
    }
}

#[test]
fn criterion_08_size_monotonicity_trends() {
    // Optimized curves, coarse warm-started grids up to each preset's
    // largest plotted time.
    let checks: [(&str, Vec<Vec<(&str, f64)>>); 6] = [
        (
            "fig2c",
            vec![vec![("n_a", 2.0)], vec![("n_a", 4.0)], vec![("n_a", 6.0)]],
        ),
        (
            "fig2f",
            vec![
                vec![("n_a", 2.0), ("n_b", 2.0)],
                vec![("n_a", 4.0), ("n_b", 4.0)],
                vec![("n_a", 6.0), ("n_b", 6.0)],
            ],
        ),
        (
            "fig4b",
            vec![
                vec![("n_a", 1.0), ("n_b", 1.0)],
                vec![("n_a", 2.0), ("n_b", 2.0)],
                vec![("n_a", 3.0), ("n_b", 3.0)],
            ],
        ),
        (
            "fig6a",
            vec![
                vec![("n_a", 1.0), ("n_b", 1.0)],
                vec![("n_a", 2.0), ("n_b", 2.0)],
                vec![("n_a", 3.0), ("n_b", 3.0)],
            ],
        ),
        (
            "fig6b",
            vec![vec![("n_a", 1.0)], vec![("n_a", 2.0)], vec![("n_a", 3.0)]],
        ),
        (
            "fig6c",
            vec![vec![("n", 1.0)], vec![("n", 2.0)], vec![("n", 3.0)]],
        ),
    ];
    for (name, sizes) in checks {
        let mut last = f64::INFINITY;
        for overrides in &sizes {
            let inf = optimized_last_infidelity(name, overrides, 32);
            assert!(
                inf < last,
                "{name}: infidelity {inf:.3e} did not improve on {last:.3e} at overrides {overrides:?}"
            );
            last = inf;
        }
    }

    // fig7: trivial encoding, compared at the largest plotted time.
    let def = find_preset("fig7").unwrap();
    let mut last = f64::INFINITY;
    for n in [1usize, 2, 3] {
        let config = LatticeConfig::new(
            n,
            30.0,
            2.0,
            2.0,
            LogicalVector::trivial(n),
            LogicalVector::trivial(n),
            CouplingLaw::new(5.0, 3).unwrap(),
        )
        .unwrap();
        let system = LatticeSystem::new(&config).unwrap();
        let rho = MechanicalState::maximally_mixed(config.mech_dim().unwrap());
        let f = system.fidelity(&rho, t(def.grid_max)).unwrap();
        let inf = 1.0 - f;
        assert!(
            inf < last,
            "fig7 N={n}: infidelity {inf:.3e} did not improve on {last:.3e}"
        );
        last = inf;
    }
    pass(8, "infidelity at the largest plotted time strictly decreases with system size (fig2c, fig2f, fig4b, fig6a-c optimized; fig7 trivial; 3 sizes each)");
}

// --- criterion 9 -----------------------------------------------------------

#[test]
fn criterion_09_optimal_encoding_structure() {
    let def = find_preset("fig2c").unwrap();
    let mut spec = RunSpec::from_preset(def).unwrap();
    spec.params.insert("n_a".into(), 6.0);
    spec.grid = log_grid(def.grid_min, def.grid_max, 48).unwrap();
    spec.seed = 109;
    let curve = match run(&spec).unwrap() {
        RunResult::Curve(c) => c,
        _ => unreachable!(),
    };
    let a = curve.points.last().unwrap().a.entries().to_vec();
    assert_eq!(a.len(), 6);
    // Reflection symmetry about the chain center.
    for i in 0..3 {
        let d = (a[i] - a[5 - i]).abs();
        assert!(d < 1e-3, "|a[{i}] - a[{}]| = {d:.2e}", 5 - i);
    }
    // Largest magnitudes at the chain ends.
    let max_abs = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(
        a[0].abs() >= max_abs - 1e-3 && a[5].abs() >= max_abs - 1e-3,
        "extremal qubits should carry the largest weight: {a:?}"
    );
    pass(9, "late-time optimal encoding on fig2c (N_A = 6) is reflection-symmetric within 1e-3 with extremal qubits heaviest");
}

// --- criterion 10 ----------------------------------------------------------

#[test]
fn criterion_10_quantized_cross_validation() {
    let config = TrapPairConfig::twin_traps(
        1,
        1.0,
        1.0,
        10.0,
        12.0,
        LogicalVector::trivial(1),
        LogicalVector::trivial(1),
        CouplingLaw::new(1.0, 3).unwrap(),
    )
    .unwrap();
    let couplings = thermal_couplings(&config, 0.5, 0.01, 24, 10_000).unwrap();
    let mu0: f64 = couplings.tables[0].cross[(0, 0)];
    assert!(
        1.0 / mu0.abs() > 1e3,
        "scale separation omega/mu is only {:.1}",
        1.0 / mu0.abs()
    );
    for frac in [0.1, 0.25, 0.4, 0.6, 0.8] {
        let dt = t(frac / mu0);
        let rwa = fidelity_from_couplings(&couplings, &config, dt).unwrap();
        let exact = exact_twin_fidelity(&config, 0.5, 0.01, dt, 4).unwrap();
        assert!(
            (rwa - exact).abs() < 1e-3,
            "dt*mu = {frac}: RWA {rwa} vs exact {exact}"
        );
    }
    pass(10, "rotating-wave thermal fidelity matches the exact twin-trap evolution within 1e-3 (omega/mu > 1e3, 5 grid points)");
}

// --- criterion 11 ----------------------------------------------------------

#[test]
fn criterion_11_self_interaction_insensitivity() {
    let configs: Vec<(&str, TrapPairConfig<f64>, f64, f64)> = vec![
        (
            "fig6a",
            TrapPairConfig::single_trap_split(
                TrapSpec::new(4, 1.0, 4.78).unwrap(),
                LogicalVector::trivial(2),
                LogicalVector::trivial(2),
                CouplingLaw::new(1.0, 3).unwrap(),
            )
            .unwrap(),
            1.3,
            0.07,
        ),
        (
            "fig6b",
            TrapPairConfig::cold_mediator(
                TrapSpec::new(2, 1.0, 15.97).unwrap(),
                0.01,
                20.0,
                LogicalVector::trivial(2),
                LogicalVector::trivial(1),
                CouplingLaw::new(1.0, 3).unwrap(),
            )
            .unwrap(),
            0.1,
            0.05,
        ),
        (
            "fig6c",
            TrapPairConfig::twin_traps(
                2,
                1.0,
                1.0 / 3.0,
                8.31,
                2.0,
                LogicalVector::trivial(2),
                LogicalVector::trivial(2),
                CouplingLaw::new(1.0, 3).unwrap(),
            )
            .unwrap(),
            0.2,
            0.01,
        ),
    ];
    for (name, config, temperature, epsilon) in configs {
        let couplings = thermal_couplings(&config, temperature, epsilon, 20, 50_000).unwrap();
        // The self-interaction phases are nonzero in general...
        let (self_a, self_b) = couplings.self_couplings(&config.a, &config.b).unwrap();
        if config.n_a() > 1 {
            assert!(self_a.iter().any(|v| v.abs() > 0.0), "{name}: self couplings vanish");
        }
        if config.n_b() > 1 {
            assert!(self_b.iter().any(|v| v.abs() > 0.0), "{name}: self couplings vanish");
        }
        // ...but zeroing them leaves the fidelity bit-for-bit unchanged.
        let mut zeroed = couplings.clone();
        for tables in &mut zeroed.tables {
            tables.self_a.fill(0.0);
            tables.self_b.fill(0.0);
        }
        for frac in [0.5, 5.0, 50.0] {
            let dt = t(frac);
            let f = fidelity_from_couplings(&couplings, &config, dt).unwrap();
            let f0 = fidelity_from_couplings(&zeroed, &config, dt).unwrap();
            assert_eq!(f, f0, "{name}: self terms leaked into the fidelity");
        }
    }
    pass(11, "thermal gate fidelity is exactly unchanged when the self-interaction phases are zeroed (all fig6 presets)");
}

// --- criterion 12 ----------------------------------------------------------

#[test]
fn criterion_12_lattice_channel_validity() {
    for n in [1usize, 2] {
        let config = LatticeConfig::new(
            n,
            30.0,
            2.0,
            2.0,
            LogicalVector::trivial(n),
            LogicalVector::trivial(n),
            CouplingLaw::new(5.0, 3).unwrap(),
        )
        .unwrap();
        let dim = config.mech_dim().unwrap();
        let system = LatticeSystem::new(&config).unwrap();
        let rho = MechanicalState::maximally_mixed(dim);
        let prepared = system.prepare(&rho).unwrap();

        for dt in [0.0, 0.05, 0.25] {
            let channel = prepared.channel(t(dt)).unwrap();
            assert!(
                channel.min_choi_eigenvalue() >= -1e-10,
                "N={n} dt={dt}: CP violated"
            );
            // Trace preservation: every diagonal logical dyad keeps weight 1.
            for k in 0..4 {
                let c = channel.choi()[(k * 4 + k, k * 4 + k)];
                assert!(
                    (c.re - 1.0).abs() < 1e-12 && c.im.abs() < 1e-12,
                    "N={n} dt={dt}: dyad {k} trace {c}"
                );
            }
        }
        let f0 = prepared.fidelity(t(0.0)).unwrap();
        assert!((f0 - 0.5).abs() < 1e-12, "N={n}: F(0) = {f0}");
    }
    pass(12, "lattice channel is CP (eigenvalues >= -1e-10), trace-preserving (1e-12) and F(0) = 1/2 (fig7, N in {1, 2})");
}
