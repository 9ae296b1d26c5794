mod common;

use common::{c, controlled, geometric};
use czpulse::circuit::{cswap_decomposition, sequence_unitary, ControlString, GateSpec};
use czpulse::compiler::lower_mc_gate;
use czpulse::exact::{run_schedule, Layout, StateVector};
use czpulse::linalg::{pauli, CMatrix};
use czpulse::noisy::{fidelity, run_trajectories, thermal_distribution, NoiseParams, RunOptions};
use czpulse::{compile, CompileOptions, Execution, Gauge, LabelTable, LoweringStyle, PhysParams, Schedule};
use nalgebra::DVector;

fn cswap3(optimize: bool) -> (Schedule, CMatrix) {
    let seq = cswap_decomposition(3).unwrap();
    let s = compile(&seq, CompileOptions { optimize, style: LoweringStyle::Toffoli }).unwrap();
    (s, sequence_unitary(&seq, 5).unwrap())
}

fn all_inputs() -> Vec<usize> {
    (0..32).collect()
}

#[test]
fn thermal_populations() {
    assert_eq!(thermal_distribution(0.0, 10)[0], 1.0);
    let p = thermal_distribution(0.05, 10);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((geometric(0.05, 0) - 0.9524).abs() < 1e-4);
    assert!((geometric(0.05, 1) - 0.0454).abs() < 1e-4);
    // Truncation at 10 phonons barely renormalizes.
    for (n, pn) in p.iter().enumerate() {
        assert!((pn - geometric(0.05, n)).abs() < 1e-12);
    }
}

#[test]
fn fidelity_of_pure_and_mixed_outputs() {
    let u = pauli('X').unwrap();
    let psi = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let out = &u * &psi;
    let rho = &out * out.adjoint();
    assert!((fidelity(&u, &psi, &rho) - 1.0).abs() < 1e-12);
    let mixed = CMatrix::identity(2, 2) * c(0.5, 0.0);
    assert!((fidelity(&u, &psi, &mixed) - 0.5).abs() < 1e-12);
}

#[test]
fn noiseless_proposed_swap_is_perfect() {
    let (s, ideal) = cswap3(true);
    let noise = NoiseParams { n_traj: 2, ..NoiseParams::noiseless() };
    let r = run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &all_inputs(), &RunOptions::default()).unwrap();
    for (b, f) in r.inputs.iter().zip(&r.fidelities) {
        assert!(*f > 1.0 - 1e-6, "{}: {f}", r.state_label(*b));
    }
    assert_eq!(r.mean_jumps, 0.0);
}

#[test]
fn iterated_cancelled_swap_stays_exact() {
    let (s, ideal) = cswap3(true);
    let noise = NoiseParams { n_traj: 1, ..NoiseParams::noiseless() };
    for k in [2, 3] {
        let opts = RunOptions { iterations: Some(k), ..RunOptions::default() };
        let r = run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &all_inputs(), &opts).unwrap();
        assert_eq!(r.iterations, k);
        assert!(r.fidelities.iter().all(|f| *f > 1.0 - 1e-6), "k = {k}");
    }
}

#[test]
fn noiseless_trajectories_match_the_exact_simulator() {
    // Compare a Toffoli lowering against a deliberately wrong ideal so the
    // overlaps are fractional.
    let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]) * c(0.5f64.sqrt(), 0.0);
    let y = pauli('Y').unwrap();
    let g = GateSpec::new(ControlString::all_ones(2), "Y", y.clone()).unwrap();
    let s = lower_mc_gate(&g, Gauge::from_bits(1, 0)).unwrap();
    let mut table = LabelTable::new();
    table.insert("Y", y).unwrap();
    let ideal = controlled(&h, &[0, 1], &[2], 3);
    let noise = NoiseParams { n_traj: 3, ..NoiseParams::noiseless() };
    let opts = RunOptions { table: table.clone(), ..RunOptions::default() };
    let inputs: Vec<usize> = (0..8).collect();
    let r = run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &inputs, &opts).unwrap();
    let layout = Layout::new(3, 2);
    for &b in &inputs {
        let mut psi = StateVector::basis(layout, layout.computational_index(b, 0));
        run_schedule(&mut psi, &s, &table).unwrap();
        let amp: czpulse::model::C64 = (0..8).map(|row| ideal[(row, b)].conj() * psi.amps[layout.computational_index(row, 0)]).sum();
        assert!((r.fidelities[b] - amp.norm_sqr()).abs() < 1e-8, "input {b}");
    }
    assert!(r.fidelities.iter().any(|f| *f < 0.9));
}

#[test]
fn doubling_the_rates_lowers_fidelity() {
    let (s, ideal) = cswap3(true);
    let base = NoiseParams { n_traj: 200, ..NoiseParams::default() };
    let run = |n: &NoiseParams| run_trajectories(&s, &PhysParams::default(), n, &ideal, &all_inputs(), &RunOptions::default()).unwrap();
    let a = run(&base);
    let b = run(&base.scaled_rates(2.0));
    assert!(b.overall < a.overall, "{} vs {}", b.overall, a.overall);
    for (i, (fa, fb)) in a.fidelities.iter().zip(&b.fidelities).enumerate() {
        // Three standard errors of a 200-trajectory mean at these fidelities.
        let slack = 3.0 * (fa * (1.0 - fa) / 200.0).sqrt();
        assert!(fb < &(fa + slack), "input {i}: {fb} vs {fa}");
    }
}

#[test]
fn reports_are_reproducible() {
    let (s, ideal) = cswap3(false);
    let noise = NoiseParams { n_traj: 100, seed: 42, ..NoiseParams::default() };
    let run = |exec| {
        let opts = RunOptions { execution: exec, ..RunOptions::default() };
        run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &all_inputs(), &opts).unwrap()
    };
    let a = run(Execution::Parallel);
    let b = run(Execution::Parallel);
    let seq = run(Execution::Sequential);
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), seq.to_csv());
    assert_eq!(a.summary(), seq.summary());
    let other = run_trajectories(
        &s,
        &PhysParams::default(),
        &NoiseParams { seed: 43, ..noise.clone() },
        &ideal,
        &all_inputs(),
        &RunOptions::default(),
    )
    .unwrap();
    assert_ne!(a.fidelities, other.fidelities);
}

#[test]
fn integrator_is_converged_at_the_default_substep() {
    let (s, ideal) = cswap3(true);
    // Fewer trajectories let a single diverging trajectory dominate.
    let noise = NoiseParams { n_traj: 1000, ..NoiseParams::default() };
    let opts = RunOptions { check_convergence: true, ..RunOptions::default() };
    let r = run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &all_inputs(), &opts).unwrap();
    assert_eq!(r.converged(), Some(true), "{:?}", r.max_dt_change);
}

#[test]
fn paper_noise_file_matches_the_defaults() {
    let p = NoiseParams::parse_toml(include_str!("../data/paper_noise.toml")).unwrap();
    assert_eq!(p, NoiseParams::default());
    assert!(NoiseParams::parse_toml("gamma_h = -1.0").is_err());
    assert!(NoiseParams::parse_toml("gamma = 1.0").is_err());
}
