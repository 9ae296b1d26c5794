mod common;

use common::{controlled, flip, phase_distance, random_unitary, rng};
use czpulse::circuit::{ControlString, GateSequence, GateSpec};
use czpulse::compiler::{lower_mc_gate, lower_toffoli, ToffoliVariant};
use czpulse::exact::{computational_block, schedule_unitary};
use czpulse::linalg::{is_unitary, pauli, CMatrix};
use czpulse::model::pulse_block_unitary;
use czpulse::{compile, Angle, CompileOptions, Execution, Gauge, LabelTable, LoweringStyle, PulseKind, PulseOp, Schedule};
use proptest::prelude::*;

const TOL: f64 = 1e-10;

#[test]
fn toffoli_variants_match_the_ideal_gate() {
    let x = pauli('X').unwrap();
    for n in 2..=5 {
        let controls: Vec<usize> = (0..n - 1).collect();
        let ideal = controlled(&x, &controls, &[n - 1], n);
        for v in ToffoliVariant::ALL {
            let s = lower_toffoli(n, v).unwrap();
            let b = computational_block(&s, 2, &LabelTable::new(), Execution::Sequential).unwrap();
            assert!(b.leakage < 1e-12, "{n}-Toffoli {v:?} leaks {:e}", b.leakage);
            let d = phase_distance(&b.matrix, &ideal);
            assert!(d < TOL, "{n}-Toffoli {v:?}: {d:e}");
        }
    }
}

#[test]
fn multi_controlled_gauges_match_the_ideal_gate() {
    for n in 2..=4 {
        for (k, gauge) in Gauge::all().into_iter().enumerate() {
            let mut r = rng((n * 4 + k) as u64);
            let u = random_unitary(&mut r, 1);
            let mut table = LabelTable::new();
            table.insert("U", u.clone()).unwrap();
            let g = GateSpec::new(ControlString::all_ones(n), "U", u.clone()).unwrap();
            let s = lower_mc_gate(&g, gauge).unwrap();
            let b = computational_block(&s, 2, &table, Execution::Sequential).unwrap();
            let controls: Vec<usize> = (0..n).collect();
            let ideal = controlled(&u, &controls, &[n], n + 1);
            assert!(b.leakage < 1e-12);
            // The construction is exact, not just up to phase.
            assert!(common::max_diff(&b.matrix, &ideal) < TOL, "N = {n}, gauge {:?}", gauge.bits());
        }
    }
}

fn bits(v: u32, n: usize) -> Vec<bool> {
    (0..n).map(|k| (v >> (n - 1 - k)) & 1 == 1).collect()
}

/// The ideal product, with zero controls conjugated by X.
fn ideal_sequence(strings: &[Vec<bool>], us: &[CMatrix]) -> CMatrix {
    let n = strings[0].len();
    let q = n + 1;
    let mut acc = CMatrix::identity(1 << q, 1 << q);
    for (s, u) in strings.iter().zip(us) {
        let mut gate = controlled(u, &(0..n).collect::<Vec<_>>(), &[n], q);
        for (i, &b) in s.iter().enumerate() {
            if !b {
                gate = flip(i, q) * gate * flip(i, q);
            }
        }
        acc = gate * acc;
    }
    acc
}

fn sequence_strategy() -> impl Strategy<Value = (usize, Vec<u32>, u64)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(0u32..(1 << n), 1..=4), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cancellation_preserves_the_unitary((n, values, seed) in sequence_strategy()) {
        let mut r = rng(seed);
        let strings: Vec<Vec<bool>> = values.iter().map(|&v| bits(v, n)).collect();
        let us: Vec<CMatrix> = strings.iter().map(|_| random_unitary(&mut r, 1)).collect();
        let mut table = LabelTable::new();
        let gates: Vec<GateSpec> = strings
            .iter()
            .zip(&us)
            .enumerate()
            .map(|(k, (s, u))| {
                let label = format!("V{k}");
                table.insert(label.clone(), u.clone()).unwrap();
                GateSpec::new(ControlString::new(s.clone()).unwrap(), &label, u.clone()).unwrap()
            })
            .collect();
        let seq = GateSequence::new(gates).unwrap();
        let ideal = ideal_sequence(&strings, &us);
        let mut blocks = Vec::new();
        for opts in [CompileOptions::standard(LoweringStyle::ControlledUnitary), CompileOptions::optimized(LoweringStyle::ControlledUnitary)] {
            let s = compile(&seq, opts).unwrap();
            let b = computational_block(&s, 2, &table, Execution::Sequential).unwrap();
            // Control information never stays in f or in the mode.
            prop_assert!(b.leakage < 1e-12);
            prop_assert!(phase_distance(&b.matrix, &ideal) < TOL);
            blocks.push(b.matrix);
        }
        prop_assert!(phase_distance(&blocks[0], &blocks[1]) < TOL);
    }

    #[test]
    fn toffoli_style_gauges_are_equivalent(n in 2usize..=4, seed in any::<u64>()) {
        let x = pauli('X').unwrap();
        let mut r = rng(seed);
        let strings: Vec<Vec<bool>> = (0..3).map(|_| bits(rand::Rng::gen_range(&mut r, 0..1u32 << n), n)).collect();
        let gates: Vec<GateSpec> = strings
            .iter()
            .map(|s| GateSpec::new(ControlString::new(s.clone()).unwrap(), "X", x.clone()).unwrap())
            .collect();
        let seq = GateSequence::new(gates).unwrap();
        let ideal = ideal_sequence(&strings, &[x.clone(), x.clone(), x.clone()]);
        for opts in [CompileOptions::standard(LoweringStyle::Toffoli), CompileOptions::optimized(LoweringStyle::Toffoli)] {
            let s = compile(&seq, opts).unwrap();
            let b = computational_block(&s, 2, &LabelTable::new(), Execution::Sequential).unwrap();
            prop_assert!(b.leakage < 1e-12);
            prop_assert!(phase_distance(&b.matrix, &ideal) < TOL);
        }
    }

    #[test]
    fn pulse_blocks_are_unitary(k in 0usize..3, theta in -4.0f64..4.0, phi in -2.0f64..2.0, n in 0usize..12) {
        let kind = [PulseKind::Rsb, PulseKind::RsbAux, PulseKind::Carrier][k];
        let m = pulse_block_unitary(kind, Angle(theta), Angle(phi), n).unwrap();
        let dm = CMatrix::from_fn(2, 2, |r, c| m[(r, c)]);
        prop_assert!(is_unitary(&dm, 1e-12));
    }

    #[test]
    fn schedules_are_unitary_on_the_truncated_space(ops in prop::collection::vec((0usize..3, 0usize..2, -3.0f64..3.0), 1..8)) {
        let pulses: Vec<PulseOp> = ops
            .iter()
            .map(|&(k, ion, a)| match k {
                0 => PulseOp::rsb(ion, Angle(a)),
                1 => PulseOp::rsb_aux(ion, Angle(a)),
                _ => PulseOp::carrier(ion, Angle(a), Angle(a / 3.0)),
            })
            .collect();
        let s = Schedule::from_pulses(2, pulses).unwrap();
        let u = schedule_unitary(&s, 3, &LabelTable::new(), Execution::Sequential).unwrap();
        prop_assert!(is_unitary(&u, 1e-10));
    }
}
