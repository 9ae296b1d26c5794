//! Reference models shared by the integration tests. Nothing here calls into
//! the compiler or simulators; everything is rebuilt from first principles.

#![allow(dead_code)]

use czpulse::linalg::CMatrix;
use czpulse::model::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unitary from the QR factor of a random complex matrix.
pub fn random_unitary(rng: &mut impl Rng, qubits: usize) -> CMatrix {
    let d = 1 << qubits;
    let m = CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

pub fn random_state(rng: &mut impl Rng) -> [C64; 2] {
    let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let b = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / n, b / n]
}

/// Controlled-U on `total` qubits (qubit 0 most significant), active when
/// every control qubit reads 1.
pub fn controlled(u: &CMatrix, controls: &[usize], targets: &[usize], total: usize) -> CMatrix {
    let dim = 1 << total;
    let bit = |x: usize, q: usize| (x >> (total - 1 - q)) & 1;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        if controls.iter().any(|&q| bit(col, q) == 0) {
            out[(col, col)] = c(1.0, 0.0);
            continue;
        }
        let sub_in = targets.iter().fold(0, |acc, &q| (acc << 1) | bit(col, q));
        let base = targets.iter().fold(col, |acc, &q| acc & !(1 << (total - 1 - q)));
        for sub_out in 0..u.nrows() {
            let mut row = base;
            for (k, &q) in targets.iter().enumerate() {
                if (sub_out >> (targets.len() - 1 - k)) & 1 == 1 {
                    row |= 1 << (total - 1 - q);
                }
            }
            out[(row, col)] += u[(sub_out, sub_in)];
        }
    }
    out
}

/// X on `q`.
pub fn flip(q: usize, total: usize) -> CMatrix {
    let dim = 1 << total;
    let mask = 1 << (total - 1 - q);
    CMatrix::from_fn(dim, dim, |r, col| if r == col ^ mask { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance between `u` and `v` after removing the best global phase.
pub fn phase_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    let overlap: C64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    if overlap.norm() < 1e-12 {
        return f64::INFINITY;
    }
    let phase = overlap / overlap.norm();
    max_diff(u, &(v * phase))
}

/// Position (1-based, from the first control) where two strings first
/// differ; N + 2 for identical strings.
pub fn first_difference(x: &[bool], y: &[bool]) -> usize {
    x.iter().zip(y).position(|(a, b)| a != b).map_or(x.len() + 2, |i| i + 1)
}

/// Sideband pulses for M gates with N controls, before and after
/// boundary cancellation.
pub fn expected_counts(strings: &[Vec<bool>]) -> (usize, usize) {
    let n = strings[0].len();
    let baseline = strings.len() * (2 * n + 2);
    let removed: usize = strings.windows(2).map(|w| 2 * (first_difference(&w[0], &w[1]) - 1)).sum();
    (baseline, baseline - removed)
}

/// Σ over consecutive binary-counting strings of 2·(first difference − 1).
pub fn brute_force_eliminated(n: usize) -> i64 {
    let strings: Vec<Vec<bool>> = (0..1usize << n)
        .map(|v| (0..n).map(|k| (v >> (n - 1 - k)) & 1 == 1).collect())
        .collect();
    strings.windows(2).map(|w| 2 * (first_difference(&w[0], &w[1]) as i64 - 1)).sum()
}

/// Levels g, e, f as 0, 1, 2.
pub const G: usize = 0;
pub const E: usize = 1;
pub const F: usize = 2;

/// Index in the four-ion, three-Fock-state register used by the step traces:
/// ions most significant first, Fock number last.
pub fn trace_index(levels: [usize; 4], n: usize) -> usize {
    levels.iter().fold(0, |acc, &l| acc * 3 + l) * 3 + n
}

pub const TRACE_DIM: usize = 81 * 3;

/// Expected state after `step` (1..=4) of the 3-control construction for
/// `case` (1..=6) with signs (s1, s2), target starting in `psi`.
pub fn expected_trace(case: usize, step: usize, s1: u8, s2: u8, u: &CMatrix, psi: [C64; 2]) -> Vec<C64> {
    let sign = |k: u8| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let odd = sign(s1 + s2 + 1);
    let even = sign(s1 + s2);
    let minus_i = c(0.0, -sign(s1));
    let one = c(1.0, 0.0);
    let (amp, controls, n, apply_u): (C64, [usize; 3], usize, bool) = match (case, step) {
        (1, _) => (one, [G, E, G], 0, false),
        (2, 1) => (one, [G, E, E], 0, false),
        (2, _) => (one * odd, [G, E, E], 0, false),
        (3, 1) | (3, 2) => (-one, [G, F, G], 0, false),
        (3, _) => (one, [E, G, G], 0, false),
        (4, 1) => (-one, [G, F, E], 0, false),
        (4, 2) => (one * even, [G, F, E], 0, false),
        (4, 3) => (one * odd, [E, G, E], 0, false),
        (4, _) => (one, [E, G, E], 0, false),
        (5, 1) | (5, 2) => (-one, [G, E, F], 0, false),
        (5, _) => (one, [E, E, G], 0, false),
        (6, 1) => (minus_i, [G, E, E], 1, false),
        (6, 2) => (minus_i, [G, E, E], 1, true),
        (6, 3) => (one * odd, [E, E, E], 0, true),
        (6, _) => (one, [E, E, E], 0, true),
        _ => panic!("no case {case}"),
    };
    // Phase correction leaves every case with unit amplitude.
    let amp = if step == 4 { one } else { amp };
    let target = if apply_u {
        [u[(0, 0)] * psi[0] + u[(0, 1)] * psi[1], u[(1, 0)] * psi[0] + u[(1, 1)] * psi[1]]
    } else {
        psi
    };
    let mut out = vec![c(0.0, 0.0); TRACE_DIM];
    for (t, a) in [G, E].into_iter().zip(target) {
        out[trace_index([controls[0], controls[1], controls[2], t], n)] = amp * a;
    }
    out
}

/// Σ_l |l⟩⟨l| ⊗ U_l with identity on unused ancilla states.
pub fn select_matrix(unitaries: &[CMatrix], ancillas: usize) -> CMatrix {
    let d = unitaries[0].nrows();
    let dim = (1 << ancillas) * d;
    let mut out = CMatrix::identity(dim, dim);
    for (l, u) in unitaries.iter().enumerate() {
        out.view_mut((l * d, l * d), (d, d)).copy_from(u);
    }
    out
}

/// Any unitary whose first column is `v` (real, unit norm), built by
/// Gram-Schmidt on v followed by the standard basis.
pub fn prep_unitary(v: &[f64]) -> CMatrix {
    let d = v.len();
    let mut cols: Vec<Vec<f64>> = vec![v.to_vec()];
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut w: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        for q in &cols {
            let dot: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(w.iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_fn(d, d, |r, col| c(cols[col][r], 0.0))
}

/// Thermal Fock population p_n before truncation.
pub fn geometric(n_bar: f64, n: usize) -> f64 {
    (n_bar / (1.0 + n_bar)).powi(n as i32) / (1.0 + n_bar)
}
