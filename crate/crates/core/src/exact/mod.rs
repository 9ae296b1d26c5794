//! Noise-free state-vector simulation over qutrit ions and a truncated mode.
//!
//! Basis index = Σᵢ levelᵢ·3^(ions−1−i)·(n_max+1) + n, so ion 0 is the most
//! significant digit and the Fock index runs fastest.

mod trace;

pub use trace::{trace_case, trace_text, CaseTrace, TraceRecord, CASE_INPUTS};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::labels::LabelTable;
use crate::linalg::CMatrix;
use crate::model::{pulse_block_unitary, Level, PulseKind, PulseOp, Schedule, C64};

/// Largest Hilbert-space dimension accepted when building full matrices.
pub const MATRIX_DIM_LIMIT: usize = 3usize.pow(6) * 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub ions: usize,
    pub n_max: usize,
}

impl Layout {
    pub fn new(ions: usize, n_max: usize) -> Layout {
        Layout { ions, n_max }
    }

    pub fn modes(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.ions as u32) * self.modes()
    }

    pub fn stride(&self, ion: usize) -> usize {
        3usize.pow((self.ions - 1 - ion) as u32) * self.modes()
    }

    pub fn index(&self, levels: &[Level], n: usize) -> usize {
        debug_assert_eq!(levels.len(), self.ions);
        levels
            .iter()
            .enumerate()
            .map(|(i, &l)| l as usize * self.stride(i))
            .sum::<usize>()
            + n
    }

    pub fn level(&self, index: usize, ion: usize) -> Level {
        Level::from_index((index / self.stride(ion)) % 3)
    }

    pub fn fock(&self, index: usize) -> usize {
        index % self.modes()
    }

    /// Index of the computational basis state with qubit 0 as the most
    /// significant bit, mode in |n⟩.
    pub fn computational_index(&self, bits: usize, n: usize) -> usize {
        (0..self.ions)
            .filter(|&q| (bits >> (self.ions - 1 - q)) & 1 == 1)
            .map(|q| self.stride(q))
            .sum::<usize>()
            + n
    }

    /// `n|levels`, e.g. `1|geeg`.
    pub fn label(&self, index: usize) -> String {
        let levels: String = (0..self.ions).map(|i| self.level(index, i).symbol()).collect();
        format!("{}|{}", self.fock(index), levels)
    }

    /// Number of ions in |f⟩.
    pub fn f_count(&self, index: usize) -> usize {
        (0..self.ions).filter(|&i| self.level(index, i) == Level::F).count()
    }
}

/// Two-level blocks coupled by a sideband or carrier pulse: (upper, lower,
/// coupling scale). Upper is |n⟩|g⟩ for sidebands and |g⟩ for carriers.
pub(crate) fn coupled_pairs(layout: &Layout, op: &PulseOp) -> Vec<(usize, usize, f64)> {
    let stride = layout.stride(op.ion);
    let mut out = Vec::new();
    for idx in 0..layout.dim() {
        if layout.level(idx, op.ion) != Level::G {
            continue;
        }
        match op.kind.sideband_partner() {
            Some(partner) => {
                let n = layout.fock(idx);
                if n >= 1 {
                    out.push((idx, idx + partner as usize * stride - 1, (n as f64).sqrt()));
                }
            }
            None => out.push((idx, idx + stride, 1.0)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub layout: Layout,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn zeros(layout: Layout) -> StateVector {
        StateVector {
            layout,
            amps: vec![C64::new(0.0, 0.0); layout.dim()],
        }
    }

    pub fn basis(layout: Layout, index: usize) -> StateVector {
        let mut s = Self::zeros(layout);
        s.amps[index] = C64::new(1.0, 0.0);
        s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Population with the mode at its cutoff.
    pub fn cutoff_population(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.layout.fock(*i) == self.layout.n_max)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Nonzero amplitudes as (label, amplitude).
    pub fn support(&self, tol: f64) -> Vec<(String, C64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, a)| (self.layout.label(i), *a))
            .collect()
    }
}

fn target_matrix(op: &PulseOp, table: &LabelTable) -> Result<CMatrix> {
    let label = op.label.as_deref().unwrap_or("");
    let m = table.resolve(label)?;
    if m.nrows() != 1 << op.targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "`{label}` has dimension {} but acts on {} ions",
            m.nrows(),
            op.targets.len()
        )));
    }
    Ok(m)
}

/// Apply `m` to the {g,e} subspace of `targets` wherever `control` is in e.
pub(crate) fn apply_controlled(amps: &mut [C64], layout: &Layout, control: usize, targets: &[usize], m: &CMatrix) {
    let k = targets.len();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|b| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| (b >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &t)| layout.stride(t))
                .sum()
        })
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); 1 << k];
    for base in 0..layout.dim() {
        if layout.level(base, control) != Level::E || targets.iter().any(|&t| layout.level(base, t) != Level::G) {
            continue;
        }
        if offsets.iter().all(|&o| amps[base + o] == C64::new(0.0, 0.0)) {
            continue;
        }
        for (r, slot) in buf.iter_mut().enumerate() {
            *slot = (0..1 << k).map(|c| m[(r, c)] * amps[base + offsets[c]]).sum();
        }
        for (o, v) in offsets.iter().zip(&buf) {
            amps[base + o] = *v;
        }
    }
}

/// Apply one pulse's ideal unitary in place.
pub fn apply_pulse(psi: &mut StateVector, op: &PulseOp, table: &LabelTable) -> Result<()> {
    let layout = psi.layout;
    if let Some(ion) = op.ions().find(|&i| i >= layout.ions) {
        return Err(Error::IonOutOfRange {
            index: 0,
            ion,
            ion_count: layout.ions,
        });
    }
    match op.kind {
        PulseKind::ZGate => {
            for (i, a) in psi.amps.iter_mut().enumerate() {
                if layout.level(i, op.ion) == Level::E {
                    *a = -*a;
                }
            }
        }
        PulseKind::TargetUnitary => {
            let m = target_matrix(op, table)?;
            apply_controlled(&mut psi.amps, &layout, op.ion, &op.targets, &m);
        }
        _ => {
            let mut cache: Vec<(f64, nalgebra::Matrix2<C64>)> = Vec::new();
            for (u, l, scale) in coupled_pairs(&layout, op) {
                let (a, b) = (psi.amps[u], psi.amps[l]);
                if a == C64::new(0.0, 0.0) && b == C64::new(0.0, 0.0) {
                    continue;
                }
                let m = match cache.iter().find(|(s, _)| *s == scale) {
                    Some((_, m)) => *m,
                    None => {
                        let n = (scale * scale).round() as usize;
                        let m = pulse_block_unitary(op.kind, op.theta, op.phi, n.max(1))?;
                        cache.push((scale, m));
                        m
                    }
                };
                psi.amps[u] = m[(0, 0)] * a + m[(0, 1)] * b;
                psi.amps[l] = m[(1, 0)] * a + m[(1, 1)] * b;
            }
        }
    }
    Ok(())
}

pub fn run_schedule(psi: &mut StateVector, s: &Schedule, table: &LabelTable) -> Result<()> {
    s.pulses.iter().try_for_each(|op| apply_pulse(psi, op, table))
}

fn check_layout(s: &Schedule, n_max: usize) -> Result<Layout> {
    s.validate()?;
    let layout = Layout::new(s.ion_count, n_max);
    if s.ion_count > 8 || layout.dim() > MATRIX_DIM_LIMIT {
        return Err(Error::DimensionOverflow {
            dim: layout.dim(),
            limit: MATRIX_DIM_LIMIT,
        });
    }
    Ok(layout)
}

/// Full unitary of a schedule, one column per basis state.
pub fn schedule_unitary(s: &Schedule, n_max: usize, table: &LabelTable, exec: Execution) -> Result<CMatrix> {
    let layout = check_layout(s, n_max)?;
    let dim = layout.dim();
    let cols = map_indexed(dim, exec, |c| {
        let mut psi = StateVector::basis(layout, c);
        run_schedule(&mut psi, s, table).map(|_| psi.amps)
    });
    let mut m = CMatrix::zeros(dim, dim);
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col?.into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// A schedule restricted to computational ⊗ |0⟩ inputs and outputs.
#[derive(Clone, Debug)]
pub struct ComputationalBlock {
    pub matrix: CMatrix,
    /// Largest probability, over inputs, of ending outside the block.
    pub leakage: f64,
    /// Largest population left at the Fock cutoff.
    pub cutoff_population: f64,
}

pub fn computational_block(s: &Schedule, n_max: usize, table: &LabelTable, exec: Execution) -> Result<ComputationalBlock> {
    let layout = check_layout(s, n_max)?;
    let q = s.ion_count;
    let dim = 1usize << q;
    let cols = map_indexed(dim, exec, |c| {
        let mut psi = StateVector::basis(layout, layout.computational_index(c, 0));
        run_schedule(&mut psi, s, table).map(|_| psi)
    });
    let mut matrix = CMatrix::zeros(dim, dim);
    let (mut leakage, mut cutoff) = (0.0f64, 0.0f64);
    for (c, psi) in cols.into_iter().enumerate() {
        let psi = psi?;
        let mut kept = 0.0;
        for r in 0..dim {
            let a = psi.amps[layout.computational_index(r, 0)];
            matrix[(r, c)] = a;
            kept += a.norm_sqr();
        }
        leakage = leakage.max(psi.norm_sqr() - kept);
        cutoff = cutoff.max(psi.cutoff_population());
    }
    Ok(ComputationalBlock {
        matrix,
        leakage: leakage.max(0.0),
        cutoff_population: cutoff,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equivalence {
    pub equal: bool,
    /// α with U ≈ e^{iα} V, in (−π, π].
    pub phase: f64,
    pub deviation: f64,
}

/// Compare two matrices up to a global phase taken from the largest entry
/// of `u`.
pub fn equiv_up_to_global_phase(u: &CMatrix, v: &CMatrix, tol: f64) -> Equivalence {
    let fail = Equivalence {
        equal: false,
        phase: 0.0,
        deviation: f64::INFINITY,
    };
    if u.shape() != v.shape() {
        return fail;
    }
    let Some((k, _)) = u
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    else {
        return Equivalence {
            equal: true,
            phase: 0.0,
            deviation: 0.0,
        };
    };
    if v[k].norm() < 1e-12 {
        return fail;
    }
    let phase = (u[k] / v[k]).arg();
    let rot = C64::from_polar(1.0, phase);
    let deviation = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| (a - rot * b).norm())
        .fold(0.0, f64::max);
    Equivalence {
        equal: deviation < tol,
        phase,
        deviation,
    }
}
