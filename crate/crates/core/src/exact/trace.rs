//! Step-by-step traces of the 3-control construction on representative
//! inputs.

use crate::circuit::Gauge;
use crate::compiler::mc_gate_pulses;
use crate::error::{Error, Result};
use crate::labels::LabelTable;
use crate::linalg::CMatrix;
use crate::model::{Level, Schedule, C64};

use super::{run_schedule, Layout, StateVector};

/// Control levels of the representative input for cases 1 to 6.
pub const CASE_INPUTS: [[Level; 3]; 6] = {
    use Level::{E, G};
    [[G, E, G], [G, E, E], [E, G, G], [E, G, E], [E, E, G], [E, E, E]]
};

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub basis_label: String,
    pub amplitude: C64,
}

#[derive(Clone, Debug)]
pub struct CaseTrace {
    pub case: usize,
    pub gauge: Gauge,
    pub input: StateVector,
    /// State after steps 1 to 4.
    pub steps: Vec<StateVector>,
}

impl CaseTrace {
    pub fn records(&self, tol: f64) -> Vec<TraceRecord> {
        self.steps
            .iter()
            .enumerate()
            .flat_map(|(k, s)| {
                s.support(tol).into_iter().map(move |(basis_label, amplitude)| TraceRecord {
                    step: k + 1,
                    basis_label,
                    amplitude,
                })
            })
            .collect()
    }
}

/// Run a 3-controlled `u` on ions 0..3 (target ion 3) for the given case,
/// with the target starting in `psi`, and keep the state at each step
/// boundary: after encoding, after the conditional operation, after
/// decoding, and after the phase correction.
pub fn trace_case(case: usize, gauge: Gauge, u: &CMatrix, psi: [C64; 2]) -> Result<CaseTrace> {
    if !(1..=6).contains(&case) {
        return Err(Error::InvalidArgument(format!("case must be 1..=6, got {case}")));
    }
    let mut table = LabelTable::new();
    table.insert("U", u.clone())?;
    let pulses = mc_gate_pulses(&[0, 1, 2], &[3], "U", gauge);
    let bounds = [3, 8, 11, pulses.len()];
    let layout = Layout::new(4, 2);
    let mut state = StateVector::zeros(layout);
    let controls = CASE_INPUTS[case - 1];
    for (t, &a) in [Level::G, Level::E].iter().zip(&psi) {
        let levels = [controls[0], controls[1], controls[2], *t];
        state.amps[layout.index(&levels, 0)] = a;
    }
    let input = state.clone();
    let mut steps = Vec::with_capacity(4);
    let mut start = 0;
    for end in bounds {
        let part = Schedule::from_pulses(4, pulses[start..end].to_vec())?;
        run_schedule(&mut state, &part, &table)?;
        steps.push(state.clone());
        start = end;
    }
    Ok(CaseTrace {
        case,
        gauge,
        input,
        steps,
    })
}

// Keeps `-0.000…` out of the text.
fn clean(x: f64) -> f64 {
    if x.abs() < 5e-13 {
        0.0
    } else {
        x
    }
}

/// One `step,basis_label,amplitude_re,amplitude_im` line per nonzero amplitude.
pub fn trace_text(t: &CaseTrace) -> String {
    let mut out = String::from("step,basis_label,amplitude_re,amplitude_im\n");
    for r in t.records(1e-12) {
        out.push_str(&format!(
            "{},{},{:.12},{:.12}\n",
            r.step,
            r.basis_label,
            clean(r.amplitude.re),
            clean(r.amplitude.im)
        ));
    }
    out
}
