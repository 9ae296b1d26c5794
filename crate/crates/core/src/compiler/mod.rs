//! Lowering of logical gates to sideband pulse schedules, gauge assignment
//! across successive gates, and cancellation of redundant pulses.

mod cancel;
mod count;
mod lower;

pub use cancel::{cancel_pulses, commutes, inverse_pair};
pub use count::{c_index, predicted_pulse_count, CountReport};
pub use lower::{lower_mc_gate, lower_toffoli, mc_gate_pulses, toffoli_pulses, ToffoliVariant};

use crate::circuit::{expand_zero_controls, GateSequence, Gauge};
use crate::error::Result;
use crate::model::{PulseOp, Schedule};

/// Per-gate gauge choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeAssignment(pub Vec<Gauge>);

impl GaugeAssignment {
    /// Every boundary pairs a decoding sequence with an encoding sequence
    /// of the opposite sign.
    pub fn is_alternating(&self) -> bool {
        self.0.windows(2).all(|w| w[0].decode != w[1].encode)
    }
}

/// Every gate gets (s₁, s₂) = (0, 1), which satisfies the alternation
/// constraint at each boundary.
pub fn assign_gauges(seq: &GateSequence) -> GaugeAssignment {
    GaugeAssignment(vec![Gauge::from_bits(0, 1); seq.len()])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoweringStyle {
    /// Ancilla-free construction around an opaque single-controlled U.
    #[default]
    ControlledUnitary,
    /// Phonon-mediated Toffoli with π/2 carriers on the target; X targets only.
    Toffoli,
}

impl LoweringStyle {
    pub fn name(self) -> &'static str {
        match self {
            LoweringStyle::ControlledUnitary => "controlled-unitary",
            LoweringStyle::Toffoli => "toffoli",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompileOptions {
    pub optimize: bool,
    pub style: LoweringStyle,
}

impl CompileOptions {
    pub fn optimized(style: LoweringStyle) -> Self {
        CompileOptions { optimize: true, style }
    }

    pub fn standard(style: LoweringStyle) -> Self {
        CompileOptions { optimize: false, style }
    }
}

/// Expand zero-controls, choose gauges, lower every gate, concatenate and,
/// when optimizing, cancel inverse pairs.
///
/// Without optimization every gate uses (0, 0).
pub fn compile(seq: &GateSequence, opts: CompileOptions) -> Result<Schedule> {
    let gauges = if opts.optimize {
        assign_gauges(seq)
    } else {
        GaugeAssignment(vec![Gauge::from_bits(0, 0); seq.len()])
    };
    let mut pulses = Vec::new();
    for (g, &gauge) in seq.gates.iter().zip(&gauges.0) {
        let gauge = g.gauge.filter(|_| !opts.optimize).unwrap_or(gauge);
        let exp = expand_zero_controls(g);
        pulses.extend(exp.pre_x.iter().map(|&q| PulseOp::x(q)));
        match opts.style {
            LoweringStyle::ControlledUnitary => pulses.extend(lower_mc_gate(&exp.core, gauge)?.pulses),
            LoweringStyle::Toffoli => {
                let target = lower::require_toffoli_target(&exp.core)?;
                pulses.extend(toffoli_pulses(&exp.core.control_qubits, target, gauge));
            }
        }
        pulses.extend(exp.post_x.iter().map(|&q| PulseOp::x(q)));
    }
    let mut s = Schedule::from_pulses(seq.qubit_count(), pulses)?;
    s.metadata.insert("optimize".into(), opts.optimize.to_string());
    s.metadata.insert("style".into(), opts.style.name().into());
    s.metadata.insert("gates".into(), seq.len().to_string());
    Ok(if opts.optimize { cancel_pulses(&s) } else { s })
}
