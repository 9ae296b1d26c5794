use crate::circuit::{GateSpec, Gauge, Sign};
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, pauli};
use crate::model::{Angle, PulseOp, Schedule};

/// The four sign variants of the Cirac-Zoller N-Toffoli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ToffoliVariant {
    /// +π encode, +π decode.
    B,
    /// −π encode, −π decode.
    C,
    /// +π encode, −π decode.
    D,
    /// −π encode, +π decode.
    E,
}

impl ToffoliVariant {
    pub const ALL: [ToffoliVariant; 4] = [Self::B, Self::C, Self::D, Self::E];

    pub fn gauge(self) -> Gauge {
        match self {
            Self::B => Gauge::from_bits(0, 0),
            Self::C => Gauge::from_bits(1, 1),
            Self::D => Gauge::from_bits(0, 1),
            Self::E => Gauge::from_bits(1, 0),
        }
    }

    pub fn from_gauge(g: Gauge) -> ToffoliVariant {
        match g.bits() {
            (0, 0) => Self::B,
            (1, 1) => Self::C,
            (0, 1) => Self::D,
            _ => Self::E,
        }
    }
}

fn sideband(position: usize, ion: usize, sign: Sign) -> PulseOp {
    // Only the first control uses the g↔e sideband; the rest shelve into f.
    if position == 0 {
        PulseOp::rsb(ion, sign.pi())
    } else {
        PulseOp::rsb_aux(ion, sign.pi())
    }
}

fn encode(controls: &[usize], sign: Sign) -> impl Iterator<Item = PulseOp> + '_ {
    controls.iter().enumerate().map(move |(i, &q)| sideband(i, q, sign))
}

fn decode(controls: &[usize], sign: Sign) -> impl Iterator<Item = PulseOp> + '_ {
    controls.iter().enumerate().rev().map(move |(i, &q)| sideband(i, q, sign))
}

/// Cirac-Zoller Toffoli on explicit ions: encode the controls into a phonon,
/// a 2π auxiliary sideband on the target between two π/2 carriers, decode.
pub fn toffoli_pulses(controls: &[usize], target: usize, gauge: Gauge) -> Vec<PulseOp> {
    let minus = Angle(-0.5);
    let plus = Angle::HALF_PI;
    // Equal signs leave −1 on the satisfied branch, opposite signs leave +1;
    // the carrier order absorbs the difference.
    let (first, second) = if gauge.encode == gauge.decode {
        (minus, plus)
    } else {
        (plus, minus)
    };
    let mut out: Vec<PulseOp> = encode(controls, gauge.encode).collect();
    out.push(PulseOp::carrier(target, Angle::HALF_PI, first));
    out.push(PulseOp::rsb_aux(target, Angle::PI));
    out.push(PulseOp::rsb_aux(target, Angle::PI));
    out.push(PulseOp::carrier(target, Angle::HALF_PI, second));
    out.extend(decode(controls, gauge.decode));
    out
}

/// N-Toffoli on ions `0..N`: controls `0..N−1`, target `N−1`.
pub fn lower_toffoli(n: usize, variant: ToffoliVariant) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("an N-Toffoli needs N ≥ 2, got {n}")));
    }
    let controls: Vec<usize> = (0..n - 1).collect();
    let mut s = Schedule::from_pulses(n, toffoli_pulses(&controls, n - 1, variant.gauge()))?;
    s.metadata.insert("gate".into(), format!("{n}-toffoli"));
    Ok(s)
}

/// Ancilla-free multi-controlled U on explicit ions.
///
/// Encode on all controls, move the phonon onto the last control with a
/// carrier π and a sideband, apply the controlled-U primitive from that
/// control, undo, decode in reverse order and fix the residual phase with a
/// Z on the last control when the two signs agree.
///
/// With a single control the carrier trick has no spare ion to act on, so
/// the four sidebands are applied in pairs on the control itself; each pair
/// is a 2π rotation and the phases cancel.
pub fn mc_gate_pulses(controls: &[usize], targets: &[usize], label: &str, gauge: Gauge) -> Vec<PulseOp> {
    let last = *controls.last().expect("at least one control");
    let cu = PulseOp::target_unitary(last, targets.to_vec(), label);
    if controls.len() == 1 {
        return vec![
            PulseOp::rsb(last, gauge.encode.pi()),
            PulseOp::rsb(last, gauge.encode.pi()),
            cu,
            PulseOp::rsb(last, gauge.decode.pi()),
            PulseOp::rsb(last, gauge.decode.pi()),
        ];
    }
    let mut out: Vec<PulseOp> = encode(controls, gauge.encode).collect();
    out.push(PulseOp::carrier(last, Angle::PI, gauge.encode.phase()));
    out.push(PulseOp::rsb(last, gauge.encode.pi()));
    out.push(cu);
    out.push(PulseOp::rsb(last, gauge.decode.pi()));
    out.push(PulseOp::carrier(last, Angle::PI, gauge.decode.phase()));
    out.extend(decode(controls, gauge.decode));
    if gauge.encode == gauge.decode {
        out.push(PulseOp::z(last));
    }
    out
}

pub fn lower_mc_gate(g: &GateSpec, gauge: Gauge) -> Result<Schedule> {
    if !g.controls.is_all_ones() {
        return Err(Error::ZeroControlsPresent(g.controls.to_string()));
    }
    Schedule::from_pulses(
        g.qubit_span(),
        mc_gate_pulses(&g.control_qubits, &g.target_qubits, &g.target_label, gauge),
    )
}

pub(crate) fn require_toffoli_target(g: &GateSpec) -> Result<usize> {
    let x = pauli('X').expect("X");
    if g.target_qubits.len() != 1 || max_abs_diff(&g.target_matrix, &x) > 1e-12 {
        return Err(Error::UnsupportedTarget(format!(
            "Toffoli lowering needs a single-qubit X target, got `{}`",
            g.target_label
        )));
    }
    Ok(g.target_qubits[0])
}
