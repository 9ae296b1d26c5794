//! Peephole removal of mutually inverse pulse pairs.

use crate::model::{PulseKind, PulseOp, Schedule};

fn same_angle(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

/// True when `b · a` is the identity up to a global phase.
pub fn inverse_pair(a: &PulseOp, b: &PulseOp) -> bool {
    if a.ion != b.ion || a.kind != b.kind {
        return false;
    }
    match a.kind {
        PulseKind::Rsb | PulseKind::RsbAux => {
            a.phi.congruent(b.phi) && same_angle(a.theta.0, -b.theta.0) && a.theta.0 != 0.0
        }
        PulseKind::Carrier => {
            (same_angle(a.theta.0, -b.theta.0) && a.phi.congruent(b.phi))
                || (same_angle(a.theta.0, b.theta.0) && a.phi.congruent(b.phi + crate::model::Angle::PI))
        }
        // (−iX)² = −I.
        PulseKind::XGate | PulseKind::ZGate => true,
        PulseKind::TargetUnitary => false,
    }
}

/// Conservative commutation test on supports: disjoint ions, and at most one
/// of the two touches the shared mode.
pub fn commutes(a: &PulseOp, b: &PulseOp) -> bool {
    if a.touches_mode() && b.touches_mode() {
        return false;
    }
    !a.ions().any(|i| b.ions().any(|j| i == j))
}

fn find_pair(pulses: &[PulseOp]) -> Option<(usize, usize)> {
    for (i, a) in pulses.iter().enumerate() {
        for (j, b) in pulses.iter().enumerate().skip(i + 1) {
            if inverse_pair(a, b) {
                return Some((i, j));
            }
            if !commutes(a, b) {
                break;
            }
        }
    }
    None
}

/// Remove inverse pairs until none remain, always taking the leftmost one.
/// A pair may be separated by pulses that commute with its first member.
pub fn cancel_pulses(s: &Schedule) -> Schedule {
    let mut pulses = s.pulses.clone();
    while let Some((i, j)) = find_pair(&pulses) {
        pulses.remove(j);
        pulses.remove(i);
    }
    Schedule {
        pulses,
        ion_count: s.ion_count,
        metadata: s.metadata.clone(),
    }
}
