//! Physical primitives: ion levels, pulse operations, schedules and the
//! analytic single-pulse unitaries.
//!
//! Angles are stored in units of π so that the ±π pulses produced by the
//! compiler compare exactly and serialize without loss.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Internal level of a single ion. `G` and `E` span the qubit, `F` is the
/// auxiliary shelving level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    G = 0,
    E = 1,
    F = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::E, Level::F];

    pub fn from_index(i: usize) -> Level {
        match i {
            0 => Level::G,
            1 => Level::E,
            2 => Level::F,
            _ => panic!("level index {i} out of range"),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Level::G => 'g',
            Level::E => 'e',
            Level::F => 'f',
        }
    }

    pub fn from_symbol(c: char) -> Option<Level> {
        match c {
            'g' => Some(Level::G),
            'e' => Some(Level::E),
            'f' => Some(Level::F),
            _ => None,
        }
    }
}

/// Laser and trap parameters shared by every pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams {
    /// Carrier Rabi frequency Ω in rad/s.
    pub rabi_frequency: f64,
    /// Lamb-Dicke parameter η.
    pub lamb_dicke: f64,
    /// Highest retained Fock state.
    pub fock_cutoff: usize,
}

impl PhysParams {
    pub fn new(rabi_frequency: f64, lamb_dicke: f64, fock_cutoff: usize) -> Result<Self> {
        let p = PhysParams {
            rabi_frequency,
            lamb_dicke,
            fock_cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rabi_frequency.is_finite() || self.rabi_frequency <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "rabi frequency must be positive, got {}",
                self.rabi_frequency
            )));
        }
        if !(self.lamb_dicke > 0.0 && self.lamb_dicke < 1.0) {
            return Err(Error::InvalidParams(format!(
                "Lamb-Dicke parameter must lie in (0, 1), got {}",
                self.lamb_dicke
            )));
        }
        if self.fock_cutoff < 1 {
            return Err(Error::InvalidParams("Fock cutoff must be at least 1".into()));
        }
        Ok(())
    }

    /// Sideband Rabi rate Ωη in rad/s.
    pub fn sideband_rate(&self) -> f64 {
        self.rabi_frequency * self.lamb_dicke
    }
}

impl Default for PhysParams {
    /// Ω/2π = 0.2 MHz, η = 0.1, n_max = 10.
    fn default() -> Self {
        PhysParams {
            rabi_frequency: 2.0 * PI * 0.2e6,
            lamb_dicke: 0.1,
            fock_cutoff: 10,
        }
    }
}

/// An angle expressed as a multiple of π.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Angle(pub f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const PI: Angle = Angle(1.0);
    pub const HALF_PI: Angle = Angle(0.5);

    pub fn from_pi_multiple(x: f64) -> Angle {
        Angle(x)
    }

    pub fn from_radians(r: f64) -> Angle {
        Angle(r / PI)
    }

    pub fn over_pi(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 * PI
    }

    pub fn abs(self) -> Angle {
        Angle(self.0.abs())
    }

    /// True when the two angles agree modulo 2π.
    pub fn congruent(self, other: Angle) -> bool {
        let d = (self.0 - other.0).rem_euclid(2.0);
        d < 1e-12 || (2.0 - d) < 1e-12
    }
}

impl std::ops::Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle(-self.0)
    }
}

impl std::ops::Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle(self.0 + rhs.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseKind {
    /// Red sideband on the g↔e transition.
    Rsb,
    /// Red sideband on the g↔f transition.
    RsbAux,
    /// Carrier rotation R(θ, φ) on {g, e}.
    Carrier,
    /// Virtual Z on {g, e}; f untouched.
    ZGate,
    /// Opaque controlled unitary, conditioned on `ion` being in e.
    TargetUnitary,
    /// Carrier π pulse with φ = 0.
    XGate,
}

impl PulseKind {
    pub fn name(self) -> &'static str {
        match self {
            PulseKind::Rsb => "RSB",
            PulseKind::RsbAux => "RSB_AUX",
            PulseKind::Carrier => "CARRIER",
            PulseKind::ZGate => "ZGATE",
            PulseKind::TargetUnitary => "TARGET_UNITARY",
            PulseKind::XGate => "XGATE",
        }
    }

    pub fn from_name(s: &str) -> Option<PulseKind> {
        Some(match s {
            "RSB" => PulseKind::Rsb,
            "RSB_AUX" => PulseKind::RsbAux,
            "CARRIER" => PulseKind::Carrier,
            "ZGATE" => PulseKind::ZGate,
            "TARGET_UNITARY" => PulseKind::TargetUnitary,
            "XGATE" => PulseKind::XGate,
            _ => return None,
        })
    }

    pub fn is_sideband(self) -> bool {
        matches!(self, PulseKind::Rsb | PulseKind::RsbAux)
    }

    /// Level that the sideband couples to g with one phonon fewer.
    pub(crate) fn sideband_partner(self) -> Option<Level> {
        match self {
            PulseKind::Rsb => Some(Level::E),
            PulseKind::RsbAux => Some(Level::F),
            _ => None,
        }
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One timed primitive addressed to an ion.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseOp {
    pub kind: PulseKind,
    pub ion: usize,
    pub theta: Angle,
    pub phi: Angle,
    /// Names the unitary for `TargetUnitary`.
    pub label: Option<String>,
    /// Target register of a `TargetUnitary`; empty otherwise.
    pub targets: Vec<usize>,
}

impl PulseOp {
    fn basic(kind: PulseKind, ion: usize, theta: Angle, phi: Angle) -> PulseOp {
        PulseOp {
            kind,
            ion,
            theta,
            phi,
            label: None,
            targets: Vec::new(),
        }
    }

    pub fn rsb(ion: usize, theta: Angle) -> PulseOp {
        Self::basic(PulseKind::Rsb, ion, theta, Angle::ZERO)
    }

    pub fn rsb_aux(ion: usize, theta: Angle) -> PulseOp {
        Self::basic(PulseKind::RsbAux, ion, theta, Angle::ZERO)
    }

    pub fn carrier(ion: usize, theta: Angle, phi: Angle) -> PulseOp {
        Self::basic(PulseKind::Carrier, ion, theta, phi)
    }

    pub fn x(ion: usize) -> PulseOp {
        Self::basic(PulseKind::XGate, ion, Angle::PI, Angle::ZERO)
    }

    pub fn z(ion: usize) -> PulseOp {
        Self::basic(PulseKind::ZGate, ion, Angle::ZERO, Angle::ZERO)
    }

    pub fn target_unitary(control: usize, targets: Vec<usize>, label: impl Into<String>) -> PulseOp {
        PulseOp {
            kind: PulseKind::TargetUnitary,
            ion: control,
            theta: Angle::ZERO,
            phi: Angle::ZERO,
            label: Some(label.into()),
            targets,
        }
    }

    /// Every ion this operation acts on.
    pub fn ions(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.ion).chain(self.targets.iter().copied())
    }

    pub fn touches_mode(&self) -> bool {
        self.kind.is_sideband()
    }
}

/// Ordered pulse sequence; the compiler's output and the simulators' input.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Schedule {
    pub pulses: Vec<PulseOp>,
    pub ion_count: usize,
    pub metadata: BTreeMap<String, String>,
}

impl Schedule {
    pub fn new(ion_count: usize) -> Schedule {
        Schedule {
            pulses: Vec::new(),
            ion_count,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_pulses(ion_count: usize, pulses: Vec<PulseOp>) -> Result<Schedule> {
        let s = Schedule {
            pulses,
            ion_count,
            metadata: BTreeMap::new(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (index, p) in self.pulses.iter().enumerate() {
            if let Some(ion) = p.ions().find(|&i| i >= self.ion_count) {
                return Err(Error::IonOutOfRange {
                    index,
                    ion,
                    ion_count: self.ion_count,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn count(&self, kind: PulseKind) -> usize {
        self.pulses.iter().filter(|p| p.kind == kind).count()
    }

    /// Number of sideband pulses of either flavour.
    pub fn rsb_count(&self) -> usize {
        self.pulses.iter().filter(|p| p.kind.is_sideband()).count()
    }

    /// Concatenate `k` copies of this schedule.
    pub fn repeated(&self, k: usize) -> Schedule {
        let mut out = self.clone();
        out.pulses = (0..k).flat_map(|_| self.pulses.iter().cloned()).collect();
        out
    }

    /// Reverse order with every rotation inverted.
    pub fn inverse(&self) -> Schedule {
        let mut out = self.clone();
        out.pulses = self
            .pulses
            .iter()
            .rev()
            .map(|p| {
                let mut q = p.clone();
                if matches!(p.kind, PulseKind::Rsb | PulseKind::RsbAux | PulseKind::Carrier) {
                    q.theta = -p.theta;
                }
                q
            })
            .collect();
        out
    }
}

/// Duration of a sideband pulse: |θ| / (Ωη).
pub fn rsb_pulse_duration(theta: Angle, p: &PhysParams) -> f64 {
    theta.radians().abs() / p.sideband_rate()
}

/// Duration of a carrier pulse: |θ| / Ω.
pub fn carrier_pulse_duration(theta: Angle, p: &PhysParams) -> f64 {
    theta.radians().abs() / p.rabi_frequency
}

/// Durations for the operations that are not plain square pulses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimingPolicy {
    /// Z is virtual by default.
    pub z_duration: f64,
    /// `None` means a carrier π pulse.
    pub x_duration: Option<f64>,
    pub target_durations: HashMap<String, f64>,
}

impl TimingPolicy {
    pub fn with_target(mut self, label: impl Into<String>, duration: f64) -> Self {
        self.target_durations.insert(label.into(), duration);
        self
    }

    pub fn pulse_duration(&self, op: &PulseOp, p: &PhysParams) -> Result<f64> {
        Ok(match op.kind {
            PulseKind::Rsb | PulseKind::RsbAux => rsb_pulse_duration(op.theta, p),
            PulseKind::Carrier => carrier_pulse_duration(op.theta, p),
            PulseKind::XGate => self
                .x_duration
                .unwrap_or_else(|| carrier_pulse_duration(Angle::PI, p)),
            PulseKind::ZGate => self.z_duration,
            PulseKind::TargetUnitary => {
                let label = op.label.as_deref().unwrap_or("");
                *self
                    .target_durations
                    .get(label)
                    .ok_or_else(|| Error::MissingDuration(label.to_string()))?
            }
        })
    }
}

/// Total time with pulses run back to back.
pub fn schedule_duration(s: &Schedule, p: &PhysParams, policy: &TimingPolicy) -> Result<f64> {
    s.pulses.iter().try_fold(0.0, |acc, op| Ok(acc + policy.pulse_duration(op, p)?))
}

/// Exact 2×2 propagator of a pulse on its coupled block.
///
/// Sidebands use the basis (|n⟩|g⟩, |n−1⟩|e or f⟩) and pick up the √n
/// enhancement; `n = 0` gives the identity since |0⟩|g⟩ is uncoupled.
/// Carriers use (|g⟩, |e⟩) and ignore `n`.
pub fn pulse_block_unitary(kind: PulseKind, theta: Angle, phi: Angle, n: usize) -> Result<Matrix2<C64>> {
    let scale = match kind {
        PulseKind::Rsb | PulseKind::RsbAux => (n as f64).sqrt(),
        PulseKind::Carrier | PulseKind::XGate => 1.0,
        PulseKind::ZGate | PulseKind::TargetUnitary => return Err(Error::NoBlockForm(kind.name())),
    };
    let (theta, phi) = match kind {
        PulseKind::XGate => (Angle::PI, Angle::ZERO),
        _ => (theta, phi),
    };
    Ok(rotation_block(scale * theta.radians(), phi.radians()))
}

/// exp(−i a/2 (e^{−iφ}|0⟩⟨1| + e^{iφ}|1⟩⟨0|)).
pub(crate) fn rotation_block(angle: f64, phi: f64) -> Matrix2<C64> {
    let c = C64::new((angle / 2.0).cos(), 0.0);
    let s = (angle / 2.0).sin();
    let up = -I * C64::from_polar(1.0, -phi) * s;
    let down = -I * C64::from_polar(1.0, phi) * s;
    Matrix2::new(c, up, down, c)
}
