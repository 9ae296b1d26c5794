//! Logical multi-controlled gates and their ideal unitaries.
//!
//! Qubit 0 is the most significant bit of a computational basis index, which
//! matches the ion-major ordering used by the simulators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::labels::LabelTable;
use crate::linalg::{is_unitary, qubits_of, CMatrix};
use crate::model::{Angle, C64};

/// Control condition in pulse order: the first RSB pulse addresses the
/// leftmost bit. `false` ↔ g, `true` ↔ e.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ControlString(Vec<bool>);

impl ControlString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyControls);
        }
        Ok(ControlString(bits))
    }

    pub fn all_ones(n: usize) -> Self {
        ControlString(vec![true; n])
    }

    /// `n`-bit binary of `value`, most significant bit first.
    pub fn binary(value: usize, n: usize) -> Self {
        ControlString((0..n).rev().map(|j| (value >> j) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&b| b)
    }
}

impl FromStr for ControlString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' | 'g' => Ok(false),
                '1' | 'e' => Ok(true),
                _ => Err(Error::InvalidControls(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        ControlString::new(bits)
    }
}

impl fmt::Display for ControlString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Sign of a π pulse sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bit(s: u8) -> Sign {
        if s & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    /// (−1)^s · π.
    pub fn pi(self) -> Angle {
        match self {
            Sign::Plus => Angle::PI,
            Sign::Minus => -Angle::PI,
        }
    }

    /// s · π, the carrier phase used next to a sequence of this sign.
    pub fn phase(self) -> Angle {
        match self {
            Sign::Plus => Angle::ZERO,
            Sign::Minus => Angle::PI,
        }
    }
}

/// RSB sign choice (s₁, s₂) for the encoding and decoding sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gauge {
    pub encode: Sign,
    pub decode: Sign,
}

impl Gauge {
    pub fn from_bits(s1: u8, s2: u8) -> Gauge {
        Gauge {
            encode: Sign::from_bit(s1),
            decode: Sign::from_bit(s2),
        }
    }

    pub fn bits(self) -> (u8, u8) {
        (self.encode.bit(), self.decode.bit())
    }

    /// The four sign choices in (0,0), (1,1), (0,1), (1,0) order.
    pub fn all() -> [Gauge; 4] {
        [
            Gauge::from_bits(0, 0),
            Gauge::from_bits(1, 1),
            Gauge::from_bits(0, 1),
            Gauge::from_bits(1, 0),
        ]
    }
}

/// A logical multi-controlled gate with its qubit wiring.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub controls: ControlString,
    /// Qubit addressed by each control bit, in pulse order.
    pub control_qubits: Vec<usize>,
    pub target_label: String,
    pub target_matrix: CMatrix,
    pub target_qubits: Vec<usize>,
    pub gauge: Option<Gauge>,
}

/// Build a gate on the default wiring: controls on qubits `0..N`, target
/// register on the qubits that follow.
pub fn make_multi_controlled(controls: &str, label: &str, target: CMatrix) -> Result<GateSpec> {
    let controls: ControlString = controls.parse()?;
    GateSpec::new(controls, label, target)
}

impl GateSpec {
    pub fn new(controls: ControlString, label: &str, target: CMatrix) -> Result<GateSpec> {
        if !is_unitary(&target, 1e-12) {
            return Err(Error::NotUnitary(label.to_string()));
        }
        let k = qubits_of(&target)
            .ok_or_else(|| Error::DimensionMismatch(format!("target `{label}` is not a qubit operator")))?;
        let n = controls.len();
        Ok(GateSpec {
            controls,
            control_qubits: (0..n).collect(),
            target_label: label.to_string(),
            target_matrix: target,
            target_qubits: (n..n + k).collect(),
            gauge: None,
        })
    }

    pub fn from_label(controls: &str, label: &str, table: &LabelTable) -> Result<GateSpec> {
        make_multi_controlled(controls, label, table.resolve(label)?)
    }

    pub fn with_wiring(mut self, control_qubits: Vec<usize>, target_qubits: Vec<usize>) -> Result<GateSpec> {
        if control_qubits.len() != self.controls.len() {
            return Err(Error::LengthMismatch(control_qubits.len(), self.controls.len()));
        }
        if target_qubits.len() != self.target_qubits.len() {
            return Err(Error::LengthMismatch(target_qubits.len(), self.target_qubits.len()));
        }
        let mut all: Vec<usize> = control_qubits.iter().chain(&target_qubits).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("gate wiring repeats a qubit".into()));
        }
        self.control_qubits = control_qubits;
        self.target_qubits = target_qubits;
        Ok(self)
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> GateSpec {
        self.gauge = Some(gauge);
        self
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    /// One past the highest qubit index used.
    pub fn qubit_span(&self) -> usize {
        self.control_qubits
            .iter()
            .chain(&self.target_qubits)
            .max()
            .map_or(0, |&m| m + 1)
    }
}

/// Gates applied in order, all with the same number of controls and the
/// same target dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSequence {
    pub gates: Vec<GateSpec>,
}

impl GateSequence {
    pub fn new(gates: Vec<GateSpec>) -> Result<GateSequence> {
        if let Some(first) = gates.first() {
            for g in &gates[1..] {
                if g.n_controls() != first.n_controls() {
                    return Err(Error::LengthMismatch(first.n_controls(), g.n_controls()));
                }
                if g.target_matrix.nrows() != first.target_matrix.nrows() {
                    return Err(Error::DimensionMismatch(format!(
                        "target `{}` has dimension {} but `{}` has {}",
                        g.target_label,
                        g.target_matrix.nrows(),
                        first.target_label,
                        first.target_matrix.nrows()
                    )));
                }
            }
        }
        Ok(GateSequence { gates })
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn qubit_count(&self) -> usize {
        self.gates.iter().map(GateSpec::qubit_span).max().unwrap_or(0)
    }

    /// True when every gate uses the same control and target qubits.
    pub fn shares_wiring(&self) -> bool {
        self.gates.windows(2).all(|w| {
            w[0].control_qubits == w[1].control_qubits && w[0].target_qubits == w[1].target_qubits
        })
    }

    pub fn control_strings(&self) -> Vec<ControlString> {
        self.gates.iter().map(|g| g.controls.clone()).collect()
    }
}

/// A gate rewritten as X-conjugation of an all-ones controlled core.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroControlExpansion {
    /// Qubits that receive an X before the core.
    pub pre_x: Vec<usize>,
    pub core: GateSpec,
    /// Qubits that receive an X after the core; equal to `pre_x`.
    pub post_x: Vec<usize>,
}

pub fn expand_zero_controls(g: &GateSpec) -> ZeroControlExpansion {
    let flips: Vec<usize> = g
        .controls
        .bits()
        .iter()
        .zip(&g.control_qubits)
        .filter(|(&b, _)| !b)
        .map(|(_, &q)| q)
        .collect();
    let mut core = g.clone();
    core.controls = ControlString::all_ones(g.n_controls());
    ZeroControlExpansion {
        pre_x: flips.clone(),
        core,
        post_x: flips,
    }
}

/// N-controlled SWAP as three (N+2)-Toffoli gates.
///
/// Controls sit on qubits `0..N`, the swapped pair on `N` (a) and `N+1` (b).
/// The gates are CX(a→b), CX(b→a), CX(a→b), each also conditioned on all N
/// controls, with the swap qubit acting as the last control.
pub fn cswap_decomposition(n: usize) -> Result<GateSequence> {
    if n < 1 {
        return Err(Error::InvalidArgument("CSWAP needs at least one control".into()));
    }
    let x = crate::linalg::pauli('X').expect("X");
    let (a, b) = (n, n + 1);
    let gate = |ctrl: usize, targ: usize| -> Result<GateSpec> {
        let mut qubits: Vec<usize> = (0..n).collect();
        qubits.push(ctrl);
        GateSpec::new(ControlString::all_ones(n + 1), "X", x.clone())?.with_wiring(qubits, vec![targ])
    };
    GateSequence::new(vec![gate(a, b)?, gate(b, a)?, gate(a, b)?])
}

fn bit(index: usize, qubit: usize, total: usize) -> bool {
    (index >> (total - 1 - qubit)) & 1 == 1
}

/// Exact controlled-unitary matrix on `total_qubits` qubits.
pub fn ideal_unitary(g: &GateSpec, total_qubits: usize) -> Result<CMatrix> {
    if g.qubit_span() > total_qubits {
        return Err(Error::DimensionMismatch(format!(
            "gate spans {} qubits but only {} are available",
            g.qubit_span(),
            total_qubits
        )));
    }
    if total_qubits > 16 {
        return Err(Error::DimensionOverflow {
            dim: 1 << total_qubits.min(40),
            limit: 1 << 16,
        });
    }
    let dim = 1usize << total_qubits;
    let k = g.target_qubits.len();
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let active = g
            .controls
            .bits()
            .iter()
            .zip(&g.control_qubits)
            .all(|(&want, &q)| bit(col, q, total_qubits) == want);
        if !active {
            m[(col, col)] = C64::new(1.0, 0.0);
            continue;
        }
        let t_in = g
            .target_qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit(col, q, total_qubits) as usize);
        let mut cleared = col;
        for &q in &g.target_qubits {
            cleared &= !(1 << (total_qubits - 1 - q));
        }
        for t_out in 0..(1usize << k) {
            let mut row = cleared;
            for (j, &q) in g.target_qubits.iter().enumerate() {
                if (t_out >> (k - 1 - j)) & 1 == 1 {
                    row |= 1 << (total_qubits - 1 - q);
                }
            }
            m[(row, col)] = g.target_matrix[(t_out, t_in)];
        }
    }
    Ok(m)
}

/// Product of the gates' ideal unitaries, first gate applied first.
pub fn sequence_unitary(seq: &GateSequence, total_qubits: usize) -> Result<CMatrix> {
    let dim = 1usize << total_qubits;
    seq.gates.iter().try_fold(CMatrix::identity(dim, dim), |acc, g| {
        Ok(ideal_unitary(g, total_qubits)? * acc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, pauli};

    fn x() -> CMatrix {
        pauli('X').unwrap()
    }

    fn x_on(q: usize, total: usize) -> CMatrix {
        let mut m = CMatrix::identity(1, 1);
        for i in 0..total {
            let f = if i == q { x() } else { pauli('I').unwrap() };
            m = m.kronecker(&f);
        }
        m
    }

    fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for c in 0..dim {
            m[(f(c), c)] = C64::new(1.0, 0.0);
        }
        m
    }

    #[test]
    fn constructor_cases() {
        let g = make_multi_controlled("111", "X", x()).unwrap();
        assert_eq!(g.n_controls(), 3);
        assert_eq!(g.target_qubits, vec![3]);
        assert!(g.gauge.is_none());
        let g = make_multi_controlled("110", "X", x()).unwrap();
        assert!(!g.controls.bits()[2]);
        assert!(matches!(make_multi_controlled("", "X", x()), Err(Error::EmptyControls)));
        let bad = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(make_multi_controlled("1", "B", bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn toffoli_matrix() {
        let g = make_multi_controlled("11", "X", x()).unwrap();
        let expected = permutation(8, |c| if c >= 6 { c ^ 1 } else { c });
        assert_eq!(ideal_unitary(&g, 3).unwrap(), expected);
    }

    #[test]
    fn zero_control_sector_only() {
        let u = crate::labels::LabelTable::new().resolve("H").unwrap();
        let g = make_multi_controlled("10", "H", u.clone()).unwrap();
        let m = ideal_unitary(&g, 3).unwrap();
        // |e g⟩ controls = basis indices 4 and 5.
        for r in 0..8 {
            for c in 0..8 {
                let want = if (4..6).contains(&r) && (4..6).contains(&c) {
                    u[(r - 4, c - 4)]
                } else if r == c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((m[(r, c)] - want).norm() < 1e-15);
            }
        }
        assert!(ideal_unitary(&g, 2).is_err());
    }

    #[test]
    fn expansion_examples() {
        let g = make_multi_controlled("110", "X", x()).unwrap();
        let e = expand_zero_controls(&g);
        assert_eq!(e.pre_x, vec![2]);
        assert_eq!(e.post_x, vec![2]);
        assert!(e.core.controls.is_all_ones());
        let g = make_multi_controlled("111", "X", x()).unwrap();
        let e = expand_zero_controls(&g);
        assert!(e.pre_x.is_empty() && e.core == g);
        let g = make_multi_controlled("000", "X", x()).unwrap();
        assert_eq!(expand_zero_controls(&g).pre_x, vec![0, 1, 2]);
    }

    #[test]
    fn expansion_is_exact_for_all_short_strings() {
        let h = crate::labels::LabelTable::new().resolve("H").unwrap();
        for n in 1..=6usize {
            let total = n + 1;
            for v in 0..(1usize << n) {
                let g = GateSpec::new(ControlString::binary(v, n), "H", h.clone()).unwrap();
                let e = expand_zero_controls(&g);
                let mut conj = CMatrix::identity(1 << total, 1 << total);
                for &q in &e.pre_x {
                    conj = x_on(q, total) * conj;
                }
                let rebuilt = &conj * ideal_unitary(&e.core, total).unwrap() * &conj;
                assert!(max_abs_diff(&rebuilt, &ideal_unitary(&g, total).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn cswap_products() {
        assert!(cswap_decomposition(0).is_err());
        let seq = cswap_decomposition(3).unwrap();
        assert_eq!(seq.len(), 3);
        assert!(seq.gates.iter().all(|g| g.n_controls() == 4));
        assert_eq!(seq.qubit_count(), 5);
        for n in 1..=3usize {
            let total = n + 2;
            let seq = cswap_decomposition(n).unwrap();
            let got = sequence_unitary(&seq, total).unwrap();
            // Brute force: swap the last two bits when all controls are set.
            let want = permutation(1 << total, |c| {
                let ctrl = c >> 2;
                if ctrl == (1 << n) - 1 {
                    let (a, b) = ((c >> 1) & 1, c & 1);
                    (c & !3) | (b << 1) | a
                } else {
                    c
                }
            });
            assert_eq!(got, want, "N = {n}");
        }
    }

    #[test]
    fn sequence_validation() {
        let a = make_multi_controlled("11", "X", x()).unwrap();
        let b = make_multi_controlled("1", "X", x()).unwrap();
        assert!(GateSequence::new(vec![a.clone(), b]).is_err());
        let c = make_multi_controlled("10", "XX", pauli('X').unwrap().kronecker(&x())).unwrap();
        assert!(GateSequence::new(vec![a, c]).is_err());
    }
}
