//! Linear-combination-of-unitaries select operators: gate sequences, pulse
//! budgets, gate times and a dense block-encoding check.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::circuit::{ControlString, GateSequence, GateSpec};
use crate::compiler::{compile, predicted_pulse_count, CompileOptions, CountReport, LoweringStyle};
use crate::error::{parse_err, Error, Result};
use crate::labels::LabelTable;
use crate::linalg::{is_unitary, CMatrix};
use crate::model::{rsb_pulse_duration, schedule_duration, Angle, PhysParams, TimingPolicy, C64};

/// A = Σ a_l U_l with positive coefficients.
#[derive(Clone, Debug)]
pub struct LcuSpec {
    pub coefficients: Vec<f64>,
    pub labels: Vec<String>,
    pub unitaries: Vec<CMatrix>,
}

impl LcuSpec {
    pub fn new(coefficients: Vec<f64>, labels: Vec<String>, unitaries: Vec<CMatrix>) -> Result<LcuSpec> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("an LCU needs at least one term".into()));
        }
        if coefficients.len() != unitaries.len() {
            return Err(Error::LengthMismatch(coefficients.len(), unitaries.len()));
        }
        if labels.len() != unitaries.len() {
            return Err(Error::LengthMismatch(labels.len(), unitaries.len()));
        }
        if let Some(a) = coefficients.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidArgument(format!("coefficient {a} is not positive")));
        }
        let d = unitaries[0].nrows();
        for (label, u) in labels.iter().zip(&unitaries) {
            if u.nrows() != d {
                return Err(Error::DimensionMismatch(format!("`{label}` has dimension {}", u.nrows())));
            }
            if !is_unitary(u, 1e-12) {
                return Err(Error::NotUnitary(label.clone()));
            }
        }
        Ok(LcuSpec {
            coefficients,
            labels,
            unitaries,
        })
    }

    /// Reads `coef label` lines, resolving labels through `table`.
    pub fn parse(text: &str, table: &LabelTable) -> Result<LcuSpec> {
        let (mut a, mut labels, mut us) = (Vec::new(), Vec::new(), Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut it = body.split_whitespace();
            let (Some(c), Some(label), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err(i + 1, "expected `<coefficient> <label>`"));
            };
            a.push(c.parse::<f64>().map_err(|_| parse_err(i + 1, format!("bad coefficient `{c}`")))?);
            us.push(table.resolve(label).map_err(|e| parse_err(i + 1, e.to_string()))?);
            labels.push(label.to_string());
        }
        LcuSpec::new(a, labels, us)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn ancilla_count(&self) -> usize {
        ancilla_count(self.len())
    }

    pub fn normalization(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    /// Σ a_l U_l.
    pub fn operator(&self) -> CMatrix {
        let d = self.unitaries[0].nrows();
        self.coefficients
            .iter()
            .zip(&self.unitaries)
            .fold(CMatrix::zeros(d, d), |acc, (&a, u)| acc + u * C64::new(a, 0.0))
    }
}

/// ⌈log₂ L⌉, with a single ancilla for L = 1.
pub fn ancilla_count(l: usize) -> usize {
    (usize::BITS - l.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Binary-counting control strings `0..L`, most significant bit first.
pub fn select_strings(l: usize) -> Vec<ControlString> {
    let n = ancilla_count(l);
    (0..l).map(|i| ControlString::binary(i, n)).collect()
}

/// Gate l applies U_l when the ancilla register holds |l⟩.
pub fn select_gate_sequence(spec: &LcuSpec) -> Result<GateSequence> {
    let gates = select_strings(spec.len())
        .into_iter()
        .zip(spec.labels.iter().zip(&spec.unitaries))
        .map(|(c, (label, u))| GateSpec::new(c, label, u.clone()))
        .collect::<Result<Vec<_>>>()?;
    GateSequence::new(gates)
}

/// First-difference indices between consecutive binary-counting strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CSequence(pub Vec<usize>);

impl CSequence {
    /// 2 Σ (c_l − 1): sideband pulses removed over a full select.
    pub fn eliminated(&self) -> usize {
        self.0.iter().map(|c| 2 * (c - 1)).sum()
    }
}

/// Built up from (1) by c⁽ᴺ⁺¹⁾ = (c⁽ᴺ⁾ + 1, 1, c⁽ᴺ⁾ + 1).
pub fn c_sequence(n: usize) -> Result<CSequence> {
    if n < 1 {
        return Err(Error::InvalidArgument("c-sequence needs N ≥ 1".into()));
    }
    let mut c = vec![1];
    for _ in 1..n {
        let shifted: Vec<usize> = c.iter().map(|v| v + 1).collect();
        c = shifted.iter().copied().chain([1]).chain(shifted.iter().copied()).collect();
    }
    Ok(CSequence(c))
}

/// (N − 2)·2^(N+1) + 4.
pub fn s_closed_form(n: usize) -> Result<i64> {
    if n < 1 {
        return Err(Error::InvalidArgument("closed form needs N ≥ 1".into()));
    }
    if n > 60 {
        return Err(Error::InvalidArgument(format!("N = {n} overflows")));
    }
    Ok((n as i64 - 2) * (1i64 << (n + 1)) + 4)
}

pub fn select_pulse_count(l: usize) -> Result<CountReport> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!("select needs L ≥ 2, got {l}")));
    }
    predicted_pulse_count(&select_strings(l))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub l: usize,
    pub baseline: usize,
    pub final_count: usize,
    pub closed_form: i64,
    pub ratio: f64,
}

pub fn sweep(ls: impl IntoIterator<Item = usize>) -> Result<Vec<SweepRow>> {
    ls.into_iter()
        .map(|l| {
            let r = select_pulse_count(l)?;
            Ok(SweepRow {
                l,
                baseline: r.baseline,
                final_count: r.final_count,
                closed_form: 6 * l as i64 - 4,
                ratio: r.ratio(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("L,baseline,final,closed_form_6L_minus_4,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6}\n",
            r.l, r.baseline, r.final_count, r.closed_form, r.ratio
        ));
    }
    out
}

/// Real Householder reflection mapping e₀ to the unit vector `v` (v ≥ 0).
fn householder(v: &[f64]) -> CMatrix {
    let d = v.len();
    let mut w: Vec<f64> = v.iter().map(|x| -x).collect();
    w[0] += 1.0;
    let norm2: f64 = w.iter().map(|x| x * x).sum();
    if norm2 < 1e-30 {
        return CMatrix::identity(d, d);
    }
    CMatrix::from_fn(d, d, |r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        C64::new(delta - 2.0 * w[r] * w[c] / norm2, 0.0)
    })
}

/// Largest entry of |(⟨0|⊗I) PREP† SEL PREP (|0⟩⊗I) − A/s|.
pub fn block_encoding_check(spec: &LcuSpec) -> Result<f64> {
    let n = spec.ancilla_count();
    let d = spec.unitaries[0].nrows();
    let anc = 1usize << n;
    if d > 64 || spec.len() > 32 {
        return Err(Error::DimensionOverflow {
            dim: anc * d,
            limit: 32 * 64,
        });
    }
    let s = spec.normalization();
    let mut amp = vec![0.0; anc];
    for (x, a) in amp.iter_mut().zip(&spec.coefficients) {
        *x = (a / s).sqrt();
    }
    let prep = householder(&amp);
    // PREP ⊗ I applied to |0⟩ ⊗ I: column j of the result is prep[:,0] ⊗ e_j.
    let dim = anc * d;
    let mut x = CMatrix::zeros(dim, d);
    for l in 0..anc {
        for j in 0..d {
            x[(l * d + j, j)] = prep[(l, 0)];
        }
    }
    // SEL is block diagonal with identity on unused ancilla states.
    let mut y = x.clone();
    for (l, u) in spec.unitaries.iter().enumerate() {
        let rows = x.rows(l * d, d).into_owned();
        y.rows_mut(l * d, d).copy_from(&(u * rows));
    }
    let block = x.adjoint() * y;
    let target = spec.operator() / C64::new(s, 0.0);
    Ok((block - target).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Pauli-factor counts of each select term, used only for timing.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct SelectShape {
    pub m: Vec<usize>,
}

impl SelectShape {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Named shapes from a TOML file of `[name] m = [..]` tables.
    pub fn parse_toml(text: &str) -> Result<BTreeMap<String, SelectShape>> {
        let shapes: BTreeMap<String, SelectShape> = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (name, s) in &shapes {
            if s.m.is_empty() || s.m.contains(&0) {
                return Err(Error::Config(format!("shape `{name}` needs m ≥ 1 for every term")));
            }
        }
        Ok(shapes)
    }

    fn label(l: usize) -> String {
        format!("U{l}")
    }

    /// A select sequence whose targets carry the labels `U0..`; the matrices
    /// are placeholders.
    pub fn gate_sequence(&self) -> Result<GateSequence> {
        let id = CMatrix::identity(2, 2);
        let gates = select_strings(self.len())
            .into_iter()
            .enumerate()
            .map(|(l, c)| GateSpec::new(c, &Self::label(l), id.clone()))
            .collect::<Result<Vec<_>>>()?;
        GateSequence::new(gates)
    }

    pub fn timing_policy(&self, p: &PhysParams) -> TimingPolicy {
        self.m.iter().enumerate().fold(TimingPolicy::default(), |pol, (l, &m)| {
            pol.with_target(Self::label(l), controlled_pauli_duration(m, p))
        })
    }
}

/// A controlled product of m Paulis costs (2m − 1)·4·t_RSB; m = 0 is free.
pub fn controlled_pauli_duration(m: usize, p: &PhysParams) -> f64 {
    (2 * m).saturating_sub(1) as f64 * 4.0 * rsb_pulse_duration(Angle::PI, p)
}

/// Timing for every Pauli-string target label in `s` that `policy` does not
/// already cover.
pub fn with_pauli_durations(s: &crate::model::Schedule, p: &PhysParams, mut policy: TimingPolicy) -> TimingPolicy {
    for op in &s.pulses {
        let Some(label) = op.label.as_deref() else { continue };
        if policy.target_durations.contains_key(label) || label.is_empty() {
            continue;
        }
        if label.chars().all(|c| "IXYZ".contains(c)) {
            let m = label.chars().filter(|&c| c != 'I').count();
            policy = policy.with_target(label, controlled_pauli_duration(m, p));
        }
    }
    policy
}

/// Duration of the compiled select schedule.
pub fn select_gate_time(shape: &SelectShape, p: &PhysParams, optimize: bool) -> Result<f64> {
    if shape.is_empty() || shape.m.contains(&0) {
        return Err(Error::InvalidArgument("every term needs m ≥ 1".into()));
    }
    let opts = CompileOptions {
        optimize,
        style: LoweringStyle::ControlledUnitary,
    };
    let s = compile(&shape.gate_sequence()?, opts)?;
    schedule_duration(&s, p, &shape.timing_policy(p))
}
