//! Gate-sequence text files.
//!
//! One gate per line: `<controls> <label> [wiring]`, where wiring is
//! `c0,c1,...:t0,...` and defaults to controls on `0..N` with the target
//! register after them. `#` starts a comment.
//!
//! ```text
//! # two 3-controlled X gates
//! 111 X
//! 110 X
//! ```

use crate::circuit::{ControlString, GateSequence, GateSpec};
use crate::error::{parse_err, Error, Result};
use crate::labels::LabelTable;

fn parse_list(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| parse_err(line, format!("bad qubit index `{t}`"))))
        .collect()
}

pub fn parse_gates(text: &str, table: &LabelTable) -> Result<GateSequence> {
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(line, "expected `<controls> <label> [wiring]`"));
        }
        let controls: ControlString = fields[0].parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        let matrix = table.resolve(fields[1]).map_err(|e| parse_err(line, e.to_string()))?;
        let mut g = GateSpec::new(controls, fields[1], matrix).map_err(|e| parse_err(line, e.to_string()))?;
        if let Some(w) = fields.get(2) {
            let (c, t) = w
                .split_once(':')
                .ok_or_else(|| parse_err(line, "wiring must look like `c0,c1:t0`"))?;
            g = g
                .with_wiring(parse_list(c, line)?, parse_list(t, line)?)
                .map_err(|e| parse_err(line, e.to_string()))?;
        }
        gates.push(g);
    }
    if gates.is_empty() {
        return Err(Error::InvalidArgument("no gates".into()));
    }
    GateSequence::new(gates)
}

pub fn write_gates(seq: &GateSequence) -> String {
    let join = |v: &[usize]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
    seq.gates
        .iter()
        .map(|g| {
            format!(
                "{} {} {}:{}\n",
                g.controls,
                g.target_label,
                join(&g.control_qubits),
                join(&g.target_qubits)
            )
        })
        .collect()
}
