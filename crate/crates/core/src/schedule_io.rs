//! Text serialization of [`Schedule`].
//!
//! ```text
//! # czpulse-schedule v1
//! @ion_count 5
//! @meta optimize true
//! index,kind,ion,theta_over_pi,phi_over_pi,label,targets
//! 0,RSB,0,1,0,,
//! 1,CARRIER,4,1/2,-1/2,,
//! 2,TARGET_UNITARY,2,0,0,XZ,3 4
//! ```
//!
//! Angles are written as multiples of π, as `p/q` when that form reproduces
//! the stored value bit for bit and as a shortest round-trip decimal otherwise.

use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::model::{Angle, PulseKind, PulseOp, Schedule};

pub const SCHEDULE_HEADER: &str = "# czpulse-schedule v1";
const COLUMNS: &str = "index,kind,ion,theta_over_pi,phi_over_pi,label,targets";

pub fn format_pi_multiple(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    for q in 1..=64i64 {
        let p = (x * q as f64).round();
        if p.abs() < 1e15 && p / q as f64 == x {
            let p = p as i64;
            return if q == 1 { p.to_string() } else { format!("{p}/{q}") };
        }
    }
    format!("{x:?}")
}

pub fn parse_pi_multiple(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| p as f64 / q as f64)
        }
        None => s.parse().ok(),
    }
}

pub fn write_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SCHEDULE_HEADER}");
    let _ = writeln!(out, "@ion_count {}", s.ion_count);
    for (k, v) in &s.metadata {
        let _ = writeln!(out, "@meta {k} {v}");
    }
    let _ = writeln!(out, "{COLUMNS}");
    for (i, p) in s.pulses.iter().enumerate() {
        let targets: Vec<String> = p.targets.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i,
            p.kind,
            p.ion,
            format_pi_multiple(p.theta.over_pi()),
            format_pi_multiple(p.phi.over_pi()),
            p.label.as_deref().unwrap_or(""),
            targets.join(" ")
        );
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut ion_count: Option<usize> = None;
    let mut schedule = Schedule::default();
    let mut seen_columns = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('@') {
            let mut parts = rest.splitn(3, ' ');
            match parts.next() {
                Some("ion_count") => {
                    let v = parts.next().ok_or_else(|| parse_err(line_no, "missing ion count"))?;
                    ion_count = Some(v.trim().parse().map_err(|_| parse_err(line_no, "bad ion count"))?);
                }
                Some("meta") => {
                    let k = parts.next().ok_or_else(|| parse_err(line_no, "missing metadata key"))?;
                    let v = parts.next().unwrap_or("");
                    schedule.metadata.insert(k.to_string(), v.to_string());
                }
                Some(other) => return Err(parse_err(line_no, format!("unknown directive @{other}"))),
                None => return Err(parse_err(line_no, "empty directive")),
            }
            continue;
        }
        if line == COLUMNS {
            seen_columns = true;
            continue;
        }
        if !seen_columns {
            return Err(parse_err(line_no, "pulse row before column header"));
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 7 {
            return Err(parse_err(line_no, format!("expected 7 fields, found {}", fields.len())));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, "bad index"))?;
        if index != schedule.pulses.len() {
            return Err(parse_err(line_no, format!("index {index} out of sequence")));
        }
        let kind = PulseKind::from_name(fields[1].trim())
            .ok_or_else(|| parse_err(line_no, format!("unknown pulse kind `{}`", fields[1].trim())))?;
        let ion: usize = fields[2].trim().parse().map_err(|_| parse_err(line_no, "bad ion"))?;
        let theta = parse_pi_multiple(fields[3]).ok_or_else(|| parse_err(line_no, "bad theta"))?;
        let phi = parse_pi_multiple(fields[4]).ok_or_else(|| parse_err(line_no, "bad phi"))?;
        let label = fields[5].trim();
        let targets = fields[6]
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(line_no, "bad target index")))
            .collect::<Result<Vec<_>>>()?;
        if kind == PulseKind::TargetUnitary && label.is_empty() {
            return Err(parse_err(line_no, "TARGET_UNITARY requires a label"));
        }
        schedule.pulses.push(PulseOp {
            kind,
            ion,
            theta: Angle(theta),
            phi: Angle(phi),
            label: (!label.is_empty()).then(|| label.to_string()),
            targets,
        });
    }
    schedule.ion_count = ion_count.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing @ion_count".into(),
    })?;
    schedule.validate()?;
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writes_rationals() {
        assert_eq!(format_pi_multiple(1.0), "1");
        assert_eq!(format_pi_multiple(-1.0), "-1");
        assert_eq!(format_pi_multiple(0.5), "1/2");
        assert_eq!(format_pi_multiple(-0.5), "-1/2");
        assert_eq!(format_pi_multiple(1.0 / 3.0), "1/3");
        assert_eq!(parse_pi_multiple("-1/2"), Some(-0.5));
    }

    #[test]
    fn rejects_bad_rows() {
        let text = format!("{SCHEDULE_HEADER}\n@ion_count 2\n{COLUMNS}\n0,FOO,0,1,0,,\n");
        let err = parse_schedule(&text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let text = format!("{SCHEDULE_HEADER}\n{COLUMNS}\n0,RSB,0,1,0,,\n");
        assert!(parse_schedule(&text).is_err());
        let text = format!("{SCHEDULE_HEADER}\n@ion_count 1\n{COLUMNS}\n0,RSB,3,1,0,,\n");
        assert!(matches!(parse_schedule(&text), Err(Error::IonOutOfRange { .. })));
    }

    fn pulse() -> impl Strategy<Value = PulseOp> {
        let rational = (-16i64..16, 1i64..9).prop_map(|(p, q)| p as f64 / q as f64);
        (0usize..6, rational.clone(), rational, 0u8..6).prop_map(|(ion, t, f, k)| match k {
            0 => PulseOp::rsb(ion, Angle(t)),
            1 => PulseOp::rsb_aux(ion, Angle(t)),
            2 => PulseOp::carrier(ion, Angle(t), Angle(f)),
            3 => PulseOp::x(ion),
            4 => PulseOp::z(ion),
            _ => PulseOp::target_unitary(ion, vec![6, 7], "XZ"),
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless(pulses in proptest::collection::vec(pulse(), 0..40), irrational in -3.0f64..3.0) {
            let mut s = Schedule::from_pulses(8, pulses).unwrap();
            s.pulses.push(PulseOp::carrier(1, Angle(irrational), Angle(-irrational)));
            s.metadata.insert("optimize".into(), "true".into());
            let back = parse_schedule(&write_schedule(&s)).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
