use std::fmt;

use crate::circuit::ControlString;
use crate::error::{Error, Result};

/// Sideband budget of a gate sequence before and after cancellation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub baseline: usize,
    pub eliminated: usize,
    pub final_count: usize,
    pub c_values: Vec<usize>,
}

impl CountReport {
    pub fn ratio(&self) -> f64 {
        self.final_count as f64 / self.baseline as f64
    }

    pub fn to_csv(&self) -> String {
        let cs: Vec<String> = self.c_values.iter().map(|c| c.to_string()).collect();
        format!(
            "baseline,eliminated,final,c_values\n{},{},{},{}\n",
            self.baseline,
            self.eliminated,
            self.final_count,
            cs.join(" ")
        )
    }
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.c_values.iter().map(|c| c.to_string()).collect();
        writeln!(f, "baseline: {}", self.baseline)?;
        writeln!(f, "eliminated: {}", self.eliminated)?;
        writeln!(f, "final: {}", self.final_count)?;
        write!(f, "c_values: {}", cs.join(" "))
    }
}

/// 1-based index of the first differing control bit, or N+2 when equal.
pub fn c_index(x: &ControlString, y: &ControlString) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(x
        .bits()
        .iter()
        .zip(y.bits())
        .position(|(a, b)| a != b)
        .map_or(x.len() + 2, |i| i + 1))
}

/// Closed-form sideband count for M successive N-controlled gates:
/// 2M(N+1) − 2 Σ (c_k − 1).
pub fn predicted_pulse_count(strings: &[ControlString]) -> Result<CountReport> {
    let first = strings
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one control string is required".into()))?;
    let n = first.len();
    let c_values = strings
        .windows(2)
        .map(|w| c_index(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = strings.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch(n, bad.len()));
    }
    let baseline = 2 * strings.len() * (n + 1);
    let eliminated: usize = c_values.iter().map(|c| 2 * (c - 1)).sum();
    Ok(CountReport {
        baseline,
        eliminated,
        final_count: baseline - eliminated,
        c_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(s: &str) -> ControlString {
        s.parse().unwrap()
    }

    #[test]
    fn c_index_examples() {
        assert_eq!(c_index(&cs("111"), &cs("110")).unwrap(), 3);
        assert_eq!(c_index(&cs("101"), &cs("101")).unwrap(), 5);
        assert_eq!(c_index(&cs("0111"), &cs("1000")).unwrap(), 1);
        assert!(c_index(&cs("01"), &cs("011")).is_err());
    }

    #[test]
    fn count_examples() {
        let r = predicted_pulse_count(&[cs("111"), cs("110")]).unwrap();
        assert_eq!((r.baseline, r.eliminated, r.final_count), (16, 4, 12));
        assert_eq!(r.c_values, vec![3]);
        let r = predicted_pulse_count(&[cs("1011")]).unwrap();
        assert_eq!((r.final_count, r.eliminated), (10, 0));
        let r = predicted_pulse_count(&[cs("111"), cs("111")]).unwrap();
        assert_eq!((r.eliminated, r.final_count), (8, 8));
        assert!(predicted_pulse_count(&[cs("11"), cs("1")]).is_err());
        assert!(predicted_pulse_count(&[]).is_err());
    }
}
