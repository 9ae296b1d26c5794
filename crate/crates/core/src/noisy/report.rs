use std::fmt::Write;

use super::NoiseParams;

/// Largest per-state change, in fidelity units, tolerated when halving dt.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;

/// Mean and population standard deviation of a set of fidelities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

impl GroupStats {
    pub fn of(values: &[f64]) -> GroupStats {
        let count = values.len();
        if count == 0 {
            return GroupStats {
                count,
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64;
        GroupStats {
            count,
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub ion_count: usize,
    pub iterations: usize,
    /// Input basis states, qubit 0 most significant.
    pub inputs: Vec<usize>,
    pub fidelities: Vec<f64>,
    /// Inputs with qubit 0 in g.
    pub g_group: GroupStats,
    /// Inputs with qubit 0 in e.
    pub e_group: GroupStats,
    pub overall: f64,
    pub subgroup_width: usize,
    /// Inputs whose first `subgroup_width` qubits are all e.
    pub subgroup: GroupStats,
    /// The rest of the e group.
    pub subgroup_rest: GroupStats,
    pub noise: NoiseParams,
    /// Largest final population at the Fock cutoff over all trajectories.
    pub cutoff_population: f64,
    pub mean_jumps: f64,
    /// Largest per-state change when dt is halved, if checked.
    pub max_dt_change: Option<f64>,
}

impl FidelityReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        ion_count: usize,
        inputs: Vec<usize>,
        fidelities: Vec<f64>,
        subgroup_width: usize,
        iterations: usize,
        noise: NoiseParams,
        cutoff_population: f64,
        mean_jumps: f64,
        max_dt_change: Option<f64>,
    ) -> FidelityReport {
        let top = |b: usize| (b >> (ion_count - 1)) & 1 == 1;
        let width = subgroup_width.min(ion_count);
        let lead = |b: usize| (b >> (ion_count - width)) == (1 << width) - 1;
        let pick = |f: &dyn Fn(usize) -> bool| -> Vec<f64> {
            inputs.iter().zip(&fidelities).filter(|(b, _)| f(**b)).map(|(_, v)| *v).collect()
        };
        let g_group = GroupStats::of(&pick(&|b| !top(b)));
        let e_group = GroupStats::of(&pick(&|b| top(b)));
        let subgroup = GroupStats::of(&pick(&|b| top(b) && lead(b)));
        let subgroup_rest = GroupStats::of(&pick(&|b| top(b) && !lead(b)));
        let overall = GroupStats::of(&fidelities).mean;
        FidelityReport {
            ion_count,
            iterations,
            inputs,
            fidelities,
            g_group,
            e_group,
            overall,
            subgroup_width: width,
            subgroup,
            subgroup_rest,
            noise,
            cutoff_population,
            mean_jumps,
            max_dt_change,
        }
    }

    /// `None` when the check was not run.
    pub fn converged(&self) -> Option<bool> {
        self.max_dt_change.map(|d| d <= CONVERGENCE_TOLERANCE)
    }

    pub fn state_label(&self, bits: usize) -> String {
        (0..self.ion_count)
            .map(|q| if (bits >> (self.ion_count - 1 - q)) & 1 == 1 { 'e' } else { 'g' })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("input_state,fidelity\n");
        for (b, f) in self.inputs.iter().zip(&self.fidelities) {
            let _ = writeln!(out, "{},{:.6}", self.state_label(*b), f);
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("group,count,mean,std\n");
        for (name, g) in self.groups() {
            let _ = writeln!(out, "{},{},{:.6},{:.6}", name, g.count, g.mean, g.std);
        }
        out
    }

    fn groups(&self) -> Vec<(String, GroupStats)> {
        let rest = self.ion_count.saturating_sub(1);
        let tail = self.ion_count - self.subgroup_width;
        vec![
            (format!("g{}", "x".repeat(rest)), self.g_group),
            (format!("e{}", "x".repeat(rest)), self.e_group),
            (format!("{}{}", "e".repeat(self.subgroup_width), "x".repeat(tail)), self.subgroup),
            (format!("other e{}", "x".repeat(rest)), self.subgroup_rest),
            (
                "overall".to_string(),
                GroupStats {
                    count: self.fidelities.len(),
                    mean: self.overall,
                    std: GroupStats::of(&self.fidelities).std,
                },
            ),
        ]
    }

    /// Group means and deviations in percent, plus run diagnostics.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "iterations {}  trajectories {}  seed {}",
            self.iterations, self.noise.n_traj, self.noise.seed
        );
        let _ = writeln!(out, "{:<12} {:>8} {:>8} {:>7}", "group", "mean %", "std %", "states");
        for (name, g) in self.groups() {
            let _ = writeln!(
                out,
                "{:<12} {:>8.2} {:>8.2} {:>7}",
                name,
                100.0 * g.mean,
                100.0 * g.std,
                g.count
            );
        }
        let _ = writeln!(out, "cutoff population {:.3e}", self.cutoff_population);
        let _ = writeln!(out, "mean jumps per trajectory {:.4}", self.mean_jumps);
        match self.max_dt_change {
            None => out.push_str("dt convergence not checked\n"),
            Some(d) => {
                let verdict = if d <= CONVERGENCE_TOLERANCE { "ok" } else { "NOT CONVERGED" };
                let _ = writeln!(out, "dt convergence {verdict} (max change {:.4} points)", 100.0 * d);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        let g = GroupStats::of(&[1.0, 3.0]);
        assert_eq!((g.count, g.mean, g.std), (2, 2.0, 1.0));
        assert!(GroupStats::of(&[]).mean.is_nan());
    }

    #[test]
    fn grouping() {
        let inputs: Vec<usize> = (0..32).collect();
        let f: Vec<f64> = inputs.iter().map(|&b| if b >= 28 { 0.5 } else if b >= 16 { 0.8 } else { 1.0 }).collect();
        let r = FidelityReport::new(5, inputs, f, 3, 1, NoiseParams::default(), 0.0, 0.0, Some(5e-4));
        assert_eq!(r.g_group.mean, 1.0);
        assert_eq!(r.subgroup.count, 4);
        assert_eq!(r.subgroup.mean, 0.5);
        assert_eq!(r.subgroup_rest.count, 12);
        assert!((r.e_group.mean - 0.725).abs() < 1e-12);
        assert_eq!(r.converged(), Some(true));
        assert_eq!(r.state_label(0b10110), "egeeg");
        assert!(r.to_csv().starts_with("input_state,fidelity\nggggg,1.000000\n"));
        assert!(r.summary().contains("eeexx"));
    }
}
