//! Monte Carlo wavefunction simulation of pulse schedules with motional
//! heating, motional dephasing and dephasing of the auxiliary level.
//!
//! Each trajectory draws a threshold r, evolves under the non-Hermitian
//! effective Hamiltonian until ‖ψ‖² falls to r, locates the jump time to
//! within `dt` by bisection, applies a collapse chosen in proportion to
//! its rate, renormalizes and draws a new threshold.

mod propagate;
mod report;

pub use report::{FidelityReport, GroupStats, CONVERGENCE_TOLERANCE};

use nalgebra::DVector;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::compiler::cancel_pulses;
use crate::error::{Error, Result};
use crate::exact::Layout;
use crate::exec::{map_indexed, Execution};
use crate::labels::LabelTable;
use crate::linalg::CMatrix;
use crate::model::{Angle, PhysParams, PulseKind, Schedule, TimingPolicy, C64};

use propagate::{decay_vector, Rates, SparseState, Step, Timed};

/// Collapse rates are in 1/μs and `dt` in μs.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub gamma_h: f64,
    pub gamma_phi: f64,
    pub gamma_z: f64,
    pub n_bar: f64,
    pub n_max: usize,
    pub n_traj: usize,
    pub seed: u64,
    pub dt: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            gamma_h: 1.3e-4,
            gamma_phi: 5.0e-4,
            gamma_z: 2.0e-3,
            n_bar: 0.05,
            n_max: 10,
            n_traj: 1000,
            seed: 0,
            dt: 0.1,
        }
    }
}

impl NoiseParams {
    /// No dissipation and a mode starting in |0⟩.
    pub fn noiseless() -> Self {
        NoiseParams {
            gamma_h: 0.0,
            gamma_phi: 0.0,
            gamma_z: 0.0,
            n_bar: 0.0,
            ..Self::default()
        }
    }

    pub fn parse_toml(text: &str) -> Result<NoiseParams> {
        let p: NoiseParams = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [("gamma_h", self.gamma_h), ("gamma_phi", self.gamma_phi), ("gamma_z", self.gamma_z)];
        if let Some((name, v)) = rates.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidNoise(format!("{name} must be non-negative, got {v}")));
        }
        if !(self.n_bar.is_finite() && self.n_bar >= 0.0) {
            return Err(Error::InvalidNoise(format!("n_bar must be non-negative, got {}", self.n_bar)));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidNoise("n_max must be at least 1".into()));
        }
        if self.n_traj < 1 {
            return Err(Error::InvalidNoise("n_traj must be at least 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidNoise(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn scaled_rates(&self, factor: f64) -> NoiseParams {
        NoiseParams {
            gamma_h: self.gamma_h * factor,
            gamma_phi: self.gamma_phi * factor,
            gamma_z: self.gamma_z * factor,
            ..self.clone()
        }
    }

    fn rates(&self) -> Rates {
        Rates {
            heating: self.gamma_h,
            dephasing: self.gamma_phi,
            zeeman: self.gamma_z,
        }
    }
}

/// p_n ∝ n̄ⁿ/(1+n̄)ⁿ⁺¹ on 0..=n_max, renormalized.
pub fn thermal_distribution(n_bar: f64, n_max: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..=n_max)
        .map(|n| n_bar.powi(n as i32) / (1.0 + n_bar).powi(n as i32 + 1))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// ⟨ψ₀|U† ρ U|ψ₀⟩ for a qubit density matrix, clamped to [0, 1].
pub fn fidelity(u: &CMatrix, psi0: &DVector<C64>, rho: &CMatrix) -> f64 {
    let t = u * psi0;
    let f = (t.adjoint() * rho * &t)[(0, 0)].re;
    f.clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub execution: Execution,
    /// Rerun with dt/2 and flag any per-state change above 0.1 points.
    pub check_convergence: bool,
    pub policy: TimingPolicy,
    pub table: LabelTable,
    /// Width of the leading all-e subgroup in the report; defaults to
    /// ions − 2, the control register of a controlled swap.
    pub subgroup_width: Option<usize>,
    /// Repetitions of the schedule; the ideal becomes U^k. Repeats of a
    /// cancelled schedule are cancelled again at their boundaries.
    pub iterations: Option<usize>,
}

struct Compiled {
    layout: Layout,
    steps: Vec<Step>,
    decay: Vec<f64>,
    /// Which collapse channels are live.
    rates: Rates,
}

fn compile_steps(s: &Schedule, p: &PhysParams, noise: &NoiseParams, opts: &RunOptions) -> Result<Compiled> {
    s.validate()?;
    let layout = Layout::new(s.ion_count, noise.n_max);
    let rates = noise.rates();
    let decay = decay_vector(&layout, &rates);
    let mut steps = Vec::with_capacity(s.len());
    for op in &s.pulses {
        let step = match op.kind {
            PulseKind::ZGate => Step::Z(op.ion),
            PulseKind::TargetUnitary => {
                let label = op.label.as_deref().unwrap_or("");
                let matrix = opts.table.resolve(label)?;
                if matrix.nrows() != 1 << op.targets.len() {
                    return Err(Error::DimensionMismatch(format!("`{label}` does not fit its targets")));
                }
                Step::Controlled {
                    control: op.ion,
                    targets: op.targets.clone(),
                    matrix,
                }
            }
            _ => {
                let (theta, phi) = match op.kind {
                    PulseKind::XGate => (Angle::PI, Angle::ZERO),
                    _ => (op.theta, op.phi),
                };
                let us = opts.policy.pulse_duration(op, p)? * 1e6;
                let seg = Timed::new(&layout, op, theta, phi, us, &decay);
                if us > 0.0 {
                    Step::Timed(seg)
                } else {
                    Step::Rotation(seg)
                }
            }
        };
        steps.push(step);
    }
    Ok(Compiled {
        layout,
        steps,
        decay,
        rates,
    })
}

struct Outcome {
    fidelity: f64,
    cutoff: f64,
    jumps: u32,
}

fn collapse(state: &mut SparseState, c: &Compiled, rng: &mut ChaCha8Rng) {
    let layout = &c.layout;
    let mut weights = Vec::with_capacity(2 + layout.ions);
    let (mut up, mut num) = (0.0, 0.0);
    let mut f_pop = vec![0.0; layout.ions];
    for &i in &state.support {
        let p = state.amps[i as usize].norm_sqr();
        let n = layout.fock(i as usize);
        if n < layout.n_max {
            up += (n + 1) as f64 * p;
        }
        num += (n * n) as f64 * p;
        for (ion, f) in f_pop.iter_mut().enumerate() {
            if layout.level(i as usize, ion) == crate::model::Level::F {
                *f += p;
            }
        }
    }
    weights.push(c.rates.heating * up);
    weights.push(c.rates.dephasing * num);
    weights.extend(f_pop.iter().map(|f| c.rates.zeeman * f));
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return;
    }
    let mut x = rng.gen::<f64>() * total;
    let mut k = weights.len() - 1;
    for (j, w) in weights.iter().enumerate() {
        if x < *w {
            k = j;
            break;
        }
        x -= w;
    }
    match k {
        0 => state.raise(layout),
        1 => state.number(layout),
        ion => state.project_f(layout, ion - 2),
    }
    let norm = state.norm_sqr();
    if norm > 0.0 {
        state.scale(norm.sqrt().recip());
    }
}

fn run_one(c: &Compiled, start: usize, target: &[C64], dt: f64, rng: &mut ChaCha8Rng) -> Outcome {
    let mut state = SparseState::basis(c.layout.dim(), start);
    let mut threshold: f64 = rng.gen();
    let mut jumps = 0;
    for step in &c.steps {
        match step {
            Step::Z(ion) => state.apply_z(&c.layout, *ion),
            Step::Controlled {
                control,
                targets,
                matrix,
            } => state.apply_controlled(&c.layout, *control, targets, matrix),
            Step::Rotation(seg) => state.propagate(seg, None, &c.decay),
            Step::Timed(seg) => {
                let mut remaining = seg.duration;
                let mut whole = true;
                loop {
                    let saved = state.snapshot();
                    let t = if whole { None } else { Some(remaining) };
                    state.propagate(seg, t, &c.decay);
                    if state.norm_sqr() > threshold {
                        break;
                    }
                    // A jump falls inside this interval: bisect for it.
                    let (mut lo, mut hi) = (0.0, remaining);
                    while hi - lo > dt {
                        let mid = 0.5 * (lo + hi);
                        let mut probe = state.clone();
                        probe.restore(&saved);
                        probe.propagate(seg, Some(mid), &c.decay);
                        if probe.norm_sqr() > threshold {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    state.restore(&saved);
                    state.propagate(seg, Some(hi), &c.decay);
                    collapse(&mut state, c, rng);
                    jumps += 1;
                    threshold = rng.gen();
                    remaining -= hi;
                    whole = false;
                    if remaining <= 1e-12 {
                        break;
                    }
                }
            }
        }
    }
    let norm = state.norm_sqr();
    let modes = c.layout.modes();
    let mut overlap = vec![C64::new(0.0, 0.0); modes];
    let mut cutoff = 0.0;
    for &i in &state.support {
        let i = i as usize;
        let n = c.layout.fock(i);
        if n == c.layout.n_max {
            cutoff += state.amps[i].norm_sqr();
        }
        if let Some(bits) = computational_bits(&c.layout, i) {
            overlap[n] += target[bits].conj() * state.amps[i];
        }
    }
    let f: f64 = overlap.iter().map(|o| o.norm_sqr()).sum();
    Outcome {
        fidelity: if norm > 0.0 { f / norm } else { 0.0 },
        cutoff: if norm > 0.0 { cutoff / norm } else { 0.0 },
        jumps,
    }
}

fn computational_bits(layout: &Layout, index: usize) -> Option<usize> {
    (0..layout.ions).try_fold(0usize, |acc, ion| match layout.level(index, ion) {
        crate::model::Level::G => Some(acc << 1),
        crate::model::Level::E => Some((acc << 1) | 1),
        crate::model::Level::F => None,
    })
}

/// Per-(input, trajectory) random stream.
fn trajectory_rng(seed: u64, input: usize, traj: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((input as u64) << 32) | traj as u64);
    rng
}

struct Pass {
    fidelities: Vec<f64>,
    cutoff: f64,
    mean_jumps: f64,
}

fn run_pass(c: &Compiled, noise: &NoiseParams, ideal: &CMatrix, inputs: &[usize], dt: f64, exec: Execution) -> Pass {
    let thermal = thermal_distribution(noise.n_bar, noise.n_max);
    let sampler = WeightedIndex::new(&thermal).expect("thermal weights are positive");
    let n_traj = noise.n_traj;
    let targets: Vec<Vec<C64>> = inputs.iter().map(|&b| ideal.column(b).iter().copied().collect()).collect();
    let outcomes = map_indexed(inputs.len() * n_traj, exec, |k| {
        let (which, traj) = (k / n_traj, k % n_traj);
        let mut rng = trajectory_rng(noise.seed, inputs[which], traj);
        let n0 = sampler.sample(&mut rng);
        let start = c.layout.computational_index(inputs[which], n0);
        run_one(c, start, &targets[which], dt, &mut rng)
    });
    let mut fidelities = vec![0.0; inputs.len()];
    let (mut cutoff, mut jumps) = (0.0f64, 0u64);
    for (k, o) in outcomes.iter().enumerate() {
        fidelities[k / n_traj] += o.fidelity;
        cutoff = cutoff.max(o.cutoff);
        jumps += o.jumps as u64;
    }
    fidelities.iter_mut().for_each(|f| *f /= n_traj as f64);
    Pass {
        fidelities,
        cutoff,
        mean_jumps: jumps as f64 / outcomes.len().max(1) as f64,
    }
}

/// `k` back-to-back passes; a cancelled schedule is cancelled again across
/// the seams.
fn iterated(s: &Schedule, k: usize) -> Schedule {
    let r = s.repeated(k);
    if k > 1 && s.metadata.get("optimize").is_some_and(|v| v == "true") {
        cancel_pulses(&r)
    } else {
        r
    }
}

/// Average fidelity of every input basis state (qubit 0 most significant)
/// against `ideal`, a 2^ions unitary for one pass of the schedule.
pub fn run_trajectories(
    s: &Schedule,
    p: &PhysParams,
    noise: &NoiseParams,
    ideal: &CMatrix,
    inputs: &[usize],
    opts: &RunOptions,
) -> Result<FidelityReport> {
    noise.validate()?;
    p.validate()?;
    let dim = 1usize << s.ion_count;
    if ideal.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "ideal gate is {}×{} but the schedule has {} ions",
            ideal.nrows(),
            ideal.ncols(),
            s.ion_count
        )));
    }
    if let Some(&b) = inputs.iter().find(|&&b| b >= dim) {
        return Err(Error::InvalidArgument(format!("input state {b} out of range")));
    }
    let reps = opts.iterations.unwrap_or(1).max(1);
    let target = (1..reps).fold(ideal.clone(), |acc, _| ideal * acc);
    let c = compile_steps(&iterated(s, reps), p, noise, opts)?;
    let pass = run_pass(&c, noise, &target, inputs, noise.dt, opts.execution);
    let max_dt_change = opts.check_convergence.then(|| {
        let half = run_pass(&c, noise, &target, inputs, noise.dt / 2.0, opts.execution);
        pass.fidelities
            .iter()
            .zip(&half.fidelities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    let width = opts.subgroup_width.unwrap_or(s.ion_count.saturating_sub(2)).max(1);
    Ok(FidelityReport::new(
        s.ion_count,
        inputs.to_vec(),
        pass.fidelities,
        width,
        reps,
        noise.clone(),
        pass.cutoff,
        pass.mean_jumps,
        max_dt_change,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{cswap_decomposition, sequence_unitary};
    use crate::compiler::{compile, CompileOptions, LoweringStyle};

    #[test]
    fn thermal_examples() {
        assert_eq!(thermal_distribution(0.0, 10)[0], 1.0);
        let p = thermal_distribution(0.05, 10);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let raw0: f64 = 1.0 / 1.05;
        let raw1 = 0.05 / 1.05f64.powi(2);
        assert!((raw0 - 0.9524).abs() < 1e-4 && (raw1 - 0.0454).abs() < 1e-4);
        assert!((p[1] / p[0] - raw1 / raw0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let u = crate::linalg::pauli('X').unwrap();
        let psi0 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let out = &u * &psi0;
        let rho = &out * out.adjoint();
        assert!((fidelity(&u, &psi0, &rho) - 1.0).abs() < 1e-12);
        let mixed = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!((fidelity(&u, &psi0, &mixed) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn config_parsing() {
        let p = NoiseParams::parse_toml("gamma_h = 0.0\nn_traj = 5\nseed = 7\n").unwrap();
        assert_eq!((p.gamma_h, p.n_traj, p.seed, p.n_bar), (0.0, 5, 7, 0.05));
        assert!(NoiseParams::parse_toml("gamma_h = -1.0\n").is_err());
        assert!(NoiseParams::parse_toml("n_traj = 0\n").is_err());
        assert!(NoiseParams::parse_toml("bogus = 1\n").is_err());
    }

    #[test]
    fn noiseless_limit_is_exact() {
        let seq = cswap_decomposition(1).unwrap();
        let s = compile(&seq, CompileOptions::optimized(LoweringStyle::Toffoli)).unwrap();
        let ideal = sequence_unitary(&seq, 3).unwrap();
        let noise = NoiseParams {
            n_traj: 3,
            n_max: 3,
            ..NoiseParams::noiseless()
        };
        let inputs: Vec<usize> = (0..8).collect();
        let r = run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &inputs, &RunOptions::default()).unwrap();
        assert!(r.fidelities.iter().all(|f| *f > 1.0 - 1e-9), "{:?}", r.fidelities);
    }
}
