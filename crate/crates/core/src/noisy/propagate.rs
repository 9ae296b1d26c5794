//! Non-Hermitian pulse propagation over the occupied part of a dense state.
//!
//! Every pulse splits the basis into coupled two-level blocks and uncoupled
//! states. Under H_eff = H − (i/2) Σ L†L each block is a 2×2 problem with a
//! diagonal decay term, so the no-jump propagator is exact for any duration.

use crate::exact::{apply_controlled, coupled_pairs, Layout};
use crate::linalg::CMatrix;
use crate::model::{Angle, Level, C64};

const NONE: u32 = u32::MAX;
const ZERO: C64 = C64::new(0.0, 0.0);
const PRUNE: f64 = 1e-28;

/// Collapse rates in 1/μs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Rates {
    pub heating: f64,
    pub dephasing: f64,
    pub zeeman: f64,
}

/// Diagonal of Σ_k L_k†L_k.
pub(crate) fn decay_vector(layout: &Layout, r: &Rates) -> Vec<f64> {
    (0..layout.dim())
        .map(|i| {
            let n = layout.fock(i);
            let up = if n < layout.n_max { (n + 1) as f64 } else { 0.0 };
            r.heating * up + r.dephasing * (n * n) as f64 + r.zeeman * layout.f_count(i) as f64
        })
        .collect()
}

/// exp(−i t H_eff) on one block, row-major.
fn block_exp(w: f64, phi: f64, du: f64, dl: f64, t: f64) -> [C64; 4] {
    let mu = -(du + dl) * t / 4.0;
    let delta = C64::new(-(du - dl) * t / 4.0, 0.0);
    let half = w * t / 2.0;
    let n12 = C64::new(0.0, -half) * C64::from_polar(1.0, -phi);
    let n21 = C64::new(0.0, -half) * C64::from_polar(1.0, phi);
    let q = (delta * delta + n12 * n21).sqrt();
    let (ch, shq) = if q.norm() < 1e-6 {
        let q2 = q * q;
        (1.0 + q2 / 2.0 + q2 * q2 / 24.0, 1.0 + q2 / 6.0 + q2 * q2 / 120.0)
    } else {
        (q.cosh(), q.sinh() / q)
    };
    let e = mu.exp();
    [
        (ch + shq * delta) * e,
        shq * n12 * e,
        shq * n21 * e,
        (ch - shq * delta) * e,
    ]
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    upper: u32,
    lower: u32,
    /// Signed angular rate of the block rotation, rad/μs.
    w: f64,
}

/// One pulse with a nonzero duration.
#[derive(Clone, Debug)]
pub(crate) struct Timed {
    pub duration: f64,
    phi: f64,
    pairs: Vec<Pair>,
    /// Pair id of each basis state, or `NONE`.
    pair_of: Vec<u32>,
    full: Vec<[C64; 4]>,
    /// exp(−d T / 2) for uncoupled states.
    single_full: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) enum Step {
    Timed(Timed),
    /// Instantaneous ideal block rotation (zero-duration pulse).
    Rotation(Timed),
    Z(usize),
    Controlled {
        control: usize,
        targets: Vec<usize>,
        matrix: CMatrix,
    },
}

impl Timed {
    /// `angle` is the full rotation of the n = 1 (or carrier) block.
    pub fn new(layout: &Layout, op: &crate::model::PulseOp, angle: Angle, phi: Angle, duration: f64, decay: &[f64]) -> Timed {
        let blocks = coupled_pairs(layout, op);
        let mut pair_of = vec![NONE; layout.dim()];
        let rate = if duration > 0.0 { angle.radians() / duration } else { angle.radians() };
        let t = if duration > 0.0 { duration } else { 1.0 };
        let pairs: Vec<Pair> = blocks
            .iter()
            .enumerate()
            .map(|(k, &(u, l, scale))| {
                pair_of[u] = k as u32;
                pair_of[l] = k as u32;
                Pair {
                    upper: u as u32,
                    lower: l as u32,
                    w: rate * scale,
                }
            })
            .collect();
        let zero_decay = duration == 0.0;
        let d = |i: u32| if zero_decay { 0.0 } else { decay[i as usize] };
        let full = pairs
            .iter()
            .map(|p| block_exp(p.w, phi.radians(), d(p.upper), d(p.lower), t))
            .collect();
        let single_full = (0..layout.dim())
            .map(|i| if zero_decay { 1.0 } else { (-decay[i] * duration / 2.0).exp() })
            .collect();
        Timed {
            duration,
            phi: phi.radians(),
            pairs,
            pair_of,
            full,
            single_full,
        }
    }
}

/// Dense amplitudes plus the list of indices that may be nonzero. Entries
/// outside `support` are exactly zero.
#[derive(Clone, Debug)]
pub(crate) struct SparseState {
    pub amps: Vec<C64>,
    pub support: Vec<u32>,
    mark: Vec<u32>,
    generation: u32,
    scratch: Vec<u32>,
}

impl SparseState {
    pub fn basis(dim: usize, index: usize) -> SparseState {
        let mut amps = vec![ZERO; dim];
        amps[index] = C64::new(1.0, 0.0);
        SparseState {
            amps,
            support: vec![index as u32],
            mark: vec![0; dim],
            generation: 0,
            scratch: Vec::new(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.support.iter().map(|&i| self.amps[i as usize].norm_sqr()).sum()
    }

    pub fn scale(&mut self, f: f64) {
        for &i in &self.support {
            self.amps[i as usize] *= f;
        }
    }

    pub fn snapshot(&self) -> Vec<(u32, C64)> {
        self.support.iter().map(|&i| (i, self.amps[i as usize])).collect()
    }

    pub fn restore(&mut self, saved: &[(u32, C64)]) {
        for &i in &self.support {
            self.amps[i as usize] = ZERO;
        }
        self.support.clear();
        for &(i, a) in saved {
            self.amps[i as usize] = a;
            self.support.push(i);
        }
    }

    fn next_generation(&mut self) -> u32 {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.generation = 1;
        }
        self.generation
    }

    /// Drop negligible amplitudes (rounding residue of exact zeros).
    fn prune(&mut self) {
        let amps = &mut self.amps;
        self.support.retain(|&i| {
            let keep = amps[i as usize].norm_sqr() > PRUNE;
            if !keep {
                amps[i as usize] = ZERO;
            }
            keep
        });
    }

    /// Rebuild the support from a full scan.
    pub fn rescan(&mut self) {
        self.support = (0..self.amps.len() as u32).filter(|&i| self.amps[i as usize] != ZERO).collect();
    }

    /// Propagate through `seg` for time `t`; `None` means the full duration.
    pub fn propagate(&mut self, seg: &Timed, t: Option<f64>, decay: &[f64]) {
        let gen = self.next_generation();
        let mut out = std::mem::take(&mut self.scratch);
        out.clear();
        for k in 0..self.support.len() {
            let i = self.support[k];
            if self.mark[i as usize] == gen {
                continue;
            }
            let p = seg.pair_of[i as usize];
            if p == NONE {
                self.mark[i as usize] = gen;
                let f = match t {
                    None => seg.single_full[i as usize],
                    Some(t) => (-decay[i as usize] * t / 2.0).exp(),
                };
                self.amps[i as usize] *= f;
                out.push(i);
                continue;
            }
            let pair = seg.pairs[p as usize];
            let (u, l) = (pair.upper as usize, pair.lower as usize);
            self.mark[u] = gen;
            self.mark[l] = gen;
            let m = match t {
                None => seg.full[p as usize],
                Some(t) => block_exp(pair.w, seg.phi, decay[u], decay[l], t),
            };
            let (a, b) = (self.amps[u], self.amps[l]);
            self.amps[u] = m[0] * a + m[1] * b;
            self.amps[l] = m[2] * a + m[3] * b;
            out.push(pair.upper);
            out.push(pair.lower);
        }
        self.scratch = std::mem::replace(&mut self.support, out);
        self.prune();
    }

    pub fn apply_z(&mut self, layout: &Layout, ion: usize) {
        for &i in &self.support {
            if layout.level(i as usize, ion) == Level::E {
                self.amps[i as usize] = -self.amps[i as usize];
            }
        }
    }

    pub fn apply_controlled(&mut self, layout: &Layout, control: usize, targets: &[usize], m: &CMatrix) {
        apply_controlled(&mut self.amps, layout, control, targets, m);
        self.rescan();
    }

    /// a† on the truncated mode.
    pub fn raise(&mut self, layout: &Layout) {
        let mut support: Vec<u32> = self.support.clone();
        support.sort_unstable_by(|a, b| b.cmp(a));
        let mut next = Vec::with_capacity(support.len());
        for i in support {
            let i = i as usize;
            let n = layout.fock(i);
            let a = self.amps[i];
            self.amps[i] = ZERO;
            if n < layout.n_max {
                // Descending order keeps i + 1 from being overwritten early.
                self.amps[i + 1] = a * ((n + 1) as f64).sqrt();
                next.push(i as u32 + 1);
            }
        }
        self.support = next;
        self.prune();
    }

    /// a†a.
    pub fn number(&mut self, layout: &Layout) {
        for &i in &self.support {
            self.amps[i as usize] *= layout.fock(i as usize) as f64;
        }
        self.prune();
    }

    /// |f⟩⟨f| on one ion.
    pub fn project_f(&mut self, layout: &Layout, ion: usize) {
        for &i in &self.support {
            if layout.level(i as usize, ion) != Level::F {
                self.amps[i as usize] = ZERO;
            }
        }
        self.prune();
    }
}
