//! Noisy fidelities of the standard and cancelled 3-controlled SWAP.
//!
//! Usage: cswap_fidelity [trajectories] [iterations...]

use std::time::Instant;

use czpulse::circuit::{cswap_decomposition, sequence_unitary};
use czpulse::noisy::{run_trajectories, NoiseParams, RunOptions};
use czpulse::{compile, CompileOptions, LoweringStyle, PhysParams};

fn main() -> czpulse::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n_traj = args.first().copied().unwrap_or(200);
    let iterations = if args.len() > 1 { args[1..].to_vec() } else { vec![1] };
    let seq = cswap_decomposition(3)?;
    let ideal = sequence_unitary(&seq, 5)?;
    let noise = NoiseParams {
        n_traj,
        ..NoiseParams::default()
    };
    let inputs: Vec<usize> = (0..32).collect();
    for k in iterations {
        for (name, optimize) in [("standard", false), ("proposed", true)] {
            let s = compile(&seq, CompileOptions { optimize, style: LoweringStyle::Toffoli })?;
            let opts = RunOptions {
                iterations: Some(k),
                ..RunOptions::default()
            };
            let t = Instant::now();
            let r = run_trajectories(&s, &PhysParams::default(), &noise, &ideal, &inputs, &opts)?;
            println!("== {name}, {:.1}s", t.elapsed().as_secs_f64());
            print!("{}", r.summary());
        }
    }
    Ok(())
}
