//! Brickwork evolution of a 1D chain as an MPS.

use xebstat::model::ModelParams;
use xebstat::mps::{evolve_1d, MpsConfig};
use xebstat::noise::gamma_from_epsilon;
use xebstat::numerics::PrecisionContext;

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::double();
    let n = 40;
    let gamma = gamma_from_epsilon(&(0.5 / n as f64), 2)?;
    let ev = evolve_1d(&ModelParams::haar(&ctx, 2, gamma)?, n, 40, MpsConfig::for_context(&ctx))?;
    for (r, rec) in ev.trace.rows.iter().zip(&ev.noisy).step_by(5) {
        println!(
            "d={:>3}  F={:.6e}  chi_B={}  bond={}  discarded={:.1e}",
            r.depth,
            r.fidelity,
            r.chi_b.map_or("-".into(), |x| format!("{x:.5}")),
            rec.max_bond,
            rec.accumulated_discard
        );
    }
    Ok(())
}
