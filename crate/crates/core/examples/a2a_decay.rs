//! Fidelity and XEB against depth for all-to-all Haar circuits, N = 40.

use xebstat::a2a::evolve;
use xebstat::model::ModelParams;
use xebstat::noise::gamma_from_epsilon;
use xebstat::numerics::{BigFloat, PrecisionContext, Real};

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::default();
    let n = 40;
    for eps_n in [0.5, 2.0] {
        let gamma = gamma_from_epsilon(&ctx.real::<BigFloat>(eps_n / n as f64), 2)?;
        let trace = evolve(&ModelParams::a2a(&ctx, 2, ctx.one(), gamma)?, n, 60, None)?;
        println!("epsN = {eps_n}");
        for r in trace.rows.iter().step_by(10) {
            println!(
                "  d={:>3}  F={:.6e}  chi={:.6e}  dlnchi={}",
                r.depth,
                r.fidelity.to_f64(),
                r.chi.to_f64(),
                r.dlnchi.as_ref().map_or("-".into(), |x| format!("{:.5}", x.to_f64()))
            );
        }
        println!("  plateau from d = {:?}", trace.plateau_onset);
    }
    Ok(())
}
