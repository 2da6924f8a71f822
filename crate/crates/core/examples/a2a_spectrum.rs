//! Leading eigenvalues of the reduced all-to-all transfer matrix with sector
//! labels and fidelity couplings.

use xebstat::a2a::{reduced_spectrum, ReducedTransfer};
use xebstat::model::ModelParams;
use xebstat::noise::gamma_from_epsilon;
use xebstat::numerics::{PrecisionContext, Real};

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::double();
    let n = 40;
    let gamma = gamma_from_epsilon(&(0.5 / n as f64), 2)?;
    let t = ReducedTransfer::new(&ModelParams::a2a(&ctx, 2, 1.0, gamma)?, n)?;
    let (spec, c) = reduced_spectrum(&t, &ctx, 6)?;
    for (i, e) in spec.entries.iter().enumerate() {
        println!(
            "{i}: Lambda={:.10} label={} c_F={}",
            e.value.to_f64(),
            e.label.map_or("-".into(), |l| l.to_string()),
            c.fidelity[i].map_or("-".into(), |x| format!("{x:.4e}"))
        );
    }
    Ok(())
}
