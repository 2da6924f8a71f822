//! Channel summaries for the built-in noise models.

use xebstat::noise::{stat_params_from_kraus, ChannelSpec};
use xebstat::numerics::{PrecisionContext, Real};

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::new(128)?;
    for spec in ["depol:0.01", "dephase:0.01", "ampdamp:0.01"] {
        let ch = ChannelSpec::parse(spec)?.build::<xebstat::numerics::BigFloat>(&ctx, 2)?;
        let p = stat_params_from_kraus(&ch);
        println!(
            "{spec:<14} r={:.6e} u={:.6} mu={:.3e} gamma1={:.6e} gamma2={:.6e} delta2={:.3e} unital={}",
            p.r.to_f64(),
            p.u.to_f64(),
            p.mu.to_f64(),
            p.gamma1.to_f64(),
            p.gamma2.to_f64(),
            p.delta2.to_f64(),
            p.is_unital()
        );
    }
    Ok(())
}
