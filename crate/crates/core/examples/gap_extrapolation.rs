//! Noiseless gap of the all-to-all model extrapolated in 1/N.

use xebstat::a2a::gap_extrapolation;
use xebstat::numerics::{BigFloat, PrecisionContext, Real};

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::new(128)?;
    for alpha in [ctx.ratio::<BigFloat>(1, 2), ctx.one(), ctx.ratio(10, 9)] {
        let g = gap_extrapolation(&ctx, &alpha, 2, &[20, 40, 60, 80, 100])?;
        let gaps: Vec<String> = g.gaps.iter().map(|x| format!("{:.5}", x.to_f64())).collect();
        println!(
            "alpha={:.4}  gaps=[{}]  intercept={:.6}  predicted={:.6}",
            alpha.to_f64(),
            gaps.join(", "),
            g.intercept().to_f64(),
            1.0 - 0.6 * alpha.to_f64()
        );
    }
    Ok(())
}
