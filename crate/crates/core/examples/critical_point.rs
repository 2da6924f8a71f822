//! Critical noise strength for all-to-all circuits: the closed form and the
//! crossing of the two spectral branches at finite N.

use xebstat::a2a::{critical_point, kink_locator, CriticalMode};
use xebstat::numerics::PrecisionContext;

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::double();
    for alpha in [0.4, 0.8, 1.0, 10.0 / 9.0] {
        let c = critical_point(&ctx, &alpha, 2, CriticalMode::Analytic)?;
        println!("alpha={alpha:.4}  epsN_c={c:.5}");
    }
    let grid: Vec<f64> = (6..=12).map(|i| i as f64 / 10.0).collect();
    let kink = kink_locator(&ctx, 40, 2, &1.0, &grid)?;
    println!("N=40 Haar: branches cross at epsN = {:.5}", kink.eps_n);
    Ok(())
}
