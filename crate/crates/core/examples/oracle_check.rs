//! Brute-force comparison of the reduced and MPS engines at small N.

use xebstat::cli::commands::oracle_checks;
use xebstat::cli::RunConfig;
use xebstat::numerics::BigFloat;

fn main() -> xebstat::Result<()> {
    for text in [
        "geometry = a2a\nsites = 6\ngate = haar\nnoise = depol:0.02\nseed = 7\n",
        "geometry = 1d\nsites = 8\ngate = iswap\nnoise = depol:0.02\ndepth = 20\nseed = 7\n",
    ] {
        let cfg = RunConfig::parse(text)?;
        let ctx = cfg.context()?;
        for c in oracle_checks::<BigFloat>(&ctx, &cfg)? {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            println!("{:<6} {:<26} {:.2e} <= {:.0e}  {status}", cfg.geometry(), c.name, c.deviation, c.tolerance);
        }
    }
    Ok(())
}
