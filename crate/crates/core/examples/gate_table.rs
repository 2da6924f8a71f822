//! Gate invariants and (α, β) for a handful of named gates, at 256 bits.

use xebstat::gates::{resolve_gate, GateSpec};
use xebstat::numerics::{BigFloat, PrecisionContext, Real};

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::default();
    println!("{:<14} {:>8} {:>8} {:>10} {:>10} {:>8} {:>8}  region", "gate", "|G1|", "G2", "alpha", "beta", "R", "D");
    for spec in ["cnot", "swap", "iswap", "cz", "haar", "fsim:1.5707963267948966:0.5235987755982988", "pe:0.3"] {
        let info = resolve_gate::<BigFloat>(&ctx, &GateSpec::parse(spec)?, 2)?;
        let gao = info.gao();
        let (g1, g2) = match &info.invariants {
            Some(i) => (format!("{:.4}", i.abs_g1.to_f64()), format!("{:.4}", i.g2.to_f64())),
            None => ("-".into(), "-".into()),
        };
        let name = spec.split(':').next().unwrap();
        println!(
            "{name:<14} {g1:>8} {g2:>8} {:>10.6} {:>10.6} {:>8.4} {:>8.4}  {}",
            info.params.alpha.to_f64(),
            info.params.beta.to_f64(),
            gao.r.to_f64(),
            gao.d.to_f64(),
            info.region()
        );
    }
    Ok(())
}
