//! Leading nontrivial eigenvalue of the noiseless brickwork transfer matrix
//! by restarted Arnoldi on MPS vectors.

use xebstat::model::ModelParams;
use xebstat::mps::{krylov_leading_eigs, BrickworkSpec, KrylovConfig, MpsConfig};
use xebstat::numerics::PrecisionContext;

fn main() -> xebstat::Result<()> {
    let ctx = PrecisionContext::double();
    let n = 16;
    let cfg = KrylovConfig { subspace_dim: 12, max_restarts: 2, require_convergence: false, ..KrylovConfig::for_context(&ctx) };
    let mps = MpsConfig::for_krylov(&ctx).with_budget(1e-10);
    for (name, a, b) in [("haar", 1.0, 0.0), ("iswap", 10.0 / 9.0, 1.0 / 9.0)] {
        let spec = krylov_leading_eigs(BrickworkSpec::new(n)?, &ModelParams::new(&ctx, 2, a, b, 0.0)?, &cfg, &mps, 2)?;
        for v in &spec.values {
            println!(
                "{name:<6} theta=({:+.6}, {:+.6})  per_layer={:.6}  residual={:.1e}{}",
                v.re,
                v.im,
                v.per_layer,
                v.residual,
                if v.locked { "  (vacuum)" } else { "" }
            );
        }
        println!("{name:<6} converged={} bond={} restarts={}", spec.converged, spec.max_bond, spec.restarts);
    }
    Ok(())
}
