//! Build a width-(d+4) network for a synthetic target, check the report and
//! save the network.

use barronforge::metrics::{l2_error, QuadratureSpec};
use barronforge::spectral::synth_target;
use barronforge::{build_l2, BuildConfig, ReluNetwork, Variant};

fn main() -> barronforge::Result<()> {
    let f = synth_target(6, 32, 3.0, 11)?;
    let config = BuildConfig::new(256, Variant::L2, 42);
    let (net, report) = build_l2(&f, &config)?;

    println!("accepted       : {} after {} retries", report.accepted, report.retries_used);
    println!("L2 error       : {:.4e} ± {:.1e}", report.error_estimate, report.error_std_err);
    println!("error bound    : {:.4e}", report.error_bound);
    println!("sum of depths  : {} (budget {:.1})", report.total_depth, report.depth_bound);
    println!("network        : width {}, {} hidden layers, {} parameters", net.width(), net.hidden_layers(), net.param_count());

    // an independent quadrature draw gives a consistent estimate
    let check = l2_error(&f, &net, &QuadratureSpec::monte_carlo(20_000, 7))?;
    println!("fresh estimate : {:.4e} ± {:.1e}", check.estimate, check.std_err);

    let path = std::env::temp_dir().join("barronforge_l2_network.json");
    net.save(&path)?;
    let back = ReluNetwork::load(&path)?;
    let x = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    assert_eq!(back.eval_scalar(&x)?, net.eval_scalar(&x)?);
    println!("saved to {}", path.display());
    Ok(())
}
