//! The exact ReLU building blocks: triangle maps, the γ tail, and the cosine
//! representation they combine into.

use std::f64::consts::PI;

use barronforge::metrics::cos_lemma_integral;
use barronforge::network::{build_beta_chain, build_gamma_tail, gamma, mod1};
use barronforge::ReluNetwork;

fn main() -> barronforge::Result<()> {
    let depth = 5;
    let chain = build_beta_chain(depth);
    let r = 0.2;
    let net = ReluNetwork::compose(&build_gamma_tail(r)?, &chain)?;
    println!("gamma tail after {depth} triangle maps: width {}, {} hidden layers", net.width(), net.hidden_layers());

    let n = (1u64 << depth) as f64;
    let mut worst = 0.0f64;
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        worst = worst.max((net.eval_scalar(&[t])? - gamma(mod1(n * t), r)).abs());
    }
    println!("max |network - gamma(2^L t mod 1, r)| = {worst:.2e}");

    for (n, t) in [(1u64, 0.1), (7, 0.33), (64, 0.9)] {
        let integral = cos_lemma_integral(mod1(n as f64 * t), 100_000);
        println!("n={n:<3} t={t:<5} integral={integral:+.12}  cos(2πnt)={:+.12}", (2.0 * PI * n as f64 * t).cos());
    }
    Ok(())
}
