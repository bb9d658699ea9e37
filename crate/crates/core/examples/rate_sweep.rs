//! Convergence of the median error in m, fitted on a log-log scale, for a few dimensions.
//!
//! Individual builds scatter widely, so the fit needs several seeds per cell.

use barronforge::cli::{run_sweep, SweepConfig};

fn main() -> barronforge::Result<()> {
    let cfg = SweepConfig {
        dims: vec![4, 8],
        ms: vec![16, 64, 256, 1024],
        seeds: (1..=10).collect(),
        ..SweepConfig::default()
    };
    let res = run_sweep(&cfg)?;
    for s in &res.slopes {
        if let Some(fit) = s.fit {
            println!("d={:<2} slope {:+.3} (r² {:.3})", s.d, fit.slope, fit.r2);
        }
    }
    Ok(())
}
