//! Empirical Rademacher complexity of the log-Barron ball against the sample count.

use barronforge::analysis::{rademacher_estimate, RademacherConfig};
use barronforge::metrics::slope_fit;

fn main() -> barronforge::Result<()> {
    let mut pts = Vec::new();
    println!("{:>6} {:>12} {:>12}", "n", "estimate", "Q*sqrt(d/n)");
    for n in [64, 256, 1024, 4096] {
        let est = rademacher_estimate(&RademacherConfig::new(n, 4, 1.0, 9))?;
        println!("{n:>6} {:>12.6} {:>12.6}", est.estimate, est.bound);
        pts.push((n as f64, est.estimate));
    }
    println!("fitted exponent: {:+.3}", slope_fit(&pts)?.slope);
    Ok(())
}
