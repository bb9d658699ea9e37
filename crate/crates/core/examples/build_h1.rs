//! H¹ build on a box outside the unit cube: the target is rescaled, the
//! network is built on the unit domain, and the affine map is folded back in.

use barronforge::metrics::{l2_error, QuadratureSpec};
use barronforge::{build_h1, BuildConfig, DomainBox, FourierMode, SpectralTarget, Variant};

fn main() -> barronforge::Result<()> {
    let domain = DomainBox::new(vec![-1.0, 0.0, 2.0], vec![1.0, 1.5, 3.0])?;
    let f = SpectralTarget::new(
        3,
        domain,
        vec![
            FourierMode::new(vec![0.5, 0.0, -0.5], 1.0, 0.1)?,
            FourierMode::new(vec![0.0, 1.0, 0.5], 0.4, 0.7)?,
            FourierMode::new(vec![-1.5, 0.5, 0.0], 0.1, 0.0)?,
        ],
    )?;
    let config = BuildConfig::new(512, Variant::H1, 3);
    let (net, report) = build_h1(&f, &config)?;

    println!("rescale        : x/{:.4} + {:?}", report.rescale.scale, report.rescale.shift);
    println!("C factor       : {:.4} (depth factor {:.4})", report.c_factor, report.depth_factor);
    println!("H1 error       : {:.4e} (bound {:.4e}), accepted {}", report.error_estimate, report.error_bound, report.accepted);
    let l2 = l2_error(&f, &net, &QuadratureSpec::monte_carlo(8192, 5))?;
    println!("L2 error       : {:.4e}", l2.estimate);

    let x = [0.25, 0.75, 2.5];
    println!("f(x) = {:+.5}, F(x) = {:+.5}", f.evaluate(&x)?, net.eval_scalar(&x)?);
    println!("grad f(x) = {:?}", f.gradient(&x)?);
    println!("grad F(x) = {:?}", net.grad_scalar(&x)?);
    Ok(())
}
