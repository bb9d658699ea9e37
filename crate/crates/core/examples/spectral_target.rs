//! Define a spectral target, inspect its Barron-type norms and round-trip it through JSON.

use barronforge::spectral::synth_target;
use barronforge::{DomainBox, FourierMode, NormKind, SpectralTarget};

fn main() -> barronforge::Result<()> {
    let f = SpectralTarget::new(
        2,
        DomainBox::unit(2),
        vec![
            FourierMode::new(vec![1.0, -2.0], 0.8, 0.0)?,
            FourierMode::new(vec![0.5, 0.5], 0.3, 0.25)?,
        ],
    )?;
    println!("f(0.2, 0.7)      = {:.6}", f.evaluate(&[0.2, 0.7])?);
    println!("grad f(0.2, 0.7) = {:?}", f.gradient(&[0.2, 0.7])?);
    for kind in [NormKind::B0, NormKind::Blog, NormKind::Bs(1.0), NormKind::BsLog(1.0)] {
        println!("{kind:>6} norm = {:.6}", f.norm(kind));
    }

    let json = f.to_json_string()?;
    assert_eq!(SpectralTarget::from_json_str(&json)?, f);

    // the synthetic family used by the convergence experiments
    let g = synth_target(8, 64, 3.0, 1)?;
    println!(
        "synthetic d=8: {} modes, Blog/B0 = {:.4}",
        g.modes().len(),
        g.norm(NormKind::Blog) / g.norm(NormKind::B0)
    );
    Ok(())
}
