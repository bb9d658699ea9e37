//! Norm series of the two embedding counterexamples.

use barronforge::analysis::{embedding_series, ShellConstruction, ShellSpectrum};

fn main() -> barronforge::Result<()> {
    let cases = [
        ("c_k shells, s > d/2", ShellSpectrum { d: 4, s: 3.0, construction: ShellConstruction::Prop42, k_max: 60 }),
        ("c_k shells, s = d/2", ShellSpectrum { d: 2, s: 1.0, construction: ShellConstruction::Prop42, k_max: 60 }),
        ("spikes, p = 3", ShellSpectrum { d: 3, s: 1.5, construction: ShellConstruction::Prop43 { p: 3.0 }, k_max: 60 }),
    ];
    for (name, spec) in cases {
        let t = embedding_series(&spec)?;
        let last = t.rows.last().expect("K >= 1");
        println!("{name}");
        println!(
            "  H^s  : log2 partial sum {:>10.3}  convergent {:<5}  last ratio {:.4}",
            last.log2_hs_partial, t.hs.convergent, t.hs.last_ratio
        );
        println!(
            "  B^log: log2 partial sum {:>10.3}  convergent {:<5}  last ratio {:.4}",
            last.log2_blog_partial, t.blog.convergent, t.blog.last_ratio
        );
    }
    Ok(())
}
