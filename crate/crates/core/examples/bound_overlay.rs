//! Mean squared ARBK error over many sampling seeds against the
//! expected-error bounds computed from measured paving constants.
//!
//!     cargo run --release --example bound_overlay

use kmeq::harness::{compare_with_bounds, ExperimentConfig, Family, MethodSpec};

fn main() -> kmeq::error::Result<()> {
    let family = Family::Gaussian {
        m: 120,
        n: 24,
        p: 24,
        q: 120,
    };
    let method: MethodSpec = "arbk:12:12".parse()?;
    let mut config = ExperimentConfig::new(family, vec![method]);
    config.trials = 50;
    config.bound_iters = 40;
    config.output_dir = Some(std::env::temp_dir().join("kmeq_bound_overlay"));

    let cmp = compare_with_bounds(&config)?;
    if let Some(f) = &cmp.factors {
        println!(
            "gamma_hat {:.4}  gamma_tilde {:.4}  coupling {:.4}",
            f.gamma_hat, f.gamma_tilde, f.coupling
        );
    }
    let bx = cmp.bound_x.as_deref().unwrap_or_default();
    let by = cmp.bound_y.as_deref().unwrap_or_default();
    println!("{:>4} {:>12} {:>12} {:>12} {:>12}", "k", "E|X-X*|^2", "bound", "E|Y-Y*|^2", "bound");
    for k in (0..=config.bound_iters).step_by(5) {
        println!(
            "{k:>4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            cmp.empirical_x[k],
            bx.get(k).copied().unwrap_or(f64::NAN),
            cmp.empirical_y[k],
            by.get(k).copied().unwrap_or(f64::NAN)
        );
    }
    for w in &cmp.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
