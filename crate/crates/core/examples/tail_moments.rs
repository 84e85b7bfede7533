//! Tail probabilities and exponential moments of π S(uT) from random heights.
use zeta_arg_lab::stats::{draw_samples, exp_moment, gaussian_tail_reference, moment_from_tails, tail_probability, SampleMode};

fn main() -> zeta_arg_lab::Result<()> {
    let t = 1e5;
    let set = draw_samples(t, 5000, 3, SampleMode::Raw, None)?;
    println!("{} samples at T = {t:e}, {} skipped", set.len(), set.skipped.len());
    let curve = tail_probability(&set, &[0.5, 1.0, 1.5, 2.0, 3.0])?;
    for (i, v) in curve.v_grid.iter().enumerate() {
        let reference = if *v > 1.0 {
            let (g, ld) = gaussian_tail_reference(*v, t, 0.1, 0.1)?;
            format!("reference terms {g:.3e} / {ld:.3e}")
        } else {
            String::new()
        };
        println!("P[|pi S| >= {v}] = {:.4}  [{:.4}, {:.4}]  {reference}", curve.p_hat[i], curve.ci_lo[i], curve.ci_hi[i]);
    }
    for k in [0.5, 1.0] {
        let m = exp_moment(&set, k)?;
        let rebuilt = moment_from_tails(&set, k, 0.01)?;
        println!("k = {k}: nu = {:.4} +- {:.4}, from tails {:.4}, |Z| moment {:.4}", m.nu_hat, m.stderr, rebuilt, m.mu_hat.unwrap_or(f64::NAN));
    }
    Ok(())
}
