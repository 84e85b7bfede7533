//! Compare I(τ, h) with its prime-sum approximation over random (τ, h).
use zeta_arg_lab::kernel::Kernel;
use zeta_arg_lab::primesum::{residual_audit, sieve_primes, ResidualAudit};

fn main() -> zeta_arg_lab::Result<()> {
    let kernel = Kernel::default_kernel()?;
    let table = sieve_primes(100_000)?;
    let cfg = ResidualAudit {
        n_samples: 50,
        ..ResidualAudit::default()
    };
    let (report, rows) = residual_audit(&cfg, &kernel, &table, 11)?;
    for r in rows.iter().take(5) {
        let d = &r.decomposition;
        println!(
            "tau {:>10.2} h {:>5.2}: I = {:>8.4}, main {:>8.4}, squares {:>8.4}, residual {:>8.4}",
            d.tau, d.h, r.average, d.s1.im + d.s2.im, d.s3.im, r.residual
        );
    }
    println!("max |residual| = {:.4}", report.stat_f64("max_abs_residual").unwrap_or(f64::NAN));
    Ok(())
}
