//! Moments of a prime Dirichlet polynomial against the k!(Σ|a(p)|²/p)^k reference.
use zeta_arg_lab::cli::default_prime_cutoff;
use zeta_arg_lab::kernel::Kernel;
use zeta_arg_lab::primesum::{kernel_coefficients, mean_value_check, sieve_primes};

fn main() -> zeta_arg_lab::Result<()> {
    let kernel = Kernel::default_kernel()?;
    let t = 1e6;
    for k in 1..=3 {
        let x = default_prime_cutoff(t, k);
        let table = sieve_primes(x as u64)?;
        let coeffs = kernel_coefficients(&kernel, x.ln(), x, &table)?;
        let r = mean_value_check(&coeffs, x, k, t, 2000, 5)?;
        println!(
            "k = {k}, x = {x}: moment {:.4} reference {:.4} ratio {:.3} ({})",
            r.stat_f64("moment").unwrap_or(f64::NAN),
            r.stat_f64("reference").unwrap_or(f64::NAN),
            r.stat_f64("ratio").unwrap_or(f64::NAN),
            r.verdict
        );
    }
    Ok(())
}
