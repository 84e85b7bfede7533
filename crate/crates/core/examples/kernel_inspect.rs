//! Build both kernel families, print a few values and run the axiom checks.
use zeta_arg_lab::kernel::{check_invariants, Kernel, KernelSpec};

fn main() -> zeta_arg_lab::Result<()> {
    for spec in [KernelSpec::default(), KernelSpec::fejer()] {
        let k = Kernel::build(spec)?;
        println!("{} (Λ = {})", spec.family, k.support_halfwidth());
        for x in [0.0, 0.5, 1.0, 2.0, 5.0] {
            println!("  phi({x}) = {:.6e}   phi_hat({}) = {:.6}", k.phi(x), x / 5.0, k.phi_hat(x / 5.0));
        }
        println!("  mass in [-1, 1] = {:.6}", k.mass_between(-1.0, 1.0));
        for (name, c) in check_invariants(&k) {
            println!("  {name:<18} {:<5} worst {:.2e}", if c.passed { "ok" } else { "FAIL" }, c.worst);
        }
    }
    Ok(())
}
