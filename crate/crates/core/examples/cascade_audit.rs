//! The iteration-event implication and the union bound at a small scale.
use zeta_arg_lab::averaging::{iteration_event_check, IterationParams};
use zeta_arg_lab::kernel::Kernel;
use zeta_arg_lab::stats::{union_bound_audit, UnionBoundParams};

fn main() -> zeta_arg_lab::Result<()> {
    let kernel = Kernel::default_kernel()?;
    let p = IterationParams { t_max: 1e6, v: 3.0, eps: 0.25, k: 2.0, a: 4.0, tol: 1e-3 };
    let r = iteration_event_check(&p, 2000, &kernel, 1)?;
    println!("iteration event: {} (premises {}, counterexamples {})", r.verdict,
        r.stat_u64("premises_hit").unwrap_or(0), r.stat_u64("counterexamples").unwrap_or(0));
    let u = UnionBoundParams { t_max: 1e6, v: 3.0, eps: 0.25, k: 2.0, tol: 1e-2, slack: 0.0 };
    let r = union_bound_audit(&u, &kernel, 2000, 2)?;
    println!("union bound: {}\n{}", r.verdict, r.to_json());
    Ok(())
}
