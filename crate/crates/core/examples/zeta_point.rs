//! θ, Z, N and S at a handful of heights, including a large one.
use zeta_arg_lab::rszeta::{critical_sample, drift_check};

fn main() -> zeta_arg_lab::Result<()> {
    println!("{:>12} {:>16} {:>14} {:>9} {:>10}", "t", "theta", "Z", "N", "S");
    for t in [20.0, 100.0, 1000.0, 14_159.265, 1e6 + 0.5, 1e7] {
        let s = critical_sample(t)?;
        println!("{:>12} {:>16.6} {:>14.9} {:>9} {:>10.6}", s.t, s.theta, s.z, s.n_zeros, s.s);
    }
    let d = drift_check(5_000.0, 5_001.0)?;
    println!("drift between 5000 and 5001: {d:.4}");
    Ok(())
}
