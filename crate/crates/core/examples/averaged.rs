//! The smoothed argument I(τ, H) at one height for several scales, next to π S(τ).
use zeta_arg_lab::averaging::averaged_im_log_zeta;
use zeta_arg_lab::kernel::Kernel;
use zeta_arg_lab::rszeta::im_log_zeta;

fn main() -> zeta_arg_lab::Result<()> {
    let kernel = Kernel::default_kernel()?;
    let tau = 123_456.789;
    println!("pi S(tau) = {:.6}", im_log_zeta(tau)?);
    for h in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let a = averaged_im_log_zeta(tau, h, &kernel, 1e-6)?;
        println!(
            "H = {h:>4}: I = {:>10.6}  (quad error {:.1e}, {} zeros in [{:.1}, {:.1}])",
            a.value, a.quad_error, a.zeros, a.window[0], a.window[1]
        );
    }
    Ok(())
}
