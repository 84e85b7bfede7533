//! Locate zeros up to a height and compare them with the bundled reference table.
use zeta_arg_lab::rszeta::locate_zeros;
use zeta_arg_lab::zerotable::{load_table_file, validate};

fn main() -> zeta_arg_lab::Result<()> {
    let t_max: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000.0);
    let zeros = locate_zeros(2.0, t_max)?;
    println!("{} zeros in (0, {t_max}]; first {:.9}, last {:.9}", zeros.len(), zeros.ordinates[0], zeros.ordinates[zeros.len() - 1]);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/zeros_to_1e4.txt");
    let table = load_table_file(path)?;
    let report = validate(&zeros, &table, 1e-6);
    println!("{}", report.to_json());
    Ok(())
}
