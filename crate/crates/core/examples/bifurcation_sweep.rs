//! Period-2 sweep over theta written as CSV, one column pair per branch.

use sos_ggm::sweep::{sweep, theta_grid};

pub fn run_example() -> sos_ggm::Result<()> {
    let grid = theta_grid(0.5, 10.0, 20)?;
    let s = sweep(2, 2, &grid)?;
    s.write_csv(&mut std::io::stdout().lock(), false)?;
    let births: Vec<_> = s
        .rows
        .windows(2)
        .filter(|w| w[1].nu != w[0].nu)
        .map(|w| (w[0].theta, w[1].theta, w[1].nu))
        .collect();
    for (a, b, nu) in births {
        println!("# count becomes {nu} between theta = {a:.4} and {b:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
