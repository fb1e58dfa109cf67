//! Period-2 boundary laws for k = 2 across the staircase 1, 2, 4, 6.

use sos_ggm::branches::{p2_count, solve};
use sos_ggm::ModelParams;

pub fn run_example() -> sos_ggm::Result<()> {
    for theta in [1.0, 3.0, 6.5, 7.0, 9.0] {
        let p = ModelParams::new(2, theta)?;
        let count = p2_count(&p)?;
        println!(
            "theta = {theta}: nu = {}, census = {:?}",
            count.nu, count.census
        );
        for b in solve(2, &p)? {
            println!(
                "  {:<14} x = {:<22} y = {:<22} residual {:.1e}",
                b.label, b.x, b.y, b.residual
            );
        }
    }
    let at_c3 = p2_count(&ModelParams::new(
        2,
        sos_ggm::model::critical_constants(2)?.theta_c3.unwrap(),
    )?)?;
    println!(
        "at theta_c3: nu = {} from the threshold rule, {} distinct solutions found",
        at_c3.nu, at_c3.census.raw
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
