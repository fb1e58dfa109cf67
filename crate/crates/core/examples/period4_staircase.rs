//! Period-4 counts for k = 2: symmetric branches and the asymmetric pairs.

use sos_ggm::branches::{p4_count, p4_phi, p4_solve};
use sos_ggm::model::critical_constants;
use sos_ggm::ModelParams;

pub fn run_example() -> sos_ggm::Result<()> {
    let c3 = critical_constants(2)?.theta_c3.unwrap();
    for theta in [1.5, 4.0, 6.5, c3 + 1e-3, 9.0] {
        let p = ModelParams::new(2, theta)?;
        let count = p4_count(&p)?;
        let (phi1, phi2) = p4_phi(theta);
        println!(
            "theta = {theta:.6}: nu = {}, phi = ({phi1:.4}, {phi2:.4})",
            count.nu
        );
        for b in p4_solve(&p)? {
            println!("  {:<12} (x, y) = ({:.6}, {:.6})", b.label, b.x, b.y);
        }
    }
    let k3 = p4_count(&ModelParams::new(3, 5.0)?)?;
    println!(
        "k = 3, theta = 5: nu >= {} (lower bound: {})",
        k3.nu, k3.lower_bound
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
