//! Locate the period-3 transition point and list the solutions on either side.

use sos_ggm::branches::{p3_find_theta_c1, p3_solve};
use sos_ggm::ModelParams;

pub fn run_example() -> sos_ggm::Result<()> {
    for k in [2, 3] {
        let b = p3_find_theta_c1(k)?;
        println!(
            "k = {k}: transition in [{:.7}, {:.7}], {} -> {} solutions",
            b.lo, b.hi, b.count_lo, b.count_hi
        );
    }
    let p = ModelParams::new(2, 10.0)?;
    let s = p3_solve(&p)?;
    println!("k = 2, theta = 10: {} solutions", s.branches.len());
    for b in &s.branches {
        println!("  {:<12} law = {:?}", b.label, b.law.values());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
