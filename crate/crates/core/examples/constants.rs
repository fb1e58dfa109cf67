//! Critical values of theta for small branching numbers.

use sos_ggm::model::critical_constants;

pub fn run_example() -> sos_ggm::Result<()> {
    println!(
        "{:>2} {:>10} {:>10} {:>10} {:>12}",
        "k", "theta_0", "theta_cr", "theta_c", "theta_c3"
    );
    for k in 2..=6 {
        let c = critical_constants(k)?;
        let c3 = c.theta_c3.map_or("-".to_string(), |v| format!("{v:.9}"));
        println!(
            "{k:>2} {:>10.6} {:>10.6} {:>10.6} {c3:>12}",
            c.theta_0, c.theta_cr, c.theta_c
        );
        assert!(c.theta_0 < c.theta_cr && c.theta_cr < c.theta_c);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
