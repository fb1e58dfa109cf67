//! Compare the closed-form branches with the brute-force multistart solver.

use sos_ggm::branches::solve;
use sos_ggm::oracle::oracle_solve;
use sos_ggm::ModelParams;

pub fn run_example() -> sos_ggm::Result<()> {
    for (q, theta) in [(2, 7.0), (3, 10.0), (4, 8.0)] {
        let p = ModelParams::new(2, theta)?;
        let laws: Vec<_> = solve(q, &p)?.into_iter().map(|b| b.law).collect();
        let mut report = oracle_solve(q, &p)?;
        let a = report.compare(&laws);
        println!(
            "q = {q}, theta = {theta}: {} expected, {} found, matched {}, missing {}, extra {}, max residual {:.1e}",
            laws.len(),
            report.found_solutions.len(),
            a.matched,
            a.missing.len(),
            a.extra.len(),
            report.max_residual
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
