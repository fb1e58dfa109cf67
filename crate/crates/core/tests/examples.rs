//! Every example runs to completion.

#[path = "../examples/bifurcation_sweep.rs"]
mod bifurcation_sweep;
#[path = "../examples/constants.rs"]
mod constants;
#[path = "../examples/measure_consistency.rs"]
mod measure_consistency;
#[path = "../examples/oracle_crosscheck.rs"]
mod oracle_crosscheck;
#[path = "../examples/period2_census.rs"]
mod period2_census;
#[path = "../examples/period3_threshold.rs"]
mod period3_threshold;
#[path = "../examples/period4_staircase.rs"]
mod period4_staircase;

#[test]
fn bifurcation_sweep_runs() {
    bifurcation_sweep::run_example().unwrap();
}

#[test]
fn constants_runs() {
    constants::run_example().unwrap();
}

#[test]
fn measure_consistency_runs() {
    measure_consistency::run_example().unwrap();
}

#[test]
fn oracle_crosscheck_runs() {
    oracle_crosscheck::run_example().unwrap();
}

#[test]
fn period2_census_runs() {
    period2_census::run_example().unwrap();
}

#[test]
fn period3_threshold_runs() {
    period3_threshold::run_example().unwrap();
}

#[test]
fn period4_staircase_runs() {
    period4_staircase::run_example().unwrap();
}
