//! Gradient marginals of a period-2 law and their consistency between depths.

use sos_ggm::branches::solve;
use sos_ggm::measure::{
    check_consistency, edge_gradient_distribution, marginal, FiniteSubtree, Pin,
};
use sos_ggm::ModelParams;

pub fn run_example() -> sos_ggm::Result<()> {
    let p = ModelParams::new(2, 7.0)?;
    let small = FiniteSubtree::new(2, 1)?;
    let large = FiniteSubtree::new(2, 2)?;
    for b in solve(2, &p)? {
        let m = marginal(&b.law, &large, Pin::Mixed, &p)?;
        let root_edge = edge_gradient_distribution(&m)[0];
        let dev = check_consistency(&b.law, &small, &large, &p, Pin::Mixed)?;
        println!(
            "{:<14} P(-1, 0, +1) on a root edge = ({:.5}, {:.5}, {:.5}), consistency deviation {dev:.1e}",
            b.label, root_edge[0], root_edge[1], root_edge[2]
        );
    }
    let half = FiniteSubtree::half_tree(2, 3)?;
    let m = marginal(&solve(2, &p)?[0].law, &half, Pin::Class(0), &p)?;
    println!(
        "half tree of depth 3: {} edges, total mass {}",
        half.edge_count(),
        m.total()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sos_ggm::Result<()> {
    run_example()
}
