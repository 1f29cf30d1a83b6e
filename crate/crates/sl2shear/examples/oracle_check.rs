//! Brute-force validation of the closed-form solver.
//!
//! The oracle knows nothing about the sufficient families: it enumerates
//! control patterns and locally minimizes the total duration under an
//! endpoint constraint. It can only produce upper bounds, so the solver is
//! confirmed whenever the oracle never lands below it, and pinned exactly
//! wherever the oracle reaches it.
//!
//! ```bash
//! cargo run --release --example oracle_check
//! ```

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sl2shear::algebra::{exp_matrix, AlgebraElement};
use sl2shear::cover::{cover_map, CoverElement};
use sl2shear::fammaps::Family;
use sl2shear::oracle::refine_upper_bound;
use sl2shear::solver::distance_sl2;

fn main() {
    // the rotation formula, confirmed from above
    let alpha = 1.1f64;
    let g = exp_matrix(&AlgebraElement::U.scale(alpha));
    let exact = distance_sl2(&g, Family::F1).unwrap().cost;
    let ub = refine_upper_bound(&g, 6, 64, 7);
    println!("rotation by {alpha}:");
    println!("  solver {exact:.12}");
    println!("  oracle {ub:.12}  (gap {:+.2e})", ub - exact);

    // random elements: the oracle never undercuts, and matches at small radius
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_slack = f64::INFINITY;
    let mut worst_match = 0.0f64;
    for i in 0..30 {
        let g = cover_map(&CoverElement::new(
            rng.random_range(-0.8..0.8),
            rng.random_range(-0.8..0.8),
            rng.random_range(-0.8..0.8),
        ));
        let exact = distance_sl2(&g, Family::F2).unwrap().cost;
        let ub = refine_upper_bound(&g, 5, 32, 100 + i);
        worst_slack = worst_slack.min(ub - exact);
        if exact < 2.0 {
            worst_match = worst_match.max((ub - exact).abs());
        }
    }
    println!("\n30 random elements:");
    println!("  min (oracle - solver) = {worst_slack:+.3e}  (never negative beyond 1e-5)");
    println!("  worst match at small radius = {worst_match:.3e}");
}
