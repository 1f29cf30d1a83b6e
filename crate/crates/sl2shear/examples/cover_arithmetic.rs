//! Arithmetic in the simply connected cover of SL(2).
//!
//! The cover is sl(2) as a set; the group operation unwraps the rotation
//! angle. Alternating shear words with switching time s_n = 2 cos(pi/n)
//! climb exactly to the central elements (n-2) pi/2 U.
//!
//! ```bash
//! cargo run --example cover_arithmetic
//! ```

use sl2shear::algebra::AlgebraElement;
use sl2shear::cover::{compose, cover_map, exp_tilde, CoverElement};
use sl2shear::solver::{central_alt, eval_mu_n, eval_pn, s_n};
use std::f64::consts::PI;

fn main() {
    // exp in the cover vs the covering map
    let x = AlgebraElement::new(0.4, -0.2, 1.9);
    let e = exp_tilde(&x);
    println!("exp~({:.2}, {:.2}, {:.2}) = ({:.6}, {:.6}, {:.6})", x.h, x.t, x.u, e.h, e.t, e.u);
    let g = cover_map(&e);
    println!("downstairs: [{:.6}, {:.6}; {:.6}, {:.6}]", g.a, g.b, g.c, g.d);

    // the composition tracks full rotation angles, not just mod 2 pi
    let quarter = exp_tilde(&AlgebraElement::U.scale(PI / 2.0));
    let mut acc = CoverElement::ZERO;
    for _ in 0..5 {
        acc = compose(&acc, &quarter);
    }
    println!("\nfive quarter turns: u = {:.9} (= 5 pi/2 = {:.9})", acc.u, 2.5 * PI);

    // central elements reached by alternating shear words
    println!("\nalternating words A_n(s_n) with s_n = 2 cos(pi/n):");
    for n in 3..=8 {
        let (s, a) = central_alt(n).unwrap();
        println!(
            "  n = {n}: s_n = {s:.12}, A_n = ({:+.2e}, {:+.2e}, {:.9}) -> target {:.9}",
            a.h,
            a.t,
            a.u,
            (n as f64 - 2.0) * PI / 2.0
        );
    }

    // p_n vanishes at s_n / 2
    println!("\np_n(s_n / 2):");
    for n in 3..=10 {
        println!("  n = {n:>2}: {:+.3e}", eval_pn(n, s_n(n) / 2.0).unwrap());
    }

    // the mu_N thresholds interpolate between 2s and s
    println!("\nmu_2 on [s_4, s_6] = [sqrt2, sqrt3]:");
    for k in 0..=4 {
        let s = s_n(4) + (s_n(6) - s_n(4)) * k as f64 / 4.0;
        println!("  mu_2({s:.4}) = {:.6}", eval_mu_n(2, s).unwrap());
    }
}
