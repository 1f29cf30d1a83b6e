//! Reducing an arbitrary two-slip system to the canonical one.
//!
//! Any pair of independent rank-1 shear directions is a rotated, sheared
//! and scaled copy of the canonical pair (P, -Q); the dissipation distance
//! transforms accordingly: T_S(g) = mu^{-1} T(g0^{-1} g g0).
//!
//! ```bash
//! cargo run --example two_slip
//! ```

use sl2shear::algebra::{adjoint, exp_matrix, mat3_apply, AlgebraElement};
use sl2shear::fammaps::Family;
use sl2shear::solver::{distance_two_slip, normalize_two_slip, SlipPair};

fn main() {
    // slips must be traceless rank-1 matrices: points of the double cone
    let s1 = AlgebraElement::P.scale(2.0);
    let s2 = AlgebraElement::Q.scale(-3.0);
    let pair = SlipPair::new(s1, s2).unwrap();

    let (mu, g0) = normalize_two_slip(&pair).unwrap();
    println!("slip pair S1 = 2P, S2 = -3Q");
    println!("  mu = {mu:.12} (expected sqrt6 = {:.12})", 6.0f64.sqrt());
    println!("  g0 = [{:.6}, {:.6}; {:.6}, {:.6}]", g0.a, g0.b, g0.c, g0.d);

    // the defining property: Ad(g0^{-1}) maps the slips onto mu P, -mu Q
    let ad = adjoint(&g0.inverse()).unwrap();
    let c1 = mat3_apply(&ad, &s1);
    let c2 = mat3_apply(&ad, &s2);
    println!("  Ad(g0^-1) S1 = ({:.9}, {:.9}, {:.9})", c1.h, c1.t, c1.u);
    println!("  Ad(g0^-1) S2 = ({:.9}, {:.9}, {:.9})", c2.h, c2.t, c2.u);

    // distances scale by 1/mu
    let g = exp_matrix(&AlgebraElement::new(0.3, 0.5, -0.4));
    let d = distance_two_slip(&pair, &g, Family::F1).unwrap();
    println!("\ndistance of a test element under this slip system: {d:.12}");

    let doubled = SlipPair::new(s1.scale(2.0), s2.scale(2.0)).unwrap();
    let d2 = distance_two_slip(&doubled, &g, Family::F1).unwrap();
    println!("with both slips doubled: {d2:.12} (exactly half)");

    // a skewed pair: one slip oblique to the axes
    let oblique = AlgebraElement::new(0.6, 0.8, 1.0); // on the cone: h^2+t^2 = u^2
    let pair = SlipPair::new(AlgebraElement::P, oblique).unwrap();
    let (mu, _) = normalize_two_slip(&pair).unwrap();
    println!("\noblique pair (P, (0.6, 0.8, 1.0)): mu = {mu:.12}");
    let d = distance_two_slip(&pair, &g, Family::F1).unwrap();
    println!("distance of the test element: {d:.12}");
}
