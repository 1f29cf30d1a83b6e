//! Distances and optimal factorizations on SL(2).
//!
//! ```bash
//! cargo run --example distance
//! ```

use sl2shear::algebra::{exp_matrix, AlgebraElement, GroupElement};
use sl2shear::fammaps::Family;
use sl2shear::solver::{distance_psl2, distance_sl2};

fn show(label: &str, g: &GroupElement) {
    let res = distance_sl2(g, Family::F1).unwrap();
    println!("{label}");
    println!("  matrix [{:.4}, {:.4}; {:.4}, {:.4}]", g.a, g.b, g.c, g.d);
    println!(
        "  cost {:.12}   map {}  symmetry {}  factors {}",
        res.cost, res.map_name, res.symmetry, res.factorization
    );
}

fn main() {
    println!("Dissipation distance T(g) = minimal total shear reaching g");
    println!("===========================================================\n");

    show("identity", &GroupElement::IDENTITY);
    show("single shear exp(P)", &GroupElement::new(1.0, 1.0, 0.0, 1.0).unwrap());

    // rotations: T(exp(alpha U)) = sin(alpha) + 2 tan(alpha/2)
    println!("\nrotations exp(alpha U) against the closed formula:");
    println!("  alpha      T(g)            sin a + 2 tan(a/2)");
    for k in 1..=5 {
        let alpha = 0.3 * k as f64;
        let g = exp_matrix(&AlgebraElement::U.scale(alpha));
        let d = distance_sl2(&g, Family::F1).unwrap().cost;
        let formula = alpha.sin() + 2.0 * (alpha / 2.0).tan();
        println!("  {alpha:.1}        {d:.12}  {formula:.12}");
    }

    // a hyperbolic stretch needs a parallel-parking maneuver
    let h = 0.8f64;
    show(
        "\nhyperbolic stretch diag(e^h, e^-h), h = 0.8",
        &GroupElement::new(h.exp(), 0.0, 0.0, (-h).exp()).unwrap(),
    );

    // -identity: the deepest point of the rotation subgroup
    show("\nnegative identity", &GroupElement::IDENTITY.neg());
    println!("  (4 sqrt2 = {:.12})", 4.0 * std::f64::consts::SQRT_2);

    // all three sufficient families agree
    let g = exp_matrix(&AlgebraElement::new(0.4, -0.7, 0.9));
    println!("\nfamily equivalence on a generic element:");
    for family in [Family::F, Family::F1, Family::F2] {
        let res = distance_sl2(&g, family).unwrap();
        println!(
            "  family {:?}: cost {:.15} via {}",
            family, res.cost, res.map_name
        );
    }

    // PSL(2) takes the cheaper sign
    let res = distance_psl2(&g, Family::F1).unwrap();
    println!("\nPSL(2) quotient: cost {:.15} (min over both signs)", res.cost);
}
