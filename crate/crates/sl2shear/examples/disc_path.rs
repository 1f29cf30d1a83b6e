//! The hyperbolic Reeds-Shepp car: optimal paths in the Poincare disc.
//!
//! A PSL(2) element is a pose (position + heading) of a car with unit
//! turning radius in the hyperbolic plane; the dissipation distance is its
//! minimal driving time, forward and backward motion allowed.
//!
//! ```bash
//! cargo run --example disc_path
//! ```

use sl2shear::algebra::{exp_matrix, AlgebraElement};
use sl2shear::paths::{disc_pose, plan_rscp, write_path_csv};
use std::fs::File;
use std::io::BufWriter;

fn main() {
    // turning in place is never optimal: the car backs up instead
    let alpha = 1.2f64;
    let target = exp_matrix(&AlgebraElement::U.scale(alpha));
    let (res, path) = plan_rscp(&target, 0.01).unwrap();
    println!("turn by {alpha} rad:");
    println!(
        "  cost {:.9} = sin a + 2 tan(a/2) = {:.9}",
        res.cost,
        alpha.sin() + 2.0 * (alpha / 2.0).tan()
    );
    println!("  arcs: {}", res.factorization);
    println!(
        "  cusps at t = {:?}",
        path.iter()
            .filter(|s| s.pose.cusp)
            .map(|s| (s.t * 1e6).round() / 1e6)
            .collect::<Vec<_>>()
    );

    let pose = disc_pose(&target).unwrap();
    let end = path.last().unwrap().pose;
    println!(
        "  endpoint ({:.9}, {:.9}) heading {:.9} vs target ({:.9}, {:.9}) heading {:.9}",
        end.z.re, end.z.im, end.theta, pose.z.re, pose.z.im, pose.theta
    );

    // a pure translation drives one geodesic segment
    let rho = 1.5f64;
    let target = exp_matrix(&AlgebraElement::T.scale(rho / 2.0));
    let (res, _) = plan_rscp(&target, 0.01).unwrap();
    println!("\ntranslation by {rho}: cost {:.9}, arcs {}", res.cost, res.factorization);

    // a generic pose; plot data lands in a CSV consumed by any plotting tool
    let target = exp_matrix(&AlgebraElement::new(0.5, -0.3, 0.8));
    let (res, path) = plan_rscp(&target, 0.005).unwrap();
    let out = "rscp_path.csv";
    write_path_csv(&path, BufWriter::new(File::create(out).unwrap())).unwrap();
    println!(
        "\ngeneric pose: cost {:.9} with {} arcs, {} samples -> {out}",
        res.cost,
        res.factorization.len(),
        path.len()
    );
    println!("  rows: t, Re z, Im z, theta, cusp(0|1)");
}
