//! Meshing metric spheres S(c) = { g : T(g) = c }.
//!
//! Vertices live in the cover coordinates (h, t, u); SL(2) is the strip
//! |u| <= pi. At c = 3 sqrt3 the sphere touches the top of the strip for
//! the first time.
//!
//! ```bash
//! cargo run --example metric_sphere
//! ```

use sl2shear::spheres::{build_sphere, filter_optimal, max_abs_u, write_obj, SphereGroup};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;

fn main() {
    for c in [1.0, 2.0, 4.0] {
        let patches = build_sphere(c, 16, SphereGroup::Cover).unwrap();
        let filtered = filter_optimal(&patches, 1e-6);
        let mut per_map: BTreeMap<&str, usize> = BTreeMap::new();
        for p in &filtered {
            *per_map.entry(p.map_name.as_str()).or_default() += 1;
        }
        println!(
            "S({c}): {} patches before filtering, {} after; max |u| = {:.6}",
            patches.len(),
            filtered.len(),
            max_abs_u(&patches)
        );
        println!("  surviving maps: {per_map:?}");
    }

    // the critical radius where the sphere reaches u = pi
    let c = 3.0 * 3.0f64.sqrt();
    let patches = build_sphere(c, 32, SphereGroup::Cover).unwrap();
    println!(
        "\nS(3 sqrt3 = {c:.6}): max |u| = {:.9} (pi = {:.9})",
        max_abs_u(&patches),
        std::f64::consts::PI
    );

    let out = "sphere_c1.obj";
    let patches = build_sphere(1.0, 24, SphereGroup::Sl2).unwrap();
    let file = File::create(out).unwrap();
    write_obj(&patches, BufWriter::new(file)).unwrap();
    println!(
        "\nwrote S(1) as {out}: {} patches, {} vertices",
        patches.len(),
        patches.iter().map(|p| p.vertices.len()).sum::<usize>()
    );
}
