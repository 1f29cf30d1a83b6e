//! Metric-sphere patch meshes.
//!
//! The sphere `S(c) = { g : T(g) = c }` is swept out by the factorization
//! maps: on each map the cost form is linear, so the slice `{cost = c}`
//! inside the parameter domain is a polygon parametrized by `(s, t)` with
//! `r` eliminated. Every map/symmetry combination contributes one patch,
//! evaluated in cover coordinates where the vertical coordinate `u` is
//! unwrapped; SL(2) output wraps `u` into `(-pi, pi]`.
//!
//! Patches may overlap where a map stays merely feasible but stops being
//! optimal; [`filter_optimal`] prunes vertices that lie strictly inside the
//! ball.

use crate::cover::{cover_map, CoverElement};
use crate::fammaps::{Family, MapDescriptor, MapName};
use crate::solver::distance_sl2;
use crate::symmetry::SymmetryOp;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Coordinate system of the emitted vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereGroup {
    /// Wrap the vertical coordinate into the SL(2) strip `(-pi, pi]`.
    Sl2,
    /// Keep the unwrapped cover coordinates.
    Cover,
}

/// One meshed patch of a metric sphere.
#[derive(Debug, Clone)]
pub struct SpherePatch {
    pub map_name: MapName,
    pub symmetry: SymmetryOp,
    pub cost: f64,
    /// Vertex coordinates `(h, t, u)`.
    pub vertices: Vec<CoverElement>,
    /// Counterclockwise triangles, indices into `vertices`.
    pub triangles: Vec<[usize; 3]>,
    /// Set once [`filter_optimal`] has pruned non-optimal vertices.
    pub filtered_optimal: bool,
}

impl SpherePatch {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn wrap_to_strip(u: f64) -> f64 {
    let w = (u + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        PI
    } else {
        w
    }
}

/// The parameter caps of a map inside family `F`: `r` and `t` are bounded
/// by `cap(s)`, which is `s` for the bang maps and a constant for the
/// singular maps.
fn rt_cap(name: MapName, s: f64) -> f64 {
    use MapName::*;
    match name {
        A3 | A4 | A5 | C3 | C4a | C4c => s,
        B3 => 2.0 * crate::algebra::SQRT2,
        _ => crate::algebra::SQRT2,
    }
}

fn s_domain(name: MapName) -> (f64, f64) {
    use MapName::*;
    let w = crate::algebra::SQRT2;
    match name {
        A3 => (0.0, 2.0 * w),
        A4 => (1.0, 2.0 * w),
        A5 => (w, 3.0f64.sqrt()),
        C3 | C4a => (0.0, w),
        C4c => (0.0, 1.0),
        B3 => (-2.0 * w, 2.0 * w),
        _ => (0.0, f64::INFINITY),
    }
}

/// Builds the patch mesh of the metric sphere of radius `c`.
///
/// For each map of the family `F` and each symmetry of its orbit column,
/// the level set `{r + m s + t + k = c}` is sampled on a
/// `resolution x resolution` grid over `(s, t)` with `r` eliminated; the
/// grid rows follow the exact feasible `t`-interval per `s`, so domain
/// corners (where spheres touch the top of the strip) are hit exactly.
pub fn build_sphere(c: f64, resolution: usize, group: SphereGroup) -> Result<Vec<SpherePatch>> {
    if c <= 0.0 || c.is_nan() || !c.is_finite() {
        return Err(Error::InvalidCost { value: c });
    }
    let resolution = resolution.max(2);
    let mut patches = Vec::new();

    let mut names: Vec<MapName> = Family::F.maps().to_vec();
    names.sort();
    for name in names {
        let desc = MapDescriptor::get(name);
        let m = desc.s_cost_mult;
        let c_eff = c - desc.cost_offset;
        if c_eff < 0.0 {
            continue;
        }
        let (s_dom_lo, s_dom_hi) = s_domain(name);

        // feasibility of the slice row at s requires
        //   t in [max(0, c~ - m s - cap(s)), min(cap(s), c~ - m s)]
        // which is an interval in s bounded by linear inequalities
        let s_hi = s_dom_hi.min(c_eff / m);
        let s_lo = match name {
            MapName::A3 | MapName::A4 | MapName::A5 | MapName::C3 | MapName::C4a
            | MapName::C4c => s_dom_lo.max(c_eff / (m + 2.0)),
            _ => s_dom_lo.max((c_eff - 2.0 * rt_cap(name, 0.0)) / m),
        };
        if s_lo > s_hi + 1e-12 {
            continue;
        }

        for &sigma in desc.orbit {
            let mut vertices: Vec<CoverElement> = Vec::new();
            let mut rows: Vec<Vec<usize>> = Vec::new();
            for i in 0..resolution {
                let s = if resolution == 1 {
                    s_lo
                } else {
                    s_lo + (s_hi - s_lo) * i as f64 / (resolution - 1) as f64
                };
                let cap = rt_cap(name, s);
                let t_lo = (c_eff - m * s - cap).max(0.0);
                let t_hi = cap.min(c_eff - m * s);
                if t_lo > t_hi + 1e-12 {
                    continue;
                }
                let mut row = Vec::with_capacity(resolution);
                for j in 0..resolution {
                    let t = if resolution == 1 {
                        t_lo
                    } else {
                        t_lo + (t_hi - t_lo) * j as f64 / (resolution - 1) as f64
                    };
                    let r = c_eff - m * s - t;
                    let x = desc.evaluate_cover(r, s, t);
                    let mut v = sigma.apply_cover(&x);
                    if group == SphereGroup::Sl2 {
                        v.u = wrap_to_strip(v.u);
                    }
                    row.push(vertices.len());
                    vertices.push(v);
                }
                rows.push(row);
            }
            if vertices.is_empty() {
                continue;
            }
            let mut triangles = Vec::new();
            for w in rows.windows(2) {
                let (ra, rb) = (&w[0], &w[1]);
                for j in 0..resolution - 1 {
                    triangles.push([ra[j], ra[j + 1], rb[j]]);
                    triangles.push([rb[j], ra[j + 1], rb[j + 1]]);
                }
            }
            patches.push(SpherePatch {
                map_name: name,
                symmetry: sigma,
                cost: c,
                vertices,
                triangles,
                filtered_optimal: false,
            });
        }
    }
    // canonical output order regardless of build order
    patches.sort_by_key(|p| (p.map_name, p.symmetry.ordinal()));
    Ok(patches)
}

/// Drops every vertex whose true distance is strictly below `c - tol` (the
/// point lies inside the ball, the map is feasible but not optimal there)
/// and keeps only triangles whose three corners survive. Patches left with
/// no vertices are removed entirely.
pub fn filter_optimal(patches: &[SpherePatch], tol: f64) -> Vec<SpherePatch> {
    let mut out = Vec::new();
    for patch in patches {
        let keep: Vec<bool> = patch
            .vertices
            .iter()
            .map(|v| {
                let g = cover_map(v);
                match distance_sl2(&g, Family::F1) {
                    Ok(res) => res.cost >= patch.cost - tol,
                    Err(_) => false,
                }
            })
            .collect();
        if keep.iter().all(|k| !k) {
            continue;
        }
        let mut remap = vec![usize::MAX; patch.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in patch.vertices.iter().enumerate() {
            if keep[i] {
                remap[i] = vertices.len();
                vertices.push(*v);
            }
        }
        let triangles = patch
            .triangles
            .iter()
            .filter(|t| t.iter().all(|&i| keep[i]))
            .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
            .collect();
        out.push(SpherePatch {
            map_name: patch.map_name,
            symmetry: patch.symmetry,
            cost: patch.cost,
            vertices,
            triangles,
            filtered_optimal: true,
        });
    }
    out
}

/// Wavefront-style text mesh: `v h t u` then `f i j k` (1-based), one
/// comment line per patch, 17 significant digits.
pub fn write_obj<W: std::io::Write>(patches: &[SpherePatch], mut w: W) -> std::io::Result<()> {
    let mut base = 1usize;
    for p in patches {
        writeln!(w, "# patch {} {} cost {:.16e}", p.map_name, p.symmetry, p.cost)?;
        for v in &p.vertices {
            writeln!(w, "v {:.16e} {:.16e} {:.16e}", v.h, v.t, v.u)?;
        }
        for t in &p.triangles {
            writeln!(w, "f {} {} {}", base + t[0], base + t[1], base + t[2])?;
        }
        base += p.vertices.len();
    }
    Ok(())
}

/// CSV triangle soup: one row per triangle,
/// `map,symmetry,h1,t1,u1,h2,t2,u2,h3,t3,u3`.
pub fn write_csv<W: std::io::Write>(patches: &[SpherePatch], mut w: W) -> std::io::Result<()> {
    for p in patches {
        for t in &p.triangles {
            let [a, b, c] = [p.vertices[t[0]], p.vertices[t[1]], p.vertices[t[2]]];
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.map_name, p.symmetry, a.h, a.t, a.u, b.h, b.t, b.u, c.h, c.t, c.u
            )?;
        }
    }
    Ok(())
}

/// Largest `|u|` over all patch vertices.
pub fn max_abs_u(patches: &[SpherePatch]) -> f64 {
    patches
        .iter()
        .flat_map(|p| p.vertices.iter())
        .map(|v| v.u.abs())
        .fold(0.0, f64::max)
}
