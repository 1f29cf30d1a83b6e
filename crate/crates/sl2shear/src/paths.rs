//! Trajectories in the conformal disc model.
//!
//! SL(2) acts on the upper half-plane by Moebius transformations; the
//! Cayley map sends the base point `i` to the disc center. A group element
//! becomes a car pose: disc position plus heading. The controls `P`, `Q`
//! drive forward turning left resp. right with unit turning radius, `T/2`
//! drives straight, and their negatives drive backward, which is exactly
//! the Reeds-Shepp car in the hyperbolic plane. The pose is calibrated so
//! that `exp(t T/2)` moves hyperbolic distance `t` along the geodesic
//! through the center with heading `0`, and `exp(alpha U)` spins the
//! heading in place by `2 alpha`.

use crate::algebra::GroupElement;
use crate::fammaps::{Factorization, Family};
use crate::solver::{distance_psl2, DistanceResult};
use crate::{Error, Result, UNIMODULAR_TOL};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A car pose in the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPose {
    /// Position, `|z| < 1`.
    pub z: Complex64,
    /// Heading angle in `(-pi, pi]`.
    pub theta: f64,
    /// Direction-reversal marker: set on the sample where the control
    /// switches between forward and backward.
    pub cusp: bool,
}

/// One sample of a trajectory through the group.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t: f64,
    pub g: GroupElement,
}

/// One sample of a disc path.
#[derive(Debug, Clone, Copy)]
pub struct PathSample {
    pub t: f64,
    pub pose: DiscPose,
}

/// The pose of a group element.
///
/// Position is the Cayley image of the Moebius action on `i`, rotated so
/// the initial heading points along the positive real axis; the heading is
/// the direction the car moves under the straight control.
pub fn disc_pose(g: &GroupElement) -> Result<DiscPose> {
    let excess = (g.det() - 1.0).abs();
    if excess > UNIMODULAR_TOL {
        return Err(Error::NonUnimodular { excess });
    }
    let i = Complex64::new(0.0, 1.0);
    let (a, b, c, d) = (g.a, g.b, g.c, g.d);
    let zh = (a * i + b) / (c * i + d);
    let z = i * (zh - i) / (zh + i);
    // tangent of t -> pose(g exp(t T/2)) at t = 0, up to positive scale:
    // i * (2i/(zh+i)^2) * 1/(ci+d)^2
    let denom = (zh + i) * (zh + i) * (c * i + d) * (c * i + d);
    let tangent = i * Complex64::new(0.0, 2.0) / denom;
    Ok(DiscPose {
        z,
        theta: tangent.arg(),
        cusp: false,
    })
}

/// Hyperbolic distance between two disc points (curvature -1).
pub fn disc_distance(z1: Complex64, z2: Complex64) -> f64 {
    let m = ((z1 - z2) / (Complex64::new(1.0, 0.0) - z1.conj() * z2)).norm();
    2.0 * m.atanh()
}

/// Samples the trajectory of a factorization: switch instants are always
/// included, interior spacing never exceeds `step`, and the final sample is
/// the full product.
pub fn sample_trajectory(f: &Factorization, step: f64) -> Vec<TrajectorySample> {
    assert!(step > 0.0, "step must be positive");
    let mut out = vec![TrajectorySample {
        t: 0.0,
        g: GroupElement::IDENTITY,
    }];
    let mut prefix = GroupElement::IDENTITY;
    let mut tau = 0.0;
    for &(ctrl, dur) in &f.factors {
        let n = (dur / step).ceil().max(1.0) as usize;
        for j in 1..=n {
            let local = dur * j as f64 / n as f64;
            out.push(TrajectorySample {
                t: tau + local,
                g: prefix.mul(&crate::algebra::exp_matrix(&ctrl.algebra().scale(local))),
            });
        }
        prefix = prefix.mul(&crate::algebra::exp_matrix(&ctrl.algebra().scale(dur)));
        tau += dur;
        // exact switch point replaces the last interior sample
        if let Some(last) = out.last_mut() {
            last.g = prefix;
            last.t = tau;
        }
    }
    out
}

/// Plans the optimal hyperbolic Reeds-Shepp path to a target (a PSL(2)
/// query) and renders it as a disc polyline with cusp flags.
pub fn plan_rscp(g_target: &GroupElement, step: f64) -> Result<(DistanceResult, Vec<PathSample>)> {
    let result = distance_psl2(g_target, Family::F1)?;
    let polyline = render_path(&result.factorization, step)?;
    Ok((result, polyline))
}

/// Renders a factorization as a disc polyline; cusps sit exactly at the
/// control sign reversals.
pub fn render_path(f: &Factorization, step: f64) -> Result<Vec<PathSample>> {
    let samples = sample_trajectory(f, step);
    let mut out: Vec<PathSample> = Vec::with_capacity(samples.len());
    for s in &samples {
        out.push(PathSample {
            t: s.t,
            pose: disc_pose(&s.g)?,
        });
    }
    // mark direction reversals at the exact switch times
    let mut tau = 0.0;
    for w in f.factors.windows(2) {
        tau += w[0].1;
        if w[0].0.is_forward() != w[1].0.is_forward() {
            if let Some(sample) = out.iter_mut().find(|s| (s.t - tau).abs() < 1e-12) {
                sample.pose.cusp = true;
            }
        }
    }
    Ok(out)
}

/// CSV rows `t, Re z, Im z, theta, cusp` with 17 significant digits.
pub fn write_path_csv<W: std::io::Write>(samples: &[PathSample], mut w: W) -> std::io::Result<()> {
    for s in samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.t,
            s.pose.z.re,
            s.pose.z.im,
            s.pose.theta,
            if s.pose.cusp { 1 } else { 0 }
        )?;
    }
    Ok(())
}

/// Proper-crossing test for a disc polyline, ignoring segment pairs that
/// share an endpoint. Used to check that circular and singular extremal
/// paths never self-intersect.
pub fn polyline_self_intersects(points: &[Complex64]) -> bool {
    let n = points.len();
    if n < 4 {
        return false;
    }
    let orient = |p: Complex64, q: Complex64, r: Complex64| -> f64 {
        (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
    };
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            if i == 0 && j == n - 2 {
                // first and last segment may share the start pose
                if (points[0] - points[n - 1]).norm() < 1e-12 {
                    continue;
                }
            }
            let (p1, p2) = (points[i], points[i + 1]);
            let (q1, q2) = (points[j], points[j + 1]);
            let d1 = orient(q1, q2, p1);
            let d2 = orient(q1, q2, p2);
            let d3 = orient(p1, p2, q1);
            let d4 = orient(p1, p2, q2);
            if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
                && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
            {
                return true;
            }
        }
    }
    false
}

/// The angle difference wrapped into `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exp_matrix, AlgebraElement, SQRT2};
    use crate::fammaps::{Control, MapDescriptor, MapName};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn base_pose_is_centered() {
        let pose = disc_pose(&GroupElement::IDENTITY).unwrap();
        assert!(pose.z.norm() < 1e-15);
        assert!(pose.theta.abs() < 1e-15);
    }

    #[test]
    fn rotations_fix_the_center() {
        for alpha in [0.2, 0.9, -1.3] {
            let pose = disc_pose(&exp_matrix(&AlgebraElement::U.scale(alpha))).unwrap();
            assert!(pose.z.norm() < 1e-14);
            // heading convention: exp(alpha U) turns by 2 alpha
            assert!(angle_diff(pose.theta, 2.0 * alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn straight_control_is_a_unit_speed_geodesic() {
        for t in [0.1, 0.7, 2.2, -1.1f64] {
            let pose = disc_pose(&exp_matrix(&AlgebraElement::T.scale(t / 2.0))).unwrap();
            // moves distance t along the heading-0 geodesic from the center
            assert!((pose.z.im).abs() < 1e-13);
            assert!((pose.z.re - (t / 2.0).tanh()).abs() < 1e-13);
            assert!(pose.theta.abs() < 1e-12);
            assert!((disc_distance(Complex64::new(0.0, 0.0), pose.z) - t.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn left_turn_convention() {
        // P turns left: heading increases, position bends upward
        let pose = disc_pose(&exp_matrix(&AlgebraElement::P.scale(0.4))).unwrap();
        assert!(pose.z.re > 0.0 && pose.z.im > 0.0);
        assert!(pose.theta > 0.0);
        let pose_q = disc_pose(&exp_matrix(&AlgebraElement::Q.scale(0.4))).unwrap();
        assert!(pose_q.z.im < 0.0 && pose_q.theta < 0.0);
    }

    #[test]
    fn u_turn_geometry() {
        // mex(wP, -wQ) starts and ends on the same geodesic with the
        // tangent reversed
        let w = SQRT2;
        let f = Factorization::from_factors(vec![(Control::P, w), (Control::NegQ, w)]);
        let end = disc_pose(&f.evaluate()).unwrap();
        assert!((end.z.re - w / 2.0).abs() < 1e-12, "{}", end.z);
        assert!(end.z.im.abs() < 1e-8);
        assert!(angle_diff(end.theta, PI).abs() < 1e-8);
    }

    #[test]
    fn trajectory_endpoints_match_evaluation() {
        let f = Factorization::from_factors(vec![(Control::P, 1.0)]);
        let samples = sample_trajectory(&f, 0.5);
        assert_eq!(samples.len(), 3);
        assert!(samples[1].g.dist_max(&exp_matrix(&AlgebraElement::P.scale(0.5))) < 1e-15);
        assert!(samples[2].g.dist_max(&f.evaluate()) < 1e-15);

        let empty = Factorization::identity();
        let samples = sample_trajectory(&empty, 0.5);
        assert_eq!(samples.len(), 1);
        assert!(samples[0].g.dist_max(&GroupElement::IDENTITY) < 1e-15);

        // quarter rotation through mex(P, -Q, P)
        let f = MapDescriptor::get(MapName::A3).factorization(1.0, 1.0, 1.0);
        let samples = sample_trajectory(&f, 0.25);
        let expect = GroupElement::from_entries_unchecked(0.0, 1.0, -1.0, 0.0);
        assert!(samples.last().unwrap().g.dist_max(&expect) < 1e-12);
        assert!((samples.last().unwrap().t - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_speed_along_arcs() {
        // consecutive samples along any bang or singular arc are spaced by
        // their duration difference in the hyperbolic metric
        let f = Factorization::from_factors(vec![
            (Control::P, 0.8),
            (Control::NegQ, 1.1),
            (Control::HalfT, 0.9),
            (Control::NegHalfT, 0.5),
        ]);
        let step = 0.01;
        let path = render_path(&f, step).unwrap();
        for w in path.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt < 1e-15 {
                continue;
            }
            let dist = disc_distance(w[0].pose.z, w[1].pose.z);
            assert!(
                (dist - dt).abs() < 1e-6,
                "spacing {dist} vs duration {dt}"
            );
        }
    }

    #[test]
    fn plan_rscp_identity_and_rotation() {
        let (res, path) = plan_rscp(&GroupElement::IDENTITY, 0.1).unwrap();
        assert_eq!(res.cost, 0.0);
        assert_eq!(path.len(), 1);

        // rotation by alpha in (0, pi/2): 3 arcs, 2 cusps
        let alpha = 1.1;
        let g = exp_matrix(&AlgebraElement::U.scale(alpha));
        let (res, path) = plan_rscp(&g, 0.01).unwrap();
        assert!((res.cost - (alpha.sin() + 2.0 * (alpha / 2.0).tan())).abs() < 1e-9);
        assert_eq!(res.factorization.len(), 3);
        let cusps = path.iter().filter(|s| s.pose.cusp).count();
        assert_eq!(cusps, 2);
        // endpoint pose matches the target pose
        let target = disc_pose(&g).unwrap();
        let end = path.last().unwrap().pose;
        assert!((end.z - target.z).norm() < 1e-9);
        assert!(angle_diff(end.theta, target.theta).abs() < 1e-9);
    }

    #[test]
    fn plan_rscp_translation_is_one_geodesic_segment() {
        let rho = 1.3;
        let g = exp_matrix(&AlgebraElement::T.scale(rho / 2.0));
        let (res, path) = plan_rscp(&g, 0.05).unwrap();
        assert!((res.cost - rho).abs() < 1e-9);
        assert_eq!(res.factorization.len(), 1);
        assert_eq!(res.factorization.factors[0].0, Control::HalfT);
        assert!(path.iter().all(|s| !s.pose.cusp));
    }

    #[test]
    fn csp_and_ssp_paths_have_no_self_intersections() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let maps = [
            MapName::C3,
            MapName::C4a,
            MapName::C4c,
            MapName::S3P,
            MapName::S3Q,
            MapName::S4P,
            MapName::S4Q,
            MapName::S5P,
            MapName::S5Q,
        ];
        for _ in 0..40 {
            let name = maps[rng.random_range(0..maps.len())];
            let (r, s, t) = crate::solver::tests::sample_any_domain(&mut rng, name);
            let f = MapDescriptor::get(name).factorization(r, s, t);
            let path = render_path(&f, 1e-2).unwrap();
            let pts: Vec<Complex64> = path.iter().map(|s| s.pose.z).collect();
            assert!(
                !polyline_self_intersects(&pts),
                "{name}({r}, {s}, {t}) self-intersects"
            );
        }
    }

    #[test]
    fn csv_rows_have_five_fields() {
        let f = Factorization::from_factors(vec![(Control::P, 0.5), (Control::NegQ, 0.5)]);
        let path = render_path(&f, 0.25).unwrap();
        let mut buf = Vec::new();
        write_path_csv(&path, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 5);
        }
        assert!(text.lines().filter(|l| l.ends_with(",1")).count() == 1);
    }
}
