//! The simply connected cover of SL(2) in Hilgert-Hofmann coordinates.
//!
//! As a set the cover is sl(2) itself: a point `X = h H + t T + u U` maps to
//! SL(2) via
//!
//! ```text
//! f(X) = C(h^2 + t^2) R(u) + S(h^2 + t^2) [[h, t], [t, -h]]
//! ```
//!
//! with `R(u)` the rotation matrix by `u` and `C`, `S` the entire functions
//! of [`crate::algebra`]. `f` is periodic in `u` with period `2 pi`; SL(2) is
//! recovered by taking `u` mod `2 pi`, and the strip `u in (-pi, pi]` carries
//! a local inverse. The group multiplication `X o Y` is computed by stripping
//! the central rotation parts, multiplying the symmetric-plane
//! representatives downstairs and reassembling.

use crate::algebra::{entire_c, entire_s, entire_t, AlgebraElement, GroupElement};
use crate::{Error, Result, UNIMODULAR_TOL};
use std::f64::consts::PI;

/// A point of the simply connected cover, in the same `(h, t, u)`
/// coordinates as [`AlgebraElement`] but read as a group element.
pub type CoverElement = AlgebraElement;

/// The covering map onto SL(2).
pub fn cover_map(x: &CoverElement) -> GroupElement {
    let z = x.h * x.h + x.t * x.t;
    let c = entire_c(z);
    let s = entire_s(z);
    let (cu, su) = (x.u.cos(), x.u.sin());
    GroupElement::from_entries_unchecked(
        c * cu + s * x.h,
        c * su + s * x.t,
        -c * su + s * x.t,
        c * cu - s * x.h,
    )
}

/// Local inverse of [`cover_map`] with values in the strip `u in (-pi, pi]`.
///
/// For unimodular `g` the quantity `(a+d)^2 + (b-c)^2` is at least 4; the
/// `arcosh` argument is clamped to absorb roundoff below that bound.
pub fn cover_inv(g: &GroupElement) -> Result<CoverElement> {
    let excess = (g.det() - 1.0).abs();
    if excess > UNIMODULAR_TOL {
        return Err(Error::NonUnimodular { excess });
    }
    Ok(cover_inv_unchecked(g))
}

fn cover_inv_unchecked(g: &GroupElement) -> CoverElement {
    let re = g.a + g.d;
    let im = g.b - g.c;
    // atan2(0, -x) = pi, so u lands in (-pi, pi] as required
    let u = im.atan2(re);
    let rho = ((re * re + im * im).sqrt() / 2.0).max(1.0).acosh();
    // denominator 2 sinh(rho)/rho, with limit 2 at rho = 0
    let denom = 2.0 * entire_s(rho * rho);
    CoverElement::new((g.a - g.d) / denom, (g.b + g.c) / denom, u)
}

/// Rotation `e^{theta ad U}` on coordinates; fixes the `U`-component and
/// rotates the `(H, T)` plane by `2 theta`.
fn rotate_ht(x: &CoverElement, theta: f64) -> CoverElement {
    let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    CoverElement::new(x.h * c + x.t * s, -x.h * s + x.t * c, x.u)
}

/// Group multiplication on the cover.
///
/// Central rotations multiply by `(u U) o X = e^{u/2 ad U} X + u U`; the
/// remaining symmetric-plane representatives are multiplied through
/// [`cover_map`] and pulled back with [`cover_inv`], which is valid because
/// a product of two symmetric-plane elements stays within `|u| < pi/2`.
pub fn compose(x: &CoverElement, y: &CoverElement) -> CoverElement {
    let (u1, u2) = (x.u, y.u);
    // (-u1 U) o X and Y o (-u2 U) both lie in the symmetric plane E
    let ex = rotate_ht(x, -u1 / 2.0);
    let ey = rotate_ht(y, u2 / 2.0);

    // Product of two symmetric-plane elements, decomposed directly:
    // (C1 + S1 X1)(C2 + S2 X2) with X1 X2 = <X1, X2> id + (h1 t2 - h2 t1) U.
    let z1 = ex.h * ex.h + ex.t * ex.t;
    let z2 = ey.h * ey.h + ey.t * ey.t;
    let (c1, s1) = (entire_c(z1), entire_s(z1));
    let (c2, s2) = (entire_c(z2), entire_s(z2));
    let dot = ex.h * ey.h + ex.t * ey.t;
    let cross = ex.h * ey.t - ey.h * ex.t;
    // cosh(rho) (cos u', sin u') of the product
    let re = c1 * c2 + s1 * s2 * dot;
    let im = s1 * s2 * cross;
    let u_mid = im.atan2(re);
    debug_assert!(u_mid.abs() <= PI / 2.0 + 1e-9);
    let rho = re.hypot(im).max(1.0).acosh();
    // symmetric part is (S1 C2) X1 + (C1 S2) X2, scaled back by rho/sinh(rho)
    let f = 1.0 / entire_s(rho * rho);
    let z = CoverElement::new(
        f * (s1 * c2 * ex.h + c1 * s2 * ey.h),
        f * (s1 * c2 * ex.t + c1 * s2 * ey.t),
        u_mid,
    );

    // (u1 U) o Z o (u2 U)
    let rotated = rotate_ht(&z, (u1 - u2) / 2.0);
    CoverElement::new(rotated.h, rotated.t, rotated.u + u1 + u2)
}

/// Inverse on the cover is plain negation.
pub fn cover_inverse(x: &CoverElement) -> CoverElement {
    x.neg()
}

/// Exponential of the cover group.
///
/// For `X = rho0 E + u0 U` with `E` a unit vector of the symmetric plane and
/// `k = rho0^2 - u0^2`, the image is `rho E + u U` with
/// `rho = arsinh(rho0 S(k))` and `u` the branch-corrected
/// `arctan(u0 T(k))`; at the poles of `T` the limit value
/// `sign(u0) sqrt(-k)` applies.
pub fn exp_tilde(x: &AlgebraElement) -> CoverElement {
    let rho0 = (x.h * x.h + x.t * x.t).sqrt();
    let u0 = x.u;
    let k = rho0 * rho0 - u0 * u0;

    let rho = (rho0 * entire_s(k)).asinh();
    let u = if k >= 0.0 {
        (u0 * entire_t(k)).atan()
    } else {
        let root = (-k).sqrt();
        // poles of T at odd multiples of pi/2
        let half_turns = root * 2.0 / PI;
        let near_pole =
            (half_turns - half_turns.round()).abs() < 1e-9 && (half_turns.round() as i64) % 2 != 0;
        if near_pole {
            u0.signum() * root
        } else {
            (u0 * entire_t(k)).atan() + u0.signum() * (0.5 + root / PI).floor() * PI
        }
    };

    if rho0 == 0.0 {
        return CoverElement::new(0.0, 0.0, u);
    }
    CoverElement::new(rho * x.h / rho0, rho * x.t / rho0, u)
}
