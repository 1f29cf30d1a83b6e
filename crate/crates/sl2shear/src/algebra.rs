//! Exact linear algebra of sl(2) and SL(2).
//!
//! Everything is expressed in the basis `{H, T, U}` of traceless 2x2
//! matrices,
//!
//! ```text
//! H = [1  0]    T = [0 1]    U = [ 0 1]
//!     [0 -1]        [1 0]        [-1 0]
//! ```
//!
//! with the shear generators `P = (T + U)/2` (upper triangular) and
//! `Q = (T - U)/2` (lower triangular). The exponential, the adjoint and
//! coadjoint actions and the invariants attached to the optimal control
//! problem (Casimir, optimal Hamiltonian, the flow on a face of the yield
//! surface) all have closed forms collected here.

use crate::{Error, Result, UNIMODULAR_TOL};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// An element `X = h H + t T + u U` of sl(2). The same coordinates also
/// parametrize the simply connected cover, see [`crate::cover`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement {
    pub h: f64,
    pub t: f64,
    pub u: f64,
}

impl AlgebraElement {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    /// `P = (T + U)/2`, the upper-triangular shear generator.
    pub const P: Self = Self::new(0.0, 0.5, 0.5);
    /// `Q = (T - U)/2`, the lower-triangular shear generator.
    pub const Q: Self = Self::new(0.0, 0.5, -0.5);
    pub const H: Self = Self::new(1.0, 0.0, 0.0);
    pub const T: Self = Self::new(0.0, 1.0, 0.0);
    pub const U: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(h: f64, t: f64, u: f64) -> Self {
        Self { h, t, u }
    }

    /// Determinant of the 2x2 matrix `h H + t T + u U`.
    pub fn det(&self) -> f64 {
        -self.h * self.h - self.t * self.t + self.u * self.u
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.h, c * self.t, c * self.u)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.h + other.h, self.t + other.t, self.u + other.u)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Commutator `[X, Y] = XY - YX`.
    pub fn bracket(&self, other: &Self) -> Self {
        // ad(X) in the {H,T,U} basis applied to the coordinates of Y.
        let m = ad_rep(self);
        let v = [other.h, other.t, other.u];
        Self::new(
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        )
    }

    pub fn norm_max(&self) -> f64 {
        self.h.abs().max(self.t.abs()).max(self.u.abs())
    }

    /// Matrix entries `[[a, b], [c, d]]` of `h H + t T + u U`.
    pub fn entries(&self) -> [f64; 4] {
        [self.h, self.t + self.u, self.t - self.u, -self.h]
    }
}

/// An element of SL(2) stored as its four matrix entries, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds a group element from raw entries. Inputs within `1e-9` of
    /// unit determinant are renormalized by `1/sqrt(det)`; anything further
    /// off is rejected.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let excess = (det - 1.0).abs();
        if !det.is_finite() || excess > UNIMODULAR_TOL {
            return Err(Error::NonUnimodular { excess });
        }
        let s = det.sqrt();
        Ok(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    /// Internal constructor for values that are unimodular by construction
    /// (products of exponentials).
    pub(crate) fn from_entries_unchecked(a: f64, b: f64, c: f64, d: f64) -> Self {
        // det conditioning degrades quadratically with the entry size
        debug_assert!({
            let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
            (a * d - b * c - 1.0).abs() < 1e-6 * (1.0 + scale * scale)
        });
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Rescales the entries by `1/sqrt(det)` to absorb roundoff drift in
    /// long products; requires `det > 0`.
    pub fn renormalized(&self) -> Self {
        let s = self.det().sqrt();
        Self {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    /// Max-norm distance between the entry vectors.
    pub fn dist_max(&self, rhs: &Self) -> f64 {
        (self.a - rhs.a)
            .abs()
            .max((self.b - rhs.b).abs())
            .max((self.c - rhs.c).abs())
            .max((self.d - rhs.d).abs())
    }

    /// Conjugation `g X g^{-1}` taken entrywise on 2x2 matrices; used as an
    /// independent route to check [`adjoint`].
    pub fn conjugate_algebra(&self, x: &AlgebraElement) -> AlgebraElement {
        let [xa, xb, xc, xd] = x.entries();
        let g = self;
        let gi = self.inverse();
        // g * X
        let (ma, mb, mc, md) = (
            g.a * xa + g.b * xc,
            g.a * xb + g.b * xd,
            g.c * xa + g.d * xc,
            g.c * xb + g.d * xd,
        );
        // (g X) * g^{-1}
        let ra = ma * gi.a + mb * gi.c;
        let rb = ma * gi.b + mb * gi.d;
        let rc = mc * gi.a + md * gi.c;
        AlgebraElement::new(ra, (rb + rc) / 2.0, (rb - rc) / 2.0)
    }
}

/// A covector `p = (p_H, p_T, p_U)` in the dual basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covector {
    pub ph: f64,
    pub pt: f64,
    pub pu: f64,
}

impl Covector {
    pub const fn new(ph: f64, pt: f64, pu: f64) -> Self {
        Self { ph, pt, pu }
    }

    /// Pairing `<p, X>`.
    pub fn pair(&self, x: &AlgebraElement) -> f64 {
        self.ph * x.h + self.pt * x.t + self.pu * x.u
    }

    /// Row-vector times 3x3 matrix, the coadjoint-side action.
    pub fn apply(&self, m: &[[f64; 3]; 3]) -> Self {
        Self::new(
            self.ph * m[0][0] + self.pt * m[1][0] + self.pu * m[2][0],
            self.ph * m[0][1] + self.pt * m[1][1] + self.pu * m[2][1],
            self.ph * m[0][2] + self.pt * m[1][2] + self.pu * m[2][2],
        )
    }
}

/// `C(z) = cosh(sqrt z)` continued through `z < 0` as `cos(sqrt -z)`.
///
/// Near the cone `z = 0` the closed forms cancel badly, so a truncated
/// series (degree 6, error below 1e-60 for |z| < 1e-4) takes over.
pub fn entire_c(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        // sum_{n=0..6} z^n / (2n)!
        let mut term = 1.0;
        let mut acc = 1.0;
        for n in 1..=6u32 {
            term *= z / ((2 * n - 1) as f64 * (2 * n) as f64);
            acc += term;
        }
        acc
    } else if z > 0.0 {
        z.sqrt().cosh()
    } else {
        (-z).sqrt().cos()
    }
}

/// `S(z) = sinh(sqrt z)/sqrt z` continued through `z < 0` as
/// `sin(sqrt -z)/sqrt -z`; `S(0) = 1`.
pub fn entire_s(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let mut term = 1.0;
        let mut acc = 1.0;
        for n in 1..=6u32 {
            term *= z / ((2 * n) as f64 * (2 * n + 1) as f64);
            acc += term;
        }
        acc
    } else if z > 0.0 {
        let r = z.sqrt();
        r.sinh() / r
    } else {
        let r = (-z).sqrt();
        r.sin() / r
    }
}

/// `T(z) = S(z)/C(z)`; poles at `z = -(n pi / 2)^2` for odd `n`.
pub fn entire_t(z: f64) -> f64 {
    entire_s(z) / entire_c(z)
}

/// Closed-form exponential `exp(X) = C(-det X) id + S(-det X) X`.
pub fn exp_matrix(x: &AlgebraElement) -> GroupElement {
    let z = -x.det(); // h^2 + t^2 - u^2
    let c = entire_c(z);
    let s = entire_s(z);
    let [xa, xb, xc, xd] = x.entries();
    GroupElement::from_entries_unchecked(c + s * xa, s * xb, s * xc, c + s * xd)
}

/// `Ad(g)` as a 3x3 matrix in the `{H, T, U}` basis, acting on coordinate
/// columns of algebra elements; covectors act by row multiplication from
/// the left.
pub fn adjoint(g: &GroupElement) -> Result<[[f64; 3]; 3]> {
    let excess = (g.det() - 1.0).abs();
    if excess > UNIMODULAR_TOL {
        return Err(Error::NonUnimodular { excess });
    }
    let (a, b, c, d) = (g.a, g.b, g.c, g.d);
    Ok([
        [a * d + b * c, -a * c + b * d, -a * c - b * d],
        [
            -a * b + c * d,
            (a * a - b * b - c * c + d * d) / 2.0,
            (a * a + b * b - c * c - d * d) / 2.0,
        ],
        [
            -a * b - c * d,
            (a * a - b * b + c * c - d * d) / 2.0,
            (a * a + b * b + c * c + d * d) / 2.0,
        ],
    ])
}

/// `ad(X)` in the `{H, T, U}` basis.
pub fn ad_rep(x: &AlgebraElement) -> [[f64; 3]; 3] {
    let (h, t, u) = (x.h, x.t, x.u);
    [
        [0.0, 2.0 * u, -2.0 * t],
        [-2.0 * u, 0.0, 2.0 * h],
        [-2.0 * t, 2.0 * h, 0.0],
    ]
}

/// Which shear generator an `exp(tau ad .)` factor acts by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PQ {
    P,
    Q,
}

/// `e^{tau ad P}` resp. `e^{tau ad Q}` in closed form; `ad(P)^3 = 0` makes
/// these quadratic polynomials in `tau`.
pub fn exp_ad_pq(gen: PQ, tau: f64) -> [[f64; 3]; 3] {
    let t2 = tau * tau / 2.0;
    match gen {
        PQ::P => [
            [1.0, tau, -tau],
            [-tau, 1.0 - t2, t2],
            [-tau, -t2, 1.0 + t2],
        ],
        PQ::Q => [
            [1.0, -tau, -tau],
            [tau, 1.0 - t2, -t2],
            [-tau, t2, 1.0 + t2],
        ],
    }
}

/// Coadjoint Casimir `C(p) = p_H^2 + p_T^2 - p_U^2`, an invariant of every
/// extremal.
pub fn casimir(p: &Covector) -> f64 {
    p.ph * p.ph + p.pt * p.pt - p.pu * p.pu
}

/// Optimal Hamiltonian `H(p) = -(|p_T| + |p_U|)/2` of the control square
/// `conv(+-P, +-Q)`.
pub fn hamiltonian(p: &Covector) -> f64 {
    -(p.pt.abs() + p.pu.abs()) / 2.0
}

/// Flow of the covector `(p_H, 0, 2)` on the edge of the yield surface under
/// `e^{-tau ad P}`: the closed-form parabola
/// `(p_H + 2 tau, -tau (p_H + tau), tau^2 + p_H tau + 2)`.
pub fn face_flow(ph0: f64, tau: f64) -> Covector {
    Covector::new(
        ph0 + 2.0 * tau,
        -tau * (ph0 + tau),
        tau * tau + ph0 * tau + 2.0,
    )
}

/// Rewrites `mex(r P, -s Q, s P)` as `mex(x1 Q, x2 P, x3 Q)`:
/// `x2 = s + r (1 - s^2)`, `x1 = -s^2 / x2`, `x3 = -r s / x2`.
///
/// This is the cost-reducing move showing that 4-factor alternating
/// extremals need switching time at least 1.
pub fn qpq_rewrite(r: f64, s: f64) -> Result<(f64, f64, f64)> {
    let x2 = s + r * (1.0 - s * s);
    if x2.abs() < crate::DEGENERATE_TOL {
        return Err(Error::DegeneratePivot { value: x2 });
    }
    Ok((-s * s / x2, x2, -r * s / x2))
}

#[cfg(test)]
pub(crate) fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

/// Applies a 3x3 matrix in the `{H, T, U}` basis (an adjoint or one of
/// the closed-form `e^{tau ad .}`) to coordinate columns.
pub fn mat3_apply(m: &[[f64; 3]; 3], x: &AlgebraElement) -> AlgebraElement {
    let v = [x.h, x.t, x.u];
    AlgebraElement::new(
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )
}
