//! Distance and optimal-factorization computation.
//!
//! The distance is computed exactly: for every map of the chosen sufficient
//! family and every symmetry in its orbit column, solve
//! `f(r, s, t) = sigma(g)` in closed form, discard out-of-domain solutions,
//! pull the factorization back through `sigma` and keep the cheapest
//! candidate. Controllability guarantees a candidate always exists.
//!
//! PSL(2) is the quotient by `{+-1}`: the distance is the minimum over both
//! sign representatives. An arbitrary two-slip system reduces to the
//! canonical one by the rotation / shearing / hyperbolic-rotation procedure,
//! giving `T_S(g) = mu^{-1} T(g0^{-1} g g0)`.

use crate::algebra::{
    adjoint, exp_matrix, mat3_apply, AlgebraElement, GroupElement,
};
use crate::cover::CoverElement;
use crate::fammaps::{Control, Factorization, Family, MapName};
use crate::symmetry::SymmetryOp;
use crate::{Error, Result, UNIMODULAR_TOL};
use std::f64::consts::PI;

/// Which group a distance was computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    SL2,
    PSL2,
}

impl Group {
    pub fn as_str(&self) -> &'static str {
        match self {
            Group::SL2 => "sl2",
            Group::PSL2 => "psl2",
        }
    }
}

/// Cost of an optimal factorization together with the witness that attains
/// it.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub cost: f64,
    pub factorization: Factorization,
    pub map_name: MapName,
    pub symmetry: SymmetryOp,
    pub params: (f64, f64, f64),
    pub group: Group,
}

/// Equal costs within this tolerance are resolved lexicographically on
/// `(map, symmetry, r, s, t)` so output is deterministic.
const TIE_TOL: f64 = 1e-9;

fn candidate_key(c: &DistanceResult) -> (usize, usize, f64, f64, f64) {
    (
        c.map_name as usize,
        c.symmetry.ordinal(),
        c.params.0,
        c.params.1,
        c.params.2,
    )
}

fn better(new: &DistanceResult, old: &DistanceResult) -> bool {
    if new.cost < old.cost - TIE_TOL {
        return true;
    }
    if new.cost > old.cost + TIE_TOL {
        return false;
    }
    let (a, b) = (candidate_key(new), candidate_key(old));
    a.partial_cmp(&b) == Some(std::cmp::Ordering::Less)
}

fn ensure_unimodular(g: &GroupElement) -> Result<()> {
    let excess = (g.det() - 1.0).abs();
    if excess > UNIMODULAR_TOL {
        return Err(Error::NonUnimodular { excess });
    }
    Ok(())
}

/// Factorization cost `T(g)` on SL(2) with an optimal factorization.
///
/// The result is independent of the family choice (up to `1e-9`); `F2` does
/// the least work, `F1` keeps the alternating/circular distinction, `F`
/// matches the sphere patches.
pub fn distance_sl2(g: &GroupElement, family: Family) -> Result<DistanceResult> {
    ensure_unimodular(g)?;
    let verify_tol = 1e-9 * (1.0 + g.a.abs().max(g.b.abs()).max(g.c.abs()).max(g.d.abs()));
    let mut best: Option<DistanceResult> = None;

    for &name in family.maps() {
        let desc = name.descriptor();
        if let Some(b) = &best {
            // family lower bound: e.g. an A5 factorization costs at
            // least 3 sqrt2, so it cannot beat a cheaper incumbent.
            if desc.min_cost() > b.cost + TIE_TOL {
                continue;
            }
        }
        for &sigma in desc.orbit {
            let target = sigma.apply_group(g);
            for (r, s, t) in desc.invert(&target, verify_tol) {
                let (ok, _) = desc.domain_and_cost(r, s, t, family, 1e-9);
                if !ok {
                    continue;
                }
                let fact = sigma.apply_factorization(&desc.factorization(r, s, t));
                let cand = DistanceResult {
                    cost: fact.cost,
                    factorization: fact,
                    map_name: name,
                    symmetry: sigma,
                    params: (r, s, t),
                    group: Group::SL2,
                };
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
        }
    }
    Ok(best.expect("the sufficient family reaches every unimodular matrix"))
}

/// Canonical PSL(2) representative: nonnegative trace, ties broken by
/// `b - c > 0`.
pub fn psl2_representative(g: &GroupElement) -> GroupElement {
    let tr = g.trace();
    if tr > 0.0 || (tr == 0.0 && g.b - g.c > 0.0) {
        *g
    } else {
        g.neg()
    }
}

/// Distance in PSL(2): the minimum of `T(g)` and `T(-g)`; the winning
/// factorization is reported.
pub fn distance_psl2(g: &GroupElement, family: Family) -> Result<DistanceResult> {
    ensure_unimodular(g)?;
    let rep = psl2_representative(g);
    let plus = distance_sl2(&rep, family)?;
    let minus = distance_sl2(&rep.neg(), family)?;
    let mut winner = if minus.cost < plus.cost - TIE_TOL {
        minus
    } else {
        plus
    };
    winner.group = Group::PSL2;
    Ok(winner)
}

/// A pair of independent slip systems: traceless rank-1 matrices spanning
/// the admissible shears `conv(+-S1, +-S2)`.
#[derive(Debug, Clone, Copy)]
pub struct SlipPair {
    pub s1: AlgebraElement,
    pub s2: AlgebraElement,
}

impl SlipPair {
    pub fn new(s1: AlgebraElement, s2: AlgebraElement) -> Result<Self> {
        let scale1 = s1.norm_max();
        let scale2 = s2.norm_max();
        if scale1 == 0.0 || scale2 == 0.0 {
            return Err(Error::DegenerateSlip {
                reason: "slip system vanishes",
            });
        }
        if s1.det().abs() > 1e-10 * scale1 * scale1.max(1.0)
            || s2.det().abs() > 1e-10 * scale2 * scale2.max(1.0)
        {
            return Err(Error::DegenerateSlip {
                reason: "slip systems must have zero determinant",
            });
        }
        if s1.bracket(&s2).norm_max() <= 1e-10 * scale1 * scale2 {
            return Err(Error::DegenerateSlip {
                reason: "slip systems are linearly dependent",
            });
        }
        Ok(Self { s1, s2 })
    }
}

/// Canonicalizes a slip pair: finds `mu > 0` and `g0` with
/// `Ad(g0^{-1}) S1 = mu P` and `Ad(g0^{-1}) S2 = -mu Q`.
///
/// Three steps: a rotation takes `S1` onto the ray of `P`, a shearing
/// `e^{tau ad P}` (which fixes `P`) takes the image of `S2` onto the ray of
/// `-Q`, and a hyperbolic rotation equalizes the two radii at
/// `mu = sqrt(rho1 rho2)`.
pub fn normalize_two_slip(pair: &SlipPair) -> Result<(f64, GroupElement)> {
    // Slips on the lower cone sheet are replaced by their negatives, which
    // generate the same shear set.
    let upper = |s: &AlgebraElement| if s.u < 0.0 { s.neg() } else { *s };
    let s1 = upper(&pair.s1);
    let s2 = upper(&pair.s2);

    // 1. Rotation: e^{theta ad U} turns the (H, T)-part of S1 to the T-axis.
    let phi = s1.t.atan2(s1.h);
    let theta = (phi - PI / 2.0) / 2.0;
    let g1 = exp_matrix(&AlgebraElement::U.scale(theta));
    let rho1 = 2.0 * (s1.h * s1.h + s1.t * s1.t).sqrt();

    // 2. Shearing: on the upper cone sheet, scale e^{tau ad P}(-Q) sweeps
    // everything except the ray of P.
    let x = mat3_apply(&adjoint(&g1)?, &s2);
    let lambda = x.u - x.t;
    if lambda <= 1e-12 * x.norm_max() {
        return Err(Error::DegenerateSlip {
            reason: "slip systems share a shear direction",
        });
    }
    let tau = x.h / lambda;
    let g2 = exp_matrix(&AlgebraElement::P.scale(tau));
    let rho2 = lambda;

    // 3. Hyperbolic rotation: e^{h ad H} scales P by e^{2h} and Q by e^{-2h}.
    let h = 0.25 * (rho2 / rho1).ln();
    let g3 = exp_matrix(&AlgebraElement::H.scale(h));

    let mu = (rho1 * rho2).sqrt();
    let g0 = g3.mul(&g2).mul(&g1).inverse();
    Ok((mu, g0))
}

/// Dissipation distance for the shear set `conv(+-S1, +-S2)`:
/// `mu^{-1} T(g0^{-1} g g0)`.
pub fn distance_two_slip(pair: &SlipPair, g: &GroupElement, family: Family) -> Result<f64> {
    ensure_unimodular(g)?;
    let (mu, g0) = normalize_two_slip(pair)?;
    let conj = g0.inverse().mul(g).mul(&g0);
    Ok(distance_sl2(&conj, family)?.cost / mu)
}

/// The alternating word `A(n; r, s, t)`: `n` factors
/// `rP, -sQ, sP, -sQ, ..., ` ending with duration `t`.
pub fn alt_word(n: usize, r: f64, s: f64, t: f64) -> Factorization {
    assert!(n >= 2);
    let mut factors = Vec::with_capacity(n);
    for k in 0..n {
        let dur = if k == 0 {
            r
        } else if k == n - 1 {
            t
        } else {
            s
        };
        let ctrl = if k % 2 == 0 { Control::P } else { Control::NegQ };
        factors.push(if dur < 0.0 {
            (ctrl.negate(), -dur)
        } else {
            (ctrl, dur)
        });
    }
    Factorization::from_factors(factors)
}

/// The central elements of the cover reached by alternating words:
/// `A_n(s_n) = (n-2) pi/2 U` with `s_n = 2 cos(pi/n)`.
pub fn central_alt(n: u32) -> Result<(f64, CoverElement)> {
    if !(3..=64).contains(&n) {
        return Err(Error::OutOfRange {
            what: "alternating word length",
            value: n as f64,
        });
    }
    let s_n = 2.0 * (PI / n as f64).cos();
    let word = alt_word(n as usize, s_n, s_n, s_n);
    Ok((s_n, word.evaluate_cover()))
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The minimal polynomial-like expressions `p_n` with `p_n(s_n / 2) = 0`.
pub fn eval_pn(n: u32, xi: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::OutOfRange {
            what: "index of p_n",
            value: n as f64,
        });
    }
    if n.is_multiple_of(2) {
        let k = n / 2;
        let mut acc = 0.0;
        for j in 0..=(k / 2) {
            acc += binomial(k, 2 * j) * xi.powi((k - 2 * j) as i32) * (xi * xi - 1.0).powi(j as i32);
        }
        Ok(acc)
    } else {
        let k = (n - 1) / 2;
        let mut acc = 0.0;
        for j in 0..=(2 * k) {
            acc += (-xi).powi(j as i32);
        }
        for j in 1..=k {
            acc += binomial(n, 2 * j)
                * xi.powi((n - 2 * j) as i32)
                * (xi - 1.0)
                * (xi * xi - 1.0).powi(j as i32 - 1);
        }
        Ok(acc)
    }
}

/// The tabulated rational functions `mu_N(s)`, `N = 1..5`, marking where
/// `A(N+2; r, s, t)` stops being optimal.
pub fn eval_mu_n(n: u32, s: f64) -> Result<f64> {
    let (num, den) = match n {
        1 => (2.0, s),
        2 => (2.0 * s, s * s - 1.0),
        3 => (2.0 * (s * s - 1.0), s * (s * s - 2.0)),
        4 => (2.0 * s * (s * s - 2.0), s.powi(4) - 3.0 * s * s + 1.0),
        5 => (
            2.0 * (s.powi(4) - 3.0 * s * s + 1.0),
            s * (s.powi(4) - 4.0 * s * s + 3.0),
        ),
        _ => {
            return Err(Error::OutOfRange {
                what: "index of mu_N",
                value: n as f64,
            })
        }
    };
    if den.abs() < 1e-12 {
        return Err(Error::PoleOfRational { value: s });
    }
    Ok(num / den)
}

/// `s_n = 2 cos(pi / n)`, the optimal alternating switching time for the
/// central element `(n-2) pi/2 U`.
pub fn s_n(n: u32) -> f64 {
    2.0 * (PI / n as f64).cos()
}
