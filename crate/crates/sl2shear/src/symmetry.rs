//! The 8-element symmetry group of the factorization cost.
//!
//! The cost `T` is invariant under the automorphisms `sigma_H(g) = H g H`,
//! `sigma_T(g) = T g T`, `sigma_U(g) = -U g U` and under inversion
//! `i(g) = g^{-1}`; together they generate an abelian group isomorphic to
//! `Z2 x Z2 x Z2`. Symmetries are stored as tags, not matrices, so the
//! matrix action, the linear action on cover coordinates and the action on
//! factorizations stay exactly consistent.
//!
//! Fixed-point sets of these symmetries carry geometric meaning: geodesics
//! tend to lose global optimality where they cross one. In cover
//! coordinates `Fix(inv.sT)` is the `(H, U)`-plane, a cut locus of the
//! distance; `Fix(sU)` is the rotation subgroup `R U`.

use crate::algebra::GroupElement;
use crate::cover::CoverElement;
use crate::fammaps::{Control, Factorization};

/// Conjugation axis of a symmetry tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    None,
    H,
    T,
    U,
}

/// One of the eight symmetries `{id, sH, sT, sU, i, i sH, i sT, i sU}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymmetryOp {
    pub invert: bool,
    pub axis: Axis,
}

impl SymmetryOp {
    pub const ID: Self = Self::new(false, Axis::None);
    pub const SH: Self = Self::new(false, Axis::H);
    pub const ST: Self = Self::new(false, Axis::T);
    pub const SU: Self = Self::new(false, Axis::U);
    pub const INV: Self = Self::new(true, Axis::None);
    pub const INV_SH: Self = Self::new(true, Axis::H);
    pub const INV_ST: Self = Self::new(true, Axis::T);
    pub const INV_SU: Self = Self::new(true, Axis::U);

    /// All eight elements, in the canonical (tie-breaking) order.
    pub const ALL: [Self; 8] = [
        Self::ID,
        Self::SH,
        Self::ST,
        Self::SU,
        Self::INV,
        Self::INV_SH,
        Self::INV_ST,
        Self::INV_SU,
    ];

    /// The subgroup `{id, sH, sT, sU}` of automorphisms fixing each control
    /// ray setwise.
    pub const GAMMA: [Self; 4] = [Self::ID, Self::SH, Self::ST, Self::SU];

    pub const fn new(invert: bool, axis: Axis) -> Self {
        Self { invert, axis }
    }

    /// Position in [`Self::ALL`]; the deterministic tie-break order.
    pub fn ordinal(&self) -> usize {
        let a = match self.axis {
            Axis::None => 0,
            Axis::H => 1,
            Axis::T => 2,
            Axis::U => 3,
        };
        a + if self.invert { 4 } else { 0 }
    }

    pub fn name(&self) -> &'static str {
        match (self.invert, self.axis) {
            (false, Axis::None) => "id",
            (false, Axis::H) => "sH",
            (false, Axis::T) => "sT",
            (false, Axis::U) => "sU",
            (true, Axis::None) => "inv",
            (true, Axis::H) => "inv.sH",
            (true, Axis::T) => "inv.sT",
            (true, Axis::U) => "inv.sU",
        }
    }

    /// Group composition. Every element is an involution and the group is
    /// abelian, so the axis parts compose like the Klein four-group.
    pub fn compose(&self, other: &Self) -> Self {
        let axis = match (self.axis, other.axis) {
            (a, Axis::None) => a,
            (Axis::None, b) => b,
            (a, b) if a == b => Axis::None,
            (Axis::H, Axis::T) | (Axis::T, Axis::H) => Axis::U,
            (Axis::H, Axis::U) | (Axis::U, Axis::H) => Axis::T,
            _ => Axis::H, // remaining case: T, U in either order
        };
        Self::new(self.invert ^ other.invert, axis)
    }

    /// Action on SL(2).
    pub fn apply_group(&self, g: &GroupElement) -> GroupElement {
        let conj = match self.axis {
            Axis::None => *g,
            // H g H
            Axis::H => GroupElement {
                a: g.a,
                b: -g.b,
                c: -g.c,
                d: g.d,
            },
            // T g T
            Axis::T => GroupElement {
                a: g.d,
                b: g.c,
                c: g.b,
                d: g.a,
            },
            // -U g U
            Axis::U => GroupElement {
                a: g.d,
                b: -g.c,
                c: -g.b,
                d: g.a,
            },
        };
        if self.invert {
            conj.inverse()
        } else {
            conj
        }
    }

    /// The same operation on cover coordinates, where every tag acts
    /// linearly by sign flips.
    pub fn apply_cover(&self, x: &CoverElement) -> CoverElement {
        let mut v = match self.axis {
            Axis::None => *x,
            Axis::H => CoverElement::new(x.h, -x.t, -x.u),
            Axis::T => CoverElement::new(-x.h, x.t, -x.u),
            Axis::U => CoverElement::new(-x.h, -x.t, x.u),
        };
        if self.invert {
            v = v.neg();
        }
        v
    }

    /// Derivative action on a control (an extreme point or edge midpoint of
    /// the control square).
    pub fn apply_control(&self, ctrl: Control) -> Control {
        let conj = match self.axis {
            Axis::None => ctrl,
            Axis::H => match ctrl {
                Control::P => Control::NegP,
                Control::NegP => Control::P,
                Control::Q => Control::NegQ,
                Control::NegQ => Control::Q,
                Control::HalfT => Control::NegHalfT,
                Control::NegHalfT => Control::HalfT,
                Control::HalfU => Control::NegHalfU,
                Control::NegHalfU => Control::HalfU,
            },
            Axis::T => match ctrl {
                Control::P => Control::Q,
                Control::Q => Control::P,
                Control::NegP => Control::NegQ,
                Control::NegQ => Control::NegP,
                Control::HalfT => Control::HalfT,
                Control::NegHalfT => Control::NegHalfT,
                Control::HalfU => Control::NegHalfU,
                Control::NegHalfU => Control::HalfU,
            },
            Axis::U => match ctrl {
                Control::P => Control::NegQ,
                Control::NegQ => Control::P,
                Control::Q => Control::NegP,
                Control::NegP => Control::Q,
                Control::HalfT => Control::NegHalfT,
                Control::NegHalfT => Control::HalfT,
                Control::HalfU => Control::HalfU,
                Control::NegHalfU => Control::NegHalfU,
            },
        };
        if self.invert {
            conj.negate()
        } else {
            conj
        }
    }

    /// Action on a factorization: controls are mapped by the derivative
    /// action; inversion additionally reverses the factor order. Durations
    /// and total cost are untouched.
    pub fn apply_factorization(&self, f: &Factorization) -> Factorization {
        let mut factors: Vec<(Control, f64)> = f
            .factors
            .iter()
            .map(|&(c, d)| (self.apply_control(c), d))
            .collect();
        if self.invert {
            factors.reverse();
        }
        let mut out = Factorization::from_factors(factors);
        // durations are only permuted; keep the cost bit-identical
        out.cost = f.cost;
        out
    }
}

impl std::fmt::Display for SymmetryOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exp_matrix, AlgebraElement};
    use crate::cover::cover_map;
    use crate::fammaps::Control;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_table_is_klein_cube() {
        // closed, abelian, every element an involution: 64 pairs exhaustively
        for a in SymmetryOp::ALL {
            assert_eq!(a.compose(&a), SymmetryOp::ID);
            for b in SymmetryOp::ALL {
                let ab = a.compose(&b);
                assert!(SymmetryOp::ALL.contains(&ab));
                assert_eq!(ab, b.compose(&a));
            }
        }
    }

    #[test]
    fn ordinals_are_distinct() {
        let mut seen = [false; 8];
        for op in SymmetryOp::ALL {
            assert!(!seen[op.ordinal()]);
            seen[op.ordinal()] = true;
        }
    }

    #[test]
    fn apply_group_identity_and_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let g = cover_map(&CoverElement::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ));
            assert_eq!(SymmetryOp::ID.apply_group(&g), g);
            let gi = SymmetryOp::INV.apply_group(&g);
            assert!(g.mul(&gi).dist_max(&GroupElement::IDENTITY) < 1e-12);
        }
    }

    #[test]
    fn sigma_u_fixes_rotations() {
        let g = exp_matrix(&AlgebraElement::U.scale(0.9));
        assert!(SymmetryOp::SU.apply_group(&g).dist_max(&g) < 1e-15);
    }

    #[test]
    fn group_and_cover_actions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..300 {
            let x = CoverElement::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            for op in SymmetryOp::ALL {
                let via_cover = cover_map(&op.apply_cover(&x));
                let via_group = op.apply_group(&cover_map(&x));
                assert!(via_cover.dist_max(&via_group) < 1e-12);
            }
        }
    }

    #[test]
    fn factorization_action_examples() {
        // sigma_T maps a single P-arc to a Q-arc
        let f = Factorization::from_factors(vec![(Control::P, 0.8)]);
        let img = SymmetryOp::ST.apply_factorization(&f);
        assert_eq!(img.factors, vec![(Control::Q, 0.8)]);

        // inversion reverses and negates
        let f = Factorization::from_factors(vec![(Control::P, 0.5), (Control::NegQ, 0.25)]);
        let img = SymmetryOp::INV.apply_factorization(&f);
        assert_eq!(
            img.factors,
            vec![(Control::Q, 0.25), (Control::NegP, 0.5)]
        );

        // inv.sH stabilizes an A3-type sequence up to swapping outer arcs
        let f = Factorization::from_factors(vec![
            (Control::P, 0.3),
            (Control::NegQ, 0.7),
            (Control::P, 0.4),
        ]);
        let img = SymmetryOp::INV_SH.apply_factorization(&f);
        assert_eq!(
            img.factors,
            vec![(Control::P, 0.4), (Control::NegQ, 0.7), (Control::P, 0.3)]
        );
        assert!((img.cost - f.cost).abs() == 0.0);
    }

    #[test]
    fn factorization_action_matches_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let controls = [
            Control::P,
            Control::NegP,
            Control::Q,
            Control::NegQ,
            Control::HalfT,
            Control::NegHalfT,
            Control::HalfU,
            Control::NegHalfU,
        ];
        for _ in 0..200 {
            let n = rng.random_range(1..=5usize);
            let factors: Vec<(Control, f64)> = (0..n)
                .map(|_| {
                    (
                        controls[rng.random_range(0..controls.len())],
                        rng.random_range(0.0..1.5),
                    )
                })
                .collect();
            let f = Factorization::from_factors(factors);
            let g = f.evaluate();
            for op in SymmetryOp::ALL {
                let lhs = op.apply_factorization(&f).evaluate();
                let rhs = op.apply_group(&g);
                assert!(lhs.dist_max(&rhs) < 1e-10 * (1.0 + rhs.a.abs().max(rhs.d.abs())));
                assert_eq!(op.apply_factorization(&f).cost, f.cost);
            }
        }
    }
}
