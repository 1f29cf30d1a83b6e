//! The factorization-map families and their closed-form inversion.
//!
//! A factorization map is a product template like
//! `A3(r, s, t) = mex(rP, -sQ, tP)` together with a parameter domain and a
//! cost form. The fifteen maps `A3 .. S7b` make up the family `F` that is
//! sufficient for SL(2): every group element is reached optimally by some
//! map of `F` composed with one of the eight cost symmetries. `F1` drops
//! `S5a` and `S6` in exchange for bigger `S4P`/`S5P` domains; `F2`
//! additionally merges `A3` and `C3` into the signed-parameter map `B3`.
//!
//! Inversion exploits that the first and last factors are unitriangular:
//! one interior matrix entry depends on `s` alone (linearly for `A3`-type
//! maps, quadratically for the 4-factor maps, through the monotone cubic
//! `s^3 - 2s` for `A5`, and through a quadratic in `e^{s/2}` for the
//! singular maps); `r` and `t` then follow from one linear equation each.

use crate::algebra::{exp_matrix, AlgebraElement, GroupElement, SQRT2};
use crate::cover::{compose, exp_tilde, CoverElement};
use crate::symmetry::SymmetryOp;
use crate::{Error, Result, DEGENERATE_TOL};

/// A control value: a vertex of the control square `conv(+-P, +-Q)` or one
/// of the singular edge midpoints `+-T/2`, `+-U/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    P,
    NegP,
    Q,
    NegQ,
    HalfT,
    NegHalfT,
    HalfU,
    NegHalfU,
}

impl Control {
    /// The control as an element of sl(2).
    pub fn algebra(&self) -> AlgebraElement {
        match self {
            Control::P => AlgebraElement::P,
            Control::NegP => AlgebraElement::P.neg(),
            Control::Q => AlgebraElement::Q,
            Control::NegQ => AlgebraElement::Q.neg(),
            Control::HalfT => AlgebraElement::T.scale(0.5),
            Control::NegHalfT => AlgebraElement::T.scale(-0.5),
            Control::HalfU => AlgebraElement::U.scale(0.5),
            Control::NegHalfU => AlgebraElement::U.scale(-0.5),
        }
    }

    pub fn negate(&self) -> Control {
        match self {
            Control::P => Control::NegP,
            Control::NegP => Control::P,
            Control::Q => Control::NegQ,
            Control::NegQ => Control::Q,
            Control::HalfT => Control::NegHalfT,
            Control::NegHalfT => Control::HalfT,
            Control::HalfU => Control::NegHalfU,
            Control::NegHalfU => Control::HalfU,
        }
    }

    /// Forward controls move the Reeds-Shepp car forwards; their negatives
    /// move it backwards. A cusp sits at every forward/backward switch.
    pub fn is_forward(&self) -> bool {
        matches!(self, Control::P | Control::Q | Control::HalfT | Control::HalfU)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Control::P => "P",
            Control::NegP => "-P",
            Control::Q => "Q",
            Control::NegQ => "-Q",
            Control::HalfT => "T/2",
            Control::NegHalfT => "-T/2",
            Control::HalfU => "U/2",
            Control::NegHalfU => "-U/2",
        }
    }
}

impl std::fmt::Display for Control {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite product of control exponentials with nonnegative durations.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub factors: Vec<(Control, f64)>,
    /// Total shear, the exact sum of the durations.
    pub cost: f64,
}

impl Factorization {
    pub fn identity() -> Self {
        Self {
            factors: Vec::new(),
            cost: 0.0,
        }
    }

    /// Normalizes a factor list: zero durations are dropped and adjacent
    /// factors with the same control are merged.
    pub fn from_factors(raw: Vec<(Control, f64)>) -> Self {
        let mut factors: Vec<(Control, f64)> = Vec::with_capacity(raw.len());
        for (ctrl, dur) in raw {
            debug_assert!(dur >= 0.0, "durations must be nonnegative");
            if dur == 0.0 {
                continue;
            }
            if let Some(last) = factors.last_mut() {
                if last.0 == ctrl {
                    last.1 += dur;
                    continue;
                }
            }
            factors.push((ctrl, dur));
        }
        // + 0.0 turns the empty sum's -0.0 into +0.0
        let cost = factors.iter().map(|f| f.1).sum::<f64>() + 0.0;
        Self { factors, cost }
    }

    pub fn evaluate(&self) -> GroupElement {
        let mut g = GroupElement::IDENTITY;
        for &(ctrl, dur) in &self.factors {
            g = g.mul(&exp_matrix(&ctrl.algebra().scale(dur)));
        }
        g
    }

    /// Evaluation in the cover, where the vertical coordinate accumulates
    /// without wrapping.
    pub fn evaluate_cover(&self) -> CoverElement {
        let mut x = CoverElement::ZERO;
        for &(ctrl, dur) in &self.factors {
            x = compose(&x, &exp_tilde(&ctrl.algebra().scale(dur)));
        }
        x
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("id");
        }
        for (k, (ctrl, dur)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({}, {:.6})", ctrl, dur)?;
        }
        Ok(())
    }
}

/// Names of the factorization maps, in the tie-breaking order used by the
/// solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MapName {
    A3,
    A4,
    A5,
    C3,
    C4a,
    C4c,
    S3P,
    S3Q,
    S4P,
    S4Q,
    S5P,
    S5Q,
    S5a,
    S6,
    S7b,
    B3,
}

impl MapName {
    pub const ALL: [MapName; 16] = [
        MapName::A3,
        MapName::A4,
        MapName::A5,
        MapName::C3,
        MapName::C4a,
        MapName::C4c,
        MapName::S3P,
        MapName::S3Q,
        MapName::S4P,
        MapName::S4Q,
        MapName::S5P,
        MapName::S5Q,
        MapName::S5a,
        MapName::S6,
        MapName::S7b,
        MapName::B3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MapName::A3 => "A3",
            MapName::A4 => "A4",
            MapName::A5 => "A5",
            MapName::C3 => "C3",
            MapName::C4a => "C4a",
            MapName::C4c => "C4c",
            MapName::S3P => "S3P",
            MapName::S3Q => "S3Q",
            MapName::S4P => "S4P",
            MapName::S4Q => "S4Q",
            MapName::S5P => "S5P",
            MapName::S5Q => "S5Q",
            MapName::S5a => "S5a",
            MapName::S6 => "S6",
            MapName::S7b => "S7b",
            MapName::B3 => "B3",
        }
    }

    pub fn descriptor(&self) -> &'static MapDescriptor {
        MapDescriptor::get(*self)
    }
}

impl std::fmt::Display for MapName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MapName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MapName::ALL
            .iter()
            .copied()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownMap {
                name: s.to_string(),
            })
    }
}

/// The three sufficient families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// All fifteen maps with the tightest domains; the right family for
    /// meshing metric spheres.
    F,
    /// Thirteen maps: `S5a`, `S6` absorbed into bigger `S4P`, `S5P` domains.
    F1,
    /// Twelve maps: `A3`, `C3` replaced by the signed-parameter `B3`; the
    /// cheapest family for computing the distance alone.
    F2,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::F => "f",
            Family::F1 => "f1",
            Family::F2 => "f2",
        }
    }

    /// Maps of the family in increasing order of minimum possible cost,
    /// so the solver can stop early once an incumbent beats a whole family.
    pub fn maps(&self) -> &'static [MapName] {
        use MapName::*;
        match self {
            Family::F => &[
                A3, C3, S3P, S3Q, C4a, C4c, S4P, S4Q, A4, S5P, S5Q, S5a, A5, S6, S7b,
            ],
            Family::F1 => &[A3, C3, S3P, S3Q, C4a, C4c, S4P, S4Q, A4, S5P, S5Q, A5, S7b],
            Family::F2 => &[B3, S3P, S3Q, C4a, C4c, S4P, S4Q, A4, S5P, S5Q, A5, S7b],
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f" => Ok(Family::F),
            "f1" => Ok(Family::F1),
            "f2" => Ok(Family::F2),
            _ => Err(Error::UnknownMap {
                name: format!("family {s}"),
            }),
        }
    }
}

/// Symbolic duration of a template slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DurExpr {
    R,
    S,
    T,
    Const(f64),
}

impl DurExpr {
    fn value(&self, r: f64, s: f64, t: f64) -> f64 {
        match self {
            DurExpr::R => r,
            DurExpr::S => s,
            DurExpr::T => t,
            DurExpr::Const(c) => *c,
        }
    }
}

/// How the pivot entry depends on `s`.
#[derive(Debug, Clone, Copy)]
enum Pivot {
    /// pivot = -s
    LinearNeg,
    /// pivot = s
    Linear,
    /// pivot = 1 - s^2
    OneMinusSq,
    /// pivot = 1 + s^2
    OnePlusSq,
    /// pivot = s^3 - 2s, monotone on [sqrt2, sqrt3]
    Cubic,
    /// pivot = a cosh(s/2) + b sinh(s/2), a quadratic in e^{s/2}
    XiQuad { a: f64, b: f64 },
}

impl Pivot {
    fn solve(&self, y: f64) -> Vec<f64> {
        match *self {
            Pivot::LinearNeg => vec![-y],
            Pivot::Linear => vec![y],
            Pivot::OneMinusSq => {
                let sq = 1.0 - y;
                if sq < -1e-12 {
                    return Vec::new();
                }
                let s = sq.max(0.0).sqrt();
                vec![s, -s]
            }
            Pivot::OnePlusSq => {
                let sq = y - 1.0;
                if sq < -1e-12 {
                    return Vec::new();
                }
                let s = sq.max(0.0).sqrt();
                vec![s, -s]
            }
            Pivot::Cubic => match solve_cubic_monotone(y) {
                Ok(s) => vec![s],
                Err(_) => Vec::new(),
            },
            Pivot::XiQuad { a, b } => {
                // (a + b) xi^2 - 2 y xi + (a - b) = 0 for xi = e^{s/2}
                let disc = y * y - (a * a - b * b);
                if disc < 0.0 {
                    return Vec::new();
                }
                let root = disc.sqrt();
                [(y + root) / (a + b), (y - root) / (a + b)]
                    .into_iter()
                    .filter(|xi| *xi > 1e-14)
                    .map(|xi| 2.0 * xi.ln())
                    .collect()
            }
        }
    }
}

const W: f64 = SQRT2;

/// Per-map parameter domain: `r, t` boxes plus an `s` interval, with `r <= s`
/// style couplings for the bang-bang maps.
#[derive(Debug, Clone, Copy)]
struct DomainSpec {
    /// `r` and `t` are bounded by `min(rt_cap, rt_s_coupled ? s : inf)`.
    rt_cap: f64,
    rt_s_coupled: bool,
    s_min: f64,
    s_max: f64,
    /// B3 allows signed parameters; everything else is nonnegative.
    signed: bool,
}

/// One factorization map: factor template, pivot data, parameter domain,
/// cost form and symmetry-orbit data.
#[derive(Debug)]
pub struct MapDescriptor {
    pub name: MapName,
    slots: &'static [(Control, DurExpr)],
    pivot: Pivot,
    /// Invariant matrix entry (row, col), 0-indexed.
    pivot_entry: (usize, usize),
    /// Cost form `|r| + s_mult * |s| + |t| + offset`.
    pub s_cost_mult: f64,
    pub cost_offset: f64,
    /// Subgroup whose compositions with this map exhaust its symmetry orbit.
    pub orbit: &'static [SymmetryOp],
    /// Nontrivial stabilizer, when one exists (it swaps `r` and `t`).
    pub stabilizer: Option<SymmetryOp>,
    /// Delegation target for the derived maps (`S5a -> S4P`, `S6 -> S5P`):
    /// solutions are shifted by `t -> t - sqrt2`.
    delegate: Option<MapName>,
}

macro_rules! slots {
    ($(($c:ident, $d:expr)),* $(,)?) => {
        &[$((Control::$c, $d)),*]
    };
}

use DurExpr::{Const, R, S, T};

static A3_DESC: MapDescriptor = MapDescriptor {
    name: MapName::A3,
    slots: slots![(P, R), (NegQ, S), (P, T)],
    pivot: Pivot::LinearNeg,
    pivot_entry: (1, 0),
    s_cost_mult: 1.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SH),
    delegate: None,
};

static A4_DESC: MapDescriptor = MapDescriptor {
    name: MapName::A4,
    slots: slots![(P, R), (NegQ, S), (P, S), (NegQ, T)],
    pivot: Pivot::OneMinusSq,
    pivot_entry: (1, 1),
    s_cost_mult: 2.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_ST),
    delegate: None,
};

static A5_DESC: MapDescriptor = MapDescriptor {
    name: MapName::A5,
    slots: slots![(P, R), (NegQ, S), (P, S), (NegQ, S), (P, T)],
    pivot: Pivot::Cubic,
    pivot_entry: (1, 0),
    s_cost_mult: 3.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SH),
    delegate: None,
};

static C3_DESC: MapDescriptor = MapDescriptor {
    name: MapName::C3,
    slots: slots![(P, R), (Q, S), (NegP, T)],
    pivot: Pivot::Linear,
    pivot_entry: (1, 0),
    s_cost_mult: 1.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::ALL,
    stabilizer: None,
    delegate: None,
};

static C4A_DESC: MapDescriptor = MapDescriptor {
    name: MapName::C4a,
    slots: slots![(P, R), (NegQ, S), (NegP, S), (Q, T)],
    pivot: Pivot::OnePlusSq,
    pivot_entry: (1, 1),
    s_cost_mult: 2.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SU),
    delegate: None,
};

static C4C_DESC: MapDescriptor = MapDescriptor {
    name: MapName::C4c,
    slots: slots![(P, R), (Q, S), (NegP, S), (NegQ, T)],
    pivot: Pivot::OneMinusSq,
    pivot_entry: (1, 1),
    s_cost_mult: 2.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_ST),
    delegate: None,
};

static S3P_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S3P,
    slots: slots![(P, R), (HalfT, S), (P, T)],
    pivot: Pivot::XiQuad { a: 0.0, b: 1.0 },
    pivot_entry: (1, 0),
    s_cost_mult: 1.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SH),
    delegate: None,
};

static S3Q_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S3Q,
    slots: slots![(P, R), (HalfT, S), (Q, T)],
    pivot: Pivot::XiQuad { a: 1.0, b: 0.0 },
    pivot_entry: (1, 1),
    s_cost_mult: 1.0,
    cost_offset: 0.0,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SU),
    delegate: None,
};

static S4P_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S4P,
    slots: slots![(P, R), (HalfT, S), (P, Const(W)), (NegQ, T)],
    pivot: Pivot::XiQuad { a: 1.0, b: W },
    pivot_entry: (1, 1),
    s_cost_mult: 1.0,
    cost_offset: W,
    orbit: &SymmetryOp::ALL,
    stabilizer: None,
    delegate: None,
};

static S4Q_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S4Q,
    slots: slots![(P, R), (HalfT, S), (Q, Const(W)), (NegP, T)],
    pivot: Pivot::XiQuad { a: W, b: 1.0 },
    pivot_entry: (1, 0),
    s_cost_mult: 1.0,
    cost_offset: W,
    orbit: &SymmetryOp::ALL,
    stabilizer: None,
    delegate: None,
};

static S5P_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S5P,
    slots: slots![(NegQ, R), (P, Const(W)), (HalfT, S), (P, Const(W)), (NegQ, T)],
    pivot: Pivot::XiQuad { a: 2.0 * W, b: 3.0 },
    pivot_entry: (0, 1),
    s_cost_mult: 1.0,
    cost_offset: 2.0 * W,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SH),
    delegate: None,
};

static S5Q_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S5Q,
    slots: slots![(NegQ, R), (P, Const(W)), (HalfT, S), (Q, Const(W)), (NegP, T)],
    pivot: Pivot::XiQuad { a: 3.0, b: 2.0 * W },
    pivot_entry: (0, 0),
    s_cost_mult: 1.0,
    cost_offset: 2.0 * W,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_SU),
    delegate: None,
};

static S5A_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S5a,
    slots: slots![(P, R), (HalfT, S), (P, Const(W)), (NegQ, Const(W)), (NegQ, T)],
    pivot: Pivot::XiQuad { a: 1.0, b: W },
    pivot_entry: (1, 1),
    s_cost_mult: 1.0,
    cost_offset: 2.0 * W,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_ST),
    delegate: Some(MapName::S4P),
};

static S6_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S6,
    slots: slots![
        (NegQ, R),
        (P, Const(W)),
        (HalfT, S),
        (P, Const(W)),
        (NegQ, Const(W)),
        (NegQ, T),
    ],
    pivot: Pivot::XiQuad { a: 2.0 * W, b: 3.0 },
    pivot_entry: (0, 1),
    s_cost_mult: 1.0,
    cost_offset: 3.0 * W,
    orbit: &SymmetryOp::ALL,
    stabilizer: None,
    delegate: Some(MapName::S5P),
};

static S7B_DESC: MapDescriptor = MapDescriptor {
    name: MapName::S7b,
    slots: slots![
        (NegQ, R),
        (P, Const(W)),
        (HalfT, S),
        (P, Const(W)),
        (NegQ, Const(2.0 * W)),
        (P, T),
    ],
    pivot: Pivot::XiQuad {
        a: -7.0,
        b: -5.0 * W,
    },
    pivot_entry: (0, 0),
    s_cost_mult: 1.0,
    cost_offset: 4.0 * W,
    orbit: &SymmetryOp::GAMMA,
    stabilizer: Some(SymmetryOp::INV_ST),
    delegate: None,
};

static B3_DESC: MapDescriptor = MapDescriptor {
    name: MapName::B3,
    slots: slots![(P, R), (Q, S), (P, T)],
    pivot: Pivot::Linear,
    pivot_entry: (1, 0),
    s_cost_mult: 1.0,
    cost_offset: 0.0,
    orbit: &[SymmetryOp::ID, SymmetryOp::ST],
    stabilizer: None,
    delegate: None,
};

impl MapDescriptor {
    pub fn get(name: MapName) -> &'static MapDescriptor {
        match name {
            MapName::A3 => &A3_DESC,
            MapName::A4 => &A4_DESC,
            MapName::A5 => &A5_DESC,
            MapName::C3 => &C3_DESC,
            MapName::C4a => &C4A_DESC,
            MapName::C4c => &C4C_DESC,
            MapName::S3P => &S3P_DESC,
            MapName::S3Q => &S3Q_DESC,
            MapName::S4P => &S4P_DESC,
            MapName::S4Q => &S4Q_DESC,
            MapName::S5P => &S5P_DESC,
            MapName::S5Q => &S5Q_DESC,
            MapName::S5a => &S5A_DESC,
            MapName::S6 => &S6_DESC,
            MapName::S7b => &S7B_DESC,
            MapName::B3 => &B3_DESC,
        }
    }

    pub fn slots(&self) -> &'static [(Control, DurExpr)] {
        self.slots
    }

    /// Product of the factor exponentials, in order.
    pub fn evaluate(&self, r: f64, s: f64, t: f64) -> GroupElement {
        let mut g = GroupElement::IDENTITY;
        for (ctrl, expr) in self.slots {
            let x = expr.value(r, s, t);
            g = g.mul(&exp_matrix(&ctrl.algebra().scale(x)));
        }
        g
    }

    /// Evaluation in the cover; the vertical coordinate is unwrapped.
    pub fn evaluate_cover(&self, r: f64, s: f64, t: f64) -> CoverElement {
        let mut acc = CoverElement::ZERO;
        for (ctrl, expr) in self.slots {
            let x = expr.value(r, s, t);
            acc = compose(&acc, &exp_tilde(&ctrl.algebra().scale(x)));
        }
        acc
    }

    /// The factor sequence at given parameters; negative parameters flip the
    /// control sign, zero durations vanish.
    pub fn factorization(&self, r: f64, s: f64, t: f64) -> Factorization {
        let factors = self
            .slots
            .iter()
            .map(|(ctrl, expr)| {
                let x = expr.value(r, s, t);
                if x < 0.0 {
                    (ctrl.negate(), -x)
                } else {
                    (*ctrl, x)
                }
            })
            .collect();
        Factorization::from_factors(factors)
    }

    /// Exact duration sum of the template at the given parameters.
    pub fn cost(&self, r: f64, s: f64, t: f64) -> f64 {
        r.abs() + self.s_cost_mult * s.abs() + t.abs() + self.cost_offset
    }

    /// A lower bound for the cost over the whole domain, used for pruning.
    pub fn min_cost(&self) -> f64 {
        match self.name {
            MapName::A4 => 2.0,
            MapName::A5 => 3.0 * W,
            _ => self.cost_offset,
        }
    }

    fn domain_spec(&self, family: Family) -> DomainSpec {
        let bang = |s_max: f64| DomainSpec {
            rt_cap: f64::INFINITY,
            rt_s_coupled: true,
            s_min: 0.0,
            s_max,
            signed: false,
        };
        let singular = |r_cap: f64, t_cap: f64| DomainSpec {
            rt_cap: r_cap.max(t_cap), // boxes are refined below when asymmetric
            rt_s_coupled: false,
            s_min: 0.0,
            s_max: f64::INFINITY,
            signed: false,
        };
        match self.name {
            MapName::A3 => bang(2.0 * W),
            MapName::A4 => DomainSpec {
                s_min: 1.0,
                ..bang(2.0 * W)
            },
            MapName::A5 => DomainSpec {
                s_min: W,
                s_max: 3.0f64.sqrt(),
                ..bang(2.0 * W)
            },
            // C4a keeps the full CSP switching range: clockwise 4-factor
            // words with s in (1, sqrt2) are optimal on a region (the
            // counterclockwise rewrite eliminating them only applies to
            // C4c, whose domain therefore carries the s <= 1 restriction).
            MapName::C3 | MapName::C4a => bang(W),
            MapName::C4c => DomainSpec {
                s_max: 1.0,
                ..bang(W)
            },
            MapName::S3P | MapName::S3Q | MapName::S4Q | MapName::S5Q | MapName::S5a
            | MapName::S6 | MapName::S7b => singular(W, W),
            MapName::S4P => match family {
                Family::F => singular(W, W),
                // bigger domain absorbs S5a: t up to 2 sqrt2
                Family::F1 | Family::F2 => singular(W, 2.0 * W),
            },
            MapName::S5P => match family {
                Family::F => singular(W, W),
                // bigger domain absorbs S6
                Family::F1 | Family::F2 => singular(2.0 * W, 2.0 * W),
            },
            MapName::B3 => DomainSpec {
                rt_cap: 2.0 * W,
                rt_s_coupled: false,
                s_min: -2.0 * W,
                s_max: 2.0 * W,
                signed: true,
            },
        }
    }

    /// Separate caps for `r` and `t` (only `S4P`/`S5P` in the big-domain
    /// families are asymmetric).
    fn rt_caps(&self, family: Family) -> (f64, f64) {
        match (self.name, family) {
            (MapName::S4P, Family::F1 | Family::F2) => (W, 2.0 * W),
            (MapName::S5P, Family::F1 | Family::F2) => (2.0 * W, 2.0 * W),
            _ => {
                let spec = self.domain_spec(family);
                (spec.rt_cap, spec.rt_cap)
            }
        }
    }

    /// Whether this map belongs to the family at all.
    pub fn in_family(&self, family: Family) -> bool {
        family.maps().contains(&self.name)
    }

    /// Domain membership with boundary slack `tol`, and the exact cost.
    pub fn domain_and_cost(&self, r: f64, s: f64, t: f64, family: Family, tol: f64) -> (bool, f64) {
        let cost = self.cost(r, s, t);
        if !self.in_family(family) {
            return (false, cost);
        }
        let spec = self.domain_spec(family);
        let (r_cap, t_cap) = self.rt_caps(family);
        let ok = if spec.signed {
            r.abs() <= r_cap + tol && t.abs() <= t_cap + tol && s.abs() <= spec.s_max + tol
        } else {
            let rt_max_r = if spec.rt_s_coupled { s.min(r_cap) } else { r_cap };
            let rt_max_t = if spec.rt_s_coupled { s.min(t_cap) } else { t_cap };
            r >= -tol
                && t >= -tol
                && s >= spec.s_min - tol
                && s <= spec.s_max + tol
                && r <= rt_max_r + tol
                && t <= rt_max_t + tol
        };
        (ok, cost)
    }

    fn middle_product(&self, s: f64) -> GroupElement {
        let mut g = GroupElement::IDENTITY;
        for (ctrl, expr) in &self.slots[1..self.slots.len() - 1] {
            let x = expr.value(0.0, s, 0.0);
            g = g.mul(&exp_matrix(&ctrl.algebra().scale(x)));
        }
        g
    }

    /// All real parameter triples with `evaluate(r, s, t) = g` up to `tol`
    /// in the max norm. An empty list means no solution; domain filtering is
    /// the caller's business.
    pub fn invert(&self, g: &GroupElement, tol: f64) -> Vec<(f64, f64, f64)> {
        if let Some(target) = self.delegate {
            // S5a(r,s,t) = S4P(r,s,t+w), S6(r,s,t) = S5P(r,s,t+w)
            return MapDescriptor::get(target)
                .invert(g, tol)
                .into_iter()
                .map(|(r, s, t)| (r, s, t - W))
                .collect();
        }

        let entries = |m: &GroupElement| [[m.a, m.b], [m.c, m.d]];
        let gm = entries(g);
        let (pi, pj) = self.pivot_entry;
        let (qi, qj) = (1 - pi, 1 - pj);
        let y = gm[pi][pj];

        let n1 = nilpotent_of(self.slots[0].0);
        let n2 = nilpotent_of(self.slots[self.slots.len() - 1].0);

        let mut raw: Vec<(f64, f64, f64)> = Vec::new();
        for s in self.pivot.solve(y) {
            let m = self.middle_product(s);
            let mm = entries(&m);
            let mn2 = mat2_mul(&mm, &n2);
            let n1m = mat2_mul(&n1, &mm);
            let dt = mn2[pi][qj];
            let dr = n1m[qi][pj];
            if dt.abs() >= DEGENERATE_TOL && dr.abs() >= DEGENERATE_TOL {
                let t = (gm[pi][qj] - mm[pi][qj]) / dt;
                let r = (gm[qi][pj] - mm[qi][pj]) / dr;
                raw.push((r, s, t));
            } else {
                // Degenerate pivot: r and t act along the same direction, so
                // only a combination is determined. Offer the extreme and
                // balanced splits and let verification sort them out.
                let delta = [
                    [gm[0][0] - mm[0][0], gm[0][1] - mm[0][1]],
                    [gm[1][0] - mm[1][0], gm[1][1] - mm[1][1]],
                ];
                raw.push((0.0, s, 0.0));
                let cap = self.rt_caps(Family::F).0;
                if let Some(r0) = dominant_ratio(&delta, &n1m) {
                    raw.push((r0, s, 0.0));
                    raw.push((r0 / 2.0, s, r0 / 2.0));
                    let clamped = r0.clamp(-cap, cap);
                    raw.push((clamped, s, r0 - clamped));
                }
                if let Some(t0) = dominant_ratio(&delta, &mn2) {
                    raw.push((0.0, s, t0));
                    let clamped = t0.clamp(-cap, cap);
                    raw.push((t0 - clamped, s, clamped));
                }
            }
        }

        let mut out: Vec<(f64, f64, f64)> = Vec::new();
        for (r, s, t) in raw {
            if !(r.is_finite() && s.is_finite() && t.is_finite()) {
                continue;
            }
            if self.evaluate(r, s, t).dist_max(g) > tol {
                continue;
            }
            if !out.iter().any(|&(r2, s2, t2)| {
                (r - r2).abs() < 1e-9 && (s - s2).abs() < 1e-9 && (t - t2).abs() < 1e-9
            }) {
                out.push((r, s, t));
            }
        }
        out
    }
}

/// The 2x2 matrix of a nilpotent control (`+-P`, `+-Q`), so that
/// `exp(x ctrl) = I + x N`.
fn nilpotent_of(ctrl: Control) -> [[f64; 2]; 2] {
    let [a, b, c, d] = ctrl.algebra().entries();
    debug_assert!(ctrl.algebra().det().abs() < 1e-15);
    [[a, b], [c, d]]
}

fn mat2_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `delta ~ x * basis` solved at the largest basis entry; `None` when the
/// basis is numerically zero.
fn dominant_ratio(delta: &[[f64; 2]; 2], basis: &[[f64; 2]; 2]) -> Option<f64> {
    let mut best = (0usize, 0usize);
    let mut mag = 0.0f64;
    for (i, row) in basis.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if entry.abs() > mag {
                mag = entry.abs();
                best = (i, j);
            }
        }
    }
    if mag < 1e-9 {
        return None;
    }
    Some(delta[best.0][best.1] / basis[best.0][best.1])
}

/// Root of the monotone cubic `s^3 - 2s = y` on `[sqrt2, sqrt3]` by
/// safeguarded Newton; `p' = 3s^2 - 2 >= 4` there, so convergence is
/// quadratic from the start value `sqrt2 (1 + y/4)`.
pub fn solve_cubic_monotone(y: f64) -> Result<f64> {
    let lo = SQRT2;
    let hi = 3.0f64.sqrt();
    if !(-1e-9..=hi + 1e-9).contains(&y) {
        return Err(Error::OutOfRange {
            what: "cubic right-hand side",
            value: y,
        });
    }
    let mut s = (SQRT2 * (1.0 + y / 4.0)).clamp(lo - 1e-8, hi + 1e-8);
    for _ in 0..64 {
        let err = s * s * s - 2.0 * s - y;
        if err.abs() <= 1e-13 {
            return Ok(s);
        }
        s = (s - err / (3.0 * s * s - 2.0)).clamp(lo - 1e-8, hi + 1e-8);
    }
    let err = s * s * s - 2.0 * s - y;
    if err.abs() <= 1e-13 {
        Ok(s)
    } else {
        Err(Error::OutOfRange {
            what: "cubic newton residual",
            value: err,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_domain(rng: &mut ChaCha8Rng, name: MapName, family: Family) -> (f64, f64, f64) {
        let d = MapDescriptor::get(name);
        loop {
            let (s_lo, s_hi, cap) = match name {
                MapName::A3 => (0.0, 2.0 * W, f64::NAN),
                MapName::A4 => (1.0, 2.0 * W, f64::NAN),
                MapName::A5 => (W, 3.0f64.sqrt(), f64::NAN),
                MapName::C3 => (0.0, W, f64::NAN),
                MapName::C4a => (0.0, W, f64::NAN),
                MapName::C4c => (0.0, 1.0, f64::NAN),
                MapName::B3 => (-2.0 * W, 2.0 * W, 2.0 * W),
                _ => (0.0, 4.0, W),
            };
            let s = rng.random_range(s_lo..s_hi);
            let (r, t) = if name == MapName::B3 {
                (
                    rng.random_range(-cap..cap),
                    rng.random_range(-cap..cap),
                )
            } else if cap.is_nan() {
                (rng.random_range(0.0..s.max(1e-12)), rng.random_range(0.0..s.max(1e-12)))
            } else {
                let (rc, tc) = (d.rt_caps(family).0, d.rt_caps(family).1);
                (rng.random_range(0.0..rc), rng.random_range(0.0..tc))
            };
            let (ok, _) = d.domain_and_cost(r, s, t, family, 1e-9);
            if ok {
                return (r, s, t);
            }
        }
    }

    #[test]
    fn evaluate_known_products() {
        let a3 = MapDescriptor::get(MapName::A3);
        assert!(a3.evaluate(0.0, 0.0, 0.0).dist_max(&GroupElement::IDENTITY) < 1e-15);
        // mex(P, -Q, P) is the quarter rotation
        let g = a3.evaluate(1.0, 1.0, 1.0);
        let expect = GroupElement::from_entries_unchecked(0.0, 1.0, -1.0, 0.0);
        assert!(g.dist_max(&expect) < 1e-14);

        // closed forms of the three-factor products
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let (r, s, t) = (
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..2.0),
            );
            let g = a3.evaluate(r, s, t);
            assert!((g.a - (1.0 - r * s)).abs() < 1e-12);
            assert!((g.c + s).abs() < 1e-12);
            assert!((g.d - (1.0 - s * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn derived_map_identities() {
        // S5a = S4P(r, s, t + w), S6 = S5P(r, s, t + w),
        // S7b = S5P(r, s, 2w) exp(tP); all entrywise
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..200 {
            let (r, s, t) = (
                rng.random_range(0.0..W),
                rng.random_range(0.0..3.0),
                rng.random_range(0.0..W),
            );
            let s5a = MapDescriptor::get(MapName::S5a).evaluate(r, s, t);
            let s4p = MapDescriptor::get(MapName::S4P).evaluate(r, s, t + W);
            assert!(s5a.dist_max(&s4p) < 1e-12 * (1.0 + s4p.a.abs()));

            let s6 = MapDescriptor::get(MapName::S6).evaluate(r, s, t);
            let s5p = MapDescriptor::get(MapName::S5P).evaluate(r, s, t + W);
            assert!(s6.dist_max(&s5p) < 1e-12 * (1.0 + s5p.a.abs()));

            let s7b = MapDescriptor::get(MapName::S7b).evaluate(r, s, t);
            let via = MapDescriptor::get(MapName::S5P)
                .evaluate(r, s, 2.0 * W)
                .mul(&exp_matrix(&AlgebraElement::P.scale(t)));
            assert!(s7b.dist_max(&via) < 1e-12 * (1.0 + via.a.abs()));

            // S7a(r,s,t) = sigma_U(S5P(r + w, s, t + w))
            let s7a = {
                let f = Factorization::from_factors(vec![
                    (Control::P, r),
                    (Control::HalfT, s),
                    (Control::P, W),
                    (Control::NegQ, 2.0 * W),
                    (Control::P, W),
                    (Control::P, t),
                ]);
                f.evaluate()
            };
            let via = SymmetryOp::SU
                .apply_group(&MapDescriptor::get(MapName::S5P).evaluate(r + W, s, t + W));
            assert!(s7a.dist_max(&via) < 1e-12 * (1.0 + via.a.abs()));
        }
    }

    #[test]
    fn domain_and_cost_examples() {
        let sqrt3 = 3.0f64.sqrt();
        let (ok, cost) =
            MapDescriptor::get(MapName::A5).domain_and_cost(0.0, W, 0.0, Family::F, 1e-9);
        assert!(ok && (cost - 3.0 * W).abs() < 1e-15);
        let (ok, _) =
            MapDescriptor::get(MapName::A5).domain_and_cost(0.0, sqrt3, 0.0, Family::F, 1e-9);
        assert!(ok);
        // the counterclockwise 4-factor map is capped at s = 1, the
        // clockwise one runs to sqrt2
        let (ok, _) =
            MapDescriptor::get(MapName::C4c).domain_and_cost(0.0, 1.2, 0.0, Family::F, 1e-9);
        assert!(!ok);
        let (ok, _) =
            MapDescriptor::get(MapName::C4a).domain_and_cost(0.0, 1.2, 0.0, Family::F, 1e-9);
        assert!(ok);
        let (ok, cost) =
            MapDescriptor::get(MapName::S4P).domain_and_cost(0.0, 0.0, 0.0, Family::F, 1e-9);
        assert!(ok && (cost - W).abs() < 1e-15);
        // the bigger F1 domain accepts t up to 2 sqrt2 for S4P
        let t = 1.9;
        let (ok_f, _) = MapDescriptor::get(MapName::S4P).domain_and_cost(0.1, 1.0, t, Family::F, 1e-9);
        let (ok_f1, _) =
            MapDescriptor::get(MapName::S4P).domain_and_cost(0.1, 1.0, t, Family::F1, 1e-9);
        assert!(!ok_f && ok_f1);
        // B3 takes signed parameters
        let (ok, cost) =
            MapDescriptor::get(MapName::B3).domain_and_cost(-1.0, 2.0, -0.5, Family::F2, 1e-9);
        assert!(ok && (cost - 3.5).abs() < 1e-15);
    }

    #[test]
    fn cubic_solver_endpoints_and_oracle() {
        let sqrt3 = 3.0f64.sqrt();
        assert!((solve_cubic_monotone(0.0).unwrap() - W).abs() < 1e-13);
        assert!((solve_cubic_monotone(sqrt3).unwrap() - sqrt3).abs() < 1e-13);

        // bisection oracle
        let bisect = |y: f64| {
            let (mut lo, mut hi) = (W, sqrt3);
            for _ in 0..200 {
                let mid = (lo + hi) / 2.0;
                if mid * mid * mid - 2.0 * mid < y {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo + hi) / 2.0
        };
        for k in 0..50 {
            let y = sqrt3 * k as f64 / 49.0;
            let s = solve_cubic_monotone(y).unwrap();
            assert!((s - bisect(y)).abs() < 1e-12);
            assert!((s * s * s - 2.0 * s - y).abs() <= 1e-13);
        }
        assert!(solve_cubic_monotone(-0.5).is_err());
        assert!(solve_cubic_monotone(2.0).is_err());
    }

    #[test]
    fn invert_identity_and_quarter_turn() {
        let a3 = MapDescriptor::get(MapName::A3);
        let sols = a3.invert(&GroupElement::IDENTITY, 1e-9);
        assert!(sols
            .iter()
            .any(|&(r, s, t)| r.abs() < 1e-12 && s.abs() < 1e-12 && t.abs() < 1e-12));

        // rotation by alpha solves A3 with (tan(a/2), sin a, tan(a/2))
        let alpha = std::f64::consts::PI / 3.0;
        let g = exp_matrix(&AlgebraElement::U.scale(alpha));
        let sols = a3.invert(&g, 1e-9);
        let r = (alpha / 2.0).tan();
        let s = alpha.sin();
        assert!(
            sols.iter()
                .any(|&(r2, s2, t2)| (r2 - r).abs() < 1e-10
                    && (s2 - s).abs() < 1e-10
                    && (t2 - r).abs() < 1e-10),
            "solutions: {sols:?}"
        );
    }

    #[test]
    fn invert_round_trips_all_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for name in MapName::ALL {
            let family = if name == MapName::B3 { Family::F2 } else { Family::F };
            let d = MapDescriptor::get(name);
            for _ in 0..400 {
                let (r, s, t) = sample_domain(&mut rng, name, family);
                let g = d.evaluate(r, s, t);
                let tol = 1e-7 * (1.0 + g.a.abs().max(g.d.abs()).max(g.b.abs()));
                let sols = d.invert(&g, tol);
                assert!(
                    sols.iter().any(|&(r2, s2, t2)| (r - r2).abs() < 1e-9
                        && (s - s2).abs() < 1e-9
                        && (t - t2).abs() < 1e-9),
                    "{name}: ({r}, {s}, {t}) not recovered from {sols:?}"
                );
            }
        }
    }

    #[test]
    fn invert_unipotent_through_degenerate_branch() {
        // exp(P) forces the s = 0 branch of S3P and B3
        let g = GroupElement::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let sols = MapDescriptor::get(MapName::S3P).invert(&g, 1e-9);
        assert!(sols
            .iter()
            .any(|&(r, s, t)| (r + t - 1.0).abs() < 1e-10 && s.abs() < 1e-12));
        let sols = MapDescriptor::get(MapName::B3).invert(&g, 1e-9);
        assert!(sols
            .iter()
            .any(|&(r, s, t)| (r + t - 1.0).abs() < 1e-10 && s.abs() < 1e-12));

        // the A5 degenerate branch at s = sqrt2: -identity
        let sols = MapDescriptor::get(MapName::A5).invert(&GroupElement::IDENTITY.neg(), 1e-9);
        assert!(
            sols.iter()
                .any(|&(r, s, t)| (s - W).abs() < 1e-9 && (r + t - W).abs() < 1e-9),
            "A5 solutions at -id: {sols:?}"
        );
    }

    #[test]
    fn invert_finds_no_solution_when_there_is_none() {
        // S3Q pivot cosh(s/2) = d requires d >= 1
        let g = exp_matrix(&AlgebraElement::U.scale(1.0));
        assert!((g.d - 1.0f64.cos()).abs() < 1e-12);
        let sols = MapDescriptor::get(MapName::S3Q).invert(&g, 1e-9);
        assert!(sols.is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn a4_round_trip(frac_r in 0.0f64..1.0, s in 1.0f64..2.8, frac_t in 0.0f64..1.0) {
                let s = s.min(2.0 * W);
                let (r, t) = (frac_r * s, frac_t * s);
                let d = MapDescriptor::get(MapName::A4);
                let g = d.evaluate(r, s, t);
                let tol = 1e-7 * (1.0 + g.a.abs().max(g.b.abs()).max(g.d.abs()));
                let hit = d.invert(&g, tol).iter().any(|&(r2, s2, t2)| {
                    (r - r2).abs() < 1e-9 && (s - s2).abs() < 1e-9 && (t - t2).abs() < 1e-9
                });
                prop_assert!(hit);
            }

            #[test]
            fn b3_round_trip(
                r in -2.8f64..2.8,
                s in -2.8f64..2.8,
                t in -2.8f64..2.8,
            ) {
                let d = MapDescriptor::get(MapName::B3);
                let g = d.evaluate(r, s, t);
                let tol = 1e-7 * (1.0 + g.a.abs().max(g.b.abs()).max(g.d.abs()));
                let hit = d.invert(&g, tol).iter().any(|&(r2, s2, t2)| {
                    (r - r2).abs() < 1e-8 && (s - s2).abs() < 1e-8 && (t - t2).abs() < 1e-8
                });
                prop_assert!(hit);
            }

            #[test]
            fn s5p_round_trip(r in 0.0f64..1.4, s in 0.0f64..3.0, t in 0.0f64..1.4) {
                let d = MapDescriptor::get(MapName::S5P);
                let g = d.evaluate(r, s, t);
                let tol = 1e-7 * (1.0 + g.a.abs().max(g.b.abs()).max(g.d.abs()));
                let hit = d.invert(&g, tol).iter().any(|&(r2, s2, t2)| {
                    (r - r2).abs() < 1e-9 && (s - s2).abs() < 1e-9 && (t - t2).abs() < 1e-9
                });
                prop_assert!(hit);
            }
        }
    }

    #[test]
    fn b3_covers_a3_and_c3_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let b3 = MapDescriptor::get(MapName::B3);
        for _ in 0..300 {
            let from_a3 = rng.random_range(0..2) == 0;
            let name = if from_a3 { MapName::A3 } else { MapName::C3 };
            let (r, s, t) = sample_domain(&mut rng, name, Family::F);
            let g = MapDescriptor::get(name).evaluate(r, s, t);
            let tol = 1e-8 * (1.0 + g.a.abs().max(g.d.abs()));
            let sols = b3.invert(&g, tol);
            let hit = sols.iter().any(|&(r2, s2, t2)| {
                b3.domain_and_cost(r2, s2, t2, Family::F2, 1e-9).0
                    && b3.evaluate(r2, s2, t2).dist_max(&g) <= tol
            });
            assert!(hit, "B3 misses {name}({r}, {s}, {t})");
        }
    }
}
