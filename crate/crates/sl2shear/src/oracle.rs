//! Independent brute-force verification.
//!
//! [`refine_upper_bound`] searches for cheap factorizations without any
//! knowledge of the closed-form solver: it enumerates control sign patterns
//! and locally minimizes total duration under an endpoint penalty. It can
//! only ever return a valid upper bound for the distance, so it certifies
//! optimality claims from above: the solver is wrong if the oracle beats it.
//!
//! [`identity_suite`] numerically checks every product identity the
//! comparison arguments rest on, both as 2x2 matrices and in the cover.

use crate::algebra::{exp_matrix, mat3_apply, AlgebraElement, GroupElement, SQRT2};
use crate::cover::{compose, exp_tilde, CoverElement};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Default control set: the bang controls and the optimal singular
/// direction. The vertical singular controls `+-U/2` are omitted; they are
/// never optimal and only slow the search down.
fn canonical_controls() -> [AlgebraElement; 6] {
    [
        AlgebraElement::P,
        AlgebraElement::P.neg(),
        AlgebraElement::Q,
        AlgebraElement::Q.neg(),
        AlgebraElement::T.scale(0.5),
        AlgebraElement::T.scale(-0.5),
    ]
}

/// Index of the inverse control in the arrays produced above.
fn inverse_index(i: usize) -> usize {
    i ^ 1
}

/// Endpoint of one duration vector.
fn product_of(controls: &[AlgebraElement], pattern: &[usize], d: &[f64]) -> GroupElement {
    let mut e = GroupElement::IDENTITY;
    for (i, &di) in d.iter().enumerate() {
        e = e.mul(&exp_matrix(&controls[pattern[i]].scale(di)));
    }
    e
}

/// Residual (entrywise difference to the target) and its Jacobian with
/// respect to the durations, as a 4 x k column list.
fn residual_jacobian(
    controls: &[AlgebraElement],
    pattern: &[usize],
    d: &[f64],
    target: &GroupElement,
) -> ([f64; 4], Vec<[f64; 4]>) {
    let k = d.len();
    let mut exps = Vec::with_capacity(k);
    for i in 0..k {
        exps.push(exp_matrix(&controls[pattern[i]].scale(d[i])));
    }
    let mut prefix = vec![GroupElement::IDENTITY; k + 1];
    for i in 0..k {
        prefix[i + 1] = prefix[i].mul(&exps[i]);
    }
    let mut suffix = vec![GroupElement::IDENTITY; k + 1];
    for i in (0..k).rev() {
        suffix[i] = exps[i].mul(&suffix[i + 1]);
    }
    let e = prefix[k];
    let res = [
        e.a - target.a,
        e.b - target.b,
        e.c - target.c,
        e.d - target.d,
    ];
    let mut cols = Vec::with_capacity(k);
    for i in 0..k {
        let [xa, xb, xc, xd] = controls[pattern[i]].entries();
        // d/dd_i E = L_{i-1} (A_i exp(d_i A_i)) R_{i+1}
        let m = GroupElement {
            a: xa * exps[i].a + xb * exps[i].c,
            b: xa * exps[i].b + xb * exps[i].d,
            c: xc * exps[i].a + xd * exps[i].c,
            d: xc * exps[i].b + xd * exps[i].d,
        };
        let lm = prefix[i].mul(&m);
        let full = lm.mul(&suffix[i + 1]);
        cols.push([full.a, full.b, full.c, full.d]);
    }
    (res, cols)
}

/// Solves the regularized 4x4 system `(J J^T + lambda I) x = b` in place.
fn solve4(mut m: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let mut piv = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        m.swap(col, piv);
        b.swap(col, piv);
        let diag = m[col][col];
        if diag.abs() < 1e-300 {
            continue;
        }
        for row in col + 1..4 {
            let f = m[row][col] / diag;
            let pivot_row = m[col];
            for (j, entry) in m[row].iter_mut().enumerate().skip(col) {
                *entry -= f * pivot_row[j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut acc = b[col];
        for j in col + 1..4 {
            acc -= m[col][j] * x[j];
        }
        x[col] = if m[col][col].abs() < 1e-300 {
            0.0
        } else {
            acc / m[col][col]
        };
    }
    x
}

/// Least-squares step `J^T (J J^T + lambda)^{-1} v` for the 4 x k Jacobian.
fn normal_step(cols: &[[f64; 4]], v: [f64; 4], lambda: f64) -> Vec<f64> {
    let mut jjt = [[0.0f64; 4]; 4];
    for c in cols {
        for i in 0..4 {
            for j in 0..4 {
                jjt[i][j] += c[i] * c[j];
            }
        }
    }
    for (i, row) in jjt.iter_mut().enumerate() {
        row[i] += lambda;
    }
    let y = solve4(jjt, v);
    cols.iter()
        .map(|c| c[0] * y[0] + c[1] * y[1] + c[2] * y[2] + c[3] * y[3])
        .collect()
}

/// Local search over the durations of one control pattern: Gauss-Newton
/// onto the endpoint manifold, then cost descent along its null space with
/// re-projection. Returns the best feasible cost (endpoint error below
/// `1e-8`), or nothing if the initialization never reaches the manifold.
fn local_search(
    controls: &[AlgebraElement],
    pattern: &[usize],
    init: &[f64],
    target: &GroupElement,
    abort_above: f64,
) -> Option<f64> {
    const DUR_CAP: f64 = 8.0;
    let feas_tol = 1e-11 * (1.0 + target.a.abs().max(target.d.abs()).max(target.b.abs()));
    let mut d = init.to_vec();

    // Phase 1: feasibility by damped Gauss-Newton
    let mut lambda = 1e-6;
    let mut err2 = f64::INFINITY;
    for _ in 0..60 {
        let (res, cols) = residual_jacobian(controls, pattern, &d, target);
        let e2: f64 = res.iter().map(|r| r * r).sum();
        if e2 < feas_tol * feas_tol {
            err2 = e2;
            break;
        }
        let step = normal_step(&cols, res, lambda);
        let trial: Vec<f64> = d
            .iter()
            .zip(&step)
            .map(|(&x, &s)| (x - s).clamp(0.0, DUR_CAP))
            .collect();
        let (tres, _) = residual_jacobian(controls, pattern, &trial, target);
        let t2: f64 = tres.iter().map(|r| r * r).sum();
        if t2 < e2 {
            d = trial;
            err2 = t2;
            lambda = (lambda / 3.0).max(1e-12);
        } else {
            lambda *= 8.0;
            if lambda > 1e8 {
                break;
            }
        }
    }
    if err2 > feas_tol * feas_tol {
        return None;
    }

    let mut best = d.iter().sum::<f64>();
    // descent below shrinks the cost substantially; prune only hopeless
    // branches
    if best > abort_above + 4.0 {
        return Some(best);
    }

    // Phase 2: descend the cost along the constraint null space, then
    // re-project; step length shrinks geometrically
    let mut eta = 0.25;
    for _ in 0..110 {
        let (_, cols) = residual_jacobian(controls, pattern, &d, target);
        // project the cost gradient (all ones) onto the null space of J;
        // components pinned at zero that want to go negative are frozen
        let jg: [f64; 4] = {
            let mut acc = [0.0f64; 4];
            for (i, c) in cols.iter().enumerate() {
                let gi = if d[i] <= 0.0 { 0.0 } else { 1.0 };
                for j in 0..4 {
                    acc[j] += c[j] * gi;
                }
            }
            acc
        };
        let corr = normal_step(&cols, jg, 1e-9);
        let mut dir: Vec<f64> = corr.iter().map(|c| 1.0 - c).collect();
        for (i, di) in dir.iter_mut().enumerate() {
            if d[i] <= 0.0 {
                *di = di.min(0.0); // frozen at the bound unless it helps
            }
        }
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        let trial: Vec<f64> = d
            .iter()
            .zip(&dir)
            .map(|(&x, &g)| (x - eta * g).clamp(0.0, DUR_CAP))
            .collect();
        // re-project onto the manifold
        let mut t = trial;
        let mut ok = false;
        for _ in 0..25 {
            let (res, cols) = residual_jacobian(controls, pattern, &t, target);
            let e2: f64 = res.iter().map(|r| r * r).sum();
            if e2 < feas_tol * feas_tol {
                ok = true;
                break;
            }
            let step = normal_step(&cols, res, 1e-10);
            for (x, s) in t.iter_mut().zip(&step) {
                *x = (*x - s).clamp(0.0, DUR_CAP);
            }
        }
        if ok {
            let cost: f64 = t.iter().sum();
            if cost < best - 1e-14 {
                best = cost;
                d = t;
                eta = (eta * 1.3).min(0.5);
                continue;
            }
        }
        eta *= 0.5;
        if eta < 1e-10 {
            break;
        }
    }

    // active-set polish: durations stuck near a bound often belong exactly
    // on it; pin each small one to zero, re-project the rest and keep any
    // feasible improvement
    for pin in 0..d.len() {
        if d[pin] <= 0.0 || d[pin] > 1e-2 {
            continue;
        }
        let mut t = d.clone();
        t[pin] = 0.0;
        let mut ok = false;
        for _ in 0..25 {
            let (res, mut cols) = residual_jacobian(controls, pattern, &t, target);
            cols[pin] = [0.0; 4];
            let e2: f64 = res.iter().map(|r| r * r).sum();
            if e2 < feas_tol * feas_tol {
                ok = true;
                break;
            }
            let step = normal_step(&cols, res, 1e-10);
            for (i, (x, s)) in t.iter_mut().zip(&step).enumerate() {
                if i != pin {
                    *x = (*x - s).clamp(0.0, DUR_CAP);
                }
            }
        }
        if ok {
            let cost: f64 = t.iter().sum();
            if cost < best {
                best = cost;
                d = t;
            }
        }
    }

    // snap tiny durations to zero and re-verify
    let snapped: Vec<f64> = d.iter().map(|&x| if x < 1e-10 { 0.0 } else { x }).collect();
    let e = product_of(controls, pattern, &snapped);
    if e.dist_max(target) <= 1e-8 {
        best = best.min(snapped.iter().sum());
    }
    Some(best)
}

/// All control index patterns of length `1..=max_factors` without adjacent
/// repeats or adjacent inverse pairs (both are never cost-improving).
fn patterns(n_controls: usize, max_factors: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n_controls).map(|c| vec![c]).collect();
    while let Some(p) = stack.pop() {
        if p.len() < max_factors {
            let last = *p.last().unwrap();
            for c in 0..n_controls {
                if c != last && c != inverse_index(last) {
                    let mut q = p.clone();
                    q.push(c);
                    stack.push(q);
                }
            }
        }
        out.push(p);
    }
    out.sort();
    out
}

/// Multi-start local search for cheap factorizations of `g` over the given
/// control set.
///
/// Every sign pattern of length `<= max_factors` receives
/// `max(1, restarts / 16)` random duration initializations from
/// `[0, 2 sqrt2]`; the penalty weight is continued from `1e2` to `1e8`.
/// Deterministic for a fixed seed. Returns `+inf` when no restart reaches
/// the endpoint within `1e-8`.
pub fn refine_upper_bound_controls(
    g: &GroupElement,
    controls: &[AlgebraElement; 6],
    max_factors: usize,
    restarts: usize,
    seed: u64,
) -> f64 {
    assert!(max_factors <= 8, "pattern enumeration above 8 is hopeless");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inits = (restarts / 16).max(1);
    let mut best = f64::INFINITY;
    for pattern in patterns(controls.len(), max_factors) {
        for trial in 0..inits {
            // one structured initialization per pattern, then random draws;
            // every feasibility branch of a pattern needs its own basin
            let init: Vec<f64> = if trial == 0 {
                vec![0.7; pattern.len()]
            } else {
                (0..pattern.len())
                    .map(|_| rng.random_range(0.0..2.0 * SQRT2))
                    .collect()
            };
            let abort = if best.is_finite() { best + 1.0 } else { f64::INFINITY };
            if let Some(cost) = local_search(controls, &pattern, &init, g, abort) {
                best = best.min(cost);
            }
        }
    }
    best
}

/// [`refine_upper_bound_controls`] over the canonical controls
/// `{+-P, +-Q, +-T/2}`.
pub fn refine_upper_bound(g: &GroupElement, max_factors: usize, restarts: usize, seed: u64) -> f64 {
    refine_upper_bound_controls(g, &canonical_controls(), max_factors, restarts, seed)
}

/// Control set of an arbitrary two-slip system: the slips, their negatives
/// and the midpoints of both edge types of `conv(+-S1, +-S2)`.
pub fn slip_controls(s1: &AlgebraElement, s2: &AlgebraElement) -> [AlgebraElement; 8] {
    let mid_plus = s1.add(s2).scale(0.5);
    let mid_minus = s1.add(&s2.neg()).scale(0.5);
    [
        *s1,
        s1.neg(),
        *s2,
        s2.neg(),
        mid_plus,
        mid_plus.neg(),
        mid_minus,
        mid_minus.neg(),
    ]
}

/// Oracle over an arbitrary two-slip control set (8 controls: bangs plus
/// both singular edge midpoints).
pub fn refine_upper_bound_slips(
    g: &GroupElement,
    controls: &[AlgebraElement; 8],
    max_factors: usize,
    restarts: usize,
    seed: u64,
) -> f64 {
    assert!(max_factors <= 6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inits = (restarts / 16).max(1);
    let mut best = f64::INFINITY;
    for pattern in patterns(controls.len(), max_factors) {
        for trial in 0..inits {
            let init: Vec<f64> = if trial == 0 {
                vec![0.7; pattern.len()]
            } else {
                (0..pattern.len())
                    .map(|_| rng.random_range(0.0..2.0 * SQRT2))
                    .collect()
            };
            let abort = if best.is_finite() { best + 1.0 } else { f64::INFINITY };
            if let Some(cost) = local_search(controls, &pattern, &init, g, abort) {
                best = best.min(cost);
            }
        }
    }
    best
}

/// Outcome of one identity check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_err: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Aggregated report of [`identity_suite`].
#[derive(Debug, Clone)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<26} samples {:>4}  max err {:.3e}  (tol {:.1e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.samples,
                c.max_err,
                c.tol
            )?;
        }
        write!(f, "{} passed, {} failed", self.passed(), self.failed())
    }
}

fn mex(parts: &[(AlgebraElement, f64)]) -> GroupElement {
    let mut g = GroupElement::IDENTITY;
    for (x, dur) in parts {
        g = g.mul(&exp_matrix(&x.scale(*dur)));
    }
    g
}

fn mex_cover(parts: &[(AlgebraElement, f64)]) -> CoverElement {
    let mut acc = CoverElement::ZERO;
    for (x, dur) in parts {
        acc = compose(&acc, &exp_tilde(&x.scale(*dur)));
    }
    acc
}

/// Numerically verifies the product identities behind the comparison
/// arguments: five in SL(2), six in the cover (where central corrections
/// by `pi U` appear), the adjoint exchange identities, the
/// parallel-transport identity and the central bound on products of
/// one-parameter subgroups of shears.
pub fn identity_suite(seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = SQRT2;
    let p = AlgebraElement::P;
    let q = AlgebraElement::Q;
    let t = AlgebraElement::T;
    let tol = 1e-10;
    let mut checks = Vec::new();

    let rel = |d: f64, scale: f64| d / (1.0 + scale);

    // sl2:eq-1  mex(sP, -(2/s)Q) = -mex((2/s)Q, -sP), includes s = sqrt2
    {
        let mut max_err = 0.0f64;
        for i in 0..samples {
            let s = if i == 0 { w } else { rng.random_range(0.2..2.5) };
            let lhs = mex(&[(p, s), (q, -2.0 / s)]);
            let rhs = mex(&[(q, 2.0 / s), (p, -s)]).neg();
            max_err = max_err.max(rel(lhs.dist_max(&rhs), lhs.a.abs().max(lhs.d.abs())));
        }
        checks.push(CheckResult {
            name: "sl2:eq-1 (PQ swap, -id)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // sl2:eq-2  mex(sT, wP, -wQ) = mex(wP, -wQ, -sT)
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let s = rng.random_range(-2.0..2.0);
            let lhs = mex(&[(t, s), (p, w), (q, -w)]);
            let rhs = mex(&[(p, w), (q, -w), (t, -s)]);
            max_err = max_err.max(rel(lhs.dist_max(&rhs), lhs.a.abs().max(lhs.d.abs())));
        }
        checks.push(CheckResult {
            name: "sl2:eq-2 (S-arc shift)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // sl2:eq-4  mex(rP, wQ, -wP) = mex(2/(r+w) Q, -(r+w)P, -rw/(r+w) Q)
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let r = rng.random_range(-w + 0.1..3.0);
            let lhs = mex(&[(p, r), (q, w), (p, -w)]);
            let rhs = mex(&[
                (q, 2.0 / (r + w)),
                (p, -(r + w)),
                (q, -r * w / (r + w)),
            ]);
            max_err = max_err.max(rel(lhs.dist_max(&rhs), lhs.a.abs().max(lhs.d.abs())));
        }
        checks.push(CheckResult {
            name: "sl2:eq-4 (QPQ rewrite)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // sl2:eq-5  mex(wP, wQ, -wP) = mex(w/2 Q, -2wP, -w/2 Q)
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let lhs = mex(&[(p, w), (q, w), (p, -w)]);
            let rhs = mex(&[(q, w / 2.0), (p, -2.0 * w), (q, -w / 2.0)]);
            max_err = max_err.max(rel(lhs.dist_max(&rhs), lhs.a.abs().max(lhs.d.abs())));
        }
        checks.push(CheckResult {
            name: "sl2:eq-5 (3w SSP rewrite)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // slt:eq-1  mex(sP, -(2/s)Q) = mex((2/s)Q, -sP, pi U) in the cover
    {
        let mut max_err = 0.0f64;
        for i in 0..samples {
            let s = if i == 0 { w } else { rng.random_range(0.2..2.5) };
            let lhs = mex_cover(&[(p, s), (q, -2.0 / s)]);
            let rhs = compose(
                &mex_cover(&[(q, 2.0 / s), (p, -s)]),
                &CoverElement::new(0.0, 0.0, PI),
            );
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max());
        }
        checks.push(CheckResult {
            name: "slt:eq-1 (central shift)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // slt:eq-2 in the cover
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let s = rng.random_range(-2.0..2.0);
            let lhs = mex_cover(&[(t, s), (p, w), (q, -w)]);
            let rhs = mex_cover(&[(p, w), (q, -w), (t, -s)]);
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max());
        }
        checks.push(CheckResult {
            name: "slt:eq-2 (S-arc shift)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // slt:eq-3  mex(wP, -wQ, -wP, wQ) = exp~(arsinh(2w) T)
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let lhs = mex_cover(&[(p, w), (q, -w), (p, -w), (q, w)]);
            let rhs = exp_tilde(&t.scale((2.0 * w).asinh()));
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max());
        }
        checks.push(CheckResult {
            name: "slt:eq-3 (turn = translation)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // slt:eq-4 in the cover
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let r = rng.random_range(-w + 0.1..3.0);
            let lhs = mex_cover(&[(p, r), (q, w), (p, -w)]);
            let rhs = mex_cover(&[
                (q, 2.0 / (r + w)),
                (p, -(r + w)),
                (q, -r * w / (r + w)),
            ]);
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max());
        }
        checks.push(CheckResult {
            name: "slt:eq-4 (QPQ rewrite)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // slt:eq-5 in the cover
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let lhs = mex_cover(&[(p, w), (q, w), (p, -w)]);
            let rhs = mex_cover(&[(q, w / 2.0), (p, -2.0 * w), (q, -w / 2.0)]);
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max());
        }
        checks.push(CheckResult {
            name: "slt:eq-5 (3w SSP rewrite)",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // adjoint exchange: e^{r ad Q}(-P) = e^{1/r ad P}(r^2 Q) and its mirror
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let mag = rng.random_range(0.1..3.0);
            let r = if rng.random_range(0..2) == 0 { mag } else { -mag };
            let lhs = mat3_apply(&exp_ad(&q, r), &p.neg());
            let rhs = mat3_apply(&exp_ad(&p, 1.0 / r), &q.scale(r * r));
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max() / (1.0 + r * r));
            let lhs = mat3_apply(&exp_ad(&p, r), &q.neg());
            let rhs = mat3_apply(&exp_ad(&q, 1.0 / r), &p.scale(r * r));
            max_err = max_err.max(lhs.add(&rhs.neg()).norm_max() / (1.0 + r * r));
        }
        checks.push(CheckResult {
            name: "adjoint exchange",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // parallel transport: r = s/(1+s^2) makes
    // mex(rP, -sQ, -sP, rQ) = mex(-rP, sQ, sP, -rQ)
    {
        let mut max_err = 0.0f64;
        for _ in 0..samples {
            let s = rng.random_range(0.05..3.0);
            let r = s / (1.0 + s * s);
            let lhs = mex(&[(p, r), (q, -s), (p, -s), (q, r)]);
            let rhs = mex(&[(p, -r), (q, s), (p, s), (q, -r)]);
            max_err = max_err.max(rel(lhs.dist_max(&rhs), lhs.a.abs().max(lhs.d.abs())));
        }
        checks.push(CheckResult {
            name: "parallel transport",
            samples,
            max_err,
            tol,
            pass: max_err < tol,
        });
    }

    // central bound: n shear-subgroup factors stay below |u| = (2n-1) pi/2
    {
        let mut worst_slack = f64::INFINITY;
        let mut ok = true;
        for _ in 0..samples {
            let n = rng.random_range(1..=6usize);
            let mut acc = CoverElement::ZERO;
            for _ in 0..n {
                let lambda = rng.random_range(-6.0..6.0);
                let theta = rng.random_range(0.0..1.0);
                let xi = p.scale(lambda * theta).add(&q.scale(lambda * (1.0 - theta)));
                acc = compose(&acc, &exp_tilde(&xi));
            }
            let bound = (2.0 * n as f64 - 1.0) * PI / 2.0;
            worst_slack = worst_slack.min(bound - acc.u.abs());
            ok &= acc.u.abs() < bound;
        }
        checks.push(CheckResult {
            name: "central bound |u|",
            samples,
            max_err: -worst_slack,
            tol: 0.0,
            pass: ok,
        });
    }

    Report { checks }
}

fn exp_ad(x: &AlgebraElement, tau: f64) -> [[f64; 3]; 3] {
    // closed form via the adjoint of the group exponential; for the
    // nilpotent P, Q this equals the quadratic polynomial form
    crate::algebra::adjoint(&exp_matrix(&x.scale(tau))).expect("exponentials are unimodular")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::cover_map;
    use crate::fammaps::{Family, MapDescriptor, MapName};
    use crate::solver::distance_sl2;

    #[test]
    fn identity_suite_passes() {
        let report = identity_suite(7, 64);
        assert!(report.all_pass(), "{report}");
        assert!(report.checks.len() >= 12);
    }

    #[test]
    fn refine_identity_and_simple_elements() {
        assert_eq!(refine_upper_bound(&GroupElement::IDENTITY, 3, 16, 1), 0.0);

        // rotation by pi/3: sin(a) + 2 tan(a/2) = 7 sqrt3 / 6 approx 2.0207
        let alpha = PI / 3.0;
        let g = exp_matrix(&AlgebraElement::U.scale(alpha));
        let expect = alpha.sin() + 2.0 * (alpha / 2.0).tan();
        assert!((expect - 7.0 * 3.0f64.sqrt() / 6.0).abs() < 1e-12);
        let found = refine_upper_bound(&g, 4, 48, 2);
        assert!((found - expect).abs() < 1e-5, "{found} vs {expect}");
    }

    #[test]
    fn refine_respects_forward_cost_bound() {
        let desc = MapDescriptor::get(MapName::A4);
        let (r, s, t) = (0.3, 1.2, 0.4);
        let g = desc.evaluate(r, s, t);
        let ub = refine_upper_bound(&g, 5, 32, 3);
        assert!(ub <= r + 2.0 * s + t + 1e-6);
        // and the oracle never undercuts the exact solver
        let exact = distance_sl2(&g, Family::F1).unwrap().cost;
        assert!(ub >= exact - 1e-5);
    }

    #[test]
    fn refine_soundness_on_random_elements() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..300 {
            let g = cover_map(&CoverElement::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ));
            let exact = distance_sl2(&g, Family::F2).unwrap().cost;
            let ub = refine_upper_bound(&g, 5, 16, 100 + i);
            assert!(ub >= exact - 1e-5, "oracle beat the solver: {ub} < {exact}");
        }
    }

    #[test]
    fn refine_completeness_at_small_radius() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut tested = 0;
        while tested < 8 {
            let g = cover_map(&CoverElement::new(
                rng.random_range(-0.7..0.7),
                rng.random_range(-0.7..0.7),
                rng.random_range(-0.7..0.7),
            ));
            let exact = distance_sl2(&g, Family::F2).unwrap().cost;
            if exact > 2.0 {
                continue;
            }
            tested += 1;
            let ub = refine_upper_bound(&g, 6, 64, 200 + tested);
            assert!(
                (ub - exact).abs() < 1e-4,
                "oracle missed the optimum: {ub} vs {exact}"
            );
        }
    }

    #[test]
    fn patterns_exclude_repeats_and_inverses() {
        let pats = patterns(6, 3);
        assert_eq!(pats.len(), 6 + 6 * 4 + 6 * 4 * 4);
        for p in &pats {
            for w in p.windows(2) {
                assert_ne!(w[0], w[1]);
                assert_ne!(w[0], inverse_index(w[1]));
            }
        }
    }
}
