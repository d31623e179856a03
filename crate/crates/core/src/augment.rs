//! Augmentation along test-set directions, plus enumeration oracles.
//!
//! From a feasible `z`, repeatedly pick a signed direction `t` with
//! `f(z - t) < f(z)`, slide as far as the objective keeps decreasing, and
//! stop when no direction improves. With `T = H(A, C)` the terminal point is
//! a global optimum whenever every objective row `c_i` is a row of `C`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{format_rational, IntMatrix, IntVector};
use crate::objective::{eval_fn, eval_objective, increment, SeparableObjective, ZConvexFn};
use crate::testset::{compute_hcip, compute_hcip_bounded, filter_directions, TestSet};

/// `min { f(z) : Az = b, 0 <= z (<= upper) }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipInstance {
    a: IntMatrix,
    b: IntVector,
    upper: Option<IntVector>,
    objective: SeparableObjective,
}

impl CipInstance {
    pub fn new(a: IntMatrix, b: IntVector, upper: Option<IntVector>, objective: SeparableObjective) -> Result<Self> {
        Error::check_dim(a.rows(), b.dim())?;
        Error::check_dim(a.cols(), objective.dimension())?;
        if let Some(u) = &upper {
            Error::check_dim(a.cols(), u.dim())?;
            if !u.is_nonnegative() {
                return Err(Error::InvalidInput("upper bounds must be nonnegative".into()));
            }
        }
        Ok(CipInstance { a, b, upper, objective })
    }

    pub fn dimension(&self) -> usize {
        self.a.cols()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &IntVector {
        &self.b
    }

    pub fn upper(&self) -> Option<&IntVector> {
        self.upper.as_ref()
    }

    pub fn objective(&self) -> &SeparableObjective {
        &self.objective
    }

    pub fn is_feasible(&self, z: &IntVector) -> bool {
        z.dim() == self.dimension()
            && z.is_nonnegative()
            && self.upper.as_ref().is_none_or(|u| z.le_componentwise(u))
            && self.a.mul_vec(z).is_ok_and(|az| az == self.b)
    }

    pub fn value(&self, z: &IntVector) -> Result<BigRational> {
        eval_objective(&self.objective, z)
    }

    fn require_feasible(&self, z: &IntVector) -> Result<()> {
        Error::check_dim(self.dimension(), z.dim())?;
        if self.is_feasible(z) {
            Ok(())
        } else {
            Err(Error::Infeasible(format!("{z} is not feasible")))
        }
    }

    /// The rows `c_i` of terms that depend on `z`.
    fn active_rows(&self) -> impl Iterator<Item = &IntVector> {
        self.objective
            .terms()
            .iter()
            .filter(|t| t.f != ZConvexFn::Zero && !t.coeffs.is_zero())
            .map(|t| &t.coeffs)
    }

    /// Checks that `t` is a test set for this instance as far as its
    /// provenance allows.
    ///
    /// A set computed from `(A', C)` covers the instance when `A' = A` and
    /// every active objective row is `±` a row of `C`: extra rows in `C` only
    /// enlarge the set. A truncated set additionally needs the instance's
    /// bounds inside its box, since every improving step it must supply is
    /// conformal to a difference of two feasible points.
    pub fn check_test_set(&self, t: &TestSet) -> Result<()> {
        Error::check_dim(self.dimension(), t.dimension())?;
        if let Some((a, c)) = t.provenance() {
            if a != &self.a {
                return Err(Error::TestSetMismatch("test set was computed for a different constraint matrix".into()));
            }
            let rows = c.row_vectors();
            for ci in self.active_rows() {
                let neg = -ci;
                if !rows.iter().any(|r| r == ci || r == &neg) {
                    return Err(Error::TestSetMismatch(format!("objective row {ci} is not a row of the test set's C")));
                }
            }
        }
        if let Some(w) = t.truncation() {
            match &self.upper {
                Some(u) if u.le_componentwise(w) => {}
                _ => {
                    return Err(Error::TestSetMismatch(
                        "truncated test set needs upper bounds inside its box".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// The test set `H(A, C)` for the instance with `C` its objective rows;
/// truncated to the upper bounds when there are any.
pub fn instance_test_set(inst: &CipInstance) -> Result<TestSet> {
    let c = inst.objective.coupling_matrix();
    match &inst.upper {
        Some(u) => compute_hcip_bounded(&inst.a, &c, u),
        None => compute_hcip(&inst.a, &c),
    }
}

/// Outcome of solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NoFeasibleStart,
    /// The iteration cap was hit, or a direction decreased without bound.
    UnboundedSuspected,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::NoFeasibleStart => "no-feasible-start",
            SolveStatus::UnboundedSuspected => "unbounded-suspected",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveStep {
    pub direction: IntVector,
    pub lambda: BigInt,
    pub value_after: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    /// Terminal point; `None` only for [`SolveStatus::NoFeasibleStart`].
    pub optimum: Option<IntVector>,
    pub value: Option<BigRational>,
    pub steps: Vec<SolveStep>,
    pub status: SolveStatus,
}

impl SolveReport {
    fn no_start() -> SolveReport {
        SolveReport {
            optimum: None,
            value: None,
            steps: Vec::new(),
            status: SolveStatus::NoFeasibleStart,
        }
    }

    /// One `step <k>: t=<vector> lambda=<λ> value=<rational>` line per step.
    pub fn trace_text(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                format!(
                    "step {}: t={} lambda={} value={}\n",
                    k + 1,
                    s.direction,
                    s.lambda,
                    format_rational(&s.value_after)
                )
            })
            .collect()
    }

    /// The trace as JSON lines. Integers that fit in 64 bits are numbers,
    /// larger ones and all rationals are strings.
    pub fn trace_json(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let t: Vec<_> = s.direction.entries().iter().map(json_int).collect();
                let line = json!({
                    "step": k + 1,
                    "t": t,
                    "lambda": json_int(&s.lambda),
                    "value": format_rational(&s.value_after),
                });
                format!("{line}\n")
            })
            .collect()
    }
}

fn json_int(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Maximum number of augmentation steps.
    pub cap: u64,
    /// Scan every direction and take the largest decrease instead of the first.
    pub best_improving: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cap: 1_000_000,
            best_improving: false,
        }
    }
}

/// Steps beyond this along an unbounded ray are reported as unbounded.
fn ray_limit() -> BigInt {
    BigInt::one() << 64
}

enum Line {
    NoImprovement,
    Step(BigInt, BigRational),
    Unbounded,
}

/// Largest feasible `λ` for `z - λt` under the bounds; `None` if unlimited.
fn max_step(inst: &CipInstance, z: &IntVector, t: &IntVector) -> Option<BigInt> {
    let mut best: Option<BigInt> = None;
    let mut tighten = |cap: BigInt| {
        if best.as_ref().is_none_or(|b| cap < *b) {
            best = Some(cap);
        }
    };
    for j in 0..z.dim() {
        let tj = t.get(j);
        if tj.is_positive() {
            tighten(z.get(j) / tj);
        } else if tj.is_negative() {
            if let Some(u) = &inst.upper {
                tighten((u.get(j) - z.get(j)) / -tj);
            }
        }
    }
    best
}

fn search_line(inst: &CipInstance, z: &IntVector, t: &IntVector, fz: &BigRational) -> Result<Line> {
    if !inst.a.annihilates(t) {
        return Ok(Line::NoImprovement);
    }
    let lam_max = max_step(inst, z, t);
    if lam_max.as_ref().is_some_and(|m| m < &BigInt::one()) {
        return Ok(Line::NoImprovement);
    }
    let phi = |lam: &BigInt| inst.value(&(z - &t.scale(lam)));
    let f1 = phi(&BigInt::one())?;
    if &f1 >= fz {
        return Ok(Line::NoImprovement);
    }
    // delta(λ) = φ(λ) - φ(λ-1) is nondecreasing; find the last λ with delta < 0.
    let decreasing = |lam: &BigInt| -> Result<bool> { Ok(phi(lam)? < phi(&(lam - 1))?) };
    let mut lo = BigInt::one();
    let hi = loop {
        let mut cand = &lo * 2;
        if let Some(m) = &lam_max {
            if &cand > m {
                cand = m.clone();
                if cand == lo {
                    let v = phi(&lo)?;
                    return Ok(Line::Step(lo, v));
                }
            }
        } else if cand > ray_limit() {
            return Ok(Line::Unbounded);
        }
        if decreasing(&cand)? {
            if lam_max.as_ref() == Some(&cand) {
                let v = phi(&cand)?;
                return Ok(Line::Step(cand, v));
            }
            lo = cand;
        } else {
            break cand;
        }
    };
    let mut hi = hi;
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if decreasing(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = phi(&lo)?;
    Ok(Line::Step(lo, v))
}

/// The `λ >= 1` minimizing `f(z - λt)` over feasible steps, provided the
/// unit step is feasible and improving. Along an unbounded decreasing ray
/// the result is capped at `2^64`.
pub fn line_search(inst: &CipInstance, z: &IntVector, t: &IntVector) -> Result<Option<BigInt>> {
    Error::check_dim(inst.dimension(), t.dim())?;
    let fz = inst.value(z)?;
    Ok(match search_line(inst, z, t, &fz)? {
        Line::NoImprovement => None,
        Line::Step(lam, _) => Some(lam),
        Line::Unbounded => Some(ray_limit()),
    })
}

enum Found {
    None,
    Step(IntVector, BigInt, BigRational),
    Unbounded(IntVector),
}

fn scan(inst: &CipInstance, t: &TestSet, z: &IntVector, fz: &BigRational, best: bool) -> Result<Found> {
    let mut chosen = Found::None;
    for d in filter_directions(t, z, inst.upper.as_ref())? {
        match search_line(inst, z, &d, fz)? {
            Line::NoImprovement => {}
            Line::Unbounded => return Ok(Found::Unbounded(d)),
            Line::Step(lam, v) => {
                if !best {
                    return Ok(Found::Step(d, lam, v));
                }
                let better = match &chosen {
                    Found::Step(_, _, cur) => &v < cur,
                    _ => true,
                };
                if better {
                    chosen = Found::Step(d, lam, v);
                }
            }
        }
    }
    Ok(chosen)
}

/// An improving signed direction and its greedy step length, or `None` if
/// no direction of `T ∪ -T` improves `z`.
///
/// Directions are scanned in sorted order, `+t` before `-t`; the first
/// improving one is returned unless `best_improving` is set.
pub fn find_improving(
    inst: &CipInstance,
    t: &TestSet,
    z: &IntVector,
    best_improving: bool,
) -> Result<Option<(IntVector, BigInt)>> {
    inst.require_feasible(z)?;
    inst.check_test_set(t)?;
    let fz = inst.value(z)?;
    Ok(match scan(inst, t, z, &fz, best_improving)? {
        Found::None => None,
        Found::Step(d, lam, _) => Some((d, lam)),
        Found::Unbounded(d) => Some((d, ray_limit())),
    })
}

/// Augments from `z0` until no direction of `t` improves.
pub fn solve(inst: &CipInstance, t: &TestSet, z0: &IntVector, opts: &SolveOptions) -> Result<SolveReport> {
    inst.require_feasible(z0)?;
    inst.check_test_set(t)?;
    let mut z = z0.clone();
    let mut value = inst.value(&z)?;
    let mut steps = Vec::new();
    let status = loop {
        if steps.len() as u64 >= opts.cap {
            break SolveStatus::UnboundedSuspected;
        }
        match scan(inst, t, &z, &value, opts.best_improving)? {
            Found::None => break SolveStatus::Optimal,
            Found::Unbounded(_) => break SolveStatus::UnboundedSuspected,
            Found::Step(d, lam, v) => {
                debug_assert!(v < value);
                z = &z - &d.scale(&lam);
                value = v.clone();
                steps.push(SolveStep {
                    direction: d,
                    lambda: lam,
                    value_after: v,
                });
            }
        }
    };
    Ok(SolveReport {
        optimum: Some(z),
        value: Some(value),
        steps,
        status,
    })
}

/// The bounded instance rewritten with slacks: `Az = b, z + s = u, z, s >= 0`.
///
/// The objective ignores the slacks. Its test set `H((A 0; I I), (C 0))` is
/// `{(t, -t) : t ∈ H(A, C)}`, so optimality is certified without native bounds.
/// The lifted instance keeps the bounds `(u, u)`; they are implied by the
/// equations and let the test set be computed inside that box.
pub fn slack_lift(inst: &CipInstance) -> Result<CipInstance> {
    let u = inst
        .upper
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("slack mode needs upper bounds".into()))?;
    let n = inst.dimension();
    let top = inst.a.hstack(&IntMatrix::zeros(inst.a.rows(), n))?;
    let bottom = IntMatrix::identity(n).hstack(&IntMatrix::identity(n))?;
    let a = if inst.a.rows() == 0 { bottom } else { top.vstack(&bottom)? };
    CipInstance::new(a, inst.b.concat(u), Some(u.concat(u)), inst.objective.pad(n))
}

/// `(z, u - z)` for a point of the bounded instance.
pub fn lift_point(inst: &CipInstance, z: &IntVector) -> Result<IntVector> {
    let u = inst
        .upper
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("slack mode needs upper bounds".into()))?;
    Error::check_dim(u.dim(), z.dim())?;
    Ok(z.concat(&(u - z)))
}

/// Solves a bounded instance in slack mode: lifts it, computes the lifted
/// test set when `t` is `None`, augments, and projects the report back.
pub fn solve_slack(inst: &CipInstance, t: Option<&TestSet>, z0: &IntVector, opts: &SolveOptions) -> Result<SolveReport> {
    inst.require_feasible(z0)?;
    let lifted = slack_lift(inst)?;
    let owned;
    let t = match t {
        Some(t) => t,
        None => {
            owned = instance_test_set(&lifted)?;
            &owned
        }
    };
    let report = solve(&lifted, t, &lift_point(inst, z0)?, opts)?;
    let n = inst.dimension();
    Ok(SolveReport {
        optimum: report.optimum.map(|z| z.head(n)),
        value: report.value,
        steps: report
            .steps
            .into_iter()
            .map(|s| SolveStep {
                direction: s.direction.head(n),
                ..s
            })
            .collect(),
        status: report.status,
    })
}

/// Points of `[0, upper]` in lexicographic order, `upper` in `i64`.
fn for_each_in_box(upper: &[i64], mut visit: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let mut z = vec![0i64; upper.len()];
    loop {
        visit(&z)?;
        let mut j = z.len();
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            if z[j] < upper[j] {
                z[j] += 1;
                break;
            }
            z[j] = 0;
        }
    }
}

/// `box` tightened by the instance bounds, as `i64`.
fn enumeration_box(inst: &CipInstance, bx: &IntVector) -> Result<Vec<i64>> {
    Error::check_dim(inst.dimension(), bx.dim())?;
    (0..bx.dim())
        .map(|j| {
            let mut b = bx.get(j).clone();
            if let Some(u) = &inst.upper {
                b = b.min(u.get(j).clone());
            }
            if b.is_negative() {
                return Err(Error::InvalidInput("box bounds must be nonnegative".into()));
            }
            b.to_i64().ok_or_else(|| Error::TooLarge("box bound exceeds 64 bits".into()))
        })
        .collect()
}

/// The lexicographically first feasible point in `[0, box]`, if any.
pub fn find_feasible_start(inst: &CipInstance, bx: &IntVector) -> Result<Option<IntVector>> {
    let bounds = enumeration_box(inst, bx)?;
    let mut found = None;
    let _ = for_each_in_box(&bounds, |z| {
        let z = IntVector::from_i64s(z);
        if inst.is_feasible(&z) {
            found = Some(z);
            return Err(Error::InvalidInput(String::new()));
        }
        Ok(())
    });
    Ok(found)
}

/// Solves from the first feasible point of `[0, box]`, reporting
/// [`SolveStatus::NoFeasibleStart`] when there is none.
pub fn solve_from_box(inst: &CipInstance, t: &TestSet, bx: &IntVector, opts: &SolveOptions) -> Result<SolveReport> {
    match find_feasible_start(inst, bx)? {
        Some(z0) => solve(inst, t, &z0, opts),
        None => Ok(SolveReport::no_start()),
    }
}

/// A minimizer over the feasible points of `[0, box]` (the lexicographically
/// first among ties) and its value.
pub fn brute_force_optimum(inst: &CipInstance, bx: &IntVector) -> Result<(IntVector, BigRational)> {
    let bounds = enumeration_box(inst, bx)?;
    let mut best: Option<(IntVector, BigRational)> = None;
    for_each_in_box(&bounds, |z| {
        let z = IntVector::from_i64s(z);
        if inst.is_feasible(&z) {
            let v = inst.value(&z)?;
            if best.as_ref().is_none_or(|(_, b)| &v < b) {
                best = Some((z, v));
            }
        }
        Ok(())
    })?;
    best.ok_or(Error::EmptyFeasibleSet)
}

/// Optimal value of the 0-1 program
/// `min Σ_j (g(j) - g(j-1)) x_j + Σ_j (g(-j) - g(-j+1)) y_j`
/// subject to `Σ x - Σ y = p`, `x, y ∈ {0,1}^k`, by enumeration.
pub fn aip_subproblem_oracle(g: &ZConvexFn, p: &BigInt, k: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if p.abs() > BigInt::from(k) {
        return Err(Error::Infeasible(format!("|p| = {} exceeds k = {k}", p.abs())));
    }
    if k > 12 {
        return Err(Error::TooLarge(format!("2^{} assignments", 2 * k)));
    }
    let up: Vec<BigRational> = (1..=k as i64).map(|j| increment(g, &j.into())).collect::<Result<_>>()?;
    let down: Vec<BigRational> = (1..=k as i64).map(|j| increment(g, &(1 - j).into()).map(|d| -d)).collect::<Result<_>>()?;
    let p = p.to_i64().expect("bounded by k");
    let mut best: Option<BigRational> = None;
    for mask in 0u32..(1 << (2 * k)) {
        let xs = mask & ((1 << k) - 1);
        let ys = mask >> k;
        if xs.count_ones() as i64 - ys.count_ones() as i64 != p {
            continue;
        }
        let mut v = BigRational::zero();
        for j in 0..k {
            if xs >> j & 1 == 1 {
                v += &up[j];
            }
            if ys >> j & 1 == 1 {
                v += &down[j];
            }
        }
        if best.as_ref().is_none_or(|b| &v < b) {
            best = Some(v);
        }
    }
    Ok(best.expect("p is attainable"))
}

/// `g(p) - g(0)`, the value the subproblem oracle must reproduce.
pub fn aip_subproblem_value(g: &ZConvexFn, p: &BigInt) -> Result<BigRational> {
    Ok(eval_fn(g, p)? - eval_fn(g, &BigInt::zero())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};
    use crate::objective::Term;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn no_rows(n: usize) -> (IntMatrix, IntVector) {
        (IntMatrix::zeros(0, n), IntVector::zeros(0))
    }

    /// `min x + y` over `Z₊²`.
    fn linear_sum() -> CipInstance {
        let (a, rhs) = no_rows(2);
        CipInstance::new(a, rhs, None, SeparableObjective::linear(vec![rat_int(1), rat_int(1)])).unwrap()
    }

    /// `min (x+y)² + 4(x−y)²` over `Z₊²`.
    fn two_squares() -> CipInstance {
        let (a, rhs) = no_rows(2);
        let f = SeparableObjective::new(
            2,
            vec![
                Term::new(ZConvexFn::square(rat_int(1)).unwrap(), v(&[1, 1]), b(0)),
                Term::new(ZConvexFn::square(rat_int(4)).unwrap(), v(&[1, -1]), b(0)),
            ],
            vec![rat_int(0), rat_int(0)],
        )
        .unwrap();
        CipInstance::new(a, rhs, None, f).unwrap()
    }

    fn two_squares_set() -> TestSet {
        let c = IntMatrix::from_i64_rows(2, &[vec![1, 1], vec![1, -1]]).unwrap();
        compute_hcip(&IntMatrix::zeros(0, 2), &c).unwrap()
    }

    #[test]
    fn line_search_examples() {
        assert_eq!(line_search(&linear_sum(), &v(&[3, 2]), &v(&[1, 0])).unwrap(), Some(b(3)));
        assert_eq!(line_search(&two_squares(), &v(&[2, 2]), &v(&[1, 1])).unwrap(), Some(b(2)));
        assert_eq!(line_search(&linear_sum(), &v(&[0, 0]), &v(&[1, 0])).unwrap(), None);
        assert_eq!(line_search(&linear_sum(), &v(&[3, 2]), &v(&[-1, 0])).unwrap(), None);
    }

    #[test]
    fn line_search_stops_at_interior_minimum() {
        // (x - 3)² from x = 10 along t = 1: minimum at λ = 7
        let (a, rhs) = no_rows(1);
        let f = SeparableObjective::new(
            1,
            vec![Term::new(ZConvexFn::square(rat_int(1)).unwrap(), v(&[1]), b(-3))],
            vec![rat_int(0)],
        )
        .unwrap();
        let inst = CipInstance::new(a, rhs, None, f).unwrap();
        assert_eq!(line_search(&inst, &v(&[10]), &v(&[1])).unwrap(), Some(b(7)));
        assert_eq!(line_search(&inst, &v(&[0]), &v(&[-1])).unwrap(), Some(b(3)));
    }

    #[test]
    fn line_search_respects_upper_bounds() {
        let (a, rhs) = no_rows(1);
        let inst = CipInstance::new(a, rhs, Some(v(&[5])), SeparableObjective::linear(vec![rat_int(-1)])).unwrap();
        assert_eq!(line_search(&inst, &v(&[1]), &v(&[-1])).unwrap(), Some(b(4)));
        assert_eq!(line_search(&inst, &v(&[5]), &v(&[-1])).unwrap(), None);
    }

    #[test]
    fn unbounded_ray_is_reported() {
        let (a, rhs) = no_rows(1);
        let inst = CipInstance::new(a, rhs, None, SeparableObjective::linear(vec![rat_int(-1)])).unwrap();
        let t = TestSet::from_directions(1, vec![v(&[1])]).unwrap();
        let r = solve(&inst, &t, &v(&[0]), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::UnboundedSuspected);
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let t = TestSet::from_directions(2, vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        let opts = SolveOptions {
            cap: 1,
            best_improving: false,
        };
        let r = solve(&linear_sum(), &t, &v(&[3, 2]), &opts).unwrap();
        assert_eq!(r.status, SolveStatus::UnboundedSuspected);
        assert_eq!(r.steps.len(), 1);
    }

    #[test]
    fn find_improving_examples() {
        let inst = two_squares();
        let h = two_squares_set();
        assert_eq!(find_improving(&inst, &h, &v(&[1, 1]), false).unwrap(), Some((v(&[1, 1]), b(1))));
        let units = TestSet::from_directions(2, vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(find_improving(&inst, &units, &v(&[1, 1]), false).unwrap(), None);
        let ones = TestSet::from_directions(2, vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(find_improving(&linear_sum(), &ones, &v(&[0, 0]), false).unwrap(), None);
    }

    #[test]
    fn infeasible_start_is_an_error() {
        let a = IntMatrix::from_i64_rows(2, &[vec![1, 1]]).unwrap();
        let inst = CipInstance::new(a, v(&[2]), None, SeparableObjective::linear(vec![rat_int(1), rat_int(2)])).unwrap();
        let t = TestSet::from_directions(2, vec![v(&[1, -1])]).unwrap();
        assert!(matches!(solve(&inst, &t, &v(&[1, 0]), &SolveOptions::default()), Err(Error::Infeasible(_))));
        assert!(matches!(find_improving(&inst, &t, &v(&[3, 0]), false), Err(Error::Infeasible(_))));
        let r = solve(&inst, &t, &v(&[1, 1]), &SolveOptions::default()).unwrap();
        assert_eq!(r.optimum, Some(v(&[2, 0])));
    }

    #[test]
    fn two_squares_reaches_origin() {
        let r = solve(&two_squares(), &two_squares_set(), &v(&[5, 3]), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.optimum, Some(v(&[0, 0])));
        assert_eq!(r.value, Some(rat_int(0)));
        let mut prev = two_squares().value(&v(&[5, 3])).unwrap();
        for s in &r.steps {
            assert!(s.value_after < prev);
            prev = s.value_after.clone();
        }
    }

    #[test]
    fn best_improving_agrees_on_value() {
        let opts = SolveOptions {
            best_improving: true,
            ..SolveOptions::default()
        };
        let r = solve(&two_squares(), &two_squares_set(), &v(&[5, 3]), &opts).unwrap();
        assert_eq!(r.value, Some(rat_int(0)));
    }

    #[test]
    fn zero_objective_with_linear_part() {
        let (a, rhs) = no_rows(2);
        let f = SeparableObjective::new(
            2,
            vec![Term::new(ZConvexFn::Zero, v(&[1, 1]), b(0))],
            vec![rat_int(1), rat_int(1)],
        )
        .unwrap();
        let inst = CipInstance::new(a, rhs, None, f).unwrap();
        let g = compute_hcip(&IntMatrix::zeros(0, 2), &IntMatrix::zeros(0, 2)).unwrap();
        let r = solve(&inst, &g, &v(&[3, 2]), &SolveOptions::default()).unwrap();
        assert_eq!(r.optimum, Some(v(&[0, 0])));
    }

    #[test]
    fn test_set_provenance_is_checked() {
        let inst = two_squares();
        let wrong_c = compute_hcip(&IntMatrix::zeros(0, 2), &IntMatrix::from_i64_rows(2, &[vec![1, 1]]).unwrap()).unwrap();
        assert!(matches!(
            find_improving(&inst, &wrong_c, &v(&[1, 1]), false),
            Err(Error::TestSetMismatch(_))
        ));
        let wrong_a = compute_hcip(
            &IntMatrix::from_i64_rows(2, &[vec![1, 0]]).unwrap(),
            &IntMatrix::from_i64_rows(2, &[vec![1, 1], vec![1, -1]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(solve(&inst, &wrong_a, &v(&[0, 0]), &SolveOptions::default()), Err(Error::TestSetMismatch(_))));
        // negated rows and extra rows are fine
        let wider = compute_hcip(
            &IntMatrix::zeros(0, 2),
            &IntMatrix::from_i64_rows(2, &[vec![-1, 1], vec![1, 1], vec![1, 0]]).unwrap(),
        )
        .unwrap();
        assert!(inst.check_test_set(&wider).is_ok());
    }

    #[test]
    fn truncated_set_needs_bounds() {
        let inst = two_squares();
        let t = two_squares_set().truncate(&v(&[1, 1])).unwrap();
        assert!(matches!(inst.check_test_set(&t), Err(Error::TestSetMismatch(_))));
        let (a, rhs) = no_rows(2);
        let bounded = CipInstance::new(a, rhs, Some(v(&[1, 1])), inst.objective().clone()).unwrap();
        assert!(bounded.check_test_set(&t).is_ok());
    }

    #[test]
    fn slack_mode_matches_brute_force() {
        // x1 + x2 + x3 = 2, 0 <= x <= (1, 2, 2), f = (x1 - x3 + 1)² + 2(x2 - 1)² - x3
        let a = IntMatrix::from_i64_rows(3, &[vec![1, 1, 1]]).unwrap();
        let f = SeparableObjective::new(
            3,
            vec![
                Term::new(ZConvexFn::square(rat_int(1)).unwrap(), v(&[1, 0, -1]), b(1)),
                Term::new(ZConvexFn::square(rat_int(2)).unwrap(), v(&[0, 1, 0]), b(-1)),
            ],
            vec![rat_int(0), rat_int(0), rat_int(-1)],
        )
        .unwrap();
        let inst = CipInstance::new(a, v(&[2]), Some(v(&[1, 2, 2])), f).unwrap();
        let (_, best) = brute_force_optimum(&inst, &v(&[2, 2, 2])).unwrap();
        for start in [v(&[1, 1, 0]), v(&[0, 2, 0]), v(&[0, 0, 2])] {
            let r = solve_slack(&inst, None, &start, &SolveOptions::default()).unwrap();
            assert_eq!(r.value.as_ref(), Some(&best));
            assert!(inst.is_feasible(r.optimum.as_ref().unwrap()));
            let native = solve(&inst, &instance_test_set(&inst).unwrap(), &start, &SolveOptions::default()).unwrap();
            assert_eq!(native.value.as_ref(), Some(&best));
        }
    }

    #[test]
    fn slack_lift_shape() {
        let a = IntMatrix::from_i64_rows(2, &[vec![1, 1]]).unwrap();
        let inst =
            CipInstance::new(a, v(&[1]), Some(v(&[1, 1])), SeparableObjective::linear(vec![rat_int(1), rat_int(0)]))
                .unwrap();
        let lifted = slack_lift(&inst).unwrap();
        assert_eq!(
            lifted.matrix(),
            &IntMatrix::from_i64_rows(4, &[vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap()
        );
        assert_eq!(lifted.rhs(), &v(&[1, 1, 1]));
        assert_eq!(lift_point(&inst, &v(&[1, 0])).unwrap(), v(&[1, 0, 0, 1]));
        assert!(slack_lift(&two_squares()).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let (z, val) = brute_force_optimum(&two_squares(), &v(&[5, 5])).unwrap();
        assert_eq!((z, val), (v(&[0, 0]), rat_int(0)));
        let (z, val) = brute_force_optimum(&linear_sum(), &v(&[4, 4])).unwrap();
        assert_eq!((z, val), (v(&[0, 0]), rat_int(0)));
        let a = IntMatrix::from_i64_rows(2, &[vec![1, 1]]).unwrap();
        let inst = CipInstance::new(a, v(&[-1]), None, SeparableObjective::linear(vec![rat_int(0), rat_int(0)])).unwrap();
        assert!(matches!(brute_force_optimum(&inst, &v(&[3, 3])), Err(Error::EmptyFeasibleSet)));
        let t = TestSet::from_directions(2, vec![]).unwrap();
        let r = solve_from_box(&inst, &t, &v(&[3, 3]), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::NoFeasibleStart);
    }

    #[test]
    fn feasible_start_is_lexicographically_first() {
        let a = IntMatrix::from_i64_rows(3, &[vec![1, 1, 1]]).unwrap();
        let inst = CipInstance::new(a, v(&[2]), None, SeparableObjective::linear(vec![rat_int(0); 3])).unwrap();
        assert_eq!(find_feasible_start(&inst, &v(&[2, 2, 2])).unwrap(), Some(v(&[0, 0, 2])));
    }

    #[test]
    fn subproblem_examples() {
        let sq = ZConvexFn::square(rat_int(1)).unwrap();
        assert_eq!(aip_subproblem_oracle(&sq, &b(2), 2).unwrap(), rat_int(4));
        assert_eq!(aip_subproblem_oracle(&sq, &b(0), 1).unwrap(), rat_int(0));
        let abs = ZConvexFn::scaled_abs(rat_int(1)).unwrap();
        assert_eq!(aip_subproblem_oracle(&abs, &b(-2), 3).unwrap(), rat_int(2));
        assert!(matches!(aip_subproblem_oracle(&sq, &b(3), 2), Err(Error::Infeasible(_))));
        let geo = ZConvexFn::geometric_abs(rat(3, 2)).unwrap();
        for p in -3..=3 {
            assert_eq!(
                aip_subproblem_oracle(&geo, &b(p), 4).unwrap(),
                aip_subproblem_value(&geo, &b(p)).unwrap()
            );
        }
    }

    #[test]
    fn trace_formats() {
        let opts = SolveOptions {
            best_improving: true,
            ..SolveOptions::default()
        };
        let r = solve(&two_squares(), &two_squares_set(), &v(&[2, 2]), &opts).unwrap();
        assert_eq!(r.trace_text(), "step 1: t=(1,1) lambda=2 value=0\n");
        assert_eq!(r.trace_json(), "{\"lambda\":2,\"step\":1,\"t\":[1,1],\"value\":\"0\"}\n");
    }
}
