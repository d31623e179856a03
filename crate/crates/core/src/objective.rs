//! Separable Z-convex objectives `f(z) = Σ f_i(c_iᵀz + c_i0) + cᵀz`.
//!
//! Every catalog function is normalized to `g(0) = 0`; only increments
//! `g(j) - g(j-1)` matter for augmentation.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_int, parse_rational, IntMatrix, IntVector};

/// Behaviour of a [`PiecewiseTable`] outside its declared window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableGrowth {
    /// Queries needing an undeclared increment fail.
    Error,
    /// Boundary increments repeat indefinitely (linear extension).
    Linear,
}

/// Increments `g(j) - g(j-1)` declared for `j` in a contiguous window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseTable {
    first: BigInt,
    increments: Vec<BigRational>,
    growth: TableGrowth,
}

impl PiecewiseTable {
    /// `increments[i]` is `g(first + i) - g(first + i - 1)`.
    pub fn new(first: BigInt, increments: Vec<BigRational>, growth: TableGrowth) -> Result<Self> {
        if increments.is_empty() {
            return Err(Error::InvalidInput("piecewise table needs at least one increment".into()));
        }
        Ok(PiecewiseTable {
            first,
            increments,
            growth,
        })
    }

    /// Builds a table from `(j, increment)` pairs with contiguous keys.
    pub fn from_pairs(pairs: &[(i64, BigRational)], growth: TableGrowth) -> Result<Self> {
        let mut sorted = pairs.to_vec();
        sorted.sort_by_key(|(j, _)| *j);
        let first = sorted
            .first()
            .map(|(j, _)| *j)
            .ok_or_else(|| Error::InvalidInput("piecewise table needs at least one increment".into()))?;
        for (i, (j, _)) in sorted.iter().enumerate() {
            if *j != first + i as i64 {
                return Err(Error::InvalidInput("piecewise table keys must be contiguous".into()));
            }
        }
        Self::new(first.into(), sorted.into_iter().map(|(_, d)| d).collect(), growth)
    }

    fn last(&self) -> BigInt {
        &self.first + BigInt::from(self.increments.len() - 1)
    }

    fn increment(&self, j: &BigInt) -> Result<BigRational> {
        if j < &self.first || j > &self.last() {
            return match self.growth {
                TableGrowth::Error => Err(Error::OutsideTable(j.to_string())),
                TableGrowth::Linear if j < &self.first => Ok(self.increments[0].clone()),
                TableGrowth::Linear => Ok(self.increments[self.increments.len() - 1].clone()),
            };
        }
        let idx = (j - &self.first).to_usize().expect("index inside window");
        Ok(self.increments[idx].clone())
    }

    /// Sum of increments for `j` in `lo..=hi`.
    fn sum_increments(&self, lo: &BigInt, hi: &BigInt) -> Result<BigRational> {
        if lo > hi {
            return Ok(BigRational::zero());
        }
        let (first, last) = (self.first.clone(), self.last());
        if self.growth == TableGrowth::Error && (lo < &first || hi > &last) {
            let bad = if lo < &first { lo } else { hi };
            return Err(Error::OutsideTable(bad.to_string()));
        }
        let mut total = BigRational::zero();
        // below the window
        if lo < &first {
            let top = hi.min(&(&first - 1)).clone();
            let count = &top - lo + 1;
            total += &self.increments[0] * BigRational::from_integer(count);
        }
        // above the window
        if hi > &last {
            let bottom = lo.max(&(&last + 1)).clone();
            let count = hi - &bottom + 1;
            total += &self.increments[self.increments.len() - 1] * BigRational::from_integer(count);
        }
        let inner_lo = lo.max(&first).clone();
        let inner_hi = hi.min(&last).clone();
        if inner_lo <= inner_hi {
            let a = (&inner_lo - &first).to_usize().expect("index inside window");
            let b = (&inner_hi - &first).to_usize().expect("index inside window");
            for d in &self.increments[a..=b] {
                total += d;
            }
        }
        Ok(total)
    }

    fn eval(&self, x: &BigInt) -> Result<BigRational> {
        if x.is_positive() {
            self.sum_increments(&BigInt::one(), x)
        } else if x.is_negative() {
            Ok(-self.sum_increments(&(x + 1), &BigInt::zero())?)
        } else {
            Ok(BigRational::zero())
        }
    }
}

/// Catalog of Z-convex functions with minimum at 0, normalized so `g(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZConvexFn {
    Zero,
    /// `α x^e` with `α > 0` and positive even `e`.
    ScaledEvenPower { alpha: BigRational, exponent: u32 },
    /// `α |x|` with `α > 0`.
    ScaledAbs { alpha: BigRational },
    /// `base^|x| - 1` with rational `base > 1`.
    GeometricAbs { base: BigRational },
    PiecewiseTable(PiecewiseTable),
}

impl ZConvexFn {
    pub fn scaled_even_power(alpha: BigRational, exponent: u32) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidInput("power coefficient must be positive".into()));
        }
        if exponent == 0 || !exponent.is_multiple_of(2) {
            return Err(Error::InvalidInput("exponent must be positive and even".into()));
        }
        Ok(ZConvexFn::ScaledEvenPower { alpha, exponent })
    }

    /// `α x²`.
    pub fn square(alpha: BigRational) -> Result<Self> {
        Self::scaled_even_power(alpha, 2)
    }

    pub fn scaled_abs(alpha: BigRational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidInput("absolute-value coefficient must be positive".into()));
        }
        Ok(ZConvexFn::ScaledAbs { alpha })
    }

    pub fn geometric_abs(base: BigRational) -> Result<Self> {
        if base <= BigRational::one() {
            return Err(Error::InvalidInput("geometric base must exceed 1".into()));
        }
        Ok(ZConvexFn::GeometricAbs { base })
    }
}

impl fmt::Display for ZConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZConvexFn::Zero => write!(f, "zero"),
            ZConvexFn::ScaledEvenPower { alpha, exponent } => {
                write!(f, "pow {} {}", format_rational(alpha), exponent)
            }
            ZConvexFn::ScaledAbs { alpha } => write!(f, "abs {}", format_rational(alpha)),
            ZConvexFn::GeometricAbs { base } => write!(f, "geom {}", format_rational(base)),
            ZConvexFn::PiecewiseTable(t) => {
                let growth = match t.growth {
                    TableGrowth::Error => "error",
                    TableGrowth::Linear => "linear",
                };
                write!(f, "table {} {}", t.first, growth)?;
                for d in &t.increments {
                    write!(f, " {}", format_rational(d))?;
                }
                Ok(())
            }
        }
    }
}

/// `g(x)` under the `g(0) = 0` normalization.
pub fn eval_fn(g: &ZConvexFn, x: &BigInt) -> Result<BigRational> {
    Ok(match g {
        ZConvexFn::Zero => BigRational::zero(),
        ZConvexFn::ScaledEvenPower { alpha, exponent } => {
            alpha * BigRational::from_integer(num_traits::pow(x.clone(), *exponent as usize))
        }
        ZConvexFn::ScaledAbs { alpha } => alpha * BigRational::from_integer(x.abs()),
        ZConvexFn::GeometricAbs { base } => {
            let e = x
                .abs()
                .to_usize()
                .ok_or_else(|| Error::TooLarge(format!("geometric exponent {x}")))?;
            num_traits::pow(base.clone(), e) - BigRational::one()
        }
        ZConvexFn::PiecewiseTable(t) => t.eval(x)?,
    })
}

/// `g(j) - g(j-1)`.
pub fn increment(g: &ZConvexFn, j: &BigInt) -> Result<BigRational> {
    match g {
        ZConvexFn::PiecewiseTable(t) => t.increment(j),
        _ => Ok(eval_fn(g, j)? - eval_fn(g, &(j - 1))?),
    }
}

/// Whether increments are nondecreasing on `[lo, hi]` and change sign at 0:
/// `g(j) - g(j-1) <= 0` for `j <= 0` and `>= 0` for `j >= 1`.
///
/// Windows with `lo >= hi` hold no increments and are vacuously convex;
/// queries outside a table's window count as failures.
pub fn check_zconvex_window(g: &ZConvexFn, lo: &BigInt, hi: &BigInt) -> bool {
    let mut prev: Option<BigRational> = None;
    let mut j = lo + 1;
    while &j <= hi {
        let Ok(d) = increment(g, &j) else {
            return false;
        };
        let sign_ok = if j.is_positive() { !d.is_negative() } else { !d.is_positive() };
        if !sign_ok || prev.as_ref().is_some_and(|p| &d < p) {
            return false;
        }
        prev = Some(d);
        j += 1;
    }
    true
}

/// One composed term `f_i(c_iᵀz + c_i0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub f: ZConvexFn,
    pub coeffs: IntVector,
    pub offset: BigInt,
}

impl Term {
    pub fn new(f: ZConvexFn, coeffs: IntVector, offset: BigInt) -> Self {
        Term { f, coeffs, offset }
    }

    /// The inner argument `c_iᵀz + c_i0`.
    pub fn argument(&self, z: &IntVector) -> BigInt {
        self.coeffs.dot(z) + &self.offset
    }
}

/// `f(z) = Σ f_i(c_iᵀz + c_i0) + cᵀz` over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparableObjective {
    n: usize,
    terms: Vec<Term>,
    linear: Vec<BigRational>,
}

impl SeparableObjective {
    pub fn new(n: usize, terms: Vec<Term>, linear: Vec<BigRational>) -> Result<Self> {
        Error::check_dim(n, linear.len())?;
        for t in &terms {
            Error::check_dim(n, t.coeffs.dim())?;
        }
        Ok(SeparableObjective { n, terms, linear })
    }

    /// The purely linear objective `cᵀz`.
    pub fn linear(linear: Vec<BigRational>) -> Self {
        SeparableObjective {
            n: linear.len(),
            terms: Vec::new(),
            linear,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn linear_part(&self) -> &[BigRational] {
        &self.linear
    }

    /// The `s × n` matrix whose rows are the term coefficient vectors `c_i`.
    pub fn coupling_matrix(&self) -> IntMatrix {
        let rows: Vec<IntVector> = self.terms.iter().map(|t| t.coeffs.clone()).collect();
        IntMatrix::from_rows(self.n.max(1), &rows).expect("term dimensions checked at construction")
    }

    /// Extends every coefficient vector with `extra` zero coordinates.
    pub fn pad(&self, extra: usize) -> SeparableObjective {
        let zeros = IntVector::zeros(extra);
        SeparableObjective {
            n: self.n + extra,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.f.clone(), t.coeffs.concat(&zeros), t.offset.clone()))
                .collect(),
            linear: self
                .linear
                .iter()
                .cloned()
                .chain(std::iter::repeat_n(BigRational::zero(), extra))
                .collect(),
        }
    }

    /// One term per line (`<kind> <params> | c_i | c_i0`), then `linear | c`.
    pub fn to_text(&self) -> String {
        let join = |xs: Vec<String>| xs.join(" ");
        let mut out = String::new();
        for t in &self.terms {
            let coeffs = join(t.coeffs.entries().iter().map(|x| x.to_string()).collect());
            out.push_str(&format!("{} | {} | {}\n", t.f, coeffs, t.offset));
        }
        let linear = join(self.linear.iter().map(format_rational).collect());
        out.push_str(&format!("linear | {linear}\n"));
        out
    }

    /// Reads the format written by [`SeparableObjective::to_text`]. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<SeparableObjective> {
        let mut terms = Vec::new();
        let mut linear = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if linear.is_some() {
                return Err(Error::parse(line_no, "content after the linear line"));
            }
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            if parts[0] == "linear" {
                if parts.len() != 2 {
                    return Err(Error::parse(line_no, "expected `linear | c entries`"));
                }
                linear = Some(
                    parts[1]
                        .split_whitespace()
                        .map(|t| {
                            parse_rational(t)
                                .ok_or_else(|| Error::parse(line_no, format!("bad rational `{t}`")))
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
                continue;
            }
            if parts.len() != 3 {
                return Err(Error::parse(line_no, "expected `<kind> <params> | c_i | c_i0`"));
            }
            let f = parse_fn(parts[0]).map_err(|m| Error::parse(line_no, m))?;
            let coeffs = parts[1]
                .split_whitespace()
                .map(|t| parse_int(t).ok_or_else(|| Error::parse(line_no, format!("bad integer `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            let offset = parse_int(parts[2])
                .ok_or_else(|| Error::parse(line_no, format!("bad offset `{}`", parts[2])))?;
            terms.push(Term::new(f, IntVector::new(coeffs), offset));
        }
        let linear = linear.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing linear line"))?;
        if linear.is_empty() {
            return Err(Error::parse(1, "objective needs at least one variable"));
        }
        SeparableObjective::new(linear.len(), terms, linear)
    }
}

fn parse_fn(spec: &str) -> std::result::Result<ZConvexFn, String> {
    let toks: Vec<&str> = spec.split_whitespace().collect();
    let rat = |t: &str| parse_rational(t).ok_or_else(|| format!("bad rational `{t}`"));
    let arity = |k: usize| {
        if toks.len() == k + 1 {
            Ok(())
        } else {
            Err(format!("`{}` takes {k} parameter(s)", toks[0]))
        }
    };
    let f = match toks.first().copied() {
        Some("zero") => {
            arity(0)?;
            ZConvexFn::Zero
        }
        Some("pow") => {
            arity(2)?;
            let e = toks[2].parse::<u32>().map_err(|_| format!("bad exponent `{}`", toks[2]))?;
            ZConvexFn::scaled_even_power(rat(toks[1])?, e).map_err(|e| e.to_string())?
        }
        Some("abs") => {
            arity(1)?;
            ZConvexFn::scaled_abs(rat(toks[1])?).map_err(|e| e.to_string())?
        }
        Some("geom") => {
            arity(1)?;
            ZConvexFn::geometric_abs(rat(toks[1])?).map_err(|e| e.to_string())?
        }
        Some("table") => {
            if toks.len() < 4 {
                return Err("`table` takes a first index, a growth rule and increments".into());
            }
            let first = parse_int(toks[1]).ok_or_else(|| format!("bad index `{}`", toks[1]))?;
            let growth = match toks[2] {
                "error" => TableGrowth::Error,
                "linear" => TableGrowth::Linear,
                other => return Err(format!("unknown growth rule `{other}`")),
            };
            let incs = toks[3..].iter().map(|t| rat(t)).collect::<std::result::Result<Vec<_>, _>>()?;
            ZConvexFn::PiecewiseTable(PiecewiseTable::new(first, incs, growth).map_err(|e| e.to_string())?)
        }
        Some(other) => return Err(format!("unknown function kind `{other}`")),
        None => return Err("missing function kind".into()),
    };
    Ok(f)
}

/// Exact `f(z)`.
pub fn eval_objective(f: &SeparableObjective, z: &IntVector) -> Result<BigRational> {
    Error::check_dim(f.n, z.dim())?;
    let mut total = z.dot_rat(&f.linear);
    for t in &f.terms {
        total += eval_fn(&t.f, &t.argument(z))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// `(x+y)² + 4(x−y)²`
    fn two_squares() -> SeparableObjective {
        SeparableObjective::new(
            2,
            vec![
                Term::new(ZConvexFn::square(rat_int(1)).unwrap(), IntVector::from_i64s(&[1, 1]), b(0)),
                Term::new(ZConvexFn::square(rat_int(4)).unwrap(), IntVector::from_i64s(&[1, -1]), b(0)),
            ],
            vec![rat_int(0), rat_int(0)],
        )
        .unwrap()
    }

    #[test]
    fn catalog_values() {
        let p = ZConvexFn::square(rat_int(4)).unwrap();
        assert_eq!(eval_fn(&p, &b(-1)).unwrap(), rat_int(4));
        assert_eq!(eval_fn(&ZConvexFn::Zero, &b(17)).unwrap(), rat_int(0));
        let g = ZConvexFn::geometric_abs(rat_int(3)).unwrap();
        assert_eq!(eval_fn(&g, &b(2)).unwrap(), rat_int(8));
        assert_eq!(eval_fn(&g, &b(-2)).unwrap(), rat_int(8));
    }

    #[test]
    fn catalog_increments() {
        let sq = ZConvexFn::square(rat_int(1)).unwrap();
        assert_eq!(increment(&sq, &b(3)).unwrap(), rat_int(5));
        assert_eq!(increment(&ZConvexFn::Zero, &b(-4)).unwrap(), rat_int(0));
        let g = ZConvexFn::geometric_abs(rat_int(3)).unwrap();
        assert_eq!(increment(&g, &b(-1)).unwrap(), rat_int(-6));
        assert_eq!(increment(&g, &b(0)).unwrap(), rat_int(-2));
        assert_eq!(increment(&g, &b(1)).unwrap(), rat_int(2));
    }

    #[test]
    fn normalized_at_zero() {
        let table = PiecewiseTable::from_pairs(&[(0, rat_int(-1)), (1, rat_int(2))], TableGrowth::Linear).unwrap();
        for g in [
            ZConvexFn::Zero,
            ZConvexFn::square(rat(1, 3)).unwrap(),
            ZConvexFn::scaled_even_power(rat_int(2), 4).unwrap(),
            ZConvexFn::scaled_abs(rat_int(5)).unwrap(),
            ZConvexFn::geometric_abs(rat(3, 2)).unwrap(),
            ZConvexFn::PiecewiseTable(table),
        ] {
            assert_eq!(eval_fn(&g, &b(0)).unwrap(), rat_int(0), "{g}");
        }
    }

    #[test]
    fn convexity_windows() {
        assert!(check_zconvex_window(&ZConvexFn::square(rat_int(1)).unwrap(), &b(-5), &b(5)));
        assert!(check_zconvex_window(&ZConvexFn::scaled_abs(rat_int(2)).unwrap(), &b(-10), &b(10)));
        let bad = PiecewiseTable::from_pairs(
            &[(-1, rat_int(-2)), (0, rat_int(1)), (1, rat_int(0))],
            TableGrowth::Error,
        )
        .unwrap();
        assert!(!check_zconvex_window(&ZConvexFn::PiecewiseTable(bad), &b(-2), &b(1)));
    }

    #[test]
    fn table_window_policy() {
        let t = PiecewiseTable::from_pairs(&[(0, rat_int(-1)), (1, rat_int(1)), (2, rat_int(3))], TableGrowth::Error)
            .unwrap();
        let g = ZConvexFn::PiecewiseTable(t.clone());
        assert_eq!(eval_fn(&g, &b(2)).unwrap(), rat_int(4));
        assert_eq!(eval_fn(&g, &b(-1)).unwrap(), rat_int(1));
        assert!(matches!(eval_fn(&g, &b(3)), Err(Error::OutsideTable(_))));
        assert!(matches!(eval_fn(&g, &b(-2)), Err(Error::OutsideTable(_))));

        let lin = ZConvexFn::PiecewiseTable(PiecewiseTable { growth: TableGrowth::Linear, ..t });
        assert_eq!(eval_fn(&lin, &b(4)).unwrap(), rat_int(10));
        assert_eq!(eval_fn(&lin, &b(-3)).unwrap(), rat_int(3));
        assert!(check_zconvex_window(&lin, &b(-20), &b(20)));
    }

    #[test]
    fn table_keys_must_be_contiguous() {
        assert!(PiecewiseTable::from_pairs(&[(0, rat_int(0)), (2, rat_int(1))], TableGrowth::Error).is_err());
        assert!(PiecewiseTable::from_pairs(&[], TableGrowth::Error).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(ZConvexFn::scaled_even_power(rat_int(1), 3).is_err());
        assert!(ZConvexFn::scaled_even_power(rat_int(0), 2).is_err());
        assert!(ZConvexFn::scaled_abs(rat_int(-1)).is_err());
        assert!(ZConvexFn::geometric_abs(rat_int(1)).is_err());
    }

    #[test]
    fn two_squares_values() {
        let f = two_squares();
        let at = |x: i64, y: i64| eval_objective(&f, &IntVector::from_i64s(&[x, y])).unwrap();
        assert_eq!(at(1, 1), rat_int(4));
        assert_eq!(at(1, 0), rat_int(5));
        assert_eq!(at(0, 1), rat_int(5));
        assert_eq!(at(2, 1), rat_int(13));
        assert_eq!(at(1, 2), rat_int(13));
        assert_eq!(at(0, 0), rat_int(0));
        assert!(eval_objective(&f, &IntVector::from_i64s(&[1])).is_err());
    }

    #[test]
    fn linear_objective_is_dot_product() {
        let f = SeparableObjective::linear(vec![rat(1, 2), rat_int(-3)]);
        assert_eq!(eval_objective(&f, &IntVector::from_i64s(&[4, 1])).unwrap(), rat_int(-1));
    }

    #[test]
    fn text_round_trip() {
        let table = PiecewiseTable::from_pairs(&[(0, rat_int(-1)), (1, rat(1, 2))], TableGrowth::Linear).unwrap();
        let f = SeparableObjective::new(
            2,
            vec![
                Term::new(ZConvexFn::geometric_abs(rat_int(3)).unwrap(), IntVector::from_i64s(&[1, 1]), b(-3)),
                Term::new(ZConvexFn::scaled_even_power(rat_int(4), 6).unwrap(), IntVector::from_i64s(&[1, -1]), b(2)),
                Term::new(ZConvexFn::PiecewiseTable(table), IntVector::from_i64s(&[0, 1]), b(0)),
                Term::new(ZConvexFn::Zero, IntVector::from_i64s(&[1, 0]), b(0)),
            ],
            vec![rat_int(2), rat_int(-1)],
        )
        .unwrap();
        let text = f.to_text();
        assert_eq!(
            text,
            "geom 3 | 1 1 | -3\npow 4 6 | 1 -1 | 2\ntable 0 linear -1 1/2 | 0 1 | 0\nzero | 1 0 | 0\nlinear | 2 -1\n"
        );
        assert_eq!(SeparableObjective::parse(&text).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SeparableObjective::parse("pow 1 2 | 1 1 | 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(SeparableObjective::parse("cube 1 | 1 | 0\nlinear | 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(SeparableObjective::parse("pow 1 3 | 1 | 0\nlinear | 0\n"), Err(Error::Parse { .. })));
        assert!(SeparableObjective::parse("pow 1 2 | 1 1 1 | 0\nlinear | 0 0\n").is_err());
    }
}
