//! Convex quadratics `zᵀQz + cᵀz` as separable sums `Σ α_i (c_iᵀz)² + c̄ᵀz`.
//!
//! `Q` is factored as `UᵀDU` by symmetric Gaussian congruence; each row of
//! `U` with a positive pivot becomes a primitive integer `c_i` after scaling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{canonical_rep, IntVector, RatMatrix};
use crate::objective::{SeparableObjective, Term, ZConvexFn};

/// Which diagonal pivot the elimination takes next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotOrder {
    /// Lowest index first.
    #[default]
    Natural,
    /// Highest index first.
    Reverse,
}

/// A sum-of-squares representation of a quadratic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalizationResult {
    /// `(α_i, c_i)` with `α_i > 0` and `c_i` primitive and canonical.
    pub terms: Vec<(BigRational, IntVector)>,
    /// Added to the linear part; nonzero only for 0-1 rephrasing.
    pub linear_correction: Vec<BigRational>,
    /// The congruence factors `Q = UᵀDU` of the matrix that was split.
    pub u: RatMatrix,
    pub d: Vec<BigRational>,
}

impl DiagonalizationResult {
    /// `Σ α_i c_i c_iᵀ`.
    pub fn quadratic_part(&self, n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for (alpha, c) in &self.terms {
            for i in 0..n {
                for j in 0..n {
                    let v = m.get(i, j) + alpha * BigRational::from_integer(c.get(i) * c.get(j));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// The separable objective `Σ α_i (c_iᵀz)² + (c + correction)ᵀz`.
    pub fn to_objective(&self, c: &[BigRational]) -> Result<SeparableObjective> {
        Error::check_dim(self.linear_correction.len(), c.len())?;
        let terms = self
            .terms
            .iter()
            .map(|(alpha, ci)| Ok(Term::new(ZConvexFn::square(alpha.clone())?, ci.clone(), BigInt::zero())))
            .collect::<Result<Vec<_>>>()?;
        let linear = c.iter().zip(&self.linear_correction).map(|(a, b)| a + b).collect();
        SeparableObjective::new(c.len(), terms, linear)
    }
}

fn require_symmetric(q: &RatMatrix) -> Result<()> {
    if q.is_symmetric() {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

/// Rank-one peeling: repeatedly subtract `v vᵀ / (wᵀMw)` with `v = Mw`,
/// where `w` is a unit vector on a nonzero diagonal entry or `e_i + e_j` on
/// a nonzero off-diagonal entry when the diagonal has vanished. Returns the
/// pairs `(d, u)` with `M = Σ d u uᵀ`.
fn peel(q: &RatMatrix, order: PivotOrder) -> Vec<(BigRational, Vec<BigRational>)> {
    let n = q.rows();
    let mut m = q.clone();
    let idx: Vec<usize> = match order {
        PivotOrder::Natural => (0..n).collect(),
        PivotOrder::Reverse => (0..n).rev().collect(),
    };
    let mut out = Vec::new();
    loop {
        let w: Vec<usize> = if let Some(&k) = idx.iter().find(|&&k| !m.get(k, k).is_zero()) {
            vec![k]
        } else if let Some((i, j)) = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i != j && !m.get(i, j).is_zero())
        {
            vec![i, j]
        } else {
            return out;
        };
        let v: Vec<BigRational> = (0..n)
            .map(|r| w.iter().fold(BigRational::zero(), |acc, &k| acc + m.get(r, k)))
            .collect();
        let d: BigRational = w.iter().fold(BigRational::zero(), |acc, &k| acc + &v[k]);
        for i in 0..n {
            for j in 0..n {
                let x = m.get(i, j) - &v[i] * &v[j] / &d;
                m.set(i, j, x);
            }
        }
        let u = v.iter().map(|x| x / &d).collect();
        out.push((d, u));
    }
}

/// `Q = UᵀDU` with `U` invertible and `D` diagonal, all exact.
pub fn congruence_diagonalize(q: &RatMatrix) -> Result<(RatMatrix, Vec<BigRational>)> {
    congruence_diagonalize_with(q, PivotOrder::Natural)
}

pub fn congruence_diagonalize_with(q: &RatMatrix, order: PivotOrder) -> Result<(RatMatrix, Vec<BigRational>)> {
    require_symmetric(q)?;
    let n = q.rows();
    let pieces = peel(q, order);
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for (di, ui) in pieces {
        rows.push(ui);
        d.push(di);
    }
    // complete U with unit vectors carrying zero pivots
    for j in 0..n {
        if rows.len() == n {
            break;
        }
        let mut e = vec![BigRational::zero(); n];
        e[j] = BigRational::one();
        rows.push(e);
        let trial = RatMatrix::new(rows.len(), n, rows.concat()).expect("row lengths match");
        if trial.rank() < rows.len() {
            rows.pop();
        } else {
            d.push(BigRational::zero());
        }
    }
    let u = RatMatrix::new(n, n, rows.concat()).expect("row lengths match");
    Ok((u, d))
}

/// Whether every congruence pivot is nonnegative.
pub fn is_psd(q: &RatMatrix) -> Result<bool> {
    Ok(congruence_diagonalize(q)?.1.iter().all(|d| !d.is_negative()))
}

/// Whether every congruence pivot is positive.
pub fn is_pd(q: &RatMatrix) -> Result<bool> {
    Ok(congruence_diagonalize(q)?.1.iter().all(|d| d.is_positive()))
}

/// Writes `d u uᵀ` as `α c cᵀ` with `c` primitive, canonical and integer.
fn integerize(d: &BigRational, u: &[BigRational]) -> (BigRational, IntVector) {
    let l = u.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = u.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let c = IntVector::new(scaled.iter().map(|x| x / &g).collect());
    let factor = BigRational::new(g, l);
    let alpha = d * &factor * &factor;
    (alpha, canonical_rep(&c).expect("pivot rows are nonzero"))
}

/// `Q = Σ α_i c_i c_iᵀ` with at most `n` terms.
pub fn to_separable(q: &RatMatrix) -> Result<DiagonalizationResult> {
    let (u, d) = congruence_diagonalize(q)?;
    if d.iter().any(Signed::is_negative) {
        return Err(Error::NotPsd);
    }
    let n = q.rows();
    let terms = d
        .iter()
        .enumerate()
        .filter(|(_, di)| di.is_positive())
        .map(|(i, di)| integerize(di, &u.row(i)))
        .collect();
    Ok(DiagonalizationResult {
        terms,
        linear_correction: vec![BigRational::zero(); n],
        u,
        d,
    })
}

/// A `λ̄ >= 0` with `Q + λ̄I` positive definite: the first of
/// `0, G, 2G, 4G, …` that passes an exact check, where `G` is the larger of
/// 1 and the Gershgorin deficit `max_i (Σ_{j≠i} |Q_ij| - Q_ii)`.
pub fn choose_lambda_bar(q: &RatMatrix) -> Result<BigRational> {
    require_symmetric(q)?;
    if is_pd(q)? {
        return Ok(BigRational::zero());
    }
    let n = q.rows();
    let deficit = (0..n)
        .map(|i| {
            let off = (0..n)
                .filter(|&j| j != i)
                .fold(BigRational::zero(), |acc, j| acc + q.get(i, j).abs());
            off - q.get(i, i)
        })
        .max()
        .unwrap_or_else(BigRational::zero);
    let mut lambda = deficit.max(BigRational::one());
    loop {
        if is_pd(&q.shift_diagonal(&lambda))? {
            return Ok(lambda);
        }
        lambda *= BigRational::from_integer(2.into());
    }
}

/// A representation valid on `{0,1}ⁿ`:
/// `zᵀQz + cᵀz = Σ α_i (c_iᵀz)² + c̄ᵀz` for every binary `z`.
///
/// Uses `z_i² = z_i`. A PSD `Q` is split directly. Otherwise negative
/// diagonal entries are moved into the linear part, and if that is still not
/// PSD the remainder is shifted by `λ̄I` with `c̄ = c - λ̄·1`.
/// Returns the representation and `c̄`.
pub fn binary_rephrase(q: &RatMatrix, c: &[BigRational]) -> Result<(DiagonalizationResult, Vec<BigRational>)> {
    require_symmetric(q)?;
    let n = q.rows();
    Error::check_dim(n, c.len())?;
    let mut shift = vec![BigRational::zero(); n];
    let mut m = q.clone();
    if !is_psd(&m)? {
        for (i, s) in shift.iter_mut().enumerate() {
            if m.get(i, i).is_negative() {
                *s = -m.get(i, i);
                m.set(i, i, BigRational::zero());
            }
        }
        if !is_psd(&m)? {
            let lambda = choose_lambda_bar(&m)?;
            m = m.shift_diagonal(&lambda);
            for s in shift.iter_mut() {
                *s += &lambda;
            }
        }
    }
    let mut result = to_separable(&m)?;
    result.linear_correction = shift.iter().map(|s| -s).collect();
    let cbar = c.iter().zip(&result.linear_correction).map(|(a, b)| a + b).collect();
    Ok((result, cbar))
}
