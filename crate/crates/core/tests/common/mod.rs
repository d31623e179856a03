//! Random instance generators and independent oracles shared by the
//! integration suites.

#![allow(dead_code)]

use graver_cip::exact::{rat_int, RatMatrix};
use graver_cip::objective::Term;
use graver_cip::{
    conformal_leq, to_separable, CipInstance, IntMatrix, IntVector, SeparableObjective, ZConvexFn,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(x: &[i64]) -> IntVector {
    IntVector::from_i64s(x)
}

pub fn sorted(vs: &[&[i64]]) -> Vec<IntVector> {
    let mut out: Vec<IntVector> = vs.iter().map(|x| v(x)).collect();
    out.sort();
    out
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    IntMatrix::from_i64_rows(cols, &data).unwrap()
}

pub fn random_rat_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> RatMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    RatMatrix::from_i64_rows(&data).unwrap()
}

/// Random symmetric matrix with entries in `[lo, hi]`.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rat_int(rng.gen_range(lo..=hi));
            m.set(i, j, x.clone());
            m.set(j, i, x);
        }
    }
    m
}

/// `BᵀB` for a random integer `B` with `rows` rows.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rows: usize) -> RatMatrix {
    let b = random_rat_matrix(rng, rows, n, -2, 2);
    b.transpose().mul(&b).unwrap()
}

/// `Σ α c cᵀ` computed entrywise.
pub fn sum_of_squares(terms: &[(BigRational, IntVector)], n: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    for (alpha, c) in terms {
        for i in 0..n {
            for j in 0..n {
                let x = m.get(i, j) + alpha * BigRational::from_integer(c.get(i) * c.get(j));
                m.set(i, j, x);
            }
        }
    }
    m
}

/// `UᵀDU` computed entrywise.
pub fn congruence_product(u: &RatMatrix, d: &[BigRational]) -> RatMatrix {
    let n = u.cols();
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut x = BigRational::zero();
            for (k, dk) in d.iter().enumerate() {
                x += u.get(k, i) * dk * u.get(k, j);
            }
            m.set(i, j, x);
        }
    }
    m
}

pub fn binary_points(n: usize) -> Vec<IntVector> {
    (0..1u32 << n)
        .map(|m| v(&(0..n).map(|i| (m >> i & 1) as i64).collect::<Vec<_>>()))
        .collect()
}

/// All points of `[-b, b]^n`.
pub fn box_points(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-b..=b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Independent Graver oracle: `⊑`-minimal nonzero kernel vectors in
/// `[-b, b]^n` by plain enumeration and pairwise comparison, canonical
/// representatives sorted.
pub fn graver_by_enumeration(a: &IntMatrix, b: i64) -> Vec<IntVector> {
    let kernel: Vec<IntVector> = box_points(a.cols(), b)
        .into_iter()
        .map(|p| v(&p))
        .filter(|x| !x.is_zero() && a.annihilates(x))
        .collect();
    let mut out: Vec<IntVector> = kernel
        .iter()
        .filter(|x| !kernel.iter().any(|y| y != *x && conformal_leq(y, x).unwrap()))
        .filter(|x| x.entries().iter().find(|e| !e.is_zero()).is_some_and(|e| e > &BigInt::zero()))
        .cloned()
        .collect();
    out.sort();
    out
}

/// Random convex quadratic instance with bounds: `Q = BᵀB` split into
/// squares with random offsets, random integer linear part, up to two
/// equations through a random feasible point.
pub fn random_quadratic_instance(rng: &mut ChaCha8Rng, max_n: usize, bound: i64) -> (CipInstance, IntVector) {
    let n = rng.gen_range(2..=max_n);
    let d = rng.gen_range(0..=2.min(n - 1));
    let a = random_matrix(rng, d, n, -2, 2);
    let z0 = v(&(0..n).map(|_| rng.gen_range(0..=bound)).collect::<Vec<_>>());
    let b = a.mul_vec(&z0).unwrap();
    let rows = rng.gen_range(1..=n);
    let q = random_psd(rng, n, rows);
    let rep = to_separable(&q).unwrap();
    let terms = rep
        .terms
        .iter()
        .map(|(alpha, c)| {
            Term::new(
                ZConvexFn::square(alpha.clone()).unwrap(),
                c.clone(),
                BigInt::from(rng.gen_range(-2..=2)),
            )
        })
        .collect();
    let linear = (0..n).map(|_| rat_int(rng.gen_range(-3..=3))).collect();
    let f = SeparableObjective::new(n, terms, linear).unwrap();
    let upper = v(&vec![bound; n]);
    (CipInstance::new(a, b, Some(upper), f).unwrap(), z0)
}

/// Random Z-convex table on `[-w, w]`: increments nondecreasing, `<= 0` up
/// to index 0 and `>= 0` from index 1.
pub fn random_zconvex_table(rng: &mut ChaCha8Rng, w: i64) -> ZConvexFn {
    let mut incs = Vec::new();
    let mut cur: i64 = -rng.gen_range(0..=3) * (w + 1);
    for j in -w + 1..=w {
        let step = rng.gen_range(0..=3);
        cur += step;
        let x = if j <= 0 { cur.min(0) } else { cur.max(0) };
        cur = x;
        incs.push(rat_int(x));
    }
    let t = graver_cip::PiecewiseTable::new(BigInt::from(-w + 1), incs, graver_cip::TableGrowth::Error).unwrap();
    ZConvexFn::PiecewiseTable(t)
}
