//! Pottier-style completion for Graver bases.
//!
//! Starting from `±` a lattice basis, every pairwise sum is reduced to a
//! normal form by subtracting elements that lie below it in the conformal
//! order; irreducible remainders join the set and generate new pairs. When
//! no pair produces a new remainder, every lattice vector is a conformal sum
//! of set elements, so the `⊑`-minimal elements are exactly the Graver basis.
//!
//! The set holds one canonical representative per `±` pair. Reductions try
//! both signs. Pairs are taken in creation order and reducers are chosen
//! lexicographically smallest first, so runs are reproducible.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::Signed;

/// Arithmetic overflow of the fixed-width path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) trait Entry: Clone + Eq + Ord + Hash + Debug {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn sign(&self) -> i8;
    /// `|self| <= |o|`
    fn abs_le(&self, o: &Self) -> bool;
    fn abs_u128(&self) -> u128;
}

impl Entry for i64 {
    fn from_big(x: &BigInt) -> Option<Self> {
        i64::try_from(x).ok()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn sign(&self) -> i8 {
        self.signum() as i8
    }
    fn abs_le(&self, o: &Self) -> bool {
        self.unsigned_abs() <= o.unsigned_abs()
    }
    fn abs_u128(&self) -> u128 {
        self.unsigned_abs() as u128
    }
}

impl Entry for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn abs_le(&self, o: &Self) -> bool {
        self.magnitude() <= o.magnitude()
    }
    fn abs_u128(&self) -> u128 {
        u128::try_from(self.magnitude()).unwrap_or(u128::MAX)
    }
}

/// Sign pattern of a vector as two bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Support {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Support {
    fn of<E: Entry>(v: &[E]) -> Support {
        let words = v.len().div_ceil(64).max(1);
        let mut s = Support {
            pos: vec![0; words],
            neg: vec![0; words],
        };
        for (j, x) in v.iter().enumerate() {
            match x.sign() {
                1 => s.pos[j / 64] |= 1 << (j % 64),
                -1 => s.neg[j / 64] |= 1 << (j % 64),
                _ => {}
            }
        }
        s
    }

    /// Sign pattern of `self` fits inside that of `other`.
    fn below(&self, other: &Support) -> bool {
        subset(&self.pos, &other.pos) && subset(&self.neg, &other.neg)
    }

    /// Sign pattern of `-self` fits inside that of `other`.
    fn below_negated(&self, other: &Support) -> bool {
        subset(&self.pos, &other.neg) && subset(&self.neg, &other.pos)
    }

    /// No coordinate where `self` and `other` have opposite signs.
    fn sign_compatible(&self, other: &Support) -> bool {
        disjoint(&self.pos, &other.neg) && disjoint(&self.neg, &other.pos)
    }

    /// No coordinate where `self` and `-other` have opposite signs.
    fn sign_compatible_negated(&self, other: &Support) -> bool {
        disjoint(&self.pos, &other.pos) && disjoint(&self.neg, &other.neg)
    }
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

struct Element<E> {
    v: Vec<E>,
    support: Support,
}

/// The growing completion set.
struct Completion<E> {
    elements: Vec<Element<E>>,
    /// Indices of `elements` in lexicographic order of their vectors.
    lex_order: Vec<usize>,
    seen: HashSet<Vec<E>>,
}

impl<E: Entry> Completion<E> {
    fn new() -> Self {
        Completion {
            elements: Vec::new(),
            lex_order: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn insert(&mut self, v: Vec<E>) -> Result<bool, Overflow> {
        let v = canonical(v)?;
        if v.iter().all(|x| x.sign() == 0) || !self.seen.insert(v.clone()) {
            return Ok(false);
        }
        let idx = self.elements.len();
        let pos = self
            .lex_order
            .partition_point(|&i| self.elements[i].v < v);
        self.lex_order.insert(pos, idx);
        self.elements.push(Element {
            support: Support::of(&v),
            v,
        });
        Ok(true)
    }

    /// The first element in lexicographic order that reduces `s`, with the
    /// sign to subtract it with.
    fn find_reducer(&self, s: &[E], support: &Support) -> Option<(usize, bool)> {
        for &i in &self.lex_order {
            let g = &self.elements[i];
            if g.support.below(support) && g.v.iter().zip(s).all(|(a, b)| a.abs_le(b)) {
                return Some((i, false));
            }
            if g.support.below_negated(support) && g.v.iter().zip(s).all(|(a, b)| a.abs_le(b)) {
                return Some((i, true));
            }
        }
        None
    }

    /// Reduces `s` until no element lies below it; `None` when it vanishes.
    fn normal_form(&self, mut s: Vec<E>) -> Result<Option<Vec<E>>, Overflow> {
        loop {
            if s.iter().all(|x| x.sign() == 0) {
                return Ok(None);
            }
            let support = Support::of(&s);
            let Some((i, negated)) = self.find_reducer(&s, &support) else {
                return Ok(Some(s));
            };
            let g = &self.elements[i].v;
            for (x, y) in s.iter_mut().zip(g) {
                *x = if negated { x.add(y) } else { x.sub(y) }.ok_or(Overflow)?;
            }
        }
    }

    fn run(&mut self) -> Result<(), Overflow> {
        let mut j = 1;
        while j < self.elements.len() {
            for i in 0..j {
                for negated in [false, true] {
                    let (u, v) = (&self.elements[i], &self.elements[j]);
                    let conformal = if negated {
                        u.support.sign_compatible_negated(&v.support)
                    } else {
                        u.support.sign_compatible(&v.support)
                    };
                    if conformal {
                        continue;
                    }
                    let sum = u
                        .v
                        .iter()
                        .zip(&v.v)
                        .map(|(a, b)| if negated { a.sub(b) } else { a.add(b) })
                        .collect::<Option<Vec<E>>>()
                        .ok_or(Overflow)?;
                    if let Some(r) = self.normal_form(sum)? {
                        self.insert(r)?;
                    }
                }
            }
            j += 1;
        }
        Ok(())
    }

    /// The `⊑`-minimal elements, up to sign.
    fn minimal(self) -> Vec<Vec<E>> {
        minimal_elements(self.elements.into_iter().map(|e| e.v).collect())
    }
}

fn canonical<E: Entry>(v: Vec<E>) -> Result<Vec<E>, Overflow> {
    match v.iter().find(|x| x.sign() != 0) {
        Some(x) if x.sign() < 0 => v.iter().map(Entry::neg).collect::<Option<_>>().ok_or(Overflow),
        _ => Ok(v),
    }
}

/// Keeps the vectors not dominated (up to sign) by another vector in the set.
///
/// Inputs are canonical representatives without duplicates. A dominating
/// vector has strictly smaller 1-norm, so scanning by increasing norm and
/// comparing only against already-kept vectors suffices.
pub(crate) fn minimal_elements<E: Entry>(mut vs: Vec<Vec<E>>) -> Vec<Vec<E>> {
    vs.sort_by_cached_key(|v| (v.iter().map(Entry::abs_u128).sum::<u128>(), v.clone()));
    let mut kept: Vec<Element<E>> = Vec::new();
    for v in vs {
        let support = Support::of(&v);
        let dominated = kept.iter().any(|g| {
            (g.support.below(&support) || g.support.below_negated(&support))
                && g.v.iter().zip(&v).all(|(a, b)| a.abs_le(b))
        });
        if !dominated {
            kept.push(Element { v, support });
        }
    }
    kept.into_iter().map(|e| e.v).collect()
}

fn complete_with<E: Entry>(generators: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, Overflow> {
    let mut c = Completion::<E>::new();
    for g in generators {
        let v = g.iter().map(E::from_big).collect::<Option<Vec<E>>>().ok_or(Overflow)?;
        c.insert(v)?;
    }
    c.run()?;
    Ok(c
        .minimal()
        .into_iter()
        .map(|v| v.iter().map(Entry::to_big).collect())
        .collect())
}

/// Graver basis of the lattice generated by `generators`, as canonical
/// representatives in no particular order.
pub(crate) fn complete(generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    complete_with::<i64>(generators)
        .or_else(|_| complete_with::<BigInt>(generators))
        .expect("arbitrary-precision completion cannot overflow")
}
