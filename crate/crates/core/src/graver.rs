//! Graver bases: completion, a brute-force oracle, and the column
//! duplication/negation constructions.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::completion;
use crate::error::{Error, Result};
use crate::exact::{canonical_rep, kernel_lattice_basis, IntMatrix, IntVector};

/// The `⊑`-minimal nonzero integer solutions of `A z = 0`, one canonical
/// representative per `±` pair, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverBasis {
    source: IntMatrix,
    elements: Vec<IntVector>,
}

impl GraverBasis {
    /// Canonicalizes, deduplicates and sorts `elements`; zero vectors are dropped.
    pub(crate) fn from_parts(source: IntMatrix, elements: Vec<IntVector>) -> Self {
        let elements = canonical_set(elements);
        GraverBasis { source, elements }
    }

    pub fn dimension(&self) -> usize {
        self.source.cols()
    }

    pub fn elements(&self) -> &[IntVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn source(&self) -> &IntMatrix {
        &self.source
    }

    /// Short stable fingerprint of the source matrix (FNV-1a over its text form).
    pub fn source_id(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.source.to_text().bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Membership up to sign.
    pub fn contains(&self, v: &IntVector) -> bool {
        match canonical_rep(v) {
            Ok(c) => self.elements.binary_search(&c).is_ok(),
            Err(_) => false,
        }
    }

    /// Elements as rows of a matrix in the shared text format.
    pub fn to_text(&self) -> String {
        vectors_to_text(self.dimension(), &self.elements)
    }
}

pub(crate) fn vectors_to_text(n: usize, vs: &[IntVector]) -> String {
    let mut out = format!("{} {}\n", vs.len(), n);
    for v in vs {
        let line: Vec<String> = v.entries().iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Canonical representatives, zero removed, sorted, deduplicated.
pub(crate) fn canonical_set(vs: impl IntoIterator<Item = IntVector>) -> Vec<IntVector> {
    let mut out: Vec<IntVector> = vs.into_iter().filter_map(|v| canonical_rep(&v).ok()).collect();
    out.sort();
    out.dedup();
    out
}

/// Graver basis of `A` by completion from a kernel lattice basis.
pub fn compute_graver(a: &IntMatrix) -> GraverBasis {
    let generators: Vec<Vec<BigInt>> = kernel_lattice_basis(a)
        .into_iter()
        .map(IntVector::into_entries)
        .collect();
    let elements = completion::complete(&generators)
        .into_iter()
        .map(IntVector::new)
        .collect();
    GraverBasis::from_parts(a.clone(), elements)
}

/// All nonzero `v` with `A v = 0` and `|v_j| <= bounds[j]`, canonical
/// representatives only, by depth-first enumeration with residual pruning.
pub(crate) fn kernel_in_box(a: &IntMatrix, bounds: &[i64]) -> Result<Vec<Vec<i64>>> {
    Error::check_dim(a.cols(), bounds.len())?;
    let rows: Vec<Vec<i128>> = (0..a.rows())
        .map(|r| {
            a.row(r)
                .entries()
                .iter()
                .map(|x| {
                    i64::try_from(x)
                        .map(i128::from)
                        .map_err(|_| Error::TooLarge("matrix entry exceeds 64 bits".into()))
                })
                .collect::<Result<Vec<i128>>>()
        })
        .collect::<Result<_>>()?;
    let n = a.cols();
    // cap[j][r]: the largest |residual| that columns j.. can still cancel in row r.
    let mut cap = vec![vec![0i128; rows.len()]; n + 1];
    for j in (0..n).rev() {
        for (r, row) in rows.iter().enumerate() {
            cap[j][r] = cap[j + 1][r] + row[j].abs() * i128::from(bounds[j]);
        }
    }

    struct Search<'a> {
        rows: &'a [Vec<i128>],
        bounds: &'a [i64],
        cap: &'a [Vec<i128>],
        current: Vec<i64>,
        residual: Vec<i128>,
        out: Vec<Vec<i64>>,
    }

    impl Search<'_> {
        fn go(&mut self, j: usize, started: bool) {
            if j == self.bounds.len() {
                if started && self.residual.iter().all(|&x| x == 0) {
                    self.out.push(self.current.clone());
                }
                return;
            }
            let b = self.bounds[j];
            let lo = if started { -b } else { 0 };
            for x in lo..=b {
                let xi = i128::from(x);
                let feasible = self
                    .rows
                    .iter()
                    .zip(&self.residual)
                    .zip(&self.cap[j + 1])
                    .all(|((row, res), cap)| (res + row[j] * xi).abs() <= *cap);
                if !feasible {
                    continue;
                }
                for (res, row) in self.residual.iter_mut().zip(self.rows) {
                    *res += row[j] * xi;
                }
                self.current[j] = x;
                self.go(j + 1, started || x != 0);
                for (res, row) in self.residual.iter_mut().zip(self.rows) {
                    *res -= row[j] * xi;
                }
            }
            self.current[j] = 0;
        }
    }

    let mut search = Search {
        rows: &rows,
        bounds,
        cap: &cap,
        current: vec![0; n],
        residual: vec![0; rows.len()],
        out: Vec::new(),
    };
    search.go(0, false);
    Ok(search.out)
}

fn to_int_vector(v: &[i64]) -> IntVector {
    IntVector::from_i64s(v)
}

/// Brute-force Graver oracle: the `⊑`-minimal elements among the nonzero
/// kernel vectors with `‖v‖∞ <= box_bound`.
pub fn graver_oracle(a: &IntMatrix, box_bound: u32) -> Result<Vec<IntVector>> {
    if box_bound == 0 {
        return Err(Error::InvalidInput("box bound must be at least 1".into()));
    }
    let bounds = vec![i64::from(box_bound); a.cols()];
    let found = kernel_in_box(a, &bounds)?;
    let minimal = completion::minimal_elements(found);
    Ok(canonical_set(minimal.iter().map(|v| to_int_vector(v))))
}

/// Graver basis of `(B' | -b'_col)` from that of `B'`.
///
/// `(u, v, w)` with `v w <= 0` and `(u, v - w)` in `G(B')`, together with
/// `±(0, 1, 1)`; `v` sits at `col` and `w` in the new last position.
pub fn expand_negated_column_at(g: &GraverBasis, col: usize) -> Result<GraverBasis> {
    expand_column(g, col, true)
}

/// Graver basis of `(B' | b'_col)` from that of `B'`.
///
/// `(u, v, w)` with `v w >= 0` and `(u, v + w)` in `G(B')`, together with
/// `±(0, 1, -1)`.
pub fn expand_duplicated_column_at(g: &GraverBasis, col: usize) -> Result<GraverBasis> {
    expand_column(g, col, false)
}

/// [`expand_negated_column_at`] on the last column of `(A | a)`.
pub fn expand_negated_column(g: &GraverBasis) -> Result<GraverBasis> {
    expand_negated_column_at(g, g.dimension() - 1)
}

/// [`expand_duplicated_column_at`] on the last column of `(A | a)`.
pub fn expand_duplicated_column(g: &GraverBasis) -> Result<GraverBasis> {
    expand_duplicated_column_at(g, g.dimension() - 1)
}

fn expand_column(g: &GraverBasis, col: usize, negated: bool) -> Result<GraverBasis> {
    let n = g.dimension();
    if col >= n {
        return Err(Error::InvalidInput(format!("column {col} out of range for {n} columns")));
    }
    let column = g.source().column(col);
    let added = if negated { -&column } else { column };
    let source = g.source().with_column(&added)?;

    let mut out = Vec::new();
    for e in g.elements() {
        let x = e.get(col).clone();
        // v ranges over the integers between 0 and x inclusive.
        let (lo, hi) = if x.is_negative() {
            (x.clone(), BigInt::zero())
        } else {
            (BigInt::zero(), x.clone())
        };
        let mut v = lo;
        while v <= hi {
            // negated: v - w = x with v w <= 0; duplicated: v + w = x with v w >= 0
            let w = if negated { &v - &x } else { &x - &v };
            let mut entries = e.entries().to_vec();
            entries[col] = v.clone();
            entries.push(w);
            out.push(IntVector::new(entries));
            v += BigInt::one();
        }
    }
    // For a zero column both unit vectors are already in the kernel and the
    // extra pair is not minimal.
    if !added.is_zero() {
        let mut extra = IntVector::zeros(n + 1).into_entries();
        extra[col] = BigInt::one();
        extra[n] = if negated { BigInt::one() } else { -BigInt::one() };
        out.push(IntVector::new(extra));
    }

    Ok(GraverBasis::from_parts(source, out))
}

/// Images of `vs` under projection onto the first `n` components,
/// canonicalized, with the zero vector removed.
pub fn project_first_n(vs: &[IntVector], n: usize) -> Result<Vec<IntVector>> {
    if let Some(short) = vs.iter().find(|v| v.dim() < n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: short.dim(),
        });
    }
    Ok(canonical_set(vs.iter().map(|v| v.head(n))))
}
