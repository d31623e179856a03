//! Test sets for separable convex objectives.
//!
//! `H(A, C)` is the projection onto the first `n` coordinates of the Graver
//! basis of the lifted matrix
//!
//! ```text
//! ( A  0  )
//! ( C  I_s)
//! ```
//!
//! and contains an improving direction for every non-optimal feasible point
//! of any program `min Σ f_i(c_iᵀz + c_i0) + cᵀz` over `Az = b, z ≥ 0` whose
//! `f_i` are Z-convex with minimum at 0 and whose `c_i` are rows of `C`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::completion;
use crate::error::{Error, Result};
use crate::exact::{IntMatrix, IntVector};
use crate::graver::{canonical_set, compute_graver, kernel_in_box, project_first_n, vectors_to_text};

/// A finite set of directions, closed under negation, stored as canonical
/// representatives in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSet {
    n: usize,
    directions: Vec<IntVector>,
    lift_rows: usize,
    provenance: Option<(IntMatrix, IntMatrix)>,
    truncation: Option<IntVector>,
}

impl TestSet {
    /// An ad-hoc test set with no provenance, e.g. a hand-picked subset.
    pub fn from_directions(n: usize, directions: Vec<IntVector>) -> Result<TestSet> {
        for d in &directions {
            Error::check_dim(n, d.dim())?;
        }
        Ok(TestSet {
            n,
            directions: canonical_set(directions),
            lift_rows: 0,
            provenance: None,
            truncation: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn directions(&self) -> &[IntVector] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Number of rows of `C` used in the lifting.
    pub fn lift_rows(&self) -> usize {
        self.lift_rows
    }

    /// The `(A, C)` pair this set was computed from, if known.
    pub fn provenance(&self) -> Option<(&IntMatrix, &IntMatrix)> {
        self.provenance.as_ref().map(|(a, c)| (a, c))
    }

    /// Componentwise bound `|t| <= u` the directions were truncated to, if any.
    pub fn truncation(&self) -> Option<&IntVector> {
        self.truncation.as_ref()
    }

    /// Membership up to sign.
    pub fn contains(&self, v: &IntVector) -> bool {
        match crate::exact::canonical_rep(v) {
            Ok(c) => self.directions.binary_search(&c).is_ok(),
            Err(_) => false,
        }
    }

    pub fn is_subset_of(&self, other: &TestSet) -> bool {
        self.directions.iter().all(|d| other.contains(d))
    }

    /// The directions with `|t_j| <= upper_j` for every `j`.
    pub fn truncate(&self, upper: &IntVector) -> Result<TestSet> {
        Error::check_dim(self.n, upper.dim())?;
        let directions = self
            .directions
            .iter()
            .filter(|t| within_box(t, upper))
            .cloned()
            .collect();
        Ok(TestSet {
            directions,
            truncation: Some(upper.clone()),
            ..self.clone()
        })
    }

    /// Matrix text format with a `# hcip n=<n> s=<s>` header line.
    pub fn to_text(&self) -> String {
        format!(
            "# hcip n={} s={}\n{}",
            self.n,
            self.lift_rows,
            vectors_to_text(self.n, &self.directions)
        )
    }

    /// Reads the format written by [`TestSet::to_text`]; comment lines are ignored.
    pub fn parse(text: &str) -> Result<TestSet> {
        let m = IntMatrix::parse(text)?;
        TestSet::from_directions(m.cols(), m.row_vectors())
    }
}

fn within_box(t: &IntVector, upper: &IntVector) -> bool {
    t.entries().iter().zip(upper.entries()).all(|(x, u)| x.abs() <= *u)
}

/// The block matrix `(A 0; C I_s)`.
pub fn build_lifted_matrix(a: &IntMatrix, c: &IntMatrix) -> Result<IntMatrix> {
    Error::check_dim(a.cols(), c.cols())?;
    let s = c.rows();
    if s == 0 {
        return Ok(a.clone());
    }
    let top = a.hstack(&IntMatrix::zeros(a.rows(), s))?;
    let bottom = c.hstack(&IntMatrix::identity(s))?;
    top.vstack(&bottom)
}

/// `H(A, C)`: projected Graver basis of the lifted matrix, zero removed.
pub fn compute_hcip(a: &IntMatrix, c: &IntMatrix) -> Result<TestSet> {
    let lifted = build_lifted_matrix(a, c)?;
    let g = compute_graver(&lifted);
    let directions = project_first_n(g.elements(), a.cols())?;
    Ok(TestSet {
        n: a.cols(),
        directions,
        lift_rows: c.rows(),
        provenance: Some((a.clone(), c.clone())),
        truncation: None,
    })
}

/// The directions of `H(A, C)` with `|t_j| <= upper_j`, computed without the
/// full Graver basis.
///
/// Every lifted vector `(t', -Ct')` below `(t, -Ct)` in the conformal order
/// has `t' ⊑ t`, so it stays inside the box. The truncated set is therefore
/// the set of `⊑`-minimal lifted vectors among the kernel vectors of `A` in
/// the box, which is finite and enumerable.
pub fn compute_hcip_bounded(a: &IntMatrix, c: &IntMatrix, upper: &IntVector) -> Result<TestSet> {
    Error::check_dim(a.cols(), c.cols())?;
    Error::check_dim(a.cols(), upper.dim())?;
    let bounds = upper
        .entries()
        .iter()
        .map(|u| {
            if u.is_negative() {
                return Err(Error::InvalidInput("upper bounds must be nonnegative".into()));
            }
            i64::try_from(u).map_err(|_| Error::TooLarge("upper bound exceeds 64 bits".into()))
        })
        .collect::<Result<Vec<i64>>>()?;
    let kernel = kernel_in_box(a, &bounds)?;
    let rows = c.row_vectors();
    let lifted: Vec<Vec<BigInt>> = kernel
        .into_iter()
        .map(|t| {
            let t = IntVector::from_i64s(&t);
            let mut v = t.entries().to_vec();
            v.extend(rows.iter().map(|r| -r.dot(&t)));
            v
        })
        .collect();
    let n = a.cols();
    let directions = canonical_set(
        completion::minimal_elements(lifted)
            .into_iter()
            .map(|v| IntVector::new(v[..n].to_vec())),
    );
    Ok(TestSet {
        n,
        directions,
        lift_rows: c.rows(),
        provenance: Some((a.clone(), c.clone())),
        truncation: Some(upper.clone()),
    })
}

/// The auxiliary matrix with `A` on top and, for each row `c_i`, a `-1` block
/// and a `+1` block of width `k` in column group `i`.
pub fn build_ak_matrix(a: &IntMatrix, c: &IntMatrix, k: usize) -> Result<IntMatrix> {
    Error::check_dim(a.cols(), c.cols())?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let (n, s) = (a.cols(), c.rows());
    let cols = n + 2 * k * s;
    let mut m = IntMatrix::zeros(a.rows() + s, cols);
    for r in 0..a.rows() {
        for j in 0..n {
            m.set(r, j, a.get(r, j).clone());
        }
    }
    for i in 0..s {
        let r = a.rows() + i;
        for j in 0..n {
            m.set(r, j, c.get(i, j).clone());
        }
        let base = n + 2 * k * i;
        for j in 0..k {
            m.set(r, base + j, -BigInt::one());
            m.set(r, base + k + j, BigInt::one());
        }
    }
    Ok(m)
}

/// Signed directions `t ∈ T ∪ -T` whose unit step keeps `0 <= z - t (<= upper)`,
/// in scan order: sorted canonical representatives, `+t` before `-t`.
pub fn filter_directions(t: &TestSet, z: &IntVector, upper: Option<&IntVector>) -> Result<Vec<IntVector>> {
    Error::check_dim(t.dimension(), z.dim())?;
    if let Some(u) = upper {
        Error::check_dim(t.dimension(), u.dim())?;
    }
    let mut out = Vec::new();
    for d in t.directions() {
        for signed in [d.clone(), -d] {
            let next = z - &signed;
            if next.is_nonnegative() && upper.is_none_or(|u| next.le_componentwise(u)) {
                out.push(signed);
            }
        }
    }
    Ok(out)
}
