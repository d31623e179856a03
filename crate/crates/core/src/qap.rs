//! Quadratic assignment problems as binary quadratic programs.
//!
//! Variable `x_ij` (facility `i` at location `j`) sits at index `i·n + j`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::augment::{solve, solve_slack, CipInstance, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, IntMatrix, IntVector, RatMatrix};
use crate::quadratic::binary_rephrase;
use crate::testset::compute_hcip_bounded;

/// Largest size accepted by [`permutation_oracle`].
pub const ORACLE_MAX_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QapCost {
    /// `d_ijkl = F_ik · D_jl`.
    KoopmansBeckmann { flow: RatMatrix, dist: RatMatrix },
    /// `d_ijkl` stored at `((i·n + j)·n + k)·n + l`.
    Tensor(Vec<BigRational>),
}

/// `min Σ d_ijkl x_ij x_kl + Σ c_ij x_ij` over permutation matrices `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QapInstance {
    n: usize,
    cost: QapCost,
    fixed: RatMatrix,
}

fn check_square(m: &RatMatrix, n: usize) -> Result<()> {
    Error::check_dim(n, m.rows())?;
    Error::check_dim(n, m.cols())
}

impl QapInstance {
    pub fn koopmans_beckmann(flow: RatMatrix, dist: RatMatrix, fixed: Option<RatMatrix>) -> Result<Self> {
        let n = flow.rows();
        if n == 0 {
            return Err(Error::InvalidInput("QAP size must be positive".into()));
        }
        check_square(&flow, n)?;
        check_square(&dist, n)?;
        let fixed = fixed.unwrap_or_else(|| RatMatrix::zeros(n, n));
        check_square(&fixed, n)?;
        Ok(QapInstance {
            n,
            cost: QapCost::KoopmansBeckmann { flow, dist },
            fixed,
        })
    }

    pub fn from_tensor(n: usize, d: Vec<BigRational>, fixed: RatMatrix) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("QAP size must be positive".into()));
        }
        Error::check_dim(n.pow(4), d.len())?;
        check_square(&fixed, n)?;
        Ok(QapInstance {
            n,
            cost: QapCost::Tensor(d),
            fixed,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn cost(&self) -> &QapCost {
        &self.cost
    }

    pub fn fixed(&self) -> &RatMatrix {
        &self.fixed
    }

    pub fn d(&self, i: usize, j: usize, k: usize, l: usize) -> BigRational {
        match &self.cost {
            QapCost::KoopmansBeckmann { flow, dist } => flow.get(i, k) * dist.get(j, l),
            QapCost::Tensor(d) => d[((i * self.n + j) * self.n + k) * self.n + l].clone(),
        }
    }

    /// `Σ d_ijkl x_ij x_kl + Σ c_ij x_ij` for an arbitrary 0-1 point.
    pub fn raw_objective(&self, x: &IntVector) -> Result<BigRational> {
        let n = self.n;
        Error::check_dim(n * n, x.dim())?;
        let ones: Vec<(usize, usize)> = (0..n * n)
            .filter(|&p| !x.get(p).is_zero())
            .map(|p| (p / n, p % n))
            .collect();
        let mut total = BigRational::zero();
        for &(i, j) in &ones {
            let xij = BigRational::from_integer(x.get(i * n + j).clone());
            total += self.fixed.get(i, j) * &xij;
            for &(k, l) in &ones {
                let xkl = BigRational::from_integer(x.get(k * n + l).clone());
                total += self.d(i, j, k, l) * &xij * xkl;
            }
        }
        Ok(total)
    }

    /// Cost of assigning facility `i` to location `perm[i]`.
    pub fn permutation_cost(&self, perm: &[usize]) -> Result<BigRational> {
        self.raw_objective(&permutation_point(self.n, perm)?)
    }
}

/// The `2n × n²` assignment constraints and right-hand side of ones.
pub fn assignment_matrix(n: usize) -> Result<(IntMatrix, IntVector)> {
    if n == 0 {
        return Err(Error::InvalidInput("QAP size must be positive".into()));
    }
    let mut a = IntMatrix::zeros(2 * n, n * n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, i * n + j, BigInt::one());
            a.set(n + j, i * n + j, BigInt::one());
        }
    }
    Ok((a, IntVector::new(vec![BigInt::one(); 2 * n])))
}

/// The flattened permutation matrix with `x_{i, perm[i]} = 1`.
pub fn permutation_point(n: usize, perm: &[usize]) -> Result<IntVector> {
    Error::check_dim(n, perm.len())?;
    let mut seen = vec![false; n];
    let mut x = vec![0i64; n * n];
    for (i, &j) in perm.iter().enumerate() {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
        }
        x[i * n + j] = 1;
    }
    Ok(IntVector::from_i64s(&x))
}

/// Inverse of [`permutation_point`]; `None` unless `x` is a permutation matrix.
pub fn point_permutation(n: usize, x: &IntVector) -> Option<Vec<usize>> {
    if x.dim() != n * n {
        return None;
    }
    let perm: Vec<usize> = (0..n)
        .map(|i| (0..n).find(|&j| x.get(i * n + j).is_one()))
        .collect::<Option<_>>()?;
    permutation_point(n, &perm).ok().filter(|p| p == x).map(|_| perm)
}

/// The binary CIP with symmetrized `Q_{(ij),(kl)} = (d_ijkl + d_klij) / 2`,
/// fixed costs as the linear part, assignment constraints and bounds 1.
pub fn to_cip(q: &QapInstance) -> Result<CipInstance> {
    let n = q.n;
    let m = n * n;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut big_q = RatMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = (q.d(i, j, k, l) + q.d(k, l, i, j)) * &half;
                    big_q.set(i * n + j, k * n + l, v);
                }
            }
        }
    }
    let c: Vec<BigRational> = (0..m).map(|p| q.fixed.get(p / n, p % n).clone()).collect();
    let (rep, _) = binary_rephrase(&big_q, &c)?;
    let objective = rep.to_objective(&c)?;
    let (a, b) = assignment_matrix(n)?;
    CipInstance::new(a, b, Some(IntVector::new(vec![BigInt::one(); m])), objective)
}

/// The lexicographically smallest optimal permutation and its cost.
pub fn permutation_oracle(q: &QapInstance) -> Result<(Vec<usize>, BigRational)> {
    if q.n > ORACLE_MAX_N {
        return Err(Error::TooLarge(format!("permutation enumeration for n = {} > {ORACLE_MAX_N}", q.n)));
    }
    let mut perm: Vec<usize> = (0..q.n).collect();
    let mut best = (perm.clone(), q.permutation_cost(&perm)?);
    while next_permutation(&mut perm) {
        let v = q.permutation_cost(&perm)?;
        if v < best.1 {
            best = (perm.clone(), v);
        }
    }
    Ok(best)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// How upper bounds enter the test set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundMode {
    /// Slack rows `x + s = 1`; the test set is computed on the lifted system.
    #[default]
    Slack,
    /// Bounds checked directly during augmentation.
    Native,
}

/// Outcome of a test-set solve of a QAP.
#[derive(Clone, Debug)]
pub struct QapSolution {
    pub permutation: Vec<usize>,
    pub value: BigRational,
    pub test_set_size: usize,
    pub report: SolveReport,
}

/// Builds the CIP, computes its test set inside the 0-1 box, and augments
/// from `start` (the identity when `None`).
pub fn solve_qap(q: &QapInstance, start: Option<&[usize]>, mode: BoundMode, opts: &SolveOptions) -> Result<QapSolution> {
    let inst = to_cip(q)?;
    let identity: Vec<usize> = (0..q.n).collect();
    let z0 = permutation_point(q.n, start.unwrap_or(&identity))?;
    let (report, size) = match mode {
        BoundMode::Slack => {
            let lifted = crate::augment::slack_lift(&inst)?;
            let t = crate::augment::instance_test_set(&lifted)?;
            (solve_slack(&inst, Some(&t), &z0, opts)?, t.len())
        }
        BoundMode::Native => {
            let c = inst.objective().coupling_matrix();
            let t = compute_hcip_bounded(inst.matrix(), &c, inst.upper().expect("QAP bounds are set"))?;
            (solve(&inst, &t, &z0, opts)?, t.len())
        }
    };
    let z = report.optimum.clone().expect("started from a feasible point");
    let permutation = point_permutation(q.n, &z)
        .ok_or_else(|| Error::Infeasible(format!("terminal point {z} is not an assignment")))?;
    let value = q.permutation_cost(&permutation)?;
    Ok(QapSolution {
        permutation,
        value,
        test_set_size: size,
        report,
    })
}

/// `permutation: <σ(1) … σ(n)>, value: <r>` with 1-based locations.
pub fn format_assignment(perm: &[usize], value: &BigRational) -> String {
    let p: Vec<String> = perm.iter().map(|j| (j + 1).to_string()).collect();
    format!("permutation: {}, value: {}", p.join(" "), format_rational(value))
}

/// Reads `n`, then the `n×n` flow and distance matrices, separated by any
/// whitespace.
pub fn read_qaplib(text: &str) -> Result<QapInstance> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let (line, tok) = tokens.next().ok_or_else(|| Error::parse(1, "missing size"))?;
    let n: usize = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid size `{tok}`")))?;
    if n == 0 {
        return Err(Error::parse(line, "size must be positive"));
    }
    let mut last_line = line;
    let mut read_matrix = |what: &str| -> Result<RatMatrix> {
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let (line, tok) = tokens.next().ok_or_else(|| {
                Error::parse(last_line, format!("{what} matrix ends early: expected {} entries", n * n))
            })?;
            last_line = line;
            data.push(parse_rational(tok).ok_or_else(|| Error::parse(line, format!("invalid entry `{tok}`")))?);
        }
        RatMatrix::new(n, n, data)
    };
    let flow = read_matrix("flow")?;
    let dist = read_matrix("distance")?;
    if let Some((line, tok)) = tokens.next() {
        return Err(Error::parse(line, format!("unexpected trailing token `{tok}`")));
    }
    QapInstance::koopmans_beckmann(flow, dist, None)
}

/// Writes a Koopmans–Beckmann instance without fixed costs.
pub fn write_qaplib(q: &QapInstance) -> Result<String> {
    let QapCost::KoopmansBeckmann { flow, dist } = &q.cost else {
        return Err(Error::InvalidInput("only flow/distance instances have a file form".into()));
    };
    if q.fixed != RatMatrix::zeros(q.n, q.n) {
        return Err(Error::InvalidInput("fixed costs have no file form".into()));
    }
    let body = |m: &RatMatrix| -> String {
        (0..q.n)
            .map(|r| m.row(r).iter().map(format_rational).collect::<Vec<_>>().join(" ") + "\n")
            .collect()
    };
    Ok(format!("{}\n\n{}\n{}", q.n, body(flow), body(dist)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    fn rm(rows: &[Vec<i64>]) -> RatMatrix {
        RatMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn assignment_matrix_n2() {
        let (a, b) = assignment_matrix(2).unwrap();
        let expect = IntMatrix::from_i64_rows(
            4,
            &[vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1]],
        )
        .unwrap();
        assert_eq!(a, expect);
        assert_eq!(b, IntVector::from_i64s(&[1, 1, 1, 1]));
    }

    #[test]
    fn assignment_rank_and_permutations() {
        for n in 1..=4 {
            let (a, b) = assignment_matrix(n).unwrap();
            assert_eq!(a.rank(), 2 * n - 1);
            let mut p: Vec<usize> = (0..n).collect();
            loop {
                let x = permutation_point(n, &p).unwrap();
                assert_eq!(a.mul_vec(&x).unwrap(), b);
                assert_eq!(point_permutation(n, &x), Some(p.clone()));
                if !next_permutation(&mut p) {
                    break;
                }
            }
        }
    }

    #[test]
    fn linear_instance() {
        let q = QapInstance::koopmans_beckmann(
            RatMatrix::zeros(2, 2),
            RatMatrix::zeros(2, 2),
            Some(rm(&[vec![0, 1], vec![1, 0]])),
        )
        .unwrap();
        assert_eq!(permutation_oracle(&q).unwrap(), (vec![0, 1], rat_int(0)));
        let s = solve_qap(&q, Some(&[1, 0]), BoundMode::Slack, &SolveOptions::default()).unwrap();
        assert_eq!(s.permutation, vec![0, 1]);
        assert_eq!(s.value, rat_int(0));
    }

    #[test]
    fn single_facility() {
        let q = QapInstance::koopmans_beckmann(rm(&[vec![3]]), rm(&[vec![2]]), Some(rm(&[vec![5]]))).unwrap();
        assert_eq!(permutation_oracle(&q).unwrap(), (vec![0], rat_int(11)));
    }

    #[test]
    fn tied_permutations_pick_first() {
        let q = QapInstance::koopmans_beckmann(rm(&[vec![0, 1], vec![1, 0]]), rm(&[vec![0, 2], vec![2, 0]]), None)
            .unwrap();
        assert_eq!(permutation_oracle(&q).unwrap(), (vec![0, 1], rat_int(4)));
        assert_eq!(q.permutation_cost(&[1, 0]).unwrap(), rat_int(4));
    }

    #[test]
    fn cip_objective_matches_tensor() {
        let q = QapInstance::koopmans_beckmann(
            rm(&[vec![0, 2, 1], vec![2, 0, 3], vec![1, 3, 0]]),
            rm(&[vec![0, 1, 4], vec![1, 0, 2], vec![4, 2, 0]]),
            Some(rm(&[vec![1, 0, 2], vec![0, 3, 0], vec![2, 0, 1]])),
        )
        .unwrap();
        let inst = to_cip(&q).unwrap();
        let mut p = vec![0, 1, 2];
        loop {
            let x = permutation_point(3, &p).unwrap();
            assert!(inst.is_feasible(&x));
            assert_eq!(inst.value(&x).unwrap(), q.raw_objective(&x).unwrap());
            if !next_permutation(&mut p) {
                break;
            }
        }
    }

    #[test]
    fn oracle_guard() {
        let q = QapInstance::koopmans_beckmann(RatMatrix::zeros(9, 9), RatMatrix::zeros(9, 9), None).unwrap();
        assert!(matches!(permutation_oracle(&q), Err(Error::TooLarge(_))));
    }

    #[test]
    fn qaplib_parse() {
        let q = read_qaplib("2\n0 1\n1 0\n0 2\n2 0\n").unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(
            q.cost(),
            &QapCost::KoopmansBeckmann {
                flow: rm(&[vec![0, 1], vec![1, 0]]),
                dist: rm(&[vec![0, 2], vec![2, 0]]),
            }
        );
        assert!(matches!(read_qaplib("2\n0 1\n1 0\n0 2\n"), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(read_qaplib("2 0 1 1 0 0 2 2 0 7"), Err(Error::Parse { .. })));
        assert!(matches!(read_qaplib("x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_qaplib(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn qaplib_round_trip() {
        let q = QapInstance::koopmans_beckmann(
            rm(&[vec![0, 2, 1], vec![2, 0, 3], vec![1, 3, 0]]),
            rm(&[vec![0, 1, 4], vec![1, 0, 2], vec![4, 2, 0]]),
            None,
        )
        .unwrap();
        let text = write_qaplib(&q).unwrap();
        assert_eq!(read_qaplib(&text).unwrap(), q);
        assert_eq!(write_qaplib(&read_qaplib(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn output_format() {
        assert_eq!(format_assignment(&[2, 0, 1], &rat_int(17)), "permutation: 3 1 2, value: 17");
    }
}
