//! Random bounded quadratic instances solved by augmentation and checked
//! against enumeration. Output depends only on the seed.

use graver_cip::augment::solve_slack;
use graver_cip::exact::{format_rational, rat_int};
use graver_cip::objective::Term;
use graver_cip::{
    brute_force_optimum, CipInstance, IntMatrix, IntVector, SeparableObjective, SolveOptions, SolveStatus, ZConvexFn,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::files::{CliError, CliResult};

/// `n ∈ {2, 3}` variables in `[0, 3]`, at most one equation built around a
/// known feasible point, and up to two squared terms plus a linear part.
fn random_instance(rng: &mut ChaCha8Rng) -> graver_cip::Result<(CipInstance, IntVector)> {
    let n = rng.gen_range(2..=3);
    let d = rng.gen_range(0..=1);
    let rows: Vec<Vec<i64>> = (0..d).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let a = IntMatrix::from_i64_rows(n, &rows)?;
    let z0 = IntVector::from_i64s(&(0..n).map(|_| rng.gen_range(0..=3)).collect::<Vec<_>>());
    let b = a.mul_vec(&z0)?;
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let mut c: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        if c.iter().all(|&x| x == 0) {
            c[0] = 1;
        }
        let alpha = rat_int(rng.gen_range(1..=3));
        terms.push(Term::new(
            ZConvexFn::square(alpha)?,
            IntVector::from_i64s(&c),
            BigInt::from(rng.gen_range(-2..=2)),
        ));
    }
    let linear = (0..n).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
    let objective = SeparableObjective::new(n, terms, linear)?;
    let upper = IntVector::from_i64s(&vec![3; n]);
    Ok((CipInstance::new(a, b, Some(upper), objective)?, z0))
}

pub fn run(seed: u64, count: usize) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for k in 1..=count {
        let (inst, z0) = random_instance(&mut rng)?;
        let report = solve_slack(&inst, None, &z0, &SolveOptions::default())?;
        let (_, best) = brute_force_optimum(&inst, inst.upper().expect("bounded"))?;
        let value = report.value.expect("started from a feasible point");
        let ok = report.status == SolveStatus::Optimal && value == best;
        if !ok {
            failures += 1;
        }
        println!(
            "instance {k}: n={} steps={} value={} enumeration={} {}",
            inst.dimension(),
            report.steps.len(),
            format_rational(&value),
            format_rational(&best),
            if ok { "ok" } else { "MISMATCH" }
        );
    }
    println!("{} of {count} instances agree", count - failures);
    if failures > 0 {
        return Err(CliError::Verification(format!("{failures} instance(s) disagree with enumeration")));
    }
    Ok(())
}
