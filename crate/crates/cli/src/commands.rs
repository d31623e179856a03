//! One function per subcommand.

use std::path::Path;

use graver_cip::augment::{instance_test_set, lift_point, slack_lift};
use graver_cip::exact::format_rational;
use graver_cip::qap::{format_assignment, BoundMode};
use graver_cip::{
    binary_rephrase, brute_force_optimum, build_ak_matrix, compute_graver, compute_hcip, compute_hcip_bounded,
    is_psd, permutation_oracle, read_qaplib, solve_qap, to_separable, CipInstance, IntVector, RatMatrix,
    SolveOptions, SolveReport, SolveStatus, TestSet,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use crate::files::{emit, in_file, read, read_instance, read_int_vector, read_matrix, read_rat_vector, CliError, CliResult};

pub struct Flags {
    pub verify: bool,
    pub best_improving: bool,
    pub slack_bounds: bool,
    pub cap: u64,
    pub json: bool,
}

impl Flags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            cap: self.cap,
            best_improving: self.best_improving,
        }
    }
}

pub fn graver(matrix: &Path, out: Option<&Path>) -> CliResult<()> {
    let a = read_matrix(matrix)?;
    emit(out, &compute_graver(&a).to_text())
}

pub fn testset(a: &Path, c: &Path, upper: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let (am, cm) = (read_matrix(a)?, read_matrix(c)?);
    let t = match upper {
        Some(u) => compute_hcip_bounded(&am, &cm, &read_int_vector(u)?)?,
        None => compute_hcip(&am, &cm)?,
    };
    emit(out, &t.to_text())
}

pub fn ak(a: &Path, c: &Path, k: usize, out: Option<&Path>) -> CliResult<()> {
    let m = build_ak_matrix(&read_matrix(a)?, &read_matrix(c)?, k)?;
    emit(out, &m.to_text())
}

fn vector_json(v: &IntVector) -> serde_json::Value {
    json!(v.entries().iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn report_text(r: &SolveReport, json: bool) -> String {
    let value = r.value.as_ref().map(format_rational);
    if json {
        let summary = json!({
            "status": r.status.to_string(),
            "optimum": r.optimum.as_ref().map(vector_json),
            "value": value,
            "steps": r.steps.len(),
        });
        format!("{}{summary}\n", r.trace_json())
    } else {
        let mut s = r.trace_text();
        s.push_str(&format!("status: {}\n", r.status));
        if let (Some(z), Some(v)) = (&r.optimum, &value) {
            s.push_str(&format!("optimum: {z}\nvalue: {v}\n"));
        }
        s
    }
}

/// The enumeration box: upper bounds where present, `box_bound` elsewhere.
fn verify_box(inst: &CipInstance, box_bound: u32) -> IntVector {
    match inst.upper() {
        Some(u) => u.clone(),
        None => IntVector::new(vec![BigInt::from(box_bound); inst.dimension()]),
    }
}

pub fn solve(
    instance: &Path,
    testset: &str,
    start: Option<&Path>,
    flags: &Flags,
    box_bound: u32,
    out: Option<&Path>,
) -> CliResult<()> {
    let inst = read_instance(instance)?;
    let bx = verify_box(&inst, box_bound);
    let z0 = match start {
        Some(p) => read_int_vector(p)?,
        None => graver_cip::augment::find_feasible_start(&inst, &bx)?
            .ok_or_else(|| CliError::Infeasible("no feasible start point in the enumeration box".into()))?,
    };
    if !inst.is_feasible(&z0) {
        return Err(CliError::Infeasible(format!("start point {z0} is infeasible")));
    }
    let (work, start_point) = if flags.slack_bounds {
        (slack_lift(&inst)?, lift_point(&inst, &z0)?)
    } else {
        (inst.clone(), z0)
    };
    let t = if testset == "auto" {
        instance_test_set(&work)?
    } else {
        let p = Path::new(testset);
        in_file(p, TestSet::parse(&read(p)?))?
    };
    let mut report = graver_cip::solve(&work, &t, &start_point, &flags.options())?;
    if flags.slack_bounds {
        let n = inst.dimension();
        report.optimum = report.optimum.map(|z| z.head(n));
        for s in &mut report.steps {
            s.direction = s.direction.head(n);
        }
    }
    let mut text = report_text(&report, flags.json);
    let mut mismatch = None;
    if flags.verify {
        let (best_z, best) = brute_force_optimum(&inst, &bx)?;
        let ok = report.status == SolveStatus::Optimal && report.value.as_ref() == Some(&best);
        if !ok {
            mismatch = Some(format!(
                "verification failed: enumeration finds value {} at {best_z}",
                format_rational(&best)
            ));
        }
        if !flags.json {
            text.push_str(&format!("verification: {}\n", if ok { "ok" } else { "mismatch" }));
        }
    }
    emit(out, &text)?;
    match mismatch {
        Some(m) => Err(CliError::Verification(m)),
        None => Ok(()),
    }
}

pub fn quad(q: &Path, c: Option<&Path>, binary: bool, out: Option<&Path>) -> CliResult<()> {
    let qm = in_file(q, RatMatrix::parse(&read(q)?))?;
    let n = qm.rows();
    let c = match c {
        Some(p) => read_rat_vector(p)?,
        None => vec![BigRational::zero(); n],
    };
    let (rep, cbar) = if binary {
        binary_rephrase(&qm, &c)?
    } else {
        if !is_psd(&qm)? {
            return Err(CliError::Input(
                "Q is not positive semidefinite; use --binary for 0-1 variables".into(),
            ));
        }
        (to_separable(&qm)?, c.clone())
    };
    // Σ α_i c_i c_iᵀ must equal Q plus the diagonal moved out of the linear part
    let mut expect = qm.clone();
    for (i, d) in rep.linear_correction.iter().enumerate() {
        expect.set(i, i, expect.get(i, i) - d);
    }
    if rep.quadratic_part(n) != expect {
        return Err(CliError::Verification("separable form does not reproduce Q".into()));
    }
    let objective = rep.to_objective(&c)?;
    debug_assert_eq!(objective.linear_part(), &cbar[..]);
    emit(out, &objective.to_text())
}

fn parse_permutation(text: &str, n: usize) -> CliResult<Vec<usize>> {
    let perm = text
        .split_whitespace()
        .map(|t| match t.parse::<usize>() {
            Ok(j) if (1..=n).contains(&j) => Ok(j - 1),
            _ => Err(CliError::Input(format!("invalid location `{t}` in start permutation"))),
        })
        .collect::<CliResult<Vec<_>>>()?;
    graver_cip::qap::permutation_point(n, &perm)?;
    Ok(perm)
}

pub fn qap(instance: &Path, start: Option<&str>, flags: &Flags, out: Option<&Path>) -> CliResult<()> {
    let q = in_file(instance, read_qaplib(&read(instance)?))?;
    let start = start.map(|s| parse_permutation(s, q.size())).transpose()?;
    let mode = if flags.slack_bounds { BoundMode::Slack } else { BoundMode::Native };
    let sol = solve_qap(&q, start.as_deref(), mode, &flags.options())?;
    let mut text = if flags.json {
        sol.report.trace_json()
    } else {
        sol.report.trace_text()
    };
    let line = format_assignment(&sol.permutation, &sol.value);
    if flags.json {
        let summary = json!({
            "permutation": sol.permutation.iter().map(|j| j + 1).collect::<Vec<_>>(),
            "value": format_rational(&sol.value),
            "test_set_size": sol.test_set_size,
            "status": sol.report.status.to_string(),
        });
        text.push_str(&format!("{summary}\n"));
    } else {
        text.push_str(&format!("test set: {} directions\n{line}\n", sol.test_set_size));
    }
    let mut mismatch = None;
    if flags.verify {
        let (perm, best) = permutation_oracle(&q)?;
        let ok = sol.report.status == SolveStatus::Optimal && sol.value == best;
        if !ok {
            mismatch = Some(format!("verification failed: oracle finds {}", format_assignment(&perm, &best)));
        }
        if !flags.json {
            text.push_str(&format!("verification: {}\n", if ok { "ok" } else { "mismatch" }));
        }
    }
    emit(out, &text)?;
    match mismatch {
        Some(m) => Err(CliError::Verification(m)),
        None => Ok(()),
    }
}
