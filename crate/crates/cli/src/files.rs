//! File formats and output handling.
//!
//! An instance file has sections introduced by a keyword on its own line:
//!
//! ```text
//! matrix
//! 1 3
//! 1 1 1
//! rhs
//! 2
//! upper          (optional)
//! 1 2 2
//! objective
//! pow 1 2 | 1 0 -1 | 1
//! linear | 0 0 -1
//! ```
//!
//! `rhs` may be omitted when the matrix has no rows. Lines starting with `#`
//! are comments everywhere.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use graver_cip::exact::parse_rational;
use graver_cip::{CipInstance, Error, IntMatrix, IntVector, SeparableObjective};
use num_bigint::BigInt;
use num_rational::BigRational;

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible(String),
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::EmptyFeasibleSet => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Prefixes parse errors with the file name.
pub fn in_file<T>(path: &Path, r: graver_cip::Result<T>) -> CliResult<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn read_matrix(path: &Path) -> CliResult<IntMatrix> {
    in_file(path, IntMatrix::parse(&read(path)?))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_ints(text: &str) -> graver_cip::Result<Vec<BigInt>> {
    content_lines(text)
        .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n, t)))
        .map(|(n, t)| {
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse {
                    line: n,
                    message: format!("expected an integer, found `{t}`"),
                })
        })
        .collect()
}

/// One or more lines of integers.
pub fn read_int_vector(path: &Path) -> CliResult<IntVector> {
    Ok(IntVector::new(in_file(path, parse_ints(&read(path)?))?))
}

/// One or more lines of rationals.
pub fn read_rat_vector(path: &Path) -> CliResult<Vec<BigRational>> {
    let text = read(path)?;
    let parsed = content_lines(&text)
        .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n, t)))
        .map(|(n, t)| {
            parse_rational(t).ok_or(Error::Parse {
                line: n,
                message: format!("expected a rational, found `{t}`"),
            })
        })
        .collect();
    in_file(path, parsed)
}

const SECTIONS: [&str; 4] = ["matrix", "rhs", "upper", "objective"];

/// Reads the sectioned instance format.
pub fn parse_instance(text: &str) -> graver_cip::Result<CipInstance> {
    let mut sections: Vec<(&str, usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if SECTIONS.contains(&line) {
            if sections.iter().any(|(s, _, _)| *s == line) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("duplicate section `{line}`"),
                });
            }
            sections.push((line, i + 1, String::new()));
        } else if let Some((_, _, body)) = sections.last_mut() {
            body.push_str(raw);
            body.push('\n');
        } else if !line.is_empty() && !line.starts_with('#') {
            return Err(Error::Parse {
                line: i + 1,
                message: "content before the first section".into(),
            });
        }
    }
    // re-base section-relative line numbers onto the file
    let section = |name: &str| -> Option<(usize, &str)> {
        sections.iter().find(|(s, _, _)| *s == name).map(|(_, l, b)| (*l, b.as_str()))
    };
    let shift = |start: usize, e: Error| match e {
        Error::Parse { line, message } => Error::Parse {
            line: start + line,
            message,
        },
        other => other,
    };
    let (ml, mb) = section("matrix").ok_or(Error::Parse {
        line: 1,
        message: "missing `matrix` section".into(),
    })?;
    let a = IntMatrix::parse(mb).map_err(|e| shift(ml, e))?;
    let b = match section("rhs") {
        Some((l, body)) => IntVector::new(parse_ints(body).map_err(|e| shift(l, e))?),
        None => IntVector::zeros(0),
    };
    let upper = match section("upper") {
        Some((l, body)) => Some(IntVector::new(parse_ints(body).map_err(|e| shift(l, e))?)),
        None => None,
    };
    let (ol, ob) = section("objective").ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing `objective` section".into(),
    })?;
    let objective = SeparableObjective::parse(ob).map_err(|e| shift(ol, e))?;
    CipInstance::new(a, b, upper, objective)
}

pub fn read_instance(path: &Path) -> CliResult<CipInstance> {
    in_file(path, parse_instance(&read(path)?))
}

/// Writes to `out` through a temporary file in the same directory and a
/// rename, or prints to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_instance(inst: &CipInstance) -> String {
        let join = |v: &IntVector| v.entries().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("matrix\n{}rhs\n{}\n", inst.matrix().to_text(), join(inst.rhs()));
        if let Some(u) = inst.upper() {
            out.push_str(&format!("upper\n{}\n", join(u)));
        }
        out.push_str("objective\n");
        out.push_str(&inst.objective().to_text());
        out
    }

    const EXAMPLE: &str = "\
# three variables summing to two
matrix
1 3
1 1 1
rhs
2
upper
1 2 2
objective
pow 1 2 | 1 0 -1 | 1
linear | 0 0 -1
";

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(EXAMPLE).unwrap();
        assert_eq!(inst.dimension(), 3);
        assert_eq!(inst.upper(), Some(&IntVector::from_i64s(&[1, 2, 2])));
        let text = write_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn rhs_optional_without_rows() {
        let inst = parse_instance("matrix\n0 2\nobjective\nlinear | 1 1\n").unwrap();
        assert_eq!(inst.rhs().dim(), 0);
    }

    #[test]
    fn errors_carry_file_lines() {
        let bad = EXAMPLE.replace("pow 1 2", "pow 1 3");
        assert!(matches!(parse_instance(&bad), Err(Error::Parse { line: 10, .. })));
        assert!(matches!(parse_instance("1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance("matrix\n0 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_instance("matrix\n0 2\nmatrix\n0 2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::EmptyFeasibleSet).code(), 3);
        assert_eq!(CliError::from(Error::NotPsd).code(), 2);
        assert_eq!(CliError::Verification(String::new()).code(), 4);
    }
}
