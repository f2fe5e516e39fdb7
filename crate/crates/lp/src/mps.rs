//! MPS text format for equality-form instances.
//!
//! Rows are named `R<i>` and columns `C<j>`, all rows are `E` rows and the
//! objective row is `COST`. The writer uses the classic field columns
//! (2-3, 5-12, 15-22, 25-36, 40-47, 50-61); the reader splits on whitespace,
//! so it also accepts free-format files that follow the same conventions.

use std::fmt::Write as _;

use crate::error::LpError;
use crate::instance::{Bounds, LpInstance};

pub fn write_mps(lp: &LpInstance, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n N  COST\n");
    for i in 0..lp.n_rows() {
        let _ = writeln!(out, " E  R{i}");
    }
    out.push_str("COLUMNS\n");
    for j in 0..lp.n_vars() {
        let col = format!("C{j}");
        let c = lp.objective()[j];
        if c != 0.0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", col, "COST", fmt_num(c));
        }
        let (rows, vals) = lp.column(j);
        for (&i, &v) in rows.iter().zip(vals) {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", col, format!("R{i}"), fmt_num(v));
        }
    }
    out.push_str("RHS\n");
    for (i, &b) in lp.rhs().iter().enumerate() {
        if b != 0.0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", format!("R{i}"), fmt_num(b));
        }
    }
    out.push_str("BOUNDS\n");
    for (j, b) in lp.bounds().iter().enumerate() {
        let col = format!("C{j}");
        let mut line = |kind: &str, v: Option<f64>| {
            let _ = match v {
                Some(v) => writeln!(out, " {kind} {:<8}  {:<8}  {:>12}", "BND", col, fmt_num(v)),
                None => writeln!(out, " {kind} {:<8}  {col}", "BND"),
            };
        };
        match (b.lower.is_finite(), b.upper.is_finite()) {
            _ if b.is_fixed() => line("FX", Some(b.lower)),
            (false, false) => line("FR", None),
            (false, true) => {
                line("MI", None);
                line("UP", Some(b.upper));
            }
            (true, false) => {
                if b.lower != 0.0 {
                    line("LO", Some(b.lower));
                }
            }
            (true, true) => {
                if b.lower != 0.0 {
                    line("LO", Some(b.lower));
                }
                line("UP", Some(b.upper));
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

// Shortest representation that parses back to the same f64.
fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn index(name: &str, prefix: char, line: usize) -> Result<usize, LpError> {
    name.strip_prefix(prefix)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| LpError::Parse { line, message: format!("unexpected name {name}") })
}

fn number(tok: &str, line: usize) -> Result<f64, LpError> {
    tok.parse().map_err(|_| LpError::Parse { line, message: format!("bad number {tok}") })
}

pub fn read_mps(text: &str) -> Result<LpInstance, LpError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
    }
    let mut section = Section::None;
    let mut n_rows = 0;
    let mut n_vars = 0;
    let mut objective = Vec::new();
    let mut triplets = Vec::new();
    let mut rhs_entries = Vec::new();
    let mut bound_entries: Vec<(usize, &str, Option<f64>)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') {
            let head = raw.split_whitespace().next().unwrap_or("");
            section = match head {
                "NAME" => Section::None,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => break,
                other => return Err(LpError::Parse { line, message: format!("unknown section {other}") }),
            };
            continue;
        }
        let tok: Vec<&str> = raw.split_whitespace().collect();
        let bad = || LpError::Parse { line, message: "malformed record".into() };
        match section {
            Section::Rows => {
                if tok.len() != 2 {
                    return Err(bad());
                }
                match tok[0] {
                    "N" => {}
                    "E" => n_rows = n_rows.max(index(tok[1], 'R', line)? + 1),
                    _ => return Err(LpError::Parse { line, message: "only E rows are supported".into() }),
                }
            }
            Section::Columns => {
                if tok.len() != 3 && tok.len() != 5 {
                    return Err(bad());
                }
                let j = index(tok[0], 'C', line)?;
                n_vars = n_vars.max(j + 1);
                for pair in tok[1..].chunks(2) {
                    let v = number(pair[1], line)?;
                    if pair[0] == "COST" {
                        objective.push((j, v));
                    } else {
                        triplets.push((index(pair[0], 'R', line)?, j, v));
                    }
                }
            }
            Section::Rhs => {
                if tok.len() != 3 && tok.len() != 5 {
                    return Err(bad());
                }
                for pair in tok[1..].chunks(2) {
                    rhs_entries.push((index(pair[0], 'R', line)?, number(pair[1], line)?));
                }
            }
            Section::Bounds => {
                let (j, v) = match tok.len() {
                    3 => (index(tok[2], 'C', line)?, None),
                    4 => (index(tok[2], 'C', line)?, Some(number(tok[3], line)?)),
                    _ => return Err(bad()),
                };
                n_vars = n_vars.max(j + 1);
                bound_entries.push((j, tok[0], v));
            }
            Section::None => return Err(bad()),
        }
    }

    let mut rhs = vec![0.0; n_rows];
    for (i, v) in rhs_entries {
        if i >= n_rows {
            return Err(LpError::RowOutOfRange { row: i, n_rows });
        }
        rhs[i] = v;
    }
    let mut bounds = vec![Bounds::NON_NEGATIVE; n_vars];
    for (j, kind, v) in bound_entries {
        let b = &mut bounds[j];
        match (kind, v) {
            ("FR", None) => *b = Bounds::FREE,
            ("MI", None) => b.lower = f64::NEG_INFINITY,
            ("PL", None) => b.upper = f64::INFINITY,
            ("UP", Some(v)) => b.upper = v,
            ("LO", Some(v)) => b.lower = v,
            ("FX", Some(v)) => *b = Bounds::fixed(v),
            _ => return Err(LpError::Parse { line: 0, message: format!("unsupported bound {kind}") }),
        }
    }
    LpInstance::new(n_vars, n_rows, &objective, &triplets, rhs, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_instance() {
        let lp = LpInstance::new(
            4,
            2,
            &[(0, 1.5), (3, -0.1)],
            &[(0, 0, 1.0), (0, 1, -2.0), (1, 2, 1e-7), (1, 3, 3.0)],
            vec![1.0, 0.0],
            vec![Bounds::new(-1.0, 2.0), Bounds::FREE, Bounds::new(f64::NEG_INFINITY, 4.0), Bounds::fixed(0.3)],
        )
        .unwrap();
        let text = write_mps(&lp, "T");
        let back = read_mps(&text).unwrap();
        assert_eq!(back, lp);
    }

    #[test]
    fn rejects_unknown_row_type() {
        let text = "NAME X\nROWS\n N  COST\n L  R0\nENDATA\n";
        assert!(matches!(read_mps(text), Err(LpError::Parse { line: 4, .. })));
    }
}
