//! SDPA sparse (`.dat-s`) writer and reader.
//!
//! SDPA solves `min c·x  s.t.  Σ F_k x_k - F_0 ⪰ 0`. A problem
//! `max b·y + b0  s.t.  G_0 + Σ y_k G_k ⪰ 0` is written with `c = -b`,
//! `F_0 = -G_0` and `F_k = G_k`. The constant `b0`, the sign flip and the
//! basis labels travel in `*` comment lines so files read back unchanged.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use momentpick_core::sdp::{CellEntry, Objective, SdpProblem};

#[derive(Debug, thiserror::Error)]
pub enum SdpaError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sdpa(problem: &SdpProblem, mut out: impl Write) -> io::Result<()> {
    let mut s = String::new();
    let n = problem.matrix_size();
    let v = problem.num_vars();
    writeln!(s, "* momentpick moment SDP: maximize b.y + b0 subject to G0 + sum_k y_k G_k >= 0").unwrap();
    writeln!(s, "* written as SDPA with c = -b, F0 = -G0, Fk = Gk").unwrap();
    writeln!(s, "* objective-sign -1").unwrap();
    writeln!(s, "* objective-constant {}", num(problem.objective().constant)).unwrap();
    for (i, label) in problem.labels().iter().enumerate() {
        writeln!(s, "* label {} {label}", i + 1).unwrap();
    }
    writeln!(s, "{v}").unwrap();
    writeln!(s, "1").unwrap();
    writeln!(s, "{n}").unwrap();
    let c: Vec<String> = problem.objective().coefficients.iter().map(|&b| num(-b)).collect();
    writeln!(s, "{}", c.join(" ")).unwrap();
    let mut by_var: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); v];
    for ((i, j), e) in problem.positions().zip(problem.cells()) {
        if e.constant != 0.0 {
            writeln!(s, "0 1 {} {} {}", i + 1, j + 1, num(-e.constant)).unwrap();
        }
        if let Some((k, coeff)) = e.var {
            by_var[k].push((i, j, coeff));
        }
    }
    for (k, entries) in by_var.iter().enumerate() {
        for &(i, j, coeff) in entries {
            writeln!(s, "{} 1 {} {} {}", k + 1, i + 1, j + 1, num(coeff)).unwrap();
        }
    }
    out.write_all(s.as_bytes())
}

/// Reads a single-block file whose matrices give each cell at most one
/// variable, the shape [`write_sdpa`] produces.
pub fn read_sdpa(input: impl BufRead) -> Result<SdpProblem, SdpaError> {
    let mut constant = 0.0;
    let mut sign = -1.0;
    let mut labels: Vec<(usize, String)> = Vec::new();
    let mut header: Vec<usize> = Vec::new();
    let mut costs: Option<Vec<f64>> = None;
    let mut cells: Vec<CellEntry> = Vec::new();
    let mut n = 0;

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let err = |message: String| SdpaError::Parse { line: lineno, message };
        let t = line.trim();
        if let Some(comment) = t.strip_prefix('*').or_else(|| t.strip_prefix('"')) {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("objective-constant ") {
                constant = rest.trim().parse().map_err(|_| err(format!("bad objective constant {rest:?}")))?;
            } else if let Some(rest) = comment.strip_prefix("objective-sign ") {
                sign = rest.trim().parse().map_err(|_| err(format!("bad objective sign {rest:?}")))?;
            } else if let Some(rest) = comment.strip_prefix("label ") {
                let (i, label) = rest.split_once(' ').unwrap_or((rest, ""));
                let i: usize = i.parse().map_err(|_| err(format!("bad label index {i:?}")))?;
                labels.push((i, label.to_string()));
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t
            .split(|c: char| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')'))
            .filter(|f| !f.is_empty())
            .collect();
        if header.len() < 3 {
            let value: usize = fields
                .first()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| err(format!("expected an integer, found {t:?}")))?;
            header.push(value);
            if header.len() == 2 && value != 1 {
                return Err(err(format!("only one block is supported, file has {value}")));
            }
            if header.len() == 3 {
                n = value;
                cells = vec![CellEntry::fixed(0.0); n * (n + 1) / 2];
            }
            continue;
        }
        let m = header[0];
        if costs.is_none() {
            let c = fields
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| err(format!("bad cost {f:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if c.len() != m {
                return Err(err(format!("expected {m} costs, found {}", c.len())));
            }
            costs = Some(c);
            continue;
        }
        if fields.len() != 5 {
            return Err(err(format!("expected 'matno blkno i j value', found {t:?}")));
        }
        let ints = fields[..4]
            .iter()
            .map(|f| f.parse::<usize>().map_err(|_| err(format!("bad index {f:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let value: f64 = fields[4].parse().map_err(|_| err(format!("bad value {:?}", fields[4])))?;
        let (mat, block, i, j) = (ints[0], ints[1], ints[2], ints[3]);
        if block != 1 || mat > m || i == 0 || j == 0 || i > n || j > n {
            return Err(err(format!("entry {t:?} out of range")));
        }
        let (i, j) = if i <= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
        let cell = &mut cells[i * n - i * (i + 1) / 2 + j];
        if mat == 0 {
            cell.constant = -value;
        } else {
            match cell.var {
                None => cell.var = Some((mat - 1, value)),
                Some(_) => return Err(err(format!("cell ({}, {}) carries two variables", i + 1, j + 1))),
            }
        }
    }
    let end = |message: &str| SdpaError::Parse { line: 0, message: message.into() };
    if header.len() < 3 {
        return Err(end("truncated header"));
    }
    let costs = costs.ok_or_else(|| end("missing cost vector"))?;
    labels.sort();
    let labels: Vec<String> = labels.into_iter().map(|(_, l)| l).collect();
    let objective = Objective { constant, coefficients: costs.iter().map(|c| sign * c).collect() };
    SdpProblem::from_parts(n, header[0], cells, objective, labels).map_err(|e| end(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smallest() -> SdpProblem {
        let cells = vec![CellEntry::fixed(1.0), CellEntry::variable(0), CellEntry::fixed(1.0)];
        let obj = Objective { constant: 0.0, coefficients: vec![1.0] };
        SdpProblem::from_parts(2, 1, cells, obj, vec!["1".into(), "A0.0".into()]).unwrap()
    }

    #[test]
    fn smallest_lmi_layout() {
        let mut buf = Vec::new();
        write_sdpa(&smallest(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(
            body,
            [
                "1",
                "1",
                "2",
                "-1.0000000000000000e0",
                "0 1 1 1 -1.0000000000000000e0",
                "0 1 2 2 -1.0000000000000000e0",
                "1 1 1 2 1.0000000000000000e0",
            ]
        );
    }

    #[test]
    fn round_trip() {
        let p = smallest();
        let mut buf = Vec::new();
        write_sdpa(&p, &mut buf).unwrap();
        assert_eq!(read_sdpa(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "1\n1\n2\n1.0\n0 1 1 x 1.0\n";
        match read_sdpa(text.as_bytes()) {
            Err(SdpaError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        assert!(read_sdpa("1\n2\n2\n".as_bytes()).is_err());
    }

    #[test]
    fn plain_sdpa_without_comments() {
        let text = "\"a comment\"\n1 =mdim\n1\n2\n{1.0}\n0 1 1 1 -1\n0 1 2 2 -1\n1 1 2 1 1\n";
        let p = read_sdpa(text.as_bytes()).unwrap();
        assert_eq!(p.cell(0, 1), CellEntry::variable(0));
        assert_eq!(p.objective().coefficients, [-1.0]);
    }
}
