//! Matrix Market coordinate files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrixCsr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Reads a real or integer coordinate file. Symmetric and skew-symmetric storage is
/// expanded; duplicates are summed in file order.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrixCsr> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_matrix_market(BufReader::new(file), path)
}

/// Parses Matrix Market text; `path` only labels errors.
pub fn parse_matrix_market(reader: impl BufRead, path: &Path) -> Result<SparseMatrixCsr> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (lineno, header) = match lines.next() {
        Some((k, l)) => (k, l?),
        None => return Err(err(1, "empty file".into())),
    };
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(err(lineno, format!("malformed header {header:?}")));
    }
    if tokens[1] != "matrix" {
        return Err(Error::Unsupported(format!("object {:?}", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Unsupported(format!("format {:?}", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::Unsupported(format!("field {other:?}"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::Unsupported(format!("symmetry {other:?}"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut seen = 0usize;
    let mut last_line = lineno;
    for (lineno, line) in lines {
        let line = line?;
        last_line = lineno;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((nrows, ncols, nnz)) = size else {
            if fields.len() != 3 {
                return Err(err(
                    lineno,
                    "expected size line \"rows cols entries\"".into(),
                ));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| err(lineno, format!("bad size {s:?}: {e}")))
            };
            let dims = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            if symmetry != Symmetry::General && dims.0 != dims.1 {
                return Err(err(
                    lineno,
                    "symmetric storage requires a square matrix".into(),
                ));
            }
            size = Some(dims);
            triplets.reserve(dims.2);
            continue;
        };
        if fields.len() != 3 {
            return Err(err(
                lineno,
                format!("expected \"row col value\", found {trimmed:?}"),
            ));
        }
        if seen == nnz {
            return Err(err(lineno, format!("more than the declared {nnz} entries")));
        }
        let index = |s: &str, bound: usize| -> Result<usize> {
            let k = s
                .parse::<usize>()
                .map_err(|e| err(lineno, format!("bad index {s:?}: {e}")))?;
            if k == 0 || k > bound {
                return Err(err(lineno, format!("index {k} out of range 1..={bound}")));
            }
            Ok(k - 1)
        };
        let r = index(fields[0], nrows)?;
        let c = index(fields[1], ncols)?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|e| err(lineno, format!("bad value {:?}: {e}", fields[2])))?;
        match symmetry {
            Symmetry::General => triplets.push((r, c, v)),
            Symmetry::Symmetric => {
                triplets.push((r, c, v));
                if r != c {
                    triplets.push((c, r, v));
                }
            }
            Symmetry::SkewSymmetric => {
                if r == c {
                    return Err(err(
                        lineno,
                        "diagonal entry in skew-symmetric storage".into(),
                    ));
                }
                triplets.push((r, c, v));
                triplets.push((c, r, -v));
            }
        }
        seen += 1;
    }
    let Some((nrows, ncols, nnz)) = size else {
        return Err(err(last_line, "missing size line".into()));
    };
    if seen != nnz {
        return Err(err(
            last_line,
            format!("declared {nnz} entries, found {seen}"),
        ));
    }
    SparseMatrixCsr::from_triplets(nrows, ncols, &triplets)
}

/// Writes `a` as a general real coordinate file with shortest round-trip values.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrixCsr) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_matrix_market_to(&mut out, a)?;
    out.flush()?;
    Ok(())
}

pub fn write_matrix_market_to(out: &mut impl Write, a: &SparseMatrixCsr) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for r in 0..a.nrows() {
        let (cols, vals) = a.row(r);
        for (c, v) in cols.iter().zip(vals) {
            writeln!(out, "{} {} {:e}", r + 1, c + 1, v)?;
        }
    }
    Ok(())
}
