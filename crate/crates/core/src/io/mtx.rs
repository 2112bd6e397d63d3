//! Matrix Market reader and writer for real symmetric matrices.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{StoragePolicy, SymmetricMatrix, DEFAULT_SYMMETRY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str, perr: &impl Fn(usize, String) -> Error) -> Result<Header> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(perr(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'".into()));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(perr(1, format!("unsupported format {other:?}"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" | "integer" => Field::Real,
        "pattern" if layout == Layout::Coordinate => Field::Pattern,
        other => return Err(perr(1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(perr(1, format!("unsupported symmetry {other:?}"))),
    };
    Ok(Header {
        layout,
        field,
        symmetry,
    })
}

fn number(tok: &str, line: usize, perr: &impl Fn(usize, String) -> Error) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, format!("cannot parse {tok:?} as a number")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

fn index(tok: &str, p: usize, line: usize, perr: &impl Fn(usize, String) -> Error) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| perr(line, format!("cannot parse {tok:?} as an index")))?;
    if i == 0 || i > p {
        return Err(perr(line, format!("index {i} outside 1..={p}")));
    }
    Ok(i - 1)
}

/// Reads a square real matrix. `symmetric` headers are expanded from the
/// stored triangle. `general` inputs are symmetrized: an entry stored on
/// both sides must agree to `1e-9 * max |A_ij|`, a one-sided entry is
/// averaged with its implicit zero mirror.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SymmetricMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, path)
}

pub(crate) fn parse_matrix_market(text: &str, path: &Path) -> Result<SymmetricMatrix> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => parse_header(l, &perr)?,
        None => return Err(perr(1, "empty file".into())),
    };
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or_else(|| perr(1, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(size_line, format!("cannot parse size {t:?}"))))
        .collect::<Result<_>>()?;
    let expected = if header.layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != expected {
        return Err(perr(size_line, format!("size line needs {expected} integers")));
    }
    let p = dims[0];
    if p == 0 || dims[1] != p {
        return Err(perr(size_line, format!("matrix is {} x {}, expected square and non-empty", dims[0], dims[1])));
    }

    let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut last_line = size_line;
    match header.layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut count = 0;
            for (ln, l) in body {
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                let want = if header.field == Field::Pattern { 2 } else { 3 };
                if toks.len() != want {
                    return Err(perr(ln, format!("expected {want} fields, found {}", toks.len())));
                }
                let i = index(toks[0], p, ln, &perr)?;
                let j = index(toks[1], p, ln, &perr)?;
                let v = if header.field == Field::Pattern { 1.0 } else { number(toks[2], ln, &perr)? };
                if header.symmetry == Symmetry::Symmetric && i < j {
                    return Err(perr(ln, format!("symmetric storage lists the lower triangle, found ({}, {})", i + 1, j + 1)));
                }
                *map.entry((i, j)).or_insert(0.0) += v;
                count += 1;
            }
            if count != nnz {
                return Err(perr(last_line, format!("header promises {nnz} entries, found {count}")));
            }
        }
        Layout::Array => {
            // Column-major; symmetric storage holds the lower triangle only.
            let mut slots = (0..p).flat_map(|j| {
                let start = if header.symmetry == Symmetry::Symmetric { j } else { 0 };
                (start..p).map(move |i| (i, j))
            });
            for (ln, l) in body {
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 1 {
                    return Err(perr(ln, format!("array format expects one value per line, found {}", toks.len())));
                }
                let (i, j) = slots.next().ok_or_else(|| perr(ln, "more values than the matrix holds".into()))?;
                let v = number(toks[0], ln, &perr)?;
                if v != 0.0 {
                    map.insert((i, j), v);
                }
            }
            if slots.next().is_some() {
                return Err(perr(last_line, "fewer values than the matrix holds".into()));
            }
        }
    }

    if header.symmetry == Symmetry::Symmetric {
        let mirrored: Vec<_> = map.iter().filter(|((i, j), _)| i != j).map(|(&(i, j), &v)| ((j, i), v)).collect();
        map.extend(mirrored);
        return Ok(SymmetricMatrix::from_symmetric_map(p, map, StoragePolicy::Auto));
    }

    let max_abs = map.values().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = DEFAULT_SYMMETRY_TOL * max_abs;
    let mut worst = (0.0f64, 0, 0);
    for (&(i, j), &v) in map.range(..) {
        if i < j {
            if let Some(&mirror) = map.get(&(j, i)) {
                let d = (v - mirror).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
    }
    if worst.0 > tol {
        return Err(Error::Asymmetric {
            max_deviation: worst.0,
            row: worst.1,
            col: worst.2,
            tolerance: tol,
        });
    }
    SymmetricMatrix::symmetric_part_of_triplets(p, map.into_iter().map(|((i, j), v)| (i, j, v)), StoragePolicy::Auto)
}

/// Writes the lower triangle in coordinate symmetric format. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_matrix_market(a: &SymmetricMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    let p = a.dim();
    let mut entries = Vec::new();
    for i in 0..p {
        a.for_each_in_row(i, |j, v| {
            if j <= i && v != 0.0 {
                entries.push((i, j, v));
            }
        });
    }
    let io = |e| Error::io(path, e);
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric").map_err(io)?;
    writeln!(out, "{p} {p} {}", entries.len()).map_err(io)?;
    for (i, j, v) in entries {
        writeln!(out, "{} {} {v:e}", i + 1, j + 1).map_err(io)?;
    }
    fs::write(path, out).map_err(io)
}
