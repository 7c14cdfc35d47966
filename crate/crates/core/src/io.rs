//! Text file formats.
//!
//! - Edge list: `a<TAB>b<TAB>weight` per undirected edge, 0-indexed, `#`
//!   comments. Writers emit a `# vertices: N` comment so isolated trailing
//!   vertices survive a round trip; weights use the shortest exact decimal
//!   form, so a write/read cycle is bit-exact.
//! - Point cloud: headerless numeric CSV, one point per row.
//! - Signals: CSV with a header of column labels, one row per vertex.
//! - Matrices: CSV with a leading label column; `+∞` is written as `inf`.

use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::{DistanceMatrix, EmbeddingMatrix};

const VERTEX_HEADER: &str = "# vertices:";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("'{}' is not a number", field.trim())))
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{VERTEX_HEADER} {}", g.n())?;
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", e.a, e.b, e.weight)?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_vertex: Option<usize> = None;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(VERTEX_HEADER) {
            let n = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, "vertex count is not an integer"))?;
            declared = Some(n);
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let vertex = |s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| parse_err(lineno, format!("'{}' is not a vertex index", s.trim())))
        };
        let (a, b) = (vertex(fields[0])?, vertex(fields[1])?);
        let w = parse_f64(fields[2], lineno)?;
        if !(w.is_finite() && w >= 0.0) {
            return Err(parse_err(lineno, format!("invalid weight {w}")));
        }
        if a == b {
            return Err(parse_err(lineno, format!("self-loop at vertex {a}")));
        }
        max_vertex = Some(max_vertex.map_or(a.max(b), |m| m.max(a).max(b)));
        edges.push((a, b, w));
    }
    let n = match (declared, max_vertex) {
        (Some(n), Some(m)) if m >= n => {
            return Err(parse_err(
                0,
                format!("vertex {m} exceeds declared count {n}"),
            ))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(parse_err(0, "edge list is empty")),
    };
    Graph::from_edges(n, edges)
}

/// Headerless numeric CSV, one row per point.
pub fn read_points_csv<R: BufRead>(input: R) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_f64(f, lineno))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    lineno,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "point file is empty"));
    }
    let d = rows[0].len();
    Ok(Array2::from_shape_vec((rows.len(), d), rows.concat()).expect("rectangular rows"))
}

pub fn write_points_csv<W: Write>(points: ArrayView2<f64>, mut out: W) -> Result<()> {
    for row in points.rows() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Signal CSV: header of labels, then one row per vertex. Returns the labels
/// and the raw `n × m` values.
pub fn read_signals_csv<R: BufRead>(input: R) -> Result<(Vec<String>, Array2<f64>)> {
    let mut lines = input.lines().enumerate();
    let labels: Vec<String> = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line.split(',').map(|s| s.trim().to_string()).collect();
                }
            }
            None => return Err(parse_err(0, "signal file is empty")),
        }
    };
    let m = labels.len();
    let mut data = Vec::new();
    let mut n = 0;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_f64(f, lineno))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != m {
            return Err(parse_err(
                lineno,
                format!("expected {m} columns, found {}", row.len()),
            ));
        }
        data.extend(row);
        n += 1;
    }
    if n == 0 {
        return Err(parse_err(0, "signal file has no data rows"));
    }
    Ok((
        labels,
        Array2::from_shape_vec((n, m), data).expect("rectangular rows"),
    ))
}

pub fn write_signals_csv<W: Write>(
    labels: &[String],
    values: ArrayView2<f64>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "{}", labels.join(","))?;
    write_points_csv(values, out)
}

fn write_labeled_rows<W: Write>(
    header: &[String],
    labels: &[String],
    values: ArrayView2<f64>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "label,{}", header.join(","))?;
    for (label, row) in labels.iter().zip(values.rows()) {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{label},{}", fields.join(","))?;
    }
    Ok(())
}

/// `m × m` distances with a label column and header; `+∞` prints as `inf`.
pub fn write_distance_csv<W: Write>(d: &DistanceMatrix, out: W) -> Result<()> {
    write_labeled_rows(d.labels(), d.labels(), d.values(), out)
}

pub fn read_distance_csv<R: BufRead>(input: R) -> Result<DistanceMatrix> {
    let (header, labels, values) = read_labeled_rows(input)?;
    if header != labels {
        return Err(parse_err(1, "row labels do not match the header"));
    }
    DistanceMatrix::new(values, labels)
}

/// One row per signal: its label followed by the `n` embedding coordinates.
pub fn write_embedding_csv<W: Write>(e: &EmbeddingMatrix, out: W) -> Result<()> {
    let header: Vec<String> = (0..e.rows().ncols()).map(|v| v.to_string()).collect();
    write_labeled_rows(&header, e.labels(), e.rows(), out)
}

fn read_labeled_rows<R: BufRead>(input: R) -> Result<(Vec<String>, Vec<String>, Array2<f64>)> {
    let mut lines = input.lines();
    let header: Vec<String> = match lines.next() {
        Some(line) => line?.split(',').skip(1).map(str::to_string).collect(),
        None => return Err(parse_err(0, "matrix file is empty")),
    };
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let mut fields = line.split(',');
        labels.push(fields.next().unwrap_or_default().to_string());
        let row = fields
            .map(|f| parse_f64(f, lineno))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(parse_err(
                lineno,
                format!("expected {} values, found {}", header.len(), row.len()),
            ));
        }
        data.extend(row);
    }
    let values =
        Array2::from_shape_vec((labels.len(), header.len()), data).expect("rectangular rows");
    Ok((header, labels, values))
}
