//! Mesh eigensystem backend, loaded from a `MESHSPEC v1` text file.
//!
//! Format, line oriented, all floats decimal and locale independent:
//!
//! ```text
//! MESHSPEC v1 n=<dim> vol=<float> N=<eig count> M=<node count>
//! <w_m> [x y z]          M lines: lumped-mass weight, optional coords
//! <lambda_i>             N lines, ascending, lambda_0 ~ 0
//! <N*M eigenvector entries, row-major, any whitespace layout>
//! EDGES                  optional section
//! <m> <m'> <length>      one edge per line
//! ```
//!
//! Instead of `EDGES`, a `DIST` section with `M*M` row-major entries may
//! supply the geodesic distances directly. Graph mode runs Dijkstra over the
//! weighted edge list; file mode uses the supplied matrix.

use super::{Geometry, SpectralError, SpectralModel};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};
use std::path::Path;

/// How `load_mesh_model` obtains geodesic distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Shortest paths over the weighted `EDGES` graph.
    Graph,
    /// Distance matrix from the `DIST` section.
    File,
}

/// Parsed contents of a mesh eigen-file, kept verbatim for re-serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshEigenFile {
    pub dim: usize,
    pub volume: f64,
    pub weights: Vec<f64>,
    /// Optional embedding coordinates per node (all rows the same length).
    pub coords: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Row-major `N x M`.
    pub eigvecs: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
    pub dist_matrix: Option<Vec<f64>>,
}

fn bad(line: usize, message: impl Into<String>) -> SpectralError {
    SpectralError::MeshFormat { line, message: message.into() }
}

fn parse_kv(token: &str, key: &str, line: usize) -> Result<String, SpectralError> {
    token
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .map(str::to_owned)
        .ok_or_else(|| bad(line, format!("expected `{key}=<value>`, got `{token}`")))
}

impl MeshEigenFile {
    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn n_eig(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn parse(reader: impl BufRead) -> Result<Self, SpectralError> {
        // (line number, token) stream over non-empty lines.
        let mut tokens: Vec<(usize, String)> = Vec::new();
        let mut line_spans: Vec<(usize, usize)> = Vec::new(); // token range per line
        for (ln, line) in reader.lines().enumerate() {
            let line = line?;
            let start = tokens.len();
            for tok in line.split_whitespace() {
                tokens.push((ln + 1, tok.to_string()));
            }
            if tokens.len() > start {
                line_spans.push((start, tokens.len()));
            }
        }
        if line_spans.is_empty() {
            return Err(bad(0, "empty file"));
        }

        // Header.
        let (h_start, h_end) = line_spans[0];
        let header: Vec<&str> = tokens[h_start..h_end].iter().map(|(_, t)| t.as_str()).collect();
        let h_line = tokens[h_start].0;
        if header.len() != 6 || header[0] != "MESHSPEC" || header[1] != "v1" {
            return Err(bad(h_line, "header must be `MESHSPEC v1 n=.. vol=.. N=.. M=..`"));
        }
        let dim: usize = parse_kv(header[2], "n", h_line)?
            .parse()
            .map_err(|_| bad(h_line, "bad n"))?;
        let volume: f64 = parse_kv(header[3], "vol", h_line)?
            .parse()
            .map_err(|_| bad(h_line, "bad vol"))?;
        let n_eig: usize = parse_kv(header[4], "N", h_line)?
            .parse()
            .map_err(|_| bad(h_line, "bad N"))?;
        let node_count: usize = parse_kv(header[5], "M", h_line)?
            .parse()
            .map_err(|_| bad(h_line, "bad M"))?;
        if n_eig == 0 || node_count == 0 {
            return Err(bad(h_line, "N and M must be positive"));
        }
        if n_eig > node_count {
            return Err(bad(h_line, "more eigenvectors than nodes"));
        }

        // Node lines: weight plus 0..=3 coords, all rows the same width.
        let mut weights = Vec::with_capacity(node_count);
        let mut coords = Vec::with_capacity(node_count);
        let mut coord_width: Option<usize> = None;
        for r in 0..node_count {
            let (s, e) = *line_spans
                .get(1 + r)
                .ok_or_else(|| bad(0, "unexpected end of file in node section"))?;
            let ln = tokens[s].0;
            let width = e - s - 1;
            if width > 3 {
                return Err(bad(ln, "node line has more than weight + 3 coords"));
            }
            if *coord_width.get_or_insert(width) != width {
                return Err(bad(ln, "inconsistent coordinate count across node lines"));
            }
            let w: f64 = tokens[s].1.parse().map_err(|_| bad(ln, "bad weight"))?;
            let mut c = Vec::with_capacity(width);
            for (_, t) in &tokens[s + 1..e] {
                c.push(t.parse().map_err(|_| bad(ln, "bad coordinate"))?);
            }
            weights.push(w);
            coords.push(c);
        }

        // Eigenvalue lines: exactly one value each.
        let mut eigenvalues = Vec::with_capacity(n_eig);
        for r in 0..n_eig {
            let (s, e) = *line_spans
                .get(1 + node_count + r)
                .ok_or_else(|| bad(0, "unexpected end of file in eigenvalue section"))?;
            let ln = tokens[s].0;
            if e - s != 1 {
                return Err(bad(ln, "eigenvalue lines carry exactly one value"));
            }
            eigenvalues.push(tokens[s].1.parse().map_err(|_| bad(ln, "bad eigenvalue"))?);
        }

        // Eigenvector entries: free layout.
        let mut cursor = line_spans[1 + node_count + n_eig - 1].1;
        let needed = n_eig * node_count;
        let mut eigvecs = Vec::with_capacity(needed);
        while eigvecs.len() < needed {
            let (ln, tok) = tokens
                .get(cursor)
                .ok_or_else(|| bad(0, "unexpected end of file in eigenvector section"))?;
            eigvecs.push(tok.parse().map_err(|_| bad(*ln, "bad eigenvector entry"))?);
            cursor += 1;
        }

        // Optional EDGES / DIST section.
        let mut edges = Vec::new();
        let mut dist_matrix = None;
        if cursor < tokens.len() {
            let (ln, keyword) = &tokens[cursor];
            cursor += 1;
            match keyword.as_str() {
                "EDGES" => {
                    while cursor < tokens.len() {
                        if tokens.len() - cursor < 3 {
                            return Err(bad(tokens[cursor].0, "truncated edge entry"));
                        }
                        let ln = tokens[cursor].0;
                        let a: usize =
                            tokens[cursor].1.parse().map_err(|_| bad(ln, "bad edge node"))?;
                        let b: usize =
                            tokens[cursor + 1].1.parse().map_err(|_| bad(ln, "bad edge node"))?;
                        let len: f64 =
                            tokens[cursor + 2].1.parse().map_err(|_| bad(ln, "bad edge length"))?;
                        if a >= node_count || b >= node_count {
                            return Err(bad(ln, "edge endpoint out of range"));
                        }
                        if len.is_nan() || len <= 0.0 {
                            return Err(bad(ln, "edge length must be positive"));
                        }
                        edges.push((a, b, len));
                        cursor += 3;
                    }
                }
                "DIST" => {
                    let mut d = Vec::with_capacity(node_count * node_count);
                    while d.len() < node_count * node_count {
                        let (ln, tok) = tokens
                            .get(cursor)
                            .ok_or_else(|| bad(0, "unexpected end of file in DIST section"))?;
                        d.push(tok.parse().map_err(|_| bad(*ln, "bad distance entry"))?);
                        cursor += 1;
                    }
                    if cursor != tokens.len() {
                        return Err(bad(tokens[cursor].0, "trailing data after DIST section"));
                    }
                    dist_matrix = Some(d);
                }
                other => return Err(bad(*ln, format!("unknown section `{other}`"))),
            }
        }

        Ok(Self { dim, volume, weights, coords, eigenvalues, eigvecs, edges, dist_matrix })
    }

    pub fn write(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "MESHSPEC v1 n={} vol={} N={} M={}",
            self.dim,
            self.volume,
            self.n_eig(),
            self.node_count()
        )?;
        for (w, c) in self.weights.iter().zip(&self.coords) {
            write!(out, "{w}")?;
            for x in c {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        for lambda in &self.eigenvalues {
            writeln!(out, "{lambda}")?;
        }
        let m = self.node_count();
        for row in self.eigvecs.chunks(m) {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        if !self.edges.is_empty() {
            writeln!(out, "EDGES")?;
            for (a, b, len) in &self.edges {
                writeln!(out, "{a} {b} {len}")?;
            }
        } else if let Some(d) = &self.dist_matrix {
            writeln!(out, "DIST")?;
            for row in d.chunks(m) {
                let line: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }
}

/// All-pairs shortest paths over the weighted edge list (Dijkstra per source).
fn graph_distances(
    node_count: usize,
    edges: &[(usize, usize, f64)],
) -> Result<Vec<f64>, SpectralError> {
    let mut adj = vec![Vec::new(); node_count];
    for &(a, b, len) in edges {
        adj[a].push((b, len));
        adj[b].push((a, len));
    }
    let mut dist = vec![f64::INFINITY; node_count * node_count];
    for src in 0..node_count {
        let row = &mut dist[src * node_count..(src + 1) * node_count];
        row[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((ordered_float(0.0), src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            let d = f64::from_bits(d);
            if d > row[u] {
                continue;
            }
            for &(v, len) in &adj[u] {
                let nd = d + len;
                if nd < row[v] {
                    row[v] = nd;
                    heap.push(Reverse((ordered_float(nd), v)));
                }
            }
        }
        if let Some(t) = row.iter().position(|d| d.is_infinite()) {
            return Err(SpectralError::DisconnectedGraph { from: src, to: t });
        }
    }
    Ok(dist)
}

/// Nonnegative finite floats order correctly as raw bit patterns.
fn ordered_float(x: f64) -> u64 {
    x.to_bits()
}

/// Build a [`SpectralModel`] from parsed mesh data, validating the shared
/// eigensystem invariants.
pub fn model_from_mesh(
    file: MeshEigenFile,
    mode: DistanceMode,
) -> Result<SpectralModel, SpectralError> {
    for (node, &w) in file.weights.iter().enumerate() {
        if w.is_nan() || w <= 0.0 {
            return Err(SpectralError::WeightNotPositive { node });
        }
    }
    let sum: f64 = file.weights.iter().sum();
    if (sum - file.volume).abs() > 1e-6 * file.volume.abs().max(1.0) {
        return Err(SpectralError::VolumeMismatch { header: file.volume, sum });
    }
    let lam = &file.eigenvalues;
    let scale = lam.last().unwrap().abs().max(1.0);
    if lam[0].abs() > 1e-8 * scale {
        return Err(SpectralError::FirstEigenvalueNonzero { lambda0: lam[0] });
    }
    for i in 1..lam.len() {
        if lam[i] < lam[i - 1] - 1e-12 * scale {
            return Err(SpectralError::NonAscendingEigenvalues { index: i });
        }
    }

    let node_count = file.node_count();
    let dist = match mode {
        DistanceMode::Graph => {
            if file.edges.is_empty() {
                return Err(SpectralError::MissingSection { needed: "EDGES" });
            }
            graph_distances(node_count, &file.edges)?
        }
        DistanceMode::File => {
            let d = file
                .dist_matrix
                .as_ref()
                .ok_or(SpectralError::MissingSection { needed: "DIST" })?;
            let scale = d.iter().fold(0.0_f64, |a, &x| a.max(x.abs())).max(1e-300);
            for i in 0..node_count {
                if d[i * node_count + i] != 0.0 {
                    return Err(SpectralError::BadDistanceMatrix);
                }
                for j in 0..node_count {
                    if (d[i * node_count + j] - d[j * node_count + i]).abs() > 1e-9 * scale {
                        return Err(SpectralError::BadDistanceMatrix);
                    }
                }
            }
            d.clone()
        }
    };

    let mut model = SpectralModel {
        dim: file.dim,
        volume: file.volume,
        eigenvalues: file.eigenvalues.clone(),
        weights: file.weights.clone(),
        eigvecs: file.eigvecs.clone(),
        geometry: Geometry::Mesh { file, dist },
        min_spacing: 0.0,
    };
    model.compute_min_spacing();
    Ok(model)
}

pub fn load_mesh_model(
    path: impl AsRef<Path>,
    mode: DistanceMode,
) -> Result<SpectralModel, SpectralError> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let file = MeshEigenFile::parse(reader)?;
    model_from_mesh(file, mode)
}

/// Re-serialize a mesh-backed model; identical to the source file up to
/// float formatting.
pub fn write_mesh_file(model: &SpectralModel, out: &mut impl Write) -> std::io::Result<()> {
    match &model.geometry {
        Geometry::Mesh { file, .. } => file.write(out),
        _ => Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "model is not mesh-backed",
        )),
    }
}
