//! Multiscale partitions of the quadrature node set.
//!
//! Level `j` covers the manifold by disjoint cells of diameter at most
//! `b * a^j`, each owning its evaluation center. Cells are unions of
//! quadrature nodes, so measures, diameters and coverage are all checkable
//! exactly. Construction is deterministic: farthest-point sampling from node
//! 0 picks a maximal `(b a^j / 2)`-separated center set, nodes attach to the
//! nearest center, ties to the lowest center index; the separation radius
//! plus nearest assignment force the diameter bound.

use crate::spectral::SpectralModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Cell diameter must stay below `b * a^j`.
    Diameter,
    /// Fine-scale measure floor `μ(E) >= c0 (b a^j)^n` for `b a^j < delta0`.
    MeasureFine,
    /// Coarse-scale measure floor `μ(E) >= c_floor` for `b a^j >= delta0`.
    MeasureCoarse,
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("scale b*a^j = {scale} at level {j} is below a quarter of the grid resolution {resolution}")]
    ScaleUnresolved { j: i32, scale: f64, resolution: f64 },
    #[error("cell ({j}, {k}) violates {constraint:?}: value {value}, bound {bound}")]
    ConstraintViolation { j: i32, k: usize, constraint: Constraint, value: f64, bound: f64 },
    #[error("bad partition parameters: {0}")]
    BadParams(String),
}

/// One cell `E_{j,k}`: member node indices, the selected center (always a
/// member), total quadrature measure and exact diameter.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub center: usize,
    pub members: Vec<usize>,
    pub measure: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionLevel {
    pub j: i32,
    #[serde(skip)]
    pub scale: f64,
    pub cells: Vec<Cell>,
}

/// Scale/floor parameters of a multiscale partition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PartitionParams {
    pub a: f64,
    pub b: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub c0: f64,
    pub delta0: f64,
    pub c_floor: f64,
}

#[derive(Debug, Clone)]
pub struct MultiscalePartition {
    pub params: PartitionParams,
    /// Ascending in `j`.
    pub levels: Vec<PartitionLevel>,
}

impl MultiscalePartition {
    pub fn a(&self) -> f64 {
        self.params.a
    }

    pub fn b(&self) -> f64 {
        self.params.b
    }

    pub fn total_cells(&self) -> usize {
        self.levels.iter().map(|l| l.cells.len()).sum()
    }

    /// Export document: `{a, b, levels: [{j, cells: [...]}]}`, stable order.
    pub fn export(&self) -> PartitionExport<'_> {
        PartitionExport { a: self.params.a, b: self.params.b, levels: &self.levels }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("partition export serializes")
    }
}

#[derive(Serialize)]
pub struct PartitionExport<'a> {
    pub a: f64,
    pub b: f64,
    pub levels: &'a [PartitionLevel],
}

/// Build the level-`j` partition by farthest-point sampling.
pub fn build_level(
    model: &SpectralModel,
    a: f64,
    j: i32,
    b: f64,
) -> Result<PartitionLevel, PartitionError> {
    if b.is_nan() || b <= 0.0 || b >= 1.0 {
        return Err(PartitionError::BadParams(format!("b must be in (0,1), got {b}")));
    }
    if a.is_nan() || a <= 1.0 {
        return Err(PartitionError::BadParams(format!("a must exceed 1, got {a}")));
    }
    let scale = b * a.powi(j);
    let resolution = model.min_node_spacing();
    if scale < resolution / 4.0 {
        return Err(PartitionError::ScaleUnresolved { j, scale, resolution });
    }
    let n = model.node_count();
    let separation = scale / 2.0;

    // Maximal separated set: greedy farthest point from node 0; ties at the
    // argmax resolve to the lowest node index.
    let mut centers = vec![0usize];
    let mut min_dist: Vec<f64> = (0..n).map(|m| model.distance(0, m)).collect();
    loop {
        let mut best = 0usize;
        let mut best_d = -1.0;
        for (m, &d) in min_dist.iter().enumerate() {
            if d > best_d {
                best_d = d;
                best = m;
            }
        }
        if best_d < separation {
            break;
        }
        centers.push(best);
        for (m, md) in min_dist.iter_mut().enumerate() {
            let d = model.distance(best, m);
            if d < *md {
                *md = d;
            }
        }
    }

    // Nearest-center assignment, ties to the lowest center index.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for m in 0..n {
        let mut best_k = 0usize;
        let mut best_d = f64::INFINITY;
        for (k, &c) in centers.iter().enumerate() {
            let d = model.distance(c, m);
            if d < best_d {
                best_d = d;
                best_k = k;
            }
        }
        members[best_k].push(m);
    }

    let cells = centers
        .iter()
        .zip(members)
        .map(|(&center, members)| {
            let measure = members.iter().map(|&m| model.weights()[m]).sum();
            let mut diameter = 0.0_f64;
            for (idx, &m0) in members.iter().enumerate() {
                for &m1 in &members[idx + 1..] {
                    diameter = diameter.max(model.distance(m0, m1));
                }
            }
            Cell { center, members, measure, diameter }
        })
        .collect();

    Ok(PartitionLevel { j, scale, cells })
}

fn check_cell(
    level: &PartitionLevel,
    k: usize,
    dim: usize,
    params: &PartitionParams,
) -> Result<(), PartitionError> {
    let cell = &level.cells[k];
    let scale = level.scale;
    if cell.diameter > scale * (1.0 + 1e-12) {
        return Err(PartitionError::ConstraintViolation {
            j: level.j,
            k,
            constraint: Constraint::Diameter,
            value: cell.diameter,
            bound: scale,
        });
    }
    if scale < params.delta0 {
        let bound = params.c0 * scale.powi(dim as i32);
        if cell.measure < bound {
            return Err(PartitionError::ConstraintViolation {
                j: level.j,
                k,
                constraint: Constraint::MeasureFine,
                value: cell.measure,
                bound,
            });
        }
    } else if cell.measure < params.c_floor {
        return Err(PartitionError::ConstraintViolation {
            j: level.j,
            k,
            constraint: Constraint::MeasureCoarse,
            value: cell.measure,
            bound: params.c_floor,
        });
    }
    Ok(())
}

/// Build every level in `[j_min, j_max]` and validate the diameter and both
/// measure constraints on every cell.
pub fn build_multiscale(
    model: &SpectralModel,
    params: &PartitionParams,
) -> Result<MultiscalePartition, PartitionError> {
    if params.j_min > params.j_max {
        return Err(PartitionError::BadParams(format!(
            "empty level range [{}, {}]",
            params.j_min, params.j_max
        )));
    }
    let mut levels = Vec::with_capacity((params.j_max - params.j_min + 1) as usize);
    for j in params.j_min..=params.j_max {
        let level = build_level(model, params.a, j, params.b)?;
        for k in 0..level.cells.len() {
            check_cell(&level, k, model.dim(), params)?;
        }
        levels.push(level);
    }
    Ok(MultiscalePartition { params: *params, levels })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub j: i32,
    pub scale: f64,
    pub cell_count: usize,
    /// max over cells of diameter / scale (must stay <= 1).
    pub worst_diameter_ratio: f64,
    /// min over cells of measure / applicable floor (must stay >= 1).
    pub worst_measure_ratio: f64,
    /// Which measure floor applied: `fine` below delta0, `coarse` at or above.
    pub measure_branch: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub levels: Vec<LevelReport>,
    pub diamleq_pass: bool,
    pub measgeq_pass: bool,
    pub measgeq2_pass: bool,
    pub pass: bool,
}

/// Recheck all constraints on an existing partition and summarize the
/// attained ratios per level.
pub fn validate(model: &SpectralModel, partition: &MultiscalePartition) -> ValidationReport {
    let params = &partition.params;
    let dim = model.dim() as i32;
    let mut levels = Vec::with_capacity(partition.levels.len());
    let mut diam_ok = true;
    let mut fine_ok = true;
    let mut coarse_ok = true;
    for level in &partition.levels {
        let fine = level.scale < params.delta0;
        let floor = if fine { params.c0 * level.scale.powi(dim) } else { params.c_floor };
        let mut worst_diam = 0.0_f64;
        let mut worst_measure = f64::INFINITY;
        for cell in &level.cells {
            worst_diam = worst_diam.max(cell.diameter / level.scale);
            worst_measure = worst_measure.min(cell.measure / floor);
        }
        if worst_diam > 1.0 + 1e-12 {
            diam_ok = false;
        }
        if worst_measure < 1.0 {
            if fine {
                fine_ok = false;
            } else {
                coarse_ok = false;
            }
        }
        levels.push(LevelReport {
            j: level.j,
            scale: level.scale,
            cell_count: level.cells.len(),
            worst_diameter_ratio: worst_diam,
            worst_measure_ratio: worst_measure,
            measure_branch: if fine { "fine" } else { "coarse" },
        });
    }
    ValidationReport {
        levels,
        diamleq_pass: diam_ok,
        measgeq_pass: fine_ok,
        measgeq2_pass: coarse_ok,
        pass: diam_ok && fine_ok && coarse_ok,
    }
}

/// Default level range: every scale the grid resolves whose atoms are
/// numerically nonzero on the spectrum (`max_i f(a^{2j} λ_i) >= 1e-10`).
pub fn default_j_range(
    model: &SpectralModel,
    spec: &crate::filters::FilterSpec,
    b: f64,
) -> Result<(i32, i32), PartitionError> {
    let a = spec.a();
    let max_f = |j: i32| -> f64 {
        let t2 = a.powi(2 * j);
        model
            .eigenvalues()
            .iter()
            .map(|&lam| spec.eval_f(t2 * lam).abs())
            .fold(0.0, f64::max)
    };
    let alive = |j: i32| max_f(j) >= 1e-10;
    if !alive(0) {
        return Err(PartitionError::BadParams("filter vanishes on the whole spectrum".into()));
    }
    let resolution = model.min_node_spacing();
    let resolved = |j: i32| b * a.powi(j) >= resolution / 4.0;
    let mut j_min = 0;
    while j_min > -200 && alive(j_min - 1) && resolved(j_min - 1) {
        j_min -= 1;
    }
    let mut j_max = 0;
    while j_max < 200 && alive(j_max + 1) {
        j_max += 1;
    }
    if !resolved(j_min) {
        return Err(PartitionError::ScaleUnresolved {
            j: j_min,
            scale: b * a.powi(j_min),
            resolution,
        });
    }
    Ok((j_min, j_max))
}
