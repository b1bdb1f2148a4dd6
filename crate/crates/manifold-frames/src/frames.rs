//! Frame atoms, the summation operator `S`, empirical frame bounds,
//! iterative inversion, and the exact multiplier pair `Q`, `Q^{-1}`.
//!
//! The bare atom at level `j`, cell `k` is the kernel row
//! `phi_{j,k}(y) = K_{a^j}(x_{j,k}, y)`, i.e. eigencoefficients
//! `f(a^{2j} λ_i) e_i(x_{j,k})`; the normalized atom carries an extra
//! `sqrt(μ(E_{j,k}))`. Analysis produces the bare-kernel coefficients
//! `s_{j,k} = <F, phi_{j,k}>`, synthesis weights them by the cell measures,
//! and `S = synthesize ∘ analyze`, which is symmetric positive semidefinite
//! on the mean-zero subspace and near the diagonal multiplier
//! `Q = H(sqrt(Δ))` for small `b`.

use crate::filters::{multiplier_h, FilterSpec, TERM_TOL};
use crate::partition::MultiscalePartition;
use crate::spectral::{SpectralError, SpectralFunction, SpectralModel};
use nalgebra::DMatrix;
use once_cell::sync::OnceCell;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

/// Largest mean-zero block size `empirical_frame_bounds` will assemble densely.
pub const DEFAULT_MATRIX_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("filter dilation {filter} does not match partition dilation {partition}")]
    DilationMismatch { filter: f64, partition: f64 },
    #[error("coefficient array shape does not match the partition")]
    ShapeMismatch,
    #[error("dense assembly of a {size}x{size} matrix exceeds the cap {cap}")]
    MatrixTooLarge { size: usize, cap: usize },
    #[error("iteration did not reach the tolerance within {iterations} steps")]
    NotConverged { iterations: usize },
    #[error("input is not mean-zero (|<G,1>| = {mean_abs})")]
    MeanNotZero { mean_abs: f64 },
    #[error("empirical lower frame bound {lower} is not positive")]
    DegenerateFrame { lower: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Ragged frame coefficients aligned with the partition levels; cell
/// measures are mirrored so sequence norms need no second lookup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientArray {
    pub levels: Vec<CoefficientLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientLevel {
    pub j: i32,
    pub values: Vec<f64>,
    pub measures: Vec<f64>,
}

impl CoefficientArray {
    pub fn zeros_like(frame: &FrameSystem) -> Self {
        let levels = frame
            .partition
            .levels
            .iter()
            .map(|l| CoefficientLevel {
                j: l.j,
                values: vec![0.0; l.cells.len()],
                measures: l.cells.iter().map(|c| c.measure).collect(),
            })
            .collect();
        Self { levels }
    }

    pub fn matches(&self, partition: &MultiscalePartition) -> bool {
        self.levels.len() == partition.levels.len()
            && self
                .levels
                .iter()
                .zip(&partition.levels)
                .all(|(c, l)| c.j == l.j && c.values.len() == l.cells.len())
    }

    pub fn scale(&mut self, alpha: f64) {
        for level in &mut self.levels {
            for v in &mut level.values {
                *v *= alpha;
            }
        }
    }

    /// JSON export, aligned with the partition export ordering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("coefficient export serializes")
    }

    /// CSV export: one `j,k,measure,value` row per cell, partition order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,measure,value\n");
        for level in &self.levels {
            for (k, (v, mu)) in level.values.iter().zip(&level.measures).enumerate() {
                out.push_str(&format!("{},{k},{mu},{v}\n", level.j));
            }
        }
        out
    }

    /// Sum of `μ(E_{j,k}) s_{j,k}^2` over all cells, the frame energy.
    pub fn weighted_energy(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.values.iter().zip(&l.measures).map(|(v, m)| m * v * v).sum::<f64>())
            .sum()
    }
}

/// Empirical frame bounds: extreme eigenvalues of `S` on the mean-zero band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Result of the damped Richardson inversion of `S`.
#[derive(Debug, Clone)]
pub struct Inversion {
    pub solution: SpectralFunction,
    pub iterations: usize,
    /// `||G - S F_k||_2` per step, starting at `||G||`.
    pub residuals: Vec<f64>,
}

/// Frame bounds report written by the CLI (one row per `b`).
#[derive(Debug, Clone, Serialize)]
pub struct FrameBoundsReport {
    #[serde(rename = "A_emp")]
    pub a_emp: f64,
    #[serde(rename = "B_emp")]
    pub b_emp: f64,
    #[serde(rename = "A_daub")]
    pub a_daub: f64,
    #[serde(rename = "B_daub")]
    pub b_daub: f64,
    pub b: f64,
    pub a: f64,
    pub j_range: (i32, i32),
}

/// Atoms of a multiscale partition under a fixed filter, with the operators
/// built from them. Immutable after construction.
pub struct FrameSystem {
    model: Arc<SpectralModel>,
    spec: FilterSpec,
    partition: MultiscalePartition,
    /// Per level: `f(a^{2j} λ_i)` for every eigenvalue.
    filter_values: Vec<Vec<f64>>,
    /// `H(sqrt(λ_i))`, zero on the constant mode.
    h_values: Vec<f64>,
    bounds: OnceCell<FrameBounds>,
    matrix_cap: usize,
}

/// Materialize the level filter values and multiplier symbols for a
/// partition/filter pair sharing the same dilation.
pub fn build_frame(
    model: &Arc<SpectralModel>,
    spec: FilterSpec,
    partition: MultiscalePartition,
) -> Result<FrameSystem, FrameError> {
    let pa = partition.params.a;
    if (pa - spec.a()).abs() > 1e-12 * spec.a() {
        return Err(FrameError::DilationMismatch { filter: spec.a(), partition: pa });
    }
    let filter_values = partition
        .levels
        .iter()
        .map(|level| {
            let t2 = spec.a().powi(2 * level.j);
            model.eigenvalues().iter().map(|&lam| spec.eval_f(t2 * lam)).collect()
        })
        .collect();
    let h_values = model
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &lam)| if i == 0 { 0.0 } else { multiplier_h(&spec, lam.sqrt(), TERM_TOL) })
        .collect();
    Ok(FrameSystem {
        model: Arc::clone(model),
        spec,
        partition,
        filter_values,
        h_values,
        bounds: OnceCell::new(),
        matrix_cap: DEFAULT_MATRIX_CAP,
    })
}

impl FrameSystem {
    pub fn model(&self) -> &Arc<SpectralModel> {
        &self.model
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn partition(&self) -> &MultiscalePartition {
        &self.partition
    }

    pub fn with_matrix_cap(mut self, cap: usize) -> Self {
        self.matrix_cap = cap;
        self
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.partition.params.j_min, self.partition.params.j_max)
    }

    /// Eigencoefficient vector of the bare atom `phi_{j,k}`.
    pub fn atom_coeffs(&self, level: usize, k: usize) -> SpectralFunction {
        let center = self.partition.levels[level].cells[k].center;
        let coeffs = self.filter_values[level]
            .iter()
            .enumerate()
            .map(|(i, f)| f * self.model.eigvec(i, center))
            .collect();
        SpectralFunction::new(coeffs)
    }

    /// Largest `|<1, phi_{j,k}>|` over all atoms; zero because `f(0) = 0`.
    pub fn atom_mean_sup(&self) -> f64 {
        let sqrt_vol = self.model.volume().sqrt();
        let mut sup = 0.0_f64;
        for (level, fv) in self.filter_values.iter().enumerate() {
            for cell in &self.partition.levels[level].cells {
                sup = sup.max((fv[0] * self.model.eigvec(0, cell.center) * sqrt_vol).abs());
            }
        }
        sup
    }

    /// Frame analysis: `s_{j,k} = <F, phi_{j,k}> = Σ_i c_i f(a^{2j} λ_i) e_i(x_{j,k})`.
    pub fn analyze(&self, f: &SpectralFunction) -> Result<CoefficientArray, FrameError> {
        let n = self.model.n_eig();
        if f.len() != n {
            return Err(FrameError::ShapeMismatch);
        }
        let mut out = CoefficientArray::zeros_like(self);
        let mut weighted = vec![0.0; n];
        for (level, fv) in self.filter_values.iter().enumerate() {
            for (w, (c, g)) in weighted.iter_mut().zip(f.coeffs().iter().zip(fv)) {
                *w = c * g;
            }
            let cells = &self.partition.levels[level].cells;
            for (k, cell) in cells.iter().enumerate() {
                let center = cell.center;
                let mut s = 0.0;
                for (i, w) in weighted.iter().enumerate() {
                    s += w * self.model.eigvec(i, center);
                }
                out.levels[level].values[k] = s;
            }
        }
        Ok(out)
    }

    /// Frame synthesis: `Σ_{j,k} μ(E_{j,k}) r_{j,k} phi_{j,k}` in the eigenbasis.
    pub fn synthesize(&self, coeffs: &CoefficientArray) -> Result<SpectralFunction, FrameError> {
        if !coeffs.matches(&self.partition) {
            return Err(FrameError::ShapeMismatch);
        }
        let n = self.model.n_eig();
        let mut out = vec![0.0; n];
        let mut level_sum = vec![0.0; n];
        for (level, fv) in self.filter_values.iter().enumerate() {
            level_sum.iter_mut().for_each(|x| *x = 0.0);
            let cells = &self.partition.levels[level].cells;
            let values = &coeffs.levels[level].values;
            for (cell, &r) in cells.iter().zip(values) {
                let weight = cell.measure * r;
                if weight == 0.0 {
                    continue;
                }
                for (i, ls) in level_sum.iter_mut().enumerate() {
                    *ls += weight * self.model.eigvec(i, cell.center);
                }
            }
            for ((o, ls), g) in out.iter_mut().zip(&level_sum).zip(fv) {
                *o += ls * g;
            }
        }
        Ok(SpectralFunction::new(out))
    }

    /// Summation operator `S F = Σ_{j,k} μ(E_{j,k}) <F, phi_{j,k}> phi_{j,k}`.
    pub fn apply_s(&self, f: &SpectralFunction) -> Result<SpectralFunction, FrameError> {
        self.synthesize(&self.analyze(f)?)
    }

    /// Dense assembly of `S` restricted to eigenfunctions `i >= 1`.
    fn assemble_s_matrix(&self) -> Result<DMatrix<f64>, FrameError> {
        let n = self.model.n_eig() - 1;
        if n > self.matrix_cap {
            return Err(FrameError::MatrixTooLarge { size: n, cap: self.matrix_cap });
        }
        let mut s = DMatrix::<f64>::zeros(n, n);
        let mut atom = vec![0.0; n];
        for (level, fv) in self.filter_values.iter().enumerate() {
            for cell in &self.partition.levels[level].cells {
                let center = cell.center;
                for (i, a) in atom.iter_mut().enumerate() {
                    *a = fv[i + 1] * self.model.eigvec(i + 1, center);
                }
                let mu = cell.measure;
                // Upper triangle only; mirrored below.
                for (row, &ar) in atom.iter().enumerate() {
                    if ar == 0.0 {
                        continue;
                    }
                    let w = mu * ar;
                    for (col, &ac) in atom.iter().enumerate().skip(row) {
                        s[(row, col)] += w * ac;
                    }
                }
            }
        }
        for row in 0..n {
            for col in 0..row {
                s[(row, col)] = s[(col, row)];
            }
        }
        Ok(s)
    }

    /// Extreme eigenvalues of the assembled `S` on the mean-zero band.
    pub fn empirical_frame_bounds(&self) -> Result<FrameBounds, FrameError> {
        if let Some(b) = self.bounds.get() {
            return Ok(*b);
        }
        let s = self.assemble_s_matrix()?;
        let eig = s.symmetric_eigen();
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for &lam in eig.eigenvalues.iter() {
            lower = lower.min(lam);
            upper = upper.max(lam);
        }
        let bounds = FrameBounds { lower, upper };
        let _ = self.bounds.set(bounds);
        Ok(bounds)
    }

    /// Operator distance `||Q - S||_2` on the mean-zero band (largest
    /// absolute eigenvalue of the symmetric difference).
    pub fn q_s_distance(&self) -> Result<f64, FrameError> {
        let mut d = self.assemble_s_matrix()?;
        let n = d.nrows();
        for i in 0..n {
            d[(i, i)] -= self.h_values[i + 1];
        }
        let eig = d.symmetric_eigen();
        Ok(eig.eigenvalues.iter().fold(0.0_f64, |acc, &lam| acc.max(lam.abs())))
    }

    fn require_mean_zero(&self, f: &SpectralFunction) -> Result<(), FrameError> {
        let mean_abs = f.coeffs()[0].abs() * self.model.volume().sqrt();
        if mean_abs > 1e-10 * f.norm() {
            return Err(FrameError::MeanNotZero { mean_abs });
        }
        Ok(())
    }

    /// Solve `S F = G` by damped Richardson iteration with the optimal step
    /// `τ = 2 / (A_emp + B_emp)`; converges at rate `(B - A) / (B + A)`.
    pub fn invert_s(
        &self,
        g: &SpectralFunction,
        tol: f64,
        max_iter: usize,
    ) -> Result<Inversion, FrameError> {
        if g.len() != self.model.n_eig() {
            return Err(FrameError::ShapeMismatch);
        }
        self.require_mean_zero(g)?;
        let bounds = self.empirical_frame_bounds()?;
        if bounds.lower <= 0.0 {
            return Err(FrameError::DegenerateFrame { lower: bounds.lower });
        }
        let tau = 2.0 / (bounds.lower + bounds.upper);
        let g_norm = g.norm();
        if g_norm == 0.0 {
            return Ok(Inversion {
                solution: SpectralFunction::zeros(g.len()),
                iterations: 0,
                residuals: vec![0.0],
            });
        }
        let mut x = SpectralFunction::zeros(g.len());
        let mut residual = g.clone();
        let mut residuals = vec![g_norm];
        for it in 1..=max_iter {
            x.axpy(tau, &residual);
            let sx = self.apply_s(&x)?;
            residual = g.clone();
            residual.axpy(-1.0, &sx);
            let r_norm = residual.norm();
            residuals.push(r_norm);
            if r_norm <= tol * g_norm {
                return Ok(Inversion { solution: x, iterations: it, residuals });
            }
        }
        Err(FrameError::NotConverged { iterations: max_iter })
    }

    /// `Q = H(sqrt(Δ))`: diagonal with symbol `H(sqrt(λ_i))`, zero on constants.
    pub fn apply_q(&self, f: &SpectralFunction) -> Result<SpectralFunction, FrameError> {
        if f.len() != self.model.n_eig() {
            return Err(FrameError::ShapeMismatch);
        }
        let coeffs = f.coeffs().iter().zip(&self.h_values).map(|(c, h)| c * h).collect();
        Ok(SpectralFunction::new(coeffs))
    }

    /// `Q^{-1} = G(sqrt(Δ))` on the mean-zero band.
    pub fn apply_q_inverse(&self, f: &SpectralFunction) -> Result<SpectralFunction, FrameError> {
        if f.len() != self.model.n_eig() {
            return Err(FrameError::ShapeMismatch);
        }
        self.require_mean_zero(f)?;
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.h_values)
            .map(|(c, h)| if *h == 0.0 { 0.0 } else { c / h })
            .collect();
        Ok(SpectralFunction::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{daubechies_bounds, FilterFamily};
    use crate::partition::{build_multiscale, PartitionParams};
    use crate::spectral::build_sphere_model;

    const A: f64 = 1.259_921_049_894_873_2;

    fn fixture(b: f64, j_min: i32, j_max: i32) -> FrameSystem {
        let model = Arc::new(build_sphere_model(8, 9, 17).unwrap());
        let spec = FilterSpec::new(FilterFamily::Exp, 1, A).unwrap();
        let params =
            PartitionParams { a: A, b, j_min, j_max, c0: 0.1, delta0: 1.0, c_floor: 0.1 };
        let partition = build_multiscale(&model, &params).unwrap();
        build_frame(&model, spec, partition).unwrap()
    }

    fn random_mean_zero(n: usize, seed: u64) -> SpectralFunction {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(99);
        let mut coeffs = vec![0.0; n];
        for c in coeffs.iter_mut().skip(1) {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            *c = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        SpectralFunction::new(coeffs)
    }

    #[test]
    fn atoms_have_zero_mean() {
        let frame = fixture(0.5, -8, 1);
        assert_eq!(frame.atom_mean_sup(), 0.0);
        for level in 0..frame.partition().levels.len() {
            assert_eq!(frame.atom_coeffs(level, 0).coeffs()[0], 0.0);
        }
    }

    #[test]
    fn atoms_reproduce_kernel_rows() {
        let frame = fixture(0.5, -8, 1);
        let model = frame.model();
        for (level, k) in [(0usize, 0usize), (3, 5), (5, 2), (7, 1), (9, 0)] {
            let lvl = &frame.partition().levels[level];
            let k = k.min(lvl.cells.len() - 1);
            let atom_grid = model.to_grid(&frame.atom_coeffs(level, k)).unwrap();
            let t = A.powi(lvl.j);
            let row = model.kernel_row(frame.spec(), t, lvl.cells[k].center);
            for (a, b) in atom_grid.values().iter().zip(row.values()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn atom_norm_matches_grid_quadrature() {
        let frame = fixture(0.5, -8, 1);
        let model = frame.model();
        let atom = frame.atom_coeffs(4, 0);
        let parseval: f64 = atom.coeffs().iter().map(|c| c * c).sum();
        let grid = model.to_grid(&atom).unwrap();
        let quad = model.inner(&grid, &grid);
        assert!((parseval - quad).abs() < 1e-8 * parseval.max(1e-30));
    }

    #[test]
    fn analyze_constant_is_zero_and_linear() {
        let frame = fixture(0.5, -8, 1);
        let n = frame.model().n_eig();
        let mut constant = SpectralFunction::zeros(n);
        constant.coeffs_mut()[0] = 3.0;
        let coeffs = frame.analyze(&constant).unwrap();
        for level in &coeffs.levels {
            assert!(level.values.iter().all(|&v| v == 0.0));
        }
        // Linearity: analyze(2F + G) = 2 analyze(F) + analyze(G).
        let f = random_mean_zero(n, 1);
        let g = random_mean_zero(n, 2);
        let mut combo = f.clone();
        combo.scale(2.0);
        combo.axpy(1.0, &g);
        let left = frame.analyze(&combo).unwrap();
        let cf = frame.analyze(&f).unwrap();
        let cg = frame.analyze(&g).unwrap();
        for (ll, (lf, lg)) in left.levels.iter().zip(cf.levels.iter().zip(&cg.levels)) {
            for ((l, f), g) in ll.values.iter().zip(&lf.values).zip(&lg.values) {
                assert!((l - (2.0 * f + g)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analyze_eigenfunction_closed_form() {
        let frame = fixture(0.5, -8, 1);
        let model = frame.model();
        let i = 7;
        let coeffs = frame.analyze(&SpectralFunction::basis(model.n_eig(), i)).unwrap();
        for (level, cl) in coeffs.levels.iter().enumerate() {
            let t2 = A.powi(2 * cl.j);
            let expect_f = frame.spec().eval_f(t2 * model.eigenvalue(i));
            for (k, &v) in cl.values.iter().enumerate() {
                let center = frame.partition().levels[level].cells[k].center;
                let want = expect_f * model.eigvec(i, center);
                assert!((v - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn synthesize_single_coefficient() {
        let frame = fixture(0.5, -8, 1);
        let mut r = CoefficientArray::zeros_like(&frame);
        r.levels[2].values[0] = 1.0;
        let out = frame.synthesize(&r).unwrap();
        let mu = frame.partition().levels[2].cells[0].measure;
        let atom = frame.atom_coeffs(2, 0);
        for (o, a) in out.coeffs().iter().zip(atom.coeffs()) {
            assert!((o - mu * a).abs() < 1e-14);
        }
        // All-zero coefficients synthesize to zero.
        let zero = frame.synthesize(&CoefficientArray::zeros_like(&frame)).unwrap();
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn adjoint_identity() {
        let frame = fixture(0.5, -8, 1);
        let n = frame.model().n_eig();
        let f = random_mean_zero(n, 3);
        let mut r = CoefficientArray::zeros_like(&frame);
        let mut state = 42u64;
        for level in &mut r.levels {
            for v in &mut level.values {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                *v = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            }
        }
        let lhs = frame.synthesize(&r).unwrap().dot(&f);
        let cf = frame.analyze(&f).unwrap();
        let rhs: f64 = r
            .levels
            .iter()
            .zip(&cf.levels)
            .map(|(lr, lf)| {
                lr.values
                    .iter()
                    .zip(&lr.measures)
                    .zip(&lf.values)
                    .map(|((r, mu), s)| mu * r * s)
                    .sum::<f64>()
            })
            .sum();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn coefficient_export_tracks_partition_order() {
        let frame = fixture(0.5, -6, 0);
        let coeffs = frame.analyze(&random_mean_zero(frame.model().n_eig(), 8)).unwrap();
        let csv = frame.partition().levels.iter().fold(1, |acc, l| acc + l.cells.len());
        assert_eq!(coeffs.to_csv().lines().count(), csv);
        let doc: serde_json::Value = serde_json::from_str(&coeffs.to_json()).unwrap();
        let levels = doc["levels"].as_array().unwrap();
        assert_eq!(levels.len(), frame.partition().levels.len());
        for (lv, pl) in levels.iter().zip(&frame.partition().levels) {
            assert_eq!(lv["j"].as_i64().unwrap(), pl.j as i64);
            assert_eq!(lv["values"].as_array().unwrap().len(), pl.cells.len());
        }
    }

    #[test]
    fn s_kills_constants_and_is_positive() {
        let frame = fixture(0.5, -8, 1);
        let n = frame.model().n_eig();
        let mut constant = SpectralFunction::zeros(n);
        constant.coeffs_mut()[0] = 1.0;
        let s1 = frame.apply_s(&constant).unwrap();
        assert_eq!(s1.norm(), 0.0);
        let f = random_mean_zero(n, 4);
        let sf = frame.apply_s(&f).unwrap();
        let energy = frame.analyze(&f).unwrap().weighted_energy();
        let quad = sf.dot(&f);
        assert!(quad >= 0.0);
        assert!((quad - energy).abs() < 1e-10 * energy);
    }

    #[test]
    fn s_is_symmetric() {
        let frame = fixture(0.5, -8, 1);
        let n = frame.model().n_eig();
        let f = random_mean_zero(n, 5);
        let g = random_mean_zero(n, 6);
        let sf = frame.apply_s(&f).unwrap();
        let sg = frame.apply_s(&g).unwrap();
        let defect = (sf.dot(&g) - f.dot(&sg)).abs();
        assert!(defect <= 1e-10 * f.norm() * g.norm());
    }

    #[test]
    fn rayleigh_quotients_sit_inside_empirical_bounds() {
        let frame = fixture(0.5, -8, 1);
        let bounds = frame.empirical_frame_bounds().unwrap();
        assert!(bounds.lower <= bounds.upper);
        let n = frame.model().n_eig();
        for seed in 0..20 {
            let f = random_mean_zero(n, 100 + seed);
            let q = frame.apply_s(&f).unwrap().dot(&f) / f.dot(&f);
            assert!(q >= bounds.lower - 1e-10 && q <= bounds.upper + 1e-10, "q = {q}");
        }
    }

    #[test]
    fn enlarging_the_level_range_never_lowers_the_bound() {
        let narrow = fixture(0.5, -6, 0);
        let wide = fixture(0.5, -8, 1);
        let nb = narrow.empirical_frame_bounds().unwrap();
        let wb = wide.empirical_frame_bounds().unwrap();
        assert!(wb.lower >= nb.lower - 1e-12);
    }

    #[test]
    fn matrix_cap_is_enforced() {
        let frame = fixture(0.5, -6, 0).with_matrix_cap(10);
        assert!(matches!(
            frame.empirical_frame_bounds(),
            Err(FrameError::MatrixTooLarge { .. })
        ));
    }

    #[test]
    fn invert_s_round_trip_and_iteration_budget() {
        let frame = fixture(0.35, -11, 1);
        let n = frame.model().n_eig();
        let f = random_mean_zero(n, 9);
        let g = frame.apply_s(&f).unwrap();
        let tol = 1e-8;
        let inv = frame.invert_s(&g, tol, 200).unwrap();
        let mut err = inv.solution.clone();
        err.axpy(-1.0, &f);
        assert!(err.norm() <= 1e-6 * f.norm());
        // Contraction-rate budget from the computed bounds.
        let b = frame.empirical_frame_bounds().unwrap();
        let rate = (b.upper - b.lower) / (b.upper + b.lower);
        let budget = (tol.ln() / rate.ln()).ceil() as usize + 5;
        assert!(inv.iterations <= budget, "{} > {budget}", inv.iterations);
        // Residuals decrease monotonically up to rounding slack.
        for w in inv.residuals.windows(2) {
            assert!(w[1] <= w[0] + 1e-14 * inv.residuals[0]);
        }
    }

    #[test]
    fn invert_s_rejects_nonzero_mean() {
        let frame = fixture(0.5, -8, 1);
        let n = frame.model().n_eig();
        let mut g = random_mean_zero(n, 10);
        g.coeffs_mut()[0] = 0.5;
        assert!(matches!(frame.invert_s(&g, 1e-6, 50), Err(FrameError::MeanNotZero { .. })));
    }

    #[test]
    fn q_is_the_diagonal_multiplier() {
        let frame = fixture(0.5, -8, 1);
        let model = frame.model();
        let n = model.n_eig();
        for i in [1usize, 5, 20] {
            let e = SpectralFunction::basis(n, i);
            let qe = frame.apply_q(&e).unwrap();
            let h = multiplier_h(frame.spec(), model.eigenvalue(i).sqrt(), TERM_TOL);
            assert!((qe.coeffs()[i] - h).abs() < 1e-14);
            assert_eq!(qe.coeffs().iter().filter(|&&x| x != 0.0).count(), 1);
        }
        let f = random_mean_zero(n, 11);
        let round = frame.apply_q_inverse(&frame.apply_q(&f).unwrap()).unwrap();
        let mut err = round.clone();
        err.axpy(-1.0, &f);
        assert!(err.norm() <= 1e-10 * f.norm());
    }

    #[test]
    fn s_approaches_q_as_b_shrinks() {
        let mut dists = Vec::new();
        for &b in &[0.7, 0.5, 0.35] {
            let frame = fixture(b, -11, 1);
            dists.push(frame.q_s_distance().unwrap());
        }
        assert!(dists[0] > dists[1] && dists[1] > dists[2], "{dists:?}");
        // Off-diagonal mass exists but stays controlled at b = 0.35.
        let frame = fixture(0.35, -11, 1);
        let daub = daubechies_bounds(frame.spec(), TERM_TOL).unwrap();
        let named = frame.q_s_distance().unwrap();
        assert!(named > 0.0);
        assert!(named / daub.lower <= 0.5, "{named} vs A = {}", daub.lower);
        // S is genuinely non-diagonal: an eigenfunction input leaks into
        // other coefficients, unlike Q.
        let n = frame.model().n_eig();
        let se = frame.apply_s(&SpectralFunction::basis(n, 1)).unwrap();
        let off_mass: f64 = se
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, c)| c * c)
            .sum();
        assert!(off_mass > 0.0);
    }
}
