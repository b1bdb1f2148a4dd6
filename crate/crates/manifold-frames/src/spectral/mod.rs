//! Discretized manifold backends.
//!
//! A [`SpectralModel`] is a truncated eigensystem of the Laplace–Beltrami
//! operator: ascending eigenvalues, real eigenfunction values tabulated on a
//! quadrature node set, positive weights summing to the volume, and a
//! geodesic distance between nodes. Three backends are provided: the unit
//! sphere (real spherical harmonics on a Gauss–Legendre × uniform grid), the
//! flat torus (sine/cosine basis on a uniform grid), and a mesh eigensystem
//! loaded from a `MESHSPEC v1` file.
//!
//! Everything downstream (partitions, frames, Besov norms) talks to the
//! backends only through this interface.

mod mesh;
mod quadrature;
mod sphere;
mod torus;

pub use mesh::{load_mesh_model, model_from_mesh, write_mesh_file, DistanceMode, MeshEigenFile};
pub use quadrature::gauss_legendre;
pub use sphere::build_sphere_model;
pub use torus::build_torus_model;

use crate::filters::FilterSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid too coarse on {axis}: need at least {required}, got {got}")]
    GridTooCoarse { axis: &'static str, required: usize, got: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("mesh file, line {line}: {message}")]
    MeshFormat { line: usize, message: String },
    #[error("eigenvalues not ascending at index {index}")]
    NonAscendingEigenvalues { index: usize },
    #[error("first eigenvalue must be ~0, got {lambda0}")]
    FirstEigenvalueNonzero { lambda0: f64 },
    #[error("node {node} has non-positive weight")]
    WeightNotPositive { node: usize },
    #[error("node weights sum to {sum} but header declares volume {header}")]
    VolumeMismatch { header: f64, sum: f64 },
    #[error("mesh file lacks the {needed} section required by the distance mode")]
    MissingSection { needed: &'static str },
    #[error("distance graph is disconnected (no path {from} -> {to})")]
    DisconnectedGraph { from: usize, to: usize },
    #[error("supplied distance matrix is not symmetric with zero diagonal")]
    BadDistanceMatrix,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Values of a function at the quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(value: f64, node_count: usize) -> Self {
        Self { values: vec![value; node_count] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Eigencoefficients of a band-limited function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    coeffs: Vec<f64>,
}

impl SpectralFunction {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(n_eig: usize) -> Self {
        Self { coeffs: vec![0.0; n_eig] }
    }

    /// The i-th eigenfunction as a coefficient vector.
    pub fn basis(n_eig: usize, i: usize) -> Self {
        let mut coeffs = vec![0.0; n_eig];
        coeffs[i] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient l2 norm; equals the L2 norm of the function by Parseval.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += alpha * o;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for c in &mut self.coeffs {
            *c *= alpha;
        }
    }
}

pub(crate) enum Geometry {
    Sphere { unit: Vec<[f64; 3]> },
    Torus { coords: Vec<[f64; 2]> },
    Mesh { file: MeshEigenFile, dist: Vec<f64> },
}

/// Truncated eigensystem of the Laplace–Beltrami operator on a compact
/// manifold, with quadrature and geodesic distance.
pub struct SpectralModel {
    pub(crate) dim: usize,
    pub(crate) volume: f64,
    pub(crate) eigenvalues: Vec<f64>,
    pub(crate) weights: Vec<f64>,
    /// Row-major `n_eig x node_count`.
    pub(crate) eigvecs: Vec<f64>,
    pub(crate) geometry: Geometry,
    pub(crate) min_spacing: f64,
}

impl SpectralModel {
    /// Manifold dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn n_eig(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Value of eigenfunction `i` at node `m`.
    pub fn eigvec(&self, i: usize, m: usize) -> f64 {
        self.eigvecs[i * self.node_count() + m]
    }

    /// Values of eigenfunction `i` at all nodes.
    pub fn eigvec_row(&self, i: usize) -> &[f64] {
        let m = self.node_count();
        &self.eigvecs[i * m..(i + 1) * m]
    }

    /// Geodesic distance between nodes.
    pub fn distance(&self, m0: usize, m1: usize) -> f64 {
        if m0 == m1 {
            return 0.0;
        }
        match &self.geometry {
            Geometry::Sphere { unit } => {
                let a = unit[m0];
                let b = unit[m1];
                let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                dot.clamp(-1.0, 1.0).acos()
            }
            Geometry::Torus { coords } => {
                let mut sq = 0.0;
                for (c0, c1) in coords[m0].iter().zip(&coords[m1]) {
                    let mut d = (c0 - c1).abs();
                    d = d.min(std::f64::consts::TAU - d);
                    sq += d * d;
                }
                sq.sqrt()
            }
            Geometry::Mesh { dist, .. } => dist[m0 * self.node_count() + m1],
        }
    }

    /// Smallest positive nearest-neighbor distance of the node set; the
    /// finest length scale the grid resolves.
    pub fn min_node_spacing(&self) -> f64 {
        self.min_spacing
    }

    pub(crate) fn compute_min_spacing(&mut self) {
        let m = self.node_count();
        let mut best = f64::INFINITY;
        for i in 0..m {
            for j in i + 1..m {
                let d = self.distance(i, j);
                if d > 0.0 && d < best {
                    best = d;
                }
            }
        }
        self.min_spacing = if best.is_finite() { best } else { 0.0 };
    }

    /// Analysis: `c_i = Σ_m w_m F(x_m) e_i(x_m)`.
    pub fn to_spectral(&self, f: &GridFunction) -> Result<SpectralFunction, SpectralError> {
        let m = self.node_count();
        if f.len() != m {
            return Err(SpectralError::LengthMismatch { expected: m, got: f.len() });
        }
        let mut coeffs = vec![0.0; self.n_eig()];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let row = self.eigvec_row(i);
            *c = row
                .iter()
                .zip(&self.weights)
                .zip(f.values())
                .map(|((e, w), v)| e * w * v)
                .sum();
        }
        Ok(SpectralFunction::new(coeffs))
    }

    /// Synthesis: `F(x_m) = Σ_i c_i e_i(x_m)`.
    pub fn to_grid(&self, f: &SpectralFunction) -> Result<GridFunction, SpectralError> {
        let n = self.n_eig();
        if f.len() != n {
            return Err(SpectralError::LengthMismatch { expected: n, got: f.len() });
        }
        let m = self.node_count();
        let mut values = vec![0.0; m];
        for (i, &c) in f.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (v, e) in values.iter_mut().zip(self.eigvec_row(i)) {
                *v += c * e;
            }
        }
        Ok(GridFunction::new(values))
    }

    /// Operator calculus `g(Δ)`: diagonal in the eigenbasis.
    pub fn apply_multiplier(
        &self,
        g: impl Fn(f64) -> f64,
        f: &SpectralFunction,
    ) -> Result<SpectralFunction, SpectralError> {
        let n = self.n_eig();
        if f.len() != n {
            return Err(SpectralError::LengthMismatch { expected: n, got: f.len() });
        }
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, &lam)| c * g(lam))
            .collect();
        Ok(SpectralFunction::new(coeffs))
    }

    /// Row `y -> K_t(x, y) = Σ_i f(t^2 λ_i) e_i(x) e_i(y)` of the kernel of
    /// `f(t^2 Δ)`, evaluated at the nodes.
    pub fn kernel_row(&self, spec: &FilterSpec, t: f64, x_index: usize) -> GridFunction {
        let t2 = t * t;
        let m = self.node_count();
        let mut values = vec![0.0; m];
        for i in 0..self.n_eig() {
            let g = spec.eval_f(t2 * self.eigenvalues[i]) * self.eigvec(i, x_index);
            if g == 0.0 {
                continue;
            }
            for (v, e) in values.iter_mut().zip(self.eigvec_row(i)) {
                *v += g * e;
            }
        }
        GridFunction::new(values)
    }

    /// Quadrature inner product `Σ_m w_m F(x_m) G(x_m)`.
    pub fn inner(&self, f: &GridFunction, g: &GridFunction) -> f64 {
        self.weights
            .iter()
            .zip(f.values())
            .zip(g.values())
            .map(|((w, a), b)| w * a * b)
            .sum()
    }

    /// Mean value `(1/μ(M)) ∫ F`.
    pub fn mean(&self, f: &GridFunction) -> f64 {
        self.weights.iter().zip(f.values()).map(|(w, v)| w * v).sum::<f64>() / self.volume
    }

    /// Projection `(I - P) F` onto the mean-zero subspace.
    pub fn remove_mean(&self, f: &GridFunction) -> GridFunction {
        let mean = self.mean(f);
        GridFunction::new(f.values().iter().map(|v| v - mean).collect())
    }

    /// `L^p` norm with respect to the quadrature measure; `p = inf` is the
    /// max over nodes, `0 < p < 1` gives the usual quasi-norm.
    pub fn norm_p(&self, f: &GridFunction, p: f64) -> f64 {
        assert!(p > 0.0, "p must be positive");
        if p.is_infinite() {
            return f.values().iter().fold(0.0, |acc, v| acc.max(v.abs()));
        }
        let sum: f64 = self
            .weights
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v.abs().powf(p))
            .sum();
        sum.powf(1.0 / p)
    }

    /// Max over pairs `|Σ_m w_m e_i e_j - δ_ij|`; the discrete orthonormality
    /// defect of the tabulated eigensystem.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n_eig();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let row_i = self.eigvec_row(i);
            for j in i..n {
                let row_j = self.eigvec_row(j);
                let s: f64 = self
                    .weights
                    .iter()
                    .zip(row_i)
                    .zip(row_j)
                    .map(|((w, a), b)| w * a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}
