//! Experiment configuration: a single JSON document, unknown keys rejected.

use manifold_frames::besov::BesovParams;
use manifold_frames::filters::{FilterFamily, FilterSpec};
use manifold_frames::partition::PartitionParams;
use manifold_frames::spectral::{
    build_sphere_model, build_torus_model, load_mesh_model, DistanceMode, SpectralModel,
};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BackendConfig {
    Sphere {
        l_max: usize,
        n_theta: Option<usize>,
        n_phi: Option<usize>,
    },
    Torus {
        k_max: usize,
        n_grid: Option<usize>,
    },
    Mesh {
        path: PathBuf,
        distance: DistanceMode,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub family: FilterFamily,
    pub l: u32,
    pub a: f64,
    /// Extra dilations for the `bounds` sweep; defaults to `[a]`.
    pub a_sweep: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub b: f64,
    /// Extra cell scales for the `frame` sweep; defaults to `[b]`.
    pub b_sweep: Option<Vec<f64>>,
    /// Level range; omitted bounds fall back to the resolvable/nonzero range.
    pub j_min: Option<i32>,
    pub j_max: Option<i32>,
    pub c0: f64,
    pub delta0: f64,
    pub c_floor: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub backend: BackendConfig,
    pub filter: FilterConfig,
    pub partition: PartitionConfig,
    #[serde(default)]
    pub besov: Vec<BesovParams>,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn filter_spec(&self) -> Result<FilterSpec, String> {
        FilterSpec::new(self.filter.family, self.filter.l, self.filter.a).map_err(|e| e.to_string())
    }

    pub fn build_model(&self, config_dir: &Path) -> Result<SpectralModel, String> {
        match &self.backend {
            BackendConfig::Sphere { l_max, n_theta, n_phi } => build_sphere_model(
                *l_max,
                n_theta.unwrap_or(l_max + 1),
                n_phi.unwrap_or(2 * l_max + 1),
            )
            .map_err(|e| e.to_string()),
            BackendConfig::Torus { k_max, n_grid } => {
                build_torus_model(*k_max, n_grid.unwrap_or(2 * k_max + 2))
                    .map_err(|e| e.to_string())
            }
            BackendConfig::Mesh { path, distance } => {
                let resolved =
                    if path.is_absolute() { path.clone() } else { config_dir.join(path) };
                load_mesh_model(&resolved, *distance).map_err(|e| e.to_string())
            }
        }
    }

    pub fn a_sweep(&self) -> Vec<f64> {
        self.filter.a_sweep.clone().unwrap_or_else(|| vec![self.filter.a])
    }

    pub fn b_sweep(&self) -> Vec<f64> {
        self.partition.b_sweep.clone().unwrap_or_else(|| vec![self.partition.b])
    }

    /// Partition parameters for a given `b`, resolving an omitted level range
    /// to the default (resolvable scales with numerically live atoms).
    pub fn partition_params(
        &self,
        model: &SpectralModel,
        spec: &FilterSpec,
        b: f64,
    ) -> Result<PartitionParams, manifold_frames::partition::PartitionError> {
        let (auto_min, auto_max) = match (self.partition.j_min, self.partition.j_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            (lo, hi) => {
                let auto = manifold_frames::partition::default_j_range(model, spec, b)?;
                (lo.unwrap_or(auto.0), hi.unwrap_or(auto.1))
            }
        };
        Ok(PartitionParams {
            a: spec.a(),
            b,
            j_min: auto_min,
            j_max: auto_max,
            c0: self.partition.c0,
            delta0: self.partition.delta0,
            c_floor: self.partition.c_floor,
        })
    }
}
