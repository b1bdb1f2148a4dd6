//! Flat torus backend: trigonometric eigenbasis on a uniform grid.

use super::{Geometry, SpectralError, SpectralModel};
use std::f64::consts::{PI, TAU};

enum Mode {
    Constant,
    Cos(i64, i64),
    Sin(i64, i64),
}

/// Truncated eigensystem of the flat torus `[0, 2π)^2`: eigenvalues `|k|^2`
/// for `k` in the `[-k_max, k_max]^2` lattice box, one real basis function
/// per lattice point (constant, cosines on the positive half, sines on the
/// negative half). The uniform grid with `n_grid >= 2 k_max + 2` integrates
/// every product of two basis functions exactly.
pub fn build_torus_model(k_max: usize, n_grid: usize) -> Result<SpectralModel, SpectralError> {
    if n_grid < 2 * k_max + 2 {
        return Err(SpectralError::GridTooCoarse {
            axis: "n_grid",
            required: 2 * k_max + 2,
            got: n_grid,
        });
    }
    let node_count = n_grid * n_grid;
    let h = TAU / n_grid as f64;
    let mut coords = Vec::with_capacity(node_count);
    for i in 0..n_grid {
        for j in 0..n_grid {
            coords.push([h * i as f64, h * j as f64]);
        }
    }
    let weights = vec![h * h; node_count];

    let k = k_max as i64;
    let mut modes: Vec<(f64, i64, i64, Mode)> = Vec::new();
    for k1 in -k..=k {
        for k2 in -k..=k {
            let lambda = (k1 * k1 + k2 * k2) as f64;
            let mode = if k1 == 0 && k2 == 0 {
                Mode::Constant
            } else if k1 > 0 || (k1 == 0 && k2 > 0) {
                Mode::Cos(k1, k2)
            } else {
                Mode::Sin(-k1, -k2)
            };
            modes.push((lambda, k1, k2, mode));
        }
    }
    modes.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    });

    let n_eig = modes.len();
    let mut eigenvalues = Vec::with_capacity(n_eig);
    let mut eigvecs = vec![0.0; n_eig * node_count];
    let c_norm = 1.0 / (2.0 * PI);
    let t_norm = 1.0 / (2.0_f64.sqrt() * PI);
    for (i, (lambda, _, _, mode)) in modes.iter().enumerate() {
        eigenvalues.push(*lambda);
        let row = &mut eigvecs[i * node_count..(i + 1) * node_count];
        for (m, xy) in coords.iter().enumerate() {
            row[m] = match mode {
                Mode::Constant => c_norm,
                Mode::Cos(k1, k2) => t_norm * (*k1 as f64 * xy[0] + *k2 as f64 * xy[1]).cos(),
                Mode::Sin(k1, k2) => t_norm * (*k1 as f64 * xy[0] + *k2 as f64 * xy[1]).sin(),
            };
        }
    }

    let mut model = SpectralModel {
        dim: 2,
        volume: 4.0 * PI * PI,
        eigenvalues,
        weights,
        eigvecs,
        geometry: Geometry::Torus { coords },
        min_spacing: 0.0,
    };
    model.compute_min_spacing();
    Ok(model)
}
