//! Unit sphere backend: real spherical harmonics on a Gauss–Legendre
//! colatitude grid times uniform longitudes.

use super::{quadrature::gauss_legendre, Geometry, SpectralError, SpectralModel};
use std::f64::consts::{PI, TAU};

/// Normalized associated Legendre values `Q_{L,m}(x)` for all `L <= l_max`,
/// `m <= L`, at a single `x = cos(theta)`.
///
/// Normalization: `∫_{-1}^{1} Q_{L,m}^2 dx = 1/(2π)`, so that `Q_{L,0}` and
/// `sqrt(2) Q_{L,m} cos/sin(m φ)` are orthonormal on the sphere. No
/// Condon–Shortley phase. Indexing: `q[L][m]`.
#[allow(clippy::needless_range_loop)]
fn normalized_legendre_table(l_max: usize, x: f64) -> Vec<Vec<f64>> {
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let mut q = vec![Vec::new(); l_max + 1];
    for (l, row) in q.iter_mut().enumerate() {
        row.resize(l + 1, 0.0);
    }
    q[0][0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..=l_max {
        let mf = m as f64;
        q[m][m] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta * q[m - 1][m - 1];
    }
    for m in 0..l_max {
        let mf = m as f64;
        q[m + 1][m] = (2.0 * mf + 3.0).sqrt() * x * q[m][m];
    }
    for m in 0..=l_max {
        for l in m + 2..=l_max {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            q[l][m] = a * (x * q[l - 1][m] - b * q[l - 2][m]);
        }
    }
    q
}

/// Truncated eigensystem of the sphere: eigenvalues `L(L+1)` with
/// multiplicity `2L+1` for `L = 0..=l_max`, real spherical harmonics, nodes
/// at Gauss–Legendre colatitudes × uniform longitudes (quadrature exact for
/// spherical polynomials of degree `2 l_max`), great-circle distance.
#[allow(clippy::needless_range_loop)]
pub fn build_sphere_model(
    l_max: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<SpectralModel, SpectralError> {
    if n_theta < l_max + 1 {
        return Err(SpectralError::GridTooCoarse {
            axis: "n_theta",
            required: l_max + 1,
            got: n_theta,
        });
    }
    if n_phi < 2 * l_max + 1 {
        return Err(SpectralError::GridTooCoarse {
            axis: "n_phi",
            required: 2 * l_max + 1,
            got: n_phi,
        });
    }
    let (gl_nodes, gl_weights) = gauss_legendre(n_theta);
    let node_count = n_theta * n_phi;
    let dphi = TAU / n_phi as f64;

    let mut weights = Vec::with_capacity(node_count);
    let mut unit = Vec::with_capacity(node_count);
    for t in 0..n_theta {
        let x = gl_nodes[t];
        let sin_theta = (1.0 - x * x).max(0.0).sqrt();
        for p in 0..n_phi {
            let phi = dphi * p as f64;
            weights.push(gl_weights[t] * dphi);
            unit.push([sin_theta * phi.cos(), sin_theta * phi.sin(), x]);
        }
    }

    // Legendre tables per colatitude, trig tables per longitude.
    let tables: Vec<Vec<Vec<f64>>> =
        gl_nodes.iter().map(|&x| normalized_legendre_table(l_max, x)).collect();
    let mut cos_m = vec![vec![0.0; n_phi]; l_max + 1];
    let mut sin_m = vec![vec![0.0; n_phi]; l_max + 1];
    for m in 0..=l_max {
        for p in 0..n_phi {
            let arg = m as f64 * dphi * p as f64;
            cos_m[m][p] = arg.cos();
            sin_m[m][p] = arg.sin();
        }
    }

    let n_eig = (l_max + 1) * (l_max + 1);
    let mut eigenvalues = Vec::with_capacity(n_eig);
    let mut eigvecs = vec![0.0; n_eig * node_count];
    let sqrt2 = 2.0_f64.sqrt();
    let mut i = 0;
    for l in 0..=l_max {
        let lambda = (l * (l + 1)) as f64;
        for m in 0..=l {
            let kinds: &[bool] = if m == 0 { &[true] } else { &[true, false] };
            for &is_cos in kinds {
                eigenvalues.push(lambda);
                let row = &mut eigvecs[i * node_count..(i + 1) * node_count];
                for t in 0..n_theta {
                    let q = tables[t][l][m];
                    for p in 0..n_phi {
                        row[t * n_phi + p] = if m == 0 {
                            q
                        } else if is_cos {
                            sqrt2 * q * cos_m[m][p]
                        } else {
                            sqrt2 * q * sin_m[m][p]
                        };
                    }
                }
                i += 1;
            }
        }
    }
    debug_assert_eq!(i, n_eig);

    let mut model = SpectralModel {
        dim: 2,
        volume: 4.0 * PI,
        eigenvalues,
        weights,
        eigvecs,
        geometry: Geometry::Sphere { unit },
        min_spacing: 0.0,
    };
    model.compute_min_spacing();
    Ok(model)
}
