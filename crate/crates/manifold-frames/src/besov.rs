//! Besov sequence norms, the Littlewood–Paley norm oracle, and the
//! norm-equivalence and synthesis experiments.
//!
//! Conventions: atoms live at scale `t = a^j` with weight `a^{-j alpha}`;
//! the inner sum over cells is a weighted `l^p` (sup without measures when
//! `p = inf`), the outer one an `l^q` over levels. The oracle norm combines
//! `2^{nu alpha} ||beta_nu(Δ) F||_p` over the dyadic bands with an
//! unweighted low-pass term, the usual inhomogeneous convention.

use crate::filters::{FilterSpec, LpWindow};
use crate::frames::{CoefficientArray, FrameError, FrameSystem};
use crate::spectral::{SpectralError, SpectralFunction, SpectralModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BesovError {
    #[error("filter order l = {actual_l} too small for these indices; need l >= {required_l}")]
    AdmissibilityViolation { required_l: u32, actual_l: u32 },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("bad Besov parameters: {0}")]
    BadParams(String),
}

/// An exponent in `(0, inf]`; infinity is encoded distinctly so that JSON
/// configs can spell it as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(v: f64) -> Self {
        Exponent::Finite(v)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn validate(self) -> Result<Self, BesovError> {
        match self {
            Exponent::Finite(v) if v > 0.0 && v.is_finite() => Ok(self),
            Exponent::Infinity => Ok(self),
            Exponent::Finite(v) => Err(BesovError::BadParams(format!(
                "exponent must lie in (0, inf], got {v}"
            ))),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => s.serialize_f64(*v),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Exponent::Finite(v)),
            Repr::Str(s) if s == "inf" => Ok(Exponent::Infinity),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Smoothness/integrability indices of a Besov space `B_p^{alpha q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub alpha: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl BesovParams {
    pub fn new(alpha: f64, p: Exponent, q: Exponent) -> Result<Self, BesovError> {
        Ok(Self { alpha, p: p.validate()?, q: q.validate()? })
    }
}

/// Smallest admissible vanishing order: the least integer `l >= 1` with
/// `2l > max(n (1/p - 1)_+ - alpha, alpha)`.
pub fn min_l(params: &BesovParams, n: usize) -> u32 {
    let p_inv = match params.p {
        Exponent::Finite(p) => 1.0 / p,
        Exponent::Infinity => 0.0,
    };
    let moment_demand = n as f64 * (p_inv - 1.0).max(0.0) - params.alpha;
    let bound = moment_demand.max(params.alpha);
    let l = (bound / 2.0).floor() as i64 + 1;
    l.max(1) as u32
}

fn lq_combine(terms: impl Iterator<Item = f64>, q: Exponent) -> f64 {
    match q {
        Exponent::Infinity => terms.fold(0.0, f64::max),
        Exponent::Finite(q) => terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q),
    }
}

/// Sequence norm `(Σ_j a^{-j alpha q} [Σ_k μ(E_{j,k}) |s_{j,k}|^p]^{q/p})^{1/q}`,
/// with sup conventions (measures dropped) for infinite exponents.
pub fn seq_norm(coeffs: &CoefficientArray, params: &BesovParams, a: f64) -> f64 {
    let level_terms = coeffs.levels.iter().map(|level| {
        let inner = match params.p {
            Exponent::Infinity => level.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
            Exponent::Finite(p) => level
                .values
                .iter()
                .zip(&level.measures)
                .map(|(v, mu)| mu * v.abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p),
        };
        a.powf(-(level.j as f64) * params.alpha) * inner
    });
    lq_combine(level_terms, params.q)
}

/// Littlewood–Paley norm oracle: `l^q` over bands of
/// `2^{nu alpha} ||beta_nu(Δ) F||_p`, the low-pass band unweighted.
pub fn lp_norm(
    model: &SpectralModel,
    window: &LpWindow,
    f: &SpectralFunction,
    params: &BesovParams,
) -> Result<f64, BesovError> {
    let p = params.p.as_f64();
    let mut terms = Vec::with_capacity((window.nu_max() + 2) as usize);
    for nu in window.bands() {
        let band = model.apply_multiplier(|lam| window.beta(nu, lam), f)?;
        let norm = model.norm_p(&model.to_grid(&band)?, p);
        let weight = if nu < 0 { 1.0 } else { 2f64.powf(nu as f64 * params.alpha) };
        terms.push(weight * norm);
    }
    Ok(lq_combine(terms.into_iter(), params.q))
}

/// The fixed 8-function experiment suite: three single eigenfunctions across
/// the spectrum, two kernel-row differences, three seeded random mean-zero
/// band-limited functions.
pub fn standard_suite(
    model: &SpectralModel,
    spec: &FilterSpec,
    seed: u64,
) -> Vec<(String, SpectralFunction)> {
    let n = model.n_eig();
    let nodes = model.node_count();
    let mut suite = Vec::with_capacity(8);
    for (name, i) in [("harmonic_low", 1), ("harmonic_mid", n / 2), ("harmonic_high", n - 2)] {
        suite.push((name.to_string(), SpectralFunction::basis(n, i)));
    }
    let bump = |t: f64, x0: usize, x1: usize| {
        let coeffs = (0..n)
            .map(|i| {
                spec.eval_f(t * t * model.eigenvalue(i))
                    * (model.eigvec(i, x0) - model.eigvec(i, x1))
            })
            .collect();
        SpectralFunction::new(coeffs)
    };
    let a = spec.a();
    suite.push(("bump_diff_coarse".to_string(), bump(a.powi(-2), 0, nodes / 2)));
    suite.push(("bump_diff_fine".to_string(), bump(a.powi(-4), nodes / 4, 3 * nodes / 4)));
    for k in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
        let mut coeffs = vec![0.0; n];
        for c in coeffs.iter_mut().skip(1) {
            *c = rng.gen::<f64>() - 0.5;
        }
        suite.push((format!("random_{k}"), SpectralFunction::new(coeffs)));
    }
    suite
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionRatio {
    pub name: String,
    pub seq_norm: f64,
    pub lp_norm: f64,
    pub ratio: f64,
}

/// Outcome of the norm-equivalence experiment for one index triple.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub params: BesovParams,
    pub b: f64,
    pub a: f64,
    pub l: u32,
    pub per_function: Vec<FunctionRatio>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`; finite spread is the equivalence statement.
    pub spread: f64,
}

fn check_admissible(frame: &FrameSystem, params: &BesovParams) -> Result<(), BesovError> {
    let required = min_l(params, frame.model().dim());
    if frame.spec().l() < required {
        return Err(BesovError::AdmissibilityViolation {
            required_l: required,
            actual_l: frame.spec().l(),
        });
    }
    Ok(())
}

/// For each mean-zero test function, compare the frame sequence norm with
/// the Littlewood–Paley oracle and report the ratio spread.
pub fn equivalence_experiment(
    model: &SpectralModel,
    frame: &FrameSystem,
    window: &LpWindow,
    params: &BesovParams,
    suite: &[(String, SpectralFunction)],
) -> Result<EquivalenceReport, BesovError> {
    check_admissible(frame, params)?;
    let a = frame.spec().a();
    let mut per_function = Vec::with_capacity(suite.len());
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for (name, f) in suite {
        let coeffs = frame.analyze(f)?;
        let sn = seq_norm(&coeffs, params, a);
        let ln = lp_norm(model, window, f, params)?;
        let ratio = sn / ln;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        per_function.push(FunctionRatio { name: name.clone(), seq_norm: sn, lp_norm: ln, ratio });
    }
    Ok(EquivalenceReport {
        params: *params,
        b: frame.partition().b(),
        a,
        l: frame.spec().l(),
        per_function,
        min_ratio,
        max_ratio,
        spread: max_ratio / min_ratio,
    })
}

/// Outcome of the frame-expansion synthesis experiment for one function.
#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub params: BesovParams,
    /// Relative L2 error of `Σ μ r phi` against the input.
    pub residual_rel: f64,
    /// Sequence norm of the canonical coefficients `r = <S^{-1}F, phi>`,
    /// an upper witness for the representation infimum.
    pub seq_norm: f64,
    pub iterations: usize,
}

/// Expand `F` through the canonical coefficients `r_{j,k} = <S^{-1}F, phi_{j,k}>`
/// and verify the expansion reproduces `F`.
pub fn synthesis_experiment(
    frame: &FrameSystem,
    params: &BesovParams,
    f: &SpectralFunction,
    tol: f64,
    max_iter: usize,
) -> Result<SynthesisReport, BesovError> {
    check_admissible(frame, params)?;
    let inversion = frame.invert_s(f, tol, max_iter)?;
    let r = frame.analyze(&inversion.solution)?;
    let recon = frame.synthesize(&r)?;
    let mut err = recon;
    err.axpy(-1.0, f);
    let f_norm = f.norm();
    let residual_rel = if f_norm == 0.0 { 0.0 } else { err.norm() / f_norm };
    Ok(SynthesisReport {
        params: *params,
        residual_rel,
        seq_norm: seq_norm(&r, params, frame.spec().a()),
        iterations: inversion.iterations,
    })
}
