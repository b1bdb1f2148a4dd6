//! Scalar filter calculus.
//!
//! A filter is `f(s) = s^l f0(s)` with `f0` rapidly decreasing and `l >= 1`,
//! so `f(0) = 0` and the kernels of `f(t^2 Δ)` have zero mean. This module
//! evaluates `f`, its Calderón constant `c = ∫ |f(t)|^2 dt/t`, the discrete
//! Daubechies bounds `A <= Σ_j |f(a^{2j} s)|^2 <= B`, the derived multipliers
//! `H` and `G = 1/H`, and the dyadic Littlewood–Paley window family used by
//! the Besov norm oracle.

use thiserror::Error;

/// Default relative size at which a tail term stops the two-sided dyadic sums.
pub const TERM_TOL: f64 = 1e-16;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("invalid filter spec: {0}")]
    InvalidSpec(String),
    #[error("quadrature for the Calderón constant did not converge")]
    QuadratureDiverged,
    #[error("Daubechies lower bound not positive (A = {a}); filter is inadmissible")]
    NotAFrameFilter { a: f64 },
    #[error("bounds inconsistent with the Calderón limit {limit} (A = {a}, B = {b})")]
    BoundsInconsistent { a: f64, b: f64, limit: f64 },
    #[error("multiplier G is undefined at lambda = 0 (constant mode is projected out)")]
    GUndefinedAtZero,
}

/// Built-in generators for the slowly varying part `f0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterFamily {
    /// `f0(s) = exp(-s)`, the heat-kernel family.
    Exp,
}

/// An admissible filter `f(s) = s^l f0(s)` together with the dilation step `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    family: FilterFamily,
    l: u32,
    a: f64,
}

impl FilterSpec {
    pub fn new(family: FilterFamily, l: u32, a: f64) -> Result<Self, FilterError> {
        if l < 1 {
            return Err(FilterError::InvalidSpec("vanishing order l must be >= 1".into()));
        }
        if !a.is_finite() || a <= 1.0 {
            return Err(FilterError::InvalidSpec(format!("dilation a must satisfy a > 1, got {a}")));
        }
        Ok(Self { family, l, a })
    }

    pub fn family(&self) -> FilterFamily {
        self.family
    }

    /// Vanishing order at the origin.
    pub fn l(&self) -> u32 {
        self.l
    }

    /// Dilation step.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eval_f0(&self, s: f64) -> f64 {
        match self.family {
            FilterFamily::Exp => (-s).exp(),
        }
    }

    /// `f(s) = s^l f0(s)`. Total on `s >= 0`; `f(0) = 0` exactly.
    pub fn eval_f(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        s.powi(self.l as i32) * self.eval_f0(s)
    }
}

/// Extrema of the dyadic sum `h(s) = Σ_j |f(a^{2j} s)|^2` over `s > 0`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DaubechiesBounds {
    /// Infimum `A_a`.
    pub lower: f64,
    /// Supremum `B_a`.
    pub upper: f64,
    /// Calderón constant of the filter.
    pub calderon: f64,
    /// Number of seed samples used for the extremum search.
    pub samples: usize,
}

impl DaubechiesBounds {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Two-sided truncated sum `Σ_j f(a^{2j} s)^2`.
///
/// The sum is centered where `a^{2j} s` crosses 1, then extended in both
/// directions until a term drops below `term_tol` times the running sum.
fn dyadic_square_sum(spec: &FilterSpec, s: f64, term_tol: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let log_step = 2.0 * spec.a.ln();
    let j0 = (-s.ln() / log_step).floor() as i64;
    let mut sum = 0.0;
    for dir in [1i64, -1] {
        let mut j = if dir == 1 { j0 } else { j0 - 1 };
        for _ in 0..100_000 {
            let term = spec.eval_f(s * (log_step * j as f64).exp()).powi(2);
            sum += term;
            if term < term_tol * sum {
                break;
            }
            j += dir;
        }
    }
    sum
}

/// `H(λ) = Σ_j |f|^2(a^{2j} λ^2)`, the symbol of the multiplier operator `Q`.
///
/// `H(0) = 0`, `H(aλ) = H(λ)`, and `A <= H(λ) <= B` for `λ > 0`.
pub fn multiplier_h(spec: &FilterSpec, lambda: f64, term_tol: f64) -> f64 {
    dyadic_square_sum(spec, lambda * lambda, term_tol)
}

/// `G = 1/H`, defined for `λ > 0` only.
pub fn multiplier_g(spec: &FilterSpec, lambda: f64) -> Result<f64, FilterError> {
    if lambda <= 0.0 {
        return Err(FilterError::GUndefinedAtZero);
    }
    Ok(1.0 / multiplier_h(spec, lambda, TERM_TOL))
}

/// Adaptive Simpson on `[lo, hi]`, classic halving with an absolute tolerance.
#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    g: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: u32,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
) -> Result<f64, FilterError> {
    let mid = 0.5 * (lo + hi);
    let lm = 0.5 * (lo + mid);
    let mh = 0.5 * (mid + hi);
    let f_lm = g(lm);
    let f_mh = g(mh);
    let left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    let right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(FilterError::QuadratureDiverged);
    }
    let l = adaptive_simpson(g, lo, mid, tol / 2.0, depth - 1, f_lo, f_lm, f_mid, left)?;
    let r = adaptive_simpson(g, mid, hi, tol / 2.0, depth - 1, f_mid, f_mh, f_hi, right)?;
    Ok(l + r)
}

/// Integral of `g` over the whole real line of the log variable, for
/// integrands that decay at least exponentially on both ends.
fn log_axis_integral(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64, FilterError> {
    // A coarse scan seeds the absolute tolerance for the adaptive pass.
    let n = 512;
    let h = (hi - lo) / n as f64;
    let mut coarse = 0.0;
    for k in 0..=n {
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        coarse += w * g(lo + k as f64 * h);
    }
    coarse *= h;
    if !(coarse.is_finite() && coarse > 0.0) {
        return Err(FilterError::QuadratureDiverged);
    }
    let mid = 0.5 * (lo + hi);
    let f_lo = g(lo);
    let f_mid = g(mid);
    let f_hi = g(hi);
    let whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    adaptive_simpson(&g, lo, hi, 1e-9 * coarse, 60, f_lo, f_mid, f_hi, whole)
}

/// Calderón constant `c = ∫_0^∞ |f(t)|^2 dt/t`, computed on the log axis
/// (`t = e^u`) to relative accuracy better than 1e-8.
pub fn calderon_constant(spec: &FilterSpec) -> Result<f64, FilterError> {
    let u_lo = -20.0;
    let u_hi = (30.0 + 20.0 * spec.l as f64).ln();
    log_axis_integral(|u| spec.eval_f(u.exp()).powi(2), u_lo, u_hi)
}

fn golden_section(mut lo: f64, mut hi: f64, rel_width: f64, h: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut h1 = h(x1);
    let mut h2 = h(x2);
    while hi - lo > rel_width {
        if h1 < h2 {
            hi = x2;
            x2 = x1;
            h2 = h1;
            x1 = hi - INV_PHI * (hi - lo);
            h1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            h1 = h2;
            x2 = lo + INV_PHI * (hi - lo);
            h2 = h(x2);
        }
    }
    if h1 < h2 {
        (x1, h1)
    } else {
        (x2, h2)
    }
}

const SEED_SAMPLES: usize = 4096;

/// Daubechies frame bounds of the filter: extrema of `h(s) = Σ_j f(a^{2j}s)^2`.
///
/// `h(a^2 s) = h(s)`, so the search runs over one log period `s ∈ [1, a^2]`:
/// 4096 log-uniform seed samples followed by golden-section refinement of the
/// bracketed extrema down to relative width 1e-6. `term_tol` controls the
/// truncation of the dyadic sum.
pub fn daubechies_bounds(spec: &FilterSpec, term_tol: f64) -> Result<DaubechiesBounds, FilterError> {
    let period = 2.0 * spec.a.ln();
    let h = |u: f64| dyadic_square_sum(spec, u.exp(), term_tol);
    let step = period / SEED_SAMPLES as f64;
    let mut min_k = 0;
    let mut max_k = 0;
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    for k in 0..SEED_SAMPLES {
        let v = h(k as f64 * step);
        if v < min_v {
            min_v = v;
            min_k = k;
        }
        if v > max_v {
            max_v = v;
            max_k = k;
        }
    }
    // Refine inside the two flanking seed intervals; h is smooth and periodic,
    // so evaluating slightly outside [0, period] is fine.
    let refine = |k: usize, sign: f64| {
        let lo = (k as f64 - 1.0) * step;
        let hi = (k as f64 + 1.0) * step;
        let (_, v) = golden_section(lo, hi, 1e-6 * period, |u| sign * h(u));
        sign * v
    };
    let lower = refine(min_k, 1.0).min(min_v);
    let upper = refine(max_k, -1.0).max(max_v);
    if lower.is_nan() || lower <= 0.0 {
        return Err(FilterError::NotAFrameFilter { a: lower });
    }
    let calderon = calderon_constant(spec)?;
    let limit = calderon / period;
    let slack = 1e-9 * limit;
    if lower > limit + slack || upper < limit - slack {
        return Err(FilterError::BoundsInconsistent { a: lower, b: upper, limit });
    }
    Ok(DaubechiesBounds { lower, upper, calderon, samples: SEED_SAMPLES })
}

/// Dyadic Littlewood–Paley window family.
///
/// `beta0` is smooth, supported in `(1/4, 16)`, and satisfies the exact
/// partition identity `Σ_ν beta0^2(2^{-2ν} s) = 1` for `s > 0`. Band `ν >= 0`
/// is `beta_ν(s) = beta0(2^{-2ν} s)`, supported in `(2^{2ν-2}, 2^{2ν+4})`;
/// band `-1` is the low-pass completing the partition, vanishing for `s >= 4`
/// and equal to 1 at `s = 0`.
#[derive(Debug, Clone, Copy)]
pub struct LpWindow {
    nu_max: i32,
}

fn bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (-1.0 / (u * (1.0 - u))).exp()
    }
}

/// Unnormalized profile supported exactly in (1/4, 16).
fn profile(s: f64) -> f64 {
    if s <= 0.25 || s >= 16.0 {
        return 0.0;
    }
    bump((s.log2() + 2.0) / 6.0)
}

/// `Σ_ν profile(2^{-2ν} s)`; invariant under `s -> 4s`, strictly positive for
/// `s > 0` (two or three consecutive ν contribute).
fn profile_period_sum(s: f64) -> f64 {
    let nu_mid = (s.log2() / 2.0).round() as i32;
    let mut sum = 0.0;
    for nu in nu_mid - 2..=nu_mid + 2 {
        sum += profile(s * 2f64.powi(-2 * nu));
    }
    sum
}

impl LpWindow {
    /// Highest band index kept; every band above it vanishes on `[0, lambda_max]`.
    pub fn nu_max(&self) -> i32 {
        self.nu_max
    }

    pub fn nu_min(&self) -> i32 {
        -1
    }

    /// Band indices `-1 ..= nu_max`.
    pub fn bands(&self) -> impl Iterator<Item = i32> {
        -1..=self.nu_max
    }

    pub fn beta0(&self, s: f64) -> f64 {
        if s <= 0.25 || s >= 16.0 {
            return 0.0;
        }
        (profile(s) / profile_period_sum(s)).sqrt()
    }

    /// `beta_ν(s)`; `ν = -1` is the low-pass.
    pub fn beta(&self, nu: i32, s: f64) -> f64 {
        if nu >= 0 {
            return self.beta0(s * 2f64.powi(-2 * nu));
        }
        debug_assert_eq!(nu, -1);
        if s <= 0.0 {
            return 1.0;
        }
        if s >= 4.0 {
            return 0.0;
        }
        // Σ_{ν <= -1} beta0^2(2^{-2ν} s); the period sum is dilation invariant
        // so one normalizer serves every term.
        let norm = profile_period_sum(s);
        let nu_lo = ((s.log2() - 4.0) / 2.0).floor() as i32;
        let mut sq = 0.0;
        for nu in nu_lo..=-1 {
            sq += profile(s * 2f64.powi(-2 * nu));
        }
        (sq / norm).sqrt()
    }
}

/// Window truncated after the last band that meets the spectrum `[0, lambda_max]`.
pub fn build_lp_window(lambda_max: f64) -> LpWindow {
    let mut nu = -1;
    while 2f64.powi(2 * nu - 2) <= lambda_max {
        nu += 1;
    }
    LpWindow { nu_max: nu }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_CUBE_ROOT_2: f64 = 1.259_921_049_894_873_2;

    fn exp_spec(l: u32, a: f64) -> FilterSpec {
        FilterSpec::new(FilterFamily::Exp, l, a).unwrap()
    }

    #[test]
    fn eval_f_matches_closed_forms() {
        let s1 = exp_spec(1, 2.0);
        assert_eq!(s1.eval_f(0.0), 0.0);
        assert!((s1.eval_f(1.0) - 0.36787944117144233).abs() < 1e-15);
        let s2 = exp_spec(2, 2.0);
        assert!((s2.eval_f(2.0) - 0.5413411329464508).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(FilterSpec::new(FilterFamily::Exp, 0, 2.0).is_err());
        assert!(FilterSpec::new(FilterFamily::Exp, 1, 1.0).is_err());
        assert!(FilterSpec::new(FilterFamily::Exp, 1, 0.5).is_err());
    }

    /// Independent oracle: plain trapezoid sum on a dense log grid.
    fn calderon_log_trapezoid(spec: &FilterSpec) -> f64 {
        let (lo, hi, n) = (-40.0, 8.0, 400_000);
        let h = (hi - lo) / n as f64;
        let mut sum = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            sum += w * spec.eval_f((lo + k as f64 * h).exp()).powi(2);
        }
        sum * h
    }

    #[test]
    fn calderon_exp_l1_is_one_quarter() {
        let spec = exp_spec(1, A_CUBE_ROOT_2);
        let c = calderon_constant(&spec).unwrap();
        assert!((c - 0.25).abs() < 1e-8, "c = {c}");
        let oracle = calderon_log_trapezoid(&spec);
        assert!((c - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn calderon_exp_l2() {
        // ∫ t^3 e^{-2t} dt = 3!/2^4 = 0.375
        let spec = exp_spec(2, A_CUBE_ROOT_2);
        let c = calderon_constant(&spec).unwrap();
        assert!((c - 0.375).abs() < 1e-8, "c = {c}");
        let oracle = calderon_log_trapezoid(&spec);
        assert!((c - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn calderon_scales_quadratically() {
        // Replacing f by 2f multiplies the integrand, hence c, by 4.
        let spec = exp_spec(1, 2.0);
        let c = log_axis_integral(|u| spec.eval_f(u.exp()).powi(2), -20.0, 5.0).unwrap();
        let c4 = log_axis_integral(|u| (2.0 * spec.eval_f(u.exp())).powi(2), -20.0, 5.0).unwrap();
        assert!((c4 - 4.0 * c).abs() < 1e-10 * c4);
    }

    /// Brute-force oracle for the Daubechies sum extrema: dense log grid on
    /// one period, j truncated at +-300.
    fn bounds_brute_force(spec: &FilterSpec, grid: usize) -> (f64, f64) {
        let period = 2.0 * spec.a().ln();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..grid {
            let s = (period * k as f64 / grid as f64).exp();
            let mut sum = 0.0;
            for j in -300..=300 {
                sum += spec.eval_f(s * (period * j as f64).exp()).powi(2);
            }
            lo = lo.min(sum);
            hi = hi.max(sum);
        }
        (lo, hi)
    }

    #[test]
    fn daubechies_cube_root_two_is_nearly_tight() {
        let spec = exp_spec(1, A_CUBE_ROOT_2);
        let b = daubechies_bounds(&spec, TERM_TOL).unwrap();
        assert!(b.ratio() >= 1.0 && b.ratio() < 1.0001, "B/A = {}", b.ratio());
        // Both bounds within 5% of the Calderón limit c / (2 ln a).
        let limit = 0.25 / (2.0 * A_CUBE_ROOT_2.ln());
        assert!((b.lower - limit).abs() < 0.05 * limit);
        assert!((b.upper - limit).abs() < 0.05 * limit);
        assert!(b.lower <= limit && limit <= b.upper);
        // Brute-force oracle agreement.
        let (lo, hi) = bounds_brute_force(&spec, 100_000);
        assert!((b.lower - lo).abs() < 1e-6 * lo);
        assert!((b.upper - hi).abs() < 1e-6 * hi);
    }

    #[test]
    fn dyadic_sum_is_log_periodic() {
        let spec = exp_spec(1, A_CUBE_ROOT_2);
        let a2 = spec.a() * spec.a();
        for &s in &[1.0, 1.3, 1.58, 0.07, 33.0] {
            let h1 = dyadic_square_sum(&spec, s, TERM_TOL);
            let h2 = dyadic_square_sum(&spec, a2 * s, TERM_TOL);
            assert!((h1 - h2).abs() < 1e-12 * h1);
        }
    }

    #[test]
    fn bounds_search_is_interval_invariant() {
        // Searching [a^2, a^4] instead of [1, a^2] finds the same extrema.
        let spec = exp_spec(1, 2.0);
        let b = daubechies_bounds(&spec, TERM_TOL).unwrap();
        let period = 2.0 * spec.a().ln();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..SEED_SAMPLES {
            let s = (period + period * k as f64 / SEED_SAMPLES as f64).exp();
            let v = dyadic_square_sum(&spec, s, TERM_TOL);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!((b.lower - lo).abs() < 1e-5 * lo);
        assert!((b.upper - hi).abs() < 1e-5 * hi);
    }

    #[test]
    fn ratio_decreases_as_a_approaches_one() {
        let ratios: Vec<f64> = [2.0, A_CUBE_ROOT_2, 2f64.powf(0.125)]
            .iter()
            .map(|&a| daubechies_bounds(&exp_spec(1, a), TERM_TOL).unwrap().ratio())
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
        assert!(ratios.iter().all(|&r| r >= 1.0));
    }

    #[test]
    fn multiplier_h_stays_within_bounds() {
        let spec = exp_spec(1, A_CUBE_ROOT_2);
        let b = daubechies_bounds(&spec, TERM_TOL).unwrap();
        assert_eq!(multiplier_h(&spec, 0.0, TERM_TOL), 0.0);
        // Deterministic pseudo-random sweep of (0, 1e3].
        let mut x = 0.123456789_f64;
        for _ in 0..100 {
            x = (x * 997.0).fract();
            let lambda = 1e3 * (x + 1e-6);
            let h = multiplier_h(&spec, lambda, TERM_TOL);
            assert!(h >= b.lower - 1e-10 && h <= b.upper + 1e-10, "H({lambda}) = {h}");
            let ha = multiplier_h(&spec, spec.a() * lambda, TERM_TOL);
            assert!((h - ha).abs() < 1e-12 * h);
            let g = multiplier_g(&spec, lambda).unwrap();
            assert!((g * h - 1.0).abs() < 1e-12);
        }
        assert!(multiplier_g(&spec, 0.0).is_err());
    }

    #[test]
    fn multiplier_g_attains_inverse_upper_bound() {
        let spec = exp_spec(1, 2.0);
        let b = daubechies_bounds(&spec, TERM_TOL).unwrap();
        // Locate the argmax of h on one period by dense scan, then check G there.
        let period = 2.0 * spec.a().ln();
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..200_000 {
            let s = (period * k as f64 / 200_000.0).exp();
            let v = dyadic_square_sum(&spec, s, TERM_TOL);
            if v > best.1 {
                best = (s, v);
            }
        }
        let lambda = best.0.sqrt();
        let g = multiplier_g(&spec, lambda).unwrap();
        assert!((g - 1.0 / b.upper).abs() < 1e-6 / b.upper);
    }

    #[test]
    fn lp_window_partition_identity() {
        let w = build_lp_window(300.0);
        for &s in &[0.3_f64, 1.0, 7.0, 100.0] {
            let mut sum = 0.0;
            let nu_mid = (s.log2() / 2.0).round() as i32;
            for nu in nu_mid - 3..=nu_mid + 3 {
                sum += w.beta0(s * 2f64.powi(-2 * nu)).powi(2);
            }
            assert!((sum - 1.0).abs() < 1e-10, "s = {s}: {sum}");
        }
        // Dense grid, full truncated family including the low-pass.
        let mut worst = 0.0_f64;
        for k in 0..10_000 {
            let s = 10f64.powf(-4.0 + 7.0 * k as f64 / 10_000.0);
            let mut sum = 0.0;
            for nu in w.bands() {
                sum += w.beta(nu, s).powi(2);
            }
            worst = worst.max((sum - 1.0).abs());
        }
        assert!(worst <= 1e-10, "worst deviation {worst}");
    }

    #[test]
    fn lp_window_band_supports() {
        let w = build_lp_window(300.0);
        assert_eq!(w.beta0(0.25), 0.0);
        assert_eq!(w.beta0(16.0), 0.0);
        assert!(w.beta0(1.0) > 0.0);
        for nu in 0..=w.nu_max() {
            let lo = 2f64.powi(2 * nu - 2);
            let hi = 2f64.powi(2 * nu + 4);
            assert_eq!(w.beta(nu, lo * 0.999), 0.0);
            assert_eq!(w.beta(nu, hi * 1.001), 0.0);
            assert!(w.beta(nu, (lo * hi).sqrt()) > 0.0);
        }
        // Low-pass: 1 at the origin, identically zero past 4.
        assert_eq!(w.beta(-1, 0.0), 1.0);
        for &s in &[4.0, 5.0, 77.0] {
            assert_eq!(w.beta(-1, s), 0.0);
        }
        assert!(w.beta(-1, 1.0) > 0.0);
    }

    #[test]
    fn lp_window_truncation_covers_spectrum() {
        let lambda_max = 272.0;
        let w = build_lp_window(lambda_max);
        // Bands above nu_max vanish on [0, lambda_max].
        assert!(2f64.powi(2 * w.nu_max() - 2) > lambda_max);
        assert!(2f64.powi(2 * (w.nu_max() - 1) - 2) <= lambda_max);
    }
}
