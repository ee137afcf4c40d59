//! Radial profiles `g` (even functions on the line), their radial extensions
//! `f(x) = g(|x|)`, finite differences, and the local means `M_{t,u}`,
//! `M^Ω_{t,u}` and `M^{N,Ω}_{t,u}`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require, Error, Result};
use crate::geometry::{norm, omega_contains, unit_ball_volume, CapMeasure, OMEGA_OUTER};
use crate::numerics::{integrate_adaptive_breaks, refine_sup, MonteCarlo, QuadratureConfig};
use crate::table::{Beyond, Table};

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// C^∞ step: 0 for `z ≤ 0`, 1 for `z ≥ 1`, strictly monotone in between.
pub fn smooth_step(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / z).exp();
    let b = (-1.0 / (1.0 - z)).exp();
    a / (a + b)
}

/// Fixed C^∞ cutoff `χ(t) = exp(1 - 1/(1 - (t/2)²))` on `|t| < 2`, zero outside.
pub fn cutoff(t: f64) -> f64 {
    let y = 0.5 * t;
    let s = 1.0 - y * y;
    if s <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / s).exp()
    }
}

/// Where a profile stops mattering numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    /// Vanishes for `|t| ≥ radius`.
    Bounded(f64),
    /// Not compactly supported; negligible beyond `effective`.
    Unbounded { effective: f64 },
}

impl Support {
    pub fn radius(&self) -> Option<f64> {
        match self {
            Support::Bounded(r) => Some(*r),
            Support::Unbounded { .. } => None,
        }
    }

    pub fn effective_radius(&self) -> f64 {
        match self {
            Support::Bounded(r) => *r,
            Support::Unbounded { effective } => *effective,
        }
    }
}

/// An even function on the line, stored through its values at `|t|`.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    eval: EvalFn,
    support: Support,
    smoothness_hint: Option<f64>,
    kinks: Vec<f64>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("smoothness_hint", &self.smoothness_hint)
            .finish()
    }
}

impl RadialProfile {
    /// Builds a profile from its values on `[0, ∞)`; evenness is by construction.
    pub fn new<F>(name: impl Into<String>, support: Support, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            support,
            smoothness_hint: None,
            kinks: Vec::new(),
        }
    }

    pub fn with_hint(mut self, hint: f64) -> Self {
        self.smoothness_hint = Some(hint);
        self
    }

    /// Radii (`≥ 0`) where the profile is not smooth; used as quadrature breakpoints.
    pub fn with_kinks(mut self, kinks: impl IntoIterator<Item = f64>) -> Self {
        self.kinks.extend(kinks);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// Hölder-type exponent of the profile's worst singularity: the 1D
    /// `L_p`-modulus of smoothness decays like `h^{hint + 1/p}`.
    pub fn smoothness_hint(&self) -> Option<f64> {
        self.smoothness_hint
    }

    pub fn critical_exponent(&self, p: f64) -> Option<f64> {
        self.smoothness_hint.map(|b| b + 1.0 / p)
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t.abs())
    }

    /// `c·g`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            name: format!("{c}*{}", self.name),
            eval: Arc::new(move |t| c * inner(t)),
            ..self.clone()
        }
    }

    /// `t ↦ g(λt)`.
    pub fn dilated(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0, "dilation factor must be positive");
        let inner = self.eval.clone();
        let support = match self.support {
            Support::Bounded(r) => Support::Bounded(r / lambda),
            Support::Unbounded { effective } => Support::Unbounded {
                effective: effective / lambda,
            },
        };
        Self {
            name: format!("{}(x{lambda})", self.name),
            eval: Arc::new(move |t| inner(lambda * t)),
            support,
            smoothness_hint: self.smoothness_hint,
            kinks: self.kinks.iter().map(|k| k / lambda).collect(),
        }
    }

    /// `g₁ + g₂`.
    pub fn sum(&self, other: &RadialProfile) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let support = match (self.support, other.support) {
            (Support::Bounded(x), Support::Bounded(y)) => Support::Bounded(x.max(y)),
            (s, o) => Support::Unbounded {
                effective: s.effective_radius().max(o.effective_radius()),
            },
        };
        let hint = match (self.smoothness_hint, other.smoothness_hint) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Self {
            name: format!("{}+{}", self.name, other.name),
            eval: Arc::new(move |t| a(t) + b(t)),
            support,
            smoothness_hint: hint,
            kinks: self.kinks.iter().chain(&other.kinks).copied().collect(),
        }
    }

    /// Sampled profile from a two-column `(t, g(t))` table, mirrored evenly,
    /// linearly interpolated and zero beyond the last abscissa.
    pub fn from_table(name: impl Into<String>, table: Table) -> Self {
        let support = Support::Bounded(table.last_abscissa());
        let kinks = table.abscissae().to_vec();
        Self::new(name, support, move |t| table.eval(t)).with_kinks(kinks)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let table = Table::load(path.as_ref(), Beyond::Zero)?;
        Ok(Self::from_table(path.as_ref().display().to_string(), table))
    }
}

/// `f(x) = g(|x|)` on `R^d`.
#[derive(Debug, Clone)]
pub struct AmbientField {
    pub profile: RadialProfile,
    pub d: usize,
}

impl AmbientField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.profile.eval(norm(x))
    }
}

/// `(ext g)(x) = g(|x|)`.
pub fn extend(g: &RadialProfile, d: usize) -> Result<AmbientField> {
    require(d >= 2, "d", "need d ≥ 2")?;
    Ok(AmbientField { profile: g.clone(), d })
}

/// `(tr f)(t) = f(t, 0, …, 0)`; for an extended profile this is the profile itself.
pub fn trace(field: &AmbientField) -> RadialProfile {
    field.profile.clone()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Δ_h^N g(x) = Σ_j C(N,j) (-1)^{N-j} g(x + jh)` on the line.
pub fn nth_difference<F: Fn(f64) -> f64>(g: F, order: usize, h: f64, x: f64) -> f64 {
    assert!(order >= 1, "difference order must be at least 1");
    (0..=order)
        .map(|j| {
            let sign = if (order - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(order, j) * g(x + j as f64 * h)
        })
        .sum()
}

/// `Δ_h^N f(x)` for the ambient radial field.
pub fn nth_difference_ambient(field: &AmbientField, order: usize, h: &[f64], x: &[f64]) -> f64 {
    assert!(order >= 1, "difference order must be at least 1");
    let mut y = vec![0.0; x.len()];
    (0..=order)
        .map(|j| {
            for ((yi, xi), hi) in y.iter_mut().zip(x).zip(h) {
                *yi = xi + j as f64 * hi;
            }
            let sign = if (order - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(order, j) * field.eval(&y)
        })
        .sum()
}

/// A step and order for [`nth_difference`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSpec {
    pub order: usize,
    pub step: Vec<f64>,
}

/// A local mean with its statistical or quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// How [`mean_ball`] evaluates the ball integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanMethod {
    /// Seeded Monte Carlo over `|h| < t` in `R^d`.
    MonteCarlo { samples: usize, seed: u64 },
    /// 1D reduction `∫ |g(λ) - g(r)|^u σ_{d-1}(Q_{λ,t}(r)) dλ`.
    CapReduction,
}

fn uniform_in_ball(d: usize, radius: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut sq = 0.0;
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
        sq += *v * *v;
    }
    let u: f64 = rng.random();
    let scale = radius * u.powf(1.0 / d as f64) / sq.sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
}

fn check_mean_args(field: &AmbientField, x: &[f64], t: f64, u: f64) -> Result<()> {
    require(t > 0.0, "t", "must be positive")?;
    require(u > 0.0, "u", "must be positive")?;
    require(x.len() == field.d, "x", "dimension must match the field")
}

/// `M_{t,u} f(x) = (t^{-d} ∫_{|h|<t} |f(x+h) - f(x)|^u dh)^{1/u}`; `u = ∞` gives
/// `M_{t,∞}`, the supremum of `|f(x+h) - f(x)|` over the ball.
pub fn mean_ball(
    field: &AmbientField,
    x: &[f64],
    t: f64,
    u: f64,
    method: MeanMethod,
    cfg: &QuadratureConfig,
) -> Result<MeanEstimate> {
    check_mean_args(field, x, t, u)?;
    if u.is_infinite() {
        return Ok(mean_sup(field, x, t));
    }
    let d = field.d;
    let fx = field.eval(x);
    match method {
        MeanMethod::MonteCarlo { samples, seed } => {
            let mc = MonteCarlo::new(samples, seed);
            let est = mc.estimate(|rng| {
                let mut h = vec![0.0; d];
                uniform_in_ball(d, t, rng, &mut h);
                let y: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a + b).collect();
                (field.eval(&y) - fx).abs().powf(u)
            });
            Ok(root_with_error(unit_ball_volume(d), est.mean, est.std_error, u))
        }
        MeanMethod::CapReduction => {
            let r = norm(x);
            let (integral, err) = cap_reduced_integral(&field.profile, d, r, t, u, cfg)?;
            Ok(root_with_error(t.powi(-(d as i32)), integral, err, u))
        }
    }
}

/// `(scale·m)^{1/u}` with first-order propagation of the error of `m`.
fn root_with_error(scale: f64, m: f64, err: f64, u: f64) -> MeanEstimate {
    let base = scale * m;
    let value = base.max(0.0).powf(1.0 / u);
    let std_error = if base > 0.0 {
        value / u * err / m
    } else {
        (scale * err).powf(1.0 / u)
    };
    MeanEstimate { value, std_error }
}

/// `∫_{max(0,r-t)}^{r+t} |g(λ) - g(r)|^u σ_{d-1}(Q_{λ,t}(r)) dλ` and its quadrature error.
pub fn cap_reduced_integral(
    g: &RadialProfile,
    d: usize,
    r: f64,
    t: f64,
    u: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let gr = g.eval(r);
    let lo = (r - t).max(0.0);
    let hi = r + t;
    let mut breaks = vec![r, t - r, (r - t).abs()];
    breaks.extend(g.kinks().iter().copied());
    let caps = CapMeasure::for_dimension(d, cfg.mc_samples.max(10_000), cfg.seed)?;
    let sigma = |lambda: f64| caps.measure(lambda, t, r);
    let res = integrate_adaptive_breaks(
        |lambda| (g.eval(lambda) - gr).abs().powf(u) * sigma(lambda),
        lo,
        hi,
        &breaks,
        cfg,
    )?;
    Ok((res.value, res.error))
}

/// `M_{t,∞} f(x)`: the ball `|h| < t` around `x` meets exactly the spheres of
/// radius `λ` with `|λ - |x|| < t`, so the supremum runs over that `λ`-range on
/// a uniform grid refined around the running maximiser.
pub fn mean_sup(field: &AmbientField, x: &[f64], t: f64) -> MeanEstimate {
    let r = norm(x);
    let gr = field.profile.eval(r);
    let (_, v) = refine_sup(
        |lambda| (field.profile.eval(lambda) - gr).abs(),
        (r - t).max(0.0),
        r + t,
        64,
        3,
    );
    MeanEstimate {
        value: v,
        std_error: 0.0,
    }
}

/// `M^{N,Ω}_{t,u} f(x) = (t^{-d} ∫_{Ω_t(x)} |Δ_h^N f(x)|^u dh)^{1/u}` by
/// rejection sampling from the bounding ball `|h| < 3t`. For `u = ∞` the
/// supremum over accepted samples is returned.
pub fn mean_omega(
    field: &AmbientField,
    x: &[f64],
    t: f64,
    u: f64,
    order: usize,
    samples: usize,
    seed: u64,
) -> Result<MeanEstimate> {
    check_mean_args(field, x, t, u)?;
    require(order >= 1, "N", "difference order must be at least 1")?;
    let d = field.d;
    let outer = OMEGA_OUTER * t;
    let mc = MonteCarlo::new(samples, seed);
    if u.is_infinite() {
        let chunks = samples.div_ceil(mc.chunk);
        let mut best: f64 = 0.0;
        let mut h = vec![0.0; d];
        for k in 0..chunks {
            let mut rng = mc.chunk_rng(k);
            for _ in 0..mc.chunk.min(samples - k * mc.chunk) {
                uniform_in_ball(d, outer, &mut rng, &mut h);
                if omega_contains(x, &h, t)? {
                    best = best.max(nth_difference_ambient(field, order, &h, x).abs());
                }
            }
        }
        return Ok(MeanEstimate {
            value: best,
            std_error: 0.0,
        });
    }
    let est = mc.estimate(|rng| {
        let mut h = vec![0.0; d];
        uniform_in_ball(d, outer, rng, &mut h);
        if omega_contains(x, &h, t).unwrap_or(false) {
            nth_difference_ambient(field, order, &h, x).abs().powf(u)
        } else {
            0.0
        }
    });
    // vol(B_{3t}) t^{-d} = 3^d |B_1|
    let scale = OMEGA_OUTER.powi(d as i32) * unit_ball_volume(d);
    Ok(root_with_error(scale, est.mean, est.std_error, u))
}

/// Grid over which [`nonidentity_witness`] searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessGrid {
    /// `|x|` values; `x = |x|·e_1`.
    pub radii: Vec<f64>,
    /// `|h|` values.
    pub steps: Vec<f64>,
    /// Angles between `h` and `e_1`, in the `(e_1, e_2)` plane.
    pub angles: Vec<f64>,
    /// Number of points on the 1D `w` grid.
    pub w_points: usize,
}

impl WitnessGrid {
    pub fn uniform(r: (f64, f64), h_max: f64, n: usize) -> Self {
        let lin = |a: f64, b: f64, k: usize| -> Vec<f64> {
            (0..k).map(|i| a + (b - a) * i as f64 / (k - 1).max(1) as f64).collect()
        };
        Self {
            radii: lin(r.0, r.1, n),
            steps: lin(h_max / n as f64, h_max, n),
            angles: lin(0.0, std::f64::consts::PI, n),
            w_points: 801,
        }
    }
}

/// The grid point maximising `min_w |Δ_h^N f(x) - Δ_w^N g(|x|)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub best_w: f64,
    pub gap: f64,
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Searches for `(x, h)` at which no 1D step `w` reproduces the ambient
/// `N`-th difference of a radial field. For `N = 1` the step
/// `w = |x+h| - |x|` always works, so the gap vanishes.
pub fn nonidentity_witness(field: &AmbientField, order: usize, grid: &WitnessGrid) -> Result<Witness> {
    require(order >= 1, "N", "difference order must be at least 1")?;
    require(
        !grid.radii.is_empty() && !grid.steps.is_empty() && !grid.angles.is_empty(),
        "search_grid",
        "must be nonempty",
    )?;
    require(grid.w_points >= 3, "w_points", "need at least 3 points")?;
    let d = field.d;
    let g = &field.profile;
    let mut best: Option<Witness> = None;
    for &rx in &grid.radii {
        let mut x = vec![0.0; d];
        x[0] = rx;
        for &hn in &grid.steps {
            for &ang in &grid.angles {
                let mut h = vec![0.0; d];
                h[0] = hn * ang.cos();
                h[1] = hn * ang.sin();
                let target = nth_difference_ambient(field, order, &h, &x);
                let gap_at = |w: f64| (target - nth_difference(|s| g.eval(s), order, w, rx)).abs();
                let span = 2.0 * hn + rx;
                let n = grid.w_points;
                let dw = 2.0 * span / (n - 1) as f64;
                let mut arg = 0.0;
                let mut val = f64::INFINITY;
                for i in 0..n {
                    let w = -span + i as f64 * dw;
                    let v = gap_at(w);
                    if v < val {
                        (arg, val) = (w, v);
                    }
                }
                let (w_ref, v_ref) = golden_min(gap_at, arg - dw, arg + dw, 80);
                if v_ref < val {
                    (arg, val) = (w_ref, v_ref);
                }
                let radial_step: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a + b).collect();
                let w_star = norm(&radial_step) - rx;
                let v_star = gap_at(w_star);
                if v_star < val {
                    (arg, val) = (w_star, v_star);
                }
                if best.as_ref().is_none_or(|b| val > b.gap) {
                    best = Some(Witness {
                        x: x.clone(),
                        h: h.clone(),
                        best_w: arg,
                        gap: val,
                    });
                }
            }
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// `‖Δ_h g | L_p(R)‖` by adaptive quadrature split at the profile's kinks and
/// their translates by `-h`.
pub fn difference_lp_norm(g: &RadialProfile, h: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    require(p > 0.0 && p.is_finite(), "p", "need 0 < p < ∞")?;
    let r = g.support().effective_radius() + h.abs();
    let mut breaks = Vec::new();
    for &k in g.kinks().iter().chain(std::iter::once(&0.0)) {
        for s in [k, -k] {
            breaks.push(s);
            breaks.push(s - h);
        }
    }
    let res = integrate_adaptive_breaks(|x| (g.eval(x + h) - g.eval(x)).abs().powf(p), -r, r, &breaks, cfg)?;
    Ok(res.value.powf(1.0 / p))
}

/// Least-squares slope of `log ‖Δ_h g‖_{L_p}` against `log h`.
pub fn modulus_slope(g: &RadialProfile, p: f64, steps: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    require(steps.len() >= 2, "steps", "need at least two steps")?;
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .map(|&h| difference_lp_norm(g, h, p, cfg).map(|v| (h.ln(), v.ln())))
        .collect::<Result<_>>()?;
    Ok(least_squares_slope(&pts))
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Names accepted by [`corpus`].
pub const CORPUS_NAMES: &[&str] = &["gaussian", "cusp", "plateau", "ring", "chirp", "zero", "constant"];

/// Named analytic profiles.
///
/// * `gaussian(σ)`: `exp(-(t/σ)²)`
/// * `cusp(β)`: `|t|^β χ(t)`, `0 < β < 1`
/// * `plateau(R = 1)`: smoothed indicator of `[-R, R]`, transition width `R/2`
/// * `ring(a, w)`: bump of half-width `w` centred at `|t| = a`
/// * `chirp(k)`: `cos(k t²) χ(t)`
/// * `constant(c = 1, R = 8)`: `c` on `|t| ≤ R`, smoothed to zero over `[R, R+1]`
/// * `zero`
pub fn corpus(name: &str, params: &[f64]) -> Result<RadialProfile> {
    let param = |i: usize, default: Option<f64>, label: &'static str| -> Result<f64> {
        params
            .get(i)
            .copied()
            .or(default)
            .ok_or_else(|| invalid(label, format!("profile `{name}` needs `{label}`")))
    };
    let label = if params.is_empty() {
        name.to_string()
    } else {
        format!(
            "{name}:{}",
            params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        )
    };
    Ok(match name {
        "gaussian" => {
            let sigma = param(0, Some(1.0), "sigma")?;
            require(sigma > 0.0, "sigma", "must be positive")?;
            RadialProfile::new(label, Support::Unbounded { effective: 6.5 * sigma }, move |t| {
                (-(t / sigma).powi(2)).exp()
            })
        }
        "cusp" => {
            let beta = param(0, None, "beta")?;
            require(beta > 0.0 && beta < 1.0, "beta", "need 0 < β < 1")?;
            RadialProfile::new(label, Support::Bounded(2.0), move |t| t.powf(beta) * cutoff(t))
                .with_hint(beta)
                .with_kinks([0.0])
        }
        "plateau" => {
            let radius = param(0, Some(1.0), "radius")?;
            require(radius > 0.0, "radius", "must be positive")?;
            let w = 0.25 * radius;
            RadialProfile::new(label, Support::Bounded(radius + w), move |t| {
                smooth_step((radius + w - t) / (2.0 * w))
            })
        }
        "ring" => {
            let a = param(0, Some(1.0), "a")?;
            let w = param(1, Some(0.5), "w")?;
            require(w > 0.0 && a >= 0.0, "ring", "need a ≥ 0, w > 0")?;
            RadialProfile::new(label, Support::Bounded(a + w), move |t| {
                let y = (t - a) / w;
                let s = 1.0 - y * y;
                if s <= 0.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / s).exp()
                }
            })
        }
        "chirp" => {
            let k = param(0, Some(4.0), "k")?;
            RadialProfile::new(label, Support::Bounded(2.0), move |t| (k * t * t).cos() * cutoff(t))
        }
        "constant" => {
            let c = param(0, Some(1.0), "c")?;
            let radius = param(1, Some(8.0), "radius")?;
            require(radius > 0.0, "radius", "must be positive")?;
            RadialProfile::new(label, Support::Bounded(radius + 1.0), move |t| {
                c * smooth_step(radius + 1.0 - t)
            })
        }
        "zero" => RadialProfile::new(label, Support::Bounded(1.0), |_| 0.0),
        other => return Err(Error::UnknownProfile(other.to_string())),
    })
}

/// Parses `name` or `name:p1,p2,...`, or `file:<path>` for a sampled profile.
pub fn parse_profile(spec: &str) -> Result<RadialProfile> {
    if let Some(path) = spec.strip_prefix("file:") {
        return RadialProfile::load(path);
    }
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let params = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid("profile", format!("`{spec}`: {e}")))
            })
            .collect::<Result<_>>()?
    };
    corpus(name, &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn corpus_basics() {
        let g = corpus("gaussian", &[1.0]).unwrap();
        assert_eq!(g.eval(0.0), 1.0);
        let c = corpus("cusp", &[0.5]).unwrap();
        assert_eq!(c.eval(2.0), 0.0);
        assert_eq!(c.eval(-2.5), 0.0);
        assert!(matches!(corpus("nope", &[]), Err(Error::UnknownProfile(_))));
        assert!(corpus("cusp", &[]).is_err());
        assert!(corpus("cusp", &[1.5]).is_err());
    }

    #[test]
    fn corpus_is_even() {
        for spec in [
            "gaussian:0.7",
            "cusp:0.3",
            "plateau",
            "ring:1,0.4",
            "chirp:3",
            "constant",
        ] {
            let g = parse_profile(spec).unwrap();
            for i in 0..200 {
                let t = -3.0 + 6.0 * i as f64 / 199.0;
                assert_eq!(g.eval(t), g.eval(-t), "{spec} at {t}");
            }
        }
    }

    #[test]
    fn trace_extend_round_trip() {
        let g = corpus("ring", &[1.0, 0.5]).unwrap();
        let f = extend(&g, 3).unwrap();
        let back = trace(&f);
        for i in 0..50 {
            let t = i as f64 * 0.05;
            assert_eq!(back.eval(t), g.eval(t));
            assert_eq!(f.eval(&[t, 0.0, 0.0]), g.eval(t));
        }
        let z = trace(&extend(&corpus("zero", &[]).unwrap(), 2).unwrap());
        assert_eq!(z.eval(0.7), 0.0);
        assert!(extend(&g, 1).is_err());
    }

    #[test]
    fn difference_examples() {
        assert!((nth_difference(|x| x, 1, 0.3, 0.0) - 0.3).abs() < 1e-15);
        for &(h, x) in &[(0.1, 0.0), (0.7, -2.0), (1.3, 5.0)] {
            let v = nth_difference(|x: f64| x * x, 2, h, x);
            assert!((v - 2.0 * h * h).abs() < 1e-12);
        }
        let g = |x: f64| (-x * x).exp();
        let direct = g(0.8) - 3.0 * g(0.7) + 3.0 * g(0.6) - g(0.5);
        assert!((nth_difference(g, 3, 0.1, 0.5) - direct).abs() < 1e-12);
    }

    #[test]
    fn ambient_difference_matches_profile_along_axis() {
        let f = extend(&corpus("gaussian", &[1.0]).unwrap(), 3).unwrap();
        let a = nth_difference_ambient(&f, 2, &[0.2, 0.0, 0.0], &[0.5, 0.0, 0.0]);
        let b = nth_difference(|s| f.profile.eval(s), 2, 0.2, 0.5);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn constant_field_means_vanish() {
        let f = extend(&corpus("constant", &[2.0, 50.0]).unwrap(), 3).unwrap();
        let x = [1.0, 0.5, 0.0];
        for u in [0.5, 1.0, 2.0, f64::INFINITY] {
            let mc = mean_ball(
                &f,
                &x,
                0.5,
                u,
                MeanMethod::MonteCarlo { samples: 2000, seed: 1 },
                &cfg(),
            )
            .unwrap();
            assert_eq!(mc.value, 0.0);
            let cr = mean_ball(&f, &x, 0.5, u, MeanMethod::CapReduction, &cfg()).unwrap();
            assert_eq!(cr.value, 0.0);
        }
        let om = mean_omega(&f, &x, 0.5, 1.0, 2, 2000, 1).unwrap();
        assert_eq!(om.value, 0.0);
    }

    #[test]
    fn mean_rejects_bad_args() {
        let f = extend(&corpus("gaussian", &[]).unwrap(), 3).unwrap();
        let x = [1.0, 0.0, 0.0];
        assert!(mean_ball(&f, &x, 0.0, 1.0, MeanMethod::CapReduction, &cfg()).is_err());
        assert!(mean_ball(&f, &x, 0.5, 0.0, MeanMethod::CapReduction, &cfg()).is_err());
        assert!(mean_omega(&f, &x, -1.0, 1.0, 1, 1000, 0).is_err());
    }

    #[test]
    fn linear_field_mean_scales_linearly_in_t() {
        // g(t) = t near 1: M_{t,1} is first order in t
        let g = RadialProfile::new("id", Support::Bounded(10.0), |t| t);
        let f = extend(&g, 3).unwrap();
        let x = [1.0, 0.0, 0.0];
        let pts: Vec<(f64, f64)> = [0.01, 0.02, 0.04, 0.08]
            .iter()
            .map(|&t| {
                let m = mean_ball(&f, &x, t, 1.0, MeanMethod::CapReduction, &cfg()).unwrap();
                (f64::ln(t), m.value.ln())
            })
            .collect();
        let slope = least_squares_slope(&pts);
        assert!((slope - 1.0).abs() < 0.02, "{slope}");
    }

    #[test]
    fn nonidentity_first_order_is_exact() {
        let f = extend(&corpus("gaussian", &[1.0]).unwrap(), 2).unwrap();
        let w = nonidentity_witness(&f, 1, &WitnessGrid::uniform((0.5, 2.0), 1.0, 5)).unwrap();
        assert!(w.gap < 1e-12, "{w:?}");
        let z = extend(&corpus("zero", &[]).unwrap(), 2).unwrap();
        let w = nonidentity_witness(&z, 3, &WitnessGrid::uniform((0.5, 2.0), 1.0, 4)).unwrap();
        assert_eq!(w.gap, 0.0);
    }

    #[test]
    fn table_profile_round_trip() {
        let t = Table::parse("0 1\n1 0.5\n2 0\n", Beyond::Zero).unwrap();
        let g = RadialProfile::from_table("tab", t);
        assert_eq!(g.eval(-0.5), 0.75);
        assert_eq!(g.eval(3.0), 0.0);
        assert_eq!(g.support().radius(), Some(2.0));
    }

    #[test]
    fn combinators() {
        let g = corpus("gaussian", &[1.0]).unwrap();
        let h = corpus("cusp", &[0.5]).unwrap();
        let s = g.sum(&h.scaled(2.0));
        assert!((s.eval(0.5) - (g.eval(0.5) + 2.0 * h.eval(0.5))).abs() < 1e-15);
        let dl = h.dilated(2.0);
        assert_eq!(dl.eval(0.3), h.eval(0.6));
        assert_eq!(dl.support().radius(), Some(1.0));
        assert_eq!(s.smoothness_hint(), Some(0.5));
    }

    #[test]
    fn smooth_step_and_cutoff() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
    }
}
