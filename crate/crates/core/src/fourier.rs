//! Smooth dyadic decomposition of unity and the Fourier-analytic weighted
//! Besov and Lizorkin-Triebel norms on the line.
//!
//! Frequencies are angular: the transform of `f` is `∫ f(x) e^{-ixξ} dx`, so
//! `e^{ikx}` sits at `ξ = k`. On a grid of `n` points with spacing `Δx` the
//! discrete frequencies are `ξ_m = 2πm / (nΔx)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::norms::{
    norm_triangle3d_f, ratio, validate, validate_weighted_3d, Hypothesis, NormKind, NormReport, Scale,
    SmoothnessParams, Term,
};
use crate::numerics::QuadratureConfig;
use crate::profiles::{smooth_step, RadialProfile};
use crate::weights::Weight;

/// Fraction of the signal energy allowed in the top band before a result is flagged.
pub const ALIASING_LIMIT: f64 = 0.01;

/// Spatial grid `[-L, L)` with `2^m` points and the highest dyadic level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FourierGrid {
    pub half_width: f64,
    pub log2_points: u32,
    pub j_max: usize,
}

impl Default for FourierGrid {
    fn default() -> Self {
        Self {
            half_width: 16.0,
            log2_points: 14,
            j_max: 7,
        }
    }
}

impl FourierGrid {
    pub fn validate(&self) -> Result<()> {
        require(self.half_width > 0.0, "half_width", "must be positive")?;
        require(self.log2_points <= 26, "log2_points", "at most 2^26 points")?;
        require(
            self.log2_points as usize >= self.j_max + 2,
            "log2_points",
            "need 2^m ≥ 2^(J_max+2) points to resolve the top band",
        )
    }

    pub fn points(&self) -> usize {
        1 << self.log2_points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points() as f64
    }

    /// Same extent, twice the points.
    pub fn refined(&self) -> Self {
        Self {
            log2_points: self.log2_points + 1,
            ..*self
        }
    }
}

/// `φ_0 = ψ`, `φ_1(x) = ψ(x/2) - ψ(x)`, `φ_j(x) = φ_1(2^{1-j}x)`.
///
/// `ψ(x) = S(2 - |x|)` with the C^∞ step `S`: this is the indicator of
/// `[-3/2, 3/2]` mollified by the bump `S'(· + 1/2)` supported in
/// `[-1/2, 1/2]`, so `ψ = 1` on `|x| ≤ 1` and `ψ = 0` on `|x| ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub j_max: usize,
}

impl DyadicPartition {
    pub fn psi(x: f64) -> f64 {
        smooth_step(2.0 - x.abs())
    }

    pub fn phi(j: usize, x: f64) -> f64 {
        match j {
            0 => Self::psi(x),
            _ => {
                let y = x / 2f64.powi(j as i32 - 1);
                Self::psi(y / 2.0) - Self::psi(y)
            }
        }
    }

    /// `Σ_{j ≤ J} φ_j(x)`, which telescopes to `ψ(2^{-J}x)`.
    pub fn band_sum(&self, x: f64) -> f64 {
        (0..=self.j_max).map(|j| Self::phi(j, x)).sum()
    }

    /// Multiplier of band `j ≤ J_max` as used by the norms. The top band
    /// collects everything above level `J_max - 1`, i.e. `1 - ψ(2^{1-J_max}x)`,
    /// so the multipliers sum to one at every frequency.
    pub fn multiplier(&self, j: usize, x: f64) -> f64 {
        if j < self.j_max || self.j_max == 0 {
            if self.j_max == 0 {
                1.0
            } else {
                Self::phi(j, x)
            }
        } else {
            1.0 - Self::psi(x / 2f64.powi(self.j_max as i32 - 1))
        }
    }
}

/// Builds the partition up to level `J_max`.
pub fn dyadic_bands(j_max: usize) -> DyadicPartition {
    DyadicPartition { j_max }
}

/// Complex samples of a function on the grid `x_i = -L + iΔx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField1D {
    pub samples: Vec<Complex64>,
    pub half_width: f64,
    pub spacing: f64,
}

impl GridField1D {
    pub fn from_fn(grid: &FourierGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let n = grid.points();
        let dx = grid.spacing();
        let samples = (0..n).map(|i| f(-grid.half_width + i as f64 * dx)).collect();
        Self {
            samples,
            half_width: grid.half_width,
            spacing: dx,
        }
    }

    pub fn from_profile(grid: &FourierGrid, g: &RadialProfile) -> Self {
        Self::from_fn(grid, |x| Complex64::new(g.eval(x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing
    }

    /// Angular frequency of FFT bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.len();
        let m = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * PI * m / (n as f64 * self.spacing)
    }

    /// `F^{-1}[φ_j F f]` for `j = 0..=J_max`.
    pub fn bands(&self, partition: &DyadicPartition) -> Vec<Vec<Complex64>> {
        let n = self.len();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut spectrum = self.samples.clone();
        fwd.process(&mut spectrum);
        (0..=partition.j_max)
            .map(|j| {
                let mut b: Vec<Complex64> = spectrum
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * partition.multiplier(j, self.frequency(k)) / n as f64)
                    .collect();
                inv.process(&mut b);
                b
            })
            .collect()
    }
}

fn trapezoid_weight(i: usize, n: usize, dx: f64) -> f64 {
    if i == 0 || i + 1 == n {
        0.5 * dx
    } else {
        dx
    }
}

fn lp_weighted(values: &[f64], w: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |a: f64, &v| a.max(v))
    } else {
        values
            .iter()
            .zip(w)
            .map(|(&v, &wi)| if v == 0.0 { 0.0 } else { wi * v.powf(p) })
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

fn lq(values: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values
            .map(|v| if v == 0.0 { 0.0 } else { v.powf(q) })
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

fn combine(
    bands: &[Vec<Complex64>],
    field: &GridField1D,
    w: &Weight,
    pr: &SmoothnessParams,
    scale: Scale,
) -> (f64, Vec<f64>) {
    let n = field.len();
    // measure of each grid point: trapezoid weight times w(x)
    let mu: Vec<f64> = (0..n)
        .map(|i| trapezoid_weight(i, n, field.spacing) * w.eval(field.x(i)))
        .collect();
    let amp = |j: usize| 2f64.powf(j as f64 * pr.s);
    let band_norms: Vec<f64> = bands
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let mods: Vec<f64> = b.iter().map(|c| c.norm()).collect();
            amp(j) * lp_weighted(&mods, &mu, pr.p)
        })
        .collect();
    let value = match scale {
        Scale::B => lq(band_norms.iter().copied(), pr.q),
        Scale::F => {
            let pointwise: Vec<f64> = (0..n)
                .map(|i| lq(bands.iter().enumerate().map(|(j, b)| amp(j) * b[i].norm()), pr.q))
                .collect();
            lp_weighted(&pointwise, &mu, pr.p)
        }
    };
    (value, band_norms)
}

/// `‖f|B^s_{p,q}(ℝ, w)‖ = (Σ_j 2^{jsq}‖F^{-1}[φ_j Ff] | L_p(w)‖^q)^{1/q}` or
/// `‖f|F^s_{p,q}(ℝ, w)‖ = ‖(Σ_j 2^{jsq}|F^{-1}[φ_j Ff]|^q)^{1/q} | L_p(w)‖`
/// on the grid, with the trapezoid rule in `x`.
///
/// The report's terms are the per-band contributions `2^{js}‖…‖_{L_p(w)}`.
/// A top band holding more than [`ALIASING_LIMIT`] of the energy is flagged
/// in `warnings`; `numeric_error` is the change against the grid with half
/// the points.
pub fn weighted_fourier_norm(
    field: &GridField1D,
    w: &Weight,
    pr: &SmoothnessParams,
    scale: Scale,
    j_max: usize,
) -> Result<NormReport> {
    require(pr.p > 0.0, "p", "must be positive")?;
    require(pr.q > 0.0, "q", "must be positive")?;
    require(field.len() >= 1 << (j_max + 2), "field", "need 2^(J_max+2) grid points")?;
    let partition = dyadic_bands(j_max);
    let bands = field.bands(&partition);
    let (value, band_norms) = combine(&bands, field, w, pr, scale);

    let energy: f64 = field.samples.iter().map(|c| c.norm_sqr()).sum();
    let top: f64 = bands[j_max].iter().map(|c| c.norm_sqr()).sum();
    let mut warnings = Vec::new();
    if energy > 0.0 && top > ALIASING_LIMIT * energy {
        warnings.push(format!(
            "aliasing: top band holds {:.2}% of the energy",
            100.0 * top / energy
        ));
    }

    let numeric_error = if field.len() >= 1 << (j_max + 3) {
        let coarse = GridField1D {
            samples: field.samples.iter().step_by(2).copied().collect(),
            half_width: field.half_width,
            spacing: 2.0 * field.spacing,
        };
        let cb = coarse.bands(&partition);
        let (cv, _) = combine(&cb, &coarse, w, pr, scale);
        (cv - value).abs()
    } else {
        0.0
    };

    let kind = match scale {
        Scale::F => NormKind::FFourierWeighted,
        Scale::B => NormKind::BFourierWeighted,
    };
    Ok(NormReport {
        kind,
        params: *pr,
        value,
        terms: band_norms
            .into_iter()
            .enumerate()
            .map(|(j, v)| Term {
                name: format!("band_{j}"),
                value: v,
            })
            .collect(),
        numeric_error,
        hypothesis: validate(pr, kind),
        warnings,
    })
}

/// [`weighted_fourier_norm`] of a profile sampled on `grid`.
pub fn weighted_fourier_norm_profile(
    g: &RadialProfile,
    w: &Weight,
    pr: &SmoothnessParams,
    scale: Scale,
    grid: &FourierGrid,
) -> Result<NormReport> {
    grid.validate()?;
    let field = GridField1D::from_profile(grid, g);
    weighted_fourier_norm(&field, w, pr, scale, grid.j_max)
}

/// `‖g‖^△` (explicit three-dimensional form, `F` order) against
/// `‖g|F^s_{p,q}(ℝ, |t|²)‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub profile: String,
    pub params: SmoothnessParams,
    pub difference_norm: f64,
    pub fourier_norm: f64,
    /// `None` for the zero profile.
    pub ratio: Option<f64>,
    /// Both characterisations and the weighted-space corollary must hold for
    /// the ratio to count as evidence.
    pub hypothesis: Hypothesis,
    pub warnings: Vec<String>,
}

pub fn coincidence_ratio(
    g: &RadialProfile,
    pr: &SmoothnessParams,
    cfg: &QuadratureConfig,
) -> Result<CoincidenceReport> {
    let pr = SmoothnessParams { d: 3, ..*pr };
    let diff = norm_triangle3d_f(g, &pr, cfg)?;
    let four = weighted_fourier_norm_profile(g, &Weight::radial(3), &pr, Scale::F, &cfg.fourier)?;
    let hypothesis = validate(&pr, NormKind::FTriangle3d)
        .and(validate(&pr, NormKind::FFourierWeighted))
        .and(validate_weighted_3d(&pr));
    Ok(CoincidenceReport {
        profile: g.name().to_string(),
        params: pr,
        difference_norm: diff.value,
        fourier_norm: four.value,
        ratio: ratio(diff.value, four.value),
        hypothesis,
        warnings: four.warnings,
    })
}
