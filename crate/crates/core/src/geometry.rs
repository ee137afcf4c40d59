//! Neighbourhood sets `Ω_t(x)`, sphere-ball intersections `Q_{λ,t}(r)` and the
//! splitting of the `λ`-axis used by the explicit three-dimensional norms.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require, Error, Result};
use crate::numerics::{McEstimate, MonteCarlo};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A membership query `h ∈ Ω_t(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaQuery {
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub t: f64,
}

impl OmegaQuery {
    pub fn new(x: Vec<f64>, h: Vec<f64>, t: f64) -> Self {
        Self { x, h, t }
    }

    pub fn contains(&self) -> Result<bool> {
        omega_contains(&self.x, &self.h, self.t)
    }
}

/// Inner and outer radii (in units of `t`) of balls around the origin that
/// sandwich every `Ω_t(x)`.
pub const OMEGA_INNER: f64 = 0.25;
pub const OMEGA_OUTER: f64 = 3.0;

/// `h ∈ Ω_t(x)`.
///
/// `Ω_t(x) = t·Ω_1(x)`. For `|x| ≤ 1`, `Ω_1(x)` is `{h : |x + h| ≤ 2}`. For
/// `|x| > 1` it is the set of `h` with `x + h = τy`, `|y| = |x|`, `τ > 0`,
/// `⟨x, y⟩ > |x|² - 1/2` and `|x| - 1/2 < τ|x| < |x| + 1/2`; the witness
/// `τ = |x+h|/|x|`, `y = |x|(x+h)/|x+h|` is the only candidate, so the
/// existence question is decided by checking it.
pub fn omega_contains(x: &[f64], h: &[f64], t: f64) -> Result<bool> {
    require(t > 0.0, "t", "must be positive")?;
    require(x.len() == h.len(), "h", "dimension must match x")?;
    require(x.len() >= 2, "d", "need d ≥ 2")?;
    let z: Vec<f64> = x.iter().zip(h).map(|(xi, hi)| xi + hi / t).collect();
    let rx = norm(x);
    let rz = norm(&z);
    if rx <= 1.0 {
        return Ok(rz <= 2.0);
    }
    if rz == 0.0 {
        return Ok(false);
    }
    // ⟨x, y⟩ with y = (|x|/|z|) z; τ|x| = |z|
    let xy = rx / rz * dot(x, &z);
    Ok(xy > rx * rx - 0.5 && rx - 0.5 < rz && rz < rx + 0.5)
}

/// Parameters of `σ_{d-1}(Q_{λ,t}(r))`: the sphere `|w| = λ` in `R^d` cut by the
/// ball of radius `t` centred at `r·e_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub d: usize,
    pub lambda: f64,
    pub t: f64,
    pub r: f64,
}

impl CapSpec {
    pub fn new(d: usize, lambda: f64, t: f64, r: f64) -> Self {
        Self { d, lambda, t, r }
    }

    fn validate(&self) -> Result<()> {
        require(self.d >= 2, "d", "need d ≥ 2")?;
        require(self.lambda >= 0.0, "lambda", "must be nonnegative")?;
        require(self.r >= 0.0, "r", "must be nonnegative")?;
        require(self.t > 0.0, "t", "must be positive")
    }
}

/// Surface measure of the unit sphere in `R^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    unit_sphere_area(d) / d as f64
}

/// Exact `σ_{d-1}(Q_{λ,t}(r))` for `d ∈ {2, 3}`.
///
/// The partial-cap branch applies when `max(0, r-t) < λ < r+t` and
/// `t ≤ r + λ`; these conditions exclude `r = 0`, so the `1/r` factor is
/// never evaluated there.
pub fn cap_measure_exact(c: CapSpec) -> Result<f64> {
    c.validate()?;
    let CapSpec { d, lambda, t, r } = c;
    let cap = (r - t).max(0.0) < lambda && lambda < r + t && t <= r + lambda;
    let full = t > r + lambda;
    match d {
        3 => Ok(if cap {
            PI * lambda / r * (t * t - (lambda - r).powi(2))
        } else if full {
            4.0 * PI * lambda * lambda
        } else {
            0.0
        }),
        2 => Ok(if cap {
            let c = ((r * r + lambda * lambda - t * t) / (2.0 * r * lambda)).clamp(-1.0, 1.0);
            2.0 * lambda * c.acos()
        } else if full {
            2.0 * PI * lambda
        } else {
            0.0
        }),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Minimum sample count accepted by [`cap_measure_mc`].
pub const CAP_MC_MIN_SAMPLES: usize = 1_000;

fn sphere_first_coordinate(d: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut first = 0.0;
    let mut sq = 0.0;
    for i in 0..d {
        let z: f64 = rng.sample(StandardNormal);
        if i == 0 {
            first = z;
        }
        sq += z * z;
    }
    first / sq.sqrt()
}

/// Monte Carlo estimate of `σ_{d-1}(Q_{λ,t}(r))` for any `d ≥ 2`.
///
/// Points are drawn uniformly on the sphere of radius `λ` as normalised
/// Gaussian vectors; the estimate is `λ^{d-1}·|S^{d-1}|` times the fraction
/// within distance `t` of `r·e_1`, with the binomial standard error.
pub fn cap_measure_mc(c: CapSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    c.validate()?;
    if samples < CAP_MC_MIN_SAMPLES {
        return Err(invalid(
            "samples",
            format!("need at least {CAP_MC_MIN_SAMPLES}, got {samples}"),
        ));
    }
    let CapSpec { d, lambda, t, r } = c;
    let scale = lambda.powi(d as i32 - 1) * unit_sphere_area(d);
    let frac = MonteCarlo::new(samples, seed).estimate(|rng| {
        let u1 = sphere_first_coordinate(d, rng);
        let dist2 = lambda * lambda + r * r - 2.0 * lambda * r * u1;
        if dist2 <= t * t {
            1.0
        } else {
            0.0
        }
    });
    Ok(McEstimate {
        mean: scale * frac.mean,
        std_error: scale * frac.std_error,
        samples: frac.samples,
    })
}

/// Reusable Monte Carlo cap measures for one dimension.
///
/// Draws the first coordinate of `samples` uniform points on `S^{d-1}` once;
/// each query is then a binary search. Used where exact formulas are not
/// available (`d ≥ 4`) and many `(λ, t, r)` triples are needed.
#[derive(Debug, Clone)]
pub struct CapSampler {
    d: usize,
    sorted_u1: Vec<f64>,
    area: f64,
}

impl CapSampler {
    pub fn new(d: usize, samples: usize, seed: u64) -> Result<Self> {
        require(d >= 2, "d", "need d ≥ 2")?;
        require(samples >= CAP_MC_MIN_SAMPLES, "samples", "need at least 1000 samples")?;
        let mc = MonteCarlo::new(samples, seed);
        let chunks = samples.div_ceil(mc.chunk);
        let mut u: Vec<f64> = (0..chunks)
            .flat_map(|k| {
                let mut rng = mc.chunk_rng(k);
                let len = mc.chunk.min(samples - k * mc.chunk);
                (0..len)
                    .map(|_| sphere_first_coordinate(d, &mut rng))
                    .collect::<Vec<_>>()
            })
            .collect();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self {
            d,
            sorted_u1: u,
            area: unit_sphere_area(d),
        })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn measure(&self, lambda: f64, t: f64, r: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let scale = lambda.powi(self.d as i32 - 1) * self.area;
        if r == 0.0 {
            return if lambda <= t { scale } else { 0.0 };
        }
        // |λu - r e_1| ≤ t  ⇔  u_1 ≥ (λ² + r² - t²) / (2λr)
        let c = (lambda * lambda + r * r - t * t) / (2.0 * lambda * r);
        let n = self.sorted_u1.len();
        let below = self.sorted_u1.partition_point(|&u| u < c);
        scale * (n - below) as f64 / n as f64
    }
}

/// `σ_{d-1}(Q_{λ,t}(r))` by the exact formulas (`d ≤ 3`) or a shared Monte Carlo
/// sample (`d ≥ 4`).
#[derive(Debug, Clone)]
pub enum CapMeasure {
    Exact(usize),
    Sampled(CapSampler),
}

impl CapMeasure {
    pub fn for_dimension(d: usize, samples: usize, seed: u64) -> Result<Self> {
        match d {
            2 | 3 => Ok(CapMeasure::Exact(d)),
            _ => Ok(CapMeasure::Sampled(CapSampler::new(d, samples, seed)?)),
        }
    }

    pub fn measure(&self, lambda: f64, t: f64, r: f64) -> f64 {
        match self {
            CapMeasure::Exact(d) => cap_measure_exact(CapSpec::new(*d, lambda, t, r)).unwrap_or(0.0),
            CapMeasure::Sampled(s) => s.measure(lambda, t, r),
        }
    }
}

/// An interval on the `λ`-axis with explicit endpoint closure; possibly empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Span {
    fn from_bounds(lower: &[(f64, bool)], upper: &[(f64, bool)]) -> Self {
        // largest lower bound; among equal values the open one is binding
        let (mut lo, mut lo_closed) = lower[0];
        for &(v, c) in &lower[1..] {
            if v > lo || (v == lo && !c) {
                lo = v;
                lo_closed = c;
            }
        }
        let (mut hi, mut hi_closed) = upper[0];
        for &(v, c) in &upper[1..] {
            if v < hi || (v == hi && !c) {
                hi = v;
                hi_closed = c;
            }
        }
        Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

/// One of the three regions on which `σ_2(Q_{λ,t}(r))` is a partial cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    I1,
    I2,
    I3,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::I1 => "I1",
            Region::I2 => "I2",
            Region::I3 => "I3",
        }
    }
}

/// The four sub-intervals `I_0 … I_3` of the `λ`-axis for given `(r, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSplit {
    pub r: f64,
    pub t: f64,
    pub i0: Span,
    pub i1: Span,
    pub i2: Span,
    pub i3: Span,
}

impl RegionSplit {
    pub fn span(&self, region: Region) -> Span {
        match region {
            Region::I1 => self.i1,
            Region::I2 => self.i2,
            Region::I3 => self.i3,
        }
    }
}

/// Splits the `λ`-axis:
/// `I_0 = {λ < t-r}`, `I_1 = {|λ-r| < 3t/4, λ ≥ t-r}`,
/// `I_2 = {r + 3t/4 ≤ λ < r+t, λ ≥ t-r}`, `I_3 = {|r-t| ≤ λ ≤ r - 3t/4}`,
/// all intersected with `λ ≥ 0`.
pub fn split_regions(r: f64, t: f64) -> Result<RegionSplit> {
    require(r >= 0.0, "r", "must be nonnegative")?;
    require(t > 0.0, "t", "must be positive")?;
    let q = 0.75 * t;
    let nonneg = (0.0, true);
    let i0 = Span::from_bounds(&[nonneg], &[(t - r, false)]);
    let i1 = Span::from_bounds(&[nonneg, (r - q, false), (t - r, true)], &[(r + q, false)]);
    let i2 = Span::from_bounds(&[nonneg, (r + q, true), (t - r, true)], &[(r + t, false)]);
    let i3 = Span::from_bounds(&[nonneg, ((r - t).abs(), true)], &[(r - q, true)]);
    Ok(RegionSplit { r, t, i0, i1, i2, i3 })
}

/// A two-sided envelope `lower ≤ t² - (λ-r)² ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

impl Envelope {
    pub fn holds(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

fn region_kernel(r: f64, t: f64, lambda: f64, region: Region) -> Result<f64> {
    let split = split_regions(r, t)?;
    if !split.span(region).contains(lambda) {
        return Err(Error::OutsideRegion {
            region: region.name(),
            r,
            t,
            lambda,
        });
    }
    Ok(match region {
        Region::I1 => t * t,
        Region::I2 => t * (t - lambda + r),
        Region::I3 => t * (t + lambda - r),
    })
}

/// Envelope constants exactly as stated for the three regions:
/// `I_1: (7/16·t², t²)`, `I_2: (7/4·t(t-λ+r), t(t-λ+r))`,
/// `I_3: (7/4·t(t+λ-r), t(t+λ-r))`.
///
/// On `I_2` and `I_3` the stated pair is inverted (`7/4 > 1`); see
/// [`verified_bounds`] for the envelope that holds pointwise.
pub fn sandwich_bounds(r: f64, t: f64, lambda: f64, region: Region) -> Result<Envelope> {
    let k = region_kernel(r, t, lambda, region)?;
    Ok(match region {
        Region::I1 => Envelope {
            lower: 7.0 / 16.0 * k,
            upper: k,
        },
        Region::I2 | Region::I3 => Envelope {
            lower: 7.0 / 4.0 * k,
            upper: k,
        },
    })
}

/// The envelope that holds pointwise: on `I_2` and `I_3` one factor of
/// `t² - (λ-r)² = (t-λ+r)(t+λ-r)` lies in `[7t/4, 2t]`, so the value lies in
/// `[7/4, 2]` times the stated kernel.
pub fn verified_bounds(r: f64, t: f64, lambda: f64, region: Region) -> Result<Envelope> {
    let k = region_kernel(r, t, lambda, region)?;
    Ok(match region {
        Region::I1 => Envelope {
            lower: 7.0 / 16.0 * k,
            upper: k,
        },
        Region::I2 | Region::I3 => Envelope {
            lower: 7.0 / 4.0 * k,
            upper: 2.0 * k,
        },
    })
}

/// A uniformly random orthogonal matrix (rows), by Gram-Schmidt on Gaussian vectors.
pub fn random_orthogonal(d: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for q in &rows {
            let c = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
        }
        let n = norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|vi| *vi /= n);
            rows.push(v);
        }
    }
    rows
}

pub fn apply(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn omega_examples() {
        assert!(omega_contains(&[0.5, 0.0, 0.0], &[1.0, 0.0, 0.0], 1.0).unwrap());
        assert!(omega_contains(&[2.0, 0.0, 0.0], &[0.2, 0.0, 0.0], 1.0).unwrap());
        assert!(!omega_contains(&[2.0, 0.0, 0.0], &[0.0, 0.0, 0.01], 0.001).unwrap());
        assert!(omega_contains(&[1.0, 0.0], &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn omega_far_point_origin_excluded() {
        // x + h/t = 0 with |x| > 1
        assert!(!omega_contains(&[2.0, 0.0], &[-2.0, 0.0], 1.0).unwrap());
    }

    #[test]
    fn sphere_constants() {
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
    }

    #[test]
    fn cap_exact_examples() {
        let m = |d, l, t, r| cap_measure_exact(CapSpec::new(d, l, t, r)).unwrap();
        assert!((m(3, 1.0, 3.0, 1.0) - 4.0 * PI).abs() < 1e-12);
        assert_eq!(m(3, 5.0, 1.0, 1.0), 0.0);
        assert!((m(3, 1.0, 0.5, 1.0) - PI / 4.0).abs() < 1e-12);
        assert!((m(2, 1.0, 1.0, 1.0) - 2.0 * PI / 3.0).abs() < 1e-12);
        // r = 0: only full or empty
        assert!((m(3, 0.5, 1.0, 0.0) - PI).abs() < 1e-12);
        assert_eq!(m(3, 1.5, 1.0, 0.0), 0.0);
    }

    #[test]
    fn cap_exact_rejects() {
        assert!(matches!(
            cap_measure_exact(CapSpec::new(4, 1.0, 1.0, 1.0)),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(cap_measure_exact(CapSpec::new(3, -1.0, 1.0, 1.0)).is_err());
        assert!(cap_measure_exact(CapSpec::new(3, 1.0, 1.0, -1.0)).is_err());
        assert!(cap_measure_exact(CapSpec::new(3, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn cap_arccos_clamped_at_seams() {
        // λ = r + t exactly: argument is 1 up to rounding
        let v = cap_measure_exact(CapSpec::new(2, 0.3 + 0.1, 0.1, 0.3)).unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }

    #[test]
    fn cap_mc_full_sphere_and_small_sample_guard() {
        let e = cap_measure_mc(CapSpec::new(3, 1.0, 3.0, 1.0), 100_000, 1).unwrap();
        assert!((e.mean - 4.0 * PI).abs() <= 3.0 * e.std_error + 1e-12);
        assert!(cap_measure_mc(CapSpec::new(3, 1.0, 3.0, 1.0), 999, 1).is_err());
    }

    #[test]
    fn cap_mc_monotone_in_t_for_d5() {
        let a = cap_measure_mc(CapSpec::new(5, 1.0, 0.5, 1.0), 20_000, 3).unwrap();
        let b = cap_measure_mc(CapSpec::new(5, 1.0, 0.3, 1.0), 20_000, 3).unwrap();
        assert!(a.mean > 0.0);
        assert!(b.mean < a.mean);
    }

    #[test]
    fn cap_sampler_agrees_with_exact_in_3d() {
        let s = CapSampler::new(3, 200_000, 11).unwrap();
        for &(l, t, r) in &[(1.0, 0.5, 1.0), (0.2, 1.0, 0.5), (2.0, 0.3, 2.1)] {
            let exact = cap_measure_exact(CapSpec::new(3, l, t, r)).unwrap();
            let est = s.measure(l, t, r);
            let full = 4.0 * PI * l * l;
            assert!((est - exact).abs() < 0.01 * full, "({l},{t},{r})");
        }
    }

    #[test]
    fn split_examples() {
        let s = split_regions(1.0, 0.1).unwrap();
        assert!(s.i0.is_empty());
        assert!((s.i1.lo - 0.925).abs() < 1e-12 && (s.i1.hi - 1.075).abs() < 1e-12);
        assert!(!s.i1.lo_closed && !s.i1.hi_closed);
        assert!((s.i2.lo - 1.075).abs() < 1e-12 && (s.i2.hi - 1.1).abs() < 1e-12);
        assert!(s.i2.lo_closed && !s.i2.hi_closed);
        assert!((s.i3.lo - 0.9).abs() < 1e-12 && (s.i3.hi - 0.925).abs() < 1e-12);
        assert!(s.i3.lo_closed && s.i3.hi_closed);

        let s = split_regions(0.2, 1.0).unwrap();
        assert_eq!((s.i0.lo, s.i0.hi), (0.0, 0.8));
        assert!(s.i3.is_empty());

        let s = split_regions(0.0, 1.0).unwrap();
        assert_eq!((s.i0.lo, s.i0.hi), (0.0, 1.0));
        assert!(s.i1.is_empty() && s.i2.is_empty() && s.i3.is_empty());
    }

    #[test]
    fn sandwich_examples() {
        let e = sandwich_bounds(1.0, 0.1, 1.0, Region::I1).unwrap();
        assert!((e.lower - 0.004375).abs() < 1e-15);
        assert!((e.upper - 0.01).abs() < 1e-15);
        assert!(e.holds(0.01));

        let lambda = 1.08;
        let value = 0.01 - (lambda - 1.0f64).powi(2);
        assert!((value - 0.0036).abs() < 1e-12);
        let printed = sandwich_bounds(1.0, 0.1, lambda, Region::I2).unwrap();
        assert!((printed.upper - 0.002).abs() < 1e-12);
        assert!(!printed.holds(value), "stated I2 orientation is inverted");
        let verified = verified_bounds(1.0, 0.1, lambda, Region::I2).unwrap();
        assert!(verified.holds(value));

        assert!(matches!(
            sandwich_bounds(1.0, 0.1, 1.5, Region::I1),
            Err(Error::OutsideRegion { .. })
        ));
    }

    #[test]
    fn random_orthogonal_preserves_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_orthogonal(4, &mut rng);
        let x = [0.3, -1.0, 2.0, 0.5];
        assert!((norm(&apply(&m, &x)) - norm(&x)).abs() < 1e-12);
    }
}
