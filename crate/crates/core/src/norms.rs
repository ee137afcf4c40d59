//! Quasi-norms of radial profiles and the parameter hypotheses behind them.
//!
//! Every difference-based norm is evaluated on a fixed tensor grid: composite
//! Gauss-Legendre panels in `r` (graded toward 0 and the profile's kinks),
//! the trapezoid rule in `ln t`, and Gauss-Legendre panels for the inner `λ`
//! or `w` integrals. The inner quantities are tabulated once per `(r, t)` and
//! then combined in either order of integration, so the Lizorkin-Triebel and
//! Besov orders sum the same discrete table and coincide at `p = q` up to
//! rounding. Because the grid does not depend on the profile values, the
//! discrete functionals are exactly homogeneous and satisfy the discrete
//! (quasi-)triangle inequality.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require, Error, Result};
use crate::fourier::weighted_fourier_norm_profile;
use crate::geometry::{split_regions, CapMeasure, Span};
use crate::numerics::{graded_panels, partition, refine_sup, GaussLegendre, QuadratureConfig};
use crate::profiles::{nth_difference, RadialProfile, Support};
use crate::weights::Weight;

/// `σ_{p,q}(d) = d·max(0, 1/p - 1, 1/q - 1)`.
pub fn sigma(p: f64, q: f64, d: f64) -> f64 {
    d * 0f64.max(1.0 / p - 1.0).max(1.0 / q - 1.0)
}

/// Order of quantification: Lizorkin-Triebel (`L_p` outside) or Besov (`ℓ_q`/`dt/t` outside).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scale {
    F,
    B,
}

/// The tuple `(d, s, p, q, u, v, T, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothnessParams {
    pub d: usize,
    pub s: f64,
    #[serde(with = "crate::serde_ext")]
    pub p: f64,
    #[serde(with = "crate::serde_ext")]
    pub q: f64,
    pub u: f64,
    #[serde(with = "crate::serde_ext")]
    pub v: f64,
    /// Upper limit of the `dt/t` integrals.
    #[serde(rename = "T")]
    pub t_upper: f64,
    /// Difference order.
    #[serde(rename = "N")]
    pub n: usize,
}

impl Default for SmoothnessParams {
    fn default() -> Self {
        Self {
            d: 3,
            s: 0.5,
            p: 2.0,
            q: 2.0,
            u: 1.0,
            v: 1.0,
            t_upper: 1.0,
            n: 1,
        }
    }
}

impl SmoothnessParams {
    pub fn new(d: usize, s: f64, p: f64, q: f64) -> Self {
        Self {
            d,
            s,
            p,
            q,
            ..Self::default()
        }
    }

    pub fn with_inner(mut self, u: f64, v: f64) -> Self {
        self.u = u;
        self.v = v;
        self
    }

    pub fn with_order(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_t_upper(mut self, t: f64) -> Self {
        self.t_upper = t;
        self
    }

    /// Structural requirements without which no norm can be evaluated.
    pub fn check_structure(&self) -> Result<()> {
        require(self.d >= 2, "d", "need d ≥ 2")?;
        require(self.s.is_finite(), "s", "must be finite")?;
        require(self.p > 0.0, "p", "must be positive")?;
        require(self.q > 0.0, "q", "must be positive")?;
        require(self.u > 0.0 && self.u.is_finite(), "u", "must be positive and finite")?;
        require(self.v > 0.0, "v", "must be positive")?;
        require(self.t_upper > 0.0 && self.t_upper.is_finite(), "T", "must be positive")?;
        require(self.n >= 1, "N", "need N ≥ 1")
    }
}

/// Which quasi-norm to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// `‖g | L_p(ℝ, |t|^{d-1})‖`
    WLp,
    /// Sup-difference form, `L_p` outside.
    FSharp,
    /// Sup-difference form, `dt/t` outside.
    BSharp,
    /// Cap-measure form in dimension `d`, `L_p` outside.
    FTriangle,
    BTriangle,
    /// Explicit five-term form in dimension 3.
    FTriangle3d,
    BTriangle3d,
    /// `N`-th differences on the line with the smooth weight `ρ_{d-1}`.
    FRhoSmooth,
    BRhoSmooth,
    /// Dyadic Fourier bands with the weight `|t|^{d-1}`.
    FFourierWeighted,
    BFourierWeighted,
    /// `‖g‖ + ‖g'‖` in `L_p(|t|^{d-1})`.
    SobolevW1p,
    /// The same with `p = 2`.
    H1Radial,
}

impl NormKind {
    pub const ALL: [NormKind; 13] = [
        NormKind::WLp,
        NormKind::FSharp,
        NormKind::BSharp,
        NormKind::FTriangle,
        NormKind::BTriangle,
        NormKind::FTriangle3d,
        NormKind::BTriangle3d,
        NormKind::FRhoSmooth,
        NormKind::BRhoSmooth,
        NormKind::FFourierWeighted,
        NormKind::BFourierWeighted,
        NormKind::SobolevW1p,
        NormKind::H1Radial,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            NormKind::WLp => "w-lp",
            NormKind::FSharp => "f-sharp",
            NormKind::BSharp => "b-sharp",
            NormKind::FTriangle => "f-triangle",
            NormKind::BTriangle => "b-triangle",
            NormKind::FTriangle3d => "f-triangle3d",
            NormKind::BTriangle3d => "b-triangle3d",
            NormKind::FRhoSmooth => "f-rho-smooth",
            NormKind::BRhoSmooth => "b-rho-smooth",
            NormKind::FFourierWeighted => "f-fourier-weighted",
            NormKind::BFourierWeighted => "b-fourier-weighted",
            NormKind::SobolevW1p => "sobolev-w1p",
            NormKind::H1Radial => "h1-radial",
        }
    }

    /// Whether the norm is built from differences with `s < 1` (or `s < N`).
    pub fn is_difference_based(self) -> bool {
        !matches!(
            self,
            NormKind::WLp
                | NormKind::FFourierWeighted
                | NormKind::BFourierWeighted
                | NormKind::SobolevW1p
                | NormKind::H1Radial
        )
    }

    pub fn scale(self) -> Option<Scale> {
        match self {
            NormKind::FSharp
            | NormKind::FTriangle
            | NormKind::FTriangle3d
            | NormKind::FRhoSmooth
            | NormKind::FFourierWeighted => Some(Scale::F),
            NormKind::BSharp
            | NormKind::BTriangle
            | NormKind::BTriangle3d
            | NormKind::BRhoSmooth
            | NormKind::BFourierWeighted => Some(Scale::B),
            _ => None,
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        NormKind::ALL
            .into_iter()
            .find(|k| k.tag() == key)
            .ok_or_else(|| invalid("kind", format!("unknown norm kind `{s}`")))
    }
}

/// One violated inequality: its symbolic form and the numbers that broke it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub inequality: String,
    pub detail: String,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Hypothesis {
    Pass,
    Fail { violated: Vec<Violation> },
}

impl Hypothesis {
    pub fn is_pass(&self) -> bool {
        matches!(self, Hypothesis::Pass)
    }

    pub fn violated(&self) -> &[Violation] {
        match self {
            Hypothesis::Pass => &[],
            Hypothesis::Fail { violated } => violated,
        }
    }

    /// Symbolic forms of the violated inequalities.
    pub fn names(&self) -> Vec<&str> {
        self.violated().iter().map(|v| v.inequality.as_str()).collect()
    }

    fn from_violations(violated: Vec<Violation>) -> Self {
        if violated.is_empty() {
            Hypothesis::Pass
        } else {
            Hypothesis::Fail { violated }
        }
    }

    /// Both hypotheses must hold.
    pub fn and(self, other: Hypothesis) -> Hypothesis {
        let mut v = self.violated().to_vec();
        v.extend(other.violated().iter().cloned());
        Hypothesis::from_violations(v)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Pass => f.write_str("pass"),
            Hypothesis::Fail { violated } => {
                f.write_str("fail: ")?;
                for (i, v) in violated.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{} ({})", v.inequality, v.detail)?;
                }
                Ok(())
            }
        }
    }
}

struct Checks(Vec<Violation>);

impl Checks {
    fn need(&mut self, ok: bool, inequality: &str, detail: impl FnOnce() -> String) {
        if !ok {
            self.0.push(Violation {
                inequality: inequality.to_string(),
                detail: detail(),
            });
        }
    }

    fn finish(self) -> Hypothesis {
        Hypothesis::from_violations(self.0)
    }
}

fn inv(x: f64) -> f64 {
    1.0 / x
}

/// Checks shared by every difference characterisation of the trace spaces.
fn trace_checks(c: &mut Checks, pr: &SmoothnessParams) {
    let d = pr.d as f64;
    let (s, p) = (pr.s, pr.p);
    c.need(s < 1.0, "s < 1", || format!("s = {s}"));
    let guard = sigma(p, p, d);
    c.need(s > guard, "s > sigma_{p,p}(d)", || {
        format!("sigma_{{p,p}}(d) = {guard} >= s = {s}")
    });
}

fn inner_exponent_checks(c: &mut Checks, pr: &SmoothnessParams, v_finite: bool) {
    let (u, v) = (pr.u, pr.v);
    if v_finite {
        c.need(v >= 1.0 && v.is_finite(), "1 <= v < inf", || format!("v = {v}"));
    } else {
        c.need(v >= 1.0, "1 <= v <= inf", || format!("v = {v}"));
    }
    c.need(u > 0.0 && u <= v, "0 < u <= v", || format!("u = {u}, v = {v}"));
}

/// The hypothesis of the characterisation behind `kind`.
///
/// Returns every violated inequality; the computation of a norm is never
/// blocked by a failed hypothesis, only flagged.
pub fn validate(pr: &SmoothnessParams, kind: NormKind) -> Hypothesis {
    let mut c = Checks(Vec::new());
    let d = pr.d as f64;
    let (s, p, q) = (pr.s, pr.p, pr.q);
    c.need(pr.d >= 2, "d >= 2", || format!("d = {}", pr.d));
    c.need(p > 0.0, "0 < p", || format!("p = {p}"));
    c.need(q > 0.0, "0 < q", || format!("q = {q}"));
    match kind {
        NormKind::WLp => {}
        NormKind::FSharp => {
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            let lo = d * inv(p).max(inv(q));
            c.need(lo < s, "d*max(1/p, 1/q) < s", || {
                format!("d*max(1/p, 1/q) = {lo} >= s = {s}")
            });
            trace_checks(&mut c, pr);
        }
        NormKind::BSharp => {
            let lo = d / p;
            c.need(lo < s, "d/p < s", || format!("d/p = {lo} >= s = {s}"));
            trace_checks(&mut c, pr);
        }
        NormKind::FTriangle | NormKind::FTriangle3d => {
            let label = if kind == NormKind::FTriangle3d {
                c.need(pr.d == 3, "d = 3", || format!("d = {}", pr.d));
                "3*max(0, 1/p - 1/v, 1/q - 1/v) < s"
            } else {
                "d*max(0, 1/p - 1/v, 1/q - 1/v) < s"
            };
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            inner_exponent_checks(&mut c, pr, true);
            let v = pr.v;
            let lo = d * 0f64.max(inv(p) - inv(v)).max(inv(q) - inv(v));
            c.need(lo < s, label, || format!("lower bound {lo} >= s = {s}"));
            trace_checks(&mut c, pr);
        }
        NormKind::BTriangle | NormKind::BTriangle3d => {
            let label = if kind == NormKind::BTriangle3d {
                c.need(pr.d == 3, "d = 3", || format!("d = {}", pr.d));
                "3*max(0, 1/p - 1/v) < s"
            } else {
                "d*max(0, 1/p - 1/v) < s"
            };
            inner_exponent_checks(&mut c, pr, true);
            let lo = d * 0f64.max(inv(p) - inv(pr.v));
            c.need(lo < s, label, || format!("lower bound {lo} >= s = {s}"));
            trace_checks(&mut c, pr);
        }
        NormKind::FRhoSmooth => {
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            c.need(q.is_finite(), "q < inf", || "q = inf".into());
            let lo = sigma(p, q, 1.0);
            c.need(lo < s, "sigma_{p,q}(1) < s", || {
                format!("sigma_{{p,q}}(1) = {lo} >= s = {s}")
            });
            c.need(s < pr.n as f64, "s < N", || format!("s = {s}, N = {}", pr.n));
        }
        NormKind::BRhoSmooth => {
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            let lo = sigma(p, p, 1.0);
            c.need(lo < s, "sigma_{p,p}(1) < s", || {
                format!("sigma_{{p,p}}(1) = {lo} >= s = {s}")
            });
            c.need(s < pr.n as f64, "s < N", || format!("s = {s}, N = {}", pr.n));
        }
        NormKind::FFourierWeighted => {
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            let lo = sigma(1.0, q, d);
            c.need(s > lo, "s > sigma_{1,q}(d)", || {
                format!("sigma_{{1,q}}(d) = {lo} >= s = {s}")
            });
            let edge = d * (inv(p) - inv(d));
            c.need(
                s > edge || (s == edge && p <= 1.0),
                "s > d*(1/p - 1/d), or equality with p <= 1",
                || format!("d*(1/p - 1/d) = {edge}, s = {s}, p = {p}"),
            );
        }
        NormKind::BFourierWeighted => {
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            let edge = d * (inv(p) - inv(d));
            c.need(
                s > edge || (s == edge && q <= 1.0),
                "s > d*(1/p - 1/d), or equality with q <= 1",
                || format!("d*(1/p - 1/d) = {edge}, s = {s}, q = {q}"),
            );
        }
        NormKind::SobolevW1p => {
            c.need(p >= 1.0 && p.is_finite(), "1 <= p < inf", || format!("p = {p}"));
        }
        NormKind::H1Radial => {
            c.need(p == 2.0, "p = 2", || format!("p = {p}"));
        }
    }
    c.finish()
}

/// Hypothesis of the `N`-th order characterisations through the means over
/// `Ω_t(x)`: `d·max(0, 1/p - 1/v, 1/q - 1/v) < s < N` for `F`,
/// `d·max(0, 1/p - 1/v) < s < N` for `B`.
pub fn validate_higher_order(pr: &SmoothnessParams, scale: Scale) -> Hypothesis {
    let mut c = Checks(Vec::new());
    let d = pr.d as f64;
    let (s, p, q, v) = (pr.s, pr.p, pr.q, pr.v);
    c.need(pr.d >= 2, "d >= 2", || format!("d = {}", pr.d));
    inner_exponent_checks(&mut c, pr, false);
    let (lo, label) = match scale {
        Scale::F => {
            c.need(p.is_finite(), "p < inf", || "p = inf".into());
            (
                d * 0f64.max(inv(p) - inv(v)).max(inv(q) - inv(v)),
                "d*max(0, 1/p - 1/v, 1/q - 1/v) < s",
            )
        }
        Scale::B => (d * 0f64.max(inv(p) - inv(v)), "d*max(0, 1/p - 1/v) < s"),
    };
    c.need(lo < s, label, || format!("lower bound {lo} >= s = {s}"));
    c.need(s < pr.n as f64, "s < N", || format!("s = {s}, N = {}", pr.n));
    c.finish()
}

/// Hypothesis of the characterisation of `F^s_{p,q}(ℝ, |t|²)` by the explicit
/// three-dimensional five-term norm: `3/2 < p < ∞`, `1 ≤ v < ∞`, `0 < u ≤ v`,
/// `3·max(0, 1/p - 1/3, 1/p - 1/v, 1/q - 1/v) < s < 1`.
pub fn validate_weighted_3d(pr: &SmoothnessParams) -> Hypothesis {
    let mut c = Checks(Vec::new());
    let (s, p, q, v) = (pr.s, pr.p, pr.q, pr.v);
    c.need(p > 1.5 && p.is_finite(), "3/2 < p < inf", || format!("p = {p}"));
    c.need(q > 0.0, "0 < q", || format!("q = {q}"));
    inner_exponent_checks(&mut c, pr, true);
    let lo = 3.0 * 0f64.max(inv(p) - 1.0 / 3.0).max(inv(p) - inv(v)).max(inv(q) - inv(v));
    c.need(lo < s, "3*max(0, 1/p - 1/3, 1/p - 1/v, 1/q - 1/v) < s", || {
        format!("lower bound {lo} >= s = {s}")
    });
    c.need(s < 1.0, "s < 1", || format!("s = {s}"));
    c.finish()
}

/// A named contribution to a norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

/// A computed quasi-norm with its breakdown, error estimate and hypothesis verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: NormKind,
    pub params: SmoothnessParams,
    pub value: f64,
    pub terms: Vec<Term>,
    pub numeric_error: f64,
    pub hypothesis: Hypothesis,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl NormReport {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

/// Constant `C` in `‖g₁ + g₂‖ ≤ C(‖g₁‖ + ‖g₂‖)` for the grid functionals:
/// each exponent `e < 1` among `p, q, u` costs a factor `2^{1/e - 1}`.
pub fn quasi_triangle_constant(pr: &SmoothnessParams) -> f64 {
    let excess: f64 = [pr.p, pr.q, pr.u].iter().map(|&e| (1.0 / e - 1.0).max(0.0)).sum();
    2f64.powf(excess)
}

// ---------------------------------------------------------------------------
// Grids and tables

const R_NODES: usize = 4;
const MAX_GRADED_KINKS: usize = 8;

/// Outer rule on `[0, radius]`, graded toward 0, the kinks and the support edge.
fn outer_rule(g: &RadialProfile, extra: f64, cfg: &QuadratureConfig) -> Vec<(f64, f64)> {
    let radius = g.support().effective_radius() + extra;
    let kinks: Vec<f64> = g.kinks().iter().copied().filter(|&k| k > 0.0 && k < radius).collect();
    let mut graded = vec![0.0];
    if kinks.len() <= MAX_GRADED_KINKS {
        graded.extend(&kinks);
    }
    if let Support::Bounded(r) = g.support() {
        graded.push(r);
    }
    let mut cuts = graded_panels(0.0, radius, cfg.r_panels_per_unit, &graded);
    cuts.extend(&kinks);
    let cuts = partition(0.0, radius, cuts);
    GaussLegendre::new(R_NODES).composite(&cuts)
}

struct TGrid {
    nodes: Vec<f64>,
    fine: Vec<f64>,
    coarse: Vec<f64>,
}

impl TGrid {
    fn new(pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<Self> {
        let grid = cfg.t_grid.with_t_max(pr.t_upper);
        grid.validate()?;
        let rule = grid.log_rule();
        let coarse = rule.coarse_weights();
        Ok(Self {
            nodes: rule.nodes,
            fine: rule.weights,
            coarse,
        })
    }
}

/// One difference term: `m[i][k]` is the inner quantity at `(r_i, t_k)`,
/// `outer[i]` its weight at `r_i` (quadrature weight included), and
/// `t_scale` a constant factor on the `dt/t` measure.
struct DiffTerm {
    name: &'static str,
    outer: Vec<f64>,
    m: Vec<Vec<f64>>,
    t_scale: f64,
}

/// `∫_0^{t_0} J dt/t` for `J ≈ J_0 (t/t_0)^α`, with `α` read off the first two
/// nodes and floored at 0.05 so a non-decaying integrand still registers.
fn log_tail(j0: f64, j1: f64, t0: f64, t1: f64) -> f64 {
    if j0 <= 0.0 {
        return 0.0;
    }
    let alpha = if j1 > 0.0 { (j1 / j0).ln() / (t1 / t0).ln() } else { 1.0 };
    j0 / alpha.max(0.05)
}

fn power_sum(terms: impl Iterator<Item = (f64, f64)>, e: f64) -> f64 {
    // Σ w·x^e, or max x (over w > 0) when e = ∞
    if e.is_infinite() {
        terms.filter(|(w, _)| *w > 0.0).fold(0.0, |acc: f64, (_, x)| acc.max(x))
    } else {
        terms.map(|(w, x)| if x == 0.0 { 0.0 } else { w * x.powf(e) }).sum()
    }
}

fn root(sum: f64, e: f64) -> f64 {
    if e.is_infinite() {
        sum
    } else {
        sum.powf(1.0 / e)
    }
}

/// Combines a term in the requested order. `tail` adds the analytic
/// estimate of the truncated `(0, t_min)` part.
#[allow(clippy::too_many_arguments)]
fn aggregate(term: &DiffTerm, ts: &[f64], tw: &[f64], s: f64, p: f64, q: f64, scale: Scale, tail: bool) -> f64 {
    let tq = |k: usize| ts[k].powf(-s);
    match scale {
        Scale::F => {
            let rows = term.m.iter().map(|row| {
                let scaled = (0..ts.len()).map(|k| (term.t_scale * tw[k], tq(k) * row[k]));
                let mut inner = power_sum(scaled, q);
                if tail && q.is_finite() && ts.len() > 1 {
                    let j = |k: usize| (tq(k) * row[k]).powf(q);
                    inner += term.t_scale * log_tail(j(0), j(1), ts[0], ts[1]);
                }
                root(inner, q)
            });
            let weighted = term.outer.iter().copied().zip(rows);
            root(power_sum(weighted, p), p)
        }
        Scale::B => {
            let cols: Vec<f64> = (0..ts.len())
                .map(|k| {
                    let col = term.outer.iter().zip(&term.m).map(|(&w, row)| (w, row[k]));
                    root(power_sum(col, p), p)
                })
                .collect();
            let scaled = (0..ts.len()).map(|k| (term.t_scale * tw[k], tq(k) * cols[k]));
            let mut outer = power_sum(scaled, q);
            if tail && q.is_finite() && ts.len() > 1 {
                let j = |k: usize| (tq(k) * cols[k]).powf(q);
                outer += term.t_scale * log_tail(j(0), j(1), ts[0], ts[1]);
            }
            root(outer, q)
        }
    }
}

/// Value of each difference term plus a combined error estimate: the
/// fine/coarse `ln t` trapezoid difference (Richardson, `/3`) and the
/// truncation tail below `t_min`.
fn evaluate_terms(terms: &[DiffTerm], tg: &TGrid, pr: &SmoothnessParams, scale: Scale) -> (Vec<Term>, f64) {
    let mut out = Vec::new();
    let mut err = 0.0;
    for term in terms {
        let fine = aggregate(term, &tg.nodes, &tg.fine, pr.s, pr.p, pr.q, scale, false);
        let coarse = aggregate(term, &tg.nodes, &tg.coarse, pr.s, pr.p, pr.q, scale, false);
        let tailed = aggregate(term, &tg.nodes, &tg.fine, pr.s, pr.p, pr.q, scale, true);
        err += (fine - coarse).abs() / 3.0 + (tailed - fine).abs();
        out.push(Term {
            name: term.name.to_string(),
            value: fine,
        });
    }
    (out, err)
}

/// `(Σ w·ω(r)|h(r)|^p)^{1/p}` over an outer rule; `full_line` doubles the
/// weight to account for `r < 0` by evenness.
fn weighted_lp(
    rule: &[(f64, f64)],
    h: impl Fn(f64) -> f64,
    weight: impl Fn(f64) -> f64,
    p: f64,
    full_line: bool,
) -> f64 {
    let factor = if full_line { 2.0 } else { 1.0 };
    let pts = rule.iter().map(|&(r, w)| (factor * w * weight(r), h(r).abs()));
    root(power_sum(pts, p), p)
}

fn report(kind: NormKind, pr: &SmoothnessParams, lp: f64, diff_terms: Vec<Term>, numeric_error: f64) -> NormReport {
    let mut terms = vec![Term {
        name: "weighted_lp".into(),
        value: lp,
    }];
    terms.extend(diff_terms);
    let value = terms.iter().map(|t| t.value).sum();
    NormReport {
        kind,
        params: *pr,
        value,
        terms,
        numeric_error,
        hypothesis: validate(pr, kind),
        warnings: Vec::new(),
    }
}

/// Gauss-Legendre nodes over `[lo, hi]` split at the given points; for `d = 2`
/// the pieces next to the square-root singularities of the arc length are
/// graded geometrically.
fn inner_nodes(
    gl: &GaussLegendre,
    lo: f64,
    hi: f64,
    cuts: impl IntoIterator<Item = f64>,
    graded_ends: bool,
    out: &mut Vec<(f64, f64)>,
) {
    out.clear();
    if !(hi > lo) {
        return;
    }
    let pieces = partition(lo, hi, cuts);
    for w in pieces.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        if graded_ends {
            let len = b - a;
            let mut sub = vec![a, b];
            for f in [0.1, 0.01, 0.001] {
                sub.push(a + f * len);
                sub.push(b - f * len);
            }
            let sub = partition(a, b, sub);
            for s in sub.windows(2) {
                gl.push_mapped(s[0], s[1], out);
            }
        } else {
            gl.push_mapped(a, b, out);
        }
    }
}

fn kinks_in(g: &RadialProfile, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
    g.kinks().iter().copied().filter(move |&k| k > lo && k < hi)
}

// ---------------------------------------------------------------------------
// Individual norms

fn weighted_lp_report(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> NormReport {
    let rule = outer_rule(g, 0.0, cfg);
    let w = Weight::radial(pr.d);
    let lp = weighted_lp(&rule, |r| g.eval(r), |r| w.eval(r), pr.p, true);
    let mut rep = report(NormKind::WLp, pr, lp, Vec::new(), 0.0);
    rep.numeric_error = lp * cfg.rel_tol;
    rep
}

/// `‖g | L_p(ℝ, |t|^{d-1})‖`.
pub fn norm_weighted_lp(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    pr.check_structure()?;
    cfg.validate()?;
    Ok(weighted_lp_report(g, pr, cfg))
}

/// `S(r, t) = sup_{|w| ≤ t} |g(r+w) - g(r)|` for all `t` of the grid, grown
/// annulus by annulus so it is monotone in `t` by construction.
fn sup_differences(g: &RadialProfile, r: f64, ts: &[f64]) -> Vec<f64> {
    let base = g.eval(r);
    let diff = |w: f64| (g.eval(r + w) - base).abs();
    let mut out = Vec::with_capacity(ts.len());
    let mut running = 0.0f64;
    let mut prev = 0.0;
    for &t in ts {
        let (_, a) = refine_sup(diff, prev, t, 8, 3);
        let (_, b) = refine_sup(diff, -t, -prev, 8, 3);
        running = running.max(a).max(b);
        out.push(running);
        prev = t;
    }
    out
}

fn sharp(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig, scale: Scale) -> Result<NormReport> {
    pr.check_structure()?;
    cfg.validate()?;
    let tg = TGrid::new(pr, cfg)?;
    let rule = outer_rule(g, pr.t_upper, cfg);
    let dm1 = pr.d as i32 - 1;
    let m: Vec<Vec<f64>> = rule
        .par_iter()
        .map(|&(r, _)| sup_differences(g, r, &tg.nodes))
        .collect();
    let outer = rule.iter().map(|&(r, w)| 2.0 * w * r.powi(dm1)).collect();
    let term = DiffTerm {
        name: "sup_difference",
        outer,
        m,
        t_scale: 1.0,
    };
    let (terms, err) = evaluate_terms(&[term], &tg, pr, scale);
    let w = Weight::radial(pr.d);
    let lp = weighted_lp(&rule, |r| g.eval(r), |r| w.eval(r), pr.p, true);
    let kind = if scale == Scale::F {
        NormKind::FSharp
    } else {
        NormKind::BSharp
    };
    Ok(report(kind, pr, lp, terms, err))
}

/// `‖g‖^#` in the Lizorkin-Triebel order:
/// `‖g|L_p(|t|^{d-1})‖ + (∫_ℝ |r|^{d-1}[∫_0^T t^{-sq} sup_{|w|≤t}|g(r+w)-g(r)|^q dt/t]^{p/q} dr)^{1/p}`.
pub fn norm_sharp_f(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    sharp(g, pr, cfg, Scale::F)
}

/// `‖g‖^#` in the Besov order: `dt/t` outside the weighted `L_p` norm of the
/// sup-difference.
pub fn norm_sharp_b(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    sharp(g, pr, cfg, Scale::B)
}

fn triangle(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig, scale: Scale) -> Result<NormReport> {
    pr.check_structure()?;
    cfg.validate()?;
    let tg = TGrid::new(pr, cfg)?;
    let rule = outer_rule(g, pr.t_upper, cfg);
    let caps = CapMeasure::for_dimension(pr.d, cfg.mc_samples.max(10_000), cfg.seed)?;
    let gl = GaussLegendre::new(cfg.inner_nodes);
    let d = pr.d as i32;
    let u = pr.u;
    let graded = pr.d == 2;
    let m: Vec<Vec<f64>> = rule
        .par_iter()
        .map(|&(r, _)| {
            let gr = g.eval(r);
            let mut nodes = Vec::new();
            tg.nodes
                .iter()
                .map(|&t| {
                    let lo = (r - t).max(0.0);
                    let hi = r + t;
                    let cuts = [r, t - r, (r - t).abs()].into_iter().chain(kinks_in(g, lo, hi));
                    inner_nodes(&gl, lo, hi, cuts, graded, &mut nodes);
                    let a: f64 = nodes
                        .iter()
                        .map(|&(l, w)| {
                            let dg = (g.eval(l) - gr).abs();
                            if dg == 0.0 {
                                0.0
                            } else {
                                w * dg.powf(u) * caps.measure(l, t, r)
                            }
                        })
                        .sum();
                    (t.powi(-d) * a).powf(1.0 / u)
                })
                .collect()
        })
        .collect();
    let outer = rule.iter().map(|&(r, w)| w * r.powi(d - 1)).collect();
    let term = DiffTerm {
        name: "cap_difference",
        outer,
        m,
        t_scale: 1.0,
    };
    let (terms, err) = evaluate_terms(&[term], &tg, pr, scale);
    let w = Weight::radial(pr.d);
    let lp = weighted_lp(&rule, |r| g.eval(r), |r| w.eval(r), pr.p, true);
    let kind = if scale == Scale::F {
        NormKind::FTriangle
    } else {
        NormKind::BTriangle
    };
    Ok(report(kind, pr, lp, terms, err))
}

/// `‖g‖^△` in dimension `d`, Lizorkin-Triebel order:
/// `‖g|L_p(|t|^{d-1})‖ + (∫_0^∞ r^{d-1}[∫_0^T t^{-sq}(t^{-d}∫|g(λ)-g(r)|^u σ_{d-1}(Q_{λ,t}(r)) dλ)^{q/u} dt/t]^{p/q} dr)^{1/p}`.
///
/// Cap measures are exact for `d ∈ {2, 3}` and drawn from one shared Monte
/// Carlo sample (`cfg.mc_samples`, `cfg.seed`) for `d ≥ 4`.
pub fn norm_triangle_f(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    triangle(g, pr, cfg, Scale::F)
}

/// `‖g‖^△` in dimension `d`, Besov order.
pub fn norm_triangle_b(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    triangle(g, pr, cfg, Scale::B)
}

/// Names of the four difference terms of the three-dimensional norm.
pub const TRIANGLE3D_TERMS: [&str; 4] = ["I0", "I1", "I2", "I3"];

fn triangle3d(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig, scale: Scale) -> Result<NormReport> {
    pr.check_structure()?;
    if pr.d != 3 {
        return Err(Error::UnsupportedDimension(pr.d));
    }
    cfg.validate()?;
    let tg = TGrid::new(pr, cfg)?;
    let rule = outer_rule(g, pr.t_upper, cfg);
    let gl = GaussLegendre::new(cfg.inner_nodes);
    let u = pr.u;
    // m[region][r][t]
    let per_r: Vec<[Vec<f64>; 4]> = rule
        .par_iter()
        .map(|&(r, _)| {
            let gr = g.eval(r);
            let mut nodes = Vec::new();
            let mut rows: [Vec<f64>; 4] = Default::default();
            for &t in &tg.nodes {
                let split = split_regions(r, t).expect("r ≥ 0 and t > 0 on the grid");
                let spans: [Span; 4] = [split.i0, split.i1, split.i2, split.i3];
                for (k, span) in spans.iter().enumerate() {
                    let value = if span.is_empty() || span.measure() == 0.0 {
                        0.0
                    } else {
                        inner_nodes(&gl, span.lo, span.hi, kinks_in(g, span.lo, span.hi), false, &mut nodes);
                        let a: f64 = nodes
                            .iter()
                            .map(|&(l, w)| {
                                let dg = (g.eval(l) - gr).abs();
                                if dg == 0.0 {
                                    return 0.0;
                                }
                                let kernel = match k {
                                    0 => l * l,
                                    1 => l,
                                    2 => l * (t - l + r),
                                    _ => l * (t + l - r),
                                };
                                w * kernel * dg.powf(u)
                            })
                            .sum();
                        let norm = match k {
                            0 => t.powi(-3),
                            1 => 1.0 / t,
                            _ => t.powi(-2),
                        };
                        (norm * a).max(0.0).powf(1.0 / u)
                    };
                    rows[k].push(value);
                }
            }
            rows
        })
        .collect();
    let outer_exp = if pr.p.is_finite() { 2.0 - pr.p / u } else { 0.0 };
    let terms: Vec<DiffTerm> = (0..4)
        .map(|k| {
            let outer = rule
                .iter()
                .map(|&(r, w)| if k == 0 { w * r * r } else { w * r.powf(outer_exp) })
                .collect();
            DiffTerm {
                name: TRIANGLE3D_TERMS[k],
                outer,
                m: per_r.iter().map(|rows| rows[k].clone()).collect(),
                t_scale: 1.0,
            }
        })
        .collect();
    let (terms, err) = evaluate_terms(&terms, &tg, pr, scale);
    let lp = weighted_lp(&rule, |r| g.eval(r), |r| r * r, pr.p, false);
    let kind = if scale == Scale::F {
        NormKind::FTriangle3d
    } else {
        NormKind::BTriangle3d
    };
    Ok(report(kind, pr, lp, terms, err))
}

/// The explicit five-term three-dimensional norm in the Lizorkin-Triebel order:
/// `(∫_0^∞ r²|g|^p)^{1/p}` plus one term for each region `I_0 … I_3` of the
/// `λ`-axis, with kernels `λ²/t³`, `λ/t`, `λ(t-λ+r)/t²`, `λ(t+λ-r)/t²` and
/// outer weights `r²` (for `I_0`) and `r^{2-p/u}` (for the rest).
///
/// The `I_0` term is displayed over `0 < r < 1`, `r < t < 1`; since `I_0(r, t)`
/// is empty for `t ≤ r`, integrating it over the full grid gives exactly that
/// restricted domain.
pub fn norm_triangle3d_f(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    triangle3d(g, pr, cfg, Scale::F)
}

/// The five-term three-dimensional norm in the Besov order; its `I_0` term
/// runs over `0 < r < t`, which again is where `I_0(r, t)` is nonempty.
pub fn norm_triangle3d_b(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    triangle3d(g, pr, cfg, Scale::B)
}

fn difference_cuts(g: &RadialProfile, x: f64, order: usize, t: f64) -> Vec<f64> {
    // steps w at which x + j·w crosses a kink or the origin
    let mut cuts = vec![0.0];
    let mut targets: Vec<f64> = g.kinks().iter().flat_map(|&k| [k, -k]).collect();
    targets.push(0.0);
    if let Support::Bounded(r) = g.support() {
        targets.push(r);
        targets.push(-r);
    }
    if targets.len() > 4 * MAX_GRADED_KINKS {
        return cuts;
    }
    for j in 1..=order {
        for &k in &targets {
            let w = (k - x) / j as f64;
            if w.abs() < t {
                cuts.push(w);
            }
        }
    }
    cuts
}

fn rho_smooth_f(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    pr.check_structure()?;
    cfg.validate()?;
    let tg = TGrid::new(pr, cfg)?;
    let n = pr.n;
    let rule = outer_rule(g, n as f64 * pr.t_upper, cfg);
    let gl = GaussLegendre::new(cfg.inner_nodes);
    let rho = Weight::smooth_radial(pr.d);
    let ev = |y: f64| g.eval(y);
    let m: Vec<Vec<f64>> = rule
        .par_iter()
        .map(|&(x, _)| {
            let mut nodes = Vec::new();
            tg.nodes
                .iter()
                .map(|&t| {
                    inner_nodes(&gl, -t, t, difference_cuts(g, x, n, t), false, &mut nodes);
                    let a: f64 = nodes
                        .iter()
                        .map(|&(w, wt)| wt * nth_difference(ev, n, w, x).abs())
                        .sum();
                    a / t
                })
                .collect()
        })
        .collect();
    let outer = rule.iter().map(|&(x, w)| 2.0 * w * rho.eval(x)).collect();
    let term = DiffTerm {
        name: "difference",
        outer,
        m,
        t_scale: 1.0,
    };
    let (terms, err) = evaluate_terms(&[term], &tg, pr, Scale::F);
    let lp = weighted_lp(&rule, ev, |r| rho.eval(r), pr.p, true);
    Ok(report(NormKind::FRhoSmooth, pr, lp, terms, err))
}

fn rho_smooth_b(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    pr.check_structure()?;
    cfg.validate()?;
    let tg = TGrid::new(pr, cfg)?;
    let n = pr.n;
    let half = outer_rule(g, n as f64 * pr.t_upper, cfg);
    // Δ_h^N g is not even in x, so use the mirrored rule over the full line
    let full: Vec<(f64, f64)> = half
        .iter()
        .rev()
        .map(|&(x, w)| (-x, w))
        .chain(half.iter().copied())
        .collect();
    let rho = Weight::smooth_radial(pr.d);
    let ev = |y: f64| g.eval(y);
    let m: Vec<Vec<f64>> = full
        .par_iter()
        .map(|&(x, _)| tg.nodes.iter().map(|&h| nth_difference(ev, n, h, x).abs()).collect())
        .collect();
    let outer = full.iter().map(|&(x, w)| w * rho.eval(x)).collect();
    // h and -h give equal L_p(ρ) norms for even g, hence the factor 2
    let term = DiffTerm {
        name: "difference",
        outer,
        m,
        t_scale: 2.0,
    };
    let (terms, err) = evaluate_terms(&[term], &tg, pr, Scale::B);
    let lp = weighted_lp(&half, ev, |r| rho.eval(r), pr.p, true);
    Ok(report(NormKind::BRhoSmooth, pr, lp, terms, err))
}

/// `‖g|L_p(ρ_{d-1})‖ + ‖(∫_0^T t^{-sq}[∫_{|h|≤1}|Δ^N_{ht} g|dh]^q dt/t)^{1/q} | L_p(ρ_{d-1})‖`
/// with `ρ_{d-1}(t) = (1+t²)^{(d-1)/2}`.
pub fn norm_rho_smooth_f(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    rho_smooth_f(g, pr, cfg)
}

/// `‖g|L_p(ρ_{d-1})‖ + (∫_{|h|≤T} |h|^{-sq}‖Δ^N_h g|L_p(ρ_{d-1})‖^q dh/|h|)^{1/q}`.
pub fn norm_rho_smooth_b(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    rho_smooth_b(g, pr, cfg)
}

/// Step of the central differences for `g'`.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// `g'(t)` by central differences at `h` and `h/2` combined by Richardson
/// extrapolation. When a declared kink (or the origin) lies within the
/// stencil, second-order one-sided differences on the far side are used
/// instead, so the derivative is taken on the smooth piece containing `t`.
pub fn derivative(g: &RadialProfile, t: f64) -> f64 {
    let h = DERIVATIVE_STEP;
    let reach = 2.0 * h;
    let near = g
        .kinks()
        .iter()
        .copied()
        .chain([0.0])
        .flat_map(|k| [k, -k])
        .filter(|&k| k != t && (k - t).abs() < reach)
        .min_by(|a, b| (a - t).abs().partial_cmp(&(b - t).abs()).unwrap());
    let d = |h: f64| match near {
        None => (g.eval(t + h) - g.eval(t - h)) / (2.0 * h),
        // kink on the left: step forward
        Some(k) if k < t => (-3.0 * g.eval(t) + 4.0 * g.eval(t + h) - g.eval(t + 2.0 * h)) / (2.0 * h),
        Some(_) => (3.0 * g.eval(t) - 4.0 * g.eval(t - h) + g.eval(t - 2.0 * h)) / (2.0 * h),
    };
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// `‖g|L_p(|t|^{d-1})‖ + ‖g'|L_p(|t|^{d-1})‖`.
pub fn norm_sobolev_radial(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig) -> Result<NormReport> {
    sobolev(g, pr, cfg, NormKind::SobolevW1p)
}

fn sobolev(g: &RadialProfile, pr: &SmoothnessParams, cfg: &QuadratureConfig, kind: NormKind) -> Result<NormReport> {
    pr.check_structure()?;
    cfg.validate()?;
    let rule = outer_rule(g, 0.0, cfg);
    let w = Weight::radial(pr.d);
    let lp = weighted_lp(&rule, |r| g.eval(r), |r| w.eval(r), pr.p, true);
    let dlp = weighted_lp(&rule, |r| derivative(g, r), |r| w.eval(r), pr.p, true);
    let mut rep = report(
        kind,
        pr,
        lp,
        vec![Term {
            name: "derivative".into(),
            value: dlp,
        }],
        0.0,
    );
    // central differences are O(h⁴) after extrapolation; the error is
    // dominated by the outer rule, estimated against a halved panel width
    let fine_rule = outer_rule(
        g,
        0.0,
        &QuadratureConfig {
            r_panels_per_unit: cfg.r_panels_per_unit * 2,
            ..*cfg
        },
    );
    let lp2 = weighted_lp(&fine_rule, |r| g.eval(r), |r| w.eval(r), pr.p, true);
    let dlp2 = weighted_lp(&fine_rule, |r| derivative(g, r), |r| w.eval(r), pr.p, true);
    rep.numeric_error = (lp2 + dlp2 - lp - dlp).abs();
    Ok(rep)
}

/// Computes any [`NormKind`]; the Fourier kinds use the weight `|t|^{d-1}`
/// and the grid `cfg.fourier`.
pub fn compute_norm(
    kind: NormKind,
    g: &RadialProfile,
    pr: &SmoothnessParams,
    cfg: &QuadratureConfig,
) -> Result<NormReport> {
    match kind {
        NormKind::WLp => norm_weighted_lp(g, pr, cfg),
        NormKind::FSharp => norm_sharp_f(g, pr, cfg),
        NormKind::BSharp => norm_sharp_b(g, pr, cfg),
        NormKind::FTriangle => norm_triangle_f(g, pr, cfg),
        NormKind::BTriangle => norm_triangle_b(g, pr, cfg),
        NormKind::FTriangle3d => norm_triangle3d_f(g, pr, cfg),
        NormKind::BTriangle3d => norm_triangle3d_b(g, pr, cfg),
        NormKind::FRhoSmooth => norm_rho_smooth_f(g, pr, cfg),
        NormKind::BRhoSmooth => norm_rho_smooth_b(g, pr, cfg),
        NormKind::FFourierWeighted | NormKind::BFourierWeighted => {
            pr.check_structure()?;
            let scale = kind.scale().expect("Fourier kinds carry a scale");
            weighted_fourier_norm_profile(g, &Weight::radial(pr.d), pr, scale, &cfg.fourier)
        }
        NormKind::SobolevW1p => norm_sobolev_radial(g, pr, cfg),
        NormKind::H1Radial => {
            let pr2 = SmoothnessParams { p: 2.0, ..*pr };
            sobolev(g, &pr2, cfg, NormKind::H1Radial)
        }
    }
}

/// `a / b`, or `None` when `b` is zero (the 0/0 guard of the ratio studies).
pub fn ratio(a: f64, b: f64) -> Option<f64> {
    if b.abs() <= f64::MIN_POSITIVE || !a.is_finite() || !b.is_finite() {
        None
    } else {
        Some(a / b)
    }
}

/// One profile's contribution to an embedding study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEntry {
    pub profile: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: Option<f64>,
}

/// Ratios `‖g‖^△ (F, dimension d) ÷ ‖g‖ (F, smooth weight ρ_{d-1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub params: SmoothnessParams,
    pub entries: Vec<EmbeddingEntry>,
    pub max_ratio: Option<f64>,
    pub all_finite: bool,
    pub hypothesis: Hypothesis,
}

/// Embedding study over a set of profiles; zero profiles are excluded (0/0).
pub fn embedding_gap(
    profiles: &[RadialProfile],
    pr: &SmoothnessParams,
    cfg: &QuadratureConfig,
) -> Result<EmbeddingReport> {
    let mut entries = Vec::new();
    for g in profiles {
        let num = norm_triangle_f(g, pr, cfg)?.value;
        let den = norm_rho_smooth_f(g, pr, cfg)?.value;
        entries.push(EmbeddingEntry {
            profile: g.name().to_string(),
            numerator: num,
            denominator: den,
            ratio: ratio(num, den),
        });
    }
    let max_ratio = entries
        .iter()
        .filter_map(|e| e.ratio)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let all_finite = entries.iter().all(|e| e.ratio.is_none_or(f64::is_finite));
    Ok(EmbeddingReport {
        params: *pr,
        entries,
        max_ratio,
        all_finite,
        hypothesis: validate(pr, NormKind::FTriangle).and(validate(pr, NormKind::FRhoSmooth)),
    })
}

/// `S(g) = sup_t |t|^{(d-1)/2}|g(t)| ÷ ‖g‖_{H¹}` with the radial `H¹` norm
/// `‖g|L_2(|t|^{d-1})‖ + ‖g'|L_2(|t|^{d-1})‖`; `None` for the zero profile.
pub fn strauss_ratio(g: &RadialProfile, d: usize, cfg: &QuadratureConfig) -> Result<Option<f64>> {
    require(d >= 2, "d", "need d ≥ 2")?;
    let pr = SmoothnessParams::new(d, 0.5, 2.0, 2.0);
    let h1 = compute_norm(NormKind::H1Radial, g, &pr, cfg)?.value;
    let e = 0.5 * (d as f64 - 1.0);
    let radius = g.support().effective_radius();
    let (_, sup) = refine_sup(|t| t.powf(e) * g.eval(t).abs(), 0.0, radius, 4000, 4);
    Ok(ratio(sup, h1))
}

/// Strauss ratios of the dilations `g_λ(t) = g(λt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StraussReport {
    pub profile: String,
    pub d: usize,
    pub dilations: Vec<f64>,
    pub ratios: Vec<Option<f64>>,
    /// `max S / min S` over the defined ratios.
    pub variation: Option<f64>,
}

pub fn strauss_study(g: &RadialProfile, d: usize, dilations: &[f64], cfg: &QuadratureConfig) -> Result<StraussReport> {
    require(dilations.iter().all(|&l| l > 0.0), "dilation", "must be positive")?;
    let ratios: Vec<Option<f64>> = dilations
        .iter()
        .map(|&l| strauss_ratio(&g.dilated(l), d, cfg))
        .collect::<Result<_>>()?;
    let defined: Vec<f64> = ratios.iter().flatten().copied().collect();
    let variation = if defined.is_empty() {
        None
    } else {
        let max = defined.iter().copied().fold(f64::MIN, f64::max);
        let min = defined.iter().copied().fold(f64::MAX, f64::min);
        ratio(max, min)
    };
    Ok(StraussReport {
        profile: g.name().to_string(),
        d,
        dilations: dilations.to_vec(),
        ratios,
        variation,
    })
}
