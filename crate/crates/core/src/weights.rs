//! Weight functions on the line and Muckenhoupt `A_p` constant estimation.

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::numerics::{integrate_adaptive_breaks, QuadratureConfig};
use crate::table::Table;

/// A nonnegative, locally integrable weight on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// `|t|^α`
    Power(f64),
    /// `(1 + t²)^{α/2}`
    SmoothRho(f64),
    Constant(f64),
    Tabulated(Table),
}

impl Weight {
    /// The weight `|t|^{d-1}` attached to radial functions on `R^d`.
    pub fn radial(d: usize) -> Self {
        Weight::Power(d as f64 - 1.0)
    }

    /// The smooth companion `ρ_{d-1}`.
    pub fn smooth_radial(d: usize) -> Self {
        Weight::SmoothRho(d as f64 - 1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::Power(a) => {
                if *a == 0.0 {
                    1.0
                } else {
                    t.abs().powf(*a)
                }
            }
            Weight::SmoothRho(a) => (1.0 + t * t).powf(0.5 * a),
            Weight::Constant(c) => *c,
            Weight::Tabulated(table) => table.eval(t),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Weight::Power(a) => format!("|t|^{a}"),
            Weight::SmoothRho(a) => format!("rho_{a}"),
            Weight::Constant(c) => format!("const({c})"),
            Weight::Tabulated(_) => "tabulated".into(),
        }
    }

    /// Points where the weight or its dual power can blow up.
    pub fn singular_points(&self) -> Vec<f64> {
        match self {
            Weight::Power(a) if *a != 0.0 => vec![0.0],
            Weight::Tabulated(t) => t
                .abscissae()
                .iter()
                .zip(t.values())
                .filter(|(_, v)| **v == 0.0)
                .flat_map(|(x, _)| if *x == 0.0 { vec![0.0] } else { vec![-*x, *x] })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Known infimum of the `p` with `w ∈ A_p`, where available in closed form.
    /// On the line `|t|^α ∈ A_p` iff `-1 < α < p - 1`.
    pub fn ap_threshold(&self) -> Option<f64> {
        match self {
            Weight::Power(a) if *a > -1.0 => Some((1.0 + a).max(1.0)),
            Weight::SmoothRho(_) | Weight::Constant(_) => Some(1.0),
            _ => None,
        }
    }

    /// Checks nonnegativity and finiteness on a grid over `[-r, r]`.
    pub fn check_on_grid(&self, r: f64, n: usize) -> Result<()> {
        for i in 0..=n {
            let t = -r + 2.0 * r * i as f64 / n as f64;
            let v = self.eval(t);
            require(
                v >= 0.0 && (v.is_finite() || t == 0.0),
                "weight",
                "must be nonnegative and finite away from singular points",
            )?;
        }
        Ok(())
    }
}

/// A closed interval `[a, b]` on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn centered(c: f64, half_width: f64) -> Self {
        Self {
            a: c - half_width,
            b: c + half_width,
        }
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.b <= self.a
    }
}

/// Family of intervals over which the `A_p` supremum is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalFamily(pub Vec<Interval>);

impl IntervalFamily {
    /// `[-R, R]` for each radius.
    pub fn centered_at_zero(radii: &[f64]) -> Self {
        Self(radii.iter().map(|&r| Interval::centered(0.0, r)).collect())
    }

    /// Centres `{0, ±2^k}` and half-widths `{2^j}` for `k, j ∈ [-6, 6]`.
    pub fn dyadic() -> Self {
        let mut centres = vec![0.0];
        for k in -6..=6 {
            let c = 2f64.powi(k);
            centres.push(c);
            centres.push(-c);
        }
        let mut out = Vec::new();
        for &c in &centres {
            for j in -6..=6 {
                out.push(Interval::centered(c, 2f64.powi(j)));
            }
        }
        Self(out)
    }
}

/// Outcome of an `A_p` constant estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ApEstimate {
    Finite { constant: f64, worst: Interval },
    Divergent { interval: Interval },
}

impl ApEstimate {
    pub fn constant(&self) -> Option<f64> {
        match self {
            ApEstimate::Finite { constant, .. } => Some(*constant),
            ApEstimate::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ApEstimate::Divergent { .. })
    }
}

/// `∫_I f`, or `None` when the integral diverges at a singular point of the weight.
///
/// Around each singular point `c` inside the interval the excised integrals
/// `J(ε_k)`, `ε_k = L·10^{-4k}`, are compared over three rounds. The integral
/// is declared divergent when `J` grows more than tenfold or when the tail
/// increment of the last round fails to contract to half the previous one,
/// which also catches logarithmic divergence.
fn average_or_divergent<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    singular: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Option<f64>> {
    let inside: Vec<f64> = singular.iter().copied().filter(|&c| c >= iv.a && c <= iv.b).collect();
    let len = iv.len();
    if !inside.is_empty() {
        let excised = |eps: f64| -> Result<f64> {
            let mut cuts = vec![iv.a];
            for &c in &inside {
                cuts.push((c - eps).max(iv.a));
                cuts.push((c + eps).min(iv.b));
            }
            cuts.push(iv.b);
            let mut total = 0.0;
            // pieces alternate kept / excised
            for (k, w) in cuts.windows(2).enumerate() {
                if k % 2 == 0 && w[1] > w[0] {
                    total += integrate_adaptive_breaks(&f, w[0], w[1], &[], cfg)?.value;
                }
            }
            Ok(total)
        };
        let half = 0.5 * len;
        let j: Vec<f64> = (1..=3)
            .map(|k| excised(half * 10f64.powi(-4 * k)))
            .collect::<Result<_>>()?;
        let d1 = j[1] - j[0];
        let d2 = j[2] - j[1];
        let grows = j[0] > 0.0 && j[2] > 10.0 * j[0];
        let stalls = d1 > 0.0 && d2 > 0.5 * d1;
        if grows || stalls || !j[2].is_finite() {
            return Ok(None);
        }
    }
    let r = integrate_adaptive_breaks(&f, iv.a, iv.b, &inside, cfg)?;
    if !r.value.is_finite() {
        return Ok(None);
    }
    Ok(Some(r.value / len))
}

/// `sup_B (avg_B w)^{1/p} (avg_B w^{-p'/p})^{1/p'}` over the family, with
/// `p'/p = 1/(p-1)`.
pub fn ap_constant_estimate(w: &Weight, p: f64, family: &IntervalFamily, cfg: &QuadratureConfig) -> Result<ApEstimate> {
    require(p > 1.0 && p.is_finite(), "p", "need 1 < p < ∞")?;
    require(!family.0.is_empty(), "interval_family", "must not be empty")?;
    let p_dual = p / (p - 1.0);
    let dual_exp = 1.0 / (p - 1.0);
    let singular = w.singular_points();
    let mut best: Option<(f64, Interval)> = None;
    for &iv in &family.0 {
        require(!iv.is_empty(), "interval", "must have positive length")?;
        let Some(avg_w) = average_or_divergent(|t| w.eval(t), iv, &singular, cfg)? else {
            return Ok(ApEstimate::Divergent { interval: iv });
        };
        let Some(avg_dual) = average_or_divergent(|t| w.eval(t).powf(-dual_exp), iv, &singular, cfg)? else {
            return Ok(ApEstimate::Divergent { interval: iv });
        };
        let c = avg_w.powf(1.0 / p) * avg_dual.powf(1.0 / p_dual);
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, iv));
        }
    }
    let (constant, worst) = best.expect("family is nonempty");
    Ok(ApEstimate::Finite { constant, worst })
}

/// Per-`p` verdicts of [`ap_constant_estimate`] and the empirical threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApClassification {
    pub weight: String,
    pub verdicts: Vec<(f64, ApEstimate)>,
    /// Largest tested `p` with a divergent estimate.
    pub last_divergent: Option<f64>,
    /// Smallest tested `p` above every divergent one with a finite estimate.
    pub first_finite: Option<f64>,
}

impl ApClassification {
    /// Midpoint between the last divergent and first finite `p`.
    pub fn threshold(&self) -> Option<f64> {
        match (self.last_divergent, self.first_finite) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            (None, Some(b)) => Some(b),
            _ => None,
        }
    }
}

pub fn ap_classify(
    w: &Weight,
    p_grid: &[f64],
    family: &IntervalFamily,
    cfg: &QuadratureConfig,
) -> Result<ApClassification> {
    let mut ps = p_grid.to_vec();
    ps.sort_by(f64::total_cmp);
    let verdicts: Vec<(f64, ApEstimate)> = ps
        .iter()
        .map(|&p| ap_constant_estimate(w, p, family, cfg).map(|e| (p, e)))
        .collect::<Result<_>>()?;
    let last_divergent = verdicts
        .iter()
        .filter(|(_, e)| e.is_divergent())
        .map(|(p, _)| *p)
        .next_back();
    let first_finite = verdicts
        .iter()
        .filter(|(p, e)| !e.is_divergent() && last_divergent.is_none_or(|d| *p > d))
        .map(|(p, _)| *p)
        .next();
    Ok(ApClassification {
        weight: w.name(),
        verdicts,
        last_divergent,
        first_finite,
    })
}
