//! Commands, parameter grids and the studies they run.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use radnorm::geometry::CAP_MC_MIN_SAMPLES;
use radnorm::norms::{ratio, NormKind};
use radnorm::profiles::{nonidentity_witness, WitnessGrid};
use radnorm::serde_ext::parse_extended;
use radnorm::table::{Beyond, Table};
use radnorm::{
    ap_classify, cap_measure_exact, cap_measure_mc, coincidence_ratio, compute_norm, extend, omega_contains,
    parse_profile, strauss_study, CapSpec, Hypothesis, IntervalFamily, NormReport, QuadratureConfig, RadialProfile,
    SmoothnessParams, Weight,
};

use crate::output::{to_value, Report, Row};

/// Largest admissible number of grid points.
pub const MAX_GRID: usize = 10_000;

fn extended(s: &str) -> Result<f64, String> {
    parse_extended(s).ok_or_else(|| format!("not a number: `{s}`"))
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Measure of a sphere cut by a ball.
    CapMeasure {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
        /// Monte Carlo samples; exact formula when absent and d is 2 or 3.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Whether h lies in the neighbourhood of x at scale t.
    OmegaCheck {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        h: Vec<f64>,
        #[arg(long)]
        t: f64,
    },
    /// Quasi-norms over a grid of kinds, profiles and parameters.
    Norm {
        #[arg(long, value_delimiter = ',', required = true)]
        kind: Vec<NormKind>,
        #[command(flatten)]
        profiles: Profiles,
        #[command(flatten)]
        grid: ParamGrid,
    },
    /// Ratio of two quasi-norms per profile and grid point.
    Equivalence {
        #[arg(long, value_delimiter = ',', default_value = "f-triangle3d,f-triangle", num_args = 1..)]
        kinds: Vec<NormKind>,
        #[command(flatten)]
        profiles: Profiles,
        #[command(flatten)]
        grid: ParamGrid,
    },
    /// Three-dimensional difference norm against the weighted Fourier norm.
    Coincidence {
        #[command(flatten)]
        profiles: Profiles,
        #[command(flatten)]
        grid: ParamGrid,
    },
    /// Muckenhoupt constants of a weight on the line.
    Muckenhoupt {
        /// `power:a`, `rho:a`, `constant:c`, `radial:d` or a two-column file.
        #[arg(long)]
        weight: String,
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3,4")]
        p: Vec<f64>,
        /// `dyadic` or `centered:R1,R2,...`.
        #[arg(long, default_value = "dyadic")]
        family: String,
    },
    /// Strauss ratio under dilations.
    Strauss {
        #[command(flatten)]
        profiles: Profiles,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4")]
        dilations: Vec<f64>,
    },
    /// Largest mismatch between ambient and one-dimensional differences.
    Nonidentity {
        #[arg(long, default_value = "gaussian:1")]
        profile: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long, default_value_t = 1.0)]
        h_max: f64,
        /// Points per grid axis.
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// Runs every study listed in a TOML file.
    Report {
        #[arg(long)]
        study: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Profiles {
    /// Corpus spec such as `cusp:0.6`, or `file:PATH` for a two-column table.
    #[arg(long = "profile", value_delimiter = ';', default_value = "gaussian:1")]
    pub specs: Vec<String>,
}

impl Profiles {
    fn load(&self) -> Result<Vec<RadialProfile>, String> {
        self.specs
            .iter()
            .map(|s| parse_profile(s).map_err(|e| e.to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamGrid {
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5", value_parser = extended)]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = extended)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2", value_parser = extended)]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = extended)]
    pub u: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = extended)]
    pub v: Vec<f64>,
    /// Difference order.
    #[arg(long = "order", value_delimiter = ',', default_value = "1")]
    pub n: Vec<usize>,
    /// Upper limit of the scale integrals.
    #[arg(long = "t-upper", value_delimiter = ',', default_value = "1")]
    pub t_upper: Vec<f64>,
}

impl ParamGrid {
    /// Cartesian product in declaration order.
    pub fn points(&self) -> Vec<SmoothnessParams> {
        let mut out = Vec::new();
        for &d in &self.d {
            for &s in &self.s {
                for &p in &self.p {
                    for &q in &self.q {
                        for &u in &self.u {
                            for &v in &self.v {
                                for &n in &self.n {
                                    for &t in &self.t_upper {
                                        out.push(
                                            SmoothnessParams::new(d, s, p, q)
                                                .with_inner(u, v)
                                                .with_order(n)
                                                .with_t_upper(t),
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn size(&self) -> usize {
        [
            self.d.len(),
            self.s.len(),
            self.p.len(),
            self.q.len(),
            self.u.len(),
            self.v.len(),
            self.n.len(),
            self.t_upper.len(),
        ]
        .iter()
        .product()
    }
}

fn check_grid(points: usize) -> Result<(), String> {
    if points == 0 {
        Err("malformed grid: no points".into())
    } else if points > MAX_GRID {
        Err(format!(
            "malformed grid: {points} points exceed the limit of {MAX_GRID}"
        ))
    } else {
        Ok(())
    }
}

pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<QuadratureConfig, String> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => QuadratureConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn label(profile: &str, pr: &SmoothnessParams) -> String {
    format!(
        "{profile} d={} s={} p={} q={} u={} v={} N={} T={}",
        pr.d, pr.s, pr.p, pr.q, pr.u, pr.v, pr.n, pr.t_upper
    )
}

fn hypothesis_notes(point: &str, h: &Hypothesis) -> Option<String> {
    (!h.is_pass()).then(|| format!("hypothesis failed at {point}: {}", h.names().join("; ")))
}

fn cross<'a>(profiles: &'a [RadialProfile], grid: &[SmoothnessParams]) -> Vec<(&'a RadialProfile, SmoothnessParams)> {
    grid.iter()
        .flat_map(|pr| profiles.iter().map(move |g| (g, *pr)))
        .collect()
}

fn parse_weight(spec: &str) -> Result<Weight, String> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = || -> Result<f64, String> {
        arg.trim()
            .parse()
            .map_err(|_| format!("weight `{spec}` needs a number"))
    };
    match name {
        "power" => Ok(Weight::Power(num()?)),
        "rho" => Ok(Weight::SmoothRho(num()?)),
        "constant" => Ok(Weight::Constant(num()?)),
        "radial" => Ok(Weight::radial(num()? as usize)),
        _ => Table::load(spec, Beyond::Hold)
            .map(Weight::Tabulated)
            .map_err(|e| e.to_string()),
    }
}

fn parse_family(spec: &str) -> Result<IntervalFamily, String> {
    if spec == "dyadic" {
        return Ok(IntervalFamily::dyadic());
    }
    let radii = spec
        .strip_prefix("centered:")
        .ok_or_else(|| format!("unknown interval family `{spec}`"))?
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("family `{spec}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if radii.is_empty() || radii.iter().any(|&r| r <= 0.0) {
        return Err(format!("family `{spec}` needs positive radii"));
    }
    Ok(IntervalFamily::centered_at_zero(&radii))
}

#[derive(Serialize)]
struct NormEntry {
    profile: String,
    #[serde(flatten)]
    report: NormReport,
}

#[derive(Serialize)]
struct EquivalenceEntry {
    profile: String,
    params: SmoothnessParams,
    numerator: NormReport,
    denominator: NormReport,
    ratio: Option<f64>,
    hypothesis: Hypothesis,
}

fn extremes(xs: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>) {
    xs.fold((None, None), |(lo, hi): (Option<f64>, Option<f64>), x| {
        (Some(lo.map_or(x, |l| l.min(x))), Some(hi.map_or(x, |h| h.max(x))))
    })
}

pub fn run_command(cmd: &Command, cfg: &QuadratureConfig) -> Result<Report, String> {
    let err = |e: radnorm::Error| e.to_string();
    match cmd {
        Command::CapMeasure {
            d,
            lambda,
            t,
            r,
            samples,
        } => {
            let spec = CapSpec::new(*d, *lambda, *t, *r);
            let (value, std_error, method) = match samples {
                None if *d == 2 || *d == 3 => (cap_measure_exact(spec).map_err(err)?, 0.0, "exact"),
                _ => {
                    let n = samples.unwrap_or(cfg.mc_samples.max(CAP_MC_MIN_SAMPLES));
                    let e = cap_measure_mc(spec, n, cfg.seed).map_err(err)?;
                    (e.mean, e.std_error, "monte-carlo")
                }
            };
            let body = json!({
                "d": d, "lambda": lambda, "t": t, "r": r,
                "method": method, "value": value, "std_error": std_error,
            });
            let rows = vec![Row {
                point: format!("d={d} lambda={lambda} t={t} r={r}"),
                value,
                error: std_error,
            }];
            Ok(Report::new("cap-measure", body, rows, 0, 1, Vec::new()))
        }
        Command::OmegaCheck { x, h, t } => {
            let contains = omega_contains(x, h, *t).map_err(err)?;
            let body = json!({ "x": x, "h": h, "t": t, "contains": contains });
            let rows = vec![Row {
                point: format!("t={t}"),
                value: f64::from(u8::from(contains)),
                error: 0.0,
            }];
            Ok(Report::new("omega-check", body, rows, 0, 1, Vec::new()))
        }
        Command::Norm { kind, profiles, grid } => {
            check_grid(grid.size() * profiles.specs.len() * kind.len())?;
            let profiles = profiles.load()?;
            let jobs: Vec<(NormKind, &RadialProfile, SmoothnessParams)> = cross(&profiles, &grid.points())
                .into_iter()
                .flat_map(|(g, pr)| kind.iter().map(move |&k| (k, g, pr)))
                .collect();
            let reports: Vec<NormEntry> = jobs
                .par_iter()
                .map(|&(k, g, pr)| {
                    compute_norm(k, g, &pr, cfg).map(|report| NormEntry {
                        profile: g.name().to_string(),
                        report,
                    })
                })
                .collect::<radnorm::Result<_>>()
                .map_err(err)?;
            let mut rows = Vec::new();
            let mut notes = Vec::new();
            let mut gated = 0;
            for e in &reports {
                let point = format!("{} {}", e.report.kind, label(&e.profile, &e.report.params));
                if let Some(n) = hypothesis_notes(&point, &e.report.hypothesis) {
                    gated += 1;
                    notes.push(n);
                }
                rows.push(Row {
                    point,
                    value: e.report.value,
                    error: e.report.numeric_error,
                });
            }
            let total = reports.len();
            let body = json!({ "config": cfg, "results": to_value(&reports) });
            Ok(Report::new("norm", body, rows, gated, total, notes))
        }
        Command::Equivalence { kinds, profiles, grid } => {
            let [a, b] = kinds.as_slice() else {
                return Err("equivalence needs exactly two kinds".into());
            };
            check_grid(grid.size() * profiles.specs.len())?;
            let profiles = profiles.load()?;
            let entries: Vec<EquivalenceEntry> = cross(&profiles, &grid.points())
                .par_iter()
                .map(|&(g, pr)| -> radnorm::Result<EquivalenceEntry> {
                    let numerator = compute_norm(*a, g, &pr, cfg)?;
                    let denominator = compute_norm(*b, g, &pr, cfg)?;
                    Ok(EquivalenceEntry {
                        profile: g.name().to_string(),
                        params: pr,
                        ratio: ratio(numerator.value, denominator.value),
                        hypothesis: numerator.hypothesis.clone().and(denominator.hypothesis.clone()),
                        numerator,
                        denominator,
                    })
                })
                .collect::<radnorm::Result<_>>()
                .map_err(err)?;
            let mut rows = Vec::new();
            let mut notes = Vec::new();
            let mut gated = 0;
            for e in &entries {
                let point = label(&e.profile, &e.params);
                if let Some(n) = hypothesis_notes(&point, &e.hypothesis) {
                    gated += 1;
                    notes.push(n);
                }
                if let Some(r) = e.ratio {
                    let err = r
                        * (e.numerator.numeric_error / e.numerator.value
                            + e.denominator.numeric_error / e.denominator.value);
                    rows.push(Row {
                        point,
                        value: r,
                        error: err,
                    });
                }
            }
            // gated points are excluded from the summary statistics
            let (min, max) = extremes(
                entries
                    .iter()
                    .filter(|e| e.hypothesis.is_pass())
                    .filter_map(|e| e.ratio),
            );
            let body = json!({
                "config": cfg,
                "kinds": [a, b],
                "results": to_value(&entries),
                "summary": { "min_ratio": min, "max_ratio": max },
            });
            Ok(Report::new("equivalence", body, rows, gated, entries.len(), notes))
        }
        Command::Coincidence { profiles, grid } => {
            check_grid(grid.size() * profiles.specs.len())?;
            let profiles = profiles.load()?;
            let entries: Vec<_> = cross(&profiles, &grid.points())
                .par_iter()
                .map(|&(g, pr)| coincidence_ratio(g, &pr, cfg))
                .collect::<radnorm::Result<Vec<_>>>()
                .map_err(err)?;
            let mut rows = Vec::new();
            let mut notes: Vec<String> = Vec::new();
            let mut gated = 0;
            for e in &entries {
                let point = label(&e.profile, &e.params);
                if let Some(n) = hypothesis_notes(&point, &e.hypothesis) {
                    gated += 1;
                    notes.push(n);
                }
                notes.extend(e.warnings.iter().map(|w| format!("{point}: {w}")));
                if let Some(r) = e.ratio {
                    rows.push(Row {
                        point,
                        value: r,
                        error: 0.0,
                    });
                }
            }
            let (min, max) = extremes(entries.iter().filter_map(|e| e.ratio));
            let suite_constant = match (min, max) {
                (Some(lo), Some(hi)) => Some(hi.max(1.0 / lo)),
                _ => None,
            };
            let body = json!({
                "config": cfg,
                "results": to_value(&entries),
                "summary": { "min_ratio": min, "max_ratio": max, "suite_constant": suite_constant },
            });
            Ok(Report::new("coincidence", body, rows, gated, entries.len(), notes))
        }
        Command::Muckenhoupt { weight, p, family } => {
            let w = parse_weight(weight)?;
            let fam = parse_family(family)?;
            let c = ap_classify(&w, p, &fam, cfg).map_err(err)?;
            let rows = c
                .verdicts
                .iter()
                .map(|(p, e)| Row {
                    point: format!("{} p={p}", c.weight),
                    value: e.constant().unwrap_or(f64::INFINITY),
                    error: 0.0,
                })
                .collect();
            let body = json!({ "family": family, "classification": to_value(&c), "threshold": c.threshold() });
            // a divergent constant is a finding, not a numerical failure
            let mut r = Report::new("muckenhoupt", body, rows, 0, 0, Vec::new());
            r.status = crate::output::Status::Ok;
            Ok(r)
        }
        Command::Strauss { profiles, d, dilations } => {
            let profiles = profiles.load()?;
            let studies: Vec<_> = profiles
                .par_iter()
                .map(|g| strauss_study(g, *d, dilations, cfg))
                .collect::<radnorm::Result<Vec<_>>>()
                .map_err(err)?;
            let mut rows = Vec::new();
            let mut notes = Vec::new();
            for s in &studies {
                for (l, r) in s.dilations.iter().zip(&s.ratios) {
                    match r {
                        Some(v) => rows.push(Row {
                            point: format!("{} lambda={l}", s.profile),
                            value: *v,
                            error: 0.0,
                        }),
                        None => notes.push(format!("{} excluded: zero profile", s.profile)),
                    }
                }
            }
            let body = json!({ "config": cfg, "results": to_value(&studies) });
            let empty = rows.is_empty();
            Ok(Report::new("strauss", body, rows, usize::from(empty), 1, notes))
        }
        Command::Nonidentity {
            profile,
            d,
            order,
            r_min,
            r_max,
            h_max,
            n,
        } => {
            let g = parse_profile(profile).map_err(err)?;
            let field = extend(&g, *d).map_err(err)?;
            let grid = WitnessGrid::uniform((*r_min, *r_max), *h_max, *n);
            check_grid(grid.radii.len() * grid.steps.len() * grid.angles.len())?;
            let w = nonidentity_witness(&field, *order, &grid).map_err(err)?;
            let rows = vec![Row {
                point: format!("{} d={d} N={order}", g.name()),
                value: w.gap,
                error: 0.0,
            }];
            let body = json!({ "profile": g.name(), "d": d, "order": order, "grid": to_value(&grid), "witness": to_value(&w) });
            Ok(Report::new("nonidentity", body, rows, 0, 1, Vec::new()))
        }
        Command::Report { study } => run_study_file(study, cfg),
    }
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct StudyLine {
    #[command(subcommand)]
    command: Command,
}

/// Turns one `[[study]]` table into command-line words.
fn study_argv(table: &toml::Table) -> Result<Vec<String>, String> {
    let command = table
        .get("command")
        .and_then(|v| v.as_str())
        .ok_or("every [[study]] needs a `command` string")?;
    if command == "report" {
        return Err("studies cannot nest `report`".into());
    }
    let mut argv = vec![command.to_string()];
    for (key, value) in table.iter().filter(|(k, _)| *k != "command") {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &toml::Value| -> Result<String, String> {
            match v {
                toml::Value::String(s) => Ok(s.clone()),
                toml::Value::Integer(i) => Ok(i.to_string()),
                toml::Value::Float(f) => Ok(f.to_string()),
                _ => Err(format!("unsupported value for `{key}`")),
            }
        };
        match value {
            toml::Value::Boolean(true) => argv.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let sep = if key == "profile" { ";" } else { "," };
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                argv.push(format!("{flag}={}", parts.join(sep)));
            }
            v => argv.push(format!("{flag}={}", scalar(v)?)),
        }
    }
    Ok(argv)
}

fn run_study_file(path: &Path, cfg: &QuadratureConfig) -> Result<Report, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc: toml::Table = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let studies = doc
        .get("study")
        .and_then(|v| v.as_array())
        .ok_or("study file needs at least one [[study]] table")?;
    let mut bodies = Vec::new();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut status = crate::output::Status::Ok;
    for (i, s) in studies.iter().enumerate() {
        let table = s.as_table().ok_or("[[study]] entries must be tables")?;
        let argv = study_argv(table)?;
        let line = StudyLine::try_parse_from(&argv).map_err(|e| format!("study {}: {e}", i + 1))?;
        let r = run_command(&line.command, cfg)?;
        status = status.max(r.status);
        rows.extend(r.rows.iter().map(|row| Row {
            point: format!("{}: {}", r.command, row.point),
            ..row.clone()
        }));
        notes.extend(r.notes.iter().cloned());
        bodies.push(r.to_json());
    }
    let mut report = Report::new("report", json!({ "studies": bodies }), rows, 0, 0, notes);
    report.status = status;
    Ok(report)
}
