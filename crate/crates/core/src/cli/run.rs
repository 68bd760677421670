//! Scenario execution, the JSON run report and output writing.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::config::{Family, ScenarioConfig, ScenarioKind};
use super::plots::{blaschke_profile_svg, gamma_profile_svg, strata_svg};
use crate::error::{Error, Result};
use crate::indexcheck::{
    poincare_hopf, verify_blaschke_formula, verify_front_formula, verify_gauss_map_formula,
    verify_morin_map_formula, verify_parallel_formula, DegreeResult, FormulaReport, MapPair,
    TangentField, VectorFieldZeroReport, VerifyConfig,
};
use crate::morin::{
    cascade_jets, classify_point, field_thresholds, FrontHomomorphism, Homomorphism, NullChoice,
    SphereMap, TorusMap, Verdict,
};
use crate::strata::{analyze, Region, SignedA3Point, Strata, StrataConfig};
use crate::surfaces::{
    gauss_kronecker, BumpyBody, FrontField, RotationalGamma, RoundSphere, StandardTorus,
    SurfaceDomain, SwallowtailPatch,
};
use crate::ChartPoint;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSummary {
    pub id: usize,
    pub vertices: usize,
    pub closed: bool,
    pub homology: [i32; 2],
    pub eta_flips_on_closing: bool,
    pub plus_region: Option<usize>,
    pub minus_region: Option<usize>,
    pub a3_points: usize,
}

/// Compact strata record: curves without their polylines, all `A₃` points, regions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrataSummary {
    pub subject: String,
    pub grid: [usize; 2],
    pub curves: Vec<CurveSummary>,
    pub a3_points: Vec<SignedA3Point>,
    pub regions: Vec<Region>,
    pub chi_plus: i64,
    pub chi_minus: i64,
    pub chi_total: i64,
}

impl StrataSummary {
    pub fn new(subject: &str, s: &Strata) -> Self {
        StrataSummary {
            subject: subject.to_string(),
            grid: s.complex.grid,
            curves: s
                .curves
                .iter()
                .map(|c| CurveSummary {
                    id: c.id,
                    vertices: c.points.len(),
                    closed: c.closed,
                    homology: c.homology,
                    eta_flips_on_closing: c.eta_flips_on_closing,
                    plus_region: c.plus_region,
                    minus_region: c.minus_region,
                    a3_points: s.a3_on_curve(c.id),
                })
                .collect(),
            a3_points: s.a3_points.clone(),
            regions: s.complex.regions.clone(),
            chi_plus: s.complex.chi_plus,
            chi_minus: s.complex.chi_minus,
            chi_total: s.complex.chi_total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationEntry {
    pub point: ChartPoint,
    pub verdict: Verdict,
    /// `λ, λ̇, λ̈, …` up to the configured order.
    pub cascade: Vec<f64>,
    pub rank_det: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub stages: Vec<(String, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub config: ScenarioConfig,
    pub passed: bool,
    pub formulas: Vec<FormulaReport>,
    pub strata: Vec<StrataSummary>,
    pub degrees: Vec<DegreeResult>,
    pub vector_field: Option<VectorFieldZeroReport>,
    pub classifications: Vec<ClassificationEntry>,
    pub errors: Vec<ErrorEntry>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// The report without its timing block; identical for identical configs.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Some(o) = v.as_object_mut() {
            o.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serialises")
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// A finished run: the report and the SVG artifacts `(file name, contents)`.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub plots: Vec<(String, String)>,
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZeroJet(_) => "DivisionByZeroJet",
        Error::NegativeSqrtJet(_) => "NegativeSqrtJet",
        Error::NonPositiveJet(_) => "NonPositiveJet",
        Error::OrderExhausted => "OrderExhausted",
        Error::OrderTooHigh { .. } => "OrderTooHigh",
        Error::PoleProximity(_) => "PoleProximity",
        Error::SingularBasePoint(_) => "SingularBasePoint",
        Error::NotConvex { .. } => "NotConvex",
        Error::TangentialAffineNormal(_) => "TangentialAffineNormal",
        Error::NotSingular(_) => "NotSingular",
        Error::ZeroAdjugate(_) => "ZeroAdjugate",
        Error::ResolutionTooCoarse(_) => "ResolutionTooCoarse",
        Error::NotMorin(_) => "NotMorin",
        Error::DegenerateA3 { .. } => "DegenerateA3",
        Error::NonIntegerDegree { .. } => "NonIntegerDegree",
        Error::DegreeMismatch { .. } => "DegreeMismatch",
        Error::NonGenericZero(_) => "NonGenericZero",
        Error::EulerMismatch(_) => "EulerMismatch",
        Error::Parse { .. } => "ParseError",
        Error::Range { .. } => "RangeError",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::Io(_) => "Io",
    }
}

struct Runner<'a> {
    cfg: &'a ScenarioConfig,
    report: RunReport,
    plots: Vec<(String, String)>,
    start: Instant,
}

impl<'a> Runner<'a> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Option<T> {
        let t = Instant::now();
        let out = f();
        self.report.timing.stages.push((name.to_string(), t.elapsed().as_secs_f64()));
        match out {
            Ok(v) => Some(v),
            Err(e) => {
                self.report.errors.push(ErrorEntry {
                    stage: name.to_string(),
                    kind: error_kind(&e).to_string(),
                    message: e.to_string(),
                });
                None
            }
        }
    }

    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            strata: StrataConfig { grid: self.cfg.grid, tolerances: self.cfg.tolerances },
            degree_grid: self.cfg.degree_grid,
            oracle: self.cfg.oracle,
            seed: self.cfg.oracle_seed,
        }
    }

    fn push_formula(&mut self, r: FormulaReport, domain: &SurfaceDomain, plot_name: &str) {
        if self.cfg.plots {
            let title = format!("{:?}: {}", r.theorem, r.subject);
            self.plots.push((plot_name.to_string(), strata_svg(&title, domain, &r.strata)));
        }
        self.report.strata.push(StrataSummary::new(&r.subject, &r.strata));
        if let Some(d) = r.degree {
            self.report.degrees.push(d);
        }
        self.report.warnings.extend(r.warnings.iter().cloned());
        self.report.formulas.push(r);
    }
}

fn surface(cfg: &ScenarioConfig) -> Result<Arc<dyn FrontField>> {
    Ok(match cfg.family {
        Family::Sphere => Arc::new(RoundSphere::new(cfg.radius)),
        Family::Torus => Arc::new(StandardTorus::new(cfg.major, cfg.minor)),
        Family::Bumpy => Arc::new(BumpyBody::random(cfg.seed, cfg.amplitude()).with_pole_cap(cfg.pole_cap)),
        Family::RotationalGamma => Arc::new(RotationalGamma::new(cfg.epsilon)?.with_pole_cap(cfg.pole_cap)),
        other => return Err(Error::InvalidArgument(format!("{other:?} is not a surface family"))),
    })
}

fn map_pair(cfg: &ScenarioConfig) -> Result<MapPair> {
    Ok(match cfg.family {
        Family::TorusFold => MapPair::Torus(TorusMap::Fold { amplitude: cfg.amplitude() }),
        Family::TorusCover => MapPair::Torus(TorusMap::Cover { k: cfg.cover }),
        Family::TorusGraph => MapPair::Torus(TorusMap::Graph { a: cfg.graph[0], b: cfg.graph[1] }),
        Family::SphereIdentity => MapPair::Sphere(SphereMap::Identity),
        other => return Err(Error::InvalidArgument(format!("{other:?} is not a map family"))),
    })
}

/// Range of the focal offsets `1/μ_j` of a convex surface, sampled on a 200×100 grid.
pub fn focal_interval(base: &dyn FrontField) -> Result<(f64, f64)> {
    let d = base.domain();
    let (u0, u1) = d.u_range();
    let (v0, v1) = d.strata_v_range();
    let (mut lo, mut hi) = (f64::MAX, f64::MIN);
    for i in 0..200 {
        for j in 0..100 {
            let p = ChartPoint::new(
                u0 + (u1 - u0) * (i as f64 + 0.5) / 200.0,
                v0 + (v1 - v0) * (j as f64 + 0.5) / 100.0,
            );
            let c = gauss_kronecker(base, p)?;
            for m in [c.mu1, c.mu2] {
                lo = lo.min(1.0 / m);
                hi = hi.max(1.0 / m);
            }
        }
    }
    Ok((lo, hi))
}

/// Runs one scenario; module errors become report entries, never panics.
pub fn run_scenario(cfg: &ScenarioConfig) -> RunOutcome {
    let mut r = Runner {
        cfg,
        report: RunReport {
            schema: SCHEMA_VERSION,
            config: cfg.clone(),
            passed: false,
            formulas: Vec::new(),
            strata: Vec::new(),
            degrees: Vec::new(),
            vector_field: None,
            classifications: Vec::new(),
            errors: Vec::new(),
            warnings: Vec::new(),
            timing: Timing { total_seconds: 0.0, stages: Vec::new() },
        },
        plots: Vec::new(),
        start: Instant::now(),
    };
    let vc = r.verify_config();
    let mut field_ok = true;
    let mut degenerate = false;
    match cfg.scenario {
        ScenarioKind::FrontFormula | ScenarioKind::GaussMap => {
            if let Some(s) = r.stage("surface", || surface(cfg)) {
                let domain = s.domain();
                let out = if cfg.scenario == ScenarioKind::FrontFormula {
                    r.stage("front_formula", || verify_front_formula(s, &vc))
                } else {
                    r.stage("gauss_map_formula", || verify_gauss_map_formula(s, &vc))
                };
                if let Some(f) = out {
                    r.push_formula(f, &domain, "strata.svg");
                }
            }
        }
        ScenarioKind::MorinMap => {
            if let Some(m) = r.stage("map", || map_pair(cfg)) {
                if let Some(f) = r.stage("morin_map_formula", || verify_morin_map_formula(&m, &vc)) {
                    r.push_formula(f, &m.domain(), "strata.svg");
                }
            }
        }
        ScenarioKind::ParallelSweep => {
            if let Some(base) = r.stage("surface", || surface(cfg)) {
                let ts = if cfg.t.is_empty() {
                    r.stage("focal_interval", || focal_interval(base.as_ref())).map(|(lo, hi)| {
                        (0..cfg.t_count)
                            .map(|k| lo + (hi - lo) * (k + 1) as f64 / (cfg.t_count + 1) as f64)
                            .collect()
                    })
                } else {
                    Some(cfg.t.clone())
                };
                let domain = base.domain();
                for (k, t) in ts.unwrap_or_default().into_iter().enumerate() {
                    let name = format!("parallel t={t}");
                    if let Some(f) = r.stage(&name, || verify_parallel_formula(base.clone(), t, &vc)) {
                        r.push_formula(f, &domain, &format!("strata_t{k}.svg"));
                    }
                }
            }
        }
        ScenarioKind::Blaschke => {
            if let Some(base) = r.stage("surface", || surface(cfg)) {
                let domain = base.domain();
                if let Some(f) = r.stage("blaschke_formula", || verify_blaschke_formula(base, &vc)) {
                    if cfg.plots && cfg.family == Family::RotationalGamma {
                        let body = RotationalGamma::new(cfg.epsilon)
                            .expect("validated epsilon")
                            .with_pole_cap(cfg.pole_cap);
                        r.plots.push(("gamma_profile.svg".into(), gamma_profile_svg(&body)));
                        let strata = f.strata.clone();
                        if let Some(svg) = r.stage("xi_profile", || blaschke_profile_svg(&body, &strata)) {
                            r.plots.push(("xi_profile.svg".into(), svg));
                        }
                    }
                    r.push_formula(f, &domain, "strata.svg");
                }
            }
        }
        ScenarioKind::PoincareHopf => {
            let field = match cfg.family {
                Family::TorusConstant => TangentField::constant_u(),
                Family::TorusTrig => TangentField::random_trig(cfg.seed),
                _ => TangentField::height_gradient(),
            };
            if let Some(z) = r.stage("poincare_hopf", || poincare_hopf(&field)) {
                field_ok = z.sum == z.euler_char;
                r.report.vector_field = Some(z);
            }
        }
        ScenarioKind::ClassifyPatch => {
            let h = FrontHomomorphism::new(Arc::new(SwallowtailPatch));
            let order = cfg.order;
            let tol = cfg.tolerances;
            if let Some(th) = r.stage("thresholds", || field_thresholds(&h, &tol)) {
                for &p in &cfg.points {
                    let entry = r.stage(&format!("classify {p}"), || {
                        let c = classify_point(&h, p, &th)?;
                        let cascade = match cascade_jets(&h, p, order, NullChoice::default(), None) {
                            Ok(jets) => jets.iter().map(|j| j.value()).collect(),
                            Err(Error::NotSingular(_)) => vec![c.lambda],
                            Err(e) => return Err(e),
                        };
                        Ok(ClassificationEntry { point: p, verdict: c.verdict, cascade, rank_det: c.rank_det })
                    });
                    if let Some(e) = entry {
                        if e.verdict == Verdict::Degenerate {
                            degenerate = true;
                            r.report.warnings.push(format!("degenerate verdict at {p}"));
                        }
                        r.report.classifications.push(e);
                    }
                }
            }
            let sc = StrataConfig { grid: cfg.grid, tolerances: cfg.tolerances };
            if let Some(s) = r.stage("strata", || analyze(&h, &sc)) {
                if cfg.plots {
                    r.plots.push(("strata.svg".into(), strata_svg("swallowtail patch", &h.domain(), &s)));
                }
                r.report.warnings.extend(s.warnings.iter().cloned());
                r.report.strata.push(StrataSummary::new("swallowtail", &s));
            }
        }
    }
    let residuals_zero = r.report.formulas.iter().all(|f| f.residual == 0);
    r.report.passed = r.report.errors.is_empty() && residuals_zero && field_ok && !degenerate;
    r.report.timing.total_seconds = r.start.elapsed().as_secs_f64();
    RunOutcome { report: r.report, plots: r.plots }
}

/// Writes `report.json` and the plots into `dir`, creating it if needed.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), outcome.report.to_json())?;
    for (name, svg) in &outcome.plots {
        std::fs::write(dir.join(name), svg)?;
    }
    Ok(())
}
