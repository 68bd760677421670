//! Flat `key=value` scenario configuration.
//!
//! One assignment per line, `#` starts a comment, whitespace around keys and values is
//! ignored. Several assignments may share a line when separated by whitespace, as in
//! `scenario=blaschke  family=rotational_gamma  epsilon=0.2125`.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::MAX_ORDER;
use crate::morin::Tolerances;
use crate::ChartPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    FrontFormula,
    MorinMap,
    ParallelSweep,
    Blaschke,
    PoincareHopf,
    ClassifyPatch,
    GaussMap,
}

impl ScenarioKind {
    const ALL: [(&'static str, ScenarioKind); 7] = [
        ("front_formula", ScenarioKind::FrontFormula),
        ("morin_map", ScenarioKind::MorinMap),
        ("parallel_sweep", ScenarioKind::ParallelSweep),
        ("blaschke", ScenarioKind::Blaschke),
        ("poincare_hopf", ScenarioKind::PoincareHopf),
        ("classify_patch", ScenarioKind::ClassifyPatch),
        ("gauss_map", ScenarioKind::GaussMap),
    ];

    fn default_family(self) -> Family {
        match self {
            ScenarioKind::FrontFormula | ScenarioKind::GaussMap => Family::Sphere,
            ScenarioKind::MorinMap => Family::TorusFold,
            ScenarioKind::ParallelSweep => Family::Bumpy,
            ScenarioKind::Blaschke => Family::RotationalGamma,
            ScenarioKind::PoincareHopf => Family::SphereHeight,
            ScenarioKind::ClassifyPatch => Family::Swallowtail,
        }
    }

    fn accepts(self, f: Family) -> bool {
        use Family::*;
        match self {
            ScenarioKind::FrontFormula | ScenarioKind::GaussMap => {
                matches!(f, Sphere | Torus | Bumpy | RotationalGamma)
            }
            ScenarioKind::ParallelSweep | ScenarioKind::Blaschke => {
                matches!(f, Sphere | Bumpy | RotationalGamma)
            }
            ScenarioKind::MorinMap => matches!(f, TorusFold | TorusCover | TorusGraph | SphereIdentity),
            ScenarioKind::PoincareHopf => matches!(f, TorusConstant | SphereHeight | TorusTrig),
            ScenarioKind::ClassifyPatch => matches!(f, Swallowtail),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sphere,
    Torus,
    Bumpy,
    RotationalGamma,
    Swallowtail,
    TorusFold,
    TorusCover,
    TorusGraph,
    SphereIdentity,
    TorusConstant,
    SphereHeight,
    TorusTrig,
}

impl Family {
    const ALL: [(&'static str, Family); 12] = [
        ("sphere", Family::Sphere),
        ("torus", Family::Torus),
        ("bumpy", Family::Bumpy),
        ("rotational_gamma", Family::RotationalGamma),
        ("swallowtail", Family::Swallowtail),
        ("torus_fold", Family::TorusFold),
        ("torus_cover", Family::TorusCover),
        ("torus_graph", Family::TorusGraph),
        ("sphere_identity", Family::SphereIdentity),
        ("torus_constant", Family::TorusConstant),
        ("sphere_height", Family::SphereHeight),
        ("torus_trig", Family::TorusTrig),
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub family: Family,
    pub grid: usize,
    pub degree_grid: usize,
    /// Highest cascade derivative reported by `classify_patch`.
    pub order: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Seed of the oracle sample points (random regular values).
    pub oracle_seed: u64,
    pub oracle: bool,
    pub radius: f64,
    pub major: f64,
    pub minor: f64,
    /// Bump amplitude, or the fold amplitude of `torus_fold`.
    pub amplitude: f64,
    pub epsilon: f64,
    pub pole_cap: f64,
    /// Parallel offsets; empty means `t_count` values spread over the focal interval.
    pub t: Vec<f64>,
    pub t_count: usize,
    pub cover: i32,
    /// `(a, b)` of the bent fold map `(u, v + a sin v + b sin u sin 2v)`.
    pub graph: [f64; 2],
    pub points: Vec<ChartPoint>,
    pub plots: bool,
    pub out: Option<String>,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        ScenarioConfig {
            scenario,
            family: scenario.default_family(),
            grid: 128,
            degree_grid: 256,
            order: 4,
            tolerances: Tolerances::default(),
            seed: 1,
            oracle_seed: 0,
            oracle: false,
            radius: 1.0,
            major: 2.0,
            minor: 0.7,
            amplitude: f64::NAN,
            epsilon: 0.2125,
            pole_cap: 0.05,
            t: Vec::new(),
            t_count: 5,
            cover: 2,
            graph: [1.5, 0.3],
            points: vec![ChartPoint::new(0.0, 0.0), ChartPoint::new(0.1, -0.06)],
            plots: false,
            out: None,
        }
    }

    /// Amplitude with the per-family default applied.
    pub fn amplitude(&self) -> f64 {
        if self.amplitude.is_finite() {
            self.amplitude
        } else {
            match self.family {
                Family::TorusFold => 1.5,
                Family::Bumpy if self.scenario == ScenarioKind::GaussMap => 0.25,
                _ => 0.03,
            }
        }
    }

    /// Resolves defaults so that the echoed config is complete.
    fn finish(mut self) -> Self {
        self.amplitude = self.amplitude();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let range = |key: &str, message: String| Err(Error::Range { key: key.into(), message });
        if !self.scenario.accepts(self.family) {
            return Err(Error::InvalidArgument(format!(
                "family {:?} is not available for scenario {:?}",
                self.family, self.scenario
            )));
        }
        if !(8..=4096).contains(&self.grid) {
            return range("grid", format!("{} is outside [8, 4096]", self.grid));
        }
        if !(2..=8192).contains(&self.degree_grid) {
            return range("degree_grid", format!("{} is outside [2, 8192]", self.degree_grid));
        }
        if !(2..MAX_ORDER).contains(&self.order) {
            return range("order", format!("{} is outside [2, {}]", self.order, MAX_ORDER - 1));
        }
        if !(0.0..0.25).contains(&self.epsilon) {
            return range(
                "epsilon",
                format!("{} is outside [0, 1/4); the profile curve is convex only there", self.epsilon),
            );
        }
        for (key, v) in [
            ("eps_sing", self.tolerances.sing),
            ("eps_dot", self.tolerances.dot),
            ("eps_ddot", self.tolerances.ddot),
            ("eps_rank", self.tolerances.rank),
            ("radius", self.radius),
            ("minor", self.minor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return range(key, format!("{v} must be positive"));
            }
        }
        if !(self.major > self.minor) {
            return range("major", format!("{} must exceed minor = {}", self.major, self.minor));
        }
        if !(self.amplitude() >= 0.0) {
            return range("amplitude", format!("{} must be non-negative", self.amplitude()));
        }
        if !(self.pole_cap > 0.0 && self.pole_cap < 0.5) {
            return range("pole_cap", format!("{} is outside (0, 0.5)", self.pole_cap));
        }
        if !(1..=64).contains(&self.t_count) {
            return range("t_count", format!("{} is outside [1, 64]", self.t_count));
        }
        if self.cover == 0 {
            return range("cover", "covering degree must be non-zero".into());
        }
        Ok(())
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| f(x.trim())).collect()
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("`{s}` is not a boolean")),
    }
}

fn parse_int<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a valid integer"))
}

fn lookup<T: Copy>(table: &[(&str, T)], s: &str, what: &str) -> std::result::Result<T, String> {
    table.iter().find(|(n, _)| *n == s).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
        format!("unknown {what} `{s}` (expected one of {})", names.join(", "))
    })
}

/// Assigns one key; the error message is reported at the value's column.
fn assign(cfg: &mut ScenarioConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "family" => cfg.family = lookup(&Family::ALL, value, "family")?,
        "grid" => cfg.grid = parse_int(value)?,
        "degree_grid" => cfg.degree_grid = parse_int(value)?,
        "order" => cfg.order = parse_int(value)?,
        "seed" => cfg.seed = parse_int(value)?,
        "oracle_seed" => cfg.oracle_seed = parse_int(value)?,
        "oracle" => cfg.oracle = parse_bool(value)?,
        "plots" => cfg.plots = parse_bool(value)?,
        "eps_sing" => cfg.tolerances.sing = parse_f64(value)?,
        "eps_dot" => cfg.tolerances.dot = parse_f64(value)?,
        "eps_ddot" => cfg.tolerances.ddot = parse_f64(value)?,
        "eps_rank" => cfg.tolerances.rank = parse_f64(value)?,
        "radius" => cfg.radius = parse_f64(value)?,
        "major" => cfg.major = parse_f64(value)?,
        "minor" => cfg.minor = parse_f64(value)?,
        "amplitude" => cfg.amplitude = parse_f64(value)?,
        "epsilon" => cfg.epsilon = parse_f64(value)?,
        "pole_cap" => cfg.pole_cap = parse_f64(value)?,
        "t" => cfg.t = parse_list(value, parse_f64)?,
        "t_count" => cfg.t_count = parse_int(value)?,
        "cover" => cfg.cover = parse_int(value)?,
        "graph" => {
            let g = parse_list(value, parse_f64)?;
            if g.len() != 2 {
                return Err("`graph` takes two numbers `a,b`".into());
            }
            cfg.graph = [g[0], g[1]];
        }
        "points" => {
            cfg.points = value
                .split(';')
                .filter(|x| !x.trim().is_empty())
                .map(|pair| {
                    let c = parse_list(pair, parse_f64)?;
                    if c.len() != 2 {
                        return Err(format!("`{pair}` is not a point `u,v`"));
                    }
                    Ok(ChartPoint::new(c[0], c[1]))
                })
                .collect::<std::result::Result<_, String>>()?;
        }
        "out" => cfg.out = Some(value.to_string()),
        _ => unreachable!(),
    }
    Ok(())
}

const KEYS: [&str; 26] = [
    "scenario", "family", "grid", "degree_grid", "order", "seed", "oracle_seed", "oracle", "plots",
    "eps_sing", "eps_dot", "eps_ddot", "eps_rank", "radius", "major", "minor", "amplitude",
    "epsilon", "pole_cap", "t", "t_count", "cover", "graph", "points", "out", "#",
];

/// Parses and validates a scenario configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    // (line, key column, value column, key, value)
    let mut entries: Vec<(usize, usize, usize, &str, &str)> = Vec::new();
    let mut seen = HashSet::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for tok in body.split_whitespace() {
            let col = body[offset..].find(tok).unwrap() + offset;
            offset = col + tok.len();
            let column = raw[..col].chars().count() + 1;
            let Some(eq) = tok.find('=') else {
                return Err(parse_err(line, column, format!("expected `key=value`, found `{tok}`")));
            };
            let (key, value) = (&tok[..eq], &tok[eq + 1..]);
            if key.is_empty() {
                return Err(parse_err(line, column, "missing key before `=`"));
            }
            let vcol = column + key.chars().count() + 1;
            if value.is_empty() {
                return Err(parse_err(line, vcol, format!("missing value for `{key}`")));
            }
            if !KEYS[..KEYS.len() - 1].contains(&key) {
                return Err(parse_err(line, column, format!("unknown key `{key}`")));
            }
            if !seen.insert(key) {
                return Err(parse_err(line, column, format!("duplicate key `{key}`")));
            }
            entries.push((line, column, vcol, key, value));
        }
    }
    if entries.is_empty() {
        return Err(parse_err(1, 1, "empty configuration: `scenario` is required"));
    }
    let Some(&(sl, _, sv, _, sval)) = entries.iter().find(|e| e.3 == "scenario") else {
        let last = text.lines().count().max(1);
        return Err(parse_err(last, 1, "missing required key `scenario`"));
    };
    let kind = lookup(&ScenarioKind::ALL, sval, "scenario").map_err(|m| parse_err(sl, sv, m))?;
    let mut cfg = ScenarioConfig::new(kind);
    for &(line, _, vcol, key, value) in &entries {
        if key != "scenario" {
            assign(&mut cfg, key, value).map_err(|m| parse_err(line, vcol, m))?;
        }
    }
    cfg.validate()?;
    Ok(cfg.finish())
}

/// Environment variables overriding the grid and the tolerances.
pub const ENV_OVERRIDES: [&str; 5] = [
    "FRONTIDX_GRID",
    "FRONTIDX_EPS_SING",
    "FRONTIDX_EPS_DOT",
    "FRONTIDX_EPS_DDOT",
    "FRONTIDX_EPS_RANK",
];

/// Applies [`ENV_OVERRIDES`] read through `get`, then revalidates.
pub fn apply_env_overrides(cfg: &mut ScenarioConfig, get: impl Fn(&str) -> Option<String>) -> Result<()> {
    for name in ENV_OVERRIDES {
        let Some(v) = get(name) else { continue };
        let key = name.trim_start_matches("FRONTIDX_").to_ascii_lowercase();
        assign(cfg, &key, v.trim()).map_err(|m| Error::InvalidArgument(format!("{name}: {m}")))?;
    }
    cfg.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blaschke_line() {
        let c = parse_config("scenario=blaschke  family=rotational_gamma  epsilon=0.2125  grid=512").unwrap();
        assert_eq!(c.scenario, ScenarioKind::Blaschke);
        assert_eq!(c.family, Family::RotationalGamma);
        assert_eq!(c.epsilon, 17.0 / 80.0);
        assert_eq!(c.grid, 512);
    }

    #[test]
    fn epsilon_out_of_range() {
        let e = parse_config("scenario=blaschke\nfamily=rotational_gamma\nepsilon=0.3\n").unwrap_err();
        assert!(matches!(e, Error::Range { ref key, .. } if key == "epsilon"), "{e}");
    }

    #[test]
    fn empty_file() {
        assert_eq!(
            parse_config("").unwrap_err(),
            Error::Parse { line: 1, column: 1, message: "empty configuration: `scenario` is required".into() }
        );
        assert!(matches!(parse_config("# only a comment\n\n"), Err(Error::Parse { line: 1, column: 1, .. })));
    }

    #[test]
    fn positions() {
        let e = parse_config("scenario=blaschke\n  grid=abc\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 8, .. }), "{e}");
        let e = parse_config("scenario=blaschke\ngrid 12\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 1, .. }), "{e}");
        let e = parse_config("scenario=blaschke # c\n  bogus=1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 3, .. }), "{e}");
    }

    #[test]
    fn lists_and_env() {
        // whitespace splits assignments, so the second item is a stray token
        let e = parse_config("scenario=parallel_sweep\nt=-1.47, -1.4\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 10, .. }), "{e}");
        let mut c = parse_config("scenario=parallel_sweep\nt=-1.47,-1.4\npoints=0,0;0.1,-0.06\n").unwrap();
        assert_eq!(c.t, vec![-1.47, -1.4]);
        apply_env_overrides(&mut c, |k| (k == "FRONTIDX_GRID").then(|| "64".to_string())).unwrap();
        assert_eq!(c.grid, 64);
        assert!(apply_env_overrides(&mut c, |k| (k == "FRONTIDX_EPS_DOT").then(|| "-1".to_string())).is_err());
    }
}
