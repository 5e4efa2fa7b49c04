//! Run configuration files.
//!
//! The format is `key = value` lines under `[experiment]`, `[kernel]`, `[crm]`
//! and `[output]` headers. `#` and `;` start comment lines. Every key must be
//! known and used by the chosen variants, and every error carries the line
//! number and the dotted key name.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use hazardlab::asymptotics::{Functional, RateFunction};
use hazardlab::conditions::{Theorem, Verdict, DEFAULT_T_GRID};
use hazardlab::crm::PositiveFunction;
use hazardlab::montecarlo::{CenteringMode, DEFAULT_EPSILON, MIN_REPLICATES};
use hazardlab::{JumpIntensity, Kernel};

pub const DEFAULT_REPLICATES: usize = 2000;
pub const DEFAULT_KS_THRESHOLD: f64 = 0.01;
pub const DEFAULT_PATH_GRID: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Regimes,
    CheckConditions,
    Simulate,
    SamplePaths,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Regimes => "regimes",
            Kind::CheckConditions => "check-conditions",
            Kind::Simulate => "simulate",
            Kind::SamplePaths => "sample-paths",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "regimes" => Some(Kind::Regimes),
            "check-conditions" | "check_conditions" => Some(Kind::CheckConditions),
            "simulate" => Some(Kind::Simulate),
            "sample-paths" | "sample_paths" => Some(Kind::SamplePaths),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }
}

/// Expected verdict of one condition, for `experiment.expect`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Converges,
    Vanishes,
    Diverges,
    Inconclusive,
    Any,
}

impl Expectation {
    pub fn name(&self) -> &'static str {
        match self {
            Expectation::Converges => "converges",
            Expectation::Vanishes => "vanishes",
            Expectation::Diverges => "diverges",
            Expectation::Inconclusive => "inconclusive",
            Expectation::Any => "any",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "converges" => Some(Expectation::Converges),
            "vanishes" => Some(Expectation::Vanishes),
            "diverges" => Some(Expectation::Diverges),
            "inconclusive" => Some(Expectation::Inconclusive),
            "any" => Some(Expectation::Any),
            _ => None,
        }
    }

    pub fn matches(&self, verdict: &Verdict) -> bool {
        match self {
            Expectation::Converges => matches!(verdict, Verdict::ConvergesToPositive { .. }),
            Expectation::Vanishes => matches!(verdict, Verdict::VanishesWithSlope { .. }),
            Expectation::Diverges => matches!(verdict, Verdict::Diverges { .. }),
            Expectation::Inconclusive => matches!(verdict, Verdict::Inconclusive),
            Expectation::Any => true,
        }
    }

    /// What each theorem's hypotheses ask of its conditions at the cataloged rate.
    pub fn defaults(theorem: Theorem) -> Vec<Expectation> {
        use Expectation::{Converges as C, Vanishes as V};
        match theorem {
            Theorem::CumHaz => vec![C, V],
            Theorem::Path2nd => vec![C, V, V, V, C, V],
            Theorem::PathVar => vec![V, C, C],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: Kind,
    pub kernel: Option<Kernel>,
    pub intensity: Option<JumpIntensity>,
    pub functional: Option<Functional>,
    pub theorem: Option<Theorem>,
    pub rate: Option<RateFunction>,
    pub delta: Option<f64>,
    pub t_grid: Vec<f64>,
    pub horizon: Option<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub centering: CenteringMode,
    pub ks_threshold: f64,
    pub expect: Option<Vec<Expectation>>,
    pub grid: usize,
    pub output: OutputConfig,
}

impl RunConfig {
    /// A configuration of the given kind with every default applied.
    pub fn defaults(kind: Kind) -> Self {
        RunConfig {
            kind,
            kernel: None,
            intensity: None,
            functional: None,
            theorem: None,
            rate: None,
            delta: None,
            t_grid: DEFAULT_T_GRID.to_vec(),
            horizon: None,
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            centering: CenteringMode::Catalog,
            ks_threshold: DEFAULT_KS_THRESHOLD,
            expect: None,
            grid: DEFAULT_PATH_GRID,
            output: OutputConfig {
                path: None,
                format: Format::Json,
            },
        }
    }

    /// Serializes to a document that [`parse_config`] maps back to `self`.
    pub fn to_ini(&self) -> String {
        let mut out = String::from("[experiment]\n");
        let kv = |out: &mut String, k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv(&mut out, "kind", self.kind.name().into());
        if let Some(f) = self.functional {
            kv(&mut out, "functional", f.name().into());
        }
        if let Some(t) = self.theorem {
            kv(&mut out, "theorem", t.name().into());
        }
        if let Some(r) = self.rate {
            kv(&mut out, "rate", format_rate(&r));
        }
        if let Some(d) = self.delta {
            kv(&mut out, "delta", d.to_string());
        }
        kv(&mut out, "t_grid", join(&self.t_grid));
        if let Some(h) = self.horizon {
            kv(&mut out, "horizon", h.to_string());
        }
        kv(&mut out, "replicates", self.replicates.to_string());
        kv(&mut out, "seed", self.seed.to_string());
        kv(&mut out, "epsilon", self.epsilon.to_string());
        kv(&mut out, "centering", self.centering.name().into());
        kv(&mut out, "ks_threshold", self.ks_threshold.to_string());
        if let Some(e) = &self.expect {
            kv(&mut out, "expect", e.iter().map(|x| x.name()).collect::<Vec<_>>().join(","));
        }
        kv(&mut out, "grid", self.grid.to_string());

        if let Some(k) = self.kernel {
            out.push_str("\n[kernel]\n");
            kv(&mut out, "type", k.name().into());
            match k {
                Kernel::Rectangular { tau } => kv(&mut out, "tau", tau.to_string()),
                Kernel::OrnsteinUhlenbeck { kappa } => kv(&mut out, "kappa", kappa.to_string()),
                Kernel::UShaped { beta_center } => kv(&mut out, "beta", beta_center.to_string()),
                Kernel::DykstraLaud => {}
            }
        }
        if let Some(i) = self.intensity {
            out.push_str("\n[crm]\n");
            kv(&mut out, "type", i.family_name().into());
            let f = match i {
                JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                    kv(&mut out, "sigma", sigma.to_string());
                    kv(&mut out, "gamma", gamma.to_string());
                    None
                }
                JumpIntensity::ExtendedGamma { beta_fn: f } | JumpIntensity::Beta { c_fn: f } => Some(f),
            };
            match f {
                Some(PositiveFunction::Constant { a }) => {
                    kv(&mut out, "function", "constant".into());
                    kv(&mut out, "a", a.to_string());
                }
                Some(PositiveFunction::AffineSqrt { a, b }) => {
                    kv(&mut out, "function", "affine_sqrt".into());
                    kv(&mut out, "a", a.to_string());
                    kv(&mut out, "b", b.to_string());
                }
                Some(PositiveFunction::IndicatorSqrt { b }) => {
                    kv(&mut out, "function", "indicator_sqrt".into());
                    kv(&mut out, "b", b.to_string());
                }
                None => {}
            }
        }
        out.push_str("\n[output]\n");
        if let Some(p) = &self.output.path {
            kv(&mut out, "path", p.display().to_string());
        }
        kv(&mut out, "format", self.output.format.name().into());
        out
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn format_rate(r: &RateFunction) -> String {
    match *r {
        RateFunction::Power { p } => format!("power:{p}"),
        RateFunction::PowerLog { p, q } => format!("power_log:{p},{q}"),
    }
}

const SECTIONS: [&str; 4] = ["experiment", "kernel", "crm", "output"];

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Raw `section.key → value` entries with their line numbers.
struct Document {
    entries: Vec<(String, Entry)>,
    headers: Vec<(String, usize)>,
}

impl Document {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(String, Entry)> = Vec::new();
        let mut headers = Vec::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
                continue;
            }
            if let Some(rest) = s.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err(line, s, "unterminated section header"))?.trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(line, name, "unknown section, expected experiment, kernel, crm or output"));
                }
                if headers.iter().any(|(h, _)| h == name) {
                    return Err(err(line, name, "section appears twice"));
                }
                headers.push((name.to_string(), line));
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| err(line, s, "expected key = value"))?;
            let key = k.trim();
            let Some(sec) = &section else {
                return Err(err(line, key, "key outside of any section"));
            };
            let full = format!("{sec}.{key}");
            if entries.iter().any(|(name, _)| *name == full) {
                return Err(err(line, &full, "key given twice"));
            }
            entries.push((
                full,
                Entry {
                    value: v.trim().to_string(),
                    line,
                    used: false,
                },
            ));
        }
        Ok(Document { entries, headers })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let (_, e) = self.entries.iter_mut().find(|(k, _)| k == key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn section_line(&self, key: &str) -> Option<usize> {
        let sec = key.split('.').next()?;
        self.headers.iter().find(|(h, _)| h == sec).map(|(_, l)| *l)
    }

    fn missing(&self, key: &str, why: &str) -> ConfigError {
        ConfigError {
            line: self.section_line(key),
            key: key.to_string(),
            message: format!("missing required key ({why})"),
        }
    }

    fn required(&mut self, key: &str, why: &str) -> Result<(String, usize), ConfigError> {
        self.take(key).ok_or_else(|| self.missing(key, why))
    }

    fn parsed<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => parse(&v).map(Some).map_err(|m| err(line, key, &m)),
        }
    }

    fn required_parsed<T>(
        &mut self,
        key: &str,
        why: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<(T, usize), ConfigError> {
        let (v, line) = self.required(key, why)?;
        parse(&v).map(|x| (x, line)).map_err(|m| err(line, key, &m))
    }

    fn reject_unused(&self) -> Result<(), ConfigError> {
        match self.entries.iter().find(|(_, e)| !e.used) {
            Some((k, e)) => Err(err(e.line, k, "unknown key, or not used by this configuration")),
            None => Ok(()),
        }
    }
}

fn err(line: usize, key: &str, message: &str) -> ConfigError {
    ConfigError {
        line: Some(line),
        key: key.to_string(),
        message: message.to_string(),
    }
}

fn real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| real(x.trim())).collect()
}

fn parse_rate(s: &str) -> Result<RateFunction, String> {
    let usage = "expected power:<p> or power_log:<p>,<q>";
    let (kind, args) = s.split_once(':').ok_or(usage)?;
    let args = reals(args)?;
    match (kind.trim(), args.as_slice()) {
        ("power", [p]) => Ok(RateFunction::Power { p: *p }),
        ("power_log", [p, q]) => Ok(RateFunction::PowerLog { p: *p, q: *q }),
        _ => Err(usage.into()),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut doc = Document::parse(text)?;
    let (kind, _) = doc.required_parsed("experiment.kind", "one of regimes, check-conditions, simulate, sample-paths", |s| {
        Kind::parse(s).ok_or_else(|| format!("unknown kind '{s}'"))
    })?;
    let mut cfg = RunConfig::defaults(kind);

    let needs_model = kind != Kind::Regimes;
    let kernel_present = doc.entries.iter().any(|(k, _)| k.starts_with("kernel."));
    let crm_present = doc.entries.iter().any(|(k, _)| k.starts_with("crm."));
    if needs_model || kernel_present {
        cfg.kernel = Some(parse_kernel(&mut doc)?);
    }
    if needs_model || crm_present {
        cfg.intensity = Some(parse_crm(&mut doc)?);
    }

    if let Some(g) = doc.parsed("experiment.t_grid", reals)? {
        cfg.t_grid = g;
    }
    if let Some(r) = doc.parsed("experiment.replicates", count)? {
        cfg.replicates = r;
    }
    if let Some(s) = doc.parsed("experiment.seed", |s| s.parse::<u64>().map_err(|_| format!("'{s}' is not a 64-bit seed")))? {
        cfg.seed = s;
    }
    if let Some(e) = doc.parsed("experiment.epsilon", positive)? {
        cfg.epsilon = e;
    }
    if let Some(c) = doc.parsed("experiment.centering", |s| {
        CenteringMode::parse(s).map_err(|e| e.to_string())
    })? {
        cfg.centering = c;
    }
    if let Some(k) = doc.parsed("experiment.ks_threshold", real)? {
        cfg.ks_threshold = k;
    }
    if let Some(g) = doc.parsed("experiment.grid", count)? {
        cfg.grid = g;
    }
    cfg.functional = doc.parsed("experiment.functional", |s| {
        Functional::parse(s).ok_or_else(|| {
            format!("unknown functional '{s}', expected cumulative_hazard, path_second_moment or path_variance")
        })
    })?;
    cfg.theorem = doc.parsed("experiment.theorem", |s| {
        Theorem::parse(s).ok_or_else(|| format!("unknown theorem '{s}', expected cumhaz, path2nd or pathvar"))
    })?;
    cfg.rate = doc.parsed("experiment.rate", parse_rate)?;
    cfg.delta = doc.parsed("experiment.delta", positive)?;
    cfg.horizon = doc.parsed("experiment.horizon", positive)?;
    let expect_line = doc.entries.iter().find(|(k, _)| k == "experiment.expect").map(|(_, e)| e.line);
    cfg.expect = doc.parsed("experiment.expect", |s| {
        s.split(',')
            .map(|x| {
                let x = x.trim();
                Expectation::parse(x)
                    .ok_or_else(|| format!("unknown expectation '{x}', expected converges, vanishes, diverges, inconclusive or any"))
            })
            .collect()
    })?;

    if let Some(p) = doc.parsed("output.path", |s| Ok(PathBuf::from(s)))? {
        cfg.output.path = Some(p);
    }
    if let Some(f) = doc.parsed("output.format", |s| Format::parse(s).ok_or_else(|| format!("unknown format '{s}', expected json or csv")))? {
        cfg.output.format = f;
    }

    validate(&cfg, &doc, expect_line)?;
    doc.reject_unused()?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig, doc: &Document, expect_line: Option<usize>) -> Result<(), ConfigError> {
    let line_of = |key: &str| {
        doc.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, e)| e.line)
            .or_else(|| doc.section_line(key))
    };
    let fail = |key: &str, message: String| ConfigError {
        line: line_of(key),
        key: key.to_string(),
        message,
    };
    let g = &cfg.t_grid;
    if g.len() < 4 || g[0] <= 0.0 || !g.windows(2).all(|w| w[0] < w[1]) {
        return Err(fail(
            "experiment.t_grid",
            "needs at least 4 positive, strictly increasing horizons".into(),
        ));
    }
    if cfg.replicates < MIN_REPLICATES {
        return Err(fail(
            "experiment.replicates",
            format!("must be at least {MIN_REPLICATES}, got {}", cfg.replicates),
        ));
    }
    if !(0.0..=1.0).contains(&cfg.ks_threshold) {
        return Err(fail("experiment.ks_threshold", "must lie in [0, 1]".into()));
    }
    if cfg.grid == 0 {
        return Err(fail("experiment.grid", "must be at least 1".into()));
    }
    match cfg.kind {
        Kind::Regimes => {}
        Kind::CheckConditions => {
            let Some(theorem) = cfg.theorem else {
                return Err(doc.missing("experiment.theorem", "check-conditions needs cumhaz, path2nd or pathvar"));
            };
            if let Some(e) = &cfg.expect {
                let n = Expectation::defaults(theorem).len();
                if e.len() != n {
                    return Err(ConfigError {
                        line: expect_line,
                        key: "experiment.expect".into(),
                        message: format!("theorem {} has {n} conditions but {} expectations were given", theorem.name(), e.len()),
                    });
                }
            }
            if cfg.delta.is_some() && theorem != Theorem::PathVar {
                return Err(fail("experiment.delta", "only used by theorem pathvar".into()));
            }
        }
        Kind::Simulate | Kind::SamplePaths => {
            if cfg.horizon.is_none() {
                return Err(doc.missing("experiment.horizon", "simulations need a horizon T > 0"));
            }
            if cfg.kind == Kind::Simulate && cfg.functional.is_none() {
                return Err(doc.missing(
                    "experiment.functional",
                    "cumulative_hazard, path_second_moment or path_variance",
                ));
            }
        }
    }
    // keys that only make sense for other kinds
    let owners: [(&str, &[Kind]); 6] = [
        ("experiment.theorem", &[Kind::CheckConditions]),
        ("experiment.rate", &[Kind::CheckConditions]),
        ("experiment.delta", &[Kind::CheckConditions]),
        ("experiment.expect", &[Kind::CheckConditions]),
        ("experiment.horizon", &[Kind::Simulate, Kind::SamplePaths]),
        ("experiment.functional", &[Kind::Simulate, Kind::SamplePaths]),
    ];
    for (key, kinds) in owners {
        if doc.entries.iter().any(|(k, _)| k == key) && !kinds.contains(&cfg.kind) {
            return Err(fail(key, format!("not used by kind {}", cfg.kind.name())));
        }
    }
    Ok(())
}

fn parse_kernel(doc: &mut Document) -> Result<Kernel, ConfigError> {
    let (ty, line) = doc.required(
        "kernel.type",
        "one of rectangular, dykstra_laud, ornstein_uhlenbeck, u_shaped",
    )?;
    let kernel = match ty.as_str() {
        "rectangular" => Kernel::Rectangular {
            tau: doc.required_parsed("kernel.tau", "rectangular kernels need tau > 0", positive)?.0,
        },
        "dykstra_laud" => Kernel::DykstraLaud,
        "ornstein_uhlenbeck" | "ou" => Kernel::OrnsteinUhlenbeck {
            kappa: doc.required_parsed("kernel.kappa", "OU kernels need kappa > 0", positive)?.0,
        },
        "u_shaped" => Kernel::UShaped {
            beta_center: doc.required_parsed("kernel.beta", "U-shaped kernels need beta > 0", positive)?.0,
        },
        other => {
            return Err(err(
                line,
                "kernel.type",
                &format!("unknown kernel '{other}', expected rectangular, dykstra_laud, ornstein_uhlenbeck or u_shaped"),
            ))
        }
    };
    Ok(kernel)
}

fn parse_function(doc: &mut Document, family: &str) -> Result<PositiveFunction, ConfigError> {
    let (ty, line) = doc.required("crm.function", &format!("{family} needs constant, affine_sqrt or indicator_sqrt"))?;
    let f = match ty.as_str() {
        "constant" => PositiveFunction::Constant {
            a: doc.required_parsed("crm.a", "constant functions need a", real)?.0,
        },
        "affine_sqrt" => PositiveFunction::AffineSqrt {
            a: doc.required_parsed("crm.a", "affine_sqrt needs a", real)?.0,
            b: doc.required_parsed("crm.b", "affine_sqrt needs b", real)?.0,
        },
        "indicator_sqrt" => PositiveFunction::IndicatorSqrt {
            b: doc.required_parsed("crm.b", "indicator_sqrt needs b", real)?.0,
        },
        other => {
            return Err(err(
                line,
                "crm.function",
                &format!("unknown function '{other}', expected constant, affine_sqrt or indicator_sqrt"),
            ))
        }
    };
    f.validate().map_err(|e| err(line, "crm.function", &e.to_string()))?;
    Ok(f)
}

fn parse_crm(doc: &mut Document) -> Result<JumpIntensity, ConfigError> {
    let (ty, line) = doc.required("crm.type", "one of generalized_gamma, extended_gamma, beta")?;
    match ty.as_str() {
        "generalized_gamma" => {
            let (sigma, sigma_line) = doc.required_parsed("crm.sigma", "generalized gamma needs sigma", real)?;
            if !(sigma > 0.0 && sigma < 1.0) {
                return Err(err(sigma_line, "crm.sigma", &format!("constraint violated: sigma in (0,1), got {sigma}")));
            }
            let (gamma, gamma_line) = doc.required_parsed("crm.gamma", "generalized gamma needs gamma", real)?;
            if gamma <= 0.0 {
                return Err(err(gamma_line, "crm.gamma", &format!("constraint violated: gamma > 0, got {gamma}")));
            }
            Ok(JumpIntensity::GeneralizedGamma { sigma, gamma })
        }
        "extended_gamma" => Ok(JumpIntensity::ExtendedGamma {
            beta_fn: parse_function(doc, "extended_gamma")?,
        }),
        "beta" => Ok(JumpIntensity::Beta {
            c_fn: parse_function(doc, "beta")?,
        }),
        other => Err(err(
            line,
            "crm.type",
            &format!("unknown family '{other}', expected generalized_gamma, extended_gamma or beta"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config("[experiment]\nkind = regimes\n").unwrap();
        assert_eq!(cfg, RunConfig::defaults(Kind::Regimes));
        assert_eq!(cfg.epsilon, 1e-6);
        assert_eq!(cfg.t_grid, vec![50.0, 100.0, 200.0, 400.0, 800.0]);
        assert_eq!(cfg.replicates, 2000);
        assert_eq!(cfg.output.format, Format::Json);
    }

    #[test]
    fn missing_tau_is_named() {
        let text = "[experiment]\nkind = sample-paths\nhorizon = 10\n[kernel]\ntype = rectangular\n[crm]\ntype = generalized_gamma\nsigma = 0.5\ngamma = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.key, "kernel.tau");
        assert_eq!(e.line, Some(4));
        assert!(e.to_string().contains("kernel.tau"));
    }

    #[test]
    fn sigma_constraint_is_cited() {
        let text = "[experiment]\nkind = sample-paths\nhorizon = 10\n[kernel]\ntype = dykstra_laud\n[crm]\ntype = generalized_gamma\nsigma = 1.5\ngamma = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.key, "crm.sigma");
        assert_eq!(e.line, Some(8));
        assert!(e.message.contains("sigma in (0,1)"), "{e}");
    }

    #[test]
    fn unknown_and_unused_keys_are_rejected() {
        let e = parse_config("[experiment]\nkind = regimes\ncolour = blue\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("experiment.colour", Some(3)));
        let text = "[experiment]\nkind = sample-paths\nhorizon = 10\n[kernel]\ntype = dykstra_laud\ntau = 1\n[crm]\ntype = extended_gamma\nfunction = constant\na = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.key, "kernel.tau");
        let e = parse_config("[experiment]\nkind = regimes\nhorizon = 5\n").unwrap_err();
        assert_eq!(e.key, "experiment.horizon");
        let e = parse_config("[nonsense]\n").unwrap_err();
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn expectation_count_must_match_the_theorem() {
        let text = "[experiment]\nkind = check-conditions\ntheorem = cumhaz\nexpect = converges\n[kernel]\ntype = dykstra_laud\n[crm]\ntype = generalized_gamma\nsigma = 0.5\ngamma = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("experiment.expect", Some(4)));
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::defaults(Kind::CheckConditions);
        cfg.kernel = Some(Kernel::UShaped { beta_center: 2.5 });
        cfg.intensity = Some(JumpIntensity::Beta {
            c_fn: PositiveFunction::AffineSqrt { a: 0.1 + 0.2, b: 1.0 / 3.0 },
        });
        cfg.theorem = Some(Theorem::PathVar);
        cfg.rate = Some(RateFunction::PowerLog { p: -1.0, q: -0.5 });
        cfg.delta = Some(2f64.sqrt());
        cfg.expect = Some(vec![Expectation::Vanishes, Expectation::Any, Expectation::Diverges]);
        cfg.t_grid = vec![10.0, 20.5, 40.0, 1e5];
        cfg.seed = u64::MAX;
        cfg.output.path = Some(PathBuf::from("out/report.csv"));
        cfg.output.format = Format::Csv;
        assert_eq!(parse_config(&cfg.to_ini()).unwrap(), cfg);

        let mut sim = RunConfig::defaults(Kind::Simulate);
        sim.kernel = Some(Kernel::OrnsteinUhlenbeck { kappa: 0.7 });
        sim.intensity = Some(JumpIntensity::GeneralizedGamma { sigma: 0.25, gamma: 3.0 });
        sim.functional = Some(Functional::PathVariance);
        sim.horizon = Some(123.456);
        sim.epsilon = 3.5e-7;
        sim.centering = CenteringMode::QuadratureI1;
        assert_eq!(parse_config(&sim.to_ini()).unwrap(), sim);
    }
}
