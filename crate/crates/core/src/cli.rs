//! Command-line front end. Human-readable tables go to stdout, JSON reports to
//! the file named by `--json`. Exit codes: 0 success, 1 a check or numerical
//! contract failed, 2 malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcx::{self, bar_differential, BarError, DgaFile, DgaPresentation};
use crate::chenint::{self, chen_transport, Ambient, ChenError, Model, PathSpec, Pt, Segment, SegmentLog};
use crate::exact;
use crate::kzbword::{self, KzbError};
use crate::logforms::{self, ExtLattice, FormError, FormSymbol, DEFAULT_TRUNCATION};
use crate::p1model::{self, MZVIndex, MzvError};
use crate::verify::{self, Selection, VerifyConfig};
use crate::wlattice::{lattice_from_curve, CurveSpec, LatticeData, LatticeError};

pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_ELL: usize = 3;
const LEGENDRE_LIMIT: f64 = 1e-9;
const EISENSTEIN_LIMIT: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::DegenerateCurve
            | LatticeError::InvalidBasis(_)
            | LatticeError::InvalidTolerance(_)
            | LatticeError::InvalidWeight(_)
            | LatticeError::NotLatticeElement(_) => CliError::Input(e.to_string()),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<FormError> for CliError {
    fn from(e: FormError) -> Self {
        match e {
            FormError::Lattice(l) => l.into(),
            FormError::NoResidue => CliError::Check(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ChenError> for CliError {
    fn from(e: ChenError) -> Self {
        match e {
            ChenError::GuardViolation { .. } | ChenError::QuadratureFailure(_) | ChenError::FitInstability { .. } => {
                CliError::Check(e.to_string())
            }
            ChenError::Form(f) => f.into(),
            ChenError::Lattice(l) => l.into(),
            ChenError::Bar(b) => b.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BarError> for CliError {
    fn from(e: BarError) -> Self {
        match e {
            BarError::DimensionBound { .. } => CliError::Check(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<KzbError> for CliError {
    fn from(e: KzbError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MzvError> for CliError {
    fn from(e: MzvError) -> Self {
        match e {
            MzvError::Integral(c) => c.into(),
            MzvError::ToleranceNotReached { .. } => CliError::Check(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "edagger",
    version,
    about = "Iterated integrals on the universal vectorial extension of an elliptic curve"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Periods, quasi-periods, modulus and consistency residuals
    Periods(Common),
    /// ℘, ℘′, ζ and σ at a point
    Wfun(Common),
    /// The coefficients f⁽⁰⁾..f⁽ᴺ⁾ at a point (z, s)
    Forms(Common),
    /// Exact basis of closed degree-zero bar elements up to length ℓ
    Bar(Common),
    /// Checks dω + ω∧ω = 0 for the truncated connection form
    #[command(name = "kzb-flatness")]
    KzbFlatness(Common),
    /// Iterated integral of a word along a path
    Integrate(Common),
    /// Multiple zeta value by series and by regularized integral
    Mzv(Common),
    /// Runs the acceptance suite
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Curve y² = 4x³ − ax − b, as `a/b` (integers) or `a,b` (rationals p/q)
    #[arg(long)]
    curve: Option<String>,
    /// Explicit lattice basis `re1,im1,re2,im2`
    #[arg(long)]
    lattice: Option<String>,
    /// Model for bar and integrate: edagger or p1
    #[arg(long)]
    model: Option<String>,
    /// Truncation order of the ω⁽ⁿ⁾ family
    #[arg(long = "N")]
    n: Option<usize>,
    /// Bar length bound
    #[arg(long)]
    ell: Option<usize>,
    /// Numerical tolerance, in [1e-14, 1e-3]
    #[arg(long)]
    tol: Option<f64>,
    /// Path file (JSON)
    #[arg(long)]
    path: Option<PathBuf>,
    /// Word: letters `nu,w0,w3` (edagger) or a 0/1 string (p1)
    #[arg(long)]
    word: Option<String>,
    /// MZV index such as `2,1`
    #[arg(long)]
    index: Option<String>,
    /// Point z as `re,im`
    #[arg(long)]
    z: Option<String>,
    /// Fiber coordinate s as `re,im`
    #[arg(long)]
    s: Option<String>,
    /// Deck-transformation path `m,n` from (ω₁+ω₂)/2 to its translate
    #[arg(long = "loop")]
    lattice_loop: Option<String>,
    /// Circle `cx,cy,r` traversed once counterclockwise
    #[arg(long)]
    circle: Option<String>,
    /// Presentation file (JSON) for `bar`, replacing the built-in models
    #[arg(long)]
    dga: Option<PathBuf>,
    /// Run configuration (JSON); command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Verification configuration (JSON with `tol` and `select`)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerance handed to the numerical criteria
    #[arg(long)]
    tol: Option<f64>,
    /// `all`, `negative-controls`, or a list of criterion ids such as `1,4,9`
    #[arg(long)]
    select: Option<String>,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Curve coefficients as exact rational strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveInput {
    pub a: String,
    pub b: String,
}

/// File form of the options shared by all subcommands except `verify`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: Option<CurveInput>,
    pub lattice: Option<[C64; 2]>,
    pub model: Option<Model>,
    pub truncation: Option<usize>,
    pub ell: Option<usize>,
    pub tol: Option<f64>,
    pub path: Option<PathSpec>,
    pub word: Option<String>,
    pub index: Option<String>,
    pub z: Option<C64>,
    pub s: Option<C64>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tol {
            if !(MIN_TOL..=MAX_TOL).contains(&t) {
                return Err(CliError::Input(format!("tolerance {t:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]")));
            }
        }
        if let Some(c) = &self.curve {
            for v in [&c.a, &c.b] {
                exact::parse_rational(v).map_err(|e| CliError::Input(e.to_string()))?;
            }
        }
        Ok(())
    }
}

struct Resolved {
    cfg: RunConfig,
    lattice_loop: Option<(i64, i64)>,
    circle: Option<(C64, f64)>,
    dga: Option<PathBuf>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| input(format!("{what}: cannot parse {t:?}"))))
        .collect::<Result<_, _>>()?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(input(format!("{what}: expected {n} finite comma-separated numbers")));
    }
    Ok(v)
}

fn parse_complex(s: &str, what: &str) -> Result<C64, CliError> {
    let v = parse_floats(s, 2, what)?;
    Ok(C64::new(v[0], v[1]))
}

fn parse_curve(s: &str) -> Result<CurveInput, CliError> {
    let parts: Vec<&str> = if s.contains(',') { s.split(',').collect() } else { s.split('/').collect() };
    if parts.len() != 2 {
        return Err(input(format!("--curve: expected a/b or a,b, got {s:?}")));
    }
    let c = CurveInput { a: parts[0].trim().to_string(), b: parts[1].trim().to_string() };
    for v in [&c.a, &c.b] {
        exact::parse_rational(v).map_err(|e| input(format!("--curve: {e}")))?;
    }
    Ok(c)
}

fn parse_model(s: &str) -> Result<Model, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "edagger" | "e" => Ok(Model::Edagger),
        "p1" => Ok(Model::P1),
        _ => Err(input(format!("unknown model {s:?} (expected edagger or p1)"))),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(p: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| input(format!("{what} {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| input(format!("{what} {}: {e}", p.display())))
}

fn resolve(c: &Common) -> Result<Resolved, CliError> {
    let mut cfg: RunConfig = match &c.config {
        Some(p) => read_json(p, "config")?,
        None => RunConfig::default(),
    };
    if let Some(s) = &c.curve {
        cfg.curve = Some(parse_curve(s)?);
        cfg.lattice = None;
    }
    if let Some(s) = &c.lattice {
        let v = parse_floats(s, 4, "--lattice")?;
        cfg.lattice = Some([C64::new(v[0], v[1]), C64::new(v[2], v[3])]);
        cfg.curve = None;
    }
    if let Some(m) = &c.model {
        cfg.model = Some(parse_model(m)?);
    }
    if c.n.is_some() {
        cfg.truncation = c.n;
    }
    if c.ell.is_some() {
        cfg.ell = c.ell;
    }
    if c.tol.is_some() {
        cfg.tol = c.tol;
    }
    if let Some(p) = &c.path {
        cfg.path = Some(read_json(p, "path file")?);
    }
    if c.word.is_some() {
        cfg.word = c.word.clone();
    }
    if c.index.is_some() {
        cfg.index = c.index.clone();
    }
    if let Some(z) = &c.z {
        cfg.z = Some(parse_complex(z, "--z")?);
    }
    if let Some(s) = &c.s {
        cfg.s = Some(parse_complex(s, "--s")?);
    }
    cfg.validate()?;
    let lattice_loop = match &c.lattice_loop {
        Some(s) => {
            let v: Vec<i64> = s
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| input(format!("--loop: cannot parse {t:?}"))))
                .collect::<Result<_, _>>()?;
            if v.len() != 2 || v == [0, 0] {
                return Err(input("--loop: expected a nonzero pair m,n"));
            }
            Some((v[0], v[1]))
        }
        None => None,
    };
    let circle = match &c.circle {
        Some(s) => {
            let v = parse_floats(s, 3, "--circle")?;
            if v[2] <= 0.0 {
                return Err(input("--circle: radius must be positive"));
            }
            Some((C64::new(v[0], v[1]), v[2]))
        }
        None => None,
    };
    Ok(Resolved { cfg, lattice_loop, circle, dga: c.dga.clone() })
}

impl Resolved {
    fn tol(&self) -> f64 {
        self.cfg.tol.unwrap_or(DEFAULT_TOL)
    }

    fn lattice(&self) -> Result<LatticeData, CliError> {
        if let Some([w1, w2]) = self.cfg.lattice {
            return Ok(LatticeData::from_basis(w1, w2)?);
        }
        let c = self.cfg.curve.as_ref().ok_or_else(|| input("a curve (--curve) or lattice (--lattice) is required"))?;
        let spec = self.curve_spec(c)?;
        Ok(lattice_from_curve(&spec, self.tol().clamp(1e-14, 1e-6))?)
    }

    fn curve_spec(&self, c: &CurveInput) -> Result<CurveSpec, CliError> {
        let a = exact::parse_rational(&c.a).map_err(|e| input(e.to_string()))?;
        let b = exact::parse_rational(&c.b).map_err(|e| input(e.to_string()))?;
        Ok(CurveSpec::new(a, b)?)
    }

    fn z(&self) -> Result<C64, CliError> {
        self.cfg.z.ok_or_else(|| input("--z is required"))
    }
}

/// Output sink for one command: table lines plus a JSON payload.
struct Report {
    lines: Vec<String>,
    json: serde_json::Value,
    /// failure message turning the exit code to 1 after output is written
    failure: Option<String>,
}

fn cfmt(z: C64) -> String {
    format!("{:+.15e} {:+.15e}i", z.re, z.im)
}

fn row(name: &str, v: impl std::fmt::Display) -> String {
    format!("{name:<28} {v}")
}

fn cmd_periods(r: &Resolved) -> Result<Report, CliError> {
    let l = r.lattice()?;
    let legendre = (l.legendre_value().norm() - 2.0 * std::f64::consts::PI).abs();
    let [ea, eb] = l.eisenstein_residuals;
    let mut lines = vec![
        row("omega1", cfmt(l.omega1)),
        row("omega2", cfmt(l.omega2)),
        row("tau", cfmt(l.tau)),
        row("eta1", cfmt(l.eta1)),
        row("eta2", cfmt(l.eta2)),
        row("g2 = 60 G4", cfmt(l.g2)),
        row("g3 = 140 G6", cfmt(l.g3)),
        row("eta1 w2 - eta2 w1", cfmt(l.legendre_value())),
        row("legendre residual", format!("{legendre:.3e}")),
        row("eisenstein residual a", format!("{ea:.3e}")),
        row("eisenstein residual b", format!("{eb:.3e}")),
    ];
    let ok = legendre <= LEGENDRE_LIMIT && ea <= EISENSTEIN_LIMIT && eb <= EISENSTEIN_LIMIT;
    lines.push(row("status", if ok { "ok" } else { "FAILED" }));
    let json = serde_json::json!({
        "command": "periods",
        "curve": r.cfg.curve,
        "lattice": l,
        "legendre_residual": legendre,
        "passed": ok,
    });
    let failure = (!ok).then(|| "period consistency checks failed".to_string());
    Ok(Report { lines, json, failure })
}

fn cmd_wfun(r: &Resolved) -> Result<Report, CliError> {
    let l = r.lattice()?;
    let z = r.z()?;
    let (p, dp) = l.wp(z)?;
    let zeta = l.wzeta(z)?;
    let sigma = l.wsigma(z);
    let lines = vec![
        row("z", cfmt(z)),
        row("wp", cfmt(p)),
        row("wp'", cfmt(dp)),
        row("zeta", cfmt(zeta)),
        row("sigma", cfmt(sigma)),
    ];
    let json = serde_json::json!({
        "command": "wfun", "z": z, "wp": p, "wp_prime": dp, "zeta": zeta, "sigma": sigma,
    });
    Ok(Report { lines, json, failure: None })
}

fn cmd_forms(r: &Resolved) -> Result<Report, CliError> {
    let l = r.lattice()?;
    let n = r.cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let ext = ExtLattice::new(l, n);
    let z = r.z()?;
    let s = r.cfg.s.unwrap_or_else(C64::zero);
    let f = ext.f_all(z, s)?;
    let mut lines = vec![row("z", cfmt(z)), row("s", cfmt(s))];
    lines.extend(f.iter().enumerate().map(|(k, v)| row(&format!("f({k})"), cfmt(*v))));
    let json = serde_json::json!({ "command": "forms", "z": z, "s": s, "truncation": n, "f": f });
    Ok(Report { lines, json, failure: None })
}

fn presentation(r: &Resolved) -> Result<(String, DgaPresentation), CliError> {
    if let Some(p) = &r.dga {
        let f: DgaFile = read_json(p, "presentation")?;
        return Ok(("file".into(), DgaPresentation::from_file(&f)?));
    }
    match r.cfg.model.unwrap_or(Model::Edagger) {
        Model::P1 => Ok(("p1".into(), p1model::p1_dga())),
        Model::Edagger => {
            let n = r.cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
            Ok((format!("edagger N={n}"), logforms::dga_presentation(n)))
        }
    }
}

#[derive(Serialize)]
struct BarEntry {
    length: usize,
    element: String,
    closed: bool,
}

fn cmd_bar(r: &Resolved) -> Result<Report, CliError> {
    let (name, p) = presentation(r)?;
    let ell = r.cfg.ell.unwrap_or(DEFAULT_ELL);
    let basis = barcx::h0_basis(&p, ell)?;
    let mut entries = Vec::new();
    for x in &basis {
        let closed = bar_differential(x, &p)?.is_zero();
        entries.push(BarEntry { length: x.length(), element: x.display(&p).to_string(), closed });
    }
    let mut dims = Vec::new();
    for k in 0..=ell {
        dims.push(entries.iter().filter(|e| e.length <= k).count());
    }
    let mut lines = vec![row("model", &name), row("ell", ell), row("kernel dimension", basis.len())];
    for (k, d) in dims.iter().enumerate() {
        lines.push(row(&format!("  length <= {k}"), d));
    }
    for e in &entries {
        lines.push(format!("  {}{}", e.element, if e.closed { "" } else { "   (NOT CLOSED)" }));
    }
    let all_closed = entries.iter().all(|e| e.closed);
    let json = serde_json::json!({
        "command": "bar", "model": name, "ell": ell, "dimension": basis.len(),
        "dimensions_by_length": dims, "basis": entries,
    });
    Ok(Report { lines, json, failure: (!all_closed).then(|| "basis element failed closedness".into()) })
}

fn cmd_flatness(r: &Resolved) -> Result<Report, CliError> {
    let n = r.cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let ell = r.cfg.ell.unwrap_or(n.min(5));
    let rep = kzbword::flatness_check(n, ell)?;
    let mut lines = vec![
        row("truncation N", n),
        row("ell", ell),
        row("words checked", rep.words_checked),
        row("defects", rep.defects.len()),
    ];
    for d in &rep.defects {
        lines.push(format!("  {}: {:?}", d.word, d.residual));
    }
    let flat = rep.is_flat();
    lines.push(row("status", if flat { "flat" } else { "NOT FLAT" }));
    let json = serde_json::json!({ "command": "kzb-flatness", "report": rep, "flat": flat });
    Ok(Report { lines, json, failure: (!flat).then(|| "curvature does not vanish".into()) })
}

fn parse_edagger_word(s: &str) -> Result<Vec<usize>, CliError> {
    let w: Vec<usize> = s
        .split(|c: char| c == ',' || c == '|' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<FormSymbol>().map(|f| f.basis_index()).map_err(|e| input(format!("--word: {e}"))))
        .collect::<Result<_, _>>()?;
    if w.is_empty() {
        return Err(input("--word: empty word"));
    }
    Ok(w)
}

fn parse_p1_word(s: &str) -> Result<Vec<usize>, CliError> {
    let w: Vec<usize> = s
        .chars()
        .filter(|c| !matches!(c, ',' | '|' | ' '))
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(input(format!("--word: p1 words are strings over {{0,1}}, got {s:?}"))),
        })
        .collect::<Result<_, _>>()?;
    if w.is_empty() {
        return Err(input("--word: empty word"));
    }
    Ok(w)
}

#[derive(Serialize)]
struct IntegrateOut {
    command: &'static str,
    model: Model,
    word: String,
    value: C64,
    error_estimate: f64,
    segments: Vec<SegmentLog>,
    path: PathSpec,
}

fn cmd_integrate(r: &Resolved) -> Result<Report, CliError> {
    let model = r.cfg.model.or(r.cfg.path.as_ref().map(|p| p.model())).unwrap_or(Model::Edagger);
    let word_s = r.cfg.word.as_deref().ok_or_else(|| input("--word is required"))?;
    let tol = r.tol();
    match model {
        Model::P1 => {
            let word = parse_p1_word(word_s)?;
            let path = match (&r.cfg.path, r.circle) {
                (Some(p), _) => Some(p.clone()),
                (None, Some((c, rad))) => Some(circle(Model::P1, c, rad, C64::zero())?),
                (None, None) => None,
            };
            match path {
                Some(path) => {
                    let alpha = Ambient::P1.alphabet(&[0, 1])?;
                    let tr = chen_transport(&alpha, &path, word.len(), tol)?;
                    integrate_report(model, word_s, tr.get(&word), &tr, path)
                }
                None => {
                    let bytes: Vec<u8> = word.iter().map(|&b| b as u8).collect();
                    let reg = chenint::regularized_integral_p1(&bytes, tol)?;
                    let lines = vec![
                        row("word", word_s),
                        row("path", "regularized straight path 0 -> 1"),
                        row("value", cfmt(reg.value)),
                        row("fit residual", format!("{:.3e}", reg.residual)),
                    ];
                    let json = serde_json::json!({
                        "command": "integrate", "model": model, "word": word_s, "regularized": reg,
                    });
                    Ok(Report { lines, json, failure: None })
                }
            }
        }
        Model::Edagger => {
            let word = parse_edagger_word(word_s)?;
            let need = word.iter().map(|&i| i.saturating_sub(1)).max().unwrap_or(0);
            let n = r.cfg.truncation.unwrap_or(need.max(1));
            let l = r.lattice()?;
            let path = match (&r.cfg.path, r.lattice_loop, r.circle) {
                (Some(p), _, _) => p.clone(),
                (None, Some((m, k)), _) => {
                    let z0 = 0.5 * (l.omega1 + l.omega2);
                    let s0 = r.cfg.s.unwrap_or_else(C64::zero);
                    PathSpec::line(
                        Model::Edagger,
                        Pt::new(z0, s0),
                        Pt::new(z0 + l.lattice_point(m, k), s0 - l.eta_of(m, k)),
                    )
                }
                (None, None, Some((c, rad))) => circle(Model::Edagger, c, rad, r.cfg.s.unwrap_or_else(C64::zero))?,
                _ => return Err(input("a path is required: --path, --loop or --circle")),
            };
            let ext = ExtLattice::new(l, n);
            let mut letters: Vec<usize> = word.clone();
            letters.sort_unstable();
            letters.dedup();
            let alpha = Ambient::Edagger(&ext).alphabet(&letters)?;
            let pos: Vec<usize> = word.iter().map(|w| letters.binary_search(w).expect("letter present")).collect();
            let tr = chen_transport(&alpha, &path, word.len(), tol)?;
            integrate_report(model, word_s, tr.get(&pos), &tr, path)
        }
    }
}

fn circle(model: Model, c: C64, rad: f64, s: C64) -> Result<PathSpec, CliError> {
    Ok(PathSpec::new(
        model,
        vec![Segment::Arc { center: c, radius: rad, angles: [0.0, 2.0 * std::f64::consts::PI], s: [s, s] }],
    )?)
}

fn integrate_report(
    model: Model,
    word: &str,
    value: C64,
    tr: &chenint::TransportResult,
    path: PathSpec,
) -> Result<Report, CliError> {
    let err = tr.error.last().copied().unwrap_or(0.0);
    let mut lines = vec![row("word", word), row("value", cfmt(value)), row("error estimate", format!("{err:.3e}"))];
    for (i, s) in tr.segments.iter().enumerate() {
        lines.push(row(&format!("segment {i}"), format!("{} panels, depth {}", s.panels, s.max_depth)));
    }
    let out = IntegrateOut {
        command: "integrate",
        model,
        word: word.to_string(),
        value,
        error_estimate: err,
        segments: tr.segments.clone(),
        path,
    };
    let json = serde_json::to_value(out).map_err(|e| CliError::Check(e.to_string()))?;
    Ok(Report { lines, json, failure: None })
}

fn cmd_mzv(r: &Resolved) -> Result<Report, CliError> {
    let s = r.cfg.index.as_deref().or(r.cfg.word.as_deref()).ok_or_else(|| input("--index is required"))?;
    let idx: MZVIndex = s.parse()?;
    let tol = r.tol();
    let series = p1model::mzv_series(&idx, tol.max(1e-13))?;
    let integral = p1model::mzv_integral(&idx, tol)?;
    let sign = p1model::depth_sign(idx.depth());
    let diff = (integral - sign * series).norm();
    let ok = diff <= verify::TOL_MZV_INTEGRAL;
    let lines = vec![
        row("index", &idx),
        row("weight", idx.weight()),
        row("depth", idx.depth()),
        row("series", cfmt(series)),
        row("integral", cfmt(integral)),
        row("integral sign", sign),
        row("|integral - sign*series|", format!("{diff:.3e}")),
    ];
    let json = serde_json::json!({
        "command": "mzv", "index": idx.to_string(), "series": series, "integral": integral,
        "sign": sign, "difference": diff, "passed": ok,
    });
    Ok(Report { lines, json, failure: (!ok).then(|| "integral and series disagree".into()) })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Report, CliError> {
    let mut cfg: VerifyConfig = match &a.config {
        Some(p) => read_json(p, "verify config")?,
        None => VerifyConfig::default(),
    };
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    if let Some(s) = &a.select {
        cfg.select = match s.as_str() {
            "all" => Selection::All,
            "negative-controls" => Selection::NegativeControls,
            _ => Selection::Only(
                s.split(',')
                    .map(|t| t.trim().parse::<u32>().map_err(|_| input(format!("--select: cannot parse {t:?}"))))
                    .collect::<Result<_, _>>()?,
            ),
        };
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(input("verify tolerance must be positive"));
    }
    let rep = verify::run(&cfg);
    let mut lines = verify::summary_lines(&rep);
    lines.push(format!("{} passed, {} failed", rep.passed, rep.failed));
    let json = serde_json::to_value(&rep).map_err(|e| CliError::Check(e.to_string()))?;
    let failure = (!rep.all_passed).then(|| format!("{} criteria failed", rep.failed));
    Ok(Report { lines, json, failure })
}

fn dispatch(cmd: &Cmd) -> Result<(Report, Option<PathBuf>), CliError> {
    if let Cmd::Verify(a) = cmd {
        return Ok((cmd_verify(a)?, a.json.clone()));
    }
    let (c, f): (&Common, fn(&Resolved) -> Result<Report, CliError>) = match cmd {
        Cmd::Periods(c) => (c, cmd_periods),
        Cmd::Wfun(c) => (c, cmd_wfun),
        Cmd::Forms(c) => (c, cmd_forms),
        Cmd::Bar(c) => (c, cmd_bar),
        Cmd::KzbFlatness(c) => (c, cmd_flatness),
        Cmd::Integrate(c) => (c, cmd_integrate),
        Cmd::Mzv(c) => (c, cmd_mzv),
        Cmd::Verify(_) => unreachable!(),
    };
    let r = resolve(c)?;
    Ok((f(&r)?, c.json.clone()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.cmd) {
        Ok((rep, json_path)) => {
            for l in &rep.lines {
                let _ = writeln!(out, "{l}");
            }
            if let Some(p) = json_path {
                let text = serde_json::to_string_pretty(&rep.json).expect("report serializes") + "\n";
                if let Err(e) = std::fs::write(&p, text) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                    return 2;
                }
            }
            match rep.failure {
                Some(msg) => {
                    let _ = writeln!(err, "check failed: {msg}");
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the CLI in-process and returns the exit code with stdout and stderr
/// concatenated.
pub fn run_capture(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("edagger").chain(args.iter().copied()), &mut out, &mut err);
    out.extend_from_slice(&err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_syntax() {
        assert_eq!(parse_curve("4/0").unwrap(), CurveInput { a: "4".into(), b: "0".into() });
        assert_eq!(parse_curve("1/2,-3").unwrap(), CurveInput { a: "1/2".into(), b: "-3".into() });
        assert!(parse_curve("3/x").is_err());
        assert!(parse_curve("1/2/3").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["periods", "--curve", "4/0"]).0, 0);
        assert_eq!(run_capture(&["periods", "--curve", "3/1"]).0, 2);
        assert_eq!(run_capture(&["periods", "--curve", "4/0", "--tol", "1e-20"]).0, 2);
        assert_eq!(run_capture(&["periods"]).0, 2);
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["integrate", "--model", "p1", "--word", "0", "--circle", "0,0,1e-20"]).0, 1);
        assert_eq!(run_capture(&["integrate", "--model", "p1", "--word", "2", "--circle", "0,0,0.5"]).0, 2);
    }

    #[test]
    fn tau_for_square_lattice() {
        let (code, out) = run_capture(&["periods", "--curve", "4/0"]);
        assert_eq!(code, 0);
        let tau = out.lines().find(|l| l.starts_with("tau")).unwrap();
        let v: Vec<f64> = tau.split_whitespace().skip(1).map(|t| t.trim_end_matches('i').parse().unwrap()).collect();
        assert!(v[0].abs() < 1e-9 && (v[1] - 1.0).abs() < 1e-9, "{tau}");
    }

    #[test]
    fn integrate_examples() {
        let (code, out) = run_capture(&["integrate", "--model", "p1", "--word", "0", "--circle", "0,0,0.5"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("+6.283185307179"), "{out}");
        let (code, out) = run_capture(&["integrate", "--curve", "4/0", "--word", "nu", "--loop", "1,0"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn bar_examples() {
        let (code, out) = run_capture(&["bar", "--model", "p1", "--ell", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains(&row("kernel dimension", 31)), "{out}");
        let (_, out) = run_capture(&["bar", "--model", "edagger", "--N", "3", "--ell", "1"]);
        assert!(out.lines().any(|l| l.trim() == "[nu]") && out.lines().any(|l| l.trim() == "[w0]"), "{out}");
        let (code, _) = run_capture(&["bar", "--model", "edagger", "--N", "40", "--ell", "4"]);
        assert_eq!(code, 1);
    }
}
