//! Command-line front end.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bifurcation::{
    compute_band_values, extrapolate, period_transitions, sweep, OrbitParams, SearchOptions, SearchSlice,
    SeedPolicy, SweepDataset,
};
use crate::error::{Error, Result};
use crate::family::{classify_interval, family_at, general_at, linspace, load_family, preset, region_profile, CanonicalFamily};
use crate::forms::{
    to_canonical, to_linear_factors_anchored, verify_conjugacy, AnchorPolicy, CanonicalMap, ConjugacyTransform,
    GeneralMap, LinearFactorsMap,
};
use crate::poly::Polynomial;
use crate::roots::RootOptions;
use crate::stability::{
    classify_fixed_point, singer_bound, BandTable, StabilityKind, DEFAULT_HYPERBOLICITY_TOL,
};

#[derive(Debug, Parser)]
#[command(name = "polymap", version, about = "Stability and bifurcation analysis of polynomial maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forms, fixed points and their stability for one map.
    Analyze(AnalyzeArgs),
    /// Bifurcation diagram of a family: CSV, sidecar JSON and optional SVG.
    Diagram(DiagramArgs),
    /// Band table of bifurcation values.
    Bands(BandsArgs),
    /// Regular/reversal classification of a family over a parameter interval.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Named family: logistic, harvest, bmap, ccm_exp, quartic_demo, cqm_quadratic,
    /// cqm_linear, cqm_slice, ccm_linear, ccm_slice.
    #[arg(long, conflicts_with = "family")]
    pub preset: Option<String>,
    /// Family specification file (JSON).
    #[arg(long, value_name = "PATH")]
    pub family: Option<PathBuf>,
    /// Carrying capacity for the harvest preset.
    #[arg(long)]
    pub r: Option<f64>,
    /// Expression b(lambda) for the bmap preset.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

impl FamilyArgs {
    fn given(&self) -> bool {
        self.preset.is_some() || self.family.is_some()
    }

    fn load(&self) -> Result<CanonicalFamily> {
        match (&self.preset, &self.family) {
            (Some(name), _) => {
                let r = self.r.map(|r| format!("{r:?}"));
                let arg = match name.as_str() {
                    "harvest" => r.as_deref(),
                    "bmap" => self.b.as_deref(),
                    _ => None,
                };
                preset(name, arg)
            }
            (None, Some(path)) => load_family(path),
            (None, None) => Err(Error::Invalid("one of --preset or --family is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Suppress timestamps so repeated runs are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub fam: FamilyArgs,
    /// Parameter value for a family.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Coefficients of f(y), ascending powers, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["preset", "family"])]
    pub coeffs: Option<Vec<f64>>,
    /// Expected degree; checked against the input.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Fixed point sent to the origin: smallest, index:<i> or nearest:<v>.
    #[arg(long, default_value = "smallest")]
    pub anchor: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Seeds: default, branch:<k> or a comma separated list of values.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    pub seeds: String,
    /// Iterates discarded before recording.
    #[arg(long, default_value_t = 4096)]
    pub transient: usize,
    /// Iterates recorded per seed.
    #[arg(long, default_value_t = 512)]
    pub keep: usize,
    /// Escape radius for divergence.
    #[arg(long, default_value_t = 1e6)]
    pub escape: f64,
}

impl OrbitArgs {
    fn params(&self) -> Result<OrbitParams> {
        let p = OrbitParams {
            n_transient: self.transient,
            n_keep: self.keep,
            escape_radius: self.escape,
            p_max: OrbitParams::default().p_max.min(self.keep / 2).max(1),
            ..OrbitParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    fn seed_policy(&self) -> Result<SeedPolicy> {
        parse_seeds(&self.seeds)
    }
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[command(flatten)]
    pub fam: FamilyArgs,
    /// Parameter grid lo:hi:n (defaults to the family domain with 400 points).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Also write a scatter SVG.
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[arg(long)]
    pub degree: usize,
    /// Compute b_1..b_K by bisection instead of printing the built-in table.
    #[arg(long, value_name = "K")]
    pub compute: Option<usize>,
    /// Search slice for degree >= 4 (with --preset/--family).
    #[command(flatten)]
    pub fam: FamilyArgs,
    /// Fixed point whose PDF is tracked on a caller slice.
    #[arg(long, default_value_t = 0)]
    pub point: usize,
    /// Seeds on a caller slice: default, branch:<k> or a list.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    pub seeds: String,
    /// Bisection half-width target in PDF units.
    #[arg(long, default_value_t = 1e-6)]
    pub bisect_tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub fam: FamilyArgs,
    /// Parameter grid lo:hi:n (defaults to the family domain with 400 points).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Fixed point index whose region type is profiled.
    #[arg(long, default_value_t = 1)]
    pub point: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Invalid(format!("grid must be lo:hi:n, got '{text}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) || n == 0 || (n > 1 && !(lo < hi)) {
        return Err(bad());
    }
    Ok(linspace(lo, hi, n))
}

pub fn parse_seeds(text: &str) -> Result<SeedPolicy> {
    let t = text.trim();
    if t == "default" {
        return Ok(SeedPolicy::Default);
    }
    if let Some(k) = t.strip_prefix("branch:") {
        let k = k.parse().map_err(|_| Error::Invalid(format!("bad branch index in '{t}'")))?;
        return Ok(SeedPolicy::Branch(k));
    }
    let v = t
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad seed '{s}'"))))
        .collect::<Result<Vec<_>>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("seeds must be finite".into()));
    }
    Ok(SeedPolicy::Explicit(v))
}

pub fn parse_anchor(text: &str) -> Result<AnchorPolicy> {
    let t = text.trim();
    if t == "smallest" {
        return Ok(AnchorPolicy::Smallest);
    }
    let bad = || Error::Invalid(format!("anchor must be smallest, index:<i> or nearest:<v>, got '{t}'"));
    if let Some(i) = t.strip_prefix("index:") {
        return i.parse().map(AnchorPolicy::Index).map_err(|_| bad());
    }
    if let Some(v) = t.strip_prefix("nearest:") {
        return v.parse().map(AnchorPolicy::Nearest).map_err(|_| bad());
    }
    Err(bad())
}

fn family_grid(fam: &CanonicalFamily, grid: &Option<String>) -> Result<Vec<f64>> {
    match grid {
        Some(g) => parse_grid(g),
        None => Ok(linspace(fam.domain.0, fam.domain.1, 400)),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[derive(Debug, Serialize)]
struct FixedPointReport {
    index: usize,
    /// Canonical coordinate.
    x: f64,
    /// Original coordinate.
    y: f64,
    multiplier: f64,
    pdf: f64,
    kind: StabilityKind,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    degree: usize,
    general: Vec<f64>,
    linear_factors: LinearFactorsMap,
    canonical: CanonicalReport,
    transform: ConjugacyTransform,
    fixed_points: Vec<FixedPointReport>,
    singer_bound: Option<usize>,
    conjugacy_max_error: f64,
}

#[derive(Debug, Serialize)]
struct CanonicalReport {
    s: i8,
    fixed_points: Vec<f64>,
    polynomial: Vec<f64>,
}

fn analyze_report(lff: &LinearFactorsMap, c: &CanonicalMap, t: &ConjugacyTransform, lambda: Option<f64>) -> Result<AnalyzeReport> {
    let fixed_points = (0..c.degree())
        .map(|k| {
            let cl = classify_fixed_point(c, k, DEFAULT_HYPERBOLICITY_TOL)?;
            let x = c.fixed_point(k)?;
            Ok(FixedPointReport {
                index: k,
                x,
                y: t.apply(x),
                multiplier: cl.multiplier,
                pdf: cl.pdf_value.unwrap_or(cl.multiplier - 1.0),
                kind: cl.kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyzeReport {
        lambda,
        degree: c.degree(),
        general: lff.to_general().polynomial().coeffs().to_vec(),
        linear_factors: lff.clone(),
        canonical: CanonicalReport {
            s: c.sign().into(),
            fixed_points: c.fixed_points(),
            polynomial: c.polynomial().coeffs().to_vec(),
        },
        transform: *t,
        fixed_points,
        singer_bound: singer_bound(c),
        conjugacy_max_error: verify_conjugacy(lff, c, t, 1000).max_error,
    })
}

fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    let report = if let Some(coeffs) = &a.coeffs {
        let f = Polynomial::new(coeffs.clone());
        let g = GeneralMap::from_coefficients(&f)?;
        if let Some(d) = a.degree {
            if d != g.degree() {
                return Err(Error::Invalid(format!("--degree {d} but the coefficients have degree {}", g.degree())));
            }
        }
        let lff = to_linear_factors_anchored(&g, RootOptions::default(), parse_anchor(&a.anchor)?)?;
        let (c, t) = to_canonical(&lff, lff.anchor)?;
        analyze_report(&lff, &c, &t, None)?
    } else if a.fam.given() {
        let fam = a.fam.load()?;
        if let Some(d) = a.degree {
            if d != fam.degree {
                return Err(Error::Invalid(format!("--degree {d} but the family has degree {}", fam.degree)));
            }
        }
        let lambda = a.lambda.ok_or_else(|| Error::Invalid("--lambda is required with a family".into()))?;
        let c = family_at(&fam, lambda)?;
        match general_at(&fam, lambda)? {
            Some(lff) => {
                let (c, t) = to_canonical(&lff, lff.anchor)?;
                analyze_report(&lff, &c, &t, Some(lambda))?
            }
            None => analyze_report(&c.as_linear_factors(), &c, &ConjugacyTransform::IDENTITY, Some(lambda))?,
        }
    } else {
        return Err(Error::Invalid("give --coeffs, --preset or --family".into()));
    };
    let json = serde_json::to_string_pretty(&report)?;
    emit(&a.out, "analyze.json", &json, stdout)
}

fn emit(out: &OutArgs, name: &str, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.out {
        Some(dir) => {
            let p = write_file(dir, name, text)?;
            writeln!(stdout, "wrote {}", p.display())?;
        }
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

pub const SVG_WIDTH: u32 = 1200;
pub const SVG_HEIGHT: u32 = 800;

/// Scatter of all orbit points, one 1px rect per occupied pixel.
pub fn render_svg(ds: &SweepDataset, deterministic: bool) -> String {
    const MARGIN: f64 = 40.0;
    let pts = || ds.points.iter().flat_map(|p| p.points.iter().flatten().map(move |&x| (p.lambda, x)));
    let (mut lmin, mut lmax, mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (l, x) in pts() {
        lmin = lmin.min(l);
        lmax = lmax.max(l);
        xmin = xmin.min(x);
        xmax = xmax.max(x);
    }
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">\n"
    ));
    if !deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        s.push_str(&format!("<!-- generated at unix time {now} -->\n"));
    }
    s.push_str(&format!("<rect width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" fill=\"white\"/>\n"));
    if lmin.is_finite() {
        let w = SVG_WIDTH as f64 - 2.0 * MARGIN;
        let h = SVG_HEIGHT as f64 - 2.0 * MARGIN;
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let pixels: BTreeSet<(u32, u32)> = pts()
            .map(|(l, x)| {
                let px = MARGIN + w * (l - lmin) / span(lmin, lmax);
                let py = MARGIN + h * (1.0 - (x - xmin) / span(xmin, xmax));
                (px.round() as u32, py.round() as u32)
            })
            .collect();
        s.push_str("<g fill=\"black\">\n");
        for (x, y) in pixels {
            s.push_str(&format!("<rect x=\"{x}\" y=\"{y}\" width=\"1\" height=\"1\"/>\n"));
        }
        s.push_str("</g>\n");
        s.push_str(&format!(
            "<text x=\"{MARGIN}\" y=\"{}\" font-size=\"12\">lambda {lmin} .. {lmax}; x {xmin:.6} .. {xmax:.6}</text>\n",
            SVG_HEIGHT as f64 - 12.0
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn cmd_diagram(a: &DiagramArgs, stdout: &mut dyn Write) -> Result<()> {
    let fam = a.fam.load()?;
    let grid = family_grid(&fam, &a.grid)?;
    let params = a.orbit.params()?;
    let policy = a.orbit.seed_policy()?;
    let ds = sweep(&fam, &grid, &policy, &params)?;
    let dir = a.out.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let csv = write_file(&dir, "diagram.csv", &ds.to_csv())?;
    let json = write_file(&dir, "diagram.json", &ds.sidecar_json())?;
    writeln!(stdout, "wrote {}", csv.display())?;
    writeln!(stdout, "wrote {}", json.display())?;
    if a.svg {
        let svg = write_file(&dir, "diagram.svg", &render_svg(&ds, a.out.deterministic))?;
        writeln!(stdout, "wrote {}", svg.display())?;
    }
    for t in period_transitions(&ds) {
        writeln!(stdout, "period {} -> {} near lambda = {:.6}", t.from, t.to, t.lambda)?;
    }
    let poisoned = ds.points.iter().filter(|p| p.poison.is_some()).count();
    if poisoned > 0 {
        writeln!(stdout, "{poisoned} grid point(s) poisoned; see diagram.json")?;
    }
    Ok(())
}

fn cmd_bands(a: &BandsArgs, stdout: &mut dyn Write) -> Result<()> {
    if a.degree < 2 {
        return Err(Error::Invalid(format!("degree must be at least 2, got {}", a.degree)));
    }
    let letter = if a.degree == 3 { 'c' } else { 'b' };
    let Some(k_max) = a.compute else {
        let table = BandTable::builtin(a.degree)?;
        let mut text = String::new();
        for t in &table.thresholds {
            match &t.exact {
                Some(e) => text.push_str(&format!("{letter}_{} = {} (exact: {e})\n", t.k, t.value)),
                None => text.push_str(&format!("{letter}_{} = {} +/- {:e}\n", t.k, t.value, t.uncertainty)),
            }
        }
        text.push_str(&format!("{letter}_inf = {} +/- {:e}\n", table.b_inf.value, table.b_inf.uncertainty));
        write!(stdout, "{text}")?;
        if let Some(dir) = &a.out.out {
            let p = write_file(dir, "bands.json", &table.to_json())?;
            writeln!(stdout, "wrote {}", p.display())?;
        }
        return Ok(());
    };
    if k_max == 0 {
        return Err(Error::Invalid("--compute needs K >= 1".into()));
    }
    let slice = if a.fam.given() {
        let family = a.fam.load()?;
        if family.degree != a.degree {
            return Err(Error::Invalid(format!("slice has degree {}, --degree is {}", family.degree, a.degree)));
        }
        SearchSlice { family, point: a.point, seeds: parse_seeds(&a.seeds)? }
    } else {
        SearchSlice::canonical(a.degree)?
    };
    let opts = SearchOptions { bisect_tol: a.bisect_tol, ..SearchOptions::default() };
    let values = compute_band_values(&slice, k_max, &opts)?;
    let mut all = values.clone();
    let mut text = String::new();
    for e in &values {
        text.push_str(&format!("{letter}_{} = {:.9} +/- {:.1e} ({:?})\n", e.k, e.value, e.half_width, e.method));
    }
    if values.len() >= 3 {
        let inf = extrapolate(&values)?;
        text.push_str(&format!("{letter}_inf ~ {:.9} +/- {:.1e}\n", inf.value, inf.half_width));
        all.push(inf);
    }
    write!(stdout, "{text}")?;
    if let Some(dir) = &a.out.out {
        let p = write_file(dir, "bands.json", &serde_json::to_string_pretty(&all)?)?;
        writeln!(stdout, "wrote {}", p.display())?;
    }
    Ok(())
}

fn cmd_classify(a: &ClassifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let fam = a.fam.load()?;
    let grid = family_grid(&fam, &a.grid)?;
    let table = BandTable::builtin(fam.degree)?;
    let profile = region_profile(&fam, a.point, &grid, table)?;
    let class = classify_interval(&profile);
    writeln!(stdout, "{class}")?;
    if !profile.poisoned.is_empty() {
        writeln!(stdout, "{} grid point(s) poisoned and skipped", profile.poisoned.len())?;
    }
    match &a.out.out {
        Some(dir) => {
            let p = write_file(dir, "profile.csv", &profile.to_csv())?;
            writeln!(stdout, "wrote {}", p.display())?;
        }
        None => write!(stdout, "{}", profile.to_csv())?,
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Diagram(a) => cmd_diagram(a, stdout),
        Command::Bands(a) => cmd_bands(a, stdout),
        Command::Classify(a) => cmd_classify(a, stdout),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
