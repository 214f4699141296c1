//! The `delone` command-line front end.

pub mod render;
pub mod spec;

use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebraic::{classify, AlgebraicInteger};
use crate::cutproject::{check_salem_invariance, generate_model_set, salem_scheme};
use crate::delone::{address_audit, chain, estimate_parameters, finite_type_probe, meyer_probe, MSet, Point};
use crate::dynamics::{
    big_ball_distance, cluster_frequency, qn_eigenvalue_test, topological_eigenvalue_test, QnVerdict, VanHove,
};
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::onedim::{beta_integers, meyer_residual, t_beta_orbit, BetaSystem, ParryVerdict};
use crate::poly::IntPolynomial;
use crate::substitution::{generate_patch, is_legal, validate, MSetSubstitution};
use crate::tiling::{mset_to_tiling, solve_adjoint, Support};

use self::render::{points_csv, render_points, render_tiling};
use self::spec::{point_text, to_elem, SystemSpec};

#[derive(Parser, Debug)]
#[command(name = "delone", version, about = "Delone sets, substitution m-sets, model sets and tilings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// Write the report or dataset here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Region as `a,b` (the cube [a,b]^d) or `lo1,hi1,..,lod,hid`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Raster cell size for 2D tiles (default 1/64).
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Depth for `subst legal` (default 8); steps N for `dyn qn` (default 30).
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Cluster radius for `delone probe` (default 2R).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// `lenient` ignores overlaps in `subst validate`.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Frequency vector: floats for `dyn eigen`, field elements for `dyn qn`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Module-coordinate shift for `dyn metric`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub shift: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Lenient,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the largest real root of a monic irreducible polynomial.
    Classify { poly: String },
    /// β-expansions for β the largest real root of a polynomial or spec field.
    Beta {
        #[command(subcommand)]
        action: BetaCmd,
    },
    /// Substitution m-sets.
    Subst {
        #[command(subcommand)]
        action: SubstCmd,
    },
    /// Cut-and-project model sets.
    Cutproject {
        #[command(subcommand)]
        action: CutCmd,
    },
    /// Dynamical probes.
    Dyn {
        #[command(subcommand)]
        action: DynCmd,
    },
    /// Delone/Meyer probes.
    Delone {
        #[command(subcommand)]
        action: DeloneCmd,
    },
    /// SVG of the spec's dataset.
    Render { spec: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum BetaCmd {
    Orbit { input: String },
    Integers { input: String },
    Residual { input: String },
}

#[derive(Subcommand, Debug)]
pub enum SubstCmd {
    Validate { spec: PathBuf },
    Generate { spec: PathBuf },
    Legal { spec: PathBuf },
    Adjoint { spec: PathBuf },
    Tile { spec: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum CutCmd {
    Generate { spec: PathBuf },
    Salem { input: String },
}

#[derive(Subcommand, Debug)]
pub enum DynCmd {
    Freq { spec: PathBuf },
    Metric { spec: PathBuf },
    Eigen { spec: PathBuf },
    Qn { spec: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum DeloneCmd {
    Probe { spec: PathBuf },
    Chain { spec: PathBuf },
    Audit { spec: PathBuf },
}

/// Ordered `key: value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    lines: Vec<(String, String)>,
    tail: String,
}

impl Report {
    pub fn kv(&mut self, k: &str, v: impl fmt::Display) -> &mut Self {
        self.lines.push((k.to_string(), v.to_string()));
        self
    }

    /// Free text (a CSV table) after the key-value lines.
    pub fn table(&mut self, t: String) {
        self.tail = t;
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k}: {v}")?;
        }
        if !self.tail.is_empty() {
            if !self.lines.is_empty() {
                writeln!(f)?;
            }
            f.write_str(&self.tail)?;
        }
        Ok(())
    }
}

/// Output text and whether the data passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

impl Outcome {
    fn pass(text: impl fmt::Display) -> Self {
        Outcome { text: text.to_string(), ok: true }
    }

    fn check(text: impl fmt::Display, ok: bool) -> Self {
        Outcome { text: text.to_string(), ok }
    }
}

/// Parse arguments, execute, write output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = cli.opts.out.clone();
    match execute(&cli) {
        Ok(o) => {
            if let Err(e) = emit(out.as_deref(), &o.text) {
                eprintln!("error: {e}");
                return 1;
            }
            if o.ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            let usage = !e.is_data_error();
            match (&cli.command, &e) {
                (Command::Classify { .. }, Error::Reducible(_) | Error::InvalidPolynomial(_) | Error::Parse { .. }) => {
                    eprintln!("error: not monic-irreducible over the documented grammar: {e}")
                }
                _ => eprintln!("error: {e}"),
            }
            if usage {
                1
            } else {
                if let Some(p) = out.as_deref() {
                    let _ = emit(Some(p), &format!("error: {e}\n"));
                }
                2
            }
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    match &cli.command {
        Command::Classify { poly } => cmd_classify(poly),
        Command::Beta { action } => match action {
            BetaCmd::Orbit { input } => cmd_beta_orbit(input, o),
            BetaCmd::Integers { input } => cmd_beta_integers(input, o),
            BetaCmd::Residual { input } => cmd_beta_residual(input, o),
        },
        Command::Subst { action } => match action {
            SubstCmd::Validate { spec } => cmd_validate(&load(spec)?, o),
            SubstCmd::Generate { spec } => {
                let s = load(spec)?;
                Ok(Outcome::pass(points_csv(&dataset(&s, o)?.0)))
            }
            SubstCmd::Legal { spec } => cmd_legal(&load(spec)?, o),
            SubstCmd::Adjoint { spec } => cmd_adjoint(&load(spec)?, o),
            SubstCmd::Tile { spec } => cmd_tile(&load(spec)?, o),
        },
        Command::Cutproject { action } => match action {
            CutCmd::Generate { spec } => {
                let s = load(spec)?;
                let scheme = s.build_scheme()?;
                let region = window(&s, o, scheme.d())?;
                let ms = generate_model_set(&scheme, &region)?;
                Ok(Outcome::pass(points_csv(&ms.to_mset(&scheme)?)))
            }
            CutCmd::Salem { input } => cmd_salem(input, o),
        },
        Command::Dyn { action } => match action {
            DynCmd::Freq { spec } => cmd_freq(&load(spec)?, o),
            DynCmd::Metric { spec } => cmd_metric(&load(spec)?, o),
            DynCmd::Eigen { spec } => cmd_eigen(&load(spec)?, o),
            DynCmd::Qn { spec } => cmd_qn(&load(spec)?, o),
        },
        Command::Delone { action } => match action {
            DeloneCmd::Probe { spec } => cmd_probe(&load(spec)?, o),
            DeloneCmd::Chain { spec } => cmd_chain(&load(spec)?, o),
            DeloneCmd::Audit { spec } => cmd_audit(&load(spec)?, o),
        },
        Command::Render { spec } => cmd_render(&load(spec)?, o),
    }
}

fn load(path: &Path) -> Result<SystemSpec> {
    SystemSpec::parse(&std::fs::read_to_string(path)?)
}

/// A spec file if `input` names one, else a polynomial.
fn spec_or_poly(input: &str) -> Result<SystemSpec> {
    if Path::new(input).is_file() {
        return load(Path::new(input));
    }
    Ok(SystemSpec { field: IntPolynomial::parse(input)?, beta: true, ..SystemSpec::default() })
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn param<'a>(s: &'a SystemSpec, key: &str) -> Option<&'a str> {
    s.params.get(key).map(String::as_str)
}

fn num_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| usage(format!("bad number list '{text}'")))
}

fn window_or(s: &SystemSpec, o: &Opts, d: usize, default: (f64, f64)) -> Result<Region> {
    let text = o.window.clone().or_else(|| param(s, "window").map(str::to_string));
    let Some(text) = text else {
        return Region::new(vec![default.0; d], vec![default.1; d]);
    };
    let v = num_list(&text)?;
    let r = if v.len() == 2 {
        Region::new(vec![v[0]; d], vec![v[1]; d])
    } else if v.len() == 2 * d {
        Region::new(v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect())
    } else {
        return Err(usage(format!("window needs 2 or {} numbers", 2 * d)));
    };
    r.map_err(|e| usage(e.to_string()))
}

fn window(s: &SystemSpec, o: &Opts, d: usize) -> Result<Region> {
    window_or(s, o, d, (-20.0, 20.0))
}

fn kmax(s: &SystemSpec, o: &Opts, default: usize) -> Result<usize> {
    match (o.kmax, param(s, "kmax")) {
        (Some(k), _) => Ok(k),
        (None, Some(t)) => t.parse().map_err(|_| usage(format!("bad kmax '{t}'"))),
        (None, None) => Ok(default),
    }
}

fn float_opt(s: &SystemSpec, flag: Option<f64>, key: &str, default: f64) -> Result<f64> {
    match (flag, param(s, key)) {
        (Some(v), _) => Ok(v),
        (None, Some(t)) => t.parse().map_err(|_| usage(format!("bad {key} '{t}'"))),
        (None, None) => Ok(default),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(" ")
}

fn beta_system(s: &SystemSpec) -> Result<BetaSystem> {
    BetaSystem::new(AlgebraicInteger::largest_real(s.field.clone())?)
}

/// The point set a spec describes, restricted to the window, with its substitution if any.
fn dataset(s: &SystemSpec, o: &Opts) -> Result<(MSet, Option<MSetSubstitution>, Region)> {
    let region = window(s, o, s.dimension())?;
    let (x, phi) = s.point_set(&region)?;
    Ok((x, phi, region))
}

fn cmd_classify(poly: &str) -> Result<Outcome> {
    let p = IntPolynomial::parse(poly)?;
    if !p.is_monic() {
        return Err(Error::InvalidPolynomial(format!("{poly} is not monic")));
    }
    let a = AlgebraicInteger::largest_real(p)?;
    let c = classify(&a)?;
    let d = a.degree();
    let line = if c.conjugate_moduli.is_empty() {
        format!("{}, degree {d}, no conjugates", c.class)
    } else {
        let m = c.conjugate_moduli.iter().copied().fold(0.0, f64::max);
        format!("{}, degree {d}, conjugate modulus ≈ {m:.4}", c.class)
    };
    Ok(Outcome::pass(format!("{line}\n")))
}

fn cmd_beta_orbit(input: &str, o: &Opts) -> Result<Outcome> {
    let s = spec_or_poly(input)?;
    let sys = beta_system(&s)?;
    let rep = t_beta_orbit(&sys, kmax(&s, o, 60)?)?;
    let mut r = Report::default();
    r.kv("beta", format!("{:.12}", sys.beta_f64()));
    let vals: Vec<String> = rep.values.iter().map(coords).collect();
    r.kv("orbit", vals.join(" "));
    r.kv("digits", rep.digits.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
    r.kv(
        "verdict",
        match rep.verdict {
            ParryVerdict::Finite { preperiod, period } => format!("parry preperiod={preperiod} period={period}"),
            ParryVerdict::NotDecided => "not decided".into(),
        },
    );
    r.kv("ties", rep.ties);
    Ok(Outcome::pass(r))
}

fn coords(v: &crate::field::Elem) -> String {
    let parts: Vec<String> = v
        .coords()
        .iter()
        .map(|c| if c.denom() == &1.into() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) })
        .collect();
    format!("({})", parts.join(","))
}

fn cmd_beta_integers(input: &str, o: &Opts) -> Result<Outcome> {
    let s = spec_or_poly(input)?;
    let mut sys = beta_system(&s)?;
    let region = window(&s, o, 1)?;
    let bound = region.lo[0].abs().max(region.hi[0].abs());
    let x = beta_integers(&mut sys, bound)?.restrict(&region);
    Ok(Outcome::pass(points_csv(&x)))
}

fn cmd_beta_residual(input: &str, o: &Opts) -> Result<Outcome> {
    let s = spec_or_poly(input)?;
    let mut sys = beta_system(&s)?;
    let region = window_or(&s, o, 1, (0.0, 1000.0))?;
    let rep = meyer_residual(&mut sys, region.hi[0])?;
    let mut r = Report::default();
    r.kv("beta", format!("{:.12}", sys.beta_f64()));
    r.kv("points", rep.points);
    r.kv("rho", format!("{:.9}", rep.rho));
    r.kv("predicted", if rep.predicted.is_finite() { format!("{:.9}", rep.predicted) } else { "inf".into() });
    let mut t = String::from("lo,hi,sup\n");
    for ((a, b), s) in rep.windows.iter().zip(&rep.sups) {
        let _ = writeln!(t, "{a},{b},{s:.9}");
    }
    r.table(t);
    Ok(Outcome::pass(r))
}

fn cmd_validate(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let phi = s.build_substitution()?;
    let region = window(s, o, phi.frame().dim())?;
    let seed = match s.build_cluster(phi.frame(), phi.colors())? {
        Some(c) => c,
        None => phi.single(0, vec![0; phi.frame().rank()]),
    };
    let rep = validate(&phi, &seed, &region)?;
    let mut r = Report::default();
    r.kv("expanding", rep.expanding);
    r.kv("substitution_matrix", format!("{:?}", rep.substitution_matrix));
    r.kv("primitive", rep.spectral.primitive);
    r.kv("pf_eigenvalue", format!("{:.12}", rep.spectral.pf_eigenvalue));
    r.kv("abs_det_q", format!("{:.12}", rep.det_q.abs()));
    r.kv("pf_gap", format!("{:.3e}", rep.pf_gap));
    r.kv("pf_matches", rep.pf_matches());
    r.kv("disjoint", rep.disjoint());
    for w in rep.overlaps.iter().take(5) {
        r.kv("overlap", w);
    }
    // Lenient mode reports overlaps without failing on them.
    let ok = match o.mode.unwrap_or(Mode::Strict) {
        Mode::Strict => rep.ok(),
        Mode::Lenient => rep.expanding && rep.spectral.primitive && rep.pf_matches(),
    };
    r.kv("verdict", if ok { "ok" } else { "failed" });
    Ok(Outcome::check(r, ok))
}

fn cmd_legal(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let phi = s.build_substitution()?;
    let p = s.build_cluster(phi.frame(), phi.colors())?.ok_or_else(|| usage("subst legal needs a cluster block"))?;
    let k = kmax(s, o, 8)?;
    let mut r = Report::default();
    match is_legal(&phi, &p, k)? {
        Some(w) => {
            r.kv("legal", "yes").kv("color", w.color).kv("k", w.k).kv("translation", point_text(&w.translation));
        }
        None => {
            r.kv("legal", format!("not found up to k={k}"));
        }
    }
    Ok(Outcome::pass(r))
}

fn cmd_adjoint(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let phi = s.build_substitution()?;
    let eps = float_opt(s, o.eps, "eps", 1.0 / 64.0)?;
    let sol = solve_adjoint(&phi, eps)?;
    let mut r = Report::default();
    r.kv("exact", sol.exact);
    r.kv("steps", sol.steps.len());
    for t in &sol.tiles {
        let shape = match &t.support {
            Support::Intervals { approx, .. } => {
                approx.iter().map(|(a, b)| format!("[{a:.9},{b:.9}]")).collect::<Vec<_>>().join(" ")
            }
            Support::Raster(ra) => format!("raster inner={} outer={}", ra.inner.len(), ra.outer.len()),
        };
        r.kv(&format!("tile{}", t.index), shape);
        r.kv(&format!("volume{}", t.index), format!("{:.9} +- {:.3e}", t.volume, t.volume_err));
    }
    let empty = sol.any_empty_interior();
    r.kv("empty_interior", empty);
    Ok(Outcome::check(r, !empty))
}

fn cmd_tile(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let phi = s.build_substitution()?;
    let eps = float_opt(s, o.eps, "eps", 1.0 / 64.0)?;
    let sol = solve_adjoint(&phi, eps)?;
    let region = window(s, o, phi.frame().dim())?;
    let reach = sol.tiles.iter().map(|t| t.reach()).fold(0.0, f64::max);
    let g = s.generating_seed(&phi)?;
    let x = generate_patch(&phi, &g, &region.shrunk(-(reach + 1.0)))?;
    let (patch, cov) = mset_to_tiling(&x, &sol, &region)?;
    let mut r = Report::default();
    r.kv("placements", patch.placements.len());
    r.kv("exact", cov.exact);
    r.kv("uncovered", format!("{:.3e}", cov.uncovered));
    r.kv("overlap", format!("{:.3e}", cov.overlap));
    r.kv("tolerance", format!("{:.3e}", cov.tolerance));
    r.kv("consistent", cov.consistent);
    Ok(Outcome::check(r, cov.consistent))
}

fn cmd_salem(input: &str, o: &Opts) -> Result<Outcome> {
    let s = spec_or_poly(input)?;
    let radius = s.salem.unwrap_or(1.0);
    let scheme = salem_scheme(&s.field, radius)?;
    let region = window_or(&s, o, 1, (0.0, 20.0))?;
    let ms = generate_model_set(&scheme, &region)?;
    let mut r = Report::default();
    r.kv("points", ms.points.len());
    r.kv("boundary_hits", ms.boundary_hits);
    let (ok, checked) = match check_salem_invariance(&scheme, &ms, &region) {
        Ok(n) => (true, n.to_string()),
        Err(Error::NotInvariant(m)) => (false, m),
        Err(e) => return Err(e),
    };
    r.kv("beta_invariance_checked", checked);
    r.kv("invariant", ok);
    r.table(points_csv(&ms.to_mset(&scheme)?));
    Ok(Outcome::check(r, ok))
}

fn cmd_freq(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, _, region) = dataset(s, o)?;
    let half = region.widths().iter().copied().fold(f64::INFINITY, f64::min) / 2.0;
    let c = region.center();
    let samples: Vec<Vec<f64>> = (-2..=2)
        .map(|k| {
            let mut v = c.clone();
            v[0] += k as f64 * half / 10.0;
            v
        })
        .collect();
    let ns = [half / 8.0, half / 4.0, half * 0.7];
    let p = match s.build_cluster(x.frame(), x.colors())? {
        Some(p) => p,
        None => {
            let mut colors = vec![Vec::new(); x.colors()];
            let first = x.color(0).first().cloned().ok_or_else(|| Error::TooFewPoints("color 0 is empty".into()))?;
            colors[0].push(first);
            MSet::new(x.frame().clone(), colors)?
        }
    };
    let rep = cluster_frequency(&x, &p, VanHove::Cubes, &samples, &ns)?;
    let mut r = Report::default();
    r.kv("limit", format!("{:.9}", rep.limit));
    r.kv("spread_decreasing", rep.spread_decreasing);
    r.table(rep.to_csv());
    Ok(Outcome::pass(r))
}

fn parse_lift(text: &str, s: usize) -> Result<Point> {
    let v: Option<Vec<i64>> = text.split(',').map(|t| t.trim().parse().ok()).collect();
    match v {
        Some(v) if v.len() == s => Ok(v),
        _ => Err(usage(format!("expected {s} comma-separated integers, got '{text}'"))),
    }
}

fn cmd_metric(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, _, _) = dataset(s, o)?;
    let rank = x.frame().rank();
    let shift = match &o.shift {
        Some(t) => parse_lift(t, rank)?,
        None => (0..rank).map(|i| i64::from(i == 0)).collect(),
    };
    let y = x.translate(&shift);
    let rep = big_ball_distance(&x, &y)?;
    let mut r = Report::default();
    r.kv("shift", point_text(&shift));
    r.kv("distance", format!("{:.9}", rep.distance));
    r.kv("x", fmt_vec(&rep.x));
    r.kv("y", fmt_vec(&rep.y));
    r.kv("resolution", format!("{:.9}", rep.resolution));
    Ok(Outcome::pass(r))
}

fn cmd_eigen(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, _, region) = dataset(s, o)?;
    let d = x.frame().dim();
    let alpha = num_list(o.alpha.as_deref().or(param(s, "alpha")).unwrap_or("1"))?;
    if alpha.len() != d {
        return Err(usage(format!("alpha needs {d} entries")));
    }
    let deltas = [0.2, 0.1, 0.05, 0.02, 0.01];
    let half = region.widths().iter().copied().fold(f64::INFINITY, f64::min) / 2.0;
    let search = half - 100.0 - 1.0;
    if search <= 0.0 {
        return Err(Error::WindowTooSmall("eigen needs a window wider than 202".into()));
    }
    let c = region.center();
    let w = Region::new(c.iter().map(|v| v - search).collect(), c.iter().map(|v| v + search).collect())?;
    let rep = topological_eigenvalue_test(&x, &alpha, &deltas, &w)?;
    let mut r = Report::default();
    r.kv("alpha", fmt_vec(&alpha));
    r.kv("verdict", rep.verdict);
    r.table(rep.to_csv());
    Ok(Outcome::pass(r))
}

fn cmd_qn(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, phi, _) = dataset(s, o)?;
    let phi = phi.ok_or_else(|| usage("dyn qn needs a substitution block"))?;
    let f = phi.frame().field().clone();
    let text = o.alpha.clone().or_else(|| param(s, "alpha").map(str::to_string)).unwrap_or_else(|| "1".into());
    let wrapped = format!("field {}\nframe\n  {}\nend\n", spec::poly_text(&s.field), text.replace(';', " "));
    let parsed = SystemSpec::parse(&wrapped)?;
    let alpha = parsed.frame.expect("frame block")[0].iter().map(|c| to_elem(&f, c)).collect::<Result<Vec<_>>>()?;
    let n = kmax(s, o, 30)?;
    let rep = qn_eigenvalue_test(&x, phi.expansion(), &alpha, n, 20)?;
    let mut r = Report::default();
    r.kv("alpha", text);
    r.kv("n", n);
    match &rep.verdict {
        QnVerdict::Passed => r.kv("verdict", "necessary-condition-passed"),
        QnVerdict::Failed { witness } => r.kv("verdict", "failed").kv("witness", point_text(witness)),
    };
    r.table(rep.to_csv());
    Ok(Outcome::pass(r))
}

fn with_params(x: MSet, region: &Region) -> Result<MSet> {
    let (r, big_r) = estimate_parameters(&x, region)?;
    Ok(x.with_params(r, big_r))
}

fn cmd_probe(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, _, region) = dataset(s, o)?;
    let x = with_params(x, &region)?;
    let (rr, big_r) = x.params().expect("set above");
    let t = float_opt(s, o.tol, "radius", 2.0 * big_r)?;
    let mut r = Report::default();
    r.kv("points", x.len());
    r.kv("r", format!("{rr:.9}"));
    r.kv("R", format!("{big_r:.9}"));
    let ft = finite_type_probe(&x, t, &region)?;
    r.kv("finite_type_census", format!("{:?}", ft.census));
    r.kv("finite_type", ft.verdict);
    let m = meyer_probe(&x, &region)?;
    r.kv("meyer_f_sizes", format!("{:?}", m.f_sizes));
    r.kv("meyer", m.verdict);
    let ok = ft.verdict.ok() && m.verdict.ok();
    Ok(Outcome::check(r, ok))
}

fn cmd_chain(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, _, region) = dataset(s, o)?;
    let x = with_params(x, &region)?;
    let (pts, pos) = x.support_with_positions();
    let near = |q: &[f64]| {
        pts.iter()
            .zip(&pos)
            .min_by(|a, b| crate::geometry::dist(a.1, q).total_cmp(&crate::geometry::dist(b.1, q)))
            .map(|(p, _)| p.clone())
    };
    let a = near(&region.lo).ok_or_else(|| Error::TooFewPoints("empty set".into()))?;
    let b = near(&region.hi).ok_or_else(|| Error::TooFewPoints("empty set".into()))?;
    let c = chain(&x, &a, &b)?;
    let mut r = Report::default();
    r.kv("from", point_text(&a)).kv("to", point_text(&b));
    r.kv("length", c.points.len());
    r.kv("max_step", format!("{:.9}", c.max_step));
    r.kv("step_bound", format!("{:.9}", c.step_bound));
    r.kv("length_bound", format!("{:.9}", c.length_bound));
    r.kv("within_bounds", c.within_bounds());
    Ok(Outcome::check(r, c.within_bounds()))
}

fn cmd_audit(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, _, region) = dataset(s, o)?;
    let rep = address_audit(&x, &region)?;
    let mut r = Report::default();
    r.kv("lipschitz", format!("{:.9}", rep.lipschitz));
    for (i, row) in rep.linear.iter().enumerate() {
        r.kv(&format!("linear{i}"), fmt_vec(row));
    }
    r.kv("residual_sups", fmt_vec(&rep.residual_sups));
    r.kv("bounded", rep.bounded);
    Ok(Outcome::check(r, rep.bounded))
}

fn cmd_render(s: &SystemSpec, o: &Opts) -> Result<Outcome> {
    let (x, phi, region) = dataset(s, o)?;
    if let Some(phi) = phi {
        let eps = float_opt(s, o.eps, "eps", 1.0 / 64.0)?;
        let sol = solve_adjoint(&phi, eps)?;
        let (patch, _) = mset_to_tiling(&x, &sol, &region)?;
        return Ok(Outcome::pass(render_tiling(&patch, &sol)?));
    }
    Ok(Outcome::pass(render_points(&x)?))
}
