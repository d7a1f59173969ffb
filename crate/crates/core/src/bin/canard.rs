use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use canard_core::asymptotics::{
    brusselator_a_series, brusselator_constant_probe, fit_bn, gevrey_ratio, sum_smallest_term, FitModel,
};
use canard_core::complex_ode::{integrate_along_path, FieldKind, IntegratorConfig, OdeField};
use canard_core::exact_algebra::{DensePolynomial, ExactRational, PoleRationalFunction, TruncatedSeries};
use canard_core::formal_canard::{brusselator_normal_form, canard_formal, vdp_bn, vdp_normal_form, vdp_series};
use canard_core::inner_stokes::{brusselator_stokes_diff, vdp_stokes_diff, StokesDiff};
use canard_core::relief::{
    contours_to_svg, descent_check, level_curves, relief_value, steepest_descent_path, BBox, ComplexPath, DescentStop,
    ReliefSpec,
};
use canard_core::report::{render_markdown, run_report, TARGETS};
use canard_core::shooter::{
    brusselator_stokes_observable, find_brusselator_a, find_vdp_alpha, vdp_stokes_observable, ShootConfig, ShootResult,
};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use rug::{Float, Integer};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "canard", version, about = "Canard solutions: formal series, complex shooting and Stokes constants")]
struct Cli {
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact formal series.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Relief landscape: contours, descent paths, path certificates.
    #[command(subcommand)]
    Relief(ReliefCmd),
    /// Integrate a field along a complex path.
    #[command(subcommand)]
    Ode(OdeCmd),
    /// Canard values by two-sided shooting.
    #[command(subcommand)]
    Shoot(ShootCmd),
    /// Inner-equation Stokes differences.
    #[command(subcommand)]
    Inner(InnerCmd),
    /// Asymptotic analysis of the coefficient sequences.
    #[command(subcommand)]
    Asymp(AsympCmd),
    /// Recompute published quantities and tabulate them.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum SeriesCmd {
    /// Van der Pol coefficients a_n and functions v_n.
    Vdp(SeriesVdpArgs),
    /// Scaled coefficients b_n = a_n (4e/(3n))^n.
    Bn(SeriesBnArgs),
    /// Formal canard of a shipped normal form.
    Canard(SeriesCanardArgs),
}

#[derive(Args)]
struct SeriesVdpArgs {
    #[arg(long)]
    n: usize,
    /// Format, output file and field selectors (a, v), comma separated.
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Args)]
struct SeriesBnArgs {
    /// n range as lo:hi (inclusive).
    #[arg(long, value_parser = parse_range, default_value = "135:155")]
    range: (usize, usize),
    /// Decimal places (default from CANARD_PRECISION, else 12).
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, default_value = "csv")]
    emit: String,
}

#[derive(Args)]
struct SeriesCanardArgs {
    /// brusselator or vdp
    #[arg(long, default_value = "brusselator")]
    system: String,
    #[arg(long, default_value_t = 4)]
    eps_order: usize,
    #[arg(long, default_value_t = 12)]
    x_order: usize,
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Args)]
struct SpecArgs {
    /// vdp, brusselator or quadratic
    #[arg(long, default_value = "vdp")]
    spec: String,
    /// Rotation angle θ of the relief.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
}

#[derive(Subcommand)]
enum ReliefCmd {
    /// Level curves of the relief as SVG paths or CSV points.
    Contour(ContourArgs),
    /// Steepest-descent path from a point.
    Descend(DescendArgs),
    /// Descent certificate of a polyline.
    Check(CheckArgs),
}

#[derive(Args)]
struct ContourArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Levels, comma separated; fractions such as 4/3 are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_level, allow_hyphen_values = true, default_value = "0")]
    levels: Vec<f64>,
    /// re_min:re_max:im_min:im_max
    #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true, default_value = "-3:3:-3:3")]
    bbox: (f64, f64, f64, f64),
    #[arg(long, default_value_t = 400)]
    res: usize,
    /// SVG width in pixels.
    #[arg(long, default_value_t = 600.0)]
    width: f64,
    #[arg(long, default_value = "svg")]
    emit: String,
}

#[derive(Args)]
struct DescendArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    from: Complex64,
    /// Stop within --radius of this point.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    target: Option<Complex64>,
    #[arg(long, default_value_t = 1e-3)]
    radius: f64,
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    #[arg(long, default_value_t = 50.0)]
    max_arclength: f64,
    #[arg(long, default_value = "csv")]
    emit: String,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Path vertices as complex literals, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, required = true)]
    path: Vec<Complex64>,
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Subcommand)]
enum OdeCmd {
    /// Integrate from y0 along a polyline.
    Run(OdeRunArgs),
}

#[derive(Args)]
struct OdeRunArgs {
    /// vdp-outer, vdp-inner, vdp-inner-eps, brusselator-outer, brusselator-inner, linear-test, user-polynomial
    #[arg(long)]
    field: String,
    #[arg(long, default_value = "0.1", value_parser = parse_complex, allow_hyphen_values = true)]
    eps: Complex64,
    /// Parameter: α, a or λ depending on the field.
    #[arg(long, default_value = "1", value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Complex64,
    /// Polynomial term i:j:c adding c x^i y^j (user-polynomial), repeatable.
    #[arg(long, value_parser = parse_term, allow_hyphen_values = true)]
    term: Vec<(usize, usize, Complex64)>,
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, required = true)]
    path: Vec<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    y0: Complex64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Working digits (default from CANARD_PRECISION, else 16).
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Subcommand)]
enum ShootCmd {
    /// Canard value α⁺ of the Van der Pol equation.
    Vdp(ShootArgs),
    /// Canard value a⁺ of the Brusselator.
    Brusselator(ShootArgs),
}

#[derive(Args)]
struct ShootArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    /// Working digits or "auto" (default from CANARD_PRECISION, else auto).
    #[arg(long)]
    digits: Option<String>,
    #[arg(long, default_value = "csv")]
    emit: String,
}

#[derive(Subcommand)]
enum InnerCmd {
    /// Y₀⁺ − Y₀⁻ for the Van der Pol inner equation.
    Vdp(InnerArgs),
    /// Y₀⁺ − Y₀⁻ for the Brusselator inner equation.
    Brusselator(InnerArgs),
}

#[derive(Args)]
struct InnerArgs {
    /// Grid lo:hi:step or a comma list.
    #[arg(long, value_parser = parse_grid, default_value = "2.5:3.5:0.25")]
    x: Grid,
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, default_value = "csv")]
    emit: String,
}

#[derive(Subcommand)]
enum AsympCmd {
    /// Least-squares fit b_n ≈ C + a·φ(n).
    Fit(FitArgs),
    /// Gevrey ratio |a_{n+1}|/((n+1)|a_n|).
    Ratio(RatioArgs),
    /// Van der Pol series summed to its smallest term.
    Sum(SumArgs),
    /// Brusselator coefficient constant against the stated candidates.
    ProbeBrusselator(ProbeArgs),
}

#[derive(Args)]
struct FitArgs {
    /// sqrt or cbrt
    #[arg(long, default_value = "sqrt")]
    model: String,
    #[arg(long, value_parser = parse_range, default_value = "135:155")]
    range: (usize, usize),
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Args)]
struct RatioArgs {
    /// vdp or brusselator
    #[arg(long, default_value = "vdp")]
    system: String,
    #[arg(long, default_value_t = 155)]
    n: usize,
    #[arg(long, default_value = "csv")]
    emit: String,
}

#[derive(Args)]
struct SumArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 155)]
    n: usize,
    #[arg(long, default_value = "csv")]
    emit: String,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Comma separated targets; omit for all, pass "" for none.
    #[arg(long)]
    targets: Option<String>,
    #[arg(long, default_value = "md")]
    emit: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Svg,
    Md,
}

impl Format {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            "md" => Some(Format::Md),
            _ => None,
        }
    }
}

/// Parsed `--emit`: a format, an output file (format from its extension) and field selectors.
#[derive(Debug, Default)]
struct Emit {
    format: Option<Format>,
    path: Option<PathBuf>,
    fields: Vec<String>,
}

impl Emit {
    fn parse(s: &str) -> Self {
        let mut e = Emit::default();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(f) = Format::parse(tok) {
                e.format = Some(f);
            } else if let Some(f) = Path::new(tok).extension().and_then(|x| x.to_str()).and_then(Format::parse) {
                e.format.get_or_insert(f);
                e.path = Some(PathBuf::from(tok));
            } else {
                e.fields.push(tok.to_string());
            }
        }
        e
    }

    fn wants(&self, field: &str) -> bool {
        self.fields.is_empty() || self.fields.iter().any(|f| f == field)
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Compute(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Compute(e.to_string())
    }
}

type Res<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if b < a {
        return Err("hi must not be below lo".into());
    }
    Ok((a, b))
}

fn parse_bbox(s: &str) -> Result<(f64, f64, f64, f64), String> {
    let v: Vec<f64> = s.split(':').map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] => Ok((a, b, c, d)),
        _ => Err("expected re_min:re_max:im_min:im_max".into()),
    }
}

fn parse_level(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.contains('/') {
        s.parse::<ExactRational>().map(|q| q.to_f64()).map_err(|e| e.to_string())
    } else {
        s.parse::<f64>().map_err(|e| e.to_string())
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        let (lo, hi, step) = (v[0], v[1], v[2]);
        if !(step > 0.0) || hi < lo {
            return Err("expected lo:hi:step with step > 0 and hi ≥ lo".into());
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        return Ok(Grid((0..=n).map(|k| lo + k as f64 * step).collect()));
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>().map(Grid)
}

/// Complex literals: "2", "-1+10i", "0.5-2e-3i", "i", "-i".
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex number '{s}'");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|r| Complex64::new(r, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_term(s: &str) -> Result<(usize, usize, Complex64), String> {
    let mut it = s.splitn(3, ':');
    let (Some(i), Some(j), Some(c)) = (it.next(), it.next(), it.next()) else {
        return Err("expected i:j:coefficient".into());
    };
    Ok((i.parse().map_err(|_| "bad x power")?, j.parse().map_err(|_| "bad y power")?, parse_complex(c)?))
}

fn env_digits() -> Res<Option<u32>> {
    match std::env::var("CANARD_PRECISION") {
        Ok(v) => v.trim().parse::<u32>().map(Some).map_err(|_| usage(format!("CANARD_PRECISION must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn num(x: f64) -> String {
    format!("{x:.15e}")
}

fn rat(q: &ExactRational) -> String {
    q.to_string()
}

fn poly_json(p: &DensePolynomial) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(rat(c))).collect())
}

fn series_json(s: &TruncatedSeries) -> Value {
    Value::Array(s.coeffs().iter().map(|c| Value::String(rat(c))).collect())
}

fn ratfunc_json(v: &PoleRationalFunction) -> Value {
    json!({ "numerator": poly_json(v.numerator()), "pole": rat(v.pole()), "order": v.pole_order() })
}

/// Fixed-point decimal with `places` digits after the point, rounded to nearest.
fn fixed(x: &Float, places: u32) -> String {
    let scaled = Float::with_val(x.prec() + 64, x * Float::with_val(x.prec() + 64, Integer::from(Integer::u_pow_u(10, places))));
    let mut i = scaled.round().to_integer().unwrap_or_default();
    let neg = i < 0;
    i.abs_mut();
    let mut d = i.to_string();
    let p = places as usize;
    if d.len() <= p {
        d = format!("{}{}", "0".repeat(p + 1 - d.len()), d);
    }
    let (int, frac) = d.split_at(d.len() - p);
    let sign = if neg { "-" } else { "" };
    if p == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write_atomic(path: &Path, text: &str) -> Res<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

struct Output<'a> {
    out: Option<&'a Path>,
}

impl Output<'_> {
    fn emit(&self, emit: &Emit, text: String) -> Res<()> {
        match emit.path.as_deref().or(self.out) {
            Some(p) => write_atomic(p, &text),
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(text.as_bytes())?;
                so.flush()?;
                Ok(())
            }
        }
    }
}

fn format_or(emit: &Emit, default: Format, allowed: &[Format]) -> Res<Format> {
    let f = emit.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!("format {f:?} is not available for this command")))
    }
}

fn relief_spec(a: &SpecArgs) -> Res<ReliefSpec> {
    let s = match a.spec.as_str() {
        "vdp" => ReliefSpec::vdp(),
        "brusselator" => ReliefSpec::brusselator(),
        "quadratic" => ReliefSpec::quadratic(),
        other => return Err(usage(format!("unknown relief spec '{other}'"))),
    };
    Ok(s.with_theta(a.theta))
}

fn series_vdp(a: &SeriesVdpArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Json, &[Format::Json, Format::Csv])?;
    let s = vdp_series(a.n)?;
    let text = match fmt {
        Format::Json => {
            let mut m = serde_json::Map::new();
            m.insert("n".into(), json!(a.n));
            if emit.wants("a") {
                m.insert("a".into(), Value::Array(s.a.iter().map(|q| Value::String(rat(q))).collect()));
            }
            if emit.wants("v") {
                m.insert("v".into(), Value::Array(s.v.iter().map(ratfunc_json).collect()));
            }
            json_text(&Value::Object(m))
        }
        _ => csv(&["n", "a"], &s.a.iter().enumerate().map(|(n, q)| vec![n.to_string(), rat(q)]).collect::<Vec<_>>()),
    };
    out.emit(&emit, text)
}

fn series_bn(a: &SeriesBnArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Csv, &[Format::Json, Format::Csv])?;
    let digits = a.digits.or(env_digits()?).unwrap_or(12);
    let (lo, hi) = a.range;
    if lo == 0 {
        return Err(usage("b_n is defined for n ≥ 1"));
    }
    let s = vdp_series(hi)?;
    let vals: Vec<(usize, String)> =
        (lo..=hi).into_par_iter().map(|n| vdp_bn(&s, n, digits).map(|b| (n, fixed(&b, digits)))).collect::<Result<_, _>>()?;
    let text = match fmt {
        Format::Json => json_text(&json!({
            "digits": digits,
            "b": vals.iter().map(|(n, b)| json!({"n": n, "b": b})).collect::<Vec<_>>(),
        })),
        _ => csv(&["n", "b_n"], &vals.into_iter().map(|(n, b)| vec![n.to_string(), b]).collect::<Vec<_>>()),
    };
    out.emit(&emit, text)
}

fn series_canard(a: &SeriesCanardArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Json, &[Format::Json, Format::Csv])?;
    let problem = match a.system.as_str() {
        "brusselator" => brusselator_normal_form(a.eps_order, a.x_order),
        "vdp" => vdp_normal_form(a.eps_order, a.x_order),
        other => return Err(usage(format!("unknown system '{other}'"))),
    };
    let sol = canard_formal(&problem)?;
    let text = match fmt {
        Format::Json => {
            let mut m = serde_json::Map::new();
            m.insert("system".into(), json!(a.system));
            m.insert("p".into(), json!(sol.p));
            if emit.wants("a") {
                m.insert("a".into(), Value::Array(sol.a.iter().map(poly_json).collect()));
            }
            if emit.wants("y") {
                m.insert("y".into(), Value::Array(sol.y.iter().map(series_json).collect()));
            }
            json_text(&Value::Object(m))
        }
        _ => {
            let mut rows = Vec::new();
            for (n, p) in sol.a.iter().enumerate() {
                for (k, c) in p.coeffs().iter().enumerate() {
                    rows.push(vec!["a".into(), n.to_string(), k.to_string(), rat(c)]);
                }
            }
            for (n, s) in sol.y.iter().enumerate() {
                for (k, c) in s.coeffs().iter().enumerate() {
                    rows.push(vec!["y".into(), n.to_string(), k.to_string(), rat(c)]);
                }
            }
            csv(&["kind", "n", "k", "coefficient"], &rows)
        }
    };
    out.emit(&emit, text)
}

fn relief_contour(a: &ContourArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Svg, &[Format::Svg, Format::Csv, Format::Json])?;
    let spec = relief_spec(&a.spec)?;
    let (r0, r1, i0, i1) = a.bbox;
    let bbox = BBox::new(r0, r1, i0, i1)?;
    let lines = level_curves(&spec, &a.levels, bbox, a.res)?;
    let text = match fmt {
        Format::Svg => contours_to_svg(&lines, bbox, a.width),
        Format::Json => json_text(&Value::Array(
            lines
                .iter()
                .map(|l| json!({"level": num(l.level), "points": l.points.iter().map(|p| [num(p.re), num(p.im)]).collect::<Vec<_>>()}))
                .collect(),
        )),
        _ => {
            let mut rows = Vec::new();
            for (k, l) in lines.iter().enumerate() {
                for p in &l.points {
                    rows.push(vec![k.to_string(), num(l.level), num(p.re), num(p.im)]);
                }
            }
            csv(&["line", "level", "re", "im"], &rows)
        }
    };
    out.emit(&emit, text)
}

fn relief_descend(a: &DescendArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Csv, &[Format::Csv, Format::Json])?;
    let spec = relief_spec(&a.spec)?;
    let stop = DescentStop { target: a.target, radius: a.radius, max_arclength: a.max_arclength, step: a.step };
    let path = steepest_descent_path(&spec, a.from, stop)?;
    let rows: Vec<Vec<String>> =
        path.vertices().iter().map(|&z| vec![num(z.re), num(z.im), num(relief_value(&spec, z))]).collect();
    let text = match fmt {
        Format::Json => {
            let cert = descent_check(&spec, &path)?;
            json_text(&json!({
                "vertices": rows,
                "length": num(path.length()),
                "certificate": {"c": num(cert.c), "descending": cert.descending},
            }))
        }
        _ => csv(&["re", "im", "relief"], &rows),
    };
    out.emit(&emit, text)
}

fn relief_check(a: &CheckArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Json, &[Format::Csv, Format::Json])?;
    let spec = relief_spec(&a.spec)?;
    let path = ComplexPath::new(a.path.clone())?;
    let cert = descent_check(&spec, &path)?;
    let col = cert.col_on_path.map(|z| [num(z.re), num(z.im)]);
    let text = match fmt {
        Format::Json => json_text(&json!({
            "c": num(cert.c),
            "descending": cert.descending,
            "worst_point": [num(cert.worst_point.re), num(cert.worst_point.im)],
            "col_on_path": col,
        })),
        _ => csv(
            &["c", "descending", "worst_re", "worst_im"],
            &[vec![num(cert.c), cert.descending.to_string(), num(cert.worst_point.re), num(cert.worst_point.im)]],
        ),
    };
    out.emit(&emit, text)
}

fn ode_run(a: &OdeRunArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Json, &[Format::Csv, Format::Json])?;
    let kind = FieldKind::parse(&a.field).ok_or_else(|| usage(format!("unknown field '{}'", a.field)))?;
    let field = if kind == FieldKind::UserPolynomial {
        let ni = a.term.iter().map(|t| t.0 + 1).max().unwrap_or(1);
        let nj = a.term.iter().map(|t| t.1 + 1).max().unwrap_or(1);
        let mut poly = vec![vec![Complex64::new(0.0, 0.0); nj]; ni];
        for &(i, j, c) in &a.term {
            poly[i][j] += c;
        }
        OdeField::user_polynomial(a.eps, poly)
    } else {
        OdeField::new(kind, a.eps, a.alpha)
    };
    let path = ComplexPath::new(a.path.clone())?;
    let digits = a.digits.or(env_digits()?).unwrap_or(16);
    let cfg = IntegratorConfig { precision_digits: digits, dense: fmt == Format::Csv, ..IntegratorConfig::with_tol(a.tol) };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let t = integrate_along_path(&field, &path, a.y0, &cfg)?;
    let text = match fmt {
        Format::Csv => {
            let rows: Vec<Vec<String>> = t
                .dense_samples
                .as_deref()
                .unwrap_or_default()
                .iter()
                .map(|k| vec![num(k.s), num(k.x.re), num(k.x.im), num(k.y.re), num(k.y.im)])
                .collect();
            csv(&["s", "x_re", "x_im", "y_re", "y_im"], &rows)
        }
        _ => json_text(&json!({
            "end_value": [t.end_value_text.0, t.end_value_text.1],
            "step_count": t.step_count,
            "rejected_steps": t.rejected_steps,
            "precision_digits": digits,
        })),
    };
    out.emit(&emit, text)
}

fn shoot_cmd(a: &ShootArgs, brusselator: bool, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Csv, &[Format::Csv, Format::Json])?;
    let digits = match a.digits.as_deref() {
        Some("auto") => None,
        Some(d) => Some(d.parse::<u32>().map_err(|_| usage(format!("--digits must be 'auto' or an integer, got '{d}'")))?),
        None => env_digits()?,
    };
    let cfg = ShootConfig { precision_digits: digits, ..Default::default() };
    let results: Vec<(f64, ShootResult, f64)> = a
        .eps
        .par_iter()
        .map(|&eps| {
            let r = if brusselator { find_brusselator_a(eps, &cfg) } else { find_vdp_alpha(eps, &cfg) }?;
            let obs = if brusselator { brusselator_stokes_observable(eps, &r) } else { vdp_stokes_observable(eps, &r) };
            Ok((eps, r, obs))
        })
        .collect::<Result<_, canard_core::shooter::ShootError>>()?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(eps, r, obs)| {
            vec![
                eps.to_string(),
                r.parameter_text.0.clone(),
                r.parameter_text.1.clone(),
                num(*obs),
                r.iterations.to_string(),
                num(r.residual.norm()),
            ]
        })
        .collect();
    let header = ["eps", "re_alpha", "im_alpha", "stokes_observable", "iterations", "residual"];
    let text = match fmt {
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .zip(&results)
                .map(|(r, (_, res, _))| {
                    let mut m: serde_json::Map<String, Value> =
                        header.iter().zip(r).map(|(h, v)| (h.to_string(), Value::String(v.clone()))).collect();
                    m.insert("precision_digits".into(), json!(res.precision_digits));
                    Value::Object(m)
                })
                .collect(),
        )),
        _ => csv(&header, &rows),
    };
    out.emit(&emit, text)
}

fn inner_cmd(a: &InnerArgs, brusselator: bool, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Csv, &[Format::Csv, Format::Json])?;
    let digits = a.digits.or(env_digits()?);
    let diffs: Vec<StokesDiff> = a
        .x
        .0
        .par_iter()
        .map(|&x| if brusselator { brusselator_stokes_diff(x, digits) } else { vdp_stokes_diff(x, digits) })
        .collect::<Result<_, _>>()?;
    let header = ["X", "diff_re", "diff_im", "formula", "ratio"];
    let rows: Vec<Vec<String>> =
        diffs.iter().map(|d| vec![d.x.to_string(), num(d.diff.re), num(d.diff.im), num(d.formula), num(d.ratio)]).collect();
    let text = match fmt {
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .zip(&diffs)
                .map(|(r, d)| {
                    let mut m: serde_json::Map<String, Value> =
                        header.iter().zip(r).map(|(h, v)| (h.to_string(), Value::String(v.clone()))).collect();
                    m.insert("precision_loss".into(), json!(d.precision_loss));
                    m.insert("digits".into(), json!(d.digits));
                    Value::Object(m)
                })
                .collect(),
        )),
        _ => csv(&header, &rows),
    };
    out.emit(&emit, text)
}

fn asymp_fit(a: &FitArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Json, &[Format::Csv, Format::Json])?;
    let model = FitModel::parse(&a.model).ok_or_else(|| usage(format!("unknown model '{}'", a.model)))?;
    let (lo, hi) = a.range;
    if lo == 0 {
        return Err(usage("the fit range must start at n ≥ 1"));
    }
    let s = vdp_series(hi)?;
    let pts: Vec<(usize, f64)> =
        (lo..=hi).into_par_iter().map(|n| vdp_bn(&s, n, 15).map(|b| (n, b.to_f64()))).collect::<Result<_, _>>()?;
    let f = fit_bn(&pts, model, a.range)?;
    let text = match fmt {
        Format::Csv => csv(
            &["model", "lo", "hi", "C", "a", "residual_norm"],
            &[vec![a.model.clone(), lo.to_string(), hi.to_string(), num(f.c), num(f.a), num(f.residual_norm)]],
        ),
        _ => json_text(&json!({
            "model": a.model,
            "range": [lo, hi],
            "C": num(f.c),
            "a": num(f.a),
            "residual_norm": num(f.residual_norm),
        })),
    };
    out.emit(&emit, text)
}

fn coefficient_series(system: &str, n: usize) -> Res<Vec<ExactRational>> {
    match system {
        "vdp" => Ok(vdp_series(n)?.a),
        "brusselator" => Ok(brusselator_a_series(n)?),
        other => Err(usage(format!("unknown system '{other}'"))),
    }
}

fn asymp_ratio(a: &RatioArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Csv, &[Format::Csv, Format::Json])?;
    let r = gevrey_ratio(&coefficient_series(&a.system, a.n)?)?;
    let rows: Vec<Vec<String>> = r.iter().enumerate().map(|(n, x)| vec![n.to_string(), num(*x)]).collect();
    let text = match fmt {
        Format::Json => json_text(&json!({"system": a.system, "ratio": rows})),
        _ => csv(&["n", "ratio"], &rows),
    };
    out.emit(&emit, text)
}

fn asymp_sum(a: &SumArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Csv, &[Format::Csv, Format::Json])?;
    let coeffs = vdp_series(a.n)?.a;
    let sums = a.eps.par_iter().map(|&e| sum_smallest_term(&coeffs, e)).collect::<Result<Vec<_>, _>>()?;
    let header = ["eps", "value", "n_opt", "smallest_term"];
    let rows: Vec<Vec<String>> = a
        .eps
        .iter()
        .zip(&sums)
        .map(|(e, s)| vec![e.to_string(), s.value_text.clone(), s.n_opt.to_string(), num(s.smallest_term)])
        .collect();
    let text = match fmt {
        Format::Json => json_text(&Value::Array(
            rows.iter().map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect())).collect(),
        )),
        _ => csv(&header, &rows),
    };
    out.emit(&emit, text)
}

fn asymp_probe(a: &ProbeArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Json, &[Format::Csv, Format::Json])?;
    let p = brusselator_constant_probe(&brusselator_a_series(a.n)?)?;
    let text = match fmt {
        Format::Csv => csv(&["n", "c_n"], &p.c.iter().map(|(n, c)| vec![n.to_string(), num(*c)]).collect::<Vec<_>>()),
        _ => json_text(&json!({
            "c": p.c.iter().map(|(n, c)| json!({"n": n, "c_n": num(*c)})).collect::<Vec<_>>(),
            "extrapolated": num(p.extrapolated),
            "candidates": p.candidates.iter().map(|c| json!({"name": c.name, "value": num(c.value)})).collect::<Vec<_>>(),
            "nearest": p.nearest,
            "ratio_to_nearest": num(p.ratio_to_nearest),
            "derived_candidate": {"name": p.derived_candidate.name, "value": num(p.derived_candidate.value)},
            "ratio_to_derived": num(p.ratio_to_derived),
        })),
    };
    out.emit(&emit, text)
}

fn report_cmd(a: &ReportArgs, out: &Output) -> Res<()> {
    let emit = Emit::parse(&a.emit);
    let fmt = format_or(&emit, Format::Md, &[Format::Md, Format::Json, Format::Csv])?;
    let targets: Vec<String> = match &a.targets {
        None => TARGETS.iter().map(|s| s.to_string()).collect(),
        Some(t) => t.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
    };
    if let Some(bad) = targets.iter().find(|t| !TARGETS.contains(&t.as_str())) {
        return Err(usage(format!("unknown report target '{bad}' (known: {})", TARGETS.join(", "))));
    }
    let rows = run_report(&targets);
    let text = match fmt {
        Format::Json => json_text(&serde_json::to_value(&rows).expect("serializable")),
        Format::Csv => {
            let mut s = String::from("target,check,published,computed,tolerance,pass\n");
            for r in &rows {
                let q = |x: &str| if x.contains(',') { format!("\"{}\"", x.replace('"', "\"\"")) } else { x.to_string() };
                let _ = writeln!(s, "{},{},{},{},{},{}", q(&r.target), q(&r.check), q(&r.published), q(&r.computed), q(&r.tolerance), r.pass);
            }
            s
        }
        _ => render_markdown(&rows),
    };
    out.emit(&emit, text)
}

fn run(cli: &Cli) -> Res<()> {
    let out = Output { out: cli.out.as_deref() };
    match &cli.command {
        Command::Series(SeriesCmd::Vdp(a)) => series_vdp(a, &out),
        Command::Series(SeriesCmd::Bn(a)) => series_bn(a, &out),
        Command::Series(SeriesCmd::Canard(a)) => series_canard(a, &out),
        Command::Relief(ReliefCmd::Contour(a)) => relief_contour(a, &out),
        Command::Relief(ReliefCmd::Descend(a)) => relief_descend(a, &out),
        Command::Relief(ReliefCmd::Check(a)) => relief_check(a, &out),
        Command::Ode(OdeCmd::Run(a)) => ode_run(a, &out),
        Command::Shoot(ShootCmd::Vdp(a)) => shoot_cmd(a, false, &out),
        Command::Shoot(ShootCmd::Brusselator(a)) => shoot_cmd(a, true, &out),
        Command::Inner(InnerCmd::Vdp(a)) => inner_cmd(a, false, &out),
        Command::Inner(InnerCmd::Brusselator(a)) => inner_cmd(a, true, &out),
        Command::Asymp(AsympCmd::Fit(a)) => asymp_fit(a, &out),
        Command::Asymp(AsympCmd::Ratio(a)) => asymp_ratio(a, &out),
        Command::Asymp(AsympCmd::Sum(a)) => asymp_sum(a, &out),
        Command::Asymp(AsympCmd::ProbeBrusselator(a)) => asymp_probe(a, &out),
        Command::Report(a) => report_cmd(a, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("{}", json!({"error": {"kind": "computation", "message": e.to_string()}}));
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, msg, code) = match e {
                CliError::Usage(m) => ("usage", m, 2),
                CliError::Compute(m) => ("computation", m, 1),
            };
            eprintln!("{}", json!({"error": {"kind": kind, "message": msg}}));
            if code == 2 {
                eprintln!("\nRun 'canard --help' for usage.");
            }
            ExitCode::from(code)
        }
    }
}
