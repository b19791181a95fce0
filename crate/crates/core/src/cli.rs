//! `growthlab` command line: one subcommand per analysis, reports written
//! into an output directory alongside a `manifest.json`.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::growth::ball::{enumerate_ball, enumerate_closure, BallCensus, Caps, Closure};
use crate::growth::distortion::{distortion_profile, Subgroup};
use crate::growth::entropy::{entropy_report, DEFAULT_RESIDUAL_RATIO};
use crate::growth::fit::{fit_exponential_rate, fit_polynomial_degree, ExponentialFit, PolynomialBoundFit};
use crate::growth::sandwich::quotient_sandwich_check;
use crate::models::spec::{load_group_spec, LoadedSpec};
use crate::models::GroupModel;
use crate::rewriting::{collect_normal_form, measure_prefix_growth, push_right, CollectionData, RewriteContext, RewriteTrace};
use crate::spectra::default_tolerance;
use crate::spectra::screen::{virtual_nilpotency_screen, ScreenReport, DEFAULT_ORDER_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "growthlab", version, about = "Growth, entropy and rewriting experiments on finitely generated groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Group spec file (.group).
    spec: PathBuf,
    /// Output directory; without it the main report goes to stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Overwrite existing report files.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "cap-elements")]
    cap_elements: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SubgroupKind {
    Whole,
    Kernel,
    Center,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ball census c(R) and sphere sizes.
    Ball {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: usize,
    },
    /// Certified entropy upper bound and growth classification.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: usize,
    },
    /// Polynomial and exponential fits of the census over a window.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: usize,
        /// `a..b`; defaults to the upper half of the radii.
        #[arg(long, value_parser = parse_range)]
        window: Option<(usize, usize)>,
    },
    /// Distortion of a subgroup.
    Distortion {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: usize,
        #[arg(long, value_enum, default_value_t = SubgroupKind::Kernel)]
        subgroup: SubgroupKind,
        /// Generator word of a central subgroup (repeatable).
        #[arg(long = "subgroup-gen")]
        subgroup_gen: Vec<String>,
    },
    /// Order of the group, or the cap if it is exceeded.
    Closure {
        #[command(flatten)]
        common: Common,
    },
    /// Norm-one spectral screen of the conjugation action.
    Screen {
        #[command(flatten)]
        common: Common,
    },
    /// Rewrites one word, or measures prefix growth over random words.
    Rewrite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, value_parser = parse_range, default_value = "5..40")]
        lengths: (usize, usize),
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// First basis index of N for polycyclic models.
        #[arg(long)]
        split: Option<usize>,
    },
    /// Ball counts of the group against its quotient by a finite kernel.
    Sandwich {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: usize,
    },
    /// Graded-series and presentation checks.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Ball { common, .. }
            | Command::Entropy { common, .. }
            | Command::Fit { common, .. }
            | Command::Distortion { common, .. }
            | Command::Closure { common }
            | Command::Screen { common }
            | Command::Rewrite { common, .. }
            | Command::Sandwich { common, .. }
            | Command::Verify { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Entropy { .. } => "entropy",
            Command::Fit { .. } => "fit",
            Command::Distortion { .. } => "distortion",
            Command::Closure { .. } => "closure",
            Command::Screen { .. } => "screen",
            Command::Rewrite { .. } => "rewrite",
            Command::Sandwich { .. } => "sandwich",
            Command::Verify { .. } => "verify",
        }
    }
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

/// Decimal string with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn num(x: f64) -> Value {
    Value::String(fmt12(x))
}

/// Files produced by one run, in write order.
struct Bundle {
    files: Vec<(String, String)>,
    /// Printed when no output directory is given.
    primary: String,
    exit: i32,
}

impl Bundle {
    fn new() -> Self {
        Bundle { files: Vec::new(), primary: String::new(), exit: EXIT_OK }
    }

    fn add(&mut self, name: &str, contents: String, primary: bool) {
        if primary {
            self.primary = contents.clone();
        }
        self.files.push((name.to_string(), contents));
    }

    fn json(&mut self, name: &str, v: Value, primary: bool) {
        let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
        s.push('\n');
        self.add(name, s, primary);
    }
}

/// Parses `argv` (including the program name), runs one subcommand and
/// returns the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("growthlab: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Resource(_) => EXIT_CAP,
        _ => EXIT_FAILURE,
    }
}

fn execute(cmd: &Command) -> Result<i32> {
    let started = Instant::now();
    let common = cmd.common().clone();
    if let Some(dir) = &common.output {
        prepare_dir(dir)?;
    }
    let spec = load_group_spec(&common.spec)?;
    let caps = Caps {
        threads: common.threads,
        ..match common.cap_elements {
            Some(n) => Caps::with_max_elements(n),
            None => Caps::default(),
        }
    };
    let mut bundle = caps.install(|| build(cmd, &common, &spec, &caps))??;
    let Some(dir) = &common.output else {
        print!("{}", bundle.primary);
        return Ok(bundle.exit);
    };
    let manifest = json!({
        "tool": "growthlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "spec": common.spec.display().to_string(),
        "spec_sha256": spec.sha256,
        "seed": common.seed,
        "threads": common.threads,
        "files": bundle.files.iter().map(|f| f.0.clone()).collect::<Vec<_>>(),
        "exit_code": bundle.exit,
        "wall_clock_seconds": num(started.elapsed().as_secs_f64()),
    });
    bundle.json("manifest.json", manifest, false);
    if !common.force {
        if let Some((name, _)) = bundle.files.iter().find(|f| dir.join(&f.0).exists()) {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::AlreadyExists,
                format!("{} exists; pass --force to overwrite", dir.join(name).display()),
            )));
        }
    }
    for (name, contents) in &bundle.files {
        write_file(&dir.join(name), contents, common.force)?;
    }
    Ok(bundle.exit)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    if !dir.is_dir() {
        return Err(Error::Io(std::io::Error::other(format!("{} is not a directory", dir.display()))));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str, force: bool) -> Result<()> {
    let mut opts = fs::OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    let mut f = opts.open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{} exists; pass --force to overwrite", path.display()),
            ))
        } else {
            Error::Io(e)
        }
    })?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

/// Common header of every JSON report.
fn header(spec: &LoadedSpec, common: &Common) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("spec_sha256".into(), Value::String(spec.sha256.clone()));
    m.insert("model".into(), Value::String(spec.model.kind().into()));
    m.insert("seed".into(), json!(common.seed));
    m
}

fn report(mut head: Map<String, Value>, body: Value) -> Value {
    if let Value::Object(b) = body {
        head.extend(b);
    }
    Value::Object(head)
}

fn census_csv(census: &BallCensus, spec: &LoadedSpec, common: &Common) -> String {
    format!(
        "# spec_sha256={} seed={}\n{}",
        spec.sha256,
        common.seed,
        census.to_csv()
    )
}

fn census_json(census: &BallCensus) -> Value {
    json!({
        "requested_radius": census.requested_radius,
        "complete_radius": census.complete_radius(),
        "truncated_at": census.truncated_at,
        "cumulative": census.cumulative,
        "sphere": census.sphere,
    })
}

fn add_census(b: &mut Bundle, census: &BallCensus, spec: &LoadedSpec, common: &Common, primary: bool) {
    match common.format {
        Format::Csv => b.add("census.csv", census_csv(census, spec, common), primary),
        Format::Json => b.json("census.json", report(header(spec, common), census_json(census)), primary),
    }
    if census.is_truncated() {
        eprintln!(
            "growthlab: element cap reached; census exact only up to R = {}",
            census.complete_radius()
        );
        b.exit = EXIT_CAP;
    }
}

fn poly_json(f: &PolynomialBoundFit) -> Value {
    json!({
        "degree": num(f.degree),
        "leading_coefficient": num(f.leading_coefficient),
        "max_residual": num(f.max_residual),
        "window": [f.window.0, f.window.1],
        "points": f.points,
    })
}

fn exp_json(f: &ExponentialFit) -> Value {
    json!({
        "rate": num(f.rate),
        "max_residual": num(f.max_residual),
        "window": [f.window.0, f.window.1],
        "points": f.points,
    })
}

fn screen_json(r: &ScreenReport) -> Value {
    json!({
        "verdict": r.verdict,
        "skipped_strata": r.skipped_strata,
        "entries": r.entries.iter().map(|e| json!({
            "generator": e.generator,
            "order": e.order,
            "stratum": e.stratum,
            "unit_circle": e.unit_circle,
            "lambda_max": [num(e.lambda_max_lo), num(e.lambda_max_hi)],
            "lambda_max_exact": [e.lambda_max_exact.0, e.lambda_max_exact.1],
            "osin_bound": num(e.osin_bound),
        })).collect::<Vec<_>>(),
    })
}

fn trace_csv(traces: &[RewriteTrace], spec: &LoadedSpec, common: &Common) -> String {
    let mut s = format!("# spec_sha256={} seed={}\n{}\n", spec.sha256, common.seed, RewriteTrace::csv_header());
    for t in traces {
        s.push_str(&t.csv_row());
        s.push('\n');
    }
    s
}

fn build(cmd: &Command, common: &Common, spec: &LoadedSpec, caps: &Caps) -> Result<Bundle> {
    let model: &GroupModel = &spec.model;
    let mut b = Bundle::new();
    match cmd {
        Command::Ball { radius, .. } => {
            let census = enumerate_ball(model, *radius, caps)?;
            add_census(&mut b, &census, spec, common, true);
        }
        Command::Entropy { radius, .. } => {
            let census = enumerate_ball(model, *radius, caps)?;
            add_census(&mut b, &census, spec, common, false);
            let r = entropy_report(&census, DEFAULT_RESIDUAL_RATIO)?;
            let body = json!({
                "certified_upper": num(r.certified_upper),
                "certified_at": r.certified_at,
                "regression_slope": num(r.regression_slope),
                "classification": r.classification.as_str(),
                "window": [r.window.0, r.window.1],
                "loglog_rms": num(r.loglog_rms),
                "semilog_rms": num(r.semilog_rms),
                "warning": r.warning,
            });
            b.json("entropy.json", report(header(spec, common), body), true);
        }
        Command::Fit { radius, window, .. } => {
            let census = enumerate_ball(model, *radius, caps)?;
            add_census(&mut b, &census, spec, common, false);
            let c = census.complete();
            let r = c.len() - 1;
            let (lo, hi) = window.unwrap_or((r.div_ceil(2).max(1), r));
            let series: Vec<(u64, f64)> = (1..=r).map(|i| (i as u64, c[i] as f64)).collect();
            let w = (lo as u64, hi as u64);
            let body = json!({
                "series": "census",
                "polynomial": poly_json(&fit_polynomial_degree(&series, w)?),
                "exponential": exp_json(&fit_exponential_rate(&series, w)?),
            });
            b.json("fit.json", report(header(spec, common), body), true);
        }
        Command::Distortion { radius, subgroup, subgroup_gen, .. } => {
            let h = match subgroup {
                SubgroupKind::Whole => Subgroup::whole(model),
                SubgroupKind::Kernel => Subgroup::kernel(model)?,
                SubgroupKind::Center => {
                    let words = subgroup_gen
                        .iter()
                        .map(|w| model.parse_word(w))
                        .collect::<Result<Vec<_>>>()?;
                    Subgroup::center(model, &words)?
                }
            };
            let p = distortion_profile(model, &h, *radius, caps, caps.max_elements)?;
            match common.format {
                Format::Csv => b.add(
                    "distortion.csv",
                    format!("# spec_sha256={} seed={}\n{}", spec.sha256, common.seed, p.to_csv()),
                    true,
                ),
                Format::Json => b.json("distortion.json", report(header(spec, common), json!(p)), true),
            }
            if p.rows.len() < radius + 1 || p.rows.last().is_some_and(|r| r.truncated) {
                eprintln!("growthlab: cap reached; distortion is exact only where truncated=false");
                b.exit = EXIT_CAP;
            }
        }
        Command::Closure { .. } => {
            let closure = enumerate_closure(model, caps.max_elements)?;
            let body = match closure {
                Closure::Finite { order } => json!({"result": "finite", "order": order}),
                Closure::CapExceeded { explored } => {
                    b.exit = EXIT_CAP;
                    json!({"result": "cap_exceeded", "explored": explored, "cap": caps.max_elements})
                }
            };
            b.json("closure.json", report(header(spec, common), body), true);
        }
        Command::Screen { .. } => {
            let r = virtual_nilpotency_screen(model, DEFAULT_ORDER_BUDGET, &default_tolerance())?;
            b.json("screen.json", report(header(spec, common), screen_json(&r)), true);
        }
        Command::Rewrite { word, lengths, samples, split, .. } => {
            let ctx = match split {
                Some(k) => RewriteContext::from_polycyclic(Arc::clone(&spec.model), *k)?,
                None => RewriteContext::from_model(Arc::clone(&spec.model))?,
            };
            match word {
                Some(text) => {
                    let w = model.parse_word(text)?;
                    let pushed = push_right(&ctx, &w)?;
                    let nf = |v: &[num_bigint::BigInt]| ctx.normal().format(&v.to_vec());
                    let mut body = json!({
                        "word": w.to_string(),
                        "length_function": "exponent-sum",
                        "nu": nf(&pushed.nu),
                        "sigma": pushed.sigma.to_string(),
                    });
                    let mut trace = pushed.trace.clone();
                    match CollectionData::new(Arc::clone(&spec.model), *split, spec.cosets.clone()) {
                        Ok(data) => {
                            let f = collect_normal_form(&data, &w)?;
                            let labels = data.combined().labels();
                            body["collected"] = json!({
                                "alpha": nf(&f.alpha),
                                "exponents": f.exponents.iter().enumerate()
                                    .map(|(i, e)| json!({"letter": labels[i], "exponent": e.to_string()}))
                                    .collect::<Vec<_>>(),
                                "coset": f.coset.map(|q| data.cosets().expect("coset set").names()[q].clone()),
                            });
                            trace = f.trace;
                        }
                        Err(e) => body["collected"] = json!({"unavailable": e.to_string()}),
                    }
                    b.add("rewrite_trace.csv", trace_csv(&[trace], spec, common), false);
                    b.json("rewrite.json", report(header(spec, common), body), true);
                }
                None => {
                    let ls: Vec<usize> = (lengths.0..=lengths.1).collect();
                    let r = measure_prefix_growth(&ctx, &ls, *samples, common.seed)?;
                    let traces: Vec<RewriteTrace> = r.rows.iter().map(|row| row.worst.clone()).collect();
                    b.add("rewrite_trace.csv", trace_csv(&traces, spec, common), false);
                    let body = json!({
                        "series": "prefix s_max",
                        "sampling": "uniform i.i.d. letters (proxy for the worst case)",
                        "length_function": "exponent-sum",
                        "mode": r.mode,
                        "samples": r.samples,
                        "s_max": r.rows.iter().map(|row| json!([row.length, num(row.s_max)])).collect::<Vec<_>>(),
                        "polynomial": r.degree.as_ref().map(poly_json),
                        "exponential": r.rate.as_ref().map(exp_json),
                    });
                    b.json("fit.json", report(header(spec, common), body), true);
                }
            }
        }
        Command::Sandwich { radius, .. } => {
            let r = quotient_sandwich_check(model, *radius, caps)?;
            if !r.holds() {
                b.exit = EXIT_FAILURE;
            }
            if r.rows.len() < radius + 1 {
                b.exit = b.exit.max(EXIT_CAP);
            }
            let body = json!({"holds": r.holds(), "kernel_order": r.kernel_order, "rows": r.rows});
            b.json("sandwich.json", report(header(spec, common), body), true);
        }
        Command::Verify { .. } => {
            let g = &spec.graded;
            if !g.passed() {
                b.exit = EXIT_FAILURE;
            }
            let body = json!({
                "passed": g.passed(),
                "vacuous": g.vacuous,
                "checked_pairs": g.checked_pairs,
                "violations": g.violations,
                "cosets": spec.cosets.as_ref().map(|t| json!({"count": t.coset_count(), "k_constant": t.k_constant()})),
            });
            b.json("verify.json", report(header(spec, common), body), true);
        }
    }
    Ok(b)
}
