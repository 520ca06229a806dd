use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Rational};
use serde_json::{json, Value};

use papseries::analysis::{
    bounds_json, powerlaw_pipeline, stretched_pipeline, AnalysisReport, ExtensionSummary, PowerLawOptions, StretchedOptions,
};
use papseries::da::{default_grid, extend_series, Arithmetic, EnsembleOptions, PredictionEnsemble};
use papseries::dyck::dyck_series;
use papseries::numeric::{fmt_float, Precision, DEFAULT_DIGITS};
use papseries::perm::{classify_wilf, count_avoiders, count_avoiders_capped, PatternSet, Permutation};
use papseries::series::{export, import, ingest_bfile, Dataset, ExactSeries, Format};
use papseries::stieltjes::bound_report;
use papseries::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "papseries", version, about = "Enumerate pattern-avoiding permutations and analyse their generating-function coefficients")]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = "PAPSERIES_PRECISION", default_value_t = DEFAULT_DIGITS)]
    precision: u32,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed recorded in reports; every command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Significant digits printed for floating-point values.
    #[arg(long, global = true, default_value_t = 15)]
    sig: usize,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesFormat {
    Json,
    Bfile,
    Csv,
}

impl From<SeriesFormat> for Format {
    fn from(f: SeriesFormat) -> Self {
        match f {
            SeriesFormat::Json => Format::Json,
            SeriesFormat::Bfile => Format::Bfile,
            SeriesFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Powerlaw,
    Stretched,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count permutations avoiding the given patterns for n = 0..=max-n.
    Enumerate {
        /// Pattern word such as 25314; repeat the flag for several patterns.
        #[arg(long = "pattern", required = true)]
        patterns: Vec<String>,
        #[arg(long)]
        max_n: usize,
        /// Stop after this many insertion tests and report the complete prefix.
        #[arg(long)]
        node_cap: Option<u64>,
    },
    /// Group all patterns of a length by their counting sequences.
    Classify {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        max_n: usize,
    },
    /// Estimate asymptotic parameters of a series.
    Analyze {
        #[command(flatten)]
        input: SeriesArgs,
        #[arg(long, value_enum, default_value_t = Mode::Powerlaw)]
        mode: Mode,
        /// Stretch exponent for the stretched mode, e.g. 1/2.
        #[arg(long)]
        sigma: Option<String>,
        /// Growth rate taken as known.
        #[arg(long)]
        mu: Option<String>,
        /// Exponent assumed by the amplitude fit.
        #[arg(long, allow_hyphen_values = true)]
        g_fixed: Option<String>,
        /// Extrapolation window.
        #[arg(long)]
        window: Option<usize>,
        /// Predict this many further ratios with differential approximants first.
        #[arg(long)]
        extend: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
        /// Also compute continued-fraction bounds from the exact terms.
        #[arg(long)]
        bounds: bool,
        /// Write one two-column file per estimator sequence into this directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Lower bounds on the growth rate from log-convexity and the S-fraction.
    Bounds {
        #[command(flatten)]
        input: SeriesArgs,
        /// Treat the series as a known Stieltjes moment sequence.
        #[arg(long)]
        proven: bool,
        /// Extrapolate the bound sequence assuming singular exponent theta, e.g. 1/2.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value_t = 6)]
        window: usize,
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Predict further coefficients with an ensemble of differential approximants.
    Extend {
        #[command(flatten)]
        input: SeriesArgs,
        /// Number of terms to predict.
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Where to write the extended series (stdout if absent).
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SeriesFormat::Json)]
        series_format: SeriesFormat,
    },
    /// Height-weighted Dyck path series.
    Dyck {
        /// Height weight in (0,1), e.g. 1/2.
        #[arg(long)]
        y: String,
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = SeriesFormat::Bfile)]
        series_format: SeriesFormat,
    },
    /// Write a series in another encoding.
    Export {
        #[command(flatten)]
        input: SeriesArgs,
        #[arg(long, value_enum)]
        to: SeriesFormat,
    },
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// Embedded class key (25314, Av(25314), OEIS id), a series file
    /// (.json, .csv, otherwise b-file), catalan[:N], geometric:R[:N] or dyck:Y[:N].
    #[arg(long)]
    series: String,
    /// Keep only the first N exact terms.
    #[arg(long)]
    terms: Option<usize>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Differential-equation orders in the ensemble.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
    orders: Vec<usize>,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    inhom_min: i32,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    inhom_max: i32,
    /// Largest difference between polynomial degrees in one approximant.
    #[arg(long, default_value_t = 2)]
    spread: usize,
    /// Solve in floating point rather than exact rationals.
    #[arg(long)]
    float: bool,
    /// Relative margin for rejecting roots inside the physical radius.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 3.0)]
    sigma_cut: f64,
    /// Exact-arithmetic approximants solved at once.
    #[arg(long, default_value_t = 4)]
    exact_concurrency: usize,
}

struct Ctx {
    bits: u32,
    digits: u32,
    sig: usize,
    format: OutFormat,
    seed: u64,
}

fn parse_rational(s: &str, what: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|_| Error::Invalid(format!("{what}: '{s}' is not a rational number")))
}

fn parse_float(s: &str, what: &str, bits: u32) -> Result<Float> {
    if let Ok(q) = s.trim().parse::<Rational>() {
        return Ok(Float::with_val(bits, q));
    }
    Float::parse(s.trim())
        .map(|v| Float::with_val(bits, v))
        .map_err(|_| Error::Invalid(format!("{what}: '{s}' is not a number")))
}

fn length_arg(parts: &[&str], i: usize, default: usize) -> Result<usize> {
    match parts.get(i) {
        None => Ok(default),
        Some(t) => t.parse().map_err(|_| Error::Invalid(format!("bad term count '{t}'"))),
    }
}

fn load_series(arg: &SeriesArgs, bits: u32) -> Result<ExactSeries> {
    let s = resolve(&arg.series, bits)?;
    match arg.terms {
        Some(n) if n < s.len() => s.prefix(n),
        Some(n) if n > s.len() => Err(Error::Invalid(format!("{} has only {} exact terms, {n} requested", s.name, s.len()))),
        _ => Ok(s),
    }
}

fn resolve(r: &str, bits: u32) -> Result<ExactSeries> {
    let path = Path::new(r);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(r);
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            _ => return ingest_bfile(&text, name),
        };
        return import(&text, format, name, bits);
    }
    if let Some(s) = Dataset.get(r) {
        return Ok(s);
    }
    let parts: Vec<&str> = r.split(':').collect();
    match parts[0] {
        "catalan" => {
            let n = length_arg(&parts, 1, 30)?;
            let mut c = vec![rug::Integer::from(1)];
            for k in 1..n {
                let next = rug::Integer::from(&c[k - 1] * (4 * k as u64 - 2)) / (k as u64 + 1);
                c.push(next);
            }
            ExactSeries::from_integers("catalan", 0, c)
        }
        "geometric" if parts.len() >= 2 => {
            let q = parse_rational(parts[1], "ratio")?;
            let n = length_arg(&parts, 2, 30)?;
            let mut c = vec![Rational::from(1)];
            for k in 1..n {
                c.push(Rational::from(&c[k - 1] * &q));
            }
            ExactSeries::new(format!("geometric({q})"), 0, c)
        }
        "dyck" if parts.len() >= 2 => {
            let y = parse_rational(parts[1], "height weight")?;
            let n = length_arg(&parts, 2, 400)?;
            dyck_series(&y, n.saturating_sub(1))
        }
        _ => Err(Error::Invalid(format!("unknown series '{r}': not a file, embedded class or generator"))),
    }
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn write_plots(dir: &Path, series: &str, plots: &[papseries::ratio::EstimatorSeq], sig: usize) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for p in plots {
        let file = dir.join(format!("{}_{}.dat", slug(series), slug(&p.label)));
        fs::write(&file, p.plot_columns(sig))?;
        written.push(file.display().to_string());
    }
    Ok(written)
}

fn grid_opts(g: &GridArgs, available: usize, count: usize, bits: u32) -> Result<(Vec<papseries::da::DAConfig>, EnsembleOptions)> {
    if g.orders.is_empty() || g.inhom_min > g.inhom_max {
        return Err(Error::Invalid("empty approximant grid".into()));
    }
    let mode = if g.float { Arithmetic::Float } else { Arithmetic::Exact };
    let grid: Vec<_> =
        default_grid(available, &g.orders, g.inhom_min..=g.inhom_max, g.spread).into_iter().map(|c| c.with_mode(mode)).collect();
    if grid.is_empty() {
        return Err(Error::Invalid(format!("no approximant in the grid fits {available} terms")));
    }
    let opts = EnsembleOptions {
        count,
        delta: g.delta,
        sigma_cut: g.sigma_cut,
        exact_concurrency: g.exact_concurrency.max(1),
        bits,
    };
    Ok((grid, opts))
}

fn run_extension(s: &ExactSeries, g: &GridArgs, count: usize, bits: u32) -> Result<(ExactSeries, PredictionEnsemble)> {
    let (grid, opts) = grid_opts(g, s.len(), count, bits)?;
    let e = extend_series(s, &grid, &opts)?;
    Ok((e.to_series(s)?, e))
}

fn provenance(ctx: &Ctx) -> Value {
    json!({"tool": env!("CARGO_PKG_VERSION"), "precision_digits": ctx.digits, "seed": ctx.seed})
}

fn render_report(rep: &AnalysisReport, ctx: &Ctx) -> String {
    match ctx.format {
        OutFormat::Json => {
            let mut v = rep.to_json(ctx.sig);
            v["provenance"] = provenance(ctx);
            pretty(&v)
        }
        OutFormat::Csv => rep.to_csv(ctx.sig),
        OutFormat::Text => {
            let mut t = rep.to_text(ctx.sig);
            if let Some(b) = &rep.bounds {
                t.push_str(&format!("{:<22} {}  [{}]\n", "hhr_bound", fmt_float(&b.bound, ctx.sig), b.status()));
                if let Some((n, v)) = &b.logconvex_bound {
                    t.push_str(&format!("{:<22} {}  [ratio at n={n}]\n", "logconvex_bound", fmt_float(v, ctx.sig)));
                }
            }
            if let Some(x) = &rep.extension {
                t.push_str(&format!("extension: {} ratios from {}/{} approximants\n", x.predicted, x.accepted, x.members));
                if let Some(zc) = &x.critical_point {
                    t.push_str(&format!("{:<22} {} +- {}\n", "critical_point", fmt_float(&zc.mean, ctx.sig), fmt_float(&zc.std, 3)));
                }
            }
            t
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn cmd_enumerate(ctx: &Ctx, patterns: &[String], max_n: usize, node_cap: Option<u64>) -> Result<String> {
    let perms = patterns
        .iter()
        .flat_map(|p| p.split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect::<Vec<_>>())
        .map(|p| p.parse::<Permutation>())
        .collect::<Result<Vec<_>>>()?;
    let set = PatternSet::new(perms)?;
    let counts = match node_cap {
        Some(cap) => count_avoiders_capped(&set, max_n, cap),
        None => count_avoiders(&set, max_n),
    };
    let out = match ctx.format {
        OutFormat::Json => pretty(&counts.to_json()),
        OutFormat::Csv => {
            let mut s = String::from("n,count\n");
            for (n, c) in counts.counts.iter().enumerate() {
                s.push_str(&format!("{n},{c}\n"));
            }
            s
        }
        OutFormat::Text => ensure_newline(counts.to_bfile()),
    };
    if !counts.is_complete(max_n) {
        print!("{out}");
        return Err(Error::ResourceCap(format!("node cap reached; counts complete through n={}", counts.complete_through)));
    }
    Ok(out)
}

fn cmd_classify(ctx: &Ctx, length: usize, max_n: usize) -> Result<String> {
    if length == 0 {
        return Err(Error::Invalid("pattern length must be positive".into()));
    }
    let classes = classify_wilf(length, max_n);
    Ok(match ctx.format {
        OutFormat::Json => {
            let v: Vec<Value> = classes
                .iter()
                .map(|c| {
                    json!({
                        "representative": c.representative.to_string(),
                        "size": c.patterns.len(),
                        "patterns": c.patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                        "counts": c.counts.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&json!({"length": length, "max_n": max_n, "classes": v}))
        }
        OutFormat::Csv => {
            let mut s = String::from("representative,size,patterns,counts\n");
            for c in &classes {
                let pats: Vec<String> = c.patterns.iter().map(|p| p.to_string()).collect();
                let cnt: Vec<String> = c.counts.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("{},{},{},{}\n", c.representative, c.patterns.len(), pats.join(" "), cnt.join(" ")));
            }
            s
        }
        OutFormat::Text => {
            let mut s = format!("{} classes\n", classes.len());
            for c in &classes {
                let pats: Vec<String> = c.patterns.iter().map(|p| p.to_string()).collect();
                let last = c.counts.last().map(|x| x.to_string()).unwrap_or_default();
                s.push_str(&format!("{} size {} s_{max_n}={last}: {}\n", c.representative, c.patterns.len(), pats.join(" ")));
            }
            s
        }
    })
}

fn cmd_bounds(ctx: &Ctx, s: &ExactSeries, proven: bool, theta: Option<&str>, window: usize, plot_dir: Option<&Path>) -> Result<String> {
    let mut b = bound_report(s, proven, ctx.bits)?;
    if let Some(t) = theta {
        let w = window.min(b.hhr_bounds.len());
        b.extrapolate(&parse_rational(t, "theta")?, w)?;
    }
    if let Some(dir) = plot_dir {
        write_plots(dir, &s.name, &[b.hhr_seq()], ctx.sig)?;
    }
    Ok(match ctx.format {
        OutFormat::Json => {
            let mut v = bounds_json(&b, ctx.sig);
            v["series"] = json!(s.name);
            v["exact_terms"] = json!(s.len());
            v["provenance"] = provenance(ctx);
            pretty(&v)
        }
        OutFormat::Csv => {
            let mut out = String::from("n,hhr_bound\n");
            for (n, v) in &b.hhr_bounds {
                out.push_str(&format!("{n},{}\n", fmt_float(v, ctx.sig)));
            }
            out
        }
        OutFormat::Text => {
            let mut out = format!("series {} ({} exact terms)\n", s.name, s.len());
            out.push_str(&format!("hhr_bound        {}  [{}]\n", fmt_float(&b.bound, ctx.sig), b.status()));
            if let Some((n, v)) = b.hhr_bounds.last() {
                out.push_str(&format!("last_hhr_bound   {}  [n={n}]\n", fmt_float(v, ctx.sig)));
            }
            if let Some((n, v)) = &b.logconvex_bound {
                out.push_str(&format!("logconvex_bound  {}  [ratio at n={n}]\n", fmt_float(v, ctx.sig)));
            }
            if let Some((v, beta)) = &b.extrapolated {
                out.push_str(&format!("extrapolated     {}  [linear in n^-{beta}]\n", fmt_float(v, ctx.sig)));
            }
            if !b.decreasing_at.is_empty() {
                out.push_str(&format!("note: bound sequence decreases at n={:?}\n", b.decreasing_at));
            }
            out
        }
    })
}

fn run(cli: Cli) -> Result<String> {
    if cli.precision == 0 {
        return Err(Error::Invalid("precision must be positive".into()));
    }
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx { bits: Precision::digits(cli.precision).bits(), digits: cli.precision, sig: cli.sig.max(1), format: cli.format, seed: cli.seed };
    match cli.cmd {
        Command::Enumerate { patterns, max_n, node_cap } => cmd_enumerate(&ctx, &patterns, max_n, node_cap),
        Command::Classify { length, max_n } => cmd_classify(&ctx, length, max_n),
        Command::Analyze { input, mode, sigma, mu, g_fixed, window, extend, grid, bounds, plot_dir } => {
            let exact = load_series(&input, ctx.bits)?;
            let (s, ens) = match extend {
                Some(k) if k > 0 => {
                    let (s, e) = run_extension(&exact, &grid, k, ctx.bits)?;
                    (s, Some(e))
                }
                _ => (exact.clone(), None),
            };
            let mu = mu.map(|m| parse_float(&m, "mu", ctx.bits)).transpose()?;
            let mut rep = match mode {
                Mode::Powerlaw => {
                    let g_fixed = g_fixed.map(|g| parse_float(&g, "g-fixed", ctx.bits)).transpose()?;
                    powerlaw_pipeline(&s, &PowerLawOptions { window, g_fixed }, ctx.bits)?
                }
                Mode::Stretched => {
                    let sigma = sigma.ok_or_else(|| Error::Invalid("stretched mode needs --sigma".into()))?;
                    let sigma = parse_rational(&sigma, "sigma")?;
                    stretched_pipeline(&s, &sigma, &StretchedOptions { mu, window }, ctx.bits)?
                }
            };
            if let Some(e) = &ens {
                rep.extension = Some(ExtensionSummary::from_ensemble(e));
            }
            if bounds {
                match bound_report(&exact, false, ctx.bits) {
                    Ok(b) => rep.bounds = Some(b),
                    Err(e) => rep.diagnostics.push(format!("bounds unavailable: {e}")),
                }
            }
            if let Some(dir) = plot_dir {
                let files = write_plots(&dir, &rep.series, &rep.plots, ctx.sig)?;
                rep.diagnostics.push(format!("{} plot files written to {}", files.len(), dir.display()));
            }
            Ok(render_report(&rep, &ctx))
        }
        Command::Bounds { input, proven, theta, window, plot_dir } => {
            let s = load_series(&input, ctx.bits)?;
            cmd_bounds(&ctx, &s, proven, theta.as_deref(), window, plot_dir.as_deref())
        }
        Command::Extend { input, count, grid, output, series_format } => {
            let s = load_series(&input, ctx.bits)?;
            let (ext, e) = run_extension(&s, &grid, count, ctx.bits)?;
            let body = ensure_newline(export(&ext, series_format.into()));
            let x = ExtensionSummary::from_ensemble(&e);
            let zc = x.critical_point.as_ref().map(|z| (fmt_float(&z.mean, ctx.sig), fmt_float(&z.std, 3)));
            match output {
                Some(path) => {
                    fs::write(&path, body)?;
                    Ok(match ctx.format {
                        OutFormat::Json => pretty(&json!({
                            "series": s.name,
                            "output": path.display().to_string(),
                            "predicted": x.predicted,
                            "members": x.members,
                            "accepted": x.accepted,
                            "critical_point": zc.map(|(m, sd)| json!({"mean": m, "std": sd})),
                            "provenance": provenance(&ctx),
                        })),
                        _ => format!(
                            "{} predicted terms from {}/{} approximants written to {}\n",
                            x.predicted,
                            x.accepted,
                            x.members,
                            path.display()
                        ),
                    })
                }
                None => Ok(body),
            }
        }
        Command::Dyck { y, max_n, series_format } => {
            let y = parse_rational(&y, "y")?;
            let s = dyck_series(&y, max_n)?;
            Ok(ensure_newline(export(&s, series_format.into())))
        }
        Command::Export { input, to } => {
            let s = load_series(&input, ctx.bits)?;
            Ok(ensure_newline(export(&s, to.into())))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceCap(_) => ExitCode::from(3),
                Error::Invalid(_) | Error::Parse { .. } | Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
