//! `eberlein`: batch front end for semi-measure computations.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eberlein_core::corpus::{self, CorpusObject};
use eberlein_core::semimeasure::DEFAULT_SEED;
use eberlein_core::{
    density_class_check, fb_series, fb_via_averaging, generalized_eberlein, intertwining_check, measure_probe,
    translation_bounded_probe, CompactSet, GroupSpec, K2Function, Point, ProbeReport, UnitBallBattery,
    VanHoveSequence,
};
use io::{emit_json, load_function, load_measure, load_semimeasure, write_csv, CliError, CliResult, Meta};

#[derive(Parser)]
#[command(name = "eberlein", version, about = "Semi-measures on concrete abelian groups")]
struct Cli {
    /// Battery seed; overrides EBERLEIN_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier transform of a measure on a finite group, or the semi-measure
    /// of a dual measure.
    Transform(TransformArgs),
    /// Split a semi-measure into strong, null-ac and null-sc parts.
    Decompose(DecomposeArgs),
    /// Fourier–Bohr series with an averaging cross-check.
    Fb(FbArgs),
    /// Sample `ϑ*f` over the window.
    Convolve(ConvolveArgs),
    /// Positive-definiteness report.
    Bochner(InOut),
    #[command(subcommand)]
    Probe(ProbeCommand),
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Args)]
struct InOut {
    input: PathBuf,
    /// Defaults to stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    io: InOut,
    /// Inverse transform.
    #[arg(long, conflicts_with = "from_dual")]
    inverse: bool,
    /// Read the input as a dual measure and write the semi-measure it defines.
    #[arg(long)]
    from_dual: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Part {
    Pp,
    Ac,
    Sc,
}

#[derive(Args)]
struct DecomposeArgs {
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [Part::Pp, Part::Ac, Part::Sc])]
    parts: Vec<Part>,
}

impl std::fmt::Display for Part {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Part::Pp => "pp",
            Part::Ac => "ac",
            Part::Sc => "sc",
        })
    }
}

#[derive(Args)]
struct FbArgs {
    #[command(flatten)]
    io: InOut,
    /// Averaging cross-check trace.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Test function for the cross-check (K2 JSON).
    #[arg(long)]
    function: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    /// Largest accepted relative gap of the cross-check.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
}

#[derive(Args)]
struct ConvolveArgs {
    input: PathBuf,
    /// K2 JSON; defaults to a bump pair at the origin (δ₀ on finite groups).
    #[arg(long)]
    function: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ProbeCommon {
    #[command(flatten)]
    io: InOut,
    /// Neighbourhood half-width `u`; defaults to `min(1, L/4)`.
    #[arg(long)]
    u: Option<f64>,
    /// Trace as `n,scale,value` CSV.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ProbeCommand {
    /// Is the semi-measure a measure?
    Measure {
        #[command(flatten)]
        common: ProbeCommon,
        /// Compact set `a,b`; defaults to `[-u, u]`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        k: Option<Vec<f64>>,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    TranslationBounded {
        #[command(flatten)]
        common: ProbeCommon,
        #[arg(long, default_value_t = 32)]
        size: usize,
    },
    Intertwining {
        #[command(flatten)]
        common: ProbeCommon,
        #[arg(long, default_value_t = 16)]
        size: usize,
    },
    /// `L^p` class of the dual density.
    Density {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    List {
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    Build {
        name: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Real-line window half-width; needs `--step`.
        #[arg(long, requires = "step")]
        half_width: Option<f64>,
        #[arg(long, requires = "half_width")]
        step: Option<f64>,
    },
}

fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("EBERLEIN_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("EBERLEIN_SEED={v:?} is not a u64"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn default_u(g: &GroupSpec) -> f64 {
    if g.is_finite() {
        1.0
    } else {
        (g.half_width() / 4.0).min(1.0)
    }
}

fn default_function(g: &GroupSpec) -> CliResult<K2Function> {
    if g.is_finite() {
        let mut v = vec![eberlein_core::Complex64::new(0.0, 0.0); g.sample_count()];
        v[0] = eberlein_core::Complex64::new(1.0, 0.0);
        return Ok(K2Function::from_finite_values(g, v)?);
    }
    Ok(K2Function::bump_pair(g, 0.0, (g.half_width() / 8.0).min(0.5))?)
}

fn chi_label(chi: &Point) -> String {
    match chi {
        Point::Real(x) => x.to_string(),
        Point::Residues(r) => r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(":"),
    }
}

fn finish_report(report: &ProbeReport, out: Option<&Path>, trace_csv: Option<&Path>, meta: &Meta) -> CliResult<i32> {
    emit_json(out, report, meta)?;
    if let Some(p) = trace_csv {
        write_csv(p, meta, &["n", "scale", "value"], io::trace_rows(&report.trace))?;
    }
    Ok(io::report_exit(report))
}

fn run(cli: Cli) -> CliResult<i32> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Command::Transform(a) => {
            if a.from_dual {
                let sm = load_semimeasure(&a.io.input)?;
                let meta = Meta::new("semimeasure", sm.group()).option("from_dual", true);
                emit_json(a.io.out.as_deref(), &sm, &meta)?;
            } else {
                let mu = load_measure(&a.io.input)?;
                let out = if a.inverse { mu.inverse_fourier_transform()? } else { mu.fourier_transform()? };
                let meta = Meta::new("measure", out.group()).option("inverse", a.inverse);
                emit_json(a.io.out.as_deref(), &out, &meta)?;
            }
            Ok(0)
        }
        Command::Decompose(a) => {
            let sm = load_semimeasure(&a.input)?;
            let parts = generalized_eberlein(&sm)?;
            std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
            for part in &a.parts {
                let piece = match part {
                    Part::Pp => &parts.strong,
                    Part::Ac => &parts.null_ac,
                    Part::Sc => &parts.null_sc,
                };
                let meta = Meta::new("semimeasure", sm.group()).option("part", part).option("parts", &a.parts);
                emit_json(Some(&a.out_dir.join(format!("{part}.json"))), piece, &meta)?;
            }
            Ok(0)
        }
        Command::Fb(a) => {
            let sm = load_semimeasure(&a.io.input)?;
            let g = sm.group().clone();
            let f = match &a.function {
                Some(p) => load_function(p, &g)?,
                None => default_function(&g)?,
            };
            let series = fb_series(&sm);
            let meta = Meta::new("fb_series", &g).option("n_max", a.n_max).option("tol", a.tol);
            emit_json(a.io.out.as_deref(), &series, &meta)?;
            let seq = VanHoveSequence::dyadic(&g, a.n_max)?;
            let mut rows = vec![];
            let mut bad = vec![];
            for e in &series.entries {
                let res = fb_via_averaging(&sm, &f, &e.chi, &seq, a.n_max)?;
                let label = chi_label(&e.chi);
                for p in &res.trace {
                    rows.push(vec![label.clone(), p.n.to_string(), p.scale.to_string(), p.value.to_string()]);
                }
                if !(res.gap <= a.tol * res.target.norm().max(1e-12)) {
                    bad.push(format!("χ = {label}: gap {:.3e} against |target| {:.3e}", res.gap, res.target.norm()));
                }
            }
            if let Some(p) = &a.csv {
                write_csv(p, &meta, &["chi", "n", "radius", "gap"], rows.clone())?;
            }
            if !bad.is_empty() {
                let trace: Vec<String> = rows.iter().map(|r| r.join(",")).collect();
                return Err(CliError::NonConvergence(format!(
                    "averaging cross-check\n{}\ntrace (chi,n,radius,gap):\n{}",
                    bad.join("\n"),
                    trace.join("\n")
                )));
            }
            Ok(0)
        }
        Command::Convolve(a) => {
            let sm = load_semimeasure(&a.input)?;
            let g = sm.group().clone();
            let f = match &a.function {
                Some(p) => load_function(p, &g)?,
                None => default_function(&g)?,
            };
            let conv = sm.convolve(&f)?;
            let meta = Meta::new("convolution", &g).option("function", a.function.as_ref().map(|p| p.display().to_string()));
            write_csv(&a.out, &meta, &["t", "re", "im"], io::function_rows(&conv))?;
            Ok(0)
        }
        Command::Bochner(a) => {
            let sm = load_semimeasure(&a.input)?;
            let report = sm.is_positive_definite(seed)?;
            let meta = Meta::new("probe_report", sm.group()).seed(seed);
            finish_report(&report, a.out.as_deref(), None, &meta)
        }
        Command::Probe(p) => run_probe(p, seed),
        Command::Corpus(CorpusCommand::List { out }) => {
            emit_json(out.as_deref(), corpus::list(), &Meta::without_group("corpus_list"))?;
            Ok(0)
        }
        Command::Corpus(CorpusCommand::Build { name, out, half_width, step }) => {
            let entry = corpus::entry(&name).map_err(|e| CliError::Usage(e.to_string()))?;
            let group = match (half_width, step) {
                (Some(l), Some(h)) => GroupSpec::real_line(l, h)?,
                _ => entry.group.clone(),
            };
            let obj = corpus::build_on(&entry, &group)?;
            match obj {
                CorpusObject::SemiMeasure(sm) => {
                    let meta = Meta::new("semimeasure", &group).option("name", &name).option("params", &entry.params);
                    emit_json(out.as_deref(), &sm, &meta)?;
                }
                CorpusObject::Measure(m) => {
                    let meta = Meta::new("measure", m.group()).option("name", &name).option("params", &entry.params);
                    emit_json(out.as_deref(), &m, &meta)?;
                }
            }
            Ok(0)
        }
    }
}

fn run_probe(cmd: ProbeCommand, seed: u64) -> CliResult<i32> {
    match cmd {
        ProbeCommand::Measure { common, k, n_max } => {
            let sm = load_semimeasure(&common.io.input)?;
            let g = sm.group();
            let u = common.u.unwrap_or_else(|| default_u(g));
            let k = match (g.is_finite(), k) {
                (true, _) => CompactSet::Points((0..g.sample_count()).map(|i| g.residues_of(i)).collect()),
                (false, Some(v)) => CompactSet::Interval([v[0], v[1]]),
                (false, None) => CompactSet::Interval([-u, u]),
            };
            let report = measure_probe(sm.dual_measure(), u, &k, n_max)?;
            let meta = Meta::new("probe_report", g).option("u", u).option("k", &k).option("n_max", n_max);
            finish_report(&report, common.io.out.as_deref(), common.trace_csv.as_deref(), &meta)
        }
        ProbeCommand::TranslationBounded { common, size } => {
            let sm = load_semimeasure(&common.io.input)?;
            let u = common.u.unwrap_or_else(|| default_u(sm.group()));
            let battery = UnitBallBattery::new(sm.group(), u, size, seed)?;
            let report = translation_bounded_probe(&sm, &battery)?;
            let meta = Meta::new("probe_report", sm.group()).option("u", u).option("size", size).seed(seed);
            finish_report(&report, common.io.out.as_deref(), common.trace_csv.as_deref(), &meta)
        }
        ProbeCommand::Intertwining { common, size } => {
            let sm = load_semimeasure(&common.io.input)?;
            let u = common.u.unwrap_or_else(|| default_u(sm.group()));
            let battery = UnitBallBattery::new(sm.group(), u, 2 * size, seed)?;
            let pairs: Vec<_> = battery.functions().chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
            let report = intertwining_check(&sm, &pairs)?;
            let meta = Meta::new("probe_report", sm.group()).option("u", u).option("size", size).seed(seed);
            finish_report(&report, common.io.out.as_deref(), common.trace_csv.as_deref(), &meta)
        }
        ProbeCommand::Density { io, p, trace_csv } => {
            let value = io::read_value(&io.input)?;
            let nu = if value.get("dual_measure").is_some() {
                load_semimeasure(&io.input)?.dual_measure().clone()
            } else {
                io::decode(&io.input, value)?
            };
            let h = nu.ac_density().cloned().ok_or_else(|| CliError::Schema {
                path: io.input.display().to_string(),
                pointer: "/ac_density".into(),
                message: "the density probe needs an absolutely continuous part".into(),
            })?;
            let report = density_class_check(&h, p)?;
            let meta = Meta::new("probe_report", nu.group()).option("p", p);
            finish_report(&report, io.out.as_deref(), trace_csv.as_deref(), &meta)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("eberlein: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
