use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use arclab_core::gf::DEFAULT_MAX_ORDER;
use arclab_core::identity::{run_laplace_suite, run_suite, Lemma, SamplingPolicy, SuiteOutcome};
use arclab_core::io::{census_json, format_arc, parse_arc, parse_matrix, ArcJson};
use arclab_core::search::{max_arc_size, SearchTask};
use arclab_core::{bush_frame, dual_arc, hyperoval, mds_check, nrc, Arc, Error, FieldSpec, MdsVerdict, TangentBundle};

mod suite;

/// Exact computations with arcs of F_q^k.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    h: u32,
    /// Explicit modulus, coefficients low degree first, comma separated.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Debug, Args)]
struct ArcFile {
    /// Matrix text file, or `-` for standard input.
    file: PathBuf,
    /// Modulus override for the field named in the header.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Construction {
    Nrc,
    Hyperoval,
    Frame,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Profile {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Describe GF(p^h).
    Field(FieldArgs),
    /// Print a standard arc.
    Construct {
        #[arg(value_enum)]
        kind: Construction,
        #[command(flatten)]
        field: FieldArgs,
        /// Dimension; ignored for hyperovals.
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Check that every k-subset of the rows is a basis.
    MdsCheck(ArcFile),
    /// Tangent forms and values through a (k-2)-subset, or the full census.
    Tangents {
        #[command(flatten)]
        arc: ArcFile,
        /// Indices of Y, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "census")]
        y: Option<Vec<usize>>,
        #[arg(long)]
        census: bool,
    },
    /// Run one identity suite.
    Verify {
        #[arg(long)]
        lemma: String,
        /// Arc file; not used by the Laplace suite.
        #[arg(long)]
        arc: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        modulus: Option<Vec<u32>>,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Longest Segre product in the transposition and switch suites.
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        /// Field and dimension for the Laplace suite.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        h: u32,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exhaustive search for a largest arc.
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        h: u32,
        #[arg(long)]
        k: usize,
        /// Root at the empty arc instead of the standard frame.
        #[arg(long)]
        naive: bool,
        /// Node budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Count arcs of each size instead of pruning.
        #[arg(long)]
        census: bool,
    },
    /// Print the dual arc.
    Dual(ArcFile),
    /// Run an acceptance profile.
    Suite {
        #[arg(long, value_enum)]
        profile: Profile,
    },
}

/// Exit status plus message for the error stream.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExhausted { .. }) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// Standard output plus whether the verdict is a pass.
struct Output {
    text: String,
    json: Value,
    pass: bool,
}

fn max_order() -> Result<u64, Failure> {
    match std::env::var("ARCLAB_MAX_Q") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("ARCLAB_MAX_Q={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn field_of(args: &FieldArgs) -> Result<FieldSpec, Failure> {
    let max = max_order()?;
    Ok(match &args.modulus {
        Some(m) => {
            if m.len() != args.h as usize + 1 {
                return Err(usage(format!("--modulus needs {} coefficients for h = {}", args.h + 1, args.h)));
            }
            FieldSpec::with_modulus(args.p, m, max)?
        }
        None => FieldSpec::with_limit(args.p, args.h, max)?,
    })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_arc(path: &Path, modulus: Option<&[u32]>) -> Result<Arc, Failure> {
    let text = read_text(path)?;
    parse_arc(&text, modulus, max_order()?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn arc_output(arc: &Arc) -> Output {
    Output { text: format_arc(arc), json: json!(ArcJson::from_arc(arc)), pass: true }
}

fn suite_json(out: &SuiteOutcome) -> Value {
    json!({
        "lemma": out.lemma,
        "configurations": out.configurations.to_string(),
        "exhaustive": out.exhaustive,
        "seed": out.seed,
        "reports": out.reports,
        "summary": out.summary(),
    })
}

fn run(cli: Cli) -> Result<Output, Failure> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().map_err(|e| usage(e.to_string()))?;
    }
    let jobs = cli.jobs.unwrap_or_else(rayon::current_num_threads);
    match cli.command {
        Command::Field(args) => {
            let f = field_of(&args)?;
            let modulus = f.modulus().to_vec();
            let text = format!(
                "GF({}^{}) q={} modulus={}\n",
                f.p(),
                f.h(),
                f.q(),
                modulus.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
            );
            let json = json!({ "p": f.p(), "h": f.h(), "q": f.q(), "modulus": modulus });
            Ok(Output { text, json, pass: true })
        }
        Command::Construct { kind, field, k } => {
            let f = field_of(&field)?;
            let arc = match kind {
                Construction::Nrc => nrc(&f, k)?,
                Construction::Hyperoval => hyperoval(&f)?,
                Construction::Frame => bush_frame(&f, k)?,
            };
            Ok(arc_output(&arc))
        }
        Command::MdsCheck(file) => {
            let text = read_text(&file.file)?;
            let m = parse_matrix(&text, file.modulus.as_deref(), max_order()?)?;
            let verdict = mds_check(&m.field, m.k, &m.points)?;
            let text = match &verdict {
                MdsVerdict::Pass => format!("pass: {} points, every {}-subset is a basis\n", m.points.len(), m.k),
                MdsVerdict::Fail { witness } => format!(
                    "fail: rows {} are dependent\n",
                    witness.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
                ),
            };
            Ok(Output { text, json: json!(verdict), pass: verdict.passed() })
        }
        Command::Tangents { arc, y, census } => {
            let a = load_arc(&arc.file, arc.modulus.as_deref())?;
            if census {
                let json = census_json(&a)?;
                return Ok(Output { text: format!("{json}\n"), json, pass: true });
            }
            let y = y.ok_or_else(|| usage("tangents needs --y or --census"))?;
            let bundle = TangentBundle::new(&a);
            let forms = bundle.tangent_forms(&y)?;
            let mut text = format!("t={}\n", a.t());
            for f in forms.iter() {
                text += &format!("form {}\n", f.codes().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
            }
            let mut values = Vec::new();
            for x in (0..a.len()).filter(|x| !y.contains(x)) {
                let v = bundle.tangent_value_at(&y, x)?;
                text += &format!("T({x})={v}\n");
                values.push(json!({ "point": x, "value": v }));
            }
            let json = json!({
                "t": a.t(),
                "Y": y,
                "forms": forms.iter().map(|f| f.codes()).collect::<Vec<_>>(),
                "values": values,
            });
            Ok(Output { text, json, pass: true })
        }
        Command::Verify { lemma, arc, modulus, exhaustive, samples, seed, max_len, p, h, k } => {
            let lemma: Lemma = lemma.parse().map_err(|e: Error| usage(e.to_string()))?;
            let outcome = if lemma == Lemma::Laplace {
                let p = p.ok_or_else(|| usage("the Laplace suite needs --p and --k"))?;
                let k = k.ok_or_else(|| usage("the Laplace suite needs --p and --k"))?;
                let f = field_of(&FieldArgs { p, h, modulus })?;
                run_laplace_suite(&f, k, samples.unwrap_or(1000), seed)?
            } else {
                let path = arc.ok_or_else(|| usage(format!("the {lemma} suite needs --arc")))?;
                let a = load_arc(&path, modulus.as_deref())?;
                let mut policy = match (exhaustive, samples) {
                    (true, _) => SamplingPolicy::exhaustive(),
                    (false, Some(n)) => SamplingPolicy::sampled(n, seed),
                    (false, None) => SamplingPolicy { seed, ..Default::default() },
                };
                policy.max_segre_len = max_len;
                let bundle = TangentBundle::new(&a);
                run_suite(&bundle, lemma, &policy)?
            };
            let reports = serde_json::to_string(&outcome.reports).expect("reports serialize");
            let text = format!("{reports}\n{}\n", outcome.summary());
            Ok(Output { text, json: suite_json(&outcome), pass: outcome.all_passed() })
        }
        Command::Search { p, h, k, naive, budget, time_limit, census } => {
            let f = field_of(&FieldArgs { p, h, modulus: None })?;
            let mut task = SearchTask::new(f, k).jobs(jobs);
            if naive {
                task = task.naive();
            }
            if census {
                task = task.census();
            }
            if let Some(b) = budget {
                task = task.node_budget(b);
            }
            if let Some(s) = time_limit {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(usage("--time-limit must be a positive number of seconds"));
                }
                task = task.time_budget(Duration::from_secs_f64(s));
            }
            let out = max_arc_size(&task)?;
            let stats = json!({ "nodes": out.nodes, "elapsed": out.elapsed.as_secs_f64() });
            let mut text = format!("max={}\n{}{stats}\n", out.size, format_arc(&out.witness));
            if let Some(c) = &out.census {
                text += &format!("census={}\n", json!(c));
            }
            let json = json!({
                "max": out.size,
                "witness": ArcJson::from_arc(&out.witness),
                "nodes": out.nodes,
                "elapsed": out.elapsed.as_secs_f64(),
                "census": out.census,
            });
            Ok(Output { text, json, pass: true })
        }
        Command::Dual(file) => {
            let a = load_arc(&file.file, file.modulus.as_deref())?;
            Ok(arc_output(&dual_arc(&a)?))
        }
        Command::Suite { profile } => {
            let report = suite::run(matches!(profile, Profile::Full))?;
            Ok(Output { text: report.text(), json: report.json(), pass: report.pass() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_mode = cli.json;
    match run(cli) {
        Ok(out) => {
            if json_mode {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("arclab: {}", f.message);
            if json_mode {
                println!("{}", json!({ "error": f.message, "exit": f.code }));
            }
            ExitCode::from(f.code)
        }
    }
}
