use std::fs;
use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfix::fixpoint::{boolean_sigma_fixpoint, fixpoint_qk};
use qfix::kripke::{
    frame_report, parse_model_file, random_model, truth_by_world, write_model_file, EnumBounds, ModelGenSpec,
    Requirements,
};
use qfix::report::Report;
use qfix::smorynski::{build_mk, refute_fixpoint, MkSpec};
use qfix::syntax::{normalize_variables, parse_inferring, FixpointTarget, Formula, PredicateSignature};
use qfix::verify::{verify_fixpoint, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "qfix", version, about = "Fixed points in quantified provability logic")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every randomized step; echoed in the output.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Logic {
    /// QK + box^{n+1} false
    QkBot,
    /// QGL, Boolean combinations of Σ-formulas
    QglSigma,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a fixed point, printing every intermediate stage.
    Fixpoint {
        /// Formula text, or @path to read it from a file.
        formula: String,
        #[arg(long, value_enum, default_value_t = Logic::QkBot)]
        logic: Logic,
        /// Height parameter (qk-bot only).
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "p")]
        hole: String,
    },
    /// Evaluate a formula in a model file.
    Check {
        /// Path of a model file.
        model: String,
        formula: String,
        /// Also print the frame report.
        #[arg(long)]
        frame: bool,
    },
    /// Compute A_n and check A_n <-> A(A_n) on models of height at most n.
    VerifyFixpoint {
        formula: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "p")]
        hole: String,
        /// Number of random models.
        #[arg(long, default_value_t = 100)]
        random: usize,
        /// Exhaustive enumeration: largest world count.
        #[arg(long, default_value_t = 2)]
        max_worlds: usize,
        /// Exhaustive enumeration: size of the constant pool.
        #[arg(long, default_value_t = 1)]
        max_domain: usize,
        #[arg(long)]
        no_exhaustive: bool,
        /// World counts of the random models, `lo..hi` or a single number.
        #[arg(long, value_parser = parse_range, default_value = "1..5")]
        worlds: RangeInclusive<usize>,
    },
    /// Search M_0..M_{k_max} for a model refuting b <-> forall u. box (b -> P(u)).
    Refute {
        candidate: String,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    /// Emit a random model file.
    GenModel(GenArgs),
    /// Emit the model file of M_k.
    Mk { k: usize },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_parser = parse_range, default_value = "1..4")]
    worlds: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_range, default_value = "1..2")]
    base: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_range, default_value = "0..1")]
    growth: RangeInclusive<usize>,
    /// Predicate signature, e.g. `P/1,R/2`.
    #[arg(long, value_parser = parse_signature, default_value = "P/1")]
    preds: PredicateSignature,
    #[arg(long, default_value_t = 0.5)]
    truth_density: f64,
    #[arg(long, default_value_t = 0.5)]
    edge_density: f64,
    #[arg(long, default_value_t = 0)]
    min_edges: usize,
    #[arg(long)]
    transitive: bool,
    #[arg(long)]
    irreflexive: bool,
    #[arg(long)]
    max_height: Option<usize>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("`{x}` is not a number"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok(num(lo)?..=num(hi.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            Ok(n..=n)
        }
    }
}

fn parse_signature(s: &str) -> Result<PredicateSignature, String> {
    let mut sig = PredicateSignature::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (name, arity) = item.split_once('/').ok_or_else(|| format!("`{item}` is not NAME/ARITY"))?;
        let arity = arity.parse().map_err(|_| format!("`{arity}` is not an arity"))?;
        sig.declare(name, arity).map_err(|old| format!("{name} declared with arities {old} and {arity}"))?;
    }
    Ok(sig)
}

/// A failed run: reason code and message.
struct Failure {
    code: String,
    message: String,
}

impl Failure {
    fn new(code: &str, message: impl ToString) -> Self {
        Self { code: code.to_string(), message: message.to_string() }
    }
}

macro_rules! coded {
    ($e:expr) => {
        $e.map_err(|e| Failure::new(e.code(), &e))
    };
}

fn read_arg(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Failure::new("io-error", format!("{path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn read_formula(arg: &str) -> Result<Formula, Failure> {
    Ok(coded!(parse_inferring(&read_arg(arg)?))?.0)
}

/// The target, normalized; records the renaming in the report.
fn read_target(arg: &str, hole: &str, r: &mut Report) -> Result<FixpointTarget, Failure> {
    let given = FixpointTarget::new(read_formula(arg)?, hole);
    let t = normalize_variables(&given);
    if t != given {
        r.push("normalized", &t.formula);
    }
    Ok(t)
}

/// Report and exit status of a successful run.
fn run(cli: &Cli) -> Result<(Report, ExitCode), Failure> {
    let mut r = Report::new();
    let mut head = Report::new();
    let name = match &cli.command {
        Command::Fixpoint { .. } => "fixpoint",
        Command::Check { .. } => "check",
        Command::VerifyFixpoint { .. } => "verify-fixpoint",
        Command::Refute { .. } => "refute",
        Command::GenModel(_) => "gen-model",
        Command::Mk { .. } => "mk",
    };
    head.push("command", name);
    let mut status = ExitCode::SUCCESS;
    match &cli.command {
        Command::Fixpoint { formula, logic, n, hole } => {
            let t = read_target(formula, hole, &mut r)?;
            match logic {
                Logic::QkBot => r.extend(coded!(fixpoint_qk(&t, *n))?.report()),
                Logic::QglSigma => r.extend(coded!(boolean_sigma_fixpoint(&t))?.report()),
            };
        }
        Command::Check { model, formula, frame } => {
            let text = fs::read_to_string(model.trim_start_matches('@'))
                .map_err(|e| Failure::new("io-error", format!("{model}: {e}")))?;
            let m = coded!(parse_model_file(&text))?;
            let f = read_formula(formula)?;
            let truth = coded!(truth_by_world(&m, &f))?;
            r.push("formula", &f);
            for (w, t) in truth.iter().enumerate() {
                r.push(format!("world.{w}"), t);
            }
            r.push("valid", truth.iter().all(|&t| t));
            if *frame {
                let fr = frame_report(&m);
                let yn = |b: bool| if b { "yes" } else { "no" };
                r.push("frame.transitive", yn(fr.transitive))
                    .push("frame.irreflexive", yn(fr.irreflexive))
                    .push("frame.conversely_well_founded", yn(fr.conversely_well_founded));
                match (&fr.heights, fr.frame_height) {
                    (Some(hs), Some(h)) => {
                        for (w, h) in hs.iter().enumerate() {
                            r.push(format!("frame.height.{w}"), h);
                        }
                        r.push("frame.frame_height", h);
                    }
                    _ => {
                        r.push("frame.frame_height", "undefined (cycle)");
                    }
                }
                let classes: Vec<String> = fr.classes.iter().map(|c| c.to_string()).collect();
                r.push("frame.classes", if classes.is_empty() { "none".into() } else { classes.join(",") });
            }
        }
        Command::VerifyFixpoint { formula, n, hole, random, max_worlds, max_domain, no_exhaustive, worlds } => {
            let t = read_target(formula, hole, &mut r)?;
            let cfg = VerifyConfig {
                exhaustive: (!no_exhaustive).then(|| EnumBounds::up_to(*max_worlds, *max_domain)),
                random: *random,
                seed: cli.seed,
                generator: ModelGenSpec { world_count: worlds.clone(), ..ModelGenSpec::default() },
            };
            let v = coded!(verify_fixpoint(&t, *n, &cfg))?;
            if !v.passed() {
                status = ExitCode::from(3);
            }
            r.extend(v.report());
        }
        Command::Refute { candidate, k_max } => {
            let b = read_formula(candidate)?;
            let res = coded!(refute_fixpoint(&b, *k_max))?;
            r.extend(res.report());
            if let Some(k) = res.refuted_at {
                let v = &res.table[k];
                r.push("failing_world", v.failing_world.expect("refuted"));
            }
        }
        Command::GenModel(g) => {
            let mut require = Requirements::none();
            require.transitive = g.transitive;
            require.irreflexive = g.irreflexive;
            require.max_height = g.max_height;
            let spec = ModelGenSpec {
                world_count: g.worlds.clone(),
                domain_base_size: g.base.clone(),
                domain_growth: g.growth.clone(),
                signature: g.preds.clone(),
                truth_density: g.truth_density,
                edge_density: g.edge_density,
                min_edges: g.min_edges,
                require,
                seed: cli.seed,
            };
            let m = coded!(random_model(&spec))?;
            push_model(&mut r, &write_model_file(&m));
        }
        Command::Mk { k } => {
            push_model(&mut r, &write_model_file(&build_mk(MkSpec { k: *k })));
        }
    }
    if r.get("seed").is_none() {
        head.push("seed", cli.seed);
    }
    head.extend(r);
    Ok((head, status))
}

fn push_model(r: &mut Report, text: &str) {
    for (i, line) in text.lines().enumerate() {
        r.push(format!("model.{i}"), line);
    }
}

/// Model-emitting commands print a loadable model file in text mode.
fn render(cli: &Cli, r: &Report) -> String {
    match cli.format {
        Format::Machine => r.machine(),
        Format::Text => match cli.command {
            Command::GenModel(_) | Command::Mk { .. } => {
                let mut out = String::new();
                for (k, v) in r.entries() {
                    if k.starts_with("model.") {
                        out.push_str(v);
                        out.push('\n');
                    } else {
                        out.push_str(&format!("# {k}: {v}\n"));
                    }
                }
                out
            }
            _ => r.text(),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, status)) => {
            print!("{}", render(&cli, &report));
            status
        }
        Err(f) => {
            let message = f.message.replace(['\n', '\t'], " ");
            match cli.format {
                Format::Machine => eprintln!("error\t{}\t{message}", f.code),
                Format::Text => eprintln!("error: {}: {message}", f.code),
            }
            ExitCode::FAILURE
        }
    }
}
