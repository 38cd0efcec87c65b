//! `mmsnp`: normal forms, containment and classification of MMSNP sentences
//! from the command line.
//!
//! Exit codes: 0 on success (or "yes" for `contains` and `check`), 1 for a
//! "no" answer, 2 for unreadable input, failed preconditions and exhausted
//! budgets.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use mmsnp::classify::classify;
use mmsnp::homsearch::model_check;
use mmsnp::normalform::{decompose_connected, is_normal_form, normalize, obstruction_set};
use mmsnp::precolour::{build_chi, standard_precolouration};
use mmsnp::recolour::{contains, strong_normal_form};
use mmsnp::textio::{parse_sentence, parse_structure_in, print_sentence, print_structure};
use mmsnp::model::ClassificationReport;
use mmsnp::{Error, Limits, Sentence};

#[derive(Parser)]
#[command(name = "mmsnp", version, about = "Normal forms, containment and P/NP-complete classification of MMSNP sentences")]
struct Cli {
    #[command(flatten)]
    budget: Budget,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the search budgets; `MMSNP_BUDGET_*` variables are read
/// first.
#[derive(Args)]
struct Budget {
    /// Backtracking nodes per search (also MMSNP_BUDGET_MAX_NODES)
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    /// Clauses a normal-form computation may hold
    #[arg(long, global = true)]
    max_clauses: Option<usize>,
    /// Refinement rounds of one operation-table search
    #[arg(long, global = true)]
    max_cegar_iters: Option<usize>,
    /// Worker threads for directory inputs.
    #[arg(long, global = true, default_value_t = 4)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and pretty-print a sentence.
    Parse { input: PathBuf },
    /// Rewrite into normal form.
    Normalize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite into strong normal form.
    Snf {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split into connected sentences, written as `<stem>_<i>.mmsnp` into
    /// the output directory.
    Decompose {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Strong normal form plus the standard precolouration.
    Precolour {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the coloured obstructions of the normal form.
    Obstructions { input: PathBuf },
    /// Whether every structure satisfying the first sentence satisfies the
    /// second.
    Contains { first: PathBuf, second: PathBuf },
    /// Decide P or NP-complete.
    Classify {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        /// Also print the Siggers table or subfactor and search statistics.
        #[arg(long)]
        explain: bool,
    },
    /// Whether a structure satisfies a sentence; prints a colouring if so.
    Check { structure: PathBuf, sentence: PathBuf },
    /// Build the structure defining a colour to the given depth.
    Chi {
        input: PathBuf,
        #[arg(long)]
        colour: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// What a command produced: text for stdout and the exit status.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

#[derive(Debug)]
enum Failure {
    Io(PathBuf, std::io::Error),
    Lib(PathBuf, Error),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Lib(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn lib<T>(path: &Path, r: mmsnp::Result<T>) -> Run<T> {
    r.map_err(|e| Failure::Lib(path.to_path_buf(), e))
}

fn load(path: &Path) -> Run<Sentence> {
    let text = read(path)?;
    let phi = lib(path, parse_sentence(&text).map_err(Error::from))?;
    let diags = phi.validate();
    if !diags.is_empty() {
        return Err(Failure::Lib(path.to_path_buf(), Error::Invalid(diags)));
    }
    Ok(phi)
}

fn write_or_print(output: Option<&Path>, text: String) -> Run<Outcome> {
    match output {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Failure::Io(p.to_path_buf(), e))?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn report_text(r: &ClassificationReport, explain: bool) -> String {
    let mut out = format!("overall: {}\n", r.overall);
    for (i, c) in r.components.iter().enumerate() {
        out += &format!("component {}: {}\n", i + 1, c.verdict);
        if explain {
            match &c.witness {
                mmsnp::model::Witness::Siggers { colours, table, .. } => {
                    out += &format!("  siggers operation on {{{}}}: {}\n", colours.join(", "), table.join(" "));
                }
                mmsnp::model::Witness::Subfactor(s) => {
                    out += &format!(
                        "  trivial subfactor: rho = {{{}}}, S = {{{}}}, T = {{{}}}\n",
                        s.rho.join(", "),
                        s.s.join(", "),
                        s.t.join(", ")
                    );
                }
            }
            let s = &c.stats;
            out += &format!(
                "  {} colours, {} clauses; siggers search: {} rounds, {} learned clauses; \
                 subfactors: {} candidates, {} searches\n",
                s.colours, s.clauses, s.siggers_iterations, s.siggers_learned, s.subfactor_candidates, s.subfactor_searches
            );
        }
    }
    for c in &r.caveats {
        out += &format!("caveat: {c}\n");
    }
    out
}

/// Runs a single-file command.
fn run_file(cmd: &Command, input: &Path, output: Option<&Path>, limits: &Limits) -> Run<Outcome> {
    match cmd {
        Command::Parse { .. } => Ok(Outcome::ok(print_sentence(&load(input)?))),
        Command::Normalize { .. } => {
            let nf = lib(input, normalize(&load(input)?, limits))?;
            write_or_print(output, print_sentence(&nf))
        }
        Command::Snf { .. } => {
            let snf = lib(input, strong_normal_form(&load(input)?, limits))?;
            write_or_print(output, print_sentence(&snf))
        }
        Command::Precolour { .. } => {
            let snf = lib(input, strong_normal_form(&load(input)?, limits))?;
            let pre = lib(input, standard_precolouration(&snf, limits))?;
            write_or_print(output, print_sentence(&pre))
        }
        Command::Decompose { .. } => {
            let parts = lib(input, decompose_connected(&load(input)?, limits))?;
            match output {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
                    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("part");
                    let mut listing = String::new();
                    for (i, p) in parts.iter().enumerate() {
                        let path = dir.join(format!("{stem}_{}.mmsnp", i + 1));
                        fs::write(&path, print_sentence(p)).map_err(|e| Failure::Io(path.clone(), e))?;
                        listing += &format!("{}\n", path.display());
                    }
                    Ok(Outcome::ok(listing))
                }
                None => {
                    let texts: Vec<String> =
                        parts.iter().enumerate().map(|(i, p)| format!("# component {}\n{}", i + 1, print_sentence(p))).collect();
                    Ok(Outcome::ok(texts.join("\n")))
                }
            }
        }
        Command::Obstructions { .. } => {
            let phi = load(input)?;
            let nf = if is_normal_form(&phi) { phi } else { lib(input, normalize(&phi, limits))? };
            let obs = lib(input, obstruction_set(&nf))?;
            let texts: Vec<String> = obs.structures().iter().map(print_structure).collect();
            Ok(Outcome::ok(texts.join("\n")))
        }
        Command::Classify { json, explain, .. } => {
            let report = lib(input, classify(&load(input)?, limits))?;
            if *json {
                Ok(Outcome::ok(report.to_json() + "\n"))
            } else {
                Ok(Outcome::ok(report_text(&report, *explain)))
            }
        }
        Command::Contains { .. } | Command::Check { .. } | Command::Chi { .. } => unreachable!("not a file command"),
    }
}

fn run(cli: &Cli, limits: &Limits) -> Run<Outcome> {
    match &cli.command {
        Command::Contains { first, second } => {
            let (a, b) = (load(first)?, load(second)?);
            let v = lib(first, contains(&a, &b, limits))?;
            if v.holds {
                let r = v.witness.expect("holds comes with a recolouring");
                Ok(Outcome { text: format!("contained\nrecolouring: {r}\n"), code: 0 })
            } else {
                let mut text = "not contained\n".to_string();
                match v.counterexample {
                    Some(s) => text += &format!("counterexample:\n{}", print_structure(&s)),
                    None => text += "no counterexample within the search budget\n",
                }
                Ok(Outcome { text, code: 1 })
            }
        }
        Command::Check { structure, sentence } => {
            let phi = load(sentence)?;
            let nf = lib(sentence, normalize(&phi, limits))?;
            let text = read(structure)?;
            let a = lib(structure, parse_structure_in(&text, nf.tau(), nf.colours()).map_err(Error::from))?;
            match lib(sentence, model_check(&a, &nf, limits))? {
                Some(colouring) => {
                    let mut out = "satisfies\n".to_string();
                    for (e, c) in colouring.iter().enumerate() {
                        out += &format!("{} {}\n", a.element_name(e), nf.colours()[*c]);
                    }
                    Ok(Outcome { text: out, code: 0 })
                }
                None => Ok(Outcome { text: "does not satisfy\n".into(), code: 1 }),
            }
        }
        Command::Chi { input, colour, depth, output } => {
            let phi = load(input)?;
            let snf = if is_normal_form(&phi) { phi } else { lib(input, strong_normal_form(&phi, limits))? };
            let p = lib(input, build_chi(&snf, colour, *depth, limits))?;
            write_or_print(output.as_deref(), print_structure(&p.structure))
        }
        cmd => {
            let (input, output) = file_args(cmd);
            if input.is_dir() {
                run_dir(cmd, input, output, limits, cli.budget.jobs)
            } else {
                run_file(cmd, input, output, limits)
            }
        }
    }
}

fn file_args(cmd: &Command) -> (&Path, Option<&Path>) {
    match cmd {
        Command::Parse { input } | Command::Obstructions { input } | Command::Classify { input, .. } => (input, None),
        Command::Normalize { input, output }
        | Command::Snf { input, output }
        | Command::Precolour { input, output }
        | Command::Decompose { input, output } => (input, output.as_deref()),
        _ => unreachable!("not a file command"),
    }
}

/// Runs a file command on every `.mmsnp` file of a directory with a small
/// worker pool. With an output directory, results keep their file names.
fn run_dir(cmd: &Command, dir: &Path, output: Option<&Path>, limits: &Limits, jobs: usize) -> Run<Outcome> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::Io(dir.to_path_buf(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mmsnp"))
        .collect();
    files.sort();
    if let Some(out) = output {
        fs::create_dir_all(out).map_err(|e| Failure::Io(out.to_path_buf(), e))?;
    }
    let results: Mutex<Vec<(usize, Run<Outcome>)>> = Mutex::new(Vec::new());
    let next = Mutex::new(0usize);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(files.len().max(1)) {
            s.spawn(|| loop {
                let i = {
                    let mut n = next.lock().expect("unpoisoned");
                    let i = *n;
                    *n += 1;
                    i
                };
                let Some(f) = files.get(i) else { break };
                let target = output.map(|o| match cmd {
                    Command::Decompose { .. } => o.to_path_buf(),
                    _ => o.join(f.file_name().expect("file")),
                });
                let r = run_file(cmd, f, target.as_deref(), limits);
                results.lock().expect("unpoisoned").push((i, r));
            });
        }
    });
    let mut results = results.into_inner().expect("unpoisoned");
    results.sort_by_key(|(i, _)| *i);
    let mut text = String::new();
    let mut code = 0;
    for (i, r) in results {
        text += &format!("== {}\n", files[i].display());
        match r {
            Ok(o) => {
                text += &o.text;
                code = code.max(o.code);
            }
            Err(e) => {
                text += &format!("error: {e}\n");
                code = 2;
            }
        }
    }
    Ok(Outcome { text, code })
}

fn limits(b: &Budget) -> mmsnp::Result<Limits> {
    let mut l = Limits::from_env()?;
    if let Some(v) = b.max_nodes {
        l.max_nodes = v;
    }
    if let Some(v) = b.max_clauses {
        l.max_clauses = v;
    }
    if let Some(v) = b.max_cegar_iters {
        l.max_cegar_iters = v;
    }
    Ok(l)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = match limits(&cli.budget) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &limits) {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(o.text.as_bytes());
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
