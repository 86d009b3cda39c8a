//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::circuit::to_circuit;
use crate::compile::{anneal_order, compile, default_order, CompileOptions, Mode};
use crate::diagram::collapse_savings;
use crate::encode::{dump, encode, Encoding, Lit};
use crate::error::{Error, OrderError};
use crate::infer::Model;
use crate::model::{load_network, Network};
use crate::obdd::{compile_obdd, obdd_order};
use crate::order::{induce_literal_order, LiteralOrdering};

#[derive(Debug, Parser)]
#[command(name = "wpbdd", version, about = "Compile Bayesian networks to WPBDDs and answer queries")]
struct Cli {
    /// Report wall-clock durations on stderr.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    Hybrid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the weighted CNF encoding.
    Encode { net: PathBuf },
    /// Compile and report diagram size.
    Compile {
        net: PathBuf,
        /// topo, anneal, or file:<path> with whitespace-separated variable names.
        #[arg(long, default_value = "topo")]
        order: String,
        #[arg(long)]
        no_collapse: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Hybrid)]
        mode: ModeArg,
        /// Write the canonical diagram text to this file.
        #[arg(long)]
        dump_diagram: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
        /// Seed for --order anneal.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation budget for --order anneal.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Marginal or conditional probabilities.
    Query {
        net: PathBuf,
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        target: Option<String>,
        #[arg(long, value_delimiter = ',')]
        evidence: Vec<String>,
        /// Every value of every variable.
        #[arg(long)]
        all: bool,
    },
    /// WPBDD against OBDD sizes.
    Compare {
        #[arg(required = true)]
        nets: Vec<PathBuf>,
    },
    /// Search for a smaller variable order.
    Anneal {
        net: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<(), Failure>;

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Run with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let mut timer = Timer {
        enabled: cli.timings,
        lines: Vec::new(),
    };
    let result = match cli.command {
        Command::Encode { net } => cmd_encode(&net, out),
        Command::Compile {
            net,
            order,
            no_collapse,
            mode,
            dump_diagram,
            stats,
            seed,
            budget,
        } => {
            let opts = CompileOptions {
                collapse: !no_collapse,
                use_cache: true,
                mode: match mode {
                    ModeArg::Full => Mode::Full,
                    ModeArg::Hybrid => Mode::Hybrid,
                },
            };
            cmd_compile(&net, &order, opts, dump_diagram.as_deref(), stats, (seed, budget), out, &mut timer)
        }
        Command::Query {
            net,
            target,
            evidence,
            all,
        } => cmd_query(&net, target.as_deref(), &evidence, all, out, &mut timer),
        Command::Compare { nets } => cmd_compare(&nets, out),
        Command::Anneal { net, seed, budget } => cmd_anneal(&net, seed, budget as usize, out),
    };
    for line in &timer.lines {
        let _ = writeln!(err, "{line}");
    }
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

struct Timer {
    enabled: bool,
    lines: Vec<String>,
}

impl Timer {
    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let r = f();
        if self.enabled {
            self.lines
                .push(format!("time {label}: {:.3} ms", start.elapsed().as_secs_f64() * 1e3));
        }
        r
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Domain(Error::Io(e))
}

fn read_network(path: &Path) -> Result<Network, Failure> {
    let bytes = std::fs::read(path).map_err(io)?;
    Ok(load_network(&bytes).map_err(Error::from)?)
}

/// Probability with at most twelve decimals, trailing zeros trimmed.
pub fn format_probability(p: f64) -> String {
    let mut s = format!("{p:.12}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.push('0');
    }
    if s == "-0.0" {
        s = "0.0".into();
    }
    s
}

fn cmd_encode(path: &Path, out: &mut dyn Write) -> Outcome {
    let net = read_network(path)?;
    let enc = encode(&net);
    write!(out, "{}", dump(&enc)).map_err(io)
}

fn resolve_order(
    net: &Network,
    enc: &Encoding,
    order_arg: &str,
    anneal_args: (u64, usize),
) -> Result<LiteralOrdering, Failure> {
    match order_arg {
        "topo" => Ok(default_order(net, &enc.theory)),
        "anneal" => {
            if anneal_args.1 == 0 {
                return Err(Failure::Usage("--budget must be at least 1".into()));
            }
            let r = anneal_order(net, anneal_args.0, anneal_args.1).map_err(Error::from)?;
            Ok(LiteralOrdering::from_var_order(&enc.theory, &r.order).map_err(Error::from)?)
        }
        _ => match order_arg.strip_prefix("file:") {
            Some(file) => {
                let text = std::fs::read_to_string(file).map_err(io)?;
                let names: Vec<&str> = text.split_whitespace().collect();
                Ok(induce_literal_order(&enc.theory, &names).map_err(Error::from)?)
            }
            None => Err(Failure::Usage(format!(
                "invalid --order `{order_arg}`: expected topo, anneal or file:<path>"
            ))),
        },
    }
}

fn var_names(enc: &Encoding, ord: &LiteralOrdering) -> String {
    ord.var_order()
        .iter()
        .map(|&v| enc.theory.var_name(v))
        .collect::<Vec<_>>()
        .join(" ")
}

#[allow(clippy::too_many_arguments)]
fn cmd_compile(
    path: &Path,
    order: &str,
    opts: CompileOptions,
    dump_to: Option<&Path>,
    stats: bool,
    anneal_args: (u64, usize),
    out: &mut dyn Write,
    timer: &mut Timer,
) -> Outcome {
    let net = read_network(path)?;
    let enc = encode(&net);
    let ord = resolve_order(&net, &enc, order, anneal_args)?;
    let c = timer
        .time("compile", || compile(&enc.cnf, &enc.theory, &ord, opts))
        .map_err(Error::from)?;
    let ac = to_circuit(&c.store, c.root);
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(io);
    w(out, format!("order: {}", var_names(&enc, &ord)))?;
    w(out, format!("mode: {}", if opts.mode == Mode::Full { "full" } else { "hybrid" }))?;
    w(out, format!("collapse: {}", if opts.collapse { "on" } else { "off" }))?;
    w(out, format!("nodes: {}", c.node_count()))?;
    w(out, format!("operators: {}", ac.operator_count()))?;
    if stats {
        let s = &enc.stats;
        w(out, format!("variables: {}", enc.theory.num_vars()))?;
        w(out, format!("atoms: {}", enc.theory.num_atoms()))?;
        w(out, format!("weighted clauses: {}", s.num_weighted_clauses))?;
        w(out, format!("hard clauses: {}", s.num_hard_clauses))?;
        w(out, format!("theory elided: {}", s.num_theory_clauses_elided))?;
        w(out, format!("weights: {}", s.num_distinct_weights))?;
        w(out, format!("gates: {}", ac.gates().len()))?;
        let other = compile(
            &enc.cnf,
            &enc.theory,
            &ord,
            CompileOptions {
                collapse: !opts.collapse,
                ..opts
            },
        )
        .map_err(Error::from)?;
        let (with, without) = if opts.collapse {
            (c.node_count(), other.node_count())
        } else {
            (other.node_count(), c.node_count())
        };
        w(out, format!("nodes without collapse: {without}"))?;
        w(out, format!("collapse savings: {:.1}%", 100.0 * collapse_savings(without, with)))?;
    }
    if let Some(p) = dump_to {
        std::fs::write(p, c.serialize()).map_err(io)?;
    }
    Ok(())
}

fn parse_pair(s: &str) -> Result<(&str, &str), Failure> {
    match s.split_once('=') {
        Some((v, x)) if !v.is_empty() && !x.is_empty() => Ok((v.trim(), x.trim())),
        _ => Err(Failure::Usage(format!("expected var=value, got `{s}`"))),
    }
}

fn cmd_query(
    path: &Path,
    target: Option<&str>,
    evidence: &[String],
    all: bool,
    out: &mut dyn Write,
    timer: &mut Timer,
) -> Outcome {
    let pairs = evidence.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
    let target = target.map(parse_pair).transpose()?;
    let net = read_network(path)?;
    let model = timer
        .time("compile", || Model::build(&net, CompileOptions::default()))
        .map_err(Error::from)?;
    let th = model.theory();
    let ev_lits: Vec<Lit> = pairs
        .iter()
        .map(|(v, x)| th.atom_of(v, x))
        .collect::<Result<_, _>>()
        .map_err(Error::from)?;
    let suffix = if pairs.is_empty() {
        String::new()
    } else {
        let parts: Vec<String> = pairs.iter().map(|(v, x)| format!("{v}={x}")).collect();
        format!(" | {}", parts.join(","))
    };
    let targets: Vec<(String, String, Lit)> = if all {
        th.all_atoms()
            .map(|a| {
                let (v, x) = th.var_of(a).expect("atom of the theory");
                (v.to_string(), x.to_string(), a)
            })
            .collect()
    } else {
        let (v, x) = target.expect("clap requires --target without --all");
        vec![(v.to_string(), x.to_string(), th.atom_of(v, x).map_err(Error::from)?)]
    };
    let results = timer.time("query", || {
        targets
            .iter()
            .map(|(_, _, a)| model.query(*a, &ev_lits))
            .collect::<Result<Vec<_>, _>>()
    });
    let results = results.map_err(Error::from)?;
    for ((v, x, _), p) in targets.iter().zip(results) {
        writeln!(out, "P({v}={x}{suffix}) = {}", format_probability(p)).map_err(io)?;
    }
    Ok(())
}

fn cmd_compare(paths: &[PathBuf], out: &mut dyn Write) -> Outcome {
    let header = [
        "network", "vars", "clauses", "hard", "elided", "weights", "wpbdd_nodes", "wpbdd_ops", "obdd_nodes",
        "obdd_ops", "nodes_no_collapse", "collapse_savings",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for path in paths {
        let net = read_network(path)?;
        let enc = encode(&net);
        let ord = default_order(&net, &enc.theory);
        let full = CompileOptions {
            mode: Mode::Full,
            ..CompileOptions::default()
        };
        let c = compile(&enc.cnf, &enc.theory, &ord, full).map_err(Error::from)?;
        let plain = compile(
            &enc.cnf,
            &enc.theory,
            &ord,
            CompileOptions {
                collapse: false,
                ..full
            },
        )
        .map_err(Error::from)?;
        let ac = to_circuit(&c.store, c.root);
        let obdd = compile_obdd(&enc.theory, &enc.cnf, obdd_order(&ord, &enc.cnf, &c.stats)).map_err(Error::from)?;
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        rows.push(vec![
            name,
            enc.theory.num_vars().to_string(),
            enc.stats.num_weighted_clauses.to_string(),
            enc.stats.num_hard_clauses.to_string(),
            enc.stats.num_theory_clauses_elided.to_string(),
            enc.stats.num_distinct_weights.to_string(),
            c.node_count().to_string(),
            ac.operator_count().to_string(),
            obdd.node_count().to_string(),
            obdd.operator_count().to_string(),
            plain.node_count().to_string(),
            format!("{:.1}%", 100.0 * collapse_savings(plain.node_count(), c.node_count())),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).map_err(io)?;
    }
    Ok(())
}

fn cmd_anneal(path: &Path, seed: u64, budget: usize, out: &mut dyn Write) -> Outcome {
    let net = read_network(path)?;
    let enc = encode(&net);
    let r = anneal_order(&net, seed, budget).map_err(Error::from)?;
    let names = |order: &[usize]| -> Result<String, OrderError> {
        let ord = LiteralOrdering::from_var_order(&enc.theory, order)?;
        Ok(var_names(&enc, &ord))
    };
    let start = names(&net.topological_order()).map_err(Error::from)?;
    let best = names(&r.order).map_err(Error::from)?;
    writeln!(out, "start order: {start}").map_err(io)?;
    writeln!(out, "start nodes: {}", r.start_cost).map_err(io)?;
    writeln!(out, "best order: {best}").map_err(io)?;
    writeln!(out, "best nodes: {}", r.cost).map_err(io)?;
    writeln!(out, "evaluations: {}", r.evaluations).map_err(io)?;
    Ok(())
}
