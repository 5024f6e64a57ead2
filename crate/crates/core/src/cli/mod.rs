//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit code: 0 when everything holds, 1 when a checked
//! property fails, 2 on usage or input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::axioms::{self, AxiomError, AxiomReport, PairScope};
use crate::derive::{
    derive, derive_variants, pip_adjust, ArcPolicy, ArcRule, DerivationReport, InterventionalFamily, Mode,
};
use crate::dist::JointTable;
use crate::graph::{Bdmg, Criterion};
use crate::scm::Scm;
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Dot,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "causal-axioms",
    version,
    about = "Causal graphs from interventional families"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// write to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the causal graph of a family.
    Derive {
        family: PathBuf,
        #[arg(long, default_value = "iterative")]
        mode: Mode,
        #[arg(long, default_value = "standard")]
        arc_rule: ArcRule,
        #[arg(long, default_value = "every_i")]
        arc_policy: ArcPolicy,
        #[arg(long)]
        pip_adjust: bool,
    },
    /// Check axioms of a family against an observational distribution.
    Check {
        family: PathBuf,
        #[arg(long)]
        p: Option<PathBuf>,
        /// comma separated: A2,A3,A4,A4_identity,A5,A5_all_pairs,compatible,edge_cause,congruent,reconstruct
        #[arg(long, value_delimiter = ',', required = true)]
        axioms: Vec<String>,
        /// graph for edge_cause
        #[arg(long)]
        graph: Option<PathBuf>,
        /// second family for congruent
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Decide a separation statement.
    Separate {
        graph: PathBuf,
        #[arg(long, default_value = "sigma")]
        criterion: Criterion,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<String>,
    },
    /// Print the acyclification of a graph.
    Acyclify { graph: PathBuf },
    /// Simulate an SCM exactly.
    Scm {
        scm: PathBuf,
        #[arg(long, conflicts_with_all = ["family", "intervene"])]
        joint: bool,
        #[arg(long, conflicts_with = "intervene")]
        family: bool,
        /// `node=table.json`, repeatable, with --family
        #[arg(long = "override", requires = "family")]
        overrides: Vec<String>,
        #[arg(long, requires = "dist")]
        intervene: Option<String>,
        #[arg(long, requires = "intervene")]
        dist: Option<PathBuf>,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    /// input error that still carries a machine-readable report
    Report(String, String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Output {
    body: String,
    ok: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_family(path: &Path) -> Result<InterventionalFamily, Failure> {
    InterventionalFamily::from_json(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Bdmg, Failure> {
    Bdmg::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_table(path: &Path) -> Result<JointTable, Failure> {
    JointTable::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn graph_text(g: &Bdmg) -> String {
    let mut out = format!("nodes: {}\n", g.names().join(" "));
    for (a, b) in g.arrows() {
        let _ = writeln!(out, "{} -> {}", g.name(a), g.name(b));
    }
    for (a, b) in g.arcs() {
        let _ = writeln!(out, "{} <-> {}", g.name(a), g.name(b));
    }
    out
}

fn graph_out(g: &Bdmg, name: &str, format: Format) -> String {
    match format {
        Format::Json => g.to_json() + "\n",
        Format::Dot => g.to_dot(name),
        Format::Text => graph_text(g),
    }
}

fn json_line(v: &Value) -> String {
    serde_json::to_string(v).expect("value serializes") + "\n"
}

fn cmd_derive(
    path: &Path,
    mode: Mode,
    rule: ArcRule,
    policy: ArcPolicy,
    adjust: bool,
    format: Format,
) -> Result<Output, Failure> {
    let fam = load_family(path)?;
    let d = derive(&fam, mode)?;
    let g = derive_variants(&fam, &d, rule, policy)?;
    let mut report = DerivationReport::new(&d);
    report.g = g.to_json_value();
    let mut adj = None;
    if adjust {
        let a = pip_adjust(&fam, &d);
        report = report.with_pip(&d, &a);
        adj = Some(a);
    }
    let body = match format {
        Format::Json => report.to_json() + "\n",
        Format::Dot => {
            let shown = adj.as_ref().map(|a| &a.graph).unwrap_or(&g);
            let mut out = shown.to_dot("G");
            for (i, gi) in d.g_i.iter().enumerate() {
                out.push_str(&gi.to_dot(&format!("G_{}", fam.roster()[i])));
            }
            out
        }
        Format::Text => {
            let mut out = format!("rounds: {}\n", d.rounds);
            out.push_str(&graph_text(adj.as_ref().map(|a| &a.graph).unwrap_or(&g)));
            if let Some(a) = &adj {
                for (x, y) in a.unresolved_pairs() {
                    let _ = writeln!(out, "unresolved: {} {}", fam.roster()[x], fam.roster()[y]);
                }
            }
            out
        }
    };
    Ok(Output { body, ok: true })
}

fn axiom_report(r: Result<AxiomReport, AxiomError>) -> Result<Value, Failure> {
    match r {
        Ok(r) => Ok(serde_json::to_value(r)?),
        // incompatibility is a property failure, reported like one
        Err(AxiomError::Incompatible(r)) => Ok(serde_json::to_value(*r)?),
        Err(e) => Err(Failure::Usage(e.to_string())),
    }
}

fn cmd_check(
    family: &Path,
    p: Option<&Path>,
    names: &[String],
    graph: Option<&Path>,
    other: Option<&Path>,
) -> Result<Output, Failure> {
    const NEEDS_P: [&str; 7] = [
        "A2",
        "A3",
        "A4",
        "A4_identity",
        "A5",
        "A5_all_pairs",
        "compatible",
    ];
    for name in names {
        let known = NEEDS_P.contains(&name.as_str())
            || ["edge_cause", "congruent", "reconstruct"].contains(&name.as_str());
        if !known {
            return Err(Failure::Usage(format!("unknown axiom `{name}`")));
        }
        if NEEDS_P.contains(&name.as_str()) && p.is_none() {
            return Err(Failure::Usage(format!("{name} needs --p")));
        }
        if name == "edge_cause" && graph.is_none() {
            return Err(Failure::Usage("edge_cause needs --graph".into()));
        }
        if name == "congruent" && other.is_none() {
            return Err(Failure::Usage("congruent needs --other".into()));
        }
    }
    let fam = load_family(family)?;
    let p = p.map(load_table).transpose()?;
    let mut reports = Vec::new();
    for name in names {
        let v = match name.as_str() {
            "A2" => axiom_report(axioms::check_observable(&fam, p.as_ref().unwrap()))?,
            "A3" => axiom_report(axioms::check_strongly_observable(&fam, p.as_ref().unwrap()))?,
            "A4" => axiom_report(axioms::check_quantifiable(&fam, p.as_ref().unwrap()))?,
            "A4_identity" => axiom_report(axioms::check_cause_identity(&fam, p.as_ref().unwrap()))?,
            "A5" => axiom_report(axioms::check_bivariate_quantifiable(
                &fam,
                p.as_ref().unwrap(),
                PairScope::Axiom,
            ))?,
            "A5_all_pairs" => axiom_report(axioms::check_bivariate_quantifiable(
                &fam,
                p.as_ref().unwrap(),
                PairScope::AllPairs,
            ))?,
            "compatible" => axiom_report(axioms::check_compatible(&fam, p.as_ref().unwrap()))?,
            "edge_cause" => axiom_report(axioms::check_edge_cause(&fam, &load_graph(graph.unwrap())?))?,
            "congruent" => axiom_report(axioms::check_congruent(&fam, &load_family(other.unwrap())?))?,
            _ => {
                let d = derive(&fam, Mode::Iterative)?;
                let r = axioms::reconstruct_p(&fam, &d, p.as_ref())?;
                json!({
                    "axiom": "reconstruct",
                    "holds": r.matches.unwrap_or(true),
                    "matches": r.matches,
                    "mismatched_cells": r.mismatched_cells,
                    "reference_composition": r.reference_composition,
                    "sources": r.sources.iter().map(|&i| fam.roster()[i].clone()).collect::<Vec<_>>(),
                    "table": r.table.to_json_value(),
                })
            }
        };
        reports.push(v);
    }
    let ok = reports.iter().all(|r| r["holds"] == Value::Bool(true));
    let body = json_line(&json!({ "holds": ok, "reports": reports }));
    Ok(Output { body, ok })
}

fn cmd_separate(
    path: &Path,
    criterion: Criterion,
    a: &[String],
    b: &[String],
    c: &[String],
    format: Format,
) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let (sa, sb, sc) = (g.node_set(a)?, g.node_set(b)?, g.node_set(c)?);
    let separated = g.separated(sa, sb, sc, criterion)?;
    let path = if separated {
        None
    } else {
        g.connecting_path(sa, sb, sc, criterion)?.map(|p| p.render(&g))
    };
    let verdict = if separated { "separated" } else { "connected" };
    let body = match format {
        Format::Text => match &path {
            Some(p) => format!("{verdict}\n{p}\n"),
            None => format!("{verdict}\n"),
        },
        _ => json_line(&json!({
            "criterion": criterion.to_string(),
            "path": path,
            "separated": separated,
            "verdict": verdict,
        })),
    };
    Ok(Output { body, ok: true })
}

fn scm_node(scm: &Scm, name: &str) -> Result<usize, Failure> {
    Ok(scm.graph().index_of(name)?)
}

fn cmd_scm(
    path: &Path,
    joint: bool,
    family: bool,
    overrides: &[String],
    intervene: Option<&str>,
    dist: Option<&Path>,
) -> Result<Output, Failure> {
    let scm = Scm::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let report = scm.validate();
    if !report.valid {
        let text = serde_json::to_string(&report)? + "\n";
        return Err(Failure::Report(
            text,
            format!("invalid SCM: {}", report.violations.join("; ")),
        ));
    }
    let body = if family {
        let mut map = BTreeMap::new();
        for o in overrides {
            let (node, file) = o
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("override `{o}` is not node=table.json")))?;
            map.insert(scm_node(&scm, node)?, load_table(Path::new(file))?);
        }
        scm.standard_family(&map)?.to_json() + "\n"
    } else if let Some(node) = intervene {
        let i = scm_node(&scm, node)?;
        let repl = load_table(dist.expect("clap requires --dist"))?;
        scm.intervene_standard(i, &repl)?.joint()?.to_json() + "\n"
    } else if joint {
        scm.joint()?.to_json() + "\n"
    } else {
        return Err(Failure::Usage(
            "scm needs one of --joint, --family, --intervene".into(),
        ));
    };
    Ok(Output { body, ok: true })
}

fn cmd_verify(suite: Suite, seed: u64, budget: usize) -> Result<Output, Failure> {
    let r = run_suite(suite.name(), seed, budget)?;
    Ok(Output {
        body: r.to_json() + "\n",
        ok: r.passed(),
    })
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Derive {
            family,
            mode,
            arc_rule,
            arc_policy,
            pip_adjust,
        } => cmd_derive(family, *mode, *arc_rule, *arc_policy, *pip_adjust, cli.format),
        Command::Check {
            family,
            p,
            axioms,
            graph,
            other,
        } => cmd_check(family, p.as_deref(), axioms, graph.as_deref(), other.as_deref()),
        Command::Separate {
            graph,
            criterion,
            a,
            b,
            c,
        } => cmd_separate(graph, *criterion, a, b, c, cli.format),
        Command::Acyclify { graph } => {
            let g = load_graph(graph)?;
            Ok(Output {
                body: graph_out(&g.acyclify(), "acyclified", cli.format),
                ok: true,
            })
        }
        Command::Scm {
            scm,
            joint,
            family,
            overrides,
            intervene,
            dist,
        } => cmd_scm(
            scm,
            *joint,
            *family,
            overrides,
            intervene.as_deref(),
            dist.as_deref(),
        ),
        Command::Verify { suite, budget } => cmd_verify(*suite, cli.seed, *budget),
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), String> {
    match &cli.output {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(out) => match emit(&cli, &out.body) {
            Ok(()) if out.ok => EXIT_OK,
            Ok(()) => EXIT_FAILED,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Report(body, msg)) => {
            let _ = emit(&cli, &body);
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}
