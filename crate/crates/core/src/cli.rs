//! Command-line interface: run scenarios, check axiom files, export
//! telemetry, traces, models, and DOT sketches.
//!
//! Exit codes are a stable contract: 0 committed diagnosis (or clean
//! check), 1 configuration or parse error, 2 run completed with no
//! committed theory. Every error is one line on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::agents::{builtin_axioms, run_episode, EpisodeConfig, TopologyGraph};
use crate::hypothesis::{HypothesisGenerator, RemoteGenerator, RuleGenerator};
use crate::kernel::{AxiomSet, KripkeModel};
use crate::sim::{builtin_ids, builtin_scenario, to_csv, ScenarioSpec};
use crate::syntax::{render, AxiomFile};

#[derive(Parser)]
#[command(
    name = "modalguard",
    version,
    about = "Neuro-symbolic fault diagnosis over Kripke belief models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a fault scenario and diagnose its root cause.
    Run(RunOptions),
    /// Parse an axiom file and print each axiom in canonical form.
    CheckAxioms {
        /// Path to the axiom file.
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorKind {
    /// Deterministic rule tables.
    Rule,
    /// Remote language model with rule fallback.
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// timeseries.csv: observed values per tick.
    Csv,
    /// diagnosis.json: verdict, theory, final model, full trace.
    TraceJson,
    /// final_model.json: the committed belief model alone.
    ModelJson,
    /// model.dot: the belief model as a Graphviz digraph.
    Dot,
}

#[derive(Args)]
struct RunOptions {
    /// Built-in scenario id or path to a scenario JSON file.
    #[arg(long)]
    scenario: String,

    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Hypothesis backend.
    #[arg(long, value_enum, default_value_t = GeneratorKind::Rule)]
    generator: GeneratorKind,

    /// Axiom file; defaults to the built-in sector doctrine.
    #[arg(long)]
    axioms: Option<PathBuf>,

    /// Topology file; defaults to the built-in sector layout.
    #[arg(long)]
    topology: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// What to write, comma separated.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_values_t = [OutputFormat::Csv, OutputFormat::TraceJson, OutputFormat::ModelJson]
    )]
    formats: Vec<OutputFormat>,
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(opts) => cmd_run(opts),
        Command::CheckAxioms { path } => cmd_check_axioms(&path),
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    // The single-line contract: collapse any stray newlines.
    let text = message.to_string().replace('\n', " ");
    eprintln!("error: {text}");
    ExitCode::from(1)
}

fn load_scenario(opts: &RunOptions) -> Result<ScenarioSpec, String> {
    let mut spec = if builtin_ids().contains(&opts.scenario.as_str()) {
        builtin_scenario(&opts.scenario).map_err(|e| e.to_string())?
    } else if Path::new(&opts.scenario).exists() {
        let text = fs::read_to_string(&opts.scenario)
            .map_err(|e| format!("cannot read scenario {:?}: {e}", opts.scenario))?;
        ScenarioSpec::from_json_str(&text)
            .map_err(|e| format!("scenario {:?}: {e}", opts.scenario))?
    } else {
        return Err(format!(
            "{:?} is neither a built-in scenario ({}) nor a readable file",
            opts.scenario,
            builtin_ids().join(", ")
        ));
    };
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn load_axioms(path: Option<&Path>) -> Result<AxiomSet, String> {
    match path {
        None => Ok(builtin_axioms()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| format!("cannot read axioms {:?}: {e}", p.display()))?;
            let file =
                AxiomFile::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(file.into_axiom_set())
        }
    }
}

fn load_topology(path: Option<&Path>) -> Result<TopologyGraph, String> {
    match path {
        None => Ok(TopologyGraph::builtin()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| format!("cannot read topology {:?}: {e}", p.display()))?;
            TopologyGraph::from_json_str(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn cmd_run(opts: RunOptions) -> ExitCode {
    let spec = match load_scenario(&opts) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let axioms = match load_axioms(opts.axioms.as_deref()) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let topology = match load_topology(opts.topology.as_deref()) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let mut generator: Box<dyn HypothesisGenerator> = match opts.generator {
        GeneratorKind::Rule => Box::new(RuleGenerator),
        GeneratorKind::Remote => match RemoteGenerator::from_env() {
            Ok(g) => Box::new(g),
            Err(e) => return fail(e),
        },
    };
    if let Err(e) = fs::create_dir_all(&opts.out) {
        return fail(format!("cannot create {:?}: {e}", opts.out.display()));
    }

    let cfg = EpisodeConfig {
        axioms,
        topology,
        monitors: crate::agents::default_monitors(),
        generator: generator.as_mut(),
    };
    let outcome = match run_episode(&spec, cfg) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };

    for format in &opts.formats {
        let (name, contents) = match format {
            OutputFormat::Csv => ("timeseries.csv", to_csv(&outcome.records)),
            OutputFormat::TraceJson => ("diagnosis.json", outcome.diagnosis.to_canonical_json()),
            OutputFormat::ModelJson => (
                "final_model.json",
                outcome.diagnosis.final_model.to_canonical_json(),
            ),
            OutputFormat::Dot => ("model.dot", render_dot(&outcome.diagnosis.final_model)),
        };
        let path = opts.out.join(name);
        if let Err(e) = fs::write(&path, contents) {
            return fail(format!("cannot write {:?}: {e}", path.display()));
        }
    }

    match &outcome.diagnosis.root_cause {
        Some(root) => {
            println!("ROOT CAUSE: {root}");
            ExitCode::SUCCESS
        }
        None => {
            println!("NO COMMITTED DIAGNOSIS");
            ExitCode::from(2)
        }
    }
}

fn cmd_check_axioms(path: &Path) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {:?}: {e}", path.display())),
    };
    match AxiomFile::parse(&text) {
        Ok(file) => {
            for entry in &file.entries {
                println!("{}: {}", entry.label, render(&entry.formula));
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(format!("{}: {e}", path.display())),
    }
}

/// Graphviz rendering of a belief model: worlds as nodes labeled with
/// their valuations, the current world double-circled. Write-only sugar.
pub fn render_dot(model: &KripkeModel) -> String {
    let mut out = String::from("digraph belief {\n  rankdir=LR;\n");
    for (id, valuation) in model.worlds() {
        let props = valuation
            .iter()
            .map(|p| p.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        let shape = if id == model.current() {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!(
            "  \"{id}\" [shape={shape}, label=\"{id}\\n{{{props}}}\"];\n"
        ));
    }
    for (from, to) in model.edges() {
        out.push_str(&format!("  \"{from}\" -> \"{to}\";\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::initial_model;

    #[test]
    fn dot_marks_the_current_world() {
        let dot = render_dot(&initial_model());
        assert!(dot.contains("\"w0\" [shape=doublecircle"));
        assert!(dot.contains("\"w_kly\" [shape=circle"));
        assert!(dot.contains("\"w0\" -> \"w_vac\";"));
        assert!(dot.ends_with("}\n"));
    }
}
