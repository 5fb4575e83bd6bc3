//! `stableset`: exact solving, cost-function fitting and verification, Step B
//! solves, floor sweeps and searches over the target size.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use stableset::driver::SweepRun;
use stableset::paramfit::FitConfig;
use stableset::*;

use report::{read_input, Exit, InputError, RunReport, Timings};

#[derive(Debug, Parser)]
#[command(name = "stableset", version, about = "Maximum independent set through fitted separable cost functions")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Concurrent sweep runs; 0 uses every core.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Upward,
    Binary,
}

#[derive(Debug, clap::Args)]
struct StepBFlags {
    /// Accepted |objective − desiredCost| for recognition.
    #[arg(long, default_value_t = 0.0)]
    band: f64,
    /// Add the product cuts as penalties.
    #[arg(long)]
    cuts: bool,
}

impl StepBFlags {
    fn options(&self) -> MinimizeOptions {
        MinimizeOptions { nonlinear_cuts: self.cuts, ..MinimizeOptions::default() }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Independence number and a maximum independent set by branch and bound.
    Exact {
        #[arg(long)]
        graph: PathBuf,
        /// Stop after this many search nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Fit cost-function coefficients (Step A).
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Write the fitted parameters here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check parameters against every row of a fitting model.
    Verify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Minimize over the edge polytope and round (Step B).
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        k: usize,
        /// Floor size; defaults to the parameters' own.
        #[arg(long)]
        w: Option<f64>,
        /// Vertices fixed at one, e.g. "3,7".
        #[arg(long, value_parser = parse_partial, default_value = "")]
        partial: VertexSet,
        #[command(flatten)]
        step_b: StepBFlags,
        /// Write the fractional assignment here, one `j value` line per vertex.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run Step B over a range of floor sizes.
    Sweep {
        #[arg(long)]
        graph: PathBuf,
        /// Fitting template; N is taken from the graph.
        #[arg(long)]
        config: PathBuf,
        /// Transfer these parameters instead of fitting.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Target size; defaults to the template's k.
        #[arg(long)]
        k: Option<usize>,
        /// Floor sizes as lo:hi:step.
        #[arg(long, value_parser = parse_range)]
        w_range: (f64, f64, f64),
        /// Fit afresh at every floor size.
        #[arg(long)]
        refit: bool,
        /// Stop at the first recognized set.
        #[arg(long)]
        first_hit: bool,
        #[command(flatten)]
        step_b: StepBFlags,
    },
    /// Search for the largest confirmable target size.
    Search {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Upward)]
        mode: Mode,
        /// Largest size tried; defaults to N.
        #[arg(long)]
        k_hi: Option<usize>,
        /// Floor sizes tried per size; defaults to the template's floor.
        #[arg(long, value_parser = parse_range)]
        w_range: Option<(f64, f64, f64)>,
        /// Comma-separated eps values; defaults to the template's eps.
        #[arg(long, value_delimiter = ',')]
        eps_ladder: Vec<f64>,
        /// Attempts per size before it is labeled unconfirmed.
        #[arg(long, default_value_t = 20)]
        budget: usize,
        #[command(flatten)]
        step_b: StepBFlags,
    },
    /// Write a seeded random graph in DIMACS format.
    Generate {
        #[arg(long)]
        n: usize,
        /// Edge probability.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected lo:hi:step, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(lo)?, num(hi)?, num(step)?))
}

fn parse_partial(s: &str) -> Result<VertexSet, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn input<T>(r: Result<T, impl std::fmt::Display>, what: &Path) -> Result<T, InputError> {
    r.map_err(|e| InputError(format!("{}: {e}", what.display())))
}

/// Collects inputs and assembles the report of one command.
struct Run {
    inputs: BTreeMap<String, String>,
    lines: Vec<String>,
}

impl Run {
    fn graph(&mut self, path: &Path) -> Result<Graph, InputError> {
        let text = read_input(path, "graph", &mut self.inputs)?;
        let parsed = input(parse_auto(&text), path)?;
        if parsed.duplicates > 0 {
            log::warn!("{}: {} duplicate edge(s) ignored", path.display(), parsed.duplicates);
        }
        Ok(parsed.graph)
    }

    fn config(&mut self, path: &Path) -> Result<FitConfig, InputError> {
        let text = read_input(path, "config", &mut self.inputs)?;
        input(FitConfig::from_kv(&text), path)
    }

    fn params(&mut self, path: &Path) -> Result<CostParams, InputError> {
        let text = read_input(path, "params", &mut self.inputs)?;
        input(CostParams::from_kv(&text), path)
    }

    fn line(&mut self, l: impl Into<String>) {
        self.lines.push(l.into());
    }
}

fn set_text(s: &VertexSet) -> String {
    s.to_vec().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn solve_lines(run: &mut Run, out: &SolveOutcome) {
    if let Some(s) = &out.recognized {
        run.line(format!("set={}", set_text(s)));
    }
    if let Some(a) = &out.assignment {
        run.line(format!("objective={}", a.objective));
        run.line(format!("desired_cost={}", out.desired_cost));
        run.line(format!("fw_gap={:e}", a.fw_gap));
        run.line(format!("iterations={}", a.iterations));
    }
    if let Some(n) = &out.note {
        run.line(format!("note={n}"));
    }
}

fn sweep_source(run: &mut Run, params: Option<&Path>, cfg: FitConfig, refit: bool) -> Result<ParamSource, InputError> {
    Ok(match (params, refit) {
        (Some(p), _) => ParamSource::Transfer(run.params(p)?),
        (None, true) => ParamSource::Refit(cfg),
        (None, false) => ParamSource::FitOnce(cfg),
    })
}

fn sweep_config(range: (f64, f64, f64), step_b: &StepBFlags, jobs: usize) -> SweepConfig {
    let mut s = SweepConfig::new(range.0, range.1, range.2);
    s.opts = step_b.options();
    s.band = step_b.band;
    s.jobs = jobs;
    s
}

/// Runs one command, returning its status word, exit class and payload.
fn execute(cli: &Cli, run: &mut Run) -> anyhow::Result<(String, Exit, serde_json::Value)> {
    match &cli.command {
        Command::Exact { graph, budget } => {
            let g = run.graph(graph)?;
            run.line(format!("n={} edges={}", g.n(), g.edge_count()));
            match exact_mis(&g, *budget) {
                ExactOutcome::Optimal(r) => {
                    anyhow::ensure!(is_independent(&g, &r.witness)?, "exact witness is not independent");
                    run.line(format!("alpha={}", r.alpha));
                    run.line(format!("witness={}", set_text(&r.witness)));
                    Ok(("optimal".into(), Exit::Ok, json!({ "alpha": r.alpha, "witness": r.witness })))
                }
                ExactOutcome::Unknown { incumbent, nodes } => {
                    run.line(format!("incumbent={}", set_text(&incumbent)));
                    run.line(format!("nodes={nodes}"));
                    Ok((
                        "budget-exhausted".into(),
                        Exit::NotConverged,
                        json!({ "incumbent": incumbent, "lower_bound": incumbent.len(), "nodes": nodes }),
                    ))
                }
            }
        }
        Command::Fit { config, out } => {
            let cfg = run.config(config)?;
            let r = input(fit_parameters(&cfg), config)?;
            let (status, exit) = match r.status {
                FitStatus::Optimal => ("optimal", Exit::Ok),
                FitStatus::Infeasible => ("infeasible", Exit::Infeasible),
                FitStatus::Unbounded => ("unbounded", Exit::NotConverged),
                FitStatus::IterationLimit => ("iteration-limit", Exit::NotConverged),
                FitStatus::NumericalFailure => ("numerical-failure", Exit::NotConverged),
                FitStatus::VerificationFailed => ("verification-failed", Exit::Violations),
            };
            run.line(format!("rows={} iterations={} refits={}", r.rows, r.iterations, r.refits));
            if let Some(p) = &r.params {
                for l in p.to_kv().lines() {
                    run.line(format!("param {l}"));
                }
                if let Some(path) = out {
                    std::fs::write(path, p.to_kv()).with_context(|| format!("writing {}", path.display()))?;
                }
            }
            for (name, v) in &r.quantities {
                run.line(format!("quantity {name}={v}"));
            }
            if let Some(c) = &r.curvature {
                run.line(format!("curvature points={} min={:e} at={}", c.points, c.min_value, c.argmin));
            }
            for v in &r.violations {
                run.line(format!("violated row={} value={} required={}", v.row, v.value, v.required));
            }
            Ok((status.into(), exit, serde_json::to_value(&r)?))
        }
        Command::Verify { params, config } => {
            let p = run.params(params)?;
            let cfg = run.config(config)?;
            let v = input(verify_parameters(&p, &cfg), params)?;
            for r in &v {
                run.line(format!("violated row={} value={} required={}", r.row, r.value, r.required));
            }
            run.line(format!("rows_checked={} violations={}", cfg.active_scenarios().len(), v.len()));
            let (status, exit) = if v.is_empty() { ("ok", Exit::Ok) } else { ("violations", Exit::Violations) };
            Ok((status.into(), exit, json!({ "violations": v })))
        }
        Command::Solve { graph, params, k, w, partial, step_b, dump } => {
            let g = run.graph(graph)?;
            let p = run.params(params)?;
            let w = w.unwrap_or(p.w());
            let out = run_two_step(&g, &ParamSource::Transfer(p), *k, w, partial, step_b.band, &step_b.options())
                .map_err(|e| InputError(e.to_string()))?;
            if let Some(s) = &out.recognized {
                anyhow::ensure!(is_independent(&g, s)? && s.len() == *k, "recognized set {s} fails the independence check");
            }
            if let (Some(path), Some(a)) = (dump, &out.assignment) {
                std::fs::write(path, a.dump()).with_context(|| format!("writing {}", path.display()))?;
            }
            solve_lines(run, &out);
            Ok((out.status.to_string(), Exit::of_solve(out.status), serde_json::to_value(&out)?))
        }
        Command::Sweep { graph, config, params, k, w_range, refit, first_hit, step_b } => {
            let g = run.graph(graph)?;
            let cfg = run.config(config)?;
            let k = k.unwrap_or(cfg.k);
            let source = sweep_source(run, params.as_deref(), cfg, *refit)?;
            let mut s = sweep_config(*w_range, step_b, cli.jobs);
            if *first_hit {
                s.stop_mode = StopMode::FirstHit;
            }
            let runs: Vec<SweepRun> = sweep_w(&g, k, &source, &s).map_err(|e| InputError(e.to_string()))?;
            let mut hits = 0;
            for r in &runs {
                run.line(r.trace.to_string());
                if let Some(set) = &r.outcome.recognized {
                    if r.outcome.status == SolveStatus::IntegerFound {
                        anyhow::ensure!(is_independent(&g, set)?, "recognized set {set} fails the independence check");
                        run.line(format!("hit w={} set={}", r.w, set_text(set)));
                        hits += 1;
                    }
                }
            }
            run.line(format!("runs={} hits={hits}", runs.len()));
            let (status, exit) = if hits > 0 { ("confirmed", Exit::Ok) } else { ("unconfirmed", Exit::Unconfirmed) };
            Ok((status.into(), exit, json!({ "k": k, "hits": hits, "runs": runs })))
        }
        Command::Search { graph, config, mode, k_hi, w_range, eps_ladder, budget, step_b } => {
            let g = run.graph(graph)?;
            let cfg = run.config(config)?;
            let range = w_range.unwrap_or((cfg.w(), cfg.w(), 1.0));
            let ladder = if eps_ladder.is_empty() { vec![cfg.eps] } else { eps_ladder.clone() };
            let sc = SearchConfig {
                mode: match mode {
                    Mode::Upward => SearchMode::Upward,
                    Mode::Binary => SearchMode::Binary,
                },
                k_hi: k_hi.unwrap_or(g.n()),
                fit: cfg,
                sweep: sweep_config(range, step_b, cli.jobs),
                eps_ladder: ladder,
                budget: *budget,
            };
            let out = search_k(&g, &sc).map_err(|e| InputError(e.to_string()))?;
            anyhow::ensure!(is_independent(&g, &out.witness)?, "search witness is not independent");
            for t in &out.trace {
                run.line(t.to_string());
            }
            for (k, v) in &out.verdicts {
                run.line(format!("k={k} verdict={v}"));
            }
            run.line(format!("best_k={}", out.best_k));
            run.line(format!("witness={}", set_text(&out.witness)));
            Ok(("confirmed".into(), Exit::Ok, serde_json::to_value(&out)?))
        }
        Command::Generate { n, p, out } => {
            if !(0.0..=1.0).contains(p) {
                return Err(InputError(format!("edge probability {p} is outside [0, 1]")).into());
            }
            let g = random_graph(*n, *p, cli.seed);
            std::fs::write(out, g.to_dimacs()).with_context(|| format!("writing {}", out.display()))?;
            run.line(format!("n={} edges={} seed={}", g.n(), g.edge_count(), cli.seed));
            Ok(("written".into(), Exit::Ok, json!({ "n": g.n(), "edges": g.edge_count(), "seed": cli.seed })))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            e.print().expect("writing clap output");
            return ExitCode::from(if usage { Exit::Usage.code() } else { Exit::Ok.code() });
        }
    };
    let start = Instant::now();
    let mut run = Run { inputs: BTreeMap::new(), lines: Vec::new() };
    let (status, exit, outcome) = match execute(&cli, &mut run) {
        Ok(r) => r,
        Err(e) => {
            let exit = if e.downcast_ref::<InputError>().is_some() { Exit::Usage } else { Exit::Internal };
            eprintln!("error: {e:#}");
            run.lines.clear();
            ("error".into(), exit, json!({ "error": format!("{e:#}") }))
        }
    };
    let report = RunReport {
        command: std::env::args().collect(),
        inputs: run.inputs,
        status,
        exit_code: exit.code(),
        outcome,
        timings: Timings { total_seconds: start.elapsed().as_secs_f64() },
        lines: run.lines,
    };
    match cli.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!("{}", report.render_json()),
    }
    ExitCode::from(exit.code())
}
