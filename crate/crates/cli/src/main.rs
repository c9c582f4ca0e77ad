use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use modsn_core::frontend::{corpus, corpus_names, parse_term, CheckConfig, CheckStrategy, Format, Manifest, SplitChoice, SplitDirective};
use modsn_core::labelling::Lab;
use modsn_core::modular::{a_with_projections, emit_fo_trs, split_fo_ho, SplitSpec};
use modsn_core::rewrite::{Rewriter, Strategy};
use modsn_core::schema::{Clause5, SubtermVariant};
use modsn_core::parse_manifest;

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "modsn", version, about = "Termination checker for second-order computation systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Gs,
    Modular,
    Oracle,
    Loop,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubtermArg {
    Stable,
    Structural,
}

#[derive(Clone, Copy, ValueEnum)]
enum Clause5Arg {
    Lex,
    Multiset,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Auto,
    Manifest,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionArg {
    Outermost,
    Innermost,
}

#[derive(Subcommand)]
enum Command {
    /// Decide termination: exit 0 YES, 1 NO, 2 MAYBE, 3 error.
    Check {
        /// Input file, or the name of a bundled system.
        file: String,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
        #[arg(long, value_enum)]
        subterm: Option<SubtermArg>,
        #[arg(long, value_enum)]
        clause5: Option<Clause5Arg>,
        /// Coefficient bound, or `C,K` for coefficients and constants.
        #[arg(long)]
        weights_bound: Option<String>,
        #[arg(long)]
        oracle_depth: Option<usize>,
        #[arg(long, value_enum)]
        split: Option<SplitArg>,
        #[arg(long, value_enum, default_value = "human")]
        format: FormatArg,
        /// First-order prover run on the A+Proj rules.
        #[arg(long)]
        external_fo: Option<String>,
    },
    /// Rewrite a term to normal form.
    Normalize {
        file: String,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long, value_enum, default_value = "outermost")]
        reduction: ReductionArg,
    },
    /// Print the trace of a term under the file's split.
    Trace {
        file: String,
        #[arg(long)]
        term: String,
    },
    /// Check the labelled simulation of every step from left-hand side instances.
    SimulateLabelling {
        file: String,
        #[arg(long, default_value_t = 2)]
        seed_depth: usize,
    },
    /// Print the A+Proj rules in the first-order exchange format.
    EmitFo { file: String },
    /// List the bundled systems.
    List,
}

fn load(file: &str) -> Result<Manifest, String> {
    let text = if Path::new(file).exists() {
        std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?
    } else if let Some(t) = corpus(file) {
        t.to_string()
    } else {
        return Err(format!("{file}: no such file or bundled system (bundled: {})", corpus_names().join(", ")));
    };
    parse_manifest(&text).map_err(|e| format!("{file}:{e}"))
}

fn parse_bound(s: &str) -> Result<(u64, u64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<u64>().map_err(|_| format!("invalid weights bound '{s}'"));
    match parts.as_slice() {
        [c] => Ok((num(c)?, num(c)?)),
        [c, k] => Ok((num(c)?, num(k)?)),
        _ => Err(format!("invalid weights bound '{s}'")),
    }
}

/// The file's split, or the first-order split when none is declared.
fn split_of(m: &Manifest) -> Result<SplitSpec, String> {
    match &m.split {
        Some(SplitDirective::Explicit { a, b }) => SplitSpec::from_rule_names(&m.system, a, b).map_err(|e| e.to_string()),
        _ => Ok(split_fo_ho(&m.system)),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Check { file, strategy, subterm, clause5, weights_bound, oracle_depth, split, format, external_fo } => {
            let m = load(&file)?;
            let config = CheckConfig {
                strategy: match strategy {
                    StrategyArg::Auto => CheckStrategy::Auto,
                    StrategyArg::Gs => CheckStrategy::Gs,
                    StrategyArg::Modular => CheckStrategy::Modular,
                    StrategyArg::Oracle => CheckStrategy::Oracle,
                    StrategyArg::Loop => CheckStrategy::Loop,
                },
                subterm: subterm.map(|s| match s {
                    SubtermArg::Stable => SubtermVariant::Stable,
                    SubtermArg::Structural => SubtermVariant::Structural,
                }),
                clause5: clause5.map(|c| match c {
                    Clause5Arg::Lex => Clause5::Lex,
                    Clause5Arg::Multiset => Clause5::Multiset,
                }),
                type_order: None,
                weights_bound: weights_bound.as_deref().map(parse_bound).transpose()?,
                oracle_depth,
                split: split.map(|s| match s {
                    SplitArg::Auto => SplitChoice::Auto,
                    SplitArg::Manifest => SplitChoice::Manifest,
                }),
                external_fo,
            };
            let report = modsn_core::frontend::run_check_with(&m, &config);
            let fmt = match format {
                FormatArg::Human => Format::Human,
                FormatArg::Machine => Format::Machine,
            };
            print!("{}", report.emit(fmt));
            Ok(report.verdict.exit_code() as u8)
        }
        Command::Normalize { file, term, fuel, reduction } => {
            let m = load(&file)?;
            let t = parse_term(&m.system.signature, &term).map_err(|e| format!("--term: {e}"))?;
            let strategy = match reduction {
                ReductionArg::Outermost => Strategy::Outermost,
                ReductionArg::Innermost => Strategy::Innermost,
            };
            match Rewriter::new(&m.system).normalize(&t, fuel, strategy) {
                Ok(n) => {
                    println!("{}", n.term);
                    println!("steps: {}", n.steps);
                    Ok(0)
                }
                Err(e) => Err(format!("{e}; last term {}", e.last)),
            }
        }
        Command::Trace { file, term } => {
            let m = load(&file)?;
            let split = split_of(&m)?;
            let t = parse_term(&m.system.signature, &term).map_err(|e| format!("--term: {e}"))?;
            let lab = Lab::new(&m.system, &split);
            let tr = lab.trace(&t).map_err(|e| e.to_string())?;
            println!("{tr}");
            Ok(0)
        }
        Command::SimulateLabelling { file, seed_depth } => {
            let m = load(&file)?;
            let split = split_of(&m)?;
            let lab = Lab::new(&m.system, &split);
            let rw = Rewriter::new(&m.system);
            let seeds = modsn_core::frontend::seeds(&m.system, seed_depth);
            let (mut ok, mut failed) = (0usize, 0usize);
            for s in &seeds {
                for u in rw.reducts(s) {
                    let good = match lab.simulation_check(s, &u) {
                        Ok(sim) => lab.replay(&sim).unwrap_or(false),
                        Err(e) => {
                            println!("FAIL {s} -> {u}: {e}");
                            false
                        }
                    };
                    if good {
                        ok += 1;
                    } else {
                        failed += 1;
                    }
                }
            }
            println!("seeds: {}", seeds.len());
            println!("steps simulated: {ok}");
            println!("failures: {failed}");
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::EmitFo { file } => {
            let m = load(&file)?;
            let split = split_of(&m)?;
            let a = a_with_projections(&m.system, &split)?;
            print!("{}", emit_fo_trs(&a.rules).map_err(|e| e.to_string())?);
            Ok(0)
        }
        Command::List => {
            for n in corpus_names() {
                println!("{n}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
