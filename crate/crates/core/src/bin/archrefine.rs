use std::path::{Path, PathBuf};
use std::process::ExitCode;

use archrefine::calculus::{render_counterexample, CheckConfig, Mode};
use archrefine::model::System;
use archrefine::scriptio::{self, corpus, FormatError};
use archrefine::semantics::{denotation_table, system_refines};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "archrefine", version, about = "Check, run and render information-flow architectures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    StructuralFirst,
    Enumerative,
    Assumed,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::StructuralFirst => Mode::StructuralFirst,
            ModeArg::Enumerative => Mode::Enumerative,
            ModeArg::Assumed => Mode::Assumed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an architecture and check its consistency.
    Check { file: PathBuf },
    /// Print the black-box denotation over all bounded inputs.
    Semantics {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        bound: usize,
    },
    /// Run a refinement script and print its report.
    Apply {
        file: PathBuf,
        script: PathBuf,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        bound: usize,
        #[arg(long, value_enum, default_value = "structural-first")]
        mode: ModeArg,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check that NEW refines OLD.
    Verify {
        old: PathBuf,
        new: PathBuf,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        bound: usize,
    },
    /// Emit a Graphviz diagram.
    Render {
        file: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

/// Reads a file, falling back to the built-in corpus for bare corpus names.
fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).or_else(|e| {
        let name = path.to_string_lossy();
        corpus::get(&name)
            .map(str::to_string)
            .ok_or(FormatError::Io { path: name.into_owned(), message: e.to_string() })
    })
}

fn loader(base: &Path) -> impl Fn(&str) -> Result<System, String> + '_ {
    move |p: &str| {
        let path = base.join(p);
        if path.exists() {
            scriptio::load_architecture(&path).map_err(|e| e.to_string())
        } else {
            corpus::loader(p)
        }
    }
}

fn architecture(path: &Path) -> Result<System, FormatError> {
    let text = read(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let load = loader(&base);
    scriptio::parse_architecture_with(&text, &load)
}

fn invalid(path: &Path, e: FormatError) -> ExitCode {
    match &e {
        FormatError::Io { .. } => eprintln!("{e}"),
        _ => {
            for d in e.diagnostics() {
                eprintln!("{}:{d}", path.display());
            }
        }
    }
    ExitCode::from(2)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), ExitCode> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("cannot write `{}`: {e}", p.display());
            ExitCode::from(2)
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Check { file } => {
            let s = architecture(&file).map_err(|e| invalid(&file, e))?;
            println!(
                "{}: consistent, {} components, {} channels",
                s.name,
                s.components.len(),
                s.channels().len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Semantics { file, horizon, bound } => {
            let s = architecture(&file).map_err(|e| invalid(&file, e))?;
            let table = denotation_table(&s, s.bounds(horizon, bound)).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(2)
            })?;
            println!("# black box of {} up to H={horizon}, B={bound}", s.name);
            for (input, outputs) in &table.entries {
                println!("{}", s.alphabet.render_tuple(input));
                for o in outputs {
                    println!("  -> {}", s.alphabet.render_tuple(o));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Apply { file, script, horizon, bound, mode, report } => {
            let s = architecture(&file).map_err(|e| invalid(&file, e))?;
            let text = read(&script).map_err(|e| invalid(&script, e))?;
            let doc = scriptio::parse_script(&text).map_err(|e| invalid(&script, e))?;
            let base = script.parent().map(Path::to_path_buf).unwrap_or_default();
            let config = CheckConfig::new(horizon, bound, mode.into());
            let load = loader(&base);
            let result = scriptio::run_script(&s, &doc, &config, &load);
            write_or_print(report.as_deref(), &result.render())?;
            if report.is_some() {
                println!("verdict={}", result.verdict.keyword());
            }
            Ok(ExitCode::from(result.exit_code() as u8))
        }
        Command::Verify { old, new, horizon, bound } => {
            let a = architecture(&old).map_err(|e| invalid(&old, e))?;
            let b = architecture(&new).map_err(|e| invalid(&new, e))?;
            let verdict = match system_refines(&a, &b, a.bounds(horizon, bound)) {
                Ok(v) => v,
                Err(e) => {
                    println!("refinement fails: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            if let Some(cex) = &verdict.counterexample {
                println!("refinement fails: {}", render_counterexample(&a.alphabet, cex));
                return Ok(ExitCode::from(1));
            }
            println!("refines up to H={horizon}, B={bound}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { file, o } => {
            let s = architecture(&file).map_err(|e| invalid(&file, e))?;
            write_or_print(o.as_deref(), &scriptio::render_dot(&s))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse()).unwrap_or_else(|code| code)
}
