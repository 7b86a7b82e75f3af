//! Command line front end: loads programs, runs queries in batch or
//! interactively, and renders models and justification trees.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use slaw::compiler::dual_listing;
use slaw::corpus::parse_program_file;
use slaw::justify::{
    render_code, render_literal, render_term, render_tree_html, render_tree_text, Detail, Mode,
    RenderOptions, Style, VarNamer,
};
use slaw::parser::{parse_query, Query, SourceProgram};
use slaw::solver::{solve, Answer, SolverOptions};
use slaw::{compile, CompiledProgram};

/// Goal-directed answer set reasoning with natural-language
/// justifications, for rule bases with default and classical negation.
#[derive(Parser, Debug)]
#[command(name = "slaw", version, max_term_width = 80)]
struct Cli {
    /// Program files, loaded in order.
    #[arg(value_name = "FILE", required = true)]
    files: Vec<PathBuf>,

    /// Read and answer queries interactively after loading.
    #[arg(short = 'i', long)]
    interactive: bool,

    /// Query to run, overriding the query embedded in the program.
    #[arg(short = 'q', value_name = "QUERY")]
    query: Option<String>,

    /// Print the justification tree of each answer.
    #[arg(long)]
    tree: bool,

    /// Render goals through their natural language templates.
    #[arg(long, conflicts_with = "raw")]
    human: bool,

    /// Render goals in program syntax (default).
    #[arg(long)]
    raw: bool,

    /// Keep only templated goals in justifications.
    #[arg(long, conflicts_with_all = ["mid", "long"])]
    short: bool,

    /// Also show assumed and repeated goals (default).
    #[arg(long, conflicts_with = "long")]
    mid: bool,

    /// Show every goal of the proof.
    #[arg(long)]
    long: bool,

    /// Justify why the query holds (default).
    #[arg(long, conflicts_with = "neg")]
    pos: bool,

    /// Justify why the query fails; the query must be a negated goal.
    #[arg(long)]
    neg: bool,

    /// Number of answers to print, 0 for all.
    #[arg(short = 's', value_name = "N", default_value_t = 1)]
    answers: usize,

    /// Write the first justification as a standalone HTML page.
    #[arg(long, value_name = "PATH")]
    html: Option<PathBuf>,

    /// Print the dual rules and consistency checks, then exit.
    #[arg(long)]
    dump_duals: bool,

    /// Print the program as natural language sentences, then exit.
    #[arg(long)]
    code: bool,
}

impl Cli {
    fn render_options(&self) -> RenderOptions {
        RenderOptions {
            mode: if self.neg { Mode::Neg } else { Mode::Pos },
            detail: if self.short {
                Detail::Short
            } else if self.long {
                Detail::Long
            } else {
                Detail::Mid
            },
            style: if self.human { Style::Human } else { Style::Raw },
        }
    }
}

fn load_program(files: &[PathBuf]) -> Result<(CompiledProgram, Option<Query>)> {
    let mut merged = SourceProgram::default();
    for path in files {
        let source = parse_program_file(path)
            .with_context(|| format!("loading {}", path.display()))?;
        if source.query.is_some() && merged.query.is_some() {
            bail!(
                "{}: a second embedded query, the earlier files already gave one",
                path.display()
            );
        }
        merged.clauses.extend(source.clauses);
        merged.templates.extend(source.templates);
        merged.query = merged.query.take().or(source.query);
    }
    let query = merged.query.take();
    Ok((compile(merged), query))
}

/// Writes one answer block: the header, one binding line per query
/// variable, the model, and on request the justification tree.
fn write_answer(
    out: &mut String,
    prog: &CompiledProgram,
    ans: &Answer,
    index: usize,
    opts: RenderOptions,
    tree: bool,
) {
    let mut namer = VarNamer::new();
    out.push_str(&format!("ANSWER: {index}\n"));
    for (name, term) in &ans.bindings {
        let value = render_term(term, &ans.constraints, &mut namer, opts.style);
        out.push_str(&format!("{name} = {value}\n"));
    }
    let model: Vec<String> = ans
        .model
        .iter()
        .map(|m| render_literal(&m.literal, &ans.constraints, &mut namer, opts.style))
        .collect();
    if model.is_empty() {
        out.push_str("{ }\n");
    } else {
        out.push_str(&format!("{{ {} }}\n", model.join(", ")));
    }
    if tree {
        out.push('\n');
        out.push_str(&render_tree_text(
            &ans.justification,
            prog,
            &ans.constraints,
            opts,
            &mut namer,
        ));
    }
}

/// Writes to stdout immediately. Print macros panic when the consumer
/// of a pipe stops reading; this reports the error instead, and main
/// turns a broken pipe into a quiet exit.
fn emit(text: &str) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()
}

fn run_batch(cli: &Cli, prog: &CompiledProgram, query: &Query) -> Result<()> {
    let res = solve(
        prog,
        query,
        &SolverOptions {
            max_answers: cli.answers,
            ..SolverOptions::default()
        },
    );
    if res.incomplete {
        eprintln!("warning: the search hit the depth bound; answers may be missing");
    }
    let opts = cli.render_options();
    let mut out = String::new();
    if res.answers.is_empty() {
        out.push_str("no models\n");
    }
    for (i, ans) in res.answers.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_answer(&mut out, prog, ans, i + 1, opts, cli.tree);
    }
    emit(&out)?;
    if let Some(path) = &cli.html {
        match res.answers.first() {
            Some(ans) => {
                let mut namer = VarNamer::new();
                let page =
                    render_tree_html(&ans.justification, prog, &ans.constraints, opts, &mut namer);
                std::fs::write(path, page)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            None => eprintln!("warning: no answer, skipping {}", path.display()),
        }
    }
    Ok(())
}

/// Reads queries from standard input until end of input or `halt.`,
/// printing one answer at a time; `;` asks for the next answer, anything
/// else stops the current query.
fn run_repl(cli: &Cli, prog: &CompiledProgram) -> Result<()> {
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let opts = cli.render_options();
    loop {
        emit("?- ")?;
        let Some(line) = lines.next() else {
            emit("\n")?;
            return Ok(());
        };
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text == "halt." {
            return Ok(());
        }
        let query = match parse_query(text) {
            Ok(q) => q,
            Err(e) => {
                eprintln!("{e}");
                continue;
            }
        };
        let mut wanted = 1;
        loop {
            let res = solve(
                prog,
                &query,
                &SolverOptions {
                    max_answers: wanted,
                    ..SolverOptions::default()
                },
            );
            if res.incomplete {
                eprintln!("warning: the search hit the depth bound; answers may be missing");
            }
            if res.answers.is_empty() {
                emit("no models\n")?;
                break;
            }
            let Some(ans) = res.answers.get(wanted - 1) else {
                emit("no more models\n")?;
                break;
            };
            let mut block = String::new();
            write_answer(&mut block, prog, ans, wanted, opts, cli.tree);
            emit(&block)?;
            let Some(next) = lines.next() else {
                emit("\n")?;
                return Ok(());
            };
            if !next?.trim_start().starts_with(';') {
                break;
            }
            wanted += 1;
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let (prog, embedded) = load_program(&cli.files)?;

    if cli.code || cli.dump_duals {
        let mut out = String::new();
        if cli.code {
            out.push_str(&render_code(&prog));
        }
        if cli.dump_duals {
            out.push_str(&dual_listing(&prog));
        }
        emit(&out)?;
        return Ok(());
    }

    if cli.interactive {
        return run_repl(cli, &prog);
    }

    let query = match &cli.query {
        Some(text) => parse_query(text).context("parsing the -q query")?,
        None => embedded.context(
            "nothing to do: give -q '<query>', embed a query in the program, or use -i",
        )?,
    };
    run_batch(cli, &prog, &query)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let pipe_closed = e
                .root_cause()
                .downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe);
            if pipe_closed {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
