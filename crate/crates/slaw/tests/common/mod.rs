#![allow(dead_code)]

pub mod oracle;

use slaw::compiler::{compile, CompiledProgram};
use slaw::parser::{parse_program_str, parse_query};
use slaw::solver::{solve, SolveResult, SolverOptions};

pub fn compile_str(src: &str) -> CompiledProgram {
    compile(parse_program_str("test", src).expect("program parses"))
}

pub fn ask(prog: &CompiledProgram, query: &str) -> SolveResult {
    let q = parse_query(query).expect("query parses");
    solve(prog, &q, &SolverOptions::default())
}

pub fn ask_n(prog: &CompiledProgram, query: &str, max_answers: usize) -> SolveResult {
    let q = parse_query(query).expect("query parses");
    solve(
        prog,
        &q,
        &SolverOptions {
            max_answers,
            ..SolverOptions::default()
        },
    )
}

pub fn succeeds(prog: &CompiledProgram, query: &str) -> bool {
    !ask_n(prog, query, 1).answers.is_empty()
}

/// Differential run against the brute force oracle: for every atom of every
/// generated program, `?- a.` must succeed exactly when `a` is in some
/// stable model and `?- not a.` exactly when some stable model omits it.
/// Returns the first disagreement, with the offending program attached.
pub fn differential_run(
    seed: u64,
    n_programs: usize,
    max_atoms: usize,
    max_rules: usize,
) -> Result<(), String> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n_programs {
        let gp = oracle::random_program(&mut rng, max_atoms, max_rules);
        let src = gp.to_source();
        let prog = compile_str(&src);
        for atom in 0..gp.atom_names.len() {
            let name = &gp.atom_names[atom];
            let engine_pos = succeeds(&prog, &format!("?- {name}."));
            let oracle_pos = gp.brave_true(atom);
            if engine_pos != oracle_pos {
                return Err(format!(
                    "program {i}, atom {name}: engine says {engine_pos} for `?- {name}.`, \
                     oracle says {oracle_pos}\n{src}"
                ));
            }
            let engine_neg = succeeds(&prog, &format!("?- not {name}."));
            let oracle_neg = gp.some_model_omits(atom);
            if engine_neg != oracle_neg {
                return Err(format!(
                    "program {i}, atom {name}: engine says {engine_neg} for `?- not {name}.`, \
                     oracle says {oracle_neg}\n{src}"
                ));
            }
        }
    }
    Ok(())
}
