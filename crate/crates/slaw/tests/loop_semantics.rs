//! Engine behaviour on the canonical loop programs: even loops offer a
//! choice, odd loops are contradictions that poison every candidate, and
//! positive loops are unfounded.

mod common;

use common::{ask_n, compile_str, succeeds};
use std::collections::BTreeSet;

fn first_model(prog: &slaw::compiler::CompiledProgram, query: &str) -> BTreeSet<String> {
    let res = ask_n(prog, query, 1);
    let answer = res.answers.first().expect("query should have an answer");
    answer
        .model
        .iter()
        .map(|m| m.literal.to_string())
        .collect()
}

#[test]
fn even_loop_offers_both_choices() {
    let prog = compile_str("p :- not q.\nq :- not p.\n");
    let mp = first_model(&prog, "?- p.");
    assert!(mp.contains("p"), "model {mp:?} should contain p");
    assert!(mp.contains("not q"), "model {mp:?} should contain not q");
    let mq = first_model(&prog, "?- q.");
    assert!(mq.contains("q"), "model {mq:?} should contain q");
    assert!(mq.contains("not p"), "model {mq:?} should contain not p");
}

#[test]
fn odd_loop_fails_in_both_polarities() {
    let prog = compile_str("p :- not p.\n");
    assert!(!succeeds(&prog, "?- p."));
    assert!(!succeeds(&prog, "?- not p."));
}

#[test]
fn odd_loop_poisons_unrelated_query() {
    let prog = compile_str("p :- not p.\nq.\n");
    assert!(!succeeds(&prog, "?- q."));
}

#[test]
fn even_loop_shields_odd_clause() {
    let prog = compile_str("p :- not q.\nq :- not p.\np :- not p.\n");
    assert!(succeeds(&prog, "?- p."));
    assert!(!succeeds(&prog, "?- q."));
}

#[test]
fn positive_loop_is_unfounded() {
    let prog = compile_str("a :- b.\nb :- a.\n");
    assert!(!succeeds(&prog, "?- a."));
    assert!(succeeds(&prog, "?- not a."));
    assert!(succeeds(&prog, "?- not b."));
}
