//! Stable model semantics checks: the brute force oracle is first pinned on
//! hand-computed programs, then the engine is compared against it over a
//! large batch of randomly generated ground programs.

mod common;

use common::differential_run;
use common::oracle::GroundProgram;
use std::collections::BTreeSet;

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn model_sets(p: &GroundProgram) -> Vec<BTreeSet<String>> {
    p.stable_models().iter().map(|m| p.name_set(m)).collect()
}

#[test]
fn oracle_even_loop_has_both_models() {
    let mut p = GroundProgram::new(&["p", "q"]);
    p.rule(0, &[], &[1]);
    p.rule(1, &[], &[0]);
    assert_eq!(model_sets(&p), vec![set(&["p"]), set(&["q"])]);
}

#[test]
fn oracle_positive_self_loop_is_unfounded() {
    let mut p = GroundProgram::new(&["p"]);
    p.rule(0, &[0], &[]);
    assert_eq!(model_sets(&p), vec![set(&[])]);
}

#[test]
fn oracle_odd_loop_has_no_model() {
    let mut p = GroundProgram::new(&["p"]);
    p.rule(0, &[], &[0]);
    assert!(model_sets(&p).is_empty());
}

#[test]
fn oracle_even_loop_neutralizes_odd_loop() {
    let mut p = GroundProgram::new(&["p", "q"]);
    p.rule(0, &[], &[1]);
    p.rule(1, &[], &[0]);
    p.rule(0, &[], &[0]);
    assert_eq!(model_sets(&p), vec![set(&["p"])]);
}

#[test]
fn oracle_odd_loop_poisons_unrelated_facts() {
    let mut p = GroundProgram::new(&["p", "q", "r"]);
    p.rule(0, &[], &[1]);
    p.rule(1, &[], &[]);
    p.rule(2, &[], &[2]);
    assert!(model_sets(&p).is_empty());
}

#[test]
fn oracle_guarded_odd_loop_keeps_empty_model() {
    let mut p = GroundProgram::new(&["r", "q"]);
    p.rule(0, &[1], &[0]);
    assert_eq!(model_sets(&p), vec![set(&[])]);
}

#[test]
fn oracle_positive_chain_derives_everything() {
    let mut p = GroundProgram::new(&["p", "q", "r"]);
    p.rule(0, &[1], &[]);
    p.rule(1, &[2], &[]);
    p.rule(2, &[], &[]);
    assert_eq!(model_sets(&p), vec![set(&["p", "q", "r"])]);
}

#[test]
fn engine_matches_oracle_on_random_programs() {
    if let Err(report) = differential_run(20260815, 120, 12, 20) {
        panic!("engine disagrees with oracle:\n{report}");
    }
}
