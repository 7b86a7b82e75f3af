//! Rendered justification trees for the admission scenarios, compared
//! against golden files line by line. Trailing whitespace is ignored and
//! a golden line ending in `[...]` matches any actual line it prefixes.

mod common;

use slaw::corpus::{corpus_root, load_default_program};
use slaw::justify::{render_tree_text, Detail, Mode, RenderOptions, Style, VarNamer};
use slaw::parser::parse_query;
use slaw::solver::{solve, SolverOptions};

fn first_answer_tree(query: &str, mode: Mode) -> String {
    let prog = load_default_program().expect("corpus loads");
    let q = parse_query(query).expect("query parses");
    let res = solve(
        &prog,
        &q,
        &SolverOptions {
            max_answers: 1,
            ..SolverOptions::default()
        },
    );
    assert!(!res.answers.is_empty(), "no answer for {query}");
    let a = &res.answers[0];
    let opts = RenderOptions {
        mode,
        detail: Detail::Short,
        style: Style::Human,
    };
    let mut namer = VarNamer::new();
    render_tree_text(&a.justification, &prog, &a.constraints, opts, &mut namer)
}

fn assert_matches_golden(actual: &str, golden_file: &str) {
    let path = corpus_root().join("golden").join(golden_file);
    let golden = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    let actual_lines: Vec<&str> = actual.lines().map(str::trim_end).collect();
    let golden_lines: Vec<&str> = golden.lines().map(str::trim_end).collect();
    assert_eq!(
        actual_lines.len(),
        golden_lines.len(),
        "line count differs from {golden_file}\n--- actual ---\n{actual}\n--- golden ---\n{golden}"
    );
    for (i, (a, g)) in actual_lines.iter().zip(golden_lines.iter()).enumerate() {
        if let Some(prefix) = g.strip_suffix("[...]") {
            assert!(
                a.starts_with(prefix),
                "line {} of {golden_file}:\n  actual: {a}\n  golden prefix: {prefix}",
                i + 1
            );
        } else {
            assert_eq!(a, g, "line {} of {golden_file}", i + 1);
        }
    }
}

#[test]
fn admitted_with_certificate() {
    let tree = first_answer_tree("?- obtain_place(st01).", Mode::Pos);
    assert_matches_golden(&tree, "fig3.txt");
}

#[test]
fn admitted_under_force_majeure_assumption() {
    let tree = first_answer_tree("?- obtain_place(st03).", Mode::Pos);
    assert_matches_golden(&tree, "fig4.txt");
}

#[test]
fn rejection_explained_with_open_evidence() {
    let tree = first_answer_tree("?- not obtain_place(st04).", Mode::Neg);
    assert_matches_golden(&tree, "fig5.txt");
}

#[test]
fn rejection_explained_by_failed_exception() {
    let tree = first_answer_tree("?- not obtain_place(st02).", Mode::Neg);
    assert_matches_golden(&tree, "fig6.txt");
}

#[test]
fn rejection_explained_by_unlawful_criterion() {
    let tree = first_answer_tree("?- not obtain_place(st06).", Mode::Neg);
    assert_matches_golden(&tree, "fig7.txt");
}

#[test]
fn admission_through_assumed_complementary_criterion() {
    let tree = first_answer_tree("?- obtain_place(st05).", Mode::Pos);
    assert_matches_golden(&tree, "st05_pos.txt");
}
