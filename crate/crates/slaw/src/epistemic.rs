//! Reasoning across answers rather than within one.
//!
//! A query can hold in several partial stable models, each carrying its
//! own assumptions. This module enumerates those answers up to a limit
//! and derives the aggregate views: brave consequences (literals holding
//! in some answer), cautious consequences (literals holding in every
//! answer), and the grouping of answers by the assumption sets they rest
//! on, which is the useful summary when rules leave facts open.

use crate::compiler::CompiledProgram;
use crate::justify::{render_literal, Style, VarNamer};
use crate::parser::Query;
use crate::solver::{solve, Answer, SolverOptions};
use std::collections::{BTreeMap, BTreeSet};

/// Default bound on enumerated answers; loops over unbound variables can
/// make the answer stream infinite, so enumeration is always capped.
pub const DEFAULT_ENUM_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub struct ModelSet {
    pub answers: Vec<Answer>,
    /// True when the limit cut the enumeration short.
    pub truncated: bool,
    /// True when the depth bound cut some branch; absence of an answer is
    /// then not a refutation.
    pub incomplete: bool,
}

/// Enumerates up to `limit` answers (0 means no bound).
pub fn enumerate(prog: &CompiledProgram, query: &Query, limit: usize) -> ModelSet {
    let opts = SolverOptions {
        max_answers: if limit == 0 { 0 } else { limit + 1 },
        ..SolverOptions::default()
    };
    let mut result = solve(prog, query, &opts);
    let truncated = limit != 0 && result.answers.len() > limit;
    if truncated {
        result.answers.truncate(limit);
    }
    ModelSet {
        answers: result.answers,
        truncated,
        incomplete: result.incomplete,
    }
}

fn model_strings(answer: &Answer) -> BTreeSet<String> {
    answer
        .model
        .iter()
        .map(|ml| render_literal(&ml.literal, &answer.constraints, &mut VarNamer::new(), Style::Raw))
        .collect()
}

/// Renders an answer's assumptions in a form comparable across answers.
pub fn assumption_strings(answer: &Answer) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for lit in &answer.assumptions {
        let s = render_literal(lit, &answer.constraints, &mut VarNamer::new(), Style::Raw);
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// Literals holding in at least one enumerated answer, sorted.
pub fn brave_consequences(models: &ModelSet) -> Vec<String> {
    let mut all = BTreeSet::new();
    for a in &models.answers {
        all.extend(model_strings(a));
    }
    all.into_iter().collect()
}

/// Literals holding in every enumerated answer, sorted; `None` when there
/// is no answer at all, which is different from an empty intersection.
pub fn cautious_consequences(models: &ModelSet) -> Option<Vec<String>> {
    let mut answers = models.answers.iter();
    let first = answers.next()?;
    let mut common = model_strings(first);
    for a in answers {
        let strings = model_strings(a);
        common.retain(|s| strings.contains(s));
    }
    Some(common.into_iter().collect())
}

/// Groups answer indices (0 based) by their assumption set.
pub fn assumption_groups(models: &ModelSet) -> Vec<(Vec<String>, Vec<usize>)> {
    let mut groups: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
    for (i, a) in models.answers.iter().enumerate() {
        groups.entry(assumption_strings(a)).or_default().push(i);
    }
    groups.into_iter().collect()
}

fn braces(items: &[String]) -> String {
    if items.is_empty() {
        "{ }".to_string()
    } else {
        format!("{{ {} }}", items.join(", "))
    }
}

/// A plain text summary of an enumeration: counts, brave and cautious
/// consequences, and the assumption sets with the answers they back.
pub fn report_text(models: &ModelSet) -> String {
    if models.answers.is_empty() {
        return if models.incomplete {
            "no models (search incomplete)\n".to_string()
        } else {
            "no models\n".to_string()
        };
    }
    let mut out = String::new();
    out.push_str(&format!("answers: {}", models.answers.len()));
    if models.truncated {
        out.push_str(" (limit reached)");
    }
    out.push('\n');
    out.push_str(&format!(
        "brave consequences: {}\n",
        braces(&brave_consequences(models))
    ));
    let cautious = cautious_consequences(models).unwrap_or_default();
    out.push_str(&format!("cautious consequences: {}\n", braces(&cautious)));
    out.push_str("assumption sets:\n");
    for (set, idxs) in assumption_groups(models) {
        let nums: Vec<String> = idxs.iter().map(|i| (i + 1).to_string()).collect();
        out.push_str(&format!(
            "    {} : answers {}\n",
            braces(&set),
            nums.join(", ")
        ));
    }
    out
}

/// The same summary as structured JSON.
pub fn report_json(models: &ModelSet) -> serde_json::Value {
    let groups: Vec<serde_json::Value> = assumption_groups(models)
        .into_iter()
        .map(|(set, idxs)| {
            serde_json::json!({
                "assumptions": set,
                "answers": idxs.iter().map(|i| i + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    let model_lists: Vec<Vec<String>> = models
        .answers
        .iter()
        .map(|a| model_strings(a).into_iter().collect())
        .collect();
    serde_json::json!({
        "answers": models.answers.len(),
        "truncated": models.truncated,
        "incomplete": models.incomplete,
        "brave": brave_consequences(models),
        "cautious": cautious_consequences(models),
        "assumption_sets": groups,
        "models": model_lists,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile;
    use crate::parser::{parse_program_str, parse_query};

    fn prog(src: &str) -> CompiledProgram {
        compile(parse_program_str("test", src).expect("parse"))
    }

    #[test]
    fn brave_and_cautious_across_answers() {
        let p = prog("a :- not b.\na :- c.\nc.\nb :- d.\n");
        let q = parse_query("?- a.").expect("query");
        let ms = enumerate(&p, &q, 0);
        assert_eq!(ms.answers.len(), 2);
        assert!(!ms.truncated);
        let brave = brave_consequences(&ms);
        assert!(brave.contains(&"a".to_string()));
        assert!(brave.contains(&"c".to_string()));
        let cautious = cautious_consequences(&ms).expect("answers exist");
        assert!(cautious.contains(&"a".to_string()));
        assert!(!cautious.contains(&"c".to_string()));
    }

    #[test]
    fn no_answers_mean_no_cautious_baseline() {
        let p = prog("a :- b.\nb :- a.\n");
        let q = parse_query("?- a.").expect("query");
        let ms = enumerate(&p, &q, 0);
        assert!(ms.answers.is_empty());
        assert_eq!(cautious_consequences(&ms), None);
        assert_eq!(report_text(&ms), "no models\n");
    }

    #[test]
    fn enumeration_limit_marks_truncation() {
        let p = prog("m(a).\nm(b).\nm(c).\n");
        let q = parse_query("?- m(X).").expect("query");
        let ms = enumerate(&p, &q, 2);
        assert_eq!(ms.answers.len(), 2);
        assert!(ms.truncated);
        let all = enumerate(&p, &q, 64);
        assert_eq!(all.answers.len(), 3);
        assert!(!all.truncated);
    }

    #[test]
    fn groups_answers_by_assumption_set() {
        let p = prog("p :- not q.\nq :- not p.\ns :- p.\ns :- q.\n");
        let q = parse_query("?- s.").expect("query");
        let ms = enumerate(&p, &q, 0);
        assert_eq!(ms.answers.len(), 2);
        let groups = assumption_groups(&ms);
        assert_eq!(groups.len(), 2);
        let text = report_text(&ms);
        assert!(text.contains("answers: 2"));
        assert!(text.contains("assumption sets:"));
        let json = report_json(&ms);
        assert_eq!(json["answers"], 2);
        assert_eq!(json["truncated"], false);
    }
}
