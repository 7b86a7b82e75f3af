//! Compilation of a parsed program into the form the solver evaluates.
//!
//! Compilation builds a clause index per predicate, a dual plan per clause
//! so that negated goals can be proved constructively, the list of clauses
//! that need a consistency check (rules whose head depends on its own
//! negation through an odd number of naf crossings), and the denial pairs
//! that keep a predicate and its classical negation from holding together.

use crate::parser::{PredTemplate, SourceProgram};
use crate::term::{Literal, PredKey, Term, VarId};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

/// Dual plan for one clause of a predicate.
///
/// Proving `not p(args)` requires refuting every clause of `p`. A clause is
/// refuted either because some ground head position differs from the call
/// (`neq_positions`), or because after unifying with the head some body
/// prefix holds and the next body literal fails. Variables appearing only
/// in the body must be covered for every value, which the solver realises
/// as a constrained search over `forall_vars`.
#[derive(Debug, Clone)]
pub struct DualClause {
    pub clause_idx: usize,
    pub neq_positions: Vec<usize>,
    pub forall_vars: Vec<VarId>,
}

/// Table of `#pred` description templates, looked up by predicate key and
/// filtered by pattern match in declaration order.
#[derive(Debug, Clone, Default)]
pub struct TemplateTable {
    map: BTreeMap<PredKey, Vec<PredTemplate>>,
}

fn pattern_matches(pattern: &Term, term: &Term) -> bool {
    match (pattern, term) {
        (Term::Var(_), _) => true,
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| pattern_matches(x, y))
        }
        _ => false,
    }
}

impl TemplateTable {
    pub fn build(templates: &[PredTemplate]) -> Self {
        let mut map: BTreeMap<PredKey, Vec<PredTemplate>> = BTreeMap::new();
        for t in templates {
            map.entry(t.key.clone()).or_default().push(t.clone());
        }
        TemplateTable { map }
    }

    /// First template whose pattern matches the (resolved) arguments.
    pub fn lookup(&self, key: &PredKey, args: &[Term]) -> Option<&PredTemplate> {
        self.map.get(key)?.iter().find(|t| {
            t.pattern
                .iter()
                .zip(args.iter())
                .all(|(p, a)| pattern_matches(p, a))
        })
    }

    /// True when some template exists for the key, whatever the instance.
    pub fn covers_key(&self, key: &PredKey) -> bool {
        self.map.contains_key(key)
    }
}

/// A program compiled for goal directed evaluation.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub source: SourceProgram,
    /// Clause indices per head predicate, in source order.
    pub index: BTreeMap<PredKey, Vec<usize>>,
    /// Dual plans per head predicate, in source order.
    pub duals: BTreeMap<PredKey, Vec<DualClause>>,
    /// Predicates defined in both classical polarities.
    pub denials: Vec<(PredKey, PredKey)>,
    /// Clauses requiring a consistency check per candidate answer.
    pub consistency_clauses: Vec<usize>,
    pub templates: TemplateTable,
    /// Report policy: predicates left out of printed models and assumption
    /// lists. Justification trees are unaffected.
    pub hidden: BTreeSet<PredKey>,
}

pub fn compile(source: SourceProgram) -> CompiledProgram {
    let mut index: BTreeMap<PredKey, Vec<usize>> = BTreeMap::new();
    for (i, c) in source.clauses.iter().enumerate() {
        index.entry(c.head.key()).or_default().push(i);
    }

    let mut duals: BTreeMap<PredKey, Vec<DualClause>> = BTreeMap::new();
    for (key, clause_ids) in &index {
        let plans = clause_ids
            .iter()
            .map(|&ci| {
                let clause = &source.clauses[ci];
                let neq_positions = clause
                    .head
                    .args
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| !matches!(a, Term::Var(_)) && a.is_ground())
                    .map(|(i, _)| i)
                    .collect();
                let mut head_vars = BTreeSet::new();
                clause.head.collect_vars(&mut head_vars);
                let mut body_vars = BTreeSet::new();
                for l in &clause.body {
                    l.collect_vars(&mut body_vars);
                }
                let forall_vars = body_vars.difference(&head_vars).copied().collect();
                DualClause {
                    clause_idx: ci,
                    neq_positions,
                    forall_vars,
                }
            })
            .collect();
        duals.insert(key.clone(), plans);
    }

    let mut denials = Vec::new();
    for key in index.keys() {
        if !key.strong_neg {
            let twin = PredKey {
                strong_neg: true,
                ..key.clone()
            };
            if index.contains_key(&twin) {
                denials.push((key.clone(), twin));
            }
        }
    }

    let consistency_clauses = detect_consistency_clauses(&source, &index);
    let templates = TemplateTable::build(&source.templates);

    CompiledProgram {
        source,
        index,
        duals,
        denials,
        consistency_clauses,
        templates,
        hidden: BTreeSet::new(),
    }
}

/// Picks a predicate name not yet in `used`, preferring `want` and
/// suffixing a counter otherwise. Registers the final choice.
fn alloc_name(want: String, arity: usize, used: &mut BTreeSet<(String, usize)>) -> String {
    if used.insert((want.clone(), arity)) {
        return want;
    }
    let mut n = 2usize;
    loop {
        let cand = format!("{want}_x{n}");
        if used.insert((cand.clone(), arity)) {
            return cand;
        }
        n += 1;
    }
}

/// Renders the generated duals and the denials as program text in the
/// input grammar, so the listing re-parses.
///
/// Each predicate gets a top level dual conjoining one refutation goal per
/// source clause. The per clause refutations share a sub predicate selected
/// by a clause ordinal constant in the first argument: one clause per ground
/// head position (a disequality against the pattern) and one per body
/// position (the prefix as written, then the flipped pivot). Names live in
/// a namespace that is escalated past every user predicate.
pub fn dual_listing(prog: &CompiledProgram) -> String {
    let user: BTreeSet<&str> = prog.index.keys().map(|k| k.name.as_str()).collect();
    let mut prefix = String::from("d_");
    while user.iter().any(|n| n.starts_with(prefix.as_str())) {
        prefix.push('_');
    }
    let mut used: BTreeSet<(String, usize)> = prog
        .index
        .keys()
        .map(|k| (k.name.clone(), k.arity))
        .collect();

    let mut out = String::new();
    for (key, plans) in &prog.duals {
        let desired = if key.strong_neg {
            format!("{prefix}neg_{}", key.name)
        } else {
            format!("{prefix}{}", key.name)
        };
        let top = alloc_name(desired, key.arity, &mut used);
        let sub = alloc_name(format!("{top}_c"), key.arity + 1, &mut used);
        let generic: Vec<Term> = (0..key.arity as VarId).map(Term::Var).collect();

        let top_head = Literal::new(top.clone(), generic.clone());
        let goals: Vec<String> = (1..=plans.len())
            .map(|i| {
                let mut args = vec![Term::Const(format!("c{i}"))];
                args.extend(generic.iter().cloned());
                Literal::new(sub.clone(), args).to_string()
            })
            .collect();
        let _ = writeln!(out, "{top_head} :- {}.", goals.join(", "));

        for (i, plan) in plans.iter().enumerate() {
            let ordinal = Term::Const(format!("c{}", i + 1));
            let clause = &prog.source.clauses[plan.clause_idx];
            if !plan.forall_vars.is_empty() {
                let vs: Vec<String> = plan
                    .forall_vars
                    .iter()
                    .map(|v| Term::Var(*v).to_string())
                    .collect();
                let _ = writeln!(
                    out,
                    "% body-only variables checked universally below: {}",
                    vs.join(", ")
                );
            }
            for &pos in &plan.neq_positions {
                let mut args = vec![ordinal.clone()];
                args.extend(generic.iter().cloned());
                let head = Literal::new(sub.clone(), args);
                let goal =
                    Literal::diseq(false, generic[pos].clone(), clause.head.args[pos].clone());
                let _ = writeln!(out, "{head} :- {goal}.");
            }
            for pivot in 0..clause.body.len() {
                let mut args = vec![ordinal.clone()];
                args.extend(clause.head.args.iter().cloned());
                let head = Literal::new(sub.clone(), args);
                let mut goals: Vec<String> = clause.body[..pivot]
                    .iter()
                    .map(|l| l.to_string())
                    .collect();
                goals.push(clause.body[pivot].flipped().to_string());
                let _ = writeln!(out, "{head} :- {}.", goals.join(", "));
            }
        }
        out.push('\n');
    }
    if !prog.denials.is_empty() {
        let _ = writeln!(out, "% denials");
        for (pos, neg) in &prog.denials {
            let _ = writeln!(
                out,
                "% denial: {pos} and {neg} cannot both hold of the same arguments."
            );
        }
    }
    if !prog.consistency_clauses.is_empty() {
        let _ = writeln!(out, "% consistency checked clauses");
        for &ci in &prog.consistency_clauses {
            let c = &prog.source.clauses[ci];
            let _ = writeln!(out, "% {} ({}:{})", c.head, c.origin, c.line);
        }
    }
    out
}

/// Finds clauses whose head can be reached from one of its own naf body
/// literals through an even number of further naf crossings; such a clause
/// closes a loop with an odd total number of crossings, which the goal
/// directed proof alone does not account for.
fn detect_consistency_clauses(
    source: &SourceProgram,
    index: &BTreeMap<PredKey, Vec<usize>>,
) -> Vec<usize> {
    let mut out = Vec::new();
    for (ci, clause) in source.clauses.iter().enumerate() {
        let head_key = clause.head.key();
        let mut marked = false;
        for lit in &clause.body {
            if !lit.naf || marked {
                continue;
            }
            // breadth first search over (predicate, parity) pairs
            let start = (lit.key(), 0u8);
            let mut seen = BTreeSet::from([start.clone()]);
            let mut queue = VecDeque::from([start]);
            while let Some((key, par)) = queue.pop_front() {
                if key == head_key && par == 0 {
                    out.push(ci);
                    marked = true;
                    break;
                }
                if let Some(clause_ids) = index.get(&key) {
                    for &di in clause_ids {
                        for b in &source.clauses[di].body {
                            let np = par ^ u8::from(b.naf);
                            let next = (b.key(), np);
                            if seen.insert(next.clone()) {
                                queue.push_back(next);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program_str, TemplateSegment};

    fn compiled(src: &str) -> CompiledProgram {
        compile(parse_program_str("t", src).unwrap())
    }

    #[test]
    fn index_keeps_source_order() {
        let p = compiled("p(a). p(b). q(X) :- p(X).");
        let key = PredKey {
            name: "p".into(),
            arity: 1,
            strong_neg: false,
        };
        assert_eq!(p.index[&key], vec![0, 1]);
    }

    #[test]
    fn dual_plan_records_ground_positions_and_body_vars() {
        let p = compiled("p(a, X) :- q(X, Y).");
        let key = PredKey {
            name: "p".into(),
            arity: 2,
            strong_neg: false,
        };
        let plans = &p.duals[&key];
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].neq_positions, vec![0]);
        assert_eq!(plans[0].forall_vars.len(), 1);
    }

    #[test]
    fn denial_pairs_require_both_polarities() {
        let p = compiled("e(a, b). -e(a, c). q(x).");
        assert_eq!(p.denials.len(), 1);
        assert_eq!(p.denials[0].0.to_string(), "e/2");
        assert_eq!(p.denials[0].1.to_string(), "-e/2");
    }

    #[test]
    fn odd_loops_are_flagged_even_loops_are_not() {
        let p = compiled("p :- not q. q :- not p.");
        assert!(p.consistency_clauses.is_empty());
        let p = compiled("r :- not r, q.");
        assert_eq!(p.consistency_clauses, vec![0]);
        let p = compiled("a :- not b. b :- c. c :- a.");
        assert_eq!(p.consistency_clauses, vec![0]);
        let p = compiled("a :- not b. b :- not c. c :- a.");
        assert!(p.consistency_clauses.is_empty());
    }

    #[test]
    fn positive_loops_are_not_consistency_clauses() {
        let p = compiled("p :- p.");
        assert!(p.consistency_clauses.is_empty());
    }

    #[test]
    fn template_lookup_prefers_matching_pattern() {
        let src = "
            #pred assume(St, rmi) :: 'rmi case'.
            #pred assume(St, other) :: 'other case'.
        ";
        let p = compiled(src);
        let key = PredKey {
            name: "assume".into(),
            arity: 2,
            strong_neg: false,
        };
        let args = vec![Term::Const("st01".into()), Term::Const("other".into())];
        let t = p.templates.lookup(&key, &args).unwrap();
        assert_eq!(
            t.segments,
            vec![TemplateSegment::Text("other case".into())]
        );
        let miss = vec![Term::Const("st01".into()), Term::Const("third".into())];
        assert!(p.templates.lookup(&key, &miss).is_none());
        assert!(p.templates.covers_key(&key));
    }

    #[test]
    fn dual_listing_reparses() {
        let src = "p(a, X) :- q(X), not r(X). p(b, c).";
        let p = compiled(src);
        let dump = dual_listing(&p);
        assert!(dump.contains("d_p(V0,V1) :- d_p_c(c1,V0,V1), d_p_c(c2,V0,V1)."));
        assert!(dump.contains("d_p_c(c1,V0,V1) :- V0 \\= a."));
        assert!(dump.contains("\\= b"));
        assert!(dump.contains("not q("));
        let reparsed = parse_program_str("dump", &dump).unwrap();
        assert!(reparsed.clauses.len() >= 6);
    }

    #[test]
    fn dual_listing_avoids_user_names() {
        let src = "d_p. p :- not d_p.";
        let p = compiled(src);
        let dump = dual_listing(&p);
        assert!(dump.contains("d__p"));
        parse_program_str("dump", &dump).unwrap();
    }
}
