//! Goal directed query evaluation without grounding.
//!
//! Evaluation is top down from the query. Negated goals are proved through
//! the dual plans computed at compile time, so no program grounding or
//! model enumeration happens. Termination on loops comes from the call
//! history: every active call is recorded together with the number of naf
//! crossings on the path to it, and a repeated call is resolved by the
//! crossing distance to the recorded one. An even positive distance closes
//! the loop coinductively and records an assumption; distance zero or an
//! odd distance fails the branch.
//!
//! A successful derivation yields a partial stable model: the literals the
//! proof committed to, some of them assumptions. Clauses that close a loop
//! with an odd number of crossings are re-checked against every candidate
//! answer, and predicates defined in both classical polarities must never
//! hold together on the same arguments.

use crate::compiler::{CompiledProgram, DualClause};
use crate::constraint::ConstraintState;
use crate::justify::{JustificationNode, NodeKind};
use crate::parser::Query;
use crate::term::{Literal, PredKey, Term, VarId};
use std::collections::{BTreeMap, BTreeSet};

/// Stack size for the evaluation thread. Deep proofs nest continuations,
/// so evaluation always runs on its own thread with room to recurse.
const SOLVER_STACK_BYTES: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Expansion depth bound. Hitting it makes the search incomplete but
    /// never wrong: answers found so far are still answers.
    pub max_depth: usize,
    /// Stop after this many answers; 0 means enumerate on demand without a
    /// bound.
    pub max_answers: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_depth: 10_000,
            max_answers: 0,
        }
    }
}

/// A model entry: a literal the answer commits to. `assumed` marks entries
/// that rest on a coinductive assumption rather than a derivation.
#[derive(Debug, Clone)]
pub struct ModelLiteral {
    pub literal: Literal,
    pub assumed: bool,
}

/// One solution to the query.
#[derive(Debug, Clone)]
pub struct Answer {
    /// Query variable values, in order of appearance.
    pub bindings: Vec<(String, Term)>,
    /// The partial stable model backing the answer.
    pub model: Vec<ModelLiteral>,
    /// Additional established naf literals, reported only on request.
    pub neg_extras: Vec<ModelLiteral>,
    /// The assumptions the answer rests on, each also part of the model.
    pub assumptions: Vec<Literal>,
    pub justification: JustificationNode,
    /// Final constraint state, for resolving and describing variables.
    pub constraints: ConstraintState,
}

#[derive(Debug, Clone, Default)]
pub struct SolveResult {
    pub answers: Vec<Answer>,
    /// True when some branch was cut by the depth bound; an empty answer
    /// list then means "search incomplete", not "no".
    pub incomplete: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    More,
    Halt,
}

#[derive(Clone, Copy)]
struct Done {
    neg: bool,
    used_assumption: bool,
    assumed: bool,
}

#[derive(Clone)]
struct ChsEntry {
    key: PredKey,
    args: Vec<Term>,
    parity: u32,
    done: Option<Done>,
    start_uses: usize,
}

/// An assumption made by closing a loop, together with the innermost naf
/// goal written by the user under which it happened.
#[derive(Debug, Clone)]
struct AssumeRecord {
    literal: Literal,
    enclosing: Option<Literal>,
}

#[derive(Clone, Default)]
struct Chs {
    entries: Vec<ChsEntry>,
    records: Vec<AssumeRecord>,
    /// Counts assumption events, including repeats of assumption backed
    /// entries, so completions can tell whether their subproof used one.
    uses: usize,
}

struct Search<'a> {
    prog: &'a CompiledProgram,
    opts: &'a SolverOptions,
    incomplete: bool,
    answers: Vec<Answer>,
}

type LitCont<'c> = dyn FnMut(&mut Search, ConstraintState, Chs, JustificationNode) -> Flow + 'c;
type SeqCont<'c> = dyn FnMut(&mut Search, ConstraintState, Chs, Vec<JustificationNode>) -> Flow + 'c;

/// Evaluates the query against the program. Runs on a dedicated thread
/// with a large stack; results are collected eagerly up to the answer
/// bound in the options.
pub fn solve(prog: &CompiledProgram, query: &Query, opts: &SolverOptions) -> SolveResult {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("solver".into())
            .stack_size(SOLVER_STACK_BYTES)
            .spawn_scoped(scope, || run(prog, query, opts))
            .expect("failed to spawn solver thread")
            .join()
            .expect("solver thread panicked")
    })
}

fn run(prog: &CompiledProgram, query: &Query, opts: &SolverOptions) -> SolveResult {
    let mut vars = BTreeSet::new();
    for l in &query.literals {
        l.collect_vars(&mut vars);
    }
    let state = ConstraintState::new(vars.last().map(|v| v + 1).unwrap_or(0));
    let items: Vec<(Literal, bool)> = query.literals.iter().map(|l| (l.clone(), true)).collect();
    let mut search = Search {
        prog,
        opts,
        incomplete: false,
        answers: Vec::new(),
    };
    solve_seq(
        &mut search,
        &items,
        0,
        0,
        None,
        0,
        state,
        Chs::default(),
        &[],
        &mut |se, st, chs, nodes| finish_answer(se, query, st, chs, nodes),
    );
    SolveResult {
        answers: search.answers,
        incomplete: search.incomplete,
    }
}

fn same_instance(state: &ConstraintState, a: &[Term], b: &[Term]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(x, y)| state.apply(x) == state.apply(y))
}

fn record_matches(
    chs: &Chs,
    state: &ConstraintState,
    key: &PredKey,
    args: &[Term],
    neg: bool,
) -> bool {
    chs.records.iter().any(|r| {
        r.literal.naf == neg
            && r.literal.strong_neg == key.strong_neg
            && r.literal.pred == key.name
            && same_instance(state, &r.literal.args, args)
    })
}

fn solve_seq(
    se: &mut Search,
    items: &[(Literal, bool)],
    idx: usize,
    parity: u32,
    user_naf: Option<&Literal>,
    depth: usize,
    state: ConstraintState,
    chs: Chs,
    nodes: &[JustificationNode],
    k: &mut SeqCont,
) -> Flow {
    if idx == items.len() {
        return k(se, state, chs, nodes.to_vec());
    }
    let (lit, user) = &items[idx];
    solve_literal(
        se,
        lit,
        *user,
        parity,
        user_naf,
        depth,
        state,
        chs,
        &mut |se2, st2, chs2, node| {
            let mut next_nodes = nodes.to_vec();
            next_nodes.push(node);
            solve_seq(
                se2, items, idx + 1, parity, user_naf, depth, st2, chs2, &next_nodes, k,
            )
        },
    )
}

fn solve_literal(
    se: &mut Search,
    lit: &Literal,
    user: bool,
    parity: u32,
    user_naf: Option<&Literal>,
    depth: usize,
    state: ConstraintState,
    chs: Chs,
    k: &mut LitCont,
) -> Flow {
    let inst = state.apply_literal(lit);

    if inst.is_diseq() {
        let next = if inst.naf {
            state.unify(&inst.args[0], &inst.args[1])
        } else {
            state.add_disequality(&inst.args[0], &inst.args[1])
        };
        return match next {
            Some(s2) => {
                let node = JustificationNode {
                    literal: inst,
                    kind: NodeKind::Fact,
                    children: Vec::new(),
                };
                k(se, s2, chs, node)
            }
            None => Flow::More,
        };
    }

    let key = inst.key();
    let atom_parity = parity + u32::from(inst.naf);
    let want_neg = inst.naf;

    let owned_naf;
    let cur_naf: Option<&Literal> = if inst.naf && user {
        owned_naf = inst.clone();
        Some(&owned_naf)
    } else {
        user_naf
    };

    // loop, repeat and consistency rules against the call history
    for e in chs.entries.iter().rev() {
        if e.key != key || !same_instance(&state, &e.args, &inst.args) {
            continue;
        }
        match e.done {
            None => {
                if atom_parity <= e.parity || (atom_parity - e.parity) % 2 == 1 {
                    return Flow::More;
                }
                let mut chs2 = chs.clone();
                chs2.uses += 1;
                chs2.records.push(AssumeRecord {
                    literal: inst.clone(),
                    enclosing: cur_naf.cloned(),
                });
                let node = JustificationNode {
                    literal: inst.clone(),
                    kind: NodeKind::Assumption,
                    children: Vec::new(),
                };
                return k(se, state, chs2, node);
            }
            Some(d) => {
                if d.neg != want_neg {
                    return Flow::More;
                }
                let mut chs2 = chs.clone();
                if d.assumed || d.used_assumption {
                    chs2.uses += 1;
                }
                let node = JustificationNode {
                    literal: inst.clone(),
                    kind: NodeKind::Repeat,
                    children: Vec::new(),
                };
                return k(se, state, chs2, node);
            }
        }
    }

    if depth >= se.opts.max_depth {
        se.incomplete = true;
        return Flow::More;
    }

    if !inst.naf {
        let Some(clause_ids) = se.prog.index.get(&key) else {
            return Flow::More;
        };
        let clause_ids = clause_ids.clone();
        for ci in clause_ids {
            let all_lits: Vec<Literal> = {
                let c = &se.prog.source.clauses[ci];
                std::iter::once(c.head.clone())
                    .chain(c.body.iter().cloned())
                    .collect()
            };
            let (st1, renamed, _) = state.rename_literals(&all_lits);
            let Some(st2) = st1.unify_seq(&inst.args, &renamed[0].args) else {
                continue;
            };
            let mut chs1 = chs.clone();
            let entry_pos = chs1.entries.len();
            chs1.entries.push(ChsEntry {
                key: key.clone(),
                args: inst.args.clone(),
                parity: atom_parity,
                done: None,
                start_uses: chs1.uses,
            });
            let items: Vec<(Literal, bool)> =
                renamed[1..].iter().map(|l| (l.clone(), true)).collect();
            let inst_ref = &inst;
            let key_ref = &key;
            let flow = solve_seq(
                se,
                &items,
                0,
                atom_parity,
                cur_naf,
                depth + 1,
                st2,
                chs1,
                &[],
                &mut |se2, st3, mut chs3, body_nodes| {
                    let assumed = record_matches(&chs3, &st3, key_ref, &inst_ref.args, false);
                    let used = chs3.uses > chs3.entries[entry_pos].start_uses;
                    chs3.entries[entry_pos].done = Some(Done {
                        neg: false,
                        used_assumption: used,
                        assumed,
                    });
                    let kind = if body_nodes.is_empty() {
                        NodeKind::Fact
                    } else {
                        NodeKind::Rule(ci)
                    };
                    let node = JustificationNode {
                        literal: inst_ref.clone(),
                        kind,
                        children: body_nodes,
                    };
                    k(se2, st3, chs3, node)
                },
            );
            if flow == Flow::Halt {
                return Flow::Halt;
            }
        }
        Flow::More
    } else {
        let plans = se.prog.duals.get(&key).cloned().unwrap_or_default();
        if plans.is_empty() {
            // no clauses at all: the negation holds trivially
            let mut chs2 = chs.clone();
            chs2.entries.push(ChsEntry {
                key,
                args: inst.args.clone(),
                parity: atom_parity,
                done: Some(Done {
                    neg: true,
                    used_assumption: false,
                    assumed: false,
                }),
                start_uses: chs2.uses,
            });
            let node = JustificationNode {
                literal: inst,
                kind: NodeKind::Dual,
                children: Vec::new(),
            };
            return k(se, state, chs2, node);
        }
        let mut chs1 = chs.clone();
        let entry_pos = chs1.entries.len();
        chs1.entries.push(ChsEntry {
            key: key.clone(),
            args: inst.args.clone(),
            parity: atom_parity,
            done: None,
            start_uses: chs1.uses,
        });
        dual_conj(
            se,
            &plans,
            0,
            &inst,
            atom_parity,
            cur_naf,
            depth + 1,
            state,
            chs1,
            Vec::new(),
            entry_pos,
            k,
        )
    }
}

/// Conjunction over the per clause duals of one negated goal.
#[allow(clippy::too_many_arguments)]
fn dual_conj(
    se: &mut Search,
    plans: &[DualClause],
    i: usize,
    inst: &Literal,
    atom_parity: u32,
    user_naf: Option<&Literal>,
    depth: usize,
    state: ConstraintState,
    chs: Chs,
    acc: Vec<JustificationNode>,
    entry_pos: usize,
    k: &mut LitCont,
) -> Flow {
    if i == plans.len() {
        let mut chs2 = chs;
        let key = inst.key();
        let assumed = record_matches(&chs2, &state, &key, &inst.args, true);
        let used = chs2.uses > chs2.entries[entry_pos].start_uses;
        chs2.entries[entry_pos].done = Some(Done {
            neg: true,
            used_assumption: used,
            assumed,
        });
        let node = JustificationNode {
            literal: inst.clone(),
            kind: NodeKind::Dual,
            children: acc,
        };
        return k(se, state, chs2, node);
    }
    let plan = plans[i].clone();
    solve_clause_dual(
        se,
        &plan,
        &inst.args,
        atom_parity,
        user_naf,
        depth,
        state,
        chs,
        &mut |se2, st2, chs2, branch_nodes| {
            let mut acc2 = acc.clone();
            acc2.extend(branch_nodes);
            dual_conj(
                se2, plans, i + 1, inst, atom_parity, user_naf, depth, st2, chs2, acc2, entry_pos,
                k,
            )
        },
    )
}

/// Proves the dual of a single clause for the given call arguments.
///
/// Without body-only variables the branch disjunction backtracks freely.
/// With body-only variables the search is constrained: the first branch
/// solution that leaves them unbound is committed to, and any excluded
/// values it collected are covered one by one in their own subsearches.
#[allow(clippy::too_many_arguments)]
fn solve_clause_dual(
    se: &mut Search,
    plan: &DualClause,
    args: &[Term],
    atom_parity: u32,
    user_naf: Option<&Literal>,
    depth: usize,
    state: ConstraintState,
    chs: Chs,
    k: &mut SeqCont,
) -> Flow {
    let dual_parity = atom_parity + 1;

    if plan.forall_vars.is_empty() {
        let all_lits: Vec<Literal> = {
            let c = &se.prog.source.clauses[plan.clause_idx];
            std::iter::once(c.head.clone())
                .chain(c.body.iter().cloned())
                .collect()
        };
        let (st0, renamed, _) = state.rename_literals(&all_lits);
        let rhead = renamed[0].clone();
        let rbody: Vec<Literal> = renamed[1..].to_vec();
        return branches(
            se,
            plan,
            &rhead,
            &rbody,
            args,
            dual_parity,
            user_naf,
            depth,
            &st0,
            &chs,
            k,
        );
    }

    let vtop = state.next_var_id();
    match cover(
        se,
        plan,
        args,
        dual_parity,
        user_naf,
        depth,
        &BTreeMap::new(),
        vtop,
        state,
        chs,
    ) {
        Some((mut s, c, n, vend)) => {
            s.raise_next_var(vend);
            k(se, s, c, n)
        }
        None => Flow::More,
    }
}

/// Branch disjunction for one clause dual: disequality branches against
/// ground head positions first, then one branch per body position keeping
/// the prefix as written and flipping the pivot.
#[allow(clippy::too_many_arguments)]
fn branches(
    se: &mut Search,
    plan: &DualClause,
    rhead: &Literal,
    rbody: &[Literal],
    args: &[Term],
    dual_parity: u32,
    user_naf: Option<&Literal>,
    depth: usize,
    state: &ConstraintState,
    chs: &Chs,
    sink: &mut SeqCont,
) -> Flow {
    for &pos in &plan.neq_positions {
        if let Some(s2) = state.add_disequality(&args[pos], &rhead.args[pos]) {
            if s2.pending_count() == state.pending_count() {
                // The mismatch is already decided, so this clause cannot
                // apply and the other branches are redundant alternatives.
                return sink(se, s2, chs.clone(), Vec::new());
            }
            if sink(se, s2, chs.clone(), Vec::new()) == Flow::Halt {
                return Flow::Halt;
            }
        }
    }
    if rbody.is_empty() {
        return Flow::More;
    }
    let Some(head_state) = state.unify_seq(args, &rhead.args) else {
        return Flow::More;
    };
    for pivot in 0..rbody.len() {
        let mut items: Vec<(Literal, bool)> =
            rbody[..pivot].iter().map(|l| (l.clone(), true)).collect();
        items.push((rbody[pivot].flipped(), false));
        let flow = solve_seq(
            se,
            &items,
            0,
            dual_parity,
            user_naf,
            depth,
            head_state.clone(),
            chs.clone(),
            &[],
            sink,
        );
        if flow == Flow::Halt {
            return Flow::Halt;
        }
    }
    Flow::More
}

/// Constrained search for a clause dual with body-only variables: find a
/// branch solution generic in the unfixed body variables, then cover every
/// excluded value recursively with the clause freshly renamed, threading
/// the call history and the variable counter through the rounds.
#[allow(clippy::too_many_arguments)]
fn cover(
    se: &mut Search,
    plan: &DualClause,
    args: &[Term],
    dual_parity: u32,
    user_naf: Option<&Literal>,
    depth: usize,
    bound: &BTreeMap<VarId, Term>,
    vtop: VarId,
    state: ConstraintState,
    chs: Chs,
) -> Option<(ConstraintState, Chs, Vec<JustificationNode>, VarId)> {
    let all_lits: Vec<Literal> = {
        let c = &se.prog.source.clauses[plan.clause_idx];
        std::iter::once(c.head.clone())
            .chain(c.body.iter().cloned())
            .collect()
    };
    let mut base = state.clone();
    base.raise_next_var(vtop);
    let (mut st0, renamed, map) = base.rename_literals(&all_lits);
    let rhead = renamed[0].clone();
    let rbody: Vec<Literal> = renamed[1..].to_vec();
    for (ov, value) in bound {
        st0 = st0.unify(&Term::Var(map[ov]), value)?;
    }
    let check: Vec<(VarId, VarId)> = plan
        .forall_vars
        .iter()
        .filter(|v| !bound.contains_key(v))
        .map(|v| (*v, map[v]))
        .collect();

    let mut hit: Option<(ConstraintState, Chs, Vec<JustificationNode>)> = None;
    branches(
        se,
        plan,
        &rhead,
        &rbody,
        args,
        dual_parity,
        user_naf,
        depth,
        &st0,
        &chs,
        &mut |_se, s, c, n| {
            let grounded = check
                .iter()
                .any(|(_, w)| !matches!(s.resolve(&Term::Var(*w)), Term::Var(_)));
            if grounded {
                return Flow::More;
            }
            hit = Some((s, c, n));
            Flow::Halt
        },
    );
    let (general_state, mut cur_chs, mut nodes) = hit?;
    let mut vend = general_state.next_var_id();
    for (ov, w) in &check {
        let root = match general_state.resolve(&Term::Var(*w)) {
            Term::Var(r) => r,
            _ => continue,
        };
        for value in general_state.excluded_terms(root) {
            let mut bound2 = bound.clone();
            bound2.insert(*ov, value);
            let (_, c2, n2, v2) = cover(
                se,
                plan,
                args,
                dual_parity,
                user_naf,
                depth,
                &bound2,
                vend,
                state.clone(),
                cur_chs,
            )?;
            cur_chs = c2;
            nodes.extend(n2);
            vend = v2;
        }
    }
    Some((general_state, cur_chs, nodes, vend))
}

/// A candidate answer: run the consistency checks, reject models holding a
/// literal together with its classical negation, then assemble the answer.
fn finish_answer(
    se: &mut Search,
    query: &Query,
    state: ConstraintState,
    chs: Chs,
    nodes: Vec<JustificationNode>,
) -> Flow {
    let node_ref = &nodes;
    run_consistency(se, 0, state, chs, &mut |se2, st2, chs2| {
        if !denials_hold(se2, &st2, &chs2) {
            return Flow::More;
        }
        match build_answer(se2.prog, query, &st2, &chs2, node_ref) {
            Some(answer) => {
                se2.answers.push(answer);
                if se2.opts.max_answers != 0 && se2.answers.len() >= se2.opts.max_answers {
                    Flow::Halt
                } else {
                    Flow::More
                }
            }
            None => Flow::More,
        }
    })
}

/// Checks each loop closing clause against the candidate: for the clause
/// `h :- b1, ..., bk` some prefix must fail or the head must hold, all
/// evaluated in the candidate's call history so new assumptions are kept
/// and contradictions with committed literals are caught.
fn run_consistency(
    se: &mut Search,
    i: usize,
    state: ConstraintState,
    chs: Chs,
    k: &mut dyn FnMut(&mut Search, ConstraintState, Chs) -> Flow,
) -> Flow {
    let list = se.prog.consistency_clauses.clone();
    if i == list.len() {
        return k(se, state, chs);
    }
    let ci = list[i];
    let all_lits: Vec<Literal> = {
        let c = &se.prog.source.clauses[ci];
        std::iter::once(c.head.clone())
            .chain(c.body.iter().cloned())
            .collect()
    };
    let (st0, renamed, _) = state.rename_literals(&all_lits);
    let rhead = renamed[0].clone();
    let rbody: Vec<Literal> = renamed[1..].to_vec();
    for pivot in 0..=rbody.len() {
        let items: Vec<(Literal, bool)> = if pivot < rbody.len() {
            let mut v: Vec<(Literal, bool)> =
                rbody[..pivot].iter().map(|l| (l.clone(), true)).collect();
            v.push((rbody[pivot].flipped(), false));
            v
        } else {
            let mut v: Vec<(Literal, bool)> =
                rbody.iter().map(|l| (l.clone(), true)).collect();
            v.push((rhead.clone(), false));
            v
        };
        let flow = solve_seq(
            se,
            &items,
            0,
            0,
            None,
            0,
            st0.clone(),
            chs.clone(),
            &[],
            &mut |se2, st2, chs2, _nodes| run_consistency(se2, i + 1, st2, chs2, k),
        );
        if flow == Flow::Halt {
            return Flow::Halt;
        }
    }
    Flow::More
}

/// True when no denial body succeeds in the candidate's call history.
fn denials_hold(se: &mut Search, state: &ConstraintState, chs: &Chs) -> bool {
    let denials = se.prog.denials.clone();
    for (kp, kn) in denials {
        let mut st = state.clone();
        let args: Vec<Term> = (0..kp.arity).map(|_| Term::Var(st.fresh_var())).collect();
        let items = vec![
            (
                Literal {
                    naf: false,
                    strong_neg: false,
                    pred: kp.name.clone(),
                    args: args.clone(),
                },
                false,
            ),
            (
                Literal {
                    naf: false,
                    strong_neg: true,
                    pred: kn.name.clone(),
                    args,
                },
                false,
            ),
        ];
        let mut violated = false;
        solve_seq(
            se,
            &items,
            0,
            0,
            None,
            0,
            st,
            chs.clone(),
            &[],
            &mut |_se, _st, _chs, _nodes| {
                violated = true;
                Flow::Halt
            },
        );
        if violated {
            return false;
        }
    }
    true
}

fn hidden(prog: &CompiledProgram, key: &PredKey) -> bool {
    prog.hidden.contains(key)
}

fn build_answer(
    prog: &CompiledProgram,
    query: &Query,
    state: &ConstraintState,
    chs: &Chs,
    nodes: &[JustificationNode],
) -> Option<Answer> {
    // reject a model carrying a literal and its classical negation
    let mut plain = BTreeSet::new();
    let mut negated = BTreeSet::new();
    for e in &chs.entries {
        let Some(d) = e.done else { continue };
        if d.neg {
            continue;
        }
        let sig = format!(
            "{}({})",
            e.key.name,
            e.args
                .iter()
                .map(|a| state.apply(a).to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        if e.key.strong_neg {
            negated.insert(sig);
        } else {
            plain.insert(sig);
        }
    }
    if plain.intersection(&negated).next().is_some() {
        return None;
    }

    let applied_sig = |l: &Literal| state.apply_literal(l).to_string();

    // positive assumption records, for promoting rule heads whose body
    // rests on a hidden assumed literal
    let positive_records: BTreeSet<String> = chs
        .records
        .iter()
        .filter(|r| !r.literal.naf)
        .map(|r| applied_sig(&r.literal))
        .collect();
    let mut promoted: Vec<Literal> = Vec::new();
    let mut promoted_sigs: BTreeSet<String> = BTreeSet::new();
    fn promote_walk(
        prog: &CompiledProgram,
        state: &ConstraintState,
        positive_records: &BTreeSet<String>,
        node: &JustificationNode,
        promoted: &mut Vec<Literal>,
        promoted_sigs: &mut BTreeSet<String>,
    ) {
        if matches!(node.kind, NodeKind::Rule(_) | NodeKind::Fact)
            && !node.literal.naf
            && !hidden(prog, &node.literal.key())
        {
            let rests_on_hidden_assumption = node.children.iter().any(|c| {
                !c.literal.naf
                    && hidden(prog, &c.literal.key())
                    && positive_records.contains(&state.apply_literal(&c.literal).to_string())
            });
            if rests_on_hidden_assumption {
                let lit = state.apply_literal(&node.literal);
                if promoted_sigs.insert(lit.to_string()) {
                    promoted.push(lit);
                }
            }
        }
        for c in &node.children {
            promote_walk(prog, state, positive_records, c, promoted, promoted_sigs);
        }
    }
    for n in nodes {
        promote_walk(
            prog,
            state,
            &positive_records,
            n,
            &mut promoted,
            &mut promoted_sigs,
        );
    }

    let mut model: Vec<ModelLiteral> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for e in &chs.entries {
        let Some(d) = e.done else { continue };
        let lit = Literal {
            naf: d.neg,
            strong_neg: e.key.strong_neg,
            pred: e.key.name.clone(),
            args: e.args.iter().map(|a| state.apply(a)).collect(),
        };
        if hidden(prog, &e.key) {
            continue;
        }
        let sig = lit.to_string();
        if !d.neg {
            if seen.insert(sig.clone()) {
                let assumed = d.assumed || promoted_sigs.contains(&sig);
                model.push(ModelLiteral { literal: lit, assumed });
            }
        } else if d.used_assumption && seen.insert(sig) {
            model.push(ModelLiteral {
                literal: lit,
                assumed: d.assumed,
            });
        }
    }
    // the query literals themselves always belong to the reported model
    for l in &query.literals {
        let lit = state.apply_literal(l);
        let sig = lit.to_string();
        if seen.insert(sig.clone()) {
            let assumed = chs
                .records
                .iter()
                .any(|r| applied_sig(&r.literal) == sig);
            model.push(ModelLiteral { literal: lit, assumed });
        }
    }

    let mut neg_extras: Vec<ModelLiteral> = Vec::new();
    for e in &chs.entries {
        let Some(d) = e.done else { continue };
        if !d.neg || hidden(prog, &e.key) {
            continue;
        }
        let lit = Literal {
            naf: true,
            strong_neg: e.key.strong_neg,
            pred: e.key.name.clone(),
            args: e.args.iter().map(|a| state.apply(a)).collect(),
        };
        if seen.insert(lit.to_string()) {
            neg_extras.push(ModelLiteral {
                literal: lit,
                assumed: d.assumed,
            });
        }
    }

    let mut assumptions: Vec<Literal> = Vec::new();
    let mut assumed_sigs: BTreeSet<String> = BTreeSet::new();
    for r in &chs.records {
        for lit in std::iter::once(&r.literal).chain(r.enclosing.iter()) {
            if hidden(prog, &lit.key()) {
                continue;
            }
            let applied = state.apply_literal(lit);
            if assumed_sigs.insert(applied.to_string()) {
                assumptions.push(applied);
            }
        }
    }
    for lit in promoted {
        if assumed_sigs.insert(lit.to_string()) {
            assumptions.push(lit);
        }
    }

    let bindings: Vec<(String, Term)> = query
        .var_names
        .iter()
        .map(|(id, name)| (name.clone(), state.apply(&Term::Var(*id))))
        .collect();

    let justification = if nodes.len() == 1 {
        nodes[0].clone()
    } else {
        JustificationNode {
            literal: Literal::new("query", Vec::new()),
            kind: NodeKind::Root,
            children: nodes.to_vec(),
        }
    };

    Some(Answer {
        bindings,
        model,
        neg_extras,
        assumptions,
        justification,
        constraints: state.clone(),
    })
}
