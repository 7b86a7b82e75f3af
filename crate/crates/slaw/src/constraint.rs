//! Substitution and disequality store.
//!
//! The constraint state is a value: operations return a fresh state instead
//! of mutating in place, so search branches can keep independent copies.
//! Unification uses the occurs check. Disequality constraints are kept as
//! pending term pairs; a pending pair is discharged as soon as the two sides
//! become non-unifiable and violated as soon as they become identical.

use crate::term::{Literal, Term, VarId};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Default)]
pub struct ConstraintState {
    bindings: BTreeMap<VarId, Term>,
    pending: Vec<(Term, Term)>,
    next_var: VarId,
}

/// Outcome of probing whether two terms unify under the current bindings.
enum Probe {
    /// Not unifiable: a disequality over the pair holds for good.
    Clash,
    /// Already identical: a disequality over the pair is violated.
    Identical,
    /// Unifiable by binding at least one variable: still undecided.
    Open,
}

impl ConstraintState {
    pub fn new(next_var: VarId) -> Self {
        ConstraintState {
            bindings: BTreeMap::new(),
            pending: Vec::new(),
            next_var,
        }
    }

    /// Follows variable bindings until the top of the term is not a bound
    /// variable. Does not descend into compound arguments.
    pub fn resolve(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = cur {
            match self.bindings.get(&v) {
                Some(next) => cur = next.clone(),
                None => return Term::Var(v),
            }
        }
        cur
    }

    /// Applies the substitution throughout the term.
    pub fn apply(&self, t: &Term) -> Term {
        match self.resolve(t) {
            Term::Var(v) => Term::Var(v),
            Term::Const(c) => Term::Const(c),
            Term::Compound(name, args) => {
                Term::Compound(name, args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            naf: l.naf,
            strong_neg: l.strong_neg,
            pred: l.pred.clone(),
            args: l.args.iter().map(|a| self.apply(a)).collect(),
        }
    }

    fn occurs(&self, v: VarId, t: &Term) -> bool {
        match self.resolve(t) {
            Term::Var(w) => v == w,
            Term::Const(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    /// Destructive unification on `self`; used on scratch copies only.
    fn unify_raw(&mut self, a: &Term, b: &Term) -> bool {
        let ra = self.resolve(a);
        let rb = self.resolve(b);
        match (ra, rb) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(x, &t) {
                    return false;
                }
                self.bindings.insert(x, t);
                true
            }
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify_raw(x, y))
            }
            _ => false,
        }
    }

    fn probe(&self, a: &Term, b: &Term) -> Probe {
        let mut scratch = self.clone();
        let before = scratch.bindings.len();
        if !scratch.unify_raw(a, b) {
            Probe::Clash
        } else if scratch.bindings.len() == before {
            Probe::Identical
        } else {
            Probe::Open
        }
    }

    /// Re-examines pending disequalities after new bindings. Returns false
    /// when some disequality became violated.
    fn recheck_pending(&mut self) -> bool {
        let pairs = std::mem::take(&mut self.pending);
        for (a, b) in pairs {
            match self.probe(&a, &b) {
                Probe::Clash => {}
                Probe::Identical => return false,
                Probe::Open => self.pending.push((a, b)),
            }
        }
        true
    }

    pub fn unify(&self, a: &Term, b: &Term) -> Option<Self> {
        let mut next = self.clone();
        if !next.unify_raw(a, b) {
            return None;
        }
        if !next.recheck_pending() {
            return None;
        }
        Some(next)
    }

    pub fn unify_seq(&self, xs: &[Term], ys: &[Term]) -> Option<Self> {
        if xs.len() != ys.len() {
            return None;
        }
        let mut next = self.clone();
        for (x, y) in xs.iter().zip(ys.iter()) {
            if !next.unify_raw(x, y) {
                return None;
            }
        }
        if !next.recheck_pending() {
            return None;
        }
        Some(next)
    }

    /// Adds the constraint `a != b`. Returns None when the constraint is
    /// already violated, and an unchanged state when it already holds.
    pub fn add_disequality(&self, a: &Term, b: &Term) -> Option<Self> {
        match self.probe(a, b) {
            Probe::Clash => Some(self.clone()),
            Probe::Identical => None,
            Probe::Open => {
                let pa = self.apply(a);
                let pb = self.apply(b);
                let mut next = self.clone();
                if !next.pending.iter().any(|(x, y)| *x == pa && *y == pb) {
                    next.pending.push((pa, pb));
                }
                Some(next)
            }
        }
    }

    /// Ground terms an unbound variable is constrained to differ from, in
    /// the order the constraints were recorded.
    pub fn excluded_terms(&self, v: VarId) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for (a, b) in &self.pending {
            for (side, other) in [(a, b), (b, a)] {
                if let Term::Var(w) = self.resolve(side) {
                    if w == v {
                        let o = self.apply(other);
                        if o.is_ground() && !out.contains(&o) {
                            out.push(o);
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of pending disequalities, used to detect whether an
    /// `add_disequality` call constrained anything or merely discharged.
    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    /// True when the variable participates in any pending disequality.
    pub fn is_constrained(&self, v: VarId) -> bool {
        self.pending.iter().any(|(a, b)| {
            matches!(self.resolve(a), Term::Var(w) if w == v)
                || matches!(self.resolve(b), Term::Var(w) if w == v)
        })
    }

    pub fn fresh_var(&mut self) -> VarId {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    pub fn next_var_id(&self) -> VarId {
        self.next_var
    }

    /// Raises the fresh variable counter so ids handed out later cannot
    /// collide with ones minted in a sibling search.
    pub fn raise_next_var(&mut self, floor: VarId) {
        if floor > self.next_var {
            self.next_var = floor;
        }
    }

    /// Copies the literals with every variable consistently replaced by a
    /// fresh one. Returns the renamed literals and the renaming map.
    pub fn rename_literals(
        &self,
        lits: &[Literal],
    ) -> (Self, Vec<Literal>, BTreeMap<VarId, VarId>) {
        let mut next = self.clone();
        let mut map: BTreeMap<VarId, VarId> = BTreeMap::new();
        let mut vars = BTreeSet::new();
        for l in lits {
            l.collect_vars(&mut vars);
        }
        for v in vars {
            let f = next.fresh_var();
            map.insert(v, f);
        }
        let renamed = lits
            .iter()
            .map(|l| Literal {
                naf: l.naf,
                strong_neg: l.strong_neg,
                pred: l.pred.clone(),
                args: l.args.iter().map(|a| rename_term(a, &map)).collect(),
            })
            .collect();
        (next, renamed, map)
    }
}

fn rename_term(t: &Term, map: &BTreeMap<VarId, VarId>) -> Term {
    match t {
        Term::Var(v) => Term::Var(*map.get(v).expect("variable missing from renaming")),
        Term::Const(c) => Term::Const(c.clone()),
        Term::Compound(name, args) => Term::Compound(
            name.clone(),
            args.iter().map(|a| rename_term(a, map)).collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Term {
        Term::Const(s.to_string())
    }

    fn f(name: &str, args: Vec<Term>) -> Term {
        Term::Compound(name.to_string(), args)
    }

    #[test]
    fn unify_binds_and_applies() {
        let st = ConstraintState::new(10);
        let st = st.unify(&Term::Var(0), &c("a")).unwrap();
        assert_eq!(st.apply(&Term::Var(0)), c("a"));
    }

    #[test]
    fn unify_compound_structures() {
        let st = ConstraintState::new(10);
        let st = st
            .unify(
                &f("f", vec![Term::Var(0), c("b")]),
                &f("f", vec![c("a"), Term::Var(1)]),
            )
            .unwrap();
        assert_eq!(st.apply(&Term::Var(0)), c("a"));
        assert_eq!(st.apply(&Term::Var(1)), c("b"));
    }

    #[test]
    fn unify_fails_on_clash() {
        let st = ConstraintState::new(10);
        assert!(st.unify(&c("a"), &c("b")).is_none());
        assert!(st
            .unify(&f("f", vec![c("a")]), &f("g", vec![c("a")]))
            .is_none());
    }

    #[test]
    fn occurs_check_rejects_cyclic_binding() {
        let st = ConstraintState::new(10);
        assert!(st
            .unify(&Term::Var(0), &f("f", vec![Term::Var(0)]))
            .is_none());
    }

    #[test]
    fn ground_disequality_is_discharged_or_violated() {
        let st = ConstraintState::new(10);
        let kept = st.add_disequality(&c("a"), &c("b")).unwrap();
        assert!(kept.excluded_terms(0).is_empty());
        assert!(st.add_disequality(&c("a"), &c("a")).is_none());
    }

    #[test]
    fn open_disequality_blocks_later_binding() {
        let st = ConstraintState::new(10);
        let st = st.add_disequality(&Term::Var(0), &c("a")).unwrap();
        assert!(st.unify(&Term::Var(0), &c("a")).is_none());
        let ok = st.unify(&Term::Var(0), &c("b")).unwrap();
        assert_eq!(ok.apply(&Term::Var(0)), c("b"));
    }

    #[test]
    fn excluded_terms_keep_insertion_order() {
        let st = ConstraintState::new(10);
        let st = st.add_disequality(&Term::Var(0), &c("x")).unwrap();
        let st = st.add_disequality(&Term::Var(0), &c("y")).unwrap();
        let st = st.add_disequality(&Term::Var(0), &c("x")).unwrap();
        assert_eq!(st.excluded_terms(0), vec![c("x"), c("y")]);
        assert!(st.is_constrained(0));
        assert!(!st.is_constrained(1));
    }

    #[test]
    fn disequality_transfers_through_aliasing() {
        let st = ConstraintState::new(10);
        let st = st.add_disequality(&Term::Var(0), &c("a")).unwrap();
        let st = st.unify(&Term::Var(0), &Term::Var(1)).unwrap();
        assert!(st.unify(&Term::Var(1), &c("a")).is_none());
    }

    #[test]
    fn rename_gives_fresh_consistent_vars() {
        let st = ConstraintState::new(5);
        let lit = Literal::new("p", vec![Term::Var(0), Term::Var(0), Term::Var(1)]);
        let (st2, renamed, map) = st.rename_literals(&[lit]);
        let Term::Var(a) = renamed[0].args[0] else {
            panic!()
        };
        let Term::Var(b) = renamed[0].args[1] else {
            panic!()
        };
        let Term::Var(c) = renamed[0].args[2] else {
            panic!()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a >= 5 && c >= 5);
        assert_eq!(map.len(), 2);
        let mut st3 = st2;
        assert!(st3.fresh_var() > c.max(a));
    }
}
