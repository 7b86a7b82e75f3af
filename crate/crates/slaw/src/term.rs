//! Terms, literals and predicate keys for the rule language.
//!
//! Terms live in the Herbrand domain: variables, constants and compound
//! terms. A literal is an atom with two independent negation markers:
//! `strong_neg` is classical negation and forms part of the predicate
//! identity, while `naf` marks negation as failure on the whole atom.

use std::collections::BTreeSet;
use std::fmt;

/// Identity of a variable. Display names are assigned separately.
pub type VarId = u64;

/// A first order term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(VarId),
    Const(String),
    Compound(String, Vec<Term>),
}

impl Term {
    /// Collects every variable occurring in the term.
    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Const(_) => {}
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }
}

/// True when an atom name can be written without quotes.
pub fn plain_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Writes an atom name, quoting and escaping it when necessary.
pub fn write_atom<W: fmt::Write>(f: &mut W, s: &str) -> fmt::Result {
    if plain_atom(s) {
        f.write_str(s)
    } else {
        write!(f, "'")?;
        for c in s.chars() {
            match c {
                '\'' => write!(f, "\\'")?,
                '\\' => write!(f, "\\\\")?,
                '\n' => write!(f, "\\n")?,
                '\t' => write!(f, "\\t")?,
                _ => write!(f, "{c}")?,
            }
        }
        write!(f, "'")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "V{v}"),
            Term::Const(c) => write_atom(f, c),
            Term::Compound(name, args) => {
                write_atom(f, name)?;
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Identity of a predicate: name, arity and classical negation marker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredKey {
    pub name: String,
    pub arity: usize,
    pub strong_neg: bool,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.strong_neg {
            write!(f, "-")?;
        }
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// An atom with optional classical negation and optional naf wrapper.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub naf: bool,
    pub strong_neg: bool,
    pub pred: String,
    pub args: Vec<Term>,
}

/// Predicate name of the built-in disequality goal `A \= B`.
pub const NEQ: &str = "\\=";

impl Literal {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            naf: false,
            strong_neg: false,
            pred: pred.into(),
            args,
        }
    }

    pub fn diseq(naf: bool, lhs: Term, rhs: Term) -> Self {
        Literal {
            naf,
            strong_neg: false,
            pred: NEQ.to_string(),
            args: vec![lhs, rhs],
        }
    }

    pub fn is_diseq(&self) -> bool {
        self.pred == NEQ && self.args.len() == 2
    }

    pub fn key(&self) -> PredKey {
        PredKey {
            name: self.pred.clone(),
            arity: self.args.len(),
            strong_neg: self.strong_neg,
        }
    }

    /// The literal with the naf wrapper removed.
    pub fn atom(&self) -> Literal {
        let mut l = self.clone();
        l.naf = false;
        l
    }

    /// The literal with the naf wrapper toggled.
    pub fn flipped(&self) -> Literal {
        let mut l = self.clone();
        l.naf = !l.naf;
        l
    }

    pub fn with_naf(&self, naf: bool) -> Literal {
        let mut l = self.clone();
        l.naf = naf;
        l
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.naf {
            write!(f, "not ")?;
        }
        if self.is_diseq() {
            return write!(f, "{} \\= {}", self.args[0], self.args[1]);
        }
        if self.strong_neg {
            write!(f, "-")?;
        }
        write_atom(f, &self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_atoms_do_not_need_quotes() {
        assert!(plain_atom("abc"));
        assert!(plain_atom("a1_b2"));
        assert!(!plain_atom("Abc"));
        assert!(!plain_atom("2nd"));
        assert!(!plain_atom("has space"));
        assert!(!plain_atom(""));
    }

    #[test]
    fn display_quotes_when_needed() {
        let t = Term::Const("2nd ESO".to_string());
        assert_eq!(t.to_string(), "'2nd ESO'");
        let t = Term::Const("abc".to_string());
        assert_eq!(t.to_string(), "abc");
    }

    #[test]
    fn display_literal_with_markers() {
        let mut l = Literal::new("p", vec![Term::Const("a".into()), Term::Var(3)]);
        assert_eq!(l.to_string(), "p(a,V3)");
        l.strong_neg = true;
        l.naf = true;
        assert_eq!(l.to_string(), "not -p(a,V3)");
    }

    #[test]
    fn key_separates_polarities() {
        let p = Literal::new("p", vec![Term::Const("a".into())]);
        let mut np = p.clone();
        np.strong_neg = true;
        assert_ne!(p.key(), np.key());
        assert_eq!(p.key().to_string(), "p/1");
        assert_eq!(np.key().to_string(), "-p/1");
    }

    #[test]
    fn collect_vars_walks_compounds() {
        let t = Term::Compound(
            "f".into(),
            vec![Term::Var(1), Term::Compound("g".into(), vec![Term::Var(2)])],
        );
        let mut vs = BTreeSet::new();
        t.collect_vars(&mut vs);
        assert_eq!(vs.into_iter().collect::<Vec<_>>(), vec![1, 2]);
    }
}
