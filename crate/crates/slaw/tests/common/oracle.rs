//! Brute force stable model oracle for ground normal programs.
//!
//! This module is deliberately independent of the engine crate. It keeps its
//! own rule representation, enumerates every interpretation over the Herbrand
//! base, and checks the Gelfond-Lifschitz reduct condition directly. Tests use
//! it as ground truth; the engine must never call into it.

use std::collections::BTreeSet;

/// A ground normal rule `head :- pos, not neg`.
///
/// Atoms are indices into [`GroundProgram::atom_names`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub head: usize,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

/// A ground normal program over a fixed atom vocabulary.
#[derive(Debug, Clone, Default)]
pub struct GroundProgram {
    pub atom_names: Vec<String>,
    pub rules: Vec<GroundRule>,
}

impl GroundProgram {
    pub fn new(atom_names: &[&str]) -> Self {
        GroundProgram {
            atom_names: atom_names.iter().map(|s| s.to_string()).collect(),
            rules: Vec::new(),
        }
    }

    pub fn rule(&mut self, head: usize, pos: &[usize], neg: &[usize]) {
        assert!(head < self.atom_names.len());
        self.rules.push(GroundRule {
            head,
            pos: pos.to_vec(),
            neg: neg.to_vec(),
        });
    }

    /// Least model of the positive program obtained by deleting rules whose
    /// negative body intersects `interp` and dropping negative bodies.
    fn reduct_least_model(&self, interp: &BTreeSet<usize>) -> BTreeSet<usize> {
        let kept: Vec<&GroundRule> = self
            .rules
            .iter()
            .filter(|r| r.neg.iter().all(|a| !interp.contains(a)))
            .collect();
        let mut model = BTreeSet::new();
        loop {
            let mut changed = false;
            for r in &kept {
                if !model.contains(&r.head) && r.pos.iter().all(|a| model.contains(a)) {
                    model.insert(r.head);
                    changed = true;
                }
            }
            if !changed {
                return model;
            }
        }
    }

    /// All stable models, by exhaustive enumeration of the 2^n candidate
    /// interpretations. Only usable for small programs.
    pub fn stable_models(&self) -> Vec<BTreeSet<usize>> {
        let n = self.atom_names.len();
        assert!(n <= 20, "oracle is exponential; keep programs small");
        let mut out = Vec::new();
        for bits in 0u32..(1u32 << n) {
            let interp: BTreeSet<usize> = (0..n).filter(|i| bits & (1 << i) != 0).collect();
            if self.reduct_least_model(&interp) == interp {
                out.push(interp);
            }
        }
        out
    }

    /// True if `atom` belongs to at least one stable model.
    pub fn brave_true(&self, atom: usize) -> bool {
        self.stable_models().iter().any(|m| m.contains(&atom))
    }

    /// True if some stable model omits `atom`. With no stable models this is
    /// false, matching the convention that `not a` needs a witness model.
    pub fn some_model_omits(&self, atom: usize) -> bool {
        self.stable_models().iter().any(|m| !m.contains(&atom))
    }

    /// The program in ordinary rule syntax, one clause per line.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&self.atom_names[r.head]);
            let mut parts: Vec<String> = Vec::new();
            for a in &r.pos {
                parts.push(self.atom_names[*a].clone());
            }
            for a in &r.neg {
                parts.push(format!("not {}", self.atom_names[*a]));
            }
            if !parts.is_empty() {
                out.push_str(" :- ");
                out.push_str(&parts.join(", "));
            }
            out.push_str(".\n");
        }
        out
    }

    /// Names of atoms in a model, for readable assertions.
    pub fn name_set(&self, m: &BTreeSet<usize>) -> BTreeSet<String> {
        m.iter().map(|a| self.atom_names[*a].clone()).collect()
    }
}

/// Deterministic random program generator for differential testing.
///
/// Produces ground normal programs within the given atom and rule bounds.
/// Duplicate body atoms and duplicate rules are allowed; they are harmless
/// for both the oracle and the engine.
pub fn random_program<R: rand::Rng>(
    rng: &mut R,
    max_atoms: usize,
    max_rules: usize,
) -> GroundProgram {
    const NAMES: [&str; 12] = [
        "a", "b", "c", "d", "e", "f", "g", "h", "i0", "j", "k", "l",
    ];
    let n_atoms = rng.gen_range(1..=max_atoms.min(NAMES.len()));
    let mut p = GroundProgram::new(&NAMES[..n_atoms]);
    let n_rules = rng.gen_range(0..=max_rules);
    for _ in 0..n_rules {
        let head = rng.gen_range(0..n_atoms);
        let body_len = rng.gen_range(0..=3usize);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for _ in 0..body_len {
            let atom = rng.gen_range(0..n_atoms);
            if rng.gen_bool(0.5) {
                pos.push(atom);
            } else {
                neg.push(atom);
            }
        }
        p.rule(head, &pos, &neg);
    }
    p
}
