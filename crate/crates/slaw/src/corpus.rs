//! Loading and composing the school admission corpus.
//!
//! The corpus lives in the `corpus/` directory at the repository root:
//! the rule base, its natural language descriptions, the evidence bridge,
//! the shared context, the combined scenario program and one case file
//! per student. This module loads those files, validates case files and
//! composes a case with the rule base into a runnable program. It also
//! carries the report policy: the bookkeeping predicates kept out of
//! reported models.

use crate::compiler::{compile, CompiledProgram};
use crate::parser::{parse_program, ParseError, SourceProgram};
use crate::term::{PredKey, Term};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// The evidence kinds case files may record, one per assumable condition.
pub const EVIDENCE_KINDS: [&str; 7] = [
    "large_family",
    "renta_minima_insercion",
    "sibling_enroll_center",
    "same_education_district",
    "b1_certificate",
    "foreign_student",
    "specific_etnia",
];

/// The admission outcome of each bundled scenario under its first answer.
pub const ADMISSION_OUTCOMES: [(&str, bool); 6] = [
    ("st01", true),
    ("st02", false),
    ("st03", true),
    ("st04", true),
    ("st05", true),
    ("st06", false),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct EvidenceRecord {
    pub subject: String,
    pub kind: String,
    pub polarity: Polarity,
}

/// A validated case file: the students it declares and their evidence.
#[derive(Debug, Clone, Default)]
pub struct CaseFile {
    pub students: Vec<String>,
    pub records: Vec<EvidenceRecord>,
    /// Non-fatal oddities, such as evidence kinds the bridge ignores.
    pub warnings: Vec<String>,
}

impl CaseFile {
    pub fn polarity(&self, subject: &str, kind: &str) -> Polarity {
        self.records
            .iter()
            .find(|r| r.subject == subject && r.kind == kind)
            .map(|r| r.polarity)
            .unwrap_or(Polarity::Unknown)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{file}:{line}: case files hold ground facts only, found {found}")]
    NotACaseFact {
        file: String,
        line: u32,
        found: String,
    },
    #[error("{file}: conflicting evidence for {subject} on {kind}")]
    ConflictingEvidence {
        file: String,
        subject: String,
        kind: String,
    },
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The corpus directory, resolved relative to this crate's manifest.
pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("corpus")
}

/// An include resolver over the filesystem: targets resolve relative to
/// the directory of the including file.
pub fn resolve_fs_include(target: &str, from: &str) -> Result<(String, String), String> {
    let base = Path::new(from)
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let path = base.join(target);
    let canonical = path
        .canonicalize()
        .map_err(|e| format!("{}: {}", path.display(), e))?;
    let text = std::fs::read_to_string(&canonical)
        .map_err(|e| format!("{}: {}", canonical.display(), e))?;
    Ok((canonical.display().to_string(), text))
}

/// Parses a program file, following its includes on the filesystem.
pub fn parse_program_file(path: &Path) -> Result<SourceProgram, CorpusError> {
    let text = read(path)?;
    let mut resolver = resolve_fs_include;
    Ok(parse_program(
        &path.display().to_string(),
        &text,
        &mut resolver,
    )?)
}

/// The report policy for the corpus: bookkeeping predicates whose
/// literals stay out of reported models and assumption lists.
pub fn hidden_predicates() -> BTreeSet<PredKey> {
    let mut set = BTreeSet::new();
    let mut add = |name: &str, arity: usize, strong_neg: bool| {
        set.insert(PredKey {
            name: name.to_string(),
            arity,
            strong_neg,
        });
    };
    add("met_requirement", 1, false);
    add("met_common_requirement", 1, false);
    add("met_specific_requirement", 1, false);
    add("recipient_social_benefits", 1, false);
    add("disability_status", 1, false);
    add("accredit_english", 2, false);
    add("school_criteria", 2, false);
    add("purpose", 1, false);
    add("unlawful", 1, false);
    add("promote_diversity", 1, false);
    add("race_discrimination", 1, false);
    add("sex_discrimination", 1, false);
    add("religion_discrimination", 1, false);
    add("ingreso_minimo_vital", 1, false);
    add("disabled_parent", 1, false);
    add("disabled_sibling", 1, false);
    add("legal_guardian_work_center", 1, false);
    add("relative_former_student", 1, false);
    add("b2_certificate", 1, false);
    add("evidence", 2, false);
    add("evidence", 2, true);
    add("student", 1, false);
    add("assume", 2, false);
    add("n_assume", 2, false);
    add("n_force_majeure", 0, false);
    add("n_met_complement_criterion", 2, false);
    set
}

/// Loads the combined scenario program with the corpus report policy.
pub fn load_default_program() -> Result<CompiledProgram, CorpusError> {
    let source = parse_program_file(&corpus_root().join("students.pl"))?;
    let mut prog = compile(source);
    prog.hidden = hidden_predicates();
    Ok(prog)
}

/// Loads and validates a case file: ground `student/1`, `evidence/2` and
/// `-evidence/2` facts only, with no contradictory evidence.
pub fn load_case_file(path: &Path) -> Result<CaseFile, CorpusError> {
    let file = path.display().to_string();
    let text = read(path)?;
    let source = crate::parser::parse_program_str(&file, &text)?;
    let mut case = CaseFile::default();
    let known: BTreeSet<&str> = EVIDENCE_KINDS.iter().copied().collect();
    for clause in &source.clauses {
        let head = &clause.head;
        let fail = |found: String| CorpusError::NotACaseFact {
            file: file.clone(),
            line: clause.line,
            found,
        };
        if !clause.body.is_empty() || !head.args.iter().all(Term::is_ground) {
            return Err(fail(head.to_string()));
        }
        match (head.pred.as_str(), head.strong_neg, head.args.as_slice()) {
            ("student", false, [Term::Const(s)]) => case.students.push(s.clone()),
            ("evidence", sn, [Term::Const(s), Term::Const(k)]) => {
                let polarity = if sn { Polarity::Negative } else { Polarity::Positive };
                let prior = case.polarity(s, k);
                if prior != Polarity::Unknown && prior != polarity {
                    return Err(CorpusError::ConflictingEvidence {
                        file: file.clone(),
                        subject: s.clone(),
                        kind: k.clone(),
                    });
                }
                if !known.contains(k.as_str()) {
                    case.warnings
                        .push(format!("{file}: no rule consumes evidence kind {k}"));
                }
                if prior == Polarity::Unknown {
                    case.records.push(EvidenceRecord {
                        subject: s.clone(),
                        kind: k.clone(),
                        polarity,
                    });
                }
            }
            _ => return Err(fail(head.to_string())),
        }
    }
    Ok(case)
}

/// Composes a case with the rule base, descriptions, bridge and context
/// into a runnable program carrying the corpus report policy.
pub fn compose_case(case: &CaseFile) -> Result<CompiledProgram, CorpusError> {
    let mut text = String::new();
    text.push_str("#include('ArticleESO.pl').\n");
    text.push_str("#include('ArticleESO.pred.pl').\n");
    text.push_str("#include('evidence_bridge.pl').\n");
    text.push_str("#include('context.pl').\n");
    for s in &case.students {
        writeln!(text, "student({s}).").expect("string formatting cannot fail");
    }
    for r in &case.records {
        let sign = match r.polarity {
            Polarity::Negative => "-",
            _ => "",
        };
        if r.polarity != Polarity::Unknown {
            writeln!(text, "{}evidence({}, {}).", sign, r.subject, r.kind)
                .expect("string formatting cannot fail");
        }
    }
    let anchor = corpus_root().join("case.pl");
    let mut resolver = resolve_fs_include;
    let source = parse_program(&anchor.display().to_string(), &text, &mut resolver)?;
    let mut prog = compile(source);
    prog.hidden = hidden_predicates();
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_program_loads_with_policy() {
        let prog = load_default_program().expect("corpus loads");
        assert!(prog.index.contains_key(&PredKey {
            name: "obtain_place".into(),
            arity: 1,
            strong_neg: false,
        }));
        assert!(prog.hidden.contains(&PredKey {
            name: "assume".into(),
            arity: 2,
            strong_neg: false,
        }));
        assert!(prog.templates.covers_key(&PredKey {
            name: "obtain_place".into(),
            arity: 1,
            strong_neg: false,
        }));
        assert!(prog.consistency_clauses.is_empty());
    }

    #[test]
    fn case_files_load_and_report_polarity() {
        for (student, _) in ADMISSION_OUTCOMES {
            let path = corpus_root().join("cases").join(format!("{student}.pl"));
            let case = load_case_file(&path).expect("case loads");
            assert_eq!(case.students, vec![student.to_string()]);
            assert!(case.warnings.is_empty());
        }
        let st04 = load_case_file(&corpus_root().join("cases").join("st04.pl")).expect("case");
        assert_eq!(st04.polarity("st04", "large_family"), Polarity::Negative);
        assert_eq!(
            st04.polarity("st04", "sibling_enroll_center"),
            Polarity::Positive
        );
        assert_eq!(
            st04.polarity("st04", "renta_minima_insercion"),
            Polarity::Unknown
        );
    }

    #[test]
    fn conflicting_evidence_is_rejected() {
        let dir = std::env::temp_dir().join("slaw_corpus_test_conflict");
        std::fs::create_dir_all(&dir).expect("temp dir");
        let path = dir.join("bad.pl");
        std::fs::write(
            &path,
            "student(s).\nevidence(s, large_family).\n-evidence(s, large_family).\n",
        )
        .expect("write temp case");
        let err = load_case_file(&path).expect_err("conflict detected");
        assert!(matches!(err, CorpusError::ConflictingEvidence { .. }));
    }

    #[test]
    fn non_fact_clauses_are_rejected() {
        let dir = std::env::temp_dir().join("slaw_corpus_test_rule");
        std::fs::create_dir_all(&dir).expect("temp dir");
        let path = dir.join("rule.pl");
        std::fs::write(&path, "student(s) :- evidence(s, large_family).\n").expect("write");
        let err = load_case_file(&path).expect_err("rule rejected");
        assert!(matches!(err, CorpusError::NotACaseFact { .. }));
    }

    #[test]
    fn unknown_kinds_warn_but_load() {
        let dir = std::env::temp_dir().join("slaw_corpus_test_warn");
        std::fs::create_dir_all(&dir).expect("temp dir");
        let path = dir.join("warn.pl");
        std::fs::write(&path, "student(s).\nevidence(s, lottery_winner).\n").expect("write");
        let case = load_case_file(&path).expect("loads with warning");
        assert_eq!(case.warnings.len(), 1);
        assert!(case.warnings[0].contains("lottery_winner"));
    }

    #[test]
    fn composed_case_matches_scenario_program() {
        let case =
            load_case_file(&corpus_root().join("cases").join("st05.pl")).expect("case loads");
        let prog = compose_case(&case).expect("composes");
        assert!(prog.index.contains_key(&PredKey {
            name: "evidence".into(),
            arity: 2,
            strong_neg: false,
        }));
        assert!(prog.index.contains_key(&PredKey {
            name: "obtain_place".into(),
            arity: 1,
            strong_neg: false,
        }));
    }
}
