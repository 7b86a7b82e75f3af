//! Goal-directed answer set reasoning over legal rule bases, with
//! natural-language justifications.
//!
//! The engine evaluates queries top down against a normal logic program
//! with default and classical negation, without grounding it first.
//! Negated goals are settled through dual rules computed at compile time,
//! loops are closed coinductively under recorded assumptions, and every
//! answer comes with the partial stable model it commits to and a proof
//! tree that renders as readable text through per-predicate description
//! templates.
//!
//! Pipeline: [`parser`] turns source text into clauses, templates and
//! queries; [`compiler`] indexes clauses and derives dual plans and
//! checks; [`solver`] evaluates queries; [`justify`] shapes and renders
//! proof trees; [`epistemic`] aggregates across answers; [`corpus`] loads
//! the bundled school admission scenarios.

pub mod compiler;
pub mod constraint;
pub mod corpus;
pub mod epistemic;
pub mod justify;
pub mod parser;
pub mod solver;
pub mod term;

pub use compiler::{compile, CompiledProgram};
pub use constraint::ConstraintState;
pub use epistemic::ModelSet;
pub use justify::{Detail, JustificationNode, Mode, NodeKind, RenderOptions, Style, VarNamer};
pub use parser::{parse_program, parse_program_str, parse_query, ParseError, Query, SourceProgram};
pub use solver::{solve, Answer, ModelLiteral, SolveResult, SolverOptions};
pub use term::{Literal, PredKey, Term, VarId};
