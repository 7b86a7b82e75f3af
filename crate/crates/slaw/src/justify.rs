//! Justification trees and their rendering.
//!
//! The solver builds one node per proved goal. Rendering shapes that raw
//! tree first: nodes whose predicate has no description template are
//! spliced out (their children take their place), repeated subproof
//! markers that land next to each other are deduplicated, a negated goal
//! whose whole content is the assumption of itself collapses into the
//! assumption line, and in positive mode childless negated leaves are
//! dropped. The shaped tree then renders as indented text, as HTML, or
//! stays available for programmatic inspection.

use crate::compiler::{CompiledProgram, TemplateTable};
use crate::constraint::ConstraintState;
use crate::term::{Literal, Term, VarId};
use std::collections::BTreeMap;

/// One step of a proof: the goal, how it was settled, and the subproofs.
#[derive(Debug, Clone)]
pub struct JustificationNode {
    pub literal: Literal,
    pub kind: NodeKind,
    pub children: Vec<JustificationNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Matched a clause with an empty body.
    Fact,
    /// Matched the clause with this index; children prove its body.
    Rule(usize),
    /// A negated goal proved through the clause duals.
    Dual,
    /// A coinductively closed loop; the goal is assumed.
    Assumption,
    /// The goal was already settled earlier in the proof.
    Repeat,
    /// Artificial root grouping the goals of a conjunctive query.
    Root,
}

/// Which side of the proof to show: positive mode prunes childless
/// negated leaves, negative mode keeps everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pos,
    Neg,
}

/// How much of the tree to show. Short keeps only goals that have a
/// description template. Mid also keeps untemplated assumptions and
/// repeat markers. Long keeps every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detail {
    Short,
    Mid,
    Long,
}

/// Human renders goals through their templates; raw prints the literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Human,
    Raw,
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub mode: Mode,
    pub detail: Detail,
    pub style: Style,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            mode: Mode::Pos,
            detail: Detail::Mid,
            style: Style::Raw,
        }
    }
}

/// Assigns stable display names to variables in order of first use, so
/// bindings, model and tree of one answer agree on the names.
#[derive(Debug, Default, Clone)]
pub struct VarNamer {
    names: BTreeMap<VarId, String>,
    next: usize,
}

impl VarNamer {
    pub fn new() -> Self {
        VarNamer::default()
    }

    /// Pins a display name, used when source names are known.
    pub fn seed(&mut self, id: VarId, name: &str) {
        self.names.insert(id, name.to_string());
    }

    pub fn name(&mut self, id: VarId) -> String {
        if let Some(n) = self.names.get(&id) {
            return n.clone();
        }
        let n = format!("Var{}", self.next);
        self.next += 1;
        self.names.insert(id, n.clone());
        n
    }
}

fn quoted_atom_text(name: &str) -> String {
    let mut s = String::new();
    crate::term::write_atom(&mut s, name).expect("string formatting cannot fail");
    s
}

fn render_term_inner(
    t: &Term,
    state: &ConstraintState,
    namer: &mut VarNamer,
    style: Style,
) -> String {
    match t {
        Term::Var(v) => {
            let base = namer.name(*v);
            let excluded = state.excluded_terms(*v);
            if excluded.is_empty() {
                return base;
            }
            match style {
                Style::Human => {
                    let mut s = format!("{} not equal", base);
                    for (i, e) in excluded.iter().enumerate() {
                        if i == 0 {
                            s.push(' ');
                        } else {
                            s.push_str(", nor ");
                        }
                        s.push_str(&render_term_inner(e, state, namer, style));
                    }
                    s
                }
                Style::Raw => {
                    let parts: Vec<String> = excluded
                        .iter()
                        .map(|e| format!("{} /= {}", base, render_term_inner(e, state, namer, style)))
                        .collect();
                    format!("{{{} | {}}}", base, parts.join(", "))
                }
            }
        }
        Term::Const(c) => match style {
            Style::Human => c.clone(),
            Style::Raw => quoted_atom_text(c),
        },
        Term::Compound(f, args) => {
            let name = match style {
                Style::Human => f.clone(),
                Style::Raw => quoted_atom_text(f),
            };
            let inner: Vec<String> = args
                .iter()
                .map(|a| render_term_inner(a, state, namer, style))
                .collect();
            format!("{}({})", name, inner.join(","))
        }
    }
}

/// Renders a term under the answer's constraints: bound variables show
/// their value, constrained ones their exclusions, free ones a name.
pub fn render_term(
    t: &Term,
    state: &ConstraintState,
    namer: &mut VarNamer,
    style: Style,
) -> String {
    let applied = state.apply(t);
    render_term_inner(&applied, state, namer, style)
}

/// Renders a literal in program syntax, with naf and classical negation
/// prefixes and the style's treatment of variables and quoting.
pub fn render_literal(
    lit: &Literal,
    state: &ConstraintState,
    namer: &mut VarNamer,
    style: Style,
) -> String {
    let mut s = String::new();
    if lit.naf {
        s.push_str("not ");
    }
    if lit.strong_neg {
        s.push('-');
    }
    match style {
        Style::Human => s.push_str(&lit.pred),
        Style::Raw => s.push_str(&quoted_atom_text(&lit.pred)),
    }
    if !lit.args.is_empty() {
        let inner: Vec<String> = lit
            .args
            .iter()
            .map(|a| render_term(a, state, namer, style))
            .collect();
        s.push('(');
        s.push_str(&inner.join(","));
        s.push(')');
    }
    s
}

/// The natural language phrase for a goal's positive part, from its
/// template when one matches and from the literal itself otherwise.
pub fn phrase(
    lit: &Literal,
    templates: &TemplateTable,
    state: &ConstraintState,
    namer: &mut VarNamer,
) -> String {
    let applied = state.apply_literal(lit);
    if let Some(tpl) = templates.lookup(&applied.key(), &applied.args) {
        let mut s = String::new();
        for seg in &tpl.segments {
            match seg {
                crate::parser::TemplateSegment::Text(t) => s.push_str(t),
                crate::parser::TemplateSegment::Arg(i) => {
                    s.push_str(&render_term(&applied.args[*i], state, namer, Style::Human));
                }
            }
        }
        return s;
    }
    let positive = Literal {
        naf: false,
        ..applied
    };
    render_literal(&positive, state, namer, Style::Human)
}

/// A shaped node ready for rendering; literals are fully applied.
#[derive(Debug, Clone)]
pub struct ShapedNode {
    pub literal: Literal,
    pub kind: NodeKind,
    pub children: Vec<ShapedNode>,
}

fn templated(lit: &Literal, prog: &CompiledProgram) -> bool {
    prog.templates.lookup(&lit.key(), &lit.args).is_some()
}

fn visible(lit: &Literal, kind: NodeKind, prog: &CompiledProgram, detail: Detail) -> bool {
    match detail {
        Detail::Long => true,
        Detail::Mid => {
            templated(lit, prog) || matches!(kind, NodeKind::Assumption | NodeKind::Repeat)
        }
        Detail::Short => templated(lit, prog),
    }
}

fn shape_node(
    node: &JustificationNode,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
    is_top: bool,
) -> Vec<ShapedNode> {
    let pass_top = matches!(node.kind, NodeKind::Root);
    let mut kids: Vec<ShapedNode> = Vec::new();
    for c in &node.children {
        kids.extend(shape_node(c, prog, state, opts, pass_top));
    }

    let mut seen_repeats = std::collections::BTreeSet::new();
    kids.retain(|k| match k.kind {
        NodeKind::Repeat => seen_repeats.insert(k.literal.to_string()),
        _ => true,
    });

    if matches!(node.kind, NodeKind::Root) {
        return kids;
    }

    let applied = state.apply_literal(&node.literal);
    if !visible(&applied, node.kind, prog, opts.detail) {
        return kids;
    }

    if !is_top && applied.naf && kids.len() == 1 {
        let only = &kids[0];
        if matches!(only.kind, NodeKind::Assumption) && only.literal == applied {
            return kids;
        }
    }

    if !is_top
        && opts.mode == Mode::Pos
        && applied.naf
        && kids.is_empty()
        && !matches!(node.kind, NodeKind::Assumption)
    {
        return Vec::new();
    }

    vec![ShapedNode {
        literal: applied,
        kind: node.kind,
        children: kids,
    }]
}

/// Shapes a proof tree for display under the given options.
pub fn shape(
    root: &JustificationNode,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
) -> Vec<ShapedNode> {
    shape_node(root, prog, state, opts, true)
}

fn node_line(
    node: &ShapedNode,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
    namer: &mut VarNamer,
) -> String {
    match opts.style {
        Style::Raw => {
            let core = render_literal(&node.literal, state, namer, Style::Raw);
            match node.kind {
                NodeKind::Assumption => format!("it is assumed that {}", core),
                NodeKind::Repeat => format!("{}, justified above", core),
                _ => core,
            }
        }
        Style::Human => {
            let core = phrase(&node.literal, &prog.templates, state, namer);
            let base = if node.literal.naf {
                format!("there is no evidence that {}", core)
            } else {
                core
            };
            match node.kind {
                NodeKind::Assumption => format!("it is assumed that {}", base),
                NodeKind::Repeat => format!("{}, justified above", base),
                _ => base,
            }
        }
    }
}

fn write_text_lines(
    node: &ShapedNode,
    depth: usize,
    last: bool,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
    namer: &mut VarNamer,
    out: &mut String,
) {
    let line = node_line(node, prog, state, opts, namer);
    let suffix = if !node.children.is_empty() {
        ", because"
    } else if last {
        "."
    } else {
        ", and"
    };
    for _ in 0..depth {
        out.push_str("    ");
    }
    out.push_str(&line);
    out.push_str(suffix);
    out.push('\n');
    let n = node.children.len();
    for (i, c) in node.children.iter().enumerate() {
        write_text_lines(c, depth + 1, i + 1 == n, prog, state, opts, namer, out);
    }
}

/// Renders a proof tree as indented text, four spaces per level. Goals
/// with subproofs end in ", because", the last goal of a group ends in a
/// period and the others in ", and".
pub fn render_tree_text(
    root: &JustificationNode,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
    namer: &mut VarNamer,
) -> String {
    let shaped = shape(root, prog, state, opts);
    let mut out = String::new();
    let n = shaped.len();
    for (i, s) in shaped.iter().enumerate() {
        write_text_lines(s, 0, i + 1 == n, prog, state, opts, namer, &mut out);
    }
    out
}

fn html_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(ch),
        }
    }
    out
}

fn write_html_nodes(
    node: &ShapedNode,
    last: bool,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
    namer: &mut VarNamer,
    out: &mut String,
) {
    let line = node_line(node, prog, state, opts, namer);
    let suffix = if !node.children.is_empty() {
        ", because"
    } else if last {
        "."
    } else {
        ", and"
    };
    let text = html_escape(&format!("{}{}", line, suffix));
    if node.children.is_empty() {
        out.push_str("<p>");
        out.push_str(&text);
        out.push_str("</p>\n");
    } else {
        out.push_str("<details open><summary>");
        out.push_str(&text);
        out.push_str("</summary>\n");
        let n = node.children.len();
        for (i, c) in node.children.iter().enumerate() {
            write_html_nodes(c, i + 1 == n, prog, state, opts, namer, out);
        }
        out.push_str("</details>\n");
    }
}

/// Renders a proof tree as a standalone HTML page with collapsible
/// sections; the visible lines match the text rendering exactly.
pub fn render_tree_html(
    root: &JustificationNode,
    prog: &CompiledProgram,
    state: &ConstraintState,
    opts: RenderOptions,
    namer: &mut VarNamer,
) -> String {
    let shaped = shape(root, prog, state, opts);
    let mut out = String::new();
    out.push_str("<!doctype html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    out.push_str("<title>justification</title>\n<style>\n");
    out.push_str("body { font-family: sans-serif; }\n");
    out.push_str("details, p { margin: 0 0 0 2em; }\n");
    out.push_str("summary { cursor: pointer; }\n");
    out.push_str("</style>\n</head>\n<body>\n");
    let n = shaped.len();
    for (i, s) in shaped.iter().enumerate() {
        write_html_nodes(s, i + 1 == n, prog, state, opts, namer, &mut out);
    }
    out.push_str("</body>\n</html>\n");
    out
}

/// Renders the whole rule base as readable sentences, one clause per
/// line: "head if body1 and body2." with each goal phrased through its
/// template and variables keeping their source names.
pub fn render_code(prog: &CompiledProgram) -> String {
    let mut out = String::new();
    let empty = ConstraintState::new(0);
    for clause in &prog.source.clauses {
        let mut namer = VarNamer::new();
        for (id, name) in &clause.var_names {
            namer.seed(*id, name);
        }
        let head = phrase(&clause.head, &prog.templates, &empty, &mut namer);
        out.push_str(&head);
        for (i, lit) in clause.body.iter().enumerate() {
            out.push_str(if i == 0 { " if " } else { " and " });
            let core = phrase(lit, &prog.templates, &empty, &mut namer);
            if lit.naf {
                out.push_str("there is no evidence that ");
            }
            out.push_str(&core);
        }
        out.push_str(".\n");
    }
    out
}
