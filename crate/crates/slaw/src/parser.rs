//! Reader for rule programs: clauses, queries, `#include` directives and
//! `#pred` description templates.
//!
//! The surface syntax is Prolog-like. Atoms are lowercase identifiers or
//! quoted strings, variables start with an uppercase letter or underscore,
//! `not` marks negation as failure and a `-` prefix marks classical
//! negation. `%` starts a comment running to the end of the line.

use crate::term::{Literal, PredKey, Term, VarId};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// A source clause `head :- body.` A fact has an empty body.
#[derive(Debug, Clone)]
pub struct SourceClause {
    pub head: Literal,
    pub body: Vec<Literal>,
    /// Source names of the clause variables, for program listings.
    pub var_names: BTreeMap<VarId, String>,
    pub origin: String,
    pub line: u32,
}

/// One piece of a description template: literal text or an argument slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateSegment {
    Text(String),
    Arg(usize),
}

/// A `#pred` description template. `pattern` restricts which instances the
/// template applies to; non variable pattern positions must match.
#[derive(Debug, Clone)]
pub struct PredTemplate {
    pub key: PredKey,
    pub pattern: Vec<Term>,
    pub segments: Vec<TemplateSegment>,
    pub origin: String,
    pub line: u32,
}

/// A parsed query: a conjunction of literals.
#[derive(Debug, Clone)]
pub struct Query {
    pub literals: Vec<Literal>,
    pub var_names: BTreeMap<VarId, String>,
}

/// A parsed program before compilation.
#[derive(Debug, Clone, Default)]
pub struct SourceProgram {
    pub clauses: Vec<SourceClause>,
    pub templates: Vec<PredTemplate>,
    pub query: Option<Query>,
}

/// Maps an include target to a canonical identity plus file contents.
/// The second argument is the including file, for relative lookup.
pub type IncludeResolver<'a> = dyn FnMut(&str, &str) -> Result<(String, String), String> + 'a;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{file}:{line}:{col}: unexpected character '{ch}'")]
    UnexpectedChar {
        file: String,
        line: u32,
        col: u32,
        ch: char,
    },
    #[error("{file}:{line}:{col}: numbers are not part of the term language; quote '{tok}' if it is a name")]
    NumberToken {
        file: String,
        line: u32,
        col: u32,
        tok: String,
    },
    #[error("{file}:{line}:{col}: unterminated quoted atom")]
    UnterminatedQuote { file: String, line: u32, col: u32 },
    #[error("{file}:{line}:{col}: unsupported escape '\\{ch}'")]
    BadEscape {
        file: String,
        line: u32,
        col: u32,
        ch: char,
    },
    #[error("{file}:{line}:{col}: expected {expected}, found {found}")]
    Unexpected {
        file: String,
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("{file}:{line}:{col}: a second query is not allowed; the program already has one")]
    SecondQuery { file: String, line: u32, col: u32 },
    #[error("{file}:{line}:{col}: negation as failure cannot appear in a clause head")]
    NafHead { file: String, line: u32, col: u32 },
    #[error("{file}:{line}:{col}: a disequality cannot appear in a clause head")]
    DisequalityHead { file: String, line: u32, col: u32 },
    #[error("{file}:{line}:{col}: unknown directive '#{name}'")]
    UnknownDirective {
        file: String,
        line: u32,
        col: u32,
        name: String,
    },
    #[error("{file}:{line}:{col}: template placeholder '@({name})' does not name a pattern variable")]
    UnknownPlaceholder {
        file: String,
        line: u32,
        col: u32,
        name: String,
    },
    #[error("{file}:{line}:{col}: cannot include '{target}': {message}")]
    Include {
        file: String,
        line: u32,
        col: u32,
        target: String,
        message: String,
    },
    #[error("{file}:{line}:{col}: include cycle through '{target}'")]
    IncludeCycle {
        file: String,
        line: u32,
        col: u32,
        target: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Var(String),
    Not,
    Minus,
    Neq,
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    QueryNeck,
    TemplateSep,
    KwInclude,
    KwPred,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom '{a}'"),
            Tok::Var(v) => format!("variable '{v}'"),
            Tok::Not => "'not'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Neq => "'\\='".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Neck => "':-'".into(),
            Tok::QueryNeck => "'?-'".into(),
            Tok::TemplateSep => "'::'".into(),
            Tok::KwInclude => "'#include'".into(),
            Tok::KwPred => "'#pred'".into(),
        }
    }
}

struct Lexer<'a> {
    file: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(file: &'a str, text: &str) -> Self {
        Lexer {
            file,
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err_here<T>(&self, make: impl FnOnce(String, u32, u32) -> ParseError) -> Result<T, ParseError> {
        Err(make(self.file.to_string(), self.line, self.col))
    }

    fn tokens(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                ':' => {
                    self.bump();
                    match self.peek() {
                        Some('-') => {
                            self.bump();
                            Tok::Neck
                        }
                        Some(':') => {
                            self.bump();
                            Tok::TemplateSep
                        }
                        _ => {
                            return self.err_here(|file, line, col| ParseError::UnexpectedChar {
                                file,
                                line,
                                col,
                                ch: ':',
                            })
                        }
                    }
                }
                '?' => {
                    self.bump();
                    match self.peek() {
                        Some('-') => {
                            self.bump();
                            Tok::QueryNeck
                        }
                        _ => {
                            return self.err_here(|file, line, col| ParseError::UnexpectedChar {
                                file,
                                line,
                                col,
                                ch: '?',
                            })
                        }
                    }
                }
                '-' => {
                    self.bump();
                    match self.peek() {
                        Some(c2) if c2.is_ascii_lowercase() || c2 == '\'' => Tok::Minus,
                        _ => {
                            return Err(ParseError::UnexpectedChar {
                                file: self.file.to_string(),
                                line,
                                col,
                                ch: '-',
                            })
                        }
                    }
                }
                '\\' => {
                    self.bump();
                    match self.peek() {
                        Some('=') => {
                            self.bump();
                            Tok::Neq
                        }
                        _ => {
                            return Err(ParseError::UnexpectedChar {
                                file: self.file.to_string(),
                                line,
                                col,
                                ch: '\\',
                            })
                        }
                    }
                }
                '#' => {
                    self.bump();
                    let mut name = String::new();
                    while let Some(c2) = self.peek() {
                        if c2.is_ascii_alphanumeric() || c2 == '_' {
                            name.push(c2);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    match name.as_str() {
                        "include" => Tok::KwInclude,
                        "pred" => Tok::KwPred,
                        _ => {
                            return Err(ParseError::UnknownDirective {
                                file: self.file.to_string(),
                                line,
                                col,
                                name,
                            })
                        }
                    }
                }
                '\'' => {
                    self.bump();
                    let mut text = String::new();
                    loop {
                        match self.bump() {
                            None => {
                                return Err(ParseError::UnterminatedQuote {
                                    file: self.file.to_string(),
                                    line,
                                    col,
                                })
                            }
                            Some('\'') => break,
                            Some('\\') => match self.bump() {
                                Some('\'') => text.push('\''),
                                Some('\\') => text.push('\\'),
                                Some('n') => text.push('\n'),
                                Some('t') => text.push('\t'),
                                Some(other) => {
                                    return Err(ParseError::BadEscape {
                                        file: self.file.to_string(),
                                        line: self.line,
                                        col: self.col,
                                        ch: other,
                                    })
                                }
                                None => {
                                    return Err(ParseError::UnterminatedQuote {
                                        file: self.file.to_string(),
                                        line,
                                        col,
                                    })
                                }
                            },
                            Some(other) => text.push(other),
                        }
                    }
                    Tok::Atom(text)
                }
                c if c.is_ascii_digit() => {
                    let mut tok = String::new();
                    while let Some(c2) = self.peek() {
                        if c2.is_ascii_alphanumeric() || c2 == '_' {
                            tok.push(c2);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    return Err(ParseError::NumberToken {
                        file: self.file.to_string(),
                        line,
                        col,
                        tok,
                    });
                }
                c if c.is_ascii_lowercase() => {
                    let mut name = String::new();
                    while let Some(c2) = self.peek() {
                        if c2.is_ascii_alphanumeric() || c2 == '_' {
                            name.push(c2);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if name == "not" {
                        Tok::Not
                    } else {
                        Tok::Atom(name)
                    }
                }
                c if c.is_ascii_uppercase() || c == '_' => {
                    let mut name = String::new();
                    while let Some(c2) = self.peek() {
                        if c2.is_ascii_alphanumeric() || c2 == '_' {
                            name.push(c2);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Var(name)
                }
                other => {
                    return Err(ParseError::UnexpectedChar {
                        file: self.file.to_string(),
                        line,
                        col,
                        ch: other,
                    })
                }
            };
            out.push((tok, line, col));
        }
    }
}

/// Shared accumulator while parsing a file tree.
struct Acc {
    clauses: Vec<SourceClause>,
    templates: Vec<PredTemplate>,
    query: Option<Query>,
    next_var: VarId,
}

struct Parser {
    file: String,
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
}

impl Parser {
    fn eof_span(&self) -> (u32, u32) {
        self.toks.last().map(|(_, l, c)| (*l, *c + 1)).unwrap_or((1, 1))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn span(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or_else(|| self.eof_span())
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        let (line, col) = self.span();
        let found = self
            .peek()
            .map(|t| t.describe())
            .unwrap_or_else(|| "end of input".to_string());
        Err(ParseError::Unexpected {
            file: self.file.clone(),
            line,
            col,
            expected: expected.to_string(),
            found,
        })
    }

    fn expect(&mut self, want: &Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(expected)
        }
    }

    fn expect_atom(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Atom(_)) => {
                let Some(Tok::Atom(a)) = self.bump() else {
                    unreachable!()
                };
                Ok(a)
            }
            _ => self.unexpected(expected),
        }
    }

    fn parse_term(&mut self, scope: &mut Scope) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Atom(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let args = self.parse_term_list(scope)?;
                    Ok(Term::Compound(name, args))
                } else {
                    Ok(Term::Const(name))
                }
            }
            Some(Tok::Var(name)) => {
                self.pos += 1;
                Ok(Term::Var(scope.var(&name)))
            }
            _ => self.unexpected("a term"),
        }
    }

    fn parse_term_list(&mut self, scope: &mut Scope) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.parse_term(scope)?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    args.push(self.parse_term(scope)?);
                }
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return self.unexpected("',' or ')'"),
            }
        }
    }

    fn parse_literal(&mut self, scope: &mut Scope) -> Result<Literal, ParseError> {
        let naf = if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            true
        } else {
            false
        };
        let strong_neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        if !strong_neg && matches!(self.peek(), Some(Tok::Var(_))) {
            let lhs = self.parse_term(scope)?;
            self.expect(&Tok::Neq, "'\\='")?;
            let rhs = self.parse_term(scope)?;
            return Ok(Literal::diseq(naf, lhs, rhs));
        }
        let pred = self.expect_atom("a predicate name")?;
        let args = if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            self.parse_term_list(scope)?
        } else {
            Vec::new()
        };
        if !strong_neg && self.peek() == Some(&Tok::Neq) {
            self.pos += 1;
            let lhs = if args.is_empty() {
                Term::Const(pred)
            } else {
                Term::Compound(pred, args)
            };
            let rhs = self.parse_term(scope)?;
            return Ok(Literal::diseq(naf, lhs, rhs));
        }
        Ok(Literal {
            naf,
            strong_neg,
            pred,
            args,
        })
    }

    fn parse_body(&mut self, scope: &mut Scope) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.parse_literal(scope)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            body.push(self.parse_literal(scope)?);
        }
        Ok(body)
    }
}

/// Per clause variable scope: maps source names to variable ids.
struct Scope<'a> {
    names: BTreeMap<String, VarId>,
    ids: BTreeMap<VarId, String>,
    next_var: &'a mut VarId,
}

impl<'a> Scope<'a> {
    fn new(next_var: &'a mut VarId) -> Self {
        Scope {
            names: BTreeMap::new(),
            ids: BTreeMap::new(),
            next_var,
        }
    }

    fn fresh(&mut self) -> VarId {
        let v = *self.next_var;
        *self.next_var += 1;
        v
    }

    fn var(&mut self, name: &str) -> VarId {
        if name == "_" {
            return self.fresh();
        }
        if let Some(v) = self.names.get(name) {
            return *v;
        }
        let v = self.fresh();
        self.names.insert(name.to_string(), v);
        self.ids.insert(v, name.to_string());
        v
    }
}

fn template_segments(
    text: &str,
    pattern: &[Term],
    scope: &Scope,
    file: &str,
    line: u32,
    col: u32,
) -> Result<Vec<TemplateSegment>, ParseError> {
    let mut segments = Vec::new();
    let mut buf = String::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '@' && i + 1 < chars.len() && chars[i + 1] == '(' {
            let mut j = i + 2;
            let mut name = String::new();
            while j < chars.len() && chars[j] != ')' {
                name.push(chars[j]);
                j += 1;
            }
            if j < chars.len() {
                let name = name.trim().to_string();
                let id = scope.names.get(&name);
                let slot = id.and_then(|id| {
                    pattern
                        .iter()
                        .position(|t| matches!(t, Term::Var(v) if v == id))
                });
                match slot {
                    Some(pos) => {
                        if !buf.is_empty() {
                            segments.push(TemplateSegment::Text(std::mem::take(&mut buf)));
                        }
                        segments.push(TemplateSegment::Arg(pos));
                        i = j + 1;
                        continue;
                    }
                    None => {
                        return Err(ParseError::UnknownPlaceholder {
                            file: file.to_string(),
                            line,
                            col,
                            name,
                        })
                    }
                }
            }
        }
        buf.push(chars[i]);
        i += 1;
    }
    if !buf.is_empty() {
        segments.push(TemplateSegment::Text(buf));
    }
    Ok(segments)
}

fn parse_into(
    file_id: &str,
    text: &str,
    resolver: &mut IncludeResolver,
    acc: &mut Acc,
    active: &mut Vec<String>,
    seen: &mut BTreeSet<String>,
) -> Result<(), ParseError> {
    let toks = Lexer::new(file_id, text).tokens()?;
    let mut p = Parser {
        file: file_id.to_string(),
        toks,
        pos: 0,
    };
    while p.peek().is_some() {
        let (line, col) = p.span();
        match p.peek().cloned() {
            Some(Tok::KwInclude) => {
                p.pos += 1;
                p.expect(&Tok::LParen, "'(' after #include")?;
                let target = p.expect_atom("an include target")?;
                p.expect(&Tok::RParen, "')'")?;
                p.expect(&Tok::Dot, "'.'")?;
                let (canon, included) = resolver(&target, file_id).map_err(|message| {
                    ParseError::Include {
                        file: file_id.to_string(),
                        line,
                        col,
                        target: target.clone(),
                        message,
                    }
                })?;
                if active.contains(&canon) {
                    return Err(ParseError::IncludeCycle {
                        file: file_id.to_string(),
                        line,
                        col,
                        target: target.clone(),
                    });
                }
                if seen.insert(canon.clone()) {
                    active.push(canon.clone());
                    parse_into(&canon, &included, resolver, acc, active, seen)?;
                    active.pop();
                }
            }
            Some(Tok::KwPred) => {
                p.pos += 1;
                let mut scope = Scope::new(&mut acc.next_var);
                let lit = p.parse_literal(&mut scope)?;
                if lit.naf {
                    return Err(ParseError::NafHead {
                        file: file_id.to_string(),
                        line,
                        col,
                    });
                }
                if lit.is_diseq() {
                    return Err(ParseError::DisequalityHead {
                        file: file_id.to_string(),
                        line,
                        col,
                    });
                }
                p.expect(&Tok::TemplateSep, "'::'")?;
                let (tline, tcol) = p.span();
                let text = p.expect_atom("a quoted description")?;
                p.expect(&Tok::Dot, "'.'")?;
                let segments =
                    template_segments(&text, &lit.args, &scope, file_id, tline, tcol)?;
                acc.templates.push(PredTemplate {
                    key: lit.key(),
                    pattern: lit.args,
                    segments,
                    origin: file_id.to_string(),
                    line,
                });
            }
            Some(Tok::QueryNeck) => {
                p.pos += 1;
                if acc.query.is_some() {
                    return Err(ParseError::SecondQuery {
                        file: file_id.to_string(),
                        line,
                        col,
                    });
                }
                let mut scope = Scope::new(&mut acc.next_var);
                let literals = p.parse_body(&mut scope)?;
                p.expect(&Tok::Dot, "'.'")?;
                acc.query = Some(Query {
                    literals,
                    var_names: scope.ids,
                });
            }
            _ => {
                let mut scope = Scope::new(&mut acc.next_var);
                let head = p.parse_literal(&mut scope)?;
                if head.naf {
                    return Err(ParseError::NafHead {
                        file: file_id.to_string(),
                        line,
                        col,
                    });
                }
                if head.is_diseq() {
                    return Err(ParseError::DisequalityHead {
                        file: file_id.to_string(),
                        line,
                        col,
                    });
                }
                let body = if p.peek() == Some(&Tok::Neck) {
                    p.pos += 1;
                    p.parse_body(&mut scope)?
                } else {
                    Vec::new()
                };
                p.expect(&Tok::Dot, "'.'")?;
                acc.clauses.push(SourceClause {
                    head,
                    body,
                    var_names: scope.ids,
                    origin: file_id.to_string(),
                    line,
                });
            }
        }
    }
    Ok(())
}

/// Parses a program, following `#include` directives through `resolver`.
pub fn parse_program(
    name: &str,
    text: &str,
    resolver: &mut IncludeResolver,
) -> Result<SourceProgram, ParseError> {
    let mut acc = Acc {
        clauses: Vec::new(),
        templates: Vec::new(),
        query: None,
        next_var: 0,
    };
    let mut active = vec![name.to_string()];
    let mut seen = BTreeSet::from([name.to_string()]);
    parse_into(name, text, resolver, &mut acc, &mut active, &mut seen)?;
    Ok(SourceProgram {
        clauses: acc.clauses,
        templates: acc.templates,
        query: acc.query,
    })
}

/// Parses a self contained program; `#include` is reported as an error.
pub fn parse_program_str(name: &str, text: &str) -> Result<SourceProgram, ParseError> {
    let mut resolver =
        |_t: &str, _f: &str| Err("no include resolver in this context".to_string());
    parse_program(name, text, &mut resolver)
}

/// Parses a standalone query. The leading `?-` is optional, the final `.`
/// is required.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let toks = Lexer::new("query", text).tokens()?;
    let mut p = Parser {
        file: "query".to_string(),
        toks,
        pos: 0,
    };
    if p.peek() == Some(&Tok::QueryNeck) {
        p.pos += 1;
    }
    let mut next_var: VarId = 0;
    let mut scope = Scope::new(&mut next_var);
    let literals = p.parse_body(&mut scope)?;
    p.expect(&Tok::Dot, "'.' at the end of the query")?;
    if p.peek().is_some() {
        return p.unexpected("end of query");
    }
    Ok(Query {
        literals,
        var_names: scope.ids,
    })
}
