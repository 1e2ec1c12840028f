//! Concrete syntax: lexer, line-oriented statement parser and printers.
//!
//! The grammar is line-oriented. Each non-blank, non-comment line holds one
//! statement:
//!
//! ```text
//! symbol NAME : TERM [constant] [status mul|lex] [kind fo|ho]
//! rule [ENV] TERM -> TERM [with x := TERM, ...]
//! eq [ENV] TERM = TERM [with x := TERM, ...]
//! precedence f > g
//! attest fo-sn
//! ```
//!
//! Terms: `*`, `box`, `[x:T] u` (abstraction), `(x:T) U` (product),
//! `T => U` (non-dependent product), juxtaposition for application,
//! parentheses for grouping. Comments start with `#`.

use std::fmt;

use crate::signature::{DeclaredKind, Status};

/// Surface term, names unresolved. Printing then reparsing is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Star,
    Box,
    Ident(String),
    App(Box<Ast>, Box<Ast>),
    Abs(String, Box<Ast>, Box<Ast>),
    Prod(String, Box<Ast>, Box<Ast>),
    Arrow(Box<Ast>, Box<Ast>),
}

impl Ast {
    pub fn app(f: Ast, a: Ast) -> Ast {
        Ast::App(Box::new(f), Box::new(a))
    }

    pub fn ident(s: impl Into<String>) -> Ast {
        Ast::Ident(s.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Symbol {
        name: String,
        ty: Ast,
        constant: bool,
        status: Option<Status>,
        kind: Option<DeclaredKind>,
        line: usize,
    },
    Rule {
        env: Vec<(String, Ast)>,
        lhs: Ast,
        rhs: Ast,
        rho: Vec<(String, Ast)>,
        line: usize,
    },
    Eq {
        env: Vec<(String, Ast)>,
        lhs: Ast,
        rhs: Ast,
        rho: Vec<(String, Ast)>,
        line: usize,
    },
    Precedence {
        greater: String,
        smaller: String,
        line: usize,
    },
    Attest {
        what: String,
        line: usize,
    },
}

impl Statement {
    pub fn line(&self) -> usize {
        match self {
            Statement::Symbol { line, .. }
            | Statement::Rule { line, .. }
            | Statement::Eq { line, .. }
            | Statement::Precedence { line, .. }
            | Statement::Attest { line, .. } => *line,
        }
    }
}

/// A parsed input file, before name resolution.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpecFile {
    pub statements: Vec<Statement>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

// Words that terminate a term; they cannot be used as term identifiers.
const RESERVED_IN_TERMS: &[&str] = &["box", "with", "status", "kind", "constant"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    ColonEq,
    Comma,
    Arrow,
    FatArrow,
    Equals,
    Greater,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Star => write!(f, "'*'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::Colon => write!(f, "':'"),
            Tok::ColonEq => write!(f, "':='"),
            Tok::Comma => write!(f, "','"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::FatArrow => write!(f, "'=>'"),
            Tok::Equals => write!(f, "'='"),
            Tok::Greater => write!(f, "'>'"),
        }
    }
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, col));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            '>' => {
                toks.push((Tok::Greater, col));
                i += 1;
            }
            ':' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::ColonEq, col));
                    i += 2;
                } else {
                    toks.push((Tok::Colon, col));
                    i += 1;
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::Arrow, col));
                    i += 2;
                } else {
                    return Err(SyntaxError {
                        line: lineno,
                        col,
                        message: "unexpected '-'".to_string(),
                    });
                }
            }
            '=' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::FatArrow, col));
                    i += 2;
                } else {
                    toks.push((Tok::Equals, col));
                    i += 1;
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() {
                    let c = chars[i];
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        i += 1;
                    } else if c == '-'
                        && chars
                            .get(i + 1)
                            .is_some_and(|c| c.is_alphanumeric() || *c == '_')
                    {
                        // '-' inside a name (e.g. fo-sn); '->' stays an arrow
                        i += 1;
                    } else {
                        break;
                    }
                }
                let word: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(word), col));
            }
            other => {
                return Err(SyntaxError {
                    line: lineno,
                    col,
                    message: format!("unexpected character '{other}'"),
                });
            }
        }
    }
    Ok(toks)
}

struct LineParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl LineParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, c)| *c)
            .unwrap_or(1)
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            col: self.col(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            Some(t) => Err(SyntaxError {
                line: self.line,
                col: self.toks[self.pos - 1].1,
                message: format!("expected {tok}, found {t}"),
            }),
            None => Err(self.error(format!("expected {tok}, found end of line"))),
        }
    }

    fn expect_ident(&mut self) -> Result<String, SyntaxError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            Some(t) => Err(SyntaxError {
                line: self.line,
                col: self.toks[self.pos - 1].1,
                message: format!("expected a name, found {t}"),
            }),
            None => Err(self.error("expected a name, found end of line")),
        }
    }

    fn at_atom_start(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => s == "box" || !RESERVED_IN_TERMS.contains(&s.as_str()),
            Some(Tok::Star) | Some(Tok::LParen) => true,
            _ => false,
        }
    }

    // term := '[' x ':' term ']' term | '(' x ':' term ')' term | app ('=>' term)?
    fn term(&mut self) -> Result<Ast, SyntaxError> {
        match self.peek() {
            Some(Tok::LBracket) => {
                self.next();
                let name = self.expect_ident()?;
                self.expect(Tok::Colon)?;
                let dom = self.term()?;
                self.expect(Tok::RBracket)?;
                let body = self.term()?;
                Ok(Ast::Abs(name, Box::new(dom), Box::new(body)))
            }
            Some(Tok::LParen) if self.is_product_start() => {
                self.next();
                let name = self.expect_ident()?;
                self.expect(Tok::Colon)?;
                let dom = self.term()?;
                self.expect(Tok::RParen)?;
                let body = self.term()?;
                Ok(Ast::Prod(name, Box::new(dom), Box::new(body)))
            }
            _ => {
                let lhs = self.app_term()?;
                if self.peek() == Some(&Tok::FatArrow) {
                    self.next();
                    let rhs = self.term()?;
                    Ok(Ast::Arrow(Box::new(lhs), Box::new(rhs)))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    // '(' IDENT ':' introduces a dependent product.
    fn is_product_start(&self) -> bool {
        matches!(
            (self.toks.get(self.pos + 1), self.toks.get(self.pos + 2)),
            (Some((Tok::Ident(_), _)), Some((Tok::Colon, _)))
        )
    }

    fn app_term(&mut self) -> Result<Ast, SyntaxError> {
        if !self.at_atom_start() {
            return Err(self.error("expected a term"));
        }
        let mut t = self.atom()?;
        while self.at_atom_start() {
            let arg = self.atom()?;
            t = Ast::app(t, arg);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Ast, SyntaxError> {
        match self.next() {
            Some(Tok::Star) => Ok(Ast::Star),
            Some(Tok::Ident(s)) if s == "box" => Ok(Ast::Box),
            Some(Tok::Ident(s)) => Ok(Ast::Ident(s)),
            Some(Tok::LParen) => {
                // backtrack one token and let `term` decide product vs parens
                self.pos -= 1;
                if self.is_product_start() {
                    let t = self.term()?;
                    Ok(t)
                } else {
                    self.next();
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(t)
                }
            }
            Some(t) => Err(SyntaxError {
                line: self.line,
                col: self.toks[self.pos - 1].1,
                message: format!("expected a term, found {t}"),
            }),
            None => Err(self.error("expected a term, found end of line")),
        }
    }

    fn env(&mut self) -> Result<Vec<(String, Ast)>, SyntaxError> {
        self.expect(Tok::LBracket)?;
        let mut env = Vec::new();
        if self.peek() == Some(&Tok::RBracket) {
            self.next();
            return Ok(env);
        }
        loop {
            let name = self.expect_ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.term()?;
            env.push((name, ty));
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBracket) => break,
                Some(t) => {
                    return Err(SyntaxError {
                        line: self.line,
                        col: self.toks[self.pos - 1].1,
                        message: format!("expected ',' or ']', found {t}"),
                    })
                }
                None => return Err(self.error("unterminated environment")),
            }
        }
        Ok(env)
    }

    fn rho_clause(&mut self) -> Result<Vec<(String, Ast)>, SyntaxError> {
        let mut rho = Vec::new();
        if self.peek() == Some(&Tok::Ident("with".to_string())) {
            self.next();
            loop {
                let name = self.expect_ident()?;
                self.expect(Tok::ColonEq)?;
                let t = self.term()?;
                rho.push((name, t));
                if self.peek() == Some(&Tok::Comma) {
                    self.next();
                } else {
                    break;
                }
            }
        }
        Ok(rho)
    }

    fn end_of_line(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {t} at end of statement"))),
        }
    }

    fn statement(&mut self) -> Result<Statement, SyntaxError> {
        let head = self.expect_ident()?;
        match head.as_str() {
            "symbol" => {
                let name = self.expect_ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.term()?;
                let mut constant = false;
                let mut status = None;
                let mut kind = None;
                while let Some(Tok::Ident(word)) = self.peek() {
                    match word.as_str() {
                        "constant" => {
                            self.next();
                            constant = true;
                        }
                        "status" => {
                            self.next();
                            let s = self.expect_ident()?;
                            status = Some(match s.as_str() {
                                "mul" => Status::Mul,
                                "lex" => Status::Lex,
                                other => {
                                    return Err(
                                        self.error(format!("unknown status '{other}' (expected mul or lex)"))
                                    )
                                }
                            });
                        }
                        "kind" => {
                            self.next();
                            let k = self.expect_ident()?;
                            kind = Some(match k.as_str() {
                                "fo" => DeclaredKind::FirstOrder,
                                "ho" => DeclaredKind::HigherOrder,
                                other => {
                                    return Err(
                                        self.error(format!("unknown kind '{other}' (expected fo or ho)"))
                                    )
                                }
                            });
                        }
                        other => {
                            return Err(self.error(format!("unexpected '{other}' after symbol declaration")))
                        }
                    }
                }
                self.end_of_line()?;
                Ok(Statement::Symbol {
                    name,
                    ty,
                    constant,
                    status,
                    kind,
                    line: self.line,
                })
            }
            "rule" => {
                let env = self.env()?;
                let lhs = self.term()?;
                self.expect(Tok::Arrow)?;
                let rhs = self.term()?;
                let rho = self.rho_clause()?;
                self.end_of_line()?;
                Ok(Statement::Rule {
                    env,
                    lhs,
                    rhs,
                    rho,
                    line: self.line,
                })
            }
            "eq" => {
                let env = self.env()?;
                let lhs = self.term()?;
                self.expect(Tok::Equals)?;
                let rhs = self.term()?;
                let rho = self.rho_clause()?;
                self.end_of_line()?;
                Ok(Statement::Eq {
                    env,
                    lhs,
                    rhs,
                    rho,
                    line: self.line,
                })
            }
            "precedence" => {
                let greater = self.expect_ident()?;
                self.expect(Tok::Greater)?;
                let smaller = self.expect_ident()?;
                self.end_of_line()?;
                Ok(Statement::Precedence {
                    greater,
                    smaller,
                    line: self.line,
                })
            }
            "attest" => {
                let what = self.expect_ident()?;
                if what != "fo-sn" {
                    return Err(self.error(format!("unknown attestation '{what}' (expected fo-sn)")));
                }
                self.end_of_line()?;
                Ok(Statement::Attest {
                    what,
                    line: self.line,
                })
            }
            other => Err(SyntaxError {
                line: self.line,
                col: self.toks[0].1,
                message: format!(
                    "unknown statement '{other}' (expected symbol, rule, eq, precedence or attest)"
                ),
            }),
        }
    }
}

/// Parse an input file. All syntax errors are collected, one per bad line.
pub fn parse_file(source: &str) -> Result<SpecFile, Vec<SyntaxError>> {
    let mut statements = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let lineno = idx + 1;
        match lex_line(raw, lineno) {
            Err(e) => errors.push(e),
            Ok(toks) => {
                if toks.is_empty() {
                    continue;
                }
                let mut p = LineParser {
                    toks,
                    pos: 0,
                    line: lineno,
                };
                match p.statement() {
                    Ok(s) => statements.push(s),
                    Err(e) => errors.push(e),
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(SpecFile { statements })
    } else {
        Err(errors)
    }
}

/// Parse a single term given on its own (CLI arguments).
pub fn parse_term(source: &str) -> Result<Ast, SyntaxError> {
    let toks = lex_line(source, 1)?;
    if toks.is_empty() {
        return Err(SyntaxError {
            line: 1,
            col: 1,
            message: "empty term".to_string(),
        });
    }
    let mut p = LineParser {
        toks,
        pos: 0,
        line: 1,
    };
    let t = p.term()?;
    p.end_of_line()?;
    Ok(t)
}

// Printing. Three precedence levels: term (binders, arrows), application,
// atom. Printing then reparsing yields the same AST.

fn fmt_ast(ast: &Ast, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let needs_parens = match ast {
        Ast::Star | Ast::Box | Ast::Ident(_) => false,
        Ast::App(_, _) => level >= 2,
        Ast::Abs(..) | Ast::Prod(..) | Ast::Arrow(..) => level >= 1,
    };
    if needs_parens {
        write!(f, "(")?;
    }
    match ast {
        Ast::Star => write!(f, "*")?,
        Ast::Box => write!(f, "box")?,
        Ast::Ident(s) => write!(f, "{s}")?,
        Ast::App(fun, arg) => {
            fmt_ast(fun, 1, f)?;
            write!(f, " ")?;
            fmt_ast(arg, 2, f)?;
        }
        Ast::Abs(x, dom, body) => {
            write!(f, "[{x}:")?;
            fmt_ast(dom, 0, f)?;
            write!(f, "] ")?;
            fmt_ast(body, 0, f)?;
        }
        Ast::Prod(x, dom, body) => {
            write!(f, "({x}:")?;
            fmt_ast(dom, 0, f)?;
            write!(f, ") ")?;
            fmt_ast(body, 0, f)?;
        }
        Ast::Arrow(a, b) => {
            fmt_ast(a, 1, f)?;
            write!(f, " => ")?;
            fmt_ast(b, 0, f)?;
        }
    }
    if needs_parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ast(self, 0, f)
    }
}

fn fmt_env(env: &[(String, Ast)], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "[")?;
    for (i, (name, ty)) in env.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{name}:{ty}")?;
    }
    write!(f, "]")
}

fn fmt_rho(rho: &[(String, Ast)], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if rho.is_empty() {
        return Ok(());
    }
    write!(f, " with ")?;
    for (i, (name, t)) in rho.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{name} := {t}")?;
    }
    Ok(())
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Symbol {
                name,
                ty,
                constant,
                status,
                kind,
                ..
            } => {
                write!(f, "symbol {name} : {ty}")?;
                if *constant {
                    write!(f, " constant")?;
                }
                match status {
                    Some(Status::Mul) => write!(f, " status mul")?,
                    Some(Status::Lex) => write!(f, " status lex")?,
                    None => {}
                }
                match kind {
                    Some(DeclaredKind::FirstOrder) => write!(f, " kind fo")?,
                    Some(DeclaredKind::HigherOrder) => write!(f, " kind ho")?,
                    None => {}
                }
                Ok(())
            }
            Statement::Rule { env, lhs, rhs, rho, .. } => {
                write!(f, "rule ")?;
                fmt_env(env, f)?;
                write!(f, " {lhs} -> {rhs}")?;
                fmt_rho(rho, f)
            }
            Statement::Eq { env, lhs, rhs, rho, .. } => {
                write!(f, "eq ")?;
                fmt_env(env, f)?;
                write!(f, " {lhs} = {rhs}")?;
                fmt_rho(rho, f)
            }
            Statement::Precedence { greater, smaller, .. } => {
                write!(f, "precedence {greater} > {smaller}")
            }
            Statement::Attest { what, .. } => write!(f, "attest {what}"),
        }
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(src: &str) {
        let file = parse_file(src).expect("parse");
        let printed = file.to_string();
        let again = parse_file(&printed).expect("reparse");
        // line numbers differ after printing; compare modulo them
        assert_eq!(strip_lines(&file), strip_lines(&again), "printed: {printed}");
    }

    fn strip_lines(f: &SpecFile) -> Vec<String> {
        f.statements.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_symbol_with_options() {
        let f = parse_file("symbol plus : nat => nat => nat status mul\n").unwrap();
        assert_eq!(f.statements.len(), 1);
        match &f.statements[0] {
            Statement::Symbol { name, status, .. } => {
                assert_eq!(name, "plus");
                assert_eq!(*status, Some(Status::Mul));
            }
            other => panic!("unexpected statement {other:?}"),
        }
    }

    #[test]
    fn parse_rule_with_env() {
        let f = parse_file("rule [x:nat] plus x zero -> x\n").unwrap();
        match &f.statements[0] {
            Statement::Rule { env, lhs, rhs, rho, .. } => {
                assert_eq!(env.len(), 1);
                assert_eq!(env[0].0, "x");
                assert_eq!(
                    *lhs,
                    Ast::app(
                        Ast::app(Ast::ident("plus"), Ast::ident("x")),
                        Ast::ident("zero")
                    )
                );
                assert_eq!(*rhs, Ast::ident("x"));
                assert!(rho.is_empty());
            }
            other => panic!("unexpected statement {other:?}"),
        }
    }

    #[test]
    fn parse_rule_with_rho() {
        let src = "rule [A:*, x:A, l:list A, l':list A] app A (cons A' x l) l' -> cons A x (app A l l') with A' := A\n";
        let f = parse_file(src).unwrap();
        match &f.statements[0] {
            Statement::Rule { env, rho, .. } => {
                assert_eq!(env.len(), 4);
                assert_eq!(rho.len(), 1);
                assert_eq!(rho[0].0, "A'");
                assert_eq!(rho[0].1, Ast::ident("A"));
            }
            other => panic!("unexpected statement {other:?}"),
        }
    }

    #[test]
    fn product_vs_parens() {
        let t = parse_term("(A:*) list A => list A").unwrap();
        match t {
            Ast::Prod(name, dom, body) => {
                assert_eq!(name, "A");
                assert_eq!(*dom, Ast::Star);
                assert!(matches!(*body, Ast::Arrow(_, _)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let t = parse_term("(f x) y").unwrap();
        assert_eq!(
            t,
            Ast::app(Ast::app(Ast::ident("f"), Ast::ident("x")), Ast::ident("y"))
        );
    }

    #[test]
    fn located_errors() {
        let err = parse_file("rule [x:nat] plus x zero ->\n").unwrap_err();
        assert_eq!(err[0].line, 1);
        assert!(err[0].message.contains("expected a term"));
        let err = parse_file("symbol f : nat\nnonsense here\n").unwrap_err();
        assert_eq!(err[0].line, 2);
    }

    #[test]
    fn roundtrip_statements() {
        roundtrip(
            "symbol nat : *\n\
             symbol s : nat => nat\n\
             symbol plus : nat => nat => nat status mul\n\
             rule [x:nat] plus x zero -> x\n\
             rule [x:nat, y:nat] plus x (s y) -> s (plus x y)\n\
             eq [x:nat, y:nat] plus x y = plus y x\n\
             precedence plus > s\n\
             attest fo-sn\n",
        );
    }

    #[test]
    fn roundtrip_binders() {
        roundtrip("symbol id : (A:*) A => A\nrule [A:*] idf A -> [x:A] x\n");
        roundtrip("symbol k : ((A:*) A => A) => nat\n");
    }
}
