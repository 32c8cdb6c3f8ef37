//! DIMACS-X text format: plain DIMACS CNF extended with `x` parity lines,
//! the dialect XOR-capable solvers read.
//!
//! Emitted documents look like
//!
//! ```text
//! p cnf 3 2
//! 1 -2 3 0
//! x 1 2 0
//! ```
//!
//! The header counts CNF and XOR clauses together. An `x` line asserts that
//! the XOR of its literals is true: a clause with parity target 1 lists all
//! variables positive, target 0 negates the first listed variable. The
//! empty odd clause (constant false) is `x 0`; the empty even clause
//! (constant true) has no literal encoding and is written as the comment
//! line `c xor-tautology`, which the parser restores and the header count
//! skips. Parsing is line-based, accepts `x1 2 0` without the space for
//! compatibility with the common external dialect, and `parse(emit(f))`
//! reproduces `f` exactly — clause order and duplicates included. A formula
//! with no XOR clauses emits valid plain DIMACS CNF.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{CnfClause, CnfXorFormula, Literal, Var, XorClause};

/// Comment line standing in for the empty even-parity clause.
const XOR_TAUTOLOGY_COMMENT: &str = "c xor-tautology";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected header `p cnf <vars> <clauses>`")]
    MalformedHeader,
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("clause line before header")]
    ClauseBeforeHeader,
    #[error("bad literal token `{0}`")]
    BadToken(String),
    #[error("literal {lit} out of range for {n} variables")]
    LiteralOutOfRange { lit: i64, n: u32 },
    #[error("clause line does not end in 0")]
    MissingTerminator,
    #[error("tokens after the terminating 0")]
    TrailingTokens,
    #[error("duplicate variable {0} within a clause")]
    DuplicateVariable(u32),
    #[error("header declared {declared} clauses but the document has {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Serialize a formula to DIMACS-X text, bit-exactly as documented above.
pub fn emit_dimacs_x(formula: &CnfXorFormula) -> String {
    let tautologies = formula.xors().iter().filter(|x| x.is_empty() && !x.rhs()).count();
    let declared = formula.cnf().len() + formula.xors().len() - tautologies;

    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.n(), declared).expect("string write");
    for clause in formula.cnf() {
        for lit in clause.literals() {
            write!(out, "{} ", lit.to_dimacs()).expect("string write");
        }
        out.push_str("0\n");
    }
    for clause in formula.xors() {
        if clause.is_empty() {
            if clause.rhs() {
                out.push_str("x 0\n");
            } else {
                out.push_str(XOR_TAUTOLOGY_COMMENT);
                out.push('\n');
            }
            continue;
        }
        out.push_str("x ");
        for (i, var) in clause.vars().iter().enumerate() {
            // Parity target 0 is encoded by negating the first literal.
            if i == 0 && !clause.rhs() {
                write!(out, "-{} ", var.number()).expect("string write");
            } else {
                write!(out, "{} ", var.number()).expect("string write");
            }
        }
        out.push_str("0\n");
    }
    out
}

/// Parse DIMACS-X text. Inverse of [`emit_dimacs_x`] on emitted documents.
pub fn parse_dimacs_x(text: &str) -> Result<CnfXorFormula, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut cnf: Vec<CnfClause> = Vec::new();
    let mut xors: Vec<XorClause> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == XOR_TAUTOLOGY_COMMENT {
            if header.is_none() {
                return Err(err(lineno, ParseErrorKind::ClauseBeforeHeader));
            }
            xors.push(XorClause::new(Vec::new(), false).expect("empty clause"));
            continue;
        }
        if line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_ascii_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["cnf", vars, clauses] => vars
                    .parse::<u32>()
                    .ok()
                    .zip(clauses.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((n, m)) if header.is_none() => header = Some((n, m)),
                _ => return Err(err(lineno, ParseErrorKind::MalformedHeader)),
            }
            continue;
        }

        let Some((n, _)) = header else {
            return Err(err(lineno, ParseErrorKind::ClauseBeforeHeader));
        };
        let (is_xor, body) = match line.strip_prefix('x') {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let lits = parse_clause_body(body, n, lineno)?;
        if is_xor {
            xors.push(xor_from_literals(&lits, lineno)?);
        } else {
            cnf.push(
                CnfClause::new(lits.clone()).map_err(|_| {
                    let dup = duplicate_var(&lits).expect("constructor failed on duplicate");
                    err(lineno, ParseErrorKind::DuplicateVariable(dup))
                })?,
            );
        }
    }

    let Some((n, declared)) = header else {
        return Err(err(last_line, ParseErrorKind::MissingHeader));
    };
    let tautologies = xors.iter().filter(|x| x.is_empty() && !x.rhs()).count();
    let found = cnf.len() + xors.len() - tautologies;
    if found != declared {
        return Err(err(last_line, ParseErrorKind::ClauseCountMismatch { declared, found }));
    }
    Ok(CnfXorFormula::new(n, cnf, xors).expect("ranges checked during parsing"))
}

fn parse_clause_body(body: &str, n: u32, lineno: usize) -> Result<Vec<Literal>, ParseError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for token in body.split_ascii_whitespace() {
        if terminated {
            return Err(err(lineno, ParseErrorKind::TrailingTokens));
        }
        if token == "0" {
            terminated = true;
            continue;
        }
        let value: i64 = token
            .parse()
            .map_err(|_| err(lineno, ParseErrorKind::BadToken(token.to_string())))?;
        if value == 0 {
            // Tokens like "-0" or "00" are not literals and not terminators.
            return Err(err(lineno, ParseErrorKind::BadToken(token.to_string())));
        }
        if value.unsigned_abs() > u64::from(n) {
            return Err(err(lineno, ParseErrorKind::LiteralOutOfRange { lit: value, n }));
        }
        lits.push(Literal::from_dimacs(value as i32));
    }
    if !terminated {
        return Err(err(lineno, ParseErrorKind::MissingTerminator));
    }
    Ok(lits)
}

/// An `x` line asserts that the XOR of its literals is true. Each negation
/// flips the required parity, so the target is 1 XOR (number of negations).
fn xor_from_literals(lits: &[Literal], lineno: usize) -> Result<XorClause, ParseError> {
    let negations = lits.iter().filter(|l| l.is_negated()).count();
    let rhs = negations % 2 == 0;
    let vars: Vec<Var> = lits.iter().map(|l| l.var()).collect();
    XorClause::new(vars, rhs).map_err(|_| {
        let dup = duplicate_var(lits).expect("constructor failed on duplicate");
        err(lineno, ParseErrorKind::DuplicateVariable(dup))
    })
}

fn duplicate_var(lits: &[Literal]) -> Option<u32> {
    let mut nums: Vec<u32> = lits.iter().map(|l| l.var().number()).collect();
    nums.sort_unstable();
    nums.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}
