//! TOML representation of an automaton.
//!
//! ```toml
//! states = ["q1", "q2", "q3"]
//! alphabet = ["a", "b"]
//! initial = ["1", 0, 0]
//! accepting = ["q3"]
//!
//! [matrices]
//! # rows[target][source]; every column sums to one
//! a = [["1/2", 0, 0], ["1/2", 1, 0], [0, 0, 1]]
//! b = [[0, 0, 0], [0, 0, 0], [1, 1, 1]]
//! ```
//!
//! Entries are integers or strings holding `p/q`, an integer or a decimal.
//! Every error carries the line of the offending value.

use std::ops::Range;

use toml::de::{DeTable, DeValue};
use toml::Spanned;

use super::{Pfa, ProbVector, StochMatrix, Violation};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

pub(crate) struct Located<'a> {
    src: &'a str,
}

impl<'a> Located<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Located { src }
    }

    pub(crate) fn line_of(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.src.len());
        self.src[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    pub(crate) fn err(&self, span: &Range<usize>, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_of(span),
            message: message.into(),
        }
    }

    pub(crate) fn parse_table(&self) -> Result<Spanned<DeTable<'a>>> {
        DeTable::parse(self.src).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            self.err(&span, e.message().trim().to_string())
        })
    }

    pub(crate) fn field<'t>(
        &self,
        table: &'t Spanned<DeTable<'a>>,
        key: &str,
    ) -> Result<&'t Spanned<DeValue<'a>>> {
        lookup(table.get_ref(), key)
            .ok_or_else(|| self.err(&table.span(), format!("missing key `{key}`")))
    }

    pub(crate) fn array<'t>(
        &self,
        v: &'t Spanned<DeValue<'a>>,
        what: &str,
    ) -> Result<&'t [Spanned<DeValue<'a>>]> {
        match v.get_ref() {
            DeValue::Array(a) => Ok(a),
            _ => Err(self.err(&v.span(), format!("{what} must be an array"))),
        }
    }

    pub(crate) fn string(&self, v: &Spanned<DeValue<'a>>, what: &str) -> Result<String> {
        match v.get_ref() {
            DeValue::String(s) => Ok(s.to_string()),
            _ => Err(self.err(&v.span(), format!("{what} must be a string"))),
        }
    }

    pub(crate) fn strings(&self, v: &Spanned<DeValue<'a>>, what: &str) -> Result<Vec<String>> {
        self.array(v, what)?
            .iter()
            .map(|x| self.string(x, &format!("each entry of {what}")))
            .collect()
    }

    pub(crate) fn rational(&self, v: &Spanned<DeValue<'a>>) -> Result<Rational> {
        let text = match v.get_ref() {
            DeValue::String(s) => s.to_string(),
            DeValue::Integer(i) if i.radix() == 10 => i.as_str().replace('_', ""),
            DeValue::Float(_) => {
                return Err(self.err(
                    &v.span(),
                    "floating-point literals are not exact; quote the number, e.g. \"1/10\"",
                ))
            }
            _ => return Err(self.err(&v.span(), "expected a rational number")),
        };
        parse_rational(&text).map_err(|e| match e {
            Error::Parse { message, .. } => self.err(&v.span(), message),
            other => other,
        })
    }

    pub(crate) fn rationals(&self, v: &Spanned<DeValue<'a>>, what: &str) -> Result<Vec<Rational>> {
        self.array(v, what)?
            .iter()
            .map(|x| self.rational(x))
            .collect()
    }

    pub(crate) fn matrix(&self, v: &Spanned<DeValue<'a>>, what: &str) -> Result<Vec<Vec<Rational>>> {
        self.array(v, what)?
            .iter()
            .map(|row| self.rationals(row, &format!("each row of {what}")))
            .collect()
    }
}

pub(crate) fn lookup<'t, 'a>(table: &'t DeTable<'a>, key: &str) -> Option<&'t Spanned<DeValue<'a>>> {
    table
        .iter()
        .find(|(k, _)| k.get_ref().as_ref() == key)
        .map(|(_, v)| v)
}

/// Parses an automaton from TOML text and validates it.
pub fn parse_pfa(src: &str) -> Result<Pfa> {
    let loc = Located::new(src);
    let doc = loc.parse_table()?;

    let states_v = loc.field(&doc, "states")?;
    let alphabet_v = loc.field(&doc, "alphabet")?;
    let initial_v = loc.field(&doc, "initial")?;
    let accepting_v = loc.field(&doc, "accepting")?;
    let matrices_v = loc.field(&doc, "matrices")?;

    let states = loc.strings(states_v, "`states`")?;
    let alphabet = loc.strings(alphabet_v, "`alphabet`")?;
    let initial = loc.rationals(initial_v, "`initial`")?;

    let mut accepting = Vec::new();
    for item in loc.array(accepting_v, "`accepting`")? {
        let name = loc.string(item, "each accepting state")?;
        let idx = states
            .iter()
            .position(|s| *s == name)
            .ok_or_else(|| loc.err(&item.span(), format!("unknown state `{name}`")))?;
        accepting.push(idx);
    }

    let table = match matrices_v.get_ref() {
        DeValue::Table(t) => t,
        _ => return Err(loc.err(&matrices_v.span(), "`matrices` must be a table")),
    };
    for (k, v) in table.iter() {
        if !alphabet.iter().any(|a| a.as_str() == k.get_ref().as_ref()) {
            return Err(loc.err(&v.span(), format!("matrix for unknown symbol `{}`", k.get_ref())));
        }
    }
    let mut matrices = Vec::with_capacity(alphabet.len());
    let mut matrix_spans = Vec::with_capacity(alphabet.len());
    for sym in &alphabet {
        let v = lookup(table, sym)
            .ok_or_else(|| loc.err(&matrices_v.span(), format!("no matrix for symbol `{sym}`")))?;
        let rows = loc.matrix(v, &format!("matrix `{sym}`"))?;
        matrices.push(StochMatrix::from_rows(rows));
        matrix_spans.push(v.span());
    }

    let pfa = Pfa::new_unchecked(states, alphabet, matrices, ProbVector::new(initial), accepting);
    let violations = pfa.validate();
    if let Some(first) = violations.first() {
        let span_of = |v: &Violation| -> Range<usize> {
            match v {
                Violation::NoStates | Violation::DuplicateState(_) => states_v.span(),
                Violation::DuplicateSymbol(_) | Violation::MatrixCount { .. } => alphabet_v.span(),
                Violation::MatrixShape { symbol, .. }
                | Violation::NegativeEntry { symbol, .. }
                | Violation::ColumnSum { symbol, .. } => pfa
                    .symbol_index(symbol)
                    .map(|i| matrix_spans[i].clone())
                    .unwrap_or_else(|| matrices_v.span()),
                Violation::InitialLength { .. }
                | Violation::InitialNegative { .. }
                | Violation::InitialSum { .. } => initial_v.span(),
                Violation::UnknownAccepting { .. } => accepting_v.span(),
            }
        };
        let message = violations
            .iter()
            .map(|v| format!("{v} (line {})", loc.line_of(&span_of(v))))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(loc.err(&span_of(first), message));
    }
    Ok(pfa)
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn rational_cell(r: &Rational) -> String {
    quote(&format_rational(r))
}

/// Writes an automaton in the format read by [`parse_pfa`].
pub fn write_pfa(p: &Pfa) -> String {
    let list = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    out.push_str(&format!(
        "states = [{}]\n",
        list(&mut p.states().iter().map(|s| quote(s)))
    ));
    out.push_str(&format!(
        "alphabet = [{}]\n",
        list(&mut p.alphabet().iter().map(|s| quote(s)))
    ));
    out.push_str(&format!(
        "initial = [{}]\n",
        list(&mut p.initial().entries().iter().map(rational_cell))
    ));
    out.push_str(&format!(
        "accepting = [{}]\n",
        list(&mut p.accepting().iter().map(|&i| quote(&p.states()[i])))
    ));
    out.push_str("\n[matrices]\n");
    for (sym, m) in p.alphabet().iter().zip(p.matrices()) {
        out.push_str(&format!("{} = [\n", quote(sym)));
        for row in m.rows() {
            out.push_str(&format!("  [{}],\n", list(&mut row.iter().map(rational_cell))));
        }
        out.push_str("]\n");
    }
    out
}
