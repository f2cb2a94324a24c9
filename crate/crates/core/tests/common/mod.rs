#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::Zero;
use pfacap::pfa::{ProbVector, StochMatrix};
use pfacap::{Pfa, Rational, Word};
use proptest::prelude::*;

pub fn r(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Normalises small nonnegative weights; an all-zero column becomes a
/// point mass on `fallback`.
pub fn normalise(weights: &[u8], fallback: usize) -> Vec<Rational> {
    let total: i64 = weights.iter().map(|&w| w as i64).sum();
    if total == 0 {
        return (0..weights.len())
            .map(|i| if i == fallback { r(1, 1) } else { r(0, 1) })
            .collect();
    }
    weights.iter().map(|&w| r(w as i64, total)).collect()
}

#[derive(Debug, Clone)]
pub struct PfaSpec {
    pub states: usize,
    pub symbols: usize,
    /// [symbol][source][target]
    pub columns: Vec<Vec<Vec<u8>>>,
    pub initial: Vec<u8>,
    pub point_initial: Option<usize>,
    pub accepting: Vec<bool>,
}

impl PfaSpec {
    pub fn build(&self) -> Pfa {
        let n = self.states;
        let matrices = self
            .columns
            .iter()
            .map(|cols| {
                let cols: Vec<Vec<Rational>> =
                    cols.iter().enumerate().map(|(s, w)| normalise(w, s)).collect();
                let rows = (0..n)
                    .map(|t| (0..n).map(|s| cols[s][t].clone()).collect())
                    .collect();
                StochMatrix::from_rows(rows)
            })
            .collect();
        let initial = match self.point_initial {
            Some(s) => ProbVector::point(n, s),
            None => ProbVector::new(normalise(&self.initial, 0)),
        };
        let accepting = (0..n).filter(|&s| self.accepting[s]).collect();
        let alphabet: Vec<String> = (0..self.symbols)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        Pfa::new(names("q", n), alphabet, matrices, initial, accepting).expect("valid by construction")
    }
}

/// Random automata with up to `max_states` states and up to `max_symbols`
/// letters; entries are multiples of small fractions.
pub fn arb_pfa_spec(max_states: usize, max_symbols: usize, point: bool) -> impl Strategy<Value = PfaSpec> {
    (1..=max_states, 1..=max_symbols).prop_flat_map(move |(n, k)| {
        (
            prop::collection::vec(prop::collection::vec(prop::collection::vec(0u8..4, n), n), k),
            prop::collection::vec(0u8..4, n),
            0..n,
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(columns, initial, start, accepting)| PfaSpec {
                states: n,
                symbols: k,
                columns,
                initial,
                point_initial: point.then_some(start),
                accepting,
            })
    })
}

pub fn arb_word(symbols: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..symbols, 0..=max_len).prop_map(|w| {
        Word::from_symbols(w.into_iter().map(|i| ((b'a' + i as u8) as char).to_string()))
    })
}

/// Acceptance probability by explicit nested loops over the matrix rows,
/// independent of the engine's sparse evolution.
pub fn naive_value(p: &Pfa, w: &Word) -> Rational {
    let n = p.num_states();
    let mut dist: Vec<Rational> = p.initial().entries().to_vec();
    for sym in w.symbols() {
        let m = p.matrix(sym).expect("known symbol");
        let mut next = vec![Rational::zero(); n];
        for (t, slot) in next.iter_mut().enumerate() {
            for (s, d) in dist.iter().enumerate() {
                *slot += m.get(t, s) * d;
            }
        }
        dist = next;
    }
    p.accepting().iter().map(|&s| dist[s].clone()).sum()
}

/// All words of length exactly `len` over `symbols`.
pub fn words_of_length(symbols: &[&str], len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                symbols.iter().map(move |s| {
                    let mut v = w.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
    }
    out
}

/// All words of length at most `max_len`.
pub fn words_up_to(symbols: &[&str], max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|l| words_of_length(symbols, l)).collect()
}
