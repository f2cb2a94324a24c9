use num_traits::Zero;
use rayon::prelude::*;

use super::{Pfa, Word};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Upper bound on the number of words an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_words: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_words: 4_000_000,
        }
    }
}

impl SearchBudget {
    pub fn words(max_words: u128) -> Self {
        SearchBudget { max_words }
    }

    fn check(&self, symbols: usize, max_len: usize) -> Result<()> {
        let needed = word_count(symbols, max_len);
        match needed {
            Some(n) if n <= self.max_words => Ok(()),
            Some(n) => Err(Error::BudgetExceeded {
                needed: n,
                budget: self.max_words,
            }),
            None => Err(Error::BudgetExceeded {
                needed: u128::MAX,
                budget: self.max_words,
            }),
        }
    }
}

/// Number of words of length at most `max_len` over `k` symbols.
fn word_count(k: usize, max_len: usize) -> Option<u128> {
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..=max_len {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(k as u128)?;
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best_word: Word,
    pub best_value: Rational,
    pub words_visited: u128,
}

#[derive(Clone)]
struct Best {
    value: Rational,
    // Positions in the searched symbol list, which is in alphabet order.
    word: Vec<usize>,
}

impl Best {
    /// Higher value wins; ties go to the shorter word, then the
    /// lexicographically smaller one.
    fn beats(&self, other: &Best) -> bool {
        match self.value.cmp(&other.value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                (self.word.len(), &self.word) < (other.word.len(), &other.word)
            }
        }
    }
}

/// Exact maximum of the acceptance probability over all words of length at
/// most `max_len`.
pub fn brute_force_value(p: &Pfa, max_len: usize, budget: SearchBudget) -> Result<SearchResult> {
    let all: Vec<usize> = (0..p.alphabet().len()).collect();
    brute_force_value_over(p, &all, max_len, budget)
}

/// Like [`brute_force_value`] but only over words built from `symbols`
/// (alphabet indices).
pub fn brute_force_value_over(
    p: &Pfa,
    symbols: &[usize],
    max_len: usize,
    budget: SearchBudget,
) -> Result<SearchResult> {
    let mut symbols = symbols.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    budget.check(symbols.len(), max_len)?;

    let root_dist = p.initial().entries().to_vec();
    let mut best = Best {
        value: p.accepting_mass(&root_dist),
        word: Vec::new(),
    };
    if max_len > 0 {
        let subtrees: Vec<Best> = (0..symbols.len())
            .into_par_iter()
            .map(|pos| {
                let dist = p.step(&root_dist, symbols[pos]);
                let mut local = Best {
                    value: p.accepting_mass(&dist),
                    word: vec![pos],
                };
                let mut prefix = vec![pos];
                dfs(p, &symbols, &dist, &mut prefix, max_len, &mut local);
                local
            })
            .collect();
        for cand in subtrees {
            if cand.beats(&best) {
                best = cand;
            }
        }
    }
    let word = Word::from_symbols(
        best.word
            .iter()
            .map(|&pos| p.alphabet()[symbols[pos]].clone()),
    );
    Ok(SearchResult {
        best_word: word,
        best_value: best.value,
        words_visited: word_count(symbols.len(), max_len).unwrap_or(u128::MAX),
    })
}

fn dfs(
    p: &Pfa,
    symbols: &[usize],
    dist: &[Rational],
    prefix: &mut Vec<usize>,
    max_len: usize,
    best: &mut Best,
) {
    if prefix.len() == max_len {
        return;
    }
    for pos in 0..symbols.len() {
        let next = p.step(dist, symbols[pos]);
        prefix.push(pos);
        let cand = Best {
            value: p.accepting_mass(&next),
            word: prefix.clone(),
        };
        if cand.beats(best) {
            *best = cand;
        }
        dfs(p, symbols, &next, prefix, max_len, best);
        prefix.pop();
    }
}

/// First word, shortest then lexicographic, whose value exceeds `delta`.
///
/// `None` only means no such word exists up to `max_len`.
pub fn emptiness_semidecide(
    p: &Pfa,
    delta: &Rational,
    max_len: usize,
    budget: SearchBudget,
) -> Result<Option<Word>> {
    if delta < &Rational::zero() || delta > &crate::rational::one() {
        return Err(Error::OutOfRange(format!(
            "threshold must lie in [0,1], got {}",
            crate::rational::format_rational(delta)
        )));
    }
    let k = p.alphabet().len();
    budget.check(k, max_len)?;
    let root = p.initial().entries().to_vec();
    for len in 0..=max_len {
        let mut prefix = Vec::with_capacity(len);
        if let Some(found) = first_at_length(p, &root, &mut prefix, len, delta) {
            return Ok(Some(p.decode(&found)));
        }
    }
    Ok(None)
}

fn first_at_length(
    p: &Pfa,
    dist: &[Rational],
    prefix: &mut Vec<usize>,
    len: usize,
    delta: &Rational,
) -> Option<Vec<usize>> {
    if prefix.len() == len {
        return (p.accepting_mass(dist) > *delta).then(|| prefix.clone());
    }
    for s in 0..p.alphabet().len() {
        let next = p.step(dist, s);
        prefix.push(s);
        if let Some(w) = first_at_length(p, &next, prefix, len, delta) {
            return Some(w);
        }
        prefix.pop();
    }
    None
}
