//! Probabilistic finite automata over exact rationals.
//!
//! Matrices are column-stochastic: column `s` of the matrix for symbol `w`
//! is the distribution of the next state when the automaton reads `w` in
//! state `s`. Reading a word `w1 w2 ... wk` maps a distribution `x` to
//! `X_wk ... X_w2 X_w1 x`.

pub(crate) mod format;
mod search;

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

pub use format::{parse_pfa, write_pfa};
pub use search::{
    brute_force_value, brute_force_value_over, emptiness_semidecide, SearchBudget, SearchResult,
};

/// Symbol added by [`Pfa::gamma`] whose matrix is the identity.
pub const FREEZE_SYMBOL: &str = "id";
/// Symbol added by [`Pfa::gamma`] whose matrix sends every state to the initial distribution.
pub const RESET_SYMBOL: &str = "rt";

/// A distribution over states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbVector(Vec<Rational>);

impl ProbVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        ProbVector(entries)
    }

    pub fn point(len: usize, at: usize) -> Self {
        let mut v = vec![Rational::zero(); len];
        v[at] = Rational::one();
        ProbVector(v)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass(&self) -> Rational {
        self.0.iter().sum()
    }

    /// Index of the single state carrying all the mass, if there is one.
    pub fn support_point(&self) -> Option<usize> {
        let mut found = None;
        for (i, p) in self.0.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !p.is_one() || found.is_some() {
                return None;
            }
            found = Some(i);
        }
        found
    }
}

/// Square matrix indexed `[target][source]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochMatrix {
    rows: Vec<Vec<Rational>>,
}

impl StochMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        StochMatrix { rows }
    }

    pub fn zeros(n: usize) -> Self {
        StochMatrix {
            rows: vec![vec![Rational::zero(); n]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.rows[i][i] = Rational::one();
        }
        m
    }

    /// Matrix whose every column equals `v`.
    pub fn constant_columns(v: &ProbVector) -> Self {
        let n = v.len();
        StochMatrix {
            rows: (0..n).map(|t| vec![v.0[t].clone(); n]).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn get(&self, target: usize, source: usize) -> &Rational {
        &self.rows[target][source]
    }

    pub fn set(&mut self, target: usize, source: usize, p: Rational) {
        self.rows[target][source] = p;
    }

    pub fn add(&mut self, target: usize, source: usize, p: &Rational) {
        self.rows[target][source] += p;
    }

    pub fn column(&self, source: usize) -> Vec<Rational> {
        self.rows.iter().map(|r| r[source].clone()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| {
            r.iter()
                .enumerate()
                .all(|(j, p)| if i == j { p.is_one() } else { p.is_zero() })
        })
    }

    pub fn has_constant_columns(&self, v: &ProbVector) -> bool {
        self.rows.len() == v.len()
            && self
                .rows
                .iter()
                .zip(v.entries())
                .all(|(r, target)| r.iter().all(|p| p == target))
    }

    /// Dense product `M x`.
    pub fn apply(&self, x: &ProbVector) -> ProbVector {
        ProbVector(
            self.rows
                .iter()
                .map(|r| r.iter().zip(&x.0).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }
}

/// Column-compressed copy of a matrix used by the stepping loops.
#[derive(Debug, Clone)]
struct SparseColumns {
    cols: Vec<Vec<(usize, Rational)>>,
}

impl SparseColumns {
    fn from_matrix(m: &StochMatrix) -> Self {
        let width = m.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut cols = vec![Vec::new(); width];
        for (t, row) in m.rows.iter().enumerate() {
            for (s, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    cols[s].push((t, p.clone()));
                }
            }
        }
        SparseColumns { cols }
    }

    fn step(&self, dist: &[Rational], out_len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); out_len];
        for (s, mass) in dist.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            if let Some(col) = self.cols.get(s) {
                for (t, p) in col {
                    out[*t] += mass * p;
                }
            }
        }
        out
    }
}

/// A finite word, stored by symbol name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<String>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Word(symbols.into_iter().map(Into::into).collect())
    }

    /// Splits on whitespace when present; otherwise tokenizes greedily,
    /// longest symbol first, against `alphabet`. `ε` and the empty string
    /// denote the empty word.
    pub fn parse(text: &str, alphabet: &[String]) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "ε" || t == "eps" {
            return Ok(Word::empty());
        }
        if t.split_whitespace().count() > 1 {
            return Ok(Word::from_symbols(t.split_whitespace()));
        }
        let mut by_len: Vec<&String> = alphabet.iter().collect();
        by_len.sort_by_key(|s| std::cmp::Reverse(s.len()));
        let mut out = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            match by_len.iter().find(|s| !s.is_empty() && rest.starts_with(s.as_str())) {
                Some(s) => {
                    out.push((*s).clone());
                    rest = &rest[s.len()..];
                }
                None => {
                    let bad: String = rest.chars().take(8).collect();
                    return Err(Error::UnknownSymbol(bad));
                }
            }
        }
        Ok(Word(out))
    }

    pub fn symbols(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(
            std::iter::repeat_n(self.0.iter().cloned(), times)
                .flatten()
                .collect(),
        )
    }

    pub fn push(&mut self, symbol: impl Into<String>) {
        self.0.push(symbol.into());
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        if self.0.iter().all(|s| s.chars().count() == 1) {
            write!(f, "{}", self.0.concat())
        } else {
            write!(f, "{}", self.0.join(" "))
        }
    }
}

/// One problem found by [`Pfa::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    DuplicateState(String),
    DuplicateSymbol(String),
    MatrixCount { expected: usize, found: usize },
    MatrixShape { symbol: String, expected: usize },
    NegativeEntry { symbol: String, row: usize, column: usize },
    ColumnSum { symbol: String, column: usize, sum: Rational },
    InitialLength { expected: usize, found: usize },
    InitialNegative { index: usize },
    InitialSum { sum: Rational },
    UnknownAccepting { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "automaton has no states"),
            Violation::DuplicateState(s) => write!(f, "state `{s}` is listed twice"),
            Violation::DuplicateSymbol(s) => write!(f, "symbol `{s}` is listed twice"),
            Violation::MatrixCount { expected, found } => {
                write!(f, "expected {expected} matrices (one per symbol), found {found}")
            }
            Violation::MatrixShape { symbol, expected } => {
                write!(f, "matrix `{symbol}` is not {expected}x{expected}")
            }
            Violation::NegativeEntry { symbol, row, column } => {
                write!(f, "matrix `{symbol}` entry ({row},{column}) is negative")
            }
            Violation::ColumnSum { symbol, column, sum } => write!(
                f,
                "matrix `{symbol}`: column {column} sums to {}",
                format_rational(sum)
            ),
            Violation::InitialLength { expected, found } => {
                write!(f, "initial distribution has {found} entries, expected {expected}")
            }
            Violation::InitialNegative { index } => {
                write!(f, "initial distribution entry {index} is negative")
            }
            Violation::InitialSum { sum } => {
                write!(f, "initial distribution sums to {}", format_rational(sum))
            }
            Violation::UnknownAccepting { index } => {
                write!(f, "accepting set refers to unknown state #{index}")
            }
        }
    }
}

/// Result of [`Pfa::detect_freeze_reset`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreezeReset {
    pub freeze: Option<String>,
    pub reset: Option<String>,
}

/// `(Q, W, X, v, F)`.
#[derive(Debug, Clone)]
pub struct Pfa {
    states: Vec<String>,
    alphabet: Vec<String>,
    matrices: Vec<StochMatrix>,
    initial: ProbVector,
    accepting: Vec<usize>,
    sparse: Vec<SparseColumns>,
}

impl PartialEq for Pfa {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.alphabet == other.alphabet
            && self.matrices == other.matrices
            && self.initial == other.initial
            && self.accepting == other.accepting
    }
}

impl Pfa {
    /// Builds and validates an automaton.
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<String>,
        matrices: Vec<StochMatrix>,
        initial: ProbVector,
        accepting: Vec<usize>,
    ) -> Result<Self> {
        let p = Self::new_unchecked(states, alphabet, matrices, initial, accepting);
        let violations = p.validate();
        if violations.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidPfa(violations))
        }
    }

    /// Builds without validation; [`Pfa::validate`] reports what is wrong.
    pub fn new_unchecked(
        states: Vec<String>,
        alphabet: Vec<String>,
        matrices: Vec<StochMatrix>,
        initial: ProbVector,
        mut accepting: Vec<usize>,
    ) -> Self {
        accepting.sort_unstable();
        accepting.dedup();
        let sparse = matrices.iter().map(SparseColumns::from_matrix).collect();
        Pfa {
            states,
            alphabet,
            matrices,
            initial,
            accepting,
            sparse,
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn matrices(&self) -> &[StochMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, symbol: &str) -> Option<&StochMatrix> {
        self.symbol_index(symbol).map(|i| &self.matrices[i])
    }

    pub fn initial(&self) -> &ProbVector {
        &self.initial
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.binary_search(&state).is_ok()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    /// Every violated invariant, in a stable order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.states.len();
        if n == 0 {
            out.push(Violation::NoStates);
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                out.push(Violation::DuplicateState(s.clone()));
            }
        }
        for (i, s) in self.alphabet.iter().enumerate() {
            if self.alphabet[..i].contains(s) {
                out.push(Violation::DuplicateSymbol(s.clone()));
            }
        }
        if self.matrices.len() != self.alphabet.len() {
            out.push(Violation::MatrixCount {
                expected: self.alphabet.len(),
                found: self.matrices.len(),
            });
        }
        for (k, m) in self.matrices.iter().enumerate() {
            let symbol = self
                .alphabet
                .get(k)
                .cloned()
                .unwrap_or_else(|| format!("#{k}"));
            if m.rows.len() != n || m.rows.iter().any(|r| r.len() != n) {
                out.push(Violation::MatrixShape {
                    symbol,
                    expected: n,
                });
                continue;
            }
            for (r, row) in m.rows.iter().enumerate() {
                for (c, p) in row.iter().enumerate() {
                    if p.is_negative() {
                        out.push(Violation::NegativeEntry {
                            symbol: symbol.clone(),
                            row: r,
                            column: c,
                        });
                    }
                }
            }
            for c in 0..n {
                let sum: Rational = m.rows.iter().map(|r| &r[c]).sum();
                if !sum.is_one() {
                    out.push(Violation::ColumnSum {
                        symbol: symbol.clone(),
                        column: c,
                        sum,
                    });
                }
            }
        }
        if self.initial.len() != n {
            out.push(Violation::InitialLength {
                expected: n,
                found: self.initial.len(),
            });
        } else {
            for (i, p) in self.initial.entries().iter().enumerate() {
                if p.is_negative() {
                    out.push(Violation::InitialNegative { index: i });
                }
            }
            let sum = self.initial.mass();
            if !sum.is_one() {
                out.push(Violation::InitialSum { sum });
            }
        }
        for &f in &self.accepting {
            if f >= n {
                out.push(Violation::UnknownAccepting { index: f });
            }
        }
        out
    }

    /// Maps a word to symbol indices.
    pub fn encode(&self, w: &Word) -> Result<Vec<usize>> {
        w.symbols()
            .iter()
            .map(|s| self.symbol_index(s).ok_or_else(|| Error::UnknownSymbol(s.clone())))
            .collect()
    }

    pub fn decode(&self, symbols: &[usize]) -> Word {
        Word(symbols.iter().map(|&i| self.alphabet[i].clone()).collect())
    }

    /// One step: `X_symbol x`.
    pub fn step(&self, dist: &[Rational], symbol: usize) -> Vec<Rational> {
        self.sparse[symbol].step(dist, self.states.len())
    }

    pub fn run_from(&self, start: &[Rational], symbols: &[usize]) -> Vec<Rational> {
        let mut dist = start.to_vec();
        for &s in symbols {
            dist = self.step(&dist, s);
        }
        dist
    }

    pub fn evolve(&self, w: &Word) -> Result<ProbVector> {
        let symbols = self.encode(w)?;
        Ok(ProbVector(self.run_from(self.initial.entries(), &symbols)))
    }

    /// Probability mass on accepting states.
    pub fn accepting_mass(&self, dist: &[Rational]) -> Rational {
        self.accepting
            .iter()
            .filter_map(|&f| dist.get(f))
            .sum()
    }

    pub fn value(&self, w: &Word) -> Result<Rational> {
        let d = self.evolve(w)?;
        Ok(self.accepting_mass(d.entries()))
    }

    pub fn value_of_symbols(&self, symbols: &[usize]) -> Rational {
        self.accepting_mass(&self.run_from(self.initial.entries(), symbols))
    }

    /// Probability of moving from `src` to `dst` while reading `w`.
    pub fn reach_prob(&self, src: &str, w: &Word, dst: &str) -> Result<Rational> {
        let s = self
            .state_index(src)
            .ok_or_else(|| Error::UnknownState(src.to_string()))?;
        let d = self
            .state_index(dst)
            .ok_or_else(|| Error::UnknownState(dst.to_string()))?;
        let symbols = self.encode(w)?;
        let start = ProbVector::point(self.num_states(), s);
        Ok(self.run_from(start.entries(), &symbols)[d].clone())
    }

    /// Probability of moving from `src` into any state of `dst`.
    pub fn reach_prob_set(&self, src: &str, w: &Word, dst: &[&str]) -> Result<Rational> {
        let mut total = Rational::zero();
        let s = self
            .state_index(src)
            .ok_or_else(|| Error::UnknownState(src.to_string()))?;
        let symbols = self.encode(w)?;
        let end = self.run_from(ProbVector::point(self.num_states(), s).entries(), &symbols);
        for name in dst {
            let d = self
                .state_index(name)
                .ok_or_else(|| Error::UnknownState(name.to_string()))?;
            total += &end[d];
        }
        Ok(total)
    }

    /// First identity symbol and first symbol whose columns all equal the
    /// initial distribution, in alphabet order.
    pub fn detect_freeze_reset(&self) -> FreezeReset {
        let freeze = self
            .matrices
            .iter()
            .position(StochMatrix::is_identity)
            .map(|i| self.alphabet[i].clone());
        let reset = self
            .matrices
            .iter()
            .position(|m| m.has_constant_columns(&self.initial))
            .map(|i| self.alphabet[i].clone());
        FreezeReset { freeze, reset }
    }

    /// Extends the alphabet with `id` (identity) and `rt` (reset to the
    /// initial distribution). Everything else is unchanged.
    pub fn gamma(&self) -> Result<Pfa> {
        for reserved in [FREEZE_SYMBOL, RESET_SYMBOL] {
            if self.alphabet.iter().any(|s| s == reserved) {
                return Err(Error::ReservedSymbol(reserved.to_string()));
            }
        }
        let n = self.num_states();
        let mut alphabet = self.alphabet.clone();
        alphabet.push(FREEZE_SYMBOL.to_string());
        alphabet.push(RESET_SYMBOL.to_string());
        let mut matrices = self.matrices.clone();
        matrices.push(StochMatrix::identity(n));
        matrices.push(StochMatrix::constant_columns(&self.initial));
        Ok(Pfa::new_unchecked(
            self.states.clone(),
            alphabet,
            matrices,
            self.initial.clone(),
            self.accepting.clone(),
        ))
    }
}

/// Drops every `id` and everything up to and including the last `rt`.
///
/// For any automaton `p`, `gamma(p)` gives the input and the output the same
/// value.
pub fn reduce_extended_word(w: &Word) -> Word {
    let syms = w.symbols();
    let start = syms
        .iter()
        .rposition(|s| s == RESET_SYMBOL)
        .map_or(0, |i| i + 1);
    Word(
        syms[start..]
            .iter()
            .filter(|s| *s != FREEZE_SYMBOL)
            .cloned()
            .collect(),
    )
}

/// Small automata used in examples, tests and the command line.
pub mod fixtures {
    use super::*;
    use crate::rational::{int, rat};

    pub fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// The three-state automaton with `X_a`, `X_b` as printed, start q1, accept q3.
    pub fn example1() -> Pfa {
        let h = || rat(1, 2);
        let z = || rat(0, 1);
        let o = || rat(1, 1);
        let xa = StochMatrix::from_rows(vec![
            vec![h(), o(), z()],
            vec![h(), z(), h()],
            vec![z(), z(), h()],
        ]);
        let xb = StochMatrix::from_rows(vec![
            vec![z(), z(), z()],
            vec![z(), o(), h()],
            vec![o(), z(), h()],
        ]);
        Pfa::new(
            names(&["q1", "q2", "q3"]),
            names(&["a", "b"]),
            vec![xa, xb],
            ProbVector::point(3, 0),
            vec![2],
        )
        .unwrap()
    }

    fn single_state(accepting: bool) -> Pfa {
        Pfa::new(
            names(&["s"]),
            names(&["a", "b"]),
            vec![StochMatrix::identity(1), StochMatrix::identity(1)],
            ProbVector::point(1, 0),
            if accepting { vec![0] } else { vec![] },
        )
        .unwrap()
    }

    /// One state, always accepting: every word has value 1.
    pub fn always_accepting() -> Pfa {
        single_state(true)
    }

    /// One state, never accepting: every word has value 0.
    pub fn never_accepting() -> Pfa {
        single_state(false)
    }

    /// Three states with a mixed initial distribution, so that the empty
    /// word already has a nonzero value.
    pub fn mixed_start() -> Pfa {
        let xa = StochMatrix::from_rows(vec![
            vec![rat(1, 3), int(0), rat(1, 4)],
            vec![rat(2, 3), rat(1, 2), int(0)],
            vec![int(0), rat(1, 2), rat(3, 4)],
        ]);
        let xb = StochMatrix::from_rows(vec![
            vec![int(0), rat(1, 5), int(1)],
            vec![rat(1, 2), rat(4, 5), int(0)],
            vec![rat(1, 2), int(0), int(0)],
        ]);
        Pfa::new(
            names(&["p", "q", "r"]),
            names(&["a", "b"]),
            vec![xa, xb],
            ProbVector::new(vec![rat(1, 2), rat(1, 3), rat(1, 6)]),
            vec![2],
        )
        .unwrap()
    }

    /// `a` flips a coin once: from `start` it accepts with probability
    /// `hit` and is stuck otherwise. `b` does nothing. The value is `hit`.
    pub fn coin(hit: Rational) -> Pfa {
        let miss = Rational::one() - &hit;
        let xa = StochMatrix::from_rows(vec![
            vec![int(0), int(0), int(0)],
            vec![hit, int(1), int(0)],
            vec![miss, int(0), int(1)],
        ]);
        Pfa::new(
            names(&["start", "hit", "miss"]),
            names(&["a", "b"]),
            vec![xa, StochMatrix::identity(3)],
            ProbVector::point(3, 0),
            vec![1],
        )
        .unwrap()
    }

    /// Built-in automata by name, for the command line.
    pub fn by_name(name: &str) -> Option<Pfa> {
        match name {
            "example1" => Some(example1()),
            "always-accepting" => Some(always_accepting()),
            "never-accepting" => Some(never_accepting()),
            "mixed-start" => Some(mixed_start()),
            "coin" => Some(coin(rat(3, 4))),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: &[&str] =
        &["example1", "always-accepting", "never-accepting", "mixed-start", "coin"];
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, rat};

    fn w(s: &str) -> Word {
        Word::parse(s, &names(&["a", "b", "c", "id", "rt"])).unwrap()
    }

    #[test]
    fn example1_is_valid() {
        assert!(example1().validate().is_empty());
    }

    #[test]
    fn bad_column_sum_is_reported_with_location() {
        let p = example1();
        let mut mats = p.matrices().to_vec();
        mats[0].set(2, 0, rat(1, 10));
        let q = Pfa::new_unchecked(
            p.states().to_vec(),
            p.alphabet().to_vec(),
            mats,
            p.initial().clone(),
            p.accepting().to_vec(),
        );
        let v = q.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "matrix `a`: column 0 sums to 11/10");
    }

    #[test]
    fn unknown_accepting_state_is_one_violation() {
        let p = example1();
        let q = Pfa::new_unchecked(
            p.states().to_vec(),
            p.alphabet().to_vec(),
            p.matrices().to_vec(),
            p.initial().clone(),
            vec![2, 7],
        );
        assert_eq!(q.validate(), vec![Violation::UnknownAccepting { index: 7 }]);
    }

    #[test]
    fn shape_count_and_initial_violations() {
        let q = Pfa::new_unchecked(
            names(&["x", "y"]),
            names(&["a", "b"]),
            vec![StochMatrix::identity(3)],
            ProbVector::new(vec![rat(1, 2), rat(-1, 2)]),
            vec![],
        );
        let v = q.validate();
        assert!(v.contains(&Violation::MatrixCount {
            expected: 2,
            found: 1
        }));
        assert!(v.contains(&Violation::MatrixShape {
            symbol: "a".into(),
            expected: 2
        }));
        assert!(v.contains(&Violation::InitialNegative { index: 1 }));
        assert!(v.contains(&Violation::InitialSum { sum: int(0) }));
    }

    #[test]
    fn evolve_and_value_on_example1() {
        let p = example1();
        assert_eq!(
            p.evolve(&Word::empty()).unwrap().entries(),
            &[int(1), int(0), int(0)]
        );
        assert_eq!(
            p.evolve(&w("b")).unwrap().entries(),
            &[int(0), int(0), int(1)]
        );
        assert_eq!(p.value(&w("baa")).unwrap(), rat(1, 4));
        assert_eq!(p.value(&Word::empty()).unwrap(), int(0));
        assert_eq!(p.value(&w("b")).unwrap(), int(1));
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let p = example1();
        assert!(matches!(
            p.value(&Word::from_symbols(["z"])),
            Err(Error::UnknownSymbol(s)) if s == "z"
        ));
    }

    #[test]
    fn reach_probabilities() {
        let p = example1();
        assert_eq!(p.reach_prob("q1", &w("a"), "q2").unwrap(), rat(1, 2));
        assert_eq!(p.reach_prob("q2", &Word::empty(), "q2").unwrap(), int(1));
        // X_a only feeds q3 from q3, so two a's from q1 never reach it.
        assert_eq!(p.reach_prob("q1", &w("aa"), "q3").unwrap(), int(0));
        assert_eq!(p.reach_prob("q1", &w("ba"), "q3").unwrap(), rat(1, 2));
        assert!(matches!(
            p.reach_prob("q9", &w("a"), "q1"),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn freeze_and_reset_detection() {
        let p = example1();
        assert_eq!(p.detect_freeze_reset(), FreezeReset::default());
        let g = p.gamma().unwrap();
        assert_eq!(
            g.detect_freeze_reset(),
            FreezeReset {
                freeze: Some("id".into()),
                reset: Some("rt".into())
            }
        );
        // A symbol sending everything to the initial point mass is a reset.
        let q = Pfa::new(
            names(&["s", "t"]),
            names(&["go"]),
            vec![StochMatrix::from_rows(vec![
                vec![int(1), int(1)],
                vec![int(0), int(0)],
            ])],
            ProbVector::point(2, 0),
            vec![1],
        )
        .unwrap();
        assert_eq!(q.detect_freeze_reset().reset.as_deref(), Some("go"));
        assert_eq!(q.detect_freeze_reset().freeze, None);
    }

    #[test]
    fn gamma_extends_alphabet_only() {
        let p = example1();
        let g = p.gamma().unwrap();
        assert_eq!(g.alphabet(), &names(&["a", "b", "id", "rt"])[..]);
        assert_eq!(g.num_states(), 3);
        assert!(g.validate().is_empty());
        assert!(matches!(g.gamma(), Err(Error::ReservedSymbol(s)) if s == "id"));
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_extended_word(&w("a id b")), w("ab"));
        assert_eq!(reduce_extended_word(&w("a b rt a")), w("a"));
        assert_eq!(reduce_extended_word(&w("rt")), Word::empty());
        assert_eq!(reduce_extended_word(&w("id id")), Word::empty());
        assert_eq!(reduce_extended_word(&w("a rt id b rt c id")), w("c"));
    }

    #[test]
    fn word_parsing_and_display() {
        let alpha = names(&["a", "b", "id", "rt"]);
        assert_eq!(
            Word::parse("aidb", &alpha).unwrap(),
            Word::from_symbols(["a", "id", "b"])
        );
        assert_eq!(Word::parse("ε", &alpha).unwrap(), Word::empty());
        assert!(Word::parse("ax", &alpha).is_err());
        assert_eq!(Word::from_symbols(["a", "b"]).to_string(), "ab");
        assert_eq!(Word::from_symbols(["a", "id"]).to_string(), "a id");
        assert_eq!(Word::empty().to_string(), "ε");
    }

    #[test]
    fn support_point() {
        assert_eq!(ProbVector::point(4, 2).support_point(), Some(2));
        assert_eq!(
            ProbVector::new(vec![rat(1, 2), rat(1, 2)]).support_point(),
            None
        );
    }
}
