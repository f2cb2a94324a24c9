//! The memoryless channel seen by blocks of `m + n` uses of `V_A` under a
//! fixed control schedule.
//!
//! The schedule reads a word `w` of length `m`, freezes for `n - 1` uses and
//! resets on the last one, so every block starts from the initial state.
//! Because the data bit is either copied or replaced by a fair coin, the
//! block channel is additive: `y = d xor e` with a noise law `N` that does
//! not depend on `d`. Write a noise pattern as (head, tail) with the head
//! covering the `m` word slots. The tail is seen entirely from the state
//! reached after `w`, so
//!
//! `N(head, tail) = A(head) [tail = 0] + B(head) 2^-n`,
//!
//! where `A` and `B` split the head's probability by whether that state is
//! accepting. Only `2^m` head patterns are ever tabulated.

use num_traits::{One, Zero};

use super::ba::{blahut_arimoto, DiscreteChannel};
use super::info::{binary_entropy, plogp, SpectrumSample};
use crate::error::{Error, Result};
use crate::fsmc::LiftedChannel;
use crate::pfa::{Pfa, Word};
use crate::rational::{to_f64, Rational};

/// Default cap on `m + n` for tabulated block channels.
pub const DEFAULT_BLOCK_BUDGET: usize = 14;
/// Dense `2^L x 2^L` matrices are only built up to this block length.
pub const DENSE_BLOCK_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlSchedule {
    word: Vec<usize>,
    free: usize,
    freeze: usize,
    reset: usize,
}

impl ControlSchedule {
    /// `word` then `free - 1` freezes then one reset (control indices).
    pub fn new(word: Vec<usize>, free: usize, freeze: usize, reset: usize) -> Result<Self> {
        if free == 0 {
            return Err(Error::OutOfRange(
                "a schedule needs at least one free slot for the reset".into(),
            ));
        }
        Ok(ControlSchedule {
            word,
            free,
            freeze,
            reset,
        })
    }

    /// Uses the automaton's own freeze and reset symbols.
    pub fn for_pfa(p: &Pfa, word: &Word, free: usize) -> Result<Self> {
        let fr = p.detect_freeze_reset();
        let (Some(freeze), Some(reset)) = (fr.freeze, fr.reset) else {
            return Err(Error::Alphabet(
                "the automaton needs a freeze and a reset symbol".into(),
            ));
        };
        let idx = |s: &str| p.symbol_index(s).expect("detected symbol exists");
        Self::new(p.encode(word)?, free, idx(&freeze), idx(&reset))
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn m(&self) -> usize {
        self.word.len()
    }

    pub fn n(&self) -> usize {
        self.free
    }

    pub fn period(&self) -> usize {
        self.word.len() + self.free
    }

    pub fn freeze(&self) -> usize {
        self.freeze
    }

    pub fn reset(&self) -> usize {
        self.reset
    }

    /// Control symbol of every slot of one period.
    pub fn controls(&self) -> Vec<usize> {
        let mut c = self.word.clone();
        c.extend(std::iter::repeat_n(self.freeze, self.free - 1));
        c.push(self.reset);
        c
    }
}

/// The additive block channel of one period.
#[derive(Debug, Clone)]
pub struct BlockChannel {
    m: usize,
    n: usize,
    accept: Vec<Rational>,
    reject: Vec<Rational>,
    accept_f: Vec<f64>,
    reject_f: Vec<f64>,
}

fn is_identity(law: impl Fn(usize) -> Vec<Rational>, ns: usize) -> bool {
    (0..ns).all(|s| {
        law(s)
            .iter()
            .enumerate()
            .all(|(t, p)| if t == s { p.is_one() } else { p.is_zero() })
    })
}

fn is_reset(law: impl Fn(usize) -> Vec<Rational>, ns: usize, to: usize) -> bool {
    (0..ns).all(|s| {
        law(s)
            .iter()
            .enumerate()
            .all(|(t, p)| if t == to { p.is_one() } else { p.is_zero() })
    })
}

/// Tabulates the block channel of `sched` exactly. The head table has
/// `2^m |Q|` entries, so `m` is limited by `budget` (on `m + n`).
pub fn induced_block_channel(
    ch: &LiftedChannel,
    sched: &ControlSchedule,
    budget: usize,
) -> Result<BlockChannel> {
    if sched.period() > budget {
        return Err(Error::BudgetExceeded {
            needed: sched.period() as u128,
            budget: budget as u128,
        });
    }
    let f = ch.fsmc();
    let ns = f.states().len();
    let nc = ch.controls().len();
    if let Some(&bad) = sched
        .word()
        .iter()
        .chain([&sched.freeze(), &sched.reset()])
        .find(|&&c| c >= nc)
    {
        return Err(Error::InvalidChannel(format!("control #{bad} does not exist")));
    }
    let law = |c: usize| move |s: usize| f.state_law(ch.input_index(0, c), s).to_vec();
    if !is_identity(law(sched.freeze()), ns) {
        return Err(Error::InvalidChannel(format!(
            "control `{}` does not freeze the state",
            ch.controls()[sched.freeze()]
        )));
    }
    if !is_reset(law(sched.reset()), ns, f.initial()) {
        return Err(Error::InvalidChannel(format!(
            "control `{}` does not reset to the initial state",
            ch.controls()[sched.reset()]
        )));
    }

    // With data 0 the output is the noise itself.
    let xs: Vec<usize> = sched.word().iter().map(|&c| ch.input_index(0, c)).collect();
    let head = f.joint_seq_dist(&xs, (1usize << sched.m()) * ns)?;
    let mut accept = Vec::with_capacity(1 << sched.m());
    let mut reject = Vec::with_capacity(1 << sched.m());
    for chunk in head.table().chunks(ns) {
        let (mut a, mut b) = (Rational::zero(), Rational::zero());
        for (s, p) in chunk.iter().enumerate() {
            if ch.accepting()[s] {
                a += p;
            } else {
                b += p;
            }
        }
        accept.push(a);
        reject.push(b);
    }
    Ok(BlockChannel {
        m: sched.m(),
        n: sched.n(),
        accept_f: accept.iter().map(to_f64).collect(),
        reject_f: reject.iter().map(to_f64).collect(),
        accept,
        reject,
    })
}

impl BlockChannel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.m + self.n
    }

    /// Probability that the state after the word is accepting.
    pub fn word_value(&self) -> Rational {
        self.accept.iter().sum()
    }

    fn split(&self, e: usize) -> (usize, usize) {
        (e >> self.n, e & ((1usize << self.n) - 1))
    }

    /// Exact `N(e)`; the first slot is the most significant bit of `e`.
    /// Only meaningful for `m + n` below the word size.
    pub fn noise_prob_exact(&self, e: usize) -> Rational {
        let (h, t) = self.split(e);
        let spread = &self.reject[h] / Rational::from_integer(num_bigint::BigInt::one() << self.n);
        if t == 0 {
            &self.accept[h] + spread
        } else {
            spread
        }
    }

    /// `log2 N(e)` from the head and whether the tail is all zeros.
    fn log_noise(&self, head: usize, tail_zero: bool) -> f64 {
        let a = self.accept_f[head];
        let b = self.reject_f[head];
        let n = self.n as f64;
        if tail_zero {
            (a + b * (-n).exp2()).log2()
        } else {
            b.log2() - n
        }
    }

    /// Information density `log2 N(e) + m + n` of a noise pattern given as
    /// bits, under uniform input.
    pub fn density(&self, noise: &[u8]) -> f64 {
        let head = noise[..self.m]
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let tail_zero = noise[self.m..].iter().all(|&b| b == 0);
        self.period() as f64 + self.log_noise(head, tail_zero)
    }

    /// `H(N)` in bits, which equals `H(Y | X, C)` for the block.
    pub fn noise_entropy(&self) -> f64 {
        let n = self.n as f64;
        let spread = (-n).exp2();
        self.accept_f
            .iter()
            .zip(&self.reject_f)
            .map(|(&a, &b)| {
                let zero_tail = plogp(a + b * spread);
                // 2^n - 1 patterns of mass b 2^-n each.
                let rest = if b > 0.0 {
                    -b * (1.0 - spread) * (b.log2() - n)
                } else {
                    0.0
                };
                zero_tail + rest
            })
            .sum()
    }

    /// `I(X;Y)` for uniform data, which is optimal for additive noise.
    pub fn uniform_information(&self) -> f64 {
        (self.period() as f64 - self.noise_entropy()).max(0.0)
    }

    /// Atoms of the information density under uniform input.
    pub fn spectrum(&self) -> Vec<SpectrumSample> {
        let n = self.n as f64;
        let spread = (-n).exp2();
        let l = self.period() as f64;
        let mut out = Vec::new();
        for (h, (&a, &b)) in self.accept_f.iter().zip(&self.reject_f).enumerate() {
            let zero = a + b * spread;
            if zero > 0.0 {
                out.push(SpectrumSample {
                    value: l + self.log_noise(h, true),
                    prob: zero,
                });
            }
            if b > 0.0 {
                out.push(SpectrumSample {
                    value: l + self.log_noise(h, false),
                    prob: b * (1.0 - spread),
                });
            }
        }
        out
    }

    /// Smallest and largest information density with positive probability.
    pub fn density_range(&self) -> (f64, f64) {
        self.spectrum().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.value), hi.max(s.value))
        })
    }

    /// Exact noise law over all `2^(m+n)` patterns.
    pub fn noise_law_exact(&self) -> Result<Vec<Rational>> {
        let l = self.period();
        if l > 2 * DEFAULT_BLOCK_BUDGET {
            return Err(Error::BudgetExceeded {
                needed: 1u128 << l.min(127),
                budget: 1u128 << (2 * DEFAULT_BLOCK_BUDGET),
            });
        }
        Ok((0..1usize << l).map(|e| self.noise_prob_exact(e)).collect())
    }

    /// Dense `p(y | d)` matrix; only for short blocks.
    pub fn to_discrete_channel(&self) -> Result<DiscreteChannel> {
        let l = self.period();
        if l > DENSE_BLOCK_LIMIT {
            return Err(Error::BudgetExceeded {
                needed: 1u128 << (2 * l).min(127),
                budget: 1u128 << (2 * DENSE_BLOCK_LIMIT),
            });
        }
        let law: Vec<f64> = (0..1usize << l).map(|e| to_f64(&self.noise_prob_exact(e))).collect();
        DiscreteChannel::new(
            (0..1usize << l)
                .map(|d| (0..1usize << l).map(|y| law[y ^ d]).collect())
                .collect(),
        )
    }
}

/// Entropy of the tail noise when the word succeeds with probability `v`:
/// `h(v + (1-v) 2^-n) + (1-v)(1-2^-n) log2(2^n - 1)`.
pub fn tail_entropy(v: f64, n: usize) -> f64 {
    let spread = (-(n as f64)).exp2();
    let zero = v + (1.0 - v) * spread;
    let h = binary_entropy(zero.clamp(0.0, 1.0)).unwrap_or(0.0);
    // log2(2^n - 1) = n + log2(1 - 2^-n)
    let log_rest = if n == 0 { 0.0 } else { n as f64 + (-spread).ln_1p() / std::f64::consts::LN_2 };
    h + (1.0 - v) * (1.0 - spread) * log_rest
}

/// Rate guaranteed by `H(Y|X,C) <= m + H(tail)`: `(n - H(tail)) / (m + n)`.
/// Needs only the word's value, so it applies to any `n`.
pub fn chain_lower_rate(v: f64, m: usize, n: usize) -> f64 {
    ((n as f64 - tail_entropy(v, n)) / (m + n) as f64).max(0.0)
}

/// The chain of upper bounds on `H(Y|X,C)` for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub word_value: f64,
    /// `H(Y|X,C)`, exact up to float evaluation.
    pub cond_entropy: f64,
    /// `m + H(tail)`.
    pub head_plus_tail: f64,
    /// `m + 1 + (1 - v) n`.
    pub coarse_bound: f64,
    /// `(n v - 1)/(m + n)`, the rate implied by the coarse bound.
    pub coarse_rate: f64,
    pub chain_rate: f64,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        let tol = 1e-9;
        self.cond_entropy <= self.head_plus_tail + tol && self.head_plus_tail <= self.coarse_bound + tol
    }
}

pub fn chain_report(block: &BlockChannel) -> ChainReport {
    let v = to_f64(&block.word_value());
    let (m, n) = (block.m(), block.n());
    ChainReport {
        word_value: v,
        cond_entropy: block.noise_entropy(),
        head_plus_tail: m as f64 + tail_entropy(v, n),
        coarse_bound: m as f64 + 1.0 + (1.0 - v) * n as f64,
        coarse_rate: (n as f64 * v - 1.0) / (m + n) as f64,
        chain_rate: chain_lower_rate(v, m, n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputLaw {
    Uniform,
    /// Blahut–Arimoto on the dense block channel when it is small enough;
    /// otherwise uniform, which is already optimal for additive noise.
    Optimized { tol: f64 },
}

#[derive(Debug, Clone)]
pub struct RateReport {
    /// Bits per channel use.
    pub rate: f64,
    /// Bits per block.
    pub information: f64,
    pub chain: ChainReport,
    pub optimized_with_ba: bool,
}

pub fn achievable_rate(block: &BlockChannel, input: InputLaw) -> Result<RateReport> {
    let uniform = block.uniform_information();
    let (information, optimized_with_ba) = match input {
        InputLaw::Uniform => (uniform, false),
        InputLaw::Optimized { tol } => {
            if block.period() <= DENSE_BLOCK_LIMIT.min(8) {
                let out = blahut_arimoto(&block.to_discrete_channel()?, tol, 10_000)?;
                (out.capacity.max(uniform), true)
            } else {
                (uniform, false)
            }
        }
    };
    Ok(RateReport {
        rate: information / block.period() as f64,
        information,
        chain: chain_report(block),
        optimized_with_ba,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationarityReport {
    /// The state after one period is the initial state, surely.
    pub resets_to_initial: bool,
    /// Two consecutive blocks have the product law `N x N`; `None` when
    /// the two-block table exceeds the budget.
    pub blocks_independent: Option<bool>,
}

/// Checks, exactly, that consecutive blocks see the same channel.
pub fn check_stationarity(
    ch: &LiftedChannel,
    sched: &ControlSchedule,
    table_budget: usize,
) -> Result<StationarityReport> {
    let f = ch.fsmc();
    let ns = f.states().len();
    let one_period: Vec<usize> = sched.controls().iter().map(|&c| ch.input_index(0, c)).collect();
    let first = f.joint_seq_dist(&one_period, table_budget)?;
    let marginal = first.state_marginal();
    let resets_to_initial = marginal
        .iter()
        .enumerate()
        .all(|(s, p)| if s == f.initial() { p.is_one() } else { p.is_zero() });

    let l = sched.period();
    let blocks_independent = if (1u128 << (2 * l).min(127)) * ns as u128 <= table_budget as u128 {
        let block = induced_block_channel(ch, sched, l)?;
        let law = block.noise_law_exact()?;
        let two: Vec<usize> = one_period.iter().chain(&one_period).copied().collect();
        let joint = f.joint_seq_dist(&two, table_budget)?.output_marginal();
        Some(joint.iter().enumerate().all(|(e, p)| {
            let (e1, e2) = (e >> l, e & ((1 << l) - 1));
            *p == &law[e1] * &law[e2]
        }))
    } else {
        None
    };
    Ok(StationarityReport {
        resets_to_initial,
        blocks_independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::info::mutual_information;
    use crate::fsmc::build_v;
    use crate::gadgets::build_d_xy;
    use crate::pfa::fixtures::{always_accepting, coin, example1, never_accepting};
    use crate::rational::rat;

    fn lifted(p: &Pfa) -> (Pfa, LiftedChannel) {
        let g = p.gamma().unwrap();
        let v = build_v(&g).unwrap();
        (g, v)
    }

    fn block(p: &Pfa, word: &[&str], free: usize) -> (LiftedChannel, ControlSchedule, BlockChannel) {
        let (g, v) = lifted(p);
        let s = ControlSchedule::for_pfa(&g, &Word::from_symbols(word.iter().copied()), free).unwrap();
        let b = induced_block_channel(&v, &s, DEFAULT_BLOCK_BUDGET).unwrap();
        (v, s, b)
    }

    #[test]
    fn schedule_layout() {
        let (g, _) = lifted(&example1());
        let s = ControlSchedule::for_pfa(&g, &Word::from_symbols(["b", "a"]), 3).unwrap();
        let names: Vec<&str> = s.controls().iter().map(|&c| g.alphabet()[c].as_str()).collect();
        assert_eq!(names, ["b", "a", "id", "id", "rt"]);
        assert!(ControlSchedule::for_pfa(&example1(), &Word::empty(), 2).is_err());
        assert!(ControlSchedule::new(vec![], 0, 0, 1).is_err());
    }

    #[test]
    fn head_tail_law_matches_full_recursion() {
        // Oracle: the dense output law of one period with data 0.
        for (p, word) in [(example1(), vec!["b", "a"]), (coin(rat(2, 3)), vec!["a"])] {
            let (v, s, b) = block(&p, &word, 3);
            let xs: Vec<usize> = s.controls().iter().map(|&c| v.input_index(0, c)).collect();
            let full = v.fsmc().joint_seq_dist(&xs, 1 << 12).unwrap().output_marginal();
            assert_eq!(b.noise_law_exact().unwrap(), full);
        }
    }

    #[test]
    fn channel_is_additive_in_the_data() {
        let (v, s, b) = block(&example1(), &["a", "b"], 2);
        let law = b.noise_law_exact().unwrap();
        for d in 0..16usize {
            let xs: Vec<usize> = s
                .controls()
                .iter()
                .enumerate()
                .map(|(t, &c)| v.input_index(((d >> (3 - t)) & 1) as u8, c))
                .collect();
            let py = v.fsmc().joint_seq_dist(&xs, 1 << 10).unwrap().output_marginal();
            for (y, p) in py.iter().enumerate() {
                assert_eq!(p, &law[y ^ d]);
            }
        }
    }

    #[test]
    fn trivial_channels() {
        let (_, _, b) = block(&always_accepting(), &["a"], 3);
        assert_eq!(b.uniform_information(), 4.0);
        assert_eq!(achievable_rate(&b, InputLaw::Uniform).unwrap().rate, 1.0);
        let (_, _, b) = block(&never_accepting(), &["a", "b"], 2);
        assert!(b.uniform_information().abs() < 1e-12);
        let uniform = rat(1, 16);
        assert!(b.noise_law_exact().unwrap().iter().all(|p| *p == uniform));
    }

    #[test]
    fn entropy_matches_dense_evaluation() {
        let (_, _, b) = block(&build_d_xy(&rat(3, 4), &rat(1, 2)).unwrap(), &["a", "a", "b"], 4);
        let law: Vec<f64> = b.noise_law_exact().unwrap().iter().map(to_f64).collect();
        let dense: f64 = law.iter().map(|&p| plogp(p)).sum();
        assert!((b.noise_entropy() - dense).abs() < 1e-9);
        // Dense mutual information with uniform input.
        let l = b.period();
        let size = 1usize << l;
        let joint: Vec<Vec<f64>> = (0..size)
            .map(|d| (0..size).map(|y| law[y ^ d] / size as f64).collect())
            .collect();
        let mi = mutual_information(&joint).unwrap();
        assert!((b.uniform_information() - mi).abs() < 1e-9);
        let mean: f64 = b.spectrum().iter().map(|s| s.value * s.prob).sum();
        assert!((mean - mi).abs() < 1e-9);
    }

    #[test]
    fn chain_bounds_hold() {
        for (p, word, free) in [
            (example1(), vec!["b"], 5),
            (coin(rat(3, 4)), vec!["a"], 6),
            (build_d_xy(&rat(3, 4), &rat(1, 2)).unwrap(), vec!["a", "a", "b"], 7),
        ] {
            let (_, _, b) = block(&p, &word, free);
            let r = achievable_rate(&b, InputLaw::Uniform).unwrap();
            assert!(r.chain.holds(), "{:?}", r.chain);
            assert!(r.rate + 1e-12 >= r.chain.chain_rate);
            assert!(r.chain.chain_rate + 1e-12 >= r.chain.coarse_rate);
        }
    }

    #[test]
    fn optimized_input_never_loses() {
        let (_, _, b) = block(&coin(rat(3, 5)), &["a"], 3);
        let u = achievable_rate(&b, InputLaw::Uniform).unwrap();
        let o = achievable_rate(&b, InputLaw::Optimized { tol: 1e-10 }).unwrap();
        assert!(o.optimized_with_ba);
        assert!(o.rate + 1e-12 >= u.rate);
        assert!((o.rate - u.rate).abs() < 1e-8);
    }

    #[test]
    fn consecutive_blocks_are_independent_and_identical() {
        let (v, s, _) = block(&example1(), &["b", "a"], 2);
        let r = check_stationarity(&v, &s, 1 << 14).unwrap();
        assert!(r.resets_to_initial);
        assert_eq!(r.blocks_independent, Some(true));
    }

    #[test]
    fn tail_entropy_extremes() {
        assert!(tail_entropy(1.0, 10).abs() < 1e-12);
        assert!((tail_entropy(0.0, 10) - 10.0).abs() < 1e-9);
        assert!((chain_lower_rate(1.0, 1, 18) - 18.0 / 19.0).abs() < 1e-12);
    }
}
