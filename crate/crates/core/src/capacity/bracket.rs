//! Lower and upper bounds on the capacity of `V_A`.
//!
//! Lower bounds are rates of the block protocol for candidate words: exact
//! mutual information for blocks within the budget, and the chain bound
//! (which needs only the word's value) at the block length
//! `n = ceil((1 + (v - 2 delta) m) / delta)`, where it guarantees
//! `v - 2 delta`. The upper bound is the best value found by exhaustive
//! search; it is certified only when it reaches 1 or when the automaton is a
//! recognised gadget whose value is known in closed form.

use rayon::prelude::*;

use super::block::{chain_lower_rate, induced_block_channel, ControlSchedule};
use super::lift;
use crate::error::{Error, Result};
use crate::gadgets::build_d_xy;
use crate::pfa::{brute_force_value_over, Pfa, SearchBudget, Word, FREEZE_SYMBOL, RESET_SYMBOL};
use crate::rational::{format_rational, one, rat, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpperCertificate {
    /// The automaton is `D_{x,y}` (optionally with freeze/reset added).
    Dxy { x: Rational, y: Rational },
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpperKind {
    /// A word of value 1 was found.
    Saturated,
    /// Closed-form value of a verified gadget.
    Dichotomy,
    /// Best value over words up to the horizon; not a proof.
    HeuristicHorizon { horizon: usize },
}

impl std::fmt::Display for UpperKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UpperKind::Saturated => write!(f, "saturated"),
            UpperKind::Dichotomy => write!(f, "dichotomy certificate"),
            UpperKind::HeuristicHorizon { horizon } => {
                write!(f, "heuristic horizon bound (length <= {horizon})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerMethod {
    ExactBlock,
    ChainBound,
}

impl std::fmt::Display for LowerMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LowerMethod::ExactBlock => "exact",
            LowerMethod::ChainBound => "chain",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRow {
    pub word: Word,
    pub word_value: Rational,
    pub m: usize,
    pub n: usize,
    pub rate: f64,
    pub method: LowerMethod,
}

impl CandidateRow {
    pub fn block(&self) -> usize {
        self.m + self.n
    }
}

#[derive(Debug, Clone)]
pub struct BracketOptions {
    pub delta: f64,
    /// Largest `m + n` for exact block evaluation.
    pub budget: usize,
    /// Length limit of the exhaustive search.
    pub horizon: usize,
    pub search: SearchBudget,
    pub certificate: Option<UpperCertificate>,
    /// Further candidate words, e.g. synthesised witnesses.
    pub extra_words: Vec<Word>,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions {
            delta: 0.1,
            budget: 12,
            horizon: 6,
            search: SearchBudget::default(),
            certificate: None,
            extra_words: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CapacityBracket {
    pub lower: f64,
    /// The row achieving `lower`; `None` when no candidate gives a positive
    /// rate.
    pub lower_provenance: Option<CandidateRow>,
    pub delta: f64,
    pub upper: f64,
    pub upper_exact: Rational,
    pub upper_kind: UpperKind,
    /// Horizon actually searched (reduced if the search budget demanded it).
    pub horizon: usize,
    pub candidates: Vec<CandidateRow>,
}

impl CapacityBracket {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_consistent(&self) -> bool {
        self.lower >= 0.0 && self.lower <= self.upper + 1e-9 && self.upper <= 1.0
    }
}

/// Block length at which the chain bound guarantees `v - 2 delta`.
pub fn chain_block_length(v: f64, m: usize, delta: f64) -> usize {
    (((1.0 + (v - 2.0 * delta) * m as f64) / delta).ceil()).max(1.0) as usize
}

fn verify_certificate(a: &Pfa, cert: &UpperCertificate) -> Result<Rational> {
    match cert {
        UpperCertificate::Dxy { x, y } => {
            let d = build_d_xy(x, y)?;
            if *a != d && *a != d.gamma()? {
                return Err(Error::Certificate(format!(
                    "the automaton is not D_{{{},{}}}",
                    format_rational(x),
                    format_rational(y)
                )));
            }
            let half = rat(1, 2);
            let two_y = y + y;
            Ok(if *x <= half {
                y.clone()
            } else if two_y > one() {
                one()
            } else {
                two_y
            })
        }
    }
}

pub fn capacity_bracket(a: &Pfa, opts: &BracketOptions) -> Result<CapacityBracket> {
    if !(opts.delta > 0.0 && opts.delta < 0.5) {
        return Err(Error::OutOfRange(format!(
            "delta must lie in (0, 1/2), got {}",
            opts.delta
        )));
    }
    let (g, ch) = lift(a)?;
    let plain: Vec<usize> = g
        .alphabet()
        .iter()
        .enumerate()
        .filter(|(_, s)| *s != FREEZE_SYMBOL && *s != RESET_SYMBOL)
        .map(|(i, _)| i)
        .collect();

    // Best word of each length limit, shrinking the horizon if the search
    // budget cannot cover it.
    let mut horizon = opts.horizon;
    let searched = loop {
        match (0..=horizon)
            .map(|len| brute_force_value_over(&g, &plain, len, opts.search))
            .collect::<Result<Vec<_>>>()
        {
            Ok(found) => break found,
            Err(Error::BudgetExceeded { .. }) if horizon > 0 => horizon -= 1,
            Err(e) => return Err(e),
        }
    };
    let best = searched.last().map(|r| r.best_value.clone()).unwrap_or_default();

    let mut words: Vec<Word> = Vec::new();
    for w in searched.into_iter().map(|r| r.best_word).chain(opts.extra_words.iter().cloned()) {
        if !words.contains(&w) {
            words.push(w);
        }
    }

    let mut jobs = Vec::new();
    for w in &words {
        let v = g.value(w)?;
        let m = w.len();
        for n in 1..=opts.budget.saturating_sub(m) {
            jobs.push((w.clone(), v.clone(), n, LowerMethod::ExactBlock));
        }
        let n = chain_block_length(to_f64(&v), m, opts.delta);
        jobs.push((w.clone(), v, n, LowerMethod::ChainBound));
    }
    let candidates = jobs
        .into_par_iter()
        .map(|(word, word_value, n, method)| {
            let m = word.len();
            let rate = match method {
                LowerMethod::ExactBlock => {
                    let sched = ControlSchedule::for_pfa(&g, &word, n)?;
                    let block = induced_block_channel(&ch, &sched, opts.budget)?;
                    block.uniform_information() / block.period() as f64
                }
                LowerMethod::ChainBound => chain_lower_rate(to_f64(&word_value), m, n),
            };
            Ok(CandidateRow {
                word,
                word_value,
                m,
                n,
                rate,
                method,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let lower_provenance = candidates
        .iter()
        .filter(|r| r.rate > 0.0)
        .fold(None::<&CandidateRow>, |acc, r| match acc {
            Some(b) if b.rate >= r.rate => Some(b),
            _ => Some(r),
        })
        .cloned();
    let lower = lower_provenance.as_ref().map_or(0.0, |r| r.rate);

    let (upper_exact, upper_kind) = if best == one() {
        (one(), UpperKind::Saturated)
    } else if let Some(cert) = &opts.certificate {
        (verify_certificate(a, cert)?, UpperKind::Dichotomy)
    } else {
        (best, UpperKind::HeuristicHorizon { horizon })
    };
    Ok(CapacityBracket {
        lower,
        lower_provenance,
        delta: opts.delta,
        upper: to_f64(&upper_exact),
        upper_exact,
        upper_kind,
        horizon,
        candidates,
    })
}
