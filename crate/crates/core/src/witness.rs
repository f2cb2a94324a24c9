//! Witness words that drive `D_{x,y}` (or `D_{A,y}`) close to value `2y`
//! when `x > 1/2`.
//!
//! With `b > 1` solving `x^b = 1 - x` and
//! `C = (1/b) log_x(((b - 1)/b) eps)`, block `i` has length
//! `n_i = ceil(log_x(1/i) + C)`. The word `a^{n_2} b a^{n_3} b ... a^{n_k} b`
//! keeps the bottom branch's chance of dying in `q6` below `eps` for every
//! `k`, while the top branch's chance of reaching `q3` tends to one as `k`
//! grows. Lengths are computed in floating point; everything after that is
//! exact.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gadgets::{build_d_ay, build_d_xy};
use crate::pfa::{Pfa, Word};
use crate::rational::{format_rational, rat, to_f64, Rational};

const B_TOLERANCE: f64 = 1e-12;

/// Solves `x^b = 1 - x` for `b` by bisection. Requires `1/2 < x < 1`.
pub fn solve_b(x: &Rational) -> Result<f64> {
    if x <= &rat(1, 2) || x >= &Rational::one() {
        return Err(Error::OutOfRange(format!(
            "x must lie in (1/2,1), got {}",
            format_rational(x)
        )));
    }
    let xf = to_f64(x);
    let target = 1.0 - xf;
    // x^b is decreasing in b and equals x > 1 - x at b = 1.
    let f = |b: f64| xf.powf(b) - target;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= B_TOLERANCE && hi - lo <= B_TOLERANCE {
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// `(1/b) log_x(((b - 1)/b) eps)`.
pub fn c_eps(x: f64, eps: f64, b: f64) -> f64 {
    ((b - 1.0) / b * eps).ln() / x.ln() / b
}

/// `b / (b - 1)`, an upper bound on `zeta(b)`; infinite at `b = 1`.
pub fn zeta_tail_bound(b: f64) -> Result<f64> {
    if b.is_nan() || b < 1.0 {
        return Err(Error::OutOfRange(format!("b must exceed 1, got {b}")));
    }
    if b == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(b / (b - 1.0))
}

/// Parameters of the length schedule for a fixed `x` and `eps`.
#[derive(Debug, Clone)]
pub struct WitnessParams {
    pub x: Rational,
    pub eps: Rational,
    /// `None` when `x = 1`, where every block has length one.
    pub b: Option<f64>,
    pub c_eps: f64,
}

impl WitnessParams {
    /// Requires `1/2 < x <= 1` and `0 < eps < x`.
    pub fn new(x: &Rational, eps: &Rational) -> Result<Self> {
        if x <= &rat(1, 2) || x > &Rational::one() {
            return Err(Error::OutOfRange(format!(
                "x must lie in (1/2,1], got {}",
                format_rational(x)
            )));
        }
        if eps <= &Rational::zero() || eps >= x {
            return Err(Error::OutOfRange(format!(
                "eps must lie in (0,x), got {}",
                format_rational(eps)
            )));
        }
        let (b, c) = if x.is_one() {
            (None, 0.0)
        } else {
            let b = solve_b(x)?;
            (Some(b), c_eps(to_f64(x), to_f64(eps), b))
        };
        if !c.is_finite() {
            return Err(Error::OutOfRange("C_eps is not finite".into()));
        }
        Ok(WitnessParams {
            x: x.clone(),
            eps: eps.clone(),
            b,
            c_eps: c,
        })
    }

    /// `n_i`, at least one.
    pub fn length(&self, i: usize) -> usize {
        if self.b.is_none() {
            return 1;
        }
        let xf = to_f64(&self.x);
        let raw = ((1.0 / i as f64).ln() / xf.ln() + self.c_eps).ceil();
        if raw < 1.0 {
            1
        } else {
            raw as usize
        }
    }

    /// `n_2, ..., n_k`.
    pub fn lengths(&self, k: usize) -> Vec<usize> {
        (2..=k).map(|i| self.length(i)).collect()
    }

    /// `sum_{i=2}^k (1-x)^{n_i}` next to its analytic bound
    /// `x^{b C} b/(b-1)`, which equals `eps`.
    pub fn tail_sum(&self, k: usize) -> (f64, f64) {
        let not_x = 1.0 - to_f64(&self.x);
        let partial = self.lengths(k).iter().map(|&n| not_x.powi(n as i32)).sum();
        let bound = match self.b {
            Some(b) => to_f64(&self.x).powf(b * self.c_eps) * zeta_tail_bound(b).unwrap_or(f64::INFINITY),
            None => 0.0,
        };
        (partial, bound)
    }
}

pub fn witness_lengths(x: &Rational, eps: &Rational, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k must be at least 2, got {k}")));
    }
    Ok(WitnessParams::new(x, eps)?.lengths(k))
}

/// Which gadget the word is for.
#[derive(Debug, Clone)]
pub enum WitnessMode {
    /// `D_{x,1/2}`; blocks are `a^n b`.
    Plain { x: Rational },
    /// `D_{A,1/2}`; blocks are `(a w c)^n b`, with `x = val(A, w)`.
    Lifted { automaton: Pfa, inner: Word },
}

#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub k: usize,
    pub x: Rational,
    pub lengths: Vec<usize>,
    pub word: Word,
    /// Probability of going from `q1` to `q3` on `word`.
    pub p_q1_q3: Rational,
    /// Probability of going from `q4` to `q6` on `word`.
    pub p_q4_q6: Rational,
    /// `n_{k+1}`; the completed word appends that many more `a`s (or blocks).
    pub tail_length: usize,
    pub completed: Word,
    /// Value of the completed word on the gadget with `y = 1/2`.
    pub value: Rational,
    /// `p_q4_q6 <= eps`.
    pub requirement1_met: bool,
    /// `p_q1_q3 >= 1 - eps`.
    pub requirement2_met: bool,
}

struct Target {
    gadget: Pfa,
    x: Rational,
    unit: Word,
}

impl Target {
    fn new(mode: &WitnessMode) -> Result<Self> {
        let half = rat(1, 2);
        match mode {
            WitnessMode::Plain { x } => Ok(Target {
                gadget: build_d_xy(x, &half)?,
                x: x.clone(),
                unit: Word::from_symbols(["a"]),
            }),
            WitnessMode::Lifted { automaton, inner } => {
                let x = automaton.value(inner)?;
                let mut unit = Word::from_symbols(["a"]);
                unit = unit.concat(inner);
                unit.push("c");
                Ok(Target {
                    gadget: build_d_ay(automaton, &half)?,
                    x,
                    unit,
                })
            }
        }
    }

    fn word(&self, lengths: &[usize]) -> Word {
        let mut w = Word::empty();
        for &n in lengths {
            w = w.concat(&self.unit.repeat(n));
            w.push("b");
        }
        w
    }
}

fn survive_all(base: &Rational, lengths: &[usize]) -> Rational {
    let one = Rational::one();
    lengths
        .iter()
        .map(|&n| &one - num_traits::pow(base.clone(), n))
        .fold(one.clone(), |acc, f| acc * f)
}

fn report(target: &Target, params: &WitnessParams, k: usize) -> Result<WitnessReport> {
    let one = Rational::one();
    let x = &target.x;
    let not_x = &one - x;
    let lengths = params.lengths(k);
    let word = target.word(&lengths);
    let g = &target.gadget;

    let p13 = g.reach_prob("q1", &word, "q3")?;
    let p46 = g.reach_prob("q4", &word, "q6")?;
    let p13_closed = &one - survive_all(x, &lengths);
    let p46_closed = &one - survive_all(&not_x, &lengths);
    if p13 != p13_closed || p46 != p46_closed {
        return Err(Error::ClosedFormMismatch(format!(
            "k={k}: q1->q3 simulated {} vs {}, q4->q6 simulated {} vs {}",
            format_rational(&p13),
            format_rational(&p13_closed),
            format_rational(&p46),
            format_rational(&p46_closed)
        )));
    }

    let tail_length = params.length(k + 1);
    let completed = word.concat(&target.unit.repeat(tail_length));
    let value = g.value(&completed)?;
    let half = rat(1, 2);
    let value_closed = &half * &p13
        + &half * (&one - &p46) * (&one - num_traits::pow(not_x.clone(), tail_length));
    if value != value_closed {
        return Err(Error::ClosedFormMismatch(format!(
            "k={k}: value simulated {} vs {}",
            format_rational(&value),
            format_rational(&value_closed)
        )));
    }

    Ok(WitnessReport {
        k,
        x: x.clone(),
        lengths,
        requirement1_met: p46 <= params.eps,
        requirement2_met: p13 >= &one - &params.eps,
        word,
        p_q1_q3: p13,
        p_q4_q6: p46,
        tail_length,
        completed,
        value,
    })
}

/// Builds the witness for one `k` and checks both reach probabilities and
/// the value against their closed forms, exactly.
pub fn synthesize_word(eps: &Rational, k: usize, mode: &WitnessMode) -> Result<WitnessReport> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k must be at least 2, got {k}")));
    }
    let target = Target::new(mode)?;
    let params = WitnessParams::new(&target.x, eps)?;
    report(&target, &params, k)
}

/// Reports for `k = 2..=k_max`, in order.
pub fn witness_sweep(eps: &Rational, k_max: usize, mode: &WitnessMode) -> Result<Vec<WitnessReport>> {
    if k_max < 2 {
        return Err(Error::OutOfRange(format!("k must be at least 2, got {k_max}")));
    }
    let target = Target::new(mode)?;
    let params = WitnessParams::new(&target.x, eps)?;
    (2..=k_max)
        .into_par_iter()
        .map(|k| report(&target, &params, k))
        .collect()
}
