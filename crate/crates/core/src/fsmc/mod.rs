//! Finite-state machine channels in product form.
//!
//! At each use the channel is in state `s'`, receives input `x`, emits `y`
//! with probability `p(y | x, s')` and moves to `s` with probability
//! `p(s | x, s')`, independently given `(x, s')`.

mod format;
mod sample;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pfa::Pfa;
use crate::rational::{format_rational, rat, Rational};

pub use format::{parse_fsmc, write_fsmc};
pub use sample::{sample, Sampler};

/// Default cap on `|Y|^n * |S|` for exact sequence distributions.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct Fsmc {
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    // [input][previous state][output]
    output_law: Vec<Vec<Vec<Rational>>>,
    // [input][previous state][next state]
    state_law: Vec<Vec<Vec<Rational>>>,
    initial: usize,
}

fn check_distribution(what: &str, p: &[Rational], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::InvalidChannel(format!(
            "{what} has {} entries, expected {len}",
            p.len()
        )));
    }
    if let Some(neg) = p.iter().find(|q| **q < Rational::zero()) {
        return Err(Error::InvalidChannel(format!(
            "{what} has negative entry {}",
            format_rational(neg)
        )));
    }
    let total: Rational = p.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidChannel(format!(
            "{what} sums to {}",
            format_rational(&total)
        )));
    }
    Ok(())
}

impl Fsmc {
    /// `output_law[x][s'][y]` and `state_law[x][s'][s]`.
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        states: Vec<String>,
        output_law: Vec<Vec<Vec<Rational>>>,
        state_law: Vec<Vec<Vec<Rational>>>,
        initial: usize,
    ) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() || states.is_empty() {
            return Err(Error::InvalidChannel(
                "inputs, outputs and states must be nonempty".into(),
            ));
        }
        if initial >= states.len() {
            return Err(Error::InvalidChannel(format!(
                "initial state #{initial} does not exist"
            )));
        }
        if output_law.len() != inputs.len() || state_law.len() != inputs.len() {
            return Err(Error::InvalidChannel("one law per input is required".into()));
        }
        for (x, name) in inputs.iter().enumerate() {
            if output_law[x].len() != states.len() || state_law[x].len() != states.len() {
                return Err(Error::InvalidChannel(format!(
                    "input `{name}`: one column per state is required"
                )));
            }
            for (s, sname) in states.iter().enumerate() {
                check_distribution(
                    &format!("output law for input `{name}` in state `{sname}`"),
                    &output_law[x][s],
                    outputs.len(),
                )?;
                check_distribution(
                    &format!("state law for input `{name}` in state `{sname}`"),
                    &state_law[x][s],
                    states.len(),
                )?;
            }
        }
        Ok(Fsmc {
            inputs,
            outputs,
            states,
            output_law,
            state_law,
            initial,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|s| s == name)
    }

    /// `p(y | x, s')` as a vector over `y`.
    pub fn output_law(&self, input: usize, prev: usize) -> &[Rational] {
        &self.output_law[input][prev]
    }

    /// `p(s | x, s')` as a vector over `s`.
    pub fn state_law(&self, input: usize, prev: usize) -> &[Rational] {
        &self.state_law[input][prev]
    }

    /// Exact law of `(y^n, s_n)` given the inputs `xs`, by the forward
    /// recursion over uses.
    pub fn joint_seq_dist(&self, xs: &[usize], budget: usize) -> Result<SequenceDist> {
        if let Some(&bad) = xs.iter().find(|&&x| x >= self.inputs.len()) {
            return Err(Error::InvalidChannel(format!("input #{bad} does not exist")));
        }
        let ny = self.outputs.len();
        let ns = self.states.len();
        let size = (ny as u128)
            .checked_pow(xs.len() as u32)
            .and_then(|v| v.checked_mul(ns as u128));
        match size {
            Some(v) if v <= budget as u128 => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    needed: size.unwrap_or(u128::MAX),
                    budget: budget as u128,
                })
            }
        }

        let mut probs = vec![Rational::zero(); ns];
        probs[self.initial] = Rational::one();
        let mut sequences = 1usize;
        for &x in xs {
            let mut next = vec![Rational::zero(); sequences * ny * ns];
            for seq in 0..sequences {
                for prev in 0..ns {
                    let p = &probs[seq * ns + prev];
                    if p.is_zero() {
                        continue;
                    }
                    for (y, py) in self.output_law[x][prev].iter().enumerate() {
                        if py.is_zero() {
                            continue;
                        }
                        let pyy = p * py;
                        let base = (seq * ny + y) * ns;
                        for (s, ps) in self.state_law[x][prev].iter().enumerate() {
                            if !ps.is_zero() {
                                next[base + s] += &pyy * ps;
                            }
                        }
                    }
                }
            }
            probs = next;
            sequences *= ny;
        }
        Ok(SequenceDist {
            n: xs.len(),
            outputs: ny,
            states: ns,
            probs,
        })
    }
}

/// Exact law of an output sequence together with the final state.
///
/// Output sequences are indexed in base `|Y|` with the first output most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDist {
    pub n: usize,
    pub outputs: usize,
    pub states: usize,
    probs: Vec<Rational>,
}

impl SequenceDist {
    pub fn sequence_index(&self, ys: &[usize]) -> usize {
        ys.iter().fold(0, |acc, &y| acc * self.outputs + y)
    }

    pub fn prob(&self, ys: &[usize], state: usize) -> &Rational {
        &self.probs[self.sequence_index(ys) * self.states + state]
    }

    pub fn table(&self) -> &[Rational] {
        &self.probs
    }

    /// Law of `y^n`.
    pub fn output_marginal(&self) -> Vec<Rational> {
        self.probs
            .chunks(self.states)
            .map(|c| c.iter().sum())
            .collect()
    }

    /// Law of the final state.
    pub fn state_marginal(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.states];
        for chunk in self.probs.chunks(self.states) {
            for (o, p) in out.iter_mut().zip(chunk) {
                *o += p;
            }
        }
        out
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }
}

/// Input label for data bit `d` and control symbol `c`.
pub fn input_label(data: u8, control: &str) -> String {
    format!("{data}:{control}")
}

/// The channel `V_A` of an automaton together with the bookkeeping needed
/// to address its inputs by (data bit, control symbol).
///
/// Inputs are ordered data-major: all controls with data 0, then with
/// data 1. In an accepting state the data bit comes out unchanged; in any
/// other state the output is a fair coin. The state evolves under the
/// control symbol's matrix and ignores the data bit.
#[derive(Debug, Clone)]
pub struct LiftedChannel {
    fsmc: Fsmc,
    controls: Vec<String>,
    accepting: Vec<bool>,
}

impl LiftedChannel {
    pub fn fsmc(&self) -> &Fsmc {
        &self.fsmc
    }

    pub fn controls(&self) -> &[String] {
        &self.controls
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn input_index(&self, data: u8, control: usize) -> usize {
        data as usize * self.controls.len() + control
    }

    pub fn control_index(&self, name: &str) -> Option<usize> {
        self.controls.iter().position(|c| c == name)
    }

    /// Splits an input index into (data bit, control index).
    pub fn split_input(&self, input: usize) -> (u8, usize) {
        ((input / self.controls.len()) as u8, input % self.controls.len())
    }
}

/// Builds `V_A`. The automaton must start in a single state.
pub fn build_v(a: &Pfa) -> Result<LiftedChannel> {
    let initial = a
        .initial()
        .support_point()
        .ok_or(Error::NondeterministicInitial)?;
    let ns = a.num_states();
    let controls = a.alphabet().to_vec();
    let accepting: Vec<bool> = (0..ns).map(|s| a.is_accepting(s)).collect();

    let mut inputs = Vec::new();
    let mut output_law = Vec::new();
    let mut state_law = Vec::new();
    let (zero, one, half) = (Rational::zero(), Rational::one(), rat(1, 2));
    for data in 0..2u8 {
        for (c, m) in controls.iter().zip(a.matrices()) {
            inputs.push(input_label(data, c));
            output_law.push(
                (0..ns)
                    .map(|s| {
                        if accepting[s] {
                            let mut law = vec![zero.clone(), zero.clone()];
                            law[data as usize] = one.clone();
                            law
                        } else {
                            vec![half.clone(), half.clone()]
                        }
                    })
                    .collect(),
            );
            state_law.push((0..ns).map(|s| m.column(s)).collect());
        }
    }
    let fsmc = Fsmc::new(
        inputs,
        vec!["0".into(), "1".into()],
        a.states().to_vec(),
        output_law,
        state_law,
        initial,
    )?;
    Ok(LiftedChannel {
        fsmc,
        controls,
        accepting,
    })
}
