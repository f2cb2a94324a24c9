//! The automata used in the reduction: the two-branch gadget `D_{x,y}`, its
//! variant `D_{A,y}` driven by an embedded automaton, the amplifiers `B_p`
//! and `C_p`, and the freezable/resettable family member.
//!
//! Gadget state layout, in order:
//!
//! * `D_{x,y}`: `start q1 q2 q3 q4 q5 q6`, accepting `{q3, q5}`.
//! * `D_{A,y}`: `start q1 q2 q2in q3 q4 q5 q5in q6`, then the first copy of
//!   `A` (`A1.*`) and the second (`A2.*`), accepting `{q3, q5, q5in}`.
//!
//! `start` is deterministic: on the first letter it behaves as `q1` with
//! weight `y`, as `q4` with weight `y` and as the absorbing `q6` with weight
//! `1 - 2y`. The value of a word is therefore `y` times the chance of the top
//! branch ending in its accepting class plus `y` times the same for the
//! bottom branch.

mod sigma;

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pfa::{Pfa, ProbVector, StochMatrix};
use crate::rational::{format_rational, in_unit_interval, rat, Rational};

pub use sigma::{first_primes, sigma_decode, sigma_encode, SigmaCode};

/// Number of `D_{A,y}` states that are not part of the two copies of `A`.
pub const SKELETON_STATES: usize = 9;

struct Builder {
    states: Vec<String>,
    index: HashMap<String, usize>,
    alphabet: Vec<String>,
    matrices: Vec<StochMatrix>,
}

impl Builder {
    fn new(states: Vec<String>, alphabet: &[&str]) -> Self {
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let n = states.len();
        Builder {
            states,
            index,
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            matrices: alphabet.iter().map(|_| StochMatrix::zeros(n)).collect(),
        }
    }

    fn at(&self, state: &str) -> usize {
        self.index[state]
    }

    fn put(&mut self, sym: usize, src: &str, dst: &str, p: &Rational) {
        let (s, d) = (self.at(src), self.at(dst));
        self.matrices[sym].add(d, s, p);
    }

    fn stay(&mut self, sym: usize, state: &str) {
        self.put(sym, state, state, &Rational::one());
    }

    /// Column of `start` := mixture of the columns of `weights` states.
    fn split_start(&mut self, weights: &[(&str, Rational)]) {
        let start = self.at("start");
        let n = self.states.len();
        for m in &mut self.matrices {
            for t in 0..n {
                let mut acc = Rational::zero();
                for (state, w) in weights {
                    acc += w * m.get(t, self.index[*state]);
                }
                m.set(t, start, acc);
            }
        }
    }

    fn finish(self, accepting: &[&str]) -> Result<Pfa> {
        let n = self.states.len();
        let start = self.index["start"];
        let accepting = accepting.iter().map(|s| self.index[*s]).collect();
        Pfa::new(
            self.states,
            self.alphabet,
            self.matrices,
            ProbVector::point(n, start),
            accepting,
        )
    }
}

fn check_y(y: &Rational) -> Result<()> {
    if y < &Rational::zero() || y > &rat(1, 2) {
        return Err(Error::OutOfRange(format!(
            "y must lie in [0,1/2], got {}",
            format_rational(y)
        )));
    }
    Ok(())
}

fn start_weights(y: &Rational) -> Vec<(&'static str, Rational)> {
    let rest = Rational::one() - y - y;
    vec![("q1", y.clone()), ("q4", y.clone()), ("q6", rest)]
}

fn owned(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// The gadget `D_{x,y}` over `{a, b}`.
///
/// Reading `a` keeps `q1` with probability `x` (else `q2`) and keeps `q4`
/// with probability `1 - x` (else `q5`); `b` ends a block: `q1 -> q3`,
/// `q2 -> q1`, `q4 -> q6`, `q5 -> q4`. Its value is `2y` when `x > 1/2`
/// and at most `y` otherwise.
pub fn build_d_xy(x: &Rational, y: &Rational) -> Result<Pfa> {
    if !in_unit_interval(x) {
        return Err(Error::OutOfRange(format!(
            "x must lie in [0,1], got {}",
            format_rational(x)
        )));
    }
    check_y(y)?;
    let one = Rational::one();
    let not_x = &one - x;
    let mut b = Builder::new(
        owned(&["start", "q1", "q2", "q3", "q4", "q5", "q6"]),
        &["a", "b"],
    );
    let (a, bb) = (0, 1);

    b.put(a, "q1", "q1", x);
    b.put(a, "q1", "q2", &not_x);
    b.stay(a, "q2");
    b.put(a, "q4", "q4", &not_x);
    b.put(a, "q4", "q5", x);
    b.stay(a, "q5");

    b.put(bb, "q1", "q3", &one);
    b.put(bb, "q2", "q1", &one);
    b.put(bb, "q4", "q6", &one);
    b.put(bb, "q5", "q4", &one);

    for sym in [a, bb] {
        b.stay(sym, "q3");
        b.stay(sym, "q6");
    }
    b.split_start(&start_weights(y));
    b.finish(&["q3", "q5"])
}

fn check_binary_alphabet(a: &Pfa) -> Result<()> {
    if let Some(bad) = a.alphabet().iter().find(|s| *s != "a" && *s != "b") {
        return Err(Error::Alphabet(format!(
            "embedded automaton must read only `a` and `b`, found `{bad}`"
        )));
    }
    Ok(())
}

/// The gadget `D_{A,y}` over `{a, b, c}`.
///
/// In the top branch `a` hands control to a copy of `A` started in its
/// initial distribution, `A`'s letters run that copy, and `c` returns to `q1`
/// from accepting states and to `q2` from the others. So for every word `w`
/// over `A`'s alphabet the block `a w c` keeps `q1` with probability
/// `val(A, w)`, which is the role `x` plays in `D_{x,y}`. The bottom branch
/// mirrors this with the accepting exit leading to `q5`.
///
/// `q2in`/`q5in` wait inside a block so that letters of the inner word are
/// not mistaken for block separators. The result has `2|Q_A| + 9` states.
pub fn build_d_ay(a: &Pfa, y: &Rational) -> Result<Pfa> {
    check_binary_alphabet(a)?;
    check_y(y)?;
    let skeleton = [
        "start", "q1", "q2", "q2in", "q3", "q4", "q5", "q5in", "q6",
    ];
    let copy = |tag: &str| -> Vec<String> {
        a.states().iter().map(|s| format!("{tag}.{s}")).collect()
    };
    let (top, bottom) = (copy("A1"), copy("A2"));
    let mut states = owned(&skeleton);
    states.extend(top.iter().cloned());
    states.extend(bottom.iter().cloned());
    debug_assert_eq!(states.len(), SKELETON_STATES + 2 * a.num_states());

    let one = Rational::one();
    let mut b = Builder::new(states, &["a", "b", "c"]);
    let (la, lb, lc) = (0, 1, 2);

    let enter = |b: &mut Builder, from: &str, copy: &[String]| {
        for (i, p) in a.initial().entries().iter().enumerate() {
            if !p.is_zero() {
                b.put(la, from, &copy[i], p);
            }
        }
    };

    // Top branch.
    enter(&mut b, "q1", &top);
    b.put(lb, "q1", "q3", &one);
    b.stay(lc, "q1");
    b.put(la, "q2", "q2in", &one);
    b.put(lb, "q2", "q1", &one);
    b.stay(lc, "q2");
    b.stay(la, "q2in");
    b.stay(lb, "q2in");
    b.put(lc, "q2in", "q2", &one);

    // Bottom branch.
    enter(&mut b, "q4", &bottom);
    b.put(lb, "q4", "q6", &one);
    b.stay(lc, "q4");
    b.put(la, "q5", "q5in", &one);
    b.put(lb, "q5", "q4", &one);
    b.stay(lc, "q5");
    b.stay(la, "q5in");
    b.stay(lb, "q5in");
    b.put(lc, "q5in", "q5", &one);

    for sym in [la, lb, lc] {
        b.stay(sym, "q3");
        b.stay(sym, "q6");
    }

    // Inside the copies.
    for (copy, on_accept, on_reject) in [(&top, "q1", "q2"), (&bottom, "q5", "q4")] {
        for (j, src) in copy.iter().enumerate() {
            let exit = if a.is_accepting(j) { on_accept } else { on_reject };
            b.put(lc, src, exit, &one);
            for (sym, letter) in [(la, "a"), (lb, "b")] {
                match a.matrix(letter) {
                    Some(m) => {
                        for (i, dst) in copy.iter().enumerate() {
                            let p = m.get(i, j);
                            if !p.is_zero() {
                                b.put(sym, src, dst, p);
                            }
                        }
                    }
                    None => b.stay(sym, src),
                }
            }
        }
    }

    b.split_start(&start_weights(y));
    b.finish(&["q3", "q5", "q5in"])
}

fn check_p(p: &Rational) -> Result<()> {
    if p <= &Rational::zero() || p >= &Rational::one() {
        return Err(Error::OutOfRange(format!(
            "p must lie in (0,1), got {}",
            format_rational(p)
        )));
    }
    Ok(())
}

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn amplifier(a: &Pfa, p: &Rational, sink_accepts: bool) -> Result<Pfa> {
    check_p(p)?;
    let n = a.num_states();
    let mut states = a.states().to_vec();
    let init = fresh_name(&states, "init");
    states.push(init);
    let sink = fresh_name(&states, "sink");
    states.push(sink);
    let (init, sink) = (n, n + 1);
    let leak = Rational::one() - p;

    let matrices = a
        .matrices()
        .iter()
        .map(|x| {
            let mut m = StochMatrix::zeros(n + 2);
            for t in 0..n {
                for s in 0..n {
                    m.set(t, s, x.get(t, s).clone());
                }
            }
            // From init: read the letter as A would from its initial
            // distribution, but only with probability p.
            let first = x.apply(a.initial());
            for (t, q) in first.entries().iter().enumerate() {
                m.set(t, init, p * q);
            }
            m.set(sink, init, leak.clone());
            m.set(sink, sink, Rational::one());
            m
        })
        .collect();

    let mut accepting = a.accepting().to_vec();
    if sink_accepts {
        accepting.push(sink);
    }
    Pfa::new(
        states,
        a.alphabet().to_vec(),
        matrices,
        ProbVector::point(n + 2, init),
        accepting,
    )
}

/// `B_p`: for every nonempty word, `val(B_p, w) = p val(A, w)`.
pub fn build_b_p(a: &Pfa, p: &Rational) -> Result<Pfa> {
    amplifier(a, p, false)
}

/// `C_p`: like `B_p` with the sink accepting, so for every nonempty word
/// `val(C_p, w) = p val(A, w) + 1 - p`.
pub fn build_c_p(a: &Pfa, p: &Rational) -> Result<Pfa> {
    amplifier(a, p, true)
}

/// `γ(D_{A,λ/2})`: alphabet `a b c id rt`, value at least `λ` or at most
/// `λ/2` depending on whether `A` accepts some word with probability above
/// one half.
pub fn build_family_member(a: &Pfa, lambda: &Rational) -> Result<Pfa> {
    if lambda <= &Rational::zero() || lambda > &Rational::one() {
        return Err(Error::OutOfRange(format!(
            "lambda must lie in (0,1], got {}",
            format_rational(lambda)
        )));
    }
    build_d_ay(a, &(lambda / rat(2, 1)))?.gamma()
}
