//! Numerical converse: no product input beats the automaton's value.
//!
//! Every output of `V_A` comes from the state reached on a prefix of the
//! control sequence, and a non-accepting state emits a fresh fair coin. Hence
//! `H(Y^n | X^n, C^n) >= n (1 - val)` and the rate is at most `val`. Here
//! `val` is the exact maximum over words of length at most the horizon,
//! which covers every prefix when the horizon is at least `n - 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::info::entropy;
use super::lift;
use crate::error::{Error, Result};
use crate::fsmc::LiftedChannel;
use crate::pfa::{brute_force_value_over, Pfa, SearchBudget, FREEZE_SYMBOL, RESET_SYMBOL};
use crate::rational::{to_f64, Rational};

/// Largest `n` for which all `|W|^n` noise laws are tabulated.
pub const MAX_CONVERSE_LENGTH: usize = 6;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseTrial {
    /// `H(Y^n | X^n, C^n)` in bits.
    pub cond_entropy: f64,
    pub output_entropy: f64,
    /// `I(X^n C^n; Y^n) / n`.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseReport {
    pub n: usize,
    pub horizon: usize,
    pub val_horizon: Rational,
    pub trials: Vec<ConverseTrial>,
    pub violations: usize,
    /// For a violation, whether it survives a longer search; `Some(false)`
    /// means the horizon value was too small rather than an engine fault.
    pub persists_at_higher_horizon: Option<bool>,
}

impl ConverseReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn max_rate(&self) -> f64 {
        self.trials.iter().map(|t| t.rate).fold(0.0, f64::max)
    }
}

/// Noise laws `N_c` for every control sequence `c` of length `n`, indexed
/// by `c` read in base `|W|` (first slot most significant).
fn noise_laws(ch: &LiftedChannel, n: usize) -> Result<Vec<Vec<f64>>> {
    let w = ch.controls().len();
    let count = w.pow(n as u32);
    let budget = (1usize << n) * ch.fsmc().states().len();
    (0..count)
        .into_par_iter()
        .map(|code| {
            let mut xs = vec![0; n];
            let mut rest = code;
            for slot in (0..n).rev() {
                xs[slot] = ch.input_index(0, rest % w);
                rest /= w;
            }
            let law = ch.fsmc().joint_seq_dist(&xs, budget)?.output_marginal();
            Ok(law.iter().map(to_f64).collect())
        })
        .collect()
}

fn random_slot_law<R: Rng>(rng: &mut R, size: usize) -> Vec<f64> {
    // Normalised exponentials: uniform on the simplex.
    let raw: Vec<f64> = (0..size)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Exact information quantities of `V_A` over `n` uses for a product input
/// whose slot laws are over `(data, control)` pairs, data-major.
fn evaluate(laws: &[Vec<f64>], slots: &[Vec<f64>], w: usize) -> ConverseTrial {
    let n = slots.len();
    let size = 1usize << n;
    let mut cond_entropy = 0.0;
    let mut py = vec![0.0; size];
    for (code, noise) in laws.iter().enumerate() {
        // Control digits and, per slot, P(c_i) and P(d_i = 1 | c_i).
        let mut digits = vec![0; n];
        let mut rest = code;
        for slot in (0..n).rev() {
            digits[slot] = rest % w;
            rest /= w;
        }
        let mut pc = 1.0;
        let mut flip = Vec::with_capacity(n);
        for (law, &c) in slots.iter().zip(&digits) {
            let (p0, p1) = (law[c], law[w + c]);
            pc *= p0 + p1;
            flip.push(if p0 + p1 > 0.0 { p1 / (p0 + p1) } else { 0.0 });
        }
        if pc == 0.0 {
            continue;
        }
        cond_entropy += pc * entropy(noise).unwrap_or(0.0);
        for d in 0..size {
            let pd: f64 = (0..n)
                .map(|i| {
                    let bit = (d >> (n - 1 - i)) & 1;
                    if bit == 1 { flip[i] } else { 1.0 - flip[i] }
                })
                .product();
            if pd == 0.0 {
                continue;
            }
            for (y, p) in py.iter_mut().enumerate() {
                *p += pc * pd * noise[y ^ d];
            }
        }
    }
    let output_entropy = entropy(&py).unwrap_or(f64::NAN);
    ConverseTrial {
        cond_entropy,
        output_entropy,
        rate: (output_entropy - cond_entropy).max(0.0) / n as f64,
    }
}

fn horizon_value(a: &Pfa, horizon: usize) -> Result<Rational> {
    let plain: Vec<usize> = a
        .alphabet()
        .iter()
        .enumerate()
        .filter(|(_, s)| *s != FREEZE_SYMBOL && *s != RESET_SYMBOL)
        .map(|(i, _)| i)
        .collect();
    Ok(brute_force_value_over(a, &plain, horizon, SearchBudget::default())?.best_value)
}

/// Draws `trials` random product inputs over `({0,1} x W)^n` and checks the
/// entropy and rate bounds for each. Trial `j` uses ChaCha8 seeded with
/// `seed` on stream `j`.
pub fn converse_check(
    a: &Pfa,
    n: usize,
    trials: usize,
    seed: u64,
    horizon: Option<usize>,
) -> Result<ConverseReport> {
    if n == 0 || n > MAX_CONVERSE_LENGTH {
        return Err(Error::OutOfRange(format!(
            "block length must be in 1..={MAX_CONVERSE_LENGTH}, got {n}"
        )));
    }
    let (g, ch) = lift(a)?;
    let horizon = horizon.unwrap_or(n);
    let val_horizon = horizon_value(&g, horizon)?;
    let val = to_f64(&val_horizon);
    let laws = noise_laws(&ch, n)?;
    let w = ch.controls().len();

    let results: Vec<ConverseTrial> = (0..trials)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let slots: Vec<Vec<f64>> = (0..n).map(|_| random_slot_law(&mut rng, 2 * w)).collect();
            evaluate(&laws, &slots, w)
        })
        .collect();
    let violated = |t: &ConverseTrial, v: f64| {
        t.cond_entropy < n as f64 * (1.0 - v) - TOL || t.rate > v + TOL
    };
    let violations = results.iter().filter(|t| violated(t, val)).count();
    let persists_at_higher_horizon = if violations > 0 {
        let higher = to_f64(&horizon_value(&g, horizon + 2)?);
        Some(results.iter().any(|t| violated(t, higher)))
    } else {
        None
    };
    Ok(ConverseReport {
        n,
        horizon,
        val_horizon,
        trials: results,
        violations,
        persists_at_higher_horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::info::mutual_information;
    use crate::gadgets::build_d_xy;
    use crate::pfa::fixtures::{always_accepting, coin, example1, never_accepting};
    use crate::rational::{int, rat};

    #[test]
    fn trivial_automata() {
        let r = converse_check(&always_accepting(), 3, 10, 1, None).unwrap();
        assert!(r.passed());
        assert!(r.trials.iter().all(|t| t.cond_entropy.abs() < 1e-12));
        let r = converse_check(&never_accepting(), 3, 10, 1, None).unwrap();
        assert!(r.passed());
        assert_eq!(r.val_horizon, int(0));
        assert!(r.trials.iter().all(|t| (t.cond_entropy - 3.0).abs() < 1e-9));
        assert!(r.trials.iter().all(|t| t.rate.abs() < 1e-9));
    }

    #[test]
    fn evaluation_matches_dense_joint() {
        // Oracle: the full joint over (x^n, y^n) for one random input.
        let (_, ch) = lift(&example1()).unwrap();
        let n = 2;
        let w = ch.controls().len();
        let laws = noise_laws(&ch, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let slots: Vec<Vec<f64>> = (0..n).map(|_| random_slot_law(&mut rng, 2 * w)).collect();
        let t = evaluate(&laws, &slots, w);

        let inputs = 2 * w;
        let mut joint = vec![vec![0.0; 1 << n]; inputs * inputs];
        for x1 in 0..inputs {
            for x2 in 0..inputs {
                let px = slots[0][x1] * slots[1][x2];
                let (d1, c1) = (x1 / w, x1 % w);
                let (d2, c2) = (x2 / w, x2 % w);
                let xs = [ch.input_index(d1 as u8, c1), ch.input_index(d2 as u8, c2)];
                let py = ch.fsmc().joint_seq_dist(&xs, 64).unwrap().output_marginal();
                for (y, p) in py.iter().enumerate() {
                    joint[x1 * inputs + x2][y] = px * to_f64(p);
                }
            }
        }
        let mi = mutual_information(&joint).unwrap();
        assert!((t.rate * n as f64 - mi).abs() < 1e-9, "{} vs {mi}", t.rate * 2.0);
    }

    #[test]
    fn seeded_trials_are_reproducible() {
        let a = converse_check(&coin(rat(2, 3)), 3, 8, 42, None).unwrap();
        let b = converse_check(&coin(rat(2, 3)), 3, 8, 42, None).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn half_value_gadget_stays_below_half() {
        let d = build_d_xy(&rat(2, 5), &rat(1, 2)).unwrap();
        let r = converse_check(&d, 3, 20, 7, None).unwrap();
        assert!(r.passed());
        assert!(r.val_horizon <= rat(1, 2));
        assert!(r.max_rate() <= 0.5 + 1e-9);
    }

    #[test]
    fn rejects_long_blocks() {
        assert!(converse_check(&example1(), 7, 1, 0, None).is_err());
    }
}
