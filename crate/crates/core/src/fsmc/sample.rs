//! Monte Carlo trajectories.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Each use draws one uniform `f64` for the output and then
//! one for the next state, in that order, and inverts the cumulative law.
//! Outputs for a given seed are therefore fixed across platforms and thread
//! counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Fsmc;
use crate::rational::{to_f64, Rational};

/// Cumulative laws in `f64`, ready for repeated sampling.
#[derive(Debug, Clone)]
pub struct Sampler {
    // [input][previous state] -> cumulative law
    output_cdf: Vec<Vec<Vec<f64>>>,
    state_cdf: Vec<Vec<Vec<f64>>>,
    initial: usize,
}

fn cumulative(p: &[Rational]) -> Vec<f64> {
    let mut acc = Rational::from_integer(0.into());
    p.iter()
        .map(|q| {
            acc += q;
            to_f64(&acc)
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.iter()
        .position(|&c| u < c)
        .unwrap_or(cdf.len() - 1)
}

impl Sampler {
    pub fn new(ch: &Fsmc) -> Self {
        let n_in = ch.inputs().len();
        let n_s = ch.states().len();
        let table = |outputs: bool| -> Vec<Vec<Vec<f64>>> {
            (0..n_in)
                .map(|x| {
                    (0..n_s)
                        .map(|s| {
                            cumulative(if outputs {
                                ch.output_law(x, s)
                            } else {
                                ch.state_law(x, s)
                            })
                        })
                        .collect()
                })
                .collect()
        };
        Sampler {
            output_cdf: table(true),
            state_cdf: table(false),
            initial: ch.initial(),
        }
    }

    /// Runs the channel from its initial state; returns the outputs.
    pub fn run<R: Rng>(&self, xs: &[usize], rng: &mut R) -> Vec<usize> {
        let mut state = self.initial;
        xs.iter()
            .map(|&x| {
                let y = draw(&self.output_cdf[x][state], rng.random::<f64>());
                state = draw(&self.state_cdf[x][state], rng.random::<f64>());
                y
            })
            .collect()
    }
}

/// One trajectory with a fresh generator seeded by `seed`.
pub fn sample(ch: &Fsmc, xs: &[usize], seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sampler::new(ch).run(xs, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsmc::{build_v, DEFAULT_TABLE_BUDGET};
    use crate::fsmc::tests::toy;
    use crate::pfa::fixtures::{always_accepting, never_accepting};
    use crate::rational::to_f64;

    #[test]
    fn same_seed_same_trajectory() {
        let ch = toy();
        let xs = [0, 1, 1, 0, 1, 0, 0, 1];
        assert_eq!(sample(&ch, &xs, 7), sample(&ch, &xs, 7));
    }

    #[test]
    fn accepting_region_is_noiseless() {
        let v = build_v(&always_accepting()).unwrap();
        let data = [1u8, 0, 0, 1, 1, 1, 0];
        let xs: Vec<usize> = data.iter().map(|&d| v.input_index(d, 0)).collect();
        for seed in 0..5 {
            let ys = sample(v.fsmc(), &xs, seed);
            let expect: Vec<usize> = data.iter().map(|&d| d as usize).collect();
            assert_eq!(ys, expect);
        }
    }

    #[test]
    fn rejecting_region_is_a_fair_coin() {
        let v = build_v(&never_accepting()).unwrap();
        let xs = vec![v.input_index(0, 0); 100_000];
        let ys = sample(v.fsmc(), &xs, 2024);
        let zeros = ys.iter().filter(|&&y| y == 0).count() as f64 / xs.len() as f64;
        assert!((zeros - 0.5).abs() <= 0.01, "{zeros}");
    }

    #[test]
    fn empirical_frequencies_approach_exact_law() {
        let ch = toy();
        let xs = [1, 0, 1];
        let exact = ch.joint_seq_dist(&xs, DEFAULT_TABLE_BUDGET).unwrap().output_marginal();
        let sampler = Sampler::new(&ch);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 40_000;
        let mut counts = [0usize; 8];
        for _ in 0..trials {
            let ys = sampler.run(&xs, &mut rng);
            counts[ys[0] * 4 + ys[1] * 2 + ys[2]] += 1;
        }
        for (c, p) in counts.iter().zip(&exact) {
            let p = to_f64(p);
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((*c as f64 / trials as f64 - p).abs() <= 5.0 * sd + 1e-9);
        }
    }
}
