//! Stage lengths for the information-stable source and a Monte Carlo look at
//! how its information density concentrates.
//!
//! The source repeats a stage-`t` block input `m_t` times before moving on.
//! `m_t` is the least integer making the running rate at least
//! `val - delta / 2^(t-1)`, raised to `n_{t+1}^2` so that the Hoeffding
//! denominator stays below `n^(3/2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::block::{induced_block_channel, BlockChannel, ControlSchedule};
use super::lift;
use crate::error::{Error, Result};
use crate::fsmc::Sampler;
use crate::pfa::{Pfa, Word};

/// Stages a demo may stage; `m_t >= n_{t+1}^2` grows too fast beyond this.
pub const MAX_DEMO_STAGES: usize = 2;
/// Cap on the channel uses of one demo sample.
pub const MAX_DEMO_USES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub t: usize,
    pub n_t: usize,
    pub n_next: usize,
    /// The ceiling expression, clamped at 0.
    pub formula: u64,
    /// `max(formula, n_next^2)`.
    pub m_t: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySchedule {
    pub val: f64,
    pub delta: f64,
    pub stages: Vec<StageRecord>,
}

impl StabilitySchedule {
    /// `m_t >= n_{t+1}^2` and `n_{t+1} >= n_t` for every stage.
    pub fn is_valid(&self) -> bool {
        self.stages.iter().all(|s| {
            s.m_t >= (s.n_next as u64).pow(2) && s.n_next >= s.n_t && s.m_t >= s.formula
        })
    }

    /// Channel uses up to the end of stage `t`.
    pub fn uses_through(&self, t: usize) -> u128 {
        self.stages
            .iter()
            .take(t)
            .map(|s| s.m_t as u128 * s.n_t as u128)
            .sum()
    }
}

/// `n_list` holds `n_1, ..., n_{T+1}`; the schedule has `T` stages.
pub fn stability_schedule(val: f64, delta: f64, n_list: &[usize]) -> Result<StabilitySchedule> {
    if !(0.0..=1.0).contains(&val) || !(delta > 0.0) {
        return Err(Error::OutOfRange(format!(
            "need val in [0,1] and delta > 0, got {val} and {delta}"
        )));
    }
    if n_list.len() < 2 || n_list.contains(&0) {
        return Err(Error::OutOfRange(
            "need at least two positive block lengths".into(),
        ));
    }
    if n_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::OutOfRange("block lengths must be nondecreasing".into()));
    }
    let mut stages: Vec<StageRecord> = Vec::new();
    for t in 1..n_list.len() {
        let (n_t, n_next) = (n_list[t - 1], n_list[t]);
        let shrink = (2f64).powi(t as i32 - 1);
        let earlier: f64 = stages
            .iter()
            .map(|s| {
                s.m_t as f64 * s.n_t as f64 * delta * ((2f64).powi(-(s.t as i32)) - 1.0 / shrink)
            })
            .sum();
        let inner = earlier + n_next as f64 * (val - delta / shrink);
        let raw = ((2f64).powi(t as i32) / (n_t as f64 * delta) * inner).ceil();
        let formula = if raw > 0.0 { raw as u64 } else { 0 };
        let square = (n_next as u64).saturating_mul(n_next as u64);
        stages.push(StageRecord {
            t,
            n_t,
            n_next,
            formula,
            m_t: formula.max(square),
        });
    }
    Ok(StabilitySchedule { val, delta, stages })
}

/// One stage of the demo source: the block `word`, then `free` free slots,
/// repeated `repeats` times with uniform data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoStage {
    pub word: Word,
    pub free: usize,
    pub repeats: usize,
}

#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub delta: f64,
    pub etas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Value used in the bound's correction term; defaults to the best
    /// word value among the stages.
    pub val: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoRow {
    pub eta: f64,
    /// Fraction of samples with `|i / (n C_n) - 1| >= eta delta`.
    pub empirical: f64,
    /// Binomial standard error of `empirical`.
    pub sigma: f64,
    /// `2 exp(-2 (n C_n delta (eta - 1/(val 2^(t-1))))^2 / n^(3/2))`.
    pub paper_bound: f64,
    /// Same event and bound with `val` in place of `C_n`.
    pub empirical_val: f64,
    pub sigma_val: f64,
    pub paper_bound_val: f64,
    /// Hoeffding with the true per-block ranges, about the exact mean.
    pub exact_range_bound: f64,
}

impl DemoRow {
    pub fn within_paper_bound(&self) -> bool {
        self.empirical <= self.paper_bound + 3.0 * self.sigma
            && self.empirical_val <= self.paper_bound_val + 3.0 * self.sigma_val
    }

    pub fn within_exact_range_bound(&self) -> bool {
        self.empirical <= self.exact_range_bound + 3.0 * self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub stages: usize,
    /// Total channel uses.
    pub n: usize,
    /// Exact `E[i]`.
    pub mean: f64,
    /// `E[i] / n`; with uniform data this is the block channels' capacity.
    pub c_n: f64,
    pub val: f64,
    /// Sum of squared block ranges in the exact Hoeffding bound.
    pub range_sq_sum: f64,
    pub rows: Vec<DemoRow>,
}

fn binomial_sigma(p: f64, samples: usize) -> f64 {
    (p * (1.0 - p) / samples.max(1) as f64).sqrt()
}

fn hoeffding(deviation: f64, denom: f64) -> f64 {
    if deviation <= 0.0 {
        return 2.0;
    }
    if denom <= 0.0 {
        return 0.0;
    }
    2.0 * (-2.0 * deviation * deviation / denom).exp()
}

pub fn spectrum_concentration_demo(
    a: &Pfa,
    stages: &[DemoStage],
    opts: &DemoOptions,
) -> Result<ConcentrationReport> {
    if stages.is_empty() || stages.len() > MAX_DEMO_STAGES {
        return Err(Error::BudgetExceeded {
            needed: stages.len() as u128,
            budget: MAX_DEMO_STAGES as u128,
        });
    }
    if opts.samples == 0 || !(opts.delta > 0.0) {
        return Err(Error::OutOfRange("need samples > 0 and delta > 0".into()));
    }
    let (g, ch) = lift(a)?;
    let mut blocks: Vec<(ControlSchedule, BlockChannel, usize)> = Vec::new();
    for st in stages {
        let sched = ControlSchedule::for_pfa(&g, &st.word, st.free)?;
        let block = induced_block_channel(&ch, &sched, sched.period())?;
        blocks.push((sched, block, st.repeats));
    }
    let n: usize = blocks.iter().map(|(s, _, r)| s.period() * r).sum();
    if n == 0 || n > MAX_DEMO_USES {
        return Err(Error::BudgetExceeded {
            needed: n as u128,
            budget: MAX_DEMO_USES as u128,
        });
    }
    let mean: f64 = blocks
        .iter()
        .map(|(_, b, r)| *r as f64 * b.uniform_information())
        .sum();
    let c_n = mean / n as f64;
    let range_sq_sum: f64 = blocks
        .iter()
        .map(|(_, b, r)| {
            let (lo, hi) = b.density_range();
            *r as f64 * (hi - lo).powi(2)
        })
        .sum();
    let val = opts.val.unwrap_or_else(|| {
        blocks
            .iter()
            .map(|(_, b, _)| crate::rational::to_f64(&b.word_value()))
            .fold(0.0, f64::max)
    });

    // Control sequence of the whole source.
    let controls: Vec<usize> = blocks
        .iter()
        .flat_map(|(s, _, r)| {
            let c = s.controls();
            std::iter::repeat_n(c, *r).flatten()
        })
        .collect();
    let sampler = Sampler::new(ch.fsmc());
    let densities: Vec<f64> = (0..opts.samples)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(j as u64);
            let data: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
            let xs: Vec<usize> = data
                .iter()
                .zip(&controls)
                .map(|(&d, &c)| ch.input_index(d, c))
                .collect();
            let ys = sampler.run(&xs, &mut rng);
            let noise: Vec<u8> = ys.iter().zip(&data).map(|(&y, &d)| y as u8 ^ d).collect();
            let mut at = 0;
            let mut total = 0.0;
            for (s, b, r) in &blocks {
                for _ in 0..*r {
                    total += b.density(&noise[at..at + s.period()]);
                    at += s.period();
                }
            }
            total
        })
        .collect();

    let t = stages.len();
    let nf = n as f64;
    let correction = |v: f64| {
        if v > 0.0 {
            1.0 / (v * (2f64).powi(t as i32 - 1))
        } else {
            f64::INFINITY
        }
    };
    let rows = opts
        .etas
        .iter()
        .map(|&eta| {
            let tail = |scale: f64| {
                if scale <= 0.0 {
                    return 1.0;
                }
                densities
                    .iter()
                    .filter(|&&i| (i / (nf * scale) - 1.0).abs() >= eta * opts.delta)
                    .count() as f64
                    / opts.samples as f64
            };
            let empirical = tail(c_n);
            let empirical_val = tail(val);
            let paper = |scale: f64| {
                hoeffding(nf * scale * opts.delta * (eta - correction(val)), nf.powf(1.5))
            };
            DemoRow {
                eta,
                empirical,
                sigma: binomial_sigma(empirical, opts.samples),
                paper_bound: paper(c_n),
                empirical_val,
                sigma_val: binomial_sigma(empirical_val, opts.samples),
                paper_bound_val: paper(val),
                exact_range_bound: hoeffding(nf * c_n * opts.delta * eta, range_sq_sum),
            }
        })
        .collect();
    Ok(ConcentrationReport {
        stages: t,
        n,
        mean,
        c_n,
        val,
        range_sq_sum,
        rows,
    })
}
