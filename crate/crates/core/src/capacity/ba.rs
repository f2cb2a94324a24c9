//! Discrete memoryless channels and the Blahut–Arimoto iteration.

use toml::de::DeValue;

use crate::error::{Error, Result};
use crate::pfa::format::Located;
use crate::rational::{to_f64, Rational};

const ROW_TOLERANCE: f64 = 1e-12;

/// `rows[x][y] = p(y | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    rows: Vec<Vec<f64>>,
}

impl DiscreteChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ny = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || ny == 0 {
            return Err(Error::InvalidChannel("channel matrix is empty".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != ny {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {ny}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidChannel(format!("row {x} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidChannel(format!("row {x} sums to {total}")));
            }
        }
        Ok(DiscreteChannel { rows })
    }

    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(to_f64).collect()).collect())
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("crossover {p} is not a probability")));
        }
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.rows[0].len()
    }

    /// `I(X;Y)` for input law `px`, in bits.
    pub fn mutual_information(&self, px: &[f64]) -> f64 {
        let q = self.output_law(px);
        self.divergences(&q)
            .iter()
            .zip(px)
            .map(|(d, p)| d * p)
            .sum()
    }

    fn output_law(&self, px: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.num_outputs()];
        for (row, &p) in self.rows.iter().zip(px) {
            for (qy, w) in q.iter_mut().zip(row) {
                *qy += p * w;
            }
        }
        q
    }

    /// `D(W(.|x) || q)` for every `x`, in bits.
    fn divergences(&self, q: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(q)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, qy)| w * (w / qy).log2())
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BaOutcome {
    /// Certified lower bound on the capacity, in bits.
    pub capacity: f64,
    pub lower: f64,
    pub upper: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
    /// False when `max_iters` ran out before `upper - lower <= tol`.
    pub converged: bool,
    /// Lower bound after each iteration.
    pub lower_trace: Vec<f64>,
}

impl BaOutcome {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Alternating maximisation from the uniform input.
///
/// With `c_x = 2^{D(W(.|x) || q)}` the capacity lies in
/// `[log2 sum_x p_x c_x, log2 max_x c_x]`; iteration stops once that interval
/// is no wider than `tol`.
pub fn blahut_arimoto(ch: &DiscreteChannel, tol: f64, max_iters: usize) -> Result<BaOutcome> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {tol}")));
    }
    let nx = ch.num_inputs();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_upper = f64::INFINITY;
    let mut best_input = p.clone();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        let q = ch.output_law(&p);
        let d = ch.divergences(&q);
        // Work relative to the largest divergence to keep 2^d finite.
        let dmax = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = p.iter().zip(&d).map(|(pi, di)| pi * (di - dmax).exp2()).collect();
        let total: f64 = weights.iter().sum();
        let lower = dmax + total.log2();
        let upper = dmax;
        if lower > best_lower {
            best_lower = lower;
            best_input = p.clone();
        }
        best_upper = best_upper.min(upper);
        trace.push(best_lower);
        if best_upper - best_lower <= tol {
            converged = true;
            break;
        }
        p = weights.iter().map(|w| w / total).collect();
    }
    let lower = best_lower.max(0.0);
    Ok(BaOutcome {
        capacity: lower,
        lower,
        upper: best_upper.max(lower),
        input: best_input,
        iterations,
        converged,
        lower_trace: trace,
    })
}

fn cell(loc: &Located<'_>, v: &toml::Spanned<DeValue<'_>>) -> Result<f64> {
    match v.get_ref() {
        DeValue::Float(f) => f
            .as_str()
            .replace('_', "")
            .parse::<f64>()
            .map_err(|_| loc.err(&v.span(), format!("`{}` is not a number", f.as_str()))),
        _ => Ok(to_f64(&loc.rational(v)?)),
    }
}

/// Reads a channel from TOML: `matrix = [[p(y|x) ...], ...]`, one row per
/// input. Entries may be floats, integers or rational strings.
pub fn parse_dmc(src: &str) -> Result<DiscreteChannel> {
    let loc = Located::new(src);
    let doc = loc.parse_table()?;
    let m = loc.field(&doc, "matrix")?;
    let mut rows = Vec::new();
    for row in loc.array(m, "`matrix`")? {
        let cells = loc.array(row, "each row of `matrix`")?;
        let parsed = cells.iter().map(|c| cell(&loc, c)).collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    DiscreteChannel::new(rows).map_err(|e| match e {
        Error::InvalidChannel(msg) => loc.err(&m.span(), msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::info::binary_entropy;

    #[test]
    fn symmetric_channels() {
        let c0 = blahut_arimoto(&DiscreteChannel::bsc(0.0).unwrap(), 1e-12, 1000).unwrap();
        assert!((c0.capacity - 1.0).abs() < 1e-9);
        let c5 = blahut_arimoto(&DiscreteChannel::bsc(0.5).unwrap(), 1e-12, 1000).unwrap();
        assert!(c5.capacity.abs() < 1e-9);
        let c = blahut_arimoto(&DiscreteChannel::bsc(0.11).unwrap(), 1e-10, 1000).unwrap();
        let truth = 1.0 - binary_entropy(0.11).unwrap();
        assert!((c.capacity - truth).abs() < 1e-6);
        assert!(c.converged);
    }

    #[test]
    fn z_channel_matches_closed_form() {
        // Z channel: 1 -> 0 with probability q. C = log2(1 + (1-q) q^{q/(1-q)}).
        let q: f64 = 0.3;
        let ch = DiscreteChannel::new(vec![vec![1.0, 0.0], vec![q, 1.0 - q]]).unwrap();
        let out = blahut_arimoto(&ch, 1e-10, 100_000).unwrap();
        let truth = (1.0 + (1.0 - q) * q.powf(q / (1.0 - q))).log2();
        assert!((out.capacity - truth).abs() < 1e-8, "{} vs {truth}", out.capacity);
        assert!(out.lower <= truth + 1e-12 && truth <= out.upper + 1e-12);
    }

    #[test]
    fn bounds_sandwich_and_lower_is_monotone() {
        let ch = DiscreteChannel::new(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.8, 0.1],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let out = blahut_arimoto(&ch, 1e-9, 10_000).unwrap();
        assert!(out.converged);
        for w in out.lower_trace.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(out.lower <= out.upper);
        let mi = ch.mutual_information(&out.input);
        assert!(mi <= out.upper + 1e-12);
    }

    #[test]
    fn iteration_cap_is_flagged() {
        let ch = DiscreteChannel::new(vec![vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap();
        let out = blahut_arimoto(&ch, 1e-15, 2).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
        assert!(blahut_arimoto(&ch, 0.0, 2).is_err());
    }

    #[test]
    fn parses_channel_files() {
        let ch = parse_dmc("matrix = [[0.89, 0.11], [\"11/100\", \"89/100\"]]\n").unwrap();
        assert_eq!(ch.rows()[1][0], 0.11);
        match parse_dmc("matrix = [[0.5, 0.6],\n [0.5, 0.5]]\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
