//! Entropy, mutual information and the information spectrum, in bits.

use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-9;

/// `-p log2 p`, with `0 log 0 = 0`.
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = p.iter().find(|q| !q.is_finite() || **q < 0.0) {
        return Err(Error::OutOfRange(format!("{what} has invalid entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::OutOfRange(format!("{what} sums to {total}")));
    }
    Ok(())
}

pub fn entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p, "distribution")?;
    Ok(p.iter().map(|&q| plogp(q)).sum())
}

pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("{eps} is not a probability")));
    }
    Ok(plogp(eps) + plogp(1.0 - eps))
}

/// `joint[x][y]` must be a distribution.
fn marginals(joint: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    check_distribution(&flat, "joint distribution")?;
    let ny = joint.first().map_or(0, Vec::len);
    if joint.iter().any(|row| row.len() != ny) {
        return Err(Error::OutOfRange("joint distribution rows differ in length".into()));
    }
    let px = joint.iter().map(|row| row.iter().sum()).collect();
    let py = (0..ny).map(|y| joint.iter().map(|row| row[y]).sum()).collect();
    Ok((px, py))
}

/// `I(X;Y) = sum p(x,y) log2(p(x,y) / (p(x) p(y)))`.
pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64> {
    let (px, py) = marginals(joint)?;
    let mut total = 0.0;
    for (x, row) in joint.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                total += p * (p / (px[x] * py[y])).log2();
            }
        }
    }
    Ok(total)
}

/// One atom of the law of `i(X;Y) = log2 p(y|x) - log2 p(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub value: f64,
    pub prob: f64,
}

/// The atoms of the information density, one per `(x, y)` of positive mass.
pub fn information_spectrum(joint: &[Vec<f64>]) -> Result<Vec<SpectrumSample>> {
    let (px, py) = marginals(joint)?;
    let mut out = Vec::new();
    for (x, row) in joint.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                out.push(SpectrumSample {
                    value: (p / (px[x] * py[y])).log2(),
                    prob: p,
                });
            }
        }
    }
    Ok(out)
}

pub fn spectrum_mean(spectrum: &[SpectrumSample]) -> f64 {
    spectrum.iter().map(|s| s.value * s.prob).sum()
}
