//! Offline evaluation metrics: intra-list distance, discounted cumulative
//! gain, and expected intra-list distance.
//!
//! Rank discounts are 1-based and use base-2 logarithms, so the discount at
//! rank 1 is exactly 1.

use crate::{Error, Result};

/// Per-topic binary indicators for one item.
#[derive(Debug, Clone, PartialEq)]
pub struct GenreVector(Vec<f64>);

impl GenreVector {
    pub fn new(indicators: Vec<f64>) -> Result<Self> {
        for (t, &v) in indicators.iter().enumerate() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "genre indicator[{t}] = {v}, must be 0 or 1"
                )));
            }
        }
        Ok(Self(indicators))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// The full metric suite for one recommendation list.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub ild: f64,
    pub dcg: f64,
    pub ndcg: f64,
    pub eild: f64,
    pub list_length: usize,
}

/// Euclidean distance between two genre vectors.
pub fn euclidean_genre_distance(a: &GenreVector, b: &GenreVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "genre vectors of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Average pairwise genre distance over the list; 0 for fewer than two items.
pub fn ild(genres: &[GenreVector]) -> Result<f64> {
    let n = genres.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += euclidean_genre_distance(&genres[i], &genres[j])?;
        }
    }
    Ok(2.0 * sum / (n * (n - 1)) as f64)
}

fn discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

fn check_non_negative(utilities: &[f64]) -> Result<()> {
    for (k, &w) in utilities.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidInput(format!("utility[{k}] = {w} invalid")));
        }
    }
    Ok(())
}

/// Discounted cumulative gain of utilities in rank order.
pub fn dcg(utilities: &[f64]) -> Result<f64> {
    check_non_negative(utilities)?;
    Ok(utilities
        .iter()
        .enumerate()
        .map(|(i, &w)| w * discount(i + 1))
        .sum())
}

/// DCG normalized by the ideal same-length list drawn from `ideal_pool`.
/// Returns 0 when the ideal DCG is 0.
pub fn ndcg(utilities: &[f64], ideal_pool: &[f64]) -> Result<f64> {
    check_non_negative(ideal_pool)?;
    let actual = dcg(utilities)?;
    let mut pool = ideal_pool.to_vec();
    pool.sort_by(|a, b| b.total_cmp(a));
    pool.truncate(utilities.len());
    let ideal = dcg(&pool)?;
    if ideal == 0.0 {
        return Ok(0.0);
    }
    Ok(actual / ideal)
}

/// Expected intra-list distance: pairwise genre distance weighted by both
/// items' utilities, a rank discount for the anchor position, and a relative
/// discount for the paired position, normalized per anchor. Positions whose
/// normalizer is zero contribute nothing; single-item lists score 0.
pub fn eild(utilities: &[f64], genres: &[GenreVector]) -> Result<f64> {
    if utilities.len() != genres.len() {
        return Err(Error::InvalidInput(format!(
            "{} utilities but {} genre vectors",
            utilities.len(),
            genres.len()
        )));
    }
    check_non_negative(utilities)?;
    let n = utilities.len();
    if n < 2 {
        return Ok(0.0);
    }
    let total_discount: f64 = (1..=n).map(discount).sum();
    let rdisc = |k: usize, kp: usize| discount((kp as isize - k as isize).max(1) as usize);
    let mut total = 0.0;
    for k in 1..=n {
        let normalizer: f64 = (1..=n)
            .filter(|&kp| kp != k)
            .map(|kp| rdisc(k, kp) * utilities[kp - 1])
            .sum();
        if normalizer == 0.0 {
            continue;
        }
        let weight = 1.0 / (total_discount * normalizer);
        for kp in 1..=n {
            if kp == k {
                continue;
            }
            let d = euclidean_genre_distance(&genres[k - 1], &genres[kp - 1])?;
            total += weight * discount(k) * rdisc(k, kp) * utilities[k - 1] * utilities[kp - 1] * d;
        }
    }
    Ok(total)
}

/// Computes the full metric suite for one list.
pub fn report(
    utilities: &[f64],
    genres: &[GenreVector],
    ideal_pool: &[f64],
) -> Result<MetricReport> {
    Ok(MetricReport {
        ild: ild(genres)?,
        dcg: dcg(utilities)?,
        ndcg: ndcg(utilities, ideal_pool)?,
        eild: eild(utilities, genres)?,
        list_length: utilities.len(),
    })
}
