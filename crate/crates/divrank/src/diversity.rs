//! Monotone submodular diversity functions and their marginal gains.
//!
//! A [`Diversity`] is a set function over item indices with `value(∅) = 0`
//! that never decreases when an item is added and has diminishing returns.
//! Rankers never evaluate sets from scratch while building a list; they open
//! a [`GainContext`] that tracks the running prefix, so the coverage
//! implementations answer `gain` in time proportional to the item's topic
//! count.

use crate::types::{GroundSet, TopicCatalog, UserProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiversityKind {
    TopicCoverage,
    CappedCoverage,
    Custom,
}

/// A monotone submodular set function over item indices `0..ground_size()`.
///
/// Implementations must satisfy `value(&[]) == 0`, monotonicity, and
/// submodularity; [`check_monotone_submodular`] verifies all three
/// exhaustively for small ground sets. Rankers trust the contract and do not
/// re-verify per call.
pub trait Diversity {
    fn ground_size(&self) -> usize;

    /// Evaluates the function on a set of distinct item indices.
    fn value(&self, items: &[usize]) -> f64;

    /// The finite maximum `f(E)`.
    fn capacity(&self) -> f64;

    fn kind(&self) -> DiversityKind {
        DiversityKind::Custom
    }

    /// Opens an incremental evaluation context starting from the empty set.
    fn context(&self) -> Box<dyn GainContext + '_>;
}

/// Incremental prefix evaluation of a diversity function.
pub trait GainContext {
    /// `f(prefix)` for the items inserted so far.
    fn current(&self) -> f64;

    /// `f(prefix + item) - f(prefix)`.
    fn gain(&self, item: usize) -> f64;

    /// Appends `item` to the prefix.
    fn insert(&mut self, item: usize);
}

impl<F: Diversity + ?Sized> Diversity for &F {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, items: &[usize]) -> f64 {
        (**self).value(items)
    }
    fn capacity(&self) -> f64 {
        (**self).capacity()
    }
    fn kind(&self) -> DiversityKind {
        (**self).kind()
    }
    fn context(&self) -> Box<dyn GainContext + '_> {
        (**self).context()
    }
}

impl<F: Diversity + ?Sized> Diversity for Box<F> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, items: &[usize]) -> f64 {
        (**self).value(items)
    }
    fn capacity(&self) -> f64 {
        (**self).capacity()
    }
    fn kind(&self) -> DiversityKind {
        (**self).kind()
    }
    fn context(&self) -> Box<dyn GainContext + '_> {
        (**self).context()
    }
}

/// Fallback context for functions without incremental structure. Caches the
/// current prefix value, so each `gain` costs one `value` evaluation.
pub struct GenericContext<'a> {
    f: &'a dyn Diversity,
    prefix: Vec<usize>,
    current: f64,
}

impl<'a> GenericContext<'a> {
    pub fn new(f: &'a dyn Diversity) -> Self {
        let current = f.value(&[]);
        Self {
            f,
            prefix: Vec::new(),
            current,
        }
    }
}

impl GainContext for GenericContext<'_> {
    fn current(&self) -> f64 {
        self.current
    }

    fn gain(&self, item: usize) -> f64 {
        let mut with = self.prefix.clone();
        with.push(item);
        self.f.value(&with) - self.current
    }

    fn insert(&mut self, item: usize) {
        self.prefix.push(item);
        self.current = self.f.value(&self.prefix);
    }
}

/// Counts the number of distinct topics covered by a set of items.
#[derive(Debug, Clone)]
pub struct TopicCoverage {
    incidence: Vec<Vec<usize>>,
    topic_count: usize,
    capacity: f64,
}

/// Builds the topic-coverage diversity function: `f(X)` is the number of
/// distinct topics covered by at least one item of `X`.
pub fn topic_coverage(catalog: &TopicCatalog, ground: &GroundSet) -> TopicCoverage {
    let incidence: Vec<Vec<usize>> = (0..ground.len())
        .map(|i| ground.topics_of(i).to_vec())
        .collect();
    let mut covered = vec![false; catalog.len()];
    for row in &incidence {
        for &t in row {
            covered[t] = true;
        }
    }
    let capacity = covered.iter().filter(|&&c| c).count() as f64;
    TopicCoverage {
        incidence,
        topic_count: catalog.len(),
        capacity,
    }
}

impl Diversity for TopicCoverage {
    fn ground_size(&self) -> usize {
        self.incidence.len()
    }

    fn value(&self, items: &[usize]) -> f64 {
        let mut covered = vec![false; self.topic_count];
        let mut n = 0usize;
        for &e in items {
            for &t in &self.incidence[e] {
                if !covered[t] {
                    covered[t] = true;
                    n += 1;
                }
            }
        }
        n as f64
    }

    fn capacity(&self) -> f64 {
        self.capacity
    }

    fn kind(&self) -> DiversityKind {
        DiversityKind::TopicCoverage
    }

    fn context(&self) -> Box<dyn GainContext + '_> {
        Box::new(CoverageContext {
            incidence: &self.incidence,
            covered: vec![false; self.topic_count],
            current: 0.0,
        })
    }
}

struct CoverageContext<'a> {
    incidence: &'a [Vec<usize>],
    covered: Vec<bool>,
    current: f64,
}

impl GainContext for CoverageContext<'_> {
    fn current(&self) -> f64 {
        self.current
    }

    fn gain(&self, item: usize) -> f64 {
        self.incidence[item]
            .iter()
            .filter(|&&t| !self.covered[t])
            .count() as f64
    }

    fn insert(&mut self, item: usize) {
        for &t in &self.incidence[item] {
            if !self.covered[t] {
                self.covered[t] = true;
                self.current += 1.0;
            }
        }
    }
}

/// Topic coverage with per-topic quotas: each topic counts up to `N_t` times.
#[derive(Debug, Clone)]
pub struct CappedCoverage {
    incidence: Vec<Vec<usize>>,
    quotas: Vec<usize>,
    capacity: f64,
}

/// Builds the quota-capped coverage function:
/// `f(X) = Σ_t min(|{e ∈ X : e covers t}|, N_t)`.
pub fn capped_coverage(
    catalog: &TopicCatalog,
    ground: &GroundSet,
    profile: &UserProfile,
) -> Result<CappedCoverage> {
    if profile.quotas().len() != catalog.len() {
        return Err(Error::InvalidInput(format!(
            "profile has {} quotas but catalog has {} topics",
            profile.quotas().len(),
            catalog.len()
        )));
    }
    let incidence: Vec<Vec<usize>> = (0..ground.len())
        .map(|i| ground.topics_of(i).to_vec())
        .collect();
    let quotas = profile.quotas().to_vec();
    let mut counts = vec![0usize; catalog.len()];
    for row in &incidence {
        for &t in row {
            counts[t] += 1;
        }
    }
    let capacity = counts
        .iter()
        .zip(&quotas)
        .map(|(&c, &n)| c.min(n))
        .sum::<usize>() as f64;
    Ok(CappedCoverage {
        incidence,
        quotas,
        capacity,
    })
}

impl Diversity for CappedCoverage {
    fn ground_size(&self) -> usize {
        self.incidence.len()
    }

    fn value(&self, items: &[usize]) -> f64 {
        let mut counts = vec![0usize; self.quotas.len()];
        for &e in items {
            for &t in &self.incidence[e] {
                counts[t] += 1;
            }
        }
        counts
            .iter()
            .zip(&self.quotas)
            .map(|(&c, &n)| c.min(n))
            .sum::<usize>() as f64
    }

    fn capacity(&self) -> f64 {
        self.capacity
    }

    fn kind(&self) -> DiversityKind {
        DiversityKind::CappedCoverage
    }

    fn context(&self) -> Box<dyn GainContext + '_> {
        Box::new(CappedContext {
            incidence: &self.incidence,
            quotas: &self.quotas,
            counts: vec![0; self.quotas.len()],
            current: 0.0,
        })
    }
}

struct CappedContext<'a> {
    incidence: &'a [Vec<usize>],
    quotas: &'a [usize],
    counts: Vec<usize>,
    current: f64,
}

impl GainContext for CappedContext<'_> {
    fn current(&self) -> f64 {
        self.current
    }

    fn gain(&self, item: usize) -> f64 {
        self.incidence[item]
            .iter()
            .filter(|&&t| self.counts[t] < self.quotas[t])
            .count() as f64
    }

    fn insert(&mut self, item: usize) {
        for &t in &self.incidence[item] {
            if self.counts[t] < self.quotas[t] {
                self.current += 1.0;
            }
            self.counts[t] += 1;
        }
    }
}

/// `f(prefix + e) - f(prefix)`, the marginal diversity of appending `e`.
pub fn gain(f: &dyn Diversity, prefix: &[usize], item: usize) -> Result<f64> {
    if prefix.contains(&item) {
        return Err(Error::InvalidInput(format!(
            "item {item} already in the prefix"
        )));
    }
    let base = f.value(prefix);
    let mut with = prefix.to_vec();
    with.push(item);
    Ok(f.value(&with) - base)
}

/// A diversity function rescaled so the richest single item has value 1.
#[derive(Debug, Clone)]
pub struct NormalizedDiversity<F: Diversity> {
    inner: F,
    scale: f64,
}

/// Divides `f` by `max_e f({e})`. Fails when that maximum is zero.
pub fn normalize_diversity<F: Diversity>(f: F) -> Result<NormalizedDiversity<F>> {
    let max = (0..f.ground_size())
        .map(|e| f.value(&[e]))
        .fold(0.0_f64, f64::max);
    if max <= 0.0 {
        return Err(Error::InvalidInput(
            "cannot normalize: every singleton has zero diversity".into(),
        ));
    }
    Ok(NormalizedDiversity {
        inner: f,
        scale: max,
    })
}

impl<F: Diversity> Diversity for NormalizedDiversity<F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, items: &[usize]) -> f64 {
        self.inner.value(items) / self.scale
    }

    fn capacity(&self) -> f64 {
        self.inner.capacity() / self.scale
    }

    fn kind(&self) -> DiversityKind {
        self.inner.kind()
    }

    fn context(&self) -> Box<dyn GainContext + '_> {
        Box::new(ScaledContext {
            inner: self.inner.context(),
            scale: self.scale,
        })
    }
}

struct ScaledContext<'a> {
    inner: Box<dyn GainContext + 'a>,
    scale: f64,
}

impl GainContext for ScaledContext<'_> {
    fn current(&self) -> f64 {
        self.inner.current() / self.scale
    }
    fn gain(&self, item: usize) -> f64 {
        self.inner.gain(item) / self.scale
    }
    fn insert(&mut self, item: usize) {
        self.inner.insert(item);
    }
}

/// One witness of a violated submodular inequality:
/// `f(base + item) - f(base) < f(superset + item) - f(superset)` with
/// `base ⊆ superset` and `item ∉ superset`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityViolation {
    pub base: Vec<usize>,
    pub superset: Vec<usize>,
    pub item: usize,
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub empty_set_value: f64,
    pub monotonicity_violations: Vec<(Vec<usize>, usize)>,
    pub submodularity_violations: Vec<SubmodularityViolation>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.empty_set_value.abs() <= 1e-12
            && self.monotonicity_violations.is_empty()
            && self.submodularity_violations.is_empty()
    }
}

const CHECK_MAX_ITEMS: usize = 20;
const CHECK_EPS: f64 = 1e-9;

fn mask_to_set(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Exhaustively verifies `f(∅) = 0`, monotonicity, and submodularity over
/// every subset of the ground set. Submodularity is checked through the
/// equivalent local condition
/// `f(X + e1) + f(X + e2) ≥ f(X + e1 + e2) + f(X)`; each violation is
/// reported as a `(X, X + e2, e1)` witness triple.
pub fn check_monotone_submodular(f: &dyn Diversity) -> Result<CheckReport> {
    let n = f.ground_size();
    if n > CHECK_MAX_ITEMS {
        return Err(Error::SizeLimit(format!(
            "exhaustive check needs ground size <= {CHECK_MAX_ITEMS}, got {n}"
        )));
    }
    let masks = 1usize << n;
    let mut values = vec![0.0_f64; masks];
    for (mask, v) in values.iter_mut().enumerate() {
        *v = f.value(&mask_to_set(mask as u32));
    }

    let mut report = CheckReport {
        empty_set_value: values[0],
        ..CheckReport::default()
    };

    for mask in 0..masks {
        for e in 0..n {
            if mask >> e & 1 == 1 {
                continue;
            }
            let with = mask | 1 << e;
            if values[with] < values[mask] - CHECK_EPS {
                report
                    .monotonicity_violations
                    .push((mask_to_set(mask as u32), e));
            }
        }
        for e1 in 0..n {
            if mask >> e1 & 1 == 1 {
                continue;
            }
            for e2 in 0..n {
                if e2 == e1 || mask >> e2 & 1 == 1 {
                    continue;
                }
                let x1 = mask | 1 << e1;
                let x2 = mask | 1 << e2;
                let x12 = x1 | x2;
                if values[x1] - values[mask] < values[x12] - values[x2] - CHECK_EPS {
                    report
                        .submodularity_violations
                        .push(SubmodularityViolation {
                            base: mask_to_set(mask as u32),
                            superset: mask_to_set(x2 as u32),
                            item: e1,
                        });
                }
            }
        }
    }
    Ok(report)
}
