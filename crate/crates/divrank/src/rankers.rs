//! Ranking algorithms: the exact greedy diversity-weighted utility maximizer,
//! the MMR baseline, and a factorial brute-force oracle for tests.

use itertools::Itertools;

use crate::diversity::Diversity;
use crate::types::{RankedList, UtilityVector};
use crate::{Error, Result};

/// Diversity weight for MMR, in `[0, 1]`. `0` is pure utility, `1` pure
/// diversity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffWeight(f64);

impl TradeoffWeight {
    pub fn new(diversity_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&diversity_weight) {
            return Err(Error::InvalidInput(format!(
                "diversity weight {diversity_weight} outside [0, 1]"
            )));
        }
        Ok(Self(diversity_weight))
    }

    pub fn diversity_weight(&self) -> f64 {
        self.0
    }
}

fn check_alignment(u: &UtilityVector, f: &dyn Diversity) -> Result<usize> {
    if u.len() != f.ground_size() {
        return Err(Error::InvalidInput(format!(
            "{} utilities but diversity function over {} items",
            u.len(),
            f.ground_size()
        )));
    }
    Ok(u.len())
}

/// Evaluates `Σ_k g_A(a_k) w(a_k)` for a full permutation of the ground set.
pub fn objective_value(ordering: &[usize], u: &UtilityVector, f: &dyn Diversity) -> Result<f64> {
    let n = check_alignment(u, f)?;
    if ordering.len() != n {
        return Err(Error::InvalidInput(format!(
            "ordering has {} items, ground set has {n}",
            ordering.len()
        )));
    }
    let mut seen = vec![false; n];
    for &e in ordering {
        if e >= n || seen[e] {
            return Err(Error::InvalidInput(format!(
                "ordering is not a permutation (item {e})"
            )));
        }
        seen[e] = true;
    }
    let mut ctx = f.context();
    let mut total = 0.0;
    for &e in ordering {
        total += ctx.gain(e) * u.get(e);
        ctx.insert(e);
    }
    Ok(total)
}

/// Utility-sorted item indices: descending utility, ascending index on ties.
pub fn utility_order(u: &UtilityVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u.get(b).total_cmp(&u.get(a)).then_with(|| a.cmp(&b)));
    order
}

/// Exact greedy maximizer of diversity-weighted utility.
///
/// Sorts items by decreasing utility and keeps those with strictly positive
/// marginal diversity. The returned objective is that of the full
/// utility-sorted permutation, which the dropped zero-gain items do not
/// change, and it is the maximum over all permutations whenever `f` is
/// monotone submodular with `f(∅) = 0`.
pub fn dum_rank(u: &UtilityVector, f: &dyn Diversity) -> Result<RankedList> {
    check_alignment(u, f)?;
    let order = utility_order(u);
    let mut ctx = f.context();
    let mut selected = Vec::new();
    let mut gains = Vec::new();
    for &e in &order {
        let g = ctx.gain(e);
        if g > 0.0 {
            selected.push(e);
            gains.push(g);
            ctx.insert(e);
        }
    }
    RankedList::new(selected, gains, u)
}

/// Maximal marginal relevance: greedily appends
/// `argmax_e (1 - λ)·w(e) + λ·f(S + e)` until `length` items are chosen.
/// Ties break on higher utility, then lower index. The `gains` field of the
/// result records the diversity increments, and `u` and `f` should be
/// normalized to max 1 for λ to trade the two off meaningfully.
pub fn mmr_rank(
    u: &UtilityVector,
    f: &dyn Diversity,
    weight: TradeoffWeight,
    length: usize,
) -> Result<RankedList> {
    let n = check_alignment(u, f)?;
    if length > n {
        return Err(Error::InvalidInput(format!(
            "requested length {length} exceeds ground set size {n}"
        )));
    }
    let lambda = weight.diversity_weight();
    let mut ctx = f.context();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut selected = Vec::new();
    let mut gains = Vec::new();
    while selected.len() < length {
        let current = ctx.current();
        let mut best: Option<(usize, usize, f64, f64)> = None; // (pos, item, score, gain)
        for (pos, &e) in remaining.iter().enumerate() {
            let g = ctx.gain(e);
            let score = (1.0 - lambda) * u.get(e) + lambda * (current + g);
            let better = match best {
                None => true,
                Some((_, be, bs, _)) => {
                    score > bs
                        || (score == bs
                            && (u.get(e) > u.get(be) || (u.get(e) == u.get(be) && e < be)))
                }
            };
            if better {
                best = Some((pos, e, score, g));
            }
        }
        let (pos, e, _, g) = best.expect("remaining is non-empty while |S| < length <= n");
        remaining.swap_remove(pos);
        selected.push(e);
        gains.push(g);
        ctx.insert(e);
    }
    RankedList::new(selected, gains, u)
}

const BRUTE_FORCE_MAX_ITEMS: usize = 8;

/// Enumerates every permutation of the ground set and returns one with the
/// maximum objective. Factorial cost; intended as a test oracle only.
pub fn brute_force_rank(u: &UtilityVector, f: &dyn Diversity) -> Result<RankedList> {
    let n = check_alignment(u, f)?;
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::SizeLimit(format!(
            "brute force enumerates {n}! permutations; limit is {BRUTE_FORCE_MAX_ITEMS} items"
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for perm in (0..n).permutations(n) {
        let value = objective_value(&perm, u, f)?;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((perm, value));
        }
    }
    let (ordering, _) = best.ok_or_else(|| Error::InvalidInput("empty ground set".into()))?;
    let mut ctx = f.context();
    let gains: Vec<f64> = ordering
        .iter()
        .map(|&e| {
            let g = ctx.gain(e);
            ctx.insert(e);
            g
        })
        .collect();
    RankedList::new(ordering, gains, u)
}

/// Interprets the normalized gains `g / f(E)` as the probability that the
/// user's choice falls on each listed item. Sums to 1 on full permutations
/// and to `f(covered) / f(E)` on truncated lists.
pub fn cascade_choice_probabilities(ranked: &RankedList, f: &dyn Diversity) -> Result<Vec<f64>> {
    let total = f.capacity();
    if total <= 0.0 {
        return Err(Error::InvalidInput(
            "cascade probabilities need f(E) > 0".into(),
        ));
    }
    Ok(ranked.gains().iter().map(|g| g / total).collect())
}
