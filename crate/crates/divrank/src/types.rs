//! Domain types shared by the rankers, metrics, and the data pipeline.
//!
//! Items and topics are referenced by dense integer indices everywhere inside
//! the crate; string identifiers exist only at the ingestion boundary. All
//! types are immutable after construction.

use crate::{Error, Result};

/// An ordered catalog of topic (genre) identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicCatalog {
    topics: Vec<String>,
}

impl TopicCatalog {
    pub fn new<I, S>(topics: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let topics: Vec<String> = topics.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for t in &topics {
            if t.is_empty() {
                return Err(Error::InvalidInput("empty topic identifier".into()));
            }
            if !seen.insert(t.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate topic {t:?}")));
            }
        }
        Ok(Self { topics })
    }

    /// Number of topics, `M`.
    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.topics
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.topics.iter().position(|t| t == name)
    }
}

/// The ground set of recommendable items with their topic incidence.
#[derive(Debug, Clone)]
pub struct GroundSet {
    item_ids: Vec<String>,
    incidence: Vec<Vec<usize>>,
    names: Vec<Option<String>>,
    topic_count: usize,
}

impl GroundSet {
    /// Builds a ground set. `incidence[i]` lists the topic indices of item
    /// `i`; indices must be valid for `catalog`. Duplicate topic entries per
    /// item are collapsed.
    pub fn new(
        item_ids: Vec<String>,
        incidence: Vec<Vec<usize>>,
        catalog: &TopicCatalog,
    ) -> Result<Self> {
        Self::with_names(item_ids, incidence, catalog, None)
    }

    pub fn with_names(
        item_ids: Vec<String>,
        mut incidence: Vec<Vec<usize>>,
        catalog: &TopicCatalog,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        if item_ids.len() != incidence.len() {
            return Err(Error::InvalidInput(format!(
                "{} item ids but {} incidence rows",
                item_ids.len(),
                incidence.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &item_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate item id {id:?}")));
            }
        }
        for row in incidence.iter_mut() {
            row.sort_unstable();
            row.dedup();
            if let Some(&t) = row.last() {
                if t >= catalog.len() {
                    return Err(Error::InvalidInput(format!(
                        "topic index {t} out of range for catalog of {}",
                        catalog.len()
                    )));
                }
            }
        }
        let names = match names {
            Some(n) => {
                if n.len() != item_ids.len() {
                    return Err(Error::InvalidInput("names length mismatch".into()));
                }
                n.into_iter().map(Some).collect()
            }
            None => vec![None; item_ids.len()],
        };
        Ok(Self {
            item_ids,
            incidence,
            names,
            topic_count: catalog.len(),
        })
    }

    /// Number of items, `L`.
    pub fn len(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.item_ids.is_empty()
    }

    pub fn item_id(&self, item: usize) -> &str {
        &self.item_ids[item]
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn name(&self, item: usize) -> Option<&str> {
        self.names[item].as_deref()
    }

    /// Sorted, deduplicated topic indices of `item`.
    pub fn topics_of(&self, item: usize) -> &[usize] {
        &self.incidence[item]
    }

    pub fn topic_count(&self) -> usize {
        self.topic_count
    }

    /// Binary genre indicator vector of `item`, length `M`.
    pub fn genre_vector(&self, item: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.topic_count];
        for &t in &self.incidence[item] {
            v[t] = 1.0;
        }
        v
    }
}

/// Per-item non-negative utility scores aligned with a `GroundSet`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    values: Vec<f64>,
}

impl UtilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!("utility[{i}] = {v} invalid")));
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, item: usize) -> f64 {
        self.values[item]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rescales so that the maximum value is 1. An all-zero vector is
    /// returned unchanged.
    pub fn normalized(&self) -> UtilityVector {
        let max = self.values.iter().cloned().fold(0.0_f64, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        UtilityVector {
            values: self.values.iter().map(|v| v / max).collect(),
        }
    }
}

/// An ordered list of distinct items with per-position diversity gains.
///
/// `objective` is always the dot product of the gains with the items'
/// utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    ordering: Vec<usize>,
    gains: Vec<f64>,
    objective: f64,
}

impl RankedList {
    /// Builds a list from an ordering and per-position gains, computing the
    /// objective from `utilities`.
    pub fn new(ordering: Vec<usize>, gains: Vec<f64>, utilities: &UtilityVector) -> Result<Self> {
        if ordering.len() != gains.len() {
            return Err(Error::InvalidInput(format!(
                "{} items but {} gains",
                ordering.len(),
                gains.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &e in &ordering {
            if e >= utilities.len() {
                return Err(Error::InvalidInput(format!("item index {e} out of range")));
            }
            if !seen.insert(e) {
                return Err(Error::InvalidInput(format!("duplicate item {e}")));
            }
        }
        for (k, &g) in gains.iter().enumerate() {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidInput(format!("gain[{k}] = {g} invalid")));
            }
        }
        let objective = ordering
            .iter()
            .zip(&gains)
            .map(|(&e, g)| g * utilities.get(e))
            .sum();
        Ok(Self {
            ordering,
            gains,
            objective,
        })
    }

    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }
}

/// Per-topic preference weights and integer quotas for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    weights: Vec<f64>,
    quotas: Vec<usize>,
    list_length: usize,
}

impl UserProfile {
    pub fn new(weights: Vec<f64>, quotas: Vec<usize>, list_length: usize) -> Result<Self> {
        if weights.len() != quotas.len() {
            return Err(Error::InvalidInput(format!(
                "{} weights but {} quotas",
                weights.len(),
                quotas.len()
            )));
        }
        if list_length == 0 {
            return Err(Error::InvalidInput("list length must be >= 1".into()));
        }
        let sum: f64 = weights.iter().sum();
        for (t, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidInput(format!("weight[{t}] = {w} invalid")));
            }
        }
        if sum != 0.0 && (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self {
            weights,
            quotas,
            list_length,
        })
    }

    /// Derives quotas as `floor(weight * list_length)` per topic.
    pub fn from_weights(weights: Vec<f64>, list_length: usize) -> Result<Self> {
        let quotas = weights
            .iter()
            .map(|w| (w * list_length as f64).floor() as usize)
            .collect();
        Self::new(weights, quotas, list_length)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn quotas(&self) -> &[usize] {
        &self.quotas
    }

    pub fn quota(&self, topic: usize) -> usize {
        self.quotas[topic]
    }

    pub fn list_length(&self) -> usize {
        self.list_length
    }
}

/// Rescales utilities so the maximum is 1 (all-zero input passes through).
pub fn normalize_utilities(u: &UtilityVector) -> UtilityVector {
    u.normalized()
}
