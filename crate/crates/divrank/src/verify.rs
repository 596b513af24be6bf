//! Randomized property suites backed by independent oracles.
//!
//! These drive both the `verify` CLI subcommand and the acceptance tests:
//! greedy-vs-brute-force optimality, the coverage and quota guarantees, the
//! gain-sum identity, and the MMR extremes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diversity::{capped_coverage, check_monotone_submodular, topic_coverage, Diversity};
use crate::rankers::{brute_force_rank, dum_rank, mmr_rank, utility_order, TradeoffWeight};
use crate::types::{GroundSet, TopicCatalog, UserProfile, UtilityVector};
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub max_items: usize,
    pub max_topics: usize,
    pub max_quota: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_items: 6,
            max_topics: 4,
            max_quota: 3,
            trials: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// One random instance: items with random topic incidence, i.i.d. uniform
/// utilities, and a random quota profile.
pub struct Instance {
    pub catalog: TopicCatalog,
    pub ground: GroundSet,
    pub utilities: UtilityVector,
    pub profile: UserProfile,
}

pub fn random_instance(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Instance {
    let m = rng.gen_range(1..=cfg.max_topics);
    let l = rng.gen_range(1..=cfg.max_items);
    let catalog = TopicCatalog::new((0..m).map(|t| format!("T{t}"))).unwrap();
    let incidence: Vec<Vec<usize>> = (0..l)
        .map(|_| (0..m).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let ground =
        GroundSet::new((0..l).map(|i| i.to_string()).collect(), incidence, &catalog).unwrap();
    let utilities = UtilityVector::new((0..l).map(|_| rng.gen::<f64>()).collect()).unwrap();
    let mut weights: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let quotas: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=cfg.max_quota)).collect();
    let profile = UserProfile::new(weights, quotas, cfg.max_quota.max(1)).unwrap();
    Instance {
        catalog,
        ground,
        utilities,
        profile,
    }
}

fn both_functions(inst: &Instance) -> Result<[Box<dyn Diversity + '_>; 2]> {
    Ok([
        Box::new(topic_coverage(&inst.catalog, &inst.ground)),
        Box::new(capped_coverage(&inst.catalog, &inst.ground, &inst.profile)?),
    ])
}

/// The greedy objective equals the brute-force maximum over all
/// permutations, for both diversity functions.
pub fn optimality(cfg: &VerifyConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let inst = random_instance(&mut rng, cfg);
        for f in both_functions(&inst)? {
            let greedy = dum_rank(&inst.utilities, f.as_ref())?;
            let oracle = brute_force_rank(&inst.utilities, f.as_ref())?;
            let delta = (greedy.objective() - oracle.objective()).abs();
            if delta > 1e-9 {
                failures.push(format!(
                    "trial {trial}: greedy {} vs oracle {} (kind {:?})",
                    greedy.objective(),
                    oracle.objective(),
                    f.kind()
                ));
            }
        }
    }
    Ok(PropertyResult {
        name: "greedy objective matches brute-force maximum",
        trials: cfg.trials,
        failures,
    })
}

/// With plain topic coverage, every topic covered by the ground set is
/// covered in the output by a highest-utility member, and the list is no
/// longer than the topic count.
pub fn coverage_guarantee(cfg: &VerifyConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let inst = random_instance(&mut rng, cfg);
        let f = topic_coverage(&inst.catalog, &inst.ground);
        let list = dum_rank(&inst.utilities, &f)?;
        if list.len() > inst.catalog.len() {
            failures.push(format!(
                "trial {trial}: |S| = {} exceeds topic count {}",
                list.len(),
                inst.catalog.len()
            ));
            continue;
        }
        let selected: std::collections::HashSet<usize> = list.ordering().iter().copied().collect();
        for t in 0..inst.catalog.len() {
            let members: Vec<usize> = (0..inst.ground.len())
                .filter(|&e| inst.ground.topics_of(e).contains(&t))
                .collect();
            let Some(max_u) = members
                .iter()
                .map(|&e| inst.utilities.get(e))
                .fold(None::<f64>, |acc, u| Some(acc.map_or(u, |a| a.max(u))))
            else {
                continue;
            };
            let ok = members
                .iter()
                .any(|&e| selected.contains(&e) && inst.utilities.get(e) == max_u);
            if !ok {
                failures.push(format!(
                    "trial {trial}: topic {t} lacks a top-utility representative"
                ));
            }
        }
    }
    Ok(PropertyResult {
        name: "topic coverage selects top-utility representatives",
        trials: cfg.trials,
        failures,
    })
}

/// With quota-capped coverage, every topic keeps its top `min(N_t, count)`
/// members in the output, and the list is no longer than the quota sum.
pub fn quota_guarantee(cfg: &VerifyConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let inst = random_instance(&mut rng, cfg);
        let f = capped_coverage(&inst.catalog, &inst.ground, &inst.profile)?;
        let list = dum_rank(&inst.utilities, &f)?;
        let quota_sum: usize = inst.profile.quotas().iter().sum();
        if list.len() > quota_sum {
            failures.push(format!(
                "trial {trial}: |S| = {} exceeds quota sum {quota_sum}",
                list.len()
            ));
            continue;
        }
        let selected: std::collections::HashSet<usize> = list.ordering().iter().copied().collect();
        for t in 0..inst.catalog.len() {
            let mut members: Vec<usize> = (0..inst.ground.len())
                .filter(|&e| inst.ground.topics_of(e).contains(&t))
                .collect();
            members.sort_by(|&a, &b| {
                inst.utilities
                    .get(b)
                    .total_cmp(&inst.utilities.get(a))
                    .then_with(|| a.cmp(&b))
            });
            let need = inst.profile.quota(t).min(members.len());
            for &e in &members[..need] {
                if !selected.contains(&e) {
                    failures.push(format!(
                        "trial {trial}: top-{need} member {e} of topic {t} missing from S"
                    ));
                }
            }
        }
    }
    Ok(PropertyResult {
        name: "capped coverage keeps each topic's top-quota members",
        trials: cfg.trials,
        failures,
    })
}

/// Prefix gains over any full ordering telescope to `f(E)`.
pub fn gain_sum_identity(cfg: &VerifyConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let inst = random_instance(&mut rng, cfg);
        let mut ordering: Vec<usize> = (0..inst.ground.len()).collect();
        ordering.shuffle(&mut rng);
        for f in both_functions(&inst)? {
            let mut ctx = f.context();
            let mut sum = 0.0;
            for &e in &ordering {
                sum += ctx.gain(e);
                ctx.insert(e);
            }
            let full: Vec<usize> = (0..inst.ground.len()).collect();
            let total = f.value(&full);
            if (sum - total).abs() > 1e-9 {
                failures.push(format!(
                    "trial {trial}: gain sum {sum} != f(E) {total} (kind {:?})",
                    f.kind()
                ));
            }
        }
    }
    Ok(PropertyResult {
        name: "prefix gains sum to f(E) on any ordering",
        trials: cfg.trials,
        failures,
    })
}

/// MMR with zero diversity weight reproduces the utility-sorted prefix; with
/// full diversity weight it matches a from-scratch greedy coverage oracle.
pub fn mmr_extremes(cfg: &VerifyConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let inst = random_instance(&mut rng, cfg);
        let f = topic_coverage(&inst.catalog, &inst.ground);
        let length = rng.gen_range(0..=inst.ground.len());

        let pure = mmr_rank(&inst.utilities, &f, TradeoffWeight::new(0.0)?, length)?;
        let expected = &utility_order(&inst.utilities)[..length];
        if pure.ordering() != expected {
            failures.push(format!(
                "trial {trial}: zero-weight MMR {:?} != utility prefix {:?}",
                pure.ordering(),
                expected
            ));
        }

        let diverse = mmr_rank(&inst.utilities, &f, TradeoffWeight::new(1.0)?, length)?;
        let oracle = naive_max_coverage(&inst, &f, length);
        if diverse.ordering() != oracle {
            failures.push(format!(
                "trial {trial}: full-weight MMR {:?} != coverage oracle {:?}",
                diverse.ordering(),
                oracle
            ));
        }
    }
    Ok(PropertyResult {
        name: "MMR extremes match utility sort and coverage greedy",
        trials: cfg.trials,
        failures,
    })
}

// Hand-stepped greedy over f(S + e) with the same tie rule, evaluated from
// scratch each step.
fn naive_max_coverage(inst: &Instance, f: &dyn Diversity, length: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < length {
        let mut best: Option<(usize, f64)> = None;
        for e in 0..inst.ground.len() {
            if chosen.contains(&e) {
                continue;
            }
            let mut with = chosen.clone();
            with.push(e);
            let v = f.value(&with);
            let better = match best {
                None => true,
                Some((be, bv)) => {
                    v > bv
                        || (v == bv
                            && (inst.utilities.get(e) > inst.utilities.get(be)
                                || (inst.utilities.get(e) == inst.utilities.get(be) && e < be)))
                }
            };
            if better {
                best = Some((e, v));
            }
        }
        chosen.push(best.unwrap().0);
    }
    chosen
}

/// Both built-in diversity functions pass the exhaustive monotone-submodular
/// check on random instances.
pub fn submodularity(cfg: &VerifyConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(5));
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let inst = random_instance(&mut rng, cfg);
        for f in both_functions(&inst)? {
            let report = check_monotone_submodular(f.as_ref())?;
            if !report.is_valid() {
                failures.push(format!(
                    "trial {trial}: {:?} violates the contract ({} monotonicity, {} submodularity)",
                    f.kind(),
                    report.monotonicity_violations.len(),
                    report.submodularity_violations.len()
                ));
            }
        }
    }
    Ok(PropertyResult {
        name: "built-in functions are monotone submodular",
        trials: cfg.trials,
        failures,
    })
}

/// Runs every suite with the given bounds.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<PropertyResult>> {
    Ok(vec![
        optimality(cfg)?,
        coverage_guarantee(cfg)?,
        quota_guarantee(cfg)?,
        gain_sum_identity(cfg)?,
        mmr_extremes(cfg)?,
        submodularity(cfg)?,
    ])
}
