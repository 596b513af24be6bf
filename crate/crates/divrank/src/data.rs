//! Dataset ingestion, train/test splitting, user-profile construction, and a
//! regularized latent-factor rating predictor.
//!
//! The ingestion boundary speaks the MovieLens-1M layout: `::`-separated
//! rating lines and `|`-separated genre lists, with ISO-8859-1 tolerated in
//! titles.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metrics::GenreVector;
use crate::types::{GroundSet, TopicCatalog, UserProfile};
use crate::{Error, Result};

/// The 18 genres of the MovieLens-1M catalog, in its documented order.
pub const MOVIELENS_GENRES: [&str; 18] = [
    "Action",
    "Adventure",
    "Animation",
    "Children's",
    "Comedy",
    "Crime",
    "Documentary",
    "Drama",
    "Fantasy",
    "Film-Noir",
    "Horror",
    "Musical",
    "Mystery",
    "Romance",
    "Sci-Fi",
    "Thriller",
    "War",
    "Western",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rating {
    pub user: u32,
    pub item: u32,
    pub stars: u8,
    pub timestamp: i64,
}

/// Star-rating triples with unique (user, item) pairs.
#[derive(Debug, Clone, Default)]
pub struct RatingsTable {
    rows: Vec<Rating>,
}

impl RatingsTable {
    pub fn new(rows: Vec<Rating>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &rows {
            if !(1..=5).contains(&r.stars) {
                return Err(Error::InvalidInput(format!(
                    "rating {} outside 1..=5 for user {} item {}",
                    r.stars, r.user, r.item
                )));
            }
            if !seen.insert((r.user, r.item)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate rating for user {} item {}",
                    r.user, r.item
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Rating] {
        &self.rows
    }

    /// Row indices grouped by user, in user-id order.
    pub fn by_user(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut map: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            map.entry(r.user).or_default().push(i);
        }
        map
    }

    pub fn user_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.user)
            .collect::<HashSet<_>>()
            .len()
    }

    /// Keeps only users with at least `min_ratings` ratings.
    pub fn filter_active_users(&self, min_ratings: usize) -> RatingsTable {
        let by_user = self.by_user();
        let keep: HashSet<u32> = by_user
            .iter()
            .filter(|(_, rows)| rows.len() >= min_ratings)
            .map(|(&u, _)| u)
            .collect();
        RatingsTable {
            rows: self
                .rows
                .iter()
                .filter(|r| keep.contains(&r.user))
                .copied()
                .collect(),
        }
    }
}

/// Keeps only users with at least `min_ratings` ratings.
pub fn filter_active_users(table: &RatingsTable, min_ratings: usize) -> RatingsTable {
    table.filter_active_users(min_ratings)
}

/// Everything parsed from a MovieLens-style dataset.
#[derive(Debug, Clone)]
pub struct MovieLensData {
    pub ratings: RatingsTable,
    pub catalog: TopicCatalog,
    pub ground: GroundSet,
    pub genres: Vec<GenreVector>,
    index: HashMap<u32, usize>,
}

impl MovieLensData {
    /// Assembles a dataset from already-built pieces. Item ids in `ground`
    /// must be decimal movie ids.
    pub fn from_parts(
        ratings: RatingsTable,
        catalog: TopicCatalog,
        ground: GroundSet,
        genres: Vec<GenreVector>,
    ) -> Result<Self> {
        if genres.len() != ground.len() {
            return Err(Error::InvalidInput(format!(
                "{} genre vectors for {} items",
                genres.len(),
                ground.len()
            )));
        }
        let mut index = HashMap::new();
        for i in 0..ground.len() {
            let id: u32 = ground.item_id(i).parse().map_err(|_| {
                Error::InvalidInput(format!("item id {:?} is not a movie id", ground.item_id(i)))
            })?;
            index.insert(id, i);
        }
        Ok(Self {
            ratings,
            catalog,
            ground,
            genres,
            index,
        })
    }

    /// Ground-set index of a movie id, if the movies file listed it.
    pub fn item_index(&self, movie_id: u32) -> Option<usize> {
        self.index.get(&movie_id).copied()
    }
}

fn decode_latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

fn parse_error(file: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        file: file.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parses MovieLens-1M `ratings.dat` and `movies.dat`. Genre names outside
/// the 18-genre catalog are ignored, leaving such movies with whatever known
/// genres remain (possibly none). Malformed lines fail with their line
/// number.
pub fn parse_movielens(ratings_path: &Path, movies_path: &Path) -> Result<MovieLensData> {
    let catalog = TopicCatalog::new(MOVIELENS_GENRES)?;

    let movie_bytes = std::fs::read(movies_path)?;
    let mut item_ids = Vec::new();
    let mut incidence = Vec::new();
    let mut names = Vec::new();
    let mut index = HashMap::new();
    for (lineno, raw) in movie_bytes.split(|&b| b == b'\n').enumerate() {
        let line = decode_latin1(raw);
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let mut parts = line.splitn(3, "::");
        let id_str = parts.next().unwrap();
        let title = parts
            .next()
            .ok_or_else(|| parse_error(movies_path, lineno, "missing title field"))?;
        let genre_field = parts
            .next()
            .ok_or_else(|| parse_error(movies_path, lineno, "missing genre field"))?;
        let movie_id: u32 = id_str
            .parse()
            .map_err(|_| parse_error(movies_path, lineno, format!("bad movie id {id_str:?}")))?;
        if index.contains_key(&movie_id) {
            return Err(parse_error(
                movies_path,
                lineno,
                format!("duplicate movie id {movie_id}"),
            ));
        }
        let topics: Vec<usize> = genre_field
            .split('|')
            .filter_map(|g| catalog.index_of(g.trim()))
            .collect();
        index.insert(movie_id, item_ids.len());
        item_ids.push(movie_id.to_string());
        incidence.push(topics);
        names.push(title.to_string());
    }
    let ground = GroundSet::with_names(item_ids, incidence, &catalog, Some(names))?;
    let genres: Vec<GenreVector> = (0..ground.len())
        .map(|i| GenreVector::new(ground.genre_vector(i)))
        .collect::<Result<_>>()?;

    let rating_bytes = std::fs::read(ratings_path)?;
    let mut rows = Vec::new();
    for (lineno, raw) in rating_bytes.split(|&b| b == b'\n').enumerate() {
        let line = decode_latin1(raw);
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let fields: Vec<&str> = line.split("::").collect();
        if fields.len() != 4 {
            return Err(parse_error(
                ratings_path,
                lineno,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let user: u32 = fields[0]
            .parse()
            .map_err(|_| parse_error(ratings_path, lineno, "bad user id"))?;
        let item: u32 = fields[1]
            .parse()
            .map_err(|_| parse_error(ratings_path, lineno, "bad movie id"))?;
        let stars: u8 = fields[2]
            .parse()
            .map_err(|_| parse_error(ratings_path, lineno, "bad rating"))?;
        if !(1..=5).contains(&stars) {
            return Err(parse_error(
                ratings_path,
                lineno,
                format!("rating {stars} outside 1..=5"),
            ));
        }
        let timestamp: i64 = fields[3]
            .parse()
            .map_err(|_| parse_error(ratings_path, lineno, "bad timestamp"))?;
        rows.push(Rating {
            user,
            item,
            stars,
            timestamp,
        });
    }
    let ratings = RatingsTable::new(rows).map_err(|e| match e {
        Error::InvalidInput(msg) => parse_error(ratings_path, 0, msg),
        other => other,
    })?;

    Ok(MovieLensData {
        ratings,
        catalog,
        ground,
        genres,
        index,
    })
}

/// Per-user partition of table rows into train and test halves.
#[derive(Debug, Clone)]
pub struct SplitPlan {
    pub seed: u64,
    /// (user, train row indices, test row indices), in user-id order.
    pub users: Vec<(u32, Vec<usize>, Vec<usize>)>,
    /// Users excluded for having fewer than 3 ratings.
    pub excluded: Vec<u32>,
}

fn user_rng(seed: u64, user: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ u64::from(user))
}

/// Splits each user's ratings uniformly at random into train and test with a
/// 2:1 ratio, taking `ceil(2n/3)` for training. Deterministic under `seed`.
pub fn split(table: &RatingsTable, seed: u64) -> SplitPlan {
    let mut users = Vec::new();
    let mut excluded = Vec::new();
    for (user, mut rows) in table.by_user() {
        if rows.len() < 3 {
            excluded.push(user);
            continue;
        }
        let mut rng = user_rng(seed, user);
        rows.shuffle(&mut rng);
        let train_len = (2 * rows.len()).div_ceil(3);
        let test = rows.split_off(train_len);
        let mut train = rows;
        train.sort_unstable();
        let mut test = test;
        test.sort_unstable();
        users.push((user, train, test));
    }
    SplitPlan {
        seed,
        users,
        excluded,
    }
}

/// Builds a user's topic profile from the training movies.
///
/// Genre popularity is the count of each genre over the train movies
/// (one per genre per movie, or `1/g` per genre when `fractional` is set),
/// normalized to a distribution. Ten draws from that distribution give the
/// preference weights `r_t` as empirical frequencies, and quotas are
/// `floor(r_t * k)`.
pub fn build_profile(
    train_items: &[usize],
    ground: &GroundSet,
    k: usize,
    seed: u64,
    fractional: bool,
) -> Result<UserProfile> {
    if train_items.is_empty() {
        return Err(Error::InvalidInput(
            "cannot build a profile from an empty train set".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidInput("list length must be >= 1".into()));
    }
    let m = ground.topic_count();
    let mut counts = vec![0.0_f64; m];
    for &item in train_items {
        let topics = ground.topics_of(item);
        if topics.is_empty() {
            continue;
        }
        let w = if fractional {
            1.0 / topics.len() as f64
        } else {
            1.0
        };
        for &t in topics {
            counts[t] += w;
        }
    }
    let total: f64 = counts.iter().sum();
    if total == 0.0 {
        // no genre information at all; degenerate all-zero profile
        return UserProfile::new(vec![0.0; m], vec![0; m], k);
    }
    let probs: Vec<f64> = counts.iter().map(|c| c / total).collect();

    const DRAWS: usize = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw_counts = vec![0usize; m];
    for _ in 0..DRAWS {
        let x: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        let mut chosen = m - 1;
        for (t, &p) in probs.iter().enumerate() {
            acc += p;
            if x < acc {
                chosen = t;
                break;
            }
        }
        draw_counts[chosen] += 1;
    }
    let weights: Vec<f64> = draw_counts
        .iter()
        .map(|&c| c as f64 / DRAWS as f64)
        .collect();
    UserProfile::from_weights(weights, k)
}

/// Like [`build_profile`], with the draw seed derived from a run seed and a
/// user id so each user's sampling differs within one run.
pub fn build_profile_for_user(
    train_items: &[usize],
    ground: &GroundSet,
    k: usize,
    seed: u64,
    user: u32,
    fractional: bool,
) -> Result<UserProfile> {
    let mixed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(u64::from(user));
    build_profile(train_items, ground, k, mixed, fractional)
}

/// Biased latent-factor rating model fit by SGD.
#[derive(Debug, Clone)]
pub struct FactorModel {
    pub dimension: usize,
    pub global_mean: f64,
    pub train_rmse: f64,
    user_bias: HashMap<u32, f64>,
    item_bias: HashMap<u32, f64>,
    user_factors: HashMap<u32, Vec<f64>>,
    item_factors: HashMap<u32, Vec<f64>>,
}

/// Fits biases and factors minimizing squared error with quadratic
/// regularization, via SGD with a seeded per-epoch shuffle. All parameters
/// are checked finite every epoch.
pub fn fit_factors(
    train: &RatingsTable,
    dimension: usize,
    regularization: f64,
    iterations: usize,
    seed: u64,
) -> Result<FactorModel> {
    if train.is_empty() {
        return Err(Error::InvalidInput("empty training table".into()));
    }
    if dimension == 0 {
        return Err(Error::InvalidInput("factor dimension must be >= 1".into()));
    }
    if iterations == 0 {
        return Err(Error::InvalidInput("iteration count must be >= 1".into()));
    }
    let rows = train.rows();
    let global_mean = rows.iter().map(|r| f64::from(r.stars)).sum::<f64>() / rows.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut user_bias: HashMap<u32, f64> = HashMap::new();
    let mut item_bias: HashMap<u32, f64> = HashMap::new();
    let mut user_factors: HashMap<u32, Vec<f64>> = HashMap::new();
    let mut item_factors: HashMap<u32, Vec<f64>> = HashMap::new();
    let init = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dimension)
            .map(|_| (rng.gen::<f64>() - 0.5) * 2e-3)
            .collect()
    };
    for r in rows {
        user_bias.entry(r.user).or_insert(0.0);
        item_bias.entry(r.item).or_insert(0.0);
    }
    // deterministic init order: sorted ids
    let mut user_ids: Vec<u32> = user_bias.keys().copied().collect();
    user_ids.sort_unstable();
    for u in &user_ids {
        user_factors.insert(*u, init(&mut rng));
    }
    let mut item_ids: Vec<u32> = item_bias.keys().copied().collect();
    item_ids.sort_unstable();
    for i in &item_ids {
        item_factors.insert(*i, init(&mut rng));
    }

    let lr = 0.01;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut sse = 0.0;
    for _ in 0..iterations {
        order.shuffle(&mut rng);
        sse = 0.0;
        for &idx in &order {
            let r = &rows[idx];
            let bu = user_bias[&r.user];
            let bi = item_bias[&r.item];
            let pu = user_factors.get_mut(&r.user).unwrap();
            // take the item factor out to satisfy the borrow checker
            let mut qi = item_factors.remove(&r.item).unwrap();
            let dot: f64 = pu.iter().zip(&qi).map(|(p, q)| p * q).sum();
            let pred = global_mean + bu + bi + dot;
            let err = f64::from(r.stars) - pred;
            sse += err * err;
            user_bias.insert(r.user, bu + lr * (err - regularization * bu));
            item_bias.insert(r.item, bi + lr * (err - regularization * bi));
            for (p, q) in pu.iter_mut().zip(qi.iter_mut()) {
                let p0 = *p;
                *p += lr * (err * *q - regularization * p0);
                *q += lr * (err * p0 - regularization * *q);
            }
            item_factors.insert(r.item, qi);
        }
        let finite = user_bias.values().all(|v| v.is_finite())
            && item_bias.values().all(|v| v.is_finite())
            && user_factors.values().flatten().all(|v| v.is_finite())
            && item_factors.values().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput(
                "factor model diverged to non-finite parameters".into(),
            ));
        }
    }
    let train_rmse = (sse / rows.len() as f64).sqrt();

    Ok(FactorModel {
        dimension,
        global_mean,
        train_rmse,
        user_bias,
        item_bias,
        user_factors,
        item_factors,
    })
}

impl FactorModel {
    /// Predicted rating, clamped to `[1, 5]`. Unseen users or items fall
    /// back to whatever biases are available, then to the global mean.
    pub fn predict(&self, user: u32, item: u32) -> f64 {
        let bu = self.user_bias.get(&user).copied().unwrap_or(0.0);
        let bi = self.item_bias.get(&item).copied().unwrap_or(0.0);
        let dot = match (self.user_factors.get(&user), self.item_factors.get(&item)) {
            (Some(p), Some(q)) => p.iter().zip(q).map(|(a, b)| a * b).sum(),
            _ => 0.0,
        };
        (self.global_mean + bu + bi + dot).clamp(1.0, 5.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content).unwrap();
        f
    }

    #[test]
    fn parse_well_formed_files() {
        let movies = write_temp(
            b"1::Toy Story (1995)::Animation|Children's|Comedy\n2::GoldenEye (1995)::Action|Adventure|Thriller\n",
        );
        let ratings = write_temp(b"1::1193::5::978300760\n1::2::3::978300761\n");
        // 1193 is rated but not in the movies file; the rating is kept
        let data = parse_movielens(ratings.path(), movies.path()).unwrap();
        assert_eq!(data.ratings.len(), 2);
        assert_eq!(data.ratings.rows()[0].stars, 5);
        assert_eq!(data.ground.len(), 2);
        assert_eq!(data.ground.topics_of(0).len(), 3);
        assert_eq!(data.item_index(2), Some(1));
        assert_eq!(data.item_index(999), None);
    }

    #[test]
    fn parse_rejects_out_of_range_rating() {
        let movies = write_temp(b"1::A::Action\n");
        let ratings = write_temp(b"1::1::6::978300760\n");
        let err = parse_movielens(ratings.path(), movies.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_ignores_unknown_genres() {
        let movies = write_temp(b"7::Odd::NotAGenre|Comedy\n8::Unknown::NotAGenre\n");
        let ratings = write_temp(b"");
        let data = parse_movielens(ratings.path(), movies.path()).unwrap();
        assert_eq!(data.ground.topics_of(0).len(), 1);
        assert!(data.ground.topics_of(1).is_empty());
    }

    #[test]
    fn parse_tolerates_latin1_titles() {
        let movies = write_temp(b"10::Am\xe9lie (2001)::Comedy|Romance\n");
        let ratings = write_temp(b"");
        let data = parse_movielens(ratings.path(), movies.path()).unwrap();
        assert_eq!(data.ground.name(0), Some("Am\u{e9}lie (2001)"));
    }

    fn synthetic_table(users: u32, items_per_user: u32) -> RatingsTable {
        let mut rows = Vec::new();
        for u in 1..=users {
            for i in 1..=items_per_user {
                rows.push(Rating {
                    user: u,
                    item: i,
                    stars: 1 + ((u + i) % 5) as u8,
                    timestamp: 0,
                });
            }
        }
        RatingsTable::new(rows).unwrap()
    }

    #[test]
    fn filtering_by_activity() {
        let t = synthetic_table(3, 5);
        assert_eq!(filter_active_users(&t, 0).len(), t.len());
        assert_eq!(filter_active_users(&t, 5).len(), t.len());
        assert!(filter_active_users(&t, 6).is_empty());
    }

    #[test]
    fn split_ratio_and_determinism() {
        let t = synthetic_table(2, 9);
        let plan = split(&t, 7);
        for (_, train, test) in &plan.users {
            assert_eq!(train.len(), 6);
            assert_eq!(test.len(), 3);
            let overlap: HashSet<_> = train.iter().collect();
            assert!(test.iter().all(|i| !overlap.contains(i)));
        }
        let again = split(&t, 7);
        assert_eq!(plan.users, again.users);
        let other = split(&t, 8);
        assert_ne!(plan.users, other.users);
    }

    #[test]
    fn split_rounds_train_up() {
        let t = synthetic_table(1, 10);
        let plan = split(&t, 1);
        assert_eq!(plan.users[0].1.len(), 7);
        assert_eq!(plan.users[0].2.len(), 3);
    }

    #[test]
    fn split_excludes_tiny_users() {
        let t = RatingsTable::new(vec![
            Rating {
                user: 1,
                item: 1,
                stars: 3,
                timestamp: 0,
            },
            Rating {
                user: 1,
                item: 2,
                stars: 4,
                timestamp: 0,
            },
            Rating {
                user: 2,
                item: 1,
                stars: 3,
                timestamp: 0,
            },
            Rating {
                user: 2,
                item: 2,
                stars: 3,
                timestamp: 0,
            },
            Rating {
                user: 2,
                item: 3,
                stars: 3,
                timestamp: 0,
            },
        ])
        .unwrap();
        let plan = split(&t, 0);
        assert_eq!(plan.excluded, vec![1]);
        assert_eq!(plan.users.len(), 1);
    }

    fn single_genre_ground(genre_per_item: &[usize], topics: usize) -> GroundSet {
        let catalog = TopicCatalog::new((0..topics).map(|t| format!("G{t}"))).unwrap();
        let ids = (0..genre_per_item.len()).map(|i| i.to_string()).collect();
        let rows = genre_per_item.iter().map(|&t| vec![t]).collect();
        GroundSet::new(ids, rows, &catalog).unwrap()
    }

    #[test]
    fn profile_degenerate_single_genre() {
        let ground = single_genre_ground(&[0, 0, 0], 3);
        let p = build_profile(&[0, 1, 2], &ground, 10, 42, false).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0, 0.0]);
        assert_eq!(p.quotas(), &[10, 0, 0]);
    }

    #[test]
    fn profile_is_reproducible_and_bounded() {
        let ground = single_genre_ground(&[0, 1, 2, 1, 0, 2, 2, 1], 3);
        let a = build_profile(&[0, 1, 2, 3, 4, 5, 6, 7], &ground, 10, 5, false).unwrap();
        let b = build_profile(&[0, 1, 2, 3, 4, 5, 6, 7], &ground, 5, 5, false).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert!((a.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(a.quotas().iter().sum::<usize>() <= 10);
        assert!(b.quotas().iter().sum::<usize>() <= 5);
    }

    #[test]
    fn profile_rejects_empty_train() {
        let ground = single_genre_ground(&[0], 1);
        assert!(build_profile(&[], &ground, 10, 1, false).is_err());
    }

    #[test]
    fn factors_recover_rank_one_structure() {
        // noise-free ratings from known factors; held-out recovery
        let mut rows = Vec::new();
        let mut held_out = Vec::new();
        for u in 0..20u32 {
            for i in 0..20u32 {
                // exactly rank-1 interaction on top of a constant, so a
                // noise-free factor model exists
                let stars = (1 + (u % 3) * (i % 3)) as u8;
                if (u + i) % 7 == 0 {
                    held_out.push((u, i, f64::from(stars)));
                } else {
                    rows.push(Rating {
                        user: u,
                        item: i,
                        stars,
                        timestamp: 0,
                    });
                }
            }
        }
        let table = RatingsTable::new(rows).unwrap();
        let model = fit_factors(&table, 4, 0.002, 300, 9).unwrap();
        let sse: f64 = held_out
            .iter()
            .map(|&(u, i, truth)| {
                let p = model.predict(u, i);
                (p - truth) * (p - truth)
            })
            .sum();
        let rmse = (sse / held_out.len() as f64).sqrt();
        assert!(rmse < 0.05, "held-out rmse {rmse}");
    }

    #[test]
    fn single_rating_shrinks_to_itself() {
        let table = RatingsTable::new(vec![Rating {
            user: 1,
            item: 1,
            stars: 5,
            timestamp: 0,
        }])
        .unwrap();
        let model = fit_factors(&table, 2, 0.05, 100, 3).unwrap();
        assert!((model.predict(1, 1) - 5.0).abs() < 1e-3);
    }

    #[test]
    fn constant_ratings_predict_the_constant() {
        let mut rows = Vec::new();
        for u in 0..10u32 {
            for i in 0..10u32 {
                rows.push(Rating {
                    user: u,
                    item: i,
                    stars: 4,
                    timestamp: 0,
                });
            }
        }
        let table = RatingsTable::new(rows).unwrap();
        let model = fit_factors(&table, 4, 0.5, 300, 1).unwrap();
        for u in 0..10 {
            for i in 0..10 {
                assert!((model.predict(u, i) - 4.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn cold_start_falls_back_to_biases() {
        let table = synthetic_table(4, 6);
        let model = fit_factors(&table, 3, 0.05, 50, 2).unwrap();
        let unseen_item = model.predict(1, 999);
        let expected = (model.global_mean + model.user_bias[&1]).clamp(1.0, 5.0);
        assert!((unseen_item - expected).abs() < 1e-12);
        let unseen_both = model.predict(999, 999);
        assert!((unseen_both - model.global_mean.clamp(1.0, 5.0)).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_hyperparameters() {
        let table = synthetic_table(2, 4);
        assert!(fit_factors(&table, 0, 0.05, 10, 1).is_err());
        assert!(fit_factors(&table, 4, 0.05, 0, 1).is_err());
        assert!(fit_factors(&RatingsTable::default(), 4, 0.05, 10, 1).is_err());
    }
}
