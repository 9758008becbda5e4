//! Top-k recipe ranking by total food miles at one site.
//!
//! Nearest-supplier lookups depend only on the ingredient's token set, so a
//! per-site cache keyed by normalized phrase answers every recipe in the
//! corpus with one spatial query per distinct phrase.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::ProducerKey;
use crate::engine::{Engine, QueryOptions};
use crate::error::{CoreError, Result};
use crate::geo::{GeoPoint, Miles};
use crate::ingest::Recipe;
use crate::matcher::{token_set, MatchResult};
use crate::sourcing::{dedup_ingredients, source_recipe, unique_supplier_total};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Drop recipes with any unsourced ingredient.
    #[default]
    #[serde(alias = "exclude")]
    ExcludeIncomplete,
    /// Rank by the sourced ingredients only and report the missing count.
    #[serde(alias = "allow")]
    AllowIncomplete,
}

impl std::str::FromStr for MissingPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exclude" | "exclude-incomplete" => Ok(MissingPolicy::ExcludeIncomplete),
            "allow" | "allow-incomplete" => Ok(MissingPolicy::AllowIncomplete),
            other => Err(format!("unknown policy {other:?} (expected exclude or allow)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub recipe_id: String,
    pub total_food_miles: Miles,
    pub sourced_count: usize,
    pub missing_count: usize,
}

/// Nearest supplier per phrase key (see [`phrase_key`]) for one (site, catalog, metric,
/// radius) context. `None` records a phrase with no supplier.
#[derive(Clone, Debug)]
pub struct IngredientDistanceCache {
    site: GeoPoint,
    opts: QueryOptions,
    entries: HashMap<String, Option<(ProducerKey, Miles)>>,
    spatial_queries: usize,
}

impl IngredientDistanceCache {
    pub fn site(&self) -> GeoPoint {
        self.site
    }

    pub fn options(&self) -> QueryOptions {
        self.opts
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Spatial index queries issued while warming.
    pub fn spatial_queries(&self) -> usize {
        self.spatial_queries
    }

    pub fn get(&self, normalized: &str) -> Option<Option<(ProducerKey, Miles)>> {
        self.entries.get(normalized).copied()
    }

    /// Overwrites an entry. Entries are trusted as-is by [`recommend_with_cache`].
    pub fn insert(&mut self, normalized: String, value: Option<(ProducerKey, Miles)>) {
        self.entries.insert(normalized, value);
    }
}

/// Cache key: the phrase's sorted, duplicate-free normalized tokens.
pub fn phrase_key(phrase: &str) -> String {
    token_set(phrase).join(" ")
}

fn resolve(engine: &Engine, site: GeoPoint, key: &str, opts: QueryOptions) -> (Option<(ProducerKey, Miles)>, bool) {
    let tokens: Vec<String> = key.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
    let matched = MatchResult { ingredient: key.to_string(), matches: engine.tokens().match_tokens(&tokens) };
    if matched.is_empty() {
        return (None, false);
    }
    (engine.nearest_match(site, &matched, opts).map(|n| (n.key, n.distance)), true)
}

/// Resolves each distinct normalized phrase once.
pub fn warm_cache<'a, I>(engine: &Engine, site: GeoPoint, phrases: I, opts: QueryOptions) -> IngredientDistanceCache
where
    I: IntoIterator<Item = &'a str>,
{
    let mut cache = IngredientDistanceCache { site, opts, entries: HashMap::new(), spatial_queries: 0 };
    for phrase in phrases {
        let key = phrase_key(phrase);
        if cache.entries.contains_key(&key) {
            continue;
        }
        let (value, queried) = resolve(engine, site, &key, opts);
        cache.spatial_queries += usize::from(queried);
        cache.entries.insert(key, value);
    }
    cache
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RecommendOptions {
    pub k: usize,
    pub policy: MissingPolicy,
    pub query: QueryOptions,
    /// Score recipes from a per-site phrase cache instead of sourcing each one.
    pub memoize: bool,
}

impl Default for RecommendOptions {
    fn default() -> Self {
        Self { k: 10, policy: MissingPolicy::default(), query: QueryOptions::default(), memoize: true }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RecommendStats {
    pub recipes_scored: usize,
    pub eligible: usize,
    pub distinct_phrases: usize,
    pub spatial_queries: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecommendOutput {
    pub recommendations: Vec<Recommendation>,
    pub stats: RecommendStats,
}

fn rank(mut scored: Vec<Recommendation>, policy: MissingPolicy, k: usize) -> Result<Vec<Recommendation>> {
    if policy == MissingPolicy::ExcludeIncomplete {
        scored.retain(|r| r.missing_count == 0);
    }
    if scored.is_empty() {
        return Err(CoreError::NoEligibleRecipe);
    }
    scored.par_sort_unstable_by(|a, b| {
        a.total_food_miles.total_cmp(&b.total_food_miles).then_with(|| a.recipe_id.cmp(&b.recipe_id))
    });
    scored.truncate(k);
    Ok(scored)
}

fn score_cached(engine: &Engine, recipe: &Recipe, cache: &IngredientDistanceCache) -> Recommendation {
    let mut sourced = Vec::new();
    let mut missing_count = 0;
    for phrase in dedup_ingredients(&recipe.ingredients) {
        let key = phrase_key(&phrase);
        let hit = cache.get(&key).unwrap_or_else(|| resolve(engine, cache.site, &key, cache.opts).0);
        match hit {
            Some(found) => sourced.push(found),
            None => missing_count += 1,
        }
    }
    Recommendation {
        recipe_id: recipe.id.clone(),
        total_food_miles: unique_supplier_total(sourced.iter().copied()),
        sourced_count: sourced.len(),
        missing_count,
    }
}

/// Ranks with an existing cache. Recipes are scored in parallel and merged by
/// a total order, so output does not depend on scheduling.
pub fn recommend_with_cache(
    engine: &Engine,
    recipes: &[Recipe],
    k: usize,
    policy: MissingPolicy,
    cache: &IngredientDistanceCache,
) -> Result<Vec<Recommendation>> {
    if k == 0 {
        return Err(CoreError::InvalidK);
    }
    let scored: Vec<Recommendation> = recipes.par_iter().map(|r| score_cached(engine, r, cache)).collect();
    rank(scored, policy, k)
}

pub fn recommend(engine: &Engine, site: GeoPoint, recipes: &[Recipe], opts: &RecommendOptions) -> Result<RecommendOutput> {
    if opts.k == 0 {
        return Err(CoreError::InvalidK);
    }
    if opts.memoize {
        let phrases: Vec<String> = recipes.iter().flat_map(|r| dedup_ingredients(&r.ingredients)).collect();
        let cache = warm_cache(engine, site, phrases.iter().map(String::as_str), opts.query);
        let scored: Vec<Recommendation> = recipes.par_iter().map(|r| score_cached(engine, r, &cache)).collect();
        let eligible = count_eligible(&scored, opts.policy);
        let recommendations = rank(scored, opts.policy, opts.k)?;
        return Ok(RecommendOutput {
            recommendations,
            stats: RecommendStats {
                recipes_scored: recipes.len(),
                eligible,
                distinct_phrases: cache.len(),
                spatial_queries: cache.spatial_queries(),
            },
        });
    }

    let scored: Vec<Recommendation> = recipes
        .par_iter()
        .map(|r| {
            let ticket = source_recipe(engine, site, r, opts.query)?;
            Ok(Recommendation {
                recipe_id: r.id.clone(),
                total_food_miles: ticket.total_food_miles,
                sourced_count: ticket.lines.len(),
                missing_count: ticket.missing.len(),
            })
        })
        .collect::<Result<_>>()?;
    let eligible = count_eligible(&scored, opts.policy);
    let queries = scored.iter().map(|r| r.sourced_count + r.missing_count).sum();
    let recommendations = rank(scored, opts.policy, opts.k)?;
    Ok(RecommendOutput {
        recommendations,
        stats: RecommendStats { recipes_scored: recipes.len(), eligible, distinct_phrases: 0, spatial_queries: queries },
    })
}

fn count_eligible(scored: &[Recommendation], policy: MissingPolicy) -> usize {
    match policy {
        MissingPolicy::ExcludeIncomplete => scored.iter().filter(|r| r.missing_count == 0).count(),
        MissingPolicy::AllowIncomplete => scored.len(),
    }
}
