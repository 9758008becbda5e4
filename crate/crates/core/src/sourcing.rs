//! Per-recipe sourcing tickets: the nearest matching producer for every
//! ingredient, and the food-mile total with each supplier counted once.

use std::collections::{BTreeMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::ProducerKey;
use crate::engine::{Engine, QueryOptions};
use crate::error::{CoreError, Result};
use crate::geo::{GeoPoint, Metric, Miles};
use crate::ingest::Recipe;
use crate::matcher::MatchResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TicketLine {
    pub ingredient: String,
    pub producer_id: String,
    pub producer_name: String,
    pub producer_address: String,
    /// Raw text of the first matching product field of the chosen producer.
    pub product_offered: String,
    pub distance: Miles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcingTicket {
    pub site: GeoPoint,
    pub recipe_id: Option<String>,
    pub metric: Metric,
    pub max_radius: Option<Miles>,
    pub lines: Vec<TicketLine>,
    /// Ingredients with no matching producer (within the radius, if any).
    pub missing: Vec<String>,
    pub total_food_miles: Miles,
}

/// Sum of distances over distinct suppliers, in first-appearance order.
pub fn unique_supplier_total<K, I>(lines: I) -> Miles
where
    K: Eq + Hash,
    I: IntoIterator<Item = (K, Miles)>,
{
    let mut seen = HashSet::new();
    let mut total = Miles::ZERO;
    for (key, distance) in lines {
        if seen.insert(key) {
            total += distance;
        }
    }
    total
}

/// Trimmed, lowercased phrases with repeats removed, keeping first occurrence.
pub fn dedup_ingredients<S: AsRef<str>>(ingredients: &[S]) -> Vec<String> {
    let mut seen = HashSet::new();
    ingredients
        .iter()
        .map(|s| s.as_ref().trim().to_lowercase())
        .filter(|s| !s.is_empty() && seen.insert(s.clone()))
        .collect()
}

pub fn source_recipe(engine: &Engine, site: GeoPoint, recipe: &Recipe, opts: QueryOptions) -> Result<SourcingTicket> {
    source_ingredients(engine, site, Some(&recipe.id), &recipe.ingredients, opts)
}

/// Sources a free-form ingredient list.
pub fn source_ingredients<S: AsRef<str>>(
    engine: &Engine,
    site: GeoPoint,
    recipe_id: Option<&str>,
    ingredients: &[S],
    opts: QueryOptions,
) -> Result<SourcingTicket> {
    let phrases = dedup_ingredients(ingredients);
    if phrases.is_empty() {
        return Err(CoreError::EmptyRecipe);
    }
    let catalog = engine.catalog();
    let mut lines = Vec::new();
    let mut missing = Vec::new();
    for phrase in phrases {
        let matched = engine.match_ingredient(&phrase);
        match engine.nearest_match(site, &matched, opts) {
            Some(nearest) => {
                let producer = catalog.get(nearest.key);
                let field = matched.field_of(nearest.key).expect("nearest is drawn from the match set");
                lines.push(TicketLine {
                    ingredient: phrase,
                    producer_id: producer.id.clone(),
                    producer_name: producer.name.clone(),
                    producer_address: producer.address.clone(),
                    product_offered: field.text(producer).to_string(),
                    distance: nearest.distance,
                });
            }
            None => missing.push(phrase),
        }
    }
    let total_food_miles = unique_supplier_total(lines.iter().map(|l| (l.producer_id.as_str(), l.distance)));
    Ok(SourcingTicket {
        site,
        recipe_id: recipe_id.map(str::to_string),
        metric: opts.metric,
        max_radius: opts.max_radius,
        lines,
        missing,
        total_food_miles,
    })
}

/// Match sets for every ingredient on the ticket, sourced or missing.
pub fn ticket_candidates(engine: &Engine, ticket: &SourcingTicket) -> Vec<MatchResult> {
    ticket
        .lines
        .iter()
        .map(|l| l.ingredient.as_str())
        .chain(ticket.missing.iter().map(String::as_str))
        .map(|phrase| engine.match_ingredient(phrase))
        .collect()
}

pub const SITE_COLOR: &str = "#2ca02c";
pub const CANDIDATE_COLOR: &str = "#808080";
pub const NEAREST_COLOR: &str = "#1f77b4";

fn point_geometry(p: GeoPoint) -> Value {
    json!({ "type": "Point", "coordinates": [p.lon(), p.lat()] })
}

/// Map of a ticket as an RFC 7946 FeatureCollection.
///
/// Features, in order: the site (`role: "site"`); then for each candidate
/// producer within the ticket's radius, a point (`role: "nearest"` for chosen
/// suppliers, otherwise `"candidate"`) followed by a LineString edge
/// (`role: "edge"`) to the site. Coordinates are `[lon, lat]`.
pub fn ticket_to_geojson(ticket: &SourcingTicket, candidates: &[MatchResult], engine: &Engine) -> Value {
    let catalog = engine.catalog();
    let chosen: HashSet<&str> = ticket.lines.iter().map(|l| l.producer_id.as_str()).collect();

    let mut by_producer: BTreeMap<ProducerKey, Vec<&str>> = BTreeMap::new();
    for m in candidates {
        for k in m.keys() {
            let list = by_producer.entry(k).or_default();
            if !list.contains(&m.ingredient.as_str()) {
                list.push(&m.ingredient);
            }
        }
    }

    let mut features = vec![json!({
        "type": "Feature",
        "geometry": point_geometry(ticket.site),
        "properties": {
            "role": "site",
            "marker-color": SITE_COLOR,
            "recipe_id": ticket.recipe_id,
            "total_food_miles": ticket.total_food_miles,
            "missing": ticket.missing,
        }
    })];

    for (key, ingredients) in by_producer {
        let producer = catalog.get(key);
        let distance = engine.distance_to(ticket.site, key, ticket.metric);
        if ticket.max_radius.is_some_and(|r| distance > r) {
            continue;
        }
        let nearest = chosen.contains(producer.id.as_str());
        let supplies: Vec<&str> = ticket
            .lines
            .iter()
            .filter(|l| l.producer_id == producer.id)
            .map(|l| l.ingredient.as_str())
            .collect();
        features.push(json!({
            "type": "Feature",
            "geometry": point_geometry(producer.location),
            "properties": {
                "role": if nearest { "nearest" } else { "candidate" },
                "marker-color": if nearest { NEAREST_COLOR } else { CANDIDATE_COLOR },
                "producer_id": producer.id,
                "name": producer.name,
                "address": producer.address,
                "ingredients": ingredients,
                "supplies": supplies,
                "distance_miles": distance,
            }
        }));
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [
                    [ticket.site.lon(), ticket.site.lat()],
                    [producer.location.lon(), producer.location.lat()],
                ],
            },
            "properties": {
                "role": "edge",
                "stroke": CANDIDATE_COLOR,
                "producer_id": producer.id,
                "address": producer.address,
                "ingredients": ingredients,
                "nearest": nearest,
                "distance_miles": distance,
            }
        }));
    }

    json!({ "type": "FeatureCollection", "features": features })
}

pub const TICKET_HEADERS: [&str; 5] =
    ["ingredient", "supplier", "Product offered by supplier", "Distance in miles", "Total food miles"];

fn tsv_cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Tab-separated ticket table; distances to one decimal, the total repeated
/// on every line.
pub fn render_ticket_text(ticket: &SourcingTicket) -> String {
    let mut out = TICKET_HEADERS.join("\t");
    out.push('\n');
    let total = format!("{:.1}", ticket.total_food_miles.value());
    for line in &ticket.lines {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.1}\t{}\n",
            tsv_cell(&line.ingredient),
            tsv_cell(&line.producer_address),
            tsv_cell(&line.product_offered),
            line.distance.value(),
            total
        ));
    }
    out
}

/// One row of [`producers_for`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProducerHit {
    pub producer_id: String,
    pub name: String,
    pub address: String,
    pub product_offered: String,
    pub distance_miles: Miles,
}

/// All producers matching `ingredient`, nearest first (ties by id), at most `limit`.
pub fn producers_for(engine: &Engine, ingredient: &str, site: GeoPoint, metric: Metric, limit: usize) -> Vec<ProducerHit> {
    let matched = engine.match_ingredient(ingredient);
    let mut hits: Vec<(Miles, ProducerKey)> =
        matched.matches.iter().map(|m| (engine.distance_to(site, m.producer, metric), m.producer)).collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    hits.truncate(limit);
    hits.into_iter()
        .map(|(distance, key)| {
            let p = engine.catalog().get(key);
            ProducerHit {
                producer_id: p.id.clone(),
                name: p.name.clone(),
                address: p.address.clone(),
                product_offered: matched.field_of(key).map(|f| f.text(p).to_string()).unwrap_or_default(),
                distance_miles: distance,
            }
        })
        .collect()
}
