#![allow(dead_code)]

use foodmiles_core::geo::EARTH_RADIUS_MILES;
use foodmiles_core::matcher::{token_set, Field};
use foodmiles_core::{GeoPoint, Metric, Producer, Recipe};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VOCAB: &[&str] = &[
    "milk", "egg", "basil", "tomato", "wheat", "yeast", "butter", "cheese", "apple", "berry", "corn", "oat",
    "olive", "oil", "garlic", "onion", "honey", "yogurt", "cream", "bean", "rice", "pepper", "carrot", "potato",
];

pub fn pt(lat: f64, lon: f64) -> GeoPoint {
    GeoPoint::new(lat, lon).unwrap()
}

pub fn random_us_point<R: Rng>(rng: &mut R) -> GeoPoint {
    pt(rng.gen_range(25.0..49.0), rng.gen_range(-124.0..-67.5))
}

/// Point `miles` due north of `from`; great-circle distance along a meridian is exact.
pub fn north_of(from: GeoPoint, miles: f64) -> GeoPoint {
    pt(from.lat() + (miles / EARTH_RADIUS_MILES).to_degrees(), from.lon())
}

fn random_text<R: Rng>(rng: &mut R, max_words: usize) -> String {
    let n = rng.gen_range(0..=max_words);
    let words: Vec<String> = (0..n)
        .map(|_| {
            let w = *VOCAB.choose(rng).unwrap();
            // mix plural and case variants so normalization is exercised
            match rng.gen_range(0..4) {
                0 => format!("{w}s"),
                1 => w.to_uppercase(),
                _ => w.to_string(),
            }
        })
        .collect();
    words.join(if rng.gen_bool(0.5) { " " } else { ", " })
}

pub fn random_producers<R: Rng>(rng: &mut R, n: usize) -> Vec<Producer> {
    (0..n)
        .map(|i| {
            let mut p = Producer {
                id: format!("op-{i:05}"),
                name: format!("Farm {i}"),
                address: format!("{i} County Road"),
                cat_name: random_text(rng, 2),
                category: if rng.gen_bool(0.2) { random_text(rng, 1) } else { String::new() },
                item_list: random_text(rng, 5),
                location: random_us_point(rng),
            };
            if p.cat_name.is_empty() && p.item_list.is_empty() {
                p.item_list = VOCAB.choose(rng).unwrap().to_string();
            }
            p
        })
        .collect()
}

pub fn random_phrase<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=2);
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

pub fn random_recipes<R: Rng>(rng: &mut R, n: usize) -> Vec<Recipe> {
    (1..=n)
        .map(|i| Recipe {
            id: format!("recipe-{i}"),
            name: None,
            cuisine: "American".into(),
            ingredients: (0..rng.gen_range(1..=6)).map(|_| random_phrase(rng)).collect(),
        })
        .collect()
}

/// Brute-force match: does one field of `p` contain every token of `phrase`?
pub fn scan_matches(phrase: &str, p: &Producer) -> Option<Field> {
    let want = token_set(phrase);
    if want.is_empty() {
        return None;
    }
    Field::ALL.into_iter().find(|f| {
        let have = token_set(f.text(p));
        want.iter().all(|t| have.contains(t))
    })
}

/// Linear-scan nearest with smallest-id tie-break. `producers` indexes by key.
pub fn scan_nearest(site: GeoPoint, producers: &[&Producer], metric: Metric) -> Option<(String, f64)> {
    let mut best: Option<(String, f64)> = None;
    for p in producers {
        let d = metric.distance(site, p.location).value();
        let better = match &best {
            None => true,
            Some((id, bd)) => d < *bd || (d == *bd && p.id < *id),
        };
        if better {
            best = Some((p.id.clone(), d));
        }
    }
    best
}
