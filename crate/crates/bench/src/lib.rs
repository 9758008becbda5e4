//! Seeded synthetic catalogs and recipe sets shared by the benchmarks.

use foodmiles_core::{GeoPoint, Producer, Recipe};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FOODS: &[&str] = &[
    "salt", "pepper", "butter", "sugar", "flour", "egg", "milk", "garlic", "onion", "oil", "olive", "cheese", "cream",
    "tomato", "lemon", "chicken", "beef", "pork", "rice", "bean", "corn", "potato", "carrot", "celery", "parsley",
    "basil", "thyme", "honey", "apple", "berry", "peach", "ginger", "yeast", "oat", "wheat", "mushroom", "spinach",
    "kale", "squash", "yogurt", "walnut", "pecan", "almond", "turkey", "lamb", "dill", "sage", "mint", "lentil", "pea",
];
pub const MODIFIERS: &[&str] = &["fresh", "dried", "ground", "whole", "organic", "raw", "smoked", "sweet", "red", "green"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn us_point(rng: &mut impl Rng) -> GeoPoint {
    GeoPoint::new(rng.gen_range(25.0..49.0), rng.gen_range(-124.0..-67.5)).expect("in range")
}

pub fn phrase(rng: &mut impl Rng) -> String {
    let food = *FOODS.choose(rng).unwrap();
    if rng.gen_bool(0.3) {
        format!("{} {food}", MODIFIERS.choose(rng).unwrap())
    } else {
        food.to_string()
    }
}

pub fn producers(rng: &mut impl Rng, n: usize) -> Vec<Producer> {
    (0..n)
        .map(|i| Producer {
            id: format!("op-{i:06}"),
            name: format!("Farm {i}"),
            address: format!("{i} County Road"),
            cat_name: "Crops".into(),
            category: String::new(),
            item_list: (0..rng.gen_range(1..=8)).map(|_| phrase(rng)).collect::<Vec<_>>().join(", "),
            location: us_point(rng),
        })
        .collect()
}

pub fn recipes(rng: &mut impl Rng, n: usize) -> Vec<Recipe> {
    (1..=n)
        .map(|i| Recipe {
            id: format!("recipe-{i}"),
            name: None,
            cuisine: "American".into(),
            ingredients: (0..rng.gen_range(3..=14)).map(|_| phrase(rng)).collect(),
        })
        .collect()
}
