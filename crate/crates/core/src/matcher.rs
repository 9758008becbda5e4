//! Word-level ingredient matching against producer product descriptions.
//!
//! Text is lowercased, non-letters become separators, and each word has a
//! small plural suffix folded off. A producer matches a phrase when a single
//! product field contains every token of the phrase.

use std::collections::HashMap;

use serde::Serialize;

use crate::catalog::{Catalog, ProducerKey};
use crate::ingest::Producer;

/// The three product-description fields of a producer, in match priority order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    CatName,
    Category,
    ItemList,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::CatName, Field::Category, Field::ItemList];

    pub fn text(self, producer: &Producer) -> &str {
        match self {
            Field::CatName => &producer.cat_name,
            Field::Category => &producer.category,
            Field::ItemList => &producer.item_list,
        }
    }

    /// Source column name.
    pub fn column(self) -> &'static str {
        match self {
            Field::CatName => "ci_nopCatName",
            Field::Category => "ci_nopCategory",
            Field::ItemList => "ci_itemList",
        }
    }
}

/// Folds a lowercase word to its singular form with a minimal suffix scheme.
pub fn fold_plural(word: &str) -> String {
    let n = word.len();
    if n > 4 && word.ends_with("ies") {
        return format!("{}y", &word[..n - 3]);
    }
    if n > 3 && word.ends_with("es") {
        let stem = &word[..n - 2];
        if ["ss", "x", "z", "ch", "sh", "o"].iter().any(|s| stem.ends_with(s)) {
            return stem.to_string();
        }
    }
    if n > 2 && word.ends_with('s') && !word.ends_with("ss") {
        return word[..n - 1].to_string();
    }
    word.to_string()
}

/// Lowercases, replaces everything but letters with spaces, folds plurals and
/// joins words with single spaces.
pub fn normalize(text: &str) -> String {
    tokens(text).join(" ")
}

/// Normalized words of `text`, in order, duplicates kept.
pub fn tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(fold_plural)
        .collect()
}

/// Sorted, duplicate-free normalized words.
pub fn token_set(text: &str) -> Vec<String> {
    let mut t = tokens(text);
    t.sort_unstable();
    t.dedup();
    t
}

/// Inverted index from normalized token to producer keys, one per field.
#[derive(Clone, Debug, Default)]
pub struct TokenIndex {
    postings: [HashMap<String, Vec<ProducerKey>>; 3],
    producers: usize,
}

impl TokenIndex {
    pub fn build(catalog: &Catalog) -> Self {
        let mut postings: [HashMap<String, Vec<ProducerKey>>; 3] = Default::default();
        // keys are visited in ascending order, so each list stays sorted
        for (key, producer) in catalog.producers().iter().enumerate() {
            for (field, map) in Field::ALL.iter().zip(postings.iter_mut()) {
                for token in token_set(field.text(producer)) {
                    map.entry(token).or_default().push(key as ProducerKey);
                }
            }
        }
        Self { postings, producers: catalog.len() }
    }

    pub fn postings(&self, field: Field, token: &str) -> &[ProducerKey] {
        self.postings[field as usize].get(token).map_or(&[], Vec::as_slice)
    }

    pub fn vocabulary_len(&self, field: Field) -> usize {
        self.postings[field as usize].len()
    }

    pub fn producer_count(&self) -> usize {
        self.producers
    }

    pub fn is_empty(&self) -> bool {
        self.postings.iter().all(HashMap::is_empty)
    }

    /// Producers having every token in one field.
    pub fn match_tokens(&self, tokens: &[String]) -> Vec<Match> {
        if tokens.is_empty() {
            return Vec::new();
        }
        let mut found = Vec::new();
        for field in Field::ALL {
            let mut lists: Vec<&[ProducerKey]> = tokens.iter().map(|t| self.postings(field, t)).collect();
            lists.sort_by_key(|l| l.len());
            let (first, rest) = lists.split_first().expect("tokens non-empty");
            found.extend(
                first
                    .iter()
                    .filter(|k| rest.iter().all(|l| l.binary_search(k).is_ok()))
                    .map(|&producer| Match { producer, field }),
            );
        }
        // stable: the earliest field wins for each producer
        found.sort_by_key(|m| m.producer);
        found.dedup_by_key(|m| m.producer);
        found
    }
}

pub fn build_index(catalog: &Catalog) -> TokenIndex {
    TokenIndex::build(catalog)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Match {
    pub producer: ProducerKey,
    /// First field, in [`Field::ALL`] order, containing every token.
    pub field: Field,
}

/// Producers matching one ingredient phrase, ascending by key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub ingredient: String,
    pub matches: Vec<Match>,
}

impl MatchResult {
    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn keys(&self) -> Vec<ProducerKey> {
        self.matches.iter().map(|m| m.producer).collect()
    }

    pub fn field_of(&self, key: ProducerKey) -> Option<Field> {
        self.matches.binary_search_by_key(&key, |m| m.producer).ok().map(|i| self.matches[i].field)
    }
}

pub fn match_ingredient(phrase: &str, index: &TokenIndex) -> MatchResult {
    MatchResult { ingredient: phrase.to_string(), matches: index.match_tokens(&token_set(phrase)) }
}
