use std::collections::HashMap;

use crate::error::{CoreError, Result};
use crate::ingest::Producer;

/// Position of a producer inside a [`Catalog`]. Positions follow ascending
/// producer id, so comparing keys is the same as comparing ids.
pub type ProducerKey = u32;

/// Producers sorted by id, with unique ids.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    producers: Vec<Producer>,
    by_id: HashMap<String, ProducerKey>,
}

impl Catalog {
    pub fn new(mut producers: Vec<Producer>) -> Result<Self> {
        producers.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = producers.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(CoreError::DuplicateId(w[0].id.clone()));
        }
        let by_id = producers.iter().enumerate().map(|(i, p)| (p.id.clone(), i as ProducerKey)).collect();
        Ok(Self { producers, by_id })
    }

    pub fn len(&self) -> usize {
        self.producers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.producers.is_empty()
    }

    #[inline]
    pub fn get(&self, key: ProducerKey) -> &Producer {
        &self.producers[key as usize]
    }

    pub fn key_of(&self, id: &str) -> Option<ProducerKey> {
        self.by_id.get(id).copied()
    }

    pub fn producers(&self) -> &[Producer] {
        &self.producers
    }
}
