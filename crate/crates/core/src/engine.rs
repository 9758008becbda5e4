use crate::catalog::{Catalog, ProducerKey};
use crate::error::Result;
use crate::geo::{GeoPoint, Metric, Miles};
use crate::ingest::Producer;
use crate::matcher::{match_ingredient, MatchResult, TokenIndex};
use crate::spatial::{Nearest, SpatialIndex};

/// A producer catalog with its token index and one spatial index per metric.
#[derive(Clone, Debug)]
pub struct Engine {
    catalog: Catalog,
    tokens: TokenIndex,
    greatcircle: SpatialIndex,
    planar: SpatialIndex,
}

/// Metric and optional search radius for a query.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct QueryOptions {
    pub metric: Metric,
    pub max_radius: Option<Miles>,
}

impl QueryOptions {
    pub fn new(metric: Metric, max_radius: Option<Miles>) -> Self {
        Self { metric, max_radius }
    }
}

impl Engine {
    pub fn new(producers: Vec<Producer>) -> Result<Self> {
        Ok(Self::from_catalog(Catalog::new(producers)?))
    }

    pub fn from_catalog(catalog: Catalog) -> Self {
        let points: Vec<GeoPoint> = catalog.producers().iter().map(|p| p.location).collect();
        Self {
            tokens: TokenIndex::build(&catalog),
            greatcircle: SpatialIndex::build(&points, Metric::Greatcircle),
            planar: SpatialIndex::build(&points, Metric::Planar),
            catalog,
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn tokens(&self) -> &TokenIndex {
        &self.tokens
    }

    pub fn spatial(&self, metric: Metric) -> &SpatialIndex {
        match metric {
            Metric::Greatcircle => &self.greatcircle,
            Metric::Planar => &self.planar,
        }
    }

    pub fn match_ingredient(&self, phrase: &str) -> MatchResult {
        match_ingredient(phrase, &self.tokens)
    }

    /// Nearest matched producer, or `None` when nothing matches or the
    /// nearest match is outside the radius.
    pub fn nearest_match(&self, site: GeoPoint, matched: &MatchResult, opts: QueryOptions) -> Option<Nearest> {
        if matched.is_empty() {
            return None;
        }
        self.spatial(opts.metric).nearest(site, Some(&matched.keys()), opts.max_radius).ok()
    }

    pub fn distance_to(&self, site: GeoPoint, key: ProducerKey, metric: Metric) -> Miles {
        metric.distance(site, self.catalog.get(key).location)
    }
}
