//! Food-mile sourcing and recipe recommendation.
//!
//! Recipes are connected to the nearest certified-organic producer of each
//! ingredient, and ranked by the total distance their ingredients travel to a
//! production site, each supplier counted once.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod geo;
pub mod ingest;
pub mod matcher;
pub mod recommender;
pub mod sourcing;
pub mod spatial;

pub use catalog::{Catalog, ProducerKey};
pub use engine::{Engine, QueryOptions};
pub use error::{CoreError, Result};
pub use geo::{great_circle_miles, in_conterminous_us, planar_degree_miles, GeoPoint, Metric, Miles};
pub use ingest::{Parsed, Producer, Recipe, Reject, Site};
pub use matcher::{build_index, match_ingredient, normalize, Field, MatchResult, TokenIndex};
pub use recommender::{
    recommend, recommend_with_cache, warm_cache, IngredientDistanceCache, MissingPolicy, RecommendOptions,
    RecommendOutput, RecommendStats, Recommendation,
};
pub use sourcing::{
    producers_for, render_ticket_text, source_ingredients, source_recipe, ticket_candidates, ticket_to_geojson,
    ProducerHit, SourcingTicket, TicketLine,
};
pub use spatial::{build_spatial, Nearest, SpatialIndex};
