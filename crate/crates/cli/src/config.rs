use std::path::{Path, PathBuf};

use foodmiles_core::ingest::{Delimiter, ProducerColumns, SiteColumns};
use foodmiles_core::{Metric, Miles};
use serde::Deserialize;

use crate::Failure;

pub const DEFAULT_CUISINE: &str = "American";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

/// Settings from an optional TOML file. Relative paths resolve against the
/// file's directory. Command-line flags and `FOODMILES_*` variables win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub producers_path: Option<PathBuf>,
    pub recipes_path: Option<PathBuf>,
    pub sites_path: Option<PathBuf>,
    pub geocode_cache_path: Option<PathBuf>,
    pub metric: Option<Metric>,
    pub max_radius_miles: Option<f64>,
    pub recipe_delimiter: Option<Delimiter>,
    /// Cuisine label to keep; `any` keeps every recipe.
    pub cuisine: Option<String>,
    pub listen: Option<String>,
    pub cors_origin: Option<String>,
    pub producer_columns: ProducerColumns,
    pub site_columns: SiteColumns,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Config =
            toml::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.producers_path, &mut cfg.recipes_path, &mut cfg.sites_path, &mut cfg.geocode_cache_path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn metric(&self) -> Metric {
        self.metric.unwrap_or_default()
    }

    pub fn max_radius(&self) -> Result<Option<Miles>, Failure> {
        self.max_radius_miles
            .map(|r| Miles::new(r).map_err(|_| Failure::usage("max radius must be a non-negative number")))
            .transpose()
    }

    pub fn cuisine(&self) -> Option<&str> {
        match self.cuisine.as_deref() {
            None => Some(DEFAULT_CUISINE),
            Some(c) if c.eq_ignore_ascii_case("any") => None,
            Some(c) => Some(c),
        }
    }

    pub fn listen(&self) -> &str {
        self.listen.as_deref().unwrap_or(DEFAULT_LISTEN)
    }
}
