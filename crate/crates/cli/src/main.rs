mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foodmiles_core::ingest::{self, Delimiter, GeocodeCache, Geocoder, Loaded, Reject};
use foodmiles_core::{
    recommend, render_ticket_text, source_ingredients, ticket_candidates, ticket_to_geojson, CoreError, Engine,
    GeoPoint, Metric, MissingPolicy, QueryOptions, Recipe, RecommendOptions,
};
use foodmiles_service::{AppState, Dataset, ServiceConfig};

use crate::config::Config;

/// A failure with the process exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    /// Bad arguments, unreadable or missing input files.
    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::FileNotFound(_)
            | CoreError::MissingColumn(_)
            | CoreError::InvalidCoordinate { .. }
            | CoreError::InvalidDistance(_)
            | CoreError::EmptyRecipe
            | CoreError::InvalidK => 2,
            CoreError::NoEligibleRecipe => 4,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(1, e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "foodmiles", version, about = "Source recipe ingredients from nearby organic producers")]
struct Cli {
    #[command(flatten)]
    data: DataArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct DataArgs {
    /// TOML config file; flags and FOODMILES_* variables override it.
    #[arg(long, global = true, env = "FOODMILES_CONFIG")]
    config: Option<PathBuf>,
    /// Producers CSV.
    #[arg(long, global = true, env = "FOODMILES_PRODUCERS")]
    producers: Option<PathBuf>,
    /// Recipes file, one recipe per line.
    #[arg(long, global = true, env = "FOODMILES_RECIPES")]
    recipes: Option<PathBuf>,
    /// Supermarket sites CSV.
    #[arg(long, global = true, env = "FOODMILES_SITES")]
    sites: Option<PathBuf>,
    /// Address geocode cache (CSV: normalized_address,lat,lon).
    #[arg(long, global = true, env = "FOODMILES_GEOCODE_CACHE")]
    geocode_cache: Option<PathBuf>,
    /// Distance metric: greatcircle or planar.
    #[arg(long, global = true, env = "FOODMILES_METRIC")]
    metric: Option<Metric>,
    /// Ignore producers farther than this many miles.
    #[arg(long, global = true, env = "FOODMILES_MAX_RADIUS")]
    max_radius: Option<f64>,
    /// Recipe file delimiter: tab or comma (auto-detected by default).
    #[arg(long, global = true, env = "FOODMILES_DELIMITER")]
    delimiter: Option<Delimiter>,
    /// Cuisine label to keep (default American; `any` keeps all).
    #[arg(long, global = true, env = "FOODMILES_CUISINE")]
    cuisine: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse all datasets and report kept, rejected and dropped counts.
    Ingest,
    /// Nearest supplier for every ingredient of one recipe.
    Ticket(TicketArgs),
    /// Rank recipes by total food miles at a site.
    Recommend(RecommendArgs),
    /// Print the producers matching each ingredient as TSV.
    Match(MatchArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct TicketArgs {
    #[arg(long, allow_hyphen_values = true)]
    lat: f64,
    #[arg(long, allow_hyphen_values = true)]
    lon: f64,
    #[arg(long, conflicts_with = "ingredients", required_unless_present = "ingredients")]
    recipe_id: Option<String>,
    /// Comma-separated ingredient phrases.
    #[arg(long)]
    ingredients: Option<String>,
    /// Write the supplier map as GeoJSON.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args)]
struct RecommendArgs {
    #[arg(long, allow_hyphen_values = true)]
    lat: f64,
    #[arg(long, allow_hyphen_values = true)]
    lon: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value = "exclude")]
    policy: MissingPolicy,
    /// Print wall-clock time and spatial query counts to stderr.
    #[arg(long)]
    stats: bool,
    /// Source every recipe independently instead of caching per phrase.
    #[arg(long)]
    no_memo: bool,
}

#[derive(Args)]
struct MatchArgs {
    /// Comma-separated ingredient phrases.
    #[arg(long)]
    ingredients: String,
}

#[derive(Args)]
struct ServeArgs {
    /// Listen address, e.g. 127.0.0.1:8080.
    #[arg(long, env = "FOODMILES_LISTEN")]
    listen: Option<String>,
    /// Allowed browser origin for CORS.
    #[arg(long, env = "FOODMILES_CORS_ORIGIN")]
    cors_origin: Option<String>,
}

fn resolve_config(args: &DataArgs) -> Result<Config, Failure> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    macro_rules! override_with {
        ($($field:ident <- $arg:expr),* $(,)?) => {
            $(if let Some(v) = $arg.clone() { cfg.$field = Some(v); })*
        };
    }
    override_with!(
        producers_path <- args.producers,
        recipes_path <- args.recipes,
        sites_path <- args.sites,
        geocode_cache_path <- args.geocode_cache,
        metric <- args.metric,
        max_radius_miles <- args.max_radius,
        recipe_delimiter <- args.delimiter,
        cuisine <- args.cuisine,
    );
    cfg.max_radius()?;
    Ok(cfg)
}

fn require<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path, Failure> {
    let path = path.as_deref().ok_or_else(|| Failure::usage(format!("no {what} file given (--{what})")))?;
    if !path.exists() {
        return Err(Failure::usage(format!("{what} file not found: {}", path.display())));
    }
    Ok(path)
}

fn geocoder(cfg: &Config) -> Result<Option<Geocoder>, Failure> {
    cfg.geocode_cache_path
        .as_ref()
        .map(|p| Ok(Geocoder::new(GeocodeCache::open(p)?, None)))
        .transpose()
}

fn report_rejects(dataset: &str, rejects: &[Reject]) {
    let mut err = std::io::stderr().lock();
    for r in rejects.iter().take(20) {
        let _ = writeln!(err, "{dataset}: line {}: {}", r.line, r.reason);
    }
    if rejects.len() > 20 {
        let _ = writeln!(err, "{dataset}: ... {} more rejected rows", rejects.len() - 20);
    }
}

fn load_producers(cfg: &Config, geo: Option<&Geocoder>) -> Result<Loaded<foodmiles_core::Producer>, Failure> {
    let path = require(&cfg.producers_path, "producers")?;
    let loaded = ingest::load_producers(path, &cfg.producer_columns, geo)?;
    report_rejects("producers", &loaded.rejects);
    Ok(loaded)
}

fn load_recipes(cfg: &Config) -> Result<Loaded<Recipe>, Failure> {
    let path = require(&cfg.recipes_path, "recipes")?;
    let loaded = ingest::load_recipes(path, cfg.recipe_delimiter, cfg.cuisine())?;
    report_rejects("recipes", &loaded.rejects);
    Ok(loaded)
}

fn load_engine(cfg: &Config) -> Result<Engine, Failure> {
    let geo = geocoder(cfg)?;
    Ok(Engine::new(load_producers(cfg, geo.as_ref())?.records)?)
}

fn site(lat: f64, lon: f64) -> Result<GeoPoint, Failure> {
    GeoPoint::new(lat, lon).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_ingest(cfg: &Config) -> Result<(), Failure> {
    require(&cfg.producers_path, "producers")?;
    require(&cfg.recipes_path, "recipes")?;
    require(&cfg.sites_path, "sites")?;
    let geo = geocoder(cfg)?;
    let producers = load_producers(cfg, geo.as_ref())?;
    let recipes = load_recipes(cfg)?;
    let sites = ingest::load_sites(require(&cfg.sites_path, "sites")?, &cfg.site_columns, geo.as_ref())?;
    report_rejects("sites", &sites.rejects);

    let mut out = std::io::stdout().lock();
    writeln!(out, "dataset\tkept\trejected\tdropped")?;
    let rows = [
        ("producers", producers.records.len(), producers.rejects.len(), producers.dropped),
        ("recipes", recipes.records.len(), recipes.rejects.len(), recipes.dropped),
        ("sites", sites.records.len(), sites.rejects.len(), sites.dropped),
    ];
    for (name, kept, rejected, dropped) in rows {
        writeln!(out, "{name}\t{kept}\t{rejected}\t{dropped}")?;
    }
    let _ = writeln!(std::io::stderr(), "{}", rows.map(|r| format!("{}: {} kept, {} rejected, {} dropped", r.0, r.1, r.2, r.3)).join("; "));
    if let Some((name, ..)) = rows.iter().find(|r| r.1 == 0) {
        return Err(Failure::new(1, format!("no usable {name}")));
    }
    Ok(())
}

fn cmd_ticket(cfg: &Config, args: &TicketArgs) -> Result<(), Failure> {
    let at = site(args.lat, args.lon)?;
    let opts = QueryOptions::new(cfg.metric(), cfg.max_radius()?);
    let ingredients: Vec<String>;
    let (recipe_id, phrases): (Option<&str>, &[String]) = match (&args.recipe_id, &args.ingredients) {
        (Some(id), _) => {
            let recipes = load_recipes(cfg)?.records;
            let recipe = recipes
                .into_iter()
                .find(|r| &r.id == id)
                .ok_or_else(|| Failure::new(3, format!("unknown recipe id {id:?}")))?;
            ingredients = recipe.ingredients;
            (Some(id.as_str()), &ingredients)
        }
        (None, Some(list)) => {
            ingredients = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            if ingredients.is_empty() {
                return Err(Failure::usage("--ingredients must name at least one ingredient"));
            }
            (None, &ingredients)
        }
        (None, None) => return Err(Failure::usage("give --recipe-id or --ingredients")),
    };
    let engine = load_engine(cfg)?;
    let ticket = source_ingredients(&engine, at, recipe_id, phrases, opts)?;

    if let Some(path) = &args.map {
        let map = ticket_to_geojson(&ticket, &ticket_candidates(&engine, &ticket), &engine);
        std::fs::write(path, serde_json::to_string_pretty(&map).expect("serializable"))?;
    }
    let mut out = std::io::stdout().lock();
    match args.format {
        Format::Tsv => out.write_all(render_ticket_text(&ticket).as_bytes())?,
        Format::Json => writeln!(out, "{}", serde_json::to_string(&ticket).expect("serializable"))?,
    }
    if !ticket.missing.is_empty() {
        let _ = writeln!(std::io::stderr(), "missing: {}", ticket.missing.join(", "));
    }
    Ok(())
}

fn cmd_recommend(cfg: &Config, args: &RecommendArgs) -> Result<(), Failure> {
    let at = site(args.lat, args.lon)?;
    if args.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let started = Instant::now();
    let engine = load_engine(cfg)?;
    let recipes = load_recipes(cfg)?.records;
    let loaded = started.elapsed();
    let opts = RecommendOptions {
        k: args.k,
        policy: args.policy,
        query: QueryOptions::new(cfg.metric(), cfg.max_radius()?),
        memoize: !args.no_memo,
    };
    let out = recommend(&engine, at, &recipes, &opts)?;
    let elapsed = started.elapsed();

    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "recipe_id\ttotal_food_miles\tsourced\tmissing")?;
    for r in &out.recommendations {
        writeln!(stdout, "{}\t{}\t{}\t{}", r.recipe_id, r.total_food_miles, r.sourced_count, r.missing_count)?;
    }
    if args.stats {
        let s = out.stats;
        let _ = writeln!(
            std::io::stderr(),
            "elapsed_ms={} load_ms={} recipes={} eligible={} distinct_phrases={} spatial_queries={}",
            elapsed.as_millis(),
            loaded.as_millis(),
            s.recipes_scored,
            s.eligible,
            s.distinct_phrases,
            s.spatial_queries
        );
    }
    Ok(())
}

fn cmd_match(cfg: &Config, args: &MatchArgs) -> Result<(), Failure> {
    let engine = load_engine(cfg)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "ingredient\tproducer_id\tfield\tproduct")?;
    for phrase in args.ingredients.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let result = engine.match_ingredient(phrase);
        for m in &result.matches {
            let p = engine.catalog().get(m.producer);
            writeln!(out, "{phrase}\t{}\t{}\t{}", p.id, m.field.column(), m.field.text(p).replace(['\t', '\n'], " "))?;
        }
    }
    Ok(())
}

fn cmd_serve(cfg: Config, args: &ServeArgs) -> Result<(), Failure> {
    let listen = args.listen.clone().unwrap_or_else(|| cfg.listen().to_string());
    require(&cfg.producers_path, "producers")?;
    require(&cfg.recipes_path, "recipes")?;
    let service = ServiceConfig { metric: cfg.metric(), cors_origin: args.cors_origin.clone().or(cfg.cors_origin.clone()) };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&listen)
            .await
            .map_err(|e| Failure::usage(format!("cannot bind {listen}: {e}")))?;
        let local = listener.local_addr()?;
        eprintln!("listening on http://{local}");

        let state = AppState::loading(service);
        let (fail_tx, mut fail_rx) = tokio::sync::mpsc::channel::<Failure>(1);
        let loader_state = state.clone();
        tokio::task::spawn_blocking(move || {
            let loaded = load_engine(&cfg).and_then(|engine| Ok(Dataset::new(engine, load_recipes(&cfg)?.records)));
            match loaded {
                Ok(data) => {
                    let counts = (data.engine.catalog().len(), data.recipes.len());
                    loader_state.set_loaded(data);
                    eprintln!("loaded {} producers, {} recipes", counts.0, counts.1);
                }
                Err(f) => {
                    let _ = fail_tx.blocking_send(f);
                }
            }
        });

        let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
        let server = tokio::spawn(foodmiles_service::serve(listener, state, async move {
            let _ = stop_rx.await;
        }));
        let outcome = tokio::select! {
            _ = tokio::signal::ctrl_c() => Ok(()),
            Some(f) = fail_rx.recv() => Err(f),
        };
        let _ = stop_tx.send(());
        server.await.map_err(|e| Failure::new(1, e.to_string()))??;
        outcome
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = resolve_config(&cli.data)?;
    match &cli.command {
        Command::Ingest => cmd_ingest(&cfg),
        Command::Ticket(args) => cmd_ticket(&cfg, args),
        Command::Recommend(args) => cmd_recommend(&cfg, args),
        Command::Match(args) => cmd_match(&cfg, args),
        Command::Serve(args) => cmd_serve(cfg, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("foodmiles: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
