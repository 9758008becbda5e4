//! Dataset loading: organic producers, recipes and supermarket sites.
//!
//! Every parser reports rows it could not use instead of dropping them, so
//! `records.len() + rejects.len()` always equals the number of data rows read.
//! Geographic pruning to the conterminous states is a separate step
//! ([`filter_conterminous`]) so its drop count can be reported on its own.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geo::{in_conterminous_us, GeoPoint};

/// One certified-organic operation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Producer {
    pub id: String,
    pub name: String,
    pub address: String,
    /// Source column `ci_nopCatName`.
    pub cat_name: String,
    /// Source column `ci_nopCategory`.
    pub category: String,
    /// Source column `ci_itemList`.
    pub item_list: String,
    pub location: GeoPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub id: String,
    pub name: Option<String>,
    pub cuisine: String,
    pub ingredients: Vec<String>,
}

/// A recipe production site (the supermarket dataset).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: String,
    pub address: String,
    pub location: GeoPoint,
}

/// Records with a coordinate.
pub trait Located {
    fn location(&self) -> GeoPoint;
}

impl Located for Producer {
    fn location(&self) -> GeoPoint {
        self.location
    }
}

impl Located for Site {
    fn location(&self) -> GeoPoint {
        self.location
    }
}

impl Located for GeoPoint {
    fn location(&self) -> GeoPoint {
        *self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// 1-based line number in the source file.
    pub line: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub rejects: Vec<Reject>,
    /// Blank lines skipped (recipe files only).
    pub skipped_blank: usize,
}

impl<T> Parsed<T> {
    fn new() -> Self {
        Self { records: Vec::new(), rejects: Vec::new(), skipped_blank: 0 }
    }
}

/// Header names for the producer CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProducerColumns {
    /// Operation identifier; rows fall back to `producer-<row>` when the
    /// column is absent from the header.
    pub id: String,
    pub name: String,
    pub address: String,
    pub cat_name: String,
    pub category: String,
    pub item_list: String,
    pub latitude: String,
    pub longitude: String,
}

impl Default for ProducerColumns {
    fn default() -> Self {
        Self {
            id: "id".into(),
            name: "name".into(),
            address: "address".into(),
            cat_name: "ci_nopCatName".into(),
            category: "ci_nopCategory".into(),
            item_list: "ci_itemList".into(),
            latitude: "latitude".into(),
            longitude: "longitude".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SiteColumns {
    pub id: String,
    pub address: String,
    pub latitude: String,
    pub longitude: String,
}

impl Default for SiteColumns {
    fn default() -> Self {
        Self { id: "id".into(), address: "address".into(), latitude: "lat".into(), longitude: "lon".into() }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CoreError::FileNotFound(path.to_path_buf()),
        _ => CoreError::Io(e),
    })
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| CoreError::MissingColumn(name.to_string()))
}

enum Coordinate {
    Point(GeoPoint),
    Blank,
}

fn parse_coordinate(lat: &str, lon: &str) -> std::result::Result<Coordinate, String> {
    let (lat, lon) = (lat.trim(), lon.trim());
    if lat.is_empty() && lon.is_empty() {
        return Ok(Coordinate::Blank);
    }
    let lat: f64 = lat.parse().map_err(|_| format!("malformed latitude {lat:?}"))?;
    let lon: f64 = lon.parse().map_err(|_| format!("malformed longitude {lon:?}"))?;
    GeoPoint::new(lat, lon).map(Coordinate::Point).map_err(|e| e.to_string())
}

fn locate(
    lat: &str,
    lon: &str,
    address: &str,
    geocoder: Option<&Geocoder>,
) -> std::result::Result<GeoPoint, String> {
    match parse_coordinate(lat, lon)? {
        Coordinate::Point(p) => Ok(p),
        Coordinate::Blank => match geocoder {
            Some(g) => g.geocode(address).map_err(|e| e.to_string()),
            None => Err("missing coordinates".to_string()),
        },
    }
}

pub fn parse_producers(
    path: impl AsRef<Path>,
    columns: &ProducerColumns,
    geocoder: Option<&Geocoder>,
) -> Result<Parsed<Producer>> {
    read_producers(open(path.as_ref())?, columns, geocoder)
}

pub fn read_producers<R: Read>(
    reader: R,
    columns: &ProducerColumns,
    geocoder: Option<&Geocoder>,
) -> Result<Parsed<Producer>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let id_col = column(&headers, &columns.id).ok();
    let name = column(&headers, &columns.name)?;
    let address = column(&headers, &columns.address)?;
    let cat_name = column(&headers, &columns.cat_name)?;
    let category = column(&headers, &columns.category)?;
    let item_list = column(&headers, &columns.item_list)?;
    let lat = column(&headers, &columns.latitude)?;
    let lon = column(&headers, &columns.longitude)?;

    let mut out = Parsed::new();
    let mut seen = HashSet::new();
    for (row, record) in rdr.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(row as u64 + 2, |p| p.line());
                out.rejects.push(Reject { line, reason: e.to_string() });
                continue;
            }
        };
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();

        let id = match id_col.map(field) {
            Some(id) if !id.is_empty() => id,
            _ => format!("producer-{}", row + 1),
        };
        let producer_address = field(address);
        let location = match locate(&field(lat), &field(lon), &producer_address, geocoder) {
            Ok(p) => p,
            Err(reason) => {
                out.rejects.push(Reject { line, reason });
                continue;
            }
        };
        let producer = Producer {
            id,
            name: field(name),
            address: producer_address,
            cat_name: field(cat_name),
            category: field(category),
            item_list: field(item_list),
            location,
        };
        if producer.cat_name.is_empty() && producer.category.is_empty() && producer.item_list.is_empty() {
            out.rejects.push(Reject { line, reason: "no product description".into() });
            continue;
        }
        if !seen.insert(producer.id.clone()) {
            out.rejects.push(Reject { line, reason: format!("duplicate id {}", producer.id) });
            continue;
        }
        out.records.push(producer);
    }
    Ok(out)
}

/// Writes producers with the default column names, readable by [`read_producers`].
pub fn write_producers<W: Write>(writer: W, producers: &[Producer]) -> Result<()> {
    let c = ProducerColumns::default();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([&c.id, &c.name, &c.address, &c.cat_name, &c.category, &c.item_list, &c.latitude, &c.longitude])?;
    for p in producers {
        w.write_record([
            p.id.as_str(),
            &p.name,
            &p.address,
            &p.cat_name,
            &p.category,
            &p.item_list,
            &p.location.lat().to_string(),
            &p.location.lon().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_sites(
    path: impl AsRef<Path>,
    columns: &SiteColumns,
    geocoder: Option<&Geocoder>,
) -> Result<Parsed<Site>> {
    read_sites(open(path.as_ref())?, columns, geocoder)
}

pub fn read_sites<R: Read>(reader: R, columns: &SiteColumns, geocoder: Option<&Geocoder>) -> Result<Parsed<Site>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let mut out = Parsed::new();
    // a zero-byte file has no header at all
    if rdr.headers()?.is_empty() {
        return Ok(out);
    }
    let headers = rdr.headers()?.clone();
    let id_col = column(&headers, &columns.id).ok();
    let address = column(&headers, &columns.address)?;
    let lat = column(&headers, &columns.latitude)?;
    let lon = column(&headers, &columns.longitude)?;

    for (row, record) in rdr.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(row as u64 + 2, |p| p.line());
                out.rejects.push(Reject { line, reason: e.to_string() });
                continue;
            }
        };
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let id = match id_col.map(field) {
            Some(id) if !id.is_empty() => id,
            _ => format!("site-{}", row + 1),
        };
        let site_address = field(address);
        match locate(&field(lat), &field(lon), &site_address, geocoder) {
            Ok(location) => out.records.push(Site { id, address: site_address, location }),
            Err(reason) => out.rejects.push(Reject { line, reason }),
        }
    }
    Ok(out)
}

/// Field separator of a recipe file.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    Tab,
    Comma,
}

impl Delimiter {
    fn as_char(self) -> char {
        match self {
            Delimiter::Tab => '\t',
            Delimiter::Comma => ',',
        }
    }

    fn detect(line: &str) -> Self {
        if line.contains('\t') {
            Delimiter::Tab
        } else {
            Delimiter::Comma
        }
    }
}

impl std::str::FromStr for Delimiter {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tab" | "\\t" | "tsv" => Ok(Delimiter::Tab),
            "comma" | "," | "csv" => Ok(Delimiter::Comma),
            other => Err(CoreError::UnknownDelimiter(other.to_string())),
        }
    }
}

/// One recipe per line: cuisine label, then ingredient phrases. Lines starting
/// with `#` are comments. Ids are `recipe-<line number>`.
pub fn parse_recipes(path: impl AsRef<Path>, delimiter: Option<Delimiter>) -> Result<Parsed<Recipe>> {
    read_recipes(BufReader::new(open(path.as_ref())?), delimiter)
}

pub fn read_recipes<R: BufRead>(reader: R, delimiter: Option<Delimiter>) -> Result<Parsed<Recipe>> {
    let mut out = Parsed::new();
    let mut delimiter = delimiter;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx as u64 + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            out.skipped_blank += 1;
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        // a single-field line carries no delimiter evidence
        if delimiter.is_none() && (trimmed.contains('\t') || trimmed.contains(',')) {
            delimiter = Some(Delimiter::detect(trimmed));
        }
        let sep = delimiter.unwrap_or(Delimiter::Tab).as_char();
        let mut fields = trimmed.split(sep).map(str::trim);
        let cuisine = fields.next().unwrap_or_default().to_string();
        let ingredients: Vec<String> =
            fields.filter(|f| !f.is_empty()).map(str::to_lowercase).collect();
        if cuisine.is_empty() {
            out.rejects.push(Reject { line: line_no, reason: "missing cuisine label".into() });
        } else if ingredients.is_empty() {
            out.rejects.push(Reject { line: line_no, reason: "no ingredients".into() });
        } else {
            out.records.push(Recipe { id: format!("recipe-{line_no}"), name: None, cuisine, ingredients });
        }
    }
    Ok(out)
}

pub fn write_recipes<W: Write>(mut writer: W, recipes: &[Recipe]) -> Result<()> {
    for r in recipes {
        writeln!(writer, "{}\t{}", r.cuisine, r.ingredients.join("\t"))?;
    }
    Ok(())
}

/// Keeps recipes whose cuisine label matches, ignoring ASCII case.
pub fn filter_cuisine(recipes: Vec<Recipe>, cuisine: &str) -> (Vec<Recipe>, usize) {
    let before = recipes.len();
    let kept: Vec<_> = recipes.into_iter().filter(|r| r.cuisine.eq_ignore_ascii_case(cuisine)).collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Splits records into those inside the conterminous-US box and a drop count.
pub fn filter_conterminous<T: Located>(items: Vec<T>) -> (Vec<T>, usize) {
    let before = items.len();
    let kept: Vec<T> = items.into_iter().filter(|r| in_conterminous_us(r.location())).collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Outcome of loading one dataset: usable records plus what was set aside.
#[derive(Clone, Debug, PartialEq)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub rejects: Vec<Reject>,
    /// Records removed by the conterminous-US or cuisine filter.
    pub dropped: usize,
    pub skipped_blank: usize,
}

/// Parses producers and keeps those inside the conterminous US.
pub fn load_producers(
    path: impl AsRef<Path>,
    columns: &ProducerColumns,
    geocoder: Option<&Geocoder>,
) -> Result<Loaded<Producer>> {
    let parsed = parse_producers(path, columns, geocoder)?;
    let (records, dropped) = filter_conterminous(parsed.records);
    Ok(Loaded { records, rejects: parsed.rejects, dropped, skipped_blank: 0 })
}

pub fn load_sites(path: impl AsRef<Path>, columns: &SiteColumns, geocoder: Option<&Geocoder>) -> Result<Loaded<Site>> {
    let parsed = parse_sites(path, columns, geocoder)?;
    let (records, dropped) = filter_conterminous(parsed.records);
    Ok(Loaded { records, rejects: parsed.rejects, dropped, skipped_blank: 0 })
}

/// Parses recipes, keeping only `cuisine` when given.
pub fn load_recipes(
    path: impl AsRef<Path>,
    delimiter: Option<Delimiter>,
    cuisine: Option<&str>,
) -> Result<Loaded<Recipe>> {
    let parsed = parse_recipes(path, delimiter)?;
    let (records, dropped) = match cuisine {
        Some(c) => filter_cuisine(parsed.records, c),
        None => (parsed.records, 0),
    };
    Ok(Loaded { records, rejects: parsed.rejects, dropped, skipped_blank: parsed.skipped_blank })
}

/// Canonical cache key: lowercase with runs of whitespace collapsed.
pub fn normalize_address(address: &str) -> String {
    address.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// External address resolver, e.g. a web geocoding API.
pub trait GeocodeResolver: Send + Sync {
    fn resolve(&self, address: &str) -> std::result::Result<GeoPoint, String>;
}

impl<F> GeocodeResolver for F
where
    F: Fn(&str) -> std::result::Result<GeoPoint, String> + Send + Sync,
{
    fn resolve(&self, address: &str) -> std::result::Result<GeoPoint, String> {
        self(address)
    }
}

/// Address to coordinate cache, optionally backed by an append-only CSV file
/// with columns `normalized_address,lat,lon`.
#[derive(Debug, Default)]
pub struct GeocodeCache {
    entries: RwLock<HashMap<String, GeoPoint>>,
    file: Option<Mutex<PathBuf>>,
}

const CACHE_HEADER: &str = "normalized_address,lat,lon";

impl GeocodeCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads the cache file, creating it if absent. Later rows win.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut entries = HashMap::new();
        if path.exists() {
            let mut rdr = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
            for record in rdr.records() {
                let record = record?;
                if let (Some(addr), Some(lat), Some(lon)) = (record.get(0), record.get(1), record.get(2)) {
                    if let (Ok(lat), Ok(lon)) = (lat.trim().parse(), lon.trim().parse()) {
                        entries.insert(normalize_address(addr), GeoPoint::new(lat, lon)?);
                    }
                }
            }
        } else {
            let mut f = File::create(path)?;
            writeln!(f, "{CACHE_HEADER}")?;
        }
        Ok(Self { entries: RwLock::new(entries), file: Some(Mutex::new(path.to_path_buf())) })
    }

    pub fn get(&self, address: &str) -> Option<GeoPoint> {
        self.entries.read().unwrap().get(&normalize_address(address)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores a point and appends it to the backing file as one write.
    pub fn insert(&self, address: &str, point: GeoPoint) -> Result<()> {
        let key = normalize_address(address);
        if let Some(file) = &self.file {
            let path = file.lock().unwrap();
            let mut buf = Vec::new();
            {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
                w.write_record([key.as_str(), &point.lat().to_string(), &point.lon().to_string()])?;
                w.flush()?;
            }
            let mut f = OpenOptions::new().append(true).create(true).open(&*path)?;
            f.write_all(&buf)?;
            f.sync_data()?;
        }
        self.entries.write().unwrap().insert(key, point);
        Ok(())
    }
}

/// Cache-first lookup; the resolver is consulted only on a miss.
pub fn geocode(address: &str, cache: &GeocodeCache, resolver: Option<&dyn GeocodeResolver>) -> Result<GeoPoint> {
    if address.trim().is_empty() {
        return Err(CoreError::EmptyAddress);
    }
    if let Some(p) = cache.get(address) {
        return Ok(p);
    }
    let resolver = resolver.ok_or_else(|| CoreError::CacheMissNoResolver(address.to_string()))?;
    let point = resolver
        .resolve(address)
        .map_err(|cause| CoreError::ResolverFailure { address: address.to_string(), cause })?;
    cache.insert(address, point)?;
    Ok(point)
}

/// A cache plus an optional resolver.
#[derive(Default)]
pub struct Geocoder {
    pub cache: GeocodeCache,
    pub resolver: Option<Box<dyn GeocodeResolver>>,
}

impl Geocoder {
    pub fn new(cache: GeocodeCache, resolver: Option<Box<dyn GeocodeResolver>>) -> Self {
        Self { cache, resolver }
    }

    pub fn geocode(&self, address: &str) -> Result<GeoPoint> {
        geocode(address, &self.cache, self.resolver.as_deref())
    }
}
