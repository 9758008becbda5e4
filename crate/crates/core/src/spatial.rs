//! Exact nearest-producer search.
//!
//! Points live in a k-d tree with a bounding box per node. Great-circle
//! indexes embed points as unit vectors, where chord length grows strictly
//! with central angle, so the Euclidean distance from the query to a box gives
//! a lower bound on the haversine distance of anything inside it. Planar
//! indexes keep raw (lat, lon) boxes and bound the cos(mean lat) factor by its
//! minimum over the box. Candidates are always scored with the exact metric
//! function, so results agree with a linear scan bit for bit.

use crate::catalog::ProducerKey;
use crate::error::{CoreError, Result};
use crate::geo::{chord_to_miles, GeoPoint, Metric, Miles, MILES_PER_DEGREE};

const LEAF_SIZE: usize = 8;
const NO_CHILD: u32 = u32::MAX;

/// Candidate sets smaller than this are scanned directly.
pub const BRUTE_FORCE_CANDIDATES: usize = 64;

// Pruning slack covering rounding differences between the box bound and the
// exact metric.
const REL_SLACK: f64 = 1e-9;
const ABS_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Node {
    lo: [f64; 3],
    hi: [f64; 3],
    start: u32,
    end: u32,
    left: u32,
    right: u32,
}

/// Immutable nearest-neighbor index over producer coordinates.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    metric: Metric,
    points: Vec<GeoPoint>,
    // tree order
    order: Vec<ProducerKey>,
    coords: Vec<[f64; 3]>,
    nodes: Vec<Node>,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Nearest {
    pub key: ProducerKey,
    pub distance: Miles,
}

#[derive(Copy, Clone)]
struct Best {
    key: ProducerKey,
    miles: f64,
}

impl Best {
    #[inline]
    fn beaten_by(&self, key: ProducerKey, miles: f64) -> bool {
        miles < self.miles || (miles == self.miles && key < self.key)
    }
}

fn embed(metric: Metric, p: GeoPoint) -> [f64; 3] {
    match metric {
        Metric::Greatcircle => p.unit_vector(),
        Metric::Planar => [p.lat(), p.lon(), 0.0],
    }
}

impl SpatialIndex {
    /// Builds an index where point `i` has key `i`.
    pub fn build(points: &[GeoPoint], metric: Metric) -> Self {
        let mut index = Self {
            metric,
            points: points.to_vec(),
            order: (0..points.len() as ProducerKey).collect(),
            coords: points.iter().map(|&p| embed(metric, p)).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            let mut items: Vec<(ProducerKey, [f64; 3])> =
                index.order.iter().copied().zip(index.coords.iter().copied()).collect();
            index.build_node(&mut items, 0);
            index.order = items.iter().map(|i| i.0).collect();
            index.coords = items.iter().map(|i| i.1).collect();
        }
        index
    }

    fn build_node(&mut self, items: &mut [(ProducerKey, [f64; 3])], offset: usize) -> u32 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for (_, c) in items.iter() {
            for d in 0..3 {
                lo[d] = lo[d].min(c[d]);
                hi[d] = hi[d].max(c[d]);
            }
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo,
            hi,
            start: offset as u32,
            end: (offset + items.len()) as u32,
            left: NO_CHILD,
            right: NO_CHILD,
        });
        if items.len() > LEAF_SIZE {
            let axis = (0..3).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap();
            let mid = items.len() / 2;
            items.select_nth_unstable_by(mid, |a, b| a.1[axis].total_cmp(&b.1[axis]).then(a.0.cmp(&b.0)));
            let (left, right) = items.split_at_mut(mid);
            let l = self.build_node(left, offset);
            let r = self.build_node(right, offset + mid);
            self.nodes[id as usize].left = l;
            self.nodes[id as usize].right = r;
        }
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, key: ProducerKey) -> GeoPoint {
        self.points[key as usize]
    }

    #[inline]
    fn distance(&self, query: GeoPoint, key: ProducerKey) -> f64 {
        self.metric.distance(query, self.points[key as usize]).value()
    }

    /// Lower bound, in miles, on the distance from the query to any point in the box.
    fn lower_bound(&self, query: GeoPoint, q: &[f64; 3], node: &Node) -> f64 {
        match self.metric {
            Metric::Greatcircle => {
                let sq: f64 = (0..3)
                    .map(|d| (node.lo[d] - q[d]).max(q[d] - node.hi[d]).max(0.0))
                    .map(|gap| gap * gap)
                    .sum();
                chord_to_miles(sq.sqrt())
            }
            Metric::Planar => {
                let d_lat = (node.lo[0] - q[0]).max(q[0] - node.hi[0]).max(0.0);
                let d_lon = (node.lo[1] - q[1]).max(q[1] - node.hi[1]).max(0.0);
                let m0 = ((query.lat() + node.lo[0]) * 0.5).to_radians().cos();
                let m1 = ((query.lat() + node.hi[0]) * 0.5).to_radians().cos();
                let c = m0.min(m1).max(0.0);
                (d_lat * d_lat + (d_lon * c) * (d_lon * c)).sqrt() * MILES_PER_DEGREE
            }
        }
    }

    fn search(
        &self,
        node: u32,
        query: GeoPoint,
        q: &[f64; 3],
        candidates: Option<&[ProducerKey]>,
        limit: f64,
        best: &mut Option<Best>,
    ) {
        let n = &self.nodes[node as usize];
        if n.left == NO_CHILD {
            for &key in &self.order[n.start as usize..n.end as usize] {
                if candidates.is_some_and(|c| c.binary_search(&key).is_err()) {
                    continue;
                }
                let miles = self.distance(query, key);
                if best.is_none_or(|b| b.beaten_by(key, miles)) {
                    *best = Some(Best { key, miles });
                }
            }
            return;
        }
        let (l, r) = (n.left, n.right);
        let lb_l = self.lower_bound(query, q, &self.nodes[l as usize]);
        let lb_r = self.lower_bound(query, q, &self.nodes[r as usize]);
        let visits = if lb_l <= lb_r { [(l, lb_l), (r, lb_r)] } else { [(r, lb_r), (l, lb_l)] };
        for (child, lb) in visits {
            let bound = best.map_or(limit, |b| b.miles.min(limit));
            if lb > bound * (1.0 + REL_SLACK) + ABS_SLACK {
                continue;
            }
            self.search(child, query, q, candidates, limit, best);
        }
    }

    /// Closest point to `query`, restricted to the sorted key set `candidates`
    /// when given. Ties go to the smallest key.
    pub fn nearest(
        &self,
        query: GeoPoint,
        candidates: Option<&[ProducerKey]>,
        max_radius: Option<Miles>,
    ) -> Result<Nearest> {
        if self.is_empty() {
            return Err(CoreError::EmptyIndex);
        }
        let best = match candidates {
            Some(c) if c.len() < BRUTE_FORCE_CANDIDATES => self.scan(query, c),
            Some(c) => {
                debug_assert!(c.windows(2).all(|w| w[0] < w[1]), "candidates must be sorted");
                let mut best = None;
                self.search(0, query, &embed(self.metric, query), Some(c), f64::INFINITY, &mut best);
                best
            }
            None => {
                let mut best = None;
                self.search(0, query, &embed(self.metric, query), None, f64::INFINITY, &mut best);
                best
            }
        };
        let best = best.ok_or(CoreError::NoCandidateInIndex)?;
        let distance = Miles::new(best.miles)?;
        if let Some(radius) = max_radius {
            if distance > radius {
                return Err(CoreError::NoProducerInRadius { nearest: distance, radius });
            }
        }
        Ok(Nearest { key: best.key, distance })
    }

    fn scan(&self, query: GeoPoint, candidates: &[ProducerKey]) -> Option<Best> {
        let mut best: Option<Best> = None;
        for &key in candidates.iter().filter(|&&k| (k as usize) < self.points.len()) {
            let miles = self.distance(query, key);
            if best.is_none_or(|b| b.beaten_by(key, miles)) {
                best = Some(Best { key, miles });
            }
        }
        best
    }
}

/// Builds an index over `(id, point)` pairs. Returns the ids in key order,
/// which is ascending id order.
pub fn build_spatial<S: AsRef<str>>(producers: &[(S, GeoPoint)], metric: Metric) -> (Vec<String>, SpatialIndex) {
    let mut sorted: Vec<(&str, GeoPoint)> = producers.iter().map(|(id, p)| (id.as_ref(), *p)).collect();
    sorted.sort_by(|a, b| a.0.cmp(b.0));
    let points: Vec<GeoPoint> = sorted.iter().map(|s| s.1).collect();
    let ids = sorted.into_iter().map(|s| s.0.to_string()).collect();
    (ids, SpatialIndex::build(&points, metric))
}
