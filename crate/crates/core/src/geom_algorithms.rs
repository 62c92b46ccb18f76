//! Planar algorithms built only on the perturbed predicates: the parity
//! point-in-polygon test, convex hull, Delaunay triangulation, and counters
//! that measure how degenerate a run's input was.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::predicates::{
    in_sphere, intersect_half_line, positive, CoordMode, Decision, Point, PointSet, PredicateError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("need at least {min} points, got {actual}")]
    TooFewPoints { min: usize, actual: usize },
    #[error("expected planar Cartesian points, got dimension {dim} ({mode:?})")]
    NotPlanar { dim: usize, mode: CoordMode },
    #[error("all points coincide")]
    AllCoincident,
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

/// Per-run counters: calls per predicate and how deep each call had to go.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegeneracyMetrics {
    calls: BTreeMap<&'static str, u64>,
    depths: BTreeMap<usize, u64>,
}

impl DegeneracyMetrics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, predicate: &'static str, depth: usize) {
        *self.calls.entry(predicate).or_default() += 1;
        *self.depths.entry(depth).or_default() += 1;
    }

    fn track(&mut self, predicate: &'static str, decision: Decision) -> bool {
        self.record(predicate, decision.depth);
        decision.value
    }

    pub fn calls(&self) -> &BTreeMap<&'static str, u64> {
        &self.calls
    }

    /// Number of calls that stopped at each depth.
    pub fn histogram(&self) -> &BTreeMap<usize, u64> {
        &self.depths
    }

    pub fn total_calls(&self) -> u64 {
        self.calls.values().sum()
    }

    pub fn max_depth(&self) -> Option<usize> {
        self.depths.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.calls.is_empty()
    }

    pub fn merge(&mut self, other: &DegeneracyMetrics) {
        for (name, n) in &other.calls {
            *self.calls.entry(name).or_default() += n;
        }
        for (depth, n) in &other.depths {
            *self.depths.entry(*depth).or_default() += n;
        }
    }
}

/// A printable summary of collected metrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyReport {
    pub calls: BTreeMap<String, u64>,
    pub histogram: BTreeMap<usize, u64>,
    pub max_depth: Option<usize>,
}

pub fn degeneracy_report(metrics: &DegeneracyMetrics) -> DegeneracyReport {
    DegeneracyReport {
        calls: metrics
            .calls
            .iter()
            .map(|(name, n)| (name.to_string(), *n))
            .collect(),
        histogram: metrics.depths.clone(),
        max_depth: metrics.max_depth(),
    }
}

impl fmt::Display for DegeneracyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "calls:")?;
        if self.calls.is_empty() {
            write!(f, " none")?;
        }
        for (name, n) in &self.calls {
            write!(f, " {name}={n}")?;
        }
        write!(f, "\ndepths:")?;
        if self.histogram.is_empty() {
            write!(f, " none")?;
        }
        for (depth, n) in &self.histogram {
            write!(f, " {depth}:{n}")?;
        }
        match self.max_depth {
            Some(d) => writeln!(f, "\nmax depth: {d}"),
            None => writeln!(f, "\nmax depth: none"),
        }
    }
}

/// A closed polygon. Vertex `k` (0-based in the list) carries index `k + 1`;
/// index `0` is reserved for the query point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(coords: &[[i64; 2]]) -> Result<Self, GeomError> {
        if coords.len() < 3 {
            return Err(GeomError::TooFewPoints {
                min: 3,
                actual: coords.len(),
            });
        }
        let vertices = coords
            .iter()
            .enumerate()
            .map(|(k, c)| Point::new(k + 1, *c))
            .collect();
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.vertices.len();
        (0..n).map(move |k| (&self.vertices[k], &self.vertices[(k + 1) % n]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Inside,
    Outside,
    Boundary,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Inside => "inside",
            Classification::Outside => "outside",
            Classification::Boundary => "boundary",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipResult {
    pub classification: Classification,
    pub crossings: usize,
    pub max_depth: usize,
}

fn raw_orientation(a: &[i64], b: &[i64], c: &[i64]) -> i128 {
    let [ax, ay, bx, by, cx, cy] = [a[0], a[1], b[0], b[1], c[0], c[1]].map(i128::from);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

/// Exact, unperturbed test: does `p` lie on a closed edge of `poly`?
pub fn on_boundary(p: [i64; 2], poly: &Polygon) -> bool {
    poly.edges().any(|(a, b)| {
        let (a, b) = (&a.coords, &b.coords);
        raw_orientation(a, b, &p) == 0
            && (0..2).all(|k| a[k].min(b[k]) <= p[k] && p[k] <= a[k].max(b[k]))
    })
}

/// Parity test for `p`, which takes index `0`. With `boundary_pretest` off
/// every point is classified inside or outside of the perturbed polygon.
pub fn point_in_polygon(p: [i64; 2], poly: &Polygon, boundary_pretest: bool) -> PipResult {
    point_in_polygon_tracked(p, poly, boundary_pretest, &mut DegeneracyMetrics::new())
}

pub fn point_in_polygon_tracked(
    p: [i64; 2],
    poly: &Polygon,
    boundary_pretest: bool,
    metrics: &mut DegeneracyMetrics,
) -> PipResult {
    if boundary_pretest && on_boundary(p, poly) {
        return PipResult {
            classification: Classification::Boundary,
            crossings: 0,
            max_depth: 0,
        };
    }
    let query = Point::new(0, p);
    let mut crossings = 0;
    let mut max_depth = 0;
    for (a, b) in poly.edges() {
        let d = intersect_half_line(&query, a, b).expect("polygon indices are distinct and planar");
        metrics.record("intersect_half_line", d.depth);
        max_depth = max_depth.max(d.depth);
        crossings += usize::from(d.value);
    }
    PipResult {
        classification: if crossings % 2 == 1 {
            Classification::Inside
        } else {
            Classification::Outside
        },
        crossings,
        max_depth,
    }
}

fn check_planar(ps: &PointSet) -> Result<(), GeomError> {
    if ps.dim() != 2 || ps.mode() != CoordMode::Cartesian {
        return Err(GeomError::NotPlanar {
            dim: ps.dim(),
            mode: ps.mode(),
        });
    }
    if ps.len() < 3 {
        return Err(GeomError::TooFewPoints {
            min: 3,
            actual: ps.len(),
        });
    }
    Ok(())
}

fn left_turn(ps: &PointSet, a: usize, b: usize, c: usize, metrics: &mut DegeneracyMetrics) -> bool {
    let d = positive(&[&ps[a], &ps[b], &ps[c]], CoordMode::Cartesian)
        .expect("planar points with distinct indices");
    metrics.track("positive", d)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HullOptions {
    /// Drop hull vertices lying on the unperturbed line through their
    /// neighbours, undoing the perturbation's effect on collinear chains.
    pub merge_collinear: bool,
}

/// Counterclockwise hull of the perturbed points, starting at the smallest
/// index.
pub fn convex_hull_2d(ps: &PointSet) -> Result<Vec<usize>, GeomError> {
    convex_hull_2d_with(ps, HullOptions::default(), &mut DegeneracyMetrics::new())
}

pub fn convex_hull_2d_with(
    ps: &PointSet,
    options: HullOptions,
    metrics: &mut DegeneracyMetrics,
) -> Result<Vec<usize>, GeomError> {
    check_planar(ps)?;
    let mut hull = if left_turn(ps, 0, 1, 2, metrics) {
        vec![0, 1, 2]
    } else {
        vec![0, 2, 1]
    };
    for p in 3..ps.len() {
        let m = hull.len();
        let visible: Vec<bool> = (0..m)
            .map(|e| !left_turn(ps, hull[e], hull[(e + 1) % m], p, metrics))
            .collect();
        let Some(first) = (0..m).find(|&e| visible[e] && !visible[(e + m - 1) % m]) else {
            continue;
        };
        let mut last = first;
        while visible[(last + 1) % m] {
            last = (last + 1) % m;
        }
        // keep hull[last + 1] ..= hull[first], then close with p
        let mut next = Vec::with_capacity(m + 1);
        let mut k = (last + 1) % m;
        loop {
            next.push(hull[k]);
            if k == first {
                break;
            }
            k = (k + 1) % m;
        }
        next.push(p);
        hull = next;
    }
    if options.merge_collinear {
        merge_collinear(ps, &mut hull);
    }
    let start = (0..hull.len()).min_by_key(|&k| hull[k]).unwrap_or(0);
    hull.rotate_left(start);
    Ok(hull)
}

fn merge_collinear(ps: &PointSet, hull: &mut Vec<usize>) {
    while hull.len() > 2 {
        let m = hull.len();
        let flat = (0..m).find(|&k| {
            let [a, b, c] = [hull[(k + m - 1) % m], hull[k], hull[(k + 1) % m]];
            raw_orientation(&ps[a].coords, &ps[b].coords, &ps[c].coords) == 0
        });
        match flat {
            Some(k) => {
                hull.remove(k);
            }
            None => break,
        }
    }
}

/// Triangles of a planar triangulation, each counterclockwise and starting
/// at its smallest index, listed in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Triangulation {
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Each triangle's indices sorted ascending, listed in ascending order.
    pub fn sorted_triples(&self) -> Vec<[usize; 3]> {
        let mut out: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let mut t = *t;
                t.sort_unstable();
                t
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Delaunay triangulation of the perturbed points, by incremental insertion
/// in index order followed by flips.
///
/// `in_sphere` perturbs the lifted coordinate on its own, so a point that
/// coincides with another may end up above the lifted lower hull; such a
/// point is not a vertex of the result, and every circle test against it
/// comes out empty.
pub fn delaunay_2d(ps: &PointSet) -> Result<Triangulation, GeomError> {
    delaunay_2d_tracked(ps, &mut DegeneracyMetrics::new())
}

pub fn delaunay_2d_tracked(
    ps: &PointSet,
    metrics: &mut DegeneracyMetrics,
) -> Result<Triangulation, GeomError> {
    check_planar(ps)?;
    if ps.iter().all(|p| p.coords == ps[0].coords) {
        return Err(GeomError::AllCoincident);
    }
    let mut mesh = Mesh::default();
    if left_turn(ps, 0, 1, 2, metrics) {
        mesh.add([0, 1, 2]);
    } else {
        mesh.add([0, 2, 1]);
    }
    let in_circle = |a: usize, b: usize, c: usize, d: usize, m: &mut DegeneracyMetrics| {
        let q = [&ps[a], &ps[b], &ps[c], &ps[d]];
        let inside = in_sphere(&q).expect("planar points with distinct indices");
        m.track("in_sphere", inside)
    };
    for p in 3..ps.len() {
        // edges (u, v) of triangles (u, v, p) still to be checked
        let mut pending = Vec::new();
        let host = mesh.live().find(|&[a, b, c]| {
            left_turn(ps, a, b, p, metrics)
                && left_turn(ps, b, c, p, metrics)
                && left_turn(ps, c, a, p, metrics)
        });
        match host {
            Some([a, b, c]) => {
                if !in_circle(a, b, c, p, metrics) {
                    continue;
                }
                mesh.remove([a, b, c]);
                for [u, v] in [[a, b], [b, c], [c, a]] {
                    mesh.add([u, v, p]);
                    pending.push([u, v]);
                }
            }
            None => {
                let visible: Vec<[usize; 2]> = mesh
                    .hull_edges()
                    .filter(|&[a, b]| !left_turn(ps, a, b, p, metrics))
                    .collect();
                for [a, b] in visible {
                    mesh.add([b, a, p]);
                    pending.push([b, a]);
                }
            }
        }
        while let Some([u, v]) = pending.pop() {
            if mesh.apex(u, v) != Some(p) {
                continue;
            }
            let Some(d) = mesh.apex(v, u) else {
                continue;
            };
            if !in_circle(u, v, p, d, metrics) {
                continue;
            }
            let convex_at_u = left_turn(ps, u, d, p, metrics);
            let convex_at_v = left_turn(ps, d, v, p, metrics);
            if convex_at_u && convex_at_v {
                mesh.remove([u, v, p]);
                mesh.remove([v, u, d]);
                mesh.add([u, d, p]);
                mesh.add([d, v, p]);
                pending.extend([[u, d], [d, v]]);
            } else if !convex_at_u && mesh.apex(u, p) == Some(d) {
                // u has degree three and sinks below the lower hull
                mesh.remove([u, v, p]);
                mesh.remove([v, u, d]);
                mesh.remove([u, p, d]);
                mesh.add([v, p, d]);
                pending.push([d, v]);
            } else if !convex_at_v && mesh.apex(v, d) == Some(p) {
                mesh.remove([u, v, p]);
                mesh.remove([v, u, d]);
                mesh.remove([v, d, p]);
                mesh.add([u, d, p]);
                pending.push([u, d]);
            }
        }
    }
    let mut triangles: Vec<[usize; 3]> = mesh
        .live()
        .map(|t| {
            let k = (0..3).min_by_key(|&k| t[k]).expect("three vertices");
            [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
        })
        .collect();
    triangles.sort_unstable();
    Ok(Triangulation { triangles })
}

// Counterclockwise triangles addressed through their directed edges.
#[derive(Default)]
struct Mesh {
    apex: HashMap<(usize, usize), usize>,
}

impl Mesh {
    fn add(&mut self, [a, b, c]: [usize; 3]) {
        self.apex.insert((a, b), c);
        self.apex.insert((b, c), a);
        self.apex.insert((c, a), b);
    }

    fn remove(&mut self, [a, b, c]: [usize; 3]) {
        self.apex.remove(&(a, b));
        self.apex.remove(&(b, c));
        self.apex.remove(&(c, a));
    }

    fn apex(&self, a: usize, b: usize) -> Option<usize> {
        self.apex.get(&(a, b)).copied()
    }

    fn live(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let mut seen: Vec<[usize; 3]> = self
            .apex
            .iter()
            .filter(|(&(a, b), &c)| a < b && a < c)
            .map(|(&(a, b), &c)| [a, b, c])
            .collect();
        seen.sort_unstable();
        seen.into_iter()
    }

    fn hull_edges(&self) -> impl Iterator<Item = [usize; 2]> + '_ {
        let mut edges: Vec<[usize; 2]> = self
            .apex
            .keys()
            .filter(|&&(a, b)| !self.apex.contains_key(&(b, a)))
            .map(|&(a, b)| [a, b])
            .collect();
        edges.sort_unstable();
        edges.into_iter()
    }
}
