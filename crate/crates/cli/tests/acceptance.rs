//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report reads top to bottom; exits nonzero on any failure.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sos::eps_order::{MatrixKind, TermDescriptor};
use sos::exact_arith::{determinant_exact, ArithPolicy, IntMatrix, Sign};
use sos::geom_algorithms::{
    convex_hull_2d, delaunay_2d, point_in_polygon, Classification, Polygon,
};
use sos::predicates::{
    in_sphere, positive, positive_with, CoordMode, Point, PointSet, PredicateConfig,
};
use sos::sos_sign::{row_name, sign_det_sos, SosMatrix, SosSignResult};
use sos_cli::table::from_csv;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// Every perturbed sign and predicate answer seen by any check.
static EVALUATIONS: AtomicU64 = AtomicU64::new(0);
static UNDECIDED: AtomicU64 = AtomicU64::new(0);

fn tally(decided: bool) {
    EVALUATIONS.fetch_add(1, Ordering::Relaxed);
    if !decided {
        UNDECIDED.fetch_add(1, Ordering::Relaxed);
    }
}

fn sos_sign<R: AsRef<[i64]>>(kind: MatrixKind, rows: &[R], ids: &[usize]) -> SosSignResult {
    let result = sign_det_sos(&SosMatrix::new(kind, rows, ids).expect("valid matrix"));
    tally(!result.sign.is_zero());
    result
}

fn left(a: &Point, b: &Point, c: &Point) -> bool {
    let d = positive(&[a, b, c], CoordMode::Cartesian);
    tally(d.is_ok());
    d.expect("orientation is always defined").value
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

// ---------------------------------------------------------------- tables

struct GoldenRow {
    kind: MatrixKind,
    size: usize,
    depth: usize,
    k: usize,
    vector: String,
    sign: Sign,
    kept_rows: Vec<usize>,
    kept_cols: Vec<usize>,
    eps: String,
}

fn golden_rows() -> Vec<GoldenRow> {
    let text = std::fs::read_to_string(fixture("term_tables.txt")).expect("golden fixture");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            let rows = |s: &str| -> Vec<usize> {
                if s == "-" {
                    return Vec::new();
                }
                s.chars()
                    .map(|c| (1..=8).find(|&r| row_name(r) == c.to_string()).unwrap())
                    .collect()
            };
            let cols = |s: &str| -> Vec<usize> {
                if s == "-" {
                    return Vec::new();
                }
                s.chars()
                    .map(|c| c.to_digit(10).unwrap() as usize)
                    .collect()
            };
            // `(j,2)(i,1)` -> `e((j,2),(i,1))`, `(i,2)` -> `e(i,2)`, `()` -> `e()`
            let pairs: Vec<&str> = f[8].split(['(', ')']).filter(|s| !s.is_empty()).collect();
            let eps = match pairs.len() {
                0 => "e()".to_string(),
                1 => format!("e({})", pairs[0]),
                _ => format!(
                    "e({})",
                    pairs
                        .iter()
                        .map(|p| format!("({p})"))
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            };
            GoldenRow {
                kind: if f[0] == "lambda" {
                    MatrixKind::Lambda
                } else {
                    MatrixKind::Delta
                },
                size: f[1].parse().unwrap(),
                depth: f[2].parse().unwrap(),
                k: f[3].parse().unwrap(),
                vector: f[4].to_string(),
                sign: if f[5] == "+" {
                    Sign::Positive
                } else {
                    Sign::Negative
                },
                kept_rows: rows(f[6]),
                kept_cols: cols(f[7]),
                eps,
            }
        })
        .collect()
}

fn golden_tables() -> Outcome {
    let start = Instant::now();
    let golden = golden_rows();
    let mut compared = 0;
    let cases = [
        ("lambda", MatrixKind::Lambda, 2, 2),
        ("lambda", MatrixKind::Lambda, 3, 5),
        ("lambda", MatrixKind::Lambda, 4, 15),
        ("delta", MatrixKind::Delta, 2, 5),
        ("delta", MatrixKind::Delta, 3, 15),
        ("delta", MatrixKind::Delta, 4, 50),
    ];
    for (name, kind, size, count) in cases {
        let out = sos_cli::run([
            "sos",
            "gentable",
            name,
            &size.to_string(),
            "--format",
            "csv",
        ]);
        ensure!(out.code == 0, "gentable {name} {size}: {}", out.stderr);
        let terms: Vec<TermDescriptor> = from_csv(&out.stdout).map_err(|e| e.to_string())?;
        let expected: Vec<&GoldenRow> = golden
            .iter()
            .filter(|g| g.kind == kind && g.size == size)
            .collect();
        ensure!(
            terms.len() == count && expected.len() == count,
            "{name} {size}: {} generated, {} golden, expected {count}",
            terms.len(),
            expected.len()
        );
        for (t, g) in terms.iter().zip(expected) {
            let got = (
                t.depth,
                t.size,
                t.vector.to_string(),
                t.sign,
                t.kept_rows(),
                t.kept_cols(),
                t.eps.display_with(row_name).to_string(),
            );
            let want = (
                g.depth,
                g.k,
                g.vector.clone(),
                g.sign,
                g.kept_rows.clone(),
                g.kept_cols.clone(),
                g.eps.clone(),
            );
            ensure!(
                got == want,
                "{name} {size} row {}: got {got:?}, want {want:?}",
                g.depth
            );
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{compared} rows in 6 tables match, {elapsed:.1?}"))
}

// ---------------------------------------------------------------- oracle

/// Sign and depth of a perturbed determinant by full expansion.
///
/// Row `r` carries point index `ids[r]`; entry `(r, c)` of a perturbed
/// column gains `eps^(2^(ids[r] * width - c))`. A product of such terms is
/// `eps` raised to a sum of distinct powers of two, encoded as a bitmask;
/// the smaller mask is the more significant monomial. The coefficient of a
/// monomial is a signed subdeterminant, so its depth is the number of
/// distinct (deleted rows, deleted columns) pairs met before it.
fn brute_force(kind: MatrixKind, rows: &[Vec<i64>], ids: &[usize]) -> (Sign, usize) {
    let n = rows.len();
    let perturbed = match kind {
        MatrixKind::Lambda => n - 1,
        MatrixKind::Delta => n,
    };
    let entry = |r: usize, c: usize| if c < perturbed { rows[r][c] } else { 1 };
    let width = perturbed as u32 + 1;
    let bit = |r: usize, c: usize| (ids[r] as u32 + 1) * width - (c as u32 + 1);
    let mut monomials: Vec<(u128, i128, u32, u32)> = Vec::new();
    for perm in permutations(n) {
        let inversions = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| perm[a] > perm[b])
            .count();
        let parity: i128 = if inversions % 2 == 0 { 1 } else { -1 };
        for subset in 0u32..(1 << n) {
            if (0..n).any(|r| subset & (1 << r) != 0 && perm[r] >= perturbed) {
                continue;
            }
            let mut mask = 0u128;
            let mut coeff = parity;
            let mut cols = 0u32;
            for (r, &c) in perm.iter().enumerate() {
                if subset & (1 << r) != 0 {
                    mask |= 1u128 << bit(r, c);
                    cols |= 1 << c;
                } else {
                    coeff *= i128::from(entry(r, c));
                }
            }
            monomials.push((mask, coeff, subset, cols));
        }
    }
    monomials.sort_unstable_by_key(|m| m.0);
    let mut seen = HashSet::new();
    let mut i = 0;
    while i < monomials.len() {
        let (mask, _, subset, cols) = monomials[i];
        let mut total = 0i128;
        while i < monomials.len() && monomials[i].0 == mask {
            total += monomials[i].1;
            i += 1;
        }
        if total != 0 {
            return (Sign::of(&total), seen.len());
        }
        seen.insert((subset, cols));
    }
    (Sign::Zero, seen.len())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

fn degenerate_rows(rng: &mut ChaCha8Rng, count: usize, width: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = (0..count)
        .map(|_| (0..width).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    match rng.gen_range(0..6) {
        0 => {
            let (a, b) = (rng.gen_range(0..count), rng.gen_range(0..count));
            rows[b] = rows[a].clone();
        }
        1 => {
            let r = rng.gen_range(0..count);
            rows[r] = vec![0; width];
        }
        2 => {
            // points on one grid line
            let base: Vec<i64> = (0..width).map(|_| rng.gen_range(-2..=2)).collect();
            let dir: Vec<i64> = (0..width).map(|_| rng.gen_range(-1..=1)).collect();
            for row in rows.iter_mut() {
                let t = rng.gen_range(-2..=2);
                *row = base.iter().zip(&dir).map(|(b, d)| b + t * d).collect();
            }
        }
        3 => {
            let c = rng.gen_range(0..width);
            let v = rng.gen_range(-1..=1);
            for row in rows.iter_mut() {
                row[c] = v;
            }
        }
        4 => {
            let v = rng.gen_range(0..=1);
            for row in rows.iter_mut() {
                row.fill(v);
            }
        }
        _ => {}
    }
    rows
}

fn increasing_ids(rng: &mut ChaCha8Rng, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..12).collect();
    pool.shuffle(rng);
    let mut ids = pool[..count].to_vec();
    ids.sort_unstable();
    ids
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let grid: Vec<Vec<i64>> = (0..3)
        .flat_map(|x| (0..3).map(move |y| vec![x, y]))
        .collect();
    let mut checked = 0;
    for a in &grid {
        for b in &grid {
            for c in &grid {
                let rows = vec![a.clone(), b.clone(), c.clone()];
                let got = sos_sign(MatrixKind::Lambda, &rows, &[0, 1, 2]);
                let want = brute_force(MatrixKind::Lambda, &rows, &[0, 1, 2]);
                ensure!(
                    (got.sign, got.depth) == want,
                    "{rows:?}: sos {:?}/{}, oracle {want:?}",
                    got.sign,
                    got.depth
                );
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let shapes = [
        (MatrixKind::Lambda, 4),
        (MatrixKind::Delta, 3),
        (MatrixKind::Delta, 4),
    ];
    let mut deep = 0;
    for n in 0..12_000 {
        let (kind, size) = shapes[n % shapes.len()];
        let width = if kind == MatrixKind::Lambda {
            size - 1
        } else {
            size
        };
        let rows = degenerate_rows(&mut rng, size, width);
        let ids = increasing_ids(&mut rng, size);
        let got = sos_sign(kind, &rows, &ids);
        let want = brute_force(kind, &rows, &ids);
        ensure!(
            (got.sign, got.depth) == want,
            "{kind} {rows:?} ids {ids:?}: sos {:?}/{}, oracle {want:?}",
            got.sign,
            got.depth
        );
        deep += usize::from(got.depth > 0);
        checked += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{checked} instances agree on sign and depth ({deep} random ones degenerate), {elapsed:.1?}"
    ))
}

// ---------------------------------------------------------------- depth 0

fn leibniz(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    permutations(n)
        .into_iter()
        .map(|perm| {
            let inversions = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|&(a, b)| perm[a] > perm[b])
                .count();
            let product: BigInt = (0..n).map(|r| rows[r][perm[r]].clone()).product();
            if inversions % 2 == 0 {
                product
            } else {
                -product
            }
        })
        .sum()
}

fn random_entry(rng: &mut ChaCha8Rng) -> i64 {
    match rng.gen_range(0..3) {
        0 => rng.gen_range(-9..=9),
        1 => rng.gen_range(-1_000_000_000..=1_000_000_000),
        _ => rng.gen(),
    }
}

fn depth_zero_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut skipped = 0;
    while checked < 10_000 {
        let size = rng.gen_range(2..=5);
        let kind = if rng.gen() {
            MatrixKind::Lambda
        } else {
            MatrixKind::Delta
        };
        let width = if kind == MatrixKind::Lambda {
            size - 1
        } else {
            size
        };
        let rows: Vec<Vec<i64>> = (0..size)
            .map(|_| (0..width).map(|_| random_entry(&mut rng)).collect())
            .collect();
        let full: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                let mut r: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
                if kind == MatrixKind::Lambda {
                    r.push(BigInt::from(1));
                }
                r
            })
            .collect();
        let raw = Sign::of(&leibniz(&full));
        if raw.is_zero() {
            skipped += 1;
            continue;
        }
        let ids = increasing_ids(&mut rng, size);
        let got = sos_sign(kind, &rows, &ids);
        ensure!(
            got.depth == 0 && got.sign == raw,
            "{kind} {rows:?}: sos {:?}/{}, raw {raw:?}",
            got.sign,
            got.depth
        );
        checked += 1;
    }
    Ok(format!(
        "{checked} nonsingular matrices decided at depth 0 with the raw sign ({skipped} singular skipped)"
    ))
}

// ---------------------------------------------------------------- taxonomy

fn taxonomy() -> Outcome {
    let cases: [(&str, [[i64; 2]; 3], usize); 5] = [
        ("general position", [[0, 0], [3, 1], [1, 2]], 0),
        ("collinear, not vertical", [[0, 0], [2, 1], [4, 2]], 1),
        ("on a vertical line", [[1, 0], [1, 5], [1, 2]], 2),
        (
            "p_j = p_k, line p_i p_j not vertical",
            [[0, 0], [3, 2], [3, 2]],
            3,
        ),
        ("vertical and p_j = p_k", [[2, 0], [2, 7], [2, 7]], 4),
    ];
    for (name, pts, want) in cases {
        let got = sos_sign(MatrixKind::Lambda, &pts, &[0, 1, 2]);
        ensure!(
            got.depth == want,
            "{name}: depth {} instead of {want}",
            got.depth
        );
        let points: Vec<Point> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| Point::new(i, *p))
            .collect();
        let d = positive(&[&points[0], &points[1], &points[2]], CoordMode::Cartesian)
            .map_err(|e| e.to_string())?;
        ensure!(
            d.depth == want,
            "{name}: positive reports depth {}",
            d.depth
        );
    }
    Ok("depths 0, 1, 2, 3, 4 for the five degeneracy classes".into())
}

// ---------------------------------------------------------------- parity

/// Winding number of a closed polygon around a point not on its boundary.
fn winding_number(p: [i64; 2], poly: &[[i64; 2]]) -> i64 {
    let mut wn = 0;
    for (a, b) in poly.iter().zip(poly.iter().cycle().skip(1)) {
        let cross = i128::from(b[0] - a[0]) * i128::from(p[1] - a[1])
            - i128::from(p[0] - a[0]) * i128::from(b[1] - a[1]);
        if a[1] <= p[1] && b[1] > p[1] && cross > 0 {
            wn += 1;
        } else if a[1] > p[1] && b[1] <= p[1] && cross < 0 {
            wn -= 1;
        }
    }
    wn
}

fn on_segment(p: [i64; 2], a: [i64; 2], b: [i64; 2]) -> bool {
    // p = a + t (b - a) with 0 <= t <= 1, in rationals
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let (px, py) = (p[0] - a[0], p[1] - a[1]);
    if px * dy != py * dx {
        return false;
    }
    let (num, den) = if dx != 0 { (px, dx) } else { (py, dy) };
    if den == 0 {
        return p == a;
    }
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    0 <= num && num <= den
}

fn parity_consistency() -> Outcome {
    let square = vec![[0, 0], [4, 0], [4, 4], [0, 4]];
    let square_collinear = vec![
        [0, 0],
        [2, 0],
        [4, 0],
        [4, 2],
        [4, 4],
        [2, 4],
        [0, 4],
        [0, 2],
    ];
    let comb = vec![
        [0, 0],
        [7, 0],
        [7, 4],
        [6, 4],
        [6, 2],
        [5, 2],
        [5, 4],
        [4, 4],
        [4, 2],
        [3, 2],
        [3, 4],
        [2, 4],
        [2, 2],
        [1, 2],
        [1, 4],
        [0, 4],
    ];
    let mut strict = 0;
    let mut boundary = 0;
    for verts in [square, square_collinear, comb] {
        let poly = Polygon::new(&verts).map_err(|e| e.to_string())?;
        for x in -1..=8 {
            for y in -1..=5 {
                let p = [x, y];
                let first = point_in_polygon(p, &poly, false);
                let again = point_in_polygon(p, &poly, false);
                ensure!(first == again, "{p:?}: nondeterministic result");
                ensure!(
                    first.classification != Classification::Boundary,
                    "{p:?}: perturbed test reported boundary"
                );
                let with_pretest = point_in_polygon(p, &poly, true);
                let on_edge = verts
                    .iter()
                    .zip(verts.iter().cycle().skip(1))
                    .any(|(a, b)| on_segment(p, *a, *b));
                if on_edge {
                    ensure!(
                        with_pretest.classification == Classification::Boundary,
                        "{p:?} on the boundary of {verts:?} reported {}",
                        with_pretest.classification
                    );
                    boundary += 1;
                    continue;
                }
                let inside = winding_number(p, &verts) != 0;
                let want = if inside {
                    Classification::Inside
                } else {
                    Classification::Outside
                };
                ensure!(
                    first.classification == want && with_pretest.classification == want,
                    "{p:?} in {verts:?}: {} / {}, oracle {want}",
                    first.classification,
                    with_pretest.classification
                );
                strict += 1;
            }
        }
    }
    Ok(format!(
        "{strict} strict points match the winding number, {boundary} boundary points flagged"
    ))
}

// ---------------------------------------------------------------- hull, delaunay

fn check_hull(ps: &PointSet) -> Result<usize, String> {
    let hull = convex_hull_2d(ps).map_err(|e| e.to_string())?;
    let h = hull.len();
    ensure!(h >= 3, "hull of {} points has {h} vertices", ps.len());
    for i in 0..h {
        let (a, b, c) = (hull[i], hull[(i + 1) % h], hull[(i + 2) % h]);
        ensure!(
            left(&ps[a], &ps[b], &ps[c]),
            "hull turn {a} {b} {c} is not left"
        );
        for p in 0..ps.len() {
            if p != a && p != b {
                ensure!(
                    left(&ps[a], &ps[b], &ps[p]),
                    "point {p} right of hull edge {a} {b}"
                );
            }
        }
    }
    Ok(h)
}

fn check_delaunay(ps: &PointSet, hull_size: usize) -> Result<usize, String> {
    let tri = delaunay_2d(ps).map_err(|e| e.to_string())?;
    let n = ps.len();
    // points whose lifted copies end above the lower hull are not vertices
    let vertices: HashSet<usize> = tri.triangles.iter().flatten().copied().collect();
    let distinct: HashSet<&[i64]> = ps.iter().map(|p| p.coords.as_slice()).collect();
    ensure!(
        vertices.len() >= distinct.len(),
        "{} vertices for {} distinct locations",
        vertices.len(),
        distinct.len()
    );
    ensure!(
        tri.len() == 2 * vertices.len() - 2 - hull_size,
        "{} triangles for {} vertices with {hull_size} on the hull",
        tri.len(),
        vertices.len()
    );
    let mut edges = HashSet::new();
    for &[a, b, c] in &tri.triangles {
        ensure!(
            left(&ps[a], &ps[b], &ps[c]),
            "triangle {a} {b} {c} is not counterclockwise"
        );
        for e in [(a, b), (b, c), (c, a)] {
            ensure!(edges.insert(e), "directed edge {e:?} used twice");
        }
        for p in 0..n {
            if p == a || p == b || p == c {
                continue;
            }
            let d = in_sphere(&[&ps[a], &ps[b], &ps[c], &ps[p]]);
            tally(d.is_ok());
            let d = d.map_err(|e| e.to_string())?;
            ensure!(!d.value, "point {p} inside the circle of {a} {b} {c}");
        }
    }
    Ok(tri.len())
}

fn hull_and_delaunay() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sets: Vec<(String, Vec<(i64, i64)>)> = (0..100)
        .map(|n| {
            let span = if n % 2 == 0 { 12 } else { 1_000_000 };
            let pts = (0..50)
                .map(|_| (rng.gen_range(0..span), rng.gen_range(0..span)))
                .collect();
            (format!("random set {n}"), pts)
        })
        .collect();
    sets.push((
        "collinear".into(),
        (0..20).map(|t| (3 * t - 7, 2 * t + 1)).collect(),
    ));
    sets.push(("vertical".into(), (0..15).map(|t| (5, t)).collect()));
    let pairs: Vec<(i64, i64)> = (0..4)
        .flat_map(|x| (0..4).map(move |y| (2 * x, 3 * y)))
        .flat_map(|p| [p, p])
        .collect();
    sets.push(("coincident pairs".into(), pairs));
    let ring: Vec<(i64, i64)> = [(5, 0), (4, 3), (3, 4), (0, 5)]
        .into_iter()
        .flat_map(|(x, y)| [(x, y), (-y, x), (-x, -y), (y, -x)])
        .collect();
    let mut rings = ring.clone();
    rings.extend(ring.iter().map(|&(x, y)| (2 * x, 2 * y)));
    rings.push((0, 0));
    sets.push(("cocircular ring".into(), ring));
    sets.push(("concentric rings".into(), rings));
    sets.push((
        "grid".into(),
        (0..6).flat_map(|x| (0..6).map(move |y| (x, y))).collect(),
    ));
    let mut triangles = 0;
    for (name, pts) in &sets {
        let ps = PointSet::planar(pts);
        let h = check_hull(&ps).map_err(|e| format!("{name}: {e}"))?;
        triangles += check_delaunay(&ps, h).map_err(|e| format!("{name}: {e}"))?;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} point sets, {triangles} triangles pass, {elapsed:.1?}",
        sets.len()
    ))
}

// ---------------------------------------------------------------- hadamard

fn hadamard() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10_000 {
        let size = rng.gen_range(1..=6);
        let entries: Vec<i64> = (0..size * size).map(|_| random_entry(&mut rng)).collect();
        let m = IntMatrix::new(size, entries.iter().map(|&x| BigInt::from(x)))
            .map_err(|e| e.to_string())?;
        let det = determinant_exact(&m);
        let mu: BigUint = entries
            .iter()
            .map(|x| BigUint::from(x.unsigned_abs()))
            .max()
            .unwrap();
        // |det| <= mu^D D^(D/2)  <=>  det^2 <= mu^(2D) D^D
        let bound = mu.pow(2 * size as u32) * BigUint::from(size).pow(size as u32);
        let square = det.magnitude() * det.magnitude();
        ensure!(
            square <= bound,
            "{size}x{size} {entries:?}: det {det} over bound"
        );
    }
    Ok("10000 random determinants within the Hadamard bound".into())
}

// ---------------------------------------------------------------- performance

fn best_of<F: FnMut() -> usize>(runs: usize, mut f: F) -> (Duration, usize) {
    let mut best = Duration::MAX;
    let mut count = 0;
    for _ in 0..runs {
        let start = Instant::now();
        count = std::hint::black_box(f());
        best = best.min(start.elapsed());
    }
    (best, count)
}

fn performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut triples = Vec::with_capacity(100_000);
    while triples.len() < 100_000 {
        let t: [[i64; 2]; 3] = std::array::from_fn(|_| {
            [
                rng.gen_range(-1_000_000..=1_000_000),
                rng.gen_range(-1_000_000..=1_000_000),
            ]
        });
        let det =
            (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]);
        if det != 0 {
            triples.push(t);
        }
    }
    let floats: Vec<[[f64; 2]; 3]> = triples
        .iter()
        .map(|t| t.map(|p| p.map(|x| x as f64)))
        .collect();
    let points: Vec<[Point; 3]> = triples
        .iter()
        .map(|t| std::array::from_fn(|i| Point::new(i, t[i])))
        .collect();
    let (float_time, float_count) = best_of(9, || {
        floats
            .iter()
            .filter(|t| {
                let t = std::hint::black_box(t);
                (t[1][0] - t[0][0]) * (t[2][1] - t[0][1])
                    - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0])
                    > 0.0
            })
            .count()
    });
    let exact = |arith: ArithPolicy| {
        let config = PredicateConfig {
            arith,
            ..Default::default()
        };
        best_of(9, || {
            points
                .iter()
                .filter(|p| {
                    let p = std::hint::black_box(p);
                    positive_with(&[&p[0], &p[1], &p[2]], CoordMode::Cartesian, config)
                        .expect("planar orientation")
                        .value
                })
                .count()
        })
    };
    let (big_time, big_count) = exact(ArithPolicy::ArbitraryOnly);
    let (fast_time, fast_count) = exact(ArithPolicy::Auto);
    ensure!(
        big_count == float_count && fast_count == float_count,
        "answers differ: float {float_count}, big {big_count}, fast {fast_count}"
    );
    let big = big_time.as_secs_f64() / float_time.as_secs_f64();
    let fast = fast_time.as_secs_f64() / float_time.as_secs_f64();
    let detail = format!(
        "float {float_time:.1?}, big integers {big:.1}x, fixed width {fast:.1}x (limits 100x, 20x)"
    );
    ensure!(big <= 100.0 && fast <= 20.0, "{detail}");
    Ok(detail)
}

// ---------------------------------------------------------------- driver

fn never_degenerate() -> Outcome {
    let total = EVALUATIONS.load(Ordering::Relaxed);
    let zeros = UNDECIDED.load(Ordering::Relaxed);
    ensure!(total > 0, "no evaluations recorded");
    ensure!(zeros == 0, "{zeros} of {total} evaluations returned zero");
    Ok(format!(
        "{total} perturbed evaluations, none zero or undefined"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden term tables", golden_tables),
        ("brute-force oracle equivalence", oracle_equivalence),
        ("depth-0 fidelity", depth_zero_fidelity),
        ("degeneracy taxonomy", taxonomy),
        ("parity algorithm consistency", parity_consistency),
        ("hull and Delaunay invariants", hull_and_delaunay),
        ("Hadamard bound", hadamard),
        ("performance", performance),
        ("never degenerate", never_degenerate),
    ];
    // never-degenerate runs last: it audits what the others evaluated
    let numbers = [1, 2, 4, 5, 6, 7, 8, 9, 3];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut lines = Vec::new();
    for ((name, check), number) in criteria.into_iter().zip(numbers) {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let line = match outcome {
            Ok(detail) => format!("PASS criterion {number} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                format!("FAIL criterion {number} ({name}): {detail}")
            }
        };
        lines.push((number, line));
    }
    lines.sort();
    for (_, line) in &lines {
        println!("{line}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
