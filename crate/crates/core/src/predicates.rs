//! The user-facing predicates over indexed points and hyperplanes.
//!
//! Every predicate answers for the perturbed input, so none of them has a
//! "degenerate" outcome. Each object carries an index; indices decide how
//! strongly the object is perturbed and must be distinct within one call.

use num_bigint::BigInt;
use smallvec::SmallVec;
use thiserror::Error;

use crate::eps_order::MatrixKind;
use crate::exact_arith::{ArithPolicy, Entry, Sign};
use crate::sos_sign::{sign_det_sos_with, sign_det_unperturbed, SosError, SosMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredicateError {
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("{what}: expected {expected} values, got {actual}")]
    Arity {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{what} needs at least {min} objects, got {actual}")]
    TooFew {
        what: &'static str,
        min: usize,
        actual: usize,
    },
    #[error("point {0} has homogeneous weight 0")]
    ZeroWeight(usize),
    #[error("point {0} has all homogeneous coordinates equal to 0")]
    UndefinedPoint(usize),
    #[error("hyperplane {0} has a zero normal vector")]
    ZeroNormal(usize),
    #[error("a coordinate cannot be compared with itself: ({0},{1})")]
    SameCoordinate(usize, usize),
    #[error(transparent)]
    Sos(#[from] SosError),
}

/// How point coordinates are to be read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CoordMode {
    /// `d` coordinates per point.
    #[default]
    Cartesian,
    /// `d + 1` coordinates per point, the last being the weight.
    Homogeneous,
}

/// Treatment of homogeneous points with weight 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WeightPolicy {
    /// Points at infinity are an error.
    #[default]
    Reject,
    /// A zero weight counts as positive, since its perturbation is.
    Perturbed,
}

/// Knobs shared by the predicates; the defaults suit nearly every caller.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PredicateConfig {
    pub weights: WeightPolicy,
    pub arith: ArithPolicy,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub index: usize,
    pub coords: Vec<i64>,
}

impl Point {
    pub fn new(index: usize, coords: impl Into<Vec<i64>>) -> Self {
        Point {
            index,
            coords: coords.into(),
        }
    }
}

/// Points indexed densely `0..n`, all of the same dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    mode: CoordMode,
    points: Vec<Point>,
}

impl PointSet {
    /// Builds a set from coordinate rows; row `i` becomes the point with
    /// index `i`. `dim` is the geometric dimension, so homogeneous rows
    /// carry `dim + 1` values.
    pub fn new<R: AsRef<[i64]>>(
        dim: usize,
        mode: CoordMode,
        rows: &[R],
    ) -> Result<Self, PredicateError> {
        let width = match mode {
            CoordMode::Cartesian => dim,
            CoordMode::Homogeneous => dim + 1,
        };
        let mut points = Vec::with_capacity(rows.len());
        for (index, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != width {
                return Err(PredicateError::Arity {
                    what: "point",
                    expected: width,
                    actual: row.len(),
                });
            }
            if mode == CoordMode::Homogeneous && row.iter().all(|&x| x == 0) {
                return Err(PredicateError::UndefinedPoint(index));
            }
            points.push(Point::new(index, row));
        }
        Ok(PointSet { dim, mode, points })
    }

    /// Cartesian points in the plane.
    pub fn planar(coords: &[(i64, i64)]) -> Self {
        let rows: Vec<[i64; 2]> = coords.iter().map(|&(x, y)| [x, y]).collect();
        PointSet::new(2, CoordMode::Cartesian, &rows).expect("rows have two coordinates")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> CoordMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Point> {
        self.points.get(index)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }
}

impl std::ops::Index<usize> for PointSet {
    type Output = Point;

    fn index(&self, index: usize) -> &Point {
        &self.points[index]
    }
}

/// A hyperplane `a_1 x_1 + ... + a_d x_d + a_{d+1} = 0`. The normal points to
/// the positive side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperplane {
    index: usize,
    coeffs: Vec<i64>,
}

impl Hyperplane {
    pub fn new(index: usize, coeffs: impl Into<Vec<i64>>) -> Result<Self, PredicateError> {
        let coeffs = coeffs.into();
        if coeffs.len() < 2 {
            return Err(PredicateError::Arity {
                what: "hyperplane",
                expected: 2,
                actual: coeffs.len(),
            });
        }
        if coeffs[..coeffs.len() - 1].iter().all(|&a| a == 0) {
            return Err(PredicateError::ZeroNormal(index));
        }
        Ok(Hyperplane { index, coeffs })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `(a_1, ..., a_d, a_{d+1})`.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// A hyperplane `a_1 x_1 + ... + a_{d-1} x_{d-1} + x_d + a_d = 0`; "above"
/// means the left-hand side is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NonverticalHyperplane {
    pub index: usize,
    pub coeffs: Vec<i64>,
}

impl NonverticalHyperplane {
    pub fn new(index: usize, coeffs: impl Into<Vec<i64>>) -> Self {
        NonverticalHyperplane {
            index,
            coeffs: coeffs.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortResult {
    pub sorted: Vec<usize>,
    pub parity: Parity,
}

/// Sorts distinct indices ascending and reports the parity of the number
/// of exchanges.
pub fn sort_indices(seq: &[usize]) -> Result<SortResult, PredicateError> {
    let (order, odd) = sort_positions(seq)?;
    Ok(SortResult {
        sorted: order.iter().map(|&p| seq[p]).collect(),
        parity: if odd { Parity::Odd } else { Parity::Even },
    })
}

type Order = SmallVec<[usize; 10]>;

// Positions of `ids` in ascending index order, by insertion sort, and
// whether an odd number of exchanges was needed.
fn first_duplicate(ids: &[usize]) -> Option<usize> {
    (1..ids.len()).find_map(|i| ids[..i].iter().find(|&&x| x == ids[i]).copied())
}

fn sort_positions(ids: &[usize]) -> Result<(Order, bool), PredicateError> {
    let mut order: Order = (0..ids.len()).collect();
    let mut odd = false;
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 {
            let (a, b) = (ids[order[j - 1]], ids[order[j]]);
            if a == b {
                return Err(PredicateError::DuplicateIndex(a));
            }
            if a < b {
                break;
            }
            order.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    Ok((order, odd))
}

/// A coordinate `π_{index,coord}` together with its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoordRef {
    pub index: usize,
    /// 1-based coordinate number.
    pub coord: usize,
    pub value: i64,
}

impl CoordRef {
    pub fn new(index: usize, coord: usize, value: i64) -> Self {
        CoordRef {
            index,
            coord,
            value,
        }
    }
}

/// Whether the perturbed coordinate `a` is less than the perturbed `b`.
pub fn smaller(a: CoordRef, b: CoordRef) -> Result<bool, PredicateError> {
    if a.value != b.value {
        Ok(a.value < b.value)
    } else if a.index != b.index {
        Ok(a.index > b.index)
    } else if a.coord != b.coord {
        Ok(a.coord < b.coord)
    } else {
        Err(PredicateError::SameCoordinate(a.index, a.coord))
    }
}

/// Sign of a perturbed homogeneous weight; a zero weight is positive.
pub fn sign_perturbed_weight(_index: usize, weight: i64) -> Sign {
    if weight < 0 {
        Sign::Negative
    } else {
        Sign::Positive
    }
}

/// A predicate's answer and the deepest perturbation term it needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Decision {
    pub value: bool,
    /// `0` when the unperturbed input already decides.
    pub depth: usize,
}

/// A perturbed determinant sign with its row objects brought into
/// ascending index order first.
#[derive(Clone, Copy, Debug)]
struct Signed {
    sign: Sign,
    depth: usize,
}

fn signed_det<E: Entry, R: AsRef<[E]>>(
    kind: MatrixKind,
    rows: &[R],
    ids: &[usize],
    arith: ArithPolicy,
) -> Result<Signed, PredicateError> {
    if let Some(dup) = first_duplicate(ids) {
        return Err(PredicateError::DuplicateIndex(dup));
    }
    // Row order only matters once the perturbation has to decide.
    let sign = sign_det_unperturbed(kind, rows, arith)?;
    if !sign.is_zero() {
        return Ok(Signed { sign, depth: 0 });
    }
    let (order, odd) = sort_positions(ids)?;
    let sorted_rows: SmallVec<[&[E]; 10]> = order.iter().map(|&p| rows[p].as_ref()).collect();
    let sorted_ids: Order = order.iter().map(|&p| ids[p]).collect();
    let result = sign_det_sos_with(&SosMatrix::new(kind, &sorted_rows, &sorted_ids)?, arith);
    debug_assert!(!result.sign.is_zero());
    Ok(Signed {
        sign: if odd { -result.sign } else { result.sign },
        depth: result.depth,
    })
}

fn check_arity(what: &'static str, expected: usize, actual: usize) -> Result<(), PredicateError> {
    if expected == actual {
        Ok(())
    } else {
        Err(PredicateError::Arity {
            what,
            expected,
            actual,
        })
    }
}

fn check_count(what: &'static str, min: usize, actual: usize) -> Result<(), PredicateError> {
    if actual >= min {
        Ok(())
    } else {
        Err(PredicateError::TooFew { what, min, actual })
    }
}

/// Orientation of `d + 1` points in `d` dimensions: `true` when the
/// perturbed sequence is positively oriented (a left turn in the plane).
///
/// ```
/// use sos::predicates::{positive, CoordMode, Point};
/// let p = [Point::new(0, [0, 0]), Point::new(1, [1, 0]), Point::new(2, [0, 1])];
/// let d = positive(&[&p[0], &p[1], &p[2]], CoordMode::Cartesian).unwrap();
/// assert!(d.value);
/// assert_eq!(d.depth, 0);
/// ```
pub fn positive(points: &[&Point], mode: CoordMode) -> Result<Decision, PredicateError> {
    positive_with(points, mode, PredicateConfig::default())
}

pub fn positive_with(
    points: &[&Point],
    mode: CoordMode,
    config: PredicateConfig,
) -> Result<Decision, PredicateError> {
    check_count("an orientation test", 2, points.len())?;
    if let Some(d) = planar_fast_path(points, mode, config) {
        return Ok(d);
    }
    let ids: Order = points.iter().map(|p| p.index).collect();
    let rows: SmallVec<[&[i64]; 10]> = points.iter().map(|p| p.coords.as_slice()).collect();
    match mode {
        CoordMode::Cartesian => {
            for p in points {
                check_arity("point", points.len() - 1, p.coords.len())?;
            }
            let d = signed_det(MatrixKind::Lambda, &rows, &ids, config.arith)?;
            Ok(Decision {
                value: d.sign == Sign::Positive,
                depth: d.depth,
            })
        }
        CoordMode::Homogeneous => {
            let mut weights = Sign::Positive;
            for p in points {
                check_arity("homogeneous point", points.len(), p.coords.len())?;
                if p.coords.iter().all(|&x| x == 0) {
                    return Err(PredicateError::UndefinedPoint(p.index));
                }
                let w = *p.coords.last().expect("arity checked");
                if w == 0 && config.weights == WeightPolicy::Reject {
                    return Err(PredicateError::ZeroWeight(p.index));
                }
                weights = weights * sign_perturbed_weight(p.index, w);
            }
            let d = signed_det(MatrixKind::Delta, &rows, &ids, config.arith)?;
            Ok(Decision {
                value: d.sign == weights,
                depth: d.depth,
            })
        }
    }
}

// Three distinct planar points whose orientation is decided by the plain
// determinant, evaluated in checked 128-bit or in big integers.
fn planar_fast_path(
    points: &[&Point],
    mode: CoordMode,
    config: PredicateConfig,
) -> Option<Decision> {
    let [a, b, c] = points else {
        return None;
    };
    if mode != CoordMode::Cartesian
        || [a, b, c].iter().any(|p| p.coords.len() != 2)
        || a.index == b.index
        || a.index == c.index
        || b.index == c.index
    {
        return None;
    }
    let d = |p: &Point, k: usize| i128::from(p.coords[k]) - i128::from(c.coords[k]);
    let order = match config.arith {
        ArithPolicy::Auto => {
            let left = d(a, 0).checked_mul(d(b, 1))?;
            let right = d(a, 1).checked_mul(d(b, 0))?;
            left.cmp(&right)
        }
        ArithPolicy::ArbitraryOnly => {
            let big = |p: &Point, k: usize| BigInt::from(d(p, k));
            (big(a, 0) * big(b, 1)).cmp(&(big(a, 1) * big(b, 0)))
        }
    };
    (order != std::cmp::Ordering::Equal).then_some(Decision {
        value: order == std::cmp::Ordering::Greater,
        depth: 0,
    })
}

/// Whether the perturbed segment from `vj` to `vk` crosses the horizontal
/// half-line running rightwards from the perturbed `vi`. Planar only.
pub fn intersect_half_line(vi: &Point, vj: &Point, vk: &Point) -> Result<Decision, PredicateError> {
    for v in [vi, vj, vk] {
        check_arity("planar point", 2, v.coords.len())?;
    }
    sort_positions(&[vi.index, vj.index, vk.index])?;
    let y = |v: &Point| CoordRef::new(v.index, 2, v.coords[1]);
    let (vj, vk) = if smaller(y(vk), y(vj))? {
        (vk, vj)
    } else {
        (vj, vk)
    };
    if smaller(y(vj), y(vi))? && smaller(y(vi), y(vk))? {
        let rows = [&vi.coords[..], &vj.coords[..], &vk.coords[..]];
        let d = signed_det(
            MatrixKind::Lambda,
            &rows,
            &[vi.index, vj.index, vk.index],
            ArithPolicy::Auto,
        )?;
        Ok(Decision {
            value: d.sign == Sign::Positive,
            depth: d.depth,
        })
    } else {
        Ok(Decision {
            value: false,
            depth: 0,
        })
    }
}

/// Whether the common point of the first `d` perturbed hyperplanes lies on
/// the positive side of the last one.
pub fn on_positive_side(planes: &[&Hyperplane]) -> Result<Decision, PredicateError> {
    check_count("a side test", 2, planes.len())?;
    let d = planes.len() - 1;
    for h in planes {
        check_arity("hyperplane", d + 1, h.coeffs.len())?;
    }
    let ids: Order = planes.iter().map(|h| h.index).collect();
    let normals: SmallVec<[&[i64]; 10]> = planes[..d].iter().map(|h| &h.coeffs[..d]).collect();
    let full: SmallVec<[&[i64]; 10]> = planes.iter().map(|h| h.coeffs.as_slice()).collect();
    let d1 = signed_det(MatrixKind::Delta, &normals, &ids[..d], ArithPolicy::Auto)?;
    let d2 = signed_det(MatrixKind::Delta, &full, &ids, ArithPolicy::Auto)?;
    Ok(Decision {
        value: d1.sign == d2.sign,
        depth: d1.depth.max(d2.depth),
    })
}

/// Whether the common point of the first `d` perturbed nonvertical
/// hyperplanes lies above the last one.
pub fn above(planes: &[&NonverticalHyperplane]) -> Result<Decision, PredicateError> {
    check_count("an above test", 2, planes.len())?;
    let d = planes.len() - 1;
    for h in planes {
        check_arity("nonvertical hyperplane", d, h.coeffs.len())?;
    }
    let ids: Order = planes.iter().map(|h| h.index).collect();
    let slopes: SmallVec<[&[i64]; 10]> = planes[..d].iter().map(|h| &h.coeffs[..d - 1]).collect();
    let full: SmallVec<[&[i64]; 10]> = planes.iter().map(|h| h.coeffs.as_slice()).collect();
    let d1 = signed_det(MatrixKind::Lambda, &slopes, &ids[..d], ArithPolicy::Auto)?;
    let d2 = signed_det(MatrixKind::Lambda, &full, &ids, ArithPolicy::Auto)?;
    Ok(Decision {
        value: d1.sign != d2.sign,
        depth: d1.depth.max(d2.depth),
    })
}

/// Whether the last of `d + 2` perturbed points lies inside the sphere
/// through the first `d + 1`.
///
/// The squared norm of each point is perturbed as a coordinate of its own,
/// so the lifted points sit near, not on, the paraboloid.
pub fn in_sphere(points: &[&Point]) -> Result<Decision, PredicateError> {
    check_count("an in-sphere test", 3, points.len())?;
    let d = points.len() - 2;
    for p in points {
        check_arity("point", d, p.coords.len())?;
    }
    let ids: Order = points.iter().map(|p| p.index).collect();
    let base: SmallVec<[&[i64]; 10]> = points[..=d].iter().map(|p| p.coords.as_slice()).collect();
    let d1 = signed_det(MatrixKind::Lambda, &base, &ids[..=d], ArithPolicy::Auto)?;
    let d2 = match lifted_wide(points) {
        Some(rows) => signed_det(MatrixKind::Lambda, &rows, &ids, ArithPolicy::Auto)?,
        None => signed_det(
            MatrixKind::Lambda,
            &lifted_big(points),
            &ids,
            ArithPolicy::Auto,
        )?,
    };
    Ok(Decision {
        value: d1.sign == d2.sign,
        depth: d1.depth.max(d2.depth),
    })
}

fn lifted_wide(points: &[&Point]) -> Option<Vec<SmallVec<[i128; 10]>>> {
    points
        .iter()
        .map(|p| {
            let norm = p.coords.iter().try_fold(0i128, |acc, &x| {
                let x = i128::from(x);
                acc.checked_add(x.checked_mul(x)?)
            })?;
            let mut row: SmallVec<[i128; 10]> = p.coords.iter().map(|&x| i128::from(x)).collect();
            row.push(norm);
            Some(row)
        })
        .collect()
}

fn lifted_big(points: &[&Point]) -> Vec<Vec<BigInt>> {
    points
        .iter()
        .map(|p| {
            let mut row: Vec<BigInt> = p.coords.iter().map(|&x| BigInt::from(x)).collect();
            let norm: BigInt = row.iter().map(|x| x * x).sum();
            row.push(norm);
            row
        })
        .collect()
}
