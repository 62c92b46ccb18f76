//! Combinatorics of the symbolic perturbation.
//!
//! Coordinate `(i, j)` of the input is replaced by `x(i, j) + eps(i, j)` where
//! the perturbations live on wildly different scales: `eps(i, j)` is larger
//! than `eps(k, l)` exactly when `i < k`, or `i == k` and `j > l`, and every
//! perturbation dominates the product of all smaller ones. Because of that a
//! product of perturbations can be compared with another one by looking at
//! the index pairs alone. Nothing in this module ever evaluates a
//! perturbation numerically.
//!
//! The terms of a perturbed determinant that can decide its sign are
//! enumerated through a [`DepthVector`]: entry `v[r]` names the column of the
//! active perturbation in row `r` (1-based), and `eps(r, v[r])` is active
//! exactly when `v[r] < v[r + 1]`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::exact_arith::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpsError {
    #[error("identical epsilon products have no significance order")]
    IdenticalProducts,
    #[error("the terminal depth vector has no successor")]
    PastTerminal,
    #[error("invalid depth vector {values:?} for a {kind} matrix of size {size}: {reason}")]
    InvalidVector {
        kind: MatrixKind,
        size: usize,
        values: Vec<usize>,
        reason: &'static str,
    },
    #[error("coordinate index must be at least 1")]
    ZeroCoordinate,
    #[error("row table has {actual} entries for a matrix of size {expected}")]
    RowTable { expected: usize, actual: usize },
}

/// Subscript `(i, j)` of a perturbation: point index `i`, coordinate `j >= 1`.
///
/// The [`Ord`] implementation follows the perturbation order: `a < b` means
/// `eps(a)` is the larger perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexPair {
    pub point: usize,
    pub coord: usize,
}

impl IndexPair {
    pub fn new(point: usize, coord: usize) -> Result<Self, EpsError> {
        if coord == 0 {
            return Err(EpsError::ZeroCoordinate);
        }
        Ok(IndexPair { point, coord })
    }

    /// True iff `eps(self)` is a larger perturbation than `eps(other)`.
    pub fn precedes(&self, other: &IndexPair) -> bool {
        pair_precedes(self, other)
    }
}

pub fn pair_precedes(a: &IndexPair, b: &IndexPair) -> bool {
    a.point < b.point || (a.point == b.point && a.coord > b.coord)
}

impl Ord for IndexPair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.point
            .cmp(&other.point)
            .then_with(|| other.coord.cmp(&self.coord))
    }
}

impl PartialOrd for IndexPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.point, self.coord)
    }
}

/// A product of distinct perturbations, identified with its set of index
/// pairs. The empty product is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EpsilonProduct {
    pairs: BTreeSet<IndexPair>,
}

impl EpsilonProduct {
    pub fn one() -> Self {
        EpsilonProduct::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = IndexPair>) -> Self {
        EpsilonProduct {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// Pairs in perturbation order, largest perturbation first.
    pub fn pairs(&self) -> impl DoubleEndedIterator<Item = &IndexPair> + ExactSizeIterator {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True iff a term carrying `self` dominates any term carrying `other`.
    pub fn more_significant_than(&self, other: &EpsilonProduct) -> Result<bool, EpsError> {
        index_set_smaller(self, other)
    }

    /// Renders like `e((k,3),(j,2),(i,1))`, smallest perturbation first.
    pub fn display_with<'a, F>(&'a self, name: F) -> impl fmt::Display + 'a
    where
        F: Fn(usize) -> String + 'a,
    {
        DisplayProduct {
            product: self,
            name,
        }
    }
}

struct DisplayProduct<'a, F> {
    product: &'a EpsilonProduct,
    name: F,
}

impl<F: Fn(usize) -> String> fmt::Display for DisplayProduct<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .product
            .pairs
            .iter()
            .rev()
            .map(|p| format!("({},{})", (self.name)(p.point), p.coord))
            .collect();
        if pairs.len() == 1 {
            write!(f, "e{}", pairs[0])
        } else {
            write!(f, "e({})", pairs.join(","))
        }
    }
}

impl fmt::Display for EpsilonProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(|p| p.to_string()).fmt(f)
    }
}

/// Compares two products through their index sets: `a` is smaller when
/// `a - b` is empty, or when the largest pair of `a - b` precedes the largest
/// pair of `b - a`. A smaller set means a more significant term.
pub fn index_set_smaller(a: &EpsilonProduct, b: &EpsilonProduct) -> Result<bool, EpsError> {
    let largest_only_in_a = a.pairs.iter().rev().find(|p| !b.pairs.contains(p));
    let largest_only_in_b = b.pairs.iter().rev().find(|p| !a.pairs.contains(p));
    match (largest_only_in_a, largest_only_in_b) {
        (None, None) => Err(EpsError::IdenticalProducts),
        (None, Some(_)) => Ok(true),
        (Some(_), None) => Ok(false),
        (Some(x), Some(y)) => Ok(x.precedes(y)),
    }
}

/// The two families of perturbed matrices.
///
/// `Delta` is a `D x D` matrix whose every entry is perturbed (homogeneous
/// coordinates). `Lambda` has `D - 1` perturbed columns followed by a constant
/// column of ones (Cartesian coordinates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixKind {
    Lambda,
    Delta,
}

impl MatrixKind {
    /// Largest entry value in a depth vector, also the sentinel.
    pub fn sentinel(self, size: usize) -> usize {
        match self {
            MatrixKind::Lambda => size,
            MatrixKind::Delta => size + 1,
        }
    }

    /// Submatrix size at which table generation stops.
    pub fn terminal_size(self) -> usize {
        match self {
            MatrixKind::Lambda => 1,
            MatrixKind::Delta => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Lambda => "lambda",
            MatrixKind::Delta => "delta",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Encoding `[v1, ..., vD; v(D+1)]` of one relevant term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepthVector {
    kind: MatrixKind,
    // D entries followed by the sentinel.
    values: SmallVec<[usize; 10]>,
}

impl DepthVector {
    /// `[S, ..., S; S]` with `S` the sentinel: the unperturbed determinant.
    pub fn initial(kind: MatrixKind, size: usize) -> Self {
        let sentinel = kind.sentinel(size);
        DepthVector {
            kind,
            values: std::iter::repeat_n(sentinel, size + 1).collect(),
        }
    }

    /// `[1, 2, ..., D; S]`, the last term that can ever be needed.
    pub fn terminal(kind: MatrixKind, size: usize) -> Self {
        let mut values: SmallVec<[usize; 10]> = (1..=size).collect();
        values.push(kind.sentinel(size));
        DepthVector { kind, values }
    }

    /// Builds a vector from its `D` leading entries (without the sentinel).
    pub fn new(kind: MatrixKind, leading: &[usize]) -> Result<Self, EpsError> {
        let size = leading.len();
        let sentinel = kind.sentinel(size);
        let invalid = |reason| EpsError::InvalidVector {
            kind,
            size,
            values: leading.to_vec(),
            reason,
        };
        if size == 0 {
            return Err(invalid("empty"));
        }
        if leading.iter().any(|&v| v == 0 || v > sentinel) {
            return Err(invalid("entry out of range"));
        }
        if leading.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("entries must be nondecreasing"));
        }
        let mut values: SmallVec<[usize; 10]> = leading.iter().copied().collect();
        values.push(sentinel);
        Ok(DepthVector { kind, values })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    /// Side length `D` of the matrix.
    pub fn size(&self) -> usize {
        self.values.len() - 1
    }

    /// The `D` leading entries.
    pub fn leading(&self) -> &[usize] {
        &self.values[..self.size()]
    }

    pub fn sentinel(&self) -> usize {
        self.values[self.size()]
    }

    pub fn is_terminal(&self) -> bool {
        self.leading().iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// The encoding of the next less significant relevant term: decrement
    /// the first entry that is not `1` and copy it into all earlier slots.
    pub fn next(&self) -> Result<DepthVector, EpsError> {
        if self.is_terminal() {
            return Err(EpsError::PastTerminal);
        }
        let mut values = self.values.clone();
        let pivot = values
            .iter()
            .position(|&v| v != 1)
            .ok_or(EpsError::PastTerminal)?;
        values[pivot] -= 1;
        let value = values[pivot];
        values[..pivot].iter_mut().for_each(|v| *v = value);
        Ok(DepthVector {
            kind: self.kind,
            values,
        })
    }

    /// True iff `self` encodes a more significant term than `other`: at the
    /// last position where the two differ, `self` holds the larger value.
    pub fn more_significant_than(&self, other: &DepthVector) -> bool {
        vector_more_significant(self, other)
    }

    /// Active `(row, column)` pairs, 1-based, in increasing row order.
    pub fn active_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] < w[1])
            .map(|(r, w)| (r + 1, w[0]))
    }
}

impl fmt::Display for DepthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let leading: Vec<String> = self.leading().iter().map(usize::to_string).collect();
        write!(f, "[{};{}]", leading.join(","), self.sentinel())
    }
}

pub fn next_v(v: &DepthVector) -> Result<DepthVector, EpsError> {
    v.next()
}

pub fn vector_more_significant(a: &DepthVector, b: &DepthVector) -> bool {
    a.values
        .iter()
        .zip(&b.values)
        .rev()
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x > y)
}

/// One relevant term of a perturbed determinant: a signed subdeterminant
/// together with its perturbation product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDescriptor {
    /// Position in order of decreasing significance.
    pub depth: usize,
    /// Side length of the remaining submatrix.
    pub size: usize,
    pub sign: Sign,
    /// Crossed-out rows, 1-based and increasing.
    pub deleted_rows: Vec<usize>,
    /// Crossed-out columns, 1-based, increasing together with the rows.
    pub deleted_cols: Vec<usize>,
    pub eps: EpsilonProduct,
    pub vector: DepthVector,
}

impl TermDescriptor {
    pub fn kept_rows(&self) -> Vec<usize> {
        complement(&self.deleted_rows, self.vector.size())
    }

    pub fn kept_cols(&self) -> Vec<usize> {
        complement(&self.deleted_cols, self.vector.size())
    }
}

fn complement(deleted: &[usize], size: usize) -> Vec<usize> {
    (1..=size).filter(|i| !deleted.contains(i)).collect()
}

/// Decodes `v` into its term. `row_indices[r - 1]` is the true point index
/// of matrix row `r`; the product is expressed in those indices.
///
/// The coefficient sign is `-1` raised to the number of active pairs
/// `(r, v[r])` with `r + v[r]` odd.
pub fn decode(
    v: &DepthVector,
    depth: usize,
    row_indices: &[usize],
) -> Result<TermDescriptor, EpsError> {
    let size = v.size();
    if row_indices.len() != size {
        return Err(EpsError::RowTable {
            expected: size,
            actual: row_indices.len(),
        });
    }
    let mut deleted_rows = Vec::new();
    let mut deleted_cols = Vec::new();
    let mut sign = Sign::Positive;
    for (row, col) in v.active_pairs() {
        if (row + col) % 2 == 1 {
            sign = -sign;
        }
        deleted_rows.push(row);
        deleted_cols.push(col);
    }
    let eps = EpsilonProduct::from_pairs(deleted_rows.iter().zip(&deleted_cols).map(|(&r, &c)| {
        IndexPair {
            point: row_indices[r - 1],
            coord: c,
        }
    }));
    Ok(TermDescriptor {
        depth,
        size: size - deleted_rows.len(),
        sign,
        deleted_rows,
        deleted_cols,
        eps,
        vector: v.clone(),
    })
}

/// Decodes with rows numbered `1..=D`.
pub fn decode_normalized(v: &DepthVector, depth: usize) -> TermDescriptor {
    let rows: SmallVec<[usize; 10]> = (1..=v.size()).collect();
    decode(v, depth, &rows).expect("row table matches the vector size")
}

/// All relevant terms from the unperturbed determinant down to the terminal
/// vector, rows numbered `1..=D`.
pub fn relevant_terms(kind: MatrixKind, size: usize) -> RelevantTerms {
    RelevantTerms {
        next: Some(DepthVector::initial(kind, size)),
        depth: 0,
    }
}

pub struct RelevantTerms {
    next: Option<DepthVector>,
    depth: usize,
}

impl Iterator for RelevantTerms {
    type Item = TermDescriptor;

    fn next(&mut self) -> Option<TermDescriptor> {
        let v = self.next.take()?;
        let term = decode_normalized(&v, self.depth);
        self.next = v.next().ok();
        self.depth += 1;
        Some(term)
    }
}
