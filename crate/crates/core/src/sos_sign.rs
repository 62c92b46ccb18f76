//! Sign of a perturbed determinant.
//!
//! The perturbed determinant is a polynomial in the perturbations whose
//! coefficients are signed subdeterminants of the original matrix. Walking
//! the relevant terms from most to least significant, the first nonzero
//! coefficient decides the sign. The walk always ends: the last relevant
//! coefficient is `+-1`.
//!
//! The same enumeration, run without evaluating anything, produces the term
//! tables and straight-line evaluation programs.

use std::fmt::Write as _;
use std::sync::OnceLock;

use smallvec::SmallVec;
use thiserror::Error;

use crate::eps_order::{decode, DepthVector, EpsError, MatrixKind, TermDescriptor};
use num_bigint::BigInt;

use crate::exact_arith::{sign_of_big, sign_of_entries, ArithPolicy, Entry, IntMatrix, Sign};

/// Largest matrix size for which tables and code can be generated.
pub const MAX_TABLE_SIZE: usize = 8;

// Sizes up to this one evaluate through a table built once per process.
const CACHED_TABLE_SIZE: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SosError {
    #[error("matrix size {0} is outside the supported range 2..={MAX_TABLE_SIZE}")]
    SizeOutOfRange(usize),
    #[error("a perturbed matrix needs at least one row")]
    Empty,
    #[error("row {row} has {actual} coordinates, expected {expected}")]
    RowArity {
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("{actual} row indices given for {expected} rows")]
    IndexCount { expected: usize, actual: usize },
    #[error("row indices must be strictly increasing, got {0:?}")]
    UnsortedIndices(Vec<usize>),
    #[error(transparent)]
    Eps(#[from] EpsError),
}

/// A square matrix whose rows are the coordinates of points with strictly
/// increasing indices, perturbed symbolically.
///
/// For [`MatrixKind::Lambda`] each row holds `D - 1` coordinates and the
/// constant `1` is appended; for [`MatrixKind::Delta`] each row holds `D`
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosMatrix<E = i64> {
    kind: MatrixKind,
    size: usize,
    entries: SmallVec<[E; 16]>,
    row_indices: SmallVec<[usize; 8]>,
}

impl<E: Entry> SosMatrix<E> {
    pub fn new<R: AsRef<[E]>>(
        kind: MatrixKind,
        rows: &[R],
        row_indices: &[usize],
    ) -> Result<Self, SosError> {
        let size = rows.len();
        if size == 0 {
            return Err(SosError::Empty);
        }
        if row_indices.len() != size {
            return Err(SosError::IndexCount {
                expected: size,
                actual: row_indices.len(),
            });
        }
        if row_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SosError::UnsortedIndices(row_indices.to_vec()));
        }
        Ok(SosMatrix {
            kind,
            size,
            entries: collect_entries(kind, rows)?,
            row_indices: row_indices.iter().copied().collect(),
        })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_indices
    }

    /// The unperturbed matrix, including the column of ones for `Lambda`.
    pub fn unperturbed(&self) -> IntMatrix<E> {
        IntMatrix::from_entries_unchecked(self.size, self.entries.clone())
    }

    /// The submatrix left after crossing out the term's rows and columns.
    pub fn submatrix(&self, term: &TermDescriptor) -> IntMatrix<E> {
        IntMatrix::from_entries_unchecked(term.size, self.submatrix_entries(term))
    }

    fn submatrix_entries(&self, term: &TermDescriptor) -> SmallVec<[E; 16]> {
        let kept_cols = term.kept_cols();
        let mut entries = SmallVec::with_capacity(term.size * term.size);
        for r in term.kept_rows() {
            for &c in &kept_cols {
                entries.push(self.entries[(r - 1) * self.size + c - 1].clone());
            }
        }
        entries
    }

    /// Signed coefficient of `term` in the perturbed determinant.
    pub fn coefficient_sign(&self, term: &TermDescriptor, policy: ArithPolicy) -> Sign {
        term.sign * sign_of_entries(term.size, &self.submatrix_entries(term), policy)
    }

    /// Sign of the unperturbed determinant.
    pub fn unperturbed_sign(&self, policy: ArithPolicy) -> Sign {
        unperturbed_sign(self.kind, self.size, &self.entries, policy)
    }
}

fn collect_entries<E: Entry, R: AsRef<[E]>>(
    kind: MatrixKind,
    rows: &[R],
) -> Result<SmallVec<[E; 16]>, SosError> {
    let size = rows.len();
    if size == 0 {
        return Err(SosError::Empty);
    }
    let width = match kind {
        MatrixKind::Lambda => size - 1,
        MatrixKind::Delta => size,
    };
    let mut entries = SmallVec::with_capacity(size * size);
    for (row, coords) in rows.iter().enumerate() {
        let coords = coords.as_ref();
        if coords.len() != width {
            return Err(SosError::RowArity {
                row,
                expected: width,
                actual: coords.len(),
            });
        }
        for x in coords {
            entries.push(x.clone());
        }
        if kind == MatrixKind::Lambda {
            entries.push(E::from_i64(1));
        }
    }
    Ok(entries)
}

/// Sign of the plain determinant of the rows, laid out as for
/// [`SosMatrix::new`] but in any row order. Zero is a possible answer.
pub fn sign_det_unperturbed<E: Entry, R: AsRef<[E]>>(
    kind: MatrixKind,
    rows: &[R],
    policy: ArithPolicy,
) -> Result<Sign, SosError> {
    if kind == MatrixKind::Delta || rows.len() < 2 {
        let entries = collect_entries(kind, rows)?;
        return Ok(unperturbed_sign(kind, rows.len(), &entries, policy));
    }
    let mut coords: SmallVec<[&[E]; 8]> = SmallVec::new();
    for (row, r) in rows.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != rows.len() - 1 {
            return Err(SosError::RowArity {
                row,
                expected: rows.len() - 1,
                actual: r.len(),
            });
        }
        coords.push(r);
    }
    Ok(lambda_sign(&coords, policy))
}

fn unperturbed_sign<E: Entry>(
    kind: MatrixKind,
    size: usize,
    entries: &[E],
    policy: ArithPolicy,
) -> Sign {
    if kind == MatrixKind::Lambda && size >= 2 {
        let coords: SmallVec<[&[E]; 8]> = entries
            .chunks_exact(size)
            .map(|row| &row[..size - 1])
            .collect();
        return lambda_sign(&coords, policy);
    }
    sign_of_entries(size, entries, policy)
}

// Orientation in the line or plane with checked 128-bit arithmetic;
// comparing the two products avoids overflow in their difference.
fn planar_sign<E: Entry>(coords: &[&[E]]) -> Option<Sign> {
    let last = coords[coords.len() - 1];
    let d = |r: usize, c: usize| coords[r][c].to_wide()?.checked_sub(last[c].to_wide()?);
    match coords.len() {
        2 => Some(Sign::of(&d(0, 0)?)),
        3 => {
            let p = d(0, 0)?.checked_mul(d(1, 1)?)?;
            let q = d(0, 1)?.checked_mul(d(1, 0)?)?;
            Some(match p.cmp(&q) {
                std::cmp::Ordering::Less => Sign::Negative,
                std::cmp::Ordering::Equal => Sign::Zero,
                std::cmp::Ordering::Greater => Sign::Positive,
            })
        }
        _ => None,
    }
}

// Subtracting the last row from the others clears the column of ones above
// its final entry, so the determinant equals that of the (D-1) x (D-1)
// matrix of coordinate differences.
fn lambda_sign<E: Entry>(coords: &[&[E]], policy: ArithPolicy) -> Sign {
    let k = coords.len() - 1;
    let last = coords[k];
    if policy == ArithPolicy::Auto {
        if let Some(sign) = planar_sign(coords) {
            return sign;
        }
    }
    if policy == ArithPolicy::Auto && k * k <= 16 {
        let mut diff = [0i128; 16];
        let mut fits = true;
        'rows: for r in 0..k {
            for c in 0..k {
                let d = coords[r][c].to_wide().zip(last[c].to_wide());
                match d.and_then(|(a, b)| a.checked_sub(b)) {
                    Some(d) => diff[r * k + c] = d,
                    None => {
                        fits = false;
                        break 'rows;
                    }
                }
            }
        }
        if fits {
            return sign_of_entries(k, &diff[..k * k], policy);
        }
    }
    let mut diff: SmallVec<[BigInt; 16]> = SmallVec::with_capacity(k * k);
    for row in &coords[..k] {
        for c in 0..k {
            let wide = row[c].to_wide().zip(last[c].to_wide());
            diff.push(match wide.and_then(|(a, b)| a.checked_sub(b)) {
                Some(d) => BigInt::from(d),
                None => row[c].to_big() - last[c].to_big(),
            });
        }
    }
    sign_of_big(k, &mut diff)
}

/// Outcome of a perturbed sign evaluation. `sign` is never [`Sign::Zero`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SosSignResult {
    pub sign: Sign,
    /// Depth of the first nonzero coefficient; `0` when the unperturbed
    /// determinant already decides.
    pub depth: usize,
}

pub fn sign_det_sos<E: Entry>(m: &SosMatrix<E>) -> SosSignResult {
    sign_det_sos_with(m, ArithPolicy::Auto)
}

pub fn sign_det_sos_with<E: Entry>(m: &SosMatrix<E>, policy: ArithPolicy) -> SosSignResult {
    let sign = m.unperturbed_sign(policy);
    if !sign.is_zero() {
        return SosSignResult { sign, depth: 0 };
    }
    if m.size <= CACHED_TABLE_SIZE {
        let table = cached_table(m.kind, m.size);
        for term in &table[1..] {
            let sign = m.coefficient_sign(term, policy);
            if !sign.is_zero() {
                return SosSignResult {
                    sign,
                    depth: term.depth,
                };
            }
        }
        unreachable!("the terminal coefficient of a perturbed determinant is nonzero");
    }
    sign_det_sos_lazy(m, policy)
}

/// Evaluation by walking depth vectors directly, without a table.
pub fn sign_det_sos_lazy<E: Entry>(m: &SosMatrix<E>, policy: ArithPolicy) -> SosSignResult {
    let mut v = DepthVector::initial(m.kind, m.size);
    let mut depth = 0;
    loop {
        let term = decode(&v, depth, &m.row_indices).expect("row table matches matrix size");
        let sign = m.coefficient_sign(&term, policy);
        if !sign.is_zero() {
            return SosSignResult { sign, depth };
        }
        v = v
            .next()
            .expect("the terminal coefficient of a perturbed determinant is nonzero");
        depth += 1;
    }
}

fn cached_table(kind: MatrixKind, size: usize) -> &'static [TermDescriptor] {
    static TABLES: OnceLock<Vec<Vec<TermDescriptor>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        [MatrixKind::Lambda, MatrixKind::Delta]
            .into_iter()
            .flat_map(|kind| (1..=CACHED_TABLE_SIZE).map(move |size| term_table(kind, size)))
            .collect()
    });
    let slot = match kind {
        MatrixKind::Lambda => 0,
        MatrixKind::Delta => CACHED_TABLE_SIZE,
    };
    &tables[slot + size - 1]
}

fn term_table(kind: MatrixKind, size: usize) -> Vec<TermDescriptor> {
    let rows: SmallVec<[usize; 10]> = (1..=size).collect();
    let stop = kind.terminal_size().min(size);
    let mut table = Vec::new();
    let mut v = DepthVector::initial(kind, size);
    loop {
        let term = decode(&v, table.len(), &rows).expect("row table matches matrix size");
        let done = term.size == stop;
        table.push(term);
        if done {
            return table;
        }
        v = v.next().expect("generation stops at the terminal vector");
    }
}

/// The ordered table of relevant terms with rows numbered `1..=D`. Generation
/// stops at the first term of size `0` (`Delta`) or `1` (`Lambda`).
pub fn generate_term_table(kind: MatrixKind, size: usize) -> Result<Vec<TermDescriptor>, SosError> {
    check_table_size(size)?;
    Ok(term_table(kind, size))
}

fn check_table_size(size: usize) -> Result<(), SosError> {
    if (2..=MAX_TABLE_SIZE).contains(&size) {
        Ok(())
    } else {
        Err(SosError::SizeOutOfRange(size))
    }
}

/// Name of matrix row `row` (1-based) in tables and generated code.
pub fn row_name(row: usize) -> String {
    const NAMES: [&str; MAX_TABLE_SIZE] = ["i", "j", "k", "l", "m", "n", "o", "p"];
    NAMES
        .get(row.wrapping_sub(1))
        .map_or_else(|| format!("r{row}"), |s| s.to_string())
}

/// Layout of the emitted evaluation program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeStyle {
    /// A loop over the depth with one `case` branch per term.
    Case,
    /// One test per term, returning at the first nonzero sign.
    Unrolled,
}

/// Renders the coefficient of `term` as an expression over the coordinate
/// slots `P[row,col]`, e.g. `-sign_det_2(P[j,1], 1; P[k,1], 1)`.
pub fn coefficient_expression(kind: MatrixKind, term: &TermDescriptor) -> String {
    let size = term.vector.size();
    let sign = if term.sign == Sign::Negative {
        "-"
    } else {
        "+"
    };
    let slot = |r: usize, c: usize| {
        if kind == MatrixKind::Lambda && c == size {
            "1".to_string()
        } else {
            format!("P[{},{}]", row_name(r), c)
        }
    };
    let rows = term.kept_rows();
    let cols = term.kept_cols();
    match term.size {
        0 => format!("{sign}1"),
        1 if kind == MatrixKind::Lambda && cols[0] == size => format!("{sign}1"),
        1 => format!("{sign}sign({})", slot(rows[0], cols[0])),
        k => {
            let body: Vec<String> = rows
                .iter()
                .map(|&r| {
                    cols.iter()
                        .map(|&c| slot(r, c))
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .collect();
            format!("{sign}sign_det_{k}({})", body.join("; "))
        }
    }
}

/// A deterministic evaluation program for the sign of the perturbed
/// determinant, in a small language-neutral pseudocode.
pub fn emit_straightline_code(
    kind: MatrixKind,
    size: usize,
    style: CodeStyle,
) -> Result<String, SosError> {
    let table = generate_term_table(kind, size)?;
    let rows: Vec<String> = (1..=size).map(row_name).collect();
    let mut out = String::new();
    let name = format!("sign_det_{}_{}", kind.name(), size);
    writeln!(
        out,
        "# sign of the perturbed {kind} determinant of size {size}"
    )
    .unwrap();
    writeln!(
        out,
        "# rows {} hold points with increasing indices",
        rows.join(" < ")
    )
    .unwrap();
    if kind == MatrixKind::Lambda {
        writeln!(out, "# column {size} is the unperturbed constant 1").unwrap();
    }
    writeln!(out, "function {name}(P)").unwrap();
    match style {
        CodeStyle::Case => {
            writeln!(out, "  t := -1").unwrap();
            writeln!(out, "  repeat").unwrap();
            writeln!(out, "    t := t + 1").unwrap();
            writeln!(out, "    case t of").unwrap();
            for term in &table {
                writeln!(
                    out,
                    "      {}: s := {}",
                    term.depth,
                    coefficient_expression(kind, term)
                )
                .unwrap();
            }
            writeln!(out, "    end").unwrap();
            writeln!(out, "  until s != 0").unwrap();
            writeln!(out, "  return s").unwrap();
        }
        CodeStyle::Unrolled => {
            let (last, rest) = table.split_last().expect("tables are never empty");
            for term in rest {
                writeln!(out, "  s := {}", coefficient_expression(kind, term)).unwrap();
                writeln!(out, "  if s != 0 then return s").unwrap();
            }
            writeln!(out, "  return {}", coefficient_expression(kind, last)).unwrap();
        }
    }
    writeln!(out, "end").unwrap();
    Ok(out)
}
