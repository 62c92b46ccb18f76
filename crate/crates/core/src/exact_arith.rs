//! Exact integer determinants and their signs.
//!
//! Small matrices (side length up to three) use the cofactor formulas, larger
//! ones fraction-free Bareiss elimination. Whenever the magnitude of every
//! intermediate value is provably below `i128::MAX` the computation runs in
//! fixed-width integers; otherwise it is carried out with [`BigInt`].

use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;
use thiserror::Error;

/// Ternary sign of an exact integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Signed>(value: &T) -> Sign {
        if value.is_positive() {
            Sign::Positive
        } else if value.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    /// `-1`, `0` or `+1`.
    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-1",
            Sign::Zero => "0",
            Sign::Positive => "+1",
        })
    }
}

/// A matrix entry type that can be widened to arbitrary precision.
pub trait Entry: Clone + fmt::Debug {
    fn from_i64(value: i64) -> Self;

    fn to_big(&self) -> BigInt;

    /// The value as `i128`, if it fits.
    fn to_wide(&self) -> Option<i128>;

    fn is_zero_entry(&self) -> bool;
}

impl Entry for i64 {
    fn from_i64(value: i64) -> Self {
        value
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn to_wide(&self) -> Option<i128> {
        Some(i128::from(*self))
    }

    fn is_zero_entry(&self) -> bool {
        *self == 0
    }
}

impl Entry for i128 {
    fn from_i64(value: i64) -> Self {
        i128::from(value)
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn to_wide(&self) -> Option<i128> {
        Some(*self)
    }

    fn is_zero_entry(&self) -> bool {
        *self == 0
    }
}

impl Entry for BigInt {
    fn from_i64(value: i64) -> Self {
        BigInt::from(value)
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }

    fn to_wide(&self) -> Option<i128> {
        self.to_i128()
    }

    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("a {size}x{size} matrix needs {expected} entries, got {actual}")]
    EntryCount {
        size: usize,
        expected: usize,
        actual: usize,
    },
    #[error("row {row} has {actual} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        actual: usize,
    },
}

/// How a determinant may be evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ArithPolicy {
    /// Use `i128` when the overflow pre-check allows it, big integers otherwise.
    #[default]
    Auto,
    /// Always use big integers.
    ArbitraryOnly,
}

/// Square integer matrix stored row-major. A `0x0` matrix is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix<E = BigInt> {
    size: usize,
    entries: SmallVec<[E; 16]>,
}

impl<E: Entry> IntMatrix<E> {
    pub fn new(size: usize, entries: impl IntoIterator<Item = E>) -> Result<Self, ArithError> {
        let entries: SmallVec<[E; 16]> = entries.into_iter().collect();
        if entries.len() != size * size {
            return Err(ArithError::EntryCount {
                size,
                expected: size * size,
                actual: entries.len(),
            });
        }
        Ok(IntMatrix { size, entries })
    }

    pub fn from_rows<R: AsRef<[E]>>(rows: &[R]) -> Result<Self, ArithError> {
        let size = rows.len();
        let mut entries = SmallVec::with_capacity(size * size);
        for (row, values) in rows.iter().enumerate() {
            let values = values.as_ref();
            if values.len() != size {
                return Err(ArithError::RaggedRow {
                    row,
                    expected: size,
                    actual: values.len(),
                });
            }
            entries.extend(values.iter().cloned());
        }
        Ok(IntMatrix { size, entries })
    }

    pub fn empty() -> Self {
        IntMatrix {
            size: 0,
            entries: SmallVec::new(),
        }
    }

    pub(crate) fn from_entries_unchecked(size: usize, entries: SmallVec<[E; 16]>) -> Self {
        debug_assert_eq!(entries.len(), size * size);
        IntMatrix { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> &E {
        &self.entries[row * self.size + col]
    }

    pub fn row(&self, row: usize) -> &[E] {
        &self.entries[row * self.size..(row + 1) * self.size]
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    /// Largest absolute entry, `0` for the empty matrix.
    pub fn max_abs(&self) -> BigUint {
        self.entries
            .iter()
            .map(|e| e.to_big().magnitude().clone())
            .max()
            .unwrap_or_default()
    }

    pub fn determinant(&self) -> BigInt {
        determinant_exact(self)
    }

    pub fn sign_of_determinant(&self) -> Sign {
        sign_of_determinant(self)
    }
}

/// The exact determinant. The empty matrix has determinant `1`.
pub fn determinant_exact<E: Entry>(m: &IntMatrix<E>) -> BigInt {
    if let Some(det) = determinant_wide(m) {
        return BigInt::from(det);
    }
    let mut work: Vec<BigInt> = m.entries.iter().map(Entry::to_big).collect();
    eliminate(&mut work, m.size)
}

pub fn sign_of_determinant<E: Entry>(m: &IntMatrix<E>) -> Sign {
    sign_of_determinant_with(m, ArithPolicy::Auto)
}

pub fn sign_of_determinant_with<E: Entry>(m: &IntMatrix<E>, policy: ArithPolicy) -> Sign {
    sign_of_entries(m.size, &m.entries, policy)
}

/// Sign of the determinant of the `size x size` row-major `entries`.
pub(crate) fn sign_of_entries<E: Entry>(size: usize, entries: &[E], policy: ArithPolicy) -> Sign {
    debug_assert_eq!(entries.len(), size * size);
    if policy == ArithPolicy::Auto {
        if let Some(det) = wide_entries(size, entries) {
            return Sign::of(&det);
        }
    }
    let mut work: SmallVec<[BigInt; 16]> = entries.iter().map(Entry::to_big).collect();
    sign_of_big(size, &mut work)
}

/// Sign of the determinant of `work`, which is overwritten.
pub(crate) fn sign_of_big(size: usize, work: &mut [BigInt]) -> Sign {
    Sign::of(&eliminate(work, size))
}

/// Determinant in `i128`, or `None` when the pre-check cannot rule out
/// overflow of some intermediate value.
pub fn determinant_wide<E: Entry>(m: &IntMatrix<E>) -> Option<i128> {
    wide_entries(m.size, &m.entries)
}

fn wide_entries<E: Entry>(size: usize, entries: &[E]) -> Option<i128> {
    let mut work = [0i128; 16];
    let mut heap = Vec::new();
    let work: &mut [i128] = if size * size <= work.len() {
        &mut work[..size * size]
    } else {
        heap.resize(size * size, 0);
        &mut heap
    };
    let mut mu: u128 = 0;
    for (slot, e) in work.iter_mut().zip(entries) {
        let v = e.to_wide()?;
        mu = mu.max(v.unsigned_abs());
        *slot = v;
    }
    if !fits_wide(mu, size) {
        return None;
    }
    Some(eliminate(work, size))
}

// Cofactor formulas for size <= 3 keep every partial sum below size! * mu^size.
// Bareiss intermediates are (s+1)-minors, so products stay below 2 * H^2 with
// H the Hadamard bound for the full size.
fn fits_wide(mu: u128, size: usize) -> bool {
    const LIMIT: u128 = i128::MAX as u128;
    if size <= 3 {
        let mut bound: u128 = 1;
        for factor in 1..=size as u128 {
            bound = match bound.checked_mul(mu).and_then(|b| b.checked_mul(factor)) {
                Some(b) => b,
                None => return false,
            };
        }
        bound <= LIMIT
    } else {
        let hadamard = match hadamard_bound_u128(mu, size) {
            Some(h) => h,
            None => return false,
        };
        hadamard
            .checked_mul(hadamard)
            .and_then(|sq| sq.checked_mul(2))
            .is_some_and(|b| b <= LIMIT)
    }
}

// Upper bound mu^D * ceil(sqrt(D))^D, which dominates mu^D * D^(D/2).
fn hadamard_bound_u128(mu: u128, size: usize) -> Option<u128> {
    let root = (1u128..).find(|r| r * r >= size as u128).unwrap_or(1);
    let mut bound: u128 = 1;
    for _ in 0..size {
        bound = bound.checked_mul(mu)?.checked_mul(root)?;
    }
    Some(bound)
}

fn eliminate<T>(a: &mut [T], size: usize) -> T
where
    T: Signed + Clone,
    for<'a> &'a T: Arith<T>,
{
    match size {
        0 => T::one(),
        1 => a[0].clone(),
        2 => &a[0] * &a[3] - &a[1] * &a[2],
        3 => {
            let minor = |r0: usize, c0: usize, r1: usize, c1: usize| {
                &a[r0 * 3 + c0] * &a[r1 * 3 + c1] - &a[r0 * 3 + c1] * &a[r1 * 3 + c0]
            };
            &a[0] * &minor(1, 1, 2, 2) - &a[1] * &minor(1, 0, 2, 2) + &a[2] * &minor(1, 0, 2, 1)
        }
        _ => bareiss(a, size),
    }
}

/// Multiplication and exact division by reference.
trait Arith<T>: Mul<Self, Output = T> + Div<Self, Output = T> + Sized {}

impl<'a, T> Arith<T> for &'a T where &'a T: Mul<&'a T, Output = T> + Div<&'a T, Output = T> {}

/// Fraction-free Gaussian elimination. Every division is exact.
fn bareiss<T>(a: &mut [T], n: usize) -> T
where
    T: Signed + Clone,
    for<'a> &'a T: Arith<T>,
{
    let mut negate = false;
    let mut previous = T::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return T::zero();
            };
            for c in 0..n {
                a.swap(k * n + c, pivot * n + c);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let value = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = &value / &previous;
            }
        }
        previous = a[k * n + k].clone();
    }
    let det = a[n * n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Smallest integer that is at least `mu^D * D^(D/2)`.
///
/// Bounds the absolute determinant of every `D x D` matrix whose entries are
/// at most `mu` in absolute value.
pub fn hadamard_bound(mu: &BigUint, size: usize) -> BigUint {
    let size_big = BigUint::from(size);
    let exponent = size as u32;
    if size.is_multiple_of(2) {
        mu.pow(exponent) * size_big.pow(exponent / 2)
    } else {
        // ceil(sqrt(mu^(2D) * D^D))
        let square = mu.pow(2 * exponent) * size_big.pow(exponent);
        let root = square.sqrt();
        if &root * &root == square {
            root
        } else {
            root + BigUint::one()
        }
    }
}
