//! Term-table export in CSV and aligned text, and CSV import.
//!
//! Columns: `t, k_t, v_t, sign, deleted_rows, deleted_cols, eps`. Row and
//! column lists are space-separated 1-based numbers; the ε-product names
//! rows by letter (`i, j, k, ...`), largest row first.

use sos::eps_order::{DepthVector, EpsilonProduct, IndexPair, MatrixKind, TermDescriptor};
use sos::exact_arith::Sign;
use sos::sos_sign::row_name;
use thiserror::Error;

pub const HEADER: [&str; 7] = [
    "t",
    "k_t",
    "v_t",
    "sign",
    "deleted_rows",
    "deleted_cols",
    "eps",
];

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("record {record}: bad {column} `{value}`")]
    Field {
        record: usize,
        column: &'static str,
        value: String,
    },
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
}

fn list(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn sign_symbol(sign: Sign) -> &'static str {
    if sign == Sign::Negative {
        "-"
    } else {
        "+"
    }
}

fn fields(term: &TermDescriptor) -> [String; 7] {
    [
        term.depth.to_string(),
        term.size.to_string(),
        term.vector.to_string(),
        sign_symbol(term.sign).to_string(),
        list(&term.deleted_rows),
        list(&term.deleted_cols),
        term.eps.display_with(row_name).to_string(),
    ]
}

pub fn to_csv(terms: &[TermDescriptor]) -> Result<String, TableError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(HEADER)?;
    for term in terms {
        writer.write_record(fields(term))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("table fields are ASCII"))
}

pub fn to_text(terms: &[TermDescriptor]) -> String {
    let rows: Vec<[String; 7]> = terms
        .iter()
        .map(|t| {
            let mut f = fields(t);
            for cell in &mut f[4..6] {
                if cell.is_empty() {
                    *cell = "-".into();
                }
            }
            f
        })
        .collect();
    let mut widths = HEADER.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let header = HEADER.map(String::from);
    for row in std::iter::once(&header).chain(&rows) {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Reads a table written by [`to_csv`] back into terms.
pub fn from_csv(text: &str) -> Result<Vec<TermDescriptor>, TableError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    if header != HEADER {
        return Err(TableError::Header(header));
    }
    reader
        .records()
        .enumerate()
        .map(|(n, record)| parse_record(n, &record?))
        .collect()
}

fn parse_record(record: usize, r: &csv::StringRecord) -> Result<TermDescriptor, TableError> {
    let bad = |column: &'static str, value: &str| TableError::Field {
        record,
        column,
        value: value.to_string(),
    };
    let number = |column: &'static str, value: &str| -> Result<usize, TableError> {
        value.parse().map_err(|_| bad(column, value))
    };
    let numbers = |column: &'static str, value: &str| -> Result<Vec<usize>, TableError> {
        value
            .split_whitespace()
            .map(|v| number(column, v))
            .collect()
    };
    let vector = parse_vector(&r[2]).ok_or_else(|| bad("v_t", &r[2]))?;
    let sign = match &r[3] {
        "+" => Sign::Positive,
        "-" => Sign::Negative,
        other => return Err(bad("sign", other)),
    };
    let eps = parse_eps(&r[6]).ok_or_else(|| bad("eps", &r[6]))?;
    Ok(TermDescriptor {
        depth: number("t", &r[0])?,
        size: number("k_t", &r[1])?,
        sign,
        deleted_rows: numbers("deleted_rows", &r[4])?,
        deleted_cols: numbers("deleted_cols", &r[5])?,
        eps,
        vector,
    })
}

/// `[3,4,4;4]`; the sentinel tells the kind apart (`D` for lambda, `D + 1`
/// for delta).
pub fn parse_vector(text: &str) -> Option<DepthVector> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    let (leading, sentinel) = inner.split_once(';')?;
    let leading: Vec<usize> = leading
        .split(',')
        .map(|v| v.trim().parse().ok())
        .collect::<Option<_>>()?;
    let sentinel: usize = sentinel.trim().parse().ok()?;
    let kind = if sentinel == leading.len() {
        MatrixKind::Lambda
    } else if sentinel == leading.len() + 1 {
        MatrixKind::Delta
    } else {
        return None;
    };
    DepthVector::new(kind, &leading).ok()
}

/// `e()`, `e(j,2)` or `e((k,3),(j,2))`, rows named by letter.
pub fn parse_eps(text: &str) -> Option<EpsilonProduct> {
    let inner = text.strip_prefix("e(")?.strip_suffix(')')?;
    let pairs: Option<Vec<IndexPair>> = inner
        .split(['(', ')'])
        .map(|s| s.trim_matches(','))
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (row, coord) = pair.split_once(',')?;
            let point = (1..=sos::sos_sign::MAX_TABLE_SIZE).find(|&r| row_name(r) == row)?;
            IndexPair::new(point, coord.parse().ok()?).ok()
        })
        .collect();
    Some(EpsilonProduct::from_pairs(pairs?))
}
