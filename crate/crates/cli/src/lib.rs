//! Command-line front end for the `sos` predicates, demo algorithms and
//! term-table generator.
//!
//! [`run`] executes one command line and returns what would be printed,
//! which keeps the binary trivial and the commands testable.

pub mod input;
pub mod table;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sos::eps_order::MatrixKind;
use sos::geom_algorithms::{
    convex_hull_2d_with, degeneracy_report, delaunay_2d_tracked, point_in_polygon_tracked,
    Classification, DegeneracyMetrics, GeomError, HullOptions, Polygon,
};
use sos::predicates::{
    above, in_sphere, on_positive_side, positive, smaller, CoordMode, CoordRef, Decision,
    Hyperplane, NonverticalHyperplane, Point, PointSet, PredicateError,
};
use sos::sos_sign::{emit_straightline_code, generate_term_table, CodeStyle, SosError};
use thiserror::Error;

use crate::input::{parse_objects, InputError};
use crate::table::TableError;

#[derive(Debug, Parser)]
#[command(
    name = "sos",
    version,
    about = "Exact geometric predicates that never degenerate"
)]
pub struct Cli {
    /// Append a degeneracy report: calls per predicate and depth histogram.
    #[arg(long, global = true)]
    pub depths: bool,
    /// How coordinate rows are read.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Cartesian)]
    pub mode: Mode,
    /// Skip the exact on-boundary test in `pip`.
    #[arg(long, global = true)]
    pub no_pretest: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Cartesian,
    Homogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Lambda,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Case,
    Unrolled,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orientation of d+1 points in d dimensions (one point per line).
    Orient { file: PathBuf },
    /// Classify a point against a polygon (one vertex per line).
    #[command(allow_negative_numbers = true)]
    Pip { polygon: PathBuf, x: i64, y: i64 },
    /// Counterclockwise convex hull of planar points.
    Hull2d {
        file: PathBuf,
        /// Drop hull vertices on the unperturbed line through their neighbours.
        #[arg(long)]
        merge_collinear: bool,
    },
    /// Delaunay triangulation of planar points.
    Delaunay2d { file: PathBuf },
    /// Is the last of d+2 points inside the sphere through the others?
    Insphere { file: PathBuf },
    /// Does the common point of the first d nonvertical hyperplanes lie above the last?
    Above { file: PathBuf },
    /// Does the common point of the first d hyperplanes lie on the positive side of the last?
    Side { file: PathBuf },
    /// Compare two perturbed coordinates: point index, coordinate number, value, twice.
    #[command(allow_negative_numbers = true)]
    Smaller {
        i: usize,
        j: usize,
        a: i64,
        k: usize,
        l: usize,
        b: i64,
    },
    /// Print the table of relevant terms of a perturbed determinant.
    Gentable {
        #[arg(value_enum)]
        kind: Kind,
        dim: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a straight-line program evaluating a perturbed determinant sign.
    Gencode {
        #[arg(value_enum)]
        kind: Kind,
        dim: usize,
        #[arg(long, value_enum, default_value_t = Style::Case)]
        style: Style,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: InputError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Everything a command run produces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses and executes one command line (including the program name).
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunOutput {
                    stderr: text,
                    code: 2,
                    ..Default::default()
                }
            } else {
                RunOutput {
                    stdout: text,
                    ..Default::default()
                }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => RunOutput {
            stdout,
            ..Default::default()
        },
        Err(e) => RunOutput {
            stderr: format!("error: {e}\n"),
            code: 2,
            ..Default::default()
        },
    }
}

fn read_objects(path: &Path) -> Result<Vec<Vec<i64>>, CliError> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_objects(&text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn expect_count(what: &str, expected: usize, actual: usize) -> Result<(), CliError> {
    if expected == actual {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{what} needs {expected} rows, found {actual}"
        )))
    }
}

fn points(rows: Vec<Vec<i64>>) -> Vec<Point> {
    rows.into_iter()
        .enumerate()
        .map(|(i, c)| Point::new(i, c))
        .collect()
}

fn boolean(out: &mut String, name: &'static str, d: Decision, metrics: &mut DegeneracyMetrics) {
    metrics.record(name, d.depth);
    writeln!(out, "{}", d.value).unwrap();
}

fn planar(rows: &[Vec<i64>]) -> Result<PointSet, CliError> {
    Ok(PointSet::new(2, CoordMode::Cartesian, rows)?)
}

fn matrix_kind(kind: Kind) -> MatrixKind {
    match kind {
        Kind::Lambda => MatrixKind::Lambda,
        Kind::Delta => MatrixKind::Delta,
    }
}

fn cartesian_only(cli: &Cli, command: &str) -> Result<(), CliError> {
    if cli.mode == Mode::Homogeneous {
        return Err(CliError::Usage(format!(
            "{command} takes Cartesian coordinates only"
        )));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let mut out = String::new();
    let mut metrics = DegeneracyMetrics::new();
    match &cli.command {
        Command::Orient { file } => {
            let rows = read_objects(file)?;
            let mode = match cli.mode {
                Mode::Cartesian => CoordMode::Cartesian,
                Mode::Homogeneous => CoordMode::Homogeneous,
            };
            let width = rows[0].len();
            let expected = match mode {
                CoordMode::Cartesian => width + 1,
                CoordMode::Homogeneous => width,
            };
            expect_count("orient", expected, rows.len())?;
            let pts = points(rows);
            let refs: Vec<&Point> = pts.iter().collect();
            let d = positive(&refs, mode)?;
            metrics.record("positive", d.depth);
            let word = if d.value { "positive" } else { "negative" };
            writeln!(out, "{word} depth={}", d.depth).unwrap();
        }
        Command::Pip { polygon, x, y } => {
            cartesian_only(cli, "pip")?;
            let rows = read_objects(polygon)?;
            let vertices: Vec<[i64; 2]> = rows
                .iter()
                .map(|r| <[i64; 2]>::try_from(r.as_slice()))
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage("polygon vertices need 2 coordinates".into()))?;
            let poly = Polygon::new(&vertices)?;
            let r = point_in_polygon_tracked([*x, *y], &poly, !cli.no_pretest, &mut metrics);
            if r.classification == Classification::Boundary {
                writeln!(out, "boundary").unwrap();
            } else {
                writeln!(
                    out,
                    "{} {} depth={}",
                    r.classification, r.crossings, r.max_depth
                )
                .unwrap();
            }
        }
        Command::Hull2d {
            file,
            merge_collinear,
        } => {
            cartesian_only(cli, "hull2d")?;
            let ps = planar(&read_objects(file)?)?;
            let options = HullOptions {
                merge_collinear: *merge_collinear,
            };
            let hull = convex_hull_2d_with(&ps, options, &mut metrics)?;
            let line: Vec<String> = hull.iter().map(usize::to_string).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        Command::Delaunay2d { file } => {
            cartesian_only(cli, "delaunay2d")?;
            let ps = planar(&read_objects(file)?)?;
            let tri = delaunay_2d_tracked(&ps, &mut metrics)?;
            for [a, b, c] in tri.sorted_triples() {
                writeln!(out, "{a} {b} {c}").unwrap();
            }
        }
        Command::Insphere { file } => {
            cartesian_only(cli, "insphere")?;
            let rows = read_objects(file)?;
            expect_count("insphere", rows[0].len() + 2, rows.len())?;
            let pts = points(rows);
            let refs: Vec<&Point> = pts.iter().collect();
            boolean(&mut out, "in_sphere", in_sphere(&refs)?, &mut metrics);
        }
        Command::Above { file } => {
            let rows = read_objects(file)?;
            expect_count("above", rows[0].len() + 1, rows.len())?;
            let planes: Vec<NonverticalHyperplane> = rows
                .into_iter()
                .enumerate()
                .map(|(i, c)| NonverticalHyperplane::new(i, c))
                .collect();
            let refs: Vec<&NonverticalHyperplane> = planes.iter().collect();
            boolean(&mut out, "above", above(&refs)?, &mut metrics);
        }
        Command::Side { file } => {
            let rows = read_objects(file)?;
            expect_count("side", rows[0].len(), rows.len())?;
            let planes = rows
                .into_iter()
                .enumerate()
                .map(|(i, c)| Hyperplane::new(i, c))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Hyperplane> = planes.iter().collect();
            boolean(
                &mut out,
                "on_positive_side",
                on_positive_side(&refs)?,
                &mut metrics,
            );
        }
        Command::Smaller { i, j, a, k, l, b } => {
            if *j == 0 || *l == 0 {
                return Err(CliError::Usage("coordinate numbers start at 1".into()));
            }
            let value = smaller(CoordRef::new(*i, *j, *a), CoordRef::new(*k, *l, *b))?;
            writeln!(out, "{value}").unwrap();
        }
        Command::Gentable { kind, dim, format } => {
            let terms = generate_term_table(matrix_kind(*kind), *dim)?;
            out = match format {
                Format::Csv => table::to_csv(&terms)?,
                Format::Text => table::to_text(&terms),
            };
        }
        Command::Gencode { kind, dim, style } => {
            let style = match style {
                Style::Case => CodeStyle::Case,
                Style::Unrolled => CodeStyle::Unrolled,
            };
            out = emit_straightline_code(matrix_kind(*kind), *dim, style)?;
        }
    }
    if cli.depths {
        out.push_str(&degeneracy_report(&metrics).to_string());
    }
    Ok(out)
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book {}
