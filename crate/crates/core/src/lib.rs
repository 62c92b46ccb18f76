//! Exact geometric predicates over integer inputs that never report a
//! degenerate answer.
//!
//! Every coordinate is perturbed by a distinct, infinitesimally small power of
//! a symbolic `ε`. Determinant signs of the perturbed input are decided
//! exactly, falling back along a fixed sequence of subdeterminants whenever
//! the unperturbed value is zero.

pub mod eps_order;
pub mod exact_arith;
pub mod geom_algorithms;
pub mod predicates;
pub mod sos_sign;

pub use eps_order::{
    index_set_smaller, next_v, pair_precedes, DepthVector, EpsError, EpsilonProduct, IndexPair,
    MatrixKind, TermDescriptor,
};
pub use exact_arith::{
    determinant_exact, hadamard_bound, sign_of_determinant, ArithError, ArithPolicy, Entry,
    IntMatrix, Sign,
};
pub use geom_algorithms::{
    convex_hull_2d, degeneracy_report, delaunay_2d, on_boundary, point_in_polygon, Classification,
    DegeneracyMetrics, GeomError, PipResult, Polygon, Triangulation,
};
pub use predicates::{
    above, in_sphere, intersect_half_line, on_positive_side, positive, smaller, sort_indices,
    CoordMode, CoordRef, Decision, Hyperplane, NonverticalHyperplane, Point, PointSet,
    PredicateError,
};
pub use sos_sign::{
    emit_straightline_code, generate_term_table, sign_det_sos, sign_det_sos_with, CodeStyle,
    SosError, SosMatrix, SosSignResult,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/depth-vectors.md")]
    mod depth_vectors {}
    #[doc = include_str!("../../../book/src/predicates.md")]
    mod predicates {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    mod algorithms {}
}
