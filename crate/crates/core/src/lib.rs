//! Exact computation around polynomial values in small multiplicative
//! subgroups of prime fields: value sets over intervals and their
//! intersection with subgroups, iterated product sets, the extremal
//! subgroup order, simultaneous small-residue reduction, integer point
//! counts on conics, and a sweep harness that confronts exact counts with
//! reference bound formulas.
//!
//! All counting is exact integer arithmetic; floating point appears only
//! in the report-only bound formulas. The `parallel` feature (on by
//! default) runs the heavy scans on rayon; without it everything falls
//! back to sequential loops with identical results.

pub mod bounds;
pub mod field;
pub mod poly;
pub mod quadrics;
pub mod small_residues;
pub mod value_sets;

pub use bounds::{pigeonhole_check, ratio_sweep, BoundKind, BoundReport, SweepGrid};
pub use field::{FieldContext, SubgroupSpec};
pub use poly::{build_pxy, build_q_lambda, MultiPolyZ, PolySpec, RationalSpec};
pub use quadrics::{centered_lift, congruence_pairs, CenteredLift, ConicClass, IntConic};
pub use small_residues::{centered_residue, ReductionProblem, ReductionSolution};
pub use value_sets::{
    count_intersection, count_intersection_poly, product_set_cardinality, t_f, t_r, value_set,
    value_set_poly, IntervalSpec, TfResult,
};
