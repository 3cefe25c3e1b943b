//! Hyperkähler structures on `R^{4n}`: standard triples, orientation
//! invariants, map classification, dual structures and hyperhamiltonian
//! flows with a numerical canonicity certificate.
//!
//! The `hk` binary in the workspace drives these from JSON configs.

pub mod connection;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod structures;

pub use connection::{christoffel, covariant_constancy_residual, theta_form, ChristoffelData, GradientData};
pub use dynamics::{
    certify_canonical_flow, hyperham_field, integrate, integrate_flow, lie_decompose_4d, lie_derivative_omega,
    sphere_rotation_of_flow, FlowResult, HamiltonianTriple, HyperhamField, LieDecomposition, LinearField, VectorField,
};
pub use error::{HkError, Result};
pub use invariants::{block_restrict, block_volume_sum, p1_pairing, pfaffian_invariant, transform_rule_check, BlockIndex};
pub use maps::{
    classify_linear_map, dirac_canonical_check, dual_structure, hk_map_residuals, recover_rotation,
    standardize_at_point, ClassificationReport, DiracStructure, DualMode, PointMap,
};
pub use structures::{
    standard_block, standard_triple, Dimension, FormTriple, HkStructure, MetricField, Orientation,
    OrientationSignature, SphereCoefficient,
};
