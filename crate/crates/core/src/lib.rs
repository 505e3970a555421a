//! Decides whether an Anderson t-module over the perfection of F_q(θ) is
//! abelian and whether it is pure, using exact skew Laurent series arithmetic
//! and Newton polygons over K((σ))[t].

pub mod analyzer;
pub mod base_field;
pub mod error;
pub mod expr;
pub mod fq;
pub mod matrix_normal_forms;
pub mod newton;
pub mod poly;
pub mod random;
pub mod sigma_poly;
pub mod skew_sigma;
pub mod skew_tau;

pub use analyzer::{
    analyze, check_condition_1, check_condition_2, check_condition_2prime, decide, quick_check, AnalysisReport,
    AnalyzeOptions, CertificateKind, Purity, RankCertificate, TModule, Verdict,
};
pub use base_field::{FieldConfig, FieldMode, PerfectField, PerfectFieldElement};
pub use error::{Error, Result};
pub use matrix_normal_forms::{
    aggregated_edges, diagonal_profile_mod, diagonalize_sigma_t, rank_mod, DiagonalProfile, DiagonalizeOptions,
    SigmaMatrix, SigmaTMatrix,
};
pub use newton::{Edge, NewtonPolygon, Slope};
pub use sigma_poly::{Side, SigmaTPoly};
pub use skew_sigma::{Precision, QuotientRingElement, SkewLaurent, Valuation};
pub use skew_tau::{SkewTauPoly, TauMatrix};
