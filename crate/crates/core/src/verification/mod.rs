//! Independent checks of the engine: the straight-ray oracle, the
//! closed-form catalog, the conservation-form test, the two shape-operator
//! routes and the suite that runs them.

mod catalog;
mod conservation;
mod forms;
mod oracle;
mod report;
mod sampling;
mod suite;

pub use catalog::{
    catalog_auxiliaries, catalog_coefficients, catalog_entry, ellipsoid_coordinates, printed_coefficients, Auxiliaries,
    Auxiliary, CatalogEntry, CatalogTrust,
};
pub use conservation::{
    conservation_check, conservation_check_with_tolerance, ConservationFactor, ConservationReason, ConservationReport,
    CONSERVATION_TOL, DEFAULT_ANGULAR_SAMPLES, DEFAULT_SPATIAL_SAMPLES, MIN_SAMPLES,
};
pub use forms::{align_shape_operator, eigenvalues, kb_transform_residual, shape_operator_via_fundamental_forms, MIN_METRIC_DET};
pub use oracle::{ray_oracle, RayOracleResult, DEFAULT_RAY_STEP, RAY_POLAR_GAP};
pub use report::{
    format_f64, to_json_string, to_json_writer, CheckResult, CheckStatus, PreciseFormatter, Report, ReportMeta, REPORT_VERSION,
};
pub use sampling::{rng_for, sample_angles, sample_point, sample_state, MU_LIMIT};
pub use suite::*;
