//! Global tolerance hierarchy.

/// Orthonormality of adapted frames.
pub const FRAME_ORTHONORMALITY: f64 = 1e-12;
/// Distance from `D` allowed for a declared section of `D`.
pub const IN_DISTRIBUTION: f64 = 1e-10;
/// Purely algebraic identities.
pub const ALGEBRAIC: f64 = 1e-12;
/// Identities among σ_r and T_r over many random operators.
pub const SYMMETRIC_FUNCTIONS: f64 = 1e-11;
/// Identities involving one or two derivatives.
pub const DIFFERENTIAL: f64 = 1e-9;
/// Pointwise formulas assembled from many derivative terms.
pub const POINTWISE: f64 = 1e-8;
/// Symmetry of leafwise operators.
pub const OPERATOR_SYMMETRY: f64 = 1e-10;
/// `‖(Id − Π_TF)[e_i, e_j]‖`.
pub const INTEGRABILITY: f64 = 1e-9;
/// `max ‖∇^P_ξ N‖` below which a scenario counts as admissible.
pub const ADMISSIBILITY: f64 = 1e-8;
/// `‖H^⊥‖` below which `D^⊥` counts as harmonic.
pub const HARMONIC: f64 = 1e-9;
/// Lower bound for integral-formula tolerances on chart backends.
pub const QUADRATURE_FLOOR: f64 = 1e-7;
/// Integral-formula tolerance on single-node homogeneous backends.
pub const HOMOGENEOUS: f64 = 1e-9;
/// Factor applied to the divergence self-test residual.
pub const CALIBRATION_FACTOR: f64 = 10.0;
/// Allowed change under grid doubling, as a fraction of the tolerance.
pub const CONVERGENCE_FRACTION: f64 = 0.1;
