//! Numerical tolerances, collected in one place so tests and runtime
//! checks agree on the same constants.

/// Max |a(i,j) - conj(a(j,i))| for a matrix accepted as Hermitian.
pub const HERMITIAN: f64 = 1e-12;

/// Eigenpair residual bound: ||M v - lambda v|| <= EIG_RESIDUAL_REL * ||M||.
pub const EIG_RESIDUAL_REL: f64 = 1e-9;

/// Pairwise defect bound for an orthonormal eigenvector set.
pub const ORTHONORMAL: f64 = 1e-10;

/// Entrywise bound for reconstructing M from its eigendecomposition.
pub const RECONSTRUCTION: f64 = 1e-8;

/// Relative half-width (times the spectral norm) of the band counted as
/// one degenerate eigenvalue cluster.
pub const DEGENERACY_REL: f64 = 1e-8;

/// Largest imaginary residue discarded when a trace should be real.
pub const IMAG_RESIDUE: f64 = 1e-10;

/// Unit-norm defect allowed for Bloch vectors.
pub const BLOCH_NORM: f64 = 1e-12;

/// Trace-one defect allowed for density matrices.
pub const DENSITY_TRACE: f64 = 1e-12;

/// Most negative admissible density-matrix eigenvalue.
pub const DENSITY_EIG_FLOOR: f64 = -1e-10;

/// Most negative admissible outcome probability; values in
/// [PROB_FLOOR, 0) are clamped to zero, anything lower is an error.
pub const PROB_FLOOR: f64 = -1e-12;

/// Normalization defect bound for an outcome probability table.
pub const PROB_SUM: f64 = 1e-10;

/// Bound on the magnitude of every odd-weight Pauli correlation of the
/// top-eigenspace mixture.
pub const ODD_CORRELATION: f64 = 1e-10;

/// Agreement bound between the analytic success probability and the
/// exact sum over inputs and outcomes.
pub const EXACT_ORACLE: f64 = 1e-9;
