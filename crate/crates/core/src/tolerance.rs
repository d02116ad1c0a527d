/// Numerical tolerances shared by validation and structure checks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Max absolute entry of `M - M†` accepted as Hermitian.
    pub hermitian: f64,
    /// Smallest eigenvalue still accepted as positive semidefinite.
    pub positivity: f64,
    /// Slack on `trace <= 1`.
    pub trace: f64,
    /// Squared-norm deviation accepted for pure states.
    pub normalization: f64,
    /// Max deviation of `U†U` from the identity.
    pub unitary: f64,
    /// Completeness slack for Kraus channels and POVMs.
    pub completeness: f64,
    /// Eigenvalues below this are dropped from entropy sums.
    pub entropy_cutoff: f64,
    /// Entropic equalities in the Darwinism conditions.
    pub information: f64,
    /// Block-diagonality and conditional-state orthogonality.
    pub structure: f64,
    /// Conditional blocks with probability at or below this are skipped.
    pub probability_floor: f64,
    /// Trace deviation from one accepted for entropy inputs.
    pub normalized_trace: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        positivity: 1e-10,
        trace: 1e-10,
        normalization: 1e-12,
        unitary: 1e-10,
        completeness: 1e-8,
        entropy_cutoff: 1e-12,
        information: 1e-6,
        structure: 1e-8,
        probability_floor: 1e-10,
        normalized_trace: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
