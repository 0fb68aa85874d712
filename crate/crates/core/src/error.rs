use thiserror::Error;

#[derive(Debug, Error)]
pub enum SptError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group or degree mismatch: {0}")]
    Mismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix-size budget exceeded: {0}")]
    Budget(String),
    #[error("integer linear solve failed: {0}")]
    LinearSolve(String),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("snap to (1/{m})Z/Z failed: value {value} is {distance} from the lattice (limit {limit})")]
    Snap { value: f64, m: u64, distance: f64, limit: f64 },
    #[error("snapped degree-1 cochain is not a homomorphism")]
    Homomorphism,
    #[error("transfer operator has a degenerate leading eigenvalue (multiplicity {multiplicity})")]
    DegenerateTransfer { multiplicity: usize },
    #[error("MPS is not injective at any tested blocking length")]
    NotInjective,
    #[error("state is not invariant under group element {element}: |lambda| = {modulus}")]
    NotSymmetric { element: usize, modulus: f64 },
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("matrix is not unitary (deviation {0})")]
    NonUnitary(f64),
    #[error("matrices are not a projective representation (residual {0})")]
    NotProjective(f64),
    #[error("gate does not commute with the symmetry action (deviation {0})")]
    NonSymmetricGate(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}
