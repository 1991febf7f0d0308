use crate::algebra::Complex;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("polynomial degree {0} is outside the supported range 1..=4")]
    DegreeOutOfRange(usize),
    #[error("leading coefficient is negligible relative to the others")]
    DegreeDeficient,
    #[error("simultaneous iteration did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("principal root of zero is undefined")]
    ZeroInput,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("|lambda| = {0} is not unimodular")]
    NotUnimodular(f64),
    #[error("zero {0} does not lie strictly inside the unit disk")]
    ZeroOutsideDisk(Complex),
    #[error("a Blaschke product needs at least one zero")]
    NoZeros,
    #[error("automorphism base point {0} is outside the unit disk")]
    OutsideDisk(Complex),
    #[error("critical point extraction found {found} points in the disk, expected {expected}")]
    SolverFailure { expected: usize, found: usize },
    #[error("zeros are not equally spaced on a circle centred at the origin")]
    NotEquallySpaced,
    #[error("expected degree {expected}, got {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("critical values coincide")]
    DegenerateCriticalValues,
    #[error("no construction for degree {0} with non-equally-spaced zeros")]
    UnsupportedInput(usize),
    #[error("U radicand vanishes at w = {0}")]
    ZeroU(Complex),
    #[error("continuation step collapsed near z = {z}")]
    StepCollapse { z: Complex },
    #[error("{passing} continuation seeds passed, expected exactly one")]
    BranchSelectionFailure { passing: usize },
    #[error("fiber roots are indistinguishable at z = {0}")]
    AmbiguousFiber(Complex),
    #[error("boundary image self-intersects between parameters {0} and {1}")]
    SelfIntersection(f64, f64),
    #[error("operation requires a generic degree-three model")]
    WrongCase,
    #[error("invalid polar grid: {0}")]
    InvalidGrid(String),
    #[error("seed index {0} is not in 0..3")]
    InvalidSeed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
