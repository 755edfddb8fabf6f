//! Exact and numerical laboratory for twisted pseudodifferential calculus on
//! the quantum group SU_q(2) and the Podleś sphere.
//!
//! * [`mucalc`]: μ-derivatives, μ-binomial coefficients (exact and numeric),
//!   partial fractions and a contour-integral oracle.
//! * [`qsymbolic`]: exact normal-form engine for the crossed product
//!   O(SU_q(2)) # U_q(su2), its Hopf structure, twisting and Casimir.
//! * [`spectral`]: truncated Peter–Weyl representation of the Podleś-sphere
//!   Dirac operator, Sobolev norms, order estimates and regularity probes.
//! * [`zeta`]: weighted zeta functions, residues and twisted-trace checks.

pub mod error;
pub mod mucalc;
mod parse;
pub mod qsymbolic;
pub mod scalar;
pub mod spectral;
pub mod zeta;

pub use error::{AlgebraError, MuCalcError, ParseError, SpectralError, ZetaError};
pub use mucalc::{MuBinomialExact, WeightTuple};
pub use qsymbolic::{AlgebraElement, FiltrationOrder, TensorElement};
pub use scalar::QScalar;
pub use spectral::{OrderEstimate, TruncatedRep};
pub use zeta::ZetaReport;
