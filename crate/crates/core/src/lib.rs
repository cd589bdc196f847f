//! Optimal-speed (quantum brachistochrone) Hamiltonians on `CP^{n-1}` and the
//! equigeodesic vectors of the flag manifold `SU(n)/S(U(1) x U(n-1))` that
//! generate them.

pub mod error;
pub mod evolution;
pub mod lie_flag;
pub mod numerics;
pub mod quantum_states;
pub mod random;
pub mod synthesis;

pub use error::{Error, Result};
pub use lie_flag::{BlockStructure, MetricOperator, SuVector};
pub use numerics::{ComplexMatrix, ComplexVector, Tolerances};
pub use quantum_states::{DensityMatrix, PureState, QuasiPureSpec, Units};
pub use synthesis::{OptimalityVerdict, VerdictKind};
