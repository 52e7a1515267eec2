//! Exact stationary measures of the open ASEP through linear functionals on
//! the q-deformed Weyl algebra, with the supporting q-special functions,
//! a brute-force Markov-chain oracle, TASEP closed forms and a matrix model.

pub mod algebra;
pub mod asep;
pub mod exact;
pub mod functionals;
pub mod matmodel;
pub mod oracle;
pub mod qspecial;
pub mod tasep;

pub use algebra::{Algebra, Gen, NPoly, Word};
pub use asep::{AsepError, AsepParams, Dist};
pub use exact::{parse_rat, ExactError, QExt, Rat, Theta, ThetaCtx};
pub use functionals::{build_phi0, build_phi1, FunctionalError, PhiTable, Regime};
pub use matmodel::{FiniteModel, MatError, MatModel};
pub use oracle::{Generator, OracleError};
pub use qspecial::{AwFamily, Mode, QSpecialError, UniPoly};
pub use tasep::{Series, SeriesKind, TasepError};
