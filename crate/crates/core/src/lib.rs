//! Exact computational kernel for p-adic skew group rings over GL_n root data:
//! precision-tracked p-adic scalars, truncated Laurent series models of the
//! classical coefficient rings, finite levels of completed skew group rings,
//! the basis solvers for the equivalence of module categories, distribution
//! algebras with their multiplicative rho-norms, and the annulus calculus for
//! the microlocalized series rings.
//!
//! Everything is exact: scalars are units times p-powers at tracked relative
//! precision, norms are rational exponents of p, and every operation records
//! the window on which its output is defined.

pub mod distalg;
pub mod error;
pub mod groups;
pub mod io;
pub mod norms;
pub mod padic;
pub mod phimod;
pub mod series;
pub mod skewring;

pub use distalg::{BasisCert, DistElt, MonElt};
pub use error::{Error, Result};
pub use groups::{GroupId, QuotKey, QuotientSpec, RootDatum, TorusElt, UnitriangularElt};
pub use norms::Region;
pub use padic::{NormValue, PadicScalar, RhoExponent};
pub use series::{AnalyticityClass, LaurentSeries};
pub use skewring::SkewElt;
