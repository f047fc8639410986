//! Information geometry of exponential families and their Kählerifications.
//!
//! The crate follows one pipeline: an exponential family with its natural and
//! expectation charts ([`families`]), the Fisher metric and alpha-connections
//! ([`geometry`]), the Kähler structure on the tangent bundle ([`dombrowski`]),
//! and the spectral theory of Kähler functions on projective space
//! ([`projective`]), the sphere ([`spin`]) and the plane ([`oscillator`]).
//! [`verify`] bundles the numerical identity checks into seeded suites.

pub mod dombrowski;
pub mod error;
pub mod expr;
pub mod families;
pub mod geometry;
pub mod linalg;
pub mod oscillator;
pub mod projective;
pub mod quadrature;
pub mod spin;
pub mod verify;

pub use dombrowski::{Observable, SplitTangentVector, TangentBundlePoint, TangentKahlerStructure};
pub use error::{Error, Result};
pub use families::{ExpectationPoint, ExponentialFamilySpec, MeasuredSpace, NaturalPoint};
pub use geometry::{Chart, ChristoffelTensor, CurvatureTensor, MetricMatrix};
pub use linalg::{CMatrix, CVector, C64};
pub use oscillator::{GaussianLaw, OscillatorOperator, PlaneKahlerFunction, PlanePoint};
pub use projective::{FsScale, KahlerObservableCP, ProjectivePoint, SpectralReport};
pub use spin::{RepMatrix, SphereDecomposition, SphereKahlerFunction, SpherePoint, SpinLaw};
pub use verify::{CheckResult, Suite, TolProfile, VerifyOptions, VerifyReport};
