//! Kernel distributions, generating-function accessibility between kernel
//! families, and continuous mixtures over a kernel's free parameters.
//!
//! ```
//! use mixident::kernels::KernelDistribution;
//!
//! let k: KernelDistribution = "gamma:r=2,theta=1".parse().unwrap();
//! assert!((k.mgf(0.5).unwrap() - 4.0).abs() < 1e-12);
//! ```

pub mod accessibility;
pub mod defun;
pub mod error;
pub mod expr;
pub mod kernels;
pub mod mixtures;
pub mod special;
pub mod transforms;

pub use accessibility::{AccessibilityMapping, SGrid, VerificationReport};
pub use defun::DifferentiatedErrorFunction;
pub use error::{Error, Result};
pub use expr::Expr;
pub use kernels::{Family, KernelDistribution, Strip};
pub use mixtures::{MixingDensity, MixtureModel};
pub use transforms::{CharacteristicFunction, QuadratureConfig, SymmetryHint};
