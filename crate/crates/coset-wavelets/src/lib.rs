//! Construction and verification of multivariate biorthogonal wavelet
//! refinement masks by the coset sum method (and by tensor product for
//! comparison), together with the associated wavelet systems and fast
//! multilevel transforms with operation counting.
//!
//! All in-scope filters have dyadic rational coefficients, so constructions
//! and algebraic predicates (interpolatory, biorthogonality, accuracy,
//! extension-principle conditions) run bit-exactly; a float mode exists for
//! the irrational counterexample and for large transform data.
//!
//! ```
//! use coset_wavelets::{analysis, catalog, construct, cosets, system};
//!
//! // a biorthogonal univariate pair: the order-4 interpolatory mask and
//! // its dual U(3 - 2U)
//! let u = catalog::deslauriers_dubuc(2);
//! let s = catalog::dd_dual(2);
//!
//! // lift both to 3-D by coset sum; the pair stays biorthogonal
//! let reps = cosets::CosetReps::standard(3);
//! let tau = construct::coset_sum(&s, &reps)?;
//! let taud = construct::coset_sum(&u, &reps)?;
//! assert!(analysis::is_biorthogonal(&tau, &taud)?.pass);
//! assert_eq!(analysis::accuracy_number(&taud, 16)?.accuracy, 4);
//!
//! // the full wavelet system, with dual wavelet masks in closed form,
//! // satisfies the extension-principle conditions exactly
//! let sys = system::build_coset_system(&s, &u, 3)?;
//! assert!(sys.verify()?.pass);
//! # Ok::<(), coset_wavelets::Error>(())
//! ```

pub mod analysis;
pub mod catalog;
pub mod construct;
pub mod cosets;
pub mod error;
pub mod filter;
pub mod io;
pub mod mask;
pub mod scalar;
pub mod system;
pub mod transform;

pub use error::{Error, Result};
pub use filter::{Filter, MultiIndex, ParityPoint};
pub use mask::{AnyMask, Mask};
pub use scalar::{Coeff, Dyadic, ScalarValue};
