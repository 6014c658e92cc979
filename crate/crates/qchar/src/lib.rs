//! Exact q-characters and q,t-characters of quantum affinizations.
//!
//! The classical worklist expands a dominant monomial into its character
//! using single-node kernels; the t-deformed variant runs the same worklist
//! over `Z[t^{+-1}]` with the twisted product. The `checks` module turns the
//! structural statements about these characters into executable reports.

pub mod cache;
pub mod cartan;
pub mod character;
pub mod checks;
pub mod error;
pub mod fm;
pub mod io;
pub mod laurent;
pub mod monomial;
pub mod qt;
pub mod sl2;

pub use cartan::{build_cartan, CartanData, Family};
pub use character::{Character, Coeff, QCharacter};
pub use error::{AlgoError, CartanError, ParseError};
pub use fm::{
    classical_algorithm, fundamental_qcharacter, kernel_decompose, restrict_l_j,
    standard_qcharacter, Limits,
};
pub use laurent::{Laurent, TPoly};
pub use monomial::{AVector, Monomial};
pub use qt::{qt_fundamental, qt_standard, specialize_t1, star_t, t_algorithm, TCharacter};
