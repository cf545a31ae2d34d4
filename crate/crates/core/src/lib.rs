//! Exact lattice arithmetic for K3-type lattices: discriminant forms,
//! reflection groups, Mukai vectors, extension orders and universal Chern
//! class identities.

pub mod chern;
pub mod error;
pub mod extorder;
pub mod intlat;
pub mod linalg;
pub mod moduli;
pub mod monodromy;
pub mod mukai;
pub mod numtheory;

pub use error::{Error, Result};
