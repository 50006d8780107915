//! Cusp forms of level one: exact bases, Hecke eigenforms, Petersson norms and
//! the symmetric-square L-function.

mod eigen;
mod petersson;
pub mod poly;
mod qexp;
pub mod series;
mod sym2;

pub use eigen::{eigenforms, EigenCache, EigenCacheEntry, EigenTable, HeckeEigenform, HeckeSpace};
pub use petersson::{petersson_norm, petersson_norm_hybrid, petersson_terms, PeterssonOptions};
pub use qexp::{victor_miller_basis, QExpansion};
pub use series::cusp_dimension;
pub use sym2::{sym2_l1_from_norm, Sym2LFunction};
