//! Cluster variables with principal coefficients for Gale-Robinson quivers,
//! computed three ways: quiver mutation, the coefficient recurrence, and
//! weighted perfect matchings of pinecone graphs cut from a brane tiling.

pub mod galerob;
pub mod kuo;
pub mod laurent;
pub mod matching;
pub mod pinecone;
pub mod quiver;
pub mod render;
pub mod tiling;

pub use galerob::GRSpec;
pub use laurent::{LaurentPolynomial, Monomial, Var};
