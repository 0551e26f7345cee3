//! Combinatorial chain complexes over `k[x_1..x_n]/I` with `I` generated by quadratic
//! monomials: construction, chain-complex verification, graded homology, and Ext.

pub mod complex;
pub mod diagram;
pub mod ext;
pub mod field;
pub mod homology;
pub mod hunt;
pub mod linalg;
pub mod oracles;
pub mod ring;

pub use complex::{FreeComplex, Orientation};
pub use diagram::{Diagram, DiagramError, Sign};
pub use field::Field;
pub use ring::{Monomial, RingElement, RingSpec};
