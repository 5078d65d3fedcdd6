//! Exact quantum cluster monomials computed two ways: by quantum seed
//! mutation and by conjugation with products of quantum dilogarithms, with
//! quivers with potential, decorated representations and finite-field
//! quiver Grassmannian counts as supporting machinery.

pub mod qtorus;
pub mod linalg;
pub mod seed;
pub mod quiver_qp;
pub mod decorated_rep;
pub mod dt_series;
pub mod grassmannian;
