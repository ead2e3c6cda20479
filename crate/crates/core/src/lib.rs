//! Cayley graphs of groups of Lie type with small isoperimetric ratio.
//!
//! * [`gf`]: arithmetic in GF(p^k).
//! * [`rootsys`]: root systems of types A, B, C, D, Weyl words and the orbit
//!   identities behind the boundary bounds.
//! * [`twistsys`]: diagram automorphisms, fundamental sets and twisted
//!   Coxeter words.
//! * [`slcayley`]: the SL(l+1, q) construction, group enumeration and exact
//!   boundary computation.
//! * [`spectral`]: second adjacency eigenvalue and Cheeger consistency.

pub mod gf;
pub mod report;
pub mod rootsys;
pub mod slcayley;
pub mod spectral;
pub mod twistsys;
