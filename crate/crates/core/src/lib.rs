//! Numerical toolkit for wandering-domain models: hyperbolic geometry on
//! canonical domains, the annulus power tower, connectivity classification,
//! the four-stage model map and boundary-distance probes.

pub mod boundary;
pub mod cli;
pub mod hypgeo;
pub mod modelmap;
pub mod quadrature;
pub mod silhouette;
pub mod tower;
