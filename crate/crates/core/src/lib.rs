//! Polygons in Euclidean buildings: Δ-lengths, stability of weighted
//! configurations, Gauss maps, fixed-point closure and transfer.

pub mod cone_building;
pub mod io;
pub mod configurations;
pub mod coxeter;
pub mod polygons;
pub mod scalar;
pub mod spherical_building;
pub mod trees;
pub mod weightspace;
