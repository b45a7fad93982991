//! Cobordism calculus for measured families of manifolds.
//!
//! The library is organized around three increasingly analytic layers:
//!
//! * exact combinatorial data: measure spaces with atoms and circle
//!   segments, their automorphisms, suspensions, and cobordism witnesses
//!   ([`measure`], [`cobordism`]);
//! * exact characteristic-class algebra: integer partitions, truncated
//!   cohomology rings of products of complex projective spaces, Pontryagin
//!   number tables and exact linear solving over the rationals
//!   ([`charclass`]);
//! * floating-point geometry: Grassmann connections on projection fields
//!   over charted grids, curvature integrals of invariant polynomials, and
//!   quadrature over prisms with a Stokes consistency check ([`chernweil`],
//!   [`prism`]).
//!
//! All exact quantities are arbitrary-precision rationals ([`scalar::Scalar`]);
//! floating-point enters only where a grid resolution does.
//!
//! The `lamina` binary exposes the same operations as subcommands; the
//! `examples/` directory walks through each capability as a library client.

pub mod charclass;
pub mod chernweil;
pub mod cli;
pub mod cobordism;
pub mod measure;
pub mod prism;
pub mod scalar;
