//! Star transform tomography in two dimensions.
//!
//! A star is a union of rays emanating from a common vertex along fixed unit
//! directions; the star transform maps an image to its weighted sums of ray
//! integrals over all vertex positions. This crate implements:
//!
//! - construction and classification of star configurations ([`star_geometry`]),
//! - the singular-direction machinery deciding invertibility and inversion
//!   stability ([`stability`]),
//! - pixel grids, analytic phantoms, and error metrics ([`image`]),
//! - numerical divergent-beam, star, half-plane, and Radon transforms
//!   ([`transforms`]),
//! - exact inversion through the Radon domain plus filtered backprojection
//!   ([`inversion`]),
//! - joint attenuation/scattering recovery for single-scattering imaging
//!   ([`scatter`]).

pub mod geom;
pub mod image;
pub mod inversion;
pub mod scatter;
pub mod stability;
pub mod star_geometry;
pub mod transforms;

pub use image::{gaussian_bump, shepp_logan, ImageGrid, PhantomSpec};
pub use inversion::{FillStrategy, FilterKind, InversionSettings};
pub use stability::{ScanSettings, SingularityReport};
pub use star_geometry::StarConfig;
pub use transforms::{Sinogram, StarField};
