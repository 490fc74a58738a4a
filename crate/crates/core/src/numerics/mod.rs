//! Shared numerical kernel: special functions, multivariate normal rectangle
//! probabilities, quadrature, root finding, pseudo-inverse, random streams.

pub mod matrix;
pub mod mvn;
pub mod quad;
pub mod rng;
pub mod special;

pub use matrix::{pseudo_inverse, Matrix};
pub use mvn::{mvn_rect_prob, mvn_rect_prob_opts, MvnOpts};
pub use quad::{find_root, integrate};
pub use rng::RngStream;
pub use special::{brownian_sup_sf, chisq_sf, normal_cdf, normal_pdf, normal_quantile};
