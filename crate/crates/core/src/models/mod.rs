//! Built-in models and the name registry used by the command line.

mod oscillator;
mod six_site;

pub use oscillator::{
    oscillator_analytic, oscillator_matrix, oscillator_product_expectation, OscillatorModel,
};
pub use six_site::{six_site_analytic_eigenvalues, six_site_branches, six_site_c2v, SixSiteModel};

use crate::error::{Error, Result};
use crate::model::ParametricModel;

/// Registry names, in listing order.
pub const MODEL_NAMES: [&str; 2] = ["six-site", "oscillator"];

/// Parameters accepted by registry models; ignored where irrelevant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub n_max: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            n_max: 12,
        }
    }
}

/// One-line description for listings.
pub fn describe(name: &str) -> Option<&'static str> {
    match name {
        "six-site" => Some("6x6 two-chain matrix with lambda bonds; crossings at lambda = 1 (lambda > 0)"),
        "oscillator" => Some("x*y coupled 2D oscillator in a shell-truncated basis (--omega, --nmax; |lambda| < omega^2)"),
        _ => None,
    }
}

pub fn by_name(name: &str, params: &ModelParams) -> Result<Box<dyn ParametricModel>> {
    match name {
        "six-site" => Ok(Box::new(SixSiteModel::new())),
        "oscillator" => Ok(Box::new(OscillatorModel::new(params.omega, params.n_max)?)),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}
