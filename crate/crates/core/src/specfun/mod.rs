//! Special functions needed by the pricing formulas and their oracles.

mod bessel;
mod gamma;
mod hypergeometric;
mod ncx2;
mod normal;

pub use bessel::{bessel_i_log_exp_scaled, bessel_i_log_scaled};
pub use gamma::{ln_gamma, reg_gamma_lower, reg_gamma_upper};
pub use hypergeometric::{kummer_m, whittaker_m, WhittakerArgs};
pub use ncx2::{
    clt_sf, ncx2_cdf, ncx2_cdf_flagged, ncx2_pdf, ncx2_sf, ncx2_sf_flagged, NcChiSqParams, NcChiSqTail,
    LARGE_PARAMETER_THRESHOLD,
};
pub use normal::{normal_cdf, normal_pdf, normal_sf};

pub(crate) use bessel::ln_bessel_i_exp_scaled as bessel_log_kernel;
pub(crate) use ncx2::ln_ncx2_pdf;
