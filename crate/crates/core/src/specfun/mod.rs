//! Special functions behind the detector statistics.

mod chi2;
mod dilog;
mod gamma;
mod marcum;

pub use chi2::{
    central_chi2_pdf, noncentral_chi2_cdf, noncentral_chi2_pdf, noncentral_chi2_sf, Chi2Spec,
};
pub use dilog::dilog;
pub use gamma::{
    inv_reg_upper_gamma, ln_gamma, normal_quantile, reg_lower_gamma, reg_upper_gamma,
};
pub use marcum::{bessel_i_scaled, marcum_q};
