//! Special functions and adaptive quadrature used by the analytic outage
//! expressions.

mod bessel;
mod gamma;
mod quadrature;

pub use bessel::{bessel_j, bessel_k, bessel_k_scaled, ln_bessel_k};
pub use gamma::{
    beta, binomial, factorial, ln_factorial, ln_gamma, pochhammer, reg_lower_incomplete_gamma,
    reg_upper_incomplete_gamma,
};
pub use quadrature::{integrate_finite, integrate_semi_infinite, QuadratureSpec};

pub(crate) use gamma::{lower_unchecked as reg_lower_gamma_unchecked, ln_gamma_unchecked};
