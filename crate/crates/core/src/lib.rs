pub mod bergman;
pub mod bicomplex;
pub mod error;
pub mod formal_powers;
pub mod io;
pub mod potential;
pub mod quadrature;
pub mod radial;
pub mod transmutation;
pub mod vekua_check;
pub mod verify;

pub use bicomplex::{hat_pow, Bicomplex, BicomplexPolynomial};
pub use error::{Error, Result};
pub use potential::PotentialSpec;
pub use radial::{RadialFunction, RadialProfile};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bicomplex.md")]
    mod bicomplex {}
    #[doc = include_str!("../../../book/src/radial_profiles.md")]
    mod radial_profiles {}
    #[doc = include_str!("../../../book/src/transmutation.md")]
    mod transmutation {}
    #[doc = include_str!("../../../book/src/formal_powers.md")]
    mod formal_powers {}
    #[doc = include_str!("../../../book/src/vekua_checks.md")]
    mod vekua_checks {}
    #[doc = include_str!("../../../book/src/bergman.md")]
    mod bergman {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
