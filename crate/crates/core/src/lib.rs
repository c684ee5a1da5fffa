//! Exact q-expansions at the cusps of p-adic modular curves at infinite level.
//!
//! The crate models the rings of fractional-exponent q-expansions that
//! describe the Tate parameter spaces at the cusps of the perfectoid modular
//! curve, together with the operations that act on them:
//!
//! * [`coeff`]: truncated cyclotomic coefficients in `Z_p[ζ_{p^s}][1/p]`;
//! * [`series`]: sparse series with exponents in `Z[1/p]`;
//! * [`modular`]: the j-invariant and its compositional inverse;
//! * [`trace`]: normalized Tate traces;
//! * [`principles`]: q-expansion principle deciders;
//! * [`action`]: the `Γ_0(p)` action on cusp points and the Hodge–Tate map;
//! * [`tiltperf`]: Frobenius, perfection and tilting towers mod `p`;
//! * [`valuation`]: rank-2 valuations and point classification;
//! * [`cli`]: the file format and command-line surface.
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; its code listings are compiled as doc-tests of this crate.

pub mod action;
mod arith;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod modular;
pub mod principles;
pub mod series;
pub mod tiltperf;
pub mod trace;
pub mod valuation;

pub use coeff::{CycloCoeff, Ctx, RingCtx, Valuation};
pub use error::{Error, Result};
pub use series::{Exponent, FamilySeries, FracSeries};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/coefficients.md")]
    mod coefficients {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/j-invariant.md")]
    mod j_invariant {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/principles.md")]
    mod principles {}
    #[doc = include_str!("../../../book/src/action.md")]
    mod action {}
    #[doc = include_str!("../../../book/src/tilting.md")]
    mod tilting {}
    #[doc = include_str!("../../../book/src/valuations.md")]
    mod valuations {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
