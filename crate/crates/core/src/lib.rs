//! Continued fraction expansion of the base-10 Champernowne constant:
//! exact digit generation, closed-form predictions for its high water marks,
//! and checks of those predictions against direct computation.

pub mod cfe;
pub mod classify;
pub mod digits;
pub mod error;
pub mod natural;
pub mod oracles;
pub mod sci;
pub mod verify;

pub use error::{Error, Result};
