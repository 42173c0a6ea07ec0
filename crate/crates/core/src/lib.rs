//! Moufang loops built from groups with triality and from split Cayley algebras.

pub mod descriptor;
pub mod error;
pub mod extensions;
pub mod linalg;
pub mod loopcore;
pub mod par;
pub mod products;
pub mod ring;
pub mod suites;
pub mod triality;
pub mod zorn;

pub use error::{Error, Result};
pub use par::Exec;
pub use ring::{Ring, RingElem, RingSpec};
