pub mod error;
pub mod hierarchy;
pub mod io;
pub mod linalg;
pub mod sdp;
pub mod state;
pub mod witness;
pub mod zoo;

pub use error::{Error, Result};
