pub mod continuous;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod markov;
pub mod model;
pub mod pairs;
pub mod seed;
pub mod space;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use group::{Embedding, GroupElement, GroupSpec};
