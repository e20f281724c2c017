pub mod algebra;
pub mod cayley_dickson;
pub mod cli;
pub mod error;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod presets;
pub mod scalar;
pub mod sectional;
pub mod special;
pub mod tensor;
pub mod verify;
