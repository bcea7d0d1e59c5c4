pub mod multiplier;
pub mod quad;
pub mod signature;
pub mod specfun;
pub mod conormal;
pub mod grid;
pub mod transform;
pub mod verify;
pub mod cli;
