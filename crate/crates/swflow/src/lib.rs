pub mod clifford3;
pub mod detsign;
pub mod linalg;
pub mod specflow;
pub mod orient;
pub mod torus_model;
pub mod swlocal;
