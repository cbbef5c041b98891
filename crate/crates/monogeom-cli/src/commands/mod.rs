pub mod bias;
pub mod eval;
pub mod geomdepth;
pub mod simulate;
pub mod stats;
pub mod validate;
