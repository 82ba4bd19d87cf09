pub mod bounds;
pub mod calibrate;
pub mod curve;
pub mod optimize;
pub mod simulate;
pub mod sweep;
