pub mod affine;
pub mod closed_form;
pub mod constraints;
pub mod cyclotomic;
pub mod enumeration;
pub mod error;
pub mod fixed_point;
pub mod forms;
pub mod intmat;
pub mod lattice;
pub mod sw;

pub use cyclotomic::CycNum;
pub use error::{Error, Result};
pub use fixed_point::{FpClass, FpType, ManifoldInvariants};
