#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cheb;
pub mod error;
pub mod interp;
pub mod nodes;
pub mod measure;
pub mod testbed;
pub mod variation;
pub mod vdv;
pub mod experiments;
