//! Exact verification of decategorified and graded shadows of categorical
//! `sl_k` actions on modular `sl_n` blocks.

pub mod blocks;
pub mod daha;
pub mod k0;
pub mod kloc;
pub mod report;
pub mod ring;
pub mod sweep;
