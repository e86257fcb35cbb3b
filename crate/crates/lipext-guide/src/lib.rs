//! Runs every code block of the book under `book/` as a doctest, so the
//! guide can never drift from the library. mdBook itself does not execute
//! snippets; including each chapter as module documentation makes
//! `cargo test --doc` do it instead, one module per chapter so failures
//! point at the offending page.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/metric-spaces.md")]
pub mod metric_spaces {}

#[doc = include_str!("../../../book/src/coverings.md")]
pub mod coverings {}

#[doc = include_str!("../../../book/src/whitney-covers.md")]
pub mod whitney_covers {}

#[doc = include_str!("../../../book/src/partitions.md")]
pub mod partitions {}

#[doc = include_str!("../../../book/src/transport.md")]
pub mod transport {}

#[doc = include_str!("../../../book/src/simplicial.md")]
pub mod simplicial {}

#[doc = include_str!("../../../book/src/extensions.md")]
pub mod extensions {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
