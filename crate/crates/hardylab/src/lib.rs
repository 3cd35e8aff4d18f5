//! Case catalog, verification suite and command-line front end for
//! `hardylab-core`.

pub mod catalog;
pub mod cli;
pub mod corpus;
pub mod formats;
pub mod golden;
pub mod verify;
