//! File formats, verification campaigns and the command-line front end for
//! [`negotiate_core`].

pub mod campaign;
pub mod cli;
pub mod format;
