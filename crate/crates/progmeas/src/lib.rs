//! JSON formats and the `progmeas` command-line tool built on
//! [`progmeas_core`].

pub mod app;
pub mod format;
