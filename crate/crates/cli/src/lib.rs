//! File formats, report rendering, and DOT export behind the `unsplit`
//! binary, importable so tests and other front ends can reuse them.

pub mod dot;
pub mod formats;
pub mod report;
