//! Instance files, benchmark sweeps and the `qcontain` command line on top of
//! [`qcontain_core`].

pub mod bench;
pub mod cli;
pub mod format;

pub use format::{parse_instance, parse_instance_file, serialize_instance, serialize_instance_file, FormatError, InstanceFile};
