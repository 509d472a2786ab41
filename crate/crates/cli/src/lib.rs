//! Library side of the `nsmooth` command: rendering, form verification
//! reports and comparison against the checked-in fixtures.

pub mod config;
pub mod fixtures;
pub mod render;
pub mod verify;

use nsmooth_core::Error;

/// Version of the JSON documents emitted by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Process exit code for a library error: 1 usage, 2 verification,
/// 3 resource abort.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Domain(_) | Error::Unsupported(_) => 1,
        Error::ResourceLimit { .. } => 3,
        Error::Inconsistent(_) | Error::Verification(_) | Error::Internal(_) => 2,
    }
}
