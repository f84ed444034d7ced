mod deident;
mod lint;
mod serve;
mod validate;

pub use deident::cmd_deident;
pub use lint::cmd_lint;
pub use serve::{cmd_serve, ServeConfig};
pub use validate::{cmd_validate, ValidateOptions};

/// Exit codes: 0 conformant / success, 1 findings, 2 operational error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
