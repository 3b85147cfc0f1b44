//! Risk certificates from held-out loss files, bound tables, and the
//! pinned self-check. The `klcert` binary is a thin wrapper over this.

mod certificate;
mod ingest;
pub mod selfcheck;
mod table;

pub use certificate::{certify, BoundCertificate, DEFAULT_DELTA, TOOL_VERSION};
pub use ingest::{ingest, ingest_reader, IngestError, LossFormat, LossRecord, LossSet};
pub use table::{emit_table, table_rows, write_table, TableError, TableRow};

/// Process exit codes of `klcert`. These values are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// Bad flags or arguments (also what clap uses for parse failures).
    Usage = 2,
    /// A file could not be read or written.
    Io = 3,
    /// Input was readable but invalid: malformed, NaN, outside `[0, 1]`,
    /// empty, or `delta` outside `(0, 1)`.
    Domain = 4,
    /// `selfcheck` ran and at least one suite failed.
    SelfcheckFailed = 5,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("selfcheck failed: {0}")]
    SelfcheckFailed(String),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Io(_) => ExitStatus::Io,
            CliError::Domain(_) => ExitStatus::Domain,
            CliError::SelfcheckFailed(_) => ExitStatus::SelfcheckFailed,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::EmptyList(_) => CliError::Usage(e.to_string()),
            TableError::Domain(_) => CliError::Domain(e.to_string()),
            TableError::Io(_) | TableError::Csv(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<crate::kl::KlError> for CliError {
    fn from(e: crate::kl::KlError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<crate::verification::VerificationError> for CliError {
    fn from(e: crate::verification::VerificationError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
