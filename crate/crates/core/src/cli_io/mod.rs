//! Input documents, reports and the command-line surface.

mod command;
mod format;
mod input;
mod report;

pub use command::{main_with, run, Cli, CliError, Command, Figure, FuzzMode, GlobalArgs, Outcome};
pub use command::{EXIT_ERROR, EXIT_OK, EXIT_VIOLATIONS};
pub use format::{
    emit_report, format_number, snap_rational, Format, MAX_DENOMINATOR, SNAP_TOLERANCE,
};
pub use input::{parse_input, InputDocument, InputError};
pub use report::{
    critical_values, symbolic_beta, ComponentSpectrum, CriticalValue, ExtensionEntry, KmsSection,
    OrderingEntry, PhaseSection, ReportDocument, ReportError, SpectraSection, TOOL_NAME,
    TOOL_VERSION,
};
