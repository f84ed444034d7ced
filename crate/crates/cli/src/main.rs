use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dcv_cli::commands::{self, cmd_deident, cmd_lint, cmd_serve, cmd_validate};
use dcv_cli::render::OutputFilter;
use dcv_core::description::LintKind;
use dcv_core::validate::{Category, Severity};

#[derive(Parser)]
#[command(
    name = "dcv",
    version,
    about = "DICOM conformance validation toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a DICOM file against its IOD description
    Validate(ValidateArgs),
    /// De-identify a DICOM file and strip its pixel data
    Deident(DeidentArgs),
    /// Check a description file, reporting problems with line numbers
    Lint(LintArgs),
    /// Run the validation HTTP service
    Serve(ServeArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// DICOM file to validate
    file: PathBuf,
    /// Description repository directory
    #[arg(long, default_value = "descriptions")]
    repo: PathBuf,
    /// Comma-separated module names, or "all"
    #[arg(long, default_value = "all")]
    modules: String,
    /// Answer every precondition with its default (the default behaviour)
    #[arg(long, conflicts_with_all = ["answers", "interactive"])]
    defaults: bool,
    /// Scripted precondition answers: id=true,id=false,...
    #[arg(long, conflicts_with = "interactive")]
    answers: Option<String>,
    /// Ask the precondition questions on the terminal
    #[arg(long)]
    interactive: bool,
    /// Validate the original values instead of the de-identified copy
    #[arg(long)]
    no_deident: bool,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Only print findings of this severity (display only)
    #[arg(long, value_enum, default_value_t = SeverityArg::All)]
    severity: SeverityArg,
    /// Only print modules with these categories (comma separated, display only)
    #[arg(long)]
    categories: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeverityArg {
    Error,
    Warning,
    All,
}

#[derive(Args)]
struct DeidentArgs {
    /// Input DICOM file
    input: PathBuf,
    /// Output path for the de-identified file
    output: PathBuf,
    /// Keep the pixel data element (length-preserving replacement only)
    #[arg(long)]
    keep_pixels: bool,
    /// Replacement profile file (one tab-separated TAG STRATEGY per line)
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct LintArgs {
    /// Description file to check
    file: PathBuf,
    /// Content kind; auto identifies from the root element
    #[arg(long, value_enum, default_value_t = KindArg::Auto)]
    kind: KindArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Iod,
    Module,
    Auto,
}

#[derive(Args)]
struct ServeArgs {
    /// Port to listen on (0 picks a free port)
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Description repository directory
    #[arg(long, default_value = "descriptions")]
    repo: PathBuf,
    /// Session lifetime in seconds
    #[arg(long, default_value_t = 1800)]
    session_ttl: u64,
    /// Maximum upload size in bytes
    #[arg(long, default_value_t = 64 << 20)]
    max_upload: usize,
    /// Re-run de-identification server-side before validating
    #[arg(long)]
    server_deident: bool,
}

fn severity_filter(arg: SeverityArg, categories: Option<&str>) -> OutputFilter {
    let mut filter = OutputFilter::default();
    match arg {
        SeverityArg::Error => {
            filter.severities = [Severity::Error.code()].into_iter().collect();
        }
        SeverityArg::Warning => {
            filter.severities = [Severity::Warning.code()].into_iter().collect();
        }
        SeverityArg::All => {}
    }
    if let Some(spec) = categories {
        let all = [
            Category::Valid,
            Category::Warning,
            Category::Skipped,
            Category::UnsatisfiedCondition,
            Category::HasErrors,
        ];
        filter.categories = spec
            .split(',')
            .filter_map(|name| {
                let name = name.trim().to_ascii_uppercase();
                all.iter().find(|c| c.code() == name).map(|c| c.code())
            })
            .collect();
    }
    filter
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate(args) => {
            let opts = commands::ValidateOptions {
                repo: args.repo,
                modules: args.modules,
                answers: args.answers,
                interactive: args.interactive,
                no_deident: args.no_deident,
                json: matches!(args.format, Format::Json),
                filter: severity_filter(args.severity, args.categories.as_deref()),
            };
            cmd_validate(&args.file, &opts)
        }
        Command::Deident(args) => cmd_deident(
            &args.input,
            &args.output,
            args.keep_pixels,
            args.profile.as_deref(),
        ),
        Command::Lint(args) => cmd_lint(
            &args.file,
            match args.kind {
                KindArg::Iod => LintKind::Iod,
                KindArg::Module => LintKind::Module,
                KindArg::Auto => LintKind::Auto,
            },
        ),
        Command::Serve(args) => {
            tracing_subscriber::fmt()
                .with_max_level(tracing::Level::INFO)
                .with_target(false)
                .init();
            cmd_serve(&commands::ServeConfig {
                port: args.port,
                repo: args.repo,
                session_ttl_secs: args.session_ttl,
                max_upload: args.max_upload,
                server_deident: args.server_deident,
            })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::EXIT_ERROR as u8)
        }
    }
}
