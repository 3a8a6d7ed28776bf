//! Command-line front end for `beta-targets`.
//!
//! Every subcommand flag is also a configuration key, so a run can be given
//! as flags, as a `--config` file, or both (flags win). Exit status is 0 when
//! every check passes, 2 when an invariant or coverage check fails and 1 on
//! usage errors.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches, Command as App};

pub use commands::{run, RunOutput, Status};
pub use config::{parse_config, resolve, Command, ConfigError, ExperimentConfig, OutputFormat, RawConfig};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BETA_TARGETS_THREADS";

fn about(cmd: Command) -> &'static str {
    match cmd {
        Command::Expand => "β-expansion digits of a point",
        Command::Cylinders => "Cylinders of a given order as CSV",
        Command::Hits => "Times at which an orbit hits the shrinking targets",
        Command::Cover => "Explicit covers with s-weight and sampled coverage",
        Command::Dimension => "Closed-form Hausdorff dimension",
        Command::Conjugate => "Verify a conjugation P T P^-1 = D",
        Command::Sandwich => "Check the sandwich implications under a conjugation",
        Command::Estimate => "Box-counting crosscheck against the closed form",
    }
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

pub fn app() -> App {
    let mut app = App::new("beta-targets")
        .about("Shrinking targets for β-transformations and integer torus maps")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(false)
        .arg(Arg::new("config").long("config").global(true).value_name("PATH").help("key = value or JSON configuration file"))
        .arg(Arg::new("seed").long("seed").global(true).value_name("N"))
        .arg(Arg::new("out").long("out").global(true).value_name("PATH"))
        .arg(Arg::new("format").long("format").global(true).value_parser(["json", "csv"]))
        .arg(Arg::new("tolerance").long("tolerance").global(true).value_name("F"));
    for cmd in Command::ALL {
        let mut sub = App::new(cmd.name()).about(about(cmd));
        for &(key, switch) in cmd.keys() {
            let arg = Arg::new(key).long(flag_name(key));
            sub = sub.arg(if switch { arg.action(ArgAction::SetTrue) } else { arg.value_name("VALUE").allow_hyphen_values(true) });
        }
        app = app.subcommand(sub);
    }
    app
}

fn overlay(raw: &mut RawConfig, matches: &ArgMatches, keys: &[(&str, bool)]) {
    for &(key, switch) in keys {
        if switch {
            if matches.get_flag(key) {
                raw.insert(key.to_string(), "true".into());
            }
        } else if let Some(v) = matches.get_one::<String>(key) {
            raw.insert(key.to_string(), v.clone());
        }
    }
}

const GLOBAL_FLAGS: [(&str, bool); 4] = [("seed", false), ("out", false), ("format", false), ("tolerance", false)];

/// Build the raw configuration from parsed arguments and the optional file.
pub fn raw_from_matches(matches: &ArgMatches) -> anyhow::Result<RawConfig> {
    let config_path = matches
        .subcommand()
        .and_then(|(_, m)| m.get_one::<String>("config"))
        .or_else(|| matches.get_one::<String>("config"));
    let mut raw = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {path}: {e}"))?;
            config::parse_raw(&text)?
        }
        None => RawConfig::new(),
    };
    overlay(&mut raw, matches, &GLOBAL_FLAGS);
    if let Some((name, sub)) = matches.subcommand() {
        overlay(&mut raw, sub, &GLOBAL_FLAGS);
        let cmd = Command::parse(name).expect("subcommands mirror the command table");
        raw.insert("command".into(), name.into());
        overlay(&mut raw, sub, cmd.keys());
    }
    Ok(raw)
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        // A pool already built by an earlier call in this process is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
}

/// Write the primary output to `--out` or `stdout`. With JSON output to a
/// file, a command's table is also written next to it with a `.csv`
/// extension.
pub fn emit(cfg: &ExperimentConfig, output: &RunOutput, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let primary = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&output.report)? + "\n",
        OutputFormat::Csv => match &output.csv {
            Some(csv) => csv.clone(),
            None => anyhow::bail!("command `{}` has no CSV output; use --format json", cfg.command.name()),
        },
    };
    match &cfg.out {
        Some(path) => {
            write_file(path, &primary)?;
            if cfg.format == OutputFormat::Json {
                if let Some(csv) = &output.csv {
                    let side = path.with_extension("csv");
                    if side != *path {
                        write_file(&side, csv)?;
                    }
                }
            }
        }
        None => stdout.write_all(primary.as_bytes())?,
    }
    Ok(())
}

/// Full CLI entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match app().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{}", e.render()) } else { write!(stderr, "{}", e.render()) };
            return code;
        }
    };
    let result = (|| -> anyhow::Result<i32> {
        configure_threads()?;
        let raw = raw_from_matches(&matches)?;
        if !raw.contains_key("command") {
            anyhow::bail!("no command given; run with --help for the list");
        }
        let cfg = resolve(&raw)?;
        for w in &cfg.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        let output = run(&cfg)?;
        emit(&cfg, &output, stdout)?;
        Ok(output.status.exit_code())
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}
