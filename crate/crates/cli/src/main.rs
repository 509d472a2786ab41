use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsmooth_cli::config::{Config, Format};
use nsmooth_cli::fixtures::{mismatch_error, run_table, TableName};
use nsmooth_cli::render::{self, SwReport};
use nsmooth_cli::verify::verify_table;
use nsmooth_cli::{exit_code, SCHEMA_VERSION};
use nsmooth_core::enumeration::{enumerate_classes, EnumOptions};
use nsmooth_core::sw::{digit_condition, sw_mod_p, sw_of_structure, SmoothStructureDesc};
use nsmooth_core::{Error, FpClass, ManifoldInvariants, Result};

#[derive(Parser)]
#[command(name = "nsmooth", version, about = "Classify and test cyclic group actions on elliptic surfaces")]
struct Cli {
    /// TOML file with defaults for `format` and `workers`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate admissible fixed-point classes with NS verdicts and form recipes.
    Classify {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        structure: StructureArgs,
        /// Abort with exit code 3 after this many candidate checks.
        #[arg(long)]
        max_candidates: Option<u64>,
        #[arg(long)]
        no_block_search: bool,
    },
    /// Build the recipe form of each class and run the five form checks.
    VerifyForms {
        #[command(flatten)]
        target: Target,
        /// Restrict to one class, e.g. "m+=9,m-=18" or "m22=1,m13=3,m12=5".
        #[arg(long)]
        class: Option<String>,
        /// Check an evenly spaced sample of this many classes with a recipe.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        no_block_search: bool,
    },
    /// Seiberg-Witten invariant of E(n)_{k,l} and its residue mod p.
    Sw {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Recompute a reference table and diff it against the shipped copy.
    Tables {
        #[arg(value_enum)]
        which: TableName,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    p: u32,
    /// E4, E(8), K3, or e=..,s=..,b+=..,b-=..[,spin].
    #[arg(long)]
    surface: String,
}

#[derive(Args)]
struct StructureArgs {
    /// Log-transform multiplicities "K,L" (odd, coprime).
    #[arg(long, value_name = "K,L")]
    log_mult: Option<String>,
    /// Central Alexander coefficient of the surgery knot.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    a0: i64,
}

fn parse_log_mult(text: &str) -> Result<(u64, u64)> {
    let bad = || Error::Usage(format!("--log-mult expects K,L, got '{text}'"));
    let (k, l) = text.split_once(',').ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

impl StructureArgs {
    fn is_default(&self) -> bool {
        self.log_mult.is_none() && self.a0 == 1
    }

    fn desc(&self, n: u32) -> Result<SmoothStructureDesc> {
        let lm = self.log_mult.as_deref().map(parse_log_mult).transpose()?.unwrap_or((1, 1));
        SmoothStructureDesc::new(n, lm, self.a0)
    }
}

fn enum_options(
    manifold: &ManifoldInvariants,
    workers: Option<usize>,
    structure: Option<&StructureArgs>,
    max_candidates: Option<u64>,
    no_block_search: bool,
) -> Result<EnumOptions> {
    let structure = match structure {
        Some(s) if !s.is_default() => {
            let n = manifold
                .n
                .ok_or_else(|| Error::Usage("a smooth structure needs an elliptic surface E(n)".into()))?;
            Some(s.desc(n)?)
        }
        _ => None,
    };
    Ok(EnumOptions { workers, structure, max_candidates, block_search: !no_block_search })
}

/// Rendered output plus whether it represents a failed verification.
fn run(cli: Cli) -> Result<(String, String, bool)> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let format = cli.format.or(config.format).unwrap_or_default();
    let workers = cli.workers.or(config.workers);
    if workers == Some(0) {
        return Err(Error::Usage("--workers must be at least 1".into()));
    }
    match cli.command {
        Command::Classify { target, structure, max_candidates, no_block_search } => {
            let manifold = ManifoldInvariants::parse(&target.surface)?;
            let options = enum_options(&manifold, workers, Some(&structure), max_candidates, no_block_search)?;
            let table = enumerate_classes(target.p, &manifold, &options)?;
            let name = format!("classify_p{}", target.p);
            Ok((name, render::classification(&table, format)?, false))
        }
        Command::VerifyForms { target, class, sample, no_block_search } => {
            let manifold = ManifoldInvariants::parse(&target.surface)?;
            let filter = class.as_deref().map(|c| FpClass::parse(target.p, c)).transpose()?;
            let options = enum_options(&manifold, workers, None, None, no_block_search)?;
            let table = enumerate_classes(target.p, &manifold, &options)?;
            if let Some(f) = &filter {
                let canon = nsmooth_core::fixed_point::weak_canonical(f);
                if !table.records.iter().any(|r| r.class == canon) {
                    return Err(Error::Usage(format!("{f} is not an admissible class on {}", manifold.name)));
                }
            }
            let report = verify_table(&table, filter.as_ref(), sample)?;
            let failed = !report.all_passed();
            let name = format!("verify_p{}", target.p);
            Ok((name, render::verification(&report, format)?, failed))
        }
        Command::Sw { n, p, structure } => {
            let desc = structure.desc(n)?;
            let sw = sw_of_structure(&desc)?;
            let report = SwReport {
                version: SCHEMA_VERSION,
                n,
                p,
                log_mult: desc.log_mult,
                knot_a0: desc.knot_a0,
                sw_mod_p: sw_mod_p(&sw, p),
                sw: sw.to_string(),
                digit_condition: digit_condition(n, p)?,
                in_family: desc.in_family(p),
            };
            Ok((format!("sw_n{n}_p{p}"), render::sw(&report, format)?, false))
        }
        Command::Tables { which } => {
            let report = run_table(which, workers)?;
            let failed = !report.matches();
            if failed {
                eprintln!("{}", mismatch_error(&report));
            }
            Ok((which.name().to_string(), render::table_report(&report, format)?, failed))
        }
    }
    .map(|(name, text, failed)| (format!("{name}.{}", format.extension()), text, failed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok((file_name, text, failed)) => {
            match std::env::var_os("NSMOOTH_OUTPUT_DIR") {
                Some(dir) => {
                    let path = PathBuf::from(dir).join(file_name);
                    if let Err(e) = std::fs::write(&path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            ExitCode::from(if failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
