use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alemass::{
    emit_report, parse_scenario, parse_suite, run_scenario, Cache, CliError, ReportBundle, Scenario,
};
use alemass_core::geom::CatalogEntry;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "alemass",
    version,
    about = "Mass of ALE Kahler surfaces: scenarios and reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        scenario: PathBuf,
        /// Output directory; overrides the scenario's.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ignore and do not update the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Run every scenario listed in a suite file, concurrently.
    Suite {
        suite: PathBuf,
        #[arg(long)]
        no_cache: bool,
    },
    /// Hirzebruch-Jung string of the cyclic type (q, p).
    Hj {
        q: i64,
        p: i64,
        /// Also write `hj_<q>_<p>_*` reports here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plumbing tree of a capsule.
    Capsule {
        #[arg(long)]
        ell: u64,
        /// cyclic(n), dihedral(n), tetrahedral, octahedral or icosahedral.
        #[arg(long)]
        kind: String,
        /// Local types, e.g. 2:1,3:1,3:2.
        #[arg(long, value_delimiter = ',')]
        local: Vec<String>,
        /// Self-intersection of the central sphere, e.g. -1/2.
        #[arg(long, allow_hyphen_values = true)]
        central_weight: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List catalog metrics.
    Catalog,
}

fn print_bundle(b: &ReportBundle, files: &[PathBuf]) {
    for v in &b.verdicts {
        println!(
            "{} {} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            b.name,
            v.rule,
            v.detail
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn execute(s: &Scenario, out: &Path, cache: Option<&Cache>) -> Result<bool, CliError> {
    let bundle = run_scenario(s, cache)?;
    let files = emit_report(&bundle, out)?;
    print_bundle(&bundle, &files);
    Ok(bundle.all_pass())
}

fn scenario_from_toml(text: &str, out: PathBuf) -> Result<Scenario, CliError> {
    let mut s = Scenario::parse_str(text, "command line")?;
    s.output_dir = Some(out);
    Ok(s)
}

fn real_main(cli: Cli) -> Result<bool, CliError> {
    let cache = Cache::from_env();
    match cli.command {
        Command::Run {
            scenario,
            out,
            no_cache,
        } => {
            let s = parse_scenario(&scenario)?;
            let dir = out
                .or_else(|| s.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            execute(&s, &dir, (!no_cache).then_some(&cache))
        }
        Command::Suite { suite, no_cache } => {
            let suite = parse_suite(&suite)?;
            let cache = (!no_cache).then_some(&cache);
            let results: Vec<Result<bool, CliError>> = std::thread::scope(|scope| {
                let handles: Vec<_> = suite
                    .scenarios
                    .iter()
                    .map(|s| {
                        scope.spawn(move || {
                            let dir = s.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
                            let bundle = run_scenario(s, cache)?;
                            let files = emit_report(&bundle, &dir)?;
                            Ok((bundle, files))
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| {
                        let r: Result<(ReportBundle, Vec<PathBuf>), CliError> =
                            h.join().expect("scenario thread panicked");
                        r.map(|(b, files)| {
                            print_bundle(&b, &files);
                            b.all_pass()
                        })
                    })
                    .collect()
            });
            let mut all = true;
            let mut first_err = None;
            for (s, r) in suite.scenarios.iter().zip(results) {
                match r {
                    Ok(pass) => all &= pass,
                    Err(e) => {
                        eprintln!("error in {}: {e}", s.name);
                        all = false;
                        first_err.get_or_insert(e);
                    }
                }
            }
            match first_err {
                Some(e @ CliError::Config(_)) => Err(e),
                _ => Ok(all),
            }
        }
        Command::Hj { q, p, out } => {
            let s = scenario_from_toml(
                &format!("name = \"hj_{q}_{p}\"\nkind = \"hj\"\n[hj]\nq = {q}\np = {p}\n"),
                out.clone().unwrap_or_default(),
            )?;
            let bundle = run_scenario(&s, None)?;
            if let alemass::bundle::Records::Hj(h) = &bundle.records {
                let chain: Vec<String> = h.chain.iter().map(|e| e.to_string()).collect();
                println!("[{}]", chain.join(","));
            }
            let files = match &out {
                Some(dir) => emit_report(&bundle, dir)?,
                None => vec![],
            };
            print_bundle(&bundle, &files);
            Ok(bundle.all_pass())
        }
        Command::Capsule {
            ell,
            kind,
            local,
            central_weight,
            out,
        } => {
            let quote = |v: &str| format!("\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""));
            let locals: Vec<String> = local.iter().map(|l| quote(l.trim())).collect();
            let mut text = format!(
                "name = \"capsule\"\nkind = \"capsule\"\n[capsule]\nell = {ell}\ngroup = {}\nlocal = [{}]\n",
                quote(&kind),
                locals.join(", ")
            );
            if let Some(w) = &central_weight {
                text.push_str(&format!("central_weight = {}\n", quote(w)));
            }
            let s = scenario_from_toml(&text, out.clone().unwrap_or_default())?;
            let bundle = run_scenario(&s, None)?;
            if let alemass::bundle::Records::Capsule(c) = &bundle.records {
                print!("{}", c.adjacency);
            }
            let files = match &out {
                Some(dir) => emit_report(&bundle, dir)?,
                None => vec![],
            };
            print_bundle(&bundle, &files);
            Ok(bundle.all_pass())
        }
        Command::Catalog => {
            for e in CatalogEntry::all() {
                println!("{:<14} {:<36} {}", e.name, e.parameters, e.description);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
