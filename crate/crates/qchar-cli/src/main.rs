use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qchar::cache::{Cache, CacheKey, Lookup};
use qchar::checks::{self, Verdict};
use qchar::io::{emit_character, Format};
use qchar::{
    build_cartan, fundamental_qcharacter, kernel_decompose, qt_fundamental, qt_standard,
    standard_qcharacter, AlgoError, CartanData, Character, Family, Limits,
};

#[derive(Parser)]
#[command(
    name = "qchar",
    version,
    about = "q-characters and q,t-characters of quantum affinizations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Character of the fundamental module Y_{node,shift}.
    Fundamental {
        family: String,
        /// 1-based node.
        node: usize,
        shift: i32,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Product of fundamental characters, e.g. `1:0,2:3`.
    Standard {
        family: String,
        factors: String,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Decompose a character file into kernel elements of a subdiagram.
    Branch {
        family: String,
        char_file: PathBuf,
        /// Comma-separated 1-based nodes.
        #[arg(long)]
        subset: String,
    },
    /// Run a named check suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Inspect or clear the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    Status,
    Clear,
}

#[derive(Args)]
struct RunOpts {
    /// t-deformed character.
    #[arg(long)]
    t: bool,
    #[arg(long)]
    max_height: Option<u32>,
    #[arg(long)]
    max_terms: Option<usize>,
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    threads: Option<usize>,
    /// Compute without reading or writing the cache.
    #[arg(long)]
    no_cache: bool,
    /// Recompute and compare against the cached bytes.
    #[arg(long, conflicts_with = "no_cache")]
    check_cache: bool,
}

enum Failure {
    Usage(String),
    Check(String),
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn algo(e: AlgoError) -> Failure {
    match e {
        AlgoError::HeightLimitRequired
        | AlgoError::Cartan(_)
        | AlgoError::NotDominant { .. }
        | AlgoError::PreconditionFailed(_) => Failure::Usage(e.to_string()),
        _ => Failure::Check(e.to_string()),
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Check(format!("cache: {e}"))
}

fn cartan(family: &str) -> Result<CartanData, Failure> {
    let f: Family = family.parse().map_err(usage)?;
    build_cartan(f).map_err(usage)
}

fn node(cd: &CartanData, k: usize) -> Result<usize, Failure> {
    if k == 0 || k > cd.n {
        return Err(Failure::Usage(format!(
            "node {k} out of range 1..={}",
            cd.n
        )));
    }
    Ok(k - 1)
}

fn parse_factors(cd: &CartanData, s: &str) -> Result<Vec<(usize, i32)>, Failure> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (i, l) = p
                .trim()
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("factor `{p}` is not node:shift")))?;
            let i: usize = i
                .parse()
                .map_err(|_| Failure::Usage(format!("bad node in `{p}`")))?;
            let l: i32 = l
                .parse()
                .map_err(|_| Failure::Usage(format!("bad shift in `{p}`")))?;
            Ok((node(cd, i)?, l))
        })
        .collect()
}

fn parse_subset(cd: &CartanData, s: &str) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for p in s.split(',').filter(|p| !p.trim().is_empty()) {
        let k: usize = p
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad node `{p}` in subset")))?;
        out.push(node(cd, k)?);
    }
    if out.is_empty() {
        return Err(Failure::Usage("empty subset".into()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl RunOpts {
    fn limits(&self) -> Limits {
        Limits {
            max_height: self.max_height,
            max_terms: self.max_terms,
            threads: self.threads,
        }
    }

    fn format(&self) -> Result<Format, Failure> {
        self.format.parse().map_err(usage)
    }

    fn key(&self, command: &str, cd: &CartanData, args: String) -> CacheKey {
        CacheKey {
            command: command.into(),
            family: cd.family.to_string(),
            args,
            max_height: self.max_height,
            max_terms: self.max_terms,
            t: self.t,
            format: self.format.clone(),
        }
    }

    /// Runs `compute` through the cache as requested by the flags.
    fn cached(
        &self,
        key: CacheKey,
        compute: impl FnOnce() -> Result<String, Failure>,
    ) -> Result<String, Failure> {
        if self.no_cache {
            return compute();
        }
        let cache = Cache::from_env();
        let key = key.render();
        if self.check_cache {
            let fresh = compute()?;
            return match cache.get(&key).map_err(io_err)? {
                Lookup::Hit(old) if old == fresh => {
                    eprintln!("cache entry matches recomputation");
                    Ok(fresh)
                }
                Lookup::Hit(_) => Err(Failure::Check(
                    "cache entry differs from recomputation".into(),
                )),
                Lookup::Corrupt => Err(Failure::Check("cache entry is corrupt".into())),
                Lookup::Miss => {
                    cache.put(&key, &fresh).map_err(io_err)?;
                    eprintln!("no cache entry; stored recomputation");
                    Ok(fresh)
                }
            };
        }
        let (payload, how) = cache.get_or_compute(&key, compute)?;
        if how == Lookup::Corrupt {
            eprintln!("corrupt cache entry replaced");
        }
        Ok(payload)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        io_err(e)
    }
}

fn render(cd: &CartanData, ch: &Character<i64>, format: Format) -> String {
    emit_character(ch, &cd.family.to_string(), format)
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Fundamental {
            family,
            node: k,
            shift,
            run,
        } => {
            let cd = cartan(&family)?;
            let i = node(&cd, k)?;
            let format = run.format()?;
            let lim = run.limits();
            run.cached(run.key("fundamental", &cd, format!("{k}:{shift}")), || {
                if run.t {
                    let t = qt_fundamental(&cd, i, shift, &lim).map_err(algo)?;
                    Ok(emit_character(&t.y_view(), &cd.family.to_string(), format))
                } else {
                    Ok(render(
                        &cd,
                        &fundamental_qcharacter(&cd, i, shift, &lim).map_err(algo)?,
                        format,
                    ))
                }
            })
        }
        Command::Standard {
            family,
            factors,
            run,
        } => {
            let cd = cartan(&family)?;
            let fs = parse_factors(&cd, &factors)?;
            if fs.is_empty() {
                return Err(Failure::Usage("empty factor list".into()));
            }
            let format = run.format()?;
            let lim = run.limits();
            let canonical = fs
                .iter()
                .map(|(i, l)| format!("{}:{}", i + 1, l))
                .collect::<Vec<_>>()
                .join(",");
            run.cached(run.key("standard", &cd, canonical), || {
                if run.t {
                    let t = qt_standard(&cd, &fs, &lim).map_err(algo)?;
                    Ok(emit_character(&t.y_view(), &cd.family.to_string(), format))
                } else {
                    Ok(render(
                        &cd,
                        &standard_qcharacter(&cd, &fs, &lim).map_err(algo)?,
                        format,
                    ))
                }
            })
        }
        Command::Branch {
            family,
            char_file,
            subset,
        } => {
            let cd = cartan(&family)?;
            let j = parse_subset(&cd, &subset)?;
            let text = std::fs::read_to_string(&char_file)
                .map_err(|e| Failure::Usage(format!("{}: {e}", char_file.display())))?;
            let ch = Character::<i64>::parse_text(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", char_file.display())))?;
            let parts = kernel_decompose(&cd, &ch, &j).map_err(algo)?;
            let mut out = String::new();
            for (m, c) in parts {
                out.push_str(&format!("{c} {}\n", m.to_machine()));
            }
            Ok(out)
        }
        Command::Verify {
            suite,
            format,
            threads,
        } => {
            let format: Format = format.parse().map_err(usage)?;
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(usage)?;
            }
            let reports = checks::run_suite(&suite).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown suite `{suite}`; expected one of {}",
                    checks::SUITES.join(", ")
                ))
            })?;
            let out = match format {
                Format::Text => checks::render_table(&reports),
                Format::Json => checks::render_json(&reports),
            };
            if reports.iter().any(|r| r.verdict == Verdict::Fail) {
                print!("{out}");
                return Err(Failure::Check(format!(
                    "suite `{suite}` has failing checks"
                )));
            }
            Ok(out)
        }
        Command::Cache { action } => {
            let cache = Cache::from_env();
            match action {
                CacheAction::Status => {
                    let st = cache.status()?;
                    Ok(format!(
                        "dir {}\nentries {}\nbytes {}\n",
                        st.dir.display(),
                        st.entries,
                        st.bytes
                    ))
                }
                CacheAction::Clear => Ok(format!("removed {} entries\n", cache.clear()?)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
