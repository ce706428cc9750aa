use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use loopmag::deviations::{deviation, p_deviation, DeviationIndex};
use loopmag::loop_term::{identifiers, parse, taylor};
use loopmag::su_ops::{p, POpRequest};
use loopmag::suites::{run_suite, Suite, SuiteConfig, DEFAULT_SEED};
use loopmag::verify::Verdict;
use loopmag::{magnus, Error, LoopTerm, Series, Trunc, VarTable};

/// Exact Magnus expansions of free-loop words, associator deviations and
/// primitive operations.
#[derive(Parser, Debug)]
#[command(name = "loopmag", version)]
struct Cli {
    /// Truncation degree N.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Multilinear pruning; defaults to off, except for the P_{m,n} suite.
    #[arg(long, global = true, value_enum)]
    prune: Option<Toggle>,
    /// Worker threads for verification (0: all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Comma-separated variable order; defaults to the sorted identifiers.
    #[arg(long, global = true)]
    vars: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Magnus expansion of a loop word.
    Expand { term: String },
    /// Taylor coefficients of a loop word up to an order.
    Taylor {
        term: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// p_{r,s} on fresh generators x1..xr, y1..ys, z.
    Pop {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
    /// A deviation word.
    Deviation {
        /// Comma-separated argument words.
        #[arg(long)]
        args: String,
        /// Index sequence, comma separated; empty for the associator.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        idx: String,
        /// Print the Magnus expansion instead of the word.
        #[arg(long)]
        expand: bool,
    },
    /// The deviation P_{m,n} on fresh generators.
    #[command(name = "P")]
    PDev {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        expand: bool,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    #[arg(long)]
    cases: Option<usize>,
    /// P_{m,n} suite: all (m, n) with m + n up to this.
    #[arg(long, default_value_t = 5)]
    max_total: usize,
    /// P_{m,n} suite: a single pair (with --n).
    #[arg(long, requires = "n")]
    m: Option<usize>,
    #[arg(long, requires = "m")]
    n: Option<usize>,
    /// P_{m,n} suite: run beyond the default truncation guard.
    #[arg(long)]
    allow_large: bool,
    /// balance: number of multilinear-part instances.
    #[arg(long, default_value_t = 25)]
    split_cases: usize,
    /// Count inconclusive cases as passing.
    #[arg(long)]
    inconclusive_pass: bool,
    /// Include wall times in the records.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    #[value(name = "grancosa")]
    PDeviation,
    Axioms,
    Balance,
    Grading,
    Primitive,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::PDeviation => Suite::PDeviation,
            SuiteArg::Axioms => Suite::Axioms,
            SuiteArg::Balance => Suite::Balance,
            SuiteArg::Grading => Suite::Grading,
            SuiteArg::Primitive => Suite::Primitive,
        }
    }
}

const DEFAULT_DEGREE: usize = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn var_table(cli: &Cli, texts: &[&str]) -> Result<VarTable, Error> {
    match &cli.vars {
        Some(list) => {
            VarTable::from_names(list.split(',').map(str::trim).filter(|s| !s.is_empty()))
        }
        None => {
            let mut names: Vec<String> = texts.iter().flat_map(|t| identifiers(t)).collect();
            names.sort();
            names.dedup();
            VarTable::from_names(names)
        }
    }
}

fn trunc(cli: &Cli, default: usize, prune_default: bool) -> Result<Trunc, Error> {
    let degree = cli.degree.unwrap_or(default);
    if degree == 0 {
        return Err(Error::Usage("--degree must be >= 1".into()));
    }
    let prune = cli.prune.map_or(prune_default, |t| t == Toggle::On);
    Ok(Trunc {
        degree,
        multilinear: prune,
    })
}

fn print_series(cli: &Cli, s: &Series, vars: &VarTable) {
    match cli.format {
        Format::Text => println!("{}", s.display(vars)),
        Format::Records => print!("{}", s.dump(vars)),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.cmd {
        Cmd::Expand { term } => {
            let vars = var_table(cli, &[term])?;
            let t = parse(term, &vars)?;
            print_series(cli, &magnus(&t, trunc(cli, DEFAULT_DEGREE, false)?), &vars);
        }
        Cmd::Taylor { term, order } => {
            let vars = var_table(cli, &[term])?;
            let t = parse(term, &vars)?;
            println!("{}", taylor(&t, *order).render(&vars));
        }
        Cmd::Pop { r, s } => {
            let n = trunc(cli, r + s + 1, false)?;
            let (req, vars) = POpRequest::on_generators(*r, *s, n)?;
            print_series(cli, &p(&req)?, &vars);
        }
        Cmd::Deviation { args, idx, expand } => {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            let vars = var_table(cli, &parts)?;
            let words = parts
                .iter()
                .map(|a| parse(a, &vars))
                .collect::<Result<Vec<LoopTerm>, _>>()?;
            let idx: DeviationIndex = idx.parse()?;
            let d = deviation(&words, &idx)?;
            if *expand {
                let n = trunc(cli, idx.level() + 3, false)?;
                print_series(cli, &magnus(&d, n), &vars);
            } else {
                println!("{}", d.display(&vars));
            }
        }
        Cmd::PDev { m, n, expand } => {
            let (vars, xs, ys, z) = loopmag::su_ops::fresh_generators(*m, *n)?;
            let g = |v: &loopmag::VarId| LoopTerm::Gen(*v);
            let xs: Vec<LoopTerm> = xs.iter().map(g).collect();
            let ys: Vec<LoopTerm> = ys.iter().map(g).collect();
            let d = p_deviation(&xs, &ys, &g(&z))?;
            if *expand {
                print_series(cli, &magnus(&d, trunc(cli, m + n + 1, true)?), &vars);
            } else {
                println!("{}", d.display(&vars));
            }
        }
        Cmd::Verify(v) => return verify(cli, v),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(cli: &Cli, v: &VerifyArgs) -> Result<ExitCode, Error> {
    let cfg = SuiteConfig {
        seed: cli.seed,
        degree: cli.degree,
        cases: v.cases,
        prune: cli.prune.map_or(true, |t| t == Toggle::On),
        max_total: v.max_total,
        pair: v.m.zip(v.n),
        allow_large: v.allow_large,
        split_cases: v.split_cases,
    };
    let suite = Suite::from(v.suite);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start workers: {e}")))?;
    let reports = pool.install(|| run_suite(suite, &cfg))?;
    let ok = |verdict| match verdict {
        Verdict::Pass => true,
        Verdict::Inconclusive => v.inconclusive_pass,
        Verdict::Fail => false,
    };
    let mut failed = 0;
    for r in &reports {
        if !ok(r.verdict) {
            failed += 1;
        }
        match cli.format {
            Format::Records => println!("{}", r.to_record(v.timing)),
            Format::Text => {
                let mut line = format!("{:<12} {}", r.verdict, r.case);
                if let Some(w) = &r.witness {
                    line.push_str(&format!("  {w}"));
                }
                if let (true, Some(ms)) = (v.timing, r.millis) {
                    line.push_str(&format!("  [{ms} ms]"));
                }
                println!("{line}");
            }
        }
    }
    if cli.format == Format::Text {
        println!(
            "{}: {} cases, {} passed, {} not passing",
            suite.name(),
            reports.len(),
            reports.len() - failed,
            failed
        );
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
