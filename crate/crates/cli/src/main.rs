//! `moufang`: build loops, run verification suites, survey extensions.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use moufang::descriptor::{Descriptor, LoopHandle, LoopVisitor, Subject};
use moufang::extensions::{
    construction_extension, extension_make, minimality, minimality_by_enumeration, nontriviality, survey_small,
    Extension,
};
use moufang::loopcore::{associativity, is_moufang, Check, Loop, Scan, Verdict};
use moufang::suites::{parse_suites, run_suite, SuiteReport};
use moufang::triality::{check_triality, wreath_make, TrialityGroup};
use moufang::{par, Error, Exec};

/// Loops above this order are written as handles unless `--cap` says otherwise.
const DEFAULT_CAP: usize = 4096;

#[derive(Parser)]
#[command(name = "moufang", version, about = "Moufang loops from groups with triality and Zorn matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every sampled scan and seeded search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples drawn when a scan is too large to be exhaustive.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn scan(&self) -> Scan {
        Scan { budget: self.budget, seed: self.seed, ..Scan::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a loop and write it as a table, or as a handle when oversized.
    Build {
        descriptor: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest order written as a full table.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Accept module extensions that are not groups with triality.
        #[arg(long)]
        allow_failing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites on a loop.
    Check {
        descriptor: String,
        /// Comma-separated suites, or `all`.
        #[arg(long, default_value = "moufang")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check the triality axiom of a group with triality or of a group's wreath.
    CheckTriality {
        descriptor: String,
        #[command(flatten)]
        common: Common,
    },
    /// Decide nontriviality and minimality of an extension.
    Minimal {
        descriptor: String,
        /// Kernel as comma-separated element indices (required for plain tables).
        #[arg(long)]
        kernel: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Report nontriviality and minimality across the construction catalog.
    Survey {
        /// Largest loop order included.
        #[arg(long)]
        bound: usize,
        /// Comma-separated field sizes.
        #[arg(long, default_value = "2,3")]
        q: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write the Cayley table of a loop.
    Export {
        descriptor: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// A command failure mapped to an exit status.
enum Failure {
    /// Verification or construction failed.
    Check(String),
    /// The command line could not be understood.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Build { descriptor, out, cap, allow_failing, common } => {
            setup(&common);
            build(&descriptor, out.as_deref(), cap, allow_failing, &common)
        }
        Command::Check { descriptor, suite, common } => {
            setup(&common);
            check(&descriptor, &suite, &common)
        }
        Command::CheckTriality { descriptor, common } => {
            setup(&common);
            triality(&descriptor, &common)
        }
        Command::Minimal { descriptor, kernel, common } => {
            setup(&common);
            minimal(&descriptor, kernel.as_deref(), &common)
        }
        Command::Survey { bound, q, out, common } => {
            setup(&common);
            survey(bound, &q, out.as_deref(), &common)
        }
        Command::Export { descriptor, out, cap, common } => {
            setup(&common);
            export(&descriptor, &out, cap, &common)
        }
    }
}

fn setup(common: &Common) {
    if let Some(n) = common.jobs {
        par::set_threads(n.max(1));
    }
}

fn load(descriptor: &str, common: &Common, allow_failing: bool) -> Result<(Descriptor, Subject), Failure> {
    let d: Descriptor = descriptor.parse()?;
    let s = d.build(common.seed, Exec::Auto, allow_failing)?;
    Ok((d, s))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))
}

fn verdict_line<W: std::fmt::Debug>(label: &str, v: &Verdict<W>) -> String {
    match v {
        Verdict::Pass => format!("{label} yes"),
        Verdict::Fail(w) => format!("{label} no witness={w:?}"),
    }
}

struct Summary {
    scan: Scan,
}

impl LoopVisitor for Summary {
    type Output = (usize, Verdict<(usize, usize, usize)>, Verdict<(usize, usize, usize)>);

    fn visit<L: Loop>(self, l: &L) -> Self::Output {
        (l.order(), is_moufang(l, self.scan), associativity(l, self.scan))
    }
}

fn build(descriptor: &str, out: Option<&Path>, cap: usize, allow_failing: bool, common: &Common) -> Outcome {
    let (d, s) = load(descriptor, common, allow_failing)?;
    let (order, moufang, assoc) = s.visit(Summary { scan: common.scan() }, Exec::Auto)?;
    println!("order {order}");
    println!("{}", verdict_line("moufang", &moufang));
    println!("{}", verdict_line("associative", &assoc));
    if let Some(path) = out {
        if order <= cap {
            write_file(path, &s.table(cap, Exec::Auto)?.to_loop_file())?;
            println!("wrote table {}", path.display());
        } else {
            write_file(path, &LoopHandle { descriptor: d, seed: common.seed, order }.to_string())?;
            println!("wrote handle {}", path.display());
        }
    }
    Ok(true)
}

fn check(descriptor: &str, suites: &str, common: &Common) -> Outcome {
    let suites = parse_suites(suites)?;
    let (_, s) = load(descriptor, common, false)?;
    let mut ok = true;
    for suite in suites {
        match run_suite(&s, suite, common.scan())? {
            SuiteReport::Ran(checks) => {
                for c in checks {
                    ok &= c.passed();
                    println!("{suite}: {c}");
                }
            }
            SuiteReport::Skipped(why) => println!("{suite}: SKIP {why}"),
        }
    }
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn triality_check<G: TrialityGroup>(g: &G, scan: Scan) -> Outcome {
    let c = Check::new("triality-axiom", check_triality(g, scan)?);
    println!("{c}");
    Ok(c.passed())
}

fn triality(descriptor: &str, common: &Common) -> Outcome {
    let (_, s) = load(descriptor, common, true)?;
    let scan = common.scan();
    match &s {
        Subject::Wreath(w) => triality_check(w, scan),
        Subject::Module(a) => triality_check(a, scan),
        Subject::Table(t) => triality_check(&wreath_make(t.clone())?, scan),
        _ => Err(Failure::Usage("check-triality needs a group table, wreath: or wreathmod: descriptor".into())),
    }
}

fn report_extension<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Outcome {
    println!("order {} kernel {} quotient {}", x.loop_ref().order(), x.kernel().len(), x.quotient().order());
    match nontriviality(x, scan) {
        Ok(n) => println!("nontrivial {} {n}", if n.is_nontrivial() { "yes" } else { "no" }),
        Err(e) => println!("nontrivial undecided ({e})"),
    }
    let m = minimality(x, scan)?;
    println!("minimal {} {m}", if m.is_minimal() { "yes" } else { "no" });
    if let Ok(e) = minimality_by_enumeration(x, scan) {
        if e.is_minimal() != m.is_minimal() {
            return Err(Failure::Check(format!("minimality methods disagree: {m} vs {e}")));
        }
        println!("enumeration {e}");
    }
    if let Some(w) = m.witness() {
        println!("witness {w:?}");
    }
    Ok(m.is_minimal())
}

fn parse_indices(list: &str) -> Result<Vec<usize>, Failure> {
    list.split(',').map(|s| s.trim().parse().map_err(|_| Failure::Usage(format!("bad kernel element {s:?}")))).collect()
}

fn minimal(descriptor: &str, kernel: Option<&str>, common: &Common) -> Outcome {
    let (_, s) = load(descriptor, common, false)?;
    let scan = common.scan();
    match (&s, kernel) {
        (Subject::Construction(c), None) => report_extension(&construction_extension(c, scan)?, scan),
        (Subject::Construction(c), Some(k)) => report_extension(&extension_make(c, &parse_indices(k)?, scan)?, scan),
        (Subject::Table(t), Some(k)) => report_extension(&extension_make(t, &parse_indices(k)?, scan)?, scan),
        (_, Some(k)) => {
            let t = s.table(DEFAULT_CAP, Exec::Auto)?;
            report_extension(&extension_make(&t, &parse_indices(k)?, scan)?, scan)
        }
        (_, None) => Err(Failure::Usage("--kernel is required unless the descriptor is a semidirect product".into())),
    }
}

fn survey(bound: usize, q: &str, out: Option<&Path>, common: &Common) -> Outcome {
    let fields: Vec<u32> = q
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| Failure::Usage(format!("bad field size {s:?}"))))
        .collect::<Result<_, _>>()?;
    let rows = survey_small(bound, &fields, common.scan());
    let mut report = format!("# survey bound={bound} q={q} seed={}\n", common.seed);
    report.push_str("# construction order kernel nontrivial minimal witness\n");
    for r in &rows {
        let _ = writeln!(report, "{r}");
    }
    print!("{report}");
    if let Some(path) = out {
        write_file(path, &report)?;
    }
    Ok(rows.iter().all(|r| !r.witness.starts_with("error:")))
}

fn export(descriptor: &str, out: &Path, cap: usize, common: &Common) -> Outcome {
    let (_, s) = load(descriptor, common, false)?;
    let t = s.table(cap, Exec::Auto)?;
    write_file(out, &t.to_loop_file())?;
    println!("order {}", t.order());
    println!("wrote table {}", out.display());
    Ok(true)
}
