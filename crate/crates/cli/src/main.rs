//! Command-line driver: basis dimensions, element arithmetic, the
//! verification suites, and the homology/stability computations, all with
//! machine-readable JSON reports.
//!
//! Exit codes: 0 all assertions passed, 1 assertion failure, 2 usage or
//! configuration error, 3 budget exceeded.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cpa_core::algebra::{AlgebraContext, ElementJson};
use cpa_core::cover::{verify_cover, CoverReport, SpecMode};
use cpa_core::diagram::diagram_count;
use cpa_core::error::Error;
use cpa_core::group::{parse_group_spec, FiniteGroup};
use cpa_core::homology::{
    compare_stability, induced_map_on_tor, tor_of_algebra, tor_of_group, Budget, HomologyResult,
    InducedMapReport, StabilityComparison,
};
use cpa_core::ring::{CoefficientRing, IntegerRing, PrimeField, RationalRing, RingOps};
use cpa_core::suites::{run_algebra_suite, run_lemmas_suite, AlgebraSuiteReport, LemmasReport};

#[derive(Parser)]
#[command(
    name = "cpa",
    about = "Coloured partition algebras: diagram calculus, ideal covers, exact homology",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print diagram count, permutation-diagram count and ideal dimension.
    Dim(DimArgs),
    /// Multiply algebra elements read from JSON files.
    Compose(ComposeArgs),
    /// Run a verification suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
    /// Homology of one side (the algebra or the wreath group algebra).
    Homology(HomologyArgs),
    /// Compare both sides of the stability isomorphism.
    Stability(StabilityArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Diagram size.
    #[arg(long)]
    n: usize,
    /// Group spec: trivial, C:m, S:m, prod:SPEC,SPEC, table:FILE.json.
    #[arg(long, default_value = "trivial")]
    group: String,
    /// Loop parameter, parsed in the coefficient ring ("2", "-1", "2/3").
    #[arg(long, default_value = "1")]
    delta: String,
    /// Coefficient ring: Q, Z or F:p.
    #[arg(long, default_value = "Q")]
    coeff: String,
    /// Seed for every randomised check in this run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallelism cap for the elimination engine. Results do not depend
    /// on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Memory budget for the homology engine.
    #[arg(long, default_value_t = 4096)]
    budget_mb: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ComposeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Element files, multiplied left to right.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which suite to run.
    #[arg(long, value_parser = ["cover", "lemmas", "algebra"])]
    suite: String,
    /// Cover height; defaults to n - 1.
    #[arg(long)]
    height: Option<usize>,
    /// Spec-space traversal: auto, exhaustive or sampled.
    #[arg(long, default_value = "auto")]
    mode: String,
}

#[derive(Args)]
struct HomologyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which augmented algebra to resolve.
    #[arg(long, value_parser = ["algebra", "wreath"])]
    side: String,
    /// Top homological degree; defaults to n - 1.
    #[arg(long)]
    max_q: Option<usize>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Top homological degree; defaults to n - 1.
    #[arg(long)]
    max_q: Option<usize>,
    /// Also verify the inclusion-induced map from size n - 1.
    #[arg(long)]
    corollary: bool,
}

/// Configuration echoed into every report. Execution details that cannot
/// change results (thread count) stay out so reports are byte-identical
/// across them.
#[derive(Serialize, Clone)]
struct ConfigEcho {
    command: String,
    n: usize,
    group: String,
    delta: String,
    coeff: String,
    seed: u64,
    budget_mb: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    side: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_q: Option<usize>,
}

impl ConfigEcho {
    fn new(command: &str, common: &CommonArgs) -> Self {
        ConfigEcho {
            command: command.into(),
            n: common.n,
            group: common.group.clone(),
            delta: common.delta.clone(),
            coeff: common.coeff.clone(),
            seed: common.seed,
            budget_mb: common.budget_mb,
            suite: None,
            height: None,
            mode: None,
            side: None,
            max_q: None,
        }
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    config: ConfigEcho,
    #[serde(flatten)]
    body: T,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    });
}

fn classify(e: &Error) -> i32 {
    match e {
        Error::SizeLimit(_) | Error::BudgetExceeded(_) => 3,
        Error::VerificationFailed(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Dim(args) => cmd_dim(args),
        Command::Compose(args) => dispatch_compose(args),
        Command::Verify(args) => dispatch_verify(args),
        Command::Homology(args) => dispatch_homology(args),
        Command::Stability(args) => dispatch_stability(args),
    }
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// -- dim ---------------------------------------------------------------------

#[derive(Serialize)]
struct DimReport {
    dim: u64,
    permutation: u64,
    ideal: u64,
}

fn cmd_dim(args: DimArgs) -> Result<bool, Error> {
    let group = parse_group_spec(&args.common.group)?;
    let n = args.common.n;
    if n == 0 {
        return Err(Error::BadIndex("n must be at least 1".into()));
    }
    let dim = diagram_count(n, group.order())
        .ok_or_else(|| Error::SizeLimit(format!("diagram count overflows at n = {n}")))?;
    let factorial: u128 = (1..=n as u128).product();
    let permutation = (group.order() as u128)
        .checked_pow(n as u32)
        .and_then(|v| v.checked_mul(factorial))
        .ok_or_else(|| Error::SizeLimit(format!("permutation count overflows at n = {n}")))?;
    let as_u64 = |v: u128| -> Result<u64, Error> {
        u64::try_from(v).map_err(|_| Error::SizeLimit(format!("count {v} exceeds u64")))
    };
    let report = DimReport {
        dim: as_u64(dim)?,
        permutation: as_u64(permutation)?,
        ideal: as_u64(dim - permutation)?,
    };
    emit(&args.common.out, &report)?;
    Ok(true)
}

// -- ring dispatch ------------------------------------------------------------

fn make_context<R: RingOps>(
    common: &CommonArgs,
    ring: R,
    group: Arc<FiniteGroup>,
) -> Result<AlgebraContext<R>, Error> {
    let delta = ring.parse(&common.delta)?;
    AlgebraContext::new(common.n, group, delta, ring)
}

macro_rules! with_ring {
    ($coeff:expr, $ring:ident, $body:expr) => {{
        match CoefficientRing::parse($coeff)? {
            CoefficientRing::Rational => {
                let $ring = RationalRing;
                $body
            }
            CoefficientRing::Integer => {
                let $ring = IntegerRing;
                $body
            }
            CoefficientRing::PrimeField(p) => {
                let $ring = PrimeField::new(p)?;
                $body
            }
        }
    }};
}

// -- compose -------------------------------------------------------------------

fn dispatch_compose(args: ComposeArgs) -> Result<bool, Error> {
    with_ring!(&args.common.coeff, ring, cmd_compose(&args, ring))
}

fn cmd_compose<R: RingOps>(args: &ComposeArgs, ring: R) -> Result<bool, Error> {
    let group = parse_group_spec(&args.common.group)?;
    let ctx = make_context(&args.common, ring, group)?;
    let mut product = None;
    for file in &args.files {
        let text = std::fs::read_to_string(file)?;
        let js: ElementJson = serde_json::from_str(&text)?;
        let elem = ctx.element_from_json(&js)?;
        product = Some(match product {
            None => elem,
            Some(acc) => ctx.multiply(&acc, &elem)?,
        });
    }
    let product = product.expect("at least one input file");
    emit(&args.common.out, &ctx.element_to_json(&product)?)?;
    Ok(true)
}

// -- verify ---------------------------------------------------------------------

#[derive(Serialize)]
#[serde(untagged)]
enum VerifyBody {
    Cover(CoverReport),
    Lemmas(LemmasReport),
    Algebra(AlgebraSuiteReport),
}

fn dispatch_verify(args: VerifyArgs) -> Result<bool, Error> {
    with_ring!(&args.common.coeff, ring, cmd_verify(&args, ring))
}

fn cmd_verify<R: RingOps>(args: &VerifyArgs, ring: R) -> Result<bool, Error> {
    let group = parse_group_spec(&args.common.group)?;
    let ctx = make_context(&args.common, ring, group)?;
    let mode = SpecMode::parse(&args.mode)?;
    let height = args.height.unwrap_or(args.common.n.saturating_sub(1));
    let started = Instant::now();
    let (body, pass) = match args.suite.as_str() {
        "cover" => {
            let report = verify_cover(&ctx, height, args.common.seed, mode)?;
            let pass = report.pass();
            (VerifyBody::Cover(report), pass)
        }
        "lemmas" => {
            let report = run_lemmas_suite(&ctx, args.common.seed, mode)?;
            let pass = report.pass;
            (VerifyBody::Lemmas(report), pass)
        }
        "algebra" => {
            let report = run_algebra_suite(&ctx, args.common.seed)?;
            let pass = report.pass;
            (VerifyBody::Algebra(report), pass)
        }
        other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
    };
    eprintln!(
        "verify --suite {} finished in {:?}",
        args.suite,
        started.elapsed()
    );
    let mut config = ConfigEcho::new("verify", &args.common);
    config.suite = Some(args.suite.clone());
    config.height = Some(height);
    config.mode = Some(args.mode.clone());
    emit(&args.common.out, &Report { config, body })?;
    Ok(pass)
}

// -- homology ---------------------------------------------------------------------

#[derive(Serialize)]
struct HomologyBody {
    side: String,
    ring: String,
    delta: String,
    #[serde(flatten)]
    result: HomologyResult,
    asserted_range: usize,
}

fn dispatch_homology(args: HomologyArgs) -> Result<bool, Error> {
    with_ring!(&args.common.coeff, ring, cmd_homology(&args, ring))
}

fn cmd_homology<R: cpa_core::homology::TorRing>(
    args: &HomologyArgs,
    ring: R,
) -> Result<bool, Error> {
    let group = parse_group_spec(&args.common.group)?;
    let n = args.common.n;
    let max_q = args.max_q.unwrap_or(n.saturating_sub(1));
    let budget = Budget::with_memory_mb(args.common.budget_mb);
    let started = Instant::now();
    let result = match args.side.as_str() {
        "algebra" => {
            let ctx = make_context(&args.common, ring.clone(), group)?;
            tor_of_algebra(&ctx, max_q, &budget, args.common.threads)?
        }
        "wreath" => {
            let wreath = Arc::new(cpa_core::group::wreath_product(&group, n)?);
            tor_of_group(wreath, ring.clone(), max_q, &budget, args.common.threads)?
        }
        other => return Err(Error::Parse(format!("unknown side {other:?}"))),
    };
    eprintln!(
        "homology --side {} finished in {:?}",
        args.side,
        started.elapsed()
    );
    let body = HomologyBody {
        side: args.side.clone(),
        ring: ring.name(),
        delta: args.common.delta.clone(),
        result,
        asserted_range: max_q.min(n.saturating_sub(1)),
    };
    let mut config = ConfigEcho::new("homology", &args.common);
    config.side = Some(args.side.clone());
    config.max_q = Some(max_q);
    emit(&args.common.out, &Report { config, body })?;
    Ok(true)
}

// -- stability ---------------------------------------------------------------------

#[derive(Serialize)]
struct StabilityBody {
    ring: String,
    delta: String,
    #[serde(flatten)]
    comparison: StabilityComparison,
    #[serde(skip_serializing_if = "Option::is_none")]
    corollary: Option<CorollaryBody>,
}

#[derive(Serialize)]
struct CorollaryBody {
    source_n: usize,
    #[serde(flatten)]
    report: InducedMapReport,
    stable_isos: bool,
}

fn dispatch_stability(args: StabilityArgs) -> Result<bool, Error> {
    with_ring!(&args.common.coeff, ring, cmd_stability(&args, ring))
}

trait MaybeInduced: cpa_core::homology::TorRing {
    fn induced(
        src: &AlgebraContext<Self>,
        tgt: &AlgebraContext<Self>,
        max_q: usize,
        budget: &Budget,
        threads: usize,
    ) -> Result<InducedMapReport, Error>;
}

impl MaybeInduced for RationalRing {
    fn induced(
        src: &AlgebraContext<Self>,
        tgt: &AlgebraContext<Self>,
        max_q: usize,
        budget: &Budget,
        threads: usize,
    ) -> Result<InducedMapReport, Error> {
        induced_map_on_tor(src, tgt, max_q, budget, threads)
    }
}

impl MaybeInduced for PrimeField {
    fn induced(
        src: &AlgebraContext<Self>,
        tgt: &AlgebraContext<Self>,
        max_q: usize,
        budget: &Budget,
        threads: usize,
    ) -> Result<InducedMapReport, Error> {
        induced_map_on_tor(src, tgt, max_q, budget, threads)
    }
}

impl MaybeInduced for IntegerRing {
    fn induced(
        _src: &AlgebraContext<Self>,
        _tgt: &AlgebraContext<Self>,
        _max_q: usize,
        _budget: &Budget,
        _threads: usize,
    ) -> Result<InducedMapReport, Error> {
        Err(Error::RingUnsupported(
            "the induced-map report needs a field; use Q or F:p".into(),
        ))
    }
}

fn cmd_stability<R: MaybeInduced>(args: &StabilityArgs, ring: R) -> Result<bool, Error> {
    let group = parse_group_spec(&args.common.group)?;
    let n = args.common.n;
    let max_q = args.max_q.unwrap_or(n.saturating_sub(1));
    let budget = Budget::with_memory_mb(args.common.budget_mb);
    let ctx = make_context(&args.common, ring.clone(), group.clone())?;
    let started = Instant::now();
    let comparison = compare_stability(&ctx, max_q, &budget, args.common.threads)?;
    let mut pass = comparison.pass;
    let corollary = if args.corollary {
        if n < 2 {
            return Err(Error::BadIndex("the corollary check needs n >= 2".into()));
        }
        let src_common = CommonArgs {
            n: n - 1,
            ..args.common.clone()
        };
        let src = make_context(&src_common, ring.clone(), group)?;
        let report = R::induced(&src, &ctx, max_q, &budget, args.common.threads)?;
        let stable_isos = report.chain_map_ok && report.stable_isos_hold(n);
        pass = pass && stable_isos;
        Some(CorollaryBody {
            source_n: n - 1,
            report,
            stable_isos,
        })
    } else {
        None
    };
    eprintln!("stability finished in {:?}", started.elapsed());
    let body = StabilityBody {
        ring: ring.name(),
        delta: args.common.delta.clone(),
        comparison,
        corollary,
    };
    let mut config = ConfigEcho::new("stability", &args.common);
    config.max_q = Some(max_q);
    emit(&args.common.out, &Report { config, body })?;
    Ok(pass)
}
