//! Command-line front end: every pipeline stage with machine-readable output.
//!
//! Exit codes: 2 for argument errors, 1 for computation errors or failed
//! replication checks, 0 otherwise.

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use schubkit::ladderseq::{self, LadderIndex, LadderSequence, ParametricSystem};
use schubkit::permutations::{LehmerCode, Permutation};
use schubkit::pipedreams::{self, PipeDream, WeightVector};
use schubkit::polytopes::{self, InstantiatedSystem};
use schubkit::quasipoly;
use schubkit::schubert::{self, Method};

#[derive(Parser)]
#[command(
    name = "schubkit",
    version,
    about = "Exact Schubert coefficients via pipe dreams, ladder sequences and lattice points"
)]
struct Cli {
    /// Emit machine-readable JSON instead of tables
    #[arg(long, global = true)]
    json: bool,
    /// Worker count for the polytope method (default: $SCHUBKIT_PARALLEL or 1)
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Permutation and Lehmer-code operations
    Perm {
        #[command(subcommand)]
        op: PermOp,
    },
    /// Pipe dreams
    Pd {
        #[command(subcommand)]
        op: PdOp,
    },
    /// Ladder indices, encoding and decoding
    Ladder {
        #[command(subcommand)]
        op: LadderOp,
    },
    /// Parametric inequality systems and lattice-point counts
    System {
        #[command(subcommand)]
        op: SystemOp,
    },
    /// Schubert coefficient c_{u,v}^w, optionally stretched by --N
    Coeff {
        u: String,
        v: String,
        w: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Polytope)]
        method: MethodArg,
        #[arg(long = "N")]
        stretch: Option<u64>,
    },
    /// The sequence c_{N*u,N*v}^{N*w} over a range of N
    Stretched {
        u: String,
        v: String,
        w: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Polytope)]
        method: MethodArg,
    },
    /// Fit an eventual quasi-polynomial to a JSON sequence on stdin
    Fit {
        #[arg(long, default_value_t = 6)]
        max_period: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
    },
    /// Re-run the golden examples and print a pass/fail table
    Replicate {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum PermOp {
    /// Lehmer code of a permutation
    Code(PermArg),
    /// Permutation of a Lehmer code
    Uncode { code: String },
    /// Code scaling N * w
    Stretch {
        #[command(flatten)]
        perm: PermArg,
        n: Option<u64>,
    },
    /// Inversions, descents, exceedances and range
    Stats(PermArg),
}

#[derive(Subcommand)]
enum PdOp {
    /// The bottom (left-aligned) pipe dream
    Bottom(PermArg),
    /// All pipe dreams, by ladder-move closure
    Enumerate(PermArg),
    /// Render a pipe dream (JSON on stdin, or the bottom dream of a permutation)
    Render(PermArgOptional),
}

#[derive(Subcommand)]
enum LadderOp {
    /// The ladder indices of L_mu in ladder order
    Indices { mu: usize },
    /// Encode a pipe dream (JSON on stdin) as a ladder sequence
    Encode(PermArg),
    /// Decode a ladder sequence (JSON on stdin) back to a pipe dream
    Decode(PermArg),
}

#[derive(Subcommand)]
enum SystemOp {
    /// Emit a compatibility or triple system as JSON
    #[command(subcommand)]
    Emit(EmitOp),
    /// Count lattice points of a system read from stdin
    Count {
        /// Parameter N for a parametric system (omit for an instantiated one)
        #[arg(long = "param-n")]
        param_n: Option<u64>,
    },
}

#[derive(Subcommand)]
enum EmitOp {
    /// The (kappa, u)-compatibility system
    Compat {
        #[command(flatten)]
        perm: PermArg,
        /// Support indices, e.g. "2,1;2,2;1,1,2;1,1"
        #[arg(long, default_value = "")]
        kappa: String,
    },
    /// The merged triple system for (u, v, w) and sigma
    Triple {
        u: String,
        v: String,
        w: String,
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value = "")]
        kappa1: String,
        #[arg(long, default_value = "")]
        kappa2: String,
        #[arg(long, default_value = "")]
        kappa3: String,
    },
}

#[derive(Args)]
struct PermArg {
    /// One-line notation ("3142" or "3,1,4,2")
    perm: Option<String>,
    /// Lehmer code alternative ("1,0,1,0")
    #[arg(long)]
    code: Option<String>,
}

#[derive(Args)]
struct PermArgOptional {
    perm: Option<String>,
    #[arg(long)]
    code: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Polytope,
    Ps,
    Expand,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Polytope => Method::Polytope,
            MethodArg::Ps => Method::Ps,
            MethodArg::Expand => Method::Expand,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// The N-1 family (negative polynomial coefficient)
    Negex,
    /// The late-start family for n = 4 and 5
    Offset,
    /// Kostka non-saturation
    Kostka,
    /// The six closed-form counts
    Sec61,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn compute(kind: &str, message: impl std::fmt::Display) -> Failure {
        Failure {
            code: 1,
            message: format!("{kind}: {message}"),
        }
    }

    fn parse(message: impl std::fmt::Display) -> Failure {
        Failure {
            code: 2,
            message: format!("ParseError: {message}"),
        }
    }
}

macro_rules! fail_from {
    ($ty:ty, $name:literal) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Failure {
                Failure::compute($name, e)
            }
        }
    };
}

fail_from!(schubkit::permutations::PermutationError, "PermutationError");
fail_from!(schubkit::pipedreams::PipeDreamError, "PipeDreamError");
fail_from!(schubkit::ladderseq::LadderSeqError, "LadderSeqError");
fail_from!(schubkit::polytopes::PolytopeError, "PolytopeError");
fail_from!(schubkit::schubert::SchubertError, "SchubertError");
fail_from!(schubkit::quasipoly::QuasiPolyError, "QuasiPolyError");

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error ({})", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_perm(s: &str) -> Result<Permutation, Failure> {
    if let Some(code) = s.strip_prefix("code:") {
        return Ok(parse_code(code)?.decode());
    }
    Permutation::from_str(s).map_err(Failure::parse)
}

fn parse_code(s: &str) -> Result<LehmerCode, Failure> {
    LehmerCode::from_str(s).map_err(Failure::parse)
}

impl PermArg {
    fn resolve(&self) -> Result<Permutation, Failure> {
        resolve_perm(&self.perm, &self.code)
    }
}

fn resolve_perm(word: &Option<String>, code: &Option<String>) -> Result<Permutation, Failure> {
    match (word, code) {
        (Some(word), None) => parse_perm(word),
        (None, Some(code)) => Ok(parse_code(code)?.decode()),
        (Some(_), Some(_)) => Err(Failure::parse(
            "give either a one-line permutation or --code, not both",
        )),
        (None, None) => Err(Failure::parse(
            "missing permutation (one-line word or --code)",
        )),
    }
}

fn parse_kappa(s: &str) -> Result<Vec<LadderIndex>, Failure> {
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Result<Vec<usize>, _> =
            part.split(',').map(|t| t.trim().parse::<usize>()).collect();
        let nums = nums.map_err(|_| Failure::parse(format!("bad ladder index {part:?}")))?;
        if nums.len() < 2 {
            return Err(Failure::parse(format!(
                "ladder index {part:?} needs a start row and at least one displacement"
            )));
        }
        out.push(LadderIndex::new(nums[0], nums[1..].to_vec()).map_err(Failure::parse)?);
    }
    Ok(out)
}

fn read_stdin() -> Result<String, Failure> {
    let mut buf = String::new();
    std::io::stdin()
        .read_to_string(&mut buf)
        .map_err(|e| Failure::compute("IoError", e))?;
    Ok(buf)
}

fn from_json<T: serde::de::DeserializeOwned>(label: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::compute("JsonError", format!("{label}: {e}")))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn big_json(v: &BigUint) -> serde_json::Value {
    match u64::try_from(v.clone()) {
        Ok(small) => serde_json::Value::from(small),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

fn print_sequence_json(values: &[(u64, BigUint)]) {
    let obj: serde_json::Map<String, serde_json::Value> = values
        .iter()
        .map(|(n, v)| (n.to_string(), big_json(v)))
        .collect();
    println!("{}", serde_json::Value::Object(obj));
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = cli
        .parallel
        .or_else(|| {
            std::env::var("SCHUBKIT_PARALLEL")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    let json = cli.json;
    match cli.command {
        Command::Perm { op } => run_perm(op, json),
        Command::Pd { op } => run_pd(op, json),
        Command::Ladder { op } => run_ladder(op, json),
        Command::System { op } => run_system(op, json),
        Command::Coeff {
            u,
            v,
            w,
            method,
            stretch,
        } => {
            let (u, v, w) = (parse_perm(&u)?, parse_perm(&v)?, parse_perm(&w)?);
            let n = stretch.unwrap_or(1);
            if n == 0 {
                return Err(Failure::parse("--N must be positive"));
            }
            let value =
                schubert::stretched_coefficient_threaded(&u, &v, &w, n, method.into(), threads)?;
            if json {
                println!("{}", big_json(&value));
            } else {
                println!("{value}");
            }
            Ok(())
        }
        Command::Stretched {
            u,
            v,
            w,
            from,
            to,
            method,
        } => {
            let (u, v, w) = (parse_perm(&u)?, parse_perm(&v)?, parse_perm(&w)?);
            if from == 0 || to < from {
                return Err(Failure::parse("need 1 <= --from <= --to"));
            }
            let mut values = Vec::new();
            for n in from..=to {
                eprintln!("computing N = {n} ...");
                let value = schubert::stretched_coefficient_threaded(
                    &u,
                    &v,
                    &w,
                    n,
                    method.into(),
                    threads,
                )?;
                values.push((n, value));
            }
            if json {
                print_sequence_json(&values);
            } else {
                let words: Vec<String> = values.iter().map(|(_, v)| v.to_string()).collect();
                println!("{}", words.join(" "));
            }
            Ok(())
        }
        Command::Fit {
            max_period,
            max_degree,
        } => run_fit(max_period, max_degree, json),
        Command::Replicate { suite } => run_replicate(suite, threads),
    }
}

fn run_perm(op: PermOp, json: bool) -> Result<(), Failure> {
    match op {
        PermOp::Code(arg) => {
            let code = arg.resolve()?.lehmer_code();
            if json {
                println!("{}", to_json(&code));
            } else {
                let entries: Vec<String> = code.entries().iter().map(usize::to_string).collect();
                println!("{}", entries.join(","));
            }
        }
        PermOp::Uncode { code } => {
            let perm = parse_code(&code)?.decode();
            if json {
                println!("{}", to_json(&perm));
            } else {
                println!("{perm}");
            }
        }
        PermOp::Stretch { perm, n } => {
            let n = n.ok_or_else(|| Failure::parse("missing stretch factor N"))?;
            if n == 0 {
                return Err(Failure::parse("N must be positive"));
            }
            let stretched = perm.resolve()?.stretch(n);
            if json {
                println!("{}", to_json(&stretched));
            } else {
                println!("{stretched}");
            }
        }
        PermOp::Stats(arg) => {
            let w = arg.resolve()?;
            let stats = w.statistics();
            if json {
                println!("{}", to_json(&stats));
            } else {
                println!("inversions   {}", stats.inversions);
                println!("descents     {:?}", stats.descents);
                println!("exceedances  {:?}", stats.exceedances);
                match stats.range {
                    Some((lo, hi)) => println!("range        [{lo}, {hi}]"),
                    None => println!("range        (empty)"),
                }
            }
        }
    }
    Ok(())
}

fn run_pd(op: PdOp, json: bool) -> Result<(), Failure> {
    match op {
        PdOp::Bottom(arg) => {
            let u = arg.resolve()?;
            let d = PipeDream::bottom(&u);
            if json {
                println!("{}", to_json(&d));
            } else {
                print!("{}", d.render());
            }
        }
        PdOp::Enumerate(arg) => {
            let u = arg.resolve()?;
            let dreams = pipedreams::enumerate_pipe_dreams(&u);
            if json {
                println!("{}", to_json(&dreams));
            } else {
                println!("{} pipe dreams for {u}", dreams.len());
                for d in &dreams {
                    println!("weight {}", d.weight());
                    print!("{}", d.render());
                }
            }
        }
        PdOp::Render(arg) => {
            let dream = if arg.perm.is_none() && arg.code.is_none() {
                from_json::<PipeDream>("pipe dream", &read_stdin()?)?
            } else {
                PipeDream::bottom(&resolve_perm(&arg.perm, &arg.code)?)
            };
            print!("{}", dream.render());
        }
    }
    Ok(())
}

fn run_ladder(op: LadderOp, json: bool) -> Result<(), Failure> {
    match op {
        LadderOp::Indices { mu } => {
            let indices = ladderseq::ladder_indices(mu);
            if json {
                println!("{}", to_json(&indices));
            } else {
                let words: Vec<String> = indices.iter().map(LadderIndex::to_string).collect();
                println!("{}", words.join(" < "));
            }
        }
        LadderOp::Encode(arg) => {
            let u = arg.resolve()?;
            let dream: PipeDream = from_json("pipe dream", &read_stdin()?)?;
            let x = ladderseq::encode(&dream, &u)?;
            if json {
                println!("{}", to_json(&x));
            } else {
                println!("{x:?}");
            }
        }
        LadderOp::Decode(arg) => {
            let u = arg.resolve()?;
            let x: LadderSequence = from_json("ladder sequence", &read_stdin()?)?;
            let dream = ladderseq::decode(&x, &u)?;
            if json {
                println!("{}", to_json(&dream));
            } else {
                print!("{}", dream.render());
            }
        }
    }
    Ok(())
}

fn run_system(op: SystemOp, json: bool) -> Result<(), Failure> {
    match op {
        SystemOp::Emit(EmitOp::Compat { perm, kappa }) => {
            let u = perm.resolve()?;
            let kappa = parse_kappa(&kappa)?;
            let system = ladderseq::compat_system(&u, &kappa)?;
            println!("{}", to_json(&system));
        }
        SystemOp::Emit(EmitOp::Triple {
            u,
            v,
            w,
            sigma,
            kappa1,
            kappa2,
            kappa3,
        }) => {
            let (u, v, w) = (parse_perm(&u)?, parse_perm(&v)?, parse_perm(&w)?);
            let sigma = parse_perm(&sigma)?;
            let trip = polytopes::triple_system(
                &u,
                &v,
                &w,
                &sigma,
                &parse_kappa(&kappa1)?,
                &parse_kappa(&kappa2)?,
                &parse_kappa(&kappa3)?,
            )?;
            println!("{}", to_json(&trip.system));
        }
        SystemOp::Count { param_n } => {
            let text = read_stdin()?;
            let inst = match param_n {
                Some(0) => return Err(Failure::parse("--param-n must be positive")),
                Some(n) => {
                    let system: ParametricSystem = from_json("parametric system", &text)?;
                    check_shape(
                        system.vars.len(),
                        &system.matrix,
                        &[system.n_coef.len(), system.constant.len()],
                    )?;
                    polytopes::instantiate(&system, n)
                }
                None => {
                    let inst: InstantiatedSystem = from_json("instantiated system", &text)?;
                    check_shape(inst.lower.len(), &inst.matrix, &[inst.rhs.len()])?;
                    inst
                }
            };
            let count = polytopes::count_lattice_points(&inst)?;
            if json {
                println!("{}", big_json(&count));
            } else {
                println!("{count}");
            }
        }
    }
    Ok(())
}

fn check_shape(width: usize, matrix: &[Vec<i64>], rhs_lens: &[usize]) -> Result<(), Failure> {
    if let Some(row) = matrix.iter().find(|row| row.len() != width) {
        return Err(Failure::parse(format!(
            "matrix row has {} entries, expected {width}",
            row.len()
        )));
    }
    if rhs_lens.iter().any(|&len| len != matrix.len()) {
        return Err(Failure::parse(format!(
            "right-hand side length does not match the {} matrix rows",
            matrix.len()
        )));
    }
    Ok(())
}

/// Accepts either `[f(1), f(2), ...]` or `{"1": f(1), ...}`, with values as
/// JSON integers or decimal strings.
fn parse_sequence(text: &str) -> Result<BTreeMap<u64, BigInt>, Failure> {
    let value: serde_json::Value = from_json("sequence", text)?;
    let bigint = |v: &serde_json::Value| -> Result<BigInt, Failure> {
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| Failure::parse(format!("non-integer value {n}"))),
            serde_json::Value::String(s) => s
                .parse::<BigInt>()
                .map_err(|_| Failure::parse(format!("bad integer string {s:?}"))),
            other => Err(Failure::parse(format!("bad sequence value {other}"))),
        }
    };
    match value {
        serde_json::Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(t, v)| Ok((t as u64 + 1, bigint(v)?)))
            .collect(),
        serde_json::Value::Object(map) => map
            .iter()
            .map(|(k, v)| {
                let n: u64 = k
                    .parse()
                    .map_err(|_| Failure::parse(format!("bad sequence key {k:?}")))?;
                Ok((n, bigint(v)?))
            })
            .collect(),
        other => Err(Failure::parse(format!(
            "expected array or object, got {other}"
        ))),
    }
}

fn run_fit(max_period: usize, max_degree: usize, json: bool) -> Result<(), Failure> {
    let seq = parse_sequence(&read_stdin()?)?;
    let q = quasipoly::fit(&seq, max_period, max_degree)?;
    let gf = quasipoly::generating_function(&q, &seq);
    if json {
        let out = serde_json::json!({
            "fit": serde_json::to_value(&q).expect("serializable"),
            "generating_function": serde_json::to_value(&gf).expect("serializable"),
        });
        println!("{out}");
    } else {
        println!("{q}");
        for r in 0..q.period() {
            let coeffs: Vec<String> = q.poly(r).iter().map(|c| c.to_string()).collect();
            println!(
                "g_{r}(N) coefficients (low to high): [{}]",
                coeffs.join(", ")
            );
        }
        println!("generating function: {gf}");
    }
    Ok(())
}

struct Table {
    mismatches: usize,
}

impl Table {
    fn new(header: &str) -> Table {
        println!("{header}");
        Table { mismatches: 0 }
    }

    fn row(&mut self, label: &str, expected: &str, got: &str) {
        let status = if expected == got {
            "ok"
        } else {
            self.mismatches += 1;
            "MISMATCH"
        };
        println!("{label:<24} expected {expected:>8}   got {got:>8}   {status}");
    }

    fn finish(self) -> Result<(), Failure> {
        if self.mismatches == 0 {
            println!("all checks passed");
            Ok(())
        } else {
            Err(Failure::compute(
                "ReplicationMismatch",
                format!("{} mismatching rows", self.mismatches),
            ))
        }
    }
}

fn run_replicate(suite: Suite, threads: usize) -> Result<(), Failure> {
    match suite {
        Suite::Negex => {
            let (u, v, w) = (
                parse_perm("3142")?,
                parse_perm("1432")?,
                parse_perm("4321")?,
            );
            let mut table = Table::new("c_{N*3142,N*1432}^{N*4321} = N - 1");
            for n in 1..=8u64 {
                eprintln!("computing N = {n} ...");
                let got = schubert::stretched_coefficient_threaded(
                    &u,
                    &v,
                    &w,
                    n,
                    Method::Polytope,
                    threads,
                )?;
                table.row(
                    &format!("polytope N={n}"),
                    &(n - 1).to_string(),
                    &got.to_string(),
                );
            }
            for n in 1..=3u64 {
                for (name, method) in [("ps", Method::Ps), ("expand", Method::Expand)] {
                    let got = schubert::stretched_coefficient(&u, &v, &w, n, method)?;
                    table.row(
                        &format!("{name} N={n}"),
                        &(n - 1).to_string(),
                        &got.to_string(),
                    );
                }
            }
            table.finish()
        }
        Suite::Offset => {
            let mut table = Table::new("late start: 1 at N = 2n-6, then 0 through 2n-2");
            for n_amb in [4usize, 5] {
                let mut code_u = vec![0usize; n_amb];
                code_u[0] = 1;
                code_u[n_amb - 2] = 1;
                let mut code_w = vec![0usize; n_amb];
                code_w[0] = 3;
                code_w[n_amb - 2] = 1;
                let u = LehmerCode::new(code_u).decode();
                let w = LehmerCode::new(code_w).decode();
                let start = 2 * n_amb as u64 - 6;
                for n in start..=(2 * n_amb as u64 - 2) {
                    eprintln!("computing n = {n_amb}, N = {n} ...");
                    let got = schubert::stretched_coefficient_threaded(
                        &u,
                        &u,
                        &w,
                        n,
                        Method::Polytope,
                        threads,
                    )?;
                    let want = if n == start { 1 } else { 0 };
                    table.row(
                        &format!("n={n_amb} N={n}"),
                        &want.to_string(),
                        &got.to_string(),
                    );
                }
            }
            table.finish()
        }
        Suite::Kostka => {
            let u = parse_perm("2143")?;
            let a = WeightVector::new(vec![2]);
            let mut table = Table::new("K_{N*2143,(2N)} = 1, 0, 0, 0, 0");
            for n in 1..=5u64 {
                let got = schubert::stretched_kostka(&u, &a, n);
                let want = if n == 1 { 1 } else { 0 };
                table.row(&format!("N={n}"), &want.to_string(), &got.to_string());
            }
            table.finish()
        }
        Suite::Sec61 => {
            let (u, v, w) = (
                parse_perm("3142")?,
                parse_perm("1432")?,
                parse_perm("4321")?,
            );
            let closed = |sigma: &Permutation, n: i64| -> i64 {
                match sigma.to_string().as_str() {
                    "id" => (n + 1) * (n + 2) * (n + 2) * (n + 3) / 12 - 2 * (n + 1),
                    "132" | "21" => n * (n + 1) * (n + 2) * (n + 3) / 12 - n,
                    "231" | "312" => (n - 1) * n * (n + 1) * (n + 2) / 12,
                    "321" => (n - 1) * n * n * (n + 1) / 12,
                    other => panic!("unexpected sigma {other}"),
                }
            };
            let mut table = Table::new("|A_sigma^N| against the six closed forms");
            for sigma in Permutation::symmetric_group(3) {
                for n in 1..=6u64 {
                    let got = polytopes::f_sigma(&u, &v, &w, &sigma, n)?;
                    let want = closed(&sigma, n as i64);
                    table.row(
                        &format!("sigma={sigma} N={n}"),
                        &want.to_string(),
                        &got.to_string(),
                    );
                }
            }
            table.finish()
        }
    }
}
