//! Command-line interface: every protocol algorithm as a subcommand over
//! files, plus the server, the benchmark suite, and the security harness.
//!
//! Exit codes: 0 success, 1 verification reject (or a security strategy
//! exceeding its bound), 2 usage error, 3 protocol or I/O error. Diagnostics
//! go to standard error; results go to standard output.

use crate::algebra::Backend;
use crate::bench::{
    emit_figure_series, run_bench, BenchConfig, BenchError, BenchReport, BenchScheme, FigureGrid,
    SweepParam,
};
use crate::scheme::{
    compute_on_input, keygen, probgen, setup, verify, MatrixF, SchemeError,
};
use crate::security::{security_report, ExperimentError, Variant};
use crate::wire::{
    decode_evaluation_key, decode_function_vk, decode_input, decode_input_vk,
    decode_public_params, decode_response, encode_evaluation_key, encode_function_vk, encode_input,
    encode_input_vk, encode_public_params, encode_response, function_id, read_object_file_expecting,
    server, write_object_file, FileKind, WireError,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::io::Write as _;
use std::net::TcpListener;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GroupArg {
    Production,
    Toy,
}

impl From<GroupArg> for Backend {
    fn from(arg: GroupArg) -> Backend {
        match arg {
            GroupArg::Production => Backend::Production,
            GroupArg::Toy => Backend::Toy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Mmvc,
    Fg12,
    Both,
}

impl From<SchemeArg> for BenchScheme {
    fn from(arg: SchemeArg) -> BenchScheme {
        match arg {
            SchemeArg::Mmvc => BenchScheme::Mmvc,
            SchemeArg::Fg12 => BenchScheme::Fg12,
            SchemeArg::Both => BenchScheme::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    E0,
    E3,
}

impl From<VariantArg> for Variant {
    fn from(arg: VariantArg) -> Variant {
        match arg {
            VariantArg::E0 => Variant::E0Standard,
            VariantArg::E3 => Variant::E3RandomTags,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepArg {
    A,
    B,
    M,
    D,
}

impl From<SweepArg> for SweepParam {
    fn from(arg: SweepArg) -> SweepParam {
        match arg {
            SweepArg::A => SweepParam::A,
            SweepArg::B => SweepParam::B,
            SweepArg::M => SweepParam::M,
            SweepArg::D => SweepParam::D,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mmvc",
    version,
    about = "Verifiable outsourcing of matrix-vector products: one tag vector and one proof per matrix, verification sublinear in the matrix size"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate public parameters for dimension d.
    Setup {
        #[arg(long, value_enum, default_value_t = GroupArg::Production)]
        group: GroupArg,
        /// Input dimension d.
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file for the public parameters.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a random m-row function and produce its evaluation and
    /// verification keys.
    Keygen {
        /// Public parameters file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of matrix rows m.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file for the evaluation key (goes to the server).
        #[arg(long)]
        out: PathBuf,
        /// Output file for the function verification key (stays private).
        #[arg(long)]
        vk: PathBuf,
    },
    /// Encode an input vector for outsourcing.
    Probgen {
        /// Public parameters file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated input values; sampled randomly when omitted.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file for the encoded input (goes to the server).
        #[arg(long)]
        out: PathBuf,
        /// Output file for the input verification key (stays private).
        #[arg(long)]
        vk: PathBuf,
    },
    /// Run the server-side computation on files.
    Compute {
        /// Evaluation key file.
        #[arg(long)]
        ek: PathBuf,
        /// Encoded input file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file for the response.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a server response; prints y on acceptance.
    Verify {
        /// Function verification key file.
        #[arg(long)]
        vk: PathBuf,
        /// Input verification key file.
        #[arg(long)]
        vkx: PathBuf,
        /// Response file.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Serve evaluation-key registration and compute requests over TCP.
    Serve {
        /// Port to bind on 127.0.0.1; 0 picks an ephemeral port.
        #[arg(long, default_value_t = 0)]
        port: u16,
    },
    /// Run the instrumented workload benchmark; optionally sweep one
    /// dimension and emit the four comparison CSV series.
    Bench {
        #[arg(long, value_enum, default_value_t = GroupArg::Toy)]
        group: GroupArg,
        /// Number of functions.
        #[arg(long, default_value_t = 2)]
        a: usize,
        /// Number of inputs.
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Rows per function.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Input dimension.
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timed repetitions (median reported); at least 3.
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
        scheme: SchemeArg,
        /// Distribute the compute phase across threads.
        #[arg(long)]
        parallel: bool,
        /// Write the benchmark row as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Directory for the four figure CSV series; requires --sweep.
        #[arg(long)]
        figures_out: Option<PathBuf>,
        /// Dimension to sweep for the figure series.
        #[arg(long, value_enum)]
        sweep: Option<SweepArg>,
        /// Comma-separated sweep values.
        #[arg(long)]
        sweep_values: Option<String>,
    },
    /// Run every built-in forgery strategy against the security experiment
    /// and report rates against the theoretical bound.
    Securitytest {
        #[arg(long, value_enum, default_value_t = GroupArg::Toy)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = VariantArg::E0)]
        variant: VariantArg,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Rows of the challenge function.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Input dimension of the challenge function.
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-strategy results as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_values(list: &str, what: &str) -> Result<Vec<u64>, CliError> {
    list.split(',')
        .map(|item| {
            item.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("{what}: cannot parse '{item}' as a number")))
        })
        .collect()
}

fn cmd_setup(group: GroupArg, d: usize, seed: u64, out: PathBuf) -> Result<i32, CliError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let pk = setup(&mut rng, group.into(), d)?;
    write_object_file(&out, FileKind::PublicParams, &encode_public_params(&pk).bytes)?;
    println!(
        "public parameters: backend={} d={} -> {}",
        pk.group().backend(),
        d,
        out.display()
    );
    Ok(0)
}

fn cmd_keygen(
    input: PathBuf,
    m: usize,
    seed: u64,
    out: PathBuf,
    vk_path: PathBuf,
) -> Result<i32, CliError> {
    let pk = decode_public_params(&read_object_file_expecting(&input, FileKind::PublicParams)?)?;
    let group = *pk.group();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let f = MatrixF::random(&group, m, pk.dimension(), &mut rng)?;
    let (ek, vk) = keygen(&mut rng, &pk, f)?;
    let ek_payload = encode_evaluation_key(&group, &ek).bytes;
    let id = function_id(&ek_payload);
    write_object_file(&out, FileKind::EvaluationKey, &ek_payload)?;
    write_object_file(&vk_path, FileKind::FunctionVk, &encode_function_vk(&vk).bytes)?;
    println!(
        "function {}: m={} d={} ek -> {} vk -> {}",
        hex(&id),
        m,
        pk.dimension(),
        out.display(),
        vk_path.display()
    );
    Ok(0)
}

fn cmd_probgen(
    input: PathBuf,
    x: Option<String>,
    seed: u64,
    out: PathBuf,
    vk_path: PathBuf,
) -> Result<i32, CliError> {
    let pk = decode_public_params(&read_object_file_expecting(&input, FileKind::PublicParams)?)?;
    let group = *pk.group();
    let x = match x {
        Some(list) => {
            let values = parse_values(&list, "--x")?;
            if values.len() != pk.dimension() {
                return Err(CliError::Usage(format!(
                    "--x has {} values, parameters expect d={}",
                    values.len(),
                    pk.dimension()
                )));
            }
            values.iter().map(|&v| group.scalar_from_u64(v)).collect()
        }
        None => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..pk.dimension())
                .map(|_| group.sample_scalar(&mut rng))
                .collect::<Vec<_>>()
        }
    };
    let enc = probgen(&pk, &x)?;
    write_object_file(&out, FileKind::InputEncoding, &encode_input(&group, enc.x()).bytes)?;
    write_object_file(
        &vk_path,
        FileKind::InputVk,
        &encode_input_vk(&group, enc.vk_x()).bytes,
    )?;
    println!(
        "encoded input: d={} enc -> {} vk -> {}",
        pk.dimension(),
        out.display(),
        vk_path.display()
    );
    Ok(0)
}

fn cmd_compute(ek_path: PathBuf, input: PathBuf, out: PathBuf) -> Result<i32, CliError> {
    let (ek_group, ek) =
        decode_evaluation_key(&read_object_file_expecting(&ek_path, FileKind::EvaluationKey)?)?;
    let (enc_group, x) =
        decode_input(&read_object_file_expecting(&input, FileKind::InputEncoding)?)?;
    if ek_group != enc_group {
        return Err(WireError::ProtocolMismatch(
            "evaluation key and input use different groups".into(),
        )
        .into());
    }
    let resp = compute_on_input(&ek_group, &ek, &x)?;
    write_object_file(
        &out,
        FileKind::Response,
        &encode_response(&ek_group, &resp).bytes,
    )?;
    println!(
        "response: m={} -> {}",
        ek.matrix().rows(),
        out.display()
    );
    Ok(0)
}

fn cmd_verify(vk_path: PathBuf, vkx_path: PathBuf, input: PathBuf) -> Result<i32, CliError> {
    let vk = decode_function_vk(&read_object_file_expecting(&vk_path, FileKind::FunctionVk)?)?;
    let (vkx_group, vk_x) =
        decode_input_vk(&read_object_file_expecting(&vkx_path, FileKind::InputVk)?)?;
    let (resp_group, resp) =
        decode_response(&read_object_file_expecting(&input, FileKind::Response)?)?;
    if *vk.group() != vkx_group || vkx_group != resp_group {
        return Err(WireError::ProtocolMismatch(
            "verification keys and response use different groups".into(),
        )
        .into());
    }
    match verify(&vk, &vk_x, &resp)? {
        Some(y) => {
            let group = vk.group();
            let rendered: Vec<String> = y.iter().map(|v| group.scalar_to_string(v)).collect();
            println!("accept y=[{}]", rendered.join(","));
            Ok(0)
        }
        None => {
            eprintln!("verification rejected");
            Ok(1)
        }
    }
}

fn cmd_serve(port: u16) -> Result<i32, CliError> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    println!("listening on {}", listener.local_addr()?);
    std::io::stdout().flush()?;
    server::serve(listener)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    group: GroupArg,
    a: usize,
    b: usize,
    m: usize,
    d: usize,
    seed: u64,
    repetitions: usize,
    scheme: SchemeArg,
    parallel: bool,
    csv: Option<PathBuf>,
    figures_out: Option<PathBuf>,
    sweep: Option<SweepArg>,
    sweep_values: Option<String>,
) -> Result<i32, CliError> {
    let cfg = BenchConfig {
        backend: group.into(),
        a,
        b,
        m,
        d,
        repetitions,
        scheme: scheme.into(),
        seed,
        parallel,
    };
    let report = run_bench(&cfg)?;
    println!("{report}");
    if let Some(path) = csv {
        let mut text = format!(
            "# seed={} backend={}\n{}\n",
            seed,
            cfg.backend,
            BenchReport::csv_header()
        );
        text.push_str(&report.csv_row(&format!("{a}x{b}x{m}x{d}")));
        text.push('\n');
        std::fs::write(&path, text)?;
        println!("csv -> {}", path.display());
    }
    if let Some(dir) = figures_out {
        let sweep = sweep.ok_or_else(|| {
            CliError::Usage("--figures-out requires --sweep and --sweep-values".into())
        })?;
        let values = sweep_values.ok_or_else(|| {
            CliError::Usage("--figures-out requires --sweep-values".into())
        })?;
        let values: Vec<usize> = parse_values(&values, "--sweep-values")?
            .iter()
            .map(|&v| v as usize)
            .collect();
        let grid = FigureGrid {
            backend: cfg.backend,
            a,
            b,
            m,
            d,
            sweep: sweep.into(),
            values,
            seed,
        };
        for path in emit_figure_series(&grid, &dir)? {
            println!("figure -> {}", path.display());
        }
    }
    Ok(0)
}

fn cmd_securitytest(
    group: GroupArg,
    variant: VariantArg,
    trials: u64,
    m: usize,
    d: usize,
    seed: u64,
    csv: Option<PathBuf>,
) -> Result<i32, CliError> {
    let stats = security_report(group.into(), variant.into(), trials, m, d, seed)?;
    println!(
        "security experiment: backend={} variant={} trials={} m={} d={} seed={}",
        Backend::from(group),
        match Variant::from(variant) {
            Variant::E0Standard => "standard",
            Variant::E3RandomTags => "random-tags",
        },
        trials,
        m,
        d,
        seed
    );
    println!(
        "{:<18} {:>8} {:>10} {:>10} {:>10}  verdict",
        "strategy", "trials", "successes", "rate", "bound"
    );
    let mut all_within = true;
    for s in &stats {
        all_within &= s.within_bound;
        println!(
            "{:<18} {:>8} {:>10} {:>10.6} {:>10.6}  {}",
            s.strategy,
            s.trials,
            s.successes,
            s.rate,
            s.bound,
            if s.within_bound { "ok" } else { "EXCEEDED" }
        );
    }
    if let Some(path) = csv {
        let mut text = format!(
            "# seed={} backend={} trials={}\nstrategy,trials,successes,rate,bound,sigma,within_bound\n",
            seed,
            Backend::from(group),
            trials
        );
        for s in &stats {
            text.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.strategy, s.trials, s.successes, s.rate, s.bound, s.sigma, s.within_bound
            ));
        }
        std::fs::write(&path, text)?;
        println!("csv -> {}", path.display());
    }
    Ok(if all_within { 0 } else { 1 })
}

fn dispatch(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Setup { group, d, seed, out } => cmd_setup(group, d, seed, out),
        Cmd::Keygen {
            input,
            m,
            seed,
            out,
            vk,
        } => cmd_keygen(input, m, seed, out, vk),
        Cmd::Probgen {
            input,
            x,
            seed,
            out,
            vk,
        } => cmd_probgen(input, x, seed, out, vk),
        Cmd::Compute { ek, input, out } => cmd_compute(ek, input, out),
        Cmd::Verify { vk, vkx, input } => cmd_verify(vk, vkx, input),
        Cmd::Serve { port } => cmd_serve(port),
        Cmd::Bench {
            group,
            a,
            b,
            m,
            d,
            seed,
            repetitions,
            scheme,
            parallel,
            csv,
            figures_out,
            sweep,
            sweep_values,
        } => cmd_bench(
            group,
            a,
            b,
            m,
            d,
            seed,
            repetitions,
            scheme,
            parallel,
            csv,
            figures_out,
            sweep,
            sweep_values,
        ),
        Cmd::Securitytest {
            group,
            variant,
            trials,
            m,
            d,
            seed,
            csv,
        } => cmd_securitytest(group, variant, trials, m, d, seed, csv),
    }
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests print to stdout and exit 0; real
            // usage errors print to stderr and exit 2.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    env_logger::Builder::from_default_env()
        .format_timestamp(None)
        .init();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
