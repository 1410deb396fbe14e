//! Command-line front end: build and verify the edge code, print circuits,
//! tabulate resources, check configurations, and run summoning simulations.
//!
//! Exit codes: 0 on success, 1 when a verification or check fails, 2 on
//! usage errors or malformed inputs.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use summon_qec::circuits::{synth_decoder, synth_encoder, GateKind};
use summon_qec::code::{
    build_css, distance, perfect_matching_z, resource_counts, verify, DistanceResult,
    PauliOperator, StabilizerCode,
};
use summon_qec::gf2::{BitMatrix, BitVector};
use summon_qec::protocol::{simulate_multi_request, simulate_summon, SummoningRun};
use summon_qec::spacetime::{to_complete_graph, validate, Configuration};

#[derive(Parser)]
#[command(
    name = "summon-qec",
    version,
    about = "Edge code construction, circuit synthesis, and summoning simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the stabilizer matrix, logical operators, and edge labeling
    Build {
        /// Diamond count N (at least 3); odd N uses the next even vertex count
        #[arg(long)]
        n: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flip one bit of a generator before output, as ROW:COL
        #[arg(long, value_name = "ROW:COL")]
        inject_fault: Option<String>,
    },
    /// Check code properties; any failure exits with status 1
    Verify {
        /// Diamond count N (at least 3)
        #[arg(long)]
        n: usize,
        /// Flip one bit of a generator before checking, as ROW:COL
        #[arg(long, value_name = "ROW:COL")]
        inject_fault: Option<String>,
    },
    /// Print the encoding circuit in text form
    EncodeCircuit {
        /// Diamond count N (at least 3)
        #[arg(long)]
        n: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the decoding circuit for one requested vertex
    DecodeCircuit {
        /// Diamond count N (at least 3)
        #[arg(long)]
        n: usize,
        /// Requested vertex, 1-based
        #[arg(long)]
        request: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run summoning simulations on a configuration file
    Simulate {
        /// Path to a configuration JSON file
        #[arg(long)]
        config: PathBuf,
        /// Requested diamond, 1-based
        #[arg(long, conflicts_with = "request_all")]
        request: Option<usize>,
        /// Request at every diamond; the response set must be causally consistent
        #[arg(long)]
        request_all: bool,
        /// Causal order for --request-all, e.g. 1,2,3,4 (defaults to ascending)
        #[arg(long, value_delimiter = ',', requires = "request_all")]
        order: Vec<usize>,
        /// Base RNG seed; shot k uses seed + k
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent shots
        #[arg(long, default_value_t = 1)]
        shots: usize,
        /// Write run records (JSON) to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate qubit and gate counts per diamond count as CSV
    Resources {
        /// Largest diamond count to tabulate (from 3 upward)
        #[arg(long)]
        n_max: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a configuration file and list every violation
    ConfigCheck {
        /// Path to a configuration JSON file
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit the causal relation graph of a configuration in DOT format
    ExportDot {
        /// Path to a configuration JSON file
        #[arg(long)]
        config: PathBuf,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Build { n, out, inject_fault } => cmd_build(n, out, inject_fault),
        Command::Verify { n, inject_fault } => cmd_verify(n, inject_fault),
        Command::EncodeCircuit { n, out } => cmd_encode_circuit(n, out),
        Command::DecodeCircuit { n, request, out } => cmd_decode_circuit(n, request, out),
        Command::Simulate {
            config,
            request,
            request_all,
            order,
            seed,
            shots,
            out,
        } => cmd_simulate(config, request, request_all, order, seed, shots, out),
        Command::Resources { n_max, out } => cmd_resources(n_max, out),
        Command::ConfigCheck { config } => cmd_config_check(config),
        Command::ExportDot { config, out } => cmd_export_dot(config, out),
    }
}

/// Maps a diamond count to the vertex count of the code, rejecting n < 3
/// and rounding odd n up to the next even number.
fn vertex_count(n: usize) -> Result<(usize, bool)> {
    if n < 3 {
        bail!("--n must be at least 3, got {n}");
    }
    let extended = !n.is_multiple_of(2);
    Ok((n + n % 2, extended))
}

fn build_code(n: usize, inject_fault: Option<String>) -> Result<(StabilizerCode, bool)> {
    let (n_tilde, extended) = vertex_count(n)?;
    let code = build_css(n_tilde)?;
    let code = match inject_fault {
        Some(spec) => {
            let (row, col) = parse_fault(&spec)?;
            apply_fault(&code, row, col)?
        }
        None => code,
    };
    Ok((code, extended))
}

fn parse_fault(spec: &str) -> Result<(usize, usize)> {
    let (row, col) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("--inject-fault expects ROW:COL, got {spec:?}"))?;
    Ok((
        row.trim().parse().context("fault row is not a number")?,
        col.trim().parse().context("fault column is not a number")?,
    ))
}

/// Flips one bit in the defining vector of generator `row` (Z rows first,
/// then X rows). The resulting object is a deliberately broken code for
/// exercising the verification path.
fn apply_fault(code: &StabilizerCode, row: usize, col: usize) -> Result<StabilizerCode> {
    let n_z = code.z_rows().n_rows();
    let n_gen = n_z + code.x_rows().n_rows();
    if row >= n_gen {
        bail!("fault row {row} out of range (the code has {n_gen} generators)");
    }
    if col >= code.n_qubits() {
        bail!("fault column {col} out of range (the code has {} qubits)", code.n_qubits());
    }
    let mut z_rows: Vec<BitVector> = code.z_rows().rows().cloned().collect();
    let mut x_rows: Vec<BitVector> = code.x_rows().rows().cloned().collect();
    let target = if row < n_z { &mut z_rows[row] } else { &mut x_rows[row - n_z] };
    target.set(col, !target.get(col));
    Ok(StabilizerCode::from_parts(
        code.n_vertices(),
        BitMatrix::from_rows(z_rows)?,
        BitMatrix::from_rows(x_rows)?,
        code.logical_x().clone(),
        code.logical_z().clone(),
    )?)
}

fn write_output(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn edge_labels(code: &StabilizerCode) -> Vec<String> {
    code.edges().edges().map(|(i, j)| format!("e_{i}_{j}")).collect()
}

fn pauli_row(p: &PauliOperator) -> String {
    format!("{}|{}", p.z_part().to_01_string(), p.x_part().to_01_string())
}

fn cmd_build(n: usize, out: Option<PathBuf>, inject_fault: Option<String>) -> Result<ExitCode> {
    let (code, extended) = build_code(n, inject_fault)?;
    let zeros = "0".repeat(code.n_qubits());
    let mut text = String::new();
    let note = if extended { " (odd N extended)" } else { "" };
    text.push_str(&format!(
        "# N={n}, vertices={}, qubits={}{note}\n",
        code.n_vertices(),
        code.n_qubits()
    ));
    text.push_str(&format!("# edges: {}\n", edge_labels(&code).join(" ")));
    for row in code.z_rows().rows() {
        text.push_str(&format!("{}|{zeros}\n", row.to_01_string()));
    }
    for row in code.x_rows().rows() {
        text.push_str(&format!("{zeros}|{}\n", row.to_01_string()));
    }
    text.push_str(&format!("# logical_z: {}\n", pauli_row(code.logical_z())));
    text.push_str(&format!("# logical_x: {}\n", pauli_row(code.logical_x())));
    write_output(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

/// Distance policy: exhaustive search up to the expected distance for small
/// codes; for larger ones, exclude weights 1 and 2 and confirm the matching
/// witness instead of searching to full depth.
fn check_distance(code: &StabilizerCode) -> (bool, String) {
    let n_tilde = code.n_vertices();
    let expected = n_tilde / 2;
    if n_tilde <= 6 {
        match distance(code, expected) {
            DistanceResult::Exact(d) if d == expected => (true, format!("exact {d}")),
            DistanceResult::Exact(d) => (false, format!("found weight-{d} logical, expected {expected}")),
            DistanceResult::AtLeast(b) => (false, format!("no logical up to weight {}, expected {expected}", b - 1)),
        }
    } else {
        let low = matches!(distance(code, 2), DistanceResult::AtLeast(3));
        let witness_ok = match perfect_matching_z(code) {
            Ok(w) => {
                w.weight() == expected && code.in_centralizer(&w) && !code.in_stabilizer(&w)
            }
            Err(_) => false,
        };
        if low && witness_ok {
            (true, format!(">= 3, witness weight {expected}, exact search skipped"))
        } else if !low {
            (false, "a weight <= 2 logical operator exists".into())
        } else {
            (false, "matching witness is not a logical operator".into())
        }
    }
}

fn cmd_verify(n: usize, inject_fault: Option<String>) -> Result<ExitCode> {
    let (code, extended) = build_code(n, inject_fault)?;
    if extended {
        println!("# N={n} is odd; checking the extended code on {} vertices", code.n_vertices());
    }
    let report = verify(&code);
    let mut all_ok = true;
    for item in &report.items {
        let status = if item.passed { "pass" } else { "FAIL" };
        println!("check {}: {status} ({})", item.name, item.detail);
        all_ok &= item.passed;
    }
    let (dist_ok, detail) = check_distance(&code);
    println!("check distance: {} ({detail})", if dist_ok { "pass" } else { "FAIL" });
    all_ok &= dist_ok;
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_encode_circuit(n: usize, out: Option<PathBuf>) -> Result<ExitCode> {
    let (code, _) = build_code(n, None)?;
    write_output(out, &synth_encoder(&code)?.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode_circuit(n: usize, request: usize, out: Option<PathBuf>) -> Result<ExitCode> {
    let (code, _) = build_code(n, None)?;
    if request < 1 || request > n {
        bail!("--request must be in 1..={n}, got {request}");
    }
    write_output(out, &synth_decoder(&code, request)?.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn load_config(path: &PathBuf) -> Result<Configuration> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{} is not a valid configuration", path.display()))
}

/// Derives a deterministic input qubit from the shot seed, independent of
/// the measurement stream that consumes the same seed.
fn derived_qubit(seed: u64) -> (Complex64, Complex64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    loop {
        let a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let b = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-3 {
            return (a / norm, b / norm);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    config_path: PathBuf,
    request: Option<usize>,
    request_all: bool,
    order: Vec<usize>,
    seed: u64,
    shots: usize,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    if shots == 0 {
        bail!("--shots must be at least 1");
    }
    let config = load_config(&config_path)?;
    let report = validate(&config);
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        bail!("configuration {} is invalid ({report})", config_path.display());
    }
    let n = config.n_diamonds();
    if !request_all && request.is_none() {
        bail!("one of --request or --request-all is required");
    }

    let mut runs: Vec<SummoningRun> = Vec::with_capacity(shots);
    for shot in 0..shots {
        let shot_seed = seed.wrapping_add(shot as u64);
        let (alpha, beta) = derived_qubit(shot_seed);
        let run = if request_all {
            let requested: Vec<usize> = (1..=n).collect();
            let causal_order: Vec<usize> = if order.is_empty() {
                (1..=n).collect()
            } else {
                order.clone()
            };
            simulate_multi_request(&config, &requested, &causal_order, alpha, beta, shot_seed)?
        } else {
            simulate_summon(&config, alpha, beta, request.unwrap(), shot_seed)?
        };
        eprintln!(
            "shot {shot}: request {}, fidelity {:.12}, delivered [{}], {} messages",
            run.requested,
            run.fidelity,
            run.delivered.join(" "),
            run.messages.len()
        );
        runs.push(run);
    }

    let json = if shots == 1 {
        serde_json::to_string_pretty(&runs[0])?
    } else {
        serde_json::to_string_pretty(&runs)?
    };
    write_output(out, &format!("{json}\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn count(tally: &std::collections::BTreeMap<GateKind, usize>, kind: GateKind) -> usize {
    tally.get(&kind).copied().unwrap_or(0)
}

fn cmd_resources(n_max: usize, out: Option<PathBuf>) -> Result<ExitCode> {
    if n_max < 3 {
        bail!("--n-max must be at least 3, got {n_max}");
    }
    let mut text =
        String::from("n,n_tilde,q_css,q_cws,css_h,css_cnot,cws_prep_h,cws_prep_cz,cws_word_z\n");
    for n in 3..=n_max {
        let rc = resource_counts(n)?;
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            rc.n,
            rc.n_tilde,
            rc.q_css,
            rc.q_cws,
            count(&rc.css_gates, GateKind::H),
            count(&rc.css_gates, GateKind::Cnot),
            count(&rc.cws_prep_gates, GateKind::H),
            count(&rc.cws_prep_gates, GateKind::Cz),
            rc.cws_word_z,
        ));
    }
    write_output(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_config_check(config_path: PathBuf) -> Result<ExitCode> {
    let config = load_config(&config_path)?;
    let report = validate(&config);
    if report.is_valid() {
        println!(
            "valid: {} diamonds in {}+1 dimensions",
            config.n_diamonds(),
            config.dim
        );
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &report.violations {
            println!("violation: {v}");
        }
        println!("invalid: {report}");
        Ok(ExitCode::from(1))
    }
}

fn cmd_export_dot(config_path: PathBuf, out: Option<PathBuf>) -> Result<ExitCode> {
    let config = load_config(&config_path)?;
    let graph = to_complete_graph(&config).map_err(|e| anyhow!("{e}"))?;
    write_output(out, &graph.to_dot())?;
    Ok(ExitCode::SUCCESS)
}
