//! `qldpc`: build CSS codes, decode syndromes, run Monte Carlo sweeps, and
//! fit thresholds.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on runtime
//! decode-contract violations.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qldpc_core::analog::{atd_decode, build_atg};
use qldpc_core::decoder::{decode_hard, decode_soft, DecoderConfig, OsdMethod, TannerGraph};
use qldpc_core::fit::{fit_threshold, plateau_fit, FitPoint};
use qldpc_core::gf2::BitVec;
use qldpc_core::noise::{prob_to_llr, AnalogSyndrome, PRIOR_CLAMP};

use qldpc_cli::formats;
use qldpc_cli::manifest;
use qldpc_cli::runner::config_hash;
use qldpc_cli::scenario::{record_csv_row, run_point, RunRecord, Scenario, CSV_HEADER};

#[derive(Parser)]
#[command(name = "qldpc", version, about = "Analog-syndrome decoding toolkit for CSS codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code family; writes five alist files and a manifest.
    BuildCode {
        /// Code family: toric3d, surface3d, or lp.
        #[arg(long)]
        family: String,
        /// Lattice size for the 3D families.
        #[arg(short = 'L', long = "L", value_name = "SIZE")]
        l: Option<usize>,
        /// Base-matrix preset for lp: n544k80, n714k100, or n1020k136.
        #[arg(long)]
        base: Option<String>,
        /// Periodic boundaries (toric3d only, where it is implied).
        #[arg(long)]
        periodic: bool,
        /// Output directory.
        #[arg(short = 'o', long = "out", value_name = "DIR")]
        out: PathBuf,
    },
    /// Decode one syndrome and print the result as JSON.
    Decode {
        /// Parity-check matrix file (.alist or coordinate format).
        #[arg(long)]
        pcm: PathBuf,
        /// Syndrome file: one value per line, bits or reals with --analog.
        #[arg(long)]
        syndrome: PathBuf,
        /// Treat the syndrome file as analog readouts instead of bits.
        #[arg(long)]
        analog: bool,
        /// Assumed error probability on each data bit.
        #[arg(long = "prior-p", default_value_t = 0.01)]
        prior_p: f64,
        /// Readout noise width; required for ssmsa.
        #[arg(long)]
        sigma: Option<f64>,
        /// Decoding algorithm.
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Atd)]
        algorithm: AlgorithmArg,
        /// Soft-syndrome trust threshold.
        #[arg(long, default_value_t = 5.0)]
        gamma: f64,
        /// Min-sum normalization factor.
        #[arg(long, default_value_t = 0.6)]
        alpha: f64,
        /// Maximum message-passing sweeps.
        #[arg(long = "max-iter", default_value_t = 100)]
        max_iter: usize,
        /// Ordered-statistics stage: none, 0, or cs.
        #[arg(long, value_enum, default_value_t = OsdArg::None)]
        osd: OsdArg,
        /// Combination-sweep depth.
        #[arg(long = "osd-order", default_value_t = 10)]
        osd_order: usize,
    },
    /// Run a scenario file; emits one JSON record per sweep point.
    Simulate {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Worker threads; defaults to available parallelism.
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the records as a CSV table.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Fit a threshold from simulation records (files or stdin).
    FitThreshold {
        /// Record files (JSON lines); stdin when empty.
        #[arg(value_name = "RECORDS")]
        inputs: Vec<PathBuf>,
        /// Fit the word error rate instead of the logical error rate.
        #[arg(long)]
        wer: bool,
        /// Group records by rounds, fit each, and extrapolate the plateau.
        #[arg(long)]
        plateau: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    /// Min-sum on the plain Tanner graph with a hard syndrome.
    Msa,
    /// Soft-syndrome min-sum.
    Ssmsa,
    /// Analog Tanner graph decoding.
    Atd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OsdArg {
    /// Message passing only.
    None,
    /// Order-zero ordered statistics.
    #[value(name = "0")]
    Zero,
    /// Combination sweep.
    Cs,
}

enum Failure {
    Config(String),
    Contract(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Contract(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Contract(m) => m,
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::BuildCode { family, l, base, periodic, out } => {
            build_code(&family, l, base.as_deref(), periodic, &out)
        }
        Command::Decode {
            pcm,
            syndrome,
            analog,
            prior_p,
            sigma,
            algorithm,
            gamma,
            alpha,
            max_iter,
            osd,
            osd_order,
        } => {
            let config = DecoderConfig {
                max_iter,
                alpha,
                gamma,
                osd: match osd {
                    OsdArg::None => None,
                    OsdArg::Zero => Some(OsdMethod::Zero),
                    OsdArg::Cs => Some(OsdMethod::CombinationSweep),
                },
                osd_order,
            };
            decode(&pcm, &syndrome, analog, prior_p, sigma, algorithm, &config)
        }
        Command::Simulate { scenario, threads, csv } => simulate(&scenario, threads, csv),
        Command::FitThreshold { inputs, wer, plateau } => fit(&inputs, wer, plateau),
    }
}

fn build_code(
    family: &str,
    l: Option<usize>,
    base: Option<&str>,
    periodic: bool,
    out: &Path,
) -> Result<(), Failure> {
    let (code, manifest) = manifest::build_family(family, l, base, periodic).map_err(config)?;
    manifest::write_code(out, &code, &manifest).map_err(config)?;
    println!("{}", serde_json::to_string_pretty(&manifest).map_err(config)?);
    Ok(())
}

#[derive(Serialize)]
struct DecodeReport {
    algorithm: String,
    n: usize,
    satisfied: bool,
    bp_converged: bool,
    iterations: usize,
    osd_applied: bool,
    estimate: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    virtual_estimate: Option<Vec<u8>>,
}

fn bits_of(v: &BitVec) -> Vec<u8> {
    (0..v.len()).map(|i| u8::from(v.get(i))).collect()
}

fn read_syndrome_bits(path: &Path, rows: usize) -> Result<BitVec, Failure> {
    let text = fs::read_to_string(path).map_err(config)?;
    let mut bits = BitVec::zeros(rows);
    let mut count = 0usize;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if count >= rows {
            return Err(Failure::Config(format!(
                "{}: more than {rows} syndrome entries",
                path.display()
            )));
        }
        match line {
            "0" => {}
            "1" => bits.set(count, true),
            other => {
                return Err(Failure::Config(format!(
                    "{}:{}: expected a bit, found `{other}`",
                    path.display(),
                    line_no + 1
                )))
            }
        }
        count += 1;
    }
    if count != rows {
        return Err(Failure::Config(format!(
            "{}: expected {rows} syndrome entries, found {count}",
            path.display()
        )));
    }
    Ok(bits)
}

fn read_syndrome_values(path: &Path, rows: usize) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(config)?;
    let mut values = Vec::with_capacity(rows);
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: f64 = line.parse().map_err(|e| {
            Failure::Config(format!("{}:{}: {e}", path.display(), line_no + 1))
        })?;
        values.push(value);
    }
    if values.len() != rows {
        return Err(Failure::Config(format!(
            "{}: expected {rows} readouts, found {}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

fn plus_minus(bits: &BitVec) -> Vec<f64> {
    (0..bits.len()).map(|i| if bits.get(i) { -1.0 } else { 1.0 }).collect()
}

fn decode(
    pcm_path: &Path,
    syndrome_path: &Path,
    analog: bool,
    prior_p: f64,
    sigma: Option<f64>,
    algorithm: AlgorithmArg,
    config_: &DecoderConfig,
) -> Result<(), Failure> {
    if !(0.0..=0.5).contains(&prior_p) {
        return Err(Failure::Config(format!("--prior-p {prior_p} is outside [0, 0.5]")));
    }
    if let Some(s) = sigma {
        if !s.is_finite() || s < 0.0 {
            return Err(Failure::Config(format!("--sigma {s} is not a valid width")));
        }
    }
    let pcm = formats::load_matrix(pcm_path).map_err(config)?;
    let rows = pcm.rows();
    let data_prior = prob_to_llr(prior_p.max(PRIOR_CLAMP));

    let readout = if analog {
        let sigma = sigma.unwrap_or(0.0);
        AnalogSyndrome::new(read_syndrome_values(syndrome_path, rows)?, sigma)
    } else {
        let bits = read_syndrome_bits(syndrome_path, rows)?;
        match sigma {
            Some(s) if s > 0.0 => AnalogSyndrome::new(plus_minus(&bits), s),
            _ => AnalogSyndrome::noiseless(&bits),
        }
    };

    let report = match algorithm {
        AlgorithmArg::Msa => {
            let graph = TannerGraph::new(&pcm);
            let priors = vec![data_prior; pcm.cols()];
            let outcome = decode_hard(&graph, &priors, &readout.hard(), config_);
            DecodeReport {
                algorithm: "msa".into(),
                n: pcm.cols(),
                satisfied: outcome.satisfied,
                bp_converged: outcome.bp_converged,
                iterations: outcome.iterations,
                osd_applied: outcome.osd_applied,
                estimate: bits_of(&outcome.estimate),
                virtual_estimate: None,
            }
        }
        AlgorithmArg::Ssmsa => {
            if readout.sigma <= 0.0 {
                return Err(Failure::Config(
                    "--algorithm ssmsa needs --sigma > 0 to weight the syndrome".into(),
                ));
            }
            let graph = TannerGraph::new(&pcm);
            let priors = vec![data_prior; pcm.cols()];
            let outcome = decode_soft(&graph, &priors, &readout.llrs(), config_);
            DecodeReport {
                algorithm: "ssmsa".into(),
                n: pcm.cols(),
                satisfied: outcome.satisfied,
                bp_converged: outcome.bp_converged,
                iterations: outcome.iterations,
                osd_applied: outcome.osd_applied,
                estimate: bits_of(&outcome.estimate),
                virtual_estimate: None,
            }
        }
        AlgorithmArg::Atd => {
            let aug = build_atg(&pcm);
            let outcome = atd_decode(&aug, data_prior, &readout, config_);
            DecodeReport {
                algorithm: "atd".into(),
                n: pcm.cols(),
                satisfied: outcome.decode.satisfied,
                bp_converged: outcome.decode.bp_converged,
                iterations: outcome.decode.iterations,
                osd_applied: outcome.decode.osd_applied,
                estimate: bits_of(&outcome.data_estimate),
                virtual_estimate: Some(bits_of(&outcome.virtual_estimate)),
            }
        }
    };

    println!("{}", serde_json::to_string(&report).map_err(config)?);
    if !report.satisfied {
        return Err(Failure::Contract(
            "estimate does not satisfy the decoding target".into(),
        ));
    }
    Ok(())
}

fn effective_seed(scenario_seed: u64) -> Result<u64, Failure> {
    match std::env::var("QLDPC_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|e| Failure::Config(format!("QLDPC_SEED: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(scenario_seed),
        Err(e) => Err(Failure::Config(format!("QLDPC_SEED: {e}"))),
    }
}

fn simulate(path: &Path, threads: Option<usize>, csv: Option<PathBuf>) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(config)?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let scenario: Scenario = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Failure::Config(format!("{}: {}: {}", path.display(), e.path(), e.inner())))?;
    scenario.validate().map_err(|msg| {
        Failure::Config(format!("{}: {msg}", path.display()))
    })?;

    let base = path.parent().unwrap_or(Path::new("."));
    let manifest_path = base.join(&scenario.code);
    let (code, manifest) = manifest::load_code(&manifest_path).map_err(config)?;

    let seed = effective_seed(scenario.seed)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(config)?;
    }

    let resolved = Scenario { seed, ..scenario.clone() };
    let hash = config_hash(&resolved);

    let mut sink: Box<dyn Write> = match &scenario.output {
        Some(out) => Box::new(fs::File::create(out).map_err(config)?),
        None => Box::new(std::io::stdout()),
    };
    let mut csv_sink = match &csv {
        Some(out) => {
            let mut file = fs::File::create(out).map_err(config)?;
            writeln!(file, "{CSV_HEADER}").map_err(config)?;
            Some(file)
        }
        None => None,
    };

    for point in scenario.points() {
        let record = run_point(&scenario, &code, &manifest, point, seed, &hash);
        let line = serde_json::to_string(&record).map_err(config)?;
        writeln!(sink, "{line}").map_err(config)?;
        sink.flush().map_err(config)?;
        if let Some(file) = &mut csv_sink {
            writeln!(file, "{}", record_csv_row(&record)).map_err(config)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FitJson {
    p_th: f64,
    mu: f64,
    quadratic: [f64; 3],
    residual: f64,
    points_used: usize,
}

impl From<qldpc_core::fit::ThresholdFit> for FitJson {
    fn from(fit: qldpc_core::fit::ThresholdFit) -> Self {
        Self {
            p_th: fit.p_th,
            mu: fit.mu,
            quadratic: fit.quadratic,
            residual: fit.residual,
            points_used: fit.points_used,
        }
    }
}

#[derive(Serialize)]
struct RoundsFit {
    rounds: usize,
    #[serde(flatten)]
    fit: FitJson,
}

#[derive(Serialize)]
struct PlateauJson {
    fits: Vec<RoundsFit>,
    sustainable: f64,
    slope: f64,
}

fn read_records(inputs: &[PathBuf]) -> Result<Vec<RunRecord>, Failure> {
    let mut text = String::new();
    if inputs.is_empty() {
        std::io::stdin().read_to_string(&mut text).map_err(config)?;
    } else {
        for input in inputs {
            text.push_str(&fs::read_to_string(input).map_err(config)?);
            text.push('\n');
        }
    }
    let mut records = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(line)
            .map_err(|e| Failure::Config(format!("record line {}: {e}", line_no + 1)))?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(Failure::Config("no records to fit".into()));
    }
    Ok(records)
}

fn fit_points(records: &[RunRecord], wer: bool) -> Result<Vec<FitPoint>, Failure> {
    records
        .iter()
        .map(|r| {
            let size = r.l.ok_or_else(|| {
                Failure::Config("records lack the lattice size L needed for scaling".into())
            })?;
            let (rate, err) = if wer { (r.wer, r.wer_err) } else { (r.p_l, r.err) };
            Ok(FitPoint { p: r.p, size, rate, err })
        })
        .collect()
}

fn fit(inputs: &[PathBuf], wer: bool, plateau: bool) -> Result<(), Failure> {
    let records = read_records(inputs)?;
    if plateau {
        let mut groups: BTreeMap<usize, Vec<FitPoint>> = BTreeMap::new();
        for record in &records {
            let rounds = record.rounds.ok_or_else(|| {
                Failure::Config("plateau fitting needs records with rounds".into())
            })?;
            groups
                .entry(rounds)
                .or_default()
                .extend(fit_points(std::slice::from_ref(record), wer)?);
        }
        let mut fits = Vec::new();
        let mut series = Vec::new();
        for (rounds, points) in groups {
            let fit = fit_threshold(&points)
                .map_err(|e| Failure::Config(format!("rounds {rounds}: {e}")))?;
            series.push((rounds, fit.p_th));
            fits.push(RoundsFit { rounds, fit: fit.into() });
        }
        let plateau = plateau_fit(&series).map_err(config)?;
        let out = PlateauJson {
            fits,
            sustainable: plateau.sustainable,
            slope: plateau.slope,
        };
        println!("{}", serde_json::to_string_pretty(&out).map_err(config)?);
    } else {
        let points = fit_points(&records, wer)?;
        let fit = fit_threshold(&points).map_err(config)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&FitJson::from(fit)).map_err(config)?
        );
    }
    Ok(())
}
