use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mixtel_core::harness::{self, ThresholdReport, VerifySummary};
use mixtel_core::{families, io, states, Error, OptimizerConfig, SamplerSpec, WernerParams};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mixtel",
    version,
    about = "Entropy thresholds for teleportation and dense coding"
)]
struct Cli {
    /// Emit the full report as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct OptimizerArgs {
    /// Random restarts for the singlet-fraction optimizer.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

impl OptimizerArgs {
    fn config(self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy, singlet-fraction bounds and protocol verdicts for one state file.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Sample random states and check that none above the entropy threshold can teleport.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, value_enum)]
        sampler: SamplerChoice,
        /// Weight of the identity for the high-entropy sampler.
        #[arg(long, default_value_t = 0.9)]
        mix: f64,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Tabulate the Werner family on a uniform grid and write CSV.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certified bounds on the singlet fraction.
    Fef {
        file: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Average teleportation fidelity with the state as resource.
    Teleport {
        file: PathBuf,
        /// Also estimate the fidelity from this many Haar-random inputs.
        #[arg(long)]
        mc_samples: Option<usize>,
        /// Rotate the resource onto the optimizer's best maximally entangled witness first.
        #[arg(long)]
        align: bool,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Holevo quantity of the standard dense-coding ensemble.
    Densecode { file: PathBuf },
    /// Print the entropy thresholds for local dimension N.
    Thresholds {
        #[arg(long)]
        n: usize,
    },
    /// Write a named state to a JSON state file (stdout if no --out).
    State {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Werner mixing parameter.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Bell-diagonal weights, comma separated, N² of them.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SamplerChoice {
    Hs,
    HighEntropy,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Family {
    Werner,
    Extremal,
    BellDiagonal,
    MaximallyMixed,
    Phi,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::TheoremViolation(record)) => {
            eprintln!("theorem violation: {record}");
            match serde_json::to_string(&record.state) {
                Ok(state) => eprintln!("offending state: {state}"),
                Err(e) => eprintln!("could not serialize offending state: {e}"),
            }
            if cli.json {
                if let Ok(text) = harness::to_report_json(&record) {
                    println!("{text}");
                }
            }
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn emit<T: Serialize>(json: bool, report: &T, text: impl FnOnce(&T) -> String) -> mixtel_core::Result<()> {
    let out = if json {
        harness::to_report_json(report)?
    } else {
        text(report)
    };
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", out.trim_end())?;
    Ok(())
}

fn run(cli: &Cli) -> mixtel_core::Result<()> {
    let json = cli.json;
    match &cli.command {
        Command::Analyze { file, opt } => {
            let report = harness::analyze_state(file, &opt.config())?;
            emit(json, &report, analyze_text)
        }
        Command::Verify {
            n,
            samples,
            sampler,
            mix,
            opt,
        } => {
            let spec = match sampler {
                SamplerChoice::Hs => SamplerSpec::hilbert_schmidt(*n, opt.seed),
                SamplerChoice::HighEntropy => SamplerSpec::high_entropy(*n, *mix, opt.seed),
            };
            let summary = harness::verify_theorem(*n, *samples, &spec, &opt.config())?;
            emit(json, &summary, verify_text)
        }
        Command::Sweep { n, points, out } => {
            let rows = harness::sweep_werner(*n, *points)?;
            harness::write_sweep_csv(&rows, BufWriter::new(File::create(out)?))?;
            emit(json, &rows, |rows| {
                format!("wrote {} rows to {}", rows.len(), out.display())
            })
        }
        Command::Fef { file, opt } => {
            let report = harness::fef_report(&io::read_state(file)?, &opt.config())?;
            emit(json, &report, |r| {
                format!(
                    "n          {}\nF_lower    {:.9}\nF_upper    {:.9}\ngap        {:.3e}\nconverged  {}\nverdict    {:?}",
                    r.n, r.lower, r.upper, r.gap, r.converged, r.verdict
                )
            })
        }
        Command::Teleport {
            file,
            mc_samples,
            align,
            opt,
        } => {
            let rho = io::read_state(file)?;
            let cfg = opt.config();
            let report = harness::teleport_report(&rho, *mc_samples, opt.seed, align.then_some(&cfg))?;
            emit(json, &report, |r| {
                let mut s = format!(
                    "n            {}\naligned      {}\nf_phi        {:.9}\nf_avg        {:.9}\nclassical    {:.9}\nbeats        {}",
                    r.n, r.aligned, r.f_phi, r.f_avg_exact, r.classical_fidelity, r.beats_classical
                );
                if let (Some(mc), Some(se)) = (r.f_avg_mc, r.mc_std_error) {
                    s.push_str(&format!("\nf_avg_mc     {mc:.9} ± {se:.2e} ({} samples)", r.n_samples));
                }
                s
            })
        }
        Command::Densecode { file } => {
            let report = harness::densecode_report(&io::read_state(file)?)?;
            emit(json, &report, |r| {
                format!(
                    "n          {}\nS          {:.9}\nS_average  {:.9}\nchi        {:.9}\nlog2_N     {:.9}\nverdict    {:?}",
                    r.n, r.s_vn, r.s_average, r.holevo_chi, r.log2_n, r.verdict
                )
            })
        }
        Command::Thresholds { n } => {
            let report = harness::thresholds_report(*n)?;
            emit(json, &report, |r| {
                format!(
                    "T_vn      {:.6}\nT_linear  {:.6}\nlog2_N    {:.6}",
                    r.t_vn, r.t_linear, r.log2_n
                )
            })
        }
        Command::State {
            family,
            n,
            epsilon,
            weights,
            out,
        } => {
            let rho = match family {
                Family::Werner => {
                    let eps = epsilon.ok_or_else(|| Error::InvalidParameter("werner needs --epsilon".into()))?;
                    families::werner(WernerParams::new(*n, eps)?)?
                }
                Family::Extremal => families::extremal_threshold_state(*n)?,
                Family::BellDiagonal => families::bell_diagonal(*n, weights)?,
                Family::MaximallyMixed => states::maximally_mixed(*n)?,
                Family::Phi => states::DensityMatrix::from_pure(&states::canonical_phi(*n)?)?,
            };
            match out {
                Some(path) => io::write_state(path, &rho),
                None => {
                    println!("{}", io::state_to_json(&rho));
                    Ok(())
                }
            }
        }
    }
}

fn analyze_text(r: &ThresholdReport) -> String {
    format!(
        "n                 {}\n\
         S_vn              {:.9}\n\
         S_linear          {:.9}\n\
         T_vn              {:.9}\n\
         T_linear          {:.9}\n\
         densecoding_T     {:.9}\n\
         F_lower           {:.9}\n\
         F_upper           {:.9}\n\
         teleport          {:?}\n\
         entropy/teleport  {:?}\n\
         entropy/dense     {:?}\n\
         chi               {:.9}\n\
         dense coding      {:?}",
        r.n,
        r.s_vn,
        r.s_linear,
        r.t_vn,
        r.t_linear,
        r.densecoding_t,
        r.fef_lower,
        r.fef_upper,
        r.teleport_verdict,
        r.entropy_verdict_teleport,
        r.entropy_verdict_densecoding,
        r.holevo_chi,
        r.densecoding_verdict
    )
}

fn verify_text(s: &VerifySummary) -> String {
    let c = &s.counts;
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.9}"));
    format!(
        "n = {}, samples = {}, sampler = {:?}, threshold = {:.9}\n\
         \x20               F_lower high  F_lower low\n\
         S > T           {:>12}  {:>11}\n\
         S <= T          {:>12}  {:>11}\n\
         violations: {}, contrapositive violations: {}\n\
         fraction above threshold: {:.4}\n\
         max F_lower above threshold: {}\n\
         max S with F_lower high: {}",
        s.n,
        s.samples,
        s.sampler.kind,
        s.threshold,
        c.above_t_fef_high,
        c.above_t_fef_low,
        c.below_t_fef_high,
        c.below_t_fef_low,
        s.violations,
        s.contrapositive_violations,
        s.fraction_above_threshold,
        opt(s.max_fef_lower_above_threshold),
        opt(s.max_entropy_fef_high)
    )
}
