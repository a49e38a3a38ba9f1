use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use teleport_core::channels::{choi_state, ChannelSpec, ChannelStrength, KrausMap, NamedChannel};
use teleport_core::experiments::{
    mean_gain_by_bin, preset_bins, records_to_csv, run_batch, run_campaign, summarize, sweep_bitflip, BatchConfig,
    BatchOutcome, SweepConfig,
};
use teleport_core::optimizer::optimize_realistic;
use teleport_core::protocol::{avg_fidelity_from_f, febf_objective, noncommutation_witness, singlet_fraction, stp_spec, stp_twirl};
use teleport_core::qcore::{random_density_matrix, ComplexMatrix, DensityMatrix};
use teleport_core::{Error, Seed};

use super::{BatchArgs, Command, Common, GaugeArgs, OptimizeArgs, SweepArgs, TwirlArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Usage(String),
    /// Failure while running: exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SamplingExhausted { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Gauge(a) => gauge(a),
        Command::Optimize(a) => optimize(a),
        Command::SweepBitflip(a) => sweep(a),
        Command::RandomBatch(a) => batch(a),
        Command::TwirlDemo(a) => twirl(a),
    }
}

fn init_threads(common: &Common) -> CliResult<()> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn load_channel(file: Option<&Path>, named: Option<&str>) -> CliResult<KrausMap> {
    match (file, named) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let spec = ChannelSpec::from_json(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Ok(spec.build()?)
        }
        (None, Some(named)) => Ok(named.parse::<NamedChannel>()?.build()?),
        (None, None) => Err(CliError::Usage("no channel given".into())),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("writing output: {e}"))),
    }
}

fn gauge(a: GaugeArgs) -> CliResult<()> {
    let map = load_channel(a.channel.as_deref(), a.named.as_deref())?;
    let s = ChannelStrength::of(&map, &map)?;
    println!("gamma: {:.6}", s.gamma);
    println!("lambda: {:.6}", s.lambda);
    Ok(())
}

fn optimize(a: OptimizeArgs) -> CliResult<()> {
    init_threads(&a.common)?;
    let source = load_channel(a.source.as_deref(), a.source_named.as_deref())?;
    let channel = load_channel(a.channel.as_deref(), a.channel_named.as_deref())?;
    let settings = a.common.optimizer();
    settings.validate()?;
    let best = optimize_realistic(&source, &channel, &settings)?;
    let f_stp = febf_objective(&stp_spec(2)?, &source, &channel)?;
    println!("F_max: {:.12}", best.f_max);
    println!("avg_fidelity_max: {:.12}", avg_fidelity_from_f(best.f_max, 2)?);
    println!("avg_fidelity_stp: {:.12}", avg_fidelity_from_f(f_stp, 2)?);
    println!("generations: {}{}", best.generations_used, if best.stagnated { " (stagnated)" } else { "" });
    let json = best.spec.to_json();
    match a.out {
        Some(path) => write_output(Some(&path), &json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    init_threads(&a.common)?;
    let config = SweepConfig {
        p_min: a.p_min,
        p_max: a.p_max,
        steps: a.steps,
        afy_basis_samples: a.afy_samples,
        optimizer: a.common.optimizer(),
        master_seed: a.common.seed,
    };
    let records = sweep_bitflip(&config)?;
    write_output(a.out.as_deref(), &records_to_csv(&records))
}

fn batch(a: BatchArgs) -> CliResult<()> {
    init_threads(&a.common)?;
    let optimizer = a.common.optimizer();
    let outcome: BatchOutcome = if a.preset {
        run_campaign(a.count * preset_bins().len(), a.bin_width, a.afy_samples, &optimizer, a.common.seed)?
    } else {
        let config = BatchConfig {
            gamma_bin_center: a.gamma.expect("required by clap"),
            lambda_bin_center: a.lambda.expect("required by clap"),
            bin_width: a.bin_width,
            count: a.count,
            afy_basis_samples: a.afy_samples,
            optimizer,
            master_seed: a.common.seed,
        };
        run_batch(&config)?
    };
    for (id, why) in &outcome.exhausted {
        eprintln!("warning: scenario {id} skipped: {why}");
    }
    write_output(a.out.as_deref(), &records_to_csv(&outcome.records))?;

    // keep the CSV alone on stdout when no file was given
    let mut report = String::new();
    report.push_str(&summarize(&outcome.records).to_string());
    report.push('\n');
    if a.preset {
        for b in mean_gain_by_bin(&outcome.records, &preset_bins(), a.bin_width) {
            report.push_str(&format!(
                "bin gamma={:.3} lambda={:.3}: n={} mean gain {:.4}%\n",
                b.gamma_center, b.lambda_center, b.count, b.mean_rel_gain
            ));
        }
    }
    if a.out.is_some() {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    Ok(())
}

fn parse_state(spec: &str) -> CliResult<DensityMatrix> {
    if spec == "product00" {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = 1.0.into();
        return Ok(DensityMatrix::new(m)?);
    }
    if let Some(rest) = spec.strip_prefix("choi:") {
        let map = rest.parse::<NamedChannel>()?.build()?;
        return Ok(choi_state(&map)?);
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let seed: u64 = rest.parse().map_err(|e| CliError::Usage(format!("bad seed `{rest}`: {e}")))?;
        return Ok(random_density_matrix(4, Seed(seed)));
    }
    Err(CliError::Usage(format!("unknown state `{spec}` (expected choi:KIND:P, product00 or random:SEED)")))
}

fn twirl(a: TwirlArgs) -> CliResult<()> {
    let source = a.source.parse::<NamedChannel>()?.build()?;
    let rho = parse_state(&a.state)?;
    println!("singlet fraction: {:.12}", singlet_fraction(&rho, 2)?);
    println!("after twirl: {:.12}", singlet_fraction(&stp_twirl(&rho, 2)?, 2)?);
    println!("witness: {:.12}", noncommutation_witness(&source, &rho)?);
    Ok(())
}
