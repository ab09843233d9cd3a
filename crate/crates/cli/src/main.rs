mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use bosefermi::lattice::{LuneSumTable, Momentum};
use clap::{Args, Parser, Subcommand};

/// Lattice sums, mediated potentials, scattering lengths and truncated
/// spectra for bosons in a Fermi sea.
#[derive(Debug, Parser)]
#[command(name = "bosefermi", version)]
struct Cli {
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for the persistent lune-sum cache; overrides `BOSEFERMI_CACHE`.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lune resolvent sums `D_α(k, k_F)`.
    Lune(LuneArgs),
    /// Fermion-mediated potential `W_{k_F}` or its limit.
    Effpot(EffpotArgs),
    /// Scattering lengths, critical couplings and collapse energies.
    Scatter(ScatterArgs),
    /// Truncated many-body spectra compared with the effective boson model.
    Spectrum(SpectrumArgs),
    /// Runs the built-in property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct LuneArgs {
    /// Momentum transfer as `x,y,z`; repeat the flag for sweeps.
    #[arg(long = "k", value_parser = parse_momentum, required = true, allow_hyphen_values = true)]
    pub k: Vec<Momentum>,
    /// Squared Fermi momenta (comma separated for sweeps).
    #[arg(long, value_delimiter = ',', required = true)]
    pub kf2: Vec<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Exact rational arithmetic (integer α only).
    #[arg(long)]
    pub exact: bool,
    /// Emits the asymptotics table over every `k` and `k_F²` as CSV.
    #[arg(long)]
    pub sweep: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EffpotArgs {
    /// Fourier potential file for `V`.
    #[arg(long = "V")]
    pub v: PathBuf,
    /// Fourier potential file for `W`; only used with `--limit`.
    #[arg(long = "W")]
    pub w: Option<PathBuf>,
    /// Squared Fermi momenta (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub kf2: Vec<u64>,
    /// Also emit the limiting potential `W − V∗V`.
    #[arg(long)]
    pub limit: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    /// Radial potential file for `w`.
    #[arg(long)]
    pub w: PathBuf,
    /// Radial potential file for `v`.
    #[arg(long)]
    pub v: PathBuf,
    /// Coupling grid `start:step:stop`.
    #[arg(long, value_parser = parse_grid, default_value = "0:0:0")]
    pub g: Grid,
    /// Adds product-state collapse energies.
    #[arg(long, requires = "psi")]
    pub collapse: bool,
    /// Radial wave profile for the collapse table.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    #[arg(long = "N", value_delimiter = ',', default_values_t = [8usize, 16, 32, 64])]
    pub n: Vec<usize>,
    /// Couplings for the collapse table; defaults to `1.5 g★`.
    #[arg(long, value_delimiter = ',')]
    pub collapse_g: Vec<f64>,
    /// Directory receiving `scatter.csv` and `summary.json`; stdout otherwise.
    #[arg(short, long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Extra checks; `ph` runs the particle-hole identity.
    #[arg(long, value_delimiter = ',')]
    pub check: Vec<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restricts the run to one suite.
    #[arg(long, value_enum)]
    pub suite: Option<verify::Suite>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_momentum(s: &str) -> Result<Momentum, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated integers, got `{s}`"));
    }
    let mut k = [0i64; 3];
    for (slot, p) in k.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not an integer"))?;
    }
    Ok(k)
}

/// Points of a `start:step:stop` coupling grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `start:step:stop`, inclusive of `stop` up to rounding; a zero step gives one point.
fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    let [start, step, stop] = parts[..] else {
        return Err(format!("expected start:step:stop, got `{s}`"));
    };
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) || step < 0.0 || stop < start {
        return Err(format!("invalid grid `{s}`"));
    }
    if step == 0.0 {
        return Ok(Grid(vec![start]));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok(Grid((0..=n).map(|i| start + step * i as f64).collect()))
}

/// Marks outcomes that map to a specific exit status.
#[derive(Debug, thiserror::Error)]
pub enum Outcome {
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Capacity(String),
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use bosefermi::Error as E;
    if let Some(o) = e.downcast_ref::<Outcome>() {
        return match o {
            Outcome::Failed(_) => 1,
            Outcome::Usage(_) => 2,
            Outcome::Capacity(_) => 3,
        };
    }
    match e.downcast_ref::<E>() {
        Some(E::Capacity { .. } | E::Convergence { .. } | E::Degeneracy(_)) => 3,
        Some(E::Validation(_) | E::Resonance(_)) => 1,
        Some(_) => 2,
        None if e.downcast_ref::<std::io::Error>().is_some() => 2,
        None => 1,
    }
}

fn lune_table(cli: &Cli) -> anyhow::Result<LuneSumTable> {
    let dir = cli.cache_dir.clone().or_else(|| std::env::var_os("BOSEFERMI_CACHE").map(PathBuf::from));
    Ok(match dir {
        Some(d) => LuneSumTable::with_cache_dir(d)?,
        None => LuneSumTable::new(),
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let table = lune_table(&cli)?;
    match &cli.command {
        Command::Lune(a) => commands::lune(a, &table),
        Command::Effpot(a) => commands::effpot(a, &table),
        Command::Scatter(a) => commands::scatter(a),
        Command::Spectrum(a) => commands::spectrum(a, &table),
        Command::Verify(a) => verify::run(a, &table),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_include_the_endpoint() {
        assert_eq!(parse_grid("0:0:0").unwrap(), Grid(vec![0.0]));
        assert_eq!(parse_grid("0:0.5:2").unwrap().0.len(), 5);
        assert_eq!(parse_grid("0:0.05:2").unwrap().0.len(), 41);
        assert!(parse_grid("1:0.1").is_err());
        assert!(parse_grid("2:0.1:1").is_err());
    }

    #[test]
    fn argument_definitions_are_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn momenta_need_three_components() {
        assert_eq!(parse_momentum("1,-2,0").unwrap(), [1, -2, 0]);
        assert!(parse_momentum("a,b").is_err());
        assert!(parse_momentum("1,2").is_err());
    }
}
