use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser};
use momcut_cli::config::{parse_band, parse_pair, parse_strategy, DEFAULT_EPSILON, DEFAULT_N};
use momcut_cli::output::{emit_curves_2d, emit_density, report_json, write_density};
use momcut_cli::pipeline::{
    compare_2d, compare_data, compare_mixed, compare_pdf, cutoff_only_file, gen_spectrum,
};
use momcut_cli::{
    emit_curves, emit_report, Generator, PerDensity, Priors, ProductGenerator, RunConfig,
    SpectrumOptions, Subcommand,
};

/// Cut-off length scales at which two densities agree, from their moments.
#[derive(Parser)]
#[command(name = "momcut", version)]
enum Cli {
    /// Compare two analytic densities.
    ComparePdf {
        /// normal:MU,SIGMA | uniform | linear | spectrum[:SEED]
        #[arg(long)]
        f: Generator,
        #[arg(long)]
        g: Generator,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two single-column CSV samples.
    CompareData {
        data_f: PathBuf,
        data_g: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare a CSV sample with an analytic density on [0, 1].
    CompareMixed {
        data_f: PathBuf,
        #[arg(long)]
        g: Generator,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for the cut-off from a gap file (M_0 .. M_{n-1}, then R_n).
    CutoffOnly {
        gap_file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write one scale-separated density as `x,f` CSV.
    GenSpectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Compare two product densities A*B on the unit square.
    #[command(name = "compare-2d")]
    Compare2d {
        #[arg(long)]
        f: ProductGenerator,
        #[arg(long)]
        g: ProductGenerator,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Number of known moments, <x^0> .. <x^{n-1}>.
    #[arg(long = "n", default_value_t = DEFAULT_N)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Grid points per axis (default 1001, or 201 for compare-2d).
    #[arg(long)]
    grid: Option<usize>,
    /// Nodes on [0, K] (default max(2001, ceil(200 K))).
    #[arg(long)]
    kgrid: Option<usize>,
    /// holder | bounded | abscont | ibp
    #[arg(long, default_value = "holder")]
    strategy: String,
    /// Support [a, b] mapped onto [0, 1], as `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    modes: usize,
    /// Zeroed modes `lo,hi`, or `none`.
    #[arg(long, default_value = "17,48")]
    zero_band: String,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Add Z standard errors to every empirical moment gap.
    #[arg(long)]
    inflate_se: Option<f64>,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    out_curves: Option<PathBuf>,
    /// Upper bound on the density, `v` or `vf,vg`.
    #[arg(long)]
    sup_norm: Option<PerDensity>,
    /// Fixed m for the bounded strategy (default: smallest bound).
    #[arg(long)]
    bounded_m: Option<usize>,
    /// Density value at an anchor point, `v` or `vf,vg`.
    #[arg(long)]
    anchor: Option<PerDensity>,
    /// L1 norm of the derivative, `v` or `vf,vg`.
    #[arg(long)]
    deriv_l1: Option<PerDensity>,
    #[arg(long = "f-at-1", allow_hyphen_values = true)]
    f_at_1: Option<PerDensity>,
    #[arg(long = "fprime-at-1", allow_hyphen_values = true)]
    fprime_at_1: Option<PerDensity>,
    /// Upper bound on |f''|, `v` or `vf,vg`.
    #[arg(long = "sup-f2")]
    sup_f2: Option<PerDensity>,
}

impl Common {
    fn config(self, subcommand: Subcommand) -> Result<RunConfig> {
        let zero_band = match self.zero_band.as_str() {
            "none" => None,
            band => Some(parse_band(band)?),
        };
        let config = RunConfig {
            subcommand,
            n: self.n,
            epsilon: self.epsilon,
            grid: self.grid,
            kgrid: self.kgrid,
            strategy: parse_strategy(&self.strategy)?,
            priors: Priors {
                sup_norm: self.sup_norm,
                bounded_m: self.bounded_m,
                anchor: self.anchor,
                deriv_l1: self.deriv_l1,
                f_at_1: self.f_at_1,
                fprime_at_1: self.fprime_at_1,
                sup_f2: self.sup_f2,
            },
            domain: self.domain.as_deref().map(parse_pair).transpose()?,
            seed: self.seed,
            spectrum: SpectrumOptions {
                modes: self.modes,
                zero_band,
                margin: self.margin,
            },
            inflate_se: self.inflate_se,
            out_report: self.out_report,
            out_curves: self.out_curves,
        };
        config.validate()?;
        Ok(config)
    }
}

fn write_report(report: &momcut::ComparisonReport, config: &RunConfig) -> Result<()> {
    match &config.out_report {
        Some(path) => emit_report(report, path)?,
        None => std::io::stdout().write_all(report_json(report)?.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli {
        Cli::ComparePdf { f, g, common } => {
            let config = common.config(Subcommand::ComparePdf)?;
            let out = compare_pdf(&f, &g, &config)?;
            if let Some(path) = &config.out_curves {
                emit_curves(&out.curves, path)?;
            }
            write_report(&out.report, &config)
        }
        Cli::CompareData {
            data_f,
            data_g,
            common,
        } => {
            let config = common.config(Subcommand::CompareData)?;
            let out = compare_data(&data_f, &data_g, &config)?;
            if let Some(path) = &config.out_curves {
                emit_curves(&out.curves, path)?;
            }
            write_report(&out.report, &config)
        }
        Cli::CompareMixed { data_f, g, common } => {
            let config = common.config(Subcommand::CompareMixed)?;
            let out = compare_mixed(&data_f, &g, &config)?;
            if let Some(path) = &config.out_curves {
                emit_curves(&out.curves, path)?;
            }
            write_report(&out.report, &config)
        }
        Cli::CutoffOnly { gap_file, common } => {
            let config = common.config(Subcommand::CutoffOnly)?;
            if config.out_curves.is_some() {
                bail!("cutoff-only filters nothing, so it has no curves to write");
            }
            write_report(&cutoff_only_file(&gap_file, &config)?, &config)
        }
        Cli::GenSpectrum { common } => {
            let config = common.config(Subcommand::GenSpectrum)?;
            let f = gen_spectrum(&config)?;
            match &config.out_curves {
                Some(path) => emit_density(&f, path)?,
                None => write_density(&f, &mut std::io::stdout().lock())?,
            }
            Ok(())
        }
        Cli::Compare2d { f, g, common } => {
            let config = common.config(Subcommand::Compare2d)?;
            let out = compare_2d(&f, &g, &config)?;
            if let Some(path) = &config.out_curves {
                emit_curves_2d(&out.curves, path)?;
            }
            write_report(&out.report, &config)
        }
    }
}

fn main() -> Result<ExitCode> {
    match run(Cli::parse()) {
        Ok(()) => Ok(ExitCode::SUCCESS),
        // A closed downstream pipe (`| head`) is not an error.
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<std::io::Error>()
                    .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            }) =>
        {
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err(e.context("momcut failed")),
    }
}
