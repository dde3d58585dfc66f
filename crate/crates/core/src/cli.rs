//! Command-line front end. Every command writes one CSV table (to `--out` or
//! standard output) with rows in grid order.
//!
//! Exit codes: 0 success, 1 failed validation or numerical trouble, 2 invalid
//! or infeasible input, 3 a size cap was hit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{self, BoundFamily};
use crate::capacity::{capacity_power, cscc_capacity, cscc_capacity_fixed_p, oracle_vector_mi};
use crate::channel::{mutual_information, Channel, Distribution};
use crate::energy::{self, BufferConfig, SubblockOrder};
use crate::error::{Error, Result};
use crate::exponent::{self, ExponentCurve};
use crate::finiteblock;
use crate::secc;
use crate::typeclass::{enumerate_compositions, feasible_set, Composition};

#[derive(Debug, Parser)]
#[command(name = "subblock", version, about = "Capacities, bounds and energy checks for subblock-constrained codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CSCC capacity versus B for several subblock lengths, with the CCC curve.
    CsccCapacity(CsccArgs),
    /// Capacity-power function versus B.
    CapacityPower(PowerArgs),
    /// CSCC, uniform-SECC and exact SECC rates, or the asymmetry witness.
    Secc(SeccArgs),
    /// Exact rate penalty of a composition against its upper bounds.
    Penalty(PenaltyArgs),
    /// Sphere-packing and random-coding exponents, optionally the CSCC error bound.
    Exponent(ExponentArgs),
    /// Energy buffer simulation of CSCC sequences.
    EnergySim(EnergyArgs),
    /// Local subblock decoding rate approximation on the BSC.
    Lsd(LsdArgs),
    /// Runs the built-in consistency checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// bsc:P0, bec:EPS, z:P0, noiseless:K, builtin, a channel file, or a bare
    /// family name (bsc, bec, z) swept over --p0
    #[arg(long, default_value = "builtin")]
    pub channel: String,
    /// Parameter grid for a bare family: START:STOP:STEP or a comma list
    #[arg(long)]
    pub p0: Option<String>,
    /// Energy per input symbol as a comma list, replacing the channel's own
    #[arg(long = "b", value_name = "LIST")]
    pub energy: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// CSV destination; standard output when absent
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CsccArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "b-values", value_name = "GRID")]
    pub b_values: String,
    #[arg(long = "L", value_name = "LIST", default_value = "2,4,8")]
    pub lengths: String,
    /// Leave out the capacity-power column
    #[arg(long)]
    pub no_ccc: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "b-values", value_name = "GRID")]
    pub b_values: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SeccArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "b-values", value_name = "GRID", default_value = "0.5")]
    pub b_values: String,
    #[arg(long = "L", value_name = "LIST", default_value = "2")]
    pub lengths: String,
    /// Skip the exact (Blahut-Arimoto) SECC capacity
    #[arg(long)]
    pub no_exact: bool,
    /// Print I(x; Y) for x in {01, 10, 11} at L = 2, B = 0.5 on the BSC
    #[arg(long)]
    pub witness: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PenaltyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "L")]
    pub length: usize,
    /// Symbol counts; the most balanced composition when absent
    #[arg(long = "P", value_name = "COUNTS")]
    pub counts: Option<String>,
    /// Skip the exact penalty
    #[arg(long)]
    pub no_exact: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_name = "GRID")]
    pub rates: String,
    /// Symbol counts of the composition; uniform when absent
    #[arg(long = "P", value_name = "COUNTS")]
    pub counts: Option<String>,
    /// Blocklength for the CSCC error bound (a multiple of the subblock length)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Given,
    Random,
    Adversarial,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "B")]
    pub threshold: f64,
    #[arg(long)]
    pub emax: f64,
    #[arg(long = "L")]
    pub length: usize,
    /// Symbol counts; the feasible composition with the least energy when absent
    #[arg(long = "P", value_name = "COUNTS")]
    pub counts: Option<String>,
    #[arg(long, value_enum, default_value_t = OrderArg::Random)]
    pub order: OrderArg,
    /// Shorthand for --order adversarial
    #[arg(long)]
    pub adversarial: bool,
    /// Subblocks per sequence
    #[arg(long, default_value_t = 2)]
    pub subblocks: usize,
    /// Number of sequences; random runs use seeds SEED, SEED+1, ...
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Initial buffer level; G when absent
    #[arg(long)]
    pub einit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the level trace of the first run to this CSV file
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct LsdArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_name = "GRID")]
    pub n: String,
    #[arg(long, value_name = "LIST", default_value = "1e-3")]
    pub epsilon: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Help and version text go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeLimit { .. } => 3,
        Error::Io(_) | Error::Csv(_) | Error::NoConvergence { .. } => 1,
        _ => 2,
    }
}

/// Runs one command; `Ok(false)` means validation checks failed.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::CsccCapacity(a) => emit(&a.out, out, cscc_table(a)?).map(|_| true),
        Command::CapacityPower(a) => emit(&a.out, out, power_table(a)?).map(|_| true),
        Command::Secc(a) => emit(&a.out, out, secc_table(a)?).map(|_| true),
        Command::Penalty(a) => emit(&a.out, out, penalty_table(a)?).map(|_| true),
        Command::Exponent(a) => emit(&a.out, out, exponent_table(a)?).map(|_| true),
        Command::EnergySim(a) => emit(&a.out, out, energy_table(a)?).map(|_| true),
        Command::Lsd(a) => emit(&a.out, out, lsd_table(a)?).map(|_| true),
        Command::Validate(a) => {
            let checks = validation_suite(a.seed);
            let ok = checks.iter().all(|c| c.passed);
            let table = Table {
                header: vec!["check".into(), "passed".into(), "detail".into()],
                rows: checks
                    .into_iter()
                    .map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail])
                    .collect(),
            };
            emit(&a.out, out, table)?;
            Ok(ok)
        }
    }
}

/// A CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn emit(dest: &OutArgs, out: &mut dyn Write, table: Table) -> Result<()> {
    match &dest.out {
        Some(path) => write_table(BufWriter::new(File::create(path)?), &table),
        None => write_table(out, &table),
    }
}

pub fn write_table<W: Write>(w: W, table: &Table) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.header)?;
    for row in &table.rows {
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// `START:STOP:STEP` (inclusive of STOP within half a step), a comma list, or
/// one number. The result must be strictly increasing.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::InvalidArgument(format!("grid '{text}': {msg}"));
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected START:STOP:STEP"));
        }
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if !(step > 0.0) || stop < start || !start.is_finite() || !stop.is_finite() {
            return Err(bad("need STEP > 0 and STOP >= START"));
        }
        let last = ((stop - start) / step + 0.5).floor() as usize;
        (0..=last)
            .map(|k| {
                let v = start + k as f64 * step;
                // snap away representation noise such as 0.30000000000000004
                let snapped = (v * 1e12).round() / 1e12;
                // the last point may overshoot STOP by up to half a step
                if k == last {
                    snapped.min(stop)
                } else {
                    snapped
                }
            })
            .collect()
    } else {
        text.split(',').map(parse).collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("empty"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("values must be strictly increasing"));
    }
    Ok(values)
}

fn parse_counts_list(text: &str) -> Result<Vec<usize>> {
    let values = parse_grid(text).or_else(|_| {
        // counts need not be increasing
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("'{s}' is not a number"))))
            .collect()
    })?;
    values
        .iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidArgument(format!("'{v}' is not a non-negative integer")))
            }
        })
        .collect()
}

fn parse_lengths(text: &str) -> Result<Vec<usize>> {
    let v = parse_counts_list(text)?;
    if v.contains(&0) {
        return Err(Error::InvalidArgument("lengths must be positive".into()));
    }
    Ok(v)
}

fn parse_composition(text: &str, ch: &Channel, length: Option<usize>) -> Result<Composition> {
    let counts = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("composition entry '{s}' is not a count")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let p = Composition::new(counts)?;
    if p.alphabet_size() != ch.input_size() {
        return Err(Error::InvalidArgument(format!(
            "composition has {} entries for a channel with {} inputs",
            p.alphabet_size(),
            ch.input_size()
        )));
    }
    if let Some(l) = length {
        if p.length() != l {
            return Err(Error::InvalidArgument(format!("composition {p} does not have length {l}")));
        }
    }
    Ok(p)
}

fn balanced(k: usize, length: usize) -> Result<Composition> {
    Composition::new((0..k).map(|x| length / k + usize::from(x < length % k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Bsc,
    Bec,
    Z,
}

impl Family {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "bsc" => Some(Self::Bsc),
            "bec" => Some(Self::Bec),
            "z" => Some(Self::Z),
            _ => None,
        }
    }

    fn parameter(&self) -> &'static str {
        match self {
            Self::Bec => "eps",
            _ => "p0",
        }
    }

    fn build(&self, v: f64) -> Result<(Channel, BoundFamily)> {
        Ok(match self {
            Self::Bsc => (Channel::bsc(v)?, BoundFamily::Bsc(v)),
            Self::Bec => (Channel::bec(v)?, BoundFamily::Bec(v)),
            Self::Z => (Channel::z(v)?, BoundFamily::Z(v)),
        })
    }
}

/// One channel of a sweep.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Family parameter when the channel is swept.
    pub parameter: Option<f64>,
    pub channel: Channel,
    pub family: BoundFamily,
}

/// Resolves `--channel`, `--p0` and `--b` into the channels to evaluate, and
/// the header name of the swept parameter, if any.
pub fn resolve_channels(args: &ChannelArgs) -> Result<(Option<&'static str>, Vec<Instance>)> {
    let source = args.channel.trim();
    let energy = args
        .energy
        .as_deref()
        .map(|t| {
            t.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("energy '{s}' is not a number"))))
                .collect::<Result<Vec<f64>>>()
        })
        .transpose()?;
    let finish = |ch: Channel| -> Result<Channel> {
        match &energy {
            Some(b) => ch.with_energy(b.clone()),
            None => Ok(ch),
        }
    };

    if let Some(family) = Family::parse(source) {
        let grid = args
            .p0
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument(format!("--channel {source} needs a --p0 grid")))?;
        let instances = parse_grid(grid)?
            .into_iter()
            .map(|v| {
                let (ch, fam) = family.build(v)?;
                Ok(Instance {
                    parameter: Some(v),
                    channel: finish(ch)?,
                    family: fam,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((Some(family.parameter()), instances));
    }
    if args.p0.is_some() {
        return Err(Error::InvalidArgument("--p0 only applies to a bare family name (bsc, bec, z)".into()));
    }
    let (ch, family) = if source == "builtin" {
        (Channel::noiseless(2)?, BoundFamily::Other)
    } else if let Some((name, value)) = source.split_once(':').filter(|(n, _)| Family::parse(n).is_some() || *n == "noiseless") {
        if name == "noiseless" {
            let k = value
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("'{value}' is not an alphabet size")))?;
            (Channel::noiseless(k)?, BoundFamily::Other)
        } else {
            let v = value
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("'{value}' is not a number")))?;
            Family::parse(name).expect("filtered above").build(v)?
        }
    } else {
        (Channel::from_text(&std::fs::read_to_string(source)?)?, BoundFamily::Other)
    };
    Ok((
        None,
        vec![Instance {
            parameter: None,
            channel: finish(ch)?,
            family,
        }],
    ))
}

fn with_parameter(name: Option<&'static str>, rest: Vec<String>) -> Vec<String> {
    name.map(String::from).into_iter().chain(rest).collect()
}

fn param_cell(i: &Instance) -> Vec<String> {
    i.parameter.map(num).into_iter().collect()
}

/// Evaluates `f` on every (instance, value) pair in parallel and keeps grid order.
fn sweep<F>(instances: &[Instance], values: &[f64], f: F) -> Result<Vec<Vec<String>>>
where
    F: Fn(&Instance, f64) -> Result<Vec<String>> + Sync,
{
    let tasks: Vec<(&Instance, f64)> = instances.iter().flat_map(|i| values.iter().map(move |&v| (i, v))).collect();
    tasks
        .par_iter()
        .map(|(i, v)| {
            let mut row = param_cell(i);
            row.extend(f(i, *v)?);
            Ok(row)
        })
        .collect()
}

fn cscc_table(a: &CsccArgs) -> Result<Table> {
    let (name, instances) = resolve_channels(&a.channel)?;
    let b_values = parse_grid(&a.b_values)?;
    let lengths = parse_lengths(&a.lengths)?;
    let mut header = vec!["B".to_string()];
    header.extend(lengths.iter().map(|l| format!("cscc_L{l}")));
    if !a.no_ccc {
        header.push("ccc".into());
    }
    let rows = sweep(&instances, &b_values, |i, b| {
        let mut row = vec![num(b)];
        for &l in &lengths {
            row.push(num(cscc_capacity(&i.channel, l, b)?.rate));
        }
        if !a.no_ccc {
            row.push(num(capacity_power(&i.channel, b, 1e-10)?.rate));
        }
        Ok(row)
    })?;
    Ok(Table {
        header: with_parameter(name, header),
        rows,
    })
}

fn power_table(a: &PowerArgs) -> Result<Table> {
    let (name, instances) = resolve_channels(&a.channel)?;
    let b_values = parse_grid(&a.b_values)?;
    let header = ["B", "capacity", "mean_energy", "multiplier", "certified_gap"].map(String::from).to_vec();
    let rows = sweep(&instances, &b_values, |i, b| {
        let r = capacity_power(&i.channel, b, a.tol)?;
        let energy = r.distribution().map_or(f64::NAN, |d| i.channel.mean_energy(d.probs()));
        Ok(vec![
            num(b),
            num(r.rate),
            num(energy),
            r.diagnostics.multiplier.map(num).unwrap_or_default(),
            num(r.diagnostics.residual),
        ])
    })?;
    Ok(Table {
        header: with_parameter(name, header),
        rows,
    })
}

fn secc_table(a: &SeccArgs) -> Result<Table> {
    let (name, instances) = resolve_channels(&a.channel)?;
    if a.witness {
        let header = ["I_01", "I_10", "I_11", "difference"].map(String::from).to_vec();
        let rows = sweep(&instances, &[0.0], |i, _| {
            let info = secc::per_input_information(&i.channel, 2, 0.5)?;
            let get = |x: &[usize]| {
                info.iter()
                    .find(|(s, _)| s == x)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| Error::InvalidArgument("the witness needs a binary channel with b = (0, 1)".into()))
            };
            let (i01, i10, i11) = (get(&[0, 1])?, get(&[1, 0])?, get(&[1, 1])?);
            Ok(vec![num(i01), num(i10), num(i11), num(i01 - i11)])
        })?;
        return Ok(Table {
            header: with_parameter(name, header),
            rows,
        });
    }
    let b_values = parse_grid(&a.b_values)?;
    let lengths = parse_lengths(&a.lengths)?;
    let mut header = vec!["B".to_string()];
    for l in &lengths {
        header.push(format!("cscc_L{l}"));
        header.push(format!("secc_uniform_L{l}"));
        if !a.no_exact {
            header.push(format!("secc_L{l}"));
        }
    }
    header.push("ccc".into());
    let rows = sweep(&instances, &b_values, |i, b| {
        let mut row = vec![num(b)];
        for &l in &lengths {
            row.push(num(cscc_capacity(&i.channel, l, b)?.rate));
            row.push(num(secc::secc_uniform_rate(&i.channel, l, b)?));
            if !a.no_exact {
                row.push(num(secc::secc_capacity(&i.channel, l, b, a.tol)?.rate));
            }
        }
        row.push(num(capacity_power(&i.channel, b, 1e-10)?.rate));
        Ok(row)
    })?;
    Ok(Table {
        header: with_parameter(name, header),
        rows,
    })
}

/// The family bound, with its limiting values where the closed form's
/// parameter range ends (noiseless: `r(L, P)`; useless: 0).
fn family_bound(family: BoundFamily, p: &Composition) -> Result<Option<(String, f64)>> {
    let r = p.rate_loss();
    Ok(match family {
        BoundFamily::Bsc(p0) => {
            // BSC(p0) and BSC(1 - p0) differ by an output relabeling
            let q = p0.min(1.0 - p0);
            let v = if q <= 0.0 {
                r
            } else if q >= 0.5 || p.support_size() < 2 {
                0.0
            } else {
                bounds::penalty_bound_bsc(q, p)?.upper
            };
            Some(("bound_bsc_mgl".into(), v))
        }
        BoundFamily::Bec(eps) => {
            let v = if eps <= 0.0 {
                r
            } else if eps >= 1.0 {
                0.0
            } else {
                bounds::penalty_bound_bec(eps, p)?.upper
            };
            Some(("bound_bec".into(), v))
        }
        BoundFamily::Z(p0) => {
            let v = if p0 <= 0.0 {
                r
            } else if p0 >= 1.0 {
                0.0
            } else {
                bounds::penalty_bound_z(p0, p)?.upper
            };
            Some(("bound_z_channel".into(), v))
        }
        BoundFamily::Other => None,
    })
}

fn penalty_table(a: &PenaltyArgs) -> Result<Table> {
    let (name, instances) = resolve_channels(&a.channel)?;
    let first = &instances[0].channel;
    let p = match &a.counts {
        Some(text) => parse_composition(text, first, Some(a.length))?,
        None => balanced(first.input_size(), a.length)?,
    };
    let bound_name = family_bound(instances[0].family, &p)?.map(|(n, _)| n);
    let mut header = vec!["rate_loss".to_string()];
    header.extend(bound_name.clone());
    if !a.no_exact {
        header.extend(["ccc", "cscc", "penalty"].map(String::from));
    }
    let rows = sweep(&instances, &[0.0], |i, _| {
        let mut row = vec![num(p.rate_loss())];
        if let Some((_, v)) = family_bound(i.family, &p)? {
            row.push(num(v));
        }
        if !a.no_exact {
            let ccc = mutual_information(&p.distribution(), &i.channel);
            let cscc = cscc_capacity_fixed_p(&i.channel, &p)?.rate;
            row.extend([num(ccc), num(cscc), num((ccc - cscc).max(0.0))]);
        }
        Ok(row)
    })?;
    Ok(Table {
        header: with_parameter(name, header),
        rows,
    })
}

fn exponent_table(a: &ExponentArgs) -> Result<Table> {
    let (name, instances) = resolve_channels(&a.channel)?;
    let rates = parse_grid(&a.rates)?;
    let first = &instances[0].channel;
    let p = match &a.counts {
        Some(text) => parse_composition(text, first, None)?,
        None => Composition::new(vec![1; first.input_size()])?,
    };
    let mut header = ["R", "e_sp", "e_r", "s", "r_hat"].map(String::from).to_vec();
    if a.n.is_some() {
        header.extend(["shifted_rate", "exponent_lower_bound", "log2_error_bound", "vacuous"].map(String::from));
    }
    let rows = sweep(&instances, &rates, |i, r| {
        let curve = ExponentCurve::new(&i.channel, &p.distribution(), a.tol)?;
        let point = exponent::sphere_packing_point(&i.channel, &p.distribution(), r, a.tol)?;
        let mut row = vec![
            num(r),
            num(point.exponent()),
            num(curve.random_coding(r)?),
            point.s().map(num).unwrap_or_default(),
            num(curve.r_hat),
        ];
        if let Some(n) = a.n {
            let bound = exponent::cscc_error_bound_with(&i.channel, &p, r, n, a.tol)?;
            row.extend([
                num(bound.shifted_rate),
                num(curve.random_coding(bound.shifted_rate)?),
                num(bound.log2_bound),
                bound.vacuous.to_string(),
            ]);
        }
        Ok(row)
    })?;
    Ok(Table {
        header: with_parameter(name, header),
        rows,
    })
}

/// The feasible composition with the least energy; ties go to the first in
/// lexicographic order.
pub fn least_energy_feasible(ch: &Channel, length: usize, threshold: f64) -> Result<Composition> {
    let fs = feasible_set(ch, length, threshold)?;
    let mut best: Option<&Composition> = None;
    for p in fs.iter() {
        if best.is_none_or(|b| p.energy(ch) < b.energy(ch) - 1e-12) {
            best = Some(p);
        }
    }
    Ok(best.expect("feasible set is non-empty").clone())
}

fn energy_table(a: &EnergyArgs) -> Result<Table> {
    let (_, instances) = resolve_channels(&a.channel)?;
    if instances.len() != 1 {
        return Err(Error::InvalidArgument("energy-sim takes a single channel".into()));
    }
    let ch = &instances[0].channel;
    let p = match &a.counts {
        Some(text) => parse_composition(text, ch, Some(a.length))?,
        None => least_energy_feasible(ch, a.length, a.threshold)?,
    };
    if p.energy(ch) < a.threshold - crate::typeclass::ENERGY_SLACK {
        return Err(Error::Infeasible(format!("{p} harvests {} per use, below B = {}", p.energy(ch), a.threshold)));
    }
    let g = energy::g_value(&p, ch, a.threshold);
    let cfg = BufferConfig::new(a.emax, a.threshold, a.einit.unwrap_or(g))?;
    let bound = energy::max_subblock_length(ch, &p.distribution(), a.threshold, a.emax)?;
    let order = if a.adversarial { OrderArg::Adversarial } else { a.order };
    let header = [
        "run",
        "L",
        "composition",
        "g",
        "max_subblock_length",
        "order",
        "seed",
        "e_init",
        "outages",
        "overflows",
        "first_outage",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::with_capacity(a.runs);
    for run in 0..a.runs {
        let seed = a.seed + run as u64;
        let (label, subblock_order) = match order {
            OrderArg::Given => ("given", SubblockOrder::AsGiven),
            OrderArg::Random => ("random", SubblockOrder::Random(seed)),
            OrderArg::Adversarial => ("adversarial", SubblockOrder::Adversarial),
        };
        let seq = energy::cscc_sequence(&p, ch, a.threshold, a.subblocks, subblock_order)?;
        let trace = energy::simulate(&cfg, ch, &seq)?;
        if run == 0 {
            if let Some(path) = &a.trace {
                trace.write_csv(BufWriter::new(File::create(path)?))?;
            }
        }
        rows.push(vec![
            run.to_string(),
            a.length.to_string(),
            p.to_string(),
            num(g),
            bound.to_string(),
            label.to_string(),
            if order == OrderArg::Random { seed.to_string() } else { String::new() },
            num(cfg.e_init),
            trace.outages().to_string(),
            trace.overflows().to_string(),
            trace.outage_indices.first().map(|i| i.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Table { header, rows })
}

fn lsd_table(a: &LsdArgs) -> Result<Table> {
    let (name, instances) = resolve_channels(&a.channel)?;
    let lengths = parse_lengths(&a.n)?;
    let epsilons = parse_grid(&a.epsilon)?;
    let header = ["n", "epsilon", "lsd_rate_approx", "joint_lower_bound", "capacity"].map(String::from).to_vec();
    let mut tasks = Vec::new();
    for i in &instances {
        let p = match i.family {
            BoundFamily::Bsc(p) => p,
            _ => return Err(Error::InvalidArgument("lsd needs a BSC (bsc:P or --channel bsc --p0 GRID)".into())),
        };
        for &n in &lengths {
            for &eps in &epsilons {
                tasks.push((i, p, n, eps));
            }
        }
    }
    let rows = tasks
        .par_iter()
        .map(|&(i, p, n, eps)| {
            let mut row = param_cell(i);
            let joint = if n % 2 == 0 {
                num(finiteblock::joint_decoding_lower_bound(p, n)?)
            } else {
                String::new()
            };
            row.extend([
                n.to_string(),
                num(eps),
                num(finiteblock::lsd_rate_bsc(p, n, eps)?),
                joint,
                num(finiteblock::bsc_capacity(p)?),
            ]);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: with_parameter(name, header),
        rows,
    })
}

/// Outcome of one built-in check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Fast self-consistency checks over the whole library.
pub fn validation_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    for _ in 0..12 {
        let k = rng.random_range(2..=3usize);
        let s = rng.random_range(2..=3usize);
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let raw: Vec<f64> = (0..s).map(|_| rng.random_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / total).collect()
            })
            .collect();
        let length = rng.random_range(2..=4usize);
        let comps = enumerate_compositions(k, length).unwrap_or_default();
        let p = comps[rng.random_range(0..comps.len())].clone();
        instances.push((rows, p));
    }

    vec![
        check("symmetry_reduction", (|| {
            let mut worst: f64 = 0.0;
            for (rows, p) in &instances {
                let ch = Channel::new(rows.clone(), vec![0.0; rows.len()])?;
                let fast = cscc_capacity_fixed_p(&ch, p)?.rate;
                worst = worst.max((fast - oracle_vector_mi(&ch, p)?).abs());
            }
            Ok((worst <= 1e-9, format!("max difference {worst:.3e} over {} instances", instances.len())))
        })()),
        check("noiseless_closed_forms", (|| {
            let ch = Channel::noiseless(2)?;
            let cscc = cscc_capacity(&ch, 2, 0.5)?.rate;
            let uniform = secc::secc_uniform_rate(&ch, 2, 0.5)?;
            let exact = secc::secc_capacity(&ch, 2, 0.5, 1e-12)?.rate;
            let want = 3f64.log2() / 2.0;
            let ok = (cscc - 0.5).abs() <= 1e-12 && (uniform - want).abs() <= 1e-12 && (exact - want).abs() <= 1e-9;
            Ok((ok, format!("cscc {cscc}, uniform secc {uniform}, secc {exact}")))
        })()),
        check("capacity_sandwich", (|| {
            let mut worst = f64::INFINITY;
            for p0 in [0.05, 0.2, 0.35] {
                let ch = Channel::bsc(p0)?;
                for b in [0.5, 0.6, 0.75] {
                    let cscc = cscc_capacity(&ch, 4, b)?.rate;
                    let secc = secc::secc_capacity(&ch, 4, b, 1e-11)?.rate;
                    let ccc = capacity_power(&ch, b, 1e-11)?.rate;
                    worst = worst.min((secc - cscc).min(ccc - secc));
                }
            }
            Ok((worst >= -1e-9, format!("smallest slack {worst:.3e}")))
        })()),
        check("penalty_bounds", (|| {
            let p = Composition::new(vec![2, 2])?;
            let mut ok = true;
            for p0 in [0.05, 0.15, 0.3, 0.45] {
                let ch = Channel::bsc(p0)?;
                let penalty = mutual_information(&p.distribution(), &ch) - cscc_capacity_fixed_p(&ch, &p)?.rate;
                let mgl = bounds::penalty_bound_bsc(p0, &p)?.upper;
                ok &= penalty >= -1e-12 && penalty <= mgl + 1e-9 && mgl < p.rate_loss();
            }
            Ok((ok, "BSC, L = 4, P = (2, 2)".into()))
        })()),
        check("exponent_kkt", (|| {
            let ch = Channel::bsc(0.1)?;
            let u = Distribution::uniform(2);
            let curve = ExponentCurve::new(&ch, &u, 1e-11)?;
            let mut worst: f64 = 0.0;
            for r in [0.1, 0.25, 0.4] {
                if let exponent::SpherePackingPoint::Tilted(t) = exponent::sphere_packing_point(&ch, &u, r, 1e-11)? {
                    worst = worst.max((t.rate - r).abs());
                }
            }
            let jump = (curve.sphere_packing(curve.r_hat)? - curve.e_sp_at_r_hat).abs();
            Ok((worst <= 1e-8 && jump <= 1e-9, format!("max |I - R| {worst:.2e}, jump at r_hat {jump:.2e}")))
        })()),
        check("energy_bound", (|| {
            let ch = Channel::noiseless(2)?;
            let p = Composition::new(vec![4, 4])?;
            let cfg = BufferConfig::starting_at_g(&ch, &p, 0.5, 4.0)?;
            let mut outages = 0;
            for k in 0..100 {
                let seq = energy::cscc_sequence(&p, &ch, 0.5, 10, SubblockOrder::Random(seed.wrapping_add(k)))?;
                outages += energy::simulate(&cfg, &ch, &seq)?.outages();
            }
            let over = Composition::new(vec![5, 5])?;
            let seq = energy::adversarial_codeword(&over, &ch, 0.5, 2)?;
            let forced = energy::simulate(&BufferConfig::new(4.0, 0.5, 4.0)?, &ch, &seq)?.outages();
            Ok((outages == 0 && forced >= 1, format!("L = 8: {outages} outages; L = 10 adversarial: {forced}")))
        })()),
        check("asymmetry_witness", (|| {
            let mut ok = true;
            let mut detail = Vec::new();
            for p0 in [0.1, 0.25, 0.4] {
                let (a, b) = secc::asymmetry_witness(p0)?;
                ok &= (a - b).abs() > 1e-4;
                detail.push(format!("{p0}: {:.3e}", a - b));
            }
            Ok((ok, detail.join("; ")))
        })()),
        check("lsd_ordering", (|| {
            let r = finiteblock::lsd_rate_bsc(0.11, 128, 1e-3)?;
            let joint = finiteblock::joint_decoding_lower_bound(0.11, 128)?;
            let looser = finiteblock::lsd_rate_bsc(0.11, 128, 1e-2)?;
            Ok((r < joint && r < looser, format!("lsd {r}, joint {joint}")))
        })()),
        check("capacity_power_concave", (|| {
            let ch = Channel::bsc(0.1)?;
            let values = (0..=10)
                .map(|k| capacity_power(&ch, k as f64 / 10.0, 1e-11).map(|r| r.rate))
                .collect::<Result<Vec<f64>>>()?;
            let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-9);
            let concave = values.windows(3).all(|w| w[1] >= 0.5 * (w[0] + w[2]) - 1e-9);
            Ok((monotone && concave, format!("C(0) = {}, C(1) = {}", values[0], values[10])))
        })()),
    ]
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    run(std::env::args_os(), &mut out, &mut err)
}
