//! `rcc`: command-line front end for relay-secrecy.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use relay_secrecy::channel::{ChannelFile, GaussianFile, DEFAULT_CLASSIFY_TOL};
use relay_secrecy::gaussian::{self, GaussParamInput, DEFAULT_ETA_POINTS};
use relay_secrecy::info::{AuxInputFile, AuxInputStochFile};
use relay_secrecy::io::{self, Header};
use relay_secrecy::regions::{self, RegionBounds, DEFAULT_RESOLUTION};
use relay_secrecy::sim::{self, SimConfig, SimMode, SimReport};
use relay_secrecy::var::MiQuery;
use relay_secrecy::{
    build_joint, build_joint_stoch, classify, evaluate_bounds, mutual_info, Aux, AuxInput, AuxInputStoch, Encoder, Error,
    Family, GaussianRelayParams, OptBudget, RateRegion, RelayChannelDMC, Slice,
};

#[derive(Debug, Parser)]
#[command(name = "rcc", version, about = "Rate regions and coding simulations for relay channels with confidential messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a channel as degraded, reversely degraded or independent.
    Classify {
        channel: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate information quantities at a fixed auxiliary input.
    Mi {
        channel: PathBuf,
        #[arg(long)]
        aux: PathBuf,
        /// Queries such as `I(X;Y|US)`; repeatable.
        #[arg(long = "query", short = 'q')]
        queries: Vec<String>,
        /// Also evaluate the constraint set of this family.
        #[arg(long)]
        family: Option<Family>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Trace a rate region of a discrete memoryless channel.
    RegionDmc {
        channel: PathBuf,
        #[arg(long, conflicts_with = "bounds")]
        family: Option<Family>,
        #[arg(long, value_enum, default_value_t = SliceArg::Full)]
        slice: SliceArg,
        /// Inner and outer bounds of a planar slice.
        #[arg(long, value_enum)]
        bounds: Option<BoundsArg>,
        #[arg(long, default_value = "deterministic")]
        encoder: Encoder,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Replace the point cloud by its convex hull vertices.
        #[arg(long)]
        hull: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Gaussian inner, outer or secrecy regions.
    RegionGauss {
        #[command(flatten)]
        gauss: GaussArgs,
        #[arg(long, value_enum, default_value_t = GaussFamily::Inner)]
        family: GaussFamily,
        #[arg(long, default_value_t = 65)]
        theta_points: usize,
        #[arg(long, default_value_t = DEFAULT_ETA_POINTS)]
        eta_points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Secrecy capacity bounds of a discrete or Gaussian channel.
    Capacity {
        /// Channel file; omit for a Gaussian channel.
        channel: Option<PathBuf>,
        #[command(flatten)]
        gauss: GaussArgs,
        #[arg(long, default_value = "deterministic")]
        encoder: Encoder,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the block-Markov random code.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Convert between (theta, eta) and (alpha, beta).
    ParamMap {
        #[arg(long, requires = "eta", conflicts_with_all = ["alpha", "beta"])]
        theta: Option<f64>,
        #[arg(long, requires = "theta")]
        eta: Option<f64>,
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = OptBudget::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = OptBudget::default().max_evals)]
    max_evals: usize,
    /// `|U|` instead of the family cap.
    #[arg(long)]
    nu: Option<usize>,
    /// `|V|` instead of the family cap.
    #[arg(long)]
    nv: Option<usize>,
    /// Skip the second input parametrization of the outer families.
    #[arg(long)]
    no_p2: bool,
}

impl BudgetArgs {
    fn budget(&self) -> OptBudget {
        OptBudget {
            restarts: self.restarts,
            max_evals: self.max_evals,
            nu: self.nu,
            nv: self.nv,
            use_p2: !self.no_p2,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct GaussArgs {
    /// JSON file with `N1, N2, rho, P1, P2`.
    #[arg(long, conflicts_with_all = ["n1", "n2", "rho", "p1", "p2"])]
    params: Option<PathBuf>,
    #[arg(long = "N1")]
    n1: Option<f64>,
    #[arg(long = "N2")]
    n2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long = "P1")]
    p1: Option<f64>,
    #[arg(long = "P2")]
    p2: Option<f64>,
}

impl GaussArgs {
    fn given(&self) -> bool {
        self.params.is_some() || [self.n1, self.n2, self.rho, self.p1, self.p2].iter().any(Option::is_some)
    }

    fn load(&self) -> Result<GaussianRelayParams, Error> {
        if let Some(path) = &self.params {
            let file: GaussianFile = read_json(path)?;
            return file.try_into();
        }
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::InvalidConfig(format!("--{name} is required")));
        GaussianRelayParams::new(
            need(self.n1, "N1")?,
            need(self.n2, "N2")?,
            need(self.rho, "rho")?,
            need(self.p1, "P1")?,
            need(self.p2, "P2")?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SliceArg {
    Full,
    NoCommon,
    Secrecy,
}

impl From<SliceArg> for Slice {
    fn from(s: SliceArg) -> Self {
        match s {
            SliceArg::Full => Slice::Full,
            SliceArg::NoCommon => Slice::NoCommon,
            SliceArg::Secrecy => Slice::Secrecy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundsArg {
    /// `(R0, R1)` with `Re = R1`.
    Secrecy,
    /// `(R1, Re)` with `R0 = 0`.
    R1e,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GaussFamily {
    Inner,
    Outer,
    Cds,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    MonteCarlo,
    ExactEquivocation,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::MonteCarlo => SimMode::MonteCarlo,
            ModeArg::ExactEquivocation => SimMode::ExactEquivocation,
        }
    }
}

/// Error reported to the user: a stable name plus a message.
struct Failure {
    name: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let name = match &e {
            Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => "FileNotFound",
            other => other.name(),
        };
        Failure {
            name: name.to_string(),
            message: e.to_string(),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn read_channel(path: &Path) -> Result<RelayChannelDMC, Error> {
    let file: ChannelFile = read_json(path)?;
    file.try_into()
}

fn read_aux(path: &Path) -> Result<Aux, Error> {
    let raw: Value = read_json(path)?;
    if raw.get("p_usv").is_some() {
        let file: AuxInputStochFile = serde_json::from_value(raw)?;
        Ok(Aux::Stoch(AuxInputStoch::try_from(file)?))
    } else {
        let file: AuxInputFile = serde_json::from_value(raw)?;
        Ok(Aux::P1(AuxInput::try_from(file)?))
    }
}

/// Rendered output of one command.
enum Output {
    Json(Value),
    Regions(Vec<RateRegion>),
    Sim(Box<SimReport>),
}

fn region_output(region: RateRegion, hull: bool) -> Result<RateRegion, Error> {
    if !hull {
        return Ok(region);
    }
    let points = region.hull()?;
    Ok(RateRegion { points, ..region })
}

fn bounds_regions(b: RegionBounds) -> Vec<RateRegion> {
    let mut v = vec![b.inner, b.outer];
    v.extend(b.outer_independent);
    v
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Error> {
    Ok(serde_json::to_value(v)?)
}

fn run(cmd: Command) -> Result<(), Failure> {
    let (name, config, out, output) = match cmd {
        Command::Classify { channel, tol, out } => {
            let ch = read_channel(&channel)?;
            let class = classify(&ch, tol);
            let config = json!({"channel": channel, "tol": tol});
            ("classify", config, out, Output::Json(to_value(&class)?))
        }
        Command::Mi {
            channel,
            aux,
            queries,
            family,
            out,
        } => {
            let ch = read_channel(&channel)?;
            let a = read_aux(&aux)?;
            let joint = match &a {
                Aux::P1(p) => build_joint(p, &ch)?,
                Aux::Stoch(s) => build_joint_stoch(s, &ch)?,
                Aux::P2(p) => relay_secrecy::build_joint_p2(p, &ch)?,
            };
            let mut values = Map::new();
            for q in &queries {
                let parsed: MiQuery = q.parse()?;
                values.insert(q.clone(), json!(mutual_info(&joint, &parsed.a, &parsed.b, &parsed.c)?));
            }
            let mut body = json!({"queries": values});
            if let Some(f) = family {
                body["bounds"] = to_value(&evaluate_bounds(&a, &ch, f)?)?;
            }
            let config = json!({"channel": channel, "aux": aux, "queries": queries, "family": family});
            ("mi", config, out, Output::Json(body))
        }
        Command::RegionDmc {
            channel,
            family,
            slice,
            bounds,
            encoder,
            resolution,
            budget,
            hull,
            out,
        } => {
            let ch = read_channel(&channel)?;
            let opt = budget.budget();
            let regions = match (family, bounds) {
                (Some(f), None) => {
                    let s: Slice = slice.into();
                    let weights = regions::weight_grid(s, resolution);
                    vec![regions::trace_weights(&ch, f, s, &weights, &opt, budget.seed)?]
                }
                (None, Some(BoundsArg::Secrecy)) => {
                    bounds_regions(regions::secrecy_capacity_region(&ch, encoder, resolution, &opt, budget.seed)?)
                }
                (None, Some(BoundsArg::R1e)) => bounds_regions(regions::r1e_region(&ch, encoder, resolution, &opt, budget.seed)?),
                _ => return Err(Error::InvalidConfig("give exactly one of --family and --bounds".into()).into()),
            };
            let regions = regions.into_iter().map(|r| region_output(r, hull)).collect::<Result<Vec<_>, _>>()?;
            let config = json!({
                "channel": channel,
                "family": family,
                "slice": format!("{slice:?}"),
                "bounds": bounds.map(|b| format!("{b:?}")),
                "encoder": encoder,
                "resolution": resolution,
                "seed": budget.seed,
                "budget": to_value(&opt)?,
                "hull": hull,
            });
            ("region-dmc", config, out, Output::Regions(regions))
        }
        Command::RegionGauss {
            gauss,
            family,
            theta_points,
            eta_points,
            out,
        } => {
            let p = gauss.load()?;
            let thetas = gaussian::unit_grid(theta_points);
            let etas = gaussian::unit_grid(eta_points);
            let regions = match family {
                GaussFamily::Inner => vec![gaussian::inner_region(&p, &thetas, &etas)?],
                GaussFamily::Outer => vec![gaussian::outer_region(&p, &thetas, &etas)?],
                GaussFamily::Cds => bounds_regions(gaussian::cds_region(&p, &thetas, &etas)?),
            };
            let config = json!({
                "params": to_value(&p)?,
                "family": format!("{family:?}").to_lowercase(),
                "theta_points": theta_points,
                "eta_points": eta_points,
            });
            ("region-gauss", config, out, Output::Regions(regions))
        }
        Command::Capacity {
            channel,
            gauss,
            encoder,
            budget,
            out,
        } => match (channel, gauss.given()) {
            (Some(path), false) => {
                let ch = read_channel(&path)?;
                let opt = budget.budget();
                let caps = regions::secrecy_capacity(&ch, encoder, &opt, budget.seed)?;
                let config = json!({
                    "channel": path,
                    "encoder": encoder,
                    "seed": budget.seed,
                    "budget": to_value(&opt)?,
                });
                ("capacity", config, out, Output::Json(to_value(&caps)?))
            }
            (None, true) => {
                let p = gauss.load()?;
                let (lower, upper) = gaussian::secrecy_capacity_gauss(&p);
                let config = json!({"params": to_value(&p)?});
                ("capacity", config, out, Output::Json(json!({"lower": lower, "upper": upper})))
            }
            _ => return Err(Error::InvalidConfig("give either a channel file or Gaussian parameters".into()).into()),
        },
        Command::Simulate {
            config: path,
            trials,
            mode,
            seed,
            out,
        } => {
            let mut cfg: SimConfig = read_json(&path)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(m) = mode {
                cfg.mode = m.into();
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = sim::simulate(&cfg)?;
            ("simulate", to_value(&cfg)?, out, Output::Sim(Box::new(report)))
        }
        Command::ParamMap {
            theta,
            eta,
            alpha,
            beta,
            out,
        } => {
            let input = match (theta, eta, alpha, beta) {
                (Some(theta), Some(eta), None, None) => GaussParamInput::ThetaEta { theta, eta },
                (None, None, Some(alpha), Some(beta)) => GaussParamInput::AlphaBeta { alpha, beta },
                _ => return Err(Error::InvalidConfig("give --theta/--eta or --alpha/--beta".into()).into()),
            };
            let point = gaussian::param_map(input)?;
            ("param-map", to_value(&input)?, out, Output::Json(to_value(&point)?))
        }
    };
    let header = Header::new(name, config);
    let text = render(&header, output, out.format)?;
    match &out.output {
        Some(path) => fs::write(path, text).map_err(Error::from)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, rows);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn render(header: &Header, output: Output, format: Format) -> Result<String, Error> {
    match (output, format) {
        (Output::Json(v), Format::Json) => io::to_json(header, &v),
        (Output::Regions(r), Format::Json) => match r.as_slice() {
            [single] => io::to_json(header, single),
            many => io::to_json(header, &json!({"regions": many})),
        },
        (Output::Sim(r), Format::Json) => io::to_json(header, r.as_ref()),
        (Output::Regions(r), Format::Csv) => io::regions_to_csv(header, &r.iter().collect::<Vec<_>>()),
        (Output::Sim(r), Format::Csv) => Ok(format!("{}\n{}\n{}\n", header.csv_comment(), SimReport::CSV_HEADER, r.csv_row())),
        (Output::Json(v), Format::Csv) => {
            let mut rows = Vec::new();
            flatten("", &v, &mut rows);
            let mut s = format!("{}\nkey,value\n", header.csv_comment());
            for (k, v) in rows {
                s.push_str(&format!("{k},{v}\n"));
            }
            Ok(s)
        }
    }
}

fn fail(name: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({"error": name, "message": message}));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail("UsageError", e.to_string().trim());
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f.name, &f.message),
    }
}
