use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use ztwist::code::{build_z2_toric, build_z4_toric, insert_finite_twist, insert_noncontractible_twist, StabilizerCode};
use ztwist::lattice::{Orientation, RegionMask, RegionRole, TorusLattice};
use ztwist::logical::AnyonLabel;
use ztwist::scattering::{build_hybrid, build_island};

/// Rejected input; maps to exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Settings shared by every subcommand. Flags override the config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// TOML file with any of the fields below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// z2, z4, ds, hybrid or island.
    #[arg(long)]
    pub model: Option<String>,
    /// Lattice size as ROWSxCOLS.
    #[arg(long)]
    pub size: Option<String>,
    /// vertical:K, horizontal:K or strip:R0,C0,H,W (z2 only).
    #[arg(long)]
    pub twist: Option<String>,
    /// Rectangle R0,C0,H,W: the condensed block (hybrid) or the toric island (island).
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Anyon label such as e, m3, e2m or 1,2.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub zone_width: Option<usize>,
    /// Node budget for the weight-ordered distance search.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Square sizes for a decoder sweep, e.g. 2,3,4.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in outputs (breaks byte-identical reruns).
    #[arg(long)]
    pub timed: Option<bool>,
}

impl ConfigArgs {
    fn merged_over(self, base: ConfigArgs) -> ConfigArgs {
        ConfigArgs {
            config: None,
            model: self.model.or(base.model),
            size: self.size.or(base.size),
            twist: self.twist.or(base.twist),
            region: self.region.or(base.region),
            p: self.p.or(base.p),
            trials: self.trials.or(base.trials),
            rounds: self.rounds.or(base.rounds),
            seed: self.seed.or(base.seed),
            label: self.label.or(base.label),
            zone_width: self.zone_width.or(base.zone_width),
            budget: self.budget.or(base.budget),
            sweep: self.sweep.or(base.sweep),
            out: self.out.or(base.out),
            timed: self.timed.or(base.timed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Info,
    Distance,
    DecodeBench,
    Scatter,
    Selftest,
}

/// Fully resolved experiment; echoed into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: String,
    pub rows: usize,
    pub cols: usize,
    pub twist: Option<String>,
    pub region: Option<[usize; 4]>,
    pub p: f64,
    pub trials: u64,
    pub rounds: u64,
    pub seed: u64,
    pub label: String,
    pub zone_width: usize,
    pub budget: u64,
    pub sweep: Vec<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub timed: bool,
}

fn parse_size(s: &str) -> anyhow::Result<(usize, usize)> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| invalid(format!("size `{s}` is not ROWSxCOLS")))?;
    let r = r.trim().parse().map_err(|_| invalid(format!("bad row count in `{s}`")))?;
    let c = c.trim().parse().map_err(|_| invalid(format!("bad column count in `{s}`")))?;
    Ok((r, c))
}

fn parse_rect(s: &str) -> anyhow::Result<[usize; 4]> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("rectangle `{s}` is not R0,C0,H,W")))?;
    <[usize; 4]>::try_from(v).map_err(|_| invalid(format!("rectangle `{s}` needs four numbers")))
}

fn load_file(path: &Path) -> anyhow::Result<ConfigArgs> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn resolve(command: Command, args: ConfigArgs) -> anyhow::Result<Self> {
        let base = match &args.config {
            Some(path) => load_file(path)?,
            None => ConfigArgs::default(),
        };
        let a = args.merged_over(base);
        let default_model = match command {
            Command::Scatter => "hybrid",
            Command::DecodeBench => "ds",
            Command::Distance => "z2",
            Command::Info | Command::Selftest => "z4",
        };
        let model = a.model.unwrap_or_else(|| default_model.into());
        if !["z2", "z4", "ds", "hybrid", "island"].contains(&model.as_str()) {
            return Err(invalid(format!("unknown model `{model}`")));
        }
        let default_size = if matches!(model.as_str(), "hybrid" | "island") { "8x8" } else { "3x3" };
        let (rows, cols) = parse_size(a.size.as_deref().unwrap_or(default_size))?;
        if rows < 2 || cols < 2 {
            return Err(invalid(format!("lattice {rows}x{cols} is smaller than 2x2")));
        }
        let region = match (&a.region, model.as_str()) {
            (Some(r), "hybrid" | "island") => Some(parse_rect(r)?),
            (Some(_), _) => return Err(invalid(format!("model `{model}` takes no region"))),
            (None, "hybrid" | "island") => Some([rows / 4, cols / 4, rows.div_ceil(2), cols.div_ceil(2)]),
            (None, _) => None,
        };
        if a.twist.is_some() && model != "z2" {
            return Err(invalid("twists are defined on the z2 model only"));
        }
        let p = a.p.unwrap_or(0.01);
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("p = {p} is outside [0, 1]")));
        }
        let label = a.label.unwrap_or_else(|| "e".into());
        if AnyonLabel::parse(&label).is_none() {
            return Err(invalid(format!("unknown anyon label `{label}`")));
        }
        let cfg = ExperimentConfig {
            command,
            model,
            rows,
            cols,
            twist: a.twist,
            region,
            p,
            trials: a.trials.unwrap_or(1000),
            rounds: a.rounds.unwrap_or(1_000_000),
            seed: a.seed.unwrap_or(0),
            label,
            zone_width: a.zone_width.unwrap_or(1),
            budget: a.budget.unwrap_or(2_000_000_000),
            sweep: a.sweep.unwrap_or_default(),
            out: a.out,
            timed: a.timed.unwrap_or(false),
        };
        if cfg.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if cfg.sweep.iter().any(|&n| n < 2) {
            return Err(invalid("sweep sizes must be at least 2"));
        }
        Ok(cfg)
    }

    pub fn label(&self) -> AnyonLabel {
        AnyonLabel::parse(&self.label).expect("validated on resolve")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }

    pub fn build(&self) -> anyhow::Result<StabilizerCode> {
        self.build_at(self.rows, self.cols)
    }

    pub fn build_at(&self, rows: usize, cols: usize) -> anyhow::Result<StabilizerCode> {
        let l = TorusLattice::new(rows, cols).map_err(|e| invalid(e.to_string()))?;
        let rect = |role| {
            self.region.map(|[r0, c0, h, w]| {
                if r0 >= rows || c0 >= cols || h == 0 || w == 0 || h > rows || w > cols {
                    Err(invalid(format!("region {r0},{c0},{h},{w} does not fit {rows}x{cols}")))
                } else {
                    Ok(RegionMask::rect(&l, role, r0, c0, h, w))
                }
            })
        };
        let code = match self.model.as_str() {
            "z2" => build_z2_toric(&l),
            "z4" => build_z4_toric(&l),
            "ds" => build_hybrid(&l, &RegionMask::full(&l, RegionRole::CondensedDs)).map_err(cfg_err)?,
            "hybrid" => build_hybrid(&l, &rect(RegionRole::CondensedDs).expect("resolved")?).map_err(cfg_err)?,
            "island" => build_island(&l, &rect(RegionRole::BulkTc).expect("resolved")?).map_err(cfg_err)?,
            _ => unreachable!("validated on resolve"),
        };
        match &self.twist {
            None => Ok(code),
            Some(spec) => apply_twist(&l, &code, spec),
        }
    }
}

fn cfg_err(e: impl std::fmt::Display) -> anyhow::Error {
    invalid(e.to_string())
}

fn apply_twist(l: &TorusLattice, code: &StabilizerCode, spec: &str) -> anyhow::Result<StabilizerCode> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| invalid(format!("twist `{spec}` is not KIND:ARG")))?;
    let offset = || arg.trim().parse::<usize>().map_err(|_| invalid(format!("bad twist offset `{arg}`")));
    let twisted = match kind {
        "vertical" => insert_noncontractible_twist(code, Orientation::Vertical, offset()?),
        "horizontal" => insert_noncontractible_twist(code, Orientation::Horizontal, offset()?),
        "strip" => {
            let [r0, c0, h, w] = parse_rect(arg)?;
            insert_finite_twist(code, &RegionMask::rect(l, RegionRole::TwistStrip, r0, c0, h, w))
        }
        _ => return Err(invalid(format!("unknown twist kind `{kind}`"))),
    };
    twisted.map_err(cfg_err)
}
