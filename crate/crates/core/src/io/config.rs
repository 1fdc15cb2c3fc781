//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, dotted keys group related
//! settings (`initial.kind`, `output.csv`, ...). Unknown and repeated keys
//! are errors; every diagnostic carries the offending line number.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::classifier::ClassifyParams;
use crate::diagnostics::inequalities::InequalityCaps;
use crate::evolution::Controls;
use crate::grid::Geometry;
use crate::profiles::DecomposeParams;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("key `{key}` set twice (lines {first} and {second})")]
    DuplicateKey { key: String, first: usize, second: usize },
    #[error("missing parameter `{key}`{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    MissingParameter { key: String, context: Option<String> },
    #[error("line {line}: invalid value for `{key}`: {msg}")]
    Invalid { line: usize, key: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub dim: usize,
    pub geometry: Geometry,
    pub n: usize,
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Gaussian { amplitude: f64, width: f64, center: [f64; 3] },
    GroundState,
    ScaledGroundState { c: f64 },
    GaussianBoosted { amplitude: f64, width: f64, center: [f64; 3], xi: [f64; 3] },
    /// `Σ_j a_j λ_j^{-(d-2)/2} W((x - x_j)/λ_j)`
    SumOfBubbles { scales: Vec<f64>, amplitudes: Vec<f64>, centers: Vec<[f64; 3]> },
    Checkpoint { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialSpec {
    pub data: InitialData,
    /// smooth cutoff towards the outer radius (radial grids)
    pub edge_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Outputs {
    pub csv: Option<String>,
    pub json: Option<String>,
    pub checkpoint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub c_lo: f64,
    pub c_hi: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingShape {
    Impulse,
    Constant,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallSpec {
    pub gamma: f64,
    pub eta: f64,
    pub k: usize,
    pub shape: ForcingShape,
}

impl ForcingShape {
    pub fn sequence(self, k: usize) -> Vec<f64> {
        (0..k)
            .map(|i| match self {
                ForcingShape::Impulse => (i == 0) as u8 as f64,
                ForcingShape::Constant => 1.0,
                ForcingShape::Geometric => 0.9f64.powi(i as i32),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid: Option<GridSpec>,
    pub mu: f64,
    pub controls: Controls,
    pub initial: Option<InitialSpec>,
    pub outputs: Outputs,
    pub classify: ClassifyParams,
    pub sweep: Option<SweepSpec>,
    pub decompose: DecomposeParams,
    pub decompose_eps: f64,
    pub decompose_j_max: usize,
    pub gronwall: Option<GronwallSpec>,
    pub inequality_caps: InequalityCaps,
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| ConfigError::Invalid { line, key: key.into(), msg: e.to_string() }),
        }
    }

    fn positive(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        let line = self.map.get(key).map(|e| e.1).unwrap_or(0);
        match self.parse::<f64>(key)? {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                Err(ConfigError::Invalid { line, key: key.into(), msg: format!("{v} is not positive") })
            }
            other => Ok(other),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|e| ConfigError::Invalid { line, key: key.into(), msg: e.to_string() }),
        }
    }

    fn vector(&mut self, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        let line = self.map.get(key).map(|e| e.1).unwrap_or(0);
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() <= 3 => {
                let mut out = [0.0; 3];
                out[..v.len()].copy_from_slice(&v);
                Ok(Some(out))
            }
            Some(v) => Err(ConfigError::Invalid { line, key: key.into(), msg: format!("{} components", v.len()) }),
        }
    }

    fn require<T>(value: Option<T>, key: &str, context: &str) -> Result<T, ConfigError> {
        value.ok_or_else(|| ConfigError::MissingParameter { key: key.into(), context: Some(context.into()) })
    }
}

fn parse_lines(text: &str) -> Result<Entries, ConfigError> {
    let mut map: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected `key = value`, got `{content}`") })?;
        let key = k.trim();
        let valid = !key.is_empty()
            && key.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
        if !valid {
            return Err(ConfigError::Syntax { line, msg: format!("malformed key `{key}`") });
        }
        if let Some((_, first)) = map.get(key) {
            return Err(ConfigError::DuplicateKey { key: key.into(), first: *first, second: line });
        }
        map.insert(key.to_string(), (v.trim().to_string(), line));
    }
    Ok(Entries { map })
}

fn parse_geometry(v: &str, line: usize) -> Result<Geometry, ConfigError> {
    match v {
        "radial" => Ok(Geometry::Radial),
        "cartesian" => Ok(Geometry::Cartesian),
        other => Err(ConfigError::Invalid { line, key: "geometry".into(), msg: format!("`{other}` is not radial|cartesian") }),
    }
}

fn parse_initial(e: &mut Entries) -> Result<Option<InitialSpec>, ConfigError> {
    let Some((kind, line)) = e.take("initial.kind") else {
        return Ok(None);
    };
    let ctx = format!("initial.kind = {kind}");
    let data = match kind.as_str() {
        "gaussian" => InitialData::Gaussian {
            amplitude: e.parse("initial.amplitude")?.unwrap_or(1.0),
            width: Entries::require(e.positive("initial.width")?, "initial.width", &ctx)?,
            center: e.vector("initial.center")?.unwrap_or([0.0; 3]),
        },
        "ground_state" => InitialData::GroundState,
        "scaled_ground_state" => InitialData::ScaledGroundState { c: Entries::require(e.parse("initial.c")?, "initial.c", &ctx)? },
        "gaussian_boosted" => InitialData::GaussianBoosted {
            amplitude: e.parse("initial.amplitude")?.unwrap_or(1.0),
            width: Entries::require(e.positive("initial.width")?, "initial.width", &ctx)?,
            center: e.vector("initial.center")?.unwrap_or([0.0; 3]),
            xi: Entries::require(e.vector("initial.xi")?, "initial.xi", &ctx)?,
        },
        "sum_of_bubbles" => {
            let scales = Entries::require(e.list("initial.scales")?, "initial.scales", &ctx)?;
            let amplitudes = e.list("initial.amplitudes")?.unwrap_or_else(|| vec![1.0; scales.len()]);
            let centers = match e.take("initial.centers") {
                None => vec![[0.0; 3]; scales.len()],
                Some((v, l)) => v
                    .split(';')
                    .map(|tr| {
                        let comps: Vec<f64> = tr.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(
                            |err: std::num::ParseFloatError| ConfigError::Invalid {
                                line: l,
                                key: "initial.centers".into(),
                                msg: err.to_string(),
                            },
                        )?;
                        let mut c = [0.0; 3];
                        if comps.len() > 3 {
                            return Err(ConfigError::Invalid { line: l, key: "initial.centers".into(), msg: "too many components".into() });
                        }
                        c[..comps.len()].copy_from_slice(&comps);
                        Ok(c)
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            if amplitudes.len() != scales.len() || centers.len() != scales.len() || scales.iter().any(|&s| !(s > 0.0)) {
                return Err(ConfigError::Invalid {
                    line,
                    key: "initial.scales".into(),
                    msg: "scales must be positive and match amplitudes/centers in length".into(),
                });
            }
            InitialData::SumOfBubbles { scales, amplitudes, centers }
        }
        "checkpoint" => InitialData::Checkpoint { path: Entries::require(e.take("initial.path").map(|v| v.0), "initial.path", &ctx)? },
        other => {
            return Err(ConfigError::Invalid { line, key: "initial.kind".into(), msg: format!("unknown initial data `{other}`") })
        }
    };
    let edge_window = e.parse("initial.edge_window")?.unwrap_or(true);
    Ok(Some(InitialSpec { data, edge_window }))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut e = parse_lines(text)?;

    let grid_keys = ["dimension", "geometry", "n", "extent"];
    // checkpoints carry their own grid
    let needs_grid = e.map.get("initial.kind").is_some_and(|(k, _)| k != "checkpoint");
    let grid = if grid_keys.iter().any(|k| e.has(k)) || needs_grid {
        let ctx = "grid definition";
        let dim = Entries::require(e.parse::<usize>("dimension")?, "dimension", ctx)?;
        let (geo, gline) = Entries::require(e.take("geometry"), "geometry", ctx)?;
        let geometry = parse_geometry(&geo, gline)?;
        let n = Entries::require(e.parse::<usize>("n")?, "n", ctx)?;
        let extent = Entries::require(e.positive("extent")?, "extent", ctx)?;
        Some(GridSpec { dim, geometry, n, extent })
    } else {
        None
    };

    let mu_line = e.map.get("mu").map(|v| v.1).unwrap_or(0);
    let mu = e.parse::<f64>("mu")?.unwrap_or(-1.0);
    if mu != 1.0 && mu != -1.0 {
        return Err(ConfigError::Invalid { line: mu_line, key: "mu".into(), msg: "must be -1 (focusing) or 1".into() });
    }

    let d = Controls::default();
    let controls = Controls {
        t_max: e.positive("t_max")?.unwrap_or(d.t_max),
        dt0: e.positive("dt0")?.unwrap_or(d.dt0),
        c_adapt: e.positive("c_adapt")?.unwrap_or(d.c_adapt),
        g_max: e.positive("g_max")?,
        dt_min: e.positive("dt_min")?.unwrap_or(d.dt_min),
        stride: e.parse("stride")?.unwrap_or(d.stride),
        concentration_radii: e.list("concentration_radii")?.unwrap_or(d.concentration_radii),
        virial_radius: e.positive("virial_radius")?.unwrap_or(d.virial_radius),
        center_radius: e.positive("center_radius")?.unwrap_or(d.center_radius),
        frequency_eta: match e.take("frequency_eta") {
            None => d.frequency_eta,
            Some((v, _)) if v == "off" => None,
            Some((v, line)) => Some(v.parse().map_err(|err: std::num::ParseFloatError| ConfigError::Invalid {
                line,
                key: "frequency_eta".into(),
                msg: err.to_string(),
            })?),
        },
        snapshot_stride: e.parse("snapshot_stride")?,
    };

    let initial = parse_initial(&mut e)?;
    let outputs = Outputs { csv: e.take("output.csv").map(|v| v.0), json: e.take("output.json").map(|v| v.0), checkpoint: e.take("output.checkpoint").map(|v| v.0) };

    let cd = ClassifyParams::default();
    let classify = ClassifyParams {
        plateau_window: e.positive("classify.plateau_window")?.unwrap_or(cd.plateau_window),
        plateau_tol: e.positive("classify.plateau_tol")?.unwrap_or(cd.plateau_tol),
        decay_tol: e.positive("classify.decay_tol")?.unwrap_or(cd.decay_tol),
        dt_collapse: e.positive("classify.dt_collapse")?.unwrap_or(cd.dt_collapse),
        trap_tol: e.positive("classify.trap_tol")?.unwrap_or(cd.trap_tol),
    };

    let sweep = if e.has("sweep.c_lo") || e.has("sweep.c_hi") || e.has("sweep.width") {
        let ctx = "sweep";
        Some(SweepSpec {
            c_lo: Entries::require(e.positive("sweep.c_lo")?, "sweep.c_lo", ctx)?,
            c_hi: Entries::require(e.positive("sweep.c_hi")?, "sweep.c_hi", ctx)?,
            width: e.positive("sweep.width")?.unwrap_or(0.01),
        })
    } else {
        None
    };

    let dd = DecomposeParams::default();
    let interval = match (e.parse::<f64>("decompose.t_lo")?, e.parse::<f64>("decompose.t_hi")?) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        (a, _) => {
            let missing = if a.is_none() { "decompose.t_lo" } else { "decompose.t_hi" };
            return Err(ConfigError::MissingParameter { key: missing.into(), context: Some("decomposition interval".into()) });
        }
    };
    let decompose = DecomposeParams {
        interval,
        window: e.positive("decompose.window")?.unwrap_or(dd.window),
        highpass: e.positive("decompose.highpass")?.unwrap_or(dd.highpass),
        scan: dd.scan,
    };
    let decompose_eps = e.positive("decompose.eps_stop")?.unwrap_or(1e-2);
    let decompose_j_max = e.parse("decompose.j_max")?.unwrap_or(4);

    let gronwall = if e.has("gronwall.gamma") || e.has("gronwall.eta") {
        let ctx = "gronwall";
        let shape = match e.take("gronwall.shape") {
            None => ForcingShape::Impulse,
            Some((v, line)) => match v.as_str() {
                "impulse" => ForcingShape::Impulse,
                "constant" => ForcingShape::Constant,
                "geometric" => ForcingShape::Geometric,
                other => {
                    return Err(ConfigError::Invalid { line, key: "gronwall.shape".into(), msg: format!("unknown shape `{other}`") })
                }
            },
        };
        Some(GronwallSpec {
            gamma: Entries::require(e.positive("gronwall.gamma")?, "gronwall.gamma", ctx)?,
            eta: Entries::require(e.positive("gronwall.eta")?, "gronwall.eta", ctx)?,
            k: e.parse("gronwall.k")?.unwrap_or(64),
            shape,
        })
    } else {
        None
    };

    let caps = InequalityCaps::default();
    let inequality_caps = InequalityCaps {
        bernstein: e.positive("inequalities.bernstein")?.unwrap_or(caps.bernstein),
        dispersive: e.positive("inequalities.dispersive")?.unwrap_or(caps.dispersive),
        keraani: e.positive("inequalities.keraani")?.unwrap_or(caps.keraani),
        bilinear: e.positive("inequalities.bilinear")?.unwrap_or(caps.bilinear),
        weighted: e.positive("inequalities.weighted")?.unwrap_or(caps.weighted),
    };

    if let Some((key, (_, line))) = e.map.iter().min_by_key(|(_, v)| v.1) {
        return Err(ConfigError::UnknownKey { line: *line, key: key.clone() });
    }
    Ok(RunConfig {
        grid,
        mu,
        controls,
        initial,
        outputs,
        classify,
        sweep,
        decompose,
        decompose_eps,
        decompose_j_max,
        gronwall,
        inequality_caps,
    })
}
