//! Parameter sweeps across the engines.
//!
//! A sweep evaluates one engine on every point of a θ_h grid and records every
//! step `0..=t`, so the same result serves fixed-time (vs θ_h) and fixed-field
//! (vs step) plots. Grid points run in parallel; rows are assembled in grid
//! order and then sorted, so output never depends on the worker count.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::angle::parse_angle;
use crate::error::{Error, Result};
use crate::exact::{self, EvolveOptions, DEFAULT_QUBIT_CAP};
use crate::inhomogeneous;
use crate::meanfield::{self, fluctuation_variance, Mode};
use crate::par;
use crate::qubit_state::{dephasing_probability, DriveParams};
use crate::stabilizer::{self, StabilizerParams};
use crate::stochastic::{self, SamplerConfig};
use crate::topology::{self, ConnectivityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SweepMode {
    MfUnitary,
    MfDissipative,
    MfLattice,
    Exact,
    Stabilizer,
    ValidateChannel,
}

impl SweepMode {
    pub const ALL: [SweepMode; 6] = [
        SweepMode::MfUnitary,
        SweepMode::MfDissipative,
        SweepMode::MfLattice,
        SweepMode::Exact,
        SweepMode::Stabilizer,
        SweepMode::ValidateChannel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepMode::MfUnitary => "mf-unitary",
            SweepMode::MfDissipative => "mf-dissipative",
            SweepMode::MfLattice => "mf-lattice",
            SweepMode::Exact => "exact",
            SweepMode::Stabilizer => "stabilizer",
            SweepMode::ValidateChannel => "validate-channel",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    MeanZ,
    SiteZ(usize),
    /// `√(x² + y²)`, averaged over sites where sites differ.
    Coherence,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::MeanZ => f.write_str("mean-z"),
            Observable::SiteZ(j) => write!(f, "site-z:{j}"),
            Observable::Coherence => f.write_str("coherence"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-z" => Ok(Observable::MeanZ),
            "coherence" => Ok(Observable::Coherence),
            _ => s
                .strip_prefix("site-z:")
                .and_then(|j| j.parse().ok())
                .map(Observable::SiteZ)
                .ok_or_else(|| Error::Usage(format!("unknown observable `{s}`"))),
        }
    }
}

/// Where the coupling graph comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologySource {
    Builtin(String),
    File(PathBuf),
}

impl TopologySource {
    /// An existing file path wins; anything else is treated as a built-in descriptor.
    pub fn parse(descriptor: &str) -> Self {
        let path = PathBuf::from(descriptor);
        if path.is_file() {
            TopologySource::File(path)
        } else {
            TopologySource::Builtin(descriptor.to_string())
        }
    }

    pub fn load(&self) -> Result<ConnectivityGraph> {
        match self {
            TopologySource::Builtin(name) => topology::builtin(name),
            TopologySource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                ConnectivityGraph::from_edge_list(&text)
            }
        }
    }
}

impl Default for TopologySource {
    fn default() -> Self {
        TopologySource::Builtin("heavy-hex".into())
    }
}

/// Evenly spaced θ_h values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ThetaGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Usage("grid count must be >= 1".into()));
        }
        if !(start.is_finite() && stop.is_finite()) || start > stop {
            return Err(Error::Usage(format!("invalid grid [{start}, {stop}]")));
        }
        Ok(ThetaGrid { start, stop, count })
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1)
    }

    /// `start:stop:count` or a single angle; angles may use `pi`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [v] => Self::single(parse_angle(v)?),
            [a, b, n] => {
                let count = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Usage(format!("bad grid count `{n}`")))?;
                Self::new(parse_angle(a)?, parse_angle(b)?, count)
            }
            _ => Err(Error::Usage(format!(
                "expected `start:stop:count` or a single angle, got `{text}`"
            ))),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / last as f64)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub theta_h: ThetaGrid,
    pub theta_j: f64,
    pub steps: usize,
    pub topology: TopologySource,
    pub seed: Option<u64>,
    /// Monte Carlo sample count (stabilizer and validate-channel modes).
    pub samples: usize,
    pub observable: Observable,
    pub qubit_cap: usize,
}

impl SweepSpec {
    pub fn new(mode: SweepMode, theta_h: ThetaGrid, steps: usize) -> Self {
        SweepSpec {
            mode,
            theta_h,
            theta_j: FRAC_PI_2,
            steps,
            topology: TopologySource::default(),
            seed: None,
            samples: 100_000,
            observable: Observable::MeanZ,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mode: SweepMode,
    pub theta_h: f64,
    pub step: usize,
    pub observable: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Groups by mode, then orders by (θ_h, step); ties keep insertion order.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.mode
                .cmp(&b.mode)
                .then(a.theta_h.total_cmp(&b.theta_h))
                .then(a.step.cmp(&b.step))
        });
    }

    /// Concatenates several results into one sorted result.
    pub fn merge(parts: impl IntoIterator<Item = SweepResult>) -> SweepResult {
        let mut out = SweepResult {
            rows: parts.into_iter().flat_map(|r| r.rows).collect(),
        };
        out.sort();
        out
    }

    /// Values of one observable at a fixed step, in θ_h order.
    pub fn curve_at_step(&self, observable: &str, step: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.observable == observable && r.step == step)
            .map(|r| (r.theta_h, r.value))
            .collect()
    }
}

/// SplitMix64 finaliser, used to derive per-point seeds.
fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if !spec.theta_j.is_finite() {
        return Err(Error::Usage("theta_j must be finite".into()));
    }
    let graph = match spec.mode {
        SweepMode::Stabilizer => None,
        _ => Some(spec.topology.load()?),
    };
    if let (Some(g), Observable::SiteZ(j)) = (&graph, spec.observable) {
        if j >= g.n_qubits() {
            return Err(Error::Usage(format!(
                "site {j} out of range for {} qubits",
                g.n_qubits()
            )));
        }
    }
    if spec.mode == SweepMode::Exact {
        let n = graph.as_ref().map_or(0, ConnectivityGraph::n_qubits);
        if n > spec.qubit_cap {
            // Fail before spawning workers.
            exact::StateVector::zero(n, spec.qubit_cap)?;
        }
    }
    if matches!(
        spec.mode,
        SweepMode::Stabilizer | SweepMode::ValidateChannel
    ) && spec.samples == 0
    {
        return Err(Error::Usage("--samples must be >= 1".into()));
    }

    let thetas = spec.theta_h.points();
    let per_point = par::map_range(thetas.len(), |i| {
        point_rows(spec, graph.as_ref(), i, thetas[i])
    });
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    let mut result = SweepResult { rows };
    result.sort();
    Ok(result)
}

fn row(
    mode: SweepMode,
    theta_h: f64,
    step: usize,
    observable: impl Into<String>,
    value: f64,
) -> SweepRow {
    SweepRow {
        mode,
        theta_h,
        step,
        observable: observable.into(),
        value,
        stderr: None,
    }
}

fn point_rows(
    spec: &SweepSpec,
    graph: Option<&ConnectivityGraph>,
    index: usize,
    theta_h: f64,
) -> Result<Vec<SweepRow>> {
    let params = DriveParams::from_angles(spec.theta_j, theta_h, spec.steps)?;
    let obs = spec.observable.to_string();
    let mode = spec.mode;
    let mut rows = Vec::with_capacity(spec.steps + 1);
    match mode {
        SweepMode::MfUnitary | SweepMode::MfDissipative => {
            let xi = graph.expect("graph loaded").mean_degree();
            let mf_mode = if mode == SweepMode::MfUnitary {
                Mode::Unitary
            } else {
                Mode::Dissipative
            };
            let trace = meanfield::run(&params, xi, mf_mode);
            for (t, s) in trace.states.iter().enumerate() {
                let v = match spec.observable {
                    Observable::MeanZ | Observable::SiteZ(_) => s.z,
                    Observable::Coherence => s.coherence(),
                };
                rows.push(row(mode, theta_h, t, obs.as_str(), v));
            }
        }
        SweepMode::MfLattice => {
            let trace = inhomogeneous::run(graph.expect("graph loaded"), &params);
            for t in 0..=spec.steps {
                let v = match spec.observable {
                    Observable::MeanZ => trace.mean_magnetization(t),
                    Observable::SiteZ(j) => trace.sites[t][j].z,
                    Observable::Coherence => trace.mean_coherence(t),
                };
                rows.push(row(mode, theta_h, t, obs.as_str(), v));
            }
        }
        SweepMode::Exact => {
            let opts = EvolveOptions {
                qubit_cap: spec.qubit_cap,
                transverse: spec.observable == Observable::Coherence,
            };
            for rec in exact::evolve(graph.expect("graph loaded"), &params, opts)? {
                let v = match spec.observable {
                    Observable::MeanZ => rec.mean_z,
                    Observable::SiteZ(j) => rec.site_z[j],
                    Observable::Coherence => {
                        let (x, y) = (rec.site_x.as_ref().unwrap(), rec.site_y.as_ref().unwrap());
                        x.iter().zip(y).map(|(a, b)| a.hypot(*b)).sum::<f64>() / x.len() as f64
                    }
                };
                rows.push(row(mode, theta_h, rec.step, obs.as_str(), v));
            }
        }
        SweepMode::Stabilizer => {
            for t in 0..=spec.steps {
                let p = StabilizerParams::new(theta_h, t)?;
                rows.push(row(
                    mode,
                    theta_h,
                    t,
                    "stabilizer",
                    stabilizer::stabilizer_expectation(&p),
                ));
                if let Some(seed) = spec.seed {
                    let est = stabilizer::flip_process_simulate(
                        &p,
                        spec.samples,
                        mix(seed, index as u64, t as u64),
                    )?;
                    let mut r = row(mode, theta_h, t, "stabilizer-mc", est.mean);
                    r.stderr = Some(est.stderr);
                    rows.push(r);
                }
            }
        }
        SweepMode::ValidateChannel => {
            let xi = graph.expect("graph loaded").mean_degree();
            let trace = meanfield::run(&params, xi, Mode::Dissipative);
            let seed = spec.seed.unwrap_or(0);
            for t in 1..=spec.steps {
                let variance = fluctuation_variance(xi, trace.states[t - 1].z);
                let p = dephasing_probability(variance, params.j)?;
                rows.push(row(mode, theta_h, t, "shrink-analytic", 1.0 - 2.0 * p));
                let cfg = SamplerConfig::gaussian(
                    spec.samples,
                    mix(seed, index as u64, t as u64),
                    params.j,
                    variance,
                )?;
                let est = stochastic::empirical_shrink(&cfg);
                let mut r = row(mode, theta_h, t, "shrink-mc", est.shrink.mean);
                r.stderr = Some(est.shrink.stderr);
                rows.push(r);
                let mut r = row(mode, theta_h, t, "sine-mc", est.sine.mean);
                r.stderr = Some(est.sine.stderr);
                rows.push(r);
            }
        }
    }
    Ok(rows)
}
