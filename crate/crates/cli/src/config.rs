//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;

use locol::engine::Schedule;

#[derive(Debug, PartialEq, Eq)]
pub enum ConfigError {
    Parse { line: usize, msg: String },
    Flag { key: String, msg: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, msg } => write!(f, "config line {line}: {msg}"),
            ConfigError::Flag { key, msg } => write!(f, "--{key}: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    RotationCycle,
    RandomRegular,
    /// Random `d`-regular graph with pendant vertices on an `r`-sparse set.
    Planted,
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSpec {
    Auto,
    Bipartite,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    Practical,
    Theory,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub n: usize,
    pub d: usize,
    pub bipartite_graph: bool,
    pub mode: ModeSpec,
    pub schedule: ScheduleKind,
    pub r: usize,
    pub r_prime: usize,
    pub r1: usize,
    pub n0: usize,
    pub finite_threshold: usize,
    pub s_max: usize,
    pub c_tilde: usize,
    pub samples: usize,
    pub planted_r: usize,
    pub planted_fraction: f64,
    pub seeds: Vec<u64>,
    pub n0_sweep: Vec<usize>,
    pub relaxed: bool,
    pub oracle_task: String,
    pub n_max: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = Schedule::practical();
        ExperimentConfig {
            generator: GeneratorSpec::RandomRegular,
            n: 200,
            d: 3,
            bipartite_graph: false,
            mode: ModeSpec::Auto,
            schedule: ScheduleKind::Practical,
            r: p.r,
            r_prime: p.r_prime,
            r1: p.r1,
            n0: p.n0,
            finite_threshold: 100,
            s_max: 10,
            c_tilde: p.c_tilde as usize,
            samples: 64,
            planted_r: 3,
            planted_fraction: 0.05,
            seeds: vec![0],
            n0_sweep: vec![3, 5, 7, 9],
            relaxed: false,
            oracle_task: "chromatic".into(),
            n_max: 6,
            out: PathBuf::from("out"),
        }
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("cannot parse {v:?}"))
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',').map(|x| parse_num(x.trim())).collect()
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

impl ExperimentConfig {
    /// Sets one key. Keys use underscores; dashes are accepted too.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "generator" => {
                self.generator = match v {
                    "rotation_cycle" => GeneratorSpec::RotationCycle,
                    "random_regular" => GeneratorSpec::RandomRegular,
                    "planted" => GeneratorSpec::Planted,
                    _ => match v.strip_prefix("file:") {
                        Some(p) => GeneratorSpec::File(PathBuf::from(p)),
                        None => return Err(format!("unknown generator {v:?}")),
                    },
                }
            }
            "n" => self.n = parse_num(v)?,
            "d" => self.d = parse_num(v)?,
            "bipartite_graph" => self.bipartite_graph = parse_bool(v)?,
            "mode" => {
                self.mode = match v {
                    "auto" => ModeSpec::Auto,
                    "bipartite" => ModeSpec::Bipartite,
                    "general" => ModeSpec::General,
                    _ => return Err(format!("unknown mode {v:?}")),
                }
            }
            "schedule" => {
                self.schedule = match v {
                    "practical" => ScheduleKind::Practical,
                    "theory" => ScheduleKind::Theory,
                    _ => return Err(format!("unknown schedule {v:?}")),
                }
            }
            "r" => self.r = parse_num(v)?,
            "r_prime" => self.r_prime = parse_num(v)?,
            "r1" => self.r1 = parse_num(v)?,
            "n0" => self.n0 = parse_num(v)?,
            "l" | "finite_threshold" => self.finite_threshold = parse_num(v)?,
            "s_max" => self.s_max = parse_num(v)?,
            "c_tilde" => self.c_tilde = parse_num(v)?,
            "samples" => self.samples = parse_num(v)?,
            "planted_r" => self.planted_r = parse_num(v)?,
            "planted_fraction" => self.planted_fraction = parse_num(v)?,
            "seed" | "seeds" => self.seeds = parse_list(v)?,
            "n0_sweep" => self.n0_sweep = parse_list(v)?,
            "relaxed" => self.relaxed = parse_bool(v)?,
            "oracle_task" => self.oracle_task = v.to_string(),
            "n_max" => self.n_max = parse_num(v)?,
            "out" => self.out = PathBuf::from(v),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Parses a config file body; `#` starts a comment.
    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Parse { line: i + 1, msg: format!("expected key = value, got {line:?}") })?;
            cfg.set(k, v).map_err(|msg| ConfigError::Parse { line: i + 1, msg })?;
        }
        Ok(cfg)
    }

    /// Applies `--key value` pairs.
    pub fn apply_overrides(&mut self, args: &[String]) -> Result<(), ConfigError> {
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            let key = flag
                .strip_prefix("--")
                .ok_or_else(|| ConfigError::Flag { key: flag.clone(), msg: "expected --key value".into() })?;
            let value = it.next().ok_or_else(|| ConfigError::Flag { key: key.into(), msg: "missing value".into() })?;
            self.set(key, value).map_err(|msg| ConfigError::Flag { key: key.into(), msg })?;
        }
        Ok(())
    }

    /// The engine schedule, after checking the configured values.
    pub fn engine_schedule(&self) -> Result<Schedule, ConfigError> {
        for (name, v) in [("r", self.r), ("r_prime", self.r_prime), ("r1", self.r1), ("n0", self.n0), ("c_tilde", self.c_tilde), ("d", self.d)] {
            if v == 0 {
                return Err(ConfigError::Invalid(format!("{name} must be positive")));
            }
        }
        match self.schedule {
            ScheduleKind::Practical => Ok(Schedule {
                r: self.r,
                r_prime: self.r_prime,
                r1: self.r1,
                n0: self.n0,
                c_tilde: self.c_tilde as u64,
            }),
            ScheduleKind::Theory => Schedule::theory(self.d, self.r, self.n0).map_err(|e| ConfigError::Invalid(e.to_string())),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.engine_schedule()?;
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("no seeds".into()));
        }
        if self.n0_sweep.iter().any(|&x| x == 0) {
            return Err(ConfigError::Invalid("n0_sweep values must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.planted_fraction) {
            return Err(ConfigError::Invalid("planted_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}
