//! Flat key = value sweep configuration files: one key per line, lists
//! comma-separated, `#` starts a comment. Unknown keys are rejected by name,
//! and the parsed config is validated against the target operation's
//! preconditions before anything runs.

use crate::errors::{CliError, CliResult};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Triangles,
    Tetrahedra,
}

impl SweepKind {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "triangles" => Ok(SweepKind::Triangles),
            "tetrahedra" => Ok(SweepKind::Tetrahedra),
            other => Err(CliError::usage(format!(
                "kind must be triangles or tetrahedra, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    Brute,
    Fast,
    Constructive,
}

impl MethodChoice {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "brute" => Ok(MethodChoice::Brute),
            "fast" => Ok(MethodChoice::Fast),
            "constructive" => Ok(MethodChoice::Constructive),
            other => Err(CliError::usage(format!(
                "method must be brute, fast or constructive, got {other:?}"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MethodChoice::Brute => "brute",
            MethodChoice::Fast => "fast",
            MethodChoice::Constructive => "constructive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub d: usize,
    pub n_list: Vec<u32>,
    pub method: MethodChoice,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub fn load_config(path: &Path) -> CliResult<SweepConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut kind = None;
    let mut d = None;
    let mut n_list: Option<Vec<u32>> = None;
    let mut method = MethodChoice::Fast;
    let mut output = None;
    let mut workers = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!(
                "config parse error at line {}: expected key = value, got {raw:?}",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_err = |what: &str| {
            CliError::usage(format!(
                "config parse error at line {}: bad {what} value {value:?}",
                lineno + 1
            ))
        };
        match key {
            "kind" => kind = Some(SweepKind::parse(value)?),
            "d" => d = Some(value.parse::<usize>().map_err(|_| parse_err("d"))?),
            "n-list" => {
                let list = value
                    .split(',')
                    .map(|t| t.trim().parse::<u32>().map_err(|_| parse_err("n-list")))
                    .collect::<CliResult<Vec<u32>>>()?;
                n_list = Some(list);
            }
            "method" => method = MethodChoice::parse(value)?,
            "output" => output = Some(PathBuf::from(value)),
            "workers" => workers = Some(value.parse::<usize>().map_err(|_| parse_err("workers"))?),
            other => {
                return Err(CliError::usage(format!(
                    "unknown key `{other}` at line {}",
                    lineno + 1
                )))
            }
        }
    }

    let kind = kind.ok_or_else(|| CliError::usage("config is missing required key `kind`"))?;
    let d = d.ok_or_else(|| CliError::usage("config is missing required key `d`"))?;
    let n_list = n_list.ok_or_else(|| CliError::usage("config is missing required key `n-list`"))?;
    let config = SweepConfig {
        kind,
        d,
        n_list,
        method,
        output,
        workers,
    };
    validate(&config)?;
    Ok(config)
}

pub fn validate(config: &SweepConfig) -> CliResult<()> {
    if config.d < 2 {
        return Err(CliError::precondition(format!(
            "key `d`: dimension must be ≥ 2, got {}",
            config.d
        )));
    }
    if config.n_list.is_empty() {
        return Err(CliError::precondition("key `n-list`: list must be nonempty"));
    }
    if config.n_list.contains(&0) {
        return Err(CliError::precondition("key `n-list`: all entries must be ≥ 1"));
    }
    if config.method == MethodChoice::Constructive {
        if config.kind != SweepKind::Triangles {
            return Err(CliError::precondition(
                "key `method`: constructive counting exists only for triangles",
            ));
        }
        if config.d <= 3 {
            return Err(CliError::precondition(format!(
                "key `method`: the constructive recipe needs d > 3, got d = {}",
                config.d
            )));
        }
    }
    if let Some(w) = config.workers {
        if w == 0 {
            return Err(CliError::precondition("key `workers`: must be ≥ 1"));
        }
    }
    Ok(())
}
