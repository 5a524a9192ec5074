//! Method selection by name, shared by the CLI and the benches.

use std::fmt;
use std::str::FromStr;

use crate::cg::{cg_solve, cg_with_refresh};
use crate::engine::{irm_solve, GeneratorSpec, SolveConfig, SolveOutcome};
use crate::error::Result;
use crate::irm_cg::{irm_cg_solve, IrmCgVariant};
use crate::linalg::SparseSpdMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Cg { restart: Option<usize> },
    CgRefresh { every: usize },
    IrmCg(IrmCgVariant),
    Irm(Vec<GeneratorSpec>),
}

impl Method {
    pub fn run(&self, a: &SparseSpdMatrix, b: &[f64], x0: &[f64], config: &SolveConfig) -> Result<SolveOutcome> {
        match self {
            Method::Cg { restart } => cg_solve(a, b, x0, config, *restart),
            Method::CgRefresh { every } => cg_with_refresh(a, b, x0, config, *every),
            Method::IrmCg(v) => irm_cg_solve(a, b, x0, config, *v),
            Method::Irm(specs) => irm_solve(a, b, x0, specs, config),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Cg { restart: None } => write!(f, "cg"),
            Method::Cg { restart: Some(k) } => write!(f, "cg-restart:{k}"),
            Method::CgRefresh { every } => write!(f, "cg-refresh:{every}"),
            Method::IrmCg(v) => write!(f, "{}", v.label()),
            Method::Irm(specs) => {
                let names: Vec<String> = specs.iter().map(ToString::to_string).collect();
                write!(f, "irm:{}", names.join(","))
            }
        }
    }
}

impl FromStr for Method {
    type Err = String;

    /// `cg`, `cg-restart:K`, `cg-refresh:K`, `irm-cg-basic`, `irm-cg-fast`
    /// or `irm:GEN,GEN,...`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let period = |v: &str| -> std::result::Result<usize, String> {
            match v.parse::<usize>() {
                Ok(k) if k > 0 => Ok(k),
                _ => Err(format!("bad period '{v}' in method '{s}'")),
            }
        };
        match s {
            "cg" => return Ok(Method::Cg { restart: None }),
            "irm-cg-basic" => return Ok(Method::IrmCg(IrmCgVariant::Basic)),
            "irm-cg-fast" | "irm-cg" => return Ok(Method::IrmCg(IrmCgVariant::Fast)),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("cg-restart:") {
            return Ok(Method::Cg { restart: Some(period(k)?) });
        }
        if let Some(k) = s.strip_prefix("cg-refresh:") {
            return Ok(Method::CgRefresh { every: period(k)? });
        }
        if let Some(list) = s.strip_prefix("irm:") {
            let specs = list
                .split(',')
                .map(str::parse)
                .collect::<std::result::Result<Vec<GeneratorSpec>, _>>()?;
            if specs.is_empty() {
                return Err("irm needs at least one generator".into());
            }
            return Ok(Method::Irm(specs));
        }
        Err(format!("unknown method '{s}'"))
    }
}
