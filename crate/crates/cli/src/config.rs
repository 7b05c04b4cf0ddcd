use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use bethe_tj::graded::{c, Complex};
use bethe_tj::kernels::ModelParams;
use bethe_tj::roots::{SolveConfig, DEFAULT_SEED};
use bethe_tj::transfer::MAX_DENSE_SITES;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Parameter file. Keys follow the model's symbols; `theta` defaults to the
/// homogeneous chain and `M_list` to every `M` in `0..=L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub eta: f64,
    pub zeta: f64,
    pub c: f64,
    pub c1: f64,
    pub zetap: f64,
    pub cp: f64,
    pub c1p: f64,
    pub mu: f64,
    #[serde(rename = "L")]
    pub len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(rename = "M_list", default, skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<usize>>,
    /// Optional overrides of the random search budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

impl ParamFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn model(&self) -> anyhow::Result<ModelParams> {
        if self.len == 0 {
            bail!("L must be positive");
        }
        let p = ModelParams::from_real(
            self.eta, self.zeta, self.c, self.c1, self.zetap, self.cp, self.c1p, self.mu, self.len,
        )?;
        match &self.theta {
            None => Ok(p),
            Some(t) if t.len() == self.len => Ok(p.with_theta(t.iter().map(|&x| c(x)).collect::<Vec<Complex>>())),
            Some(t) => bail!("theta has {} entries for L = {}", t.len(), self.len),
        }
    }

    pub fn m_values(&self) -> anyhow::Result<Vec<usize>> {
        let ms = self.m_list.clone().unwrap_or_else(|| (0..=self.len).collect());
        if let Some(&m) = ms.iter().find(|&&m| m > self.len) {
            bail!("M = {m} exceeds L = {}", self.len);
        }
        let mut ms = ms;
        ms.sort_unstable();
        ms.dedup();
        Ok(ms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Verify,
    Ed,
    Roots,
    States,
    Full,
}

impl Mode {
    pub fn needs_dense(self) -> bool {
        !matches!(self, Mode::Roots)
    }
}

/// Decimal places in printed reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub energy: usize,
    pub roots: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Self { energy: 6, roots: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub file: ParamFile,
    pub params: ModelParams,
    pub mode: Mode,
    pub solver: SolveConfig,
    pub m_list: Vec<usize>,
    pub out: PathBuf,
    pub precision: Precision,
}

impl RunConfig {
    /// Builds and validates a run from a parameter file. `seed` and `tol`
    /// override the solver defaults; `table_seeds = false` forces a blind
    /// search.
    pub fn new(
        file: ParamFile,
        mode: Mode,
        out: PathBuf,
        seed: Option<u64>,
        tol: Option<f64>,
        table_seeds: bool,
    ) -> anyhow::Result<Self> {
        let params = file.model()?;
        let m_list = file.m_values()?;
        if mode.needs_dense() && file.len > MAX_DENSE_SITES {
            bail!("mode {mode:?} needs exact diagonalization; L = {} exceeds {MAX_DENSE_SITES}", file.len);
        }
        let mut solver = SolveConfig { rng_seed: seed.unwrap_or(DEFAULT_SEED), ..SolveConfig::default() };
        if let Some(t) = tol {
            solver.tol = t;
        }
        solver.seeds.table = table_seeds;
        if let Some(s) = &file.search {
            if let Some(r) = s.random {
                solver.seeds.random = r;
            }
            if let Some(b) = s.box_re {
                solver.seeds.box_re = b;
            }
            if let Some(b) = s.box_im {
                solver.seeds.box_im = b;
            }
            if let Some(n) = s.max_iter {
                solver.max_iter = n;
            }
        }
        solver.validate()?;
        Ok(Self { file, params, mode, solver, m_list, out, precision: Precision::default() })
    }

    pub fn seed(&self) -> u64 {
        self.solver.rng_seed
    }
}
