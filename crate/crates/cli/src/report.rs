use std::path::Path;

use anyhow::Context;
use bethe_tj::graded::Complex;
use bethe_tj::kernels::RelationReport;
use bethe_tj::roots::SolutionRecord;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, ParamFile, Precision};

/// Fixed-point text without a negative zero, so equal values print equally.
pub fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|ch| ch == '0' || ch == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// `a+bi` / `a-bi` with `digits` decimals on both parts.
pub fn complex(z: Complex, digits: usize) -> String {
    let im = fixed(z.im, digits);
    match im.strip_prefix('-') {
        Some(abs) => format!("{}-{abs}i", fixed(z.re, digits)),
        None => format!("{}+{im}i", fixed(z.re, digits)),
    }
}

/// Energies are printed as real numbers unless they carry an imaginary part.
pub fn energy(e: Complex, digits: usize) -> String {
    if e.im.abs() <= 1e-9 {
        fixed(e.re, digits)
    } else {
        complex(e, digits)
    }
}

/// One root set as it appears in the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    /// One-based ED level, when matched.
    pub n: Option<usize>,
    #[serde(flatten)]
    pub record: SolutionRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_residual: Option<f64>,
}

impl RootRow {
    fn energy(&self) -> Complex {
        self.record.energy.map(|[a, b]| Complex::new(a, b)).unwrap_or(Complex::new(f64::NAN, 0.0))
    }
}

fn sci(x: Option<f64>) -> String {
    x.map(|r| format!("{r:.3e}")).unwrap_or_default()
}

/// Table-shaped CSV `n,u_1..,nu_1..,E_n,residual`, with
/// `t_residual,h_residual` appended when `states` is set. Root columns are
/// padded to the largest `M` present.
pub fn roots_csv(rows: &[RootRow], precision: Precision, states: bool) -> String {
    let width = rows.iter().map(|r| r.record.m).max().unwrap_or(0);
    let mut header: Vec<String> = vec!["n".into()];
    header.extend((1..=width).map(|k| format!("u_{k}")));
    header.extend((1..=width).map(|k| format!("nu_{k}")));
    header.extend(["E_n".into(), "residual".into()]);
    if states {
        header.extend(["t_residual".into(), "h_residual".into()]);
    }
    let mut out = header.join(",");
    out.push('\n');
    let cell = |v: &[[f64; 2]], k: usize| v.get(k).map(|p| complex(Complex::new(p[0], p[1]), precision.roots)).unwrap_or_default();
    for r in rows {
        let mut f: Vec<String> = vec![r.n.map(|n| n.to_string()).unwrap_or_default()];
        f.extend((0..width).map(|k| cell(&r.record.u, k)));
        f.extend((0..width).map(|k| cell(&r.record.nu, k)));
        f.push(energy(r.energy(), precision.energy));
        f.push(sci(r.record.residual));
        if states {
            f.push(sci(r.t_residual));
            f.push(sci(r.h_residual));
        }
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

/// JSON companion of the roots CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsReport {
    pub seed: u64,
    pub params: ParamFile,
    pub tol: f64,
    pub table_seeds: bool,
    pub coverage: Option<f64>,
    pub solutions: Vec<RootRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub params: ParamFile,
    pub relations: Vec<RelationReport>,
    /// Max of `|[t(u), t(v)]| / (|t(u)|·|t(v)|)` over the sampled pairs.
    pub commutativity: f64,
    pub commutativity_pairs: usize,
    /// Max difference of the sorted spectra of the two Hamiltonian routes.
    pub hamiltonian_routes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Gate {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode: Mode,
    pub seed: u64,
    pub params: ParamFile,
    pub coverage: Option<f64>,
    pub gates: Vec<Gate>,
    pub artifacts: Vec<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> anyhow::Result<String> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(name.to_string())
}
