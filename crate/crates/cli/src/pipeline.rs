use anyhow::Context;
use bethe_tj::graded::{max_abs, Complex};
use bethe_tj::kernels::check_all;
use bethe_tj::roots::{match_spectrum, multistart_search, probe_points, rayleigh, RootSolution, SolutionRecord};
use bethe_tj::states::{bethe_state, eigen_residual, gram_report, verify_eigenstate, StateRecord};
use bethe_tj::tables;
use bethe_tj::tq::{lambda_tq, TQContext};
use bethe_tj::transfer::{
    build_transfer, diagonalize, hamiltonian_direct, hamiltonian_from_transfer, number_operator, SpectrumED,
    SpectrumSource, TransferFamily,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::report::{self, Gate, RootRow, RootsReport, Summary, VerifyReport};

pub const RELATION_TOL: f64 = 1e-10;
pub const RELATION_POINTS: usize = 20;
pub const COMMUTATOR_TOL: f64 = 1e-9;
pub const COMMUTATOR_PAIRS: usize = 10;
pub const ROUTE_TOL: f64 = 1e-8;
pub const ENERGY_TOL: f64 = 1e-8;
pub const STATE_T_TOL: f64 = 1e-7;
pub const STATE_H_TOL: f64 = 1e-6;
pub const GRAM_TOL: f64 = 1e-10;

/// Max relative commutator `|[t(u), t(v)]| / (|t(u)|·|t(v)|)` over seeded pairs.
pub fn commutativity(family: &TransferFamily, pairs: usize, seed: u64) -> f64 {
    let pts = probe_points(2 * pairs, seed);
    pts.chunks(2)
        .map(|uv| {
            let (a, b) = (family.eval(uv[0]).into_matrix(), family.eval(uv[1]).into_matrix());
            let comm = &a * &b - &b * &a;
            max_abs(&comm) / (max_abs(&a).max(1.0) * max_abs(&b).max(1.0))
        })
        .fold(0.0, f64::max)
}

/// Largest difference between two spectra sorted the same way.
pub fn spectrum_distance(a: &SpectrumED, b: &SpectrumED) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

struct Run<'a> {
    cfg: &'a RunConfig,
    summary: Summary,
}

impl Run<'_> {
    fn gate(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            eprintln!("gate {name} FAILED: {detail}");
        }
        self.summary.gates.push(Gate::new(name, pass, detail));
    }

    fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let written = report::write(&self.cfg.out, name, contents)?;
        self.summary.artifacts.push(written);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        self.write(name, &report::to_json(value)?)
    }
}

/// Runs the configured mode, writes its artifacts to the output directory
/// and returns the gate summary (also written as `summary.json`).
pub fn run(cfg: &RunConfig) -> anyhow::Result<Summary> {
    let summary = Summary {
        mode: cfg.mode,
        seed: cfg.seed(),
        params: cfg.file.clone(),
        coverage: None,
        gates: Vec::new(),
        artifacts: Vec::new(),
    };
    let mut run = Run { cfg, summary };
    let mode = cfg.mode;
    if matches!(mode, Mode::Verify | Mode::Full) {
        verify(&mut run)?;
    }
    let spectra = if matches!(mode, Mode::Ed | Mode::Roots | Mode::States | Mode::Full) && cfg.params.len() <= bethe_tj::transfer::MAX_DENSE_SITES {
        Some(ed(&mut run, mode != Mode::Ed)?)
    } else {
        None
    };
    if matches!(mode, Mode::Roots | Mode::States | Mode::Full) {
        let rows = roots(&mut run, spectra.as_ref().map(|s| &s.0))?;
        if matches!(mode, Mode::States | Mode::Full) {
            states(&mut run, rows)?;
        }
    }
    let mut summary = run.summary.clone();
    summary.artifacts.push("summary.json".into());
    report::write(&cfg.out, "summary.json", &report::to_json(&summary)?)?;
    Ok(summary)
}

fn verify(run: &mut Run) -> anyhow::Result<()> {
    let p = &run.cfg.params;
    let relations = check_all(p, RELATION_POINTS, RELATION_TOL);
    for r in &relations {
        run.gate(&format!("relation_{}", r.relation), r.pass, format!("max residual {:.3e}", r.max_residual));
    }
    let family = build_transfer(p)?;
    let comm = commutativity(&family, COMMUTATOR_PAIRS, run.cfg.seed());
    run.gate("commutativity", comm <= COMMUTATOR_TOL, format!("{comm:.3e}"));
    let (hd, ht) = (hamiltonian_direct(p)?, hamiltonian_from_transfer(p)?);
    let routes = spectrum_distance(
        &diagonalize(&hd, SpectrumSource::HamiltonianDirect, false)?,
        &diagonalize(&ht, SpectrumSource::HamiltonianTransfer, false)?,
    );
    run.gate("hamiltonian_routes", routes <= ROUTE_TOL, format!("{routes:.3e}"));
    let rep = VerifyReport {
        seed: run.cfg.seed(),
        params: run.cfg.file.clone(),
        relations,
        commutativity: comm,
        commutativity_pairs: COMMUTATOR_PAIRS,
        hamiltonian_routes: routes,
    };
    run.write_json("verify.json", &rep)
}

fn ed(run: &mut Run, keep_vectors: bool) -> anyhow::Result<(SpectrumED, SpectrumED)> {
    let p = &run.cfg.params;
    let direct = diagonalize(&hamiltonian_direct(p)?, SpectrumSource::HamiltonianDirect, keep_vectors)?;
    let via_t = diagonalize(&hamiltonian_from_transfer(p)?, SpectrumSource::HamiltonianTransfer, false)?;
    let routes = spectrum_distance(&direct, &via_t);
    if run.cfg.mode != Mode::Full {
        run.gate("hamiltonian_routes", routes <= ROUTE_TOL, format!("{routes:.3e}"));
    }
    run.write("spectrum_direct.csv", &direct.to_csv())?;
    run.write("spectrum_transfer.csv", &via_t.to_csv())?;
    Ok((direct, via_t))
}

fn search(cfg: &RunConfig, ctx: &TQContext) -> anyhow::Result<Vec<RootSolution>> {
    let mut all = Vec::new();
    for &m in &cfg.m_list {
        let found = multistart_search(m, ctx, &cfg.solver).with_context(|| format!("root search at M = {m}"))?;
        eprintln!("M = {m}: {} solutions", found.len());
        all.extend(found);
    }
    Ok(all)
}

fn roots(run: &mut Run, ed: Option<&SpectrumED>) -> anyhow::Result<Vec<RootRow>> {
    let cfg = run.cfg;
    let p = &cfg.params;
    let ctx = TQContext::new(p);
    let sols = search(cfg, &ctx)?;
    let tol = cfg.solver.tol;
    let worst = sols.iter().map(|s| s.residual).fold(0.0, f64::max);
    run.gate("bae_residual", worst <= tol, format!("max {worst:.3e} over {} solutions", sols.len()));

    let mut rows: Vec<RootRow> = Vec::new();
    let mut coverage = None;
    match ed {
        Some(ed) => {
            let family = build_transfer(p)?;
            let rep = match_spectrum(&sols, ed, &ctx, Some(&family), ENERGY_TOL);
            for l in &rep.levels {
                if let Some(s) = &l.solution {
                    rows.push(RootRow {
                        n: Some(l.level + 1),
                        record: SolutionRecord::from_solution(s),
                        energy_error: l.energy_error,
                        lambda_error: l.lambda_error,
                        t_residual: None,
                        h_residual: None,
                    });
                }
            }
            let unmatched: Vec<&RootSolution> = sols
                .iter()
                .filter(|s| !rep.levels.iter().any(|l| l.solution.as_ref().is_some_and(|m| m.roots == s.roots)))
                .collect();
            let certified = rep
                .levels
                .iter()
                .filter(|l| l.solution.is_some())
                .all(|l| l.lambda_error.is_some_and(|e| e <= rep.lambda_tol));
            run.gate(
                "solutions_matched",
                unmatched.is_empty() && certified,
                format!("{} of {} solutions matched to ED levels", sols.len() - unmatched.len(), sols.len()),
            );
            rows.extend(unmatched.into_iter().map(|s| RootRow {
                n: None,
                record: SolutionRecord::from_solution(s),
                energy_error: None,
                lambda_error: None,
                t_residual: None,
                h_residual: None,
            }));
            // levels in the requested electron-number sectors
            let number = number_operator(p.len()).into_matrix();
            let vecs = ed.eigenvectors.as_ref().context("ED eigenvectors")?;
            let in_scope: Vec<usize> = (0..ed.len())
                .filter(|&k| {
                    let n = rayleigh(&number, &vecs.column(k).into_owned()).re.round();
                    n >= 0.0 && cfg.m_list.contains(&(n as usize))
                })
                .collect();
            let hit = in_scope.iter().filter(|&&k| rep.levels[k].solution.is_some()).count();
            let cov = if in_scope.is_empty() { 0.0 } else { hit as f64 / in_scope.len() as f64 };
            coverage = Some(cov);
            eprintln!("coverage {hit}/{}", in_scope.len());
            if cfg.solver.seeds.table && tables::is_table_params(p) && tables::printed_rows(p.len()).is_some() {
                run.gate("coverage", hit == in_scope.len(), format!("{hit}/{}", in_scope.len()));
            }
        }
        None => {
            let mut sorted = sols.clone();
            sorted.sort_by(|a, b| a.energy.re.total_cmp(&b.energy.re));
            rows.extend(sorted.iter().map(|s| RootRow {
                n: None,
                record: SolutionRecord::from_solution(s),
                energy_error: None,
                lambda_error: None,
                t_residual: None,
                h_residual: None,
            }));
        }
    }
    run.summary.coverage = coverage;
    let report = RootsReport {
        seed: cfg.seed(),
        params: cfg.file.clone(),
        tol,
        table_seeds: cfg.solver.seeds.table,
        coverage,
        solutions: rows.clone(),
    };
    run.write("roots.csv", &report::roots_csv(&rows, cfg.precision, false))?;
    run.write_json("roots.json", &report)?;
    Ok(rows)
}

#[derive(Serialize)]
struct StatesFile {
    seed: u64,
    gram_rank: usize,
    gram_condition: f64,
    states: Vec<StateEntry>,
}

#[derive(Serialize)]
struct StateEntry {
    n: Option<usize>,
    #[serde(rename = "M")]
    m: usize,
    state: StateRecord,
}

fn states(run: &mut Run, mut rows: Vec<RootRow>) -> anyhow::Result<()> {
    let cfg = run.cfg;
    let p = &cfg.params;
    let ctx = TQContext::new(p);
    let family = build_transfer(p)?;
    let h = hamiltonian_direct(p)?;
    let points: Vec<Complex> = probe_points(5, cfg.seed() ^ 0x57a7e);
    let results: Vec<_> = rows
        .par_iter()
        .map(|row| -> anyhow::Result<_> {
            let roots = row.record.roots()?;
            let e = row.record.energy.map(|[a, b]| Complex::new(a, b)).unwrap_or_default();
            let state = match bethe_state(&roots, &ctx) {
                Ok(s) => s,
                Err(err) => return Ok(Err(err.to_string())),
            };
            let t = verify_eigenstate(&state, &family, |u| lambda_tq(u, &roots, &ctx), &points)?.max;
            let hres = eigen_residual(h.matrix(), &state.amplitudes, e);
            Ok(Ok((state, t, hres)))
        })
        .collect::<anyhow::Result<_>>()?;
    let mut built = Vec::new();
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (row, res) in rows.iter_mut().zip(results) {
        match res {
            Ok((state, t, hres)) => {
                row.t_residual = Some(t);
                row.h_residual = Some(hres);
                entries.push(StateEntry { n: row.n, m: row.record.m, state: StateRecord::from_state(&state) });
                built.push(state);
            }
            Err(msg) => failures.push(format!("n={:?}: {msg}", row.n)),
        }
    }
    let worst_t = rows.iter().filter_map(|r| r.t_residual).fold(0.0, f64::max);
    let worst_h = rows.iter().filter_map(|r| r.h_residual).fold(0.0, f64::max);
    run.gate("states_built", failures.is_empty(), if failures.is_empty() { format!("{} states", built.len()) } else { failures.join("; ") });
    run.gate("state_t_residual", worst_t <= STATE_T_TOL, format!("{worst_t:.3e}"));
    run.gate("state_h_residual", worst_h <= STATE_H_TOL, format!("{worst_h:.3e}"));
    let gram = gram_report(&built, GRAM_TOL);
    run.gate("gram_rank", gram.rank == built.len(), format!("rank {} of {}", gram.rank, built.len()));
    run.write("states.csv", &report::roots_csv(&rows, cfg.precision, true))?;
    let file = StatesFile { seed: cfg.seed(), gram_rank: gram.rank, gram_condition: gram.condition, states: entries };
    run.write_json("states.json", &file)
}
