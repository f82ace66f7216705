use std::io::Write;

use anyhow::Result;
use nhtopo::beta::beta_roots;
use nhtopo::invariants::{invariant_z, invariant_z2, InvariantKind};
use nhtopo::model::zoo::trs_dagger_roots;
use nhtopo::spectra::{beta_spectrum, obc_spectrum, pbc_spectrum};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::{fmt_f64, pair, write_json, write_table, Fixed};
use crate::sweep::{status_of, with_workers, STATUS_OK};

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub kind: InvariantKind,
    pub invariant: Option<i64>,
    pub quantization_error: Option<Fixed>,
    pub rank_plus: Option<usize>,
    pub rank_minus: Option<usize>,
    pub kramers_pairs: Option<usize>,
    pub gamma_r_eigenvalues: Vec<[Fixed; 2]>,
    /// `−Tr(Γr(0))/2` or the Pfaffian before rounding.
    pub raw: Option<[Fixed; 2]>,
    pub status: String,
}

impl PointReport {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

pub fn invariant_point(cfg: &RunConfig) -> Result<PointReport> {
    let model = cfg.build_model()?;
    let kind = cfg.invariant_kind(&model)?;
    let opts = cfg.invariant_options()?;
    let r = match kind {
        InvariantKind::Z => invariant_z(&model, &opts),
        InvariantKind::Z2 => invariant_z2(&model, &opts),
    };
    Ok(match r {
        Ok(r) => PointReport {
            kind,
            invariant: Some(r.value),
            quantization_error: Some(Fixed(r.quantization_error)),
            rank_plus: Some(r.rank_plus),
            rank_minus: Some(r.rank_minus),
            kramers_pairs: r.kramers_pairs,
            gamma_r_eigenvalues: r.gamma_r_eigenvalues.iter().map(|z| pair(*z)).collect(),
            raw: Some(pair(r.raw)),
            status: STATUS_OK.to_string(),
        },
        Err(e) => PointReport {
            kind,
            invariant: None,
            quantization_error: None,
            rank_plus: None,
            rank_minus: None,
            kramers_pairs: None,
            gamma_r_eigenvalues: Vec::new(),
            raw: None,
            status: status_of(&e),
        },
    })
}

pub fn write_point<W: Write>(p: &PointReport, format: Format, w: W) -> Result<()> {
    match format {
        Format::Json => write_json(p, w),
        Format::Csv => {
            let f = |x: &Option<Fixed>| x.map(|v| fmt_f64(v.0)).unwrap_or_default();
            let o = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
            let kind = match p.kind {
                InvariantKind::Z => "z",
                InvariantKind::Z2 => "z2",
            };
            write_table(
                &["kind", "invariant", "quantization_error", "rank_plus", "rank_minus", "kramers_pairs", "status"],
                &[vec![
                    kind.to_string(),
                    p.invariant.map(|v| v.to_string()).unwrap_or_default(),
                    f(&p.quantization_error),
                    o(p.rank_plus),
                    o(p.rank_minus),
                    o(p.kramers_pairs),
                    p.status.clone(),
                ]],
                w,
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Boundary {
    #[default]
    Obc,
    Pbc,
}

#[derive(Serialize)]
struct ObcJson {
    cells: usize,
    energies: Vec<[Fixed; 2]>,
    discrete: Vec<bool>,
    boundary_candidates: Vec<usize>,
}

#[derive(Serialize)]
struct PbcJson {
    k: Fixed,
    energies: Vec<[Fixed; 2]>,
}

pub fn write_spectrum<W: Write>(cfg: &RunConfig, boundary: Boundary, k_points: usize, format: Format, w: W) -> Result<()> {
    let model = cfg.build_model()?;
    match boundary {
        Boundary::Obc => {
            let s = obc_spectrum(&model.model, cfg.cells)?;
            match format {
                Format::Json => write_json(
                    &ObcJson {
                        cells: s.cells,
                        energies: s.energies.iter().map(|z| pair(*z)).collect(),
                        discrete: s.discrete.clone(),
                        boundary_candidates: s.boundary_candidates.clone(),
                    },
                    w,
                ),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = s
                        .energies
                        .iter()
                        .enumerate()
                        .map(|(i, e)| {
                            vec![
                                i.to_string(),
                                fmt_f64(e.re),
                                fmt_f64(e.im),
                                s.discrete[i].to_string(),
                                s.boundary_candidates.contains(&i).to_string(),
                            ]
                        })
                        .collect();
                    write_table(&["index", "energy_re", "energy_im", "discrete", "boundary_candidate"], &rows, w)
                }
            }
        }
        Boundary::Pbc => {
            let bands = pbc_spectrum(&model.model, k_points)?;
            match format {
                Format::Json => {
                    let out: Vec<PbcJson> = bands
                        .iter()
                        .map(|(k, e)| PbcJson {
                            k: Fixed(*k),
                            energies: e.iter().map(|z| pair(*z)).collect(),
                        })
                        .collect();
                    write_json(&out, w)
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = bands
                        .iter()
                        .flat_map(|(k, e)| {
                            e.iter()
                                .enumerate()
                                .map(move |(b, z)| vec![fmt_f64(*k), b.to_string(), fmt_f64(z.re), fmt_f64(z.im)])
                        })
                        .collect();
                    write_table(&["k", "band", "energy_re", "energy_im"], &rows, w)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct BetaJson {
    energy: [Fixed; 2],
    betas: Vec<[Fixed; 2]>,
    boundary: bool,
}

/// β roots for the given energies, or for the open-chain spectrum at
/// `cfg.cells` when none are given.
pub fn write_beta_spectrum<W: Write>(cfg: &RunConfig, energies: &[Complex64], format: Format, w: W) -> Result<()> {
    let model = cfg.build_model()?;
    let energies = if energies.is_empty() {
        obc_spectrum(&model.model, cfg.cells)?.energies
    } else {
        energies.to_vec()
    };
    let samples = beta_spectrum(&model.model, &energies)?;
    match format {
        Format::Json => {
            let out: Vec<BetaJson> = samples
                .iter()
                .map(|s| BetaJson {
                    energy: pair(s.energy),
                    betas: s.betas.iter().map(|z| pair(*z)).collect(),
                    boundary: s.boundary,
                })
                .collect();
            write_json(&out, w)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = samples
                .iter()
                .flat_map(|s| {
                    s.betas.iter().map(move |b| {
                        vec![
                            fmt_f64(s.energy.re),
                            fmt_f64(s.energy.im),
                            fmt_f64(b.re),
                            fmt_f64(b.im),
                            fmt_f64(b.norm()),
                            s.boundary.to_string(),
                        ]
                    })
                })
                .collect();
            write_table(&["energy_re", "energy_im", "beta_re", "beta_im", "abs_beta", "boundary"], &rows, w)
        }
    }
}

/// Open-chain spectra along a sweep, one row per eigenvalue.
pub fn write_sweep_spectra<W: Write>(cfg: &RunConfig, points: &[f64], format: Format, w: W) -> Result<()> {
    let parameter = cfg.sweep.as_ref().map(|s| s.parameter.clone()).unwrap_or_default();
    let spectra = with_workers(cfg.output.workers, || {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|&x| {
                let m = cfg.build_at(&parameter, x)?;
                Ok(obc_spectrum(&m.model, cfg.cells)?)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                parameter: Fixed,
                energies: Vec<[Fixed; 2]>,
                discrete: Vec<bool>,
            }
            let out: Vec<Row> = points
                .iter()
                .zip(&spectra)
                .map(|(x, s)| Row {
                    parameter: Fixed(*x),
                    energies: s.energies.iter().map(|z| pair(*z)).collect(),
                    discrete: s.discrete.clone(),
                })
                .collect();
            write_json(&out, w)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .zip(&spectra)
                .flat_map(|(x, s)| {
                    s.energies
                        .iter()
                        .zip(&s.discrete)
                        .map(move |(e, d)| vec![fmt_f64(*x), fmt_f64(e.re), fmt_f64(e.im), d.to_string()])
                })
                .collect();
            write_table(&["parameter", "energy_re", "energy_im", "discrete"], &rows, w)
        }
    }
}

/// Label values `β₁…β₈` of the TRS† chain, `None` at infinity. Entries with a
/// `t − u` denominator come from their reciprocal partners, which stay finite
/// at `t = u`.
pub fn trs_labels(t: f64, u: f64, gamma: f64, delta: f64) -> [(Option<Complex64>, usize); 8] {
    let closed = trs_dagger_roots(t, u, gamma, delta);
    let inv = |z: Complex64| if z.norm() == 0.0 { None } else { Some(z.inv()) };
    let at = |i: usize| closed[i].0;
    [
        (Some(at(0)), closed[0].1),
        (inv(at(0)), closed[1].1),
        (Some(at(2)), closed[2].1),
        (inv(at(2)), closed[3].1),
        (inv(at(5)), closed[4].1),
        (Some(at(5)), closed[5].1),
        (inv(at(7)), closed[6].1),
        (Some(at(7)), closed[7].1),
    ]
}

/// Chordal distance on the Riemann sphere, `None` standing for infinity.
fn chordal(a: Option<Complex64>, b: Option<Complex64>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(z), None) | (None, Some(z)) => 1.0 / (1.0 + z.norm_sqr()).sqrt(),
        (Some(x), Some(y)) => (x - y).norm() / ((1.0 + x.norm_sqr()).sqrt() * (1.0 + y.norm_sqr()).sqrt()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaAbsRow {
    pub delta: Fixed,
    /// `|β₁|…|β₈|`, `null` (JSON) or `inf` (CSV) at infinity.
    pub abs_beta: Vec<Fixed>,
    pub status: String,
}

/// Numeric zero-energy `|β|` of the TRS† chain labelled by the closed forms.
pub fn beta_abs_row(t: f64, u: f64, gamma: f64, delta: f64) -> BetaAbsRow {
    let failed = |status: String| BetaAbsRow {
        delta: Fixed(delta),
        abs_beta: Vec::new(),
        status,
    };
    let model = match nhtopo::model::zoo::build_trs_dagger(t, u, gamma, delta) {
        Ok(m) => m,
        Err(e) => return failed(status_of(&e)),
    };
    let set = match beta_roots(&model.model, Complex64::new(0.0, 0.0)) {
        Ok(s) => s,
        Err(e) => return failed(status_of(&e)),
    };
    let mut used = vec![false; set.roots.len()];
    let mut abs = Vec::with_capacity(8);
    for (label, idx) in trs_labels(t, u, gamma, delta) {
        let supported = |k: usize| set.roots[k].nullvector[idx].norm() > 0.5;
        let pick = |need_support: bool| {
            (0..set.roots.len())
                .filter(|&k| !used[k] && (!need_support || supported(k)))
                .map(|k| {
                    let r = &set.roots[k];
                    (k, chordal(label, (!r.infinite).then_some(r.beta)))
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
        };
        let Some((k, _)) = pick(true).or_else(|| pick(false)) else {
            return failed("error:unmatched_root".to_string());
        };
        used[k] = true;
        abs.push(Fixed(set.roots[k].magnitude()));
    }
    BetaAbsRow {
        delta: Fixed(delta),
        abs_beta: abs,
        status: STATUS_OK.to_string(),
    }
}

pub fn write_beta_abs<W: Write>(rows: &[BetaAbsRow], format: Format, w: W) -> Result<()> {
    match format {
        Format::Json => write_json(rows, w),
        Format::Csv => {
            let mut cols = vec!["delta".to_string()];
            cols.extend((1..=8).map(|i| format!("abs_beta_{i}")));
            cols.push("status".to_string());
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![fmt_f64(r.delta.0)];
                    v.extend((0..8).map(|i| r.abs_beta.get(i).map(|x| fmt_f64(x.0)).unwrap_or_default()));
                    v.push(r.status.clone());
                    v
                })
                .collect();
            write_table(&cols, &table, w)
        }
    }
}
