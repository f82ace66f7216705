//! Figure presets.

use std::collections::BTreeMap;

use nhtopo::invariants::InvariantKind;
use nhtopo::model::file::{ModelFile, ZooRef};
use nhtopo::model::zoo::{
    trs_delta_c, CRITICAL_PREFACTOR, CRITICAL_ZEROS_MINUS_A, CRITICAL_ZEROS_MINUS_B, CRITICAL_ZEROS_PLUS_A,
    CRITICAL_ZEROS_PLUS_B, SUBGBZ_T1, SUBGBZ_T2_IM, SUBGBZ_T_MINUS, SUBGBZ_T_PLUS, TRS_GAMMA, TRS_T, TRS_U,
};

use crate::config::{RunConfig, SweepRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

pub const FIG2_RANGE: (f64, f64, f64) = (0.0, 6.0, 0.05);
pub const FIG3_RANGE: (f64, f64, f64) = (-1.0, 1.0, 0.05);
pub const FIG3_CELLS: usize = 40;
pub const FIG4_RANGE: (f64, f64, f64) = (-2.5, 0.5, 0.01);
pub const FIG5_RANGE: (f64, f64, f64) = (-0.3, 0.1, 0.005);
pub const FIG2_CELLS: usize = 60;

fn zoo(name: &str, params: &[(&str, f64)]) -> ModelFile {
    ModelFile {
        zoo: Some(ZooRef {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
        }),
        ..ModelFile::default()
    }
}

fn range(parameter: &str, r: (f64, f64, f64), extra: Vec<f64>) -> Option<SweepRange> {
    Some(SweepRange {
        parameter: parameter.to_string(),
        start: r.0,
        stop: r.1,
        step: r.2,
        extra,
    })
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    pub fn config(self) -> RunConfig {
        let mut cfg = RunConfig::default();
        match self {
            Preset::Fig2 => {
                cfg.model = zoo("four_band_subgbz", &[("lambda_im", 0.0)]);
                cfg.sweep = range("lambda", FIG2_RANGE, Vec::new());
                cfg.invariant = Some(InvariantKind::Z);
                cfg.cells = FIG2_CELLS;
            }
            Preset::Fig3 => {
                cfg.model = zoo("four_band_critical", &[("c_im", 0.0)]);
                cfg.sweep = range("c", FIG3_RANGE, vec![0.0]);
                cfg.invariant = Some(InvariantKind::Z);
                cfg.cells = FIG3_CELLS;
            }
            Preset::Fig4 | Preset::Fig5 => {
                cfg.model = zoo("trs_dagger", &[("t", TRS_T), ("u", TRS_U), ("gamma", TRS_GAMMA)]);
                let r = if self == Preset::Fig4 { FIG4_RANGE } else { FIG5_RANGE };
                cfg.sweep = range("delta", r, Vec::new());
                cfg.invariant = Some(InvariantKind::Z2);
            }
        }
        cfg
    }

    pub fn describe(self) -> String {
        match self {
            Preset::Fig2 => format!(
                "fig2: four-band chain with two sub-GBZs, H = [[0, R+], [R-, 0]],\n\
                 R±(β) = λ·I + (t± + t1·β^±1)·σ±/2 + t2·β^±1·σ∓/2.\n\
                 constants: t1 = {SUBGBZ_T1}, t2 = {SUBGBZ_T2_IM}i, t+ = {SUBGBZ_T_PLUS}, t- = {SUBGBZ_T_MINUS}\n\
                 sweep: λ from {} to {} step {} (range chosen to bracket the transition)\n\
                 output: Z = -Tr(Γ r(0))/2 per λ; --spectra adds the open-chain spectrum at N = {FIG2_CELLS}\n\
                 expected: 1 below the transition near λ = 3.4514, 0 above; λ = 0 is a Jordan-block point",
                FIG2_RANGE.0, FIG2_RANGE.1, FIG2_RANGE.2
            ),
            Preset::Fig3 => format!(
                "fig3: critical four-band chain, H± = [[a±(β-z)(β-z')/β, c], [c, b±(β-z)(β-z')/β]]\n\
                 constants: a± = b± = {CRITICAL_PREFACTOR}, zeros +a = {CRITICAL_ZEROS_PLUS_A:?}, -a = {CRITICAL_ZEROS_MINUS_A:?},\n\
                 \x20          +b = {CRITICAL_ZEROS_PLUS_B:?}, -b = {CRITICAL_ZEROS_MINUS_B:?}\n\
                 sweep: c from {} to {} step {} plus the exact point c = 0 (42 rows)\n\
                 output: Z per c; --spectra adds open-chain spectra at N = {FIG3_CELLS} for c = 0 and c = 0.5\n\
                 expected: 2 at c = 0 only, 0 elsewhere",
                FIG3_RANGE.0, FIG3_RANGE.1, FIG3_RANGE.2
            ),
            Preset::Fig4 => format!(
                "fig4: TRS-dagger chain, Γ = σz⊗I, U_T = -iσy⊗I, D1(k) = t sin k σx + (Δ + u + u cos k + iγ/2)σy\n\
                 constants: t = {TRS_T}, u = {TRS_U}, γ = {TRS_GAMMA}\n\
                 sweep: Δ from {} to {} step {}\n\
                 output: Q = Pf(V_C† Γ r(0) V_C) up to the fixed prefactor, with the Kramers-pair count of A\n\
                 expected: Q = -1 inside (-2 - Δc, Δc), +1 outside, Δc = (sqrt(2(sqrt(2581) - 9)) - 10)/10 = {:.7}\n\
                 β spectra: use `beta-spectrum --model trs_dagger --param delta=-0.2` (and delta = Δc)",
                FIG4_RANGE.0,
                FIG4_RANGE.1,
                FIG4_RANGE.2,
                trs_delta_c()
            ),
            Preset::Fig5 => format!(
                "fig5: |β_i| of the zero-energy roots of the TRS-dagger chain against Δ near Δc\n\
                 constants: t = {TRS_T}, u = {TRS_U}, γ = {TRS_GAMMA}\n\
                 sweep: Δ from {} to {} step {}\n\
                 labels: β1, β3, β6, β8 from their closed forms, β2 = 1/β1, β4 = 1/β3, β5 = 1/β6, β7 = 1/β8;\n\
                 \x20       numeric roots are matched to labels within the same nullvector support\n\
                 expected: |β| crossings at Δ = -0.2 and Δ = 0 on |β| = 1, and at Δc off the unit circle",
                FIG5_RANGE.0, FIG5_RANGE.1, FIG5_RANGE.2
            ),
        }
    }
}
