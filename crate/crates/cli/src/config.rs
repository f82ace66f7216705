//! Run configuration.
//!
//! One TOML file per run. Precedence, lowest first: built-in defaults, the
//! `--config` file, command-line flags.
//!
//! ```toml
//! invariant = "z"
//! cells = 60
//!
//! [model.zoo]
//! name = "four_band_subgbz"
//! params = { lambda_im = 0.0 }
//!
//! [sweep]
//! parameter = "lambda"
//! start = 0.0
//! stop = 6.0
//! step = 0.05
//!
//! [limit]
//! residue_factor = 1e-4
//!
//! [output]
//! path = "fig2.csv"
//! format = "csv"
//! workers = 4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nhtopo::greens::LimitOptions;
use nhtopo::invariants::{InvariantKind, InvariantOptions};
use nhtopo::model::file::{ModelFile, ZooRef};
use nhtopo::SymmetricModel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Points added on top of the grid, e.g. an exact critical value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<f64>,
}

impl SweepRange {
    /// Grid points followed by `extra`, sorted by value. Equal values keep
    /// their order, so an extra point duplicating a grid point is a second row.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            bail!("sweep step must be positive, got {}", self.step);
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            bail!("sweep range [{}, {}] is empty", self.start, self.stop);
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        let mut pts: Vec<f64> = (0..n)
            .map(|i| snap(self.start + i as f64 * self.step))
            .chain(self.extra.iter().copied())
            .collect();
        if let Some(bad) = pts.iter().find(|x| !x.is_finite()) {
            bail!("non-finite sweep point {bad}");
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        Ok(pts)
    }
}

/// Removes the accumulated round-off of `start + i·step`.
fn snap(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Worker threads; `None` uses every hardware thread.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelFile,
    pub sweep: Option<SweepRange>,
    /// Defaults to `z2` for models carrying a TRS-dagger operator.
    pub invariant: Option<InvariantKind>,
    #[serde(default)]
    pub limit: LimitOptions,
    /// Lead coupling `V_LS = s·I`.
    pub coupling_scale: Option<f64>,
    /// Chain length for spectra.
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_cells() -> usize {
    60
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelFile::default(),
            sweep: None,
            invariant: None,
            limit: LimitOptions::default(),
            coupling_scale: None,
            cells: default_cells(),
            output: OutputSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Replaces the model with a zoo entry.
    pub fn set_zoo_model(&mut self, name: &str) {
        self.model = ModelFile {
            zoo: Some(ZooRef {
                name: name.to_string(),
                params: BTreeMap::new(),
            }),
            ..ModelFile::default()
        };
    }

    /// Sets a zoo parameter; explicit models have none.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<()> {
        let zoo = self
            .model
            .zoo
            .as_mut()
            .ok_or_else(|| anyhow!("--param needs a zoo model (set --model)"))?;
        zoo.params.insert(key.to_string(), value);
        Ok(())
    }

    pub fn build_model(&self) -> Result<SymmetricModel<f64>> {
        if self.model == ModelFile::default() {
            bail!("no model given (use --model, --model-file or a [model] section)");
        }
        Ok(self.model.build()?)
    }

    /// Model at one value of the swept parameter.
    pub fn build_at(&self, parameter: &str, value: f64) -> nhtopo::Result<SymmetricModel<f64>> {
        let mut model = self.model.clone();
        match model.zoo.as_mut() {
            Some(z) => {
                z.params.insert(parameter.to_string(), value);
            }
            None => {
                return Err(nhtopo::Error::ModelFile("sweeps need a [model.zoo] model".into()));
            }
        }
        model.build()
    }

    pub fn invariant_kind(&self, model: &SymmetricModel<f64>) -> Result<InvariantKind> {
        let kind = self.invariant.unwrap_or(if model.syms.has_trs_dagger() {
            InvariantKind::Z2
        } else {
            InvariantKind::Z
        });
        if kind == InvariantKind::Z2 && !model.syms.has_trs_dagger() {
            bail!("the z2 invariant needs a model with a TRS-dagger operator");
        }
        Ok(kind)
    }

    pub fn invariant_options(&self) -> Result<InvariantOptions<f64>> {
        let l = &self.limit;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(l.residue_factor) || !l.direct_factors.iter().all(|f| positive(*f)) || !positive(l.gap_floor) {
            bail!("limit factors and gap floor must be positive");
        }
        if l.gap_k_points == 0 {
            bail!("gap_k_points must be at least 1");
        }
        let mut opts = match self.coupling_scale {
            Some(s) if positive(s) => InvariantOptions::with_coupling_scale(s),
            Some(s) => bail!("coupling scale must be positive, got {s}"),
            None => InvariantOptions::default(),
        };
        opts.limit = self.limit;
        Ok(opts)
    }
}

/// Parses `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().with_context(|| format!("bad number in '{s}'"))?;
    Ok((k.trim().to_string(), v))
}

/// Parses `name=start:stop:step`.
pub fn parse_range(s: &str) -> Result<SweepRange> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected name=start:stop:step, got '{s}'"))?;
    let parts: Vec<f64> = v
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad range '{s}'"))?;
    let [start, stop, step] = parts[..] else {
        bail!("expected three numbers in '{s}'");
    };
    Ok(SweepRange {
        parameter: k.trim().to_string(),
        start,
        stop,
        step,
        extra: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(start: f64, stop: f64, step: f64) -> SweepRange {
        SweepRange {
            parameter: "x".into(),
            start,
            stop,
            step,
            extra: Vec::new(),
        }
    }

    #[test]
    fn grid_snaps_round_off() {
        let pts = range(0.0, 0.3, 0.1).points().unwrap();
        assert_eq!(pts, [0.0, 0.1, 0.2, 0.3]);
        assert_eq!(range(1.0, 1.0, 0.5).points().unwrap(), [1.0]);
    }

    #[test]
    fn degenerate_ranges_are_rejected() {
        assert!(range(0.0, 1.0, 0.0).points().is_err());
        assert!(range(0.0, 1.0, f64::NAN).points().is_err());
        assert!(range(1.0, 0.0, 0.1).points().is_err());
        assert!(range(0.0, f64::INFINITY, 0.1).points().is_err());
        let mut r = range(0.0, 1.0, 0.5);
        r.extra = vec![f64::NAN];
        assert!(r.points().is_err());
    }

    #[test]
    fn params_need_a_zoo_model() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set_param("v", 1.0).is_err());
        assert!(cfg.build_model().is_err());
        cfg.set_zoo_model("ssh");
        cfg.set_param("v", 2.0).unwrap();
        assert_eq!(cfg.model.zoo.as_ref().unwrap().params["v"], 2.0);
    }

    #[test]
    fn invariant_kind_defaults_follow_the_model() {
        let mut cfg = RunConfig::default();
        cfg.set_zoo_model("trs_dagger");
        let m = cfg.build_model().unwrap();
        assert_eq!(cfg.invariant_kind(&m).unwrap(), InvariantKind::Z2);
        cfg.set_zoo_model("ssh");
        let m = cfg.build_model().unwrap();
        assert_eq!(cfg.invariant_kind(&m).unwrap(), InvariantKind::Z);
        cfg.invariant = Some(InvariantKind::Z2);
        assert!(cfg.invariant_kind(&m).is_err());
    }

    #[test]
    fn limit_options_are_validated() {
        let mut cfg = RunConfig::default();
        cfg.limit.residue_factor = 0.0;
        assert!(cfg.invariant_options().is_err());
        let mut cfg = RunConfig::default();
        cfg.limit.gap_k_points = 0;
        assert!(cfg.invariant_options().is_err());
        let mut cfg = RunConfig::default();
        cfg.coupling_scale = Some(f64::INFINITY);
        assert!(cfg.invariant_options().is_err());
    }
}
