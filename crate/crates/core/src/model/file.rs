//! TOML model-definition files.
//!
//! Either an explicit model:
//!
//! ```toml
//! M = 2
//! h = [[0.0, 0.0], [-0.7, 0.0], [-5.0, 0.0], [0.0, 0.0]]   # row-major [re, im]
//! V = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]
//! W = [[0.0, 0.0], [0.1, 0.0], [6.0, 0.0], [0.0, 0.0]]
//! gamma = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]
//! # u_t = [...]   optional TRS-dagger operator
//! ```
//!
//! or a zoo reference:
//!
//! ```toml
//! [zoo]
//! name = "trs_dagger"
//! params = { delta = -0.2 }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::zoo::{build_named, SymmetricModel};
use super::{LatticeModel, SymmetrySet};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<[f64; 2]>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<[f64; 2]>>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_t: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoo: Option<ZooRef>,
}

fn matrix(name: &str, m: usize, entries: &[[f64; 2]]) -> Result<ComplexMatrix<f64>> {
    if entries.len() != m * m {
        return Err(Error::ModelFile(format!("{name} has {} entries, expected {}", entries.len(), m * m)));
    }
    ComplexMatrix::try_new(m, m, entries.iter().map(|p| Complex64::new(p[0], p[1])).collect())
        .map_err(|e| Error::ModelFile(format!("{name}: {e}")))
}

fn entries(m: &ComplexMatrix<f64>) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ModelFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    pub fn from_model(model: &LatticeModel<f64>, syms: &SymmetrySet<f64>) -> Self {
        Self {
            m: Some(model.dim()),
            h: Some(entries(&model.h)),
            v: Some(entries(&model.v)),
            w: Some(entries(&model.w)),
            gamma: Some(entries(&syms.gamma)),
            u_t: syms.u_t.as_ref().map(entries),
            zoo: None,
        }
    }

    pub fn build(&self) -> Result<SymmetricModel<f64>> {
        if let Some(z) = &self.zoo {
            if self.m.is_some() || self.h.is_some() {
                return Err(Error::ModelFile("give either [zoo] or explicit blocks, not both".into()));
            }
            return build_named(&z.name, &z.params);
        }
        let m = self.m.ok_or_else(|| Error::ModelFile("missing M".into()))?;
        let need = |name: &str, x: &Option<Vec<[f64; 2]>>| -> Result<ComplexMatrix<f64>> {
            matrix(name, m, x.as_ref().ok_or_else(|| Error::ModelFile(format!("missing {name}")))?)
        };
        let model = LatticeModel::new(need("h", &self.h)?, need("V", &self.v)?, need("W", &self.w)?)?;
        let gamma = need("gamma", &self.gamma)?;
        let syms = match &self.u_t {
            Some(u) => SymmetrySet::with_trs_dagger(gamma, matrix("u_t", m, u)?)?,
            None => SymmetrySet::sublattice(gamma)?,
        };
        Ok(SymmetricModel { model, syms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SSH: &str = r#"
M = 2
h = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]
V = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]
W = [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
gamma = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]
"#;

    #[test]
    fn explicit_model_round_trips() {
        let f = ModelFile::parse(SSH).unwrap();
        let m = f.build().unwrap();
        assert_eq!(m.model.dim(), 2);
        assert!(!m.syms.has_trs_dagger());
        let back = ModelFile::parse(&ModelFile::from_model(&m.model, &m.syms).to_toml()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn zoo_reference_builds() {
        let f = ModelFile::parse("[zoo]\nname = \"trs_dagger\"\nparams = { delta = 0.3 }").unwrap();
        assert!(f.build().unwrap().syms.has_trs_dagger());
    }

    #[test]
    fn malformed_files_are_model_file_errors() {
        let missing = SSH.replace("gamma", "# gamma");
        assert_eq!(ModelFile::parse(&missing).unwrap().build().err(), Some(Error::ModelFile("missing gamma".into())));
        let short = SSH.replace("h = [[0.0, 0.0], ", "h = [");
        assert!(matches!(ModelFile::parse(&short).unwrap().build(), Err(Error::ModelFile(_))));
        let both = format!("{SSH}\n[zoo]\nname = \"ssh\"");
        assert!(matches!(ModelFile::parse(&both).unwrap().build(), Err(Error::ModelFile(_))));
        assert!(matches!(ModelFile::parse("M = \"two\""), Err(Error::ModelFile(_))));
        assert!(matches!(ModelFile::load(Path::new("/nonexistent/model.toml")), Err(Error::ModelFile(_))));
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let nan = SSH.replace("[0.5, 0.0], [0.5", "[nan, 0.0], [0.5");
        assert!(ModelFile::parse(&nan).unwrap().build().is_err());
    }
}
