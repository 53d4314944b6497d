use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::Tolerances;
use crate::coxeter::{CoxeterMatrix, CoxeterType};
use crate::error::{Error, Result};
use crate::fock::{DeformationTensor, QSpec};
use crate::linalg::{CMat, C64};

pub const DEFAULT_LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Coxeter,
    Positivity,
    Blocklength,
    Fock,
    Wick,
    Opspace,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Coxeter,
        Kind::Positivity,
        Kind::Blocklength,
        Kind::Fock,
        Kind::Wick,
        Kind::Opspace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Coxeter => "coxeter",
            Kind::Positivity => "positivity",
            Kind::Blocklength => "blocklength",
            Kind::Fock => "fock",
            Kind::Wick => "wick",
            Kind::Opspace => "opspace",
        }
    }

    fn needs_group(self) -> bool {
        matches!(self, Kind::Coxeter | Kind::Positivity | Kind::Blocklength)
    }

    fn needs_deformation(self) -> bool {
        matches!(self, Kind::Fock | Kind::Wick | Kind::Opspace)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidScenario(format!("unsupported kind {s:?}")))
    }
}

/// A Coxeter group by name (`"A3"`, `"I2(5)"`) or by explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Matrix(Vec<Vec<u32>>),
}

impl GroupSpec {
    pub fn matrix(&self) -> Result<CoxeterMatrix> {
        match self {
            GroupSpec::Named(name) => Ok(name.parse::<CoxeterType>()?.matrix()),
            GroupSpec::Matrix(rows) => CoxeterMatrix::new(rows.clone()),
        }
    }
}

/// A complex matrix as separate real and imaginary row arrays; `im` may be
/// omitted for real data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRows {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl ComplexRows {
    pub fn from_matrix(m: &CMat) -> Self {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        let im = rows(|z| z.im);
        let has_im = im.iter().flatten().any(|&x| x != 0.0);
        ComplexRows {
            re: rows(|z| z.re),
            im: has_im.then_some(im),
        }
    }

    pub fn to_matrix(&self, what: &str) -> Result<CMat> {
        let n = self.re.len();
        let cols = self.re.first().map_or(0, |r| r.len());
        let shape_err = || Error::InvalidScenario(format!("{what}: ragged or mismatched real/imaginary arrays"));
        if self.re.iter().any(|r| r.len() != cols) {
            return Err(shape_err());
        }
        if let Some(im) = &self.im {
            if im.len() != n || im.iter().any(|r| r.len() != cols) {
                return Err(shape_err());
            }
        }
        Ok(CMat::from_fn(n, cols, |r, c| {
            C64::new(self.re[r][c], self.im.as_ref().map_or(0.0, |im| im[r][c]))
        }))
    }
}

/// The deformation `q`: either the keyword `"zeros"` or explicit arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QField {
    Keyword(String),
    Rows(ComplexRows),
}

/// One scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<QField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<ComplexRows>,
    /// Scalar deformation for `positivity` and `blocklength`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<f64>,
    /// 1-based letters for `wick`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_dim: Option<usize>,
}

fn default_levels() -> usize {
    DEFAULT_LEVELS
}

impl ScenarioSpec {
    pub fn new(kind: Kind) -> Self {
        ScenarioSpec {
            kind,
            group: None,
            d: None,
            levels: DEFAULT_LEVELS,
            q: None,
            tensor: None,
            scalar: None,
            word: None,
            seed: 0,
            tolerances: None,
            trials: None,
            m: None,
            aux_dim: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    pub fn coxeter_matrix(&self) -> Result<CoxeterMatrix> {
        self.group
            .as_ref()
            .ok_or_else(|| Error::InvalidScenario(format!("kind {} needs a group", self.kind)))?
            .matrix()
            .map_err(|e| Error::InvalidScenario(format!("group: {e}")))
    }

    /// `q` as a validated deformation, if present.
    pub fn qspec(&self) -> Result<Option<QSpec>> {
        let Some(q) = &self.q else { return Ok(None) };
        let spec = match q {
            QField::Keyword(word) if word == "zeros" => {
                let d = self
                    .d
                    .ok_or_else(|| Error::InvalidScenario("q = \"zeros\" needs the dimension d".into()))?;
                QSpec::zeros(d)
            }
            QField::Keyword(word) => {
                return Err(Error::InvalidScenario(format!("unknown q keyword {word:?} (expected \"zeros\")")))
            }
            QField::Rows(rows) => {
                let m = rows.to_matrix("q")?;
                QSpec::new(m).map_err(|e| Error::InvalidScenario(format!("q: {e}")))?
            }
        };
        Ok(Some(spec))
    }

    /// The deformation tensor from either `q` or `tensor`.
    pub fn deformation(&self) -> Result<DeformationTensor> {
        if let Some(spec) = self.qspec()? {
            return Ok(DeformationTensor::from_q(&spec));
        }
        let rows = self
            .tensor
            .as_ref()
            .ok_or_else(|| Error::InvalidScenario(format!("kind {} needs q or tensor", self.kind)))?;
        DeformationTensor::new(rows.to_matrix("tensor")?).map_err(|e| Error::InvalidScenario(format!("tensor: {e}")))
    }

    /// Dimension `d` of `H`, from the explicit field or from the deformation.
    pub fn dim(&self) -> Result<usize> {
        match (self.d, self.q.is_some() || self.tensor.is_some()) {
            (Some(d), _) => Ok(d),
            (None, true) => Ok(self.deformation()?.dim()),
            (None, false) => Err(Error::InvalidScenario("dimension d is missing".into())),
        }
    }

    /// Word with 0-based letters.
    pub fn word0(&self) -> Option<Vec<usize>> {
        self.word.as_ref().map(|w| w.iter().map(|&i| i.wrapping_sub(1)).collect())
    }

    /// Checks the invariants that do not need a pipeline run.
    pub fn validate(&self) -> Result<()> {
        if self.kind.needs_group() {
            self.coxeter_matrix()?;
        }
        if self.kind.needs_deformation() {
            match (&self.q, &self.tensor) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidScenario("give exactly one of q and tensor, not both".into()))
                }
                (None, None) => return Err(Error::InvalidScenario(format!("kind {} needs q or tensor", self.kind))),
                _ => {}
            }
            let t = self.deformation()?;
            if let Some(d) = self.d {
                if d != t.dim() {
                    return Err(Error::InvalidScenario(format!(
                        "d = {d} but the deformation acts on dimension {}",
                        t.dim()
                    )));
                }
            }
        } else if self.q.is_some() {
            let spec = self.qspec()?.expect("q present");
            if let Some(d) = self.d {
                if d != spec.dim() {
                    return Err(Error::InvalidScenario(format!("d = {d} but q is {0}x{0}", spec.dim())));
                }
            }
        }
        if self.kind == Kind::Wick {
            if self.tensor.is_some() {
                return Err(Error::InvalidScenario(
                    "wick needs q; moments of a general tensor come from the fock kind".into(),
                ));
            }
            let d = self.dim()?;
            if let Some(word) = &self.word {
                if let Some(&bad) = word.iter().find(|&&i| i == 0 || i > d) {
                    return Err(Error::InvalidScenario(format!("word letter {bad} outside 1..={d}")));
                }
            }
        }
        if self.kind == Kind::Opspace {
            let d = self.dim()?;
            if let Some(m) = self.m {
                if m == 0 || m > d {
                    return Err(Error::InvalidScenario(format!("m = {m} outside 1..={d}")));
                }
            }
            if self.aux_dim == Some(0) {
                return Err(Error::InvalidScenario("aux_dim must be positive".into()));
            }
        }
        if let Some(s) = self.scalar {
            if !s.is_finite() || s.abs() > 1.0 {
                return Err(Error::InvalidScenario(format!("scalar {s} outside [-1, 1]")));
            }
        }
        Ok(())
    }
}

/// Reads and validates a scenario file.
pub fn parse_spec(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path)?;
    ScenarioSpec::from_toml(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_fock_spec() {
        let spec = ScenarioSpec::from_toml("kind = \"fock\"\nd = 2\nq = \"zeros\"\n").unwrap();
        assert_eq!(spec.levels, DEFAULT_LEVELS);
        assert_eq!(spec.seed, 0);
        assert_eq!(spec.qspec().unwrap().unwrap(), QSpec::zeros(2));
    }

    #[test]
    fn non_hermitian_q_rejected() {
        let text = r#"
kind = "fock"
[q]
re = [[0.0, 0.3], [0.2, 0.0]]
"#;
        let err = ScenarioSpec::from_toml(text).unwrap_err();
        assert!(matches!(err, Error::InvalidScenario(_)));
        assert!(err.to_string().contains("Hermitian symmetry"), "{err}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = ScenarioSpec::from_toml("kind = \"fock\"\nd = [\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("line"), "{err}");
        let err = ScenarioSpec::from_toml("kind = \"fock\"\nbogus = 1\nq = \"zeros\"\nd = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn group_by_name_and_matrix() {
        let spec = ScenarioSpec::from_toml("kind = \"positivity\"\ngroup = \"A3\"\n").unwrap();
        assert_eq!(spec.coxeter_matrix().unwrap(), CoxeterMatrix::type_a(3));
        let spec = ScenarioSpec::from_toml("kind = \"coxeter\"\ngroup = [[1, 3], [3, 1]]\n").unwrap();
        assert_eq!(spec.coxeter_matrix().unwrap(), CoxeterMatrix::type_a(2));
        assert!(ScenarioSpec::from_toml("kind = \"coxeter\"\n").is_err());
        assert!(ScenarioSpec::from_toml("kind = \"coxeter\"\ngroup = \"Z9\"\n").is_err());
    }

    #[test]
    fn exactly_one_deformation() {
        let text = "kind = \"fock\"\nd = 1\nq = \"zeros\"\n[tensor]\nre = [[0.0]]\n";
        assert!(ScenarioSpec::from_toml(text).is_err());
        assert!(ScenarioSpec::from_toml("kind = \"fock\"\nd = 1\n").is_err());
    }

    #[test]
    fn dimension_consistency() {
        let text = "kind = \"fock\"\nd = 3\n[q]\nre = [[0.1, 0.0], [0.0, 0.1]]\n";
        assert!(ScenarioSpec::from_toml(text).is_err());
        let text = "kind = \"wick\"\nword = [1, 3]\n[q]\nre = [[0.1, 0.0], [0.0, 0.1]]\n";
        assert!(ScenarioSpec::from_toml(text).is_err());
    }

    #[test]
    fn complex_rows_round_trip() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = C64::new(0.25, -0.5);
        m[(1, 0)] = C64::new(0.25, 0.5);
        let rows = ComplexRows::from_matrix(&m);
        assert_eq!(rows.to_matrix("q").unwrap(), m);
        assert!(ComplexRows::from_matrix(&CMat::zeros(1, 1)).im.is_none());
    }

    #[test]
    fn kind_names() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
        }
        assert!("plot".parse::<Kind>().is_err());
    }
}
