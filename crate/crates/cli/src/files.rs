//! On-disk formats. Every artifact is one JSON document with a `format`
//! tag and a `version`; all numbers inside are rationals in `p/q` text.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use nefcone::cone::{Ambient, AmbientKind, ConeH, ElimCounts, Generators};
use nefcone::engine::{FiltrationReport, Mode, StepRecord};
use nefcone::exactla::{decode_rat, encode_rat, integer_direction_i64, Rat};
use nefcone::lp::FarkasCertificate;

use crate::error::{CliError, CliResult};

pub const VERSION: u32 = 1;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

pub fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, to_text(value)).map_err(|e| CliError::io(path, e))
}

fn check_header(format: &str, version: u32, expected: &str) -> CliResult<()> {
    if format != expected {
        return Err(CliError::Config(format!("expected a {expected} document, found {format:?}")));
    }
    if version != VERSION {
        return Err(CliError::Config(format!("unsupported {expected} version {version}")));
    }
    Ok(())
}

pub fn encode_ints(v: &[i64]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn decode_rats(v: &[String]) -> CliResult<Vec<Rat>> {
    v.iter().map(|s| decode_rat(s).map_err(CliError::config)).collect()
}

/// Integer entries; any `p/q` with `q != 1` is rejected.
pub fn decode_ints(v: &[String]) -> CliResult<Vec<i64>> {
    decode_rats(v)?
        .into_iter()
        .map(|r| {
            if !r.is_integer() {
                return Err(CliError::Config(format!("expected an integer, found {}", encode_rat(&r))));
            }
            i64::try_from(r.to_integer()).map_err(|_| CliError::Config("integer out of range".into()))
        })
        .collect()
}

pub fn encode_rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(encode_rat).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorsFile {
    pub rays: Vec<Vec<String>>,
    pub lines: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeFile {
    pub format: String,
    pub version: u32,
    pub n: Option<usize>,
    pub ambient_kind: String,
    pub labels: Vec<String>,
    pub forms: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorsFile>,
}

impl ConeFile {
    pub const FORMAT: &'static str = "nefcone-cone";

    pub fn from_cone(cone: &ConeH, with_generators: bool) -> Self {
        let amb = cone.ambient();
        let generators = if with_generators {
            cone.generators().map(|g| GeneratorsFile {
                rays: g.rays.iter().map(|r| encode_ints(r)).collect(),
                lines: g.lines.iter().map(|l| encode_ints(l)).collect(),
            })
        } else {
            None
        };
        ConeFile {
            format: Self::FORMAT.into(),
            version: VERSION,
            n: amb.n(),
            ambient_kind: amb.kind().as_str().into(),
            labels: amb.labels().to_vec(),
            forms: cone.forms().iter().map(|f| encode_ints(f.coeffs())).collect(),
            generators,
        }
    }

    pub fn to_cone(&self) -> CliResult<ConeH> {
        check_header(&self.format, self.version, Self::FORMAT)?;
        let kind = AmbientKind::parse(&self.ambient_kind).map_err(CliError::config)?;
        let ambient = Ambient::new(self.n, kind, self.labels.clone());
        self.to_cone_in(ambient)
    }

    /// Reads the forms into an existing ambient, which must carry the same
    /// labels.
    pub fn to_cone_in(&self, ambient: Arc<Ambient>) -> CliResult<ConeH> {
        check_header(&self.format, self.version, Self::FORMAT)?;
        if ambient.labels() != self.labels.as_slice() || ambient.n() != self.n {
            return Err(CliError::Config("cone file coordinates do not match".into()));
        }
        let forms = self.forms.iter().map(|f| decode_ints(f)).collect::<CliResult<Vec<_>>>()?;
        let cone = ConeH::new(ambient, forms).map_err(CliError::config)?;
        if cone.len() != self.forms.len() {
            return Err(CliError::Config("cone file forms are not canonical".into()));
        }
        match &self.generators {
            None => Ok(cone),
            Some(g) => {
                let gens = Generators {
                    rays: g.rays.iter().map(|r| decode_ints(r)).collect::<CliResult<_>>()?,
                    lines: g.lines.iter().map(|l| decode_ints(l)).collect::<CliResult<_>>()?,
                };
                cone.with_generators(gens).map_err(CliError::config)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFile {
    pub step: usize,
    pub generator: Option<String>,
    pub raw: Option<usize>,
    pub zero: Option<usize>,
    pub positive: Option<usize>,
    pub negative: Option<usize>,
    pub facets: usize,
    pub gamma: usize,
    pub enlarged: Option<usize>,
    pub violated: Vec<usize>,
}

impl StepFile {
    pub fn from_record(r: &StepRecord) -> Self {
        StepFile {
            step: r.step,
            generator: r.generator.clone(),
            raw: r.counts.map(|c| c.raw),
            zero: r.counts.map(|c| c.zero),
            positive: r.counts.map(|c| c.positive),
            negative: r.counts.map(|c| c.negative),
            facets: r.facets,
            gamma: r.gamma,
            enlarged: r.enlarged,
            violated: r.violated.clone(),
        }
    }

    pub fn to_record(&self) -> CliResult<StepRecord> {
        let counts = match (self.raw, self.zero, self.positive, self.negative) {
            (Some(raw), Some(zero), Some(positive), Some(negative)) => Some(ElimCounts {
                zero,
                positive,
                negative,
                raw,
            }),
            (None, None, None, None) => None,
            _ => return Err(CliError::Config(format!("step {} has partial counts", self.step))),
        };
        if self.violated.len() != self.gamma {
            return Err(CliError::Config(format!("step {} lists a wrong number of violated forms", self.step)));
        }
        Ok(StepRecord {
            step: self.step,
            generator: self.generator.clone(),
            counts,
            facets: self.facets,
            gamma: self.gamma,
            violated: self.violated.clone(),
            enlarged: self.enlarged,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub mode: String,
    pub outcome: String,
    pub steps: Vec<StepFile>,
}

impl ReportFile {
    pub const FORMAT: &'static str = "nefcone-report";

    pub fn from_report(r: &FiltrationReport) -> Self {
        ReportFile {
            format: Self::FORMAT.into(),
            version: VERSION,
            n: r.n,
            mode: r.mode.as_str().into(),
            outcome: r.outcome.as_str().into(),
            steps: r.steps.iter().map(StepFile::from_record).collect(),
        }
    }

    pub fn check(&self) -> CliResult<()> {
        check_header(&self.format, self.version, Self::FORMAT)?;
        Mode::parse(&self.mode).map_err(CliError::config)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    pub index: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format: String,
    pub version: u32,
    /// Index of the certified form in the outer cone.
    pub form: usize,
    pub target: Vec<String>,
    pub support: Vec<Multiplier>,
}

impl CertificateFile {
    pub const FORMAT: &'static str = "nefcone-certificate";

    pub fn new(form: usize, c: &FarkasCertificate) -> Self {
        CertificateFile {
            format: Self::FORMAT.into(),
            version: VERSION,
            form,
            target: encode_ints(&c.target),
            support: c
                .support
                .iter()
                .map(|(i, m)| Multiplier {
                    index: *i,
                    value: encode_rat(m),
                })
                .collect(),
        }
    }

    pub fn to_certificate(&self) -> CliResult<FarkasCertificate> {
        check_header(&self.format, self.version, Self::FORMAT)?;
        Ok(FarkasCertificate {
            target: decode_ints(&self.target)?,
            support: self
                .support
                .iter()
                .map(|m| Ok((m.index, decode_rat(&m.value).map_err(CliError::config)?)))
                .collect::<CliResult<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub formulation: String,
    pub proven: bool,
    pub inner: String,
    pub outer: String,
    pub certificates: Vec<String>,
    pub report: ReportFile,
}

impl ManifestFile {
    pub const FORMAT: &'static str = "nefcone-proof";

    pub fn check(&self) -> CliResult<()> {
        check_header(&self.format, self.version, Self::FORMAT)?;
        self.report.check()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub labels: Vec<String>,
}

impl LabelsFile {
    pub const BASIS: &'static str = "nefcone-basis";
    pub const INDEX: &'static str = "nefcone-index";

    pub fn new(format: &str, n: usize, labels: Vec<String>) -> Self {
        LabelsFile {
            format: format.into(),
            version: VERSION,
            n,
            labels,
        }
    }

    pub fn check(&self, format: &str) -> CliResult<()> {
        check_header(&self.format, self.version, format)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorsFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub labels: Vec<String>,
    pub vectors: Vec<Vec<String>>,
}

impl VectorsFile {
    pub const RELATIONS: &'static str = "nefcone-relations";
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub class: String,
    pub coordinates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub basis: Vec<String>,
    pub classes: Vec<Expansion>,
}

impl QuotientFile {
    pub const FORMAT: &'static str = "nefcone-quotient";
}

/// One entry of an order file: a candidate label, or an explicit vector in
/// the working coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderEntry {
    Label(String),
    Vector { label: String, vector: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderFile {
    pub format: String,
    pub version: u32,
    pub generators: Vec<OrderEntry>,
}

impl OrderFile {
    pub const FORMAT: &'static str = "nefcone-order";

    pub fn check(&self) -> CliResult<()> {
        check_header(&self.format, self.version, Self::FORMAT)
    }
}

/// Rational direction to primitive integers.
pub fn direction(v: &[String]) -> CliResult<Vec<i64>> {
    let r = decode_rats(v)?;
    if r.iter().all(Zero::is_zero) {
        return Err(CliError::Config("zero generator".into()));
    }
    integer_direction_i64(&r).map_err(CliError::config)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub labels: Vec<String>,
    pub values: Vec<String>,
}

impl DivisorFile {
    pub const FORMAT: &'static str = "nefcone-divisor";

    pub fn new(n: usize, labels: Vec<String>, values: &[Rat]) -> Self {
        DivisorFile {
            format: Self::FORMAT.into(),
            version: VERSION,
            n,
            labels,
            values: encode_rats(values),
        }
    }

    pub fn check(&self) -> CliResult<()> {
        check_header(&self.format, self.version, Self::FORMAT)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub b_nonnegative: bool,
    pub b_equals_a_plus_relations: bool,
    pub difference_in_relation_span: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub labels: Vec<String>,
    pub effective: bool,
    pub a: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Checks>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_checked: Option<bool>,
}

impl EffectiveFile {
    pub const FORMAT: &'static str = "nefcone-effective";
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateFile {
    pub format: String,
    pub version: u32,
    pub count: u64,
    pub depth: u32,
    pub bound: String,
}

impl EstimateFile {
    pub const FORMAT: &'static str = "nefcone-estimate";
}
