//! JSON shapes for metrics, structure constants and reports.

use anomaly_core::algebra::{GroupKind, StructureConstants};
use anomaly_core::analysis::{SpectrumReport, Stability, StationaryClass, StationaryReport};
use anomaly_core::geometry::{FourForm22, HermitianMetric};
use anomaly_core::linalg::Mat3;
use anomaly_core::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DtoError {
    #[error("unknown group kind {0:?} (expected abelian, nilpotent, solvable or sl2c)")]
    UnknownKind(String),
    #[error("structure constant index ({d}, {a}, {b}) out of range 1..=3")]
    IndexOutOfRange { d: usize, a: usize, b: usize },
    #[error("structure constant c^{d}_{{{a}{b}}} given twice")]
    Duplicate { d: usize, a: usize, b: usize },
    #[error("entries do not match the cataloged {0} structure constants")]
    KindMismatch(String),
    #[error(transparent)]
    Core(#[from] anomaly_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDto {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<C64> for ComplexDto {
    fn from(z: C64) -> Self {
        ComplexDto { re: z.re, im: z.im }
    }
}

impl From<ComplexDto> for C64 {
    fn from(z: ComplexDto) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Row-major `g_{\bar a b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricDto(pub [[ComplexDto; 3]; 3]);

impl MetricDto {
    pub fn to_matrix(&self) -> Mat3 {
        self.0.map(|row| row.map(C64::from))
    }

    pub fn to_metric(&self) -> Result<HermitianMetric, DtoError> {
        Ok(HermitianMetric::new(self.to_matrix())?)
    }
}

impl From<&HermitianMetric> for MetricDto {
    fn from(g: &HermitianMetric) -> Self {
        MetricDto(g.matrix().map(|row| row.map(ComplexDto::from)))
    }
}

pub fn kind_from_name(name: &str) -> Result<GroupKind, DtoError> {
    GroupKind::ALL
        .into_iter()
        .find(|k| k.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| DtoError::UnknownKind(name.to_string()))
}

/// `c^d_{ab}` with 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDto {
    pub d: usize,
    pub a: usize,
    pub b: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Nonzero structure constants; a bracket `[e_a, e_b]` lists both orderings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConstantsDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub entries: Vec<EntryDto>,
}

impl StructureConstantsDto {
    pub fn to_constants(&self) -> Result<StructureConstants, DtoError> {
        let mut raw = [[[C64::new(0.0, 0.0); 3]; 3]; 3];
        let mut seen = [[[false; 3]; 3]; 3];
        for e in &self.entries {
            if !(1..=3).contains(&e.d) || !(1..=3).contains(&e.a) || !(1..=3).contains(&e.b) {
                return Err(DtoError::IndexOutOfRange { d: e.d, a: e.a, b: e.b });
            }
            let (d, a, b) = (e.d - 1, e.a - 1, e.b - 1);
            if seen[d][a][b] {
                return Err(DtoError::Duplicate { d: e.d, a: e.a, b: e.b });
            }
            seen[d][a][b] = true;
            raw[d][a][b] = C64::new(e.re, e.im);
        }
        let c = StructureConstants::try_new(raw, anomaly_core::DEFAULT_TOL)?;
        match &self.kind {
            Some(name) => {
                let kind = kind_from_name(name)?;
                let cataloged = anomaly_core::algebra::catalog(kind);
                if cataloged.max_abs_diff(&c) <= anomaly_core::DEFAULT_TOL {
                    Ok(cataloged)
                } else {
                    Err(DtoError::KindMismatch(name.clone()))
                }
            }
            None => Ok(c),
        }
    }
}

impl From<&StructureConstants> for StructureConstantsDto {
    fn from(c: &StructureConstants) -> Self {
        StructureConstantsDto {
            kind: c.kind().map(|k| k.name().to_string()),
            entries: c
                .nonzero_entries()
                .map(|(d, a, b, z)| EntryDto { d: d + 1, a: a + 1, b: b + 1, re: z.re, im: z.im })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryReportDto {
    pub metric: MetricDto,
    pub rhs_norm: f64,
    pub classification: &'static str,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solvable_stationary: Option<bool>,
}

pub fn class_name(c: StationaryClass) -> &'static str {
    match c {
        StationaryClass::SolvableFamily => "SolvableFamily",
        StationaryClass::Sl2cUnique => "SL2CUnique",
        StationaryClass::AbelianAny => "AbelianAny",
        StationaryClass::None => "None",
    }
}

impl From<&StationaryReport> for StationaryReportDto {
    fn from(r: &StationaryReport) -> Self {
        StationaryReportDto {
            metric: MetricDto::from(&r.metric),
            rhs_norm: r.rhs_norm,
            classification: class_name(r.classification),
            converged: r.converged,
            iterations: r.iterations,
            warning: r.warning,
            solvable_stationary: None,
        }
    }
}

pub fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::AsymptoticallyStable => "AsymptoticallyStable",
        Stability::Unstable => "Unstable",
        Stability::Marginal => "Marginal",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReportDto {
    pub coordinates: Vec<&'static str>,
    pub jacobian: Vec<Vec<f64>>,
    pub eigenvalues: Vec<ComplexDto>,
    pub stability: &'static str,
    pub rhs_norm: f64,
}

impl From<&SpectrumReport> for SpectrumReportDto {
    fn from(r: &SpectrumReport) -> Self {
        SpectrumReportDto {
            coordinates: anomaly_core::flow::COORD_NAMES.to_vec(),
            jacobian: r.jacobian.rows(),
            eigenvalues: r.eigenvalues.iter().copied().map(ComplexDto::from).collect(),
            stability: stability_name(r.stability),
            rhs_norm: r.rhs_norm,
        }
    }
}

/// `F[a][b][c][d]` as nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourFormDto(pub Vec<Vec<Vec<Vec<ComplexDto>>>>);

impl From<&FourForm22> for FourFormDto {
    fn from(f: &FourForm22) -> Self {
        FourFormDto(
            f.as_array()
                .iter()
                .map(|x| x.iter().map(|y| y.iter().map(|z| z.iter().map(|&w| w.into()).collect()).collect()).collect())
                .collect(),
        )
    }
}

impl FourFormDto {
    pub fn to_form(&self) -> Option<FourForm22> {
        let mut raw = [[[[C64::new(0.0, 0.0); 3]; 3]; 3]; 3];
        if self.0.len() != 3 {
            return None;
        }
        for (a, x) in self.0.iter().enumerate() {
            for (b, y) in x.iter().enumerate().take(3) {
                for (c, z) in y.iter().enumerate().take(3) {
                    if x.len() != 3 || y.len() != 3 || z.len() != 3 {
                        return None;
                    }
                    for (d, w) in z.iter().enumerate() {
                        raw[a][b][c][d] = (*w).into();
                    }
                }
            }
        }
        Some(FourForm22::from_raw(&raw))
    }
}
