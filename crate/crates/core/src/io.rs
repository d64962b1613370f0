//! Fixture codecs: JSON records for every serializable type, with a version
//! tag, strict field checking, and lossless round trips.

use crate::distalg::{DistElt, MonElt};
use crate::error::{Error, Result};
use crate::groups::{GroupId, QuotKey, QuotientSpec, TorusElt};
use crate::norms::Region;
use crate::padic::{NormValue, PadicScalar, Rational, RhoExponent};
use crate::phimod::{SkewMatrix, SkewModule};
use crate::series::{AnalyticityClass, Certificate, LaurentSeries};
use crate::skewring::SkewElt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const FIXTURE_VERSION: u32 = 1;

/// Top-level wrapper carrying the version tag.
#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct Envelope<T> {
    pub version: u32,
    pub data: T,
}

pub fn encode<T: Serialize>(data: &T) -> Result<String> {
    let env = Envelope { version: FIXTURE_VERSION, data };
    serde_json::to_string_pretty(&env).map_err(|e| Error::ParseError {
        location: "<encode>".into(),
        message: e.to_string(),
    })
}

pub fn decode<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text).map_err(|e| Error::ParseError {
        location: format!("line {}", e.line()),
        message: e.to_string(),
    })?;
    if env.version != FIXTURE_VERSION {
        return Err(Error::ParseError {
            location: "version".into(),
            message: format!("fixture version {} is not supported (expected {FIXTURE_VERSION})", env.version),
        });
    }
    Ok(env.data)
}

/// {v, u (decimal string), N}; the certified zero is u = "0" with N = 0 and
/// v carrying the absolute precision.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ScalarDto {
    pub v: i64,
    pub u: String,
    #[serde(rename = "N")]
    pub n: u32,
}

impl ScalarDto {
    pub fn from_scalar(x: &PadicScalar) -> Self {
        match x.valuation() {
            Some(v) => ScalarDto { v, u: x.unit().expect("unit").to_string(), n: x.rel_prec() },
            None => ScalarDto { v: x.abs_prec(), u: "0".into(), n: 0 },
        }
    }

    pub fn to_scalar(&self, p: u64) -> Result<PadicScalar> {
        if self.u == "0" {
            return Ok(PadicScalar::zero(p, self.v));
        }
        let u: u128 = self.u.parse().map_err(|_| Error::ParseError {
            location: "u".into(),
            message: format!("bad unit digits {:?}", self.u),
        })?;
        if self.n == 0 {
            return Err(Error::ParseError {
                location: "N".into(),
                message: "nonzero scalar needs N >= 1".into(),
            });
        }
        Ok(PadicScalar::from_unit_parts(p, self.v, u, self.n))
    }
}

/// {exp_num, exp_den} or the literal "zero".
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum NormValueDto {
    Zero(String),
    Val { exp_num: i64, exp_den: i64 },
}

impl NormValueDto {
    pub fn from_norm(v: &NormValue) -> Self {
        match v.exponent() {
            None => NormValueDto::Zero("zero".into()),
            Some(e) => NormValueDto::Val { exp_num: *e.numer(), exp_den: *e.denom() },
        }
    }

    pub fn to_norm(&self) -> Result<NormValue> {
        match self {
            NormValueDto::Zero(s) if s == "zero" => Ok(NormValue::Zero),
            NormValueDto::Zero(s) => Err(Error::ParseError {
                location: "norm".into(),
                message: format!("unknown norm literal {s:?}"),
            }),
            NormValueDto::Val { exp_num, exp_den } => {
                if *exp_den == 0 {
                    return Err(Error::ParseError {
                        location: "exp_den".into(),
                        message: "zero denominator".into(),
                    });
                }
                Ok(NormValue::from_exponent(Rational::new(*exp_num, *exp_den)))
            }
        }
    }
}

fn class_name(c: AnalyticityClass) -> &'static str {
    match c {
        AnalyticityClass::Iwasawa => "Iwasawa",
        AnalyticityClass::OE => "OE",
        AnalyticityClass::OEdagger => "OEdagger",
        AnalyticityClass::Edagger => "Edagger",
        AnalyticityClass::Robba => "Robba",
    }
}

fn class_of_name(s: &str) -> Result<AnalyticityClass> {
    Ok(match s {
        "Iwasawa" => AnalyticityClass::Iwasawa,
        "OE" => AnalyticityClass::OE,
        "OEdagger" => AnalyticityClass::OEdagger,
        "Edagger" => AnalyticityClass::Edagger,
        "Robba" => AnalyticityClass::Robba,
        other => {
            return Err(Error::ParseError {
                location: "class".into(),
                message: format!("unknown analyticity class {other:?}"),
            })
        }
    })
}

/// Series record with decimal-string exponent keys; absent keys are zero.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SeriesDto {
    pub p: u64,
    pub prec: i64,
    pub window: [i64; 2],
    pub coeffs: BTreeMap<String, ScalarDto>,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radius: Option<[i64; 2]>,
}

impl SeriesDto {
    pub fn from_series(f: &LaurentSeries) -> Self {
        let (lo, hi) = f.window();
        let mut coeffs = BTreeMap::new();
        for (e, c) in f.support() {
            coeffs.insert(e.to_string(), ScalarDto::from_scalar(c));
        }
        let cert = f.certificate();
        SeriesDto {
            p: f.prime(),
            prec: f.prec_floor(),
            window: [lo, hi],
            coeffs,
            class: class_name(cert.class).into(),
            radius: cert.radius.map(|r| [*r.numer(), *r.denom()]),
        }
    }

    pub fn to_series(&self) -> Result<LaurentSeries> {
        let class = class_of_name(&self.class)?;
        let mut coeffs = BTreeMap::new();
        for (k, dto) in &self.coeffs {
            let e: i64 = k.parse().map_err(|_| Error::ParseError {
                location: format!("coeffs.{k}"),
                message: format!("malformed exponent key {k:?}"),
            })?;
            coeffs.insert(e, dto.to_scalar(self.p)?);
        }
        let cert = Certificate {
            class,
            radius: match self.radius {
                Some([num, den]) if den != 0 => Some(Rational::new(num, den)),
                Some(_) => {
                    return Err(Error::ParseError {
                        location: "radius".into(),
                        message: "zero denominator".into(),
                    })
                }
                None => None,
            },
        };
        LaurentSeries::from_coeffs(self.p, self.prec, cert, self.window[0], self.window[1], coeffs)
    }
}

fn group_name(g: GroupId) -> &'static str {
    match g {
        GroupId::Gl2 => "GL2",
        GroupId::Gl3 => "GL3",
    }
}

pub fn group_of_name(s: &str) -> Result<GroupId> {
    Ok(match s {
        "GL2" => GroupId::Gl2,
        "GL3" => GroupId::Gl3,
        other => {
            return Err(Error::ParseError {
                location: "group".into(),
                message: format!("unknown group {other:?}"),
            })
        }
    })
}

/// Skew element: {"group", "level", "p", "terms":[{"key":[…], "series":…}]}.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SkewDto {
    pub group: String,
    pub p: u64,
    pub level: u32,
    pub terms: Vec<SkewTermDto>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SkewTermDto {
    pub key: Vec<u64>,
    pub series: SeriesDto,
}

impl SkewDto {
    pub fn from_skew(x: &SkewElt) -> Self {
        let spec = x.spec();
        SkewDto {
            group: group_name(spec.group).into(),
            p: spec.p,
            level: spec.level,
            terms: x
                .terms()
                .map(|(k, r)| SkewTermDto { key: k.0.clone(), series: SeriesDto::from_series(r) })
                .collect(),
        }
    }

    pub fn to_skew(&self) -> Result<SkewElt> {
        let group = group_of_name(&self.group)?;
        let spec = QuotientSpec::new(group, self.p, self.level)?;
        let mut out = SkewElt::zero(spec.clone());
        for term in &self.terms {
            let series = term.series.to_series()?;
            out = out.add(&SkewElt::from_term(spec.clone(), QuotKey(term.key.clone()), series))?;
        }
        Ok(out)
    }
}

/// Torus element as a sequence of scalar records.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct TorusDto {
    pub p: u64,
    pub entries: Vec<ScalarDto>,
}

impl TorusDto {
    pub fn from_torus(t: &TorusElt) -> Self {
        TorusDto {
            p: t.prime(),
            entries: t.entries().iter().map(ScalarDto::from_scalar).collect(),
        }
    }

    pub fn to_torus(&self) -> Result<TorusElt> {
        let entries =
            self.entries.iter().map(|d| d.to_scalar(self.p)).collect::<Result<Vec<_>>>()?;
        TorusElt::new(self.p, entries)
    }
}

/// Distribution element with an explicit representation tag; fixtures may
/// store both representations for cross-validation.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct DistDto {
    pub rep: String,
    pub group: String,
    pub p: u64,
    pub level: u32,
    pub prec: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group_terms: Option<Vec<DistTermDto>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monomial_terms: Option<Vec<MonTermDto>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct DistTermDto {
    pub coords: Vec<i64>,
    pub c: ScalarDto,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct MonTermDto {
    pub exps: Vec<i64>,
    pub c: ScalarDto,
}

impl DistDto {
    pub fn from_dist(x: &DistElt) -> Self {
        DistDto {
            rep: "group".into(),
            group: group_name(x.group()).into(),
            p: x.prime(),
            level: x.level(),
            prec: x.prec(),
            group_terms: Some(
                x.terms()
                    .map(|(g, c)| DistTermDto {
                        coords: g.iter().map(|&x| x as i64).collect(),
                        c: ScalarDto::from_scalar(c),
                    })
                    .collect(),
            ),
            monomial_terms: None,
        }
    }

    pub fn from_mon(x: &MonElt, level: u32) -> Self {
        DistDto {
            rep: "monomial".into(),
            group: group_name(x.group()).into(),
            p: x.prime(),
            level,
            prec: x.prec(),
            group_terms: None,
            monomial_terms: Some(
                x.terms()
                    .map(|(k, c)| MonTermDto { exps: k.clone(), c: ScalarDto::from_scalar(c) })
                    .collect(),
            ),
        }
    }

    /// Both representations in one record; decoders can cross-validate.
    pub fn from_both(x: &DistElt, mon: &MonElt) -> Self {
        let mut dto = Self::from_dist(x);
        dto.rep = "both".into();
        dto.monomial_terms = Some(
            mon.terms()
                .map(|(k, c)| MonTermDto { exps: k.clone(), c: ScalarDto::from_scalar(c) })
                .collect(),
        );
        dto
    }

    pub fn to_dist(&self) -> Result<DistElt> {
        let group = group_of_name(&self.group)?;
        if self.rep == "both" && (self.group_terms.is_none() || self.monomial_terms.is_none()) {
            return Err(Error::ParseError {
                location: "rep".into(),
                message: "rep \"both\" requires group_terms and monomial_terms".into(),
            });
        }
        let terms = self.group_terms.as_ref().ok_or_else(|| Error::ParseError {
            location: "group_terms".into(),
            message: "group representation requested but absent".into(),
        })?;
        let mut out = DistElt::zero(group, self.p, self.level, self.prec);
        for t in terms {
            let c = t.c.to_scalar(self.p)?;
            let coords = t.coords.iter().map(|&x| x as i128).collect();
            let acc = out.coeff(&coords).add(&c)?;
            out.set_coeff(coords, acc);
        }
        Ok(out)
    }

    pub fn to_mon(&self) -> Result<MonElt> {
        let group = group_of_name(&self.group)?;
        let terms = self.monomial_terms.as_ref().ok_or_else(|| Error::ParseError {
            location: "monomial_terms".into(),
            message: "monomial representation requested but absent".into(),
        })?;
        let mut coeffs = BTreeMap::new();
        for t in terms {
            coeffs.insert(t.exps.clone(), t.c.to_scalar(self.p)?);
        }
        MonElt::from_coeffs(group, self.p, self.prec, coeffs)
    }
}

/// Module fixture: {"rank", "level", "phi_matrix", "actions"}.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ModuleDto {
    pub group: String,
    pub p: u64,
    pub level: u32,
    pub rank: usize,
    pub phi_matrix: Vec<Vec<SkewDto>>,
    #[serde(default)]
    pub actions: Vec<ActionDto>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ActionDto {
    /// diagonal valuations of the torus element (p-power entries)
    pub t_valuations: Vec<i64>,
    pub matrix: Vec<Vec<SkewDto>>,
}

impl ModuleDto {
    pub fn from_module(m: &SkewModule) -> Self {
        let mat = |mm: &SkewMatrix| -> Vec<Vec<SkewDto>> {
            mm.iter().map(|r| r.iter().map(SkewDto::from_skew).collect()).collect()
        };
        ModuleDto {
            group: group_name(m.spec.group).into(),
            p: m.spec.p,
            level: m.spec.level,
            rank: m.rank,
            phi_matrix: mat(&m.phi),
            actions: m
                .actions
                .iter()
                .map(|(t, q)| ActionDto {
                    t_valuations: t
                        .entries()
                        .iter()
                        .map(|e| e.valuation().unwrap_or(0))
                        .collect(),
                    matrix: mat(q),
                })
                .collect(),
        }
    }

    pub fn to_module(&self) -> Result<SkewModule> {
        let group = group_of_name(&self.group)?;
        let spec = QuotientSpec::new(group, self.p, self.level)?;
        let conv = |rows: &Vec<Vec<SkewDto>>| -> Result<SkewMatrix> {
            rows.iter().map(|r| r.iter().map(|d| d.to_skew()).collect()).collect()
        };
        let phi = conv(&self.phi_matrix)?;
        if phi.len() != self.rank || phi.iter().any(|r| r.len() != self.rank) {
            return Err(Error::ParseError {
                location: "phi_matrix".into(),
                message: "matrix shape does not match the declared rank".into(),
            });
        }
        let mut m = SkewModule::new(spec, phi)?;
        for a in &self.actions {
            let t = TorusElt::from_valuations(self.p, &a.t_valuations, 8);
            m.actions.push((t, conv(&a.matrix)?));
        }
        Ok(m)
    }
}

/// Region record {rho2_num, rho2_den, r}.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct RegionDto {
    pub rho2_num: i64,
    pub rho2_den: i64,
    pub r: i64,
}

impl RegionDto {
    pub fn from_region(reg: &Region) -> Self {
        let e = reg.rho2.exponent();
        RegionDto { rho2_num: *e.numer(), rho2_den: *e.denom(), r: reg.r }
    }

    pub fn to_region(&self) -> Result<Region> {
        Region::new(RhoExponent::from_parts(self.rho2_num, self.rho2_den)?, self.r)
    }
}

/// Machine-readable norm-table row {n, exp_num, exp_den} (or zero).
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct NormRowDto {
    pub n: i64,
    pub value: NormValueDto,
}
