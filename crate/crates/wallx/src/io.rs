//! JSON interchange for stability data.
//!
//! ```json
//! {
//!   "pairing": [[0, 1], [-1, 0]],
//!   "height": 6,
//!   "charge": [{"gamma": [1, 0], "re": 0, "im": 1}, {"gamma": [0, 1], "re": 1, "im": 0}],
//!   "rays": [{"gamma": [1, 0], "omega": 1}, {"gamma": [0, 1], "omega": 1}],
//!   "new_charge": [{"gamma": [1, 0], "re": 1, "im": 0}, {"gamma": [0, 1], "re": 0, "im": 1}]
//! }
//! ```
//!
//! The charge gammas are the generators `S`. Rationals are integers or strings like `"3/4"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WallxError};
use crate::lattice_groupoid::{make_induced_groupoid, Cocycle, GroupoidMorphism, IntMatrix, LatticeMap};
use crate::scalar::{parse_q, GaussianRational, Poly, RatFunc, Q};
use crate::stability_engine::{dilog_ray, CentralCharge, Sector, StabilityData, TruncatedAlgebra};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Int(i64),
    Text(String),
}

impl Rational {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            Rational::Int(n) => Ok(Q::from_integer((*n).into())),
            Rational::Text(s) => parse_q(s),
        }
    }

    pub fn from_q(q: &Q) -> Self {
        match (q.is_integer(), num_traits::ToPrimitive::to_i64(q.numer())) {
            (true, Some(n)) => Rational::Int(n),
            _ => Rational::Text(q.to_string()),
        }
    }
}

/// `num / den` as coefficient lists in `t = L^{1/2}`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatFuncJson {
    pub num: Vec<Rational>,
    #[serde(default = "one_den")]
    pub den: Vec<Rational>,
}

fn one_den() -> Vec<Rational> {
    vec![Rational::Int(1)]
}

impl RatFuncJson {
    pub fn to_ratfunc(&self) -> Result<RatFunc> {
        let poly = |v: &[Rational]| -> Result<Poly> { Ok(Poly::from_coeffs(v.iter().map(|r| r.to_q()).collect::<Result<_>>()?)) };
        let den = poly(&self.den)?;
        if den.is_zero() {
            return Err(WallxError::Parse("zero denominator".into()));
        }
        Ok(RatFunc::new(poly(&self.num)?, den))
    }

    pub fn from_ratfunc(c: &RatFunc) -> Self {
        let list = |p: &Poly| p.coeffs().iter().map(Rational::from_q).collect();
        Self { num: list(c.numerator()), den: list(c.denominator()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CocycleJson {
    ConstantOne,
    BilinearSign { pairing: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub phi: Vec<Vec<i64>>,
    pub objects: Vec<Vec<i64>>,
    #[serde(default)]
    pub cocycle: Option<CocycleJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeJson {
    pub gamma: Vec<i64>,
    pub re: Rational,
    pub im: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub gamma: Vec<i64>,
    #[serde(default)]
    pub src: usize,
    #[serde(default)]
    pub tgt: usize,
    pub coeff: RatFuncJson,
}

/// Dilogarithm data `Ω ψ_k` on the multiples of `gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayJson {
    pub gamma: Vec<i64>,
    #[serde(default)]
    pub src: usize,
    #[serde(default)]
    pub tgt: usize,
    pub omega: i64,
}

/// `[start, end)` in units of π.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorJson {
    pub start: Rational,
    pub end: Rational,
}

fn default_height() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groupoid: Option<GroupoidJson>,
    pub pairing: Vec<Vec<i64>>,
    #[serde(default = "default_height")]
    pub height: usize,
    pub charge: Vec<ChargeJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rays: Vec<RayJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_charge: Option<Vec<ChargeJson>>,
}

/// Parsed input: the data with its optional sector and target charge.
#[derive(Clone, Debug)]
pub struct StabilityInput {
    pub data: StabilityData,
    pub sector: Option<Sector>,
    pub new_charge: Option<CentralCharge>,
}

fn charge_of(generators: &[Vec<i64>], cs: &[ChargeJson]) -> Result<CentralCharge> {
    let mut values = Vec::new();
    for g in generators {
        let c = cs
            .iter()
            .find(|c| &c.gamma == g)
            .ok_or_else(|| WallxError::Parse(format!("no charge value for generator {g:?}")))?;
        values.push(GaussianRational::new(c.re.to_q()?, c.im.to_q()?));
    }
    Ok(CentralCharge::new(values))
}

impl StabilityJson {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| WallxError::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<StabilityInput> {
        let pairing = IntMatrix::from_rows(self.pairing.clone())?;
        let generators: Vec<Vec<i64>> = self.charge.iter().map(|c| c.gamma.clone()).collect();
        let algebra = match &self.groupoid {
            None => TruncatedAlgebra::torus(pairing, generators.clone(), self.height)?,
            Some(g) => {
                let phi = LatticeMap::from_rows(g.phi.clone(), pairing.cols)?;
                let groupoid = make_induced_groupoid(phi, g.objects.clone())?;
                let cocycle = match &g.cocycle {
                    None | Some(CocycleJson::ConstantOne) => Cocycle::ConstantOne,
                    Some(CocycleJson::BilinearSign { pairing }) => {
                        Cocycle::BilinearSign { pairing: IntMatrix::from_rows(pairing.clone())? }
                    }
                };
                TruncatedAlgebra::new(groupoid, pairing, cocycle, generators.clone(), self.height)?
            }
        };
        let charge = charge_of(&generators, &self.charge)?;
        let mut a: BTreeMap<GroupoidMorphism, RatFunc> = BTreeMap::new();
        for t in &self.a {
            let g = GroupoidMorphism::new(t.src, t.tgt, t.gamma.clone());
            let c = t.coeff.to_ratfunc()?;
            let slot = a.entry(g).or_insert_with(RatFunc::zero);
            *slot = slot.clone() + c;
        }
        for r in &self.rays {
            for (g, c) in dilog_ray(&algebra, r.src, r.tgt, &r.gamma, r.omega)? {
                let slot = a.entry(g).or_insert_with(RatFunc::zero);
                *slot = slot.clone() + c;
            }
        }
        let sector = match &self.sector {
            Some(s) => Some(Sector::from_angles(&s.start.to_q()?, &s.end.to_q()?)?),
            None => None,
        };
        let new_charge = match &self.new_charge {
            Some(cs) => Some(charge_of(&generators, cs)?),
            None => None,
        };
        Ok(StabilityInput { data: StabilityData::new(algebra, charge, a)?, sector, new_charge })
    }
}

pub fn charge_json(alg: &TruncatedAlgebra, z: &CentralCharge) -> Vec<ChargeJson> {
    alg.generators
        .iter()
        .zip(&z.values)
        .map(|(g, v)| ChargeJson { gamma: g.clone(), re: Rational::from_q(&v.re), im: Rational::from_q(&v.im) })
        .collect()
}

pub fn terms_json(a: &BTreeMap<GroupoidMorphism, RatFunc>) -> Vec<TermJson> {
    a.iter()
        .map(|(g, c)| TermJson { gamma: g.vec.clone(), src: g.src, tgt: g.tgt, coeff: RatFuncJson::from_ratfunc(c) })
        .collect()
}

/// Rewrite `template` with the charge and explicit `a` of `data`.
pub fn to_json(template: &StabilityJson, data: &StabilityData) -> StabilityJson {
    StabilityJson {
        groupoid: template.groupoid.clone(),
        pairing: template.pairing.clone(),
        height: data.algebra.height,
        charge: charge_json(&data.algebra, &data.charge),
        a: terms_json(&data.a),
        rays: Vec::new(),
        sector: None,
        new_charge: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability_engine::{extract_spectrum, wall_cross};

    const PENTAGON: &str = r#"{
        "pairing": [[0, 1], [-1, 0]],
        "height": 3,
        "charge": [{"gamma": [1, 0], "re": 0, "im": 1}, {"gamma": [0, 1], "re": 1, "im": 0}],
        "rays": [{"gamma": [1, 0], "omega": 1}, {"gamma": [0, 1], "omega": 1}],
        "sector": {"start": "-1/8", "end": "5/8"},
        "new_charge": [{"gamma": [1, 0], "re": 1, "im": 0}, {"gamma": [0, 1], "re": 0, "im": "1"}]
    }"#;

    #[test]
    fn pentagon_roundtrip() {
        let j = StabilityJson::parse(PENTAGON).unwrap();
        let input = j.build().unwrap();
        assert!(input.sector.is_some());
        let out = wall_cross(&input.data, input.new_charge.as_ref().unwrap()).unwrap();
        let text = serde_json::to_string(&to_json(&j, &out)).unwrap();
        let back = StabilityJson::parse(&text).unwrap().build().unwrap();
        assert_eq!(back.data.a, out.a);
        assert_eq!(extract_spectrum(&back.data, None).unwrap().rays.len(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(StabilityJson::parse("{"), Err(WallxError::Parse(_))));
        let mut j = StabilityJson::parse(PENTAGON).unwrap();
        j.charge[0].re = Rational::Text("x".into());
        assert!(matches!(j.build(), Err(WallxError::Parse(_))));
    }
}
