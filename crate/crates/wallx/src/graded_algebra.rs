//! Twisted groupoid algebra, its graded Lie bracket, the quantum torus, and
//! matrices over any [`Ring`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WallxError};
use crate::lattice_groupoid::{compose, Cocycle, GradingLattice, GroupoidMorphism, IntMatrix};
use crate::scalar::{LaurentScalar, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraTag {
    TwistedGroupoid,
    QuantumTorus,
    Lie,
}

/// Finite sum `Σ c_γ e_γ` over groupoid morphisms.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedElement {
    pub tag: AlgebraTag,
    terms: BTreeMap<GroupoidMorphism, LaurentScalar>,
}

impl GradedElement {
    pub fn zero(tag: AlgebraTag) -> Self {
        Self { tag, terms: BTreeMap::new() }
    }

    pub fn basis(tag: AlgebraTag, g: GroupoidMorphism) -> Self {
        Self::term(tag, g, LaurentScalar::one())
    }

    pub fn term(tag: AlgebraTag, g: GroupoidMorphism, c: LaurentScalar) -> Self {
        let mut out = Self::zero(tag);
        out.add_term(g, c);
        out
    }

    /// `Σ_i e_{0_i}`.
    pub fn unit(tag: AlgebraTag, objects: usize, rank: usize) -> Self {
        let mut out = Self::zero(tag);
        for i in 0..objects {
            out.add_term(GroupoidMorphism::identity(i, rank), LaurentScalar::one());
        }
        out
    }

    pub fn add_term(&mut self, g: GroupoidMorphism, c: LaurentScalar) {
        if c.is_zero() {
            return;
        }
        let cur = self.terms.remove(&g).unwrap_or_default();
        let s = cur + c;
        if !s.is_zero() {
            self.terms.insert(g, s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupoidMorphism, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupoidMorphism) -> LaurentScalar {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        same_tag(self, o)?;
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { tag: self.tag, terms: self.terms.iter().map(|(g, c)| (g.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, s: &LaurentScalar) -> Self {
        let mut out = Self::zero(self.tag);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn retag(mut self, tag: AlgebraTag) -> Self {
        self.tag = tag;
        self
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(g, c)| format!("({}) e[{}]", c, g)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn same_tag(x: &GradedElement, y: &GradedElement) -> Result<()> {
    if x.tag != y.tag {
        return Err(WallxError::ContextMismatch(format!("{:?} vs {:?}", x.tag, y.tag)));
    }
    Ok(())
}

fn require(x: &GradedElement, tag: AlgebraTag) -> Result<()> {
    if x.tag != tag {
        return Err(WallxError::ContextMismatch(format!("expected {:?}, got {:?}", tag, x.tag)));
    }
    Ok(())
}

fn bilinear<F>(x: &GradedElement, y: &GradedElement, tag: AlgebraTag, mut basis: F) -> GradedElement
where
    F: FnMut(&GroupoidMorphism, &GroupoidMorphism) -> Vec<(GroupoidMorphism, LaurentScalar)>,
{
    let mut out = GradedElement::zero(tag);
    for (g1, c1) in &x.terms {
        for (g2, c2) in &y.terms {
            for (g, c) in basis(g1, g2) {
                out.add_term(g, c * c1.clone() * c2.clone());
            }
        }
    }
    out
}

/// `e_{γ1} e_{γ2} = σ(γ1, γ2) e_{γ1+γ2}`.
pub fn tga_mul(x: &GradedElement, y: &GradedElement, s: &Cocycle) -> Result<GradedElement> {
    require(x, AlgebraTag::TwistedGroupoid)?;
    require(y, AlgebraTag::TwistedGroupoid)?;
    Ok(bilinear(x, y, AlgebraTag::TwistedGroupoid, |a, b| match compose(a, b) {
        Ok(ab) => vec![(ab, LaurentScalar::from_int(s.sigma(a, b) as i64))],
        Err(_) => Vec::new(),
    }))
}

/// `[e_{γ1}, e_{γ2}] = σ(γ1,γ2) ⟨Fγ1, Fγ2⟩ (e_{γ1+γ2} + e_{γ2+γ1})`, composites that do
/// not exist dropped. The pairing acts on source-lattice vectors.
pub fn lie_bracket(
    x: &GradedElement,
    y: &GradedElement,
    s: &Cocycle,
    grading: &GradingLattice,
    pairing: &IntMatrix,
) -> Result<GradedElement> {
    require(x, AlgebraTag::Lie)?;
    require(y, AlgebraTag::Lie)?;
    if !pairing.is_antisymmetric() {
        return Err(WallxError::InvalidInput("pairing must be antisymmetric".into()));
    }
    Ok(bilinear(x, y, AlgebraTag::Lie, |a, b| {
        let sg = s.sigma(a, b) as i64;
        if sg == 0 {
            return Vec::new();
        }
        let p = pairing.form(&grading.f_vector(a), &grading.f_vector(b));
        if p == 0 {
            return Vec::new();
        }
        let c = LaurentScalar::from_int(sg * p);
        let mut v = vec![(compose(a, b).expect("composable"), c.clone())];
        if let Ok(ba) = compose(b, a) {
            v.push((ba, c));
        }
        v
    }))
}

/// `e_{γ1} e_{γ2} = L^{⟨γ1,γ2⟩/2} e_{γ1+γ2}` (zero if not composable).
pub fn qtorus_mul(x: &GradedElement, y: &GradedElement, pairing: &IntMatrix) -> Result<GradedElement> {
    require(x, AlgebraTag::QuantumTorus)?;
    require(y, AlgebraTag::QuantumTorus)?;
    if !pairing.is_antisymmetric() {
        return Err(WallxError::InvalidInput("pairing must be antisymmetric".into()));
    }
    Ok(bilinear(x, y, AlgebraTag::QuantumTorus, |a, b| match compose(a, b) {
        Ok(ab) => vec![(ab, LaurentScalar::monomial(pairing.form(&a.vec, &b.vec), 1))],
        Err(_) => Vec::new(),
    }))
}

/// Square matrix over a ring, row-major.
#[derive(Clone, PartialEq)]
pub struct MatrixElement<R: Ring> {
    n: usize,
    entries: Vec<R>,
}

impl<R: Ring> MatrixElement<R> {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![R::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    /// `r · E_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize, r: R) -> Self {
        let mut m = Self::zero(n);
        m.set(i, j, r);
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, r: R) {
        self.entries[i * self.n + j] = r;
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(WallxError::SizeMismatch(self.n, o.n));
        }
        Ok(Self { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.clone() + b.clone()).collect() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(WallxError::SizeMismatch(self.n, o.n));
        }
        Ok(Self { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.clone() - b.clone()).collect() })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.n).all(|i| (0..=i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> MatrixElement<S> {
        MatrixElement { n: self.n, entries: self.entries.iter().map(f).collect() }
    }
}

impl<R: Ring + fmt::Display> fmt::Display for MatrixElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        let w = cells.iter().map(|c| c.chars().count()).max().unwrap_or(1);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:>w$}", cells[i * self.n + j], w = w)).collect();
            writeln!(f, "[ {} ]", row.join("  "))?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for MatrixElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixElement").field("n", &self.n).field("entries", &self.entries).finish()
    }
}

pub fn mat_mul<R: Ring>(a: &MatrixElement<R>, b: &MatrixElement<R>) -> Result<MatrixElement<R>> {
    mat_mul_by(a, b, |_, _, _| None)
}

/// Product where a composition `i → k → j` through a third index `k ∉ {i, j}`
/// carries the extra factor `w`. Associative on strictly upper-triangular matrices.
pub fn mat_mul_weighted<R: Ring>(a: &MatrixElement<R>, b: &MatrixElement<R>, w: &R) -> Result<MatrixElement<R>> {
    mat_mul_by(a, b, |i, k, j| if k != i && k != j { Some(w.clone()) } else { None })
}

fn mat_mul_by<R: Ring>(
    a: &MatrixElement<R>,
    b: &MatrixElement<R>,
    weight: impl Fn(usize, usize, usize) -> Option<R>,
) -> Result<MatrixElement<R>> {
    if a.n != b.n {
        return Err(WallxError::SizeMismatch(a.n, b.n));
    }
    let n = a.n;
    let mut out = MatrixElement::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = R::zero();
            for k in 0..n {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                let mut t = x.clone() * y.clone();
                if let Some(w) = weight(i, k, j) {
                    t = w * t;
                }
                acc = acc + t;
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Exponential of a nilpotent matrix, failing after `max_steps` terms.
pub fn mat_exp<R: Ring>(a: &MatrixElement<R>, max_steps: usize, inv_factorial: impl Fn(usize) -> R) -> Result<MatrixElement<R>> {
    let mut out = MatrixElement::identity(a.n);
    let mut power = MatrixElement::identity(a.n);
    for k in 1..=max_steps + 1 {
        power = mat_mul(&power, a)?;
        if power.is_zero() {
            return Ok(out);
        }
        if k > max_steps {
            break;
        }
        out = out.add(&power.map(|e| inv_factorial(k) * e.clone()))?;
    }
    Err(WallxError::NotNilpotent(max_steps))
}

/// JSON form `{"gamma": [...], "src": i, "tgt": j, "coeff": [[k, c], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub gamma: Vec<i64>,
    pub src: usize,
    pub tgt: usize,
    pub coeff: Vec<(i64, String)>,
}

pub fn to_json(x: &GradedElement) -> Vec<TermJson> {
    x.terms
        .iter()
        .map(|(g, c)| TermJson {
            gamma: g.vec.clone(),
            src: g.src,
            tgt: g.tgt,
            coeff: c.terms().map(|(k, v)| (k, v.to_string())).collect(),
        })
        .collect()
}

pub fn from_json(tag: AlgebraTag, terms: &[TermJson]) -> Result<GradedElement> {
    let mut out = GradedElement::zero(tag);
    for t in terms {
        let mut c = LaurentScalar::zero();
        for (k, v) in &t.coeff {
            let v: BigInt = v.parse().map_err(|_| WallxError::Parse(format!("bad coefficient {v:?}")))?;
            c = c + LaurentScalar::monomial_big(*k, v);
        }
        out.add_term(GroupoidMorphism::new(t.src, t.tgt, t.gamma.clone()), c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::MultiPoly;

    fn m(src: usize, tgt: usize, v: &[i64]) -> GroupoidMorphism {
        GroupoidMorphism::new(src, tgt, v.to_vec())
    }

    #[test]
    fn tga_examples() {
        let t = AlgebraTag::TwistedGroupoid;
        let e01 = GradedElement::basis(t, m(0, 1, &[1, 0]));
        let e12 = GradedElement::basis(t, m(1, 2, &[0, 1]));
        let p = tga_mul(&e01, &e12, &Cocycle::ConstantOne).unwrap();
        assert_eq!(p, GradedElement::basis(t, m(0, 2, &[1, 1])));
        assert!(tga_mul(&e12, &e01, &Cocycle::ConstantOne).unwrap().is_zero());
        let id0 = GradedElement::basis(t, m(0, 0, &[0, 0]));
        assert_eq!(tga_mul(&id0, &e01, &Cocycle::ConstantOne).unwrap(), e01);
        let q = GradedElement::basis(AlgebraTag::QuantumTorus, m(0, 0, &[1, 0]));
        assert!(matches!(tga_mul(&q, &e01, &Cocycle::ConstantOne), Err(WallxError::ContextMismatch(_))));
    }

    #[test]
    fn qtorus_examples() {
        let t = AlgebraTag::QuantumTorus;
        let p = IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let a = GradedElement::basis(t, m(0, 0, &[1, 0]));
        let b = GradedElement::basis(t, m(0, 0, &[0, 1]));
        let ab = qtorus_mul(&a, &b, &p).unwrap();
        assert_eq!(ab, GradedElement::term(t, m(0, 0, &[1, 1]), LaurentScalar::monomial(1, 1)));
        let ba = qtorus_mul(&b, &a, &p).unwrap();
        let comm = ab.sub(&ba).unwrap();
        let expect = LaurentScalar::monomial(1, 1) - LaurentScalar::monomial(-1, 1);
        assert_eq!(comm, GradedElement::term(t, m(0, 0, &[1, 1]), expect));
        let e0 = GradedElement::basis(t, m(0, 0, &[0, 0]));
        assert_eq!(qtorus_mul(&e0, &a, &p).unwrap(), a);
    }

    #[test]
    fn u3_products() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let one = MatrixElement::<MultiPoly>::identity(3);
        let a = one.add(&MatrixElement::unit(3, 0, 1, x.clone())).unwrap();
        let b = one.add(&MatrixElement::unit(3, 1, 2, y.clone())).unwrap();
        let ab = mat_mul(&a, &b).unwrap();
        let expect = a.add(&MatrixElement::unit(3, 1, 2, y.clone())).unwrap().add(&MatrixElement::unit(3, 0, 2, x.clone() * y.clone())).unwrap();
        assert_eq!(ab, expect);
        let ba = mat_mul(&b, &a).unwrap();
        assert_eq!(ba, a.add(&MatrixElement::unit(3, 1, 2, y)).unwrap());
        assert_eq!(mat_mul(&one, &a).unwrap(), a);
        assert!(matches!(mat_mul(&one, &MatrixElement::identity(2)), Err(WallxError::SizeMismatch(3, 2))));
    }

    #[test]
    fn json_roundtrip() {
        let t = AlgebraTag::QuantumTorus;
        let x = GradedElement::term(t, m(0, 0, &[1, 2]), LaurentScalar::l_minus_one());
        let j = to_json(&x);
        assert_eq!(from_json(t, &j).unwrap(), x);
    }
}
