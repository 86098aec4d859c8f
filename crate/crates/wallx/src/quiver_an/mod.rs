//! The derived category of the `A_n` quiver with arrows `i → i−1`.
//!
//! `M_ij` (`0 ≤ i < j ≤ n`) is the interval module supported on vertices
//! `i+1..=j`. [`hom_ext`] gives graded Hom dimensions between shifted
//! indecomposables, [`cone_of`] the cones of the basic morphisms, and
//! [`corr_product`] the Hall product restricted to indecomposable cones.
//! The submodules [`fq`] and [`hall`] realize the same quantities by
//! counting over a prime field.

pub mod fq;
pub mod hall;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WallxError};
use crate::graded_algebra::MatrixElement;
use crate::lattice_groupoid::{make_induced_groupoid, InducedGroupoid, LatticeMap};
use crate::scalar::LaurentScalar;

pub use fq::{fq_ext_count, ExtCount, FqRep};
pub use hall::{fq_hall_product, Correspondence, DObject, OracleElement};

/// The object `M_ij[shift]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Indec {
    pub i: usize,
    pub j: usize,
    pub shift: i64,
}

impl Indec {
    /// `None` for `M_ii`, which is the zero object.
    pub fn new(i: usize, j: usize, shift: i64) -> Option<Self> {
        (i < j).then_some(Self { i, j, shift })
    }

    pub fn module(i: usize, j: usize) -> Self {
        assert!(i < j, "M_{i}{j} is not an indecomposable");
        Self { i, j, shift: 0 }
    }

    pub fn shifted(&self, k: i64) -> Self {
        Self { shift: self.shift + k, ..*self }
    }

    pub fn unshifted(&self) -> Self {
        self.shifted(-self.shift)
    }

    /// Dimension vector on vertices `1..=n`.
    pub fn dims(&self, n: usize) -> Vec<usize> {
        (1..=n).map(|v| usize::from(self.i < v && v <= self.j)).collect()
    }

    /// The groupoid edge carrying this object: `i → j` for even shifts, `j → i` for odd.
    pub fn edge(&self) -> (usize, usize) {
        if self.shift.rem_euclid(2) == 0 {
            (self.i, self.j)
        } else {
            (self.j, self.i)
        }
    }
}

impl fmt::Display for Indec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}{}", self.i, self.j)?;
        if self.shift != 0 {
            write!(f, "[{}]", self.shift)?;
        }
        Ok(())
    }
}

/// Every indecomposable `M_ij`, `0 ≤ i < j ≤ n`, with the given shifts.
pub fn indecomposables(n: usize, shifts: impl IntoIterator<Item = i64> + Clone) -> Vec<Indec> {
    let mut out = Vec::new();
    for r in shifts {
        for i in 0..n {
            for j in i + 1..=n {
                out.push(Indec { i, j, shift: r });
            }
        }
    }
    out
}

/// `d ↦ dim Hom^d`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomTable {
    degrees: BTreeMap<i64, usize>,
}

impl HomTable {
    pub fn dim(&self, d: i64) -> usize {
        self.degrees.get(&d).copied().unwrap_or(0)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.degrees.iter().map(|(d, m)| (*d, *m))
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.is_empty()
    }
}

/// Which of the two unshifted cases relates `M_ij` and `M_kl`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomCase {
    /// `i ≤ k < j ≤ l`: a degree-0 map.
    Alpha,
    /// `k < i ≤ l < j`: a degree-1 class.
    Beta,
    None,
}

pub fn hom_case(a: &Indec, b: &Indec) -> HomCase {
    let (i, j, k, l) = (a.i, a.j, b.i, b.j);
    if i <= k && k < j && j <= l {
        HomCase::Alpha
    } else if k < i && i <= l && l < j {
        HomCase::Beta
    } else {
        HomCase::None
    }
}

/// `dim Hom^d(a, b) = dim Hom(a, b[d])`.
pub fn hom_ext(a: &Indec, b: &Indec) -> HomTable {
    let offset = a.shift - b.shift;
    let degree = match hom_case(a, b) {
        HomCase::Alpha => offset,
        HomCase::Beta => 1 + offset,
        HomCase::None => return HomTable::default(),
    };
    HomTable { degrees: BTreeMap::from([(degree, 1)]) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorphismKind {
    /// The nonzero map `a → b`.
    Alpha,
    /// The nonzero class `a → b[1]`.
    Beta,
    Zero,
}

/// Summands of the cone; `M_xx` summands are dropped.
pub fn cone_of(a: &Indec, b: &Indec, kind: MorphismKind) -> Result<Vec<Indec>> {
    let missing = || WallxError::NoSuchMorphism(format!("{kind:?} from {a} to {b}"));
    let mut out = match kind {
        MorphismKind::Zero => vec![*b, a.shifted(1)],
        MorphismKind::Alpha => {
            if hom_ext(a, b).dim(0) == 0 {
                return Err(missing());
            }
            let r = a.shift;
            [Indec::new(a.j, b.j, r), Indec::new(a.i, b.i, r + 1)].into_iter().flatten().collect()
        }
        MorphismKind::Beta => {
            if hom_ext(a, b).dim(1) == 0 {
                return Err(missing());
            }
            match hom_case(a, b) {
                HomCase::Beta => {
                    let r = b.shift;
                    [Indec::new(a.i, b.j, r), Indec::new(b.i, a.j, r)].into_iter().flatten().collect()
                }
                _ => return cone_of(&a.shifted(-1), b, MorphismKind::Alpha),
            }
        }
    };
    out.sort();
    Ok(out)
}

/// A finite combination of indecomposables.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct HallElement {
    terms: BTreeMap<Indec, LaurentScalar>,
}

impl HallElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(x: Indec) -> Self {
        Self::term(x, LaurentScalar::one())
    }

    pub fn term(x: Indec, c: LaurentScalar) -> Self {
        let mut out = Self::zero();
        out.add_term(x, c);
        out
    }

    pub fn add_term(&mut self, x: Indec, c: LaurentScalar) {
        let slot = self.terms.entry(x).or_insert_with(LaurentScalar::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Indec, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, x: &Indec) -> LaurentScalar {
        self.terms.get(x).cloned().unwrap_or_else(LaurentScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (x, c) in &o.terms {
            out.add_term(*x, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &LaurentScalar) -> Self {
        let mut out = Self::zero();
        for (x, c) in &self.terms {
            out.add_term(*x, c.clone() * s.clone());
        }
        out
    }
}

impl fmt::Display for HallElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(x, c)| format!("({c})·ρ[{x}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for HallElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// How shifts combine in the restricted product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftRule {
    /// Only `M_ki[r] · M_ij[r]`, landing in shift `r`.
    #[default]
    SameShift,
    /// `M_ki[r] · M_ij[s]` for `r ≡ s (mod 2)`, landing in shift `min(r, s)`.
    Spread,
}

/// The cone produced by `ρ_x · ρ_y`, if any.
pub fn basis_product(x: &Indec, y: &Indec, rule: ShiftRule) -> Option<Indec> {
    if x.j != y.i {
        return None;
    }
    let shift = match rule {
        ShiftRule::SameShift if x.shift == y.shift => x.shift,
        ShiftRule::Spread if (x.shift - y.shift).rem_euclid(2) == 0 => x.shift.min(y.shift),
        _ => return None,
    };
    Some(Indec { i: x.i, j: y.j, shift })
}

/// Product weight `(L − 1)·L^{−ν}`.
fn corr_weight(nu: i64) -> LaurentScalar {
    LaurentScalar::l_minus_one() * LaurentScalar::monomial(-2 * nu, 1)
}

/// The restricted Hall product with `ν ≡ 0` and same-shift classes.
pub fn corr_product(x: &HallElement, y: &HallElement) -> HallElement {
    corr_product_with(x, y, ShiftRule::SameShift, &|_, _| 0)
}

/// The restricted Hall product with a shift rule and weight exponent `ν(x, y)`.
pub fn corr_product_with(
    x: &HallElement,
    y: &HallElement,
    rule: ShiftRule,
    nu: &dyn Fn(&Indec, &Indec) -> i64,
) -> HallElement {
    let mut out = HallElement::zero();
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            if let Some(z) = basis_product(a, b, rule) {
                out.add_term(z, ca.clone() * cb.clone() * corr_weight(nu(a, b)));
            }
        }
    }
    out
}

/// The restricted product in the basis `s_X = ρ_X / (L − 1)`.
pub fn stack_product(x: &HallElement, y: &HallElement, rule: ShiftRule) -> HallElement {
    let mut out = HallElement::zero();
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            if let Some(z) = basis_product(a, b, rule) {
                let c = corr_weight(0).div_l_minus_one().expect("weight is divisible by L - 1");
                out.add_term(z, ca.clone() * cb.clone() * c);
            }
        }
    }
    out
}

/// The matrix of an unshifted element: the coefficient of `M_ij` at `(i, j)`.
pub fn integrate(x: &HallElement, n: usize) -> Result<MatrixElement<LaurentScalar>> {
    let mut m = MatrixElement::<LaurentScalar>::zero(n + 1);
    for (a, c) in &x.terms {
        if a.shift != 0 {
            return Err(WallxError::ShiftedTerm(a.to_string()));
        }
        if a.j > n {
            return Err(WallxError::SizeMismatch(a.j, n));
        }
        m.set(a.i, a.j, m.get(a.i, a.j).clone() + c.clone());
    }
    Ok(m)
}

/// The weight `w` for which [`integrate`] is multiplicative under
/// [`crate::graded_algebra::mat_mul_weighted`].
pub fn integrate_weight() -> LaurentScalar {
    LaurentScalar::l_minus_one()
}

/// Dimension vector on vertices `1..=n` to `Z^{n+1}`, `u_ij ↦ e_j − e_i`.
pub fn phi_map(v: &[i64]) -> Vec<i64> {
    let mut out = vec![0; v.len() + 1];
    for (k, x) in v.iter().enumerate() {
        out[k + 1] += x;
        out[k] -= x;
    }
    out
}

/// Positive roots `(i, j)` in lexicographic order.
pub fn positive_roots(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

pub fn root_dims(i: usize, j: usize, n: usize) -> Vec<i64> {
    (1..=n).map(|v| i64::from(i < v && v <= j)).collect()
}

/// `φ` on the dimension-vector lattice `Z^n`.
pub fn phi_lattice_map(n: usize) -> LatticeMap {
    let rows = (0..=n)
        .map(|r| (1..=n).map(|v| if v == r { 1 } else if v == r + 1 { -1 } else { 0 }).collect())
        .collect();
    LatticeMap::from_rows(rows, n).expect("shape is consistent")
}

/// `φ` on the free lattice with one generator per positive root.
pub fn phi_on_roots(n: usize) -> LatticeMap {
    let roots = positive_roots(n);
    let rows = (0..=n)
        .map(|r| {
            roots
                .iter()
                .map(|&(i, j)| if r == j { 1 } else if r == i { -1 } else { 0 })
                .collect()
        })
        .collect();
    LatticeMap::from_rows(rows, roots.len()).expect("shape is consistent")
}

/// The trivial connected groupoid on `0..=n` induced by `φ` and the standard basis.
pub fn an_groupoid(n: usize) -> InducedGroupoid {
    let objects = (0..=n).map(|k| (0..=n).map(|r| i64::from(r == k)).collect()).collect();
    make_induced_groupoid(phi_lattice_map(n), objects).expect("standard basis objects are distinct")
}

/// Specialize at `L = q`.
pub fn specialize_element(x: &HallElement, q: u64) -> Result<BTreeMap<Indec, BigInt>> {
    let mut out = BTreeMap::new();
    for (a, c) in &x.terms {
        let v = c.specialize(q)?;
        if !v.is_integer() {
            return Err(WallxError::InvalidInput(format!("non-integral specialization at {a}")));
        }
        out.insert(*a, v.to_integer());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::{mat_mul_weighted, MatrixElement};

    fn m(i: usize, j: usize) -> Indec {
        Indec::module(i, j)
    }

    #[test]
    fn hom_ext_examples() {
        assert_eq!(hom_ext(&m(0, 1), &m(0, 2)).nonzero().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(hom_ext(&m(1, 2), &m(0, 1)).nonzero().collect::<Vec<_>>(), vec![(1, 1)]);
        assert!(hom_ext(&m(0, 1), &m(1, 2)).is_zero());
        let a = m(0, 1);
        assert_eq!(hom_ext(&a.shifted(1), &a).nonzero().collect::<Vec<_>>(), vec![(1, 1)]);
    }

    #[test]
    fn cases_are_exclusive() {
        for n in 1..=4 {
            for a in indecomposables(n, [0]) {
                for b in indecomposables(n, [0]) {
                    let al = a.i <= b.i && b.i < a.j && a.j <= b.j;
                    let be = b.i < a.i && a.i <= b.j && b.j < a.j;
                    assert!(!(al && be));
                }
            }
        }
    }

    #[test]
    fn cones() {
        assert_eq!(cone_of(&m(0, 1), &m(0, 2), MorphismKind::Alpha).unwrap(), vec![m(1, 2)]);
        assert_eq!(cone_of(&m(1, 2), &m(0, 1), MorphismKind::Beta).unwrap(), vec![m(0, 2)]);
        assert_eq!(
            cone_of(&m(0, 1), &m(1, 2), MorphismKind::Zero).unwrap(),
            vec![m(0, 1).shifted(1), m(1, 2)]
        );
        assert!(matches!(
            cone_of(&m(0, 1), &m(1, 2), MorphismKind::Alpha),
            Err(WallxError::NoSuchMorphism(_))
        ));
        assert_eq!(cone_of(&m(0, 2), &m(1, 2), MorphismKind::Alpha).unwrap(), vec![m(0, 1).shifted(1)]);
        assert_eq!(
            cone_of(&m(0, 2).shifted(1), &m(1, 2), MorphismKind::Beta).unwrap(),
            vec![m(0, 1).shifted(1)]
        );
    }

    #[test]
    fn products() {
        let l1 = LaurentScalar::l_minus_one();
        let p = corr_product(&HallElement::basis(m(0, 1)), &HallElement::basis(m(1, 2)));
        assert_eq!(p, HallElement::term(m(0, 2), l1.clone()));
        assert!(corr_product(&HallElement::basis(m(1, 2)), &HallElement::basis(m(0, 1))).is_zero());
        let left = corr_product(&p, &HallElement::basis(m(2, 3)));
        assert_eq!(left, HallElement::term(m(0, 3), l1.clone() * l1));
        let s = stack_product(&HallElement::basis(m(0, 1)), &HallElement::basis(m(1, 2)), ShiftRule::SameShift);
        assert_eq!(s, HallElement::basis(m(0, 2)));
    }

    #[test]
    fn same_shift_matches_cone() {
        for x in indecomposables(3, -1..=1) {
            for y in indecomposables(3, -1..=1) {
                if let Some(z) = basis_product(&x, &y, ShiftRule::SameShift) {
                    assert_eq!(cone_of(&y, &x, MorphismKind::Beta).unwrap(), vec![z]);
                }
            }
        }
    }

    #[test]
    fn integrate_is_multiplicative() {
        let w = integrate_weight();
        for x in indecomposables(3, [0]) {
            for y in indecomposables(3, [0]) {
                let (hx, hy) = (HallElement::basis(x), HallElement::basis(y));
                let lhs = integrate(&corr_product(&hx, &hy), 3).unwrap();
                let rhs = mat_mul_weighted(&integrate(&hx, 3).unwrap(), &integrate(&hy, 3).unwrap(), &w).unwrap();
                assert_eq!(lhs, rhs, "{x} {y}");
            }
        }
        assert_eq!(integrate(&HallElement::basis(m(0, 2)), 2).unwrap(), MatrixElement::unit(3, 0, 2, LaurentScalar::one()));
        assert!(matches!(
            integrate(&HallElement::basis(m(0, 2).shifted(1)), 2),
            Err(WallxError::ShiftedTerm(_))
        ));
    }

    #[test]
    fn phi() {
        assert_eq!(phi_map(&[1, 1]), vec![-1, 0, 1]);
        assert_eq!(phi_map(&[0, 0]), vec![0, 0, 0]);
        let sum: Vec<i64> = root_dims(0, 1, 2).iter().zip(root_dims(1, 2, 2)).map(|(a, b)| a + b).collect();
        assert_eq!(phi_map(&sum), phi_map(&root_dims(0, 2, 2)));
        let f = phi_on_roots(2);
        assert_eq!(f.apply(&[1, -1, 1]), vec![0, 0, 0]);
        let g = an_groupoid(2);
        assert_eq!(g.unique_morphism(0, 2).unwrap().vec, vec![1, 1]);
    }
}
