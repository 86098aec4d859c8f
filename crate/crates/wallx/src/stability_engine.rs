//! Stability data over a height-truncated quantum torus of a groupoid.
//!
//! Basis elements are morphisms `(src, tgt, v)` with `v` a non-negative
//! combination of the generators `S`; the height of `v` is its coordinate sum.
//! Products follow `e_a e_b = σ(a, b) L^{⟨a,b⟩/2} e_{a+b}` and vanish above
//! the truncation height, so `exp` and `log` are finite sums.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, WallxError};
use crate::graded_algebra::{mat_mul, MatrixElement};
use crate::lattice_groupoid::{compose, Cocycle, GroupoidMorphism, InducedGroupoid, IntMatrix};
use crate::scalar::{gcd_slice, q_int, GaussianRational, LaurentScalar, MultiPoly, RatFunc, Q};

/// Element of the truncated algebra.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TElem {
    terms: BTreeMap<GroupoidMorphism, RatFunc>,
}

impl TElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(g: GroupoidMorphism, c: RatFunc) -> Self {
        let mut out = Self::zero();
        out.add_term(g, c);
        out
    }

    pub fn add_term(&mut self, g: GroupoidMorphism, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&g) {
            None => {
                self.terms.insert(g, c);
            }
            Some(cur) => {
                let s = cur + c;
                if !s.is_zero() {
                    self.terms.insert(g, s);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupoidMorphism, &RatFunc)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupoidMorphism) -> RatFunc {
        self.terms.get(g).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.add_term(g.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &RatFunc) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.clone() * s.clone());
        }
        out
    }
}

impl fmt::Display for TElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(g, c)| format!("[{}] e{}", c, g)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Quantum torus of a groupoid, truncated at a fixed height over generators `S`.
#[derive(Clone, Debug)]
pub struct TruncatedAlgebra {
    pub groupoid: InducedGroupoid,
    pub pairing: IntMatrix,
    pub cocycle: Cocycle,
    pub generators: Vec<Vec<i64>>,
    pub height: usize,
    // coordinates: c = inv · v[rows] / den
    rows: Vec<usize>,
    inv: Vec<Vec<BigInt>>,
    den: BigInt,
}

impl TruncatedAlgebra {
    pub fn new(
        groupoid: InducedGroupoid,
        pairing: IntMatrix,
        cocycle: Cocycle,
        generators: Vec<Vec<i64>>,
        height: usize,
    ) -> Result<Self> {
        let r = groupoid.rank();
        if pairing.rows != r || pairing.cols != r || !pairing.is_antisymmetric() {
            return Err(WallxError::InvalidInput("pairing must be an antisymmetric rank x rank matrix".into()));
        }
        if generators.is_empty() || generators.iter().any(|g| g.len() != r) {
            return Err(WallxError::InvalidInput("generators must be nonempty vectors of the source rank".into()));
        }
        let (rows, inv, den) = left_inverse(&generators)?;
        Ok(Self { groupoid, pairing, cocycle, generators, height, rows, inv, den })
    }

    /// Single-object quantum torus on `Z^rank`.
    pub fn torus(pairing: IntMatrix, generators: Vec<Vec<i64>>, height: usize) -> Result<Self> {
        let r = pairing.rows;
        let phi = crate::lattice_groupoid::LatticeMap::new(IntMatrix { rows: 0, cols: r, data: Vec::new() });
        let g = crate::lattice_groupoid::make_induced_groupoid(phi, vec![Vec::new()])?;
        Self::new(g, pairing, Cocycle::ConstantOne, generators, height)
    }

    pub fn rank(&self) -> usize {
        self.groupoid.rank()
    }

    /// Coordinates of `v` in the generators, when `v` lies in their integer span.
    pub fn coords(&self, v: &[i64]) -> Option<Vec<i64>> {
        let m = self.generators.len();
        let mut c = Vec::with_capacity(m);
        for i in 0..m {
            let s: BigInt = self.rows.iter().enumerate().map(|(k, &row)| &self.inv[i][k] * BigInt::from(v[row])).sum();
            if !(&s % &self.den).is_zero() {
                return None;
            }
            c.push((s / &self.den).to_i64()?);
        }
        let back: Vec<i64> = (0..v.len()).map(|t| (0..m).map(|i| c[i] * self.generators[i][t]).sum()).collect();
        (back == v).then_some(c)
    }

    /// Height of `v` in the monoid spanned by `S`.
    pub fn height_of(&self, v: &[i64]) -> Option<usize> {
        let c = self.coords(v)?;
        if c.iter().any(|&x| x < 0) {
            return None;
        }
        Some(c.iter().sum::<i64>() as usize)
    }

    /// All nonzero monoid vectors up to the truncation height.
    pub fn monoid_vectors(&self) -> Vec<Vec<i64>> {
        let m = self.generators.len();
        let mut out = Vec::new();
        let mut coeffs = vec![vec![]];
        for _ in 0..m {
            let mut next = Vec::new();
            for c in &coeffs {
                let used: usize = c.iter().sum();
                for k in 0..=(self.height - used) {
                    let mut d = c.clone();
                    d.push(k);
                    next.push(d);
                }
            }
            coeffs = next;
        }
        for c in coeffs {
            if c.iter().all(|&k| k == 0) {
                continue;
            }
            let v: Vec<i64> =
                (0..self.rank()).map(|t| (0..m).map(|i| c[i] as i64 * self.generators[i][t]).sum()).collect();
            out.push(v);
        }
        out.sort();
        out
    }

    /// Morphisms carried by monoid vectors up to the truncation height.
    pub fn monoid_morphisms(&self) -> Vec<GroupoidMorphism> {
        let n = self.groupoid.num_objects();
        let mut out = Vec::new();
        for v in self.monoid_vectors() {
            for i in 0..n {
                for j in 0..n {
                    let g = GroupoidMorphism::new(i, j, v.clone());
                    if self.groupoid.is_morphism(&g) {
                        out.push(g);
                    }
                }
            }
        }
        out
    }

    pub fn one(&self) -> TElem {
        let mut out = TElem::zero();
        for i in 0..self.groupoid.num_objects() {
            out.add_term(GroupoidMorphism::identity(i, self.rank()), RatFunc::one());
        }
        out
    }

    fn key_height(&self, g: &GroupoidMorphism) -> usize {
        self.height_of(&g.vec).unwrap_or(usize::MAX)
    }

    /// Terms at exactly height `h`.
    pub fn component(&self, x: &TElem, h: usize) -> TElem {
        let mut out = TElem::zero();
        for (g, c) in x.terms() {
            if self.key_height(g) == h {
                out.add_term(g.clone(), c.clone());
            }
        }
        out
    }

    pub fn mul(&self, x: &TElem, y: &TElem) -> TElem {
        let hx: Vec<(&GroupoidMorphism, &RatFunc, usize)> = x.terms().map(|(g, c)| (g, c, self.key_height(g))).collect();
        let hy: Vec<(&GroupoidMorphism, &RatFunc, usize)> = y.terms().map(|(g, c)| (g, c, self.key_height(g))).collect();
        let mut out = TElem::zero();
        for (a, ca, ha) in &hx {
            for (b, cb, hb) in &hy {
                if ha.saturating_add(*hb) > self.height {
                    continue;
                }
                let Ok(ab) = compose(a, b) else { continue };
                let s = self.cocycle.sigma(a, b) as i64;
                let k = self.pairing.form(&a.vec, &b.vec);
                let c = (*ca).clone() * (*cb).clone() * RatFunc::t_pow(k);
                out.add_term(ab, if s == 1 { c } else { -c });
            }
        }
        out
    }

    /// `exp(x)` for `x` without height-0 terms.
    pub fn exp(&self, x: &TElem) -> TElem {
        let mut out = self.one();
        let mut power = self.one();
        for k in 1..=self.height {
            power = self.mul(&power, x).scale(&RatFunc::from_q(Q::new(BigInt::one(), BigInt::from(k))));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        out
    }

    /// `log(g)` for `g = 1 + (positive height)`.
    pub fn log(&self, g: &TElem) -> TElem {
        let y = g.sub(&self.one());
        let mut out = TElem::zero();
        let mut power = self.one();
        for k in 1..=self.height {
            power = self.mul(&power, &y);
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&power.scale(&RatFunc::from_q(Q::new(BigInt::from(sign), BigInt::from(k)))));
        }
        out
    }

    pub fn commute(&self, a: &GroupoidMorphism, b: &GroupoidMorphism) -> bool {
        let ea = TElem::term(a.clone(), RatFunc::one());
        let eb = TElem::term(b.clone(), RatFunc::one());
        // Compare below truncation: scale up the height so the product is never cut.
        let wide = Self { height: usize::MAX / 4, ..self.clone() };
        wide.mul(&ea, &eb) == wide.mul(&eb, &ea)
    }
}

fn left_inverse(gens: &[Vec<i64>]) -> Result<(Vec<usize>, Vec<Vec<BigInt>>, BigInt)> {
    let m = gens.len();
    let r = gens[0].len();
    // Greedy choice of m independent rows of the r x m matrix S.
    let mut rows = Vec::new();
    let mut basis: Vec<Vec<Q>> = Vec::new();
    for t in 0..r {
        let row: Vec<Q> = (0..m).map(|i| q_int(gens[i][t])).collect();
        let mut cand = basis.clone();
        cand.push(row);
        if rank_q(&cand) == cand.len() {
            basis = cand;
            rows.push(t);
        }
        if rows.len() == m {
            break;
        }
    }
    if rows.len() < m {
        return Err(WallxError::DependentGenerators(format!("{gens:?}")));
    }
    let inv = invert_q(&basis).ok_or_else(|| WallxError::DependentGenerators(format!("{gens:?}")))?;
    let den = inv.iter().flatten().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let inv_int = inv.iter().map(|row| row.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect()).collect();
    Ok((rows, inv_int, den))
}

/// Rank of a rational matrix by elimination.
pub fn rank_q(m: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in 0..rows {
            if i != rank && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[rank][c];
                for k in 0..cols {
                    let v = &f * &a[rank][k];
                    a[i][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a square rational matrix.
pub fn invert_q(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for k in 0..2 * n {
            a[c][k] = &a[c][k] / &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let v = &f * &a[c][k];
                    a[i][k] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rational nullspace basis of `m` (rows × cols).
pub fn nullspace_q(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        let piv = a[rank][c].clone();
        for k in 0..cols {
            a[rank][k] = &a[rank][k] / &piv;
        }
        for i in 0..rows {
            if i != rank && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let v = &f * &a[rank][k];
                    a[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Central charge given by its values on the generators `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralCharge {
    pub values: Vec<GaussianRational>,
}

impl CentralCharge {
    pub fn new(values: Vec<GaussianRational>) -> Self {
        Self { values }
    }

    /// `Z(v)` through the generator coordinates of `v`.
    pub fn eval(&self, alg: &TruncatedAlgebra, v: &[i64]) -> Option<GaussianRational> {
        let c = alg.coords(v)?;
        let mut z = GaussianRational::zero();
        for (k, val) in c.iter().zip(&self.values) {
            z = z.add(&val.scale(&q_int(*k)));
        }
        Some(z)
    }
}

/// Directions swept counterclockwise from `from` (included) to `to` (excluded).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub from: GaussianRational,
    pub to: GaussianRational,
}

impl Sector {
    pub fn new(from: GaussianRational, to: GaussianRational) -> Result<Self> {
        let c = from.cross(&to);
        if !c.is_positive() {
            return Err(WallxError::NotStrict);
        }
        Ok(Self { from, to })
    }

    /// Sector `[start, end)` in units of π; `end - start` must lie in `(0, 1)`.
    pub fn from_angles(start: &Q, end: &Q) -> Result<Self> {
        let w = end - start;
        if !w.is_positive() || w >= Q::one() {
            return Err(WallxError::NotStrict);
        }
        Self::new(direction_of(start), direction_of(end))
    }

    pub fn contains(&self, z: &GaussianRational) -> bool {
        if z.is_zero() {
            return false;
        }
        let a = self.from.cross(z);
        (a.is_positive() || (a.is_zero() && self.from.dot(z).is_positive())) && z.cross(&self.to).is_positive()
    }

    /// Smallest strict sector holding every given direction, if one exists.
    pub fn spanning(zs: &[GaussianRational]) -> Result<Self> {
        if zs.iter().any(|z| z.is_zero()) {
            return Err(WallxError::NotStrict);
        }
        let first = zs
            .iter()
            .find(|f| zs.iter().all(|v| {
                let c = f.cross(v);
                c.is_positive() || (c.is_zero() && f.dot(v).is_positive())
            }))
            .ok_or(WallxError::NotStrict)?;
        let last = zs.iter().find(|l| zs.iter().all(|u| !u.cross(l).is_negative())).ok_or(WallxError::NotStrict)?;
        // Widen slightly past `last` so the half-open end excludes nothing.
        let nudge = GaussianRational::new(-last.im.clone(), last.re.clone()).scale(&Q::new(BigInt::one(), BigInt::from(1_000_000)));
        let mut to = last.add(&nudge);
        if !first.cross(&to).is_positive() {
            // All directions equal: open a small wedge.
            to = first.add(&GaussianRational::new(-first.im.clone(), first.re.clone()).scale(&Q::new(BigInt::one(), BigInt::from(1_000_000))));
        }
        Self::new(first.clone(), to)
    }
}

/// Exact direction for multiples of 1/4, otherwise the float direction read as an exact rational.
pub fn direction_of(theta: &Q) -> GaussianRational {
    let two = q_int(2);
    let mut t = theta.clone();
    while t > Q::one() {
        t -= &two;
    }
    while t <= -Q::one() {
        t += &two;
    }
    let four = &t * q_int(4);
    if four.is_integer() {
        let (re, im) = match four.to_integer().to_i64().unwrap() {
            0 => (1, 0),
            1 => (1, 1),
            2 => (0, 1),
            3 => (-1, 1),
            4 => (-1, 0),
            -1 => (1, -1),
            -2 => (0, -1),
            -3 => (-1, -1),
            _ => unreachable!(),
        };
        return GaussianRational::from_ints(re, im);
    }
    let x = t.to_f64().unwrap() * std::f64::consts::PI;
    GaussianRational::new(BigRational::from_float(x.cos()).unwrap(), BigRational::from_float(x.sin()).unwrap())
}

/// Stability data: a charge and ray coefficients `a(γ)` (the element `a(γ) e_γ`).
#[derive(Clone, Debug)]
pub struct StabilityData {
    pub algebra: TruncatedAlgebra,
    pub charge: CentralCharge,
    pub a: BTreeMap<GroupoidMorphism, RatFunc>,
}

impl StabilityData {
    pub fn new(algebra: TruncatedAlgebra, charge: CentralCharge, a: BTreeMap<GroupoidMorphism, RatFunc>) -> Result<Self> {
        if charge.values.len() != algebra.generators.len() {
            return Err(WallxError::InvalidInput("one charge value per generator expected".into()));
        }
        for g in a.keys() {
            match algebra.height_of(&g.vec) {
                Some(h) if h >= 1 && h <= algebra.height && algebra.groupoid.is_morphism(g) => {}
                _ => return Err(WallxError::InvalidInput(format!("support element {g} outside the truncated monoid"))),
            }
        }
        let a = a.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { algebra, charge, a })
    }

    pub fn support(&self) -> Vec<GroupoidMorphism> {
        self.a.keys().cloned().collect()
    }

    fn z(&self, g: &GroupoidMorphism) -> GaussianRational {
        self.charge.eval(&self.algebra, &g.vec).expect("support lies in the span of S")
    }
}

/// Dilogarithm ray data `a(kγ) = Ω ψ_k` on the multiples of a primitive `γ` up to the height.
pub fn dilog_ray(alg: &TruncatedAlgebra, src: usize, tgt: usize, gamma: &[i64], omega: i64) -> Result<BTreeMap<GroupoidMorphism, RatFunc>> {
    let h = alg.height_of(gamma).ok_or_else(|| WallxError::InvalidInput(format!("{gamma:?} outside the monoid")))?;
    let mut out = BTreeMap::new();
    if h == 0 {
        return Err(WallxError::InvalidInput("ray through the origin".into()));
    }
    let mut k = 1;
    while k * h <= alg.height {
        let v: Vec<i64> = gamma.iter().map(|x| x * k as i64).collect();
        out.insert(GroupoidMorphism::new(src, tgt, v), RatFunc::dilog_weight(k as i64).scale_q(&q_int(omega)));
        k += 1;
    }
    Ok(out)
}

/// One ray: its direction and the terms whose charge points along it.
#[derive(Clone, Debug)]
pub struct Ray {
    pub direction: GaussianRational,
    pub terms: BTreeMap<GroupoidMorphism, RatFunc>,
}

/// Groups terms into rays ordered clockwise (decreasing argument).
fn group_rays(
    alg: &TruncatedAlgebra,
    charge: &CentralCharge,
    a: &BTreeMap<GroupoidMorphism, RatFunc>,
) -> Result<Vec<Ray>> {
    let mut items: Vec<(GaussianRational, &GroupoidMorphism, &RatFunc)> = Vec::new();
    for (g, c) in a {
        let z = charge.eval(alg, &g.vec).ok_or_else(|| WallxError::InvalidInput(format!("{g} outside span")))?;
        if z.is_zero() {
            return Err(WallxError::DegenerateCharge(g.vec.clone()));
        }
        items.push((z, g, c));
    }
    let zs: Vec<GaussianRational> = items.iter().map(|(z, _, _)| z.clone()).collect();
    if !zs.is_empty() {
        Sector::spanning(&zs)?;
    }
    items.sort_by(|x, y| {
        let c = y.0.cross(&x.0);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            x.1.cmp(y.1)
        }
    });
    let mut rays: Vec<Ray> = Vec::new();
    for (z, g, c) in items {
        match rays.last_mut() {
            Some(r) if r.direction.cross(&z).is_zero() => {
                r.terms.insert(g.clone(), c.clone());
            }
            _ => rays.push(Ray { direction: z, terms: BTreeMap::from([(g.clone(), c.clone())]) }),
        }
    }
    Ok(rays)
}

fn ray_exp(alg: &TruncatedAlgebra, r: &Ray) -> TElem {
    let mut x = TElem::zero();
    for (g, c) in &r.terms {
        x.add_term(g.clone(), c.clone());
    }
    alg.exp(&x)
}

fn clockwise_product(alg: &TruncatedAlgebra, rays: &[Ray]) -> TElem {
    rays.iter().fold(alg.one(), |acc, r| alg.mul(&acc, &ray_exp(alg, r)))
}

fn check_collisions(alg: &TruncatedAlgebra, rays: &[Ray]) -> Result<()> {
    for r in rays {
        let keys: Vec<&GroupoidMorphism> = r.terms.keys().collect();
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                if !proportional(&a.vec, &b.vec) && !alg.commute(a, b) {
                    return Err(WallxError::PhaseCollision(a.vec.clone(), b.vec.clone()));
                }
            }
        }
    }
    Ok(())
}

fn proportional(a: &[i64], b: &[i64]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] * b[j] == a[j] * b[i]))
}

/// Recompute `a` for a new central charge keeping the clockwise product fixed.
pub fn wall_cross(data: &StabilityData, new_charge: &CentralCharge) -> Result<StabilityData> {
    let alg = &data.algebra;
    if new_charge.values.len() != alg.generators.len() {
        return Err(WallxError::InvalidInput("one charge value per generator expected".into()));
    }
    let mut zs_new = Vec::new();
    for v in alg.monoid_vectors() {
        let z = new_charge.eval(alg, &v).expect("monoid lies in span");
        if z.is_zero() {
            return Err(WallxError::DegenerateCharge(v));
        }
        zs_new.push(z);
        if data.charge.eval(alg, &v).expect("monoid lies in span").is_zero() {
            return Err(WallxError::DegenerateCharge(v));
        }
    }
    Sector::spanning(&zs_new)?;
    let old_rays = group_rays(alg, &data.charge, &data.a)?;
    check_collisions(alg, &old_rays)?;
    let target = clockwise_product(alg, &old_rays);
    let mut a_new: BTreeMap<GroupoidMorphism, RatFunc> = BTreeMap::new();
    for h in 1..=alg.height {
        let rays = group_rays(alg, new_charge, &a_new)?;
        let current = clockwise_product(alg, &rays);
        let diff = alg.component(&target.sub(&current), h);
        for (g, c) in diff.terms() {
            a_new.insert(g.clone(), c.clone());
        }
    }
    let rays = group_rays(alg, new_charge, &a_new)?;
    check_collisions(alg, &rays)?;
    debug_assert_eq!(clockwise_product(alg, &rays), target);
    StabilityData::new(alg.clone(), new_charge.clone(), a_new)
}

/// How a sector element is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorMode {
    /// `exp` of the sum of all `a(γ)` in the sector.
    Exponential,
    /// Clockwise product of the ray elements.
    RayProduct,
}

/// Where sector elements are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetAlgebra {
    Torus,
    /// `e_{(i,j,v)} ↦ x^v E_{ij}` in `n × n` matrices over symbolic polynomials.
    Matrix { n: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraValue {
    Torus(TElem),
    Matrix(MatrixElement<MultiPoly>),
}

fn in_sector(data: &StabilityData, v: &Sector) -> BTreeMap<GroupoidMorphism, RatFunc> {
    data.a.iter().filter(|(g, _)| v.contains(&data.z(g))).map(|(g, c)| (g.clone(), c.clone())).collect()
}

/// `A_V` in the truncated torus.
pub fn sector_torus(data: &StabilityData, v: &Sector, mode: SectorMode) -> Result<TElem> {
    let sub = in_sector(data, v);
    let alg = &data.algebra;
    Ok(match mode {
        SectorMode::Exponential => {
            let mut x = TElem::zero();
            for (g, c) in sub {
                x.add_term(g, c);
            }
            alg.exp(&x)
        }
        SectorMode::RayProduct => clockwise_product(alg, &group_rays(alg, &data.charge, &sub)?),
    })
}

pub fn sector_element(data: &StabilityData, v: &Sector, target: TargetAlgebra, mode: SectorMode) -> Result<AlgebraValue> {
    match target {
        TargetAlgebra::Torus => Ok(AlgebraValue::Torus(sector_torus(data, v, mode)?)),
        TargetAlgebra::Matrix { n } => {
            let sub = in_sector(data, v);
            let steps = data.algebra.height.max(n);
            let realize_exp = |terms: &BTreeMap<GroupoidMorphism, RatFunc>| -> Result<MatrixElement<MultiPoly>> {
                let mut x = MatrixElement::zero(n);
                for (g, c) in terms {
                    x = x.add(&realize_term(g, c, n)?)?;
                }
                matrix_exp(&x, steps)
            };
            match mode {
                SectorMode::Exponential => Ok(AlgebraValue::Matrix(realize_exp(&sub)?)),
                SectorMode::RayProduct => {
                    let rays = group_rays(&data.algebra, &data.charge, &sub)?;
                    let mut acc = MatrixElement::identity(n);
                    for r in &rays {
                        acc = mat_mul(&acc, &realize_exp(&r.terms)?)?;
                    }
                    Ok(AlgebraValue::Matrix(acc))
                }
            }
        }
    }
}

fn realize_term(g: &GroupoidMorphism, c: &RatFunc, n: usize) -> Result<MatrixElement<MultiPoly>> {
    if g.src >= n || g.tgt >= n || g.vec.iter().any(|&x| x < 0) {
        return Err(WallxError::InvalidInput(format!("{g} has no matrix realization")));
    }
    let coeff = c.as_laurent().ok_or_else(|| WallxError::InvalidInput(format!("coefficient {c} is not a Laurent polynomial")))?;
    let mono = MultiPoly::term(g.vec.iter().map(|&x| x as u32).collect(), coeff);
    Ok(MatrixElement::unit(n, g.src, g.tgt, mono))
}

/// Realize a torus element as a matrix via `e_{(i,j,v)} ↦ x^v E_{ij}`.
pub fn realize_matrix(x: &TElem, n: usize) -> Result<MatrixElement<MultiPoly>> {
    let mut out = MatrixElement::zero(n);
    for (g, c) in x.terms() {
        out = out.add(&realize_term(g, c, n)?)?;
    }
    Ok(out)
}

fn matrix_exp(x: &MatrixElement<MultiPoly>, steps: usize) -> Result<MatrixElement<MultiPoly>> {
    let n = x.size();
    let mut out = MatrixElement::identity(n);
    let mut power = MatrixElement::identity(n);
    let mut fact = BigInt::one();
    for k in 1..=steps + 1 {
        power = mat_mul(&power, x)?;
        if power.is_zero() {
            return Ok(out);
        }
        if k > steps {
            break;
        }
        fact *= BigInt::from(k);
        let mut scaled = MatrixElement::zero(n);
        for i in 0..n {
            for j in 0..n {
                let e = power.get(i, j);
                let mut d = MultiPoly::zero();
                for (exps, c) in e.terms() {
                    let mut q = LaurentScalar::zero();
                    for (k2, v) in c.terms() {
                        if !(v % &fact).is_zero() {
                            return Err(WallxError::InvalidInput("matrix exponential leaves the integers".into()));
                        }
                        q = q + LaurentScalar::monomial_big(k2, v / &fact);
                    }
                    d = d + MultiPoly::term(exps.clone(), q);
                }
                scaled.set(i, j, d);
            }
        }
        out = out.add(&scaled)?;
    }
    Err(WallxError::NotNilpotent(steps))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy {
    pub height: usize,
    pub difference: AlgebraValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorReport {
    /// Every clockwise split `V = V1 ⊔ V2` satisfies `A_V = A_{V1} A_{V2}`.
    pub pass: bool,
    pub rays: usize,
    /// First split that failed, as the index of the last ray in `V1`.
    pub failed_split: Option<usize>,
    /// Lowest height where `exp(Σ a)` differs from the ray product.
    pub exp_discrepancy: Option<Discrepancy>,
}

/// Clockwise factorization check for the sector element in the truncated torus.
pub fn factor_check(data: &StabilityData, v: &Sector) -> Result<FactorReport> {
    let alg = &data.algebra;
    let sub = in_sector(data, v);
    let rays = group_rays(alg, &data.charge, &sub)?;
    let whole = clockwise_product(alg, &rays);
    let mut failed_split = None;
    for split in 1..rays.len() {
        let left = clockwise_product(alg, &rays[..split]);
        let right = clockwise_product(alg, &rays[split..]);
        if alg.mul(&left, &right) != whole {
            failed_split = Some(split - 1);
            break;
        }
    }
    let direct = sector_torus(data, v, SectorMode::Exponential)?;
    let diff = direct.sub(&whole);
    let exp_discrepancy = (1..=alg.height).find_map(|h| {
        let c = alg.component(&diff, h);
        (!c.is_zero()).then(|| Discrepancy { height: h, difference: AlgebraValue::Torus(c) })
    });
    Ok(FactorReport { pass: failed_split.is_none(), rays: rays.len(), failed_split, exp_discrepancy })
}

/// Clockwise rays of a spectrum with extracted integer invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct DTSpectrum {
    pub rays: Vec<SpectrumRay>,
    /// `Ω` on diagonal classes, when every ray has integer invariants.
    pub omega: Option<BTreeMap<GroupoidMorphism, BigInt>>,
    /// `μ` on off-diagonal classes, when all are integers.
    pub mu: Option<BTreeMap<GroupoidMorphism, BigInt>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRay {
    pub direction: GaussianRational,
    pub terms: BTreeMap<GroupoidMorphism, RatFunc>,
}

pub fn extract_spectrum(data: &StabilityData, v: Option<&Sector>) -> Result<DTSpectrum> {
    let alg = &data.algebra;
    let sub = match v {
        Some(s) => in_sector(data, s),
        None => data.a.clone(),
    };
    let rays = group_rays(alg, &data.charge, &sub)?;
    let mut omega: Option<BTreeMap<GroupoidMorphism, BigInt>> = Some(BTreeMap::new());
    let mut mu: Option<BTreeMap<GroupoidMorphism, BigInt>> = Some(BTreeMap::new());
    for r in &rays {
        for (g, c) in &r.terms {
            if g.src != g.tgt {
                let val = c.as_q().filter(|q| q.is_integer()).map(|q| q.to_integer());
                match (val, mu.as_mut()) {
                    (Some(x), Some(m)) => {
                        m.insert(g.clone(), x);
                    }
                    _ => mu = None,
                }
                continue;
            }
            // Ω(kγ0) = (a(kγ0) - Σ_{d | k, d > 1} ψ_d Ω((k/d)γ0)) / ψ_1
            let p = gcd_slice(&g.vec).abs();
            let prim: Vec<i64> = g.vec.iter().map(|x| x / p).collect();
            let mut rest = c.clone();
            for d in 2..=p {
                if p % d != 0 {
                    continue;
                }
                let lower = GroupoidMorphism::new(g.src, g.tgt, prim.iter().map(|x| x * (p / d)).collect());
                let om = omega.as_ref().and_then(|o| o.get(&lower).cloned()).unwrap_or_default();
                rest = rest - RatFunc::dilog_weight(d).scale_q(&Q::from_integer(om));
            }
            let val = rest.div(&RatFunc::dilog_weight(1)).as_q().filter(|q| q.is_integer()).map(|q| q.to_integer());
            match (val, omega.as_mut()) {
                (Some(x), Some(o)) => {
                    if !x.is_zero() {
                        o.insert(g.clone(), x);
                    }
                }
                _ => omega = None,
            }
        }
    }
    let spectrum_rays = rays.into_iter().map(|r| SpectrumRay { direction: r.direction, terms: r.terms }).collect();
    Ok(DTSpectrum { rays: spectrum_rays, omega, mu })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertMode {
    /// `‖γ‖ ≤ C |Z(γ)|`; `c_sq` is `C²`, or `None` to compute the minimal one.
    NormBound { c_sq: Option<Q>, norm: Norm },
    /// `Q ≤ 0` on `ker Z` and `Q(γ) ≥ 0` on the support; `Q` acts on source vectors.
    QuadraticForm { q: IntMatrix },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `c_sq` is the (minimal or given) `C²` in norm mode.
    Pass { c_sq: Option<Q> },
    Fail { witness: Option<GroupoidMorphism>, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportCertificate {
    pub mode: CertMode,
    pub verdict: Verdict,
}

impl SupportCertificate {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass { .. })
    }

    /// `C` as a float, for display.
    pub fn c_value(&self) -> Option<f64> {
        match &self.verdict {
            Verdict::Pass { c_sq: Some(c) } => c.to_f64().map(f64::sqrt),
            _ => None,
        }
    }
}

fn norm_sq(v: &[i64], norm: Norm) -> Q {
    let n: i64 = match norm {
        Norm::L1 => v.iter().map(|x| x.abs()).sum(),
        Norm::Linf => v.iter().map(|x| x.abs()).max().unwrap_or(0),
        Norm::L2 => return q_int(v.iter().map(|x| x * x).sum()),
    };
    q_int(n * n)
}

pub fn check_support(data: &StabilityData, mode: &CertMode) -> SupportCertificate {
    let fail = |w: Option<&GroupoidMorphism>, reason: String| SupportCertificate {
        mode: mode.clone(),
        verdict: Verdict::Fail { witness: w.cloned(), reason },
    };
    for g in data.a.keys() {
        if data.z(g).is_zero() {
            return fail(Some(g), "central charge vanishes".into());
        }
    }
    match mode {
        CertMode::NormBound { c_sq, norm } => {
            let mut best = Q::zero();
            for g in data.a.keys() {
                let ratio = norm_sq(&g.vec, *norm) / data.z(g).norm_sqr();
                if let Some(c) = c_sq {
                    if &ratio > c {
                        return fail(Some(g), format!("ratio^2 {} exceeds C^2 {}", ratio, c));
                    }
                }
                if ratio > best {
                    best = ratio;
                }
            }
            SupportCertificate { mode: mode.clone(), verdict: Verdict::Pass { c_sq: Some(c_sq.clone().unwrap_or(best)) } }
        }
        CertMode::QuadraticForm { q } => {
            let alg = &data.algebra;
            let r = alg.rank();
            if q.rows != r || q.cols != r {
                return fail(None, "quadratic form has the wrong size".into());
            }
            // Q pulled back to generator coordinates, restricted to ker Z there.
            let m = alg.generators.len();
            let qs: Vec<Vec<Q>> = (0..m)
                .map(|i| (0..m).map(|j| q_int(q.form(&alg.generators[i], &alg.generators[j]))).collect())
                .collect();
            let zrows = vec![
                data.charge.values.iter().map(|z| z.re.clone()).collect::<Vec<Q>>(),
                data.charge.values.iter().map(|z| z.im.clone()).collect::<Vec<Q>>(),
            ];
            let ker = nullspace_q(&zrows, m);
            let k = ker.len();
            let restricted: Vec<Vec<Q>> = (0..k)
                .map(|a| {
                    (0..k)
                        .map(|b| {
                            let mut s = Q::zero();
                            for i in 0..m {
                                for j in 0..m {
                                    s += &ker[a][i] * &qs[i][j] * &ker[b][j];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect();
            if !negative_semidefinite(&restricted) {
                return fail(None, "Q is not negative semidefinite on ker Z".into());
            }
            for g in data.a.keys() {
                if q.form(&g.vec, &g.vec) < 0 {
                    return fail(Some(g), "Q is negative on a support element".into());
                }
            }
            SupportCertificate { mode: mode.clone(), verdict: Verdict::Pass { c_sq: None } }
        }
    }
}

/// Every principal minor of `-m` is non-negative.
fn negative_semidefinite(m: &[Vec<Q>]) -> bool {
    let n = m.len();
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<Q>> = idx.iter().map(|&i| idx.iter().map(|&j| -m[i][j].clone()).collect()).collect();
        if det_q(&sub).is_negative() {
            return false;
        }
    }
    true
}

pub fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for k in c..n {
                let v = &f * &a[c][k];
                a[i][k] -= v;
            }
        }
    }
    det
}

/// Set of morphisms in the support, for reporting.
pub fn support_set(data: &StabilityData) -> BTreeSet<Vec<i64>> {
    data.a.keys().map(|g| g.vec.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairing() -> IntMatrix {
        IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap()
    }

    fn pentagon(height: usize) -> StabilityData {
        let alg = TruncatedAlgebra::torus(pairing(), vec![vec![1, 0], vec![0, 1]], height).unwrap();
        let mut a = dilog_ray(&alg, 0, 0, &[1, 0], 1).unwrap();
        a.extend(dilog_ray(&alg, 0, 0, &[0, 1], 1).unwrap());
        let z = CentralCharge::new(vec![GaussianRational::from_ints(0, 1), GaussianRational::from_ints(1, 0)]);
        StabilityData::new(alg, z, a).unwrap()
    }

    fn swapped() -> CentralCharge {
        CentralCharge::new(vec![GaussianRational::from_ints(1, 0), GaussianRational::from_ints(0, 1)])
    }

    #[test]
    fn pentagon_low_height() {
        let d = pentagon(3);
        let out = wall_cross(&d, &swapped()).unwrap();
        let spec = extract_spectrum(&out, None).unwrap();
        assert_eq!(spec.rays.len(), 3);
        let omega = spec.omega.unwrap();
        let support: BTreeSet<Vec<i64>> = omega.keys().map(|g| g.vec.clone()).collect();
        assert_eq!(support, BTreeSet::from([vec![1, 0], vec![0, 1], vec![1, 1]]));
        assert!(omega.values().all(|v| v.is_one()));
    }

    #[test]
    fn same_charge_is_identity() {
        let d = pentagon(3);
        let out = wall_cross(&d, &d.charge).unwrap();
        assert_eq!(out.a, d.a);
    }

    #[test]
    fn swap_back_is_involution() {
        let d = pentagon(3);
        let there = wall_cross(&d, &swapped()).unwrap();
        let back = wall_cross(&there, &d.charge).unwrap();
        assert_eq!(back.a, d.a);
    }

    #[test]
    fn degenerate_charge_rejected() {
        let d = pentagon(2);
        let z = CentralCharge::new(vec![GaussianRational::from_ints(1, 0), GaussianRational::from_ints(-1, 0)]);
        assert!(matches!(wall_cross(&d, &z), Err(WallxError::DegenerateCharge(_))));
    }

    #[test]
    fn dependent_generators_rejected() {
        let r = TruncatedAlgebra::torus(pairing(), vec![vec![1, 0], vec![2, 0]], 2);
        assert!(matches!(r, Err(WallxError::DependentGenerators(_))));
    }

    #[test]
    fn omega_two_on_single_ray() {
        let alg = TruncatedAlgebra::torus(pairing(), vec![vec![1, 0], vec![0, 1]], 1).unwrap();
        let a = BTreeMap::from([(GroupoidMorphism::new(0, 0, vec![1, 0]), RatFunc::dilog_weight(1).scale_q(&q_int(2)))]);
        let z = CentralCharge::new(vec![GaussianRational::from_ints(0, 1), GaussianRational::from_ints(1, 0)]);
        let d = StabilityData::new(alg, z, a).unwrap();
        let s = extract_spectrum(&d, None).unwrap();
        assert_eq!(s.omega.unwrap().values().cloned().collect::<Vec<_>>(), vec![BigInt::from(2)]);
    }

    #[test]
    fn sector_membership_half_open() {
        let s = Sector::from_angles(&q_int(0), &Q::new(BigInt::from(1), BigInt::from(2))).unwrap();
        assert!(s.contains(&GaussianRational::from_ints(1, 0)));
        assert!(s.contains(&GaussianRational::from_ints(1, 1)));
        assert!(!s.contains(&GaussianRational::from_ints(0, 1)));
        assert!(!s.contains(&GaussianRational::from_ints(1, -1)));
        assert!(Sector::from_angles(&q_int(0), &q_int(1)).is_err());
    }
}
