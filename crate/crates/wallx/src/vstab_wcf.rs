//! V-collections over the `A_n` groupoid, HN sequences, interval elements and
//! the `A_2` stability atlas.
//!
//! Phases are measured in units of π and a shift `[1]` adds exactly 1. The
//! object `M_ij[r]` lies over the groupoid edge `i → j` for even `r` and
//! `j → i` for odd `r`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WallxError};
use crate::lattice_groupoid::{GroupoidMorphism, InducedGroupoid};
use crate::quiver_an::hall::fq_hall_basis;
use crate::quiver_an::{an_groupoid, cone_of, hom_ext, Correspondence, DObject, Indec, MorphismKind};
use crate::scalar::{parse_q, q_frac, q_int, GaussianRational, LaurentScalar, Q};

/// The collection `{C_ij}` restricted to shifted indecomposables.
#[derive(Clone, Debug)]
pub struct VCollection {
    pub n: usize,
    pub groupoid: InducedGroupoid,
}

pub fn build_an_collection(n: usize) -> Result<VCollection> {
    if n == 0 {
        return Err(WallxError::InvalidInput("n must be at least 1".into()));
    }
    Ok(VCollection { n, groupoid: an_groupoid(n) })
}

impl VCollection {
    pub fn contains(&self, i: usize, j: usize, x: &Indec) -> bool {
        x.j <= self.n && x.edge() == (i, j)
    }

    /// Members of `C_ij` with shifts in the given range.
    pub fn members(&self, i: usize, j: usize, shifts: std::ops::RangeInclusive<i64>) -> Vec<Indec> {
        let (lo, hi) = (i.min(j), i.max(j));
        shifts.filter_map(|r| Indec::new(lo, hi, r)).filter(|x| self.contains(i, j, x)).collect()
    }

    /// Label of the nonempty cells, e.g. `M01[2k]` on `0 → 1`.
    pub fn cells(&self) -> Vec<((usize, usize), String)> {
        let mut out = Vec::new();
        for i in 0..=self.n {
            for j in 0..=self.n {
                if i < j {
                    out.push(((i, j), format!("M{i}{j}[2k]")));
                } else if j < i {
                    out.push(((i, j), format!("M{j}{i}[2k+1]")));
                }
            }
        }
        out
    }

    /// The morphism label of an object.
    pub fn epsilon(&self, x: &Indec) -> GroupoidMorphism {
        let (a, b) = x.edge();
        self.groupoid.unique_morphism(a, b).expect("trivial connected groupoid")
    }

    /// `C_ij = C_ji[1]` on the given shift window.
    pub fn shift_property_holds(&self, shifts: std::ops::RangeInclusive<i64>) -> bool {
        (0..=self.n).all(|i| {
            (0..=self.n).all(|j| {
                let a: BTreeSet<Indec> = self.members(i, j, shifts.clone()).into_iter().collect();
                let b: BTreeSet<Indec> = self.members(j, i, shifts.clone()).iter().map(|x| x.shifted(1)).collect();
                a.iter().filter(|x| shifts.contains(&(x.shift - 1))).all(|x| b.contains(x))
                    && b.iter().filter(|x| shifts.contains(&x.shift)).all(|x| a.contains(x))
            })
        })
    }
}

/// `Z(u_ij) = f(j) − f(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VCharge {
    pub f: Vec<GaussianRational>,
}

impl VCharge {
    pub fn z(&self, i: usize, j: usize) -> GaussianRational {
        self.f[j].sub(&self.f[i])
    }

    pub fn of(&self, x: &Indec) -> GaussianRational {
        let z = self.z(x.i, x.j);
        if x.shift.rem_euclid(2) == 0 {
            z
        } else {
            z.scale(&q_int(-1))
        }
    }
}

/// Principal argument in `(−1, 1]`, in units of π.
///
/// Multiples of `1/4` are exact; other directions are the exact value of the
/// nearest double.
pub fn exact_arg(z: &GaussianRational) -> Q {
    let (re, im) = (&z.re, &z.im);
    let eighth = if im.is_zero() {
        Some(if re.is_positive() { 0 } else { 4 })
    } else if re.is_zero() {
        Some(if im.is_positive() { 2 } else { -2 })
    } else if re.abs() == im.abs() {
        Some(match (re.is_positive(), im.is_positive()) {
            (true, true) => 1,
            (false, true) => 3,
            (true, false) => -1,
            (false, false) => -3,
        })
    } else {
        None
    };
    match eighth {
        Some(k) => q_frac(k, 4),
        None => BigRational::from_float(z.arg_pi()).expect("finite argument"),
    }
}

/// Phases `θ01, θ12, θ02` of the three indecomposables of `A_2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct A2Point {
    pub theta01: Q,
    pub theta12: Q,
    pub theta02: Q,
}

impl A2Point {
    pub fn new(theta01: Q, theta12: Q, theta02: Q) -> Self {
        Self { theta01, theta12, theta02 }
    }

    /// The point with `θ01 = 0`.
    pub fn from_alphas(alpha1: Q, alpha2: Q) -> Self {
        let t12 = &alpha1 + &alpha2;
        Self::new(Q::zero(), t12, alpha1)
    }

    /// Parse `"θ01,θ12,θ02"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(WallxError::Parse(format!("expected three phases, got {s:?}")));
        }
        Ok(Self::new(parse_q(parts[0])?, parse_q(parts[1])?, parse_q(parts[2])?))
    }

    pub fn alpha1(&self) -> Q {
        &self.theta02 - &self.theta01
    }

    pub fn alpha2(&self) -> Q {
        &self.theta12 - &self.theta02
    }

    pub fn alpha3(&self) -> Q {
        &self.theta12 - &self.theta01
    }

    /// Phase of a shifted indecomposable of `A_2`.
    pub fn phase(&self, x: &Indec) -> Q {
        let base = match (x.i, x.j) {
            (0, 1) => &self.theta01,
            (1, 2) => &self.theta12,
            (0, 2) => &self.theta02,
            _ => panic!("{x} is not an A_2 indecomposable"),
        };
        base + q_int(x.shift)
    }

    pub fn rotate(&self, tau: &Q) -> Self {
        Self::new(&self.theta01 + tau, &self.theta12 + tau, &self.theta02 + tau)
    }
}

impl fmt::Display for A2Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ=({}, {}, {}) α=({}, {}, {})", self.theta01, self.theta12, self.theta02, self.alpha1(), self.alpha2(), self.alpha3())
    }
}

/// `Z` from `f: {0..n} → C`; for `n = 2` also the phases, with `θ_ij` raised by `2·lifts` in
/// the order `01, 12, 02`.
pub fn charge_from_f(f: &[GaussianRational], lifts: &[i64]) -> Result<(VCharge, Option<A2Point>)> {
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            if f[i] == f[j] {
                return Err(WallxError::DegenerateF(i, j));
            }
        }
    }
    let charge = VCharge { f: f.to_vec() };
    if f.len() != 3 {
        return Ok((charge, None));
    }
    let lift = |k: usize| q_int(2 * lifts.get(k).copied().unwrap_or(0));
    let point = A2Point::new(
        exact_arg(&charge.z(0, 1)) + lift(0),
        exact_arg(&charge.z(1, 2)) + lift(1),
        exact_arg(&charge.z(0, 2)) + lift(2),
    );
    Ok((charge, Some(point)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    /// `α1 > 0, α2 > 0, α3 < 1`.
    Upper,
    /// `α1 < 0, α2 < 0, α3 > −1`.
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coamoeba {
    /// Inside the translate of a sheet by `2·translate`.
    Member { sheet: Sheet, translate: (i64, i64) },
    /// On the closure but not the open region.
    Boundary,
    Outside,
}

impl Coamoeba {
    pub fn is_member(&self) -> bool {
        matches!(self, Coamoeba::Member { .. })
    }
}

fn nearest_even_translate(x: &Q) -> i64 {
    ((x / q_int(2)) + q_frac(1, 2)).floor().to_integer().to_i64().expect("small coordinate")
}

pub fn coamoeba_member(p: &A2Point) -> Coamoeba {
    let (a, b) = (nearest_even_translate(&p.alpha1()), nearest_even_translate(&p.alpha2()));
    let x = p.alpha1() - q_int(2 * a);
    let y = p.alpha2() - q_int(2 * b);
    let s = &x + &y;
    let one = Q::one();
    if x.is_positive() && y.is_positive() {
        return match s.cmp(&one) {
            std::cmp::Ordering::Less => Coamoeba::Member { sheet: Sheet::Upper, translate: (a, b) },
            std::cmp::Ordering::Equal => Coamoeba::Boundary,
            std::cmp::Ordering::Greater => Coamoeba::Outside,
        };
    }
    if x.is_negative() && y.is_negative() {
        return match s.cmp(&-one) {
            std::cmp::Ordering::Greater => Coamoeba::Member { sheet: Sheet::Lower, translate: (a, b) },
            std::cmp::Ordering::Equal => Coamoeba::Boundary,
            std::cmp::Ordering::Less => Coamoeba::Outside,
        };
    }
    let on_closure = (x.is_zero() && y.abs() <= one) || (y.is_zero() && x.abs() <= one);
    if on_closure {
        Coamoeba::Boundary
    } else {
        Coamoeba::Outside
    }
}

pub const M01: Indec = Indec { i: 0, j: 1, shift: 0 };
pub const M12: Indec = Indec { i: 1, j: 2, shift: 0 };
pub const M02: Indec = Indec { i: 0, j: 2, shift: 0 };
pub const A2_INDECS: [Indec; 3] = [M01, M12, M02];

/// Which indecomposables are semistable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StabilityType {
    #[serde(rename = "ALL")]
    All,
    /// `M12` is destabilized by `M02 → M12 → M01[1]`.
    I,
    /// `M01` is destabilized by `M12[−1] → M01 → M02`.
    II,
    /// `M02` is destabilized by `M01 → M02 → M12`.
    III,
}

impl StabilityType {
    pub const EVERY: [StabilityType; 4] = [StabilityType::All, StabilityType::I, StabilityType::II, StabilityType::III];

    pub fn semistable(self) -> Vec<Indec> {
        let unstable = match self {
            StabilityType::All => None,
            StabilityType::I => Some(M12),
            StabilityType::II => Some(M01),
            StabilityType::III => Some(M02),
        };
        A2_INDECS.into_iter().filter(|x| Some(*x) != unstable).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ALL" => Ok(StabilityType::All),
            "I" => Ok(StabilityType::I),
            "II" => Ok(StabilityType::II),
            "III" => Ok(StabilityType::III),
            _ => Err(WallxError::Parse(format!("unknown stability type {s:?}"))),
        }
    }
}

impl fmt::Display for StabilityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StabilityType::All => "ALL",
            StabilityType::I => "I",
            StabilityType::II => "II",
            StabilityType::III => "III",
        };
        write!(f, "{s}")
    }
}

pub fn type_set_label(s: &BTreeSet<StabilityType>) -> String {
    if s.is_empty() {
        return "none".into();
    }
    s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+")
}

/// Order in which HN factors are laid along the groupoid path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathOrientation {
    /// The factor of highest phase sits on the first edge.
    #[default]
    Descending,
    /// The factor of lowest phase sits on the first edge.
    Ascending,
}

/// An HN sequence with factors listed by decreasing phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HNResult {
    pub object: Indec,
    pub path: Vec<usize>,
    pub orientation: PathOrientation,
    pub factors: Vec<(Indec, Q)>,
}

impl HNResult {
    pub fn shifted(&self, k: i64) -> Result<Self> {
        let factors: Vec<(Indec, Q)> = self.factors.iter().map(|(x, t)| (x.shifted(k), t + q_int(k))).collect();
        let object = self.object.shifted(k);
        let (path, orientation) =
            path_of(&object, &factors).ok_or_else(|| WallxError::InvalidInput(format!("no path for {object}")))?;
        Ok(Self { object, path, orientation, factors })
    }
}

fn chain(edges: impl Iterator<Item = (usize, usize)>) -> Option<Vec<usize>> {
    let mut path: Vec<usize> = Vec::new();
    for (a, b) in edges {
        match path.last() {
            None => path.push(a),
            Some(&l) if l != a => return None,
            _ => {}
        }
        path.push(b);
    }
    Some(path)
}

fn oriented_path(factors: &[(Indec, Q)], orientation: PathOrientation) -> Option<Vec<usize>> {
    match orientation {
        PathOrientation::Descending => chain(factors.iter().map(|(x, _)| x.edge())),
        PathOrientation::Ascending => chain(factors.iter().rev().map(|(x, _)| x.edge())),
    }
}

/// The groupoid path of a factor sequence, trying the descending order first.
pub fn path_of(object: &Indec, factors: &[(Indec, Q)]) -> Option<(Vec<usize>, PathOrientation)> {
    let (i, j) = object.edge();
    [PathOrientation::Descending, PathOrientation::Ascending].into_iter().find_map(|o| {
        let p = oriented_path(factors, o)?;
        (p.first() == Some(&i) && p.last() == Some(&j)).then_some((p, o))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Pass { sequences: Vec<HNResult> },
    Fail { witness: String },
}

impl OracleVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, OracleVerdict::Pass { .. })
    }
}

const WINDOW: std::ops::RangeInclusive<i64> = -2..=1;

/// All factor sequences of length one or two for `x` with strictly decreasing phases.
pub fn hn_candidates(p: &A2Point, semistable: &[Indec], x: &Indec) -> Vec<Vec<(Indec, Q)>> {
    let mut out = Vec::new();
    if semistable.contains(&x.unshifted()) {
        out.push(vec![(*x, p.phase(x))]);
    }
    let target = signed_class(x);
    let shifted: Vec<(Indec, Q, [i64; 2])> = semistable
        .iter()
        .flat_map(|s| (x.shift - 3..=x.shift + 3).map(move |r| s.shifted(r)))
        .map(|y| (y, p.phase(&y), signed_class(&y)))
        .collect();
    for (a, ta, ca) in &shifted {
        for (b, tb, cb) in &shifted {
            if ca[0] + cb[0] != target[0] || ca[1] + cb[1] != target[1] || ta <= tb {
                continue;
            }
            if cone_of(b, a, MorphismKind::Beta).ok().as_deref() == Some(std::slice::from_ref(x)) {
                out.push(vec![(*a, ta.clone()), (*b, tb.clone())]);
            }
        }
    }
    out
}

fn signed_class(x: &Indec) -> [i64; 2] {
    let sign = if x.shift.rem_euclid(2) == 0 { 1 } else { -1 };
    let d = x.dims(2);
    [sign * d[0] as i64, sign * d[1] as i64]
}

/// Brute-force check of a declared set of semistables at `p`.
pub fn a2_hn_oracle(p: &A2Point, semistable: &[Indec]) -> OracleVerdict {
    let objs: Vec<(Indec, Q)> =
        semistable.iter().flat_map(|a| WINDOW.map(move |r| a.shifted(r))).map(|x| (x, p.phase(&x))).collect();
    for (x, tx) in &objs {
        for (y, ty) in &objs {
            if tx > ty && hom_ext(x, y).dim(0) > 0 {
                return OracleVerdict::Fail { witness: format!("Hom({x}, {y}) ≠ 0 with phases {tx} > {ty}") };
            }
        }
    }
    let mut sequences = Vec::new();
    for x in A2_INDECS {
        let found = hn_candidates(p, semistable, &x);
        match found.len() {
            0 => return OracleVerdict::Fail { witness: format!("{x} has no HN sequence") },
            1 => {}
            _ => return OracleVerdict::Fail { witness: format!("{x} has {} HN sequences", found.len()) },
        }
        let factors = found.into_iter().next().unwrap();
        let Some((path, orientation)) = path_of(&x, &factors) else {
            return OracleVerdict::Fail { witness: format!("factors of {x} do not form a path") };
        };
        sequences.push(HNResult { object: x, path, orientation, factors });
    }
    OracleVerdict::Pass { sequences }
}

fn dividing_line(p: &A2Point) -> Option<String> {
    let (zero, one) = (Q::zero(), Q::one());
    for (name, a) in [("α1", p.alpha1()), ("α2", p.alpha2()), ("α3", p.alpha3())] {
        if a == zero || a == one {
            return Some(format!("{name} = {a}"));
        }
    }
    None
}

/// Types allowed by the pre-slicing and HN inequalities.
pub fn inequality_types(p: &A2Point) -> Result<BTreeSet<StabilityType>> {
    if let Some(line) = dividing_line(p) {
        return Err(WallxError::BoundaryAmbiguity(format!("{p} lies on {line}")));
    }
    let (zero, one) = (Q::zero(), Q::one());
    let (a1, a2, a3) = (p.alpha1(), p.alpha2(), p.alpha3());
    let mut out = BTreeSet::new();
    if a1 > zero && a2 > zero && a3 < one {
        out.insert(StabilityType::All);
    }
    if a1 > one {
        out.insert(StabilityType::I);
    }
    if a2 > one {
        out.insert(StabilityType::II);
    }
    if a3 < zero {
        out.insert(StabilityType::III);
    }
    Ok(out)
}

/// Types whose assignment passes [`a2_hn_oracle`].
pub fn oracle_types(p: &A2Point) -> BTreeSet<StabilityType> {
    StabilityType::EVERY.into_iter().filter(|t| a2_hn_oracle(p, &t.semistable()).passed()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub types: BTreeSet<StabilityType>,
    pub coamoeba: Coamoeba,
}

pub fn a2_classify(p: &A2Point) -> Result<Classification> {
    let types = inequality_types(p)?;
    for t in &types {
        if let OracleVerdict::Fail { witness } = a2_hn_oracle(p, &t.semistable()) {
            return Err(WallxError::OracleDisagreement(format!("{t} at {p}: {witness}")));
        }
    }
    Ok(Classification { types, coamoeba: coamoeba_member(p) })
}

/// A stability condition on the `A_2` collection: a point and an admissible type.
#[derive(Clone, Debug)]
pub struct A2Stability {
    pub point: A2Point,
    pub stype: StabilityType,
    hn: BTreeMap<Indec, Vec<(Indec, Q)>>,
}

impl A2Stability {
    pub fn new(point: A2Point, stype: StabilityType) -> Result<Self> {
        match a2_hn_oracle(&point, &stype.semistable()) {
            OracleVerdict::Fail { witness } => {
                Err(WallxError::InvalidInput(format!("{stype} is not admissible at {point}: {witness}")))
            }
            OracleVerdict::Pass { sequences } => {
                let hn = sequences.into_iter().map(|s| (s.object, s.factors)).collect();
                Ok(Self { point, stype, hn })
            }
        }
    }

    pub fn semistable(&self) -> Vec<Indec> {
        self.stype.semistable()
    }

    /// No two semistable phases differ by an integer.
    pub fn is_generic(&self) -> bool {
        [self.point.alpha1(), self.point.alpha2(), self.point.alpha3()].iter().all(|a| !a.is_integer())
    }

    pub fn hn_factors(&self, x: &Indec) -> Vec<(Indec, Q)> {
        self.hn[&x.unshifted()].iter().map(|(f, t)| (f.shifted(x.shift), t + q_int(x.shift))).collect()
    }

    pub fn hn(&self, x: &Indec) -> Result<HNResult> {
        let base = &self.hn[&x.unshifted()];
        let object = x.unshifted();
        let (path, orientation) = path_of(&object, base).expect("oracle-checked");
        HNResult { object, path, orientation, factors: base.clone() }.shifted(x.shift)
    }

    /// Sum of the dimension vectors of the HN factors of every summand.
    pub fn factor_dims(&self, e: &DObject) -> Vec<usize> {
        let mut out = vec![0; 2];
        for (x, m) in e.summands() {
            for (f, _) in self.hn_factors(x) {
                for (o, d) in out.iter_mut().zip(f.dims(2)) {
                    *o += m * d;
                }
            }
        }
        out
    }
}

/// The half-open phase interval `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: &Q) -> bool {
        &self.lo <= t && t < &self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// Coefficients of interval elements.
pub trait Coeff: Clone + PartialEq + fmt::Display {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
}

impl Coeff for Q {
    fn nil() -> Self {
        <Q as Zero>::zero()
    }
    fn unit() -> Self {
        <Q as One>::one()
    }
    fn is_nil(&self) -> bool {
        <Q as Zero>::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coeff for LaurentScalar {
    fn nil() -> Self {
        LaurentScalar::zero()
    }
    fn unit() -> Self {
        LaurentScalar::one()
    }
    fn is_nil(&self) -> bool {
        LaurentScalar::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn times(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
}

pub type HallEntry<C> = BTreeMap<DObject, C>;

fn add_into<C: Coeff>(e: &mut HallEntry<C>, k: DObject, c: C) {
    let slot = e.entry(k.clone()).or_insert_with(C::nil);
    *slot = slot.plus(&c);
    if slot.is_nil() {
        e.remove(&k);
    }
}

/// The 3×3 matrix `A_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalElement<C: Coeff> {
    pub interval: Interval,
    pub entries: Vec<Vec<HallEntry<C>>>,
}

impl<C: Coeff> IntervalElement<C> {
    pub fn identity(interval: Interval) -> Self {
        let entries = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { HallEntry::from([(DObject::zero(), C::unit())]) } else { HallEntry::new() })
                    .collect()
            })
            .collect();
        Self { interval, entries }
    }
}

impl<C: Coeff> fmt::Display for IntervalElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A{}", self.interval)?;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let terms: Vec<String> = e.iter().map(|(k, c)| format!("{c}·[{k}]")).collect();
                let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                writeln!(f, "  ({i},{j}): {body}")?;
            }
        }
        Ok(())
    }
}

fn check_endpoints(stab: &A2Stability, ends: &[&Q]) -> Result<()> {
    for x in stab.semistable() {
        for t in ends {
            let d = *t - stab.point.phase(&x);
            if d.is_integer() {
                return Err(WallxError::EndpointPhase(format!("{} has phase {t}", x.shifted(d.to_integer().to_i64().unwrap()))));
            }
        }
    }
    Ok(())
}

fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("small phase")
}

/// `A_I`: every object whose HN factors lie in `I` and lay out along a path `i → j`.
///
/// With `restricted`, only indecomposable objects appear.
pub fn interval_element<C: Coeff>(
    stab: &A2Stability,
    interval: &Interval,
    cutoff: &[usize],
    orientation: PathOrientation,
    restricted: bool,
) -> Result<IntervalElement<C>> {
    if !stab.is_generic() {
        return Err(WallxError::InvalidInput(format!("two semistable phases coincide at {}", stab.point)));
    }
    check_endpoints(stab, &[&interval.lo, &interval.hi])?;
    let mut out = IntervalElement::<C>::identity(interval.clone());
    if interval.is_empty() {
        return Ok(out);
    }
    let fits = |d: &[usize]| d.iter().zip(cutoff).all(|(a, c)| a <= c);
    let mut pieces: Vec<(Indec, Vec<(Indec, Q)>, Vec<usize>)> = Vec::new();
    for r in floor_i64(&interval.lo) - 3..=floor_i64(&interval.hi) + 3 {
        for x in A2_INDECS {
            let x = x.shifted(r);
            let fac = stab.hn_factors(&x);
            let dims = stab.factor_dims(&DObject::indec(x));
            if fac.iter().all(|(_, t)| interval.contains(t)) && fits(&dims) {
                pieces.push((x, fac, dims));
            }
        }
    }
    let max_pieces = if restricted { 1 } else { pieces.len() };
    let mut chosen: Vec<usize> = Vec::new();
    collect_objects(&pieces, 0, &mut chosen, &vec![0; 2], max_pieces, &fits, &mut |sel: &[usize]| {
        let mut atoms: Vec<(Indec, Q)> = sel.iter().flat_map(|k| pieces[*k].1.clone()).collect();
        atoms.sort_by(|a, b| b.1.cmp(&a.1));
        if let Some(path) = oriented_path(&atoms, orientation) {
            let e = DObject::from_summands(sel.iter().map(|k| pieces[*k].0));
            let (i, j) = (path[0], *path.last().unwrap());
            add_into(&mut out.entries[i][j], e, C::unit());
        }
    });
    Ok(out)
}

fn collect_objects(
    pieces: &[(Indec, Vec<(Indec, Q)>, Vec<usize>)],
    start: usize,
    chosen: &mut Vec<usize>,
    dims: &[usize],
    max: usize,
    fits: &dyn Fn(&[usize]) -> bool,
    emit: &mut dyn FnMut(&[usize]),
) {
    if !chosen.is_empty() {
        emit(chosen);
    }
    if chosen.len() == max {
        return;
    }
    for k in start..pieces.len() {
        let (_, fac, d) = &pieces[k];
        let clash = chosen.iter().any(|c| pieces[*c].1.iter().any(|(a, _)| fac.iter().any(|(b, _)| a == b)));
        let next: Vec<usize> = dims.iter().zip(d).map(|(a, b)| a + b).collect();
        if clash || !fits(&next) {
            continue;
        }
        chosen.push(k);
        collect_objects(pieces, k + 1, chosen, &next, max, fits, emit);
        chosen.pop();
    }
}

type BasisMul<'a, C> = dyn Fn(&DObject, &DObject) -> Result<HallEntry<C>> + 'a;

/// `(L · R)_ij = Σ_k mul(L_ik, R_kj)`, dropping pairs whose factor dimensions exceed the cutoff.
fn interval_product<C: Coeff>(
    stab: &A2Stability,
    l: &IntervalElement<C>,
    r: &IntervalElement<C>,
    cutoff: &[usize],
    mul: &BasisMul<'_, C>,
) -> Result<Vec<Vec<HallEntry<C>>>> {
    let mut out = vec![vec![HallEntry::<C>::new(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for (a, ca) in &l.entries[i][k] {
                    for (b, cb) in &r.entries[k][j] {
                        let d: Vec<usize> =
                            stab.factor_dims(a).iter().zip(stab.factor_dims(b)).map(|(x, y)| x + y).collect();
                        if d.iter().zip(cutoff).any(|(x, c)| x > c) {
                            continue;
                        }
                        let w = ca.times(cb);
                        for (e, c) in mul(a, b)? {
                            add_into(&mut out[i][j], e, c.times(&w));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// How interval elements are multiplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HallMode {
    /// Point counts over `F_q` with the full extension correspondence.
    Oracle { q: u64 },
    /// The indecomposable-cone product in the stack basis.
    Restricted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryDiscrepancy {
    pub entry: (usize, usize),
    pub object: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WcfReport {
    pub pass: bool,
    pub compared: usize,
    pub discrepancies: Vec<EntryDiscrepancy>,
}

fn compare<C: Coeff>(l: &[Vec<HallEntry<C>>], r: &[Vec<HallEntry<C>>]) -> WcfReport {
    let mut compared = 0;
    let mut discrepancies = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let keys: BTreeSet<&DObject> = l[i][j].keys().chain(r[i][j].keys()).collect();
            for k in keys {
                compared += 1;
                let (a, b) = (l[i][j].get(k), r[i][j].get(k));
                if a != b {
                    let show = |c: Option<&C>| c.map(|c| c.to_string()).unwrap_or_else(|| "0".into());
                    discrepancies.push(EntryDiscrepancy { entry: (i, j), object: k.to_string(), lhs: show(a), rhs: show(b) });
                }
            }
        }
    }
    WcfReport { pass: discrepancies.is_empty(), compared, discrepancies }
}

fn oracle_mul(q: u64, cutoff: &[usize]) -> impl Fn(&DObject, &DObject) -> Result<HallEntry<Q>> + '_ {
    move |a, b| fq_hall_basis(q, 2, a, b, cutoff, Correspondence::FullExt)
}

fn restricted_mul(a: &DObject, b: &DObject) -> Result<HallEntry<LaurentScalar>> {
    if a.is_zero() {
        return Ok(HallEntry::from([(b.clone(), LaurentScalar::one())]));
    }
    if b.is_zero() {
        return Ok(HallEntry::from([(a.clone(), LaurentScalar::one())]));
    }
    let (Some(x), Some(y)) = (a.as_indec(), b.as_indec()) else {
        return Err(WallxError::InvalidInput(format!("restricted product of decomposable {a}, {b}")));
    };
    Ok(restricted_cone(&x, &y).map(|e| (DObject::indec(e), LaurentScalar::one())).into_iter().collect())
}

/// The middle term of the nonsplit triangle `x → E → y → x[1]` when it is indecomposable.
pub fn restricted_cone(x: &Indec, y: &Indec) -> Option<Indec> {
    match cone_of(y, x, MorphismKind::Beta).ok()?.as_slice() {
        [e] => Some(*e),
        _ => None,
    }
}

fn verify_generic<C: Coeff>(
    stab: &A2Stability,
    thetas: &[Q; 3],
    cutoff: &[usize],
    orientation: PathOrientation,
    restricted: bool,
    mul: &BasisMul<'_, C>,
) -> Result<WcfReport> {
    let [t1, t2, t3] = thetas;
    if !(t1 <= t2 && t2 <= t3) {
        return Err(WallxError::InvalidInput(format!("phases must increase: {t1}, {t2}, {t3}")));
    }
    let low = interval_element::<C>(stab, &Interval::new(t1.clone(), t2.clone()), cutoff, orientation, restricted)?;
    let high = interval_element::<C>(stab, &Interval::new(t2.clone(), t3.clone()), cutoff, orientation, restricted)?;
    let total = interval_element::<C>(stab, &Interval::new(t1.clone(), t3.clone()), cutoff, orientation, restricted)?;
    let lhs = match orientation {
        PathOrientation::Descending => interval_product(stab, &high, &low, cutoff, mul)?,
        PathOrientation::Ascending => interval_product(stab, &low, &high, cutoff, &|a, b| mul(b, a))?,
    };
    Ok(compare(&lhs, &total.entries))
}

/// Compare the product of the two sub-interval elements with the element of the whole interval.
///
/// With [`PathOrientation::Descending`] the product is `A_[θ2,θ3) · A_[θ1,θ2)` with the left
/// factor as subobject; with [`PathOrientation::Ascending`] it is `A_[θ1,θ2) · A_[θ2,θ3)` with
/// the right factor as subobject.
pub fn wcf_verify(
    stab: &A2Stability,
    thetas: &[Q; 3],
    mode: HallMode,
    cutoff: &[usize],
    orientation: PathOrientation,
) -> Result<WcfReport> {
    match mode {
        HallMode::Oracle { q } => verify_generic::<Q>(stab, thetas, cutoff, orientation, false, &oracle_mul(q, cutoff)),
        HallMode::Restricted => {
            verify_generic::<LaurentScalar>(stab, thetas, cutoff, orientation, true, &restricted_mul)
        }
    }
}

/// Compare `A_I` for two stability conditions.
pub fn chamber_invariance(
    a: &A2Stability,
    b: &A2Stability,
    interval: &Interval,
    mode: HallMode,
    cutoff: &[usize],
    orientation: PathOrientation,
) -> Result<WcfReport> {
    let restricted = mode == HallMode::Restricted;
    let ea = interval_element::<Q>(a, interval, cutoff, orientation, restricted)?;
    let eb = interval_element::<Q>(b, interval, cutoff, orientation, restricted)?;
    Ok(compare(&ea.entries, &eb.entries))
}

/// One sample of the atlas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPoint {
    pub alpha1: Q,
    pub alpha2: Q,
    pub coamoeba: Coamoeba,
    /// `None` on a dividing line.
    pub types: Option<BTreeSet<StabilityType>>,
    pub oracle: BTreeSet<StabilityType>,
}

impl RegionPoint {
    pub fn agrees(&self) -> bool {
        self.types.as_ref().is_none_or(|t| *t == self.oracle)
    }
}

pub fn region_point(alpha1: Q, alpha2: Q) -> RegionPoint {
    let p = A2Point::from_alphas(alpha1.clone(), alpha2.clone());
    RegionPoint { coamoeba: coamoeba_member(&p), types: inequality_types(&p).ok(), oracle: oracle_types(&p), alpha1, alpha2 }
}

/// Cell centres of a `grid × grid` subdivision of `[lo, hi]²`.
pub fn grid_points(grid: usize, lo: &Q, hi: &Q) -> Vec<(Q, Q)> {
    let step = (hi - lo) / q_int(grid as i64);
    let centre = |k: usize| lo + &step * (q_int(k as i64) + q_frac(1, 2));
    (0..grid).flat_map(|a| (0..grid).map(move |b| (centre(a), centre(b)))).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionSummary {
    pub points: usize,
    pub boundary: usize,
    pub disagreements: usize,
    pub coamoeba_members: usize,
    /// Type-set label to number of coamoeba points.
    pub regions: BTreeMap<String, usize>,
    /// Type-set label to the number of admissible types.
    pub multiplicity: BTreeMap<String, usize>,
}

pub fn summarize(points: &[RegionPoint]) -> RegionSummary {
    let mut s = RegionSummary { points: points.len(), ..Default::default() };
    for p in points {
        if !p.agrees() {
            s.disagreements += 1;
        }
        let Some(types) = &p.types else {
            s.boundary += 1;
            continue;
        };
        if p.coamoeba.is_member() {
            s.coamoeba_members += 1;
            let label = type_set_label(types);
            *s.regions.entry(label.clone()).or_insert(0) += 1;
            s.multiplicity.insert(label, types.len());
        }
    }
    s
}

/// The seven region types and their multiplicities.
pub fn expected_regions() -> BTreeMap<String, usize> {
    use StabilityType::*;
    [vec![All], vec![I], vec![II], vec![III], vec![I, II], vec![I, III], vec![II, III]]
        .into_iter()
        .map(|v| {
            let s: BTreeSet<StabilityType> = v.into_iter().collect();
            (type_set_label(&s), s.len())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q {
        parse_q(s).unwrap()
    }

    #[test]
    fn collection_cells() {
        let c = build_an_collection(2).unwrap();
        assert_eq!(c.cells().len(), 6);
        assert!(c.contains(1, 0, &M01.shifted(1)));
        assert!(c.contains(0, 1, &M01.shifted(-2)));
        assert!(c.shift_property_holds(-3..=3));
        let c1 = build_an_collection(1).unwrap();
        assert_eq!(c1.members(0, 1, -2..=2), vec![M01.shifted(-2), M01, M01.shifted(2)]);
        assert!(build_an_collection(0).is_err());
    }

    #[test]
    fn charge_examples() {
        let f = [GaussianRational::from_ints(0, 0), GaussianRational::from_ints(-1, 1), GaussianRational::from_ints(0, 2)];
        let (_, p) = charge_from_f(&f, &[]).unwrap();
        let p = p.unwrap();
        assert_eq!((p.theta01.clone(), p.theta12.clone(), p.theta02.clone()), (q("3/4"), q("1/4"), q("1/2")));
        assert_eq!((p.alpha1(), p.alpha2(), p.alpha3()), (q("-1/4"), q("-1/4"), q("-1/2")));
        let c = GaussianRational::from_ints(5, -3);
        let g: Vec<GaussianRational> = f.iter().map(|x| x.add(&c)).collect();
        assert_eq!(charge_from_f(&g, &[]).unwrap().1.unwrap(), p);
        let rot: Vec<GaussianRational> =
            f.iter().map(|x| GaussianRational::new(-x.im.clone(), x.re.clone())).collect();
        let (_, r) = charge_from_f(&rot, &[1, 0, 0]).unwrap();
        assert_eq!(r.unwrap(), p.rotate(&q("1/2")));
        let bad = [GaussianRational::from_ints(1, 1), GaussianRational::from_ints(1, 1), GaussianRational::from_ints(0, 2)];
        assert!(matches!(charge_from_f(&bad, &[]), Err(WallxError::DegenerateF(0, 1))));
    }

    #[test]
    fn coamoeba_examples() {
        let m = |a: &str, b: &str| coamoeba_member(&A2Point::from_alphas(q(a), q(b)));
        assert_eq!(m("0.3", "0.3"), Coamoeba::Member { sheet: Sheet::Upper, translate: (0, 0) });
        assert_eq!(m("0.5", "-0.5"), Coamoeba::Outside);
        assert_eq!(m("0", "0"), Coamoeba::Boundary);
        assert_eq!(m("-0.3", "-0.2"), Coamoeba::Member { sheet: Sheet::Lower, translate: (0, 0) });
        assert_eq!(m("2.3", "-1.8"), Coamoeba::Member { sheet: Sheet::Upper, translate: (1, -1) });
    }

    #[test]
    fn classify_examples() {
        let c = |a: &str, b: &str| a2_classify(&A2Point::from_alphas(q(a), q(b))).unwrap().types;
        assert_eq!(c("0.3", "0.3"), BTreeSet::from([StabilityType::All]));
        assert_eq!(c("-0.3", "-0.2"), BTreeSet::from([StabilityType::III]));
        assert_eq!(c("1.2", "0.4"), BTreeSet::from([StabilityType::I]));
        assert!(matches!(
            a2_classify(&A2Point::from_alphas(q("1"), q("0.4"))),
            Err(WallxError::BoundaryAmbiguity(_))
        ));
    }

    #[test]
    fn hn_of_m02_in_case_three() {
        let p = A2Point::new(q("3/4"), q("1/4"), q("1/2"));
        let OracleVerdict::Pass { sequences } = a2_hn_oracle(&p, &StabilityType::III.semistable()) else {
            panic!("case III must pass");
        };
        let s = sequences.iter().find(|s| s.object == M02).unwrap();
        assert_eq!(s.factors, vec![(M01, q("3/4")), (M12, q("1/4"))]);
        assert_eq!(s.path, vec![0, 1, 2]);
        let stab = A2Stability::new(p, StabilityType::III).unwrap();
        let h = stab.hn(&M02.shifted(2)).unwrap();
        assert_eq!(h.factors, vec![(M01.shifted(2), q("11/4")), (M12.shifted(2), q("9/4"))]);
        assert_eq!(stab.hn(&M01).unwrap().factors.len(), 1);
    }

    #[test]
    fn empty_interval_is_identity() {
        let stab = A2Stability::new(A2Point::from_alphas(q("0.3"), q("0.3")), StabilityType::All).unwrap();
        let t = q("0.15");
        let e = interval_element::<Q>(&stab, &Interval::new(t.clone(), t), &[2, 2], PathOrientation::Descending, false)
            .unwrap();
        assert_eq!(e, IntervalElement::identity(e.interval.clone()));
        assert!(matches!(
            interval_element::<Q>(&stab, &Interval::new(q("0"), q("0.5")), &[2, 2], PathOrientation::Descending, false),
            Err(WallxError::EndpointPhase(_))
        ));
    }
}
