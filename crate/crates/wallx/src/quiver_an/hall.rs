//! The derived Hall product of `A_n` realized by counting over `F_q`.
//!
//! Objects of the bounded derived category are direct sums of shifted
//! indecomposables ([`DObject`]). A morphism `Y → X[1]` splits into module maps
//! `f_r: Y_r → X_{r−1}` and classes `η_r ∈ Ext^1(Y_r, X_r)`, where `Y_r` is the
//! module of summands of shift `r`. The shift-`r` part of the cone is an
//! extension of `ker f_r` by `coker f_{r+1}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::fq::{all_vectors, extension, hom_complex, span_vectors, FqRep, Mat};
use super::{hom_ext, Indec};
use crate::error::{Result, WallxError};
use crate::scalar::Q;

/// A direct sum of shifted indecomposables with multiplicities.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DObject(BTreeMap<Indec, usize>);

pub type OracleElement = BTreeMap<DObject, Q>;

impl DObject {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn indec(x: Indec) -> Self {
        Self(BTreeMap::from([(x, 1)]))
    }

    pub fn from_summands(it: impl IntoIterator<Item = Indec>) -> Self {
        let mut out = Self::zero();
        for x in it {
            *out.0.entry(x).or_insert(0) += 1;
        }
        out
    }

    pub fn summands(&self) -> impl Iterator<Item = (&Indec, usize)> {
        self.0.iter().map(|(x, m)| (x, *m))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_indec(&self) -> Option<Indec> {
        match self.0.iter().next() {
            Some((x, 1)) if self.0.len() == 1 => Some(*x),
            _ => None,
        }
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (x, m) in &o.0 {
            *out.0.entry(*x).or_insert(0) += m;
        }
        out
    }

    pub fn shift(&self, k: i64) -> Self {
        Self(self.0.iter().map(|(x, m)| (x.shifted(k), *m)).collect())
    }

    /// Total cohomology dimension on vertices `1..=n`.
    pub fn total_dims(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for (x, m) in &self.0 {
            for (o, d) in out.iter_mut().zip(x.dims(n)) {
                *o += m * d;
            }
        }
        out
    }

    /// Class in `Z^{n+1}` after `φ`, with the sign `(−1)^shift`.
    pub fn class(&self, n: usize) -> Vec<i64> {
        let mut out = vec![0; n + 1];
        for (x, m) in &self.0 {
            let s = if x.shift.rem_euclid(2) == 0 { 1 } else { -1 };
            out[x.j] += s * *m as i64;
            out[x.i] -= s * *m as i64;
        }
        out
    }

    fn shifts(&self) -> BTreeSet<i64> {
        self.0.keys().map(|x| x.shift).collect()
    }

    fn module_at(&self, q: u64, n: usize, r: i64) -> FqRep {
        let parts: Vec<FqRep> = self
            .0
            .iter()
            .filter(|(x, _)| x.shift == r)
            .flat_map(|(x, m)| std::iter::repeat(FqRep::interval(q, n, x.i, x.j)).take(*m))
            .collect();
        FqRep::direct_sum(q, n, &parts)
    }
}

impl fmt::Display for DObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(x, m)| if *m == 1 { x.to_string() } else { format!("{x}^{m}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Debug for DObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `Σ_d (−1)^d dim Hom^d(y, x)` over `d ≤ 0`.
pub fn truncated_euler(y: &DObject, x: &DObject) -> i64 {
    let mut acc = 0;
    for (a, ma) in y.summands() {
        for (b, mb) in x.summands() {
            for (d, m) in hom_ext(a, b).nonzero() {
                if d <= 0 {
                    let s = if d.rem_euclid(2) == 0 { 1 } else { -1 };
                    acc += s * (ma * mb * m) as i64;
                }
            }
        }
    }
    acc
}

pub fn hom0_dim(a: &DObject, b: &DObject) -> usize {
    a.summands()
        .flat_map(|(x, mx)| b.summands().map(move |(y, my)| mx * my * hom_ext(x, y).dim(0)))
        .sum()
}

fn q_pow(q: u64, e: usize) -> BigInt {
    BigInt::from(q).pow(e as u32)
}

pub fn gl_order(q: u64, m: usize) -> BigInt {
    (0..m).map(|k| q_pow(q, m) - q_pow(q, k)).fold(BigInt::one(), |a, b| a * b)
}

/// `|Aut E| = q^{dim End − Σ m²} · Π |GL_m(q)|`.
pub fn aut_order(q: u64, e: &DObject) -> BigInt {
    let end = hom0_dim(e, e);
    let sq: usize = e.summands().map(|(_, m)| m * m).sum();
    e.summands().fold(q_pow(q, end - sq), |acc, (_, m)| acc * gl_order(q, m))
}

/// Which morphisms `Y → X[1]` contribute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correspondence {
    /// All of them, weighted by `q^{−(Y, X)_{≤0}}`.
    #[default]
    FullExt,
    /// Indecomposable inputs and cones only, with weight one.
    IndecomposableCones,
}

/// Per-vertex kernel inclusion of a module map and the induced representation.
fn kernel_of(src: &FqRep, maps: &[Mat]) -> (FqRep, Vec<Mat>) {
    let p = src.q;
    let incl: Vec<Mat> = maps.iter().map(|m| m.kernel(p)).collect();
    subrep(src, incl)
}

fn subrep(src: &FqRep, incl: Vec<Mat>) -> (FqRep, Vec<Mat>) {
    let p = src.q;
    let dims: Vec<usize> = incl.iter().map(|m| m.cols).collect();
    let maps = (0..src.n().saturating_sub(1))
        .map(|k| incl[k].left_inverse(p).mul(&src.maps[k], p).mul(&incl[k + 1], p))
        .collect();
    (FqRep { q: p, dims, maps }, incl)
}

/// Per-vertex cokernel projection of a module map and the induced representation.
fn cokernel_of(tgt: &FqRep, maps: &[Mat]) -> (FqRep, Vec<Mat>) {
    let p = tgt.q;
    let proj: Vec<Mat> = maps.iter().map(|m| m.cokernel_projection(p)).collect();
    let dims: Vec<usize> = proj.iter().map(|m| m.rows).collect();
    let sect: Vec<Mat> = proj.iter().map(|m| m.transpose().left_inverse(p).transpose()).collect();
    let out = (0..tgt.n().saturating_sub(1))
        .map(|k| proj[k].mul(&tgt.maps[k], p).mul(&sect[k + 1], p))
        .collect();
    (FqRep { q: p, dims, maps: out }, proj)
}

fn zero_maps(src: &FqRep, tgt: &FqRep) -> Vec<Mat> {
    src.dims.iter().zip(&tgt.dims).map(|(s, t)| Mat::zeros(*t, *s)).collect()
}

/// One enumerable component of `Hom(Y, X[1])`.
struct Factor {
    r: i64,
    /// `Hom(Y_r, X_{r−1})` as a list of vertex-map tuples.
    homs: Vec<Vec<Mat>>,
    /// `C^1(Y_r, X_r)` as a list of arrow-map tuples.
    cochains: Vec<Vec<Mat>>,
    /// `|B^1(Y_r, X_r)|`.
    coboundaries: BigInt,
}

/// `s_X · s_Y` on basis objects; `X` is the subobject.
pub fn fq_hall_basis(
    q: u64,
    n: usize,
    x: &DObject,
    y: &DObject,
    cutoff: &[usize],
    mode: Correspondence,
) -> Result<OracleElement> {
    let total: Vec<usize> = x.total_dims(n).iter().zip(y.total_dims(n)).map(|(a, b)| a + b).collect();
    if cutoff.len() != n || total.iter().zip(cutoff).any(|(t, c)| t > c) {
        return Err(WallxError::CutoffExceeded(format!("{x} · {y} has dimension {total:?}")));
    }
    let restricted = mode == Correspondence::IndecomposableCones;
    if restricted && (x.as_indec().is_none() || y.as_indec().is_none()) {
        return Ok(OracleElement::new());
    }
    let shifts: BTreeSet<i64> = x.shifts().union(&y.shifts()).copied().collect();
    let xm: BTreeMap<i64, FqRep> = shifts.iter().map(|&r| (r, x.module_at(q, n, r))).collect();
    let ym: BTreeMap<i64, FqRep> = shifts.iter().map(|&r| (r, y.module_at(q, n, r))).collect();
    let zero = FqRep::zero(q, n);
    let module = |m: &BTreeMap<i64, FqRep>, r: i64| m.get(&r).cloned().unwrap_or_else(|| zero.clone());

    let factors: Vec<Factor> = y
        .shifts()
        .into_iter()
        .map(|r| {
            let (yr, xprev, xr) = (module(&ym, r), module(&xm, r - 1), module(&xm, r));
            let hc = hom_complex(&yr, &xprev);
            let homs = span_vectors(q, &hc.delta.kernel(q))
                .map(|f| hc.vertex_maps(&yr, &xprev, &f))
                .collect();
            let ec = hom_complex(&yr, &xr);
            let cochains = all_vectors(q, ec.c1).map(|e| ec.arrow_maps(&yr, &xr, &e)).collect();
            Factor { r, homs, cochains, coboundaries: q_pow(q, ec.delta.rank(q)) }
        })
        .collect();

    let mut counts: BTreeMap<DObject, Q> = BTreeMap::new();
    let weight = factors.iter().fold(BigInt::one(), |a, f| a * &f.coboundaries);
    let sizes: Vec<usize> = factors.iter().map(|f| f.homs.len() * f.cochains.len()).collect();
    let mut idx = vec![0usize; factors.len()];
    loop {
        let mut f_at: BTreeMap<i64, &Vec<Mat>> = BTreeMap::new();
        let mut eta_at: BTreeMap<i64, &Vec<Mat>> = BTreeMap::new();
        for (fac, k) in factors.iter().zip(&idx) {
            f_at.insert(fac.r, &fac.homs[k / fac.cochains.len()]);
            eta_at.insert(fac.r, &fac.cochains[k % fac.cochains.len()]);
        }
        let mut e = DObject::zero();
        for &r in &shifts {
            let (yr, xr) = (module(&ym, r), module(&xm, r));
            let (ker, incl) = match f_at.get(&r) {
                Some(f) => kernel_of(&yr, f),
                None => kernel_of(&yr, &zero_maps(&yr, &module(&xm, r - 1))),
            };
            let (cok, proj) = match f_at.get(&(r + 1)) {
                Some(f) => cokernel_of(&xr, f),
                None => cokernel_of(&xr, &zero_maps(&module(&ym, r + 1), &xr)),
            };
            let eta: Vec<Mat> = match eta_at.get(&r) {
                Some(eta) => (0..n.saturating_sub(1))
                    .map(|k| proj[k].mul(&eta[k], q).mul(&incl[k + 1], q))
                    .collect(),
                None => (0..n.saturating_sub(1)).map(|k| Mat::zeros(cok.dims[k], ker.dims[k + 1])).collect(),
            };
            let part = extension(&ker, &cok, &eta);
            for ((i, j), m) in part.multiplicities() {
                e = e.direct_sum(&DObject(BTreeMap::from([(Indec { i, j, shift: r }, m)])));
            }
        }
        if !restricted || e.as_indec().is_some() {
            *counts.entry(e).or_insert_with(Q::zero) += Q::one();
        }
        let mut pos = 0;
        while pos < idx.len() {
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == idx.len() {
            break;
        }
    }

    let denom = aut_order(q, x) * aut_order(q, y) * weight;
    let nu = if restricted { 0 } else { truncated_euler(y, x) };
    let qnu = Q::from_integer(BigInt::from(q)).pow(-nu as i32);
    Ok(counts
        .into_iter()
        .map(|(e, c)| {
            let coeff = c * Q::new(aut_order(q, &e), denom.clone()) * &qnu;
            (e, coeff)
        })
        .collect())
}

/// The bilinear extension of [`fq_hall_basis`]; `x` supplies the subobjects.
pub fn fq_hall_product(
    q: u64,
    n: usize,
    x: &OracleElement,
    y: &OracleElement,
    cutoff: &[usize],
    mode: Correspondence,
) -> Result<OracleElement> {
    let mut out = OracleElement::new();
    for (a, ca) in x {
        for (b, cb) in y {
            for (e, c) in fq_hall_basis(q, n, a, b, cutoff, mode)? {
                *out.entry(e).or_insert_with(Q::zero) += c * ca * cb;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}
