//! Representations of `A_n` over a prime field `F_p`, by explicit matrices.
//!
//! Vertex `v ∈ 1..=n` is stored at index `v − 1`; `maps[k]` is the arrow
//! from index `k + 1` to index `k`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::Indec;
use crate::error::{Result, WallxError};

/// Dense matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], cols: usize) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: rows.len(), cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..o.cols {
                    let v = (out.get(r, c) + a * o.get(k, c)) % p;
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| (a + p - b) % p).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, p: u64) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            let Some(sel) = (row..m.rows).find(|&r| m.get(r, col) != 0) else { continue };
            for c in 0..m.cols {
                m.data.swap(row * m.cols + c, sel * m.cols + c);
            }
            let iv = inv_mod(m.get(row, col), p);
            for c in 0..m.cols {
                m.set(row, c, m.get(row, c) * iv % p);
            }
            for r in 0..m.rows {
                let f = m.get(r, col);
                if r == row || f == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = (m.get(r, c) + p * p - f * m.get(row, c)) % p;
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self, p: u64) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref(p).1.len()
    }

    /// Columns spanning the null space.
    pub fn kernel(&self, p: u64) -> Self {
        let (r, pivots) = self.rref(p);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, 1);
            for (row, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, (p - r.get(row, f)) % p);
            }
        }
        out
    }

    pub fn inverse(&self, p: u64) -> Self {
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (red, _) = aug.rref(p);
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red.get(r, n + c));
            }
        }
        out
    }

    fn select_cols(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    /// A left inverse of an injective matrix.
    pub fn left_inverse(&self, p: u64) -> Self {
        let rows = self.transpose().rref(p).1;
        let sq = self.transpose().select_cols(&rows).transpose().inverse(p);
        let mut out = Self::zeros(self.cols, self.rows);
        for (k, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out.set(c, r, sq.get(c, k));
            }
        }
        out
    }

    /// A surjection whose kernel is the column space.
    pub fn cokernel_projection(&self, p: u64) -> Self {
        self.transpose().kernel(p).transpose()
    }
}

/// A representation: vector spaces on vertices and a matrix per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqRep {
    pub q: u64,
    pub dims: Vec<usize>,
    pub maps: Vec<Mat>,
}

impl FqRep {
    pub fn new(q: u64, dims: Vec<usize>, maps: Vec<Mat>) -> Result<Self> {
        let rep = Self { q, dims, maps };
        rep.validate()?;
        Ok(rep)
    }

    pub fn zero(q: u64, n: usize) -> Self {
        let dims = vec![0; n];
        let maps = (0..n.saturating_sub(1)).map(|_| Mat::zeros(0, 0)).collect();
        Self { q, dims, maps }
    }

    /// The interval module `M_ij`.
    pub fn interval(q: u64, n: usize, i: usize, j: usize) -> Self {
        let dims: Vec<usize> = (0..n).map(|k| usize::from(i <= k && k < j)).collect();
        let maps = (0..n.saturating_sub(1))
            .map(|k| {
                let mut m = Mat::zeros(dims[k], dims[k + 1]);
                if dims[k] == 1 && dims[k + 1] == 1 {
                    m.set(0, 0, 1);
                }
                m
            })
            .collect();
        Self { q, dims, maps }
    }

    pub fn validate(&self) -> Result<()> {
        if self.maps.len() + 1 != self.dims.len().max(1) {
            return Err(WallxError::SizeMismatch(self.maps.len() + 1, self.dims.len()));
        }
        for (k, m) in self.maps.iter().enumerate() {
            if m.rows != self.dims[k] || m.cols != self.dims[k + 1] {
                return Err(WallxError::SizeMismatch(m.rows, self.dims[k]));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn direct_sum(q: u64, n: usize, parts: &[FqRep]) -> Self {
        let mut out = Self::zero(q, n);
        for part in parts {
            out = out.plus(part);
        }
        out
    }

    fn plus(&self, o: &Self) -> Self {
        let dims: Vec<usize> = self.dims.iter().zip(&o.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&o.maps)
            .enumerate()
            .map(|(k, (a, b))| {
                let mut m = Mat::zeros(dims[k], dims[k + 1]);
                for r in 0..a.rows {
                    for c in 0..a.cols {
                        m.set(r, c, a.get(r, c));
                    }
                }
                for r in 0..b.rows {
                    for c in 0..b.cols {
                        m.set(a.rows + r, a.cols + c, b.get(r, c));
                    }
                }
                m
            })
            .collect();
        Self { q: self.q, dims, maps }
    }

    /// Composite map from index `b` down to index `a`.
    fn composite(&self, a: usize, b: usize) -> Mat {
        let mut m = Mat::identity(self.dims[b]);
        for k in (a..b).rev() {
            m = self.maps[k].mul(&m, self.q);
        }
        m
    }

    /// Krull–Schmidt multiplicities, keyed by `(i, j)` for `M_ij`.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let n = self.n();
        let rank = |a: isize, b: usize| -> i64 {
            if a < 0 || b >= n {
                0
            } else {
                self.composite(a as usize, b).rank(self.q) as i64
            }
        };
        let mut out = BTreeMap::new();
        for a in 0..n {
            for b in a..n {
                let m = rank(a as isize, b) - rank(a as isize - 1, b) - rank(a as isize, b + 1)
                    + rank(a as isize - 1, b + 1);
                if m > 0 {
                    out.insert((a, b + 1), m as usize);
                }
            }
        }
        out
    }

    pub fn is_indecomposable(&self) -> bool {
        self.multiplicities().values().sum::<usize>() == 1
    }
}

/// The complex `C^0 → C^1` computing `Hom` and `Ext^1` from `x` to `y`.
pub struct HomComplex {
    /// Offset of `Hom(x_v, y_v)` in `C^0`.
    pub c0_offsets: Vec<usize>,
    /// Offset of `Hom(x_{k+1}, y_k)` in `C^1`.
    pub c1_offsets: Vec<usize>,
    pub c0: usize,
    pub c1: usize,
    pub delta: Mat,
}

pub fn hom_complex(x: &FqRep, y: &FqRep) -> HomComplex {
    let (n, p) = (x.n(), x.q);
    let mut c0_offsets = Vec::new();
    let mut c0 = 0;
    for v in 0..n {
        c0_offsets.push(c0);
        c0 += y.dims[v] * x.dims[v];
    }
    let mut c1_offsets = Vec::new();
    let mut c1 = 0;
    for k in 0..n.saturating_sub(1) {
        c1_offsets.push(c1);
        c1 += y.dims[k] * x.dims[k + 1];
    }
    let mut delta = Mat::zeros(c1, c0);
    // δ(f)_k = y_k f_{k+1} − f_k x_k, as maps x_{k+1} → y_k.
    for k in 0..n.saturating_sub(1) {
        let (s, t) = (k + 1, k);
        for r in 0..y.dims[t] {
            for c in 0..x.dims[s] {
                let row = c1_offsets[k] + r * x.dims[s] + c;
                for m in 0..y.dims[s] {
                    let col = c0_offsets[s] + m * x.dims[s] + c;
                    let v = (delta.get(row, col) + y.maps[k].get(r, m)) % p;
                    delta.set(row, col, v);
                }
                for m in 0..x.dims[t] {
                    let col = c0_offsets[t] + r * x.dims[t] + m;
                    let v = (delta.get(row, col) + p - x.maps[k].get(m, c)) % p;
                    delta.set(row, col, v);
                }
            }
        }
    }
    HomComplex { c0_offsets, c1_offsets, c0, c1, delta }
}

impl HomComplex {
    pub fn hom_dim(&self, p: u64) -> usize {
        self.c0 - self.delta.rank(p)
    }

    pub fn ext_dim(&self, p: u64) -> usize {
        self.c1 - self.delta.rank(p)
    }

    /// The vertex maps `x_v → y_v` of a `C^0` vector.
    pub fn vertex_maps(&self, x: &FqRep, y: &FqRep, f: &[u64]) -> Vec<Mat> {
        (0..x.n())
            .map(|v| {
                let o = self.c0_offsets[v];
                let len = y.dims[v] * x.dims[v];
                Mat { rows: y.dims[v], cols: x.dims[v], data: f[o..o + len].to_vec() }
            })
            .collect()
    }

    /// The arrow maps `x_{k+1} → y_k` of a `C^1` vector.
    pub fn arrow_maps(&self, x: &FqRep, y: &FqRep, eta: &[u64]) -> Vec<Mat> {
        (0..x.n().saturating_sub(1))
            .map(|k| {
                let o = self.c1_offsets[k];
                let len = y.dims[k] * x.dims[k + 1];
                Mat { rows: y.dims[k], cols: x.dims[k + 1], data: eta[o..o + len].to_vec() }
            })
            .collect()
    }
}

/// All vectors of `F_p^d`, in base-`p` counting order.
pub fn all_vectors(p: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = p.checked_pow(d as u32).expect("enumeration size fits in u64");
    (0..total).map(move |mut k| {
        let mut v = vec![0; d];
        for x in v.iter_mut() {
            *x = k % p;
            k /= p;
        }
        v
    })
}

/// All vectors in the column span of `basis`.
pub fn span_vectors(p: u64, basis: &Mat) -> impl Iterator<Item = Vec<u64>> + '_ {
    all_vectors(p, basis.cols).map(move |c| {
        let col = Mat { rows: c.len(), cols: 1, data: c };
        basis.mul(&col, p).data
    })
}

/// The extension `0 → sub → E → quot → 0` with class `eta ∈ C^1(quot, sub)`.
pub fn extension(quot: &FqRep, sub: &FqRep, eta: &[Mat]) -> FqRep {
    let n = quot.n();
    let dims: Vec<usize> = (0..n).map(|v| sub.dims[v] + quot.dims[v]).collect();
    let maps = (0..n.saturating_sub(1))
        .map(|k| {
            let mut m = Mat::zeros(dims[k], dims[k + 1]);
            let (ys, yt) = (sub.dims[k + 1], sub.dims[k]);
            for r in 0..yt {
                for c in 0..ys {
                    m.set(r, c, sub.maps[k].get(r, c));
                }
                for c in 0..quot.dims[k + 1] {
                    m.set(r, ys + c, eta[k].get(r, c));
                }
            }
            for r in 0..quot.dims[k] {
                for c in 0..quot.dims[k + 1] {
                    m.set(yt + r, ys + c, quot.maps[k].get(r, c));
                }
            }
            m
        })
        .collect();
    FqRep { q: quot.q, dims, maps }
}

/// Counts of `Hom(a, b)`, `Ext^1(a, b)`, and of extension classes
/// `0 → b → E → a → 0` with `E` indecomposable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtCount {
    pub hom_count: u64,
    pub ext_count: u64,
    pub indec_cone_count: u64,
    /// Indecomposable middle terms `(i, j)` with their class counts.
    pub indec_cones: BTreeMap<(usize, usize), u64>,
}

pub fn fq_ext_count(q: u64, n: usize, a: &Indec, b: &Indec) -> Result<ExtCount> {
    if a.shift != 0 || b.shift != 0 {
        return Err(WallxError::ShiftedTerm(format!("{a}, {b}")));
    }
    if a.j > n || b.j > n {
        return Err(WallxError::SizeMismatch(a.j.max(b.j), n));
    }
    let x = FqRep::interval(q, n, a.i, a.j);
    let y = FqRep::interval(q, n, b.i, b.j);
    let cx = hom_complex(&x, &y);
    let hom_count = all_vectors(q, cx.c0)
        .filter(|f| {
            let col = Mat { rows: f.len(), cols: 1, data: f.clone() };
            cx.delta.mul(&col, q).is_zero()
        })
        .count() as u64;
    let proj = cx.delta.cokernel_projection(q);
    let mut seen = BTreeSet::new();
    let mut indec_cones = BTreeMap::new();
    for eta in all_vectors(q, cx.c1) {
        let class = proj.mul(&Mat { rows: eta.len(), cols: 1, data: eta.clone() }, q).data;
        if !seen.insert(class) {
            continue;
        }
        let e = extension(&x, &y, &cx.arrow_maps(&x, &y, &eta));
        let mult = e.multiplicities();
        if mult.values().sum::<usize>() == 1 {
            *indec_cones.entry(*mult.keys().next().unwrap()).or_insert(0) += 1;
        }
    }
    Ok(ExtCount {
        hom_count,
        ext_count: seen.len() as u64,
        indec_cone_count: indec_cones.values().sum(),
        indec_cones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_counts_over_f2() {
        let c = fq_ext_count(2, 2, &Indec::module(1, 2), &Indec::module(0, 1)).unwrap();
        assert_eq!((c.hom_count, c.ext_count, c.indec_cone_count), (1, 2, 1));
        assert_eq!(c.indec_cones.keys().collect::<Vec<_>>(), vec![&(0, 2)]);
        let c = fq_ext_count(3, 2, &Indec::module(0, 1), &Indec::module(1, 2)).unwrap();
        assert_eq!(c.ext_count, 1);
        let c = fq_ext_count(3, 2, &Indec::module(0, 1), &Indec::module(0, 2)).unwrap();
        assert_eq!((c.hom_count, c.ext_count), (3, 1));
    }

    #[test]
    fn multiplicities_of_sums() {
        let parts = [FqRep::interval(3, 3, 0, 2), FqRep::interval(3, 3, 1, 3), FqRep::interval(3, 3, 1, 3)];
        let s = FqRep::direct_sum(3, 3, &parts);
        let m = s.multiplicities();
        assert_eq!(m, BTreeMap::from([((0, 2), 1), ((1, 3), 2)]));
    }

    #[test]
    fn linear_algebra() {
        let p = 5;
        let a = Mat::from_rows(&[vec![1, 2, 3], vec![2, 4, 2]], 3);
        let k = a.kernel(p);
        assert_eq!(k.cols, 1);
        assert!(a.mul(&k, p).is_zero());
        let inj = Mat::from_rows(&[vec![1, 0], vec![3, 1], vec![0, 2]], 2);
        assert_eq!(inj.left_inverse(p).mul(&inj, p), Mat::identity(2));
        let pr = inj.cokernel_projection(p);
        assert_eq!(pr.rows, 1);
        assert!(pr.mul(&inj, p).is_zero());
    }
}
