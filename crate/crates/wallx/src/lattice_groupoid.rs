//! Groupoids presented by integer lattice data.
//!
//! An [`InducedGroupoid`] has objects `λ_i` in a target lattice and morphisms
//! `i → j` the source vectors `v` with `φ(v) = λ_j − λ_i`; composition is
//! vector addition. Hom-sets are cosets of `ker φ`, found through a Smith
//! normal form of `φ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WallxError};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn new(data: Vec<Vec<i64>>, cols: usize) -> Result<Self> {
        if data.iter().any(|r| r.len() != cols) {
            return Err(WallxError::InvalidInput("ragged matrix".into()));
        }
        Ok(Self { rows: data.len(), cols, data })
    }

    pub fn from_rows(data: Vec<Vec<i64>>) -> Result<Self> {
        let cols = data.first().map_or(0, |r| r.len());
        Self::new(data, cols)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![vec![0; cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = 1;
        }
        m
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.data.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Bilinear form `uᵀ M v`.
    pub fn form(&self, u: &[i64], v: &[i64]) -> i64 {
        let mv = self.apply(v);
        u.iter().zip(&mv).map(|(a, b)| a * b).sum()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.data[i][j] == -self.data[j][i]))
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.data.iter().map(|r| r[j]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j];
            }
        }
        t
    }
}

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal (`diag` holds the nonzero part).
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub diag: Vec<i64>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

pub fn smith_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d: Vec<Vec<i128>> = a.data.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| (i == j) as i128).collect()).collect();
    let mut v: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let mut t = 0;
    while t < m.min(n) {
        // Pivot: smallest nonzero entry in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..m {
            let f = d[i][t] / d[t][t];
            if f != 0 {
                for k in 0..n {
                    d[i][k] -= f * d[t][k];
                }
                for k in 0..m {
                    u[i][k] -= f * u[t][k];
                }
            }
            clean &= d[i][t] == 0;
        }
        for j in t + 1..n {
            let f = d[t][j] / d[t][t];
            if f != 0 {
                for k in 0..m {
                    d[k][j] -= f * d[k][t];
                }
                for k in 0..n {
                    v[k][j] -= f * v[k][t];
                }
            }
            clean &= d[t][j] == 0;
        }
        if clean {
            t += 1;
        }
    }
    let to64 = |x: Vec<Vec<i128>>| x.into_iter().map(|r| r.into_iter().map(|e| e as i64).collect()).collect();
    let diag = (0..t).map(|i| d[i][i] as i64).collect();
    SmithForm {
        u: IntMatrix { rows: m, cols: m, data: to64(u) },
        v: IntMatrix { rows: n, cols: n, data: to64(v) },
        diag,
    }
}

/// Integer solutions of `A x = b`: a base point plus a kernel basis, or `None`.
pub fn solve_integer(a: &IntMatrix, sf: &SmithForm, b: &[i64]) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    let ub = sf.u.apply(b);
    let r = sf.rank();
    if ub[r..].iter().any(|&x| x != 0) {
        return None;
    }
    let mut y = vec![0i64; a.cols];
    for i in 0..r {
        if ub[i] % sf.diag[i] != 0 {
            return None;
        }
        y[i] = ub[i] / sf.diag[i];
    }
    let base = sf.v.apply(&y);
    let kernel = (r..a.cols).map(|j| sf.v.column(j)).collect();
    Some((base, kernel))
}

/// A homomorphism `φ: Z^source_rank → Z^target_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub source_rank: usize,
    pub target_rank: usize,
    pub matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(matrix: IntMatrix) -> Self {
        Self { source_rank: matrix.cols, target_rank: matrix.rows, matrix }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>, source_rank: usize) -> Result<Self> {
        let matrix = IntMatrix::new(rows, source_rank)?;
        Ok(Self::new(matrix))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(IntMatrix::identity(n))
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.apply(v)
    }
}

/// A hom-set: empty, or `base + span_Z(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomSet {
    Empty,
    Coset { base: Vec<i64>, kernel: Vec<Vec<i64>> },
}

impl HomSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, HomSet::Empty)
    }

    /// Membership decided from the coset data alone.
    pub fn contains(&self, v: &[i64]) -> bool {
        match self {
            HomSet::Empty => false,
            HomSet::Coset { base, kernel } => {
                let diff: Vec<i64> = v.iter().zip(base).map(|(a, b)| a - b).collect();
                if kernel.is_empty() {
                    return diff.iter().all(|&x| x == 0);
                }
                let rows: Vec<Vec<i64>> = (0..diff.len()).map(|i| kernel.iter().map(|k| k[i]).collect()).collect();
                let km = IntMatrix { rows: diff.len(), cols: kernel.len(), data: rows };
                let sf = smith_form(&km);
                solve_integer(&km, &sf, &diff).is_some()
            }
        }
    }

    /// Every member with all coordinates in `[-bound, bound]`.
    pub fn enumerate_box(&self, bound: i64) -> Vec<Vec<i64>> {
        let HomSet::Coset { base, .. } = self else { return Vec::new() };
        box_points(base.len(), bound).into_iter().filter(|v| self.contains(v)).collect()
    }
}

/// All integer vectors of length `dim` with entries in `[-bound, bound]`.
pub fn box_points(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &out {
            for x in -bound..=bound {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Morphism `src → tgt` carried by a source-lattice vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupoidMorphism {
    pub src: usize,
    pub tgt: usize,
    pub vec: Vec<i64>,
}

impl GroupoidMorphism {
    pub fn new(src: usize, tgt: usize, vec: Vec<i64>) -> Self {
        Self { src, tgt, vec }
    }

    pub fn identity(obj: usize, rank: usize) -> Self {
        Self { src: obj, tgt: obj, vec: vec![0; rank] }
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.tgt && self.vec.iter().all(|&x| x == 0)
    }

    pub fn composable(&self, next: &Self) -> bool {
        self.tgt == next.src
    }
}

impl std::fmt::Display for GroupoidMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}:{:?}", self.src, self.tgt, self.vec)
    }
}

/// `g1` followed by `g2`.
pub fn compose(g1: &GroupoidMorphism, g2: &GroupoidMorphism) -> Result<GroupoidMorphism> {
    if !g1.composable(g2) {
        return Err(WallxError::NonComposable(format!("{g1} then {g2}")));
    }
    Ok(GroupoidMorphism {
        src: g1.src,
        tgt: g2.tgt,
        vec: g1.vec.iter().zip(&g2.vec).map(|(a, b)| a + b).collect(),
    })
}

#[derive(Clone, Debug)]
pub struct InducedGroupoid {
    pub phi: LatticeMap,
    pub objects: Vec<Vec<i64>>,
    homs: Vec<Vec<HomSet>>,
}

pub fn make_induced_groupoid(phi: LatticeMap, objects: Vec<Vec<i64>>) -> Result<InducedGroupoid> {
    for (i, o) in objects.iter().enumerate() {
        if o.len() != phi.target_rank {
            return Err(WallxError::InvalidInput(format!("object {i} has wrong rank")));
        }
        if objects[..i].contains(o) {
            return Err(WallxError::InvalidInput(format!("object {i} repeats an earlier object")));
        }
    }
    let sf = smith_form(&phi.matrix);
    let homs = objects
        .iter()
        .map(|li| {
            objects
                .iter()
                .map(|lj| {
                    let b: Vec<i64> = lj.iter().zip(li).map(|(a, c)| a - c).collect();
                    match solve_integer(&phi.matrix, &sf, &b) {
                        None => HomSet::Empty,
                        Some((base, kernel)) => HomSet::Coset { base, kernel },
                    }
                })
                .collect()
        })
        .collect();
    Ok(InducedGroupoid { phi, objects, homs })
}

impl InducedGroupoid {
    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn rank(&self) -> usize {
        self.phi.source_rank
    }

    pub fn hom(&self, i: usize, j: usize) -> &HomSet {
        &self.homs[i][j]
    }

    pub fn is_morphism(&self, g: &GroupoidMorphism) -> bool {
        g.src < self.num_objects() && g.tgt < self.num_objects() && {
            let d: Vec<i64> = self.objects[g.tgt].iter().zip(&self.objects[g.src]).map(|(a, b)| a - b).collect();
            self.phi.apply(&g.vec) == d
        }
    }

    /// The unique morphism `i → j` when hom-sets are singletons.
    pub fn unique_morphism(&self, i: usize, j: usize) -> Option<GroupoidMorphism> {
        match self.hom(i, j) {
            HomSet::Coset { base, kernel } if kernel.is_empty() => Some(GroupoidMorphism::new(i, j, base.clone())),
            _ => None,
        }
    }

    /// Every morphism whose vector lies in the box `[-bound, bound]^rank`.
    pub fn morphisms_in_box(&self, bound: i64) -> Vec<GroupoidMorphism> {
        let mut out = Vec::new();
        for i in 0..self.num_objects() {
            for j in 0..self.num_objects() {
                for v in self.hom(i, j).enumerate_box(bound) {
                    out.push(GroupoidMorphism::new(i, j, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted by object index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.num_objects();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if comp[i] != usize::MAX {
                continue;
            }
            let c = out.len();
            let members: Vec<usize> = (0..n).filter(|&j| !self.hom(i, j).is_empty()).collect();
            for &m in &members {
                comp[m] = c;
            }
            out.push(members);
        }
        out
    }
}

/// Normalized 2-cocycle on composable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cocycle {
    ConstantOne,
    /// `(-1)^{uᵀ P v}` on source vectors.
    BilinearSign { pairing: IntMatrix },
    /// Listed pairs take the given sign, all other composable pairs `+1`.
    ExplicitTable { table: BTreeMap<(GroupoidMorphism, GroupoidMorphism), i8> },
}

impl Cocycle {
    /// `σ(g1, g2)`, zero when not composable.
    pub fn sigma(&self, g1: &GroupoidMorphism, g2: &GroupoidMorphism) -> i8 {
        if !g1.composable(g2) {
            return 0;
        }
        match self {
            Cocycle::ConstantOne => 1,
            Cocycle::BilinearSign { pairing } => {
                if pairing.form(&g1.vec, &g2.vec).rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
            Cocycle::ExplicitTable { table } => table.get(&(g1.clone(), g2.clone())).copied().unwrap_or(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleCheck {
    Pass { triples: usize },
    Counterexample(GroupoidMorphism, GroupoidMorphism, GroupoidMorphism),
}

/// Exhaustive 2-cocycle identity over composable triples with vectors in the box.
pub fn check_cocycle(g: &InducedGroupoid, s: &Cocycle, bound: i64) -> CocycleCheck {
    let mors = g.morphisms_in_box(bound);
    let mut by_src: BTreeMap<usize, Vec<&GroupoidMorphism>> = BTreeMap::new();
    for m in &mors {
        by_src.entry(m.src).or_default().push(m);
    }
    let mut count = 0;
    for a in &mors {
        for b in by_src.get(&a.tgt).into_iter().flatten() {
            let ab = compose(a, b).expect("composable");
            for c in by_src.get(&b.tgt).into_iter().flatten() {
                let bc = compose(b, c).expect("composable");
                let lhs = s.sigma(a, b) * s.sigma(&ab, c);
                let rhs = s.sigma(a, &bc) * s.sigma(b, c);
                count += 1;
                if lhs != rhs {
                    return CocycleCheck::Counterexample(a.clone(), (*b).clone(), (*c).clone());
                }
            }
        }
    }
    CocycleCheck::Pass { triples: count }
}

#[derive(Clone, Debug)]
struct ComponentData {
    objects: Vec<usize>,
    rep: usize,
    offset: usize,
}

/// The grading lattice `Γ_V = ⊕_i (Γ_i ⊕ W_i)` with its degree map.
///
/// Per component the coordinates are the kernel coordinates of `F(γ)`
/// (automorphism part) followed by one coordinate per non-representative
/// object (the `w_j` basis).
#[derive(Clone, Debug)]
pub struct GradingLattice {
    phi: LatticeMap,
    kernel: Vec<Vec<i64>>,
    kernel_matrix: IntMatrix,
    kernel_sf: SmithForm,
    components: Vec<ComponentData>,
    comp_of: Vec<usize>,
    base_from_rep: Vec<Vec<i64>>,
    rank: usize,
}

pub fn grading_lattice(g: &InducedGroupoid, skeleton: Option<&[usize]>) -> Result<GradingLattice> {
    let comps = g.components();
    let reps: Vec<usize> = match skeleton {
        Some(s) => {
            if s.len() != comps.len() || comps.iter().zip(s).any(|(c, r)| !c.contains(r)) {
                return Err(WallxError::InvalidInput("skeleton must pick one object per component".into()));
            }
            s.to_vec()
        }
        None => comps
            .iter()
            .map(|c| *c.iter().min_by(|a, b| g.objects[**a].cmp(&g.objects[**b])).unwrap())
            .collect(),
    };
    let sf = smith_form(&g.phi.matrix);
    let kernel: Vec<Vec<i64>> = (sf.rank()..g.rank()).map(|j| sf.v.column(j)).collect();
    let k = kernel.len();
    let kernel_matrix = IntMatrix {
        rows: g.rank(),
        cols: k,
        data: (0..g.rank()).map(|i| kernel.iter().map(|c| c[i]).collect()).collect(),
    };
    let kernel_sf = smith_form(&kernel_matrix);
    let mut comp_of = vec![0; g.num_objects()];
    let mut base_from_rep = vec![Vec::new(); g.num_objects()];
    let mut components = Vec::new();
    let mut offset = 0;
    for (ci, (members, rep)) in comps.iter().zip(&reps).enumerate() {
        for &m in members {
            comp_of[m] = ci;
            base_from_rep[m] = match g.hom(*rep, m) {
                HomSet::Coset { base, .. } if m != *rep => base.clone(),
                _ => vec![0; g.rank()],
            };
        }
        components.push(ComponentData { objects: members.clone(), rep: *rep, offset });
        offset += k + members.len() - 1;
    }
    let gl = GradingLattice {
        phi: g.phi.clone(),
        kernel,
        kernel_matrix,
        kernel_sf,
        components,
        comp_of,
        base_from_rep,
        rank: offset,
    };
    for i in 0..g.num_objects() {
        for j in 0..g.num_objects() {
            if let HomSet::Coset { base, .. } = g.hom(i, j) {
                let d = gl.degree(&GroupoidMorphism::new(i, j, base.clone()))?;
                gl.check_root_condition(&d)?;
            }
        }
    }
    Ok(gl)
}

impl GradingLattice {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel.len()
    }

    pub fn skeleton(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.rep).collect()
    }

    /// `F(γ)` as a vector of the source lattice (an element of `ker φ`).
    pub fn f_vector(&self, g: &GroupoidMorphism) -> Vec<i64> {
        let bi = &self.base_from_rep[g.src];
        let bj = &self.base_from_rep[g.tgt];
        (0..g.vec.len()).map(|t| bi[t] + g.vec[t] - bj[t]).collect()
    }

    pub fn degree(&self, g: &GroupoidMorphism) -> Result<Vec<i64>> {
        let ci = self.comp_of[g.src];
        if self.comp_of[g.tgt] != ci {
            return Err(WallxError::InvalidInput(format!("{g} crosses components")));
        }
        let f = self.f_vector(g);
        if self.phi.apply(&f).iter().any(|&x| x != 0) {
            return Err(WallxError::InvalidInput(format!("{g} is not a morphism")));
        }
        let (coords, _) = solve_integer(&self.kernel_matrix, &self.kernel_sf, &f)
            .ok_or_else(|| WallxError::InvalidInput("F(γ) outside the kernel lattice".into()))?;
        let comp = &self.components[ci];
        let k = self.kernel.len();
        let mut d = vec![0; self.rank];
        d[comp.offset..comp.offset + k].copy_from_slice(&coords[..k]);
        let w_index = |obj: usize| -> Option<usize> {
            if obj == comp.rep {
                return None;
            }
            let pos = comp.objects.iter().filter(|&&o| o != comp.rep).position(|&o| o == obj)?;
            Some(comp.offset + k + pos)
        };
        if let Some(t) = w_index(g.tgt) {
            d[t] += 1;
        }
        if let Some(s) = w_index(g.src) {
            d[s] -= 1;
        }
        Ok(d)
    }

    /// `π_W(d) ∈ R_V` in every component.
    pub fn check_root_condition(&self, d: &[i64]) -> Result<()> {
        if d.len() != self.rank {
            return Err(WallxError::RootViolation(d.to_vec()));
        }
        let k = self.kernel.len();
        for comp in &self.components {
            let w = &d[comp.offset + k..comp.offset + k + comp.objects.len() - 1];
            let rep_coeff = -w.iter().sum::<i64>();
            let mut coeffs: Vec<i64> = w.to_vec();
            coeffs.push(rep_coeff);
            let plus = coeffs.iter().filter(|&&x| x == 1).count();
            let minus = coeffs.iter().filter(|&&x| x == -1).count();
            let zero = coeffs.iter().filter(|&&x| x == 0).count();
            let ok = zero == coeffs.len() || (plus == 1 && minus == 1 && zero + 2 == coeffs.len());
            if !ok {
                return Err(WallxError::RootViolation(d.to_vec()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2_groupoid() -> InducedGroupoid {
        // Root coordinates u1, u2 ↦ e1 - e0, e2 - e1.
        let phi = LatticeMap::from_rows(vec![vec![-1, 0], vec![1, -1], vec![0, 1]], 2).unwrap();
        make_induced_groupoid(phi, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap()
    }

    #[test]
    fn smith_solves() {
        let a = IntMatrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        let sf = smith_form(&a);
        assert_eq!(sf.rank(), 3);
        let b = a.apply(&[1, -2, 3]);
        let (x, k) = solve_integer(&a, &sf, &b).unwrap();
        assert!(k.is_empty());
        assert_eq!(a.apply(&x), b);
        assert!(solve_integer(&a, &sf, &[1, 0, 0]).is_none());
    }

    #[test]
    fn a2_homs_are_singletons() {
        let g = a2_groupoid();
        for i in 0..3 {
            for j in 0..3 {
                let m = g.unique_morphism(i, j).unwrap();
                assert!(g.is_morphism(&m));
            }
        }
        assert_eq!(g.unique_morphism(0, 2).unwrap().vec, vec![1, 1]);
        let u01 = g.unique_morphism(0, 1).unwrap();
        let u12 = g.unique_morphism(1, 2).unwrap();
        assert_eq!(compose(&u01, &u12).unwrap(), g.unique_morphism(0, 2).unwrap());
        assert!(compose(&u01, &u01).is_err());
    }

    #[test]
    fn empty_hom_outside_image() {
        let phi = LatticeMap::from_rows(vec![vec![2]], 1).unwrap();
        let g = make_induced_groupoid(phi, vec![vec![0], vec![1]]).unwrap();
        assert!(g.hom(0, 1).is_empty());
        assert!(!g.hom(0, 0).is_empty());
    }

    #[test]
    fn identity_map_coset() {
        let g = make_induced_groupoid(LatticeMap::identity(2), vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(g.unique_morphism(0, 1).unwrap().vec, vec![1, 1]);
    }

    #[test]
    fn a2_degree_is_root() {
        let g = a2_groupoid();
        let gl = grading_lattice(&g, None).unwrap();
        assert_eq!(gl.rank(), 2);
        let d = gl.degree(&g.unique_morphism(0, 1).unwrap()).unwrap();
        gl.check_root_condition(&d).unwrap();
        assert!(gl.check_root_condition(&[2, 0]).is_err());
    }
}
