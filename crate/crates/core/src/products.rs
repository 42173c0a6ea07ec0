//! Moufang semidirect products with an abelian part.
//!
//! Two constructions are provided. [`GdLoop`] is `G⋉V` for `G ≤ GL_2(R)` and
//! `V = R²` with
//! `(g,u)(h,w) = (gh, u∘(det h)gh⁻²g⁻¹ + w∘[h⁻¹,g⁻¹])`. [`SdLoop`] is `M⋉U`
//! for a loop `M` of invertible Zorn matrices and an invariant subspace `U`,
//! with `(m,u)(n,w) = (mn, uD_{m,n} + wL_{n,m})`.
//!
//! Vectors are rows and matrices act on the right.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    gl2_enumerate, mat2_group_closure, mat_det, mat_inv, mat_mul, mat_scale, vec2_add, vec2_neg, vec_act, Mat2, Matrix,
    Subspace, Vec2, GL2_SCAN_LIMIT,
};
use crate::loopcore::{element_order, subloop_generate, Loop, LoopTable, Scan, Verdict};
use crate::par::{self, Exec};
use crate::ring::{prime_power, Ring, RingElem};
use crate::zorn::{one_perp, psl_lazy, sl_loop, AlgOp, Zorn, ZornElem, ZornLoop, PSL_TABLE_CAP};

/// Largest construction turned into a Cayley table by default.
pub const PRODUCT_TABLE_CAP: usize = 4096;
/// Base loops up to this order get every `D_{m,n}` and `L_{n,m}` precomputed.
pub const SD_CACHE_LIMIT: usize = 256;
/// Number of base elements whose operators are tested for invariance.
pub const SD_INVARIANCE_SAMPLE: usize = 48;

// ---------------------------------------------------------------------------
// G ⋉ V over GL_2

/// A pair `(g, u)` with `g ∈ GL_2(R)` and `u ∈ R²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GdPair {
    pub g: Mat2,
    pub u: Vec2,
}

impl fmt::Display for GdPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{},{})", self.g, self.u[0], self.u[1])
    }
}

/// `(g,u)(h,w) = (gh, u∘(det h)gh⁻²g⁻¹ + w∘[h⁻¹,g⁻¹])`.
pub fn gd_product(r: &Ring, p: &GdPair, q: &GdPair) -> Result<GdPair> {
    let (g, h) = (&p.g, &q.g);
    let (gi, hi) = (mat_inv(r, g)?, mat_inv(r, h)?);
    let d = mat_scale(r, mat_det(r, h), &mat_mul(r, &mat_mul(r, g, &mat_mul(r, &hi, &hi)), &gi));
    let c = mat_mul(r, &mat_mul(r, h, g), &mat_mul(r, &hi, &gi));
    Ok(GdPair { g: mat_mul(r, g, h), u: vec2_add(r, &vec_act(r, &p.u, &d), &vec_act(r, &q.u, &c)) })
}

/// `(g,u)⁻¹ = (g⁻¹, -u∘(det g)⁻¹g²)`.
pub fn gd_inverse(r: &Ring, p: &GdPair) -> Result<GdPair> {
    let gi = mat_inv(r, &p.g)?;
    let di = r.inverse(mat_det(r, &p.g))?;
    let a = mat_scale(r, di, &mat_mul(r, &p.g, &p.g));
    Ok(GdPair { g: gi, u: vec2_neg(r, &vec_act(r, &p.u, &a)) })
}

/// `G⋉V` for a finite `G ≤ GL_2(R)`, optionally modulo the central scalar
/// subloop `{(λI, 0) : λI ∈ G}`.
#[derive(Clone, Debug)]
pub struct GdLoop {
    ring: Ring,
    group: Vec<Mat2>,
    index: HashMap<Mat2, usize>,
    scalars: Vec<RingElem>,
    projective: bool,
}

impl GdLoop {
    /// The subgroup generated by `gens`.
    pub fn new(ring: &Ring, gens: &[Mat2], projective: bool) -> Result<GdLoop> {
        let group = mat2_group_closure(ring, gens, GL2_SCAN_LIMIT as usize)?;
        GdLoop::build(ring, group, projective)
    }

    /// A subgroup given by its elements; closure is verified.
    pub fn from_elements(ring: &Ring, elems: Vec<Mat2>, projective: bool) -> Result<GdLoop> {
        let set: HashSet<Mat2> = elems.iter().copied().collect();
        let closed = set.contains(&Mat2::IDENTITY)
            && elems.iter().all(|g| mat_inv(ring, g).is_ok_and(|gi| set.contains(&gi)))
            && elems.iter().all(|g| elems.iter().all(|h| set.contains(&mat_mul(ring, g, h))));
        if !closed {
            return Err(Error::NotAGroup);
        }
        let mut rest: Vec<Mat2> = set.into_iter().filter(|g| *g != Mat2::IDENTITY).collect();
        rest.sort();
        let mut group = vec![Mat2::IDENTITY];
        group.extend(rest);
        GdLoop::build(ring, group, projective)
    }

    pub fn gl2(ring: &Ring, projective: bool) -> Result<GdLoop> {
        GdLoop::from_elements(ring, gl2_enumerate(ring)?, projective)
    }

    pub fn sl2(ring: &Ring, projective: bool) -> Result<GdLoop> {
        let sl = gl2_enumerate(ring)?.into_iter().filter(|g| mat_det(ring, g) == RingElem::ONE).collect();
        GdLoop::from_elements(ring, sl, projective)
    }

    fn build(ring: &Ring, full: Vec<Mat2>, projective: bool) -> Result<GdLoop> {
        let members: HashSet<Mat2> = full.iter().copied().collect();
        let scalars: Vec<RingElem> =
            ring.enumerate().filter(|&l| !l.is_zero() && members.contains(&Mat2::scalar(l))).collect();
        let mut gd = GdLoop { ring: ring.clone(), group: Vec::new(), index: HashMap::new(), scalars, projective };
        let mut group: Vec<Mat2> = full.iter().map(|g| gd.canon_mat(g)).collect();
        group.sort();
        group.dedup();
        if let Some(p) = group.iter().position(|g| *g == Mat2::IDENTITY) {
            group[..=p].rotate_right(1);
        }
        let q = ring.order() as usize;
        if group.len().checked_mul(q * q).is_none_or(|n| n > u32::MAX as usize) {
            return Err(Error::TooLarge(format!("G⋉V with |G| = {}", group.len())));
        }
        gd.index = group.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        gd.group = group;
        Ok(gd)
    }

    fn canon_mat(&self, g: &Mat2) -> Mat2 {
        if self.projective {
            self.scalars.iter().map(|&l| mat_scale(&self.ring, l, g)).min().expect("1 is a scalar")
        } else {
            *g
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Elements of `G` (coset representatives in the projective case), identity first.
    pub fn group(&self) -> &[Mat2] {
        &self.group
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// The scalar matrices `λI ∈ G`.
    pub fn scalar_subgroup(&self) -> Vec<Mat2> {
        self.scalars.iter().map(|&l| Mat2::scalar(l)).collect()
    }

    /// Indices of the central subloop `{(λI, 0)}`.
    pub fn scalar_subloop(&self) -> Vec<usize> {
        let zero = [RingElem::ZERO; 2];
        let mut s: Vec<usize> =
            self.scalar_subgroup().iter().filter_map(|g| self.index_of(&GdPair { g: *g, u: zero })).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// `G̅⋉V`, the quotient by the scalar subloop.
    pub fn quotient(&self) -> Result<GdLoop> {
        if self.projective {
            return Ok(self.clone());
        }
        GdLoop::build(&self.ring, self.group.clone(), true)
    }

    /// Cayley table of `G` (of `G̅` in the projective case).
    pub fn group_table(&self) -> Result<LoopTable> {
        LoopTable::build(self.group.len(), |i, j| {
            self.index[&self.canon_mat(&mat_mul(&self.ring, &self.group[i], &self.group[j]))]
        })
    }

    /// The pair with group index `g` and vector index `u`.
    pub fn pair(&self, g: usize, u: usize) -> GdPair {
        let q = self.ring.order() as usize;
        GdPair { g: self.group[g], u: [RingElem::from_index((u % q) as u32), RingElem::from_index((u / q) as u32)] }
    }

    /// Elements `(I, u)`, in index order.
    pub fn abelian_part(&self) -> Vec<GdPair> {
        let q = self.ring.order() as usize;
        (0..q * q).map(|u| self.pair(0, u)).collect()
    }

    pub fn materialize(&self, cap: usize, exec: Exec) -> Result<LoopTable> {
        if self.order() > cap {
            return Err(Error::TooLargeToMaterialize(self.order()));
        }
        LoopTable::materialize(self, exec)
    }
}

impl Loop for GdLoop {
    type Elem = GdPair;

    fn order(&self) -> usize {
        let q = self.ring.order() as usize;
        self.group.len() * q * q
    }

    fn identity(&self) -> GdPair {
        GdPair { g: Mat2::IDENTITY, u: [RingElem::ZERO; 2] }
    }

    fn mul(&self, x: &GdPair, y: &GdPair) -> GdPair {
        let p = gd_product(&self.ring, x, y).expect("group elements are invertible");
        GdPair { g: self.canon_mat(&p.g), u: p.u }
    }

    fn inv(&self, x: &GdPair) -> GdPair {
        let p = gd_inverse(&self.ring, x).expect("group elements are invertible");
        GdPair { g: self.canon_mat(&p.g), u: p.u }
    }

    fn element(&self, i: usize) -> GdPair {
        let q = self.ring.order() as usize;
        self.pair(i / (q * q), i % (q * q))
    }

    fn index_of(&self, x: &GdPair) -> Option<usize> {
        let q = self.ring.order() as usize;
        let g = *self.index.get(&x.g)?;
        let (a, b) = (x.u[0].value() as usize, x.u[1].value() as usize);
        (a < q && b < q).then_some(g * q * q + b * q + a)
    }
}

/// Cayley table of `G⋉V` for the group generated by `gens`.
pub fn gd_loop(ring: &Ring, gens: &[Mat2], projective: bool, exec: Exec) -> Result<LoopTable> {
    GdLoop::new(ring, gens, projective)?.materialize(PRODUCT_TABLE_CAP, exec)
}

// ---------------------------------------------------------------------------
// M ⋉ U inside the Zorn algebra

/// Which abelian part `U` is attached to the base loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModuleKind {
    /// The whole algebra.
    Full,
    /// `1^⊥` for the polar form of the norm.
    Perp,
    /// `1^⊥ / ⟨1⟩` in characteristic 2.
    Perp6,
}

impl FromStr for ModuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModuleKind> {
        match s {
            "full" => Ok(ModuleKind::Full),
            "perp" => Ok(ModuleKind::Perp),
            "perp6" => Ok(ModuleKind::Perp6),
            _ => Err(Error::Parse(format!("unknown module {s:?}; expected full, perp or perp6"))),
        }
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleKind::Full => "full",
            ModuleKind::Perp => "perp",
            ModuleKind::Perp6 => "perp6",
        })
    }
}

/// The abelian part `U` with a coordinate basis.
#[derive(Clone, Debug)]
pub struct SdModule {
    kind: ModuleKind,
    space: Subspace,
    basis: Vec<ZornElem>,
}

impl SdModule {
    pub fn new(zorn: &Zorn, kind: ModuleKind) -> Result<SdModule> {
        let ring = zorn.ring();
        let (space, basis) = match kind {
            ModuleKind::Full => {
                let space = Subspace::full(8);
                let basis = (0..8).map(|i| zorn.basis(i)).collect();
                (space, basis)
            }
            ModuleKind::Perp => {
                let perp = one_perp(ring)?;
                let basis = perp.space.basis().iter().map(|v| ZornElem::from_coords(v)).collect();
                (perp.space, basis)
            }
            ModuleKind::Perp6 => {
                let perp = one_perp(ring)?;
                let basis = perp.quotient_basis.ok_or_else(|| {
                    Error::InvalidRing(format!("perp6 needs characteristic 2, not {}", ring.characteristic()))
                })?;
                (perp.space, basis)
            }
        };
        Ok(SdModule { kind, space, basis })
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The subspace of the algebra that `U` lives in (for `perp6`, before the quotient).
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> &[ZornElem] {
        &self.basis
    }

    pub fn to_zorn(&self, zorn: &Zorn, coords: &[RingElem]) -> ZornElem {
        coords.iter().zip(&self.basis).fold(zorn.zero(), |acc, (&c, b)| zorn.add(&acc, &zorn.scale(c, b)))
    }

    /// Coordinates of an algebra element, if it lies in `U`.
    pub fn coords(&self, zorn: &Zorn, z: &ZornElem) -> Option<Vec<RingElem>> {
        let ring = zorn.ring();
        match self.kind {
            ModuleKind::Perp6 => {
                // Drop the ⟨1⟩ component: in U, a = b.
                self.space.contains(ring, z.coords()).then(|| z.coords()[1..7].to_vec())
            }
            _ => self.space.coords(ring, z.coords()),
        }
    }
}

/// An operator and basis vector whose image leaves `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvarianceWitness {
    pub op: AlgOp,
    pub m: usize,
    pub n: Option<usize>,
    pub vector: usize,
}

/// Tests whether `U` is invariant under `T_m` and `L_{n,m}` for all listed `m, n`.
pub fn sd_invariance_check(zorn: &Zorn, elems: &[ZornElem], u: &Subspace) -> Result<Verdict<InvarianceWitness>> {
    if elems.iter().any(|m| !zorn.is_invertible(m)) {
        return Err(Error::NotInvertible);
    }
    let ring = zorn.ring();
    let inside = |z: ZornElem| u.contains(ring, z.coords());
    let basis: Vec<ZornElem> = u.basis().iter().map(|v| ZornElem::from_coords(v)).collect();
    for (mi, m) in elems.iter().enumerate() {
        let t = zorn.operator(AlgOp::T, m, None)?;
        if let Some(k) = basis.iter().position(|b| !inside(t.apply(ring, b))) {
            return Ok(Verdict::Fail(InvarianceWitness { op: AlgOp::T, m: mi, n: None, vector: k }));
        }
        for (ni, n) in elems.iter().enumerate() {
            let l = zorn.operator(AlgOp::Lxy, n, Some(m))?;
            if let Some(k) = basis.iter().position(|b| !inside(l.apply(ring, b))) {
                return Ok(Verdict::Fail(InvarianceWitness { op: AlgOp::Lxy, m: mi, n: Some(ni), vector: k }));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// A pair `(m, u)`: base loop index and packed coordinates of `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SdElem {
    pub m: u32,
    pub u: u32,
}

#[derive(Clone, Debug)]
struct OpCache {
    /// `D_{m,n}` at `m |M| + n`.
    d: Vec<Matrix>,
    /// `L_{n,m}` at `n |M| + m`.
    l: Vec<Matrix>,
}

/// `M⋉U` for a Zorn loop `M` and an invariant abelian part `U`.
#[derive(Clone, Debug)]
pub struct SdLoop {
    base: ZornLoop,
    table: Option<LoopTable>,
    module: SdModule,
    q: usize,
    u_count: usize,
    cache: Option<OpCache>,
}

impl SdLoop {
    /// Builds the product after testing invariance of `U` on a seeded sample
    /// of base elements (all of them for small bases).
    pub fn new(base: ZornLoop, kind: ModuleKind, seed: u64, exec: Exec) -> Result<SdLoop> {
        let zorn = base.zorn().clone();
        let module = SdModule::new(&zorn, kind)?;
        let sample: Vec<ZornElem> = if base.order() <= SD_INVARIANCE_SAMPLE {
            base.elems().to_vec()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..SD_INVARIANCE_SAMPLE).map(|_| base.element(rng.gen_range(0..base.order()))).collect()
        };
        if !sd_invariance_check(&zorn, &sample, module.space())?.is_pass() {
            return Err(Error::InvarianceNotEstablished);
        }
        let q = zorn.ring().order() as usize;
        let u_count = u32::try_from(module.dim())
            .ok()
            .and_then(|d| q.checked_pow(d))
            .filter(|&c| base.order().checked_mul(c).is_some_and(|n| n <= u32::MAX as usize))
            .ok_or_else(|| Error::TooLarge(format!("M⋉U with |M| = {}", base.order())))?;
        let table = if base.order() <= PSL_TABLE_CAP { Some(base.materialize(PSL_TABLE_CAP, exec)?) } else { None };
        let mut sd = SdLoop { base, table, module, q, u_count, cache: None };
        if sd.base.order() <= SD_CACHE_LIMIT {
            sd.cache = Some(sd.build_cache(exec));
        }
        Ok(sd)
    }

    fn build_cache(&self, exec: Exec) -> OpCache {
        let n = self.base.order();
        let els = self.base.elems();
        let pairs = par::map_collect(exec, n * n, |i| {
            let (a, b) = (&els[i / n], &els[i % n]);
            (self.operator_matrix(AlgOp::Dxy, a, b), self.operator_matrix(AlgOp::Lxy, a, b))
        });
        let (d, l) = pairs.into_iter().unzip();
        OpCache { d, l }
    }

    /// Matrix of `D_{x,y}` or `L_{x,y}` on `U` in the module basis.
    pub fn operator_matrix(&self, kind: AlgOp, x: &ZornElem, y: &ZornElem) -> Matrix {
        let zorn = self.base.zorn();
        let rows = self
            .module
            .basis()
            .iter()
            .map(|b| {
                let img = zorn.apply_op(kind, x, Some(y), b).expect("binary operator");
                self.module.coords(zorn, &img).expect("U is invariant")
            })
            .collect();
        Matrix::from_rows(rows)
    }

    pub fn base(&self) -> &ZornLoop {
        &self.base
    }

    pub fn module(&self) -> &SdModule {
        &self.module
    }

    pub fn zorn(&self) -> &Zorn {
        self.base.zorn()
    }

    pub fn unpack(&self, u: u32) -> Vec<RingElem> {
        let mut u = u as usize;
        (0..self.module.dim())
            .map(|_| {
                let d = u % self.q;
                u /= self.q;
                RingElem::from_index(d as u32)
            })
            .collect()
    }

    pub fn pack(&self, coords: &[RingElem]) -> u32 {
        coords.iter().rev().fold(0usize, |acc, c| acc * self.q + c.value() as usize) as u32
    }

    /// `(m, u)` from a base element and coordinates of `u`.
    pub fn pair(&self, m: &ZornElem, u: &[RingElem]) -> Option<SdElem> {
        let m = self.base.index_of(m)? as u32;
        (u.len() == self.module.dim()).then(|| SdElem { m, u: self.pack(u) })
    }

    /// `(1, u)` for every `u ∈ U`, in index order.
    pub fn abelian_part(&self) -> Vec<SdElem> {
        (0..self.u_count as u32).map(|u| SdElem { m: 0, u }).collect()
    }

    fn base_mul(&self, m: u32, n: u32) -> u32 {
        match &self.table {
            Some(t) => t.mul(m as usize, n as usize) as u32,
            None => {
                let els = self.base.elems();
                let p = self.base.mul(&els[m as usize], &els[n as usize]);
                self.base.index_of(&p).expect("base loop is closed") as u32
            }
        }
    }

    fn apply(&self, kind: AlgOp, m: u32, n: u32, u: &[RingElem]) -> Vec<RingElem> {
        let ring = self.zorn().ring();
        let size = self.base.order();
        match (&self.cache, kind) {
            (Some(c), AlgOp::Dxy) => c.d[m as usize * size + n as usize].vec_mul(ring, u),
            (Some(c), AlgOp::Lxy) => c.l[m as usize * size + n as usize].vec_mul(ring, u),
            _ => {
                let els = self.base.elems();
                let zorn = self.zorn();
                let x = self.module.to_zorn(zorn, u);
                let img = zorn
                    .apply_op(kind, &els[m as usize], Some(&els[n as usize]), &x)
                    .expect("base elements are invertible");
                self.module.coords(zorn, &img).expect("U is invariant")
            }
        }
    }

    /// `u T_m⁻¹ = m (u m⁻¹)`.
    fn t_inverse(&self, m: u32, u: &[RingElem]) -> Vec<RingElem> {
        let zorn = self.zorn();
        let mm = &self.base.elems()[m as usize];
        let x = self.module.to_zorn(zorn, u);
        let img = zorn.mul(mm, &zorn.mul(&x, &zorn.inv(mm).expect("invertible")));
        self.module.coords(zorn, &img).expect("U is invariant")
    }

    pub fn materialize(&self, cap: usize, exec: Exec) -> Result<LoopTable> {
        if self.order() > cap {
            return Err(Error::TooLargeToMaterialize(self.order()));
        }
        LoopTable::materialize(self, exec)
    }
}

impl Loop for SdLoop {
    type Elem = SdElem;

    fn order(&self) -> usize {
        self.base.order() * self.u_count
    }

    fn identity(&self) -> SdElem {
        SdElem { m: 0, u: 0 }
    }

    fn mul(&self, x: &SdElem, y: &SdElem) -> SdElem {
        let ring = self.zorn().ring();
        let (u, w) = (self.unpack(x.u), self.unpack(y.u));
        let a = self.apply(AlgOp::Dxy, x.m, y.m, &u);
        let b = self.apply(AlgOp::Lxy, y.m, x.m, &w);
        let sum: Vec<RingElem> = a.iter().zip(&b).map(|(&s, &t)| ring.add(s, t)).collect();
        SdElem { m: self.base_mul(x.m, y.m), u: self.pack(&sum) }
    }

    fn inv(&self, x: &SdElem) -> SdElem {
        let ring = self.zorn().ring();
        let m = match &self.table {
            Some(t) => t.inv(x.m as usize) as u32,
            None => {
                let inv = self.base.inv(&self.base.elems()[x.m as usize]);
                self.base.index_of(&inv).expect("base loop is closed") as u32
            }
        };
        let y: Vec<RingElem> = self.t_inverse(x.m, &self.unpack(x.u)).into_iter().map(|c| ring.neg(c)).collect();
        SdElem { m, u: self.pack(&y) }
    }

    fn element(&self, i: usize) -> SdElem {
        SdElem { m: (i / self.u_count) as u32, u: (i % self.u_count) as u32 }
    }

    fn index_of(&self, x: &SdElem) -> Option<usize> {
        ((x.m as usize) < self.base.order() && (x.u as usize) < self.u_count)
            .then(|| x.m as usize * self.u_count + x.u as usize)
    }
}

/// Checks `(l, u, w) = 1` for `l` in the loop and `u, w` in the abelian part.
pub fn abelian_part_associators<L: Loop>(l: &L, part: &[L::Elem], scan: Scan) -> Verdict<(usize, usize, usize)> {
    let e = l.identity();
    let holds = |x: &L::Elem, u: &L::Elem, w: &L::Elem| crate::loopcore::associator(l, x, u, w) == e;
    let total = l.order().saturating_mul(part.len()).saturating_mul(part.len());
    if total <= scan.exhaustive_limit.saturating_mul(scan.exhaustive_limit).saturating_mul(scan.exhaustive_limit) {
        let n = l.order();
        return Verdict::from_witness(par::find_map_first(scan.exec, n, |i| {
            let x = l.element(i);
            (0..part.len()).find_map(|j| (0..part.len()).find(|&k| !holds(&x, &part[j], &part[k])).map(|k| (j, k)))
        }))
        .map(|(i, (j, k))| (i, j, k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
    let sample: Vec<(usize, usize, usize)> = (0..scan.budget)
        .map(|_| (rng.gen_range(0..l.order()), rng.gen_range(0..part.len()), rng.gen_range(0..part.len())))
        .collect();
    Verdict::from_witness(
        par::find_first(scan.exec, sample.len(), |s| {
            let (i, j, k) = sample[s];
            !holds(&l.element(i), &part[j], &part[k])
        })
        .map(|s| sample[s]),
    )
}

// ---------------------------------------------------------------------------
// M(2) inside M(p)

/// Attempts allowed when searching for the order-240 preimage of `M(2)`.
pub const M2_SEARCH_ATTEMPTS: usize = 10_000;

/// The preimage `S ≤ SL(O(F_p))` of an `M(2) ≤ M(p)`, for an odd prime `p`.
///
/// Triples of elements of order 3 are drawn from a seeded generator until
/// they generate a subloop of order 240 containing `-1`. The result is
/// returned modulo `±1`, as a projective loop of order 120.
pub fn m2_embedding(ring: &Ring, seed: u64) -> Result<ZornLoop> {
    let p = ring.order();
    if ring.degree() != 1 || p == 2 || !ring.is_field() {
        return Err(Error::OutOfCatalog(format!("M(2) inside M(p) needs an odd prime p, not {p}")));
    }
    let sl = sl_loop(ring)?;
    let zorn = sl.zorn().clone();
    let minus_one = zorn.scalar(ring.neg(RingElem::ONE));
    let cands: Vec<ZornElem> = sl.elems().iter().filter(|x| element_order(&sl, *x) == 3).copied().collect();
    if cands.is_empty() {
        return Err(Error::OutOfCatalog("no elements of order 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..M2_SEARCH_ATTEMPTS {
        let gens: Vec<ZornElem> = (0..3).map(|_| cands[rng.gen_range(0..cands.len())]).collect();
        let Some(s) = subloop_generate(&sl, &gens, 240) else { continue };
        if s.len() == 240 && s.iter().any(|&i| sl.element(i) == minus_one) {
            let els = s.iter().map(|&i| sl.element(i)).collect();
            return ZornLoop::new(zorn, els, true);
        }
    }
    Err(Error::OutOfCatalog(format!("no M(2) found in M({p}) after {M2_SEARCH_ATTEMPTS} attempts")))
}

// ---------------------------------------------------------------------------
// Catalog

/// A finished construction with elements addressed by index.
#[derive(Clone, Debug)]
pub enum Construction {
    Gd(GdLoop),
    Sd(Box<SdLoop>),
    Table(LoopTable),
}

impl Construction {
    pub fn materialize(&self, cap: usize, exec: Exec) -> Result<LoopTable> {
        match self {
            Construction::Gd(g) => g.materialize(cap, exec),
            Construction::Sd(s) => s.materialize(cap, exec),
            Construction::Table(t) if t.order() <= cap => Ok(t.clone()),
            Construction::Table(t) => Err(Error::TooLargeToMaterialize(t.order())),
        }
    }

    /// Indices of the abelian part `{(1, u)}`, if the construction has one.
    pub fn abelian_part(&self) -> Option<Vec<usize>> {
        match self {
            Construction::Gd(g) => Some(g.abelian_part().iter().filter_map(|p| g.index_of(p)).collect()),
            Construction::Sd(s) => Some(s.abelian_part().iter().filter_map(|p| s.index_of(p)).collect()),
            Construction::Table(_) => None,
        }
    }

    /// Index in the base loop of the first component of element `i`.
    pub fn projection(&self, i: usize) -> Option<usize> {
        match self {
            Construction::Gd(g) => {
                let q = g.ring().order() as usize;
                Some(i / (q * q))
            }
            Construction::Sd(s) => Some(i / s.u_count),
            Construction::Table(_) => None,
        }
    }

    /// Cayley table of the base loop.
    pub fn base_table(&self, exec: Exec) -> Option<Result<LoopTable>> {
        match self {
            Construction::Gd(g) => Some(g.group_table()),
            Construction::Sd(s) => Some(match &s.table {
                Some(t) => Ok(t.clone()),
                None => s.base().materialize(PSL_TABLE_CAP, exec),
            }),
            Construction::Table(_) => None,
        }
    }

    /// Order of the base loop `M` (or `G̅`), if the construction has one.
    pub fn base_order(&self) -> Option<usize> {
        match self {
            Construction::Gd(g) => Some(g.group().len()),
            Construction::Sd(s) => Some(s.base().order()),
            Construction::Table(_) => None,
        }
    }
}

impl Loop for Construction {
    type Elem = usize;

    fn order(&self) -> usize {
        match self {
            Construction::Gd(g) => g.order(),
            Construction::Sd(s) => s.order(),
            Construction::Table(t) => t.order(),
        }
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, x: &usize, y: &usize) -> usize {
        match self {
            Construction::Gd(g) => g.index_of(&g.mul(&g.element(*x), &g.element(*y))).expect("closed"),
            Construction::Sd(s) => s.index_of(&s.mul(&s.element(*x), &s.element(*y))).expect("closed"),
            Construction::Table(t) => t.mul(*x, *y),
        }
    }

    fn inv(&self, x: &usize) -> usize {
        match self {
            Construction::Gd(g) => g.index_of(&g.inv(&g.element(*x))).expect("closed"),
            Construction::Sd(s) => s.index_of(&s.inv(&s.element(*x))).expect("closed"),
            Construction::Table(t) => t.inv(*x),
        }
    }

    fn element(&self, i: usize) -> usize {
        i
    }

    fn index_of(&self, x: &usize) -> Option<usize> {
        (*x < self.order()).then_some(*x)
    }
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 5] =
    ["diag-semidirect", "gl2-semidirect", "psl2-semidirect", "paige-semidirect", "m2-over-p"];

/// Order of a catalog construction, computed without building it.
pub fn catalog_order(name: &str, q: u32) -> Option<usize> {
    let (p, _) = prime_power(q)?;
    let q = q as usize;
    let odd = if q % 2 == 1 { 2 } else { 1 };
    match name {
        "diag-semidirect" => Some((q - 1).pow(2) * q * q),
        "gl2-semidirect" => Some((q * q - 1) * (q * q - q) * q * q),
        "psl2-semidirect" if q >= 4 => Some(q * (q * q - 1) / odd * q * q),
        "paige-semidirect" => {
            let m = q.pow(3) * (q.pow(4) - 1) / odd;
            Some(m * if q.is_multiple_of(2) { q.pow(6) } else { q.pow(7) })
        }
        "m2-over-p" if p == q as u32 && q % 2 == 1 => Some(120 * q.pow(7)),
        _ => None,
    }
}

/// Builds a named construction over `F_q`.
///
/// * `diag-semidirect`: `D⋉F_q²` for the diagonal subgroup `D` (an abelian group, so the result is associative).
/// * `gl2-semidirect`: `GL_2(q)⋉F_q²`.
/// * `psl2-semidirect`: `PSL_2(q)⋉F_q²` for `q ≥ 4`, as the quotient of
///   `SL_2(q)⋉F_q²` by its scalars.
/// * `paige-semidirect`: `M(q)⋉F_q^7` for odd `q`, `M(q)⋉F_q^6` for even `q`.
/// * `m2-over-p`: `M(2)⋉F_p^7` through an embedding `M(2) ≤ M(p)`, `p` an odd prime.
pub fn catalog(name: &str, q: u32, seed: u64, exec: Exec) -> Result<Construction> {
    if prime_power(q).is_none() {
        return Err(Error::OutOfCatalog(format!("{name} needs a prime power, not {q}")));
    }
    let ring = Ring::field(q)?;
    match name {
        "diag-semidirect" => {
            let diag = gl2_enumerate(&ring)?.into_iter().filter(|g| g.get(0, 1).is_zero() && g.get(1, 0).is_zero());
            Ok(Construction::Gd(GdLoop::from_elements(&ring, diag.collect(), false)?))
        }
        "gl2-semidirect" => Ok(Construction::Gd(GdLoop::gl2(&ring, false)?)),
        "psl2-semidirect" if q >= 4 => Ok(Construction::Gd(GdLoop::sl2(&ring, true)?)),
        "psl2-semidirect" => Err(Error::OutOfCatalog(format!("psl2-semidirect needs q >= 4, not {q}"))),
        "paige-semidirect" if q.is_multiple_of(2) => {
            Ok(Construction::Sd(Box::new(SdLoop::new(sl_loop(&ring)?, ModuleKind::Perp6, seed, exec)?)))
        }
        "paige-semidirect" => {
            Ok(Construction::Sd(Box::new(SdLoop::new(psl_lazy(&ring)?, ModuleKind::Perp, seed, exec)?)))
        }
        "m2-over-p" => {
            Ok(Construction::Sd(Box::new(SdLoop::new(m2_embedding(&ring, seed)?, ModuleKind::Perp, seed, exec)?)))
        }
        _ => Err(Error::OutOfCatalog(format!("unknown construction {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopcore::{associativity, is_moufang, is_normal, isomorphic, translate, Translation};
    use crate::triality::{moufang_product, wreath_module_make, ModElem, TrialityLoop, WreathModule};
    use crate::zorn::{parabolic_elem, parabolic_subloop};

    fn f(q: u32) -> Ring {
        Ring::field(q).unwrap()
    }

    fn m(r: &Ring, rows: [[i64; 2]; 2]) -> Mat2 {
        Mat2::from_ints(r, rows)
    }

    fn v(r: &Ring, a: i64, b: i64) -> Vec2 {
        [r.from_int(a), r.from_int(b)]
    }

    #[test]
    fn gd_trivial_products() {
        let r = f(3);
        let g = m(&r, [[1, 2], [0, 1]]);
        let h = m(&r, [[2, 0], [1, 1]]);
        let zero = v(&r, 0, 0);
        let p = gd_product(&r, &GdPair { g, u: zero }, &GdPair { g: h, u: zero }).unwrap();
        assert_eq!(p, GdPair { g: mat_mul(&r, &g, &h), u: zero });
        let (u, w) = (v(&r, 1, 2), v(&r, 2, 2));
        let p = gd_product(&r, &GdPair { g: Mat2::IDENTITY, u }, &GdPair { g: Mat2::IDENTITY, u: w }).unwrap();
        assert_eq!(p.u, vec2_add(&r, &u, &w));
        let sing = GdPair { g: m(&r, [[1, 1], [1, 1]]), u: zero };
        assert_eq!(gd_product(&r, &sing, &sing), Err(Error::SingularMatrix));
    }

    #[test]
    fn gd_worked_example_over_f2() {
        let r = f(2);
        let p = GdPair { g: m(&r, [[1, 1], [0, 1]]), u: v(&r, 1, 0) };
        let q = GdPair { g: m(&r, [[0, 1], [1, 0]]), u: v(&r, 0, 1) };
        assert_eq!(gd_product(&r, &p, &q).unwrap(), GdPair { g: m(&r, [[1, 1], [1, 0]]), u: v(&r, 0, 0) });
    }

    #[test]
    fn gd_inverse_is_two_sided() {
        let r = f(3);
        let gd = GdLoop::gl2(&r, false).unwrap();
        let e = gd.identity();
        for p in gd.elements() {
            let pi = gd_inverse(&r, &p).unwrap();
            assert_eq!(gd.mul(&p, &pi), e);
            assert_eq!(gd.mul(&pi, &p), e);
        }
    }

    #[test]
    fn gd_gl2_f2_is_moufang_nonassociative() {
        let t = gd_loop(&f(2), &gl2_enumerate(&f(2)).unwrap(), false, Exec::Auto).unwrap();
        assert_eq!(t.order(), 24);
        assert!(is_moufang(&t, Scan::exhaustive()).is_pass());
        assert!(!associativity(&t, Scan::exhaustive()).is_pass());
    }

    #[test]
    fn gd_abelian_group_gives_group() {
        let r = f(3);
        let diag = [m(&r, [[2, 0], [0, 1]]), m(&r, [[1, 0], [0, 2]])];
        let gd = GdLoop::new(&r, &diag, false).unwrap();
        assert_eq!(gd.group().len(), 4);
        let t = gd.materialize(PRODUCT_TABLE_CAP, Exec::Auto).unwrap();
        assert!(associativity(&t, Scan::exhaustive()).is_pass());
    }

    #[test]
    fn gd_not_a_group() {
        let r = f(3);
        let els = vec![Mat2::IDENTITY, m(&r, [[1, 1], [0, 1]])];
        assert_eq!(GdLoop::from_elements(&r, els, false).unwrap_err(), Error::NotAGroup);
    }

    #[test]
    fn gd_scalar_subloop_is_central_and_normal() {
        let r = f(3);
        let gd = GdLoop::sl2(&r, false).unwrap();
        let t = gd.materialize(PRODUCT_TABLE_CAP, Exec::Auto).unwrap();
        let s = gd.scalar_subloop();
        assert_eq!(s.len(), 2);
        for &z in &s {
            for x in 0..t.order() {
                assert_eq!(t.mul(z, x), t.mul(x, z));
            }
        }
        assert!(is_normal(&t, &s).unwrap());
        let quotient = gd.quotient().unwrap();
        assert_eq!(quotient.order(), 12 * 9);
        let qt = quotient.materialize(PRODUCT_TABLE_CAP, Exec::Auto).unwrap();
        let via_cosets = crate::loopcore::quotient(&t, &s, Scan::default()).unwrap();
        assert!(isomorphic(&qt, &via_cosets.table).unwrap());
    }

    #[test]
    fn psl2_semidirect_q4() {
        let c = catalog("psl2-semidirect", 4, 0, Exec::Auto).unwrap();
        assert_eq!(c.order(), 960);
        assert_eq!(c.base_order(), Some(60));
        assert!(matches!(catalog("psl2-semidirect", 3, 0, Exec::Auto), Err(Error::OutOfCatalog(_))));
        assert!(matches!(catalog("nonsense", 3, 0, Exec::Auto), Err(Error::OutOfCatalog(_))));
    }

    #[test]
    fn catalog_orders_match() {
        for (name, q) in [("diag-semidirect", 3), ("gl2-semidirect", 2), ("psl2-semidirect", 4), ("psl2-semidirect", 5)]
        {
            let c = catalog(name, q, 0, Exec::Auto).unwrap();
            assert_eq!(catalog_order(name, q), Some(c.order()), "{name} {q}");
        }
        assert_eq!(catalog_order("paige-semidirect", 2), Some(7680));
        assert_eq!(catalog_order("paige-semidirect", 3), Some(1080 * 2187));
        assert_eq!(catalog_order("m2-over-p", 3), Some(120 * 2187));
        assert_eq!(catalog_order("m2-over-p", 9), None);
    }

    #[test]
    fn parabolic_matches_gd() {
        for q in [2, 3] {
            let r = f(q);
            let par = parabolic_subloop(&r).unwrap();
            let gd = GdLoop::gl2(&r, false).unwrap();
            let to_zorn = |p: &GdPair| {
                // u = r∘a⁻¹, so r = u∘a.
                let rr = vec_act(&r, &p.u, &p.g);
                parabolic_elem(&p.g, rr)
            };
            let els = gd.elements();
            for x in &els {
                for y in &els {
                    assert_eq!(to_zorn(&gd.mul(x, y)), par.mul(&to_zorn(x), &to_zorn(y)));
                }
            }
        }
    }

    #[test]
    fn invariance_checks() {
        let r = f(3);
        let z = Zorn::new(r.clone());
        let sl = sl_loop(&r).unwrap();
        let gens: Vec<ZornElem> = sl.elems().iter().step_by(97).copied().collect();
        assert!(sd_invariance_check(&z, &gens, &Subspace::full(8)).unwrap().is_pass());
        let perp = one_perp(&r).unwrap().space;
        assert!(sd_invariance_check(&z, &gens, &perp).unwrap().is_pass());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let vecs: Vec<Vec<RingElem>> =
            (0..3).map(|_| (0..8).map(|_| r.from_int(rng.gen_range(0..3))).collect()).collect();
        let random = Subspace::span(&r, 8, &vecs);
        let Verdict::Fail(w) = sd_invariance_check(&z, &gens, &random).unwrap() else { panic!("expected failure") };
        let b = ZornElem::from_coords(&random.basis()[w.vector]);
        let img = match w.n {
            None => z.apply_op(AlgOp::T, &gens[w.m], None, &b).unwrap(),
            Some(n) => z.apply_op(AlgOp::Lxy, &gens[n], Some(&gens[w.m]), &b).unwrap(),
        };
        assert!(!random.contains(&r, img.coords()));
    }

    #[test]
    fn sd_trivial_products_and_inverse() {
        let r = f(2);
        let sd = SdLoop::new(sl_loop(&r).unwrap(), ModuleKind::Perp6, 0, Exec::Auto).unwrap();
        assert_eq!(sd.order(), 7680);
        let e = sd.identity();
        let (a, b) = (SdElem { m: 0, u: 5 }, SdElem { m: 0, u: 9 });
        assert_eq!(sd.mul(&a, &b), SdElem { m: 0, u: 5 ^ 9 });
        let (x, y) = (SdElem { m: 17, u: 0 }, SdElem { m: 33, u: 0 });
        assert_eq!(sd.mul(&x, &y), SdElem { m: sd.base_mul(17, 33), u: 0 });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p = sd.element(rng.gen_range(0..sd.order()));
            assert_eq!(sd.mul(&p, &sd.inv(&p)), e);
            assert_eq!(sd.mul(&sd.inv(&p), &p), e);
        }
    }

    #[test]
    fn sd_paige_f2_moufang_sampled() {
        let sd = SdLoop::new(sl_loop(&f(2)).unwrap(), ModuleKind::Perp6, 0, Exec::Auto).unwrap();
        assert!(is_moufang(&sd, Scan::sampled(20_000, 3)).is_pass());
        assert!(!associativity(&sd, Scan::sampled(2_000, 3)).is_pass());
        let part = sd.abelian_part();
        assert!(abelian_part_associators(&sd, &part, Scan::sampled(20_000, 4)).is_pass());
    }

    #[test]
    fn sd_inner_form() {
        let sd = SdLoop::new(sl_loop(&f(2)).unwrap(), ModuleKind::Perp6, 0, Exec::Auto).unwrap();
        let z = sd.zorn().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (mi, ni) = (rng.gen_range(0..120u32), rng.gen_range(0..120u32));
            let u = SdElem { m: 0, u: rng.gen_range(0..64) };
            let got =
                translate(&sd, Translation::Lxy, &SdElem { m: mi, u: 0 }, Some(&SdElem { m: ni, u: 0 }), &u).unwrap();
            let els = sd.base().elems();
            let x = sd.module().to_zorn(&z, &sd.unpack(u.u));
            let img = z.apply_op(AlgOp::Lxy, &els[mi as usize], Some(&els[ni as usize]), &x).unwrap();
            let want = SdElem { m: 0, u: sd.pack(&sd.module().coords(&z, &img).unwrap()) };
            assert_eq!(got, want);
        }
    }

    #[test]
    fn gd_abelian_part_associators() {
        let gd = GdLoop::gl2(&f(3), false).unwrap();
        let part = gd.abelian_part();
        assert!(abelian_part_associators(&gd, &part, Scan { exhaustive_limit: 128, ..Scan::default() }).is_pass());
    }

    /// `(g, u) ↦ m.u` with `m = (g⁻¹, g, 1)` and `u` in the echelon basis of `M(W)`.
    fn module_embedding<'a>(a: &'a WreathModule) -> impl Fn(&GdPair) -> ModElem + 'a {
        let sub = a.moufang_module();
        move |p: &GdPair| {
            let gi = a.group().iter().position(|x| *x == Matrix::from_mat2(&p.g)).unwrap();
            let m = a.group_elem([a.group_table().inv(gi) as u32, gi as u32, 0]);
            let u = a.module_elem(sub.combine(a.ring(), &p.u));
            moufang_product(a, &m, &u)
        }
    }

    #[test]
    fn gd_matches_triality_module_f2() {
        let r = f(2);
        let gens: Vec<Matrix> = gl2_enumerate(&r).unwrap().iter().map(Matrix::from_mat2).collect();
        let a = wreath_module_make(&r, 2, &gens, false).unwrap();
        let tl = TrialityLoop::new(&a, Exec::Auto).unwrap();
        let gd = GdLoop::gl2(&r, false).unwrap();
        let embed = module_embedding(&a);
        let els = gd.elements();
        let images: HashSet<ModElem> = els.iter().map(&embed).collect();
        assert_eq!(images.len(), 24);
        assert!(images.iter().all(|x| tl.contains(x)));
        for x in &els {
            for y in &els {
                assert_eq!(embed(&gd.mul(x, y)), tl.mul(&embed(x), &embed(y)));
            }
        }
        let t1 = gd.materialize(PRODUCT_TABLE_CAP, Exec::Auto).unwrap();
        let t2 = tl.materialize(Exec::Auto).unwrap();
        assert!(isomorphic(&t1, &t2).unwrap());
    }

    #[test]
    fn gd_matches_triality_module_f3_sampled() {
        let r = f(3);
        let gens: Vec<Matrix> = [[[1, 1], [0, 1]], [[0, 1], [2, 0]], [[2, 0], [0, 1]]]
            .iter()
            .map(|g| Matrix::from_mat2(&m(&r, *g)))
            .collect();
        let a = wreath_module_make(&r, 2, &gens, false).unwrap();
        assert_eq!(a.group().len(), 48);
        let gd = GdLoop::gl2(&r, false).unwrap();
        let embed = module_embedding(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let x = gd.element(rng.gen_range(0..gd.order()));
            let y = gd.element(rng.gen_range(0..gd.order()));
            assert_eq!(embed(&gd.mul(&x, &y)), moufang_product(&a, &embed(&x), &embed(&y)));
        }
    }

    #[test]
    fn m2_embeds_in_m3() {
        let r = f(3);
        let m2 = m2_embedding(&r, 0).unwrap();
        assert_eq!(m2.order(), 120);
        assert!(m2.is_closed(Exec::Auto));
        let t = m2.materialize(PSL_TABLE_CAP, Exec::Auto).unwrap();
        let paige2 = crate::zorn::psl_loop(&f(2), PSL_TABLE_CAP, Exec::Auto).unwrap();
        assert!(isomorphic(&t, &paige2).unwrap());
        assert!(matches!(m2_embedding(&f(4), 0), Err(Error::OutOfCatalog(_))));
    }

    #[test]
    fn module_kinds_parse() {
        assert_eq!("perp6".parse::<ModuleKind>().unwrap(), ModuleKind::Perp6);
        assert!("half".parse::<ModuleKind>().is_err());
        assert!(matches!(SdModule::new(&Zorn::new(f(3)), ModuleKind::Perp6), Err(Error::InvalidRing(_))));
        assert_eq!(SdModule::new(&Zorn::new(f(3)), ModuleKind::Perp).unwrap().dim(), 7);
    }
}
