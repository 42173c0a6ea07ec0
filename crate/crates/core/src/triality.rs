//! Groups with triality and their Moufang loops.
//!
//! A group with triality carries automorphisms `ρ` of order 3 and `σ` of order
//! 2 with `(ρσ)² = 1`, such that every `x` satisfies
//! `(x⁻¹x^σ)(x⁻¹x^σ)^ρ(x⁻¹x^σ)^{ρ²} = 1`. The set `M(G) = {x⁻¹x^σ}` is then a
//! Moufang loop under `m.n = m^{-ρ} n m^{-ρ²}`.
//!
//! Conjugation is `x^y = y⁻¹xy` and the group commutator is
//! `[x,y] = x⁻¹y⁻¹xy`. Automorphisms act on the right, so `x^{ρσ}` applies `ρ`
//! first.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{matrix_group_closure, unit_vector, vec_add, vec_neg, vec_sub, Matrix, Subspace};
use crate::loopcore::pseudoautomorphism_witness;
use crate::loopcore::{
    associativity, associator, commutator, power, scan_elements, scan_pairs, scan_triples, translate, Check, Loop,
    LoopTable, Perm, PsAutPair, Scan, Translation, Verdict,
};
use crate::par::{self, Exec};
use crate::ring::{Ring, RingElem};

/// Groups up to this order are checked exhaustively by [`check_triality`].
pub const TRIALITY_EXHAUSTIVE_LIMIT: usize = 10_000;
/// Largest group whose Moufang set is enumerated.
pub const MOUFANG_ENUM_LIMIT: usize = 1 << 22;
/// Largest Moufang loop turned into a Cayley table.
pub const TRIALITY_TABLE_CAP: usize = 4096;
/// Largest linear group accepted as the acting group of a module extension.
pub const MODULE_GROUP_CAP: usize = 4096;

/// A finite group with automorphisms `ρ` and `σ`.
pub trait TrialityGroup: Sync {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn order(&self) -> usize;
    /// Element by index; index 0 is the identity.
    fn element(&self, i: usize) -> Self::Elem;
    fn index_of(&self, x: &Self::Elem) -> Option<usize>;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Self::Elem;
    fn rho(&self, x: &Self::Elem) -> Self::Elem;
    fn sigma(&self, x: &Self::Elem) -> Self::Elem;

    /// First basis index at which a carrier-specific exact condition fails.
    fn basis_condition(&self) -> Option<BasisFailure> {
        None
    }
}

/// A failing instance of the module condition: group element and 1-based basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisFailure {
    pub group_index: usize,
    pub index: (usize, usize, usize),
}

/// Why the triality axiom fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialityWitness {
    /// The module condition fails at this basis index.
    Basis(BasisFailure),
    /// The axiom fails at the element with this index.
    Element(usize),
}

pub fn rho2<G: TrialityGroup>(g: &G, x: &G::Elem) -> G::Elem {
    g.rho(&g.rho(x))
}

/// `x^y = y⁻¹xy`.
pub fn conj<G: TrialityGroup>(g: &G, x: &G::Elem, y: &G::Elem) -> G::Elem {
    g.mul(&g.mul(&g.inv(y), x), y)
}

/// `[x,y] = x⁻¹y⁻¹xy`.
pub fn group_commutator<G: TrialityGroup>(g: &G, x: &G::Elem, y: &G::Elem) -> G::Elem {
    g.mul(&g.mul(&g.inv(x), &g.inv(y)), &g.mul(x, y))
}

/// `x⁻¹x^σ`, the element of `M(G)` attached to `x`.
pub fn moufang_image<G: TrialityGroup>(g: &G, x: &G::Elem) -> G::Elem {
    g.mul(&g.inv(x), &g.sigma(x))
}

/// `φ(x) = x^{-ρ}x^{ρ²}`.
pub fn phi<G: TrialityGroup>(g: &G, x: &G::Elem) -> G::Elem {
    g.mul(&g.inv(&g.rho(x)), &rho2(g, x))
}

/// `m.n = m^{-ρ} n m^{-ρ²}`, without membership checks.
pub fn moufang_product<G: TrialityGroup>(g: &G, m: &G::Elem, n: &G::Elem) -> G::Elem {
    g.mul(&g.mul(&g.inv(&g.rho(m)), n), &g.inv(&rho2(g, m)))
}

pub fn axiom_holds<G: TrialityGroup>(g: &G, x: &G::Elem) -> bool {
    let m = moufang_image(g, x);
    g.mul(&g.mul(&m, &g.rho(&m)), &rho2(g, &m)) == g.identity()
}

/// View of a group as a (associative) loop, for reuse of the loop scans.
pub struct GroupLoop<'a, G>(pub &'a G);

impl<G: TrialityGroup> Loop for GroupLoop<'_, G> {
    type Elem = G::Elem;

    fn order(&self) -> usize {
        self.0.order()
    }
    fn identity(&self) -> G::Elem {
        self.0.identity()
    }
    fn mul(&self, x: &G::Elem, y: &G::Elem) -> G::Elem {
        self.0.mul(x, y)
    }
    fn inv(&self, x: &G::Elem) -> G::Elem {
        self.0.inv(x)
    }
    fn element(&self, i: usize) -> G::Elem {
        self.0.element(i)
    }
    fn index_of(&self, x: &G::Elem) -> Option<usize> {
        self.0.index_of(x)
    }
}

/// Verifies that `ρ` and `σ` are automorphisms of the right orders and then
/// checks the triality axiom.
///
/// Groups of order at most [`TRIALITY_EXHAUSTIVE_LIMIT`] are scanned
/// completely; larger ones get `scan.budget` seeded samples. Carriers with an
/// exact basis condition report it before any element is sampled.
pub fn check_triality<G: TrialityGroup>(g: &G, scan: Scan) -> Result<Verdict<TrialityWitness>> {
    let view = GroupLoop(g);
    let elem_scan =
        Scan { exhaustive_limit: if g.order() <= TRIALITY_EXHAUSTIVE_LIMIT { usize::MAX } else { 0 }, ..scan };
    let orders = scan_elements(&view, elem_scan, |x| {
        let r3 = g.rho(&rho2(g, x));
        let s2 = g.sigma(&g.sigma(x));
        let rs = |y: &G::Elem| g.sigma(&g.rho(y));
        r3 == *x && s2 == *x && rs(&rs(x)) == *x
    });
    if let Verdict::Fail(i) = orders {
        return Err(Error::AutomorphismOrderViolation(format!("rho^3, sigma^2 or (rho sigma)^2 moves element {i}")));
    }
    let pair_scan = Scan { exhaustive_limit: if g.order() <= 100 { usize::MAX } else { 0 }, ..scan };
    let hom = scan_pairs(&view, pair_scan, |x, y| {
        let xy = g.mul(x, y);
        g.rho(&xy) == g.mul(&g.rho(x), &g.rho(y)) && g.sigma(&xy) == g.mul(&g.sigma(x), &g.sigma(y))
    });
    if let Verdict::Fail((x, y)) = hom {
        return Err(Error::AutomorphismOrderViolation(format!(
            "rho or sigma is not multiplicative at elements ({x}, {y})"
        )));
    }
    if let Some(b) = g.basis_condition() {
        return Ok(Verdict::Fail(TrialityWitness::Basis(b)));
    }
    Ok(scan_elements(&view, elem_scan, |x| axiom_holds(g, x)).map(TrialityWitness::Element))
}

/// `M(G)` in ascending order; the identity comes first.
pub fn moufang_elements<G: TrialityGroup>(g: &G, exec: Exec) -> Result<Vec<G::Elem>> {
    if g.order() > MOUFANG_ENUM_LIMIT {
        return Err(Error::TooLarge(format!("group of order {} exceeds {MOUFANG_ENUM_LIMIT}", g.order())));
    }
    let mut elems = par::map_collect(exec, g.order(), |i| moufang_image(g, &g.element(i)));
    elems.sort_unstable();
    elems.dedup();
    let e = g.identity();
    if let Some(p) = elems.iter().position(|x| *x == e) {
        elems[..=p].rotate_right(1);
    }
    Ok(elems)
}

/// The centralizer `C_G(σ)` in index order.
pub fn sigma_centralizer<G: TrialityGroup>(g: &G, exec: Exec) -> Result<Vec<G::Elem>> {
    if g.order() > MOUFANG_ENUM_LIMIT {
        return Err(Error::TooLarge(format!("group of order {} exceeds {MOUFANG_ENUM_LIMIT}", g.order())));
    }
    let hits = par::map_collect(exec, g.order(), |i| {
        let x = g.element(i);
        (g.sigma(&x) == x).then_some(x)
    });
    Ok(hits.into_iter().flatten().collect())
}

// ---------------------------------------------------------------------------
// Carriers

/// A group given by its Cayley table, with `ρ` and `σ` as permutations of indices.
#[derive(Clone, Debug)]
pub struct TableTriality {
    table: LoopTable,
    rho: Perm,
    sigma: Perm,
}

impl TableTriality {
    pub fn new(table: LoopTable, rho: Perm, sigma: Perm) -> Result<TableTriality> {
        let n = table.order();
        if rho.len() != n || sigma.len() != n {
            return Err(Error::AutomorphismOrderViolation(format!(
                "permutations of length {} and {} on a group of order {n}",
                rho.len(),
                sigma.len()
            )));
        }
        if !associativity(&table, Scan::default()).is_pass() {
            return Err(Error::BaseNotAssociative);
        }
        Ok(TableTriality { table, rho, sigma })
    }

    /// Copies a small triality group into table form.
    pub fn from_group<G: TrialityGroup>(g: &G, cap: usize) -> Result<TableTriality> {
        let n = g.order();
        if n > cap {
            return Err(Error::TooLargeToMaterialize(n));
        }
        let els: Vec<G::Elem> = (0..n).map(|i| g.element(i)).collect();
        let idx = |x: &G::Elem| g.index_of(x).expect("closed under the group operations");
        let table = LoopTable::build(n, |i, j| idx(&g.mul(&els[i], &els[j])))?;
        let rho = Perm::from_images(els.iter().map(|x| idx(&g.rho(x))).collect())?;
        let sigma = Perm::from_images(els.iter().map(|x| idx(&g.sigma(x))).collect())?;
        TableTriality::new(table, rho, sigma)
    }

    pub fn table(&self) -> &LoopTable {
        &self.table
    }
}

impl TrialityGroup for TableTriality {
    type Elem = usize;

    fn order(&self) -> usize {
        self.table.order()
    }
    fn element(&self, i: usize) -> usize {
        i
    }
    fn index_of(&self, x: &usize) -> Option<usize> {
        (*x < self.order()).then_some(*x)
    }
    fn identity(&self) -> usize {
        0
    }
    fn mul(&self, x: &usize, y: &usize) -> usize {
        self.table.mul(*x, *y)
    }
    fn inv(&self, x: &usize) -> usize {
        self.table.inv(*x)
    }
    fn rho(&self, x: &usize) -> usize {
        self.rho.apply(*x)
    }
    fn sigma(&self, x: &usize) -> usize {
        self.sigma.apply(*x)
    }
}

/// The wreathlike group `G×G×G` with `ρ` cycling and `σ` swapping the first two coordinates.
#[derive(Clone, Debug)]
pub struct Wreath {
    base: LoopTable,
}

/// Packages a group table as a wreathlike triality group.
pub fn wreath_make(base: LoopTable) -> Result<Wreath> {
    if !associativity(&base, Scan::default()).is_pass() {
        return Err(Error::BaseNotAssociative);
    }
    Ok(Wreath { base })
}

impl Wreath {
    pub fn base(&self) -> &LoopTable {
        &self.base
    }

    /// `(g⁻¹, g, 1)`, the element of `M(T)` matching `g`.
    pub fn moufang_of(&self, g: usize) -> [u32; 3] {
        [self.base.inv(g) as u32, g as u32, 0]
    }
}

impl TrialityGroup for Wreath {
    type Elem = [u32; 3];

    fn order(&self) -> usize {
        self.base.order().pow(3)
    }
    fn element(&self, i: usize) -> [u32; 3] {
        let n = self.base.order();
        [(i / (n * n)) as u32, ((i / n) % n) as u32, (i % n) as u32]
    }
    fn index_of(&self, x: &[u32; 3]) -> Option<usize> {
        let n = self.base.order();
        x.iter().all(|&c| (c as usize) < n).then(|| (x[0] as usize * n + x[1] as usize) * n + x[2] as usize)
    }
    fn identity(&self) -> [u32; 3] {
        [0; 3]
    }
    fn mul(&self, x: &[u32; 3], y: &[u32; 3]) -> [u32; 3] {
        std::array::from_fn(|k| self.base.mul(x[k] as usize, y[k] as usize) as u32)
    }
    fn inv(&self, x: &[u32; 3]) -> [u32; 3] {
        std::array::from_fn(|k| self.base.inv(x[k] as usize) as u32)
    }
    fn rho(&self, x: &[u32; 3]) -> [u32; 3] {
        [x[2], x[0], x[1]]
    }
    fn sigma(&self, x: &[u32; 3]) -> [u32; 3] {
        [x[1], x[0], x[2]]
    }
}

/// Element of `A = T⋉W`: a triple of group indices and a coefficient vector
/// over the basis `e_{ijk}`, flattened as `i n² + j n + k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModElem {
    pub t: [u32; 3],
    pub w: Vec<RingElem>,
}

/// The module extension `A = T⋉W` with `T = G×G×G`, `G ≤ GL_n(R)` and
/// `W = V⊗V⊗V`, where `(t₁,w₁)(t₂,w₂) = (t₁t₂, w₁t₂ + w₂)`.
#[derive(Clone, Debug)]
pub struct WreathModule {
    ring: Ring,
    n: usize,
    dim: usize,
    mats: Vec<Matrix>,
    table: LoopTable,
    kron: Option<Vec<Matrix>>,
    w_count: usize,
    order: usize,
    rho_pos: Vec<usize>,
    sigma_pos: Vec<usize>,
    failure: Option<BasisFailure>,
}

/// Builds `A = T⋉W` from generators of `G ≤ GL_n(R)`.
///
/// Triality holds exactly when `n ≤ 2`. A failing basis condition is an
/// error unless `allow_failing` is set.
pub fn wreath_module_make(ring: &Ring, n: usize, gens: &[Matrix], allow_failing: bool) -> Result<WreathModule> {
    if n == 0 {
        return Err(Error::UnsupportedSize("module rank must be positive".into()));
    }
    if gens.iter().any(|g| g.rows() != n || g.cols() != n) {
        return Err(Error::RingMismatch(format!("generators must be {n}x{n}")));
    }
    let mats =
        if gens.is_empty() { vec![Matrix::identity(n)] } else { matrix_group_closure(ring, gens, MODULE_GROUP_CAP)? };
    let index: HashMap<Matrix, usize> = mats.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let table = LoopTable::build(mats.len(), |i, j| index[&mats[i].mul(ring, &mats[j])])?;
    let dim = n * n * n;
    let q = ring.order() as usize;
    let overflow = || Error::TooLarge(format!("module extension of rank {n} over a ring of order {q}"));
    let w_count = u32::try_from(dim).ok().and_then(|d| q.checked_pow(d)).ok_or_else(overflow)?;
    let order = mats.len().checked_pow(3).and_then(|t| t.checked_mul(w_count)).ok_or_else(overflow)?;
    let pos = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut rho_pos = vec![0; dim];
    let mut sigma_pos = vec![0; dim];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                rho_pos[pos(i, j, k)] = pos(k, i, j);
                sigma_pos[pos(i, j, k)] = pos(j, i, k);
            }
        }
    }
    let g = mats.len();
    let kron = (g * g * g <= 4096 && dim <= 64).then(|| {
        (0..g * g * g)
            .map(|t| {
                let (a, b, c) = (t / (g * g), (t / g) % g, t % g);
                mats[a].kron(ring, &mats[b].kron(ring, &mats[c]))
            })
            .collect()
    });
    let mut module = WreathModule {
        ring: ring.clone(),
        n,
        dim,
        mats,
        table,
        kron,
        w_count,
        order,
        rho_pos,
        sigma_pos,
        failure: None,
    };
    module.failure = module.module_condition();
    if let (Some(f), false) = (module.failure, allow_failing) {
        return Err(Error::TrialityFails { n, index: f.index });
    }
    Ok(module)
}

impl WreathModule {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// Dimension `n³` of `W`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Elements of `G`, identity first.
    pub fn group(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn group_table(&self) -> &LoopTable {
        &self.table
    }

    /// `(1, w)`.
    pub fn module_elem(&self, w: Vec<RingElem>) -> ModElem {
        ModElem { t: [0; 3], w }
    }

    /// `(t, 0)`.
    pub fn group_elem(&self, t: [u32; 3]) -> ModElem {
        ModElem { t, w: vec![RingElem::ZERO; self.dim] }
    }

    /// `(1, e_{ijk})` for a 1-based basis index.
    pub fn basis_elem(&self, index: (usize, usize, usize)) -> ModElem {
        let (i, j, k) = index;
        self.module_elem(unit_vector(self.dim, ((i - 1) * self.n + (j - 1)) * self.n + (k - 1)))
    }

    /// `M(W) = {w^σ - w}` as a subspace of `W`.
    pub fn moufang_module(&self) -> Subspace {
        let vecs: Vec<Vec<RingElem>> = (0..self.dim)
            .map(|b| {
                let e = unit_vector(self.dim, b);
                vec_sub(&self.ring, &self.permute(&e, &self.sigma_pos), &e)
            })
            .collect();
        Subspace::span(&self.ring, self.dim, &vecs)
    }

    /// `w · t` for a triple of group indices.
    pub fn act(&self, w: &[RingElem], t: &[u32; 3]) -> Vec<RingElem> {
        let g = self.mats.len();
        let packed = (t[0] as usize * g + t[1] as usize) * g + t[2] as usize;
        match &self.kron {
            Some(k) => k[packed].vec_mul(&self.ring, w),
            None => {
                let [a, b, c] = t.map(|i| &self.mats[i as usize]);
                a.kron(&self.ring, &b.kron(&self.ring, c)).vec_mul(&self.ring, w)
            }
        }
    }

    fn permute(&self, w: &[RingElem], pos: &[usize]) -> Vec<RingElem> {
        let mut out = vec![RingElem::ZERO; self.dim];
        for (b, &p) in pos.iter().enumerate() {
            out[p] = w[b];
        }
        out
    }

    /// First `(i,j,k)` and `g` with
    /// `Σ_s g_{ks}(e_{ijs} - e_{jis} + e_{sij} - e_{sji} + e_{jsi} - e_{isj}) ≠ 0`.
    fn module_condition(&self) -> Option<BasisFailure> {
        let (r, n) = (&self.ring, self.n);
        let pos = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for (gi, g) in self.mats.iter().enumerate() {
                        let mut v = vec![RingElem::ZERO; self.dim];
                        for s in 0..n {
                            let c = g.get(k, s);
                            if c.is_zero() {
                                continue;
                            }
                            let plus = [pos(i, j, s), pos(s, i, j), pos(j, s, i)];
                            let minus = [pos(j, i, s), pos(s, j, i), pos(i, s, j)];
                            for p in plus {
                                v[p] = r.add(v[p], c);
                            }
                            for p in minus {
                                v[p] = r.sub(v[p], c);
                            }
                        }
                        if v.iter().any(|x| !x.is_zero()) {
                            return Some(BasisFailure { group_index: gi, index: (i + 1, j + 1, k + 1) });
                        }
                    }
                }
            }
        }
        None
    }
}

impl TrialityGroup for WreathModule {
    type Elem = ModElem;

    fn order(&self) -> usize {
        self.order
    }

    fn element(&self, i: usize) -> ModElem {
        let g = self.mats.len();
        let (ti, mut wi) = (i / self.w_count, i % self.w_count);
        let q = self.ring.order() as usize;
        let w = (0..self.dim)
            .map(|_| {
                let d = wi % q;
                wi /= q;
                RingElem::from_index(d as u32)
            })
            .collect();
        ModElem { t: [(ti / (g * g)) as u32, ((ti / g) % g) as u32, (ti % g) as u32], w }
    }

    fn index_of(&self, x: &ModElem) -> Option<usize> {
        let g = self.mats.len();
        let q = self.ring.order() as usize;
        if x.w.len() != self.dim || x.t.iter().any(|&c| c as usize >= g) {
            return None;
        }
        let mut wi = 0usize;
        for c in x.w.iter().rev() {
            let v = c.value() as usize;
            if v >= q {
                return None;
            }
            wi = wi * q + v;
        }
        let ti = (x.t[0] as usize * g + x.t[1] as usize) * g + x.t[2] as usize;
        Some(ti * self.w_count + wi)
    }

    fn identity(&self) -> ModElem {
        self.group_elem([0; 3])
    }

    fn mul(&self, x: &ModElem, y: &ModElem) -> ModElem {
        let t = std::array::from_fn(|k| self.table.mul(x.t[k] as usize, y.t[k] as usize) as u32);
        ModElem { t, w: vec_add(&self.ring, &self.act(&x.w, &y.t), &y.w) }
    }

    fn inv(&self, x: &ModElem) -> ModElem {
        let t = std::array::from_fn(|k| self.table.inv(x.t[k] as usize) as u32);
        let w = vec_neg(&self.ring, &self.act(&x.w, &t));
        ModElem { t, w }
    }

    fn rho(&self, x: &ModElem) -> ModElem {
        ModElem { t: [x.t[2], x.t[0], x.t[1]], w: self.permute(&x.w, &self.rho_pos) }
    }

    fn sigma(&self, x: &ModElem) -> ModElem {
        ModElem { t: [x.t[1], x.t[0], x.t[2]], w: self.permute(&x.w, &self.sigma_pos) }
    }

    fn basis_condition(&self) -> Option<BasisFailure> {
        self.failure
    }
}

// ---------------------------------------------------------------------------
// The Moufang loop M(G)

/// `M(G)` with the product `m.n = m^{-ρ} n m^{-ρ²}`.
pub struct TrialityLoop<'a, G: TrialityGroup> {
    group: &'a G,
    elems: Vec<G::Elem>,
    index: HashMap<G::Elem, usize>,
}

impl<'a, G: TrialityGroup> TrialityLoop<'a, G> {
    pub fn new(group: &'a G, exec: Exec) -> Result<TrialityLoop<'a, G>> {
        let elems = moufang_elements(group, exec)?;
        let index = elems.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        Ok(TrialityLoop { group, elems, index })
    }

    pub fn group(&self) -> &'a G {
        self.group
    }

    pub fn elems(&self) -> &[G::Elem] {
        &self.elems
    }

    pub fn contains(&self, x: &G::Elem) -> bool {
        self.index.contains_key(x)
    }

    fn member(&self, x: &G::Elem) -> Result<usize> {
        self.index.get(x).copied().ok_or(Error::NotMoufangElement)
    }

    /// `m.n`, rejecting arguments outside `M(G)`.
    pub fn loop_mult(&self, m: &G::Elem, n: &G::Elem) -> Result<G::Elem> {
        self.member(m)?;
        self.member(n)?;
        Ok(self.mul(m, n))
    }

    pub fn materialize(&self, exec: Exec) -> Result<LoopTable> {
        if self.elems.len() > TRIALITY_TABLE_CAP {
            return Err(Error::TooLargeToMaterialize(self.elems.len()));
        }
        LoopTable::materialize(self, exec)
    }

    /// `χ_g : m ↦ g⁻¹ m g^σ` as a permutation of `M(G)`.
    pub fn chi(&self, g: &G::Elem) -> Result<Perm> {
        let (gi, gs) = (self.group.inv(g), self.group.sigma(g));
        self.perm_of(|m| self.group.mul(&self.group.mul(&gi, m), &gs))
    }

    /// `J_h : m ↦ h⁻¹ m h`; defined when `h` normalizes `M(G)`.
    pub fn conj_perm(&self, h: &G::Elem) -> Result<Perm> {
        self.perm_of(|m| conj(self.group, m, h))
    }

    fn perm_of(&self, f: impl Fn(&G::Elem) -> G::Elem) -> Result<Perm> {
        let images = self.elems.iter().map(|m| self.member(&f(m))).collect::<Result<Vec<_>>>()?;
        Perm::from_images(images)
    }
}

impl<G: TrialityGroup> Loop for TrialityLoop<'_, G> {
    type Elem = G::Elem;

    fn order(&self) -> usize {
        self.elems.len()
    }
    fn identity(&self) -> G::Elem {
        self.group.identity()
    }
    fn mul(&self, m: &G::Elem, n: &G::Elem) -> G::Elem {
        moufang_product(self.group, m, n)
    }
    fn inv(&self, m: &G::Elem) -> G::Elem {
        self.group.inv(m)
    }
    fn element(&self, i: usize) -> G::Elem {
        self.elems[i].clone()
    }
    fn index_of(&self, x: &G::Elem) -> Option<usize> {
        self.index.get(x).copied()
    }
}

// ---------------------------------------------------------------------------
// Multiplication formulas

/// A group word in numbered variables, built from inversion, `ρ`, products
/// and conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    One,
    Var(usize),
    Inv(Box<Word>),
    Rho(Box<Word>),
    Mul(Box<Word>, Box<Word>),
    /// `x^y = y⁻¹xy`.
    Conj(Box<Word>, Box<Word>),
}

impl Word {
    pub fn var(i: usize) -> Word {
        Word::Var(i)
    }

    pub fn inv(self) -> Word {
        Word::Inv(Box::new(self))
    }

    pub fn rho(self) -> Word {
        Word::Rho(Box::new(self))
    }

    pub fn rho2(self) -> Word {
        self.rho().rho()
    }

    pub fn times(self, other: Word) -> Word {
        Word::Mul(Box::new(self), Box::new(other))
    }

    pub fn conj(self, by: Word) -> Word {
        Word::Conj(Box::new(self), Box::new(by))
    }

    /// `[a,b] = a⁻¹b⁻¹ab`.
    pub fn comm(self, other: Word) -> Word {
        self.clone().inv().times(other.clone().inv()).times(self).times(other)
    }

    pub fn eval<G: TrialityGroup>(&self, g: &G, vars: &[G::Elem]) -> G::Elem {
        match self {
            Word::One => g.identity(),
            Word::Var(i) => vars[*i].clone(),
            Word::Inv(x) => g.inv(&x.eval(g, vars)),
            Word::Rho(x) => g.rho(&x.eval(g, vars)),
            Word::Mul(x, y) => g.mul(&x.eval(g, vars), &y.eval(g, vars)),
            Word::Conj(x, y) => conj(g, &x.eval(g, vars), &y.eval(g, vars)),
        }
    }
}

/// `x = u^{-ρ n^{-ρ} m^{ρ²}} · w^{[n^{ρ²}, m^{-ρ}]} · u^{-ρ² n^{ρ²} m^{-ρ}}` in the
/// variables `m, n, u, w`.
pub fn product_word() -> Word {
    let (m, n, u, w) = (Word::var(0), Word::var(1), Word::var(2), Word::var(3));
    let first = u.clone().rho().inv().conj(n.clone().rho().inv().times(m.clone().rho2()));
    let middle = w.conj(n.clone().rho2().comm(m.clone().rho().inv()));
    let last = u.rho2().inv().conj(n.rho2().times(m.rho().inv()));
    first.times(middle).times(last)
}

/// `y = u^{ρ m⁻¹} u^{ρ² m}` in the variables `m, u`.
pub fn inverse_word() -> Word {
    let (m, u) = (Word::var(0), Word::var(1));
    u.clone().rho().conj(m.clone().inv()).times(u.rho2().conj(m))
}

/// The element `x` with `(m.u).(n.w) = (m.n).x`.
pub fn formula_general<G: TrialityGroup>(
    tl: &TrialityLoop<'_, G>,
    m: &G::Elem,
    n: &G::Elem,
    u: &G::Elem,
    w: &G::Elem,
) -> Result<G::Elem> {
    for x in [m, n, u, w] {
        tl.member(x)?;
    }
    let x = product_word().eval(tl.group, &[m.clone(), n.clone(), u.clone(), w.clone()]);
    tl.member(&x)?;
    Ok(x)
}

/// The element `y` with `(m.u)⁻¹ = m⁻¹.y`.
pub fn formula_inverse<G: TrialityGroup>(tl: &TrialityLoop<'_, G>, m: &G::Elem, u: &G::Elem) -> Result<G::Elem> {
    tl.member(m)?;
    tl.member(u)?;
    let y = inverse_word().eval(tl.group, &[m.clone(), u.clone()]);
    tl.member(&y)?;
    Ok(y)
}

fn check_operator(name: &str, op: &Matrix, dim: usize) -> Result<()> {
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::OperatorDomainMismatch(format!(
            "{name} is {}x{} on vectors of length {dim}",
            op.rows(),
            op.cols()
        )));
    }
    Ok(())
}

/// `x = u D + w L` for the operators `D = D_{m,n}` and `L = L_{n,m}` on an abelian part.
pub fn formula_abelian(ring: &Ring, d: &Matrix, l: &Matrix, u: &[RingElem], w: &[RingElem]) -> Result<Vec<RingElem>> {
    if u.len() != w.len() {
        return Err(Error::OperatorDomainMismatch(format!("vectors of lengths {} and {}", u.len(), w.len())));
    }
    check_operator("D", d, u.len())?;
    check_operator("L", l, u.len())?;
    Ok(vec_add(ring, &d.vec_mul(ring, u), &l.vec_mul(ring, w)))
}

/// `y = -u T⁻¹` for `T = T_m` on an abelian part.
pub fn formula_abelian_inverse(ring: &Ring, t: &Matrix, u: &[RingElem]) -> Result<Vec<RingElem>> {
    check_operator("T", t, u.len())?;
    Ok(vec_neg(ring, &t.inverse(ring)?.vec_mul(ring, u)))
}

/// Matrix of a translation of `M(A)` restricted to `M(W)`, in the echelon
/// basis of [`WreathModule::moufang_module`].
pub fn restricted_operator(
    tl: &TrialityLoop<'_, WreathModule>,
    kind: Translation,
    x: &ModElem,
    y: Option<&ModElem>,
) -> Result<Matrix> {
    let a = tl.group();
    let sub = a.moufang_module();
    let rows = sub
        .basis()
        .iter()
        .map(|b| {
            let img = translate(tl, kind, x, y, &a.module_elem(b.clone()))?;
            if img.t != [0; 3] {
                return Err(Error::OperatorDomainMismatch("translation leaves the module part".into()));
            }
            sub.coords(a.ring(), &img.w).ok_or_else(|| Error::OperatorDomainMismatch("image outside M(W)".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows))
}

// ---------------------------------------------------------------------------
// Identity suite

/// Draws elements of a set for the quantified checks: all of them when the
/// set has at most `limit` members, otherwise `limit` seeded samples.
fn pick<T: Clone>(items: &[T], limit: usize, scan: &Scan, salt: u64) -> Vec<T> {
    if items.len() <= limit {
        return items.to_vec();
    }
    let mut rng = Scan { seed: scan.seed ^ salt, ..*scan }.rng();
    (0..limit).map(|_| items[rng.gen_range(0..items.len())].clone()).collect()
}

/// The structural identities linking `G`, `C_G(σ)`, `M(G)`, `φ` and `χ`.
///
/// Exhaustive when `|M(G)| ≤ scan.exhaustive_limit`, sampled otherwise.
pub fn triality_identities<G: TrialityGroup>(tl: &TrialityLoop<'_, G>, scan: Scan) -> Result<Vec<Check>> {
    let g = tl.group;
    let table = tl.materialize(scan.exec)?;
    let idx = |x: &G::Elem| tl.index_of(x);
    let h_all = sigma_centralizer(g, scan.exec)?;
    let hs = pick(&h_all, 64, &scan, 0x4855);
    let gs: Vec<G::Elem> = {
        let all: Vec<usize> = (0..g.order()).collect();
        pick(&all, 64, &scan, 0x4753).into_iter().map(|i| g.element(i)).collect()
    };
    let is_h = |x: &G::Elem| g.sigma(x) == *x;
    let mut out = Vec::new();

    out.push(Check::new(
        "moufang-conjugates-commute",
        scan_elements(tl, scan, |m| {
            let (a, b) = (g.rho(m), rho2(g, m));
            g.mul(m, &a) == g.mul(&a, m) && g.mul(m, &b) == g.mul(&b, m) && g.mul(&a, &b) == g.mul(&b, &a)
        }),
    ));
    out.push(Check::new(
        "product-symmetric-form",
        scan_pairs(tl, scan, |m, n| {
            let rhs = g.mul(&g.mul(&g.inv(&rho2(g, n)), m), &g.inv(&g.rho(n)));
            tl.mul(m, n) == rhs
        }),
    ));
    out.push(Check::new(
        "commutator-in-centralizer",
        scan_pairs(tl, scan, |m, n| {
            let k1 = group_commutator(g, &rho2(g, n), &g.inv(&g.rho(m)));
            let k2 = group_commutator(g, &g.inv(&g.rho(n)), &rho2(g, m));
            k1 == k2 && is_h(&k1)
        }),
    ));
    out.push(Check::new(
        "flexible-group-product",
        scan_pairs(tl, scan, |m, n| tl.mul(&tl.mul(m, n), m) == g.mul(&g.mul(m, n), m)),
    ));
    out.push(Check::new(
        "phi-exchanges-m-and-h",
        Verdict::from_witness(
            hs.iter()
                .position(|h| !tl.contains(&phi(g, h)))
                .map(|i| format!("h #{i}"))
                .or_else(|| tl.elems.iter().position(|m| !is_h(&phi(g, m))).map(|i| format!("m #{i}"))),
        ),
    ));
    out.push(Check::new(
        "centralizer-pseudoautomorphisms",
        Verdict::from_witness(hs.iter().enumerate().find_map(|(i, h)| {
            let Ok(map) = tl.conj_perm(h) else { return Some(format!("h #{i} does not normalize M")) };
            let companion = idx(&phi(g, h))?;
            pseudoautomorphism_witness(&table, &PsAutPair { map, companion }, scan.exec)
                .map(|w| format!("h #{i} at {w:?}"))
        })),
    ));
    let rmn = scan_pairs(tl, scan, |m, n| {
        let k = group_commutator(g, &g.rho(m), &g.inv(&rho2(g, n)));
        let (Some(mi), Some(ni)) = (idx(m), idx(n)) else { return false };
        let Ok(r) = table.translation(Translation::Rxy, mi, Some(ni)) else { return false };
        tl.conj_perm(&k).is_ok_and(|j| j == r) && idx(&phi(g, &k)) == idx(&commutator(tl, m, n))
    });
    out.push(Check::new("inner-map-r", rmn));
    let tm = scan_elements(tl, scan, |m| {
        let k = phi(g, m);
        let Some(mi) = idx(m) else { return false };
        let Ok(t) = table.translation(Translation::T, mi, None) else { return false };
        tl.conj_perm(&k).is_ok_and(|j| j == t) && phi(g, &k) == power(tl, m, -3)
    });
    out.push(Check::new("inner-map-t", tm));
    out.push(Check::new(
        "associator-as-commutator",
        scan_triples(tl, scan, |l, m, n| {
            let k = group_commutator(g, &g.inv(&g.rho(n)), &rho2(g, m));
            associator(tl, l, m, n) == conj(g, &group_commutator(g, &k, l), &rho2(g, l))
        }),
    ));

    let chi_all: Vec<Perm> = gs.iter().map(|x| tl.chi(x)).collect::<Result<_>>()?;
    out.push(Check::new(
        "chi-homomorphism",
        Verdict::from_witness(gs.iter().enumerate().find_map(|(i, x)| {
            gs.iter().enumerate().find_map(|(j, y)| {
                let ok = tl.chi(&g.mul(x, y)).is_ok_and(|p| p == chi_all[i].then(&chi_all[j]));
                (!ok).then_some((i, j))
            })
        })),
    ));
    out.push(Check::new(
        "chi-kernel",
        Verdict::from_witness(gs.iter().enumerate().find_map(|(i, x)| {
            let in_kernel = chi_all[i].is_identity();
            let centralizes = is_h(x) && tl.elems.iter().all(|m| g.mul(x, m) == g.mul(m, x));
            (in_kernel != centralizes).then_some(i)
        })),
    ));
    out.push(Check::new(
        "chi-translations",
        scan_elements(tl, scan, |m| {
            let Some(mi) = idx(m) else { return false };
            let tr = |k| table.translation(k, mi, None).ok();
            tl.chi(m).ok() == tr(Translation::P)
                && tl.chi(&g.rho(m)).ok() == tr(Translation::L)
                && tl.chi(&rho2(g, m)).ok() == tr(Translation::R)
        }),
    ));
    out.push(Check::new(
        "chi-centralizer",
        Verdict::from_witness(hs.iter().enumerate().find_map(|(i, h)| {
            let j = tl.conj_perm(h).ok()?;
            let f = idx(&phi(g, h))?;
            let r = table.translation(Translation::R, f, None).ok()?;
            let l = table.translation(Translation::L, table.inv(f), None).ok()?;
            let ok = tl.chi(h).ok() == Some(j.clone())
                && tl.chi(&g.rho(h)).ok() == Some(j.then(&r))
                && tl.chi(&rho2(g, h)).ok() == Some(j.then(&l));
            (!ok).then_some(i)
        })),
    ));
    Ok(out)
}

/// Associators `(l, u, v)` with `l ∈ M(A)` and `u, v ∈ M(W)` are trivial.
pub fn abelian_associators(tl: &TrialityLoop<'_, WreathModule>, scan: Scan) -> Check {
    let a = tl.group();
    let sub = a.moufang_module();
    let q = a.ring().order() as usize;
    let count = q.pow(sub.dim() as u32);
    let coords = |i: usize| -> Vec<RingElem> {
        (0..sub.dim()).map(|k| RingElem::from_index(((i / q.pow(k as u32)) % q) as u32)).collect()
    };
    let vs: Vec<ModElem> = (0..count).map(|i| a.module_elem(sub.combine(a.ring(), &coords(i)))).collect();
    let vs = pick(&vs, 64, &scan, 0x5657);
    let ls = pick(tl.elems(), scan.exhaustive_limit.min(1024), &scan, 0x4c4c);
    let e = a.identity();
    Check::new(
        "abelian-associators",
        Verdict::from_witness(ls.iter().enumerate().find_map(|(i, l)| {
            vs.iter()
                .enumerate()
                .find_map(|(j, u)| vs.iter().position(|v| associator(tl, l, u, v) != e).map(|k| (i, j, k)))
        })),
    )
}
