//! Extensions `1 → U → E → M → 1` of Moufang loops with abelian kernel.
//!
//! An [`Extension`] records a loop `E`, a validated abelian normal subgroup
//! `U` and the projection onto `E/U`. [`nontriviality`] decides whether `E`
//! is nonassociative and not isomorphic to `U × E/U`, and [`minimality`]
//! decides whether some proper nontrivial subgroup of `U` is already normal
//! in `E`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::Duration;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::loopcore::{
    associativity, associator, element_order, is_moufang, is_subloop, isomorphism, normality, quotient, translate,
    Loop, LoopTable, Scan, Translation, Verdict,
};
use crate::par;
use crate::products::{catalog, catalog_order, Construction, CATALOG_NAMES};
use crate::ring::{prime_power, Ring, RingElem};

/// Kernels up to this order have every pair and triple checked.
pub const KERNEL_EXHAUSTIVE_LIMIT: usize = 64;
/// Loops up to this order are compared against `U × E/U` by isomorphism search.
pub const DIRECT_PRODUCT_LIMIT: usize = 4096;
/// Time allowed for one direct-product isomorphism search.
pub const DIRECT_PRODUCT_TIMEOUT: Duration = Duration::from_secs(20);
/// Loops up to this order contribute every inner mapping generator to spinning.
pub const SPIN_ALL_PAIRS_LIMIT: usize = 64;
/// Seeded pairs `(x, y)` whose inner mappings seed spinning in larger loops.
pub const SPIN_GENERATOR_SAMPLE: usize = 48;
/// Largest number of projective points spun.
pub const SPIN_POINT_LIMIT: usize = 1 << 16;
/// Largest kernel whose subgroups are enumerated.
pub const SUBGROUP_ENUM_LIMIT: usize = 256;
/// Pairs tried when confirming that a candidate subgroup is normal in a large loop.
pub const CANDIDATE_NORMALITY_BUDGET: usize = 512;

/// A loop with a distinguished abelian normal subgroup.
pub struct Extension<'a, L: Loop> {
    e: &'a L,
    kernel: Vec<usize>,
    quotient: LoopTable,
    projection: Vec<u32>,
}

impl<'a, L: Loop> Extension<'a, L> {
    pub fn loop_ref(&self) -> &'a L {
        self.e
    }

    /// Indices of `U`, ascending.
    pub fn kernel(&self) -> &[usize] {
        &self.kernel
    }

    pub fn quotient(&self) -> &LoopTable {
        &self.quotient
    }

    /// Image of element `i` in the quotient.
    pub fn project(&self, i: usize) -> usize {
        self.projection[i] as usize
    }

    /// Cayley table of `U`, indexed by position in [`Extension::kernel`].
    pub fn kernel_table(&self) -> Result<LoopTable> {
        let pos: HashMap<usize, usize> = self.kernel.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let els: Vec<L::Elem> = self.kernel.iter().map(|&i| self.e.element(i)).collect();
        LoopTable::build(els.len(), |a, b| pos[&self.e.index_of(&self.e.mul(&els[a], &els[b])).expect("closed")])
    }
}

fn sorted_subset(n: usize, s: &[usize]) -> Result<Vec<usize>> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&i) = s.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: i, order: n });
    }
    Ok(s)
}

/// Checks that the kernel elements commute and associate.
fn check_abelian_group<L: Loop>(e: &L, kernel: &[usize], scan: Scan) -> Result<()> {
    let els: Vec<L::Elem> = kernel.iter().map(|&i| e.element(i)).collect();
    let k = els.len();
    let commute = |a: usize, b: usize| e.mul(&els[a], &els[b]) == e.mul(&els[b], &els[a]);
    let assoc = |a: usize, b: usize, c: usize| associator(e, &els[a], &els[b], &els[c]) == e.identity();
    let bad = if k <= KERNEL_EXHAUSTIVE_LIMIT {
        par::find_first(scan.exec, k, |a| (0..k).any(|b| !commute(a, b) || (0..k).any(|c| !assoc(a, b, c)))).is_some()
    } else {
        let mut rng = scan.rng();
        let draws: Vec<(usize, usize, usize)> =
            (0..scan.budget).map(|_| (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k))).collect();
        par::find_first(scan.exec, draws.len(), |s| {
            let (a, b, c) = draws[s];
            !commute(a, b) || !assoc(a, b, c)
        })
        .is_some()
    };
    if bad {
        Err(Error::KernelNotAbelian)
    } else {
        Ok(())
    }
}

/// Validates `U ⊆ E` and builds the quotient from cosets.
///
/// Closure and commutativity are checked on every pair of `U`; normality goes
/// through [`normality`], which is exhaustive for `|E| ≤ 512`.
pub fn extension_make<'a, L: Loop>(e: &'a L, kernel: &[usize], scan: Scan) -> Result<Extension<'a, L>> {
    let kernel = sorted_subset(e.order(), kernel)?;
    if !is_subloop(e, &kernel) {
        return Err(Error::KernelNotClosed);
    }
    check_abelian_group(e, &kernel, scan)?;
    if !normality(e, &kernel, scan)?.is_pass() {
        return Err(Error::KernelNotNormal);
    }
    let q = quotient(e, &kernel, scan).map_err(|err| match err {
        Error::NotNormal => Error::KernelNotNormal,
        other => other,
    })?;
    let projection = q.coset.iter().map(|&c| c as u32).collect();
    Ok(Extension { e, kernel, quotient: q.table, projection })
}

/// Builds an extension from a known projection onto `quotient`.
///
/// The kernel is the fibre over the identity. The homomorphism property is
/// checked on every pair when `|E| ≤ scan.exhaustive_limit` and on
/// `scan.budget` seeded pairs otherwise; a homomorphism kernel is
/// automatically a normal subloop.
pub fn extension_with_projection<'a, L, F>(
    e: &'a L,
    quotient: LoopTable,
    project: F,
    scan: Scan,
) -> Result<Extension<'a, L>>
where
    L: Loop,
    F: Fn(usize) -> usize + Sync + Send,
{
    let n = e.order();
    let projection: Vec<u32> = par::map_collect(scan.exec, n, |i| project(i) as u32);
    if let Some(i) = projection.iter().position(|&c| c as usize >= quotient.order()) {
        return Err(Error::IllDefined(format!("element {i} projects outside the quotient")));
    }
    let hom = |x: usize, y: usize| {
        let xy = e.index_of(&e.mul(&e.element(x), &e.element(y))).expect("closed");
        projection[xy] as usize == quotient.mul(projection[x] as usize, projection[y] as usize)
    };
    let bad = if n <= scan.exhaustive_limit {
        par::find_map_first(scan.exec, n, |x| (0..n).find(|&y| !hom(x, y)).map(|y| (x, y))).map(|(_, w)| w)
    } else {
        let mut rng = scan.rng();
        let draws: Vec<(usize, usize)> = (0..scan.budget).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        par::find_first(scan.exec, draws.len(), |s| !hom(draws[s].0, draws[s].1)).map(|s| draws[s])
    };
    if let Some((x, y)) = bad {
        return Err(Error::IllDefined(format!("projection is not multiplicative at ({x}, {y})")));
    }
    let kernel: Vec<usize> = (0..n).filter(|&i| projection[i] == 0).collect();
    if kernel.len() * quotient.order() != n {
        return Err(Error::IllDefined("fibres of the projection have different sizes".into()));
    }
    check_abelian_group(e, &kernel, scan)?;
    Ok(Extension { e, kernel, quotient, projection })
}

/// The extension `{(1, u)} → G⋉V → G` or `M⋉U → M` of a catalog construction.
pub fn construction_extension<'a>(c: &'a Construction, scan: Scan) -> Result<Extension<'a, Construction>> {
    match c.base_table(scan.exec) {
        Some(table) => extension_with_projection(c, table?, |i| c.projection(i).expect("has a base"), scan),
        None => Err(Error::OutOfCatalog("table constructions have no distinguished kernel".into())),
    }
}

// ---------------------------------------------------------------------------
// Nontriviality

/// Why `E` is not a direct product `U × E/U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `u x ≠ x u` with `u ∈ U`.
    KernelNotCentral { u: usize, x: usize },
    /// `(u, x, y) ≠ 1` with `u ∈ U`.
    KernelNotNuclear { u: usize, x: usize, y: usize },
    /// Isomorphism search against the explicit product table failed.
    NotIsomorphicToProduct,
}

/// Outcome of the nontriviality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nontriviality {
    Associative,
    /// `E ≅ U × E/U`, with the isomorphism as images of indices of `E`.
    DirectProduct(Vec<usize>),
    Nontrivial {
        associator: (usize, usize, usize),
        obstruction: Obstruction,
    },
}

impl Nontriviality {
    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Nontriviality::Nontrivial { .. })
    }
}

impl fmt::Display for Nontriviality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nontriviality::Associative => write!(f, "associative"),
            Nontriviality::DirectProduct(_) => write!(f, "direct-product"),
            Nontriviality::Nontrivial { associator: (a, b, c), obstruction } => {
                write!(f, "assoc({a},{b},{c})/")?;
                match obstruction {
                    Obstruction::KernelNotCentral { u, x } => write!(f, "noncentral({u},{x})"),
                    Obstruction::KernelNotNuclear { u, x, y } => write!(f, "nonnuclear({u},{x},{y})"),
                    Obstruction::NotIsomorphicToProduct => write!(f, "no-product-isomorphism"),
                }
            }
        }
    }
}

/// Seeded sample of `min(k, len)` indices from `0..len`, or all of them.
fn sample_indices(len: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    if len <= k {
        (0..len).collect()
    } else {
        (0..k).map(|_| rng.gen_range(0..len)).collect()
    }
}

fn central_obstruction<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Option<Obstruction> {
    let e = x.e;
    let n = e.order();
    let mut rng = scan.rng();
    let us: Vec<usize> =
        sample_indices(x.kernel.len(), KERNEL_EXHAUSTIVE_LIMIT, &mut rng).into_iter().map(|p| x.kernel[p]).collect();
    let side = if n <= scan.exhaustive_limit { n } else { (scan.budget / us.len().max(1)).clamp(1, 4096) };
    let xs = sample_indices(n, side, &mut rng);
    let ys = sample_indices(n, side.min(64), &mut rng);
    let id = e.identity();
    let found = par::find_map_first(scan.exec, xs.len(), |a| {
        let ex = e.element(xs[a]);
        us.iter().find_map(|&u| {
            let eu = e.element(u);
            if e.mul(&eu, &ex) != e.mul(&ex, &eu) {
                return Some(Obstruction::KernelNotCentral { u, x: xs[a] });
            }
            ys.iter().find_map(|&y| {
                (associator(e, &eu, &ex, &e.element(y)) != id).then_some(Obstruction::KernelNotNuclear {
                    u,
                    x: xs[a],
                    y,
                })
            })
        })
    });
    found.map(|(_, o)| o)
}

/// Decides whether `E` is nonassociative and not isomorphic to `U × E/U`.
///
/// A noncentral or non-nuclear kernel rules out the direct product at once.
/// Otherwise `E` is materialized (up to [`DIRECT_PRODUCT_LIMIT`]) and
/// compared with the explicit product table.
pub fn nontriviality<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Result<Nontriviality> {
    let e = x.e;
    let associator = match associativity(e, scan) {
        Verdict::Fail(w) => w,
        Verdict::Pass if e.order() <= scan.exhaustive_limit => return Ok(Nontriviality::Associative),
        Verdict::Pass => {
            return Err(Error::TooLargeToDecide(format!(
                "no associator found among {} sampled triples of a loop of order {}",
                scan.budget,
                e.order()
            )))
        }
    };
    if let Some(obstruction) = central_obstruction(x, scan) {
        return Ok(Nontriviality::Nontrivial { associator, obstruction });
    }
    if e.order() > DIRECT_PRODUCT_LIMIT {
        return Err(Error::TooLargeToDecide(format!("central kernel in a loop of order {}", e.order())));
    }
    let table = LoopTable::materialize(e, scan.exec)?;
    let product = LoopTable::direct_product(&x.kernel_table()?, &x.quotient);
    match isomorphism(&table, &product, Some(DIRECT_PRODUCT_TIMEOUT)) {
        Ok(Some(f)) => Ok(Nontriviality::DirectProduct(f)),
        Ok(None) => Ok(Nontriviality::Nontrivial { associator, obstruction: Obstruction::NotIsomorphicToProduct }),
        Err(Error::Timeout) => Err(Error::TooLargeToDecide("direct-product isomorphism search timed out".into())),
        Err(other) => Err(other),
    }
}

pub fn is_nontrivial<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Result<bool> {
    Ok(nontriviality(x, scan)?.is_nontrivial())
}

// ---------------------------------------------------------------------------
// Minimality

/// Outcome of the minimality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Minimality {
    /// Every nonzero vector spins to all of `U` under `generators` inner mappings.
    IrreducibleModule { points: usize, generators: usize },
    /// None of the `subgroups` proper nontrivial subgroups of `U` is normal.
    NoNormalSubgroup { subgroups: usize },
    /// A proper nontrivial subgroup of `U` that is normal in `E` (indices of `E`).
    NotMinimal(Vec<usize>),
}

impl Minimality {
    pub fn is_minimal(&self) -> bool {
        !matches!(self, Minimality::NotMinimal(_))
    }

    pub fn witness(&self) -> Option<&[usize]> {
        match self {
            Minimality::NotMinimal(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Minimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Minimality::IrreducibleModule { points, generators } => write!(f, "spin({points}pts,{generators}maps)"),
            Minimality::NoNormalSubgroup { subgroups } => write!(f, "subgroups({subgroups})"),
            Minimality::NotMinimal(s) => {
                let shown: Vec<String> = s.iter().take(8).map(|i| i.to_string()).collect();
                write!(f, "normal{{{}{}}}", shown.join(","), if s.len() > 8 { ",..." } else { "" })
            }
        }
    }
}

/// `U` as an `F_p`-vector space: a basis of kernel elements and coordinates.
struct Coordinates {
    field: Ring,
    dim: usize,
    /// Coordinate vector of each kernel element, keyed by its index in `E`.
    coords: HashMap<usize, Vec<RingElem>>,
    /// Index in `E` of each coordinate vector.
    index: HashMap<Vec<RingElem>, usize>,
}

/// Coordinates for `U` if it is elementary abelian, built from a greedy basis.
fn coordinates<L: Loop>(e: &L, kernel: &[usize]) -> Option<Coordinates> {
    let k = kernel.len();
    let (p, dim) = prime_power(k as u32)?;
    if kernel.iter().any(|&i| {
        let o = element_order(e, &e.element(i));
        o != 1 && o != p as usize
    }) {
        return None;
    }
    let field = Ring::field(p).ok()?;
    let id = e.index_of(&e.identity())?;
    let mut index: HashMap<Vec<RingElem>, usize> = HashMap::from([(vec![RingElem::ZERO; dim as usize], id)]);
    let mut coords: HashMap<usize, Vec<RingElem>> = HashMap::from([(id, vec![RingElem::ZERO; dim as usize])]);
    let mut span: Vec<(Vec<RingElem>, L::Elem)> = vec![(vec![RingElem::ZERO; dim as usize], e.identity())];
    let mut level = 0usize;
    for &b in kernel {
        if coords.contains_key(&b) {
            continue;
        }
        if level == dim as usize {
            return None;
        }
        // Extend the span by every multiple of the new basis element.
        let eb = e.element(b);
        let mut added = Vec::new();
        for (v, x) in &span {
            let mut y = x.clone();
            for c in 1..p {
                y = e.mul(&y, &eb);
                let mut w = v.clone();
                w[level] = field.from_int(c as i64);
                let yi = e.index_of(&y)?;
                if coords.insert(yi, w.clone()).is_some() {
                    return None;
                }
                index.insert(w.clone(), yi);
                added.push((w, y.clone()));
            }
        }
        span.extend(added);
        level += 1;
    }
    (span.len() == k).then_some(Coordinates { field, dim: dim as usize, coords, index })
}

/// Matrix of an inner mapping restricted to `U`, if it acts linearly.
fn inner_matrix<L: Loop>(e: &L, c: &Coordinates, kind: Translation, x: usize, y: usize) -> Option<Matrix> {
    let (ex, ey) = (e.element(x), e.element(y));
    let yarg = kind.binary().then_some(&ey);
    let image = |i: usize| -> Option<Vec<RingElem>> {
        let img = translate(e, kind, &ex, yarg, &e.element(i)).ok()?;
        c.coords.get(&e.index_of(&img)?).cloned()
    };
    let rows: Vec<Vec<RingElem>> = (0..c.dim)
        .map(|j| {
            let mut v = vec![RingElem::ZERO; c.dim];
            v[j] = RingElem::ONE;
            image(c.index[&v])
        })
        .collect::<Option<_>>()?;
    let m = Matrix::from_rows(rows);
    // Linearity on every kernel element; kernels here are at most p^7.
    c.coords.iter().all(|(&i, v)| image(i).as_deref() == Some(&m.vec_mul(&c.field, v)[..])).then_some(m)
}

/// Projective points of `F_p^dim`: vectors whose first nonzero entry is 1.
fn projective_points(field: &Ring, dim: usize) -> Vec<Vec<RingElem>> {
    let p = field.order() as usize;
    let mut out = Vec::new();
    for lead in 0..dim {
        let free = dim - lead - 1;
        for t in 0..p.pow(free as u32) {
            let mut v = vec![RingElem::ZERO; dim];
            v[lead] = RingElem::ONE;
            let mut t = t;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = field.from_int((t % p) as i64);
                t /= p;
            }
            out.push(v);
        }
    }
    out
}

/// Smallest subspace containing `v` and invariant under `gens`.
fn spin(field: &Ring, dim: usize, gens: &[Matrix], v: &[RingElem]) -> Subspace {
    let mut s = Subspace::zero(dim);
    s.insert(field, v);
    let mut queue = vec![v.to_vec()];
    while let Some(w) = queue.pop() {
        for g in gens {
            let img = g.vec_mul(field, &w);
            if s.insert(field, &img) {
                queue.push(img);
            }
        }
        if s.dim() == dim {
            break;
        }
    }
    s
}

/// Kernel elements lying in the subspace `s`.
fn subspace_elements(c: &Coordinates, s: &Subspace) -> Vec<usize> {
    let mut out: Vec<usize> = c.coords.iter().filter(|(_, v)| s.contains(&c.field, v)).map(|(&i, _)| i).collect();
    out.sort_unstable();
    out
}

fn candidate_scan(e_order: usize, scan: Scan) -> Scan {
    if e_order <= crate::loopcore::NORMALITY_EXHAUSTIVE_LIMIT {
        scan
    } else {
        Scan { budget: scan.budget.min(CANDIDATE_NORMALITY_BUDGET), ..scan }
    }
}

/// Minimality by spinning, for elementary abelian kernels with linear inner mappings.
///
/// Generators are the inner mappings `T_x, L_{x,y}, R_{x,y}` for all pairs
/// when `|E| ≤ 64` and for seeded pairs otherwise. Since they are inner
/// mappings, irreducibility under them is a certificate. A proper invariant
/// subspace is confirmed by [`normality`]; when that finds a moving inner
/// mapping it joins the generators and spinning restarts.
fn minimality_by_spinning<L: Loop>(x: &Extension<'_, L>, c: &Coordinates, scan: Scan) -> Result<Option<Minimality>> {
    let e = x.e;
    let n = e.order();
    let pts = projective_points(&c.field, c.dim);
    if pts.len() > SPIN_POINT_LIMIT {
        return Err(Error::TooLarge(format!("{} projective points", pts.len())));
    }
    let pairs: Vec<(usize, usize)> = if n <= SPIN_ALL_PAIRS_LIMIT {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut rng = scan.rng();
        (0..SPIN_GENERATOR_SAMPLE).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    let kinds = [Translation::T, Translation::Lxy, Translation::Rxy];
    let mats: Vec<Option<Matrix>> = par::map_collect(scan.exec, pairs.len() * kinds.len(), |i| {
        let (a, b) = pairs[i / kinds.len()];
        inner_matrix(e, c, kinds[i % kinds.len()], a, b)
    });
    let mut gens: Vec<Matrix> = Vec::new();
    let mut seen = HashSet::new();
    for m in mats {
        // A nonlinear inner mapping leaves the decision to subgroup enumeration.
        let Some(m) = m else { return Ok(None) };
        if !m.is_identity() && seen.insert(m.clone()) {
            gens.push(m);
        }
    }
    let cscan = candidate_scan(n, scan);
    loop {
        let proper = par::find_map_first(scan.exec, pts.len(), |i| {
            let s = spin(&c.field, c.dim, &gens, &pts[i]);
            (s.dim() < c.dim).then_some(s)
        });
        let Some((_, s)) = proper else {
            return Ok(Some(Minimality::IrreducibleModule { points: pts.len(), generators: gens.len() }));
        };
        let v = subspace_elements(c, &s);
        match normality(e, &v, cscan)? {
            Verdict::Pass => return Ok(Some(Minimality::NotMinimal(v))),
            Verdict::Fail(w) => {
                let m = inner_matrix(e, c, w.kind, w.x, w.y.unwrap_or(0))
                    .ok_or(Error::TooLargeToDecide("an inner mapping acts nonlinearly on the kernel".into()))?;
                if !seen.insert(m.clone()) {
                    return Err(Error::IllDefined("generator already present moves an invariant subspace".into()));
                }
                gens.push(m);
            }
        }
    }
}

/// Every subgroup of the abelian group `U`, as ascending indices of `E`.
fn abelian_subgroups<L: Loop>(e: &L, kernel: &[usize]) -> Vec<Vec<usize>> {
    let id = e.index_of(&e.identity()).expect("identity is an element");
    let mut found: HashSet<Vec<usize>> = HashSet::from([vec![id]]);
    let mut queue = vec![vec![id]];
    while let Some(s) = queue.pop() {
        let member: HashSet<usize> = s.iter().copied().collect();
        for &g in kernel {
            if member.contains(&g) {
                continue;
            }
            // ⟨S, g⟩ = ⋃_k S g^k in an abelian group.
            let eg = e.element(g);
            let mut next: HashSet<usize> = member.clone();
            let mut layer: Vec<L::Elem> = s.iter().map(|&i| e.element(i)).collect();
            loop {
                layer = layer.iter().map(|a| e.mul(a, &eg)).collect();
                let before = next.len();
                next.extend(layer.iter().map(|a| e.index_of(a).expect("closed")));
                if next.len() == before {
                    break;
                }
            }
            let mut t: Vec<usize> = next.into_iter().collect();
            t.sort_unstable();
            if found.insert(t.clone()) {
                queue.push(t);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// Minimality by testing every proper nontrivial subgroup of `U` for normality.
pub fn minimality_by_enumeration<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Result<Minimality> {
    if x.kernel.len() > SUBGROUP_ENUM_LIMIT {
        return Err(Error::TooLarge(format!("kernel of order {} has too many subgroups", x.kernel.len())));
    }
    let subs: Vec<Vec<usize>> =
        abelian_subgroups(x.e, &x.kernel).into_iter().filter(|s| s.len() > 1 && s.len() < x.kernel.len()).collect();
    let cscan = candidate_scan(x.e.order(), scan);
    for s in &subs {
        if normality(x.e, s, cscan)?.is_pass() {
            return Ok(Minimality::NotMinimal(s.clone()));
        }
    }
    Ok(Minimality::NoNormalSubgroup { subgroups: subs.len() })
}

/// Whether some proper nontrivial subgroup of `U` is normal in `E`.
///
/// Elementary abelian kernels on which the inner mappings act linearly are
/// decided by spinning; other kernels up to [`SUBGROUP_ENUM_LIMIT`] by
/// subgroup enumeration.
pub fn minimality<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Result<Minimality> {
    if x.kernel.len() == 1 {
        return Ok(Minimality::NoNormalSubgroup { subgroups: 0 });
    }
    if let Some(c) = coordinates(x.e, &x.kernel) {
        if let Some(m) = minimality_by_spinning(x, &c, scan)? {
            return Ok(m);
        }
    }
    minimality_by_enumeration(x, scan)
}

pub fn is_minimal<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Result<bool> {
    Ok(minimality(x, scan)?.is_minimal())
}

/// Whether the quotient of a Moufang extension is Moufang.
pub fn quotient_is_moufang<L: Loop>(x: &Extension<'_, L>, scan: Scan) -> Verdict<(usize, usize, usize)> {
    is_moufang(&x.quotient, scan)
}

// ---------------------------------------------------------------------------
// Survey

/// One line of the extension survey.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveyRow {
    pub construction: String,
    pub order: usize,
    pub kernel: usize,
    pub nontrivial: Option<bool>,
    pub minimal: Option<bool>,
    pub witness: String,
}

impl fmt::Display for SurveyRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: Option<bool>| match b {
            Some(true) => "y",
            Some(false) => "n",
            None => "?",
        };
        write!(
            f,
            "{} {} {} nontrivial={} minimal={} witness={}",
            self.construction,
            self.order,
            self.kernel,
            yn(self.nontrivial),
            yn(self.minimal),
            self.witness
        )
    }
}

fn survey_row(name: &str, q: u32, order: usize, scan: Scan) -> SurveyRow {
    let mut row = SurveyRow {
        construction: format!("catalog:{name},{q}"),
        order,
        kernel: 0,
        nontrivial: None,
        minimal: None,
        witness: String::new(),
    };
    let c = match catalog(name, q, scan.seed, scan.exec) {
        Ok(c) => c,
        Err(err) => {
            row.witness = format!("error:{err}").replace(' ', "_");
            return row;
        }
    };
    let x = match construction_extension(&c, scan) {
        Ok(x) => x,
        Err(err) => {
            row.witness = format!("error:{err}").replace(' ', "_");
            return row;
        }
    };
    row.kernel = x.kernel().len();
    let nt = nontriviality(&x, scan);
    let mn = minimality(&x, scan);
    row.nontrivial = nt.as_ref().ok().map(Nontriviality::is_nontrivial);
    row.minimal = mn.as_ref().ok().map(Minimality::is_minimal);
    let show = |r: std::result::Result<String, Error>| r.unwrap_or_else(|err| format!("undecided:{err}"));
    row.witness = format!("{};{}", show(nt.map(|v| v.to_string())), show(mn.map(|v| v.to_string()))).replace(' ', "_");
    row
}

/// Runs the extension checks over every catalog construction with `|E| ≤ bound`.
///
/// Rows come in field order, then catalog order. Seeds are fixed by `scan`,
/// so the report is reproducible.
pub fn survey_small(bound: usize, fields: &[u32], scan: Scan) -> Vec<SurveyRow> {
    let mut fields = fields.to_vec();
    fields.sort_unstable();
    fields.dedup();
    let jobs: Vec<(&str, u32, usize)> = fields
        .iter()
        .flat_map(|&q| CATALOG_NAMES.iter().map(move |&name| (name, q)))
        .filter_map(|(name, q)| catalog_order(name, q).filter(|&o| o <= bound).map(|o| (name, q, o)))
        .collect();
    jobs.iter().map(|&(name, q, o)| survey_row(name, q, o, scan)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopcore::{isomorphic, LoopTable};
    use crate::par::Exec;
    use crate::zorn::psl_loop;
    use proptest::prelude::*;

    fn scan() -> Scan {
        Scan { seed: 7, ..Scan::default() }
    }

    #[test]
    fn cyclic_four_over_two() {
        let z4 = LoopTable::cyclic(4);
        let x = extension_make(&z4, &[0, 2], scan()).unwrap();
        assert_eq!(x.quotient().order(), 2);
        assert!(isomorphic(x.quotient(), &LoopTable::cyclic(2)).unwrap());
        assert_eq!(x.project(1), x.project(3));
        assert_ne!(x.project(0), x.project(1));
    }

    #[test]
    fn non_normal_kernel_rejected() {
        let s3 = LoopTable::symmetric(3);
        let t = (1..6).find(|&i| s3.mul(i, i) == 0 && !is_normal_pair(&s3, i)).unwrap();
        assert_eq!(extension_make(&s3, &[0, t], scan()).err(), Some(Error::KernelNotNormal));
    }

    fn is_normal_pair(t: &LoopTable, i: usize) -> bool {
        (0..t.order()).all(|g| {
            let c = t.mul(t.mul(t.inv(g), i), g);
            c == i || c == 0
        })
    }

    #[test]
    fn kernel_validation_errors() {
        let s3 = LoopTable::symmetric(3);
        assert_eq!(
            extension_make(&s3, &[0, 1], scan())
                .err()
                .map(|e| e == Error::KernelNotClosed || e == Error::KernelNotNormal),
            Some(true)
        );
        assert_eq!(extension_make(&s3, &(0..6).collect::<Vec<_>>(), scan()).err(), Some(Error::KernelNotAbelian));
        let z4 = LoopTable::cyclic(4);
        assert_eq!(extension_make(&z4, &[0, 1], scan()).err(), Some(Error::KernelNotClosed));
    }

    #[test]
    fn paige_two_is_nontrivial_and_minimal() {
        let c = catalog("paige-semidirect", 2, 0, Exec::Auto).unwrap();
        let x = construction_extension(&c, scan()).unwrap();
        assert_eq!(x.kernel().len(), 64);
        let m2 = psl_loop(&Ring::field(2).unwrap(), 4096, Exec::Auto).unwrap();
        assert!(isomorphic(x.quotient(), &m2).unwrap());
        assert!(quotient_is_moufang(&x, scan()).is_pass());
        let nt = nontriviality(&x, scan()).unwrap();
        assert!(nt.is_nontrivial(), "{nt}");
        let m = minimality(&x, scan()).unwrap();
        assert!(matches!(m, Minimality::IrreducibleModule { points: 63, .. }), "{m}");
    }

    #[test]
    fn gl2_natural_module_is_minimal() {
        let c = catalog("gl2-semidirect", 2, 0, Exec::Auto).unwrap();
        let x = construction_extension(&c, scan()).unwrap();
        assert_eq!(x.kernel(), &[0, 1, 2, 3]);
        assert!(minimality(&x, scan()).unwrap().is_minimal());
        assert_eq!(minimality_by_enumeration(&x, scan()).unwrap(), Minimality::NoNormalSubgroup { subgroups: 3 });
        assert!(is_nontrivial(&x, scan()).unwrap());
        // The generic path through cosets agrees with the projection.
        let t = c.materialize(4096, Exec::Auto).unwrap();
        let y = extension_make(&t, x.kernel(), scan()).unwrap();
        assert!(isomorphic(y.quotient(), x.quotient()).unwrap());
    }

    fn moufang_times_cyclic(k: usize) -> (LoopTable, Vec<usize>) {
        let m2 = psl_loop(&Ring::field(2).unwrap(), 4096, Exec::Auto).unwrap();
        // Index of (u, m) in the product is u * |M| + m.
        let t = LoopTable::direct_product(&LoopTable::cyclic(k), &m2);
        let kernel = (0..k).map(|u| u * m2.order()).collect();
        (t, kernel)
    }

    #[test]
    fn direct_product_kernel_not_minimal() {
        let (t, kernel) = moufang_times_cyclic(4);
        let x = extension_make(&t, &kernel, scan()).unwrap();
        assert_eq!(minimality(&x, scan()).unwrap(), Minimality::NotMinimal(vec![0, 2 * 120]));
    }

    #[test]
    fn direct_product_is_trivial() {
        let (t, kernel) = moufang_times_cyclic(2);
        let x = extension_make(&t, &kernel, scan()).unwrap();
        assert!(matches!(nontriviality(&x, scan()).unwrap(), Nontriviality::DirectProduct(_)));
    }

    #[test]
    fn associative_is_trivial() {
        let c = catalog("diag-semidirect", 3, 0, Exec::Auto).unwrap();
        let x = construction_extension(&c, scan()).unwrap();
        assert_eq!(nontriviality(&x, scan()).unwrap(), Nontriviality::Associative);
        // The diagonal torus acts on F_3² with two invariant lines.
        assert!(!is_minimal(&x, scan()).unwrap());
    }

    #[test]
    fn bad_projection_rejected() {
        let z4 = LoopTable::cyclic(4);
        let z2 = LoopTable::cyclic(2);
        assert!(extension_with_projection(&z4, z2.clone(), |i| i % 2, scan()).is_ok());
        assert!(matches!(
            extension_with_projection(&z4, z2, |i| usize::from(i == 1), scan()),
            Err(Error::IllDefined(_))
        ));
    }

    #[test]
    fn subgroup_counts() {
        // Subgroups of F_2^3: 1 + 7 + 7 + 1.
        let t = LoopTable::direct_product(
            &LoopTable::direct_product(&LoopTable::cyclic(2), &LoopTable::cyclic(2)),
            &LoopTable::cyclic(2),
        );
        let all: Vec<usize> = (0..8).collect();
        assert_eq!(abelian_subgroups(&t, &all).len(), 16);
        // Z/4 × Z/2 has 8 subgroups.
        let t = LoopTable::direct_product(&LoopTable::cyclic(4), &LoopTable::cyclic(2));
        assert_eq!(abelian_subgroups(&t, &all).len(), 8);
    }

    #[test]
    fn survey_is_deterministic() {
        let a = survey_small(500, &[3, 2], scan());
        let b = survey_small(500, &[2, 3], scan());
        assert_eq!(a, b);
        let names: Vec<&str> = a.iter().map(|r| r.construction.as_str()).collect();
        assert_eq!(
            names,
            [
                "catalog:diag-semidirect,2",
                "catalog:gl2-semidirect,2",
                "catalog:diag-semidirect,3",
                "catalog:gl2-semidirect,3"
            ]
        );
        assert_eq!(a[0].nontrivial, Some(false));
        assert_eq!(a[1].nontrivial, Some(true));
        assert_eq!(a[3].minimal, Some(true));
        assert_eq!(a[3].to_string().split(' ').count(), 6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn spinning_agrees_with_enumeration(name in prop::sample::select(vec!["diag-semidirect", "gl2-semidirect"]), q in prop::sample::select(vec![2u32, 3, 4, 5]), seed in 0u64..1000) {
            let c = catalog(name, q, 0, Exec::Auto).unwrap();
            let s = Scan { seed, ..Scan::default() };
            let x = construction_extension(&c, s).unwrap();
            let spun = minimality(&x, s).unwrap();
            let enumerated = minimality_by_enumeration(&x, s).unwrap();
            prop_assert_eq!(spun.is_minimal(), enumerated.is_minimal());
        }
    }
}
