//! Finite loops: validated Cayley tables, translations, inner mappings,
//! subloops, quotients, pseudoautomorphisms and isomorphism search.
//!
//! Maps act on the right, so the permutation `A B` applies `A` first.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fmt::Debug;
use std::hash::Hash;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// A finite loop whose elements are enumerable by index.
///
/// `ldiv` and `rdiv` default to the inverse-property formulas `x^{-1} y` and
/// `x y^{-1}`, which are exact in Moufang loops.
pub trait Loop: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn order(&self) -> usize;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Self::Elem;
    fn element(&self, i: usize) -> Self::Elem;
    fn index_of(&self, x: &Self::Elem) -> Option<usize>;

    /// The unique `z` with `x z = y`.
    fn ldiv(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.mul(&self.inv(x), y)
    }

    /// The unique `z` with `z y = x`.
    fn rdiv(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.mul(x, &self.inv(y))
    }

    fn elements(&self) -> Vec<Self::Elem> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }
}

/// Outcome of a verification scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Pass,
    Fail(W),
}

impl<W> Verdict<W> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }

    pub fn from_witness(w: Option<W>) -> Verdict<W> {
        w.map_or(Verdict::Pass, Verdict::Fail)
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Pass => Verdict::Pass,
            Verdict::Fail(w) => Verdict::Fail(f(w)),
        }
    }
}

/// A named verification outcome with a printable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict<String>,
}

impl Check {
    pub fn new<W: Debug>(name: impl Into<String>, verdict: Verdict<W>) -> Check {
        Check { name: name.into(), verdict: verdict.map(|w| format!("{w:?}")) }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Pass => write!(f, "PASS {}", self.name),
            Verdict::Fail(w) => write!(f, "FAIL {} witness={w}", self.name),
        }
    }
}

/// How an identity scan covers its domain.
///
/// Loops of order at most `exhaustive_limit` are scanned completely; larger
/// ones get `budget` seeded uniform samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scan {
    pub exhaustive_limit: usize,
    pub budget: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for Scan {
    fn default() -> Scan {
        Scan { exhaustive_limit: 256, budget: 100_000, seed: 0, exec: Exec::Auto }
    }
}

impl Scan {
    pub fn exhaustive() -> Scan {
        Scan { exhaustive_limit: usize::MAX, ..Scan::default() }
    }

    pub fn sampled(budget: usize, seed: u64) -> Scan {
        Scan { exhaustive_limit: 0, budget, seed, ..Scan::default() }
    }

    pub fn with_exec(self, exec: Exec) -> Scan {
        Scan { exec, ..self }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Checks `holds(x)` on every element (or a sample); reports the first failing index.
pub fn scan_elements<L, F>(l: &L, scan: Scan, holds: F) -> Verdict<usize>
where
    L: Loop,
    F: Fn(&L::Elem) -> bool + Sync + Send,
{
    let n = l.order();
    if n <= scan.exhaustive_limit {
        let els = l.elements();
        return Verdict::from_witness(par::find_first(scan.exec, n, |i| !holds(&els[i])));
    }
    let mut rng = scan.rng();
    let sample: Vec<usize> = (0..scan.budget).map(|_| rng.gen_range(0..n)).collect();
    Verdict::from_witness(
        par::find_first(scan.exec, sample.len(), |s| !holds(&l.element(sample[s]))).map(|s| sample[s]),
    )
}

/// Checks `holds(x, y)` on all ordered pairs (or a sample).
pub fn scan_pairs<L, F>(l: &L, scan: Scan, holds: F) -> Verdict<(usize, usize)>
where
    L: Loop,
    F: Fn(&L::Elem, &L::Elem) -> bool + Sync + Send,
{
    let n = l.order();
    if n <= scan.exhaustive_limit {
        let els = l.elements();
        return Verdict::from_witness(
            par::find_first(scan.exec, n, |x| (0..n).any(|y| !holds(&els[x], &els[y])))
                .map(|x| (x, (0..n).find(|&y| !holds(&els[x], &els[y])).expect("witness exists"))),
        );
    }
    let mut rng = scan.rng();
    let sample: Vec<(usize, usize)> = (0..scan.budget).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    Verdict::from_witness(
        par::find_first(scan.exec, sample.len(), |s| {
            let (x, y) = sample[s];
            !holds(&l.element(x), &l.element(y))
        })
        .map(|s| sample[s]),
    )
}

/// Checks `holds(x, y, z)` on all ordered triples (or a sample); the witness is
/// the lexicographically least failing triple when exhaustive.
pub fn scan_triples<L, F>(l: &L, scan: Scan, holds: F) -> Verdict<(usize, usize, usize)>
where
    L: Loop,
    F: Fn(&L::Elem, &L::Elem, &L::Elem) -> bool + Sync + Send,
{
    let n = l.order();
    if n <= scan.exhaustive_limit {
        let els = l.elements();
        let first_fail =
            |x: usize| (0..n).find_map(|y| (0..n).find(|&z| !holds(&els[x], &els[y], &els[z])).map(|z| (y, z)));
        return Verdict::from_witness(par::find_map_first(scan.exec, n, first_fail).map(|(x, (y, z))| (x, y, z)));
    }
    let mut rng = scan.rng();
    let sample: Vec<(usize, usize, usize)> =
        (0..scan.budget).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    Verdict::from_witness(
        par::find_first(scan.exec, sample.len(), |s| {
            let (x, y, z) = sample[s];
            !holds(&l.element(x), &l.element(y), &l.element(z))
        })
        .map(|s| sample[s]),
    )
}

/// Tests the Moufang law `xy.zx = (x.yz)x`.
pub fn is_moufang<L: Loop>(l: &L, scan: Scan) -> Verdict<(usize, usize, usize)> {
    scan_triples(l, scan, |x, y, z| l.mul(&l.mul(x, y), &l.mul(z, x)) == l.mul(&l.mul(x, &l.mul(y, z)), x))
}

/// Searches for a triple with `x.yz != xy.z`.
pub fn associativity<L: Loop>(l: &L, scan: Scan) -> Verdict<(usize, usize, usize)> {
    scan_triples(l, scan, |x, y, z| l.mul(x, &l.mul(y, z)) == l.mul(&l.mul(x, y), z))
}

pub fn is_commutative<L: Loop>(l: &L, scan: Scan) -> Verdict<(usize, usize)> {
    scan_pairs(l, scan, |x, y| l.mul(x, y) == l.mul(y, x))
}

/// `(x,y,z) = (x.yz)^{-1}(xy.z)`.
pub fn associator<L: Loop>(l: &L, x: &L::Elem, y: &L::Elem, z: &L::Elem) -> L::Elem {
    l.mul(&l.inv(&l.mul(x, &l.mul(y, z))), &l.mul(&l.mul(x, y), z))
}

/// `[[x,y]] = x^{-1}.y^{-1}.x.y`, multiplied left to right.
pub fn commutator<L: Loop>(l: &L, x: &L::Elem, y: &L::Elem) -> L::Elem {
    l.mul(&l.mul(&l.mul(&l.inv(x), &l.inv(y)), x), y)
}

/// `x^k` with `k` possibly negative.
pub fn power<L: Loop>(l: &L, x: &L::Elem, k: i64) -> L::Elem {
    let base = if k < 0 { l.inv(x) } else { x.clone() };
    (0..k.unsigned_abs()).fold(l.identity(), |acc, _| l.mul(&acc, &base))
}

pub fn element_order<L: Loop>(l: &L, x: &L::Elem) -> usize {
    let e = l.identity();
    let mut acc = x.clone();
    let mut k = 1;
    while acc != e {
        acc = l.mul(&acc, x);
        k += 1;
    }
    k
}

/// The translation and inner-mapping families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Translation {
    L,
    R,
    P,
    T,
    Lxy,
    Rxy,
    Dxy,
}

impl Translation {
    pub fn binary(self) -> bool {
        matches!(self, Translation::Lxy | Translation::Rxy | Translation::Dxy)
    }
}

impl std::str::FromStr for Translation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Translation> {
        Ok(match s {
            "L" => Translation::L,
            "R" => Translation::R,
            "P" => Translation::P,
            "T" => Translation::T,
            "Lxy" => Translation::Lxy,
            "Rxy" => Translation::Rxy,
            "Dxy" => Translation::Dxy,
            other => return Err(Error::Parse(format!("unknown translation kind {other:?}"))),
        })
    }
}

/// The image of `m` under the translation `kind` with parameters `x` (and `y`).
///
/// * `m L_x = x m`, `m R_x = m x`
/// * `P_x = L_x^{-1} R_x^{-1}`, `T_x = L_x^{-1} R_x`
/// * `L_{x,y} = L_x L_y L_{yx}^{-1}`, `R_{x,y} = R_x R_y R_{xy}^{-1}`
/// * `m D_{x,y} = x^{-1}.(xy^{-1}.m)y`
pub fn translate<L: Loop>(l: &L, kind: Translation, x: &L::Elem, y: Option<&L::Elem>, m: &L::Elem) -> Result<L::Elem> {
    let second = || y.ok_or(Error::MissingSecondArgument);
    Ok(match kind {
        Translation::L => l.mul(x, m),
        Translation::R => l.mul(m, x),
        Translation::P => l.rdiv(&l.ldiv(x, m), x),
        Translation::T => l.mul(&l.ldiv(x, m), x),
        Translation::Lxy => {
            let y = second()?;
            l.ldiv(&l.mul(y, x), &l.mul(y, &l.mul(x, m)))
        }
        Translation::Rxy => {
            let y = second()?;
            l.rdiv(&l.mul(&l.mul(m, x), y), &l.mul(x, y))
        }
        Translation::Dxy => {
            let y = second()?;
            let xy1 = l.mul(x, &l.inv(y));
            l.mul(&l.inv(x), &l.mul(&l.mul(&xy1, m), y))
        }
    })
}

/// A permutation of `0..n`, acting on the right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, order: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::IllDefined(format!("{i} appears twice in a permutation")));
            }
        }
        Ok(Perm(images.into_iter().map(|i| i as u32).collect()))
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<Perm> {
        Perm::from_images((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }
}

impl Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// Binary operations exposed by [`LoopTable::eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopOp {
    Mul,
    Ldiv,
    Rdiv,
    Inv,
}

/// A finite loop stored as a validated Latin square with identity at index 0.
#[derive(Clone, PartialEq, Eq)]
pub struct LoopTable {
    n: usize,
    mul: Vec<u32>,
    ldiv: Vec<u32>,
    rdiv: Vec<u32>,
    inv: Vec<u32>,
    names: Option<Vec<String>>,
}

impl Debug for LoopTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LoopTable(order {})", self.n)
    }
}

impl LoopTable {
    /// Tabulates `mul` on `0..n` and validates it. An identity found at another
    /// index is swapped into position 0.
    pub fn build(n: usize, mul: impl Fn(usize, usize) -> usize) -> Result<LoopTable> {
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let k = mul(i, j);
                if k >= n {
                    return Err(Error::IndexOutOfRange { index: k, order: n });
                }
                table.push(k as u32);
            }
        }
        LoopTable::from_flat(n, table, None)
    }

    /// Builds from explicit rows.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<LoopTable> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotLatinSquare("table is not square".into()));
        }
        LoopTable::build(n, |i, j| rows[i][j])
    }

    fn from_flat(n: usize, mut table: Vec<u32>, mut names: Option<Vec<String>>) -> Result<LoopTable> {
        if n == 0 {
            return Err(Error::NotLatinSquare("empty table".into()));
        }
        check_latin(n, &table)?;
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .ok_or(Error::NoIdentity)?;
        if e != 0 {
            let swap = |i: usize| {
                if i == 0 {
                    e
                } else if i == e {
                    0
                } else {
                    i
                }
            };
            let old = table.clone();
            for i in 0..n {
                for j in 0..n {
                    table[i * n + j] = swap(old[swap(i) * n + swap(j)] as usize) as u32;
                }
            }
            if let Some(names) = names.as_mut() {
                names.swap(0, e);
            }
        }
        let mut ldiv = vec![0u32; n * n];
        let mut rdiv = vec![0u32; n * n];
        let mut inv = vec![0u32; n];
        for x in 0..n {
            for z in 0..n {
                let y = table[x * n + z] as usize;
                ldiv[x * n + y] = z as u32;
                rdiv[y * n + z] = x as u32;
                if y == 0 {
                    inv[x] = z as u32;
                }
            }
        }
        Ok(LoopTable { n, mul: table, ldiv, rdiv, inv, names })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<LoopTable> {
        if names.len() != self.n {
            return Err(Error::Format(format!("{} names for a loop of order {}", names.len(), self.n)));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// The cyclic group `Z/n` under addition.
    pub fn cyclic(n: usize) -> LoopTable {
        LoopTable::build(n, |i, j| (i + j) % n).expect("cyclic groups are loops")
    }

    /// The symmetric group on `k` points, permutations in lexicographic order.
    /// `p q` applies `p` first.
    pub fn symmetric(k: usize) -> LoopTable {
        let perms = permutations(k);
        let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        LoopTable::build(perms.len(), |i, j| {
            let prod: Vec<usize> = perms[i].iter().map(|&a| perms[j][a]).collect();
            index[&prod]
        })
        .expect("symmetric groups are loops")
    }

    /// `t1 x t2` with `(i, j)` at index `i * |t2| + j`.
    pub fn direct_product(t1: &LoopTable, t2: &LoopTable) -> LoopTable {
        let m = t2.n;
        LoopTable::build(t1.n * m, |a, b| t1.mul(a / m, b / m) * m + t2.mul(a % m, b % m))
            .expect("direct products of loops are loops")
    }

    /// The same loop with element `i` renamed `perm[i]`.
    pub fn relabel(&self, perm: &Perm) -> Result<LoopTable> {
        let inv = perm.inverse();
        let t = LoopTable::build(self.n, |i, j| perm.apply(self.mul(inv.apply(i), inv.apply(j))))?;
        Ok(t)
    }

    /// Tabulates any [`Loop`] in its index order.
    pub fn materialize<L: Loop>(l: &L, exec: Exec) -> Result<LoopTable> {
        let n = l.order();
        let els = l.elements();
        let rows: Vec<Result<Vec<u32>>> = par::map_collect(exec, n, |i| {
            (0..n)
                .map(|j| {
                    l.index_of(&l.mul(&els[i], &els[j]))
                        .map(|k| k as u32)
                        .ok_or_else(|| Error::NotLatinSquare(format!("product of {i} and {j} leaves the loop")))
                })
                .collect()
        });
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            flat.extend(row?);
        }
        LoopTable::from_flat(n, flat, None)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y] as usize
    }

    #[inline]
    pub fn ldiv(&self, x: usize, y: usize) -> usize {
        self.ldiv[x * self.n + y] as usize
    }

    #[inline]
    pub fn rdiv(&self, x: usize, y: usize) -> usize {
        self.rdiv[x * self.n + y] as usize
    }

    /// The right inverse: `x . inv(x) = 1`.
    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.mul[x * self.n..(x + 1) * self.n]
    }

    /// Checked evaluation of one of the loop operations; `inv` ignores `y`.
    pub fn eval(&self, op: LoopOp, x: usize, y: usize) -> Result<usize> {
        let check = |i: usize| {
            if i < self.n {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: i, order: self.n })
            }
        };
        check(x)?;
        if op != LoopOp::Inv {
            check(y)?;
        }
        Ok(match op {
            LoopOp::Mul => self.mul(x, y),
            LoopOp::Ldiv => self.ldiv(x, y),
            LoopOp::Rdiv => self.rdiv(x, y),
            LoopOp::Inv => self.inv(x),
        })
    }

    pub fn translation(&self, kind: Translation, x: usize, y: Option<usize>) -> Result<Perm> {
        if kind.binary() && y.is_none() {
            return Err(Error::MissingSecondArgument);
        }
        let y = y.as_ref();
        Perm::from_images((0..self.n).map(|m| translate(self, kind, &x, y, &m)).collect::<Result<_>>()?)
    }

    /// Associator (`z` required) or commutator of indices.
    pub fn assoc_comm(&self, kind: AssocComm, x: usize, y: usize, z: Option<usize>) -> Result<usize> {
        match kind {
            AssocComm::Associator => {
                let z = z.ok_or(Error::MissingThirdArgument)?;
                Ok(associator(self, &x, &y, &z))
            }
            AssocComm::Commutator => Ok(commutator(self, &x, &y)),
        }
    }

    /// Elements commuting with everything.
    pub fn commutant(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| (0..self.n).all(|y| self.mul(x, y) == self.mul(y, x))).collect()
    }

    /// Serializes in the `loop-table v1` text format.
    pub fn to_loop_file(&self) -> String {
        let mut out = format!("loop-table v1\norder {}\n", self.n);
        if let Some(names) = &self.names {
            out.push_str("names ");
            out.push_str(&names.join(","));
            out.push('\n');
        }
        for x in 0..self.n {
            let row: Vec<String> = self.row(x).iter().map(u32::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the `loop-table v1` format; index 0 must be the identity.
    pub fn parse_loop_file(text: &str) -> Result<LoopTable> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("loop-table v1") {
            return Err(Error::Format("missing `loop-table v1` header".into()));
        }
        let n: usize = lines
            .next()
            .and_then(|l| l.trim().strip_prefix("order "))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format("missing `order <n>` line".into()))?;
        let mut rest: Vec<&str> = lines.collect();
        let names = match rest.first().and_then(|l| l.strip_prefix("names ")) {
            Some(list) => {
                let names = split_top_level(list.trim());
                rest.remove(0);
                Some(names)
            }
            None => None,
        };
        if rest.len() != n {
            return Err(Error::Format(format!("expected {n} rows, found {}", rest.len())));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, line) in rest.iter().enumerate() {
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Format(format!("row {i}: bad entry {s:?}"))))
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Format(format!("row {i} has {} entries", row.len())));
            }
            if let Some(&k) = row.iter().find(|&&k| k as usize >= n) {
                return Err(Error::IndexOutOfRange { index: k as usize, order: n });
            }
            flat.extend(row);
        }
        if names.as_ref().is_some_and(|v| v.len() != n) {
            return Err(Error::Format("names line has the wrong length".into()));
        }
        check_latin(n, &flat)?;
        if (0..n).any(|x| flat[x] as usize != x || flat[x * n] as usize != x) {
            return Err(Error::Format("index 0 is not the identity".into()));
        }
        LoopTable::from_flat(n, flat, names)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_loop_file()).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<LoopTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        LoopTable::parse_loop_file(&text)
    }
}

impl Loop for LoopTable {
    type Elem = usize;

    fn order(&self) -> usize {
        self.n
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, x: &usize, y: &usize) -> usize {
        LoopTable::mul(self, *x, *y)
    }

    fn inv(&self, x: &usize) -> usize {
        LoopTable::inv(self, *x)
    }

    fn ldiv(&self, x: &usize, y: &usize) -> usize {
        LoopTable::ldiv(self, *x, *y)
    }

    fn rdiv(&self, x: &usize, y: &usize) -> usize {
        LoopTable::rdiv(self, *x, *y)
    }

    fn element(&self, i: usize) -> usize {
        i
    }

    fn index_of(&self, x: &usize) -> Option<usize> {
        (*x < self.n).then_some(*x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssocComm {
    Associator,
    Commutator,
}

fn check_latin(n: usize, table: &[u32]) -> Result<()> {
    let mut seen = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            let k = table[i * n + j] as usize;
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, order: n });
            }
            if seen[k] == i {
                return Err(Error::NotLatinSquare(format!("row {i} repeats {k} (column {j})")));
            }
            seen[k] = i;
        }
    }
    seen.fill(usize::MAX);
    for j in 0..n {
        for i in 0..n {
            let k = table[i * n + j] as usize;
            if seen[k] == j {
                return Err(Error::NotLatinSquare(format!("column {j} repeats {k} (row {i})")));
            }
            seen[k] = j;
        }
    }
    Ok(())
}

/// Splits on commas that are not nested inside brackets or parentheses.
pub fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Smallest subloop containing `gens`, as ascending indices. Returns `None`
/// once the closure exceeds `cap` elements.
pub fn subloop_generate<L: Loop>(l: &L, gens: &[L::Elem], cap: usize) -> Option<Vec<usize>> {
    let n = l.order();
    let mut member = vec![false; n];
    let mut elems: Vec<L::Elem> = Vec::new();
    let add = |x: L::Elem, member: &mut Vec<bool>, elems: &mut Vec<L::Elem>| -> bool {
        let i = l.index_of(&x).expect("products stay in the loop");
        if !member[i] {
            member[i] = true;
            elems.push(x);
        }
        elems.len() <= cap
    };
    if !add(l.identity(), &mut member, &mut elems) {
        return None;
    }
    for g in gens {
        if !add(g.clone(), &mut member, &mut elems) {
            return None;
        }
    }
    // In a finite loop, closure under multiplication already gives closure
    // under division.
    let mut done = 0;
    while done < elems.len() {
        let a = elems[done].clone();
        let mut j = 0;
        while j <= done {
            let b = elems[j].clone();
            if !add(l.mul(&a, &b), &mut member, &mut elems) || !add(l.mul(&b, &a), &mut member, &mut elems) {
                return None;
            }
            j += 1;
        }
        done += 1;
    }
    Some((0..n).filter(|&i| member[i]).collect())
}

/// Whether `s` (indices) is closed under multiplication and contains the identity.
pub fn is_subloop<L: Loop>(l: &L, s: &[usize]) -> bool {
    let n = l.order();
    let mut member = vec![false; n];
    for &i in s {
        if i >= n {
            return false;
        }
        member[i] = true;
    }
    let id = l.index_of(&l.identity()).expect("identity is an element");
    if !member[id] {
        return false;
    }
    let els: Vec<L::Elem> = s.iter().map(|&i| l.element(i)).collect();
    els.iter().all(|a| els.iter().all(|b| l.index_of(&l.mul(a, b)).is_some_and(|k| member[k])))
}

/// Generators `{L_{x,y}, R_{x,y}, T_x}` of the inner mapping group, deduplicated,
/// in order of first appearance. Fails if the table is not Moufang.
pub fn inner_mappings(t: &LoopTable, scan: Scan) -> Result<Vec<Perm>> {
    if let Verdict::Fail(w) = is_moufang(t, scan) {
        return Err(Error::NotMoufang(w));
    }
    let n = t.order();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |p: Perm| {
        if seen.insert(p.clone()) {
            out.push(p);
        }
    };
    for x in 0..n {
        push(t.translation(Translation::T, x, None)?);
        for y in 0..n {
            push(t.translation(Translation::Lxy, x, Some(y))?);
            push(t.translation(Translation::Rxy, x, Some(y))?);
        }
    }
    Ok(out)
}

/// An inner mapping that moves an element of a candidate subloop outside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityWitness {
    pub kind: Translation,
    pub x: usize,
    pub y: Option<usize>,
    pub element: usize,
}

/// Loops up to this order have normality decided over every generator.
pub const NORMALITY_EXHAUSTIVE_LIMIT: usize = 512;

/// Tests invariance of the subloop `s` under the inner mapping generators.
///
/// Every generator is tried for loops of order at most
/// [`NORMALITY_EXHAUSTIVE_LIMIT`]; larger loops try `scan.budget` seeded
/// pairs `(x, y)`, so a `Pass` there is evidence rather than proof.
pub fn normality<L: Loop>(l: &L, s: &[usize], scan: Scan) -> Result<Verdict<NormalityWitness>> {
    if !is_subloop(l, s) {
        return Err(Error::NotASubloop);
    }
    let n = l.order();
    let mut member = vec![false; n];
    for &i in s {
        member[i] = true;
    }
    let s_els: Vec<L::Elem> = s.iter().map(|&i| l.element(i)).collect();
    let test = |x: usize, y: usize| -> Option<NormalityWitness> {
        let (ex, ey) = (l.element(x), l.element(y));
        for kind in [Translation::Lxy, Translation::Rxy, Translation::T] {
            let yarg = kind.binary().then_some(&ey);
            for (k, m) in s_els.iter().enumerate() {
                let img = translate(l, kind, &ex, yarg, m).expect("argument supplied");
                if !l.index_of(&img).is_some_and(|i| member[i]) {
                    return Some(NormalityWitness { kind, x, y: kind.binary().then_some(y), element: s[k] });
                }
            }
        }
        None
    };
    let pairs: Vec<(usize, usize)> = if n <= NORMALITY_EXHAUSTIVE_LIMIT {
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect()
    } else {
        let mut rng = scan.rng();
        (0..scan.budget).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    Ok(Verdict::from_witness(
        par::find_map_first(scan.exec, pairs.len(), |i| test(pairs[i].0, pairs[i].1)).map(|(_, w)| w),
    ))
}

pub fn is_normal<L: Loop>(l: &L, s: &[usize]) -> Result<bool> {
    Ok(normality(l, s, Scan::default())?.is_pass())
}

/// Loops up to this order have quotient well-definedness checked on all pairs.
pub const QUOTIENT_EXHAUSTIVE_LIMIT: usize = 2048;

/// The quotient by a normal subloop `s`, cosets labelled by their least index.
///
/// Well-definedness is re-verified on every pair of elements up to
/// [`QUOTIENT_EXHAUSTIVE_LIMIT`], and on pairs with one coset representative
/// factor beyond that.
pub fn quotient<L: Loop>(l: &L, s: &[usize], scan: Scan) -> Result<Quotient> {
    if !normality(l, s, scan)?.is_pass() {
        return Err(Error::NotNormal);
    }
    let n = l.order();
    let s_els: Vec<L::Elem> = s.iter().map(|&i| l.element(i)).collect();
    let key_of: Vec<usize> = par::map_collect(scan.exec, n, |i| {
        let x = l.element(i);
        s_els.iter().map(|u| l.index_of(&l.mul(&x, u)).expect("closed")).min().expect("s is nonempty")
    });
    let mut reps: Vec<usize> = key_of.clone();
    reps.sort_unstable();
    reps.dedup();
    let coset_of_key: HashMap<usize, usize> = reps.iter().enumerate().map(|(c, &k)| (k, c)).collect();
    let coset: Vec<usize> = key_of.iter().map(|k| coset_of_key[k]).collect();
    if reps.len() * s.len() != n {
        return Err(Error::IllDefined("cosets do not partition the loop".into()));
    }
    let rep_els: Vec<L::Elem> = reps.iter().map(|&r| l.element(r)).collect();
    let prod = |a: &L::Elem, b: &L::Elem| coset[l.index_of(&l.mul(a, b)).expect("closed")];
    let q = reps.len();
    let rows: Vec<Vec<usize>> =
        par::map_collect(scan.exec, q, |a| (0..q).map(|b| prod(&rep_els[a], &rep_els[b])).collect());
    let table = LoopTable::from_rows(&rows).map_err(|e| Error::IllDefined(e.to_string()))?;
    let bad = |x: usize, y: usize| {
        let (ex, ey) = (l.element(x), l.element(y));
        prod(&ex, &ey) != rows[coset[x]][coset[y]]
    };
    let violation = if n <= QUOTIENT_EXHAUSTIVE_LIMIT {
        par::find_first(scan.exec, n, |x| (0..n).any(|y| bad(x, y)))
    } else {
        par::find_first(scan.exec, n, |x| reps.iter().any(|&r| bad(x, r) || bad(r, x)))
    };
    if let Some(x) = violation {
        return Err(Error::IllDefined(format!("coset product depends on the representative of {x}")));
    }
    Ok(Quotient { table, coset, reps })
}

/// A quotient loop with its projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub table: LoopTable,
    /// Coset index of each element of the parent loop.
    pub coset: Vec<usize>,
    /// Least parent index in each coset.
    pub reps: Vec<usize>,
}

/// A pseudoautomorphism candidate `(A, a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PsAutPair {
    pub map: Perm,
    pub companion: usize,
}

impl PsAutPair {
    pub fn identity(n: usize) -> PsAutPair {
        PsAutPair { map: Perm::identity(n), companion: 0 }
    }
}

/// Whether `xA.(yA.a) = (x.y)A.a` for all `x, y`.
pub fn is_pseudoautomorphism(t: &LoopTable, p: &PsAutPair) -> bool {
    pseudoautomorphism_witness(t, p, Exec::Auto).is_none()
}

pub fn pseudoautomorphism_witness(t: &LoopTable, p: &PsAutPair, exec: Exec) -> Option<(usize, usize)> {
    let n = t.order();
    if p.map.len() != n || p.companion >= n {
        return Some((0, 0));
    }
    let (a, f) = (p.companion, &p.map);
    let fails = |x: usize, y: usize| t.mul(f.apply(x), t.mul(f.apply(y), a)) != t.mul(f.apply(t.mul(x, y)), a);
    par::find_first(exec, n, |x| (0..n).any(|y| fails(x, y)))
        .map(|x| (x, (0..n).find(|&y| fails(x, y)).expect("witness exists")))
}

/// `(A,a)(B,b) = (AB, aB.b)`, re-validated.
pub fn psaut_compose(t: &LoopTable, p: &PsAutPair, q: &PsAutPair) -> Result<PsAutPair> {
    let r = PsAutPair { map: p.map.then(&q.map), companion: t.mul(q.map.apply(p.companion), q.companion) };
    if is_pseudoautomorphism(t, &r) {
        Ok(r)
    } else {
        Err(Error::NotPseudoautomorphism)
    }
}

/// The inverse in `PsAut`: `(A^{-1}, (a A^{-1})^{-1})`.
pub fn psaut_inverse(t: &LoopTable, p: &PsAutPair) -> Result<PsAutPair> {
    let inv_map = p.map.inverse();
    let r = PsAutPair { map: inv_map.clone(), companion: t.inv(inv_map.apply(p.companion)) };
    if is_pseudoautomorphism(t, &r) {
        Ok(r)
    } else {
        Err(Error::NotPseudoautomorphism)
    }
}

/// Cheap isomorphism invariants of a single element.
fn signatures(t: &LoopTable) -> Vec<(usize, usize, usize)> {
    let n = t.order();
    (0..n)
        .map(|x| {
            let order = element_order(t, &x);
            let sq_order = element_order(t, &t.mul(x, x));
            let commuting = (0..n).filter(|&y| t.mul(x, y) == t.mul(y, x)).count();
            (order, sq_order, commuting)
        })
        .collect()
}

/// Searches for an isomorphism `t1 -> t2`, returned as the image of each index.
///
/// Backtracks over images of a greedy generating set, pruning by element
/// order, square order and commuting count, and propagating products. With
/// `limit = None` the search always completes.
pub fn isomorphism(t1: &LoopTable, t2: &LoopTable, limit: Option<Duration>) -> Result<Option<Vec<usize>>> {
    let n = t1.order();
    if n != t2.order() {
        return Ok(None);
    }
    let (s1, s2) = (signatures(t1), signatures(t2));
    let (mut h1, mut h2) = (s1.clone(), s2.clone());
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return Ok(None);
    }
    let mut class_size: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for s in &s1 {
        *class_size.entry(*s).or_default() += 1;
    }
    let mut by_rarity: Vec<usize> = (1..n).collect();
    by_rarity.sort_by_key(|&x| (class_size[&s1[x]], std::cmp::Reverse(s1[x].0), x));
    let mut gens = Vec::new();
    let mut span = vec![0usize];
    for &x in &by_rarity {
        if span.len() == n {
            break;
        }
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = subloop_generate(t1, &gens, n).expect("cap is the order");
        }
    }
    let mut search = IsoSearch {
        t1,
        t2,
        s1: &s1,
        s2: &s2,
        f: vec![usize::MAX; n],
        finv: vec![usize::MAX; n],
        mapped: Vec::new(),
        deadline: limit.map(|d| Instant::now() + d),
        nodes: 0,
    };
    search.assign(0, 0);
    if search.propagate(0).is_err() {
        return Ok(None);
    }
    if search.backtrack(&gens, 0)? {
        Ok(Some(search.f))
    } else {
        Ok(None)
    }
}

pub fn isomorphic(t1: &LoopTable, t2: &LoopTable) -> Result<bool> {
    Ok(isomorphism(t1, t2, None)?.is_some())
}

struct IsoSearch<'a> {
    t1: &'a LoopTable,
    t2: &'a LoopTable,
    s1: &'a [(usize, usize, usize)],
    s2: &'a [(usize, usize, usize)],
    f: Vec<usize>,
    finv: Vec<usize>,
    mapped: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
}

impl IsoSearch<'_> {
    fn assign(&mut self, a: usize, b: usize) {
        self.f[a] = b;
        self.finv[b] = a;
        self.mapped.push(a);
    }

    fn undo_to(&mut self, len: usize) {
        while self.mapped.len() > len {
            let a = self.mapped.pop().expect("nonempty");
            self.finv[self.f[a]] = usize::MAX;
            self.f[a] = usize::MAX;
        }
    }

    /// Extends the partial map by products of mapped elements from position `from`.
    fn propagate(&mut self, mut from: usize) -> std::result::Result<(), ()> {
        while from < self.mapped.len() {
            let a = self.mapped[from];
            let mut j = 0;
            while j <= from {
                let b = self.mapped[j];
                for (p, q) in [(a, b), (b, a)] {
                    let c = self.t1.mul(p, q);
                    let d = self.t2.mul(self.f[p], self.f[q]);
                    if self.f[c] == usize::MAX {
                        if self.finv[d] != usize::MAX || self.s1[c] != self.s2[d] {
                            return Err(());
                        }
                        self.assign(c, d);
                    } else if self.f[c] != d {
                        return Err(());
                    }
                }
                j += 1;
            }
            from += 1;
        }
        Ok(())
    }

    fn backtrack(&mut self, gens: &[usize], depth: usize) -> Result<bool> {
        if depth == gens.len() {
            return Ok(self.mapped.len() == self.t1.order());
        }
        let g = gens[depth];
        if self.f[g] != usize::MAX {
            return self.backtrack(gens, depth + 1);
        }
        let n = self.t1.order();
        for cand in 0..n {
            if self.finv[cand] != usize::MAX || self.s2[cand] != self.s1[g] {
                continue;
            }
            self.nodes += 1;
            if self.nodes.is_multiple_of(64) && self.deadline.is_some_and(|d| Instant::now() > d) {
                return Err(Error::Timeout);
            }
            let len = self.mapped.len();
            self.assign(g, cand);
            if self.propagate(len).is_ok() && self.backtrack(gens, depth + 1)? {
                return Ok(true);
            }
            self.undo_to(len);
        }
        Ok(false)
    }
}
