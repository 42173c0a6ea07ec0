//! The split Cayley algebra `O(R)` as Zorn vector matrices.
//!
//! An element `(a, v; w, b)` is stored as the coordinate vector
//! `(a, v1, v2, v3, w1, w2, w3, b)`. Linear operators are 8x8 matrices acting
//! on row vectors, so `A.compose(B)` applies `A` first.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{gl2_enumerate, unit_vector, Matrix, Subspace, Vec3};
use crate::loopcore::{Loop, LoopTable};
use crate::par::Exec;
use crate::ring::{Ring, RingElem};

/// A Zorn matrix `(a, v; w, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZornElem(pub [RingElem; 8]);

impl ZornElem {
    pub fn new(a: RingElem, v: Vec3, w: Vec3, b: RingElem) -> ZornElem {
        ZornElem([a, v[0], v[1], v[2], w[0], w[1], w[2], b])
    }

    pub fn a(&self) -> RingElem {
        self.0[0]
    }

    pub fn v(&self) -> Vec3 {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn w(&self) -> Vec3 {
        [self.0[4], self.0[5], self.0[6]]
    }

    pub fn b(&self) -> RingElem {
        self.0[7]
    }

    pub fn coords(&self) -> &[RingElem] {
        &self.0
    }

    pub fn from_coords(c: &[RingElem]) -> ZornElem {
        ZornElem(c.try_into().expect("eight coordinates"))
    }
}

impl fmt::Display for ZornElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.0;
        write!(f, "zorn({};{},{},{};{},{},{};{})", c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7])
    }
}

/// The operator families of an alternative algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgOp {
    L,
    R,
    T,
    Lxy,
    Dxy,
}

/// An 8x8 matrix over the algebra's ring, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinOp8(pub [RingElem; 64]);

impl LinOp8 {
    pub fn identity() -> LinOp8 {
        let mut m = [RingElem::ZERO; 64];
        for i in 0..8 {
            m[9 * i] = RingElem::ONE;
        }
        LinOp8(m)
    }

    pub fn from_rows(rows: [ZornElem; 8]) -> LinOp8 {
        let mut m = [RingElem::ZERO; 64];
        for (i, r) in rows.iter().enumerate() {
            m[8 * i..8 * i + 8].copy_from_slice(&r.0);
        }
        LinOp8(m)
    }

    pub fn get(&self, i: usize, j: usize) -> RingElem {
        self.0[8 * i + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == LinOp8::identity()
    }

    /// `self` followed by `other`.
    pub fn compose(&self, r: &Ring, other: &LinOp8) -> LinOp8 {
        let mut t = [RingElem::ZERO; 64];
        for i in 0..8 {
            for j in 0..8 {
                t[8 * j + i] = other.0[8 * i + j];
            }
        }
        let mut out = [RingElem::ZERO; 64];
        for i in 0..8 {
            for j in 0..8 {
                out[8 * i + j] = r.dot(&self.0[8 * i..8 * i + 8], &t[8 * j..8 * j + 8]);
            }
        }
        LinOp8(out)
    }

    pub fn add(&self, r: &Ring, other: &LinOp8) -> LinOp8 {
        let mut out = self.0;
        for (o, &b) in out.iter_mut().zip(other.0.iter()) {
            *o = r.add(*o, b);
        }
        LinOp8(out)
    }

    /// The row vector `u` times `self`.
    pub fn apply(&self, r: &Ring, u: &ZornElem) -> ZornElem {
        let mut out = [RingElem::ZERO; 8];
        for (i, &ui) in u.0.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = r.add(*o, r.mul(ui, self.0[8 * i + j]));
            }
        }
        ZornElem(out)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows((0..8).map(|i| self.0[8 * i..8 * i + 8].to_vec()).collect())
    }
}

/// The split Cayley algebra over a ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zorn {
    ring: Ring,
}

impl Zorn {
    pub fn new(ring: Ring) -> Zorn {
        Zorn { ring }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn one(&self) -> ZornElem {
        self.scalar(RingElem::ONE)
    }

    pub fn zero(&self) -> ZornElem {
        ZornElem([RingElem::ZERO; 8])
    }

    pub fn scalar(&self, l: RingElem) -> ZornElem {
        let z = RingElem::ZERO;
        ZornElem([l, z, z, z, z, z, z, l])
    }

    pub fn basis(&self, i: usize) -> ZornElem {
        ZornElem::from_coords(&unit_vector(8, i))
    }

    pub fn from_ints(&self, c: [i64; 8]) -> ZornElem {
        ZornElem(c.map(|x| self.ring.from_int(x)))
    }

    /// Checked constructor from canonical ring values.
    pub fn elem(&self, c: [u32; 8]) -> Result<ZornElem> {
        let mut out = [RingElem::ZERO; 8];
        for (o, v) in out.iter_mut().zip(c) {
            *o = self.ring.elem(v)?;
        }
        Ok(ZornElem(out))
    }

    /// Parses `zorn(a;v1,v2,v3;w1,w2,w3;b)`.
    pub fn parse(&self, s: &str) -> Result<ZornElem> {
        let bad = || Error::Parse(format!("bad Zorn literal {s:?}"));
        let body = s.trim().strip_prefix("zorn(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let nums = |p: &str, k: usize| -> Result<Vec<u32>> {
            let v: Vec<u32> = p.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
            if v.len() == k {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        let (a, v, w, b) = (nums(parts[0], 1)?, nums(parts[1], 3)?, nums(parts[2], 3)?, nums(parts[3], 1)?);
        self.elem([a[0], v[0], v[1], v[2], w[0], w[1], w[2], b[0]])
    }

    pub fn add(&self, x: &ZornElem, y: &ZornElem) -> ZornElem {
        ZornElem(std::array::from_fn(|i| self.ring.add(x.0[i], y.0[i])))
    }

    pub fn sub(&self, x: &ZornElem, y: &ZornElem) -> ZornElem {
        ZornElem(std::array::from_fn(|i| self.ring.sub(x.0[i], y.0[i])))
    }

    pub fn neg(&self, x: &ZornElem) -> ZornElem {
        ZornElem(x.0.map(|c| self.ring.neg(c)))
    }

    pub fn scale(&self, l: RingElem, x: &ZornElem) -> ZornElem {
        ZornElem(x.0.map(|c| self.ring.mul(l, c)))
    }

    fn dot3(&self, x: &Vec3, y: &Vec3) -> RingElem {
        self.ring.dot(x, y)
    }

    fn cross(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        let r = &self.ring;
        [
            r.sub(r.mul(x[1], y[2]), r.mul(x[2], y[1])),
            r.sub(r.mul(x[2], y[0]), r.mul(x[0], y[2])),
            r.sub(r.mul(x[0], y[1]), r.mul(x[1], y[0])),
        ]
    }

    /// Zorn multiplication with the dot and cross product corrections.
    pub fn mul(&self, x: &ZornElem, y: &ZornElem) -> ZornElem {
        let r = &self.ring;
        let (a1, v1, w1, b1) = (x.a(), x.v(), x.w(), x.b());
        let (a2, v2, w2, b2) = (y.a(), y.v(), y.w(), y.b());
        let a = r.add(r.mul(a1, a2), self.dot3(&v1, &w2));
        let ww = self.cross(&w1, &w2);
        let vv = self.cross(&v1, &v2);
        let v: Vec3 = std::array::from_fn(|i| r.sub(r.add(r.mul(a1, v2[i]), r.mul(b2, v1[i])), ww[i]));
        let w: Vec3 = std::array::from_fn(|i| r.add(r.add(r.mul(a2, w1[i]), r.mul(b1, w2[i])), vv[i]));
        let b = r.add(self.dot3(&w1, &v2), r.mul(b1, b2));
        ZornElem::new(a, v, w, b)
    }

    /// `N(x) = ab - v.w`.
    pub fn norm(&self, x: &ZornElem) -> RingElem {
        self.ring.sub(self.ring.mul(x.a(), x.b()), self.dot3(&x.v(), &x.w()))
    }

    /// The polar form `N(x+y) - N(x) - N(y)`.
    pub fn polar(&self, x: &ZornElem, y: &ZornElem) -> RingElem {
        let r = &self.ring;
        r.sub(r.sub(self.norm(&self.add(x, y)), self.norm(x)), self.norm(y))
    }

    /// `(b, -v, -w, a)`.
    pub fn conj(&self, x: &ZornElem) -> ZornElem {
        let r = &self.ring;
        ZornElem::new(x.b(), x.v().map(|c| r.neg(c)), x.w().map(|c| r.neg(c)), x.a())
    }

    pub fn is_invertible(&self, x: &ZornElem) -> bool {
        self.ring.is_unit(self.norm(x))
    }

    pub fn inv(&self, x: &ZornElem) -> Result<ZornElem> {
        let n = self.ring.inv(self.norm(x)).ok_or(Error::NotInvertible)?;
        let y = self.scale(n, &self.conj(x));
        debug_assert_eq!(self.mul(x, &y), self.one());
        Ok(y)
    }

    /// The image of `u` under the operator `kind` built from `x` (and `y`).
    ///
    /// `T_x = L_x^{-1} R_x`, `L_{x,y} = L_x L_y L_{yx}^{-1}`, `D_{x,y} = L_x R_y L_{xy}^{-1}`.
    pub fn apply_op(&self, kind: AlgOp, x: &ZornElem, y: Option<&ZornElem>, u: &ZornElem) -> Result<ZornElem> {
        Ok(self.prepared(kind, x, y)?.apply(self, u))
    }

    fn prepared(&self, kind: AlgOp, x: &ZornElem, y: Option<&ZornElem>) -> Result<PreparedOp> {
        let y = || y.copied().ok_or(Error::MissingSecondArgument);
        Ok(match kind {
            AlgOp::L => PreparedOp::L(*x),
            AlgOp::R => PreparedOp::R(*x),
            AlgOp::T => PreparedOp::T(self.inv(x)?, *x),
            AlgOp::Lxy => {
                let y = y()?;
                PreparedOp::Lxy(*x, y, self.inv(&self.mul(&y, x))?)
            }
            AlgOp::Dxy => {
                let y = y()?;
                PreparedOp::Dxy(*x, y, self.inv(&self.mul(x, &y))?)
            }
        })
    }

    /// The 8x8 matrix of an operator.
    pub fn operator(&self, kind: AlgOp, x: &ZornElem, y: Option<&ZornElem>) -> Result<LinOp8> {
        let op = self.prepared(kind, x, y)?;
        Ok(LinOp8::from_rows(std::array::from_fn(|i| op.apply(self, &self.basis(i)))))
    }

    /// Evaluates the four operator identities for invertible `m, n, k`:
    ///
    /// 1. `D_{m,n} = L_{m,n^{-1}} T_n L_{n,m}`
    /// 2. `L_{n,m} D_{mn,km} = D_{n,k} L_{nk,m} D_{m.nk,m}`
    /// 3. `D_{k,m} L_{km,mn} = L_{k,n} L_{nk,m} D_{m.nk,m}`
    /// 4. `D_{m,n} D_{mn,km} + L_{m,k} L_{km,mn} = D_{m,nk} D_{m.nk,m} + L_{m,m.nk}`
    pub fn operator_identities(&self, m: &ZornElem, n: &ZornElem, k: &ZornElem) -> Result<[bool; 4]> {
        let op = |kind, x: &ZornElem, y: Option<&ZornElem>| self.operator(kind, x, y);
        let mul = |x: &ZornElem, y: &ZornElem| self.mul(x, y);
        let ninv = self.inv(n)?;
        operator_identities_with(&self.ring, op, mul, m, n, k, &ninv)
    }

    /// All elements of `O(R)` of norm one, ascending with the identity first.
    pub fn norm_one_elements(&self) -> Result<Vec<ZornElem>> {
        let q = self.ring.order() as u64;
        if q.pow(7) > 1 << 26 {
            return Err(Error::TooLarge(format!("norm-one elements over a ring of order {q}")));
        }
        let r = &self.ring;
        let els: Vec<RingElem> = r.enumerate().collect();
        let mut out = Vec::new();
        // Fix (a, v, w) and solve a b = 1 + v.w for b.
        let mut vw = [RingElem::ZERO; 6];
        let total = q.pow(6);
        for code in 0..total {
            let mut c = code;
            for slot in vw.iter_mut() {
                *slot = els[(c % q) as usize];
                c /= q;
            }
            let v = [vw[0], vw[1], vw[2]];
            let w = [vw[3], vw[4], vw[5]];
            let target = r.add(RingElem::ONE, self.dot3(&v, &w));
            for &a in &els {
                for &b in &els {
                    if r.mul(a, b) == target {
                        out.push(ZornElem::new(a, v, w, b));
                    }
                }
            }
        }
        Ok(identity_first(out, self.one()))
    }

    /// Scalars `l` with `l^2 = 1`, i.e. the scalar elements of norm one.
    pub fn norm_one_scalars(&self) -> Vec<RingElem> {
        self.ring.enumerate().filter(|&l| self.ring.mul(l, l) == RingElem::ONE).collect()
    }

    /// Lexicographically least element of `{l x : l^2 = 1}`.
    pub fn projective_rep(&self, x: &ZornElem) -> ZornElem {
        self.norm_one_scalars().into_iter().map(|l| self.scale(l, x)).min().expect("1 is a scalar")
    }
}

enum PreparedOp {
    L(ZornElem),
    R(ZornElem),
    /// `x^{-1}`, `x`
    T(ZornElem, ZornElem),
    /// `x`, `y`, `(yx)^{-1}`
    Lxy(ZornElem, ZornElem, ZornElem),
    /// `x`, `y`, `(xy)^{-1}`
    Dxy(ZornElem, ZornElem, ZornElem),
}

impl PreparedOp {
    fn apply(&self, z: &Zorn, u: &ZornElem) -> ZornElem {
        match self {
            PreparedOp::L(x) => z.mul(x, u),
            PreparedOp::R(x) => z.mul(u, x),
            PreparedOp::T(xi, x) => z.mul(&z.mul(xi, u), x),
            PreparedOp::Lxy(x, y, yxi) => z.mul(yxi, &z.mul(y, &z.mul(x, u))),
            PreparedOp::Dxy(x, y, xyi) => z.mul(xyi, &z.mul(&z.mul(x, u), y)),
        }
    }
}

/// The four operator identities with a caller-supplied operator source, so
/// that tables of precomputed operators can be reused.
pub fn operator_identities_with<E, F, M>(
    ring: &Ring,
    op: F,
    mul: M,
    m: &E,
    n: &E,
    k: &E,
    n_inv: &E,
) -> Result<[bool; 4]>
where
    F: Fn(AlgOp, &E, Option<&E>) -> Result<LinOp8>,
    M: Fn(&E, &E) -> E,
{
    let c = |a: &LinOp8, b: &LinOp8| a.compose(ring, b);
    let (mn, km, nk) = (mul(m, n), mul(k, m), mul(n, k));
    let m_nk = mul(m, &nk);
    let d = |x: &E, y: &E| op(AlgOp::Dxy, x, Some(y));
    let l = |x: &E, y: &E| op(AlgOp::Lxy, x, Some(y));

    let d_mn = d(m, n)?;
    let first = d_mn == c(&c(&l(m, n_inv)?, &op(AlgOp::T, n, None)?), &l(n, m)?);

    let d_mn_km = d(&mn, &km)?;
    let d_mnk_m = d(&m_nk, m)?;
    let l_nk_m = l(&nk, m)?;
    let second = c(&l(n, m)?, &d_mn_km) == c(&c(&d(n, k)?, &l_nk_m), &d_mnk_m);

    let l_km_mn = l(&km, &mn)?;
    let third = c(&d(k, m)?, &l_km_mn) == c(&c(&l(k, n)?, &l_nk_m), &d_mnk_m);

    let lhs = c(&d_mn, &d_mn_km).add(ring, &c(&l(m, k)?, &l_km_mn));
    let rhs = c(&d(m, &nk)?, &d_mnk_m).add(ring, &l(m, &m_nk)?);
    Ok([first, second, third, lhs == rhs])
}

fn identity_first(mut els: Vec<ZornElem>, one: ZornElem) -> Vec<ZornElem> {
    els.sort_unstable();
    els.dedup();
    if let Some(pos) = els.iter().position(|x| *x == one) {
        els.remove(pos);
        els.insert(0, one);
    }
    els
}

/// A finite subloop of `O^x`, optionally taken modulo the norm-one scalars.
#[derive(Clone, Debug)]
pub struct ZornLoop {
    zorn: Zorn,
    elems: Vec<ZornElem>,
    index: HashMap<ZornElem, usize>,
    projective: bool,
}

impl ZornLoop {
    /// Wraps a set of invertible elements closed under multiplication. In the
    /// projective case elements are replaced by their scalar-orbit representatives.
    pub fn new(zorn: Zorn, elems: Vec<ZornElem>, projective: bool) -> Result<ZornLoop> {
        if let Some(x) = elems.iter().find(|x| !zorn.is_invertible(x)) {
            return Err(Error::IllDefined(format!("{x} is not invertible")));
        }
        let elems = if projective { elems.iter().map(|x| zorn.projective_rep(x)).collect() } else { elems };
        let elems = identity_first(elems, zorn.one());
        if elems.first() != Some(&zorn.one()) {
            return Err(Error::NotASubloop);
        }
        let index = elems.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        Ok(ZornLoop { zorn, elems, index, projective })
    }

    pub fn zorn(&self) -> &Zorn {
        &self.zorn
    }

    pub fn elems(&self) -> &[ZornElem] {
        &self.elems
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    fn canon(&self, x: ZornElem) -> ZornElem {
        if self.projective {
            self.zorn.projective_rep(&x)
        } else {
            x
        }
    }

    /// Checks closure under multiplication on every pair.
    pub fn is_closed(&self, exec: Exec) -> bool {
        let n = self.elems.len();
        crate::par::find_first(exec, n, |i| {
            (0..n).any(|j| self.index_of(&self.mul(&self.elems[i], &self.elems[j])).is_none())
        })
        .is_none()
    }

    /// Tabulates the loop, refusing orders above `cap`.
    pub fn materialize(&self, cap: usize, exec: Exec) -> Result<LoopTable> {
        if self.elems.len() > cap {
            return Err(Error::TooLargeToMaterialize(self.elems.len()));
        }
        LoopTable::materialize(self, exec)?.with_names(self.elems.iter().map(ZornElem::to_string).collect())
    }
}

impl Loop for ZornLoop {
    type Elem = ZornElem;

    fn order(&self) -> usize {
        self.elems.len()
    }

    fn identity(&self) -> ZornElem {
        self.zorn.one()
    }

    fn mul(&self, x: &ZornElem, y: &ZornElem) -> ZornElem {
        self.canon(self.zorn.mul(x, y))
    }

    fn inv(&self, x: &ZornElem) -> ZornElem {
        self.canon(self.zorn.inv(x).expect("loop elements are invertible"))
    }

    fn element(&self, i: usize) -> ZornElem {
        self.elems[i]
    }

    fn index_of(&self, x: &ZornElem) -> Option<usize> {
        self.index.get(x).copied()
    }
}

/// Default cap on materialized Paige loop tables.
pub const PSL_TABLE_CAP: usize = 2000;

/// The loop `SL(O(F_q))` of norm-one elements.
pub fn sl_loop(ring: &Ring) -> Result<ZornLoop> {
    if !ring.is_field() {
        return Err(Error::InvalidRing(format!("{} is not a field", ring.spec())));
    }
    let z = Zorn::new(ring.clone());
    let els = z.norm_one_elements()?;
    ZornLoop::new(z, els, false)
}

/// `SL(O(F_q))` modulo the scalars, kept lazy.
pub fn psl_lazy(ring: &Ring) -> Result<ZornLoop> {
    let sl = sl_loop(ring)?;
    ZornLoop::new(sl.zorn, sl.elems, true)
}

/// The Paige loop `M(q)` as a table, names are representative literals.
pub fn psl_loop(ring: &Ring, cap: usize, exec: Exec) -> Result<LoopTable> {
    psl_lazy(ring)?.materialize(cap, exec)
}

/// `(a11, (0, a12, r1), (r2, a21, 0), a22)`.
pub fn parabolic_elem(g: &crate::linalg::Mat2, r: [RingElem; 2]) -> ZornElem {
    let z = RingElem::ZERO;
    ZornElem::new(g.get(0, 0), [z, g.get(0, 1), r[0]], [r[1], g.get(1, 0), z], g.get(1, 1))
}

/// The parabolic subloop: elements `(a11, (0,a12,r1), (r2,a21,0), a22)` with
/// `(a_ij)` invertible.
pub fn parabolic_subloop(ring: &Ring) -> Result<ZornLoop> {
    let z = Zorn::new(ring.clone());
    let mut els = Vec::new();
    for g in gl2_enumerate(ring)? {
        for r1 in ring.enumerate() {
            for r2 in ring.enumerate() {
                els.push(parabolic_elem(&g, [r1, r2]));
            }
        }
    }
    ZornLoop::new(z, els, false)
}

/// The orthogonal complement of `1` under the polar form of the norm.
#[derive(Clone, Debug)]
pub struct OnePerp {
    pub space: Subspace,
    /// Whether `1` lies in the complement (characteristic 2).
    pub contains_one: bool,
    /// In characteristic 2, representatives with `a = b = 0` of a basis of `U / <1>`.
    pub quotient_basis: Option<Vec<ZornElem>>,
}

pub fn one_perp(ring: &Ring) -> Result<OnePerp> {
    if !ring.is_field() {
        return Err(Error::InvalidRing(format!("{} is not a field", ring.spec())));
    }
    let z = Zorn::new(ring.clone());
    let one = z.one();
    let column = Matrix::from_rows((0..8).map(|i| vec![z.polar(&z.basis(i), &one)]).collect());
    let space = Subspace::left_kernel(ring, &column);
    let contains_one = space.contains(ring, one.coords());
    let quotient_basis = contains_one.then(|| (1..7).map(|i| z.basis(i)).collect());
    Ok(OnePerp { space, contains_one, quotient_basis })
}
