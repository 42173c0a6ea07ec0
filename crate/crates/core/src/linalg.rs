//! Small dense linear algebra over a [`Ring`].
//!
//! Vectors are row vectors and matrices act on the right: `(v a)_j = sum_i v_i a_ij`.
//! Composition therefore reads left to right, matching operator notation
//! `m L_x L_y = y(x m)`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem};

pub type Vec2 = [RingElem; 2];
pub type Vec3 = [RingElem; 3];

/// A 2x2 matrix, entries row-major `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2(pub [RingElem; 4]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([RingElem::ONE, RingElem::ZERO, RingElem::ZERO, RingElem::ONE]);

    pub fn new(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> Mat2 {
        Mat2([a, b, c, d])
    }

    /// From integer entries reduced into `ring`.
    pub fn from_ints(ring: &Ring, rows: [[i64; 2]; 2]) -> Mat2 {
        Mat2([
            ring.from_int(rows[0][0]),
            ring.from_int(rows[0][1]),
            ring.from_int(rows[1][0]),
            ring.from_int(rows[1][1]),
        ])
    }

    pub fn scalar(l: RingElem) -> Mat2 {
        Mat2([l, RingElem::ZERO, RingElem::ZERO, l])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> RingElem {
        self.0[2 * i + j]
    }

    pub fn is_scalar(&self) -> bool {
        self.0[1].is_zero() && self.0[2].is_zero() && self.0[0] == self.0[3]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

pub fn mat_mul(r: &Ring, x: &Mat2, y: &Mat2) -> Mat2 {
    let [a, b, c, d] = x.0;
    let [e, f, g, h] = y.0;
    Mat2([
        r.add(r.mul(a, e), r.mul(b, g)),
        r.add(r.mul(a, f), r.mul(b, h)),
        r.add(r.mul(c, e), r.mul(d, g)),
        r.add(r.mul(c, f), r.mul(d, h)),
    ])
}

pub fn mat_det(r: &Ring, x: &Mat2) -> RingElem {
    let [a, b, c, d] = x.0;
    r.sub(r.mul(a, d), r.mul(b, c))
}

/// `[[d, -b], [-c, a]]`, so that `x * adj(x) = det(x) I`.
pub fn mat_adjoint(r: &Ring, x: &Mat2) -> Mat2 {
    let [a, b, c, d] = x.0;
    Mat2([d, r.neg(b), r.neg(c), a])
}

pub fn mat_scale(r: &Ring, l: RingElem, x: &Mat2) -> Mat2 {
    Mat2(x.0.map(|e| r.mul(l, e)))
}

pub fn mat_inv(r: &Ring, x: &Mat2) -> Result<Mat2> {
    let det_inv = r.inv(mat_det(r, x)).ok_or(Error::SingularMatrix)?;
    Ok(mat_scale(r, det_inv, &mat_adjoint(r, x)))
}

/// `g^{-1} h^{-1} g h`.
pub fn commutator_mat(r: &Ring, g: &Mat2, h: &Mat2) -> Result<Mat2> {
    let gi = mat_inv(r, g)?;
    let hi = mat_inv(r, h)?;
    Ok(mat_mul(r, &mat_mul(r, &gi, &hi), &mat_mul(r, g, h)))
}

/// Row vector times matrix.
pub fn vec_act(r: &Ring, v: &Vec2, a: &Mat2) -> Vec2 {
    [
        r.add(r.mul(v[0], a.get(0, 0)), r.mul(v[1], a.get(1, 0))),
        r.add(r.mul(v[0], a.get(0, 1)), r.mul(v[1], a.get(1, 1))),
    ]
}

pub fn vec2_add(r: &Ring, u: &Vec2, w: &Vec2) -> Vec2 {
    [r.add(u[0], w[0]), r.add(u[1], w[1])]
}

pub fn vec2_neg(r: &Ring, u: &Vec2) -> Vec2 {
    [r.neg(u[0]), r.neg(u[1])]
}

/// Upper bound on the number of 2x2 matrices `gl2_enumerate` scans.
pub const GL2_SCAN_LIMIT: u64 = 1 << 12;

/// All of `GL_2(R)` (determinant a unit), identity first, then ascending.
pub fn gl2_enumerate(r: &Ring) -> Result<Vec<Mat2>> {
    let q = r.order() as u64;
    if q.pow(4) > GL2_SCAN_LIMIT {
        return Err(Error::TooLarge(format!("GL_2 over a ring of order {q}")));
    }
    let els: Vec<RingElem> = r.enumerate().collect();
    let mut out = vec![Mat2::IDENTITY];
    for &a in &els {
        for &b in &els {
            for &c in &els {
                for &d in &els {
                    let m = Mat2([a, b, c, d]);
                    if m != Mat2::IDENTITY && r.is_unit(mat_det(r, &m)) {
                        out.push(m);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Closure of a set of invertible matrices under multiplication, identity first,
/// remaining elements ascending. Fails past `cap` elements.
pub fn mat2_group_closure(r: &Ring, gens: &[Mat2], cap: usize) -> Result<Vec<Mat2>> {
    for g in gens {
        if !r.is_unit(mat_det(r, g)) {
            return Err(Error::SingularMatrix);
        }
    }
    let mut seen: HashSet<Mat2> = HashSet::from([Mat2::IDENTITY]);
    let mut frontier = vec![Mat2::IDENTITY];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = mat_mul(r, &x, g);
            if seen.insert(y) {
                if seen.len() > cap {
                    return Err(Error::TooLarge(format!("matrix group exceeds {cap} elements")));
                }
                frontier.push(y);
            }
        }
    }
    let mut rest: Vec<Mat2> = seen.into_iter().filter(|m| *m != Mat2::IDENTITY).collect();
    rest.sort();
    let mut out = vec![Mat2::IDENTITY];
    out.extend(rest);
    Ok(out)
}

/// Dense rectangular matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<RingElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![RingElem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = RingElem::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RingElem>>) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_mat2(m: &Mat2) -> Matrix {
        Matrix { rows: 2, cols: 2, data: m.0.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> RingElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RingElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[RingElem] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { RingElem::ONE } else { RingElem::ZERO }))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, r: &Ring, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = Matrix::zeros(self.rows, other.cols);
        let ot = other.transpose();
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..other.cols {
                out.data[i * other.cols + j] = r.dot(row, ot.row(j));
            }
        }
        out
    }

    pub fn add(&self, r: &Ring, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| r.add(a, b)).collect(),
        }
    }

    pub fn neg(&self, r: &Ring) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| r.neg(a)).collect() }
    }

    /// Row vector `v` times `self`.
    pub fn vec_mul(&self, r: &Ring, v: &[RingElem]) -> Vec<RingElem> {
        assert_eq!(v.len(), self.rows, "vector length does not match matrix rows");
        let mut out = vec![RingElem::ZERO; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = r.add(*o, r.mul(vi, self.get(i, j)));
            }
        }
        out
    }

    /// Kronecker product with index `(i, k)` flattened to `i * other.rows + k`.
    pub fn kron(&self, r: &Ring, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, r.mul(a, other.get(k, l)));
                    }
                }
            }
        }
        out
    }

    /// Inverse over a field by Gauss-Jordan elimination.
    pub fn inverse(&self, r: &Ring) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| r.is_unit(a.get(i, col))).ok_or(Error::SingularMatrix)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let s = r.inv(a.get(col, col)).expect("pivot is a unit");
            a.scale_row(r, col, s);
            inv.scale_row(r, col, s);
            for i in 0..n {
                let f = a.get(i, col);
                if i != col && !f.is_zero() {
                    a.axpy_row(r, i, col, r.neg(f));
                    inv.axpy_row(r, i, col, r.neg(f));
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: &Ring, i: usize, s: RingElem) {
        for c in 0..self.cols {
            self.data[i * self.cols + c] = r.mul(s, self.data[i * self.cols + c]);
        }
    }

    /// row_i += f * row_j
    fn axpy_row(&mut self, r: &Ring, i: usize, j: usize, f: RingElem) {
        for c in 0..self.cols {
            let v = r.add(self.data[i * self.cols + c], r.mul(f, self.data[j * self.cols + c]));
            self.data[i * self.cols + c] = v;
        }
    }
}

/// Closure of invertible square matrices under multiplication, identity first,
/// remaining elements ascending. Fails past `cap` elements.
pub fn matrix_group_closure(r: &Ring, gens: &[Matrix], cap: usize) -> Result<Vec<Matrix>> {
    let n = gens.first().map_or(0, Matrix::rows);
    for g in gens {
        if g.rows() != n || g.cols() != n {
            return Err(Error::RingMismatch(format!("generator of shape {}x{} among {n}x{n}", g.rows(), g.cols())));
        }
        g.inverse(r)?;
    }
    let id = Matrix::identity(n);
    let mut seen: HashSet<Matrix> = HashSet::from([id.clone()]);
    let mut frontier = vec![id.clone()];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.mul(r, g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::TooLarge(format!("matrix group exceeds {cap} elements")));
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    let mut rest: Vec<Matrix> = seen.into_iter().filter(|m| *m != id).collect();
    rest.sort();
    let mut out = vec![id];
    out.extend(rest);
    Ok(out)
}

pub fn vec_add(r: &Ring, u: &[RingElem], w: &[RingElem]) -> Vec<RingElem> {
    u.iter().zip(w).map(|(&a, &b)| r.add(a, b)).collect()
}

pub fn vec_sub(r: &Ring, u: &[RingElem], w: &[RingElem]) -> Vec<RingElem> {
    u.iter().zip(w).map(|(&a, &b)| r.sub(a, b)).collect()
}

pub fn vec_neg(r: &Ring, u: &[RingElem]) -> Vec<RingElem> {
    u.iter().map(|&a| r.neg(a)).collect()
}

pub fn vec_scale(r: &Ring, s: RingElem, u: &[RingElem]) -> Vec<RingElem> {
    u.iter().map(|&a| r.mul(s, a)).collect()
}

/// A subspace of `F^n` over a field, kept as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<RingElem>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Subspace {
        let mut s = Subspace::zero(ambient);
        s.basis = (0..ambient).map(|i| unit_vector(ambient, i)).collect();
        s.pivots = (0..ambient).collect();
        s
    }

    pub fn span(r: &Ring, ambient: usize, vectors: &[Vec<RingElem>]) -> Subspace {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            s.insert(r, v);
        }
        s
    }

    /// Null space `{v : v A = 0}` of the matrix `a` (rows = ambient).
    pub fn left_kernel(r: &Ring, a: &Matrix) -> Subspace {
        // Row reduce [A | I]; rows whose A-part vanishes span the kernel.
        let (n, m) = (a.rows(), a.cols());
        let mut rows: Vec<Vec<RingElem>> = (0..n)
            .map(|i| {
                let mut row = a.row(i).to_vec();
                row.extend(unit_vector(n, i));
                row
            })
            .collect();
        let mut rank = 0;
        for col in 0..m {
            let Some(p) = (rank..n).find(|&i| !rows[i][col].is_zero()) else { continue };
            rows.swap(rank, p);
            let s = r.inv(rows[rank][col]).expect("fields only");
            rows[rank] = vec_scale(r, s, &rows[rank]);
            for i in 0..n {
                let f = rows[i][col];
                if i != rank && !f.is_zero() {
                    let scaled = vec_scale(r, f, &rows[rank]);
                    rows[i] = vec_sub(r, &rows[i], &scaled);
                }
            }
            rank += 1;
        }
        let kernel: Vec<Vec<RingElem>> = rows[rank..].iter().map(|row| row[m..].to_vec()).collect();
        Subspace::span(r, n, &kernel)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<RingElem>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its projection along the echelon basis; zero iff `v` is in the span.
    pub fn reduce(&self, r: &Ring, v: &[RingElem]) -> Vec<RingElem> {
        let mut out = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let f = out[p];
            if !f.is_zero() {
                for (o, &bi) in out.iter_mut().zip(b) {
                    *o = r.sub(*o, r.mul(f, bi));
                }
            }
        }
        out
    }

    pub fn contains(&self, r: &Ring, v: &[RingElem]) -> bool {
        self.reduce(r, v).iter().all(|x| x.is_zero())
    }

    /// Coordinates in the echelon basis, if `v` lies in the subspace.
    pub fn coords(&self, r: &Ring, v: &[RingElem]) -> Option<Vec<RingElem>> {
        self.contains(r, v).then(|| self.pivots.iter().map(|&p| v[p]).collect())
    }

    pub fn combine(&self, r: &Ring, coords: &[RingElem]) -> Vec<RingElem> {
        let mut out = vec![RingElem::ZERO; self.ambient];
        for (&c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                for (o, &bi) in out.iter_mut().zip(b) {
                    *o = r.add(*o, r.mul(c, bi));
                }
            }
        }
        out
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, r: &Ring, v: &[RingElem]) -> bool {
        let mut w = self.reduce(r, v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let s = r.inv(w[p]).expect("subspaces are over fields");
        w = vec_scale(r, s, &w);
        for b in self.basis.iter_mut() {
            let f = b[p];
            if !f.is_zero() {
                for (bi, &wi) in b.iter_mut().zip(&w) {
                    *bi = r.sub(*bi, r.mul(f, wi));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, w);
        true
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<RingElem> {
    let mut v = vec![RingElem::ZERO; n];
    v[i] = RingElem::ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Ring {
        Ring::field(q).unwrap()
    }

    #[test]
    fn adjoint_and_det_examples() {
        let r = f(5);
        let m = Mat2::from_ints(&r, [[1, 2], [3, 4]]);
        assert_eq!(mat_adjoint(&r, &m), Mat2::from_ints(&r, [[4, -2], [-3, 1]]));
        let f2 = f(2);
        assert_eq!(mat_det(&f2, &Mat2::from_ints(&f2, [[0, 1], [1, 0]])), RingElem::ONE);
        let f3 = f(3);
        assert_eq!(
            mat_inv(&f3, &Mat2::from_ints(&f3, [[1, 1], [0, 1]])).unwrap(),
            Mat2::from_ints(&f3, [[1, 2], [0, 1]])
        );
        assert_eq!(mat_inv(&f3, &Mat2::from_ints(&f3, [[1, 1], [1, 1]])), Err(Error::SingularMatrix));
    }

    #[test]
    fn vec_act_examples() {
        let r = f(2);
        let e1 = [RingElem::ONE, RingElem::ZERO];
        assert_eq!(vec_act(&r, &e1, &Mat2::IDENTITY), e1);
        assert_eq!(vec_act(&r, &e1, &Mat2::from_ints(&r, [[0, 1], [1, 0]])), [RingElem::ZERO, RingElem::ONE]);
        let ones = [RingElem::ONE, RingElem::ONE];
        assert_eq!(vec_act(&r, &ones, &Mat2::from_ints(&r, [[1, 1], [0, 1]])), e1);
    }

    /// Counts invertible matrices by brute force over all entries, independently
    /// of `gl2_enumerate`'s ordering and identity handling.
    fn brute_gl2_count(r: &Ring) -> usize {
        let els: Vec<RingElem> = r.enumerate().collect();
        let mut n = 0;
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    for &d in &els {
                        let det = r.sub(r.mul(a, d), r.mul(b, c));
                        if r.inv(det).is_some() {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn gl2_orders() {
        let z4 = Ring::new("Zn:4".parse().unwrap()).unwrap();
        for (r, expected) in [(f(2), 6), (f(3), 48), (z4, 96)] {
            assert_eq!(brute_gl2_count(&r), expected);
            let g = gl2_enumerate(&r).unwrap();
            assert_eq!(g.len(), expected);
            assert_eq!(g[0], Mat2::IDENTITY);
        }
        assert!(matches!(gl2_enumerate(&f(9)), Err(Error::TooLarge(_))));
    }

    #[test]
    fn gl2_closed_and_multiplicative_det() {
        for r in [f(2), f(3)] {
            let g = gl2_enumerate(&r).unwrap();
            let set: HashSet<Mat2> = g.iter().copied().collect();
            for a in &g {
                assert!(set.contains(&mat_inv(&r, a).unwrap()));
                for b in &g {
                    let ab = mat_mul(&r, a, b);
                    assert!(set.contains(&ab));
                    assert_eq!(mat_det(&r, &ab), r.mul(mat_det(&r, a), mat_det(&r, b)));
                }
            }
        }
    }

    #[test]
    fn adjoint_identity_including_singular() {
        let r = Ring::new("Zn:6".parse().unwrap()).unwrap();
        let els: Vec<RingElem> = r.enumerate().collect();
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    for &d in &els {
                        let m = Mat2([a, b, c, d]);
                        let p = mat_mul(&r, &m, &mat_adjoint(&r, &m));
                        assert_eq!(p, Mat2::scalar(mat_det(&r, &m)));
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let r = f(2);
        let g = Mat2::from_ints(&r, [[1, 1], [0, 1]]);
        let h = Mat2::from_ints(&r, [[0, 1], [1, 0]]);
        assert_eq!(commutator_mat(&r, &g, &g).unwrap(), Mat2::IDENTITY);
        assert_eq!(commutator_mat(&r, &Mat2::IDENTITY, &h).unwrap(), Mat2::IDENTITY);
        let hi = mat_inv(&r, &h).unwrap();
        let gi = mat_inv(&r, &g).unwrap();
        // h g h^{-1} g^{-1}, expanded by hand
        let expected = mat_mul(&r, &mat_mul(&r, &mat_mul(&r, &h, &g), &hi), &gi);
        assert_eq!(expected, Mat2::from_ints(&r, [[1, 1], [1, 0]]));
        assert_eq!(commutator_mat(&r, &hi, &gi).unwrap(), expected);
    }

    #[test]
    fn closure_matches_enumeration() {
        let r = f(3);
        let gens = [Mat2::from_ints(&r, [[1, 1], [0, 1]]), Mat2::from_ints(&r, [[0, 1], [-1, 0]])];
        let sl = mat2_group_closure(&r, &gens, 1000).unwrap();
        assert_eq!(sl.len(), 24);
        assert!(sl.iter().all(|m| mat_det(&r, m) == RingElem::ONE));
    }

    #[test]
    fn subspace_operations() {
        let r = f(3);
        let e = |v: [i64; 4]| v.iter().map(|&x| r.from_int(x)).collect::<Vec<_>>();
        let s = Subspace::span(&r, 4, &[e([1, 1, 0, 0]), e([0, 1, 1, 0]), e([1, 2, 1, 0])]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&r, &e([1, 0, 2, 0])));
        assert!(!s.contains(&r, &e([0, 0, 0, 1])));
        let v = e([2, 1, 2, 0]);
        let c = s.coords(&r, &v).unwrap();
        assert_eq!(s.combine(&r, &c), v);

        let a = Matrix::from_rows(vec![e([1, 0, 0, 0]), e([0, 0, 0, 0]), e([0, 0, 0, 0]), e([1, 0, 0, 0])]).transpose();
        // columns: the functional a + b on coordinates 0 and 3
        let k = Subspace::left_kernel(&r, &a.transpose());
        assert_eq!(k.dim(), 3);
        assert!(k.contains(&r, &e([1, 0, 0, 2])));
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let r = f(5);
        let m = Matrix::from_rows(vec![
            vec![r.from_int(1), r.from_int(2), r.from_int(0)],
            vec![r.from_int(0), r.from_int(1), r.from_int(4)],
            vec![r.from_int(3), r.from_int(0), r.from_int(2)],
        ]);
        let inv = m.inverse(&r).unwrap();
        assert!(m.mul(&r, &inv).is_identity());
    }
}
