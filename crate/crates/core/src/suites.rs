//! Named verification suites run by `moufang check`.
//!
//! * `moufang`: the Moufang law together with the inverse and flexible laws.
//! * `gzt`: consequences of triality visible in the loop; with a group with
//!   triality (or a group table, via its wreathlike group) also the
//!   identities linking `G`, `C_G(σ)`, `φ` and `χ`.
//! * `dxy`: identities of `D_{x,y}` and its pseudoautomorphism factorization.
//! * `altop`: the operator identities of alternative algebras as maps on the
//!   loop, plus exact matrix identities when the loop lives in `O(R)`.
//! * `psaut`: the pseudoautomorphisms `(T_x, x^{-3})`, `(R_{x,y}, [[x,y]])`
//!   and closure of their products.
//! * `formulas`: multiplication and inversion formulas for `M(G)`, or the
//!   abelian formula `x = uD_{m,n} + wL_{n,m}` in semidirect products.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::descriptor::{LoopVisitor, Subject};
use crate::error::{Error, Result};
use crate::loopcore::{
    associativity, commutator, is_moufang, power, scan_elements, translate, Check, Loop, LoopTable, Scan, Translation,
    Verdict,
};
use crate::par;
use crate::products::{abelian_part_associators, Construction};
use crate::ring::RingElem;
use crate::triality::{
    abelian_associators, check_triality, formula_abelian, formula_abelian_inverse, formula_general, formula_inverse,
    restricted_operator, triality_identities, wreath_make, TrialityGroup, TrialityLoop,
};
use crate::zorn::ZornLoop;

/// Tuple scans are exhaustive up to this many tuples.
pub const TUPLE_EXHAUSTIVE_LIMIT: u64 = 1 << 24;
/// Group tables up to this order get the full triality suite through `G×G×G`.
pub const WREATH_SUITE_LIMIT: usize = 64;
/// Triples of algebra elements sampled for the matrix operator identities.
pub const ALGEBRA_IDENTITY_SAMPLE: usize = 2000;

/// A named suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Moufang,
    Gzt,
    Dxy,
    Altop,
    Psaut,
    Formulas,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Moufang, Suite::Gzt, Suite::Dxy, Suite::Altop, Suite::Psaut, Suite::Formulas];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s.trim() {
            "moufang" => Suite::Moufang,
            "gzt" => Suite::Gzt,
            "dxy" => Suite::Dxy,
            "altop" => Suite::Altop,
            "psaut" => Suite::Psaut,
            "formulas" => Suite::Formulas,
            other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Moufang => "moufang",
            Suite::Gzt => "gzt",
            Suite::Dxy => "dxy",
            Suite::Altop => "altop",
            Suite::Psaut => "psaut",
            Suite::Formulas => "formulas",
        })
    }
}

/// Parses a comma-separated suite list; `all` selects every suite.
pub fn parse_suites(list: &str) -> Result<Vec<Suite>> {
    if list.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out: Vec<Suite> = Vec::new();
    for s in list.split(',') {
        let suite = s.parse()?;
        if !out.contains(&suite) {
            out.push(suite);
        }
    }
    Ok(out)
}

/// What a suite did with a subject.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SuiteReport {
    Ran(Vec<Check>),
    /// The subject lacks the structure the suite needs.
    Skipped(String),
}

/// Scans index tuples `t` with `t[i] < radix[i]` for one where `fails` holds.
///
/// Exhaustive when every radix is at most `scan.exhaustive_limit` and the
/// tuple count is at most [`TUPLE_EXHAUSTIVE_LIMIT`]; otherwise
/// `scan.budget` seeded tuples. The witness is the lowest failing tuple.
pub fn scan_tuples<const K: usize, F>(radix: [usize; K], scan: Scan, fails: F) -> Verdict<[usize; K]>
where
    F: Fn([usize; K]) -> bool + Sync + Send,
{
    let total = radix.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r as u64));
    let exhaustive =
        radix.iter().all(|&r| r <= scan.exhaustive_limit) && total.is_some_and(|t| t <= TUPLE_EXHAUSTIVE_LIMIT);
    let decode = |mut i: usize| {
        let mut t = [0usize; K];
        for k in (0..K).rev() {
            t[k] = i % radix[k];
            i /= radix[k];
        }
        t
    };
    if exhaustive {
        let total = total.expect("checked") as usize;
        return Verdict::from_witness(par::find_first(scan.exec, total, |i| fails(decode(i))).map(decode));
    }
    let mut rng = scan.rng();
    let draws: Vec<[usize; K]> =
        (0..scan.budget).map(|_| std::array::from_fn(|k| rng.gen_range(0..radix[k]))).collect();
    Verdict::from_witness(par::find_first(scan.exec, draws.len(), |s| fails(draws[s])).map(|s| draws[s]))
}

fn tr<L: Loop>(l: &L, kind: Translation, x: &L::Elem, y: Option<&L::Elem>, a: &L::Elem) -> L::Elem {
    translate(l, kind, x, y, a).expect("second argument supplied")
}

/// Left-to-right product of a word.
fn word<L: Loop>(l: &L, factors: &[&L::Elem]) -> L::Elem {
    factors.iter().fold(l.identity(), |acc, f| l.mul(&acc, f))
}

/// Whether `A` with companion `c` satisfies `aA.(bA.c) = (ab)A.c` at `(a, b)`.
fn psaut_at<L: Loop>(l: &L, map: impl Fn(&L::Elem) -> L::Elem, c: &L::Elem, a: &L::Elem, b: &L::Elem) -> bool {
    l.mul(&map(a), &l.mul(&map(b), c)) == l.mul(&map(&l.mul(a, b)), c)
}

fn moufang_suite<L: Loop>(l: &L, scan: Scan) -> Vec<Check> {
    let n = l.order();
    let e = l.identity();
    vec![
        Check::new("moufang-law", is_moufang(l, scan)),
        Check::new(
            "two-sided-inverse",
            scan_elements(l, scan, |x| {
                let xi = l.inv(x);
                l.mul(x, &xi) == e && l.mul(&xi, x) == e
            }),
        ),
        Check::new(
            "inverse-property",
            scan_tuples([n, n], scan, |[x, y]| {
                let (x, y) = (l.element(x), l.element(y));
                let xi = l.inv(&x);
                l.mul(&xi, &l.mul(&x, &y)) != y || l.mul(&l.mul(&y, &x), &xi) != y
            }),
        ),
        Check::new(
            "flexible-law",
            scan_tuples([n, n], scan, |[x, y]| {
                let (x, y) = (l.element(x), l.element(y));
                l.mul(&l.mul(&x, &y), &x) != l.mul(&x, &l.mul(&y, &x))
            }),
        ),
    ]
}

fn gzt_loop_suite<L: Loop>(l: &L, scan: Scan) -> Vec<Check> {
    let n = l.order();
    let el = |i: usize| l.element(i);
    vec![
        Check::new(
            "psaut-inner-r",
            scan_tuples([n, n, n, n], scan, |[m, k, a, b]| {
                let (m, k) = (el(m), el(k));
                let c = commutator(l, &m, &k);
                !psaut_at(l, |z| tr(l, Translation::Rxy, &m, Some(&k), z), &c, &el(a), &el(b))
            }),
        ),
        Check::new(
            "psaut-inner-t",
            scan_tuples([n, n, n], scan, |[m, a, b]| {
                let m = el(m);
                let c = power(l, &m, -3);
                !psaut_at(l, |z| tr(l, Translation::T, &m, None, z), &c, &el(a), &el(b))
            }),
        ),
    ]
}

fn dxy_suite<L: Loop>(l: &L, scan: Scan) -> Vec<Check> {
    let n = l.order();
    let el = |i: usize| l.element(i);
    let inv = |x: &L::Elem| l.inv(x);
    let mul = |x: &L::Elem, y: &L::Elem| l.mul(x, y);
    vec![
        Check::new(
            "conjugated-product-forms",
            scan_tuples([n, n, n], scan, |[x, y, m]| {
                let (x, y, m) = (el(x), el(y), el(m));
                let mi = inv(&m);
                let a = mul(&mi, &mul(&mul(&m, &x), &y));
                let b = mul(&mul(&x, &mi), &mul(&m, &y));
                let c = mul(&mul(&x, &mul(&y, &mi)), &m);
                a != b || b != c
            }),
        ),
        Check::new(
            "right-inner-map-forms",
            scan_tuples([n, n, n], scan, |[x, y, a]| {
                let (x, y, a) = (el(x), el(y), el(a));
                let r = tr(l, Translation::Rxy, &x, Some(&y), &a);
                let li = tr(l, Translation::Lxy, &inv(&x), Some(&inv(&y)), &a);
                let chain = mul(&y, &l.rdiv(&l.ldiv(&y, &mul(&a, &x)), &x));
                r != li || li != chain
            }),
        ),
        Check::new(
            "d-operator-forms",
            scan_tuples([n, n, n], scan, |[x, y, m]| {
                let (x, y, m) = (el(x), el(y), el(m));
                let (xi, yi) = (inv(&x), inv(&y));
                let a = mul(&xi, &mul(&mul(&mul(&x, &yi), &m), &y));
                let b = mul(&mul(&yi, &xi), &mul(&mul(&x, &m), &y));
                let c = mul(&mul(&yi, &mul(&m, &xi)), &mul(&x, &y));
                let d = mul(&mul(&yi, &mul(&m, &mul(&y, &xi))), &x);
                a != b || b != c || c != d || a != tr(l, Translation::Dxy, &x, Some(&y), &m)
            }),
        ),
        Check::new(
            "d-pseudoautomorphism",
            scan_tuples([n, n, n, n], scan, |[x, y, a, b]| {
                let (x, y) = (el(x), el(y));
                let (xi, yi) = (inv(&x), inv(&y));
                let c = word(l, &[&yi, &x, &yi, &yi, &xi]);
                !psaut_at(l, |z| tr(l, Translation::Dxy, &x, Some(&y), z), &c, &el(a), &el(b))
            }),
        ),
        Check::new(
            "d-factorization",
            scan_tuples([n, n, n], scan, |[x, y, a]| {
                let (x, y, a) = (el(x), el(y), el(a));
                let (xi, yi) = (inv(&x), inv(&y));
                let d = tr(l, Translation::Dxy, &x, Some(&y), &a);
                let f1 = |z: &L::Elem| tr(l, Translation::Lxy, &x, Some(&yi), z);
                let f2 = |z: &L::Elem| tr(l, Translation::T, &y, None, z);
                let f3 = |z: &L::Elem| tr(l, Translation::Lxy, &y, Some(&x), z);
                let product = f3(&f2(&f1(&a)));
                // (A,a)(B,b)(C,c) = (ABC, (aB.b)C.c)
                let (c1, c2, c3) = (commutator(l, &xi, &y), power(l, &y, -3), commutator(l, &yi, &xi));
                let companion = mul(&f3(&mul(&f2(&c1), &c2)), &c3);
                d != product || companion != word(l, &[&yi, &x, &yi, &yi, &xi])
            }),
        ),
    ]
}

fn altop_loop_suite<L: Loop>(l: &L, scan: Scan) -> Vec<Check> {
    let n = l.order();
    let el = |i: usize| l.element(i);
    let mul = |x: &L::Elem, y: &L::Elem| l.mul(x, y);
    let d = |x: &L::Elem, y: &L::Elem, a: &L::Elem| tr(l, Translation::Dxy, x, Some(y), a);
    let lo = |x: &L::Elem, y: &L::Elem, a: &L::Elem| tr(l, Translation::Lxy, x, Some(y), a);
    vec![
        Check::new(
            "operator-d-factorization",
            scan_tuples([n, n, n], scan, |[m, k, a]| {
                let (m, k, a) = (el(m), el(k), el(a));
                let t = tr(l, Translation::T, &k, None, &lo(&m, &l.inv(&k), &a));
                d(&m, &k, &a) != lo(&k, &m, &t)
            }),
        ),
        Check::new(
            "operator-l-d-exchange",
            scan_tuples([n, n, n, n], scan, |[m, k, j, a]| {
                let (m, k, j, a) = (el(m), el(k), el(j), el(a));
                let (mk, jm, kj) = (mul(&m, &k), mul(&j, &m), mul(&k, &j));
                let m_kj = mul(&m, &kj);
                d(&mk, &jm, &lo(&k, &m, &a)) != d(&m_kj, &m, &lo(&kj, &m, &d(&k, &j, &a)))
            }),
        ),
        Check::new(
            "operator-d-l-exchange",
            scan_tuples([n, n, n, n], scan, |[m, k, j, a]| {
                let (m, k, j, a) = (el(m), el(k), el(j), el(a));
                let (mk, jm, kj) = (mul(&m, &k), mul(&j, &m), mul(&k, &j));
                let m_kj = mul(&m, &kj);
                lo(&jm, &mk, &d(&j, &m, &a)) != d(&m_kj, &m, &lo(&kj, &m, &lo(&j, &k, &a)))
            }),
        ),
    ]
}

/// The four operator identities as exact 8×8 matrix equalities on sampled triples.
fn altop_algebra_check(z: &ZornLoop, scan: Scan) -> Check {
    let n = z.order();
    let zorn = z.zorn();
    let sample = Scan { budget: scan.budget.min(ALGEBRA_IDENTITY_SAMPLE), ..scan };
    Check::new(
        "algebra-operator-identities",
        scan_tuples([n, n, n], sample, |[m, k, j]| {
            let (m, k, j) = (z.element(m), z.element(k), z.element(j));
            !zorn.operator_identities(&m, &k, &j).is_ok_and(|r| r.iter().all(|&b| b))
        }),
    )
}

fn psaut_suite<L: Loop>(l: &L, scan: Scan) -> Vec<Check> {
    let n = l.order();
    let el = |i: usize| l.element(i);
    let mut out = gzt_loop_suite(l, scan);
    out.truncate(2);
    out[0].name = "psaut-r-companion".into();
    out[1].name = "psaut-t-companion".into();
    out.push(Check::new(
        "psaut-group-law",
        scan_tuples([n, n, n, n, n], scan, |[x, y, z, a, b]| {
            let (x, y, z) = (el(x), el(y), el(z));
            let f = |w: &L::Elem| tr(l, Translation::Rxy, &y, Some(&z), &tr(l, Translation::T, &x, None, w));
            let c = l.mul(&tr(l, Translation::Rxy, &y, Some(&z), &power(l, &x, -3)), &commutator(l, &y, &z));
            !psaut_at(l, f, &c, &el(a), &el(b))
        }),
    ));
    out
}

struct LoopSuite {
    suite: Suite,
    scan: Scan,
}

impl LoopVisitor for LoopSuite {
    type Output = Vec<Check>;

    fn visit<L: Loop>(self, l: &L) -> Vec<Check> {
        match self.suite {
            Suite::Moufang => moufang_suite(l, self.scan),
            Suite::Gzt => gzt_loop_suite(l, self.scan),
            Suite::Dxy => dxy_suite(l, self.scan),
            Suite::Altop => altop_loop_suite(l, self.scan),
            Suite::Psaut => psaut_suite(l, self.scan),
            Suite::Formulas => Vec::new(),
        }
    }
}

fn triality_checks<G: TrialityGroup>(g: &G, scan: Scan) -> Result<Vec<Check>> {
    let mut out = vec![Check::new("triality-axiom", check_triality(g, scan)?)];
    let tl = TrialityLoop::new(g, scan.exec)?;
    out.extend(triality_identities(&tl, scan)?);
    Ok(out)
}

fn formula_checks<G: TrialityGroup>(g: &G, scan: Scan) -> Result<Vec<Check>> {
    let tl = TrialityLoop::new(g, scan.exec)?;
    let n = tl.order();
    let el = |i: usize| tl.element(i);
    Ok(vec![
        Check::new(
            "formula-product",
            scan_tuples([n, n, n, n], scan, |[m, k, u, w]| {
                let (m, k, u, w) = (el(m), el(k), el(u), el(w));
                formula_general(&tl, &m, &k, &u, &w)
                    .map_or(true, |x| tl.mul(&tl.mul(&m, &u), &tl.mul(&k, &w)) != tl.mul(&tl.mul(&m, &k), &x))
            }),
        ),
        Check::new(
            "formula-inverse",
            scan_tuples([n, n], scan, |[m, u]| {
                let (m, u) = (el(m), el(u));
                formula_inverse(&tl, &m, &u).map_or(true, |y| tl.inv(&tl.mul(&m, &u)) != tl.mul(&tl.inv(&m), &y))
            }),
        ),
    ])
}

/// Whether a table is a group, decided exhaustively.
fn is_group_table(t: &LoopTable, scan: Scan) -> bool {
    t.order() <= WREATH_SUITE_LIMIT && associativity(t, Scan { exhaustive_limit: usize::MAX, ..scan }).is_pass()
}

/// The abelian formula checked inside a semidirect product `E = MU`.
///
/// With `m̂ = (m,0)` and `û = (1,u)`, checks `(m̂.û)(n̂.ŵ) = (m̂n̂).x̂` where
/// `x̂ = ûD_{m̂,n̂} . ŵL_{n̂,m̂}`, the inversion `(m̂.û)^{-1} = m̂^{-1}.ŷ` with
/// `ŷ = (ûT_{m̂}^{-1})^{-1}`, and trivial associators `(l, û, ŵ)`.
fn semidirect_formula_checks(c: &Construction, scan: Scan) -> Vec<Check> {
    let (Some(base), Some(part)) = (c.base_order(), c.abelian_part()) else { return Vec::new() };
    let u = part.len();
    let hat = |m: usize| m * u;
    let d = |x, y, a| tr(c, Translation::Dxy, &x, Some(&y), &a);
    let lxy = |x, y, a| tr(c, Translation::Lxy, &x, Some(&y), &a);
    vec![
        Check::new(
            "abelian-formula-product",
            scan_tuples([base, base, u, u], scan, |[m, k, a, b]| {
                let (m, k, a, b) = (hat(m), hat(k), part[a], part[b]);
                let x = c.mul(&d(m, k, a), &lxy(k, m, b));
                c.mul(&c.mul(&m, &a), &c.mul(&k, &b)) != c.mul(&c.mul(&m, &k), &x)
            }),
        ),
        Check::new(
            "abelian-formula-inverse",
            scan_tuples([base, u], scan, |[m, a]| {
                let (m, a) = (hat(m), part[a]);
                let mi = c.inv(&m);
                let y = c.inv(&tr(c, Translation::T, &mi, None, &a));
                c.inv(&c.mul(&m, &a)) != c.mul(&mi, &y)
            }),
        ),
        Check::new("kernel-associators", abelian_part_associators(c, &part, scan)),
    ]
}

/// `x = uD_{m,n} + wL_{n,m}` and `y = -uT_m^{-1}` against the general formulas in `A = T⋉W`.
fn module_abelian_checks(a: &crate::triality::WreathModule, scan: Scan) -> Result<Vec<Check>> {
    let tl = TrialityLoop::new(a, scan.exec)?;
    let r = a.ring().clone();
    let sub = a.moufang_module();
    let q = r.order() as usize;
    let count = q.pow(sub.dim() as u32);
    let coords = |i: usize| -> Vec<RingElem> {
        (0..sub.dim()).map(|k| RingElem::from_index(((i / q.pow(k as u32)) % q) as u32)).collect()
    };
    let n = tl.order();
    let el = |i: usize| tl.element(i);
    let formula = scan_tuples([n, n, count, count], scan, |[m, k, u, w]| {
        let (m, k) = (el(m), el(k));
        let (u, w) = (coords(u), coords(w));
        let ops = (
            restricted_operator(&tl, Translation::Dxy, &m, Some(&k)),
            restricted_operator(&tl, Translation::Lxy, &k, Some(&m)),
            restricted_operator(&tl, Translation::T, &m, None),
        );
        let (Ok(dm), Ok(lm), Ok(tm)) = ops else { return true };
        let ue = a.module_elem(sub.combine(&r, &u));
        let we = a.module_elem(sub.combine(&r, &w));
        let general = formula_general(&tl, &m, &k, &ue, &we);
        let x = formula_abelian(&r, &dm, &lm, &u, &w);
        let gi = formula_inverse(&tl, &m, &ue);
        let y = formula_abelian_inverse(&r, &tm, &u);
        match (general, x, gi, y) {
            (Ok(g), Ok(x), Ok(gi), Ok(y)) => {
                g != a.module_elem(sub.combine(&r, &x)) || gi != a.module_elem(sub.combine(&r, &y))
            }
            _ => true,
        }
    });
    Ok(vec![Check::new("formula-abelian", formula), abelian_associators(&tl, scan)])
}

/// Runs one suite on a subject.
pub fn run_suite(subject: &Subject, suite: Suite, scan: Scan) -> Result<SuiteReport> {
    let exec = scan.exec;
    let mut checks = subject.visit(LoopSuite { suite, scan }, exec)?;
    match (suite, subject) {
        (Suite::Gzt, Subject::Wreath(w)) => checks.extend(triality_checks(w, scan)?),
        (Suite::Gzt, Subject::Module(a)) => checks.extend(triality_checks(a, scan)?),
        (Suite::Gzt, Subject::Table(t)) if is_group_table(t, scan) => {
            checks.extend(triality_checks(&wreath_make(t.clone())?, scan)?)
        }
        (Suite::Altop, Subject::Zorn(z)) => checks.push(altop_algebra_check(z, scan)),
        (Suite::Formulas, Subject::Wreath(w)) => checks.extend(formula_checks(w, scan)?),
        (Suite::Formulas, Subject::Module(a)) => {
            checks.extend(formula_checks(a, scan)?);
            checks.extend(module_abelian_checks(a, scan)?);
        }
        (Suite::Formulas, Subject::Table(t)) if is_group_table(t, scan) => {
            checks.extend(formula_checks(&wreath_make(t.clone())?, scan)?)
        }
        (Suite::Formulas, Subject::Construction(c)) => checks.extend(semidirect_formula_checks(c, scan)),
        (Suite::Formulas, _) => {
            return Ok(SuiteReport::Skipped(
                "needs a group with triality, a group table or a semidirect product".into(),
            ))
        }
        _ => {}
    }
    Ok(SuiteReport::Ran(checks))
}
