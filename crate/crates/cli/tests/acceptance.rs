//! Acceptance suite: one line per criterion, each with a pinned time limit.
//!
//! Run with `cargo test -p moufang-cli --test acceptance`. Every criterion is
//! exact; the time limits are checked against the optimized test profile.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use moufang::descriptor::{gl_generators, Subject};
use moufang::extensions::{construction_extension, extension_make, minimality, minimality_by_enumeration, Minimality};
use moufang::linalg::vec_act;
use moufang::loopcore::{
    associativity, is_moufang, is_normal, is_pseudoautomorphism, isomorphic, power, scan_elements, subloop_generate,
    Loop, LoopTable, PsAutPair, Scan, Translation, Verdict,
};
use moufang::products::{abelian_part_associators, catalog, GdLoop};
use moufang::suites::{run_suite, scan_tuples, Suite, SuiteReport};
use moufang::triality::{check_triality, triality_identities, wreath_make, wreath_module_make, TrialityLoop};
use moufang::zorn::{parabolic_elem, parabolic_subloop, psl_lazy, sl_loop, Zorn, ZornElem};
use moufang::{Exec, Ring};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn field(q: u32) -> Ring {
    Ring::field(q).expect("prime power")
}

fn all_pass(report: SuiteReport) -> Result<usize, String> {
    match report {
        SuiteReport::Ran(cs) => match cs.iter().find(|c| !c.passed()) {
            Some(c) => Err(c.to_string()),
            None => Ok(cs.len()),
        },
        SuiteReport::Skipped(why) => Err(format!("skipped: {why}")),
    }
}

/// Solutions of `ab - v.w = 1` over the prime field `F_p`, counted directly.
fn norm_one_count(p: u64) -> u64 {
    let mut count = 0;
    for x in 0..p.pow(8) {
        let c: Vec<u64> = (0..8).map(|k| (x / p.pow(k)) % p).collect();
        let dot = c[1] * c[4] + c[2] * c[5] + c[3] * c[6];
        if (c[0] * c[7] + p * p * 3 - dot) % p == 1 {
            count += 1;
        }
    }
    count
}

fn orders() -> Outcome {
    let sl2 = sl_loop(&field(2)).map_err(err)?;
    let psl3 = psl_lazy(&field(3)).map_err(err)?;
    let (o2, o3) = (norm_one_count(2), norm_one_count(3) / 2);
    ensure(o2 == 2u64.pow(7) - 2u64.pow(3) && o3 * 2 == 3u64.pow(7) - 3u64.pow(3), || "oracle disagrees".into())?;
    ensure(sl2.order() as u64 == o2, || format!("|SL(O(F2))| = {}", sl2.order()))?;
    ensure(psl3.order() as u64 == o3, || format!("|PSL(O(F3))| = {}", psl3.order()))?;
    Ok(format!("|SL(O(F2))|={} |PSL(O(F3))|={}", sl2.order(), psl3.order()))
}

fn paige_table() -> Outcome {
    let t = psl_lazy(&field(2)).and_then(|z| z.materialize(120, Exec::Auto)).map_err(err)?;
    ensure(t.order() == 120, || format!("order {}", t.order()))?;
    let n = t.order();
    let latin = (0..n).all(|x| {
        let row: BTreeSet<usize> = (0..n).map(|y| t.mul(x, y)).collect();
        let col: BTreeSet<usize> = (0..n).map(|y| t.mul(y, x)).collect();
        row.len() == n && col.len() == n
    });
    ensure(latin, || "not a Latin square".into())?;
    ensure(is_moufang(&t, Scan::exhaustive()).is_pass(), || "Moufang law fails".into())?;
    let mut subloops = BTreeSet::new();
    for x in 0..n {
        for y in x..n {
            if let Some(s) = subloop_generate(&t, &[x, y], n) {
                if s.len() > 1 && s.len() < n {
                    subloops.insert(s);
                }
            }
        }
    }
    for s in &subloops {
        ensure(!is_normal(&t, s).map_err(err)?, || format!("normal subloop {s:?}"))?;
    }
    Ok(format!(
        "Latin order 120, Moufang on {} triples, {} two-generated subloops none normal",
        n * n * n,
        subloops.len()
    ))
}

fn gl2_module() -> moufang::triality::WreathModule {
    let r = field(2);
    wreath_module_make(&r, 2, &gl_generators(&r, 2), false).expect("rank two has triality")
}

fn gd_instance() -> Outcome {
    let gd = GdLoop::gl2(&field(2), false).map_err(err)?;
    let t = gd.materialize(24, Exec::Auto).map_err(err)?;
    ensure(t.order() == 24, || format!("order {}", t.order()))?;
    ensure(is_moufang(&t, Scan::exhaustive()).is_pass(), || "Moufang law fails".into())?;
    let Verdict::Fail(w) = associativity(&t, Scan::exhaustive()) else { return Err("associative".into()) };
    let a = gl2_module();
    let m = TrialityLoop::new(&a, Exec::Auto).and_then(|tl| tl.materialize(Exec::Auto)).map_err(err)?;
    ensure(isomorphic(&t, &m).map_err(err)?, || "not isomorphic to M(A)".into())?;
    Ok(format!("order 24, Moufang on 13824 triples, nonassociative at {w:?}, isomorphic to M(A)"))
}

fn triality_boundary() -> Outcome {
    let r = field(2);
    for n in [1, 2] {
        let a = wreath_module_make(&r, n, &gl_generators(&r, n), false).map_err(err)?;
        ensure(check_triality(&a, Scan::exhaustive()).map_err(err)?.is_pass(), || format!("fails at n={n}"))?;
        if n == 1 {
            let m = TrialityLoop::new(&a, Exec::Auto).and_then(|tl| tl.materialize(Exec::Auto)).map_err(err)?;
            ensure(isomorphic(&m, a.group_table()).map_err(err)?, || "M(A) is not G at n=1".into())?;
        }
    }
    let a = wreath_module_make(&r, 3, &[], true).map_err(err)?;
    let v = check_triality(&a, Scan::exhaustive()).map_err(err)?;
    let witness = format!("{:?}", v.witness().ok_or("passes at n=3")?);
    ensure(witness.contains("(1, 2, 3)"), || format!("unexpected witness {witness}"))?;
    Ok(format!("n=1,2 pass (n=1 gives G), n=3 fails with {witness}"))
}

fn inner_suite() -> Outcome {
    let a = gl2_module();
    let tl = TrialityLoop::new(&a, Exec::Auto).map_err(err)?;
    let n1 = all_pass(SuiteReport::Ran(triality_identities(&tl, Scan::exhaustive()).map_err(err)?))?;
    let w = wreath_make(LoopTable::symmetric(3)).map_err(err)?;
    let tw = TrialityLoop::new(&w, Exec::Auto).map_err(err)?;
    let n2 = all_pass(SuiteReport::Ran(triality_identities(&tw, Scan::exhaustive()).map_err(err)?))?;
    Ok(format!("{n1} identities on M(A) of order 24, {n2} on wreath(S3)"))
}

fn formula_engine() -> Outcome {
    let n1 = all_pass(run_suite(&Subject::Module(gl2_module()), Suite::Formulas, Scan::exhaustive()).map_err(err)?)?;
    let gd = GdLoop::gl2(&field(2), false).map_err(err)?;
    let c = Subject::Construction(moufang::products::Construction::Gd(gd));
    let n2 = all_pass(run_suite(&c, Suite::Formulas, Scan::exhaustive()).map_err(err)?)?;
    Ok(format!("{n1} formula checks on all 4-tuples of M(A), {n2} abelian checks in GL2(F2)⋉F2²"))
}

fn operator_identities() -> Outcome {
    let mut counts = Vec::new();
    for (q, budget) in [(2u32, 1_000_000usize), (3, 100_000), (5, 100_000)] {
        let r = field(q);
        let z = Zorn::new(r.clone());
        let elems: Vec<ZornElem> = if q == 2 {
            sl_loop(&r).map_err(err)?.elems().to_vec()
        } else {
            let size = (q as usize).pow(8);
            (0..size)
                .map(|i| std::array::from_fn(|k| ((i / (q as usize).pow(k as u32)) % q as usize) as u32))
                .filter_map(|c| z.elem(c).ok())
                .filter(|x| z.is_invertible(x))
                .collect()
        };
        let n = elems.len();
        let v = scan_tuples([n, n, n], Scan::sampled(budget, u64::from(q)), |[a, b, c]| {
            !z.operator_identities(&elems[a], &elems[b], &elems[c]).is_ok_and(|r| r.iter().all(|&ok| ok))
        });
        ensure(v.is_pass(), || format!("F{q}: identity fails at {:?}", v.witness()))?;
        counts.push(format!("F{q}:{budget}"));
    }
    Ok(format!("four identities exact on {} triples", counts.join(" ")))
}

fn paige_semidirect() -> Outcome {
    let c = catalog("paige-semidirect", 2, 0, Exec::Auto).map_err(err)?;
    ensure(c.order() == 7680, || format!("order {}", c.order()))?;
    let scan = Scan::sampled(1_000_000, 11);
    ensure(is_moufang(&c, scan).is_pass(), || "Moufang law fails".into())?;
    let e = c.identity();
    let exact = Scan::exhaustive();
    ensure(scan_elements(&c, exact, |x| c.mul(x, &e) == *x && c.mul(&e, x) == *x).is_pass(), || "identity".into())?;
    ensure(scan_elements(&c, exact, |x| c.mul(x, &c.inv(x)) == e && c.mul(&c.inv(x), x) == e).is_pass(), || {
        "inverse".into()
    })?;
    let part = c.abelian_part().ok_or("no abelian part")?;
    let v = abelian_part_associators(&c, &part, Scan::sampled(1_000_000, 12));
    ensure(v.is_pass(), || format!("(l,u,w) nontrivial at {:?}", v.witness()))?;
    Ok("order 7680, Moufang and (l,u,w)=1 on 10^6 triples each, identity and inverses exact".into())
}

fn parabolic_embedding() -> Outcome {
    let mut sizes = Vec::new();
    for q in [2, 3] {
        let r = field(q);
        let gd = GdLoop::gl2(&r, false).map_err(err)?;
        let par = parabolic_subloop(&r).map_err(err)?;
        let els = gd.elements();
        let image = |i: usize| {
            let p = &els[i];
            parabolic_elem(&p.g, vec_act(&r, &p.u, &p.g))
        };
        let images: Vec<ZornElem> = (0..els.len()).map(image).collect();
        let distinct: BTreeSet<ZornElem> = images.iter().copied().collect();
        ensure(distinct.len() == els.len() && par.order() == els.len(), || format!("not bijective over F{q}"))?;
        ensure(images.iter().all(|x| par.index_of(x).is_some()), || "image leaves the subloop".into())?;
        let n = els.len();
        let v = scan_tuples([n, n], Scan::exhaustive(), |[a, b]| {
            let ab = gd.index_of(&gd.mul(&els[a], &els[b])).expect("closed");
            images[ab] != par.mul(&images[a], &images[b])
        });
        ensure(v.is_pass(), || format!("F{q}: not a homomorphism at {:?}", v.witness()))?;
        sizes.push(format!("F{q}:{}²", n));
    }
    Ok(format!("bijective homomorphism on {}", sizes.join(" ")))
}

fn minimality_cases() -> Outcome {
    let scan = Scan { seed: 1, ..Scan::default() };
    let mut out = Vec::new();
    for name in ["paige-semidirect", "gl2-semidirect"] {
        let c = catalog(name, 2, 0, Exec::Auto).map_err(err)?;
        let x = construction_extension(&c, scan).map_err(err)?;
        let spin = minimality(&x, scan).map_err(err)?;
        let enumerated = minimality_by_enumeration(&x, scan).map_err(err)?;
        ensure(spin.is_minimal() && enumerated.is_minimal(), || format!("{name}: {spin} / {enumerated}"))?;
        out.push(format!("{name} {spin}={enumerated}"));
    }
    let m2 = psl_lazy(&field(2)).and_then(|z| z.materialize(120, Exec::Auto)).map_err(err)?;
    let t = LoopTable::direct_product(&m2, &LoopTable::cyclic(4));
    let x = extension_make(&t, &[0, 1, 2, 3], scan).map_err(err)?;
    let m = minimality(&x, scan).map_err(err)?;
    ensure(m == Minimality::NotMinimal(vec![0, 2]), || format!("M(2)xZ/4: {m}"))?;
    out.push(format!("M(2)xZ/4 {m}"));
    Ok(out.join(", "))
}

fn pseudoautomorphisms() -> Outcome {
    let m2 = psl_lazy(&field(2)).and_then(|z| z.materialize(120, Exec::Auto)).map_err(err)?;
    let gd = GdLoop::gl2(&field(2), false).and_then(|g| g.materialize(24, Exec::Auto)).map_err(err)?;
    let pairs = |t: &LoopTable, x: usize, y: usize| -> Result<[PsAutPair; 2], String> {
        Ok([
            PsAutPair { map: t.translation(Translation::T, x, None).map_err(err)?, companion: power(t, &x, -3) },
            PsAutPair {
                map: t.translation(Translation::Rxy, x, Some(y)).map_err(err)?,
                companion: t.mul(t.mul(t.mul(t.inv(x), t.inv(y)), x), y),
            },
        ])
    };
    let check = |t: &LoopTable, scan: Scan| -> Result<(), String> {
        let n = t.order();
        let v = scan_tuples([n, n], scan, |[x, y]| {
            pairs(t, x, y).map_or(true, |ps| !ps.iter().all(|p| is_pseudoautomorphism(t, p)))
        });
        ensure(v.is_pass(), || format!("fails at {:?}", v.witness()))
    };
    check(&m2, Scan::sampled(200, 5))?;
    check(&gd, Scan::exhaustive())?;
    let c = Subject::Table(gd);
    let SuiteReport::Ran(cs) = run_suite(&c, Suite::Dxy, Scan::exhaustive()).map_err(err)? else {
        return Err("dxy skipped".into());
    };
    let f = cs.iter().find(|c| c.name == "d-factorization").ok_or("no factorization check")?;
    ensure(f.passed(), || f.to_string())?;
    Ok("T and R pairs on 200 samples of M(2) and all of GL2(F2)⋉F2², D factorization exhaustive".into())
}

fn cli_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let run = |args: &[&str]| -> Result<(i32, String), String> {
        let out =
            Command::new(env!("CARGO_BIN_EXE_moufang")).args(args).current_dir(dir.path()).output().map_err(err)?;
        Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
    };
    let (code, _) = run(&["build", "paige:q=2", "--out", "m2.loop"])?;
    ensure(code == 0, || format!("build exit {code}"))?;
    let (code, first) = run(&["check", "m2.loop", "--suite", "all", "--seed", "9", "--budget", "20000"])?;
    ensure(code == 0, || format!("check exit {code}:\n{first}"))?;
    let (_, again) = run(&["check", "m2.loop", "--suite", "all", "--seed", "9", "--budget", "20000", "--jobs", "1"])?;
    ensure(first == again, || "check output differs between runs".into())?;
    let survey = ["survey", "--bound", "10000", "--q", "2,3", "--seed", "4", "--out"];
    let (code, _) = run(&[&survey[..], &["a.txt"]].concat())?;
    ensure(code == 0, || format!("survey exit {code}"))?;
    let (code, _) = run(&[&survey[..], &["b.txt", "--jobs", "1"]].concat())?;
    ensure(code == 0, || format!("survey exit {code}"))?;
    let a = std::fs::read(dir.path().join("a.txt")).map_err(err)?;
    let b = std::fs::read(dir.path().join("b.txt")).map_err(err)?;
    ensure(a == b, || "survey reports differ".into())?;
    Ok(format!("check and survey exit 0, {} byte report stable across runs", a.len()))
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "orders-sl-psl", limit: secs(10), run: orders },
        Criterion { id: 2, name: "paige-table-simple", limit: secs(120), run: paige_table },
        Criterion { id: 3, name: "gd-order-24-instance", limit: secs(10), run: gd_instance },
        Criterion { id: 4, name: "module-triality-boundary", limit: secs(60), run: triality_boundary },
        Criterion { id: 5, name: "triality-identity-suite", limit: secs(60), run: inner_suite },
        Criterion { id: 6, name: "formula-engine", limit: secs(120), run: formula_engine },
        Criterion { id: 7, name: "alternative-operator-identities", limit: secs(120), run: operator_identities },
        Criterion { id: 8, name: "paige-semidirect-7680", limit: secs(180), run: paige_semidirect },
        Criterion { id: 9, name: "parabolic-embedding", limit: secs(60), run: parabolic_embedding },
        Criterion { id: 10, name: "extension-minimality", limit: secs(60), run: minimality_cases },
        Criterion { id: 11, name: "pseudoautomorphisms", limit: secs(60), run: pseudoautomorphisms },
        Criterion { id: 12, name: "cli-end-to-end", limit: secs(300), run: cli_end_to_end },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.iter().any(|f| c.name.contains(f.as_str()))) {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("over time limit: {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} {:>2} {:<32} {:>7.2}s / {:>3}s  {detail}",
            c.id,
            c.name,
            took.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
