//! Textual descriptors for loops and groups with triality.
//!
//! Grammar (items separated by top-level commas):
//!
//! * `<path>`: a `loop-table v1` file
//! * `paige:q=<q>`: the Paige loop `M(q)`
//! * `gd:<ring>,<gens>`: `G⋉R²` with `gens` one of `all`, `sl`, `diag` or
//!   a list of matrices `[a,b,c,d]` (row-major, ring element indices)
//! * `sd:<base>,<ring>,<module>`: `M⋉U` with base `sl`, `psl`, `parabolic`
//!   or `m2`, and module `full`, `perp` or `perp6`
//! * `catalog:<name>,<q>` (or `q=<q>`): a named catalog construction
//! * `wreath:<path>`: the wreathlike group `G×G×G` over a group table
//! * `wreathmod:<ring>,<n>[,<gens>]`: the module extension `A = T⋉W` with
//!   `gens` one of `trivial` (default), `all` or `n×n` matrices
//!
//! Rings are `F<q>`, `Z<n>`, `Fp:<p>`, `Zn:<n>`, or any ring descriptor in
//! brackets, e.g. `[Fpk:2,2,1,1]`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Matrix};
use crate::loopcore::{split_top_level, Loop, LoopTable};
use crate::par::Exec;
use crate::products::{catalog, m2_embedding, Construction, GdLoop, ModuleKind, SdLoop};
use crate::ring::{Ring, RingElem, RingSpec};
use crate::triality::{wreath_make, wreath_module_make, TrialityLoop, Wreath, WreathModule};
use crate::zorn::{parabolic_subloop, psl_lazy, sl_loop, ZornLoop};

/// Generators of `G ≤ GL_2(R)` for `gd:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GdGroup {
    All,
    Special,
    Diagonal,
    Generated(Vec<[u32; 4]>),
}

/// Generators of `G ≤ GL_n(R)` for `wreathmod:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleGroup {
    Trivial,
    All,
    Generated(Vec<Vec<u32>>),
}

/// Base loop of `sd:`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdBase {
    Sl,
    Psl,
    Parabolic,
    M2,
}

/// A parsed descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descriptor {
    File(PathBuf),
    Paige { q: u32 },
    Gd { ring: RingSpec, group: GdGroup },
    Sd { base: SdBase, ring: RingSpec, module: ModuleKind },
    Catalog { name: String, q: u32 },
    Wreath(PathBuf),
    WreathMod { ring: RingSpec, n: usize, group: ModuleGroup },
}

fn parse_ring(s: &str) -> Result<RingSpec> {
    let s = s.trim();
    let inner = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
    inner.parse().map_err(|e| match e {
        Error::Parse(m) => Error::Parse(m),
        other => Error::Parse(format!("ring {s:?}: {other}")),
    })
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

/// Parses `q=<q>` or `<q>`.
fn parse_q(s: &str) -> Result<u32> {
    parse_num(s.trim().strip_prefix("q=").unwrap_or(s), "field size")
}

/// Parses `[a,b,...]` into element indices.
fn parse_matrix(s: &str) -> Result<Vec<u32>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("matrix {s:?} must be written [a,b,...]")))?;
    inner.split(',').map(|t| parse_num(t, "matrix entry")).collect()
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Descriptor> {
        let s = s.trim();
        let Some((kind, rest)) = s.split_once(':') else {
            return Ok(Descriptor::File(PathBuf::from(s)));
        };
        let args = split_top_level(rest);
        let arity = |lo: usize, hi: usize| {
            if args.len() < lo || args.len() > hi {
                Err(Error::Parse(format!("{kind}: expected {lo} to {hi} arguments, got {}", args.len())))
            } else {
                Ok(())
            }
        };
        match kind {
            "paige" => {
                arity(1, 1)?;
                Ok(Descriptor::Paige { q: parse_q(&args[0])? })
            }
            "gd" => {
                arity(2, usize::MAX)?;
                let ring = parse_ring(&args[0])?;
                let group = match args[1].trim() {
                    "all" if args.len() == 2 => GdGroup::All,
                    "sl" if args.len() == 2 => GdGroup::Special,
                    "diag" if args.len() == 2 => GdGroup::Diagonal,
                    _ => GdGroup::Generated(
                        args[1..]
                            .iter()
                            .map(|m| {
                                let v = parse_matrix(m)?;
                                <[u32; 4]>::try_from(v).map_err(|_| Error::Parse(format!("{m:?} is not 2x2")))
                            })
                            .collect::<Result<_>>()?,
                    ),
                };
                Ok(Descriptor::Gd { ring, group })
            }
            "sd" => {
                arity(3, 3)?;
                let base = match args[0].trim() {
                    "sl" => SdBase::Sl,
                    "psl" => SdBase::Psl,
                    "parabolic" => SdBase::Parabolic,
                    "m2" => SdBase::M2,
                    other => return Err(Error::Parse(format!("unknown sd base {other:?}"))),
                };
                Ok(Descriptor::Sd { base, ring: parse_ring(&args[1])?, module: args[2].trim().parse()? })
            }
            "catalog" => {
                arity(2, 2)?;
                Ok(Descriptor::Catalog { name: args[0].trim().to_string(), q: parse_q(&args[1])? })
            }
            "wreath" => {
                arity(1, 1)?;
                Ok(Descriptor::Wreath(PathBuf::from(args[0].trim())))
            }
            "wreathmod" => {
                arity(2, usize::MAX)?;
                let ring = parse_ring(&args[0])?;
                let n: usize = parse_num(&args[1], "rank")?;
                let group = match args.get(2).map(|a| a.trim()) {
                    None | Some("trivial") if args.len() <= 3 => ModuleGroup::Trivial,
                    Some("all") if args.len() == 3 => ModuleGroup::All,
                    _ => ModuleGroup::Generated(
                        args[2..]
                            .iter()
                            .map(|m| {
                                let v = parse_matrix(m)?;
                                if v.len() == n * n {
                                    Ok(v)
                                } else {
                                    Err(Error::Parse(format!("{m:?} is not {n}x{n}")))
                                }
                            })
                            .collect::<Result<_>>()?,
                    ),
                };
                Ok(Descriptor::WreathMod { ring, n, group })
            }
            // Windows-style drive prefixes and other colons fall back to paths.
            _ if std::path::Path::new(s).exists() => Ok(Descriptor::File(PathBuf::from(s))),
            other => Err(Error::Parse(format!("unknown descriptor kind {other:?}"))),
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = |r: &RingSpec| {
            let s = r.to_string();
            if s.contains(',') {
                format!("[{s}]")
            } else {
                s
            }
        };
        let mats = |ms: &mut dyn Iterator<Item = Vec<u32>>| {
            ms.map(|m| format!("[{}]", m.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Descriptor::File(p) => write!(f, "{}", p.display()),
            Descriptor::Paige { q } => write!(f, "paige:q={q}"),
            Descriptor::Gd { ring: r, group } => {
                let g = match group {
                    GdGroup::All => "all".to_string(),
                    GdGroup::Special => "sl".to_string(),
                    GdGroup::Diagonal => "diag".to_string(),
                    GdGroup::Generated(ms) => mats(&mut ms.iter().map(|m| m.to_vec())),
                };
                write!(f, "gd:{},{g}", ring(r))
            }
            Descriptor::Sd { base, ring: r, module } => {
                let b = match base {
                    SdBase::Sl => "sl",
                    SdBase::Psl => "psl",
                    SdBase::Parabolic => "parabolic",
                    SdBase::M2 => "m2",
                };
                write!(f, "sd:{b},{},{module}", ring(r))
            }
            Descriptor::Catalog { name, q } => write!(f, "catalog:{name},q={q}"),
            Descriptor::Wreath(p) => write!(f, "wreath:{}", p.display()),
            Descriptor::WreathMod { ring: r, n, group } => {
                let g = match group {
                    ModuleGroup::Trivial => "trivial".to_string(),
                    ModuleGroup::All => "all".to_string(),
                    ModuleGroup::Generated(ms) => mats(&mut ms.iter().cloned()),
                };
                write!(f, "wreathmod:{},{n},{g}", ring(r))
            }
        }
    }
}

/// Metadata standing in for a loop too large to tabulate: rebuilding the
/// descriptor with the recorded seed reproduces the loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopHandle {
    pub descriptor: Descriptor,
    pub seed: u64,
    pub order: usize,
}

impl LoopHandle {
    pub const HEADER: &'static str = "loop-handle v1";
}

impl fmt::Display for LoopHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::HEADER)?;
        writeln!(f, "descriptor {}", self.descriptor)?;
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "order {}", self.order)
    }
}

impl FromStr for LoopHandle {
    type Err = Error;

    fn from_str(text: &str) -> Result<LoopHandle> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(Self::HEADER) {
            return Err(Error::Format(format!("missing `{}` header", Self::HEADER)));
        }
        let mut field = |key: &str| {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .map(|v| v.trim().to_string())
                .ok_or_else(|| Error::Format(format!("missing `{key}` line")))
        };
        let descriptor: Descriptor = field("descriptor ")?.parse()?;
        if matches!(descriptor, Descriptor::File(_)) {
            return Err(Error::Format("a handle must name a construction, not a file".into()));
        }
        let seed = field("seed ")?.parse().map_err(|_| Error::Format("bad seed".into()))?;
        let order = field("order ")?.parse().map_err(|_| Error::Format("bad order".into()))?;
        Ok(LoopHandle { descriptor, seed, order })
    }
}

/// A built descriptor.
#[derive(Clone, Debug)]
pub enum Subject {
    Table(LoopTable),
    /// A semidirect product with its abelian part.
    Construction(Construction),
    /// A loop of Zorn matrices (kept lazy, with the algebra available).
    Zorn(ZornLoop),
    Wreath(Wreath),
    Module(WreathModule),
}

/// Something that can run on any [`Loop`].
pub trait LoopVisitor {
    type Output;
    fn visit<L: Loop>(self, l: &L) -> Self::Output;
}

impl Subject {
    /// Calls `v` with the loop of this subject (`M(G)` for groups with triality).
    pub fn visit<V: LoopVisitor>(&self, v: V, exec: Exec) -> Result<V::Output> {
        Ok(match self {
            Subject::Table(t) => v.visit(t),
            Subject::Construction(c) => v.visit(c),
            Subject::Zorn(z) => v.visit(z),
            Subject::Wreath(w) => v.visit(&TrialityLoop::new(w, exec)?),
            Subject::Module(a) => v.visit(&TrialityLoop::new(a, exec)?),
        })
    }

    pub fn order(&self, exec: Exec) -> Result<usize> {
        struct Order;
        impl LoopVisitor for Order {
            type Output = usize;
            fn visit<L: Loop>(self, l: &L) -> usize {
                l.order()
            }
        }
        self.visit(Order, exec)
    }

    /// The Cayley table, if the order is at most `cap`.
    pub fn table(&self, cap: usize, exec: Exec) -> Result<LoopTable> {
        match self {
            Subject::Table(t) if t.order() <= cap => Ok(t.clone()),
            Subject::Table(t) => Err(Error::TooLargeToMaterialize(t.order())),
            Subject::Construction(c) => c.materialize(cap, exec),
            Subject::Zorn(z) => z.materialize(cap, exec),
            Subject::Wreath(w) => guarded(TrialityLoop::new(w, exec)?, cap, exec),
            Subject::Module(a) => guarded(TrialityLoop::new(a, exec)?, cap, exec),
        }
    }
}

fn guarded<G: crate::triality::TrialityGroup>(tl: TrialityLoop<'_, G>, cap: usize, exec: Exec) -> Result<LoopTable> {
    if tl.order() > cap {
        return Err(Error::TooLargeToMaterialize(tl.order()));
    }
    tl.materialize(exec)
}

fn elem(ring: &Ring, v: u32) -> Result<RingElem> {
    ring.elem(v)
}

/// Generators of `GL_n(R)` over a field: elementary transvections and `diag(λ,1,...,1)`.
pub fn gl_generators(ring: &Ring, n: usize) -> Vec<Matrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut m = Matrix::identity(n);
                m.set(i, j, RingElem::ONE);
                gens.push(m);
            }
        }
    }
    for l in ring.enumerate().filter(|&l| ring.is_unit(l) && l != RingElem::ONE) {
        let mut m = Matrix::identity(n);
        m.set(0, 0, l);
        gens.push(m);
    }
    gens
}

impl Descriptor {
    /// Builds the loop or group. `seed` drives seeded searches such as the
    /// embedding `M(2) ≤ M(p)`; `allow_failing` admits module extensions
    /// without triality.
    pub fn build(&self, seed: u64, exec: Exec, allow_failing: bool) -> Result<Subject> {
        match self {
            Descriptor::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
                if text.starts_with(LoopHandle::HEADER) {
                    let h: LoopHandle = text.parse()?;
                    let subject = h.descriptor.build(h.seed, exec, allow_failing)?;
                    let order = subject.order(exec)?;
                    if order != h.order {
                        return Err(Error::Format(format!("handle records order {} but {} was built", h.order, order)));
                    }
                    return Ok(subject);
                }
                Ok(Subject::Table(LoopTable::parse_loop_file(&text)?))
            }
            Descriptor::Paige { q } => Ok(Subject::Zorn(psl_lazy(&Ring::field(*q)?)?)),
            Descriptor::Gd { ring, group } => {
                let r = Ring::new(ring.clone())?;
                let g = match group {
                    GdGroup::All => GdLoop::gl2(&r, false)?,
                    GdGroup::Special => GdLoop::sl2(&r, false)?,
                    GdGroup::Diagonal => GdLoop::from_elements(
                        &r,
                        crate::linalg::gl2_enumerate(&r)?
                            .into_iter()
                            .filter(|g| g.get(0, 1).is_zero() && g.get(1, 0).is_zero())
                            .collect(),
                        false,
                    )?,
                    GdGroup::Generated(ms) => {
                        let gens = ms
                            .iter()
                            .map(|m| Ok(Mat2::new(elem(&r, m[0])?, elem(&r, m[1])?, elem(&r, m[2])?, elem(&r, m[3])?)))
                            .collect::<Result<Vec<_>>>()?;
                        GdLoop::new(&r, &gens, false)?
                    }
                };
                Ok(Subject::Construction(Construction::Gd(g)))
            }
            Descriptor::Sd { base, ring, module } => {
                let r = Ring::new(ring.clone())?;
                let base = match base {
                    SdBase::Sl => sl_loop(&r)?,
                    SdBase::Psl => psl_lazy(&r)?,
                    SdBase::Parabolic => parabolic_subloop(&r)?,
                    SdBase::M2 => m2_embedding(&r, seed)?,
                };
                Ok(Subject::Construction(Construction::Sd(Box::new(SdLoop::new(base, *module, seed, exec)?))))
            }
            Descriptor::Catalog { name, q } => Ok(Subject::Construction(catalog(name, *q, seed, exec)?)),
            Descriptor::Wreath(p) => Ok(Subject::Wreath(wreath_make(LoopTable::load(p)?)?)),
            Descriptor::WreathMod { ring, n, group } => {
                let r = Ring::new(ring.clone())?;
                let gens = match group {
                    ModuleGroup::Trivial => Vec::new(),
                    ModuleGroup::All => gl_generators(&r, *n),
                    ModuleGroup::Generated(ms) => ms
                        .iter()
                        .map(|m| {
                            let rows = m
                                .chunks(*n)
                                .map(|row| row.iter().map(|&v| elem(&r, v)).collect::<Result<Vec<_>>>())
                                .collect::<Result<Vec<_>>>()?;
                            Ok(Matrix::from_rows(rows))
                        })
                        .collect::<Result<_>>()?,
                };
                Ok(Subject::Module(wreath_module_make(&r, *n, &gens, allow_failing)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Descriptor {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_round_trips() {
        for s in [
            "paige:q=2",
            "gd:Fp:2,all",
            "gd:Fp:3,[1,1,0,1],[0,1,2,0]",
            "sd:psl,Fp:3,perp",
            "sd:sl,[Fpk:2,2,1,1],perp6",
            "catalog:gl2-semidirect,q=3",
            "wreathmod:Fp:2,2,all",
            "wreathmod:Fp:2,1,[1]",
        ] {
            assert_eq!(parse(s).to_string(), s);
        }
        assert_eq!(parse("gd:F2,all"), parse("gd:Fp:2,all"));
        assert_eq!(parse("paige:3"), Descriptor::Paige { q: 3 });
        assert_eq!(parse("m2.loop"), Descriptor::File(PathBuf::from("m2.loop")));
        assert_eq!(
            parse("wreathmod:F2,3"),
            Descriptor::WreathMod { ring: RingSpec::Prime { p: 2 }, n: 3, group: ModuleGroup::Trivial }
        );
    }

    #[test]
    fn handle_round_trip() {
        let h = LoopHandle { descriptor: parse("catalog:paige-semidirect,q=2"), seed: 5, order: 7680 };
        assert_eq!(h.to_string().parse::<LoopHandle>().unwrap(), h);
        assert!("loop-handle v1\ndescriptor x.loop\nseed 1\norder 2\n".parse::<LoopHandle>().is_err());
        assert!("loop-table v1\n".parse::<LoopHandle>().is_err());
    }

    #[test]
    fn parse_errors() {
        for s in [
            "nosuch:1",
            "gd:F2",
            "gd:F6,all",
            "gd:F2,[1,2]",
            "sd:foo,F2,perp",
            "sd:sl,F2,half",
            "wreathmod:F2,2,[1,0,0]",
            "paige:q=x",
        ] {
            assert!(matches!(s.parse::<Descriptor>(), Err(Error::Parse(_))), "{s}");
        }
    }

    #[test]
    fn builds_expected_orders() {
        let cases = [
            ("paige:q=2", 120),
            ("gd:F2,all", 24),
            ("gd:F3,diag", 36),
            ("gd:F3,[1,1,0,1]", 27),
            ("catalog:gl2-semidirect,2", 24),
            ("wreathmod:F2,2,all", 24),
            ("wreathmod:F7,1,all", 6),
        ];
        for (s, n) in cases {
            let subject = parse(s).build(0, Exec::Auto, false).unwrap();
            assert_eq!(subject.order(Exec::Auto).unwrap(), n, "{s}");
        }
    }

    #[test]
    fn module_rank_three_fails() {
        let err = parse("wreathmod:F2,3").build(0, Exec::Auto, false).unwrap_err();
        assert_eq!(err, Error::TrialityFails { n: 3, index: (1, 2, 3) });
        assert!(err.to_string().starts_with("triality fails at n=3"));
        assert!(parse("wreathmod:F2,3").build(0, Exec::Auto, true).is_ok());
    }

    #[test]
    fn gl_generators_generate() {
        let r = Ring::field(3).unwrap();
        let g = crate::linalg::matrix_group_closure(&r, &gl_generators(&r, 2), 100).unwrap();
        assert_eq!(g.len(), 48);
    }
}
