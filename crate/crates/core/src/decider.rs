//! Unknotting number one for large algebraic knots: slope propagation over
//! the normalized tree, then the EM-knot, EM-tangle and rational
//! replacement checks in that order.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::em::{
    em_match_hole_complement, em_recognize_knot, em_square_form, em_standard_move_slope, EMTangleParams, EmRecognition,
    HoleMatch,
};
use crate::slopes::{
    crossing_move, distance, integral_change_certificate, kohn_palindrome, solve_horizontal_clasp,
    solve_vertical_clasp, ClaspWitness, ExtRational, IntegralChange, KohnForm, Mat2,
};
use crate::tangles::{
    complement, normalize, path_string, type_one_fill, Knot, Norm, Path, RatOrigin, Slot, SquareTangle, TangleError,
    TangleExpr,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("not a large algebraic knot: no essential Conway sphere in the tree")]
    NotLargeAlgebraic,
    #[error(transparent)]
    Tangle(#[from] TangleError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Unknotting behaviour of a tangle. `Unique(u)` means the tangle closes
/// up to the unknot with R(−u) and nothing else.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SlopeResult {
    Rational(ExtRational),
    Unique(ExtRational),
    Absent,
}

/// The set of w with N(T + R(w)) the unknot.
#[derive(Clone, PartialEq, Eq, Debug)]
enum Closing {
    /// {w : Δ(v, −w) = 1}
    Rational(ExtRational),
    Unique(ExtRational),
    Empty,
}

impl Closing {
    fn accepts(&self, w: &ExtRational) -> bool {
        match self {
            Closing::Rational(v) => distance(v, &w.neg()).is_one(),
            Closing::Unique(z) => z == w,
            Closing::Empty => false,
        }
    }
}

/// Closing slope w to unknotting slope u. The whole sign convention lives
/// here.
fn closing_to_slope(w: &ExtRational) -> ExtRational {
    w.neg()
}

fn slope_to_closing(u: &ExtRational) -> ExtRational {
    u.neg()
}

fn to_result(c: Closing) -> SlopeResult {
    match c {
        Closing::Rational(v) => SlopeResult::Rational(v),
        Closing::Unique(w) => SlopeResult::Unique(closing_to_slope(&w)),
        Closing::Empty => SlopeResult::Absent,
    }
}

fn closing_set(n: &Norm) -> Closing {
    match n {
        Norm::Rat { value, .. } => Closing::Rational(value.clone()),
        Norm::Mark { m, inner, .. } => match closing_set(inner) {
            Closing::Rational(v) => Closing::Rational(m.apply(&v)),
            Closing::Unique(w) => Closing::Unique(m.apply(&w.neg()).neg()),
            Closing::Empty => Closing::Empty,
        },
        Norm::Sum { pieces, .. } => sum_closing(pieces),
    }
}

fn sum_closing(pieces: &[Norm]) -> Closing {
    let mut k0 = BigInt::zero();
    let mut q: Vec<ExtRational> = Vec::new();
    let mut infinities = 0usize;
    let mut nr: Vec<ExtRational> = Vec::new();
    for p in pieces {
        let c = match p.as_rational() {
            Some(v) => Closing::Rational(v.clone()),
            None => closing_set(p),
        };
        match c {
            // ∞-like pieces behave as R(∞) in every closure
            Closing::Rational(v) if v.is_infinite() => infinities += 1,
            Closing::Rational(v) => match v.to_integer() {
                Some(k) => k0 += k,
                None => q.push(v),
            },
            Closing::Unique(w) => nr.push(w),
            Closing::Empty => return Closing::Empty,
        }
    }
    let inf = ExtRational::infinity();
    if infinities > 0 {
        // N(A + ∞ + B + R(w)) = D(A)#D(B)#D(R(w))
        return if infinities == 1 && q.is_empty() && nr.iter().all(|w| *w == inf) {
            Closing::Rational(inf)
        } else {
            Closing::Empty
        };
    }
    let k0r = ExtRational::integer(k0.clone());
    match nr.len() {
        0 => match q.len() {
            0 => Closing::Rational(k0r),
            1 => Closing::Rational(q[0].add_int(&k0)),
            2 => match type_one_fill(&q[0], &q[1]) {
                Ok(Some(x)) => Closing::Unique(ExtRational::integer(x - &k0)),
                _ => Closing::Empty,
            },
            _ => Closing::Empty,
        },
        1 => {
            let wa = &nr[0];
            match q.len() {
                0 => Closing::Unique(wa.sub(&k0r)),
                1 => match wa.sub(&q[0]).sub(&k0r) {
                    w if w.is_integer() => Closing::Unique(w),
                    _ => Closing::Empty,
                },
                _ => Closing::Empty,
            }
        }
        _ => {
            if q.is_empty() && nr.iter().all(|w| *w == inf) {
                Closing::Unique(inf)
            } else {
                Closing::Empty
            }
        }
    }
}

pub fn unknotting_slope_norm(n: &Norm) -> SlopeResult {
    to_result(closing_set(n))
}

pub fn unknotting_slope(t: &TangleExpr) -> SlopeResult {
    unknotting_slope_norm(&normalize(t))
}

/// Whether N(t + R(w)) is the unknot.
pub fn is_unknot_closure(t: &TangleExpr, w: &ExtRational) -> bool {
    closing_set(&normalize(t)).accepts(w)
}

/// True when slope `u` (in unknotting-slope terms) unknots `t`.
pub fn unknots_with_slope(t: &TangleExpr, u: &ExtRational) -> bool {
    is_unknot_closure(t, &slope_to_closing(u))
}

fn norm_path_for_site(root: &Norm, site: &[usize]) -> Option<Path> {
    root.paths().into_iter().find(|p| root.at(p).and_then(|n| n.origin()).is_some_and(|o| o.as_slice() == site))
}

/// Unknotting slope of the complement of the node of `k` at input path
/// `site`.
pub fn complement_requirement(k: &Knot, site: &[usize]) -> Result<SlopeResult, DecideError> {
    let root = normalize(&k.root);
    if site.is_empty() {
        return Ok(to_result(closing_set(&Norm::rat(ExtRational::zero()))));
    }
    let p = norm_path_for_site(&root, site).ok_or_else(|| TangleError::BadPath(path_string(site)))?;
    Ok(to_result(closing_set(&complement(&root, &p)?)))
}

fn nontrivial(n: &Norm) -> bool {
    match n.as_rational() {
        Some(v) => !v.is_integer() && !v.is_infinite(),
        None => true,
    }
}

/// Some node and its complement are both non-rational, or some sum has at
/// least four non-integral members counting its complement.
pub fn is_large_algebraic(root: &Norm) -> bool {
    for p in root.paths() {
        let n = root.at(&p).expect("path");
        if p.is_empty() {
            if let Norm::Sum { pieces, .. } = n {
                if pieces.iter().filter(|x| nontrivial(x)).count() >= 4 {
                    return true;
                }
            }
            continue;
        }
        let Ok(c) = complement(root, &p) else { continue };
        if n.as_rational().is_none() && c.as_rational().is_none() {
            return true;
        }
        if let Norm::Sum { pieces, .. } = n {
            let count = pieces.iter().filter(|x| nontrivial(x)).count() + usize::from(nontrivial(&c));
            if count >= 4 {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Square decompositions

/// Two non-integral rationals plus integral twisting.
#[derive(Clone, Debug)]
struct PairCore {
    x: ExtRational,
    y: ExtRational,
    k: BigInt,
    /// Normalized path of the sum holding the pair, when it is a tree node.
    path: Option<Path>,
}

/// Strips marks and integral twisting: node = G·core.
fn peel<'a>(n: &'a Norm, path: &mut Path) -> (Mat2, &'a Norm) {
    let mut g = Mat2::identity();
    let mut cur = n;
    loop {
        match cur {
            Norm::Mark { m, inner, .. } => {
                g = g.compose(m);
                path.push(0);
                cur = inner;
            }
            Norm::Sum { pieces, .. } => {
                let mut shift = BigInt::zero();
                let mut single = None;
                for (i, p) in pieces.iter().enumerate() {
                    match p.as_rational().and_then(|v| v.to_integer()) {
                        Some(k) => shift += k,
                        None if single.is_none() && p.as_rational().is_none() => single = Some(i),
                        None => return (g, cur),
                    }
                }
                let Some(i) = single else { return (g, cur) };
                g = g.compose(&Mat2::shift(&shift));
                path.push(i);
                cur = &pieces[i];
            }
            Norm::Rat { .. } => return (g, cur),
        }
    }
}

fn pair_core(n: &Norm, path: Option<Path>) -> Option<PairCore> {
    let Norm::Sum { pieces, .. } = n else { return None };
    let mut k = BigInt::zero();
    let mut q = Vec::new();
    for p in pieces {
        let v = p.as_rational()?;
        if v.is_infinite() {
            return None;
        }
        match v.to_integer() {
            Some(i) => k += i,
            None => q.push(v.clone()),
        }
    }
    (q.len() == 2).then(|| PairCore { x: q[0].clone(), y: q[1].clone(), k, path })
}

/// For M with M(z) = f + r(εz + k): (f, ε, k).
fn square_marking(m: &Mat2) -> Option<(BigInt, i8, BigInt)> {
    let f = m.apply(&ExtRational::infinity()).to_integer()?;
    let h = Mat2::rot().compose(&Mat2::shift(&-&f)).compose(m);
    if !h.c.is_zero() || !h.a.abs().is_one() || !h.d.abs().is_one() {
        return None;
    }
    let eps: i8 = if h.a == h.d { 1 } else { -1 };
    let k = if h.d.is_positive() { h.b.clone() } else { -h.b.clone() };
    Some((f, eps, k))
}

fn times(eps: i8, x: &ExtRational) -> ExtRational {
    if eps == 1 {
        x.clone()
    } else {
        x.neg()
    }
}

/// N(Y + M·Z) as S(Y; Z').
fn square_of(y: &PairCore, z: &PairCore, m: &Mat2) -> Option<SquareTangle> {
    let (f, eps, k) = square_marking(m)?;
    let zk = if eps == 1 { z.k.clone() } else { -z.k.clone() };
    Some(SquareTangle::filled(
        y.x.add_int(&(&y.k + &f)),
        y.y.clone(),
        times(eps, &z.x).add_int(&(zk + k)),
        times(eps, &z.y),
    ))
}

#[derive(Clone, Debug)]
struct SquareSite {
    node: Path,
    square: SquareTangle,
    /// Normalized path of the pair sum on the first side.
    first_pair: Option<Path>,
}

fn split_pairs(root: &Norm, p: &Path) -> Option<(PairCore, Mat2, PairCore, Mat2)> {
    let x = root.at(p)?;
    let c = complement(root, p).ok()?;
    let mut xp = p.clone();
    let (gx, cx) = peel(x, &mut xp);
    let yx = pair_core(cx, Some(xp))?;
    let (gc, cc) = peel(&c, &mut Vec::new());
    let yc = pair_core(cc, None)?;
    Some((yx, gx, yc, gc))
}

/// Square forms readable off the tree, with the node whose boundary is
/// the essential sphere.
fn square_sites(root: &Norm) -> Vec<SquareSite> {
    let mut out = Vec::new();
    for p in root.paths() {
        if p.is_empty() || matches!(root.at(&p[..p.len() - 1]), Some(Norm::Mark { .. })) {
            continue;
        }
        let Some((yx, gx, yc, gc)) = split_pairs(root, &p) else { continue };
        let tx = crate::tangles::transfer(&gx);
        let tc = crate::tangles::transfer(&gc);
        if let Some(s) = square_of(&yx, &yc, &tx.compose(&gc)) {
            out.push(SquareSite { node: p.clone(), square: s, first_pair: yx.path.clone() });
        }
        if let Some(s) = square_of(&yc, &yx, &tc.compose(&gx)) {
            out.push(SquareSite { node: p.clone(), square: s, first_pair: None });
        }
    }
    out
}

/// Some shift (α+n, β−n) has both entries inside (−1, 1).
fn small_pair(a: &ExtRational, b: &ExtRational) -> bool {
    let Some(fa) = a.floor() else { return false };
    let one = ExtRational::integer(1);
    let inside = |x: &ExtRational| x.abs() < one;
    [-fa.clone(), -fa - 1].iter().any(|n| inside(&a.add_int(n)) && inside(&b.add_int(&-n)))
}

// ---------------------------------------------------------------------------
// Decisions

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Case {
    EMKnot,
    EMTangle,
    RationalReplacement,
}

/// Alternating-diagram data for a rational replacement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DiagramData {
    /// Target 1/0: palindromic expansion of the replaced fraction.
    Vertical(KohnForm),
    /// Target k/1.
    Integral(IntegralChange),
    /// Other targets: the expansion after the change of coordinates.
    Transformed { transform: Mat2, kohn: Option<KohnForm> },
}

impl DiagramData {
    fn to_json(&self) -> Value {
        match self {
            DiagramData::Vertical(k) => json!({"kind": "vertical", "kohn": k}),
            DiagramData::Integral(c) => json!({"kind": "integral", "change": c}),
            DiagramData::Transformed { transform, kohn } => {
                json!({"kind": "transformed", "transform": transform.to_string(), "kohn": kohn})
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub case: Case,
    /// Input-tree path of the site when it has one, else the normalized
    /// path prefixed with `norm:`.
    pub site: String,
    pub norm_site: Path,
    /// Value being replaced, in input coordinates.
    pub replaced: Option<ExtRational>,
    pub replacement: ExtRational,
    pub clasp: Option<ClaspWitness>,
    pub em_knot: Option<EmRecognition>,
    pub em_tangle: Option<HoleMatch>,
    pub diagram: Option<DiagramData>,
    /// The knot after the move; must be the unknot.
    pub replay: Knot,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TraceEntry {
    pub check: Case,
    pub site: String,
    pub reason: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decision {
    pub verdict: bool,
    pub certificate: Option<Certificate>,
    pub trace: Vec<TraceEntry>,
}

impl Decision {
    pub fn to_json(&self, input: &str) -> Value {
        let c = self.certificate.as_ref();
        let em = c.and_then(|c| {
            c.em_knot
                .map(|r| json!({"knot": r.params.to_string(), "mirrored": r.mirrored}))
                .or_else(|| {
                    c.em_tangle.as_ref().map(|h| {
                        json!({"tangle": h.params.to_string(), "mirror": h.mirror, "twist": h.twist.to_string()})
                    })
                })
        });
        json!({
            "schema": 1,
            "input": input,
            "verdict": if self.verdict { "yes" } else { "no" },
            "case": c.map(|c| c.case),
            "site": c.map(|c| c.site.clone()),
            "replaced": c.and_then(|c| c.replaced.as_ref().map(|v| v.to_string())),
            "replacement": c.map(|c| c.replacement.to_string()),
            "clasp": c.and_then(|c| c.clasp.as_ref()).map(|w| json!({
                "r": w.r.to_string(), "s": w.s.to_string(), "sign": w.sign, "k": w.k.to_string(), "kind": w.kind,
            })),
            "em": em,
            "diagram": c.and_then(|c| c.diagram.as_ref()).map(DiagramData::to_json),
            "replay": c.map(|c| c.replay.to_string()),
            "trace": self.trace,
        })
    }
}

fn site_name(root: &Norm, p: &Path) -> String {
    match root.at(p).and_then(|n| n.origin()) {
        Some(o) => path_string(o),
        None => format!("norm:{}", path_string(p)),
    }
}

struct Ctx<'a> {
    expr: &'a TangleExpr,
    root: Norm,
    trace: Vec<TraceEntry>,
}

impl Ctx<'_> {
    fn reject(&mut self, check: Case, p: &Path, reason: impl Into<String>) {
        let site = site_name(&self.root, p);
        self.trace.push(TraceEntry { check, site, reason: reason.into() });
    }
}

/// The move of an EM knot, in the coordinates of its hole: closing the
/// hole's value with the standard move slope.
fn em_knot_certificate(rec: EmRecognition, node: &Path, site: String) -> Result<Certificate, DecideError> {
    let k = rec.params;
    let square = em_square_form(&k).map_err(|e| DecideError::Invariant(e.to_string()))?;
    let (eps, hole) = if k.p == 0 { (1, 2) } else { (2, 1) };
    let t = EMTangleParams::new(eps, k.l, k.m);
    let s = em_standard_move_slope(&t).map_err(|e| DecideError::Invariant(e.to_string()))?;
    let h = square.slots[hole].value().cloned().expect("filled");
    let (h, s) = if rec.mirrored { (h.neg(), s.neg()) } else { (h, s) };
    if !distance(&h, &s.neg()).is_one() {
        return Err(DecideError::Invariant(format!("standard move of {k} does not close the hole")));
    }
    Ok(Certificate {
        case: Case::EMKnot,
        site,
        norm_site: node.clone(),
        replaced: Some(h.clone()),
        replacement: s.clone(),
        clasp: None,
        em_knot: Some(rec),
        em_tangle: None,
        diagram: None,
        replay: Knot::new(TangleExpr::type_three(TangleExpr::Leaf(h), TangleExpr::Leaf(s))),
    })
}

fn check_em_knot(cx: &mut Ctx) -> Result<Option<Certificate>, DecideError> {
    let sites = square_sites(&cx.root);
    if sites.is_empty() {
        cx.reject(Case::EMKnot, &Vec::new(), "no square decomposition");
    }
    let mut seen = Vec::new();
    for s in sites {
        if let Some(rec) = em_recognize_knot(&s.square) {
            let site = site_name(&cx.root, &s.node);
            return em_knot_certificate(rec, &s.node, site).map(Some);
        }
        if !seen.contains(&s.square) {
            cx.reject(Case::EMKnot, &s.node, format!("square {} is not an EM knot", s.square));
            seen.push(s.square);
        }
    }
    Ok(None)
}

/// (partner δ, full pair) when C = R(δ) + R(f) + r(pair) up to marking.
fn hole_complement(c: &Norm) -> Result<(ExtRational, ExtRational, ExtRational), &'static str> {
    let Norm::Sum { pieces, .. } = c else { return Err("complement is not a sum") };
    let mut k = BigInt::zero();
    let mut partner = None;
    let mut other = None;
    for p in pieces {
        match p.as_rational() {
            Some(v) if v.is_infinite() => return Err("complement contains 1/0"),
            Some(v) => match v.to_integer() {
                Some(i) => k += i,
                None if partner.is_none() => partner = Some(v.clone()),
                None => return Err("complement has two rational partners"),
            },
            None if other.is_none() => other = Some(p),
            None => return Err("complement has two non-rational pieces"),
        }
    }
    let (Some(d), Some(t)) = (partner, other) else { return Err("complement lacks a partner or a pair") };
    let (g, core) = peel(t, &mut Vec::new());
    let pc = pair_core(core, None).ok_or("complement's tangle is not a pair")?;
    let (f, eps, kk) = square_marking(&g).ok_or("pair is not in square position")?;
    let zk = if eps == 1 { pc.k.clone() } else { -pc.k };
    let x = times(eps, &pc.x).add_int(&(zk + kk));
    let y = times(eps, &pc.y);
    Ok((d.add_int(&(k + f)), x, y))
}

fn check_em_tangle(cx: &mut Ctx) -> Result<Option<Certificate>, DecideError> {
    for p in cx.root.paths() {
        if p.is_empty() {
            continue;
        }
        let c = complement(&cx.root, &p)?;
        let (d, x, y) = match hole_complement(&c) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let matches = em_match_hole_complement(&x, &y, &d);
        if matches.is_empty() {
            cx.reject(Case::EMTangle, &p, format!("complement R({d}) + r({x}, {y}) is not an EM tangle"));
            continue;
        }
        let node = cx.root.at(&p).expect("path").clone();
        let closing = closing_set(&node);
        for h in matches {
            if closing.accepts(&h.hole_slope) {
                let replaced = node.as_rational().cloned();
                let replay = Knot::new(TangleExpr::type_three(node.to_expr(), TangleExpr::Leaf(h.hole_slope.clone())));
                let site = site_name(&cx.root, &p);
                return Ok(Some(Certificate {
                    case: Case::EMTangle,
                    site,
                    norm_site: p.clone(),
                    replaced,
                    replacement: h.hole_slope.clone(),
                    clasp: None,
                    em_knot: None,
                    em_tangle: Some(h),
                    diagram: None,
                    replay,
                }));
            }
            cx.reject(
                Case::EMTangle,
                &p,
                format!("{} (mirror {}): node does not close with {}", h.params, h.mirror, h.hole_slope),
            );
        }
    }
    Ok(None)
}

/// Pruning: the piece sits in a pair whose opposite pair is
/// small, so no move inside it can unknot.
fn pruned(root: &Norm, sites: &[SquareSite], p: &Path) -> bool {
    let parent = &p[..p.len().saturating_sub(1)];
    sites.iter().any(|s| {
        s.first_pair.as_deref() == Some(parent) && {
            let v = s.square.values().expect("filled");
            small_pair(&v[2], &v[3])
        }
    }) && root.at(parent).is_some()
}

fn replay_norm(root: &Norm, p: &[usize], value: ExtRational) -> Norm {
    fn go(n: &Norm, p: &[usize], value: &ExtRational) -> Norm {
        let Some((&i, rest)) = p.split_first() else { return Norm::rat(value.clone()) };
        match n {
            Norm::Sum { pieces, origin } => {
                let mut pieces = pieces.clone();
                pieces[i] = go(&pieces[i], rest, value);
                Norm::Sum { pieces, origin: origin.clone() }
            }
            Norm::Mark { m, inner, origin } => {
                Norm::Mark { m: m.clone(), inner: Box::new(go(inner, rest, value)), origin: origin.clone() }
            }
            Norm::Rat { .. } => n.clone(),
        }
    }
    go(root, p, &value)
}

/// Clasp witness and diagram for R(v) → R(z).
fn move_data(v: &ExtRational, z: &ExtRational) -> Result<Option<(ClaspWitness, Option<DiagramData>)>, DecideError> {
    let general = crossing_move(v, z);
    let pinned = if z.is_infinite() {
        solve_vertical_clasp(v).map(|w| (w, kohn_palindrome(v).map(DiagramData::Vertical)))
    } else if let Some(k) = z.to_integer() {
        if v.is_integer() || v.is_infinite() {
            general.clone().map(|m| (m.witness, None))
        } else {
            let diagram = integral_change_certificate(v, &k).map_err(|e| DecideError::Invariant(e.to_string()))?;
            solve_horizontal_clasp(v, Some(&k)).map(|w| (w, Some(DiagramData::Integral(diagram))))
        }
    } else {
        general.clone().map(|m| {
            let kohn = kohn_palindrome(&m.transform.apply(v));
            (m.witness, Some(DiagramData::Transformed { transform: m.transform, kohn }))
        })
    };
    if pinned.is_some() != general.is_some() {
        return Err(DecideError::Invariant(format!("clasp solvers disagree on {v} → {z}")));
    }
    Ok(pinned)
}

fn check_rational(cx: &mut Ctx, prune: bool) -> Result<Option<Certificate>, DecideError> {
    let sites = square_sites(&cx.root);
    for p in cx.root.paths() {
        let Some(Norm::Rat { value: v, origin }) = cx.root.at(&p).cloned() else { continue };
        if p.is_empty() {
            continue;
        }
        if prune && pruned(&cx.root, &sites, &p) {
            cx.reject(Case::RationalReplacement, &p, "pruned: opposite pair of the square is small");
            continue;
        }
        let c = complement(&cx.root, &p)?;
        let z = match closing_set(&c) {
            Closing::Unique(z) => z,
            Closing::Rational(_) => {
                cx.reject(Case::RationalReplacement, &p, "complement behaves rationally");
                continue;
            }
            Closing::Empty => {
                cx.reject(Case::RationalReplacement, &p, "complement has no unknotting slope");
                continue;
            }
        };
        if z == v {
            cx.reject(Case::RationalReplacement, &p, "knot is already the unknot");
            continue;
        }
        let Some((clasp, diagram)) = move_data(&v, &z)? else {
            cx.reject(Case::RationalReplacement, &p, format!("no crossing move R({v}) → R({z})"));
            continue;
        };
        let (replaced, replacement, replay) = match &origin {
            RatOrigin::Leaf { path, map } => {
                let back = map.inverse();
                let new = back.apply(&z);
                let tree = cx.expr.replace_at(path, TangleExpr::Leaf(new.clone()))?;
                (back.apply(&v), new, Knot::new(tree))
            }
            _ => (v.clone(), z.clone(), Knot::new(replay_norm(&cx.root, &p, z.clone()).to_expr())),
        };
        let site = site_name(&cx.root, &p);
        return Ok(Some(Certificate {
            case: Case::RationalReplacement,
            site,
            norm_site: p.clone(),
            replaced: Some(replaced),
            replacement,
            clasp: Some(clasp),
            em_knot: None,
            em_tangle: None,
            diagram,
            replay,
        }));
    }
    Ok(None)
}

fn decide_with(k: &Knot, prune: bool) -> Result<Decision, DecideError> {
    let root = normalize(&k.root);
    if !is_large_algebraic(&root) {
        return Err(DecideError::NotLargeAlgebraic);
    }
    let mut cx = Ctx { expr: &k.root, root, trace: Vec::new() };
    let mut cert = check_em_knot(&mut cx)?;
    if cert.is_none() {
        cert = check_em_tangle(&mut cx)?;
    }
    if cert.is_none() {
        cert = check_rational(&mut cx, prune)?;
    }
    Ok(Decision { verdict: cert.is_some(), certificate: cert, trace: cx.trace })
}

pub fn decide_u1(k: &Knot) -> Result<Decision, DecideError> {
    decide_with(k, true)
}

/// Certificates from the rational replacement check with pruning off.
pub fn rational_replacement_unpruned(k: &Knot) -> Result<Option<Certificate>, DecideError> {
    let root = normalize(&k.root);
    let mut cx = Ctx { expr: &k.root, root, trace: Vec::new() };
    check_rational(&mut cx, false)
}

/// Whether the normalized site of a certificate lies in the second pair
/// of a square form whose first pair is small.
pub fn certificate_in_small_square_pair(k: &Knot, c: &Certificate) -> bool {
    let root = normalize(&k.root);
    let sites = square_sites(&root);
    c.case == Case::RationalReplacement && pruned(&root, &sites, &c.norm_site)
}

/// Filled square with one slot replaced by a hole.
pub fn with_hole(s: &SquareTangle, i: usize) -> SquareTangle {
    let mut t = s.clone();
    t.slots[i] = Slot::Hole;
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse;
    use crate::slopes::q;

    #[test]
    fn slope_examples() {
        assert_eq!(unknotting_slope(&TangleExpr::Leaf(q(3, 5))), SlopeResult::Rational(q(3, 5)));
        let t1 = TangleExpr::type_one(q(-1, 3), q(-3, 2)).unwrap();
        assert_eq!(unknotting_slope(&t1), SlopeResult::Unique(q(-2, 1)));
        let t2 = TangleExpr::type_two(q(1, 2), t1).unwrap();
        assert_eq!(unknotting_slope(&t2), SlopeResult::Absent);
    }

    #[test]
    fn closure_examples() {
        assert!(is_unknot_closure(&TangleExpr::Leaf(q(2, 3)), &q(-1, 2)));
        assert!(is_unknot_closure(&TangleExpr::type_one(q(1, 2), q(1, 3)).unwrap(), &q(-1, 1)));
        let both = TangleExpr::type_three(
            TangleExpr::type_one(q(1, 2), q(1, 3)).unwrap(),
            TangleExpr::type_one(q(1, 2), q(-1, 3)).unwrap(),
        );
        assert!(!is_unknot_closure(&both, &q(1, 2)));
    }

    #[test]
    fn dot_words_decide() {
        let d = decide_u1(&parse(".2.2").unwrap()).unwrap();
        assert!(d.verdict);
        let c = d.certificate.unwrap();
        assert_eq!(c.case, Case::EMKnot);
        assert_eq!(c.em_knot.unwrap().params, crate::em::EMKnotParams::new(3, 2, 0, 1));
        assert!(!decide_u1(&parse("(3,2)1(3,2)").unwrap()).unwrap().verdict);
        let d = decide_u1(&parse(".2.(-(3,2))").unwrap()).unwrap();
        assert!(d.verdict);
        assert_eq!(d.certificate.unwrap().case, Case::RationalReplacement);
    }

    #[test]
    fn small_montesinos_rejected() {
        let k = Knot::new(TangleExpr::type_three(
            TangleExpr::type_one(q(1, 3), q(1, 3)).unwrap(),
            TangleExpr::Leaf(q(1, 3)),
        ));
        assert_eq!(decide_u1(&k), Err(DecideError::NotLargeAlgebraic));
    }

    #[test]
    fn small_pairs() {
        assert!(small_pair(&q(1, 2), &q(1, 3)));
        assert!(small_pair(&q(3, 2), &q(-2, 3)));
        assert!(!small_pair(&q(5, 3), &q(2, 3)));
    }
}
