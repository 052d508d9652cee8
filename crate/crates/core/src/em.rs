//! The EM knots K(ℓ,m,n,p) and tangles A_ε(ℓ,m): parameter
//! validation, square and dot coordinates, crossing numbers, enumeration of
//! the small ones, and recognition from square data.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::notation::{dot_word_display, dot_word_normalize, parse_conway, ConwayWord, DotNormal};
use crate::slopes::{cf_eval, cf_reduce_zeros, ContinuedFraction, ExtRational};
use crate::tangles::{pair_invariant, square_normalize, NormalSquare, Slot, SquareTangle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmError {
    #[error("invalid parameters: violates {0}")]
    Invalid(&'static str),
    #[error("ℓ must exceed 1; mirror the parameters first")]
    NeedPositiveEll,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, PartialOrd, Ord)]
pub struct EMKnotParams {
    pub l: i64,
    pub m: i64,
    pub n: i64,
    pub p: i64,
}

impl EMKnotParams {
    pub const fn new(l: i64, m: i64, n: i64, p: i64) -> Self {
        EMKnotParams { l, m, n, p }
    }
}

impl fmt::Display for EMKnotParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({},{},{},{})", self.l, self.m, self.n, self.p)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, PartialOrd, Ord)]
pub struct EMTangleParams {
    pub eps: u8,
    pub l: i64,
    pub m: i64,
}

impl EMTangleParams {
    pub const fn new(eps: u8, l: i64, m: i64) -> Self {
        EMTangleParams { eps, l, m }
    }
}

impl fmt::Display for EMTangleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A_{}({},{})", self.eps, self.l, self.m)
    }
}

pub fn em_validate(k: &EMKnotParams) -> Result<(), EmError> {
    let EMKnotParams { l, m, n, p } = *k;
    if n != 0 && p != 0 {
        return Err(EmError::Invalid("one of n, p is 0"));
    }
    if l.abs() <= 1 {
        return Err(EmError::Invalid("|ℓ| > 1"));
    }
    if p == 0 {
        if m == 0 {
            return Err(EmError::Invalid("m ≠ 0 when p = 0"));
        }
        if (l, m) == (2, 1) || (l, m) == (-2, -1) {
            return Err(EmError::Invalid("(ℓ,m) ≠ (2,1), (−2,−1) when p = 0"));
        }
        if (m, n) == (1, 0) || (m, n) == (-1, 1) {
            return Err(EmError::Invalid("(m,n) ≠ (1,0), (−1,1) when p = 0"));
        }
    }
    if n == 0 {
        if m == 0 || m == 1 {
            return Err(EmError::Invalid("m ≠ 0, 1 when n = 0"));
        }
        if (l, m, p) == (-2, -1, 0) || (l, m, p) == (2, 2, 1) {
            return Err(EmError::Invalid("(ℓ,m,p) ≠ (−2,−1,0), (2,2,1) when n = 0"));
        }
    }
    Ok(())
}

pub fn em_tangle_validate(t: &EMTangleParams) -> Result<(), EmError> {
    let EMTangleParams { eps, l, m } = *t;
    if l.abs() <= 1 {
        return Err(EmError::Invalid("|ℓ| > 1"));
    }
    match eps {
        1 if m == 0 => Err(EmError::Invalid("m ≠ 0 for ε = 1")),
        1 if (l, m) == (2, 1) || (l, m) == (-2, -1) => Err(EmError::Invalid("(ℓ,m) ∉ {(2,1),(−2,−1)} for ε = 1")),
        1 => Ok(()),
        2 if m == 0 || m == 1 => Err(EmError::Invalid("m ∉ {0,1} for ε = 2")),
        2 => Ok(()),
        _ => Err(EmError::Invalid("ε ∈ {1,2}")),
    }
}

fn frac(num: i64, den: i64) -> Result<ExtRational, EmError> {
    ExtRational::new(num, den).map_err(|_| EmError::Invalid("non-degenerate slot"))
}

fn half() -> ExtRational {
    ExtRational::new(-1, 2).expect("nonzero")
}

pub fn em_square_form(k: &EMKnotParams) -> Result<SquareTangle, EmError> {
    em_validate(k)?;
    let EMKnotParams { l, m, n, p } = *k;
    if p == 0 {
        Ok(SquareTangle::filled(
            frac(-1, l)?,
            frac(m, l * m - 1)?,
            frac(2 * m * n + 1 - m - n, 4 * m * n - 2 * m + 1)?,
            half(),
        ))
    } else {
        let t = 2 * m * p - m - p;
        Ok(SquareTangle::filled(frac(-1, l)?, frac(t, l * t - 2 * p + 1)?, frac(m - 1, 2 * m - 1)?, half()))
    }
}

/// S(α,β;*,δ) for ε = 1, S(α,*;γ,δ) for ε = 2.
pub fn em_tangle_square_form(t: &EMTangleParams) -> Result<SquareTangle, EmError> {
    em_tangle_validate(t)?;
    let EMTangleParams { eps, l, m } = *t;
    let alpha = Slot::Value(frac(-1, l)?);
    let delta = Slot::Value(half());
    Ok(if eps == 1 {
        SquareTangle { slots: [alpha, Slot::Value(frac(m, l * m - 1)?), Slot::Hole, delta] }
    } else {
        SquareTangle { slots: [alpha, Slot::Hole, Slot::Value(frac(m - 1, 2 * m - 1)?), delta] }
    })
}

/// The slope the standard crossing move leaves in the hole's complement:
/// (1−2m)/(4m) for ε = 1 and (2m−1)/(ℓ(1−2m)+2) for ε = 2.
pub fn em_standard_move_slope(t: &EMTangleParams) -> Result<ExtRational, EmError> {
    em_tangle_validate(t)?;
    let EMTangleParams { eps, l, m } = *t;
    if eps == 1 {
        frac(1 - 2 * m, 4 * m)
    } else {
        frac(2 * m - 1, l * (1 - 2 * m) + 2)
    }
}

/// Non-negative words for a, b, c (before zero reduction).
pub fn table_words(k: &EMKnotParams) -> Result<[Vec<i64>; 3], EmError> {
    em_validate(k)?;
    let EMKnotParams { l, m, n, p } = *k;
    if l <= 1 {
        return Err(EmError::NeedPositiveEll);
    }
    let c = vec![l - 1];
    let (a, b) = if n == 0 && p == 0 {
        if m > 0 {
            (vec![m - 1, 1, l - 2, 0], vec![m - 1, 1])
        } else {
            (vec![m.abs(), l - 1, 0], vec![m.abs(), 1, 0])
        }
    } else if n == 0 {
        match (m > 0, p > 0) {
            (true, true) => (vec![p - 1, 2, m - 2, 1, l - 2, 0], vec![m - 1, 1]),
            (true, false) => (vec![p.abs(), 1, 1, m - 2, 1, l - 2, 0], vec![m - 1, 1]),
            (false, true) => (vec![p - 1, 1, 1, m.abs(), l - 1, 0], vec![m.abs(), 1, 0]),
            (false, false) => (vec![p.abs(), 2, m.abs(), l - 1, 0], vec![m.abs(), 1, 0]),
        }
    } else {
        match (m > 0, n > 0) {
            (true, true) => (vec![m - 1, 1, l - 2, 0], vec![n - 1, 1, 1, m - 1, 1]),
            (true, false) => (vec![m - 1, 1, l - 2, 0], vec![n.abs(), 2, m - 1, 1]),
            (false, true) => (vec![m.abs(), l - 1, 0], vec![n - 1, 2, m.abs() - 1, 1, 0]),
            (false, false) => (vec![m.abs(), l - 1, 0], vec![n.abs(), 1, 1, m.abs() - 1, 1, 0]),
        }
    };
    Ok([a, b, c])
}

/// (a,b,c) with K(ℓ,m,n,p) = .a.b.c, all positive.
pub fn em_abc_form(k: &EMKnotParams) -> Result<[ExtRational; 3], EmError> {
    em_validate(k)?;
    let EMKnotParams { l, m, n, p } = *k;
    if l <= 1 {
        return Err(EmError::NeedPositiveEll);
    }
    let c = ExtRational::integer(l - 1);
    if p == 0 {
        Ok([frac(m, (l - 1) * m - 1)?, frac(2 * m * n - m + n, 2 * m * n - m - n + 1)?, c])
    } else {
        let t = 2 * m * p - m - p;
        Ok([frac(t, (l - 1) * t - 2 * p + 1)?, frac(m, m - 1)?, c])
    }
}

fn reduced(w: &[i64]) -> ContinuedFraction {
    cf_reduce_zeros(&ContinuedFraction::from_i64s(w))
}

/// Values of the reduced table words.
pub fn table_word_values(k: &EMKnotParams) -> Result<[ExtRational; 3], EmError> {
    let words = table_words(k)?;
    Ok(words.map(|w| cf_eval(&reduced(&w))))
}

pub fn em_crossing_number(k: &EMKnotParams) -> Result<u64, EmError> {
    let words = table_words(k)?;
    let total: BigInt = words.iter().map(|w| reduced(w).entry_sum()).sum();
    Ok(3 + total.to_u64().expect("non-negative entries"))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EmCatalogEntry {
    pub params: EMKnotParams,
    pub abc: [ExtRational; 3],
    /// Shortest dot word in the symmetry orbit of `.a.b.c`.
    pub dot_word: String,
    /// Sign relating `dot_word` to `.a.b.c`.
    pub dot_sign: i8,
    pub crossing_number: u64,
    pub square: SquareTangle,
    pub normal: NormalSquare,
}

impl EmCatalogEntry {
    pub fn dot_entries(&self) -> [ExtRational; 4] {
        let [a, b, c] = self.abc.clone();
        [a, b, c, ExtRational::integer(1)]
    }
}

fn catalog_entry(k: EMKnotParams) -> Result<EmCatalogEntry, EmError> {
    let abc = em_abc_form(&k)?;
    let square = em_square_form(&k)?;
    let normal = square_normalize(&square).map_err(|_| EmError::Invalid("non-integral slots"))?;
    let [a, b, c] = abc.clone();
    let (dot_word, dot_sign) = dot_word_display(&[a, b, c, ExtRational::integer(1)]);
    Ok(EmCatalogEntry {
        params: k,
        dot_word,
        dot_sign,
        abc,
        crossing_number: em_crossing_number(&k)?,
        square,
        normal,
    })
}

fn tabulated(k: &EMKnotParams) -> bool {
    TABLE_EM11.iter().any(|row| row.3 == *k)
}

/// Valid K(ℓ,m,n,p) with ℓ > 1 and crossing number ≤ `max`, one per
/// square normal form (mirrors identified), ordered by (crossings, ℓ, m,
/// n, p). Tabulated parameters represent their normal form.
pub fn em_enumerate(max_crossings: u64) -> Vec<EmCatalogEntry> {
    let bound = max_crossings as i64;
    let mut found = Vec::new();
    for l in 2..=bound.max(2) {
        for m in -bound..=bound {
            for n in -bound..=bound {
                for p in -bound..=bound {
                    let k = EMKnotParams::new(l, m, n, p);
                    if em_validate(&k).is_err() {
                        continue;
                    }
                    let Ok(cr) = em_crossing_number(&k) else { continue };
                    if cr <= max_crossings {
                        found.push((cr, !tabulated(&k), k));
                    }
                }
            }
        }
    }
    found.sort();
    let mut out: Vec<EmCatalogEntry> = Vec::new();
    for (_, _, k) in found {
        let Ok(e) = catalog_entry(k) else { continue };
        if !out.iter().any(|o| o.normal.form == e.normal.form) {
            out.push(e);
        }
    }
    out
}

/// Rows of the 11-crossing EM table: name, dot word, sign, parameters,
/// crossing number.
pub const TABLE_EM11: [(&str, &str, i8, EMKnotParams, u64); 14] = [
    ("8_17", ".2.2", 1, EMKnotParams::new(3, 2, 0, 1), 8),
    ("9_33", ".21.2", -1, EMKnotParams::new(2, 3, 0, 1), 9),
    ("10_82", ".4.2", 1, EMKnotParams::new(2, 2, 0, 2), 10),
    ("10_84", ".22.2", 1, EMKnotParams::new(2, 2, 0, -1), 10),
    ("10_88", ".21.21", 1, EMKnotParams::new(2, 3, 0, 0), 10),
    ("10_91", ".3.2.20", -1, EMKnotParams::new(4, 1, 1, 0), 10),
    ("10_95", ".210.2.2", 1, EMKnotParams::new(3, 2, 0, 0), 10),
    ("", ".311.2", -1, EMKnotParams::new(2, 2, -1, 0), 11),
    ("", ".23.2", 1, EMKnotParams::new(2, 2, 0, 3), 11),
    ("", ".212.2", 1, EMKnotParams::new(2, 2, 0, -2), 11),
    ("", ".2111.2", -1, EMKnotParams::new(2, 2, 2, 0), 11),
    ("", ".31.21", -1, EMKnotParams::new(2, -3, 1, 0), 11),
    ("", ".22.2.20", -1, EMKnotParams::new(3, -2, 1, 0), 11),
    ("", ".210.21.2", 1, EMKnotParams::new(3, 2, 1, 0), 11),
];

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TableMatch {
    pub name: &'static str,
    pub word: &'static str,
    pub sign: i8,
    pub params: EMKnotParams,
    pub crossing_number: u64,
    /// The enumerated knot with the same square normal form.
    pub entry: Option<EmCatalogEntry>,
    /// Dot normal forms of the table word and of `.a.b.c` agree.
    pub dot_agrees: bool,
    /// The signs relating both words to their common normal form multiply
    /// to the listed sign.
    pub sign_agrees: bool,
}

pub fn dot_entries_of_word(word: &str) -> Option<[ExtRational; 4]> {
    match parse_conway(word) {
        Ok(ConwayWord::Dot(e)) => Some(e),
        _ => None,
    }
}

/// Matches each table row against `em_enumerate(11)`.
pub fn em_table_em11() -> Vec<TableMatch> {
    let catalog = em_enumerate(11);
    TABLE_EM11
        .iter()
        .map(|&(name, word, sign, params, crossing_number)| {
            let square = em_square_form(&params).and_then(|s| {
                square_normalize(&s).map_err(|_| EmError::Invalid("non-integral slots"))
            });
            let entry = square.ok().and_then(|n| catalog.iter().find(|e| e.normal.form == n.form).cloned());
            let table_dot: Option<DotNormal> = dot_entries_of_word(word).map(|e| dot_word_normalize(&e));
            let abc_dot = em_abc_form(&params).ok().map(|[a, b, c]| dot_word_normalize(&[a, b, c, ExtRational::integer(1)]));
            let (dot_agrees, sign_agrees) = match (table_dot, abc_dot) {
                (Some(x), Some(y)) => (x.entries == y.entries, x.sign * y.sign == sign),
                _ => (false, false),
            };
            TableMatch { name, word, sign, params, crossing_number, entry, dot_agrees, sign_agrees }
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct EmRecognition {
    pub params: EMKnotParams,
    /// The square is the mirror image of K(params).
    pub mirrored: bool,
}

fn small(x: &BigInt) -> Option<i64> {
    x.to_i64().filter(|v| v.abs() < 1 << 20)
}

fn exact_div(a: i64, b: i64) -> Option<i64> {
    (b != 0 && a % b == 0).then(|| a / b)
}

/// Parameters whose square form might normalize to a square with these
/// slot denominators, in slot order (α,β,γ,δ).
fn knot_candidates(dens: [i64; 4]) -> Vec<EMKnotParams> {
    let [da, db, dc, dd] = dens;
    let mut out = Vec::new();
    if dd != 2 {
        return out;
    }
    for l in [da, -da] {
        // p = 0: |β| denominator |ℓm−1|, γ denominator |4mn−2m+1|
        for sb in [1, -1] {
            if let Some(m) = exact_div(1 + sb * db, l) {
                for sc in [1, -1] {
                    if 4 * m != 0 {
                        if let Some(n) = exact_div(sc * dc + 2 * m - 1, 4 * m) {
                            out.push(EMKnotParams::new(l, m, n, 0));
                        }
                    }
                }
            }
        }
        // n = 0: γ denominator |2m−1|, β denominator |p(2ℓm−ℓ−2) − ℓm + 1|
        for sc in [1, -1] {
            if let Some(m) = exact_div(1 + sc * dc, 2) {
                let div = 2 * l * m - l - 2;
                if div == 0 {
                    out.extend([0, 1, -1].map(|p| EMKnotParams::new(l, m, 0, p)));
                }
                for sb in [1, -1] {
                    if let Some(p) = exact_div(sb * db + l * m - 1, div) {
                        out.push(EMKnotParams::new(l, m, 0, p));
                    }
                }
            }
        }
    }
    out
}

/// Some K(ℓ,m,n,p) whose square form normalizes to that of `s`, if any.
pub fn em_recognize_knot(s: &SquareTangle) -> Option<EmRecognition> {
    let v = s.values()?;
    let target = square_normalize(s).ok()?;
    // the pairs of an EM square have distinct denominators
    if v[0].den() == v[1].den() || v[2].den() == v[3].den() {
        return None;
    }
    if !crate::tangles::has_small_shape(s) {
        return None;
    }
    let d: Vec<i64> = v.iter().map(|x| small(x.den())).collect::<Option<_>>()?;
    let mut cands = Vec::new();
    for (p1, p2) in [((0, 1), (2, 3)), ((2, 3), (0, 1))] {
        for (a, b) in [p1, (p1.1, p1.0)] {
            for (c, e) in [p2, (p2.1, p2.0)] {
                cands.extend(knot_candidates([d[a], d[b], d[c], d[e]]));
            }
        }
    }
    cands.sort_by_key(|k| (!tabulated(k), k.l < 0, k.l.abs(), k.m.abs() + k.n.abs() + k.p.abs(), *k));
    cands.dedup();
    cands.into_iter().find_map(|k| {
        let n = square_normalize(&em_square_form(&k).ok()?).ok()?;
        (n.form == target.form).then_some(EmRecognition { params: k, mirrored: n.mirrored != target.mirrored })
    })
}

/// A match of a hole's complement R(d) + r(M(x,y)) with μ·(complement of
/// the hole of A_ε(ℓ,m)) up to an integral twist n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HoleMatch {
    pub params: EMTangleParams,
    pub mirror: i8,
    /// d − μ·(canonical partner)
    pub twist: BigInt,
    /// The standard move slope, in the coordinates of the given hole.
    pub hole_slope: ExtRational,
}

fn tangle_candidates(full: (&ExtRational, &ExtRational), partner: &ExtRational) -> Vec<EMTangleParams> {
    let mut out = Vec::new();
    let (Some(dx), Some(dy)) = (small(full.0.den()), small(full.1.den())) else { return out };
    for (da, db) in [(dx, dy), (dy, dx)] {
        for l in [da, -da] {
            for sb in [1, -1] {
                if let Some(m) = exact_div(1 + sb * db, l) {
                    out.push(EMTangleParams::new(1, l, m));
                }
            }
        }
        if db == 2 {
            if let Some(dp) = small(partner.den()) {
                for sc in [1, -1] {
                    if let Some(m) = exact_div(1 + sc * da, 2) {
                        out.extend([dp, -dp].map(|l| EMTangleParams::new(2, l, m)));
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Canonical (full pair, partner) of the complement of the hole of A_ε.
fn canonical_complement(t: &EMTangleParams) -> Result<((ExtRational, ExtRational), ExtRational), EmError> {
    em_tangle_validate(t)?;
    let EMTangleParams { eps, l, m } = *t;
    Ok(if eps == 1 {
        ((frac(-1, l)?, frac(m, l * m - 1)?), half())
    } else {
        ((frac(m - 1, 2 * m - 1)?, half()), frac(-1, l)?)
    })
}

/// All EM-tangle structures on a hole whose complement is R(d) + r(M(x,y)).
pub fn em_match_hole_complement(x: &ExtRational, y: &ExtRational, d: &ExtRational) -> Vec<HoleMatch> {
    let Ok(target) = pair_invariant(x, y) else { return Vec::new() };
    if d.is_infinite() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for t in tangle_candidates((x, y), d) {
        let Ok(((fa, fb), partner)) = canonical_complement(&t) else { continue };
        for mu in [1i8, -1] {
            let (ma, mb, mp) = if mu == 1 { (fa.clone(), fb.clone(), partner.clone()) } else { (fa.neg(), fb.neg(), partner.neg()) };
            if pair_invariant(&ma, &mb).ok() != Some(target.clone()) {
                continue;
            }
            let Some(twist) = d.sub(&mp).to_integer() else { continue };
            let s = em_standard_move_slope(&t).expect("validated");
            let s = if mu == 1 { s } else { s.neg() };
            out.push(HoleMatch { params: t, mirror: mu, hole_slope: s.add_int(&twist), twist });
        }
    }
    out
}

/// EM-tangle structures on a square with one hole.
pub fn em_recognize_tangle(s: &SquareTangle) -> Vec<HoleMatch> {
    let hole = s.slots.iter().position(|x| *x == Slot::Hole);
    let Some(h) = hole else { return Vec::new() };
    if s.hole_count() != 1 {
        return Vec::new();
    }
    let partner = s.slots[h ^ 1].value().cloned();
    let other = if h < 2 { (2, 3) } else { (0, 1) };
    let (Some(d), Some(x), Some(y)) = (partner, s.slots[other.0].value(), s.slots[other.1].value()) else {
        return Vec::new();
    };
    em_match_hole_complement(x, y, &d)
}
