//! Extended rationals, Conway continued fractions, slope distance and the
//! clasp solvers that decide when a rational tangle is one crossing move
//! away from another.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlopeError {
    #[error("0/0 is not a slope")]
    Indeterminate,
    #[error("expected a positive finite value, got {0}")]
    NotPositive(ExtRational),
    #[error("expected a non-integral value, got {0}")]
    Integral(ExtRational),
    #[error("cannot parse `{0}` as a rational")]
    Syntax(String),
}

/// An element of Q ∪ {1/0}. The sign lives in the numerator and there is a
/// single infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtRational {
    num: BigInt,
    den: BigInt,
}

/// Shorthand used all over the tests and examples. Panics on 0/0.
pub fn q(num: i64, den: i64) -> ExtRational {
    ExtRational::new(num, den).expect("0/0")
}

impl ExtRational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, SlopeError> {
        let (mut num, mut den) = (num.into(), den.into());
        if num.is_zero() && den.is_zero() {
            return Err(SlopeError::Indeterminate);
        }
        if den.is_zero() {
            return Ok(Self::infinity());
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Ok(ExtRational { num, den })
    }

    pub fn integer(k: impl Into<BigInt>) -> Self {
        ExtRational { num: k.into(), den: BigInt::one() }
    }

    pub fn infinity() -> Self {
        ExtRational { num: BigInt::one(), den: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.num.clone())
    }

    pub fn is_negative(&self) -> bool {
        !self.is_infinite() && self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_infinite() && self.num.is_positive()
    }

    pub fn neg(&self) -> Self {
        if self.is_infinite() {
            return self.clone();
        }
        ExtRational { num: -&self.num, den: self.den.clone() }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() { self.neg() } else { self.clone() }
    }

    pub fn recip(&self) -> Self {
        ExtRational::new(self.den.clone(), self.num.clone()).expect("normalized value")
    }

    /// Sum; anything plus 1/0 is 1/0.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_infinite() || other.is_infinite() {
            return Self::infinity();
        }
        ExtRational::new(&self.num * &other.den + &other.num * &self.den, &self.den * &other.den)
            .expect("finite sum")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        if self.is_infinite() {
            return self.clone();
        }
        ExtRational { num: &self.num + k * &self.den, den: self.den.clone() }
    }

    /// Floor of a finite value.
    pub fn floor(&self) -> Option<BigInt> {
        (!self.is_infinite()).then(|| self.num.div_floor(&self.den))
    }

    /// The representative of `self` mod 1 in [0, 1).
    pub fn frac(&self) -> Option<Self> {
        let f = self.floor()?;
        Some(self.add_int(&-f))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        self.num.to_f64().unwrap_or(f64::NAN) / self.den.to_f64().unwrap_or(f64::NAN)
    }
}

impl Ord for ExtRational {
    /// Finite values by size; 1/0 sits above everything.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub(crate) fn parse_bigint(text: &str) -> Option<BigInt> {
    let t = text.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if let Some(rest) = t.strip_prefix('-').or_else(|| t.strip_prefix('\u{2212}')) {
        if rest.starts_with(['-', '+']) {
            return None;
        }
        return rest.parse::<BigInt>().ok().map(|v| -v);
    }
    t.parse::<BigInt>().ok()
}

impl FromStr for ExtRational {
    type Err = SlopeError;

    /// Accepts `k`, `p/q` and `1/0`; `−` is accepted as a minus sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SlopeError::Syntax(s.to_string());
        match s.split_once('/') {
            None => parse_bigint(s).map(ExtRational::integer).ok_or_else(bad),
            Some((p, d)) => {
                let p = parse_bigint(p).ok_or_else(bad)?;
                let d = parse_bigint(d).ok_or_else(bad)?;
                ExtRational::new(p, d)
            }
        }
    }
}

/// |p₁q₂ − p₂q₁|.
pub fn distance(a: &ExtRational, b: &ExtRational) -> BigInt {
    (&a.num * &b.den - &b.num * &a.den).abs()
}

/// An integer 2×2 matrix acting on slopes by p/q ↦ (ap + bq)/(cp + dq).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// x ↦ x + k
    pub fn shift(k: &BigInt) -> Self {
        Mat2 { a: BigInt::one(), b: k.clone(), c: BigInt::zero(), d: BigInt::one() }
    }

    /// x ↦ −1/x
    pub fn rot() -> Self {
        Self::new(0, -1, 1, 0)
    }

    /// x ↦ −x
    pub fn mirror() -> Self {
        Self::new(-1, 0, 0, 1)
    }

    /// x ↦ 1/x
    pub fn recip() -> Self {
        Self::new(0, 1, 1, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_identity_action(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        ExtRational::new(&self.a * &x.num + &self.b * &x.den, &self.c * &x.num + &self.d * &x.den)
            .expect("unimodular action on a normalized slope")
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    /// Inverse of a determinant ±1 matrix.
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        debug_assert!(det.abs().is_one());
        Mat2 {
            a: &det * &self.d,
            b: -&det * &self.b,
            c: -&det * &self.c,
            d: &det * &self.a,
        }
    }

    /// A determinant 1 matrix sending `z` to 1/0.
    pub fn sending_to_infinity(z: &ExtRational) -> Mat2 {
        if z.is_infinite() {
            return Mat2::identity();
        }
        let (a, b) = (z.num.clone(), z.den.clone());
        // solve a·d − b·c = 1
        let e = a.extended_gcd(&b);
        let (d, c) = if e.gcd.is_one() { (e.x, -e.y) } else { (-e.x, e.y) };
        Mat2 { a: d, b: -c, c: -b, d: a }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// a₁ … aₙ in Conway order: the value is aₙ + 1/(aₙ₋₁ + … + 1/a₁).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ContinuedFraction {
    pub entries: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn new(entries: Vec<BigInt>) -> Self {
        ContinuedFraction { entries }
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        ContinuedFraction { entries: entries.iter().map(|&e| BigInt::from(e)).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn negated(&self) -> Self {
        ContinuedFraction { entries: self.entries.iter().map(|e| -e).collect() }
    }

    pub fn entry_sum(&self) -> BigInt {
        self.entries.iter().sum()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|e| e.to_string()))
    }
}

/// Evaluates x ↦ a + 1/x entry by entry, starting from 1/0.
pub fn cf_eval(w: &ContinuedFraction) -> ExtRational {
    let (mut num, mut den) = (BigInt::one(), BigInt::zero());
    for a in &w.entries {
        let next = a * &num + &den;
        den = num;
        num = next;
    }
    ExtRational::new(num, den).expect("unimodular recursion never reaches 0/0")
}

/// Non-negative expansion with a₁ > 1 (unless x = 1) and a trailing 0
/// exactly when x < 1.
pub fn cf_canonical_positive(x: &ExtRational) -> Result<ContinuedFraction, SlopeError> {
    if !x.is_positive() {
        return Err(SlopeError::NotPositive(x.clone()));
    }
    // ordinary Euclidean expansion, outermost quotient first
    let (mut p, mut d) = (x.num.clone(), x.den.clone());
    let mut regular = Vec::new();
    while !d.is_zero() {
        let (quo, rem) = p.div_rem(&d);
        regular.push(quo);
        p = d;
        d = rem;
    }
    regular.reverse();
    Ok(ContinuedFraction::new(regular))
}

/// Removes interior zeros: [0,a,b,…] → [b,…] and […,a,0,b,…] → […,a+b,…].
pub fn cf_reduce_zeros(w: &ContinuedFraction) -> ContinuedFraction {
    let mut e = w.entries.clone();
    loop {
        if e.len() >= 3 && e[0].is_zero() {
            e.drain(0..2);
            continue;
        }
        let interior = (1..e.len().saturating_sub(1)).find(|&i| e[i].is_zero());
        match interior {
            Some(i) => {
                let merged = &e[i - 1] + &e[i + 1];
                e.splice(i - 1..i + 2, [merged]);
            }
            None => break,
        }
    }
    ContinuedFraction::new(e)
}

/// Crossings in the alternating diagram from the canonical positive
/// expansion of |x|. R(0) and R(1/0) have none.
pub fn tangle_crossing_count(x: &ExtRational) -> BigInt {
    if x.is_zero() || x.is_infinite() {
        return BigInt::zero();
    }
    cf_canonical_positive(&x.abs()).expect("positive").entry_sum()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaspKind {
    /// x = (2rs+sign)/(2s²)
    Vertical,
    /// x = k + 2s²/(2rs+sign)
    Horizontal,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ClaspWitness {
    pub kind: ClaspKind,
    pub r: BigInt,
    pub s: BigInt,
    pub sign: i8,
    pub k: BigInt,
}

impl ClaspWitness {
    pub fn vertical_value(&self) -> ExtRational {
        let two_s2 = BigInt::from(2) * &self.s * &self.s;
        ExtRational::new(BigInt::from(2) * &self.r * &self.s + self.sign, two_s2).expect("s ≥ 1")
    }

    /// The fraction this witness was solved from.
    pub fn value(&self) -> ExtRational {
        match self.kind {
            ClaspKind::Vertical => self.vertical_value(),
            ClaspKind::Horizontal => self.vertical_value().recip().add_int(&self.k),
        }
    }
}

impl Serialize for ClaspWitness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ClaspWitness", 5)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("r", &self.r.to_string())?;
        st.serialize_field("s", &self.s.to_string())?;
        st.serialize_field("sign", &self.sign)?;
        st.serialize_field("k", &self.k.to_string())?;
        st.end()
    }
}

/// Returns (r, s, sign) with x = (2rs+sign)/(2s²), gcd(r,s)=1, s ≥ 1.
///
/// The fraction (2rs±1)/(2s²) is always reduced, so the denominator pins
/// s and the numerator pins r for each sign. Ties (only possible at s = 1)
/// go to the smaller |r|.
pub fn solve_vertical_clasp(x: &ExtRational) -> Option<ClaspWitness> {
    if x.is_infinite() || x.den.is_odd() {
        return None;
    }
    let half = &x.den >> 1u32;
    let s = half.sqrt();
    if &s * &s != half {
        return None;
    }
    let two_s = &s * 2u32;
    let mut best: Option<ClaspWitness> = None;
    for sign in [1i8, -1] {
        let (r, rem) = (&x.num - sign).div_rem(&two_s);
        if !rem.is_zero() || !r.gcd(&s).is_one() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => r.abs() < b.r.abs(),
        };
        if better {
            best = Some(ClaspWitness { kind: ClaspKind::Vertical, r, s: s.clone(), sign, k: BigInt::zero() });
        }
    }
    best
}

/// Returns (k, r, s, sign) with x = k + 2s²/(2rs+sign). With `k` given only
/// that shift is tried; otherwise the smallest s wins, then |r|, then +,
/// then |k|.
pub fn solve_horizontal_clasp(x: &ExtRational, k: Option<&BigInt>) -> Option<ClaspWitness> {
    let at = |k: &BigInt| -> Option<ClaspWitness> {
        let w = solve_vertical_clasp(&x.add_int(&-k).recip())?;
        Some(ClaspWitness { kind: ClaspKind::Horizontal, k: k.clone(), ..w })
    };
    if let Some(k) = k {
        return at(k);
    }
    if x.is_infinite() {
        return None;
    }
    // |2rs+sign| = den(x) bounds s by (den+1)/2, and |p − kq| = 2s².
    let (p, d) = (&x.num, &x.den);
    let s_max = std::cmp::max(BigInt::one(), (d + 1u32) / 2u32);
    let mut best: Option<ClaspWitness> = None;
    let mut s = BigInt::one();
    while s <= s_max {
        let two_s2 = BigInt::from(2) * &s * &s;
        for t in [two_s2.clone(), -two_s2.clone()] {
            let (kk, rem) = (p - &t).div_rem(d);
            if !rem.is_zero() {
                continue;
            }
            if let Some(w) = at(&kk) {
                let key = |w: &ClaspWitness| (w.s.clone(), w.r.abs(), -w.sign, w.k.abs());
                if best.as_ref().is_none_or(|b| key(&w) < key(b)) {
                    best = Some(w);
                }
            }
        }
        if best.is_some() {
            break;
        }
        s += 1u32;
    }
    best
}

/// A crossing move R(from) → R(to), reduced to the vertical clasp test by a
/// unimodular change of coordinates sending `to` to 1/0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrossingMove {
    pub transform: Mat2,
    pub witness: ClaspWitness,
}

pub fn crossing_move(from: &ExtRational, to: &ExtRational) -> Option<CrossingMove> {
    let m = Mat2::sending_to_infinity(to);
    let witness = solve_vertical_clasp(&m.apply(from))?;
    Some(CrossingMove { transform: m, witness })
}

/// An alternating expansion in one of the two palindromic shapes, with the
/// (1,1) pair whose change turns R(x) into R(1/0).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct KohnForm {
    /// Evaluates to x exactly (entries negated when x < 0).
    pub entries: ContinuedFraction,
    /// 1-based positions of the two clasp entries.
    pub clasp: (usize, usize),
    /// 1: [c₁…c_ℓ,1,1,c_ℓ−1,…,c₁,c₀]; 2: [c₁…c_ℓ−1,1,1,c_ℓ,…,c₁,c₀].
    pub form: u8,
}

fn palindrome_shape(w: &[BigInt]) -> Option<u8> {
    let n = w.len();
    if n < 2 || n % 2 == 1 {
        return None;
    }
    let l = (n - 2) / 2;
    let one = BigInt::one();
    if w[l] != one || w[l + 1] != one {
        return None;
    }
    if l == 0 {
        return Some(1);
    }
    let head_ok = |c: &[BigInt]| c.iter().all(|x| x >= &one);
    // form 1: c = w[0..l]; tail must be c_ℓ−1, c_{ℓ−1}, …, c₁
    {
        let c = &w[0..l];
        let tail = &w[l + 2..];
        if head_ok(c) && c[l - 1] >= BigInt::from(2) && tail[0] == &c[l - 1] - 1u32 {
            let rest_ok = (1..l).all(|j| tail[j] == c[l - 1 - j]);
            if rest_ok {
                return Some(1);
            }
        }
    }
    // form 2: w = c₁…c_{ℓ−1}, c_ℓ−1, 1, 1, c_ℓ, c_{ℓ−1}…c₁
    {
        let cl = &w[l + 2];
        let c_low = &w[0..l - 1];
        let tail = &w[l + 3..];
        if cl >= &BigInt::from(2) && head_ok(c_low) && w[l - 1] == cl - 1u32 {
            let rest_ok = (0..l - 1).all(|j| tail[j] == c_low[l - 2 - j]);
            if rest_ok {
                return Some(2);
            }
        }
    }
    None
}

/// Searches both palindromic shapes; present exactly when a vertical clasp
/// witness exists.
pub fn kohn_palindrome(x: &ExtRational) -> Option<KohnForm> {
    if x.is_infinite() || x.is_integer() {
        return None;
    }
    let ax = x.abs();
    let c0 = ax.floor().expect("finite");
    let y = ax.add_int(&-&c0).recip();
    let canon = cf_canonical_positive(&y).expect("y > 1").entries;
    let mut candidates = vec![canon.clone()];
    if canon[0] >= BigInt::from(2) {
        let mut split = vec![BigInt::one(), &canon[0] - 1u32];
        split.extend_from_slice(&canon[1..]);
        candidates.push(split);
    }
    for w in candidates {
        if let Some(form) = palindrome_shape(&w) {
            let l = (w.len() - 2) / 2;
            let mut entries = w;
            entries.push(c0.clone());
            let mut cf = ContinuedFraction::new(entries);
            if x.is_negative() {
                cf = cf.negated();
            }
            return Some(KohnForm { entries: cf, clasp: (l + 1, l + 2), form });
        }
    }
    None
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct IntegralCertificate {
    /// 1 when ⌊x⌋ − k ≥ 0 (after mirroring so that x > 0), else 2.
    pub case: u8,
    pub mirrored: bool,
    /// An expansion of x whose clasp entries sit at `clasp`; changing that
    /// crossing gives R(k).
    pub expansion: ContinuedFraction,
    pub clasp: (usize, usize),
    pub alternating: bool,
    pub witness: ClaspWitness,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegralChange {
    Absent,
    /// x = sign·[ℓ,2,m] and k = sign·(ℓ+m+2): the move exists but is not a
    /// crossing change in an alternating diagram.
    Exception { ell: String, m: String, sign: i8 },
    Certificate(IntegralCertificate),
}

pub fn integral_change_certificate(x: &ExtRational, k: &BigInt) -> Result<IntegralChange, SlopeError> {
    if x.is_integer() || x.is_infinite() {
        return Err(SlopeError::Integral(x.clone()));
    }
    let witness = match solve_horizontal_clasp(x, Some(k)) {
        Some(w) => w,
        None => return Ok(IntegralChange::Absent),
    };
    let mirrored = x.is_negative();
    let (xp, kp) = if mirrored { (x.neg(), -k) } else { (x.clone(), k.clone()) };
    let m = xp.floor().expect("finite");
    let fr = xp.add_int(&-&m);
    // [ℓ,2,m] = m + ℓ/(2ℓ+1)
    if fr.den == BigInt::from(2) * &fr.num + 1u32 {
        let ell = fr.num.clone();
        if ell.is_positive() && kp == &ell + &m + 2u32 {
            let sign = if mirrored { -1 } else { 1 };
            return Ok(IntegralChange::Exception { ell: ell.to_string(), m: m.to_string(), sign });
        }
    }
    let kohn = kohn_palindrome(&xp.add_int(&-&kp).recip()).expect("clasp witness implies palindrome");
    let mut entries = kohn.entries.entries.clone();
    entries.push(kp.clone());
    let mut expansion = ContinuedFraction::new(entries);
    let alternating = expansion.entries.iter().all(|e| !e.is_negative())
        || expansion.entries.iter().all(|e| !e.is_positive());
    if mirrored {
        expansion = expansion.negated();
    }
    let case = if m >= kp { 1 } else { 2 };
    Ok(IntegralChange::Certificate(IntegralCertificate {
        case,
        mirrored,
        expansion,
        clasp: kohn.clasp,
        alternating,
        witness,
    }))
}
