//! Tangle expressions, their slope actions, square tangles and the
//! normalized form the decision procedure works on.
//!
//! Every node is a sum in the Conway sense: `TypeI(α,β)` is R(α)+R(β),
//! `TypeII(γ,X)` is R(γ)+X and `TypeIII(X,Y)` is X+Y. A knot is the
//! numerator closure, i.e. the tangle capped with R(0). Closing a tangle X
//! "with w" means taking the numerator closure of X+R(w); for X = R(v) that
//! is the unknot exactly when Δ(v,−w) = 1.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::slopes::{distance, ExtRational, Mat2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangleError {
    #[error("slot value {0} must be a finite non-integer")]
    IntegralSlot(ExtRational),
    #[error("a square tangle may have at most one hole")]
    TooManyHoles,
    #[error("the selected pair contains the hole")]
    HoleInPair,
    #[error("no node at path {0}")]
    BadPath(String),
}

pub type Path = Vec<usize>;

pub fn path_string(p: &[usize]) -> String {
    let mut s = String::from("root");
    for i in p {
        s.push('.');
        s.push_str(&i.to_string());
    }
    s
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// π rotation about the horizontal axis
    H,
    /// π rotation about the vertical axis
    V,
    /// quarter turn, x ↦ −1/x
    R,
    /// all crossings switched, x ↦ −x
    Mirror,
    /// reflection in the NW–SE diagonal, x ↦ 1/x
    Diag0,
}

impl Symmetry {
    pub const ALL: [Symmetry; 5] = [Symmetry::H, Symmetry::V, Symmetry::R, Symmetry::Mirror, Symmetry::Diag0];

    pub fn matrix(self) -> Mat2 {
        match self {
            Symmetry::H | Symmetry::V => Mat2::identity(),
            Symmetry::R => Mat2::rot(),
            Symmetry::Mirror => Mat2::mirror(),
            Symmetry::Diag0 => Mat2::recip(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symmetry::H => "h",
            Symmetry::V => "v",
            Symmetry::R => "r",
            Symmetry::Mirror => "mirror",
            Symmetry::Diag0 => "diag0",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Symmetry::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum BraidLetter {
    HPlus,
    HMinus,
    VPlus,
    VMinus,
}

impl BraidLetter {
    pub const ALL: [BraidLetter; 4] = [BraidLetter::HPlus, BraidLetter::HMinus, BraidLetter::VPlus, BraidLetter::VMinus];

    pub fn matrix(self) -> Mat2 {
        match self {
            BraidLetter::HPlus => Mat2::new(1, 1, 0, 1),
            BraidLetter::HMinus => Mat2::new(1, -1, 0, 1),
            BraidLetter::VPlus => Mat2::new(1, 0, 1, 1),
            BraidLetter::VMinus => Mat2::new(1, 0, -1, 1),
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            BraidLetter::HPlus => BraidLetter::HMinus,
            BraidLetter::HMinus => BraidLetter::HPlus,
            BraidLetter::VPlus => BraidLetter::VMinus,
            BraidLetter::VMinus => BraidLetter::VPlus,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BraidLetter::HPlus => "H+",
            BraidLetter::HMinus => "H-",
            BraidLetter::VPlus => "V+",
            BraidLetter::VMinus => "V-",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        BraidLetter::ALL.into_iter().find(|l| l.token() == s)
    }
}

/// Letters apply left to right: the leftmost letter acts first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    /// Product of the letter matrices, last letter outermost.
    pub fn matrix(&self) -> Mat2 {
        self.0.iter().fold(Mat2::identity(), |acc, l| l.matrix().compose(&acc))
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        BraidWord(self.0.iter().chain(other.0.iter()).copied().collect())
    }
}

pub fn braid_action(w: &BraidWord) -> Mat2 {
    w.matrix()
}

pub fn apply(w: &BraidWord, x: &ExtRational) -> ExtRational {
    w.matrix().apply(x)
}

/// Writes a determinant ±1 matrix as a braid word, plus a mirror when the
/// determinant is −1. Only the action on slopes is preserved (±I are
/// identified).
pub fn word_for_matrix(m: &Mat2) -> (BraidWord, bool) {
    let mirrored = m.det().is_negative();
    let mut cur = if mirrored { m.compose(&Mat2::mirror()) } else { m.clone() };
    // left-multiply by elementary matrices until upper triangular
    let mut applied: Vec<(BraidLetter, BigInt)> = Vec::new();
    while !cur.c.is_zero() {
        if cur.a.is_zero() {
            cur = Mat2 { a: &cur.a + &cur.c, b: &cur.b + &cur.d, c: cur.c.clone(), d: cur.d.clone() };
            applied.push((BraidLetter::HPlus, BigInt::from(-1)));
        } else if cur.a.abs() > cur.c.abs() {
            let t = num_integer::Integer::div_floor(&cur.a, &cur.c);
            cur = Mat2 { a: &cur.a - &t * &cur.c, b: &cur.b - &t * &cur.d, c: cur.c.clone(), d: cur.d.clone() };
            applied.push((BraidLetter::HPlus, t));
        } else {
            let t = num_integer::Integer::div_floor(&cur.c, &cur.a);
            cur = Mat2 { c: &cur.c - &t * &cur.a, d: &cur.d - &t * &cur.b, a: cur.a.clone(), b: cur.b.clone() };
            applied.push((BraidLetter::VPlus, t));
        }
    }
    // cur = ±[[1,b],[0,1]], and m' = product of inverse steps ∘ cur
    let shift = &cur.b * &cur.a;
    let mut factors = applied;
    factors.push((BraidLetter::HPlus, shift));
    // factors are outermost first; words list innermost first
    let mut letters = Vec::new();
    for (l, t) in factors.into_iter().rev() {
        let (letter, count) = if t.is_negative() { (l.inverse(), -t) } else { (l, t) };
        let mut i = BigInt::zero();
        while i < count {
            letters.push(letter);
            i += 1u32;
        }
    }
    (BraidWord(letters), mirrored)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TangleExpr {
    Leaf(ExtRational),
    TypeI(ExtRational, ExtRational),
    TypeII(ExtRational, Box<TangleExpr>),
    TypeIII(Box<TangleExpr>, Box<TangleExpr>),
    Braid(BraidWord, Box<TangleExpr>),
    Symmetry(Symmetry, Box<TangleExpr>),
}

fn check_slot(x: &ExtRational) -> Result<(), TangleError> {
    if x.is_integer() || x.is_infinite() {
        Err(TangleError::IntegralSlot(x.clone()))
    } else {
        Ok(())
    }
}

impl TangleExpr {
    pub fn leaf(x: ExtRational) -> Self {
        TangleExpr::Leaf(x)
    }

    pub fn type_one(a: ExtRational, b: ExtRational) -> Result<Self, TangleError> {
        check_slot(&a)?;
        check_slot(&b)?;
        Ok(TangleExpr::TypeI(a, b))
    }

    pub fn type_two(g: ExtRational, inner: TangleExpr) -> Result<Self, TangleError> {
        check_slot(&g)?;
        Ok(TangleExpr::TypeII(g, Box::new(inner)))
    }

    pub fn type_three(l: TangleExpr, r: TangleExpr) -> Self {
        TangleExpr::TypeIII(Box::new(l), Box::new(r))
    }

    pub fn braid(w: BraidWord, inner: TangleExpr) -> Self {
        TangleExpr::Braid(w, Box::new(inner))
    }

    pub fn sym(s: Symmetry, inner: TangleExpr) -> Self {
        TangleExpr::Symmetry(s, Box::new(inner))
    }

    /// R(a)+R(b), as a type-I node when both slots allow it.
    pub fn pair(a: ExtRational, b: ExtRational) -> Self {
        match TangleExpr::type_one(a.clone(), b.clone()) {
            Ok(t) => t,
            Err(_) => TangleExpr::type_three(TangleExpr::Leaf(a), TangleExpr::Leaf(b)),
        }
    }

    /// Checks the slot invariants of every type-I and type-II node.
    pub fn validate(&self) -> Result<(), TangleError> {
        match self {
            TangleExpr::Leaf(_) => Ok(()),
            TangleExpr::TypeI(a, b) => check_slot(a).and(check_slot(b)),
            TangleExpr::TypeII(g, i) => check_slot(g).and_then(|_| i.validate()),
            TangleExpr::TypeIII(l, r) => l.validate().and_then(|_| r.validate()),
            TangleExpr::Braid(_, i) | TangleExpr::Symmetry(_, i) => i.validate(),
        }
    }

    /// The fraction when the tree is a rational tangle built only from
    /// leaves, marks and sums with at most one non-integral summand.
    pub fn fraction(&self) -> Option<ExtRational> {
        match normalize_expr(self, &mut Vec::new()) {
            Norm::Rat { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn child(&self, i: usize) -> Option<&TangleExpr> {
        match (self, i) {
            (TangleExpr::TypeII(_, x), 1) => Some(x),
            (TangleExpr::TypeIII(l, _), 0) => Some(l),
            (TangleExpr::TypeIII(_, r), 1) => Some(r),
            (TangleExpr::Braid(_, x), 0) | (TangleExpr::Symmetry(_, x), 0) => Some(x),
            _ => None,
        }
    }

    /// The subtree at `path`; slots of type-I/II nodes come back as leaves.
    pub fn at(&self, path: &[usize]) -> Option<TangleExpr> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(self.clone());
        };
        match (self, i) {
            (TangleExpr::TypeI(a, _), 0) | (TangleExpr::TypeII(a, _), 0) if rest.is_empty() => {
                Some(TangleExpr::Leaf(a.clone()))
            }
            (TangleExpr::TypeI(_, b), 1) if rest.is_empty() => Some(TangleExpr::Leaf(b.clone())),
            _ => self.child(i)?.at(rest),
        }
    }

    /// Replaces the subtree at `path`. A replaced slot turns its node into
    /// the equivalent type-III sum.
    pub fn replace_at(&self, path: &[usize], new: TangleExpr) -> Result<TangleExpr, TangleError> {
        let bad = || TangleError::BadPath(path_string(path));
        let Some((&i, rest)) = path.split_first() else {
            return Ok(new);
        };
        let rec = |x: &TangleExpr| x.replace_at(rest, new.clone());
        Ok(match (self, i) {
            (TangleExpr::TypeI(_, b), 0) if rest.is_empty() => {
                TangleExpr::type_three(new.clone(), TangleExpr::Leaf(b.clone()))
            }
            (TangleExpr::TypeI(a, _), 1) if rest.is_empty() => {
                TangleExpr::type_three(TangleExpr::Leaf(a.clone()), new.clone())
            }
            (TangleExpr::TypeII(_, x), 0) if rest.is_empty() => TangleExpr::type_three(new.clone(), (**x).clone()),
            (TangleExpr::TypeII(g, x), 1) => TangleExpr::TypeII(g.clone(), Box::new(rec(x)?)),
            (TangleExpr::TypeIII(l, r), 0) => TangleExpr::TypeIII(Box::new(rec(l)?), r.clone()),
            (TangleExpr::TypeIII(l, r), 1) => TangleExpr::TypeIII(l.clone(), Box::new(rec(r)?)),
            (TangleExpr::Braid(w, x), 0) => TangleExpr::Braid(w.clone(), Box::new(rec(x)?)),
            (TangleExpr::Symmetry(s, x), 0) => TangleExpr::Symmetry(*s, Box::new(rec(x)?)),
            _ => return Err(bad()),
        })
    }

    pub fn mirror(&self) -> TangleExpr {
        match self {
            TangleExpr::Leaf(x) => TangleExpr::Leaf(x.neg()),
            TangleExpr::TypeI(a, b) => TangleExpr::TypeI(a.neg(), b.neg()),
            TangleExpr::TypeII(g, x) => TangleExpr::TypeII(g.neg(), Box::new(x.mirror())),
            TangleExpr::TypeIII(l, r) => TangleExpr::type_three(l.mirror(), r.mirror()),
            TangleExpr::Braid(w, x) => {
                let inv = BraidWord(w.0.iter().map(|l| l.inverse()).collect());
                TangleExpr::Braid(inv, Box::new(x.mirror()))
            }
            TangleExpr::Symmetry(s, x) => TangleExpr::Symmetry(*s, Box::new(x.mirror())),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            TangleExpr::Leaf(_) | TangleExpr::TypeI(..) => 1,
            TangleExpr::TypeII(_, x) | TangleExpr::Braid(_, x) | TangleExpr::Symmetry(_, x) => 1 + x.size(),
            TangleExpr::TypeIII(l, r) => 1 + l.size() + r.size(),
        }
    }
}

/// Structured form, e.g. `(typeII 1/2 (typeI -1/3 -3/2))`.
impl fmt::Display for TangleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TangleExpr::Leaf(x) => write!(f, "(leaf {x})"),
            TangleExpr::TypeI(a, b) => write!(f, "(typeI {a} {b})"),
            TangleExpr::TypeII(g, x) => write!(f, "(typeII {g} {x})"),
            TangleExpr::TypeIII(l, r) => write!(f, "(typeIII {l} {r})"),
            TangleExpr::Braid(w, x) => {
                write!(f, "(braid")?;
                for l in &w.0 {
                    write!(f, " {}", l.token())?;
                }
                write!(f, " {x})")
            }
            TangleExpr::Symmetry(s, x) => write!(f, "(sym {} {x})", s.name()),
        }
    }
}

/// A closed tree: the numerator closure of `root`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Knot {
    pub root: TangleExpr,
}

impl Knot {
    pub fn new(root: TangleExpr) -> Self {
        Knot { root }
    }

    pub fn mirror(&self) -> Knot {
        Knot { root: self.root.mirror() }
    }
}

impl fmt::Display for Knot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(closure {})", self.root)
    }
}

/// M(p/q,k) = R(p/q + k).
pub fn montesinos_merge(x: &ExtRational, k: &BigInt) -> ExtRational {
    x.add_int(k)
}

/// The numerator closure of R(α)+R(β) is the unknot iff Δ(α,−β) = 1.
pub fn two_bridge_unknot(a: &ExtRational, b: &ExtRational) -> bool {
    distance(a, &b.neg()).is_one()
}

/// The integer x with x·q₁q₂ + p₁q₂ + p₂q₁ = ±1, if any.
pub fn type_one_fill(a: &ExtRational, b: &ExtRational) -> Result<Option<BigInt>, TangleError> {
    check_slot(a)?;
    check_slot(b)?;
    let qq = a.den() * b.den();
    let cross = a.num() * b.den() + b.num() * a.den();
    for sign in [1, -1] {
        let t = BigInt::from(sign) - &cross;
        let (x, r) = num_integer::Integer::div_rem(&t, &qq);
        if r.is_zero() {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Slot {
    Hole,
    Value(ExtRational),
}

impl Slot {
    pub fn value(&self) -> Option<&ExtRational> {
        match self {
            Slot::Value(x) => Some(x),
            Slot::Hole => None,
        }
    }

    fn neg(&self) -> Slot {
        match self {
            Slot::Value(x) => Slot::Value(x.neg()),
            Slot::Hole => Slot::Hole,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Hole => write!(f, "*"),
            Slot::Value(x) => write!(f, "{x}"),
        }
    }
}

/// S(α,β;γ,δ): the numerator closure of M(α,β) + r(M(γ,δ)). Pairs are
/// slots (0,1) and (2,3).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SquareTangle {
    pub slots: [Slot; 4],
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairSite {
    First,
    Second,
}

impl SquareTangle {
    pub fn filled(a: ExtRational, b: ExtRational, c: ExtRational, d: ExtRational) -> Self {
        SquareTangle { slots: [Slot::Value(a), Slot::Value(b), Slot::Value(c), Slot::Value(d)] }
    }

    pub fn values(&self) -> Option<[ExtRational; 4]> {
        let v: Vec<ExtRational> = self.slots.iter().filter_map(|s| s.value().cloned()).collect();
        v.try_into().ok()
    }

    pub fn hole_count(&self) -> usize {
        self.slots.iter().filter(|s| **s == Slot::Hole).count()
    }

    pub fn mirror(&self) -> Self {
        SquareTangle { slots: self.slots.clone().map(|s| s.neg()) }
    }

    /// Closed tree Closure(R(α)+R(β) + r(R(γ)+R(δ))).
    pub fn to_knot(&self) -> Result<Knot, TangleError> {
        let [a, b, c, d] = self.values().ok_or(TangleError::TooManyHoles)?;
        Ok(Knot::new(TangleExpr::type_three(
            TangleExpr::pair(a, b),
            TangleExpr::sym(Symmetry::R, TangleExpr::pair(c, d)),
        )))
    }
}

impl fmt::Display for SquareTangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.slots;
        write!(f, "S({},{};{},{})", s[0], s[1], s[2], s[3])
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalSquare {
    pub form: SquareTangle,
    /// The canonical form is that of the mirror image.
    pub mirrored: bool,
    /// For a holed square: S(…;Y,d) = S(…;Y+shift,d−shift) in the form.
    pub hole_shift: Option<BigInt>,
}

fn pair_key(a: &ExtRational, b: &ExtRational) -> (Slot, Slot) {
    let s = a.add(b);
    let opt = |x: &ExtRational| {
        let f = x.frac().expect("finite");
        (Slot::Value(f.clone()), Slot::Value(s.sub(&f)))
    };
    std::cmp::min(opt(a), opt(b))
}

/// Invariant of M(a,b) under zero-sum shifts and swapping: the least
/// fractional part together with the complementary summand.
pub fn pair_invariant(a: &ExtRational, b: &ExtRational) -> Result<(ExtRational, ExtRational), TangleError> {
    check_slot(a)?;
    check_slot(b)?;
    let (x, y) = pair_key(a, b);
    match (x, y) {
        (Slot::Value(x), Slot::Value(y)) => Ok((x, y)),
        _ => unreachable!("values in, values out"),
    }
}

fn normal_unmirrored(s: &SquareTangle) -> (Vec<Slot>, Option<BigInt>) {
    let pairs = [(&s.slots[0], &s.slots[1]), (&s.slots[2], &s.slots[3])];
    let mut filled = Vec::new();
    let mut hole = None;
    for (x, y) in pairs {
        match (x, y) {
            (Slot::Value(a), Slot::Value(b)) => filled.push(pair_key(a, b)),
            (Slot::Hole, Slot::Value(d)) | (Slot::Value(d), Slot::Hole) => {
                let f = d.frac().expect("finite");
                hole = Some((d.floor().expect("finite"), f));
            }
            _ => unreachable!("checked by caller"),
        }
    }
    filled.sort();
    let mut out = Vec::new();
    for (x, y) in filled {
        out.push(x);
        out.push(y);
    }
    let shift = hole.map(|(n, f)| {
        out.push(Slot::Hole);
        out.push(Slot::Value(f));
        n
    });
    (out, shift)
}

/// Least representative under zero-sum shifts within a pair, the eight
/// pair-preserving slot permutations, and mirror.
pub fn square_normalize(s: &SquareTangle) -> Result<NormalSquare, TangleError> {
    if s.hole_count() > 1 {
        return Err(TangleError::TooManyHoles);
    }
    for slot in &s.slots {
        if let Slot::Value(x) = slot {
            check_slot(x)?;
        }
    }
    let (plain, plain_shift) = normal_unmirrored(s);
    let (mir, mir_shift) = normal_unmirrored(&s.mirror());
    let (slots, mirrored, hole_shift) =
        if mir < plain { (mir, true, mir_shift) } else { (plain, false, plain_shift) };
    let slots: [Slot; 4] = slots.try_into().expect("four slots");
    Ok(NormalSquare { form: SquareTangle { slots }, mirrored, hole_shift })
}

/// Swaps the two entries of one pair.
pub fn mutate(s: &SquareTangle, site: PairSite) -> Result<SquareTangle, TangleError> {
    let (i, j) = match site {
        PairSite::First => (0, 1),
        PairSite::Second => (2, 3),
    };
    if s.slots[i] == Slot::Hole || s.slots[j] == Slot::Hole {
        return Err(TangleError::HoleInPair);
    }
    let mut out = s.clone();
    out.slots.swap(i, j);
    Ok(out)
}

/// Some representative has all |slots| < 1 and both pair products negative.
pub fn has_small_shape(s: &SquareTangle) -> bool {
    let Some(v) = s.values() else { return false };
    let pairs = [(&v[0], &v[1]), (&v[2], &v[3])];
    #[allow(clippy::let_and_return)]
    let ok = pairs.into_iter().all(|(a, b)| {
        let total = a.add(b);
        let f = a.frac().expect("finite");
        let one = ExtRational::integer(1);
        [f.clone(), f.sub(&one)].into_iter().any(|x| {
            let y = total.sub(&x);
            x.abs() < one && y.abs() < one && ((x.is_negative() && y.is_positive()) || (x.is_positive() && y.is_negative()))
        })
    });
    ok
}

// ---------------------------------------------------------------------------
// Normalized trees

/// Where a normalized rational piece came from in the input tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RatOrigin {
    /// value = map(leaf value at `path`)
    Leaf { path: Path, map: Mat2 },
    /// Net horizontal twisting of the mark at `path` around the sum at
    /// `inner`.
    Twist { path: Path, inner: Path },
    Synthetic,
}

/// Rational subtrees collapsed, nested sums flattened, marks composed into
/// matrices and marks that do not move slopes dropped.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Norm {
    Rat { value: ExtRational, origin: RatOrigin },
    Sum { pieces: Vec<Norm>, origin: Option<Path> },
    Mark { m: Mat2, inner: Box<Norm>, origin: Option<Path> },
}

impl Norm {
    pub fn rat(value: ExtRational) -> Norm {
        Norm::Rat { value, origin: RatOrigin::Synthetic }
    }

    pub fn as_rational(&self) -> Option<&ExtRational> {
        match self {
            Norm::Rat { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn origin(&self) -> Option<&Path> {
        match self {
            Norm::Rat { origin: RatOrigin::Leaf { path, .. }, .. } => Some(path),
            Norm::Rat { .. } => None,
            Norm::Sum { origin, .. } | Norm::Mark { origin, .. } => origin.as_ref(),
        }
    }

    fn with_origin(mut self, o: Option<Path>) -> Norm {
        if o.is_some() {
            match &mut self {
                Norm::Sum { origin, .. } | Norm::Mark { origin, .. } => *origin = o,
                Norm::Rat { .. } => {}
            }
        }
        self
    }

    pub fn child(&self, i: usize) -> Option<&Norm> {
        match self {
            Norm::Sum { pieces, .. } => pieces.get(i),
            Norm::Mark { inner, .. } if i == 0 => Some(inner),
            _ => None,
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Norm> {
        path.iter().try_fold(self, |n, &i| n.child(i))
    }

    /// Paths of all nodes, preorder.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        fn walk(n: &Norm, cur: &mut Path, out: &mut Vec<Path>) {
            out.push(cur.clone());
            let kids = match n {
                Norm::Sum { pieces, .. } => pieces.len(),
                Norm::Mark { .. } => 1,
                Norm::Rat { .. } => 0,
            };
            for i in 0..kids {
                cur.push(i);
                walk(n.child(i).expect("child"), cur, out);
                cur.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// An input-language tree for this tangle (marks become braid words and
    /// at most one mirror).
    pub fn to_expr(&self) -> TangleExpr {
        match self {
            Norm::Rat { value, .. } => TangleExpr::Leaf(value.clone()),
            Norm::Sum { pieces, .. } => {
                let mut it = pieces.iter().map(|p| p.to_expr());
                let first = it.next().expect("non-empty sum");
                it.fold(first, TangleExpr::type_three)
            }
            Norm::Mark { m, inner, .. } => {
                let (word, mirrored) = word_for_matrix(m);
                let mut e = inner.to_expr();
                if mirrored {
                    e = TangleExpr::sym(Symmetry::Mirror, e);
                }
                if !word.0.is_empty() {
                    e = TangleExpr::braid(word, e);
                }
                e
            }
        }
    }
}

fn pure_shift(m: &Mat2) -> Option<BigInt> {
    (m.c.is_zero() && m.a == m.d).then(|| &m.b * &m.a)
}

/// Smart constructor for marked tangles.
pub fn make_mark(m: Mat2, x: Norm, origin: Option<Path>) -> Norm {
    if m.is_identity_action() {
        return x.with_origin(origin);
    }
    match x {
        Norm::Rat { value, origin: ro } => {
            let origin = match ro {
                RatOrigin::Leaf { path, map } => RatOrigin::Leaf { path, map: m.compose(&map) },
                _ => RatOrigin::Synthetic,
            };
            Norm::Rat { value: m.apply(&value), origin }
        }
        Norm::Mark { m: m2, inner, .. } => make_mark(m.compose(&m2), *inner, origin),
        Norm::Sum { mut pieces, origin: inner_origin } => match pure_shift(&m) {
            Some(k) => {
                let ro = match (&origin, &inner_origin) {
                    (Some(p), Some(i)) => RatOrigin::Twist { path: p.clone(), inner: i.clone() },
                    _ => RatOrigin::Synthetic,
                };
                pieces.push(Norm::Rat { value: ExtRational::integer(k), origin: ro });
                make_sum(pieces, origin)
            }
            None => Norm::Mark { m, inner: Box::new(Norm::Sum { pieces, origin: inner_origin }), origin },
        },
    }
}

/// Smart constructor for sums: flattens, and collapses all-rational sums
/// with at most one non-integral summand.
pub fn make_sum(pieces: Vec<Norm>, origin: Option<Path>) -> Norm {
    let mut flat = Vec::with_capacity(pieces.len());
    for p in pieces {
        match p {
            Norm::Sum { pieces, .. } => flat.extend(pieces),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        return flat.pop().expect("one").with_origin(origin);
    }
    if flat.iter().all(|p| p.as_rational().is_some()) {
        let mut ints = BigInt::zero();
        let (mut special, mut n_special) = (None, 0);
        for (i, p) in flat.iter().enumerate() {
            let v = p.as_rational().expect("rational");
            match v.to_integer() {
                Some(k) => ints += k,
                None => {
                    n_special += 1;
                    special = Some(i);
                }
            }
        }
        if n_special <= 1 {
            let keep = special.unwrap_or_else(|| {
                flat.iter()
                    .position(|p| matches!(p, Norm::Rat { origin: RatOrigin::Leaf { .. }, .. }))
                    .unwrap_or(0)
            });
            let kept = flat.swap_remove(keep);
            let offset: BigInt = flat.iter().map(|p| p.as_rational().expect("rational").to_integer().expect("int")).sum();
            let _ = ints;
            let Norm::Rat { value, origin: ro } = kept else { unreachable!() };
            let shift = Mat2::shift(&offset);
            let origin = match ro {
                RatOrigin::Leaf { path, map } => RatOrigin::Leaf { path, map: shift.compose(&map) },
                other if offset.is_zero() => other,
                _ => RatOrigin::Synthetic,
            };
            return Norm::Rat { value: value.add_int(&offset), origin };
        }
    }
    Norm::Sum { pieces: flat, origin }
}

fn normalize_expr(e: &TangleExpr, path: &mut Path) -> Norm {
    let here = Some(path.clone());
    let leaf = |v: &ExtRational, path: &mut Path, i: usize| {
        path.push(i);
        let n = Norm::Rat { value: v.clone(), origin: RatOrigin::Leaf { path: path.clone(), map: Mat2::identity() } };
        path.pop();
        n
    };
    let sub = |x: &TangleExpr, path: &mut Path, i: usize| {
        path.push(i);
        let n = normalize_expr(x, path);
        path.pop();
        n
    };
    match e {
        TangleExpr::Leaf(v) => Norm::Rat { value: v.clone(), origin: RatOrigin::Leaf { path: path.clone(), map: Mat2::identity() } },
        TangleExpr::TypeI(a, b) => {
            let pa = leaf(a, path, 0);
            let pb = leaf(b, path, 1);
            make_sum(vec![pa, pb], here)
        }
        TangleExpr::TypeII(g, x) => {
            let pg = leaf(g, path, 0);
            let px = sub(x, path, 1);
            make_sum(vec![pg, px], here)
        }
        TangleExpr::TypeIII(l, r) => {
            let pl = sub(l, path, 0);
            let pr = sub(r, path, 1);
            make_sum(vec![pl, pr], here)
        }
        TangleExpr::Braid(w, x) => {
            let px = sub(x, path, 0);
            make_mark(w.matrix(), px, here)
        }
        TangleExpr::Symmetry(s, x) => {
            let px = sub(x, path, 0);
            make_mark(s.matrix(), px, here)
        }
    }
}

pub fn normalize(e: &TangleExpr) -> Norm {
    normalize_expr(e, &mut Vec::new())
}

/// Re-marking a closing slope through a mark: D·M⁻¹·D with D = diag(−1,1).
pub fn transfer(m: &Mat2) -> Mat2 {
    let d = Mat2::mirror();
    d.compose(&m.inverse()).compose(&d)
}

/// The tangle C with knot = closure of (node at `path`) + C, given the
/// normalized tree of a knot.
pub fn complement(root: &Norm, path: &[usize]) -> Result<Norm, TangleError> {
    let mut outer = Norm::rat(ExtRational::zero());
    let mut node = root;
    for (depth, &i) in path.iter().enumerate() {
        let bad = || TangleError::BadPath(format!("normalized {}", path_string(&path[..=depth])));
        match node {
            Norm::Sum { pieces, .. } => {
                if i >= pieces.len() {
                    return Err(bad());
                }
                let mut others: Vec<Norm> = pieces[i + 1..].to_vec();
                others.push(outer);
                others.extend_from_slice(&pieces[..i]);
                outer = make_sum(others, None);
                node = &pieces[i];
            }
            Norm::Mark { m, inner, .. } if i == 0 => {
                outer = make_mark(transfer(m), outer, None);
                node = inner;
            }
            _ => return Err(bad()),
        }
    }
    Ok(outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slopes::q;

    #[test]
    fn merge_examples() {
        assert_eq!(montesinos_merge(&q(1, 2), &1.into()), q(3, 2));
        assert_eq!(montesinos_merge(&q(3, 7), &0.into()), q(3, 7));
        assert_eq!(montesinos_merge(&q(2, 5), &(-1).into()), q(-3, 5));
    }

    #[test]
    fn two_bridge_examples() {
        assert!(two_bridge_unknot(&q(2, 3), &q(-1, 2)));
        assert!(!two_bridge_unknot(&q(2, 3), &q(-2, 3)));
        for k in -5..5 {
            assert!(two_bridge_unknot(&q(k, 1), &ExtRational::infinity()));
        }
    }

    #[test]
    fn fill_examples() {
        assert_eq!(type_one_fill(&q(1, 2), &q(1, 3)).unwrap(), Some((-1).into()));
        assert_eq!(type_one_fill(&q(-1, 3), &q(-3, 2)).unwrap(), Some(2.into()));
        assert_eq!(type_one_fill(&q(1, 3), &q(1, 3)).unwrap(), None);
        assert!(type_one_fill(&q(2, 1), &q(1, 3)).is_err());
    }

    #[test]
    fn braid_examples() {
        assert_eq!(braid_action(&BraidWord::default()), Mat2::identity());
        assert_eq!(apply(&BraidWord(vec![BraidLetter::HPlus]), &q(1, 2)), q(3, 2));
        assert_eq!(apply(&BraidWord(vec![BraidLetter::VPlus]), &q(1, 2)), q(1, 3));
        let w = BraidWord(vec![BraidLetter::HPlus, BraidLetter::VPlus]);
        // H⁺ first, then V⁺: 1/2 → 3/2 → 3/5
        assert_eq!(apply(&w, &q(1, 2)), q(3, 5));
    }

    #[test]
    fn word_for_matrix_round_trips() {
        let samples = [
            Mat2::new(2, 1, 1, 1),
            Mat2::new(0, -1, 1, 0),
            Mat2::new(-1, 0, 0, 1),
            Mat2::new(3, 5, 1, 2),
            Mat2::new(1, 0, 0, -1),
            Mat2::new(-2, 1, -5, 2),
            Mat2::new(0, 1, 1, 0),
        ];
        for m in samples {
            let (w, mirrored) = word_for_matrix(&m);
            let mut got = w.matrix();
            if mirrored {
                got = got.compose(&Mat2::mirror());
            }
            for x in [q(1, 2), q(-3, 7), q(5, 1), q(1, 0), q(0, 1)] {
                assert_eq!(got.apply(&x), m.apply(&x), "{m} {w:?}");
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let a = SquareTangle::filled(q(-1, 3), q(2, 5), q(2, 5), q(-1, 2));
        let b = SquareTangle::filled(q(2, 5), q(-1, 3), q(2, 5), q(-1, 2));
        assert_eq!(square_normalize(&a).unwrap(), square_normalize(&b).unwrap());
        let c = SquareTangle::filled(q(2, 3), q(-3, 5), q(-1, 2), q(2, 5));
        assert_eq!(square_normalize(&a).unwrap().form, square_normalize(&c).unwrap().form);
        let d = SquareTangle::filled(q(1, 3), q(1, 3), q(1, 3), q(1, 3));
        let nd = square_normalize(&d).unwrap();
        let nm = square_normalize(&d.mirror()).unwrap();
        assert_eq!(nd.form, nm.form);
        assert_ne!(nd.mirrored, nm.mirrored);
        assert!(square_normalize(&SquareTangle::filled(q(1, 1), q(1, 3), q(1, 3), q(1, 3))).is_err());
    }

    #[test]
    fn mutate_examples() {
        let a = SquareTangle::filled(q(-1, 3), q(2, 5), q(2, 5), q(-1, 2));
        let m = mutate(&a, PairSite::First).unwrap();
        assert_eq!(m, SquareTangle::filled(q(2, 5), q(-1, 3), q(2, 5), q(-1, 2)));
        assert_eq!(mutate(&m, PairSite::First).unwrap(), a);
        let holed = SquareTangle { slots: [Slot::Value(q(1, 3)), Slot::Value(q(1, 2)), Slot::Hole, Slot::Value(q(1, 2))] };
        assert_eq!(mutate(&holed, PairSite::Second), Err(TangleError::HoleInPair));
    }

    #[test]
    fn shape_test() {
        assert!(has_small_shape(&SquareTangle::filled(q(-1, 3), q(1, 2), q(1, 3), q(-1, 2))));
        assert!(!has_small_shape(&SquareTangle::filled(q(1, 3), q(1, 2), q(1, 5), q(1, 7))));
    }

    #[test]
    fn normalization_collapses_rational_regions() {
        let t = TangleExpr::type_two(q(1, 2), TangleExpr::Leaf(q(3, 1))).unwrap();
        assert_eq!(t.fraction(), Some(q(7, 2)));
        let t = TangleExpr::sym(Symmetry::R, TangleExpr::Leaf(q(2, 3)));
        assert_eq!(t.fraction(), Some(q(-3, 2)));
        let t = TangleExpr::braid(BraidWord(vec![BraidLetter::HPlus]), TangleExpr::type_one(q(1, 2), q(1, 3)).unwrap());
        match normalize(&t) {
            Norm::Sum { pieces, .. } => assert_eq!(pieces.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complement_of_square_pair() {
        let k = SquareTangle::filled(q(-1, 3), q(1, 2), q(1, 3), q(-1, 2)).to_knot().unwrap();
        let n = normalize(&k.root);
        // root = Sum[α, β, Mark(r, Sum[γ, δ])]
        let c = complement(&n, &[2]).unwrap();
        match c {
            Norm::Sum { pieces, .. } => assert_eq!(pieces.len(), 3),
            other => panic!("{other:?}"),
        }
        let c = complement(&n, &[2, 0]).unwrap();
        assert!(matches!(c, Norm::Mark { .. }));
    }

    #[test]
    fn replace_slot() {
        let t = TangleExpr::type_one(q(1, 2), q(1, 3)).unwrap();
        let r = t.replace_at(&[0], TangleExpr::Leaf(q(2, 1))).unwrap();
        assert_eq!(r.fraction(), Some(q(7, 3)));
        assert!(t.replace_at(&[3], TangleExpr::Leaf(q(2, 1))).is_err());
    }
}
