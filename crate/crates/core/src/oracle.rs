//! Independent check on unknotting claims: planar diagrams are built from
//! tangle trees crossing by crossing, and the Kauffman bracket, Jones
//! polynomial and determinant are evaluated exactly.
//!
//! A crossing is a counter-clockwise 4-tuple of edge labels; the under
//! strand joins slots 0 and 2.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::slopes::{cf_canonical_positive, tangle_crossing_count, ExtRational};
use crate::tangles::{BraidLetter, Knot, Symmetry, TangleExpr};

pub const DEFAULT_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("diagram needs {needed} crossings, cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("coefficient overflow")]
    Overflow,
    #[error("malformed diagram: {0}")]
    Malformed(String),
}

/// Laurent polynomial in one variable with i64 coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Laurent(BTreeMap<i32, i64>);

impl Laurent {
    pub fn one() -> Self {
        Laurent::monomial(0, 1)
    }

    pub fn monomial(e: i32, c: i64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(e, c);
        }
        Laurent(m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_one(&self) -> bool {
        *self == Laurent::one()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, e: i32, c: i64) -> Result<(), OracleError> {
        let slot = self.0.entry(e).or_insert(0);
        *slot = slot.checked_add(c).ok_or(OracleError::Overflow)?;
        if *slot == 0 {
            self.0.remove(&e);
        }
        Ok(())
    }

    pub fn add(&self, o: &Laurent) -> Result<Laurent, OracleError> {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(e, c)?;
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Laurent) -> Result<Laurent, OracleError> {
        let mut out = Laurent::default();
        for (e1, c1) in self.terms() {
            for (e2, c2) in o.terms() {
                out.add_term(e1 + e2, c1.checked_mul(c2).ok_or(OracleError::Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn shift(&self, k: i32) -> Laurent {
        Laurent(self.0.iter().map(|(&e, &c)| (e + k, c)).collect())
    }

    pub fn scale(&self, k: i64) -> Result<Laurent, OracleError> {
        let mut out = Laurent::default();
        for (e, c) in self.terms() {
            out.add_term(e, c.checked_mul(k).ok_or(OracleError::Overflow)?)?;
        }
        Ok(out)
    }

    /// Exact division by d = −A² − A⁻².
    fn div_loop(&self) -> Result<Laurent, OracleError> {
        // work with −(A⁴+1) after multiplying by A²
        let mut rem = self.shift(2).scale(-1)?;
        let mut quo = Laurent::default();
        while let Some((&top, &c)) = rem.0.iter().next_back() {
            quo.add_term(top - 4, c)?;
            rem.add_term(top, -c)?;
            rem.add_term(top - 4, c.checked_neg().ok_or(OracleError::Overflow)?)?;
            if rem.0.keys().next().is_some_and(|&e| e < top - 4 - 4 * 64) {
                break;
            }
            if quo.0.len() > 4096 {
                return Err(OracleError::Malformed("bracket not divisible by the loop value".into()));
            }
        }
        if !rem.is_zero() {
            return Err(OracleError::Malformed("bracket not divisible by the loop value".into()));
        }
        Ok(quo)
    }

    /// Value at A = ζ₈ in the basis 1, ζ, ζ², ζ³ (ζ⁴ = −1).
    pub fn at_zeta8(&self) -> Result<[i64; 4], OracleError> {
        let mut v = [0i64; 4];
        for (e, c) in self.terms() {
            let r = e.rem_euclid(8) as usize;
            let (i, s) = if r < 4 { (r, c) } else { (r - 4, c.checked_neg().ok_or(OracleError::Overflow)?) };
            v[i] = v[i].checked_add(s).ok_or(OracleError::Overflow)?;
        }
        Ok(v)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let coeff = if mag == 1 && e != 0 { String::new() } else { mag.to_string() };
            let var = match e {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{e}"),
            };
            write!(f, "{sign}{coeff}{var}")?;
            first = false;
        }
        Ok(())
    }
}

/// A closed link diagram.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlanarDiagram {
    pub crossings: Vec<[usize; 4]>,
    /// Components without crossings.
    pub free_loops: usize,
}

#[derive(Clone, Debug)]
struct Piece {
    crossings: Vec<[usize; 4]>,
    nw: usize,
    ne: usize,
    sw: usize,
    se: usize,
}

struct Builder {
    parent: Vec<usize>,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn zero(&mut self) -> Piece {
        let (top, bottom) = (self.fresh(), self.fresh());
        Piece { crossings: vec![], nw: top, ne: top, sw: bottom, se: bottom }
    }

    fn infinity(&mut self) -> Piece {
        let (left, right) = (self.fresh(), self.fresh());
        Piece { crossings: vec![], nw: left, sw: left, ne: right, se: right }
    }

    fn unit(&mut self) -> Piece {
        let (sw, se, ne, nw) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
        Piece { crossings: vec![[sw, se, ne, nw]], nw, ne, sw, se }
    }

    fn sum(&mut self, a: Piece, b: Piece) -> Piece {
        self.union(a.ne, b.nw);
        self.union(a.se, b.sw);
        let mut crossings = a.crossings;
        crossings.extend(b.crossings);
        Piece { crossings, nw: a.nw, sw: a.sw, ne: b.ne, se: b.se }
    }

    fn integer(&mut self, k: i64) -> Piece {
        let mut t = self.zero();
        for _ in 0..k.unsigned_abs() {
            let u = self.unit();
            t = self.sum(t, u);
        }
        if k < 0 {
            mirror(t)
        } else {
            t
        }
    }

    fn rational(&mut self, x: &ExtRational) -> Piece {
        if x.is_infinite() {
            return self.infinity();
        }
        if x.is_zero() {
            return self.zero();
        }
        let cf = cf_canonical_positive(&x.abs()).expect("positive");
        let mut it = cf.entries.iter().map(|e| e.to_i64().expect("capped size"));
        let first = it.next().expect("non-empty");
        let mut t = self.integer(first);
        for a in it {
            let head = self.integer(a);
            t = self.sum(head, diag0(t));
        }
        if x.is_negative() {
            mirror(t)
        } else {
            t
        }
    }

    fn letter(&mut self, l: BraidLetter, t: Piece) -> Piece {
        match l {
            BraidLetter::HPlus => {
                let u = self.integer(1);
                self.sum(t, u)
            }
            BraidLetter::HMinus => {
                let u = self.integer(-1);
                self.sum(t, u)
            }
            BraidLetter::VPlus | BraidLetter::VMinus => {
                let k = if l == BraidLetter::VPlus { -1 } else { 1 };
                let u = self.integer(k);
                let s = self.sum(rot(t), u);
                rot_inverse(s)
            }
        }
    }

    fn expr(&mut self, e: &TangleExpr) -> Piece {
        match e {
            TangleExpr::Leaf(x) => self.rational(x),
            TangleExpr::TypeI(a, b) => {
                let (pa, pb) = (self.rational(a), self.rational(b));
                self.sum(pa, pb)
            }
            TangleExpr::TypeII(g, x) => {
                let pg = self.rational(g);
                let px = self.expr(x);
                self.sum(pg, px)
            }
            TangleExpr::TypeIII(l, r) => {
                let pl = self.expr(l);
                let pr = self.expr(r);
                self.sum(pl, pr)
            }
            TangleExpr::Braid(w, x) => {
                let mut t = self.expr(x);
                for &l in &w.0 {
                    t = self.letter(l, t);
                }
                t
            }
            TangleExpr::Symmetry(s, x) => {
                let t = self.expr(x);
                match s {
                    Symmetry::R => rot(t),
                    Symmetry::Mirror => mirror(t),
                    Symmetry::Diag0 => diag0(t),
                    Symmetry::H => flip_h(t),
                    Symmetry::V => flip_v(t),
                }
            }
        }
    }
}

/// Quarter turn counter-clockwise.
fn rot(t: Piece) -> Piece {
    Piece { crossings: t.crossings, nw: t.ne, sw: t.nw, se: t.sw, ne: t.se }
}

fn rot_inverse(t: Piece) -> Piece {
    Piece { crossings: t.crossings, ne: t.nw, nw: t.sw, sw: t.se, se: t.ne }
}

fn mirror(mut t: Piece) -> Piece {
    for c in &mut t.crossings {
        *c = [c[1], c[2], c[3], c[0]];
    }
    t
}

fn reflect_tuples(t: &mut Piece) {
    for c in &mut t.crossings {
        *c = [c[0], c[3], c[2], c[1]];
    }
}

fn reverse_tuples(t: &mut Piece) {
    for c in &mut t.crossings {
        c.reverse();
    }
}

/// Reflection in the NW–SE diagonal.
fn diag0(mut t: Piece) -> Piece {
    reflect_tuples(&mut t);
    Piece { ne: t.sw, sw: t.ne, ..t }
}

/// π-rotation about the horizontal axis.
fn flip_h(mut t: Piece) -> Piece {
    reverse_tuples(&mut t);
    Piece { nw: t.sw, sw: t.nw, ne: t.se, se: t.ne, ..t }
}

/// π-rotation about the vertical axis.
fn flip_v(mut t: Piece) -> Piece {
    reverse_tuples(&mut t);
    Piece { nw: t.ne, ne: t.nw, sw: t.se, se: t.sw, ..t }
}

fn estimate(e: &TangleExpr) -> BigInt {
    match e {
        TangleExpr::Leaf(x) => tangle_crossing_count(x),
        TangleExpr::TypeI(a, b) => tangle_crossing_count(a) + tangle_crossing_count(b),
        TangleExpr::TypeII(g, x) => tangle_crossing_count(g) + estimate(x),
        TangleExpr::TypeIII(l, r) => estimate(l) + estimate(r),
        TangleExpr::Braid(w, x) => BigInt::from(w.0.len()) + estimate(x),
        TangleExpr::Symmetry(_, x) => estimate(x),
    }
}

/// Crossings of the diagram `tree_to_diagram` would build.
pub fn crossing_estimate(k: &Knot) -> BigInt {
    estimate(&k.root)
}

/// The numerator closure of the tree, as a diagram.
pub fn tree_to_diagram(k: &Knot, cap: usize) -> Result<PlanarDiagram, OracleError> {
    let needed = crossing_estimate(k);
    if needed > BigInt::from(cap) {
        return Err(OracleError::CapExceeded { needed: needed.to_usize().unwrap_or(usize::MAX), cap });
    }
    let mut b = Builder { parent: Vec::new() };
    let t = b.expr(&k.root);
    b.union(t.nw, t.ne);
    b.union(t.sw, t.se);
    let mut crossings = t.crossings;
    for c in &mut crossings {
        for e in c.iter_mut() {
            *e = b.find(*e);
        }
    }
    let mut used: HashMap<usize, usize> = HashMap::new();
    for c in &crossings {
        for &e in c {
            *used.entry(e).or_insert(0) += 1;
        }
    }
    let mut roots: Vec<usize> = (0..b.parent.len()).map(|x| b.find(x)).collect();
    roots.sort_unstable();
    roots.dedup();
    let free_loops = roots.iter().filter(|r| !used.contains_key(r)).count();
    // compact labels
    let mut label: HashMap<usize, usize> = HashMap::new();
    for c in &mut crossings {
        for e in c.iter_mut() {
            let n = label.len();
            *e = *label.entry(*e).or_insert(n);
        }
    }
    let d = PlanarDiagram { crossings, free_loops };
    d.check()?;
    Ok(d)
}

/// Traversal data: for every crossing, whether the under strand enters at
/// slot 0 and whether the over strand enters at slot 3.
struct Orientation {
    under_from_0: Vec<bool>,
    over_from_3: Vec<bool>,
    components: usize,
}

impl PlanarDiagram {
    /// Knot Atlas PD codes (first slot the incoming under strand).
    pub fn from_pd(codes: &[[usize; 4]]) -> Result<Self, OracleError> {
        let d = PlanarDiagram { crossings: codes.to_vec(), free_loops: 0 };
        d.check()?;
        Ok(d)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    fn occurrences(&self) -> HashMap<usize, Vec<(usize, usize)>> {
        let mut occ: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (i, c) in self.crossings.iter().enumerate() {
            for (s, &e) in c.iter().enumerate() {
                occ.entry(e).or_default().push((i, s));
            }
        }
        occ
    }

    fn check(&self) -> Result<(), OracleError> {
        for (e, v) in self.occurrences() {
            if v.len() != 2 {
                return Err(OracleError::Malformed(format!("edge {e} used {} times", v.len())));
            }
        }
        Ok(())
    }

    fn orient(&self) -> Orientation {
        let occ = self.occurrences();
        let n = self.crossings.len();
        let mut seen = vec![[false; 4]; n];
        let mut under_from_0 = vec![true; n];
        let mut over_from_3 = vec![true; n];
        let mut components = self.free_loops;
        for start in 0..n {
            for s0 in 0..4 {
                if seen[start][s0] {
                    continue;
                }
                components += 1;
                // enter `start` at slot s0 and walk
                let (mut c, mut s) = (start, s0);
                loop {
                    let out = (s + 2) % 4;
                    seen[c][s] = true;
                    seen[c][out] = true;
                    match s {
                        0 => under_from_0[c] = true,
                        2 => under_from_0[c] = false,
                        3 => over_from_3[c] = true,
                        _ => over_from_3[c] = false,
                    }
                    let e = self.crossings[c][out];
                    let pair = &occ[&e];
                    let next = if pair[0] == (c, out) { pair[1] } else { pair[0] };
                    (c, s) = next;
                    if seen[c][s] {
                        break;
                    }
                }
            }
        }
        Orientation { under_from_0, over_from_3, components }
    }

    pub fn component_count(&self) -> usize {
        self.orient().components
    }

    pub fn writhe(&self) -> i64 {
        let o = self.orient();
        (0..self.crossings.len()).map(|i| if o.under_from_0[i] == o.over_from_3[i] { 1 } else { -1 }).sum()
    }

    /// Processing order keeping the open boundary small.
    fn order(&self) -> Vec<usize> {
        let n = self.crossings.len();
        let mut done = vec![false; n];
        let mut open: HashMap<usize, usize> = HashMap::new();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let pick = (0..n)
                .filter(|&i| !done[i])
                .max_by_key(|&i| {
                    let shared = self.crossings[i].iter().filter(|e| open.contains_key(e)).count() as i64;
                    (shared, -(i as i64))
                })
                .expect("remaining crossing");
            done[pick] = true;
            out.push(pick);
            for &e in &self.crossings[pick] {
                let cnt = open.entry(e).or_insert(0);
                *cnt += 1;
                if *cnt == 2 {
                    open.remove(&e);
                }
            }
        }
        out
    }

    /// Unnormalized Kauffman bracket ⟨D⟩ in A, with ⟨O⟩ = 1.
    pub fn bracket(&self) -> Result<Laurent, OracleError> {
        let loop_value = Laurent::monomial(2, -1).add(&Laurent::monomial(-2, -1))?;
        let mut states: HashMap<Vec<(usize, usize)>, Laurent> = HashMap::new();
        states.insert(Vec::new(), Laurent::one());
        for i in self.order() {
            let c = self.crossings[i];
            let mut next: HashMap<Vec<(usize, usize)>, Laurent> = HashMap::new();
            for (state, poly) in &states {
                for (arcs, exp) in [([(0, 1), (2, 3)], 1), ([(0, 3), (1, 2)], -1)] {
                    let mut partner: BTreeMap<usize, usize> = BTreeMap::new();
                    for &(a, b) in state {
                        partner.insert(a, b);
                        partner.insert(b, a);
                    }
                    let mut loops = 0;
                    for (x, y) in arcs {
                        loops += add_arc(&mut partner, c[x], c[y]);
                    }
                    let mut key: Vec<(usize, usize)> =
                        partner.iter().filter(|(a, b)| a < b).map(|(&a, &b)| (a, b)).collect();
                    key.sort_unstable();
                    let mut term = poly.shift(exp);
                    for _ in 0..loops {
                        term = term.mul(&loop_value)?;
                    }
                    let slot = next.entry(key).or_default();
                    *slot = slot.add(&term)?;
                }
            }
            states = next;
        }
        let mut total = states.remove(&Vec::new()).unwrap_or_default();
        if !states.values().all(Laurent::is_zero) {
            return Err(OracleError::Malformed("open strands after contraction".into()));
        }
        for _ in 0..self.free_loops {
            total = total.mul(&loop_value)?;
        }
        // one circle counts as 1, not d
        total.div_loop()
    }

    fn check_cap(&self, cap: usize) -> Result<(), OracleError> {
        if self.crossings.len() > cap {
            return Err(OracleError::CapExceeded { needed: self.crossings.len(), cap });
        }
        Ok(())
    }

    /// V = (−A³)^(−w)⟨D⟩ as a polynomial in A; t = A⁻⁴.
    pub fn jones_in_a(&self, cap: usize) -> Result<Laurent, OracleError> {
        self.check_cap(cap)?;
        let w = self.writhe();
        let b = self.bracket()?;
        let sign = if w % 2 == 0 { 1 } else { -1 };
        b.shift(-3 * w as i32).scale(sign)
    }

    /// The Jones polynomial in t^(1/2): key 2k stands for t^k.
    pub fn jones(&self, cap: usize) -> Result<BTreeMap<i32, i64>, OracleError> {
        let v = self.jones_in_a(cap)?;
        let mut out = BTreeMap::new();
        for (e, c) in v.terms() {
            if e % 2 != 0 {
                return Err(OracleError::Malformed("odd power of A in Jones".into()));
            }
            out.insert(-e / 2, c);
        }
        Ok(out)
    }

    /// |V(−1)|, via the bracket at A = ζ₈.
    pub fn determinant(&self, cap: usize) -> Result<u64, OracleError> {
        self.check_cap(cap)?;
        let v = self.bracket()?.at_zeta8()?;
        let nonzero: Vec<i64> = v.iter().copied().filter(|&c| c != 0).collect();
        match nonzero.as_slice() {
            [] => Ok(0),
            [c] => Ok(c.unsigned_abs()),
            _ => Err(OracleError::Malformed(format!("bracket at ζ₈ is not a unit multiple of an integer: {v:?}"))),
        }
    }

    /// Determinant 1 and Jones polynomial 1.
    pub fn looks_unknotted(&self, cap: usize) -> Result<bool, OracleError> {
        Ok(self.component_count() == 1 && self.determinant(cap)? == 1 && self.jones_in_a(cap)?.is_one())
    }

    /// One `X[a,b,c,d]` line per crossing, labels from 1, first slot the
    /// incoming under strand.
    pub fn pd_code(&self) -> String {
        let o = self.orient();
        let mut lines = Vec::new();
        for (i, c) in self.crossings.iter().enumerate() {
            let t = if o.under_from_0[i] { *c } else { [c[2], c[3], c[0], c[1]] };
            lines.push(format!("X[{},{},{},{}]", t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1));
        }
        if self.free_loops > 0 {
            lines.push(format!("# free loops: {}", self.free_loops));
        }
        lines.join("\n")
    }
}

/// Joins the path ends at edges x and y; returns the number of closed loops.
fn add_arc(partner: &mut BTreeMap<usize, usize>, x: usize, y: usize) -> usize {
    if x == y {
        return 1;
    }
    if partner.get(&x) == Some(&y) {
        partner.remove(&x);
        partner.remove(&y);
        return 1;
    }
    let ex = match partner.remove(&x) {
        Some(px) => {
            partner.remove(&px);
            px
        }
        None => x,
    };
    let ey = match partner.remove(&y) {
        Some(py) => {
            partner.remove(&py);
            py
        }
        None => y,
    };
    partner.insert(ex, ey);
    partner.insert(ey, ex);
    0
}

/// Summary of an oracle evaluation of a closed tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OracleReport {
    pub crossings: usize,
    pub components: usize,
    pub determinant: u64,
    pub jones_is_one: bool,
}

impl OracleReport {
    pub fn unknotted(&self) -> bool {
        self.components == 1 && self.determinant == 1 && self.jones_is_one
    }
}

pub fn evaluate(k: &Knot, cap: usize) -> Result<OracleReport, OracleError> {
    let d = tree_to_diagram(k, cap)?;
    Ok(OracleReport {
        crossings: d.crossing_count(),
        components: d.component_count(),
        determinant: d.determinant(cap)?,
        jones_is_one: d.jones_in_a(cap)?.is_one(),
    })
}
