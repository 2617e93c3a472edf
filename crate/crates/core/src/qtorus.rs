//! The quantum torus of rank `r` and its action on colored-sequence space.
//!
//! Elements are noncommutative Laurent polynomials in `nu_i`, `Lam_i` with
//! coefficients in the rational functions of `q` and `g`, normal-ordered with
//! every `nu` to the left of every `Lam`. The torus acts on maps
//! `Z^r -> C(q)[g^{+-1}]` by `nu_i f(k) = q^{k_i} f(k)` and
//! `Lam_i f(k) = f(.., k_i - 1, ..)`. Composing the two actions gives the
//! commutation rule `Lam_i nu_i = q^{-1} nu_i Lam_i` (cross indices commute),
//! which is the convention used throughout this module.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::poly::{
    qbinom_int, qg_table, LaurentPoly, PolyError, RatFunc, VarTable,
};

#[derive(Debug, Error)]
pub enum QtorusError {
    #[error("rank mismatch between operands")]
    RankMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("operator parse error: {0}")]
    Parse(String),
}

/// Exponent of q in `Lam_i nu_i = q^c nu_i Lam_i`, fixed by requiring that
/// multiplication matches operator composition on sequences.
pub const COMMUTATION_EXPONENT: i64 = -1;

/// A normal-ordered element of the rank-`r` quantum torus: terms
/// `coeff(q, g) * nu^a * Lam^b`, keyed by the exponent pair `(a, b)`.
#[derive(Debug, Clone)]
pub struct TorusElem {
    r: usize,
    terms: BTreeMap<(Vec<i32>, Vec<i32>), RatFunc>,
}

impl PartialEq for TorusElem {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.terms == other.terms
    }
}

impl TorusElem {
    pub fn zero(r: usize) -> Self {
        TorusElem {
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(r: usize) -> Self {
        Self::scalar(r, RatFunc::one(&qg_table()))
    }

    /// A scalar coefficient (element of C(q)[g^{+-1}]).
    pub fn scalar(r: usize, c: RatFunc) -> Self {
        let mut e = Self::zero(r);
        if !c.is_zero() {
            e.terms.insert((vec![0; r], vec![0; r]), c);
        }
        e
    }

    pub fn from_int(r: usize, c: i64) -> Self {
        let table = qg_table();
        Self::scalar(r, RatFunc::from_poly(LaurentPoly::from_int(&table, c)))
    }

    /// nu_i^e
    pub fn nu_pow(r: usize, i: usize, e: i32) -> Self {
        assert!(i < r);
        let mut a = vec![0; r];
        a[i] = e;
        let mut el = Self::zero(r);
        el.terms.insert((a, vec![0; r]), RatFunc::one(&qg_table()));
        el
    }

    /// Lam_i^e
    pub fn lam_pow(r: usize, i: usize, e: i32) -> Self {
        assert!(i < r);
        let mut b = vec![0; r];
        b[i] = e;
        let mut el = Self::zero(r);
        el.terms.insert((vec![0; r], b), RatFunc::one(&qg_table()));
        el
    }

    /// q^e or g^e as a scalar.
    pub fn coeff_var_pow(r: usize, name: &str, e: i32) -> Self {
        let table = qg_table();
        let i = table.index(name).expect("coefficient variable");
        let p = LaurentPoly::var_pow(&table, i, e).unwrap();
        Self::scalar(r, RatFunc::from_poly(p))
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<i32>, Vec<i32>), &RatFunc)> {
        self.terms.iter()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QtorusError> {
        if self.r != other.r {
            return Err(QtorusError::RankMismatch);
        }
        let mut out = self.clone();
        for (key, c) in &other.terms {
            let cur = match out.terms.remove(key) {
                Some(prev) => prev.checked_add(c)?,
                None => c.clone(),
            };
            if !cur.is_zero() {
                out.terms.insert(key.clone(), cur);
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QtorusError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<Self, QtorusError> {
        let mut acc = Self::one(self.r);
        for _ in 0..e {
            acc = torus_mul(&acc, self)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for TorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (i, &e) in a.iter().enumerate() {
                if e != 0 {
                    write!(f, "*nu{}^{}", i + 1, e)?;
                }
            }
            for (i, &e) in b.iter().enumerate() {
                if e != 0 {
                    write!(f, "*L{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// Normal-ordered product: all `nu`s are moved left of all `Lam`s, picking up
/// `q^{COMMUTATION_EXPONENT * <b, c>}` when `Lam^b` passes `nu^c`.
pub fn torus_mul(x: &TorusElem, y: &TorusElem) -> Result<TorusElem, QtorusError> {
    if x.r != y.r {
        return Err(QtorusError::RankMismatch);
    }
    let table = qg_table();
    let qi = table.index("q").unwrap();
    let mut out = TorusElem::zero(x.r);
    for ((a1, b1), c1) in &x.terms {
        for ((a2, b2), c2) in &y.terms {
            let cross: i64 = b1
                .iter()
                .zip(a2)
                .map(|(&u, &v)| u as i64 * v as i64)
                .sum();
            let qpow = LaurentPoly::var_pow(
                &table,
                qi,
                i32::try_from(COMMUTATION_EXPONENT * cross).expect("exponent fits"),
            )?;
            let coeff = c1
                .checked_mul(c2)?
                .checked_mul(&RatFunc::from_poly(qpow))?;
            let key = (
                a1.iter().zip(a2).map(|(u, v)| u + v).collect::<Vec<i32>>(),
                b1.iter().zip(b2).map(|(u, v)| u + v).collect::<Vec<i32>>(),
            );
            let cur = match out.terms.remove(&key) {
                Some(prev) => prev.checked_add(&coeff)?,
                None => coeff,
            };
            if !cur.is_zero() {
                out.terms.insert(key, cur);
            }
        }
    }
    Ok(out)
}

/// A map `Z^r -> C(q)[g^{+-1}]`, evaluated lazily and memoized. The callback
/// must be pure; memo writes of identical values are idempotent, so shared
/// use from several threads is safe.
#[derive(Clone)]
pub struct ColoredSeq {
    r: usize,
    eval: Arc<dyn Fn(&[i64]) -> RatFunc + Send + Sync>,
    memo: Arc<Mutex<HashMap<Vec<i64>, RatFunc>>>,
}

impl ColoredSeq {
    pub fn new(r: usize, eval: impl Fn(&[i64]) -> RatFunc + Send + Sync + 'static) -> Self {
        ColoredSeq {
            r,
            eval: Arc::new(eval),
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn value(&self, k: &[i64]) -> RatFunc {
        assert_eq!(k.len(), self.r);
        if let Some(v) = self.memo.lock().unwrap().get(k) {
            return v.clone();
        }
        let v = (self.eval)(k);
        self.memo
            .lock()
            .unwrap()
            .entry(k.to_vec())
            .or_insert_with(|| v.clone());
        v
    }

    /// The sequence `k -> qBinomial(n, k)` of colored unknot values, rank 1.
    pub fn colored_unknot(n: u32) -> Self {
        let table = qg_table();
        let qi = table.index("q").unwrap();
        ColoredSeq::new(1, move |k| {
            RatFunc::from_poly(qbinom_int(&table, qi, n, k[0]))
        })
    }

    /// The constant sequence 1 (a convenient negative control).
    pub fn constant_one(r: usize) -> Self {
        let table = qg_table();
        ColoredSeq::new(r, move |_| RatFunc::one(&table))
    }

    /// Finite support: zero outside the listed points.
    pub fn from_points(r: usize, points: Vec<(Vec<i64>, RatFunc)>) -> Self {
        let table = qg_table();
        ColoredSeq::new(r, move |k| {
            points
                .iter()
                .find(|(p, _)| p == k)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| RatFunc::zero(&table))
        })
    }
}

/// Apply a torus element to a sequence: a normal-ordered term
/// `c(q,g) nu^a Lam^b` sends `f` to `k -> c(q,g) q^{<a,k>} f(k - b)`.
pub fn act(x: &TorusElem, f: &ColoredSeq) -> Result<ColoredSeq, QtorusError> {
    if x.r != f.r {
        return Err(QtorusError::RankMismatch);
    }
    let x = x.clone();
    let f = f.clone();
    let table = qg_table();
    let qi = table.index("q").unwrap();
    Ok(ColoredSeq::new(x.r, move |k| {
        let mut total = RatFunc::zero(&table);
        for ((a, b), c) in &x.terms {
            let nu_exp: i64 = a.iter().zip(k).map(|(&e, &ki)| e as i64 * ki).sum();
            let qpow = LaurentPoly::var_pow(&table, qi, i32::try_from(nu_exp).unwrap())
                .expect("q is invertible");
            let shifted: Vec<i64> = k.iter().zip(b).map(|(&ki, &bi)| ki - bi as i64).collect();
            let term = c
                .checked_mul(&RatFunc::from_poly(qpow))
                .and_then(|t| t.checked_mul(&f.value(&shifted)))
                .expect("coefficient arithmetic cannot fail on matching tables");
            total = total.checked_add(&term).expect("matching tables");
        }
        total
    }))
}

/// The recursion operator annihilating the colored unknot values:
/// `(nu - nu^-1) - Lam * (g nu^-1 - g^-1 nu)`, normal-ordered to
/// `nu - nu^-1 - q g nu^-1 Lam + q^-1 g^-1 nu Lam`.
pub fn unknot_operator() -> TorusElem {
    let nu = TorusElem::nu_pow(1, 0, 1);
    let nu_inv = TorusElem::nu_pow(1, 0, -1);
    let lam = TorusElem::lam_pow(1, 0, 1);
    let g = TorusElem::coeff_var_pow(1, "g", 1);
    let g_inv = TorusElem::coeff_var_pow(1, "g", -1);
    let bracket = torus_mul(&g, &nu_inv)
        .unwrap()
        .checked_sub(&torus_mul(&g_inv, &nu).unwrap())
        .unwrap();
    nu.checked_sub(&nu_inv)
        .unwrap()
        .checked_sub(&torus_mul(&lam, &bracket).unwrap())
        .unwrap()
}

/// Commutative table for classical limits: `g`, then `nu_i`, then `Lam_i`,
/// named to match the presentation rings (`nu`/`Lam` when r = 1).
pub fn classical_table(r: usize) -> Arc<VarTable> {
    let mut names: Vec<(String, bool)> = vec![("g".to_string(), true)];
    for i in 0..r {
        if r == 1 {
            names.push(("nu".to_string(), true));
        } else {
            names.push((format!("nu{}", i + 1), true));
        }
    }
    for i in 0..r {
        if r == 1 {
            names.push(("Lam".to_string(), true));
        } else {
            names.push((format!("Lam{}", i + 1), true));
        }
    }
    let refs: Vec<(&str, bool)> = names.iter().map(|(n, i)| (n.as_str(), *i)).collect();
    VarTable::new(&refs).unwrap()
}

/// Set q = 1: coefficients become Laurent polynomials in g and the exponent
/// data becomes a commutative monomial in nu_i, Lam_i. Errors if any
/// coefficient has a pole at q = 1.
pub fn classical_limit(x: &TorusElem) -> Result<LaurentPoly, QtorusError> {
    let target = classical_table(x.r);
    let qg = qg_table();
    let qi = qg.index("q").unwrap();
    let gi = qg.index("g").unwrap();
    let mut out = LaurentPoly::zero(&target);
    for ((a, b), c) in &x.terms {
        let at_one = c.eval_q1(qi)?;
        // q-exponents are zero now; move g into the target table
        let mut map = vec![None; qg.len()];
        map[gi] = Some(0);
        map[qi] = None;
        let g_part = at_one
            .map_table(&target, &map)
            .expect("q eliminated by the limit");
        let mut exps = vec![0; target.len()];
        for (i, &e) in a.iter().enumerate() {
            exps[1 + i] = e;
        }
        for (i, &e) in b.iter().enumerate() {
            exps[1 + x.r + i] = e;
        }
        out = &out + &g_part.mul_mono(&exps);
    }
    Ok(out)
}

/// Report from an annihilation check: the evaluation points (N, k) where the
/// applied operator did not vanish.
#[derive(Debug, Clone)]
pub struct AnnihilationReport {
    pub failures: Vec<(u32, Vec<i64>)>,
    pub points_checked: usize,
}

impl AnnihilationReport {
    pub fn all_zero(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact check that `act(x, f)` vanishes on the box (inclusive ranges per
/// coordinate) for each color count N in `n_range`, substituting g = q^N.
pub fn annihilates(
    x: &TorusElem,
    f: &ColoredSeq,
    boxes: &[(i64, i64)],
    n_range: std::ops::RangeInclusive<u32>,
) -> Result<AnnihilationReport, QtorusError> {
    assert_eq!(boxes.len(), x.r);
    let applied = act(x, f)?;
    let table = qg_table();
    let qi = table.index("q").unwrap();
    let gi = table.index("g").unwrap();
    let mut failures = Vec::new();
    let mut points_checked = 0;
    for n in n_range {
        let g_sub = LaurentPoly::var_pow(&table, qi, n as i32)?;
        let mut map = BTreeMap::new();
        map.insert(gi, g_sub);
        let mut k = boxes.iter().map(|&(lo, _)| lo).collect::<Vec<i64>>();
        loop {
            let v = applied.value(&k).substitute_poly(&map)?;
            points_checked += 1;
            if !v.is_zero() {
                failures.push((n, k.clone()));
            }
            // advance the odometer over the box
            let mut dim = 0;
            loop {
                if dim == k.len() {
                    break;
                }
                k[dim] += 1;
                if k[dim] <= boxes[dim].1 {
                    break;
                }
                k[dim] = boxes[dim].0;
                dim += 1;
            }
            if dim == k.len() {
                break;
            }
        }
    }
    Ok(AnnihilationReport {
        failures,
        points_checked,
    })
}

// ---------------------------------------------------------------------------
// Operator literals
// ---------------------------------------------------------------------------

/// Parse an operator literal such as `nu - nu^-1 - L*(g*nu^-1 - g^-1*nu)`.
/// Atoms: `nu`/`L` (rank 1) or `nu3`/`L2` (indexed), `q`, `g`, integers,
/// `^` with an integer exponent, `*`, `+`, `-`, parentheses. Products are
/// taken left to right with no implicit reordering.
pub fn parse_operator(src: &str, r: usize) -> Result<TorusElem, QtorusError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        r,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(QtorusError::Parse(format!(
            "unexpected trailing input at token {}",
            p.pos
        )));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, QtorusError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Tok::Int(s.parse().map_err(|_| {
                    QtorusError::Parse(format!("bad integer `{s}`"))
                })?));
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => {
                return Err(QtorusError::Parse(format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    r: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<TorusElem, QtorusError> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.checked_add(&rhs)?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.checked_sub(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<TorusElem, QtorusError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = torus_mul(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TorusElem, QtorusError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.signed_int()?;
            return self.pow_atom(base, e);
        }
        Ok(base)
    }

    /// Integer powers; negative powers are only defined for single-variable
    /// atoms, which is all the literal syntax produces under `^`.
    fn pow_atom(&mut self, base: TorusElem, e: i64) -> Result<TorusElem, QtorusError> {
        if e >= 0 {
            return base.pow(e as u32);
        }
        // invert a one-term monomial atom
        if base.terms.len() != 1 {
            return Err(QtorusError::Parse(
                "negative exponent on a non-monomial".to_string(),
            ));
        }
        let ((a, b), c) = base.terms.iter().next().unwrap();
        if !c.is_polynomial() || c.num().num_terms() != 1 {
            return Err(QtorusError::Parse(
                "negative exponent on a non-monomial coefficient".to_string(),
            ));
        }
        if a.iter().chain(b).filter(|&&x| x != 0).count() > 1 {
            return Err(QtorusError::Parse(
                "negative exponent on a mixed monomial".to_string(),
            ));
        }
        let mut out = TorusElem::zero(base.r);
        let key = (
            a.iter().map(|&x| -x).collect::<Vec<i32>>(),
            b.iter().map(|&x| -x).collect::<Vec<i32>>(),
        );
        out.terms.insert(key, c.inverse()?);
        out.pow(e.unsigned_abs() as u32)
    }

    fn signed_int(&mut self) -> Result<i64, QtorusError> {
        let mut sign = 1;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            sign = -1;
        }
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(sign * v)
            }
            other => Err(QtorusError::Parse(format!(
                "expected integer exponent, found {other:?}"
            ))),
        }
    }

    fn atom(&mut self) -> Result<TorusElem, QtorusError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(QtorusError::Parse("missing `)`".to_string()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(TorusElem::from_int(self.r, v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.named_atom(&name)
            }
            other => Err(QtorusError::Parse(format!(
                "expected an atom, found {other:?}"
            ))),
        }
    }

    fn named_atom(&self, name: &str) -> Result<TorusElem, QtorusError> {
        if name == "q" || name == "g" {
            return Ok(TorusElem::coeff_var_pow(self.r, name, 1));
        }
        let (stem, index) = split_index(name);
        let i = match index {
            Some(i) if i >= 1 && i <= self.r => i - 1,
            Some(i) => {
                return Err(QtorusError::Parse(format!(
                    "index {i} out of range for rank {}",
                    self.r
                )))
            }
            None if self.r == 1 => 0,
            None => {
                return Err(QtorusError::Parse(format!(
                    "`{name}` needs an index for rank {}",
                    self.r
                )))
            }
        };
        match stem {
            "nu" => Ok(TorusElem::nu_pow(self.r, i, 1)),
            "L" | "Lam" => Ok(TorusElem::lam_pow(self.r, i, 1)),
            _ => Err(QtorusError::Parse(format!("unknown symbol `{name}`"))),
        }
    }
}

fn split_index(name: &str) -> (&str, Option<usize>) {
    let stem_len = name
        .find(|c: char| c.is_ascii_digit())
        .unwrap_or(name.len());
    let (stem, digits) = name.split_at(stem_len);
    if digits.is_empty() {
        (stem, None)
    } else {
        (stem, digits.parse().ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;
    use crate::ngalg::{relations, PresentOptions};
    use crate::poly::Coeff;
    use num::One;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn q_pow(e: i32) -> RatFunc {
        let t = qg_table();
        RatFunc::from_poly(LaurentPoly::var_pow(&t, 0, e).unwrap())
    }

    fn random_elem(rng: &mut StdRng, r: usize, terms: usize) -> TorusElem {
        let mut e = TorusElem::zero(r);
        for _ in 0..terms {
            let a: Vec<i32> = (0..r).map(|_| rng.gen_range(-2..=2)).collect();
            let b: Vec<i32> = (0..r).map(|_| rng.gen_range(-2..=2)).collect();
            let c = rng.gen_range(-3i64..=3);
            let qe = rng.gen_range(-2..=2);
            let t = qg_table();
            let coeff = RatFunc::from_poly(
                LaurentPoly::var_pow(&t, 0, qe).unwrap().scale(&Coeff::from_integer(c.into())),
            );
            let mut term = TorusElem::zero(r);
            if !coeff.is_zero() {
                term.terms.insert((a, b), coeff);
            }
            e = e.checked_add(&term).unwrap();
        }
        e
    }

    #[test]
    fn commutation_rule() {
        let nu = TorusElem::nu_pow(1, 0, 1);
        let lam = TorusElem::lam_pow(1, 0, 1);
        let lhs = torus_mul(&lam, &nu).unwrap();
        let mut expect = torus_mul(&nu, &lam).unwrap();
        for c in expect.terms.values_mut() {
            *c = c.checked_mul(&q_pow(-1)).unwrap();
        }
        assert_eq!(lhs, expect);
        // cross indices commute
        let nu2 = TorusElem::nu_pow(2, 1, 1);
        let lam1 = TorusElem::lam_pow(2, 0, 1);
        assert_eq!(
            torus_mul(&lam1, &nu2).unwrap(),
            torus_mul(&nu2, &lam1).unwrap()
        );
    }

    #[test]
    fn binomial_square_expansion() {
        // (nu + Lam)^2 = nu^2 + (1 + q^c) nu Lam + Lam^2
        let nu = TorusElem::nu_pow(1, 0, 1);
        let lam = TorusElem::lam_pow(1, 0, 1);
        let s = nu.checked_add(&lam).unwrap();
        let sq = torus_mul(&s, &s).unwrap();
        let middle = torus_mul(&nu, &lam).unwrap();
        let mut expect = torus_mul(&nu, &nu).unwrap();
        expect = expect.checked_add(&torus_mul(&lam, &lam).unwrap()).unwrap();
        expect = expect.checked_add(&middle).unwrap();
        let mut shifted = middle.clone();
        for c in shifted.terms.values_mut() {
            *c = c.checked_mul(&q_pow(COMMUTATION_EXPONENT as i32)).unwrap();
        }
        expect = expect.checked_add(&shifted).unwrap();
        assert_eq!(sq, expect);
    }

    #[test]
    fn multiplication_is_associative() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..12 {
            let r = rng.gen_range(1..=2);
            let a = random_elem(&mut rng, r, 3);
            let b = random_elem(&mut rng, r, 3);
            let c = random_elem(&mut rng, r, 3);
            let left = torus_mul(&torus_mul(&a, &b).unwrap(), &c).unwrap();
            let right = torus_mul(&a, &torus_mul(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn action_matches_displays() {
        // nu f at k is q^k f(k); Lam shifts a delta up
        let table = qg_table();
        let delta0 = ColoredSeq::from_points(1, vec![(vec![0], RatFunc::one(&table))]);
        let nu = TorusElem::nu_pow(1, 0, 1);
        let lam = TorusElem::lam_pow(1, 0, 1);
        let shifted = act(&lam, &delta0).unwrap();
        assert!(shifted.value(&[1]) == RatFunc::one(&table));
        assert!(shifted.value(&[0]).is_zero());
        let f = ColoredSeq::colored_unknot(4);
        let g = act(&nu, &f).unwrap();
        let expect = f.value(&[2]).checked_mul(&q_pow(2)).unwrap();
        assert_eq!(g.value(&[2]), expect);
    }

    #[test]
    fn action_composition_fixes_the_sign() {
        // act(ab, f) = act(a, act(b, f)) pointwise; this is the ground truth
        // for the commutation exponent.
        let table = qg_table();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let r = rng.gen_range(1..=2);
            let a = random_elem(&mut rng, r, 3);
            let b = random_elem(&mut rng, r, 3);
            let pts: Vec<(Vec<i64>, RatFunc)> = (0..4)
                .map(|_| {
                    let p: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
                    let v = RatFunc::from_poly(LaurentPoly::var_pow(
                        &table,
                        0,
                        rng.gen_range(-2..=2),
                    )
                    .unwrap());
                    (p, v)
                })
                .collect();
            let f = ColoredSeq::from_points(r, pts);
            let composed = act(&torus_mul(&a, &b).unwrap(), &f).unwrap();
            let nested = act(&a, &act(&b, &f).unwrap()).unwrap();
            for _ in 0..6 {
                let k: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
                assert_eq!(composed.value(&k), nested.value(&k));
            }
        }
    }

    #[test]
    fn flipped_sign_breaks_composition() {
        // multiplying with the opposite commutation exponent is inconsistent
        // with the action
        let table = qg_table();
        let nu = TorusElem::nu_pow(1, 0, 1);
        let lam = TorusElem::lam_pow(1, 0, 1);
        let mut flipped = torus_mul(&nu, &lam).unwrap();
        for c in flipped.terms.values_mut() {
            *c = c.checked_mul(&q_pow(1)).unwrap(); // pretend Lam nu = q nu Lam
        }
        let f = ColoredSeq::colored_unknot(3);
        let nested = act(&lam, &act(&nu, &f).unwrap()).unwrap();
        let wrong = act(&flipped, &f).unwrap();
        let _ = table;
        assert_ne!(nested.value(&[2]), wrong.value(&[2]));
    }

    #[test]
    fn unknot_operator_annihilates_colored_unknot() {
        let op = unknot_operator();
        for n in 3..=6 {
            let f = ColoredSeq::colored_unknot(n);
            let report = annihilates(&op, &f, &[(1, 8)], n..=n).unwrap();
            assert!(report.all_zero(), "failures: {:?}", report.failures);
            assert_eq!(report.points_checked, 8);
        }
    }

    #[test]
    fn negative_controls_do_not_vanish() {
        let table = qg_table();
        let op = unknot_operator();
        let ones = ColoredSeq::constant_one(1);
        let applied = act(&op, &ones).unwrap();
        assert!(!applied.value(&[1]).is_zero());
        let nu_minus_1 = TorusElem::nu_pow(1, 0, 1)
            .checked_sub(&TorusElem::one(1))
            .unwrap();
        let report =
            annihilates(&nu_minus_1, &ColoredSeq::colored_unknot(4), &[(1, 4)], 4..=4).unwrap();
        assert!(!report.all_zero());
        let zero = TorusElem::zero(1);
        let vac = annihilates(&zero, &ColoredSeq::colored_unknot(4), &[(1, 4)], 4..=4).unwrap();
        assert!(vac.all_zero());
        let _ = table;
    }

    #[test]
    fn classical_limit_examples() {
        // q^c nu Lam - nu Lam -> 0
        let nu = TorusElem::nu_pow(1, 0, 1);
        let lam = TorusElem::lam_pow(1, 0, 1);
        let nl = torus_mul(&nu, &lam).unwrap();
        let mut scaled = nl.clone();
        for c in scaled.terms.values_mut() {
            *c = c.checked_mul(&q_pow(COMMUTATION_EXPONENT as i32)).unwrap();
        }
        let diff = scaled.checked_sub(&nl).unwrap();
        assert!(classical_limit(&diff).unwrap().is_zero());

        // unknot operator -> nu - nu^-1 - g nu^-1 Lam + g^-1 nu Lam
        let lim = classical_limit(&unknot_operator()).unwrap();
        let t = classical_table(1);
        let v = |g: i32, nu: i32, lam: i32| {
            LaurentPoly::monomial(&t, vec![g, nu, lam], Coeff::one()).unwrap()
        };
        let expect = &(&(&v(0, 1, 0) - &v(0, -1, 0)) - &v(1, -1, 1)) + &v(-1, 1, 1);
        assert_eq!(lim, expect);

        // a genuine pole at q = 1 is an error
        let table = qg_table();
        let qm1 = &LaurentPoly::var(&table, 0) - &LaurentPoly::one(&table);
        let pole = RatFunc::new(LaurentPoly::one(&table), qm1).unwrap();
        let bad = TorusElem::scalar(1, pole);
        assert!(matches!(
            classical_limit(&bad),
            Err(QtorusError::Poly(PolyError::PoleAtQOne(_)))
        ));
    }

    #[test]
    fn classical_limit_is_multiplicative() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..10 {
            let r = rng.gen_range(1..=2);
            let a = random_elem(&mut rng, r, 3);
            let b = random_elem(&mut rng, r, 3);
            let ab = torus_mul(&a, &b).unwrap();
            let la = classical_limit(&a).unwrap();
            let lb = classical_limit(&b).unwrap();
            assert_eq!(classical_limit(&ab).unwrap(), &la * &lb);
        }
    }

    #[test]
    fn classical_limit_matches_unknot_relation() {
        // classical unknot operator times nu equals the unknot presentation
        // relation times -nu^2 Lam
        let lim = classical_limit(&unknot_operator()).unwrap();
        let t = classical_table(1);
        let nu = LaurentPoly::var(&t, 1);
        let lhs = &lim * &nu;

        let pres = relations(
            &BraidWord::new(1, vec![]).unwrap(),
            &PresentOptions::default(),
        )
        .unwrap();
        assert_eq!(pres.gens.len(), 1);
        // presentation table is (g, nu, Lam, ...) with no a-variables for n=1
        let map: Vec<Option<usize>> = (0..pres.ring.table().len())
            .map(|i| t.index(pres.ring.table().name(i)))
            .collect();
        let rel = pres.gens[0].map_table(&t, &map).unwrap();
        let unit = LaurentPoly::monomial(&t, vec![0, 2, 1], -Coeff::one()).unwrap();
        let rhs = &rel * &unit;
        // both sides are defined up to a monomial unit and overall sign
        let strip = |p: &LaurentPoly| {
            let shift: Vec<i32> = p.min_exps().iter().map(|&e| -e).collect();
            p.mul_mono(&shift).primitive_part()
        };
        let lhs = strip(&lhs);
        let rhs = strip(&rhs);
        assert!(lhs == rhs || lhs == rhs.neg(), "{lhs} vs {rhs}");
    }

    #[test]
    fn operator_literal_roundtrip() {
        let parsed = parse_operator("nu - nu^-1 - L*(g*nu^-1 - g^-1*nu)", 1).unwrap();
        assert_eq!(parsed, unknot_operator());
        let two_component = parse_operator("nu1*L2 - q*L2*nu1", 2).unwrap();
        // cross indices commute, so this is (1 - q) nu1 L2
        assert_eq!(two_component.num_terms(), 1);
        assert!(parse_operator("nu +", 1).is_err());
        assert!(parse_operator("bogus", 1).is_err());
        assert!(parse_operator("nu3", 2).is_err());
    }

    #[test]
    fn memoization_is_stable() {
        let f = ColoredSeq::colored_unknot(5);
        let a = f.value(&[3]);
        let b = f.value(&[3]);
        assert_eq!(a, b);
    }
}
