//! Exact commutative arithmetic: multivariate Laurent polynomials over the
//! rationals, rational functions, and q-binomials (integer and formal).
//!
//! Every value is immutable after construction and all operations are pure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

pub type Coeff = BigRational;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("variable tables do not match")]
    TableMismatch,
    #[error("negative exponent {exp} on non-invertible variable `{var}`")]
    NegativeExponent { var: String, exp: i32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("coefficient has a pole at q = 1: {0}")]
    PoleAtQOne(String),
    #[error("limit at q = 1 is not a Laurent polynomial: {0}")]
    NonPolynomialLimit(String),
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
}

/// Ordered list of variable names with per-variable invertibility flags.
///
/// Laurent negativity is permitted only on variables flagged invertible.
/// The order is fixed for the lifetime of any polynomial referencing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    invertible: Vec<bool>,
}

impl VarTable {
    pub fn new<S: AsRef<str>>(vars: &[(S, bool)]) -> Result<Arc<Self>, PolyError> {
        let mut names = Vec::with_capacity(vars.len());
        let mut invertible = Vec::with_capacity(vars.len());
        for (name, inv) in vars {
            let name = name.as_ref().to_string();
            if names.contains(&name) {
                return Err(PolyError::DuplicateVariable(name));
            }
            names.push(name);
            invertible.push(*inv);
        }
        Ok(Arc::new(VarTable { names, invertible }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&str, bool)> {
        self.names
            .iter()
            .map(|n| n.as_str())
            .zip(self.invertible.iter().copied())
    }
}

/// The standard two-variable table for quantum coefficients, q before g.
pub fn qg_table() -> Arc<VarTable> {
    VarTable::new(&[("q", true), ("g", true)]).unwrap()
}

/// Exponent vector of a monomial. Ordered by total degree, ties broken
/// lexicographically; any fixed total order works for canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<i32>);

impl Mono {
    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A multivariate Laurent polynomial with exact rational coefficients.
///
/// Canonical form: no zero coefficients stored, terms keyed by exponent
/// vector, so structural equality is mathematical equality.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    table: Arc<VarTable>,
    terms: BTreeMap<Mono, Coeff>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        *self.table == *other.table && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

impl LaurentPoly {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        LaurentPoly {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<VarTable>, c: Coeff) -> Self {
        let mut p = Self::zero(table);
        if !c.is_zero() {
            p.terms.insert(Mono(vec![0; table.len()]), c);
        }
        p
    }

    pub fn from_int(table: &Arc<VarTable>, c: i64) -> Self {
        Self::constant(table, Coeff::from_integer(BigInt::from(c)))
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::from_int(table, 1)
    }

    pub fn var(table: &Arc<VarTable>, i: usize) -> Self {
        Self::var_pow(table, i, 1).expect("exponent 1 is always valid")
    }

    /// The monomial v_i^e. Errors if e < 0 and v_i is not invertible.
    pub fn var_pow(table: &Arc<VarTable>, i: usize, e: i32) -> Result<Self, PolyError> {
        let mut exps = vec![0; table.len()];
        exps[i] = e;
        Self::monomial(table, exps, Coeff::one())
    }

    pub fn monomial(table: &Arc<VarTable>, exps: Vec<i32>, c: Coeff) -> Result<Self, PolyError> {
        assert_eq!(exps.len(), table.len(), "exponent vector length mismatch");
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !table.is_invertible(i) {
                return Err(PolyError::NegativeExponent {
                    var: table.name(i).to_string(),
                    exp: e,
                });
            }
        }
        let mut p = Self::zero(table);
        if !c.is_zero() {
            p.terms.insert(Mono(exps), c);
        }
        Ok(p)
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Coeff)> {
        self.terms.iter()
    }

    /// Leading term under the table's canonical (graded-lex) order.
    pub fn leading(&self) -> Option<(&Mono, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn constant_coeff(&self) -> Coeff {
        self.terms
            .get(&Mono(vec![0; self.table.len()]))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    fn check_table(&self, other: &Self) -> Result<(), PolyError> {
        if *self.table == *other.table {
            Ok(())
        } else {
            Err(PolyError::TableMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_table(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Coeff::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Ok(LaurentPoly {
            table: self.table.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_table(other)?;
        let mut terms: BTreeMap<Mono, Coeff> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let exps: Vec<i32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                let prod = c1 * c2;
                let entry = terms.entry(Mono(exps)).or_insert_with(Coeff::zero);
                *entry += prod;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly {
            table: self.table.clone(),
            terms,
        })
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        LaurentPoly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_mono(&self, exps: &[i32]) -> Self {
        LaurentPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let e: Vec<i32> = m.0.iter().zip(exps).map(|(a, b)| a + b).collect();
                    (Mono(e), c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.table);
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same table");
        }
        acc
    }

    /// Per-variable minimum exponent over all terms; 0 for the zero polynomial.
    pub fn min_exps(&self) -> Vec<i32> {
        let n = self.table.len();
        let mut mins = vec![0; n];
        let mut first = true;
        for (m, _) in &self.terms {
            if first {
                mins.copy_from_slice(&m.0);
                first = false;
            } else {
                for i in 0..n {
                    mins[i] = mins[i].min(m.0[i]);
                }
            }
        }
        mins
    }

    pub fn max_exps(&self) -> Vec<i32> {
        let n = self.table.len();
        let mut maxs = vec![0; n];
        let mut first = true;
        for (m, _) in &self.terms {
            if first {
                maxs.copy_from_slice(&m.0);
                first = false;
            } else {
                for i in 0..n {
                    maxs[i] = maxs[i].max(m.0[i]);
                }
            }
        }
        maxs
    }

    /// If this is a single term with all exponents on invertible variables,
    /// return its multiplicative inverse.
    pub fn inverse_monomial(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        for (i, &e) in m.0.iter().enumerate() {
            if e != 0 && !self.table.is_invertible(i) {
                return None;
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert(
            Mono(m.0.iter().map(|e| -e).collect()),
            c.recip(),
        );
        Some(LaurentPoly {
            table: self.table.clone(),
            terms,
        })
    }

    /// Exact division; None if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert_eq!(*self.table, *d.table, "div_exact across tables");
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(&self.table));
        }
        // Shift both operands into the non-negative orthant so the graded
        // order is well-founded, divide, shift back.
        let sn = self.min_exps();
        let sd = d.min_exps();
        let num = self.mul_mono(&sn.iter().map(|e| -e).collect::<Vec<_>>());
        let den = d.mul_mono(&sd.iter().map(|e| -e).collect::<Vec<_>>());
        let (dm, dc) = den.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = num;
        let mut quo_terms: BTreeMap<Mono, Coeff> = BTreeMap::new();
        while let Some((rm, rc)) = rem.leading() {
            let exps: Vec<i32> = rm.0.iter().zip(&dm.0).map(|(a, b)| a - b).collect();
            if exps.iter().any(|&e| e < 0) {
                return None;
            }
            let c = rc / &dc;
            let t = LaurentPoly {
                table: self.table.clone(),
                terms: BTreeMap::from([(Mono(exps.clone()), c.clone())]),
            };
            rem = rem.checked_sub(&t.checked_mul(&den).unwrap()).unwrap();
            quo_terms.insert(Mono(exps), c);
        }
        let quo = LaurentPoly {
            table: self.table.clone(),
            terms: quo_terms,
        };
        // Undo the shifts: self = q^{sn}, den was shifted by sd.
        let shift: Vec<i32> = sd.iter().zip(&sn).map(|(d, n)| n - d).collect();
        let shifted = quo.mul_mono(&shift);
        // Shifting may have introduced negativity on non-invertible vars;
        // that cannot happen for a true divisor of a valid polynomial.
        for (m, _) in &shifted.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e < 0 && !self.table.is_invertible(i) {
                    return None;
                }
            }
        }
        Some(shifted)
    }

    /// Multiplicity of the factor `f` in `self` (0 for the zero polynomial).
    pub fn factor_multiplicity(&self, f: &Self) -> (u32, Self) {
        let mut k = 0;
        let mut cur = self.clone();
        if cur.is_zero() {
            return (0, cur);
        }
        while let Some(q) = cur.div_exact(f) {
            cur = q;
            k += 1;
        }
        (k, cur)
    }

    /// Substitute each mapped variable by a Laurent polynomial. A negative
    /// exponent requires the image to be an invertible monomial.
    pub fn substitute_poly(
        &self,
        map: &BTreeMap<usize, LaurentPoly>,
    ) -> Result<LaurentPoly, PolyError> {
        for img in map.values() {
            self.check_table(img)?;
        }
        let mut acc = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            let mut term = Self::constant(&self.table, c.clone());
            for (&i, img) in map {
                let e = exps[i];
                exps[i] = 0;
                if e == 0 {
                    continue;
                }
                let factor = if e > 0 {
                    img.pow(e as u32)
                } else {
                    let inv = img.inverse_monomial().ok_or(PolyError::DivisionByZero)?;
                    inv.pow((-e) as u32)
                };
                term = term.checked_mul(&factor)?;
            }
            let base = Self::monomial(&self.table, exps, Coeff::one())?;
            term = term.checked_mul(&base)?;
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    /// Ring-homomorphism image of `self` under a map sending some variables
    /// to rational functions; unmapped variables are fixed.
    pub fn substitute(&self, map: &BTreeMap<usize, RatFunc>) -> Result<RatFunc, PolyError> {
        let mut acc = RatFunc::zero(&self.table);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            let mut term = RatFunc::from_poly(Self::constant(&self.table, c.clone()));
            for (&i, img) in map {
                let e = exps[i];
                exps[i] = 0;
                if e == 0 {
                    continue;
                }
                term = term.checked_mul(&img.pow_i64(e as i64)?)?;
            }
            let base = Self::monomial(&self.table, exps, Coeff::one())?;
            term = term.checked_mul(&RatFunc::from_poly(base))?;
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to variable `i` (formal, Laurent).
    pub fn derivative(&self, i: usize) -> Self {
        let mut terms: BTreeMap<Mono, Coeff> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] = e - 1;
            let coeff = c * Coeff::from_integer(BigInt::from(e));
            let entry = terms.entry(Mono(exps)).or_insert_with(Coeff::zero);
            *entry += coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly {
            table: self.table.clone(),
            terms,
        }
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(rational_to_f64(c), 0.0);
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    t *= point[i].powi(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Gcd of numerators over lcm of denominators, signed by the leading term.
    pub fn content(&self) -> Coeff {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num::integer::gcd(num_gcd, c.numer().abs());
            den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
        }
        if num_gcd.is_zero() {
            return Coeff::one();
        }
        let mut content = Coeff::new(num_gcd, den_lcm);
        if let Some((_, c)) = self.leading() {
            if c.is_negative() {
                content = -content;
            }
        }
        content
    }

    /// Divide out the content; the result has coprime integer coefficients
    /// and positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    /// Clear Laurent denominators: multiply by the monomial unit making all
    /// exponents non-negative. Returns the cleared polynomial.
    pub fn clear_units(&self) -> Self {
        let mins = self.min_exps();
        let shift: Vec<i32> = mins.iter().map(|&e| if e < 0 { -e } else { 0 }).collect();
        if shift.iter().all(|&e| e == 0) {
            self.clone()
        } else {
            self.mul_mono(&shift)
        }
    }

    /// Re-express over `target`, mapping variable `i` here to `var_map[i]`
    /// there. Fails if a used variable has no destination.
    pub fn map_table(
        &self,
        target: &Arc<VarTable>,
        var_map: &[Option<usize>],
    ) -> Result<LaurentPoly, PolyError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = vec![0; target.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match var_map[i] {
                    Some(j) => exps[j] += e,
                    None => {
                        return Err(PolyError::Json(format!(
                            "variable `{}` has no image in the target table",
                            self.table.name(i)
                        )))
                    }
                }
            }
            terms.insert(Mono(exps), c.clone());
        }
        Ok(LaurentPoly {
            table: target.clone(),
            terms,
        })
    }

    pub fn to_json(&self) -> Value {
        let vars: Vec<Value> = self
            .table
            .vars()
            .map(|(n, inv)| json!({"name": n, "inv": inv}))
            .collect();
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                json!({
                    "exp": m.0,
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                })
            })
            .collect();
        json!({"vars": vars, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self, PolyError> {
        let table = table_from_json(v.get("vars").ok_or_else(|| err_json("missing vars"))?)?;
        Self::terms_from_json(&table, v.get("terms").ok_or_else(|| err_json("missing terms"))?)
    }

    pub fn terms_from_json(table: &Arc<VarTable>, terms: &Value) -> Result<Self, PolyError> {
        let terms = terms.as_array().ok_or_else(|| err_json("terms not array"))?;
        let mut p = Self::zero(table);
        for t in terms {
            let exp = t
                .get("exp")
                .and_then(|e| e.as_array())
                .ok_or_else(|| err_json("missing exp"))?;
            if exp.len() != table.len() {
                return Err(err_json("exponent length mismatch"));
            }
            let exps: Vec<i32> = exp
                .iter()
                .map(|e| e.as_i64().map(|x| x as i32))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err_json("non-integer exponent"))?;
            let num = parse_bigint(t.get("num"))?;
            let den = parse_bigint(t.get("den"))?;
            if den.is_zero() {
                return Err(PolyError::DivisionByZero);
            }
            let mono = Self::monomial(table, exps, Coeff::new(num, den))?;
            p = p.checked_add(&mono)?;
        }
        Ok(p)
    }
}

pub fn table_to_json(table: &VarTable) -> Value {
    Value::Array(
        table
            .vars()
            .map(|(n, inv)| json!({"name": n, "inv": inv}))
            .collect(),
    )
}

pub fn table_from_json(v: &Value) -> Result<Arc<VarTable>, PolyError> {
    let arr = v.as_array().ok_or_else(|| err_json("vars not array"))?;
    let mut vars = Vec::new();
    for e in arr {
        let name = e
            .get("name")
            .and_then(|n| n.as_str())
            .ok_or_else(|| err_json("var missing name"))?;
        let inv = e
            .get("inv")
            .and_then(|i| i.as_bool())
            .ok_or_else(|| err_json("var missing inv"))?;
        vars.push((name.to_string(), inv));
    }
    VarTable::new(&vars)
}

fn err_json(msg: &str) -> PolyError {
    PolyError::Json(msg.to_string())
}

fn parse_bigint(v: Option<&Value>) -> Result<BigInt, PolyError> {
    let s = v
        .and_then(|x| x.as_str())
        .ok_or_else(|| err_json("coefficient not a string"))?;
    BigInt::from_str(s).map_err(|e| err_json(&format!("bad integer `{s}`: {e}")))
}

pub fn rational_to_f64(c: &Coeff) -> f64 {
    // Good enough for the numeric oracle: coefficients at desk scale are
    // far from overflowing f64.
    let num = c.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = c.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("variable table mismatch")
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("variable table mismatch")
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("variable table mismatch")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest terms first.
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                parts.push(format_rational(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    parts.push(self.table.name(i).to_string());
                } else if e != 0 {
                    parts.push(format!("{}^{}", self.table.name(i), e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

fn format_rational(c: &Coeff) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// A fraction of Laurent polynomials, normalized so the denominator is
/// primitive with leading coefficient 1. Equality is tested by
/// cross-multiplication, so a full gcd engine is not required.
#[derive(Debug, Clone)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, PolyError> {
        num.check_table(&den)?;
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let mut r = RatFunc { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        let den = LaurentPoly::one(num.table());
        RatFunc { num, den }
    }

    pub fn zero(table: &Arc<VarTable>) -> Self {
        Self::from_poly(LaurentPoly::zero(table))
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::from_poly(LaurentPoly::one(table))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn table(&self) -> &Arc<VarTable> {
        self.num.table()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one(self.num.table());
            return;
        }
        // Collapse when the denominator divides the numerator exactly.
        if let Some(q) = self.num.div_exact(&self.den) {
            self.num = q;
            self.den = LaurentPoly::one(self.num.table());
            return;
        }
        // Cancel a common monomial factor where the table permits it.
        let mn = self.num.min_exps();
        let md = self.den.min_exps();
        let table = self.num.table().clone();
        let shift: Vec<i32> = mn
            .iter()
            .zip(&md)
            .enumerate()
            .map(|(i, (&a, &b))| {
                let m = a.min(b);
                if m > 0 || (m < 0 && table.is_invertible(i)) {
                    -m
                } else {
                    0
                }
            })
            .collect();
        if shift.iter().any(|&e| e != 0) {
            self.num = self.num.mul_mono(&shift);
            self.den = self.den.mul_mono(&shift);
        }
        // Make the denominator primitive with leading coefficient 1.
        let c = self.den.content();
        if !c.is_one() {
            let inv = c.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn inverse(&self) -> Result<Self, PolyError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_mul(&other.inverse()?)
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self, PolyError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one(self.table());
        for _ in 0..e.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Substitute variables by Laurent polynomials in both numerator and
    /// denominator; errors if the denominator collapses to zero.
    pub fn substitute_poly(
        &self,
        map: &BTreeMap<usize, LaurentPoly>,
    ) -> Result<Self, PolyError> {
        let num = self.num.substitute_poly(map)?;
        let den = self.den.substitute_poly(map)?;
        Self::new(num, den)
    }

    /// Evaluate at q = 1, cancelling matching powers of (q - 1) first.
    /// The result must be a Laurent polynomial in the remaining variables;
    /// it is returned over the same table with zero q-exponents.
    pub fn eval_q1(&self, q: usize) -> Result<LaurentPoly, PolyError> {
        let table = self.table().clone();
        if self.num.is_zero() {
            return Ok(LaurentPoly::zero(&table));
        }
        let q_minus_1 = &LaurentPoly::var(&table, q) - &LaurentPoly::one(&table);
        let (kd, den_red) = self.den.factor_multiplicity(&q_minus_1);
        let (kn, num_red) = self.num.factor_multiplicity(&q_minus_1);
        if kn < kd {
            return Err(PolyError::PoleAtQOne(self.to_string()));
        }
        let mut extra = LaurentPoly::one(&table);
        for _ in 0..(kn - kd) {
            extra = &extra * &q_minus_1;
        }
        let num1 = set_var_to_one(&(&num_red * &extra), q);
        let den1 = set_var_to_one(&den_red, q);
        if den1.is_zero() {
            return Err(PolyError::PoleAtQOne(self.to_string()));
        }
        num1.div_exact(&den1)
            .ok_or_else(|| PolyError::NonPolynomialLimit(self.to_string()))
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.num.eval_complex(point) / self.den.eval_complex(point)
    }

    pub fn to_json(&self) -> Value {
        json!({"num": self.num.to_json(), "den": self.den.to_json()})
    }
}

fn set_var_to_one(p: &LaurentPoly, i: usize) -> LaurentPoly {
    let mut terms: BTreeMap<Mono, Coeff> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut exps = m.0.clone();
        exps[i] = 0;
        let entry = terms.entry(Mono(exps)).or_insert_with(Coeff::zero);
        *entry += c;
    }
    terms.retain(|_, c| !c.is_zero());
    LaurentPoly {
        table: p.table().clone(),
        terms,
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatFunc {}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Gaussian binomial coefficient as a Laurent polynomial in the variable
/// with index `q`, symmetric under q <-> q^{-1}.
pub fn qbinom_int(table: &Arc<VarTable>, q: usize, n: u32, k: i64) -> LaurentPoly {
    if k < 0 || k > n as i64 {
        return LaurentPoly::zero(table);
    }
    let k = k as u32;
    let mut num = LaurentPoly::one(table);
    let mut den = LaurentPoly::one(table);
    for i in 1..=k {
        num = &num * &q_diff(table, q, (n - k + i) as i32);
        den = &den * &q_diff(table, q, i as i32);
    }
    num.div_exact(&den)
        .expect("Gaussian binomial is a Laurent polynomial")
}

/// The formal q-binomial for the symbol choose(N - a, b), as a rational
/// function in q and g; specializing g = q^n recovers the integer form.
pub fn qbinom_formal(table: &Arc<VarTable>, q: usize, g: usize, a: i64, b: u32) -> RatFunc {
    let mut num = LaurentPoly::one(table);
    let mut den = LaurentPoly::one(table);
    for i in 0..b as i64 {
        // g q^{-a-i} - g^{-1} q^{a+i}
        let e = (a + i) as i32;
        let pos = mono2(table, q, -e, g, 1);
        let neg = mono2(table, q, e, g, -1);
        num = &num * &(&pos - &neg);
    }
    for i in 1..=b as i32 {
        den = &den * &q_diff(table, q, i);
    }
    RatFunc::new(num, den).expect("denominator of a formal q-binomial is nonzero")
}

/// q^e - q^{-e}
fn q_diff(table: &Arc<VarTable>, q: usize, e: i32) -> LaurentPoly {
    let a = LaurentPoly::var_pow(table, q, e).unwrap();
    let b = LaurentPoly::var_pow(table, q, -e).unwrap();
    &a - &b
}

fn mono2(table: &Arc<VarTable>, v1: usize, e1: i32, v2: usize, e2: i32) -> LaurentPoly {
    let mut exps = vec![0; table.len()];
    exps[v1] += e1;
    exps[v2] += e2;
    LaurentPoly::monomial(table, exps, Coeff::one()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn nlg_table() -> Arc<VarTable> {
        VarTable::new(&[("nu", true), ("Lam", true), ("g", true)]).unwrap()
    }

    fn var(t: &Arc<VarTable>, i: usize, e: i32) -> LaurentPoly {
        LaurentPoly::var_pow(t, i, e).unwrap()
    }

    #[test]
    fn add_cancellation() {
        let t = nlg_table();
        let nu = var(&t, 0, 1);
        let nu_inv = var(&t, 0, -1);
        let sum = &(&nu - &nu_inv) + &nu_inv;
        assert_eq!(sum, nu);
    }

    #[test]
    fn difference_of_squares() {
        let t = nlg_table();
        let g = var(&t, 2, 1);
        let g_inv = var(&t, 2, -1);
        let prod = &(&g - &g_inv) * &(&g + &g_inv);
        let expect = &var(&t, 2, 2) - &var(&t, 2, -2);
        assert_eq!(prod, expect);
    }

    #[test]
    fn zero_absorbs() {
        let t = nlg_table();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_poly(&t, &mut rng);
            assert!(LaurentPoly::zero(&t).checked_mul(&p).unwrap().is_zero());
        }
    }

    fn random_poly(t: &Arc<VarTable>, rng: &mut StdRng) -> LaurentPoly {
        let mut p = LaurentPoly::zero(t);
        for _ in 0..rng.gen_range(0..5) {
            let exps: Vec<i32> = (0..t.len()).map(|_| rng.gen_range(-3..4)).collect();
            let c = Coeff::from_integer(BigInt::from(rng.gen_range(-5i64..6)));
            p = p
                .checked_add(&LaurentPoly::monomial(t, exps, c).unwrap())
                .unwrap();
        }
        p
    }

    #[test]
    fn ring_axioms_randomized() {
        let t = nlg_table();
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..50 {
            let a = random_poly(&t, &mut rng);
            let b = random_poly(&t, &mut rng);
            let c = random_poly(&t, &mut rng);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &b, &b * &a);
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }

    #[test]
    fn table_mismatch_is_an_error() {
        let t1 = nlg_table();
        let t2 = qg_table();
        let a = LaurentPoly::one(&t1);
        let b = LaurentPoly::one(&t2);
        assert!(matches!(
            a.checked_add(&b),
            Err(PolyError::TableMismatch)
        ));
    }

    #[test]
    fn negative_exponent_rejected_on_plain_variable() {
        let t = VarTable::new(&[("a", false), ("q", true)]).unwrap();
        assert!(LaurentPoly::var_pow(&t, 0, -1).is_err());
        assert!(LaurentPoly::var_pow(&t, 1, -1).is_ok());
    }

    #[test]
    fn substitution_matches_paper_change_of_variables() {
        // mu -> nu^{-2}, U -> g^{-2}, lambda -> -g^{-1} Lam^{-1}
        let src = VarTable::new(&[("mu", true), ("U", true), ("lam", true)]).unwrap();
        let dst = nlg_table();
        let to_dst = |p: LaurentPoly| RatFunc::from_poly(p);
        // Images live in the destination table; embed the source variables
        // via a combined table to exercise `substitute` directly.
        let all = VarTable::new(&[
            ("mu", true),
            ("U", true),
            ("lam", true),
            ("nu", true),
            ("Lam", true),
            ("g", true),
        ])
        .unwrap();
        let nu2 = var(&all, 3, -2);
        let g2 = var(&all, 5, -2);
        let mut lam_img = LaurentPoly::monomial(
            &all,
            vec![0, 0, 0, 0, -1, -1],
            Coeff::from_integer(BigInt::from(-1)),
        )
        .unwrap();
        let mut map = BTreeMap::new();
        map.insert(0usize, to_dst(nu2.clone()));
        map.insert(1usize, to_dst(g2.clone()));
        map.insert(2usize, to_dst(lam_img.clone()));

        // U - mu -> g^{-2} - nu^{-2}
        let p = &var(&all, 1, 1) - &var(&all, 0, 1);
        let img = p.substitute(&map).unwrap();
        assert_eq!(img, RatFunc::from_poly(&g2 - &nu2));

        // lam (1 - mu) -> -g^{-1} Lam^{-1} (1 - nu^{-2})
        let p = &var(&all, 2, 1) * &(&LaurentPoly::one(&all) - &var(&all, 0, 1));
        let img = p.substitute(&map).unwrap();
        lam_img = &lam_img * &(&LaurentPoly::one(&all) - &nu2);
        assert_eq!(img, RatFunc::from_poly(lam_img));

        // identity map leaves polynomials unchanged
        let p = &var(&all, 0, 2) + &var(&all, 2, -1);
        assert_eq!(p.substitute(&BTreeMap::new()).unwrap(), to_dst(p.clone()));
        let _ = (src, dst);
    }

    #[test]
    fn substitution_is_a_ring_homomorphism() {
        let t = nlg_table();
        let mut rng = StdRng::seed_from_u64(3);
        let mut map = BTreeMap::new();
        // nu -> Lam^{-1} g  (an invertible monomial, so products stay exact)
        map.insert(
            0usize,
            RatFunc::from_poly(
                LaurentPoly::monomial(&t, vec![0, -1, 1], Coeff::one()).unwrap(),
            ),
        );
        for _ in 0..20 {
            let p = random_poly(&t, &mut rng);
            let r = random_poly(&t, &mut rng);
            let lhs = (&p * &r).substitute(&map).unwrap();
            let rhs = p
                .substitute(&map)
                .unwrap()
                .checked_mul(&r.substitute(&map).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn qbinom_int_small_values() {
        let t = qg_table();
        for n in 0..8u32 {
            assert_eq!(qbinom_int(&t, 0, n, 0), LaurentPoly::one(&t));
        }
        let expect = &var(&t, 0, 1) + &var(&t, 0, -1);
        assert_eq!(qbinom_int(&t, 0, 2, 1), expect);
        // [4 choose 2] = q^4 + q^2 + 2 + q^-2 + q^-4
        let mut expect = &var(&t, 0, 4) + &var(&t, 0, -4);
        expect = &expect + &(&var(&t, 0, 2) + &var(&t, 0, -2));
        expect = &expect + &LaurentPoly::from_int(&t, 2);
        assert_eq!(qbinom_int(&t, 0, 4, 2), expect);
        assert!(qbinom_int(&t, 0, 3, -1).is_zero());
        assert!(qbinom_int(&t, 0, 3, 4).is_zero());
    }

    #[test]
    fn qbinom_int_symmetry() {
        let t = qg_table();
        for n in 0..=12u32 {
            for k in 0..=n as i64 {
                assert_eq!(
                    qbinom_int(&t, 0, n, k),
                    qbinom_int(&t, 0, n, n as i64 - k)
                );
            }
        }
    }

    #[test]
    fn qbinom_int_pascal() {
        // Verified against the product formula: with the symmetric Gaussian
        // binomial, [n,k] = q^k [n-1,k] + q^{k-n} [n-1,k-1].
        let t = qg_table();
        for n in 1..=12u32 {
            for k in 0..=n as i64 {
                let lhs = qbinom_int(&t, 0, n, k);
                let t1 = &var(&t, 0, k as i32) * &qbinom_int(&t, 0, n - 1, k);
                let t2 = &var(&t, 0, (k - n as i64) as i32) * &qbinom_int(&t, 0, n - 1, k - 1);
                assert_eq!(lhs, &t1 + &t2, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn qbinom_int_at_q_one_is_binomial() {
        let t = qg_table();
        for n in 0..=10u32 {
            for k in 0..=n as i64 {
                let v = set_var_to_one(&qbinom_int(&t, 0, n, k), 0);
                let mut expect = Coeff::one();
                for i in 0..k {
                    expect *= Coeff::new(BigInt::from(n as i64 - i), BigInt::from(i + 1));
                }
                assert_eq!(v.constant_coeff(), expect);
            }
        }
    }

    #[test]
    fn qbinom_formal_base_cases() {
        let t = qg_table();
        for a in -3..4i64 {
            assert_eq!(qbinom_formal(&t, 0, 1, a, 0), RatFunc::one(&t));
        }
        // choose(N, 1) = (g - g^{-1}) / (q - q^{-1})
        let expect = RatFunc::new(
            &var(&t, 1, 1) - &var(&t, 1, -1),
            &var(&t, 0, 1) - &var(&t, 0, -1),
        )
        .unwrap();
        assert_eq!(qbinom_formal(&t, 0, 1, 0, 1), expect);
    }

    #[test]
    fn qbinom_formal_specializes_to_integer_form() {
        let t = qg_table();
        for n in 0..=10i64 {
            for a in 0..=n {
                for b in 0..=((n - a).min(4)) as u32 {
                    let formal = qbinom_formal(&t, 0, 1, a, b);
                    let mut map = BTreeMap::new();
                    map.insert(1usize, var(&t, 0, n as i32));
                    let spec = formal.substitute_poly(&map).unwrap();
                    let expect = qbinom_int(&t, 0, (n - a) as u32, b as i64);
                    assert_eq!(spec, RatFunc::from_poly(expect), "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn ratfunc_cross_multiplication_equality() {
        let t = qg_table();
        let q = var(&t, 0, 1);
        let one = LaurentPoly::one(&t);
        // (q^2 - 1)/(q - 1) == q + 1
        let a = RatFunc::new(&(&q * &q) - &one, &q - &one).unwrap();
        let b = RatFunc::from_poly(&q + &one);
        assert_eq!(a, b);
    }

    #[test]
    fn eval_q1_cancels_matching_poles() {
        let t = qg_table();
        let q = var(&t, 0, 1);
        let one = LaurentPoly::one(&t);
        let g = var(&t, 1, 1);
        // (q^2 - 1)(g) / (q - 1) -> 2g at q=1
        let f = RatFunc::new(&(&(&q * &q) - &one) * &g, &q - &one).unwrap();
        assert_eq!(f.eval_q1(0).unwrap(), g.scale(&Coeff::from_integer(2.into())));
        // 1/(q - 1) is a pole
        let f = RatFunc::new(one.clone(), &q - &one).unwrap();
        assert!(matches!(f.eval_q1(0), Err(PolyError::PoleAtQOne(_))));
    }

    #[test]
    fn div_exact_roundtrip() {
        let t = nlg_table();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..30 {
            let a = random_poly(&t, &mut rng);
            let mut b = random_poly(&t, &mut rng);
            if b.is_zero() {
                b = LaurentPoly::one(&t);
            }
            let prod = &a * &b;
            let q = prod.div_exact(&b).unwrap();
            assert_eq!(q, a);
        }
    }

    #[test]
    fn json_roundtrip() {
        let t = nlg_table();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let p = random_poly(&t, &mut rng);
            let v = p.to_json();
            let q = LaurentPoly::from_json(&v).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn display_uses_caret_and_star() {
        let t = nlg_table();
        let p = &var(&t, 0, 2).scale(&Coeff::from_integer(3.into())) - &var(&t, 1, -1);
        assert_eq!(p.to_string(), "3*nu^2 - Lam^-1");
    }
}
