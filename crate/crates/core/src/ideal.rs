//! Ideal machinery over exact rationals: Buchberger's algorithm under a
//! block elimination order, Laurent saturation via inverse tags, variable
//! elimination, membership, and a numeric sampling oracle for validating
//! eliminated generators.

use std::cmp::Ordering;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num::complex::Complex64;
use num::{BigInt, Integer, One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ngalg::Presentation;
use crate::poly::{
    rational_to_f64, table_from_json, table_to_json, Coeff, LaurentPoly, PolyError, VarTable,
};

#[derive(Debug, Error)]
pub enum IdealError {
    #[error("resource limit reached: {0} (basis incomplete)")]
    Resource(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("malformed ideal JSON: {0}")]
    Json(String),
    #[error("variable {0} is not in the eliminated block")]
    NotEliminable(String),
}

#[derive(Debug, Clone)]
pub struct GbConfig {
    pub max_pairs: usize,
    pub timeout: Duration,
}

impl Default for GbConfig {
    fn default() -> Self {
        GbConfig {
            max_pairs: 200_000,
            timeout: Duration::from_secs(60),
        }
    }
}

/// A purely polynomial ring for Groebner computation, derived from a Laurent
/// source table. Layout: eliminated source variables first, then one inverse
/// tag per invertible source variable, then the kept variables. The monomial
/// order is block graded-reverse-lex with the first `elim_len` variables
/// ranked above the rest, so saturation tags are eliminated together with
/// the dropped variables.
#[derive(Debug, Clone)]
pub struct RingSpec {
    source: Arc<VarTable>,
    gb_table: Arc<VarTable>,
    /// source index -> gb index
    source_to_gb: Vec<usize>,
    /// (gb index of invertible variable, gb index of its tag)
    tags: Vec<(usize, usize)>,
    /// source indices marked for elimination
    elim: Vec<usize>,
    elim_len: usize,
}

impl RingSpec {
    pub fn new(source: &Arc<VarTable>, elim: &[usize]) -> Self {
        let mut is_elim = vec![false; source.len()];
        for &v in elim {
            is_elim[v] = true;
        }
        let mut names: Vec<(String, bool)> = Vec::new();
        let mut source_to_gb = vec![usize::MAX; source.len()];
        for &v in elim {
            source_to_gb[v] = names.len();
            names.push((source.name(v).to_string(), false));
        }
        let mut tags = Vec::new();
        let mut tag_of: Vec<Option<usize>> = vec![None; source.len()];
        for v in 0..source.len() {
            if source.is_invertible(v) {
                tag_of[v] = Some(names.len());
                names.push((format!("inv_{}", source.name(v)), false));
            }
        }
        let elim_len = names.len();
        for v in 0..source.len() {
            if !is_elim[v] {
                source_to_gb[v] = names.len();
                names.push((source.name(v).to_string(), false));
            }
        }
        for v in 0..source.len() {
            if let Some(t) = tag_of[v] {
                tags.push((source_to_gb[v], t));
            }
        }
        let gb_table = VarTable::new(&names).expect("tag names cannot collide");
        RingSpec {
            source: source.clone(),
            gb_table,
            source_to_gb,
            tags,
            elim: elim.to_vec(),
            elim_len,
        }
    }

    pub fn source(&self) -> &Arc<VarTable> {
        &self.source
    }

    pub fn gb_table(&self) -> &Arc<VarTable> {
        &self.gb_table
    }

    fn order(&self) -> BlockOrder {
        BlockOrder {
            elim_len: self.elim_len,
        }
    }

    /// Clear a Laurent polynomial's unit denominators and move it into the
    /// Groebner table.
    pub fn embed(&self, p: &LaurentPoly) -> LaurentPoly {
        let cleared = p.clear_units();
        let map: Vec<Option<usize>> = (0..self.source.len())
            .map(|v| Some(self.source_to_gb[v]))
            .collect();
        cleared
            .map_table(&self.gb_table, &map)
            .expect("cleared polynomial has no negative exponents")
    }

    /// The saturation generators v * t_v - 1.
    pub fn tag_generators(&self) -> Vec<LaurentPoly> {
        self.tags
            .iter()
            .map(|&(v, t)| {
                let vt = &LaurentPoly::var(&self.gb_table, v) * &LaurentPoly::var(&self.gb_table, t);
                &vt - &LaurentPoly::one(&self.gb_table)
            })
            .collect()
    }

    /// True if the polynomial (in gb coordinates) avoids every eliminated
    /// variable and every tag.
    pub fn free_of_elim_block(&self, p: &LaurentPoly) -> bool {
        p.max_exps()[..self.elim_len].iter().all(|&e| e == 0)
    }

    /// The Laurent table of the kept variables (original invertibility),
    /// with a map from gb indices.
    pub fn kept_table(&self) -> (Arc<VarTable>, Vec<Option<usize>>) {
        let mut kept_sources: Vec<usize> = (0..self.source.len())
            .filter(|v| !self.elim.contains(v))
            .collect();
        kept_sources.sort_by_key(|&v| self.source_to_gb[v]);
        let names: Vec<(String, bool)> = kept_sources
            .iter()
            .map(|&v| (self.source.name(v).to_string(), self.source.is_invertible(v)))
            .collect();
        let table = VarTable::new(&names).unwrap();
        let mut map = vec![None; self.gb_table.len()];
        for (new_i, &v) in kept_sources.iter().enumerate() {
            map[self.source_to_gb[v]] = Some(new_i);
        }
        (table, map)
    }
}

/// Generators of a saturated ideal under a RingSpec order. `reduced` marks
/// output of `groebner`.
#[derive(Debug, Clone)]
pub struct IdealGens {
    pub spec: RingSpec,
    pub gens: Vec<LaurentPoly>,
    pub reduced: bool,
}

impl IdealGens {
    /// Build from Laurent generators in the source table; saturation tags
    /// are appended automatically.
    pub fn new(spec: RingSpec, laurent_gens: &[LaurentPoly]) -> Self {
        let mut gens: Vec<LaurentPoly> = laurent_gens
            .iter()
            .map(|p| spec.embed(p))
            .filter(|p| !p.is_zero())
            .collect();
        gens.extend(spec.tag_generators());
        IdealGens {
            spec,
            gens,
            reduced: false,
        }
    }

    /// The relation ideal of a presentation, with every a_{ij} in the
    /// eliminated block.
    pub fn from_presentation(pres: &Presentation) -> Self {
        let spec = RingSpec::new(pres.ring.table(), &pres.ring.a_indices());
        Self::new(spec, &pres.gens)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source_vars": table_to_json(&self.spec.source),
            "elim": self.spec.elim.iter()
                .map(|&v| self.spec.source.name(v)).collect::<Vec<_>>(),
            "gens": self.gens.iter()
                .map(|p| p.to_json().get("terms").cloned().unwrap())
                .collect::<Vec<_>>(),
            "reduced": self.reduced,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, IdealError> {
        let source = table_from_json(
            v.get("source_vars").ok_or_else(|| ij("missing source_vars"))?,
        )?;
        let elim: Vec<usize> = v
            .get("elim")
            .and_then(|x| x.as_array())
            .ok_or_else(|| ij("missing elim"))?
            .iter()
            .map(|name| {
                name.as_str()
                    .and_then(|s| source.index(s))
                    .ok_or_else(|| ij("unknown eliminated variable"))
            })
            .collect::<Result<_, _>>()?;
        let spec = RingSpec::new(&source, &elim);
        let gens = v
            .get("gens")
            .and_then(|x| x.as_array())
            .ok_or_else(|| ij("missing gens"))?
            .iter()
            .map(|terms| LaurentPoly::terms_from_json(&spec.gb_table, terms))
            .collect::<Result<Vec<_>, _>>()?;
        let reduced = v.get("reduced").and_then(|x| x.as_bool()).unwrap_or(false);
        Ok(IdealGens {
            spec,
            gens,
            reduced,
        })
    }
}

fn ij(msg: &str) -> IdealError {
    IdealError::Json(msg.to_string())
}

// ---------------------------------------------------------------------------
// Monomial order and internal polynomial representation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct BlockOrder {
    elim_len: usize,
}

fn grevlex(a: &[i32], b: &[i32]) -> Ordering {
    let da: i64 = a.iter().map(|&e| e as i64).sum();
    let db: i64 = b.iter().map(|&e| e as i64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {
            for i in (0..a.len()).rev() {
                if a[i] != b[i] {
                    // reverse lex: the smaller trailing exponent is larger
                    return b[i].cmp(&a[i]);
                }
            }
            Ordering::Equal
        }
        o => o,
    }
}

impl BlockOrder {
    fn cmp(&self, a: &[i32], b: &[i32]) -> Ordering {
        match grevlex(&a[..self.elim_len], &b[..self.elim_len]) {
            Ordering::Equal => grevlex(&a[self.elim_len..], &b[self.elim_len..]),
            o => o,
        }
    }
}

/// Terms sorted descending under the block order; leading term first.
/// Coefficients are integers; `normalize` keeps polynomials primitive with a
/// positive leading coefficient, which avoids the gcd churn of rational
/// arithmetic during reduction.
#[derive(Debug, Clone)]
struct GbPoly {
    terms: Vec<(Vec<i32>, BigInt)>,
}

impl GbPoly {
    fn from_laurent(p: &LaurentPoly, ord: BlockOrder) -> Self {
        let den_lcm = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms: Vec<(Vec<i32>, BigInt)> = p
            .terms()
            .map(|(m, c)| (m.0.clone(), c.numer() * (&den_lcm / c.denom())))
            .collect();
        terms.sort_by(|x, y| ord.cmp(&y.0, &x.0));
        GbPoly { terms }.normalize()
    }

    fn to_laurent(&self, table: &Arc<VarTable>) -> LaurentPoly {
        let mut p = LaurentPoly::zero(table);
        for (m, c) in &self.terms {
            let mono =
                LaurentPoly::monomial(table, m.clone(), Coeff::from_integer(c.clone())).unwrap();
            p = &p + &mono;
        }
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &[i32] {
        &self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    /// Strip integer content and make the leading coefficient positive.
    fn normalize(mut self) -> Self {
        if self.terms.is_empty() {
            return self;
        }
        let mut content = BigInt::zero();
        for (_, c) in &self.terms {
            content = content.gcd(c);
            if content.is_one() {
                break;
            }
        }
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        if !content.is_one() {
            for (_, c) in &mut self.terms {
                *c = &*c / &content;
            }
        }
        self
    }

    /// a * self - b * x^shift * other, merging sorted term lists.
    fn combine(
        &self,
        a: &BigInt,
        b: &BigInt,
        shift: &[i32],
        other: &GbPoly,
        ord: BlockOrder,
    ) -> GbPoly {
        let scaled: Vec<(Vec<i32>, BigInt)> = other
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: Vec<i32> = m.iter().zip(shift).map(|(x, y)| x + y).collect();
                (mono, -(b * c))
            })
            .collect();
        let mut out = Vec::with_capacity(self.terms.len() + scaled.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < scaled.len() {
            match ord.cmp(&self.terms[i].0, &scaled[j].0) {
                Ordering::Greater => {
                    out.push((self.terms[i].0.clone(), a * &self.terms[i].1));
                    i += 1;
                }
                Ordering::Less => {
                    out.push(scaled[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a * &self.terms[i].1 + &scaled[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        for (m, c) in &self.terms[i..] {
            out.push((m.clone(), a * c));
        }
        out.extend_from_slice(&scaled[j..]);
        GbPoly { terms: out }
    }
}

fn divides(a: &[i32], b: &[i32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm_exp(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn coprime(a: &[i32], b: &[i32]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// Full normal form of `p` against `basis`, up to a positive rational unit
/// (the result is kept primitive).
fn normal_form(p: GbPoly, basis: &[GbPoly], ord: BlockOrder) -> GbPoly {
    let mut rem: Vec<(Vec<i32>, BigInt)> = Vec::new();
    let mut work = p;
    let mut steps = 0usize;
    'outer: while !work.is_zero() {
        steps += 1;
        if steps % 16 == 0 {
            // joint content strip to keep integer coefficients small
            let mut content = BigInt::zero();
            for (_, c) in work.terms.iter().chain(rem.iter()) {
                content = content.gcd(c);
                if content.is_one() {
                    break;
                }
            }
            if !content.is_one() && !content.is_zero() {
                for (_, c) in work.terms.iter_mut().chain(rem.iter_mut()) {
                    *c = &*c / &content;
                }
            }
        }
        let lm = work.lm().to_vec();
        for f in basis {
            if divides(f.lm(), &lm) {
                let shift: Vec<i32> = lm.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
                let g = work.lc().gcd(f.lc());
                let a = f.lc() / &g;
                let b = work.lc() / &g;
                work = work.combine(&a, &b, &shift, f, ord);
                if !a.is_one() {
                    for (_, c) in &mut rem {
                        *c *= &a;
                    }
                }
                continue 'outer;
            }
        }
        let (lm, lc) = work.terms.remove(0);
        rem.push((lm, lc));
    }
    // remainder terms were collected in descending order
    GbPoly { terms: rem }.normalize()
}

#[derive(Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Vec<i32>,
}

/// Gebauer-Moeller pair update for a newly appended basis element `t`:
/// prunes old pairs whose lcm is rendered redundant (chain criterion) and
/// filters the new pairs by mutual lcm divisibility and coprimality
/// (product criterion).
fn update_pairs(pairs: &mut Vec<Pair>, basis: &[GbPoly], t: usize) {
    let lm_t = basis[t].lm().to_vec();
    let mut candidates: Vec<Pair> = (0..t)
        .map(|i| Pair {
            i,
            j: t,
            lcm: lcm_exp(basis[i].lm(), &lm_t),
        })
        .collect();
    let mut kept: Vec<Pair> = Vec::new();
    while let Some(p) = candidates.pop() {
        let is_coprime = coprime(basis[p.i].lm(), &lm_t);
        let shielded = candidates
            .iter()
            .chain(kept.iter())
            .any(|q| divides(&q.lcm, &p.lcm));
        if is_coprime || !shielded {
            kept.push(p);
        }
    }
    // Chain criterion on old pairs: lm(t) divides the lcm strictly inside
    // both mixed lcms.
    pairs.retain(|p| {
        !divides(&lm_t, &p.lcm)
            || lcm_exp(basis[p.i].lm(), &lm_t) == p.lcm
            || lcm_exp(basis[p.j].lm(), &lm_t) == p.lcm
    });
    pairs.extend(
        kept.into_iter()
            .filter(|p| !coprime(basis[p.i].lm(), &lm_t)),
    );
}

struct Budget {
    max_pairs: usize,
    deadline: Instant,
    used: usize,
}

impl Budget {
    fn charge(&mut self) -> Result<(), IdealError> {
        self.used += 1;
        if self.used > self.max_pairs {
            return Err(IdealError::Resource(format!(
                "S-pair budget of {} exhausted",
                self.max_pairs
            )));
        }
        if self.used % 64 == 0 && Instant::now() > self.deadline {
            return Err(IdealError::Resource("wall-clock timeout".to_string()));
        }
        Ok(())
    }
}

/// Reduced Groebner basis of the saturated ideal. Deterministic: input
/// generators are canonically sorted before processing and the output is
/// sorted by leading monomial.
pub fn groebner(g: &IdealGens, cfg: &GbConfig) -> Result<IdealGens, IdealError> {
    let ord = g.spec.order();
    let mut basis: Vec<GbPoly> = g
        .gens
        .iter()
        .map(|p| GbPoly::from_laurent(p, ord))
        .filter(|p| !p.is_zero())
        .collect();
    basis.sort_by(|a, b| {
        ord.cmp(a.lm(), b.lm())
            .then_with(|| a.terms.len().cmp(&b.terms.len()))
    });
    basis.dedup_by(|a, b| a.terms == b.terms);

    let mut budget = Budget {
        max_pairs: cfg.max_pairs,
        deadline: Instant::now() + cfg.timeout,
        used: 0,
    };

    // Pending pairs maintained with the Gebauer-Moeller update (product and
    // chain criteria applied at insertion time); selection by smallest lcm
    // (normal strategy).
    let mut pairs: Vec<Pair> = Vec::new();
    let input = std::mem::take(&mut basis);
    for p in input {
        basis.push(p);
        update_pairs(&mut pairs, &basis, basis.len() - 1);
    }

    while !pairs.is_empty() {
        let mut best = 0;
        for idx in 1..pairs.len() {
            if ord.cmp(&pairs[idx].lcm, &pairs[best].lcm) == Ordering::Less {
                best = idx;
            }
        }
        let Pair { i, j, lcm: lij } = pairs.swap_remove(best);
        budget.charge()?;

        let shift_i: Vec<i32> = lij.iter().zip(basis[i].lm()).map(|(a, b)| a - b).collect();
        let shift_j: Vec<i32> = lij.iter().zip(basis[j].lm()).map(|(a, b)| a - b).collect();
        // s-poly = (lc_j/g) x^{shift_i} f_i - (lc_i/g) x^{shift_j} f_j
        let gcd_lc = basis[i].lc().gcd(basis[j].lc());
        let a = basis[j].lc() / &gcd_lc;
        let b = basis[i].lc() / &gcd_lc;
        let shifted_i = GbPoly {
            terms: basis[i]
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        m.iter().zip(&shift_i).map(|(x, y)| x + y).collect(),
                        c.clone(),
                    )
                })
                .collect(),
        };
        let spoly = shifted_i.combine(&a, &b, &shift_j, &basis[j], ord);
        let nf = normal_form(spoly, &basis, ord);
        if !nf.is_zero() {
            basis.push(nf);
            update_pairs(&mut pairs, &basis, basis.len() - 1);
        }
    }

    // Minimalize: drop elements whose leading monomial is divisible by
    // another's.
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i != j
                && keep[j]
                && divides(basis[j].lm(), basis[i].lm())
                && (basis[j].lm() != basis[i].lm() || j < i)
            {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<GbPoly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| if k { Some(p) } else { None })
        .collect();

    // Interreduce: reduce each element's tail against the others.
    let mut reduced: Vec<GbPoly> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<GbPoly> = minimal
            .iter()
            .enumerate()
            .filter_map(|(k, p)| if k != i { Some(p.clone()) } else { None })
            .collect();
        let nf = normal_form(minimal[i].clone(), &others, ord);
        if !nf.is_zero() {
            reduced.push(nf);
        }
    }
    reduced.sort_by(|a, b| ord.cmp(a.lm(), b.lm()));

    let gens = reduced
        .iter()
        .map(|p| p.to_laurent(&g.spec.gb_table).primitive_part())
        .collect();
    Ok(IdealGens {
        spec: g.spec.clone(),
        gens,
        reduced: true,
    })
}

/// Normal form of a Laurent polynomial (source coordinates) against a
/// reduced basis; zero iff `p` lies in the saturated ideal.
pub fn member(p: &LaurentPoly, gb: &IdealGens, cfg: &GbConfig) -> Result<bool, IdealError> {
    let basis = if gb.reduced {
        gb.clone()
    } else {
        groebner(gb, cfg)?
    };
    let ord = basis.spec.order();
    let gb_polys: Vec<GbPoly> = basis
        .gens
        .iter()
        .map(|q| GbPoly::from_laurent(q, ord))
        .collect();
    let embedded = GbPoly::from_laurent(&basis.spec.embed(p), ord);
    Ok(normal_form(embedded, &gb_polys, ord).is_zero())
}

/// Result of eliminating the dropped block: generators in the Laurent table
/// of the kept variables.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub kept_table: Arc<VarTable>,
    pub gens: Vec<LaurentPoly>,
    /// the reduced basis the generators were read off from
    pub basis: IdealGens,
}

/// Generators of (saturated ideal) ∩ (subring without the eliminated block),
/// read off a reduced basis as the elements free of dropped variables and
/// tags.
pub fn eliminate(g: &IdealGens, cfg: &GbConfig) -> Result<Elimination, IdealError> {
    let basis = if g.reduced {
        g.clone()
    } else {
        groebner(g, cfg)?
    };
    let (kept_table, map) = basis.spec.kept_table();
    let mut gens = Vec::new();
    for p in &basis.gens {
        if basis.spec.free_of_elim_block(p) {
            let q = p
                .map_table(&kept_table, &map)
                .expect("element is free of dropped variables")
                .clear_units()
                .primitive_part();
            if !q.is_zero() && !gens.contains(&q) {
                gens.push(q);
            }
        }
    }
    Ok(Elimination {
        kept_table,
        gens,
        basis,
    })
}

/// Eliminate the dropped variables one at a time, re-saturating between
/// rounds. Each round picks the remaining variable with the smallest degree
/// footprint over the current generators and contracts it away; iterated
/// contraction yields the same elimination ideal as dropping the whole block
/// at once, but the intermediate bases stay far smaller. The timeout in
/// `cfg` bounds the whole run; the pair budget applies per round.
pub fn eliminate_stepwise(
    table: &Arc<VarTable>,
    gens: &[LaurentPoly],
    drop: &[usize],
    cfg: &GbConfig,
) -> Result<Elimination, IdealError> {
    let start = Instant::now();
    let mut table = table.clone();
    let mut gens = gens.to_vec();
    let mut drop_names: Vec<String> = drop.iter().map(|&v| table.name(v).to_string()).collect();
    loop {
        let remaining = cfg.timeout.checked_sub(start.elapsed()).ok_or_else(|| {
            IdealError::Resource("stepwise elimination timed out".to_string())
        })?;
        let round_cfg = GbConfig {
            max_pairs: cfg.max_pairs,
            timeout: remaining,
        };
        let v = match drop_names
            .iter()
            .enumerate()
            .min_by_key(|(_, name)| {
                let v = table.index(name).unwrap();
                gens.iter()
                    .map(|g| g.max_exps()[v] as i64 * g.num_terms() as i64)
                    .sum::<i64>()
            }) {
            Some((k, _)) => {
                let name = drop_names.swap_remove(k);
                vec![table.index(&name).unwrap()]
            }
            // one final round with nothing to drop, so the output is a
            // reduced basis of the saturated ideal
            None => Vec::new(),
        };
        let done = v.is_empty();
        let spec = RingSpec::new(&table, &v);
        let e = eliminate(&IdealGens::new(spec, &gens), &round_cfg)?;
        if done {
            return Ok(e);
        }
        table = e.kept_table;
        gens = e.gens;
    }
}

/// Convenience: the augmentation ideal of a presentation (relations with the
/// a_{ij} eliminated).
pub fn augmentation_ideal(pres: &Presentation, cfg: &GbConfig) -> Result<Elimination, IdealError> {
    eliminate_stepwise(
        pres.ring.table(),
        &pres.gens,
        &pres.ring.a_indices(),
        cfg,
    )
}

/// Mutual-membership equality of two saturated ideals presented by Laurent
/// generators over the same table.
pub fn ideal_equal(
    table: &Arc<VarTable>,
    a: &[LaurentPoly],
    b: &[LaurentPoly],
    cfg: &GbConfig,
) -> Result<bool, IdealError> {
    let spec = RingSpec::new(table, &[]);
    let gb_a = groebner(&IdealGens::new(spec.clone(), a), cfg)?;
    let gb_b = groebner(&IdealGens::new(spec, b), cfg)?;
    for p in a {
        if !member(p, &gb_b, cfg)? {
            return Ok(false);
        }
    }
    for p in b {
        if !member(p, &gb_a, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Numeric sampling oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub converged: bool,
    pub system_residual: f64,
    /// max |generator value| over the eliminated generators, at the solved
    /// point; None when the trial did not converge
    pub max_generator_abs: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub trials: Vec<TrialResult>,
}

impl OracleReport {
    pub fn convergent(&self) -> usize {
        self.trials.iter().filter(|t| t.converged).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.trials
            .iter()
            .filter_map(|t| t.max_generator_abs)
            .fold(0.0, f64::max)
    }

    pub fn text_report(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (i, t) in self.trials.iter().enumerate() {
            if t.converged {
                writeln!(
                    out,
                    "trial {:3}: converged (system residual {:.3e}), max |generator| = {:.3e}",
                    i,
                    t.system_residual,
                    t.max_generator_abs.unwrap()
                )
                .unwrap();
            } else {
                writeln!(out, "trial {i:3}: solver did not converge (skipped)").unwrap();
            }
        }
        writeln!(
            out,
            "summary: {}/{} convergent, max |generator| = {:.3e}",
            self.convergent(),
            self.trials.len(),
            self.max_residual()
        )
        .unwrap();
        out
    }
}

/// Solve the relation system at random complex samples of the free kept
/// variables (g and the nu_c), with the a_{ij} and the Lam_c as unknowns,
/// then evaluate `eliminated` (polynomials over `kept_table`) at each solved
/// point. Validates that eliminated generators really vanish on the solution
/// variety.
pub fn numeric_oracle(
    pres: &Presentation,
    eliminated: &[LaurentPoly],
    kept_table: &Arc<VarTable>,
    trials: usize,
    seed: u64,
) -> OracleReport {
    let ring = &pres.ring;
    let table = ring.table();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Unknown variables: every a_{ij} plus every Lam_c.
    let mut unknowns: Vec<usize> = ring.a_indices();
    for c in 0..ring.components() {
        unknowns.push(ring.lam_index(c));
    }
    // Free variables: g and the nu_c.
    let mut free: Vec<usize> = vec![ring.g_index()];
    for c in 0..ring.components() {
        free.push(ring.nu_index(c));
    }

    let jac: Vec<Vec<LaurentPoly>> = pres
        .gens
        .iter()
        .map(|f| unknowns.iter().map(|&v| f.derivative(v)).collect())
        .collect();

    let mut trials_out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut point = vec![Complex64::new(0.0, 0.0); table.len()];
        for &v in &free {
            point[v] = random_annulus(&mut rng);
        }
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for _restart in 0..6 {
            let mut x: Vec<Complex64> = (0..unknowns.len())
                .map(|_| random_annulus(&mut rng))
                .collect();
            if let Some(res) = gauss_newton(&pres.gens, &jac, &unknowns, &mut point, &mut x) {
                if best.as_ref().map_or(true, |(b, _)| res < *b) {
                    best = Some((res, x.clone()));
                }
                if best.as_ref().unwrap().0 <= 1e-12 {
                    break;
                }
            }
        }
        match best {
            Some((res, x)) if res <= 1e-12 => {
                for (&v, &val) in unknowns.iter().zip(&x) {
                    point[v] = val;
                }
                // Transfer kept-variable values by name.
                let kept_point: Vec<Complex64> = (0..kept_table.len())
                    .map(|i| {
                        let src = table.index(kept_table.name(i)).expect("shared names");
                        point[src]
                    })
                    .collect();
                let max_abs = eliminated
                    .iter()
                    .map(|p| p.eval_complex(&kept_point).norm())
                    .fold(0.0, f64::max);
                trials_out.push(TrialResult {
                    converged: true,
                    system_residual: res,
                    max_generator_abs: Some(max_abs),
                });
            }
            _ => trials_out.push(TrialResult {
                converged: false,
                system_residual: f64::INFINITY,
                max_generator_abs: None,
            }),
        }
    }
    OracleReport { trials: trials_out }
}

fn random_annulus(rng: &mut ChaCha8Rng) -> Complex64 {
    let r: f64 = rng.gen_range(0.5..1.8);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

/// Damped Gauss-Newton on the (generally overdetermined) relation system.
/// Returns the final infinity-norm residual on success.
fn gauss_newton(
    gens: &[LaurentPoly],
    jac: &[Vec<LaurentPoly>],
    unknowns: &[usize],
    point: &mut [Complex64],
    x: &mut [Complex64],
) -> Option<f64> {
    let m = gens.len();
    let n = unknowns.len();
    let mut lambda = 1e-3;
    let eval_residual = |point: &[Complex64]| -> Vec<Complex64> {
        gens.iter().map(|f| f.eval_complex(point)).collect()
    };
    let norm_inf = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);

    for (&v, &val) in unknowns.iter().zip(x.iter()) {
        point[v] = val;
    }
    let mut f = eval_residual(point);
    let mut fnorm = norm_inf(&f);
    for _iter in 0..200 {
        if fnorm <= 1e-13 {
            return Some(fnorm);
        }
        // J at current point
        let j: Vec<Vec<Complex64>> = jac
            .iter()
            .map(|row| row.iter().map(|d| d.eval_complex(point)).collect())
            .collect();
        // Normal equations (J^H J + lambda I) dx = -J^H f
        let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for p in 0..n {
            for q in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    s += j[r][p].conj() * j[r][q];
                }
                a[p][q] = s;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for r in 0..m {
                s += j[r][p].conj() * f[r];
            }
            b[p] = -s;
        }
        let mut improved = false;
        for _attempt in 0..8 {
            let mut a_damped = a.clone();
            for p in 0..n {
                a_damped[p][p] += Complex64::new(lambda, 0.0);
            }
            if let Some(dx) = solve_linear(a_damped, b.clone()) {
                let mut x_new = x.to_vec();
                for p in 0..n {
                    x_new[p] += dx[p];
                }
                for (&v, &val) in unknowns.iter().zip(x_new.iter()) {
                    point[v] = val;
                }
                let f_new = eval_residual(point);
                let fnorm_new = norm_inf(&f_new);
                if fnorm_new < fnorm {
                    x.copy_from_slice(&x_new);
                    f = f_new;
                    fnorm = fnorm_new;
                    lambda = (lambda * 0.3).max(1e-14);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    // restore the best point
    for (&v, &val) in unknowns.iter().zip(x.iter()) {
        point[v] = val;
    }
    if fnorm <= 1e-12 {
        Some(fnorm)
    } else {
        None
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot, pnorm) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pnorm < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            let bv = b[col];
            b[r] -= factor * bv;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in row + 1..n {
            s -= a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

pub fn coeff_abs_one(c: &Coeff) -> bool {
    c.abs().is_one()
}

pub fn coeff_to_f64(c: &Coeff) -> f64 {
    rational_to_f64(c)
}
