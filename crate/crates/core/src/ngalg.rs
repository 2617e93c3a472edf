//! The free commutative algebra on the generators a_{ij} over the Laurent
//! coefficient ring in (nu_c, Lam_c, g), the braid group action on it, the
//! left/right transport matrices, and the relation generators of the
//! degree-0 presentation for a braid closure.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, One};
use serde_json::{json, Value};
use thiserror::Error;

use crate::braid::{BraidWord, ClosureInfo};
use crate::poly::{table_from_json, table_to_json, Coeff, LaurentPoly, PolyError, VarTable};

#[derive(Debug, Error)]
pub enum NgalgError {
    #[error("strand count {0} exceeds the supported maximum of 9")]
    TooManyStrands(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("malformed presentation JSON: {0}")]
    Json(String),
}

/// Which component's meridian variable decorates the lower-triangular and
/// diagonal entries of the generator matrices when the closure is a link.
/// Irrelevant for knots. The row convention is the default; the choice is
/// locked by the Markov-invariance tests on the Hopf link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMu {
    Row,
    Column,
}

/// Sign of the nu-exponent in the framing entry of the twist matrix.
/// The default -2 wr matches the knot-case formula; the opposite sign is
/// kept reachable as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaNuSign {
    NegTwoWr,
    PosTwoWr,
}

/// Sign of the (-g)-exponent in the strand-rescaling automorphism.
/// `DiMinusDj` is selected by the transport-conjugation property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiGSign {
    DiMinusDj,
    DjMinusDi,
}

#[derive(Debug, Clone)]
pub struct PresentOptions {
    pub lambda_nu_sign: LambdaNuSign,
    pub link_mu: LinkMu,
    /// Force emission of the conjugation relation even for knots, where it is
    /// redundant. Multi-component closures always emit it.
    pub include_ch1: bool,
}

impl Default for PresentOptions {
    fn default() -> Self {
        PresentOptions {
            lambda_nu_sign: LambdaNuSign::NegTwoWr,
            link_mu: LinkMu::Row,
            include_ch1: false,
        }
    }
}

/// The polynomial ring for a braid closure: variables g, one (nu, Lam) pair
/// per component (all invertible), and one non-invertible a_{ij} per ordered
/// pair of distinct strands.
#[derive(Debug, Clone, PartialEq)]
pub struct AugRing {
    table: Arc<VarTable>,
    n: usize,
    r: usize,
    comp_of: Vec<usize>,
    g: usize,
    nu: Vec<usize>,
    lam: Vec<usize>,
    a: BTreeMap<(usize, usize), usize>,
}

impl AugRing {
    /// Ring for `n` strands all lying on one component (the generic setting
    /// in which the transport identities are stated).
    pub fn knot(n: usize) -> Result<Self, NgalgError> {
        Self::build(n, vec![0; n], 1)
    }

    pub fn from_closure(c: &ClosureInfo) -> Result<Self, NgalgError> {
        Self::build(c.n, c.comp_of.clone(), c.num_components())
    }

    fn build(n: usize, comp_of: Vec<usize>, r: usize) -> Result<Self, NgalgError> {
        if n > 9 {
            return Err(NgalgError::TooManyStrands(n));
        }
        let mut vars: Vec<(String, bool)> = vec![("g".to_string(), true)];
        for c in 0..r {
            let suffix = if r == 1 {
                String::new()
            } else {
                format!("{}", c + 1)
            };
            vars.push((format!("nu{suffix}"), true));
        }
        for c in 0..r {
            let suffix = if r == 1 {
                String::new()
            } else {
                format!("{}", c + 1)
            };
            vars.push((format!("Lam{suffix}"), true));
        }
        let mut a = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    a.insert((i, j), vars.len());
                    vars.push((format!("a{}{}", i + 1, j + 1), false));
                }
            }
        }
        let table = VarTable::new(&vars)?;
        Ok(AugRing {
            table,
            n,
            r,
            comp_of,
            g: 0,
            nu: (0..r).map(|c| 1 + c).collect(),
            lam: (0..r).map(|c| 1 + r + c).collect(),
            a,
        })
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.r
    }

    pub fn comp_of(&self, strand: usize) -> usize {
        self.comp_of[strand]
    }

    pub fn a_index(&self, i: usize, j: usize) -> usize {
        self.a[&(i, j)]
    }

    pub fn a_indices(&self) -> Vec<usize> {
        self.a.values().copied().collect()
    }

    pub fn a_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.a.keys().copied()
    }

    pub fn a_poly(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::var(&self.table, self.a_index(i, j))
    }

    pub fn one(&self) -> LaurentPoly {
        LaurentPoly::one(&self.table)
    }

    pub fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(&self.table)
    }

    pub fn g_pow(&self, e: i32) -> LaurentPoly {
        LaurentPoly::var_pow(&self.table, self.g, e).unwrap()
    }

    /// (-g)^e as a Laurent monomial.
    pub fn neg_g_pow(&self, e: i64) -> LaurentPoly {
        let sign = if e.rem_euclid(2) == 0 {
            Coeff::one()
        } else {
            -Coeff::one()
        };
        self.g_pow(e as i32).scale(&sign)
    }

    pub fn nu_pow(&self, comp: usize, e: i32) -> LaurentPoly {
        LaurentPoly::var_pow(&self.table, self.nu[comp], e).unwrap()
    }

    pub fn lam_pow(&self, comp: usize, e: i32) -> LaurentPoly {
        LaurentPoly::var_pow(&self.table, self.lam[comp], e).unwrap()
    }

    pub fn nu_index(&self, comp: usize) -> usize {
        self.nu[comp]
    }

    pub fn lam_index(&self, comp: usize) -> usize {
        self.lam[comp]
    }

    pub fn g_index(&self) -> usize {
        self.g
    }

    /// Table holding only g and the per-component nu, Lam (the kept block
    /// for elimination); `var_map` sends this ring's indices into it.
    pub fn coefficient_table(&self) -> (Arc<VarTable>, Vec<Option<usize>>) {
        let keep: Vec<usize> = std::iter::once(self.g)
            .chain(self.nu.iter().copied())
            .chain(self.lam.iter().copied())
            .collect();
        let vars: Vec<(String, bool)> = keep
            .iter()
            .map(|&i| (self.table.name(i).to_string(), true))
            .collect();
        let target = VarTable::new(&vars).unwrap();
        let mut var_map = vec![None; self.table.len()];
        for (new_i, &old_i) in keep.iter().enumerate() {
            var_map[old_i] = Some(new_i);
        }
        (target, var_map)
    }
}

/// A square matrix of ring elements, one row and column per strand.
#[derive(Debug, Clone, PartialEq)]
pub struct AugMatrix {
    ring: AugRing,
    entries: Vec<LaurentPoly>,
}

impl AugMatrix {
    pub fn identity(ring: &AugRing) -> Self {
        Self::from_fn(ring, |i, j| {
            if i == j {
                ring.one()
            } else {
                ring.zero()
            }
        })
    }

    pub fn from_fn(ring: &AugRing, f: impl Fn(usize, usize) -> LaurentPoly) -> Self {
        let n = ring.strands();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        AugMatrix {
            ring: ring.clone(),
            entries,
        }
    }

    pub fn diagonal(ring: &AugRing, diag: Vec<LaurentPoly>) -> Self {
        Self::from_fn(ring, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                ring.zero()
            }
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.ring.strands() + j]
    }

    pub fn mul(&self, other: &AugMatrix) -> AugMatrix {
        let n = self.ring.strands();
        AugMatrix::from_fn(&self.ring, |i, j| {
            let mut acc = self.ring.zero();
            for k in 0..n {
                acc = &acc + &(self.get(i, k) * other.get(k, j));
            }
            acc
        })
    }

    pub fn sub(&self, other: &AugMatrix) -> AugMatrix {
        AugMatrix::from_fn(&self.ring, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }
}

/// A coefficient-fixing algebra endomorphism, stored as the images of the
/// generators a_{ij} and extended multiplicatively.
#[derive(Debug, Clone, PartialEq)]
pub struct AugMap {
    ring: AugRing,
    images: BTreeMap<(usize, usize), LaurentPoly>,
}

impl AugMap {
    pub fn identity(ring: &AugRing) -> Self {
        let images = ring
            .a_pairs()
            .map(|(i, j)| ((i, j), ring.a_poly(i, j)))
            .collect();
        AugMap {
            ring: ring.clone(),
            images,
        }
    }

    pub fn image(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.images[&(i, j)]
    }

    pub fn apply(&self, p: &LaurentPoly) -> LaurentPoly {
        let mut map = BTreeMap::new();
        for (&(i, j), img) in &self.images {
            let var = self.ring.a_index(i, j);
            if img != &self.ring.a_poly(i, j) {
                map.insert(var, img.clone());
            }
        }
        p.substitute_poly(&map).expect("images share the ring table")
    }

    /// self after other: (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &AugMap) -> AugMap {
        let images = other
            .images
            .iter()
            .map(|(&k, img)| (k, self.apply(img)))
            .collect();
        AugMap {
            ring: self.ring.clone(),
            images,
        }
    }

    pub fn apply_matrix(&self, m: &AugMatrix) -> AugMatrix {
        AugMatrix::from_fn(&self.ring, |i, j| self.apply(m.get(i, j)))
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .all(|(&(i, j), img)| img == &self.ring.a_poly(i, j))
    }
}

/// The action of a single braid generator (1-based index `k`, so it crosses
/// strands k-1 and k in 0-based terms) on the generators a_{ij}.
pub fn phi_gen(ring: &AugRing, k: usize, positive: bool) -> AugMap {
    let n = ring.strands();
    assert!(k >= 1 && k <= n - 1, "generator index out of range");
    let lo = k - 1; // 0-based strand k
    let hi = k; // 0-based strand k+1
    let a = |i: usize, j: usize| ring.a_poly(i, j);
    let mut images = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let img = if positive {
                match (i, j) {
                    (x, y) if x == lo && y == hi => a(hi, lo).neg(),
                    (x, y) if x == hi && y == lo => a(lo, hi).neg(),
                    (x, y) if x == hi => a(lo, y),
                    (x, y) if y == hi => a(x, lo),
                    (x, y) if x == lo => &a(hi, y) - &(&a(hi, lo) * &a(lo, y)),
                    (x, y) if y == lo => &a(x, hi) - &(&a(x, lo) * &a(lo, hi)),
                    _ => a(i, j),
                }
            } else {
                match (i, j) {
                    (x, y) if x == lo && y == hi => a(hi, lo).neg(),
                    (x, y) if x == hi && y == lo => a(lo, hi).neg(),
                    (x, y) if x == lo => a(hi, y),
                    (x, y) if y == lo => a(x, hi),
                    (x, y) if x == hi => &a(lo, y) - &(&a(lo, hi) * &a(hi, y)),
                    (x, y) if y == hi => &a(x, lo) - &(&a(x, hi) * &a(hi, lo)),
                    _ => a(i, j),
                }
            };
            images.insert((i, j), img);
        }
    }
    AugMap {
        ring: ring.clone(),
        images,
    }
}

/// Left transport matrix of a single generator.
pub fn phi_l_gen(ring: &AugRing, k: usize, positive: bool) -> AugMatrix {
    let lo = k - 1;
    let hi = k;
    two_by_two_block(ring, lo, hi, positive, ring.a_poly(hi, lo), ring.a_poly(lo, hi))
}

/// Right transport matrix of a single generator.
pub fn phi_r_gen(ring: &AugRing, k: usize, positive: bool) -> AugMatrix {
    let lo = k - 1;
    let hi = k;
    two_by_two_block(ring, lo, hi, positive, ring.a_poly(lo, hi), ring.a_poly(hi, lo))
}

// Positive generator block [[-x, 1], [1, 0]]; the inverse block
// [[0, 1], [1, -y]] is the exact 2x2 inverse transported by the inverse
// action (x = a_{k+1,k} picks up y = a_{k,k+1} and vice versa).
fn two_by_two_block(
    ring: &AugRing,
    lo: usize,
    hi: usize,
    positive: bool,
    x: LaurentPoly,
    y: LaurentPoly,
) -> AugMatrix {
    AugMatrix::from_fn(ring, |i, j| {
        if i == lo && j == lo {
            if positive {
                x.neg()
            } else {
                ring.zero()
            }
        } else if (i == lo && j == hi) || (i == hi && j == lo) {
            ring.one()
        } else if i == hi && j == hi {
            if positive {
                ring.zero()
            } else {
                y.neg()
            }
        } else if i == j {
            ring.one()
        } else {
            ring.zero()
        }
    })
}

/// The action and both transport matrices of a braid word, built by folding
/// the one-letter data with the composition rules
/// PhiL_{uv} = phi_u(PhiL_v) PhiL_u  and  PhiR_{uv} = PhiR_u phi_u(PhiR_v).
pub struct BraidOperators {
    pub phi: AugMap,
    pub phi_l: AugMatrix,
    pub phi_r: AugMatrix,
}

pub fn braid_operators(ring: &AugRing, word: &BraidWord) -> BraidOperators {
    let mut phi = AugMap::identity(ring);
    let mut phi_l = AugMatrix::identity(ring);
    let mut phi_r = AugMatrix::identity(ring);
    for &letter in word.letters() {
        let k = letter.unsigned_abs() as usize;
        let positive = letter > 0;
        let g_phi = phi_gen(ring, k, positive);
        let g_l = phi_l_gen(ring, k, positive);
        let g_r = phi_r_gen(ring, k, positive);
        phi_l = phi.apply_matrix(&g_l).mul(&phi_l);
        phi_r = phi_r.mul(&phi.apply_matrix(&g_r));
        phi = phi.compose(&g_phi);
    }
    BraidOperators { phi, phi_l, phi_r }
}

/// The matrix A in (nu, Lam, g) coordinates; mu is replaced by nu_c^{-2}
/// with the component c chosen per `link_mu`.
pub fn build_a(ring: &AugRing, link_mu: LinkMu) -> AugMatrix {
    AugMatrix::from_fn(ring, |i, j| {
        let c = match link_mu {
            LinkMu::Row => ring.comp_of(i),
            LinkMu::Column => ring.comp_of(j.min(i).max(if i == j { i } else { j })),
        };
        // For the column convention, off-diagonal entries take the column
        // strand's component; the diagonal is the strand's own.
        let c = match link_mu {
            LinkMu::Row => c,
            LinkMu::Column => {
                if i == j {
                    ring.comp_of(i)
                } else {
                    ring.comp_of(j)
                }
            }
        };
        let mu = ring.nu_pow(c, -2);
        if i < j {
            ring.a_poly(i, j)
        } else if i > j {
            (&mu * &ring.a_poly(i, j)).neg()
        } else {
            &ring.one() - &mu
        }
    })
}

/// The matrix -g A-hat in (nu, Lam, g) coordinates, the form the relations
/// use directly.
pub fn build_neg_g_ahat(ring: &AugRing, link_mu: LinkMu) -> AugMatrix {
    AugMatrix::from_fn(ring, |i, j| {
        let c = match link_mu {
            LinkMu::Row => ring.comp_of(i),
            LinkMu::Column => {
                if i == j {
                    ring.comp_of(i)
                } else {
                    ring.comp_of(j)
                }
            }
        };
        let g_mu = &ring.g_pow(1) * &ring.nu_pow(c, -2);
        if i < j {
            (&ring.g_pow(-1) * &ring.a_poly(i, j)).neg()
        } else if i > j {
            &g_mu * &ring.a_poly(i, j)
        } else {
            &g_mu - &ring.g_pow(-1)
        }
    })
}

/// Diagonal twist matrix: 1 everywhere except the leftmost strand of each
/// component, which carries Lam_c^{-1} nu_c^{+-2 wr_c} (-g)^{wr_c} with
/// wr_c the component's self-writhe.
pub fn build_lambda_prime(
    ring: &AugRing,
    closure: &ClosureInfo,
    sign: LambdaNuSign,
) -> AugMatrix {
    let mut diag: Vec<LaurentPoly> = (0..ring.strands()).map(|_| ring.one()).collect();
    for c in 0..closure.num_components() {
        let wr = closure.self_wr[c];
        let nu_exp = match sign {
            LambdaNuSign::NegTwoWr => -2 * wr,
            LambdaNuSign::PosTwoWr => 2 * wr,
        };
        let entry = &(&ring.lam_pow(c, -1) * &ring.nu_pow(c, nu_exp as i32)) * &ring.neg_g_pow(wr);
        diag[closure.leftmost[c]] = entry;
    }
    AugMatrix::diagonal(ring, diag)
}

/// Inverse of a diagonal matrix of monomial units.
pub fn invert_diagonal(m: &AugMatrix) -> AugMatrix {
    AugMatrix::from_fn(&m.ring, |i, j| {
        if i == j {
            m.get(i, i)
                .inverse_monomial()
                .expect("diagonal entries are monomial units")
        } else {
            m.ring.zero()
        }
    })
}

/// diag((-g)^{d(i)})
pub fn build_d_matrix(ring: &AugRing, closure: &ClosureInfo) -> AugMatrix {
    AugMatrix::diagonal(
        ring,
        (0..ring.strands())
            .map(|i| ring.neg_g_pow(closure.d[i] as i64))
            .collect(),
    )
}

/// diag((-g)^{d(perm(i))})
pub fn build_d_beta_matrix(ring: &AugRing, closure: &ClosureInfo) -> AugMatrix {
    AugMatrix::diagonal(
        ring,
        (0..ring.strands())
            .map(|i| ring.neg_g_pow(closure.d[closure.perm[i]] as i64))
            .collect(),
    )
}

/// The strand-rescaling automorphism: a_{ij} -> (-g)^{s(d(i)-d(j))}
/// (nu_{c(i)}/nu_{c(j)}) a_{ij}.
pub fn psi(ring: &AugRing, closure: &ClosureInfo, sign: PsiGSign) -> AugMap {
    let images = ring
        .a_pairs()
        .map(|(i, j)| {
            let k = closure.d[i] as i64 - closure.d[j] as i64;
            let e = match sign {
                PsiGSign::DiMinusDj => k,
                PsiGSign::DjMinusDi => -k,
            };
            let mut img = &ring.neg_g_pow(e) * &ring.a_poly(i, j);
            let (ci, cj) = (ring.comp_of(i), ring.comp_of(j));
            if ci != cj {
                img = &img * &(&ring.nu_pow(ci, 1) * &ring.nu_pow(cj, -1));
            }
            ((i, j), img)
        })
        .collect();
    AugMap {
        ring: ring.clone(),
        images,
    }
}

/// A variable ring plus relation generators; the input and output of
/// elimination.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub ring: AugRing,
    pub gens: Vec<LaurentPoly>,
}

impl Presentation {
    pub fn to_json(&self) -> Value {
        json!({
            "vars": table_to_json(self.ring.table()),
            "n": self.ring.strands(),
            "comp_of": self.ring.comp_of,
            "elim": self.ring.a_indices().iter()
                .map(|&i| self.ring.table().name(i)).collect::<Vec<_>>(),
            "gens": self.gens.iter().map(|p| {
                p.to_json().get("terms").cloned().unwrap()
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, NgalgError> {
        let table =
            table_from_json(v.get("vars").ok_or_else(|| js("missing vars"))?)?;
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| js("missing n"))? as usize;
        let comp_of: Vec<usize> = v
            .get("comp_of")
            .and_then(|x| x.as_array())
            .ok_or_else(|| js("missing comp_of"))?
            .iter()
            .map(|e| e.as_u64().map(|x| x as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| js("bad comp_of"))?;
        let r = comp_of.iter().copied().max().map_or(1, |m| m + 1);
        let ring = AugRing::build(n, comp_of, r)?;
        if *ring.table() != table {
            return Err(js("variable table does not match the ring layout"));
        }
        let gens = v
            .get("gens")
            .and_then(|x| x.as_array())
            .ok_or_else(|| js("missing gens"))?
            .iter()
            .map(|terms| LaurentPoly::terms_from_json(ring.table(), terms))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation { ring, gens })
    }
}

fn js(msg: &str) -> NgalgError {
    NgalgError::Json(msg.to_string())
}

/// Relation generators for the closure of `word`: all entries of
/// (-g A-hat) - Lam' PhiL A and of A Lam' - (-g A-hat) PhiR, normalized and
/// deduplicated. For knots the conjugation relation A Lam' = Lam' phi(A) is a
/// consequence of the other two and is only included when requested (for the
/// containment test); for multi-component closures it is an independent
/// defining relation and is always emitted.
pub fn relations(word: &BraidWord, opts: &PresentOptions) -> Result<Presentation, NgalgError> {
    let closure = crate::braid::closure(word);
    let ring = AugRing::from_closure(&closure)?;
    let ops = braid_operators(&ring, word);
    let a = build_a(&ring, opts.link_mu);
    let h = build_neg_g_ahat(&ring, opts.link_mu);
    let lp = build_lambda_prime(&ring, &closure, opts.lambda_nu_sign);

    let ch2 = h.sub(&lp.mul(&ops.phi_l).mul(&a));
    let ch3 = a.mul(&lp).sub(&h.mul(&ops.phi_r));

    let mut gens: Vec<LaurentPoly> = Vec::new();
    let push = |p: &LaurentPoly, gens: &mut Vec<LaurentPoly>| {
        if p.is_zero() {
            return;
        }
        let norm = p.clear_units().primitive_part();
        if !gens.contains(&norm) {
            gens.push(norm);
        }
    };
    for p in ch2.entries() {
        push(p, &mut gens);
    }
    for p in ch3.entries() {
        push(p, &mut gens);
    }
    if opts.include_ch1 || closure.num_components() > 1 {
        let ch1 = a.mul(&lp).sub(&lp.mul(&ops.phi.apply_matrix(&a)));
        for p in ch1.entries() {
            push(p, &mut gens);
        }
    }
    Ok(Presentation { ring, gens })
}

/// Entries of the redundant conjugation relation A Lam' - Lam' phi(A),
/// normalized the same way as `relations` output.
pub fn ch1_entries(word: &BraidWord, opts: &PresentOptions) -> Result<Vec<LaurentPoly>, NgalgError> {
    let closure = crate::braid::closure(word);
    let ring = AugRing::from_closure(&closure)?;
    let ops = braid_operators(&ring, word);
    let a = build_a(&ring, opts.link_mu);
    let lp = build_lambda_prime(&ring, &closure, opts.lambda_nu_sign);
    let ch1 = a.mul(&lp).sub(&lp.mul(&ops.phi.apply_matrix(&a)));
    Ok(ch1
        .entries()
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.clear_units().primitive_part())
        .collect())
}

pub fn coeff_from_i64(c: i64) -> Coeff {
    Coeff::from_integer(BigInt::from(c))
}
