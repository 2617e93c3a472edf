//! Braid words, their closures, and the combinatorial statistics the
//! presentation needs: permutation, components, writhes, and d-statistics.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("letter at position {pos} is zero (letters are nonzero integers)")]
    ZeroLetter { pos: usize },
    #[error("letter {letter} at position {pos} out of range for {n} strands")]
    LetterOutOfRange { letter: i32, pos: usize, n: usize },
    #[error("token `{token}` at position {pos} is not an integer")]
    BadToken { token: String, pos: usize },
    #[error("strand count must be at least 1")]
    NoStrands,
}

/// A braid word on `n` strands. Letter +k is the positive generator crossing
/// strands k and k+1; -k is its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BraidWord {
    n: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if n < 1 {
            return Err(BraidError::NoStrands);
        }
        for (pos, &l) in letters.iter().enumerate() {
            if l == 0 {
                return Err(BraidError::ZeroLetter { pos });
            }
            if l.unsigned_abs() as usize > n - 1 {
                return Err(BraidError::LetterOutOfRange { letter: l, pos, n });
            }
        }
        Ok(BraidWord { n, letters })
    }

    /// Parse whitespace-separated nonzero integers. With `strands = None`
    /// the count is inferred as max |letter| + 1 (1 for the empty word).
    pub fn parse(text: &str, strands: Option<usize>) -> Result<Self, BraidError> {
        let mut letters = Vec::new();
        for (pos, token) in text.split_whitespace().enumerate() {
            let l: i32 = token.parse().map_err(|_| BraidError::BadToken {
                token: token.to_string(),
                pos,
            })?;
            letters.push(l);
        }
        let n = match strands {
            Some(n) => n,
            None => letters
                .iter()
                .map(|l| l.unsigned_abs() as usize + 1)
                .max()
                .unwrap_or(1),
        };
        Self::new(n, letters)
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|&l| if l > 0 { 1 } else { -1 }).sum()
    }

    pub fn inverse(&self) -> Self {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// The literal word w . self . w^{-1}; no free reduction is performed.
    pub fn conjugate(&self, w: &BraidWord) -> Result<Self, BraidError> {
        let n = self.n.max(w.n);
        let mut letters = w.letters.clone();
        letters.extend_from_slice(&self.letters);
        letters.extend(w.inverse().letters);
        BraidWord::new(n, letters)
    }

    /// Markov stabilization: one extra strand, with sigma_n^{+-1} appended.
    pub fn stabilize(&self, positive: bool) -> Self {
        let mut letters = self.letters.clone();
        let gen = self.n as i32;
        letters.push(if positive { gen } else { -gen });
        BraidWord {
            n: self.n + 1,
            letters,
        }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<Self, BraidError> {
        let n = self.n.max(other.n);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord::new(n, letters)
    }
}

impl std::fmt::Display for BraidWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let words: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", words.join(" "))
    }
}

/// Closure combinatorics of a braid word. Strands are 0-based internally;
/// `perm[i]` is the position where the strand entering at position i exits.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureInfo {
    pub n: usize,
    pub perm: Vec<usize>,
    /// Cycles of `perm`, numbered in order of their leftmost strand.
    pub components: Vec<Vec<usize>>,
    /// Component index of each strand.
    pub comp_of: Vec<usize>,
    pub wr_total: i64,
    /// Signed self-crossing count per component (crossings where both
    /// strands at that point of the word belong to the component).
    pub self_wr: Vec<i64>,
    /// Smallest t >= 0 with perm^t(i) = leftmost strand of i's component.
    pub d: Vec<usize>,
    pub leftmost: Vec<usize>,
    /// Signed count of crossings between distinct components.
    pub mixed_wr: i64,
}

impl ClosureInfo {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }
}

/// Compute the closure data of a braid word.
pub fn closure(b: &BraidWord) -> ClosureInfo {
    let n = b.strands();
    // Permutation induced by the word, composed so that the first letter is
    // the outermost factor (beta = s_{l_1} . s_{l_2} . ... as functions).
    // This matches the transport-matrix fold: the ij-entry of the left
    // transport matrix of the word is a sum of chains starting at perm[i].
    let mut perm: Vec<usize> = (0..n).collect();
    for &l in b.letters() {
        let k = l.unsigned_abs() as usize - 1;
        perm.swap(k, k + 1);
    }

    // Cycles, numbered by leftmost strand.
    let mut comp_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    let mut leftmost = Vec::new();
    for start in 0..n {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let c = components.len();
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            comp_of[cur] = c;
            cycle.push(cur);
            cur = perm[cur];
            if cur == start {
                break;
            }
        }
        leftmost.push(start);
        components.push(cycle);
    }

    // d(i): iterate perm until the component's leftmost strand is reached.
    let mut d = vec![0usize; n];
    for i in 0..n {
        let target = leftmost[comp_of[i]];
        let mut cur = i;
        let mut t = 0;
        while cur != target {
            cur = perm[cur];
            t += 1;
        }
        d[i] = t;
    }

    // Writhes with positional strand tracking: position p currently holds
    // strand occupant[p]; a crossing at k involves occupant[k], occupant[k+1].
    let mut occupant: Vec<usize> = (0..n).collect();
    let mut wr_total = 0i64;
    let mut self_wr = vec![0i64; components.len()];
    let mut mixed_wr = 0i64;
    for &l in b.letters() {
        let k = l.unsigned_abs() as usize - 1;
        let sign = if l > 0 { 1 } else { -1 };
        wr_total += sign;
        let (a, bb) = (occupant[k], occupant[k + 1]);
        if comp_of[a] == comp_of[bb] {
            self_wr[comp_of[a]] += sign;
        } else {
            mixed_wr += sign;
        }
        occupant.swap(k, k + 1);
    }

    ClosureInfo {
        n,
        perm,
        components,
        comp_of,
        wr_total,
        self_wr,
        d,
        leftmost,
        mixed_wr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn parse_basic() {
        let b = BraidWord::parse("1 1 1", Some(2)).unwrap();
        assert_eq!(b.letters(), &[1, 1, 1]);
        assert_eq!(b.strands(), 2);

        let b = BraidWord::parse("", Some(1)).unwrap();
        assert_eq!(b.strands(), 1);
        assert!(b.letters().is_empty());

        let b = BraidWord::parse("1 -2 1 -2", None).unwrap();
        assert_eq!(b.strands(), 3);
        assert_eq!(b.letters(), &[1, -2, 1, -2]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            BraidWord::parse("1 0 1", Some(2)),
            Err(BraidError::ZeroLetter { pos: 1 })
        );
        assert_eq!(
            BraidWord::parse("1 2", Some(2)),
            Err(BraidError::LetterOutOfRange {
                letter: 2,
                pos: 1,
                n: 2
            })
        );
        assert!(matches!(
            BraidWord::parse("1 x", Some(2)),
            Err(BraidError::BadToken { pos: 1, .. })
        ));
    }

    #[test]
    fn trefoil_closure() {
        let b = BraidWord::parse("1 1 1", Some(2)).unwrap();
        let c = closure(&b);
        assert_eq!(c.num_components(), 1);
        assert_eq!(c.wr_total, 3);
        assert_eq!(c.self_wr, vec![3]);
        assert_eq!(c.d, vec![0, 1]);
        assert_eq!(c.leftmost, vec![0]);
    }

    #[test]
    fn hopf_closure() {
        let b = BraidWord::parse("1 1", Some(2)).unwrap();
        let c = closure(&b);
        assert_eq!(c.num_components(), 2);
        assert_eq!(c.components, vec![vec![0], vec![1]]);
        assert_eq!(c.wr_total, 2);
        assert_eq!(c.self_wr, vec![0, 0]);
        assert_eq!(c.d, vec![0, 0]);
        assert_eq!(c.mixed_wr, 2);
    }

    #[test]
    fn unknot_closure() {
        let b = BraidWord::parse("", Some(1)).unwrap();
        let c = closure(&b);
        assert_eq!(c.num_components(), 1);
        assert_eq!(c.wr_total, 0);
        assert_eq!(c.d, vec![0]);
    }

    #[test]
    fn conjugate_and_stabilize_are_literal() {
        let b = BraidWord::parse("1 1 1", Some(2)).unwrap();
        let w = BraidWord::parse("1", Some(2)).unwrap();
        let c = b.conjugate(&w).unwrap();
        assert_eq!(c.letters(), &[1, 1, 1, 1, -1]);

        let s = b.stabilize(true);
        assert_eq!(s.strands(), 3);
        assert_eq!(s.letters(), &[1, 1, 1, 2]);

        let id1 = BraidWord::parse("", Some(1)).unwrap();
        let s = id1.stabilize(false);
        assert_eq!(s.strands(), 2);
        assert_eq!(s.letters(), &[-1]);
    }

    fn random_word(rng: &mut StdRng, n: usize, len: usize) -> BraidWord {
        let letters: Vec<i32> = (0..len)
            .map(|_| {
                let k = rng.gen_range(1..n as i32);
                if rng.gen_bool(0.5) {
                    k
                } else {
                    -k
                }
            })
            .collect();
        BraidWord::new(n, letters).unwrap()
    }

    #[test]
    fn d_recurrence() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(2..5);
            let len = rng.gen_range(0..7);
            let b = random_word(&mut rng, n, len);
            let c = closure(&b);
            for i in 0..n {
                let size = c.components[c.comp_of[i]].len();
                if c.d[i] > 0 {
                    assert_eq!(c.d[c.perm[i]], c.d[i] - 1);
                } else if size > 1 {
                    assert_eq!(i, c.leftmost[c.comp_of[i]]);
                    assert_eq!(c.d[c.perm[i]], size - 1);
                }
            }
        }
    }

    #[test]
    fn writhe_decomposition() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(2..5);
            let len = rng.gen_range(0..8);
            let b = random_word(&mut rng, n, len);
            let c = closure(&b);
            let self_total: i64 = c.self_wr.iter().sum();
            assert_eq!(c.wr_total, self_total + c.mixed_wr);
        }
    }

    #[test]
    fn conjugation_preserves_component_statistics() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..100 {
            let n = rng.gen_range(2..5);
            let len = rng.gen_range(0..6);
            let b = random_word(&mut rng, n, len);
            let len = rng.gen_range(0..4);
            let w = random_word(&mut rng, n, len);
            let c1 = closure(&b);
            let c2 = closure(&b.conjugate(&w).unwrap());
            assert_eq!(c1.num_components(), c2.num_components());
            let mut sizes1: Vec<usize> = c1.components.iter().map(|c| c.len()).collect();
            let mut sizes2: Vec<usize> = c2.components.iter().map(|c| c.len()).collect();
            sizes1.sort_unstable();
            sizes2.sort_unstable();
            assert_eq!(sizes1, sizes2);
            let mut sw1 = c1.self_wr.clone();
            let mut sw2 = c2.self_wr.clone();
            sw1.sort_unstable();
            sw2.sort_unstable();
            assert_eq!(sw1, sw2);
        }
    }
}
