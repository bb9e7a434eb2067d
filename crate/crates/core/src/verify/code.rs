//! `(b, k)`-hash codes: the defining property and exhaustive search for
//! the largest code at tiny lengths.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Codewords over `{1, …, b}` of common length `n`, stored 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    b: usize,
    n: usize,
    words: Vec<Vec<usize>>,
}

impl Code {
    pub fn new(b: usize, n: usize, words: Vec<Vec<usize>>) -> Result<Self> {
        if b == 0 || b > 64 || n == 0 || n > 64 {
            return Err(Error::InvalidParams(format!(
                "need 1 <= b <= 64 and 1 <= n <= 64, got b={b}, n={n}"
            )));
        }
        for w in &words {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            if let Some(&s) = w.iter().find(|&&s| s == 0 || s > b) {
                return Err(Error::SymbolOutOfRange { symbol: s, b });
            }
        }
        for i in 1..words.len() {
            if words[..i].contains(&words[i]) {
                return Err(Error::DuplicateWord(i));
            }
        }
        Ok(Self { b, n, words })
    }

    /// One codeword per line, symbols separated by whitespace.
    pub fn parse(text: &str, b: usize) -> Result<Self> {
        let mut words = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let w = line
                .split_whitespace()
                .map(|s| {
                    s.parse::<usize>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: format!("{s}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            words.push(w);
        }
        let n = words.first().map_or(1, |w| w.len());
        Self::new(b, n, words)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for w in &self.words {
            let line: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// The code restricted to the given word indices.
    pub fn subcode(&self, indices: &[usize]) -> Self {
        Self {
            b: self.b,
            n: self.n,
            words: indices.iter().map(|&i| self.words[i].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashCheck {
    pub holds: bool,
    /// Indices of `k` words with no separating coordinate.
    pub witness: Option<Vec<usize>>,
}

/// Depth-first search over subsets that keeps, per coordinate, the symbols
/// used so far. A coordinate stays alive while the chosen words are
/// pairwise distinct on it; once none is alive every extension fails.
struct Separation<'a> {
    words: &'a [Vec<usize>],
    k: usize,
    chosen: Vec<usize>,
}

impl Separation<'_> {
    /// Finds `k` words (all from `pool`, plus those already chosen) with no
    /// separating coordinate.
    fn find(&mut self, pool: &[usize], start: usize, used: &mut [u64], alive: u64) -> bool {
        if alive == 0 {
            // Pad with any other words from the pool.
            let missing = self.k - self.chosen.len();
            let extra: Vec<usize> = pool
                .iter()
                .copied()
                .filter(|i| !self.chosen.contains(i))
                .take(missing)
                .collect();
            if extra.len() == missing {
                self.chosen.extend(extra);
                return true;
            }
            return false;
        }
        if self.chosen.len() == self.k {
            return false;
        }
        let need = self.k - self.chosen.len();
        for pos in start..pool.len() {
            if pool.len() - pos < need {
                break;
            }
            let w = pool[pos];
            let word = &self.words[w];
            let mut next_alive = 0u64;
            let mut saved = [0u64; 64];
            let n = word.len();
            saved[..n].copy_from_slice(&used[..n]);
            for c in 0..n {
                let bit = 1u64 << (word[c] - 1);
                if alive >> c & 1 == 1 && used[c] & bit == 0 {
                    next_alive |= 1 << c;
                }
                used[c] |= bit;
            }
            self.chosen.push(w);
            if self.find(pool, pos + 1, used, next_alive) {
                return true;
            }
            self.chosen.pop();
            used[..n].copy_from_slice(&saved[..n]);
        }
        false
    }
}

fn all_alive(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Whether every `k` distinct codewords are separated by some coordinate on
/// which their symbols are pairwise distinct. Vacuously true when the code
/// has fewer than `k` words.
pub fn is_bk_hash(code: &Code, k: usize) -> HashCheck {
    if k < 2 || code.len() < k {
        return HashCheck {
            holds: true,
            witness: None,
        };
    }
    let pool: Vec<usize> = (0..code.len()).collect();
    let mut s = Separation {
        words: &code.words,
        k,
        chosen: Vec::new(),
    };
    let mut used = vec![0u64; code.n];
    if s.find(&pool, 0, &mut used, all_alive(code.n)) {
        let mut w = s.chosen;
        w.sort_unstable();
        HashCheck {
            holds: false,
            witness: Some(w),
        }
    } else {
        HashCheck {
            holds: true,
            witness: None,
        }
    }
}

/// Whether `word` can join `current` (already a hash code) without breaking
/// the property.
fn extends(words: &[Vec<usize>], current: &[usize], word: usize, k: usize) -> bool {
    if current.len() + 1 < k {
        return true;
    }
    let n = words[word].len();
    let mut used = vec![0u64; n];
    for c in 0..n {
        used[c] = 1u64 << (words[word][c] - 1);
    }
    let mut s = Separation {
        words,
        k: k - 1,
        chosen: Vec::new(),
    };
    !s.find(current, 0, &mut used, all_alive(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchOrder {
    /// Candidates by increasing word index.
    Ascending,
    /// Candidates by decreasing word index.
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSearch {
    pub size: usize,
    pub witness: Code,
    /// The search space was exhausted, so `size` is exact (or equals the
    /// cap).
    pub complete: bool,
    pub reached_cap: bool,
    pub nodes: u64,
}

struct Search<'a> {
    words: &'a [Vec<usize>],
    k: usize,
    cap: usize,
    best: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    fn run(&mut self, current: &mut Vec<usize>, candidates: &[usize]) {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return;
        }
        if current.len() > self.best.len() {
            self.best = current.clone();
        }
        if self.best.len() >= self.cap {
            return;
        }
        for (i, &w) in candidates.iter().enumerate() {
            if current.len() + (candidates.len() - i) <= self.best.len() {
                return;
            }
            if !extends(self.words, current, w, self.k) {
                continue;
            }
            current.push(w);
            self.run(current, &candidates[i + 1..]);
            current.pop();
            if self.aborted || self.best.len() >= self.cap {
                return;
            }
        }
    }
}

/// Largest `(b, k)`-hash code of length `n`, by backtracking. The all-ones
/// word is always included: permuting symbols per coordinate maps any code
/// to one containing it. Stops early at `size_cap` or after `max_nodes`
/// search nodes (then the result is only a lower bound).
pub fn max_code_exhaustive(
    b: usize,
    k: usize,
    n: usize,
    size_cap: usize,
    order: SearchOrder,
    max_nodes: u64,
) -> Result<CodeSearch> {
    if b < 2 || k < 2 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "need b >= 2, k >= 2, n >= 1, got b={b}, k={k}, n={n}"
        )));
    }
    let total = (b as u64).checked_pow(n as u32).filter(|&t| t <= 1 << 16).ok_or_else(|| {
        Error::TooLarge {
            b: b.pow(n.min(8) as u32),
            cap: 1 << 16,
        }
    })? as usize;
    let words: Vec<Vec<usize>> = (0..total)
        .map(|mut x| {
            let mut w = vec![1; n];
            for c in (0..n).rev() {
                w[c] = x % b + 1;
                x /= b;
            }
            w
        })
        .collect();
    let mut rest: Vec<usize> = (1..total).collect();
    if order == SearchOrder::Descending {
        rest.reverse();
    }
    let mut s = Search {
        words: &words,
        k,
        cap: size_cap.max(1),
        best: vec![0],
        nodes: 0,
        max_nodes,
        aborted: false,
    };
    let mut current = vec![0];
    s.run(&mut current, &rest);
    let mut best = s.best.clone();
    best.sort_unstable();
    let witness = Code::new(b, n, best.iter().map(|&i| words[i].clone()).collect())?;
    Ok(CodeSearch {
        size: best.len(),
        witness,
        complete: !s.aborted,
        reached_cap: best.len() >= size_cap,
        nodes: s.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coordinate_codes() {
        let c = Code::new(4, 1, (1..=4).map(|s| vec![s]).collect()).unwrap();
        assert!(is_bk_hash(&c, 4).holds);
        let c = Code::new(4, 1, vec![vec![1], vec![2], vec![2 + 1]]).unwrap();
        assert!(is_bk_hash(&c, 4).holds, "fewer words than k");
    }

    #[test]
    fn collision_has_witness() {
        // Words 0 and 1 agree on coordinate 0, words 1 and 2 on coordinate 1.
        let c = Code::new(3, 2, vec![vec![1, 1], vec![1, 2], vec![3, 2], vec![2, 3]]).unwrap();
        let r = is_bk_hash(&c, 3);
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 3);
        assert!(!is_bk_hash(&c.subcode(&w), 3).holds);
    }

    #[test]
    fn text_round_trip() {
        let c = Code::new(3, 2, vec![vec![1, 1], vec![2, 3]]).unwrap();
        let t = c.to_text();
        assert_eq!(t, "1 1\n2 3\n");
        assert_eq!(Code::parse(&t, 3).unwrap(), c);
        assert!(matches!(
            Code::parse("1 4\n", 3),
            Err(Error::SymbolOutOfRange { symbol: 4, b: 3 })
        ));
        assert!(matches!(Code::parse("1 2\n1 2\n", 3), Err(Error::DuplicateWord(1))));
        assert!(matches!(Code::parse("1 x\n", 3), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn tiny_searches() {
        let r = max_code_exhaustive(3, 3, 1, usize::MAX, SearchOrder::Ascending, 1 << 20).unwrap();
        assert_eq!(r.size, 3);
        assert!(r.complete);
        let r = max_code_exhaustive(3, 2, 2, usize::MAX, SearchOrder::Ascending, 1 << 20).unwrap();
        // k = 2 only asks for distinct words.
        assert_eq!(r.size, 9);
        assert!(is_bk_hash(&r.witness, 2).holds);
    }

    #[test]
    fn node_budget_flags_partial() {
        let r = max_code_exhaustive(3, 3, 3, usize::MAX, SearchOrder::Ascending, 5).unwrap();
        assert!(!r.complete);
        assert!(is_bk_hash(&r.witness, 3).holds);
    }
}
