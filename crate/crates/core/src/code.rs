//! Words, codes and their distance enumerators.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::RationalPolynomial;

/// A word over the alphabet `{0, .., q-1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parse a digit string such as `"0110"`. Symbols must be below `q <= 10`.
    pub fn parse(s: &str, q: u8) -> Result<Self> {
        if q > 10 {
            return Err(Error::input("digit notation needs q <= 10"));
        }
        s.chars()
            .map(|ch| match ch.to_digit(10) {
                Some(d) if (d as u8) < q => Ok(d as u8),
                _ => Err(Error::input(format!("symbol {ch:?} is not a digit below {q}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// The `index`-th word of `Q^m` in lexicographic order.
    pub fn from_index(mut index: usize, q: u8, m: usize) -> Self {
        let mut symbols = vec![0u8; m];
        for s in symbols.iter_mut().rev() {
            *s = (index % q as usize) as u8;
            index /= q as usize;
        }
        Word(symbols)
    }

    /// Position of this word in the lexicographic order of `Q^m`.
    pub fn index(&self, q: u8) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &s| acc * q as usize + s as usize)
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Word>) -> Word {
        Word(parts.into_iter().flat_map(|w| w.0.iter().copied()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            if *s < 10 {
                write!(f, "{s}")?;
            } else {
                write!(f, "[{s}]")?;
            }
        }
        Ok(())
    }
}

/// Number of coordinates in which `a` and `b` differ.
pub fn hamming_distance(a: &Word, b: &Word) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::input(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked(a: &Word, b: &Word) -> usize {
    a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count()
}

/// A nonempty set of distinct words of common length `m` over `q` symbols,
/// kept in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code {
    q: u8,
    m: usize,
    words: Vec<Word>,
}

impl Code {
    pub fn new(q: u8, m: usize, mut words: Vec<Word>) -> Result<Self> {
        if q < 2 {
            return Err(Error::input("alphabet size q must be at least 2"));
        }
        if m < 1 {
            return Err(Error::input("word length m must be at least 1"));
        }
        if words.is_empty() {
            return Err(Error::input("a code needs at least one word"));
        }
        for w in &words {
            if w.len() != m {
                return Err(Error::input(format!("word {w} does not have length {m}")));
            }
            if let Some(&s) = w.symbols().iter().find(|&&s| s >= q) {
                return Err(Error::input(format!("word {w} has symbol {s} >= q = {q}")));
            }
        }
        words.sort();
        if let Some(pair) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::input(format!("duplicate word {}", pair[0])));
        }
        Ok(Code { q, m, words })
    }

    /// Code from digit strings, e.g. `Code::from_strs(2, &["00", "11"])`.
    pub fn from_strs(q: u8, words: &[&str]) -> Result<Self> {
        let words = words
            .iter()
            .map(|s| Word::parse(s, q))
            .collect::<Result<Vec<_>>>()?;
        let m = words.first().map_or(0, Word::len);
        Code::new(q, m, words)
    }

    /// The whole space `Q^m`.
    pub fn full(q: u8, m: usize) -> Result<Self> {
        let total = checked_space_size(q, m)?;
        Code::new(q, m, (0..total).map(|i| Word::from_index(i, q, m)).collect())
    }

    /// Code whose words are the elements of `Q^m` selected by `mask`.
    pub fn from_mask(q: u8, m: usize, mask: u64) -> Result<Self> {
        let total = checked_space_size(q, m)?;
        let words = (0..total.min(64))
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| Word::from_index(i, q, m))
            .collect();
        Code::new(q, m, words)
    }

    /// Inverse of [`Code::from_mask`]; `None` when `q^m > 64`.
    pub fn to_mask(&self) -> Option<u64> {
        let total = checked_space_size(self.q, self.m).ok()?;
        if total > 64 {
            return None;
        }
        Some(self.words.iter().fold(0u64, |acc, w| acc | 1 << w.index(self.q)))
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Always false; codes are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// Parse the text format: a `q m` header, then one digit word per line.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `q m` header".into(),
        })?;
        let perr = |line, msg: String| Error::Parse { line, msg };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(perr(hline, format!("expected `q m`, found {header:?}")));
        }
        let q: u8 = fields[0]
            .parse()
            .map_err(|_| perr(hline, format!("bad alphabet size {:?}", fields[0])))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|_| perr(hline, format!("bad word length {:?}", fields[1])))?;
        if !(2..=10).contains(&q) {
            return Err(perr(hline, format!("alphabet size {q} outside 2..=10")));
        }
        if m == 0 {
            return Err(perr(hline, "word length must be at least 1".into()));
        }
        let mut words = Vec::new();
        let mut seen = BTreeMap::new();
        for (ln, l) in lines {
            let w = Word::parse(l, q).map_err(|e| match e {
                Error::Input(msg) => perr(ln, msg),
                other => other,
            })?;
            if w.len() != m {
                return Err(perr(ln, format!("word {l:?} does not have length {m}")));
            }
            if let Some(first) = seen.insert(w.clone(), ln) {
                return Err(perr(ln, format!("duplicate of the word on line {first}")));
            }
            words.push(w);
        }
        if words.is_empty() {
            return Err(perr(hline, "no words after the header".into()));
        }
        Code::new(q, m, words)
    }

    /// Canonical text form: header and sorted words, no comments.
    pub fn serialize(&self) -> String {
        let mut out = format!("{} {}\n", self.q, self.m);
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    /// `|C| x |C|` matrix of pairwise Hamming distances.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        self.words
            .iter()
            .map(|a| self.words.iter().map(|b| distance_unchecked(a, b)).collect())
            .collect()
    }

    /// Ordered pair counts by distance, including the diagonal.
    pub fn pair_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.m + 1];
        for a in &self.words {
            for b in &self.words {
                counts[distance_unchecked(a, b)] += 1;
            }
        }
        counts
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn checked_space_size(q: u8, m: usize) -> Result<usize> {
    u32::try_from(m)
        .ok()
        .and_then(|m| (q as usize).checked_pow(m))
        .ok_or_else(|| Error::input(format!("q^m overflows for q={q}, m={m}")))
}

/// Normalized distance distribution `B(x) = sum_j B_j x^j` of a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceEnumerator {
    size: usize,
    m: usize,
    poly: RationalPolynomial,
}

impl DistanceEnumerator {
    pub fn polynomial(&self) -> &RationalPolynomial {
        &self.poly
    }

    pub fn code_size(&self) -> usize {
        self.size
    }

    pub fn code_length(&self) -> usize {
        self.m
    }

    /// `B_j`, zero for `j` beyond the degree.
    pub fn coefficient(&self, j: usize) -> BigRational {
        self.poly.coeff(j)
    }

    /// `B_0 .. B_m`, padded with zeros to length `m + 1`.
    pub fn coefficients(&self) -> Vec<BigRational> {
        (0..=self.m).map(|j| self.poly.coeff(j)).collect()
    }
}

pub fn distance_enumerator(code: &Code) -> DistanceEnumerator {
    let size = BigInt::from(code.len());
    let poly = RationalPolynomial::new(
        code.pair_counts()
            .into_iter()
            .map(|c| BigRational::new(BigInt::from(c), size.clone()))
            .collect(),
    );
    DistanceEnumerator {
        size: code.len(),
        m: code.m(),
        poly,
    }
}

/// Distance census of a code seen from one of its words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDistanceEnumerator {
    center: Word,
    counts: Vec<u64>,
}

impl LocalDistanceEnumerator {
    pub fn center(&self) -> &Word {
        &self.center
    }

    /// Unnormalized counts indexed by distance `0..=m`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn polynomial(&self) -> RationalPolynomial {
        RationalPolynomial::from_integers(self.counts.iter().copied())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn local_distance_enumerator(code: &Code, center: &Word) -> Result<LocalDistanceEnumerator> {
    if !code.contains(center) {
        return Err(Error::input(format!("{center} is not a word of the code")));
    }
    Ok(local_unchecked(code, center))
}

fn local_unchecked(code: &Code, center: &Word) -> LocalDistanceEnumerator {
    let mut counts = vec![0u64; code.m() + 1];
    for y in code.words() {
        counts[distance_unchecked(center, y)] += 1;
    }
    LocalDistanceEnumerator {
        center: center.clone(),
        counts,
    }
}

/// Local enumerators of every word, in code order.
pub fn local_enumerators(code: &Code) -> Vec<LocalDistanceEnumerator> {
    code.words().iter().map(|c| local_unchecked(code, c)).collect()
}

/// Distinct local count vectors with their multiplicities, sorted by counts.
///
/// Quantities summed over centers only depend on the local distance
/// distribution, so this is the compressed form the bound and condition
/// evaluators work with.
pub fn local_profile(code: &Code) -> Vec<(Vec<u64>, u64)> {
    let mut groups: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for l in local_enumerators(code) {
        *groups.entry(l.counts).or_default() += 1;
    }
    groups.into_iter().collect()
}

/// True when every word sees the same distance distribution.
pub fn is_distance_invariant(code: &Code) -> bool {
    local_profile(code).len() == 1
}

/// Average of the local enumerators; must equal [`distance_enumerator`].
pub fn averaged_local_enumerator(code: &Code) -> RationalPolynomial {
    let size = BigRational::from_integer(BigInt::from(code.len()));
    let mut sum = RationalPolynomial::zero();
    for l in local_enumerators(code) {
        sum = &sum + &l.polynomial();
    }
    if sum.is_zero() {
        return sum;
    }
    sum.scale(&(BigRational::from_integer(1.into()) / size))
}
