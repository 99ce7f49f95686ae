//! Search over small code spaces for a code whose Caro-Wei condition
//! exceeds 1 somewhere in `(0, 1)`.
//!
//! Candidates are compared by the refined sweep supremum, then by smaller
//! size, then by the order of their canonical forms. Evaluation fans out
//! over the rayon pool; every reduction runs over index-ordered results so
//! the outcome is independent of the worker count.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::code::{checked_space_size, Code, Word};
use crate::conditions::{sweep_with, ConditionKind, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};

/// Largest `q^m` for which exhaustive enumeration is attempted.
pub const EXHAUSTIVE_MAX_POINTS: usize = 20;
/// Largest symmetry group `m! (q!)^m` that is materialized.
pub const GROUP_ORDER_LIMIT: u64 = 100_000;
/// Cap on `|group| * q^m` entries of the permutation tables.
pub const GROUP_TABLE_LIMIT: u64 = 4_000_000;
/// Largest `q^m` for random and local search.
pub const SAMPLED_MAX_POINTS: usize = 1 << 16;
/// Evaluations per hill-climbing restart.
pub const LOCAL_RESTART_LEN: usize = 64;

/// `m! (q!)^m`, or `None` on overflow.
pub fn group_order(q: u8, m: usize) -> Option<u64> {
    let fact = |n: u64| (1..=n).try_fold(1u64, |acc, k| acc.checked_mul(k));
    let qf = fact(q as u64)?;
    let mf = fact(m as u64)?;
    (0..m).try_fold(mf, |acc, _| acc.checked_mul(qf))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut next = p.clone();
            next.insert(pos, n - 1);
            out.push(next);
        }
    }
    out.sort();
    out
}

/// The distance-preserving group of `Q^m` (coordinate permutations and
/// independent symbol permutations per coordinate), as point permutations.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    q: u8,
    m: usize,
    perms: Vec<Vec<u32>>,
}

impl SymmetryGroup {
    pub fn new(q: u8, m: usize) -> Result<Self> {
        let points = checked_space_size(q, m)?;
        let order = group_order(q, m)
            .filter(|&o| o <= GROUP_ORDER_LIMIT && o.saturating_mul(points as u64) <= GROUP_TABLE_LIMIT)
            .ok_or_else(|| {
                Error::guard(format!(
                    "symmetry group of Q^m for q={q}, m={m} is too large to enumerate \
                     (limits: order <= {GROUP_ORDER_LIMIT}, order * q^m <= {GROUP_TABLE_LIMIT})"
                ))
            })?;
        let coord_perms = permutations(m);
        let symbol_perms = permutations(q as usize);
        let words: Vec<Word> = (0..points).map(|i| Word::from_index(i, q, m)).collect();
        let mut perms = Vec::with_capacity(order as usize);
        let mut choice = vec![0usize; m];
        for pi in &coord_perms {
            choice.iter_mut().for_each(|c| *c = 0);
            loop {
                let table = words
                    .iter()
                    .map(|w| {
                        let s = w.symbols();
                        let img: Vec<u8> = (0..m)
                            .map(|i| symbol_perms[choice[i]][s[pi[i]] as usize] as u8)
                            .collect();
                        Word::new(img).index(q) as u32
                    })
                    .collect();
                perms.push(table);
                // odometer over per-coordinate symbol permutations
                let mut i = 0;
                while i < m {
                    choice[i] += 1;
                    if choice[i] < symbol_perms.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
            }
        }
        debug_assert_eq!(perms.len() as u64, order);
        Ok(SymmetryGroup { q, m, perms })
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    fn check(&self, code: &Code) -> Result<()> {
        if code.q() != self.q || code.m() != self.m {
            return Err(Error::input("code parameters do not match the group"));
        }
        Ok(())
    }

    /// Lexicographically least sorted word list in the orbit of `code`.
    pub fn canonical(&self, code: &Code) -> Result<Code> {
        self.check(code)?;
        if let Some(mask) = code.to_mask() {
            return Code::from_mask(self.q, self.m, self.canonical_mask(mask));
        }
        let idx: Vec<usize> = code.words().iter().map(|w| w.index(self.q)).collect();
        let mut best: Option<Vec<u32>> = None;
        for p in &self.perms {
            let mut img: Vec<u32> = idx.iter().map(|&i| p[i]).collect();
            img.sort_unstable();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
        let words = best
            .unwrap_or_default()
            .into_iter()
            .map(|i| Word::from_index(i as usize, self.q, self.m))
            .collect();
        Code::new(self.q, self.m, words)
    }

    fn image_mask(perm: &[u32], mut mask: u64) -> u64 {
        let mut out = 0u64;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            out |= 1u64 << perm[i];
            mask &= mask - 1;
        }
        out
    }

    /// Canonical form on point masks (`q^m <= 64`).
    pub fn canonical_mask(&self, mask: u64) -> u64 {
        self.perms
            .iter()
            .map(|p| Self::image_mask(p, mask))
            .fold(mask, |best, img| if mask_less(img, best) { img } else { best })
    }

    /// True when `mask` is the canonical member of its orbit.
    pub fn is_canonical_mask(&self, mask: u64) -> bool {
        self.perms
            .iter()
            .all(|p| !mask_less(Self::image_mask(p, mask), mask))
    }
}

/// Order of equal-size point sets matching the order of their sorted word
/// lists: the smaller set owns the least point of the symmetric difference.
fn mask_less(a: u64, b: u64) -> bool {
    let x = a ^ b;
    x != 0 && a & (x & x.wrapping_neg()) != 0
}

/// Canonical representative under coordinate and per-coordinate symbol
/// permutations. Refused when the group is too large to enumerate.
pub fn canonical_form(code: &Code) -> Result<Code> {
    SymmetryGroup::new(code.q(), code.m())?.canonical(code)
}

/// Short hex digest of the canonical text form.
pub fn code_hash(code: &Code) -> String {
    let digest = Sha256::digest(code.serialize().as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Exhaustive,
    Random,
    Local,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Random => "random",
            Strategy::Local => "local",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "random" => Ok(Strategy::Random),
            "local" => Ok(Strategy::Local),
            other => Err(Error::input(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub q: u8,
    pub m: usize,
    pub strategy: Strategy,
    /// Inclusive bounds on `|C|`, clamped to `1..=q^m`.
    pub size_range: (usize, usize),
    pub z_grid_size: usize,
    /// Candidate count for random and local search.
    pub budget: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(q: u8, m: usize, strategy: Strategy) -> Self {
        SearchConfig {
            q,
            m,
            strategy,
            size_range: (1, usize::MAX),
            z_grid_size: DEFAULT_GRID,
            budget: 1000,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(usize, usize, usize)> {
        if !(2..=10).contains(&self.q) {
            return Err(Error::input("search needs 2 <= q <= 10"));
        }
        if self.m < 1 {
            return Err(Error::input("search needs m >= 1"));
        }
        let points = checked_space_size(self.q, self.m)?;
        let lo = self.size_range.0.max(1);
        let hi = self.size_range.1.min(points);
        if lo > hi {
            return Err(Error::input(format!(
                "empty size range {}..={} for q^m = {points}",
                self.size_range.0, self.size_range.1
            )));
        }
        match self.strategy {
            Strategy::Exhaustive => {
                if points > EXHAUSTIVE_MAX_POINTS {
                    return Err(Error::guard(format!(
                        "exhaustive search needs q^m <= {EXHAUSTIVE_MAX_POINTS}, got {points}"
                    )));
                }
            }
            Strategy::Random | Strategy::Local => {
                if points > SAMPLED_MAX_POINTS {
                    return Err(Error::guard(format!(
                        "sampled search needs q^m <= {SAMPLED_MAX_POINTS}, got {points}"
                    )));
                }
                if self.budget == 0 {
                    return Err(Error::input("budget must be positive"));
                }
            }
        }
        Ok((points, lo, hi))
    }
}

/// One evaluated candidate, as written to the journal.
#[derive(Clone, Debug, PartialEq)]
pub struct JournalRecord {
    pub hash: String,
    pub sup: f64,
    pub z: f64,
}

impl fmt::Display for JournalRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.hash, self.sup, self.z)
    }
}

/// Previously evaluated candidates, keyed by canonical hash.
#[derive(Clone, Debug, Default)]
pub struct Journal {
    entries: HashMap<String, (f64, f64)>,
}

impl Journal {
    /// Parse `hash<TAB>sup<TAB>z` lines; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let perr = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut it = line.split('\t');
            let (Some(h), Some(s), Some(z), None) = (it.next(), it.next(), it.next(), it.next()) else {
                return Err(perr("expected hash<TAB>sup<TAB>z"));
            };
            let sup: f64 = s.parse().map_err(|_| perr("bad sup"))?;
            let z: f64 = z.parse().map_err(|_| perr("bad z"))?;
            entries.insert(h.to_string(), (sup, z));
        }
        Ok(Journal { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get(&self, hash: &str) -> Option<(f64, f64)> {
        self.entries.get(hash).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best_code: Code,
    pub best_sup: f64,
    pub best_z: f64,
    pub violation_found: bool,
    pub candidates_examined: usize,
    /// `(z, lhs)` with `lhs > 1` exactly, present iff a violation was found.
    pub exact_certificate: Option<(BigRational, BigRational)>,
    /// One record per evaluated candidate, in candidate order.
    pub journal: Vec<JournalRecord>,
}

#[derive(Clone, Debug)]
struct Candidate {
    key: Code,
    sup: f64,
    z: f64,
    improves: bool,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        match self.sup.total_cmp(&other.sup) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                (self.key.len(), &self.key) < (other.key.len(), &other.key)
            }
        }
    }

    fn record(&self) -> JournalRecord {
        JournalRecord {
            hash: code_hash(&self.key),
            sup: self.sup,
            z: self.z,
        }
    }
}

struct Evaluator<'a> {
    group: Option<SymmetryGroup>,
    grid: usize,
    resume: Option<&'a Journal>,
}

impl Evaluator<'_> {
    fn key(&self, code: Code) -> Code {
        match &self.group {
            Some(g) => g.canonical(&code).unwrap_or(code),
            None => code,
        }
    }

    fn evaluate(&self, code: Code) -> Result<Candidate> {
        let key = self.key(code);
        if let Some((sup, z)) = self.resume.and_then(|j| j.get(&code_hash(&key))) {
            // a cached value at or above 1 is re-derived exactly
            if sup < 1.0 {
                return Ok(Candidate {
                    key,
                    sup,
                    z,
                    improves: false,
                });
            }
        }
        let s = sweep_with(&key, ConditionKind::Lemma8, self.grid, true, Execution::Sequential)?;
        Ok(Candidate {
            key,
            sup: s.best_value,
            z: s.best_z,
            improves: s.improves,
        })
    }
}

pub fn run_search(cfg: &SearchConfig) -> Result<SearchResult> {
    run_search_with(cfg, Execution::default(), None)
}

/// Run a search, reusing journal values from an earlier run when given.
pub fn run_search_with(
    cfg: &SearchConfig,
    exec: Execution,
    resume: Option<&Journal>,
) -> Result<SearchResult> {
    let (points, lo, hi) = cfg.validate()?;
    let group = match cfg.strategy {
        Strategy::Exhaustive => Some(SymmetryGroup::new(cfg.q, cfg.m)?),
        _ => SymmetryGroup::new(cfg.q, cfg.m).ok(),
    };
    let eval = Evaluator {
        group,
        grid: cfg.z_grid_size,
        resume,
    };
    let candidates: Vec<Candidate> = match cfg.strategy {
        Strategy::Exhaustive => exhaustive(cfg, &eval, exec, points, lo, hi)?,
        Strategy::Random => random(cfg, &eval, exec, points, lo, hi)?,
        Strategy::Local => local(cfg, &eval, exec, points, lo, hi)?,
    };
    summarize(cfg, candidates)
}

fn summarize(cfg: &SearchConfig, candidates: Vec<Candidate>) -> Result<SearchResult> {
    let best = candidates
        .iter()
        .fold(None::<&Candidate>, |acc, c| match acc {
            Some(b) if !c.better_than(b) => Some(b),
            _ => Some(c),
        })
        .ok_or_else(|| Error::input("no candidate codes in the requested size range"))?;
    let violator = candidates
        .iter()
        .filter(|c| c.improves)
        .fold(None::<&Candidate>, |acc, c| match acc {
            Some(b) if !c.better_than(b) => Some(b),
            _ => Some(c),
        });
    let exact_certificate = match violator {
        Some(v) => {
            let s = sweep_with(&v.key, ConditionKind::Lemma8, cfg.z_grid_size, true, Execution::Sequential)?;
            s.certificate()
        }
        None => None,
    };
    let chosen = violator.unwrap_or(best);
    Ok(SearchResult {
        best_code: chosen.key.clone(),
        best_sup: chosen.sup,
        best_z: chosen.z,
        violation_found: exact_certificate.is_some(),
        candidates_examined: candidates.len(),
        exact_certificate,
        journal: candidates.iter().map(Candidate::record).collect(),
    })
}

fn exhaustive(
    cfg: &SearchConfig,
    eval: &Evaluator,
    exec: Execution,
    points: usize,
    lo: usize,
    hi: usize,
) -> Result<Vec<Candidate>> {
    let group = eval.group.as_ref().expect("exhaustive search materializes the group");
    let total = 1usize << points;
    // chunked so each task filters a contiguous block of masks
    const CHUNK: usize = 1 << 10;
    let reps: Vec<u64> = map_range(exec, total.div_ceil(CHUNK), |c| {
        (c * CHUNK..((c + 1) * CHUNK).min(total))
            .map(|m| m as u64)
            .filter(|&m| {
                let k = m.count_ones() as usize;
                m != 0 && (lo..=hi).contains(&k) && group.is_canonical_mask(m)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    map_range(exec, reps.len(), |i| {
        eval.evaluate(Code::from_mask(cfg.q, cfg.m, reps[i])?)
    })
    .into_iter()
    .collect()
}

fn candidate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_subset(rng: &mut ChaCha8Rng, points: usize, lo: usize, hi: usize) -> BTreeSet<usize> {
    let size = rng.random_range(lo..=hi);
    sample(rng, points, size).into_iter().collect()
}

fn code_of(cfg: &SearchConfig, set: &BTreeSet<usize>) -> Result<Code> {
    Code::new(
        cfg.q,
        cfg.m,
        set.iter().map(|&i| Word::from_index(i, cfg.q, cfg.m)).collect(),
    )
}

fn random(
    cfg: &SearchConfig,
    eval: &Evaluator,
    exec: Execution,
    points: usize,
    lo: usize,
    hi: usize,
) -> Result<Vec<Candidate>> {
    map_range(exec, cfg.budget, |i| {
        let mut rng = candidate_rng(cfg.seed, i as u64);
        eval.evaluate(code_of(cfg, &random_subset(&mut rng, points, lo, hi))?)
    })
    .into_iter()
    .collect()
}

// local restarts draw from streams disjoint from the random strategy's
const LOCAL_STREAM_BASE: u64 = 1 << 40;

fn local(
    cfg: &SearchConfig,
    eval: &Evaluator,
    exec: Execution,
    points: usize,
    lo: usize,
    hi: usize,
) -> Result<Vec<Candidate>> {
    let restarts = cfg.budget.div_ceil(LOCAL_RESTART_LEN);
    let runs = map_range(exec, restarts, |r| {
        let steps = LOCAL_RESTART_LEN.min(cfg.budget - r * LOCAL_RESTART_LEN);
        hill_climb(cfg, eval, points, lo, hi, r as u64, steps)
    });
    let mut out = Vec::with_capacity(cfg.budget);
    for run in runs {
        out.extend(run?);
    }
    Ok(out)
}

fn hill_climb(
    cfg: &SearchConfig,
    eval: &Evaluator,
    points: usize,
    lo: usize,
    hi: usize,
    restart: u64,
    steps: usize,
) -> Result<Vec<Candidate>> {
    let mut rng = candidate_rng(cfg.seed, LOCAL_STREAM_BASE + restart);
    let mut set = random_subset(&mut rng, points, lo, hi);
    let mut current = eval.evaluate(code_of(cfg, &set)?)?;
    let mut seen = vec![current.clone()];
    while seen.len() < steps {
        let mut next = set.clone();
        let can_add = set.len() < hi;
        let can_remove = set.len() > lo;
        let can_replace = set.len() < points;
        let moves: Vec<u8> = [(0u8, can_add), (1, can_remove), (2, can_replace)]
            .into_iter()
            .filter_map(|(mv, ok)| ok.then_some(mv))
            .collect();
        if moves.is_empty() {
            break;
        }
        let mv = moves[rng.random_range(0..moves.len())];
        let pick_out = |rng: &mut ChaCha8Rng, s: &BTreeSet<usize>| {
            *s.iter().nth(rng.random_range(0..s.len())).expect("nonempty")
        };
        let pick_in = |rng: &mut ChaCha8Rng, s: &BTreeSet<usize>| {
            let free: Vec<usize> = (0..points).filter(|i| !s.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        match mv {
            0 => {
                let i = pick_in(&mut rng, &set);
                next.insert(i);
            }
            1 => {
                let i = pick_out(&mut rng, &set);
                next.remove(&i);
            }
            _ => {
                let out = pick_out(&mut rng, &set);
                let inn = pick_in(&mut rng, &set);
                next.remove(&out);
                next.insert(inn);
            }
        }
        let cand = eval.evaluate(code_of(cfg, &next)?)?;
        if cand.better_than(&current) {
            current = cand.clone();
            set = next;
        }
        seen.push(cand);
    }
    Ok(seen)
}
