//! Brute-force checks at finite length on the graph with vertex set `C^n`,
//! two vertices joined when their Hamming distance is at least `d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::code::{distance_enumerator, distance_unchecked, Code, Word};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::poly::{f64_to_rational, power_enumerator, rational_to_f64};

/// Largest `|C|^n` for which the graph is built.
pub const MAX_VERTICES: usize = 4096;
pub const DEFAULT_TRIALS: usize = 64;

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn vertex_count(code: &Code, n: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::input("n must be at least 1"));
    }
    u32::try_from(n)
        .ok()
        .and_then(|n| code.len().checked_pow(n))
        .filter(|&v| v <= MAX_VERTICES)
        .ok_or_else(|| {
            Error::guard(format!(
                "|C|^n = {}^{n} exceeds the vertex limit {MAX_VERTICES}",
                code.len()
            ))
        })
}

#[derive(Clone, Debug)]
pub struct DistanceGraph {
    n: usize,
    d: usize,
    vertices: Vec<Word>,
    adjacency: Vec<Vec<u64>>,
    degrees: Vec<usize>,
    edge_count: u64,
}

impl DistanceGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Vertices as words of length `mn`.
    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    pub fn adjacent(&self, u: usize, w: usize) -> bool {
        self.adjacency[u][w / 64] >> (w % 64) & 1 == 1
    }
}

/// Build the graph by comparing concatenated words directly, then check the
/// edge count against `(|C|^n / 2) sum_{j >= d} B_j^(n)` (less the diagonal
/// when `d = 0`).
pub fn build_graph(code: &Code, n: usize, d: usize) -> Result<DistanceGraph> {
    let v = vertex_count(code, n)?;
    let k = code.len();
    let vertices: Vec<Word> = (0..v)
        .map(|mut idx| {
            let mut parts = vec![0usize; n];
            for p in parts.iter_mut().rev() {
                *p = idx % k;
                idx /= k;
            }
            Word::concat(parts.iter().map(|&i| &code.words()[i]))
        })
        .collect();
    let blocks = v.div_ceil(64);
    let mut adjacency = vec![vec![0u64; blocks]; v];
    let mut degrees = vec![0usize; v];
    let mut edge_count = 0u64;
    for a in 0..v {
        for b in a + 1..v {
            if distance_unchecked(&vertices[a], &vertices[b]) >= d {
                adjacency[a][b / 64] |= 1 << (b % 64);
                adjacency[b][a / 64] |= 1 << (a % 64);
                degrees[a] += 1;
                degrees[b] += 1;
                edge_count += 1;
            }
        }
    }
    let g = DistanceGraph {
        n,
        d,
        vertices,
        adjacency,
        degrees,
        edge_count,
    };
    let predicted = enumerator_edge_count(code, n, d)?;
    if predicted != int(edge_count) {
        return Err(Error::Consistency(format!(
            "edge count {edge_count} differs from enumerator prediction {predicted}"
        )));
    }
    Ok(g)
}

/// Edge count predicted from the distance enumerator of `C^n`.
pub fn enumerator_edge_count(code: &Code, n: usize, d: usize) -> Result<BigRational> {
    let v = int(vertex_count(code, n)?);
    let bn = power_enumerator(distance_enumerator(code).polynomial(), n as u32)?;
    let total = bn.eval(&BigRational::one());
    let tail = if d == 0 { total } else { total - bn.prefix_sum(d - 1) };
    let half = &v / int(2);
    let mut e = &half * tail;
    if d == 0 {
        e -= half;
    }
    Ok(e)
}

/// Exact `v^2 / (v^2 - 2e)`.
pub fn turan_exact(g: &DistanceGraph) -> BigRational {
    let v2 = int(g.vertex_count() as u64).pow(2);
    &v2 / (&v2 - int(2 * g.edge_count))
}

pub fn turan_lower_bound(g: &DistanceGraph) -> f64 {
    rational_to_f64(&turan_exact(g))
}

/// Exact `sum_v 1 / (|V| - d_v)`.
pub fn carowei_exact(g: &DistanceGraph) -> BigRational {
    let v = g.vertex_count();
    g.degrees
        .iter()
        .fold(BigRational::zero(), |acc, &dv| {
            acc + BigRational::new(BigInt::one(), BigInt::from(v - dv))
        })
}

pub fn carowei_lower_bound(g: &DistanceGraph) -> f64 {
    rational_to_f64(&carowei_exact(g))
}

/// A set of length-`mn` words with pairwise distance at least `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCertificate {
    pub vertices: Vec<Word>,
    pub size: usize,
    pub d: usize,
}

impl CliqueCertificate {
    pub fn verify(&self) -> bool {
        self.size == self.vertices.len()
            && self.vertices.iter().enumerate().all(|(i, a)| {
                self.vertices[i + 1..]
                    .iter()
                    .all(|b| a.len() == b.len() && distance_unchecked(a, b) >= self.d)
            })
    }
}

pub fn greedy_clique(g: &DistanceGraph, trials: usize, seed: u64) -> Result<CliqueCertificate> {
    greedy_clique_with(g, trials, seed, Execution::default())
}

/// Best of `trials` greedy passes, each over a random vertex order: a vertex
/// joins when it is adjacent to every vertex chosen so far.
pub fn greedy_clique_with(
    g: &DistanceGraph,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<CliqueCertificate> {
    if trials < 1 {
        return Err(Error::input("need at least one trial"));
    }
    let v = g.vertex_count();
    let blocks = v.div_ceil(64);
    let runs = map_range(exec, trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let mut order: Vec<usize> = (0..v).collect();
        order.shuffle(&mut rng);
        let mut open = vec![u64::MAX; blocks];
        let mut clique = Vec::new();
        for u in order {
            if open[u / 64] >> (u % 64) & 1 == 1 {
                clique.push(u);
                for (o, a) in open.iter_mut().zip(&g.adjacency[u]) {
                    *o &= a;
                }
            }
        }
        clique.sort_unstable();
        clique
    });
    // first trial wins ties
    let best = runs
        .into_iter()
        .fold(Vec::new(), |best, c| if c.len() > best.len() { c } else { best });
    let cert = CliqueCertificate {
        size: best.len(),
        vertices: best.iter().map(|&u| g.vertices[u].clone()).collect(),
        d: g.d,
    };
    if !cert.verify() {
        return Err(Error::Consistency("greedy clique failed its pairwise check".into()));
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSizeBound {
    pub d: usize,
    /// `|C|^n / sum_{j<d} B_j^(n)`.
    pub turan_rhs: BigRational,
    /// `|C|^n x^(d-1) / B(x)^n`, exact.
    pub lemma1_exact: BigRational,
    pub lemma1_rhs: f64,
}

/// `ceil(delta m n)`, computed from the exact value of `delta`.
pub fn distance_threshold(code: &Code, n: usize, delta: f64) -> Result<usize> {
    let d = (f64_to_rational(delta)? * int(code.m() as u64 * n as u64)).ceil();
    usize::try_from(d.to_integer()).map_err(|_| Error::input("delta must be nonnegative"))
}

pub fn finite_size_bound(code: &Code, n: usize, delta: f64, x: f64) -> Result<FiniteSizeBound> {
    let d = distance_threshold(code, n, delta)?;
    finite_size_bound_at(code, n, d, x)
}

/// Finite-length bound at an explicit threshold `d >= 1`.
pub fn finite_size_bound_at(code: &Code, n: usize, d: usize, x: f64) -> Result<FiniteSizeBound> {
    let v = int(vertex_count(code, n)? as u64);
    if d < 1 {
        return Err(Error::input("distance threshold must be at least 1"));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::input(format!("x = {x} outside (0, 1]")));
    }
    let b = distance_enumerator(code).polynomial().clone();
    let bn = power_enumerator(&b, n as u32)?;
    let turan_rhs = &v / bn.prefix_sum(d - 1);
    let xr = f64_to_rational(x)?;
    let lemma1_exact = &v * num_traits::pow(xr.clone(), d - 1) / num_traits::pow(b.eval(&xr), n);
    Ok(FiniteSizeBound {
        d,
        lemma1_rhs: rational_to_f64(&lemma1_exact),
        turan_rhs,
        lemma1_exact,
    })
}

/// Exact check of `sum_{j<d} B_j^(n) <= B(x)^n / x^(d-1)`.
pub fn lemma1_dominates(code: &Code, n: usize, d: usize, x: &BigRational) -> Result<bool> {
    if d < 1 || x <= &BigRational::zero() || x > &BigRational::one() {
        return Err(Error::input("need d >= 1 and x in (0, 1]"));
    }
    let b = distance_enumerator(code).polynomial().clone();
    let bn = power_enumerator(&b, n as u32)?;
    Ok(bn.prefix_sum(d - 1) * num_traits::pow(x.clone(), d - 1) <= bn.eval(x))
}

/// Everything the verifier reports for one `(C, n, d)` instance.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub n: usize,
    pub d: usize,
    pub vertices: usize,
    pub edges: u64,
    pub edge_identity: bool,
    pub turan: BigRational,
    pub carowei: BigRational,
    pub clique: CliqueCertificate,
    pub finite: FiniteSizeBound,
    pub sandwich: bool,
}

fn ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Build the graph and check
/// `clique >= ceil(caro-wei) >= ceil(turan) >= ceil(turan_rhs)` together with
/// `turan_rhs >= lemma1_rhs`.
pub fn verify_instance(
    code: &Code,
    n: usize,
    d: usize,
    x: f64,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<VerifyReport> {
    let finite = finite_size_bound_at(code, n, d, x)?;
    let g = build_graph(code, n, d)?;
    let turan = turan_exact(&g);
    let carowei = carowei_exact(&g);
    let clique = greedy_clique_with(&g, trials, seed, exec)?;
    let edge_identity = enumerator_edge_count(code, n, d)? == int(g.edge_count());
    let size = BigInt::from(clique.size);
    let sandwich = size >= ceil(&carowei)
        && ceil(&carowei) >= ceil(&turan)
        && ceil(&turan) >= ceil(&finite.turan_rhs)
        && finite.turan_rhs >= finite.lemma1_exact
        && clique.verify();
    Ok(VerifyReport {
        n,
        d,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        edge_identity,
        turan,
        carowei,
        clique,
        finite,
        sandwich,
    })
}
