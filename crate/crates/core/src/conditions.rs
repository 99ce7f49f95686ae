//! Improvement conditions as functions of `z = 1 - q delta / (q - 1)`.
//!
//! The enumerator bound beats the GV rate at some `delta` iff
//! `(1/|C|) (1+(q-1)z)^m B((1-z)/(1+(q-1)z)) < 1` for some `z` in `(0, 1)`;
//! the Caro-Wei bound does iff
//! `sum_c 1 / ((1+(q-1)z)^m B_c((1-z)/(1+(q-1)z))) > 1` for some such `z`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::code::{distance_enumerator, local_enumerators, Code, Word};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::poly::{f64_to_rational, rational_to_f64, RationalPolynomial};

pub const DEFAULT_GRID: usize = 256;
pub const MIN_SWEEP_GRID: usize = 16;
pub const MIN_PROBE_GRID: usize = 64;
/// Refined `z` values are snapped to multiples of `2^-SNAP_BITS`.
pub const SNAP_BITS: u32 = 40;
const REFINE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    /// Enumerator bound; improvement iff the left-hand side drops below 1.
    Lemma4,
    /// Caro-Wei bound; improvement iff the left-hand side exceeds 1.
    Lemma8,
}

impl ConditionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::Lemma4 => "lemma4",
            ConditionKind::Lemma8 => "lemma8",
        }
    }

    /// Whether `a` is a stronger witness than `b`.
    fn better(self, a: &BigRational, b: &BigRational) -> bool {
        match self {
            ConditionKind::Lemma4 => a < b,
            ConditionKind::Lemma8 => a > b,
        }
    }

    fn improves(self, v: &BigRational) -> bool {
        self.better(v, &BigRational::one())
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct CenterGroup {
    b: RationalPolynomial,
    mult: BigRational,
    centers: Vec<Word>,
}

/// Precomputed enumerators for repeated evaluation of both conditions.
pub struct ConditionEvaluator {
    q: u32,
    m: usize,
    size: BigRational,
    b: RationalPolynomial,
    groups: Vec<CenterGroup>,
}

impl ConditionEvaluator {
    pub fn new(code: &Code) -> Self {
        let mut groups: Vec<(Vec<u64>, Vec<Word>)> = Vec::new();
        for l in local_enumerators(code) {
            match groups.iter_mut().find(|(c, _)| c.as_slice() == l.counts()) {
                Some((_, centers)) => centers.push(l.center().clone()),
                None => groups.push((l.counts().to_vec(), vec![l.center().clone()])),
            }
        }
        groups.sort();
        ConditionEvaluator {
            q: code.q() as u32,
            m: code.m(),
            size: BigRational::from_integer(BigInt::from(code.len())),
            b: distance_enumerator(code).polynomial().clone(),
            groups: groups
                .into_iter()
                .map(|(counts, centers)| CenterGroup {
                    b: RationalPolynomial::from_integers(counts),
                    mult: BigRational::from_integer(BigInt::from(centers.len())),
                    centers,
                })
                .collect(),
        }
    }

    // (1 + (q-1) z)^m and (1 - z) / (1 + (q-1) z)
    fn substitution(&self, z: &BigRational) -> (BigRational, BigRational) {
        let s = BigRational::one() + BigRational::from_integer(BigInt::from(self.q - 1)) * z;
        let w = (BigRational::one() - z) / &s;
        (num_traits::pow(s, self.m), w)
    }

    pub fn lemma4(&self, z: &BigRational) -> BigRational {
        let (sm, w) = self.substitution(z);
        sm * self.b.eval(&w) / &self.size
    }

    pub fn lemma8(&self, z: &BigRational) -> BigRational {
        self.lemma8_terms(z)
            .iter()
            .zip(&self.groups)
            .fold(BigRational::zero(), |acc, (t, g)| acc + t * &g.mult)
    }

    /// One term per distinct local distribution (each center's contribution).
    pub fn lemma8_terms(&self, z: &BigRational) -> Vec<BigRational> {
        let (sm, w) = self.substitution(z);
        self.groups
            .iter()
            .map(|g| BigRational::one() / (&sm * g.b.eval(&w)))
            .collect()
    }

    pub fn exact(&self, kind: ConditionKind, z: &BigRational) -> BigRational {
        match kind {
            ConditionKind::Lemma4 => self.lemma4(z),
            ConditionKind::Lemma8 => self.lemma8(z),
        }
    }

    /// Floating-point evaluation, used only while refining.
    pub fn approx(&self, kind: ConditionKind, z: f64) -> f64 {
        let s = 1.0 + (self.q - 1) as f64 * z;
        let w = (1.0 - z) / s;
        let sm = s.powi(self.m as i32);
        match kind {
            ConditionKind::Lemma4 => sm * self.b.eval_f64(w) / rational_to_f64(&self.size),
            ConditionKind::Lemma8 => self
                .groups
                .iter()
                .map(|g| rational_to_f64(&g.mult) / (sm * g.b.eval_f64(w)))
                .sum(),
        }
    }

    /// Centers grouped as in [`ConditionEvaluator::lemma8_terms`].
    pub fn center_groups(&self) -> Vec<&[Word]> {
        self.groups.iter().map(|g| g.centers.as_slice()).collect()
    }
}

fn check_z(z: &BigRational) -> Result<()> {
    if z < &BigRational::zero() || z >= &BigRational::one() {
        return Err(Error::input(format!("z = {z} outside [0, 1)")));
    }
    Ok(())
}

/// Exact left-hand side of the enumerator-bound condition at `z`.
pub fn lemma4_lhs(code: &Code, z: &BigRational) -> Result<BigRational> {
    check_z(z)?;
    Ok(ConditionEvaluator::new(code).lemma4(z))
}

/// Exact left-hand side of the Caro-Wei condition at `z`.
pub fn lemma8_lhs(code: &Code, z: &BigRational) -> Result<BigRational> {
    check_z(z)?;
    Ok(ConditionEvaluator::new(code).lemma8(z))
}

/// The `delta` form `(q^m/|C|) (1-delta)^m B(delta / ((q-1)(1-delta)))`.
pub fn lemma4_delta_form(code: &Code, delta: &BigRational) -> Result<BigRational> {
    if delta < &BigRational::zero() || delta >= &BigRational::one() {
        return Err(Error::input(format!("delta = {delta} outside [0, 1)")));
    }
    let q = BigRational::from_integer(BigInt::from(code.q()));
    let one = BigRational::one();
    let x = delta / ((&q - &one) * (&one - delta));
    let b = distance_enumerator(code).polynomial().eval(&x);
    let m = code.m();
    let size = BigRational::from_integer(BigInt::from(code.len()));
    Ok(num_traits::pow(q, m) / size * num_traits::pow(&one - delta, m) * b)
}

/// `z = 1 - q delta / (q - 1)`.
pub fn delta_to_z(q: u32, delta: &BigRational) -> BigRational {
    let q = BigRational::from_integer(BigInt::from(q));
    BigRational::one() - &q * delta / (&q - BigRational::one())
}

/// `delta = (1 - z)(q - 1) / q`.
pub fn z_to_delta(q: u32, z: &BigRational) -> BigRational {
    let q = BigRational::from_integer(BigInt::from(q));
    (BigRational::one() - z) * (&q - BigRational::one()) / q
}

/// Nearest multiple of `2^-SNAP_BITS`.
pub fn snap(z: f64) -> Result<BigRational> {
    let scale = (1u64 << SNAP_BITS) as f64;
    let k = f64_to_rational((z * scale).round())?;
    Ok(k / BigRational::from_integer(BigInt::from(1u64 << SNAP_BITS)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionSweep {
    pub kind: ConditionKind,
    /// `k / (n + 1)` for `k = 1..=n`.
    pub z_grid: Vec<BigRational>,
    pub lhs_exact: Vec<BigRational>,
    pub lhs_values: Vec<f64>,
    /// Supremum for `Lemma8`, infimum for `Lemma4`, over the grid and the
    /// refined point.
    pub best_value: f64,
    pub best_z: f64,
    pub best_value_exact: BigRational,
    pub best_z_exact: BigRational,
    pub improves: bool,
}

impl ConditionSweep {
    /// The best point as an exact `(z, lhs)` witness when it improves.
    pub fn certificate(&self) -> Option<(BigRational, BigRational)> {
        self.improves
            .then(|| (self.best_z_exact.clone(), self.best_value_exact.clone()))
    }
}

pub fn sweep(code: &Code, kind: ConditionKind, grid_size: usize, refine: bool) -> Result<ConditionSweep> {
    sweep_with(code, kind, grid_size, refine, Execution::default())
}

/// Uniform exact sweep over `(0, 1)`, optionally refined by golden-section
/// search around the best grid point.
pub fn sweep_with(
    code: &Code,
    kind: ConditionKind,
    grid_size: usize,
    refine: bool,
    exec: Execution,
) -> Result<ConditionSweep> {
    if grid_size < MIN_SWEEP_GRID {
        return Err(Error::input(format!(
            "grid size {grid_size} below minimum {MIN_SWEEP_GRID}"
        )));
    }
    let eval = ConditionEvaluator::new(code);
    let denom = BigInt::from(grid_size + 1);
    let z_grid: Vec<BigRational> = (1..=grid_size)
        .map(|k| BigRational::new(BigInt::from(k), denom.clone()))
        .collect();
    let lhs_exact = map_range(exec, grid_size, |k| eval.exact(kind, &z_grid[k]));
    let lhs_values: Vec<f64> = lhs_exact.iter().map(rational_to_f64).collect();

    let mut best_k = 0;
    for k in 1..grid_size {
        if kind.better(&lhs_exact[k], &lhs_exact[best_k]) {
            best_k = k;
        }
    }
    let mut best_z_exact = z_grid[best_k].clone();
    let mut best_value_exact = lhs_exact[best_k].clone();

    if refine {
        let lo = if best_k == 0 { 0.0 } else { rational_to_f64(&z_grid[best_k - 1]) };
        let hi = if best_k + 1 == grid_size { 1.0 } else { rational_to_f64(&z_grid[best_k + 1]) };
        let sign = match kind {
            ConditionKind::Lemma4 => -1.0,
            ConditionKind::Lemma8 => 1.0,
        };
        let z = golden_max(|z| sign * eval.approx(kind, z), lo, hi, REFINE_TOL);
        let zr = snap(z)?;
        if zr > BigRational::zero() && zr < BigRational::one() {
            let v = eval.exact(kind, &zr);
            if kind.better(&v, &best_value_exact) {
                best_z_exact = zr;
                best_value_exact = v;
            }
        }
    }

    Ok(ConditionSweep {
        kind,
        improves: kind.improves(&best_value_exact),
        best_value: rational_to_f64(&best_value_exact),
        best_z: rational_to_f64(&best_z_exact),
        best_value_exact,
        best_z_exact,
        z_grid,
        lhs_exact,
        lhs_values,
    })
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub kind: ConditionKind,
    pub monotone_decreasing: bool,
    pub first_violation: Option<BigRational>,
    /// Centers whose individual term is not nonincreasing (`Lemma8` only).
    pub nonmonotone_centers: Vec<Word>,
}

fn first_increase(values: &[BigRational], grid: &[BigRational]) -> Option<BigRational> {
    values
        .windows(2)
        .position(|w| w[1] > w[0])
        .map(|k| grid[k + 1].clone())
}

/// Exact check that the left-hand side is nonincreasing on `k / n`,
/// `k = 0..n`.
pub fn monotonicity_probe(code: &Code, kind: ConditionKind, grid_size: usize) -> Result<MonotonicityReport> {
    monotonicity_probe_with(code, kind, grid_size, Execution::default())
}

pub fn monotonicity_probe_with(
    code: &Code,
    kind: ConditionKind,
    grid_size: usize,
    exec: Execution,
) -> Result<MonotonicityReport> {
    if grid_size < MIN_PROBE_GRID {
        return Err(Error::input(format!(
            "grid size {grid_size} below minimum {MIN_PROBE_GRID}"
        )));
    }
    let eval = ConditionEvaluator::new(code);
    let denom = BigInt::from(grid_size);
    let grid: Vec<BigRational> = (0..grid_size)
        .map(|k| BigRational::new(BigInt::from(k), denom.clone()))
        .collect();
    let first_violation = match kind {
        ConditionKind::Lemma4 => {
            let values = map_range(exec, grid_size, |k| eval.lemma4(&grid[k]));
            first_increase(&values, &grid)
        }
        ConditionKind::Lemma8 => {
            let terms = map_range(exec, grid_size, |k| eval.lemma8_terms(&grid[k]));
            let totals: Vec<BigRational> = terms
                .iter()
                .map(|t| {
                    t.iter()
                        .zip(&eval.groups)
                        .fold(BigRational::zero(), |acc, (v, g)| acc + v * &g.mult)
                })
                .collect();
            let mut nonmonotone = Vec::new();
            for (gi, g) in eval.groups.iter().enumerate() {
                let series: Vec<BigRational> = terms.iter().map(|t| t[gi].clone()).collect();
                if first_increase(&series, &grid).is_some() {
                    nonmonotone.extend(g.centers.iter().cloned());
                }
            }
            nonmonotone.sort();
            return Ok(MonotonicityReport {
                kind,
                monotone_decreasing: first_increase(&totals, &grid).is_none(),
                first_violation: first_increase(&totals, &grid),
                nonmonotone_centers: nonmonotone,
            });
        }
    };
    Ok(MonotonicityReport {
        kind,
        monotone_decreasing: first_violation.is_none(),
        first_violation,
        nonmonotone_centers: Vec::new(),
    })
}
