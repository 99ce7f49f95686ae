//! Asymptotic rate bounds: the GV baseline, the enumerator bound and its
//! Caro-Wei refinement, with one-dimensional optimizers over `x`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::code::{distance_enumerator, local_profile, Code};
use crate::error::{Error, Result};
use crate::poly::{f64_to_rational, rational_to_f64, RationalPolynomial};

pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;
pub const GOLDEN_TOL: f64 = 1e-10;
/// Points in the log-spaced seed grid of the Caro-Wei optimizer.
pub const CAROWEI_GRID: usize = 64;
/// Smallest `x` on the seed grid.
pub const CAROWEI_GRID_MIN: f64 = 1e-12;

/// `q`-ary entropy `h_q(x)` with `h_q(0) = 0` and `h_q(1) = log_q(q-1)`.
pub fn entropy(q: u32, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::input("alphabet size must be at least 2"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::input(format!("entropy argument {x} outside [0, 1]")));
    }
    let lq = (q as f64).ln();
    let xlogx = |t: f64| if t == 0.0 { 0.0 } else { t * t.ln() };
    Ok((-xlogx(x) - xlogx(1.0 - x) + x * ((q - 1) as f64).ln()) / lq)
}

/// `1 - 1/q`; beyond it the asymptotic rate is zero.
pub fn plotkin_point(q: u32) -> f64 {
    1.0 - 1.0 / q as f64
}

/// Asymptotic GV rate `1 - h_q(delta)`, clamped to 0 from `1 - 1/q` on.
pub fn gv_asymptotic(q: u32, delta: f64) -> f64 {
    if delta >= plotkin_point(q) {
        return 0.0;
    }
    1.0 - entropy(q, delta.max(0.0)).unwrap_or(0.0)
}

/// `delta / ((q-1)(1-delta))`, the optimizing `x` for the one-letter full code.
pub fn gv_optimal_x(q: u32, delta: f64) -> f64 {
    delta / ((q - 1) as f64 * (1.0 - delta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Gv,
    Main,
    CaroWei,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gv => "gv",
            Method::Main => "main",
            Method::CaroWei => "carowei",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub method: Method,
    pub delta: f64,
    pub x_star: f64,
    pub value: f64,
    pub gv_baseline: f64,
    /// `value - gv_baseline`
    pub excess: f64,
}

impl BoundReport {
    fn new(method: Method, q: u32, delta: f64, x_star: f64, value: f64) -> Self {
        let gv_baseline = gv_asymptotic(q, delta);
        BoundReport {
            method,
            delta,
            x_star,
            value,
            gv_baseline,
            excess: value - gv_baseline,
        }
    }
}

fn check_x(x: f64) -> Result<BigRational> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::input(format!("x = {x} outside (0, 1]")));
    }
    f64_to_rational(x)
}

fn check_delta_open(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(())
}

fn check_delta_optimizer(q: u32, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < plotkin_point(q)) {
        return Err(Error::input(format!(
            "delta = {delta} outside (0, {})",
            plotkin_point(q)
        )));
    }
    Ok(())
}

/// Evaluator for `(1/m) log_q(|C| / B(x)) + delta log_q x`.
#[derive(Clone, Debug)]
pub struct MainBound {
    q: u32,
    m: usize,
    size: BigRational,
    b: RationalPolynomial,
    db: RationalPolynomial,
}

impl MainBound {
    pub fn new(code: &Code) -> Self {
        let b = distance_enumerator(code).polynomial().clone();
        MainBound {
            q: code.q() as u32,
            m: code.m(),
            size: BigRational::from_integer(BigInt::from(code.len())),
            db: b.derivative(),
            b,
        }
    }

    pub fn value(&self, delta: f64, x: f64) -> Result<f64> {
        check_delta_open(delta)?;
        let xr = check_x(x)?;
        let ratio = &self.size / self.b.eval(&xr);
        let lq = (self.q as f64).ln();
        Ok(rational_to_f64(&ratio).ln() / (self.m as f64 * lq) + delta * x.ln() / lq)
    }

    /// `x B'(x) / B(x)`: the mean distance under weights `B_j x^j`, hence
    /// nondecreasing in `x`.
    pub fn phi(&self, x: f64) -> f64 {
        x * self.db.eval_f64(x) / self.b.eval_f64(x)
    }

    /// Maximize over `x` by bisection on `phi(x) = delta m`; `x = 1` when
    /// `phi` stays below the target on the whole interval.
    pub fn optimize(&self, delta: f64) -> Result<(f64, f64)> {
        check_delta_optimizer(self.q, delta)?;
        let target = delta * self.m as f64;
        let x_star = if self.phi(1.0) <= target {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..BISECTION_MAX_ITER {
                if hi - lo <= BISECTION_TOL {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if self.phi(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        Ok((x_star, self.value(delta, x_star)?))
    }
}

/// Evaluator for `(1/m) log_q(sum_c 1/B_c(x)) + delta log_q x`.
///
/// Centers sharing a local distance distribution are grouped, so the exact
/// sum has one term per distinct distribution.
#[derive(Clone, Debug)]
pub struct CaroWeiBound {
    q: u32,
    m: usize,
    groups: Vec<(RationalPolynomial, BigRational)>,
    main: MainBound,
}

impl CaroWeiBound {
    pub fn new(code: &Code) -> Self {
        let groups = local_profile(code)
            .into_iter()
            .map(|(counts, mult)| {
                (
                    RationalPolynomial::from_integers(counts),
                    BigRational::from_integer(BigInt::from(mult)),
                )
            })
            .collect();
        CaroWeiBound {
            q: code.q() as u32,
            m: code.m(),
            groups,
            main: MainBound::new(code),
        }
    }

    /// Exact `sum_c 1 / B_c(x)`.
    pub fn reciprocal_sum(&self, x: &BigRational) -> BigRational {
        self.groups
            .iter()
            .fold(BigRational::zero(), |acc, (p, k)| acc + k / p.eval(x))
    }

    fn reciprocal_sum_f64(&self, x: f64) -> f64 {
        self.groups
            .iter()
            .map(|(p, k)| rational_to_f64(k) / p.eval_f64(x))
            .sum()
    }

    pub fn value(&self, delta: f64, x: f64) -> Result<f64> {
        check_delta_open(delta)?;
        let xr = check_x(x)?;
        let s = self.reciprocal_sum(&xr);
        let lq = (self.q as f64).ln();
        Ok(rational_to_f64(&s).ln() / (self.m as f64 * lq) + delta * x.ln() / lq)
    }

    // natural-log objective in t = ln x; same argmax as `value`
    fn objective(&self, delta: f64, t: f64) -> f64 {
        self.reciprocal_sum_f64(t.exp()).ln() / self.m as f64 + delta * t
    }

    /// Golden-section search in `ln x` around the best point of a log grid.
    ///
    /// The main-bound optimizer and `x = 1` are scored as well, and the final
    /// candidates are compared by their exact-sum values.
    pub fn optimize(&self, delta: f64) -> Result<(f64, f64)> {
        check_delta_optimizer(self.q, delta)?;
        let grid = log_grid();
        let (best_i, _) = grid
            .iter()
            .map(|&t| self.objective(delta, t))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
                if v > acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
        let mut a = grid[best_i.saturating_sub(1)];
        let mut b = grid[(best_i + 1).min(CAROWEI_GRID - 1)];
        let invphi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - invphi * (b - a);
        let mut d = a + invphi * (b - a);
        let mut fc = self.objective(delta, c);
        let mut fd = self.objective(delta, d);
        while b - a > GOLDEN_TOL {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = self.objective(delta, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = self.objective(delta, d);
            }
        }
        let golden_x = (0.5 * (a + b)).exp().min(1.0);
        let (main_x, _) = self.main.optimize(delta)?;
        let mut best = (1.0, self.value(delta, 1.0)?);
        for x in [grid[best_i].exp().min(1.0), main_x, golden_x] {
            let v = self.value(delta, x)?;
            if v > best.1 {
                best = (x, v);
            }
        }
        Ok(best)
    }
}

/// Seed grid in `t = ln x`, from `ln CAROWEI_GRID_MIN` up to 0.
pub fn log_grid() -> Vec<f64> {
    let t_min = CAROWEI_GRID_MIN.ln();
    (0..CAROWEI_GRID)
        .map(|i| t_min * (1.0 - i as f64 / (CAROWEI_GRID - 1) as f64))
        .collect()
}

pub fn main_bound(code: &Code, delta: f64, x: f64) -> Result<f64> {
    MainBound::new(code).value(delta, x)
}

pub fn optimize_x_main(code: &Code, delta: f64) -> Result<(f64, f64)> {
    MainBound::new(code).optimize(delta)
}

pub fn carowei_bound(code: &Code, delta: f64, x: f64) -> Result<f64> {
    CaroWeiBound::new(code).value(delta, x)
}

pub fn optimize_x_carowei(code: &Code, delta: f64) -> Result<(f64, f64)> {
    CaroWeiBound::new(code).optimize(delta)
}

/// Optimized bound for one method at one `delta`.
pub fn bound_report(code: &Code, method: Method, delta: f64) -> Result<BoundReport> {
    let q = code.q() as u32;
    let (x_star, value) = match method {
        Method::Gv => {
            check_delta_optimizer(q, delta)?;
            (gv_optimal_x(q, delta), gv_asymptotic(q, delta))
        }
        Method::Main => optimize_x_main(code, delta)?,
        Method::CaroWei => optimize_x_carowei(code, delta)?,
    };
    Ok(BoundReport::new(method, q, delta, x_star, value))
}
