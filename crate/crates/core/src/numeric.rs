//! Closed-form quantities of the limiting DFS profile.
//!
//! Everything here is a pure function of its arguments. The survival
//! probability `rho(c)` of a Poisson(`c`) Galton–Watson tree is the positive
//! root of `1 - rho = exp(-c rho)`; the limit curve of the normalized contour
//! process is written in terms of `rho`, the dilogarithm, and `log(1 - rho)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default absolute tolerance for the survival fixed point.
pub const DEFAULT_TOL: f64 = 1e-12;

/// `Li2(1)`.
pub const PI2_OVER_6: f64 = PI * PI / 6.0;

/// Below this `rho` the removable singularity of `log(1 - rho) / rho` is
/// replaced by its limit `-1`.
const SMALL_RHO: f64 = 1e-12;

/// Absolute tolerance of the adaptive Simpson rule behind
/// [`integral_parametrization`].
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Default number of samples in a dumped `curve.csv`.
pub const DEFAULT_CURVE_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalSolution {
    pub c: f64,
    pub rho: f64,
    /// `|1 - rho - exp(-c rho)|` at the returned root.
    pub residual: f64,
}

/// `1 - rho - exp(-c rho)`, evaluated without cancellation near `rho = 0`.
fn survival_defect(c: f64, rho: f64) -> f64 {
    -rho - (-c * rho).exp_m1()
}

/// Survival probability of a Galton–Watson tree with Poisson(`c`) offspring.
///
/// Newton's method from `1 - exp(-c)`, which approaches the root from the
/// right because the defect is concave. Falls back to bisection on
/// `[0, 1]` if an iterate leaves `(0, 1]` or the residual does not
/// reach `tol`.
pub fn solve_survival(c: f64, tol: f64) -> Result<SurvivalSolution> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid(format!("mean offspring must be positive and finite, got {c}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if c <= 1.0 {
        return Ok(SurvivalSolution { c, rho: 0.0, residual: 0.0 });
    }

    let mut rho = -(-c).exp_m1();
    let mut escaped = false;
    for _ in 0..100 {
        let defect = survival_defect(c, rho);
        let slope = -1.0 + c * (-c * rho).exp();
        let next = rho - defect / slope;
        if !(next > 0.0 && next <= 1.0) {
            escaped = true;
            break;
        }
        let step = (next - rho).abs();
        rho = next;
        if step <= 4.0 * f64::EPSILON * rho {
            break;
        }
    }

    let residual = survival_defect(c, rho).abs();
    if escaped || residual > tol {
        rho = bisect_survival(c);
    }
    Ok(SurvivalSolution { c, rho, residual: survival_defect(c, rho).abs() })
}

fn bisect_survival(c: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if survival_defect(c, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn dilog_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = x;
    let mut k = 1.0_f64;
    loop {
        let term = power / (k * k);
        sum += term;
        if term <= 1e-18 * sum {
            return sum;
        }
        power *= x;
        k += 1.0;
    }
}

/// Dilogarithm `Li2(x) = sum_{k>=1} x^k / k^2` on `[0, 1]`.
///
/// Direct series for `x <= 1/2`, reflection
/// `Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x)` above.
pub fn dilog(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("dilog is implemented on [0, 1], got {x}")));
    }
    Ok(if x == 0.0 {
        0.0
    } else if x == 1.0 {
        PI2_OVER_6
    } else if x <= 0.5 {
        dilog_series(x)
    } else {
        let y = 1.0 - x;
        PI2_OVER_6 - x.ln() * y.ln() - dilog_series(y)
    })
}

/// `rho((1 - alpha) c)`: survival probability with the offspring mean reduced
/// to the unexplored fraction `1 - alpha` of the vertices.
pub fn survival_at_density(c: f64, alpha: f64) -> Result<f64> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid(format!("c must be positive and finite, got {c}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let effective = (1.0 - alpha) * c;
    if effective <= 1.0 {
        return Ok(0.0);
    }
    Ok(solve_survival(effective, DEFAULT_TOL)?.rho)
}

/// Expected total progeny `1 / (1 - (1 - rho) m)` of a Poisson(`m = (1 - alpha) c`)
/// tree conditioned on extinction.
pub fn subcritical_mean_size(c: f64, alpha: f64) -> Result<f64> {
    let rho = survival_at_density(c, alpha)?;
    let effective = (1.0 - alpha) * c;
    if effective == 1.0 {
        return Err(Error::Singularity(format!(
            "expected size diverges at effective mean 1 (c = {c}, alpha = {alpha})"
        )));
    }
    Ok(1.0 / (1.0 - (1.0 - rho) * effective))
}

/// Limiting mean gap `2 / rho((1 - alpha) c) - 1` between consecutive pseudo
/// renewal times at explored fraction `alpha`.
pub fn expected_renewal_increment(c: f64, alpha: f64) -> Result<f64> {
    let rho = survival_at_density(c, alpha)?;
    if rho == 0.0 {
        return Err(Error::domain(format!(
            "effective mean (1 - {alpha}) * {c} is not supercritical"
        )));
    }
    Ok(2.0 / rho - 1.0)
}

/// Asymptotic lower bound `rho_c - Li2(rho_c) / c` on the longest simple path,
/// as a fraction of the vertex count.
pub fn longest_path_bound(c: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("the bound needs c > 1, got {c}")));
    }
    let rho = solve_survival(c, DEFAULT_TOL)?.rho;
    Ok(rho - dilog(rho)? / c)
}

/// `log(1 - rho) / rho`, continuous at `rho = 0`.
fn log1m_over(rho: f64, log1m: f64) -> f64 {
    if rho < SMALL_RHO {
        -1.0
    } else {
        log1m / rho
    }
}

/// The deterministic limit of `X_{ceil(tN)} / N` for one value of `c`.
///
/// Both halves of the curve are parametrized by `rho` running over
/// `[0, rho_c]`: the way up is `(f(rho), g(rho))`, the way down is
/// `(f(rho) + 2 rho (1 - (f + g) / 2), g(rho))`. The branches meet at the
/// peak `(f(0), g(0))` and the curve spans `t` in `[0, 2 rho_c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitCurve {
    pub c: f64,
    pub rho_c: f64,
    pub li2_rho_c: f64,
    pub log1m_rho_c: f64,
    pub peak_time: f64,
    pub peak_height: f64,
    pub span: f64,
}

impl LimitCurve {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 1.0) || !c.is_finite() {
            return Err(Error::domain(format!("the limit curve exists for c > 1, got {c}")));
        }
        let rho_c = solve_survival(c, DEFAULT_TOL)?.rho;
        let li2_rho_c = dilog(rho_c)?;
        // ln(1 - rho_c) from the fixed point: forming 1 - rho_c loses all
        // digits once rho_c is within a few ulps of 1.
        let log1m_rho_c = -c * rho_c;
        let mut curve = LimitCurve {
            c,
            rho_c,
            li2_rho_c,
            log1m_rho_c,
            peak_time: 0.0,
            peak_height: 0.0,
            span: 2.0 * rho_c,
        };
        curve.peak_time = curve.f(0.0);
        curve.peak_height = curve.g(0.0);
        Ok(curve)
    }

    fn log1m(&self, rho: f64) -> f64 {
        if rho >= self.rho_c {
            self.log1m_rho_c
        } else {
            (-rho).ln_1p()
        }
    }

    fn li2(&self, rho: f64) -> f64 {
        if rho >= self.rho_c {
            self.li2_rho_c
        } else {
            dilog(rho).expect("rho in [0, rho_c]")
        }
    }

    /// Up-branch abscissa.
    pub fn f(&self, rho: f64) -> f64 {
        let log1m = self.log1m(rho);
        (self.li2_rho_c - self.li2(rho) + self.log1m_rho_c - log1m
            - 2.0 * (self.log1m_rho_c / self.rho_c - log1m_over(rho, log1m)))
            / self.c
    }

    /// Height shared by both branches.
    pub fn g(&self, rho: f64) -> f64 {
        (self.li2(rho) - self.li2_rho_c + self.log1m(rho) - self.log1m_rho_c) / self.c
    }

    /// Down-branch abscissa.
    pub fn down_time(&self, rho: f64) -> f64 {
        let (f, g) = (self.f(rho), self.g(rho));
        f + 2.0 * rho * (1.0 - 0.5 * (f + g))
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if !(0.0..=self.rho_c).contains(&rho) {
            return Err(Error::domain(format!(
                "curve parameter must lie in [0, {}], got {rho}",
                self.rho_c
            )));
        }
        Ok(())
    }

    /// Point `(f(rho), g(rho))` of the increasing half.
    pub fn curve_up(&self, rho: f64) -> Result<(f64, f64)> {
        self.check_rho(rho)?;
        Ok((self.f(rho), self.g(rho)))
    }

    /// Point of the decreasing half at parameter `rho`.
    pub fn curve_down(&self, rho: f64) -> Result<(f64, f64)> {
        self.check_rho(rho)?;
        Ok((self.down_time(rho), self.g(rho)))
    }

    /// `h(t)`, obtained by inverting the branch that contains `t` with
    /// bisection in `rho`. Zero outside `[0, 2 rho_c]`.
    pub fn eval_height(&self, t: f64) -> f64 {
        if !(t > 0.0 && t < self.span) {
            return 0.0;
        }
        // f decreases in rho; the down abscissa increases in rho.
        let rho = if t <= self.peak_time {
            self.invert(t, |rho| -self.f(rho), -t)
        } else {
            self.invert(t, |rho| self.down_time(rho), t)
        };
        self.g(rho)
    }

    /// Finds `rho` with `abscissa(rho) = target` for an increasing `abscissa`.
    fn invert(&self, t: f64, abscissa: impl Fn(f64) -> f64, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.rho_c);
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let value = abscissa(mid);
            if (value - target).abs() <= 1e-12 * t.max(1.0) {
                break;
            }
            if value < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        mid
    }

    /// `points` samples `(t, h(t))` with `t` evenly spaced on `[0, 2 rho_c]`.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        match points {
            0 => Vec::new(),
            1 => vec![(0.0, 0.0)],
            _ => (0..points)
                .map(|i| {
                    let t = self.span * i as f64 / (points - 1) as f64;
                    (t, self.eval_height(t))
                })
                .collect(),
        }
    }
}

/// Piecewise-linear tabulation of `h`, for evaluating the curve at millions
/// of abscissas. Nodes are exact curve points, so the only error is the
/// chord error between nodes.
#[derive(Debug, Clone)]
pub struct HeightTable {
    span: f64,
    times: Vec<f64>,
    heights: Vec<f64>,
}

impl HeightTable {
    pub const DEFAULT_NODES_PER_BRANCH: usize = 1 << 14;

    pub fn new(curve: &LimitCurve, nodes_per_branch: usize) -> Self {
        let nodes = nodes_per_branch.max(2);
        // Quadratic clustering towards rho_c, where both branches bend
        // sharply near the axis.
        let rho_at = |i: usize| {
            let s = 1.0 - i as f64 / (nodes - 1) as f64;
            curve.rho_c * (1.0 - s * s)
        };
        let mut times = Vec::with_capacity(2 * nodes);
        let mut heights = Vec::with_capacity(2 * nodes);
        for i in (0..nodes).rev() {
            let rho = rho_at(i);
            times.push(curve.f(rho));
            heights.push(curve.g(rho));
        }
        for i in 1..nodes {
            let rho = rho_at(i);
            times.push(curve.down_time(rho));
            heights.push(curve.g(rho));
        }
        // Pin the end points so the table is exact at t = 0 and t = 2 rho_c.
        times[0] = 0.0;
        heights[0] = 0.0;
        *times.last_mut().unwrap() = curve.span;
        *heights.last_mut().unwrap() = 0.0;
        HeightTable { span: curve.span, times, heights }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !(t > 0.0 && t < self.span) {
            return 0.0;
        }
        let hi = self.times.partition_point(|&x| x <= t).clamp(1, self.times.len() - 1);
        let lo = hi - 1;
        let (t0, t1) = (self.times[lo], self.times[hi]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.heights[lo] + w * (self.heights[hi] - self.heights[lo])
    }
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    (a, fa): (f64, f64),
    (m, fm): (f64, f64),
    (b, fb): (f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, (a, fa), (lm, flm), (m, fm), left, 0.5 * tol, depth - 1)
        + simpson_step(f, (m, fm), (rm, frm), (b, fb), right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute error `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, (a, fa), (m, fm), (b, fb), whole, tol, 48)
}

/// `(2u - I(u), I(u))` with `I(u) = int_0^u rho((1 - x) c) dx`.
///
/// This is the same up-branch as [`LimitCurve::curve_up`], parametrized by
/// the explored fraction `u` instead of `rho`; the two agree at
/// `rho = rho((1 - u) c)`.
pub fn integral_parametrization(c: f64, u: f64) -> Result<(f64, f64)> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("integral parametrization needs c > 1, got {c}")));
    }
    let u_max = 1.0 - 1.0 / c;
    if !(0.0..=u_max).contains(&u) {
        return Err(Error::domain(format!("u must lie in [0, {u_max}], got {u}")));
    }
    let integrand = |x: f64| survival_at_density(c, x.clamp(0.0, 1.0)).unwrap_or(0.0);
    let integral = adaptive_simpson(integrand, 0.0, u, QUADRATURE_TOL);
    Ok((2.0 * u - integral, integral))
}
