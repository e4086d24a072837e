//! Moduli of continuity: the explicit critical families, scaled copies
//! `ω_B(ξ) = ω(Bξ)` and time-dependent scalings `ω(F(t)ξ)`.
//!
//! A modulus is increasing, concave, piecewise `C¹` with `ω(0) = 0`. The
//! three critical families have right derivative 1 at zero and a single
//! interior kink (at `ξ0` for the Burgers family, at `δ` for the SQG and
//! β-SQG families); beyond the kink the value is the exact antiderivative
//! of the stated slope, anchored at the kink.

use crate::error::{CoreError, Result};
use serde::Serialize;

/// Which one-sided derivative to take at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// One closed-form piece of a custom modulus, evaluated as an increment
/// `c·(ξ − b)^p` from the left breakpoint `b` of its interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerPiece {
    pub coef: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum ModulusFamily {
    /// Identity modulus `ω(ξ) = ξ`. Test fixture only: it violates the
    /// curvature condition `∂²ξξω(0) = −∞` and is never certified.
    Linear,
    /// Hölder modulus `ω(ξ) = ξ^β`, `0 < β < 1`.
    PowerLaw { beta: f64 },
    /// `ξ/(1 + K√ξ)` on `(0, ξ0]`, `C_K·log ξ` beyond, `ξ0 = (K/4π)²`.
    BurgersCritical { k: f64, xi0: f64, c_k: f64 },
    /// `ξ − ξ^{3/2}` on `(0, δ]`, slope `γ/(ξ(4 + log(ξ/δ)))` beyond.
    SqgCritical { delta: f64, gamma: f64 },
    /// `ξ − ξ^{1+α}` on `(0, δ]`, slope `γ/ξ` beyond.
    BetaCritical { alpha: f64, delta: f64, gamma: f64 },
    /// Piecewise power increments between explicit breakpoints; the last
    /// piece extends to infinity.
    CustomPiecewise {
        breakpoints: Vec<f64>,
        pieces: Vec<PowerPiece>,
    },
}

/// A validated modulus of continuity.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusSpec {
    family: ModulusFamily,
    concave: bool,
}

/// Evaluation interface shared by plain and scaled moduli. Values assume
/// `ξ ≥ 0` (checked wrappers live on [`ModulusSpec`]).
pub trait Modulus: Sync {
    fn value(&self, xi: f64) -> f64;
    fn deriv(&self, xi: f64, side: Side) -> f64;
    /// Interior kink locations, increasing.
    fn breakpoints(&self) -> Vec<f64>;
    fn is_concave(&self) -> bool;
    /// Least upper bound of the range, `None` when unbounded.
    fn sup_value(&self) -> Option<f64>;
    fn derivative_at_zero(&self) -> f64;
}

impl ModulusSpec {
    pub fn linear() -> Self {
        ModulusSpec {
            family: ModulusFamily::Linear,
            concave: true,
        }
    }

    pub fn power_law(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(CoreError::InvalidModulus(format!(
                "power-law exponent must lie in (0,1), got {beta}"
            )));
        }
        Ok(ModulusSpec {
            family: ModulusFamily::PowerLaw { beta },
            concave: true,
        })
    }

    /// The Burgers-critical family. `C_K` is fixed at construction by
    /// matching the two branches at `ξ0`; K must be large enough that
    /// `ξ0 > 1` and the kink is concave (left slope ≥ right slope).
    pub fn burgers_critical(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(CoreError::InvalidModulus(format!("K must be positive, got {k}")));
        }
        let xi0 = (k / (4.0 * std::f64::consts::PI)).powi(2);
        if xi0 <= 1.0 {
            return Err(CoreError::InvalidModulus(format!(
                "K = {k} gives xi0 = {xi0:.6} <= 1; the log branch needs xi0 > 1 (K > 4π)"
            )));
        }
        let sq = xi0.sqrt();
        let c_k = xi0 / ((1.0 + k * sq) * xi0.ln());
        // concavity across the kink
        let left = (1.0 + 0.5 * k * sq) / (1.0 + k * sq).powi(2);
        let right = c_k / xi0;
        if left < right {
            return Err(CoreError::InvalidModulus(format!(
                "K = {k} is too small: slope jumps up at xi0 ({left:.3e} < {right:.3e})"
            )));
        }
        Ok(ModulusSpec {
            family: ModulusFamily::BurgersCritical { k, xi0, c_k },
            concave: true,
        })
    }

    pub fn sqg_critical(delta: f64, gamma: f64) -> Result<Self> {
        if !(delta > 0.0 && gamma > 0.0) {
            return Err(CoreError::InvalidModulus(format!(
                "delta and gamma must be positive, got ({delta}, {gamma})"
            )));
        }
        // increasing on (0, δ] needs 1 − (3/2)√ξ > 0 there
        if 1.0 - 1.5 * delta.sqrt() <= 0.0 {
            return Err(CoreError::InvalidModulus(format!(
                "delta = {delta} too large: ξ − ξ^{{3/2}} is not increasing up to delta"
            )));
        }
        let left = 1.0 - 1.5 * delta.sqrt();
        let right = gamma / (4.0 * delta);
        if left < right {
            return Err(CoreError::InvalidModulus(format!(
                "gamma = {gamma} too large for delta = {delta}: slope jumps up at delta \
                 ({left:.3e} < {right:.3e})"
            )));
        }
        Ok(ModulusSpec {
            family: ModulusFamily::SqgCritical { delta, gamma },
            concave: true,
        })
    }

    pub fn beta_critical(alpha: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CoreError::InvalidModulus(format!(
                "dissipation order must lie in (0,1), got {alpha}"
            )));
        }
        if !(delta > 0.0 && gamma > 0.0) {
            return Err(CoreError::InvalidModulus(format!(
                "delta and gamma must be positive, got ({delta}, {gamma})"
            )));
        }
        let left = 1.0 - (1.0 + alpha) * delta.powf(alpha);
        if left <= 0.0 {
            return Err(CoreError::InvalidModulus(format!(
                "delta = {delta} too large: ξ − ξ^{{1+α}} is not increasing up to delta"
            )));
        }
        let right = gamma / delta;
        if left < right {
            return Err(CoreError::InvalidModulus(format!(
                "gamma = {gamma} too large for delta = {delta}: slope jumps up at delta"
            )));
        }
        Ok(ModulusSpec {
            family: ModulusFamily::BetaCritical { alpha, delta, gamma },
            concave: true,
        })
    }

    /// Custom piecewise modulus. Concavity is probed on a sample grid, not
    /// assumed, so convex counterexamples are representable.
    pub fn custom_piecewise(breakpoints: Vec<f64>, pieces: Vec<PowerPiece>) -> Result<Self> {
        if breakpoints.is_empty() || pieces.len() != breakpoints.len() {
            return Err(CoreError::InvalidModulus(
                "need one piece per breakpoint (piece i starts at breakpoint i)".into(),
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(CoreError::InvalidModulus("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::InvalidModulus("breakpoints must be strictly increasing".into()));
        }
        for p in &pieces {
            if !(p.coef > 0.0 && p.exponent > 0.0) {
                return Err(CoreError::InvalidModulus(
                    "piece coefficients and exponents must be positive (ω must increase)".into(),
                ));
            }
        }
        let mut spec = ModulusSpec {
            family: ModulusFamily::CustomPiecewise { breakpoints, pieces },
            concave: true,
        };
        spec.concave = probe_concavity(&spec);
        Ok(spec)
    }

    pub fn family(&self) -> &ModulusFamily {
        &self.family
    }

    /// The family's intrinsic length scale: `ξ0`, `δ`, or 1.
    pub fn characteristic_length(&self) -> f64 {
        match &self.family {
            ModulusFamily::BurgersCritical { xi0, .. } => *xi0,
            ModulusFamily::SqgCritical { delta, .. } => *delta,
            ModulusFamily::BetaCritical { delta, .. } => *delta,
            ModulusFamily::CustomPiecewise { breakpoints, .. } => {
                *breakpoints.last().expect("validated nonempty")
            }
            _ => 1.0,
        }
    }

    /// ω(ξ). Errors on negative or NaN argument.
    pub fn eval(&self, xi: f64) -> Result<f64> {
        if xi.is_nan() || xi < 0.0 {
            return Err(CoreError::Domain(format!("ω is defined for ξ ≥ 0, got {xi}")));
        }
        Ok(self.value(xi))
    }

    /// One-sided derivative at ξ > 0. The right limit at 0 is available
    /// through [`Modulus::derivative_at_zero`].
    pub fn eval_derivative(&self, xi: f64, side: Side) -> Result<f64> {
        if !(xi > 0.0) {
            return Err(CoreError::Domain(format!(
                "one-sided derivative needs ξ > 0, got {xi}"
            )));
        }
        Ok(self.deriv(xi, side))
    }

    /// Solve ω(ξ) = y by monotone bisection, |ω(ξ) − y| ≤ 1e−12·max(1,y).
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(CoreError::Domain(format!("inverse needs y ≥ 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if let Some(sup) = self.sup_value() {
            if y > sup {
                return Err(CoreError::Range(format!(
                    "y = {y} exceeds sup ω = {sup} of a bounded modulus"
                )));
            }
        }
        match self.inverse_saturating(y) {
            x if x.is_finite() => Ok(x),
            _ => Err(CoreError::Range(format!(
                "ω^(-1)({y}) is not representable in f64"
            ))),
        }
    }

    /// Like [`inverse`](Self::inverse) but returns `+∞` when the preimage
    /// overflows f64 (slowly growing families at enormous y). Used by the
    /// rough-data schedules, where `G = y/ω^{-1}(y)` then underflows to 0.
    pub fn inverse_saturating(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let mut hi = self.characteristic_length().max(1.0);
        let mut lo = 0.0_f64;
        let mut grow = 0;
        while self.value(hi) < y {
            lo = hi;
            hi *= 8.0;
            grow += 1;
            if grow > 400 || !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        let tol = 1e-12 * y.max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = self.value(mid);
            if (v - y).abs() <= tol {
                return mid;
            }
            if v < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Second-divided-difference concavity scan over an increasing grid.
    pub fn check_concavity(&self, grid: &[f64]) -> Result<ConcavityReport> {
        if grid.len() < 3 {
            return Err(CoreError::Precondition("concavity scan needs ≥ 3 grid points".into()));
        }
        let vals: Vec<f64> = grid.iter().map(|&x| self.value(x)).collect();
        let mut violations = Vec::new();
        let mut worst = 0.0_f64;
        for i in 0..grid.len() - 2 {
            let (x0, x1, x2) = (grid[i], grid[i + 1], grid[i + 2]);
            let s01 = (vals[i + 1] - vals[i]) / (x1 - x0);
            let s12 = (vals[i + 2] - vals[i + 1]) / (x2 - x1);
            let dd = (s12 - s01) / (x2 - x0);
            let scale = (vals[i + 2].abs() / (x2 - x0).powi(2)).max(1.0);
            if dd > 1e-12 * scale {
                violations.push(ConcavityViolation {
                    triple: [x0, x1, x2],
                    second_divided_difference: dd,
                });
                worst = worst.max(dd / scale);
            }
        }
        Ok(ConcavityReport { violations, worst_relative: worst })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityViolation {
    pub triple: [f64; 3],
    pub second_divided_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    pub violations: Vec<ConcavityViolation>,
    pub worst_relative: f64,
}

impl ConcavityReport {
    pub fn is_concave(&self) -> bool {
        self.violations.is_empty()
    }
}

fn probe_concavity(spec: &ModulusSpec) -> bool {
    let mut grid: Vec<f64> = Vec::new();
    let lo = 1e-6_f64;
    let hi = 1e4 * spec.characteristic_length().max(1e-3);
    let n = 600;
    for i in 0..=n {
        grid.push(lo * (hi / lo).powf(i as f64 / n as f64));
    }
    for b in spec.breakpoints() {
        grid.push(b * (1.0 - 1e-9));
        grid.push(b);
        grid.push(b * (1.0 + 1e-9));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    spec.check_concavity(&grid).map(|r| r.is_concave()).unwrap_or(false)
}

impl Modulus for ModulusSpec {
    fn value(&self, xi: f64) -> f64 {
        debug_assert!(xi >= 0.0);
        if xi == 0.0 {
            return 0.0;
        }
        match &self.family {
            ModulusFamily::Linear => xi,
            ModulusFamily::PowerLaw { beta } => xi.powf(*beta),
            ModulusFamily::BurgersCritical { k, xi0, c_k } => {
                if xi <= *xi0 {
                    xi / (1.0 + k * xi.sqrt())
                } else {
                    c_k * xi.ln()
                }
            }
            ModulusFamily::SqgCritical { delta, gamma } => {
                if xi <= *delta {
                    xi - xi * xi.sqrt()
                } else {
                    // anchor + ∫_δ^ξ γ/(s(4+log(s/δ))) ds = γ·log((4+log(ξ/δ))/4)
                    let anchor = delta - delta * delta.sqrt();
                    anchor + gamma * ((4.0 + (xi / delta).ln()) / 4.0).ln()
                }
            }
            ModulusFamily::BetaCritical { alpha, delta, gamma } => {
                if xi <= *delta {
                    xi - xi.powf(1.0 + alpha)
                } else {
                    let anchor = delta - delta.powf(1.0 + alpha);
                    anchor + gamma * (xi / delta).ln()
                }
            }
            ModulusFamily::CustomPiecewise { breakpoints, pieces } => {
                let mut acc = 0.0;
                for (i, (&b, p)) in breakpoints.iter().zip(pieces).enumerate() {
                    let end = breakpoints.get(i + 1).copied();
                    match end {
                        Some(e) if xi >= e => {
                            acc += p.coef * (e - b).powf(p.exponent);
                        }
                        _ => {
                            acc += p.coef * (xi - b).powf(p.exponent);
                            break;
                        }
                    }
                }
                acc
            }
        }
    }

    fn deriv(&self, xi: f64, side: Side) -> f64 {
        debug_assert!(xi > 0.0);
        match &self.family {
            ModulusFamily::Linear => 1.0,
            ModulusFamily::PowerLaw { beta } => beta * xi.powf(beta - 1.0),
            ModulusFamily::BurgersCritical { k, xi0, c_k } => {
                let first = xi < *xi0 || (xi == *xi0 && side == Side::Left);
                if first {
                    let s = xi.sqrt();
                    (1.0 + 0.5 * k * s) / (1.0 + k * s).powi(2)
                } else {
                    c_k / xi
                }
            }
            ModulusFamily::SqgCritical { delta, gamma } => {
                let first = xi < *delta || (xi == *delta && side == Side::Left);
                if first {
                    1.0 - 1.5 * xi.sqrt()
                } else {
                    gamma / (xi * (4.0 + (xi / delta).ln()))
                }
            }
            ModulusFamily::BetaCritical { alpha, delta, gamma } => {
                let first = xi < *delta || (xi == *delta && side == Side::Left);
                if first {
                    1.0 - (1.0 + alpha) * xi.powf(*alpha)
                } else {
                    gamma / xi
                }
            }
            ModulusFamily::CustomPiecewise { breakpoints, pieces } => {
                let mut idx = 0;
                for (i, &b) in breakpoints.iter().enumerate() {
                    let starts_here = xi > b || (xi == b && side == Side::Right);
                    if starts_here {
                        idx = i;
                    }
                }
                let p = pieces[idx];
                let b = breakpoints[idx];
                let d = xi - b;
                if d == 0.0 {
                    // right limit of c·p·(ξ−b)^{p−1}
                    if p.exponent == 1.0 {
                        p.coef
                    } else if p.exponent < 1.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    p.coef * p.exponent * d.powf(p.exponent - 1.0)
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            ModulusFamily::BurgersCritical { xi0, .. } => vec![*xi0],
            ModulusFamily::SqgCritical { delta, .. } => vec![*delta],
            ModulusFamily::BetaCritical { delta, .. } => vec![*delta],
            ModulusFamily::CustomPiecewise { breakpoints, .. } => {
                breakpoints.iter().copied().filter(|&b| b > 0.0).collect()
            }
            _ => Vec::new(),
        }
    }

    fn is_concave(&self) -> bool {
        self.concave
    }

    fn sup_value(&self) -> Option<f64> {
        // all built-in families are unbounded; custom power pieces grow
        // without bound on the last interval as well
        None
    }

    fn derivative_at_zero(&self) -> f64 {
        match &self.family {
            ModulusFamily::Linear => 1.0,
            ModulusFamily::PowerLaw { .. } => f64::INFINITY,
            ModulusFamily::BurgersCritical { .. } => 1.0,
            ModulusFamily::SqgCritical { .. } => 1.0,
            ModulusFamily::BetaCritical { .. } => 1.0,
            ModulusFamily::CustomPiecewise { pieces, .. } => {
                let p = pieces[0];
                if p.exponent == 1.0 {
                    p.coef
                } else if p.exponent < 1.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }
}

/// `ω_B(ξ) = ω(Bξ)`.
#[derive(Debug, Clone, Serialize)]
pub struct ScaledModulus {
    pub base: ModulusSpec,
    pub scale: f64,
}

impl ScaledModulus {
    pub fn new(base: ModulusSpec, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(CoreError::InvalidModulus(format!(
                "scale factor must be positive and finite, got {scale}"
            )));
        }
        Ok(ScaledModulus { base, scale })
    }
}

impl Modulus for ScaledModulus {
    fn value(&self, xi: f64) -> f64 {
        self.base.value(self.scale * xi)
    }
    fn deriv(&self, xi: f64, side: Side) -> f64 {
        self.scale * self.base.deriv(self.scale * xi, side)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.base.breakpoints().iter().map(|b| b / self.scale).collect()
    }
    fn is_concave(&self) -> bool {
        self.base.is_concave()
    }
    fn sup_value(&self) -> Option<f64> {
        self.base.sup_value()
    }
    fn derivative_at_zero(&self) -> f64 {
        self.scale * self.base.derivative_at_zero()
    }
}

/// `ω(ξ, t) = ω(F(t)·ξ)` for a positive nonincreasing schedule F.
pub struct TimeDependentModulus {
    pub base: ModulusSpec,
    schedule: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TimeDependentModulus {
    pub fn new(base: ModulusSpec, schedule: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TimeDependentModulus { base, schedule: Box::new(schedule) }
    }

    pub fn scale_at(&self, t: f64) -> f64 {
        (self.schedule)(t)
    }

    /// Freeze the modulus at time t.
    pub fn at(&self, t: f64) -> Result<ScaledModulus> {
        ScaledModulus::new(self.base.clone(), self.scale_at(t))
    }

    /// Check F > 0 and nonincreasing on sample times.
    pub fn validate_on(&self, times: &[f64]) -> Result<()> {
        let mut prev = f64::INFINITY;
        for &t in times {
            let f = self.scale_at(t);
            if !(f > 0.0) {
                return Err(CoreError::InvalidModulus(format!("F({t}) = {f} is not positive")));
            }
            if f > prev * (1.0 + 1e-12) {
                return Err(CoreError::InvalidModulus(format!(
                    "schedule F increases at t = {t} ({f} > {prev})"
                )));
            }
            prev = f;
        }
        Ok(())
    }
}

pub fn log_grid(lo: f64, hi: f64, points_per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(2);
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqg01() -> ModulusSpec {
        ModulusSpec::sqg_critical(0.1, 0.2).unwrap()
    }

    #[test]
    fn sqg_value_on_first_branch() {
        // ξ − ξ^{3/2} at ξ = 0.04: 0.04 − 0.008 = 0.032
        let om = sqg01();
        assert!((om.eval(0.04).unwrap() - 0.032).abs() < 1e-15);
    }

    #[test]
    fn omega_vanishes_at_zero() {
        for om in [
            ModulusSpec::linear(),
            ModulusSpec::power_law(0.5).unwrap(),
            ModulusSpec::burgers_critical(60.0).unwrap(),
            sqg01(),
            ModulusSpec::beta_critical(0.4, 0.05, 0.02).unwrap(),
        ] {
            assert_eq!(om.eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn burgers_branches_are_continuous() {
        let om = ModulusSpec::burgers_critical(100.0).unwrap();
        let xi0 = om.characteristic_length();
        let below = om.eval(xi0 * (1.0 - 1e-12)).unwrap();
        let above = om.eval(xi0 * (1.0 + 1e-12)).unwrap();
        let at = om.eval(xi0).unwrap();
        assert!((below - at).abs() < 1e-10 * at);
        assert!((above - at).abs() < 1e-10 * at);
        // C_K matching: ξ0/(1+K√ξ0) = C_K log ξ0
        if let ModulusFamily::BurgersCritical { k, xi0, c_k } = om.family() {
            let lhs = xi0 / (1.0 + k * xi0.sqrt());
            assert!((lhs - c_k * xi0.ln()).abs() < 1e-14 * lhs);
        } else {
            panic!("wrong family");
        }
    }

    #[test]
    fn sqg_and_beta_tail_derivatives() {
        let om = sqg01();
        let xi = 0.5;
        let expect = 0.2 / (xi * (4.0 + (xi / 0.1_f64).ln()));
        assert!((om.eval_derivative(xi, Side::Right).unwrap() - expect).abs() < 1e-15);

        let om = ModulusSpec::beta_critical(0.4, 0.05, 0.02).unwrap();
        let d = om.eval_derivative(0.3, Side::Right).unwrap();
        assert!((d - 0.02 / 0.3).abs() < 1e-15);
        assert_eq!(ModulusSpec::linear().eval_derivative(3.7, Side::Left).unwrap(), 1.0);
    }

    #[test]
    fn tail_value_is_the_antiderivative_of_the_stated_slope() {
        // quadrature of ω' from δ must reproduce the closed form
        let om = sqg01();
        let (a, b) = (0.1_f64, 7.0_f64);
        let n = 400_000;
        let mut acc = 0.0;
        for i in 0..n {
            let x0 = a * (b / a).powf(i as f64 / n as f64);
            let x1 = a * (b / a).powf((i + 1) as f64 / n as f64);
            let m = 0.5 * (x0 + x1);
            acc += om.deriv(m, Side::Right) * (x1 - x0);
        }
        let closed = om.eval(b).unwrap() - om.eval(0.1).unwrap();
        assert!((acc - closed).abs() < 1e-7, "quad {acc} vs closed {closed}");
    }

    #[test]
    fn inverse_round_trip() {
        let oms = [
            ModulusSpec::linear(),
            ModulusSpec::power_law(0.33).unwrap(),
            ModulusSpec::burgers_critical(60.0).unwrap(),
            sqg01(),
        ];
        for om in &oms {
            for &xi in &[1e-6, 1e-3, 0.04, 0.7, 5.0, 900.0] {
                let y = om.eval(xi).unwrap();
                let back = om.inverse(y).unwrap();
                assert!(
                    (back - xi).abs() <= 1e-10 * xi.max(1.0),
                    "{:?}: xi {xi} back {back}",
                    om.family()
                );
            }
        }
        // spec anchors
        assert!((ModulusSpec::linear().inverse(0.7).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(sqg01().inverse(0.0).unwrap(), 0.0);
        assert!((sqg01().inverse(0.032).unwrap() - 0.04).abs() < 1e-10);
    }

    #[test]
    fn concavity_of_families_and_convex_counterexample() {
        let grid = log_grid(1e-8, 1e6, 40);
        for om in [
            ModulusSpec::burgers_critical(60.0).unwrap(),
            ModulusSpec::power_law(0.5).unwrap(),
            sqg01(),
        ] {
            let rep = om.check_concavity(&grid).unwrap();
            assert!(rep.is_concave(), "{:?}: {:?}", om.family(), rep.violations.first());
        }
        // ξ on [0,1], then a convex ξ² continuation
        let convex = ModulusSpec::custom_piecewise(
            vec![0.0, 1.0],
            vec![
                PowerPiece { coef: 1.0, exponent: 1.0 },
                PowerPiece { coef: 1.0, exponent: 2.0 },
            ],
        )
        .unwrap();
        assert!(!convex.is_concave());
        let rep = convex.check_concavity(&log_grid(0.1, 10.0, 60)).unwrap();
        assert!(!rep.is_concave());
    }

    #[test]
    fn scaled_modulus_matches_base() {
        let om = sqg01();
        for &b in &[0.1, 1.0, 37.0] {
            let sc = ScaledModulus::new(om.clone(), b).unwrap();
            for &xi in &[1e-4, 0.02, 0.3, 11.0] {
                assert_eq!(sc.value(xi), om.value(b * xi));
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(ModulusSpec::burgers_critical(5.0).is_err()); // xi0 < 1
        assert!(ModulusSpec::sqg_critical(0.1, 5.0).is_err()); // kink jumps up
        assert!(ModulusSpec::sqg_critical(0.5, 0.01).is_err()); // not increasing
        assert!(ModulusSpec::power_law(1.0).is_err());
        assert!(sqg01().eval(-1.0).is_err());
        assert!(sqg01().eval_derivative(0.0, Side::Right).is_err());
        assert!(sqg01().eval(f64::NAN).is_err());
    }
}
