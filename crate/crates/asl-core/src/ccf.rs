//! CCF blow-up diagnostics: the line Hilbert transform by principal
//! value quadrature, the cusp functional `J(t)`, and the singular
//! integral inequalities behind the supercritical blow-up argument.

use crate::error::{CoreError, Result};
use crate::quad;
use crate::solver::ExperimentRecord;
use crate::spectral::PeriodicGrid;
use rustfft::num_complex::Complex;
use serde::Serialize;

/// An even, bounded, C¹ test function on the line with `f(0) = 0`,
/// nondecreasing on `(0, ∞)`. Values are evaluated at |x| so evenness
/// holds by construction.
pub struct LineFunction {
    pub id: String,
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    fp: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Supremum (the limit at infinity).
    pub sup: f64,
    /// Radius beyond which f is within ~1% of its supremum.
    pub support_radius: f64,
}

impl LineFunction {
    pub fn new(
        id: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fp: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sup: f64,
        support_radius: f64,
    ) -> Result<Self> {
        let lf = LineFunction {
            id: id.into(),
            f: Box::new(f),
            fp: Box::new(fp),
            sup,
            support_radius,
        };
        if lf.value(0.0).abs() > 1e-14 {
            return Err(CoreError::Precondition(format!("{}: f(0) must vanish", lf.id)));
        }
        for i in 1..=64 {
            let x = lf.support_radius * i as f64 / 64.0;
            if lf.slope(x) < -1e-12 {
                return Err(CoreError::Precondition(format!(
                    "{}: f must be nondecreasing on (0, R), slope {} at {x}",
                    lf.id,
                    lf.slope(x)
                )));
            }
        }
        Ok(lf)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x.abs())
    }

    /// Derivative on x > 0 (odd extension implied).
    pub fn slope(&self, x: f64) -> f64 {
        (self.fp)(x.abs()) * x.signum()
    }

    /// `x²/(c+x²)`: the closed-form Hilbert family used as oracle.
    pub fn rational_bump(c: f64) -> Self {
        LineFunction::new(
            format!("x^2/({c}+x^2)"),
            move |x| x * x / (c + x * x),
            move |x| 2.0 * c * x / (c + x * x).powi(2),
            1.0,
            10.0 * c.sqrt().max(1.0),
        )
        .expect("valid by construction")
    }

    /// The bundled inequality-harness family.
    pub fn standard_family() -> Vec<LineFunction> {
        let mut fam: Vec<LineFunction> =
            [0.1, 0.5, 1.0, 2.0, 10.0].iter().map(|&c| Self::rational_bump(c)).collect();
        fam.push(
            LineFunction::new(
                "tanh(x)^2",
                |x| x.tanh().powi(2),
                |x| 2.0 * x.tanh() / x.cosh().powi(2),
                1.0,
                6.0,
            )
            .unwrap(),
        );
        fam.push(
            LineFunction::new(
                "1-exp(-x^2)",
                |x| -(-x * x).exp_m1(),
                |x| 2.0 * x * (-x * x).exp(),
                1.0,
                5.0,
            )
            .unwrap(),
        );
        fam.push(
            LineFunction::new(
                "x^4/(1+x^4)",
                |x| x.powi(4) / (1.0 + x.powi(4)),
                |x| 4.0 * x.powi(3) / (1.0 + x.powi(4)).powi(2),
                1.0,
                8.0,
            )
            .unwrap(),
        );
        fam.push(
            LineFunction::new(
                "1-1/(1+x^2)^2",
                |x| 1.0 - 1.0 / (1.0 + x * x).powi(2),
                |x| 4.0 * x / (1.0 + x * x).powi(3),
                1.0,
                10.0,
            )
            .unwrap(),
        );
        fam
    }
}

/// Principal value Hilbert transform `(1/π)∫ f(y)/(x−y) dy` of a bounded
/// function with decaying odd part, via the symmetric-excision rewrite
/// `(1/π)∫₀^∞ [f(x−s) − f(x+s)]/s ds`. Panels double geometrically into
/// the tail until their contribution is negligible.
pub fn hilbert_line_fn(f: impl Fn(f64) -> f64, x: f64, inner_radius: f64) -> Result<f64> {
    let g = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            (f(x - s) - f(x + s)) / s
        }
    };
    let near = quad::integrate(
        &g,
        0.0,
        inner_radius,
        &[x.abs(), 2.0 * x.abs(), 0.5 * inner_radius],
        1e-11,
        1e-13,
        4000,
    )?;
    let mut acc = near.value;
    let mut a = inner_radius;
    for _ in 0..64 {
        let b = 2.0 * a;
        let piece = quad::integrate(&g, a, b, &[], 1e-11, 1e-14, 2000)?;
        acc += piece.value;
        a = b;
        if piece.value.abs() < 1e-12 * acc.abs().max(1.0) && a > 1e4 {
            break;
        }
        if a > 1e12 {
            return Err(CoreError::Divergence(format!(
                "Hilbert tail did not settle by s = {a:.1e} at x = {x}"
            )));
        }
    }
    Ok(acc / std::f64::consts::PI)
}

impl LineFunction {
    pub fn hilbert(&self, x: f64) -> Result<f64> {
        hilbert_line_fn(|y| self.value(y), x, 4.0 * self.support_radius.max(x.abs()))
    }
}

/// `J = ∫₀^R (θ(0)−θ(x))/x^{1+δ} dx` for a closed-form even profile,
/// graded quadrature toward the singular endpoint.
pub fn j_functional_profile(
    theta: impl Fn(f64) -> f64,
    delta: f64,
    truncation: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CoreError::Domain(format!("δ must lie in (0,1), got {delta}")));
    }
    let center = theta(0.0);
    let r = quad::integrate_graded_origin(
        |x| (center - theta(x)) / x.powf(1.0 + delta),
        truncation,
        40,
        &[],
        1e-10,
        1e-13,
        4000,
    )?;
    Ok(r.value)
}

/// Exact per-mode weights for the J functional of a periodic field:
/// for θ(x) = (1/n)Σ c_k e^{iκ_k x},
/// `J = ∫₀^L (θ(0)−θ(x))/x^{1+d} dx = (1/n)Σ_k Re c_k·Wc(|κ_k|) +
/// Im c_k·sgn(κ_k)·Ws(|κ_k|)`. Weights are built once per (grid, d) by
/// incremental quadrature of the universal oscillatory profiles, so a
/// frame costs one dot product.
pub struct JWeights {
    exponent: f64,
    wc: Vec<f64>,
    ws: Vec<f64>,
    n: usize,
}

impl JWeights {
    pub fn build(grid: &PeriodicGrid, exponent: f64) -> Self {
        assert!(grid.dim == 1, "J weights are 1D");
        assert!(exponent > 0.0 && exponent < 2.0, "exponent in (0,2), got {exponent}");
        let n = grid.n;
        let l = grid.half_period;
        let d = exponent;
        // V(z) = ∫₀^z (1−cos u)/u^{1+d} du and S(z) = ∫₀^z sin(u)/u^{1+d} du
        // accumulated over π panels; W(κ_k) = κ_k^d · V(κ_k L), κ_k L = π k.
        let half = n / 2;
        let mut v = vec![0.0f64; half + 1];
        let mut s = vec![0.0f64; half + 1];
        let pi = std::f64::consts::PI;
        let want_sine = d < 1.0;
        let mut acc_v = 0.0;
        let mut acc_s = 0.0;
        for k in 1..=half {
            let (a, b) = (pi * (k - 1) as f64, pi * k as f64);
            let pv = if k == 1 {
                quad::integrate_graded_origin(
                    |u: f64| (1.0 - u.cos()) / u.powf(1.0 + d),
                    b,
                    40,
                    &[],
                    1e-12,
                    1e-15,
                    2000,
                )
            } else {
                quad::integrate(
                    |u: f64| (1.0 - u.cos()) / u.powf(1.0 + d),
                    a,
                    b,
                    &[],
                    1e-12,
                    1e-15,
                    200,
                )
            }
            .expect("smooth panel");
            acc_v += pv.value;
            v[k] = acc_v;
            if want_sine {
                let ps = if k == 1 {
                    quad::integrate_graded_origin(
                        |u: f64| u.sin() / u.powf(1.0 + d),
                        b,
                        40,
                        &[],
                        1e-12,
                        1e-15,
                        2000,
                    )
                } else {
                    quad::integrate(
                        |u: f64| u.sin() / u.powf(1.0 + d),
                        a,
                        b,
                        &[],
                        1e-12,
                        1e-15,
                        200,
                    )
                }
                .expect("smooth panel");
                acc_s += ps.value;
                s[k] = acc_s;
            }
        }
        let mut wc = vec![0.0f64; half + 1];
        let mut ws = vec![0.0f64; half + 1];
        for k in 1..=half {
            let kappa = pi * k as f64 / l;
            wc[k] = kappa.powf(d) * v[k];
            ws[k] = if want_sine { kappa.powf(d) * s[k] } else { 0.0 };
        }
        JWeights { exponent, wc, ws, n }
    }

    /// Dot the weights with a spectrum from `SpectralEngine::to_spectrum`.
    pub fn apply(&self, spec: &[Complex<f64>]) -> f64 {
        let n = self.n;
        debug_assert_eq!(spec.len(), n);
        let mut acc = 0.0;
        for (i, c) in spec.iter().enumerate() {
            let k = if i <= n / 2 { i as i64 } else { i as i64 - n as i64 };
            if k == 0 {
                continue;
            }
            let a = k.unsigned_abs() as usize;
            if a > n / 2 {
                continue;
            }
            // grid origin sits at −L, so mode k carries a (−1)^k phase
            // relative to the e^{iκx} basis
            let phase = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += phase * (c.re * self.wc[a] + c.im * (k.signum() as f64) * self.ws[a]);
        }
        acc / n as f64
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Outcome of one nonlinear-inequality evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum InequalityValue {
    Finite { lhs: f64, rhs: f64, ratio: f64 },
    /// The proposition's "both sides infinite" branch.
    Divergent,
}

/// Both sides of `−∫₀¹ Hf·f'·f^{p−1}/x^σ dx ≥ C₀·∫₀¹ f^{p+1}/x^{1+σ} dx`.
pub fn mainnonlin_check(f: &LineFunction, p: f64, sigma: f64) -> Result<InequalityValue> {
    if !(p >= 1.0) || !(sigma > 0.0) {
        return Err(CoreError::Domain(format!("need p ≥ 1 and σ > 0, got ({p}, {sigma})")));
    }
    // local exponent of the right integrand at 0: f ~ c x^m
    let m = (f.value(2e-4) / f.value(1e-4)).ln() / 2.0_f64.ln();
    if m * (p + 1.0) - 1.0 - sigma <= -1.0 + 1e-9 {
        return Ok(InequalityValue::Divergent);
    }
    let rhs = quad::integrate_graded_origin(
        |x| f.value(x).powf(p + 1.0) / x.powf(1.0 + sigma),
        1.0,
        40,
        &[],
        1e-9,
        1e-12,
        4000,
    )?
    .value;
    let lhs = -quad::integrate_graded_origin(
        |x| {
            let h = f.hilbert(x).expect("Hilbert quadrature");
            h * f.slope(x) * f.value(x).powf(p - 1.0) / x.powf(sigma)
        },
        1.0,
        12,
        &[],
        1e-7,
        1e-10,
        600,
    )?
    .value;
    Ok(InequalityValue::Finite { lhs, rhs, ratio: lhs / rhs })
}

/// Residual of the log-kernel representation of the Hilbert transform:
/// `Hf(x) = ∫₀^{2x} log|(y−x)/x| f'(y) dy + ∫_x^∞ (f(y−x)−f(y+x))/y dy`.
pub fn htesteq_check(f: &LineFunction, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(CoreError::Domain(format!("x must be positive, got {x}")));
    }
    // log singularity at y = x: analytic core ± ε plus graded marks
    let eps = 1e-7 * x;
    let logpart = |y: f64| ((y - x).abs() / x).ln() * f.slope(y);
    let mut marks = Vec::new();
    for j in 1..=24 {
        let off = x * 0.5f64.powi(j);
        if off > eps {
            marks.push(x - off);
            marks.push(x + off);
        }
    }
    let left = quad::integrate(&logpart, 0.0, x - eps, &marks, 1e-10, 1e-13, 4000)?;
    let right = quad::integrate(&logpart, x + eps, 2.0 * x, &marks, 1e-10, 1e-13, 4000)?;
    let core = f.slope(x) * 2.0 * eps * ((eps / x).ln() - 1.0);

    let far = {
        let g = |y: f64| (f.value(y - x) - f.value(y + x)) / y;
        let mut acc = 0.0;
        let mut a = x;
        let mut b = 4.0 * f.support_radius.max(x);
        for _ in 0..64 {
            let piece = quad::integrate(&g, a, b, &[], 1e-11, 1e-14, 2000)?;
            acc += piece.value;
            a = b;
            b *= 2.0;
            if piece.value.abs() < 1e-13 * acc.abs().max(1.0) && a > 1e4 {
                break;
            }
        }
        acc
    };

    // the log-kernel identity is stated for the unnormalized transform;
    // 1/π converts to the convention of the CCF velocity law
    let representation = (left.value + right.value + core + far) / std::f64::consts::PI;
    let direct = f.hilbert(x)?;
    Ok((representation - direct).abs())
}

/// The monotone bound `Hf(x) ≤ log(q−1)·(f(qx) − f(x/q))`, 1 < q < 2.
/// Returns (Hf(x), bound).
pub fn htcor_bound(f: &LineFunction, q: f64, x: f64) -> Result<(f64, f64)> {
    if !(q > 1.0 && q < 2.0) {
        return Err(CoreError::Domain(format!("q must lie in (1,2), got {q}")));
    }
    let lhs = f.hilbert(x)?;
    let rhs = (q - 1.0).ln() * (f.value(q * x) - f.value(x / q));
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderReport {
    /// ∫ f²/x^{2+δ}
    pub quad_integral: f64,
    /// ∫ |f|/x^{1+δ}
    pub abs_integral: f64,
    /// ∫ f/x^{1+δ+2α}
    pub frac_integral: f64,
    /// Largest C₁ with C₂ = 0.
    pub c1: f64,
    /// Smallest C_ε for the supplied ε.
    pub c_eps: f64,
    pub feasible: bool,
}

/// Feasible constants in the two Hölder bounds used by the blow-up
/// argument. Requires 0 < δ < 1, and for the fractional-term bound
/// 0 < α < 1/4 with δ < 1 − 4α.
pub fn holder_bounds_check(f: &LineFunction, delta: f64, alpha: f64, eps: f64) -> Result<HolderReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CoreError::Domain(format!("δ must lie in (0,1), got {delta}")));
    }
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(CoreError::Domain(format!("α must lie in (0, 1/4), got {alpha}")));
    }
    if !(delta < 1.0 - 4.0 * alpha) {
        return Err(CoreError::Domain(format!(
            "need δ < 1 − 4α, got δ = {delta}, α = {alpha}"
        )));
    }
    if !(eps > 0.0) {
        return Err(CoreError::Domain(format!("ε must be positive, got {eps}")));
    }
    let s_cut = 100.0 * f.support_radius;
    let tail_coef = 0.5 * (f.value(s_cut).powi(2) + f.sup * f.sup);
    let quad_integral = quad::integrate_graded_origin(
        |x| f.value(x).powi(2) / x.powf(2.0 + delta),
        s_cut,
        40,
        &[f.support_radius],
        1e-9,
        1e-12,
        4000,
    )?
    .value
        + tail_coef * s_cut.powf(-1.0 - delta) / (1.0 + delta);
    let tail_coef = 0.5 * (f.value(s_cut) + f.sup);
    let abs_integral = quad::integrate_graded_origin(
        |x| f.value(x).abs() / x.powf(1.0 + delta),
        s_cut,
        40,
        &[f.support_radius],
        1e-9,
        1e-12,
        4000,
    )?
    .value
        + tail_coef * s_cut.powf(-delta) / delta;
    let frac_integral = quad::integrate_graded_origin(
        |x| f.value(x) / x.powf(1.0 + delta + 2.0 * alpha),
        s_cut,
        40,
        &[f.support_radius],
        1e-9,
        1e-12,
        4000,
    )?
    .value
        + tail_coef * s_cut.powf(-delta - 2.0 * alpha) / (delta + 2.0 * alpha);

    let c1 = quad_integral / (abs_integral * abs_integral);
    let c_eps = ((frac_integral - eps * quad_integral) / (1.0 + f.sup)).max(0.0);
    let feasible = c1.is_finite() && c1 > 0.0 && quad_integral.is_finite();
    Ok(HolderReport { quad_integral, abs_integral, frac_integral, c1, c_eps, feasible })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorReport {
    pub pass: bool,
    pub initial_ok: bool,
    pub frames_checked: usize,
    pub violations: Vec<(f64, String)>,
}

/// Scan a CCF run for positivity, evenness, and monotone decay on
/// (0, L), while the resolution flag holds. Requires the run to have
/// recorded the `linf`, `grad_max` and ccf monitor columns.
pub fn monotonicity_monitor(record: &ExperimentRecord) -> Result<MonitorReport> {
    let col = |name: &str| -> Result<usize> {
        record
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CoreError::Precondition(format!("run did not record column {name}")))
    };
    let (i_t, i_linf, i_grad) = (col("t")?, col("linf")?, col("grad_max")?);
    let (i_min, i_even, i_mono) = (col("min_theta")?, col("evenness_residual")?, col("monotone_residual")?);
    let i_flag = col("resolved_flag")?;

    let mut violations = Vec::new();
    let mut frames_checked = 0;
    let mut initial_ok = true;
    for (fi, row) in record.frames.iter().enumerate() {
        if row[i_flag] < 0.5 {
            break; // informational after the resolution flag
        }
        frames_checked += 1;
        let t = row[i_t];
        let mut bad = Vec::new();
        if row[i_min] < -1e-8 {
            bad.push(format!("positivity: min θ = {:.3e}", row[i_min]));
        }
        if row[i_even] > 1e-8 * row[i_linf].max(1e-300) {
            bad.push(format!("evenness residual {:.3e}", row[i_even]));
        }
        if row[i_mono] > 1e-6 * row[i_grad].max(1e-300) {
            bad.push(format!("monotone decay: max θ_x = {:.3e}", row[i_mono]));
        }
        if !bad.is_empty() {
            if fi == 0 {
                initial_ok = false;
            }
            for b in bad {
                violations.push((t, b));
            }
        }
    }
    Ok(MonitorReport { pass: violations.is_empty(), initial_ok, frames_checked, violations })
}
