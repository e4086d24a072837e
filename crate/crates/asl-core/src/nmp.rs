//! Nonlocal maximum principle certifier.
//!
//! Evaluates the dissipation functional
//!
//! ```text
//! D_{α,ω}(ξ) = c_α ( ∫₀^{ξ/2} [ω(ξ+2η)+ω(ξ−2η)−2ω(ξ)]/η^{1+2α} dη
//!             + ∫_{ξ/2}^∞ [ω(ξ+2η)−ω(2η−ξ)−2ω(ξ)]/η^{1+2α} dη )
//! ```
//!
//! and flow majorants `Ω_ω`, then checks the strict inequality
//! `m·Ω_ω(ξ)·∂ξω(ξ) + D_{α,ω}(ξ) < −margin` over a ξ grid. Both
//! bracketed integrands are pointwise ≤ 0 for concave ω, so truncating
//! the η tail only shrinks |D| and a passing certificate stays valid.

use crate::error::{CoreError, Result};
use crate::moduli::{log_grid, Modulus, ModulusFamily, ModulusSpec, Side};
use crate::quad;
use rayon::prelude::*;
use serde::Serialize;

/// Constants the paper's estimates leave unnamed: the dissipation
/// coefficient `c_α`, the flow majorant coefficient `A`, and the
/// required strict-negativity slack. Every certificate records them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NmpConstants {
    pub c_alpha: f64,
    pub a_flow: f64,
    pub margin: f64,
}

impl Default for NmpConstants {
    fn default() -> Self {
        NmpConstants { c_alpha: 1.0, a_flow: 1.0, margin: 0.0 }
    }
}

impl NmpConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_alpha > 0.0 && self.a_flow > 0.0 && self.margin >= 0.0) {
            return Err(CoreError::Precondition(format!(
                "need c_alpha > 0, A > 0, margin >= 0; got ({}, {}, {})",
                self.c_alpha, self.a_flow, self.margin
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper limit of the η integrals as a multiple of ξ.
    pub tail_cut: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            tail_cut: 1000.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.tail_cut >= 10.0) {
            return Err(CoreError::Precondition(format!(
                "need positive tolerances and tail_cut >= 10; got ({}, {}, {})",
                self.rel_tol, self.abs_tol, self.tail_cut
            )));
        }
        Ok(())
    }
}

/// `D_{α,ω}(ξ)`: nonpositive for concave ω. The η tail beyond
/// `tail_cut·ξ` is replaced by its exact `−2ω(ξ)` part plus the midpoint
/// of the bracketed remaining positive part, so the returned value
/// scales exactly under `ω → ω_B`.
pub fn dissipation_functional<M: Modulus>(
    alpha: f64,
    omega: &M,
    xi: f64,
    q: &QuadratureConfig,
    c: &NmpConstants,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CoreError::Domain(format!("dissipation order must lie in (0,1), got {alpha}")));
    }
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(CoreError::Domain(format!("ξ must be positive and finite, got {xi}")));
    }
    if !omega.is_concave() {
        return Err(CoreError::Precondition(
            "dissipation functional requires a concave modulus".into(),
        ));
    }
    q.validate()?;
    c.validate()?;

    let p = 1.0 + 2.0 * alpha;
    let w_xi = omega.value(xi);
    let kinks = omega.breakpoints();
    let dist_to_kink = kinks
        .iter()
        .map(|&b| (b - xi).abs())
        .fold(f64::INFINITY, f64::min);

    // ---- first integral over (0, ξ/2] -------------------------------
    let half = 0.5 * xi;
    let integrand1 = |eta: f64| {
        (omega.value(xi + 2.0 * eta) + omega.value(xi - 2.0 * eta) - 2.0 * w_xi) / eta.powf(p)
    };

    // Analytic head below η_cut: the bracket is smooth and even in η
    // there, so the integrand follows a·η^(1−2α) + b·η^(3−2α). A
    // two-point fit integrates that head in closed form and sidesteps
    // the cancellation of three nearly equal ω values at tiny η. Kept
    // clear of kinks so the local expansion is genuine.
    let mut eta_cut = 1e-3 * xi;
    if dist_to_kink.is_finite() {
        eta_cut = eta_cut.min(0.25 * dist_to_kink);
    }
    let (head, head_start) = if eta_cut > 0.0 && eta_cut < half * 0.1 {
        let u1 = 0.5 * eta_cut;
        let u2 = eta_cut;
        let (f1, f2) = (integrand1(u1), integrand1(u2));
        let (p1, p2) = (1.0 - 2.0 * alpha, 3.0 - 2.0 * alpha);
        // solve a·u^p1 + b·u^p2 = f at u1, u2
        let det = u1.powf(p1) * u2.powf(p2) - u2.powf(p1) * u1.powf(p2);
        let a = (f1 * u2.powf(p2) - f2 * u1.powf(p2)) / det;
        let b = (f2 * u1.powf(p1) - f1 * u2.powf(p1)) / det;
        let head = a * u2.powf(p1 + 1.0) / (p1 + 1.0) + b * u2.powf(p2 + 1.0) / (p2 + 1.0);
        (head, eta_cut)
    } else {
        (0.0, 0.0)
    };

    // substitution η = (ξ/2)s^m flattens the η^(1−2α) endpoint behavior
    // into s^(m(2−2α)−1); m is chosen so that exponent is ≥ 2
    let m = (3.0 / (2.0 - 2.0 * alpha)).ceil().clamp(3.0, 12.0);
    let s_head = if head_start > 0.0 { (head_start / half).powf(1.0 / m) } else { 0.0 };
    let integrand1_s = |s: f64| {
        let eta = half * s.powf(m);
        integrand1(eta) * half * m * s.powf(m - 1.0)
    };
    let mut marks1: Vec<f64> = Vec::new();
    for &b in &kinks {
        // ω(ξ ± 2η) crosses the kink at η = |b − ξ|/2
        let e = (b - xi).abs() * 0.5;
        if e > head_start && e < half {
            marks1.push((e / half).powf(1.0 / m));
        }
    }
    for j in 1..8 {
        let s = s_head + (1.0 - s_head) * j as f64 / 8.0;
        marks1.push(s);
    }
    let i1 = quad::integrate(
        integrand1_s,
        s_head,
        1.0,
        &marks1,
        q.rel_tol,
        q.abs_tol,
        q.max_subdivisions,
    )
    .map_err(|e| annotate(e, "dissipation functional, inner integral"))?;

    // ---- second integral over [ξ/2, tail_cut·ξ] ---------------------
    let top = q.tail_cut * xi;
    let integrand2 = |eta: f64| {
        (omega.value(2.0 * eta + xi) - omega.value(2.0 * eta - xi) - 2.0 * w_xi) / eta.powf(p)
    };
    let mut marks2: Vec<f64> = Vec::new();
    for &b in &kinks {
        for e in [(b + xi) * 0.5, (b - xi) * 0.5] {
            if e > half && e < top {
                marks2.push(e);
            }
        }
    }
    // ω(2η−ξ) has unbounded curvature as 2η−ξ → 0: grade toward ξ/2
    for j in 1..=30 {
        let e = half * (1.0 + 0.5f64.powi(j));
        if e < top {
            marks2.push(e);
        }
    }
    // coarse log marks so the long range starts resolved
    let mut e = half * 4.0;
    while e < top {
        marks2.push(e);
        e *= 4.0;
    }
    let i2 = quad::integrate(
        integrand2,
        half,
        top,
        &marks2,
        q.rel_tol,
        q.abs_tol,
        q.max_subdivisions,
    )
    .map_err(|e| annotate(e, "dissipation functional, outer integral"))?;

    // tail beyond the cut: ∫_T^∞ [A(η) − 2ω(ξ)]/η^{1+2α} dη where the
    // mean value theorem brackets A(η) = ω(2η+ξ)−ω(2η−ξ) between
    // 2ξ·ω'(far) and 2ξ·ω'(2T−ξ); exact for linear slopes
    let tail_exact = -2.0 * w_xi * top.powf(-2.0 * alpha) / (2.0 * alpha);
    let slope_near = omega.deriv(2.0 * top - xi, Side::Right);
    let slope_far = omega.deriv(2e6 * top, Side::Right);
    let weight = top.powf(-2.0 * alpha) / (2.0 * alpha);
    let tail = tail_exact + xi * (slope_near + slope_far) * weight;

    Ok(c.c_alpha * (head + i1.value + i2.value + tail))
}

/// Flow majorant from the singular-integral velocity bound:
/// `A·( ∫₀^ξ ω(η)/η^{2−β} dη + ξ·∫_ξ^∞ ω(η)/η^{3−β} dη )`, β ∈ [1/2, 1).
/// The tail beyond `tail_cut·ξ` is bracketed between the increasing and
/// concave-line extensions of ω.
pub fn flow_majorant_beta<M: Modulus>(
    omega: &M,
    beta: f64,
    xi: f64,
    q: &QuadratureConfig,
    c: &NmpConstants,
) -> Result<f64> {
    if !(beta >= 0.5 && beta < 1.0) {
        if beta >= 1.0 && omega.sup_value().is_none() {
            return Err(CoreError::Divergence(format!(
                "flow majorant tail diverges for β = {beta} with unbounded ω (Euler end of the family)"
            )));
        }
        return Err(CoreError::Domain(format!("β must lie in [1/2, 1), got {beta}")));
    }
    if !(xi > 0.0) {
        return Err(CoreError::Domain(format!("ξ must be positive, got {xi}")));
    }
    q.validate()?;
    c.validate()?;
    // local growth exponent at 0 must satisfy p0 + β > 1 for the inner
    // integral to converge
    let s1 = 1e-10 * xi;
    let s2 = 1e-8 * xi;
    let p0 = (omega.value(s2) / omega.value(s1)).ln() / (s2 / s1).ln();
    if p0 + beta <= 1.0 + 1e-9 {
        return Err(CoreError::Divergence(format!(
            "∫₀ ω(η)η^(β−2) dη diverges: local exponent {p0:.3} with β = {beta}"
        )));
    }

    let kinks = omega.breakpoints();
    let near: Vec<f64> = kinks.iter().copied().filter(|&b| b < xi).collect();
    let inner = quad::integrate_graded_origin(
        |eta: f64| omega.value(eta) * eta.powf(beta - 2.0),
        xi,
        40,
        &near,
        q.rel_tol,
        q.abs_tol,
        q.max_subdivisions,
    )
    .map_err(|e| annotate(e, "flow majorant, inner integral"))?;

    let top = q.tail_cut * xi;
    let mut marks: Vec<f64> = kinks.iter().copied().filter(|&b| b > xi && b < top).collect();
    let mut e = xi * 4.0;
    while e < top {
        marks.push(e);
        e *= 4.0;
    }
    let outer = quad::integrate(
        |eta: f64| omega.value(eta) * eta.powf(beta - 3.0),
        xi,
        top,
        &marks,
        q.rel_tol,
        q.abs_tol,
        q.max_subdivisions,
    )
    .map_err(|e| annotate(e, "flow majorant, outer integral"))?;

    // ω(T) + ω'(far)(η−T) ≤ ω(η) ≤ ω(T) + ω'(T)(η−T) for η ≥ T;
    // exact for linear slopes
    let w_t = omega.value(top);
    let s_hi = omega.deriv(top, Side::Right);
    let s_lo = omega.deriv(1e6 * top, Side::Right);
    let base = w_t * top.powf(beta - 2.0) / (2.0 - beta);
    let slope_part = top.powf(beta - 1.0) / ((2.0 - beta) * (1.0 - beta));
    let tail = base + 0.5 * (s_hi + s_lo) * slope_part;

    Ok(c.a_flow * (inner.value + xi * (outer.value + tail)))
}

/// The log-corrected majorant for the SQG/CCF critical modulus:
/// `A·ω(ξ)·(4 + |log(ξ/δ)|)`.
pub fn flow_majorant_sqg(omega: &ModulusSpec, xi: f64, c: &NmpConstants) -> Result<f64> {
    let delta = match omega.family() {
        ModulusFamily::SqgCritical { delta, .. } => *delta,
        other => {
            return Err(CoreError::Precondition(format!(
                "log-form flow majorant is specific to the SQG critical family, got {other:?}"
            )))
        }
    };
    if !(xi > 0.0) {
        return Err(CoreError::Domain(format!("ξ must be positive, got {xi}")));
    }
    c.validate()?;
    Ok(c.a_flow * omega.value(xi) * (4.0 + (xi / delta).ln().abs()))
}

/// Velocity-law selector for the certificate flow term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FlowLaw {
    /// `Ω = ω` (Burgers, u = θ).
    Burgers,
    /// `Ω = A·ω·(4+|log(ξ/δ)|)` (SQG/CCF with the critical SQG modulus).
    SqgLog,
    /// `Ω` by quadrature of the singular-integral bound with exponent β.
    Beta(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub alpha: f64,
    pub flow: FlowLaw,
    pub flow_multiplier: f64,
    pub constants: NmpConstants,
    pub xi_grid: Vec<f64>,
    pub flow_term: Vec<f64>,
    pub diss_term: Vec<f64>,
    pub total: Vec<f64>,
    /// ξ points whose quadrature failed; any entry fails the certificate.
    pub indeterminate: Vec<f64>,
    pub worst_xi: f64,
    pub worst_total: f64,
    pub pass: bool,
}

/// Log grid for certificates: `[lo_factor·ℓ, hi_factor·ℓ]` around the
/// family's characteristic length, nudged off exact kink locations.
pub fn certificate_grid(
    omega: &ModulusSpec,
    lo_factor: f64,
    hi_factor: f64,
    points_per_decade: usize,
) -> Vec<f64> {
    let ell = omega.characteristic_length();
    let mut grid = log_grid(lo_factor * ell, hi_factor * ell, points_per_decade);
    let kinks = omega.breakpoints();
    for x in grid.iter_mut() {
        for &b in &kinks {
            if (*x - b).abs() < 1e-9 * b {
                *x = b * (1.0 + 1e-7);
            }
        }
    }
    grid
}

/// Check `m·Ω(ξ)·∂ξω(ξ) + D_{α,ω}(ξ) < −margin` over the grid. At kinks
/// the larger one-sided slope is used. Stationary moduli are checked
/// unconditionally (no `ω ≤ 2‖θ‖∞` restriction), which is stronger.
pub fn certify(
    omega: &ModulusSpec,
    alpha: f64,
    flow: FlowLaw,
    grid: &[f64],
    c: &NmpConstants,
    q: &QuadratureConfig,
    flow_multiplier: f64,
) -> Result<CertificateReport> {
    if matches!(omega.family(), ModulusFamily::Linear) {
        return Err(CoreError::Precondition(
            "the identity modulus is a test fixture (finite curvature at 0) and cannot be certified"
                .into(),
        ));
    }
    if grid.is_empty() {
        return Err(CoreError::Precondition("certificate grid is empty".into()));
    }
    if !(flow_multiplier >= 1.0) {
        return Err(CoreError::Precondition(format!(
            "flow multiplier must be ≥ 1, got {flow_multiplier}"
        )));
    }
    c.validate()?;
    q.validate()?;

    struct Point {
        flow: f64,
        diss: f64,
        ok: bool,
    }
    let eval_point = |&xi: &f64| -> Point {
        let omg = match flow {
            FlowLaw::Burgers => Ok(omega.value(xi)),
            FlowLaw::SqgLog => flow_majorant_sqg(omega, xi, c),
            FlowLaw::Beta(beta) => flow_majorant_beta(omega, beta, xi, q, c),
        };
        let slope = omega.deriv(xi, Side::Left).max(omega.deriv(xi, Side::Right));
        let diss = dissipation_functional(alpha, omega, xi, q, c);
        match (omg, diss) {
            (Ok(f), Ok(d)) => Point { flow: flow_multiplier * f * slope, diss: d, ok: true },
            _ => Point { flow: f64::NAN, diss: f64::NAN, ok: false },
        }
    };
    let points: Vec<Point> = grid.par_iter().map(eval_point).collect();

    let mut report = CertificateReport {
        alpha,
        flow,
        flow_multiplier,
        constants: *c,
        xi_grid: grid.to_vec(),
        flow_term: Vec::with_capacity(grid.len()),
        diss_term: Vec::with_capacity(grid.len()),
        total: Vec::with_capacity(grid.len()),
        indeterminate: Vec::new(),
        worst_xi: f64::NAN,
        worst_total: f64::NEG_INFINITY,
        pass: false,
    };
    for (xi, p) in grid.iter().zip(&points) {
        report.flow_term.push(p.flow);
        report.diss_term.push(p.diss);
        let total = p.flow + p.diss;
        report.total.push(total);
        if !p.ok {
            report.indeterminate.push(*xi);
        } else if total > report.worst_total {
            report.worst_total = total;
            report.worst_xi = *xi;
        }
    }
    report.pass = report.indeterminate.is_empty() && report.worst_total < -c.margin;
    Ok(report)
}

/// Search window for [`parameter_sweep`].
#[derive(Debug, Clone, Copy)]
pub struct SweepSearch {
    pub lo: f64,
    pub hi: f64,
    /// Relative width at which bisection stops.
    pub resolution: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    /// Tightest passing parameter found (boundary of the passing set).
    pub boundary: f64,
    /// True when the passing side is the upper end of the range.
    pub passing_is_upper: bool,
    pub evaluations: usize,
    pub certificate: CertificateReport,
}

/// Bisect the pass/fail boundary of `certify` over a one-parameter
/// family. Construction failures (invalid parameters) count as failing.
/// The returned parameter is the last passing probe, so the attached
/// certificate is itself a pass.
#[allow(clippy::too_many_arguments)]
pub fn parameter_sweep(
    build: impl Fn(f64) -> Result<ModulusSpec> + Sync,
    alpha: f64,
    flow: FlowLaw,
    c: &NmpConstants,
    q: &QuadratureConfig,
    flow_multiplier: f64,
    grid_points_per_decade: usize,
    grid_lo: f64,
    grid_hi: f64,
    search: SweepSearch,
) -> Result<SweepResult> {
    if !(search.lo <= search.hi) || !(search.resolution > 0.0) {
        return Err(CoreError::Precondition(format!(
            "bad search range [{}, {}] / resolution {}",
            search.lo, search.hi, search.resolution
        )));
    }
    let mut evals = 0usize;
    let mut try_param = |p: f64| -> (bool, Option<CertificateReport>) {
        evals += 1;
        match build(p) {
            Ok(om) => {
                let grid = certificate_grid(&om, grid_lo, grid_hi, grid_points_per_decade);
                match certify(&om, alpha, flow, &grid, c, q, flow_multiplier) {
                    Ok(rep) => (rep.pass, Some(rep)),
                    Err(_) => (false, None),
                }
            }
            Err(_) => (false, None),
        }
    };

    let (lo_pass, lo_rep) = try_param(search.lo);
    if search.lo == search.hi {
        return if lo_pass {
            Ok(SweepResult {
                boundary: search.lo,
                passing_is_upper: true,
                evaluations: evals,
                certificate: lo_rep.unwrap(),
            })
        } else {
            Err(CoreError::SweepExhausted(format!(
                "single-point range {} fails the certificate",
                search.lo
            )))
        };
    }
    let (hi_pass, hi_rep) = try_param(search.hi);
    if lo_pass == hi_pass {
        if lo_pass {
            // entire range passes: the lo end is the extreme passing value
            return Ok(SweepResult {
                boundary: search.lo,
                passing_is_upper: false,
                evaluations: evals,
                certificate: lo_rep.unwrap(),
            });
        }
        return Err(CoreError::SweepExhausted(format!(
            "both ends of [{}, {}] fail; range is not bracketed",
            search.lo, search.hi
        )));
    }

    let log_space = search.lo > 0.0 && search.hi / search.lo > 100.0;
    let mut lo = search.lo;
    let mut hi = search.hi;
    let passing_is_upper = hi_pass;
    let mut best = if lo_pass {
        (lo, lo_rep.unwrap())
    } else {
        (hi, hi_rep.unwrap())
    };
    while (hi - lo) > search.resolution * hi.abs().max(lo.abs()) {
        let mid = if log_space { (0.5 * (lo.ln() + hi.ln())).exp() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let (ok, rep) = try_param(mid);
        if ok {
            best = (mid, rep.unwrap());
        }
        if ok == passing_is_upper {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SweepResult {
        boundary: best.0,
        passing_is_upper,
        evaluations: evals,
        certificate: best.1,
    })
}

/// Result of a modulus-obedience scan of a discrete field.
#[derive(Debug, Clone, Serialize)]
pub struct ObedienceReport {
    /// max over pairs of |θ(x)−θ(y)| / ω(dist(x,y)).
    pub max_ratio: f64,
    pub arg_pair: (usize, usize),
    pub pair_distance: f64,
    /// 2D scans check axis slices plus a seeded random subsample.
    pub subsampled: bool,
}

/// Obedience of 1D samples on a periodic grid of spacing `dx`, using the
/// minimal periodic image distance per lag.
pub fn check_obedience_1d<M: Modulus>(values: &[f64], dx: f64, omega: &M) -> Result<ObedienceReport> {
    let n = values.len();
    if n < 2 {
        return Err(CoreError::Precondition("need at least two samples".into()));
    }
    let mut max_ratio = 0.0_f64;
    let mut arg = (0usize, 0usize);
    let mut arg_dist = 0.0;
    for lag in 1..=n / 2 {
        let dist = lag as f64 * dx;
        let w = omega.value(dist);
        if !(w > 0.0) {
            return Err(CoreError::InvalidModulus(format!(
                "ω({dist}) = {w} for distinct points; malformed modulus"
            )));
        }
        let mut best = 0.0_f64;
        let mut best_i = 0usize;
        for i in 0..n {
            let j = if i + lag >= n { i + lag - n } else { i + lag };
            let d = (values[i] - values[j]).abs();
            if d > best {
                best = d;
                best_i = i;
            }
        }
        let ratio = best / w;
        if ratio > max_ratio {
            max_ratio = ratio;
            arg = (best_i, (best_i + lag) % n);
            arg_dist = dist;
        }
    }
    Ok(ObedienceReport { max_ratio, arg_pair: arg, pair_distance: arg_dist, subsampled: false })
}

fn annotate(e: CoreError, what: &str) -> CoreError {
    match e {
        CoreError::QuadratureNonConvergence { context, partial, err } => {
            CoreError::QuadratureNonConvergence {
                context: format!("{what}: {context}"),
                partial,
                err,
            }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::ScaledModulus;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }
    fn c1() -> NmpConstants {
        NmpConstants::default()
    }

    #[test]
    fn linear_modulus_has_zero_dissipation() {
        let om = ModulusSpec::linear();
        for &alpha in &[0.25, 0.5] {
            for &xi in &[0.1, 1.0, 10.0] {
                let d = dissipation_functional(alpha, &om, xi, &q(), &c1()).unwrap();
                assert!(d.abs() < 1e-8, "D({alpha},{xi}) = {d:e}");
            }
        }
    }

    #[test]
    fn power_law_homogeneity() {
        // D(ξ) = ξ^(β−2α) D(1) for ω = ξ^β: ratio D(2)/D(0.5) = 4^(β−2α)
        let om = ModulusSpec::power_law(0.5).unwrap();
        let d_half = dissipation_functional(0.5, &om, 0.5, &q(), &c1()).unwrap();
        let d_two = dissipation_functional(0.5, &om, 2.0, &q(), &c1()).unwrap();
        assert!(d_half < 0.0 && d_two < 0.0);
        let ratio = d_two / d_half;
        assert!((ratio - 0.5).abs() < 1e-5, "ratio {ratio}");
    }

    #[test]
    fn scaling_identity_for_scaled_modulus() {
        // D_(α,ω_B)(ξ) = B^(2α) D_(α,ω)(Bξ)
        let om = ModulusSpec::sqg_critical(0.1, 0.2).unwrap();
        let alpha = 0.5;
        for &b in &[0.5, 3.0] {
            let omb = ScaledModulus::new(om.clone(), b).unwrap();
            for &xi in &[0.05, 0.4] {
                let lhs = dissipation_functional(alpha, &omb, xi, &q(), &c1()).unwrap();
                let rhs = b.powf(2.0 * alpha)
                    * dissipation_functional(alpha, &om, b * xi, &q(), &c1()).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-6 * rhs.abs(),
                    "B={b} xi={xi}: {lhs:e} vs {rhs:e}"
                );
            }
        }
    }

    #[test]
    fn dissipation_is_nonpositive_for_concave_moduli() {
        let oms = [
            ModulusSpec::power_law(0.3).unwrap(),
            ModulusSpec::burgers_critical(60.0).unwrap(),
            ModulusSpec::sqg_critical(0.1, 0.2).unwrap(),
            ModulusSpec::beta_critical(0.4, 0.05, 0.02).unwrap(),
        ];
        for om in &oms {
            for &alpha in &[0.2, 0.5, 0.8] {
                for &xi in &[1e-4, 0.03, 1.0, 300.0] {
                    let d = dissipation_functional(alpha, om, xi, &q(), &c1()).unwrap();
                    assert!(d <= 1e-12, "D = {d:e} at alpha {alpha} xi {xi}");
                }
            }
        }
    }

    #[test]
    fn nonconcave_modulus_rejected() {
        use crate::moduli::PowerPiece;
        let convex = ModulusSpec::custom_piecewise(
            vec![0.0, 1.0],
            vec![
                PowerPiece { coef: 1.0, exponent: 1.0 },
                PowerPiece { coef: 1.0, exponent: 2.0 },
            ],
        )
        .unwrap();
        assert!(matches!(
            dissipation_functional(0.5, &convex, 0.5, &q(), &c1()),
            Err(CoreError::Precondition(_))
        ));
    }

    #[test]
    fn flow_beta_linear_closed_form() {
        // Ω_β(ξ) = A(1/β + 1/(1−β))·ξ^β for ω(η) = η
        let om = ModulusSpec::linear();
        let v = flow_majorant_beta(&om, 0.5, 1.0, &q(), &c1()).unwrap();
        assert!((v - 4.0).abs() < 2e-6, "got {v}");
        let v = flow_majorant_beta(&om, 0.75, 2.0, &q(), &c1()).unwrap();
        let expect = (1.0 / 0.75 + 4.0) * 2.0_f64.powf(0.75);
        assert!((v - expect).abs() < 2e-6 * expect, "got {v} want {expect}");
    }

    #[test]
    fn flow_beta_small_xi_limit_and_monotonicity() {
        let om = ModulusSpec::sqg_critical(0.1, 0.2).unwrap();
        let v_tiny = flow_majorant_beta(&om, 0.6, 1e-8, &q(), &c1()).unwrap();
        assert!(v_tiny < 1e-4, "should vanish as ξ→0, got {v_tiny}");
        let v1 = flow_majorant_beta(&om, 0.6, 0.01, &q(), &c1()).unwrap();
        let v2 = flow_majorant_beta(&om, 0.6, 0.1, &q(), &c1()).unwrap();
        assert!(v1 <= v2, "Ω must be monotone: {v1} vs {v2}");
    }

    #[test]
    fn flow_beta_divergences() {
        // Euler end with unbounded ω
        let om = ModulusSpec::linear();
        assert!(matches!(
            flow_majorant_beta(&om, 1.0, 1.0, &q(), &c1()),
            Err(CoreError::Divergence(_))
        ));
        // inner integral diverges when p0 + β ≤ 1
        let om = ModulusSpec::power_law(0.3).unwrap();
        assert!(matches!(
            flow_majorant_beta(&om, 0.5, 1.0, &q(), &c1()),
            Err(CoreError::Divergence(_))
        ));
    }

    #[test]
    fn flow_sqg_log_form() {
        let om = ModulusSpec::sqg_critical(0.1, 0.2).unwrap();
        let delta = 0.1;
        let v = flow_majorant_sqg(&om, delta, &c1()).unwrap();
        let w = om.eval(delta).unwrap();
        assert!((v - 4.0 * w).abs() < 1e-14);
        let xe = delta * std::f64::consts::E;
        let v = flow_majorant_sqg(&om, xe, &c1()).unwrap();
        let w = om.eval(xe).unwrap();
        assert!((v - 5.0 * w).abs() < 1e-12);
        // family restriction
        assert!(flow_majorant_sqg(&ModulusSpec::linear(), 1.0, &c1()).is_err());
    }

    #[test]
    fn burgers_certificate_passes_strengthened_form() {
        let om = ModulusSpec::burgers_critical(60.0).unwrap();
        let grid = certificate_grid(&om, 1e-6, 1e4, 24);
        let c = NmpConstants { margin: 1e-6, ..c1() };
        let rep = certify(&om, 0.5, FlowLaw::Burgers, &grid, &c, &q(), 2.0).unwrap();
        assert!(rep.pass, "worst {:.3e} at ξ = {:.3e}", rep.worst_total, rep.worst_xi);
    }

    #[test]
    fn certificate_monotone_in_c_alpha() {
        let om = ModulusSpec::burgers_critical(60.0).unwrap();
        let grid = certificate_grid(&om, 1e-4, 1e2, 16);
        let base = NmpConstants { c_alpha: 1.0, a_flow: 1.0, margin: 1e-6 };
        let rep1 = certify(&om, 0.5, FlowLaw::Burgers, &grid, &base, &q(), 2.0).unwrap();
        assert!(rep1.pass);
        let stronger = NmpConstants { c_alpha: 2.5, ..base };
        let rep2 = certify(&om, 0.5, FlowLaw::Burgers, &grid, &stronger, &q(), 2.0).unwrap();
        assert!(rep2.pass);
        assert!(rep2.worst_total <= rep1.worst_total + 1e-12);
    }

    #[test]
    fn supercritical_certificate_fails() {
        // weak dissipation cannot balance the Burgers flow term
        let om = ModulusSpec::power_law(0.5).unwrap();
        let grid = log_grid(1e-3, 1e3, 10);
        let c = NmpConstants { c_alpha: 1e-6, a_flow: 1.0, margin: 1e-6 };
        let rep = certify(&om, 0.05, FlowLaw::Burgers, &grid, &c, &q(), 1.0).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_total > 0.0);
    }

    #[test]
    fn linear_modulus_cannot_be_certified() {
        let om = ModulusSpec::linear();
        let grid = log_grid(0.1, 10.0, 4);
        assert!(certify(&om, 0.5, FlowLaw::Burgers, &grid, &c1(), &q(), 1.0).is_err());
    }

    #[test]
    fn sweep_degenerate_single_point() {
        let c = NmpConstants { margin: 1e-6, ..c1() };
        let r = parameter_sweep(
            ModulusSpec::burgers_critical,
            0.5,
            FlowLaw::Burgers,
            &c,
            &q(),
            2.0,
            12,
            1e-4,
            1e2,
            SweepSearch { lo: 60.0, hi: 60.0, resolution: 0.01 },
        )
        .unwrap();
        assert_eq!(r.boundary, 60.0);
        assert!(r.certificate.pass);
    }

    #[test]
    fn sweep_finds_minimal_burgers_k() {
        // strict negativity over the whole wide range: low K fail on
        // construction validity, large K pass
        let r = parameter_sweep(
            ModulusSpec::burgers_critical,
            0.5,
            FlowLaw::Burgers,
            &c1(),
            &q(),
            2.0,
            12,
            1e-4,
            1e2,
            SweepSearch { lo: 1.0, hi: 1e6, resolution: 0.05 },
        )
        .unwrap();
        assert!(r.passing_is_upper);
        assert!(r.boundary.is_finite() && r.boundary > 4.0 * std::f64::consts::PI);
        assert!(r.boundary < 1e3, "minimal passing K unexpectedly large: {}", r.boundary);
        assert!(r.certificate.pass);

        // with an absolute margin the passing window is interior; a
        // bracketed range returns its minimal passing parameter
        let c = NmpConstants { margin: 1e-6, ..c1() };
        let r = parameter_sweep(
            ModulusSpec::burgers_critical,
            0.5,
            FlowLaw::Burgers,
            &c,
            &q(),
            2.0,
            12,
            1e-6,
            1e4,
            SweepSearch { lo: 1.0, hi: 100.0, resolution: 0.05 },
        )
        .unwrap();
        assert!(r.passing_is_upper);
        assert!(r.boundary > 30.0 && r.boundary < 60.0, "boundary {}", r.boundary);
    }

    #[test]
    fn obedience_examples() {
        let n = 512;
        let dx = 2.0 * std::f64::consts::PI / n as f64;
        let sin: Vec<f64> = (0..n).map(|i| (i as f64 * dx).sin()).collect();
        let lin = ModulusSpec::linear();
        let rep = check_obedience_1d(&sin, dx, &lin).unwrap();
        assert!(rep.max_ratio < 1.0, "sin obeys the identity modulus: {}", rep.max_ratio);

        let twosin: Vec<f64> = sin.iter().map(|v| 2.0 * v).collect();
        let rep = check_obedience_1d(&twosin, dx, &lin).unwrap();
        assert!(rep.max_ratio > 1.0);

        let flat = vec![3.25; n];
        let rep = check_obedience_1d(&flat, dx, &lin).unwrap();
        assert_eq!(rep.max_ratio, 0.0);
    }
}
