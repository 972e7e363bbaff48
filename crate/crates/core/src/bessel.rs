//! Bessel functions of the first kind `J_n(x)` for integer `n >= 0`.
//!
//! Three regimes share one absolute error contract:
//!
//! * `|x| <= 2`: ascending power series.
//! * large `|x|` relative to `n^2`: Hankel phase-amplitude expansion,
//!   used only when its terms fall below the tolerance before diverging.
//! * everything else: Miller downward recurrence, normalized with
//!   `J_0 + 2 * sum J_2k = 1`.
//!
//! Negative arguments use `J_n(-x) = (-1)^n J_n(x)`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{FidError, Result};

/// Largest order accepted by the evaluator.
pub const MAX_ORDER: u32 = 10_000;

const SERIES_LIMIT: f64 = 2.0;
const RESCALE_ABOVE: f64 = 1e250;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselEvalPolicy {
    abs_tolerance: f64,
    max_terms: usize,
}

impl Default for BesselEvalPolicy {
    fn default() -> Self {
        Self { abs_tolerance: 1e-12, max_terms: 512 }
    }
}

impl BesselEvalPolicy {
    pub fn new(abs_tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tolerance.is_finite() && abs_tolerance > 0.0) {
            return Err(FidError::validation("abs_tolerance", "must be positive"));
        }
        if max_terms < 16 {
            return Err(FidError::validation("max_terms", "must be at least 16"));
        }
        Ok(Self { abs_tolerance, max_terms })
    }

    pub fn abs_tolerance(&self) -> f64 {
        self.abs_tolerance
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

fn check_args(order: u32, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(FidError::validation("x", format!("must be finite, got {x}")));
    }
    if order > MAX_ORDER {
        return Err(FidError::validation("order", format!("{order} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

fn parity_sign(order: u32, x: f64) -> f64 {
    if x < 0.0 && order % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `J_order(x)` with absolute error at most `policy.abs_tolerance()`.
pub fn bessel_j(order: u32, x: f64, policy: &BesselEvalPolicy) -> Result<f64> {
    check_args(order, x)?;
    let sign = parity_sign(order, x);
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if ax <= SERIES_LIMIT {
        if let Some(v) = power_series(order, ax, policy) {
            return Ok(sign * v);
        }
    }
    if let Some(v) = hankel_asymptotic(order, ax, policy) {
        return Ok(sign * v);
    }
    Ok(sign * miller(order, ax)[order as usize])
}

/// `J_0(x)` with the default policy. NaN and infinities propagate as NaN.
pub fn j0(x: f64) -> f64 {
    bessel_j(0, x, &BesselEvalPolicy::default()).unwrap_or(f64::NAN)
}

/// `J_0(x), J_1(x), ..., J_max_order(x)` from a single recurrence sweep.
pub fn bessel_j_orders(max_order: u32, x: f64, policy: &BesselEvalPolicy) -> Result<Vec<f64>> {
    check_args(max_order, x)?;
    let ax = x.abs();
    let mut values = if ax == 0.0 {
        let mut v = vec![0.0; max_order as usize + 1];
        v[0] = 1.0;
        v
    } else if ax <= SERIES_LIMIT {
        (0..=max_order)
            .map(|n| power_series(n, ax, policy).unwrap_or_else(|| miller(n, ax)[n as usize]))
            .collect()
    } else {
        let mut v = miller(max_order, ax);
        v.truncate(max_order as usize + 1);
        v
    };
    if x < 0.0 {
        values.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
    Ok(values)
}

/// Truncation order for series `sum_l c_l J_2l(z)`: orders well beyond the
/// argument are negligible.
pub fn series_truncation(z: f64) -> usize {
    (z.abs() / 2.0).ceil() as usize + 20
}

/// `|J_0(z) + 2 sum_{l=1..l_max} (-1)^l J_2l(z) - cos z|`.
pub fn bessel_cos_identity_residual(z: f64, l_max: usize, policy: &BesselEvalPolicy) -> Result<f64> {
    if l_max < 1 {
        return Err(FidError::validation("l_max", "must be at least 1"));
    }
    let top = u32::try_from(2 * l_max)
        .map_err(|_| FidError::validation("l_max", "too large"))?;
    let j = bessel_j_orders(top, z, policy)?;
    let mut sum = j[0];
    for l in 1..=l_max {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        sum += 2.0 * sign * j[2 * l];
    }
    Ok((sum - z.cos()).abs())
}

fn power_series(order: u32, x: f64, policy: &BesselEvalPolicy) -> Option<f64> {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for i in 1..=order {
        lead *= half / i as f64;
    }
    if lead == 0.0 {
        return Some(0.0);
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..policy.max_terms {
        term *= q / (k as f64 * (k as f64 + order as f64));
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() * 0.5 {
            return Some(sum);
        }
    }
    None
}

/// Hankel expansion `sqrt(2/(pi x)) (P cos chi - Q sin chi)`,
/// `chi = x - (n/2 + 1/4) pi`. Returns `None` when the asymptotic series
/// starts growing before reaching the tolerance.
fn hankel_asymptotic(order: u32, x: f64, policy: &BesselEvalPolicy) -> Option<f64> {
    let nf = order as f64;
    if x < 25.0 || x < nf * nf {
        return None;
    }
    let mu = 4.0 * nf * nf;
    let eightx = 8.0 * x;
    let amp = (2.0 / (PI * x)).sqrt();
    let target = 1e-3 * policy.abs_tolerance.min(f64::EPSILON) / amp;

    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for k in 1..policy.max_terms {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eightx);
        if term == 0.0 {
            converged = true;
            break;
        }
        if term.abs() > prev {
            return None;
        }
        prev = term.abs();
        // P takes even k with alternating sign, Q takes odd k
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < target {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    // cos(x - phi) expanded so the large argument is reduced by libm directly
    let (sp, cp) = reduced_phase(order);
    let (sx, cx) = x.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    Some(amp * (p * cos_chi - q * sin_chi))
}

/// `(sin, cos)` of `(n/2 + 1/4) pi` from the order modulo 4.
fn reduced_phase(order: u32) -> (f64, f64) {
    let s = FRAC_PI_4.sin();
    match order % 4 {
        0 => (s, s),
        1 => (s, -s),
        2 => (-s, -s),
        _ => (-s, s),
    }
}

/// Miller downward recurrence. Returns normalized `J_k(x)` for every `k`
/// from 0 up to the start index, which is at least `order`.
fn miller(order: u32, x: f64) -> Vec<f64> {
    let top = (order as f64).max(x);
    let mut start = (top + 30.0 + 2.0 * (40.0 * top).sqrt()).ceil() as usize;
    start += start % 2;
    let mut values = vec![0.0f64; start + 1];
    values[start] = 1e-300;
    let two_over_x = 2.0 / x;
    let mut next = 0.0f64;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * values[k] - next;
        next = values[k];
        values[k - 1] = prev;
        if prev.abs() > RESCALE_ABOVE {
            for v in &mut values[k - 1..] {
                *v /= RESCALE_ABOVE;
            }
            next /= RESCALE_ABOVE;
        }
    }
    let even_tail: f64 = values[2..].iter().step_by(2).sum();
    let inv = 1.0 / (values[0] + 2.0 * even_tail);
    for v in &mut values {
        *v *= inv;
    }
    values
}
