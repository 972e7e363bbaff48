//! Analytic FID expressions for long chains.
//!
//! The finite-N formulas below already contain the continuum replacement
//! of the mode sum by an integral, so they are large-N forms; the exact
//! finite-N reference is [`crate::fermion`].

use serde::Serialize;

use crate::bessel::{bessel_j_orders, j0, series_truncation, BesselEvalPolicy};
use crate::error::{FidError, Result};
use crate::exec::{compensated_sum, Execution};
use crate::model::{ChainSpec, FidSeries, Normalization, ThermalSpec, TimeGrid};

/// Largest chain for which the raw `2^N`-scaled forms are offered.
pub const MAX_RAW_SPINS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormVariant {
    /// `N 2^(N-2) J0(2Dt) - 2^(N-2) sum_{l>=1} (-1)^l J_2l(2Dt)`
    BesselSeries,
    /// `(2N+1) 2^(N-3) J0(2Dt) - 2^(N-3) cos(2Dt)`
    FiniteN,
    /// `J0(2Dt)`, already unit at zero.
    InfiniteJ0,
}

/// Normalized thermodynamic-limit FID `J0(2Dt)`.
pub fn fid_infinite(chain: &ChainSpec, grid: &TimeGrid) -> Result<FidSeries> {
    fid_infinite_with(chain, grid, Execution::default())
}

pub fn fid_infinite_with(chain: &ChainSpec, grid: &TimeGrid, exec: Execution) -> Result<FidSeries> {
    let d = chain.coupling();
    let values = exec.map(grid.count(), |i| j0(2.0 * d * grid.time(i)));
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FidError::validation("grid", "non-finite Bessel argument"));
    }
    Ok(FidSeries::from_grid(grid, values, Normalization::UnitAtZero, 1.0))
}

/// `2^exp` for the prefactors; exact for the whole supported range.
fn pow2(exp: i32) -> f64 {
    2f64.powi(exp)
}

fn raw_guard(chain: &ChainSpec) -> Result<()> {
    if chain.n_spins() > MAX_RAW_SPINS {
        return Err(FidError::ComputeGuard(format!(
            "raw closed forms carry 2^N prefactors and are limited to N <= {MAX_RAW_SPINS}; \
             use the normalized form for N = {}",
            chain.n_spins()
        )));
    }
    Ok(())
}

/// Raw `G(0)` of the finite-N formulas: `N 2^(N-2)`.
pub fn raw_amplitude_at_zero(chain: &ChainSpec) -> Result<f64> {
    raw_guard(chain)?;
    Ok(chain.n_spins() as f64 * pow2(chain.n_spins() as i32 - 2))
}

/// Raw finite-N closed forms (or `J0` for [`ClosedFormVariant::InfiniteJ0`]).
pub fn fid_closed_finite(
    chain: &ChainSpec,
    grid: &TimeGrid,
    variant: ClosedFormVariant,
) -> Result<FidSeries> {
    fid_closed_finite_with(chain, grid, variant, Execution::default())
}

pub fn fid_closed_finite_with(
    chain: &ChainSpec,
    grid: &TimeGrid,
    variant: ClosedFormVariant,
    exec: Execution,
) -> Result<FidSeries> {
    if variant == ClosedFormVariant::InfiniteJ0 {
        return fid_infinite_with(chain, grid, exec);
    }
    raw_guard(chain)?;
    let n = chain.n_spins() as f64;
    let d = chain.coupling();
    let policy = BesselEvalPolicy::default();
    let values = match variant {
        ClosedFormVariant::BesselSeries => {
            let scale = pow2(chain.n_spins() as i32 - 2);
            exec.try_map(grid.count(), |i| {
                let z = 2.0 * d * grid.time(i);
                let l_max = series_truncation(z);
                let j = bessel_j_orders(2 * l_max as u32, z, &policy)?;
                let tail = compensated_sum((1..=l_max).map(|l| {
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    sign * j[2 * l]
                }));
                Ok::<_, FidError>(scale * (n * j[0] - tail))
            })?
        }
        ClosedFormVariant::FiniteN => {
            let scale = pow2(chain.n_spins() as i32 - 3);
            exec.map(grid.count(), |i| {
                let z = 2.0 * d * grid.time(i);
                scale * ((2.0 * n + 1.0) * j0(z) - z.cos())
            })
        }
        ClosedFormVariant::InfiniteJ0 => unreachable!(),
    };
    let g0 = raw_amplitude_at_zero(chain)?;
    Ok(FidSeries::from_grid(grid, values, Normalization::Raw, g0))
}

/// Normalized finite-N closed form `((2N+1) J0(2Dt) - cos 2Dt) / (2N)`.
/// Free of `2^N` prefactors, so valid for any `N`.
pub fn fid_closed_finite_normalized(chain: &ChainSpec, grid: &TimeGrid) -> Result<FidSeries> {
    fid_closed_finite_normalized_with(chain, grid, Execution::default())
}

pub fn fid_closed_finite_normalized_with(
    chain: &ChainSpec,
    grid: &TimeGrid,
    exec: Execution,
) -> Result<FidSeries> {
    let n = chain.n_spins() as f64;
    let d = chain.coupling();
    let values = exec.map(grid.count(), |i| {
        let t = grid.time(i);
        if t == 0.0 {
            return 1.0;
        }
        let z = 2.0 * d * t;
        ((2.0 * n + 1.0) * j0(z) - z.cos()) / (2.0 * n)
    });
    let g0 = if chain.n_spins() <= MAX_RAW_SPINS { raw_amplitude_at_zero(chain)? } else { f64::INFINITY };
    Ok(FidSeries::from_grid(grid, values, Normalization::UnitAtZero, g0))
}

/// Second moment of the line shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondMoment {
    /// Long-chain value `2 D^2`, rad^2/s^2.
    pub thermodynamic_limit: f64,
    /// Exact finite-N value `2 D^2 (1 - 1/N)`; a derived extension checked
    /// against the dense commutator moment.
    pub finite_n: f64,
}

impl SecondMoment {
    pub const FINITE_N_LABEL: &'static str = "derived, oracle-checked";
}

pub fn second_moment(chain: &ChainSpec) -> SecondMoment {
    let d2 = chain.coupling() * chain.coupling();
    let n = chain.n_spins() as f64;
    SecondMoment { thermodynamic_limit: 2.0 * d2, finite_n: 2.0 * d2 * (1.0 - 1.0 / n) }
}

/// Unnormalized low-temperature `G(0) = (N/2) tanh(beta/2)`.
pub fn thermal_amplitude(chain: &ChainSpec, thermal: &ThermalSpec) -> f64 {
    0.5 * chain.n_spins() as f64 * (0.5 * thermal.beta()).tanh()
}

/// Low-temperature FID `(N/2) tanh(beta/2) J0(2Dt)`.
pub fn thermal_fid_infinite(
    chain: &ChainSpec,
    thermal: &ThermalSpec,
    grid: &TimeGrid,
) -> Result<FidSeries> {
    let amp = thermal_amplitude(chain, thermal);
    let shape = fid_infinite(chain, grid)?;
    let values = shape.values().iter().map(|v| amp * v).collect();
    Ok(FidSeries::from_grid(grid, values, Normalization::Raw, amp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize, d: f64) -> ChainSpec {
        ChainSpec::new(n, d).unwrap()
    }

    #[test]
    fn infinite_starts_at_one() {
        let g = TimeGrid::from_t_max(1e-3, 11).unwrap();
        let s = fid_infinite(&chain(9, 15.5e3), &g).unwrap();
        assert_eq!(s.values()[0], 1.0);
        assert!(s.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn infinite_small_time_expansion() {
        let c = chain(5, 15.5e3);
        let g = TimeGrid::new(0.0, 1e-8, 5).unwrap();
        let s = fid_infinite(&c, &g).unwrap();
        for (&t, &v) in s.times().iter().zip(s.values()) {
            let dt = c.coupling() * t;
            assert!((v - (1.0 - dt * dt)).abs() <= dt.powi(4), "t={t}");
        }
    }

    #[test]
    fn finite_forms_at_zero() {
        let g = TimeGrid::new(0.0, 1.0, 1).unwrap();
        for n in [1usize, 2, 3, 10, 33] {
            let c = chain(n, 2.0);
            let want = n as f64 * 2f64.powi(n as i32 - 2);
            for v in [ClosedFormVariant::BesselSeries, ClosedFormVariant::FiniteN] {
                let s = fid_closed_finite(&c, &g, v).unwrap();
                assert_eq!(s.values()[0], want, "N={n} {v:?}");
                assert_eq!(s.amplitude_at_zero(), want);
            }
        }
    }

    #[test]
    fn raw_guard_above_sixty() {
        let g = TimeGrid::new(0.0, 1.0, 2).unwrap();
        assert!(matches!(
            fid_closed_finite(&chain(61, 1.0), &g, ClosedFormVariant::FiniteN),
            Err(FidError::ComputeGuard(_))
        ));
        assert!(fid_closed_finite_normalized(&chain(5000, 1.0), &g).is_ok());
        assert!(fid_closed_finite(&chain(61, 1.0), &g, ClosedFormVariant::InfiniteJ0).is_ok());
    }

    #[test]
    fn normalized_finite_n_matches_raw_ratio() {
        let c = chain(12, 3.0);
        let g = TimeGrid::from_t_max(2.0, 41).unwrap();
        let raw = fid_closed_finite(&c, &g, ClosedFormVariant::FiniteN).unwrap().normalized().unwrap();
        let direct = fid_closed_finite_normalized(&c, &g).unwrap();
        assert!(raw.max_abs_diff(&direct).unwrap() < 1e-14);
    }

    #[test]
    fn second_moment_values() {
        let m = second_moment(&chain(2, 1.0));
        assert_eq!(m.thermodynamic_limit, 2.0);
        assert_eq!(m.finite_n, 1.0);
        let m = second_moment(&chain(1_000_000, 1.0));
        assert!((m.finite_n - 2.0).abs() < 1e-5);
    }

    #[test]
    fn thermal_amplitude_limits() {
        let c = chain(4, 1.0);
        let a = thermal_amplitude(&c, &ThermalSpec::new(2.0).unwrap());
        assert!((a - 2.0 * 1f64.tanh()).abs() < 1e-15);
        assert!((a - 1.523_188_311_911_53).abs() < 1e-12);
        let b = 1e-6;
        let small = thermal_amplitude(&c, &ThermalSpec::new(b).unwrap());
        assert!((small - 4.0 * b / 4.0).abs() < 1e-18);
        let big = thermal_amplitude(&c, &ThermalSpec::new(200.0).unwrap());
        assert_eq!(big, 2.0);
    }

    #[test]
    fn thermal_amplitude_monotone_and_bounded() {
        let c = chain(7, 1.0);
        let r: Vec<f64> = (1..200)
            .map(|i| thermal_amplitude(&c, &ThermalSpec::new(i as f64 * 0.05).unwrap()) / 3.5)
            .collect();
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        assert!(r.iter().all(|&v| v <= 1.0));
    }
}
