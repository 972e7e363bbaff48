//! Shared domain types.
//!
//! Unit conventions: the coupling `D` is an angular frequency in rad/s, times
//! are SI seconds, and every phase that enters a formula is a `D * t`
//! product. Microseconds only appear at the CLI and CSV ingestion boundary.

use serde::Serialize;

use crate::error::{FidError, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact by definition of h).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Number of spins and nearest-neighbour dipolar coupling of an open chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainSpec {
    n_spins: usize,
    coupling: f64,
}

impl ChainSpec {
    pub fn new(n_spins: usize, coupling: f64) -> Result<Self> {
        if n_spins < 1 {
            return Err(FidError::validation("n_spins", "must be at least 1"));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(FidError::validation(
                "coupling",
                format!("must be a positive finite angular frequency, got {coupling}"),
            ));
        }
        Ok(Self { n_spins, coupling })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Coupling constant `D` in rad/s.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }
}

/// Validated [`ChainSpec`] constructor.
pub fn make_chain(n_spins: usize, coupling: f64) -> Result<ChainSpec> {
    ChainSpec::new(n_spins, coupling)
}

/// Uniform sampling `start + i * step` for `i = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() {
            return Err(FidError::validation("start", "must be finite"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(FidError::validation("step", format!("must be positive, got {step}")));
        }
        if count < 1 {
            return Err(FidError::validation("points", "must be at least 1"));
        }
        Ok(Self { start, step, count })
    }

    /// Grid starting at zero with `points` samples, the last one at `t_max`.
    /// A single point yields just `t = 0`.
    pub fn from_t_max(t_max: f64, points: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(FidError::validation("t_max", format!("must be positive, got {t_max}")));
        }
        if points < 1 {
            return Err(FidError::validation("points", "must be at least 1"));
        }
        let step = if points == 1 { t_max } else { t_max / (points - 1) as f64 };
        Self::new(0.0, step, points)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.time(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    UnitAtZero,
}

/// A sampled FID `G(t)`.
///
/// `amplitude_at_zero` is always the unnormalized `G(0)` of the model that
/// produced the series, whether or not the grid contains `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    normalization: Normalization,
    amplitude_at_zero: f64,
}

impl FidSeries {
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        normalization: Normalization,
        amplitude_at_zero: f64,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(FidError::validation(
                "values",
                format!("{} values for {} times", values.len(), times.len()),
            ));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(FidError::validation("times", "must be finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FidError::validation("times", "must be strictly ascending"));
        }
        if normalization == Normalization::UnitAtZero
            && times.first() == Some(&0.0)
            && (values[0] - 1.0).abs() > 1e-12
        {
            return Err(FidError::validation(
                "values",
                format!("normalized series has G(0) = {}", values[0]),
            ));
        }
        Ok(Self { times, values, normalization, amplitude_at_zero })
    }

    pub(crate) fn from_grid(
        grid: &TimeGrid,
        values: Vec<f64>,
        normalization: Normalization,
        amplitude_at_zero: f64,
    ) -> Self {
        debug_assert_eq!(values.len(), grid.count());
        Self { times: grid.times(), values, normalization, amplitude_at_zero }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn amplitude_at_zero(&self) -> f64 {
        self.amplitude_at_zero
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Divides by `G(0)`. Already-normalized series are returned unchanged.
    pub fn normalized(&self) -> Result<FidSeries> {
        match self.normalization {
            Normalization::UnitAtZero => Ok(self.clone()),
            Normalization::Raw => {
                let g0 = self.amplitude_at_zero;
                if g0 == 0.0 || !g0.is_finite() {
                    return Err(FidError::validation(
                        "amplitude_at_zero",
                        format!("cannot normalize by G(0) = {g0}"),
                    ));
                }
                let values = self
                    .times
                    .iter()
                    .zip(&self.values)
                    // exact 1 at t = 0 regardless of rounding in the engine
                    .map(|(&t, &v)| if t == 0.0 { 1.0 } else { v / g0 })
                    .collect();
                Ok(FidSeries {
                    times: self.times.clone(),
                    values,
                    normalization: Normalization::UnitAtZero,
                    amplitude_at_zero: g0,
                })
            }
        }
    }

    /// Largest pointwise `|a - b|` over two series on the same times.
    pub fn max_abs_diff(&self, other: &FidSeries) -> Result<f64> {
        if self.times != other.times {
            return Err(FidError::validation("times", "series are sampled on different times"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Inverse-temperature parameter `beta = hbar * omega0 / (k_B * T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermalSpec {
    beta: f64,
}

impl ThermalSpec {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(FidError::validation("beta", format!("must be positive, got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `beta` from the Larmor angular frequency (rad/s) and temperature (K).
pub fn beta_from_physical(larmor_frequency: f64, temperature: f64) -> Result<ThermalSpec> {
    if !(larmor_frequency.is_finite() && larmor_frequency > 0.0) {
        return Err(FidError::validation("larmor_frequency", "must be positive"));
    }
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(FidError::validation("temperature", "must be positive"));
    }
    ThermalSpec::new(HBAR * larmor_frequency / (BOLTZMANN * temperature))
}
