//! Multi-pulse intensity data: CSV ingestion, conversion of sequence
//! repetitions to evolution time, and a separable least-squares fit of
//! `I(t) = A J0(2Dt)`.

use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::bessel::j0;
use crate::error::{FidError, Result};
use crate::exec::{compensated_sum, Execution};

pub const CSV_HEADER: [&str; 3] = ["tau_us", "cycles", "intensity"];

/// Pulse spacings used in the fluorapatite experiments, microseconds.
pub const REFERENCE_TAUS_US: [f64; 5] = [0.8, 0.82, 0.84, 0.88, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    /// Pulse spacing, seconds.
    pub tau: f64,
    /// Repetitions of the eight-pulse cycle.
    pub cycles: u32,
    pub intensity: f64,
}

impl ExperimentRecord {
    pub fn new(tau: f64, cycles: u32, intensity: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(FidError::validation("tau", format!("must be positive, got {tau}")));
        }
        if cycles < 1 {
            return Err(FidError::validation("cycles", "must be at least 1"));
        }
        if !intensity.is_finite() {
            return Err(FidError::validation("intensity", "must be finite"));
        }
        Ok(Self { tau, cycles, intensity })
    }
}

/// Timing of one period of the pulse sequence.
///
/// The cycle length is not fixed by the sequence diagram alone; the default
/// of `12 tau` (six `tau` and three `2 tau` delays) is a convention and is
/// echoed in every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PulseCycleSpec {
    pub pulses_per_cycle: u32,
    pub cycle_duration_in_tau: f64,
}

impl Default for PulseCycleSpec {
    fn default() -> Self {
        Self { pulses_per_cycle: 8, cycle_duration_in_tau: 12.0 }
    }
}

impl PulseCycleSpec {
    pub fn new(pulses_per_cycle: u32, cycle_duration_in_tau: f64) -> Result<Self> {
        if pulses_per_cycle < 1 {
            return Err(FidError::validation("pulses_per_cycle", "must be at least 1"));
        }
        if !(cycle_duration_in_tau.is_finite() && cycle_duration_in_tau > 0.0) {
            return Err(FidError::validation("cycle_multiplier", "must be positive"));
        }
        Ok(Self { pulses_per_cycle, cycle_duration_in_tau })
    }

    /// Duration of one cycle at pulse spacing `tau`, seconds.
    pub fn cycle_duration(&self, tau: f64) -> f64 {
        self.cycle_duration_in_tau * tau
    }
}

/// Parses `tau_us,cycles,intensity` CSV. Lines starting with `#` are comments.
pub fn ingest_records<R: Read>(source: R) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);
    let header_line = reader.position().line();
    let headers = reader.headers().map_err(|e| csv_error(e, header_line))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != CSV_HEADER {
        return Err(FidError::Parse {
            line: 1,
            message: format!("expected header {:?}, found {:?}", CSV_HEADER.join(","), names.join(",")),
        });
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        let tau_us: f64 = parse_field(field(0), "tau_us", line)?;
        let cycles: i64 = parse_field(field(1), "cycles", line)?;
        let intensity: f64 = parse_field(field(2), "intensity", line)?;
        if cycles < 1 || cycles > u32::MAX as i64 {
            return Err(at_line(FidError::validation("cycles", format!("must be at least 1, got {cycles}")), line));
        }
        let record = ExperimentRecord::new(tau_us * 1e-6, cycles as u32, intensity).map_err(|e| at_line(e, line))?;
        records.push(record);
    }
    Ok(records)
}

fn parse_field<T: std::str::FromStr>(raw: &str, name: &str, line: u64) -> Result<T> {
    raw.parse().map_err(|_| FidError::Parse { line, message: format!("cannot parse {name} from {raw:?}") })
}

fn csv_error(e: csv::Error, fallback_line: u64) -> FidError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    FidError::Parse { line, message: e.to_string() }
}

fn at_line(e: FidError, line: u64) -> FidError {
    match e {
        FidError::Validation { field, message } => FidError::Validation { field, message: format!("{message} (line {line})") },
        other => other,
    }
}

/// Records grouped by pulse spacing, ascending in `tau`.
pub fn tau_groups(records: &[ExperimentRecord]) -> Vec<(f64, Vec<ExperimentRecord>)> {
    let mut groups: Vec<(f64, Vec<ExperimentRecord>)> = Vec::new();
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    for r in sorted {
        match groups.last_mut() {
            Some((tau, members)) if *tau == r.tau => members.push(r),
            _ => groups.push((r.tau, vec![r])),
        }
    }
    groups
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimedPoint {
    /// Evolution time, seconds.
    pub t: f64,
    pub intensity: f64,
}

/// `t = cycles * cycle_duration_in_tau * tau`, stably sorted by `t`.
pub fn map_time(records: &[ExperimentRecord], cycle: &PulseCycleSpec) -> Vec<TimedPoint> {
    let mut points: Vec<TimedPoint> = records
        .iter()
        .map(|r| TimedPoint { t: r.cycles as f64 * cycle.cycle_duration(r.tau), intensity: r.intensity })
        .collect();
    points.sort_by(|a, b| a.t.total_cmp(&b.t));
    points
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SearchInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0) {
            return Err(FidError::validation("d_min", "search bounds must be positive and finite"));
        }
        if hi <= lo {
            return Err(FidError::validation("d_max", format!("empty search interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// Fitted coupling `D`, rad/s.
    pub d_estimate: f64,
    pub amplitude: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    pub d_search_interval: (f64, f64),
    /// Minimum sits on a search bound, so the true optimum may lie outside.
    pub unbracketed: bool,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    d: f64,
    amplitude: f64,
    ssr: f64,
}

fn evaluate(points: &[TimedPoint], d: f64) -> Candidate {
    let basis: Vec<f64> = points.iter().map(|p| j0(2.0 * d * p.t)).collect();
    let num = compensated_sum(points.iter().zip(&basis).map(|(p, b)| p.intensity * b));
    let den = compensated_sum(basis.iter().map(|b| b * b));
    let amplitude = if den > 0.0 { num / den } else { 0.0 };
    let ssr = compensated_sum(points.iter().zip(&basis).map(|(p, b)| {
        let r = p.intensity - amplitude * b;
        r * r
    }));
    Candidate { d, amplitude, ssr }
}

/// Relative width at which the golden-section refinement stops.
pub const FIT_RELATIVE_WIDTH: f64 = 1e-6;

/// Separable least squares for `I(t) = A J0(2Dt)`.
///
/// For any `D` the optimal amplitude is linear and solved in closed form.
/// `D` is located by a uniform scan fine enough to resolve the oscillations
/// of the residual (it is not unimodal over wide intervals), then refined by
/// golden-section search around the best scan point.
pub fn fit_fid(points: &[TimedPoint], search: SearchInterval) -> Result<FitResult> {
    fit_fid_with(points, search, Execution::default())
}

pub fn fit_fid_with(points: &[TimedPoint], search: SearchInterval, exec: Execution) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(FidError::validation("points", format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.t.is_finite() && p.intensity.is_finite())) {
        return Err(FidError::validation("points", "non-finite time or intensity"));
    }
    let t_max = points.iter().map(|p| p.t.abs()).fold(0.0, f64::max);
    // The residual oscillates in D with period ~ pi / (2 t_max); sample each
    // period at least eight times.
    let per_period = (search.hi - search.lo) * 2.0 * t_max / std::f64::consts::PI;
    let scan = ((8.0 * per_period).ceil() as usize).clamp(64, 200_000);
    let step = (search.hi - search.lo) / scan as f64;
    let grid: Vec<Candidate> = exec.map(scan + 1, |i| {
        let d = if i == scan { search.hi } else { search.lo + i as f64 * step };
        evaluate(points, d)
    });
    let best_idx = argmin(&grid);

    let lo = if best_idx == 0 { search.lo } else { grid[best_idx - 1].d };
    let hi = if best_idx == scan { search.hi } else { grid[best_idx + 1].d };
    let mut best = grid[best_idx];
    golden_section(points, lo, hi, &mut best);

    let tol = FIT_RELATIVE_WIDTH * best.d.abs();
    let unbracketed = (best.d - search.lo).abs() <= tol || (search.hi - best.d).abs() <= tol;
    Ok(FitResult {
        d_estimate: best.d,
        amplitude: best.amplitude,
        rms_residual: (best.ssr / points.len() as f64).sqrt(),
        n_points: points.len(),
        d_search_interval: (search.lo, search.hi),
        unbracketed,
    })
}

fn argmin(c: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, x) in c.iter().enumerate() {
        if x.ssr < c[best].ssr {
            best = i;
        }
    }
    best
}

/// Shrinks `[lo, hi]` to relative width [`FIT_RELATIVE_WIDTH`], keeping the
/// best evaluated candidate in `best`.
fn golden_section(points: &[TimedPoint], mut lo: f64, mut hi: f64, best: &mut Candidate) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = evaluate(points, x1);
    let mut f2 = evaluate(points, x2);
    let keep = |c: Candidate, best: &mut Candidate| {
        if c.ssr < best.ssr {
            *best = c;
        }
    };
    keep(f1, best);
    keep(f2, best);
    for _ in 0..200 {
        if hi - lo <= FIT_RELATIVE_WIDTH * 0.5 * (lo + hi).abs() {
            break;
        }
        if f1.ssr < f2.ssr {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = evaluate(points, x1);
            keep(f1, best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = evaluate(points, x2);
            keep(f2, best);
        }
    }
}

/// Residual sum of squares at a given `D` with its optimal amplitude.
pub fn residual_at(points: &[TimedPoint], d: f64) -> f64 {
    evaluate(points, d).ssr
}

/// Synthetic multi-pulse data `A J0(2Dt)` plus Gaussian noise of standard
/// deviation `noise_sigma * A`, for the reference spacings and `1..=max_cycles`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub d: f64,
    pub amplitude: f64,
    pub max_cycles: u32,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { d: 15.5e3, amplitude: 1.0, max_cycles: 64, noise_sigma: 0.0, seed: 0 }
    }
}

pub fn synthetic_records(spec: &SyntheticSpec, cycle: &PulseCycleSpec) -> Result<Vec<ExperimentRecord>> {
    if !(spec.noise_sigma >= 0.0 && spec.noise_sigma.is_finite()) {
        return Err(FidError::validation("noise", "must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sigma * spec.amplitude.abs())
        .map_err(|e| FidError::validation("noise", e.to_string()))?;
    let mut out = Vec::new();
    for tau_us in REFERENCE_TAUS_US {
        let tau = tau_us * 1e-6;
        for cycles in 1..=spec.max_cycles {
            let t = cycles as f64 * cycle.cycle_duration(tau);
            let clean = spec.amplitude * j0(2.0 * spec.d * t);
            let value = if spec.noise_sigma > 0.0 { clean + noise.sample(&mut rng) } else { clean };
            out.push(ExperimentRecord::new(tau, cycles, value)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest_single_row() {
        let r = ingest_records("tau_us,cycles,intensity\n0.8,1,1.00\n".as_bytes()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].tau - 8e-7).abs() < 1e-22);
        assert_eq!((r[0].cycles, r[0].intensity), (1, 1.0));
    }

    #[test]
    fn ingest_comments_and_whitespace() {
        let text = "# fluorapatite run\ntau_us,cycles,intensity\n# tau 0.8\n 0.8 , 2 , 0.5\n";
        let r = ingest_records(text.as_bytes()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].cycles, 2);
    }

    #[test]
    fn ingest_rejects_zero_cycles() {
        let e = ingest_records("tau_us,cycles,intensity\n0.8,1,1.0\n0.8,0,0.5\n".as_bytes()).unwrap_err();
        match e {
            FidError::Validation { field, message } => {
                assert_eq!(field, "cycles");
                assert!(message.contains("line 3"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            ingest_records("tau_us,cycles,intensity\n-0.8,1,0.5\n".as_bytes()),
            Err(FidError::Validation { field: "tau", .. })
        ));
    }

    #[test]
    fn ingest_reports_line_of_malformed_row() {
        let e = ingest_records("tau_us,cycles,intensity\n0.8,1,1.0\n0.8,x,0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(e, FidError::Parse { line: 3, .. }), "{e:?}");
        let e = ingest_records("tau_us,cycles,intensity\n0.8,1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, FidError::Parse { line: 2, .. }), "{e:?}");
        let e = ingest_records("tau,cycles,intensity\n0.8,1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, FidError::Parse { line: 1, .. }), "{e:?}");
    }

    #[test]
    fn five_tau_groups() {
        let mut text = String::from("tau_us,cycles,intensity\n");
        for tau in REFERENCE_TAUS_US {
            for c in 1..=3 {
                text.push_str(&format!("{tau},{c},0.5\n"));
            }
        }
        let groups = tau_groups(&ingest_records(text.as_bytes()).unwrap());
        assert_eq!(groups.len(), 5);
        assert!(groups.iter().all(|(_, g)| g.len() == 3));
    }

    #[test]
    fn time_mapping() {
        let cycle = PulseCycleSpec::default();
        let r = [ExperimentRecord::new(1e-6, 1, 1.0).unwrap(), ExperimentRecord::new(0.8e-6, 64, 0.1).unwrap()];
        let p = map_time(&r, &cycle);
        assert!((p[0].t - 12e-6).abs() < 1e-18);
        assert!((p[1].t - 614.4e-6).abs() < 1e-15);
        let ten = map_time(&r, &PulseCycleSpec::new(8, 10.0).unwrap());
        assert!((ten[0].t - 10e-6).abs() < 1e-18);
    }

    #[test]
    fn map_time_is_stably_sorted() {
        let r = [
            ExperimentRecord::new(1e-6, 2, 1.0).unwrap(),
            ExperimentRecord::new(2e-6, 1, 2.0).unwrap(),
            ExperimentRecord::new(1e-6, 1, 3.0).unwrap(),
        ];
        let p = map_time(&r, &PulseCycleSpec::default());
        let i: Vec<f64> = p.iter().map(|x| x.intensity).collect();
        assert_eq!(i, vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn fit_input_errors() {
        let s = SearchInterval::new(1e3, 1e5).unwrap();
        let two = [TimedPoint { t: 1e-5, intensity: 1.0 }, TimedPoint { t: 2e-5, intensity: 0.9 }];
        assert!(fit_fid(&two, s).is_err());
        assert!(SearchInterval::new(1e5, 1e3).is_err());
        assert!(SearchInterval::new(0.0, 1e3).is_err());
        assert!(SearchInterval::new(5.0, 5.0).is_err());
    }

    #[test]
    fn noiseless_recovery() {
        let cycle = PulseCycleSpec::default();
        let pts = map_time(&synthetic_records(&SyntheticSpec::default(), &cycle).unwrap(), &cycle);
        let fit = fit_fid(&pts, SearchInterval::new(1e3, 1e5).unwrap()).unwrap();
        assert!((fit.d_estimate / 15.5e3 - 1.0).abs() < 1e-4, "{fit:?}");
        assert!((fit.amplitude - 1.0).abs() < 1e-4);
        assert!(!fit.unbracketed);
        assert_eq!(fit.n_points, 320);
    }

    #[test]
    fn unbracketed_flag() {
        let cycle = PulseCycleSpec::default();
        let pts = map_time(&synthetic_records(&SyntheticSpec::default(), &cycle).unwrap(), &cycle);
        let fit = fit_fid(&pts, SearchInterval::new(1.6e4, 1.7e4).unwrap()).unwrap();
        assert!(fit.unbracketed, "{fit:?}");
    }

    #[test]
    fn synthetic_is_reproducible() {
        let cycle = PulseCycleSpec::default();
        let spec = SyntheticSpec { noise_sigma: 0.02, seed: 9, ..Default::default() };
        assert_eq!(synthetic_records(&spec, &cycle).unwrap(), synthetic_records(&spec, &cycle).unwrap());
    }
}
