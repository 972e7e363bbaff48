//! Brute-force reference: explicit `2^N x 2^N` operators, exact evolution by
//! spectral decomposition, and multiple-quantum coherence sectors.
//!
//! Basis convention: spin `j` (1-based) is bit `j - 1` of the basis index and
//! a set bit means spin up (`I^z_j = +1/2`).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FidError, Result};
use crate::exec::{compensated_sum, Execution};
use crate::model::{ChainSpec, FidSeries, Normalization, ThermalSpec, TimeGrid};

/// Largest chain the dense engine accepts (4096 x 4096 matrices).
pub const MAX_DENSE_SPINS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;

fn dense_guard(n_spins: usize) -> Result<()> {
    if n_spins < 1 {
        return Err(FidError::validation("n_spins", "must be at least 1"));
    }
    if n_spins > MAX_DENSE_SPINS {
        return Err(FidError::ComputeGuard(format!(
            "dense oracle is limited to N <= {MAX_DENSE_SPINS} (got N = {n_spins}); \
             use the free-fermion engine for longer chains"
        )));
    }
    Ok(())
}

/// Total magnetization `popcount(b) - N/2` of basis state `b`.
fn magnetization(b: usize, n_spins: usize) -> f64 {
    b.count_ones() as f64 - 0.5 * n_spins as f64
}

/// Operator on the full spin Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n_spins: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(n_spins: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        dense_guard(n_spins)?;
        let dim = 1usize << n_spins;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(FidError::DimensionMismatch { left: dim, right: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { n_spins, matrix })
    }

    fn from_real(n_spins: usize, matrix: &DMatrix<f64>) -> Self {
        Self { n_spins, matrix: matrix.map(|x| Complex64::new(x, 0.0)) }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().iter().sum()
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        compensated_sum(self.matrix.iter().map(|z| z.norm_sqr()))
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &DenseOperator) -> Result<Complex64> {
        self.check_same(other)?;
        let n = self.dimension();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let z = self.matrix[(a, b)] * other.matrix[(b, a)];
                re.push(z.re);
                im.push(z.im);
            }
        }
        Ok(Complex64::new(compensated_sum(re), compensated_sum(im)))
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        let prod = Split::from_complex(&self.matrix).mul(&Split::from_complex(&other.matrix));
        Ok(DenseOperator { n_spins: self.n_spins, matrix: prod.to_complex() })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        Ok(DenseOperator { n_spins: self.n_spins, matrix: &self.matrix - &other.matrix })
    }

    fn check_same(&self, other: &DenseOperator) -> Result<()> {
        if self.dimension() != other.dimension() {
            return Err(FidError::DimensionMismatch { left: self.dimension(), right: other.dimension() });
        }
        Ok(())
    }

    fn check_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(FidError::NotHermitian(err));
        }
        Ok(())
    }
}

/// `H = -(D/2) sum_{j=1}^{N-1} (I+_j I+_{j+1} + I-_j I-_{j+1})`.
pub fn build_hamiltonian(chain: &ChainSpec) -> Result<DenseOperator> {
    let n = chain.n_spins();
    dense_guard(n)?;
    Ok(DenseOperator::from_real(n, &hamiltonian_real(chain)))
}

fn hamiltonian_real(chain: &ChainSpec) -> DMatrix<f64> {
    let n = chain.n_spins();
    let dim = 1usize << n;
    let elem = -0.5 * chain.coupling();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        for j in 0..n.saturating_sub(1) {
            let pair = 0b11usize << j;
            // both down -> both up via I+I+, both up -> both down via I-I-
            if b & pair == 0 || b & pair == pair {
                h[(b ^ pair, b)] += elem;
            }
        }
    }
    h
}

/// Total `I_z = sum_j I^z_j` (diagonal).
pub fn build_iz(n_spins: usize) -> Result<DenseOperator> {
    dense_guard(n_spins)?;
    Ok(DenseOperator::from_real(n_spins, &iz_real(n_spins)))
}

fn iz_real(n_spins: usize) -> DMatrix<f64> {
    let dim = 1usize << n_spins;
    DMatrix::from_diagonal(&DVector::from_fn(dim, |b, _| magnetization(b, n_spins)))
}

/// `rho_eq = exp(beta I_z) / Tr exp(beta I_z)`.
pub fn equilibrium_state(n_spins: usize, thermal: &ThermalSpec) -> Result<DenseOperator> {
    dense_guard(n_spins)?;
    Ok(DenseOperator::from_real(n_spins, &equilibrium_real(n_spins, thermal.beta())))
}

fn equilibrium_real(n_spins: usize, beta: f64) -> DMatrix<f64> {
    let dim = 1usize << n_spins;
    let top = 0.5 * n_spins as f64;
    // shifted by the largest magnetization to keep exp bounded
    let weights: Vec<f64> = (0..dim).map(|b| (beta * (magnetization(b, n_spins) - top)).exp()).collect();
    let z = compensated_sum(weights.iter().copied());
    DMatrix::from_diagonal(&DVector::from_iterator(dim, weights.into_iter().map(|w| w / z)))
}

/// Complex matrix stored as separate real parts so products use real GEMM.
#[derive(Clone, Debug)]
struct Split {
    re: DMatrix<f64>,
    im: Option<DMatrix<f64>>,
}

impl Split {
    fn real(re: DMatrix<f64>) -> Self {
        Self { re, im: None }
    }

    fn from_complex(m: &DMatrix<Complex64>) -> Self {
        let re = m.map(|z| z.re);
        let im = if m.iter().any(|z| z.im != 0.0) { Some(m.map(|z| z.im)) } else { None };
        Self { re, im }
    }

    fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.im {
            None => self.re.map(|x| Complex64::new(x, 0.0)),
            Some(im) => self.re.zip_map(im, Complex64::new),
        }
    }

    fn adjoint(&self) -> Self {
        Self { re: self.re.transpose(), im: self.im.as_ref().map(|m| -m.transpose()) }
    }

    fn mul(&self, o: &Split) -> Split {
        let re_re = &self.re * &o.re;
        match (&self.im, &o.im) {
            (None, None) => Split::real(re_re),
            (Some(a), None) => Split { re: re_re, im: Some(a * &o.re) },
            (None, Some(b)) => Split { re: re_re, im: Some(&self.re * b) },
            (Some(a), Some(b)) => Split { re: re_re - a * b, im: Some(&self.re * b + a * &o.re) },
        }
    }
}

/// Eigendecomposition `H = V diag(lambda) V^dagger`, computed once and shared
/// read-only across time points.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    n_spins: usize,
    eigenvalues: Vec<f64>,
    vectors: Split,
}

impl SpectralDecomposition {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        h.check_hermitian()?;
        let split = Split::from_complex(&h.matrix);
        let (eigenvalues, vectors) = match split.im {
            None => {
                let eig = SymmetricEigen::new(split.re);
                (eig.eigenvalues.iter().copied().collect(), Split::real(eig.eigenvectors))
            }
            Some(_) => {
                let eig = SymmetricEigen::new(h.matrix.clone());
                (eig.eigenvalues.iter().copied().collect(), Split::from_complex(&eig.eigenvectors))
            }
        };
        Ok(Self { n_spins: h.n_spins, eigenvalues, vectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |H V - V Lambda|`.
    pub fn residual(&self, h: &DenseOperator) -> Result<f64> {
        if h.dimension() != self.dimension() {
            return Err(FidError::DimensionMismatch { left: h.dimension(), right: self.dimension() });
        }
        let v = self.vectors.to_complex();
        let hv = &h.matrix * &v;
        let mut worst = 0.0f64;
        for c in 0..v.ncols() {
            for r in 0..v.nrows() {
                worst = worst.max((hv[(r, c)] - v[(r, c)] * self.eigenvalues[c]).norm());
            }
        }
        Ok(worst)
    }

    /// `V^dagger A V`
    fn to_eigenbasis(&self, op: &DenseOperator) -> Result<Split> {
        if op.dimension() != self.dimension() {
            return Err(FidError::DimensionMismatch { left: op.dimension(), right: self.dimension() });
        }
        Ok(self.vectors.adjoint().mul(&Split::from_complex(&op.matrix)).mul(&self.vectors))
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect()
    }

    /// Prepares repeated evolution of `rho0`.
    pub fn evolver(&self, rho0: &DenseOperator) -> Result<Evolver<'_>> {
        Ok(Evolver { spectral: self, rotated: self.to_eigenbasis(rho0)?.to_complex() })
    }

    /// `rho(t) = exp(-iHt) rho0 exp(iHt)`.
    pub fn evolve(&self, rho0: &DenseOperator, t: f64) -> Result<DenseOperator> {
        Ok(self.evolver(rho0)?.at(t))
    }

    /// `Tr(exp(-iHt) rho0 exp(iHt) observable)` for each time.
    pub fn correlator(
        &self,
        rho0: &DenseOperator,
        observable: &DenseOperator,
        times: &[f64],
        exec: Execution,
    ) -> Result<Vec<Complex64>> {
        let r = self.to_eigenbasis(rho0)?.to_complex();
        let a = self.to_eigenbasis(observable)?.to_complex();
        let dim = self.dimension();
        // W_ab = R_ab A_ba; G(t) = sum_ab p_a W_ab conj(p_b)
        let w = DMatrix::from_fn(dim, dim, |i, j| r[(i, j)] * a[(j, i)]);
        let direct = rho0.trace_product(observable)?;
        Ok(exec.map(times.len(), |ti| {
            let t = times[ti];
            if t == 0.0 {
                return direct;
            }
            let p = self.phases(t);
            let mut re = Vec::with_capacity(dim);
            let mut im = Vec::with_capacity(dim);
            for (ia, pa) in p.iter().enumerate() {
                let mut row = Complex64::new(0.0, 0.0);
                for (ib, pb) in p.iter().enumerate() {
                    row += w[(ia, ib)] * pb.conj();
                }
                let z = pa * row;
                re.push(z.re);
                im.push(z.im);
            }
            Complex64::new(compensated_sum(re), compensated_sum(im))
        }))
    }
}

/// `rho0` rotated into the eigenbasis, ready for evolution to any time.
pub struct Evolver<'a> {
    spectral: &'a SpectralDecomposition,
    rotated: DMatrix<Complex64>,
}

impl Evolver<'_> {
    pub fn at(&self, t: f64) -> DenseOperator {
        let p = self.spectral.phases(t);
        let dim = p.len();
        let m = DMatrix::from_fn(dim, dim, |a, b| p[a] * self.rotated[(a, b)] * p[b].conj());
        let v = &self.spectral.vectors;
        let out = v.mul(&Split::from_complex(&m)).mul(&v.adjoint());
        DenseOperator { n_spins: self.spectral.n_spins, matrix: out.to_complex() }
    }
}

/// `rho(t) = exp(-iHt) rho0 exp(iHt)`, decomposing `h` on each call.
pub fn evolve(h: &DenseOperator, rho0: &DenseOperator, t: f64) -> Result<DenseOperator> {
    if h.dimension() != rho0.dimension() {
        return Err(FidError::DimensionMismatch { left: h.dimension(), right: rho0.dimension() });
    }
    SpectralDecomposition::new(h)?.evolve(rho0, t)
}

/// The Hamiltonian, `I_z` and the spectral decomposition of one chain.
#[derive(Clone, Debug)]
pub struct OracleEngine {
    chain: ChainSpec,
    hamiltonian: DenseOperator,
    iz: DenseOperator,
    spectral: SpectralDecomposition,
}

impl OracleEngine {
    pub fn new(chain: &ChainSpec) -> Result<Self> {
        let hamiltonian = build_hamiltonian(chain)?;
        let iz = build_iz(chain.n_spins())?;
        let spectral = SpectralDecomposition::new(&hamiltonian)?;
        Ok(Self { chain: *chain, hamiltonian, iz, spectral })
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn hamiltonian(&self) -> &DenseOperator {
        &self.hamiltonian
    }

    pub fn iz(&self) -> &DenseOperator {
        &self.iz
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Complex high-temperature correlator `Tr(rho(t) I_z)`, `rho(0) = I_z`.
    pub fn fid_complex(&self, times: &[f64], exec: Execution) -> Result<Vec<Complex64>> {
        self.spectral.correlator(&self.iz, &self.iz, times, exec)
    }

    /// Raw high-temperature FID with `G(0) = Tr(I_z^2)`.
    pub fn fid(&self, grid: &TimeGrid, exec: Execution) -> Result<FidSeries> {
        let g = self.fid_complex(&grid.times(), exec)?;
        let g0 = self.iz.trace_product(&self.iz)?.re;
        Ok(FidSeries::from_grid(grid, g.iter().map(|z| z.re).collect(), Normalization::Raw, g0))
    }

    /// Raw low-temperature FID with `rho(0) = rho_eq`.
    pub fn thermal_fid(&self, thermal: &ThermalSpec, grid: &TimeGrid, exec: Execution) -> Result<FidSeries> {
        let rho = equilibrium_state(self.chain.n_spins(), thermal)?;
        let g = self.spectral.correlator(&rho, &self.iz, &grid.times(), exec)?;
        let g0 = rho.trace_product(&self.iz)?.re;
        Ok(FidSeries::from_grid(grid, g.iter().map(|z| z.re).collect(), Normalization::Raw, g0))
    }

    /// `rho(t)` for the high-temperature initial state `I_z`.
    pub fn evolve_iz(&self, t: f64) -> Result<DenseOperator> {
        self.spectral.evolve(&self.iz, t)
    }

    /// `Tr([H, I_z][I_z, H]) / Tr(I_z^2)`.
    pub fn commutator_second_moment(&self) -> Result<f64> {
        let hi = self.hamiltonian.mul(&self.iz)?;
        let ih = self.iz.mul(&self.hamiltonian)?;
        let c = hi.sub(&ih)?;
        let c_rev = ih.sub(&hi)?;
        Ok(c.trace_product(&c_rev)?.re / self.iz.trace_product(&self.iz)?.re)
    }
}

/// High-temperature FID `Tr(rho(t) I_z)` with `rho(0) = I_z` (raw).
pub fn fid_oracle(chain: &ChainSpec, grid: &TimeGrid) -> Result<FidSeries> {
    OracleEngine::new(chain)?.fid(grid, Execution::default())
}

/// Low-temperature FID `Tr(exp(-iHt) rho_eq exp(iHt) I_z)` (raw).
pub fn thermal_fid_oracle(chain: &ChainSpec, thermal: &ThermalSpec, grid: &TimeGrid) -> Result<FidSeries> {
    OracleEngine::new(chain)?.thermal_fid(thermal, grid, Execution::default())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceSector {
    /// `||rho_m||_F^2`
    pub weight: f64,
    /// `Tr(rho_m I_z)`
    pub trace_with_iz: Complex64,
    #[serde(skip)]
    pub matrix: Option<DMatrix<Complex64>>,
}

/// Decomposition by coherence order `m = popcount(a) - popcount(b)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceSpectrum {
    pub n_spins: usize,
    pub sectors: BTreeMap<i32, CoherenceSector>,
    /// `||rho||_F^2`
    pub total_weight: f64,
}

impl CoherenceSpectrum {
    pub fn weight(&self, order: i32) -> f64 {
        self.sectors.get(&order).map_or(0.0, |s| s.weight)
    }

    /// Largest weight outside the given orders.
    pub fn max_weight_outside(&self, orders: &[i32]) -> f64 {
        self.sectors
            .iter()
            .filter(|(m, _)| !orders.contains(m))
            .map(|(_, s)| s.weight)
            .fold(0.0, f64::max)
    }
}

pub fn coherence_decompose(rho: &DenseOperator, keep_matrices: bool) -> CoherenceSpectrum {
    let n = rho.n_spins;
    let dim = rho.dimension();
    let mut weights: BTreeMap<i32, Vec<f64>> = (-(n as i32)..=n as i32).map(|m| (m, Vec::new())).collect();
    let mut traces: BTreeMap<i32, Complex64> = BTreeMap::new();
    let mut matrices: BTreeMap<i32, DMatrix<Complex64>> = BTreeMap::new();
    for a in 0..dim {
        for b in 0..dim {
            let z = rho.matrix[(a, b)];
            let m = a.count_ones() as i32 - b.count_ones() as i32;
            weights.get_mut(&m).expect("order in range").push(z.norm_sqr());
            if a == b {
                *traces.entry(m).or_default() += z * magnetization(a, n);
            }
            if keep_matrices {
                matrices.entry(m).or_insert_with(|| DMatrix::zeros(dim, dim))[(a, b)] = z;
            }
        }
    }
    let sectors = weights
        .into_iter()
        .map(|(m, w)| {
            let sector = CoherenceSector {
                weight: compensated_sum(w),
                trace_with_iz: traces.get(&m).copied().unwrap_or_default(),
                matrix: if keep_matrices {
                    Some(matrices.remove(&m).unwrap_or_else(|| DMatrix::zeros(dim, dim)))
                } else {
                    None
                },
            };
            (m, sector)
        })
        .collect();
    CoherenceSpectrum { n_spins: n, sectors, total_weight: rho.frobenius_sq() }
}
