//! Lowest eigenpairs of the pencil `(A, M)` and the bound-state decision.
//!
//! Shift-invert block iteration: the operator `(A − σM)⁻¹M` is applied to a
//! block of `k + 2` vectors, the resulting Krylov space is kept
//! M-orthonormal, and Ritz pairs of `A` are extracted from it. The shift
//! starts at half the threshold and is only ever moved to values where the
//! factorization is positive definite, so no eigenvalue can hide below it.

mod banded;
mod detect;

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretize::{bilinear, matvec, FormPencil, Grid, TruncBc};
use crate::error::{Error, Result};

pub use banded::{half_bandwidth, BandedLdl};
pub use detect::{detect_bound_states, Bracket, Detection, Verdict};

pub const DEFAULT_SEED: u64 = 0x5EED_D1A1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub k: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_cycles: usize,
    /// Upper bound on the subspace dimension per cycle.
    pub max_basis: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            k: 1,
            tol: 1e-8,
            seed: DEFAULT_SEED,
            max_cycles: 60,
            max_basis: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// `‖Av − λMv‖` in the M⁻¹-norm, for M-normalized `v`.
    pub residuals: Vec<f64>,
    pub modes: Vec<Vec<f64>>,
    pub converged: bool,
    pub cycles: usize,
    /// Final shift; the factorization there was positive definite, so it is a lower bound on λ₁.
    pub shift: f64,
    pub threshold: f64,
    pub grid: Grid,
}

impl SpectralResult {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn trunc_bc(&self) -> TruncBc {
        self.grid.trunc_bc
    }

    pub fn count_below(&self, margin: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < self.threshold - margin).count()
    }

    /// `index,lambda,residual,below_threshold`
    pub fn write_csv<W: Write>(&self, out: W, margin: f64) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "lambda", "residual", "below_threshold"])?;
        for (i, (l, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            w.write_record([
                (i + 1).to_string(),
                format!("{l:.15e}"),
                format!("{r:.6e}"),
                (*l < self.threshold - margin).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, margin: f64) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?, margin)
    }
}

/// `s,u,value` on every grid node, constrained nodes included.
pub fn write_mode_csv<W: Write>(p: &FormPencil, mode: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "u", "value"])?;
    for (s, u, v) in p.nodal_field(mode) {
        w.write_record([format!("{s:.10e}"), format!("{u:.10e}"), format!("{v:.10e}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn rayleigh_quotient(p: &FormPencil, v: &[f64]) -> Result<f64> {
    if v.len() != p.len() {
        return Err(Error::Argument(format!("vector has length {}, pencil has {}", v.len(), p.len())));
    }
    let den = bilinear(&p.m, v, v);
    if !(den > 0.0) {
        return Err(Error::Argument("Rayleigh quotient of the zero vector".into()));
    }
    Ok(bilinear(&p.a, v, v) / den)
}

/// `sqrt(rᵀ M⁻¹ r)` via Jacobi-preconditioned conjugate gradients.
pub fn m_inverse_norm(p: &FormPencil, r: &[f64]) -> f64 {
    let n = r.len();
    let diag: Vec<f64> = (0..n).map(|i| p.m.get(i, i).copied().unwrap_or(1.0)).collect();
    let mut x = vec![0.0; n];
    let mut res = r.to_vec();
    let mut z: Vec<f64> = res.iter().zip(&diag).map(|(a, b)| a / b).collect();
    let mut dir = z.clone();
    let mut rz = dot(&res, &z);
    let r0 = dot(r, r).sqrt();
    if r0 == 0.0 {
        return 0.0;
    }
    let mut q = vec![0.0; n];
    for _ in 0..500 {
        matvec(&p.m, &dir, &mut q);
        let alpha = rz / dot(&dir, &q);
        axpy(alpha, &dir, &mut x);
        axpy(-alpha, &q, &mut res);
        if dot(&res, &res).sqrt() <= 1e-13 * r0 {
            break;
        }
        for i in 0..n {
            z[i] = res[i] / diag[i];
        }
        let rz_new = dot(&res, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            dir[i] = z[i] + beta * dir[i];
        }
    }
    dot(r, &x).max(0.0).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Finds a positive-definite factorization of `A − σM` starting from `sigma`,
/// halving the shift when eigenvalues sit below it.
fn factor_below_spectrum(p: &FormPencil, sigma: f64) -> Result<(BandedLdl, f64)> {
    let mut s = sigma;
    let mut last_err = None;
    for attempt in 0..4 {
        if attempt == 3 {
            s = 0.0;
        }
        match BandedLdl::factor(&p.a, &p.m, s) {
            Ok(f) if f.is_positive_definite() => return Ok((f, s)),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
        s *= 0.5;
    }
    Err(last_err.unwrap_or_else(|| Error::Factorization("stiffness matrix is not positive definite".into())))
}

/// M-orthonormal Krylov basis with its block structure.
struct Basis {
    vectors: Vec<Vec<f64>>,
}

impl Basis {
    /// M-orthogonalizes `w` against the basis (two passes) and appends it.
    /// Returns false if `w` was numerically dependent.
    fn push(&mut self, p: &FormPencil, mut w: Vec<f64>, mw: &mut [f64]) -> bool {
        matvec(&p.m, &w, mw);
        let before = dot(&w, mw).sqrt();
        if !(before > 0.0) {
            return false;
        }
        for _ in 0..2 {
            let coeffs: Vec<f64> = self.vectors.iter().map(|v| dot(v, mw)).collect();
            for (v, c) in self.vectors.iter().zip(&coeffs) {
                axpy(-c, v, &mut w);
            }
            matvec(&p.m, &w, mw);
        }
        let norm = dot(&w, mw).sqrt();
        if !(norm > 1e-10 * before) {
            return false;
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        self.vectors.push(w);
        true
    }
}

/// Lowest `k` eigenpairs with the default seed.
pub fn lowest_eigenpairs(p: &FormPencil, k: usize, tol: f64) -> Result<SpectralResult> {
    solve(
        p,
        &SolverOptions {
            k,
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve(p: &FormPencil, opts: &SolverOptions) -> Result<SpectralResult> {
    let n = p.len();
    if opts.k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Argument(format!("tol must be positive, got {}", opts.tol)));
    }
    if opts.k > n {
        return Err(Error::Argument(format!("k = {} exceeds the {n} unknowns", opts.k)));
    }
    let k = opts.k;
    let block = (k + 2).min(n);
    let max_basis = opts.max_basis.max(2 * block).min(n);

    let (mut factor, mut sigma) = factor_below_spectrum(p, 0.5 * p.threshold)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_vec = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };

    let mut start: Vec<Vec<f64>> = (0..block).map(|_| random_vec(&mut rng)).collect();
    let mut mw = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut result = None;

    for cycle in 1..=opts.max_cycles {
        let mut basis = Basis { vectors: Vec::with_capacity(max_basis) };
        for v in start.drain(..) {
            if !basis.push(p, v, &mut mw) {
                let v = random_vec(&mut rng);
                basis.push(p, v, &mut mw);
            }
        }
        let mut last_block: Vec<usize> = (0..basis.vectors.len()).collect();
        while basis.vectors.len() + block <= max_basis {
            let mut next = Vec::with_capacity(block);
            for &j in &last_block {
                matvec(&p.m, &basis.vectors[j], &mut tmp);
                let mut w = tmp.clone();
                factor.solve_in_place(&mut w);
                if basis.push(p, w, &mut mw) {
                    next.push(basis.vectors.len() - 1);
                } else {
                    let v = random_vec(&mut rng);
                    if basis.push(p, v, &mut mw) {
                        next.push(basis.vectors.len() - 1);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            last_block = next;
        }

        // Rayleigh-Ritz on A in the M-orthonormal basis.
        let m = basis.vectors.len();
        let mut h = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            matvec(&p.a, &basis.vectors[j], &mut tmp);
            for i in 0..=j {
                let v = dot(&basis.vectors[i], &tmp);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let keep = block.min(m);
        let mut ritz_vals = Vec::with_capacity(keep);
        let mut ritz_vecs = Vec::with_capacity(keep);
        for &c in order.iter().take(keep) {
            let mut x = vec![0.0; n];
            for (i, v) in basis.vectors.iter().enumerate() {
                axpy(eig.eigenvectors[(i, c)], v, &mut x);
            }
            ritz_vals.push(eig.eigenvalues[c]);
            ritz_vecs.push(x);
        }
        drop(basis);

        let mut residuals = Vec::with_capacity(k);
        for i in 0..k {
            matvec(&p.a, &ritz_vecs[i], &mut tmp);
            matvec(&p.m, &ritz_vecs[i], &mut mw);
            let r: Vec<f64> = tmp.iter().zip(&mw).map(|(a, b)| a - ritz_vals[i] * b).collect();
            residuals.push(m_inverse_norm(p, &r));
        }
        let converged = residuals.iter().all(|&r| r <= opts.tol);
        if converged || cycle == opts.max_cycles {
            result = Some((ritz_vals, ritz_vecs, residuals, converged, cycle));
            break;
        }

        // Pull the shift toward the lowest Ritz value while it stays below the spectrum.
        let theta = ritz_vals[0];
        for frac in [0.1, 0.3, 0.6] {
            let trial = theta - frac * (theta - sigma);
            if trial <= sigma {
                break;
            }
            if let Ok(f) = BandedLdl::factor(&p.a, &p.m, trial) {
                if f.is_positive_definite() {
                    factor = f;
                    sigma = trial;
                    break;
                }
            }
        }
        start = ritz_vecs;
    }

    let (vals, mut vecs, residuals, converged, cycles) = result.expect("at least one cycle runs");
    vecs.truncate(k);
    for v in vecs.iter_mut() {
        let big = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(SpectralResult {
        eigenvalues: vals[..k].to_vec(),
        residuals,
        modes: vecs,
        converged,
        cycles,
        shift: sigma,
        threshold: p.threshold,
        grid: p.grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble, Grid, TruncBc};
    use crate::geometry::{CurvatureProfile, ProfileSpec, StripGeometry};
    use std::f64::consts::PI;

    fn straight_pencil(bc: TruncBc) -> FormPencil {
        let g = StripGeometry::new(1.0, CurvatureProfile::zero()).unwrap();
        assemble(&g, &Grid::new(3.0, 24, 8, bc).unwrap()).unwrap()
    }

    /// Discrete 1D linear-element eigenvalue of -f'' on a uniform grid: 6/h²·(1−cos θ)/(2+cos θ).
    fn fe1d(h: f64, theta: f64) -> f64 {
        6.0 / (h * h) * (1.0 - theta.cos()) / (2.0 + theta.cos())
    }

    #[test]
    fn straight_strip_matches_separable_oracle() {
        // Oracle: separable FE spectrum. Transverse mode: Dirichlet-Neumann, θ = π/(2nu) in the
        // FE discrete sense; longitudinal: Dirichlet modes θ = jπ/ns, Neumann modes θ = (j−1)π/ns.
        let hu = 1.0 / 8.0;
        let hs = 6.0 / 24.0;
        let tr = fe1d(hu, PI / 16.0);
        let p = straight_pencil(TruncBc::Dirichlet);
        let r = lowest_eigenpairs(&p, 3, 1e-9).unwrap();
        assert!(r.converged);
        for j in 1..=3 {
            let expect = tr + fe1d(hs, j as f64 * PI / 24.0);
            assert!((r.eigenvalues[j - 1] - expect).abs() < 1e-9, "{j}: {} vs {expect}", r.eigenvalues[j - 1]);
        }
        let p = straight_pencil(TruncBc::Neumann);
        let r = lowest_eigenpairs(&p, 2, 1e-9).unwrap();
        assert!((r.eigenvalues[0] - tr).abs() < 1e-9);
        assert!((r.eigenvalues[1] - tr - fe1d(hs, PI / 24.0)).abs() < 1e-9);
    }

    #[test]
    fn residuals_orthonormality_and_rayleigh() {
        let prof = CurvatureProfile::new(ProfileSpec::PolyBump { c: 0.3, s0: 1.0 }).unwrap();
        let g = StripGeometry::new(1.0, prof).unwrap();
        let p = assemble(&g, &Grid::new(4.0, 64, 8, TruncBc::Neumann).unwrap()).unwrap();
        let r = lowest_eigenpairs(&p, 3, 1e-9).unwrap();
        assert!(r.converged);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.shift <= r.eigenvalues[0]);
        for i in 0..3 {
            assert!(r.residuals[i] <= 1e-9);
            for j in 0..3 {
                let g = bilinear(&p.m, &r.modes[i], &r.modes[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-8);
            }
        }
        let rq = rayleigh_quotient(&p, &r.modes[0]).unwrap();
        assert!((rq - r.eigenvalues[0]).abs() <= 1e-10 * r.eigenvalues[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let v: Vec<f64> = (0..p.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(rayleigh_quotient(&p, &v).unwrap() >= r.eigenvalues[0] - 1e-10);
        }
        assert!(rayleigh_quotient(&p, &vec![0.0; p.len()]).is_err());
    }

    #[test]
    fn deterministic_and_deep_shift_fallback() {
        // Strong inward bend puts λ₁ well below half the threshold, forcing shift halving.
        let prof = CurvatureProfile::new(ProfileSpec::GaussianBump {
            amplitude: -0.9,
            width: 0.6,
            center: 0.0,
        })
        .unwrap();
        let g = StripGeometry::new(1.0, prof).unwrap();
        let p = assemble(&g, &Grid::new(4.0, 64, 8, TruncBc::Dirichlet).unwrap()).unwrap();
        let a = lowest_eigenpairs(&p, 2, 1e-9).unwrap();
        let b = lowest_eigenpairs(&p, 2, 1e-9).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.modes, b.modes);
        assert!(a.converged);
        assert!(a.eigenvalues[0] < p.threshold);
    }

    #[test]
    fn csv_header() {
        let p = straight_pencil(TruncBc::Neumann);
        let r = lowest_eigenpairs(&p, 1, 1e-9).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf, 1e-3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,lambda,residual,below_threshold\n1,"));
        let mut buf = Vec::new();
        write_mode_csv(&p, &r.modes[0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,u,value\n"));
        assert_eq!(text.lines().count(), 1 + 25 * 9);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = straight_pencil(TruncBc::Neumann);
        assert!(lowest_eigenpairs(&p, 0, 1e-8).is_err());
        assert!(lowest_eigenpairs(&p, 1, 0.0).is_err());
    }
}
