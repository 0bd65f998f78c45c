//! Banded LDLᵀ factorization of `A − σM` with Sylvester inertia.

use sprs::CsMat;

use crate::error::{Error, Result};

/// `L D Lᵀ` of a symmetric banded matrix, no pivoting.
///
/// Row `i` of the strict lower band is stored at `l[i*p .. (i+1)*p]`, with
/// column `c` at offset `c + p − i`.
#[derive(Debug, Clone)]
pub struct BandedLdl {
    n: usize,
    p: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

/// Largest `|row − col|` over the stored entries.
pub fn half_bandwidth(mat: &CsMat<f64>) -> usize {
    let mut p = 0;
    for (row, vec) in mat.outer_iterator().enumerate() {
        for (col, _) in vec.iter() {
            p = p.max(row.abs_diff(col));
        }
    }
    p
}

impl BandedLdl {
    /// Factors `A − σM`. Both matrices must share the band structure.
    pub fn factor(a: &CsMat<f64>, m: &CsMat<f64>, sigma: f64) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n || m.rows() != n || m.cols() != n {
            return Err(Error::Argument("pencil matrices must be square and of equal size".into()));
        }
        let p = half_bandwidth(a).max(half_bandwidth(m)).max(1);
        let mut l = vec![0.0; n * p];
        let mut d = vec![0.0; n];
        let add = |mat: &CsMat<f64>, scale: f64, l: &mut [f64], d: &mut [f64]| {
            for (row, vec) in mat.outer_iterator().enumerate() {
                for (col, v) in vec.iter() {
                    if col < row {
                        l[row * p + col + p - row] += scale * v;
                    } else if col == row {
                        d[row] += scale * v;
                    }
                }
            }
        };
        add(a, 1.0, &mut l, &mut d);
        add(m, -sigma, &mut l, &mut d);

        // Row i of l holds B_ij on entry and L_ij·D_j after the inner loop, then is scaled.
        for i in 0..n {
            let lo = i.saturating_sub(p);
            let base_i = i * p + p - i;
            for j in lo..i {
                let base_j = j * p + p - j;
                let k0 = lo.max(j.saturating_sub(p));
                let mut s = l[base_i + j];
                for k in k0..j {
                    s -= l[base_i + k] * l[base_j + k];
                }
                l[base_i + j] = s;
            }
            // l[base_i + j] currently stores w_j = L_ij·D_j; convert and accumulate the pivot.
            let mut di = d[i];
            for j in lo..i {
                let w = l[base_i + j];
                let lij = w / d[j];
                di -= w * lij;
                l[base_i + j] = lij;
            }
            if !di.is_finite() || di == 0.0 {
                return Err(Error::Factorization(format!("zero pivot at row {i} for shift {sigma}")));
            }
            d[i] = di;
        }
        Ok(BandedLdl { n, p, l, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of negative pivots: eigenvalues of the pencil below the shift.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.negative_count() == 0
    }

    /// Solves `(A − σM) x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, p) = (self.n, self.p);
        for i in 0..n {
            let lo = i.saturating_sub(p);
            let base = i * p + p - i;
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[base + k] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(p);
            let base = i * p + p - i;
            let xi = x[i];
            for k in lo..i {
                x[k] -= self.l[base + k] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use sprs::TriMat;

    fn tridiag(n: usize, diag: f64, off: f64) -> CsMat<f64> {
        let mut t = TriMat::new((n, n));
        for i in 0..n {
            t.add_triplet(i, i, diag);
            if i + 1 < n {
                t.add_triplet(i, i + 1, off);
                t.add_triplet(i + 1, i, off);
            }
        }
        t.to_csr()
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // Oracle: eigenvalues of tridiag(2, -1) are 2 - 2cos(kπ/(n+1)).
        let n = 20;
        let a = tridiag(n, 2.0, -1.0);
        let m = tridiag(n, 1.0, 0.0);
        for sigma in [0.05, 0.5, 1.3, 2.7, 3.9] {
            let expected = (1..=n)
                .filter(|&k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos() < sigma)
                .count();
            let f = BandedLdl::factor(&a, &m, sigma).unwrap();
            assert_eq!(f.negative_count(), expected, "sigma {sigma}");
        }
    }

    #[test]
    fn solve_matches_dense() {
        let n = 12;
        let mut t = TriMat::new((n, n));
        for i in 0..n {
            t.add_triplet(i, i, 6.0 + i as f64 * 0.1);
            for off in 1..=3 {
                if i + off < n {
                    let v = 1.0 / (1.0 + (i + off) as f64);
                    t.add_triplet(i, i + off, v);
                    t.add_triplet(i + off, i, v);
                }
            }
        }
        let a: CsMat<f64> = t.to_csr();
        let m = tridiag(n, 1.0, 0.2);
        let sigma = 0.7;
        let f = BandedLdl::factor(&a, &m, sigma).unwrap();
        let dense = DMatrix::from_fn(n, n, |i, j| {
            a.get(i, j).copied().unwrap_or(0.0) - sigma * m.get(i, j).copied().unwrap_or(0.0)
        });
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = b.clone();
        f.solve_in_place(&mut x);
        let r = &dense * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(b);
        assert!(r.amax() < 1e-13);
    }
}
