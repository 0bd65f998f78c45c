//! Q1 finite-element discretization of the strip's quadratic form
//!
//! `q₀(f, f) = ∫∫ |∂ₛf|²/(1 − uγ) + (1 − uγ)|∂ᵤf|² ds du`
//!
//! with mass weight `(1 − uγ)` on the truncated rectangle `[−L, L] × [0, d]`.
//! The edge `u = 0` carries an essential Dirichlet condition, `u = d` is
//! natural (Neumann), and the cuts `s = ±L` are Dirichlet or Neumann
//! depending on [`TruncBc`], which brackets the eigenvalues of the infinite
//! strip from above and below.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sprs::CsMat;

use crate::error::{Error, Result};
use crate::geometry::{ProfileSpec, StripGeometry};

pub use crate::geometry::threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncBc {
    Dirichlet,
    Neumann,
}

impl TruncBc {
    pub fn as_str(self) -> &'static str {
        match self {
            TruncBc::Dirichlet => "dirichlet",
            TruncBc::Neumann => "neumann",
        }
    }
}

/// Uniform tensor grid on `[−L, L] × [0, d]` with `ns × nu` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_length: f64,
    pub ns: usize,
    pub nu: usize,
    pub trunc_bc: TruncBc,
}

impl Grid {
    pub fn new(half_length: f64, ns: usize, nu: usize, trunc_bc: TruncBc) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::Argument(format!("L must be positive, got {half_length}")));
        }
        if ns < 4 || nu < 4 {
            return Err(Error::Argument(format!("need ns, nu >= 4, got {ns} x {nu}")));
        }
        Ok(Grid {
            half_length,
            ns,
            nu,
            trunc_bc,
        })
    }

    pub fn hs(&self) -> f64 {
        2.0 * self.half_length / self.ns as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        -self.half_length + self.hs() * i as f64
    }

    pub fn refined(&self) -> Grid {
        Grid {
            ns: 2 * self.ns,
            nu: 2 * self.nu,
            ..*self
        }
    }

    pub fn with_bc(&self, trunc_bc: TruncBc) -> Grid {
        Grid { trunc_bc, ..*self }
    }

    /// Same cell size on a domain of twice the length.
    pub fn doubled_length(&self) -> Grid {
        Grid {
            half_length: 2.0 * self.half_length,
            ns: 2 * self.ns,
            ..*self
        }
    }
}

/// Node ↔ unknown numbering; `u` runs fastest so the half-bandwidth is `nu + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofMap {
    pub ns: usize,
    pub nu: usize,
    first_column: usize,
    columns: usize,
}

impl DofMap {
    fn new(grid: &Grid) -> Self {
        let (first_column, columns) = match grid.trunc_bc {
            TruncBc::Neumann => (0, grid.ns + 1),
            TruncBc::Dirichlet => (1, grid.ns - 1),
        };
        DofMap {
            ns: grid.ns,
            nu: grid.nu,
            first_column,
            columns,
        }
    }

    pub fn len(&self) -> usize {
        self.columns * self.nu
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unknown index of node `(i, j)`, or `None` for a constrained node.
    pub fn dof(&self, i: usize, j: usize) -> Option<usize> {
        if j == 0 || j > self.nu || i < self.first_column || i >= self.first_column + self.columns {
            return None;
        }
        Some((i - self.first_column) * self.nu + (j - 1))
    }

    pub fn node(&self, dof: usize) -> (usize, usize) {
        (dof / self.nu + self.first_column, dof % self.nu + 1)
    }

    pub fn half_bandwidth(&self) -> usize {
        self.nu + 1
    }
}

/// Stiffness/mass pencil `(A, M)` of the truncated strip.
#[derive(Debug, Clone)]
pub struct FormPencil {
    pub a: CsMat<f64>,
    pub m: CsMat<f64>,
    pub dof_map: DofMap,
    pub grid: Grid,
    pub d: f64,
    pub threshold: f64,
}

const GAUSS3_X: [f64; 3] = [
    0.5 - 0.387_298_334_620_741_7,
    0.5,
    0.5 + 0.387_298_334_620_741_7,
];
const GAUSS3_W: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// Narrowest curvature feature of the profile, used to check that the grid resolves it.
fn feature_width(spec: &ProfileSpec) -> Option<f64> {
    match spec {
        ProfileSpec::Zero | ProfileSpec::Tabulated { .. } => None,
        ProfileSpec::GaussianBump { width, .. } => Some(2.0 * width),
        ProfileSpec::PolyBump { s0, .. } | ProfileSpec::SBend { s0, .. } => Some(2.0 * s0),
        ProfileSpec::TwoBump { s1, s2, s3, s4, .. } => Some((s2 - s1).min(s4 - s3)),
    }
}

/// Assembles the pencil with 3×3 Gauss quadrature per cell.
pub fn assemble(g: &StripGeometry, grid: &Grid) -> Result<FormPencil> {
    g.require_valid()?;
    let hs = grid.hs();
    let hu = g.d / grid.nu as f64;
    if let Some(w) = feature_width(g.profile.spec()) {
        if w / hs < 8.0 {
            return Err(Error::Argument(format!(
                "grid does not resolve the curvature: {:.2} cells across a feature of width {w}",
                w / hs
            )));
        }
    }
    let (dlo, dhi) = g.profile.domain();
    if -grid.half_length < dlo || grid.half_length > dhi {
        return Err(Error::Domain(format!(
            "truncated strip [-{0}, {0}] leaves the profile's tabulated range",
            grid.half_length
        )));
    }
    let map = DofMap::new(grid);
    let n = map.len();

    // local node k ↔ (di, dj) = (k & 1, k >> 1)
    let shape = |x: f64, k: usize| if k == 0 { 1.0 - x } else { x };
    let dshape = |k: usize| if k == 0 { -1.0 } else { 1.0 };

    let mut a_trip: Vec<(usize, usize, f64)> = Vec::with_capacity(16 * grid.ns * grid.nu);
    let mut m_trip: Vec<(usize, usize, f64)> = Vec::with_capacity(16 * grid.ns * grid.nu);
    for ic in 0..grid.ns {
        let s0 = grid.s(ic);
        let gam: [f64; 3] = std::array::from_fn(|p| g.profile.gamma(s0 + hs * GAUSS3_X[p]));
        for jc in 0..grid.nu {
            let u0 = hu * jc as f64;
            let mut ke = [[0.0; 4]; 4];
            let mut me = [[0.0; 4]; 4];
            for p in 0..3 {
                for q in 0..3 {
                    let xi = GAUSS3_X[p];
                    let eta = GAUSS3_X[q];
                    let u = u0 + hu * eta;
                    let w = 1.0 - u * gam[p];
                    if !(w > 0.0) {
                        return Err(Error::Metric(format!("1 - u*gamma = {w} at s = {}, u = {u}", s0 + hs * xi)));
                    }
                    let jw = GAUSS3_W[p] * GAUSS3_W[q] * hs * hu;
                    for a in 0..4 {
                        let (ai, aj) = (a & 1, a >> 1);
                        let na = shape(xi, ai) * shape(eta, aj);
                        let dsa = dshape(ai) / hs * shape(eta, aj);
                        let dua = shape(xi, ai) * dshape(aj) / hu;
                        for b in a..4 {
                            let (bi, bj) = (b & 1, b >> 1);
                            let nb = shape(xi, bi) * shape(eta, bj);
                            let dsb = dshape(bi) / hs * shape(eta, bj);
                            let dub = shape(xi, bi) * dshape(bj) / hu;
                            ke[a][b] += jw * (dsa * dsb / w + w * dua * dub);
                            me[a][b] += jw * w * na * nb;
                        }
                    }
                }
            }
            let dofs: [Option<usize>; 4] = std::array::from_fn(|k| map.dof(ic + (k & 1), jc + (k >> 1)));
            for a in 0..4 {
                let Some(ra) = dofs[a] else { continue };
                for b in 0..4 {
                    let Some(rb) = dofs[b] else { continue };
                    let (lo, hi) = (a.min(b), a.max(b));
                    a_trip.push((ra, rb, ke[lo][hi]));
                    m_trip.push((ra, rb, me[lo][hi]));
                }
            }
        }
    }
    Ok(FormPencil {
        a: csr_from_triplets(n, a_trip),
        m: csr_from_triplets(n, m_trip),
        dof_map: map,
        grid: *grid,
        d: g.d,
        threshold: g.threshold,
    })
}

/// Stable sort by position, then sum duplicates in element order, so mirrored
/// entries receive bitwise identical sums.
fn csr_from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> CsMat<f64> {
    trip.sort_by_key(|&(r, c, _)| (r, c));
    let mut indptr = vec![0usize; n + 1];
    let mut indices = Vec::with_capacity(trip.len() / 2);
    let mut data: Vec<f64> = Vec::with_capacity(trip.len() / 2);
    let mut last: Option<(usize, usize)> = None;
    for (r, c, v) in trip {
        if last == Some((r, c)) {
            *data.last_mut().expect("entry exists") += v;
        } else {
            indices.push(c);
            data.push(v);
            indptr[r + 1] = indices.len();
            last = Some((r, c));
        }
    }
    for r in 0..n {
        indptr[r + 1] = indptr[r + 1].max(indptr[r]);
    }
    CsMat::new((n, n), indptr, indices, data)
}

/// `y = A x` for a CSR matrix.
pub fn matvec(mat: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    for (row, vec) in mat.outer_iterator().enumerate() {
        let mut acc = 0.0;
        for (col, v) in vec.iter() {
            acc += v * x[col];
        }
        y[row] = acc;
    }
}

/// `xᵀ A y`
pub fn bilinear(mat: &CsMat<f64>, x: &[f64], y: &[f64]) -> f64 {
    let mut total = 0.0;
    for (row, vec) in mat.outer_iterator().enumerate() {
        let mut acc = 0.0;
        for (col, v) in vec.iter() {
            acc += v * y[col];
        }
        total += x[row] * acc;
    }
    total
}

/// Largest `|A_ij − A_ji|`.
pub fn asymmetry(mat: &CsMat<f64>) -> f64 {
    let mut worst = 0.0f64;
    for (row, vec) in mat.outer_iterator().enumerate() {
        for (col, v) in vec.iter() {
            let t = mat.get(col, row).copied().unwrap_or(0.0);
            worst = worst.max((v - t).abs());
        }
    }
    worst
}

/// Writes one `row col value` line per stored entry.
pub fn write_triplets<W: Write>(mat: &CsMat<f64>, mut out: W) -> Result<()> {
    writeln!(out, "row col value")?;
    for (row, vec) in mat.outer_iterator().enumerate() {
        for (col, v) in vec.iter() {
            writeln!(out, "{row} {col} {v:e}")?;
        }
    }
    Ok(())
}

impl FormPencil {
    pub fn len(&self) -> usize {
        self.dof_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hu(&self) -> f64 {
        self.d / self.grid.nu as f64
    }

    /// Coordinates `(s, u)` of an unknown.
    pub fn coords(&self, dof: usize) -> (f64, f64) {
        let (i, j) = self.dof_map.node(dof);
        (self.grid.s(i), self.hu() * j as f64)
    }

    /// Nodal interpolant of `f` on the free nodes.
    pub fn interpolate<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (s, u) = self.coords(k);
                f(s, u)
            })
            .collect()
    }

    /// `(s, u, value)` on every grid node; constrained nodes carry zero.
    pub fn nodal_field(&self, v: &[f64]) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity((self.grid.ns + 1) * (self.grid.nu + 1));
        for i in 0..=self.grid.ns {
            for j in 0..=self.grid.nu {
                let value = self.dof_map.dof(i, j).map_or(0.0, |k| v[k]);
                out.push((self.grid.s(i), self.hu() * j as f64, value));
            }
        }
        out
    }

    pub fn dump(&self, dir: &Path) -> Result<()> {
        write_triplets(&self.a, std::io::BufWriter::new(std::fs::File::create(dir.join("pencil_A.txt"))?))?;
        write_triplets(&self.m, std::io::BufWriter::new(std::fs::File::create(dir.join("pencil_M.txt"))?))?;
        Ok(())
    }
}
