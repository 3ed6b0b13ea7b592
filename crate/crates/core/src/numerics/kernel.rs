//! Nullspaces of real linear maps via one-sided Jacobi SVD.

use super::NumericsError;

const SVD_SWEEP_BUDGET: usize = 80;

/// Dense real matrix, row-major. Used for linear maps written in real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row length mismatch");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(row);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn column_major(&self) -> Vec<Vec<f64>> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).collect())
            .collect()
    }
}

/// Orthonormal nullspace basis with the singular spectrum that produced it.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<f64>>,
    /// Singular values in descending order, `min(rows, cols)` of them.
    pub singular_values: Vec<f64>,
    /// Absolute cutoff `tol · σ_max` below which a singular value counts as zero.
    pub cutoff: f64,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Orthonormal basis of `{v : L v = 0}`.
///
/// A singular value counts as zero iff `σ ≤ tol · σ_max`. When `σ_max = 0`
/// the whole domain is returned.
pub fn real_kernel_basis(l: &RealMatrix, tol: f64) -> Result<KernelBasis, NumericsError> {
    if l.data.iter().any(|x| !x.is_finite()) || !tol.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let n = l.cols;
    if n == 0 {
        return Ok(KernelBasis {
            vectors: Vec::new(),
            singular_values: Vec::new(),
            cutoff: 0.0,
        });
    }
    if l.rows >= n {
        kernel_tall(l, tol)
    } else {
        kernel_wide(l, tol)
    }
}

// rows ≥ cols: orthogonalize the columns of L, accumulate V; kernel = V columns
// paired with vanishing column norms.
fn kernel_tall(l: &RealMatrix, tol: f64) -> Result<KernelBasis, NumericsError> {
    let n = l.cols;
    let mut cols = l.column_major();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    hestenes(&mut cols, Some(&mut v))?;

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let sigma_max = norms.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * sigma_max;
    let mut singular_values = norms.clone();
    singular_values.sort_by(|a, b| b.total_cmp(a));

    let mut vectors: Vec<Vec<f64>> = norms
        .iter()
        .zip(v)
        .filter(|(s, _)| sigma_max == 0.0 || **s <= cutoff)
        .map(|(_, col)| col)
        .collect();
    reorthonormalize(&mut vectors);
    Ok(KernelBasis {
        vectors,
        singular_values,
        cutoff,
    })
}

// rows < cols: orthogonalize the columns of Lᵀ to get a row-space basis, then
// complete it to an orthonormal basis of the domain with Householder reflections.
fn kernel_wide(l: &RealMatrix, tol: f64) -> Result<KernelBasis, NumericsError> {
    let n = l.cols;
    let mut cols = l.transpose().column_major();
    hestenes(&mut cols, None)?;

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let sigma_max = norms.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * sigma_max;
    let mut singular_values = norms.clone();
    singular_values.sort_by(|a, b| b.total_cmp(a));

    let row_space: Vec<Vec<f64>> = if sigma_max == 0.0 {
        Vec::new()
    } else {
        cols.into_iter()
            .zip(&norms)
            .filter(|(_, &s)| s > cutoff)
            .map(|(c, &s)| c.into_iter().map(|x| x / s).collect())
            .collect()
    };
    let vectors = orthogonal_complement(&row_space, n);
    Ok(KernelBasis {
        vectors,
        singular_values,
        cutoff,
    })
}

/// One-sided Jacobi: rotates column pairs until all are mutually orthogonal.
fn hestenes(cols: &mut [Vec<f64>], mut v: Option<&mut Vec<Vec<f64>>>) -> Result<(), NumericsError> {
    let n = cols.len();
    let eps = f64::EPSILON;
    for _ in 0..SVD_SWEEP_BUDGET {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cols, p, q, c, s);
                if let Some(v) = v.as_deref_mut() {
                    rotate(v, p, q, c, s);
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(NumericsError::NoConvergence {
        sweeps: SVD_SWEEP_BUDGET,
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Orthonormal basis of the complement of `span(basis)` in `R^n`.
///
/// `basis` must be orthonormal; the result comes from the trailing columns
/// of the full Householder `Q` of `[basis]`.
fn orthogonal_complement(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let r = basis.len();
    let mut a: Vec<Vec<f64>> = basis.to_vec();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(r);
    for k in 0..r.min(n) {
        let x: Vec<f64> = a[k][k..].to_vec();
        let alpha = -x[0].signum() * norm(&x);
        let mut w = x;
        w[0] -= alpha;
        let wn = norm(&w);
        if wn == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        w.iter_mut().for_each(|x| *x /= wn);
        for col in a.iter_mut().skip(k) {
            let d: f64 = col[k..].iter().zip(&w).map(|(a, b)| a * b).sum();
            col[k..]
                .iter_mut()
                .zip(&w)
                .for_each(|(c, wi)| *c -= 2.0 * d * wi);
        }
        reflectors.push(w);
    }
    // Q e_j for j = r..n, applying H_0 H_1 ... H_{r-1} right to left
    (r..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            for (k, w) in reflectors.iter().enumerate().rev() {
                if w.is_empty() {
                    continue;
                }
                let d: f64 = e[k..].iter().zip(w).map(|(a, b)| a * b).sum();
                e[k..]
                    .iter_mut()
                    .zip(w)
                    .for_each(|(x, wi)| *x -= 2.0 * d * wi);
            }
            e
        })
        .collect()
}

fn reorthonormalize(vectors: &mut [Vec<f64>]) {
    for i in 0..vectors.len() {
        for _ in 0..2 {
            for j in 0..i {
                let d = dot(&vectors[i], &vectors[j]);
                let (head, tail) = vectors.split_at_mut(i);
                tail[0]
                    .iter_mut()
                    .zip(&head[j])
                    .for_each(|(x, y)| *x -= d * y);
            }
        }
        let nrm = norm(&vectors[i]);
        if nrm > 0.0 {
            vectors[i].iter_mut().for_each(|x| *x /= nrm);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
