//! Small sparse-matrix helpers on top of `sprs` CSR matrices.

use nalgebra::DMatrix;
use sprs::{CsMat, TriMat};

pub type Matrix = CsMat<f64>;

pub fn identity(n: usize) -> Matrix {
    CsMat::eye(n)
}

pub fn diag(d: &[f64]) -> Matrix {
    let n = d.len();
    let mut t = TriMat::new((n, n));
    for (i, &v) in d.iter().enumerate() {
        if v != 0.0 {
            t.add_triplet(i, i, v);
        }
    }
    t.to_csr()
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    CsMat::zero((rows, cols))
}

pub fn scale(a: &Matrix, c: f64) -> Matrix {
    a.map(|x| x * c)
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a + b
}

pub fn sub(a: &Matrix, b: &Matrix) -> Matrix {
    a - b
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    a * b
}

/// `diag(left) · A · diag(right)`.
pub fn scale_rows_cols(a: &Matrix, left: &[f64], right: &[f64]) -> Matrix {
    let mut t = TriMat::new(a.shape());
    for (v, (i, j)) in a.iter() {
        let x = left[i] * v * right[j];
        if x != 0.0 {
            t.add_triplet(i, j, x);
        }
    }
    t.to_csr()
}

/// Keeps the entries whose row and column pass the masks.
pub fn mask(a: &Matrix, rows: &[bool], cols: &[bool]) -> Matrix {
    let mut t = TriMat::new(a.shape());
    for (&v, (i, j)) in a.iter() {
        if rows[i] && cols[j] && v != 0.0 {
            t.add_triplet(i, j, v);
        }
    }
    t.to_csr()
}

pub fn transpose(a: &Matrix) -> Matrix {
    a.transpose_view().to_csr()
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.data().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn matvec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    for (i, row) in a.outer_iterator().enumerate() {
        y[i] = row.iter().map(|(j, v)| v * x[j]).sum();
    }
    y
}

pub fn matvec_t(a: &Matrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.cols()];
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, v) in row.iter() {
            y[j] += v * x[i];
        }
    }
    y
}

/// Dense copy of the nonzero rows/columns of `a`, with the kept indices.
pub fn dense_support(a: &Matrix) -> (DMatrix<f64>, Vec<usize>, Vec<usize>) {
    let mut rows: Vec<usize> = Vec::new();
    let mut cols: Vec<usize> = Vec::new();
    for (_, (i, j)) in a.iter() {
        rows.push(i);
        cols.push(j);
    }
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (&v, (i, j)) in a.iter() {
        let r = rows.binary_search(&i).unwrap();
        let c = cols.binary_search(&j).unwrap();
        m[(r, c)] += v;
    }
    (m, rows, cols)
}

/// Largest singular value, computed exactly: `AᵀA` splits into connected
/// components (the represented operators conserve weights, so these stay
/// small) and each is diagonalised densely.
pub fn op_norm(a: &Matrix) -> f64 {
    if a.nnz() == 0 {
        return 0.0;
    }
    let gram = mul(&transpose(a), a);
    let n = gram.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut touched = vec![false; n];
    for (_, (i, j)) in gram.iter() {
        touched[i] = true;
        touched[j] = true;
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
        }
    }
    let mut comps: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for i in (0..n).filter(|&i| touched[i]) {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    let mut best = 0.0f64;
    for idx in comps.values() {
        let k = idx.len();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for (r, &i) in idx.iter().enumerate() {
            if let Some(row) = gram.outer_view(i) {
                for (j, v) in row.iter() {
                    if let Ok(c) = idx.binary_search(&j) {
                        m[(r, c)] += v;
                    }
                }
            }
        }
        let top = m.symmetric_eigenvalues().iter().fold(0.0f64, |x, &y| x.max(y));
        best = best.max(top);
    }
    best.sqrt()
}
