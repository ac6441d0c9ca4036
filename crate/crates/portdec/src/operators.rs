//! Matrix representations of the discrete differential operators.
//!
//! The primal exterior derivative D^k is the transpose of the incidence
//! matrix between (k+1)- and k-simplices; the trace T^k selects boundary
//! k-simplices. The dual derivative splits into an interior and a boundary
//! part which, with identity wedge weights, are exact (signed) transposes:
//!
//! ```text
//!   Di^{n-k} = (-1)^k     (D^{k-1})^T
//!   Db^{n-k} = (-1)^{k-1} (T^{k-1})^T
//! ```
//!
//! Hodge stars are diagonal ratios of dual to primal measures and therefore
//! strictly positive on a well-centered complex.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::complex::SimplicialComplex;
use crate::dual::DualComplex;
use crate::error::OperatorError;

/// Signed integer triplets of a sparse matrix, for exact arithmetic checks
/// and coordinate export.
pub type IntTriplets = Vec<(usize, usize, i64)>;

/// Assemble the primal exterior derivative D^k (rows: (k+1)-simplices).
pub fn assemble_derivative(
    complex: &SimplicialComplex,
    k: usize,
) -> Result<CsrMatrix<f64>, OperatorError> {
    let trip = derivative_triplets(complex, k)?;
    Ok(from_triplets(
        complex.count(k + 1),
        complex.count(k),
        &trip,
    ))
}

/// Integer triplets of D^k.
pub fn derivative_triplets(
    complex: &SimplicialComplex,
    k: usize,
) -> Result<IntTriplets, OperatorError> {
    if k >= complex.dim() {
        return Err(OperatorError::DegreeOutOfRange {
            degree: k,
            dim: complex.dim(),
        });
    }
    let upper = complex.simplices(k + 1);
    let mut trip = Vec::new();
    for (row, faces) in upper.faces.iter().enumerate() {
        for &(col, sign) in faces {
            trip.push((row, col, sign as i64));
        }
    }
    Ok(trip)
}

/// Assemble the trace T^k selecting boundary k-simplices (one 1 per row).
pub fn assemble_trace(
    complex: &SimplicialComplex,
    k: usize,
) -> Result<CsrMatrix<f64>, OperatorError> {
    let trip = trace_triplets(complex, k)?;
    Ok(from_triplets(
        complex.boundary_count(k),
        complex.count(k),
        &trip,
    ))
}

/// Integer triplets of T^k.
pub fn trace_triplets(
    complex: &SimplicialComplex,
    k: usize,
) -> Result<IntTriplets, OperatorError> {
    if k >= complex.dim() {
        return Err(OperatorError::DegreeOutOfRange {
            degree: k,
            dim: complex.dim(),
        });
    }
    Ok(complex
        .boundary(k)
        .iter()
        .enumerate()
        .map(|(row, &col)| (row, col, 1i64))
        .collect())
}

/// Assemble the dual derivative pair (Di^{n-k}, Db^{n-k}) for primal degree
/// k in 1..=n, by the transpose identities.
pub fn assemble_dual_derivatives(
    complex: &SimplicialComplex,
    k: usize,
) -> Result<(CsrMatrix<f64>, CsrMatrix<f64>), OperatorError> {
    if k == 0 || k > complex.dim() {
        return Err(OperatorError::DegreeOutOfRange {
            degree: k,
            dim: complex.dim(),
        });
    }
    let d = assemble_derivative(complex, k - 1)?;
    let t = assemble_trace(complex, k - 1)?;
    let si = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sb = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let di = scale(&d.transpose(), si);
    let db = scale(&t.transpose(), sb);
    Ok((di, db))
}

/// Diagonal Hodge star M^k: entries |⋆_i σ^k| / |σ^k|, all positive.
pub fn assemble_hodge(
    complex: &SimplicialComplex,
    dual: &DualComplex,
    k: usize,
) -> Result<DVector<f64>, OperatorError> {
    if k > complex.dim() {
        return Err(OperatorError::DegreeOutOfRange {
            degree: k,
            dim: complex.dim(),
        });
    }
    let mut diag = DVector::zeros(complex.count(k));
    for i in 0..complex.count(k) {
        let p = dual.primal_volume(k, i);
        let d = dual.dual_volume(k, i);
        if p <= 0.0 || d <= 0.0 {
            return Err(OperatorError::ZeroVolume { degree: k, index: i });
        }
        diag[i] = d / p;
    }
    Ok(diag)
}

/// Dual Hodge M̂^{n-k} with M̂^{n-k} · M^k = (-1)^{k(n-k)} I.
pub fn dual_hodge(hodge: &DVector<f64>, k: usize, n: usize) -> DVector<f64> {
    let sign = if (k * (n - k)).is_multiple_of(2) { 1.0 } else { -1.0 };
    hodge.map(|m| sign / m)
}

/// Boundary Hodge on ∂K: |⋆_b σ^k| / |σ^k| per boundary k-simplex, the same
/// construction one dimension down.
pub fn assemble_boundary_hodge(
    complex: &SimplicialComplex,
    dual: &DualComplex,
    k: usize,
) -> Result<DVector<f64>, OperatorError> {
    if k >= complex.dim() {
        return Err(OperatorError::DegreeOutOfRange {
            degree: k,
            dim: complex.dim(),
        });
    }
    let mut diag = DVector::zeros(complex.boundary_count(k));
    for (b, &s) in complex.boundary(k).iter().enumerate() {
        let p = dual.primal_volume(k, s);
        let d = dual.boundary_dual_volume(k, b);
        if p <= 0.0 || d <= 0.0 {
            return Err(OperatorError::ZeroVolume { degree: k, index: s });
        }
        diag[b] = d / p;
    }
    Ok(diag)
}

/// Degree-0 Laplacian Δ = δ∘d = (M^0)^{-1} D^T M^1 D, positive semidefinite
/// in the M^0-weighted inner product.
pub fn assemble_laplacian(
    complex: &SimplicialComplex,
    dual: &DualComplex,
) -> Result<CsrMatrix<f64>, OperatorError> {
    let d = assemble_derivative(complex, 0)?;
    let m1 = assemble_hodge(complex, dual, 1)?;
    let m0 = assemble_hodge(complex, dual, 0)?;
    let stiff = &scale_rows(&d, &m1).transpose() * &d;
    Ok(scale_rows(&stiff, &m0.map(|v| 1.0 / v)))
}

/// The full operator set for one complex: derivatives, traces, and Hodge
/// diagonals for every admissible degree.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    n: usize,
    counts: Vec<usize>,
    boundary_counts: Vec<usize>,
    derivative: Vec<CsrMatrix<f64>>,
    derivative_int: Vec<IntTriplets>,
    trace: Vec<CsrMatrix<f64>>,
    trace_int: Vec<IntTriplets>,
    hodge: Vec<DVector<f64>>,
    boundary_hodge: Vec<DVector<f64>>,
}

impl OperatorSet {
    pub fn assemble(
        complex: &SimplicialComplex,
        dual: &DualComplex,
    ) -> Result<Self, OperatorError> {
        let n = complex.dim();
        let counts = (0..=n).map(|k| complex.count(k)).collect();
        let boundary_counts = (0..n).map(|k| complex.boundary_count(k)).collect();
        let mut derivative = Vec::new();
        let mut derivative_int = Vec::new();
        let mut trace = Vec::new();
        let mut trace_int = Vec::new();
        for k in 0..n {
            derivative.push(assemble_derivative(complex, k)?);
            derivative_int.push(derivative_triplets(complex, k)?);
            trace.push(assemble_trace(complex, k)?);
            trace_int.push(trace_triplets(complex, k)?);
        }
        let hodge = (0..=n)
            .map(|k| assemble_hodge(complex, dual, k))
            .collect::<Result<_, _>>()?;
        let boundary_hodge = (0..n)
            .map(|k| assemble_boundary_hodge(complex, dual, k))
            .collect::<Result<_, _>>()?;
        Ok(OperatorSet {
            n,
            counts,
            boundary_counts,
            derivative,
            derivative_int,
            trace,
            trace_int,
            hodge,
            boundary_hodge,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts[k]
    }

    pub fn boundary_count(&self, k: usize) -> usize {
        self.boundary_counts[k]
    }

    /// D^k for k in 0..n.
    pub fn derivative(&self, k: usize) -> &CsrMatrix<f64> {
        &self.derivative[k]
    }

    pub fn derivative_triplets(&self, k: usize) -> &IntTriplets {
        &self.derivative_int[k]
    }

    /// T^k for k in 0..n.
    pub fn trace(&self, k: usize) -> &CsrMatrix<f64> {
        &self.trace[k]
    }

    pub fn trace_triplets(&self, k: usize) -> &IntTriplets {
        &self.trace_int[k]
    }

    /// Interior dual derivative Di^{n-k} = (-1)^k (D^{k-1})^T, k in 1..=n.
    pub fn dual_derivative_interior(&self, k: usize) -> CsrMatrix<f64> {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        scale(&self.derivative[k - 1].transpose(), sign)
    }

    /// Boundary dual derivative Db^{n-k} = (-1)^{k-1} (T^{k-1})^T, k in 1..=n.
    pub fn dual_derivative_boundary(&self, k: usize) -> CsrMatrix<f64> {
        let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        scale(&self.trace[k - 1].transpose(), sign)
    }

    /// Diagonal of M^k.
    pub fn hodge(&self, k: usize) -> &DVector<f64> {
        &self.hodge[k]
    }

    /// Diagonal of M̂^{n-k} = (-1)^{k(n-k)} (M^k)^{-1}.
    pub fn hodge_dual(&self, k: usize) -> DVector<f64> {
        dual_hodge(&self.hodge[k], k, self.n)
    }

    /// Diagonal of the boundary Hodge on ∂K at degree k.
    pub fn boundary_hodge(&self, k: usize) -> &DVector<f64> {
        &self.boundary_hodge[k]
    }

    /// Condition number (max/min diagonal ratio) of M^k.
    pub fn hodge_condition(&self, k: usize) -> f64 {
        let d = &self.hodge[k];
        let max = d.iter().cloned().fold(f64::MIN, f64::max);
        let min = d.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Exact integer product of two triplet matrices; true iff every accumulated
/// entry is exactly zero.
pub fn exact_product_is_zero(a: &IntTriplets, b: &IntTriplets) -> bool {
    use std::collections::HashMap;
    // group b by row for the middle index
    let mut b_by_row: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for &(r, c, v) in b {
        b_by_row.entry(r).or_default().push((c, v));
    }
    let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
    for &(r, mid, va) in a {
        if let Some(cols) = b_by_row.get(&mid) {
            for &(c, vb) in cols {
                *acc.entry((r, c)).or_insert(0) += va * vb;
            }
        }
    }
    acc.values().all(|&v| v == 0)
}

/// True iff the two sparse matrices are entrywise identical (same explicit
/// zero pattern not required).
pub fn matrices_equal_exact(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> bool {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return false;
    }
    let a_d = to_dense(a);
    let b_d = to_dense(b);
    a_d == b_d
}

/// Coordinate-triplet text form: one `row col value` line per nonzero.
pub fn export_coordinate_triplets(m: &CsrMatrix<f64>) -> String {
    let mut out = format!("% {} {} {}\n", m.nrows(), m.ncols(), m.nnz());
    for (r, c, v) in m.triplet_iter() {
        out.push_str(&format!("{r} {c} {v:.17e}\n"));
    }
    out
}

pub(crate) fn from_triplets(rows: usize, cols: usize, trip: &IntTriplets) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(rows, cols);
    for &(r, c, v) in trip {
        coo.push(r, c, v as f64);
    }
    CsrMatrix::from(&coo)
}

/// Scalar multiple of a sparse matrix.
pub fn scale(m: &CsrMatrix<f64>, s: f64) -> CsrMatrix<f64> {
    let mut out = m.clone();
    for v in out.values_mut() {
        *v *= s;
    }
    out
}

/// Multiply the matrix by diag(d) from the left.
pub(crate) fn scale_rows(m: &CsrMatrix<f64>, d: &DVector<f64>) -> CsrMatrix<f64> {
    let mut out = m.clone();
    let nrows = out.nrows();
    for r in 0..nrows {
        let s = d[r];
        let mut row = out.row_mut(r);
        for v in row.values_mut() {
            *v *= s;
        }
    }
    out
}

/// Sparse matrix times vector.
pub fn spmv(m: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    debug_assert_eq!(m.ncols(), x.len());
    let mut out = DVector::zeros(m.nrows());
    for (r, c, v) in m.triplet_iter() {
        out[r] += v * x[c];
    }
    out
}

/// Dense copy of a sparse matrix (desk-scale sizes only).
pub fn to_dense(m: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.triplet_iter() {
        out[(r, c)] = *v;
    }
    out
}
