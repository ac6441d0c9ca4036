//! Low-level Euclidean geometry on simplices: circumcenters, measures,
//! orientation determinants.
//!
//! Everything here works in the affine hull of the given points, so the
//! ambient dimension may exceed the simplex dimension.

use nalgebra::{DMatrix, DVector};

use crate::error::MeshError;

/// Relative tolerance used to flag degenerate (zero-measure) simplices.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Relative tolerance for circumcenter equidistance checks.
pub const EQUIDISTANCE_TOL: f64 = 1e-9;

/// Unsigned k-dimensional measure of the simplex spanned by `points`,
/// computed as sqrt(det(E^T E)) / k! with E the edge matrix.
///
/// A single point has measure 1 by convention.
pub fn simplex_measure(points: &[DVector<f64>]) -> f64 {
    let k = points.len() - 1;
    if k == 0 {
        return 1.0;
    }
    if k == 1 {
        return (&points[1] - &points[0]).norm();
    }
    let mut gram = DMatrix::zeros(k, k);
    let edges: Vec<DVector<f64>> = (1..=k).map(|i| &points[i] - &points[0]).collect();
    for i in 0..k {
        for j in i..k {
            let dot = edges[i].dot(&edges[j]);
            gram[(i, j)] = dot;
            gram[(j, i)] = dot;
        }
    }
    let det = gram.determinant();
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    det.max(0.0).sqrt() / factorial
}

/// Longest edge of the simplex; the scale against which tolerances are taken.
pub fn simplex_diameter(points: &[DVector<f64>]) -> f64 {
    let mut diam: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            diam = diam.max((&points[i] - &points[j]).norm());
        }
    }
    diam
}

/// Circumcenter of a k-simplex together with its barycentric coordinates.
///
/// Solves the linear system of Bell & Hirani (PyDEC, §10.1): unknowns are the
/// barycentric weights plus a Lagrange multiplier for the normalization
/// constraint. Valid in any ambient dimension >= k.
pub fn circumcenter_with_barycentric(
    points: &[DVector<f64>],
) -> Result<(DVector<f64>, Vec<f64>), MeshError> {
    let m = points.len();
    if m == 1 {
        return Ok((points[0].clone(), vec![1.0]));
    }
    if m == 2 {
        return Ok((0.5 * (&points[0] + &points[1]), vec![0.5, 0.5]));
    }
    let dim = m + 1;
    let mut coef = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    for i in 0..m {
        rhs[i] = points[i].dot(&points[i]);
        for j in 0..m {
            coef[(i, j)] = 2.0 * points[i].dot(&points[j]);
        }
        coef[(i, dim - 1)] = 1.0;
        coef[(dim - 1, i)] = 1.0;
    }
    rhs[dim - 1] = 1.0;

    let diam = simplex_diameter(points);
    let vol = simplex_measure(points);
    let k = m - 1;
    if vol < DEGENERACY_TOL * diam.powi(k as i32) {
        return Err(MeshError::DegenerateSimplex {
            dim: k,
            index: usize::MAX,
            volume: vol,
        });
    }

    let bary = coef
        .lu()
        .solve(&rhs)
        .ok_or(MeshError::DegenerateSimplex {
            dim: k,
            index: usize::MAX,
            volume: vol,
        })?;

    let mut center = DVector::zeros(points[0].len());
    for (i, p) in points.iter().enumerate() {
        center += bary[i] * p;
    }
    Ok((center, bary.as_slice()[..m].to_vec()))
}

/// Circumcenter alone; see [`circumcenter_with_barycentric`].
pub fn circumcenter(points: &[DVector<f64>]) -> Result<DVector<f64>, MeshError> {
    circumcenter_with_barycentric(points).map(|(c, _)| c)
}

/// Sign of the determinant of `vectors` (square, ambient dim == count).
/// Returns 0 for a numerically singular frame.
pub fn orientation_sign(vectors: &[DVector<f64>]) -> i8 {
    let n = vectors.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, v) in vectors.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = v[i];
        }
    }
    let det = m.determinant();
    if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    }
}

/// Orientation of `vectors` relative to the frame `basis`, both spanning the
/// same r-dimensional subspace of R^N. Solves basis * X = vectors in the
/// least-squares sense and returns the sign of det X.
pub fn relative_orientation_sign(basis: &[DVector<f64>], vectors: &[DVector<f64>]) -> i8 {
    let r = basis.len();
    debug_assert_eq!(r, vectors.len());
    let ambient = basis[0].len();
    let mut b = DMatrix::zeros(ambient, r);
    let mut v = DMatrix::zeros(ambient, r);
    for j in 0..r {
        for i in 0..ambient {
            b[(i, j)] = basis[j][i];
            v[(i, j)] = vectors[j][i];
        }
    }
    let gram = b.transpose() * &b;
    let rhs = b.transpose() * &v;
    match gram.lu().solve(&rhs) {
        Some(x) => {
            let det = x.determinant();
            if det > 0.0 {
                1
            } else if det < 0.0 {
                -1
            } else {
                0
            }
        }
        None => 0,
    }
}

/// Nodes and weights of the 5-point Gauss-Legendre rule on [-1, 1].
///
/// Exact for polynomials of degree <= 9; far below any discretization error
/// measured in this crate.
pub const GAUSS_LEGENDRE_5: [(f64, f64); 5] = [
    (-0.906179845938664, 0.23692688505618908),
    (-0.5384693101056831, 0.47862867049936647),
    (0.0, 0.5688888888888889),
    (0.5384693101056831, 0.47862867049936647),
    (0.906179845938664, 0.23692688505618908),
];

/// Integrate a scalar function along the segment [a, b] with 5-point
/// Gauss-Legendre quadrature.
pub fn integrate_segment<F: Fn(&DVector<f64>) -> f64>(
    a: &DVector<f64>,
    b: &DVector<f64>,
    f: F,
) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let len = (b - a).norm();
    let mut acc = 0.0;
    for (node, weight) in GAUSS_LEGENDRE_5 {
        let x = &mid + node * &half;
        acc += weight * f(&x);
    }
    acc * 0.5 * len
}

/// Order-5 symmetric quadrature on a triangle (7 points, Strang-Fix).
/// Weights sum to 1 and are applied to the physical triangle area.
const TRIANGLE_ORDER5: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [0.059715871789770, 0.470142064105115, 0.470142064105115],
        0.132394152788506,
    ),
    (
        [0.470142064105115, 0.059715871789770, 0.470142064105115],
        0.132394152788506,
    ),
    (
        [0.470142064105115, 0.470142064105115, 0.059715871789770],
        0.132394152788506,
    ),
    (
        [0.797426985353087, 0.101286507323456, 0.101286507323456],
        0.125939180544827,
    ),
    (
        [0.101286507323456, 0.797426985353087, 0.101286507323456],
        0.125939180544827,
    ),
    (
        [0.101286507323456, 0.101286507323456, 0.797426985353087],
        0.125939180544827,
    ),
];

/// Integrate a scalar density over the triangle (a, b, c).
pub fn integrate_triangle<F: Fn(&DVector<f64>) -> f64>(
    a: &DVector<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
    f: F,
) -> f64 {
    let area = simplex_measure(&[a.clone(), b.clone(), c.clone()]);
    let mut acc = 0.0;
    for (bary, weight) in TRIANGLE_ORDER5 {
        let x = bary[0] * a + bary[1] * b + bary[2] * c;
        acc += weight * f(&x);
    }
    acc * area
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    #[test]
    fn edge_circumcenter_is_midpoint() {
        let (c, bary) = circumcenter_with_barycentric(&[pt(&[0.0, 0.0]), pt(&[2.0, 0.0])]).unwrap();
        assert_relative_eq!(c[0], 1.0);
        assert_relative_eq!(c[1], 0.0);
        assert_eq!(bary, vec![0.5, 0.5]);
    }

    #[test]
    fn equilateral_circumcenter_is_centroid() {
        let pts = [
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[0.5, 3f64.sqrt() / 2.0]),
        ];
        let (c, bary) = circumcenter_with_barycentric(&pts).unwrap();
        let centroid = (&pts[0] + &pts[1] + &pts[2]) / 3.0;
        assert_relative_eq!((c - centroid).norm(), 0.0, epsilon = 1e-14);
        for b in bary {
            assert_relative_eq!(b, 1.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn right_triangle_circumcenter_on_hypotenuse() {
        let pts = [pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 2.0])];
        let (c, bary) = circumcenter_with_barycentric(&pts).unwrap();
        assert_relative_eq!(c[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(c[1], 1.0, epsilon = 1e-14);
        // barycentric weight of the right-angle vertex vanishes
        assert_relative_eq!(bary[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn circumcenter_equidistance_in_3d() {
        let pts = [
            pt(&[0.1, 0.2, 0.3]),
            pt(&[1.0, 0.1, -0.2]),
            pt(&[0.4, 1.2, 0.5]),
            pt(&[0.2, 0.3, 1.4]),
        ];
        let (c, _) = circumcenter_with_barycentric(&pts).unwrap();
        let r0 = (&pts[0] - &c).norm();
        for p in &pts[1..] {
            assert_relative_eq!((p - &c).norm(), r0, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_simplex_detected() {
        let pts = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[2.0, 0.0])];
        assert!(circumcenter_with_barycentric(&pts).is_err());
    }

    #[test]
    fn measures() {
        assert_relative_eq!(simplex_measure(&[pt(&[3.0])]), 1.0);
        assert_relative_eq!(simplex_measure(&[pt(&[0.0]), pt(&[0.5])]), 0.5);
        let tri = [pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        assert_relative_eq!(simplex_measure(&tri), 0.5, epsilon = 1e-14);
        let tet = [
            pt(&[0.0, 0.0, 0.0]),
            pt(&[1.0, 0.0, 0.0]),
            pt(&[0.0, 1.0, 0.0]),
            pt(&[0.0, 0.0, 1.0]),
        ];
        assert_relative_eq!(simplex_measure(&tet), 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn segment_quadrature_integrates_polynomials() {
        // int_0^1 z dz = 1/2 and int_0^1 z^4 dz = 1/5, both exact at order 5
        let a = pt(&[0.0]);
        let b = pt(&[1.0]);
        assert_relative_eq!(integrate_segment(&a, &b, |x| x[0]), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            integrate_segment(&a, &b, |x| x[0].powi(4)),
            0.2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn triangle_quadrature_integrates_quartics() {
        let a = pt(&[0.0, 0.0]);
        let b = pt(&[1.0, 0.0]);
        let c = pt(&[0.0, 1.0]);
        // int over unit right triangle of x^2 y^2 = 1/180
        let val = integrate_triangle(&a, &b, &c, |x| x[0] * x[0] * x[1] * x[1]);
        assert_relative_eq!(val, 1.0 / 180.0, epsilon = 1e-15);
    }

    #[test]
    fn relative_orientation() {
        let e1 = pt(&[1.0, 0.0, 0.0]);
        let e2 = pt(&[0.0, 1.0, 0.0]);
        let f1 = pt(&[1.0, 1.0, 0.0]);
        let f2 = pt(&[-1.0, 1.0, 0.0]);
        assert_eq!(
            relative_orientation_sign(&[e1.clone(), e2.clone()], &[f1.clone(), f2.clone()]),
            1
        );
        assert_eq!(relative_orientation_sign(&[e1, e2], &[f2, f1]), -1);
    }
}
