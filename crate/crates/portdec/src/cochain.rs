//! Discrete forms on the primal, dual, and boundary meshes.
//!
//! A cochain stores one real coefficient per cell of its (degree, locus)
//! pair. Dual cochains are indexed by the primal simplex generating each dual
//! cell; dual-boundary cochains by the boundary simplex, in boundary-list
//! order. Coefficients of dual-boundary cochains refer to the oriented cells,
//! so the wedge pairings below are plain dot products with identity weight
//! matrices and the dual-derivative transpose identities hold exactly.

use nalgebra::DVector;

use crate::complex::SimplicialComplex;
use crate::dual::DualComplex;
use crate::error::CochainError;
use crate::geometry::{integrate_segment, integrate_triangle, orientation_sign};
use crate::operators::{spmv, OperatorSet};

/// Where a discrete form lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Locus {
    Primal,
    DualInterior,
    PrimalBoundary,
    DualBoundary,
}

impl std::fmt::Display for Locus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Locus::Primal => "primal",
            Locus::DualInterior => "dual_interior",
            Locus::PrimalBoundary => "primal_boundary",
            Locus::DualBoundary => "dual_boundary",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Locus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primal" => Ok(Locus::Primal),
            "dual_interior" => Ok(Locus::DualInterior),
            "primal_boundary" => Ok(Locus::PrimalBoundary),
            "dual_boundary" => Ok(Locus::DualBoundary),
            other => Err(format!("unknown locus `{other}`")),
        }
    }
}

/// Number of cells carrying a degree-k form on the given locus.
pub fn cell_count(complex: &SimplicialComplex, degree: usize, locus: Locus) -> usize {
    let n = complex.dim();
    match locus {
        Locus::Primal => complex.count(degree),
        Locus::DualInterior => complex.count(n - degree),
        Locus::PrimalBoundary => complex.boundary_count(degree),
        Locus::DualBoundary => complex.boundary_count(n - 1 - degree),
    }
}

/// A discrete k-form: degree, locus, and one coefficient per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub locus: Locus,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn zeros(complex: &SimplicialComplex, degree: usize, locus: Locus) -> Self {
        Cochain {
            degree,
            locus,
            values: DVector::zeros(cell_count(complex, degree, locus)),
        }
    }

    pub fn from_values(
        complex: &SimplicialComplex,
        degree: usize,
        locus: Locus,
        values: Vec<f64>,
    ) -> Result<Self, CochainError> {
        let count = cell_count(complex, degree, locus);
        if values.len() != count {
            return Err(CochainError::LengthMismatch {
                len: values.len(),
                count,
                degree,
            });
        }
        Ok(Cochain {
            degree,
            locus,
            values: DVector::from_vec(values),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() == 0
    }

    /// Pointwise sum; defined only between cochains of identical degree,
    /// locus, and length.
    pub fn try_add(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        self.check_same_kind(other)?;
        Ok(Cochain {
            degree: self.degree,
            locus: self.locus,
            values: &self.values + &other.values,
        })
    }

    pub fn scale(&self, s: f64) -> Cochain {
        Cochain {
            degree: self.degree,
            locus: self.locus,
            values: &self.values * s,
        }
    }

    fn check_same_kind(&self, other: &Cochain) -> Result<(), CochainError> {
        if self.degree != other.degree {
            return Err(CochainError::DegreeMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        if self.locus != other.locus {
            return Err(CochainError::LocusMismatch {
                expected: self.locus.to_string(),
                got: other.locus.to_string(),
            });
        }
        if self.values.len() != other.values.len() {
            return Err(CochainError::LengthMismatch {
                len: other.values.len(),
                count: self.values.len(),
                degree: self.degree,
            });
        }
        Ok(())
    }

    /// CSV export: header naming degree and locus, then `cell,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# degree={} locus={}\ncell,value\n", self.degree, self.locus);
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v:.17e}\n"));
        }
        out
    }

    /// Parse the CSV form produced by [`Cochain::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty cochain file")?;
        let header = header.trim_start_matches('#').trim();
        let mut degree = None;
        let mut locus = None;
        for part in header.split_whitespace() {
            if let Some(d) = part.strip_prefix("degree=") {
                degree = Some(d.parse::<usize>().map_err(|e| e.to_string())?);
            }
            if let Some(l) = part.strip_prefix("locus=") {
                locus = Some(l.parse::<Locus>()?);
            }
        }
        let degree = degree.ok_or("missing degree in header")?;
        let locus = locus.ok_or("missing locus in header")?;
        let mut values = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with("cell,") {
                continue;
            }
            let (_, v) = line.split_once(',').ok_or(format!("bad row `{line}`"))?;
            values.push(v.trim().parse::<f64>().map_err(|e| e.to_string())?);
        }
        Ok(Cochain {
            degree,
            locus,
            values: DVector::from_vec(values),
        })
    }
}

/// Natural pairing of a cochain with a signed cell chain.
pub fn evaluate(alpha: &Cochain, chain: &[(usize, f64)]) -> Result<f64, CochainError> {
    let mut acc = 0.0;
    for &(cell, coeff) in chain {
        if cell >= alpha.values.len() {
            return Err(CochainError::IndexOutOfRange {
                index: cell,
                count: alpha.values.len(),
            });
        }
        acc += coeff * alpha.values[cell];
    }
    Ok(acc)
}

/// A smooth differential form presented for discretization.
///
/// 0-forms are scalar fields; 1-forms are given by their proxy vector field
/// (the covector applied to a direction is the dot product); top-degree forms
/// by their scalar density against the positively oriented volume element.
pub enum SmoothForm<'a> {
    Scalar(&'a dyn Fn(&DVector<f64>) -> f64),
    Vector(&'a dyn Fn(&DVector<f64>) -> DVector<f64>),
    Density(&'a dyn Fn(&DVector<f64>) -> f64),
}

/// Integrate a smooth form cell by cell (de Rham map) with fixed-order
/// Gaussian quadrature, respecting cell orientation.
pub fn discretize(
    form: &SmoothForm,
    complex: &SimplicialComplex,
    dual: &DualComplex,
    degree: usize,
    locus: Locus,
) -> Result<Cochain, CochainError> {
    let n = complex.dim();
    let unsupported = || CochainError::QuadratureUnsupported {
        degree,
        locus: locus.to_string(),
    };
    let mut out = Cochain::zeros(complex, degree, locus);
    match locus {
        Locus::Primal | Locus::PrimalBoundary => {
            let indices: Vec<usize> = match locus {
                Locus::Primal => (0..complex.count(degree)).collect(),
                _ => complex.boundary(degree).to_vec(),
            };
            for (slot, &i) in indices.iter().enumerate() {
                out.values[slot] = integrate_primal(form, complex, degree, i, n)
                    .ok_or_else(unsupported)?;
            }
        }
        Locus::DualInterior => {
            let gen_dim = n - degree;
            for i in 0..complex.count(gen_dim) {
                let cell = dual.interior_cell(gen_dim, i);
                out.values[i] =
                    integrate_dual_cell(form, dual, gen_dim, &cell.pieces, degree, n)
                        .ok_or_else(unsupported)?;
            }
        }
        Locus::DualBoundary => {
            let gen_dim = n - 1 - degree;
            for b in 0..complex.boundary_count(gen_dim) {
                let cell = dual.boundary_cell(gen_dim, b);
                out.values[b] =
                    integrate_dual_cell(form, dual, gen_dim, &cell.pieces, degree, n)
                        .ok_or_else(unsupported)?;
            }
        }
    }
    Ok(out)
}

fn integrate_primal(
    form: &SmoothForm,
    complex: &SimplicialComplex,
    degree: usize,
    index: usize,
    n: usize,
) -> Option<f64> {
    let pts = complex.simplex_points(degree, index);
    let orient = complex.simplices(degree).orientations[index] as f64;
    match (form, degree) {
        (SmoothForm::Scalar(f), 0) => Some(f(&pts[0])),
        (SmoothForm::Vector(f), 1) => {
            let dir = (&pts[1] - &pts[0]).normalize();
            Some(orient * integrate_segment(&pts[0], &pts[1], |x| f(x).dot(&dir)))
        }
        (SmoothForm::Density(f), d) if d == n && n == 2 => {
            // orientation of the stored simplex against the ambient area form
            let tangents: Vec<DVector<f64>> = pts[1..].iter().map(|p| p - &pts[0]).collect();
            let amb = if complex.ambient_dim() == n {
                orientation_sign(&tangents) as f64
            } else {
                1.0
            };
            Some(orient * amb * integrate_triangle(&pts[0], &pts[1], &pts[2], |x| f(x)))
        }
        _ => None,
    }
}

fn integrate_dual_cell(
    form: &SmoothForm,
    dual: &DualComplex,
    gen_dim: usize,
    pieces: &[crate::dual::ElementaryDual],
    degree: usize,
    n: usize,
) -> Option<f64> {
    match (form, degree) {
        (SmoothForm::Scalar(f), 0) => {
            // a dual 0-cell is the (possibly signed) circumcenter point
            let piece = &pieces[0];
            let c = dual.circumcenter(gen_dim, piece.flag[0]);
            Some(piece.sign as f64 * f(c))
        }
        (SmoothForm::Vector(f), 1) => {
            let mut acc = 0.0;
            for piece in pieces {
                let a = dual.circumcenter(gen_dim, piece.flag[0]);
                let b = dual.circumcenter(gen_dim + 1, piece.flag[1]);
                if (b - a).norm() == 0.0 {
                    continue;
                }
                let dir = (b - a).normalize();
                acc += piece.sign as f64 * integrate_segment(a, b, |x| f(x).dot(&dir));
            }
            Some(acc)
        }
        (SmoothForm::Density(f), d) if d == 2 && n == 2 => {
            // dual cell of a vertex: its pieces tile the cell positively
            let mut acc = 0.0;
            for piece in pieces {
                let a = dual.circumcenter(gen_dim, piece.flag[0]);
                let b = dual.circumcenter(gen_dim + 1, piece.flag[1]);
                let c = dual.circumcenter(gen_dim + 2, piece.flag[2]);
                acc += integrate_triangle(a, b, c, |x| f(x));
            }
            Some(acc)
        }
        _ => None,
    }
}

/// Primal-dual wedge: pairing of a primal k-cochain with a dual-interior
/// (n-k)-cochain over matched cells. With identity weights this is the dot
/// product of the coefficient vectors.
pub fn wedge_pair(
    complex: &SimplicialComplex,
    alpha: &Cochain,
    beta_hat: &Cochain,
) -> Result<f64, CochainError> {
    let n = complex.dim();
    if alpha.locus != Locus::Primal {
        return Err(CochainError::LocusMismatch {
            expected: Locus::Primal.to_string(),
            got: alpha.locus.to_string(),
        });
    }
    if beta_hat.locus != Locus::DualInterior {
        return Err(CochainError::LocusMismatch {
            expected: Locus::DualInterior.to_string(),
            got: beta_hat.locus.to_string(),
        });
    }
    if alpha.degree + beta_hat.degree != n {
        return Err(CochainError::DegreeMismatch {
            expected: n - alpha.degree,
            got: beta_hat.degree,
        });
    }
    if alpha.len() != beta_hat.len() {
        return Err(CochainError::LengthMismatch {
            len: beta_hat.len(),
            count: alpha.len(),
            degree: alpha.degree,
        });
    }
    Ok(alpha.values.dot(&beta_hat.values))
}

/// The wedge with arguments in dual-first order, anticommuting with sign
/// (-1)^{k(n-k)}.
pub fn wedge_pair_reversed(
    complex: &SimplicialComplex,
    beta_hat: &Cochain,
    alpha: &Cochain,
) -> Result<f64, CochainError> {
    let n = complex.dim();
    let k = alpha.degree;
    let sign = if (k * (n - k)).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * wedge_pair(complex, alpha, beta_hat)?)
}

/// Boundary wedge: pairing of a primal-boundary k-cochain with a
/// dual-boundary (n-1-k)-cochain on ∂K.
pub fn boundary_wedge_pair(
    complex: &SimplicialComplex,
    alpha: &Cochain,
    beta_hat: &Cochain,
) -> Result<f64, CochainError> {
    let n = complex.dim();
    if alpha.locus != Locus::PrimalBoundary {
        return Err(CochainError::LocusMismatch {
            expected: Locus::PrimalBoundary.to_string(),
            got: alpha.locus.to_string(),
        });
    }
    if beta_hat.locus != Locus::DualBoundary {
        return Err(CochainError::LocusMismatch {
            expected: Locus::DualBoundary.to_string(),
            got: beta_hat.locus.to_string(),
        });
    }
    if alpha.degree + beta_hat.degree != n - 1 {
        return Err(CochainError::DegreeMismatch {
            expected: n - 1 - alpha.degree,
            got: beta_hat.degree,
        });
    }
    if alpha.len() != beta_hat.len() {
        return Err(CochainError::LengthMismatch {
            len: beta_hat.len(),
            count: alpha.len(),
            degree: alpha.degree,
        });
    }
    Ok(alpha.values.dot(&beta_hat.values))
}

/// Residual of the summation-by-parts identity for a primal (k-1)-form
/// `e_p`, a dual-interior (n-k)-form `eq_hat`, and a dual-boundary (n-k)-form
/// `eb_hat`:
///
/// ```text
/// |< d e_p ∧ ê_q, K > + (-1)^{k-1} < e_p ∧ (d_i ê_q + d_b ê_b), K >
///                     - < e_p|∂K ∧ ê_b, ∂K >|
/// ```
///
/// Zero (to roundoff) on every oriented well-centered complex; this residual
/// is the operational certificate of the dual boundary construction.
pub fn summation_by_parts_residual(
    complex: &SimplicialComplex,
    ops: &OperatorSet,
    e_p: &Cochain,
    eq_hat: &Cochain,
    eb_hat: &Cochain,
) -> Result<f64, CochainError> {
    let n = complex.dim();
    let k = e_p.degree + 1;
    if eq_hat.degree != n - k {
        return Err(CochainError::DegreeMismatch {
            expected: n - k,
            got: eq_hat.degree,
        });
    }
    if eb_hat.degree != n - k {
        return Err(CochainError::DegreeMismatch {
            expected: n - k,
            got: eb_hat.degree,
        });
    }

    let d = ops.derivative(k - 1);
    let t = ops.trace(k - 1);
    let di = ops.dual_derivative_interior(k);
    let db = ops.dual_derivative_boundary(k);

    let d_ep = Cochain {
        degree: k,
        locus: Locus::Primal,
        values: spmv(d, &e_p.values),
    };
    let dual_term = Cochain {
        degree: n - k + 1,
        locus: Locus::DualInterior,
        values: spmv(&di, &eq_hat.values) + spmv(&db, &eb_hat.values),
    };
    let trace_ep = Cochain {
        degree: k - 1,
        locus: Locus::PrimalBoundary,
        values: spmv(t, &e_p.values),
    };

    let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let bulk = wedge_pair(complex, &d_ep, eq_hat)?
        + sign * wedge_pair(complex, e_p, &dual_term)?;
    let boundary = boundary_wedge_pair(complex, &trace_ep, eb_hat)?;
    Ok((bulk - boundary).abs())
}
