//! Boundary-augmented circumcentric dual cell complexes.
//!
//! Every primal k-simplex gets an interior dual (n-k)-cell assembled from
//! elementary simplices of the circumcentric subdivision; every boundary
//! k-simplex additionally gets a boundary dual (n-1-k)-cell living on the
//! (n-1)-dimensional boundary complex. With this augmentation the boundary of
//! the dual complex is exactly the dual of the boundary complex.
//!
//! Each elementary piece remembers the primal flag it was generated from and
//! carries an orientation sign: the primal tangent basis of the generating
//! simplex followed by the dual edge chain must be positively oriented in the
//! ambient space. Cell measures are unsigned sums over pieces, which is the
//! correct measure on the well-centered complexes this construction requires.

use nalgebra::DVector;

use crate::complex::SimplicialComplex;
use crate::error::MeshError;
use crate::geometry::{self, relative_orientation_sign};

/// One elementary dual simplex `[c(σ^k), c(σ^{k+1}), ..., c(σ^m)]` generated
/// by a flag of primal simplices.
#[derive(Clone, Debug)]
pub struct ElementaryDual {
    /// Indices of the flag members, one per dimension k..=m.
    pub flag: Vec<usize>,
    /// Orientation coefficient of this piece within its dual cell.
    pub sign: i8,
    /// Unsigned measure of the piece.
    pub measure: f64,
}

/// A dual cell: a signed chain of elementary dual simplices.
#[derive(Clone, Debug, Default)]
pub struct DualCell {
    pub pieces: Vec<ElementaryDual>,
}

impl DualCell {
    /// Unsigned measure of the cell. 0-dimensional cells have measure 1.
    pub fn measure(&self, cell_dim: usize) -> f64 {
        if cell_dim == 0 {
            1.0
        } else {
            self.pieces.iter().map(|p| p.measure).sum()
        }
    }
}

/// The circumcentric dual of a well-centered simplicial complex, augmented
/// with the dual of the boundary.
#[derive(Clone, Debug)]
pub struct DualComplex {
    dim: usize,
    ambient_sign: i8,
    /// circumcenters[k][i] = c(σ^k_i)
    circumcenters: Vec<Vec<DVector<f64>>>,
    /// interior_cells[k][i] = ⋆_i σ^k_i, an (n-k)-cell
    interior_cells: Vec<Vec<DualCell>>,
    /// boundary_cells[k][b] = ⋆_b σ^k, aligned with `complex.boundary(k)`
    boundary_cells: Vec<Vec<DualCell>>,
    primal_volumes: Vec<Vec<f64>>,
    dual_volumes: Vec<Vec<f64>>,
    boundary_dual_volumes: Vec<Vec<f64>>,
    support_volumes: Vec<Vec<f64>>,
}

impl DualComplex {
    /// Build the dual with positive ambient orientation.
    pub fn build(complex: &SimplicialComplex) -> Result<Self, MeshError> {
        Self::build_oriented(complex, false)
    }

    /// Build the dual; `flip_ambient` reverses the ambient orientation, which
    /// flips every dual-cell sign coefficient and nothing else.
    pub fn build_oriented(
        complex: &SimplicialComplex,
        flip_ambient: bool,
    ) -> Result<Self, MeshError> {
        let (well_centered, offenders) = complex.is_well_centered();
        if !well_centered {
            return Err(MeshError::NotWellCentered(offenders));
        }
        let n = complex.dim();
        let ambient_sign: i8 = if flip_ambient { -1 } else { 1 };
        // the determinant orientation rule needs ambient dim == n;
        // higher-codimension embeddings fall back to flag-order orientation
        let det_rule = complex.ambient_dim() == n;

        let mut circumcenters: Vec<Vec<DVector<f64>>> = Vec::with_capacity(n + 1);
        let mut primal_volumes: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut centers = Vec::with_capacity(complex.count(k));
            let mut volumes = Vec::with_capacity(complex.count(k));
            for i in 0..complex.count(k) {
                centers.push(complex.circumcenter(k, i)?);
                volumes.push(complex.simplex_measure(k, i));
            }
            circumcenters.push(centers);
            primal_volumes.push(volumes);
        }

        // interior duals: enumerate ascending flags σ^k ≺ ... ≺ σ^n
        let mut interior_cells: Vec<Vec<DualCell>> = (0..=n)
            .map(|k| vec![DualCell::default(); complex.count(k)])
            .collect();
        for (k, cells) in interior_cells.iter_mut().enumerate() {
            for (i, cell) in cells.iter_mut().enumerate() {
                let mut flag = vec![i];
                collect_interior_flags(
                    complex,
                    &circumcenters,
                    k,
                    n,
                    &mut flag,
                    ambient_sign,
                    det_rule,
                    cell,
                );
            }
        }

        // boundary duals: flags within the boundary complex
        let mut boundary_cells: Vec<Vec<DualCell>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut cells = Vec::with_capacity(complex.boundary_count(k));
            for &s in complex.boundary(k) {
                let mut cell = DualCell::default();
                let mut flag = vec![s];
                collect_boundary_flags(
                    complex,
                    &circumcenters,
                    k,
                    n,
                    &mut flag,
                    ambient_sign,
                    det_rule,
                    &mut cell,
                );
                cells.push(cell);
            }
            boundary_cells.push(cells);
        }

        let dual_volumes: Vec<Vec<f64>> = (0..=n)
            .map(|k| {
                interior_cells[k]
                    .iter()
                    .map(|c| c.measure(n - k))
                    .collect()
            })
            .collect();
        let boundary_dual_volumes: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                boundary_cells[k]
                    .iter()
                    .map(|c| c.measure(n - 1 - k))
                    .collect()
            })
            .collect();
        // |V_σ| = |σ| |⋆σ| / binom(n, k)
        let support_volumes: Vec<Vec<f64>> = (0..=n)
            .map(|k| {
                let b = binomial(n, k) as f64;
                primal_volumes[k]
                    .iter()
                    .zip(&dual_volumes[k])
                    .map(|(p, d)| p * d / b)
                    .collect()
            })
            .collect();

        Ok(DualComplex {
            dim: n,
            ambient_sign,
            circumcenters,
            interior_cells,
            boundary_cells,
            primal_volumes,
            dual_volumes,
            boundary_dual_volumes,
            support_volumes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_sign(&self) -> i8 {
        self.ambient_sign
    }

    /// Circumcenter of primal k-simplex `i`.
    pub fn circumcenter(&self, k: usize, i: usize) -> &DVector<f64> {
        &self.circumcenters[k][i]
    }

    pub fn circumcenters(&self, k: usize) -> &[DVector<f64>] {
        &self.circumcenters[k]
    }

    /// Interior dual (n-k)-cell of primal k-simplex `i`.
    pub fn interior_cell(&self, k: usize, i: usize) -> &DualCell {
        &self.interior_cells[k][i]
    }

    /// Boundary dual cell of the b-th boundary k-simplex.
    pub fn boundary_cell(&self, k: usize, b: usize) -> &DualCell {
        &self.boundary_cells[k][b]
    }

    /// |σ^k_i|.
    pub fn primal_volume(&self, k: usize, i: usize) -> f64 {
        self.primal_volumes[k][i]
    }

    /// |⋆_i σ^k_i|.
    pub fn dual_volume(&self, k: usize, i: usize) -> f64 {
        self.dual_volumes[k][i]
    }

    pub fn dual_volumes(&self, k: usize) -> &[f64] {
        &self.dual_volumes[k]
    }

    /// |⋆_b σ^k| for the b-th boundary k-simplex.
    pub fn boundary_dual_volume(&self, k: usize, b: usize) -> f64 {
        self.boundary_dual_volumes[k][b]
    }

    /// |V_{σ^k_i}|, the support volume.
    pub fn support_volume(&self, k: usize, i: usize) -> f64 {
        self.support_volumes[k][i]
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Orientation sign for a flag piece: primal tangent basis of the generating
/// simplex followed by the chain of circumcenter-to-circumcenter edges.
fn flag_sign(
    complex: &SimplicialComplex,
    centers: &[Vec<DVector<f64>>],
    start_dim: usize,
    flag: &[usize],
    ambient_sign: i8,
    det_rule: bool,
) -> i8 {
    let orient = complex.simplices(start_dim).orientations[flag[0]];
    if !det_rule {
        return orient * ambient_sign;
    }
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(complex.dim());
    let pts = complex.simplex_points(start_dim, flag[0]);
    for p in &pts[1..] {
        frame.push(p - &pts[0]);
    }
    for (step, pair) in flag.windows(2).enumerate() {
        let lo = &centers[start_dim + step][pair[0]];
        let hi = &centers[start_dim + step + 1][pair[1]];
        frame.push(hi - lo);
    }
    let det = geometry::orientation_sign(&frame);
    orient * det * ambient_sign
}

#[allow(clippy::too_many_arguments)]
fn collect_interior_flags(
    complex: &SimplicialComplex,
    centers: &[Vec<DVector<f64>>],
    start_dim: usize,
    n: usize,
    flag: &mut Vec<usize>,
    ambient_sign: i8,
    det_rule: bool,
    cell: &mut DualCell,
) {
    let cur_dim = start_dim + flag.len() - 1;
    if cur_dim == n {
        let points: Vec<DVector<f64>> = flag
            .iter()
            .enumerate()
            .map(|(j, &s)| centers[start_dim + j][s].clone())
            .collect();
        let measure = geometry::simplex_measure(&points);
        let sign = flag_sign(complex, centers, start_dim, flag, ambient_sign, det_rule);
        cell.pieces.push(ElementaryDual {
            flag: flag.clone(),
            sign,
            measure,
        });
        return;
    }
    let current = *flag.last().unwrap();
    for &(coface, _) in &complex.simplices(cur_dim).cofaces[current] {
        flag.push(coface);
        collect_interior_flags(
            complex,
            centers,
            start_dim,
            n,
            flag,
            ambient_sign,
            det_rule,
            cell,
        );
        flag.pop();
    }
}

/// Boundary flags run inside the boundary complex and stop at dimension n-1.
/// The piece orientation is taken relative to the induced orientation of the
/// boundary face the flag terminates in.
#[allow(clippy::too_many_arguments)]
fn collect_boundary_flags(
    complex: &SimplicialComplex,
    centers: &[Vec<DVector<f64>>],
    start_dim: usize,
    n: usize,
    flag: &mut Vec<usize>,
    ambient_sign: i8,
    det_rule: bool,
    cell: &mut DualCell,
) {
    let cur_dim = start_dim + flag.len() - 1;
    if cur_dim == n - 1 {
        let face = *flag.last().unwrap();
        let face_pos = complex
            .boundary_position(n - 1, face)
            .expect("boundary flag must terminate on a boundary face");
        let induced = complex.boundary_face_signs()[face_pos];
        let points: Vec<DVector<f64>> = flag
            .iter()
            .enumerate()
            .map(|(j, &s)| centers[start_dim + j][s].clone())
            .collect();
        let measure = geometry::simplex_measure(&points);
        let sign = if n == 1 || !det_rule {
            induced * ambient_sign
        } else {
            // frame of the piece inside the face, against the face's
            // canonical tangent basis
            let mut frame: Vec<DVector<f64>> = Vec::new();
            let pts = complex.simplex_points(start_dim, flag[0]);
            for p in &pts[1..] {
                frame.push(p - &pts[0]);
            }
            for (step, pair) in flag.windows(2).enumerate() {
                let lo = &centers[start_dim + step][pair[0]];
                let hi = &centers[start_dim + step + 1][pair[1]];
                frame.push(hi - lo);
            }
            let face_pts = complex.simplex_points(n - 1, face);
            let basis: Vec<DVector<f64>> =
                face_pts[1..].iter().map(|p| p - &face_pts[0]).collect();
            relative_orientation_sign(&basis, &frame) * induced * ambient_sign
        };
        cell.pieces.push(ElementaryDual {
            flag: flag.clone(),
            sign,
            measure,
        });
        return;
    }
    let current = *flag.last().unwrap();
    for &(coface, _) in &complex.simplices(cur_dim).cofaces[current] {
        // only walk cofaces that stay on the boundary
        if complex.boundary_position(cur_dim + 1, coface).is_none() {
            continue;
        }
        flag.push(coface);
        collect_boundary_flags(
            complex,
            centers,
            start_dim,
            n,
            flag,
            ambient_sign,
            det_rule,
            cell,
        );
        flag.pop();
    }
}
