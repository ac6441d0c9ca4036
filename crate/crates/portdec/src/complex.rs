//! Oriented manifold-like simplicial complexes.
//!
//! A complex is built from explicit vertex coordinates and top-dimensional
//! simplices. All lower-dimensional faces are enumerated automatically with a
//! canonical (sorted-ascending) vertex order; the orientation of each simplex
//! is carried as a separate sign relative to that canonical order. The
//! boundary sub-complex is extracted during construction and the
//! manifold-like and orientation-consistency invariants are verified.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::error::MeshError;
use crate::geometry::{self, DEGENERACY_TOL};

/// Barycentric slack below which a circumcenter counts as touching the
/// simplex boundary, i.e. the simplex is not strictly well-centered.
pub const WELL_CENTERED_TOL: f64 = 1e-10;

/// One dimension's worth of simplices, in canonical vertex order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimplexSet {
    /// Sorted-ascending vertex tuples, `k + 1` indices per simplex.
    pub tuples: Vec<Vec<usize>>,
    /// Orientation sign of each simplex relative to its canonical tuple.
    /// Lower-dimensional simplices are canonically oriented (+1); top
    /// simplices keep the orientation of the input tuple.
    pub orientations: Vec<i8>,
    /// For each simplex, its codimension-1 faces as (face index, incidence
    /// sign). The incidence sign is the coefficient of the face in the
    /// oriented boundary of the oriented simplex.
    pub faces: Vec<Vec<(usize, i8)>>,
    /// Reverse incidence: for each simplex, the (k+1)-simplices containing it
    /// with the same sign convention.
    pub cofaces: Vec<Vec<(usize, i8)>>,
}

impl SimplexSet {
    fn empty() -> Self {
        SimplexSet {
            tuples: Vec::new(),
            orientations: Vec::new(),
            faces: Vec::new(),
            cofaces: Vec::new(),
        }
    }

    /// Number of simplices in this dimension.
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// An oriented manifold-like simplicial complex embedded in Euclidean space.
///
/// The embedding dimension normally equals the complex dimension `n`; closed
/// complexes (rings, surfaces) may be embedded in a higher-dimensional space,
/// in which case the purely combinatorial operators remain available but the
/// ambient orientation of dual cells defaults to positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    dim: usize,
    vertices: Vec<DVector<f64>>,
    simplices: Vec<SimplexSet>,
    /// boundary[k]: indices of k-simplices on the boundary, ascending.
    boundary: Vec<Vec<usize>>,
    /// Induced orientation sign of each boundary (n-1)-simplex, aligned with
    /// `boundary[n-1]`: the coefficient with which the face appears in the
    /// oriented boundary of its unique containing n-simplex.
    boundary_face_signs: Vec<i8>,
}

impl SimplicialComplex {
    /// Build a complex of dimension `dim` from vertices and simplex tuples.
    ///
    /// Rows of length `dim + 1` are top simplices in the orientation given by
    /// the tuple order. Shorter rows are explicitly supplied lower simplices;
    /// they must turn out to be faces of some top simplex, otherwise the
    /// complex is rejected as non-manifold (dangling simplex).
    pub fn build(
        dim: usize,
        vertices: Vec<Vec<f64>>,
        simplices: Vec<Vec<usize>>,
    ) -> Result<Self, MeshError> {
        assert!(dim >= 1, "complex dimension must be at least 1");
        let ambient = vertices.first().map(|v| v.len()).unwrap_or(0);
        if ambient < dim {
            return Err(MeshError::BadEmbedding { ambient, dim });
        }
        let vertices: Vec<DVector<f64>> = vertices
            .into_iter()
            .map(DVector::from_vec)
            .collect();

        let mut top: Vec<Vec<usize>> = Vec::new();
        let mut extra_lower: Vec<Vec<usize>> = Vec::new();
        for row in simplices {
            if row.len() == dim + 1 {
                top.push(row);
            } else if !row.is_empty() && row.len() <= dim {
                extra_lower.push(row);
            } else {
                return Err(MeshError::BadSimplexArity {
                    got: row.len(),
                    dim,
                });
            }
        }
        for row in top.iter().chain(extra_lower.iter()) {
            for &v in row {
                if v >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        index: v,
                        count: vertices.len(),
                    });
                }
            }
        }

        let mut sets: Vec<SimplexSet> = (0..=dim).map(|_| SimplexSet::empty()).collect();

        // canonicalize top simplices: sorted tuple + permutation parity
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for tuple in &top {
            let (sorted, sign) = canonicalize(tuple).ok_or_else(|| {
                MeshError::NonManifold(format!("repeated vertex in simplex {tuple:?}"))
            })?;
            if seen.insert(sorted.clone(), sets[dim].len()).is_some() {
                return Err(MeshError::NonManifold(format!(
                    "duplicate {dim}-simplex {sorted:?}"
                )));
            }
            sets[dim].tuples.push(sorted);
            sets[dim].orientations.push(sign);
        }

        // enumerate faces level by level, first-seen order
        for k in (1..=dim).rev() {
            let mut index_of: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut lower = SimplexSet::empty();
            let upper_len = sets[k].len();
            let mut faces: Vec<Vec<(usize, i8)>> = Vec::with_capacity(upper_len);
            for i in 0..upper_len {
                let tuple = sets[k].tuples[i].clone();
                let orient = sets[k].orientations[i];
                let mut one: Vec<(usize, i8)> = Vec::with_capacity(k + 1);
                for omit in 0..=k {
                    let face: Vec<usize> = tuple
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != omit)
                        .map(|(_, &v)| v)
                        .collect();
                    let idx = *index_of.entry(face.clone()).or_insert_with(|| {
                        lower.tuples.push(face);
                        lower.orientations.push(1);
                        lower.tuples.len() - 1
                    });
                    let sign = if omit % 2 == 0 { orient } else { -orient };
                    one.push((idx, sign));
                }
                faces.push(one);
            }
            sets[k].faces = faces;
            sets[k - 1] = lower;
        }

        // 0-simplices are exactly the vertices, in order
        {
            let enumerated = std::mem::take(&mut sets[0]);
            let mut vertex_set = SimplexSet::empty();
            vertex_set.tuples = (0..vertices.len()).map(|v| vec![v]).collect();
            vertex_set.orientations = vec![1; vertices.len()];
            // remap 1-simplex faces to vertex indices
            let remap: Vec<usize> = enumerated.tuples.iter().map(|t| t[0]).collect();
            for face_list in &mut sets[1].faces {
                for entry in face_list.iter_mut() {
                    entry.0 = remap[entry.0];
                }
            }
            // manifold-like: every vertex must appear in some top simplex
            let mut used = vec![false; vertices.len()];
            for t in &sets[dim].tuples {
                for &v in t {
                    used[v] = true;
                }
            }
            if let Some(v) = used.iter().position(|u| !u) {
                return Err(MeshError::NonManifold(format!(
                    "vertex {v} is not a face of any {dim}-simplex"
                )));
            }
            sets[0] = vertex_set;
        }

        // cofaces
        for k in 1..=dim {
            let mut cofaces: Vec<Vec<(usize, i8)>> = vec![Vec::new(); sets[k - 1].len()];
            for (upper, faces) in sets[k].faces.iter().enumerate() {
                for &(face, sign) in faces {
                    cofaces[face].push((upper, sign));
                }
            }
            sets[k - 1].cofaces = cofaces;
        }

        // explicitly supplied lower simplices must already be faces
        for row in &extra_lower {
            let (sorted, _) = canonicalize(row).ok_or_else(|| {
                MeshError::NonManifold(format!("repeated vertex in simplex {row:?}"))
            })?;
            let k = sorted.len() - 1;
            if !sets[k].tuples.contains(&sorted) {
                return Err(MeshError::NonManifold(format!(
                    "dangling {k}-simplex {sorted:?} is not a face of any {dim}-simplex"
                )));
            }
        }

        // manifold-like: each (n-1)-face belongs to one or two n-simplices,
        // and adjacent n-simplices induce opposite orientations on it
        let mut boundary_faces: Vec<usize> = Vec::new();
        let mut face_signs: Vec<i8> = Vec::new();
        for (face, cofaces) in sets[dim - 1].cofaces.iter().enumerate() {
            match cofaces.len() {
                1 => {
                    boundary_faces.push(face);
                    face_signs.push(cofaces[0].1);
                }
                2 => {
                    if cofaces[0].1 == cofaces[1].1 {
                        return Err(MeshError::InconsistentOrientation {
                            n: dim,
                            a: cofaces[0].0,
                            b: cofaces[1].0,
                        });
                    }
                }
                m => {
                    return Err(MeshError::NonManifold(format!(
                        "{}-simplex {:?} is shared by {m} {dim}-simplices",
                        dim - 1,
                        sets[dim - 1].tuples[face],
                    )));
                }
            }
        }

        // degenerate top simplices
        for (i, tuple) in sets[dim].tuples.iter().enumerate() {
            let pts: Vec<DVector<f64>> = tuple.iter().map(|&v| vertices[v].clone()).collect();
            let vol = geometry::simplex_measure(&pts);
            let diam = geometry::simplex_diameter(&pts);
            if vol < DEGENERACY_TOL * diam.powi(dim as i32) {
                return Err(MeshError::DegenerateSimplex {
                    dim,
                    index: i,
                    volume: vol,
                });
            }
        }

        // close the boundary complex: all faces of boundary faces
        let mut boundary: Vec<Vec<usize>> = vec![Vec::new(); dim];
        {
            let mut on_boundary: Vec<Vec<bool>> =
                (0..dim).map(|k| vec![false; sets[k].len()]).collect();
            for &f in &boundary_faces {
                on_boundary[dim - 1][f] = true;
            }
            for k in (1..dim).rev() {
                for s in 0..sets[k].len() {
                    if on_boundary[k][s] {
                        for &(face, _) in &sets[k].faces[s] {
                            on_boundary[k - 1][face] = true;
                        }
                    }
                }
            }
            for k in 0..dim {
                boundary[k] = on_boundary[k]
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect();
            }
        }
        // keep the induced-orientation signs aligned with ascending boundary order
        let mut sign_of: HashMap<usize, i8> = HashMap::new();
        for (f, s) in boundary_faces.iter().zip(&face_signs) {
            sign_of.insert(*f, *s);
        }
        let boundary_face_signs = boundary[dim - 1].iter().map(|f| sign_of[f]).collect();

        Ok(SimplicialComplex {
            dim,
            vertices,
            simplices: sets,
            boundary,
            boundary_face_signs,
        })
    }

    /// Complex (and top simplex) dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the embedding space.
    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    /// Simplices of dimension k.
    pub fn simplices(&self, k: usize) -> &SimplexSet {
        &self.simplices[k]
    }

    /// Number of k-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.simplices[k].len()
    }

    /// Indices of k-simplices on the boundary sub-complex, ascending.
    /// Empty slice for a closed complex.
    pub fn boundary(&self, k: usize) -> &[usize] {
        &self.boundary[k]
    }

    /// Number of boundary k-simplices.
    pub fn boundary_count(&self, k: usize) -> usize {
        self.boundary[k].len()
    }

    /// Induced orientation sign per boundary (n-1)-simplex, aligned with
    /// `boundary(n-1)`.
    pub fn boundary_face_signs(&self) -> &[i8] {
        &self.boundary_face_signs
    }

    /// Position of k-simplex `index` within the boundary list, if on ∂K.
    pub fn boundary_position(&self, k: usize, index: usize) -> Option<usize> {
        self.boundary[k].binary_search(&index).ok()
    }

    /// Coordinates of the vertices of a k-simplex, canonical order.
    pub fn simplex_points(&self, k: usize, index: usize) -> Vec<DVector<f64>> {
        self.simplices[k].tuples[index]
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect()
    }

    /// Unsigned measure |σ^k|.
    pub fn simplex_measure(&self, k: usize, index: usize) -> f64 {
        geometry::simplex_measure(&self.simplex_points(k, index))
    }

    /// Circumcenter of a k-simplex.
    pub fn circumcenter(&self, k: usize, index: usize) -> Result<DVector<f64>, MeshError> {
        geometry::circumcenter(&self.simplex_points(k, index)).map_err(|e| at_index(e, index))
    }

    /// Check whether every simplex of every dimension contains its
    /// circumcenter strictly in its interior. Reports offenders instead of
    /// failing.
    pub fn is_well_centered(&self) -> (bool, Vec<(usize, usize)>) {
        let mut offenders = Vec::new();
        for k in 2..=self.dim {
            for i in 0..self.count(k) {
                let pts = self.simplex_points(k, i);
                match geometry::circumcenter_with_barycentric(&pts) {
                    Ok((_, bary)) => {
                        if bary.iter().any(|&b| b < WELL_CENTERED_TOL) {
                            offenders.push((k, i));
                        }
                    }
                    Err(_) => offenders.push((k, i)),
                }
            }
        }
        (offenders.is_empty(), offenders)
    }

    /// Total n-dimensional measure |K|.
    pub fn total_measure(&self) -> f64 {
        (0..self.count(self.dim))
            .map(|i| self.simplex_measure(self.dim, i))
            .sum()
    }

    /// The tuples of top simplices in their input orientation (canonical
    /// tuple with the stored sign applied by swapping the first pair when
    /// negative). Feeding these back into `build` reproduces the complex.
    pub fn oriented_top_tuples(&self) -> Vec<Vec<usize>> {
        self.simplices[self.dim]
            .tuples
            .iter()
            .zip(&self.simplices[self.dim].orientations)
            .map(|(t, &s)| {
                let mut t = t.clone();
                if s < 0 {
                    t.swap(0, 1);
                }
                t
            })
            .collect()
    }
}

/// Sort a vertex tuple ascending and return the permutation parity, or None
/// if a vertex repeats.
fn canonicalize(tuple: &[usize]) -> Option<(Vec<usize>, i8)> {
    let mut indexed: Vec<(usize, usize)> = tuple.iter().copied().enumerate().collect();
    indexed.sort_by_key(|&(_, v)| v);
    for w in indexed.windows(2) {
        if w[0].1 == w[1].1 {
            return None;
        }
    }
    // count inversions of the permutation
    let perm: Vec<usize> = indexed.iter().map(|&(i, _)| i).collect();
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    Some((indexed.into_iter().map(|(_, v)| v).collect(), sign))
}

fn at_index(e: MeshError, index: usize) -> MeshError {
    match e {
        MeshError::DegenerateSimplex { dim, volume, .. } => MeshError::DegenerateSimplex {
            dim,
            index,
            volume,
        },
        other => other,
    }
}

/// Uniform 1D chain on [a, b] with `n_cells` edges.
pub fn uniform_interval(a: f64, b: f64, n_cells: usize) -> SimplicialComplex {
    assert!(n_cells >= 1 && b > a);
    let h = (b - a) / n_cells as f64;
    let vertices: Vec<Vec<f64>> = (0..=n_cells).map(|i| vec![a + i as f64 * h]).collect();
    let edges: Vec<Vec<usize>> = (0..n_cells).map(|i| vec![i, i + 1]).collect();
    SimplicialComplex::build(1, vertices, edges).expect("uniform interval is always valid")
}

/// The five-triangle pentagon mesh: a regular pentagon with radius `radius`
/// fanned around its center, counterclockwise. Vertex 0 is the center.
pub fn pentagon(radius: f64) -> SimplicialComplex {
    let mut vertices = vec![vec![0.0, 0.0]];
    for k in 0..5 {
        let theta = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 5.0;
        vertices.push(vec![radius * theta.cos(), radius * theta.sin()]);
    }
    let triangles: Vec<Vec<usize>> = (1..=5).map(|i| vec![0, i, i % 5 + 1]).collect();
    SimplicialComplex::build(2, vertices, triangles).expect("pentagon mesh is always valid")
}

/// Two regular tetrahedra glued along an equilateral face; the smallest
/// well-centered 3D test complex.
pub fn two_tets() -> SimplicialComplex {
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    let vertices = vec![
        vec![1.0, 0.0, 0.0],
        vec![-0.5, s3 / 2.0, 0.0],
        vec![-0.5, -s3 / 2.0, 0.0],
        vec![0.0, 0.0, s2],
        vec![0.0, 0.0, -s2],
    ];
    let tets = vec![vec![0, 1, 2, 3], vec![0, 2, 1, 4]];
    SimplicialComplex::build(3, vertices, tets).expect("two-tet mesh is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smallest_chain() {
        let k = SimplicialComplex::build(
            1,
            vec![vec![0.0], vec![0.5], vec![1.0]],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert_eq!(k.count(0), 3);
        assert_eq!(k.count(1), 2);
        assert_eq!(k.boundary(0), &[0, 2]);
        assert_eq!(k.boundary_face_signs(), &[-1, 1]);
        assert_relative_eq!(k.total_measure(), 1.0);
    }

    #[test]
    fn pentagon_counts() {
        let k = pentagon(1.0);
        assert_eq!(k.count(0), 6);
        assert_eq!(k.count(1), 10);
        assert_eq!(k.count(2), 5);
        assert_eq!(k.boundary_count(1), 5);
        assert_eq!(k.boundary_count(0), 5);
        let (wc, offenders) = k.is_well_centered();
        assert!(wc, "pentagon should be well-centered, got {offenders:?}");
    }

    #[test]
    fn two_tets_counts() {
        let k = two_tets();
        assert_eq!(k.count(0), 5);
        assert_eq!(k.count(1), 9);
        assert_eq!(k.count(2), 7);
        assert_eq!(k.count(3), 2);
        assert_eq!(k.boundary_count(2), 6);
        let (wc, offenders) = k.is_well_centered();
        assert!(wc, "two regular tets should be well-centered: {offenders:?}");
    }

    #[test]
    fn dangling_simplex_rejected() {
        // two triangles sharing one vertex plus an isolated edge
        let vertices = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
            vec![2.0, 2.0],
            vec![3.0, 2.0],
        ];
        let simplices = vec![vec![0, 1, 2], vec![0, 3, 4], vec![5, 6]];
        let err = SimplicialComplex::build(2, vertices, simplices).unwrap_err();
        assert!(matches!(err, MeshError::NonManifold(_)), "got {err:?}");
    }

    #[test]
    fn overshared_face_rejected() {
        // three triangles sharing the edge (0, 1)
        let vertices = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 1.0],
            vec![0.5, -1.0],
            vec![0.5, 2.0],
        ];
        let simplices = vec![vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]];
        let err = SimplicialComplex::build(2, vertices, simplices).unwrap_err();
        assert!(matches!(err, MeshError::NonManifold(_)), "got {err:?}");
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let vertices = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        // second triangle wound clockwise: same induced sign on shared edge
        let simplices = vec![vec![0, 1, 2], vec![1, 2, 3]];
        let err = SimplicialComplex::build(2, vertices, simplices).unwrap_err();
        assert!(
            matches!(err, MeshError::InconsistentOrientation { .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn degenerate_simplex_rejected() {
        let vertices = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        let err = SimplicialComplex::build(2, vertices, vec![vec![0, 1, 2]]).unwrap_err();
        assert!(
            matches!(err, MeshError::DegenerateSimplex { .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn right_triangle_not_well_centered() {
        let k = SimplicialComplex::build(
            2,
            vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let (wc, offenders) = k.is_well_centered();
        assert!(!wc);
        assert_eq!(offenders, vec![(2, 0)]);
    }

    #[test]
    fn chains_are_well_centered() {
        let k = uniform_interval(0.0, 1.0, 7);
        assert!(k.is_well_centered().0);
    }

    #[test]
    fn closed_ring_has_empty_boundary() {
        // hexagonal ring embedded in the plane: a closed 1-complex
        let vertices: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 6.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let edges: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        let k = SimplicialComplex::build(1, vertices, edges).unwrap();
        assert_eq!(k.boundary_count(0), 0);
    }

    #[test]
    fn rebuild_from_enumeration_is_identical() {
        let k = pentagon(1.0);
        let rebuilt = SimplicialComplex::build(
            2,
            k.vertices().iter().map(|v| v.as_slice().to_vec()).collect(),
            k.oriented_top_tuples(),
        )
        .unwrap();
        assert_eq!(k, rebuilt);
    }

    #[test]
    fn orientation_parity() {
        assert_eq!(canonicalize(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(canonicalize(&[1, 0, 2]), Some((vec![0, 1, 2], -1)));
        assert_eq!(canonicalize(&[0, 1]), Some((vec![0, 1], 1)));
        assert_eq!(canonicalize(&[1, 1]), None);
    }
}
