//! Port-Hamiltonian models assembled on simplicial Dirac structures.
//!
//! A model couples a Dirac structure with diagonal positive energy matrices:
//! the Hamiltonian is H(x) = ½ x_pᵀ Q_p x_p + ½ x_qᵀ Q_q x_q in the state
//! (integrated) variables. Co-energies are obtained from the state through
//! the energy matrices together with the degree-dependent wedge signs, so
//! that dH/dt equals the boundary power exactly in continuous time for the
//! lossless models, and is bounded by it under resistive termination.
//!
//! Concrete assemblies:
//! * telegraph line (1D, dual-state, p = q = 1), distributed C(z), L(z);
//! * 2D wave (primal-state, p = n = 2, q = 1);
//! * diffusion (primal-state, p = n, q = 1) with the q-port terminated by a
//!   resistive relation;
//! * vacuum Maxwell (3D, primal-state, p = q = 2) with constant ε, μ.

use nalgebra::DVector;

use crate::complex::SimplicialComplex;
use crate::dirac::{assemble_dirac, DiracBlocks, DiracVariant};
use crate::dual::DualComplex;
use crate::error::ModelError;
use crate::operators::{spmv, OperatorSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Telegraph,
    Wave2d,
    Diffusion,
    Maxwell,
}

/// Resistive termination of the q-port: ê_q = -(-1)^{q(n-q)} R * f_q.
#[derive(Clone, Debug)]
pub struct ResistiveTermination {
    pub r: f64,
    /// Diagonal Hodge M^q applied inside the termination.
    pub hodge_q: DVector<f64>,
}

/// A finite-dimensional port-Hamiltonian model.
#[derive(Clone, Debug)]
pub struct PhsModel {
    pub kind: ModelKind,
    pub dirac: DiracBlocks,
    /// Diagonal of the p-block energy matrix (co-energy = ± Q_p x_p).
    pub q_p: DVector<f64>,
    /// Diagonal of the q-block energy matrix; absent when the q-port is
    /// resistively terminated and carries no state.
    pub q_q: Option<DVector<f64>>,
    pub resistance: Option<ResistiveTermination>,
    /// Orientation record of the boundary ports (induced boundary
    /// orientation; physical port values are sign * stored coefficient).
    pub boundary_signs: Vec<f64>,
    /// Primal simplex index backing each boundary port.
    pub port_simplices: Vec<usize>,
}

impl PhsModel {
    /// Dimension of the stacked state vector.
    pub fn state_dim(&self) -> usize {
        self.q_p.len() + self.q_q.as_ref().map_or(0, |q| q.len())
    }

    /// Number of boundary ports.
    pub fn port_count(&self) -> usize {
        self.boundary_signs.len()
    }

    pub fn is_lossless(&self) -> bool {
        self.resistance.is_none()
    }

    fn split(&self, x: &DVector<f64>) -> (DVector<f64>, Option<DVector<f64>>) {
        let np = self.q_p.len();
        let xp = DVector::from_column_slice(&x.as_slice()[..np]);
        let xq = self
            .q_q
            .as_ref()
            .map(|_| DVector::from_column_slice(&x.as_slice()[np..]));
        (xp, xq)
    }

    /// Sign carried by the q-block co-energy relative to Q_q x_q.
    fn co_energy_signs(&self) -> (f64, f64) {
        let (n, p, q) = (self.dirac.n, self.dirac.p, self.dirac.q);
        match self.dirac.variant {
            DiracVariant::PrimalState => (1.0, sign(q * (n - q))),
            DiracVariant::DualState => (sign(p * (n - p)), 1.0),
        }
    }

    /// Co-energy (effort) vectors fed into the Dirac structure.
    pub fn efforts(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let (xp, xq) = self.split(x);
        let (sp, sq) = self.co_energy_signs();
        let e0 = xp.component_mul(&self.q_p) * sp;
        let e1 = match (&self.q_q, &self.resistance) {
            (Some(qq), _) => xq.expect("q state present").component_mul(qq) * sq,
            (None, Some(term)) => {
                // terminated port: f_q = J_{10} e_p, ê_q = -(-1)^{q(n-q)} R M^q f_q
                let f_q = spmv(self.dirac.block(1, 0).expect("derivative block"), &e0);
                -sq * term.r * f_q.component_mul(&term.hodge_q)
            }
            (None, None) => unreachable!("model must have a q state or a termination"),
        };
        (e0, e1)
    }

    /// State rate and boundary output for boundary input `u` (stored
    /// coefficients, oriented-cell convention).
    pub fn rate(&self, x: &DVector<f64>, u: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let (e0, e1) = self.efforts(x);
        let out = self
            .dirac
            .apply([&e0, &e1, u])
            .expect("model blocks are well-dimensioned");
        let [f0, f1, y] = out;
        let mut xdot = DVector::zeros(self.state_dim());
        for i in 0..f0.len() {
            xdot[i] = -f0[i];
        }
        if self.q_q.is_some() {
            let np = self.q_p.len();
            for i in 0..f1.len() {
                xdot[np + i] = -f1[i];
            }
        }
        (xdot, y)
    }

    /// Boundary output alone (f_b for primal-state, e_b for dual-state).
    pub fn output(&self, x: &DVector<f64>) -> DVector<f64> {
        let (e0, e1) = self.efforts(x);
        let zero_u = DVector::zeros(self.port_count());
        let out = self
            .dirac
            .apply([&e0, &e1, &zero_u])
            .expect("model blocks are well-dimensioned");
        let [_, _, y] = out;
        y
    }

    /// Quadratic Hamiltonian; nonnegative, zero only at the zero state.
    pub fn hamiltonian(&self, x: &DVector<f64>) -> Result<f64, ModelError> {
        if x.len() != self.state_dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.state_dim(),
                got: x.len(),
            });
        }
        let (xp, xq) = self.split(x);
        let mut h = 0.5 * xp.component_mul(&self.q_p).dot(&xp);
        if let (Some(qq), Some(xq)) = (&self.q_q, &xq) {
            h += 0.5 * xq.component_mul(qq).dot(xq);
        }
        Ok(h)
    }

    /// Power supplied through the boundary: the boundary pairing of the
    /// output with the input, with the variant's wedge weight.
    pub fn boundary_power(&self, x: &DVector<f64>, u: &DVector<f64>) -> f64 {
        let y = self.output(x);
        let (_, _, wb) = self.dirac.pairing_weights();
        wb * y.dot(u)
    }

    /// Index into the q-block co-energy backing port `b`, used by load
    /// feedback terminations.
    pub fn port_feedback_index(&self, b: usize) -> usize {
        self.port_simplices[b]
    }

    /// Co-energy of the q block (used by load feedback).
    pub fn q_co_energy(&self, x: &DVector<f64>) -> DVector<f64> {
        let (_, e1) = self.efforts(x);
        e1
    }
}

fn sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn port_signs(complex: &SimplicialComplex, dual: &DualComplex, k: usize) -> Vec<f64> {
    (0..complex.boundary_count(k))
        .map(|b| {
            dual.boundary_cell(k, b)
                .pieces
                .first()
                .map_or(1.0, |p| p.sign as f64)
        })
        .collect()
}

/// Ideal lossless transmission line on a 1D chain: charge on primal edges,
/// flux on dual cells, distributed capacitance C(z) and inductance L(z)
/// sampled at cell circumcenters. Dual-state structure with p = q = 1; the
/// free boundary flow is the voltage at the two boundary nodes and the
/// returned effort is minus the current trace.
pub fn assemble_telegraph(
    complex: &SimplicialComplex,
    dual: &DualComplex,
    ops: &OperatorSet,
    capacitance: &dyn Fn(f64) -> f64,
    inductance: &dyn Fn(f64) -> f64,
) -> Result<PhsModel, ModelError> {
    if complex.dim() != 1 {
        return Err(ModelError::NotOneDimensional(complex.dim()));
    }
    let dirac = assemble_dirac(ops, 1, 1, DiracVariant::DualState)?;

    let n_e = complex.count(1);
    let n_v = complex.count(0);
    let mut q_p = DVector::zeros(n_e);
    for e in 0..n_e {
        let z = dual.circumcenter(1, e)[0];
        let c = capacitance(z);
        if c <= 0.0 {
            return Err(ModelError::NonPositiveMaterial {
                name: "C".into(),
                value: c,
                index: e,
            });
        }
        q_p[e] = ops.hodge(1)[e] / c;
    }
    let mut q_q = DVector::zeros(n_v);
    let m_hat = ops.hodge_dual(0);
    for v in 0..n_v {
        let z = complex.vertices()[v][0];
        let l = inductance(z);
        if l <= 0.0 {
            return Err(ModelError::NonPositiveMaterial {
                name: "L".into(),
                value: l,
                index: v,
            });
        }
        q_q[v] = m_hat[v] / l;
    }

    Ok(PhsModel {
        kind: ModelKind::Telegraph,
        dirac,
        q_p,
        q_q: Some(q_q),
        resistance: None,
        boundary_signs: port_signs(complex, dual, 0),
        port_simplices: complex.boundary(0).to_vec(),
    })
}

/// Normalized 2D wave equation: kinetic momentum on dual 2-cells, strain on
/// primal edges. Primal-state structure with p = n = 2, q = 1.
pub fn assemble_wave2d(
    complex: &SimplicialComplex,
    dual: &DualComplex,
    ops: &OperatorSet,
) -> Result<PhsModel, ModelError> {
    let n = complex.dim();
    if n != 2 {
        return Err(ModelError::WrongDimension {
            expected: 2,
            got: n,
        });
    }
    let dirac = assemble_dirac(ops, 2, 1, DiracVariant::PrimalState)?;
    let q_p = ops.hodge_dual(0);
    let q_q = ops.hodge(1).clone();
    Ok(PhsModel {
        kind: ModelKind::Wave2d,
        dirac,
        q_p,
        q_q: Some(q_q),
        resistance: None,
        boundary_signs: port_signs(complex, dual, 0),
        port_simplices: complex.boundary(0).to_vec(),
    })
}

/// Diffusion with resistive port termination: state on dual n-cells, the
/// gradient port closed by ê_q = -(-1)^{q(n-q)} R * f_q. Primal-state
/// structure with p = n, q = 1; reduces to the compartmental model in 1D.
pub fn assemble_diffusion(
    complex: &SimplicialComplex,
    dual: &DualComplex,
    ops: &OperatorSet,
    r: f64,
) -> Result<PhsModel, ModelError> {
    if r < 0.0 {
        return Err(ModelError::NegativeR(r));
    }
    let n = complex.dim();
    let dirac = assemble_dirac(ops, n, 1, DiracVariant::PrimalState)?;
    let q_p = ops.hodge_dual(0);
    Ok(PhsModel {
        kind: ModelKind::Diffusion,
        dirac,
        q_p,
        q_q: None,
        resistance: Some(ResistiveTermination {
            r,
            hodge_q: ops.hodge(1).clone(),
        }),
        boundary_signs: port_signs(complex, dual, 0),
        port_simplices: complex.boundary(0).to_vec(),
    })
}

/// Vacuum Maxwell equations on a well-centered 3D complex: magnetic
/// induction on primal faces, electric induction on dual 2-cells, constant
/// permittivity and permeability, zero current. Primal-state structure with
/// p = q = 2.
pub fn assemble_maxwell(
    complex: &SimplicialComplex,
    dual: &DualComplex,
    ops: &OperatorSet,
    epsilon: f64,
    mu: f64,
) -> Result<PhsModel, ModelError> {
    if complex.dim() != 3 {
        return Err(ModelError::NotThreeDimensional(complex.dim()));
    }
    if epsilon <= 0.0 {
        return Err(ModelError::NonPositiveMaterial {
            name: "epsilon".into(),
            value: epsilon,
            index: 0,
        });
    }
    if mu <= 0.0 {
        return Err(ModelError::NonPositiveMaterial {
            name: "mu".into(),
            value: mu,
            index: 0,
        });
    }
    let dirac = assemble_dirac(ops, 2, 2, DiracVariant::PrimalState)?;
    // D̂ = * ε E on edges: co-energy E = Q_p x_p with Q_p = (ε M^1)^{-1}
    let q_p = ops.hodge(1).map(|m| 1.0 / (epsilon * m));
    // B = * μ Ĥ on faces: co-energy Ĥ = Q_q x_q with Q_q = M^2 / μ
    let q_q = ops.hodge(2).map(|m| m / mu);
    Ok(PhsModel {
        kind: ModelKind::Maxwell,
        dirac,
        q_p,
        q_q: Some(q_q),
        resistance: None,
        boundary_signs: port_signs(complex, dual, 1),
        port_simplices: complex.boundary(1).to_vec(),
    })
}

/// Per-port boundary signal.
#[derive(Clone, Debug, PartialEq)]
pub enum PortSignal {
    Zero,
    Constant(f64),
    /// amplitude * sin(omega t), zero for t < 0.
    Sine { amplitude: f64, omega: f64 },
    /// height for t >= at, zero before.
    Step { height: f64, at: f64 },
    /// Output-feedback load: the port input is set from the local q-block
    /// co-energy each evaluation, u = R * e_q(port).
    LoadFeedback { resistance: f64 },
}

/// Boundary port wiring: one signal per port plus the sign convention record
/// mapping physical signal values to stored oriented-cell coefficients.
#[derive(Clone, Debug)]
pub struct BoundaryPort {
    pub signals: Vec<PortSignal>,
    pub signs: Vec<f64>,
}

impl BoundaryPort {
    /// All ports silent.
    pub fn zero(model: &PhsModel) -> Self {
        BoundaryPort {
            signals: vec![PortSignal::Zero; model.port_count()],
            signs: model.boundary_signs.clone(),
        }
    }

    pub fn with_signal(mut self, port: usize, signal: PortSignal) -> Self {
        self.signals[port] = signal;
        self
    }

    pub fn has_load(&self) -> bool {
        self.signals
            .iter()
            .any(|s| matches!(s, PortSignal::LoadFeedback { .. }))
    }

    /// Stored input coefficients at time t and state x.
    pub fn evaluate(&self, t: f64, model: &PhsModel, x: &DVector<f64>) -> DVector<f64> {
        let mut u = DVector::zeros(self.signals.len());
        let mut e_q: Option<DVector<f64>> = None;
        for (b, signal) in self.signals.iter().enumerate() {
            u[b] = match signal {
                PortSignal::Zero => 0.0,
                PortSignal::Constant(v) => self.signs[b] * v,
                PortSignal::Sine { amplitude, omega } => {
                    let v = if t >= 0.0 { amplitude * (omega * t).sin() } else { 0.0 };
                    self.signs[b] * v
                }
                PortSignal::Step { height, at } => {
                    let v = if t >= *at { *height } else { 0.0 };
                    self.signs[b] * v
                }
                PortSignal::LoadFeedback { resistance } => {
                    let eq = e_q.get_or_insert_with(|| model.q_co_energy(x));
                    resistance * eq[model.port_feedback_index(b)]
                }
            };
        }
        u
    }
}
