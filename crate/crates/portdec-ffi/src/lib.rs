#![allow(clippy::missing_safety_doc)]

//! C ABI for the portdec library: opaque handles, integer status codes, and
//! a thread-local error message. All functions are safe to call from any
//! thread as long as each handle is used from one thread at a time.
//!
//! Ownership rules: every `pd_*_new`-style constructor hands ownership of
//! the returned handle to the caller, who must release it with the matching
//! `pd_*_free`. Output buffers are caller-allocated; the `len` arguments
//! name their capacity in elements.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use nalgebra::DVector;
use portdec::complex::{uniform_interval, SimplicialComplex};
use portdec::dual::DualComplex;
use portdec::models::{BoundaryPort, PhsModel, PortSignal};
use portdec::operators::OperatorSet;
use portdec::sim::{exact_telegraph, simulate, Trajectory};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Utf8 = 3,
    Parse = 4,
    Mesh = 5,
    Model = 6,
    Sim = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message.replace('\0', " ")).unwrap();
    });
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// A validated simplicial complex with its circumcentric dual and operator
/// set.
pub struct PdMesh {
    complex: SimplicialComplex,
    dual: DualComplex,
    ops: OperatorSet,
}

/// A port-Hamiltonian model plus its boundary port wiring.
pub struct PdModel {
    model: PhsModel,
    port: BoundaryPort,
}

/// A recorded simulation run.
pub struct PdTrajectory {
    traj: Trajectory,
}

fn mesh_from_complex(complex: SimplicialComplex, out: *mut *mut PdMesh) -> PdStatus {
    let dual = match DualComplex::build(&complex) {
        Ok(d) => d,
        Err(e) => {
            set_error(e.to_string());
            return PdStatus::Mesh;
        }
    };
    let ops = match OperatorSet::assemble(&complex, &dual) {
        Ok(o) => o,
        Err(e) => {
            set_error(e.to_string());
            return PdStatus::Mesh;
        }
    };
    let mesh = Box::new(PdMesh { complex, dual, ops });
    unsafe { *out = Box::into_raw(mesh) };
    PdStatus::Ok
}

/// Build the uniform 1D chain on [a, b] with `n_cells` edges.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_uniform_interval(
    a: f64,
    b: f64,
    n_cells: usize,
    out: *mut *mut PdMesh,
) -> PdStatus {
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    if !a.is_finite() || !b.is_finite() || b <= a || n_cells == 0 {
        set_error("uniform interval needs b > a and n_cells > 0");
        return PdStatus::InvalidArgument;
    }
    mesh_from_complex(uniform_interval(a, b, n_cells), out)
}

/// Parse a mesh from its JSON document
/// `{ "dim": n, "vertices": [[x, ...]], "simplices": [[i0, ..., in]] }`.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_from_json(
    text: *const c_char,
    out: *mut *mut PdMesh,
) -> PdStatus {
    if text.is_null() || out.is_null() {
        return PdStatus::NullArgument;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("mesh JSON is not valid UTF-8");
            return PdStatus::Utf8;
        }
    };
    let file: portdec::cli::MeshFile = match serde_json_from_str(text) {
        Ok(f) => f,
        Err(message) => {
            set_error(message);
            return PdStatus::Parse;
        }
    };
    match SimplicialComplex::build(file.dim, file.vertices, file.simplices) {
        Ok(complex) => mesh_from_complex(complex, out),
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Mesh
        }
    }
}

fn serde_json_from_str(text: &str) -> Result<portdec::cli::MeshFile, String> {
    // route through the library's own reader semantics
    let tmp: Result<portdec::cli::MeshFile, _> = serde_json::from_str(text);
    tmp.map_err(|e| format!("{e}"))
}


#[no_mangle]
pub unsafe extern "C" fn pd_mesh_free(mesh: *mut PdMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Complex dimension n.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_dim(mesh: *const PdMesh, out: *mut usize) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    *out = mesh.complex.dim();
    PdStatus::Ok
}

/// Number of k-simplices.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_count(
    mesh: *const PdMesh,
    k: usize,
    out: *mut usize,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    if k > mesh.complex.dim() {
        set_error("simplex dimension out of range");
        return PdStatus::InvalidArgument;
    }
    *out = mesh.complex.count(k);
    PdStatus::Ok
}

/// Number of boundary k-simplices.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_boundary_count(
    mesh: *const PdMesh,
    k: usize,
    out: *mut usize,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    if k >= mesh.complex.dim() {
        set_error("boundary dimension out of range");
        return PdStatus::InvalidArgument;
    }
    *out = mesh.complex.boundary_count(k);
    PdStatus::Ok
}

/// 1 when every simplex contains its circumcenter strictly inside.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_well_centered(
    mesh: *const PdMesh,
    out: *mut i32,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    *out = i32::from(mesh.complex.is_well_centered().0);
    PdStatus::Ok
}

/// Material profile for the telegraph constructors.
#[repr(C)]
#[derive(Clone, Copy)]
pub enum PdMaterial {
    /// Constant value.
    Constant = 0,
    /// The benchmark profile 1 / (1 + z); the value argument is ignored.
    PaperLine = 1,
}

fn material_fn(kind: PdMaterial, value: f64) -> Box<dyn Fn(f64) -> f64> {
    match kind {
        PdMaterial::Constant => Box::new(move |_| value),
        PdMaterial::PaperLine => Box::new(|z| 1.0 / (1.0 + z)),
    }
}

fn model_out(model: PhsModel, out: *mut *mut PdModel) -> PdStatus {
    let port = BoundaryPort::zero(&model);
    unsafe { *out = Box::into_raw(Box::new(PdModel { model, port })) };
    PdStatus::Ok
}

/// Telegraph line on a 1D mesh with distributed capacitance and inductance.
#[no_mangle]
pub unsafe extern "C" fn pd_model_telegraph(
    mesh: *const PdMesh,
    capacitance: PdMaterial,
    capacitance_value: f64,
    inductance: PdMaterial,
    inductance_value: f64,
    out: *mut *mut PdModel,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    let c = material_fn(capacitance, capacitance_value);
    let l = material_fn(inductance, inductance_value);
    match portdec::models::assemble_telegraph(
        &mesh.complex,
        &mesh.dual,
        &mesh.ops,
        c.as_ref(),
        l.as_ref(),
    ) {
        Ok(m) => model_out(m, out),
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Model
        }
    }
}

/// Normalized 2D wave equation on a well-centered 2D mesh.
#[no_mangle]
pub unsafe extern "C" fn pd_model_wave2d(
    mesh: *const PdMesh,
    out: *mut *mut PdModel,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    match portdec::models::assemble_wave2d(&mesh.complex, &mesh.dual, &mesh.ops) {
        Ok(m) => model_out(m, out),
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Model
        }
    }
}

/// Diffusion with resistive port termination (R >= 0).
#[no_mangle]
pub unsafe extern "C" fn pd_model_diffusion(
    mesh: *const PdMesh,
    r: f64,
    out: *mut *mut PdModel,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    match portdec::models::assemble_diffusion(&mesh.complex, &mesh.dual, &mesh.ops, r) {
        Ok(m) => model_out(m, out),
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Model
        }
    }
}

/// Vacuum Maxwell equations on a well-centered 3D mesh.
#[no_mangle]
pub unsafe extern "C" fn pd_model_maxwell(
    mesh: *const PdMesh,
    epsilon: f64,
    mu: f64,
    out: *mut *mut PdModel,
) -> PdStatus {
    let Some(mesh) = mesh.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    match portdec::models::assemble_maxwell(&mesh.complex, &mesh.dual, &mesh.ops, epsilon, mu) {
        Ok(m) => model_out(m, out),
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Model
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn pd_model_free(model: *mut PdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Dimension of the stacked state vector.
#[no_mangle]
pub unsafe extern "C" fn pd_model_state_dim(
    model: *const PdModel,
    out: *mut usize,
) -> PdStatus {
    let Some(model) = model.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    *out = model.model.state_dim();
    PdStatus::Ok
}

/// Number of boundary ports.
#[no_mangle]
pub unsafe extern "C" fn pd_model_port_count(
    model: *const PdModel,
    out: *mut usize,
) -> PdStatus {
    let Some(model) = model.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    *out = model.model.port_count();
    PdStatus::Ok
}

/// Kind tag for `pd_model_set_signal`.
#[repr(C)]
#[derive(Clone, Copy)]
pub enum PdSignal {
    Zero = 0,
    /// value = a
    Constant = 1,
    /// a * sin(b t), zero before t = 0
    Sine = 2,
    /// a for t >= b
    Step = 3,
    /// output-feedback load of resistance a
    Load = 4,
}

/// Wire a boundary port with a signal; parameters a and b depend on the
/// signal kind.
#[no_mangle]
pub unsafe extern "C" fn pd_model_set_signal(
    model: *mut PdModel,
    port: usize,
    kind: PdSignal,
    a: f64,
    b: f64,
) -> PdStatus {
    let Some(model) = model.as_mut() else {
        return PdStatus::NullArgument;
    };
    if port >= model.model.port_count() {
        set_error("port index out of range");
        return PdStatus::InvalidArgument;
    }
    model.port.signals[port] = match kind {
        PdSignal::Zero => PortSignal::Zero,
        PdSignal::Constant => PortSignal::Constant(a),
        PdSignal::Sine => PortSignal::Sine {
            amplitude: a,
            omega: b,
        },
        PdSignal::Step => PortSignal::Step { height: a, at: b },
        PdSignal::Load => PortSignal::LoadFeedback { resistance: a },
    };
    PdStatus::Ok
}

/// Quadratic Hamiltonian of a state vector.
#[no_mangle]
pub unsafe extern "C" fn pd_model_hamiltonian(
    model: *const PdModel,
    state: *const f64,
    len: usize,
    out: *mut f64,
) -> PdStatus {
    let Some(model) = model.as_ref() else {
        return PdStatus::NullArgument;
    };
    if state.is_null() || out.is_null() {
        return PdStatus::NullArgument;
    }
    let x = DVector::from_column_slice(std::slice::from_raw_parts(state, len));
    match model.model.hamiltonian(&x) {
        Ok(h) => {
            *out = h;
            PdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Model
        }
    }
}

/// Verify the model's Dirac structure: isotropy of random structure
/// elements and the dimension bookkeeping.
#[no_mangle]
pub unsafe extern "C" fn pd_dirac_verify(
    model: *const PdModel,
    trials: usize,
    seed: u64,
    max_residual: *mut f64,
    pass: *mut i32,
) -> PdStatus {
    use rand::SeedableRng;
    let Some(model) = model.as_ref() else {
        return PdStatus::NullArgument;
    };
    if max_residual.is_null() || pass.is_null() {
        return PdStatus::NullArgument;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let report = model.model.dirac.verify(trials, &mut rng);
    *max_residual = report.max_isotropy_residual;
    *pass = i32::from(report.pass());
    PdStatus::Ok
}


/// Integrate with RK4. `initial` may be null for the zero state.
#[no_mangle]
pub unsafe extern "C" fn pd_simulate(
    model: *const PdModel,
    dt: f64,
    t_final: f64,
    initial: *const f64,
    initial_len: usize,
    out: *mut *mut PdTrajectory,
) -> PdStatus {
    let Some(model) = model.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    let x0 = if initial.is_null() {
        None
    } else {
        Some(DVector::from_column_slice(std::slice::from_raw_parts(
            initial,
            initial_len,
        )))
    };
    match simulate(&model.model, &model.port, dt, t_final, x0) {
        Ok(traj) => {
            *out = Box::into_raw(Box::new(PdTrajectory { traj }));
            PdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            PdStatus::Sim
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_free(traj: *mut PdTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of recorded time steps (including t = 0).
#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_len(
    traj: *const PdTrajectory,
    out: *mut usize,
) -> PdStatus {
    let Some(traj) = traj.as_ref() else {
        return PdStatus::NullArgument;
    };
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    *out = traj.traj.len();
    PdStatus::Ok
}

unsafe fn copy_series(series: &[f64], buf: *mut f64, len: usize) -> PdStatus {
    if buf.is_null() {
        return PdStatus::NullArgument;
    }
    if len < series.len() {
        set_error("output buffer too small");
        return PdStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(series.as_ptr(), buf, series.len());
    PdStatus::Ok
}

/// Copy the time grid into `buf` (capacity `len`).
#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_times(
    traj: *const PdTrajectory,
    buf: *mut f64,
    len: usize,
) -> PdStatus {
    let Some(traj) = traj.as_ref() else {
        return PdStatus::NullArgument;
    };
    copy_series(&traj.traj.times, buf, len)
}

/// Copy the Hamiltonian series into `buf`.
#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_hamiltonian(
    traj: *const PdTrajectory,
    buf: *mut f64,
    len: usize,
) -> PdStatus {
    let Some(traj) = traj.as_ref() else {
        return PdStatus::NullArgument;
    };
    copy_series(&traj.traj.hamiltonian, buf, len)
}

/// Copy the boundary power series into `buf`.
#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_boundary_power(
    traj: *const PdTrajectory,
    buf: *mut f64,
    len: usize,
) -> PdStatus {
    let Some(traj) = traj.as_ref() else {
        return PdStatus::NullArgument;
    };
    copy_series(&traj.traj.boundary_power, buf, len)
}

/// Copy the RK4-integrated cumulative boundary energy inflow into `buf`.
#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_energy_inflow(
    traj: *const PdTrajectory,
    buf: *mut f64,
    len: usize,
) -> PdStatus {
    let Some(traj) = traj.as_ref() else {
        return PdStatus::NullArgument;
    };
    copy_series(&traj.traj.energy_inflow, buf, len)
}

/// Copy the state at one recorded step into `buf`.
#[no_mangle]
pub unsafe extern "C" fn pd_trajectory_state(
    traj: *const PdTrajectory,
    step: usize,
    buf: *mut f64,
    len: usize,
) -> PdStatus {
    let Some(traj) = traj.as_ref() else {
        return PdStatus::NullArgument;
    };
    if step >= traj.traj.len() {
        set_error("step out of range");
        return PdStatus::InvalidArgument;
    }
    copy_series(traj.traj.states[step].as_slice(), buf, len)
}

/// Exact benchmark voltage u(t - ln(z+1)) with u = sin, causal.
#[no_mangle]
pub unsafe extern "C" fn pd_exact_telegraph_sine(t: f64, z: f64, out: *mut f64) -> PdStatus {
    if out.is_null() {
        return PdStatus::NullArgument;
    }
    match exact_telegraph(&f64::sin, t, z) {
        Ok(v) => {
            *out = v;
            PdStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            PdStatus::InvalidArgument
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_lifecycle_through_c_abi() {
        unsafe {
            let mut mesh: *mut PdMesh = ptr::null_mut();
            let status = pd_mesh_uniform_interval(0.0, 1.0, 10, &mut mesh);
            assert!(matches!(status, PdStatus::Ok));
            let mut dim = 0usize;
            assert!(matches!(pd_mesh_dim(mesh, &mut dim), PdStatus::Ok));
            assert_eq!(dim, 1);
            let mut count = 0usize;
            pd_mesh_count(mesh, 0, &mut count);
            assert_eq!(count, 11);
            pd_mesh_boundary_count(mesh, 0, &mut count);
            assert_eq!(count, 2);
            let mut wc = 0i32;
            pd_mesh_well_centered(mesh, &mut wc);
            assert_eq!(wc, 1);
            pd_mesh_free(mesh);
        }
    }

    #[test]
    fn json_mesh_and_errors() {
        unsafe {
            let good = CString::new(
                r#"{"dim": 1, "vertices": [[0.0], [1.0]], "simplices": [[0, 1]]}"#,
            )
            .unwrap();
            let mut mesh: *mut PdMesh = ptr::null_mut();
            assert!(matches!(
                pd_mesh_from_json(good.as_ptr(), &mut mesh),
                PdStatus::Ok
            ));
            pd_mesh_free(mesh);

            let bad = CString::new(r#"{"dim": 1"#).unwrap();
            let mut mesh2: *mut PdMesh = ptr::null_mut();
            let status = pd_mesh_from_json(bad.as_ptr(), &mut mesh2);
            assert!(matches!(status, PdStatus::Parse));
            let msg = CStr::from_ptr(pd_last_error_message());
            assert!(!msg.to_bytes().is_empty());
        }
    }

    #[test]
    fn benchmark_through_c_abi() {
        unsafe {
            let mut mesh: *mut PdMesh = ptr::null_mut();
            pd_mesh_uniform_interval(0.0, std::f64::consts::E - 1.0, 10, &mut mesh);
            let mut model: *mut PdModel = ptr::null_mut();
            let status = pd_model_telegraph(
                mesh,
                PdMaterial::PaperLine,
                0.0,
                PdMaterial::PaperLine,
                0.0,
                &mut model,
            );
            assert!(matches!(status, PdStatus::Ok));

            let mut ports = 0usize;
            pd_model_port_count(model, &mut ports);
            assert_eq!(ports, 2);
            pd_model_set_signal(model, 0, PdSignal::Sine, 1.0, 1.0);
            pd_model_set_signal(model, 1, PdSignal::Load, 1.0, 0.0);

            let mut residual = f64::NAN;
            let mut pass = 0i32;
            pd_dirac_verify(model, 100, 7, &mut residual, &mut pass);
            assert_eq!(pass, 1);
            assert!(residual < 1e-12);

            let mut traj: *mut PdTrajectory = ptr::null_mut();
            let status = pd_simulate(model, 0.01, 2.0, ptr::null(), 0, &mut traj);
            assert!(matches!(status, PdStatus::Ok));
            let mut len = 0usize;
            pd_trajectory_len(traj, &mut len);
            assert_eq!(len, 201);
            let mut h = vec![0.0; len];
            pd_trajectory_hamiltonian(traj, h.as_mut_ptr(), len);
            assert!(h[0] == 0.0 && h[len - 1] > 0.0);

            let mut state_dim = 0usize;
            pd_model_state_dim(model, &mut state_dim);
            let mut x = vec![0.0; state_dim];
            pd_trajectory_state(traj, len - 1, x.as_mut_ptr(), state_dim);
            let mut h_last = f64::NAN;
            pd_model_hamiltonian(model, x.as_ptr(), state_dim, &mut h_last);
            assert!((h_last - h[len - 1]).abs() < 1e-15);

            pd_trajectory_free(traj);
            pd_model_free(model);
            pd_mesh_free(mesh);
        }
    }

    #[test]
    fn exact_solution_values() {
        unsafe {
            let mut v = f64::NAN;
            assert!(matches!(
                pd_exact_telegraph_sine(2.0, std::f64::consts::E - 1.0, &mut v),
                PdStatus::Ok
            ));
            assert!((v - 1.0f64.sin()).abs() < 1e-15);
            assert!(matches!(
                pd_exact_telegraph_sine(-1.0, 0.0, &mut v),
                PdStatus::InvalidArgument
            ));
        }
    }

    #[test]
    fn null_arguments_reported() {
        unsafe {
            assert!(matches!(
                pd_mesh_uniform_interval(0.0, 1.0, 10, ptr::null_mut()),
                PdStatus::NullArgument
            ));
            let mut dim = 0usize;
            assert!(matches!(
                pd_mesh_dim(ptr::null(), &mut dim),
                PdStatus::NullArgument
            ));
        }
    }
}
