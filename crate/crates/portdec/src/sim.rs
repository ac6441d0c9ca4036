//! Time integration, energy accounting, exact-solution comparison, and
//! convergence-order studies.
//!
//! The integrator is classic fixed-step RK4 with boundary inputs evaluated
//! at the stage times. The cumulative boundary energy inflow is integrated
//! through the same Runge-Kutta pass, so the energy-balance residual
//! H(t) - H(0) - ∫P dt measures only the integrator defect (fourth order
//! globally) and not a quadrature mismatch.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::SimError;
use crate::models::{BoundaryPort, PhsModel};

/// Time series produced by one simulation run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub hamiltonian: Vec<f64>,
    pub boundary_power: Vec<f64>,
    pub inputs: Vec<DVector<f64>>,
    pub outputs: Vec<DVector<f64>>,
    /// Cumulative boundary energy inflow ∫_0^t P, RK4-integrated.
    pub energy_inflow: Vec<f64>,
    /// Set when dt exceeded the estimated stability threshold.
    pub stability_warning: Option<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Worst per-step and worst cumulative energy-balance residual.
    pub fn energy_balance_residuals(&self) -> (f64, f64) {
        let mut per_step: f64 = 0.0;
        let mut cumulative: f64 = 0.0;
        for k in 0..self.len() {
            let res = (self.hamiltonian[k] - self.hamiltonian[0] - self.energy_inflow[k]).abs();
            cumulative = cumulative.max(res);
            if k > 0 {
                let dh = self.hamiltonian[k] - self.hamiltonian[k - 1];
                let de = self.energy_inflow[k] - self.energy_inflow[k - 1];
                per_step = per_step.max((dh - de).abs());
            }
        }
        (per_step, cumulative)
    }
}

/// Estimate the spectral radius of the closed-loop state map by normalized
/// power iteration from a fixed deterministic start vector.
pub fn spectral_radius_estimate(model: &PhsModel, port: &BoundaryPort) -> f64 {
    let dim = model.state_dim();
    if dim == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(dim, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 });
    v /= v.norm();
    let mut rho: f64 = 0.0;
    for iter in 0..80 {
        let (w, _) = model.rate(&v, &port_feedback_only(port, model, &v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        if iter >= 60 {
            rho = rho.max(norm);
        }
        v = w / norm;
    }
    rho
}

/// Inputs with all time signals silenced, keeping only state feedback.
fn port_feedback_only(port: &BoundaryPort, model: &PhsModel, x: &DVector<f64>) -> DVector<f64> {
    use crate::models::PortSignal;
    let mut u = DVector::zeros(port.signals.len());
    for (b, s) in port.signals.iter().enumerate() {
        if let PortSignal::LoadFeedback { resistance } = s {
            u[b] = resistance * model.q_co_energy(x)[model.port_feedback_index(b)];
        }
    }
    u
}

/// RK4 stability margin: dt * spectral radius above this triggers a warning.
pub const RK4_STABILITY_LIMIT: f64 = 2.8;

/// Integrate the model with classic RK4 and record energy bookkeeping.
///
/// `initial` defaults to the zero state. Fails with `UnstableStep` when the
/// Hamiltonian of a lossless run outgrows its energy-balance bound tenfold.
pub fn simulate(
    model: &PhsModel,
    port: &BoundaryPort,
    dt: f64,
    t_final: f64,
    initial: Option<DVector<f64>>,
) -> Result<Trajectory, SimError> {
    if dt <= 0.0 {
        return Err(SimError::NonPositiveStep(dt));
    }
    let dim = model.state_dim();
    let mut x = initial.unwrap_or_else(|| DVector::zeros(dim));
    if x.len() != dim {
        return Err(SimError::Model(
            crate::error::ModelError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            },
        ));
    }

    let rho = spectral_radius_estimate(model, port);
    let stability_warning = if dt * rho > RK4_STABILITY_LIMIT {
        Some(format!(
            "dt * spectral radius = {:.3} exceeds the RK4 stability limit {}",
            dt * rho,
            RK4_STABILITY_LIMIT
        ))
    } else {
        None
    };

    let steps = (t_final / dt).round() as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        boundary_power: Vec::with_capacity(steps + 1),
        inputs: Vec::with_capacity(steps + 1),
        outputs: Vec::with_capacity(steps + 1),
        energy_inflow: Vec::with_capacity(steps + 1),
        stability_warning,
    };

    let lossless = model.is_lossless() && !port.has_load();
    let h0 = model.hamiltonian(&x)?;
    let mut inflow = 0.0;
    let mut inflow_bound = h0.max(1e-9);

    let record = |traj: &mut Trajectory, t: f64, x: &DVector<f64>, inflow: f64| {
        let u = port.evaluate(t, model, x);
        let p = model.boundary_power(x, &u);
        traj.times.push(t);
        traj.states.push(x.clone());
        traj.hamiltonian.push(model.hamiltonian(x).expect("state dims fixed"));
        traj.boundary_power.push(p);
        traj.outputs.push(model.output(x));
        traj.inputs.push(u);
        traj.energy_inflow.push(inflow);
    };
    record(&mut traj, 0.0, &x, inflow);

    // stage evaluation of the augmented system (state, cumulative inflow)
    let stage = |t: f64, x: &DVector<f64>| -> (DVector<f64>, f64) {
        let u = port.evaluate(t, model, x);
        let (xdot, _) = model.rate(x, &u);
        let p = model.boundary_power(x, &u);
        (xdot, p)
    };

    for k in 0..steps {
        let t = k as f64 * dt;
        let (k1, p1) = stage(t, &x);
        let x2 = &x + &k1 * (dt / 2.0);
        let (k2, p2) = stage(t + dt / 2.0, &x2);
        let x3 = &x + &k2 * (dt / 2.0);
        let (k3, p3) = stage(t + dt / 2.0, &x3);
        let x4 = &x + &k3 * dt;
        let (k4, p4) = stage(t + dt, &x4);

        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let dp = (p1 + 2.0 * p2 + 2.0 * p3 + p4) * (dt / 6.0);
        inflow += dp;
        inflow_bound += dp.abs();

        let h = model.hamiltonian(&x)?;
        if lossless && h > 10.0 * inflow_bound {
            return Err(SimError::UnstableStep {
                factor: h / inflow_bound,
            });
        }
        record(&mut traj, (k + 1) as f64 * dt, &x, inflow);
    }
    Ok(traj)
}

/// Exact voltage of the telegraph benchmark: u(t - ln(z + 1)) with causal
/// input (u vanishes for negative arguments, zero initial conditions).
pub fn exact_telegraph(u: &dyn Fn(f64) -> f64, t: f64, z: f64) -> Result<f64, SimError> {
    let z_max = std::f64::consts::E - 1.0;
    if t < 0.0 || z < -1e-12 || z > z_max + 1e-12 {
        return Err(SimError::OutOfDomain { t, z });
    }
    let s = t - (z + 1.0).ln();
    Ok(if s < 0.0 { 0.0 } else { u(s) })
}

/// Pointwise error series of a sampled space-time field against an exact
/// solution, with the location and time of the maximum.
#[derive(Clone, Debug)]
pub struct ErrorReport {
    /// Spatial sample coordinates.
    pub points: Vec<f64>,
    /// errors[k][i] = |numeric - exact| at time k, point i.
    pub errors: Vec<Vec<f64>>,
    /// L2-in-space error per time step.
    pub l2_in_space: Vec<f64>,
    pub max_error: f64,
    pub argmax_point: f64,
    pub argmax_time: f64,
}

/// Compare sampled values (rows: times, cols: points) with an exact field.
pub fn error_report(
    times: &[f64],
    points: &[f64],
    values: &[Vec<f64>],
    exact: &dyn Fn(f64, f64) -> f64,
) -> ErrorReport {
    let mut errors = Vec::with_capacity(times.len());
    let mut l2 = Vec::with_capacity(times.len());
    let mut max_error = 0.0;
    let mut argmax_point = f64::NAN;
    let mut argmax_time = f64::NAN;
    for (k, &t) in times.iter().enumerate() {
        let mut row = Vec::with_capacity(points.len());
        let mut sq = 0.0;
        for (i, &z) in points.iter().enumerate() {
            let err = (values[k][i] - exact(t, z)).abs();
            sq += err * err;
            if err > max_error {
                max_error = err;
                argmax_point = z;
                argmax_time = t;
            }
            row.push(err);
        }
        l2.push((sq / points.len() as f64).sqrt());
        errors.push(row);
    }
    ErrorReport {
        points: points.to_vec(),
        errors,
        l2_in_space: l2,
        max_error,
        argmax_point,
        argmax_time,
    }
}

/// Voltage sample locations of a telegraph model: left boundary node, the
/// dual nodes (edge midpoints) where the voltage co-energy lives, and the
/// right boundary node.
pub fn telegraph_sample_points(complex: &crate::complex::SimplicialComplex) -> Vec<f64> {
    let n_e = complex.count(1);
    let mut pts = Vec::with_capacity(n_e + 2);
    pts.push(complex.vertices()[0][0]);
    for e in 0..n_e {
        let t = &complex.simplices(1).tuples[e];
        pts.push(0.5 * (complex.vertices()[t[0]][0] + complex.vertices()[t[1]][0]));
    }
    pts.push(complex.vertices()[complex.count(0) - 1][0]);
    pts
}

/// Voltage values at the sample points for every recorded time: the
/// prescribed input at the left node, the co-energy *q/C at the dual nodes,
/// and the load voltage at the right node.
pub fn telegraph_voltage_series(model: &PhsModel, traj: &Trajectory) -> Vec<Vec<f64>> {
    let n_p = model.q_p.len();
    let signs = &model.boundary_signs;
    traj.states
        .iter()
        .zip(&traj.inputs)
        .map(|(x, u)| {
            let mut row = Vec::with_capacity(n_p + 2);
            row.push(signs[0] * u[0]);
            for e in 0..n_p {
                row.push(model.q_p[e] * x[e]);
            }
            row.push(signs[1] * u[1]);
            row
        })
        .collect()
}

/// One row of a convergence table.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub max_error: f64,
}

/// Result of a mesh-refinement study.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log(error) against log(h).
    pub slope: f64,
    /// error(n_i) / error(n_{i+1}) for successive rows.
    pub ratios: Vec<f64>,
}

/// Least-squares slope of log(err) vs log(h).
pub fn fit_order(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(h, err) in samples {
        let x = h.ln();
        let y = err.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Run `error_of_n` for every mesh size (in parallel), tabulate max errors,
/// and fit the convergence order. `h_of_n` supplies the mesh width.
pub fn convergence_study<F>(
    n_list: &[usize],
    h_of_n: impl Fn(usize) -> f64,
    error_of_n: F,
) -> Result<ConvergenceStudy, SimError>
where
    F: Fn(usize) -> Result<f64, SimError> + Sync,
{
    if n_list.len() < 3 {
        return Err(SimError::InsufficientPoints(n_list.len()));
    }
    let errors: Result<Vec<f64>, SimError> =
        n_list.par_iter().map(|&n| error_of_n(n)).collect();
    let errors = errors?;
    let rows: Vec<ConvergenceRow> = n_list
        .iter()
        .zip(&errors)
        .map(|(&n, &max_error)| ConvergenceRow {
            n,
            h: h_of_n(n),
            max_error,
        })
        .collect();
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, r.max_error)).collect();
    let slope = fit_order(&samples);
    let ratios = rows
        .windows(2)
        .map(|w| w[0].max_error / w[1].max_error)
        .collect();
    Ok(ConvergenceStudy {
        rows,
        slope,
        ratios,
    })
}

/// Everything needed to run the closed-form telegraph benchmark: the line
/// on [0, e-1] with C(z) = L(z) = 1/(1+z), sine input on the left, unit
/// resistive load on the right, zero initial state.
pub struct TelegraphBenchmark {
    pub complex: crate::complex::SimplicialComplex,
    pub model: PhsModel,
    pub port: BoundaryPort,
}

impl TelegraphBenchmark {
    pub fn build(n_cells: usize) -> Result<Self, SimError> {
        use crate::models::PortSignal;
        let z_max = std::f64::consts::E - 1.0;
        let complex = crate::complex::uniform_interval(0.0, z_max, n_cells);
        let dual = crate::dual::DualComplex::build(&complex).map_err(crate::error::ModelError::from)?;
        let ops = crate::operators::OperatorSet::assemble(&complex, &dual)
            .map_err(|e| crate::error::ModelError::Mesh(crate::error::MeshError::NonManifold(e.to_string())))?;
        let material = |z: f64| 1.0 / (1.0 + z);
        let model =
            crate::models::assemble_telegraph(&complex, &dual, &ops, &material, &material)?;
        let port = BoundaryPort::zero(&model)
            .with_signal(
                0,
                PortSignal::Sine {
                    amplitude: 1.0,
                    omega: 1.0,
                },
            )
            .with_signal(1, PortSignal::LoadFeedback { resistance: 1.0 });
        Ok(TelegraphBenchmark {
            complex,
            model,
            port,
        })
    }

    /// Simulate and report the error against the exact voltage field
    /// (causal: zero ahead of the wave front).
    pub fn run(&self, dt: f64, t_final: f64) -> Result<(Trajectory, ErrorReport), SimError> {
        let traj = simulate(&self.model, &self.port, dt, t_final, None)?;
        let points = telegraph_sample_points(&self.complex);
        let values = telegraph_voltage_series(&self.model, &traj);
        let exact = |t: f64, z: f64| exact_telegraph(&f64::sin, t, z).unwrap_or(0.0);
        let report = error_report(&traj.times, &points, &values, &exact);
        Ok((traj, report))
    }

    /// Error report against the continued input waveform: the numeric
    /// voltage is compared with sin(t - ln(z+1)) for every t >= 0 rather
    /// than with the causal field that vanishes ahead of the front.
    pub fn run_vs_continued_input(
        &self,
        dt: f64,
        t_final: f64,
    ) -> Result<(Trajectory, ErrorReport), SimError> {
        let traj = simulate(&self.model, &self.port, dt, t_final, None)?;
        let points = telegraph_sample_points(&self.complex);
        let values = telegraph_voltage_series(&self.model, &traj);
        let exact = |t: f64, z: f64| (t - (z + 1.0).ln()).sin();
        let report = error_report(&traj.times, &points, &values, &exact);
        Ok((traj, report))
    }

    /// Max voltage error of one benchmark run.
    pub fn max_error(n_cells: usize, dt: f64, t_final: f64) -> Result<f64, SimError> {
        let bench = TelegraphBenchmark::build(n_cells)?;
        let (_, report) = bench.run(dt, t_final)?;
        Ok(report.max_error)
    }
}
