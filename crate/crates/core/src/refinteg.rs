//! Independent numerical references: fixed-step RK4 for trajectories and
//! tensor-product Gauss-Legendre quadrature for inner products.

use crate::dynamics::VectorField;
use crate::error::{KoopmanError, Result};
use crate::polyalg::{poly_mul, Polynomial};

/// States beyond this magnitude count as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectory {
    pub times: Vec<f64>,
    /// `states[k]` is the state at `times[k]`.
    pub states: Vec<Vec<f64>>,
    pub step: f64,
}

impl ReferenceTrajectory {
    /// Time series of one state component.
    pub fn component(&self, var: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[var]).collect()
    }
}

struct Rk4Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Workspace {
    fn new(m: usize) -> Self {
        Rk4Workspace {
            k1: vec![0.0; m],
            k2: vec![0.0; m],
            k3: vec![0.0; m],
            k4: vec![0.0; m],
            tmp: vec![0.0; m],
        }
    }

    fn step(&mut self, vf: &VectorField, x: &mut [f64], h: f64) {
        let m = x.len();
        vf.evaluate_into(x, &mut self.k1);
        for i in 0..m {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        vf.evaluate_into(&self.tmp, &mut self.k2);
        for i in 0..m {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        vf.evaluate_into(&self.tmp, &mut self.k3);
        for i in 0..m {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        vf.evaluate_into(&self.tmp, &mut self.k4);
        for i in 0..m {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Classical RK4 with a fixed internal step. Each requested time is hit
/// exactly by shortening the last sub-step of its interval.
pub fn rk4_integrate(vf: &VectorField, x0: &[f64], times: &[f64], step: f64) -> Result<ReferenceTrajectory> {
    let m = vf.dim();
    if x0.len() != m {
        return Err(KoopmanError::DimensionMismatch {
            expected: m,
            found: x0.len(),
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(KoopmanError::InvalidArgument(format!(
            "integration step must be positive, got {step}"
        )));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KoopmanError::InvalidArgument(
            "times must be finite and strictly increasing".into(),
        ));
    }
    let mut ws = Rk4Workspace::new(m);
    let mut x = x0.to_vec();
    let mut f0 = vec![0.0; m];
    vf.evaluate_into(&x, &mut f0);
    if f0.iter().any(|v| !v.is_finite()) {
        return Err(KoopmanError::NonFinite("vector field at initial state".into()));
    }

    let mut states = Vec::with_capacity(times.len());
    let mut t = times.first().copied().unwrap_or(0.0);
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let full = (span / step).floor() as u64;
            for _ in 0..full {
                ws.step(vf, &mut x, step);
            }
            let rest = span - full as f64 * step;
            if rest > 1e-12 * step {
                ws.step(vf, &mut x, rest);
            }
            if x.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
                return Err(KoopmanError::NonFinite(format!(
                    "reference trajectory diverged before t = {target}"
                )));
            }
        }
        t = target;
        states.push(x.clone());
    }
    Ok(ReferenceTrajectory {
        times: times.to_vec(),
        states,
        step,
    })
}

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-14 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Tensor-product Gauss-Legendre approximation of `∫_{[-1,1]^m} a·b dx`.
pub fn gauss_legendre_inner_product(a: &Polynomial, b: &Polynomial, nodes_per_dim: usize) -> Result<f64> {
    let prod = poly_mul(a, b)?;
    let required = (a.degree() + b.degree()) as usize / 2 + 1;
    if nodes_per_dim < required {
        return Err(KoopmanError::InsufficientNodes {
            required,
            given: nodes_per_dim,
        });
    }
    let m = prod.dim();
    let (nodes, weights) = gauss_legendre_rule(nodes_per_dim);
    let mut idx = vec![0usize; m];
    let mut point = vec![0.0; m];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..m {
            point[k] = nodes[idx[k]];
            w *= weights[idx[k]];
        }
        total += w * prod.evaluate(&point)?;
        // odometer over the grid
        let mut k = 0;
        loop {
            if k == m {
                return Ok(total);
            }
            idx[k] += 1;
            if idx[k] < nodes_per_dim {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
