//! Galerkin Koopman matrix, observable projection, eigendecomposition and
//! analytic propagation.
//!
//! Conventions: `K[(i, k)] = ⟨dL_i/dt, L_k⟩`, so that `dL/dt = K·L` on the
//! truncated space, and `H[(i, k)] = ⟨g_i, L_k⟩`. With `K = V Λ V⁻¹` the
//! observables evolve as `g(t) = Re[H V exp(Λt) V⁻¹ L(x0)]`.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64;

use crate::basis::BasisSet;
use crate::dynamics::VectorField;
use crate::error::{KoopmanError, Result};
use crate::polyalg::{box_inner_product, poly_add, poly_mul, Polynomial};

/// Eigenvector condition numbers above this abort the decomposition.
pub const NEAR_DEFECTIVE_LIMIT: f64 = 1e12;
/// Largest admissible `Re(λ)·t` before `exp` overflows.
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;
/// Relative threshold used to pick the phase-fixing component of an
/// eigenvector.
const PIVOT_TOLERANCE: f64 = 1e-8;
/// Real parts closer than this (relative to the spectral radius) sort as ties.
const SORT_TOLERANCE: f64 = 1e-9;
/// Eigenvalues closer than this (relative to the spectral radius) are
/// treated as one repeated eigenvalue.
const CLUSTER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedObservable {
    pub name: String,
    pub poly: Polynomial,
}

impl NamedObservable {
    pub fn new(name: impl Into<String>, poly: Polynomial) -> Self {
        NamedObservable {
            name: name.into(),
            poly,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    items: Vec<NamedObservable>,
}

impl ObservableSet {
    pub fn new(items: Vec<NamedObservable>) -> Result<Self> {
        if let Some(first) = items.first() {
            let m = first.poly.dim();
            if let Some(bad) = items.iter().find(|o| o.poly.dim() != m) {
                return Err(KoopmanError::DimensionMismatch {
                    expected: m,
                    found: bad.poly.dim(),
                });
            }
        }
        Ok(ObservableSet { items })
    }

    /// The coordinate functions, named after the states.
    pub fn identity<S: AsRef<str>>(states: &[S]) -> Self {
        let m = states.len();
        let items = states
            .iter()
            .enumerate()
            .map(|(k, s)| NamedObservable::new(s.as_ref(), Polynomial::variable(m, k).expect("k < m by construction")))
            .collect();
        ObservableSet { items }
    }

    pub fn items(&self) -> &[NamedObservable] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.items.iter().map(|o| o.name.as_str()).collect()
    }

    pub fn degree(&self) -> u32 {
        self.items.iter().map(|o| o.poly.degree()).max().unwrap_or(0)
    }
}

/// `dL_i/dt = Σ_j ∂L_i/∂x_j · f_j(x)`.
pub fn total_derivative(basis: &BasisSet, i: usize, vf: &VectorField) -> Result<Polynomial> {
    let m = basis.dim();
    if vf.dim() != m {
        return Err(KoopmanError::DimensionMismatch {
            expected: m,
            found: vf.dim(),
        });
    }
    let mut acc = Polynomial::zero(m);
    for (j, f) in vf.components().iter().enumerate() {
        let partial = basis.partial_derivative(i, j)?;
        acc = poly_add(&acc, &poly_mul(&partial, f)?)?;
    }
    Ok(acc)
}

/// Galerkin Koopman matrix `K[(i, k)] = ⟨dL_i/dt, L_k⟩`.
pub fn assemble_koopman(basis: &BasisSet, vf: &VectorField) -> Result<Mat<f64>> {
    let n = basis.len();
    let mut k = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let rate = total_derivative(basis, i, vf)?;
        for (col, lk) in basis.polynomials().iter().enumerate() {
            k[(i, col)] = box_inner_product(&rate, lk)?;
        }
    }
    Ok(k)
}

/// `H[(i, k)] = ⟨g_i, L_k⟩`. Observables of degree above the basis order
/// are rejected since their projection would be truncated.
pub fn observable_matrix(basis: &BasisSet, obs: &ObservableSet) -> Result<Mat<f64>> {
    for o in obs.items() {
        if o.poly.dim() != basis.dim() {
            return Err(KoopmanError::DimensionMismatch {
                expected: basis.dim(),
                found: o.poly.dim(),
            });
        }
        if o.poly.degree() as usize > basis.order() {
            return Err(KoopmanError::Validation(format!(
                "observable `{}` has degree {} > order {}",
                o.name,
                o.poly.degree(),
                basis.order()
            )));
        }
    }
    let mut h = Mat::<f64>::zeros(obs.len(), basis.len());
    for (i, o) in obs.items().iter().enumerate() {
        for (k, lk) in basis.polynomials().iter().enumerate() {
            h[(i, k)] = box_inner_product(&o.poly, lk)?;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    /// Sorted by real part descending, then imaginary part descending.
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors as columns, unit norm, phase-fixed.
    pub vectors: Mat<Complex64>,
    pub inverse: Mat<Complex64>,
    /// `max |K V - V Λ|`
    pub residual: f64,
    /// `‖V‖₁ ‖V⁻¹‖₁`
    pub condition: f64,
}

fn norm_one(m: &Mat<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &Mat<f64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].abs());
        }
    }
    out
}

/// Groups of (numerically) repeated eigenvalues.
fn eigenvalue_clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups.retain(|g| g.len() > 1);
    groups
}

/// Right singular vectors for the `r` smallest singular values of `a`, if
/// they are all below `threshold`.
fn null_space_real(a: &Mat<f64>, r: usize, threshold: f64) -> Option<Vec<Vec<Complex64>>> {
    let svd = a.svd().ok()?;
    let n = a.ncols();
    let sigma = svd.S().column_vector();
    if (n - r..n).any(|j| sigma[j] > threshold || sigma[j].is_nan()) {
        return None;
    }
    let v = svd.V();
    Some(
        (n - r..n)
            .map(|j| (0..n).map(|i| Complex64::new(v[(i, j)], 0.0)).collect())
            .collect(),
    )
}

fn null_space_complex(a: &Mat<Complex64>, r: usize, threshold: f64) -> Option<Vec<Vec<Complex64>>> {
    let svd = a.svd().ok()?;
    let n = a.ncols();
    let sigma = svd.S().column_vector();
    if (n - r..n).any(|j| sigma[j].re > threshold || sigma[j].re.is_nan()) {
        return None;
    }
    let v = svd.V();
    Some((n - r..n).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect())
}

/// A Schur-based solver returns unreliable eigenvectors for exactly repeated
/// eigenvalues. For each cluster whose eigenspace has full dimension, replace
/// them by an orthonormal basis of `null(K - λI)`; conjugate clusters get
/// conjugate vectors so real inputs give real trajectories. Clusters without
/// a full eigenspace are left alone for the conditioning check to reject.
fn refine_clusters(k: &Mat<f64>, values: &mut [Complex64], columns: &mut [Vec<Complex64>], scale: f64) {
    let n = values.len();
    let tol = CLUSTER_TOLERANCE * scale;
    let threshold = 0.5e-8 * (1.0 + max_abs(k));
    let clusters = eigenvalue_clusters(values, tol);
    let mean = |c: &[usize], vals: &[Complex64]| -> Complex64 {
        c.iter().map(|&i| vals[i]).sum::<Complex64>() / c.len() as f64
    };
    let means: Vec<Complex64> = clusters.iter().map(|c| mean(c, values)).collect();
    let mut done = vec![false; clusters.len()];
    for (ci, cluster) in clusters.iter().enumerate() {
        if done[ci] {
            continue;
        }
        done[ci] = true;
        let lambda = means[ci];
        let r = cluster.len();
        if lambda.im.abs() <= tol {
            let shifted = Mat::<f64>::from_fn(n, n, |i, j| k[(i, j)] - if i == j { lambda.re } else { 0.0 });
            if let Some(basis) = null_space_real(&shifted, r, threshold) {
                for (&slot, v) in cluster.iter().zip(basis) {
                    values[slot] = Complex64::new(lambda.re, 0.0);
                    columns[slot] = v;
                }
            }
            continue;
        }
        let partner = (0..clusters.len())
            .find(|&cj| !done[cj] && clusters[cj].len() == r && (means[cj] - lambda.conj()).norm() <= tol);
        let shifted = Mat::<Complex64>::from_fn(n, n, |i, j| {
            Complex64::new(k[(i, j)], 0.0) - if i == j { lambda } else { Complex64::new(0.0, 0.0) }
        });
        if let Some(basis) = null_space_complex(&shifted, r, threshold) {
            for (&slot, v) in cluster.iter().zip(&basis) {
                values[slot] = lambda;
                columns[slot] = v.clone();
            }
            if let Some(cj) = partner {
                done[cj] = true;
                for (&slot, v) in clusters[cj].iter().zip(&basis) {
                    values[slot] = lambda.conj();
                    columns[slot] = v.iter().map(|z| z.conj()).collect();
                }
            }
        }
    }
}

/// Dense nonsymmetric eigendecomposition `K = V Λ V⁻¹` (no balancing).
pub fn eigendecompose(k: &Mat<f64>) -> Result<Eigendecomposition> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(KoopmanError::DimensionMismatch {
            expected: n,
            found: k.ncols(),
        });
    }
    if (0..n).any(|j| (0..n).any(|i| !k[(i, j)].is_finite())) {
        return Err(KoopmanError::NonFinite("Koopman matrix entries".into()));
    }
    let evd = k
        .eigen()
        .map_err(|e| KoopmanError::NonFinite(format!("eigensolver failed: {e:?}")))?;
    let raw_values: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
    let raw_vectors = evd.U();

    let scale = raw_values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tie = SORT_TOLERANCE * scale;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (raw_values[a], raw_values[b]);
        let (ra, rb) = ((za.re / tie).round(), (zb.re / tie).round());
        rb.total_cmp(&ra)
            .then_with(|| zb.im.total_cmp(&za.im))
            .then_with(|| a.cmp(&b))
    });

    let mut eigenvalues: Vec<Complex64> = order.iter().map(|&j| raw_values[j]).collect();
    let mut columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&src| (0..n).map(|i| raw_vectors[(i, src)]).collect())
        .collect();
    refine_clusters(k, &mut eigenvalues, &mut columns, scale);

    let mut vectors = Mat::<Complex64>::zeros(n, n);
    for (dst, col) in columns.iter().enumerate() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(KoopmanError::NonFinite(format!("eigenvector {dst} has norm {norm}")));
        }
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = col
            .iter()
            .find(|z| z.norm() > PIVOT_TOLERANCE * peak)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for (i, z) in col.iter().enumerate() {
            vectors[(i, dst)] = z * phase / norm;
        }
    }

    let inverse = vectors.partial_piv_lu().inverse();
    let inv_norm = norm_one(&inverse);
    if !inv_norm.is_finite() {
        return Err(KoopmanError::NearDefective {
            condition: f64::INFINITY,
            limit: NEAR_DEFECTIVE_LIMIT,
        });
    }
    let condition = norm_one(&vectors) * inv_norm;
    if condition > NEAR_DEFECTIVE_LIMIT {
        return Err(KoopmanError::NearDefective {
            condition,
            limit: NEAR_DEFECTIVE_LIMIT,
        });
    }

    let mut residual = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let mut kv = Complex64::new(0.0, 0.0);
            for l in 0..n {
                kv += vectors[(l, j)] * k[(i, l)];
            }
            residual = residual.max((kv - vectors[(i, j)] * eigenvalues[j]).norm());
        }
    }
    if !residual.is_finite() || residual > 1e-8 * (1.0 + max_abs(k)) {
        return Err(KoopmanError::NonFinite(format!(
            "eigen residual {residual:.3e} exceeds tolerance"
        )));
    }

    Ok(Eigendecomposition {
        eigenvalues,
        vectors,
        inverse,
        residual,
        condition,
    })
}

/// `φ0 = V⁻¹ h0`.
pub fn initial_eigenfunctions(inverse: &Mat<Complex64>, h0: &[f64]) -> Result<Vec<Complex64>> {
    if inverse.ncols() != h0.len() {
        return Err(KoopmanError::DimensionMismatch {
            expected: inverse.ncols(),
            found: h0.len(),
        });
    }
    Ok((0..inverse.nrows())
        .map(|i| h0.iter().enumerate().map(|(j, &h)| inverse[(i, j)] * h).sum())
        .collect())
}

/// `‖K + Kᵀ‖_F / max(1, ‖K‖_F)`; zero for skew-symmetric `K`.
pub fn skewness_diagnostic(k: &Mat<f64>) -> f64 {
    let n = k.nrows();
    let mut sym = 0.0;
    let mut norm = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = k[(i, j)] + k[(j, i)];
            sym += s * s;
            norm += k[(i, j)] * k[(i, j)];
        }
    }
    sym.sqrt() / norm.sqrt().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `values[i][k]` is observable `i` at `times[k]`.
    pub values: Vec<Vec<f64>>,
    /// Largest imaginary part discarded when taking the real part.
    pub max_imag: f64,
}

impl Trajectory {
    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct KoopmanModel {
    basis: BasisSet,
    k: Mat<f64>,
    h: Mat<f64>,
    names: Vec<String>,
    decomposition: Eigendecomposition,
    /// `H V`
    modes: Mat<Complex64>,
    skewness: f64,
}

impl KoopmanModel {
    pub fn build(basis: BasisSet, vf: &VectorField, observables: &ObservableSet) -> Result<Self> {
        let h = observable_matrix(&basis, observables)?;
        let k = assemble_koopman(&basis, vf)?;
        Self::from_parts(basis, k, h, observables.names().into_iter().map(String::from).collect())
    }

    /// Decompose a prebuilt `K` and attach an observable matrix `H`.
    pub fn from_parts(basis: BasisSet, k: Mat<f64>, h: Mat<f64>, names: Vec<String>) -> Result<Self> {
        let n = basis.len();
        if k.nrows() != n || k.ncols() != n {
            return Err(KoopmanError::DimensionMismatch {
                expected: n,
                found: k.nrows(),
            });
        }
        if h.ncols() != n || h.nrows() != names.len() {
            return Err(KoopmanError::DimensionMismatch {
                expected: n,
                found: h.ncols(),
            });
        }
        let decomposition = eigendecompose(&k)?;
        let modes = complex_product(&h, &decomposition.vectors);
        let skewness = skewness_diagnostic(&k);
        Ok(KoopmanModel {
            basis,
            k,
            h,
            names,
            decomposition,
            modes,
            skewness,
        })
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn koopman_matrix(&self) -> &Mat<f64> {
        &self.k
    }

    pub fn observable_matrix(&self) -> &Mat<f64> {
        &self.h
    }

    pub fn observable_names(&self) -> &[String] {
        &self.names
    }

    pub fn decomposition(&self) -> &Eigendecomposition {
        &self.decomposition
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.decomposition.eigenvalues
    }

    pub fn skewness(&self) -> f64 {
        self.skewness
    }

    /// Eigenfunction values at a state in the unit box.
    pub fn initial_eigenfunctions(&self, x0: &[f64]) -> Result<Vec<Complex64>> {
        let h0 = self.basis.evaluate(x0)?;
        initial_eigenfunctions(&self.decomposition.inverse, &h0)
    }

    pub fn propagate(&self, phi0: &[Complex64], times: &[f64]) -> Result<Trajectory> {
        propagate_modes(&self.modes, &self.decomposition.eigenvalues, phi0, times)
    }

    /// Propagate from a state in the unit box.
    pub fn solve(&self, x0: &[f64], times: &[f64]) -> Result<Trajectory> {
        let phi0 = self.initial_eigenfunctions(x0)?;
        self.propagate(&phi0, times)
    }

    /// Propagate a different set of observables with the same spectrum.
    pub fn propagate_observables(&self, h: &Mat<f64>, phi0: &[Complex64], times: &[f64]) -> Result<Trajectory> {
        if h.ncols() != self.basis.len() {
            return Err(KoopmanError::DimensionMismatch {
                expected: self.basis.len(),
                found: h.ncols(),
            });
        }
        let modes = complex_product(h, &self.decomposition.vectors);
        propagate_modes(&modes, &self.decomposition.eigenvalues, phi0, times)
    }
}

fn complex_product(h: &Mat<f64>, v: &Mat<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(h.nrows(), v.ncols(), |i, j| {
        (0..h.ncols()).map(|l| v[(l, j)] * h[(i, l)]).sum()
    })
}

fn propagate_modes(
    modes: &Mat<Complex64>,
    eigenvalues: &[Complex64],
    phi0: &[Complex64],
    times: &[f64],
) -> Result<Trajectory> {
    let n = eigenvalues.len();
    if phi0.len() != n {
        return Err(KoopmanError::DimensionMismatch {
            expected: n,
            found: phi0.len(),
        });
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KoopmanError::InvalidArgument(
            "times must be finite and strictly increasing".into(),
        ));
    }
    let g = modes.nrows();
    let mut values = vec![Vec::with_capacity(times.len()); g];
    let mut max_imag = 0.0f64;
    let mut weighted = vec![Complex64::new(0.0, 0.0); n];
    for &t in times {
        for (j, (lambda, phi)) in eigenvalues.iter().zip(phi0).enumerate() {
            let exponent = lambda.re * t;
            if exponent > EXP_OVERFLOW_LIMIT {
                return Err(KoopmanError::Overflow {
                    exponent,
                    limit: EXP_OVERFLOW_LIMIT,
                    time: t,
                });
            }
            weighted[j] = (lambda * t).exp() * phi;
        }
        for (i, row) in values.iter_mut().enumerate() {
            let z: Complex64 = (0..n).map(|j| modes[(i, j)] * weighted[j]).sum();
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(KoopmanError::NonFinite(format!("observable {i} at t = {t}")));
            }
            max_imag = max_imag.max(z.im.abs());
            row.push(z.re);
        }
    }
    Ok(Trajectory {
        times: times.to_vec(),
        values,
        max_imag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::duffing_vector_field;
    use crate::polyalg::{canonicalize, Monomial};

    fn mat(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn total_derivative_examples() {
        let b = BasisSet::new(3, 2).unwrap();
        let ho = duffing_vector_field(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(total_derivative(&b, 0, &ho).unwrap().is_zero());
        let d1 = total_derivative(&b, 1, &ho).unwrap();
        let l2 = b.polynomial(2).unwrap();
        assert_eq!(d1.terms().len(), 1);
        assert!((d1.coefficient(&[0, 1]) - l2.coefficient(&[0, 1])).abs() < 1e-15);
        let duff = duffing_vector_field(1.0, 1.0, 1.0, 0.001).unwrap();
        let d2 = total_derivative(&b, 2, &duff).unwrap();
        let expect = -0.001 * 1.5f64.sqrt() * 0.5f64.sqrt();
        assert!((d2.coefficient(&[3, 0]) - expect).abs() < 1e-15);
        assert!(total_derivative(&b, 1, &VectorField::new(vec![Polynomial::zero(1)]).unwrap()).is_err());
    }

    #[test]
    fn koopman_examples() {
        let b = BasisSet::new(3, 2).unwrap();
        let zero = VectorField::new(vec![Polynomial::zero(2), Polynomial::zero(2)]).unwrap();
        assert_eq!(max_abs(&assemble_koopman(&b, &zero).unwrap()), 0.0);
        let ho = duffing_vector_field(1.0, 1.0, 1.0, 0.0).unwrap();
        let k = assemble_koopman(&b, &ho).unwrap();
        assert!((k[(1, 1)]).abs() < 1e-15);
        assert!((k[(1, 2)] - 1.0).abs() < 1e-14);
        assert!((k[(2, 1)] + 1.0).abs() < 1e-14);
        assert!((k[(2, 2)]).abs() < 1e-15);
    }

    #[test]
    fn observable_examples() {
        let b = BasisSet::new(3, 2).unwrap();
        let one = NamedObservable::new("one", Polynomial::constant(2, 1.0));
        let h = observable_matrix(&b, &ObservableSet::new(vec![one]).unwrap()).unwrap();
        assert!((h[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((1..10).all(|k| h[(0, k)] == 0.0));
        let h = observable_matrix(&b, &ObservableSet::identity(&["q", "p"])).unwrap();
        let v = 1.5f64.sqrt() * 0.5f64.sqrt() * 4.0 / 3.0;
        assert!((h[(0, 1)] - v).abs() < 1e-14 && (h[(0, 1)] - 1.1547).abs() < 1e-4);
        assert!((h[(1, 2)] - v).abs() < 1e-14);
        for k in 0..10 {
            // coefficient rounding leaves ~1e-16 residue on orthogonal columns
            if k != 1 {
                assert!(h[(0, k)].abs() < 1e-15);
            }
            if k != 2 {
                assert!(h[(1, k)].abs() < 1e-15);
            }
        }
        let cubic = canonicalize([Monomial::new(1.0, vec![4, 0])], 2).unwrap();
        let bad = ObservableSet::new(vec![NamedObservable::new("q4", cubic)]).unwrap();
        assert!(matches!(observable_matrix(&b, &bad), Err(KoopmanError::Validation(_))));
    }

    #[test]
    fn eigen_examples() {
        let e = eigendecompose(&mat(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]])).unwrap();
        let re: Vec<f64> = e.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![3.0, 2.0, 1.0]);
        for (col, row) in [(0, 2), (1, 1), (2, 0)] {
            assert!((e.vectors[(row, col)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let r = eigendecompose(&mat(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
        assert!((r.eigenvalues[0] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        // first nonzero component is real positive
        for j in 0..2 {
            let z = r.vectors[(0, j)];
            assert!(z.re > 0.0 && z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn defective_matrix_is_rejected() {
        let jordan = mat(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(
            eigendecompose(&jordan),
            Err(KoopmanError::NearDefective { .. })
        ));
        let nan = mat(&[&[f64::NAN, 0.0], &[0.0, 1.0]]);
        assert!(matches!(eigendecompose(&nan), Err(KoopmanError::NonFinite(_))));
    }

    #[test]
    fn phi0_examples() {
        let identity = Mat::<Complex64>::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let h0 = [0.5, -1.0, 2.0];
        let phi = initial_eigenfunctions(&identity, &h0).unwrap();
        assert!(phi.iter().zip(h0).all(|(p, h)| p.re == h && p.im == 0.0));
        assert!(initial_eigenfunctions(&identity, &[1.0]).is_err());
        let diag = eigendecompose(&mat(&[&[-1.0, 0.0], &[0.0, 4.0]])).unwrap();
        let phi = initial_eigenfunctions(&diag.inverse, &[0.25, 0.75]).unwrap();
        // eigenvalues sorted descending, so the components swap
        assert!((phi[0].re - 0.75).abs() < 1e-15 && (phi[1].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn skewness_examples() {
        assert_eq!(skewness_diagnostic(&mat(&[&[0.0, 1.0], &[-1.0, 0.0]])), 0.0);
        assert!((skewness_diagnostic(&mat(&[&[1.0, 0.0], &[0.0, 1.0]])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn propagation_overflow_guard() {
        let b = BasisSet::new(1, 1).unwrap();
        let f = canonicalize([Monomial::new(10.0, vec![1])], 1).unwrap();
        let vf = VectorField::new(vec![f]).unwrap();
        let model = KoopmanModel::build(b, &vf, &ObservableSet::identity(&["x"])).unwrap();
        let phi0 = model.initial_eigenfunctions(&[0.5]).unwrap();
        assert!(model.propagate(&phi0, &[0.0, 1.0]).is_ok());
        assert!(matches!(
            model.propagate(&phi0, &[0.0, 100.0]),
            Err(KoopmanError::Overflow { .. })
        ));
    }

    #[test]
    fn harmonic_oscillator_closed_form() {
        let b = BasisSet::new(3, 2).unwrap();
        let ho = duffing_vector_field(1.0, 1.0, 1.0, 0.0).unwrap();
        let model = KoopmanModel::build(b, &ho, &ObservableSet::identity(&["q", "p"])).unwrap();
        for z in model.eigenvalues() {
            assert!(z.re.abs() < 1e-8);
            let nearest = z.im.round();
            assert!((z.im - nearest).abs() < 1e-8 && nearest.abs() <= 3.0, "{z}");
        }
        let times: Vec<f64> = (0..100).map(|k| k as f64 * 10.0 / 99.0).collect();
        let traj = model.solve(&[1.0, 0.0], &times).unwrap();
        for (k, t) in times.iter().enumerate() {
            assert!((traj.values[0][k] - t.cos()).abs() < 1e-8);
            assert!((traj.values[1][k] + t.sin()).abs() < 1e-8);
        }
        assert!(traj.max_imag < 1e-8);
    }
}
