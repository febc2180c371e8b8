//! Orthonormal multivariate Legendre basis on `[-1, 1]^m`.
//!
//! Basis function `L_i` is the product of normalized univariate Legendre
//! polynomials `N_{a_k}(x_k)` where `a = indices.rows()[i]`. Its monomial
//! expansion is stored as row `i` of the expansion matrix, with columns
//! indexed by the same multi-index table.

use faer::Mat;

use crate::error::{KoopmanError, Result};
use crate::polyalg::{canonicalize, Monomial, Polynomial};

pub const MAX_DIM: usize = 6;
pub const MAX_ORDER: usize = 12;
pub const MAX_BASIS_SIZE: usize = 20_000;

/// Number of exponent tuples in `m` variables with total degree `<= c`.
pub fn basis_size(c: usize, m: usize) -> u128 {
    // C(c+m, m), built incrementally so every intermediate is an integer
    let mut n: u128 = 1;
    for k in 1..=m as u128 {
        n = n * (c as u128 + k) / k;
    }
    n
}

/// Graded table of exponent tuples; row 0 is all zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    order: usize,
    dim: usize,
    rows: Vec<Vec<u32>>,
}

impl MultiIndexSet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn position(&self, exp: &[u32]) -> Option<usize> {
        self.rows.binary_search_by(|r| crate::polyalg::graded_cmp(r, exp)).ok()
    }
}

fn push_compositions(remaining: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for first in (0..=remaining).rev() {
        current[slot] = first;
        push_compositions(remaining - first, slot + 1, current, out);
    }
}

/// Enumerate every exponent tuple of total degree `<= c` in graded order,
/// lexicographically descending within each degree. For `m = 2` this gives
/// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.
pub fn enumerate_multi_indices(c: usize, m: usize) -> Result<MultiIndexSet> {
    if m == 0 || m > MAX_DIM {
        return Err(KoopmanError::Validation(format!(
            "state dimension {m} outside supported range 1..={MAX_DIM}"
        )));
    }
    if c > MAX_ORDER {
        return Err(KoopmanError::Validation(format!(
            "order {c} outside supported range 0..={MAX_ORDER}"
        )));
    }
    let n = basis_size(c, m);
    if n > MAX_BASIS_SIZE as u128 {
        return Err(KoopmanError::Validation(format!(
            "basis size {n} for order {c}, dimension {m} exceeds {MAX_BASIS_SIZE}"
        )));
    }
    let mut rows = Vec::with_capacity(n as usize);
    let mut current = vec![0u32; m];
    for degree in 0..=c as u32 {
        push_compositions(degree, 0, &mut current, &mut rows);
    }
    debug_assert_eq!(rows.len() as u128, n);
    Ok(MultiIndexSet { order: c, dim: m, rows })
}

/// Raw Legendre coefficients: row `i` holds `P_i` by ascending power.
pub fn legendre_coefficients(c: usize) -> Mat<f64> {
    let mut lpc = Mat::<f64>::zeros(c + 1, c + 1);
    lpc[(0, 0)] = 1.0;
    if c >= 1 {
        lpc[(1, 1)] = 1.0;
    }
    // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
    for next in 2..=c {
        let k = (next - 1) as f64;
        for j in 0..next {
            lpc[(next, j + 1)] += (2.0 * k + 1.0) / (k + 1.0) * lpc[(next - 1, j)];
            lpc[(next, j)] -= k / (k + 1.0) * lpc[(next - 2, j)];
        }
    }
    lpc
}

/// Scale row `i` by `sqrt((2i+1)/2)` so the rows are orthonormal on `[-1, 1]`.
pub fn normalize_legendre(lpc: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(lpc.nrows(), lpc.ncols(), |i, j| {
        ((2.0 * i as f64 + 1.0) / 2.0).sqrt() * lpc[(i, j)]
    })
}

/// Row `i` holds `d/dx N_i` by ascending power. The last column is zero.
pub fn derivative_table(nlpc: &Mat<f64>) -> Mat<f64> {
    let cols = nlpc.ncols();
    Mat::from_fn(nlpc.nrows(), cols, |i, j| {
        if j + 1 < cols {
            (j + 1) as f64 * nlpc[(i, j + 1)]
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone)]
pub struct UnivariateTables {
    order: usize,
    /// raw Legendre coefficients
    pub lpc: Mat<f64>,
    /// normalized coefficients
    pub nlpc: Mat<f64>,
    /// derivatives of the normalized polynomials
    pub dlpc: Mat<f64>,
}

impl UnivariateTables {
    pub fn new(c: usize) -> Self {
        let lpc = legendre_coefficients(c);
        let nlpc = normalize_legendre(&lpc);
        let dlpc = derivative_table(&nlpc);
        UnivariateTables {
            order: c,
            lpc,
            nlpc,
            dlpc,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

#[derive(Debug, Clone)]
pub struct BasisSet {
    indices: MultiIndexSet,
    tables: UnivariateTables,
    mlp: Mat<f64>,
    polys: Vec<Polynomial>,
}

impl BasisSet {
    pub fn new(c: usize, m: usize) -> Result<Self> {
        let indices = enumerate_multi_indices(c, m)?;
        let tables = UnivariateTables::new(c);
        Ok(multivariate_basis(tables, indices))
    }

    pub fn indices(&self) -> &MultiIndexSet {
        &self.indices
    }

    pub fn tables(&self) -> &UnivariateTables {
        &self.tables
    }

    /// `mlp[(i, j)]` is the coefficient of `x^{indices[j]}` in `L_i`.
    pub fn expansion_matrix(&self) -> &Mat<f64> {
        &self.mlp
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.indices.dim()
    }

    pub fn order(&self) -> usize {
        self.indices.order()
    }

    /// `L_i` as a canonical polynomial.
    pub fn polynomial(&self, i: usize) -> Result<&Polynomial> {
        self.polys.get(i).ok_or(KoopmanError::IndexOutOfRange {
            index: i,
            len: self.len(),
        })
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polys
    }

    /// `∂L_i/∂x_var` assembled from the derivative table.
    pub fn partial_derivative(&self, i: usize, var: usize) -> Result<Polynomial> {
        let n = self.len();
        let m = self.dim();
        if i >= n {
            return Err(KoopmanError::IndexOutOfRange { index: i, len: n });
        }
        if var >= m {
            return Err(KoopmanError::IndexOutOfRange { index: var, len: m });
        }
        let target = self.indices.row(i);
        let terms = self.indices.rows().iter().filter_map(|col| {
            let coef = (0..m).fold(1.0, |acc, k| {
                let table = if k == var { &self.tables.dlpc } else { &self.tables.nlpc };
                acc * table[(target[k] as usize, col[k] as usize)]
            });
            (coef != 0.0).then(|| Monomial::new(coef, col.clone()))
        });
        canonicalize(terms, m)
    }

    /// `h[i] = L_i(x)` for every basis function.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        evaluate_basis(self, x)
    }
}

/// Tensor the univariate tables over the multi-index table.
pub fn multivariate_basis(tables: UnivariateTables, indices: MultiIndexSet) -> BasisSet {
    let n = indices.len();
    let m = indices.dim();
    let rows = indices.rows();
    let mlp = Mat::from_fn(n, n, |i, j| {
        (0..m).fold(1.0, |acc, k| {
            acc * tables.nlpc[(rows[i][k] as usize, rows[j][k] as usize)]
        })
    });
    let polys = (0..n)
        .map(|i| {
            // columns are already in canonical order
            let terms = (0..n)
                .filter(|&j| mlp[(i, j)] != 0.0)
                .map(|j| Monomial::new(mlp[(i, j)], rows[j].clone()))
                .collect::<Vec<_>>();
            canonicalize(terms, m).expect("basis rows share the table dimension")
        })
        .collect();
    BasisSet {
        indices,
        tables,
        mlp,
        polys,
    }
}

pub fn basis_as_polynomial(basis: &BasisSet, i: usize) -> Result<Polynomial> {
    basis.polynomial(i).cloned()
}

pub fn evaluate_basis(basis: &BasisSet, x: &[f64]) -> Result<Vec<f64>> {
    let m = basis.dim();
    if x.len() != m {
        return Err(KoopmanError::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    let monomials: Vec<f64> = basis
        .indices
        .rows()
        .iter()
        .map(|exp| exp.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product())
        .collect();
    let n = basis.len();
    Ok((0..n)
        .map(|i| (0..n).map(|j| basis.mlp[(i, j)] * monomials[j]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{box_inner_product, evaluate, partial_derivative};

    #[test]
    fn multi_index_small_cases() {
        let t = enumerate_multi_indices(0, 2).unwrap();
        assert_eq!(t.rows(), &[vec![0, 0]]);
        let t = enumerate_multi_indices(3, 2).unwrap();
        let expect: Vec<Vec<u32>> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
            vec![3, 0],
            vec![2, 1],
            vec![1, 2],
            vec![0, 3],
        ];
        assert_eq!(t.rows(), expect.as_slice());
        assert_eq!(t.position(&[1, 2]), Some(8));
        assert_eq!(enumerate_multi_indices(2, 3).unwrap().len(), 10);
    }

    #[test]
    fn multi_index_range_checks() {
        assert!(enumerate_multi_indices(3, 0).is_err());
        assert!(enumerate_multi_indices(3, 7).is_err());
        assert!(enumerate_multi_indices(13, 2).is_err());
        // C(12+6, 6) = 18564 fits, the cap is on n
        assert_eq!(basis_size(12, 6), 18_564);
        assert!(enumerate_multi_indices(12, 6).is_ok());
    }

    #[test]
    fn legendre_rows() {
        let lpc = legendre_coefficients(4);
        let row = |i: usize| (0..5).map(|j| lpc[(i, j)]).collect::<Vec<_>>();
        assert_eq!(row(0), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(row(2), vec![-0.5, 0.0, 1.5, 0.0, 0.0]);
        assert_eq!(row(3), vec![0.0, -1.5, 0.0, 2.5, 0.0]);
        assert!((lpc[(4, 4)] - 35.0 / 8.0).abs() < 1e-14);
        assert_eq!(legendre_coefficients(0).nrows(), 1);
    }

    #[test]
    fn normalized_and_derivative_rows() {
        let t = UnivariateTables::new(3);
        assert!((t.nlpc[(0, 0)] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((t.nlpc[(1, 1)] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((t.nlpc[(1, 1)] * t.nlpc[(0, 0)] - 0.866).abs() < 5e-4);
        for j in 0..4 {
            assert_eq!(t.dlpc[(0, j)], 0.0);
        }
        assert!((t.dlpc[(1, 0)] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((t.dlpc[(2, 1)] - 3.0 * 2.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn expansion_matrix_entries() {
        let b = BasisSet::new(3, 2).unwrap();
        let mlp = b.expansion_matrix();
        assert!((mlp[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((mlp[(3, 0)] + 0.559).abs() < 5e-4);
        assert!((mlp[(3, 3)] - 1.677).abs() < 5e-4);
        assert!((mlp[(8, 1)] + 0.968).abs() < 5e-4);
        assert!((mlp[(8, 8)] - 2.905).abs() < 5e-4);
    }

    #[test]
    fn basis_polynomials() {
        let b = BasisSet::new(3, 2).unwrap();
        let l0 = basis_as_polynomial(&b, 0).unwrap();
        assert_eq!(l0.terms().len(), 1);
        assert!((l0.coefficient(&[0, 0]) - 0.5).abs() < 1e-15);
        let l2 = basis_as_polynomial(&b, 2).unwrap();
        assert_eq!(l2.terms().len(), 1);
        assert!((l2.coefficient(&[0, 1]) - 0.866).abs() < 5e-4);
        let l8 = basis_as_polynomial(&b, 8).unwrap();
        assert!((evaluate(&l8, &[1.0, 0.0]).unwrap() + 0.968).abs() < 5e-4);
        assert!(basis_as_polynomial(&b, 10).is_err());
    }

    #[test]
    fn basis_evaluation() {
        let b = BasisSet::new(3, 2).unwrap();
        let h = evaluate_basis(&b, &[0.0, 0.0]).unwrap();
        let l3_origin = -(5.0f64 / 2.0).sqrt() * 0.5 * 0.5f64.sqrt();
        let expect = [0.5, 0.0, 0.0, l3_origin, 0.0, l3_origin, 0.0, 0.0, 0.0, 0.0];
        for (a, e) in h.iter().zip(expect) {
            assert!((a - e).abs() < 1e-14, "{h:?}");
        }
        let h = evaluate_basis(&b, &[1.0, 0.0]).unwrap();
        assert!((h[1] - 0.866).abs() < 5e-4);
        assert!((h[3] - 1.118).abs() < 5e-4);
        for x in [[0.3, -0.2], [-1.0, 1.0]] {
            assert!((evaluate_basis(&b, &x).unwrap()[0] - 0.5).abs() < 1e-15);
        }
        assert!(evaluate_basis(&b, &[1.0]).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for c in 0..=8 {
            let b = BasisSet::new(c, 2).unwrap();
            for (i, li) in b.polynomials().iter().enumerate() {
                for (k, lk) in b.polynomials().iter().enumerate() {
                    let g = box_inner_product(li, lk).unwrap();
                    let e = if i == k { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-12, "c={c} ({i},{k}) = {g}");
                }
            }
        }
    }

    #[test]
    fn table_derivative_matches_polynomial_derivative() {
        for (c, m) in [(3, 2), (4, 3), (5, 1)] {
            let b = BasisSet::new(c, m).unwrap();
            for i in 0..b.len() {
                for var in 0..m {
                    let from_tables = b.partial_derivative(i, var).unwrap();
                    let direct = partial_derivative(b.polynomial(i).unwrap(), var).unwrap();
                    assert_eq!(from_tables.terms().len(), direct.terms().len());
                    for (a, d) in from_tables.terms().iter().zip(direct.terms()) {
                        assert_eq!(a.exp, d.exp, "c={c} m={m} i={i} var={var}");
                        // same factors, different multiplication order
                        assert!((a.coef - d.coef).abs() <= 4.0 * f64::EPSILON * d.coef.abs());
                    }
                }
            }
        }
    }

    #[test]
    fn parity_zero_pattern() {
        let b = BasisSet::new(6, 3).unwrap();
        let rows = b.indices().rows();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let mismatch = (0..3).any(|k| rows[j][k] > rows[i][k] || (rows[i][k] + rows[j][k]) % 2 == 1);
                if mismatch {
                    assert_eq!(b.expansion_matrix()[(i, j)], 0.0);
                }
            }
        }
    }
}
