//! Printed reference tables for the order-3, two-state Legendre basis
//! (values rounded to three decimals).

/// Tolerance for comparing against the three-decimal tables.
pub const PRINTED_TOLERANCE: f64 = 5e-4;

/// Multi-index table for `c = 3`, `m = 2`.
pub const MULTI_INDEX_C3_M2: [[u32; 2]; 10] = [
    [0, 0],
    [1, 0],
    [0, 1],
    [2, 0],
    [1, 1],
    [0, 2],
    [3, 0],
    [2, 1],
    [1, 2],
    [0, 3],
];

/// Raw Legendre coefficients `P_0..P_3` by ascending power.
pub const LEGENDRE_C3: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-0.5, 0.0, 1.5, 0.0],
    [0.0, -1.5, 0.0, 2.5],
];

/// Expansion matrix for `c = 3`, `m = 2`: row `i` is `L_i`, column `j` the
/// monomial `q^a p^b` with `(a, b) = MULTI_INDEX_C3_M2[j]`.
pub const EXPANSION_C3_M2: [[f64; 10]; 10] = [
    [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.866, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.866, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.559, 0.0, 0.0, 1.677, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.559, 0.0, 0.0, 0.0, 0.0, 1.677, 0.0, 0.0, 0.0, 0.0],
    [0.0, -1.984, 0.0, 0.0, 0.0, 0.0, 3.307, 0.0, 0.0, 0.0],
    [0.0, 0.0, -0.968, 0.0, 0.0, 0.0, 0.0, 2.905, 0.0, 0.0],
    [0.0, -0.968, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.905, 0.0],
    [0.0, 0.0, -1.984, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.307],
];

/// `L_8 = -0.968 q + 2.905 q p²` as (coefficient, exponent) pairs.
pub const L8_TERMS: [(f64, [u32; 2]); 2] = [(-0.968, [1, 0]), (2.905, [1, 2])];
