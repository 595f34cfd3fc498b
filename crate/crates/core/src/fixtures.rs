//! Small named algebras used throughout the tests, the CLI examples and the
//! acceptance suite.

use crate::algebra::Algebra;
use crate::exactlin::{q, zeros, Matrix, Scalar};
use crate::hder::{ordinary_hder, HigherDerivation};

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Dual numbers `ℚ[x]/(x²)` on the basis `(u, x)` with unit `u`.
pub fn dual_numbers() -> Algebra {
    Algebra::from_fn(labels(&["u", "x"]), Some(0), |i, j| match (i, j) {
        (0, 0) => vec![q(1), q(0)],
        (0, 1) | (1, 0) => vec![q(0), q(1)],
        _ => vec![q(0), q(0)],
    })
    .expect("dual numbers")
}

/// `ℚ × ℚ` on orthogonal idempotents `(e, f)`; no basis element is the unit.
pub fn q_times_q() -> Algebra {
    Algebra::from_fn(labels(&["e", "f"]), None, |i, j| {
        let mut v = zeros(2);
        if i == j {
            v[i] = q(1);
        }
        v
    })
    .expect("product of fields")
}

/// 2×2 matrices on the basis `(1, E12, E21, E11)`, so that the unit is a
/// basis element.
pub fn matrix_algebra_2() -> Algebra {
    // [[a, b], [c, d]] = d·1 + b·E12 + c·E21 + (a − d)·E11
    let as_matrix = |i: usize| -> [[i64; 2]; 2] {
        match i {
            0 => [[1, 0], [0, 1]],
            1 => [[0, 1], [0, 0]],
            2 => [[0, 0], [1, 0]],
            _ => [[1, 0], [0, 0]],
        }
    };
    Algebra::from_fn(labels(&["1", "E12", "E21", "E11"]), Some(0), |i, j| {
        let (x, y) = (as_matrix(i), as_matrix(j));
        let p = |r: usize, c: usize| x[r][0] * y[0][c] + x[r][1] * y[1][c];
        let (a, b, c, d) = (p(0, 0), p(0, 1), p(1, 0), p(1, 1));
        vec![q(d), q(b), q(c), q(a - d)]
    })
    .expect("matrix algebra")
}

/// Upper triangular 2×2 matrices on the basis `(1, E11, E12)`.
pub fn upper_triangular_2() -> Algebra {
    // [[a, b], [0, d]] = d·1 + (a − d)·E11 + b·E12
    let as_matrix = |i: usize| -> [i64; 3] {
        // (a, b, d)
        match i {
            0 => [1, 0, 1],
            1 => [1, 0, 0],
            _ => [0, 1, 0],
        }
    };
    Algebra::from_fn(labels(&["1", "E11", "E12"]), Some(0), |i, j| {
        let ([a1, b1, d1], [a2, b2, d2]) = (as_matrix(i), as_matrix(j));
        let (a, b, d) = (a1 * a2, a1 * b2 + b1 * d2, d1 * d2);
        vec![q(d), q(a - d), q(b)]
    })
    .expect("upper triangular matrices")
}

/// Truncated polynomials `ℚ[x]/(x^n)` on `(1, x, …, x^{n−1})`.
pub fn truncated_poly(n: usize) -> Algebra {
    let names: Vec<String> = (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        })
        .collect();
    Algebra::from_fn(names, Some(0), |i, j| {
        let mut v = zeros(n);
        if i + j < n {
            v[i + j] = q(1);
        }
        v
    })
    .expect("truncated polynomials")
}

/// `d/dx` on `ℚ[x]/(x^n)`.
pub fn poly_derivative(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = q(k as i64);
    }
    m
}

/// Ordinary higher derivation of `x ↦ x, u ↦ 0` on the dual numbers.
pub fn dual_numbers_ordinary(rank: usize) -> HigherDerivation {
    ordinary_hder(&dual_numbers(), &Matrix::diag(&[q(0), q(1)]), rank).expect("x d/dx is a derivation")
}

/// Coordinates of `E11` in [`matrix_algebra_2`].
pub fn m2_e11() -> Vec<Scalar> {
    vec![q(0), q(0), q(0), q(1)]
}

/// Coordinates of `E12` in [`matrix_algebra_2`].
pub fn m2_e12() -> Vec<Scalar> {
    vec![q(0), q(1), q(0), q(0)]
}
