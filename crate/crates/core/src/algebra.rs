//! Finite-dimensional associative algebras given by structure constants,
//! and bimodules given by action tensors.
//!
//! All laws are checked on basis elements only. Every law is multilinear in
//! its arguments, so agreement on basis tuples is agreement everywhere.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{axpy, zeros, Matrix, Scalar};
use crate::hder::HigherDerivation;
use crate::report::{first_mismatch, CheckReport};

/// Associative algebra over ℚ. `c[(i*dim + j)*dim + k]` is the coefficient
/// of `e_k` in `e_i·e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    labels: Vec<String>,
    c: Vec<Scalar>,
    unit: Option<usize>,
}

impl Algebra {
    pub fn new(labels: Vec<String>, c: Vec<Scalar>, unit: Option<usize>) -> Result<Self> {
        let dim = labels.len();
        if c.len() != dim * dim * dim {
            return Err(Error::Shape(format!(
                "structure constants for dim {dim} need {} entries, got {}",
                dim * dim * dim,
                c.len()
            )));
        }
        if let Some(u) = unit {
            if u >= dim {
                return Err(Error::Shape(format!("unit index {u} out of range for dim {dim}")));
            }
        }
        Ok(Algebra { dim, labels, c, unit })
    }

    /// Algebra with default labels `e0, e1, …`.
    pub fn from_table(dim: usize, c: Vec<Scalar>, unit: Option<usize>) -> Result<Self> {
        Self::new((0..dim).map(|i| format!("e{i}")).collect(), c, unit)
    }

    /// Builds an algebra from its multiplication of basis elements.
    pub fn from_fn(labels: Vec<String>, unit: Option<usize>, mut f: impl FnMut(usize, usize) -> Vec<Scalar>) -> Result<Self> {
        let dim = labels.len();
        let mut c = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = f(i, j);
                if v.len() != dim {
                    return Err(Error::Shape(format!("product e{i}e{j} has length {}", v.len())));
                }
                c.extend(v);
            }
        }
        Self::new(labels, c, unit)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit_index(&self) -> Option<usize> {
        self.unit
    }

    pub fn structure_constants(&self) -> &[Scalar] {
        &self.c
    }

    /// Coordinates of `e_i·e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[Scalar] {
        let start = (i * self.dim + j) * self.dim;
        &self.c[start..start + self.dim]
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut out = zeros(self.dim);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                axpy(&mut out, &(x * y), self.basis_product(i, j));
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        unit_vector(self.dim, i)
    }

    /// Coordinates of the unit element, if one is declared.
    pub fn unit_vector(&self) -> Option<Vec<Scalar>> {
        self.unit.map(|u| self.basis_vector(u))
    }

    /// Matrix of left multiplication `b ↦ a·b`.
    pub fn left_mul_matrix(&self, a: &[Scalar]) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..self.dim).map(|j| self.mul(a, &self.basis_vector(j))).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// Matrix of right multiplication `b ↦ b·a`.
    pub fn right_mul_matrix(&self, a: &[Scalar]) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..self.dim).map(|j| self.mul(&self.basis_vector(j), a)).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// `p`-th power, `p ≥ 1`.
    pub fn power(&self, a: &[Scalar], p: usize) -> Vec<Scalar> {
        assert!(p >= 1);
        (1..p).fold(a.to_vec(), |acc, _| self.mul(&acc, a))
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = zeros(n);
    v[i] = Scalar::one();
    v
}

/// Associativity on all basis triples in lexicographic order, then the
/// unit laws when a unit is declared.
pub fn verify_algebra(a: &Algebra) -> CheckReport {
    let n = a.dim;
    let assoc = first_mismatch(
        "associativity",
        triples(n).map(|(i, j, l)| {
            let ei = a.basis_vector(i);
            let el = a.basis_vector(l);
            let lhs = a.mul(a.basis_product(i, j), &el);
            let rhs = a.mul(&ei, a.basis_product(j, l));
            (vec![i, j, l], lhs, rhs)
        }),
    );
    if !assoc.is_ok() {
        return assoc;
    }
    match a.unit {
        None => CheckReport::ok(),
        Some(u) => first_mismatch(
            "unit",
            (0..n).flat_map(|j| {
                let e = a.basis_vector(j);
                [
                    (vec![u, j], a.basis_product(u, j).to_vec(), e.clone()),
                    (vec![j, u], a.basis_product(j, u).to_vec(), e),
                ]
            }),
        ),
    }
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |l| (i, j, l))))
}

/// Bimodule over an AssHDer pair. `left[(i*mdim + a)*mdim + b]` is the
/// coefficient of `m_b` in `e_i·m_a`; `right[(a*dim + i)*mdim + b]` that of
/// `m_b` in `m_a·e_i`. `dmaps` are `d_1^M, …, d_N^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    dim: usize,
    mdim: usize,
    left: Vec<Scalar>,
    right: Vec<Scalar>,
    dmaps: Vec<Matrix>,
}

impl Bimodule {
    pub fn new(dim: usize, mdim: usize, left: Vec<Scalar>, right: Vec<Scalar>, dmaps: Vec<Matrix>) -> Result<Self> {
        let need = dim * mdim * mdim;
        if left.len() != need || right.len() != need {
            return Err(Error::Shape(format!(
                "action tensors need {need} entries, got left {} right {}",
                left.len(),
                right.len()
            )));
        }
        if let Some(m) = dmaps.iter().find(|m| m.rows() != mdim || m.cols() != mdim) {
            return Err(Error::Shape(format!("module map is {}x{}, expected {mdim}x{mdim}", m.rows(), m.cols())));
        }
        Ok(Bimodule { dim, mdim, left, right, dmaps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mdim(&self) -> usize {
        self.mdim
    }

    pub fn rank(&self) -> usize {
        self.dmaps.len()
    }

    pub fn dmaps(&self) -> &[Matrix] {
        &self.dmaps
    }

    pub fn left_tensor(&self) -> &[Scalar] {
        &self.left
    }

    pub fn right_tensor(&self) -> &[Scalar] {
        &self.right
    }

    pub fn has_zero_actions(&self) -> bool {
        self.left.iter().chain(&self.right).all(Zero::is_zero)
    }

    /// `d_k^M(m)`, with `d_0^M = id`.
    pub fn dmap_apply(&self, k: usize, m: &[Scalar]) -> Vec<Scalar> {
        if k == 0 {
            m.to_vec()
        } else {
            self.dmaps[k - 1].mul_vec(m)
        }
    }

    pub fn act_left(&self, a: &[Scalar], m: &[Scalar]) -> Vec<Scalar> {
        let mut out = zeros(self.mdim);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (p, y) in m.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let start = (i * self.mdim + p) * self.mdim;
                axpy(&mut out, &(x * y), &self.left[start..start + self.mdim]);
            }
        }
        out
    }

    pub fn act_right(&self, m: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
        let mut out = zeros(self.mdim);
        for (p, y) in m.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let start = (p * self.dim + i) * self.mdim;
                axpy(&mut out, &(x * y), &self.right[start..start + self.mdim]);
            }
        }
        out
    }
}

/// Checks the bimodule axioms and the module higher-derivation laws
/// `d_k^M(am) = Σ d_i(a) d_j^M(m)` and `d_k^M(ma) = Σ d_i^M(m) d_j(a)`.
pub fn verify_bimodule(a: &Algebra, d: &HigherDerivation, m: &Bimodule) -> Result<CheckReport> {
    if m.dim != a.dim() || d.dim() != a.dim() {
        return Err(Error::Shape(format!(
            "bimodule over dim {} / derivation on dim {} vs algebra dim {}",
            m.dim,
            d.dim(),
            a.dim()
        )));
    }
    if m.rank() != d.rank() {
        return Err(Error::Shape(format!("bimodule has {} maps but the derivation has rank {}", m.rank(), d.rank())));
    }
    let n = a.dim();
    let md = m.mdim;
    let ea = |i: usize| a.basis_vector(i);
    let em = |p: usize| unit_vector(md, p);

    let pairs = |outer: usize, inner: usize| (0..outer).flat_map(move |x| (0..inner).map(move |y| (x, y)));

    let left_assoc = first_mismatch(
        "left module",
        pairs(n, n).flat_map(|(i, j)| {
            (0..md).map(move |p| {
                let lhs = m.act_left(a.basis_product(i, j), &em(p));
                let rhs = m.act_left(&ea(i), &m.act_left(&ea(j), &em(p)));
                (vec![i, j, p], lhs, rhs)
            })
        }),
    );
    let right_assoc = || {
        first_mismatch(
            "right module",
            pairs(md, n).flat_map(|(p, i)| {
                (0..n).map(move |j| {
                    let lhs = m.act_right(&m.act_right(&em(p), &ea(i)), &ea(j));
                    let rhs = m.act_right(&em(p), a.basis_product(i, j));
                    (vec![p, i, j], lhs, rhs)
                })
            }),
        )
    };
    let compat = || {
        first_mismatch(
            "bimodule compatibility",
            pairs(n, md).flat_map(|(i, p)| {
                (0..n).map(move |j| {
                    let lhs = m.act_right(&m.act_left(&ea(i), &em(p)), &ea(j));
                    let rhs = m.act_left(&ea(i), &m.act_right(&em(p), &ea(j)));
                    (vec![i, p, j], lhs, rhs)
                })
            }),
        )
    };
    let left_hder = || {
        first_mismatch(
            "left module higher derivation",
            (1..=d.rank()).flat_map(|k| {
                pairs(n, md).map(move |(i, p)| {
                    let lhs = m.dmap_apply(k, &m.act_left(&ea(i), &em(p)));
                    let mut rhs = zeros(md);
                    for s in 0..=k {
                        let v = m.act_left(&d.apply(s, &ea(i)), &m.dmap_apply(k - s, &em(p)));
                        axpy(&mut rhs, &Scalar::one(), &v);
                    }
                    (vec![k, i, p], lhs, rhs)
                })
            }),
        )
    };
    let right_hder = || {
        first_mismatch(
            "right module higher derivation",
            (1..=d.rank()).flat_map(|k| {
                pairs(md, n).map(move |(p, i)| {
                    let lhs = m.dmap_apply(k, &m.act_right(&em(p), &ea(i)));
                    let mut rhs = zeros(md);
                    for s in 0..=k {
                        let v = m.act_right(&m.dmap_apply(s, &em(p)), &d.apply(k - s, &ea(i)));
                        axpy(&mut rhs, &Scalar::one(), &v);
                    }
                    (vec![k, p, i], lhs, rhs)
                })
            }),
        )
    };

    let mut report = left_assoc;
    for next in [&right_assoc as &dyn Fn() -> CheckReport, &compat, &left_hder, &right_hder] {
        if !report.is_ok() {
            break;
        }
        report = next();
    }
    Ok(report)
}

/// The algebra as a bimodule over itself, with `d_k^M = d_k`.
pub fn adjoint_bimodule(a: &Algebra, d: &HigherDerivation) -> Bimodule {
    let n = a.dim();
    // Both action tensors share the layout of the structure constants.
    let c = a.structure_constants().to_vec();
    Bimodule { dim: n, mdim: n, left: c.clone(), right: c, dmaps: d.maps().to_vec() }
}

/// Module with identically zero actions; every choice of `dmaps` is valid.
pub fn trivial_bimodule(a: &Algebra, mdim: usize, dmaps: Vec<Matrix>) -> Result<Bimodule> {
    let need = a.dim() * mdim * mdim;
    Bimodule::new(a.dim(), mdim, zeros(need), zeros(need), dmaps)
}
