//! Higher derivations `(d_1, …, d_N)` on an algebra, the standard
//! constructions of them, and morphisms of AssHDer pairs.
//!
//! `d_0 = id` is implicit and never stored. Every convolution sum
//! `Σ_{i+j=k}` runs over `i, j ≥ 0` with that convention.

use num_traits::One;

use crate::algebra::{verify_algebra, Algebra};
use crate::error::{Error, Result};
use crate::exactlin::{axpy, q, zeros, Matrix, Scalar};
use crate::report::{first_mismatch, CheckReport, Violation};

/// Rank-`N` sequence of linear maps on an algebra; `(d_k v) = maps[k-1]·v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherDerivation {
    dim: usize,
    maps: Vec<Matrix>,
}

impl HigherDerivation {
    pub fn new(maps: Vec<Matrix>) -> Result<Self> {
        let Some(first) = maps.first() else {
            return Err(Error::Precondition("higher derivation of rank 0".into()));
        };
        let dim = first.rows();
        if let Some(m) = maps.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::Shape(format!("map is {}x{}, expected {dim}x{dim}", m.rows(), m.cols())));
        }
        Ok(HigherDerivation { dim, maps })
    }

    pub fn zero(dim: usize, rank: usize) -> Self {
        assert!(rank >= 1);
        HigherDerivation { dim, maps: vec![Matrix::zeros(dim, dim); rank] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// Matrix of `d_k`, identity for `k = 0`.
    pub fn map(&self, k: usize) -> Matrix {
        if k == 0 {
            Matrix::identity(self.dim)
        } else {
            self.maps[k - 1].clone()
        }
    }

    /// `d_k(v)`, with `d_0 = id`.
    pub fn apply(&self, k: usize, v: &[Scalar]) -> Vec<Scalar> {
        if k == 0 {
            v.to_vec()
        } else {
            self.maps[k - 1].mul_vec(v)
        }
    }
}

/// An algebra together with a higher derivation on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssHDerPair {
    pub algebra: Algebra,
    pub hder: HigherDerivation,
}

impl AssHDerPair {
    pub fn new(algebra: Algebra, hder: HigherDerivation) -> Result<Self> {
        if algebra.dim() != hder.dim() {
            return Err(Error::Shape(format!(
                "derivation acts on dim {} but the algebra has dim {}",
                hder.dim(),
                algebra.dim()
            )));
        }
        Ok(AssHDerPair { algebra, hder })
    }

    pub fn rank(&self) -> usize {
        self.hder.rank()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

fn check_dims(a: &Algebra, d: &HigherDerivation) -> Result<()> {
    if a.dim() != d.dim() {
        return Err(Error::Shape(format!("derivation acts on dim {} but the algebra has dim {}", d.dim(), a.dim())));
    }
    Ok(())
}

/// `d_k(e_i e_j) = Σ_{p+q=k} d_p(e_i)·d_q(e_j)` for all `k` and basis pairs,
/// scanned in lexicographic order of `(k, i, j)`.
pub fn verify_hder(a: &Algebra, d: &HigherDerivation) -> Result<CheckReport> {
    check_dims(a, d)?;
    let n = a.dim();
    Ok(first_mismatch(
        "hder",
        (1..=d.rank()).flat_map(|k| {
            (0..n).flat_map(move |i| {
                (0..n).map(move |j| {
                    let lhs = d.apply(k, a.basis_product(i, j));
                    let rhs = leibniz_sum(a, d, k, &a.basis_vector(i), &a.basis_vector(j));
                    (vec![k, i, j], lhs, rhs)
                })
            })
        }),
    ))
}

/// `Σ_{p+q=k} d_p(x)·d_q(y)`.
pub(crate) fn leibniz_sum(a: &Algebra, d: &HigherDerivation, k: usize, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let mut out = zeros(a.dim());
    for p in 0..=k {
        axpy(&mut out, &Scalar::one(), &a.mul(&d.apply(p, x), &d.apply(k - p, y)));
    }
    out
}

/// `{d, d²/2!, …, d^N/N!}` for a derivation `d`.
pub fn ordinary_hder(a: &Algebra, d1: &Matrix, rank: usize) -> Result<HigherDerivation> {
    if rank == 0 {
        return Err(Error::Precondition("higher derivation of rank 0".into()));
    }
    let single = HigherDerivation::new(vec![d1.clone()])?;
    if let Some(v) = verify_hder(a, &single)?.first_violation {
        return Err(Error::Precondition(format!("not a derivation: {v}")));
    }
    let mut maps = Vec::with_capacity(rank);
    let mut power = Matrix::identity(a.dim());
    let mut factorial = Scalar::one();
    for k in 1..=rank {
        power = power.mul(d1);
        factorial *= q(k as i64);
        maps.push(power.scale(&factorial.recip()));
    }
    HigherDerivation::new(maps)
}

/// `d_n(a) = x^{n−1}(xa − ax)`.
pub fn power_commutator_hder(a: &Algebra, x: &[Scalar], rank: usize) -> Result<HigherDerivation> {
    if x.len() != a.dim() {
        return Err(Error::Shape(format!("element has {} coordinates, algebra dim {}", x.len(), a.dim())));
    }
    if rank == 0 {
        return Err(Error::Precondition("higher derivation of rank 0".into()));
    }
    let commutator = a.left_mul_matrix(x).sub(&a.right_mul_matrix(x));
    let maps = (1..=rank)
        .map(|n| if n == 1 { commutator.clone() } else { a.left_mul_matrix(&a.power(x, n - 1)).mul(&commutator) })
        .collect();
    HigherDerivation::new(maps)
}

/// `d'_k = d_s` when `k = s·q`, zero otherwise.
pub fn stretch_hder(d: &HigherDerivation, q: usize) -> Result<HigherDerivation> {
    if q == 0 || q > d.rank() {
        return Err(Error::Precondition(format!("stretch factor {q} outside 1..={}", d.rank())));
    }
    let maps = (1..=d.rank())
        .map(|k| if k % q == 0 { d.map(k / q) } else { Matrix::zeros(d.dim, d.dim) })
        .collect();
    HigherDerivation::new(maps)
}

/// `d_n(a) = Σ_{i=0..n} x_i a y_{n−i}` with `x_0 = y_0 = 1`. Requires the
/// convolution-inverse condition `Σ x_i y_{n−i} = δ_{n0} = Σ y_i x_{n−i}`
/// for `n = 0..N`.
pub fn inner_hder(a: &Algebra, xs: &[Vec<Scalar>], ys: &[Vec<Scalar>]) -> Result<HigherDerivation> {
    let Some(one) = a.unit_vector() else {
        return Err(Error::Precondition("inner higher derivations need a unital algebra".into()));
    };
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Shape(format!("need equally many x and y elements, got {} and {}", xs.len(), ys.len())));
    }
    if xs.iter().chain(ys).any(|v| v.len() != a.dim()) {
        return Err(Error::Shape("element coordinates do not match the algebra dimension".into()));
    }
    let rank = xs.len();
    let elem = |seq: &[Vec<Scalar>], i: usize| if i == 0 { one.clone() } else { seq[i - 1].clone() };
    for n in 0..=rank {
        let expected = if n == 0 { one.clone() } else { zeros(a.dim()) };
        let mut xy = zeros(a.dim());
        let mut yx = zeros(a.dim());
        for i in 0..=n {
            axpy(&mut xy, &Scalar::one(), &a.mul(&elem(xs, i), &elem(ys, n - i)));
            axpy(&mut yx, &Scalar::one(), &a.mul(&elem(ys, i), &elem(xs, n - i)));
        }
        if xy != expected || yx != expected {
            return Err(Error::Precondition(format!("convolution-inverse condition fails at n={n}")));
        }
    }
    let maps = (1..=rank)
        .map(|n| {
            (0..=n).fold(Matrix::zeros(a.dim(), a.dim()), |acc, i| {
                acc.add(&a.left_mul_matrix(&elem(xs, i)).mul(&a.right_mul_matrix(&elem(ys, n - i))))
            })
        })
        .collect();
    HigherDerivation::new(maps)
}

/// The algebra `A[t]/(t^{N+1})`; basis element `e_i t^s` has index `s·dim + i`.
pub fn truncated_polynomial_extension(a: &Algebra, order: usize) -> Algebra {
    let n = a.dim();
    let total = n * (order + 1);
    let labels = (0..=order)
        .flat_map(|s| a.labels().iter().map(move |l| if s == 0 { l.clone() } else { format!("{l}·t^{s}") }))
        .collect();
    Algebra::from_fn(labels, a.unit_index(), |x, y| {
        let (s, i) = (x / n, x % n);
        let (r, j) = (y / n, y % n);
        let mut v = zeros(total);
        if s + r <= order {
            let off = (s + r) * n;
            v[off..off + n].clone_from_slice(a.basis_product(i, j));
        }
        v
    })
    .expect("well-formed truncated extension")
}

/// Checks that `a ↦ a + d_1(a)t + … + d_N(a)t^N` is an algebra morphism
/// `A → A[t]/(t^{N+1})`. Agrees with [`verify_hder`] on every input.
pub fn truncated_morphism_check(a: &Algebra, d: &HigherDerivation) -> Result<CheckReport> {
    check_dims(a, d)?;
    let big = truncated_polynomial_extension(a, d.rank());
    let n = a.dim();
    let embed = |v: &[Scalar]| -> Vec<Scalar> { (0..=d.rank()).flat_map(|s| d.apply(s, v)).collect() };
    Ok(first_mismatch(
        "truncated morphism",
        (0..n).flat_map(|i| {
            let big = &big;
            (0..n).map(move |j| {
                let lhs = embed(a.basis_product(i, j));
                let rhs = big.mul(&embed(&a.basis_vector(i)), &embed(&a.basis_vector(j)));
                (vec![i, j], lhs, rhs)
            })
        }),
    ))
}

/// `f` (a `dim'×dim` matrix) is an algebra morphism with `d'_k f = f d_k`.
/// Intertwining violations are indexed `(k, j)` by basis column.
pub fn check_morphism(source: &AssHDerPair, target: &AssHDerPair, f: &Matrix) -> Result<CheckReport> {
    if source.rank() != target.rank() {
        return Err(Error::Shape(format!("ranks differ: {} vs {}", source.rank(), target.rank())));
    }
    if f.rows() != target.dim() || f.cols() != source.dim() {
        return Err(Error::Shape(format!(
            "map is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            target.dim(),
            source.dim()
        )));
    }
    let (a, b) = (&source.algebra, &target.algebra);
    let n = a.dim();
    let mult = first_mismatch(
        "multiplicativity",
        (0..n).flat_map(|i| {
            (0..n).map(move |j| {
                let lhs = f.mul_vec(a.basis_product(i, j));
                let rhs = b.mul(&f.column(i), &f.column(j));
                (vec![i, j], lhs, rhs)
            })
        }),
    );
    if !mult.is_ok() {
        return Ok(mult);
    }
    for k in 1..=source.rank() {
        let lhs = target.hder.map(k).mul(f);
        let rhs = f.mul(&source.hder.map(k));
        if let Some(j) = (0..n).find(|&j| lhs.column(j) != rhs.column(j)) {
            return Ok(CheckReport::failed(Violation::new("intertwining", vec![k, j], lhs.column(j), rhs.column(j))));
        }
    }
    Ok(CheckReport::ok())
}

/// Verifies the algebra and the derivation together.
pub fn verify_pair(p: &AssHDerPair) -> Result<CheckReport> {
    let r = verify_algebra(&p.algebra);
    if !r.is_ok() {
        return Ok(r);
    }
    verify_hder(&p.algebra, &p.hder)
}

/// Rank-`N` sequence with `d` in slot `slot` (1-based) and zeros elsewhere.
pub fn single_slot(d: &Matrix, rank: usize, slot: usize) -> Result<HigherDerivation> {
    if slot == 0 || slot > rank {
        return Err(Error::Precondition(format!("slot {slot} outside 1..={rank}")));
    }
    let maps = (1..=rank).map(|k| if k == slot { d.clone() } else { Matrix::zeros(d.rows(), d.cols()) }).collect();
    HigherDerivation::new(maps)
}
