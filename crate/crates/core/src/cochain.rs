//! The cochain complex of an AssHDer pair with coefficients in a bimodule.
//!
//! `C^1 = Hom(A, M)` and, for `n ≥ 2`,
//! `C^n = Hom(A^{⊗n}, M) × Hom(A^{⊗(n−1)}, M)^N`. The differential is
//!
//! ```text
//! ∂f              = (δ_Hoch f; −δ_1 f, …, −δ_N f)                      n = 1
//! ∂(f; f_1..f_N)  = (δ_Hoch f; δ'f_1 + (−1)^n δ_1 f, …)                n ≥ 2
//! ```
//!
//! `C^0 = 0`, so `H^1` is the space of 1-cocycles. Conventions: `d_0 = id`,
//! `d_0^M = id` and `f_0 = 0` inside `δ'` and the bracket.

use num_traits::{One, Zero};

use crate::algebra::{Algebra, Bimodule};
use crate::error::{Error, Result};
use crate::exactlin::{
    axpy, extend_independent, is_zero_vec, kernel_basis, quotient_dim, rank, solve_affine, zeros, Matrix, Scalar,
};
use crate::hder::HigherDerivation;

/// Multilinear map `A^{⊗n} → M` stored by its values on basis tuples;
/// `values[((i_1·dim + i_2)·dim + …)·mdim + b]` is the `m_b` coordinate of
/// `f(e_{i_1}, …, e_{i_n})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    arity: usize,
    dim: usize,
    mdim: usize,
    values: Vec<Scalar>,
}

impl MultiMap {
    pub fn zero(arity: usize, dim: usize, mdim: usize) -> Self {
        MultiMap { arity, dim, mdim, values: zeros(dim.pow(arity as u32) * mdim) }
    }

    pub fn from_values(arity: usize, dim: usize, mdim: usize, values: Vec<Scalar>) -> Result<Self> {
        let need = dim.pow(arity as u32) * mdim;
        if values.len() != need {
            return Err(Error::Shape(format!(
                "{arity}-ary map {dim}→{mdim} needs {need} values, got {}",
                values.len()
            )));
        }
        Ok(MultiMap { arity, dim, mdim, values })
    }

    /// Fills every basis tuple from `f`.
    pub fn from_fn(arity: usize, dim: usize, mdim: usize, mut f: impl FnMut(&[usize]) -> Vec<Scalar>) -> Self {
        let mut out = Self::zero(arity, dim, mdim);
        for t in 0..out.tuple_count() {
            let idx = digits(t, dim, arity);
            let v = f(&idx);
            assert_eq!(v.len(), mdim);
            out.values[t * mdim..(t + 1) * mdim].clone_from_slice(&v);
        }
        out
    }

    /// Linear map `A → M` from a `mdim × dim` matrix (columns are images).
    pub fn from_matrix(m: &Matrix) -> Self {
        Self::from_fn(1, m.cols(), m.rows(), |idx| m.column(idx[0]))
    }

    /// The multiplication of `A` as a bilinear map into `A`.
    pub fn multiplication(a: &Algebra) -> Self {
        MultiMap { arity: 2, dim: a.dim(), mdim: a.dim(), values: a.structure_constants().to_vec() }
    }

    /// Inverse of [`MultiMap::from_matrix`]; requires arity 1.
    pub fn to_matrix(&self) -> Matrix {
        assert_eq!(self.arity, 1, "only unary maps are matrices");
        let cols: Vec<Vec<Scalar>> = (0..self.dim).map(|i| self.at(&[i]).to_vec()).collect();
        Matrix::from_columns(self.mdim, &cols)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mdim(&self) -> usize {
        self.mdim
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn tuple_count(&self) -> usize {
        self.dim.pow(self.arity as u32)
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.values)
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.arity);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Value on a basis tuple.
    pub fn at(&self, idx: &[usize]) -> &[Scalar] {
        let o = self.offset(idx) * self.mdim;
        &self.values[o..o + self.mdim]
    }

    pub fn at_mut(&mut self, idx: &[usize]) -> &mut [Scalar] {
        let o = self.offset(idx) * self.mdim;
        &mut self.values[o..o + self.mdim]
    }

    /// Value on arbitrary arguments, expanded multilinearly over their
    /// nonzero coordinates.
    pub fn eval(&self, args: &[&[Scalar]]) -> Vec<Scalar> {
        assert_eq!(args.len(), self.arity, "argument count");
        let mut partial: Vec<(usize, Scalar)> = vec![(0, Scalar::one())];
        for arg in args {
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (off, c) in &partial {
                for (i, x) in arg.iter().enumerate() {
                    if !x.is_zero() {
                        next.push((off * self.dim + i, c * x));
                    }
                }
            }
            partial = next;
            if partial.is_empty() {
                break;
            }
        }
        let mut out = zeros(self.mdim);
        for (off, c) in partial {
            axpy(&mut out, &c, &self.values[off * self.mdim..(off + 1) * self.mdim]);
        }
        out
    }

    fn same_shape(&self, other: &MultiMap) {
        assert_eq!((self.arity, self.dim, self.mdim), (other.arity, other.dim, other.mdim), "multimap shapes");
    }

    pub fn add(&self, other: &MultiMap) -> MultiMap {
        self.same_shape(other);
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + y).collect();
        self.with_values(values)
    }

    pub fn sub(&self, other: &MultiMap) -> MultiMap {
        self.same_shape(other);
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x - y).collect();
        self.with_values(values)
    }

    pub fn scale(&self, s: &Scalar) -> MultiMap {
        self.with_values(self.values.iter().map(|x| s * x).collect())
    }

    pub fn neg(&self) -> MultiMap {
        self.scale(&-Scalar::one())
    }

    fn with_values(&self, values: Vec<Scalar>) -> MultiMap {
        MultiMap { arity: self.arity, dim: self.dim, mdim: self.mdim, values }
    }

    /// Post-composition with a linear map on `M`.
    pub fn then(&self, m: &Matrix) -> MultiMap {
        assert_eq!(m.cols(), self.mdim);
        let mut out = MultiMap::zero(self.arity, self.dim, m.rows());
        for t in 0..self.tuple_count() {
            let v = m.mul_vec(&self.values[t * self.mdim..(t + 1) * self.mdim]);
            out.values[t * m.rows()..(t + 1) * m.rows()].clone_from_slice(&v);
        }
        out
    }
}

/// Mixed-radix digits of `t`, most significant first.
pub(crate) fn digits(mut t: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = t % base;
        t /= base;
    }
    out
}

/// All `len`-tuples of non-negative integers summing to `total`, in
/// lexicographic order.
pub(crate) fn compositions(total: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, len: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if len == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            go(total - first, len - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Element of `C^n`: the main `n`-ary map and, for `n ≥ 2`, `N` parts of
/// arity `n − 1`. Basis order: main block first, then parts `1..N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    main: MultiMap,
    parts: Vec<MultiMap>,
}

impl Cochain {
    pub fn new(main: MultiMap, parts: Vec<MultiMap>) -> Result<Self> {
        let degree = main.arity;
        if degree == 0 {
            return Err(Error::Shape("cochains have degree at least 1".into()));
        }
        if degree == 1 && !parts.is_empty() {
            return Err(Error::Shape("1-cochains have no parts".into()));
        }
        if let Some(p) = parts.iter().find(|p| (p.arity, p.dim, p.mdim) != (degree - 1, main.dim, main.mdim)) {
            return Err(Error::Shape(format!(
                "part has arity {} on ({}, {}), expected arity {} on ({}, {})",
                p.arity,
                p.dim,
                p.mdim,
                degree - 1,
                main.dim,
                main.mdim
            )));
        }
        Ok(Cochain { degree, main, parts })
    }

    pub fn one(f: MultiMap) -> Self {
        assert_eq!(f.arity, 1);
        Cochain { degree: 1, main: f, parts: Vec::new() }
    }

    pub fn zero(degree: usize, dim: usize, mdim: usize, rank: usize) -> Self {
        assert!(degree >= 1);
        let parts = if degree == 1 { Vec::new() } else { vec![MultiMap::zero(degree - 1, dim, mdim); rank] };
        Cochain { degree, main: MultiMap::zero(degree, dim, mdim), parts }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn main(&self) -> &MultiMap {
        &self.main
    }

    pub fn parts(&self) -> &[MultiMap] {
        &self.parts
    }

    /// `f_k` for `k ≥ 1`.
    pub fn part(&self, k: usize) -> &MultiMap {
        &self.parts[k - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.main.is_zero() && self.parts.iter().all(MultiMap::is_zero)
    }

    pub fn to_vector(&self) -> Vec<Scalar> {
        let mut v = self.main.values.clone();
        for p in &self.parts {
            v.extend_from_slice(&p.values);
        }
        v
    }

    pub fn from_vector(degree: usize, dim: usize, mdim: usize, rank: usize, v: &[Scalar]) -> Result<Self> {
        let len = cochain_dim(degree, dim, mdim, rank);
        if v.len() != len {
            return Err(Error::Shape(format!("C^{degree} has dimension {len}, got {} coordinates", v.len())));
        }
        let main_len = dim.pow(degree as u32) * mdim;
        let main = MultiMap::from_values(degree, dim, mdim, v[..main_len].to_vec())?;
        let part_len = if degree == 1 { 0 } else { dim.pow(degree as u32 - 1) * mdim };
        let parts = if degree == 1 {
            Vec::new()
        } else {
            (0..rank)
                .map(|k| {
                    let s = main_len + k * part_len;
                    MultiMap::from_values(degree - 1, dim, mdim, v[s..s + part_len].to_vec())
                })
                .collect::<Result<_>>()?
        };
        Ok(Cochain { degree, main, parts })
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.degree, other.degree);
        Cochain {
            degree: self.degree,
            main: self.main.add(&other.main),
            parts: self.parts.iter().zip(&other.parts).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Cochain {
        Cochain { degree: self.degree, main: self.main.scale(s), parts: self.parts.iter().map(|p| p.scale(s)).collect() }
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&-Scalar::one())
    }
}

/// `dim C^n = mdim·dim^n + N·mdim·dim^{n−1}` for `n ≥ 2`, `mdim·dim` for `n = 1`.
pub fn cochain_dim(degree: usize, dim: usize, mdim: usize, rank: usize) -> usize {
    match degree {
        0 => 0,
        1 => dim * mdim,
        n => mdim * dim.pow(n as u32) + rank * mdim * dim.pow(n as u32 - 1),
    }
}

/// Dimensions of `H^n` and the data that produced them.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub degree: usize,
    pub dim_cochains: usize,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub betti: usize,
    /// Canonical kernel basis of `∂: C^n → C^{n+1}`.
    pub cocycle_basis: Vec<Cochain>,
    /// Cocycles whose classes form a basis of `H^n` (chosen greedily from
    /// `cocycle_basis` modulo the coboundaries).
    pub class_representatives: Vec<Cochain>,
    /// Matrix of `∂: C^{n−1} → C^n` (zero columns when `n = 1`).
    pub coboundary_matrix: Matrix,
    /// Matrix of `∂: C^n → C^{n+1}`.
    pub differential: Matrix,
}

/// The data `(A, d, M)` that determines the complex.
#[derive(Clone, Debug)]
pub struct Complex<'a> {
    algebra: &'a Algebra,
    hder: &'a HigherDerivation,
    module: &'a Bimodule,
    /// `d_s(e_j)` for `s = 0..=N`.
    dcols: Vec<Vec<Vec<Scalar>>>,
}

impl<'a> Complex<'a> {
    pub fn new(algebra: &'a Algebra, hder: &'a HigherDerivation, module: &'a Bimodule) -> Result<Self> {
        let n = algebra.dim();
        if hder.dim() != n || module.dim() != n {
            return Err(Error::Shape(format!(
                "algebra dim {n}, derivation dim {}, bimodule over dim {}",
                hder.dim(),
                module.dim()
            )));
        }
        if module.rank() != hder.rank() {
            return Err(Error::Shape(format!(
                "bimodule has {} maps but the derivation has rank {}",
                module.rank(),
                hder.rank()
            )));
        }
        let dcols = (0..=hder.rank())
            .map(|s| (0..n).map(|j| hder.apply(s, &algebra.basis_vector(j))).collect())
            .collect();
        Ok(Complex { algebra, hder, module, dcols })
    }

    pub fn algebra(&self) -> &Algebra {
        self.algebra
    }

    pub fn hder(&self) -> &HigherDerivation {
        self.hder
    }

    pub fn module(&self) -> &Bimodule {
        self.module
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn mdim(&self) -> usize {
        self.module.mdim()
    }

    pub fn rank(&self) -> usize {
        self.hder.rank()
    }

    pub fn cochain_dim(&self, degree: usize) -> usize {
        cochain_dim(degree, self.dim(), self.mdim(), self.rank())
    }

    pub fn zero_cochain(&self, degree: usize) -> Cochain {
        Cochain::zero(degree, self.dim(), self.mdim(), self.rank())
    }

    pub fn cochain_from_vector(&self, degree: usize, v: &[Scalar]) -> Result<Cochain> {
        Cochain::from_vector(degree, self.dim(), self.mdim(), self.rank(), v)
    }

    fn check_map(&self, f: &MultiMap) {
        assert_eq!((f.dim, f.mdim), (self.dim(), self.mdim()), "map does not match the complex");
    }

    /// Product `e_i e_j` of consecutive basis arguments, used when a
    /// Hochschild-type sum contracts two slots.
    fn contracted(&self, idx: &[usize], i: usize) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        let basis = |j: usize| {
            let mut v = zeros(n);
            v[j] = Scalar::one();
            v
        };
        let mut args = Vec::with_capacity(idx.len() - 1);
        for &j in &idx[..i] {
            args.push(basis(j));
        }
        args.push(self.algebra.basis_product(idx[i], idx[i + 1]).to_vec());
        for &j in &idx[i + 2..] {
            args.push(basis(j));
        }
        args
    }

    /// `Σ_{i=1..n} (−1)^i f(…, a_i a_{i+1}, …)` on a basis tuple of length `n+1`.
    fn inner_terms(&self, f: &MultiMap, idx: &[usize], out: &mut [Scalar]) {
        let n = f.arity;
        for i in 0..n {
            let args = self.contracted(idx, i);
            let refs: Vec<&[Scalar]> = args.iter().map(Vec::as_slice).collect();
            let v = f.eval(&refs);
            let sign = if (i + 1) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            axpy(out, &sign, &v);
        }
    }

    /// Classical Hochschild coboundary
    /// `(δf)(a_1..a_{n+1}) = a_1 f(a_2..) + Σ(−1)^i f(..a_i a_{i+1}..) + (−1)^{n+1} f(a_1..a_n) a_{n+1}`.
    pub fn delta_hoch(&self, f: &MultiMap) -> MultiMap {
        self.check_map(f);
        let n = f.arity;
        let m = self.module;
        let last_sign = if (n + 1).is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
        MultiMap::from_fn(n + 1, self.dim(), self.mdim(), |idx| {
            let mut out = m.act_left(&self.dcols[0][idx[0]], f.at(&idx[1..]));
            self.inner_terms(f, idx, &mut out);
            let right = m.act_right(f.at(&idx[..n]), &self.dcols[0][idx[n]]);
            axpy(&mut out, &last_sign, &right);
            out
        })
    }

    /// Modified Hochschild coboundary of a family `(f_1, …, f_N)`:
    /// ```text
    /// (δ'f_k)(a_1..a_{n+1}) = Σ_{i+j=k, j≥1} d_i(a_1)·f_j(a_2..)
    ///                       + Σ_{i=1..n} (−1)^i f_k(..a_i a_{i+1}..)
    ///                       + (−1)^{n+1} Σ_{i+j=k, i≥1} f_i(a_1..a_n)·d_j(a_{n+1})
    /// ```
    pub fn delta_prime(&self, parts: &[MultiMap]) -> Vec<MultiMap> {
        assert_eq!(parts.len(), self.rank(), "family length must equal the rank");
        let Some(first) = parts.first() else {
            return Vec::new();
        };
        let n = first.arity;
        for p in parts {
            self.check_map(p);
            assert_eq!(p.arity, n, "family members share one arity");
        }
        let m = self.module;
        let last_sign = if (n + 1) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        (1..=self.rank())
            .map(|k| {
                let fk = &parts[k - 1];
                MultiMap::from_fn(n + 1, self.dim(), self.mdim(), |idx| {
                    let mut out = zeros(self.mdim());
                    for j in 1..=k {
                        let v = m.act_left(&self.dcols[k - j][idx[0]], parts[j - 1].at(&idx[1..]));
                        axpy(&mut out, &Scalar::one(), &v);
                    }
                    self.inner_terms(fk, idx, &mut out);
                    for i in 1..=k {
                        let v = m.act_right(parts[i - 1].at(&idx[..n]), &self.dcols[k - i][idx[n]]);
                        axpy(&mut out, &last_sign, &v);
                    }
                    out
                })
            })
            .collect()
    }

    /// `δ_k f = Σ_{i_1+…+i_n=k} f∘(d_{i_1}⊗…⊗d_{i_n}) − d_k^M∘f`.
    pub fn delta_k(&self, f: &MultiMap, k: usize) -> MultiMap {
        self.check_map(f);
        assert!(k >= 1 && k <= self.rank(), "k outside 1..=N");
        let n = f.arity;
        let comps = compositions(k, n);
        let dk_m = &self.module.dmaps()[k - 1];
        MultiMap::from_fn(n, self.dim(), self.mdim(), |idx| {
            let mut out = zeros(self.mdim());
            for c in &comps {
                let args: Vec<&[Scalar]> = c.iter().zip(idx).map(|(&s, &j)| self.dcols[s][j].as_slice()).collect();
                axpy(&mut out, &Scalar::one(), &f.eval(&args));
            }
            axpy(&mut out, &-Scalar::one(), &dk_m.mul_vec(f.at(idx)));
            out
        })
    }

    /// The differential `∂: C^n → C^{n+1}`.
    pub fn partial(&self, c: &Cochain) -> Cochain {
        let n = c.degree;
        let main = self.delta_hoch(&c.main);
        let parts = if n == 1 {
            (1..=self.rank()).map(|k| self.delta_k(&c.main, k).neg()).collect()
        } else {
            assert_eq!(c.parts.len(), self.rank(), "cochain has the wrong number of parts");
            let sign = if n.is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
            self.delta_prime(&c.parts)
                .into_iter()
                .enumerate()
                .map(|(k0, dp)| dp.add(&self.delta_k(&c.main, k0 + 1).scale(&sign)))
                .collect()
        };
        Cochain { degree: n + 1, main, parts }
    }

    /// Matrix of `∂: C^n → C^{n+1}` in the fixed cochain bases.
    pub fn differential_matrix(&self, degree: usize) -> Matrix {
        let cols_in = self.cochain_dim(degree);
        let rows = self.cochain_dim(degree + 1);
        let mut unit = zeros(cols_in);
        let columns: Vec<Vec<Scalar>> = (0..cols_in)
            .map(|j| {
                unit[j] = Scalar::one();
                let c = self.cochain_from_vector(degree, &unit).expect("basis cochain");
                unit[j] = Scalar::zero();
                self.partial(&c).to_vector()
            })
            .collect();
        Matrix::from_columns(rows, &columns)
    }

    /// `H^n` of the complex, `n ≥ 1`.
    pub fn cohomology(&self, degree: usize) -> Result<CohomologyReport> {
        if degree == 0 {
            return Err(Error::Precondition("cohomology degree must be at least 1".into()));
        }
        let differential = self.differential_matrix(degree);
        let coboundary_matrix = if degree == 1 {
            Matrix::zeros(self.cochain_dim(1), 0)
        } else {
            self.differential_matrix(degree - 1)
        };
        let betti = quotient_dim(&coboundary_matrix, &differential)?;
        let kernel = kernel_basis(&differential);
        let dim_coboundaries = rank(&coboundary_matrix);
        let image: Vec<Vec<Scalar>> = (0..coboundary_matrix.cols()).map(|j| coboundary_matrix.column(j)).collect();
        let image_basis: Vec<Vec<Scalar>> =
            extend_independent(&[], &image).into_iter().map(|j| image[j].clone()).collect();
        let reps = extend_independent(&image_basis, &kernel);
        debug_assert_eq!(reps.len(), betti);
        let to_cochain = |v: &Vec<Scalar>| self.cochain_from_vector(degree, v).expect("kernel vector");
        Ok(CohomologyReport {
            degree,
            dim_cochains: self.cochain_dim(degree),
            dim_cocycles: kernel.len(),
            dim_coboundaries,
            betti,
            class_representatives: reps.iter().map(|&j| to_cochain(&kernel[j])).collect(),
            cocycle_basis: kernel.iter().map(to_cochain).collect(),
            coboundary_matrix,
            differential,
        })
    }

    pub fn is_cocycle(&self, c: &Cochain) -> bool {
        self.partial(c).is_zero()
    }

    /// Canonical preimage of a cocycle under `∂`, if it is a coboundary.
    pub fn is_coboundary(&self, c: &Cochain) -> Result<Option<Cochain>> {
        if c.degree < 2 {
            return Err(Error::Precondition("coboundaries live in degree ≥ 2".into()));
        }
        if !self.is_cocycle(c) {
            return Err(Error::NotCocycle(format!("degree-{} cochain is not killed by the differential", c.degree)));
        }
        self.preimage(c)
    }

    /// Canonical solution `x` of `∂x = c`, without requiring `c` to be a cocycle.
    pub fn preimage(&self, c: &Cochain) -> Result<Option<Cochain>> {
        let m = self.differential_matrix(c.degree - 1);
        match solve_affine(&m, &c.to_vector()) {
            Some(x) => Ok(Some(self.cochain_from_vector(c.degree - 1, &x)?)),
            None => Ok(None),
        }
    }

    /// Generalized Gerstenhaber bracket `[P, f_k]_N` for adjoint
    /// coefficients, with `P: A^{⊗m} → A` and a family `f_1..f_N` of
    /// `n`-ary maps into `A`:
    /// ```text
    /// Σ_{j=1..m} Σ_{i_1+…+i_m=k} (−1)^{(j−1)(n−1)} P(d_{i_1}a_1, …, f_{i_j}(a_j..a_{j+n−1}), …, d_{i_m}a_{m+n−1})
    ///   − (−1)^{(m−1)(n−1)} Σ_{j=1..n} (−1)^{(j−1)(m−1)} f_k(a_1, …, P(a_j..a_{j+m−1}), …)
    /// ```
    /// The slot carrying `f` uses `i_j ≥ 1` (`f_0 = 0`); other slots use
    /// `d_{i_l}` with `i_l ≥ 0`. This operator is experimental: when the
    /// family is `d` itself the first sum counts a multi-index once per
    /// positive entry.
    pub fn bracket(&self, p: &MultiMap, family: &[MultiMap], k: usize) -> MultiMap {
        assert_eq!(self.mdim(), self.dim(), "bracket needs coefficients in the algebra");
        assert!(k >= 1 && k <= family.len());
        let m_ar = p.arity;
        let n_ar = family[0].arity;
        let out_ar = m_ar + n_ar - 1;
        let sign = |e: usize| if e.is_multiple_of(2) { Scalar::one() } else { -Scalar::one() };
        let comps = compositions(k, m_ar);
        let fk = &family[k - 1];
        MultiMap::from_fn(out_ar, self.dim(), self.dim(), |idx| {
            let mut out = zeros(self.dim());
            for j in 0..m_ar {
                for c in comps.iter().filter(|c| c[j] >= 1) {
                    let mut args: Vec<Vec<Scalar>> = Vec::with_capacity(m_ar);
                    for l in 0..m_ar {
                        if l < j {
                            args.push(self.dcols[c[l]][idx[l]].clone());
                        } else if l == j {
                            args.push(family[c[j] - 1].at(&idx[j..j + n_ar]).to_vec());
                        } else {
                            args.push(self.dcols[c[l]][idx[l + n_ar - 1]].clone());
                        }
                    }
                    let refs: Vec<&[Scalar]> = args.iter().map(Vec::as_slice).collect();
                    axpy(&mut out, &sign(j * (n_ar - 1)), &p.eval(&refs));
                }
            }
            let outer = -sign((m_ar - 1) * (n_ar - 1));
            for j in 0..n_ar {
                let mut args: Vec<Vec<Scalar>> = Vec::with_capacity(n_ar);
                for &i in &idx[..j] {
                    args.push(self.dcols[0][i].clone());
                }
                args.push(p.at(&idx[j..j + m_ar]).to_vec());
                for &i in &idx[j + m_ar..] {
                    args.push(self.dcols[0][i].clone());
                }
                let refs: Vec<&[Scalar]> = args.iter().map(Vec::as_slice).collect();
                axpy(&mut out, &(&outer * sign(j * (m_ar - 1))), &fk.eval(&refs));
            }
            out
        })
    }

    /// `[f_k, P]_N := −(−1)^{(m−1)(n−1)} [P, f_k]_N`.
    pub fn bracket_reversed(&self, family: &[MultiMap], p: &MultiMap, k: usize) -> MultiMap {
        let e = (p.arity - 1) * (family[0].arity - 1);
        let b = self.bracket(p, family, k);
        if e.is_multiple_of(2) {
            b.neg()
        } else {
            b
        }
    }
}
