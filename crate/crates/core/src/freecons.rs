//! Free constructions: the degree-truncated tensor algebra with its induced
//! higher derivation, the universal extension of linear maps, and the
//! commutator bridge to Lie algebras with higher derivations.
//!
//! Tensor words are enumerated by length, then lexicographically; word `w`
//! of length `l` over `vdim` letters sits at `Σ_{j<l} vdim^j + lex(w)`.

use num_traits::{One, Zero};

use crate::algebra::Algebra;
use crate::cochain::{compositions, digits};
use crate::error::{Error, Result};
use crate::exactlin::{axpy, zeros, Matrix, Scalar};
use crate::hder::HigherDerivation;
use crate::report::{first_mismatch, CheckReport, Violation};

/// `T(V)/T^{>D}(V)` with the concatenation product.
#[derive(Clone, Debug)]
pub struct TruncatedTensorAlgebra {
    vdim: usize,
    max_degree: usize,
    words: Vec<Vec<usize>>,
    algebra: Algebra,
}

impl TruncatedTensorAlgebra {
    pub fn new(vdim: usize, max_degree: usize) -> Result<Self> {
        if vdim == 0 || max_degree == 0 {
            return Err(Error::Precondition("tensor algebra needs vdim ≥ 1 and D ≥ 1".into()));
        }
        let words: Vec<Vec<usize>> = (0..=max_degree)
            .flat_map(|len| (0..vdim.pow(len as u32)).map(move |t| digits(t, vdim, len)))
            .collect();
        let labels = words.iter().map(|w| word_label(w)).collect();
        let dim = words.len();
        let index_of = |w: &[usize]| word_index(vdim, w);
        let algebra = Algebra::from_fn(labels, Some(0), |i, j| {
            let mut v = zeros(dim);
            if words[i].len() + words[j].len() <= max_degree {
                let w: Vec<usize> = words[i].iter().chain(&words[j]).copied().collect();
                v[index_of(&w)] = Scalar::one();
            }
            v
        })?;
        Ok(TruncatedTensorAlgebra { vdim, max_degree, words, algebra })
    }

    pub fn vdim(&self) -> usize {
        self.vdim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn word_index(&self, w: &[usize]) -> usize {
        word_index(self.vdim, w)
    }
}

fn word_index(vdim: usize, w: &[usize]) -> usize {
    let offset: usize = (0..w.len()).map(|l| vdim.pow(l as u32)).sum();
    offset + w.iter().fold(0, |acc, &x| acc * vdim + x)
}

/// `"1"` for the empty word, otherwise `"v0⊗v1⊗…"`.
pub fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        w.iter().map(|x| format!("v{x}")).collect::<Vec<_>>().join("⊗")
    }
}

fn check_thetas(vdim: usize, thetas: &[Matrix]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::Precondition("higher derivation of rank 0".into()));
    }
    if let Some(k) = thetas.iter().position(|t| t.rows() != vdim || t.cols() != vdim) {
        return Err(Error::Shape(format!("theta_{} is not {vdim}x{vdim}", k + 1)));
    }
    Ok(())
}

/// Higher derivation on the truncated tensor algebra induced by linear maps
/// `ϑ_1..ϑ_N` of `V`:
/// `θ̄_k(v_1⊗…⊗v_n) = Σ_{q_1+…+q_n=k} ϑ_{q_1}v_1 ⊗ … ⊗ ϑ_{q_n}v_n` with `ϑ_0 = id`.
pub fn induced_tensor_hder(
    vdim: usize,
    max_degree: usize,
    thetas: &[Matrix],
) -> Result<(TruncatedTensorAlgebra, HigherDerivation)> {
    check_thetas(vdim, thetas)?;
    let tta = TruncatedTensorAlgebra::new(vdim, max_degree)?;
    let dim = tta.words.len();
    let theta = |q: usize| if q == 0 { Matrix::identity(vdim) } else { thetas[q - 1].clone() };
    let all: Vec<Matrix> = (0..=thetas.len()).map(theta).collect();
    let maps = (1..=thetas.len())
        .map(|k| {
            let cols: Vec<Vec<Scalar>> = tta
                .words
                .iter()
                .map(|w| {
                    let mut col = zeros(dim);
                    if w.is_empty() {
                        return col;
                    }
                    for qs in compositions(k, w.len()) {
                        // expand ϑ_{q_1}v_{w_1} ⊗ … letter by letter
                        let mut terms: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::one())];
                        for (&q, &letter) in qs.iter().zip(w) {
                            let image = all[q].column(letter);
                            let mut next = Vec::new();
                            for (prefix, c) in &terms {
                                for (x, y) in image.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                                    let mut p = prefix.clone();
                                    p.push(x);
                                    next.push((p, c * y));
                                }
                            }
                            terms = next;
                        }
                        for (word, c) in terms {
                            col[tta.word_index(&word)] += c;
                        }
                    }
                    col
                })
                .collect();
            Matrix::from_columns(dim, &cols)
        })
        .collect();
    Ok((tta, HigherDerivation::new(maps)?))
}

/// Extends `f: V → B` to `f̃(v_1⊗…⊗v_n) = f(v_1)⋯f(v_n)` on the truncated
/// tensor algebra and checks that `f̃` is multiplicative on word pairs of
/// total degree ≤ D and intertwines `θ̄_k` with `d_k`. The empty word goes
/// to the unit of `B` if `B` declares one; otherwise to 0, and checks that
/// involve it are skipped (recorded in the report notes).
pub fn universal_extension(
    tta: &TruncatedTensorAlgebra,
    thetas: &[Matrix],
    target: &Algebra,
    target_hder: &HigherDerivation,
    f: &Matrix,
) -> Result<(CheckReport, Matrix)> {
    check_thetas(tta.vdim, thetas)?;
    if f.rows() != target.dim() || f.cols() != tta.vdim {
        return Err(Error::Shape(format!(
            "map is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            target.dim(),
            tta.vdim
        )));
    }
    if target_hder.dim() != target.dim() || target_hder.rank() != thetas.len() {
        return Err(Error::Shape(format!(
            "target derivation has rank {} on dim {}, expected rank {} on dim {}",
            target_hder.rank(),
            target_hder.dim(),
            thetas.len(),
            target.dim()
        )));
    }
    for (k, t) in thetas.iter().enumerate() {
        if target_hder.maps()[k].mul(f) != f.mul(t) {
            return Err(Error::Precondition(format!("d_{0}∘f ≠ f∘theta_{0}", k + 1)));
        }
    }
    let unit = target.unit_vector();
    let cols: Vec<Vec<Scalar>> = tta
        .words
        .iter()
        .map(|w| match w.split_first() {
            None => unit.clone().unwrap_or_else(|| zeros(target.dim())),
            Some((&first, rest)) => rest.iter().fold(f.column(first), |acc, &x| target.mul(&acc, &f.column(x))),
        })
        .collect();
    let ext = Matrix::from_columns(target.dim(), &cols);

    let (_, induced) = induced_tensor_hder(tta.vdim, tta.max_degree, thetas)?;
    let skip_unit = unit.is_none();
    let words = &tta.words;
    let src = &tta.algebra;
    let ext_ref = &ext;
    let mut report = first_mismatch(
        "multiplicativity",
        (0..words.len()).flat_map(|i| {
            (0..words.len())
                .filter(move |&j| words[i].len() + words[j].len() <= tta.max_degree)
                .filter(move |&j| !(skip_unit && (words[i].is_empty() || words[j].is_empty())))
                .map(move |j| {
                    let lhs = ext_ref.mul_vec(src.basis_product(i, j));
                    let rhs = target.mul(&ext_ref.column(i), &ext_ref.column(j));
                    (vec![i, j], lhs, rhs)
                })
        }),
    );
    if report.is_ok() {
        for k in 1..=thetas.len() {
            let lhs = target_hder.maps()[k - 1].mul(&ext);
            let rhs = ext.mul(&induced.maps()[k - 1]);
            if let Some(j) = (0..words.len()).find(|&j| lhs.column(j) != rhs.column(j)) {
                report = CheckReport::failed(Violation::new("intertwining", vec![k, j], lhs.column(j), rhs.column(j)));
                break;
            }
        }
    }
    if skip_unit {
        report = report.with_note("target has no declared unit: the empty word maps to 0 and its products are not checked");
    }
    Ok((report, ext))
}

/// Lie algebra with a higher derivation: `b[(i*dim + j)*dim + k]` is the
/// coefficient of `e_k` in `[e_i, e_j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieHDerPair {
    dim: usize,
    bracket: Vec<Scalar>,
    maps: Vec<Matrix>,
}

impl LieHDerPair {
    pub fn new(dim: usize, bracket: Vec<Scalar>, maps: Vec<Matrix>) -> Result<Self> {
        if bracket.len() != dim * dim * dim {
            return Err(Error::Shape(format!("bracket for dim {dim} needs {} entries", dim * dim * dim)));
        }
        if maps.is_empty() {
            return Err(Error::Precondition("higher derivation of rank 0".into()));
        }
        if let Some(k) = maps.iter().position(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::Shape(format!("phi_{} is not {dim}x{dim}", k + 1)));
        }
        Ok(LieHDerPair { dim, bracket, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.maps.len()
    }

    pub fn bracket_tensor(&self) -> &[Scalar] {
        &self.bracket
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    fn basis_bracket(&self, i: usize, j: usize) -> &[Scalar] {
        let s = (i * self.dim + j) * self.dim;
        &self.bracket[s..s + self.dim]
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = zeros(self.dim);
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                axpy(&mut out, &(a * b), self.basis_bracket(i, j));
            }
        }
        out
    }

    /// `φ_k(v)`, with `φ_0 = id`.
    pub fn apply(&self, k: usize, v: &[Scalar]) -> Vec<Scalar> {
        if k == 0 {
            v.to_vec()
        } else {
            self.maps[k - 1].mul_vec(v)
        }
    }

    fn basis(&self, i: usize) -> Vec<Scalar> {
        crate::algebra::unit_vector(self.dim, i)
    }
}

/// `A_c` with the commutator bracket and `φ_k = d_k`.
pub fn commutator_liehder(a: &Algebra, d: &HigherDerivation) -> Result<LieHDerPair> {
    if a.dim() != d.dim() {
        return Err(Error::Shape(format!("derivation acts on dim {} but the algebra has dim {}", d.dim(), a.dim())));
    }
    let n = a.dim();
    let mut b = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            b.extend(a.basis_product(i, j).iter().zip(a.basis_product(j, i)).map(|(x, y)| x - y));
        }
    }
    LieHDerPair::new(n, b, d.maps().to_vec())
}

/// Antisymmetry `(i, j)`, Jacobi `(i, j, k)`, then
/// `φ_k[e_i, e_j] = Σ_{p+q=k} [φ_p e_i, φ_q e_j]` at `(k, i, j)`.
pub fn verify_liehder(l: &LieHDerPair) -> CheckReport {
    let n = l.dim;
    let anti = first_mismatch(
        "antisymmetry",
        (0..n).flat_map(|i| {
            (0..n).map(move |j| {
                let rhs: Vec<Scalar> = l.basis_bracket(j, i).iter().map(|x| -x).collect();
                (vec![i, j], l.basis_bracket(i, j).to_vec(), rhs)
            })
        }),
    );
    if !anti.is_ok() {
        return anti;
    }
    let jacobi = first_mismatch(
        "jacobi",
        (0..n).flat_map(|i| {
            (0..n).flat_map(move |j| {
                (0..n).map(move |k| {
                    let (x, y, z) = (l.basis(i), l.basis(j), l.basis(k));
                    let mut lhs = l.bracket(&x, &l.bracket(&y, &z));
                    axpy(&mut lhs, &Scalar::one(), &l.bracket(&y, &l.bracket(&z, &x)));
                    axpy(&mut lhs, &Scalar::one(), &l.bracket(&z, &l.bracket(&x, &y)));
                    (vec![i, j, k], lhs, zeros(n))
                })
            })
        }),
    );
    if !jacobi.is_ok() {
        return jacobi;
    }
    first_mismatch(
        "liehder",
        (1..=l.rank()).flat_map(|k| {
            (0..n).flat_map(move |i| {
                (0..n).map(move |j| {
                    let lhs = l.apply(k, l.basis_bracket(i, j));
                    let mut rhs = zeros(n);
                    for p in 0..=k {
                        axpy(&mut rhs, &Scalar::one(), &l.bracket(&l.apply(p, &l.basis(i)), &l.apply(k - p, &l.basis(j))));
                    }
                    (vec![k, i, j], lhs, rhs)
                })
            })
        }),
    )
}

/// `f` preserves brackets and intertwines the `φ_k`.
pub fn check_lie_morphism(source: &LieHDerPair, target: &LieHDerPair, f: &Matrix) -> Result<CheckReport> {
    if source.rank() != target.rank() || f.rows() != target.dim || f.cols() != source.dim {
        return Err(Error::Shape("Lie morphism shapes do not match".into()));
    }
    let n = source.dim;
    let br = first_mismatch(
        "bracket",
        (0..n).flat_map(|i| {
            (0..n).map(move |j| {
                let lhs = f.mul_vec(source.basis_bracket(i, j));
                let rhs = target.bracket(&f.column(i), &f.column(j));
                (vec![i, j], lhs, rhs)
            })
        }),
    );
    if !br.is_ok() {
        return Ok(br);
    }
    for k in 1..=source.rank() {
        let lhs = target.maps[k - 1].mul(f);
        let rhs = f.mul(&source.maps[k - 1]);
        if let Some(j) = (0..n).find(|&j| lhs.column(j) != rhs.column(j)) {
            return Ok(CheckReport::failed(Violation::new("intertwining", vec![k, j], lhs.column(j), rhs.column(j))));
        }
    }
    Ok(CheckReport::ok())
}
