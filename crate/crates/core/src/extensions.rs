//! Abelian and central extensions `0 → M → E → A → 0` of AssHDer pairs.
//!
//! The canonical model of an extension built from a 2-cocycle
//! `(f; f_1..f_N)` lives on `A ⊕ M` with the basis of `A` first:
//! ```text
//! (a, m)(b, n) = (ab, an + mb + f(a, b))
//! d_k^E(a, m)  = (d_k a, d_k^M m + f_k(a))
//! ```
//! User-supplied extensions may use any basis of `E`; they are compared
//! through the frame `[s | i]: A ⊕ M → E`.

use crate::algebra::{verify_algebra, Algebra, Bimodule};
use crate::cochain::{Cochain, Complex, MultiMap};
use crate::error::{Error, Result};
use crate::exactlin::{hstack, inverse, rank, solve_affine, vstack, zeros, Matrix, Scalar};
use crate::hder::{check_morphism, verify_hder, AssHDerPair, HigherDerivation};
use crate::report::{CheckReport, Violation};

/// A 2-cochain `(ψ; χ_1..χ_N)` with values in `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCocycle {
    pub psi: MultiMap,
    pub chis: Vec<MultiMap>,
}

impl TwoCocycle {
    pub fn zero(dim: usize, mdim: usize, rank: usize) -> Self {
        TwoCocycle { psi: MultiMap::zero(2, dim, mdim), chis: vec![MultiMap::zero(1, dim, mdim); rank] }
    }

    pub fn to_cochain(&self) -> Cochain {
        Cochain::new(self.psi.clone(), self.chis.clone()).expect("2-cochain shapes")
    }

    pub fn from_cochain(c: &Cochain) -> Result<Self> {
        if c.degree() != 2 {
            return Err(Error::Shape(format!("expected a 2-cochain, got degree {}", c.degree())));
        }
        Ok(TwoCocycle { psi: c.main().clone(), chis: c.parts().to_vec() })
    }
}

/// An extension with its base pair, inclusion `i: M → E`, projection
/// `p: E → A` and a linear section `s: A → E`.
#[derive(Clone, Debug)]
pub struct ExtensionPair {
    pub total: Algebra,
    pub total_hder: HigherDerivation,
    pub base: Algebra,
    pub base_hder: HigherDerivation,
    pub inclusion: Matrix,
    pub projection: Matrix,
    pub section: Matrix,
}

impl ExtensionPair {
    /// Validates shapes, `p∘i = 0`, `p∘s = id`, exactness
    /// (`dim E = dim A + dim M`, `i` injective) and that `p` is a morphism.
    pub fn new(
        total: Algebra,
        total_hder: HigherDerivation,
        base: Algebra,
        base_hder: HigherDerivation,
        inclusion: Matrix,
        projection: Matrix,
        section: Matrix,
    ) -> Result<Self> {
        let (e, a) = (total.dim(), base.dim());
        let mdim = inclusion.cols();
        if total_hder.dim() != e || base_hder.dim() != a || total_hder.rank() != base_hder.rank() {
            return Err(Error::Shape("derivations do not match the algebras".into()));
        }
        if inclusion.rows() != e || projection.rows() != a || projection.cols() != e || section.rows() != e
            || section.cols() != a
        {
            return Err(Error::Shape("inclusion, projection or section has the wrong shape".into()));
        }
        if e != a + mdim || rank(&inclusion) != mdim {
            return Err(Error::Precondition("the sequence is not exact at M".into()));
        }
        if !projection.mul(&inclusion).is_zero() {
            return Err(Error::Precondition("p∘i ≠ 0".into()));
        }
        if projection.mul(&section) != Matrix::identity(a) {
            return Err(Error::Precondition("s is not a section of p".into()));
        }
        let src = AssHDerPair::new(total.clone(), total_hder.clone())?;
        let tgt = AssHDerPair::new(base.clone(), base_hder.clone())?;
        if let Some(v) = check_morphism(&src, &tgt, &projection)?.first_violation {
            return Err(Error::Precondition(format!("projection is not a morphism: {v}")));
        }
        Ok(ExtensionPair { total, total_hder, base, base_hder, inclusion, projection, section })
    }

    pub fn mdim(&self) -> usize {
        self.inclusion.cols()
    }

    pub fn rank(&self) -> usize {
        self.base_hder.rank()
    }

    /// `[s | i]`, the isomorphism `A ⊕ M → E` attached to the stored section.
    pub fn frame(&self) -> Matrix {
        hstack(&self.section, &self.inclusion)
    }

    /// `i⁻¹(v)` for `v ∈ im i`.
    fn pull_back(&self, v: &[Scalar], what: &str) -> Result<Vec<Scalar>> {
        solve_affine(&self.inclusion, v).ok_or_else(|| Error::Precondition(format!("{what} does not lie in i(M)")))
    }
}

fn extension_algebra(a: &Algebra, m: &Bimodule, f: &MultiMap) -> Result<Algebra> {
    let (n, md) = (a.dim(), m.mdim());
    let e = n + md;
    let mut labels = a.labels().to_vec();
    labels.extend((0..md).map(|b| format!("m{b}")));
    let basis_m = |b: usize| crate::algebra::unit_vector(md, b);
    let basis_a = |i: usize| a.basis_vector(i);
    let algebra = Algebra::from_fn(labels.clone(), None, |x, y| {
        let mut v = zeros(e);
        match (x < n, y < n) {
            (true, true) => {
                v[..n].clone_from_slice(a.basis_product(x, y));
                v[n..].clone_from_slice(f.at(&[x, y]));
            }
            (true, false) => v[n..].clone_from_slice(&m.act_left(&basis_a(x), &basis_m(y - n))),
            (false, true) => v[n..].clone_from_slice(&m.act_right(&basis_m(x - n), &basis_a(y))),
            (false, false) => {}
        }
        v
    })?;
    // (1, 0) is a unit of E only when M is unital and f(1, −) = f(−, 1) = 0
    match a.unit_index() {
        Some(u) => {
            let candidate = Algebra::new(labels, algebra.structure_constants().to_vec(), Some(u))?;
            Ok(if verify_algebra(&candidate).is_ok() { candidate } else { algebra })
        }
        None => Ok(algebra),
    }
}

fn extension_hder(d: &HigherDerivation, m: &Bimodule, chis: &[MultiMap]) -> Result<HigherDerivation> {
    let (n, md) = (d.dim(), m.mdim());
    let maps = (0..d.rank())
        .map(|k| Matrix::block(&d.maps()[k], &Matrix::zeros(n, md), &chis[k].to_matrix(), &m.dmaps()[k]))
        .collect();
    HigherDerivation::new(maps)
}

fn check_inputs(a: &Algebra, d: &HigherDerivation, m: &Bimodule, z: &TwoCocycle) -> Result<()> {
    if a.dim() != d.dim() || m.dim() != a.dim() || m.rank() != d.rank() {
        return Err(Error::Shape("algebra, derivation and bimodule do not match".into()));
    }
    let shape = (z.psi.arity(), z.psi.dim(), z.psi.mdim());
    if shape != (2, a.dim(), m.mdim())
        || z.chis.len() != d.rank()
        || z.chis.iter().any(|c| (c.arity(), c.dim(), c.mdim()) != (1, a.dim(), m.mdim()))
    {
        return Err(Error::Shape("cocycle does not match (A, M, N)".into()));
    }
    Ok(())
}

/// The canonical model on `A ⊕ M` without checking the cocycle condition.
/// The result is an AssHDer pair exactly when `(ψ; χ)` is a 2-cocycle.
pub fn extension_unchecked(a: &Algebra, d: &HigherDerivation, m: &Bimodule, z: &TwoCocycle) -> Result<ExtensionPair> {
    check_inputs(a, d, m, z)?;
    let (n, md) = (a.dim(), m.mdim());
    Ok(ExtensionPair {
        total: extension_algebra(a, m, &z.psi)?,
        total_hder: extension_hder(d, m, &z.chis)?,
        base: a.clone(),
        base_hder: d.clone(),
        inclusion: vstack(&Matrix::zeros(n, md), &Matrix::identity(md)),
        projection: hstack(&Matrix::identity(n), &Matrix::zeros(n, md)),
        section: vstack(&Matrix::identity(n), &Matrix::zeros(md, n)),
    })
}

/// Names the first nonzero component of `∂z`, if any.
pub fn cocycle_defect(cx: &Complex<'_>, z: &TwoCocycle) -> Option<String> {
    let dz = cx.partial(&z.to_cochain());
    if !dz.main().is_zero() {
        return Some("δ_Hoch f ≠ 0".into());
    }
    (1..=cx.rank()).find(|&k| !dz.part(k).is_zero()).map(|k| format!("δ'f_{k} + δ_{k} f ≠ 0"))
}

/// Extension determined by a 2-cocycle; `z = 0` gives the semidirect product.
pub fn extension_from_cocycle(a: &Algebra, d: &HigherDerivation, m: &Bimodule, z: &TwoCocycle) -> Result<ExtensionPair> {
    check_inputs(a, d, m, z)?;
    let cx = Complex::new(a, d, m)?;
    if let Some(msg) = cocycle_defect(&cx, z) {
        return Err(Error::NotCocycle(msg));
    }
    extension_unchecked(a, d, m, z)
}

/// `A ⋉ M` with product `(ab, an + mb)` and maps `d_k ⊕ d_k^M`.
pub fn semidirect(a: &Algebra, d: &HigherDerivation, m: &Bimodule) -> Result<ExtensionPair> {
    extension_unchecked(a, d, m, &TwoCocycle::zero(a.dim(), m.mdim(), d.rank()))
}

/// `ψ(a, b) = s(a)s(b) − s(ab)` and `χ_k(a) = d̂_k s(a) − s(d_k a)`, pulled
/// back along `i`.
pub fn cocycle_from_section(e: &ExtensionPair, s: &Matrix) -> Result<TwoCocycle> {
    let (n, md) = (e.base.dim(), e.mdim());
    if s.rows() != e.total.dim() || s.cols() != n {
        return Err(Error::Shape(format!("section must be {}x{n}", e.total.dim())));
    }
    if e.projection.mul(s) != Matrix::identity(n) {
        return Err(Error::Precondition("s is not a section of p".into()));
    }
    let mut psi = MultiMap::zero(2, n, md);
    for i in 0..n {
        for j in 0..n {
            let mut v = e.total.mul(&s.column(i), &s.column(j));
            let sab = s.mul_vec(e.base.basis_product(i, j));
            v.iter_mut().zip(&sab).for_each(|(x, y)| *x -= y);
            psi.at_mut(&[i, j]).clone_from_slice(&e.pull_back(&v, "s(a)s(b) − s(ab)")?);
        }
    }
    let chis = (1..=e.rank())
        .map(|k| {
            let lhs = e.total_hder.maps()[k - 1].mul(s);
            let rhs = s.mul(&e.base_hder.maps()[k - 1]);
            let diff = lhs.sub(&rhs);
            let cols =
                (0..n).map(|j| e.pull_back(&diff.column(j), "d̂_k s(a) − s(d_k a)")).collect::<Result<Vec<_>>>()?;
            Ok(MultiMap::from_matrix(&Matrix::from_columns(md, &cols)))
        })
        .collect::<Result<_>>()?;
    Ok(TwoCocycle { psi, chis })
}

/// `Ψ(a, m) = (a, m + h(a))` on `A ⊕ M`.
pub fn equivalence_from_cochain(h: &MultiMap) -> Matrix {
    assert_eq!(h.arity(), 1, "h must be a 1-cochain");
    let (n, md) = (h.dim(), h.mdim());
    Matrix::block(&Matrix::identity(n), &Matrix::zeros(n, md), &h.to_matrix(), &Matrix::identity(md))
}

/// The bimodule structure and maps `d_k^M` that `E` induces on `M`.
pub fn induced_bimodule(e: &ExtensionPair) -> Result<Bimodule> {
    let (n, md) = (e.base.dim(), e.mdim());
    let mut left = zeros(n * md * md);
    let mut right = zeros(md * n * md);
    for i in 0..n {
        let sa = e.section.column(i);
        for a in 0..md {
            let im = e.inclusion.column(a);
            let l = e.pull_back(&e.total.mul(&sa, &im), "a·m")?;
            let r = e.pull_back(&e.total.mul(&im, &sa), "m·a")?;
            left[(i * md + a) * md..(i * md + a + 1) * md].clone_from_slice(&l);
            right[(a * n + i) * md..(a * n + i + 1) * md].clone_from_slice(&r);
        }
    }
    let dmaps = e
        .total_hder
        .maps()
        .iter()
        .map(|dk| {
            let img = dk.mul(&e.inclusion);
            let cols = (0..md).map(|a| e.pull_back(&img.column(a), "d̂_k(m)")).collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_columns(md, &cols))
        })
        .collect::<Result<_>>()?;
    Bimodule::new(n, md, left, right, dmaps)
}

fn same_base(e: &ExtensionPair, f: &ExtensionPair) -> Result<()> {
    if e.base != f.base || e.base_hder != f.base_hder || e.mdim() != f.mdim() {
        return Err(Error::Shape("extensions are over different (A, M)".into()));
    }
    Ok(())
}

fn same_induced(e: &ExtensionPair, f: &ExtensionPair) -> Result<Bimodule> {
    let (me, mf) = (induced_bimodule(e)?, induced_bimodule(f)?);
    if me != mf {
        return Err(Error::Precondition("the extensions induce different bimodule structures on M".into()));
    }
    Ok(me)
}

/// `Ψ: E → E'` is an AssHDer morphism with `Ψ∘i = i'` and `p'∘Ψ = p`.
pub fn check_equivalence(e: &ExtensionPair, f: &ExtensionPair, candidate: &Matrix) -> Result<CheckReport> {
    same_base(e, f)?;
    if candidate.rows() != f.total.dim() || candidate.cols() != e.total.dim() {
        return Err(Error::Shape(format!("candidate must be {0}x{0}", e.total.dim())));
    }
    same_induced(e, f)?;
    let src = AssHDerPair::new(e.total.clone(), e.total_hder.clone())?;
    let tgt = AssHDerPair::new(f.total.clone(), f.total_hder.clone())?;
    let rep = check_morphism(&src, &tgt, candidate)?;
    if !rep.is_ok() {
        return Ok(rep);
    }
    let on_m = candidate.mul(&e.inclusion);
    if let Some(j) = (0..e.mdim()).find(|&j| on_m.column(j) != f.inclusion.column(j)) {
        return Ok(CheckReport::failed(Violation::new("identity on M", vec![j], on_m.column(j), f.inclusion.column(j))));
    }
    let on_a = f.projection.mul(candidate);
    if let Some(j) = (0..e.total.dim()).find(|&j| on_a.column(j) != e.projection.column(j)) {
        return Ok(CheckReport::failed(Violation::new(
            "identity on A",
            vec![j],
            on_a.column(j),
            e.projection.column(j),
        )));
    }
    Ok(CheckReport::ok())
}

/// An equivalence `E → E'` of the normal form `(a, m) ↦ (a, m + h(a))` in
/// the frames of the stored sections, found by solving `∂h = z − z'`.
pub fn find_equivalence(e: &ExtensionPair, f: &ExtensionPair) -> Result<Option<Matrix>> {
    same_base(e, f)?;
    let m = same_induced(e, f)?;
    let z = cocycle_from_section(e, &e.section)?.to_cochain();
    let z2 = cocycle_from_section(f, &f.section)?.to_cochain();
    let cx = Complex::new(&e.base, &e.base_hder, &m)?;
    let Some(h) = cx.preimage(&z.sub(&z2))? else {
        return Ok(None);
    };
    let frame_inv = inverse(&e.frame()).expect("[s | i] is invertible for an exact sequence");
    Ok(Some(f.frame().mul(&equivalence_from_cochain(h.main())).mul(&frame_inv)))
}

/// Central extensions of `(A, d)` by `M` up to equivalence.
#[derive(Clone, Debug)]
pub struct CentralClassification {
    pub betti: usize,
    /// The zero class first, then one class per basis vector of `H²`.
    pub classes: Vec<(TwoCocycle, ExtensionPair)>,
}

/// Requires `M` to have zero actions.
pub fn classify_central(a: &Algebra, d: &HigherDerivation, m: &Bimodule) -> Result<CentralClassification> {
    if !m.has_zero_actions() {
        return Err(Error::Precondition("central extensions need a bimodule with zero actions".into()));
    }
    let cx = Complex::new(a, d, m)?;
    let h2 = cx.cohomology(2)?;
    let mut classes = vec![{
        let z = TwoCocycle::zero(a.dim(), m.mdim(), d.rank());
        let e = extension_unchecked(a, d, m, &z)?;
        (z, e)
    }];
    for rep in &h2.class_representatives {
        let z = TwoCocycle::from_cochain(rep)?;
        let e = extension_from_cocycle(a, d, m, &z)?;
        classes.push((z, e));
    }
    Ok(CentralClassification { betti: h2.betti, classes })
}

/// Verifies the total algebra and derivation of an extension.
pub fn verify_extension(e: &ExtensionPair) -> Result<CheckReport> {
    let r = verify_algebra(&e.total);
    if !r.is_ok() {
        return Ok(r);
    }
    verify_hder(&e.total, &e.total_hder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{adjoint_bimodule, trivial_bimodule, verify_bimodule};
    use crate::exactlin::q;
    use crate::fixtures;

    fn d2_setup() -> (Algebra, HigherDerivation, Bimodule) {
        let a = fixtures::dual_numbers();
        let d = fixtures::dual_numbers_ordinary(2);
        let m = adjoint_bimodule(&a, &d);
        (a, d, m)
    }

    fn h_sample(dim: usize, mdim: usize) -> MultiMap {
        MultiMap::from_fn(1, dim, mdim, |i| (0..mdim).map(|b| q((i[0] * 2 + b * 3) as i64 % 5 - 1)).collect())
    }

    #[test]
    fn semidirect_products_verify() {
        let (a, d, m) = d2_setup();
        assert!(verify_bimodule(&a, &d, &m).unwrap().is_ok());
        let e = semidirect(&a, &d, &m).unwrap();
        assert_eq!(e.total.dim(), 4);
        assert!(verify_extension(&e).unwrap().is_ok());
        // M is square-zero
        assert!(e.total.basis_product(2, 3).iter().all(num_traits::Zero::is_zero));
        assert_eq!(e.total.unit_index(), Some(0));

        let t = trivial_bimodule(&a, 1, vec![Matrix::zeros(1, 1); 2]).unwrap();
        let e = semidirect(&a, &d, &t).unwrap();
        assert!(verify_extension(&e).unwrap().is_ok());
    }

    #[test]
    fn coboundary_extensions_are_split() {
        let (a, d, m) = d2_setup();
        let cx = Complex::new(&a, &d, &m).unwrap();
        let h = h_sample(2, 2);
        let z = TwoCocycle::from_cochain(&cx.partial(&Cochain::one(h.clone()))).unwrap();
        let e = extension_from_cocycle(&a, &d, &m, &z).unwrap();
        let triv = semidirect(&a, &d, &m).unwrap();
        let psi = equivalence_from_cochain(&h);
        assert!(check_equivalence(&e, &triv, &psi).unwrap().is_ok());
        assert!(!check_equivalence(&e, &triv, &Matrix::identity(4)).unwrap().is_ok() || z.to_cochain().is_zero());
        let found = find_equivalence(&e, &triv).unwrap().expect("split");
        assert!(check_equivalence(&e, &triv, &found).unwrap().is_ok());
    }

    #[test]
    fn round_trip_and_section_change() {
        let (a, d, m) = d2_setup();
        let cx = Complex::new(&a, &d, &m).unwrap();
        let h = h_sample(2, 2);
        let z = TwoCocycle::from_cochain(&cx.partial(&Cochain::one(h_sample(2, 2).scale(&q(3))))).unwrap();
        let e = extension_from_cocycle(&a, &d, &m, &z).unwrap();
        assert_eq!(cocycle_from_section(&e, &e.section).unwrap(), z);
        // s'(a) = (a, h(a))
        let s2 = vstack(&Matrix::identity(2), &h.to_matrix());
        let z2 = cocycle_from_section(&e, &s2).unwrap();
        assert_eq!(z2.to_cochain(), z.to_cochain().add(&cx.partial(&Cochain::one(h))));
        let bad = vstack(&Matrix::zeros(2, 2), &Matrix::identity(2));
        assert!(matches!(cocycle_from_section(&e, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_cocycles_are_named() {
        let (a, d, m) = d2_setup();
        let mut z = TwoCocycle::zero(2, 2, 2);
        z.chis[1].at_mut(&[1])[0] = q(1);
        let err = extension_from_cocycle(&a, &d, &m, &z).unwrap_err();
        assert_eq!(err, Error::NotCocycle("δ'f_2 + δ_2 f ≠ 0".into()));
        let e = extension_unchecked(&a, &d, &m, &z).unwrap();
        assert!(!verify_extension(&e).unwrap().is_ok());
    }

    #[test]
    fn nontrivial_class_on_dual_numbers() {
        let a = fixtures::dual_numbers();
        let d = HigherDerivation::zero(2, 1);
        let m = adjoint_bimodule(&a, &d);
        let mut z = TwoCocycle::zero(2, 2, 1);
        z.psi.at_mut(&[1, 1])[0] = q(1);
        let e = extension_from_cocycle(&a, &d, &m, &z).unwrap();
        let triv = semidirect(&a, &d, &m).unwrap();
        assert!(find_equivalence(&e, &triv).unwrap().is_none());
        assert!(!check_equivalence(&e, &triv, &Matrix::identity(4)).unwrap().is_ok());
    }

    #[test]
    fn central_classification_on_q_times_q() {
        let a = fixtures::q_times_q();
        let d = HigherDerivation::zero(2, 1);
        let m = trivial_bimodule(&a, 1, vec![Matrix::zeros(1, 1)]).unwrap();
        let c = classify_central(&a, &d, &m).unwrap();
        assert_eq!(c.betti, 0);
        assert_eq!(c.classes.len(), 1);
        assert!(classify_central(&a, &d, &adjoint_bimodule(&a, &d)).is_err());
    }

    #[test]
    fn mismatched_induced_modules_are_rejected() {
        let a = fixtures::dual_numbers();
        let d = HigherDerivation::zero(2, 1);
        let adj = adjoint_bimodule(&a, &d);
        let triv = trivial_bimodule(&a, 2, vec![Matrix::zeros(2, 2)]).unwrap();
        let e = semidirect(&a, &d, &adj).unwrap();
        let f = semidirect(&a, &d, &triv).unwrap();
        assert!(matches!(check_equivalence(&e, &f, &Matrix::identity(4)), Err(Error::Precondition(_))));
    }
}
