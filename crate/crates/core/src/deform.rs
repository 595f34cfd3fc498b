//! Truncated formal deformations `μ_t = Σ μ_s t^s`, `d_{k,t} = Σ d_{k,s} t^s`
//! of an AssHDer pair, stored as coefficient lists.
//!
//! The order-`s` equations are
//! ```text
//! Σ_{p+q=s} μ_p(μ_q(a,b),c) = Σ_{p+q=s} μ_p(a,μ_q(b,c))
//! Σ_{p+q=s} d_{k,p}(μ_q(a,b)) = Σ_{i+j=k} Σ_{p+q+r=s} μ_p(d_{i,q}a, d_{j,r}b)
//! ```
//! with `d_{0,0} = id` and `d_{0,s} = 0` for `s ≥ 1`. Evaluating the same
//! expressions at `s = n + 1` with the missing coefficients set to zero gives
//! the obstruction `(Ob; Ob_1..Ob_N)`; a candidate `c` of order `n + 1`
//! satisfies the order-`(n+1)` equations iff `∂c = (Ob; Ob_k)`.

use num_traits::{One, Zero};

use crate::algebra::{adjoint_bimodule, Algebra, Bimodule};
use crate::cochain::{Cochain, Complex, MultiMap};
use crate::error::{Error, Result};
use crate::exactlin::{axpy, zeros, Matrix, Scalar};
use crate::hder::HigherDerivation;
use crate::report::{CheckReport, Violation};

/// Coefficients `μ_0..μ_n` and `d_{k,0}..d_{k,n}` for `k = 1..N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deformation {
    mus: Vec<MultiMap>,
    /// `dks[k-1][s] = d_{k,s}`
    dks: Vec<Vec<Matrix>>,
}

impl Deformation {
    pub fn new(mus: Vec<MultiMap>, dks: Vec<Vec<Matrix>>) -> Result<Self> {
        let Some(mu0) = mus.first() else {
            return Err(Error::Shape("a deformation needs at least μ_0".into()));
        };
        let dim = mu0.dim();
        if mus.iter().any(|m| (m.arity(), m.dim(), m.mdim()) != (2, dim, dim)) {
            return Err(Error::Shape(format!("every μ_s must be a bilinear map on dim {dim}")));
        }
        if dks.is_empty() {
            return Err(Error::Precondition("higher derivation of rank 0".into()));
        }
        for (k, row) in dks.iter().enumerate() {
            if row.len() != mus.len() {
                return Err(Error::Shape(format!(
                    "d_{} has {} coefficients but μ has {}",
                    k + 1,
                    row.len(),
                    mus.len()
                )));
            }
            if row.iter().any(|m| m.rows() != dim || m.cols() != dim) {
                return Err(Error::Shape(format!("coefficients of d_{} must be {dim}x{dim}", k + 1)));
            }
        }
        Ok(Deformation { mus, dks })
    }

    /// The undeformed pair viewed as a deformation of the given order.
    pub fn trivial(a: &Algebra, d: &HigherDerivation, order: usize) -> Self {
        let n = a.dim();
        let mut mus = vec![MultiMap::multiplication(a)];
        mus.extend((0..order).map(|_| MultiMap::zero(2, n, n)));
        let dks = d
            .maps()
            .iter()
            .map(|m| std::iter::once(m.clone()).chain((0..order).map(|_| Matrix::zeros(n, n))).collect())
            .collect();
        Deformation { mus, dks }
    }

    pub fn order(&self) -> usize {
        self.mus.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.mus[0].dim()
    }

    pub fn rank(&self) -> usize {
        self.dks.len()
    }

    pub fn mus(&self) -> &[MultiMap] {
        &self.mus
    }

    pub fn dks(&self) -> &[Vec<Matrix>] {
        &self.dks
    }

    /// `(μ_s; d_{1,s}, …, d_{N,s})` as a 2-cochain, `s ≥ 1`.
    pub fn coefficient(&self, s: usize) -> Cochain {
        assert!(s >= 1 && s <= self.order());
        let parts = self.dks.iter().map(|row| MultiMap::from_matrix(&row[s])).collect();
        Cochain::new(self.mus[s].clone(), parts).expect("coefficient shapes")
    }

    /// Appends `c` as the order-`(n+1)` coefficient.
    pub fn extended_by(&self, c: &Cochain) -> Result<Deformation> {
        if c.degree() != 2 || c.parts().len() != self.rank() || c.main().dim() != self.dim() || c.main().mdim() != self.dim()
        {
            return Err(Error::Shape("extension coefficient must be a 2-cochain with values in A".into()));
        }
        let mut out = self.clone();
        out.mus.push(c.main().clone());
        for (row, part) in out.dks.iter_mut().zip(c.parts()) {
            row.push(part.to_matrix());
        }
        Ok(out)
    }

    /// Drops coefficients above `order`, or pads with zeros.
    pub fn truncated(&self, order: usize) -> Deformation {
        let n = self.dim();
        let mut mus = self.mus.clone();
        mus.resize(order + 1, MultiMap::zero(2, n, n));
        let dks = self
            .dks
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.resize(order + 1, Matrix::zeros(n, n));
                r
            })
            .collect();
        Deformation { mus, dks }
    }

    fn mu(&self, p: usize) -> Option<&MultiMap> {
        self.mus.get(p)
    }

    /// `d_{i,q}(x)`; `None` when the coefficient is zero or absent.
    fn d_apply(&self, i: usize, q: usize, x: &[Scalar]) -> Option<Vec<Scalar>> {
        if i == 0 {
            return (q == 0).then(|| x.to_vec());
        }
        self.dks[i - 1].get(q).map(|m| m.mul_vec(x))
    }

    /// Is every coefficient of order `1..=order` zero?
    pub fn is_trivial(&self) -> bool {
        (1..=self.order()).all(|s| self.coefficient(s).is_zero())
    }
}

/// Both sides of the order-`s` equations, with absent coefficients read as 0.
struct OrderSides {
    assoc: (MultiMap, MultiMap),
    /// indexed by `k − 1`
    der: Vec<(MultiMap, MultiMap)>,
}

fn order_sides(def: &Deformation, s: usize) -> OrderSides {
    let n = def.dim();
    let basis = |i: usize| crate::algebra::unit_vector(n, i);
    let pairs: Vec<(usize, usize)> = (0..=s).map(|p| (p, s - p)).collect();
    let assoc_l = MultiMap::from_fn(3, n, n, |idx| {
        let mut out = zeros(n);
        for &(p, q) in &pairs {
            if let (Some(mp), Some(mq)) = (def.mu(p), def.mu(q)) {
                axpy(&mut out, &Scalar::one(), &mp.eval(&[mq.at(&idx[..2]), &basis(idx[2])]));
            }
        }
        out
    });
    let assoc_r = MultiMap::from_fn(3, n, n, |idx| {
        let mut out = zeros(n);
        for &(p, q) in &pairs {
            if let (Some(mp), Some(mq)) = (def.mu(p), def.mu(q)) {
                axpy(&mut out, &Scalar::one(), &mp.eval(&[&basis(idx[0]), mq.at(&idx[1..])]));
            }
        }
        out
    });
    let der = (1..=def.rank())
        .map(|k| {
            let lhs = MultiMap::from_fn(2, n, n, |idx| {
                let mut out = zeros(n);
                for &(p, q) in &pairs {
                    if let (Some(dp), Some(mq)) = (def.dks[k - 1].get(p), def.mu(q)) {
                        axpy(&mut out, &Scalar::one(), &dp.mul_vec(mq.at(idx)));
                    }
                }
                out
            });
            let rhs = MultiMap::from_fn(2, n, n, |idx| {
                let (x, y) = (basis(idx[0]), basis(idx[1]));
                let mut out = zeros(n);
                for i in 0..=k {
                    let j = k - i;
                    for p in 0..=s {
                        let Some(mp) = def.mu(p) else { continue };
                        for q in 0..=s - p {
                            let r = s - p - q;
                            let (Some(dx), Some(dy)) = (def.d_apply(i, q, &x), def.d_apply(j, r, &y)) else {
                                continue;
                            };
                            axpy(&mut out, &Scalar::one(), &mp.eval(&[&dx, &dy]));
                        }
                    }
                }
                out
            });
            (lhs, rhs)
        })
        .collect();
    OrderSides { assoc: (assoc_l, assoc_r), der }
}

fn first_difference(l: &MultiMap, r: &MultiMap) -> Option<(Vec<usize>, Vec<Scalar>, Vec<Scalar>)> {
    (0..l.tuple_count()).find_map(|t| {
        let idx = crate::cochain::digits(t, l.dim(), l.arity());
        let (x, y) = (l.at(&idx), r.at(&idx));
        (x != y).then(|| (idx, x.to_vec(), y.to_vec()))
    })
}

fn check_base(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<()> {
    if def.dim() != a.dim() || def.rank() != d.rank() {
        return Err(Error::Shape(format!(
            "deformation of dim {} rank {} does not match the pair (dim {}, rank {})",
            def.dim(),
            def.rank(),
            a.dim(),
            d.rank()
        )));
    }
    if def.mus[0] != MultiMap::multiplication(a) {
        return Err(Error::Precondition("μ_0 is not the product of the algebra".into()));
    }
    if let Some(k) = (0..d.rank()).find(|&k| def.dks[k][0] != d.maps()[k]) {
        return Err(Error::Precondition(format!("d_{{{},0}} is not d_{}", k + 1, k + 1)));
    }
    Ok(())
}

/// Checks the order-`s` equations for `s = 0..n`. Violations are indexed
/// `[s, i, j, l]` for associativity and `[s, k, i, j]` for the derivation law.
pub fn verify_deformation(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<CheckReport> {
    check_base(a, d, def)?;
    for s in 0..=def.order() {
        let sides = order_sides(def, s);
        if let Some((idx, l, r)) = first_difference(&sides.assoc.0, &sides.assoc.1) {
            let mut ix = vec![s];
            ix.extend(idx);
            return Ok(CheckReport::failed(Violation::new("deformation associativity", ix, l, r)));
        }
        for (k0, (l, r)) in sides.der.iter().enumerate() {
            if let Some((idx, l, r)) = first_difference(l, r) {
                let mut ix = vec![s, k0 + 1];
                ix.extend(idx);
                return Ok(CheckReport::failed(Violation::new("deformation derivation", ix, l, r)));
            }
        }
    }
    Ok(CheckReport::ok())
}

fn require_verified(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<()> {
    match verify_deformation(a, d, def)?.first_violation {
        None => Ok(()),
        Some(v) => Err(Error::Precondition(format!("not a deformation: {v}"))),
    }
}

/// `(μ_1; d_{1,1}, …, d_{N,1})`, checked to be a 2-cocycle.
pub fn infinitesimal(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<Cochain> {
    if def.order() == 0 {
        return Err(Error::Precondition("order-0 deformations have no infinitesimal".into()));
    }
    require_verified(a, d, def)?;
    let c = def.coefficient(1);
    assert_cocycle(a, d, &c)?;
    Ok(c)
}

/// Lowest-order nonzero coefficient `(r, c_r)`; `c_r` is a 2-cocycle.
pub fn leading_coefficient(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<Option<(usize, Cochain)>> {
    require_verified(a, d, def)?;
    let Some(r) = (1..=def.order()).find(|&s| !def.coefficient(s).is_zero()) else {
        return Ok(None);
    };
    let c = def.coefficient(r);
    assert_cocycle(a, d, &c)?;
    Ok(Some((r, c)))
}

fn assert_cocycle(a: &Algebra, d: &HigherDerivation, c: &Cochain) -> Result<()> {
    let m = adjoint_bimodule(a, d);
    let cx = Complex::new(a, d, &m)?;
    if !cx.is_cocycle(c) {
        return Err(Error::BrokenComplex("leading coefficient of a deformation is not a 2-cocycle".into()));
    }
    Ok(())
}

/// Formal automorphism `Φ_t = id + Σ_{s≥1} Φ_s t^s`, truncated at order `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeMap {
    phis: Vec<Matrix>,
}

impl GaugeMap {
    pub fn new(phis: Vec<Matrix>) -> Result<Self> {
        let Some(phi0) = phis.first() else {
            return Err(Error::Shape("a gauge map needs Φ_0".into()));
        };
        let n = phi0.rows();
        if phis.iter().any(|p| p.rows() != n || p.cols() != n) {
            return Err(Error::Shape(format!("gauge coefficients must be {n}x{n}")));
        }
        if *phi0 != Matrix::identity(n) {
            return Err(Error::Precondition("Φ_0 must be the identity".into()));
        }
        Ok(GaugeMap { phis })
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        let mut phis = vec![Matrix::zeros(dim, dim); order + 1];
        phis[0] = Matrix::identity(dim);
        GaugeMap { phis }
    }

    /// `id + t^r Φ`.
    pub fn monomial(phi: &Matrix, r: usize, order: usize) -> Self {
        let mut g = Self::identity(phi.rows(), order);
        if r <= order {
            g.phis[r] = phi.clone();
        }
        g
    }

    pub fn order(&self) -> usize {
        self.phis.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.phis[0].rows()
    }

    pub fn phis(&self) -> &[Matrix] {
        &self.phis
    }

    pub fn truncated(&self, order: usize) -> GaugeMap {
        let n = self.dim();
        let mut phis = self.phis.clone();
        phis.resize(order + 1, Matrix::zeros(n, n));
        GaugeMap { phis }
    }

    /// `ψ_0 = id`, `ψ_s = −Σ_{j=1..s} Φ_j ψ_{s−j}`.
    pub fn inverse(&self) -> GaugeMap {
        let mut psi: Vec<Matrix> = vec![Matrix::identity(self.dim())];
        for s in 1..=self.order() {
            let mut acc = Matrix::zeros(self.dim(), self.dim());
            for j in 1..=s {
                acc = acc.sub(&self.phis[j].mul(&psi[s - j]));
            }
            psi.push(acc);
        }
        GaugeMap { phis: psi }
    }

    /// Series product `(self ∘ other)_s = Σ_{i+j=s} self_i·other_j`.
    pub fn compose(&self, other: &GaugeMap) -> GaugeMap {
        let order = self.order().min(other.order());
        let phis = (0..=order)
            .map(|s| {
                (0..=s).fold(Matrix::zeros(self.dim(), self.dim()), |acc, i| {
                    acc.add(&self.phis[i].mul(&other.phis[s - i]))
                })
            })
            .collect();
        GaugeMap { phis }
    }
}

/// `μ'_t = Φ_t^{-1}∘μ_t∘(Φ_t⊗Φ_t)` and `d'_{k,t} = Φ_t^{-1}∘d_{k,t}∘Φ_t`
/// modulo `t^{n+1}`; the gauge is truncated or padded to the order of `def`.
/// To first order the infinitesimal moves by `+∂Φ_1`.
pub fn apply_gauge(def: &Deformation, g: &GaugeMap) -> Result<Deformation> {
    if g.dim() != def.dim() {
        return Err(Error::Shape(format!("gauge acts on dim {}, deformation on dim {}", g.dim(), def.dim())));
    }
    GaugeMap::new(g.phis.clone())?;
    let order = def.order();
    let n = def.dim();
    let g = g.truncated(order);
    let psi = g.inverse();
    let phi_cols: Vec<Vec<Vec<Scalar>>> = g.phis.iter().map(|p| (0..n).map(|j| p.column(j)).collect()).collect();
    // ν_s = Σ_{b+c+e=s} μ_b∘(Φ_c⊗Φ_e)
    let nus: Vec<MultiMap> = (0..=order)
        .map(|s| {
            MultiMap::from_fn(2, n, n, |idx| {
                let mut out = zeros(n);
                for b in 0..=s {
                    for c in 0..=s - b {
                        let e = s - b - c;
                        if phi_cols[c][idx[0]].iter().all(Zero::is_zero) || phi_cols[e][idx[1]].iter().all(Zero::is_zero) {
                            continue;
                        }
                        axpy(&mut out, &Scalar::one(), &def.mus[b].eval(&[&phi_cols[c][idx[0]], &phi_cols[e][idx[1]]]));
                    }
                }
                out
            })
        })
        .collect();
    let mus = (0..=order)
        .map(|s| (0..=s).fold(MultiMap::zero(2, n, n), |acc, a| acc.add(&nus[s - a].then(&psi.phis[a]))))
        .collect();
    let dks = def
        .dks
        .iter()
        .map(|row| {
            (0..=order)
                .map(|s| {
                    let mut acc = Matrix::zeros(n, n);
                    for a in 0..=s {
                        for (b, db) in row.iter().enumerate().take(s - a + 1) {
                            acc = acc.add(&psi.phis[a].mul(db).mul(&g.phis[s - a - b]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Deformation::new(mus, dks)
}

/// `(Ob; Ob_1..Ob_N)`: all known terms of the order-`(n+1)` equations.
pub fn obstruction(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<Cochain> {
    require_verified(a, d, def)?;
    let sides = order_sides(def, def.order() + 1);
    let main = sides.assoc.0.sub(&sides.assoc.1);
    let parts = sides.der.iter().map(|(l, r)| l.sub(r)).collect();
    Cochain::new(main, parts)
}

/// Result of trying to push a deformation one order further.
#[derive(Clone, Debug)]
pub enum ExtendOutcome {
    /// `candidate` is the canonical solution of `∂c = Ob`; `deformation`
    /// is the order-`(n+1)` result.
    Extended { candidate: Cochain, deformation: Deformation },
    /// `∂c = Ob` has no solution.
    Obstructed { obstruction: Cochain, obstruction_is_cocycle: bool },
}

pub fn try_extend(a: &Algebra, d: &HigherDerivation, def: &Deformation) -> Result<ExtendOutcome> {
    let ob = obstruction(a, d, def)?;
    let m = adjoint_bimodule(a, d);
    let cx = Complex::new(a, d, &m)?;
    Ok(match cx.preimage(&ob)? {
        Some(c) => {
            let deformation = def.extended_by(&c)?;
            ExtendOutcome::Extended { candidate: c, deformation }
        }
        None => {
            let obstruction_is_cocycle = cx.is_cocycle(&ob);
            ExtendOutcome::Obstructed { obstruction: ob, obstruction_is_cocycle }
        }
    })
}

/// Outcome of [`trivialize`].
#[derive(Clone, Debug)]
pub enum TrivializeOutcome {
    /// `apply_gauge(def, gauge)` is trivial up to the gauge's order.
    Trivialized { gauge: GaugeMap },
    /// The order-`order` coefficient became a 2-cocycle that is not a coboundary.
    Blocked { order: usize, class: Cochain, gauge_so_far: GaugeMap },
}

/// Gauges away coefficients order by order up to `min(n, T)`: at the lowest
/// nonzero order `r`, solve `∂Φ_r = c_r` and pull back by `id − t^rΦ_r`.
pub fn trivialize(a: &Algebra, d: &HigherDerivation, def: &Deformation, max_order: usize) -> Result<TrivializeOutcome> {
    require_verified(a, d, def)?;
    let order = def.order().min(max_order);
    let m: Bimodule = adjoint_bimodule(a, d);
    let cx = Complex::new(a, d, &m)?;
    let mut current = def.truncated(order);
    let mut gauge = GaugeMap::identity(a.dim(), order);
    loop {
        let Some(r) = (1..=order).find(|&s| !current.coefficient(s).is_zero()) else {
            return Ok(TrivializeOutcome::Trivialized { gauge });
        };
        let c = current.coefficient(r);
        if !cx.is_cocycle(&c) {
            return Err(Error::BrokenComplex(format!("order-{r} leading coefficient is not a 2-cocycle")));
        }
        match cx.preimage(&c)? {
            Some(phi) => {
                let step = GaugeMap::monomial(&phi.main().to_matrix().neg(), r, order);
                current = apply_gauge(&current, &step)?;
                gauge = gauge.compose(&step);
            }
            None => return Ok(TrivializeOutcome::Blocked { order: r, class: c, gauge_so_far: gauge }),
        }
    }
}
