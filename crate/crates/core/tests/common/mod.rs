//! Reference implementations written directly from the definitions, on raw
//! flat tensors. They share no code path with the library beyond reading
//! its stored coefficients.
#![allow(dead_code, clippy::needless_range_loop)]

use hderlab::algebra::{Algebra, Bimodule};
use hderlab::cochain::Cochain;
use hderlab::hder::HigherDerivation;
use hderlab::{Matrix, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = Scalar;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Small random rational, zero with probability `zero_pct`%.
pub fn small(rng: &mut ChaCha8Rng, zero_pct: u32) -> Q {
    if rng.gen_range(0..100) < zero_pct {
        return Q::zero();
    }
    let n = rng.gen_range(-4i64..=4);
    let d = rng.gen_range(1i64..=3);
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize, zero_pct: u32) -> Vec<Q> {
    (0..len).map(|_| small(rng, zero_pct)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, zero_pct: u32) -> Matrix {
    Matrix::from_entries(rows, cols, random_vec(rng, rows * cols, zero_pct)).unwrap()
}

/// Rank by plain Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][col].clone();
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = &row[col] / &pivot;
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn row_major(m: &Matrix) -> Vec<Q> {
    (0..m.rows()).flat_map(|i| m.row(i).to_vec()).collect()
}

/// Raw data of an algebra with higher derivation and coefficient bimodule.
#[derive(Clone, Debug)]
pub struct Raw {
    pub n: usize,
    pub m: usize,
    pub c: Vec<Q>,
    /// `d[k]`, row-major, `d[0]` the identity.
    pub d: Vec<Vec<Q>>,
    pub left: Vec<Q>,
    pub right: Vec<Q>,
    /// `dm[k]`, row-major, `dm[0]` the identity.
    pub dm: Vec<Vec<Q>>,
}

fn identity(n: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = Q::one();
    }
    v
}

impl Raw {
    pub fn new(a: &Algebra, d: &HigherDerivation, module: &Bimodule) -> Raw {
        let n = a.dim();
        let m = module.mdim();
        let mut ds = vec![identity(n)];
        ds.extend(d.maps().iter().map(row_major));
        let mut dms = vec![identity(m)];
        dms.extend(module.dmaps().iter().map(row_major));
        Raw {
            n,
            m,
            c: a.structure_constants().to_vec(),
            d: ds,
            left: module.left_tensor().to_vec(),
            right: module.right_tensor().to_vec(),
            dm: dms,
        }
    }

    pub fn rank_n(&self) -> usize {
        self.d.len() - 1
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.n;
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let s = &a[i] * &b[j];
                if s.is_zero() {
                    continue;
                }
                for k in 0..n {
                    out[k] += &s * &self.c[(i * n + j) * n + k];
                }
            }
        }
        out
    }

    pub fn lact(&self, a: &[Q], x: &[Q]) -> Vec<Q> {
        let (n, m) = (self.n, self.m);
        let mut out = vec![Q::zero(); m];
        for i in 0..n {
            for p in 0..m {
                let s = &a[i] * &x[p];
                if s.is_zero() {
                    continue;
                }
                for b in 0..m {
                    out[b] += &s * &self.left[(i * m + p) * m + b];
                }
            }
        }
        out
    }

    pub fn ract(&self, x: &[Q], a: &[Q]) -> Vec<Q> {
        let (n, m) = (self.n, self.m);
        let mut out = vec![Q::zero(); m];
        for p in 0..m {
            for i in 0..n {
                let s = &x[p] * &a[i];
                if s.is_zero() {
                    continue;
                }
                for b in 0..m {
                    out[b] += &s * &self.right[(p * n + i) * m + b];
                }
            }
        }
        out
    }

    pub fn da(&self, k: usize, v: &[Q]) -> Vec<Q> {
        apply(&self.d[k], v)
    }

    pub fn dmod(&self, k: usize, v: &[Q]) -> Vec<Q> {
        apply(&self.dm[k], v)
    }

    pub fn basis(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.n];
        v[i] = Q::one();
        v
    }

    /// Evaluates a flat `arity`-linear map `A^arity → M` on arbitrary vectors.
    pub fn eval(&self, f: &[Q], arity: usize, args: &[Vec<Q>]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.m];
        for (t, coef) in tuples(self.n, arity).into_iter().filter_map(|t| {
            let c = t.iter().zip(args).fold(Q::one(), |acc, (&i, a)| acc * &a[i]);
            (!c.is_zero()).then_some((t, c))
        }) {
            let off = t.iter().fold(0, |acc, &i| acc * self.n + i) * self.m;
            for b in 0..self.m {
                out[b] += &coef * &f[off + b];
            }
        }
        out
    }

    /// Flat table of `g` on basis tuples of length `arity`.
    pub fn tabulate(&self, arity: usize, mut g: impl FnMut(&[Vec<Q>]) -> Vec<Q>) -> Vec<Q> {
        tuples(self.n, arity)
            .into_iter()
            .flat_map(|t| {
                let args: Vec<Vec<Q>> = t.iter().map(|&i| self.basis(i)).collect();
                g(&args)
            })
            .collect()
    }

    fn contracted(&self, args: &[Vec<Q>], i: usize) -> Vec<Vec<Q>> {
        let mut v = args[..i].to_vec();
        v.push(self.mul(&args[i], &args[i + 1]));
        v.extend_from_slice(&args[i + 2..]);
        v
    }

    fn middle(&self, f: &[Q], p: usize, args: &[Vec<Q>], out: &mut [Q]) {
        for i in 0..p {
            let v = self.eval(f, p, &self.contracted(args, i));
            let neg = i % 2 == 0;
            for (o, x) in out.iter_mut().zip(v) {
                if neg {
                    *o -= x;
                } else {
                    *o += x;
                }
            }
        }
    }

    pub fn hoch(&self, f: &[Q], p: usize) -> Vec<Q> {
        self.tabulate(p + 1, |a| {
            let mut out = self.lact(&a[0], &self.eval(f, p, &a[1..]));
            self.middle(f, p, a, &mut out);
            let r = self.ract(&self.eval(f, p, &a[..p]), &a[p]);
            add_signed(&mut out, &r, p.is_multiple_of(2));
            out
        })
    }

    pub fn dprime(&self, fam: &[Vec<Q>], p: usize) -> Vec<Vec<Q>> {
        let big_n = self.rank_n();
        (1..=big_n)
            .map(|k| {
                self.tabulate(p + 1, |a| {
                    let mut out = vec![Q::zero(); self.m];
                    for j in 1..=k {
                        let v = self.lact(&self.da(k - j, &a[0]), &self.eval(&fam[j - 1], p, &a[1..]));
                        add_signed(&mut out, &v, false);
                    }
                    self.middle(&fam[k - 1], p, a, &mut out);
                    for i in 1..=k {
                        let v = self.ract(&self.eval(&fam[i - 1], p, &a[..p]), &self.da(k - i, &a[p]));
                        add_signed(&mut out, &v, p.is_multiple_of(2));
                    }
                    out
                })
            })
            .collect()
    }

    pub fn dk(&self, f: &[Q], p: usize, k: usize) -> Vec<Q> {
        let splits: Vec<Vec<usize>> = tuples(k + 1, p).into_iter().filter(|t| t.iter().sum::<usize>() == k).collect();
        self.tabulate(p, |a| {
            let mut out = vec![Q::zero(); self.m];
            for s in &splits {
                let args: Vec<Vec<Q>> = s.iter().zip(a).map(|(&i, x)| self.da(i, x)).collect();
                add_signed(&mut out, &self.eval(f, p, &args), false);
            }
            let v = self.dmod(k, &self.eval(f, p, a));
            add_signed(&mut out, &v, true);
            out
        })
    }

    /// `(main, parts)` of `∂` applied to a degree-`p` cochain.
    pub fn partial(&self, main: &[Q], parts: &[Vec<Q>], p: usize) -> (Vec<Q>, Vec<Vec<Q>>) {
        let new_main = self.hoch(main, p);
        let big_n = self.rank_n();
        let new_parts = if p == 1 {
            (1..=big_n).map(|k| self.dk(main, 1, k).into_iter().map(|x| -x).collect()).collect()
        } else {
            let dp = self.dprime(parts, p - 1);
            (1..=big_n)
                .map(|k| {
                    let dk = self.dk(main, p, k);
                    dp[k - 1].iter().zip(dk).map(|(x, y)| if p.is_multiple_of(2) { x + y } else { x - y }).collect()
                })
                .collect()
        };
        (new_main, new_parts)
    }

    pub fn cochain_len(&self, p: usize) -> usize {
        let main = self.n.pow(p as u32) * self.m;
        if p == 1 {
            main
        } else {
            main + self.rank_n() * self.n.pow(p as u32 - 1) * self.m
        }
    }

    /// Matrix of `∂` on degree `p` as a list of rows.
    pub fn differential_rows(&self, p: usize) -> Vec<Vec<Q>> {
        let cols = self.cochain_len(p);
        let mut columns = Vec::with_capacity(cols);
        for j in 0..cols {
            let mut v = vec![Q::zero(); cols];
            v[j] = Q::one();
            let (main, parts) = self.split(&v, p);
            let (a, b) = self.partial(&main, &parts, p);
            columns.push(a.into_iter().chain(b.into_iter().flatten()).collect::<Vec<_>>());
        }
        let rows = self.cochain_len(p + 1);
        (0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect()
    }

    pub fn split(&self, v: &[Q], p: usize) -> (Vec<Q>, Vec<Vec<Q>>) {
        let ml = self.n.pow(p as u32) * self.m;
        let main = v[..ml].to_vec();
        let parts = if p == 1 {
            Vec::new()
        } else {
            let pl = self.n.pow(p as u32 - 1) * self.m;
            (0..self.rank_n()).map(|k| v[ml + k * pl..ml + (k + 1) * pl].to_vec()).collect()
        };
        (main, parts)
    }

    /// `b_2 = dim ker ∂_2 − rank ∂_1`.
    pub fn betti(&self, p: usize) -> usize {
        let out = rank(self.differential_rows(p));
        let inn = if p == 1 { 0 } else { rank(self.differential_rows(p - 1)) };
        self.cochain_len(p) - out - inn
    }

    /// Leibniz rule `d_k(ab) = Σ d_i(a) d_{k−i}(b)` on basis pairs.
    pub fn is_hder(&self) -> bool {
        (1..=self.rank_n()).all(|k| {
            (0..self.n).all(|i| {
                (0..self.n).all(|j| {
                    let (a, b) = (self.basis(i), self.basis(j));
                    let lhs = self.da(k, &self.mul(&a, &b));
                    let mut rhs = vec![Q::zero(); self.n];
                    for p in 0..=k {
                        add_signed(&mut rhs, &self.mul(&self.da(p, &a), &self.da(k - p, &b)), false);
                    }
                    lhs == rhs
                })
            })
        })
    }

    pub fn is_associative(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                (0..self.n).all(|k| {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    self.mul(&self.mul(&a, &b), &c) == self.mul(&a, &self.mul(&b, &c))
                })
            })
        })
    }
}

pub fn apply(mat: &[Q], v: &[Q]) -> Vec<Q> {
    let n = v.len();
    (0..mat.len() / n).map(|i| (0..n).fold(Q::zero(), |acc, j| acc + &mat[i * n + j] * &v[j])).collect()
}

fn add_signed(out: &mut [Q], v: &[Q], negate: bool) {
    for (o, x) in out.iter_mut().zip(v) {
        if negate {
            *o -= x;
        } else {
            *o += x;
        }
    }
}

/// All tuples in `0..base` of length `len`, lexicographic.
pub fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |i| {
                    let mut s = t.clone();
                    s.push(i);
                    s
                })
            })
            .collect();
    }
    out
}

pub fn main_and_parts(c: &Cochain) -> (Vec<Q>, Vec<Vec<Q>>) {
    (c.main().values().to_vec(), c.parts().iter().map(|p| p.values().to_vec()).collect())
}

pub fn is_zero_all(main: &[Q], parts: &[Vec<Q>]) -> bool {
    main.iter().chain(parts.iter().flatten()).all(Zero::is_zero)
}
