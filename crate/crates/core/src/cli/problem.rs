//! Problem files: JSON documents with rational strings.
//!
//! Tensors may be given flat or nested to any depth; leaves are read in
//! row-major order. Matrices are lists of rows (or flat, row-major).

use serde_json::Value;

use crate::algebra::{adjoint_bimodule, trivial_bimodule, verify_algebra, Algebra, Bimodule};
use crate::cochain::{Cochain, MultiMap};
use crate::deform::Deformation;
use crate::error::{Error, Result};
use crate::exactlin::{parse_scalar, Matrix, Scalar};
use crate::extensions::ExtensionPair;
use crate::hder::HigherDerivation;

/// Size caps applied while reading a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Cap on each of dim, mdim, rank, degree, tensor degree and vdim.
    pub max_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_dim: 6 }
    }
}

impl Limits {
    /// `HDERLAB_MAX_DIM`, default 6.
    pub fn from_env() -> Result<Self> {
        match std::env::var("HDERLAB_MAX_DIM") {
            Err(_) => Ok(Limits::default()),
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .map(|max_dim| Limits { max_dim })
                .map_err(|_| Error::Parse(format!("HDERLAB_MAX_DIM must be a non-negative integer, got {s:?}"))),
        }
    }

    pub fn check(&self, what: &str, value: usize) -> Result<()> {
        if value > self.max_dim {
            return Err(Error::TooLarge(format!("{what} = {value} exceeds HDERLAB_MAX_DIM = {}", self.max_dim)));
        }
        Ok(())
    }

    /// Largest cochain space a command may assemble.
    pub fn max_cochain_dim(&self) -> usize {
        self.max_dim.pow(5).max(1)
    }
}

/// How the coefficient bimodule was specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSource {
    Adjoint,
    Trivial,
    Explicit,
}

/// Tensor-algebra section: `V`, truncation degree, `ϑ_k`, optional `f: V → A`.
#[derive(Clone, Debug)]
pub struct TensorSpec {
    pub vdim: usize,
    pub degree: Option<usize>,
    pub thetas: Vec<Matrix>,
    pub f: Option<Matrix>,
}

/// A parsed problem file. Every section is optional; commands ask for what
/// they need.
#[derive(Clone, Debug)]
pub struct Problem {
    pub algebra: Option<Algebra>,
    pub hder: Option<HigherDerivation>,
    pub bimodule: Option<(ModuleSource, Bimodule)>,
    /// Named cochains, in file order.
    pub cochains: Vec<(String, Cochain)>,
    pub deformation: Option<Deformation>,
    pub tensor: Option<TensorSpec>,
    pub extension: Option<ExtensionPair>,
    pub section: Option<Matrix>,
}

pub(crate) struct Ctx<'a> {
    limits: &'a Limits,
}

fn at(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn field<'v>(v: &'v Value, path: &str, key: &str) -> Result<&'v Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("{}: missing", at(path, key))))
}

fn as_object<'v>(v: &'v Value, path: &str) -> Result<&'v serde_json::Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse(format!("{path}: expected an object")))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("{path}: expected a non-negative integer")))
}

fn scalar(v: &Value, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s).map_err(|e| Error::Parse(format!("{path}: {e}"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Scalar::from_integer(i.into())),
            None => Err(Error::Parse(format!("{path}: numbers must be integers or rational strings, got {n}"))),
        },
        _ => Err(Error::Parse(format!("{path}: expected a rational string"))),
    }
}

fn flatten(v: &Value, path: &str, out: &mut Vec<Scalar>) -> Result<()> {
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(item, &format!("{path}[{i}]"), out)?;
            }
            Ok(())
        }
        _ => {
            out.push(scalar(v, path)?);
            Ok(())
        }
    }
}

/// Leaves of a (possibly nested) array, checked against `len`.
pub(crate) fn tensor(v: &Value, path: &str, len: usize) -> Result<Vec<Scalar>> {
    if !v.is_array() {
        return Err(Error::Parse(format!("{path}: expected an array")));
    }
    let mut out = Vec::with_capacity(len);
    flatten(v, path, &mut out)?;
    if out.len() != len {
        return Err(Error::Shape(format!("{path}: expected {len} entries, got {}", out.len())));
    }
    Ok(out)
}

pub(crate) fn matrix(v: &Value, path: &str, rows: usize, cols: usize) -> Result<Matrix> {
    if let Some(items) = v.as_array() {
        if items.len() == rows && rows > 0 && items.iter().all(Value::is_array) {
            if let Some((i, r)) = items.iter().enumerate().find(|(_, r)| r.as_array().map(Vec::len) != Some(cols)) {
                let got = r.as_array().map(Vec::len).unwrap_or(0);
                return Err(Error::Shape(format!("{path}[{i}]: expected a row of {cols} entries, got {got}")));
            }
        }
    }
    Matrix::from_entries(rows, cols, tensor(v, path, rows * cols)?)
}

fn matrix_list(v: &Value, path: &str, count: Option<usize>, rows: usize, cols: usize) -> Result<Vec<Matrix>> {
    let items = v.as_array().ok_or_else(|| Error::Parse(format!("{path}: expected a list of matrices")))?;
    if let Some(c) = count {
        if items.len() != c {
            return Err(Error::Shape(format!("{path}: expected {c} matrices, got {}", items.len())));
        }
    }
    items.iter().enumerate().map(|(i, m)| matrix(m, &format!("{path}[{i}]"), rows, cols)).collect()
}

impl Ctx<'_> {
    fn algebra(&self, v: &Value, path: &str) -> Result<Algebra> {
        as_object(v, path)?;
        let dim = as_usize(field(v, path, "dim")?, &at(path, "dim"))?;
        self.limits.check("dim", dim)?;
        if dim == 0 {
            return Err(Error::Shape(format!("{}: must be positive", at(path, "dim"))));
        }
        let labels: Vec<String> = match v.get("basis") {
            None => (0..dim).map(|i| format!("e{i}")).collect(),
            Some(b) => {
                let p = at(path, "basis");
                let items = b.as_array().ok_or_else(|| Error::Parse(format!("{p}: expected a list of labels")))?;
                if items.len() != dim {
                    return Err(Error::Shape(format!("{p}: expected {dim} labels, got {}", items.len())));
                }
                items
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        s.as_str().map(str::to_string).ok_or_else(|| Error::Parse(format!("{p}[{i}]: expected a string")))
                    })
                    .collect::<Result<_>>()?
            }
        };
        let table = tensor(field(v, path, "table")?, &at(path, "table"), dim * dim * dim)?;
        let unit = match v.get("unit") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(labels.iter().position(|l| l == s).ok_or_else(|| {
                Error::Parse(format!("{}: unknown basis label {s:?}", at(path, "unit")))
            })?),
            Some(u) => Some(as_usize(u, &at(path, "unit"))?),
        };
        Algebra::new(labels, table, unit)
    }

    fn hder(&self, v: &Value, path: &str, dim: usize) -> Result<HigherDerivation> {
        as_object(v, path)?;
        let maps_v = field(v, path, "maps")?;
        let rank = match v.get("rank") {
            Some(r) => Some(as_usize(r, &at(path, "rank"))?),
            None => None,
        };
        let maps = matrix_list(maps_v, &at(path, "maps"), rank, dim, dim)?;
        self.limits.check("rank", maps.len())?;
        HigherDerivation::new(maps).map_err(|e| match e {
            Error::Precondition(m) => Error::Shape(format!("{path}: {m}")),
            other => other,
        })
    }

    fn bimodule(&self, v: &Value, path: &str, a: &Algebra, d: &HigherDerivation) -> Result<(ModuleSource, Bimodule)> {
        as_object(v, path)?;
        let n = a.dim();
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or("explicit");
        match kind {
            "adjoint" => Ok((ModuleSource::Adjoint, adjoint_bimodule(a, d))),
            "trivial" => {
                let mdim = match v.get("mdim") {
                    Some(m) => as_usize(m, &at(path, "mdim"))?,
                    None => 1,
                };
                self.limits.check("mdim", mdim)?;
                let maps = match v.get("maps") {
                    Some(m) => matrix_list(m, &at(path, "maps"), Some(d.rank()), mdim, mdim)?,
                    None => vec![Matrix::zeros(mdim, mdim); d.rank()],
                };
                Ok((ModuleSource::Trivial, trivial_bimodule(a, mdim, maps)?))
            }
            "explicit" => {
                let mdim = as_usize(field(v, path, "mdim")?, &at(path, "mdim"))?;
                self.limits.check("mdim", mdim)?;
                let left = tensor(field(v, path, "left")?, &at(path, "left"), n * mdim * mdim)?;
                let right = tensor(field(v, path, "right")?, &at(path, "right"), mdim * n * mdim)?;
                let maps = matrix_list(field(v, path, "maps")?, &at(path, "maps"), Some(d.rank()), mdim, mdim)?;
                Ok((ModuleSource::Explicit, Bimodule::new(n, mdim, left, right, maps)?))
            }
            other => Err(Error::Parse(format!(
                "{}: unknown kind {other:?} (expected adjoint, trivial or explicit)",
                at(path, "kind")
            ))),
        }
    }

    fn cochain(&self, v: &Value, path: &str, dim: usize, mdim: usize, rank: usize) -> Result<Cochain> {
        as_object(v, path)?;
        let n = as_usize(field(v, path, "n")?, &at(path, "n"))?;
        if n == 0 {
            return Err(Error::Shape(format!("{}: cochains have degree at least 1", at(path, "n"))));
        }
        self.limits.check("cochain degree", n)?;
        let main = MultiMap::from_values(n, dim, mdim, tensor(field(v, path, "main")?, &at(path, "main"), dim.pow(n as u32) * mdim)?)?;
        let parts = if n == 1 {
            if let Some(p) = v.get("parts") {
                if p.as_array().map(Vec::len) != Some(0) {
                    return Err(Error::Shape(format!("{}: 1-cochains have no parts", at(path, "parts"))));
                }
            }
            Vec::new()
        } else {
            let pv = field(v, path, "parts")?;
            let items = pv.as_array().ok_or_else(|| Error::Parse(format!("{}: expected a list", at(path, "parts"))))?;
            if items.len() != rank {
                return Err(Error::Shape(format!("{}: expected {rank} parts, got {}", at(path, "parts"), items.len())));
            }
            let plen = dim.pow(n as u32 - 1) * mdim;
            items
                .iter()
                .enumerate()
                .map(|(k, p)| MultiMap::from_values(n - 1, dim, mdim, tensor(p, &format!("{}[{k}]", at(path, "parts")), plen)?))
                .collect::<Result<_>>()?
        };
        Cochain::new(main, parts)
    }

    fn deformation(&self, v: &Value, path: &str, dim: usize, rank: usize) -> Result<Deformation> {
        as_object(v, path)?;
        let order = as_usize(field(v, path, "order")?, &at(path, "order"))?;
        self.limits.check("deformation order", order)?;
        let mu_v = field(v, path, "mu")?;
        let mu_items = mu_v.as_array().ok_or_else(|| Error::Parse(format!("{}: expected a list", at(path, "mu"))))?;
        if mu_items.len() != order + 1 {
            return Err(Error::Shape(format!("{}: expected {} coefficients, got {}", at(path, "mu"), order + 1, mu_items.len())));
        }
        let mus = mu_items
            .iter()
            .enumerate()
            .map(|(s, m)| MultiMap::from_values(2, dim, dim, tensor(m, &format!("{}[{s}]", at(path, "mu")), dim * dim * dim)?))
            .collect::<Result<_>>()?;
        let d_v = field(v, path, "d")?;
        let d_items = d_v.as_array().ok_or_else(|| Error::Parse(format!("{}: expected a list", at(path, "d"))))?;
        if d_items.len() != rank {
            return Err(Error::Shape(format!("{}: expected {rank} derivation series, got {}", at(path, "d"), d_items.len())));
        }
        let dks = d_items
            .iter()
            .enumerate()
            .map(|(k, row)| matrix_list(row, &format!("{}[{k}]", at(path, "d")), Some(order + 1), dim, dim))
            .collect::<Result<_>>()?;
        Deformation::new(mus, dks)
    }

    fn tensor_spec(&self, v: &Value, path: &str) -> Result<TensorSpec> {
        as_object(v, path)?;
        let vdim = as_usize(field(v, path, "vdim")?, &at(path, "vdim"))?;
        self.limits.check("vdim", vdim)?;
        let degree = match v.get("degree") {
            Some(d) => {
                let d = as_usize(d, &at(path, "degree"))?;
                self.limits.check("tensor degree", d)?;
                Some(d)
            }
            None => None,
        };
        let thetas = matrix_list(field(v, path, "thetas")?, &at(path, "thetas"), None, vdim, vdim)?;
        self.limits.check("rank", thetas.len())?;
        Ok(TensorSpec { vdim, degree, thetas, f: None })
    }

    fn extension(&self, v: &Value, path: &str, a: &Algebra, d: &HigherDerivation) -> Result<ExtensionPair> {
        as_object(v, path)?;
        let total = self.algebra(field(v, path, "algebra")?, &at(path, "algebra"))?;
        let total_hder = self.hder(field(v, path, "hder")?, &at(path, "hder"), total.dim())?;
        let e = total.dim();
        if e < a.dim() {
            return Err(Error::Shape(format!("{path}: total algebra is smaller than the base")));
        }
        let mdim = e - a.dim();
        let inclusion = matrix(field(v, path, "inclusion")?, &at(path, "inclusion"), e, mdim)?;
        let projection = matrix(field(v, path, "projection")?, &at(path, "projection"), a.dim(), e)?;
        let section = matrix(field(v, path, "section")?, &at(path, "section"), e, a.dim())?;
        ExtensionPair::new(total, total_hder, a.clone(), d.clone(), inclusion, projection, section)
    }
}

impl Problem {
    pub fn parse(text: &str, limits: &Limits) -> Result<Problem> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))?;
        let root = as_object(&v, "<root>")?;
        const KNOWN: [&str; 10] =
            ["algebra", "hder", "bimodule", "cochain", "cocycle", "cocycles", "deformation", "tensor", "extension", "section"];
        if let Some(k) = root.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Parse(format!("{k}: unknown section")));
        }
        let ctx = Ctx { limits };
        let algebra = v.get("algebra").map(|x| ctx.algebra(x, "algebra")).transpose()?;
        let hder = match (&algebra, v.get("hder")) {
            (Some(a), Some(h)) => Some(ctx.hder(h, "hder", a.dim())?),
            (None, Some(_)) => return Err(Error::Parse("hder: needs an algebra section".into())),
            _ => None,
        };
        let needs_pair = |key: &str| -> Result<(&Algebra, &HigherDerivation)> {
            match (&algebra, &hder) {
                (Some(a), Some(d)) => Ok((a, d)),
                _ => Err(Error::Parse(format!("{key}: needs algebra and hder sections"))),
            }
        };
        let bimodule = match v.get("bimodule") {
            Some(b) => {
                let (a, d) = needs_pair("bimodule")?;
                Some(ctx.bimodule(b, "bimodule", a, d)?)
            }
            None => None,
        };
        let mut cochains = Vec::new();
        for key in ["cochain", "cocycle"] {
            if let Some(c) = v.get(key) {
                let (a, d) = needs_pair(key)?;
                let mdim = bimodule.as_ref().map_or(a.dim(), |(_, m)| m.mdim());
                cochains.push((key.to_string(), ctx.cochain(c, key, a.dim(), mdim, d.rank())?));
            }
        }
        if let Some(cs) = v.get("cocycles") {
            let (a, d) = needs_pair("cocycles")?;
            let mdim = bimodule.as_ref().map_or(a.dim(), |(_, m)| m.mdim());
            for (name, c) in as_object(cs, "cocycles")? {
                let path = format!("cocycles.{name}");
                cochains.push((name.clone(), ctx.cochain(c, &path, a.dim(), mdim, d.rank())?));
            }
        }
        let deformation = match v.get("deformation") {
            Some(x) => {
                let (a, d) = needs_pair("deformation")?;
                Some(ctx.deformation(x, "deformation", a.dim(), d.rank())?)
            }
            None => None,
        };
        let tensor = match v.get("tensor") {
            Some(x) => {
                let mut t = ctx.tensor_spec(x, "tensor")?;
                if let Some(f) = x.get("f") {
                    let a = algebra.as_ref().ok_or_else(|| Error::Parse("tensor.f: needs an algebra section".into()))?;
                    t.f = Some(matrix(f, "tensor.f", a.dim(), t.vdim)?);
                }
                Some(t)
            }
            None => None,
        };
        let extension = match v.get("extension") {
            Some(x) => {
                let (a, d) = needs_pair("extension")?;
                Some(ctx.extension(x, "extension", a, d)?)
            }
            None => None,
        };
        let section = match (v.get("section"), &extension, &algebra) {
            (Some(s), Some(e), Some(a)) => Some(matrix(s, "section", e.total.dim(), a.dim())?),
            (Some(_), _, _) => return Err(Error::Parse("section: needs an extension section".into())),
            _ => None,
        };
        Ok(Problem { algebra, hder, bimodule, cochains, deformation, tensor, extension, section })
    }

    pub fn pair(&self) -> Result<(&Algebra, &HigherDerivation)> {
        match (&self.algebra, &self.hder) {
            (Some(a), Some(d)) => Ok((a, d)),
            _ => Err(Error::Parse("this command needs algebra and hder sections".into())),
        }
    }

    /// The declared algebra, checked to be associative (with its unit).
    pub fn verified_pair(&self) -> Result<(&Algebra, &HigherDerivation)> {
        let (a, d) = self.pair()?;
        if let Some(v) = verify_algebra(a).first_violation {
            return Err(Error::Precondition(format!("algebra: {v}")));
        }
        Ok((a, d))
    }

    pub fn cochain(&self, key: Option<&str>) -> Result<&Cochain> {
        match key {
            Some(k) => self
                .cochains
                .iter()
                .find(|(name, _)| name == k)
                .map(|(_, c)| c)
                .ok_or_else(|| Error::Parse(format!("no cochain named {k:?}"))),
            None => match self.cochains.as_slice() {
                [(_, c)] => Ok(c),
                [] => Err(Error::Parse("this command needs a cochain".into())),
                _ => Err(Error::Parse("several cochains present; choose one with --cocycle".into())),
            },
        }
    }
}
