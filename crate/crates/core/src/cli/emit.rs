//! JSON forms of engine objects. Rationals are strings, tensors are flat,
//! matrices are lists of rows.

use serde_json::{json, Map, Value};

use super::problem::{ModuleSource, Problem, TensorSpec};
use crate::algebra::{Algebra, Bimodule};
use crate::cochain::{Cochain, CohomologyReport, MultiMap};
use crate::deform::{Deformation, GaugeMap};
use crate::exactlin::{format_scalar, Matrix, Scalar};
use crate::extensions::{ExtensionPair, TwoCocycle};
use crate::hder::HigherDerivation;
use crate::report::{CheckReport, Violation};

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_scalar(x))).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| scalars(m.row(i))).collect())
}

pub fn matrices(ms: &[Matrix]) -> Value {
    Value::Array(ms.iter().map(matrix).collect())
}

pub fn multimap(f: &MultiMap) -> Value {
    scalars(f.values())
}

pub fn cochain(c: &Cochain) -> Value {
    json!({
        "n": c.degree(),
        "main": multimap(c.main()),
        "parts": c.parts().iter().map(multimap).collect::<Vec<_>>(),
    })
}

pub fn two_cocycle(z: &TwoCocycle) -> Value {
    cochain(&z.to_cochain())
}

pub fn algebra(a: &Algebra) -> Value {
    json!({
        "dim": a.dim(),
        "basis": a.labels(),
        "table": scalars(a.structure_constants()),
        "unit": a.unit_index(),
    })
}

pub fn hder(d: &HigherDerivation) -> Value {
    json!({ "rank": d.rank(), "maps": matrices(d.maps()) })
}

pub fn bimodule(source: &ModuleSource, m: &Bimodule) -> Value {
    match source {
        ModuleSource::Adjoint => json!({ "kind": "adjoint" }),
        ModuleSource::Trivial => json!({ "kind": "trivial", "mdim": m.mdim(), "maps": matrices(m.dmaps()) }),
        ModuleSource::Explicit => explicit_bimodule(m),
    }
}

pub fn explicit_bimodule(m: &Bimodule) -> Value {
    json!({
        "kind": "explicit",
        "mdim": m.mdim(),
        "left": scalars(m.left_tensor()),
        "right": scalars(m.right_tensor()),
        "maps": matrices(m.dmaps()),
    })
}

pub fn extension(e: &ExtensionPair) -> Value {
    json!({
        "algebra": algebra(&e.total),
        "hder": hder(&e.total_hder),
        "inclusion": matrix(&e.inclusion),
        "projection": matrix(&e.projection),
        "section": matrix(&e.section),
    })
}

pub fn deformation(def: &Deformation) -> Value {
    json!({
        "order": def.order(),
        "mu": def.mus().iter().map(multimap).collect::<Vec<_>>(),
        "d": def.dks().iter().map(|row| matrices(row)).collect::<Vec<_>>(),
    })
}

pub fn gauge(g: &GaugeMap) -> Value {
    json!({ "order": g.order(), "phis": matrices(g.phis()) })
}

pub fn violation(v: &Violation) -> Value {
    json!({ "law": v.law, "indices": v.indices, "lhs": scalars(&v.lhs), "rhs": scalars(&v.rhs) })
}

pub fn check_report(r: &CheckReport) -> Value {
    json!({
        "ok": r.is_ok(),
        "first_violation": r.first_violation.as_ref().map(violation),
        "notes": r.notes,
    })
}

pub fn cohomology(h: &CohomologyReport) -> Value {
    json!({
        "degree": h.degree,
        "dim_cochains": h.dim_cochains,
        "dim_cocycles": h.dim_cocycles,
        "dim_coboundaries": h.dim_coboundaries,
        "betti": h.betti,
        "cocycle_basis": h.cocycle_basis.iter().map(cochain).collect::<Vec<_>>(),
        "class_representatives": h.class_representatives.iter().map(cochain).collect::<Vec<_>>(),
    })
}

fn tensor_spec(t: &TensorSpec) -> Value {
    let mut m = Map::new();
    m.insert("vdim".into(), json!(t.vdim));
    if let Some(d) = t.degree {
        m.insert("degree".into(), json!(d));
    }
    m.insert("thetas".into(), matrices(&t.thetas));
    if let Some(f) = &t.f {
        m.insert("f".into(), matrix(f));
    }
    Value::Object(m)
}

/// Canonical form of a problem file; parsing it back gives the same problem.
pub fn problem(p: &Problem) -> Value {
    let mut m = Map::new();
    if let Some(a) = &p.algebra {
        m.insert("algebra".into(), algebra(a));
    }
    if let Some(d) = &p.hder {
        m.insert("hder".into(), hder(d));
    }
    if let Some((src, b)) = &p.bimodule {
        m.insert("bimodule".into(), bimodule(src, b));
    }
    let mut named = Map::new();
    for (name, c) in &p.cochains {
        match name.as_str() {
            "cochain" | "cocycle" => {
                m.insert(name.clone(), cochain(c));
            }
            _ => {
                named.insert(name.clone(), cochain(c));
            }
        }
    }
    if !named.is_empty() {
        m.insert("cocycles".into(), Value::Object(named));
    }
    if let Some(def) = &p.deformation {
        m.insert("deformation".into(), deformation(def));
    }
    if let Some(t) = &p.tensor {
        m.insert("tensor".into(), tensor_spec(t));
    }
    if let Some(e) = &p.extension {
        m.insert("extension".into(), extension(e));
    }
    if let Some(s) = &p.section {
        m.insert("section".into(), matrix(s));
    }
    Value::Object(m)
}
