//! The `motions` report. Sections that do not apply to the input are
//! replaced by a note saying why.

use serde_json::{json, Map, Value};

use psdrigid_core::factorization::{normalize_orthogonal_pair, rank_one_profile, PsdFactorization};
use psdrigid_core::io::{motion_to_json, JsonScalar};
use psdrigid_core::motions::{
    build_cone_system, cone_full_dimensional, left_kernel_formula, right_kernel_structured, solve_two_inf_no_orth,
    solve_two_inf_one_orth, solve_two_inf_two_orth, trivial_basis_general, MotionSpace, Variant,
};
use psdrigid_core::Result;

fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(f64::to_json).collect())
}

fn space_json(s: &MotionSpace) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(s.kind.to_string()));
    obj.insert("dim".into(), json!(s.dim()));
    obj.insert("basis".into(), Value::Array(s.basis.iter().map(motion_to_json).collect()));
    if let Some(w) = &s.witness {
        obj.insert("witness".into(), motion_to_json(w));
    }
    Value::Object(obj)
}

fn cone_sections(
    f: &PsdFactorization<f64>,
    tol: f64,
    out: &mut Map<String, Value>,
    notes: &mut Vec<String>,
) -> Result<()> {
    let profile = rank_one_profile(f, tol)?;
    let orth = profile.orth_source_pairs();
    out.insert("p_bar".into(), json!(profile.p_bar()));
    out.insert("q_bar".into(), json!(profile.q_bar()));
    out.insert("orth_pairs".into(), json!(orth.iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>()));

    let space = match orth.len() {
        0 => solve_two_inf_no_orth(&profile, tol),
        1 => solve_two_inf_one_orth(&profile, tol),
        _ => solve_two_inf_two_orth(&profile, tol),
    };
    match space {
        Ok(s) => {
            out.insert("motion_space".into(), space_json(&s));
        }
        Err(e) => notes.push(format!("motion space: {e}")),
    }

    // the reduced system lives in the frame where the pair is axis-aligned
    let (variant, framed) = match orth.len() {
        0 => (Variant::Full, profile),
        1 => {
            let (g, s) = normalize_orthogonal_pair(f, orth[0].0, orth[0].1, tol)?;
            out.insert("frame".into(), json!(s));
            (Variant::OneOrth, rank_one_profile(&g, tol)?)
        }
        _ => {
            notes.push("two or more orthogonal pairs: no cone matrix".into());
            return Ok(());
        }
    };
    let c = build_cone_system(&framed, variant, tol)?;
    out.insert("variant".into(), json!(if variant == Variant::Full { "full" } else { "one_orth" }));
    out.insert(
        "cone_matrix".into(),
        Value::Array(c.matrix.row_iter().map(|r| vector(&r.iter().copied().collect::<Vec<_>>())).collect()),
    );
    out.insert("cone_rank".into(), json!(c.rank(tol)));
    out.insert(
        "right_kernel".into(),
        Value::Array(right_kernel_structured(variant).iter().map(|v| vector(v)).collect()),
    );
    match left_kernel_formula(&framed, variant, tol) {
        Ok(v) => {
            out.insert("left_kernel".into(), vector(&v));
        }
        Err(e) => notes.push(format!("left kernel: {e}")),
    }
    if variant == Variant::Full {
        out.insert("cone_full_dimensional".into(), json!(cone_full_dimensional(&c, tol)?));
    }
    Ok(())
}

pub fn report(f: &PsdFactorization<f64>, tol: f64) -> Value {
    let mut out = Map::new();
    let mut notes = Vec::new();
    out.insert("k".into(), json!(f.k));
    out.insert("trivial_basis".into(), Value::Array(trivial_basis_general(f.k).iter().map(motion_to_json).collect()));
    if f.k == 2 {
        if let Err(e) = cone_sections(f, tol, &mut out, &mut notes) {
            notes.push(e.to_string());
        }
    } else {
        notes.push("cone matrices are defined for size-2 factorizations only".into());
    }
    out.insert("notes".into(), json!(notes));
    out.insert("tolerance".into(), tol.to_json());
    Value::Object(out)
}
