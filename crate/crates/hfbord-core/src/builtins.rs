//! Built-in bordered constants and their validation.
//!
//! Seven constants ship with the engine: the AZ bimodule, its conjugate, the
//! identity DA bimodule, the identity-type DD data the AZ bimodule is derived
//! from, the type-A module of the 0-framed solid torus, and the type-D
//! modules of the 0-framed solid torus and of the ∞-framed solid torus with
//! longitudinal knot. They are shipped as JSON data files with a checksum
//! manifest; `validate_builtins` is the correctness authority: it re-derives
//! the AZ bimodule from the DD data, checks every structure equation, and
//! verifies the pairing facts the rest of the engine relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::algebra::{Basis, Idem, BASIS, CHORDS};
use crate::bimod::{
    box_a_d, box_da_d, box_da_da, da_iso_by_renaming, da_reduce, AGen, AOp, DAGen, DAOp,
    InputPattern, TypeAModule, TypeDAModule,
};
use crate::config::Config;
use crate::error::HfError;
use crate::typed::{iso_search, reduce, DGen, MorComplex, TypeDModule};

/// The identity-type DD data over two copies of the torus algebra (the
/// second factor acts by left multiplication, composing in reverse order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DDData {
    pub generators: Vec<(String, Idem, Idem)>,
    /// (from, first coefficient, second coefficient, to)
    pub delta: Vec<(usize, Basis, Basis, usize)>,
}

impl DDData {
    /// Structure equation for a type-D structure over A ⊗ A^op: along every
    /// two-arrow path the first coefficients compose forward and the second
    /// compose backward.
    pub fn check_structure(&self) -> Result<(), HfError> {
        for x in 0..self.generators.len() {
            let mut acc: BTreeMap<(Basis, Basis, usize), bool> = BTreeMap::new();
            for a in self.delta.iter().filter(|a| a.0 == x) {
                for b in self.delta.iter().filter(|b| b.0 == a.3) {
                    if let (Some(c1), Some(c2)) = (a.1.mul(b.1), b.2.mul(a.2)) {
                        *acc.entry((c1, c2, b.3)).or_default() ^= true;
                    }
                }
            }
            if acc.values().any(|&v| v) {
                return Err(HfError::Invalid(format!(
                    "DD structure equation fails at {}",
                    self.generators[x].0
                )));
            }
        }
        Ok(())
    }
}

/// The DD identity: two generators with complementary idempotent pairs, a
/// three-chord arrow one way and a ρ₂ arrow back.
pub fn dd_identity() -> DDData {
    let p0 = 0; // (ι₀, ι₁)
    let p1 = 1; // (ι₁, ι₀)
    DDData {
        generators: vec![
            ("p0".into(), Idem::I0, Idem::I1),
            ("p1".into(), Idem::I1, Idem::I0),
        ],
        delta: vec![
            (p0, Basis::R1, Basis::R1, p1),
            (p0, Basis::R3, Basis::R3, p1),
            (p0, Basis::R123, Basis::R123, p1),
            (p1, Basis::R2, Basis::R2, p0),
        ],
    }
}

/// Type-D module of the 0-framed solid torus: one ι₀ generator with
/// ∂x = ρ₁₂ x.
pub fn cfd_t0() -> TypeDModule {
    TypeDModule::from_named(vec![DGen::new("x", Idem::I0)], &[("x", Basis::R12, "x")])
        .expect("constant is well-formed")
}

/// Type-D module of the ∞-framed solid torus with longitudinal knot: one ι₁
/// generator, zero differential.
pub fn cfd_tinf_nu() -> TypeDModule {
    TypeDModule::from_named(vec![DGen::new("x", Idem::I1)], &[]).expect("constant is well-formed")
}

/// Type-A module of the 0-framed solid torus: one generator with the
/// ρ₂ ρ₁₂* ρ₁ operation family.
pub fn cfa_t0() -> TypeAModule {
    TypeAModule::new(
        vec![AGen {
            name: "y".into(),
            idem: Idem::I1,
        }],
        vec![AOp {
            from: 0,
            pattern: InputPattern::from_parts(&[Basis::R2], true, &[Basis::R1])
                .expect("constant pattern is well-formed"),
            to: 0,
        }],
    )
    .expect("constant is well-formed")
}

/// The identity DA bimodule: one generator per idempotent, each input chord
/// passed straight through.
pub fn identity_da() -> TypeDAModule {
    let gens = vec![
        DAGen {
            name: "e0".into(),
            out: Idem::I0,
            inp: Idem::I0,
        },
        DAGen {
            name: "e1".into(),
            out: Idem::I1,
            inp: Idem::I1,
        },
    ];
    let idx = |i: Idem| match i {
        Idem::I0 => 0,
        Idem::I1 => 1,
    };
    let mut ops = Vec::new();
    for b in CHORDS {
        ops.push(DAOp {
            from: idx(b.left_idem()),
            pattern: InputPattern::literals(&[b]).unwrap(),
            out: b,
            to: idx(b.right_idem()),
        });
    }
    TypeDAModule::new(gens, ops).expect("constant is well-formed")
}

/// Derives the AZ bimodule from the DD identity paired against the algebra:
/// generators are pairs (DD generator, algebra basis element) with matching
/// idempotents, the differential feeds the second DD coefficient into left
/// multiplication, and inputs act by right multiplication. A final change of
/// basis (g_{ρ₁} ↦ g_{ρ₁} + ρ₂₃ ⊗ g_{ρ₁₂₃}) normalizes the pairing with the
/// ∞-framed solid torus to the five-generator model on the nose.
pub fn derive_az_from_dd(dd: &DDData) -> Result<TypeDAModule, HfError> {
    // Generators: x pairs with the DD generator whose second idempotent is
    // left(x); output idempotent is that generator's first idempotent.
    let mut gens = Vec::new();
    let mut which = Vec::new(); // (dd index, basis element)
    for (pi, p) in dd.generators.iter().enumerate() {
        for x in BASIS {
            if x.left_idem() == p.2 {
                gens.push(DAGen {
                    name: x.token().into(),
                    out: p.1,
                    inp: x.right_idem(),
                });
                which.push((pi, x));
            }
        }
    }
    let find = |x: Basis| which.iter().position(|&(_, b)| b == x);
    let mut ops = Vec::new();
    for (gi, &(pi, x)) in which.iter().enumerate() {
        // Differential from DD arrows: e ⊗ g_{e'·x}.
        for &(from, e, e2, _to) in dd.delta.iter().filter(|a| a.0 == pi) {
            let _ = from;
            if let Some(ex) = e2.mul(x) {
                let ti = find(ex).expect("product stays in the basis");
                ops.push(DAOp {
                    from: gi,
                    pattern: InputPattern::empty(),
                    out: e,
                    to: ti,
                });
            }
        }
        // Inputs act by right multiplication with an idempotent output.
        for b in CHORDS {
            if b.left_idem() != x.right_idem() {
                continue;
            }
            if let Some(xb) = x.mul(b) {
                let ti = find(xb).expect("product stays in the basis");
                ops.push(DAOp {
                    from: gi,
                    pattern: InputPattern::literals(&[b])?,
                    out: Basis::idem(gens[gi].out),
                    to: ti,
                });
            }
        }
    }
    let untwisted = TypeDAModule::new(gens, ops)?;
    // Change of basis g_{ρ₁} ↦ g_{ρ₁} + ρ₂₃ ⊗ g_{ρ₁₂₃}.
    twist_az(&untwisted)
}

/// Applies the normalizing change of basis to the raw DD-derived bimodule.
fn twist_az(b: &TypeDAModule) -> Result<TypeDAModule, HfError> {
    let r1 = b.gen_index("r1").ok_or_else(|| {
        HfError::Invalid("AZ derivation is missing the r1 generator".into())
    })?;
    let r123 = b
        .gen_index("r123")
        .ok_or_else(|| HfError::Invalid("AZ derivation is missing the r123 generator".into()))?;
    let mut ops: BTreeMap<(usize, InputPattern, Basis, usize), bool> = BTreeMap::new();
    let mut add = |from: usize, pat: InputPattern, out: Basis, to: usize| {
        *ops.entry((from, pat, out, to)).or_default() ^= true;
    };
    for op in &b.ops {
        // Rewrite target: g_{ρ₁} = ĝ_{ρ₁} + ρ₂₃ ĝ_{ρ₁₂₃}.
        add(op.from, op.pattern.clone(), op.out, op.to);
        if op.to == r1 {
            if let Some(c) = op.out.mul(Basis::R23) {
                add(op.from, op.pattern.clone(), c, r123);
            }
        }
        // Push the source correction: δ(ĝ_{ρ₁}) picks up ρ₂₃ · δ(g_{ρ₁₂₃}).
        if op.from == r123 {
            if let Some(c) = Basis::R23.mul(op.out) {
                add(r1, op.pattern.clone(), c, op.to);
                if op.to == r1 {
                    if let Some(cc) = c.mul(Basis::R23) {
                        add(r1, op.pattern.clone(), cc, r123);
                    }
                }
            }
        }
    }
    let ops = ops
        .into_iter()
        .filter(|&(_, p)| p)
        .map(|((from, pattern, out, to), _)| DAOp {
            from,
            pattern,
            out,
            to,
        })
        .collect();
    TypeDAModule::new(b.generators.clone(), ops)
}

/// The AZ bimodule (DD-derived, normalized).
pub fn az() -> TypeDAModule {
    derive_az_from_dd(&dd_identity()).expect("constant derivation cannot fail")
}

/// The conjugate AZ bimodule, derived by pairing the DD identity against
/// the linear-dual bimodule of the algebra: the generator named after `x`
/// stands for the dual basis element of `x`, the differential strips a chord
/// off the right (e ⊗ k_z whenever z·e = x, over the DD arrow set), and an
/// input b strips itself off the left (k_x ↦ k_w whenever b·w = x). Boxing
/// with the AZ bimodule on either side reduces to the identity bimodule.
pub fn conj_az() -> TypeDAModule {
    let find = |x: Basis| BASIS.iter().position(|&b| b == x).unwrap();
    let mut gens = Vec::new();
    for x in BASIS {
        gens.push(DAGen {
            name: x.token().into(),
            out: x.right_idem().complement(),
            inp: x.left_idem(),
        });
    }
    let mut ops = Vec::new();
    for x in BASIS {
        let gi = find(x);
        for e in [Basis::R1, Basis::R2, Basis::R3, Basis::R123] {
            for z in BASIS {
                if z.mul(e) == Some(x) {
                    ops.push(DAOp {
                        from: gi,
                        pattern: InputPattern::empty(),
                        out: e,
                        to: find(z),
                    });
                }
            }
        }
        for b in CHORDS {
            for w in BASIS {
                if b.mul(w) == Some(x) {
                    ops.push(DAOp {
                        from: gi,
                        pattern: InputPattern::literals(&[b]).unwrap(),
                        out: Basis::idem(x.right_idem().complement()),
                        to: find(w),
                    });
                }
            }
        }
    }
    TypeDAModule::new(gens, ops).expect("constant is well-formed")
}

/// The five-generator module the AZ ⊠ CFD(T_∞,ν) pairing reduces to.
pub fn az_model() -> TypeDModule {
    TypeDModule::from_named(
        vec![
            DGen::new("a", Idem::I1),
            DGen::new("b", Idem::I0),
            DGen::new("c", Idem::I1),
            DGen::new("d", Idem::I0),
            DGen::new("e", Idem::I1),
        ],
        &[
            ("b", Basis::R1, "a"),
            ("b", Basis::R3, "c"),
            ("c", Basis::R2, "d"),
            ("d", Basis::R1, "e"),
        ],
    )
    .expect("constant is well-formed")
}

/// All seven built-in bordered constants.
#[derive(Clone, Debug)]
pub struct Builtins {
    pub az: TypeDAModule,
    pub conj_az: TypeDAModule,
    pub identity: TypeDAModule,
    pub dd: DDData,
    pub cfa_t0: TypeAModule,
    pub cfd_t0: TypeDModule,
    pub cfd_tinf_nu: TypeDModule,
}

impl Builtins {
    pub fn shipped() -> Builtins {
        Builtins {
            az: az(),
            conj_az: conj_az(),
            identity: identity_da(),
            dd: dd_identity(),
            cfa_t0: cfa_t0(),
            cfd_t0: cfd_t0(),
            cfd_tinf_nu: cfd_tinf_nu(),
        }
    }
}

/// One line of a validation report.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub subject: String,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of `validate_builtins`.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub lines: Vec<CheckLine>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn summary(&self) -> String {
        if self.all_pass() {
            "7 constants, all checks pass".to_string()
        } else {
            let failed: Vec<&CheckLine> = self.lines.iter().filter(|l| !l.pass).collect();
            format!(
                "{} check(s) failed, first: {} / {}: {}",
                failed.len(),
                failed[0].subject,
                failed[0].check,
                failed[0].detail
            )
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(
                f,
                "[{}] {:<14} {}{}",
                if l.pass { "pass" } else { "FAIL" },
                l.subject,
                l.check,
                if l.detail.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", l.detail)
                }
            )?;
        }
        write!(f, "{}", self.summary())
    }
}

/// Validates the shipped constants: structure equations for every constant,
/// the AZ derivation from the DD data, invertibility against the conjugate,
/// the five-generator pairing model, and the two morphism-space pairings
/// that pin the idempotent conventions.
pub fn validate_builtins(b: &Builtins, config: &Config) -> Result<ValidationReport, HfError> {
    let mut lines = Vec::new();
    let mut push = |subject: &str, check: &str, pass: bool, detail: String| {
        lines.push(CheckLine {
            subject: subject.into(),
            check: check.into(),
            pass,
            detail,
        });
    };
    let cap = 6;

    let r = b.dd.check_structure();
    push("dd-identity", "structure equation", r.is_ok(), err_detail(&r));

    let r = b.az.check_structure(cap);
    push("az", "DA structure equation", r.is_ok(), err_detail(&r));
    let derived = derive_az_from_dd(&b.dd)?;
    push(
        "az",
        "derivation from DD data",
        derived == b.az,
        String::new(),
    );

    let r = b.conj_az.check_structure(cap);
    push("conj-az", "DA structure equation", r.is_ok(), err_detail(&r));

    let r = b.identity.check_structure(cap);
    push("identity", "DA structure equation", r.is_ok(), err_detail(&r));
    let id_id = box_da_da(&b.identity, &b.identity, config)?;
    push(
        "identity",
        "identity ⊠ identity = identity",
        da_iso_by_renaming(&id_id, &b.identity),
        String::new(),
    );

    let conj_box_az = box_da_da(&b.conj_az, &b.az, config)?;
    let reduced = da_reduce(&conj_box_az)?;
    push(
        "conj-az",
        "conjAZ ⊠ AZ ≃ identity",
        da_iso_by_renaming(&reduced, &b.identity),
        format!("reduced to {} generators", reduced.generators.len()),
    );
    let az_box_id = box_da_da(&b.az, &b.identity, config)?;
    push(
        "az",
        "AZ ⊠ identity = AZ",
        da_iso_by_renaming(&az_box_id, &b.az),
        String::new(),
    );

    let r = b.cfa_t0.check_relations(cap);
    push("cfa-t0", "A-infinity relations", r.is_ok(), err_detail(&r));

    let r = b.cfd_t0.check_structure();
    push(
        "cfd-t0",
        "structure equation",
        r.is_ok(),
        r.err().map(|e| e.to_string()).unwrap_or_default(),
    );
    let r = b.cfd_tinf_nu.check_structure();
    push(
        "cfd-tinf-nu",
        "structure equation",
        r.is_ok(),
        r.err().map(|e| e.to_string()).unwrap_or_default(),
    );

    // Pairing facts.
    let product = box_da_d(&b.az, &b.cfd_tinf_nu, config)?;
    let rd = reduce(&product)?;
    let iso = iso_search(&rd.reduced, &az_model(), 12, config)?;
    push(
        "az",
        "AZ ⊠ CFD(T∞,ν) reduces to the five-generator model",
        iso.is_some(),
        format!("{} generators after reduction", rd.reduced.gen_count()),
    );

    let mor = MorComplex::new(&b.cfd_tinf_nu, &b.cfd_t0);
    let h = mor.homology()?;
    push(
        "cfd-tinf-nu",
        "Mor(CFD(T∞,ν), CFD(T₀)) has homology dimension 1",
        h.dim == 1,
        format!("dimension {}", h.dim),
    );
    let mor = MorComplex::new(&b.cfd_t0, &b.cfd_t0);
    let h = mor.homology()?;
    push(
        "cfd-t0",
        "Mor(CFD(T₀), CFD(T₀)) has homology dimension 2",
        h.dim == 2,
        format!("dimension {}", h.dim),
    );

    let paired = box_a_d(&b.cfa_t0, &b.cfd_tinf_nu, config)?;
    let dim = paired.homology_dim()?;
    push(
        "cfa-t0",
        "CFA(T₀) ⊠ CFD(T∞,ν) has homology dimension 1",
        dim == 1,
        format!("dimension {dim}"),
    );

    Ok(ValidationReport { lines })
}

fn err_detail(r: &Result<(), HfError>) -> String {
    r.as_ref().err().map(|e| e.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Data directory: embedded defaults, overrides, checksum manifest
// ---------------------------------------------------------------------------

pub const DATA_FILES: [&str; 12] = [
    "az.json",
    "conj_az.json",
    "identity_da.json",
    "dd_identity.json",
    "cfa_t0.json",
    "cfd_t0.json",
    "cfd_tinf_nu.json",
    "cfk_unknot.json",
    "cfk_unknot_free.json",
    "cfk_trefoil_lh.json",
    "cfk_figure8.json",
    "cfk_l2.json",
];

macro_rules! embedded {
    ($name:literal) => {
        ($name, include_str!(concat!("../data/", $name)))
    };
}

pub const EMBEDDED_DATA: [(&str, &str); 13] = [
    embedded!("az.json"),
    embedded!("conj_az.json"),
    embedded!("identity_da.json"),
    embedded!("dd_identity.json"),
    embedded!("cfa_t0.json"),
    embedded!("cfd_t0.json"),
    embedded!("cfd_tinf_nu.json"),
    embedded!("cfk_unknot.json"),
    embedded!("cfk_unknot_free.json"),
    embedded!("cfk_trefoil_lh.json"),
    embedded!("cfk_figure8.json"),
    embedded!("cfk_l2.json"),
    embedded!("manifest.json"),
];

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a named data file from the data directory (when set) or the
/// embedded copies, verifying its checksum against the manifest.
pub fn load_data_file(dir: Option<&Path>, name: &str) -> Result<String, HfError> {
    let read = |file: &str| -> Result<String, HfError> {
        match dir {
            Some(d) => std::fs::read_to_string(d.join(file))
                .map_err(|e| HfError::Format(format!("cannot read {file}: {e}"))),
            None => EMBEDDED_DATA
                .iter()
                .find(|(n, _)| *n == file)
                .map(|(_, s)| s.to_string())
                .ok_or_else(|| HfError::Format(format!("unknown data file {file}"))),
        }
    };
    let manifest = read("manifest.json")?;
    let manifest: BTreeMap<String, String> = serde_json::from_str(&manifest)?;
    let content = read(name)?;
    match manifest.get(name) {
        None => Err(HfError::Format(format!("{name} is not in the manifest"))),
        Some(expect) if *expect != sha256_hex(&content) => Err(HfError::Format(format!(
            "checksum mismatch for {name}"
        ))),
        Some(_) => Ok(content),
    }
}

/// Loads the seven bordered constants from the data directory (or the
/// embedded copies).
pub fn load_builtins(dir: Option<&Path>) -> Result<Builtins, HfError> {
    Ok(Builtins {
        az: TypeDAModule::from_json(&load_data_file(dir, "az.json")?)?,
        conj_az: TypeDAModule::from_json(&load_data_file(dir, "conj_az.json")?)?,
        identity: TypeDAModule::from_json(&load_data_file(dir, "identity_da.json")?)?,
        dd: dd_from_json(&load_data_file(dir, "dd_identity.json")?)?,
        cfa_t0: TypeAModule::from_json(&load_data_file(dir, "cfa_t0.json")?)?,
        cfd_t0: TypeDModule::from_json(&load_data_file(dir, "cfd_t0.json")?)?,
        cfd_tinf_nu: TypeDModule::from_json(&load_data_file(dir, "cfd_tinf_nu.json")?)?,
    })
}

#[derive(serde::Serialize, serde::Deserialize)]
struct DDGenDoc {
    name: String,
    idem1: String,
    idem2: String,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct DDArrowDoc {
    from: String,
    coef1: String,
    coef2: String,
    to: String,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct DDDoc {
    kind: String,
    generators: Vec<DDGenDoc>,
    delta: Vec<DDArrowDoc>,
}

pub fn dd_to_json(dd: &DDData) -> String {
    let doc = DDDoc {
        kind: "typeDD".into(),
        generators: dd
            .generators
            .iter()
            .map(|(n, i1, i2)| DDGenDoc {
                name: n.clone(),
                idem1: i1.token().into(),
                idem2: i2.token().into(),
            })
            .collect(),
        delta: dd
            .delta
            .iter()
            .map(|&(f, c1, c2, t)| DDArrowDoc {
                from: dd.generators[f].0.clone(),
                coef1: c1.token().into(),
                coef2: c2.token().into(),
                to: dd.generators[t].0.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

pub fn dd_from_json(text: &str) -> Result<DDData, HfError> {
    let doc: DDDoc = serde_json::from_str(text)?;
    if doc.kind != "typeDD" {
        return Err(HfError::Format(format!(
            "expected kind \"typeDD\", found {:?}",
            doc.kind
        )));
    }
    let idem = |t: &str| -> Result<Idem, HfError> {
        match t {
            "i0" => Ok(Idem::I0),
            "i1" => Ok(Idem::I1),
            o => Err(HfError::Format(format!("unknown idempotent {o:?}"))),
        }
    };
    let generators: Vec<(String, Idem, Idem)> = doc
        .generators
        .iter()
        .map(|g| Ok((g.name.clone(), idem(&g.idem1)?, idem(&g.idem2)?)))
        .collect::<Result<_, HfError>>()?;
    let index: BTreeMap<&str, usize> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.0.as_str(), i))
        .collect();
    let mut delta = Vec::new();
    for a in &doc.delta {
        let &f = index
            .get(a.from.as_str())
            .ok_or_else(|| HfError::Format(format!("unknown generator {:?}", a.from)))?;
        let &t = index
            .get(a.to.as_str())
            .ok_or_else(|| HfError::Format(format!("unknown generator {:?}", a.to)))?;
        delta.push((f, Basis::from_token(&a.coef1)?, Basis::from_token(&a.coef2)?, t));
    }
    Ok(DDData { generators, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn az_structure_equation_holds() {
        az().check_structure(6).unwrap();
    }

    #[test]
    fn az_pairs_with_tinf_to_the_model_on_the_nose() {
        let cfg = Config::default();
        let product = box_da_d(&az(), &cfd_tinf_nu(), &cfg).unwrap();
        assert_eq!(product.gen_count(), 5);
        assert!(product.is_reduced());
        let iso = iso_search(&product, &az_model(), 12, &cfg).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn conj_az_structure_equation_holds() {
        conj_az().check_structure(6).unwrap();
    }

    #[test]
    fn conj_az_inverts_az() {
        let cfg = Config::default();
        let prod = box_da_da(&conj_az(), &az(), &cfg).unwrap();
        prod.check_structure(5).unwrap();
        let red = da_reduce(&prod).unwrap();
        assert!(
            da_iso_by_renaming(&red, &identity_da()),
            "reduced conjAZ ⊠ AZ has {} generators and {} ops",
            red.generators.len(),
            red.ops.len()
        );
    }

    #[test]
    fn az_inverts_conj_az() {
        let cfg = Config::default();
        let prod = box_da_da(&az(), &conj_az(), &cfg).unwrap();
        let red = da_reduce(&prod).unwrap();
        assert!(da_iso_by_renaming(&red, &identity_da()));
    }

    #[test]
    fn validate_builtins_passes() {
        let report = validate_builtins(&Builtins::shipped(), &Config::default()).unwrap();
        assert!(report.all_pass(), "{report}");
        assert_eq!(report.summary(), "7 constants, all checks pass");
    }

    #[test]
    fn corrupting_az_fails_validation() {
        let mut b = Builtins::shipped();
        // Drop one operation: the structure equation or a pairing must break.
        b.az.ops.pop();
        let report = validate_builtins(&b, &Config::default()).unwrap();
        assert!(!report.all_pass());
    }

    #[test]
    fn identity_bimodule_in_place_of_az_fails_the_model_check() {
        let mut b = Builtins::shipped();
        b.az = identity_da();
        let report = validate_builtins(&b, &Config::default()).unwrap();
        let line = report
            .lines
            .iter()
            .find(|l| l.check.contains("five-generator"))
            .unwrap();
        assert!(!line.pass);
    }
}

#[cfg(test)]
mod data_tests {
    use super::*;

    #[test]
    fn embedded_data_matches_constructors() {
        let loaded = load_builtins(None).unwrap();
        let shipped = Builtins::shipped();
        assert_eq!(loaded.az, shipped.az);
        assert_eq!(loaded.conj_az, shipped.conj_az);
        assert_eq!(loaded.identity, shipped.identity);
        assert_eq!(loaded.dd, shipped.dd);
        assert_eq!(loaded.cfa_t0, shipped.cfa_t0);
        assert_eq!(loaded.cfd_t0, shipped.cfd_t0);
        assert_eq!(loaded.cfd_tinf_nu, shipped.cfd_tinf_nu);
    }

    #[test]
    fn checksums_cover_every_data_file() {
        for name in DATA_FILES {
            load_data_file(None, name).unwrap();
        }
    }

    #[test]
    fn tampered_data_is_rejected() {
        let dir = std::env::temp_dir().join("hfbord-tamper-test");
        std::fs::create_dir_all(&dir).unwrap();
        for (name, content) in EMBEDDED_DATA {
            std::fs::write(dir.join(name), content).unwrap();
        }
        std::fs::write(dir.join("cfd_t0.json"), "{\"kind\":\"typeD\",\"generators\":[],\"delta\":[]}\n").unwrap();
        let err = load_data_file(Some(&dir), "cfd_t0.json").unwrap_err();
        assert!(err.to_string().contains("checksum"));
    }
}
