//! Regenerates the shipped data files from the library constructors.
//! Run manually: cargo test -p hfbord-core --test regen_data -- --ignored

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use hfbord_core::builtins::{self, sha256_hex};
use hfbord_core::cfk;

#[test]
#[ignore]
fn regen_data() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let b = builtins::Builtins::shipped();
    let files: Vec<(&str, String)> = vec![
        ("az.json", b.az.to_json()),
        ("conj_az.json", b.conj_az.to_json()),
        ("identity_da.json", b.identity.to_json()),
        ("dd_identity.json", builtins::dd_to_json(&b.dd)),
        ("cfa_t0.json", b.cfa_t0.to_json()),
        ("cfd_t0.json", b.cfd_t0.to_json()),
        ("cfd_tinf_nu.json", b.cfd_tinf_nu.to_json()),
        (
            "cfk_unknot.json",
            cfk::to_json(&cfk::unknot().0, Some(&cfk::unknot().1)),
        ),
        (
            "cfk_unknot_free.json",
            cfk::to_json(&cfk::unknot_free_basepoint().0, Some(&cfk::unknot_free_basepoint().1)),
        ),
        (
            "cfk_trefoil_lh.json",
            cfk::to_json(&cfk::trefoil_lh().0, Some(&cfk::trefoil_lh().1)),
        ),
        (
            "cfk_figure8.json",
            cfk::to_json(&cfk::figure8().0, Some(&cfk::figure8().1)),
        ),
        ("cfk_l2.json", cfk::to_json(&cfk::l2_link(), None)),
    ];
    let mut manifest: BTreeMap<String, String> = BTreeMap::new();
    for (name, content) in &files {
        fs::write(dir.join(name), content).unwrap();
        manifest.insert(name.to_string(), sha256_hex(content));
    }
    let mut m = serde_json::to_string_pretty(&manifest).unwrap();
    m.push('\n');
    fs::write(dir.join("manifest.json"), m).unwrap();
}
