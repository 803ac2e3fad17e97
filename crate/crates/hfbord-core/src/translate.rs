//! Translation from a reduced R-coefficient knot Floer complex to the type-D
//! module of the 0-framed knot complement.
//!
//! Generators in the ι₀ idempotent correspond to the complex's generators;
//! every vertical (V-power) arrow contributes a chain of ι₁ generators with
//! the ρ₁ / ρ₂₃ / ρ₁₂₃ pattern, every horizontal (U-power) arrow one with
//! the ρ₃ / ρ₂₃ / ρ₂ pattern, and a single unstable chain joins the vertical
//! and horizontal homology generators, its shape governed by the sign of 2τ:
//!
//!   τ < 0:  ξ₀ --ρ₁--> z₁ <--ρ₂₃-- ⋯ <--ρ₂₃-- z_m <--ρ₃-- η₀,
//!   τ = 0:  ξ₀ --ρ₁₂--> η₀,
//!   τ > 0:  ξ₀ --ρ₁₂₃--> z₁ --ρ₂₃--> ⋯ --ρ₂₃--> z_m --ρ₂--> η₀,
//!
//! with m = |2τ|. Only the 0-framing is supported.

use std::collections::BTreeMap;

use crate::algebra::{Basis, Idem};
use crate::cfk::{CFKComplex, Ring};
use crate::error::HfError;
use crate::typed::{DGen, TypeDModule};

/// Result of the translation, with the generator correspondence.
#[derive(Clone, Debug)]
pub struct Translation {
    pub module: TypeDModule,
    /// Complex generator name → ι₀ generator name.
    pub correspondence: BTreeMap<String, String>,
    pub tau: i64,
}

fn require_reduced_pure(c: &CFKComplex) -> Result<(), HfError> {
    if c.ring != Ring::R {
        return Err(HfError::Invalid(
            "translation requires an R-coefficient complex".into(),
        ));
    }
    for a in &c.delta {
        if a.u == 0 && a.v == 0 {
            return Err(HfError::Invalid(format!(
                "complex is not reduced: coefficient-1 arrow out of {}",
                c.generators[a.from].name
            )));
        }
        if a.u > 0 && a.v > 0 {
            return Err(HfError::Invalid(format!(
                "mixed-power arrow out of {}",
                c.generators[a.from].name
            )));
        }
    }
    Ok(())
}

/// The unique generator with no vertical (resp. horizontal) arrows attached;
/// for a simplified basis this generates the localized homology.
fn distinguished_generator(c: &CFKComplex, vertical: bool) -> Result<usize, HfError> {
    let side = if vertical { "vertical" } else { "horizontal" };
    let touched: Vec<usize> = c
        .delta
        .iter()
        .filter(|a| if vertical { a.v > 0 } else { a.u > 0 })
        .flat_map(|a| [a.from, a.to])
        .collect();
    let clean: Vec<usize> = (0..c.generators.len())
        .filter(|i| !touched.contains(i))
        .collect();
    match clean.as_slice() {
        [only] => Ok(*only),
        [] => Err(HfError::Invalid(format!(
            "{side} homology is not 1-dimensional on this basis"
        ))),
        _ => Err(HfError::Invalid(format!(
            "{side} homology has several chain-free generators; simplify the basis first"
        ))),
    }
}

/// τ from the Alexander gradings of the two distinguished generators,
/// normalized so any overall grading shift cancels.
pub fn default_tau(c: &CFKComplex) -> Result<i64, HfError> {
    require_reduced_pure(c)?;
    let xi = distinguished_generator(c, true)?;
    let eta = distinguished_generator(c, false)?;
    let av = c.generators[xi].alexander;
    let ah = c.generators[eta].alexander;
    if (ah - av) % 2 != 0 {
        return Err(HfError::Invalid(
            "distinguished generators have Alexander gradings of different parity".into(),
        ));
    }
    Ok((ah - av) / 2)
}

/// Translates a reduced pure-arrow complex into the type-D module of the
/// 0-framed complement, for the given τ.
pub fn translate(c: &CFKComplex, tau: i64, framing: i64) -> Result<Translation, HfError> {
    if framing != 0 {
        return Err(HfError::Invalid(
            "only the 0-framing is implemented".into(),
        ));
    }
    require_reduced_pure(c)?;
    let xi = distinguished_generator(c, true)?;
    let eta = distinguished_generator(c, false)?;

    let mut gens: Vec<DGen> = Vec::new();
    let mut correspondence = BTreeMap::new();
    for g in &c.generators {
        correspondence.insert(g.name.clone(), g.name.clone());
        gens.push(DGen::new(g.name.clone(), Idem::I0));
    }
    let mut arrows: Vec<(String, Basis, String)> = Vec::new();

    for (ai, a) in c.delta.iter().enumerate() {
        let from = c.generators[a.from].name.clone();
        let to = c.generators[a.to].name.clone();
        if a.v > 0 {
            // Vertical chain of length v.
            let len = a.v as usize;
            let names: Vec<String> = (1..=len).map(|i| format!("v{ai}.{i}")).collect();
            for n in &names {
                gens.push(DGen::new(n.clone(), Idem::I1));
            }
            arrows.push((from, Basis::R1, names[0].clone()));
            for i in 0..len - 1 {
                arrows.push((names[i + 1].clone(), Basis::R23, names[i].clone()));
            }
            arrows.push((to, Basis::R123, names[len - 1].clone()));
        } else {
            // Horizontal chain of length u.
            let len = a.u as usize;
            let names: Vec<String> = (1..=len).map(|i| format!("h{ai}.{i}")).collect();
            for n in &names {
                gens.push(DGen::new(n.clone(), Idem::I1));
            }
            arrows.push((from, Basis::R3, names[0].clone()));
            for i in 0..len - 1 {
                arrows.push((names[i].clone(), Basis::R23, names[i + 1].clone()));
            }
            arrows.push((names[len - 1].clone(), Basis::R2, to));
        }
    }

    let xi_name = c.generators[xi].name.clone();
    let eta_name = c.generators[eta].name.clone();
    match tau.cmp(&0) {
        std::cmp::Ordering::Equal => {
            arrows.push((xi_name, Basis::R12, eta_name));
        }
        std::cmp::Ordering::Less => {
            let m = (-2 * tau) as usize;
            let names: Vec<String> = (1..=m).map(|i| format!("u.{i}")).collect();
            for n in &names {
                gens.push(DGen::new(n.clone(), Idem::I1));
            }
            arrows.push((xi_name, Basis::R1, names[0].clone()));
            for i in 0..m - 1 {
                arrows.push((names[i + 1].clone(), Basis::R23, names[i].clone()));
            }
            arrows.push((eta_name, Basis::R3, names[m - 1].clone()));
        }
        std::cmp::Ordering::Greater => {
            let m = (2 * tau) as usize;
            let names: Vec<String> = (1..=m).map(|i| format!("u.{i}")).collect();
            for n in &names {
                gens.push(DGen::new(n.clone(), Idem::I1));
            }
            arrows.push((xi_name, Basis::R123, names[0].clone()));
            for i in 0..m - 1 {
                arrows.push((names[i].clone(), Basis::R23, names[i + 1].clone()));
            }
            arrows.push((names[m - 1].clone(), Basis::R2, eta_name));
        }
    }

    let arrow_refs: Vec<(&str, Basis, &str)> = arrows
        .iter()
        .map(|(f, b, t)| (f.as_str(), *b, t.as_str()))
        .collect();
    let module = TypeDModule::from_named(gens, &arrow_refs)?;
    module
        .check_structure()
        .map_err(|v| HfError::Invalid(format!("translated module is invalid: {v}")))?;
    // Cross-check the idempotent assignment by constraint propagation.
    let names: Vec<String> = module
        .generators()
        .iter()
        .map(|g| g.name.clone())
        .collect();
    let named_arrows: Vec<(String, Basis, String)> = module
        .arrows()
        .iter()
        .map(|a| {
            (
                module.generators()[a.from].name.clone(),
                a.coef,
                module.generators()[a.to].name.clone(),
            )
        })
        .collect();
    let inferred = crate::typed::infer_idempotents(&names, &named_arrows, Some(Idem::I0))?;
    for g in module.generators() {
        if inferred[&g.name] != g.idem {
            return Err(HfError::Invalid(format!(
                "idempotent inference disagrees at {}",
                g.name
            )));
        }
    }
    Ok(Translation {
        module,
        correspondence,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{cfd_t0, cfd_tinf_nu};
    use crate::cfk;
    use crate::config::Config;
    use crate::typed::{iso_search, MorComplex};

    #[test]
    fn tau_values() {
        assert_eq!(default_tau(&cfk::unknot().0).unwrap(), 0);
        assert_eq!(default_tau(&cfk::trefoil_lh().0).unwrap(), -1);
        assert_eq!(default_tau(&cfk::figure8().0).unwrap(), 0);
        let (d, _) = cfk::dual(&cfk::trefoil_lh().0, None).unwrap();
        assert_eq!(default_tau(&d).unwrap(), 1);
    }

    #[test]
    fn unknot_gives_zero_framed_solid_torus() {
        let t = translate(&cfk::unknot().0, 0, 0).unwrap();
        assert_eq!(t.module.gen_count(), 1);
        let iso = iso_search(&t.module, &cfd_t0(), 12, &Config::default()).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn trefoil_gives_the_seven_generator_module() {
        let t = translate(&cfk::trefoil_lh().0, -1, 0).unwrap();
        assert_eq!(t.module.gen_count(), 7);
        let iso = iso_search(
            &t.module,
            &crate::typed::tests::trefoil_lh(),
            12,
            &Config::default(),
        )
        .unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn figure8_gives_the_nine_generator_module() {
        let t = translate(&cfk::figure8().0, 0, 0).unwrap();
        assert_eq!(t.module.gen_count(), 9);
        let iso = iso_search(
            &t.module,
            &crate::typed::tests::figure8(),
            12,
            &Config::default(),
        )
        .unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn mirror_trefoil_translates_with_positive_tau() {
        let (d, _) = cfk::dual(&cfk::trefoil_lh().0, None).unwrap();
        let t = translate(&d, 1, 0).unwrap();
        assert_eq!(t.module.gen_count(), 7);
        // Pairing with the ∞-framed solid torus recovers the hat homology
        // dimension.
        let mor = MorComplex::new(&cfd_tinf_nu(), &t.module);
        assert_eq!(mor.homology().unwrap().dim, 3);
    }

    #[test]
    fn pairing_dimension_matches_hat_homology() {
        for (c, _) in [cfk::unknot(), cfk::trefoil_lh(), cfk::figure8()] {
            let tau = default_tau(&c).unwrap();
            let t = translate(&c, tau, 0).unwrap();
            let mor = MorComplex::new(&cfd_tinf_nu(), &t.module);
            let hat = cfk::hat_truncate(&c, None).unwrap();
            assert_eq!(mor.homology().unwrap().dim, hat.homology_dim);
        }
    }

    #[test]
    fn opposite_translations_pair_nontrivially() {
        let (tref, _) = cfk::trefoil_lh();
        let (mirror, _) = cfk::dual(&tref, None).unwrap();
        let m1 = translate(&tref, -1, 0).unwrap().module;
        let m2 = translate(&mirror, 1, 0).unwrap().module;
        assert!(MorComplex::new(&m1, &m2).homology().unwrap().dim > 0);
        assert!(MorComplex::new(&m2, &m1).homology().unwrap().dim > 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(translate(&cfk::unknot().0, 0, 1).is_err());
        // Not reduced: a coefficient-1 arrow.
        let c = CFKComplex::from_named(
            Ring::R,
            vec![("p", 0, 0), ("q", -1, 0)],
            &[("q", 0, 0, "p")],
        )
        .unwrap();
        assert!(translate(&c, 0, 0).is_err());
        // UV-ring input.
        assert!(translate(&cfk::unknot_free_basepoint().0, 0, 0).is_err());
    }
}
