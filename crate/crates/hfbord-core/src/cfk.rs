//! Knot Floer chain complexes over F2[U,V] and over R = F2[U,V]/(UV).
//!
//! Complexes carry a Maslov/Alexander bigrading in which U acts by (−2,−1)
//! and V by (0,1), and the differential drops Maslov by one. Skew maps (the
//! knot involution and anything composed with it) intertwine U and V; the
//! composition rules below track that exchange on monomial coefficients, so
//! skew-equivariance is built into the bookkeeping rather than checked after
//! the fact.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::HfError;
use crate::f2::{self, BitMatrix, BitVec};

/// Coefficient ring selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    /// F2[U,V]
    #[serde(rename = "UV")]
    UV,
    /// F2[U,V]/(UV)
    #[serde(rename = "R")]
    R,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfkGen {
    pub name: String,
    pub maslov: i64,
    pub alexander: i64,
}

/// One monomial-coefficient arrow U^u V^v between generator indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CfkArrow {
    pub from: usize,
    pub u: u32,
    pub v: u32,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFKComplex {
    pub ring: Ring,
    pub generators: Vec<CfkGen>,
    pub delta: Vec<CfkArrow>,
}

/// A module map stored entrywise; `skew` maps intertwine U and V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfkMap {
    pub skew: bool,
    pub entries: Vec<CfkArrow>,
}

/// Skew-involution data for a complex (a skew map under the hood).
pub type SkewInvolution = CfkMap;

fn normalize(ring: Ring, arrows: Vec<CfkArrow>) -> Vec<CfkArrow> {
    let mut sorted: Vec<CfkArrow> = arrows
        .into_iter()
        .filter(|a| !(ring == Ring::R && a.u > 0 && a.v > 0))
        .collect();
    sorted.sort();
    let mut out: Vec<CfkArrow> = Vec::with_capacity(sorted.len());
    for a in sorted {
        if out.last() == Some(&a) {
            out.pop();
        } else {
            out.push(a);
        }
    }
    out
}

impl CFKComplex {
    pub fn new(
        ring: Ring,
        generators: Vec<CfkGen>,
        delta: Vec<CfkArrow>,
    ) -> Result<Self, HfError> {
        let mut names = BTreeSet::new();
        for g in &generators {
            if !names.insert(&g.name) {
                return Err(HfError::Invalid(format!("duplicate generator {}", g.name)));
            }
        }
        for a in &delta {
            if a.from >= generators.len() || a.to >= generators.len() {
                return Err(HfError::Invalid("arrow endpoint out of range".into()));
            }
            if ring == Ring::R && a.u > 0 && a.v > 0 {
                return Err(HfError::Invalid(
                    "mixed UV coefficient over the ring R".into(),
                ));
            }
        }
        Ok(CFKComplex {
            ring,
            generators,
            delta: normalize(ring, delta),
        })
    }

    pub fn from_named(
        ring: Ring,
        generators: Vec<(&str, i64, i64)>,
        arrows: &[(&str, u32, u32, &str)],
    ) -> Result<Self, HfError> {
        let gens: Vec<CfkGen> = generators
            .iter()
            .map(|&(n, m, a)| CfkGen {
                name: n.into(),
                maslov: m,
                alexander: a,
            })
            .collect();
        let index: BTreeMap<&str, usize> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect();
        let mut delta = Vec::new();
        for &(from, u, v, to) in arrows {
            delta.push(CfkArrow {
                from: *index
                    .get(from)
                    .ok_or_else(|| HfError::Invalid(format!("unknown generator {from}")))?,
                u,
                v,
                to: *index
                    .get(to)
                    .ok_or_else(|| HfError::Invalid(format!("unknown generator {to}")))?,
            });
        }
        Self::new(ring, gens, delta)
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn differential_map(&self) -> CfkMap {
        CfkMap {
            skew: false,
            entries: self.delta.clone(),
        }
    }

    /// Verifies ∂² = 0 and the grading law, naming the first violation.
    pub fn check(&self) -> Result<(), HfError> {
        for a in &self.delta {
            let (f, t) = (&self.generators[a.from], &self.generators[a.to]);
            let maslov_ok = t.maslov - 2 * a.u as i64 == f.maslov - 1;
            let alex_ok = t.alexander - a.u as i64 + a.v as i64 == f.alexander;
            if !maslov_ok || !alex_ok {
                return Err(HfError::Invalid(format!(
                    "grading law fails on arrow {} --U^{}V^{}--> {}",
                    f.name, a.u, a.v, t.name
                )));
            }
        }
        let d = self.differential_map();
        let dd = compose(self.ring, &d, &d);
        if let Some(bad) = dd.entries.first() {
            return Err(HfError::NotAComplex(format!(
                "∂² contains U^{}V^{} {} from {}",
                bad.u, bad.v, self.generators[bad.to].name, self.generators[bad.from].name
            )));
        }
        Ok(())
    }

    pub fn identity_map(&self) -> CfkMap {
        CfkMap {
            skew: false,
            entries: (0..self.generators.len())
                .map(|i| CfkArrow {
                    from: i,
                    u: 0,
                    v: 0,
                    to: i,
                })
                .collect(),
        }
    }
}

/// Composition `f ∘ g`; a skew outer map exchanges the U and V exponents of
/// everything that passes through it.
pub fn compose(ring: Ring, f: &CfkMap, g: &CfkMap) -> CfkMap {
    let mut entries = Vec::new();
    for eg in &g.entries {
        for ef in f.entries.iter().filter(|ef| ef.from == eg.to) {
            let (gu, gv) = if f.skew { (eg.v, eg.u) } else { (eg.u, eg.v) };
            entries.push(CfkArrow {
                from: eg.from,
                u: gu + ef.u,
                v: gv + ef.v,
                to: ef.to,
            });
        }
    }
    CfkMap {
        skew: f.skew ^ g.skew,
        entries: normalize(ring, entries),
    }
}

pub fn add_maps(ring: Ring, f: &CfkMap, g: &CfkMap) -> Result<CfkMap, HfError> {
    if f.skew != g.skew {
        return Err(HfError::Invalid("sum of skew and non-skew maps".into()));
    }
    let mut entries = f.entries.clone();
    entries.extend_from_slice(&g.entries);
    Ok(CfkMap {
        skew: f.skew,
        entries: normalize(ring, entries),
    })
}

/// Formal derivatives of the differential: Φ strips one U, Ψ one V.
pub fn phi_psi(c: &CFKComplex) -> (CfkMap, CfkMap) {
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    for a in &c.delta {
        if a.u >= 1 {
            phi.push(CfkArrow {
                from: a.from,
                u: a.u - 1,
                v: a.v,
                to: a.to,
            });
        }
        if a.v >= 1 {
            psi.push(CfkArrow {
                from: a.from,
                u: a.u,
                v: a.v - 1,
                to: a.to,
            });
        }
    }
    (
        CfkMap {
            skew: false,
            entries: normalize(c.ring, phi),
        },
        CfkMap {
            skew: false,
            entries: normalize(c.ring, psi),
        },
    )
}

/// Solves ∂H + H∂ = rhs for a map H with the given skewness, with exponents
/// bounded by `cap`. Returns the witness or `None` when no witness exists
/// within the cap.
pub fn solve_homotopy(
    c: &CFKComplex,
    rhs: &CfkMap,
    cap: u32,
) -> Result<Option<CfkMap>, HfError> {
    let n = c.generators.len();
    // Unknown entries of H.
    let mut unknowns = Vec::new();
    for from in 0..n {
        for to in 0..n {
            for u in 0..=cap {
                for v in 0..=cap {
                    if c.ring == Ring::R && u > 0 && v > 0 {
                        continue;
                    }
                    unknowns.push(CfkArrow { from, u, v, to });
                }
            }
        }
    }
    let d = c.differential_map();
    // Row space: all entries reachable by composing an unknown with ∂.
    let mut row_index: BTreeMap<CfkArrow, usize> = BTreeMap::new();
    let rows_of = |m: &CfkMap, row_index: &mut BTreeMap<CfkArrow, usize>| -> Vec<usize> {
        m.entries
            .iter()
            .map(|&e| {
                let next = row_index.len();
                *row_index.entry(e).or_insert(next)
            })
            .collect()
    };
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(unknowns.len());
    for &e in &unknowns {
        let h = CfkMap {
            skew: rhs.skew,
            entries: vec![e],
        };
        let combo = add_maps(c.ring, &compose(c.ring, &d, &h), &compose(c.ring, &h, &d))?;
        cols.push(rows_of(&combo, &mut row_index));
    }
    let target = rows_of(rhs, &mut row_index);
    let mut m = BitMatrix::zero(row_index.len(), unknowns.len());
    for (col, rows) in cols.iter().enumerate() {
        for &r in rows {
            m.insert(r, col);
        }
    }
    let mut b = BitVec::zeros(row_index.len());
    for &r in &target {
        b.set(r, true);
    }
    Ok(m.solve(&b)?.map(|x| CfkMap {
        skew: rhs.skew,
        entries: normalize(c.ring, x.ones().map(|i| unknowns[i]).collect()),
    }))
}

/// Outcome of the three involution checks.
#[derive(Clone, Debug)]
pub struct InvolutionReport {
    pub chain_map: bool,
    pub square_witness: Option<CfkMap>,
    pub failure: Option<String>,
}

impl InvolutionReport {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that ι is a skew chain map and that ι² + (1 + ΦΨ) is
/// nullhomotopic (the witness is searched with exponents up to `cap`).
pub fn check_involution(
    c: &CFKComplex,
    iota: &SkewInvolution,
    cap: u32,
) -> Result<InvolutionReport, HfError> {
    if !iota.skew {
        return Ok(InvolutionReport {
            chain_map: false,
            square_witness: None,
            failure: Some("involution data is not marked skew".into()),
        });
    }
    let d = c.differential_map();
    let chain_map = compose(c.ring, iota, &d) == compose(c.ring, &d, iota);
    if !chain_map {
        return Ok(InvolutionReport {
            chain_map,
            square_witness: None,
            failure: Some("ι does not skew-commute with the differential".into()),
        });
    }
    let (phi, psi) = phi_psi(c);
    let mut rhs = compose(c.ring, iota, iota);
    rhs = add_maps(c.ring, &rhs, &c.identity_map())?;
    rhs = add_maps(c.ring, &rhs, &compose(c.ring, &phi, &psi))?;
    let witness = solve_homotopy(c, &rhs, cap)?;
    let failure = if witness.is_none() {
        Some("ι² + (1 + ΦΨ) is not nullhomotopic within the exponent cap".into())
    } else {
        None
    };
    Ok(InvolutionReport {
        chain_map,
        square_witness: witness,
        failure,
    })
}

/// The hat truncation: an F2 complex with graded homology and, when an
/// involution is supplied, the induced map on hat homology.
#[derive(Clone, Debug)]
pub struct HatData {
    /// Names of the generators (all of them survive truncation).
    pub basis: Vec<String>,
    pub bidegrees: Vec<(i64, i64)>,
    pub d: BitMatrix,
    pub homology_dim: usize,
    /// Bidegrees of the homology classes, in representative order.
    pub class_bidegrees: Vec<(i64, i64)>,
    /// Induced involution on homology, when requested.
    pub induced: Option<BitMatrix>,
}

pub fn hat_truncate(
    c: &CFKComplex,
    iota: Option<&SkewInvolution>,
) -> Result<HatData, HfError> {
    let n = c.generators.len();
    let mut d = BitMatrix::zero(n, n);
    for a in c.delta.iter().filter(|a| a.u == 0 && a.v == 0) {
        d.insert(a.to, a.from);
    }
    let h = f2::homology(&d, &d)?;
    let bidegree_of = |v: &BitVec| -> (i64, i64) {
        let mut it = v.ones();
        let first = it.next().expect("nonzero representative");
        (
            c.generators[first].maslov,
            c.generators[first].alexander,
        )
    };
    let class_bidegrees = h
        .representatives
        .vectors
        .iter()
        .map(bidegree_of)
        .collect();
    let induced = match iota {
        None => None,
        Some(iota) => {
            let mut m = BitMatrix::zero(n, n);
            for e in iota.entries.iter().filter(|e| e.u == 0 && e.v == 0) {
                m.insert(e.to, e.from);
            }
            let mut em = BitMatrix::zero(h.dim, h.dim);
            for (j, rep) in h.representatives.vectors.iter().enumerate() {
                let img = m.apply(rep);
                let coords = h.class_coords(&img);
                for i in coords.ones() {
                    em.insert(i, j);
                }
            }
            Some(em)
        }
    };
    Ok(HatData {
        basis: c.generators.iter().map(|g| g.name.clone()).collect(),
        bidegrees: c
            .generators
            .iter()
            .map(|g| (g.maslov, g.alexander))
            .collect(),
        d,
        homology_dim: h.dim,
        class_bidegrees,
        induced,
    })
}

/// Connected sum: tensor complex with added bigradings and the involution
/// (id + Φ₁ ⊗ Ψ₂) ∘ (ι₁ ⊗ ι₂).
pub fn connected_sum(
    c1: &CFKComplex,
    i1: &SkewInvolution,
    c2: &CFKComplex,
    i2: &SkewInvolution,
) -> Result<(CFKComplex, SkewInvolution), HfError> {
    if c1.ring != c2.ring {
        return Err(HfError::Invalid(
            "connected sum requires matching coefficient rings".into(),
        ));
    }
    let ring = c1.ring;
    let (n1, n2) = (c1.generators.len(), c2.generators.len());
    let pair = |i: usize, j: usize| i * n2 + j;
    let mut generators = Vec::new();
    for gi in &c1.generators {
        for gj in &c2.generators {
            generators.push(CfkGen {
                name: format!("{}|{}", gi.name, gj.name),
                maslov: gi.maslov + gj.maslov,
                alexander: gi.alexander + gj.alexander,
            });
        }
    }
    let mut delta = Vec::new();
    for a in &c1.delta {
        for j in 0..n2 {
            delta.push(CfkArrow {
                from: pair(a.from, j),
                u: a.u,
                v: a.v,
                to: pair(a.to, j),
            });
        }
    }
    for a in &c2.delta {
        for i in 0..n1 {
            delta.push(CfkArrow {
                from: pair(i, a.from),
                u: a.u,
                v: a.v,
                to: pair(i, a.to),
            });
        }
    }
    let sum = CFKComplex::new(ring, generators, delta)?;

    let tensor = |f: &CfkMap, g: &CfkMap, skew: bool| -> CfkMap {
        let mut entries = Vec::new();
        for ef in &f.entries {
            for eg in &g.entries {
                entries.push(CfkArrow {
                    from: pair(ef.from, eg.from),
                    u: ef.u + eg.u,
                    v: ef.v + eg.v,
                    to: pair(ef.to, eg.to),
                });
            }
        }
        CfkMap {
            skew,
            entries: normalize(ring, entries),
        }
    };
    let ii = tensor(i1, i2, true);
    let (phi1, _) = phi_psi(c1);
    let (_, psi2) = phi_psi(c2);
    let correction = tensor(&phi1, &psi2, false);
    let corrected = compose(
        ring,
        &add_maps(ring, &sum.identity_map(), &correction)?,
        &ii,
    );
    Ok((sum, corrected))
}

/// Mirror dual: arrows reversed, bigradings negated, involution transposed.
pub fn dual(
    c: &CFKComplex,
    iota: Option<&SkewInvolution>,
) -> Result<(CFKComplex, Option<SkewInvolution>), HfError> {
    let generators = c
        .generators
        .iter()
        .map(|g| CfkGen {
            name: g.name.clone(),
            maslov: -g.maslov,
            alexander: -g.alexander,
        })
        .collect();
    let delta = c
        .delta
        .iter()
        .map(|a| CfkArrow {
            from: a.to,
            u: a.u,
            v: a.v,
            to: a.from,
        })
        .collect();
    let dc = CFKComplex::new(c.ring, generators, delta)?;
    let di = iota.map(|i| CfkMap {
        skew: true,
        entries: normalize(
            c.ring,
            i.entries
                .iter()
                .map(|e| CfkArrow {
                    from: e.to,
                    u: e.v,
                    v: e.u,
                    to: e.from,
                })
                .collect(),
        ),
    });
    Ok((dc, di))
}

// ---------------------------------------------------------------------------
// Localized homology and local-map search
// ---------------------------------------------------------------------------

/// The homology of C with one variable killed and the other truncated at
/// U^cap (resp. V^cap), presented as a level-graded F2 complex. Level k
/// holds U^k · (generators).
struct TowerComplex {
    levels: u32,
    d: BitMatrix,
    n: usize,
}

impl TowerComplex {
    /// `use_u`: keep U-arrows (kill V) when true, else the V side.
    fn new(c: &CFKComplex, use_u: bool, cap: u32) -> TowerComplex {
        let n = c.generators.len();
        let levels = cap + 1;
        let dim = n * levels as usize;
        let mut d = BitMatrix::zero(dim, dim);
        for a in &c.delta {
            let (keep, exp) = if use_u { (a.v == 0, a.u) } else { (a.u == 0, a.v) };
            if !keep {
                continue;
            }
            for lvl in 0..levels {
                let target = lvl + exp;
                if target < levels {
                    d.insert(
                        a.to + n * target as usize,
                        a.from + n * lvl as usize,
                    );
                }
            }
        }
        TowerComplex { levels, d, n }
    }

    /// Lifts an element of the base (level zero) to the top level.
    fn top(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.n * self.levels as usize);
        for i in v.ones() {
            out.set(i + self.n * (self.levels as usize - 1), true);
        }
        out
    }

    fn homology(&self) -> Result<f2::Homology, HfError> {
        f2::homology(&self.d, &self.d)
    }
}

/// True when the class of U^cap·v (resp. V^cap·v) survives in the truncated
/// localized homology.
pub fn tower_class_nonzero(
    c: &CFKComplex,
    v: &BitVec,
    use_u: bool,
    cap: u32,
) -> Result<bool, HfError> {
    let t = TowerComplex::new(c, use_u, cap);
    let h = t.homology()?;
    let lifted = t.top(v);
    // The lift of a cycle stays a cycle: U^cap kills any incoming arrow of
    // positive exponent only beyond the truncation, so check explicitly.
    if !t.d.apply(&lifted).is_zero() {
        return Ok(false);
    }
    Ok(!h.is_boundary(&lifted))
}

/// Search direction for `local_map_search`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "to-trivial")]
    ToTrivial,
    #[serde(rename = "from-trivial")]
    FromTrivial,
}

/// Outcome of the ι-local map search.
#[derive(Clone, Debug)]
pub struct LocalSearchReport {
    pub direction: Direction,
    pub cap: u32,
    pub found: Option<CfkMap>,
    /// Candidates that were local but failed the ι-commutation test, with
    /// the obstructing discrepancy class, printed as element sums.
    pub obstructions: Vec<(String, String)>,
}

impl LocalSearchReport {
    pub fn none_at_cap(&self) -> bool {
        self.found.is_none()
    }
}

/// The trivial ι_K-complex over R: one generator at bidegree (0,0) with the
/// identity involution.
pub fn trivial_complex() -> (CFKComplex, SkewInvolution) {
    let c = CFKComplex::from_named(Ring::R, vec![("1", 0, 0)], &[]).expect("well-formed");
    let i = c.identity_map();
    (
        c,
        CfkMap {
            skew: true,
            entries: i.entries,
        },
    )
}

/// Exhaustive search for a bidegree-(0,0) chain map between `c` and the
/// trivial complex whose localizations are injective on homology (tested at
/// the exponent cap) and which commutes with the involutions up to homotopy.
pub fn local_map_search(
    c: &CFKComplex,
    iota: &SkewInvolution,
    direction: Direction,
    cap: u32,
) -> Result<LocalSearchReport, HfError> {
    if c.ring != Ring::R {
        return Err(HfError::Invalid("local map search requires the ring R".into()));
    }
    match direction {
        Direction::FromTrivial => from_trivial_search(c, iota, cap),
        Direction::ToTrivial => to_trivial_search(c, iota, cap),
    }
}

fn element_name(c: &CFKComplex, v: &BitVec) -> String {
    let names: Vec<&str> = v.ones().map(|i| c.generators[i].name.as_str()).collect();
    if names.is_empty() {
        "0".into()
    } else {
        names.join("+")
    }
}

fn from_trivial_search(
    c: &CFKComplex,
    iota: &SkewInvolution,
    cap: u32,
) -> Result<LocalSearchReport, HfError> {
    let n = c.generators.len();
    // A degree-(0,0) image of the trivial generator is an F2 combination of
    // bidegree-(0,0) generators (higher monomials cannot have bidegree zero:
    // U^aV^b g sits at (M−2a, A−a+b), and a > 0 forces M > 0 twice over).
    let eligible: Vec<usize> = (0..n)
        .filter(|&i| {
            let g = &c.generators[i];
            let m = g.maslov;
            let a = g.alexander;
            // solve (m - 2u, a - u + v) = (0, 0) with u = v = 0 only when
            // m = a = 0; monomials with u ≤ cap are checked too.
            (0..=cap).any(|u| m == 2 * u as i64 && {
                let v = u as i64 - a;
                (0..=cap as i64).contains(&v) && !(c.ring == Ring::R && u > 0 && v > 0)
            })
        })
        .collect();
    let mut obstructions = Vec::new();
    if eligible.len() > 20 {
        return Err(HfError::CapExceeded(
            "from-trivial search space too large".into(),
        ));
    }
    for mask in 1u64..(1u64 << eligible.len()) {
        // ξ = Σ chosen generators, as monomials U^{u_i}V^{v_i} g_i solving
        // the bidegree equation.
        let mut entries = Vec::new();
        let mut ok = true;
        for (t, &gi) in eligible.iter().enumerate() {
            if mask >> t & 1 == 0 {
                continue;
            }
            let g = &c.generators[gi];
            let u = g.maslov / 2;
            let v = u - g.alexander;
            if g.maslov % 2 != 0 || u < 0 || v < 0 || u > cap as i64 || v > cap as i64 {
                ok = false;
                break;
            }
            entries.push(CfkArrow {
                from: 0,
                u: u as u32,
                v: v as u32,
                to: gi,
            });
        }
        if !ok || entries.is_empty() {
            continue;
        }
        let f = CfkMap {
            skew: false,
            entries: normalize(c.ring, entries),
        };
        // Chain map: ∂ ∘ f = 0 (the trivial differential vanishes).
        let d = c.differential_map();
        if !compose(c.ring, &d, &f).entries.is_empty() {
            continue;
        }
        // Locality: the image class must generate both localized towers.
        let mut base = BitVec::zeros(n);
        for e in f.entries.iter().filter(|e| e.u == 0 && e.v == 0) {
            base.set(e.to, true);
        }
        if base.is_zero()
            || !tower_class_nonzero(c, &base, true, cap)?
            || !tower_class_nonzero(c, &base, false, cap)?
        {
            continue;
        }
        // ι-commutation: ι∘f + f∘ι_trivial must be nullhomotopic; with the
        // trivial involution the discrepancy is (ι + id) applied to ξ.
        let disc = add_maps(
            c.ring,
            &compose(c.ring, iota, &f),
            &CfkMap {
                skew: true,
                entries: f.entries.clone(),
            },
        )?;
        match solve_trivial_source_homotopy(c, &disc, cap)? {
            Some(_) => {
                return Ok(LocalSearchReport {
                    direction: Direction::FromTrivial,
                    cap,
                    found: Some(f),
                    obstructions,
                });
            }
            None => {
                let mut disc_base = BitVec::zeros(n);
                for e in disc.entries.iter().filter(|e| e.u == 0 && e.v == 0) {
                    disc_base.set(e.to, true);
                }
                obstructions.push((element_name(c, &base), element_name(c, &disc_base)));
            }
        }
    }
    Ok(LocalSearchReport {
        direction: Direction::FromTrivial,
        cap,
        found: None,
        obstructions,
    })
}

/// Solves ∂_C H = rhs for H from the trivial complex into C (the trivial
/// differential contributes nothing).
fn solve_trivial_source_homotopy(
    c: &CFKComplex,
    rhs: &CfkMap,
    cap: u32,
) -> Result<Option<CfkMap>, HfError> {
    let n = c.generators.len();
    let mut unknowns = Vec::new();
    for to in 0..n {
        for u in 0..=cap {
            for v in 0..=cap {
                if c.ring == Ring::R && u > 0 && v > 0 {
                    continue;
                }
                unknowns.push(CfkArrow { from: 0, u, v, to });
            }
        }
    }
    let d = c.differential_map();
    let mut row_index: BTreeMap<CfkArrow, usize> = BTreeMap::new();
    let intern = |e: CfkArrow, row_index: &mut BTreeMap<CfkArrow, usize>| {
        let next = row_index.len();
        *row_index.entry(e).or_insert(next)
    };
    let mut cols = Vec::new();
    for &e in &unknowns {
        let h = CfkMap {
            skew: rhs.skew,
            entries: vec![e],
        };
        let img = compose(c.ring, &d, &h);
        cols.push(
            img.entries
                .iter()
                .map(|&e| intern(e, &mut row_index))
                .collect::<Vec<_>>(),
        );
    }
    let rows_rhs: Vec<usize> = rhs
        .entries
        .iter()
        .map(|&e| intern(e, &mut row_index))
        .collect();
    let mut m = BitMatrix::zero(row_index.len(), unknowns.len());
    for (col, rows) in cols.iter().enumerate() {
        for &r in rows {
            m.insert(r, col);
        }
    }
    let mut b = BitVec::zeros(row_index.len());
    for &r in &rows_rhs {
        b.set(r, true);
    }
    Ok(m.solve(&b)?.map(|x| CfkMap {
        skew: rhs.skew,
        entries: normalize(c.ring, x.ones().map(|i| unknowns[i]).collect()),
    }))
}

fn to_trivial_search(
    c: &CFKComplex,
    iota: &SkewInvolution,
    cap: u32,
) -> Result<LocalSearchReport, HfError> {
    // f(g) = U^a V^b with (−2a, b−a) = (M(g), A(g)); at most one monomial
    // per generator.
    let mut slots = Vec::new();
    for (gi, g) in c.generators.iter().enumerate() {
        if g.maslov % 2 != 0 {
            continue;
        }
        let a = -g.maslov / 2;
        let b = g.alexander - g.maslov / 2;
        if a < 0 || b < 0 || a > cap as i64 || b > cap as i64 {
            continue;
        }
        if c.ring == Ring::R && a > 0 && b > 0 {
            continue;
        }
        slots.push(CfkArrow {
            from: gi,
            u: a as u32,
            v: b as u32,
            to: 0,
        });
    }
    if slots.len() > 20 {
        return Err(HfError::CapExceeded("to-trivial search space too large".into()));
    }
    let (trivial, _) = trivial_complex();
    let mut obstructions = Vec::new();
    for mask in 1u64..(1u64 << slots.len()) {
        let entries: Vec<CfkArrow> = slots
            .iter()
            .enumerate()
            .filter(|&(t, _)| mask >> t & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let f = CfkMap {
            skew: false,
            entries: normalize(c.ring, entries),
        };
        // Chain map: f ∘ ∂_C = 0.
        if !compose(c.ring, &f, &c.differential_map()).entries.is_empty() {
            continue;
        }
        // Locality: the U- and V-tower classes of C must map onto the
        // target towers.
        if !maps_tower_onto(c, &trivial, &f, true, cap)?
            || !maps_tower_onto(c, &trivial, &f, false, cap)?
        {
            continue;
        }
        // ι-commutation: f∘ι + ι_trivial∘f nullhomotopic as maps C → R.
        let skew_f = CfkMap {
            skew: true,
            entries: f.entries.clone(),
        };
        let disc = add_maps(c.ring, &compose(c.ring, &f, iota), &skew_f)?;
        if disc.entries.is_empty() {
            return Ok(LocalSearchReport {
                direction: Direction::ToTrivial,
                cap,
                found: Some(f),
                obstructions,
            });
        }
        match solve_map_homotopy(c, &trivial, &disc, cap)? {
            Some(_) => {
                return Ok(LocalSearchReport {
                    direction: Direction::ToTrivial,
                    cap,
                    found: Some(f),
                    obstructions,
                });
            }
            None => obstructions.push((
                format!("map on {} generators", f.entries.len()),
                "discrepancy is not a boundary".into(),
            )),
        }
    }
    Ok(LocalSearchReport {
        direction: Direction::ToTrivial,
        cap,
        found: None,
        obstructions,
    })
}

/// Checks that the top tower class of `c` maps to a nonzero top class of the
/// target under `f`.
fn maps_tower_onto(
    c: &CFKComplex,
    target: &CFKComplex,
    f: &CfkMap,
    use_u: bool,
    cap: u32,
) -> Result<bool, HfError> {
    let tc = TowerComplex::new(c, use_u, cap);
    let hc = tc.homology()?;
    let tt = TowerComplex::new(target, use_u, cap);
    let ht = tt.homology()?;
    // Map on the truncated towers.
    let dim_c = c.generators.len() * tc.levels as usize;
    let dim_t = target.generators.len() * tt.levels as usize;
    let mut m = BitMatrix::zero(dim_t, dim_c);
    for e in &f.entries {
        let exp = if use_u { e.u } else { e.v };
        let other = if use_u { e.v } else { e.u };
        if other != 0 {
            continue;
        }
        for lvl in 0..tc.levels {
            let t = lvl + exp;
            if t < tt.levels {
                m.insert(
                    e.to + target.generators.len() * t as usize,
                    e.from + c.generators.len() * lvl as usize,
                );
            }
        }
    }
    // Every top-level homology class of c must map to a non-boundary.
    for rep in &hc.representatives.vectors {
        // Restrict to classes living at the top level (tower classes).
        let top_only = rep
            .ones()
            .all(|i| i / c.generators.len() == tc.levels as usize - 1);
        if !top_only {
            continue;
        }
        let img = m.apply(rep);
        if img.is_zero() || ht.is_boundary(&img) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves ι-commutation homotopies for maps between different complexes:
/// ∂_T H + H ∂_C = rhs.
fn solve_map_homotopy(
    c: &CFKComplex,
    target: &CFKComplex,
    rhs: &CfkMap,
    cap: u32,
) -> Result<Option<CfkMap>, HfError> {
    let mut unknowns = Vec::new();
    for from in 0..c.generators.len() {
        for to in 0..target.generators.len() {
            for u in 0..=cap {
                for v in 0..=cap {
                    if c.ring == Ring::R && u > 0 && v > 0 {
                        continue;
                    }
                    unknowns.push(CfkArrow { from, u, v, to });
                }
            }
        }
    }
    let dc = c.differential_map();
    let dt = target.differential_map();
    let mut row_index: BTreeMap<CfkArrow, usize> = BTreeMap::new();
    let intern = |e: CfkArrow, row_index: &mut BTreeMap<CfkArrow, usize>| {
        let next = row_index.len();
        *row_index.entry(e).or_insert(next)
    };
    let mut cols = Vec::new();
    for &e in &unknowns {
        let h = CfkMap {
            skew: rhs.skew,
            entries: vec![e],
        };
        let combo = add_maps(
            c.ring,
            &compose(c.ring, &dt, &h),
            &compose(c.ring, &h, &dc),
        )?;
        cols.push(
            combo
                .entries
                .iter()
                .map(|&x| intern(x, &mut row_index))
                .collect::<Vec<_>>(),
        );
    }
    let rows_rhs: Vec<usize> = rhs
        .entries
        .iter()
        .map(|&e| intern(e, &mut row_index))
        .collect();
    let mut m = BitMatrix::zero(row_index.len(), unknowns.len());
    for (col, rows) in cols.iter().enumerate() {
        for &r in rows {
            m.insert(r, col);
        }
    }
    let mut b = BitVec::zeros(row_index.len());
    for &r in &rows_rhs {
        b.set(r, true);
    }
    Ok(m.solve(&b)?.map(|x| CfkMap {
        skew: rhs.skew,
        entries: normalize(c.ring, x.ones().map(|i| unknowns[i]).collect()),
    }))
}

// ---------------------------------------------------------------------------
// Shipped complexes
// ---------------------------------------------------------------------------

/// The unknot over R: one generator, identity involution.
pub fn unknot() -> (CFKComplex, SkewInvolution) {
    trivial_complex()
}

/// The unknot with a free basepoint over F2[U,V]: ∂x₋ = UV x₊.
pub fn unknot_free_basepoint() -> (CFKComplex, SkewInvolution) {
    let c = CFKComplex::from_named(
        Ring::UV,
        vec![("x+", 0, 0), ("x-", -1, 0)],
        &[("x-", 1, 1, "x+")],
    )
    .expect("well-formed");
    let id = c.identity_map();
    (
        c,
        CfkMap {
            skew: true,
            entries: id.entries,
        },
    )
}

/// The left-handed trefoil over R, with the reflection involution.
pub fn trefoil_lh() -> (CFKComplex, SkewInvolution) {
    let c = CFKComplex::from_named(
        Ring::R,
        vec![("a", 0, 1), ("b", 1, 2), ("c", -1, 0)],
        &[("a", 1, 0, "b"), ("a", 0, 1, "c")],
    )
    .expect("well-formed");
    let iota = CfkMap {
        skew: true,
        entries: vec![
            CfkArrow { from: 0, u: 0, v: 0, to: 0 },
            CfkArrow { from: 1, u: 0, v: 0, to: 2 },
            CfkArrow { from: 2, u: 0, v: 0, to: 1 },
        ],
    };
    (c, iota)
}

/// The figure-eight knot over R, with its involution ι(a) = a + x,
/// ι(x) = x + d, b ↔ c, d fixed.
pub fn figure8() -> (CFKComplex, SkewInvolution) {
    let c = CFKComplex::from_named(
        Ring::R,
        vec![
            ("a", 0, 0),
            ("b", 1, 1),
            ("c", -1, -1),
            ("d", 0, 0),
            ("x", 0, 0),
        ],
        &[
            ("a", 1, 0, "b"),
            ("a", 0, 1, "c"),
            ("b", 0, 1, "d"),
            ("c", 1, 0, "d"),
        ],
    )
    .expect("well-formed");
    let gi = |n: &str| c.gen_index(n).unwrap();
    let mut entries = Vec::new();
    for (from, to) in [
        ("a", "a"),
        ("a", "x"),
        ("b", "c"),
        ("c", "b"),
        ("d", "d"),
        ("x", "x"),
        ("x", "d"),
    ] {
        entries.push(CfkArrow {
            from: gi(from),
            u: 0,
            v: 0,
            to: gi(to),
        });
    }
    (
        c.clone(),
        CfkMap {
            skew: true,
            entries: normalize(Ring::R, entries),
        },
    )
}

/// The two-component link complex over F2[U,V] with four generators. The
/// differential of yc matches that of xd, making xd + yc the cycle the
/// computation pivots on.
pub fn l2_link() -> CFKComplex {
    CFKComplex::from_named(
        Ring::UV,
        vec![("xd", 0, 0), ("yc", 0, 0), ("xc", 1, 1), ("yd", -1, -1)],
        &[
            ("xd", 1, 0, "xc"),
            ("xd", 0, 1, "yd"),
            ("yc", 1, 0, "xc"),
            ("yc", 0, 1, "yd"),
            ("xc", 0, 1, "xd"),
            ("xc", 0, 1, "yc"),
            ("yd", 1, 0, "xd"),
            ("yd", 1, 0, "yc"),
        ],
    )
    .expect("well-formed")
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CfkGenDoc {
    name: String,
    maslov: i64,
    alexander: i64,
}

#[derive(Serialize, Deserialize)]
struct CfkArrowDoc {
    from: String,
    u: u32,
    v: u32,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct CfkDoc {
    kind: String,
    ring: Ring,
    generators: Vec<CfkGenDoc>,
    delta: Vec<CfkArrowDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iota: Option<Vec<CfkArrowDoc>>,
}

pub fn to_json(c: &CFKComplex, iota: Option<&SkewInvolution>) -> String {
    let doc = CfkDoc {
        kind: "cfk".into(),
        ring: c.ring,
        generators: c
            .generators
            .iter()
            .map(|g| CfkGenDoc {
                name: g.name.clone(),
                maslov: g.maslov,
                alexander: g.alexander,
            })
            .collect(),
        delta: c
            .delta
            .iter()
            .map(|a| CfkArrowDoc {
                from: c.generators[a.from].name.clone(),
                u: a.u,
                v: a.v,
                to: c.generators[a.to].name.clone(),
            })
            .collect(),
        iota: iota.map(|i| {
            i.entries
                .iter()
                .map(|a| CfkArrowDoc {
                    from: c.generators[a.from].name.clone(),
                    u: a.u,
                    v: a.v,
                    to: c.generators[a.to].name.clone(),
                })
                .collect()
        }),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<(CFKComplex, Option<SkewInvolution>), HfError> {
    let doc: CfkDoc = serde_json::from_str(text)?;
    if doc.kind != "cfk" {
        return Err(HfError::Format(format!(
            "expected kind \"cfk\", found {:?}",
            doc.kind
        )));
    }
    let generators: Vec<CfkGen> = doc
        .generators
        .iter()
        .map(|g| CfkGen {
            name: g.name.clone(),
            maslov: g.maslov,
            alexander: g.alexander,
        })
        .collect();
    let index: BTreeMap<&str, usize> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name.as_str(), i))
        .collect();
    let to_arrows = |docs: &[CfkArrowDoc]| -> Result<Vec<CfkArrow>, HfError> {
        docs.iter()
            .map(|a| {
                Ok(CfkArrow {
                    from: *index
                        .get(a.from.as_str())
                        .ok_or_else(|| HfError::Format(format!("unknown generator {:?}", a.from)))?,
                    u: a.u,
                    v: a.v,
                    to: *index
                        .get(a.to.as_str())
                        .ok_or_else(|| HfError::Format(format!("unknown generator {:?}", a.to)))?,
                })
            })
            .collect()
    };
    let delta = to_arrows(&doc.delta)?;
    let iota = match &doc.iota {
        None => None,
        Some(entries) => Some(CfkMap {
            skew: true,
            entries: to_arrows(entries)?,
        }),
    };
    let ring = doc.ring;
    let c = CFKComplex::new(ring, generators, delta).map_err(|e| HfError::Format(e.to_string()))?;
    let iota = iota.map(|mut i| {
        i.entries = normalize(ring, i.entries);
        i
    });
    Ok((c, iota))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_complexes_check() {
        for (c, _) in [unknot(), unknot_free_basepoint(), trefoil_lh(), figure8()] {
            c.check().unwrap();
        }
        l2_link().check().unwrap();
    }

    #[test]
    fn shipped_involutions_pass() {
        for (c, i) in [unknot(), unknot_free_basepoint(), trefoil_lh(), figure8()] {
            let r = check_involution(&c, &i, 3).unwrap();
            assert!(r.pass(), "{:?}", r.failure);
        }
    }

    #[test]
    fn figure8_involution_square_is_exact() {
        // ι² = 1 + ΦΨ on the nose, so the zero homotopy witnesses it.
        let (c, i) = figure8();
        let r = check_involution(&c, &i, 3).unwrap();
        assert!(r.square_witness.unwrap().entries.is_empty());
    }

    #[test]
    fn figure8_phi_psi_values() {
        let (c, _) = figure8();
        let (phi, psi) = phi_psi(&c);
        let gi = |n: &str| c.gen_index(n).unwrap();
        let expect_phi = vec![
            CfkArrow { from: gi("a"), u: 0, v: 0, to: gi("b") },
            CfkArrow { from: gi("c"), u: 0, v: 0, to: gi("d") },
        ];
        let expect_psi = vec![
            CfkArrow { from: gi("a"), u: 0, v: 0, to: gi("c") },
            CfkArrow { from: gi("b"), u: 0, v: 0, to: gi("d") },
        ];
        assert_eq!(phi.entries, normalize(Ring::R, expect_phi));
        assert_eq!(psi.entries, normalize(Ring::R, expect_psi));
    }

    #[test]
    fn phi_chain_map_over_r() {
        for (c, _) in [trefoil_lh(), figure8()] {
            let (phi, psi) = phi_psi(&c);
            let d = c.differential_map();
            assert_eq!(compose(c.ring, &d, &phi), compose(c.ring, &phi, &d));
            assert_eq!(compose(c.ring, &d, &psi), compose(c.ring, &psi, &d));
        }
    }

    #[test]
    fn unknot_free_basepoint_phi_pattern() {
        let (c, _) = unknot_free_basepoint();
        let (phi, psi) = phi_psi(&c);
        // ∂x₋ = UV x₊ gives Φ(x₋) = V x₊ and Ψ(x₋) = U x₊.
        assert_eq!(
            phi.entries,
            vec![CfkArrow { from: c.gen_index("x-").unwrap(), u: 0, v: 1, to: 0 }]
        );
        assert_eq!(
            psi.entries,
            vec![CfkArrow { from: c.gen_index("x-").unwrap(), u: 1, v: 0, to: 0 }]
        );
    }

    #[test]
    fn hat_truncation_dimensions() {
        let (c, i) = figure8();
        let h = hat_truncate(&c, Some(&i)).unwrap();
        assert_eq!(h.homology_dim, 5);
        let (c, i) = trefoil_lh();
        let h = hat_truncate(&c, Some(&i)).unwrap();
        assert_eq!(h.homology_dim, 3);
        let (c, i) = unknot();
        let h = hat_truncate(&c, Some(&i)).unwrap();
        assert_eq!(h.homology_dim, 1);
        assert_eq!(h.induced.unwrap(), BitMatrix::identity(1));
    }

    #[test]
    fn induced_involution_invariants() {
        // Figure-eight: (E+1)³ = 0 ≠ (E+1)²; trefoil: E² = 1, rank(E+1) = 1.
        let (c, i) = figure8();
        let e = hat_truncate(&c, Some(&i)).unwrap().induced.unwrap();
        let e1 = e.add(&BitMatrix::identity(5));
        let e2 = e1.compose(&e1);
        let e3 = e2.compose(&e1);
        assert!(!e2.is_zero());
        assert!(e3.is_zero());

        let (c, i) = trefoil_lh();
        let e = hat_truncate(&c, Some(&i)).unwrap().induced.unwrap();
        assert_eq!(e.compose(&e), BitMatrix::identity(3));
        assert_ne!(e, BitMatrix::identity(3));
        assert_eq!(e.add(&BitMatrix::identity(3)).rank(), 1);
    }

    #[test]
    fn l2_hat_homology_bidegrees() {
        let h = hat_truncate(&l2_link(), None).unwrap();
        assert_eq!(h.homology_dim, 4);
        let mut degs = h.class_bidegrees.clone();
        degs.sort();
        assert_eq!(degs, vec![(-1, -1), (0, 0), (0, 0), (1, 1)]);
    }

    #[test]
    fn connected_sum_unknots_is_unknot() {
        let (u, iu) = unknot();
        let (s, si) = connected_sum(&u, &iu, &u, &iu).unwrap();
        assert_eq!(s.generators.len(), 1);
        let r = check_involution(&s, &si, 3).unwrap();
        assert!(r.pass());
    }

    #[test]
    fn connected_sum_trefoils_checks() {
        let (t, ti) = trefoil_lh();
        let (s, si) = connected_sum(&t, &ti, &t, &ti).unwrap();
        assert_eq!(s.generators.len(), 9);
        s.check().unwrap();
        let r = check_involution(&s, &si, 3).unwrap();
        assert!(r.pass(), "{:?}", r.failure);
    }

    #[test]
    fn dual_trefoil_bidegrees() {
        let (t, ti) = trefoil_lh();
        let (d, di) = dual(&t, Some(&ti)).unwrap();
        d.check().unwrap();
        let degs: Vec<(i64, i64)> = d
            .generators
            .iter()
            .map(|g| (g.maslov, g.alexander))
            .collect();
        assert_eq!(degs, vec![(0, -1), (-1, -2), (1, 0)]);
        let r = check_involution(&d, &di.unwrap(), 3).unwrap();
        assert!(r.pass(), "{:?}", r.failure);
    }

    #[test]
    fn dual_is_involutive() {
        let (t, ti) = trefoil_lh();
        let (d, di) = dual(&t, Some(&ti)).unwrap();
        let (dd, ddi) = dual(&d, di.as_ref()).unwrap();
        assert_eq!(dd, t);
        assert_eq!(ddi.unwrap(), ti);
    }

    #[test]
    fn local_search_trivial_finds_identity() {
        let (c, i) = trivial_complex();
        let r = local_map_search(&c, &i, Direction::FromTrivial, 3).unwrap();
        assert!(r.found.is_some());
        let r = local_map_search(&c, &i, Direction::ToTrivial, 3).unwrap();
        assert!(r.found.is_some());
    }

    #[test]
    fn local_search_figure8_obstructed() {
        let (c, i) = figure8();
        let r = local_map_search(&c, &i, Direction::FromTrivial, 3).unwrap();
        assert!(r.none_at_cap());
        // The two local candidates are x and x+d; both are obstructed by the
        // discrepancy d.
        let names: Vec<&str> = r.obstructions.iter().map(|(c, _)| c.as_str()).collect();
        assert!(names.contains(&"x"));
        assert!(names.contains(&"d+x"));
        assert!(r.obstructions.iter().all(|(_, d)| d == "d"));
    }

    #[test]
    fn local_search_trefoil_no_candidates() {
        let (c, i) = trefoil_lh();
        let r = local_map_search(&c, &i, Direction::FromTrivial, 3).unwrap();
        assert!(r.none_at_cap());
        assert!(r.obstructions.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let (c, i) = figure8();
        let s = to_json(&c, Some(&i));
        let (c2, i2) = from_json(&s).unwrap();
        assert_eq!(c2, c);
        assert_eq!(i2.unwrap(), i);
    }
}
