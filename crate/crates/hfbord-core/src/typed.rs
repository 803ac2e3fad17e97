//! Type-D structures over the torus algebra.
//!
//! A type-D module is a finite set of idempotent-labeled generators with a
//! differential valued in algebra-coefficient arrows; the algebra has zero
//! differential, so the structure equation says the coefficient-wise square
//! of the arrow matrix vanishes. Arrows are stored one basis term at a time,
//! which turns the structure equation and the morphism-complex differential
//! into table lookups.
//!
//! Morphism complexes, cancellation (with inclusion / projection / homotopy
//! transport maps), mapping cones, homotopy-equivalence detection, and exact
//! isomorphism search all live here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Basis, Idem, BASIS};
use crate::config::Config;
use crate::error::HfError;
use crate::f2::{self, BitMatrix, BitVec};

/// A generator with its idempotent and optional (maslov, alexander) grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGen {
    pub name: String,
    pub idem: Idem,
    pub grading: Option<(i64, i64)>,
}

impl DGen {
    pub fn new(name: impl Into<String>, idem: Idem) -> Self {
        DGen {
            name: name.into(),
            idem,
            grading: None,
        }
    }
}

/// One basis-coefficient arrow between generator indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arrow {
    pub from: usize,
    pub coef: Basis,
    pub to: usize,
}

/// A finitely generated type-D module, immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDModule {
    generators: Vec<DGen>,
    delta: Vec<Arrow>,
}

/// A structure-equation failure, reported at the first bad generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureViolation {
    pub generator: String,
    pub detail: String,
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "structure equation fails at generator {}: {}",
            self.generator, self.detail
        )
    }
}

impl TypeDModule {
    pub fn new(generators: Vec<DGen>, arrows: Vec<Arrow>) -> Result<Self, HfError> {
        let mut names = BTreeSet::new();
        for g in &generators {
            if !names.insert(g.name.clone()) {
                return Err(HfError::Invalid(format!("duplicate generator {}", g.name)));
            }
        }
        let mut delta = Vec::new();
        for a in arrows {
            if a.from >= generators.len() || a.to >= generators.len() {
                return Err(HfError::Invalid("arrow endpoint out of range".into()));
            }
            let (l, r) = a.coef.idempotents();
            if l != generators[a.from].idem || r != generators[a.to].idem {
                return Err(HfError::Invalid(format!(
                    "arrow {} --{}--> {} violates idempotent compatibility",
                    generators[a.from].name,
                    a.coef,
                    generators[a.to].name
                )));
            }
            delta.push(a);
        }
        let delta = xor_normalize(delta);
        Ok(TypeDModule { generators, delta })
    }

    /// Builds from name-keyed arrows.
    pub fn from_named(
        generators: Vec<DGen>,
        arrows: &[(&str, Basis, &str)],
    ) -> Result<Self, HfError> {
        let index: BTreeMap<&str, usize> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect();
        let mut list = Vec::new();
        for &(from, coef, to) in arrows {
            let &f = index
                .get(from)
                .ok_or_else(|| HfError::Invalid(format!("unknown generator {from}")))?;
            let &t = index
                .get(to)
                .ok_or_else(|| HfError::Invalid(format!("unknown generator {to}")))?;
            list.push(Arrow {
                from: f,
                coef,
                to: t,
            });
        }
        Self::new(generators, list)
    }

    pub fn empty() -> Self {
        TypeDModule {
            generators: Vec::new(),
            delta: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[DGen] {
        &self.generators
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.delta
    }

    pub fn gen_count(&self) -> usize {
        self.generators.len()
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn arrows_from(&self, from: usize) -> impl Iterator<Item = &Arrow> {
        self.delta.iter().filter(move |a| a.from == from)
    }

    pub fn arrows_into(&self, to: usize) -> impl Iterator<Item = &Arrow> {
        self.delta.iter().filter(move |a| a.to == to)
    }

    /// Verifies the structure equation, reporting the first generator whose
    /// squared differential is nonzero.
    pub fn check_structure(&self) -> Result<(), StructureViolation> {
        for x in 0..self.generators.len() {
            // Accumulate sum over two-arrow paths x -> y -> z of (a·b) ⊗ z.
            let mut acc: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
            for a in self.arrows_from(x) {
                for b in self.arrows_from(a.to) {
                    if let Some(c) = a.coef.mul(b.coef) {
                        *acc.entry(b.to).or_default() += c.into();
                    }
                }
            }
            for (z, coef) in acc {
                if !coef.is_zero() {
                    return Err(StructureViolation {
                        generator: self.generators[x].name.clone(),
                        detail: format!(
                            "δ² contains {}⊗{}",
                            coef, self.generators[z].name
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// A module is reduced when no arrow carries an idempotent coefficient.
    pub fn is_reduced(&self) -> bool {
        self.delta.iter().all(|a| !a.coef.is_idempotent())
    }

    /// Boundedness: iterated δ vanishes iff the arrow graph is acyclic.
    pub fn is_bounded(&self) -> bool {
        // Kahn-style peel; anything left lies on a cycle.
        let n = self.generators.len();
        let mut outdeg = vec![0usize; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in &self.delta {
            outdeg[a.from] += 1;
            preds[a.to].push(a.from);
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| outdeg[i] == 0).collect();
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for &p in &preds[v] {
                outdeg[p] -= 1;
                if outdeg[p] == 0 {
                    stack.push(p);
                }
            }
        }
        removed == n
    }

    /// Generators of a directed cycle witnessing unboundedness, if any.
    pub fn cycle_witness(&self) -> Option<Vec<String>> {
        let n = self.generators.len();
        let mut color = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, false)];
            while let Some((v, done)) = stack.pop() {
                if done {
                    color[v] = 2;
                    continue;
                }
                if color[v] == 1 {
                    continue;
                }
                color[v] = 1;
                stack.push((v, true));
                for a in self.arrows_from(v) {
                    if color[a.to] == 1 {
                        // Found a cycle; walk parents back from v to a.to.
                        let mut cyc = vec![self.generators[a.to].name.clone()];
                        let mut cur = v;
                        while cur != a.to && cur != usize::MAX {
                            cyc.push(self.generators[cur].name.clone());
                            cur = parent[cur];
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    if color[a.to] == 0 {
                        parent[a.to] = v;
                        stack.push((a.to, false));
                    }
                }
            }
        }
        None
    }

    /// Canonical form: generators sorted by name, arrows sorted.
    pub fn canonicalize(&self) -> TypeDModule {
        let mut order: Vec<usize> = (0..self.generators.len()).collect();
        order.sort_by(|&a, &b| self.generators[a].name.cmp(&self.generators[b].name));
        let mut rank = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let generators = order
            .iter()
            .map(|&old| self.generators[old].clone())
            .collect();
        let delta = self
            .delta
            .iter()
            .map(|a| Arrow {
                from: rank[a.from],
                coef: a.coef,
                to: rank[a.to],
            })
            .collect();
        TypeDModule {
            generators,
            delta: xor_normalize(delta),
        }
    }

    /// Identity endomorphism.
    pub fn identity(&self) -> TypeDMorphism {
        let entries = (0..self.generators.len())
            .map(|i| Arrow {
                from: i,
                coef: Basis::idem(self.generators[i].idem),
                to: i,
            })
            .collect();
        TypeDMorphism {
            source: self.clone(),
            target: self.clone(),
            entries,
        }
    }

    pub fn zero_morphism(source: &TypeDModule, target: &TypeDModule) -> TypeDMorphism {
        TypeDMorphism {
            source: source.clone(),
            target: target.clone(),
            entries: Vec::new(),
        }
    }
}

fn xor_normalize(mut arrows: Vec<Arrow>) -> Vec<Arrow> {
    arrows.sort();
    let mut out: Vec<Arrow> = Vec::with_capacity(arrows.len());
    for a in arrows {
        if out.last() == Some(&a) {
            out.pop();
        } else {
            out.push(a);
        }
    }
    out
}

/// Infers idempotents from single-basis arrow labels by constraint
/// propagation over the arrow graph. Components without any constraint take
/// the hint, or fail when no hint is given.
pub fn infer_idempotents(
    names: &[String],
    arrows: &[(String, Basis, String)],
    hint: Option<Idem>,
) -> Result<BTreeMap<String, Idem>, HfError> {
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut assigned: Vec<Option<Idem>> = vec![None; names.len()];
    let set = |assigned: &mut Vec<Option<Idem>>, i: usize, idem: Idem| -> Result<(), HfError> {
        match assigned[i] {
            None => {
                assigned[i] = Some(idem);
                Ok(())
            }
            Some(prev) if prev == idem => Ok(()),
            Some(prev) => Err(HfError::Invalid(format!(
                "no valid idempotent assignment: generator {} needs both {} and {}",
                names[i], prev, idem
            ))),
        }
    };
    for (from, coef, to) in arrows {
        let &f = index
            .get(from.as_str())
            .ok_or_else(|| HfError::Invalid(format!("unknown generator {from}")))?;
        let &t = index
            .get(to.as_str())
            .ok_or_else(|| HfError::Invalid(format!("unknown generator {to}")))?;
        let (l, r) = coef.idempotents();
        set(&mut assigned, f, l)?;
        set(&mut assigned, t, r)?;
    }
    for (i, slot) in assigned.iter_mut().enumerate() {
        if slot.is_none() {
            match hint {
                Some(h) => *slot = Some(h),
                None => {
                    return Err(HfError::Invalid(format!(
                        "generator {} is unconstrained; an idempotent hint is required",
                        names[i]
                    )))
                }
            }
        }
    }
    Ok(names
        .iter()
        .zip(assigned)
        .map(|(n, a)| (n.clone(), a.unwrap()))
        .collect())
}

/// An F2-linear, idempotent-compatible map between type-D modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDMorphism {
    pub source: TypeDModule,
    pub target: TypeDModule,
    entries: Vec<Arrow>,
}

impl TypeDMorphism {
    pub fn new(
        source: TypeDModule,
        target: TypeDModule,
        entries: Vec<Arrow>,
    ) -> Result<Self, HfError> {
        for a in &entries {
            if a.from >= source.gen_count() || a.to >= target.gen_count() {
                return Err(HfError::Invalid("morphism entry out of range".into()));
            }
            let (l, r) = a.coef.idempotents();
            if l != source.generators[a.from].idem || r != target.generators[a.to].idem {
                return Err(HfError::Invalid(format!(
                    "entry {} --{}--> {} violates idempotent compatibility",
                    source.generators[a.from].name, a.coef, target.generators[a.to].name
                )));
            }
        }
        Ok(TypeDMorphism {
            source,
            target,
            entries: xor_normalize(entries),
        })
    }

    pub fn from_named(
        source: &TypeDModule,
        target: &TypeDModule,
        entries: &[(&str, Basis, &str)],
    ) -> Result<Self, HfError> {
        let mut list = Vec::new();
        for &(from, coef, to) in entries {
            let f = source
                .gen_index(from)
                .ok_or_else(|| HfError::Invalid(format!("unknown source generator {from}")))?;
            let t = target
                .gen_index(to)
                .ok_or_else(|| HfError::Invalid(format!("unknown target generator {to}")))?;
            list.push(Arrow {
                from: f,
                coef,
                to: t,
            });
        }
        Self::new(source.clone(), target.clone(), list)
    }

    pub fn entries(&self) -> &[Arrow] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &TypeDMorphism) -> Result<TypeDMorphism, HfError> {
        if self.source != other.source || self.target != other.target {
            return Err(HfError::ModuleMismatch(
                "sum of morphisms with different endpoints".into(),
            ));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(TypeDMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: xor_normalize(entries),
        })
    }
}

/// Composition `g ∘ h` (first `h`, then `g`).
pub fn compose(g: &TypeDMorphism, h: &TypeDMorphism) -> Result<TypeDMorphism, HfError> {
    if h.target != g.source {
        return Err(HfError::ModuleMismatch(
            "compose: target of inner morphism differs from source of outer".into(),
        ));
    }
    Ok(TypeDMorphism {
        source: h.source.clone(),
        target: g.target.clone(),
        entries: compose_entries(&h.entries, &g.entries),
    })
}

/// Entry-level composition: `second ∘ first` as arrow lists.
fn compose_entries(first: &[Arrow], second: &[Arrow]) -> Vec<Arrow> {
    let mut out = Vec::new();
    for a in first {
        for b in second.iter().filter(|b| b.from == a.to) {
            if let Some(c) = a.coef.mul(b.coef) {
                out.push(Arrow {
                    from: a.from,
                    coef: c,
                    to: b.to,
                });
            }
        }
    }
    xor_normalize(out)
}

/// The morphism complex Mor(N₁, N₂): basis, differential, homology.
#[derive(Clone, Debug)]
pub struct MorComplex {
    pub source: TypeDModule,
    pub target: TypeDModule,
    /// Basis triples (source generator, coefficient, target generator).
    pub basis: Vec<Arrow>,
    pub d: BitMatrix,
}

impl MorComplex {
    pub fn new(source: &TypeDModule, target: &TypeDModule) -> MorComplex {
        let mut basis = Vec::new();
        for (x, gx) in source.generators.iter().enumerate() {
            for (y, gy) in target.generators.iter().enumerate() {
                for b in BASIS {
                    let (l, r) = b.idempotents();
                    if l == gx.idem && r == gy.idem {
                        basis.push(Arrow {
                            from: x,
                            coef: b,
                            to: y,
                        });
                    }
                }
            }
        }
        let index: BTreeMap<Arrow, usize> =
            basis.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut d = BitMatrix::zero(basis.len(), basis.len());
        for (col, h) in basis.iter().enumerate() {
            // Post-composition with the target differential.
            for arr in target.arrows_from(h.to) {
                if let Some(c) = h.coef.mul(arr.coef) {
                    let row = index[&Arrow {
                        from: h.from,
                        coef: c,
                        to: arr.to,
                    }];
                    d.insert(row, col);
                }
            }
            // Pre-composition with the source differential.
            for arr in source.arrows_into(h.from) {
                if let Some(c) = arr.coef.mul(h.coef) {
                    let row = index[&Arrow {
                        from: arr.from,
                        coef: c,
                        to: h.to,
                    }];
                    d.insert(row, col);
                }
            }
        }
        MorComplex {
            source: source.clone(),
            target: target.clone(),
            basis,
            d,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vec_of(&self, m: &TypeDMorphism) -> Result<BitVec, HfError> {
        if m.source != self.source || m.target != self.target {
            return Err(HfError::ModuleMismatch(
                "morphism does not belong to this Mor complex".into(),
            ));
        }
        let mut v = BitVec::zeros(self.basis.len());
        for e in &m.entries {
            let i = self
                .basis
                .iter()
                .position(|b| b == e)
                .expect("entry is idempotent-compatible, so it is in the basis");
            v.set(i, true);
        }
        Ok(v)
    }

    pub fn morphism_of(&self, v: &BitVec) -> TypeDMorphism {
        let entries = v.ones().map(|i| self.basis[i]).collect();
        TypeDMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: xor_normalize(entries),
        }
    }

    /// Mor-differential of a morphism.
    pub fn differential_of(&self, m: &TypeDMorphism) -> Result<TypeDMorphism, HfError> {
        let v = self.vec_of(m)?;
        Ok(self.morphism_of(&self.d.apply(&v)))
    }

    pub fn is_cycle(&self, m: &TypeDMorphism) -> Result<bool, HfError> {
        Ok(self.d.apply(&self.vec_of(m)?).is_zero())
    }

    pub fn homology(&self) -> Result<f2::Homology, HfError> {
        f2::homology(&self.d, &self.d)
    }
}

/// Mor-differential without constructing the full complex.
pub fn mor_differential(m: &TypeDMorphism) -> TypeDMorphism {
    let mut entries = Vec::new();
    for h in &m.entries {
        for arr in m.target.arrows_from(h.to) {
            if let Some(c) = h.coef.mul(arr.coef) {
                entries.push(Arrow {
                    from: h.from,
                    coef: c,
                    to: arr.to,
                });
            }
        }
        for arr in m.source.arrows_into(h.from) {
            if let Some(c) = arr.coef.mul(h.coef) {
                entries.push(Arrow {
                    from: arr.from,
                    coef: c,
                    to: h.to,
                });
            }
        }
    }
    TypeDMorphism {
        source: m.source.clone(),
        target: m.target.clone(),
        entries: xor_normalize(entries),
    }
}

pub fn is_cycle(m: &TypeDMorphism) -> bool {
    mor_differential(m).is_zero()
}

/// Solves d(H) = h; returns the witness homotopy when `h` is a boundary.
pub fn nullhomotopy_witness(h: &TypeDMorphism) -> Result<Option<TypeDMorphism>, HfError> {
    if !is_cycle(h) {
        return Err(HfError::NotACycle(
            "nullhomotopy test requires a cycle".into(),
        ));
    }
    let mor = MorComplex::new(&h.source, &h.target);
    let b = mor.vec_of(h)?;
    Ok(mor.d.solve(&b)?.map(|x| mor.morphism_of(&x)))
}

/// The mapping cone of a cycle. Source generators are prefixed `s.`, target
/// generators `t.`; the differential is triangular with `h` as the connecting
/// map.
pub fn cone(h: &TypeDMorphism) -> Result<TypeDModule, HfError> {
    if !is_cycle(h) {
        return Err(HfError::NotACycle("cone requires a cycle".into()));
    }
    let ns = h.source.gen_count();
    let mut generators = Vec::new();
    for g in h.source.generators() {
        generators.push(DGen {
            name: format!("s.{}", g.name),
            idem: g.idem,
            grading: g.grading,
        });
    }
    for g in h.target.generators() {
        generators.push(DGen {
            name: format!("t.{}", g.name),
            idem: g.idem,
            grading: g.grading,
        });
    }
    let mut arrows = Vec::new();
    for a in h.source.arrows() {
        arrows.push(*a);
    }
    for a in h.target.arrows() {
        arrows.push(Arrow {
            from: a.from + ns,
            coef: a.coef,
            to: a.to + ns,
        });
    }
    for e in h.entries() {
        arrows.push(Arrow {
            from: e.from,
            coef: e.coef,
            to: e.to + ns,
        });
    }
    TypeDModule::new(generators, arrows)
}

/// Inclusion / projection / homotopy data produced by cancellation.
#[derive(Clone, Debug)]
pub struct ReductionData {
    pub reduced: TypeDModule,
    pub include: TypeDMorphism,
    pub project: TypeDMorphism,
    pub homotopy: TypeDMorphism,
}

impl ReductionData {
    /// Verifies the homological-perturbation contract exactly.
    pub fn verify(&self) -> Result<(), HfError> {
        let orig = &self.include.target;
        if !is_cycle(&self.include) || !is_cycle(&self.project) {
            return Err(HfError::Invalid(
                "reduction transport maps are not chain maps".into(),
            ));
        }
        let pi = compose(&self.project, &self.include)?;
        if pi != self.reduced.identity() {
            return Err(HfError::Invalid("project ∘ include ≠ id".into()));
        }
        let ip = compose(&self.include, &self.project)?;
        let want = ip.add(&orig.identity())?;
        if mor_differential(&self.homotopy) != want {
            return Err(HfError::Invalid(
                "include ∘ project ≠ id + d(homotopy)".into(),
            ));
        }
        if !self.reduced.is_reduced() {
            return Err(HfError::Invalid("reduction output is not reduced".into()));
        }
        Ok(())
    }
}

/// Cancels idempotent-coefficient arrows until the module is reduced.
///
/// Each pass removes the lexicographically first cancellable idempotent
/// arrow, so outputs are deterministic. The transport maps satisfy
/// `project ∘ include = id` and `include ∘ project = id + d(homotopy)`.
pub fn reduce(module: &TypeDModule) -> Result<ReductionData, HfError> {
    module
        .check_structure()
        .map_err(|v| HfError::Invalid(v.to_string()))?;
    let mut current = module.clone();
    let mut include = module.identity();
    let mut project = module.identity();
    let mut homotopy = TypeDModule::zero_morphism(module, module);

    loop {
        // Candidate: a pair x ≠ y where the y-component of δ(x) contains an
        // idempotent term, so it is invertible in its block (possibly of the
        // unipotent form ι + σ). Back arrows y → x are discarded by the
        // transport maps; the contract verification below arbitrates.
        let cand = current
            .delta
            .iter()
            .copied()
            .find(|a| a.coef.is_idempotent() && a.from != a.to);
        let Some(edge) = cand else {
            if !current.is_reduced() {
                return Err(HfError::Invalid(
                    "reduction is stuck: idempotent arrows remain but none is cancellable"
                        .into(),
                ));
            }
            break;
        };
        let (x, y) = (edge.from, edge.to);
        let n = current.gen_count();
        // Full y-component of δ(x) and its block inverse: (ι + σ)⁻¹ = ι + σ
        // because same-block chords square to zero.
        let mut c_coef = AlgebraElement::ZERO;
        for a in current.delta.iter().filter(|a| a.from == x && a.to == y) {
            c_coef += a.coef.into();
        }
        let c_inv = c_coef;

        // Index map old -> new over the complement.
        let keep: Vec<usize> = (0..n).filter(|&i| i != x && i != y).collect();
        let mut new_index = vec![usize::MAX; n];
        for (ni, &oi) in keep.iter().enumerate() {
            new_index[oi] = ni;
        }
        let new_gens: Vec<DGen> = keep.iter().map(|&i| current.generators[i].clone()).collect();

        // New differential: surviving arrows plus zig-zags g → y ⇒ x → g'
        // weighted by the block inverse.
        let mut new_arrows = Vec::new();
        for a in &current.delta {
            if a.from != x && a.from != y && a.to != x && a.to != y {
                new_arrows.push(Arrow {
                    from: new_index[a.from],
                    coef: a.coef,
                    to: new_index[a.to],
                });
            }
        }
        for a in current
            .delta
            .iter()
            .filter(|a| a.to == y && a.from != x && a.from != y)
        {
            for b in current
                .delta
                .iter()
                .filter(|b| b.from == x && b.to != y && b.to != x)
            {
                let prod = AlgebraElement::from(a.coef)
                    .mul(c_inv)
                    .mul(b.coef.into());
                for c in prod.terms() {
                    new_arrows.push(Arrow {
                        from: new_index[a.from],
                        coef: c,
                        to: new_index[b.to],
                    });
                }
            }
        }
        let next = TypeDModule::new(new_gens, new_arrows)?;

        // Step transport maps: h sends y to c⁻¹x, i corrects along arrows
        // into y, p corrects along arrows out of x.
        let mut i_entries = Vec::new();
        let mut p_entries = Vec::new();
        for &g in &keep {
            let idem = Basis::idem(current.generators[g].idem);
            i_entries.push(Arrow {
                from: new_index[g],
                coef: idem,
                to: g,
            });
            p_entries.push(Arrow {
                from: g,
                coef: idem,
                to: new_index[g],
            });
        }
        for a in current
            .delta
            .iter()
            .filter(|a| a.to == y && a.from != x && a.from != y)
        {
            for c in AlgebraElement::from(a.coef).mul(c_inv).terms() {
                i_entries.push(Arrow {
                    from: new_index[a.from],
                    coef: c,
                    to: x,
                });
            }
        }
        for b in current
            .delta
            .iter()
            .filter(|b| b.from == x && b.to != y && b.to != x)
        {
            for c in c_inv.mul(b.coef.into()).terms() {
                p_entries.push(Arrow {
                    from: y,
                    coef: c,
                    to: new_index[b.to],
                });
            }
        }
        let i_step = TypeDMorphism {
            source: next.clone(),
            target: current.clone(),
            entries: xor_normalize(i_entries),
        };
        let p_step = TypeDMorphism {
            source: current.clone(),
            target: next.clone(),
            entries: xor_normalize(p_entries),
        };
        let h_step = TypeDMorphism {
            source: current.clone(),
            target: current.clone(),
            entries: c_inv
                .terms()
                .map(|c| Arrow {
                    from: y,
                    coef: c,
                    to: x,
                })
                .collect(),
        };

        // Compose with the running contraction: H += i∘h_step∘p, i ∘= i_step,
        // p = p_step ∘ p.
        let h_contrib = compose(&include, &compose(&h_step, &project)?)?;
        homotopy = homotopy.add(&h_contrib)?;
        include = compose(&include, &i_step)?;
        project = compose(&p_step, &project)?;
        current = next;
    }

    let data = ReductionData {
        reduced: current,
        include,
        project,
        homotopy,
    };
    data.verify()?;
    Ok(data)
}

/// Tests whether a cycle is a homotopy equivalence: its cone must reduce to
/// the empty module.
pub fn is_equivalence(h: &TypeDMorphism) -> Result<bool, HfError> {
    let c = cone(h)?;
    Ok(reduce(&c)?.reduced.gen_count() == 0)
}

/// Exact isomorphism search between reduced modules.
///
/// Looks for an invertible idempotent-block change of basis carrying one
/// differential to the other: solutions of the linear intertwining system
/// are enumerated (guarded by `config.enumeration_cap`) and tested for
/// invertibility. Returns the first invertible solution as a morphism.
pub fn iso_search(
    a: &TypeDModule,
    b: &TypeDModule,
    gen_cap: usize,
    config: &Config,
) -> Result<Option<TypeDMorphism>, HfError> {
    if a.gen_count() > gen_cap || b.gen_count() > gen_cap {
        return Err(HfError::CapExceeded(format!(
            "iso_search generator cap {gen_cap} exceeded"
        )));
    }
    if a.gen_count() != b.gen_count() {
        return Ok(None);
    }
    for idem in [Idem::I0, Idem::I1] {
        let ca = a.generators.iter().filter(|g| g.idem == idem).count();
        let cb = b.generators.iter().filter(|g| g.idem == idem).count();
        if ca != cb {
            return Ok(None);
        }
    }
    // Unknowns: entries P[j, i] with idem(a_i) = idem(b_j), representing
    // Φ(a_i) = Σ_j P[j,i] ⊗ b_j. Intertwining: for every coefficient ρ,
    // D_b^ρ P = P D_a^ρ.
    let n = a.gen_count();
    let mut unknowns: Vec<(usize, usize)> = Vec::new(); // (b index j, a index i)
    for j in 0..n {
        for i in 0..n {
            if a.generators[i].idem == b.generators[j].idem {
                unknowns.push((j, i));
            }
        }
    }
    let uidx: BTreeMap<(usize, usize), usize> = unknowns
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, k))
        .collect();
    // One constraint row per (coefficient ρ, target j, source i).
    let mut rows: Vec<BitVec> = Vec::new();
    for rho in BASIS {
        for j in 0..n {
            for i in 0..n {
                let mut row = BitVec::zeros(unknowns.len());
                let mut any = false;
                // (D_b^ρ P)[j, i] = Σ_k D_b[j,k] P[k,i]
                for arr in b.delta.iter().filter(|t| t.coef == rho && t.to == j) {
                    if let Some(&u) = uidx.get(&(arr.from, i)) {
                        row.flip(u);
                        any = true;
                    }
                }
                // (P D_a^ρ)[j, i] = Σ_k P[j,k] D_a[k,i]
                for arr in a.delta.iter().filter(|s| s.coef == rho && s.from == i) {
                    if let Some(&u) = uidx.get(&(j, arr.to)) {
                        row.flip(u);
                        any = true;
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
    }
    let constraint = BitMatrix::from_rows(unknowns.len(), &rows);
    let kernel = constraint.kernel();
    let dim = kernel.len();
    if dim >= 63 || (1u64 << dim) > config.enumeration_cap {
        return Err(HfError::CapExceeded(format!(
            "iso_search solution space has dimension {dim}"
        )));
    }
    for mask in 1u64..(1u64 << dim) {
        let mut p = BitVec::zeros(unknowns.len());
        for (t, k) in kernel.iter().enumerate() {
            if mask >> t & 1 == 1 {
                p.xor_assign(k);
            }
        }
        // Invertibility: P is square over the matched blocks; check full rank.
        let mut mat = BitMatrix::zero(n, n);
        for (u, &(j, i)) in unknowns.iter().enumerate() {
            if p.get(u) {
                mat.insert(j, i);
            }
        }
        if mat.rank() == n {
            let entries = unknowns
                .iter()
                .enumerate()
                .filter(|&(u, _)| p.get(u))
                .map(|(_, &(j, i))| Arrow {
                    from: i,
                    coef: Basis::idem(a.generators[i].idem),
                    to: j,
                })
                .collect();
            return Ok(Some(TypeDMorphism {
                source: a.clone(),
                target: b.clone(),
                entries: xor_normalize(entries),
            }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GenDoc {
    name: String,
    idempotent: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    grading: Option<(i64, i64)>,
}

#[derive(Serialize, Deserialize)]
struct ArrowDoc {
    from: String,
    coef: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TypeDDoc {
    kind: String,
    generators: Vec<GenDoc>,
    delta: Vec<ArrowDoc>,
}

impl TypeDModule {
    /// Canonical JSON bytes: generators sorted by name, arrows sorted.
    pub fn to_json(&self) -> String {
        let m = self.canonicalize();
        let doc = TypeDDoc {
            kind: "typeD".to_string(),
            generators: m
                .generators
                .iter()
                .map(|g| GenDoc {
                    name: g.name.clone(),
                    idempotent: g.idem.token().to_string(),
                    grading: g.grading,
                })
                .collect(),
            delta: m
                .delta
                .iter()
                .map(|a| ArrowDoc {
                    from: m.generators[a.from].name.clone(),
                    coef: a.coef.token().to_string(),
                    to: m.generators[a.to].name.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<TypeDModule, HfError> {
        let doc: TypeDDoc = serde_json::from_str(text)?;
        if doc.kind != "typeD" {
            return Err(HfError::Format(format!(
                "expected kind \"typeD\", found {:?}",
                doc.kind
            )));
        }
        let mut generators = Vec::new();
        for g in &doc.generators {
            let idem = match g.idempotent.as_str() {
                "i0" => Idem::I0,
                "i1" => Idem::I1,
                other => {
                    return Err(HfError::Format(format!("unknown idempotent {other:?}")))
                }
            };
            generators.push(DGen {
                name: g.name.clone(),
                idem,
                grading: g.grading,
            });
        }
        let index: BTreeMap<&str, usize> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect();
        let mut arrows = Vec::new();
        let mut seen = BTreeSet::new();
        for a in &doc.delta {
            let coef = Basis::from_token(&a.coef)?;
            let &f = index
                .get(a.from.as_str())
                .ok_or_else(|| HfError::Format(format!("unknown generator {:?}", a.from)))?;
            let &t = index
                .get(a.to.as_str())
                .ok_or_else(|| HfError::Format(format!("unknown generator {:?}", a.to)))?;
            if !seen.insert((f, coef, t)) {
                return Err(HfError::Format(format!(
                    "duplicate arrow {} --{}--> {}",
                    a.from, a.coef, a.to
                )));
            }
            arrows.push(Arrow {
                from: f,
                coef,
                to: t,
            });
        }
        TypeDModule::new(generators, arrows).map_err(|e| HfError::Format(e.to_string()))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::Basis::*;

    pub(crate) fn cfd_t0() -> TypeDModule {
        TypeDModule::from_named(vec![DGen::new("x", Idem::I0)], &[("x", R12, "x")]).unwrap()
    }

    pub(crate) fn trefoil_lh() -> TypeDModule {
        TypeDModule::from_named(
            vec![
                DGen::new("e0", Idem::I0),
                DGen::new("f0", Idem::I0),
                DGen::new("f1", Idem::I1),
                DGen::new("g0", Idem::I0),
                DGen::new("g1", Idem::I1),
                DGen::new("h1", Idem::I1),
                DGen::new("k1", Idem::I1),
            ],
            &[
                ("e0", R3, "f1"),
                ("e0", R1, "g1"),
                ("f1", R2, "f0"),
                ("f0", R1, "k1"),
                ("h1", R23, "k1"),
                ("g0", R3, "h1"),
                ("g0", R123, "g1"),
            ],
        )
        .unwrap()
    }

    pub(crate) fn figure8() -> TypeDModule {
        TypeDModule::from_named(
            vec![
                DGen::new("e0", Idem::I0),
                DGen::new("e1", Idem::I1),
                DGen::new("f0", Idem::I0),
                DGen::new("f1", Idem::I1),
                DGen::new("g0", Idem::I0),
                DGen::new("g1", Idem::I1),
                DGen::new("h0", Idem::I0),
                DGen::new("h1", Idem::I1),
                DGen::new("z", Idem::I0),
            ],
            &[
                ("f0", R1, "f1"),
                ("e1", R2, "f0"),
                ("e0", R3, "e1"),
                ("e0", R1, "h1"),
                ("g0", R123, "f1"),
                ("g1", R2, "g0"),
                ("h0", R3, "g1"),
                ("h0", R123, "h1"),
                ("z", R12, "z"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn structure_passes_on_shipped_modules() {
        assert!(cfd_t0().check_structure().is_ok());
        assert!(trefoil_lh().check_structure().is_ok());
        assert!(figure8().check_structure().is_ok());
    }

    #[test]
    fn structure_fails_with_offender() {
        // x → ρ₁ y, y → ρ₂ z has δ²x = ρ₁₂ z.
        let m = TypeDModule::from_named(
            vec![
                DGen::new("x", Idem::I0),
                DGen::new("y", Idem::I1),
                DGen::new("z", Idem::I0),
            ],
            &[("x", R1, "y"), ("y", R2, "z")],
        )
        .unwrap();
        let err = m.check_structure().unwrap_err();
        assert_eq!(err.generator, "x");
    }

    #[test]
    fn idempotent_compatibility_enforced() {
        let r = TypeDModule::from_named(
            vec![DGen::new("x", Idem::I1)],
            &[("x", R12, "x")],
        );
        assert!(r.is_err());
    }

    #[test]
    fn boundedness() {
        assert!(!cfd_t0().is_bounded());
        assert!(trefoil_lh().is_bounded());
        assert!(!figure8().is_bounded());
        assert!(figure8().cycle_witness().unwrap().contains(&"z".to_string()));
    }

    #[test]
    fn infer_idempotents_trefoil() {
        let names: Vec<String> = ["e0", "f0", "f1", "g0", "g1", "h1", "k1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let arrows: Vec<(String, Basis, String)> = trefoil_lh()
            .arrows()
            .iter()
            .map(|a| {
                (
                    trefoil_lh().generators()[a.from].name.clone(),
                    a.coef,
                    trefoil_lh().generators()[a.to].name.clone(),
                )
            })
            .collect();
        let assign = infer_idempotents(&names, &arrows, None).unwrap();
        assert_eq!(assign["e0"], Idem::I0);
        assert_eq!(assign["f0"], Idem::I0);
        assert_eq!(assign["g0"], Idem::I0);
        assert_eq!(assign["f1"], Idem::I1);
        assert_eq!(assign["g1"], Idem::I1);
        assert_eq!(assign["h1"], Idem::I1);
        assert_eq!(assign["k1"], Idem::I1);
    }

    #[test]
    fn infer_idempotents_needs_hint_when_unconstrained() {
        let names = vec!["x".to_string()];
        assert!(infer_idempotents(&names, &[], None).is_err());
        let with_hint = infer_idempotents(&names, &[], Some(Idem::I1)).unwrap();
        assert_eq!(with_hint["x"], Idem::I1);
    }

    #[test]
    fn infer_idempotents_detects_conflict() {
        // x → ρ₁ x forces ι₀ and ι₁ on the same generator.
        let names = vec!["x".to_string()];
        let arrows = vec![("x".to_string(), R1, "x".to_string())];
        assert!(infer_idempotents(&names, &arrows, None).is_err());
    }

    #[test]
    fn mor_self_pairing_of_cfd_t0() {
        let t0 = cfd_t0();
        let mor = MorComplex::new(&t0, &t0);
        assert_eq!(mor.dim(), 2);
        let h = mor.homology().unwrap();
        assert_eq!(h.dim, 2);
    }

    #[test]
    fn identity_is_a_cycle_and_not_nullhomotopic() {
        let t0 = cfd_t0();
        let id = t0.identity();
        assert!(is_cycle(&id));
        assert_eq!(nullhomotopy_witness(&id).unwrap(), None);
    }

    #[test]
    fn zero_is_nullhomotopic() {
        let t0 = cfd_t0();
        let z = TypeDModule::zero_morphism(&t0, &t0);
        let w = nullhomotopy_witness(&z).unwrap().unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn boundaries_are_nullhomotopic() {
        let m = trefoil_lh();
        let mor = MorComplex::new(&m, &m);
        // d(H) for a deterministic sample of basis elements H.
        for i in [0usize, 3, 7, 11] {
            let mut v = BitVec::zeros(mor.dim());
            v.set(i % mor.dim(), true);
            let h = mor.morphism_of(&v);
            let dh = mor.differential_of(&h).unwrap();
            assert!(nullhomotopy_witness(&dh).unwrap().is_some());
        }
    }

    #[test]
    fn compose_with_identity() {
        let m = trefoil_lh();
        let mor = MorComplex::new(&m, &m);
        let mut v = BitVec::zeros(mor.dim());
        v.set(5, true);
        let h = mor.morphism_of(&v);
        assert_eq!(compose(&m.identity(), &h).unwrap(), h);
        assert_eq!(compose(&h, &m.identity()).unwrap(), h);
    }

    #[test]
    fn cone_of_zero_is_direct_sum() {
        let t0 = cfd_t0();
        let z = TypeDModule::zero_morphism(&t0, &t0);
        let c = cone(&z).unwrap();
        assert_eq!(c.gen_count(), 2);
        assert_eq!(c.arrows().len(), 2);
    }

    #[test]
    fn cone_of_identity_reduces_to_empty() {
        let t0 = cfd_t0();
        let c = cone(&t0.identity()).unwrap();
        let r = reduce(&c).unwrap();
        assert_eq!(r.reduced.gen_count(), 0);

        let f8 = figure8();
        let c8 = cone(&f8.identity()).unwrap();
        assert_eq!(reduce(&c8).unwrap().reduced.gen_count(), 0);
    }

    #[test]
    fn cone_of_r12_multiplication_reduces_to_two_generators() {
        let t0 = cfd_t0();
        let h = TypeDMorphism::from_named(&t0, &t0, &[("x", R12, "x")]).unwrap();
        assert!(is_cycle(&h));
        let r = reduce(&cone(&h).unwrap()).unwrap();
        assert_eq!(r.reduced.gen_count(), 2);
    }

    #[test]
    fn reduce_returns_already_reduced_module_unchanged() {
        let m = trefoil_lh();
        let r = reduce(&m).unwrap();
        assert_eq!(r.reduced, m);
        assert_eq!(r.include, m.identity());
        assert_eq!(r.project, m.identity());
        assert!(r.homotopy.is_zero());
    }

    #[test]
    fn reduce_is_idempotent() {
        let t0 = cfd_t0();
        let h = TypeDMorphism::from_named(&t0, &t0, &[("x", R12, "x")]).unwrap();
        let c = cone(&h).unwrap();
        let once = reduce(&c).unwrap().reduced;
        let twice = reduce(&once).unwrap().reduced;
        assert_eq!(once, twice);
    }

    #[test]
    fn is_equivalence_basics() {
        let t0 = cfd_t0();
        assert!(is_equivalence(&t0.identity()).unwrap());
        assert!(!is_equivalence(&TypeDModule::zero_morphism(&t0, &t0)).unwrap());
    }

    #[test]
    fn iso_search_finds_renaming() {
        let m = trefoil_lh();
        let mut renamed = m.clone();
        for g in &mut renamed.generators {
            g.name = format!("{}_r", g.name);
        }
        let iso = iso_search(&m, &renamed, 12, &Config::default())
            .unwrap()
            .unwrap();
        assert!(is_cycle(&iso));
        assert!(is_equivalence(&iso).unwrap());
    }

    #[test]
    fn iso_search_distinguishes_modules() {
        let t0 = cfd_t0();
        let tinf = TypeDModule::from_named(vec![DGen::new("x", Idem::I1)], &[]).unwrap();
        assert!(iso_search(&t0, &tinf, 12, &Config::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn json_round_trip_canonical() {
        let m = figure8();
        let s = m.to_json();
        let back = TypeDModule::from_json(&s).unwrap();
        assert_eq!(back.to_json(), s);
        // Canonical: generator order is by name regardless of input order.
        assert!(s.find("\"e0\"").unwrap() < s.find("\"z\"").unwrap());
    }

    #[test]
    fn json_rejects_duplicate_arrow() {
        let text = r#"{
            "kind": "typeD",
            "generators": [{"name": "x", "idempotent": "i0"}],
            "delta": [
                {"from": "x", "coef": "r12", "to": "x"},
                {"from": "x", "coef": "r12", "to": "x"}
            ]
        }"#;
        assert!(matches!(
            TypeDModule::from_json(text),
            Err(HfError::Format(_))
        ));
    }
}
