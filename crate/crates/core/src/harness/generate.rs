//! Seeded instance generators. Blocks have dimension ≤ 4, algebras have at
//! most 4 blocks and trace weights lie in `[1/2, 2]`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use crate::algebra::{Algebra, Block, Element};
use crate::error::{Error, Result};
use crate::jordan::{build_jordan, Embedding, EmbeddingKind, JordanSpec};
use crate::linmap::LinMap;
use crate::rng::{complex_gaussian, rng, Rng};
use crate::yeadon::{build_positive_isometry, YeadonTriple};
use crate::Matrix;

const MAX_DIM: usize = 4;
const MAX_BLOCKS: usize = 4;

/// Exponents cycled through by the isometry suites.
pub const EXPONENTS: [f64; 4] = [1.0, 4.0 / 3.0, 3.0, 4.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecStyle {
    /// Embedding kinds chosen independently.
    Mixed,
    /// Identity embeddings only.
    HomOnly,
    /// Each domain block is embedded by identities only or by transposes
    /// only; at least one transposed block has dimension ≥ 2.
    AntiBlocks,
    /// One-dimensional domain blocks, random kinds.
    Abelian,
}

fn weight(r: &mut Rng) -> f64 {
    r.random_range(0.5..=2.0)
}

pub fn random_algebra(r: &mut Rng, max_blocks: usize, max_dim: usize) -> Algebra {
    let n = r.random_range(1..=max_blocks);
    let blocks = (0..n)
        .map(|_| Block { dim: r.random_range(1..=max_dim), weight: weight(r) })
        .collect();
    Algebra::new(blocks).expect("valid random algebra")
}

/// Random Jordan recipe. Every domain block has at least one slot, so the
/// built map is injective.
pub fn random_jordan_spec(seed: u64, style: SpecStyle) -> JordanSpec {
    let mut r = rng(seed);
    let nb = r.random_range(1..=3usize);
    let mut dims: Vec<usize> = (0..nb)
        .map(|_| if style == SpecStyle::Abelian { 1 } else { r.random_range(1..=3) })
        .collect();
    let mut anti_block: Vec<bool> = (0..nb).map(|_| r.random_bool(0.5)).collect();
    if style == SpecStyle::AntiBlocks {
        dims[0] = r.random_range(2..=3);
        anti_block[0] = true;
    }
    let kind_for = |r: &mut Rng, i: usize| match style {
        SpecStyle::HomOnly => EmbeddingKind::Hom,
        SpecStyle::AntiBlocks => {
            if anti_block[i] {
                EmbeddingKind::Anti
            } else {
                EmbeddingKind::Hom
            }
        }
        SpecStyle::Mixed | SpecStyle::Abelian => {
            if r.random_bool(0.5) {
                EmbeddingKind::Anti
            } else {
                EmbeddingKind::Hom
            }
        }
    };

    // first copies get their own codomain block, extra copies fill free room
    let mut used: Vec<usize> = Vec::new();
    let mut embeddings = Vec::new();
    for (i, &d) in dims.iter().enumerate() {
        embeddings.push(Embedding { source: i, target: used.len(), offset: 0, kind: kind_for(&mut r, i) });
        used.push(d);
    }
    let mut extra: Vec<usize> = (0..nb).filter(|_| r.random_bool(0.5)).collect();
    extra.shuffle(&mut r);
    for i in extra {
        let d = dims[i];
        let kind = kind_for(&mut r, i);
        let mut slots: Vec<usize> = (0..used.len()).filter(|&t| used[t] + d <= MAX_DIM).collect();
        slots.shuffle(&mut r);
        if let Some(&t) = slots.first() {
            embeddings.push(Embedding { source: i, target: t, offset: used[t], kind });
            used[t] += d;
        } else if used.len() < MAX_BLOCKS {
            embeddings.push(Embedding { source: i, target: used.len(), offset: 0, kind });
            used.push(d);
        }
    }

    let domain = Algebra::new(dims.iter().map(|&d| Block { dim: d, weight: weight(&mut r) }).collect())
        .expect("valid domain");
    let codomain = Algebra::new(
        used.iter()
            .map(|&u| {
                let pad = if u < MAX_DIM && r.random_bool(0.3) { 1 } else { 0 };
                Block { dim: u + pad, weight: weight(&mut r) }
            })
            .collect(),
    )
    .expect("valid codomain");
    JordanSpec { domain, codomain, embeddings }
}

/// Uniform random complex matrix map between random algebras.
pub fn random_linmap(seed: u64) -> LinMap {
    let mut r = rng(seed);
    let dom = random_algebra(&mut r, 2, 3);
    let cod = random_algebra(&mut r, 2, 3);
    let m = Matrix::from_fn(cod.total_dim(), dom.total_dim(), |_, _| complex_gaussian(&mut r));
    LinMap::new(dom, cod, m).expect("shapes match")
}

/// `x ↦ Σ K x K*` with Gaussian Kraus operators between random block pairs.
pub fn random_cp_map(seed: u64) -> LinMap {
    let mut r = rng(seed);
    let dom = random_algebra(&mut r, 3, 3);
    let cod = random_algebra(&mut r, 3, 3);
    let mut kraus: Vec<(usize, usize, Matrix)> = Vec::new();
    for j in 0..cod.num_blocks() {
        for i in 0..dom.num_blocks() {
            let count = r.random_range(0..=2usize);
            for _ in 0..count {
                kraus.push((i, j, Matrix::from_fn(cod.dim(j), dom.dim(i), |_, _| complex_gaussian(&mut r))));
            }
        }
    }
    LinMap::from_fn(&dom, &cod, |x| {
        let mut y = cod.zero();
        for (i, j, k) in &kraus {
            *y.block_mut(*j) += k * x.block(*i) * k.adjoint();
        }
        y
    })
    .expect("consistent algebras")
}

/// Positive element; every other seed compresses it to a random coordinate
/// corner so that supports are proper.
pub fn random_positive_weight(a: &Algebra, seed: u64) -> Element {
    let mut r = rng(seed);
    let h = a.random_positive(&mut r);
    if seed % 2 == 0 {
        return h;
    }
    let mut p = a.zero();
    for b in 0..a.num_blocks() {
        for i in 0..a.dim(b) {
            if r.random_bool(0.6) {
                p.block_mut(b)[(i, i)] = crate::C64::new(1.0, 0.0);
            }
        }
    }
    &(&p * &h) * &p
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub kind: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<JordanSpec>,
    pub map: LinMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<YeadonTriple>,
}

/// Positive isometry built from a random recipe, with `p` drawn from
/// [`EXPONENTS`].
pub fn random_isometry(seed: u64, style: SpecStyle) -> Result<(JordanSpec, f64, LinMap, YeadonTriple)> {
    let spec = random_jordan_spec(seed, style);
    let p = EXPONENTS[(seed % EXPONENTS.len() as u64) as usize];
    let j = build_jordan(&spec)?;
    let (t, triple) = build_positive_isometry(&j, p)?;
    Ok((spec, p, t, triple))
}

/// `kind` is one of `jordan`, `isometry`, `map`.
pub fn generate_instance(kind: &str, seed: u64) -> Result<Instance> {
    match kind {
        "jordan" => {
            let spec = random_jordan_spec(seed, SpecStyle::Mixed);
            let map = build_jordan(&spec)?;
            Ok(Instance { kind: kind.into(), seed, p: None, spec: Some(spec), map, triple: None })
        }
        "isometry" => {
            let (spec, p, map, triple) = random_isometry(seed, SpecStyle::Mixed)?;
            Ok(Instance { kind: kind.into(), seed, p: Some(p), spec: Some(spec), map, triple: Some(triple) })
        }
        "map" => Ok(Instance { kind: kind.into(), seed, p: None, spec: None, map: random_linmap(seed), triple: None }),
        other => Err(Error::UnknownKind(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::is_jordan_star_hom;
    use crate::positivity::is_completely_positive;
    use crate::probe::probe_isometry;
    use crate::tol;

    #[test]
    fn specs_respect_caps() {
        for seed in 0..200 {
            for style in [SpecStyle::Mixed, SpecStyle::HomOnly, SpecStyle::AntiBlocks, SpecStyle::Abelian] {
                let s = random_jordan_spec(seed, style);
                s.validate().unwrap();
                assert!(s.codomain.num_blocks() <= MAX_BLOCKS);
                assert!(s.codomain.max_dim() <= MAX_DIM && s.domain.max_dim() <= MAX_DIM);
                for b in s.domain.blocks().iter().chain(s.codomain.blocks()) {
                    assert!((0.5..=2.0).contains(&b.weight));
                }
                for i in 0..s.domain.num_blocks() {
                    assert!(s.embeddings.iter().any(|e| e.source == i));
                }
                match style {
                    SpecStyle::HomOnly | SpecStyle::Abelian => assert!(!s.has_anti_part()),
                    SpecStyle::AntiBlocks => {
                        assert!(s.anti_degree() >= 2);
                        for i in 0..s.domain.num_blocks() {
                            let kinds: Vec<_> =
                                s.embeddings.iter().filter(|e| e.source == i).map(|e| e.kind).collect();
                            assert!(kinds.windows(2).all(|w| w[0] == w[1]));
                        }
                    }
                    SpecStyle::Mixed => {}
                }
            }
        }
    }

    #[test]
    fn instances_are_deterministic() {
        let a = serde_json::to_string(&generate_instance("jordan", 7).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_instance("jordan", 7).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn isometry_instance_is_isometric() {
        let inst = generate_instance("isometry", 1).unwrap();
        assert!(probe_isometry(&inst.map, inst.p.unwrap(), 10, 1, 1e-8).unwrap().holds);
    }

    #[test]
    fn random_map_is_not_jordan() {
        assert!(!is_jordan_star_hom(&generate_instance("map", 3).unwrap().map, tol::ALGEBRAIC));
        assert!(matches!(generate_instance("nope", 0), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn kraus_maps_are_cp() {
        for seed in 0..10 {
            assert!(is_completely_positive(&random_cp_map(seed), 1e-9));
        }
    }
}
