use nalgebra::DVector;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::rng::{derive_seed, real_gaussian, rng};
use crate::{spectral, tol, Matrix, C64};

/// The *-algebra `Z` generated by the range of a map, with unit `e = J(1)`
/// and its minimal central projections.
#[derive(Clone, Debug)]
pub struct GeneratedAlgebra {
    pub ambient: Algebra,
    /// Hilbert–Schmidt orthonormal (unweighted coordinates).
    pub basis: Vec<Element>,
    pub unit: Element,
    pub minimal_central_projections: Vec<Element>,
}

impl GeneratedAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance from `x` to the span of the basis (Frobenius).
    pub fn span_residual(&self, x: &Element) -> f64 {
        let mut r = x.clone();
        for b in &self.basis {
            let c = b.hs_inner(&r);
            r = &r - &b.scale_complex(c);
        }
        r.frobenius_norm()
    }

    /// Largest distance from the span of products and adjoints of basis
    /// elements.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = self
            .basis
            .iter()
            .map(|b| self.span_residual(&b.adjoint()))
            .fold(0.0, f64::max);
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.span_residual(&(a * b)));
            }
        }
        worst
    }
}

/// Orthonormal family grown by Gram–Schmidt with a pivot threshold.
struct Span {
    vectors: Vec<DVector<C64>>,
}

impl Span {
    fn try_push(&mut self, v: DVector<C64>) -> bool {
        let norm0 = v.norm();
        if norm0 <= tol::PIVOT {
            return false;
        }
        let mut r = v;
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for q in &self.vectors {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let n = r.norm();
        if n <= tol::PIVOT * norm0.max(1.0) {
            return false;
        }
        self.vectors.push(r / C64::new(n, 0.0));
        true
    }
}

/// Closes the range of `j` under products and adjoints.
pub fn generated_star_algebra(j: &LinMap) -> Result<GeneratedAlgebra> {
    generated_with_seed(j, 0)
}

pub(crate) fn generated_with_seed(j: &LinMap, seed: u64) -> Result<GeneratedAlgebra> {
    let cod = j.codomain().clone();
    let mut generators: Vec<Element> = Vec::new();
    for c in 0..j.domain().total_dim() {
        let y = j.basis_image(c);
        generators.push(y.adjoint());
        generators.push(y);
    }

    let mut span = Span { vectors: Vec::new() };
    let mut frontier = Vec::new();
    for g in &generators {
        if span.try_push(g.to_vec()) {
            frontier.push(span.vectors.len() - 1);
        }
    }
    let cap = 2 * cod.total_dim();
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > cap {
            return Err(Error::ClosureStalled { rounds: cap });
        }
        let current: Vec<Element> = frontier
            .iter()
            .map(|&i| cod.unvectorize(&span.vectors[i]).expect("span vector fits codomain"))
            .collect();
        let mut next = Vec::new();
        for w in &current {
            for g in &generators {
                if span.try_push((w * g).to_vec()) {
                    next.push(span.vectors.len() - 1);
                }
            }
        }
        frontier = next;
    }

    let basis: Vec<Element> = span
        .vectors
        .iter()
        .map(|v| cod.unvectorize(v).expect("span vector fits codomain"))
        .collect();
    let unit = j.apply(&j.domain().identity())?;
    let minimal_central_projections = minimal_central_projections(&cod, &basis, &unit, seed)?;
    Ok(GeneratedAlgebra { ambient: cod, basis, unit, minimal_central_projections })
}

/// Basis of the centre `{c ∈ Z : [c, b] = 0 for all b}`.
fn center_basis(cod: &Algebra, basis: &[Element]) -> Vec<Element> {
    let m = basis.len();
    if m == 0 {
        return Vec::new();
    }
    let rows = m * cod.total_dim();
    let mut k = Matrix::zeros(rows, m);
    for (l, bl) in basis.iter().enumerate() {
        let mut col = Vec::with_capacity(rows);
        for bm in basis {
            col.extend(bl.commutator(bm).to_vec().iter().cloned());
        }
        k.set_column(l, &DVector::from_vec(col));
    }
    // null space of K through the eigenvectors of K*K
    let gram = k.adjoint() * &k;
    let (values, vectors) = spectral::hermitian_eigen(&gram);
    let top = values[values.len() - 1].max(1.0);
    (0..m)
        .filter(|&i| values[i] <= 1e-12 * top)
        .map(|i| {
            let mut c = cod.zero();
            for (l, bl) in basis.iter().enumerate() {
                c = &c + &bl.scale_complex(vectors[(l, i)]);
            }
            c
        })
        .collect()
}

fn minimal_central_projections(
    cod: &Algebra,
    basis: &[Element],
    unit: &Element,
    seed: u64,
) -> Result<Vec<Element>> {
    let center = center_basis(cod, basis);
    if center.is_empty() {
        return Ok(Vec::new());
    }
    for attempt in 0..16u64 {
        let mut r = rng(derive_seed(seed, attempt));
        let mut c = cod.zero();
        for z in &center {
            c = &c + &z.scale(real_gaussian(&mut r));
        }
        let h = (&c + &c.adjoint()).scale(0.5);
        if let Some(ps) = split_spectrum(cod, &h, unit, center.len()) {
            return Ok(ps);
        }
    }
    Err(Error::CentralSplit(format!(
        "could not separate {} central components",
        center.len()
    )))
}

/// Spectral projections of a central Hermitian `h`, cut down by the unit.
/// Returns `None` when clusters are not well separated or their number does
/// not match the dimension of the centre.
fn split_spectrum(cod: &Algebra, h: &Element, unit: &Element, expected: usize) -> Option<Vec<Element>> {
    let mut eig: Vec<(f64, usize, DVector<C64>)> = Vec::new();
    for (b, m) in h.blocks().iter().enumerate() {
        let (values, vectors) = spectral::hermitian_eigen(m);
        for i in 0..values.len() {
            eig.push((values[i], b, vectors.column(i).clone_owned()));
        }
    }
    eig.sort_by(|a, b| a.0.total_cmp(&b.0));
    let spread = eig.last()?.0 - eig.first()?.0;
    let scale = spread.max(h.max_abs()).max(1e-300);
    let join = 1e-7 * scale;
    let separation = 1e-4 * scale;

    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..eig.len() {
        let gap = eig[i].0 - eig[i - 1].0;
        if gap <= join {
            clusters.last_mut().unwrap().push(i);
        } else if gap < separation {
            return None;
        } else {
            clusters.push(vec![i]);
        }
    }

    let mut out = Vec::new();
    for cl in clusters {
        let mut p = cod.zero();
        for &i in &cl {
            let (_, b, ref v) = eig[i];
            *p.block_mut(b) += v * v.adjoint();
        }
        let z = &p * unit;
        if z.frobenius_norm() > 0.5 {
            out.push(z);
        }
    }
    (out.len() == expected).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::real_matrix;
    use crate::jordan::tests::doubled;

    fn diag_element(entries: &[f64]) -> Element {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        Element::from_blocks(vec![m])
    }

    #[test]
    fn identity_generates_everything() {
        let a = Algebra::full(3);
        let z = generated_star_algebra(&LinMap::identity(&a)).unwrap();
        assert_eq!(z.dim(), 9);
        assert_eq!(z.minimal_central_projections.len(), 1);
        assert!((&z.minimal_central_projections[0] - &a.identity()).max_abs() < 1e-9);
        assert!(z.closure_residual() < 1e-9);
    }

    #[test]
    fn doubled_map_generates_two_blocks() {
        let z = generated_star_algebra(&doubled(2)).unwrap();
        assert_eq!(z.dim(), 8);
        assert!(z.closure_residual() < 1e-9);
        let mut ps = z.minimal_central_projections.clone();
        assert_eq!(ps.len(), 2);
        ps.sort_by(|a, b| b.block(0)[(0, 0)].re.total_cmp(&a.block(0)[(0, 0)].re));
        assert!((&ps[0] - &diag_element(&[1.0, 1.0, 0.0, 0.0])).max_abs() < 1e-9);
        assert!((&ps[1] - &diag_element(&[0.0, 0.0, 1.0, 1.0])).max_abs() < 1e-9);
    }

    #[test]
    fn unit_is_image_of_one() {
        // M_1 → M_2, λ ↦ λ·e_11
        let dom = Algebra::full(1);
        let cod = Algebra::full(2);
        let j = LinMap::from_fn(&dom, &cod, |x| {
            Element::from_blocks(vec![real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]) * x.block(0)[(0, 0)]])
        })
        .unwrap();
        let z = generated_star_algebra(&j).unwrap();
        assert_eq!(z.dim(), 1);
        assert!((&z.unit - &diag_element(&[1.0, 0.0])).max_abs() < 1e-12);
        assert_eq!(z.minimal_central_projections.len(), 1);
        assert!((&z.minimal_central_projections[0] - &z.unit).max_abs() < 1e-9);
    }

    #[test]
    fn zero_map_generates_nothing() {
        let a = Algebra::full(2);
        let z = generated_star_algebra(&LinMap::zero(&a, &a)).unwrap();
        assert_eq!(z.dim(), 0);
        assert!(z.minimal_central_projections.is_empty());
    }

    #[test]
    fn repeated_copies_share_a_central_projection() {
        // x ↦ x ⊕ x across two codomain blocks: one central projection
        let dom = Algebra::full(2);
        let cod = Algebra::with_dims(&[2, 2]);
        let j = LinMap::from_fn(&dom, &cod, |x| {
            Element::from_blocks(vec![x.block(0).clone(), x.block(0).clone()])
        })
        .unwrap();
        let z = generated_star_algebra(&j).unwrap();
        assert_eq!(z.dim(), 4);
        assert_eq!(z.minimal_central_projections.len(), 1);
        assert!((&z.minimal_central_projections[0] - &cod.identity()).max_abs() < 1e-9);
    }
}
