//! Characteristic sequences and basis-free fingerprints used to tell
//! algebras apart. A fingerprint collision is reported as such; it is never
//! taken as evidence of isomorphism.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{annihilators, is_lie, is_nilpotent_algebra, series, squares_ideal, SeriesKind, StructureTensor};
use crate::derivations::{derivation_space, inner_derivations};
use crate::error::{domain, input, Result};
use crate::linalg::{jordan_block_sizes, subspace_intersect, unit, Subspace, Vector};
use crate::scalar::{q, Scalar};

#[derive(Clone, Debug, Serialize)]
pub struct CharSequence {
    /// Jordan block sizes of `R_witness`, decreasing.
    pub sequence: Vec<usize>,
    pub witness: Vector,
    /// Sequences of the basis vectors outside `L^2`, by 1-based index.
    pub basis_sequences: Vec<(usize, Vec<usize>)>,
    /// Largest sequence among the random samples, if any were drawn.
    pub sample_max: Option<Vec<usize>>,
    pub samples_tried: usize,
    pub seed: u64,
    /// The result is the maximum over the tested elements only, a lower
    /// bound for the characteristic sequence of the algebra.
    pub lower_bound_only: bool,
}

/// Jordan block sizes of `R_x`; `x` must have nilpotent right multiplication.
pub fn sequence_of(t: &StructureTensor, x: &[Scalar]) -> Result<Vec<usize>> {
    jordan_block_sizes(&t.right_mult(x))
}

const SAMPLE_VALUES: [(i64, i64); 9] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 1), (-3, 1)];

/// Maximum of `C(x)` over the basis vectors outside `L^2` and
/// `extra_samples` random combinations outside `L^2`. Restricted to
/// nilpotent algebras, where every `R_x` is nilpotent.
pub fn characteristic_sequence(t: &StructureTensor, extra_samples: usize, seed: u64) -> Result<CharSequence> {
    if !is_nilpotent_algebra(t) {
        return domain("characteristic sequences are computed for nilpotent algebras only");
    }
    let n = t.dim();
    let ser = series(t, SeriesKind::LowerCentral);
    let l2 = ser.terms.get(1).cloned().unwrap_or_else(|| Subspace::zero(n));
    let mut best: Option<(Vec<usize>, Vector)> = None;
    let consider = |seq: Vec<usize>, x: Vector, best: &mut Option<(Vec<usize>, Vector)>| {
        if best.as_ref().map_or(true, |(b, _)| seq > *b) {
            *best = Some((seq, x));
        }
    };
    let mut basis_sequences = Vec::new();
    for i in 1..=n {
        let e = unit(n, i);
        if l2.contains_vector(&e) {
            continue;
        }
        let seq = sequence_of(t, &e)?;
        basis_sequences.push((i, seq.clone()));
        consider(seq, e, &mut best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_max: Option<Vec<usize>> = None;
    let mut tried = 0;
    while tried < extra_samples {
        let x: Vector = (0..n)
            .map(|_| {
                let (a, b) = *SAMPLE_VALUES.choose(&mut rng).expect("nonempty");
                q(a, b)
            })
            .collect();
        if l2.contains_vector(&x) {
            continue;
        }
        tried += 1;
        let seq = sequence_of(t, &x)?;
        if sample_max.as_ref().map_or(true, |m| seq > *m) {
            sample_max = Some(seq.clone());
        }
        consider(seq, x, &mut best);
    }
    let Some((sequence, witness)) = best else {
        return domain("no element outside L^2 with nilpotent right multiplication");
    };
    Ok(CharSequence {
        sequence,
        witness,
        basis_sequences,
        sample_max,
        samples_tried: tried,
        seed,
        lower_bound_only: true,
    })
}

/// Isomorphism invariants, each defined without reference to a basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub dim: usize,
    pub lower_central_dims: Vec<usize>,
    pub derived_dims: Vec<usize>,
    pub dim_ann_r: usize,
    pub dim_ann_l: usize,
    pub dim_center: usize,
    pub dim_der: usize,
    pub dim_inner: usize,
    pub dim_squares_ideal: usize,
    pub is_lie: bool,
}

pub const FINGERPRINT_FIELDS: [&str; 10] = [
    "dim",
    "lower_central_dims",
    "derived_dims",
    "dim_ann_r",
    "dim_ann_l",
    "dim_center",
    "dim_der",
    "dim_inner",
    "dim_squares_ideal",
    "is_lie",
];

pub fn fingerprint(t: &StructureTensor) -> Fingerprint {
    let ann = annihilators(t);
    let center = subspace_intersect(&ann.ann_r, &ann.ann_l).expect("same ambient space");
    Fingerprint {
        dim: t.dim(),
        lower_central_dims: series(t, SeriesKind::LowerCentral).dims,
        derived_dims: series(t, SeriesKind::Derived).dims,
        dim_ann_r: ann.ann_r.dim(),
        dim_ann_l: ann.ann_l.dim(),
        dim_center: center.dim(),
        dim_der: derivation_space(t).dim(),
        dim_inner: inner_derivations(t).dim(),
        dim_squares_ideal: squares_ideal(t).dim(),
        is_lie: is_lie(t),
    }
}

impl Fingerprint {
    /// Name of the first field where the two fingerprints differ.
    pub fn first_difference(&self, o: &Fingerprint) -> Option<&'static str> {
        let diffs = [
            self.dim != o.dim,
            self.lower_central_dims != o.lower_central_dims,
            self.derived_dims != o.derived_dims,
            self.dim_ann_r != o.dim_ann_r,
            self.dim_ann_l != o.dim_ann_l,
            self.dim_center != o.dim_center,
            self.dim_der != o.dim_der,
            self.dim_inner != o.dim_inner,
            self.dim_squares_ideal != o.dim_squares_ideal,
            self.is_lie != o.is_lie,
        ];
        diffs.iter().position(|d| *d).map(|k| FINGERPRINT_FIELDS[k])
    }
}

pub const COLLISION_MARKER: &str = "needs-manual-argument";

#[derive(Clone, Debug, Serialize)]
pub struct PairVerdict {
    pub a: String,
    pub b: String,
    /// First fingerprint field that differs.
    pub distinguished_by: Option<String>,
    /// Set on collisions: the invariants cannot separate the pair.
    pub marker: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairwiseReport {
    pub names: Vec<String>,
    pub fingerprints: Vec<Fingerprint>,
    pub pairs: Vec<PairVerdict>,
    pub collisions: usize,
}

/// Compares every unordered pair of the list by fingerprint.
pub fn pairwise_distinguish(list: &[(String, StructureTensor)]) -> Result<PairwiseReport> {
    if let Some((_, first)) = list.first() {
        if list.iter().any(|(_, t)| t.dim() != first.dim()) {
            return input("pairwise comparison needs algebras of equal dimension");
        }
    }
    let fps: Vec<Fingerprint> = list.iter().map(|(_, t)| fingerprint(t)).collect();
    let mut pairs = Vec::new();
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            let d = fps[i].first_difference(&fps[j]);
            pairs.push(PairVerdict {
                a: list[i].0.clone(),
                b: list[j].0.clone(),
                distinguished_by: d.map(str::to_string),
                marker: d.is_none().then(|| COLLISION_MARKER.to_string()),
            });
        }
    }
    let collisions = pairs.iter().filter(|p| p.marker.is_some()).count();
    Ok(PairwiseReport { names: list.iter().map(|(n, _)| n.clone()).collect(), fingerprints: fps, pairs, collisions })
}

impl PairwiseReport {
    /// Plain-text table, one line per pair.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            let verdict = match (&p.distinguished_by, &p.marker) {
                (Some(f), _) => format!("distinguished by {f}"),
                (None, Some(m)) => format!("collision ({m})"),
                _ => unreachable!(),
            };
            out.push_str(&format!("{:<24} {:<24} {verdict}\n", p.a, p.b));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_sequence_is_all_ones() {
        let t = StructureTensor::new(4);
        let c = characteristic_sequence(&t, 5, 1).unwrap();
        assert_eq!(c.sequence, vec![1, 1, 1, 1]);
    }

    #[test]
    fn self_comparison_collides() {
        let mut t = StructureTensor::new(3);
        t.set(1, 1, 2, Scalar::one());
        let r = pairwise_distinguish(&[("a".into(), t.clone()), ("b".into(), t)]).unwrap();
        assert_eq!(r.collisions, 1);
        assert_eq!(r.pairs[0].marker.as_deref(), Some(COLLISION_MARKER));
    }
}
