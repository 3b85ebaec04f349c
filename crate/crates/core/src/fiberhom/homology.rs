//! Reduced simplicial homology of complexes given by their facets.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient field for homology ranks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[default]
    Rational,
    /// `Z/p` for a prime `p < 2^31`.
    Prime(u64),
}

/// A simplicial complex on vertices `0..64`, stored by its inclusion-maximal
/// generators as bitmasks. The empty complex `{∅}` is a single zero mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    generators: Vec<u64>,
}

impl SimplicialComplex {
    /// Keeps only the inclusion-maximal sets.
    pub fn from_generators(sets: impl IntoIterator<Item = u64>) -> Self {
        let mut sets: Vec<u64> = sets.into_iter().collect();
        sets.sort_unstable_by_key(|s| std::cmp::Reverse(s.count_ones()));
        sets.dedup();
        let mut facets: Vec<u64> = Vec::with_capacity(sets.len());
        for s in sets {
            if !facets.iter().any(|&f| f & s == s) {
                facets.push(s);
            }
        }
        facets.sort_unstable();
        SimplicialComplex { generators: facets }
    }

    pub fn from_vertex_lists(sets: &[Vec<usize>]) -> Self {
        Self::from_generators(
            sets.iter()
                .map(|s| s.iter().fold(0u64, |m, &v| m | (1 << v))),
        )
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn vertex_mask(&self) -> u64 {
        self.generators.iter().fold(0, |m, &g| m | g)
    }

    /// `h̃_0 … h̃_max_dim`, choosing whichever of the face complex or the nerve
    /// of the generators has fewer vertices (the two are homotopy equivalent).
    pub fn reduced_homology(&self, max_dim: usize, field: Field) -> Vec<usize> {
        let nv = self.vertex_mask().count_ones() as usize;
        if self.generators.len() < nv {
            self.nerve_homology(max_dim, field)
        } else {
            self.face_homology(max_dim, field)
        }
    }

    /// Homology through the faces of the complex itself.
    pub fn face_homology(&self, max_dim: usize, field: Field) -> Vec<usize> {
        let mask = self.vertex_mask();
        let verts: Vec<usize> = (0..64).filter(|&v| mask >> v & 1 == 1).collect();
        let gens = &self.generators;
        homology_of(verts.len(), max_dim, field, |face| {
            let m = face.iter().fold(0u64, |m, &i| m | (1 << verts[i]));
            gens.iter().any(|&g| g & m == m)
        })
    }

    /// Homology through the nerve of the generating simplices.
    pub fn nerve_homology(&self, max_dim: usize, field: Field) -> Vec<usize> {
        let gens = &self.generators;
        homology_of(gens.len(), max_dim, field, |face| {
            face.iter().fold(u64::MAX, |m, &i| m & gens[i]) != 0
        })
    }
}

/// Reduced homology ranks `h̃_0..=h̃_max_dim` over the rationals.
pub fn reduced_homology_ranks(k: &SimplicialComplex, max_dim: usize) -> Vec<usize> {
    k.reduced_homology(max_dim, Field::Rational)
}

/// Reduced homology of the downward-closed family of subsets of `0..nv`
/// accepted by `is_face`.
fn homology_of(
    nv: usize,
    max_dim: usize,
    field: Field,
    is_face: impl Fn(&[usize]) -> bool,
) -> Vec<usize> {
    // faces[k] = sorted k-dimensional faces, up to dimension max_dim + 1.
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::new();
    let level0: Vec<Vec<usize>> = (0..nv).map(|v| vec![v]).filter(|f| is_face(f)).collect();
    faces.push(level0);
    for k in 1..=max_dim + 1 {
        let prev = &faces[k - 1];
        let mut next = Vec::new();
        for f in prev {
            let last = *f.last().unwrap();
            for v in last + 1..nv {
                let mut g = f.clone();
                g.push(v);
                // every facet of g must already be a face; checking the predicate suffices
                if is_face(&g) {
                    next.push(g);
                }
            }
        }
        faces.push(next);
    }
    if faces[0].is_empty() {
        return vec![0; max_dim + 1];
    }
    // rank of ∂_k : C_k → C_{k-1}; ∂_0 is the augmentation of rank 1.
    let mut ranks = vec![1usize];
    for k in 1..=max_dim + 1 {
        ranks.push(boundary_rank(&faces[k - 1], &faces[k], field));
    }
    (0..=max_dim)
        .map(|k| faces[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

fn boundary_rank(lower: &[Vec<usize>], upper: &[Vec<usize>], field: Field) -> usize {
    if lower.is_empty() || upper.is_empty() {
        return 0;
    }
    let index: std::collections::HashMap<&[usize], usize> = lower
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_slice(), i))
        .collect();
    let mut m = vec![vec![0i64; lower.len()]; upper.len()];
    for (r, f) in upper.iter().enumerate() {
        for drop in 0..f.len() {
            let mut g = f.clone();
            g.remove(drop);
            let c = index[g.as_slice()];
            m[r][c] = if drop % 2 == 0 { 1 } else { -1 };
        }
    }
    matrix_rank(m, field)
}

/// Rank of an integer matrix over the given field.
pub fn matrix_rank(m: Vec<Vec<i64>>, field: Field) -> usize {
    match field {
        Field::Rational => bareiss_rank_i128(&m).unwrap_or_else(|| bareiss_rank_big(&m)),
        Field::Prime(p) => rank_mod_p(&m, p),
    }
}

/// Fraction-free elimination; `None` on overflow.
fn bareiss_rank_i128(m: &[Vec<i64>]) -> Option<usize> {
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let t = a[rank][c]
                    .checked_mul(a[r][cc])?
                    .checked_sub(a[r][c].checked_mul(a[rank][cc])?)?;
                a[r][cc] = t / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn bareiss_rank_big(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let t = &a[rank][c] * &a[r][cc] - &a[r][c] * &a[rank][cc];
                a[r][cc] = t / &prev;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn rank_mod_p(m: &[Vec<i64>], p: u64) -> usize {
    let p = p as i64;
    let mut a: Vec<Vec<i64>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = mod_pow(a[rank][c], p - 2, p);
        for r in rank + 1..rows {
            if a[r][c] == 0 {
                continue;
            }
            let f = a[r][c] * inv % p;
            for cc in c..cols {
                a[r][cc] = (a[r][cc] - f * a[rank][cc]).rem_euclid(p);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mod_pow(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1i64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(sets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::from_vertex_lists(&sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn spheres() {
        assert_eq!(reduced_homology_ranks(&cx(&[&[0], &[1]]), 2), vec![1, 0, 0]);
        assert_eq!(
            reduced_homology_ranks(&cx(&[&[0, 1], &[1, 2], &[0, 2]]), 2),
            vec![0, 1, 0]
        );
        let tetra = cx(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        assert_eq!(reduced_homology_ranks(&tetra, 2), vec![0, 0, 1]);
    }

    #[test]
    fn contractible_and_empty() {
        assert_eq!(reduced_homology_ranks(&cx(&[&[0, 1, 2]]), 2), vec![0, 0, 0]);
        assert_eq!(
            reduced_homology_ranks(&cx(&[&[0, 1], &[1, 2]]), 2),
            vec![0, 0, 0]
        );
        assert_eq!(
            reduced_homology_ranks(&SimplicialComplex::from_generators([0]), 2),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn nerve_and_faces_agree() {
        let cases: Vec<Vec<&[usize]>> = vec![
            vec![&[0, 1], &[2, 3]],
            vec![&[0, 1, 2], &[2, 3, 4], &[4, 5, 0]],
            vec![&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            vec![&[0, 1, 2], &[0, 3], &[3, 4], &[4, 2]],
            vec![&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        ];
        for c in cases {
            let k = cx(&c);
            for f in [Field::Rational, Field::Prime(3)] {
                assert_eq!(k.face_homology(3, f), k.nerve_homology(3, f), "{c:?}");
            }
        }
    }

    #[test]
    fn projective_plane_depends_on_field() {
        // six-vertex triangulation of RP^2
        let rp2 = cx(&[
            &[0, 1, 2],
            &[0, 2, 3],
            &[0, 3, 4],
            &[0, 4, 5],
            &[0, 5, 1],
            &[1, 2, 4],
            &[2, 3, 5],
            &[3, 4, 1],
            &[4, 5, 2],
            &[5, 1, 3],
        ]);
        assert_eq!(rp2.face_homology(2, Field::Rational), vec![0, 0, 0]);
        assert_eq!(rp2.face_homology(2, Field::Prime(2)), vec![0, 1, 1]);
    }

    #[test]
    fn ranks_agree_across_routes() {
        let m = vec![vec![2, 4, 6], vec![1, 3, 5], vec![3, 7, 11]];
        assert_eq!(bareiss_rank_i128(&m), Some(2));
        assert_eq!(bareiss_rank_big(&m), 2);
        assert_eq!(rank_mod_p(&m, 2), 1);
    }
}
