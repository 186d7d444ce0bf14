//! The group K = PGL(4,q), acting on PG(9,q) through congruence `A -> X A X^T`.
//!
//! Elements are stored as normalized 4x4 matrices together with the induced 10x10
//! matrix on symmetric-matrix coordinates. Composition is left action:
//! `(g * h)(A) = g(h(A))`.

use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{normalize, rref, Coords, ProjectiveIndexer, Subspace, SymPoint, NCOORDS, UPPER};
use crate::gf::{Field, FieldElement};

pub type Mat4 = [[FieldElement; 4]; 4];
pub type Lift = [[FieldElement; NCOORDS]; NCOORDS];

pub fn mat_identity() -> Mat4 {
    let mut m = [[FieldElement::ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = FieldElement::ONE;
    }
    m
}

pub fn mat_mul(f: &Field, a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[FieldElement::ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let x = a[i][k];
            if x.is_zero() {
                continue;
            }
            for j in 0..4 {
                out[i][j] = f.mul_add(out[i][j], x, b[k][j]);
            }
        }
    }
    out
}

/// Scales so that the first nonzero entry in row-major order is 1.
pub fn mat_normalize(f: &Field, m: &mut Mat4) {
    normalize(f, m.as_flattened_mut());
}

pub fn mat_inverse(f: &Field, m: &Mat4) -> Option<Mat4> {
    let mut a = *m;
    let mut inv = mat_identity();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let s = f.inv_nz(a[col][col]);
        for j in 0..4 {
            a[col][j] = f.mul(a[col][j], s);
            inv[col][j] = f.mul(inv[col][j], s);
        }
        for r in 0..4 {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = f.neg(a[r][col]);
            for j in 0..4 {
                a[r][j] = f.mul_add(a[r][j], factor, a[col][j]);
                inv[r][j] = f.mul_add(inv[r][j], factor, inv[col][j]);
            }
        }
    }
    Some(inv)
}

/// `M v` for a column vector `v`.
#[inline]
pub fn mat_vec(f: &Field, m: &Mat4, v: &[FieldElement; 4]) -> [FieldElement; 4] {
    let mut out = [FieldElement::ZERO; 4];
    for i in 0..4 {
        let mut acc = FieldElement::ZERO;
        for j in 0..4 {
            acc = f.mul_add(acc, m[i][j], v[j]);
        }
        out[i] = acc;
    }
    out
}

/// Matrix of `A -> X A X^T` on upper-triangular coordinates.
pub fn lift_matrix(f: &Field, x: &Mat4) -> Lift {
    let mut l = [[FieldElement::ZERO; NCOORDS]; NCOORDS];
    for (col, &(i, j)) in UPPER.iter().enumerate() {
        // image of the basis matrix E_ii, or E_ij + E_ji for i < j
        for (row, &(a, b)) in UPPER.iter().enumerate() {
            let v = if i == j {
                f.mul(x[a][i], x[b][i])
            } else {
                f.add(f.mul(x[a][i], x[b][j]), f.mul(x[a][j], x[b][i]))
            };
            l[row][col] = v;
        }
    }
    l
}

/// `L v` on coordinates.
#[inline]
pub fn lift_apply(f: &Field, l: &Lift, v: &Coords) -> Coords {
    let mut out = [FieldElement::ZERO; NCOORDS];
    for (c, &x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for r in 0..NCOORDS {
            out[r] = f.mul_add(out[r], l[r][c], x);
        }
    }
    out
}

/// An element of K: a normalized invertible 4x4 matrix and its cached lift.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    mat: Mat4,
    lift: Lift,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<Vec<u8>> = self.mat.iter().map(|r| r.iter().map(|x| x.code()).collect()).collect();
        write!(f, "GroupElement{m:?}")
    }
}

impl GroupElement {
    pub fn identity() -> GroupElement {
        let mut lift = [[FieldElement::ZERO; NCOORDS]; NCOORDS];
        for (i, row) in lift.iter_mut().enumerate() {
            row[i] = FieldElement::ONE;
        }
        GroupElement {
            mat: mat_identity(),
            lift,
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.mat
    }

    pub fn lift_matrix(&self) -> &Lift {
        &self.lift
    }

    pub fn is_identity(&self) -> bool {
        self.mat == mat_identity()
    }

    /// Builds from an invertible matrix known to be normalized.
    pub(crate) fn from_normalized(f: &Field, mat: Mat4) -> GroupElement {
        GroupElement {
            lift: lift_matrix(f, &mat),
            mat,
        }
    }

    pub fn mul(&self, f: &Field, other: &GroupElement) -> GroupElement {
        let mut m = mat_mul(f, &self.mat, &other.mat);
        mat_normalize(f, &mut m);
        GroupElement::from_normalized(f, m)
    }

    pub fn inverse(&self, f: &Field) -> GroupElement {
        let mut m = mat_inverse(f, &self.mat).expect("group elements are invertible");
        mat_normalize(f, &mut m);
        GroupElement::from_normalized(f, m)
    }

    /// Unnormalized image of a coordinate vector.
    #[inline]
    pub fn apply(&self, f: &Field, v: &Coords) -> Coords {
        lift_apply(f, &self.lift, v)
    }

    pub fn to_text(&self, f: &Field) -> String {
        self.mat
            .iter()
            .flatten()
            .map(|&x| f.render(x))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses 16 element tokens (row-major).
    pub fn from_text(f: &Field, text: &str) -> Result<GroupElement> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 16 {
            return Err(Error::parse(
                0,
                0,
                format!("expected 16 matrix entries, found {}", toks.len()),
            ));
        }
        let mut m = [[FieldElement::ZERO; 4]; 4];
        for (k, t) in toks.iter().enumerate() {
            m[k / 4][k % 4] = f.parse(t)?;
        }
        lift(f, &m)
    }
}

/// The element of K induced by an invertible matrix.
pub fn lift(f: &Field, x: &Mat4) -> Result<GroupElement> {
    let mut m = *x;
    if mat_inverse(f, &m).is_none() {
        return Err(Error::SingularMatrix);
    }
    mat_normalize(f, &mut m);
    Ok(GroupElement::from_normalized(f, m))
}

pub fn act_point(f: &Field, g: &GroupElement, p: &SymPoint) -> SymPoint {
    SymPoint::new(f, g.apply(f, p.coords())).expect("invertible action")
}

pub fn act_subspace(f: &Field, g: &GroupElement, w: &Subspace) -> Subspace {
    let mut rows: Vec<Coords> = w.rows().iter().map(|r| g.apply(f, r)).collect();
    rref(f, &mut rows);
    Subspace::from_rref(&rows).expect("invertible action preserves rank")
}

/// `|PGL(4,q)| = prod_{i<4} (q^4 - q^i) / (q - 1)`.
pub fn pgl4_order(q: u32) -> u64 {
    let q = q as u64;
    let q4 = q.pow(4);
    (0..4).map(|i| q4 - q.pow(i)).product::<u64>() / (q - 1)
}

/// A list of generators with an optional certified order.
#[derive(Clone, Debug, Default)]
pub struct GeneratingSet {
    pub gens: Vec<GroupElement>,
    pub claimed_order: Option<u64>,
}

impl GeneratingSet {
    pub fn new(gens: Vec<GroupElement>) -> Self {
        GeneratingSet {
            gens,
            claimed_order: None,
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// Generators of GL(4,q) modulo scalars: `diag(a,1,1,1)`, the 4-cycle permutation
/// matrix and the transvection `I + E_01`. The transvection and 4-cycle generate the
/// elementary matrices with entry 1, conjugation by the diagonal element supplies
/// all other entries, and the diagonal element adds every determinant.
pub fn pgl4_generators(f: &Field) -> GeneratingSet {
    let one = FieldElement::ONE;
    let mut gens = Vec::new();
    if f.q() > 2 {
        let mut d = mat_identity();
        d[0][0] = f.primitive();
        gens.push(lift(f, &d).unwrap());
    }
    let mut cyc = [[FieldElement::ZERO; 4]; 4];
    for i in 0..4 {
        cyc[(i + 1) % 4][i] = one;
    }
    gens.push(lift(f, &cyc).unwrap());
    let mut t = mat_identity();
    t[0][1] = one;
    gens.push(lift(f, &t).unwrap());
    GeneratingSet {
        gens,
        claimed_order: Some(pgl4_order(f.q())),
    }
}

/// PGL(4,q) as a permutation group on the points of PG(3,q) (column vectors).
#[derive(Clone, Debug)]
pub struct Pg3Action {
    ix: ProjectiveIndexer,
    points: Vec<[FieldElement; 4]>,
}

impl Pg3Action {
    pub fn new(f: &Field) -> Self {
        let ix = ProjectiveIndexer::new(f.q(), 4);
        let points = (0..ix.count())
            .map(|i| {
                let mut v = [FieldElement::ZERO; 4];
                ix.decode(i, &mut v);
                v
            })
            .collect();
        Pg3Action { ix, points }
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &[FieldElement; 4] {
        &self.points[i]
    }

    pub fn index_of(&self, f: &Field, v: &[FieldElement; 4]) -> Option<usize> {
        let mut w = *v;
        self.ix.normalize_index(f, &mut w).map(|i| i as usize)
    }

    pub fn perm(&self, f: &Field, m: &Mat4) -> Vec<u16> {
        self.points
            .iter()
            .map(|v| {
                let mut w = mat_vec(f, m, v);
                self.ix.normalize_index(f, &mut w).expect("invertible") as u16
            })
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geom::{index_point, pg9, rank_of, veronese, SymMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_invertible(f: &Field, rng: &mut impl Rng) -> Mat4 {
        loop {
            let mut m = [[FieldElement::ZERO; 4]; 4];
            for x in m.iter_mut().flatten() {
                *x = f.element(rng.gen_range(0..f.q())).unwrap();
            }
            if mat_inverse(f, &m).is_some() {
                return m;
            }
        }
    }

    #[test]
    fn orders() {
        assert_eq!(pgl4_order(2), 20160);
        assert_eq!(pgl4_order(3), 12130560);
        assert_eq!(pgl4_order(4), 987033600);
    }

    #[test]
    fn identity_lift_fixes_everything() {
        let f = Field::new(3).unwrap();
        let id = lift(&f, &mat_identity()).unwrap();
        assert!(id.is_identity());
        for i in (0..pg9(&f).count()).step_by(37) {
            let p = index_point(&f, i).unwrap();
            assert_eq!(act_point(&f, &id, &p), p);
        }
    }

    #[test]
    fn singular_rejected() {
        let f = Field::new(5).unwrap();
        let z = [[FieldElement::ZERO; 4]; 4];
        assert!(matches!(lift(&f, &z), Err(Error::SingularMatrix)));
    }

    #[test]
    fn diagonal_scales_last_coordinate() {
        let f = Field::new(5).unwrap();
        let c = f.from_int(2);
        let mut d = mat_identity();
        d[3][3] = c;
        let g = lift(&f, &d).unwrap();
        let p1 = SymMatrix::identity().coords();
        let img = g.apply(&f, &p1);
        assert_eq!(img[..9], p1[..9]);
        assert_eq!(img[9], f.mul(c, c));
    }

    #[test]
    fn lift_is_a_homomorphism() {
        let f = Field::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = pg9(&f).count();
        for _ in 0..100 {
            let x = lift(&f, &random_invertible(&f, &mut rng)).unwrap();
            let y = lift(&f, &random_invertible(&f, &mut rng)).unwrap();
            let xy = x.mul(&f, &y);
            let p = index_point(&f, rng.gen_range(0..n)).unwrap();
            assert_eq!(act_point(&f, &xy, &p), act_point(&f, &x, &act_point(&f, &y, &p)));
            assert_eq!(act_point(&f, &x.inverse(&f), &act_point(&f, &x, &p)), p);
        }
    }

    #[test]
    fn congruence_matches_lift() {
        let f = Field::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = random_invertible(&f, &mut rng);
            let g = lift(&f, &x).unwrap();
            let p = index_point(&f, rng.gen_range(0..pg9(&f).count())).unwrap();
            let a = p.matrix();
            let mut xt = [[FieldElement::ZERO; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    xt[i][j] = x[j][i];
                }
            }
            let xa = mat_mul(&f, &x, a.entries());
            let xaxt = mat_mul(&f, &xa, &xt);
            let expected = SymPoint::new(&f, SymMatrix::new(xaxt).unwrap().coords()).unwrap();
            assert_eq!(act_point(&f, &g, &p), expected);
            assert_eq!(rank_of(&f, &act_point(&f, &g, &p)), rank_of(&f, &p));
        }
    }

    #[test]
    fn veronese_equivariance_exhaustive_small() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            let pg3 = Pg3Action::new(&f);
            let gens = pgl4_generators(&f);
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            let mut elements = gens.gens.clone();
            for _ in 0..20 {
                elements.push(lift(&f, &random_invertible(&f, &mut rng)).unwrap());
            }
            for g in &elements {
                for i in 0..pg3.degree() {
                    let s = *pg3.point(i);
                    let lhs = act_point(&f, g, &veronese(&f, s).unwrap());
                    let rhs = veronese(&f, mat_vec(&f, g.matrix(), &s)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let f = Field::new(9).unwrap();
        for g in pgl4_generators(&f).gens {
            assert_eq!(GroupElement::from_text(&f, &g.to_text(&f)).unwrap(), g);
        }
    }
}
