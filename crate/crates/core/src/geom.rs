//! Points and subspaces of PG(9,q) in the symmetric-matrix coordinatization.
//!
//! A symmetric 4x4 matrix `A` is stored through its upper triangle read row by row:
//! `(a11, a12, a13, a14, a22, a23, a24, a33, a34, a44)`. Projective points are
//! normalized so that the first nonzero coordinate is 1, and normalized tuples are
//! indexed lexicographically by their codes.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};

/// Number of coordinates of PG(9,q).
pub const NCOORDS: usize = 10;

pub type Coords = [FieldElement; NCOORDS];

/// Matrix position `(i, j)`, `i <= j`, of each coordinate.
pub const UPPER: [(usize, usize); NCOORDS] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// Coordinate slot holding matrix entry `(i, j)` (either order).
#[inline]
pub fn coord_slot(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows start at 0, 4, 7, 9
    const ROW_START: [usize; 4] = [0, 4, 7, 9];
    ROW_START[i] + (j - i)
}

/// Scales `v` so its first nonzero entry is 1. Returns false for the zero vector.
#[inline]
pub fn normalize(f: &Field, v: &mut [FieldElement]) -> bool {
    let Some(lead) = v.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let c = v[lead];
    if c != FieldElement::ONE {
        let s = f.inv_nz(c);
        for x in &mut v[lead..] {
            *x = f.mul(*x, s);
        }
    }
    true
}

/// Dense lexicographic indexing of the normalized points of PG(len-1, q).
///
/// Tuples with a later leading position sort first, so index 0 is `(0, ..., 0, 1)`.
#[derive(Clone, Debug)]
pub struct ProjectiveIndexer {
    q: u64,
    len: usize,
    /// `offsets[t]` counts normalized tuples whose leading 1 sits after position `t`.
    offsets: Vec<u64>,
    count: u64,
}

impl ProjectiveIndexer {
    pub fn new(q: u32, len: usize) -> Self {
        let q = q as u64;
        let offsets: Vec<u64> = (0..len).map(|t| (q.pow((len - 1 - t) as u32) - 1) / (q - 1)).collect();
        let count = (q.pow(len as u32) - 1) / (q - 1);
        ProjectiveIndexer { q, len, offsets, count }
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Coordinates per tuple.
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Index of an already normalized tuple.
    #[inline]
    pub fn index_normalized(&self, v: &[FieldElement]) -> u64 {
        debug_assert_eq!(v.len(), self.len);
        let lead = v.iter().position(|x| !x.is_zero()).expect("zero tuple");
        debug_assert_eq!(v[lead], FieldElement::ONE);
        let mut tail = 0u64;
        for x in &v[lead + 1..] {
            tail = tail * self.q + x.0 as u64;
        }
        self.offsets[lead] + tail
    }

    /// Normalizes `v` in place and returns its index; `None` for the zero tuple.
    #[inline]
    pub fn normalize_index(&self, f: &Field, v: &mut [FieldElement]) -> Option<u64> {
        if normalize(f, v) {
            Some(self.index_normalized(v))
        } else {
            None
        }
    }

    /// Writes the normalized tuple with index `i` into `out`.
    pub fn decode(&self, i: u64, out: &mut [FieldElement]) {
        debug_assert!(i < self.count);
        let lead = self.offsets.iter().position(|&o| i >= o).expect("index in range");
        let mut tail = i - self.offsets[lead];
        for x in out[..lead].iter_mut() {
            *x = FieldElement::ZERO;
        }
        out[lead] = FieldElement::ONE;
        for x in out[lead + 1..self.len].iter_mut().rev() {
            *x = FieldElement((tail % self.q) as u8);
            tail /= self.q;
        }
    }
}

/// A symmetric 4x4 matrix over GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymMatrix {
    entries: [[FieldElement; 4]; 4],
}

impl SymMatrix {
    /// Builds a symmetric matrix, rejecting asymmetric input.
    pub fn new(entries: [[FieldElement; 4]; 4]) -> Result<SymMatrix> {
        for i in 0..4 {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::Invariant(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix { entries })
    }

    pub fn from_coords(c: &Coords) -> SymMatrix {
        let mut entries = [[FieldElement::ZERO; 4]; 4];
        for (slot, &(i, j)) in UPPER.iter().enumerate() {
            entries[i][j] = c[slot];
            entries[j][i] = c[slot];
        }
        SymMatrix { entries }
    }

    pub fn coords(&self) -> Coords {
        let mut c = [FieldElement::ZERO; NCOORDS];
        for (slot, &(i, j)) in UPPER.iter().enumerate() {
            c[slot] = self.entries[i][j];
        }
        c
    }

    pub fn entries(&self) -> &[[FieldElement; 4]; 4] {
        &self.entries
    }

    pub fn identity() -> SymMatrix {
        let mut entries = [[FieldElement::ZERO; 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = FieldElement::ONE;
        }
        SymMatrix { entries }
    }

    pub fn diagonal(d: [FieldElement; 4]) -> SymMatrix {
        let mut entries = [[FieldElement::ZERO; 4]; 4];
        for i in 0..4 {
            entries[i][i] = d[i];
        }
        SymMatrix { entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_zero())
    }
}

/// A point of PG(9,q): normalized coordinates plus their dense index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymPoint {
    index: u64,
    coords: Coords,
}

impl SymPoint {
    /// Normalizes `coords`; fails on the zero vector.
    pub fn new(f: &Field, coords: Coords) -> Result<SymPoint> {
        let mut c = coords;
        let index = pg9(f).normalize_index(f, &mut c).ok_or(Error::ZeroVector)?;
        Ok(SymPoint { index, coords: c })
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn matrix(&self) -> SymMatrix {
        point_to_matrix(self)
    }
}

/// The indexer for points of PG(9,q).
pub fn pg9(f: &Field) -> ProjectiveIndexer {
    ProjectiveIndexer::new(f.q(), NCOORDS)
}

/// Number of points of PG(9,q).
pub fn point_count(q: u32) -> u64 {
    ProjectiveIndexer::new(q, NCOORDS).count()
}

pub fn point_index(p: &SymPoint) -> u64 {
    p.index
}

pub fn index_point(f: &Field, i: u64) -> Result<SymPoint> {
    let ix = pg9(f);
    if i >= ix.count() {
        return Err(Error::IndexOutOfRange {
            index: i,
            count: ix.count(),
        });
    }
    let mut coords = [FieldElement::ZERO; NCOORDS];
    ix.decode(i, &mut coords);
    Ok(SymPoint { index: i, coords })
}

/// The quadratic Veronese map: `s` goes to the point of the rank-1 matrix `s^T s`.
pub fn veronese(f: &Field, s: [FieldElement; 4]) -> Result<SymPoint> {
    if s.iter().all(|x| x.is_zero()) {
        return Err(Error::ZeroVector);
    }
    let mut c = [FieldElement::ZERO; NCOORDS];
    for (slot, &(i, j)) in UPPER.iter().enumerate() {
        c[slot] = f.mul(s[i], s[j]);
    }
    SymPoint::new(f, c)
}

pub fn point_to_matrix(p: &SymPoint) -> SymMatrix {
    SymMatrix::from_coords(&p.coords)
}

pub fn matrix_to_point(f: &Field, a: &SymMatrix) -> Result<SymPoint> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    SymPoint::new(f, a.coords())
}

/// Determinant of a general 4x4 matrix by elimination.
pub fn det4(f: &Field, m: &[[FieldElement; 4]; 4]) -> FieldElement {
    let mut a = *m;
    let mut det = FieldElement::ONE;
    for col in 0..4 {
        let Some(piv) = (col..4).find(|&r| !a[r][col].is_zero()) else {
            return FieldElement::ZERO;
        };
        if piv != col {
            a.swap(piv, col);
            det = f.neg(det);
        }
        let pv = a[col][col];
        det = f.mul(det, pv);
        let inv = f.inv_nz(pv);
        for r in col + 1..4 {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = f.neg(f.mul(a[r][col], inv));
            for c in col..4 {
                a[r][c] = f.mul_add(a[r][c], factor, a[col][c]);
            }
        }
    }
    det
}

/// Determinant of the symmetric matrix with the given coordinates.
#[inline]
pub fn det_coords(f: &Field, c: &Coords) -> FieldElement {
    det4(f, SymMatrix::from_coords(c).entries())
}

/// Rank of a general 4x4 matrix.
pub fn rank4(f: &Field, m: &[[FieldElement; 4]; 4]) -> u8 {
    let mut a = *m;
    let mut rank = 0usize;
    for col in 0..4 {
        let Some(piv) = (rank..4).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = f.inv_nz(a[rank][col]);
        for r in rank + 1..4 {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = f.neg(f.mul(a[r][col], inv));
            for c in col..4 {
                a[r][c] = f.mul_add(a[r][c], factor, a[rank][c]);
            }
        }
        rank += 1;
    }
    rank as u8
}

pub fn rank_of(f: &Field, p: &SymPoint) -> u8 {
    rank_coords(f, &p.coords)
}

#[inline]
pub fn rank_coords(f: &Field, c: &Coords) -> u8 {
    rank4(f, SymMatrix::from_coords(c).entries())
}

/// Brings `rows` into reduced row-echelon form in place, dropping zero rows.
pub fn rref(f: &Field, rows: &mut Vec<Coords>) {
    let mut rank = 0usize;
    for col in 0..NCOORDS {
        if rank == rows.len() {
            break;
        }
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(piv, rank);
        let inv = f.inv_nz(rows[rank][col]);
        for x in rows[rank].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = f.neg(row[col]);
            for c in col..NCOORDS {
                row[c] = f.mul_add(row[c], factor, pivot_row[c]);
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
}

/// A projective subspace of PG(9,q) of dimension at most 3, kept in reduced
/// row-echelon form so that equality of bases is equality of point sets.
///
/// The derived ordering (vector dimension first, then rows) is the canonical
/// encoding order used for all tie-breaking.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    rank: u8,
    rows: [Coords; 4],
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u8>> = self.rows().iter().map(|r| r.iter().map(|x| x.0).collect()).collect();
        write!(f, "Subspace{rows:?}")
    }
}

impl Subspace {
    /// Linear span of the given coordinate vectors.
    pub fn span(f: &Field, vectors: &[Coords]) -> Result<Subspace> {
        if vectors.is_empty() {
            return Err(Error::ZeroVector);
        }
        let mut rows = vectors.to_vec();
        rref(f, &mut rows);
        Self::from_rref(&rows)
    }

    pub fn span_points(f: &Field, points: &[SymPoint]) -> Result<Subspace> {
        let v: Vec<Coords> = points.iter().map(|p| p.coords).collect();
        Self::span(f, &v)
    }

    pub(crate) fn from_rref(rows: &[Coords]) -> Result<Subspace> {
        if rows.is_empty() {
            return Err(Error::ZeroVector);
        }
        if rows.len() > 4 {
            return Err(Error::Invariant(format!(
                "span has vector dimension {} > 4",
                rows.len()
            )));
        }
        let mut out = [[FieldElement::ZERO; NCOORDS]; 4];
        out[..rows.len()].copy_from_slice(rows);
        Ok(Subspace {
            rank: rows.len() as u8,
            rows: out,
        })
    }

    pub fn point(p: &SymPoint) -> Subspace {
        let mut rows = [[FieldElement::ZERO; NCOORDS]; 4];
        rows[0] = p.coords;
        Subspace { rank: 1, rows }
    }

    /// Projective dimension.
    pub fn dim(&self) -> usize {
        self.rank as usize - 1
    }

    /// Vector-space dimension.
    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn rows(&self) -> &[Coords] {
        &self.rows[..self.rank as usize]
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect()
    }

    /// Reduces `v` modulo the subspace (zeroes its pivot columns).
    pub fn reduce(&self, f: &Field, v: &mut Coords) {
        for row in self.rows() {
            let piv = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let c = v[piv];
            if c.is_zero() {
                continue;
            }
            let factor = f.neg(c);
            for k in piv..NCOORDS {
                v[k] = f.mul_add(v[k], factor, row[k]);
            }
        }
    }

    pub fn contains(&self, f: &Field, v: &Coords) -> bool {
        let mut w = *v;
        self.reduce(f, &mut w);
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains_subspace(&self, f: &Field, other: &Subspace) -> bool {
        other.rows().iter().all(|r| self.contains(f, r))
    }

    /// Normalized coordinates of all points, streamed in increasing index order.
    ///
    /// Combinations of RREF rows with normalized coefficient vectors are already
    /// normalized, and their lexicographic order follows that of the coefficients.
    pub fn point_coords<'a>(&'a self, f: &'a Field) -> impl Iterator<Item = Coords> + 'a {
        let ix = ProjectiveIndexer::new(f.q(), self.rank());
        (0..ix.count()).map(move |i| {
            let mut c = [FieldElement::ZERO; 4];
            ix.decode(i, &mut c[..self.rank()]);
            self.combine(f, &c[..self.rank()])
        })
    }

    pub fn points<'a>(&'a self, f: &'a Field) -> impl Iterator<Item = SymPoint> + 'a {
        let ix = pg9(f);
        self.point_coords(f).map(move |coords| SymPoint {
            index: ix.index_normalized(&coords),
            coords,
        })
    }

    /// Number of points, `(q^r - 1)/(q - 1)`.
    pub fn point_count(&self, q: u32) -> u64 {
        ProjectiveIndexer::new(q, self.rank()).count()
    }

    /// `sum_i coeffs[i] * rows[i]`.
    pub fn combine(&self, f: &Field, coeffs: &[FieldElement]) -> Coords {
        let mut v = [FieldElement::ZERO; NCOORDS];
        for (c, row) in coeffs.iter().zip(self.rows()) {
            if c.is_zero() {
                continue;
            }
            for k in 0..NCOORDS {
                v[k] = f.mul_add(v[k], *c, row[k]);
            }
        }
        v
    }

    /// All subspaces of codimension one (for a point: none).
    pub fn hyperplanes(&self, f: &Field) -> Vec<Subspace> {
        let r = self.rank();
        if r == 1 {
            return Vec::new();
        }
        let ix = ProjectiveIndexer::new(f.q(), r);
        let mut out = Vec::with_capacity(ix.count() as usize);
        let mut func = [FieldElement::ZERO; 4];
        for i in 0..ix.count() {
            ix.decode(i, &mut func[..r]);
            let lead = func[..r].iter().position(|x| !x.is_zero()).unwrap();
            // kernel of the functional: e_k - func[k] e_lead for k != lead
            let mut rows = Vec::with_capacity(r - 1);
            for k in (0..r).filter(|&k| k != lead) {
                let mut coeffs = [FieldElement::ZERO; 4];
                coeffs[k] = FieldElement::ONE;
                coeffs[lead] = f.neg(func[k]);
                rows.push(self.combine(f, &coeffs[..r]));
            }
            rref(f, &mut rows);
            out.push(Subspace::from_rref(&rows).expect("hyperplane rank"));
        }
        out
    }

    /// True iff every point has rank 4, i.e. the subspace avoids the secant variety of
    /// matrices of rank at most 3. Stops at the first singular point.
    pub fn is_semifield(&self, f: &Field) -> bool {
        self.point_coords(f).all(|c| !det_coords(f, &c).is_zero())
    }

    /// Span of this subspace and one more vector.
    pub fn extend(&self, f: &Field, v: &Coords) -> Result<Subspace> {
        let mut rows = self.rows().to_vec();
        rows.push(*v);
        rref(f, &mut rows);
        Self::from_rref(&rows)
    }

    /// Canonical text form: one line of ten element tokens per basis row.
    pub fn to_text(&self, f: &Field) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(|&x| f.render(x)).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parses rows of ten tokens (blank lines and `#` comments ignored) and echelonizes.
    pub fn from_text(f: &Field, text: &str) -> Result<Subspace> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            rows.push(parse_coords(f, line, ln + 1)?);
        }
        Self::span(f, &rows)
    }
}

/// Parses ten whitespace-separated element tokens.
pub fn parse_coords(f: &Field, line: &str, line_no: usize) -> Result<Coords> {
    let mut c = [FieldElement::ZERO; NCOORDS];
    let mut n = 0;
    for tok in line.split_whitespace() {
        let col = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
        if n == NCOORDS {
            return Err(Error::parse(line_no, col, "more than 10 coordinates"));
        }
        c[n] = f
            .parse(tok)
            .map_err(|_| Error::parse(line_no, col, format!("bad token {tok:?}")))?;
        n += 1;
    }
    if n != NCOORDS {
        return Err(Error::parse(line_no, 1, format!("expected 10 coordinates, found {n}")));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(f: &Field, v: &[u32]) -> Coords {
        let mut c = [FieldElement::ZERO; NCOORDS];
        for (x, &y) in c.iter_mut().zip(v) {
            *x = f.element(y).unwrap();
        }
        c
    }

    #[test]
    fn coordinate_slots() {
        for (s, &(i, j)) in UPPER.iter().enumerate() {
            assert_eq!(coord_slot(i, j), s);
            assert_eq!(coord_slot(j, i), s);
        }
    }

    #[test]
    fn veronese_examples() {
        let f = Field::new(3).unwrap();
        let one = FieldElement::ONE;
        let z = FieldElement::ZERO;
        let p = veronese(&f, [one, z, z, z]).unwrap();
        assert_eq!(p.coords(), &fe(&f, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]));
        let p = veronese(&f, [one, one, z, z]).unwrap();
        assert_eq!(p.coords(), &fe(&f, &[1, 1, 0, 0, 1, 0, 0, 0, 0, 0]));
        assert!(matches!(veronese(&f, [z; 4]), Err(Error::ZeroVector)));
    }

    #[test]
    fn identity_point_and_ranks() {
        let f = Field::new(5).unwrap();
        let p1 = SymPoint::new(&f, fe(&f, &[1, 0, 0, 0, 1, 0, 0, 1, 0, 1])).unwrap();
        assert_eq!(point_to_matrix(&p1), SymMatrix::identity());
        assert_eq!(rank_of(&f, &p1), 4);
        let f2 = Field::new(2).unwrap();
        let alt = SymPoint::new(&f2, fe(&f2, &[0, 1, 0, 0, 0, 0, 0, 0, 1, 0])).unwrap();
        assert_eq!(rank_of(&f2, &alt), 4);
        assert_eq!(det_coords(&f2, alt.coords()), FieldElement::ONE);
    }

    #[test]
    fn matrix_round_trip_and_scaling() {
        let f = Field::new(7).unwrap();
        let ix = pg9(&f);
        for i in (0..ix.count()).step_by(997) {
            let p = index_point(&f, i).unwrap();
            assert_eq!(matrix_to_point(&f, &point_to_matrix(&p)).unwrap(), p);
            let c = f.from_int(3);
            let mut scaled = *p.coords();
            for x in scaled.iter_mut() {
                *x = f.mul(*x, c);
            }
            let m = SymMatrix::from_coords(&scaled);
            assert_eq!(matrix_to_point(&f, &m).unwrap(), p);
        }
        let zero = SymMatrix::from_coords(&[FieldElement::ZERO; NCOORDS]);
        assert!(matches!(matrix_to_point(&f, &zero), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn determinant_examples() {
        let f = Field::new(9).unwrap();
        assert_eq!(det4(&f, SymMatrix::identity().entries()), FieldElement::ONE);
        let w = f.primitive();
        let one = FieldElement::ONE;
        let d = SymMatrix::diagonal([one, one, one, w]);
        assert_eq!(det4(&f, d.entries()), w);
    }

    #[test]
    fn indexing() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(point_count(2), 1023);
        let p0 = index_point(&f2, 0).unwrap();
        assert_eq!(p0.coords(), &fe(&f2, &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
        assert!(matches!(index_point(&f2, 1023), Err(Error::IndexOutOfRange { .. })));
        let f3 = Field::new(3).unwrap();
        let ix = pg9(&f3);
        let mut prev: Option<Coords> = None;
        for i in 0..ix.count() {
            let p = index_point(&f3, i).unwrap();
            assert_eq!(SymPoint::new(&f3, *p.coords()).unwrap().index(), i);
            if let Some(prev) = prev {
                assert!(prev < *p.coords());
            }
            prev = Some(*p.coords());
        }
    }

    #[test]
    fn span_and_points() {
        let f = Field::new(8).unwrap();
        let a = fe(&f, &[1, 0, 0, 0, 1, 0, 0, 1, 0, 1]);
        let b = fe(&f, &[0, 1, 0, 0, 0, 0, 1, 0, 1, 0]);
        let line = Subspace::span(&f, &[a, b]).unwrap();
        assert_eq!(line.dim(), 1);
        assert_eq!(line.points(&f).count(), 9);
        let pa = SymPoint::new(&f, a).unwrap();
        assert_eq!(Subspace::span_points(&f, &[pa]).unwrap().rows(), &[a]);
        assert_eq!(
            Subspace::span_points(&f, &[pa, pa]).unwrap(),
            Subspace::span_points(&f, &[pa]).unwrap()
        );
        assert!(Subspace::span(&f, &[]).is_err());
        let idx: Vec<u64> = line.points(&f).map(|p| p.index()).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        for p in line.points(&f) {
            assert!(line.contains(&f, p.coords()));
        }
    }

    #[test]
    fn solid_point_count_and_hyperplanes() {
        let f = Field::new(3).unwrap();
        let rows: Vec<Coords> = (0..4)
            .map(|i| {
                let mut c = [FieldElement::ZERO; NCOORDS];
                c[i * 2] = FieldElement::ONE;
                c[i * 2 + 1] = f.from_int(i as i64);
                c
            })
            .collect();
        let solid = Subspace::span(&f, &rows).unwrap();
        assert_eq!(solid.points(&f).count(), 40);
        let hs = solid.hyperplanes(&f);
        assert_eq!(hs.len(), 40);
        for h in &hs {
            assert_eq!(h.dim(), 2);
            assert!(solid.contains_subspace(&f, h));
        }
        let mut dedup = hs.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 40);
    }

    #[test]
    fn semifield_predicate() {
        let f = Field::new(3).unwrap();
        let p1 = fe(&f, &[1, 0, 0, 0, 1, 0, 0, 1, 0, 1]);
        assert!(Subspace::span(&f, &[p1]).unwrap().is_semifield(&f));
        let v = veronese(&f, [FieldElement::ONE; 4]).unwrap();
        assert!(!Subspace::span(&f, &[p1, *v.coords()]).unwrap().is_semifield(&f));
    }

    #[test]
    fn text_round_trip() {
        let f = Field::new(4).unwrap();
        let a = fe(&f, &[1, 2, 0, 0, 1, 3, 0, 1, 0, 1]);
        let b = fe(&f, &[0, 1, 0, 0, 0, 0, 1, 0, 1, 2]);
        let w = Subspace::span(&f, &[a, b]).unwrap();
        assert_eq!(Subspace::from_text(&f, &w.to_text(&f)).unwrap(), w);
        assert!(matches!(
            Subspace::from_text(&f, "1 0 0"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
