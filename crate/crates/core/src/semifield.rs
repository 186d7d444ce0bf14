//! Four-dimensional algebras over GF(q) as cubical arrays of structure constants, and
//! the symmetric spread solid of a commutative presemifield.

use std::fmt;

use rayon::prelude::*;

use crate::classify::Classifier;
use crate::error::{Error, Result};
use crate::geom::{coord_slot, det4, Coords, ProjectiveIndexer, Subspace, NCOORDS};
use crate::gf::{Field, FieldElement};
use crate::group::{mat_inverse, GroupElement, Mat4};

pub type Vec4 = [FieldElement; 4];
pub type Cube = [[[FieldElement; 4]; 4]; 4];

/// Structure constants `a[i][j][k]`: coefficient of `e_k` in `e_i * e_j`.
#[derive(Clone)]
pub struct CubicalArray {
    field: Field,
    pub a: Cube,
    /// Polynomial describing the basis, used in the text form.
    pub basis: String,
}

impl fmt::Debug for CubicalArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl PartialEq for CubicalArray {
    fn eq(&self, other: &Self) -> bool {
        self.field.q() == other.field.q() && self.a == other.a
    }
}

/// Monic irreducible quartics `X^4 + c3 X^3 + c2 X^2 + c1 X + c0`, as element codes
/// `[c0, c1, c2, c3]`; for each q the first one in increasing order of
/// `c0 + c1 q + c2 q^2 + c3 q^3`.
const PINNED_QUARTICS: &[(u32, [u8; 4])] = &[
    (2, [1, 1, 0, 0]),
    (3, [2, 1, 0, 0]),
    (4, [1, 2, 1, 0]),
    (5, [2, 0, 0, 0]),
    (7, [1, 1, 0, 0]),
    (8, [1, 1, 0, 0]),
    (9, [3, 0, 0, 0]),
];

/// The pinned quartic for GF(q) as element codes, constant term first.
pub fn pinned_quartic(q: u32) -> Result<[u8; 4]> {
    PINNED_QUARTICS
        .iter()
        .find(|(qq, _)| *qq == q)
        .map(|(_, c)| *c)
        .ok_or(Error::UnsupportedOrder(q as u64))
}

/// True iff the monic quartic with lower coefficients `c` has no factor of degree 1 or 2.
pub fn is_irreducible_quartic(f: &Field, c: &[FieldElement; 4]) -> bool {
    let eval = |x: FieldElement| {
        let mut acc = FieldElement::ONE;
        for k in (0..4).rev() {
            acc = f.mul_add(c[k], acc, x);
        }
        acc
    };
    if f.elements().any(|x| eval(x).is_zero()) {
        return false;
    }
    // monic quadratic X^2 + b X + d: remainder of the quartic modulo it
    for b in f.elements() {
        for d in f.elements() {
            let mut r = [c[0], c[1], c[2], c[3], FieldElement::ONE];
            for top in (2..5).rev() {
                let lead = r[top];
                if lead.is_zero() {
                    continue;
                }
                r[top] = FieldElement::ZERO;
                r[top - 1] = f.sub(r[top - 1], f.mul(lead, b));
                r[top - 2] = f.sub(r[top - 2], f.mul(lead, d));
            }
            if r[0].is_zero() && r[1].is_zero() {
                return false;
            }
        }
    }
    true
}

/// First irreducible quartic in the order used for [`PINNED_QUARTICS`].
pub fn first_irreducible_quartic(f: &Field) -> [u8; 4] {
    let q = f.q();
    (0..q.pow(4))
        .map(|n| {
            [
                (n % q) as u8,
                (n / q % q) as u8,
                (n / q / q % q) as u8,
                (n / q / q / q) as u8,
            ]
        })
        .find(|c| is_irreducible_quartic(f, &c.map(FieldElement)))
        .expect("irreducible quartics exist")
}

fn render_quartic(f: &Field, c: &[FieldElement; 4]) -> String {
    let mut terms = vec!["X^4".to_string()];
    for k in (0..4).rev() {
        if c[k].is_zero() {
            continue;
        }
        let coef = if c[k] == FieldElement::ONE && k > 0 {
            String::new()
        } else if k > 0 {
            format!("{}*", f.render(c[k]))
        } else {
            f.render(c[k])
        };
        terms.push(match k {
            0 => coef,
            1 => format!("{coef}X"),
            _ => format!("{coef}X^{k}"),
        });
    }
    terms.join("+")
}

/// GF(q^4) over GF(q) in the power basis `1, b, b^2, b^3` of the pinned quartic.
pub fn field_algebra(f: &Field) -> Result<CubicalArray> {
    let c = pinned_quartic(f.q())?.map(FieldElement);
    // powers b^0 .. b^6 as coordinate vectors
    let mut pow = [[FieldElement::ZERO; 4]; 7];
    pow[0][0] = FieldElement::ONE;
    for n in 1..7 {
        let prev = pow[n - 1];
        let mut next = [FieldElement::ZERO; 4];
        next[1..4].copy_from_slice(&prev[0..3]);
        // b^4 = -(c0 + c1 b + c2 b^2 + c3 b^3)
        for k in 0..4 {
            next[k] = f.sub(next[k], f.mul(prev[3], c[k]));
        }
        pow[n] = next;
    }
    let mut a = [[[FieldElement::ZERO; 4]; 4]; 4];
    for (i, row) in a.iter_mut().enumerate() {
        row.copy_from_slice(&pow[i..i + 4]);
    }
    Ok(CubicalArray {
        field: f.clone(),
        a,
        basis: render_quartic(f, &c),
    })
}

/// The commutative Dickson algebra on `GF(q^2) x GF(q^2)` with product
/// `(x,y)(u,v) = (xu + eta (yv)^sigma, xv + yu)`, where `sigma` is `t -> t^sigma_exp`.
///
/// `big` is GF(q^2) for an odd prime q; the basis over GF(q) is
/// `(1,0), (a,0), (0,1), (0,a)` with `a` the primitive element of `big`.
pub fn dickson_algebra(big: &Field, sigma_exp: u64, eta: FieldElement) -> Result<CubicalArray> {
    if big.characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if big.degree() != 2 {
        let q = (big.q() as f64).sqrt().round() as u64;
        return Err(Error::UnsupportedOrder(q));
    }
    let p = big.characteristic() as u64;
    if sigma_exp != 1 && sigma_exp != p {
        return Err(Error::Invariant(format!(
            "t -> t^{sigma_exp} is not an automorphism of GF({})",
            big.q()
        )));
    }
    if big.is_square(eta) {
        return Err(Error::EtaIsSquare);
    }
    let small = Field::new(p as u32)?;
    let basis: [(FieldElement, FieldElement); 4] = [
        (FieldElement::ONE, FieldElement::ZERO),
        (big.primitive(), FieldElement::ZERO),
        (FieldElement::ZERO, FieldElement::ONE),
        (FieldElement::ZERO, big.primitive()),
    ];
    // polynomial-basis digits of a GF(p^2) element are its coordinates over {1, a}
    let coords = |t: FieldElement| {
        let d = big.digits(t);
        [FieldElement(d[0] as u8), FieldElement(d[1] as u8)]
    };
    let mut a = [[[FieldElement::ZERO; 4]; 4]; 4];
    for (i, &(x, y)) in basis.iter().enumerate() {
        for (j, &(u, v)) in basis.iter().enumerate() {
            let s = big.add(big.mul(x, u), big.mul(eta, big.pow(big.mul(y, v), sigma_exp)));
            let t = big.add(big.mul(x, v), big.mul(y, u));
            let [s0, s1] = coords(s);
            let [t0, t1] = coords(t);
            a[i][j] = [s0, s1, t0, t1];
        }
    }
    Ok(CubicalArray {
        field: small,
        a,
        basis: big.min_poly_string().replace(' ', ""),
    })
}

/// Dickson algebra with the default parameters `sigma = t^q`, `eta = a`.
pub fn default_dickson(q: u32) -> Result<CubicalArray> {
    let f = Field::new(q)?;
    if f.characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if f.degree() != 1 {
        return Err(Error::UnsupportedOrder(q as u64));
    }
    let big = Field::new(q * q).map_err(|_| Error::UnsupportedOrder(q as u64))?;
    dickson_algebra(&big, q as u64, big.primitive())
}

impl CubicalArray {
    /// Wraps raw structure constants.
    pub fn new(field: &Field, a: Cube, basis: impl Into<String>) -> Self {
        CubicalArray {
            field: field.clone(),
            a,
            basis: basis.into(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn mul(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        let f = &self.field;
        let mut out = [FieldElement::ZERO; 4];
        for i in 0..4 {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                let c = f.mul(x[i], y[j]);
                if c.is_zero() {
                    continue;
                }
                for k in 0..4 {
                    out[k] = f.mul_add(out[k], c, self.a[i][j][k]);
                }
            }
        }
        out
    }

    /// Matrix of `y -> x * y`, indexed `[j][k]`.
    fn left_matrix(&self, x: &Vec4) -> Mat4 {
        let f = &self.field;
        let mut m = [[FieldElement::ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    m[j][k] = f.mul_add(m[j][k], x[i], self.a[i][j][k]);
                }
            }
        }
        m
    }

    /// No zero divisors: left multiplication by every nonzero `x` is invertible.
    /// Scalar multiples share a kernel, so one `x` per projective point suffices.
    pub fn is_presemifield(&self) -> bool {
        let f = &self.field;
        let ix = ProjectiveIndexer::new(f.q(), 4);
        (0..ix.count()).into_par_iter().all(|n| {
            let mut x = [FieldElement::ZERO; 4];
            ix.decode(n, &mut x);
            !det4(f, &self.left_matrix(&x)).is_zero()
        })
    }

    /// Exhaustive search over all pairs of nonzero elements for `x * y = 0`.
    pub fn find_zero_divisor(&self) -> Option<(Vec4, Vec4)> {
        let q = self.field.q() as u64;
        let n = q.pow(4);
        let vec = |mut c: u64| {
            let mut v = [FieldElement::ZERO; 4];
            for x in v.iter_mut() {
                *x = FieldElement((c % q) as u8);
                c /= q;
            }
            v
        };
        (1..n).into_par_iter().find_map_first(|i| {
            let x = vec(i);
            (1..n)
                .map(vec)
                .find(|y| self.mul(&x, y).iter().all(|c| c.is_zero()))
                .map(|y| (x, y))
        })
    }

    pub fn is_commutative(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.a[i][j] == self.a[j][i]))
    }

    /// Associativity on basis triples, which suffices by trilinearity.
    pub fn is_associative(&self) -> bool {
        let e = |i: usize| {
            let mut v = [FieldElement::ZERO; 4];
            v[i] = FieldElement::ONE;
            v
        };
        (0..4).all(|i| {
            (0..4).all(|j| {
                (0..4).all(|k| self.mul(&self.mul(&e(i), &e(j)), &e(k)) == self.mul(&e(i), &self.mul(&e(j), &e(k))))
            })
        })
    }

    /// Structure constants in the basis `f_i = sum_l m[i][l] e_l`.
    pub fn change_basis(&self, m: &Mat4) -> Result<CubicalArray> {
        let f = &self.field;
        let inv = mat_inverse(f, m).ok_or(Error::SingularMatrix)?;
        let mut a = [[[FieldElement::ZERO; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let p = self.mul(&m[i], &m[j]);
                // coordinates w.r.t. f: solve c^T m = p, i.e. c = p m^-1
                for k in 0..4 {
                    let mut acc = FieldElement::ZERO;
                    for l in 0..4 {
                        acc = f.mul_add(acc, p[l], inv[l][k]);
                    }
                    a[i][j][k] = acc;
                }
            }
        }
        Ok(CubicalArray {
            field: f.clone(),
            a,
            basis: self.basis.clone(),
        })
    }

    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut s = format!("q={} basis={}\n", f.q(), self.basis);
        for i in 0..4 {
            for j in 0..4 {
                let toks: Vec<String> = self.a[i][j].iter().map(|&x| f.render(x)).collect();
                s.push_str(&toks.join(" "));
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<CubicalArray> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hno, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
        let mut q = None;
        let mut basis = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("q=") {
                q = Some(
                    v.parse::<u32>()
                        .map_err(|_| Error::parse(hno + 1, 1, format!("bad q '{v}'")))?,
                );
            } else if let Some(v) = field.strip_prefix("basis=") {
                basis = Some(v.to_string());
            } else {
                return Err(Error::parse(hno + 1, 1, format!("unexpected header field '{field}'")));
            }
        }
        let q = q.ok_or_else(|| Error::parse(hno + 1, 1, "missing q="))?;
        let f = Field::new(q)?;
        let mut toks = Vec::with_capacity(64);
        for (no, line) in lines {
            let mut col = 1;
            for t in line.split_whitespace() {
                let e = f
                    .parse(t)
                    .map_err(|_| Error::parse(no + 1, col, format!("bad element '{t}'")))?;
                toks.push(e);
                col += t.len() + 1;
            }
        }
        if toks.len() != 64 {
            return Err(Error::parse(
                0,
                0,
                format!("expected 64 elements, found {}", toks.len()),
            ));
        }
        let mut a = [[[FieldElement::ZERO; 4]; 4]; 4];
        for (n, e) in toks.into_iter().enumerate() {
            a[n / 16][n / 4 % 4][n % 4] = e;
        }
        Ok(CubicalArray {
            field: f,
            a,
            basis: basis.unwrap_or_default(),
        })
    }
}

/// Moves slot `s` of the array to slot `perm[s]`. Composition follows function
/// composition: permuting by `p` and then by `r` equals permuting by `r . p`.
pub fn knuth_permute(c: &CubicalArray, perm: [usize; 3]) -> CubicalArray {
    let mut b = [[[FieldElement::ZERO; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let t = [i, j, k];
                let mut u = [0usize; 3];
                for s in 0..3 {
                    u[perm[s]] = t[s];
                }
                b[u[0]][u[1]][u[2]] = c.a[i][j][k];
            }
        }
    }
    CubicalArray {
        field: c.field.clone(),
        a: b,
        basis: c.basis.clone(),
    }
}

/// All six slot permutations.
pub const S3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A solid of symmetric matrices with all points of rank 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpreadSolid {
    pub solid: Subspace,
}

/// Swaps slots 1 and 3 and reads off the four slices `B_i[j][k] = a[k][j][i]`, which
/// are symmetric when the algebra is commutative.
pub fn symmetric_spread_solid(c: &CubicalArray) -> Result<SpreadSolid> {
    if !c.is_commutative() {
        return Err(Error::NotCommutative);
    }
    if !c.is_presemifield() {
        return Err(Error::NotPresemifield);
    }
    let b = knuth_permute(c, [2, 1, 0]);
    let rows: Vec<Coords> = (0..4)
        .map(|i| {
            let mut v = [FieldElement::ZERO; NCOORDS];
            for j in 0..4 {
                for k in j..4 {
                    debug_assert_eq!(b.a[i][j][k], b.a[i][k][j]);
                    v[coord_slot(j, k)] = b.a[i][j][k];
                }
            }
            v
        })
        .collect();
    let solid = Subspace::span(&c.field, &rows)?;
    if solid.rank() != 4 || !solid.is_semifield(&c.field) {
        return Err(Error::SolidNotSemifield);
    }
    Ok(SpreadSolid { solid })
}

/// The level-3 node a semifield solid belongs to, with an element mapping it there.
pub fn identify(s: &SpreadSolid, classifier: &Classifier) -> Result<(usize, GroupElement)> {
    if s.solid.rank() != 4 {
        return Err(Error::NotFound("not a solid".into()));
    }
    let (key, g) = classifier.canonicalize(&s.solid)?;
    Ok((key.index, g))
}
