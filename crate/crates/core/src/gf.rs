//! Table-driven arithmetic in small finite fields GF(q).
//!
//! Elements are stored as polynomial-basis codes: the code
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` stands for `c_0 + c_1 a + ... + c_{k-1} a^{k-1}`
//! where `a` is a fixed root of the pinned defining polynomial. For prime fields the code
//! is the residue itself and `a` is the least primitive root. Addition is digit-wise
//! modulo `p`; multiplication goes through exp/log tables. Both are flattened into
//! `q x q` lookup tables at construction time.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of some GF(q), identified by its polynomial-basis code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(transparent)]
pub struct FieldElement(pub(crate) u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Pinned defining polynomials, coefficients low to high, monic.
///
/// q = 4, 8, 9 match the shipped line fixtures, so `a^k` tokens there mean the same element;
/// the others are Conway polynomials.
const PINNED: &[(u32, u32, u32, &[u32])] = &[
    // (q, p, k, coefficients)
    (2, 2, 1, &[1, 1]),
    (3, 3, 1, &[1, 1]),
    (4, 2, 2, &[1, 1, 1]),
    (5, 5, 1, &[3, 1]),
    (7, 7, 1, &[4, 1]),
    (8, 2, 3, &[1, 1, 0, 1]),
    (9, 3, 2, &[2, 2, 1]),
    (16, 2, 4, &[1, 1, 0, 0, 1]),
    (25, 5, 2, &[2, 4, 1]),
    (27, 3, 3, &[1, 2, 0, 1]),
    (49, 7, 2, &[3, 6, 1]),
    (81, 3, 4, &[2, 0, 0, 2, 1]),
];

/// Orders for which [`Field::new`] has a pinned defining polynomial.
pub fn supported_orders() -> impl Iterator<Item = u32> {
    PINNED.iter().map(|e| e.0)
}

#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    min_poly: Vec<u32>,
    exp: Vec<u8>,
    log: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) [{}]", self.q, self.min_poly_string())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.min_poly == other.min_poly
    }
}

impl Eq for Field {}

impl Field {
    /// Builds GF(q) from the pinned polynomial table.
    pub fn new(q: u32) -> Result<Field> {
        let &(q, p, k, poly) = PINNED
            .iter()
            .find(|e| e.0 == q)
            .ok_or(Error::UnsupportedOrder(q as u64))?;
        Self::with_polynomial(p, k, poly.to_vec()).inspect(|f| debug_assert_eq!(f.q, q))
    }

    /// Builds GF(p^k) from a monic polynomial (low to high coefficients) whose root must
    /// be primitive.
    pub fn with_polynomial(p: u32, k: u32, min_poly: Vec<u32>) -> Result<Field> {
        let q = p.pow(k);
        if q > 256 || min_poly.len() != k as usize + 1 || min_poly[k as usize] != 1 {
            return Err(Error::UnsupportedOrder(q as u64));
        }
        let qs = q as usize;
        let digits = |c: u32| -> Vec<u32> {
            let mut c = c;
            (0..k)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        };
        let undigits = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &x| acc * p + x) };

        let mut add = vec![0u8; qs * qs];
        let mut neg = vec![0u8; qs];
        for a in 0..q {
            let da = digits(a);
            neg[a as usize] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>()) as u8;
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s) as u8;
            }
        }

        // Multiply-by-root in the polynomial basis; for k = 1 the root is -c_0.
        let times_root = |c: u32| -> u32 {
            if k == 1 {
                return (c * ((p - min_poly[0]) % p)) % p;
            }
            let d = digits(c);
            let top = d[k as usize - 1];
            let mut out = vec![0u32; k as usize];
            for i in (1..k as usize).rev() {
                out[i] = d[i - 1];
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o = (*o + (p - (top * min_poly[i]) % p)) % p;
            }
            undigits(&out)
        };

        let mut exp = Vec::with_capacity(qs - 1);
        let mut log = vec![u32::MAX; qs];
        let mut x = 1u32;
        for i in 0..q - 1 {
            if log[x as usize] != u32::MAX {
                // root is not primitive
                return Err(Error::UnsupportedOrder(q as u64));
            }
            log[x as usize] = i;
            exp.push(x as u8);
            x = times_root(x);
        }
        if x != 1 {
            return Err(Error::UnsupportedOrder(q as u64));
        }

        let mut mul = vec![0u8; qs * qs];
        let mut inv = vec![0u8; qs];
        for a in 1..qs {
            inv[a] = exp[((q - 1 - log[a]) % (q - 1)) as usize];
            for b in 1..qs {
                mul[a * qs + b] = exp[((log[a] + log[b]) % (q - 1)) as usize];
            }
        }

        Ok(Field {
            p,
            k,
            q,
            min_poly,
            exp,
            log,
            add,
            mul,
            neg,
            inv,
        })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Defining polynomial coefficients over GF(p), low to high.
    pub fn min_poly(&self) -> &[u32] {
        &self.min_poly
    }

    /// The pinned primitive element `a`.
    #[inline]
    pub fn primitive(&self) -> FieldElement {
        FieldElement(self.exp[1 % self.exp.len()])
    }

    pub fn element(&self, code: u32) -> Result<FieldElement> {
        if code < self.q {
            Ok(FieldElement(code as u8))
        } else {
            Err(Error::InvalidCode { code, q: self.q })
        }
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u8)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q).map(|c| FieldElement(c as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.q).map(|c| FieldElement(c as u8))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    /// `a + b * c`, the inner step of every elimination loop.
    #[inline]
    pub fn mul_add(&self, a: FieldElement, b: FieldElement, c: FieldElement) -> FieldElement {
        self.add(a, self.mul(b, c))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(FieldElement(self.inv[a.0 as usize]))
        }
    }

    /// Inverse without the zero check; callers guarantee `a != 0`.
    #[inline]
    pub(crate) fn inv_nz(&self, a: FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        FieldElement(self.inv[a.0 as usize])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let n = (self.q - 1) as u64;
        self.exp_of((self.log[a.0 as usize] as u64 * (e % n)) % n)
    }

    /// `a^i` for the pinned primitive element.
    #[inline]
    pub fn exp_of(&self, i: u64) -> FieldElement {
        FieldElement(self.exp[(i % (self.q as u64 - 1)) as usize])
    }

    /// Discrete log base `a`; `None` for zero.
    pub fn log_of(&self, a: FieldElement) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p as u64)
    }

    /// Zero counts as a square.
    pub fn is_square(&self, a: FieldElement) -> bool {
        match self.log_of(a) {
            None => true,
            Some(l) => self.p == 2 || l % 2 == 0,
        }
    }

    /// Renders `0`, `1` or `a^k` with `k >= 1`.
    pub fn render(&self, a: FieldElement) -> String {
        match a.0 {
            0 => "0".to_string(),
            1 => "1".to_string(),
            _ => format!("a^{}", self.log[a.0 as usize]),
        }
    }

    /// Parses the grammar produced by [`Field::render`]; a bare `a` is accepted as `a^1`.
    pub fn parse(&self, token: &str) -> Result<FieldElement> {
        let t = token.trim();
        match t {
            "0" => return Ok(FieldElement::ZERO),
            "1" => return Ok(FieldElement::ONE),
            "a" => return Ok(self.primitive()),
            _ => {}
        }
        if let Some(e) = t.strip_prefix("a^") {
            if let Ok(e) = e.parse::<u64>() {
                return Ok(self.exp_of(e));
            }
        }
        Err(Error::parse(0, 0, format!("bad field element token {t:?}")))
    }

    /// Renders the defining polynomial, e.g. `X^3+X+1` or `X^2-X-1`.
    pub fn min_poly_string(&self) -> String {
        render_poly(self.p, &self.min_poly)
    }

    /// Coordinates of `a` in the polynomial basis, low to high.
    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let mut c = a.0 as u32;
        (0..self.k)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }
}

/// Renders a polynomial over GF(p) (coefficients low to high) with `-` for `p - 1`.
pub fn render_poly(p: u32, coeffs: &[u32]) -> String {
    let mut s = String::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let monomial = match i {
            0 => String::new(),
            1 => "X".to_string(),
            _ => format!("X^{i}"),
        };
        let (sign, mag) = if p > 2 && c == p - 1 { ("-", 1) } else { ("+", c) };
        if !s.is_empty() || sign == "-" {
            s.push_str(sign);
        }
        if mag != 1 || i == 0 {
            s.push_str(&mag.to_string());
            if i > 0 {
                s.push('*');
            }
        }
        s.push_str(&monomial);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Parses polynomials rendered by [`render_poly`] (and similar hand-written forms such as
/// `X^2 - X - 1`) into coefficients over GF(p), low to high, trailing zeros trimmed.
pub fn parse_poly(p: u32, text: &str) -> Result<Vec<u32>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |m: &str| Error::parse(0, 0, format!("bad polynomial {text:?}: {m}"));
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut coeffs: Vec<u32> = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut negative = false;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            negative = bytes[i] == b'-';
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &s[start..i];
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (mag, power) = match term.find('X') {
            None => (term.parse::<u32>().map_err(|_| bad("coefficient"))?, 0usize),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let mag = if c.is_empty() {
                    1
                } else {
                    c.parse::<u32>().map_err(|_| bad("coefficient"))?
                };
                let rest = &term[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|e| e.parse::<usize>().ok())
                        .ok_or_else(|| bad("exponent"))?
                };
                (mag, power)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        let m = mag % p;
        let v = if negative { (p - m) % p } else { m };
        coeffs[power] = (coeffs[power] + v) % p;
    }
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
        coeffs.pop();
    }
    Ok(coeffs)
}
