//! Lists of parameterized subspaces (one coefficient point per parameter), their text
//! and JSON forms, cheap K-invariants, and verification of representative lists.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::{Classifier, OrbitKey};
use crate::error::{Error, Result};
use crate::geom::{det_coords, parse_coords, rank_coords, Coords, Subspace, UPPER};
use crate::gf::{parse_poly, Field, FieldElement};

/// Parameter names by position; items of dimension `d` use the first `d + 1`.
pub const PARAM_NAMES: [&str; 4] = ["x", "y", "z", "w"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureItem {
    /// Coefficient point of each parameter.
    pub basis: Vec<Coords>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureList {
    pub q: u32,
    pub min_poly: String,
    pub params: Vec<String>,
    pub claimed_count: usize,
    pub items: Vec<FixtureItem>,
}

#[derive(Serialize, Deserialize)]
struct FixtureJson {
    q: u32,
    minpoly: String,
    params: Vec<String>,
    count: usize,
    /// Per item, one line of ten tokens per parameter.
    items: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(FixtureJson),
    Many(Vec<FixtureJson>),
}

impl FixtureList {
    pub fn field(&self) -> Result<Field> {
        Field::new(self.q)
    }

    pub fn dim(&self) -> usize {
        self.params.len() - 1
    }

    pub fn subspace(&self, f: &Field, i: usize) -> Result<Subspace> {
        Subspace::span(f, &self.items[i].basis)
    }

    /// Builds a list from subspaces of one dimension.
    pub fn from_subspaces(f: &Field, subspaces: &[Subspace], claimed_count: usize) -> Result<FixtureList> {
        let dim = subspaces.first().map(|s| s.dim()).unwrap_or(0);
        if subspaces.iter().any(|s| s.dim() != dim) {
            return Err(Error::Invariant("mixed dimensions in one list".into()));
        }
        Ok(FixtureList {
            q: f.q(),
            min_poly: f.min_poly_string(),
            params: PARAM_NAMES[..=dim].iter().map(|s| s.to_string()).collect(),
            claimed_count,
            items: subspaces
                .iter()
                .map(|s| FixtureItem {
                    basis: s.rows().to_vec(),
                })
                .collect(),
        })
    }

    /// Parses either the line grammar or JSON (one list or an array of lists).
    pub fn parse_all(text: &str) -> Result<Vec<FixtureList>> {
        let t = text.trim_start();
        if t.starts_with('{') || t.starts_with('[') {
            let parsed: OneOrMany =
                serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
            let lists = match parsed {
                OneOrMany::One(j) => vec![j],
                OneOrMany::Many(v) => v,
            };
            lists.into_iter().map(Self::from_json).collect()
        } else {
            Ok(vec![Self::parse_text(text)?])
        }
    }

    /// Parses a single list in either format.
    pub fn parse(text: &str) -> Result<FixtureList> {
        let mut all = Self::parse_all(text)?;
        if all.len() != 1 {
            return Err(Error::parse(1, 1, format!("expected one list, found {}", all.len())));
        }
        Ok(all.remove(0))
    }

    /// Header `q=<q> minpoly=<poly> params=x,y count=<n>`, then for every item one
    /// line of ten element tokens per parameter. Blank lines and `#` comments are
    /// ignored.
    pub fn parse_text(text: &str) -> Result<FixtureList> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hno, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty fixture"))?;
        let (mut q, mut poly, mut params, mut count) = (None, None, None, None);
        for field in header.split_whitespace() {
            let col = field.as_ptr() as usize - header.as_ptr() as usize + 1;
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::parse(hno, col, format!("expected key=value, found '{field}'")))?;
            let bad = |what: &str| Error::parse(hno, col, format!("bad {what} '{v}'"));
            match k {
                "q" => q = Some(v.parse::<u32>().map_err(|_| bad("q"))?),
                "minpoly" => poly = Some((v.to_string(), col)),
                "params" => params = Some((v.split(',').map(str::to_string).collect::<Vec<_>>(), col)),
                "count" => count = Some(v.parse::<usize>().map_err(|_| bad("count"))?),
                _ => return Err(Error::parse(hno, col, format!("unknown header key '{k}'"))),
            }
        }
        let q = q.ok_or_else(|| Error::parse(hno, 1, "missing q="))?;
        let (poly, pcol) = poly.ok_or_else(|| Error::parse(hno, 1, "missing minpoly="))?;
        let (params, acol) = params.ok_or_else(|| Error::parse(hno, 1, "missing params="))?;
        let count = count.ok_or_else(|| Error::parse(hno, 1, "missing count="))?;
        let f = Field::new(q)?;
        check_min_poly(&f, &poly).map_err(|m| Error::parse(hno, pcol, m))?;
        check_params(&params).map_err(|m| Error::parse(hno, acol, m))?;
        let mut items = Vec::new();
        let mut basis = Vec::new();
        let mut first_line = 0;
        for (no, line) in lines {
            if basis.is_empty() {
                first_line = no;
            }
            basis.push(parse_coords(&f, line, no)?);
            if basis.len() == params.len() {
                check_independent(&f, &basis).map_err(|m| Error::parse(first_line, 1, m))?;
                items.push(FixtureItem {
                    basis: std::mem::take(&mut basis),
                });
            }
        }
        if !basis.is_empty() {
            return Err(Error::parse(first_line, 1, "incomplete item at end of input"));
        }
        Ok(FixtureList {
            q,
            min_poly: poly,
            params,
            claimed_count: count,
            items,
        })
    }

    fn from_json(j: FixtureJson) -> Result<FixtureList> {
        let f = Field::new(j.q)?;
        check_min_poly(&f, &j.minpoly).map_err(|m| Error::parse(0, 0, m))?;
        check_params(&j.params).map_err(|m| Error::parse(0, 0, m))?;
        let mut items = Vec::new();
        for (n, item) in j.items.iter().enumerate() {
            if item.len() != j.params.len() {
                return Err(Error::parse(
                    0,
                    0,
                    format!(
                        "item {} has {} rows for {} parameters",
                        n + 1,
                        item.len(),
                        j.params.len()
                    ),
                ));
            }
            let basis = item
                .iter()
                .map(|row| parse_coords(&f, row, 0))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| match e {
                    Error::Parse { column, message, .. } => {
                        Error::parse(0, column, format!("item {}: {message}", n + 1))
                    }
                    other => other,
                })?;
            check_independent(&f, &basis).map_err(|m| Error::parse(0, 0, format!("item {}: {m}", n + 1)))?;
            items.push(FixtureItem { basis });
        }
        Ok(FixtureList {
            q: j.q,
            min_poly: j.minpoly,
            params: j.params,
            claimed_count: j.count,
            items,
        })
    }

    fn rows(&self, f: &Field, item: &FixtureItem) -> Vec<String> {
        item.basis
            .iter()
            .map(|c| c.iter().map(|&x| f.render(x)).collect::<Vec<_>>().join(" "))
            .collect()
    }

    pub fn to_text(&self) -> Result<String> {
        let f = self.field()?;
        let mut s = format!(
            "q={} minpoly={} params={} count={}\n",
            self.q,
            self.min_poly,
            self.params.join(","),
            self.claimed_count
        );
        for (n, item) in self.items.iter().enumerate() {
            s.push_str(&format!("# {}\n", n + 1));
            for row in self.rows(&f, item) {
                s.push_str(&row);
                s.push('\n');
            }
        }
        Ok(s)
    }

    fn to_json_struct(&self) -> Result<FixtureJson> {
        let f = self.field()?;
        Ok(FixtureJson {
            q: self.q,
            minpoly: self.min_poly.clone(),
            params: self.params.clone(),
            count: self.claimed_count,
            items: self.items.iter().map(|it| self.rows(&f, it)).collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_struct()?).expect("serializable"))
    }

    /// Several lists as one JSON array.
    pub fn to_json_many(lists: &[FixtureList]) -> Result<String> {
        let v = lists.iter().map(|l| l.to_json_struct()).collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(&v).expect("serializable"))
    }

    /// Entry `(i,j)` of item `n` as a linear form in the parameters, e.g. `x + a^3 y`.
    pub fn entry_form(&self, f: &Field, n: usize, slot: usize, latex: bool) -> String {
        let mut terms = Vec::new();
        for (p, row) in self.params.iter().zip(&self.items[n].basis) {
            let c = row[slot];
            if c.is_zero() {
                continue;
            }
            let coef = if c == FieldElement::ONE {
                String::new()
            } else if latex {
                let k = f.log_of(c).expect("nonzero");
                if k == 1 {
                    "\\alpha ".to_string()
                } else {
                    format!("\\alpha^{{{k}}} ")
                }
            } else {
                format!("{}*", f.render(c))
            };
            terms.push(format!("{coef}{p}"));
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

fn check_min_poly(f: &Field, poly: &str) -> std::result::Result<(), String> {
    let parsed = parse_poly(f.characteristic(), poly).map_err(|e| e.to_string())?;
    if parsed != f.min_poly() {
        return Err(format!(
            "minimal polynomial {poly} differs from the built-in {} for GF({})",
            f.min_poly_string(),
            f.q()
        ));
    }
    Ok(())
}

fn check_params(params: &[String]) -> std::result::Result<(), String> {
    if params.is_empty() || params.len() > PARAM_NAMES.len() {
        return Err(format!("between 1 and {} parameters expected", PARAM_NAMES.len()));
    }
    if params.iter().zip(PARAM_NAMES).any(|(a, b)| a != b) {
        return Err(format!("parameters must be {}", PARAM_NAMES[..params.len()].join(",")));
    }
    Ok(())
}

fn check_independent(f: &Field, basis: &[Coords]) -> std::result::Result<(), String> {
    match Subspace::span(f, basis) {
        Ok(s) if s.rank() == basis.len() => Ok(()),
        _ => Err("coefficient points are linearly dependent".into()),
    }
}

/// Point types of a subspace and, for lines, the class of the binary quartic
/// `det(x A + y B)` under substitutions from GL(2,q) and multiplication by squares.
/// All of it is preserved by K.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CheapInvariant {
    /// Rank-4 points by type: odd q, determinant square / non-square; even q,
    /// non-alternating / alternating.
    pub point_types: [u64; 2],
    /// Points of rank below 4.
    pub singular: u64,
    /// Canonical quartic coefficients (element codes, `x^4` first) for lines.
    pub quartic: Option<[u8; 5]>,
}

impl fmt::Display for CheapInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "types={}/{}", self.point_types[0], self.point_types[1])?;
        if self.singular > 0 {
            write!(f, " singular={}", self.singular)?;
        }
        if let Some(c) = self.quartic {
            let codes: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, " quartic=[{}]", codes.join(","))?;
        }
        Ok(())
    }
}

fn point_type(f: &Field, c: &Coords) -> Option<usize> {
    let d = det_coords(f, c);
    if d.is_zero() {
        return None;
    }
    if f.characteristic() == 2 {
        let alternating = UPPER.iter().zip(c).all(|(&(i, j), x)| i != j || x.is_zero());
        Some(alternating as usize)
    } else {
        Some(!f.is_square(d) as usize)
    }
}

pub fn cheap_invariant(f: &Field, w: &Subspace) -> CheapInvariant {
    let mut point_types = [0u64; 2];
    let mut singular = 0;
    for c in w.point_coords(f) {
        match point_type(f, &c) {
            Some(t) => point_types[t] += 1,
            None => singular += 1,
        }
    }
    let quartic = (w.rank() == 2).then(|| canonical_quartic(f, &binary_quartic(f, &w.rows()[0], &w.rows()[1])));
    CheapInvariant {
        point_types,
        singular,
        quartic,
    }
}

type Poly = [FieldElement; 5];

fn poly_mul(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let mut out = [FieldElement::ZERO; 5];
    for i in 0..5 {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..5 - i {
            out[i + j] = f.mul_add(out[i + j], a[i], b[j]);
        }
    }
    out
}

/// Coefficients of `det(A + t B)` in increasing powers of `t` (degree at most 4).
fn binary_quartic(f: &Field, a: &Coords, b: &Coords) -> Poly {
    let mut m = [[[FieldElement::ZERO; 5]; 4]; 4];
    for (slot, &(i, j)) in UPPER.iter().enumerate() {
        let e = [
            a[slot],
            b[slot],
            FieldElement::ZERO,
            FieldElement::ZERO,
            FieldElement::ZERO,
        ];
        m[i][j] = e;
        m[j][i] = e;
    }
    let mut det = [FieldElement::ZERO; 5];
    let perms = permutations4();
    for (p, sign) in perms {
        let mut term = [
            FieldElement::ONE,
            FieldElement::ZERO,
            FieldElement::ZERO,
            FieldElement::ZERO,
            FieldElement::ZERO,
        ];
        for (r, &c) in p.iter().enumerate() {
            term = poly_mul(f, &term, &m[r][c]);
        }
        for k in 0..5 {
            det[k] = if sign {
                f.add(det[k], term[k])
            } else {
                f.sub(det[k], term[k])
            };
        }
    }
    det
}

/// The 24 permutations of {0,1,2,3} with their parity (true = even).
fn permutations4() -> Vec<([usize; 4], bool)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (0..i).all(|j| p[i] != p[j]));
                    if distinct {
                        let inversions = (0..4)
                            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                            .filter(|&(i, j)| p[i] > p[j])
                            .count();
                        out.push((p, inversions % 2 == 0));
                    }
                }
            }
        }
    }
    out
}

/// Minimum, over `(x,y) -> (a x + b y, c x + d y)` invertible and square scalars
/// `s`, of the coefficient codes of `s F(ax+by, cx+dy)`, highest `x` power first.
fn canonical_quartic(f: &Field, coeffs: &Poly) -> [u8; 5] {
    let squares: Vec<FieldElement> = f.nonzero_elements().filter(|&x| f.is_square(x)).collect();
    let mut best = [u8::MAX; 5];
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                for d in f.elements() {
                    if f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
                        continue;
                    }
                    // F(x,y) = sum_i coeffs[i] x^(4-i) y^i; substitute and expand in t = y/x
                    let lin_x = [a, b, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO];
                    let lin_y = [c, d, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO];
                    let mut g = [FieldElement::ZERO; 5];
                    for i in 0..5 {
                        if coeffs[i].is_zero() {
                            continue;
                        }
                        let mut term = [
                            coeffs[i],
                            FieldElement::ZERO,
                            FieldElement::ZERO,
                            FieldElement::ZERO,
                            FieldElement::ZERO,
                        ];
                        for _ in 0..4 - i {
                            term = poly_mul(f, &term, &lin_x);
                        }
                        for _ in 0..i {
                            term = poly_mul(f, &term, &lin_y);
                        }
                        for k in 0..5 {
                            g[k] = f.add(g[k], term[k]);
                        }
                    }
                    for &s in &squares {
                        let cand = [0, 1, 2, 3, 4].map(|k| f.mul(s, g[k]).code());
                        if cand < best {
                            best = cand;
                        }
                    }
                }
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Inequivalence decided by orbit keys of a complete classification.
    Classified,
    /// Inequivalence decided by exhaustive search over K.
    Oracle,
    /// Only cheap invariants compared; equal invariants do not imply equivalence and
    /// distinct ones are not backed by a classification.
    NotCertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct ItemReport {
    pub index: usize,
    pub semifield: bool,
    /// Smallest rank among the item's points.
    pub min_rank: u8,
    pub invariant: CheapInvariant,
    pub orbit: Option<OrbitKey>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub q: u32,
    pub dim: usize,
    pub claimed_count: usize,
    pub items: Vec<ItemReport>,
    pub passed: usize,
    pub distinct_invariants: usize,
    pub distinct_orbits: Option<usize>,
    pub certification: Certification,
    /// True when all passing items are pairwise distinguished at the stated level.
    pub pairwise_distinct: bool,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.items.len() && self.items.len() == self.claimed_count
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "q={} dim={} items={} claimed={}",
            self.q,
            self.dim,
            self.items.len(),
            self.claimed_count
        )?;
        for it in &self.items {
            let orbit = it.orbit.map(|k| format!(" orbit={}", k.index)).unwrap_or_default();
            writeln!(
                f,
                "{:>3} {} min_rank={} {}{}",
                it.index + 1,
                if it.semifield { "PASS" } else { "FAIL" },
                it.min_rank,
                it.invariant,
                orbit
            )?;
        }
        writeln!(f, "semifield check: {}/{} pass", self.passed, self.items.len())?;
        writeln!(f, "distinct invariant classes: {}", self.distinct_invariants)?;
        match self.certification {
            Certification::Classified => writeln!(
                f,
                "inequivalence: certified by classification ({} distinct orbits)",
                self.distinct_orbits.unwrap_or(0)
            )?,
            Certification::Oracle => writeln!(
                f,
                "inequivalence: certified by exhaustive search ({} distinct orbits)",
                self.distinct_orbits.unwrap_or(0)
            )?,
            Certification::NotCertified => writeln!(
                f,
                "inequivalence not certified (cheap invariants {})",
                if self.pairwise_distinct {
                    "pairwise distinct"
                } else {
                    "not pairwise distinct"
                }
            )?,
        }
        write!(
            f,
            "summary: {}",
            if self.all_pass() {
                "count matches claim"
            } else {
                "MISMATCH"
            }
        )
    }
}

/// Checks every item for the semifield property and compares the items pairwise:
/// by orbit keys when `classifier` covers the list's dimension, else by exhaustive
/// search when |K| is at most `oracle_bound`, else by cheap invariants only.
pub fn verify_representatives(
    list: &FixtureList,
    classifier: Option<&Classifier>,
    oracle_bound: Option<u64>,
) -> Result<VerifyReport> {
    let f = list.field()?;
    let dim = list.dim();
    let classifier = match classifier {
        Some(c) if c.field().q() != list.q => {
            return Err(Error::FieldMismatch {
                expected: list.q,
                found: c.field().q(),
            })
        }
        Some(c) if c.levels_done() > dim => Some(c),
        _ => None,
    };
    let mut items = Vec::new();
    let mut subspaces = Vec::new();
    for n in 0..list.items.len() {
        let w = list.subspace(&f, n)?;
        let min_rank = w.point_coords(&f).map(|c| rank_coords(&f, &c)).min().unwrap_or(4);
        let semifield = min_rank == 4 && w.dim() == dim;
        let orbit = match (classifier, semifield) {
            (Some(c), true) => Some(c.canonicalize(&w)?.0),
            _ => None,
        };
        items.push(ItemReport {
            index: n,
            semifield,
            min_rank,
            invariant: cheap_invariant(&f, &w),
            orbit,
        });
        subspaces.push(w);
    }
    let passing: Vec<usize> = (0..items.len()).filter(|&i| items[i].semifield).collect();
    let distinct_invariants = passing
        .iter()
        .map(|&i| &items[i].invariant)
        .collect::<HashSet<_>>()
        .len();
    let (certification, distinct_orbits) = if classifier.is_some() {
        let orbits = passing.iter().map(|&i| items[i].orbit).collect::<HashSet<_>>().len();
        (Certification::Classified, Some(orbits))
    } else if oracle_bound.is_some_and(|b| crate::group::pgl4_order(f.q()) <= b) {
        let (_, k) = crate::orbits::pgl4_group(&f);
        // one representative per class, found by pairwise exhaustive search
        let mut classes: Vec<usize> = Vec::new();
        for &i in &passing {
            let mut new = true;
            for &j in &classes {
                if crate::orbits::brute_force_equivalent(&f, &subspaces[i], &subspaces[j], &k, oracle_bound.unwrap())?
                    .is_some()
                {
                    new = false;
                    break;
                }
            }
            if new {
                classes.push(i);
            }
        }
        (Certification::Oracle, Some(classes.len()))
    } else {
        (Certification::NotCertified, None)
    };
    let pairwise_distinct = match distinct_orbits {
        Some(d) => d == passing.len(),
        None => distinct_invariants == passing.len(),
    };
    Ok(VerifyReport {
        q: list.q,
        dim,
        claimed_count: list.claimed_count,
        passed: passing.len(),
        items,
        distinct_invariants,
        distinct_orbits,
        certification,
        pairwise_distinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::veronese;

    const SAMPLE: &str = "q=3 minpoly=X+1 params=x,y count=1\n# 1\n1 0 0 0 1 0 0 1 0 1\n0 1 0 0 0 0 1 0 1 a^1\n";

    #[test]
    fn text_round_trip() {
        let l = FixtureList::parse(SAMPLE).unwrap();
        assert_eq!(l.items.len(), 1);
        assert_eq!(l.dim(), 1);
        assert_eq!(l.to_text().unwrap(), SAMPLE);
        let back = FixtureList::parse(&l.to_text().unwrap()).unwrap();
        assert_eq!(back, l);
        let json = l.to_json().unwrap();
        assert_eq!(FixtureList::parse(&json).unwrap(), l);
        let many = FixtureList::to_json_many(&[l.clone(), l.clone()]).unwrap();
        assert_eq!(FixtureList::parse_all(&many).unwrap().len(), 2);
    }

    #[test]
    fn parse_errors_carry_locations() {
        let bad_token = SAMPLE.replace("0 1 0 0 0 0 1 0 1 a^1", "0 1 0 0 0 0 1 0 1 b");
        match FixtureList::parse(&bad_token) {
            Err(Error::Parse {
                line: 4, column: 19, ..
            }) => {}
            other => panic!("{other:?}"),
        }
        let short = SAMPLE.replace("0 1 0 0 0 0 1 0 1 a^1", "0 1 0");
        assert!(matches!(FixtureList::parse(&short), Err(Error::Parse { line: 4, .. })));
        let dependent = SAMPLE.replace("0 1 0 0 0 0 1 0 1 a^1", "a^1 0 0 0 a^1 0 0 a^1 0 a^1");
        assert!(matches!(
            FixtureList::parse(&dependent),
            Err(Error::Parse { line: 3, .. })
        ));
        let poly = SAMPLE.replace("X+1", "X+2");
        assert!(matches!(
            FixtureList::parse(&poly),
            Err(Error::Parse { line: 1, column: 5, .. })
        ));
        assert!(matches!(
            FixtureList::parse("q=3 params=x count=1"),
            Err(Error::Parse { .. })
        ));
        let incomplete = SAMPLE.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            FixtureList::parse(&incomplete),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(FixtureList::parse("{\"q\": 3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn quartic_of_diagonal_pencil() {
        let f = Field::new(5).unwrap();
        // det(x I + y diag(0,1,2,3)) = x (x+y)(x+2y)(x+3y), i.e. (1+t)(1+2t)(1+3t) at x=1
        let one = FieldElement::ONE;
        let a = crate::geom::SymMatrix::identity().coords();
        let b = crate::geom::SymMatrix::diagonal([FieldElement::ZERO, one, f.from_int(2), f.from_int(3)]).coords();
        let p = binary_quartic(&f, &a, &b);
        // 1 + 6t + 11t^2 + 6t^3
        assert_eq!(p, [1, 6, 11, 6, 0].map(|n| f.from_int(n)));
    }

    #[test]
    fn invariants_are_k_invariant() {
        use crate::group::{act_subspace, lift, tests::random_invertible};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for q in [3, 4] {
            let f = Field::new(q).unwrap();
            let c = Classifier::new(
                q,
                crate::classify::Config {
                    max_dim: 1,
                    ..Default::default()
                },
            )
            .unwrap();
            let mut c = c;
            c.run().unwrap();
            for n in &c.result().levels[1] {
                let inv = cheap_invariant(&f, &n.rep);
                assert_eq!(inv.singular, 0);
                assert_eq!(inv.point_types.iter().sum::<u64>(), q as u64 + 1);
                for _ in 0..5 {
                    let g = lift(&f, &random_invertible(&f, &mut rng)).unwrap();
                    assert_eq!(cheap_invariant(&f, &act_subspace(&f, &g, &n.rep)), inv);
                }
            }
        }
    }

    #[test]
    fn verify_detects_singular_item() {
        let f = Field::new(3).unwrap();
        let mut l = FixtureList::parse(SAMPLE).unwrap();
        let v = veronese(
            &f,
            [
                FieldElement::ONE,
                FieldElement::ZERO,
                FieldElement::ZERO,
                FieldElement::ZERO,
            ],
        )
        .unwrap();
        let good = l.items[0].clone();
        l.items.push(FixtureItem {
            basis: vec![*v.coords(), good.basis[1]],
        });
        l.claimed_count = 2;
        let r = verify_representatives(&l, None, None).unwrap();
        assert!(r.items[0].semifield);
        assert!(!r.items[1].semifield);
        assert_eq!(r.items[1].min_rank, 1);
        assert_eq!(r.passed, 1);
        assert!(!r.all_pass());
        assert_eq!(r.certification, Certification::NotCertified);
        assert!(r.to_string().contains("inequivalence not certified"));
    }

    #[test]
    fn verify_certification_levels() {
        let mut c = Classifier::new(2, crate::classify::Config::default()).unwrap();
        c.run().unwrap();
        let f = c.field().clone();
        let reps: Vec<Subspace> = c.result().levels[1].iter().map(|n| n.rep).collect();
        let mut list = FixtureList::from_subspaces(&f, &reps, 5).unwrap();
        let r = verify_representatives(&list, Some(&c), None).unwrap();
        assert_eq!(r.certification, Certification::Classified);
        assert_eq!(r.distinct_orbits, Some(5));
        assert!(r.pairwise_distinct && r.all_pass());
        // a duplicate in another basis is caught by both the keys and the oracle
        let mut dup = list.items[2].clone();
        dup.basis.reverse();
        list.items.push(dup);
        list.claimed_count = 6;
        let r = verify_representatives(&list, Some(&c), None).unwrap();
        assert_eq!(r.distinct_orbits, Some(5));
        assert!(!r.pairwise_distinct);
        let r = verify_representatives(&list, None, Some(1 << 20)).unwrap();
        assert_eq!(r.certification, Certification::Oracle);
        assert_eq!(r.distinct_orbits, Some(5));
        let r = verify_representatives(&list, None, Some(100)).unwrap();
        assert_eq!(r.certification, Certification::NotCertified);
    }
}
