//! Base and strong generating sets for subgroups of PGL(4,q), computed from the
//! faithful permutation action on the points of PG(3,q).
//!
//! Two construction routes are provided: deterministic Schreier-Sims from a list of
//! generators, and randomized sifting against a known target order. The second is
//! what the classification pipeline uses (every stabilizer order is known in advance
//! from orbit-stabilizer counting); the first is the independent check.

use std::ops::ControlFlow;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::group::{lift, mat_identity, mat_inverse, mat_mul, mat_normalize, GroupElement, Mat4, Pg3Action};

/// A group element carried both as a normalized matrix and as a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermElement {
    pub mat: Mat4,
    pub perm: Box<[u16]>,
}

impl PermElement {
    pub fn identity(n: usize) -> Self {
        PermElement {
            mat: mat_identity(),
            perm: (0..n as u16).collect(),
        }
    }

    pub fn from_matrix(f: &Field, pg3: &Pg3Action, m: &Mat4) -> Self {
        let mut mat = *m;
        mat_normalize(f, &mut mat);
        PermElement {
            perm: pg3.perm(f, &mat).into_boxed_slice(),
            mat,
        }
    }

    pub fn from_element(f: &Field, pg3: &Pg3Action, g: &GroupElement) -> Self {
        Self::from_matrix(f, pg3, g.matrix())
    }

    pub fn to_element(&self, f: &Field) -> GroupElement {
        lift(f, &self.mat).expect("invertible")
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self * other`: apply `other` first.
    pub fn mul(&self, f: &Field, other: &PermElement) -> PermElement {
        let mut mat = mat_mul(f, &self.mat, &other.mat);
        mat_normalize(f, &mut mat);
        PermElement {
            mat,
            perm: other.perm.iter().map(|&x| self.perm[x as usize]).collect(),
        }
    }

    pub fn inverse(&self, f: &Field) -> PermElement {
        let mut mat = mat_inverse(f, &self.mat).expect("invertible");
        mat_normalize(f, &mut mat);
        let mut perm = vec![0u16; self.perm.len()];
        for (i, &x) in self.perm.iter().enumerate() {
            perm[x as usize] = i as u16;
        }
        PermElement {
            mat,
            perm: perm.into_boxed_slice(),
        }
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.perm[x] as usize
    }
}

#[derive(Clone, Debug)]
struct Level {
    base_point: usize,
    /// Strong generators fixing all earlier base points.
    gens: Vec<PermElement>,
    orbit: Vec<usize>,
    /// `transversal[b]` maps the base point to `b`.
    transversal: Vec<Option<PermElement>>,
}

impl Level {
    fn new(n: usize, base_point: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base_point] = Some(PermElement::identity(n));
        Level {
            base_point,
            gens: Vec::new(),
            orbit: vec![base_point],
            transversal,
        }
    }

    fn rebuild(&mut self, f: &Field) {
        let n = self.transversal.len();
        self.transversal.iter_mut().for_each(|t| *t = None);
        self.transversal[self.base_point] = Some(PermElement::identity(n));
        self.orbit.clear();
        self.orbit.push(self.base_point);
        let mut head = 0;
        while head < self.orbit.len() {
            let b = self.orbit[head];
            head += 1;
            for s in &self.gens {
                let c = s.image(b);
                if self.transversal[c].is_none() {
                    let u = s.mul(f, self.transversal[b].as_ref().unwrap());
                    self.transversal[c] = Some(u);
                    self.orbit.push(c);
                }
            }
        }
    }
}

/// A base and strong generating set with explicit transversals.
#[derive(Clone, Debug)]
pub struct Bsgs {
    n: usize,
    levels: Vec<Level>,
}

impl Bsgs {
    /// The trivial group on `n` points.
    pub fn trivial(n: usize) -> Self {
        Bsgs { n, levels: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.levels.iter().map(|l| l.orbit.len() as u64).product()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    /// All strong generators (they generate the whole group).
    pub fn strong_generators(&self) -> &[PermElement] {
        self.levels.first().map(|l| l.gens.as_slice()).unwrap_or(&[])
    }

    /// Sifts `g` starting at `level`; returns the residue and the level where it stopped.
    fn sift_from(&self, f: &Field, g: &PermElement, level: usize) -> (PermElement, usize) {
        let mut h = g.clone();
        for (i, l) in self.levels.iter().enumerate().skip(level) {
            let b = h.image(l.base_point);
            match &l.transversal[b] {
                None => return (h, i),
                Some(u) => h = u.inverse(f).mul(f, &h),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, f: &Field, g: &PermElement) -> bool {
        let (h, j) = self.sift_from(f, g, 0);
        j == self.levels.len() && h.is_identity()
    }

    /// Adds a residue that fixes base points `0..upto` as a strong generator at levels
    /// `0..=upto`, extending the base when `upto` is past the end. Returns the level
    /// range that was touched.
    fn install(&mut self, f: &Field, residue: PermElement, upto: usize) {
        if upto == self.levels.len() {
            let moved = (0..self.n)
                .find(|&x| residue.image(x) != x)
                .expect("nontrivial residue moves a point");
            self.levels.push(Level::new(self.n, moved));
        }
        for l in self.levels[..=upto].iter_mut() {
            l.gens.push(residue.clone());
        }
        for l in self.levels[..=upto].iter_mut() {
            l.rebuild(f);
        }
    }

    /// Sifts `g` and, if it is not already a member, installs its residue. Returns
    /// whether the group grew. Only valid when `g` lies in the target group.
    pub fn sift_and_extend(&mut self, f: &Field, g: &PermElement) -> bool {
        let (h, j) = self.sift_from(f, g, 0);
        if j == self.levels.len() && h.is_identity() {
            return false;
        }
        self.install(f, h, j);
        true
    }

    /// Deterministic Schreier-Sims.
    pub fn schreier_sims(f: &Field, n: usize, gens: &[PermElement]) -> Bsgs {
        let mut b = Bsgs::trivial(n);
        for g in gens.iter().filter(|g| !g.is_identity()) {
            if b.levels.iter().all(|l| g.image(l.base_point) == l.base_point) {
                let moved = (0..n).find(|&x| g.image(x) != x).unwrap();
                b.levels.push(Level::new(n, moved));
            }
        }
        for g in gens.iter().filter(|g| !g.is_identity()) {
            for l in b.levels.iter_mut() {
                l.gens.push(g.clone());
                if g.image(l.base_point) != l.base_point {
                    break;
                }
            }
        }
        for l in b.levels.iter_mut() {
            l.rebuild(f);
        }
        let mut i = b.levels.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            let mut restarted = false;
            'scan: for oi in 0..b.levels[iu].orbit.len() {
                let pt = b.levels[iu].orbit[oi];
                for si in 0..b.levels[iu].gens.len() {
                    let level = &b.levels[iu];
                    let s = &level.gens[si];
                    let u_pt = level.transversal[pt].as_ref().unwrap();
                    let u_img = level.transversal[s.image(pt)].as_ref().unwrap();
                    let h = u_img.inverse(f).mul(f, &s.mul(f, u_pt));
                    let (res, j) = b.sift_from(f, &h, iu + 1);
                    if j < b.levels.len() || !res.is_identity() {
                        if j == b.levels.len() {
                            let moved = (0..n).find(|&x| res.image(x) != x).unwrap();
                            b.levels.push(Level::new(n, moved));
                        }
                        for l in b.levels[iu + 1..=j].iter_mut() {
                            l.gens.push(res.clone());
                            l.rebuild(f);
                        }
                        i = j as isize;
                        restarted = true;
                        break 'scan;
                    }
                }
            }
            if !restarted {
                i -= 1;
            }
        }
        b
    }

    /// Randomized construction: sift samples of the group until `target` is reached.
    /// `sample` must return elements of the target group; the resulting structure is
    /// complete exactly when its order equals `target`.
    pub fn from_samples(f: &Field, n: usize, target: u64, mut sample: impl FnMut() -> PermElement) -> Result<Bsgs> {
        let mut b = Bsgs::trivial(n);
        let mut idle = 0u32;
        while b.order() < target {
            if b.sift_and_extend(f, &sample()) {
                idle = 0;
            } else {
                idle += 1;
                if idle > 2000 {
                    return Err(Error::Invariant(format!(
                        "random sifting stalled at order {} below target {target}",
                        b.order()
                    )));
                }
            }
        }
        if b.order() != target {
            return Err(Error::Invariant(format!(
                "group order {} overshot target {target}",
                b.order()
            )));
        }
        Ok(b)
    }

    /// A uniformly random element.
    pub fn random_element(&self, f: &Field, rng: &mut impl Rng) -> PermElement {
        let mut g = PermElement::identity(self.n);
        for l in &self.levels {
            let b = l.orbit[rng.gen_range(0..l.orbit.len())];
            g = g.mul(f, l.transversal[b].as_ref().unwrap());
        }
        g
    }

    /// Visits every element once (as `u_0 u_1 ... u_k` over transversal choices).
    pub fn for_each_element<B>(&self, f: &Field, mut visit: impl FnMut(&PermElement) -> ControlFlow<B>) -> Option<B> {
        fn rec<B>(
            b: &Bsgs,
            f: &Field,
            depth: usize,
            acc: &PermElement,
            visit: &mut impl FnMut(&PermElement) -> ControlFlow<B>,
        ) -> ControlFlow<B> {
            if depth == b.levels.len() {
                return visit(acc);
            }
            let l = &b.levels[depth];
            for &pt in &l.orbit {
                let next = acc.mul(f, l.transversal[pt].as_ref().unwrap());
                rec(b, f, depth + 1, &next, visit)?;
            }
            ControlFlow::Continue(())
        }
        match rec(self, f, 0, &PermElement::identity(self.n), &mut visit) {
            ControlFlow::Break(x) => Some(x),
            ControlFlow::Continue(()) => None,
        }
    }
}

/// Product-replacement generator of near-uniform random elements from generators.
pub struct ProductReplacement {
    slots: Vec<PermElement>,
    acc: PermElement,
}

impl ProductReplacement {
    pub fn new(f: &Field, n: usize, gens: &[PermElement], rng: &mut impl Rng) -> Self {
        let mut slots: Vec<PermElement> = gens.to_vec();
        if slots.is_empty() {
            slots.push(PermElement::identity(n));
        }
        let base = slots.clone();
        while slots.len() < 10 {
            slots.push(base[slots.len() % base.len()].clone());
        }
        let mut pr = ProductReplacement {
            slots,
            acc: PermElement::identity(n),
        };
        for _ in 0..60 {
            pr.next(f, rng);
        }
        pr
    }

    pub fn next(&mut self, f: &Field, rng: &mut impl Rng) -> PermElement {
        let k = self.slots.len();
        let i = rng.gen_range(0..k);
        let mut j = rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let s = if rng.gen_bool(0.5) {
            self.slots[j].clone()
        } else {
            self.slots[j].inverse(f)
        };
        self.slots[i] = if rng.gen_bool(0.5) {
            self.slots[i].mul(f, &s)
        } else {
            s.mul(f, &self.slots[i])
        };
        self.acc = self.acc.mul(f, &self.slots[i]);
        self.acc.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{pgl4_generators, pgl4_order};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k_gens(f: &Field, pg3: &Pg3Action) -> Vec<PermElement> {
        pgl4_generators(f)
            .gens
            .iter()
            .map(|g| PermElement::from_element(f, pg3, g))
            .collect()
    }

    #[test]
    fn generators_give_pgl4() {
        for q in [2, 3, 4, 5] {
            let f = Field::new(q).unwrap();
            let pg3 = Pg3Action::new(&f);
            let b = Bsgs::schreier_sims(&f, pg3.degree(), &k_gens(&f, &pg3));
            assert_eq!(b.order(), pgl4_order(q), "q={q}");
        }
    }

    #[test]
    fn closure_matches_at_q2() {
        let f = Field::new(2).unwrap();
        let pg3 = Pg3Action::new(&f);
        let gens = k_gens(&f, &pg3);
        // plain closure by breadth-first multiplication
        let mut seen = std::collections::HashSet::new();
        let id = PermElement::identity(pg3.degree());
        seen.insert(id.perm.clone());
        let mut frontier = vec![id];
        while let Some(g) = frontier.pop() {
            for s in &gens {
                let h = s.mul(&f, &g);
                if seen.insert(h.perm.clone()) {
                    frontier.push(h);
                }
            }
        }
        assert_eq!(seen.len() as u64, 20160);
        let b = Bsgs::schreier_sims(&f, pg3.degree(), &gens);
        let mut count = 0u64;
        let mut distinct = std::collections::HashSet::new();
        b.for_each_element::<()>(&f, |g| {
            count += 1;
            distinct.insert(g.perm.clone());
            assert!(seen.contains(&g.perm));
            ControlFlow::Continue(())
        });
        assert_eq!(count, 20160);
        assert_eq!(distinct.len(), 20160);
    }

    #[test]
    fn random_route_agrees_with_deterministic() {
        let f = Field::new(3).unwrap();
        let pg3 = Pg3Action::new(&f);
        let det = Bsgs::schreier_sims(&f, pg3.degree(), &k_gens(&f, &pg3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rnd = Bsgs::from_samples(&f, pg3.degree(), det.order(), || det.random_element(&f, &mut rng)).unwrap();
        assert_eq!(rnd.order(), det.order());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let g = det.random_element(&f, &mut rng);
            assert!(rnd.contains(&f, &g));
        }
        // product replacement produces members as well
        let mut pr = ProductReplacement::new(&f, pg3.degree(), &k_gens(&f, &pg3), &mut rng);
        for _ in 0..20 {
            assert!(det.contains(&f, &pr.next(&f, &mut rng)));
        }
    }

    #[test]
    fn element_matrix_and_perm_agree() {
        let f = Field::new(4).unwrap();
        let pg3 = Pg3Action::new(&f);
        let det = Bsgs::schreier_sims(&f, pg3.degree(), &k_gens(&f, &pg3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = det.random_element(&f, &mut rng);
            assert_eq!(PermElement::from_matrix(&f, &pg3, &g.mat), g);
            let gi = g.inverse(&f);
            assert!(g.mul(&f, &gi).is_identity());
        }
    }
}
