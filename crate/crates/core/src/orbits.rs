//! Orbit enumeration with Schreier vectors, stabilizers and the brute-force oracle.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::ops::ControlFlow;

use rand::Rng;
use rayon::prelude::*;

use crate::bsgs::{Bsgs, PermElement};
use crate::error::{Error, Result};
use crate::geom::{pg9, Coords, ProjectiveIndexer, Subspace, SymPoint, NCOORDS};
use crate::gf::{Field, FieldElement};
use crate::group::{
    act_subspace, lift, mat_identity, mat_mul, mat_normalize, GeneratingSet, GroupElement, Mat4, Pg3Action,
};

pub(crate) const NO_ORBIT: u32 = u32::MAX;
pub(crate) const ROOT: u8 = u8::MAX;

/// Frontier size above which images are computed in parallel.
const PAR_FRONTIER: usize = 4096;

/// Result of a breadth-first orbit partition over a dense index range.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    pub orbit_of: Vec<u32>,
    /// Generator whose application first reached each index; `ROOT` at roots.
    pub schreier: Vec<u8>,
    pub roots: Vec<u64>,
    pub sizes: Vec<u64>,
}

/// Partitions the indices `i < n` with `valid(i)` into orbits of the generators.
///
/// Roots are the minimal index of each orbit; the Schreier forest is built by
/// level-synchronous breadth-first search with images assigned in frontier order,
/// so the output does not depend on the number of worker threads.
pub(crate) fn partition<V, A>(n: u64, valid: V, ngens: usize, act: A, check_closed: bool) -> Result<Partition>
where
    V: Fn(u64) -> bool + Sync,
    A: Fn(usize, u64) -> u64 + Sync,
{
    assert!(ngens < ROOT as usize);
    let mut orbit_of = vec![NO_ORBIT; n as usize];
    let mut schreier = vec![ROOT; n as usize];
    let mut roots = Vec::new();
    let mut sizes = Vec::new();
    let mut images: Vec<u64> = Vec::new();
    for start in 0..n {
        if orbit_of[start as usize] != NO_ORBIT || !valid(start) {
            continue;
        }
        let id = roots.len() as u32;
        roots.push(start);
        orbit_of[start as usize] = id;
        let mut size = 1u64;
        let mut frontier = vec![start];
        while !frontier.is_empty() {
            images.clear();
            if frontier.len() >= PAR_FRONTIER {
                images = (0..frontier.len() * ngens)
                    .into_par_iter()
                    .map(|pos| act(pos % ngens, frontier[pos / ngens]))
                    .collect();
            } else {
                for &x in &frontier {
                    for k in 0..ngens {
                        images.push(act(k, x));
                    }
                }
            }
            let mut next = Vec::new();
            for (pos, &y) in images.iter().enumerate() {
                if orbit_of[y as usize] == NO_ORBIT {
                    if check_closed && !valid(y) {
                        return Err(Error::NotClosed);
                    }
                    orbit_of[y as usize] = id;
                    schreier[y as usize] = (pos % ngens) as u8;
                    next.push(y);
                }
            }
            size += next.len() as u64;
            frontier = next;
        }
        sizes.push(size);
    }
    Ok(Partition {
        orbit_of,
        schreier,
        roots,
        sizes,
    })
}

impl Partition {
    /// Walks the Schreier chain from `i` to its root. Returns the root and the product
    /// of inverse generators along the way (as a generator-index list, applied first
    /// to last).
    pub(crate) fn chain<A: Fn(usize, u64) -> u64>(&self, mut i: u64, act_inv: A) -> (u64, Vec<u8>) {
        let mut steps = Vec::new();
        loop {
            let k = self.schreier[i as usize];
            if k == ROOT {
                return (i, steps);
            }
            steps.push(k);
            i = act_inv(k as usize, i);
        }
    }
}

/// Multiplies `mats[k]` for `k` in `steps` onto the identity from the left.
pub(crate) fn compose_chain(f: &Field, mats: &[GroupElement], steps: &[u8]) -> Mat4 {
    let mut w = mat_identity();
    for &k in steps {
        w = mat_mul(f, mats[k as usize].matrix(), &w);
    }
    mat_normalize(f, &mut w);
    w
}

/// Image index of point `i` of PG(9,q) under `g`.
#[inline]
pub(crate) fn act_index(f: &Field, ix: &ProjectiveIndexer, g: &GroupElement, i: u64) -> u64 {
    let mut c = [FieldElement::ZERO; NCOORDS];
    ix.decode(i, &mut c);
    let mut img = g.apply(f, &c);
    ix.normalize_index(f, &mut img).expect("invertible")
}

/// Orbits of K (or any generated subgroup) on all points of PG(9,q).
#[derive(Clone, Debug)]
pub struct OrbitTable {
    field: Field,
    gens: Vec<GroupElement>,
    inv_gens: Vec<GroupElement>,
    part: Partition,
}

/// One orbit: its minimal index and size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitRep {
    pub index: u64,
    pub size: u64,
}

/// Bytes of memory a full point table needs.
pub fn orbit_table_bytes(q: u32) -> u64 {
    // orbit id + Schreier byte per point
    crate::geom::point_count(q) * 5
}

/// Computes the orbits of the generated group on the points of PG(9,q).
pub fn point_orbits(f: &Field, gens: &GeneratingSet, memory_budget: u64) -> Result<OrbitTable> {
    let required = orbit_table_bytes(f.q());
    if required > memory_budget {
        return Err(Error::MemoryBudgetExceeded {
            required,
            budget: memory_budget,
        });
    }
    let ix = pg9(f);
    let g: Vec<GroupElement> = gens.gens.clone();
    let part = partition(ix.count(), |_| true, g.len(), |k, i| act_index(f, &ix, &g[k], i), false)?;
    Ok(OrbitTable {
        field: f.clone(),
        inv_gens: g.iter().map(|x| x.inverse(f)).collect(),
        gens: g,
        part,
    })
}

impl OrbitTable {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.gens
    }

    pub fn point_count(&self) -> u64 {
        self.part.orbit_of.len() as u64
    }

    pub fn orbit_count(&self) -> usize {
        self.part.roots.len()
    }

    /// Representatives (minimal indices) with orbit sizes, in increasing index order.
    pub fn orbit_reps(&self) -> Vec<OrbitRep> {
        self.part
            .roots
            .iter()
            .zip(&self.part.sizes)
            .map(|(&index, &size)| OrbitRep { index, size })
            .collect()
    }

    pub fn orbit_id(&self, i: u64) -> usize {
        self.part.orbit_of[i as usize] as usize
    }

    pub fn rep_of(&self, i: u64) -> u64 {
        self.part.roots[self.orbit_id(i)]
    }

    pub fn orbit_size(&self, i: u64) -> u64 {
        self.part.sizes[self.orbit_id(i)]
    }

    pub fn schreier_entry(&self, i: u64) -> Option<usize> {
        match self.part.schreier[i as usize] {
            ROOT => None,
            k => Some(k as usize),
        }
    }

    /// Root of `i` and a matrix mapping point `i` onto it.
    pub fn trace(&self, i: u64) -> (u64, Mat4) {
        let f = &self.field;
        let ix = pg9(f);
        let (root, steps) = self.part.chain(i, |k, y| act_index(f, &ix, &self.inv_gens[k], y));
        (root, compose_chain(f, &self.inv_gens, &steps))
    }

    /// The orbit representative of `p` and an element mapping `p` onto it.
    pub fn trace_to_rep(&self, p: &SymPoint) -> (SymPoint, GroupElement) {
        let (root, m) = self.trace(p.index());
        let rep = crate::geom::index_point(&self.field, root).expect("root in range");
        (rep, lift(&self.field, &m).expect("invertible"))
    }

    /// Binary checkpoint: magic, version, q, point count, generators, then the
    /// representative and Schreier arrays as little-endian u32.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(TABLE_MAGIC)?;
        w.write_all(&TABLE_VERSION.to_le_bytes())?;
        w.write_all(&self.field.q().to_le_bytes())?;
        w.write_all(&(self.point_count() as u32).to_le_bytes())?;
        w.write_all(&(self.gens.len() as u32).to_le_bytes())?;
        for g in &self.gens {
            let codes: Vec<u8> = g.matrix().iter().flatten().map(|x| x.code()).collect();
            w.write_all(&codes)?;
        }
        let mut buf = Vec::with_capacity(self.point_count() as usize * 4);
        for i in 0..self.point_count() {
            buf.extend_from_slice(&(self.rep_of(i) as u32).to_le_bytes());
        }
        w.write_all(&buf)?;
        buf.clear();
        for &s in &self.part.schreier {
            let v = if s == ROOT { u32::MAX } else { s as u32 };
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<OrbitTable> {
        let bad = |m: &str| Error::parse(0, 0, format!("orbit table: {m}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != TABLE_MAGIC {
            return Err(bad("bad magic"));
        }
        let mut word = [0u8; 4];
        let mut read_u32 = |r: &mut dyn Read| -> Result<u32> {
            r.read_exact(&mut word)?;
            Ok(u32::from_le_bytes(word))
        };
        if read_u32(&mut r)? != TABLE_VERSION {
            return Err(bad("unsupported version"));
        }
        let q = read_u32(&mut r)?;
        let f = Field::new(q)?;
        let n = read_u32(&mut r)? as u64;
        if n != pg9(&f).count() {
            return Err(bad("point count does not match q"));
        }
        let ngens = read_u32(&mut r)? as usize;
        let mut gens = Vec::with_capacity(ngens);
        for _ in 0..ngens {
            let mut codes = [0u8; 16];
            r.read_exact(&mut codes)?;
            let mut m = [[FieldElement::ZERO; 4]; 4];
            for (k, &c) in codes.iter().enumerate() {
                m[k / 4][k % 4] = f.element(c as u32)?;
            }
            gens.push(lift(&f, &m)?);
        }
        let mut raw = vec![0u8; n as usize * 4];
        r.read_exact(&mut raw)?;
        let rep_of: Vec<u32> = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        r.read_exact(&mut raw)?;
        let schreier: Vec<u8> = raw
            .chunks_exact(4)
            .map(|c| match u32::from_le_bytes(c.try_into().unwrap()) {
                u32::MAX => Ok(ROOT),
                k if (k as usize) < ngens => Ok(k as u8),
                _ => Err(bad("Schreier entry out of range")),
            })
            .collect::<Result<_>>()?;
        let mut root_ids: HashMap<u32, u32> = HashMap::new();
        let mut roots = Vec::new();
        for (i, &rep) in rep_of.iter().enumerate() {
            if rep as usize == i {
                root_ids.insert(rep, roots.len() as u32);
                roots.push(rep as u64);
            }
        }
        let mut sizes = vec![0u64; roots.len()];
        let mut orbit_of = Vec::with_capacity(n as usize);
        for &rep in &rep_of {
            let id = *root_ids.get(&rep).ok_or_else(|| bad("representative is not a root"))?;
            sizes[id as usize] += 1;
            orbit_of.push(id);
        }
        Ok(OrbitTable {
            field: f.clone(),
            inv_gens: gens.iter().map(|g| g.inverse(&f)).collect(),
            gens,
            part: Partition {
                orbit_of,
                schreier,
                roots,
                sizes,
            },
        })
    }
}

const TABLE_MAGIC: &[u8; 4] = b"SSOT";
const TABLE_VERSION: u32 = 1;

/// Stabilizer of an orbit representative, built by sifting uniformly random elements
/// of `group` moved back onto `rep` through the Schreier vector. The order is exactly
/// `|group| / |orbit|`.
pub fn stabilizer(
    f: &Field,
    table: &OrbitTable,
    rep: u64,
    group: &Bsgs,
    pg3: &Pg3Action,
    rng: &mut impl Rng,
) -> Result<(GeneratingSet, Bsgs)> {
    if table.rep_of(rep) != rep {
        return Err(Error::Invariant(format!("point {rep} is not an orbit representative")));
    }
    let target = group.order() / table.orbit_size(rep);
    let ix = pg9(f);
    let b = Bsgs::from_samples(f, pg3.degree(), target, || {
        let g = group.random_element(f, rng);
        let ge = g.to_element(f);
        let y = act_index(f, &ix, &ge, rep);
        let (root, w) = table.trace(y);
        debug_assert_eq!(root, rep);
        PermElement::from_matrix(f, pg3, &w).mul(f, &g)
    })?;
    Ok((generating_set(f, &b), b))
}

/// The strong generators of a BSGS as a generating set carrying its order.
pub fn generating_set(f: &Field, b: &Bsgs) -> GeneratingSet {
    GeneratingSet {
        gens: b.strong_generators().iter().map(|g| g.to_element(f)).collect(),
        claimed_order: Some(b.order()),
    }
}

/// Orbits of a group on an explicit invariant set of subspaces.
#[derive(Clone, Debug)]
pub struct SubspaceOrbits {
    field: Field,
    cands: Vec<Subspace>,
    lookup: HashMap<Subspace, u64>,
    inv_gens: Vec<GroupElement>,
    part: Partition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceOrbit {
    pub rep: Subspace,
    pub size: u64,
}

/// Partitions `cands` into orbits of `gens`. Representatives are the encoding-minimal
/// members. With `check_closed`, an image outside `cands` is reported as
/// [`Error::NotClosed`]; without it such an image is a logic error.
pub fn orbits_on_subspaces(
    f: &Field,
    gens: &GeneratingSet,
    cands: &[Subspace],
    check_closed: bool,
) -> Result<SubspaceOrbits> {
    let mut sorted = cands.to_vec();
    sorted.sort();
    sorted.dedup();
    let lookup: HashMap<Subspace, u64> = sorted.iter().enumerate().map(|(i, w)| (*w, i as u64)).collect();
    let g = &gens.gens;
    let missing = std::sync::atomic::AtomicBool::new(false);
    let part = partition(
        sorted.len() as u64,
        |_| true,
        g.len(),
        |k, i| {
            let img = act_subspace(f, &g[k], &sorted[i as usize]);
            match lookup.get(&img) {
                Some(&j) => j,
                None => {
                    missing.store(true, std::sync::atomic::Ordering::Relaxed);
                    i
                }
            }
        },
        false,
    )?;
    if missing.load(std::sync::atomic::Ordering::Relaxed) {
        if check_closed {
            return Err(Error::NotClosed);
        }
        return Err(Error::Invariant("subspace orbit left the candidate set".into()));
    }
    Ok(SubspaceOrbits {
        field: f.clone(),
        inv_gens: g.iter().map(|x| x.inverse(f)).collect(),
        cands: sorted,
        lookup,
        part,
    })
}

impl SubspaceOrbits {
    pub fn orbits(&self) -> Vec<SubspaceOrbit> {
        self.part
            .roots
            .iter()
            .zip(&self.part.sizes)
            .map(|(&r, &size)| SubspaceOrbit {
                rep: self.cands[r as usize],
                size,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.part.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.part.roots.is_empty()
    }

    /// Orbit number of a member.
    pub fn orbit_of(&self, w: &Subspace) -> Option<usize> {
        self.lookup.get(w).map(|&i| self.part.orbit_of[i as usize] as usize)
    }

    /// An element mapping a member onto its orbit representative.
    pub fn witness(&self, w: &Subspace) -> Option<GroupElement> {
        let f = &self.field;
        let &i = self.lookup.get(w)?;
        let (_, steps) = self.part.chain(i, |k, y| {
            let img = act_subspace(f, &self.inv_gens[k], &self.cands[y as usize]);
            self.lookup[&img]
        });
        Some(lift(f, &compose_chain(f, &self.inv_gens, &steps)).expect("invertible"))
    }
}

/// Exhaustive search over the whole group for `g` with `g(w1) = w2`.
pub fn brute_force_equivalent(
    f: &Field,
    w1: &Subspace,
    w2: &Subspace,
    group: &Bsgs,
    oracle_bound: u64,
) -> Result<Option<GroupElement>> {
    if group.order() > oracle_bound {
        return Err(Error::OracleBoundExceeded {
            order: group.order(),
            bound: oracle_bound,
        });
    }
    if w1.rank() != w2.rank() {
        return Ok(None);
    }
    Ok(group.for_each_element(f, |g| {
        let ge = g.to_element(f);
        if act_subspace(f, &ge, w1) == *w2 {
            ControlFlow::Break(ge)
        } else {
            ControlFlow::Continue(())
        }
    }))
}

/// Exhaustive orbit of `w` under every element of `group` (oracle use only).
pub fn brute_force_orbit(f: &Field, w: &Subspace, group: &Bsgs) -> std::collections::HashSet<Subspace> {
    let mut out = std::collections::HashSet::new();
    group.for_each_element::<()>(f, |g| {
        out.insert(act_subspace(f, &g.to_element(f), w));
        ControlFlow::Continue(())
    });
    out
}

/// Convenience: K as a BSGS together with its PG(3,q) action.
pub fn pgl4_group(f: &Field) -> (Pg3Action, Bsgs) {
    let pg3 = Pg3Action::new(f);
    let gens: Vec<PermElement> = crate::group::pgl4_generators(f)
        .gens
        .iter()
        .map(|g| PermElement::from_element(f, &pg3, g))
        .collect();
    let b = Bsgs::schreier_sims(f, pg3.degree(), &gens);
    (pg3, b)
}

#[allow(dead_code)]
pub(crate) fn coords_of(f: &Field, i: u64) -> Coords {
    let mut c = [FieldElement::ZERO; NCOORDS];
    pg9(f).decode(i, &mut c);
    c
}
