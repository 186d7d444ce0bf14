//! Level-by-level classification of semifield subspaces under K = PGL(4,q).
//!
//! Level `d` holds one node per K-orbit of `d`-dimensional semifield subspaces (rank
//! `d + 1`). For every node the orbits of its stabilizer on valid extension points are
//! stored with a Schreier vector over the quotient space; a pair (node, extension
//! orbit) is a *flag class*. The key of a subspace `W` is the smallest flag class
//! obtained from its hyperplanes, which makes it a complete K-invariant, and a witness
//! mapping `W` onto the key subspace is assembled from the Schreier vectors of the
//! levels below.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bsgs::{Bsgs, PermElement};
use crate::error::{Error, Result};
use crate::geom::{pg9, rank_coords, Coords, ProjectiveIndexer, Subspace, NCOORDS};
use crate::gf::{Field, FieldElement};
use crate::group::{
    lift, mat_inverse, mat_mul, mat_normalize, pgl4_generators, GeneratingSet, GroupElement, Mat4, Pg3Action,
};
use crate::orbits::{
    compose_chain, generating_set, orbit_table_bytes, partition, point_orbits, stabilizer, OrbitTable, Partition,
    NO_ORBIT, ROOT,
};

/// Highest dimension a semifield subspace of PG(9,q) can have.
pub const MAX_DIM: usize = 3;

/// (node index at the level below, orbit index in that node's extension table).
pub type FlagKey = (u32, u32);

/// Position of a node in a classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrbitKey {
    pub dim: usize,
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub max_dim: usize,
    /// Bytes available for the point table and rank array.
    pub memory_budget: u64,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
    pub seed: u64,
    pub time_limit: Option<Duration>,
    /// State file written after every level and resumed from when present.
    pub checkpoint: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_dim: MAX_DIM,
            memory_budget: 8 << 30,
            workers: 0,
            seed: 0x5eed,
            time_limit: None,
            checkpoint: None,
        }
    }
}

/// Orbits of a node stabilizer on the points of the quotient PG(9,q)/U whose span
/// with U is again a semifield subspace.
struct ExtensionTable {
    rep: Subspace,
    free: Vec<usize>,
    ix: ProjectiveIndexer,
    valid_count: u64,
    part: Option<Partition>,
    inv_gens: Vec<GroupElement>,
}

impl ExtensionTable {
    fn new(f: &Field, ranks: &[u8], rep: &Subspace, gens: Option<&[GroupElement]>) -> Result<Self> {
        let pivots = rep.pivots();
        let free: Vec<usize> = (0..NCOORDS).filter(|c| !pivots.contains(c)).collect();
        let ix = ProjectiveIndexer::new(f.q(), free.len());
        let pg = pg9(f);
        let q = f.q() as u64;
        let r = rep.rank();
        let rows = rep.rows();
        let shell = ExtensionTable {
            rep: *rep,
            free,
            ix,
            valid_count: 0,
            part: None,
            inv_gens: Vec::new(),
        };
        // every point of span(U, v) outside U is v + u for some u in U
        let valid: Vec<bool> = (0..shell.ix.count())
            .into_par_iter()
            .map(|x| {
                let v = shell.lift_point(x);
                (0..q.pow(r as u32)).all(|mut c| {
                    let mut w = v;
                    for row in rows {
                        let a = FieldElement((c % q) as u8);
                        c /= q;
                        if !a.is_zero() {
                            for k in 0..NCOORDS {
                                w[k] = f.mul_add(w[k], a, row[k]);
                            }
                        }
                    }
                    let i = pg.normalize_index(f, &mut w).expect("v is outside U");
                    ranks[i as usize] == 4
                })
            })
            .collect();
        let mut table = shell;
        table.valid_count = valid.iter().filter(|&&b| b).count() as u64;
        if let Some(gens) = gens {
            if gens.len() >= ROOT as usize {
                return Err(Error::Invariant(format!("{} stabilizer generators", gens.len())));
            }
            let t = &table;
            let part = partition(
                t.ix.count(),
                |x| valid[x as usize],
                gens.len(),
                |k, x| t.image(f, &gens[k], x),
                false,
            )?;
            table.inv_gens = gens.iter().map(|g| g.inverse(f)).collect();
            table.part = Some(part);
        }
        Ok(table)
    }

    /// The reduced vector (zero on pivot columns) of quotient point `x`.
    fn lift_point(&self, x: u64) -> Coords {
        let mut y = [FieldElement::ZERO; NCOORDS];
        self.ix.decode(x, &mut y[..self.free.len()]);
        let mut v = [FieldElement::ZERO; NCOORDS];
        for (k, &c) in self.free.iter().enumerate() {
            v[c] = y[k];
        }
        v
    }

    fn quotient_index(&self, f: &Field, v: &Coords) -> Option<u64> {
        let mut w = *v;
        self.rep.reduce(f, &mut w);
        let mut y = [FieldElement::ZERO; NCOORDS];
        for (k, &c) in self.free.iter().enumerate() {
            y[k] = w[c];
        }
        self.ix.normalize_index(f, &mut y[..self.free.len()])
    }

    fn image(&self, f: &Field, g: &GroupElement, x: u64) -> u64 {
        self.quotient_index(f, &g.apply(f, &self.lift_point(x)))
            .expect("g fixes U")
    }

    fn part(&self) -> &Partition {
        self.part.as_ref().expect("extension orbits computed")
    }

    fn orbit_of(&self, x: u64) -> Option<u32> {
        match self.part().orbit_of[x as usize] {
            NO_ORBIT => None,
            o => Some(o),
        }
    }

    /// Root of the orbit of `x` and a stabilizer element moving `x` onto it.
    fn trace(&self, f: &Field, x: u64) -> (u64, Mat4) {
        let (root, steps) = self.part().chain(x, |k, y| self.image(f, &self.inv_gens[k], y));
        (root, compose_chain(f, &self.inv_gens, &steps))
    }
}

struct Node {
    rep: Subspace,
    key: Option<FlagKey>,
    stab: Bsgs,
    /// Maps the key subspace onto `rep`.
    from_key: Mat4,
    orbit_size: u64,
    ext: Option<ExtensionTable>,
}

#[derive(Default)]
struct Level {
    nodes: Vec<Node>,
    by_root: HashMap<u64, usize>,
    by_key: HashMap<FlagKey, usize>,
}

type Memo = HashMap<Subspace, (usize, Mat4)>;

/// Hyperplane flag: key, element moving the hyperplane onto its node, quotient point.
type HyperplaneFlag = (FlagKey, Mat4, u64);

/// The classification engine and its state.
pub struct Classifier {
    f: Field,
    config: Config,
    pg: ProjectiveIndexer,
    table: OrbitTable,
    ranks: Vec<u8>,
    pg3: Pg3Action,
    k: Bsgs,
    levels: Vec<Level>,
    pool: rayon::ThreadPool,
    deadline: Option<Instant>,
}

/// Public view of one orbit representative.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitNode {
    pub dim: usize,
    pub index: usize,
    #[serde(skip)]
    pub rep: Subspace,
    #[serde(skip)]
    pub stab: GeneratingSet,
    /// Basis rows, ten element tokens each.
    pub basis: Vec<String>,
    /// Stabilizer generators, sixteen matrix tokens each (row-major).
    pub stabilizer: Vec<String>,
    pub stab_order: u64,
    pub orbit_size: Option<u64>,
    /// Node one level down equivalent to a hyperplane of `rep`.
    pub parent: Option<usize>,
    pub key: Option<FlagKey>,
    pub maximal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationResult {
    pub q: u32,
    pub min_poly: String,
    pub levels: Vec<Vec<OrbitNode>>,
    pub counts: Vec<usize>,
    pub maximal_counts: Vec<usize>,
}

impl ClassificationResult {
    /// `d=0:2 d=1:5 d=2:6 d=3:1`
    pub fn summary_line(&self) -> String {
        Self::row(&self.counts)
    }

    pub fn maximal_line(&self) -> String {
        Self::row(&self.maximal_counts)
    }

    fn row(v: &[usize]) -> String {
        v.iter()
            .enumerate()
            .map(|(d, c)| format!("d={d}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Runs (or resumes) a classification up to `config.max_dim`.
pub fn classify(q: u32, config: Config) -> Result<ClassificationResult> {
    let mut c = Classifier::new(q, config)?;
    c.run()?;
    Ok(c.result())
}

fn seed_for(seed: u64, dim: usize, key: FlagKey) -> u64 {
    seed ^ ((dim as u64) << 58) ^ ((key.0 as u64) << 29) ^ key.1 as u64
}

impl Classifier {
    /// Builds the point table, rank array and K; resumes from the checkpoint file if
    /// one is configured and exists.
    pub fn new(q: u32, config: Config) -> Result<Classifier> {
        let f = Field::new(q)?;
        if config.max_dim > MAX_DIM {
            return Err(Error::Invariant(format!(
                "max dimension {} exceeds {MAX_DIM}",
                config.max_dim
            )));
        }
        let pg = pg9(&f);
        let required = orbit_table_bytes(q) + pg.count();
        if required > config.memory_budget {
            return Err(Error::MemoryBudgetExceeded {
                required,
                budget: config.memory_budget,
            });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Invariant(e.to_string()))?;
        let deadline = config.time_limit.map(|t| Instant::now() + t);
        let (table, ranks, pg3, k) = pool.install(|| -> Result<_> {
            let table = point_orbits(&f, &pgl4_generators(&f), config.memory_budget)?;
            let ranks: Vec<u8> = (0..pg.count())
                .into_par_iter()
                .map(|i| {
                    let mut c = [FieldElement::ZERO; NCOORDS];
                    pg.decode(i, &mut c);
                    rank_coords(&f, &c)
                })
                .collect();
            let (pg3, k) = crate::orbits::pgl4_group(&f);
            Ok((table, ranks, pg3, k))
        })?;
        let mut c = Classifier {
            f,
            config,
            pg,
            table,
            ranks,
            pg3,
            k,
            levels: Vec::new(),
            pool,
            deadline,
        };
        if let Some(path) = c.config.checkpoint.clone() {
            if path.exists() {
                c.resume(&path)?;
            }
        }
        Ok(c)
    }

    pub fn field(&self) -> &Field {
        &self.f
    }

    pub fn point_table(&self) -> &OrbitTable {
        &self.table
    }

    pub fn group(&self) -> (&Pg3Action, &Bsgs) {
        (&self.pg3, &self.k)
    }

    pub fn levels_done(&self) -> usize {
        self.levels.len()
    }

    /// Completes all levels up to `max_dim` and the maximality flags.
    pub fn run(&mut self) -> Result<()> {
        while self.levels.len() <= self.config.max_dim {
            let d = self.levels.len();
            if d == 0 {
                self.level0()?;
            } else {
                self.build_extensions(d - 1, true)?;
                self.extend_level(d)?;
            }
            if let Some(path) = self.config.checkpoint.clone() {
                self.save(&path)?;
            }
            self.check_deadline()?;
        }
        self.build_extensions(self.config.max_dim, false)?;
        Ok(())
    }

    fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(t) if Instant::now() > t => Err(Error::Timeout {
                completed_level: self.levels.len(),
            }),
            _ => Ok(()),
        }
    }

    fn rng(&self, dim: usize, key: FlagKey) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed_for(self.config.seed, dim, key))
    }

    /// The two rank-4 point orbits with their stabilizers.
    fn level0(&mut self) -> Result<()> {
        let f = &self.f;
        let reps: Vec<_> = self
            .table
            .orbit_reps()
            .into_iter()
            .filter(|r| self.ranks[r.index as usize] == 4)
            .collect();
        if reps.len() != 2 {
            return Err(Error::UnexpectedOrbitCount {
                expected: 2,
                found: reps.len(),
            });
        }
        let mut level = Level::default();
        for (i, r) in reps.iter().enumerate() {
            let mut rng = self.rng(0, (i as u32, 0));
            let (_, stab) = stabilizer(f, &self.table, r.index, &self.k, &self.pg3, &mut rng)?;
            if stab.order() * r.size != self.k.order() {
                return Err(Error::Invariant("orbit-stabilizer mismatch at level 0".into()));
            }
            let p = crate::geom::index_point(f, r.index)?;
            level.by_root.insert(r.index, i);
            level.nodes.push(Node {
                rep: Subspace::point(&p),
                key: None,
                stab,
                from_key: crate::group::mat_identity(),
                orbit_size: r.size,
                ext: None,
            });
        }
        self.levels.push(level);
        Ok(())
    }

    /// Extension tables for every node of level `d`; orbits only when `with_orbits`.
    fn build_extensions(&mut self, d: usize, with_orbits: bool) -> Result<()> {
        let Some(level) = self.levels.get(d) else {
            return Ok(());
        };
        let (f, ranks) = (&self.f, &self.ranks);
        let todo: Vec<usize> = (0..level.nodes.len())
            .filter(|&i| match &level.nodes[i].ext {
                None => true,
                Some(e) => with_orbits && e.part.is_none(),
            })
            .collect();
        let tables: Vec<(usize, ExtensionTable)> = self.pool.install(|| {
            todo.iter()
                .map(|&i| {
                    let node = &level.nodes[i];
                    let gens: Option<Vec<GroupElement>> =
                        with_orbits.then(|| node.stab.strong_generators().iter().map(|g| g.to_element(f)).collect());
                    ExtensionTable::new(f, ranks, &node.rep, gens.as_deref()).map(|t| (i, t))
                })
                .collect::<Result<_>>()
        })?;
        for (i, t) in tables {
            self.levels[d].nodes[i].ext = Some(t);
        }
        Ok(())
    }

    /// Node of the level below holding `u`, and an element mapping `u` onto its rep.
    fn locate(&self, u: &Subspace, memo: &mut Memo) -> Result<(usize, Mat4)> {
        if let Some(hit) = memo.get(u) {
            return Ok(*hit);
        }
        let out = if u.rank() == 1 {
            let idx = self.pg.index_normalized(&u.rows()[0]);
            let (root, w) = self.table.trace(idx);
            let n = *self.levels[0].by_root.get(&root).ok_or(Error::NotSemifield {
                rank: self.ranks[idx as usize],
            })?;
            (n, w)
        } else {
            let (key, h) = self.min_flag(u, memo)?;
            let level = &self.levels[u.rank() - 1];
            let n = *level
                .by_key
                .get(&key)
                .ok_or_else(|| Error::Invariant(format!("flag class {key:?} has no node")))?;
            let mut w = mat_mul(&self.f, &level.nodes[n].from_key, &h);
            mat_normalize(&self.f, &mut w);
            (n, w)
        };
        memo.insert(*u, out);
        Ok(out)
    }

    fn hyperplane_flags(&self, w: &Subspace, memo: &mut Memo) -> Result<Vec<HyperplaneFlag>> {
        let f = &self.f;
        let below = &self.levels[w.rank() - 2];
        let mut out = Vec::new();
        for u in w.hyperplanes(f) {
            let (n, g) = self.locate(&u, memo)?;
            let v = w
                .rows()
                .iter()
                .find(|r| !u.contains(f, r))
                .expect("hyperplane is proper");
            let gv = lift(f, &g)?.apply(f, v);
            let ext = below.nodes[n]
                .ext
                .as_ref()
                .ok_or_else(|| Error::Invariant("extension table missing".into()))?;
            let x = ext.quotient_index(f, &gv).expect("v outside the hyperplane");
            let o = ext
                .orbit_of(x)
                .ok_or_else(|| Error::Invariant("extension point outside the valid set".into()))?;
            out.push(((n as u32, o), g, x));
        }
        Ok(out)
    }

    /// Smallest flag class among the hyperplanes of `w`, with an element mapping `w`
    /// onto that class's key subspace.
    fn min_flag(&self, w: &Subspace, memo: &mut Memo) -> Result<(FlagKey, Mat4)> {
        let flags = self.hyperplane_flags(w, memo)?;
        let (key, g, x) = flags.into_iter().min_by_key(|fl| fl.0).expect("rank at least 2");
        let ext = self.levels[w.rank() - 2].nodes[key.0 as usize].ext.as_ref().unwrap();
        let (_, s) = ext.trace(&self.f, x);
        let mut h = mat_mul(&self.f, &s, &g);
        mat_normalize(&self.f, &mut h);
        Ok((key, h))
    }

    /// The subspace `rep_j + <root of orbit o>`.
    fn key_subspace(&self, dim: usize, key: FlagKey) -> Subspace {
        let node = &self.levels[dim - 1].nodes[key.0 as usize];
        let ext = node.ext.as_ref().unwrap();
        let root = ext.part().roots[key.1 as usize];
        node.rep
            .extend(&self.f, &ext.lift_point(root))
            .expect("valid extension")
    }

    fn extend_level(&mut self, d: usize) -> Result<()> {
        let below = &self.levels[d - 1];
        let mut flags: Vec<(FlagKey, Subspace)> = Vec::new();
        for (j, node) in below.nodes.iter().enumerate() {
            let ext = node.ext.as_ref().unwrap();
            for o in 0..ext.part().roots.len() {
                flags.push(((j as u32, o as u32), self.key_subspace(d, (j as u32, o as u32))));
            }
        }
        let canon: Vec<(FlagKey, Mat4)> = self.pool.install(|| {
            flags
                .par_iter()
                .map(|(_, w)| {
                    self.check_deadline()?;
                    self.min_flag(w, &mut Memo::new())
                })
                .collect::<Result<_>>()
        })?;
        // survivor: the encoding-minimal candidate of each class
        let mut classes: BTreeMap<FlagKey, (Subspace, Mat4)> = BTreeMap::new();
        for ((_, w), (key, h)) in flags.iter().zip(&canon) {
            match classes.get(key) {
                Some((s, _)) if s <= w => {}
                _ => {
                    classes.insert(*key, (*w, *h));
                }
            }
        }
        let made: Vec<Node> = self.pool.install(|| {
            classes
                .par_iter()
                .map(|(key, (rep, h))| {
                    self.check_deadline()?;
                    self.make_node(d, *key, rep, h)
                })
                .collect::<Result<_>>()
        })?;
        let mut nodes = made;
        nodes.sort_by_key(|n| n.rep);
        let mut level = Level::default();
        for (i, n) in nodes.iter().enumerate() {
            level.by_key.insert(n.key.unwrap(), i);
        }
        level.nodes = nodes;
        self.levels.push(level);
        Ok(())
    }

    /// Builds the node for flag class `key` with representative `rep`, where `h` maps
    /// `rep` onto the key subspace.
    fn make_node(&self, d: usize, key: FlagKey, rep: &Subspace, h: &Mat4) -> Result<Node> {
        let f = &self.f;
        let n = self.pg3.degree();
        let parent = &self.levels[d - 1].nodes[key.0 as usize];
        let ext = parent.ext.as_ref().unwrap();
        let root = ext.part().roots[key.1 as usize];
        let wkey = self.key_subspace(d, key);

        // stabilizer of the flag (parent rep, key subspace)
        let target = parent.stab.order() / ext.part().sizes[key.1 as usize];
        let mut rng = self.rng(d, key);
        let flag_stab = Bsgs::from_samples(f, n, target, || {
            let g = parent.stab.random_element(f, &mut rng);
            let y = ext.image(f, &g.to_element(f), root);
            let (r, s) = ext.trace(f, y);
            debug_assert_eq!(r, root);
            PermElement::from_matrix(f, &self.pg3, &s).mul(f, &g)
        })?;

        // the key subspace's stabilizer permutes the hyperplanes in its minimal class
        let mut memo = Memo::new();
        let hyper = self.hyperplane_flags(&wkey, &mut memo)?;
        if hyper.iter().map(|fl| fl.0).min() != Some(key) {
            return Err(Error::Invariant(format!(
                "flag class {key:?} is not minimal on its own subspace"
            )));
        }
        let mut gens = flag_stab.strong_generators().to_vec();
        let mut m = 0u64;
        for (k, g, x) in &hyper {
            if *k == key {
                m += 1;
                let (_, s) = ext.trace(f, *x);
                gens.push(PermElement::from_matrix(f, &self.pg3, &mat_mul(f, &s, g)));
            }
        }
        let stab_key = Bsgs::schreier_sims(f, n, &gens);
        if stab_key.order() != target * m {
            return Err(Error::Invariant(format!(
                "stabilizer order {} differs from {} * {m}",
                stab_key.order(),
                target
            )));
        }

        // conjugate onto the surviving representative
        let from_key = mat_inverse(f, h).ok_or(Error::SingularMatrix)?;
        let a = PermElement::from_matrix(f, &self.pg3, &from_key);
        let a_inv = PermElement::from_matrix(f, &self.pg3, h);
        let conj: Vec<PermElement> = stab_key
            .strong_generators()
            .iter()
            .map(|s| a.mul(f, &s.mul(f, &a_inv)))
            .collect();
        let stab = if *rep == wkey && conj.is_empty() {
            stab_key
        } else {
            Bsgs::schreier_sims(f, n, &conj)
        };
        if stab.order() != target * m {
            return Err(Error::Invariant("conjugated stabilizer has the wrong order".into()));
        }
        Ok(Node {
            rep: *rep,
            key: Some(key),
            orbit_size: self.k.order() / stab.order(),
            stab,
            from_key,
            ext: None,
        })
    }

    /// Key and witness for a semifield subspace of a classified dimension: `g` maps
    /// `w` onto the representative of the returned node.
    pub fn canonicalize(&self, w: &Subspace) -> Result<(OrbitKey, GroupElement)> {
        let d = w.dim();
        if d >= self.levels.len() {
            return Err(Error::NotFound(format!("dimension {d} is not classified")));
        }
        if d > 0
            && self.levels[d - 1]
                .nodes
                .iter()
                .any(|n| n.ext.as_ref().is_none_or(|e| e.part.is_none()))
        {
            return Err(Error::NotFound(format!("dimension {d} has no extension tables")));
        }
        let min_rank = w
            .point_coords(&self.f)
            .map(|c| rank_coords(&self.f, &c))
            .min()
            .unwrap_or(4);
        if min_rank < 4 {
            return Err(Error::NotSemifield { rank: min_rank });
        }
        let (n, g) = self.pool.install(|| self.locate(w, &mut Memo::new()))?;
        Ok((OrbitKey { dim: d, index: n }, lift(&self.f, &g)?))
    }

    /// One representative per stabilizer orbit of one-point extensions of a node,
    /// sorted by encoding.
    pub fn extensions(&self, key: OrbitKey) -> Result<Vec<Subspace>> {
        let node = self
            .levels
            .get(key.dim)
            .and_then(|l| l.nodes.get(key.index))
            .ok_or_else(|| Error::NotFound(format!("{key:?}")))?;
        let ext = node
            .ext
            .as_ref()
            .filter(|e| e.part.is_some())
            .ok_or_else(|| Error::NotFound(format!("no extension orbits for {key:?}")))?;
        let mut out: Vec<Subspace> = ext
            .part()
            .roots
            .iter()
            .map(|&r| node.rep.extend(&self.f, &ext.lift_point(r)).expect("valid extension"))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Number of extension points of a node (zero iff maximal), if known.
    pub fn extension_point_count(&self, key: OrbitKey) -> Option<u64> {
        self.levels
            .get(key.dim)?
            .nodes
            .get(key.index)?
            .ext
            .as_ref()
            .map(|e| e.valid_count)
    }

    /// One survivor per K-orbit among `cands` (all of one classified dimension), the
    /// encoding-minimal member of each, ordered by orbit key.
    pub fn reject_isomorphs(&self, cands: &[Subspace]) -> Result<Vec<(OrbitKey, Subspace)>> {
        let mut best: BTreeMap<OrbitKey, Subspace> = BTreeMap::new();
        for w in cands {
            let (k, _) = self.canonicalize(w)?;
            let e = best.entry(k).or_insert(*w);
            if w < e {
                *e = *w;
            }
        }
        Ok(best.into_iter().collect())
    }

    pub fn node_rep(&self, key: OrbitKey) -> Option<&Subspace> {
        Some(&self.levels.get(key.dim)?.nodes.get(key.index)?.rep)
    }

    pub fn node_stabilizer(&self, key: OrbitKey) -> Option<&Bsgs> {
        Some(&self.levels.get(key.dim)?.nodes.get(key.index)?.stab)
    }

    pub fn result(&self) -> ClassificationResult {
        let f = &self.f;
        let levels: Vec<Vec<OrbitNode>> = self
            .levels
            .iter()
            .enumerate()
            .map(|(d, level)| {
                level
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(i, n)| {
                        let stab = generating_set(f, &n.stab);
                        OrbitNode {
                            dim: d,
                            index: i,
                            rep: n.rep,
                            basis: n.rep.to_text(f).lines().map(str::to_string).collect(),
                            stabilizer: stab.gens.iter().map(|g| g.to_text(f)).collect(),
                            stab,
                            stab_order: n.stab.order(),
                            orbit_size: Some(n.orbit_size),
                            parent: n.key.map(|k| k.0 as usize),
                            key: n.key,
                            maximal: n.ext.as_ref().is_some_and(|e| e.valid_count == 0),
                        }
                    })
                    .collect()
            })
            .collect();
        ClassificationResult {
            q: f.q(),
            min_poly: f.min_poly_string(),
            counts: levels.iter().map(Vec::len).collect(),
            maximal_counts: levels.iter().map(|l| l.iter().filter(|n| n.maximal).count()).collect(),
            levels,
        }
    }

    /// Writes the state of all completed levels.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.state_text())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Line-oriented state document: a header, then one record per node.
    pub fn state_text(&self) -> String {
        let f = &self.f;
        let mut s = String::new();
        let _ = writeln!(s, "symspread-state {STATE_VERSION}");
        let _ = writeln!(s, "q {}", f.q());
        let _ = writeln!(s, "levels {}", self.levels.len());
        for (d, level) in self.levels.iter().enumerate() {
            for (i, n) in level.nodes.iter().enumerate() {
                let _ = writeln!(s, "node {d} {i}");
                match n.key {
                    Some((j, o)) => {
                        let _ = writeln!(s, "key {j} {o}");
                    }
                    None => {
                        let _ = writeln!(s, "key -");
                    }
                }
                let _ = writeln!(s, "orbit_size {}", n.orbit_size);
                let _ = writeln!(s, "stab_order {}", n.stab.order());
                for row in n.rep.rows() {
                    let toks: Vec<String> = row.iter().map(|&x| f.render(x)).collect();
                    let _ = writeln!(s, "row {}", toks.join(" "));
                }
                for g in n.stab.strong_generators() {
                    let _ = writeln!(s, "gen {}", g.to_element(f).to_text(f));
                }
                let _ = writeln!(s, "end");
            }
        }
        s
    }

    fn resume(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        let records = parse_state(&self.f, &text)?;
        let n = self.pg3.degree();
        for rec in records {
            if rec.dim > self.levels.len() {
                return Err(Error::parse(
                    rec.line,
                    1,
                    "node for a level whose predecessor is missing",
                ));
            }
            if rec.dim == self.levels.len() {
                if rec.dim > 0 {
                    self.build_extensions(rec.dim - 1, true)?;
                }
                self.levels.push(Level::default());
            }
            let perms: Vec<PermElement> = rec
                .gens
                .iter()
                .map(|g| PermElement::from_element(&self.f, &self.pg3, g))
                .collect();
            let stab = Bsgs::schreier_sims(&self.f, n, &perms);
            if stab.order() != rec.stab_order {
                return Err(Error::Invariant(format!(
                    "checkpoint node {}/{}: stabilizer order {} != recorded {}",
                    rec.dim,
                    rec.index,
                    stab.order(),
                    rec.stab_order
                )));
            }
            let from_key = match rec.key {
                None => crate::group::mat_identity(),
                Some(key) => {
                    let (k, h) = self.min_flag(&rec.rep, &mut Memo::new())?;
                    if k != key {
                        return Err(Error::Invariant(format!(
                            "checkpoint node {}/{}: recomputed key {k:?} != recorded {key:?}",
                            rec.dim, rec.index
                        )));
                    }
                    mat_inverse(&self.f, &h).ok_or(Error::SingularMatrix)?
                }
            };
            let level = self.levels.last_mut().unwrap();
            let i = level.nodes.len();
            match rec.key {
                None => {
                    level.by_root.insert(self.pg.index_normalized(&rec.rep.rows()[0]), i);
                }
                Some(key) => {
                    level.by_key.insert(key, i);
                }
            }
            level.nodes.push(Node {
                rep: rec.rep,
                key: rec.key,
                stab,
                from_key,
                orbit_size: rec.orbit_size,
                ext: None,
            });
        }
        Ok(())
    }
}

const STATE_VERSION: u32 = 1;

struct StateRecord {
    line: usize,
    dim: usize,
    index: usize,
    key: Option<FlagKey>,
    orbit_size: u64,
    stab_order: u64,
    rep: Subspace,
    gens: Vec<GroupElement>,
}

fn parse_state(f: &Field, text: &str) -> Result<Vec<StateRecord>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0usize;
    let mut next_line = || -> Option<(usize, &str)> {
        let l = lines.get(pos).copied();
        pos += 1;
        l
    };
    let expect = |line: Option<(usize, &str)>, word: &str| -> Result<(usize, String)> {
        let (no, l) = line.ok_or_else(|| Error::parse(0, 0, format!("missing '{word}'")))?;
        let rest = l
            .strip_prefix(word)
            .ok_or_else(|| Error::parse(no, 1, format!("expected '{word}'")))?;
        Ok((no, rest.trim().to_string()))
    };
    let num =
        |no: usize, s: &str| -> Result<u64> { s.parse().map_err(|_| Error::parse(no, 1, format!("bad number '{s}'"))) };
    let (no, v) = expect(next_line(), "symspread-state")?;
    if num(no, &v)? != STATE_VERSION as u64 {
        return Err(Error::parse(no, 1, "unsupported state version"));
    }
    let (no, v) = expect(next_line(), "q")?;
    let q = num(no, &v)? as u32;
    if q != f.q() {
        return Err(Error::FieldMismatch {
            expected: f.q(),
            found: q,
        });
    }
    let (no, v) = expect(next_line(), "levels")?;
    num(no, &v)?;
    let mut out: Vec<StateRecord> = Vec::new();
    while let Some((no, l)) = next_line() {
        let rest = l
            .strip_prefix("node")
            .ok_or_else(|| Error::parse(no, 1, "expected 'node'"))?;
        let ids: Vec<&str> = rest.split_whitespace().collect();
        if ids.len() != 2 {
            return Err(Error::parse(no, 1, "node needs a level and an index"));
        }
        let (dim, index) = (num(no, ids[0])? as usize, num(no, ids[1])? as usize);
        let (kno, kv) = expect(next_line(), "key")?;
        let key = if kv == "-" {
            None
        } else {
            let p: Vec<&str> = kv.split_whitespace().collect();
            if p.len() != 2 {
                return Err(Error::parse(kno, 1, "key needs two numbers"));
            }
            Some((num(kno, p[0])? as u32, num(kno, p[1])? as u32))
        };
        let (sno, sv) = expect(next_line(), "orbit_size")?;
        let orbit_size = num(sno, &sv)?;
        let (tno, tv) = expect(next_line(), "stab_order")?;
        let stab_order = num(tno, &tv)?;
        let mut rows = Vec::new();
        let mut gens = Vec::new();
        loop {
            let (lno, l) = next_line().ok_or_else(|| Error::parse(no, 1, "unterminated node record"))?;
            if l == "end" {
                break;
            } else if let Some(r) = l.strip_prefix("row") {
                rows.push(crate::geom::parse_coords(f, r, lno)?);
            } else if let Some(g) = l.strip_prefix("gen") {
                gens.push(GroupElement::from_text(f, g.trim()).map_err(|e| match e {
                    Error::Parse { column, message, .. } => Error::parse(lno, column, message),
                    other => other,
                })?);
            } else {
                return Err(Error::parse(lno, 1, format!("unexpected line '{l}'")));
            }
        }
        let rep = Subspace::span(f, &rows)?;
        if rep.rank() != dim + 1 || rows.len() != dim + 1 {
            return Err(Error::parse(no, 1, "basis size does not match the level"));
        }
        out.push(StateRecord {
            line: no,
            dim,
            index,
            key,
            orbit_size,
            stab_order,
            rep,
            gens,
        });
    }
    Ok(out)
}
