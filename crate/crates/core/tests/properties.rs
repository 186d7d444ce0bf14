//! Property tests of the algebraic layer against direct matrix arithmetic.

use proptest::prelude::*;
use symspread_core::fixture::FixtureList;
use symspread_core::geom::{det4, index_point, point_count, rank_of, veronese, Coords, UPPER};
use symspread_core::group::{act_point, act_subspace, lift, Mat4};
use symspread_core::{Field, FieldElement, Subspace, SymMatrix, SymPoint};

const ORDERS: [u32; 4] = [2, 3, 4, 5];

fn el(f: &Field, code: u32) -> FieldElement {
    f.element(code % f.q()).unwrap()
}

fn mat(f: &Field, codes: &[u32; 16]) -> Mat4 {
    let mut m = [[FieldElement::ZERO; 4]; 4];
    for (k, &c) in codes.iter().enumerate() {
        m[k / 4][k % 4] = el(f, c);
    }
    m
}

/// Leibniz expansion over all 24 permutations.
fn det_leibniz(f: &Field, m: &Mat4) -> FieldElement {
    let mut total = FieldElement::ZERO;
    let mut perm = [0usize, 1, 2, 3];
    for _ in 0..24 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let mut t = FieldElement::ONE;
        for i in 0..4 {
            t = f.mul(t, m[i][perm[i]]);
        }
        total = if inversions % 2 == 0 {
            f.add(total, t)
        } else {
            f.sub(total, t)
        };
        next_permutation(&mut perm);
    }
    total
}

fn next_permutation(p: &mut [usize; 4]) {
    let Some(i) = (0..3).rev().find(|&i| p[i] < p[i + 1]) else {
        p.reverse();
        return;
    };
    let j = (i + 1..4).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
}

fn matmul(f: &Field, a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[FieldElement::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][j] = f.add(c[i][j], f.mul(a[i][k], b[k][j]));
            }
        }
    }
    c
}

fn transpose(m: &Mat4) -> Mat4 {
    let mut t = *m;
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = m[j][i];
        }
    }
    t
}

/// X A X^T on full matrices.
fn congruence(f: &Field, x: &Mat4, a: &Mat4) -> Mat4 {
    matmul(f, &matmul(f, x, a), &transpose(x))
}

fn sym(f: &Field, codes: &[u32; 10]) -> Mat4 {
    let mut c: Coords = [FieldElement::ZERO; 10];
    for (k, &v) in codes.iter().enumerate() {
        c[k] = el(f, v);
    }
    *SymMatrix::from_coords(&c).entries()
}

fn coords_of(m: &Mat4) -> Coords {
    let mut c = [FieldElement::ZERO; 10];
    for (k, &(i, j)) in UPPER.iter().enumerate() {
        c[k] = m[i][j];
    }
    c
}

fn same_point(f: &Field, a: &Coords, b: &Coords) -> bool {
    SymPoint::new(f, *a).unwrap() == SymPoint::new(f, *b).unwrap()
}

fn invertible(f: &Field, codes: &[u32; 16]) -> Option<Mat4> {
    let m = mat(f, codes);
    (!det_leibniz(f, &m).is_zero()).then_some(m)
}

fn field_strategy() -> impl Strategy<Value = u32> {
    prop::sample::select(ORDERS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lift_is_a_homomorphism(q in field_strategy(), a in any::<[u32; 16]>(), b in any::<[u32; 16]>(), s in any::<[u32; 10]>()) {
        let f = Field::new(q).unwrap();
        let (Some(x), Some(y)) = (invertible(&f, &a), invertible(&f, &b)) else { return Ok(()) };
        let gx = lift(&f, &x).unwrap();
        let gy = lift(&f, &y).unwrap();
        let gxy = lift(&f, &matmul(&f, &x, &y)).unwrap();
        prop_assert_eq!(gx.mul(&f, &gy), gxy.clone());
        let m = sym(&f, &s);
        if m.iter().flatten().all(|e| e.is_zero()) {
            return Ok(());
        }
        let p = SymPoint::new(&f, coords_of(&m)).unwrap();
        let direct = coords_of(&congruence(&f, &matmul(&f, &x, &y), &m));
        prop_assert!(same_point(&f, act_point(&f, &gxy, &p).coords(), &direct));
        let stepwise = act_point(&f, &gx, &act_point(&f, &gy, &p));
        prop_assert_eq!(stepwise, act_point(&f, &gxy, &p));
    }

    #[test]
    fn det4_matches_leibniz_and_congruence(q in field_strategy(), a in any::<[u32; 16]>(), s in any::<[u32; 10]>()) {
        let f = Field::new(q).unwrap();
        let x = mat(&f, &a);
        let m = sym(&f, &s);
        prop_assert_eq!(det4(&f, &x), det_leibniz(&f, &x));
        let dx = det_leibniz(&f, &x);
        let expected = f.mul(f.mul(dx, dx), det_leibniz(&f, &m));
        prop_assert_eq!(det4(&f, &congruence(&f, &x, &m)), expected);
    }

    #[test]
    fn rank_is_invariant_under_the_action(q in field_strategy(), a in any::<[u32; 16]>(), s in any::<[u32; 10]>()) {
        let f = Field::new(q).unwrap();
        let Some(x) = invertible(&f, &a) else { return Ok(()) };
        let m = sym(&f, &s);
        let Ok(p) = SymPoint::new(&f, coords_of(&m)) else { return Ok(()) };
        let g = lift(&f, &x).unwrap();
        prop_assert_eq!(rank_of(&f, &act_point(&f, &g, &p)), rank_of(&f, &p));
    }

    #[test]
    fn fixture_text_and_json_round_trip(q in field_strategy(), rows in prop::collection::vec(any::<[u32; 10]>(), 1..=4), n in 1usize..4) {
        let f = Field::new(q).unwrap();
        let mut subspaces = Vec::new();
        for k in 0..n {
            let vs: Vec<Coords> = rows
                .iter()
                .map(|r| {
                    let mut c = [FieldElement::ZERO; 10];
                    for (i, &v) in r.iter().enumerate() {
                        c[i] = el(&f, v.wrapping_add(k as u32));
                    }
                    c
                })
                .collect();
            match Subspace::span(&f, &vs) {
                Ok(w) if w.rank() == rows.len() => subspaces.push(w),
                _ => return Ok(()),
            }
        }
        let list = FixtureList::from_subspaces(&f, &subspaces, subspaces.len()).unwrap();
        prop_assert_eq!(&FixtureList::parse(&list.to_text().unwrap()).unwrap(), &list);
        prop_assert_eq!(&FixtureList::parse(&list.to_json().unwrap()).unwrap(), &list);
        for (k, w) in subspaces.iter().enumerate() {
            prop_assert_eq!(&list.subspace(&f, k).unwrap(), w);
        }
    }

    #[test]
    fn action_preserves_subspace_dimension(q in field_strategy(), a in any::<[u32; 16]>(), rows in prop::collection::vec(any::<[u32; 10]>(), 1..=4)) {
        let f = Field::new(q).unwrap();
        let Some(x) = invertible(&f, &a) else { return Ok(()) };
        let vs: Vec<Coords> = rows.iter().map(|r| coords_of(&sym(&f, r))).collect();
        let Ok(w) = Subspace::span(&f, &vs) else { return Ok(()) };
        let g = lift(&f, &x).unwrap();
        let image = act_subspace(&f, &g, &w);
        prop_assert_eq!(image.rank(), w.rank());
        prop_assert_eq!(image.is_semifield(&f), w.is_semifield(&f));
        prop_assert_eq!(act_subspace(&f, &g.inverse(&f), &image), w);
    }
}

#[test]
fn rank_one_points_are_exactly_the_veronese_image() {
    for q in ORDERS {
        let f = Field::new(q).unwrap();
        let mut rank_one = std::collections::HashSet::new();
        for i in 0..point_count(q) {
            let p = index_point(&f, i).unwrap();
            if rank_of(&f, &p) == 1 {
                rank_one.insert(p);
            }
        }
        let mut image = std::collections::HashSet::new();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    for d in f.elements() {
                        if let Ok(p) = veronese(&f, [a, b, c, d]) {
                            assert_eq!(rank_of(&f, &p), 1);
                            image.insert(p);
                        }
                    }
                }
            }
        }
        let q = q as usize;
        assert_eq!(image.len(), (q.pow(4) - 1) / (q - 1), "q={q}");
        assert_eq!(image, rank_one, "q={q}");
    }
}
