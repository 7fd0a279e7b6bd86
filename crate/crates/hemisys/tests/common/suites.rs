//! Randomized property suites, shared between the `properties` and
//! `acceptance` test binaries. Every suite draws from a fixed-seed RNG so
//! failures are reproducible.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hemisys::curve::{CurveTables, Sign};
use hemisys::ff::{Fq2, Fq4, Tower};
use hemisys::geom::{Point4, SurfaceModel};
use hemisys::group::{compose, inverse, normalize2x2, GroupElement};
use hemisys::hemi::{assemble, Construction};

fn rng() -> StdRng {
    StdRng::seed_from_u64(0x5eed_cafe)
}

fn random_fq2(t: &Tower, rng: &mut StdRng) -> Fq2 {
    t.unidx2(rng.gen_range(0..t.p * t.p))
}

fn random_fq4(t: &Tower, rng: &mut StdRng) -> Fq4 {
    Fq4 { b0: random_fq2(t, rng), b1: random_fq2(t, rng) }
}

pub fn field_axioms(cases: usize) {
    let mut rng = rng();
    for p in [5u64, 13, 37] {
        let t = Tower::new(p).unwrap();
        for _ in 0..cases {
            let (a, b, c) = (random_fq2(&t, &mut rng), random_fq2(&t, &mut rng), random_fq2(&t, &mut rng));
            assert_eq!(t.mul2(a, t.mul2(b, c)), t.mul2(t.mul2(a, b), c));
            assert_eq!(t.add2(a, t.add2(b, c)), t.add2(t.add2(a, b), c));
            assert_eq!(t.mul2(a, t.add2(b, c)), t.add2(t.mul2(a, b), t.mul2(a, c)));
            assert_eq!(t.mul2(a, b), t.mul2(b, a));
            if !a.is_zero() {
                let inv = t.inv2(a).unwrap();
                assert_eq!(t.mul2(a, inv), Fq2::ONE);
            }
            let (x, y) = (random_fq4(&t, &mut rng), random_fq4(&t, &mut rng));
            assert_eq!(t.mul4(x, y), t.mul4(y, x));
            assert_eq!(t.mul4(x, t.add4(x, y)), t.add4(t.mul4(x, x), t.mul4(x, y)));
            if !x.is_zero() {
                let inv = t.inv4(x).unwrap();
                assert!(t.mul4(x, inv).in_quadratic());
                assert_eq!(t.mul4(x, inv).b0, Fq2::ONE);
            }
        }
    }
}

pub fn frobenius_automorphism(cases: usize) {
    let mut rng = rng();
    for p in [5u64, 13, 37] {
        let t = Tower::new(p).unwrap();
        let q = t.p;
        for _ in 0..cases {
            let (a, b) = (random_fq2(&t, &mut rng), random_fq2(&t, &mut rng));
            assert_eq!(t.frob2(t.add2(a, b)), t.add2(t.frob2(a), t.frob2(b)));
            assert_eq!(t.frob2(t.mul2(a, b)), t.mul2(t.frob2(a), t.frob2(b)));
            assert_eq!(t.frob2(a), t.pow2(a, q), "x^q agrees with the closed form");
            assert_eq!(t.frob2(t.frob2(a)), a, "order 2 over GF(q)");
            let x = random_fq4(&t, &mut rng);
            assert_eq!(t.frob4(t.frob4(x)), t.frob4_sq(x));
            assert_eq!(t.frob4_sq(t.frob4_sq(x)), x, "order 4 over GF(q)");
            // norms and traces land downstairs
            assert!(t.embed(t.norm2(a)) == t.mul2(a, t.frob2(a)));
        }
    }
}

pub fn normalization_idempotence(cases: usize) {
    let mut rng = rng();
    for p in [5u64, 37] {
        let t = Tower::new(p).unwrap();
        let mut done = 0;
        while done < cases {
            let a = [
                [hemisys::ff::Fp(rng.gen_range(0..p)), hemisys::ff::Fp(rng.gen_range(0..p))],
                [hemisys::ff::Fp(rng.gen_range(0..p)), hemisys::ff::Fp(rng.gen_range(0..p))],
            ];
            if a.iter().flatten().all(|c| c.0 == 0) {
                continue;
            }
            let (n1, _) = normalize2x2(&t, &a);
            let (n2, c2) = normalize2x2(&t, &n1);
            assert_eq!(n1, n2, "normalization is idempotent");
            assert_eq!(c2.0, 1);
            // projective point normalization: scaling does not change the key
            let mut coords = [Fq2::ZERO; 4];
            for c in coords.iter_mut() {
                *c = random_fq2(&t, &mut rng);
            }
            if coords.iter().all(|c| c.is_zero()) {
                continue;
            }
            let pt = Point4::new(&t, coords).unwrap();
            let s = loop {
                let s = random_fq2(&t, &mut rng);
                if !s.is_zero() {
                    break s;
                }
            };
            let scaled = Point4::new(&t, coords.map(|c| t.mul2(c, s))).unwrap();
            assert_eq!(pt.key(&t), scaled.key(&t));
            done += 1;
        }
    }
}

pub fn group_normal_forms(cases: usize) {
    let mut rng = rng();
    let t = Tower::new(5).unwrap();
    let mut done = 0;
    while done < cases {
        let a = [
            [hemisys::ff::Fp(rng.gen_range(0..5)), hemisys::ff::Fp(rng.gen_range(0..5))],
            [hemisys::ff::Fp(rng.gen_range(0..5)), hemisys::ff::Fp(rng.gen_range(0..5))],
        ];
        let det = hemisys::group::det2x2(&t, &a);
        if det.0 == 0 {
            continue;
        }
        // find an admissible μ for this determinant
        let mu = t.all2().into_iter().find(|m| t.pow2(*m, 3) == t.embed(det));
        let mu = match mu {
            Some(m) => m,
            None => continue,
        };
        let g = GroupElement::new(&t, a, mu).unwrap();
        let gi = inverse(&t, &g);
        assert!(compose(&t, &g, &gi).is_identity());
        assert!(compose(&t, &gi, &g).is_identity());
        done += 1;
    }
}

pub fn orbit_determinism(cases: usize) {
    // BFS orbit decomposition must not depend on generator order or on
    // the seed ordering of the line set.
    let t = Tower::new(5).unwrap();
    let surface = SurfaceModel::build(&t).unwrap();
    let plus = CurveTables::build(&t, Sign::Plus, true).unwrap();
    let minus = CurveTables::build(&t, Sign::Minus, false).unwrap();
    let cls = hemisys::curve::classify_generators(&surface, &plus, &minus).unwrap();
    let gens = hemisys::group::h_generators(&t).unwrap();
    let reference = hemisys::group::line_orbits(&t, &gens, &surface, &cls.g2).unwrap();
    let mut rng = rng();
    for _ in 0..cases {
        let mut shuffled_gens = gens.clone();
        for i in (1..shuffled_gens.len()).rev() {
            shuffled_gens.swap(i, rng.gen_range(0..=i));
        }
        let mut shuffled_lines = cls.g2.clone();
        for i in (1..shuffled_lines.len()).rev() {
            shuffled_lines.swap(i, rng.gen_range(0..=i));
        }
        let orbits = hemisys::group::line_orbits(&t, &shuffled_gens, &surface, &shuffled_lines).unwrap();
        assert_eq!(orbits, reference);
    }
}

pub fn complement_hemisystem_duality(cases: usize) {
    // S and its complement are both (q+1)/2-regular: checked at 10³ randomly
    // sampled surface points via the tangent pencil.
    let con = Construction::build(5, None).unwrap();
    let t = &con.tower;
    let a = assemble(&con, false).unwrap();
    let s_keys: std::collections::HashSet<u128> = a
        .s
        .iter()
        .map(|&i| con.surface.generators[i as usize].key(t))
        .collect();
    let mut points = Vec::new();
    con.surface.for_each_point(|p| points.push(p));
    let mut rng = rng();
    for _ in 0..cases {
        let p = points[rng.gen_range(0..points.len())];
        let pencil = hemisys::geom::tangent_generators(t, &p).unwrap();
        assert_eq!(pencil.len() as u64, t.p + 1);
        let in_s = pencil.iter().filter(|l| s_keys.contains(&l.key(t))).count() as u64;
        assert_eq!(in_s, (t.p + 1) / 2, "S takes half the pencil");
        assert_eq!(pencil.len() as u64 - in_s, (t.p + 1) / 2, "complement takes the other half");
    }
}

pub fn pless_moment_identities(cases: usize) {
    // Random [n,k] codes over random small prime fields, weights enumerated
    // over all messages; both moments must hold whenever no column is zero.
    let mut rng = rng();
    let primes = [3u64, 5, 7, 13];
    for _ in 0..cases {
        let q = primes[rng.gen_range(0..primes.len())];
        let k = rng.gen_range(1..=3u32);
        let n = rng.gen_range(2..=8u64);
        // columns: nonzero vectors of GF(q)^k
        let mut cols: Vec<Vec<u64>> = Vec::new();
        for _ in 0..n {
            loop {
                let c: Vec<u64> = (0..k).map(|_| rng.gen_range(0..q)).collect();
                if c.iter().any(|&x| x != 0) {
                    cols.push(c);
                    break;
                }
            }
        }
        let mut dist: BTreeMap<u64, u64> = BTreeMap::new();
        for mut msg in 0..q.pow(k) {
            let mut x = vec![0u64; k as usize];
            for c in x.iter_mut() {
                *c = msg % q;
                msg /= q;
            }
            let w = cols
                .iter()
                .filter(|col| {
                    col.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<u64>() % q != 0
                })
                .count() as u64;
            *dist.entry(w).or_insert(0) += 1;
        }
        hemisys::codes::pless_moments(q, n, k, &dist).unwrap();
    }
}
