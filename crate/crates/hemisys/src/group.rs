//! The invariance group 𝔊 ≤ PGU(4,q) of the curve pair X⁺/X⁻, its index-2
//! subgroup 𝔥 ≅ PSL(2,q) × C_{(q+1)/2}, the swap collineation 𝔴, and orbit
//! computations on generator sets.
//!
//! An element is a pair (A, μ): A ∈ GL(2,q) normalized projectively, μ ∈
//! GF(q²)* with μ^((q+1)/2) = det(A). The induced collineation of PG(3,q²)
//! scales X1 by μ and acts on (X0,X2,X3) by the symmetric square of A — the
//! unique linear action compatible with the parametrization (1,u,v,v²) of the
//! curve points. Its correctness is warranted by build-time checks, not
//! assumed: every constructed element must carry the Hermitian form to a
//! scalar multiple of itself, and the designated generators must preserve
//! Δ⁺, Δ⁻, Ω and G1 setwise.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::curve::CurveTables;
use crate::ff::{Fp, Fq2, Tower};
use crate::geom::{Line, Point4, SurfaceModel};
use crate::Error;

pub type Mat2 = [[Fp; 2]; 2];
pub type Mat4 = [[Fq2; 4]; 4];

#[derive(Clone, Debug)]
pub struct GroupElement {
    /// Normalized 2×2 matrix over GF(q): first nonzero entry (row-major) is 1.
    pub a: Mat2,
    /// X1-scaling factor; μ^((q+1)/2) = det(A).
    pub mu: Fq2,
    /// Cached 4×4 collineation matrix, rows indexed by output coordinate.
    pub m: Mat4,
    /// det(A) is a square in GF(q) ⇔ membership in 𝔥.
    pub in_h: bool,
}

pub fn det2x2(t: &Tower, a: &Mat2) -> Fp {
    t.subp(t.mulp(a[0][0], a[1][1]), t.mulp(a[0][1], a[1][0]))
}

/// Scales a GL(2,q) matrix so its first nonzero entry is 1; returns the
/// normalized matrix and the scalar c with input = c · normalized.
pub fn normalize2x2(t: &Tower, a: &Mat2) -> (Mat2, Fp) {
    let flat = [a[0][0], a[0][1], a[1][0], a[1][1]];
    let c = *flat.iter().find(|x| x.0 != 0).expect("zero matrix");
    let ci = t.invp(c).unwrap();
    let n = [
        [t.mulp(a[0][0], ci), t.mulp(a[0][1], ci)],
        [t.mulp(a[1][0], ci), t.mulp(a[1][1], ci)],
    ];
    (n, c)
}

impl GroupElement {
    pub fn new(t: &Tower, a: Mat2, mu: Fq2) -> Result<GroupElement, Error> {
        let d = det2x2(t, &a);
        if d.0 == 0 {
            return Err(Error::Domain("singular 2×2 matrix".into()));
        }
        // (A, μ) and (A/c, μ/c²) induce the same collineation; store the
        // normalized representative.
        let (an, c) = normalize2x2(t, &a);
        let dn = det2x2(t, &an);
        let mun = t.scale2(mu, t.invp(t.mulp(c, c)).unwrap());
        if t.pow2(mun, (t.p + 1) / 2) != t.embed(dn) {
            return Err(Error::Domain("μ^((q+1)/2) ≠ det(A): inadmissible pair".into()));
        }
        let m = collineation_matrix(t, &an, mun);
        let g = GroupElement { a: an, mu: mun, m, in_h: t.is_squarep(dn) };
        hermitian_scalar_check(t, &g)?;
        Ok(g)
    }

    pub fn det(&self, t: &Tower) -> Fp {
        det2x2(t, &self.a)
    }

    /// Canonical key: 16 bits per A entry, then idx2(μ).
    pub fn key(&self, t: &Tower) -> u128 {
        let mut k: u128 = 0;
        for r in 0..2 {
            for c in 0..2 {
                k = (k << 16) | self.a[r][c].0 as u128;
            }
        }
        (k << 32) | t.idx2(self.mu) as u128
    }

    pub fn is_identity(&self) -> bool {
        self.a == [[Fp(1), Fp(0)], [Fp(0), Fp(1)]] && self.mu == Fq2::ONE
    }
}

/// Builds the 4×4 matrix: X1 ↦ μ X1, (X0,X2,X3) by Sym²(A) for A=[[α,β],[γ,δ]]:
/// X0′ = δ²X0 + 2γδX2 + γ²X3, X2′ = βδX0 + (αδ+βγ)X2 + αγX3,
/// X3′ = β²X0 + 2αβX2 + α²X3.
pub fn collineation_matrix(t: &Tower, a: &Mat2, mu: Fq2) -> Mat4 {
    let (al, be, ga, de) = (a[0][0], a[0][1], a[1][0], a[1][1]);
    let e = |x: Fp| t.embed(x);
    let z = Fq2::ZERO;
    let two = Fp(2);
    [
        [e(t.mulp(de, de)), z, e(t.mulp(two, t.mulp(ga, de))), e(t.mulp(ga, ga))],
        [z, mu, z, z],
        [
            e(t.mulp(be, de)),
            z,
            e(t.addp(t.mulp(al, de), t.mulp(be, ga))),
            e(t.mulp(al, ga)),
        ],
        [e(t.mulp(be, be)), z, e(t.mulp(two, t.mulp(al, be))), e(t.mulp(al, al))],
    ]
}

/// The Hermitian Gram matrix of U₃ in the working frame.
fn gram(t: &Tower) -> Mat4 {
    let z = Fq2::ZERO;
    let m1 = t.int2(-1);
    [
        [z, z, z, m1],
        [z, Fq2::ONE, z, z],
        [z, z, t.int2(2), z],
        [m1, z, z, z],
    ]
}

/// Checks M† H M = det(A)² · H, i.e. the collineation preserves U₃.
pub fn hermitian_scalar_check(t: &Tower, g: &GroupElement) -> Result<(), Error> {
    let h = gram(t);
    let d = g.det(t);
    let scale = t.embed(t.mulp(d, d));
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Fq2::ZERO;
            for k in 0..4 {
                for l in 0..4 {
                    if h[k][l].is_zero() {
                        continue;
                    }
                    acc = t.add2(
                        acc,
                        t.mul2(t.mul2(t.frob2(g.m[k][i]), h[k][l]), g.m[l][j]),
                    );
                }
            }
            if acc != t.mul2(scale, h[i][j]) {
                return Err(Error::Construction(
                    "element does not carry the Hermitian form to det(A)² times itself".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Composition (A,μ)(B,ν) = ((AB)_norm, μν/c²) where AB = c·(AB)_norm.
pub fn compose(t: &Tower, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    let (a, b) = (&g1.a, &g2.a);
    let mut ab = [[Fp(0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            ab[r][c] = t.addp(t.mulp(a[r][0], b[0][c]), t.mulp(a[r][1], b[1][c]));
        }
    }
    let (an, c) = normalize2x2(t, &ab);
    let c2inv = t.invp(t.mulp(c, c)).unwrap();
    let mu = t.scale2(t.mul2(g1.mu, g2.mu), c2inv);
    let m = collineation_matrix(t, &an, mu);
    let d = det2x2(t, &an);
    GroupElement { a: an, mu, m, in_h: t.is_squarep(d) }
}

pub fn inverse(t: &Tower, g: &GroupElement) -> GroupElement {
    let a = &g.a;
    let adj = [[a[1][1], t.negp(a[0][1])], [t.negp(a[1][0]), a[0][0]]];
    let (an, c) = normalize2x2(t, &adj);
    let d = g.det(t);
    // (A,μ)(B_norm,ν) = identity forces ν = det(A)² / (c² μ).
    let num = t.embed(t.mulp(d, d));
    let den = t.scale2(g.mu, t.mulp(c, c));
    let mu = t.mul2(num, t.inv2(den).unwrap());
    let m = collineation_matrix(t, &an, mu);
    let dn = det2x2(t, &an);
    GroupElement { a: an, mu, m, in_h: t.is_squarep(dn) }
}

pub fn identity(t: &Tower) -> GroupElement {
    GroupElement::new(t, [[Fp(1), Fp(0)], [Fp(0), Fp(1)]], Fq2::ONE).unwrap()
}

/// Applies a 4×4 matrix to a point and renormalizes.
pub fn act_point(t: &Tower, m: &Mat4, p: &Point4) -> Point4 {
    let mut out = [Fq2::ZERO; 4];
    for i in 0..4 {
        let mut acc = Fq2::ZERO;
        for j in 0..4 {
            if !m[i][j].is_zero() && !p.0[j].is_zero() {
                acc = t.add2(acc, t.mul2(m[i][j], p.0[j]));
            }
        }
        out[i] = acc;
    }
    Point4::new(t, out).expect("collineation image of a point is a point")
}

pub fn act_line(t: &Tower, m: &Mat4, l: &Line) -> Line {
    let p1 = act_point(t, m, &l.r1);
    let p2 = act_point(t, m, &l.r2);
    Line::from_span(t, p1, p2).expect("collineation image of a line is a line")
}

/// The swap collineation 𝔴 = diag(1,−1,1,1): interchanges X⁺ and X⁻.
pub fn w_matrix(t: &Tower) -> Mat4 {
    let z = Fq2::ZERO;
    [
        [Fq2::ONE, z, z, z],
        [z, t.int2(-1), z, z],
        [z, z, Fq2::ONE, z],
        [z, z, z, Fq2::ONE],
    ]
}

/// A generating set of 𝔊: lifts of the Möbius translation, scaling and
/// inversion, plus a generator of the center Z(𝔊) ≅ C_{(q+1)/2}.
///
/// The admissible μ per matrix are a coset of the center, so these four
/// elements generate all of 𝔊; dropping the non-square-determinant scaling
/// leaves a generating set of 𝔥.
pub fn group_generators(t: &Tower) -> Result<Vec<GroupElement>, Error> {
    let mut gens = Vec::new();
    // translation v ↦ v+1 (det 1, μ = 1)
    gens.push(GroupElement::new(t, [[Fp(1), Fp(1)], [Fp(0), Fp(1)]], Fq2::ONE)?);
    // opposite translation (det 1) — with the center this generates the PSL part
    gens.push(GroupElement::new(t, [[Fp(1), Fp(0)], [Fp(1), Fp(1)]], Fq2::ONE)?);
    // scaling by the least primitive root r: det = r, a non-square; any
    // admissible μ works — take the canonical one found by scan.
    let r = primitive_root(t);
    let a = [[r, Fp(0)], [Fp(0), Fp(1)]];
    let mu = admissible_mus(t, r).into_iter().next().ok_or_else(|| {
        Error::Internal("no admissible μ for the scaling generator".into())
    })?;
    gens.push(GroupElement::new(t, a, mu)?);
    gens.push(center_generator(t)?);
    Ok(gens)
}

/// Generators of 𝔥 = {det ∈ □_q}: the two unipotent lifts plus the center.
pub fn h_generators(t: &Tower) -> Result<Vec<GroupElement>, Error> {
    let all = group_generators(t)?;
    Ok(all.into_iter().filter(|g| g.in_h).collect())
}

/// A = I, μ of multiplicative order (q+1)/2: fixes Ω pointwise, central in 𝔊.
pub fn center_generator(t: &Tower) -> Result<GroupElement, Error> {
    let ord = (t.p + 1) / 2;
    for mu in t.all2() {
        if mu.is_zero() {
            continue;
        }
        if t.pow2(mu, ord) == Fq2::ONE && order_divides_none_smaller(t, mu, ord) {
            return GroupElement::new(t, [[Fp(1), Fp(0)], [Fp(0), Fp(1)]], mu);
        }
    }
    Err(Error::Internal("no element of order (q+1)/2 in GF(q²)*".into()))
}

fn order_divides_none_smaller(t: &Tower, mu: Fq2, ord: u64) -> bool {
    (1..ord).all(|d| ord % d != 0 || d == ord || t.pow2(mu, d) != Fq2::ONE)
}

fn primitive_root(t: &Tower) -> Fp {
    'outer: for r in 2..t.p {
        let mut x = Fp(1);
        for _ in 0..t.p - 2 {
            x = t.mulp(x, Fp(r));
            if x.0 == 1 {
                continue 'outer;
            }
        }
        return Fp(r);
    }
    unreachable!("GF(p)* is cyclic");
}

/// All μ ∈ GF(q²)* with μ^((q+1)/2) = d; there are exactly (q+1)/2 of them.
fn admissible_mus(t: &Tower, d: Fp) -> Vec<Fq2> {
    let e = (t.p + 1) / 2;
    let target = t.embed(d);
    let mut out: Vec<Fq2> = t
        .all2()
        .filter(|mu| !mu.is_zero() && t.pow2(*mu, e) == target)
        .collect();
    out.sort_unstable_by_key(|m| t.idx2(*m));
    out
}

pub struct GroupTable {
    pub elements: Vec<GroupElement>,
    pub index: HashMap<u128, u32>,
    pub w: Mat4,
}

/// |𝔊| = (q³−q)(q+1)/2.
pub fn expected_group_order(t: &Tower) -> u64 {
    let q = t.p;
    (q * q * q - q) * (q + 1) / 2
}

pub const GROUP_LIMIT: u64 = 2_000_000;

impl GroupTable {
    /// Materializes every (projective A, admissible μ) pair exactly once.
    pub fn build(t: &Tower) -> Result<GroupTable, Error> {
        if expected_group_order(t) > GROUP_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "|𝔊| = {} exceeds the materialization limit",
                expected_group_order(t)
            )));
        }
        // μ lookup per determinant value
        let mut mus: HashMap<u64, Vec<Fq2>> = HashMap::new();
        for d in 1..t.p {
            mus.insert(d, admissible_mus(t, Fp(d)));
        }
        let mut elements = Vec::new();
        let mut index = HashMap::new();
        let p = t.p;
        // normalized representatives of PGL(2,q): first nonzero entry 1
        let mut push = |t: &Tower, a: Mat2| -> Result<(), Error> {
            let d = det2x2(t, &a);
            if d.0 == 0 {
                return Ok(());
            }
            for &mu in &mus[&d.0] {
                let g = GroupElement::new(t, a, mu)?;
                let k = g.key(t);
                if index.insert(k, elements.len() as u32).is_some() {
                    return Err(Error::Internal("duplicate group element".into()));
                }
                elements.push(g);
            }
            Ok(())
        };
        // a00 = 1
        for a01 in 0..p {
            for a10 in 0..p {
                for a11 in 0..p {
                    push(t, [[Fp(1), Fp(a01)], [Fp(a10), Fp(a11)]])?;
                }
            }
        }
        // a00 = 0, a01 = 1
        for a10 in 0..p {
            for a11 in 0..p {
                push(t, [[Fp(0), Fp(1)], [Fp(a10), Fp(a11)]])?;
            }
        }
        if elements.len() as u64 != expected_group_order(t) {
            return Err(Error::Internal(format!(
                "|𝔊| = {} but the order formula gives {}",
                elements.len(),
                expected_group_order(t)
            )));
        }
        let h_count = elements.iter().filter(|g| g.in_h).count();
        if h_count * 2 != elements.len() {
            return Err(Error::Internal("𝔥 does not have index 2".into()));
        }
        // warranty: the designated generators are listed, and a few products close
        let table = GroupTable { elements, index, w: w_matrix(t) };
        for g in group_generators(t)? {
            if !table.index.contains_key(&g.key(t)) {
                return Err(Error::Internal("generator missing from the element list".into()));
            }
        }
        Ok(table)
    }

    pub fn contains(&self, t: &Tower, g: &GroupElement) -> bool {
        self.index.contains_key(&g.key(t))
    }
}

/// Orbits of ⟨gens⟩ on a set of generator-lines (global surface ids).
///
/// Deterministic: seeds are taken in increasing id order and each orbit is
/// returned sorted. Errs if the set is not stable under the generators.
pub fn line_orbits(
    t: &Tower,
    gens: &[GroupElement],
    surface: &SurfaceModel,
    lines: &[u32],
) -> Result<Vec<Vec<u32>>, Error> {
    let in_set: HashSet<u32> = lines.iter().copied().collect();
    let mut seeds: Vec<u32> = lines.to_vec();
    seeds.sort_unstable();
    let mut visited: HashSet<u32> = HashSet::with_capacity(lines.len());
    let mut orbits = Vec::new();
    for &seed in &seeds {
        if visited.contains(&seed) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut queue = VecDeque::new();
        visited.insert(seed);
        queue.push_back(seed);
        while let Some(li) = queue.pop_front() {
            orbit.push(li);
            let line = surface.generators[li as usize];
            for g in gens {
                let img = act_line(t, &g.m, &line);
                let id = surface
                    .generator_id(&img)
                    .ok_or_else(|| Error::Internal("orbit left the generator set".into()))?;
                if !in_set.contains(&id) {
                    return Err(Error::TheoremViolation(
                        "line set is not stable under the group generators".into(),
                    ));
                }
                if visited.insert(id) {
                    queue.push_back(id);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok(orbits)
}

pub struct OrbitDecomposition {
    /// 𝔥-orbits on G1, each half of G1.
    pub m1: Vec<u32>,
    pub m1p: Vec<u32>,
    /// 𝔥-orbits on G2, each half of G2.
    pub m2: Vec<u32>,
    pub m2p: Vec<u32>,
}

/// Decomposes G1 and G2 into the two 𝔥-orbits each, verifying that 𝔊 fuses
/// each pair into a single orbit.
pub fn orbit_decomposition(
    t: &Tower,
    surface: &SurfaceModel,
    g1: &[u32],
    g2: &[u32],
) -> Result<OrbitDecomposition, Error> {
    let g_gens = group_generators(t)?;
    let h_gens = h_generators(t)?;
    let split = |lines: &[u32], name: &str| -> Result<(Vec<u32>, Vec<u32>), Error> {
        let full = line_orbits(t, &g_gens, surface, lines)?;
        if full.len() != 1 {
            return Err(Error::TheoremViolation(format!(
                "𝔊 is not transitive on {name}: {} orbits",
                full.len()
            )));
        }
        let halves = line_orbits(t, &h_gens, surface, lines)?;
        if halves.len() != 2 || halves[0].len() != halves[1].len() {
            return Err(Error::TheoremViolation(format!(
                "𝔥 does not split {name} into two equal orbits (got {:?})",
                halves.iter().map(|o| o.len()).collect::<Vec<_>>()
            )));
        }
        let mut it = halves.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    };
    let (m1, m1p) = split(g1, "G1")?;
    let (m2, m2p) = split(g2, "G2")?;
    Ok(OrbitDecomposition { m1, m1p, m2, m2p })
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum InvolutionType {
    SkewPerspectivity,
    Homology,
}

/// Classifies an involution by its fixed-point structure: eigenspace
/// dimensions {3,1} mean a homology (hyperplane plus a point), {2,2} a skew
/// perspectivity (two skew lines fixed pointwise).
pub fn involution_type(t: &Tower, m: &Mat4) -> Result<InvolutionType, Error> {
    // M² = λI for a projective involution
    let mut m2 = [[Fq2::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Fq2::ZERO;
            for k in 0..4 {
                acc = t.add2(acc, t.mul2(m[i][k], m[k][j]));
            }
            m2[i][j] = acc;
        }
    }
    let lambda = m2[0][0];
    for i in 0..4 {
        for j in 0..4 {
            let expect = if i == j { lambda } else { Fq2::ZERO };
            if m2[i][j] != expect {
                return Err(Error::Domain("matrix is not a projective involution".into()));
            }
        }
    }
    let e = t
        .sqrt2(lambda)
        .ok_or_else(|| Error::Internal("involution scalar is a non-square: no fixed points".into()))?;
    let dim_plus = 4 - rank4(t, m, e);
    let dim_minus = 4 - rank4(t, m, t.neg2(e));
    match (dim_plus.min(dim_minus), dim_plus.max(dim_minus)) {
        (1, 3) => Ok(InvolutionType::Homology),
        (2, 2) => Ok(InvolutionType::SkewPerspectivity),
        other => Err(Error::Internal(format!(
            "unexpected eigenspace dimensions {other:?} for an involution"
        ))),
    }
}

/// rank(M − eI) over GF(q²) by Gaussian elimination.
fn rank4(t: &Tower, m: &Mat4, e: Fq2) -> usize {
    let mut a = *m;
    for i in 0..4 {
        a[i][i] = t.sub2(a[i][i], e);
    }
    let mut rank = 0;
    for col in 0..4 {
        let pivot = (rank..4).find(|&r| !a[r][col].is_zero());
        let Some(pr) = pivot else { continue };
        a.swap(rank, pr);
        let inv = t.inv2(a[rank][col]).unwrap();
        for c in 0..4 {
            a[rank][c] = t.mul2(a[rank][c], inv);
        }
        for r in 0..4 {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..4 {
                    a[r][c] = t.sub2(a[r][c], t.mul2(f, a[rank][c]));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Checks that every involution in 𝔥 is a skew perspectivity and every
/// involution in 𝔊∖𝔥 is a homology.
pub fn order2_classification(t: &Tower, table: &GroupTable) -> Result<(usize, usize), Error> {
    let mut skew = 0;
    let mut homology = 0;
    for g in &table.elements {
        if g.is_identity() {
            continue;
        }
        if !compose(t, g, g).is_identity() {
            continue;
        }
        let ty = involution_type(t, &g.m)?;
        match (g.in_h, ty) {
            (true, InvolutionType::SkewPerspectivity) => skew += 1,
            (false, InvolutionType::Homology) => homology += 1,
            _ => {
                return Err(Error::TheoremViolation(
                    "involution type does not match 𝔥-membership".into(),
                ))
            }
        }
    }
    Ok((skew, homology))
}

/// Structural verification of 𝔥 ≅ PSL(2,q) × C_{(q+1)/2}: the section
/// S = {(A, det A) : det A ∈ □_q} is a subgroup isomorphic to the PSL part,
/// the center C = {(I, μ)} commutes with it, S ∩ C = 1, and every element of
/// 𝔥 factors uniquely as s·z.
pub fn verify_h_structure(t: &Tower, table: &GroupTable) -> Result<(), Error> {
    let q = t.p;
    let mut s_keys = HashSet::new();
    let mut c_keys = HashSet::new();
    for g in table.elements.iter().filter(|g| g.in_h) {
        let d = g.det(t);
        // unique factorization h = s·z
        let s = GroupElement::new(t, g.a, t.embed(d))?;
        let z = compose(t, &inverse(t, &s), g);
        if z.a != [[Fp(1), Fp(0)], [Fp(0), Fp(1)]] {
            return Err(Error::Internal("center part of the factorization is not central".into()));
        }
        if compose(t, &s, &z).key(t) != g.key(t) {
            return Err(Error::Internal("s·z does not recover the element".into()));
        }
        s_keys.insert(s.key(t));
        c_keys.insert(z.key(t));
    }
    if s_keys.len() as u64 != (q * q * q - q) / 2 {
        return Err(Error::TheoremViolation("PSL section has the wrong order".into()));
    }
    if c_keys.len() as u64 != (q + 1) / 2 {
        return Err(Error::TheoremViolation("center has the wrong order".into()));
    }
    let mut inter = s_keys.intersection(&c_keys);
    let only = inter.next();
    if only != Some(&identity(t).key(t)) || inter.next().is_some() {
        return Err(Error::TheoremViolation("section and center do not intersect trivially".into()));
    }
    // closure of the section under composition
    let sample: Vec<&GroupElement> = table
        .elements
        .iter()
        .filter(|g| s_keys.contains(&g.key(t)))
        .collect();
    for a in &sample {
        for b in &sample {
            if !s_keys.contains(&compose(t, a, b).key(t)) {
                return Err(Error::TheoremViolation("PSL section is not closed".into()));
            }
        }
    }
    Ok(())
}

/// Checks one collineation preserves the curve point-sets and G1 setwise.
pub fn preserves_curve_structure(
    t: &Tower,
    m: &Mat4,
    surface: &SurfaceModel,
    plus: &CurveTables,
    minus: &CurveTables,
    g1: &[u32],
) -> bool {
    let stable = |keys: &HashSet<u64>, pts: &[Point4]| {
        pts.iter().all(|p| keys.contains(&act_point(t, m, p).key(t)))
    };
    if !stable(&plus.delta_keys, &plus.delta)
        || !stable(&minus.delta_keys, &minus.delta)
        || !stable(&plus.omega_keys, &plus.omega)
    {
        return false;
    }
    let g1_keys: HashSet<u128> = g1
        .iter()
        .map(|&i| surface.generators[i as usize].key(t))
        .collect();
    g1.iter().all(|&i| {
        g1_keys.contains(&act_line(t, m, &surface.generators[i as usize]).key(t))
    })
}

/// Build-time warranty for the lift formula: the designated generators of 𝔊
/// preserve Δ⁺, Δ⁻, Ω and G1; preservation by generators extends to the group.
pub fn verify_generator_preservation(
    t: &Tower,
    surface: &SurfaceModel,
    plus: &CurveTables,
    minus: &CurveTables,
    g1: &[u32],
) -> Result<(), Error> {
    for g in group_generators(t)? {
        if !preserves_curve_structure(t, &g.m, surface, plus, minus, g1) {
            return Err(Error::Construction(
                "a group generator fails to preserve Δ±/Ω/G1".into(),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{classify_generators, CurveTables, Sign};

    fn setup5() -> (Tower, SurfaceModel, CurveTables, CurveTables) {
        let t = Tower::new(5).unwrap();
        let surface = SurfaceModel::build(&t).unwrap();
        let plus = CurveTables::build(&t, Sign::Plus, true).unwrap();
        let minus = CurveTables::build(&t, Sign::Minus, false).unwrap();
        (t, surface, plus, minus)
    }

    #[test]
    fn group_order_and_index_p5() {
        let t = Tower::new(5).unwrap();
        let table = GroupTable::build(&t).unwrap();
        assert_eq!(table.elements.len(), 360);
        assert_eq!(table.elements.iter().filter(|g| g.in_h).count(), 180);
    }

    #[test]
    fn cayley_closure_p5() {
        let t = Tower::new(5).unwrap();
        let table = GroupTable::build(&t).unwrap();
        for a in &table.elements {
            for b in &table.elements {
                let c = compose(&t, a, b);
                assert!(table.contains(&t, &c));
            }
        }
    }

    #[test]
    fn inverse_and_identity() {
        let t = Tower::new(5).unwrap();
        let table = GroupTable::build(&t).unwrap();
        for g in &table.elements {
            let gi = inverse(&t, g);
            assert!(compose(&t, g, &gi).is_identity());
            assert!(compose(&t, &gi, g).is_identity());
        }
    }

    #[test]
    fn every_element_preserves_structure_p5() {
        let (t, surface, plus, minus) = setup5();
        let cls = classify_generators(&surface, &plus, &minus).unwrap();
        let table = GroupTable::build(&t).unwrap();
        for g in &table.elements {
            assert!(preserves_curve_structure(&t, &g.m, &surface, &plus, &minus, &cls.g1));
        }
    }

    #[test]
    fn w_swaps_deltas_and_is_outside() {
        let (t, _s, plus, minus) = setup5();
        let w = w_matrix(&t);
        for p in &plus.delta {
            assert!(minus.delta_keys.contains(&act_point(&t, &w, p).key(&t)));
        }
        for p in &plus.omega {
            assert!(plus.omega_keys.contains(&act_point(&t, &w, p).key(&t)));
        }
        // w = (I, −1) is not an admissible pair
        assert!(GroupElement::new(&t, [[Fp(1), Fp(0)], [Fp(0), Fp(1)]], t.int2(-1)).is_err());
        let table = GroupTable::build(&t).unwrap();
        let probe = GroupElement {
            a: [[Fp(1), Fp(0)], [Fp(0), Fp(1)]],
            mu: t.int2(-1),
            m: w,
            in_h: false,
        };
        assert!(!table.contains(&t, &probe));
    }

    #[test]
    fn orbits_p5() {
        let (t, surface, plus, minus) = setup5();
        let cls = classify_generators(&surface, &plus, &minus).unwrap();
        let dec = orbit_decomposition(&t, &surface, &cls.g1, &cls.g2).unwrap();
        assert_eq!(dec.m1.len(), 180);
        assert_eq!(dec.m1p.len(), 180);
        assert_eq!(dec.m2.len(), 18);
        assert_eq!(dec.m2p.len(), 18);
    }

    #[test]
    fn orbits_via_full_group_agree_with_generators_p5() {
        let (t, surface, plus, minus) = setup5();
        let cls = classify_generators(&surface, &plus, &minus).unwrap();
        let table = GroupTable::build(&t).unwrap();
        let h_all: Vec<GroupElement> =
            table.elements.iter().filter(|g| g.in_h).cloned().collect();
        let via_full = line_orbits(&t, &h_all, &surface, &cls.g1).unwrap();
        let via_gens = line_orbits(&t, &h_generators(&t).unwrap(), &surface, &cls.g1).unwrap();
        assert_eq!(via_full, via_gens);
    }

    #[test]
    fn sharp_transitivity_on_g1_p5() {
        let (t, surface, plus, minus) = setup5();
        let cls = classify_generators(&surface, &plus, &minus).unwrap();
        let table = GroupTable::build(&t).unwrap();
        assert_eq!(table.elements.len(), cls.g1.len());
        let g0 = surface.generators[cls.g1[0] as usize];
        let stab = table
            .elements
            .iter()
            .filter(|g| act_line(&t, &g.m, &g0).key(&t) == g0.key(&t))
            .count();
        assert_eq!(stab, 1, "stabilizer of a G1 line is trivial");
    }

    #[test]
    fn involutions_p5() {
        let t = Tower::new(5).unwrap();
        let table = GroupTable::build(&t).unwrap();
        let (skew, homology) = order2_classification(&t, &table).unwrap();
        assert!(skew > 0 && homology > 0);
        // w is a homology: fixes the hyperplane X1 = 0 pointwise plus a point
        assert_eq!(
            involution_type(&t, &w_matrix(&t)).unwrap(),
            InvolutionType::Homology
        );
    }

    #[test]
    fn h_structure_p5() {
        let t = Tower::new(5).unwrap();
        let table = GroupTable::build(&t).unwrap();
        verify_h_structure(&t, &table).unwrap();
    }

    #[test]
    fn center_fixes_omega_pointwise() {
        let (t, _s, plus, _m) = setup5();
        let z = center_generator(&t).unwrap();
        for p in &plus.omega {
            assert_eq!(act_point(&t, &z.m, p).key(&t), p.key(&t));
        }
        // central: commutes with every generator
        for g in group_generators(&t).unwrap() {
            assert_eq!(
                compose(&t, &z, &g).key(&t),
                compose(&t, &g, &z).key(&t)
            );
        }
    }

    #[test]
    fn generator_preservation_warranty() {
        let (t, surface, plus, minus) = setup5();
        let cls = classify_generators(&surface, &plus, &minus).unwrap();
        verify_generator_preservation(&t, &surface, &plus, &minus, &cls.g1).unwrap();
    }
}
