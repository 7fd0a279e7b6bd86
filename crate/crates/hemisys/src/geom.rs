//! Projective geometry substrate: points and lines of PG(3,q²), the Hermitian
//! surface U₃ in its alternate frame, its generators, tangent planes, Plücker
//! coordinates, and hyperplane enumeration for PG(5,q).
//!
//! The surface is always the alternate-frame form
//!   X1^(q+1) + 2 X2^(q+1) − X3^q X0 − X3 X0^q = 0,
//! which is the frame all tangent-case coordinate formulas live in; the
//! diagonal form is never materialized.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::ff::{Fp, Fq2, Tower};
use crate::Error;

/// Normalized homogeneous point of PG(3,q²): first nonzero coordinate is 1.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point4(pub [Fq2; 4]);

impl Point4 {
    /// Normalizes a coordinate vector; errors on the zero vector.
    pub fn new(t: &Tower, coords: [Fq2; 4]) -> Result<Point4, Error> {
        let lead = coords
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::Domain("zero vector is not a projective point".into()))?;
        let inv = t.inv2(coords[lead]).expect("nonzero leading coordinate");
        let mut out = [Fq2::ZERO; 4];
        for (o, c) in out.iter_mut().zip(coords.iter()) {
            *o = t.mul2(inv, *c);
        }
        Ok(Point4(out))
    }

    /// Affine shorthand (a,b,c) means the point (1,a,b,c).
    pub fn affine(a: Fq2, b: Fq2, c: Fq2) -> Point4 {
        Point4([Fq2::ONE, a, b, c])
    }

    /// Packed 64-bit key: 16 bits per coordinate index (requires p ≤ 255).
    #[inline(always)]
    pub fn key(&self, t: &Tower) -> u64 {
        let mut k = 0u64;
        for (i, c) in self.0.iter().enumerate() {
            k |= t.idx2(*c) << (16 * i);
        }
        k
    }

    /// Dense rank among all points of PG(3,q²), grouped by leading position.
    #[inline(always)]
    pub fn rank(&self, t: &Tower) -> u64 {
        let q2 = t.p * t.p;
        let c = &self.0;
        if !c[0].is_zero() {
            debug_assert_eq!(c[0], Fq2::ONE, "point must be normalized");
            t.idx2(c[1]) + t.idx2(c[2]) * q2 + t.idx2(c[3]) * q2 * q2
        } else if !c[1].is_zero() {
            q2 * q2 * q2 + t.idx2(c[2]) + t.idx2(c[3]) * q2
        } else if !c[2].is_zero() {
            q2 * q2 * q2 + q2 * q2 + t.idx2(c[3])
        } else {
            q2 * q2 * q2 + q2 * q2 + q2
        }
    }
}

/// Number of points of PG(3,q²).
pub fn pg3_size(t: &Tower) -> u64 {
    let q2 = t.p * t.p;
    q2 * q2 * q2 + q2 * q2 + q2 + 1
}

/// Line of PG(3,q²) in canonical form: the two rows of the reduced row
/// echelon basis of its span. `r2` (later pivot) and `r1` are exactly the two
/// lexicographically least normalized points of the line, so the pair is a
/// canonical key independent of the spanning pair it was built from.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Line {
    pub r1: Point4,
    pub r2: Point4,
}

impl Line {
    pub fn from_span(t: &Tower, a: Point4, b: Point4) -> Result<Line, Error> {
        let mut u = a.0;
        let mut v = b.0;
        let pu = u.iter().position(|c| !c.is_zero());
        let pv = v.iter().position(|c| !c.is_zero());
        let (pu, pv) = match (pu, pv) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::Domain("degenerate span: zero vector".into())),
        };
        if pv < pu {
            std::mem::swap(&mut u, &mut v);
        }
        let c1 = pu.min(pv);
        let inv = t.inv2(u[c1]).unwrap();
        for c in u.iter_mut() {
            *c = t.mul2(inv, *c);
        }
        // eliminate from v
        let f = v[c1];
        for i in 0..4 {
            v[i] = t.sub2(v[i], t.mul2(f, u[i]));
        }
        let c2 = match v.iter().position(|c| !c.is_zero()) {
            Some(c2) => c2,
            None => return Err(Error::Domain("degenerate span: proportional points".into())),
        };
        let inv = t.inv2(v[c2]).unwrap();
        for c in v.iter_mut() {
            *c = t.mul2(inv, *c);
        }
        // back-substitute
        let f = u[c2];
        for i in 0..4 {
            u[i] = t.sub2(u[i], t.mul2(f, v[i]));
        }
        Ok(Line { r1: Point4(u), r2: Point4(v) })
    }

    #[inline(always)]
    pub fn key(&self, t: &Tower) -> u128 {
        ((self.r1.key(t) as u128) << 64) | self.r2.key(t) as u128
    }

    /// Visits the q²+1 points of the line; every point arrives normalized.
    pub fn for_each_point(&self, t: &Tower, mut f: impl FnMut(Point4)) {
        f(self.r2);
        for lam in t.all2() {
            let mut c = [Fq2::ZERO; 4];
            for i in 0..4 {
                c[i] = t.add2(self.r1.0[i], t.mul2(lam, self.r2.0[i]));
            }
            // r1 has a leading 1 that λ·r2 cannot disturb
            f(Point4(c));
        }
    }

    pub fn points(&self, t: &Tower) -> Vec<Point4> {
        let mut out = Vec::with_capacity((t.p * t.p + 1) as usize);
        self.for_each_point(t, |p| out.push(p));
        out
    }

    pub fn contains(&self, t: &Tower, p: &Point4) -> bool {
        // p is on the line iff it is dependent on r1, r2; with canonical rows
        // this reduces to "p equals r2 or p − r1 is proportional to r2".
        let mut found = false;
        self.for_each_point(t, |x| {
            if x == *p {
                found = true;
            }
        });
        found
    }
}

/// Plücker image of a line: normalized 6-tuple (p01,p02,p03,p12,p13,p23).
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point6(pub [Fq2; 6]);

pub fn pluecker(t: &Tower, l: &Line) -> Point6 {
    let x = &l.r1.0;
    let y = &l.r2.0;
    let m = |i: usize, j: usize| t.sub2(t.mul2(x[i], y[j]), t.mul2(x[j], y[i]));
    let raw = [m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3)];
    let lead = raw.iter().position(|c| !c.is_zero()).expect("line rows independent");
    let inv = t.inv2(raw[lead]).unwrap();
    let mut out = [Fq2::ZERO; 6];
    for (o, c) in out.iter_mut().zip(raw.iter()) {
        *o = t.mul2(inv, *c);
    }
    Point6(out)
}

/// Value of the Plücker quadratic relation p01·p23 − p02·p13 + p03·p12.
pub fn pluecker_relation(t: &Tower, p: &Point6) -> Fq2 {
    let c = &p.0;
    t.add2(
        t.sub2(t.mul2(c[0], c[5]), t.mul2(c[1], c[4])),
        t.mul2(c[2], c[3]),
    )
}

/// Hermitian form value at P; zero iff P lies on U₃. The value always lands
/// in GF(q).
#[inline(always)]
pub fn hermitian_eval(t: &Tower, p: &Point4) -> Fp {
    let c = &p.0;
    let n1 = t.norm2(c[1]);
    let n2 = t.norm2(c[2]);
    // X3^q X0 + X3 X0^q = trace of X3^q X0
    let cross = t.trace2(t.mul2(t.frob2(c[3]), c[0]));
    t.subp(t.addp(n1, t.addp(n2, n2)), cross)
}

/// Tangent plane of U₃ at a surface point, as a covector w with w·X = 0.
pub fn tangent_covector(t: &Tower, p: &Point4) -> [Fq2; 4] {
    let c = &p.0;
    [
        t.neg2(t.frob2(c[3])),
        t.frob2(c[1]),
        t.add2(t.frob2(c[2]), t.frob2(c[2])),
        t.neg2(t.frob2(c[0])),
    ]
}

/// Two plane points A, B such that {P, A, B} spans the tangent plane at P.
fn tangent_plane_complement(t: &Tower, p: &Point4, w: &[Fq2; 4]) -> (Point4, Point4) {
    let pivot = w.iter().position(|c| !c.is_zero()).expect("covector nonzero");
    let winv = t.inv2(w[pivot]).unwrap();
    // basis vectors b_k = e_k − (w_k / w_pivot) e_pivot for k ≠ pivot;
    // P has coefficient P_k on b_k, so drop one index where P_k ≠ 0.
    let mut drop = None;
    for k in 0..4 {
        if k != pivot && !p.0[k].is_zero() {
            drop = Some(k);
                break;
        }
    }
    let drop = drop.expect("surface point not proportional to a pivot axis");
    let mut out = Vec::with_capacity(2);
    for k in 0..4 {
        if k == pivot || k == drop {
            continue;
        }
        let mut c = [Fq2::ZERO; 4];
        c[k] = Fq2::ONE;
        c[pivot] = t.neg2(t.mul2(w[k], winv));
        out.push(Point4::new(t, c).unwrap());
    }
    (out[0], out[1])
}

/// The q+1 generators of U₃ through a surface point P.
///
/// A line through P inside the tangent plane is a generator exactly when its
/// second spanning point lies on the surface, since the tangent-plane section
/// of U₃ is the union of the generators through P.
pub fn tangent_generators(t: &Tower, p: &Point4) -> Result<Vec<Line>, Error> {
    if hermitian_eval(t, p).0 != 0 {
        return Err(Error::Domain("tangent_generators: point not on the surface".into()));
    }
    let w = tangent_covector(t, p);
    let (a, b) = tangent_plane_complement(t, p, &w);
    let mut out = Vec::with_capacity((t.p + 1) as usize);
    let mut consider = |d: Point4| {
        if hermitian_eval(t, &d).0 == 0 {
            out.push(Line::from_span(t, *p, d).unwrap());
        }
    };
    consider(b);
    for lam in t.all2() {
        let mut c = [Fq2::ZERO; 4];
        for i in 0..4 {
            c[i] = t.add2(a.0[i], t.mul2(lam, b.0[i]));
        }
        consider(Point4::new(t, c).unwrap());
    }
    if out.len() as u64 != t.p + 1 {
        return Err(Error::Internal(format!(
            "expected {} generators through point, found {}",
            t.p + 1,
            out.len()
        )));
    }
    Ok(out)
}

/// Indexed model of the Hermitian surface.
///
/// The generator list is always materialized; the point list and both
/// incidence maps only below [`SurfaceModel::FULL_POINT_LIMIT`] points. Above
/// it (the p=37 scale) point-level work streams through
/// [`SurfaceModel::for_each_point`] and the rank addressing of [`Point4::rank`].
pub struct SurfaceModel {
    pub tower: Tower,
    pub generators: Vec<Line>,
    pub gen_index: HashMap<u128, u32>,
    pub num_points: u64,
    pub points: Option<Vec<Point4>>,
    pub point_index: Option<HashMap<u64, u32>>,
    pub point_gens: Option<Vec<Vec<u32>>>,
    pub gen_points: Option<Vec<Vec<u32>>>,
}

impl SurfaceModel {
    pub const FULL_POINT_LIMIT: u64 = 2_000_000;
    const GENERATOR_LIMIT: u64 = 4_000_000;

    pub fn expected_points(t: &Tower) -> u64 {
        let q = t.p;
        (q * q + 1) * (q * q * q + 1)
    }

    pub fn expected_generators(t: &Tower) -> u64 {
        let q = t.p;
        (q * q * q + 1) * (q + 1)
    }

    pub fn build(t: &Tower) -> Result<SurfaceModel, Error> {
        Self::build_with_cache(t, None)
    }

    pub fn build_with_cache(t: &Tower, cache_dir: Option<&Path>) -> Result<SurfaceModel, Error> {
        if Self::expected_generators(t) > Self::GENERATOR_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "surface at p = {} exceeds the generator budget",
                t.p
            )));
        }
        let generators = match cache_dir {
            Some(dir) => match load_generators(t, dir) {
                Some(g) => g,
                None => {
                    let g = Self::enumerate_generators(t)?;
                    let _ = save_generators(t, dir, &g);
                    g
                }
            },
            None => Self::enumerate_generators(t)?,
        };

        let mut gen_index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            gen_index.insert(g.key(t), i as u32);
        }

        let num_points = Self::count_points(t);
        if num_points != Self::expected_points(t) {
            return Err(Error::Internal(format!(
                "surface point count {} != expected {}",
                num_points,
                Self::expected_points(t)
            )));
        }

        let mut model = SurfaceModel {
            tower: t.clone(),
            generators,
            gen_index,
            num_points,
            points: None,
            point_index: None,
            point_gens: None,
            gen_points: None,
        };
        if num_points <= Self::FULL_POINT_LIMIT {
            model.materialize_incidence()?;
        }
        Ok(model)
    }

    /// Every generator meets the plane X0 = 0, whose surface section is small:
    /// scanning tangent pencils of section points finds each generator at
    /// least once.
    fn enumerate_generators(t: &Tower) -> Result<Vec<Line>, Error> {
        let mut seen: HashMap<u128, Line> = HashMap::new();
        for seed in Self::plane_section_points(t) {
            for g in tangent_generators(t, &seed)? {
                seen.entry(g.key(t)).or_insert(g);
            }
        }
        let mut keys: Vec<u128> = seen.keys().copied().collect();
        keys.sort_unstable();
        let generators: Vec<Line> = keys.iter().map(|k| seen[k]).collect();
        if generators.len() as u64 != Self::expected_generators(t) {
            return Err(Error::Internal(format!(
                "generator count {} != expected {}",
                generators.len(),
                Self::expected_generators(t)
            )));
        }
        Ok(generators)
    }

    /// Surface points in the plane X0 = 0: the cone x1^(q+1) + 2 x2^(q+1) = 0.
    fn plane_section_points(t: &Tower) -> Vec<Point4> {
        let mut out = Vec::new();
        // (0,0,0,1)
        out.push(Point4([Fq2::ZERO, Fq2::ZERO, Fq2::ZERO, Fq2::ONE]));
        // (0,1,x2,x3) with 1 + 2 x2^(q+1) = 0
        for x2 in t.all2() {
            let v = t.addp(Fp(1), t.addp(t.norm2(x2), t.norm2(x2)));
            if v.0 != 0 {
                continue;
            }
            for x3 in t.all2() {
                out.push(Point4([Fq2::ZERO, Fq2::ONE, x2, x3]));
            }
        }
        out
    }

    fn count_points(t: &Tower) -> u64 {
        // Affine points (1,a,b,c): c^q + c = N(a) + 2N(b) has exactly q
        // solutions c for every (a,b), giving q⁵ points.
        let q = t.p;
        let affine = q * q * q * q * q;
        affine + Self::plane_section_points(t).len() as u64
    }

    /// Visits every surface point exactly once, in a deterministic order.
    pub fn for_each_point(&self, mut f: impl FnMut(Point4)) {
        let t = &self.tower;
        let half = t.invp(Fp(2)).unwrap();
        for a in t.all2() {
            for b in t.all2() {
                let w = t.addp(t.norm2(a), t.addp(t.norm2(b), t.norm2(b)));
                let re = t.mulp(w, half);
                for d in 0..t.p {
                    f(Point4([Fq2::ONE, a, b, Fq2 { a0: re.0, a1: d }]));
                }
            }
        }
        for p in Self::plane_section_points(t) {
            f(p);
        }
    }

    fn materialize_incidence(&mut self) -> Result<(), Error> {
        let t = self.tower.clone();
        let mut points = Vec::with_capacity(self.num_points as usize);
        self.for_each_point(|p| points.push(p));
        let mut point_index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            debug_assert_eq!(hermitian_eval(&t, p).0, 0);
            point_index.insert(p.key(&t), i as u32);
        }
        let mut gen_points = Vec::with_capacity(self.generators.len());
        let mut point_gens = vec![Vec::with_capacity((t.p + 1) as usize); points.len()];
        for (gi, g) in self.generators.iter().enumerate() {
            let mut ids = Vec::with_capacity((t.p * t.p + 1) as usize);
            let mut missing = false;
            g.for_each_point(&t, |p| match point_index.get(&p.key(&t)) {
                Some(&pi) => ids.push(pi),
                None => missing = true,
            });
            if missing {
                return Err(Error::Internal("generator carries a non-surface point".into()));
            }
            ids.sort_unstable();
            for &pi in &ids {
                point_gens[pi as usize].push(gi as u32);
            }
            gen_points.push(ids);
        }
        for pg in &point_gens {
            if pg.len() as u64 != t.p + 1 {
                return Err(Error::Internal(format!(
                    "point lies on {} generators, expected {}",
                    pg.len(),
                    t.p + 1
                )));
            }
        }
        self.points = Some(points);
        self.point_index = Some(point_index);
        self.point_gens = Some(point_gens);
        self.gen_points = Some(gen_points);
        Ok(())
    }

    pub fn has_full_incidence(&self) -> bool {
        self.points.is_some()
    }

    pub fn generator_id(&self, l: &Line) -> Option<u32> {
        self.gen_index.get(&l.key(&self.tower)).copied()
    }

    pub fn point_id(&self, p: &Point4) -> Option<u32> {
        self.point_index.as_ref()?.get(&p.key(&self.tower)).copied()
    }
}

/// Normalized hyperplane covectors of PG(5,q), visited exactly once.
pub fn hyperplanes(t: &Tower, mut f: impl FnMut(&[Fp; 6])) {
    pg5_points(t, |c| f(c));
}

/// Normalized points (or covectors, same normal form) of PG(5,q).
pub fn pg5_points(t: &Tower, mut f: impl FnMut(&[Fp; 6])) {
    let q = t.p;
    let mut c = [Fp(0); 6];
    for lead in 0..6 {
        for x in c.iter_mut().take(lead) {
            *x = Fp(0);
        }
        c[lead] = Fp(1);
        let free = 5 - lead;
        let total = q.pow(free as u32);
        for mut rest in 0..total {
            for j in (lead + 1)..6 {
                c[j] = Fp(rest % q);
                rest /= q;
            }
            f(&c);
        }
    }
}

pub fn pg5_size(t: &Tower) -> u64 {
    let q = t.p;
    (q.pow(6) - 1) / (q - 1)
}

// ---- binary generator cache ----

const CACHE_MAGIC: &[u8; 4] = b"HSG1";

fn cache_path(t: &Tower, dir: &Path) -> std::path::PathBuf {
    dir.join(format!("generators_p{}_v{}.bin", t.p, crate::FORMAT_VERSION))
}

pub fn save_generators(t: &Tower, dir: &Path, gens: &[Line]) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let mut buf = Vec::with_capacity(16 + gens.len() * 16);
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&crate::FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&t.p.to_le_bytes());
    buf.extend_from_slice(&(gens.len() as u64).to_le_bytes());
    for g in gens {
        for pt in [&g.r1, &g.r2] {
            for c in &pt.0 {
                buf.extend_from_slice(&(t.idx2(*c) as u16).to_le_bytes());
            }
        }
    }
    let mut fh = std::fs::File::create(cache_path(t, dir))?;
    fh.write_all(&buf)?;
    Ok(())
}

pub fn load_generators(t: &Tower, dir: &Path) -> Option<Vec<Line>> {
    let mut buf = Vec::new();
    std::fs::File::open(cache_path(t, dir)).ok()?.read_to_end(&mut buf).ok()?;
    if buf.len() < 24 || &buf[0..4] != CACHE_MAGIC {
        return None;
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    let p = u64::from_le_bytes(buf[8..16].try_into().unwrap());
    if version != crate::FORMAT_VERSION || p != t.p {
        return None;
    }
    let count = u64::from_le_bytes(buf[16..24].try_into().unwrap()) as usize;
    if buf.len() != 24 + count * 16 {
        return None;
    }
    let mut gens = Vec::with_capacity(count);
    let mut off = 24;
    for _ in 0..count {
        let mut pts = [[Fq2::ZERO; 4]; 2];
        for pt in pts.iter_mut() {
            for c in pt.iter_mut() {
                let idx = u16::from_le_bytes(buf[off..off + 2].try_into().unwrap()) as u64;
                *c = t.unidx2(idx);
                off += 2;
            }
        }
        gens.push(Line { r1: Point4(pts[0]), r2: Point4(pts[1]) });
    }
    Some(gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t5() -> Tower {
        Tower::new(5).unwrap()
    }

    #[test]
    fn hermitian_eval_fixtures() {
        let t = t5();
        let o = Point4([Fq2::ONE, Fq2::ZERO, Fq2::ZERO, Fq2::ZERO]);
        assert_eq!(hermitian_eval(&t, &o), Fp(0), "O lies on the surface");
        let e1 = Point4([Fq2::ZERO, Fq2::ONE, Fq2::ZERO, Fq2::ZERO]);
        assert_eq!(hermitian_eval(&t, &e1), Fp(1));
        // P⁺ = (1, 2, h, 0): 2^(q+1) + 2h^(q+1) = 4 − 4 = 0
        let h = t.h().unwrap();
        let pp = Point4::affine(t.int2(2), h, Fq2::ZERO);
        assert_eq!(hermitian_eval(&t, &pp), Fp(0));
    }

    #[test]
    fn normalization_idempotent() {
        let t = t5();
        for i in 0..200u64 {
            let coords = [
                t.unidx2(i % 25),
                t.unidx2((i * 7 + 3) % 25),
                t.unidx2((i * 11 + 1) % 25),
                t.unidx2((i * 13 + 2) % 25),
            ];
            if coords.iter().all(|c| c.is_zero()) {
                continue;
            }
            let p = Point4::new(&t, coords).unwrap();
            let p2 = Point4::new(&t, p.0).unwrap();
            assert_eq!(p, p2);
        }
    }

    #[test]
    fn line_canonical_key_stable() {
        let t = t5();
        let a = Point4::affine(t.int2(1), t.int2(2), t.int2(3));
        let b = Point4::affine(t.int2(4), t.int2(0), t.int2(1));
        let l = Line::from_span(&t, a, b).unwrap();
        // every spanning pair of the line gives the same canonical form
        let pts = l.points(&t);
        assert_eq!(pts.len(), 26);
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let l2 = Line::from_span(&t, pts[i], pts[j]).unwrap();
                assert_eq!(l2, l);
            }
        }
        // (r2, r1) are the two lexicographically least points
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(sorted[0], l.r2);
        assert_eq!(sorted[1], l.r1);
    }

    #[test]
    fn degenerate_span_rejected() {
        let t = t5();
        let a = Point4::affine(t.int2(1), t.int2(2), t.int2(3));
        assert!(Line::from_span(&t, a, a).is_err());
    }

    #[test]
    fn pluecker_fixtures() {
        let t = t5();
        // line X2 = X3 = 0
        let a = Point4([Fq2::ONE, Fq2::ZERO, Fq2::ZERO, Fq2::ZERO]);
        let b = Point4([Fq2::ZERO, Fq2::ONE, Fq2::ZERO, Fq2::ZERO]);
        let l = Line::from_span(&t, a, b).unwrap();
        let pl = pluecker(&t, &l);
        assert_eq!(pl.0, [Fq2::ONE, Fq2::ZERO, Fq2::ZERO, Fq2::ZERO, Fq2::ZERO, Fq2::ZERO]);
        assert_eq!(pluecker_relation(&t, &pl), Fq2::ZERO);
    }

    #[test]
    fn surface_p5_counts() {
        let t = t5();
        let m = SurfaceModel::build(&t).unwrap();
        assert_eq!(m.num_points, 3276);
        assert_eq!(m.generators.len(), 756);
        let pg = m.point_gens.as_ref().unwrap();
        assert!(pg.iter().all(|g| g.len() == 6), "every point on exactly q+1 = 6 generators");
        let gp = m.gen_points.as_ref().unwrap();
        assert!(gp.iter().all(|p| p.len() == 26), "every generator carries q²+1 = 26 points");
        // incidence double count
        let total: u64 = pg.iter().map(|g| g.len() as u64).sum();
        assert_eq!(total, 6 * 26 * 126);
    }

    #[test]
    fn pluecker_relation_on_generators() {
        let t = t5();
        let m = SurfaceModel::build(&t).unwrap();
        for g in &m.generators {
            assert_eq!(pluecker_relation(&t, &pluecker(&t, g)), Fq2::ZERO);
        }
    }

    #[test]
    fn tangent_generators_meet_only_at_base_point() {
        let t = t5();
        let m = SurfaceModel::build(&t).unwrap();
        let p = m.points.as_ref().unwrap()[17];
        let gens = tangent_generators(&t, &p).unwrap();
        assert_eq!(gens.len(), 6);
        for i in 0..gens.len() {
            let pi = gens[i].points(&t);
            for gj in gens.iter().skip(i + 1) {
                let common: Vec<_> = gj.points(&t).into_iter().filter(|x| pi.contains(x)).collect();
                assert_eq!(common, vec![p], "a GQ has no triangles");
            }
        }
        assert!(tangent_generators(&t, &Point4([Fq2::ZERO, Fq2::ONE, Fq2::ZERO, Fq2::ZERO])).is_err());
    }

    #[test]
    fn generators_match_bruteforce_on_sample() {
        // Cross-check on a sampled set of point pairs: every 2-point span that
        // lies wholly on the surface is one of the tangent-plane generators.
        let t = t5();
        let m = SurfaceModel::build(&t).unwrap();
        let pts = m.points.as_ref().unwrap();
        let mut found = std::collections::HashSet::new();
        for i in (0..pts.len()).step_by(7) {
            for j in ((i + 1)..pts.len()).step_by(11) {
                if let Ok(l) = Line::from_span(&t, pts[i], pts[j]) {
                    let mut all_on = true;
                    l.for_each_point(&t, |x| {
                        if hermitian_eval(&t, &x).0 != 0 {
                            all_on = false;
                        }
                    });
                    if all_on {
                        found.insert(l.key(&t));
                    }
                }
            }
        }
        for k in &found {
            assert!(m.gen_index.contains_key(k));
        }
        assert!(!found.is_empty());
    }

    #[test]
    fn hyperplane_counts_q5() {
        let t = t5();
        let mut n = 0u64;
        let mut through_e1 = 0u64;
        hyperplanes(&t, |c| {
            n += 1;
            // covector (1,0,...) contains (0,1,0,0,0,0); count hyperplanes
            // through that point
            if c[1].0 == 0 {
                through_e1 += 1;
            }
        });
        assert_eq!(n, 3906);
        assert_eq!(through_e1, 781, "every point lies on (q⁵−1)/(q−1) hyperplanes");
    }

    #[test]
    fn generator_cache_roundtrip() {
        let t = t5();
        let m = SurfaceModel::build(&t).unwrap();
        let dir = std::env::temp_dir().join("hemisys_cache_test");
        save_generators(&t, &dir, &m.generators).unwrap();
        let loaded = load_generators(&t, &dir).unwrap();
        assert_eq!(loaded.len(), m.generators.len());
        for (a, b) in loaded.iter().zip(m.generators.iter()) {
            assert_eq!(a, b);
        }
        let _ = std::fs::remove_dir_all(&dir);
    }
}
