//! Klein correspondence and coding-theory pipeline: Plücker images of the
//! generators, Baer-subgeometry extraction by frame normalization, elliptic
//! quadric fitting, the two-intersection certificate over all hyperplanes,
//! and the two-weight linear code.

use std::collections::{BTreeMap, HashSet};
use std::io::Write as IoWrite;

use serde::Serialize;

use crate::ff::{Fp, Fq2, Tower};
use crate::geom::{pg5_points, pg5_size, pluecker};
use crate::hemi::{Assembly, Construction};
use crate::Error;

/// Normalized GF(q) point of PG(5,q): first nonzero coordinate is 1.
pub type P5 = [u64; 6];

/// Plücker images of all generators after the Baer change of frame; entry i
/// is the image of generator i.
pub struct KleinImage {
    pub points: Vec<P5>,
    /// The frame actually used: indices of the 7 images (6 spanning + unit).
    pub frame: [usize; 7],
}

fn normalize_p5(t: &Tower, v: &mut [Fp; 6]) {
    if let Some(lead) = v.iter().find(|c| c.0 != 0).copied() {
        let inv = t.invp(lead).unwrap();
        for c in v.iter_mut() {
            *c = t.mulp(*c, inv);
        }
    }
}

fn gauss_invert6(t: &Tower, m: &[[Fq2; 6]; 6]) -> Option<[[Fq2; 6]; 6]> {
    let mut a = *m;
    let mut inv = [[Fq2::ZERO; 6]; 6];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Fq2::ONE;
    }
    for col in 0..6 {
        let piv = (col..6).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = t.inv2(a[col][col]).unwrap();
        for j in 0..6 {
            a[col][j] = t.mul2(a[col][j], s);
            inv[col][j] = t.mul2(inv[col][j], s);
        }
        for r in 0..6 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..6 {
                    a[r][j] = t.sub2(a[r][j], t.mul2(f, a[col][j]));
                    inv[r][j] = t.sub2(inv[r][j], t.mul2(f, inv[col][j]));
                }
            }
        }
    }
    Some(inv)
}

fn mat_vec6(t: &Tower, m: &[[Fq2; 6]; 6], v: &[Fq2; 6]) -> [Fq2; 6] {
    let mut out = [Fq2::ZERO; 6];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        for (mc, vc) in row.iter().zip(v.iter()) {
            *o = t.add2(*o, t.mul2(*mc, *vc));
        }
    }
    out
}

/// Computes the Plücker images of all generators, chooses a projective frame
/// from 7 of them (6 spanning points plus a unit point with all frame
/// coordinates nonzero), applies the induced change of coordinates, and
/// asserts that every image then lands in the Baer subgeometry PG(5,q).
///
/// `frame_seed` rotates the deterministic frame search so that independence
/// of the frame choice can be tested.
pub fn klein_image(con: &Construction, frame_seed: usize) -> Result<KleinImage, Error> {
    let t = &con.tower;
    let gens = &con.surface.generators;
    let raw: Vec<[Fq2; 6]> = gens.iter().map(|l| pluecker(t, l).0).collect();
    let n = raw.len();
    let order: Vec<usize> = (0..n).map(|i| (i + frame_seed) % n).collect();

    // greedily pick 6 spanning images by Gaussian elimination
    let mut basis_idx = Vec::with_capacity(6);
    let mut reduced: Vec<[Fq2; 6]> = Vec::with_capacity(6);
    let mut pivots: Vec<usize> = Vec::with_capacity(6);
    for &i in &order {
        if basis_idx.len() == 6 {
            break;
        }
        let mut v = raw[i];
        for (r, &pc) in reduced.iter().zip(pivots.iter()) {
            if !v[pc].is_zero() {
                let f = v[pc];
                for j in 0..6 {
                    v[j] = t.sub2(v[j], t.mul2(f, r[j]));
                }
            }
        }
        if let Some(pc) = (0..6).find(|&j| !v[j].is_zero()) {
            let s = t.inv2(v[pc]).unwrap();
            for c in v.iter_mut() {
                *c = t.mul2(*c, s);
            }
            reduced.push(v);
            pivots.push(pc);
            basis_idx.push(i);
        }
    }
    if basis_idx.len() < 6 {
        return Err(Error::Construction("Plücker images do not span PG(5,q²)".into()));
    }
    let mut b = [[Fq2::ZERO; 6]; 6];
    for (c, &i) in basis_idx.iter().enumerate() {
        for r in 0..6 {
            b[r][c] = raw[i][r];
        }
    }
    let binv = gauss_invert6(t, &b)
        .ok_or_else(|| Error::Internal("spanning set fails to invert".into()))?;
    // unit point: an image whose coordinates in the new basis are all nonzero
    let unit = order
        .iter()
        .copied()
        .find(|&i| {
            !basis_idx.contains(&i) && {
                let c = mat_vec6(t, &binv, &raw[i]);
                c.iter().all(|x| !x.is_zero())
            }
        })
        .ok_or_else(|| Error::Construction("no unit point for a projective frame".into()))?;
    let lam = mat_vec6(t, &binv, &raw[unit]);
    // rescale basis columns by the unit coordinates and invert again
    for (c, l) in lam.iter().enumerate() {
        for r in 0..6 {
            b[r][c] = t.mul2(b[r][c], *l);
        }
    }
    let frame_inv = gauss_invert6(t, &b)
        .ok_or_else(|| Error::Internal("frame matrix fails to invert".into()))?;

    let mut points = Vec::with_capacity(n);
    let mut seen = HashSet::with_capacity(n);
    for v in &raw {
        let mut c = mat_vec6(t, &frame_inv, v);
        // scale so the first nonzero coordinate is 1, then demand GF(q)
        let lead = c
            .iter()
            .find(|x| !x.is_zero())
            .copied()
            .ok_or_else(|| Error::Internal("zero Plücker vector".into()))?;
        let s = t.inv2(lead).unwrap();
        let mut out = [Fp(0); 6];
        for (o, x) in out.iter_mut().zip(c.iter_mut()) {
            let y = t.mul2(*x, s);
            if !y.in_base() {
                return Err(Error::Construction(
                    "Plücker image fails Baer subfield landing".into(),
                ));
            }
            *o = Fp(y.a0);
        }
        let mut fp = out;
        normalize_p5(t, &mut fp);
        let coords = fp.map(|f| f.0);
        if !seen.insert(coords) {
            return Err(Error::Construction("Plücker images are not distinct".into()));
        }
        points.push(coords);
    }
    let expected = (t.p + 1) * (t.p * t.p * t.p + 1);
    if points.len() as u64 != expected {
        return Err(Error::Construction(format!(
            "{} images, expected (q+1)(q³+1) = {expected}",
            points.len()
        )));
    }
    let mut frame = [0usize; 7];
    frame[..6].copy_from_slice(&basis_idx);
    frame[6] = unit;
    Ok(KleinImage { points, frame })
}

/// Quadratic form on GF(q)⁶: coefficients c_{ij} for monomials x_i x_j,
/// i ≤ j, in lexicographic order.
#[derive(Clone, Debug)]
pub struct Quadric(pub [u64; 21]);

fn monomial_pairs() -> [(usize, usize); 21] {
    let mut out = [(0, 0); 21];
    let mut k = 0;
    for i in 0..6 {
        for j in i..6 {
            out[k] = (i, j);
            k += 1;
        }
    }
    out
}

impl Quadric {
    pub fn eval(&self, t: &Tower, x: &P5) -> u64 {
        let mut acc = 0u64;
        for (c, (i, j)) in self.0.iter().zip(monomial_pairs()) {
            acc = t.addp(Fp(acc), Fp(c * x[i] % t.p * x[j] % t.p)).0;
        }
        acc
    }

    /// Polar form B(x,y) = Q(x+y) − Q(x) − Q(y).
    pub fn polar(&self, t: &Tower, x: &P5, y: &P5) -> u64 {
        let mut acc = Fp(0);
        for (c, (i, j)) in self.0.iter().zip(monomial_pairs()) {
            let s = (x[i] * y[j] + x[j] * y[i]) % t.p;
            acc = t.addp(acc, Fp(c * s % t.p));
        }
        acc.0
    }

    /// Matrix of the polar form; the quadric is non-degenerate iff it is
    /// invertible (odd characteristic).
    pub fn is_nondegenerate(&self, t: &Tower) -> bool {
        let mut m = [[0u64; 6]; 6];
        for (c, (i, j)) in self.0.iter().zip(monomial_pairs()) {
            if i == j {
                m[i][i] = t.addp(Fp(m[i][i]), Fp(2 * c % t.p)).0;
            } else {
                m[i][j] = *c;
                m[j][i] = *c;
            }
        }
        // Gaussian elimination rank
        let mut rank = 0;
        for col in 0..6 {
            if let Some(piv) = (rank..6).find(|&r| m[r][col] != 0) {
                m.swap(rank, piv);
                let inv = t.invp(Fp(m[rank][col])).unwrap().0;
                for j in 0..6 {
                    m[rank][j] = m[rank][j] * inv % t.p;
                }
                for r in 0..6 {
                    if r != rank && m[r][col] != 0 {
                        let f = m[r][col];
                        for j in 0..6 {
                            m[r][j] = t.subp(Fp(m[r][j]), Fp(f * m[rank][j] % t.p)).0;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank == 6
    }
}

/// Fits the unique (up to scalar) quadratic form vanishing on the given
/// points, then certifies it: 1-dimensional solution space, non-degenerate,
/// and elliptic by projective zero count (q+1)(q³+1) ≠ hyperbolic's
/// (q²+1)(q²+q+1).
pub fn fit_quadric(t: &Tower, points: &[P5]) -> Result<Quadric, Error> {
    if points.len() < 21 {
        return Err(Error::Precondition("need ≥ 21 points to fit a quadric".into()));
    }
    // nullspace of the (n × 21) evaluation matrix
    let pairs = monomial_pairs();
    let mut rows: Vec<[u64; 21]> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for x in points {
        let mut v = [0u64; 21];
        for (vc, (i, j)) in v.iter_mut().zip(pairs) {
            *vc = x[i] * x[j] % t.p;
        }
        for (r, &pc) in rows.iter().zip(pivots.iter()) {
            if v[pc] != 0 {
                let f = v[pc];
                for j in 0..21 {
                    v[j] = t.subp(Fp(v[j]), Fp(f * r[j] % t.p)).0;
                }
            }
        }
        if let Some(pc) = (0..21).find(|&j| v[j] != 0) {
            let inv = t.invp(Fp(v[pc])).unwrap().0;
            for c in v.iter_mut() {
                *c = *c * inv % t.p;
            }
            rows.push(v);
            pivots.push(pc);
            if rows.len() == 21 {
                break;
            }
        }
    }
    if rows.len() != 20 {
        return Err(Error::Construction(format!(
            "quadric solution space has dimension {}, expected 1",
            21 - rows.len() as i64
        )));
    }
    // back-substitute: free column gets 1
    let free = (0..21)
        .find(|c| !pivots.contains(c))
        .ok_or_else(|| Error::Internal("no free column".into()))?;
    let mut coeff = [0u64; 21];
    coeff[free] = 1;
    // rows are in reduced row-echelon form after full elimination below
    // eliminate upwards to get RREF
    for i in (0..rows.len()).rev() {
        let (head, tail) = rows.split_at_mut(i);
        let ri = &tail[0];
        let pc = pivots[i];
        for r in head.iter_mut() {
            if r[pc] != 0 {
                let f = r[pc];
                for j in 0..21 {
                    r[j] = t.subp(Fp(r[j]), Fp(f * ri[j] % t.p)).0;
                }
            }
        }
    }
    for (r, &pc) in rows.iter().zip(pivots.iter()) {
        coeff[pc] = t.subp(Fp(0), Fp(r[free])).0;
    }
    let q = Quadric(coeff);
    for x in points {
        if q.eval(t, x) != 0 {
            return Err(Error::Internal("fitted quadric misses a data point".into()));
        }
    }
    if !q.is_nondegenerate(t) {
        return Err(Error::Construction("fitted quadric is degenerate".into()));
    }
    let mut zeros = 0u64;
    pg5_points(t, |x| {
        let xp = [x[0].0, x[1].0, x[2].0, x[3].0, x[4].0, x[5].0];
        if q.eval(t, &xp) == 0 {
            zeros += 1;
        }
    });
    let elliptic = (t.p + 1) * (t.p * t.p * t.p + 1);
    let hyperbolic = (t.p * t.p + 1) * (t.p * t.p + t.p + 1);
    if zeros == hyperbolic {
        return Err(Error::Construction("quadric is hyperbolic, not elliptic".into()));
    }
    if zeros != elliptic {
        return Err(Error::Construction(format!(
            "quadric has {zeros} projective zeros, elliptic count is {elliptic}"
        )));
    }
    Ok(q)
}

/// Klein-duality spot check: concurrent generators map to points spanning a
/// line on the quadric (polar form vanishes), disjoint generators to
/// non-orthogonal points. Deterministic stride sample of `samples` pairs of
/// each kind.
pub fn verify_klein_duality(
    con: &Construction,
    image: &KleinImage,
    quadric: &Quadric,
    samples: usize,
) -> Result<(), Error> {
    let t = &con.tower;
    let gens = &con.surface.generators;
    let n = gens.len();
    let meet = |a: usize, b: usize| -> bool {
        let mut keys = HashSet::new();
        gens[a].for_each_point(t, |p| {
            keys.insert(p.key(t));
        });
        let mut m = false;
        gens[b].for_each_point(t, |p| {
            if keys.contains(&p.key(t)) {
                m = true;
            }
        });
        m
    };
    let mut met = 0;
    let mut disjoint = 0;
    let mut i = 0usize;
    let mut j = 1usize;
    while met < samples || disjoint < samples {
        j += 7;
        if j >= n {
            i += 1;
            j = i + 1;
            if i >= n - 1 {
                break;
            }
        }
        let b = quadric.polar(t, &image.points[i], &image.points[j]);
        if meet(i, j) {
            if b != 0 {
                return Err(Error::TheoremViolation(format!(
                    "concurrent generators {i},{j} have non-orthogonal images"
                )));
            }
            met += 1;
        } else {
            if b == 0 {
                return Err(Error::TheoremViolation(format!(
                    "disjoint generators {i},{j} have orthogonal images"
                )));
            }
            disjoint += 1;
        }
    }
    if met == 0 || disjoint == 0 {
        return Err(Error::Internal("duality spot check sampled no pairs".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveSetCertificate {
    pub n: u64,
    pub k: u64,
    pub h1: u64,
    pub h2: u64,
    /// intersection size → number of hyperplanes
    pub histogram: BTreeMap<u64, u64>,
}

/// Scans all (q⁶−1)/(q−1) hyperplanes; the intersection histogram must be
/// supported on exactly {(q²+1)(q+1)/2, (q³−q²+q+1)/2}.
pub fn two_intersection_certificate(
    t: &Tower,
    set: &[P5],
) -> Result<ProjectiveSetCertificate, Error> {
    let h1 = (t.p * t.p + 1) * (t.p + 1) / 2;
    let h2 = (t.p * t.p * t.p - t.p * t.p + t.p + 1) / 2;
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    let mut scanned = 0u64;
    let mut witness: Option<([u64; 6], u64)> = None;
    crate::geom::hyperplanes(t, |h| {
        scanned += 1;
        let mut c = 0u64;
        for x in set {
            let mut dot = Fp(0);
            for (hc, xc) in h.iter().zip(x.iter()) {
                dot = t.addp(dot, Fp(hc.0 * xc % t.p));
            }
            if dot.0 == 0 {
                c += 1;
            }
        }
        *histogram.entry(c).or_insert(0) += 1;
        if c != h1 && c != h2 && witness.is_none() {
            witness = Some(([h[0].0, h[1].0, h[2].0, h[3].0, h[4].0, h[5].0], c));
        }
    });
    if scanned != pg5_size(t) {
        return Err(Error::Internal("hyperplane scan incomplete".into()));
    }
    if let Some((h, c)) = witness {
        return Err(Error::TheoremViolation(format!(
            "hyperplane {h:?} meets the set in {c} points ∉ {{{h1},{h2}}}"
        )));
    }
    // point-hyperplane double count: Σ_H |H ∩ set| = n · (q⁵−1)/(q−1)
    let total: u64 = histogram.iter().map(|(c, m)| c * m).sum();
    let through = (t.p.pow(5) - 1) / (t.p - 1);
    if total != set.len() as u64 * through {
        return Err(Error::Internal("incidence double count fails".into()));
    }
    Ok(ProjectiveSetCertificate {
        n: set.len() as u64,
        k: 6,
        h1,
        h2,
        histogram,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoWeightCode {
    pub n: u64,
    pub k: u64,
    pub w1: u64,
    pub w2: u64,
    /// weight → number of codewords (including the zero word)
    pub distribution: BTreeMap<u64, u64>,
}

/// Builds the [n,6] code with the set points as generator-matrix columns and
/// enumerates all qᵏ codewords; exactly two nonzero weights must appear,
/// wᵢ = n − hᵢ.
pub fn build_code(t: &Tower, cert: &ProjectiveSetCertificate, set: &[P5]) -> Result<TwoWeightCode, Error> {
    let q = t.p;
    let n = set.len() as u64;
    let mut distribution: BTreeMap<u64, u64> = BTreeMap::new();
    let total = q.pow(6);
    let mut x = [0u64; 6];
    for mut msg in 0..total {
        for c in x.iter_mut() {
            *c = msg % q;
            msg /= q;
        }
        let mut zeros = 0u64;
        for col in set {
            let mut dot = 0u64;
            for (a, b) in x.iter().zip(col.iter()) {
                dot += a * b % q;
            }
            if dot % q == 0 {
                zeros += 1;
            }
        }
        *distribution.entry(n - zeros).or_insert(0) += 1;
    }
    let w1 = n - cert.h1;
    let w2 = n - cert.h2;
    let nonzero: Vec<u64> = distribution.keys().copied().filter(|&w| w != 0).collect();
    if nonzero != {
        let mut v = vec![w1, w2];
        v.sort_unstable();
        v
    } {
        return Err(Error::TheoremViolation(format!(
            "code weights {nonzero:?} ≠ {{{w1},{w2}}}"
        )));
    }
    if distribution.get(&0) != Some(&1) {
        return Err(Error::TheoremViolation("zero weight multiplicity ≠ 1".into()));
    }
    pless_moments(t.p, n, 6, &distribution)?;
    Ok(TwoWeightCode { n, k: 6, w1, w2, distribution })
}

/// First two Pless power moments for a full-rank [n,k] code over GF(q):
/// Σ A_w = qᵏ and Σ w·A_w = n·qᵏ⁻¹(q−1).
pub fn pless_moments(q: u64, n: u64, k: u32, dist: &BTreeMap<u64, u64>) -> Result<(), Error> {
    let m0: u64 = dist.values().sum();
    let m1: u64 = dist.iter().map(|(w, a)| w * a).sum();
    if m0 != q.pow(k) {
        return Err(Error::TheoremViolation(format!("Σ A_w = {m0} ≠ q^{k}")));
    }
    if m1 != n * q.pow(k - 1) * (q - 1) {
        return Err(Error::TheoremViolation(format!(
            "Σ w·A_w = {m1} ≠ n·q^{}·(q−1) = {}",
            k - 1,
            n * q.pow(k - 1) * (q - 1)
        )));
    }
    Ok(())
}

/// Lifts each projective point to all q−1 scalar multiples in GF(q)⁶,
/// packed as base-q keys; guarantees Ω = −Ω and 0 ∉ Ω.
pub fn omega_from_set(t: &Tower, set: &[P5]) -> Result<Vec<u64>, Error> {
    let q = t.p;
    let mut omega = Vec::with_capacity(set.len() * (q as usize - 1));
    for x in set {
        for s in 1..q {
            let mut key = 0u64;
            for &c in x.iter().rev() {
                key = key * q + c * s % q;
            }
            if key == 0 {
                return Err(Error::Domain("zero vector in lift".into()));
            }
            omega.push(key);
        }
    }
    omega.sort_unstable();
    omega.dedup();
    if omega.len() != set.len() * (q as usize - 1) {
        return Err(Error::Domain("scalar lifts collide: input not projective points".into()));
    }
    Ok(omega)
}

/// The hemisystem's ovoid: images of the lines of S.
pub fn ovoid_points(image: &KleinImage, assembly: &Assembly) -> Vec<P5> {
    assembly
        .s
        .iter()
        .map(|&i| image.points[i as usize])
        .collect()
}

pub fn write_generator_matrix(set: &[P5], mut w: impl IoWrite) -> Result<(), Error> {
    for row in 0..6 {
        let cells: Vec<String> = set.iter().map(|x| x[row].to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_ovoid_csv(set: &[P5], mut w: impl IoWrite) -> Result<(), Error> {
    writeln!(w, "x0,x1,x2,x3,x4,x5")?;
    for x in set {
        let cells: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
