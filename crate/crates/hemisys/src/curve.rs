//! The Fuhrmann–Torres curves X⁺/X⁻ on the Hermitian surface: rational points
//! over GF(q²) and GF(q⁴), the Ω/Δ± partition, imaginary chords, and the
//! classification of generators by how they meet the curves.
//!
//! The affine plane model is y^q − y = ±x^((q+1)/2); its image on the surface
//! under (x,y) ↦ (1,x,y,y²) is closed up by the single non-affine image point
//! (0,0,0,1), and all point counts are enforced against the maximal-curve
//! formulas after enumeration.

use std::collections::{HashMap, HashSet};

use crate::ff::{Fp, Fq2, Fq4, Tower};
use crate::geom::{hermitian_eval, tangent_generators, Line, Point4, SurfaceModel};
use crate::Error;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply2(&self, t: &Tower, x: Fq2) -> Fq2 {
        match self {
            Sign::Plus => x,
            Sign::Minus => t.neg2(x),
        }
    }

    fn apply4(&self, t: &Tower, x: Fq4) -> Fq4 {
        match self {
            Sign::Plus => x,
            Sign::Minus => t.neg4(x),
        }
    }
}

/// Genus of the Fuhrmann–Torres curve: (q−1)²/4.
pub fn genus(t: &Tower) -> u64 {
    let q = t.p;
    (q - 1) * (q - 1) / 4
}

/// Point tables for one of the two curves.
pub struct CurveTables {
    pub sign: Sign,
    /// All GF(q²)-rational points, as surface points.
    pub rational: Vec<Point4>,
    pub rational_keys: HashSet<u64>,
    /// The plane section X1 = 0 of the curve: q+1 points.
    pub omega: Vec<Point4>,
    pub omega_keys: HashSet<u64>,
    /// rational ∖ omega, (q³−q)/2 points.
    pub delta: Vec<Point4>,
    pub delta_keys: HashSet<u64>,
    /// Affine (x,y) coordinates of X(GF(q⁴)) ∖ X(GF(q²)).
    pub quartic: Vec<(Fq4, Fq4)>,
    /// Imaginary chords: rational lines pairing quartic points with their
    /// GF(q²)-Frobenius conjugates. Every one is asserted to be a generator.
    pub chords: Vec<Line>,
}

/// Expected |X(GF(q²))| = q² + 1 + 2qg (Hasse–Weil, attained).
pub fn expected_rational(t: &Tower) -> u64 {
    let q = t.p;
    q * q + 1 + 2 * q * genus(t)
}

/// Expected |X(GF(q⁴))| = q⁴ + 1 − 2q²g (maximal over GF(q²) ⇒ minimal over GF(q⁴)).
pub fn expected_quartic_total(t: &Tower) -> u64 {
    let q = t.p;
    q * q * q * q + 1 - 2 * q * q * genus(t)
}

/// Expected number of imaginary chords: (q²+q)(q²−q−2g)/2.
pub fn expected_chords(t: &Tower) -> u64 {
    let q = t.p;
    (q * q + q) * (q * q - q - 2 * genus(t)) / 2
}

impl CurveTables {
    /// Enumerates the curve. `with_quartic` also builds the GF(q⁴) level and
    /// the imaginary chords (needed for the hemisystem side only on X⁺).
    pub fn build(t: &Tower, sign: Sign, with_quartic: bool) -> Result<CurveTables, Error> {
        let rational = Self::enumerate_rational(t, sign);
        if rational.len() as u64 != expected_rational(t) {
            return Err(Error::Internal(format!(
                "|X(GF(q²))| = {} but the maximality formula gives {}",
                rational.len(),
                expected_rational(t)
            )));
        }
        for p in &rational {
            debug_assert_eq!(hermitian_eval(t, p), Fp(0), "curve image must lie on U₃");
        }
        let mut omega = Vec::new();
        let mut delta = Vec::new();
        for p in &rational {
            if p.0[1].is_zero() {
                omega.push(*p);
            } else {
                delta.push(*p);
            }
        }
        let q = t.p;
        if omega.len() as u64 != q + 1 || delta.len() as u64 != (q * q * q - q) / 2 {
            return Err(Error::Internal(format!(
                "Ω/Δ split {}/{} does not match q+1 / (q³−q)/2",
                omega.len(),
                delta.len()
            )));
        }
        let rational_keys = rational.iter().map(|p| p.key(t)).collect();
        let omega_keys: HashSet<u64> = omega.iter().map(|p| p.key(t)).collect();
        let delta_keys = delta.iter().map(|p| p.key(t)).collect();

        let (quartic, chords) = if with_quartic {
            let quartic = Self::enumerate_quartic(t, sign, &rational_keys)?;
            let chords = Self::imaginary_chords(t, &quartic, &rational_keys)?;
            (quartic, chords)
        } else {
            (Vec::new(), Vec::new())
        };

        Ok(CurveTables {
            sign,
            rational,
            rational_keys,
            omega,
            omega_keys,
            delta,
            delta_keys,
            quartic,
            chords,
        })
    }

    /// Affine solutions of y^q − y = ±x^((q+1)/2) over GF(q²), plus (0,0,0,1).
    ///
    /// For y = y0 + y1·t, y^q − y = −2 y1 t, so a RHS value c is reachable iff
    /// its base component vanishes, and then y1 is forced with y0 free.
    fn enumerate_rational(t: &Tower, sign: Sign) -> Vec<Point4> {
        let mut out = Vec::new();
        let inv2 = t.invp(Fp(2)).unwrap();
        for x in t.all2() {
            let c = sign.apply2(t, t.pow2(x, (t.p + 1) / 2));
            if c.a0 != 0 {
                continue;
            }
            let y1 = t.negp(t.mulp(Fp(c.a1), inv2));
            for y0 in 0..t.p {
                let y = Fq2 { a0: y0, a1: y1.0 };
                out.push(phi(t, x, y));
            }
        }
        out.push(Point4([Fq2::ZERO, Fq2::ZERO, Fq2::ZERO, Fq2::ONE]));
        out
    }

    /// GF(q⁴)-points not already rational over GF(q²).
    ///
    /// Iterates x over GF(q⁴) and solves the additive equation
    /// y^q − y = c by a precomputed 3×3 solve on the complement of the kernel
    /// GF(q); per solvable x the fibre is y0 + GF(q).
    fn enumerate_quartic(
        t: &Tower,
        sign: Sign,
        rational_keys: &HashSet<u64>,
    ) -> Result<Vec<(Fq4, Fq4)>, Error> {
        let solver = ArtinSchreierSolver::new(t);
        let q = t.p;
        let q4 = q * q * q * q;
        let mut out = Vec::new();
        let mut total = 1u64; // the image point (0,0,0,1)
        for xi in 0..q4 {
            let x = t.unidx4(xi);
            let c = sign.apply4(t, t.pow4(x, (q + 1) / 2));
            let y0 = match solver.solve(t, c) {
                Some(y0) => y0,
                None => continue,
            };
            total += q;
            for d in 0..q {
                let y = t.add4(y0, t.lift4(t.int2(d as i64)));
                debug_assert_eq!(t.sub4(t.frob4(y), y), c);
                if x.in_quadratic() && y.in_quadratic() {
                    debug_assert!(rational_keys.contains(&phi(t, x.b0, y.b0).key(t)));
                    continue;
                }
                out.push((x, y));
            }
        }
        if total != expected_quartic_total(t) {
            return Err(Error::Internal(format!(
                "|X(GF(q⁴))| = {total} but the minimality formula gives {}",
                expected_quartic_total(t)
            )));
        }
        Ok(out)
    }

    /// Spans each quartic point with its q²-Frobenius conjugate and extracts a
    /// GF(q²)-rational spanning pair from the Frobenius-stable span.
    fn imaginary_chords(
        t: &Tower,
        quartic: &[(Fq4, Fq4)],
        rational_keys: &HashSet<u64>,
    ) -> Result<Vec<Line>, Error> {
        let mut index: HashMap<(u64, u64), usize> = HashMap::with_capacity(quartic.len());
        for (i, (x, y)) in quartic.iter().enumerate() {
            index.insert((t.idx4(*x), t.idx4(*y)), i);
        }
        let mut chords: HashMap<u128, Line> = HashMap::new();
        for (x, y) in quartic {
            let xs = t.frob4_sq(*x);
            let ys = t.frob4_sq(*y);
            let key = (t.idx4(xs), t.idx4(ys));
            if !index.contains_key(&key) {
                return Err(Error::Internal("quartic set not Frobenius-stable".into()));
            }
            if (t.idx4(*x), t.idx4(*y)) > key {
                continue; // each conjugate pair once
            }
            let v = phi4(t, *x, *y);
            let vs = phi4(t, xs, ys);
            // w1 = v + vσ and w2 = s·v − s·vσ are fixed by σ, hence rational.
            let s = Fq4 { b0: Fq2::ZERO, b1: Fq2::ONE };
            let mut w1 = [Fq2::ZERO; 4];
            let mut w2 = [Fq2::ZERO; 4];
            for i in 0..4 {
                let a = t.add4(v[i], vs[i]);
                let b = t.mul4(s, t.sub4(v[i], vs[i]));
                if !a.in_quadratic() || !b.in_quadratic() {
                    return Err(Error::Internal("chord span failed to descend to GF(q²)".into()));
                }
                w1[i] = a.b0;
                w2[i] = b.b0;
            }
            let p1 = Point4::new(t, w1)?;
            let p2 = Point4::new(t, w2)?;
            let line = Line::from_span(t, p1, p2)?;
            if !line_on_surface(t, &line) {
                return Err(Error::Internal("imaginary chord not contained in U₃".into()));
            }
            chords.insert(line.key(t), line);
        }
        let mut keys: Vec<u128> = chords.keys().copied().collect();
        keys.sort_unstable();
        let lines: Vec<Line> = keys.iter().map(|k| chords[k]).collect();
        if lines.len() as u64 != expected_chords(t) {
            return Err(Error::Internal(format!(
                "|ℋ| = {} but the chord formula gives {}",
                lines.len(),
                expected_chords(t)
            )));
        }
        for l in &lines {
            let mut clean = true;
            l.for_each_point(t, |p| {
                if rational_keys.contains(&p.key(t)) {
                    clean = false;
                }
            });
            if !clean {
                return Err(Error::Internal("imaginary chord meets a rational curve point".into()));
            }
        }
        Ok(lines)
    }
}

/// The morphism (x,y) ↦ (z²,xz,yz,y²) at z = 1, normalized.
pub fn phi(t: &Tower, x: Fq2, y: Fq2) -> Point4 {
    Point4::new(t, [Fq2::ONE, x, y, t.mul2(y, y)]).unwrap()
}

fn phi4(t: &Tower, x: Fq4, y: Fq4) -> [Fq4; 4] {
    [t.lift4(Fq2::ONE), x, y, t.mul4(y, y)]
}

/// A line of PG(3,q²) meets U₃ in 1, q+1 or q²+1 points; more than q+1
/// surface points force full containment.
pub fn line_on_surface(t: &Tower, l: &Line) -> bool {
    let mut on = 0u64;
    let mut seen = 0u64;
    let limit = t.p + 2;
    l.for_each_point(t, |p| {
        if seen < limit {
            seen += 1;
            if hermitian_eval(t, &p).0 == 0 {
                on += 1;
            }
        }
    });
    on == limit
}

/// Sanity checks for Ω: it is the conic ∩ Hermitian-curve section of the
/// plane X1 = 0, with subfield coordinates.
pub fn classify_omega(t: &Tower, omega: &[Point4]) -> Result<(), Error> {
    if omega.len() as u64 != t.p + 1 {
        return Err(Error::Internal(format!("|Ω| = {} != q+1", omega.len())));
    }
    for p in omega {
        let c = &p.0;
        if !c[1].is_zero() {
            return Err(Error::Internal("Ω point off the plane X1 = 0".into()));
        }
        // conic X0X3 − X2² = 0
        let conic = t.sub2(t.mul2(c[0], c[3]), t.mul2(c[2], c[2]));
        if !conic.is_zero() {
            return Err(Error::Internal("Ω point off the conic".into()));
        }
        // Hermitian curve X0^q X3 + X0 X3^q − 2 X2^(q+1) = 0
        let herm = t.sub2(
            t.add2(t.mul2(t.frob2(c[0]), c[3]), t.mul2(c[0], t.frob2(c[3]))),
            t.scale2(t.embed(t.norm2(c[2])), Fp(2)),
        );
        if !herm.is_zero() {
            return Err(Error::Internal("Ω point off the Hermitian plane curve".into()));
        }
        if !(c[0].in_base() && c[2].in_base() && c[3].in_base()) {
            return Err(Error::Internal("Ω point with non-subfield coordinates".into()));
        }
    }
    Ok(())
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum GenClass {
    G1,
    G2,
    Chord,
    Outside,
}

pub struct GeneratorClassification {
    pub classes: Vec<GenClass>,
    pub g1: Vec<u32>,
    pub g2: Vec<u32>,
    pub chords: Vec<u32>,
    pub outside: Vec<u32>,
}

/// Classifies every generator of the surface against both curves.
///
/// Works from the curve side: for each curve point, marks the q+1 generators
/// through it, so the cost scales with |X(GF(q²))| rather than with the full
/// generator-point incidence.
pub fn classify_generators(
    surface: &SurfaceModel,
    plus: &CurveTables,
    minus: &CurveTables,
) -> Result<GeneratorClassification, Error> {
    let t = &surface.tower;
    let n = surface.generators.len();
    let mut meets_dplus = vec![false; n];
    let mut meets_dminus = vec![false; n];
    let mut meets_omega = vec![false; n];
    let mut is_chord = vec![false; n];

    if plus.omega_keys != minus.omega_keys {
        return Err(Error::Internal("Ω must be the common point set of X⁺ and X⁻".into()));
    }

    let mark = |pts: &[Point4], flags: &mut [bool]| -> Result<(), Error> {
        for p in pts {
            for g in tangent_generators(t, p)? {
                match surface.generator_id(&g) {
                    Some(gi) => flags[gi as usize] = true,
                    None => return Err(Error::Internal("unknown generator through curve point".into())),
                }
            }
        }
        Ok(())
    };
    mark(&plus.delta, &mut meets_dplus)?;
    mark(&minus.delta, &mut meets_dminus)?;
    mark(&plus.omega, &mut meets_omega)?;

    for c in &plus.chords {
        match surface.generator_id(c) {
            Some(gi) => is_chord[gi as usize] = true,
            None => return Err(Error::Internal("imaginary chord is not a generator".into())),
        }
    }

    let mut classes = Vec::with_capacity(n);
    let (mut g1, mut g2, mut chords, mut outside) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let class = if is_chord[i] {
            if meets_dplus[i] || meets_dminus[i] || meets_omega[i] {
                return Err(Error::Internal("chord meets the rational curve".into()));
            }
            GenClass::Chord
        } else if meets_omega[i] {
            if meets_dplus[i] || meets_dminus[i] {
                return Err(Error::Internal("generator meets both Ω and Δ±".into()));
            }
            GenClass::G2
        } else if meets_dplus[i] && meets_dminus[i] {
            GenClass::G1
        } else if meets_dplus[i] || meets_dminus[i] {
            return Err(Error::Internal(
                "generator meets exactly one of Δ⁺/Δ⁻ off Ω; contradicts the G split".into(),
            ));
        } else {
            GenClass::Outside
        };
        match class {
            GenClass::G1 => g1.push(i as u32),
            GenClass::G2 => g2.push(i as u32),
            GenClass::Chord => chords.push(i as u32),
            GenClass::Outside => outside.push(i as u32),
        }
        classes.push(class);
    }

    let q = t.p;
    let expect_g1 = (q * q * q - q) * (q + 1) / 2;
    let expect_g2 = (q + 1) * (q + 1);
    if g1.len() as u64 != expect_g1
        || g2.len() as u64 != expect_g2
        || chords.len() as u64 != expected_chords(t)
    {
        return Err(Error::Internal(format!(
            "class counts G1={} G2={} ℋ={} disagree with the formulas {}/{}/{}",
            g1.len(),
            g2.len(),
            chords.len(),
            expect_g1,
            expect_g2,
            expected_chords(t)
        )));
    }
    Ok(GeneratorClassification { classes, g1, g2, chords, outside })
}

/// The Lemma-5.3 witness: the line through P_{u,v} = (1,u,v,v²) ∈ Δ⁺ and
/// Q_{s,t} = (1,s,t,t²) ∈ Δ⁻ when all four displayed conditions hold.
pub fn g1_witness(tw: &Tower, v: Fq2, t: Fq2, u: Fq2, s: Fq2) -> Option<Line> {
    if u.is_zero() || s.is_zero() {
        return None; // Δ points have X1 ≠ 0
    }
    let half_exp = (tw.p + 1) / 2;
    // F(v,t) = (v+t)^(q+1) − 2(vt + (vt)^q)
    let vt = tw.mul2(v, t);
    let f = tw.subp(
        tw.norm2(tw.add2(v, t)),
        tw.mulp(Fp(2), tw.trace2(vt)),
    );
    if f.0 != 0 {
        return None;
    }
    if tw.pow2(u, half_exp) != tw.sub2(tw.frob2(v), v) {
        return None;
    }
    if tw.neg2(tw.pow2(s, half_exp)) != tw.sub2(tw.frob2(t), t) {
        return None;
    }
    let lhs = tw.mul2(tw.frob2(u), s);
    let d = tw.sub2(t, tw.frob2(v));
    if lhs != tw.mul2(d, d) {
        return None;
    }
    let p1 = Point4::affine(u, v, tw.mul2(v, v));
    let p2 = Point4::affine(s, t, tw.mul2(t, t));
    Line::from_span(tw, p1, p2).ok()
}

/// Precomputed solver for y^q − y = c on GF(q⁴).
///
/// The kernel is GF(q) = span(1); on the complementary basis (t, s, ts) the
/// map is injective, so a one-time 3×3 inversion over GF(q) gives a candidate
/// preimage which is then verified against the full equation.
struct ArtinSchreierSolver {
    /// rows r0..r2: coordinates used for the 3×3 solve
    rows: [usize; 3],
    /// inverse of the 3×3 coefficient matrix, over GF(q)
    inv: [[Fp; 3]; 3],
}

impl ArtinSchreierSolver {
    fn new(t: &Tower) -> ArtinSchreierSolver {
        let basis = [
            Fq4 { b0: Fq2 { a0: 0, a1: 1 }, b1: Fq2::ZERO },       // t
            Fq4 { b0: Fq2::ZERO, b1: Fq2::ONE },                    // s
            Fq4 { b0: Fq2::ZERO, b1: Fq2 { a0: 0, a1: 1 } },        // ts
        ];
        // columns: L(b_i) in coordinates (b0.a0, b0.a1, b1.a0, b1.a1)
        let col = |x: Fq4| -> [Fp; 4] {
            [Fp(x.b0.a0), Fp(x.b0.a1), Fp(x.b1.a0), Fp(x.b1.a1)]
        };
        let cols: Vec<[Fp; 4]> = basis
            .iter()
            .map(|b| col(t.sub4(t.frob4(*b), *b)))
            .collect();
        // pick 3 rows making the 3×3 matrix invertible
        for r0 in 0..4 {
            for r1 in (r0 + 1)..4 {
                for r2 in (r1 + 1)..4 {
                    let rows = [r0, r1, r2];
                    let m: Vec<[Fp; 3]> = rows
                        .iter()
                        .map(|&r| [cols[0][r], cols[1][r], cols[2][r]])
                        .collect();
                    if let Some(inv) = invert3(t, [m[0], m[1], m[2]]) {
                        return ArtinSchreierSolver { rows, inv };
                    }
                }
            }
        }
        unreachable!("y^q − y has rank 3 on GF(q⁴)");
    }

    fn solve(&self, t: &Tower, c: Fq4) -> Option<Fq4> {
        let cv = [Fp(c.b0.a0), Fp(c.b0.a1), Fp(c.b1.a0), Fp(c.b1.a1)];
        let rhs = [cv[self.rows[0]], cv[self.rows[1]], cv[self.rows[2]]];
        let mut sol = [Fp(0); 3];
        for i in 0..3 {
            let mut acc = Fp(0);
            for j in 0..3 {
                acc = t.addp(acc, t.mulp(self.inv[i][j], rhs[j]));
            }
            sol[i] = acc;
        }
        let y = Fq4 {
            b0: Fq2 { a0: 0, a1: sol[0].0 },
            b1: Fq2 { a0: sol[1].0, a1: sol[2].0 },
        };
        if t.sub4(t.frob4(y), y) == c {
            Some(y)
        } else {
            None
        }
    }
}

fn invert3(t: &Tower, m: [[Fp; 3]; 3]) -> Option<[[Fp; 3]; 3]> {
    let det = |m: &[[Fp; 3]; 3]| {
        let a = t.mulp(m[0][0], t.subp(t.mulp(m[1][1], m[2][2]), t.mulp(m[1][2], m[2][1])));
        let b = t.mulp(m[0][1], t.subp(t.mulp(m[1][0], m[2][2]), t.mulp(m[1][2], m[2][0])));
        let c = t.mulp(m[0][2], t.subp(t.mulp(m[1][0], m[2][1]), t.mulp(m[1][1], m[2][0])));
        t.addp(t.subp(a, b), c)
    };
    let d = det(&m);
    if d.0 == 0 {
        return None;
    }
    let dinv = t.invp(d).unwrap();
    let cof = |r: usize, c: usize| {
        let rr: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cc: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        let minor = t.subp(
            t.mulp(m[rr[0]][cc[0]], m[rr[1]][cc[1]]),
            t.mulp(m[rr[0]][cc[1]], m[rr[1]][cc[0]]),
        );
        if (r + c) % 2 == 0 {
            minor
        } else {
            t.negp(minor)
        }
    };
    let mut inv = [[Fp(0); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            inv[r][c] = t.mulp(cof(c, r), dinv); // adjugate transpose
        }
    }
    Some(inv)
}
