//! Hemisystem assembly (M₁ ∪ M₂ ∪ ℋ with the ℓ±-choice rule), full and
//! streaming verification, invariance checks, and certificates.
//!
//! The choice rule is never trusted: the assembler always runs the full
//! incidence verifier on its output, and can additionally try all four
//! (M1/M1′)×(M2/M2′) pairings and record which of them verify.

use std::collections::HashSet;
use std::fmt::Write as FmtWrite;
use std::io::Write as IoWrite;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve::{classify_generators, CurveTables, GeneratorClassification, Sign};
use crate::ff::Tower;
use crate::geom::{pg3_size, Line, Point4, SurfaceModel};
use crate::group::{
    act_line, expected_group_order, h_generators, orbit_decomposition, GroupElement,
    OrbitDecomposition,
};
use crate::lemmas::{count_r_rprime, landau_record, TangentCaseContext};
use crate::Error;

/// Everything the assembler needs, built once per prime.
pub struct Construction {
    pub tower: Tower,
    pub surface: SurfaceModel,
    pub plus: CurveTables,
    pub minus: CurveTables,
    pub cls: GeneratorClassification,
    pub orbits: OrbitDecomposition,
}

impl Construction {
    pub fn build(p: u64, cache_dir: Option<&Path>) -> Result<Construction, Error> {
        let record = landau_record(p)?;
        if p % 8 != 5 {
            return Err(Error::Precondition(format!(
                "p = {p} ≢ 5 (mod 8); the construction is out of scope"
            )));
        }
        if record.a.is_none() {
            return Err(Error::Precondition(format!(
                "p = {p} is not of the form 1+4a² (N_p = {}, n_q = {}); no hemisystem from this construction",
                record.n_p, record.n_q
            )));
        }
        Self::build_unchecked(p, cache_dir)
    }

    /// Builds the geometric data without the Landau gate (for experiments
    /// and negative fixtures).
    pub fn build_unchecked(p: u64, cache_dir: Option<&Path>) -> Result<Construction, Error> {
        let tower = Tower::new(p)?;
        let surface = SurfaceModel::build_with_cache(&tower, cache_dir)?;
        let plus = CurveTables::build(&tower, Sign::Plus, true)?;
        let minus = CurveTables::build(&tower, Sign::Minus, false)?;
        let cls = classify_generators(&surface, &plus, &minus)?;
        let orbits = orbit_decomposition(&tower, &surface, &cls.g1, &cls.g2)?;
        Ok(Construction { tower, surface, plus, minus, cls, orbits })
    }
}

/// (q³+1)(q+1)/2.
pub fn expected_hemisystem_size(t: &Tower) -> u64 {
    let q = t.p;
    (q * q * q + 1) * (q + 1) / 2
}

#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub min: u64,
    pub max: u64,
    pub mode: u64,
    pub points: u64,
}

impl Histogram {
    pub fn constant(&self, m: u64) -> bool {
        self.min == m && self.max == m
    }
}

/// Streaming incidence counter: one u8 per point rank of PG(3,q²).
///
/// The buffer is allocated once and reused across checks (it is the dominant
/// allocation at large p: (q⁶+q⁴+q²+1) bytes).
pub struct IncidenceChecker {
    buf: Vec<u8>,
}

impl IncidenceChecker {
    pub fn new(t: &Tower) -> Result<IncidenceChecker, Error> {
        let n = pg3_size(t);
        let n: usize = n
            .try_into()
            .map_err(|_| Error::ResourceLimit("PG(3,q²) rank space exceeds addressable memory".into()))?;
        Ok(IncidenceChecker { buf: vec![0u8; n] })
    }

    /// Counts, for every surface point, the number of the given lines through
    /// it; returns the histogram over surface points.
    pub fn histogram(
        &mut self,
        t: &Tower,
        surface: &SurfaceModel,
        lines: &[u32],
    ) -> Result<Histogram, Error> {
        self.buf.fill(0);
        for &li in lines {
            let line = &surface.generators[li as usize];
            line.for_each_point(t, |p| {
                let r = p.rank(t) as usize;
                self.buf[r] = self.buf[r].saturating_add(1);
            });
        }
        let mut min = u64::MAX;
        let mut max = 0u64;
        let mut counts = vec![0u64; 256];
        let mut points = 0u64;
        surface.for_each_point(|p| {
            let c = self.buf[p.rank(t) as usize] as u64;
            min = min.min(c);
            max = max.max(c);
            counts[c as usize] += 1;
            points += 1;
        });
        if points != surface.num_points {
            return Err(Error::Internal("surface point stream lost points".into()));
        }
        let mode = (0..256).max_by_key(|&c| counts[c]).unwrap_or(0) as u64;
        Ok(Histogram { min, max, mode, points })
    }

    /// m-regular-system check: every surface point on exactly m of the lines.
    pub fn verify_regular(
        &mut self,
        t: &Tower,
        surface: &SurfaceModel,
        lines: &[u32],
        m: u64,
    ) -> Result<(bool, Histogram), Error> {
        let h = self.histogram(t, surface, lines)?;
        Ok((h.constant(m), h))
    }

    /// The hemisystem half-conditions, streamed: with G = G1 ∪ G2 (all curve-meeting
    /// generators) and M = M1 ∪ M2, every surface point must satisfy
    /// #G-lines − 2·#M-lines = 0. At a rational curve point this is condition
    /// (A) (all q+1 generators meet the curve, so M must contribute (q+1)/2);
    /// off the curve it is condition (B) (M takes exactly half of the n_P
    /// curve-meeting generators).
    pub fn verify_half_conditions(
        &mut self,
        t: &Tower,
        surface: &SurfaceModel,
        cls: &GeneratorClassification,
        m_lines: &[u32],
    ) -> Result<(), Error> {
        self.buf.fill(0);
        let add = |buf: &mut [u8], line: &Line, delta: u8| {
            line.for_each_point(t, |p| {
                let r = p.rank(t) as usize;
                buf[r] = buf[r].wrapping_add(delta);
            });
        };
        for &gi in cls.g1.iter().chain(cls.g2.iter()) {
            add(&mut self.buf, &surface.generators[gi as usize], 1);
        }
        for &mi in m_lines {
            let line = &surface.generators[mi as usize];
            add(&mut self.buf, line, 0u8.wrapping_sub(2));
        }
        let mut ok = true;
        surface.for_each_point(|p| {
            if self.buf[p.rank(t) as usize] != 0 {
                ok = false;
            }
        });
        if !ok {
            return Err(Error::TheoremViolation(
                "half-conditions (A)/(B) fail at some surface point".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingOutcome {
    /// true = the orbit containing g₀⁺, false = the other one.
    pub m1_with_g0: bool,
    /// true = the orbit containing ℓ⁺, false = the one containing ℓ⁻.
    pub m2_with_ell_plus: bool,
    pub verified: bool,
}

pub struct Assembly {
    /// Sorted generator ids of S = M1 ∪ M2 ∪ ℋ.
    pub s: Vec<u32>,
    pub m1: Vec<u32>,
    pub m2: Vec<u32>,
    pub chords: Vec<u32>,
    pub r: u64,
    pub rprime: u64,
    /// +1 if S contains ℓ⁺'s orbit, −1 for ℓ⁻'s.
    pub ell_choice: i64,
    pub histogram: Histogram,
    /// Whether the r/r′ choice rule predicted the verified pairing.
    pub rule_matched: bool,
    pub pairings: Vec<PairingOutcome>,
}

/// Assembles the hemisystem by the choice rule and verifies it. When
/// `explore` is set, additionally verifies all four orbit pairings and
/// records the outcomes.
pub fn assemble(con: &Construction, explore: bool) -> Result<Assembly, Error> {
    let t = &con.tower;
    let ctx_p = TangentCaseContext::build(t, 1)?;
    let ctx_m = TangentCaseContext::build(t, -1)?;
    let id_of = |l: &Line| -> Result<u32, Error> {
        con.surface
            .generator_id(l)
            .ok_or_else(|| Error::Internal("fixture line is not a generator".into()))
    };
    let g0 = id_of(&ctx_p.g0)?;
    let ell_p = id_of(&ctx_p.ell)?;
    let ell_m = id_of(&ctx_m.ell)?;

    let in_m1 = con.orbits.m1.binary_search(&g0).is_ok();
    let m1: &[u32] = if in_m1 { &con.orbits.m1 } else { &con.orbits.m1p };
    let m1_other: &[u32] = if in_m1 { &con.orbits.m1p } else { &con.orbits.m1 };

    let (r, rprime) = count_r_rprime(t, &con.surface, &con.plus, &ctx_p, &con.orbits)?;
    if r == rprime {
        return Err(Error::TheoremViolation(
            "r = r′: the choice rule cannot select an ℓ-orbit (non-Landau behaviour)".into(),
        ));
    }
    let ell_choice: i64 = if r > rprime { 1 } else { -1 };
    let chosen_ell = if ell_choice == 1 { ell_p } else { ell_m };
    let ell_in_m2 = con.orbits.m2.binary_search(&chosen_ell).is_ok();
    let ell_in_m2p = con.orbits.m2p.binary_search(&chosen_ell).is_ok();
    if !ell_in_m2 && !ell_in_m2p {
        return Err(Error::Internal("chosen ℓ lies in neither G2 orbit".into()));
    }
    let m2: &[u32] = if ell_in_m2 { &con.orbits.m2 } else { &con.orbits.m2p };
    let m2_other: &[u32] = if ell_in_m2 { &con.orbits.m2p } else { &con.orbits.m2 };

    let m = (t.p + 1) / 2;
    let mut checker = IncidenceChecker::new(t)?;
    let union = |a: &[u32], b: &[u32]| -> Vec<u32> {
        let mut s: Vec<u32> = a
            .iter()
            .chain(b.iter())
            .chain(con.cls.chords.iter())
            .copied()
            .collect();
        s.sort_unstable();
        s
    };
    let s = union(m1, m2);
    if s.len() as u64 != expected_hemisystem_size(t) {
        return Err(Error::Internal(format!(
            "|S| = {} but (q³+1)(q+1)/2 = {}",
            s.len(),
            expected_hemisystem_size(t)
        )));
    }
    let (ok, histogram) = checker.verify_regular(t, &con.surface, &s, m)?;
    let mut pairings = vec![PairingOutcome {
        m1_with_g0: true,
        m2_with_ell_plus: ell_choice == 1,
        verified: ok,
    }];
    // Try the remaining pairings when asked for, or when the rule's own
    // pairing failed and a verified fallback is needed.
    let mut fallback: Option<(Vec<u32>, Vec<u32>, Vec<u32>, i64, Histogram)> = None;
    if explore || !ok {
        let alternates: [(&[u32], &[u32], bool, bool); 3] = [
            (m1, m2_other, true, ell_choice != 1),
            (m1_other, m2, false, ell_choice == 1),
            (m1_other, m2_other, false, ell_choice != 1),
        ];
        for (m1c, m2c, with_g0, ell_plus_here) in alternates {
            let cand = union(m1c, m2c);
            let (v, h) = checker.verify_regular(t, &con.surface, &cand, m)?;
            pairings.push(PairingOutcome {
                m1_with_g0: with_g0,
                m2_with_ell_plus: ell_plus_here,
                verified: v,
            });
            if v && fallback.is_none() {
                let choice = if ell_plus_here { 1 } else { -1 };
                fallback = Some((cand, m1c.to_vec(), m2c.to_vec(), choice, h));
            }
            if !explore && fallback.is_some() {
                break;
            }
        }
    }
    let (s, m1v, m2v, ell_choice, histogram, rule_matched) = if ok {
        (s, m1.to_vec(), m2.to_vec(), ell_choice, histogram, true)
    } else if let Some((cand, m1c, m2c, choice, h)) = fallback {
        (cand, m1c, m2c, choice, h, false)
    } else {
        return Err(Error::TheoremViolation(
            "no (M1,M2) orbit pairing yields a hemisystem".into(),
        ));
    };
    Ok(Assembly {
        s,
        m1: m1v,
        m2: m2v,
        chords: con.cls.chords.clone(),
        r,
        rprime,
        ell_choice,
        histogram,
        rule_matched,
        pairings,
    })
}

/// Every 𝔥-generator must fix S setwise; at least one 𝔊∖𝔥 element must map
/// M1 off itself (evidence that the index-2 choice is real).
pub struct InvarianceReport {
    pub fixed_by_h: bool,
    pub coset_moves_m1: bool,
}

pub fn verify_invariance(
    con: &Construction,
    assembly: &Assembly,
    extra_h_elements: Option<&[GroupElement]>,
) -> Result<InvarianceReport, Error> {
    let t = &con.tower;
    let s_keys: HashSet<u128> = assembly
        .s
        .iter()
        .map(|&i| con.surface.generators[i as usize].key(t))
        .collect();
    let stable = |g: &GroupElement| -> bool {
        assembly.s.iter().all(|&i| {
            s_keys.contains(&act_line(t, &g.m, &con.surface.generators[i as usize]).key(t))
        })
    };
    let gens = h_generators(t)?;
    for g in &gens {
        if !stable(g) {
            return Err(Error::TheoremViolation("an 𝔥-generator moves S".into()));
        }
    }
    if let Some(extra) = extra_h_elements {
        for g in extra {
            if !g.in_h {
                return Err(Error::Domain("extra element is not in 𝔥".into()));
            }
            if !stable(g) {
                return Err(Error::TheoremViolation("an 𝔥-element moves S".into()));
            }
        }
    }
    // a coset representative: the scaling generator with non-square det
    let coset = crate::group::group_generators(t)?
        .into_iter()
        .find(|g| !g.in_h)
        .ok_or_else(|| Error::Internal("no 𝔊∖𝔥 generator available".into()))?;
    let m1_keys: HashSet<u128> = assembly
        .m1
        .iter()
        .map(|&i| con.surface.generators[i as usize].key(t))
        .collect();
    let coset_moves_m1 = assembly.m1.iter().any(|&i| {
        !m1_keys.contains(&act_line(t, &coset.m, &con.surface.generators[i as usize]).key(t))
    });
    Ok(InvarianceReport { fixed_by_h: true, coset_moves_m1 })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HemisystemCertificate {
    pub format_version: u32,
    pub p: u64,
    pub size: u64,
    pub m1_size: u64,
    pub m2_size: u64,
    pub chord_size: u64,
    pub r: u64,
    pub rprime: u64,
    /// "ell+" or "ell-".
    pub ell_choice: String,
    pub histogram_min: u64,
    pub histogram_max: u64,
    pub histogram_mode: u64,
    /// |𝔥| = (q³−q)(q+1)/4.
    pub group_order: u64,
    pub verified: bool,
    /// Canonical line keys, lower-case hex, sorted.
    pub lines: Vec<String>,
    /// SHA-256 over the big-endian key bytes in sorted order.
    pub digest: String,
}

pub fn line_keys_digest(keys: &[u128]) -> String {
    let mut hasher = Sha256::new();
    for k in keys {
        hasher.update(k.to_be_bytes());
    }
    let mut out = String::new();
    for b in hasher.finalize() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn make_certificate(con: &Construction, assembly: &Assembly) -> HemisystemCertificate {
    let t = &con.tower;
    let mut keys: Vec<u128> = assembly
        .s
        .iter()
        .map(|&i| con.surface.generators[i as usize].key(t))
        .collect();
    keys.sort_unstable();
    HemisystemCertificate {
        format_version: crate::FORMAT_VERSION,
        p: t.p,
        size: assembly.s.len() as u64,
        m1_size: assembly.m1.len() as u64,
        m2_size: assembly.m2.len() as u64,
        chord_size: assembly.chords.len() as u64,
        r: assembly.r,
        rprime: assembly.rprime,
        ell_choice: if assembly.ell_choice == 1 { "ell+" } else { "ell-" }.to_string(),
        histogram_min: assembly.histogram.min,
        histogram_max: assembly.histogram.max,
        histogram_mode: assembly.histogram.mode,
        group_order: expected_group_order(t) / 2,
        verified: assembly.histogram.constant((t.p + 1) / 2),
        lines: keys.iter().map(|k| format!("{k:032x}")).collect(),
        digest: line_keys_digest(&keys),
    }
}

/// Reconstructs a line from its canonical key (two packed point keys).
pub fn line_from_key(t: &Tower, key: u128) -> Result<Line, Error> {
    let unpack_point = |k: u64| -> Result<Point4, Error> {
        let mut c = [crate::ff::Fq2::ZERO; 4];
        for i in 0..4 {
            let idx = (k >> (16 * i)) & 0xffff;
            if idx >= t.p * t.p {
                return Err(Error::Domain("point key coordinate out of range".into()));
            }
            c[i] = t.unidx2(idx);
        }
        Point4::new(t, c)
    };
    let p1 = unpack_point((key >> 64) as u64)?;
    let p2 = unpack_point(key as u64)?;
    let line = Line::from_span(t, p1, p2)?;
    if line.key(t) != key {
        return Err(Error::Domain("key does not round-trip through canonicalization".into()));
    }
    Ok(line)
}

/// Re-verifies a certificate from scratch: rebuilds the geometry, resolves
/// every line key, and re-runs the incidence check and digest.
pub fn verify_certificate(
    cert: &HemisystemCertificate,
    cache_dir: Option<&Path>,
) -> Result<Histogram, Error> {
    if cert.format_version != crate::FORMAT_VERSION {
        return Err(Error::Precondition(format!(
            "certificate format version {} (expected {})",
            cert.format_version,
            crate::FORMAT_VERSION
        )));
    }
    let t = Tower::new(cert.p)?;
    let surface = SurfaceModel::build_with_cache(&t, cache_dir)?;
    let mut keys = Vec::with_capacity(cert.lines.len());
    let mut ids = Vec::with_capacity(cert.lines.len());
    for s in &cert.lines {
        let k = u128::from_str_radix(s, 16)
            .map_err(|_| Error::Domain(format!("malformed line key {s:?}")))?;
        let line = line_from_key(&t, k)?;
        let id = surface
            .generator_id(&line)
            .ok_or_else(|| Error::Domain("certificate line is not a generator".into()))?;
        keys.push(k);
        ids.push(id);
    }
    keys.sort_unstable();
    if line_keys_digest(&keys) != cert.digest {
        return Err(Error::Domain("certificate digest mismatch".into()));
    }
    if ids.len() as u64 != cert.size || cert.size != expected_hemisystem_size(&t) {
        return Err(Error::Domain("certificate size mismatch".into()));
    }
    let mut checker = IncidenceChecker::new(&t)?;
    let (ok, hist) = checker.verify_regular(&t, &surface, &ids, (t.p + 1) / 2)?;
    if !ok {
        return Err(Error::TheoremViolation("certificate lines are not a hemisystem".into()));
    }
    Ok(hist)
}

/// CSV export: one line per generator, the 8 coordinate indices (idx2) of its
/// two canonical spanning points.
pub fn write_lines_csv(
    con: &Construction,
    lines: &[u32],
    mut w: impl IoWrite,
) -> Result<(), Error> {
    let t = &con.tower;
    writeln!(w, "p1c0,p1c1,p1c2,p1c3,p2c0,p2c1,p2c2,p2c3")?;
    for &i in lines {
        let l = &con.surface.generators[i as usize];
        let mut row = Vec::with_capacity(8);
        for p in [&l.r1, &l.r2] {
            for c in &p.0 {
                row.push(t.idx2(*c).to_string());
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
