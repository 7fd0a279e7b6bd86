//! Strongly regular graphs derived from a hemisystem: the Thas graph on the
//! generators off the hemisystem, and the Cayley graph on GF(q)⁶ built from
//! the two-intersection set.
//!
//! All spectral data is exact integer arithmetic: eigenvalues from the
//! quadratic x² − (λ−μ)x − (k−μ), multiplicities from the trace identities.
//! No floating point anywhere.

use std::collections::HashSet;
use std::io::Write as IoWrite;

use serde::Serialize;

use crate::ff::Tower;
use crate::hemi::{Assembly, Construction};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    pub theta1: i64,
    pub theta2: i64,
    pub m1: u64,
    pub m2: u64,
}

/// Integer square root; None if not a perfect square.
fn exact_isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    for c in r.saturating_sub(2)..=r + 2 {
        if c * c == n {
            return Some(c);
        }
    }
    None
}

/// Derives the (necessarily integral, here) spectrum from SRG parameters:
/// θ² = (λ−μ)θ + (k−μ), multiplicities from k + m1θ1 + m2θ2 = 0 and
/// 1 + m1 + m2 = v.
pub fn spectrum_from_params(p: &SrgParams) -> Result<Spectrum, Error> {
    let (v, k, la, mu) = (p.v as i128, p.k as i128, p.lambda as i128, p.mu as i128);
    let disc = (la - mu) * (la - mu) + 4 * (k - mu);
    let s = exact_isqrt(disc).ok_or_else(|| {
        Error::Domain("SRG discriminant is not a perfect square (conference case unsupported here)".into())
    })?;
    if ((la - mu) + s) % 2 != 0 {
        return Err(Error::Domain("non-integral SRG eigenvalues".into()));
    }
    let t1 = ((la - mu) + s) / 2;
    let t2 = ((la - mu) - s) / 2;
    if t1 == t2 {
        return Err(Error::Domain("degenerate spectrum".into()));
    }
    // k + m1·t1 + m2·t2 = 0, m1 + m2 = v − 1
    let num = -(k + (v - 1) * t2);
    if num % (t1 - t2) != 0 {
        return Err(Error::Domain("non-integral eigenvalue multiplicities".into()));
    }
    let m1 = num / (t1 - t2);
    let m2 = v - 1 - m1;
    if m1 < 0 || m2 < 0 {
        return Err(Error::Domain("negative eigenvalue multiplicity".into()));
    }
    // second trace identity: tr A² = vk
    if k * k + m1 * t1 * t1 + m2 * t2 * t2 != v * k {
        return Err(Error::Domain("trace identity tr A² = vk fails".into()));
    }
    Ok(Spectrum { theta1: t1 as i64, theta2: t2 as i64, m1: m1 as u64, m2: m2 as u64 })
}

/// k(k−λ−1) = μ(v−k−1).
pub fn parameter_identity(p: &SrgParams) -> bool {
    let (v, k, la, mu) = (p.v as i128, p.k as i128, p.lambda as i128, p.mu as i128);
    k * (k - la - 1) == mu * (v - k - 1)
}

/// Closed-form parameters of the graph on generators off an m-regular
/// system: ((q³+1)(q+1−m), (q²+1)(q−m), q−1−m, q²+1−m(q+1)).
pub fn off_system_params(q: u64, m: u64) -> Option<SrgParams> {
    let mu = (q * q + 1).checked_sub(m * (q + 1))?;
    let lambda = (q - 1).checked_sub(m)?;
    Some(SrgParams {
        v: (q * q * q + 1) * (q + 1 - m),
        k: (q * q + 1) * (q - m),
        lambda,
        mu,
    })
}

/// Thas graph parameters at m = (q+1)/2.
pub fn thas_params(q: u64) -> SrgParams {
    off_system_params(q, (q + 1) / 2).expect("m=(q+1)/2 parameters are integral for odd q ≥ 3")
}

/// Thas graph spectrum in closed form: θ₁ = q−1, θ₂ = (−q²+q−2)/2,
/// m₂ = (q²+1)(q−1) = 2k.
pub fn thas_spectrum(q: u64) -> Spectrum {
    let p = thas_params(q);
    let m2 = (q * q + 1) * (q - 1);
    Spectrum {
        theta1: (q - 1) as i64,
        theta2: -(((q * q - q + 2) / 2) as i64),
        m1: p.v - 1 - m2,
        m2,
    }
}

/// The counting identity behind Segre's theorem together with the parameter
/// identity admits exactly one regularity degree: over m ∈ {1..q}, returns
/// the m for which the off-system parameters satisfy k(k−λ−1) = μ(v−k−1)
/// and the counting identity m(q³+1) = (q+1)(m(q²+1)−(q²+1−μ)) + q²+1−μ.
pub fn admissible_regularity_degrees(q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for m in 1..=q {
        let p = match off_system_params(q, m) {
            Some(p) => p,
            None => continue,
        };
        let (q, m, mu) = (q as i128, m as i128, p.mu as i128);
        let x = q * q + 1 - mu;
        let counting = m * (q * q * q + 1) == (q + 1) * (m * (q * q + 1) - x) + x;
        if counting && parameter_identity(&p) {
            out.push(m as u64);
        }
    }
    out
}

/// Dense symmetric adjacency as packed bit rows.
pub struct BitGraph {
    pub n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitGraph {
    pub fn new(n: usize) -> BitGraph {
        let words = n.div_ceil(64);
        BitGraph { n, words, rows: vec![0u64; n * words] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert_ne!(u, v);
        self.rows[u * self.words + v / 64] |= 1u64 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1u64 << (u % 64);
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn degree(&self, u: usize) -> u64 {
        self.row(u).iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn common_neighbours(&self, u: usize, v: usize) -> u64 {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }
}

pub enum SrgInstance {
    Thas {
        graph: BitGraph,
        /// Vertex index → generator id.
        vertices: Vec<u32>,
        params: SrgParams,
        spectrum: Spectrum,
    },
    Cayley {
        q: u64,
        /// Difference set as packed vector keys (base-q digits, 6 coords).
        omega: Vec<u64>,
        /// Membership table over GF(q)⁶.
        member: Vec<bool>,
        params: SrgParams,
        spectrum: Spectrum,
    },
}

impl SrgInstance {
    pub fn params(&self) -> &SrgParams {
        match self {
            SrgInstance::Thas { params, .. } => params,
            SrgInstance::Cayley { params, .. } => params,
        }
    }

    pub fn spectrum(&self) -> &Spectrum {
        match self {
            SrgInstance::Thas { spectrum, .. } => spectrum,
            SrgInstance::Cayley { spectrum, .. } => spectrum,
        }
    }
}

const THAS_VERTEX_LIMIT: usize = 20_000;

/// Graph on the generators not in S; two vertices adjacent iff the lines
/// share a surface point.
pub fn build_thas_graph(con: &Construction, assembly: &Assembly) -> Result<SrgInstance, Error> {
    let t = &con.tower;
    if !assembly.histogram.constant((t.p + 1) / 2) {
        return Err(Error::Precondition("hemisystem is not verified".into()));
    }
    let in_s: HashSet<u32> = assembly.s.iter().copied().collect();
    let vertices: Vec<u32> = (0..con.surface.generators.len() as u32)
        .filter(|i| !in_s.contains(i))
        .collect();
    if vertices.len() > THAS_VERTEX_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "Thas graph with {} vertices exceeds the dense-adjacency budget",
            vertices.len()
        )));
    }
    let vid: std::collections::HashMap<u32, usize> =
        vertices.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut graph = BitGraph::new(vertices.len());
    // Two generators meet in at most one point, and any intersection point
    // lies on the surface: collect pencils per surface point.
    let mut pencils: std::collections::HashMap<u64, Vec<usize>> = std::collections::HashMap::new();
    for (i, &g) in vertices.iter().enumerate() {
        con.surface.generators[g as usize].for_each_point(t, |p| {
            pencils.entry(p.rank(t)).or_default().push(i);
        });
    }
    for bucket in pencils.values() {
        for (a, &u) in bucket.iter().enumerate() {
            for &v in &bucket[a + 1..] {
                graph.add_edge(u, v);
            }
        }
    }
    let _ = vid;
    let params = thas_params(t.p);
    let spectrum = thas_spectrum(t.p);
    if spectrum != spectrum_from_params(&params)? {
        return Err(Error::Internal("closed-form spectrum disagrees with parameters".into()));
    }
    Ok(SrgInstance::Thas { graph, vertices, params, spectrum })
}

fn vec_key(q: u64, v: &[u64; 6]) -> u64 {
    v.iter().rev().fold(0, |acc, &c| acc * q + c)
}

fn key_vec(q: u64, mut k: u64) -> [u64; 6] {
    let mut v = [0u64; 6];
    for c in v.iter_mut() {
        *c = k % q;
        k /= q;
    }
    v
}

/// Cayley graph on GF(q)⁶ with connection set Ω (packed keys).
/// Requires Ω = −Ω and 0 ∉ Ω. Parameters are the closed forms for the
/// hemisystem-derived set; verification recomputes λ and μ from scratch.
pub fn build_cayley_graph(t: &Tower, omega: &[u64]) -> Result<SrgInstance, Error> {
    let q = t.p;
    let n6 = q.pow(6);
    let mut member = vec![false; n6 as usize];
    for &w in omega {
        if w == 0 {
            return Err(Error::Domain("0 ∈ Ω".into()));
        }
        if w >= n6 {
            return Err(Error::Domain("Ω element out of range".into()));
        }
        member[w as usize] = true;
    }
    for &w in omega {
        let v = key_vec(q, w);
        let neg = vec_key(q, &v.map(|c| (q - c) % q));
        if !member[neg as usize] {
            return Err(Error::Domain("Ω ≠ −Ω".into()));
        }
    }
    let k = omega.len() as u64;
    if k == n6 - 1 {
        return Err(Error::Domain("Ω is all nonzero vectors: complete graph, not an SRG".into()));
    }
    if k == 0 {
        return Err(Error::Domain("Ω is empty".into()));
    }
    let params = cayley_params(q)?;
    if params.k != k {
        return Err(Error::Domain(format!(
            "|Ω| = {k} but the hemisystem-derived degree is {}",
            params.k
        )));
    }
    let spectrum = spectrum_from_params(&params)?;
    Ok(SrgInstance::Cayley { q, omega: omega.to_vec(), member, params, spectrum })
}

/// Closed-form Cayley parameters from the two weights: with n = (q³+1)(q+1)/2
/// points and weights w₁ = q²(q²−1)/2, w₂ = q²(q²+1)/2, the restriction
/// eigenvalues are θᵢ = n(q−1) − q·wᵢ, so θ₁ = (q²−1)/2 and
/// θ₂ = (q²−2q³−1)/2, whence μ = k + θ₁θ₂ and λ = μ + θ₁ + θ₂.
pub fn cayley_params(q: u64) -> Result<SrgParams, Error> {
    let qi = q as i128;
    let n = (qi * qi * qi + 1) * (qi + 1) / 2;
    let k = n * (qi - 1);
    let t1 = (qi * qi - 1) / 2;
    let t2 = (qi * qi - 2 * qi * qi * qi - 1) / 2;
    let mu = k + t1 * t2;
    let la = mu + t1 + t2;
    if la < 0 || mu < 0 {
        return Err(Error::Domain("Cayley parameters not realizable".into()));
    }
    Ok(SrgParams { v: qi.pow(6) as u64, k: k as u64, lambda: la as u64, mu: mu as u64 })
}

/// Full SRG verification; on failure the error message carries a witness.
pub fn verify_srg(inst: &SrgInstance) -> Result<(), Error> {
    let p = *inst.params();
    if p.k == p.v - 1 {
        return Err(Error::Domain("complete graph: μ is undefined, not an SRG".into()));
    }
    if !parameter_identity(&p) {
        return Err(Error::TheoremViolation(format!(
            "k(k−λ−1) ≠ μ(v−k−1) for {p:?}"
        )));
    }
    let spec = spectrum_from_params(&p)?;
    if spec != *inst.spectrum() {
        return Err(Error::TheoremViolation("claimed spectrum disagrees with parameters".into()));
    }
    match inst {
        SrgInstance::Thas { graph, .. } => {
            if graph.n as u64 != p.v {
                return Err(Error::TheoremViolation("vertex count ≠ v".into()));
            }
            for u in 0..graph.n {
                if graph.adjacent(u, u) {
                    return Err(Error::TheoremViolation(format!("loop at vertex {u}")));
                }
                if graph.degree(u) != p.k {
                    return Err(Error::TheoremViolation(format!(
                        "vertex {u} has degree {} ≠ k = {}",
                        graph.degree(u),
                        p.k
                    )));
                }
            }
            for u in 0..graph.n {
                for v in u + 1..graph.n {
                    let c = graph.common_neighbours(u, v);
                    let want = if graph.adjacent(u, v) { p.lambda } else { p.mu };
                    if c != want {
                        return Err(Error::TheoremViolation(format!(
                            "pair ({u},{v}): {c} common neighbours, expected {want}"
                        )));
                    }
                }
            }
        }
        SrgInstance::Cayley { q, omega, member, .. } => {
            let n6 = q.pow(6);
            if n6 != p.v {
                return Err(Error::TheoremViolation("vertex count ≠ v".into()));
            }
            // vertex-transitivity: counting |Ω ∩ (v+Ω)| through zero suffices
            for x in 1..n6 {
                let xv = key_vec(*q, x);
                let mut c = 0u64;
                for &w in omega {
                    let wv = key_vec(*q, w);
                    let mut s = [0u64; 6];
                    for i in 0..6 {
                        s[i] = (xv[i] + wv[i]) % q;
                    }
                    if member[vec_key(*q, &s) as usize] {
                        c += 1;
                    }
                }
                let want = if member[x as usize] { p.lambda } else { p.mu };
                if c != want {
                    return Err(Error::TheoremViolation(format!(
                        "vertex key {x}: |Ω ∩ (x+Ω)| = {c}, expected {want}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Direct neighbourhood-intersection count for a vertex pair of the Cayley
/// graph (oracle cross-check for the translation trick).
pub fn cayley_common_neighbours_direct(q: u64, member: &[bool], x: u64, y: u64) -> u64 {
    let xv = key_vec(q, x);
    let yv = key_vec(q, y);
    let n6 = q.pow(6);
    let mut c = 0;
    for z in 0..n6 {
        let zv = key_vec(q, z);
        let mut dx = [0u64; 6];
        let mut dy = [0u64; 6];
        for i in 0..6 {
            dx[i] = (zv[i] + q - xv[i]) % q;
            dy[i] = (zv[i] + q - yv[i]) % q;
        }
        if member[vec_key(q, &dx) as usize] && member[vec_key(q, &dy) as usize] {
            c += 1;
        }
    }
    c
}

#[derive(Serialize)]
pub struct SrgCertificate {
    pub format_version: u32,
    pub kind: String,
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
    pub theta1: i64,
    pub theta2: i64,
    pub m1: u64,
    pub m2: u64,
    pub verified: bool,
}

pub fn make_srg_certificate(inst: &SrgInstance, verified: bool) -> SrgCertificate {
    let p = inst.params();
    let s = inst.spectrum();
    SrgCertificate {
        format_version: crate::FORMAT_VERSION,
        kind: match inst {
            SrgInstance::Thas { .. } => "thas".into(),
            SrgInstance::Cayley { .. } => "cayley".into(),
        },
        v: p.v,
        k: p.k,
        lambda: p.lambda,
        mu: p.mu,
        theta1: s.theta1,
        theta2: s.theta2,
        m1: s.m1,
        m2: s.m2,
        verified,
    }
}

/// Sparse edge-list export (u,v) with u < v, vertex labels = generator ids
/// for the Thas graph.
pub fn write_edge_list(inst: &SrgInstance, mut w: impl IoWrite) -> Result<(), Error> {
    match inst {
        SrgInstance::Thas { graph, vertices, .. } => {
            writeln!(w, "u,v")?;
            for u in 0..graph.n {
                for v in u + 1..graph.n {
                    if graph.adjacent(u, v) {
                        writeln!(w, "{},{}", vertices[u], vertices[v])?;
                    }
                }
            }
        }
        SrgInstance::Cayley { .. } => {
            return Err(Error::Precondition(
                "Cayley graphs are kept in difference-set form; no dense edge list".into(),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hemi::assemble;

    #[test]
    fn closed_form_parameters() {
        assert_eq!(
            thas_params(5),
            SrgParams { v: 378, k: 52, lambda: 1, mu: 8 }
        );
        let s = thas_spectrum(5);
        assert_eq!((s.theta1, s.theta2, s.m1, s.m2), (4, -11, 273, 104));
        assert_eq!(spectrum_from_params(&thas_params(5)).unwrap(), s);
        // p = 37 parameters are integral and consistent
        let p37 = thas_params(37);
        assert_eq!(p37, SrgParams { v: 962_426, k: 24_660, lambda: 17, mu: 648 });
        assert_eq!(spectrum_from_params(&p37).unwrap(), thas_spectrum(37));
    }

    #[test]
    fn segre_admissible_degree_is_unique() {
        for q in [5u64, 13, 37, 101] {
            assert_eq!(admissible_regularity_degrees(q), vec![(q + 1) / 2], "q = {q}");
        }
    }

    #[test]
    fn thas_graph_p5() {
        let con = Construction::build(5, None).unwrap();
        let a = assemble(&con, false).unwrap();
        let inst = build_thas_graph(&con, &a).unwrap();
        verify_srg(&inst).unwrap();
        assert_eq!(
            *inst.params(),
            SrgParams { v: 378, k: 52, lambda: 1, mu: 8 }
        );
    }

    #[test]
    fn k4_is_rejected() {
        let mut graph = BitGraph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                graph.add_edge(u, v);
            }
        }
        let inst = SrgInstance::Thas {
            graph,
            vertices: vec![0, 1, 2, 3],
            params: SrgParams { v: 4, k: 3, lambda: 2, mu: 0 },
            spectrum: Spectrum { theta1: 0, theta2: 0, m1: 0, m2: 0 },
        };
        assert!(matches!(verify_srg(&inst), Err(Error::Domain(_))));
    }

    #[test]
    fn cayley_params_p5() {
        let p = cayley_params(5).unwrap();
        assert_eq!(p.v, 15625);
        assert_eq!(p.k, 1512);
        assert_eq!(p.mu, 156);
        assert!(parameter_identity(&p));
        let s = spectrum_from_params(&p).unwrap();
        assert_eq!((s.theta1, s.theta2), (12, -113));
        assert_eq!(p.lambda as i64, p.mu as i64 + s.theta1 + s.theta2);
    }

    #[test]
    fn cayley_rejects_bad_omega() {
        let t = Tower::new(5).unwrap();
        // contains 0
        assert!(build_cayley_graph(&t, &[0]).is_err());
        // not symmetric
        assert!(build_cayley_graph(&t, &[1]).is_err());
    }
}
