//! Arithmetic for the field tower GF(p) ⊂ GF(p²) ⊂ GF(p⁴).
//!
//! GF(p²) is realised as GF(p)[t]/(t² − n) with n the least quadratic
//! non-residue mod p, and GF(p⁴) as GF(p²)[s]/(s² − β) with β the least
//! (lexicographically, by (a0, a1)) non-square of GF(p²). Both moduli are
//! deterministic functions of p, so element encodings are stable across runs.
//!
//! All elements are plain reduced residues; every operation goes through a
//! [`Tower`], which carries the moduli and the distinguished constants h
//! (a square root of 2, present for p ≡ 5 mod 8) and α = h^((q−1)/2).

use crate::Error;

/// Element of GF(p), reduced residue in `[0, p)`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fp(pub u64);

/// Element a0 + a1·t of GF(p²), with t² = n.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fq2 {
    pub a0: u64,
    pub a1: u64,
}

/// Element b0 + b1·s of GF(p⁴), with s² = β.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fq4 {
    pub b0: Fq2,
    pub b1: Fq2,
}

impl Fq2 {
    pub const ZERO: Fq2 = Fq2 { a0: 0, a1: 0 };
    pub const ONE: Fq2 = Fq2 { a0: 1, a1: 0 };

    pub fn is_zero(&self) -> bool {
        self.a0 == 0 && self.a1 == 0
    }

    /// True when the element lies in the base field GF(p).
    pub fn in_base(&self) -> bool {
        self.a1 == 0
    }
}

impl Fq4 {
    pub const ZERO: Fq4 = Fq4 { b0: Fq2::ZERO, b1: Fq2::ZERO };

    pub fn is_zero(&self) -> bool {
        self.b0.is_zero() && self.b1.is_zero()
    }

    /// True when the element lies in GF(p²).
    pub fn in_quadratic(&self) -> bool {
        self.b1.is_zero()
    }
}

/// Deterministic description of the tower for a fixed prime p ≡ 1 (mod 4).
#[derive(Clone, Debug)]
pub struct Tower {
    pub p: u64,
    /// Least quadratic non-residue mod p; t² = n.
    pub n: u64,
    /// Least non-square of GF(p²); s² = β.
    pub beta: Fq2,
    /// Canonical square root of 2 in GF(p²) (p ≡ 5 mod 8 only).
    pub h: Option<Fq2>,
    /// α = h^((q−1)/2); satisfies α² = −1 and lies in GF(p).
    pub alpha: Option<Fq2>,
    /// β^((q−1)/2), used to apply Frobenius x ↦ x^q on GF(p⁴).
    frob4_scale: Fq2,
    /// Lemire fastmod magic: ⌊2⁶⁴/p⌋ + 1.
    magic: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Tower {
    pub fn new(p: u64) -> Result<Tower, Error> {
        if !is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if p % 4 != 1 {
            return Err(Error::Config(format!("{p} is not 1 mod 4")));
        }
        if p > 65_535 {
            return Err(Error::ResourceLimit(format!("p = {p} beyond supported bound")));
        }
        let magic = (u64::MAX / p) + 1;
        let mut t = Tower {
            p,
            n: 0,
            beta: Fq2::ZERO,
            h: None,
            alpha: None,
            frob4_scale: Fq2::ONE,
            magic,
        };
        // Least non-residue of GF(p).
        t.n = (2..p)
            .find(|&n| t.legendre(Fp(n)) == -1)
            .expect("odd prime has a non-residue");
        // Least non-square of GF(p²) in (a0, a1) lexicographic order. The
        // first candidate after the squares 0..: in practice this is t itself,
        // but we scan to keep the choice rule honest.
        'outer: for a0 in 0..p {
            for a1 in 0..p {
                let x = Fq2 { a0, a1 };
                if !x.is_zero() && !t.is_square2(x) {
                    t.beta = x;
                    break 'outer;
                }
            }
        }
        assert!(!t.beta.is_zero(), "GF(p²) has non-squares");
        t.frob4_scale = t.pow2(t.beta, (p - 1) / 2);
        if p % 8 == 5 {
            // 2 is a non-residue mod p, so its roots live in GF(p²) \ GF(p).
            let two = Fq2 { a0: 2, a1: 0 };
            let h = t.sqrt2(two).ok_or_else(|| {
                Error::Config(format!("2 unexpectedly a square in GF({p}²)"))
            })?;
            let alpha = t.pow2(h, (p - 1) / 2);
            debug_assert_eq!(t.mul2(alpha, alpha), t.neg2(Fq2::ONE));
            debug_assert!(alpha.in_base());
            t.h = Some(h);
            t.alpha = Some(alpha);
        }
        Ok(t)
    }

    pub fn q(&self) -> u64 {
        self.p
    }

    /// Canonical square root of 2; errors when p ≢ 5 (mod 8).
    pub fn h(&self) -> Result<Fq2, Error> {
        self.h
            .ok_or_else(|| Error::Config(format!("h requested but p = {} is not 5 mod 8", self.p)))
    }

    pub fn alpha(&self) -> Result<Fq2, Error> {
        self.alpha
            .ok_or_else(|| Error::Config(format!("alpha requested but p = {} is not 5 mod 8", self.p)))
    }

    #[inline(always)]
    fn modp(&self, r: u64) -> u64 {
        // Lemire fastmod; valid since all products stay below 2³².
        debug_assert!(r < 1 << 32);
        let low = self.magic.wrapping_mul(r);
        ((low as u128 * self.p as u128) >> 64) as u64
    }

    // ---- GF(p) ----

    #[inline(always)]
    pub fn addp(&self, a: Fp, b: Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline(always)]
    pub fn subp(&self, a: Fp, b: Fp) -> Fp {
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline(always)]
    pub fn mulp(&self, a: Fp, b: Fp) -> Fp {
        Fp(self.modp(a.0 * b.0))
    }

    #[inline(always)]
    pub fn negp(&self, a: Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    pub fn powp(&self, a: Fp, mut e: u64) -> Fp {
        let mut base = a;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulp(acc, base);
            }
            base = self.mulp(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn invp(&self, a: Fp) -> Result<Fp, Error> {
        if a.0 == 0 {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.powp(a, self.p - 2))
    }

    /// Legendre symbol: 0, 1 or −1.
    pub fn legendre(&self, a: Fp) -> i32 {
        if a.0 == 0 {
            return 0;
        }
        let e = self.powp(a, (self.p - 1) / 2);
        if e.0 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn is_squarep(&self, a: Fp) -> bool {
        self.legendre(a) >= 0
    }

    /// Canonical (least) square root in GF(p), if any.
    pub fn sqrtp(&self, a: Fp) -> Option<Fp> {
        if a.0 == 0 {
            return Some(Fp(0));
        }
        if self.legendre(a) == -1 {
            return None;
        }
        let r = if self.p < 4096 {
            (0..self.p).map(Fp).find(|&y| self.mulp(y, y) == a).unwrap()
        } else {
            self.tonelli_shanks_p(a)
        };
        Some(r.min(self.negp(r)))
    }

    fn tonelli_shanks_p(&self, a: Fp) -> Fp {
        let p = self.p;
        let mut qd = p - 1;
        let mut s = 0;
        while qd % 2 == 0 {
            qd /= 2;
            s += 1;
        }
        let z = Fp(self.n); // non-residue
        let mut m = s;
        let mut c = self.powp(z, qd);
        let mut t = self.powp(a, qd);
        let mut r = self.powp(a, (qd + 1) / 2);
        while t.0 != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt.0 != 1 {
                tt = self.mulp(tt, tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = self.mulp(b, b);
            }
            m = i;
            c = self.mulp(b, b);
            t = self.mulp(t, c);
            r = self.mulp(r, b);
        }
        r
    }

    // ---- GF(p²) ----

    pub fn embed(&self, a: Fp) -> Fq2 {
        Fq2 { a0: a.0, a1: 0 }
    }

    pub fn int2(&self, c: i64) -> Fq2 {
        let p = self.p as i64;
        Fq2 { a0: (((c % p) + p) % p) as u64, a1: 0 }
    }

    #[inline(always)]
    pub fn add2(&self, a: Fq2, b: Fq2) -> Fq2 {
        Fq2 {
            a0: self.addp(Fp(a.a0), Fp(b.a0)).0,
            a1: self.addp(Fp(a.a1), Fp(b.a1)).0,
        }
    }

    #[inline(always)]
    pub fn sub2(&self, a: Fq2, b: Fq2) -> Fq2 {
        Fq2 {
            a0: self.subp(Fp(a.a0), Fp(b.a0)).0,
            a1: self.subp(Fp(a.a1), Fp(b.a1)).0,
        }
    }

    #[inline(always)]
    pub fn neg2(&self, a: Fq2) -> Fq2 {
        Fq2 {
            a0: self.negp(Fp(a.a0)).0,
            a1: self.negp(Fp(a.a1)).0,
        }
    }

    #[inline(always)]
    pub fn mul2(&self, a: Fq2, b: Fq2) -> Fq2 {
        // (a0 + a1 t)(b0 + b1 t) = a0 b0 + n a1 b1 + (a0 b1 + a1 b0) t
        let x = self.modp(a.a0 * b.a0) + self.modp(self.modp(a.a1 * b.a1) * self.n);
        let y = self.modp(a.a0 * b.a1) + self.modp(a.a1 * b.a0);
        Fq2 {
            a0: if x >= self.p { x - self.p } else { x },
            a1: if y >= self.p { y - self.p } else { y },
        }
    }

    #[inline(always)]
    pub fn scale2(&self, a: Fq2, c: Fp) -> Fq2 {
        Fq2 {
            a0: self.modp(a.a0 * c.0),
            a1: self.modp(a.a1 * c.0),
        }
    }

    pub fn pow2(&self, a: Fq2, mut e: u64) -> Fq2 {
        let mut base = a;
        let mut acc = Fq2::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul2(acc, base);
            }
            base = self.mul2(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius x ↦ x^q on GF(p²): conjugation a0 − a1 t.
    #[inline(always)]
    pub fn frob2(&self, a: Fq2) -> Fq2 {
        Fq2 {
            a0: a.a0,
            a1: self.negp(Fp(a.a1)).0,
        }
    }

    /// Norm to GF(p): x^(q+1).
    pub fn norm2(&self, a: Fq2) -> Fp {
        // (a0 + a1 t)(a0 − a1 t) = a0² − n a1²
        self.subp(
            self.mulp(Fp(a.a0), Fp(a.a0)),
            self.mulp(Fp(self.n), self.mulp(Fp(a.a1), Fp(a.a1))),
        )
    }

    /// Trace to GF(p): x + x^q.
    pub fn trace2(&self, a: Fq2) -> Fp {
        self.addp(Fp(a.a0), Fp(a.a0))
    }

    pub fn inv2(&self, a: Fq2) -> Result<Fq2, Error> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let ninv = self.invp(self.norm2(a))?;
        Ok(self.scale2(self.frob2(a), ninv))
    }

    pub fn is_square2(&self, a: Fq2) -> bool {
        if a.is_zero() {
            return true;
        }
        // x is a square iff N(x) = x^(q+1) is a square in GF(p), since the
        // norm halves the exponent structure of the cyclic group.
        self.legendre(self.norm2(a)) == 1
    }

    /// Canonical (lexicographically least) square root in GF(p²), if any.
    pub fn sqrt2(&self, a: Fq2) -> Option<Fq2> {
        if a.is_zero() {
            return Some(Fq2::ZERO);
        }
        if !self.is_square2(a) {
            return None;
        }
        let r = if self.p * self.p < 4096 {
            let mut found = None;
            'scan: for a0 in 0..self.p {
                for a1 in 0..self.p {
                    let y = Fq2 { a0, a1 };
                    if self.mul2(y, y) == a {
                        found = Some(y);
                        break 'scan;
                    }
                }
            }
            found.unwrap()
        } else {
            self.tonelli_shanks_2(a)
        };
        Some(r.min(self.neg2(r)))
    }

    fn tonelli_shanks_2(&self, a: Fq2) -> Fq2 {
        let order = self.p * self.p - 1;
        let mut qd = order;
        let mut s = 0;
        while qd % 2 == 0 {
            qd /= 2;
            s += 1;
        }
        let z = self.beta; // non-square of GF(p²)
        let one = Fq2::ONE;
        let mut m = s;
        let mut c = self.pow2(z, qd);
        let mut t = self.pow2(a, qd);
        let mut r = self.pow2(a, (qd + 1) / 2);
        while t != one {
            let mut i = 0;
            let mut tt = t;
            while tt != one {
                tt = self.mul2(tt, tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = self.mul2(b, b);
            }
            m = i;
            c = self.mul2(b, b);
            t = self.mul2(t, c);
            r = self.mul2(r, b);
        }
        r
    }

    /// Packed index of an Fq2 element: a0 + a1·p, in `[0, p²)`.
    #[inline(always)]
    pub fn idx2(&self, a: Fq2) -> u64 {
        a.a0 + a.a1 * self.p
    }

    pub fn unidx2(&self, i: u64) -> Fq2 {
        Fq2 { a0: i % self.p, a1: i / self.p }
    }

    /// All elements of GF(p²) in index order.
    pub fn all2(&self) -> impl Iterator<Item = Fq2> + '_ {
        (0..self.p * self.p).map(|i| self.unidx2(i))
    }

    // ---- GF(p⁴) ----

    pub fn lift4(&self, a: Fq2) -> Fq4 {
        Fq4 { b0: a, b1: Fq2::ZERO }
    }

    #[inline(always)]
    pub fn add4(&self, a: Fq4, b: Fq4) -> Fq4 {
        Fq4 {
            b0: self.add2(a.b0, b.b0),
            b1: self.add2(a.b1, b.b1),
        }
    }

    #[inline(always)]
    pub fn sub4(&self, a: Fq4, b: Fq4) -> Fq4 {
        Fq4 {
            b0: self.sub2(a.b0, b.b0),
            b1: self.sub2(a.b1, b.b1),
        }
    }

    #[inline(always)]
    pub fn neg4(&self, a: Fq4) -> Fq4 {
        Fq4 {
            b0: self.neg2(a.b0),
            b1: self.neg2(a.b1),
        }
    }

    #[inline(always)]
    pub fn mul4(&self, a: Fq4, b: Fq4) -> Fq4 {
        Fq4 {
            b0: self.add2(self.mul2(a.b0, b.b0), self.mul2(self.beta, self.mul2(a.b1, b.b1))),
            b1: self.add2(self.mul2(a.b0, b.b1), self.mul2(a.b1, b.b0)),
        }
    }

    pub fn pow4(&self, a: Fq4, mut e: u64) -> Fq4 {
        let mut base = a;
        let mut acc = self.lift4(Fq2::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul4(acc, base);
            }
            base = self.mul4(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius x ↦ x^q on GF(p⁴).
    pub fn frob4(&self, a: Fq4) -> Fq4 {
        Fq4 {
            b0: self.frob2(a.b0),
            b1: self.mul2(self.frob2(a.b1), self.frob4_scale),
        }
    }

    /// Frobenius x ↦ x^(q²) on GF(p⁴): b0 − b1 s.
    #[inline(always)]
    pub fn frob4_sq(&self, a: Fq4) -> Fq4 {
        Fq4 {
            b0: a.b0,
            b1: self.neg2(a.b1),
        }
    }

    /// Norm GF(p⁴) → GF(p²): x^(q²+1).
    pub fn norm4(&self, a: Fq4) -> Fq2 {
        self.sub2(
            self.mul2(a.b0, a.b0),
            self.mul2(self.beta, self.mul2(a.b1, a.b1)),
        )
    }

    /// Trace GF(p⁴) → GF(p): x + x^q + x^(q²) + x^(q³).
    pub fn trace4_to_base(&self, a: Fq4) -> Fp {
        let mut acc = a;
        let mut x = a;
        for _ in 0..3 {
            x = self.frob4(x);
            acc = self.add4(acc, x);
        }
        debug_assert!(acc.b1.is_zero() && acc.b0.a1 == 0);
        Fp(acc.b0.a0)
    }

    pub fn inv4(&self, a: Fq4) -> Result<Fq4, Error> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let n = self.norm4(a); // (b0 + b1 s)(b0 − b1 s)
        let ninv = self.inv2(n)?;
        Ok(Fq4 {
            b0: self.mul2(a.b0, ninv),
            b1: self.mul2(self.neg2(a.b1), ninv),
        })
    }

    /// Packed index of an Fq4 element, in `[0, p⁴)`.
    pub fn idx4(&self, a: Fq4) -> u64 {
        let q2 = self.p * self.p;
        self.idx2(a.b0) + self.idx2(a.b1) * q2
    }

    pub fn unidx4(&self, i: u64) -> Fq4 {
        let q2 = self.p * self.p;
        Fq4 {
            b0: self.unidx2(i % q2),
            b1: self.unidx2(i / q2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_p5() {
        let t = Tower::new(5).unwrap();
        assert_eq!(t.n, 2, "least non-residue mod 5");
        let h = t.h().unwrap();
        assert_eq!(h, Fq2 { a0: 0, a1: 1 }, "h = t since t² = 2");
        assert_eq!(t.mul2(h, h), Fq2 { a0: 2, a1: 0 });
        // α = h² = 2 here, α² = 4 = −1 mod 5
        let alpha = t.alpha().unwrap();
        assert_eq!(alpha, Fq2 { a0: 2, a1: 0 });
        assert_eq!(t.mul2(alpha, alpha), t.int2(-1));
        // h^q + h = 0
        assert_eq!(t.add2(t.frob2(h), h), Fq2::ZERO);
        // h^(q+1) = −2
        assert_eq!(t.embed(t.norm2(h)), t.int2(-2));
    }

    #[test]
    fn tower_p37_and_p101() {
        for p in [37u64, 101] {
            let t = Tower::new(p).unwrap();
            assert_eq!(t.n, 2, "2 is the least non-residue for p ≡ 5 mod 8");
            let h = t.h().unwrap();
            assert_eq!(t.mul2(h, h), t.int2(2));
            assert_eq!(t.add2(t.frob2(h), h), Fq2::ZERO);
            let alpha = t.alpha().unwrap();
            assert!(alpha.in_base());
            assert_eq!(t.mul2(alpha, alpha), t.int2(-1));
            assert_eq!(t.pow2(h, (p - 1) / 2), alpha);
        }
    }

    #[test]
    fn tower_rejects_bad_p() {
        assert!(Tower::new(4).is_err());
        assert!(Tower::new(7).is_err(), "7 ≡ 3 mod 4");
        assert!(Tower::new(15).is_err());
    }

    #[test]
    fn euler_criterion_p37() {
        let t = Tower::new(37).unwrap();
        assert_eq!(t.powp(Fp(2), 18), Fp(36), "2^18 = −1 mod 37");
    }

    #[test]
    fn squares_mod_5() {
        let t = Tower::new(5).unwrap();
        assert!(!t.is_squarep(Fp(2)));
        assert!(t.is_squarep(Fp(0)));
        assert_eq!(t.sqrtp(Fp(0)), Some(Fp(0)));
        assert_eq!(t.sqrtp(Fp(4)), Some(Fp(2)), "canonical root is the least");
        // 2 is a square in GF(25) with canonical root h
        let r = t.sqrt2(t.int2(2)).unwrap();
        assert_eq!(r, t.h().unwrap());
    }

    #[test]
    fn square_counts() {
        for p in [5u64, 13, 37] {
            let t = Tower::new(p).unwrap();
            let base_nonsq = (1..p).filter(|&x| !t.is_squarep(Fp(x))).count() as u64;
            assert_eq!(base_nonsq, (p - 1) / 2);
            let ext_nonsq = t.all2().filter(|&x| !x.is_zero() && !t.is_square2(x)).count() as u64;
            assert_eq!(ext_nonsq, (p * p - 1) / 2);
        }
    }

    #[test]
    fn frobenius_properties() {
        let t = Tower::new(13).unwrap();
        let mut state = 11u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        for _ in 0..1000 {
            let x = t.unidx4(next() % (13u64.pow(4)));
            let y = t.unidx4(next() % (13u64.pow(4)));
            // automorphism
            assert_eq!(t.frob4(t.mul4(x, y)), t.mul4(t.frob4(x), t.frob4(y)));
            // x^q computed by frob4 equals pow
            assert_eq!(t.frob4(x), t.pow4(x, 13));
            // involution at level q²
            assert_eq!(t.frob4_sq(t.frob4_sq(x)), x);
        }
        // base field fixed
        for v in 0..13 {
            let x = t.lift4(t.int2(v));
            assert_eq!(t.frob4(x), x);
        }
    }

    #[test]
    fn field_axioms_randomized() {
        for p in [5u64, 37] {
            let t = Tower::new(p).unwrap();
            let q4 = p * p * p * p;
            let mut state = p;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state >> 16
            };
            for _ in 0..1000 {
                let a = t.unidx4(next() % q4);
                let b = t.unidx4(next() % q4);
                let c = t.unidx4(next() % q4);
                assert_eq!(t.mul4(a, t.add4(b, c)), t.add4(t.mul4(a, b), t.mul4(a, c)));
                assert_eq!(t.mul4(a, b), t.mul4(b, a));
                assert_eq!(t.mul4(t.mul4(a, b), c), t.mul4(a, t.mul4(b, c)));
                if !a.is_zero() {
                    let inv = t.inv4(a).unwrap();
                    assert_eq!(t.mul4(a, inv), t.lift4(Fq2::ONE));
                }
            }
        }
    }

    #[test]
    fn norms_and_traces() {
        let t = Tower::new(5).unwrap();
        let h = t.h().unwrap();
        assert_eq!(t.norm2(h), Fp(3), "norm(h) = −2");
        for c in 0..5 {
            assert_eq!(t.trace2(t.int2(c as i64)), t.mulp(Fp(2), Fp(c)));
        }
        assert!(t.invp(Fp(0)).is_err());
        assert!(t.inv2(Fq2::ZERO).is_err());
    }
}
