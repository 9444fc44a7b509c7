//! Exact arithmetic in prime fields GF(p) and small extensions GF(p^e).
//!
//! A [`FieldParams`] value is the field itself: it carries the prime p, the
//! extension degree e and, for e > 1, a monic irreducible modulus of degree e.
//! Elements are plain reduced residue tuples; all operations go through the
//! field object. Prime fields are the workhorse of the constructions;
//! extensions (e <= 4) exist for point-count diagnostics over towers of the
//! base field.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest extension degree supported by [`FieldElement`]'s inline storage.
pub const MAX_EXT_DEGREE: usize = 4;

/// Largest prime accepted; keeps every product p * p inside u64 headroom
/// used by the lazy-reduction elimination kernels.
pub const MAX_PRIME: u64 = 1 << 20;

/// Parameters of a finite field GF(p^e).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    p: u64,
    e: usize,
    /// Monic irreducible modulus of degree e over GF(p), constant term first
    /// (length e + 1). Present iff e > 1.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    modulus: Option<Vec<u64>>,
}

/// An element of GF(p^e): e residues in [0, p), little-endian in the
/// generator (so index 0 is the constant coefficient). Unused slots are zero.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement {
    c: [u64; MAX_EXT_DEGREE],
}

impl std::fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fe{:?}", self.c)
    }
}

impl FieldElement {
    pub(crate) fn from_array(c: [u64; MAX_EXT_DEGREE]) -> Self {
        FieldElement { c }
    }

    /// Residues c_0..c_{e-1}; slots past the extension degree are zero.
    pub fn residues(&self, e: usize) -> &[u64] {
        &self.c[..e]
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; MAX_EXT_DEGREE]
    }

    /// The residue of a prime-field element.
    pub fn residue(&self) -> u64 {
        self.c[0]
    }
}

impl FieldParams {
    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::invalid(format!(
                "prime {p} exceeds supported bound {MAX_PRIME}"
            )));
        }
        Ok(FieldParams {
            p,
            e: 1,
            modulus: None,
        })
    }

    /// GF(p^e) with the deterministic (lexicographically least) irreducible modulus.
    pub fn extension(p: u64, e: usize) -> Result<Self> {
        if e == 1 {
            return Self::prime(p);
        }
        let modulus = find_irreducible(p, e)?;
        Ok(FieldParams {
            p,
            e,
            modulus: Some(modulus),
        })
    }

    /// GF(p^e) with a caller-supplied monic modulus; irreducibility is verified.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::invalid(format!("bad prime {p}")));
        }
        let e = modulus.len().saturating_sub(1);
        if !(2..=MAX_EXT_DEGREE).contains(&e) {
            return Err(Error::invalid(format!(
                "modulus degree {e} out of range 2..=4"
            )));
        }
        if modulus[e] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::invalid(
                "modulus must be monic with reduced coefficients",
            ));
        }
        if !is_irreducible(p, &modulus) {
            return Err(Error::invalid("modulus is reducible"));
        }
        Ok(FieldParams {
            p,
            e,
            modulus: Some(modulus),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    /// Field order q = p^e.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.e as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::default()
    }

    pub fn one(&self) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = 1;
        FieldElement { c }
    }

    /// Embed an integer scalar (reduced mod p).
    pub fn elem(&self, x: u64) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = x % self.p;
        FieldElement { c }
    }

    /// Build an element from explicit residues (length must equal e).
    pub fn from_residues(&self, residues: &[u64]) -> Result<FieldElement> {
        if residues.len() != self.e {
            return Err(Error::FieldMismatch(format!(
                "expected {} residues, got {}",
                self.e,
                residues.len()
            )));
        }
        let mut c = [0; MAX_EXT_DEGREE];
        for (i, &r) in residues.iter().enumerate() {
            if r >= self.p {
                return Err(Error::FieldMismatch(format!(
                    "residue {r} not reduced mod {}",
                    self.p
                )));
            }
            c[i] = r;
        }
        Ok(FieldElement { c })
    }

    /// Validity of an element under these parameters: residues reduced,
    /// slots past e zero.
    pub fn check(&self, a: &FieldElement) -> Result<()> {
        for (i, &r) in a.c.iter().enumerate() {
            if i < self.e {
                if r >= self.p {
                    return Err(Error::FieldMismatch(format!(
                        "residue {r} at position {i} not reduced mod {}",
                        self.p
                    )));
                }
            } else if r != 0 {
                return Err(Error::FieldMismatch(format!(
                    "nonzero residue at position {i} beyond extension degree {}",
                    self.e
                )));
            }
        }
        Ok(())
    }

    /// The k-th element in the canonical enumeration of the field
    /// (little-endian base-p digits of k). k must be < q.
    pub fn element_from_index(&self, k: u128) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        let mut rem = k;
        for slot in c.iter_mut().take(self.e) {
            *slot = (rem % self.p as u128) as u64;
            rem /= self.p as u128;
        }
        FieldElement { c }
    }

    /// Inverse of [`Self::element_from_index`].
    pub fn element_index(&self, a: &FieldElement) -> u128 {
        let mut idx = 0u128;
        for i in (0..self.e).rev() {
            idx = idx * self.p as u128 + a.c[i] as u128;
        }
        idx
    }

    pub(crate) fn add_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        for (i, slot) in c.iter_mut().enumerate().take(self.e) {
            let s = a.c[i] + b.c[i];
            *slot = if s >= self.p { s - self.p } else { s };
        }
        FieldElement { c }
    }

    pub(crate) fn sub_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let mut c = [0; MAX_EXT_DEGREE];
        for (i, slot) in c.iter_mut().enumerate().take(self.e) {
            let s = a.c[i] + self.p - b.c[i];
            *slot = if s >= self.p { s - self.p } else { s };
        }
        FieldElement { c }
    }

    pub(crate) fn neg_raw(&self, a: FieldElement) -> FieldElement {
        self.sub_raw(self.zero(), a)
    }

    pub(crate) fn mul_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = mul_mod(a.c[0], b.c[0], self.p);
            return FieldElement { c };
        }
        // Schoolbook product, then reduction by the monic modulus.
        let e = self.e;
        let p = self.p;
        let mut prod = [0u128; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..e {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] += a.c[i] as u128 * b.c[j] as u128;
            }
        }
        let modulus = self.modulus.as_ref().expect("extension field has modulus");
        for d in (e..2 * e - 1).rev() {
            let coeff = (prod[d] % p as u128) as u64;
            if coeff == 0 {
                prod[d] = 0;
                continue;
            }
            // x^d = x^{d-e} * (x^e) = -x^{d-e} * (modulus - x^e)
            for (k, &mc) in modulus.iter().take(e).enumerate() {
                if mc != 0 {
                    let sub = mul_mod(coeff, mc, p);
                    prod[d - e + k] += (p - sub) as u128;
                }
            }
            prod[d] = 0;
        }
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..e {
            c[i] = (prod[i] % p as u128) as u64;
        }
        FieldElement { c }
    }

    pub(crate) fn inv_raw(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero {
                p: self.p,
                e: self.e,
            });
        }
        if self.e == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = inv_mod(a.c[0], self.p);
            return Ok(FieldElement { c });
        }
        // a^(q-2) = a^(-1) in GF(q).
        Ok(self.pow(a, self.order() - 2))
    }

    pub fn pow(&self, a: FieldElement, mut exp: u128) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Checked multiplication: validates both operands under these parameters.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(self.mul_raw(a, b))
    }

    /// Checked inverse of a nonzero element.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        self.inv_raw(a)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(self.add_raw(a, b))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(self.sub_raw(a, b))
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid on (a, p), p prime, a != 0.
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

/// Deterministic exact primality by trial division; adequate for the 64-bit
/// inputs that appear in schedules and prime windows.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    if n.is_multiple_of(3) {
        return n == 3;
    }
    let mut d = 5u64;
    while d.checked_mul(d).map(|s| s <= n).unwrap_or(false) {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Evaluate a polynomial over GF(p) (coefficients constant-first) at x.
fn eval_poly_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (mul_mod(acc, x, p) + c) % p;
    }
    acc
}

/// Remainder of the monic division a mod b over GF(p); b monic.
fn poly_rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut rem: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while rem.len() > db {
        let lead = *rem.last().unwrap();
        let da = rem.len() - 1;
        if lead != 0 {
            for (k, &bc) in b.iter().enumerate().take(db) {
                let idx = da - db + k;
                let sub = mul_mod(lead, bc, p);
                rem[idx] = (rem[idx] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem
}

/// Irreducibility over GF(p) for monic polynomials of degree <= 4: no roots
/// (covers degrees 2 and 3) and, for degree 4, no monic irreducible quadratic
/// factor.
pub fn is_irreducible(p: u64, coeffs: &[u64]) -> bool {
    let e = coeffs.len() - 1;
    assert!(
        (2..=MAX_EXT_DEGREE).contains(&e),
        "degree out of supported range"
    );
    for x in 0..p {
        if eval_poly_mod(coeffs, x, p) == 0 {
            return false;
        }
    }
    if e == 4 {
        // Enumerate monic quadratics q(x) = x^2 + b x + c without roots.
        for b in 0..p {
            for c in 0..p {
                let q = [c, b, 1];
                if (0..p).any(|x| eval_poly_mod(&q, x, p) == 0) {
                    continue;
                }
                let rem = poly_rem_mod(coeffs, &q, p);
                if rem.iter().all(|&r| r == 0) {
                    return false;
                }
            }
        }
    }
    true
}

/// The lexicographically least monic irreducible polynomial of degree e over
/// GF(p), as e+1 coefficients (constant first). Candidates are scanned in
/// ascending order of the coefficient tuple (c_{e-1}, ..., c_0).
pub fn find_irreducible(p: u64, e: usize) -> Result<Vec<u64>> {
    if e == 1 {
        return Ok(vec![0, 1]);
    }
    if e > MAX_EXT_DEGREE {
        return Err(Error::invalid(format!(
            "extension degree {e} > {MAX_EXT_DEGREE}"
        )));
    }
    let total = (p as u128).pow(e as u32);
    if total > 4_000_000 {
        return Err(Error::budget(
            "find_irreducible",
            format!("p^e = {total} too large to scan"),
        ));
    }
    for v in 0..total {
        let mut coeffs = vec![0u64; e + 1];
        coeffs[e] = 1;
        let mut rem = v;
        for idx in (0..e).rev() {
            let base = (p as u128).pow(idx as u32);
            coeffs[idx] = (rem / base) as u64;
            rem %= base;
        }
        if is_irreducible(p, &coeffs) {
            return Ok(coeffs);
        }
    }
    Err(Error::invalid(format!(
        "no irreducible of degree {e} over GF({p})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_in_gf7() {
        let f = FieldParams::prime(7).unwrap();
        assert_eq!(f.mul(f.elem(3), f.elem(5)).unwrap(), f.elem(1));
        for a in 0..7 {
            assert_eq!(f.mul(f.elem(a), f.one()).unwrap(), f.elem(a));
        }
    }

    #[test]
    fn mul_in_gf4_reduces_by_modulus() {
        // GF(4) with modulus x^2 + x + 1: x * x = x + 1.
        let f = FieldParams::with_modulus(2, vec![1, 1, 1]).unwrap();
        let x = f.from_residues(&[0, 1]).unwrap();
        let expect = f.from_residues(&[1, 1]).unwrap();
        assert_eq!(f.mul(x, x).unwrap(), expect);
    }

    #[test]
    fn inv_examples() {
        let f = FieldParams::prime(7).unwrap();
        assert_eq!(f.inv(f.elem(3)).unwrap(), f.elem(5));
        assert_eq!(f.inv(f.one()).unwrap(), f.one());
        assert!(f.inv(f.zero()).is_err());
    }

    #[test]
    fn inv_exhaustive_gf9() {
        let f = FieldParams::extension(3, 2).unwrap();
        let mut nonzero = 0;
        for k in 1..f.order() {
            let a = f.element_from_index(k);
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv).unwrap(), f.one());
            nonzero += 1;
        }
        assert_eq!(nonzero, 8);
    }

    #[test]
    fn find_irreducible_examples() {
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]); // x^2+x+1
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]); // x^2+1
        assert_eq!(find_irreducible(11, 1).unwrap(), vec![0, 1]); // degenerate: x
    }

    #[test]
    fn find_irreducible_has_no_small_factors() {
        for p in [2u64, 3, 5] {
            for e in [2usize, 3] {
                let m = find_irreducible(p, e).unwrap();
                for x in 0..p {
                    assert_ne!(eval_poly_mod(&m, x, p), 0, "root {x} in GF({p}) for e={e}");
                }
            }
            let m4 = find_irreducible(p, 4).unwrap();
            assert!(is_irreducible(p, &m4));
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(313));
        assert!(!is_prime(1));
        assert!(!is_prime(49));
        assert!(is_prime(2));
        assert!(!is_prime(0));
        let known = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        for n in 0..50u64 {
            assert_eq!(is_prime(n), known.contains(&n), "n={n}");
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        // Every field of order <= 49 in the supported towers.
        let fields = [
            FieldParams::prime(2).unwrap(),
            FieldParams::prime(3).unwrap(),
            FieldParams::extension(2, 2).unwrap(),
            FieldParams::prime(5).unwrap(),
            FieldParams::prime(7).unwrap(),
            FieldParams::extension(2, 3).unwrap(),
            FieldParams::extension(3, 2).unwrap(),
            FieldParams::extension(2, 4).unwrap(),
            FieldParams::extension(5, 2).unwrap(),
            FieldParams::extension(3, 3).unwrap(),
            FieldParams::extension(7, 2).unwrap(),
        ];
        for f in &fields {
            let q = f.order();
            assert!(q <= 49);
            let elems: Vec<FieldElement> = (0..q).map(|k| f.element_from_index(k)).collect();
            for &a in &elems {
                // Frobenius: a^q = a.
                assert_eq!(f.pow(a, q), a, "frobenius in order {q}");
                if !a.is_zero() {
                    let inv = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, inv).unwrap(), f.one());
                }
                assert_eq!(f.add_raw(a, f.neg_raw(a)), f.zero());
                for &b in &elems {
                    assert_eq!(f.mul_raw(a, b), f.mul_raw(b, a));
                    assert_eq!(f.add_raw(a, b), f.add_raw(b, a));
                    for &c in &elems {
                        assert_eq!(f.mul_raw(a, f.mul_raw(b, c)), f.mul_raw(f.mul_raw(a, b), c));
                        assert_eq!(
                            f.mul_raw(a, f.add_raw(b, c)),
                            f.add_raw(f.mul_raw(a, b), f.mul_raw(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn checked_ops_reject_unreduced_residues() {
        let f = FieldParams::prime(5).unwrap();
        let bogus = FieldElement::from_array([7, 0, 0, 0]);
        assert!(f.mul(bogus, f.one()).is_err());
        assert!(f.check(&f.elem(4)).is_ok());
    }

    #[test]
    fn element_index_roundtrip() {
        let f = FieldParams::extension(3, 3).unwrap();
        for k in 0..f.order() {
            let a = f.element_from_index(k);
            assert_eq!(f.element_index(&a), k);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ring_axioms_on_random_samples(
                p_idx in 0usize..4,
                a in 0u64..10_000,
                b in 0u64..10_000,
                c in 0u64..10_000,
            ) {
                let p = [101u64, 257, 1009, 65537][p_idx];
                let f = FieldParams::prime(p).unwrap();
                let (x, y, z) = (f.elem(a), f.elem(b), f.elem(c));
                prop_assert_eq!(f.mul_raw(x, y), f.mul_raw(y, x));
                prop_assert_eq!(f.mul_raw(x, f.mul_raw(y, z)), f.mul_raw(f.mul_raw(x, y), z));
                prop_assert_eq!(
                    f.mul_raw(x, f.add_raw(y, z)),
                    f.add_raw(f.mul_raw(x, y), f.mul_raw(x, z))
                );
                prop_assert_eq!(f.add_raw(x, f.neg_raw(x)), f.zero());
                if !x.is_zero() {
                    prop_assert_eq!(f.mul_raw(x, f.inv_raw(x).unwrap()), f.one());
                }
            }
        }
    }
}
