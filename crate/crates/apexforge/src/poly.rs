//! Homogeneous polynomial spaces R_m over GF(q) in a fixed number of
//! variables, multihomogeneous tensors, evaluation, uniform sampling and
//! multiplication-map matrices.
//!
//! The monomial order is graded-lex throughout: within one degree, exponent
//! vectors are enumerated in descending lexicographic order, so x_0^m comes
//! first. Certificates and polynomial files all use this order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::gf::{FieldElement, FieldParams};
use crate::rng::SeedStream;
use crate::{Error, Result};

/// Default cap on dense tensor sizes for multihomogeneous polynomials.
pub const DEFAULT_TENSOR_CAP: usize = 10_000_000;

/// Binomial coefficient in u128; panics on overflow (inputs at monomial-basis
/// scale never approach it).
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).expect("binomial overflow");
        acc /= (i + 1) as u128;
    }
    acc
}

/// The degree-m monomials in `num_vars` variables, in graded-lex order.
#[derive(Debug)]
pub struct MonomialBasis {
    num_vars: usize,
    degree: u32,
    exps: Vec<Vec<u8>>,
}

type BasisCache = Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>;

static BASIS_CACHE: OnceLock<BasisCache> = OnceLock::new();

impl MonomialBasis {
    /// Shared basis for (num_vars, degree); construction is cached.
    pub fn get(num_vars: usize, degree: u32) -> Arc<MonomialBasis> {
        let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry((num_vars, degree))
            .or_insert_with(|| Arc::new(MonomialBasis::build(num_vars, degree)))
            .clone()
    }

    fn build(num_vars: usize, degree: u32) -> MonomialBasis {
        assert!(num_vars >= 1);
        assert!(degree <= u8::MAX as u32);
        let mut exps = Vec::with_capacity(Self::size(num_vars, degree));
        let mut cur = vec![0u8; num_vars];
        fn rec(exps: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, rem: u8) {
            if pos + 1 == cur.len() {
                cur[pos] = rem;
                exps.push(cur.clone());
                return;
            }
            for e in (0..=rem).rev() {
                cur[pos] = e;
                rec(exps, cur, pos + 1, rem - e);
            }
        }
        rec(&mut exps, &mut cur, 0, degree as u8);
        MonomialBasis {
            num_vars,
            degree,
            exps,
        }
    }

    /// dim R_m = C(num_vars - 1 + m, m).
    pub fn size(num_vars: usize, degree: u32) -> usize {
        binom((num_vars - 1) as u64 + degree as u64, degree as u64) as usize
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self, index: usize) -> &[u8] {
        &self.exps[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.exps.iter().map(|e| e.as_slice())
    }

    /// Rank of an exponent vector in graded-lex order; inverse of
    /// [`Self::exponents`].
    pub fn index_of(&self, exps: &[u8]) -> Result<usize> {
        if exps.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "expected {} exponents, got {}",
                self.num_vars,
                exps.len()
            )));
        }
        let total: u32 = exps.iter().map(|&e| e as u32).sum();
        if total != self.degree {
            return Err(Error::invalid(format!(
                "exponent vector has degree {total}, basis degree is {}",
                self.degree
            )));
        }
        // Count monomials strictly before `exps` in descending lex order.
        let mut rank: u128 = 0;
        let mut rem = self.degree as u64;
        let n = self.num_vars;
        for (pos, &e) in exps.iter().enumerate() {
            if pos + 1 == n {
                break;
            }
            let vars_right = (n - pos - 1) as u64;
            // Monomials with a strictly larger exponent at `pos`.
            for a in (e as u64 + 1)..=rem {
                rank += binom(rem - a + vars_right - 1, vars_right - 1);
            }
            rem -= e as u64;
        }
        Ok(rank as usize)
    }
}

/// All degree-m monomials of `point`, in basis order: the Veronese
/// coordinate vector before canonicalization.
pub fn monomial_values(
    basis: &MonomialBasis,
    point: &[FieldElement],
    field: &FieldParams,
) -> Vec<FieldElement> {
    let m = basis.degree() as usize;
    // Power table: powers[i][k] = point[i]^k.
    let mut powers = Vec::with_capacity(point.len());
    for &c in point {
        let mut row = Vec::with_capacity(m + 1);
        row.push(field.one());
        for k in 1..=m {
            let prev = row[k - 1];
            row.push(field.mul_raw(prev, c));
        }
        powers.push(row);
    }
    basis
        .iter()
        .map(|exps| {
            let mut acc = field.one();
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    acc = field.mul_raw(acc, powers[i][e as usize]);
                }
            }
            acc
        })
        .collect()
}

/// Prime-field fast path of [`monomial_values`]; residues in, residues out.
pub(crate) fn monomial_values_u64(basis: &MonomialBasis, point: &[u64], p: u64) -> Vec<u64> {
    let m = basis.degree() as usize;
    let mut powers = Vec::with_capacity(point.len());
    for &c in point {
        let mut row = Vec::with_capacity(m + 1);
        row.push(1u64);
        for k in 1..=m {
            row.push(row[k - 1] * c % p);
        }
        powers.push(row);
    }
    basis
        .iter()
        .map(|exps| {
            let mut acc = 1u64;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    acc = acc * powers[i][e as usize] % p;
                }
            }
            acc
        })
        .collect()
}

/// A homogeneous polynomial: dense coefficient vector over the graded-lex
/// monomial basis of its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogPoly {
    field: FieldParams,
    num_vars: usize,
    degree: u32,
    coeffs: Vec<FieldElement>,
}

impl HomogPoly {
    pub fn zero(field: &FieldParams, num_vars: usize, degree: u32) -> Self {
        let len = MonomialBasis::size(num_vars, degree);
        HomogPoly {
            field: field.clone(),
            num_vars,
            degree,
            coeffs: vec![FieldElement::default(); len],
        }
    }

    pub fn from_coeffs(
        field: &FieldParams,
        num_vars: usize,
        degree: u32,
        coeffs: Vec<FieldElement>,
    ) -> Result<Self> {
        if coeffs.len() != MonomialBasis::size(num_vars, degree) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector length {} does not match basis size {}",
                coeffs.len(),
                MonomialBasis::size(num_vars, degree)
            )));
        }
        for c in &coeffs {
            field.check(c)?;
        }
        Ok(HomogPoly {
            field: field.clone(),
            num_vars,
            degree,
            coeffs,
        })
    }

    /// Build from (exponent vector, coefficient) terms; repeated monomials accumulate.
    pub fn from_terms(
        field: &FieldParams,
        num_vars: usize,
        degree: u32,
        terms: &[(Vec<u8>, FieldElement)],
    ) -> Result<Self> {
        let mut poly = Self::zero(field, num_vars, degree);
        let basis = poly.basis();
        for (exps, c) in terms {
            field.check(c)?;
            let idx = basis.index_of(exps)?;
            poly.coeffs[idx] = field.add_raw(poly.coeffs[idx], *c);
        }
        Ok(poly)
    }

    /// Convenience constructor for tests: single monomial with coefficient 1.
    pub fn monomial(field: &FieldParams, num_vars: usize, exps: &[u8]) -> Self {
        let degree: u32 = exps.iter().map(|&e| e as u32).sum();
        Self::from_terms(field, num_vars, degree, &[(exps.to_vec(), field.one())]).unwrap()
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn basis(&self) -> Arc<MonomialBasis> {
        MonomialBasis::get(self.num_vars, self.degree)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// i.i.d. uniform coefficients; deterministic given the stream.
    pub fn sample_uniform(
        field: &FieldParams,
        num_vars: usize,
        degree: u32,
        stream: &mut SeedStream,
    ) -> Self {
        let len = MonomialBasis::size(num_vars, degree);
        let coeffs = (0..len).map(|_| stream.field_element(field)).collect();
        HomogPoly {
            field: field.clone(),
            num_vars,
            degree,
            coeffs,
        }
    }

    /// Evaluate at affine coordinates (length num_vars).
    pub fn evaluate(&self, v: &[FieldElement]) -> Result<FieldElement> {
        if v.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, polynomial has {} variables",
                v.len(),
                self.num_vars
            )));
        }
        let basis = self.basis();
        let monos = monomial_values(&basis, v, &self.field);
        let mut acc = self.field.zero();
        for (c, m) in self.coeffs.iter().zip(monos.iter()) {
            if !c.is_zero() {
                acc = self.field.add_raw(acc, self.field.mul_raw(*c, *m));
            }
        }
        Ok(acc)
    }

    /// Prime-field evaluation against a precomputed monomial-value vector.
    pub(crate) fn evaluate_mono_u64(&self, monos: &[u64], p: u64) -> u64 {
        let mut acc = 0u64;
        for (c, &m) in self.coeffs.iter().zip(monos.iter()) {
            let cv = c.residue();
            if cv != 0 && m != 0 {
                acc = (acc + cv * m % p) % p;
            }
        }
        acc
    }

    /// Product polynomial (degree adds).
    pub fn mul(&self, other: &HomogPoly) -> Result<HomogPoly> {
        if self.field != other.field || self.num_vars != other.num_vars {
            return Err(Error::FieldMismatch(
                "polynomial product across different rings".into(),
            ));
        }
        let degree = self.degree + other.degree;
        let mut out = HomogPoly::zero(&self.field, self.num_vars, degree);
        let ba = self.basis();
        let bb = other.basis();
        let bo = out.basis();
        let f = &self.field;
        for (ia, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ea = ba.exponents(ia);
            for (ib, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let eb = bb.exponents(ib);
                let sum: Vec<u8> = ea.iter().zip(eb.iter()).map(|(&a, &b)| a + b).collect();
                let idx = bo.index_of(&sum).expect("product monomial in basis");
                out.coeffs[idx] = f.add_raw(out.coeffs[idx], f.mul_raw(*ca, *cb));
            }
        }
        Ok(out)
    }

    /// Matrix of the multiplication map g -> f*g from R_{l-m} to R_l in the
    /// canonical bases, returned as dense columns (one per source monomial).
    pub fn multiply_map_matrix(&self, l: u32) -> Result<Vec<Vec<FieldElement>>> {
        if l < self.degree {
            return Err(Error::invalid(format!(
                "target degree {l} below polynomial degree {}",
                self.degree
            )));
        }
        let src = MonomialBasis::get(self.num_vars, l - self.degree);
        let dst = MonomialBasis::get(self.num_vars, l);
        let fbasis = self.basis();
        let mut cols = Vec::with_capacity(src.len());
        for u in src.iter() {
            let mut col = vec![FieldElement::default(); dst.len()];
            for (i, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = fbasis.exponents(i);
                let sum: Vec<u8> = e.iter().zip(u.iter()).map(|(&a, &b)| a + b).collect();
                let idx = dst.index_of(&sum).expect("shifted monomial in basis");
                col[idx] = *c;
            }
            cols.push(col);
        }
        Ok(cols)
    }
}

/// A multihomogeneous polynomial: separately homogeneous of degree m_k in
/// each group of variables, stored as a dense tensor over the product of the
/// per-group monomial bases (group 0 outermost).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiHomogPoly {
    field: FieldParams,
    groups: Vec<(usize, u32)>,
    coeffs: Vec<FieldElement>,
}

impl MultiHomogPoly {
    pub fn tensor_size(groups: &[(usize, u32)]) -> usize {
        groups
            .iter()
            .map(|&(n, m)| MonomialBasis::size(n, m))
            .product()
    }

    pub fn zero(field: &FieldParams, groups: &[(usize, u32)]) -> Result<Self> {
        Self::zero_with_cap(field, groups, DEFAULT_TENSOR_CAP)
    }

    pub fn zero_with_cap(field: &FieldParams, groups: &[(usize, u32)], cap: usize) -> Result<Self> {
        let size = Self::tensor_size(groups);
        if size > cap {
            return Err(Error::budget(
                "multihomogeneous tensor",
                format!("{size} entries exceed cap {cap}"),
            ));
        }
        Ok(MultiHomogPoly {
            field: field.clone(),
            groups: groups.to_vec(),
            coeffs: vec![FieldElement::default(); size],
        })
    }

    pub fn sample_uniform(
        field: &FieldParams,
        groups: &[(usize, u32)],
        stream: &mut SeedStream,
    ) -> Result<Self> {
        let mut out = Self::zero(field, groups)?;
        for c in out.coeffs.iter_mut() {
            *c = stream.field_element(field);
        }
        Ok(out)
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn groups(&self) -> &[(usize, u32)] {
        &self.groups
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [FieldElement] {
        &mut self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Evaluate at one coordinate vector per group.
    pub fn evaluate_multi(&self, points: &[&[FieldElement]]) -> Result<FieldElement> {
        if points.len() != self.groups.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} point groups supplied, polynomial has {}",
                points.len(),
                self.groups.len()
            )));
        }
        for (k, (&(n, _), pt)) in self.groups.iter().zip(points.iter()).enumerate() {
            if pt.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "group {k} expects {n} coordinates, got {}",
                    pt.len()
                )));
            }
        }
        let f = &self.field;
        let mut current: Vec<FieldElement> = self.coeffs.clone();
        // Contract from the last group inward.
        for (k, &(n, m)) in self.groups.iter().enumerate().rev() {
            let basis = MonomialBasis::get(n, m);
            let monos = monomial_values(&basis, points[k], f);
            let block = basis.len();
            let chunks = current.len() / block;
            let mut next = Vec::with_capacity(chunks);
            for ch in 0..chunks {
                let mut acc = f.zero();
                for (j, mv) in monos.iter().enumerate() {
                    let c = current[ch * block + j];
                    if !c.is_zero() && !mv.is_zero() {
                        acc = f.add_raw(acc, f.mul_raw(c, *mv));
                    }
                }
                next.push(acc);
            }
            current = next;
        }
        debug_assert_eq!(current.len(), 1);
        Ok(current[0])
    }

    /// Fix the first d-1 groups; the result is the homogeneous polynomial
    /// z -> g(v_1, ..., v_{d-1}, z) in the last group's variables.
    pub fn partial_evaluate_prefix(&self, points: &[&[FieldElement]]) -> Result<HomogPoly> {
        let d = self.groups.len();
        if points.len() != d - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} prefix groups supplied, need {}",
                points.len(),
                d - 1
            )));
        }
        let f = &self.field;
        let mut current: Vec<FieldElement> = self.coeffs.clone();
        for (k, &(n, m)) in self.groups.iter().take(d - 1).enumerate() {
            let basis = MonomialBasis::get(n, m);
            if points[k].len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "group {k} expects {n} coordinates, got {}",
                    points[k].len()
                )));
            }
            let monos = monomial_values(&basis, points[k], f);
            let block = current.len() / basis.len();
            let mut next = vec![FieldElement::default(); block];
            for (i, mv) in monos.iter().enumerate() {
                if mv.is_zero() {
                    continue;
                }
                for j in 0..block {
                    let c = current[i * block + j];
                    if !c.is_zero() {
                        next[j] = f.add_raw(next[j], f.mul_raw(c, *mv));
                    }
                }
            }
            current = next;
        }
        let (n_last, m_last) = self.groups[d - 1];
        HomogPoly::from_coeffs(f, n_last, m_last, current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldParams {
        FieldParams::prime(p).unwrap()
    }

    #[test]
    fn graded_lex_order_matches_convention() {
        let b = MonomialBasis::get(3, 2);
        let expect: Vec<Vec<u8>> = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 2, 0],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        let got: Vec<Vec<u8>> = b.iter().map(|e| e.to_vec()).collect();
        assert_eq!(got, expect);
        assert_eq!(b.index_of(&[1, 0, 1]).unwrap(), 2);
        assert_eq!(b.index_of(&[2, 0, 0]).unwrap(), 0);
    }

    #[test]
    fn rank_unrank_roundtrip() {
        // N = 3 (4 variables), m = 2: all 10 monomials.
        let b = MonomialBasis::get(4, 2);
        assert_eq!(b.len(), 10);
        for i in 0..b.len() {
            let e = b.exponents(i).to_vec();
            assert_eq!(b.index_of(&e).unwrap(), i);
        }
    }

    #[test]
    fn index_errors() {
        let b = MonomialBasis::get(3, 2);
        assert!(b.index_of(&[1, 1]).is_err());
        assert!(b.index_of(&[1, 1, 1]).is_err());
    }

    #[test]
    fn basis_size_formula() {
        for n in 1..=5usize {
            for m in 0..=8u32 {
                let b = MonomialBasis::get(n, m);
                assert_eq!(b.len(), binom((n - 1) as u64 + m as u64, m as u64) as usize);
            }
        }
    }

    #[test]
    fn evaluate_example_gf5() {
        // f = x0^2 + 2 x1 x2 over GF(5) at (1,2,3) -> 1 + 12 = 13 = 3.
        let f5 = gf(5);
        let f = HomogPoly::from_terms(
            &f5,
            3,
            2,
            &[(vec![2, 0, 0], f5.one()), (vec![0, 1, 1], f5.elem(2))],
        )
        .unwrap();
        let v = [f5.elem(1), f5.elem(2), f5.elem(3)];
        assert_eq!(f.evaluate(&v).unwrap(), f5.elem(3));
        let zero = [f5.zero(), f5.zero(), f5.zero()];
        assert_eq!(f.evaluate(&zero).unwrap(), f5.zero());
    }

    #[test]
    fn evaluation_is_homogeneous_and_linear() {
        let f7 = gf(7);
        let mut s = SeedStream::new(5, 0);
        for _ in 0..20 {
            let m = 1 + s.below(3) as u32;
            let f = HomogPoly::sample_uniform(&f7, 4, m, &mut s);
            let g = HomogPoly::sample_uniform(&f7, 4, m, &mut s);
            let v: Vec<FieldElement> = (0..4).map(|_| s.field_element(&f7)).collect();
            // Homogeneity: f(2v) = 2^m f(v).
            let two = f7.elem(2);
            let v2: Vec<FieldElement> = v.iter().map(|&c| f7.mul_raw(two, c)).collect();
            let lhs = f.evaluate(&v2).unwrap();
            let rhs = f7.mul_raw(f7.pow(two, m as u128), f.evaluate(&v).unwrap());
            assert_eq!(lhs, rhs);
            // Linearity in coefficients.
            let a = s.field_element(&f7);
            let b = s.field_element(&f7);
            let combo_coeffs: Vec<FieldElement> = f
                .coeffs()
                .iter()
                .zip(g.coeffs())
                .map(|(&cf, &cg)| f7.add_raw(f7.mul_raw(a, cf), f7.mul_raw(b, cg)))
                .collect();
            let combo = HomogPoly::from_coeffs(&f7, 4, m, combo_coeffs).unwrap();
            let lhs = combo.evaluate(&v).unwrap();
            let rhs = f7.add_raw(
                f7.mul_raw(a, f.evaluate(&v).unwrap()),
                f7.mul_raw(b, g.evaluate(&v).unwrap()),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn product_evaluation_commutes() {
        let f7 = gf(7);
        let mut s = SeedStream::new(6, 0);
        for _ in 0..20 {
            let f = HomogPoly::sample_uniform(&f7, 3, 2, &mut s);
            let g = HomogPoly::sample_uniform(&f7, 3, 3, &mut s);
            let prod = f.mul(&g).unwrap();
            let v: Vec<FieldElement> = (0..3).map(|_| s.field_element(&f7)).collect();
            assert_eq!(
                prod.evaluate(&v).unwrap(),
                f7.mul_raw(f.evaluate(&v).unwrap(), g.evaluate(&v).unwrap())
            );
        }
    }

    #[test]
    fn multiply_map_matrix_examples() {
        let f5 = gf(5);
        // f = x0 in 2 variables, l = 1: matrix [1, 0]^T.
        let f = HomogPoly::monomial(&f5, 2, &[1, 0]);
        let cols = f.multiply_map_matrix(1).unwrap();
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0], vec![f5.one(), f5.zero()]);
        // f = 0: zero matrix.
        let z = HomogPoly::zero(&f5, 2, 1);
        let cols = z.multiply_map_matrix(3).unwrap();
        assert!(cols.iter().all(|c| c.iter().all(|x| x.is_zero())));
        assert!(f.multiply_map_matrix(0).is_err());
    }

    #[test]
    fn multiplication_by_monomial_is_injective() {
        use crate::linalg::rank_generic;
        let f5 = gf(5);
        for l in 2..5u32 {
            let f = HomogPoly::monomial(&f5, 3, &[1, 1, 0]);
            let cols = f.multiply_map_matrix(l).unwrap();
            let src_dim = MonomialBasis::size(3, l - 2);
            assert_eq!(cols.len(), src_dim);
            assert_eq!(rank_generic(cols, &f5), src_dim);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_streams_differ() {
        let f7 = gf(7);
        let a = HomogPoly::sample_uniform(&f7, 4, 3, &mut SeedStream::new(3, 9));
        let b = HomogPoly::sample_uniform(&f7, 4, 3, &mut SeedStream::new(3, 9));
        let c = HomogPoly::sample_uniform(&f7, 4, 3, &mut SeedStream::new(3, 10));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn coefficient_histogram_is_roughly_uniform() {
        // Chi-squared sanity on one coefficient slot over 10^4 samples, GF(7).
        let f7 = gf(7);
        let mut counts = [0u32; 7];
        for i in 0..10_000u64 {
            let mut s = SeedStream::new(1234, i);
            let poly = HomogPoly::sample_uniform(&f7, 3, 2, &mut s);
            counts[poly.coeffs()[0].residue() as usize] += 1;
        }
        let expected = 10_000.0 / 7.0;
        let chi2: f64 = counts
            .iter()
            .map(|&o| {
                let d = o as f64 - expected;
                d * d / expected
            })
            .sum();
        // 99.9% quantile of chi-squared with 6 degrees of freedom.
        assert!(chi2 < 22.46, "chi2 = {chi2}");
    }

    #[test]
    fn multi_evaluate_example() {
        // d = 2, g = x0 (x) y0 over GF(5) at ((1,0),(2,0)) -> 2.
        let f5 = gf(5);
        let mut g = MultiHomogPoly::zero(&f5, &[(2, 1), (2, 1)]).unwrap();
        g.coeffs_mut()[0] = f5.one(); // x0 * y0 is the (0,0) tensor slot
        let a = [f5.elem(1), f5.zero()];
        let b = [f5.elem(2), f5.zero()];
        assert_eq!(g.evaluate_multi(&[&a, &b]).unwrap(), f5.elem(2));
        let zero = MultiHomogPoly::zero(&f5, &[(2, 1), (2, 1)]).unwrap();
        assert_eq!(zero.evaluate_multi(&[&a, &b]).unwrap(), f5.zero());
    }

    #[test]
    fn partial_evaluation_agrees_with_full() {
        let f7 = gf(7);
        let mut s = SeedStream::new(11, 0);
        let g = MultiHomogPoly::sample_uniform(&f7, &[(3, 2), (3, 1), (4, 2)], &mut s).unwrap();
        for _ in 0..100 {
            let v1: Vec<FieldElement> = (0..3).map(|_| s.field_element(&f7)).collect();
            let v2: Vec<FieldElement> = (0..3).map(|_| s.field_element(&f7)).collect();
            let z: Vec<FieldElement> = (0..4).map(|_| s.field_element(&f7)).collect();
            let h = g.partial_evaluate_prefix(&[&v1, &v2]).unwrap();
            assert_eq!(
                h.evaluate(&z).unwrap(),
                g.evaluate_multi(&[&v1, &v2, &z]).unwrap()
            );
        }
    }

    #[test]
    fn multi_separate_homogeneity() {
        let f7 = gf(7);
        let mut s = SeedStream::new(12, 0);
        let g = MultiHomogPoly::sample_uniform(&f7, &[(2, 2), (3, 3)], &mut s).unwrap();
        let v1: Vec<FieldElement> = (0..2).map(|_| s.field_element(&f7)).collect();
        let v2: Vec<FieldElement> = (0..3).map(|_| s.field_element(&f7)).collect();
        let lam = f7.elem(3);
        let v1s: Vec<FieldElement> = v1.iter().map(|&c| f7.mul_raw(lam, c)).collect();
        let lhs = g.evaluate_multi(&[&v1s, &v2]).unwrap();
        let rhs = f7.mul_raw(f7.pow(lam, 2), g.evaluate_multi(&[&v1, &v2]).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_cap_guard() {
        let f5 = gf(5);
        assert!(MultiHomogPoly::zero_with_cap(&f5, &[(10, 5), (10, 5)], 1000).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_roundtrip_random_exponents(
                n_vars in 2usize..6,
                degree in 1u32..6,
                pick in 0usize..1000,
            ) {
                let b = MonomialBasis::get(n_vars, degree);
                let i = pick % b.len();
                let e = b.exponents(i).to_vec();
                prop_assert_eq!(b.index_of(&e).unwrap(), i);
            }

            #[test]
            fn evaluation_respects_scaling(seed in 0u64..500, lam in 1u64..7) {
                let f7 = gf(7);
                let mut s = SeedStream::new(seed, 0);
                let m = 1 + s.below(3) as u32;
                let f = HomogPoly::sample_uniform(&f7, 3, m, &mut s);
                let v: Vec<FieldElement> = (0..3).map(|_| s.field_element(&f7)).collect();
                let lam = f7.elem(lam);
                let scaled: Vec<FieldElement> =
                    v.iter().map(|&c| f7.mul_raw(lam, c)).collect();
                let lhs = f.evaluate(&scaled).unwrap();
                let rhs = f7.mul_raw(f7.pow(lam, m as u128), f.evaluate(&v).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
