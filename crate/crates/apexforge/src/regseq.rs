//! Hilbert functions of point sets and graded quotients, s-wise
//! m-independence, and regular-sequence certification by two independent
//! criteria: Hilbert-series equality and Koszul exactness.
//!
//! Both criteria sweep graded pieces up to a cutoff degree (default
//! sum(m_i) + N + 1, recorded in every certificate). Ranks of the graded
//! Macaulay matrices are computed exactly; candidate columns whose monomial
//! lies in the leading ideal of the preceding generators are provably in the
//! span of earlier ones and are skipped, which keeps the regular case free of
//! redundant reductions without changing any rank.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::geometry::{veronese_raw, PointSet};
use crate::gf::{FieldElement, FieldParams};
use crate::linalg::{AugmentedEchelon, PrimeEchelon};
use crate::poly::{binom, HomogPoly, MonomialBasis};
use crate::rng::{stream_id, SeedStream, StreamStage};
use crate::{Error, Result};

/// Node budget for the subset search in [`is_swise_independent`].
const SUBSET_SEARCH_BUDGET: u64 = 50_000_000;

/// Outcome of an s-wise m-independence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceReport {
    pub s: usize,
    pub m: u32,
    pub verdict: bool,
    /// Indices (into the point set, ascending) of an offending subset with
    /// h_S(m) < s; present iff the verdict is false. Lexicographically least.
    pub witness: Option<Vec<usize>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RegMethod {
    Hilbert,
    Koszul,
}

impl RegMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RegMethod::Hilbert => "hilbert",
            RegMethod::Koszul => "koszul",
        }
    }
}

/// A non-regularity witness: the first offending degree and, when the Koszul
/// route produced one, a syzygy (g_1, ..., g_r) with sum g_i f_i = 0 that
/// lies outside the image of the Koszul d_2 at that degree.
#[derive(Clone, Debug)]
pub struct RegWitness {
    pub degree: u32,
    pub syzygy: Option<Vec<HomogPoly>>,
}

/// Verdict of a regularity test, replayable from its inputs.
#[derive(Clone, Debug)]
pub struct RegularityCertificate {
    pub degrees: Vec<u32>,
    pub verdict: bool,
    pub method: RegMethod,
    pub cutoff: u32,
    pub witness: Option<RegWitness>,
    pub note: Option<String>,
}

/// h_X(m): the rank of the degree-m Veronese images of the points.
pub fn hilbert_function_points(points: &PointSet, m: u32) -> usize {
    let field = points.field();
    if field.e() == 1 {
        let p = field.p();
        let width = MonomialBasis::size(points.n_proj() + 1, m);
        let mut ech = PrimeEchelon::new(p, width);
        for pt in points.points() {
            let row = veronese_raw(pt, m, field);
            let entries: Vec<(u32, u64)> = row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.residue()))
                .collect();
            ech.insert_sparse(&entries);
        }
        ech.rank()
    } else {
        let rows: Vec<Vec<FieldElement>> = points
            .points()
            .iter()
            .map(|pt| veronese_raw(pt, m, field))
            .collect();
        crate::linalg::rank_generic(rows, field)
    }
}

/// Small clonable echelon over field elements, for subset searches.
#[derive(Clone)]
struct SubsetEchelon<'f> {
    field: &'f FieldParams,
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl<'f> SubsetEchelon<'f> {
    fn new(field: &'f FieldParams) -> Self {
        SubsetEchelon {
            field,
            rows: Vec::new(),
        }
    }

    /// Insert; false when the row is dependent on the current rows.
    fn insert(&mut self, mut row: Vec<FieldElement>) -> bool {
        let f = self.field;
        loop {
            let Some(col) = row.iter().position(|x| !x.is_zero()) else {
                return false;
            };
            if let Some((_, prow)) = self.rows.iter().find(|(c, _)| *c == col) {
                let mult = f.neg_raw(row[col]);
                for (w, &d) in row.iter_mut().zip(prow.iter()) {
                    *w = f.add_raw(*w, f.mul_raw(mult, d));
                }
            } else {
                let inv = f.inv_raw(row[col]).expect("nonzero pivot");
                for w in row.iter_mut() {
                    *w = f.mul_raw(*w, inv);
                }
                self.rows.push((col, row));
                return true;
            }
        }
    }
}

/// Is every s-subset of X of full Veronese rank s in degree m?
pub fn is_swise_independent(points: &PointSet, s: usize, m: u32) -> Result<IndependenceReport> {
    let n = points.len();
    if s > n {
        return Err(Error::invalid(format!("s = {s} exceeds |X| = {n}")));
    }
    let field = points.field();
    let dim = MonomialBasis::size(points.n_proj() + 1, m);
    if s > dim {
        // No s-subset can have rank s; any subset witnesses this.
        return Ok(IndependenceReport {
            s,
            m,
            verdict: false,
            witness: Some((0..s).collect()),
        });
    }
    if s <= 1 {
        // Veronese images of projective points are nonzero.
        return Ok(IndependenceReport {
            s,
            m,
            verdict: true,
            witness: None,
        });
    }
    if s == 2 {
        // Pairwise independence fails exactly on proportional Veronese
        // images, i.e. equal canonical representatives.
        let mut seen: std::collections::HashMap<Vec<FieldElement>, usize> =
            std::collections::HashMap::new();
        let mut best: Option<(usize, usize)> = None;
        for (i, pt) in points.points().iter().enumerate() {
            let canon = crate::geometry::veronese(pt, m, field).coords().to_vec();
            if let Some(&first) = seen.get(&canon) {
                let cand = (first, i);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            } else {
                seen.insert(canon, i);
            }
        }
        return Ok(match best {
            Some((a, b)) => IndependenceReport {
                s,
                m,
                verdict: false,
                witness: Some(vec![a, b]),
            },
            None => IndependenceReport {
                s,
                m,
                verdict: true,
                witness: None,
            },
        });
    }
    // General case: depth-first search over index combinations in
    // lexicographic order, pruning independent prefixes incrementally. The
    // first dependency closed, completed with the smallest unused indices, is
    // the lexicographically least offending subset.
    let rows: Vec<Vec<FieldElement>> = points
        .points()
        .iter()
        .map(|pt| veronese_raw(pt, m, field))
        .collect();
    fn dfs(
        rows: &[Vec<FieldElement>],
        s: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        ech: &SubsetEchelon,
        nodes: &mut u64,
    ) -> Result<Option<Vec<usize>>> {
        if chosen.len() == s {
            return Ok(None);
        }
        for i in start..rows.len() {
            *nodes += 1;
            if *nodes > SUBSET_SEARCH_BUDGET {
                return Err(Error::budget(
                    "is_swise_independent",
                    "subset search too large",
                ));
            }
            let mut next = ech.clone();
            if next.insert(rows[i].clone()) {
                chosen.push(i);
                if let Some(w) = dfs(rows, s, i + 1, chosen, &next, nodes)? {
                    return Ok(Some(w));
                }
                chosen.pop();
            } else {
                let mut witness = chosen.clone();
                witness.push(i);
                let mut k = 0;
                while witness.len() < s {
                    if !witness.contains(&k) {
                        witness.push(k);
                    }
                    k += 1;
                }
                witness.sort_unstable();
                return Ok(Some(witness));
            }
        }
        Ok(None)
    }
    let ech = SubsetEchelon::new(field);
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    let witness = dfs(&rows, s, 0, &mut chosen, &ech, &mut nodes)?;
    Ok(IndependenceReport {
        s,
        m,
        verdict: witness.is_none(),
        witness,
    })
}

/// Is X minimally m-dependent: h_X(m) < |X| while every proper subset has
/// full rank?
pub fn minimally_dependent(points: &PointSet, m: u32) -> bool {
    let n = points.len();
    if n == 0 {
        return false;
    }
    let full = hilbert_function_points(points, m);
    if full >= n {
        return false;
    }
    // Proper subsets are independent iff every (n-1)-subset has rank n-1.
    for skip in 0..n {
        let sub: Vec<_> = points
            .points()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| p.clone())
            .collect();
        let subset = PointSet::new(points.field().clone(), points.n_proj(), sub);
        if hilbert_function_points(&subset, m) < n - 1 {
            return false;
        }
    }
    true
}

/// Coefficients of the numerator prod (1 - t^{m_i}).
fn ci_numerator(degrees: &[u32]) -> Vec<i128> {
    let total: usize = degrees.iter().map(|&m| m as usize).sum();
    let mut num = vec![0i128; total + 1];
    num[0] = 1;
    for &m in degrees {
        let mut next = vec![0i128; total + 1];
        for (j, &c) in num.iter().enumerate() {
            if c != 0 {
                next[j] += c;
                if j + m as usize <= total {
                    next[j + m as usize] -= c;
                }
            }
        }
        num = next;
    }
    num
}

/// Coefficient of t^l in prod (1 - t^{m_i}) / (1 - t)^{N+1}: the Hilbert
/// function of a complete intersection of the given degrees in P^N.
pub fn ci_hilbert_coeff(n_proj: usize, degrees: &[u32], l: u32) -> Result<u128> {
    if degrees.len() > n_proj + 1 {
        return Err(Error::invalid(format!(
            "{} degrees exceed N + 1 = {}",
            degrees.len(),
            n_proj + 1
        )));
    }
    let num = ci_numerator(degrees);
    let mut acc: i128 = 0;
    for (j, &c) in num.iter().enumerate().take(l as usize + 1) {
        if c != 0 {
            acc += c * binom((n_proj + l as usize - j) as u64, n_proj as u64) as i128;
        }
    }
    debug_assert!(
        acc >= 0,
        "complete-intersection series coefficient must be nonnegative"
    );
    Ok(acc as u128)
}

fn common_ambient(f: &[HomogPoly]) -> Result<(FieldParams, usize)> {
    let first = f
        .first()
        .ok_or_else(|| Error::invalid("empty polynomial list"))?;
    for g in f {
        if g.field() != first.field() || g.num_vars() != first.num_vars() {
            return Err(Error::FieldMismatch(
                "generators live in different rings".into(),
            ));
        }
    }
    Ok((first.field().clone(), first.num_vars()))
}

/// Per-degree Macaulay elimination context for an ordered generator list.
/// Tracks, per prefix, the leading-monomial sets of the graded pieces so
/// that redundant candidate columns can be skipped at higher degrees.
struct MacaulayCtx<'a> {
    p: u64,
    n_vars: usize,
    gens: &'a [HomogPoly],
    degs: Vec<u32>,
    /// lm[i][l] = marker per degree-l monomial: is it a leading monomial of
    /// the span of blocks 0..=i at degree l?
    lm: Vec<Vec<Vec<bool>>>,
}

impl<'a> MacaulayCtx<'a> {
    fn new(gens: &'a [HomogPoly], p: u64, n_vars: usize) -> Self {
        let degs = gens.iter().map(|g| g.degree()).collect();
        MacaulayCtx {
            p,
            n_vars,
            gens,
            degs,
            lm: vec![Vec::new(); gens.len()],
        }
    }

    /// Sparse column of u * f in the degree-l basis.
    fn column(&self, f: &HomogPoly, u: &[u8], dst: &MonomialBasis) -> Vec<(u32, u64)> {
        let fb = f.basis();
        let mut col = Vec::with_capacity(f.coeffs().len());
        for (k, c) in f.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = fb.exponents(k);
            let sum: Vec<u8> = e.iter().zip(u.iter()).map(|(&a, &b)| a + b).collect();
            let idx = dst.index_of(&sum).expect("shifted monomial");
            col.push((idx as u32, c.residue()));
        }
        col
    }

    /// Rank of the degree-l piece of the ideal; must be called with l
    /// ascending from 0. Records leading-monomial data for all prefixes.
    fn sweep_degree(&mut self, l: u32) -> usize {
        let dst = MonomialBasis::get(self.n_vars, l);
        let mut ech = PrimeEchelon::new(self.p, dst.len());
        for (i, f) in self.gens.iter().enumerate() {
            debug_assert_eq!(self.lm[i].len(), l as usize);
            let m = self.degs[i];
            if l >= m {
                let src = MonomialBasis::get(self.n_vars, l - m);
                let skip = (i > 0).then(|| &self.lm[i - 1][(l - m) as usize]);
                for (ui, u) in src.iter().enumerate() {
                    if skip.is_some_and(|s| s[ui]) {
                        continue;
                    }
                    let col = self.column(f, u, &dst);
                    ech.insert_sparse(&col);
                }
            }
            let mut mask = vec![false; dst.len()];
            for c in ech.pivot_cols() {
                mask[c] = true;
            }
            self.lm[i].push(mask);
        }
        ech.rank()
    }

    /// Rank of the Koszul d_2 graded piece at degree l; requires the d_1
    /// sweeps for all degrees < l to have run.
    fn rank_d2(&self, l: u32) -> usize {
        let r = self.gens.len();
        let block_dims: Vec<usize> = self
            .degs
            .iter()
            .map(|&m| {
                if l >= m {
                    MonomialBasis::size(self.n_vars, l - m)
                } else {
                    0
                }
            })
            .collect();
        let offsets = prefix_offsets(&block_dims);
        let width: usize = block_dims.iter().sum();
        if width == 0 {
            return 0;
        }
        let mut ech = PrimeEchelon::new(self.p, width);
        for i in 0..r {
            for j in (i + 1)..r {
                let need = self.degs[i] + self.degs[j];
                if l < need {
                    continue;
                }
                let src = MonomialBasis::get(self.n_vars, l - need);
                let skip = (i > 0).then(|| &self.lm[i - 1][(l - need) as usize]);
                let dst_i = MonomialBasis::get(self.n_vars, l - self.degs[i]);
                let dst_j = MonomialBasis::get(self.n_vars, l - self.degs[j]);
                for (ui, u) in src.iter().enumerate() {
                    if skip.is_some_and(|s| s[ui]) {
                        continue;
                    }
                    // d_2(u e_i ^ e_j) = (u f_i) e_j - (u f_j) e_i
                    let mut entries: Vec<(u32, u64)> = Vec::new();
                    for (idx, v) in self.column(&self.gens[i], u, &dst_j) {
                        entries.push(((offsets[j] + idx as usize) as u32, v));
                    }
                    for (idx, v) in self.column(&self.gens[j], u, &dst_i) {
                        entries.push(((offsets[i] + idx as usize) as u32, (self.p - v) % self.p));
                    }
                    ech.insert_sparse(&entries);
                }
            }
        }
        ech.rank()
    }
}

fn prefix_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        offsets.push(acc);
        acc += d;
    }
    offsets
}

/// dim (R / <f>)_l, exact for arbitrary homogeneous generators.
pub fn hilbert_function_quotient(f: &[HomogPoly], l: u32) -> Result<usize> {
    let (field, n_vars) = common_ambient(f)?;
    if field.e() != 1 {
        return Err(Error::invalid(
            "graded quotients are implemented over prime fields",
        ));
    }
    let mut ctx = MacaulayCtx::new(f, field.p(), n_vars);
    let mut rank = 0;
    for d in 0..=l {
        rank = ctx.sweep_degree(d);
    }
    Ok(MonomialBasis::size(n_vars, l) - rank)
}

/// Generic-rank targets per degree: T1 = dim R_l - ci(l) for d_1, and
/// T2 = sum_i dim R_{l-m_i} - T1 for d_2. Specialization can only lower
/// ranks, so reaching the target is equivalent to the criterion holding.
fn t1_target(n_vars: usize, degrees: &[u32], l: u32) -> usize {
    let dim_l = MonomialBasis::size(n_vars, l);
    let ci = ci_hilbert_coeff(n_vars - 1, degrees, l).expect("length checked");
    dim_l - ci as usize
}

fn t2_target(n_vars: usize, degrees: &[u32], l: u32) -> usize {
    let sum: usize = degrees
        .iter()
        .map(|&m| {
            if l >= m {
                MonomialBasis::size(n_vars, l - m)
            } else {
                0
            }
        })
        .sum();
    sum - t1_target(n_vars, degrees, l)
}

fn constant_poly(field: &FieldParams, n_vars: usize, value: u64) -> HomogPoly {
    HomogPoly::from_coeffs(field, n_vars, 0, vec![field.elem(value)]).expect("constant")
}

/// Shared short-circuit checks; Some(cert) means the sequence is settled
/// without a graded sweep.
fn quick_verdict(
    f: &[HomogPoly],
    method: RegMethod,
    cutoff: u32,
    n_vars: usize,
    field: &FieldParams,
) -> Option<RegularityCertificate> {
    let degrees: Vec<u32> = f.iter().map(|g| g.degree()).collect();
    let r = f.len();
    if r > n_vars {
        return Some(RegularityCertificate {
            degrees,
            verdict: false,
            method,
            cutoff,
            witness: None,
            note: Some(format!(
                "length {r} exceeds the height bound N + 1 = {n_vars}"
            )),
        });
    }
    for (i, g) in f.iter().enumerate() {
        if g.is_zero() {
            // e_i is a syzygy in degree m_i, never in im(d_2).
            let syz: Vec<HomogPoly> = f
                .iter()
                .enumerate()
                .map(|(j, h)| {
                    if j == i {
                        constant_poly(field, n_vars, 1)
                    } else {
                        HomogPoly::zero(field, n_vars, g.degree().saturating_sub(h.degree()))
                    }
                })
                .collect();
            return Some(RegularityCertificate {
                degrees,
                verdict: false,
                method,
                cutoff,
                witness: Some(RegWitness {
                    degree: g.degree(),
                    syzygy: Some(syz),
                }),
                note: Some(format!("generator {i} is zero")),
            });
        }
        if g.degree() == 0 {
            return Some(RegularityCertificate {
                degrees,
                verdict: false,
                method,
                cutoff,
                witness: None,
                note: Some(format!("generator {i} is a unit")),
            });
        }
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if f[i] == f[j] {
                let deg = f[i].degree();
                let syz: Vec<HomogPoly> = f
                    .iter()
                    .enumerate()
                    .map(|(k, h)| {
                        if k == i {
                            constant_poly(field, n_vars, 1)
                        } else if k == j {
                            constant_poly(field, n_vars, field.p() - 1)
                        } else {
                            HomogPoly::zero(field, n_vars, deg.saturating_sub(h.degree()))
                        }
                    })
                    .collect();
                return Some(RegularityCertificate {
                    degrees,
                    verdict: false,
                    method,
                    cutoff,
                    witness: Some(RegWitness {
                        degree: deg,
                        syzygy: Some(syz),
                    }),
                    note: Some(format!("generators {i} and {j} coincide")),
                });
            }
        }
    }
    None
}

/// Default sweep cutoff: sum of the generator degrees + N + 1.
pub fn default_cutoff(f: &[HomogPoly]) -> u32 {
    let sum: u32 = f.iter().map(|g| g.degree()).sum();
    let n_vars = f.first().map(|g| g.num_vars()).unwrap_or(1);
    sum + n_vars as u32
}

fn validate_regularity_input(f: &[HomogPoly], cutoff: u32) -> Result<(FieldParams, usize)> {
    let (field, n_vars) = common_ambient(f)?;
    if field.e() != 1 {
        return Err(Error::invalid(
            "regularity tests are implemented over prime fields",
        ));
    }
    if let Some(maxd) = f.iter().map(|g| g.degree()).max() {
        if cutoff < maxd {
            return Err(Error::invalid(format!(
                "cutoff {cutoff} below maximal generator degree {maxd}"
            )));
        }
    }
    Ok((field, n_vars))
}

/// Hilbert-series criterion: f is declared regular iff the quotient Hilbert
/// function equals the complete-intersection series at every degree up to the
/// cutoff. The first violating degree is reported as the witness degree.
pub fn is_regular_hilbert(f: &[HomogPoly], cutoff: Option<u32>) -> Result<RegularityCertificate> {
    let cutoff = cutoff.unwrap_or_else(|| default_cutoff(f));
    let (field, n_vars) = validate_regularity_input(f, cutoff)?;
    if let Some(cert) = quick_verdict(f, RegMethod::Hilbert, cutoff, n_vars, &field) {
        return Ok(cert);
    }
    let degrees: Vec<u32> = f.iter().map(|g| g.degree()).collect();
    let mut ctx = MacaulayCtx::new(f, field.p(), n_vars);
    for l in 0..=cutoff {
        let rank = ctx.sweep_degree(l);
        let target = t1_target(n_vars, &degrees, l);
        debug_assert!(rank <= target);
        if rank < target {
            return Ok(RegularityCertificate {
                degrees,
                verdict: false,
                method: RegMethod::Hilbert,
                cutoff,
                witness: Some(RegWitness {
                    degree: l,
                    syzygy: None,
                }),
                note: None,
            });
        }
    }
    Ok(RegularityCertificate {
        degrees,
        verdict: true,
        method: RegMethod::Hilbert,
        cutoff,
        witness: None,
        note: None,
    })
}

/// Koszul criterion: f is declared regular iff ker(d_1) = im(d_2) in every
/// degree up to the cutoff. On failure the witness carries a syzygy outside
/// im(d_2) at the first inexact degree.
pub fn is_regular_koszul(f: &[HomogPoly], cutoff: Option<u32>) -> Result<RegularityCertificate> {
    let cutoff = cutoff.unwrap_or_else(|| default_cutoff(f));
    let (field, n_vars) = validate_regularity_input(f, cutoff)?;
    if let Some(cert) = quick_verdict(f, RegMethod::Koszul, cutoff, n_vars, &field) {
        return Ok(cert);
    }
    let degrees: Vec<u32> = f.iter().map(|g| g.degree()).collect();
    let mut ctx = MacaulayCtx::new(f, field.p(), n_vars);
    for l in 0..=cutoff {
        let rank1 = ctx.sweep_degree(l);
        let t1 = t1_target(n_vars, &degrees, l);
        debug_assert!(rank1 <= t1);
        let exact = rank1 == t1 && ctx.rank_d2(l) == t2_target(n_vars, &degrees, l);
        if !exact {
            let syzygy = koszul_witness(f, l, &field, n_vars);
            return Ok(RegularityCertificate {
                degrees,
                verdict: false,
                method: RegMethod::Koszul,
                cutoff,
                witness: Some(RegWitness { degree: l, syzygy }),
                note: None,
            });
        }
    }
    Ok(RegularityCertificate {
        degrees,
        verdict: true,
        method: RegMethod::Koszul,
        cutoff,
        witness: None,
        note: None,
    })
}

/// Result of the degree-l Koszul exactness diagnostic.
#[derive(Clone, Debug)]
pub struct KoszulCheck {
    pub rank_d1: usize,
    pub rank_d2: usize,
    pub exact: bool,
    pub witness: Option<Vec<HomogPoly>>,
}

/// Explicit graded Koszul check at one degree: builds the full (unpruned)
/// graded pieces of the complex, reports both ranks, exactness, and a witness
/// syzygy when inexact.
pub fn koszul_graded_check(f: &[HomogPoly], l: u32) -> Result<KoszulCheck> {
    let (field, n_vars) = common_ambient(f)?;
    if field.e() != 1 {
        return Err(Error::invalid(
            "Koszul checks are implemented over prime fields",
        ));
    }
    let p = field.p();
    let degrees: Vec<u32> = f.iter().map(|g| g.degree()).collect();
    let ctx = MacaulayCtx::new(f, p, n_vars);
    let dst = MonomialBasis::get(n_vars, l);
    let mut ech1 = PrimeEchelon::new(p, dst.len());
    for (i, g) in f.iter().enumerate() {
        if l >= degrees[i] {
            let src = MonomialBasis::get(n_vars, l - degrees[i]);
            for u in src.iter() {
                ech1.insert_sparse(&ctx.column(g, u, &dst));
            }
        }
    }
    let rank_d1 = ech1.rank();
    let (rank_d2, d2_ech) = full_d2(f, l, &field, n_vars);
    let domain_dim: usize = degrees
        .iter()
        .map(|&m| {
            if l >= m {
                MonomialBasis::size(n_vars, l - m)
            } else {
                0
            }
        })
        .sum();
    let exact = rank_d1 + rank_d2 == domain_dim;
    let witness = if exact {
        None
    } else {
        extract_syzygy(f, l, &field, n_vars, d2_ech)
    };
    Ok(KoszulCheck {
        rank_d1,
        rank_d2,
        exact,
        witness,
    })
}

/// Full (unpruned) d_2 column echelon at degree l.
fn full_d2(f: &[HomogPoly], l: u32, field: &FieldParams, n_vars: usize) -> (usize, PrimeEchelon) {
    let p = field.p();
    let r = f.len();
    let degrees: Vec<u32> = f.iter().map(|g| g.degree()).collect();
    let block_dims: Vec<usize> = degrees
        .iter()
        .map(|&m| {
            if l >= m {
                MonomialBasis::size(n_vars, l - m)
            } else {
                0
            }
        })
        .collect();
    let offsets = prefix_offsets(&block_dims);
    let width: usize = block_dims.iter().sum::<usize>().max(1);
    let ctx = MacaulayCtx::new(f, p, n_vars);
    let mut ech = PrimeEchelon::new(p, width);
    for i in 0..r {
        for j in (i + 1)..r {
            let need = degrees[i] + degrees[j];
            if l < need {
                continue;
            }
            let src = MonomialBasis::get(n_vars, l - need);
            let dst_i = MonomialBasis::get(n_vars, l - degrees[i]);
            let dst_j = MonomialBasis::get(n_vars, l - degrees[j]);
            for u in src.iter() {
                let mut entries: Vec<(u32, u64)> = Vec::new();
                for (idx, v) in ctx.column(&f[i], u, &dst_j) {
                    entries.push(((offsets[j] + idx as usize) as u32, v));
                }
                for (idx, v) in ctx.column(&f[j], u, &dst_i) {
                    entries.push(((offsets[i] + idx as usize) as u32, (p - v) % p));
                }
                ech.insert_sparse(&entries);
            }
        }
    }
    (ech.rank(), ech)
}

/// A kernel vector of d_1 at degree l outside im(d_2), as polynomials
/// (g_1, ..., g_r) of degrees l - m_i, normalized so the first nonzero
/// coefficient (block-major, basis order) is 1.
fn koszul_witness(
    f: &[HomogPoly],
    l: u32,
    field: &FieldParams,
    n_vars: usize,
) -> Option<Vec<HomogPoly>> {
    let (_, d2_ech) = full_d2(f, l, field, n_vars);
    extract_syzygy(f, l, field, n_vars, d2_ech)
}

fn extract_syzygy(
    f: &[HomogPoly],
    l: u32,
    field: &FieldParams,
    n_vars: usize,
    mut d2_ech: PrimeEchelon,
) -> Option<Vec<HomogPoly>> {
    let p = field.p();
    let degrees: Vec<u32> = f.iter().map(|g| g.degree()).collect();
    let block_dims: Vec<usize> = degrees
        .iter()
        .map(|&m| {
            if l >= m {
                MonomialBasis::size(n_vars, l - m)
            } else {
                0
            }
        })
        .collect();
    let offsets = prefix_offsets(&block_dims);
    let ctx = MacaulayCtx::new(f, p, n_vars);
    let dst = MonomialBasis::get(n_vars, l);
    let mut aug = AugmentedEchelon::new(p, dst.len());
    // Insertion order below is exactly the concatenated coordinate order of
    // the domain of d_1 (block-major, basis order), so a dependency vector
    // indexed by insertion order maps directly to domain coordinates.
    let mut kernel_vecs: Vec<Vec<(u32, u64)>> = Vec::new();
    for (i, g) in f.iter().enumerate() {
        if l < degrees[i] {
            continue;
        }
        let src = MonomialBasis::get(n_vars, l - degrees[i]);
        for (ui, u) in src.iter().enumerate() {
            let col = ctx.column(g, u, &dst);
            if let Some(dep) = aug.insert(&col) {
                let entries: Vec<(u32, u64)> = dep
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(pos, &v)| {
                        (
                            domain_coord(&degrees, &block_dims, &offsets, l, pos) as u32,
                            v,
                        )
                    })
                    .collect();
                let _ = (ui, &entries);
                kernel_vecs.push(entries);
            }
        }
    }
    for entries in kernel_vecs {
        if !d2_ech.in_span(&entries) {
            let mut sorted = entries.clone();
            sorted.sort_unstable_by_key(|&(c, _)| c);
            let lead = sorted.first().map(|&(_, v)| v).unwrap_or(1);
            let inv = field.inv_raw(field.elem(lead)).unwrap().residue();
            let mut polys = Vec::with_capacity(f.len());
            for (bi, &bd) in block_dims.iter().enumerate() {
                let deg = l.saturating_sub(degrees[bi]);
                let mut coeffs = vec![FieldElement::default(); MonomialBasis::size(n_vars, deg)];
                if bd > 0 {
                    for &(c, v) in &sorted {
                        let c = c as usize;
                        if c >= offsets[bi] && c < offsets[bi] + bd {
                            coeffs[c - offsets[bi]] = field.elem(v * inv % p);
                        }
                    }
                }
                polys.push(HomogPoly::from_coeffs(field, n_vars, deg, coeffs).unwrap());
            }
            return Some(polys);
        }
    }
    None
}

/// Map an insertion-order position (skipping empty blocks) to the
/// concatenated domain coordinate.
fn domain_coord(
    degrees: &[u32],
    block_dims: &[usize],
    offsets: &[usize],
    l: u32,
    pos: usize,
) -> usize {
    let mut rem = pos;
    for (bi, &bd) in block_dims.iter().enumerate() {
        if l < degrees[bi] {
            continue;
        }
        if rem < bd {
            return offsets[bi] + rem;
        }
        rem -= bd;
    }
    unreachable!("position beyond domain");
}

/// Upper bound on the dimension of the variety of non-regular sequences on a
/// complete intersection X of codimension N - n:
/// sum_i C(N + m_i, N) - min_i C(n - i + 1 + m_i, m_i).
pub fn nonregular_dim_bound(n_proj: usize, n_dim: usize, degrees: &[u32]) -> Result<BigInt> {
    let s = degrees.len();
    if s == 0 || s > n_dim || n_dim > n_proj {
        return Err(Error::invalid(format!(
            "need 1 <= s <= n <= N, got s={s}, n={n_dim}, N={n_proj}"
        )));
    }
    let mut total = BigInt::zero();
    for &m in degrees {
        total += BigInt::from(binom((n_proj as u64) + m as u64, n_proj as u64));
    }
    let mut min_term: Option<BigInt> = None;
    for (i, &m) in degrees.iter().enumerate() {
        let i1 = i as u64 + 1;
        let term = BigInt::from(binom(n_dim as u64 - i1 + 1 + m as u64, m as u64));
        if min_term.as_ref().is_none_or(|t| term < *t) {
            min_term = Some(term);
        }
    }
    Ok(total - min_term.expect("nonempty degrees"))
}

/// Upper bound on psi(N, t, m), the dimension of the variety of minimally
/// m-dependent t-tuples.
#[derive(Clone, Debug, PartialEq)]
pub enum PsiBound {
    /// The variety is empty (t <= m + 1, or t <= 2 for any degree).
    Empty,
    /// floor(3t/(m+4)) * (N + 1 + (m-2) t / (m+4)), exact.
    Bound(BigRational),
    /// Outside both cases of the bound.
    NotApplicable,
}

pub fn psi_upper(n_proj: usize, t: u64, m: u64) -> PsiBound {
    // Tuples of size <= 2 never realize a minimal dependency: Veronese
    // images of distinct points are distinct and nonzero.
    if (m >= 3 && t <= m + 1) || (m >= 1 && t <= 2) {
        return PsiBound::Empty;
    }
    if m >= 3 && n_proj as u64 >= 3 && m <= t && t <= n_proj as u64 {
        let floor = BigRational::from(BigInt::from(3 * t / (m + 4)));
        let inner = BigRational::from(BigInt::from((n_proj + 1) as u64))
            + BigRational::new(BigInt::from((m - 2) * t), BigInt::from(m + 4));
        return PsiBound::Bound(floor * inner);
    }
    PsiBound::NotApplicable
}

/// Agreement report of the two regularity criteria over random instances.
#[derive(Clone, Debug)]
pub struct DualOracleReport {
    pub instances: usize,
    pub disagreements: Vec<u64>,
    pub regular_count: usize,
    pub elapsed_secs: f64,
}

/// Run the Hilbert and Koszul criteria on `count` random instances (ambient
/// dimension, sequence length and degrees drawn uniformly up to the supplied
/// maxima) over GF(p), with the default cutoff. Instances are independent
/// and processed in parallel; instance i draws from stream i.
pub fn dual_oracle_sweep(
    count: usize,
    max_n_proj: usize,
    max_r: usize,
    max_degree: u32,
    p: u64,
    master_seed: u64,
) -> Result<DualOracleReport> {
    let field = FieldParams::prime(p)?;
    let start = std::time::Instant::now();
    let results: Vec<(bool, bool)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = SeedStream::new(master_seed, stream_id(StreamStage::Sweep, 0, i));
            let n_proj = 1 + s.below(max_n_proj as u64) as usize;
            let r = 1 + s.below(max_r as u64) as usize;
            let f: Vec<HomogPoly> = (0..r)
                .map(|_| {
                    let m = 1 + s.below(max_degree as u64) as u32;
                    HomogPoly::sample_uniform(&field, n_proj + 1, m, &mut s)
                })
                .collect();
            let h = is_regular_hilbert(&f, None).expect("valid instance");
            let k = is_regular_koszul(&f, None).expect("valid instance");
            (h.verdict, k.verdict)
        })
        .collect();
    let disagreements: Vec<u64> = results
        .iter()
        .enumerate()
        .filter(|(_, (h, k))| h != k)
        .map(|(i, _)| i as u64)
        .collect();
    let regular_count = results.iter().filter(|(h, _)| *h).count();
    Ok(DualOracleReport {
        instances: count,
        disagreements,
        regular_count,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
