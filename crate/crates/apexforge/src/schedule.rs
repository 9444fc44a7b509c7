//! Explicit parameter arithmetic of the constructions: the monomial-count
//! threshold D(r, t), its product bound, the Turán and Zarankiewicz parameter
//! schedules with their hypothesis checks, and prime selection in a
//! Bertrand window.
//!
//! Everything is exact: integers are arbitrary precision where they can grow,
//! irrational intermediates (cube roots, logs) are handled through integer
//! root brackets and outward-rounded rational enclosures, so every emitted
//! number is reproducible bit for bit.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::gf::is_prime;
use crate::regseq::{psi_upper, PsiBound};
use crate::{Error, Result};

/// Base of the logarithms appearing in the product bound and the apex
/// threshold; the sources leave it unspecified, so it is a recorded knob.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LogBase {
    Two,
    E,
}

impl LogBase {
    pub fn name(&self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(Error::invalid(format!(
                "log base must be 2 or e, got {other}"
            ))),
        }
    }

    /// ceil(1 + log_base(x)) for x >= 1, exact.
    pub fn ceil_one_plus_log(&self, x: u64) -> u32 {
        assert!(x >= 1);
        match self {
            LogBase::Two => {
                if x == 1 {
                    1
                } else if x.is_power_of_two() {
                    1 + x.trailing_zeros()
                } else {
                    1 + (64 - x.leading_zeros())
                }
            }
            LogBase::E => {
                if x == 1 {
                    return 1;
                }
                // Smallest k with e^k >= x; x is a u64 so ln(x) is never
                // within floating error of an integer.
                1 + (x as f64).ln().ceil() as u32
            }
        }
    }
}

/// Binomial coefficient with arbitrary-precision result.
pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

pub fn factorial_big(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// D(r, t) = min { m : C(m + r, r) > t }.
pub fn d_function(r: u64, t: u128) -> u64 {
    assert!(r >= 1);
    let mut m = 0u64;
    loop {
        let c = checked_binom_u128(m + r, r);
        match c {
            Some(v) if v > t => return m,
            None => return m, // overflow certainly exceeds any u128 t
            _ => m += 1,
        }
    }
}

fn checked_binom_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// The product bound: prod_{i=1}^r D(i, t) <= t^{ceil(1 + log r)} * r!.
#[derive(Clone, Debug)]
pub struct ProductBoundCheck {
    pub product: BigUint,
    pub bound: BigUint,
    pub holds: bool,
}

pub fn product_bound_check(r: u64, t: u64, base: LogBase) -> ProductBoundCheck {
    assert!(r >= 1 && t >= 1);
    let mut product = BigUint::one();
    for i in 1..=r {
        product *= BigUint::from(d_function(i, t as u128));
    }
    let exponent = base.ceil_one_plus_log(r);
    let bound = BigUint::from(t).pow(exponent) * factorial_big(r);
    let holds = product <= bound;
    ProductBoundCheck {
        product,
        bound,
        holds,
    }
}

/// Floor of the integer k-th root: max x with x^k <= n.
pub fn kth_root_floor(n: u128, k: u32) -> u128 {
    assert!(k >= 1);
    if n <= 1 || k == 1 {
        return n;
    }
    // Bracket: grow hi until hi^k > n (overflow counts as exceeding n).
    let mut lo: u128 = 1;
    let mut hi: u128 = 2;
    while hi.checked_pow(k).is_some_and(|v| v <= n) {
        lo = hi;
        hi <<= 1;
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        match mid.checked_pow(k) {
            Some(v) if v <= n => lo = mid,
            _ => hi = mid,
        }
    }
    lo
}

/// Smallest integer x with x^k >= n.
pub fn kth_root_ceil(n: u128, k: u32) -> u128 {
    let f = kth_root_floor(n, k);
    if f.pow(k) == n {
        f
    } else {
        f + 1
    }
}

/// Rational enclosure [lo, hi] of n^{1/3} with hi - lo = 10^{-9}.
fn cbrt_enclosure(n: u64) -> (BigRational, BigRational) {
    let scale: u128 = 1_000_000_000;
    let scaled = BigUint::from(n) * BigUint::from(scale).pow(3);
    // Integer cube root of the scaled value by binary search.
    let mut lo = BigUint::zero();
    let mut hi = BigUint::from(scale) * BigUint::from(kth_root_ceil(n as u128, 3) + 1);
    while &lo + BigUint::one() < hi {
        let mid = (&lo + &hi) / BigUint::from(2u32);
        if &mid * &mid * &mid <= scaled {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let den = BigInt::from(BigUint::from(scale));
    let lo_r = BigRational::new(BigInt::from(lo.clone()), den.clone());
    let hi_r = BigRational::new(BigInt::from(lo + BigUint::one()), den);
    (lo_r, hi_r)
}

fn ceil_rational(x: &BigRational) -> BigUint {
    let c = x.ceil();
    c.to_integer().to_biguint().unwrap_or_default()
}

/// Derived parameters of the apex-free Turán construction for a given
/// (d-1)-partite pattern shape.
#[derive(Clone, Debug)]
pub struct TuranSchedule {
    pub d: usize,
    pub part_sizes: Vec<u64>,
    /// S = number of pattern edges.
    pub s_edges: u64,
    /// beta = (d^2 + 4d - 5)^{1/3}, kept as the radicand plus an enclosure.
    pub beta_cubed: u64,
    pub beta_lo: BigRational,
    pub beta_hi: BigRational,
    pub s_max: u64,
    pub t: u64,
    pub r: u64,
    pub l: u64,
    pub n_proj: u64,
    /// m_j = D(t - j + 1, l) for j = 1..t.
    pub degrees: Vec<u64>,
    /// C = d 3^r prod m_j.
    pub c_const: BigUint,
    /// Conservative upper evaluation of the apex-count threshold.
    pub s_d_threshold: BigUint,
    pub log_base: LogBase,
}

/// Compute the full Turán schedule from the pattern shape: part sizes
/// s_1..s_{d-1} and edge count S.
pub fn turan_schedule(
    part_sizes: &[u64],
    edge_count: u64,
    log_base: LogBase,
) -> Result<TuranSchedule> {
    if part_sizes.is_empty() {
        return Err(Error::invalid("pattern must have at least one part"));
    }
    if edge_count == 0 {
        return Err(Error::invalid("pattern must have at least one edge"));
    }
    if part_sizes.contains(&0) {
        return Err(Error::invalid("pattern part sizes must be positive"));
    }
    let d = part_sizes.len() + 1;
    let s_edges = edge_count;
    let s_max = *part_sizes.iter().max().unwrap();
    let beta_cubed = (d * d + 4 * d - 5) as u64;
    // t = ceil(beta (S s)^{1/3}) = ceil((beta^3 S s)^{1/3}), exact.
    let t = kth_root_ceil(beta_cubed as u128 * s_edges as u128 * s_max as u128, 3) as u64;
    let r = s_edges + t + 3;
    let sum_parts: u64 = part_sizes.iter().sum();
    let l = (s_edges + t) * sum_parts;
    let n_proj = s_edges + t + r;
    debug_assert_eq!(n_proj, 2 * r - 3);
    let degrees: Vec<u64> = (1..=t).map(|j| d_function(t - j + 1, l as u128)).collect();
    debug_assert_eq!(*degrees.last().unwrap(), l);
    let mut prod_m = BigUint::one();
    for &m in &degrees {
        prod_m *= BigUint::from(m);
    }
    let c_const = BigUint::from(d as u64) * BigUint::from(3u32).pow(r as u32) * &prod_m;
    // Threshold factor: (3(d-1) t^3 / beta^2)^{ceil(1 + log t)}, evaluated
    // upward from the enclosure, times 3^{t+3} t! 9^S.
    let (beta_lo, beta_hi) = cbrt_enclosure(beta_cubed);
    let kappa = log_base.ceil_one_plus_log(t);
    let beta_sq_lo = &beta_lo * &beta_lo;
    let base_hi = BigRational::from(BigInt::from(3 * (d as u64 - 1) * t * t * t)) / beta_sq_lo;
    let mut factor = BigRational::one();
    for _ in 0..kappa {
        factor *= &base_hi;
    }
    let s_d_threshold = ceil_rational(&factor)
        * BigUint::from(3u32).pow(t as u32 + 3)
        * factorial_big(t)
        * BigUint::from(9u32).pow(s_edges as u32);
    Ok(TuranSchedule {
        d,
        part_sizes: part_sizes.to_vec(),
        s_edges,
        beta_cubed,
        beta_lo,
        beta_hi,
        s_max,
        t,
        r,
        l,
        n_proj,
        degrees,
        c_const,
        s_d_threshold,
        log_base,
    })
}

/// Per-condition report of the hypothesis check for the degree-3 sampling
/// step: m >= 3, l + 1 <= C(t+1+m, m), and max_{2<=u<=s} psi(N,u,m)/(u-1) + 1 <= r.
#[derive(Clone, Debug)]
pub struct PreconditionReport {
    pub m_ok: bool,
    pub l_ok: bool,
    pub psi_ok: bool,
    /// max over u of the psi upper bound divided by (u-1); empty cases
    /// contribute zero.
    pub psi_max: BigRational,
    pub note: Option<String>,
}

impl PreconditionReport {
    pub fn all_ok(&self) -> bool {
        self.m_ok && self.l_ok && self.psi_ok
    }
}

pub fn lem12_precondition_check(
    n_proj: u64,
    m: u64,
    r: u64,
    t: u64,
    l: u64,
    s_max: u64,
) -> PreconditionReport {
    let m_ok = m >= 3;
    let l_ok = BigUint::from(l) + BigUint::one() <= binom_big(t + 1 + m, m);
    let mut psi_max = BigRational::zero();
    let mut note = None;
    let mut psi_ok = true;
    for u in 2..=s_max {
        match psi_upper(n_proj as usize, u, m) {
            PsiBound::Empty => {}
            PsiBound::Bound(b) => {
                let ratio = b / BigRational::from(BigInt::from(u - 1));
                if ratio > psi_max {
                    psi_max = ratio;
                }
            }
            PsiBound::NotApplicable => {
                psi_ok = false;
                note = Some(format!("psi bound not applicable for u = {u}, m = {m}"));
            }
        }
    }
    if psi_ok {
        // max + 1 <= r, exactly.
        psi_ok = &psi_max + BigRational::one() <= BigRational::from(BigInt::from(r));
    }
    PreconditionReport {
        m_ok,
        l_ok,
        psi_ok,
        psi_max,
        note,
    }
}

/// Derived parameters of the sided (Zarankiewicz) construction.
#[derive(Clone, Debug)]
pub struct ZarankiewiczSchedule {
    pub s_edges: u64,
    /// r = ceil(sqrt(S)).
    pub r: u64,
    pub m: u64,
    /// t(m) = max { u : 2 S u <= C(r+m+1, m) - 1 }.
    pub t: u64,
    /// 2 S t <= C(r+m+1, m) - 1 < 2 S (t+1); true by construction, recorded.
    pub bracket_ok: bool,
    /// m^S prod_j D(r-j+1, 2 S t + 1): the generic apex threshold at these
    /// parameters.
    pub apex_threshold: BigUint,
}

pub fn zarankiewicz_schedule(s_edges: u64, m: u64) -> Result<ZarankiewiczSchedule> {
    if s_edges == 0 || m == 0 {
        return Err(Error::invalid("need S >= 1 and m >= 1"));
    }
    let r = kth_root_ceil(s_edges as u128, 2) as u64;
    let budget = binom_big(r + m + 1, m) - BigUint::one();
    let t_big = &budget / BigUint::from(2 * s_edges);
    let t = t_big
        .to_u64()
        .ok_or_else(|| Error::invalid("t(m) overflows u64"))?;
    let bracket_ok = BigUint::from(2 * s_edges) * BigUint::from(t) <= budget
        && budget < BigUint::from(2 * s_edges) * BigUint::from(t + 1);
    let mut apex_threshold = BigUint::from(m).pow(s_edges as u32);
    for j in 1..=r {
        apex_threshold *= BigUint::from(d_function(r - j + 1, 2 * s_edges as u128 * t as u128 + 1));
    }
    Ok(ZarankiewiczSchedule {
        s_edges,
        r,
        m,
        t,
        bracket_ok,
        apex_threshold,
    })
}

/// Feasibility of the sided construction hypotheses for explicit part sizes:
/// C(r+m+1, m) > 2 t S and s_d > m^S prod_j D(r-j+1, 2 s_1...s_{d-1} t + 1).
#[derive(Clone, Debug)]
pub struct Lem14Report {
    pub binom_ok: bool,
    pub threshold: BigUint,
    pub s_d_ok: bool,
}

impl Lem14Report {
    pub fn feasible(&self) -> bool {
        self.binom_ok && self.s_d_ok
    }
}

pub fn lem14_feasible(
    part_sizes: &[u64],
    s_edges: u64,
    t: u64,
    r: u64,
    m: u64,
) -> Result<Lem14Report> {
    if part_sizes.len() < 2 {
        return Err(Error::invalid(
            "need all d part sizes including the apex part",
        ));
    }
    if part_sizes.contains(&0) || s_edges == 0 || t == 0 || r == 0 || m == 0 {
        return Err(Error::invalid("all parameters must be positive"));
    }
    let binom_ok = binom_big(r + m + 1, m) > BigUint::from(2 * t) * BigUint::from(s_edges);
    let d = part_sizes.len();
    let prefix_product: u128 = part_sizes[..d - 1].iter().map(|&s| s as u128).product();
    let mut threshold = BigUint::from(m).pow(s_edges as u32);
    for j in 1..=r {
        threshold *= BigUint::from(d_function(r - j + 1, 2 * prefix_product * t as u128 + 1));
    }
    let s_d_ok = BigUint::from(part_sizes[d - 1]) > threshold;
    Ok(Lem14Report {
        binom_ok,
        threshold,
        s_d_ok,
    })
}

/// Largest prime p with c p^s <= n; the Bertrand window guarantees
/// n <= c (2p)^s, which is re-verified before returning.
pub fn select_prime(n: u128, c: u128, s_exp: u32) -> Result<u64> {
    if c == 0 || s_exp == 0 {
        return Err(Error::invalid("need c >= 1 and s >= 1"));
    }
    // x = max { k : c k^s <= n }.
    let mut x = kth_root_floor(n / c, s_exp);
    while x
        .checked_pow(s_exp)
        .and_then(|v| v.checked_mul(c))
        .is_none_or(|v| v > n)
    {
        if x == 0 {
            break;
        }
        x -= 1;
    }
    if x < 2 {
        return Err(Error::invalid(format!(
            "window empty: no prime p with {c} p^{s_exp} <= {n}"
        )));
    }
    let mut p = x as u64;
    while !is_prime(p) {
        p -= 1;
    }
    // Bertrand: the next prime is below 2p, so n < c (2p)^s.
    let upper = (2 * p as u128)
        .checked_pow(s_exp)
        .and_then(|v| v.checked_mul(c));
    match upper {
        Some(u) if n <= u => Ok(p),
        None => Ok(p), // overflow: the window certainly covers n
        Some(u) => Err(Error::VerificationFailed(format!(
            "Bertrand window violated: n = {n} > c (2p)^s = {u}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_function_examples() {
        assert_eq!(d_function(1, 5), 5);
        assert_eq!(d_function(7, 0), 0);
        assert_eq!(d_function(2, 3), 2);
        assert_eq!(d_function(1, 12), 12);
        assert_eq!(d_function(2, 12), 4);
        assert_eq!(d_function(3, 12), 3);
        assert_eq!(d_function(4, 12), 2);
        // Defining bracket: C(D-1+r, r) <= t < C(D+r, r).
        for r in 1..=5u64 {
            for t in 0..=60u128 {
                let d = d_function(r, t);
                assert!(checked_binom_u128(d + r, r).unwrap() > t);
                if d > 0 {
                    assert!(checked_binom_u128(d - 1 + r, r).unwrap() <= t);
                }
            }
        }
    }

    #[test]
    fn product_bound_examples() {
        let chk = product_bound_check(2, 3, LogBase::Two);
        assert_eq!(chk.product, BigUint::from(6u32)); // D(1,3) = 3, D(2,3) = 2
        assert!(chk.holds);
        let chk = product_bound_check(1, 17, LogBase::Two);
        assert_eq!(chk.product, BigUint::from(17u32));
        assert_eq!(chk.bound, BigUint::from(17u32));
        assert!(chk.holds);
    }

    #[test]
    fn product_bound_sweep() {
        for r in 1..=8u64 {
            for t in 1..=200u64 {
                assert!(
                    product_bound_check(r, t, LogBase::Two).holds,
                    "violation at r={r}, t={t}"
                );
            }
        }
    }

    #[test]
    fn turan_schedule_reference_case() {
        // d = 2, s_1 = 2, two pattern edges.
        let sched = turan_schedule(&[2], 2, LogBase::Two).unwrap();
        assert_eq!(sched.beta_cubed, 7);
        assert_eq!(sched.t, 4);
        assert_eq!(sched.r, 9);
        assert_eq!(sched.l, 12);
        assert_eq!(sched.n_proj, 15);
        assert_eq!(sched.degrees, vec![2, 3, 4, 12]);
        assert_eq!(sched.n_proj, 2 * sched.r - 3);
        assert_eq!(
            sched.c_const,
            BigUint::from(2u32) * BigUint::from(3u32).pow(9) * BigUint::from(288u32)
        );
        // Hypotheses hold with m = 3, and C(t+4, 3) > l.
        let pre = lem12_precondition_check(sched.n_proj, 3, sched.r, sched.t, sched.l, sched.s_max);
        assert!(pre.m_ok && pre.l_ok && pre.psi_ok);
        assert!(binom_big(sched.t + 4, 3) > BigUint::from(sched.l));
    }

    #[test]
    fn turan_schedule_single_vertex_pattern() {
        // d = 2, s_1 = 1, one edge: t = ceil(7^{1/3}) = 2, r = 6, l = 3, N = 9.
        let sched = turan_schedule(&[1], 1, LogBase::Two).unwrap();
        assert_eq!(sched.t, 2);
        assert_eq!(sched.r, 6);
        assert_eq!(sched.l, 3);
        assert_eq!(sched.n_proj, 9);
    }

    #[test]
    fn turan_schedule_internal_identities() {
        for (parts, edges) in [
            (vec![2u64], 2u64),
            (vec![2, 2], 4),
            (vec![3], 3),
            (vec![2, 1], 2),
        ] {
            let sched = turan_schedule(&parts, edges, LogBase::Two).unwrap();
            assert_eq!(sched.n_proj, 2 * sched.r - 3);
            assert_eq!(*sched.degrees.last().unwrap(), sched.l);
            // prod m_j <= l^{ceil(1+log2 t)} t!.
            let chk = product_bound_check(sched.t, sched.l, LogBase::Two);
            let mut prod = BigUint::one();
            for &m in &sched.degrees {
                prod *= BigUint::from(m);
            }
            assert_eq!(prod, chk.product);
            assert!(chk.holds);
            // Proof chain: C(t+4, 3) > l.
            assert!(binom_big(sched.t + 4, 3) > BigUint::from(sched.l));
            // Enclosure brackets the real cube root.
            let lo3 = &sched.beta_lo * &sched.beta_lo * &sched.beta_lo;
            let hi3 = &sched.beta_hi * &sched.beta_hi * &sched.beta_hi;
            let target = BigRational::from(BigInt::from(sched.beta_cubed));
            assert!(lo3 <= target && target <= hi3);
        }
    }

    #[test]
    fn precondition_check_failures() {
        // m = 2 fails the degree condition.
        let pre = lem12_precondition_check(15, 2, 9, 4, 12, 2);
        assert!(!pre.m_ok);
        // Boundary: l = C(t+1+m, m) fails l + 1 <= C(t+1+m, m).
        let boundary = binom_big(4 + 1 + 3, 3).to_u64().unwrap();
        let pre = lem12_precondition_check(15, 3, 9, 4, boundary, 2);
        assert!(!pre.l_ok);
    }

    #[test]
    fn zarankiewicz_schedule_examples() {
        let s = zarankiewicz_schedule(4, 3).unwrap();
        assert_eq!(s.r, 2);
        assert_eq!(s.t, 2);
        assert!(s.bracket_ok);
        let s = zarankiewicz_schedule(1, 1).unwrap();
        assert_eq!(s.r, 1);
        assert_eq!(s.t, 1);
        // Monotonicity of t in m.
        for s_edges in 1..=10u64 {
            let mut prev = 0;
            for m in 1..=10u64 {
                let sch = zarankiewicz_schedule(s_edges, m).unwrap();
                assert!(sch.t >= prev, "t(m) must be nondecreasing");
                assert!(sch.bracket_ok);
                prev = sch.t;
            }
        }
    }

    #[test]
    fn lem14_examples() {
        // S=2, r=2, m=3, t=3, parts (2,1): threshold 9 * D(2,13) * D(1,13)
        // = 9 * 4 * 13 = 468.
        let rep = lem14_feasible(&[2, 1, 469], 2, 3, 2, 3).unwrap();
        assert!(rep.binom_ok); // C(6,3) = 20 > 12
        assert_eq!(rep.threshold, BigUint::from(468u32));
        assert!(rep.s_d_ok);
        assert!(rep.feasible());
        // Boundary: s_d equal to the threshold is infeasible (strict).
        let rep = lem14_feasible(&[2, 1, 468], 2, 3, 2, 3).unwrap();
        assert!(!rep.s_d_ok);
        // Huge t kills the binomial condition.
        let rep = lem14_feasible(&[2, 1, 1000], 2, 1_000_000, 2, 3).unwrap();
        assert!(!rep.binom_ok);
    }

    #[test]
    fn select_prime_examples() {
        assert_eq!(select_prime(1_000_000, 10, 2).unwrap(), 313);
        // Smallest window: n = c 2^s + 1 admits p = 2.
        assert_eq!(select_prime(41, 10, 2).unwrap(), 2);
        assert!(select_prime(40, 10, 2).is_ok()); // c 2^s = 40 <= 40
        assert!(select_prime(39, 10, 2).is_err());
    }

    #[test]
    fn select_prime_bertrand_sweep() {
        for exp in 3..=7u32 {
            let n = 10u128.pow(exp);
            for c in 1..=20u128 {
                for s_exp in 1..=4u32 {
                    if n <= c * (1 << s_exp) {
                        continue;
                    }
                    let p = select_prime(n, c, s_exp).unwrap();
                    let pk = (p as u128).pow(s_exp);
                    assert!(c * pk <= n);
                    assert!(n <= c * (2 * p as u128).pow(s_exp));
                }
            }
        }
    }

    #[test]
    fn log_exponent_values() {
        assert_eq!(LogBase::Two.ceil_one_plus_log(1), 1);
        assert_eq!(LogBase::Two.ceil_one_plus_log(2), 2);
        assert_eq!(LogBase::Two.ceil_one_plus_log(3), 3);
        assert_eq!(LogBase::Two.ceil_one_plus_log(4), 3);
        assert_eq!(LogBase::Two.ceil_one_plus_log(5), 4);
        assert_eq!(LogBase::E.ceil_one_plus_log(1), 1);
        assert_eq!(LogBase::E.ceil_one_plus_log(2), 2);
        assert_eq!(LogBase::E.ceil_one_plus_log(3), 3); // ln 3 = 1.0986
        assert_eq!(LogBase::E.ceil_one_plus_log(7), 3); // ln 7 = 1.9459
        assert_eq!(LogBase::E.ceil_one_plus_log(8), 4); // ln 8 = 2.0794
    }

    #[test]
    fn kth_roots() {
        assert_eq!(kth_root_floor(27, 3), 3);
        assert_eq!(kth_root_floor(28, 3), 3);
        assert_eq!(kth_root_floor(26, 3), 2);
        assert_eq!(kth_root_ceil(27, 3), 3);
        assert_eq!(kth_root_ceil(28, 3), 4);
        assert_eq!(kth_root_ceil(2, 2), 2);
        for n in 0..200u128 {
            let f = kth_root_floor(n, 2);
            assert!(f * f <= n && (f + 1) * (f + 1) > n);
        }
    }
}
