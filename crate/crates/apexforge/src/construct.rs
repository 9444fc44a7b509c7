//! Construction pipelines: rejection-sampled random algebraic hypergraphs
//! with certificates.
//!
//! The Turán pipeline samples, per part, a regular sequence f cutting out an
//! s-wise m-independent variety, cuts it down by random forms h, then draws a
//! multihomogeneous form g and keeps the edge set where g vanishes. Attempts
//! are accepted only when the edge count clears the p-power bound and the
//! measured common-apex maximum stays under the degree-product cap; every
//! retry is logged. The sided pipeline follows the three-step variant:
//! independent points per prefix part, a form g, cutting forms h, and a
//! padded apex part.

use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::certificate::{
    indep_to_json, multi_from_json, multi_to_json, poly_from_json, poly_to_json, read_edge_file,
    reg_cert_to_json, Bounds, Certificate, FieldJson, MultiPolyJson, PolyJson, RetryLog,
    Verification, CERT_VERSION,
};
use crate::geometry::{variety_points, PointSet, ProjPoint};
use crate::gf::{FieldElement, FieldParams};
use crate::hypergraph::{
    is_apex_free, max_common_apex, zarankiewicz_edge_bound, FreeMode, PartAssignment,
    PartiteHypergraph, Pattern,
};
use crate::poly::{monomial_values_u64, HomogPoly, MonomialBasis, MultiHomogPoly};
use crate::regseq::{
    is_regular_hilbert, is_regular_koszul, is_swise_independent, IndependenceReport,
    RegularityCertificate,
};
use crate::rng::{stream_id, SeedStream, StreamStage};
use crate::schedule::{lem14_feasible, turan_schedule, zarankiewicz_schedule, LogBase};
use crate::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Retry and enumeration budgets; attempts default to 50 per stage.
#[derive(Serialize, Deserialize, Copy, Clone, Debug)]
pub struct Budgets {
    pub attempts: u32,
    pub enumeration: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            attempts: 50,
            enumeration: crate::geometry::DEFAULT_ENUM_BUDGET as u64,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PatternJson {
    pub part_sizes: Vec<usize>,
    pub edges: Vec<Vec<u32>>,
}

impl PatternJson {
    pub fn of(pattern: &Pattern) -> Self {
        PatternJson {
            part_sizes: pattern.part_sizes().to_vec(),
            edges: pattern.edges().to_vec(),
        }
    }

    pub fn to_pattern(&self) -> Result<Pattern> {
        Pattern::new(self.part_sizes.clone(), self.edges.clone())
    }
}

/// Direct-mode dimensions of a Turán run.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TuranParams {
    pub p: u64,
    pub n_proj: usize,
    pub m: u32,
    pub r: usize,
    pub t: usize,
    /// Degrees m_1..m_t of the cutting forms.
    pub degrees: Vec<u32>,
    pub pattern: PatternJson,
    pub seed: u64,
    pub log_base: String,
    pub budgets: Budgets,
    pub generator: String,
}

impl TuranParams {
    /// Schedule wiring: take the dimensions straight from a computed
    /// schedule (degree-3 forms, cutting degrees m_j = D(t-j+1, l),
    /// N = S + r + t).
    pub fn from_schedule(
        sched: &crate::schedule::TuranSchedule,
        pattern: &Pattern,
        p: u64,
        seed: u64,
    ) -> Result<TuranParams> {
        let parts: Vec<u64> = pattern.part_sizes().iter().map(|&s| s as u64).collect();
        if parts != sched.part_sizes || pattern.edge_count() as u64 != sched.s_edges {
            return Err(Error::invalid("pattern does not match the schedule shape"));
        }
        Ok(TuranParams {
            p,
            n_proj: sched.n_proj as usize,
            m: 3,
            r: sched.r as usize,
            t: sched.t as usize,
            degrees: sched.degrees.iter().map(|&m| m as u32).collect(),
            pattern: PatternJson::of(pattern),
            seed,
            log_base: sched.log_base.name().into(),
            budgets: Budgets::default(),
            generator: crate::rng::GENERATOR.into(),
        })
    }
}

/// One part's sampled data.
#[derive(Clone, Debug)]
pub struct TuranPart {
    pub f_polys: Vec<HomogPoly>,
    pub h_polys: Vec<HomogPoly>,
    /// Y_k = V(f)(F_p): the independent variety before cutting.
    pub variety: PointSet,
    /// V_k = V(f, h)(F_p): the vertex set of the part.
    pub vertex_set: PointSet,
    pub reg_hilbert: RegularityCertificate,
    pub reg_koszul: RegularityCertificate,
    pub independence: IndependenceReport,
}

#[derive(Clone, Debug)]
pub struct TuranInstance {
    pub field: FieldParams,
    pub params: TuranParams,
    pub pattern: Pattern,
    pub parts: Vec<TuranPart>,
    pub g: MultiHomogPoly,
    pub retries: RetryLog,
}

pub struct TuranOutcome {
    pub instance: TuranInstance,
    pub graph: PartiteHypergraph,
    pub certificate: Certificate,
    pub edges: Vec<Vec<u32>>,
}

fn parse_budget(enumeration: u64) -> u128 {
    enumeration as u128
}

/// A successful draw of an independent variety: the certified f-sequence,
/// its point set, both regularity certificates, the independence report and
/// the attempt statistics.
pub struct VarietyDraw {
    pub f_polys: Vec<HomogPoly>,
    pub points: PointSet,
    pub reg_hilbert: RegularityCertificate,
    pub reg_koszul: RegularityCertificate,
    pub independence: IndependenceReport,
    pub attempts: u32,
    pub failures: Vec<String>,
}

/// Sample f_1..f_r of degree m until the sequence is regular (both criteria)
/// and V(f)(F_p) is s-wise m-independent.
#[allow(clippy::too_many_arguments)]
pub fn build_independent_variety(
    field: &FieldParams,
    n_proj: usize,
    m: u32,
    r: usize,
    s: usize,
    seed: u64,
    part: usize,
    budgets: &Budgets,
) -> Result<VarietyDraw> {
    if r > n_proj {
        return Err(Error::invalid(format!(
            "need r <= N for a nonnegative-dimensional variety, got r = {r}, N = {n_proj}"
        )));
    }
    if budgets.attempts == 0 {
        return Err(Error::budget(
            "build_independent_variety",
            "attempt budget is zero",
        ));
    }
    let mut failures = Vec::new();
    for attempt in 0..budgets.attempts {
        let mut stream =
            SeedStream::new(seed, stream_id(StreamStage::Variety, part, attempt as u64));
        let f: Vec<HomogPoly> = (0..r)
            .map(|_| HomogPoly::sample_uniform(field, n_proj + 1, m, &mut stream))
            .collect();
        let hcert = is_regular_hilbert(&f, None)?;
        let kcert = is_regular_koszul(&f, None)?;
        if hcert.verdict != kcert.verdict {
            return Err(Error::VerificationFailed(
                "regularity criteria disagree; this is a bug".into(),
            ));
        }
        if !hcert.verdict {
            failures.push(format!("attempt {attempt}: regularity"));
            continue;
        }
        let points = variety_points(&f, field, n_proj, parse_budget(budgets.enumeration))?;
        if points.len() < s {
            failures.push(format!("attempt {attempt}: variety smaller than s"));
            continue;
        }
        let indep = is_swise_independent(&points, s, m)?;
        if !indep.verdict {
            failures.push(format!("attempt {attempt}: independence"));
            continue;
        }
        return Ok(VarietyDraw {
            f_polys: f,
            points,
            reg_hilbert: hcert,
            reg_koszul: kcert,
            independence: indep,
            attempts: attempt + 1,
            failures,
        });
    }
    Err(Error::budget(
        "build_independent_variety",
        format!(
            "no admissible f-sequence in {} attempts: {failures:?}",
            budgets.attempts
        ),
    ))
}

/// Monomial-value vectors of the points in one part, for one group of g.
fn part_monomials(points: &PointSet, num_vars: usize, m: u32, p: u64) -> Vec<Vec<u64>> {
    let basis = MonomialBasis::get(num_vars, m);
    points
        .points()
        .iter()
        .map(|pt| {
            let res: Vec<u64> = pt.coords().iter().map(|c| c.residue()).collect();
            monomial_values_u64(&basis, &res, p)
        })
        .collect()
}

fn contract_first(tensor: &[u64], mono: &[u64], p: u64) -> Vec<u64> {
    let block = tensor.len() / mono.len();
    let mut out = vec![0u64; block];
    for (i, &mv) in mono.iter().enumerate() {
        if mv == 0 {
            continue;
        }
        let chunk = &tensor[i * block..(i + 1) * block];
        for (o, &t) in out.iter_mut().zip(chunk.iter()) {
            *o = (*o + mv * t) % p;
        }
    }
    out
}

/// Edge set {(v_1..v_d) in prod V_k : g(v_1,..,v_d) = 0}, as part-local index
/// tuples in lexicographic order.
pub fn assemble_edges(g: &MultiHomogPoly, part_points: &[&PointSet]) -> Result<Vec<Vec<u32>>> {
    let field = g.field().clone();
    if field.e() != 1 {
        return Err(Error::invalid("edge assembly runs over prime fields"));
    }
    let p = field.p();
    let groups = g.groups();
    if groups.len() != part_points.len() {
        return Err(Error::DimensionMismatch(
            "one point set per tensor group".into(),
        ));
    }
    for (k, (&(n_vars, _), pts)) in groups.iter().zip(part_points.iter()).enumerate() {
        if pts.n_proj() + 1 != n_vars {
            return Err(Error::DimensionMismatch(format!(
                "group {k} expects ambient dimension {}, point set has {}",
                n_vars - 1,
                pts.n_proj()
            )));
        }
    }
    let monos: Vec<Vec<Vec<u64>>> = groups
        .iter()
        .zip(part_points.iter())
        .map(|(&(n_vars, m), pts)| part_monomials(pts, n_vars, m, p))
        .collect();
    let tensor: Vec<u64> = g.coeffs().iter().map(|c| c.residue()).collect();
    let mut edges = Vec::new();
    let mut prefix: Vec<u32> = Vec::new();
    fn rec(
        depth: usize,
        tensor: &[u64],
        monos: &[Vec<Vec<u64>>],
        p: u64,
        prefix: &mut Vec<u32>,
        edges: &mut Vec<Vec<u32>>,
    ) {
        if depth + 1 == monos.len() {
            for (j, mono) in monos[depth].iter().enumerate() {
                let mut acc: u128 = 0;
                for (t, &mv) in tensor.iter().zip(mono.iter()) {
                    acc += (*t as u128) * (mv as u128);
                }
                if acc.is_multiple_of(p as u128) {
                    let mut e = prefix.clone();
                    e.push(j as u32);
                    edges.push(e);
                }
            }
            return;
        }
        for (i, mono) in monos[depth].iter().enumerate() {
            let contracted = contract_first(tensor, mono, p);
            prefix.push(i as u32);
            rec(depth + 1, &contracted, monos, p, prefix, edges);
            prefix.pop();
        }
    }
    rec(0, &tensor, &monos, p, &mut prefix, &mut edges);
    Ok(edges)
}

/// Re-evaluate g on a list of edges; true when every edge vanishes and all
/// indices are in range.
pub fn recheck_edges(
    g: &MultiHomogPoly,
    part_points: &[&PointSet],
    edges: &[Vec<u32>],
) -> Result<bool> {
    for e in edges {
        if e.len() != part_points.len() {
            return Ok(false);
        }
        let mut coords: Vec<&[FieldElement]> = Vec::with_capacity(e.len());
        for (k, &idx) in e.iter().enumerate() {
            let Some(pt) = part_points[k].points().get(idx as usize) else {
                return Ok(false);
            };
            coords.push(pt.coords());
        }
        if !g.evaluate_multi(&coords)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Common-apex cap from the degree product: all polynomial degrees cutting
/// the apex fiber multiplied together.
pub fn turan_codegree_cap(m: u32, r: usize, s_edges: usize, degrees: &[u32]) -> BigUint {
    let mut cap = BigUint::from(m as u64).pow((r + s_edges) as u32);
    for &d in degrees {
        cap *= BigUint::from(d as u64);
    }
    cap
}

pub fn build_turan(params: &TuranParams, pattern: &Pattern) -> Result<TuranOutcome> {
    let field = FieldParams::prime(params.p)?;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    let _log_base = LogBase::parse(&params.log_base)?;
    if params.degrees.len() != params.t {
        return Err(Error::invalid(format!(
            "need {} cutting degrees, got {}",
            params.t,
            params.degrees.len()
        )));
    }
    if params.r + params.t + s_edges != params.n_proj {
        return Err(Error::invalid(format!(
            "need r + t = N - S so the parts have dimension S: r={}, t={}, N={}, S={s_edges}",
            params.r, params.t, params.n_proj
        )));
    }
    if params.m == 0 {
        return Err(Error::invalid("degree m must be positive"));
    }
    let s_max = *pattern.part_sizes().iter().max().unwrap();
    let mut retries = RetryLog::default();

    // Stage A + B per part: independent variety, then cutting forms.
    let mut parts: Vec<TuranPart> = Vec::with_capacity(d);
    for k in 0..d {
        let draw = build_independent_variety(
            &field,
            params.n_proj,
            params.m,
            params.r,
            s_max,
            params.seed,
            k,
            &params.budgets,
        )?;
        let VarietyDraw {
            f_polys,
            points: variety,
            reg_hilbert,
            reg_koszul,
            independence,
            attempts,
            failures,
        } = draw;
        retries.push(format!("variety_part_{k}"), attempts, failures);
        let mut cut_failures = Vec::new();
        let mut found: Option<(Vec<HomogPoly>, PointSet)> = None;
        let mut attempts_b = 0;
        for attempt in 0..params.budgets.attempts.max(1) {
            attempts_b = attempt + 1;
            let mut stream =
                SeedStream::new(params.seed, stream_id(StreamStage::Cut, k, attempt as u64));
            let h_polys: Vec<HomogPoly> = params
                .degrees
                .iter()
                .map(|&mj| HomogPoly::sample_uniform(&field, params.n_proj + 1, mj, &mut stream))
                .collect();
            // V_k = Y_k cut by the h's: filter the enumerated variety.
            let kept: Vec<ProjPoint> = variety
                .points()
                .iter()
                .filter(|pt| {
                    h_polys.iter().all(|h| {
                        h.evaluate(pt.coords())
                            .map(|v| v.is_zero())
                            .unwrap_or(false)
                    })
                })
                .cloned()
                .collect();
            if kept.is_empty() {
                cut_failures.push(format!("attempt {attempt}: empty part"));
                continue;
            }
            let vertex_set = PointSet::new(field.clone(), params.n_proj, kept);
            // Degree-product point bound, asserted on every run.
            let degree_product: u128 = (params.m as u128).pow(params.r as u32)
                * params
                    .degrees
                    .iter()
                    .map(|&mj| mj as u128)
                    .product::<u128>();
            if vertex_set.len() as u128
                > crate::geometry::point_count_upper(
                    degree_product,
                    params.n_proj,
                    params.p as u128,
                )
            {
                return Err(Error::VerificationFailed(
                    "variety exceeds its degree-product point bound; this is a bug".into(),
                ));
            }
            found = Some((h_polys, vertex_set));
            break;
        }
        retries.push(format!("cut_part_{k}"), attempts_b, cut_failures);
        let Some((h_polys, vertex_set)) = found else {
            return Err(Error::budget(
                "build_turan",
                format!("part {k} stayed empty for every cutting attempt"),
            ));
        };
        parts.push(TuranPart {
            f_polys,
            h_polys,
            variety,
            vertex_set,
            reg_hilbert,
            reg_koszul,
            independence,
        });
    }

    // Stage C: the edge form g, gated on the edge bound and the apex cap.
    let cap = turan_codegree_cap(params.m, params.r, s_edges, &params.degrees);
    let p_power = BigUint::from(params.p).pow((d * s_edges - 1) as u32);
    let groups: Vec<(usize, u32)> = (0..d).map(|_| (params.n_proj + 1, params.m)).collect();
    let point_refs: Vec<&PointSet> = parts.iter().map(|pk| &pk.vertex_set).collect();
    let mut g_failures = Vec::new();
    for attempt in 0..params.budgets.attempts.max(1) {
        let mut stream = SeedStream::new(
            params.seed,
            stream_id(StreamStage::EdgeForm, 0, attempt as u64),
        );
        let g = MultiHomogPoly::sample_uniform(&field, &groups, &mut stream)?;
        let edges = assemble_edges(&g, &point_refs)?;
        if BigUint::from(2 * edges.len() as u64) < p_power {
            g_failures.push(format!(
                "attempt {attempt}: edge_bound ({} edges)",
                edges.len()
            ));
            continue;
        }
        let graph = PartiteHypergraph::new(
            parts.iter().map(|pk| pk.vertex_set.len()).collect(),
            edges.clone(),
        )?;
        let (realized_k, _witness) =
            max_common_apex(&graph, pattern, &PartAssignment::identity(d))?;
        if BigUint::from(realized_k as u64) > cap {
            g_failures.push(format!(
                "attempt {attempt}: apex_cap (measured {realized_k}, cap {cap})"
            ));
            continue;
        }
        retries.push("edge_form", attempt + 1, g_failures);
        let instance = TuranInstance {
            field: field.clone(),
            params: params.clone(),
            pattern: pattern.clone(),
            parts,
            g,
            retries: retries.clone(),
        };
        let certificate = turan_certificate(&instance, &graph, realized_k, &cap, &p_power)?;
        return Ok(TuranOutcome {
            instance,
            graph,
            certificate,
            edges,
        });
    }
    Err(Error::budget(
        "build_turan",
        format!(
            "no admissible edge form in {} attempts: {g_failures:?}",
            params.budgets.attempts
        ),
    ))
}

fn rational_half(num: &BigUint) -> String {
    format!("{num}/2")
}

fn turan_certificate(
    instance: &TuranInstance,
    graph: &PartiteHypergraph,
    realized_k: usize,
    cap: &BigUint,
    p_power: &BigUint,
) -> Result<Certificate> {
    let params = &instance.params;
    let pattern = &instance.pattern;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    let f_json: Vec<Vec<PolyJson>> = instance
        .parts
        .iter()
        .map(|pk| pk.f_polys.iter().map(poly_to_json).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let h_json: Vec<Vec<PolyJson>> = instance
        .parts
        .iter()
        .map(|pk| pk.h_polys.iter().map(poly_to_json).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let g_json: MultiPolyJson = multi_to_json(&instance.g)?;
    let mut reg_certs = Vec::new();
    let mut indep_reports = Vec::new();
    for pk in &instance.parts {
        reg_certs.push(reg_cert_to_json(&pk.reg_hilbert)?);
        reg_certs.push(reg_cert_to_json(&pk.reg_koszul)?);
        indep_reports.push(indep_to_json(&pk.independence));
    }
    // Paper-mode schedule for this pattern, embedded for reference.
    let sched = turan_schedule(
        &pattern
            .part_sizes()
            .iter()
            .map(|&s| s as u64)
            .collect::<Vec<_>>(),
        s_edges as u64,
        LogBase::parse(&params.log_base)?,
    )?;
    let paper_schedule = serde_json::json!({
        "t": sched.t,
        "r": sched.r,
        "l": sched.l,
        "n_proj": sched.n_proj,
        "degrees": sched.degrees,
        "c_const": sched.c_const.to_string(),
        "s_d_threshold": sched.s_d_threshold.to_string(),
        "log_base": sched.log_base.name(),
    });
    let verification = Verification {
        edge_recheck: true,
        regularity_certs: reg_certs,
        independence_reports: indep_reports,
        realized_k: realized_k as u64,
        e_g: graph.edge_count() as u64,
        bounds: Bounds {
            half_p_power: rational_half(p_power),
            codegree_cap: cap.to_string(),
        },
        exponent_target: d as f64 - 1.0 / s_edges as f64,
    };
    Ok(Certificate {
        version: crate::certificate::CERT_VERSION,
        mode: "turan".into(),
        field: FieldJson { p: params.p, e: 1 },
        params: serde_json::json!({
            "direct": serde_json::to_value(params)?,
            "paper_schedule": paper_schedule,
        }),
        polynomials: serde_json::json!({ "f": f_json, "h": h_json, "g": g_json }),
        parts: graph.part_sizes().iter().map(|&n| n as u64).collect(),
        edges_file: String::new(),
        verification,
        retries: instance.retries.clone(),
        tool_version: TOOL_VERSION.into(),
    })
}

/// Direct-mode dimensions of a sided (Zarankiewicz) run.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ZarParams {
    pub p: u64,
    /// Ambient projective dimension of the prefix parts.
    pub n_prefix: usize,
    /// Ambient projective dimension of the apex part; must equal r + S.
    pub n_proj: usize,
    /// Part sizes n_1..n_d (the apex part size last).
    pub sizes: Vec<u64>,
    pub m: u32,
    pub r: usize,
    /// Degrees m_1..m_r of the cutting forms on the apex side.
    pub degrees: Vec<u32>,
    pub pattern: PatternJson,
    pub seed: u64,
    pub budgets: Budgets,
    pub generator: String,
}

#[derive(Clone, Debug)]
pub struct ZarInstance {
    pub field: FieldParams,
    pub params: ZarParams,
    pub pattern: Pattern,
    /// Y_1..Y_{d-1}: independent point sets in P^n.
    pub prefix_parts: Vec<PointSet>,
    pub g: MultiHomogPoly,
    pub h_polys: Vec<HomogPoly>,
    /// V(h)(F_p) plus padding, in canonical order: the apex part.
    pub apex_part: PointSet,
    /// Number of points of the apex part lying on V(h).
    pub cut_size: usize,
    pub retries: RetryLog,
}

pub struct ZarOutcome {
    pub instance: ZarInstance,
    pub graph: PartiteHypergraph,
    pub certificate: Certificate,
    pub edges: Vec<Vec<u32>>,
}

/// The first n points of P^n(F_p) spanned by standard basis vectors:
/// e_0, ..., e_{count-1}.
pub fn standard_basis_points(field: &FieldParams, n_proj: usize, count: usize) -> Result<PointSet> {
    if count > n_proj + 1 {
        return Err(Error::invalid(format!(
            "only {} independent points exist in P^{n_proj}",
            n_proj + 1
        )));
    }
    let points = (0..count)
        .map(|i| {
            let mut coords = vec![field.zero(); n_proj + 1];
            coords[i] = field.one();
            crate::geometry::canonicalize(&coords, field).expect("basis vector")
        })
        .collect();
    Ok(PointSet::new(field.clone(), n_proj, points))
}

pub fn build_zarankiewicz(params: &ZarParams, pattern: &Pattern) -> Result<ZarOutcome> {
    let field = FieldParams::prime(params.p)?;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    if params.sizes.len() != d {
        return Err(Error::invalid(format!(
            "need {d} part sizes, got {}",
            params.sizes.len()
        )));
    }
    if params.n_proj != params.r + s_edges {
        return Err(Error::invalid(format!(
            "apex ambient must satisfy N = r + S: N={}, r={}, S={s_edges}",
            params.n_proj, params.r
        )));
    }
    if params.degrees.len() != params.r {
        return Err(Error::invalid(format!(
            "need {} cutting degrees, got {}",
            params.r,
            params.degrees.len()
        )));
    }
    for (i, (&n_i, &s_i)) in params.sizes[..d - 1]
        .iter()
        .zip(pattern.part_sizes().iter())
        .enumerate()
    {
        if n_i as usize > params.n_prefix + 1 {
            return Err(Error::invalid(format!(
                "part {i} wants {n_i} independent points but P^{} has only {}",
                params.n_prefix,
                params.n_prefix + 1
            )));
        }
        if (s_i as u64) > n_i {
            return Err(Error::invalid(format!(
                "pattern part {i} of size {s_i} exceeds host part of size {n_i}"
            )));
        }
    }
    let total_apex_points = crate::geometry::projective_count(params.n_proj, params.p as u128);
    if params.sizes[d - 1] as u128 > total_apex_points {
        return Err(Error::invalid(format!(
            "apex part size {} exceeds |P^{}(F_{})| = {total_apex_points}",
            params.sizes[d - 1],
            params.n_proj,
            params.p
        )));
    }

    let mut retries = RetryLog::default();
    // Prefix parts: standard-basis independent points; n_i-wise independent
    // for every degree.
    let prefix_parts: Vec<PointSet> = params.sizes[..d - 1]
        .iter()
        .map(|&n_i| standard_basis_points(&field, params.n_prefix, n_i as usize))
        .collect::<Result<_>>()?;
    let mut indep_reports = Vec::new();
    for (pts, &s_i) in prefix_parts.iter().zip(pattern.part_sizes().iter()) {
        let rep = is_swise_independent(pts, s_i, params.m)?;
        if !rep.verdict {
            return Err(Error::VerificationFailed(
                "standard basis points failed independence; this is a bug".into(),
            ));
        }
        indep_reports.push(rep);
    }

    let mut groups: Vec<(usize, u32)> = (0..d - 1)
        .map(|_| (params.n_prefix + 1, params.m))
        .collect();
    groups.push((params.n_proj + 1, params.m));
    let cap = {
        let mut c = BigUint::from(params.m as u64).pow(s_edges as u32);
        for &mj in &params.degrees {
            c *= BigUint::from(mj as u64);
        }
        c
    };
    let n_d = params.sizes[d - 1];
    let edge_bound_prefix: Vec<u64> = params.sizes[..d - 1].to_vec();
    let mut failures = Vec::new();
    for attempt in 0..params.budgets.attempts.max(1) {
        let mut g_stream = SeedStream::new(
            params.seed,
            stream_id(StreamStage::EdgeForm, 0, attempt as u64),
        );
        let g = MultiHomogPoly::sample_uniform(&field, &groups, &mut g_stream)?;
        let mut h_stream =
            SeedStream::new(params.seed, stream_id(StreamStage::Cut, 0, attempt as u64));
        let h_polys: Vec<HomogPoly> = params
            .degrees
            .iter()
            .map(|&mj| HomogPoly::sample_uniform(&field, params.n_proj + 1, mj, &mut h_stream))
            .collect();
        let cut_set = variety_points(
            &h_polys,
            &field,
            params.n_proj,
            parse_budget(params.budgets.enumeration),
        )?;
        if cut_set.len() as u64 > n_d {
            failures.push(format!(
                "attempt {attempt}: |V(h)| = {} exceeds n_d = {n_d}",
                cut_set.len()
            ));
            continue;
        }
        let degree_product: u128 = params
            .degrees
            .iter()
            .map(|&mj| mj as u128)
            .product::<u128>()
            .max(1);
        if cut_set.len() as u128
            > crate::geometry::point_count_upper(degree_product, params.n_proj, params.p as u128)
        {
            return Err(Error::VerificationFailed(
                "variety exceeds its degree-product point bound; this is a bug".into(),
            ));
        }
        // Edges live on the V(h) portion of the apex part.
        let mut point_refs: Vec<&PointSet> = prefix_parts.iter().collect();
        point_refs.push(&cut_set);
        let edges = assemble_edges(&g, &point_refs)?;
        let (zar_bound, meets) = zarankiewicz_edge_bound(
            edges.len() as u64,
            params.p,
            s_edges as u32,
            &edge_bound_prefix,
        );
        if !meets {
            failures.push(format!(
                "attempt {attempt}: edge_bound ({} edges < {zar_bound}/2)",
                edges.len()
            ));
            continue;
        }
        // Pad the apex part to n_d with canonical-order points off V(h).
        let apex_part = pad_point_set(&cut_set, n_d as usize, params.budgets.enumeration)?;
        let mut part_sizes: Vec<usize> =
            params.sizes[..d - 1].iter().map(|&n| n as usize).collect();
        part_sizes.push(n_d as usize);
        let graph = PartiteHypergraph::new(part_sizes, edges.clone())?;
        let (realized_k, _witness) =
            max_common_apex(&graph, pattern, &PartAssignment::identity(d))?;
        if BigUint::from(realized_k as u64) > cap {
            failures.push(format!(
                "attempt {attempt}: apex_cap (measured {realized_k}, cap {cap})"
            ));
            continue;
        }
        retries.push("zar_attempt", attempt + 1, failures);
        // Informational regularity record for the cutting sequence.
        let reg_h = is_regular_hilbert(&h_polys, None)?;
        let reg_k = is_regular_koszul(&h_polys, None)?;
        let instance = ZarInstance {
            field: field.clone(),
            params: params.clone(),
            pattern: pattern.clone(),
            prefix_parts,
            g,
            h_polys,
            apex_part,
            cut_size: cut_set.len(),
            retries: retries.clone(),
        };
        let certificate = zar_certificate(
            &instance,
            &graph,
            realized_k,
            &cap,
            &zar_bound,
            &indep_reports,
            &reg_h,
            &reg_k,
        )?;
        return Ok(ZarOutcome {
            instance,
            graph,
            certificate,
            edges,
        });
    }
    Err(Error::budget(
        "build_zarankiewicz",
        format!(
            "no admissible attempt in {}: {failures:?}",
            params.budgets.attempts
        ),
    ))
}

/// Extend a point set to `target` points with canonical-enumeration-order
/// points of the ambient space not already present.
fn pad_point_set(base: &PointSet, target: usize, enum_budget: u64) -> Result<PointSet> {
    if base.len() > target {
        return Err(Error::invalid(
            "point set already larger than the target size",
        ));
    }
    let field = base.field().clone();
    let all = crate::geometry::enumerate_projective(base.n_proj(), &field, enum_budget as u128)?;
    let have: std::collections::HashSet<&ProjPoint> = base.points().iter().collect();
    let mut points: Vec<ProjPoint> = base.points().to_vec();
    for pt in all.points() {
        if points.len() == target {
            break;
        }
        if !have.contains(pt) {
            points.push(pt.clone());
        }
    }
    if points.len() < target {
        return Err(Error::invalid(
            "ambient space too small for the requested padding",
        ));
    }
    Ok(PointSet::new(field, base.n_proj(), points))
}

#[allow(clippy::too_many_arguments)]
fn zar_certificate(
    instance: &ZarInstance,
    graph: &PartiteHypergraph,
    realized_k: usize,
    cap: &BigUint,
    zar_bound: &BigUint,
    indep_reports: &[IndependenceReport],
    reg_h: &RegularityCertificate,
    reg_k: &RegularityCertificate,
) -> Result<Certificate> {
    let params = &instance.params;
    let pattern = &instance.pattern;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    let g_json = multi_to_json(&instance.g)?;
    let h_json: Vec<PolyJson> = instance
        .h_polys
        .iter()
        .map(poly_to_json)
        .collect::<Result<_>>()?;
    let sched = zarankiewicz_schedule(s_edges as u64, params.m as u64)?;
    let feas = lem14_feasible(
        &params.sizes,
        s_edges as u64,
        sched.t.max(1),
        params.r as u64,
        params.m as u64,
    )?;
    let paper_schedule = serde_json::json!({
        "r": sched.r,
        "t": sched.t,
        "bracket_ok": sched.bracket_ok,
        "apex_threshold": sched.apex_threshold.to_string(),
        "feasibility": {
            "binom_ok": feas.binom_ok,
            "threshold": feas.threshold.to_string(),
            "s_d_ok": feas.s_d_ok,
        },
    });
    let verification = Verification {
        edge_recheck: true,
        regularity_certs: vec![reg_cert_to_json(reg_h)?, reg_cert_to_json(reg_k)?],
        independence_reports: indep_reports.iter().map(indep_to_json).collect(),
        realized_k: realized_k as u64,
        e_g: graph.edge_count() as u64,
        bounds: Bounds {
            half_p_power: rational_half(zar_bound),
            codegree_cap: cap.to_string(),
        },
        exponent_target: d as f64 - 1.0 / s_edges as f64,
    };
    Ok(Certificate {
        version: crate::certificate::CERT_VERSION,
        mode: "zarankiewicz".into(),
        field: FieldJson { p: params.p, e: 1 },
        params: serde_json::json!({
            "direct": serde_json::to_value(params)?,
            "paper_schedule": paper_schedule,
            "cut_size": instance.cut_size,
        }),
        polynomials: serde_json::json!({ "g": g_json, "h": h_json }),
        parts: graph.part_sizes().iter().map(|&n| n as u64).collect(),
        edges_file: String::new(),
        verification,
        retries: instance.retries.clone(),
        tool_version: TOOL_VERSION.into(),
    })
}

/// Outcome of re-verifying a certificate from disk.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<(String, bool)>,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn push(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }
}

/// Recompute everything a certificate claims from its stored polynomials and
/// compare: vertex sets, edge set, regularity and independence verdicts, the
/// realized apex maximum, and the recorded bounds.
pub fn verify_certificate(cert: &Certificate, cert_dir: &Path) -> Result<VerifyReport> {
    if cert.version != CERT_VERSION {
        return Err(Error::invalid(format!(
            "unsupported certificate version {}",
            cert.version
        )));
    }
    let field = FieldParams::prime(cert.field.p)?;
    let edge_path = cert_dir.join(&cert.edges_file);
    let edge_file = read_edge_file(std::io::BufReader::new(std::fs::File::open(&edge_path)?))?;
    let mut report = VerifyReport { checks: Vec::new() };
    report.push(
        "edge_file_header",
        edge_file.p == cert.field.p && edge_file.parts == cert.parts,
    );
    match cert.mode.as_str() {
        "turan" => verify_turan(cert, &field, &edge_file.edges, &mut report)?,
        "zarankiewicz" => verify_zar(cert, &field, &edge_file.edges, &mut report)?,
        other => return Err(Error::invalid(format!("unknown certificate mode {other}"))),
    }
    Ok(report)
}

fn verify_turan(
    cert: &Certificate,
    field: &FieldParams,
    edges: &[Vec<u32>],
    report: &mut VerifyReport,
) -> Result<()> {
    let params: TuranParams = serde_json::from_value(cert.params["direct"].clone())?;
    let pattern = params.pattern.to_pattern()?;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    let s_max = *pattern.part_sizes().iter().max().unwrap();
    let f_json: Vec<Vec<PolyJson>> = serde_json::from_value(cert.polynomials["f"].clone())?;
    let h_json: Vec<Vec<PolyJson>> = serde_json::from_value(cert.polynomials["h"].clone())?;
    let g_json: MultiPolyJson = serde_json::from_value(cert.polynomials["g"].clone())?;
    if f_json.len() != d || h_json.len() != d {
        return Err(Error::invalid(
            "polynomial blocks do not match the part count",
        ));
    }
    let g = multi_from_json(&g_json, field)?;
    let mut vertex_sets = Vec::with_capacity(d);
    for k in 0..d {
        let f: Vec<HomogPoly> = f_json[k]
            .iter()
            .map(|j| poly_from_json(j, field))
            .collect::<Result<_>>()?;
        let h: Vec<HomogPoly> = h_json[k]
            .iter()
            .map(|j| poly_from_json(j, field))
            .collect::<Result<_>>()?;
        // Regularity verdicts recompute to true.
        let hc = is_regular_hilbert(&f, None)?;
        let kc = is_regular_koszul(&f, None)?;
        report.push(format!("regularity_part_{k}"), hc.verdict && kc.verdict);
        let variety = variety_points(&f, field, params.n_proj, params.budgets.enumeration as u128)?;
        let indep = is_swise_independent(&variety, s_max, params.m)?;
        report.push(format!("independence_part_{k}"), indep.verdict);
        let mut all_cut = f;
        all_cut.extend(h);
        let vertex_set = variety_points(
            &all_cut,
            field,
            params.n_proj,
            params.budgets.enumeration as u128,
        )?;
        report.push(
            format!("part_size_{k}"),
            vertex_set.len() as u64 == cert.parts[k],
        );
        vertex_sets.push(vertex_set);
    }
    let refs: Vec<&PointSet> = vertex_sets.iter().collect();
    let recomputed = assemble_edges(&g, &refs)?;
    report.push("edge_set_matches", recomputed == edges);
    report.push("edge_recheck", recheck_edges(&g, &refs, edges)?);
    let graph = PartiteHypergraph::new(
        vertex_sets.iter().map(|v| v.len()).collect(),
        recomputed.clone(),
    )?;
    report.push(
        "e_g_matches",
        graph.edge_count() as u64 == cert.verification.e_g,
    );
    let (realized_k, _) = max_common_apex(&graph, &pattern, &PartAssignment::identity(d))?;
    report.push(
        "realized_k_matches",
        realized_k as u64 == cert.verification.realized_k,
    );
    let p_power = BigUint::from(params.p).pow((d * s_edges - 1) as u32);
    report.push(
        "edge_bound",
        BigUint::from(2 * graph.edge_count() as u64) >= p_power
            && cert.verification.bounds.half_p_power == rational_half(&p_power),
    );
    let cap = turan_codegree_cap(params.m, params.r, s_edges, &params.degrees);
    report.push(
        "codegree_cap",
        BigUint::from(realized_k as u64) <= cap
            && cert.verification.bounds.codegree_cap == cap.to_string(),
    );
    Ok(())
}

fn verify_zar(
    cert: &Certificate,
    field: &FieldParams,
    edges: &[Vec<u32>],
    report: &mut VerifyReport,
) -> Result<()> {
    let params: ZarParams = serde_json::from_value(cert.params["direct"].clone())?;
    let pattern = params.pattern.to_pattern()?;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    let g_json: MultiPolyJson = serde_json::from_value(cert.polynomials["g"].clone())?;
    let h_json: Vec<PolyJson> = serde_json::from_value(cert.polynomials["h"].clone())?;
    let g = multi_from_json(&g_json, field)?;
    let h: Vec<HomogPoly> = h_json
        .iter()
        .map(|j| poly_from_json(j, field))
        .collect::<Result<_>>()?;
    let prefix_parts: Vec<PointSet> = params.sizes[..d - 1]
        .iter()
        .map(|&n_i| standard_basis_points(field, params.n_prefix, n_i as usize))
        .collect::<Result<_>>()?;
    for (i, (pts, &s_i)) in prefix_parts
        .iter()
        .zip(pattern.part_sizes().iter())
        .enumerate()
    {
        let rep = is_swise_independent(pts, s_i, params.m)?;
        report.push(format!("independence_part_{i}"), rep.verdict);
    }
    let cut_set = variety_points(&h, field, params.n_proj, params.budgets.enumeration as u128)?;
    report.push(
        "cut_size_matches",
        serde_json::from_value::<usize>(cert.params["cut_size"].clone())? == cut_set.len(),
    );
    let mut refs: Vec<&PointSet> = prefix_parts.iter().collect();
    refs.push(&cut_set);
    let recomputed = assemble_edges(&g, &refs)?;
    report.push("edge_set_matches", recomputed == edges);
    report.push("edge_recheck", recheck_edges(&g, &refs, edges)?);
    let mut part_sizes: Vec<usize> = params.sizes[..d - 1].iter().map(|&n| n as usize).collect();
    part_sizes.push(params.sizes[d - 1] as usize);
    let graph = PartiteHypergraph::new(part_sizes, recomputed)?;
    report.push(
        "e_g_matches",
        graph.edge_count() as u64 == cert.verification.e_g,
    );
    let (realized_k, _) = max_common_apex(&graph, &pattern, &PartAssignment::identity(d))?;
    report.push(
        "realized_k_matches",
        realized_k as u64 == cert.verification.realized_k,
    );
    let (bound, meets) = zarankiewicz_edge_bound(
        graph.edge_count() as u64,
        params.p,
        s_edges as u32,
        &params.sizes[..d - 1],
    );
    report.push(
        "edge_bound",
        meets && cert.verification.bounds.half_p_power == rational_half(&bound),
    );
    // Sided freeness at one above the realized maximum.
    let free = is_apex_free(&graph, &pattern, realized_k + 1, FreeMode::Sided)?;
    report.push("sided_freeness", free.free);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::GENERATOR;

    fn k21_pattern() -> Pattern {
        // Two edges: the complete 2-partite pattern with parts (2, 1).
        Pattern::complete(vec![2, 1]).unwrap()
    }

    fn desk_turan_params(p: u64, seed: u64) -> (TuranParams, Pattern) {
        // d = 2 desk instance: the pattern is 1-uniform on two vertices.
        let pattern = Pattern::complete(vec![2]).unwrap();
        let params = TuranParams {
            p,
            n_proj: 4,
            m: 3,
            r: 1,
            t: 1,
            degrees: vec![2],
            pattern: PatternJson::of(&pattern),
            seed,
            log_base: "2".into(),
            budgets: Budgets::default(),
            generator: GENERATOR.into(),
        };
        (params, pattern)
    }

    #[test]
    fn independent_variety_small_case() {
        let field = FieldParams::prime(11).unwrap();
        let budgets = Budgets::default();
        let draw = build_independent_variety(&field, 3, 3, 1, 2, 0, 0, &budgets).unwrap();
        assert_eq!(draw.f_polys.len(), 1);
        assert!(draw.reg_hilbert.verdict && draw.reg_koszul.verdict);
        assert!(draw.independence.verdict);
        assert!(draw.attempts <= 50);
        // Postconditions recompute.
        let again = variety_points(&draw.f_polys, &field, 3, 1 << 22).unwrap();
        assert_eq!(again.len(), draw.points.len());
        assert!(is_swise_independent(&again, 2, 3).unwrap().verdict);
    }

    #[test]
    fn independent_variety_rejects_r_too_large() {
        let field = FieldParams::prime(11).unwrap();
        let budgets = Budgets::default();
        assert!(build_independent_variety(&field, 3, 2, 4, 2, 0, 0, &budgets).is_err());
    }

    #[test]
    fn desk_turan_build_and_verify_postconditions() {
        let (params, pattern) = desk_turan_params(11, 0);
        let out = build_turan(&params, &pattern).unwrap();
        let p3 = 11u64 * 11 * 11;
        assert!(2 * out.graph.edge_count() as u64 >= p3);
        assert!(out.certificate.verification.realized_k <= 54);
        // Every edge satisfies g = 0 and lies in the parts.
        let refs: Vec<&PointSet> = out.instance.parts.iter().map(|pk| &pk.vertex_set).collect();
        assert!(recheck_edges(&out.instance.g, &refs, &out.edges).unwrap());
        // Sided freeness holds one above the realized maximum.
        let free = is_apex_free(
            &out.graph,
            &pattern,
            out.certificate.verification.realized_k as usize + 1,
            FreeMode::Sided,
        )
        .unwrap();
        assert!(free.free);
    }

    #[test]
    fn degenerate_zero_edge_form_fails_gates() {
        // Forcing g = 0 makes W_g the full product and the apex count the
        // whole part; with |V_2| above the cap the gate must reject.
        let (params, pattern) = desk_turan_params(11, 0);
        let field = FieldParams::prime(11).unwrap();
        let out = build_turan(&params, &pattern).unwrap();
        let refs: Vec<&PointSet> = out.instance.parts.iter().map(|pk| &pk.vertex_set).collect();
        let groups: Vec<(usize, u32)> = (0..2).map(|_| (5, 3)).collect();
        assert!(refs[1].len() > 54, "control needs |V_2| above the cap");
        let zero_g = MultiHomogPoly::zero(&field, &groups).unwrap();
        let edges = assemble_edges(&zero_g, &refs).unwrap();
        assert_eq!(edges.len(), refs[0].len() * refs[1].len());
        let graph = PartiteHypergraph::new(refs.iter().map(|r| r.len()).collect(), edges).unwrap();
        let (k, _) = max_common_apex(&graph, &pattern, &PartAssignment::identity(2)).unwrap();
        assert_eq!(k, refs[1].len());
        let cap = turan_codegree_cap(params.m, params.r, pattern.edge_count(), &params.degrees);
        assert!(
            BigUint::from(k as u64) > cap,
            "degenerate instance must exceed the cap"
        );
    }

    #[test]
    fn turan_determinism() {
        let (params, pattern) = desk_turan_params(11, 7);
        let a = build_turan(&params, &pattern).unwrap();
        let b = build_turan(&params, &pattern).unwrap();
        assert_eq!(a.edges, b.edges);
        assert_eq!(
            a.certificate.to_pretty_bytes().unwrap(),
            b.certificate.to_pretty_bytes().unwrap()
        );
    }

    #[test]
    fn desk_zarankiewicz_build() {
        let pattern = k21_pattern();
        let params = ZarParams {
            p: 7,
            n_prefix: 2,
            n_proj: 4,
            sizes: vec![3, 3, 400],
            m: 3,
            r: 2,
            degrees: vec![2, 2],
            pattern: PatternJson::of(&pattern),
            seed: 0,
            budgets: Budgets::default(),
            generator: GENERATOR.into(),
        };
        let out = build_zarankiewicz(&params, &pattern).unwrap();
        // e(G) >= p^{S-1} n1 n2 / 2 = 7 * 9 / 2.
        assert!(2 * out.graph.edge_count() as u64 >= 63);
        // Padding points carry no edges.
        let cut = out.instance.cut_size as u32;
        assert!(out.edges.iter().all(|e| e[2] < cut));
        assert_eq!(out.graph.part_sizes(), &[3, 3, 400]);
        // Sided verification one above the realized maximum.
        let free = is_apex_free(
            &out.graph,
            &pattern,
            out.certificate.verification.realized_k as usize + 1,
            FreeMode::Sided,
        )
        .unwrap();
        assert!(free.free);
    }

    #[test]
    fn zar_rejects_bad_dimensions() {
        let pattern = k21_pattern();
        let mut params = ZarParams {
            p: 7,
            n_prefix: 2,
            n_proj: 4,
            sizes: vec![4, 3, 400],
            m: 3,
            r: 2,
            degrees: vec![2, 2],
            pattern: PatternJson::of(&pattern),
            seed: 0,
            budgets: Budgets::default(),
            generator: GENERATOR.into(),
        };
        // n_1 = 4 > n + 1 = 3.
        assert!(build_zarankiewicz(&params, &pattern).is_err());
        params.sizes = vec![3, 3, 400];
        params.n_proj = 5;
        assert!(build_zarankiewicz(&params, &pattern).is_err());
    }

    #[test]
    fn certificate_roundtrip_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let (params, pattern) = desk_turan_params(11, 0);
        let mut out = build_turan(&params, &pattern).unwrap();
        out.certificate.edges_file = "run.edges".into();
        let (cert_path, _edge_path) = crate::certificate::emit_certificate(
            &out.certificate,
            &out.edges,
            params.p,
            params.n_proj,
            dir.path(),
            "run",
        )
        .unwrap();
        let cert = Certificate::from_reader(std::fs::File::open(&cert_path).unwrap()).unwrap();
        let report = verify_certificate(&cert, dir.path()).unwrap();
        assert!(
            report.all_ok(),
            "fresh certificate must verify: {:?}",
            report.checks
        );
        // Tamper with the edge file: drop the last edge.
        let edge_path = dir.path().join("run.edges");
        let content = std::fs::read_to_string(&edge_path).unwrap();
        let mut lines: Vec<&str> = content.lines().collect();
        lines.pop();
        std::fs::write(&edge_path, lines.join("\n")).unwrap();
        let report = verify_certificate(&cert, dir.path()).unwrap();
        assert!(!report.all_ok(), "edge deletion must be detected");
        // Restore and tamper with realized_k instead.
        std::fs::write(&edge_path, &content).unwrap();
        let mut bad = cert.clone();
        bad.verification.realized_k = bad.verification.realized_k.saturating_sub(1);
        let report = verify_certificate(&bad, dir.path()).unwrap();
        assert!(!report.all_ok(), "altered realized_k must be detected");
    }
}
