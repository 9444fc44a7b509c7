//! d-partite d-uniform hypergraph storage, codegree and common-apex queries,
//! apex-freeness verification (sided and over all part assignments),
//! homomorphism counting, and edge-count reports.
//!
//! Hosts store edges as part-ordered tuples of part-local indices. The apex
//! adjacency index for a chosen apex side is built once and cached. The
//! pruned embedding search is paired with a naive full-enumeration oracle
//! used by self-tests.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::{Error, Result};

/// A (d-1)-partite (d-1)-uniform pattern: the common link of the apex
/// vertices in the forbidden configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    part_sizes: Vec<usize>,
    edges: Vec<Vec<u32>>,
    /// Default apex count for freeness queries, when one is attached.
    apex: Option<usize>,
}

impl Pattern {
    pub fn new(part_sizes: Vec<usize>, edges: Vec<Vec<u32>>) -> Result<Self> {
        if part_sizes.is_empty() || part_sizes.contains(&0) {
            return Err(Error::invalid("pattern needs at least one nonempty part"));
        }
        if edges.is_empty() {
            return Err(Error::invalid("pattern edge set must be nonempty"));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.len() != part_sizes.len() {
                return Err(Error::invalid(format!(
                    "edge arity {} does not match {} parts",
                    e.len(),
                    part_sizes.len()
                )));
            }
            for (k, &v) in e.iter().enumerate() {
                if v as usize >= part_sizes[k] {
                    return Err(Error::invalid(format!(
                        "vertex {v} out of range in part {k}"
                    )));
                }
            }
            if !seen.insert(e.clone()) {
                return Err(Error::invalid("duplicate pattern edge"));
            }
        }
        Ok(Pattern {
            part_sizes,
            edges,
            apex: None,
        })
    }

    /// Complete pattern: every tuple in the product of the parts.
    pub fn complete(part_sizes: Vec<usize>) -> Result<Self> {
        let mut edges = vec![vec![]];
        for &s in &part_sizes {
            let mut next = Vec::with_capacity(edges.len() * s);
            for e in &edges {
                for v in 0..s as u32 {
                    let mut e2 = e.clone();
                    e2.push(v);
                    next.push(e2);
                }
            }
            edges = next;
        }
        Pattern::new(part_sizes, edges)
    }

    pub fn with_apex(mut self, k: usize) -> Self {
        self.apex = Some(k);
        self
    }

    pub fn apex(&self) -> Option<usize> {
        self.apex
    }

    /// d of the apex hypergraph H(k) this pattern defines.
    pub fn d(&self) -> usize {
        self.part_sizes.len() + 1
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.part_sizes.iter().sum()
    }

    /// File format: first line `d s_1 ... s_{d-1}`, then one edge per line as
    /// d-1 one-based indices.
    pub fn read(r: impl BufRead) -> Result<Pattern> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty pattern file"))??;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad pattern header")))
            .collect::<Result<_>>()?;
        if nums.len() < 2 {
            return Err(Error::invalid("pattern header needs d and the part sizes"));
        }
        let d = nums[0];
        if nums.len() != d {
            return Err(Error::invalid(format!(
                "pattern header says d = {d} but lists {} part sizes",
                nums.len() - 1
            )));
        }
        let part_sizes = nums[1..].to_vec();
        let mut edges = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vs: Vec<u32> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::invalid("bad edge entry"))
                })
                .collect::<Result<_>>()?;
            if vs.contains(&0) {
                return Err(Error::invalid("pattern vertices are one-based"));
            }
            edges.push(vs.iter().map(|&v| v - 1).collect());
        }
        Pattern::new(part_sizes, edges)
    }

    pub fn write(&self, mut w: impl Write) -> Result<()> {
        let sizes: Vec<String> = self.part_sizes.iter().map(|s| s.to_string()).collect();
        writeln!(w, "{} {}", self.d(), sizes.join(" "))?;
        for e in &self.edges {
            let vs: Vec<String> = e.iter().map(|&v| (v + 1).to_string()).collect();
            writeln!(w, "{}", vs.join(" "))?;
        }
        Ok(())
    }
}

/// A d-partite d-uniform host hypergraph with part-local vertex indices.
#[derive(Debug)]
pub struct PartiteHypergraph {
    part_sizes: Vec<usize>,
    /// Lexicographically sorted, distinct edge tuples.
    edges: Vec<Vec<u32>>,
    /// Per apex side: map from the (d-1)-tuple over the other parts (in part
    /// order) to the sorted apex list.
    apex_index: Vec<OnceLock<HashMap<Vec<u32>, Vec<u32>>>>,
}

static EMPTY_APEXES: &[u32] = &[];

impl PartiteHypergraph {
    pub fn new(part_sizes: Vec<usize>, mut edges: Vec<Vec<u32>>) -> Result<Self> {
        let d = part_sizes.len();
        if d < 2 {
            return Err(Error::invalid("host needs at least two parts"));
        }
        for e in &edges {
            if e.len() != d {
                return Err(Error::invalid("edge arity must equal the number of parts"));
            }
            for (k, &v) in e.iter().enumerate() {
                if v as usize >= part_sizes[k] {
                    return Err(Error::invalid(format!(
                        "edge vertex {v} out of range for part {k} of size {}",
                        part_sizes[k]
                    )));
                }
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::invalid("duplicate host edges"));
        }
        let apex_index = (0..d).map(|_| OnceLock::new()).collect();
        Ok(PartiteHypergraph {
            part_sizes,
            edges,
            apex_index,
        })
    }

    pub fn d(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.part_sizes.iter().sum()
    }

    fn index_for(&self, apex_side: usize) -> &HashMap<Vec<u32>, Vec<u32>> {
        self.apex_index[apex_side].get_or_init(|| {
            let mut map: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
            for e in &self.edges {
                let key: Vec<u32> = e
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != apex_side)
                    .map(|(_, &v)| v)
                    .collect();
                map.entry(key).or_default().push(e[apex_side]);
            }
            for list in map.values_mut() {
                list.sort_unstable();
            }
            map
        })
    }

    /// The sorted apex list of a (d-1)-tuple: all z in the apex part such
    /// that the tuple extended by z is an edge.
    pub fn codegree(&self, others: &[u32], apex_side: usize) -> Result<&[u32]> {
        if apex_side >= self.d() {
            return Err(Error::invalid(format!(
                "apex side {apex_side} out of range"
            )));
        }
        if others.len() != self.d() - 1 {
            return Err(Error::invalid(
                "codegree tuple must cover the non-apex parts",
            ));
        }
        let mut k = 0;
        for (part, &v) in (0..self.d()).filter(|&p| p != apex_side).zip(others.iter()) {
            if v as usize >= self.part_sizes[part] {
                return Err(Error::invalid(format!(
                    "vertex {v} out of range in part {part}"
                )));
            }
            k += 1;
        }
        debug_assert_eq!(k, self.d() - 1);
        Ok(self
            .index_for(apex_side)
            .get(others)
            .map(|v| v.as_slice())
            .unwrap_or(EMPTY_APEXES))
    }
}

/// Assignment of the pattern parts (and the apex part) onto host parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartAssignment {
    /// parts[i] = host part hosting pattern part i.
    pub parts: Vec<usize>,
    /// Host part hosting the apex vertices.
    pub apex: usize,
}

impl PartAssignment {
    pub fn identity(d: usize) -> Self {
        PartAssignment {
            parts: (0..d - 1).collect(),
            apex: d - 1,
        }
    }

    fn validate(&self, host: &PartiteHypergraph, pattern: &Pattern) -> Result<()> {
        let d = host.d();
        if pattern.d() != d {
            return Err(Error::DimensionMismatch(format!(
                "pattern is {}-partite + apex, host has {d} parts",
                pattern.d() - 1
            )));
        }
        let mut used = vec![false; d];
        for &p in self.parts.iter().chain(std::iter::once(&self.apex)) {
            if p >= d || used[p] {
                return Err(Error::invalid(
                    "part assignment must be injective into host parts",
                ));
            }
            used[p] = true;
        }
        for (i, &s) in pattern.part_sizes().iter().enumerate() {
            if s > host.part_sizes()[self.parts[i]] {
                return Err(Error::invalid(format!(
                    "pattern part {i} of size {s} exceeds host part {} of size {}",
                    self.parts[i],
                    host.part_sizes()[self.parts[i]]
                )));
            }
        }
        Ok(())
    }

    fn fits(&self, host: &PartiteHypergraph, pattern: &Pattern) -> bool {
        self.validate(host, pattern).is_ok()
    }
}

/// A part-respecting embedding of the pattern vertices into the host:
/// images[i][v] is the host vertex for pattern vertex v of part i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub images: Vec<Vec<u32>>,
}

/// Maximum common apex count over injective part-respecting embeddings of
/// the pattern, with a witness embedding attaining it. The search assigns
/// pattern vertices in order and abandons branches whose running apex
/// intersection cannot beat the current best.
pub fn max_common_apex(
    host: &PartiteHypergraph,
    pattern: &Pattern,
    assign: &PartAssignment,
) -> Result<(usize, Embedding)> {
    assign.validate(host, pattern)?;
    search_common_apex(host, pattern, assign, true)
}

/// Reference implementation: full enumeration of all embeddings, no pruning.
pub fn max_common_apex_naive(
    host: &PartiteHypergraph,
    pattern: &Pattern,
    assign: &PartAssignment,
) -> Result<(usize, Embedding)> {
    assign.validate(host, pattern)?;
    search_common_apex(host, pattern, assign, false)
}

fn search_common_apex(
    host: &PartiteHypergraph,
    pattern: &Pattern,
    assign: &PartAssignment,
    prune: bool,
) -> Result<(usize, Embedding)> {
    let sizes = pattern.part_sizes();
    let order: Vec<(usize, usize)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| (0..s).map(move |v| (i, v)))
        .collect();
    // For each position in the assignment order, the pattern edges that
    // become fully assigned at that position.
    let pos_of = |i: usize, v: u32| -> usize { sizes[..i].iter().sum::<usize>() + v as usize };
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    for (ei, e) in pattern.edges().iter().enumerate() {
        let last = e
            .iter()
            .enumerate()
            .map(|(i, &v)| pos_of(i, v))
            .max()
            .expect("pattern edges are nonempty");
        closing[last].push(ei);
    }
    struct Ctx<'a> {
        host: &'a PartiteHypergraph,
        pattern: &'a Pattern,
        assign: &'a PartAssignment,
        order: &'a [(usize, usize)],
        closing: &'a [Vec<usize>],
        images: Vec<Vec<u32>>,
        best: Option<(usize, Embedding)>,
        prune: bool,
    }
    fn apexes_of_edge(ctx: &Ctx, ei: usize) -> Result<Vec<u32>> {
        let e = &ctx.pattern.edges()[ei];
        // Host tuple over parts != apex, in host part order.
        let d = ctx.host.d();
        let mut tuple: Vec<(usize, u32)> = Vec::with_capacity(d - 1);
        for (i, &v) in e.iter().enumerate() {
            tuple.push((ctx.assign.parts[i], ctx.images[i][v as usize]));
        }
        tuple.sort_unstable_by_key(|&(p, _)| p);
        let key: Vec<u32> = tuple.into_iter().map(|(_, v)| v).collect();
        Ok(ctx.host.codegree(&key, ctx.assign.apex)?.to_vec())
    }
    fn rec(ctx: &mut Ctx, depth: usize, running: Option<Vec<u32>>) -> Result<()> {
        if depth == ctx.order.len() {
            let inter = running.expect("patterns have at least one edge");
            let k = inter.len();
            let better = ctx.best.as_ref().is_none_or(|(bk, _)| k > *bk);
            if better {
                ctx.best = Some((
                    k,
                    Embedding {
                        images: ctx.images.clone(),
                    },
                ));
            }
            return Ok(());
        }
        let (part, _v) = ctx.order[depth];
        let host_part = ctx.assign.parts[part];
        let n = ctx.host.part_sizes()[host_part] as u32;
        for cand in 0..n {
            if ctx.images[part].contains(&cand) {
                continue;
            }
            ctx.images[part].push(cand);
            let mut next = running.clone();
            let mut dead = false;
            for &ei in &ctx.closing[depth] {
                let apexes = apexes_of_edge(ctx, ei)?;
                next = Some(match next {
                    None => apexes,
                    Some(cur) => intersect_sorted(&cur, &apexes),
                });
                if ctx.prune {
                    if let (Some(list), Some((bk, _))) = (&next, &ctx.best) {
                        if list.len() <= *bk {
                            dead = true;
                            break;
                        }
                    }
                }
            }
            if !dead {
                rec(ctx, depth + 1, next)?;
            }
            ctx.images[part].pop();
        }
        Ok(())
    }
    let mut ctx = Ctx {
        host,
        pattern,
        assign,
        order: &order,
        closing: &closing,
        images: vec![Vec::new(); sizes.len()],
        best: None,
        prune,
    };
    rec(&mut ctx, 0, None)?;
    let (k, emb) = ctx.best.expect("at least one embedding exists");
    Ok((k, emb))
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FreeMode {
    /// Pattern part i must embed into host part i, apex into the last part.
    Sided,
    /// Maximum over all injective assignments of pattern parts + apex onto
    /// host parts (part-respecting copies only).
    Unordered,
}

#[derive(Clone, Debug)]
pub struct FreenessReport {
    pub free: bool,
    pub realized_k: usize,
    pub witness: Option<(PartAssignment, Embedding)>,
}

/// Does the host contain k apex vertices sharing an embedded copy of the
/// pattern as a common link? free <=> realized max common apex < k.
pub fn is_apex_free(
    host: &PartiteHypergraph,
    pattern: &Pattern,
    k: usize,
    mode: FreeMode,
) -> Result<FreenessReport> {
    let d = host.d();
    let assignments: Vec<PartAssignment> = match mode {
        FreeMode::Sided => vec![PartAssignment::identity(d)],
        FreeMode::Unordered => permutations(d)
            .into_iter()
            .map(|perm| PartAssignment {
                parts: perm[..d - 1].to_vec(),
                apex: perm[d - 1],
            })
            .collect(),
    };
    let mut realized_k = 0usize;
    let mut witness = None;
    let mut any_fit = false;
    for assign in assignments {
        if mode == FreeMode::Unordered && !assign.fits(host, pattern) {
            continue;
        }
        any_fit = true;
        let (kk, emb) = max_common_apex(host, pattern, &assign)?;
        if kk > realized_k || witness.is_none() {
            realized_k = kk;
            witness = Some((assign, emb));
        }
    }
    if !any_fit {
        // No part-respecting copy can exist at all.
        return Ok(FreenessReport {
            free: true,
            realized_k: 0,
            witness: None,
        });
    }
    Ok(FreenessReport {
        free: realized_k < k,
        realized_k,
        witness,
    })
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut used = vec![false; d];
    fn rec(d: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in 0..d {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(d, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(d, &mut cur, &mut used, &mut out);
    out
}

/// A labeled uniform hypergraph pattern for homomorphism counting.
#[derive(Clone, Debug)]
pub struct HomPattern {
    pub num_vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

/// Number of vertex maps V(H') -> V(G) sending every (ordered) pattern edge
/// onto a stored edge tuple of G (position k lands in part k). Patterns are
/// labeled; no automorphism quotient.
pub fn count_homomorphisms(
    pattern: &HomPattern,
    host: &PartiteHypergraph,
    budget: u128,
) -> Result<u128> {
    if pattern.num_vertices > 8 {
        return Err(Error::invalid(
            "homomorphism patterns are capped at 8 vertices",
        ));
    }
    let nv = host.num_vertices() as u128;
    let space = nv.checked_pow(pattern.num_vertices as u32);
    match space {
        Some(s) if s <= budget => {}
        _ => {
            return Err(Error::budget(
                "count_homomorphisms",
                format!("{nv}^{} maps exceed budget {budget}", pattern.num_vertices),
            ))
        }
    }
    for e in &pattern.edges {
        if e.len() != host.d() {
            return Err(Error::DimensionMismatch(
                "pattern edge arity must match host uniformity".into(),
            ));
        }
        if e.iter().any(|&v| v >= pattern.num_vertices) {
            return Err(Error::invalid("pattern edge vertex out of range"));
        }
    }
    // Global vertex ids: part k occupies [offset_k, offset_k + n_k).
    let offsets: Vec<u32> = host
        .part_sizes()
        .iter()
        .scan(0u32, |acc, &n| {
            let here = *acc;
            *acc += n as u32;
            Some(here)
        })
        .collect();
    let edge_set: std::collections::HashSet<Vec<u32>> = host
        .edges()
        .iter()
        .map(|e| e.iter().enumerate().map(|(k, &v)| offsets[k] + v).collect())
        .collect();
    let total_vertices = host.num_vertices() as u32;
    // Edges close at the position of their largest-labeled vertex.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); pattern.num_vertices];
    for (ei, e) in pattern.edges.iter().enumerate() {
        let last = *e.iter().max().expect("edges nonempty");
        closing[last].push(ei);
    }
    fn rec(
        pattern: &HomPattern,
        closing: &[Vec<usize>],
        edge_set: &std::collections::HashSet<Vec<u32>>,
        total: u32,
        images: &mut Vec<u32>,
        depth: usize,
    ) -> u128 {
        if depth == pattern.num_vertices {
            return 1;
        }
        let mut count = 0u128;
        for cand in 0..total {
            images.push(cand);
            let ok = closing[depth].iter().all(|&ei| {
                let tuple: Vec<u32> = pattern.edges[ei].iter().map(|&v| images[v]).collect();
                edge_set.contains(&tuple)
            });
            if ok {
                count += rec(pattern, closing, edge_set, total, images, depth + 1);
            }
            images.pop();
        }
        count
    }
    let mut images = Vec::with_capacity(pattern.num_vertices);
    Ok(rec(
        pattern,
        &closing,
        &edge_set,
        total_vertices,
        &mut images,
        0,
    ))
}

/// Edge-count report for a constructed host: the p-power lower bound and the
/// explicit polynomial-in-n bound, both compared exactly.
#[derive(Clone, Debug)]
pub struct EdgeBoundReport {
    pub e_g: u64,
    pub n_vertices: u64,
    /// p^{dS-1}; the bound is half of it.
    pub p_power: BigUint,
    /// 2 e(G) >= p^{dS-1}.
    pub meets_half_p_power: bool,
    /// 2^{-dS} C^{-d+1/S} n^{d-1/S}, as a float for display.
    pub explicit_bound: f64,
    /// e(G) >= 2^{-dS} C^{-d+1/S} n^{d-1/S}, compared exactly.
    pub meets_explicit: bool,
}

pub fn edge_bound_report(
    e_g: u64,
    n_vertices: u64,
    s_edges: u32,
    p: u64,
    c_const: &BigUint,
    d: u32,
) -> EdgeBoundReport {
    let ds = d * s_edges;
    let p_power = BigUint::from(p).pow(ds - 1);
    let meets_half_p_power = BigUint::from(2 * e_g) >= p_power;
    // e >= 2^{-dS} C^{-d+1/S} n^{d-1/S}
    //   <=> (2^{dS} e)^S C^{dS-1} >= n^{dS-1}, everything integral.
    let lhs = (BigUint::from(e_g) << ds).pow(s_edges) * c_const.pow(ds - 1);
    let rhs = BigUint::from(n_vertices).pow(ds - 1);
    let meets_explicit = lhs >= rhs;
    let c_f = c_const.to_f64().unwrap_or(f64::INFINITY);
    let explicit_bound = 2f64.powi(-(ds as i32))
        * c_f.powf(-(d as f64) + 1.0 / s_edges as f64)
        * (n_vertices as f64).powf(d as f64 - 1.0 / s_edges as f64);
    EdgeBoundReport {
        e_g,
        n_vertices,
        p_power,
        meets_half_p_power,
        explicit_bound,
        meets_explicit,
    }
}

/// Sided-construction edge bound: 2 e(G) >= p^{S-1} n_1 ... n_{d-1}.
pub fn zarankiewicz_edge_bound(
    e_g: u64,
    p: u64,
    s_edges: u32,
    prefix_sizes: &[u64],
) -> (BigUint, bool) {
    let mut bound = BigUint::from(p).pow(s_edges - 1);
    for &n in prefix_sizes {
        bound *= BigUint::from(n);
    }
    let meets = BigUint::from(2 * e_g) >= bound;
    (bound, meets)
}

/// Least-squares slope of log e against log n.
pub fn exponent_fit(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::invalid("exponent fit needs at least two rows"));
    }
    for w in rows.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::invalid("vertex counts must be strictly increasing"));
        }
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, e)| (n.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Ok(sxy / sxx)
}
