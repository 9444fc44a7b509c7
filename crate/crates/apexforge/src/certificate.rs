//! Reproducible records of construction runs: the certificate JSON schema,
//! the polynomial file format, and the edge-list file format.
//!
//! Polynomial format (prime fields): `{"p":..,"e":1,"num_vars":..,"degree":..,
//! "terms":[{"exps":[..],"coeff":..},..]}` with monomials in graded-lex order.
//! The multihomogeneous variant adds `"groups":[{"num_vars":..,"degree":..}]`
//! and per-group exponent lists. Edge files carry the header
//! `d p N n_1 ... n_d` followed by one edge per line as d space-separated
//! part-local zero-based indices.

use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gf::{FieldElement, FieldParams};
use crate::poly::{HomogPoly, MonomialBasis, MultiHomogPoly};
use crate::regseq::{IndependenceReport, RegMethod, RegularityCertificate};
use crate::{Error, Result};

pub const CERT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TermJson {
    pub exps: Vec<u8>,
    pub coeff: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PolyJson {
    pub p: u64,
    pub e: usize,
    pub num_vars: usize,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

pub fn poly_to_json(f: &HomogPoly) -> Result<PolyJson> {
    if f.field().e() != 1 {
        return Err(Error::invalid("polynomial files cover prime fields only"));
    }
    let basis = f.basis();
    let terms = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| TermJson {
            exps: basis.exponents(i).to_vec(),
            coeff: c.residue(),
        })
        .collect();
    Ok(PolyJson {
        p: f.field().p(),
        e: 1,
        num_vars: f.num_vars(),
        degree: f.degree(),
        terms,
    })
}

pub fn poly_from_json(j: &PolyJson, field: &FieldParams) -> Result<HomogPoly> {
    if j.e != 1 || field.e() != 1 || field.p() != j.p {
        return Err(Error::FieldMismatch(
            "polynomial file field mismatch".into(),
        ));
    }
    let terms: Vec<(Vec<u8>, FieldElement)> = j
        .terms
        .iter()
        .map(|t| {
            if t.coeff >= j.p {
                return Err(Error::invalid("unreduced coefficient in polynomial file"));
            }
            Ok((t.exps.clone(), field.elem(t.coeff)))
        })
        .collect::<Result<_>>()?;
    HomogPoly::from_terms(field, j.num_vars, j.degree, &terms)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct GroupJson {
    pub num_vars: usize,
    pub degree: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MultiTermJson {
    pub exps: Vec<Vec<u8>>,
    pub coeff: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MultiPolyJson {
    pub p: u64,
    pub e: usize,
    pub groups: Vec<GroupJson>,
    pub terms: Vec<MultiTermJson>,
}

pub fn multi_to_json(g: &MultiHomogPoly) -> Result<MultiPolyJson> {
    if g.field().e() != 1 {
        return Err(Error::invalid("polynomial files cover prime fields only"));
    }
    let bases: Vec<_> = g
        .groups()
        .iter()
        .map(|&(n, m)| MonomialBasis::get(n, m))
        .collect();
    let sizes: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut terms = Vec::new();
    for (flat, c) in g.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut rem = flat;
        let mut idxs = vec![0usize; sizes.len()];
        for k in (0..sizes.len()).rev() {
            idxs[k] = rem % sizes[k];
            rem /= sizes[k];
        }
        let exps: Vec<Vec<u8>> = idxs
            .iter()
            .zip(bases.iter())
            .map(|(&i, b)| b.exponents(i).to_vec())
            .collect();
        terms.push(MultiTermJson {
            exps,
            coeff: c.residue(),
        });
    }
    Ok(MultiPolyJson {
        p: g.field().p(),
        e: 1,
        groups: g
            .groups()
            .iter()
            .map(|&(n, m)| GroupJson {
                num_vars: n,
                degree: m,
            })
            .collect(),
        terms,
    })
}

pub fn multi_from_json(j: &MultiPolyJson, field: &FieldParams) -> Result<MultiHomogPoly> {
    if j.e != 1 || field.e() != 1 || field.p() != j.p {
        return Err(Error::FieldMismatch(
            "polynomial file field mismatch".into(),
        ));
    }
    let groups: Vec<(usize, u32)> = j.groups.iter().map(|g| (g.num_vars, g.degree)).collect();
    let bases: Vec<_> = groups
        .iter()
        .map(|&(n, m)| MonomialBasis::get(n, m))
        .collect();
    let sizes: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut out = MultiHomogPoly::zero(field, &groups)?;
    for t in &j.terms {
        if t.exps.len() != groups.len() || t.coeff >= j.p {
            return Err(Error::invalid("malformed multihomogeneous term"));
        }
        let mut flat = 0usize;
        for (k, exps) in t.exps.iter().enumerate() {
            let idx = bases[k].index_of(exps)?;
            flat = flat * sizes[k] + idx;
        }
        out.coeffs_mut()[flat] = field.elem(t.coeff);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RegCertJson {
    pub degrees: Vec<u32>,
    pub verdict: bool,
    pub method: String,
    pub cutoff: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_syzygy: Option<Vec<PolyJson>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

pub fn reg_cert_to_json(c: &RegularityCertificate) -> Result<RegCertJson> {
    let witness_syzygy = match c.witness.as_ref().and_then(|w| w.syzygy.as_ref()) {
        Some(polys) => Some(polys.iter().map(poly_to_json).collect::<Result<_>>()?),
        None => None,
    };
    Ok(RegCertJson {
        degrees: c.degrees.clone(),
        verdict: c.verdict,
        method: c.method.name().to_string(),
        cutoff: c.cutoff,
        witness_degree: c.witness.as_ref().map(|w| w.degree),
        witness_syzygy,
        note: c.note.clone(),
    })
}

pub fn reg_method_from_name(name: &str) -> Result<RegMethod> {
    match name {
        "hilbert" => Ok(RegMethod::Hilbert),
        "koszul" => Ok(RegMethod::Koszul),
        other => Err(Error::invalid(format!("unknown regularity method {other}"))),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct IndepJson {
    pub s: usize,
    pub m: u32,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<usize>>,
}

pub fn indep_to_json(r: &IndependenceReport) -> IndepJson {
    IndepJson {
        s: r.s,
        m: r.m,
        verdict: r.verdict,
        witness: r.witness.clone(),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Bounds {
    /// Exact rational edge lower bound, e.g. "1771561/2".
    pub half_p_power: String,
    /// Exact integer cap on the realized common-apex count.
    pub codegree_cap: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Verification {
    pub edge_recheck: bool,
    pub regularity_certs: Vec<RegCertJson>,
    pub independence_reports: Vec<IndepJson>,
    pub realized_k: u64,
    pub e_g: u64,
    pub bounds: Bounds,
    pub exponent_target: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct StageLog {
    pub stage: String,
    pub attempts: u32,
    pub failures: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct RetryLog {
    pub stages: Vec<StageLog>,
}

impl RetryLog {
    pub fn push(&mut self, stage: impl Into<String>, attempts: u32, failures: Vec<String>) {
        self.stages.push(StageLog {
            stage: stage.into(),
            attempts,
            failures,
        });
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FieldJson {
    pub p: u64,
    pub e: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Certificate {
    pub version: u32,
    pub mode: String,
    pub field: FieldJson,
    pub params: serde_json::Value,
    pub polynomials: serde_json::Value,
    pub parts: Vec<u64>,
    pub edges_file: String,
    pub verification: Verification,
    pub retries: RetryLog,
    pub tool_version: String,
}

impl Certificate {
    pub fn to_pretty_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn from_reader(r: impl std::io::Read) -> Result<Certificate> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// Write certificate + edge list into `dir` under `<stem>.json` and
/// `<stem>.edges`; returns both paths.
pub fn emit_certificate(
    cert: &Certificate,
    edges: &[Vec<u32>],
    p: u64,
    n_proj: usize,
    dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let cert_path = dir.join(format!("{stem}.json"));
    let edge_path = dir.join(format!("{stem}.edges"));
    let mut w = BufWriter::new(std::fs::File::create(&edge_path)?);
    write_edge_file(&mut w, p, n_proj, &cert.parts, edges)?;
    w.flush()?;
    std::fs::write(&cert_path, cert.to_pretty_bytes()?)?;
    Ok((cert_path, edge_path))
}

pub fn write_edge_file(
    mut w: impl Write,
    p: u64,
    n_proj: usize,
    parts: &[u64],
    edges: &[Vec<u32>],
) -> Result<()> {
    let sizes: Vec<String> = parts.iter().map(|n| n.to_string()).collect();
    writeln!(w, "{} {} {} {}", parts.len(), p, n_proj, sizes.join(" "))?;
    for e in edges {
        let vs: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", vs.join(" "))?;
    }
    Ok(())
}

pub struct EdgeFile {
    pub d: usize,
    pub p: u64,
    pub n_proj: usize,
    pub parts: Vec<u64>,
    pub edges: Vec<Vec<u32>>,
}

pub fn read_edge_file(r: impl BufRead) -> Result<EdgeFile> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty edge file"))??;
    let nums: Vec<u64> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::invalid("bad edge file header"))
        })
        .collect::<Result<_>>()?;
    if nums.len() < 3 {
        return Err(Error::invalid("edge file header too short"));
    }
    let d = nums[0] as usize;
    if nums.len() != 3 + d {
        return Err(Error::invalid("edge file header part count mismatch"));
    }
    let p = nums[1];
    let n_proj = nums[2] as usize;
    let parts = nums[3..].to_vec();
    let mut edges = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: Vec<u32> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad edge entry")))
            .collect::<Result<_>>()?;
        if e.len() != d {
            return Err(Error::invalid("edge arity mismatch"));
        }
        edges.push(e);
    }
    Ok(EdgeFile {
        d,
        p,
        n_proj,
        parts,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    #[test]
    fn poly_json_roundtrip() {
        let f7 = FieldParams::prime(7).unwrap();
        let mut s = SeedStream::new(4, 4);
        for _ in 0..10 {
            let f = HomogPoly::sample_uniform(&f7, 4, 3, &mut s);
            let j = poly_to_json(&f).unwrap();
            let back = poly_from_json(&j, &f7).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn multi_json_roundtrip() {
        let f7 = FieldParams::prime(7).unwrap();
        let mut s = SeedStream::new(5, 5);
        let g = MultiHomogPoly::sample_uniform(&f7, &[(3, 2), (4, 1)], &mut s).unwrap();
        let j = multi_to_json(&g).unwrap();
        let back = multi_from_json(&j, &f7).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn edge_file_roundtrip() {
        let edges = vec![vec![0u32, 1, 2], vec![3, 0, 1]];
        let mut buf = Vec::new();
        write_edge_file(&mut buf, 7, 4, &[5, 2, 3], &edges).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 7 4 5 2 3\n"));
        let back = read_edge_file(&buf[..]).unwrap();
        assert_eq!(back.edges, edges);
        assert_eq!(back.parts, vec![5, 2, 3]);
        assert_eq!(back.p, 7);
    }
}
