//! Projective geometry over finite fields: canonical representatives,
//! enumeration of P^N(F_q), variety point sets, the Veronese embedding and
//! point-count diagnostics.
//!
//! Canonical representative: the leftmost nonzero coordinate is scaled to 1.
//! Enumeration order: points grouped by the position of their leading 1
//! (ascending), then the remaining coordinates as a base-q counter with the
//! leftmost coordinate most significant. Both conventions are relied on by
//! certificates, so they are fixed.

use std::io::{BufRead, Write};

use crate::gf::{FieldElement, FieldParams};
use crate::poly::{monomial_values, monomial_values_u64, HomogPoly, MonomialBasis};
use crate::{Error, Result};

/// Default cap on the number of projective points any scan may visit.
pub const DEFAULT_ENUM_BUDGET: u128 = 8_000_000;

/// A projective point in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<FieldElement>,
}

impl ProjPoint {
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim_ambient(&self) -> usize {
        self.coords.len() - 1
    }

    /// Residues of the coordinates of a prime-field point.
    pub fn residues(&self) -> Vec<u64> {
        self.coords.iter().map(|c| c.residue()).collect()
    }
}

/// An enumerated set of distinct canonical points, optionally carrying the
/// polynomials that cut it out.
#[derive(Clone, Debug)]
pub struct PointSet {
    field: FieldParams,
    n_proj: usize,
    points: Vec<ProjPoint>,
    provenance: Option<Vec<HomogPoly>>,
}

impl PointSet {
    pub fn new(field: FieldParams, n_proj: usize, points: Vec<ProjPoint>) -> Self {
        PointSet {
            field,
            n_proj,
            points,
            provenance: None,
        }
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn n_proj(&self) -> usize {
        self.n_proj
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> Option<&[HomogPoly]> {
        self.provenance.as_deref()
    }

    /// Dump format: header `N q count`, then one line per point with the
    /// element index of each coordinate (the residue itself for prime fields).
    pub fn write_dump(&self, mut w: impl Write) -> Result<()> {
        writeln!(
            w,
            "{} {} {}",
            self.n_proj,
            self.field.order(),
            self.points.len()
        )?;
        for pt in &self.points {
            let line: Vec<String> = pt
                .coords
                .iter()
                .map(|c| self.field.element_index(c).to_string())
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_dump(field: &FieldParams, r: impl BufRead) -> Result<PointSet> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty point dump"))??;
        let parts: Vec<u128> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad dump header")))
            .collect::<Result<_>>()?;
        if parts.len() != 3 || parts[1] != field.order() {
            return Err(Error::invalid("dump header does not match field"));
        }
        let n_proj = parts[0] as usize;
        let mut points = Vec::with_capacity(parts[2] as usize);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let coords: Vec<FieldElement> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u128>()
                        .map_err(|_| Error::invalid("bad coordinate"))
                        .map(|k| field.element_from_index(k))
                })
                .collect::<Result<_>>()?;
            if coords.len() != n_proj + 1 {
                return Err(Error::invalid("wrong coordinate count in dump"));
            }
            points.push(ProjPoint { coords });
        }
        if points.len() != parts[2] as usize {
            return Err(Error::invalid("dump point count mismatch"));
        }
        Ok(PointSet::new(field.clone(), n_proj, points))
    }
}

/// Scale a nonzero vector so its leftmost nonzero coordinate is 1.
pub fn canonicalize(v: &[FieldElement], field: &FieldParams) -> Result<ProjPoint> {
    let lead = v
        .iter()
        .position(|c| !c.is_zero())
        .ok_or(Error::ZeroVector)?;
    let inv = field.inv_raw(v[lead])?;
    let coords = v.iter().map(|&c| field.mul_raw(inv, c)).collect();
    Ok(ProjPoint { coords })
}

/// |P^N(F_q)| = (q^{N+1} - 1) / (q - 1).
pub fn projective_count(n_proj: usize, q: u128) -> u128 {
    let mut acc = 0u128;
    for _ in 0..=n_proj {
        acc = acc * q + 1;
    }
    acc
}

/// Exact value of the point-count bound k (q^{n+1} - 1) / (q - 1) for a
/// degree-k, dimension-n variety.
pub fn point_count_upper(k: u128, n: usize, q: u128) -> u128 {
    k * projective_count(n, q)
}

struct CanonicalScan<'a> {
    field: &'a FieldParams,
    n_proj: usize,
    lead: usize,
    counter: Vec<u128>,
    done: bool,
}

impl<'a> CanonicalScan<'a> {
    fn new(field: &'a FieldParams, n_proj: usize) -> Self {
        CanonicalScan {
            field,
            n_proj,
            lead: 0,
            counter: vec![0; n_proj],
            done: false,
        }
    }
}

impl Iterator for CanonicalScan<'_> {
    type Item = Vec<FieldElement>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let free = self.n_proj - self.lead;
        let mut coords = vec![FieldElement::default(); self.n_proj + 1];
        coords[self.lead] = self.field.one();
        for i in 0..free {
            coords[self.lead + 1 + i] = self.field.element_from_index(self.counter[i]);
        }
        // Advance the base-q counter (leftmost most significant).
        let q = self.field.order();
        let mut i = free;
        loop {
            if i == 0 {
                self.lead += 1;
                if self.lead > self.n_proj {
                    self.done = true;
                } else {
                    self.counter.iter_mut().for_each(|c| *c = 0);
                }
                break;
            }
            i -= 1;
            self.counter[i] += 1;
            if self.counter[i] < q {
                break;
            }
            self.counter[i] = 0;
        }
        Some(coords)
    }
}

/// All of P^N(F_q) in canonical order.
pub fn enumerate_projective(n_proj: usize, field: &FieldParams, budget: u128) -> Result<PointSet> {
    let total = projective_count(n_proj, field.order());
    if total > budget {
        return Err(Error::budget(
            "enumerate_projective",
            format!("{total} points exceed budget {budget}"),
        ));
    }
    let points = CanonicalScan::new(field, n_proj)
        .map(|coords| ProjPoint { coords })
        .collect();
    Ok(PointSet::new(field.clone(), n_proj, points))
}

/// The F_q-points of V(polys) in P^N, by exhaustive scan over canonical
/// representatives. Empty polynomial list yields all of P^N.
pub fn variety_points(
    polys: &[HomogPoly],
    field: &FieldParams,
    n_proj: usize,
    budget: u128,
) -> Result<PointSet> {
    for f in polys {
        if f.num_vars() != n_proj + 1 {
            return Err(Error::DimensionMismatch(format!(
                "polynomial in {} variables, ambient needs {}",
                f.num_vars(),
                n_proj + 1
            )));
        }
        if f.field() != field {
            return Err(Error::FieldMismatch(
                "variety polynomials over a different field".into(),
            ));
        }
    }
    let total = projective_count(n_proj, field.order());
    if total > budget {
        return Err(Error::budget(
            "variety_points",
            format!("{total} points exceed budget {budget}"),
        ));
    }
    let mut degrees: Vec<u32> = polys.iter().map(|f| f.degree()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let points = if field.e() == 1 {
        let p = field.p();
        let bases: Vec<_> = degrees
            .iter()
            .map(|&m| MonomialBasis::get(n_proj + 1, m))
            .collect();
        CanonicalScan::new(field, n_proj)
            .filter(|coords| {
                let res: Vec<u64> = coords.iter().map(|c| c.residue()).collect();
                polys.iter().all(|f| {
                    let bi = degrees.iter().position(|&m| m == f.degree()).unwrap();
                    let monos = monomial_values_u64(&bases[bi], &res, p);
                    f.evaluate_mono_u64(&monos, p) == 0
                })
            })
            .map(|coords| ProjPoint { coords })
            .collect()
    } else {
        CanonicalScan::new(field, n_proj)
            .filter(|coords| {
                polys
                    .iter()
                    .all(|f| f.evaluate(coords).map(|v| v.is_zero()).unwrap_or(false))
            })
            .map(|coords| ProjPoint { coords })
            .collect()
    };
    let mut set = PointSet::new(field.clone(), n_proj, points);
    set.provenance = Some(polys.to_vec());
    Ok(set)
}

/// Veronese embedding: all degree-m monomials of the point, canonicalized.
pub fn veronese(point: &ProjPoint, m: u32, field: &FieldParams) -> ProjPoint {
    let basis = MonomialBasis::get(point.coords.len(), m);
    let values = monomial_values(&basis, &point.coords, field);
    canonicalize(&values, field).expect("veronese image of a nonzero point is nonzero")
}

/// Raw (non-canonicalized) Veronese coordinate vector; rank computations use
/// this directly.
pub fn veronese_raw(point: &ProjPoint, m: u32, field: &FieldParams) -> Vec<FieldElement> {
    let basis = MonomialBasis::get(point.coords.len(), m);
    monomial_values(&basis, &point.coords, field)
}

/// Point counts of V(polys) over the tower GF(p^e), e = 1..e_max, and the
/// rounded log-scale dimension estimate (a diagnostic, not a proof).
#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    /// (extension degree, point count over that extension).
    pub counts: Vec<(usize, u128)>,
    /// round(log_{p^{e_max}} count); -1 marks an empty variety.
    pub estimate: i64,
}

pub fn dimension_estimate(
    polys: &[HomogPoly],
    field: &FieldParams,
    n_proj: usize,
    e_max: usize,
    budget: u128,
) -> Result<DimensionEstimate> {
    if field.e() != 1 {
        return Err(Error::invalid(
            "dimension_estimate starts from a prime field",
        ));
    }
    if e_max == 0 || e_max > crate::gf::MAX_EXT_DEGREE {
        return Err(Error::invalid(format!(
            "e_max must be in 1..=4, got {e_max}"
        )));
    }
    let mut counts = Vec::with_capacity(e_max);
    for e in 1..=e_max {
        let ext = FieldParams::extension(field.p(), e)?;
        // Lift coefficients: residues embed as constants of the extension.
        let lifted: Vec<HomogPoly> = polys
            .iter()
            .map(|f| {
                let coeffs = f.coeffs().iter().map(|c| ext.elem(c.residue())).collect();
                HomogPoly::from_coeffs(&ext, f.num_vars(), f.degree(), coeffs)
            })
            .collect::<Result<_>>()?;
        let pts = variety_points(&lifted, &ext, n_proj, budget)?;
        counts.push((e, pts.len() as u128));
    }
    let (_, top_count) = counts[e_max - 1];
    let estimate = if top_count == 0 {
        -1
    } else {
        let q_top = (field.p() as f64).powi(e_max as i32);
        ((top_count as f64).ln() / q_top.ln()).round() as i64
    };
    Ok(DimensionEstimate { counts, estimate })
}
