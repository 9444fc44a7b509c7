//! Exact linear algebra over finite fields: incremental row echelon forms,
//! rank computation with optional early-stop targets, and dependency
//! (left-kernel) extraction for syzygy witnesses.
//!
//! The prime-field kernel keeps pivot rows reduced and accumulates candidate
//! rows unreduced in u64, so the inner loops are single multiply-adds with a
//! lazy final reduction. Pivot rows switch between sparse and dense storage
//! depending on fill-in.

use crate::gf::{FieldElement, FieldParams};

const NO_PIVOT: u32 = u32::MAX;

/// Incremental row echelon form over GF(p), p < 2^20.
pub struct PrimeEchelon {
    p: u64,
    width: usize,
    pivot_of_col: Vec<u32>,
    pivots: Vec<PivotRow>,
    work: Vec<u64>,
}

struct PivotRow {
    col: usize,
    data: PivotData,
}

enum PivotData {
    /// (column, value) pairs in ascending column order; first entry is the
    /// pivot itself with value 1.
    Sparse(Vec<(u32, u32)>),
    /// Suffix starting at the pivot column; data[0] == 1.
    Dense(Vec<u32>),
}

impl PrimeEchelon {
    pub fn new(p: u64, width: usize) -> Self {
        assert!((2..=crate::gf::MAX_PRIME).contains(&p));
        // Lazy accumulation headroom: width * p^2 must stay well below 2^63.
        assert!((width as u128) * (p as u128) * (p as u128) < 1 << 62);
        PrimeEchelon {
            p,
            width,
            pivot_of_col: vec![NO_PIVOT; width],
            pivots: Vec::new(),
            work: vec![0; width],
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn has_pivot(&self, col: usize) -> bool {
        self.pivot_of_col[col] != NO_PIVOT
    }

    /// Leading columns of the stored pivot rows, unsorted.
    pub fn pivot_cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.iter().map(|r| r.col)
    }

    /// Insert a row given as (column, value) entries; repeated columns
    /// accumulate. Returns true when the row extended the span.
    pub fn insert_sparse(&mut self, entries: &[(u32, u64)]) -> bool {
        self.work.iter_mut().for_each(|w| *w = 0);
        for &(c, v) in entries {
            self.work[c as usize] += v % self.p;
        }
        self.process(true).is_some()
    }

    /// Insert a dense row of (possibly unreduced) u64 values.
    pub fn insert_dense(&mut self, row: &[u64]) -> bool {
        assert_eq!(row.len(), self.width);
        self.work.copy_from_slice(row);
        self.process(true).is_some()
    }

    /// Reduce a row against the current pivots without inserting it.
    /// Returns true when it lies in the row span.
    pub fn in_span(&mut self, entries: &[(u32, u64)]) -> bool {
        self.work.iter_mut().for_each(|w| *w = 0);
        for &(c, v) in entries {
            self.work[c as usize] += v % self.p;
        }
        self.process(false).is_none()
    }

    /// Reduce `self.work` against the pivots. When a fresh leading column is
    /// found: if `store`, normalize and install the row; returns Some(col).
    /// Returns None when the row reduces to zero (or when not storing and the
    /// row does not reduce to zero -- callers of `in_span` invert the result).
    fn process(&mut self, store: bool) -> Option<usize> {
        let p = self.p;
        let mut col = 0;
        while col < self.width {
            let v = self.work[col] % p;
            if v == 0 {
                col += 1;
                continue;
            }
            let pi = self.pivot_of_col[col];
            if pi == NO_PIVOT {
                if !store {
                    return Some(col);
                }
                self.install(col, v);
                return Some(col);
            }
            let mult = p - v;
            match &self.pivots[pi as usize].data {
                PivotData::Dense(data) => {
                    let dst = &mut self.work[col..col + data.len()];
                    for (w, &d) in dst.iter_mut().zip(data.iter()) {
                        *w += mult * d as u64;
                    }
                }
                PivotData::Sparse(items) => {
                    for &(c, d) in items {
                        self.work[c as usize] += mult * d as u64;
                    }
                }
            }
            col += 1;
        }
        None
    }

    fn install(&mut self, col: usize, lead: u64) {
        let p = self.p;
        let inv = inv_mod_u64(lead, p);
        let suffix = &mut self.work[col..];
        let mut nnz = 0usize;
        for w in suffix.iter_mut() {
            let r = *w % p;
            *w = if r == 0 { 0 } else { (r * inv) % p };
            nnz += (*w != 0) as usize;
        }
        let data = if nnz * 8 <= suffix.len() {
            PivotData::Sparse(
                suffix
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, &v)| ((col + i) as u32, v as u32))
                    .collect(),
            )
        } else {
            PivotData::Dense(suffix.iter().map(|&v| v as u32).collect())
        };
        self.pivot_of_col[col] = self.pivots.len() as u32;
        self.pivots.push(PivotRow { col, data });
    }
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

/// Rank of a set of sparse rows over GF(p), optionally stopping as soon as
/// `target` is reached. When the target is not reached every row has been
/// processed, so the returned value is the exact rank.
pub fn rank_sparse_rows(
    p: u64,
    width: usize,
    rows: impl IntoIterator<Item = Vec<(u32, u64)>>,
    target: Option<usize>,
) -> usize {
    let mut ech = PrimeEchelon::new(p, width);
    for row in rows {
        ech.insert_sparse(&row);
        if let Some(t) = target {
            if ech.rank() >= t {
                return ech.rank();
            }
        }
    }
    ech.rank()
}

/// Row echelon with an augmented identity block: inserting rows one by one,
/// rows that reduce to zero yield the coefficients of the dependency in terms
/// of previously inserted rows. Small-scale, fully reduced arithmetic.
pub struct AugmentedEchelon {
    p: u64,
    width: usize,
    n_inserted: usize,
    /// Stored pivot rows: (pivot col, data part, combination part).
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
    pivot_of_col: Vec<u32>,
}

impl AugmentedEchelon {
    pub fn new(p: u64, width: usize) -> Self {
        AugmentedEchelon {
            p,
            width,
            n_inserted: 0,
            rows: Vec::new(),
            pivot_of_col: vec![NO_PIVOT; width],
        }
    }

    /// Insert a row; when it is dependent on earlier rows, return the
    /// combination coefficients c (over all rows inserted so far, the new row
    /// last) with sum_i c_i row_i = 0 and c_last = 1.
    pub fn insert(&mut self, entries: &[(u32, u64)]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut data = vec![0u64; self.width];
        for &(c, v) in entries {
            data[c as usize] = (data[c as usize] + v) % p;
        }
        let mut comb = vec![0u64; self.n_inserted + 1];
        comb[self.n_inserted] = 1;
        self.n_inserted += 1;
        for col in 0..self.width {
            if data[col] == 0 {
                continue;
            }
            let pi = self.pivot_of_col[col];
            if pi == NO_PIVOT {
                // Normalize and store.
                let inv = inv_mod_u64(data[col], p);
                for v in data.iter_mut() {
                    *v = *v * inv % p;
                }
                for v in comb.iter_mut() {
                    *v = *v * inv % p;
                }
                self.pivot_of_col[col] = self.rows.len() as u32;
                self.rows.push((col, data, comb));
                return None;
            }
            let (_, pdata, pcomb) = &self.rows[pi as usize];
            let mult = p - data[col];
            for (w, &d) in data.iter_mut().zip(pdata.iter()).skip(col) {
                *w = (*w + mult * d) % p;
            }
            for (i, &d) in pcomb.iter().enumerate() {
                if d != 0 {
                    comb[i] = (comb[i] + mult * d) % p;
                }
            }
        }
        // Dependent: normalize so the last coefficient is 1 (it already is).
        Some(comb)
    }
}

/// Textbook echelon rank over any supported field (used for extension
/// fields; small inputs only).
pub fn rank_generic(rows: Vec<Vec<FieldElement>>, field: &FieldParams) -> usize {
    let mut pivots: Vec<(usize, Vec<FieldElement>)> = Vec::new();
    for mut row in rows {
        loop {
            let lead = row.iter().position(|x| !x.is_zero());
            let Some(col) = lead else { break };
            if let Some((_, prow)) = pivots.iter().find(|(c, _)| *c == col) {
                let mult = field.neg_raw(row[col]);
                for (w, &d) in row.iter_mut().zip(prow.iter()) {
                    *w = field.add_raw(*w, field.mul_raw(mult, d));
                }
            } else {
                let inv = field.inv_raw(row[col]).expect("nonzero leading entry");
                for w in row.iter_mut() {
                    *w = field.mul_raw(*w, inv);
                }
                pivots.push((col, row));
                break;
            }
        }
    }
    pivots.len()
}

/// Rank over the prime field from dense u64 rows (values may be unreduced).
pub fn rank_dense_rows(p: u64, width: usize, rows: impl IntoIterator<Item = Vec<u64>>) -> usize {
    let mut ech = PrimeEchelon::new(p, width);
    for row in rows {
        ech.insert_dense(&row);
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_block() {
        let rows = vec![vec![(0u32, 1u64)], vec![(1, 2)], vec![(0, 3), (1, 4)]];
        assert_eq!(rank_sparse_rows(5, 3, rows, None), 2);
    }

    #[test]
    fn early_stop_matches_full_rank() {
        let rows: Vec<Vec<(u32, u64)>> = vec![
            vec![(0, 1), (2, 4)],
            vec![(1, 2)],
            vec![(0, 2), (2, 8)], // dependent
            vec![(3, 1)],
        ];
        let full = rank_sparse_rows(7, 4, rows.clone(), None);
        let stopped = rank_sparse_rows(7, 4, rows, Some(3));
        assert_eq!(full, 3);
        assert_eq!(stopped, 3);
    }

    #[test]
    fn dependencies_recovered() {
        let mut aug = AugmentedEchelon::new(5, 3);
        assert!(aug.insert(&[(0, 1), (1, 1)]).is_none());
        assert!(aug.insert(&[(1, 1), (2, 1)]).is_none());
        // row3 = row1 + row2
        let dep = aug.insert(&[(0, 1), (1, 2), (2, 1)]).unwrap();
        // dep holds c with c1*r1 + c2*r2 + c3*r3 = 0, c3 = 1 => c1 = c2 = -1 = 4.
        assert_eq!(dep, vec![4, 4, 1]);
    }

    #[test]
    fn in_span_detects_membership() {
        let mut ech = PrimeEchelon::new(5, 4);
        ech.insert_sparse(&[(0, 1), (1, 1)]);
        ech.insert_sparse(&[(2, 1)]);
        assert!(ech.in_span(&[(0, 2), (1, 2), (2, 3)]));
        assert!(!ech.in_span(&[(3, 1)]));
    }

    #[test]
    fn generic_matches_prime_rank() {
        use crate::rng::SeedStream;
        let field = FieldParams::prime(5).unwrap();
        let mut s = SeedStream::new(9, 0);
        for _ in 0..50 {
            let h = 1 + s.below(6) as usize;
            let w = 1 + s.below(6) as usize;
            let rows_u: Vec<Vec<u64>> = (0..h)
                .map(|_| (0..w).map(|_| s.below(5)).collect())
                .collect();
            let rows_f: Vec<Vec<FieldElement>> = rows_u
                .iter()
                .map(|r| r.iter().map(|&v| field.elem(v)).collect())
                .collect();
            let a = rank_dense_rows(5, w, rows_u);
            let b = rank_generic(rows_f, &field);
            assert_eq!(a, b);
        }
    }
}
