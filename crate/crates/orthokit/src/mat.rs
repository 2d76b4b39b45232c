//! Dense matrices over a ring context. Determinants use a division-free
//! subset expansion and inverses go through the adjugate, so everything works
//! over rings with zero divisors, not just fields.

use crate::error::{Error, Result};
use crate::ring::{ElemData, RingCtx, RingElem};

/// Determinants and adjugates expand over column subsets; beyond this size
/// the 2ⁿ table is no longer reasonable.
pub const DET_LIMIT: usize = 16;

#[derive(Clone, Debug)]
pub struct Mat {
    ctx: RingCtx,
    rows: usize,
    cols: usize,
    /// Row-major payloads, kept in canonical form by the ring operations.
    data: Vec<ElemData>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}
impl Eq for Mat {}

impl Mat {
    pub fn zero(ctx: &RingCtx, rows: usize, cols: usize) -> Mat {
        Mat { ctx: ctx.clone(), rows, cols, data: vec![ctx.zero_data(); rows * cols] }
    }

    pub fn identity(ctx: &RingCtx, n: usize) -> Mat {
        let mut m = Mat::zero(ctx, n, n);
        for i in 0..n {
            m.data[i * n + i] = ctx.one_data();
        }
        m
    }

    pub fn from_rows(ctx: &RingCtx, rows: &[Vec<RingElem>]) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged rows in matrix literal".into()));
            }
            for e in row {
                ctx.claim(e)?;
                data.push(e.data().clone());
            }
        }
        Ok(Mat { ctx: ctx.clone(), rows: r, cols: c, data })
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> RingElem {
        RingElem::from_parts(self.ctx.id(), self.data[i * self.cols + j].clone())
    }

    pub fn set(&mut self, i: usize, j: usize, v: &RingElem) -> Result<()> {
        self.ctx.claim(v)?;
        self.data[i * self.cols + j] = v.data().clone();
        Ok(())
    }

    fn same_shape(&self, other: &Mat) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.same_shape(other)?;
        let kind = self.ctx.kind();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| crate::ring::add_data(kind, a, b))
            .collect();
        Ok(Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.same_shape(other)?;
        let kind = self.ctx.kind();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| crate::ring::sub_data(kind, a, b))
            .collect();
        Ok(Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Mat {
        let kind = self.ctx.kind();
        let data = self.data.iter().map(|a| crate::ring::neg_data(kind, a)).collect();
        Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let kind = self.ctx.kind();
        let mut out = Mat::zero(&self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if crate::ring::is_zero_data(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    let t = crate::ring::mul_data(kind, a, b);
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = crate::ring::add_data(kind, cell, &t);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &RingElem) -> Result<Mat> {
        self.ctx.claim(s)?;
        let kind = self.ctx.kind();
        let data =
            self.data.iter().map(|a| crate::ring::mul_data(kind, s.data(), a)).collect();
        Ok(Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape("matrix power needs a square matrix".into()));
        }
        let mut acc = Mat::identity(&self.ctx, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(crate::ring::is_zero_data)
    }

    pub fn is_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let one = self.ctx.one_data();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = &self.data[i * self.cols + j];
                if i == j {
                    if *e != one {
                        return false;
                    }
                } else if !crate::ring::is_zero_data(e) {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> Result<RingElem> {
        if !self.is_square() {
            return Err(Error::Shape("trace needs a square matrix".into()));
        }
        let kind = self.ctx.kind();
        let mut acc = self.ctx.zero_data();
        for i in 0..self.rows {
            acc = crate::ring::add_data(kind, &acc, &self.data[i * self.cols + i]);
        }
        Ok(RingElem::from_parts(self.ctx.id(), acc))
    }

    /// Division-free determinant: D[S] is the determinant of the first |S|
    /// rows restricted to the column set S, filled in by Laplace expansion
    /// along the last of those rows.
    pub fn det(&self) -> Result<RingElem> {
        if !self.is_square() {
            return Err(Error::Shape("determinant needs a square matrix".into()));
        }
        let n = self.rows;
        if n > DET_LIMIT {
            return Err(Error::CapExceeded { cap: DET_LIMIT, reached: n });
        }
        if n == 0 {
            return Ok(self.ctx.one());
        }
        let kind = self.ctx.kind();
        let mut d = vec![self.ctx.zero_data(); 1usize << n];
        d[0] = self.ctx.one_data();
        for mask in 1usize..(1 << n) {
            let k = (mask.count_ones() - 1) as usize;
            let mut acc = self.ctx.zero_data();
            let mut pos = 0usize;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let a = &self.data[k * n + j];
                if !crate::ring::is_zero_data(a) {
                    let mut term = crate::ring::mul_data(kind, a, &d[mask ^ (1 << j)]);
                    if (k + pos) % 2 == 1 {
                        term = crate::ring::neg_data(kind, &term);
                    }
                    acc = crate::ring::add_data(kind, &acc, &term);
                }
                pos += 1;
            }
            d[mask] = acc;
        }
        Ok(RingElem::from_parts(self.ctx.id(), d[(1 << n) - 1].clone()))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Mat {
        let n = self.rows;
        let mut out = Mat::zero(&self.ctx, n - 1, n - 1);
        let mut r = 0;
        for i in 0..n {
            if i == skip_row {
                continue;
            }
            let mut c = 0;
            for j in 0..n {
                if j == skip_col {
                    continue;
                }
                out.data[r * (n - 1) + c] = self.data[i * n + j].clone();
                c += 1;
            }
            r += 1;
        }
        out
    }

    /// Adjugate inverse; `None` when the determinant is not a unit.
    pub fn inverse(&self) -> Result<Option<Mat>> {
        if !self.is_square() {
            return Err(Error::Shape("inverse needs a square matrix".into()));
        }
        let n = self.rows;
        let det = self.det()?;
        let Some(det_inv) = self.ctx.inverse(&det)? else {
            return Ok(None);
        };
        if n == 0 {
            return Ok(Some(self.clone()));
        }
        let kind = self.ctx.kind();
        let mut adj = Mat::zero(&self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                let mut c = self.minor(i, j).det()?.data().clone();
                if (i + j) % 2 == 1 {
                    c = crate::ring::neg_data(kind, &c);
                }
                // adjugate transposes the cofactor grid
                adj.data[j * n + i] = crate::ring::mul_data(kind, &c, det_inv.data());
            }
        }
        Ok(Some(adj))
    }

    pub fn col(&self, j: usize) -> Mat {
        let mut out = Mat::zero(&self.ctx, self.rows, 1);
        for i in 0..self.rows {
            out.data[i] = self.data[i * self.cols + j].clone();
        }
        out
    }

    /// Apply an entrywise map into another context, e.g. a base-change or a
    /// ring homomorphism.
    pub fn map_entries<F>(&self, target: &RingCtx, mut f: F) -> Result<Mat>
    where
        F: FnMut(&RingElem) -> Result<RingElem>,
    {
        let mut data = Vec::with_capacity(self.data.len());
        for d in &self.data {
            let v = f(&RingElem::from_parts(self.ctx.id(), d.clone()))?;
            target.claim(&v)?;
            data.push(v.data().clone());
        }
        Ok(Mat { ctx: target.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Stable byte encoding (shape plus canonical entries) for hashing.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend((self.rows as u32).to_le_bytes());
        out.extend((self.cols as u32).to_le_bytes());
        for d in &self.data {
            crate::ring::push_canonical(d, &mut out);
        }
        out
    }

    /// Rows separated by `;`, entries by `,`.
    pub fn format(&self) -> String {
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| crate::ring::format_data(&self.data[i * self.cols + j]))
                .collect();
            rows.push(row.join(","));
        }
        rows.join(";")
    }

    pub fn parse(ctx: &RingCtx, s: &str) -> Result<Mat> {
        let mut rows: Vec<Vec<RingElem>> = Vec::new();
        for row_s in crate::ring::split_top(s.trim(), ';') {
            let mut row = Vec::new();
            for tok in crate::ring::split_top(row_s, ',') {
                row.push(ctx.parse_elem(tok.trim())?);
            }
            rows.push(row);
        }
        Mat::from_rows(ctx, &rows)
    }
}
