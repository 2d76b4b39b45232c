//! Free quadratic spaces M = Q ⊥ ℍ(R)^m. The Gram matrix stores the
//! symmetric bilinear form ⟨,⟩; with 2 invertible the quadratic form is
//! recovered as q(v) = 2⁻¹⟨v,v⟩.
//!
//! Coordinate layout: the Q-part occupies coordinates 0..n, and the k-th
//! hyperbolic pair (x_k, f_k) sits at (n+2k, n+2k+1). Keeping the pairs
//! interleaved makes the classical generator indices line up with no
//! permutation.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::ring::{IdealDesc, RingCtx, RingElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpace {
    ctx: RingCtx,
    /// Rank of the diagonal/anisotropic part Q.
    n: usize,
    /// Number of hyperbolic pairs.
    m: usize,
    gram: Mat,
}

impl QuadSpace {
    /// General constructor: a symmetric invertible Q-part Gram plus m
    /// hyperbolic planes, assembled in the standard layout.
    pub fn new(ctx: &RingCtx, q_gram: &Mat, m: usize) -> Result<QuadSpace> {
        ctx.claim_mat(q_gram)?;
        if !q_gram.is_square() {
            return Err(Error::Shape("Q-part Gram must be square".into()));
        }
        let n = q_gram.rows();
        if n + 2 * m == 0 {
            return Err(Error::Shape("quadratic space must have positive rank".into()));
        }
        if q_gram.transpose() != *q_gram {
            return Err(Error::Invalid("Q-part Gram must be symmetric".into()));
        }
        let dim = n + 2 * m;
        let mut gram = Mat::zero(ctx, dim, dim);
        for i in 0..n {
            for j in 0..n {
                gram.set(i, j, &q_gram.get(i, j))?;
            }
        }
        let one = ctx.one();
        for k in 0..m {
            gram.set(n + 2 * k, n + 2 * k + 1, &one)?;
            gram.set(n + 2 * k + 1, n + 2 * k, &one)?;
        }
        let space = QuadSpace { ctx: ctx.clone(), n, m, gram };
        if ctx.inverse(&space.gram.det()?)?.is_none() {
            return Err(Error::Invalid("Gram determinant must be a unit".into()));
        }
        Ok(space)
    }

    /// The standard split form: even rank is m hyperbolic planes; odd rank
    /// puts a single diagonal entry 2 in front.
    pub fn phi_tilde(ctx: &RingCtx, rank: usize) -> Result<QuadSpace> {
        if rank < 1 {
            return Err(Error::Shape("phi-tilde rank must be at least 1".into()));
        }
        if rank % 2 == 0 {
            QuadSpace::new(ctx, &Mat::zero(ctx, 0, 0), rank / 2)
        } else {
            let mut q = Mat::zero(ctx, 1, 1);
            q.set(0, 0, &ctx.from_i64(2))?;
            QuadSpace::new(ctx, &q, rank / 2)
        }
    }

    /// m hyperbolic planes and no Q-part.
    pub fn hyperbolic(ctx: &RingCtx, m: usize) -> Result<QuadSpace> {
        QuadSpace::new(ctx, &Mat::zero(ctx, 0, 0), m)
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }
    pub fn q_rank(&self) -> usize {
        self.n
    }
    pub fn hyp_rank(&self) -> usize {
        self.m
    }
    pub fn dim(&self) -> usize {
        self.n + 2 * self.m
    }
    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// Upper-left n×n block: the Gram of the Q-part.
    pub fn q_gram(&self) -> Mat {
        let mut q = Mat::zero(&self.ctx, self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                q.set(i, j, &self.gram.get(i, j)).expect("same ctx");
            }
        }
        q
    }

    /// Stored coordinate of z_t, x_k, f_k respectively.
    pub fn z_index(&self, t: usize) -> usize {
        debug_assert!(t < self.n);
        t
    }
    pub fn x_index(&self, k: usize) -> usize {
        debug_assert!(k < self.m);
        self.n + 2 * k
    }
    pub fn f_index(&self, k: usize) -> usize {
        debug_assert!(k < self.m);
        self.n + 2 * k + 1
    }

    /// The involution swapping x_k ↔ f_k in every hyperbolic pair.
    pub fn pair_swap_mat(&self) -> Mat {
        let dim = self.dim();
        let mut p = Mat::zero(&self.ctx, dim, dim);
        let one = self.ctx.one();
        for t in 0..self.n {
            p.set(t, t, &one).expect("same ctx");
        }
        for k in 0..self.m {
            p.set(self.x_index(k), self.f_index(k), &one).expect("same ctx");
            p.set(self.f_index(k), self.x_index(k), &one).expect("same ctx");
        }
        p
    }

    /// Orthogonal sum, normalized so both Q-parts come first, then all
    /// hyperbolic pairs.
    pub fn orth_sum(&self, other: &QuadSpace) -> Result<QuadSpace> {
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        let n = self.n + other.n;
        let mut q = Mat::zero(&self.ctx, n, n);
        for i in 0..self.n {
            for j in 0..self.n {
                q.set(i, j, &self.gram.get(i, j))?;
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                q.set(self.n + i, self.n + j, &other.gram.get(i, j))?;
            }
        }
        QuadSpace::new(&self.ctx, &q, self.m + other.m)
    }

    fn claim_vector(&self, v: &Mat) -> Result<()> {
        self.ctx.claim_mat(v)?;
        if v.cols() != 1 || v.rows() != self.dim() {
            return Err(Error::Shape(format!(
                "expected a {}x1 vector, got {}x{}",
                self.dim(),
                v.rows(),
                v.cols()
            )));
        }
        Ok(())
    }

    /// ⟨u, v⟩ = uᵀ · gram · v.
    pub fn bilinear(&self, u: &Mat, v: &Mat) -> Result<RingElem> {
        self.claim_vector(u)?;
        self.claim_vector(v)?;
        Ok(u.transpose().mul(&self.gram)?.mul(v)?.get(0, 0))
    }

    /// q(v) = 2⁻¹·⟨v, v⟩.
    pub fn q_eval(&self, v: &Mat) -> Result<RingElem> {
        let b = self.bilinear(v, v)?;
        self.ctx.mul(&self.ctx.inv2(), &b)
    }

    /// Mᵀ · gram · M = gram, exactly.
    pub fn is_orthogonal(&self, mat: &Mat) -> Result<bool> {
        self.ctx.claim_mat(mat)?;
        if mat.rows() != self.dim() || mat.cols() != self.dim() {
            return Err(Error::Shape(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.dim(),
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(mat.transpose().mul(&self.gram)?.mul(mat)? == self.gram)
    }

    /// Every entry of M − Id lies in the ideal.
    pub fn is_relative(&self, mat: &Mat, ideal: &IdealDesc) -> Result<bool> {
        self.ctx.claim_mat(mat)?;
        if ideal.ctx() != &self.ctx {
            return Err(Error::CtxMismatch);
        }
        let diff = mat.sub(&Mat::identity(&self.ctx, self.dim()))?;
        for i in 0..diff.rows() {
            for j in 0..diff.cols() {
                if !ideal.contains(&diff.get(i, j))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Entrywise transport into another context (base change or lift); the
    /// image must again be a valid quadratic space.
    pub fn map_entries<F>(&self, target: &RingCtx, mut f: F) -> Result<QuadSpace>
    where
        F: FnMut(&RingElem) -> Result<RingElem>,
    {
        let q = self.q_gram().map_entries(target, &mut f)?;
        QuadSpace::new(target, &q, self.m)
    }
}

impl RingCtx {
    pub(crate) fn claim_mat(&self, m: &Mat) -> Result<()> {
        if m.ctx() == self {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }
}
