//! Dense univariate polynomials over a quadratic extension ring.
//!
//! Coefficients are stored lowest degree first and kept normalized: the
//! last stored coefficient is nonzero and the zero polynomial is the empty
//! vector. Multiplication is schoolbook for small operands and Karatsuba
//! above [`KARATSUBA_THRESHOLD`].

use std::fmt;

use crate::quadring::{Pair, QuadCtx, QuadElem};

/// Operand degree at or below which multiplication stays schoolbook.
pub(crate) const KARATSUBA_THRESHOLD: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Operands belong to different rings.
    ContextMismatch,
    /// Division by the zero polynomial.
    ZeroDivisor,
    /// Exact division requires a unit leading coefficient in the divisor.
    NonUnitLeadingCoeff,
    /// The division left a nonzero remainder.
    NonZeroRemainder,
    /// The binomial-identity expansion is a mod-p statement and needs
    /// `k = 1`.
    RequiresK1,
    /// A product over an empty list has no ring to produce `1` in.
    EmptyProduct,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::ContextMismatch => write!(f, "polynomials belong to different rings"),
            PolyError::ZeroDivisor => write!(f, "division by the zero polynomial"),
            PolyError::NonUnitLeadingCoeff => {
                write!(f, "divisor leading coefficient is not a unit")
            }
            PolyError::NonZeroRemainder => write!(f, "division is not exact"),
            PolyError::RequiresK1 => {
                write!(f, "binomial-identity expansion requires exponent k = 1")
            }
            PolyError::EmptyProduct => write!(f, "empty product has no context"),
        }
    }
}

impl std::error::Error for PolyError {}

/// A normalized dense polynomial with coefficients in one [`QuadCtx`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensePoly {
    coeffs: Vec<Pair>,
    ctx: QuadCtx,
}

impl DensePoly {
    pub fn zero(ctx: &QuadCtx) -> Self {
        Self {
            coeffs: Vec::new(),
            ctx: *ctx,
        }
    }

    pub fn one(ctx: &QuadCtx) -> Self {
        Self {
            coeffs: vec![Pair::ONE],
            ctx: *ctx,
        }
    }

    /// The monic linear factor `x - root`.
    pub fn linear_from_root(root: &QuadElem) -> Self {
        let ctx = *root.ctx();
        Self {
            coeffs: vec![ctx.pneg(root.pair()), Pair::ONE],
            ctx,
        }
    }

    /// Builds from `(a, b)` integer pairs, lowest degree first.
    pub fn from_int_coeffs(ctx: &QuadCtx, coeffs: &[(i64, i64)]) -> Self {
        let raw = coeffs
            .iter()
            .map(|&(a, b)| ctx.elem(a, b).pair())
            .collect();
        Self::from_raw(*ctx, raw)
    }

    /// Builds from scalar terms `(degree, value)`; repeated degrees
    /// accumulate.
    pub fn from_sparse_int(ctx: &QuadCtx, terms: &[(usize, i64)]) -> Self {
        let len = terms.iter().map(|&(e, _)| e + 1).max().unwrap_or(0);
        let mut raw = vec![Pair::ZERO; len];
        for &(e, v) in terms {
            raw[e] = ctx.padd(raw[e], ctx.elem(v, 0).pair());
        }
        Self::from_raw(*ctx, raw)
    }

    pub fn from_coeffs(ctx: &QuadCtx, coeffs: &[QuadElem]) -> Result<Self, PolyError> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.ctx() != ctx {
                return Err(PolyError::ContextMismatch);
            }
            raw.push(c.pair());
        }
        Ok(Self::from_raw(*ctx, raw))
    }

    pub(crate) fn from_raw(ctx: QuadCtx, mut coeffs: Vec<Pair>) -> Self {
        trim_raw(&mut coeffs);
        Self { coeffs, ctx }
    }

    #[cfg(test)]
    pub(crate) fn raw(&self) -> &[Pair] {
        &self.coeffs
    }

    pub fn ctx(&self) -> &QuadCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i`; zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> QuadElem {
        let pair = self.coeffs.get(i).copied().unwrap_or(Pair::ZERO);
        QuadElem::from_pair(pair, self.ctx)
    }

    pub fn leading(&self) -> Option<QuadElem> {
        self.coeffs
            .last()
            .map(|&p| QuadElem::from_pair(p, self.ctx))
    }

    /// Exponents of the nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    fn same_ctx(&self, rhs: &DensePoly) -> Result<(), PolyError> {
        if self.ctx != rhs.ctx {
            return Err(PolyError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(rhs)?;
        let mut out = vec![Pair::ZERO; self.coeffs.len().max(rhs.coeffs.len())];
        out[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        add_assign_at(&self.ctx, &mut out, &rhs.coeffs, 0);
        Ok(Self::from_raw(self.ctx, out))
    }

    pub fn sub(&self, rhs: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(rhs)?;
        let mut out = vec![Pair::ZERO; self.coeffs.len().max(rhs.coeffs.len())];
        out[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        sub_assign_at(&self.ctx, &mut out, &rhs.coeffs, 0);
        Ok(Self::from_raw(self.ctx, out))
    }

    pub fn neg(&self) -> DensePoly {
        let raw = self.coeffs.iter().map(|&c| self.ctx.pneg(c)).collect();
        Self {
            coeffs: raw,
            ctx: self.ctx,
        }
    }

    pub fn mul_elem(&self, c: &QuadElem) -> Result<DensePoly, PolyError> {
        if c.ctx() != &self.ctx {
            return Err(PolyError::ContextMismatch);
        }
        let raw = self
            .coeffs
            .iter()
            .map(|&x| self.ctx.pmul(x, c.pair()))
            .collect();
        Ok(Self::from_raw(self.ctx, raw))
    }

    pub fn mul(&self, rhs: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        let raw = kmul_raw(&self.ctx, &self.coeffs, &rhs.coeffs);
        Ok(Self::from_raw(self.ctx, raw))
    }

    /// Square-and-multiply power; `f^0 = 1`.
    pub fn pow(&self, mut exp: u64) -> DensePoly {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same context");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).expect("same context");
            }
        }
        acc
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &QuadElem) -> Result<QuadElem, PolyError> {
        if x.ctx() != &self.ctx {
            return Err(PolyError::ContextMismatch);
        }
        let mut acc = Pair::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = self.ctx.padd(self.ctx.pmul(acc, x.pair()), c);
        }
        Ok(QuadElem::from_pair(acc, self.ctx))
    }

    /// Quotient of an exact division. The divisor needs a unit leading
    /// coefficient; any nonzero remainder is an error, not a result.
    pub fn div_exact(&self, rhs: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(rhs)?;
        if rhs.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let lead_inv = self
            .ctx
            .pinv(*rhs.coeffs.last().expect("nonzero divisor"))
            .map_err(|_| PolyError::NonUnitLeadingCoeff)?;
        if self.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        if self.coeffs.len() < rhs.coeffs.len() {
            return Err(PolyError::NonZeroRemainder);
        }
        let dlen = rhs.coeffs.len();
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dlen + 1;
        let mut q = vec![Pair::ZERO; qlen];
        for i in (0..qlen).rev() {
            let c = self.ctx.pmul(rem[i + dlen - 1], lead_inv);
            if !c.is_zero() {
                q[i] = c;
                for (j, &r) in rhs.coeffs.iter().enumerate() {
                    rem[i + j] = self.ctx.psub(rem[i + j], self.ctx.pmul(c, r));
                }
            }
        }
        if rem.iter().any(|p| !p.is_zero()) {
            return Err(PolyError::NonZeroRemainder);
        }
        Ok(Self::from_raw(self.ctx, q))
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c.a, c.b) {
                (a, 0) => write!(f, "{a}")?,
                (0, 1) => write!(f, "T")?,
                (0, b) => write!(f, "{b}T")?,
                (a, b) => write!(f, "({a}+{b}T)")?,
            }
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `prod (x - roots[i])` by balanced recursive splitting. The empty
/// product is `1`.
pub fn product_of_linear_factors(
    ctx: &QuadCtx,
    roots: &[QuadElem],
) -> Result<DensePoly, PolyError> {
    let mut raw = Vec::with_capacity(roots.len());
    for r in roots {
        if r.ctx() != ctx {
            return Err(PolyError::ContextMismatch);
        }
        raw.push(r.pair());
    }
    Ok(DensePoly::from_raw(*ctx, roots_product_raw(ctx, &raw)))
}

fn roots_product_raw(ctx: &QuadCtx, roots: &[Pair]) -> Vec<Pair> {
    match roots.len() {
        0 => vec![Pair::ONE],
        1 => vec![ctx.pneg(roots[0]), Pair::ONE],
        n => {
            let (lo, hi) = roots.split_at(n / 2);
            let left = roots_product_raw(ctx, lo);
            let right = roots_product_raw(ctx, hi);
            kmul_raw(ctx, &left, &right)
        }
    }
}

/// Product of a non-empty list of polynomials by balanced splitting.
pub fn balanced_product(polys: &[DensePoly]) -> Result<DensePoly, PolyError> {
    match polys.len() {
        0 => Err(PolyError::EmptyProduct),
        1 => Ok(polys[0].clone()),
        n => {
            let (lo, hi) = polys.split_at(n / 2);
            balanced_product(lo)?.mul(&balanced_product(hi)?)
        }
    }
}

/// Expands `(x - c)^(p - 1)` mod p in O(p) ring operations: since
/// `C(p-1, j) = (-1)^j (mod p)`, the coefficient of `x^(p-1-j)` is `c^j`.
/// A mod-p identity, so the ring must have `k = 1`.
pub fn shifted_power_pm1(c: &QuadElem) -> Result<DensePoly, PolyError> {
    let ctx = *c.ctx();
    if ctx.k() != 1 {
        return Err(PolyError::RequiresK1);
    }
    let deg = (ctx.p() - 1) as usize;
    let mut raw = vec![Pair::ZERO; deg + 1];
    let mut power = Pair::ONE;
    for j in 0..=deg {
        raw[deg - j] = power;
        if j < deg {
            power = ctx.pmul(power, c.pair());
        }
    }
    Ok(DensePoly::from_raw(ctx, raw))
}

fn trim_raw(v: &mut Vec<Pair>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn add_assign_at(ctx: &QuadCtx, out: &mut [Pair], src: &[Pair], off: usize) {
    for (i, &c) in src.iter().enumerate() {
        out[off + i] = ctx.padd(out[off + i], c);
    }
}

fn sub_assign_at(ctx: &QuadCtx, out: &mut [Pair], src: &[Pair], off: usize) {
    for (i, &c) in src.iter().enumerate() {
        out[off + i] = ctx.psub(out[off + i], c);
    }
}

fn add_padded(ctx: &QuadCtx, x: &[Pair], y: &[Pair]) -> Vec<Pair> {
    let mut out = vec![Pair::ZERO; x.len().max(y.len())];
    out[..x.len()].copy_from_slice(x);
    add_assign_at(ctx, &mut out, y, 0);
    out
}

/// Full product of two nonempty coefficient slices, length `la + lb - 1`,
/// not normalized.
fn kmul_raw(ctx: &QuadCtx, a: &[Pair], b: &[Pair]) -> Vec<Pair> {
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD + 1 {
        return schoolbook_raw(ctx, a, b);
    }
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = kmul_raw(ctx, a0, b0);
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        kmul_raw(ctx, a1, b1)
    };
    let mut z1 = kmul_raw(ctx, &add_padded(ctx, a0, a1), &add_padded(ctx, b0, b1));
    sub_assign_at(ctx, &mut z1, &z0, 0);
    sub_assign_at(ctx, &mut z1, &z2, 0);
    // z1's top slots can cancel to zero; trim so the placement below
    // stays inside the true product length
    trim_raw(&mut z1);
    let mut out = vec![Pair::ZERO; a.len() + b.len() - 1];
    add_assign_at(ctx, &mut out, &z0, 0);
    add_assign_at(ctx, &mut out, &z1, m);
    if !z2.is_empty() {
        add_assign_at(ctx, &mut out, &z2, 2 * m);
    }
    out
}

/// Quadratic-time product. When the modulus fits 31 bits the cross sums
/// are accumulated lazily in `u128` and reduced once per output
/// coefficient; each term is below `2^62` and `u128` absorbs any operand
/// length that fits in memory.
fn schoolbook_raw(ctx: &QuadCtx, a: &[Pair], b: &[Pair]) -> Vec<Pair> {
    let out_len = a.len() + b.len() - 1;
    let mut out = vec![Pair::ZERO; out_len];
    let n = ctx.n();
    if n < (1 << 31) {
        let nn = n as u128;
        let d = ctx.d() as u128;
        for (k, slot) in out.iter_mut().enumerate() {
            let lo = (k + 1).saturating_sub(b.len());
            let hi = k.min(a.len() - 1);
            let mut saa = 0u128;
            let mut sbb = 0u128;
            let mut sab = 0u128;
            for i in lo..=hi {
                let x = a[i];
                let y = b[k - i];
                saa += x.a as u128 * y.a as u128;
                sbb += x.b as u128 * y.b as u128;
                sab += x.a as u128 * y.b as u128 + x.b as u128 * y.a as u128;
            }
            *slot = Pair {
                a: ((saa + d * (sbb % nn)) % nn) as u64,
                b: (sab % nn) as u64,
            };
        }
    } else {
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ctx.padd(out[i + j], ctx.pmul(x, y));
            }
        }
    }
    out
}
