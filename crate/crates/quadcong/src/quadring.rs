//! The quadratic extension `(Z/p^k Z)[T] / (T^2 - d)`.
//!
//! Elements are formal pairs `a + bT` over the base ring. `d` is kept as a
//! canonical residue and must not be divisible by `p`; whether `T` behaves
//! like a genuine square root of a non-residue is recorded by the cached
//! Legendre symbol `chi = (d/p)`.

use std::fmt;

use crate::modarith::{legendre_symbol, ModArithError, PrimePowerModulus, Residue, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadError {
    /// `p | d` is outside the domain of every identity handled here.
    PDividesD { p: u64, d: i64 },
    /// Elements from different extension rings were combined.
    ContextMismatch,
    /// Inversion failed because the norm is divisible by `p`.
    NotUnit { norm: u64 },
    Base(ModArithError),
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::PDividesD { p, d } => write!(f, "{p} divides d = {d}"),
            QuadError::ContextMismatch => write!(f, "elements belong to different rings"),
            QuadError::NotUnit { norm } => {
                write!(f, "element has non-unit norm {norm}")
            }
            QuadError::Base(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for QuadError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            QuadError::Base(e) => Some(e),
            _ => None,
        }
    }
}

impl From<ModArithError> for QuadError {
    fn from(e: ModArithError) -> Self {
        QuadError::Base(e)
    }
}

/// Raw coefficient pair `a + bT`; arithmetic lives on `QuadCtx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pair {
    pub(crate) a: u64,
    pub(crate) b: u64,
}

impl Pair {
    pub(crate) const ZERO: Pair = Pair { a: 0, b: 0 };
    pub(crate) const ONE: Pair = Pair { a: 1, b: 0 };

    pub(crate) fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// Ring descriptor for `(Z/p^k Z)[T] / (T^2 - d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadCtx {
    modulus: PrimePowerModulus,
    d: u64,
    d_signed: i64,
    chi: i32,
}

impl QuadCtx {
    /// `d` is reduced into `[0, N)`; `chi` is the Legendre symbol of `d`
    /// modulo `p`.
    pub fn new(modulus: PrimePowerModulus, d: i64) -> Result<Self, QuadError> {
        let r = modulus.reduce_i64(d);
        if r % modulus.p() == 0 {
            return Err(QuadError::PDividesD { p: modulus.p(), d });
        }
        let chi = legendre_symbol(d, modulus.p())?;
        Ok(Self {
            modulus,
            d: r,
            d_signed: d,
            chi,
        })
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn k(&self) -> u32 {
        self.modulus.k()
    }

    pub fn n(&self) -> u64 {
        self.modulus.n()
    }

    /// The reduced residue of `d`.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// The `d` value the context was built from, before reduction.
    pub fn d_signed(&self) -> i64 {
        self.d_signed
    }

    pub fn chi(&self) -> i32 {
        self.chi
    }

    pub fn elem(&self, a: i64, b: i64) -> QuadElem {
        QuadElem {
            pair: Pair {
                a: self.modulus.reduce_i64(a),
                b: self.modulus.reduce_i64(b),
            },
            ctx: *self,
        }
    }

    pub fn zero(&self) -> QuadElem {
        QuadElem {
            pair: Pair::ZERO,
            ctx: *self,
        }
    }

    pub fn one(&self) -> QuadElem {
        QuadElem {
            pair: Pair::ONE,
            ctx: *self,
        }
    }

    /// The generator `T`.
    pub fn gen_t(&self) -> QuadElem {
        self.elem(0, 1)
    }

    #[inline]
    pub(crate) fn padd(&self, x: Pair, y: Pair) -> Pair {
        Pair {
            a: self.modulus.add_raw(x.a, y.a),
            b: self.modulus.add_raw(x.b, y.b),
        }
    }

    #[inline]
    pub(crate) fn psub(&self, x: Pair, y: Pair) -> Pair {
        Pair {
            a: self.modulus.sub_raw(x.a, y.a),
            b: self.modulus.sub_raw(x.b, y.b),
        }
    }

    #[inline]
    pub(crate) fn pneg(&self, x: Pair) -> Pair {
        Pair {
            a: self.modulus.neg_raw(x.a),
            b: self.modulus.neg_raw(x.b),
        }
    }

    /// `(a1 + b1 T)(a2 + b2 T) = (a1 a2 + d b1 b2) + (a1 b2 + b1 a2) T`.
    /// `b1 b2` is reduced before the `d` factor so every product stays
    /// below `2^124`.
    #[inline]
    pub(crate) fn pmul(&self, x: Pair, y: Pair) -> Pair {
        let m = &self.modulus;
        let bb = m.mul_raw(x.b, y.b);
        Pair {
            a: m.add_raw(m.mul_raw(x.a, y.a), m.mul_raw(bb, self.d)),
            b: m.add_raw(m.mul_raw(x.a, y.b), m.mul_raw(x.b, y.a)),
        }
    }

    pub(crate) fn pconj(&self, x: Pair) -> Pair {
        Pair {
            a: x.a,
            b: self.modulus.neg_raw(x.b),
        }
    }

    /// Norm `a^2 - d b^2` down in the base ring.
    pub(crate) fn pnorm(&self, x: Pair) -> u64 {
        let m = &self.modulus;
        m.sub_raw(m.mul_raw(x.a, x.a), m.mul_raw(m.mul_raw(x.b, x.b), self.d))
    }

    /// `x^{-1} = conj(x) / norm(x)`; fails when `p | norm`.
    pub(crate) fn pinv(&self, x: Pair) -> Result<Pair, QuadError> {
        let n = self.pnorm(x);
        let ninv = self
            .modulus
            .inv_raw(n)
            .map_err(|_| QuadError::NotUnit { norm: n })?;
        let m = &self.modulus;
        Ok(Pair {
            a: m.mul_raw(x.a, ninv),
            b: m.mul_raw(m.neg_raw(x.b), ninv),
        })
    }

    pub(crate) fn ppow(&self, x: Pair, mut exp: u64) -> Pair {
        let mut base = x;
        let mut acc = Pair::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.pmul(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.pmul(base, base);
            }
        }
        acc
    }

    pub(crate) fn pvaluation(&self, x: Pair, cap: u32) -> ValuationResult {
        ValuationResult {
            va: self.modulus.valuation_raw(x.a, cap),
            vb: self.modulus.valuation_raw(x.b, cap),
            cap,
        }
    }
}

impl fmt::Display for QuadCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[T]/(T^2 - {})", self.modulus, self.d)
    }
}

/// An element `a + bT` carrying its ring context. Mixed-context operations
/// are rejected rather than silently coerced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadElem {
    pair: Pair,
    ctx: QuadCtx,
}

impl QuadElem {
    pub fn ctx(&self) -> &QuadCtx {
        &self.ctx
    }

    pub fn a(&self) -> u64 {
        self.pair.a
    }

    pub fn b(&self) -> u64 {
        self.pair.b
    }

    pub fn is_zero(&self) -> bool {
        self.pair.is_zero()
    }

    pub(crate) fn pair(&self) -> Pair {
        self.pair
    }

    pub(crate) fn from_pair(pair: Pair, ctx: QuadCtx) -> Self {
        Self { pair, ctx }
    }

    fn same_ctx(&self, rhs: &QuadElem) -> Result<(), QuadError> {
        if self.ctx != rhs.ctx {
            return Err(QuadError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &QuadElem) -> Result<QuadElem, QuadError> {
        self.same_ctx(rhs)?;
        Ok(Self {
            pair: self.ctx.padd(self.pair, rhs.pair),
            ctx: self.ctx,
        })
    }

    pub fn sub(&self, rhs: &QuadElem) -> Result<QuadElem, QuadError> {
        self.same_ctx(rhs)?;
        Ok(Self {
            pair: self.ctx.psub(self.pair, rhs.pair),
            ctx: self.ctx,
        })
    }

    pub fn mul(&self, rhs: &QuadElem) -> Result<QuadElem, QuadError> {
        self.same_ctx(rhs)?;
        Ok(Self {
            pair: self.ctx.pmul(self.pair, rhs.pair),
            ctx: self.ctx,
        })
    }

    pub fn neg(&self) -> QuadElem {
        Self {
            pair: self.ctx.pneg(self.pair),
            ctx: self.ctx,
        }
    }

    /// Conjugation `a + bT -> a - bT`.
    pub fn conj(&self) -> QuadElem {
        Self {
            pair: self.ctx.pconj(self.pair),
            ctx: self.ctx,
        }
    }

    /// Norm `a^2 - d b^2` as a base-ring residue.
    pub fn norm(&self) -> Residue {
        self.ctx.modulus.residue_u64(self.ctx.pnorm(self.pair))
    }

    /// A unit exactly when `p` does not divide the norm.
    pub fn is_unit(&self) -> bool {
        self.ctx.pnorm(self.pair) % self.ctx.p() != 0
    }

    pub fn inv(&self) -> Result<QuadElem, QuadError> {
        Ok(Self {
            pair: self.ctx.pinv(self.pair)?,
            ctx: self.ctx,
        })
    }

    pub fn pow(&self, exp: u64) -> QuadElem {
        Self {
            pair: self.ctx.ppow(self.pair, exp),
            ctx: self.ctx,
        }
    }

    /// Componentwise valuation over the free basis `{1, T}`.
    pub fn valuation(&self, cap: u32) -> ValuationResult {
        self.ctx.pvaluation(self.pair, cap)
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}T", self.pair.a, self.pair.b)
    }
}

/// Componentwise valuation of `a + bT`, both parts measured with the same
/// cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValuationResult {
    pub va: Valuation,
    pub vb: Valuation,
    pub cap: u32,
}

impl ValuationResult {
    /// Valuation of the whole element: the smaller component.
    pub fn vmin(&self) -> Valuation {
        self.va.min(self.vb)
    }

    /// Whether the element is certifiably divisible by `p^target`.
    pub fn meets(&self, target: u32) -> bool {
        self.vmin().at_least(target)
    }
}

impl fmt::Display for ValuationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v_a = {}, v_b = {})", self.va, self.vb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, k: u32, d: i64) -> QuadCtx {
        QuadCtx::new(PrimePowerModulus::new(p, k).unwrap(), d).unwrap()
    }

    #[test]
    fn construction_and_chi() {
        assert_eq!(ctx(5, 1, 2).chi(), -1);
        assert_eq!(ctx(5, 1, 1).chi(), 1);
        assert_eq!(ctx(13, 1, -1).chi(), 1);
        assert_eq!(ctx(3, 2, 2).d(), 2);
        assert_eq!(ctx(3, 2, -7).d(), 2);
        let m = PrimePowerModulus::new(3, 1).unwrap();
        assert_eq!(QuadCtx::new(m, 6), Err(QuadError::PDividesD { p: 3, d: 6 }));
    }

    #[test]
    fn product_and_square() {
        let c = ctx(3, 1, 2);
        let x = c.elem(1, 1);
        let y = c.elem(1, -1);
        let xy = x.mul(&y).unwrap();
        assert_eq!((xy.a(), xy.b()), (2, 0));
        let sq = x.mul(&x).unwrap();
        assert_eq!((sq.a(), sq.b()), (0, 2));
        // T^2 = d
        let t2 = c.gen_t().pow(2);
        assert_eq!((t2.a(), t2.b()), (2, 0));
    }

    #[test]
    fn inversion_examples() {
        let c = ctx(3, 1, 2);
        let tinv = c.gen_t().inv().unwrap();
        assert_eq!((tinv.a(), tinv.b()), (0, 2));
        let u = c.elem(1, 1);
        let uinv = u.inv().unwrap();
        assert_eq!((uinv.a(), uinv.b()), (2, 1));
        assert_eq!(u.mul(&uinv).unwrap(), c.one());

        // chi = +1: 1 + T has norm 1 - d = 0 mod p when d = 1
        let c1 = ctx(5, 1, 1);
        let v = c1.elem(1, 1);
        assert!(!v.is_unit());
        assert_eq!(v.inv(), Err(QuadError::NotUnit { norm: 0 }));
    }

    #[test]
    fn conj_and_norm_are_multiplicative() {
        let c = ctx(7, 2, 3);
        for (a1, b1, a2, b2) in [(1i64, 2i64, 5i64, 6i64), (0, 1, 4, 4), (46, 13, 2, 48)] {
            let x = c.elem(a1, b1);
            let y = c.elem(a2, b2);
            let xy = x.mul(&y).unwrap();
            assert_eq!(xy.conj(), x.conj().mul(&y.conj()).unwrap());
            assert_eq!(
                xy.norm(),
                x.norm().mul(&y.norm()).unwrap()
            );
            // norm(x) = x * conj(x), as the scalar part
            let xc = x.mul(&x.conj()).unwrap();
            assert_eq!(xc.a(), x.norm().value());
            assert_eq!(xc.b(), 0);
        }
    }

    #[test]
    fn units_exhaustive_small_rings() {
        for p in [3u64, 5, 7, 11, 13] {
            for k in 1..=2u32 {
                for d in -10i64..=10 {
                    if d.rem_euclid(p as i64) == 0 {
                        continue;
                    }
                    let c = ctx(p, k, d);
                    let n = c.n();
                    let mut units = 0u64;
                    for a in 0..n.min(170) {
                        for b in 0..n.min(170) {
                            let x = c.elem(a as i64, b as i64);
                            let unit = x.is_unit();
                            match x.inv() {
                                Ok(xi) => {
                                    assert!(unit);
                                    assert_eq!(x.mul(&xi).unwrap(), c.one());
                                }
                                Err(QuadError::NotUnit { .. }) => assert!(!unit),
                                Err(e) => panic!("unexpected error {e:?}"),
                            }
                            if unit {
                                units += 1;
                            }
                        }
                    }
                    if n <= 170 {
                        // chi = -1, k = 1: a field, so all nonzero elements
                        // are invertible; chi = +1: exactly (p-1)^2 units
                        // survive among the p^2 pairs.
                        if k == 1 && c.chi() == -1 {
                            assert_eq!(units, n * n - 1, "p={p} d={d}");
                        }
                        if k == 1 && c.chi() == 1 {
                            assert_eq!(units, (p - 1) * (p - 1), "p={p} d={d}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn field_case_has_multiplicative_order_dividing_p2_minus_1() {
        // chi = -1 and k = 1 make the ring a field with p^2 elements
        for (p, d) in [(3u64, 2i64), (5, 2), (7, 5), (11, 2), (13, 2)] {
            let c = ctx(p, 1, d);
            assert_eq!(c.chi(), -1);
            for a in 0..p {
                for b in 0..p {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let x = c.elem(a as i64, b as i64);
                    assert_eq!(x.pow(p * p - 1), c.one(), "p={p} d={d} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn frobenius_on_elements() {
        // (x + y)^p = x^p + y^p over Z/p
        for (p, d) in [(3u64, 2i64), (5, 3), (7, 3), (13, 2)] {
            let c = ctx(p, 1, d);
            let x = c.elem(2, 1);
            let y = c.elem(1, p as i64 - 1);
            let lhs = x.add(&y).unwrap().pow(p);
            let rhs = x.pow(p).add(&y.pow(p)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn context_mismatch_rejected() {
        let x = ctx(3, 2, 2).elem(1, 1);
        let y = ctx(3, 2, 5).elem(1, 1);
        let z = ctx(5, 1, 2).elem(1, 1);
        assert_eq!(x.mul(&y), Err(QuadError::ContextMismatch));
        assert_eq!(x.add(&z), Err(QuadError::ContextMismatch));
    }

    #[test]
    fn componentwise_valuation() {
        let c = ctx(3, 3, 2);
        let x = c.elem(9, 3);
        let v = x.valuation(3);
        assert_eq!(v.va, Valuation::Exact(2));
        assert_eq!(v.vb, Valuation::Exact(1));
        assert_eq!(v.vmin(), Valuation::Exact(1));
        assert!(v.meets(1));
        assert!(!v.meets(2));

        let z = c.zero().valuation(3);
        assert_eq!(z.vmin(), Valuation::Saturated(3));
        assert!(z.meets(3));
    }

    #[test]
    fn ring_laws_randomized() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let (p, k, d) = [(3u64, 3u32, 2i64), (5, 2, 3), (641, 1, 5), (7, 4, -1)]
                [rng.gen_range(0..4)];
            let c = ctx(p, k, d);
            let n = c.n() as i64;
            let mut e = || c.elem(rng.gen_range(0..n), rng.gen_range(0..n));
            let (x, y, z) = (e(), e(), e());
            assert_eq!(
                x.mul(&y).unwrap().mul(&z).unwrap(),
                x.mul(&y.mul(&z).unwrap()).unwrap()
            );
            assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            assert_eq!(
                x.mul(&y.add(&z).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
            );
            assert_eq!(x.sub(&y).unwrap().add(&y).unwrap(), x);
            assert_eq!(x.add(&x.neg()).unwrap(), c.zero());
            assert_eq!(x.mul(&c.one()).unwrap(), x);
        }
    }
}
