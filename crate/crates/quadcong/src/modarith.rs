//! The base residue ring `Z/p^k Z` for an odd prime `p`.
//!
//! All arithmetic is canonical: every residue lives in `[0, N)` with
//! `N = p^k`, and every operation reduces its result. The modulus is
//! bounded by `2^62` so that a product of two residues always fits in a
//! `u128` intermediate.

use std::fmt;

/// Moduli must stay below this bound so double-width products cannot
/// overflow.
pub const MODULUS_BOUND: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModArithError {
    /// The requested base is not an odd prime.
    NotOddPrime(u64),
    /// `p^k` does not fit below the `2^62` bound.
    Overflow { p: u64, k: u32 },
    /// The exponent of a prime-power modulus must be at least 1.
    ZeroExponent,
    /// Two residues from different rings were combined.
    ModulusMismatch,
    /// Inversion of a residue divisible by `p`.
    NotUnit { value: u64, modulus: u64 },
}

impl fmt::Display for ModArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModArithError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            ModArithError::Overflow { p, k } => {
                write!(f, "{p}^{k} exceeds the 2^62 modulus bound")
            }
            ModArithError::ZeroExponent => write!(f, "prime-power exponent must be at least 1"),
            ModArithError::ModulusMismatch => write!(f, "residues have different moduli"),
            ModArithError::NotUnit { value, modulus } => {
                write!(f, "{value} is not a unit modulo {modulus}")
            }
        }
    }
}

impl std::error::Error for ModArithError {}

/// Descriptor of the ring `Z/p^k Z`: an odd prime `p`, an exponent `k >= 1`,
/// and the modulus value `N = p^k < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus {
    p: u64,
    k: u32,
    n: u64,
}

impl PrimePowerModulus {
    /// Validates primality of `p` and the size bound on `p^k`.
    pub fn new(p: u64, k: u32) -> Result<Self, ModArithError> {
        if !is_odd_prime(p) {
            return Err(ModArithError::NotOddPrime(p));
        }
        if k == 0 {
            return Err(ModArithError::ZeroExponent);
        }
        let mut n: u64 = 1;
        for _ in 0..k {
            n = n
                .checked_mul(p)
                .filter(|&m| m < MODULUS_BOUND)
                .ok_or(ModArithError::Overflow { p, k })?;
        }
        Ok(Self { p, k, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Reduces a signed integer into `[0, N)`.
    pub fn residue(&self, value: i64) -> Residue {
        Residue {
            value: self.reduce_i64(value),
            modulus: *self,
        }
    }

    /// Reduces an unsigned integer into `[0, N)`.
    pub fn residue_u64(&self, value: u64) -> Residue {
        Residue {
            value: value % self.n,
            modulus: *self,
        }
    }

    pub(crate) fn reduce_i64(&self, value: i64) -> u64 {
        // n < 2^62 so the cast to i64 is lossless
        value.rem_euclid(self.n as i64) as u64
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.n - b + a
        }
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.n - a
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.n as u128) as u64
    }

    pub(crate) fn pow_raw(&self, base: u64, mut exp: u64) -> u64 {
        let mut base = base % self.n;
        let mut acc: u64 = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul_raw(base, base);
            }
        }
        acc
    }

    pub(crate) fn inv_raw(&self, a: u64) -> Result<u64, ModArithError> {
        let (g, x, _) = ext_gcd(a as i128, self.n as i128);
        if g != 1 {
            return Err(ModArithError::NotUnit {
                value: a,
                modulus: self.n,
            });
        }
        Ok(x.rem_euclid(self.n as i128) as u64)
    }

    /// Largest `e <= cap` with `p^e | x`; saturates when `p^cap | x`.
    ///
    /// Valuations past `k` are not certifiable in `Z/p^k`, hence the
    /// `cap <= k` requirement and the saturation report for the zero
    /// residue.
    pub(crate) fn valuation_raw(&self, x: u64, cap: u32) -> Valuation {
        assert!(cap >= 1 && cap <= self.k, "valuation cap must be in 1..=k");
        if x == 0 {
            return Valuation::Saturated(cap);
        }
        let mut e = 0u32;
        let mut y = x;
        while e < cap && y % self.p == 0 {
            y /= self.p;
            e += 1;
        }
        if e == cap {
            Valuation::Saturated(cap)
        } else {
            Valuation::Exact(e)
        }
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.k)
    }
}

/// A canonical residue in `[0, N)` tied to its ring descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Residue {
    value: u64,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_ring(&self, rhs: &Residue) -> Result<(), ModArithError> {
        if self.modulus != rhs.modulus {
            return Err(ModArithError::ModulusMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Residue) -> Result<Residue, ModArithError> {
        self.same_ring(rhs)?;
        Ok(Residue {
            value: self.modulus.add_raw(self.value, rhs.value),
            modulus: self.modulus,
        })
    }

    pub fn sub(&self, rhs: &Residue) -> Result<Residue, ModArithError> {
        self.same_ring(rhs)?;
        Ok(Residue {
            value: self.modulus.sub_raw(self.value, rhs.value),
            modulus: self.modulus,
        })
    }

    pub fn mul(&self, rhs: &Residue) -> Result<Residue, ModArithError> {
        self.same_ring(rhs)?;
        Ok(Residue {
            value: self.modulus.mul_raw(self.value, rhs.value),
            modulus: self.modulus,
        })
    }

    pub fn neg(&self) -> Residue {
        Residue {
            value: self.modulus.neg_raw(self.value),
            modulus: self.modulus,
        }
    }

    /// Square-and-multiply power; `a^0 = 1`.
    pub fn pow(&self, exp: u64) -> Residue {
        Residue {
            value: self.modulus.pow_raw(self.value, exp),
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse; defined exactly when `p` does not divide
    /// the value.
    pub fn inv(&self) -> Result<Residue, ModArithError> {
        Ok(Residue {
            value: self.modulus.inv_raw(self.value)?,
            modulus: self.modulus,
        })
    }

    pub fn valuation(&self, cap: u32) -> Valuation {
        self.modulus.valuation_raw(self.value, cap)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A p-adic valuation measured inside `Z/p^k`: either an exact value below
/// the cap, or saturated (`>= cap`, the ring cannot certify more).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Exact(u32),
    Saturated(u32),
}

impl Valuation {
    /// The certified lower bound: the exact value, or the cap when
    /// saturated.
    pub fn floor(&self) -> u32 {
        match *self {
            Valuation::Exact(v) => v,
            Valuation::Saturated(cap) => cap,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, Valuation::Saturated(_))
    }

    pub fn at_least(&self, target: u32) -> bool {
        self.floor() >= target
    }

    pub fn min(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Exact(a), Valuation::Exact(b)) => Valuation::Exact(a.min(b)),
            (Valuation::Exact(a), Valuation::Saturated(c))
            | (Valuation::Saturated(c), Valuation::Exact(a)) => {
                if a < c {
                    Valuation::Exact(a)
                } else {
                    Valuation::Saturated(c)
                }
            }
            (Valuation::Saturated(a), Valuation::Saturated(b)) => Valuation::Saturated(a.min(b)),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::Saturated(cap) => write!(f, ">={cap}"),
        }
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    base %= n;
    let mut acc: u64 = 1 % n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, n);
        }
        exp >>= 1;
        if exp > 0 {
            base = mul_mod_u64(base, base, n);
        }
    }
    acc
}

/// Legendre symbol `(d/p)` by Euler's criterion: `0` iff `p | d`, otherwise
/// `d^((p-1)/2) mod p` mapped from `{1, p-1}` to `{+1, -1}`. Negative and
/// out-of-range `d` are reduced modulo `p` first.
pub fn legendre_symbol(d: i64, p: u64) -> Result<i32, ModArithError> {
    if !is_odd_prime(p) {
        return Err(ModArithError::NotOddPrime(p));
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let e = pow_mod_u64(r, (p - 1) / 2, p);
    debug_assert!(e == 1 || e == p - 1);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Deterministic Miller-Rabin primality for `n < 2^64`, restricted to odd
/// primes: `2` reports `false`.
pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    // The twelve-prime witness set is deterministic below 2^64.
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n % w == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod_u64(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
