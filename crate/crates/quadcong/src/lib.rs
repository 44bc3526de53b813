//! Arithmetic in quadratic extensions of prime-power residue rings.
//!
//! The crate is organized in four layers:
//!
//! * [`modarith`] is the base ring `Z/p^k Z`: residues, modular
//!   exponentiation and inversion, Legendre symbols, p-adic valuations, and
//!   64-bit primality.
//! * [`quadring`] is the formal quadratic extension `(Z/p^k Z)[T]/(T^2 - d)`:
//!   elements `a + bT`, conjugation, norms, inversion of unit-norm elements,
//!   componentwise valuations.
//! * [`polyops`] is dense univariate polynomials over the extension:
//!   schoolbook and Karatsuba products, balanced many-factor products,
//!   exact division, evaluation, and the binomial shortcut for
//!   `(x - c)^(p-1)` over `Z/p`.
//! * [`theorems`] is the congruence checks built on top: product polynomials
//!   of unit pairs and their closed forms, harmonic-type sums with valuation
//!   reports, power-sum tables, and the symmetric-octet identities.

pub mod modarith;
pub mod polyops;
pub mod quadring;
pub mod theorems;

pub use modarith::{is_odd_prime, legendre_symbol, ModArithError, PrimePowerModulus, Residue, Valuation};
pub use polyops::{balanced_product, product_of_linear_factors, shifted_power_pm1, DensePoly, PolyError};
pub use quadring::{QuadCtx, QuadElem, QuadError, ValuationResult};
pub use theorems::{
    closed_form_theorem11, compute_p, default_target_exponent, eval_f, index_set_difference_valuation,
    intermediate_products_check, lemma_suite, power_sum, proof_identity_check, sqrt_mod_p,
    symmetric_inverse_sum, unit_pairs, verify_point, verify_theorem11, verify_theorem12,
    wolstenholme_sum, wolstenholme_sum_restricted, Method, ProofIdentityCheck, Theorem11Check, UnitPairSet,
    VerificationRecord, VerifyError,
};
