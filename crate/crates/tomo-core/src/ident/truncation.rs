use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{ensure_domain, Result};

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Upper bound on the fraction of pairs the α-truncated search misses, with
/// `ζ(i,j) = C(n,i)·(C(n,j) − 1)`:
///
/// `Σ_{i≤δ} Σ_{j>λ} ζ / (Σ_{i≤δ} Σ_{i≤j≤δ} ζ + Σ_{i≤δ} Σ_{δ≤j≤n} ζ)`.
///
/// The two denominator sums share the column `j = δ`; it is counted twice.
pub fn error_fraction_bound(n: usize, delta: usize, lambda: usize) -> Result<BigRational> {
    ensure_domain!(
        1 <= delta && delta <= lambda && lambda <= n,
        "need 1 <= delta <= lambda <= n, got delta={delta} lambda={lambda} n={n}"
    );
    let row: Vec<BigInt> = (0..=n).map(|i| binomial(n, i)).collect();
    let zeta = |i: usize, j: usize| &row[i] * (&row[j] - BigInt::one());
    let mut num = BigInt::zero();
    let mut den = BigInt::zero();
    for i in 1..=delta {
        for j in lambda + 1..=n {
            num += zeta(i, j);
        }
        for j in i..=delta {
            den += zeta(i, j);
        }
        for j in delta..=n {
            den += zeta(i, j);
        }
    }
    ensure_domain!(!den.is_zero(), "error fraction undefined for n={n}");
    Ok(BigRational::new(num, den))
}
