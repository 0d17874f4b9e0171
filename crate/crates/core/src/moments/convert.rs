//! Exact change of basis between power and Chebyshev moments.
//!
//! The shifted Chebyshev polynomials T*_k(x) = T_k(2x − 1) have integer
//! monomial coefficients that grow like (3 + 2√2)^k, so the conversion is
//! hopeless in floating point beyond order ~15. Both directions are
//! therefore carried out in exact big-rational arithmetic (f64 inputs are
//! rationals) with a single rounding at the end, which keeps round trips at
//! the accuracy of the final rounding for any order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::moments::{Basis, MomentVector};

/// Monomial coefficient rows of T*_0 .. T*_m (lower triangular).
fn shifted_chebyshev_coefficients(m: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m + 1);
    rows.push(vec![BigInt::from(1)]);
    if m >= 1 {
        rows.push(vec![BigInt::from(-1), BigInt::from(2)]);
    }
    for k in 2..=m {
        // T*_{k} = (4x − 2) T*_{k−1} − T*_{k−2}
        let mut next = vec![BigInt::zero(); k + 1];
        for (j, c) in rows[k - 1].iter().enumerate() {
            next[j + 1] += 4 * c;
            next[j] -= 2 * c;
        }
        for (j, c) in rows[k - 2].iter().enumerate() {
            next[j] -= c;
        }
        rows.push(next);
    }
    rows
}

fn to_rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::arg(format!("non-finite moment value {v}")))
}

/// Round an exact rational to the nearest f64, robust to very large
/// numerators and denominators.
fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let (numer, denom) = (r.numer().abs(), r.denom().clone());
    // Shift so the integer quotient keeps ~80 significant bits.
    let shift = 80i64 + denom.bits() as i64 - numer.bits() as i64;
    let q = if shift >= 0 {
        (numer << shift as u64) / denom
    } else {
        numer / (denom << (-shift) as u64)
    };
    let mut value = q.to_f64().unwrap_or(f64::INFINITY);
    // Apply 2^(-shift) in chunks to survive exponents beyond f64 range.
    let mut e = -shift;
    while e != 0 {
        let step = e.clamp(-900, 900);
        value *= (step as f64).exp2();
        e -= step;
    }
    if negative {
        -value
    } else {
        value
    }
}

/// Convert a moment vector between the power and Chebyshev bases.
///
/// The map is the exact linear change of basis on [0, 1]; a round trip
/// returns the input to within one rounding per entry.
pub fn convert_basis(mv: &MomentVector, target: Basis) -> Result<MomentVector> {
    if mv.basis == target {
        return Err(Error::arg(
            "source and target basis must differ in convert_basis",
        ));
    }
    let m = mv.m;
    let rows = shifted_chebyshev_coefficients(m);
    let input: Vec<BigRational> = mv
        .values
        .iter()
        .map(|&v| to_rational(v))
        .collect::<Result<_>>()?;

    let out_exact: Vec<BigRational> = match target {
        // ν_k = E[T*_k] = Σ_j A_{kj} μ_j
        Basis::Chebyshev => rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| BigRational::from(c.clone()) * &input[j])
                    .sum()
            })
            .collect(),
        // Solve A μ = ν by forward substitution (A is lower triangular).
        Basis::Power => {
            let mut mu: Vec<BigRational> = Vec::with_capacity(m + 1);
            for k in 0..=m {
                let mut rhs = input[k].clone();
                for j in 0..k {
                    rhs -= BigRational::from(rows[k][j].clone()) * &mu[j];
                }
                mu.push(rhs / BigRational::from(rows[k][k].clone()));
            }
            mu
        }
    };

    let values: Vec<f64> = out_exact.iter().map(rational_to_f64).collect();
    MomentVector::new(target, mv.n, mv.d, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments_of_spectrum;

    fn mv(basis: Basis, values: Vec<f64>) -> MomentVector {
        MomentVector::new(basis, 100, 0, values).unwrap()
    }

    #[test]
    fn k2_power_to_chebyshev() {
        // Two-point spectrum at the domain endpoints {0, 1}:
        // E[T*_k] = (T_k(-1) + T_k(1)) / 2 = 1 for even k, 0 for odd k.
        let power = mv(Basis::Power, vec![1.0, 0.5, 0.5]);
        let cheb = convert_basis(&power, Basis::Chebyshev).unwrap();
        assert_eq!(cheb.values, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn uniform_first_chebyshev_moment_vanishes() {
        let power = mv(Basis::Power, vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
        let cheb = convert_basis(&power, Basis::Chebyshev).unwrap();
        assert!(cheb.values[1].abs() < 1e-15);
    }

    #[test]
    fn round_trip_on_genuine_moments() {
        // Moments of a random atomic measure are genuine, so Chebyshev
        // values stay bounded and the round trip is tight.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let atoms: Vec<(f64, f64)> = (0..8)
                .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            let m = 20;
            let mut values = vec![0.0; m + 1];
            for (x, w) in &atoms {
                let mut p = 1.0;
                for v in values.iter_mut() {
                    *v += w / total * p;
                    p *= x;
                }
            }
            values[0] = 1.0;
            let power = mv(Basis::Power, values.clone());
            let cheb = convert_basis(&power, Basis::Chebyshev).unwrap();
            assert!(cheb.values.iter().all(|v| v.abs() <= 1.0 + 1e-12));
            let back = convert_basis(&cheb, Basis::Power).unwrap();
            for (a, b) in values.iter().zip(&back.values) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn round_trip_survives_order_30() {
        let eigs: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let values = moments_of_spectrum(&eigs, 30, Basis::Power);
        let power = mv(Basis::Power, values.clone());
        let there = convert_basis(&power, Basis::Chebyshev).unwrap();
        let back = convert_basis(&there, Basis::Power).unwrap();
        for (a, b) in values.iter().zip(&back.values) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn forward_conversion_matches_direct_chebyshev_moments() {
        // Input rounding is amplified by the T*_k coefficient growth, so
        // agreement with directly computed Chebyshev moments is only
        // meaningful at moderate order.
        let eigs: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let values = moments_of_spectrum(&eigs, 12, Basis::Power);
        let power = mv(Basis::Power, values);
        let there = convert_basis(&power, Basis::Chebyshev).unwrap();
        let direct = moments_of_spectrum(&eigs, 12, Basis::Chebyshev);
        for (a, b) in there.values.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn same_basis_is_rejected() {
        let power = mv(Basis::Power, vec![1.0, 0.5]);
        assert!(convert_basis(&power, Basis::Power).is_err());
    }
}
