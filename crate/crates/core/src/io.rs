//! Output helpers: deterministic summation and decimal rendering.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Pairwise summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Scientific notation with `digits` significant digits (truncated toward
/// zero), e.g. `3.75000e-1`.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    // exponent e with 10^e <= |r| < 10^(e+1)
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ten = BigInt::from(10);
    let scaled = |e: i64| -> (BigInt, BigInt) {
        if e >= 0 {
            (num.clone(), &den * ten.pow(e as u32))
        } else {
            (&num * ten.pow((-e) as u32), den.clone())
        }
    };
    loop {
        let (n, d) = scaled(e);
        if n < d {
            e -= 1;
        } else if n >= &d * &ten {
            e += 1;
        } else {
            break;
        }
    }
    let shift = digits as i64 - 1 - e;
    let mantissa = if shift >= 0 {
        (&num * ten.pow(shift as u32)) / &den
    } else {
        &num / (&den * ten.pow((-shift) as u32))
    };
    let s = mantissa.to_str_radix(10);
    let (head, tail) = s.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Shortest round-trip rendering of a float.
pub fn float_to_string(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:e}")
    }
}

pub fn sign_of(r: &BigRational) -> Sign {
    r.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        let r = BigRational::new(63.into(), 256.into());
        assert_eq!(rational_to_decimal(&r, 6), "2.46093e-1");
        let r = BigRational::new(1.into(), 3.into());
        assert_eq!(rational_to_decimal(&r, 30), format!("3.{}e-1", "3".repeat(29)));
        assert_eq!(rational_to_decimal(&BigRational::from_integer(1000.into()), 3), "1.00e3");
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
    }
}
