use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact decimal expansion of `r`, or `None` if it does not terminate.
pub fn exact_decimal(r: &BigRational) -> Option<String> {
    let mut den = r.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives) as usize;
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (r.numer().abs() * &scale) / r.denom();
    let digits = scaled.to_str_radix(10);
    let sign = if r.numer().sign() == Sign::Minus {
        "-"
    } else {
        ""
    };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{int}.{frac}"))
}

/// Write a percentage as `c*(25/2^k)` with the smallest `k >= 0`.
pub fn quarter_power_form(percent: &BigRational) -> Option<String> {
    if percent.is_negative() {
        return None;
    }
    let mut q = percent / BigRational::from_integer(25.into());
    let two = BigRational::from_integer(2.into());
    // Any dyadic value resolves within the bit length of its denominator.
    let limit = percent.denom().bits() + 8;
    for k in 0..=limit {
        if q.is_integer() {
            return Some(format!("{}*(25/2^{k})", q.numer()));
        }
        q *= &two;
    }
    None
}
