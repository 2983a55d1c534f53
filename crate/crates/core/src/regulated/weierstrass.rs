//! The Weierstrass series `W(t) = Σ_{n≥1} sin(7ⁿ π t) / 2ⁿ`.
//!
//! A naive `(7ⁿ π t).sin()` loses every significant digit once `7ⁿ t`
//! exceeds 2⁵³, which happens around n = 19. Each term is instead evaluated
//! from the exact residue of `7ⁿ t` modulo 2, obtained by integer arithmetic
//! on the binary expansion of `t`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use std::f64::consts::PI;

/// Number of terms needed so that the geometric tail `2⁻ᴺ` is at most `tolerance`.
pub fn terms_for_tolerance(tolerance: f64) -> u32 {
    assert!(tolerance > 0.0 && tolerance.is_finite(), "tolerance must be positive");
    if tolerance >= 1.0 {
        return 0;
    }
    (1.0 / tolerance).log2().ceil() as u32
}

/// Partial sum of the Weierstrass series with absolute error at most `tolerance`.
pub fn weierstrass(t: f64, tolerance: f64) -> f64 {
    partial_sum(t, terms_for_tolerance(tolerance))
}

/// `Σ_{n=1}^{terms} sin(7ⁿ π t) / 2ⁿ`, summed in increasing n.
pub fn partial_sum(t: f64, terms: u32) -> f64 {
    let mut total = 0.0;
    let mut weight = 1.0;
    for phase in phases(t, terms) {
        weight *= 0.5;
        total += weight * (PI * phase).sin();
    }
    total
}

/// `∫_a^b` of the partial sum with `terms` terms, integrated term by term.
pub fn partial_sum_integral(a: f64, b: f64, terms: u32) -> f64 {
    let mut total = 0.0;
    let mut scale = 1.0 / PI;
    for (pa, pb) in phases(a, terms).zip(phases(b, terms)) {
        scale /= 14.0;
        total += scale * ((PI * pa).cos() - (PI * pb).cos());
    }
    total
}

/// Iterator over `7ⁿ t mod 2` for n = 1..=terms.
fn phases(t: f64, terms: u32) -> impl Iterator<Item = f64> {
    let dyadic = Dyadic::from_f64(t);
    let mut power = 1u128;
    (1..=terms).map(move |n| {
        power = power.wrapping_mul(7);
        dyadic.times_power_of_seven_mod_two(n, power)
    })
}

/// `t = ±mantissa · 2^(-shift)` with an odd mantissa (or zero).
#[derive(Debug, Clone, Copy)]
struct Dyadic {
    mantissa: u64,
    shift: i32,
    negative: bool,
}

impl Dyadic {
    fn from_f64(t: f64) -> Self {
        let bits = t.abs().to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mut mantissa, mut exp) = if raw_exp == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), raw_exp - 1075)
        };
        if mantissa != 0 {
            let tz = mantissa.trailing_zeros();
            mantissa >>= tz;
            exp += tz as i32;
        }
        Dyadic {
            mantissa,
            shift: -exp,
            negative: t.is_sign_negative() && t != 0.0,
        }
    }

    /// `7ⁿ t mod 2` in `[0, 2)`; `power` is `7ⁿ mod 2¹²⁸`.
    fn times_power_of_seven_mod_two(&self, n: u32, power: u128) -> f64 {
        if self.mantissa == 0 {
            return 0.0;
        }
        let residue = if self.shift <= 0 {
            // t is an integer: 7ⁿ t ≡ t (mod 2) because 7ⁿ is odd.
            if self.shift == 0 {
                (self.mantissa & 1) as f64
            } else {
                0.0
            }
        } else if self.shift < 128 {
            let bits = self.shift as u32 + 1;
            let mask = if bits == 128 { u128::MAX } else { (1u128 << bits) - 1 };
            let r = power.wrapping_mul(self.mantissa as u128) & mask;
            r as f64 * 2f64.powi(-self.shift)
        } else {
            let bits = self.shift as u64 + 1;
            let product = BigUint::from(7u32).pow(n) * BigUint::from(self.mantissa);
            let mask = (BigUint::one() << bits) - BigUint::one();
            scaled_to_f64(product & mask, self.shift)
        };
        if self.negative && residue != 0.0 {
            2.0 - residue
        } else {
            residue
        }
    }
}

/// `value · 2^(-shift)` without intermediate overflow or underflow.
fn scaled_to_f64(value: BigUint, shift: i32) -> f64 {
    let bits = value.bits() as i32;
    let (value, shift) = if bits > 64 {
        let drop = bits - 64;
        (value >> drop as u64, shift - drop)
    } else {
        (value, shift)
    };
    let head = value.to_u64().unwrap_or(0) as f64;
    let half = shift / 2;
    head * 2f64.powi(-half) * 2f64.powi(-(shift - half))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_by_term_integral_matches_quadrature() {
        // Low order, so the partial sum is smooth enough for Simpson.
        let (a, b, terms) = (0.1, 0.35, 4);
        let n = 20_000;
        let h = (b - a) / n as f64;
        let simpson: f64 = (0..n)
            .map(|i| {
                let x = a + i as f64 * h;
                h / 6.0 * (partial_sum(x, terms) + 4.0 * partial_sum(x + 0.5 * h, terms) + partial_sum(x + h, terms))
            })
            .sum();
        assert!((partial_sum_integral(a, b, terms) - simpson).abs() < 1e-10);
        // Over a full period of every term the integral vanishes.
        assert!(partial_sum_integral(0.0, 2.0 / 7.0 * 7.0, 12).abs() < 1e-15);
    }

    fn naive(t: f64, terms: u32) -> f64 {
        (1..=terms)
            .map(|n| (7f64.powi(n as i32) * PI * t).sin() / 2f64.powi(n as i32))
            .sum()
    }

    #[test]
    fn truncation_depth() {
        assert_eq!(terms_for_tolerance(1e-12), 40);
        assert_eq!(terms_for_tolerance(0.25), 2);
        assert_eq!(terms_for_tolerance(2.0), 0);
    }

    #[test]
    fn zero_and_integers() {
        assert_eq!(weierstrass(0.0, 1e-12), 0.0);
        assert!(weierstrass(1.0, 1e-12).abs() < 1e-15);
    }

    #[test]
    fn dyadic_closed_forms() {
        // 7ⁿ/2 mod 2 alternates 3/2, 1/2, so W(1/2) = Σ (-1)ⁿ/2ⁿ = -1/3.
        assert!((partial_sum(0.5, 60) + 1.0 / 3.0).abs() < 1e-15);
        // 7ⁿ/4 mod 2 alternates 7/4, 1/4, so W(1/4) = -√2/6.
        assert!((partial_sum(0.25, 60) + 2f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_naive_sum_at_low_order() {
        for &t in &[0.1, 0.333, 0.71, 0.9999] {
            assert!((partial_sum(t, 8) - naive(t, 8)).abs() < 1e-11);
        }
    }

    #[test]
    fn tiny_arguments_take_the_bignum_path() {
        let t = 2f64.powi(-140) * 3.0;
        let exact = partial_sum(t, 10);
        // 7ⁿ t is far below 1 here, so the naive sum is accurate.
        assert!((exact - naive(t, 10)).abs() < 1e-50);
        assert!(exact > 0.0);
    }

    #[test]
    fn two_truncation_depths_agree_within_tail() {
        let a = weierstrass(0.37, 1e-12);
        let b = partial_sum(0.37, 52);
        assert!((a - b).abs() <= 1e-12);
        assert_eq!(a.to_bits(), weierstrass(0.37, 1e-12).to_bits());
    }
}
