//! Small numerical helpers shared by the coupling and operator code.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

/// Neumaier-compensated sum, accumulated strictly in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Compensated complex sum (componentwise), in iteration order.
pub fn compensated_sum_c<I: IntoIterator<Item = C64>>(terms: I) -> C64 {
    let (re, im): (Vec<f64>, Vec<f64>) = terms.into_iter().map(|z| (z.re, z.im)).unzip();
    C64::new(compensated_sum(re), compensated_sum(im))
}

/// `cos(2π·num/den)` with the argument reduced to `[0, π]` first, so that
/// angles with the same reduced fraction give bitwise-identical values and the
/// quarter/sixth points are exact.
pub fn cos_frac(num: i64, den: usize) -> f64 {
    let den_i = den as i64;
    let r = num.rem_euclid(den_i);
    let r = r.min(den_i - r) as usize;
    if r == 0 {
        1.0
    } else if 2 * r == den {
        -1.0
    } else if 4 * r == den {
        0.0
    } else if 3 * r == den {
        -0.5
    } else if 6 * r == den {
        0.5
    } else {
        (TAU * r as f64 / den as f64).cos()
    }
}

/// `sin(2π·num/den)`, reduced like [`cos_frac`].
pub fn sin_frac(num: i64, den: usize) -> f64 {
    // sin(x) = cos(x − π/2) = cos(2π·(4·num − den)/(4·den))
    cos_frac(4 * num - den as i64, 4 * den)
}

/// `exp(−i·2π·num/den)`.
pub fn phase_factor(num: i64, den: usize) -> C64 {
    C64::new(cos_frac(num, den), -sin_frac(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn exact_special_angles() {
        assert_eq!(cos_frac(1, 4), 0.0);
        assert_eq!(cos_frac(3, 4), 0.0);
        assert_eq!(cos_frac(2, 4), -1.0);
        assert_eq!(cos_frac(1, 3), -0.5);
        assert_eq!(cos_frac(2, 3), -0.5);
        assert_eq!(cos_frac(3, 3), 1.0);
        assert_eq!(cos_frac(-1, 6), 0.5);
        assert_eq!(sin_frac(1, 4), 1.0);
        assert_eq!(sin_frac(3, 4), -1.0);
        assert_eq!(sin_frac(2, 4), 0.0);
    }

    #[test]
    fn matches_libm_elsewhere() {
        for den in 2..40usize {
            for num in -50..50i64 {
                let x = TAU * num.rem_euclid(den as i64) as f64 / den as f64;
                assert!((cos_frac(num, den) - x.cos()).abs() < 1e-14);
                assert!((sin_frac(num, den) - x.sin()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reflected_angles_bitwise_equal() {
        for den in 2..30usize {
            for r in 0..den as i64 {
                assert_eq!(cos_frac(r, den), cos_frac(den as i64 - r, den));
                assert_eq!(cos_frac(r, den), cos_frac(r + 3 * den as i64, den));
            }
        }
    }
}
