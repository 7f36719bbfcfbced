//! Asymptotic expansion of Z(lambda, nu):
//!
//!   Z = exp(nu*lambda^(1/nu)) / (lambda^((nu-1)/2nu) (2pi)^((nu-1)/2) sqrt(nu))
//!       * sum_k c_k (nu*lambda^(1/nu))^-k
//!
//! with the eight closed-form coefficients c_0..c_7, plus a numerical check
//! of the inverse-factorial expansion that defines them.

use crate::error::{Error, Result};
use crate::kernel::{compensated_sum, ln_gamma, KahanSum, LogValue};
use crate::params::CmpParams;

/// Exact rational coefficient c_j as a polynomial in y = nu^2:
/// c_j = (y - 1) * P_j(y) / den for j >= 1, with P_j ascending in y.
/// Every integer fits in i64 and every polynomial value at moderate nu is
/// exactly representable, so the only rounding is the final division.
struct CoeffPolynomial {
    numerator_coeffs: &'static [i64],
    denominator: i64,
}

const COEFFS: [CoeffPolynomial; 8] = [
    CoeffPolynomial {
        numerator_coeffs: &[1],
        denominator: 1,
    },
    CoeffPolynomial {
        numerator_coeffs: &[1],
        denominator: 24,
    },
    CoeffPolynomial {
        numerator_coeffs: &[23, 1],
        denominator: 1152,
    },
    CoeffPolynomial {
        numerator_coeffs: &[11237, -298, 5],
        denominator: 414_720,
    },
    CoeffPolynomial {
        numerator_coeffs: &[2_482_411, -241_041, -1887, 5],
        denominator: 39_813_120,
    },
    CoeffPolynomial {
        numerator_coeffs: &[1_363_929_895, -220_083_004, 1_451_274, -7420, 7],
        denominator: 6_688_604_160,
    },
    CoeffPolynomial {
        numerator_coeffs: &[
            4_175_309_343_349,
            -915_974_552_561,
            25_171_388_146,
            76_299_326,
            -78_295,
            35,
        ],
        denominator: 4_815_794_995_200,
    },
    CoeffPolynomial {
        numerator_coeffs: &[
            525_035_501_918_789,
            -142_838_662_997_982,
            7_134_232_164_555,
            -19_956_117_988,
            45_700_491,
            -20_190,
            5,
        ],
        denominator: 115_579_079_884_800,
    },
];

/// The expansion coefficient c_j evaluated at nu. j <= 7.
pub fn coeff(j: usize, nu: f64) -> Result<f64> {
    if j >= COEFFS.len() {
        return Err(Error::IndexOutOfRange(format!(
            "coefficients are defined for j <= 7, got {j}"
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::Domain(format!(
            "coefficients require nu > 0, got {nu}"
        )));
    }
    if j == 0 {
        return Ok(1.0);
    }
    let y = nu * nu;
    let c = &COEFFS[j];
    let mut p = 0.0f64;
    for &a in c.numerator_coeffs.iter().rev() {
        p = p.mul_add(y, a as f64);
    }
    Ok((y - 1.0) * p / c.denominator as f64)
}

/// One truncated evaluation of the expansion.
#[derive(Debug, Clone)]
pub struct AsymEval {
    /// The approximation of Z, in log domain; zero when the truncated series
    /// sum is not positive (small-x divergence regime).
    pub value: LogValue,
    /// Summands c_k * x^-k for k = 0..order; terms[0] == 1.
    pub terms: Vec<f64>,
    /// Number of terms retained.
    pub order_used: u32,
    /// Log of the prefactor exp(x) / (lambda^((nu-1)/2nu) (2pi)^((nu-1)/2) sqrt(nu)).
    pub prefactor_log: f64,
}

impl AsymEval {
    /// Compensated sum of the retained terms; may be <= 0 when the series
    /// misbehaves (x small relative to the coefficient growth).
    pub fn series_sum(&self) -> f64 {
        compensated_sum(&self.terms)
    }
}

fn check_order(order: u32) -> Result<()> {
    if !(1..=8).contains(&order) {
        return Err(Error::IndexOutOfRange(format!(
            "order must lie in 1..=8, got {order}"
        )));
    }
    Ok(())
}

/// Truncated expansion with `order` terms (order = 1 keeps only the
/// classical leading term).
pub fn z_asymptotic(params: CmpParams, order: u32) -> Result<AsymEval> {
    check_order(order)?;
    let lambda = params.lambda();
    let nu = params.nu();
    if !(nu > 0.0) {
        return Err(Error::Domain(
            "the expansion requires nu > 0".to_string(),
        ));
    }
    let root = lambda.powf(1.0 / nu);
    let x = nu * root;
    if !x.is_finite() {
        return Err(Error::Overflow(format!(
            "nu*lambda^(1/nu) overflows for lambda={lambda}, nu={nu}"
        )));
    }
    let prefactor_log = x
        - (nu - 1.0) / (2.0 * nu) * lambda.ln()
        - (nu - 1.0) / 2.0 * (2.0 * std::f64::consts::PI).ln()
        - 0.5 * nu.ln();

    let mut terms = Vec::with_capacity(order as usize);
    for k in 0..order as usize {
        terms.push(coeff(k, nu)? * x.powi(-(k as i32)));
    }
    let sum = compensated_sum(&terms);
    let value = if sum > 0.0 {
        LogValue::from_log(prefactor_log + sum.ln())
    } else {
        LogValue::ZERO
    };
    Ok(AsymEval {
        value,
        terms,
        order_used: order,
        prefactor_log,
    })
}

/// Signed percentage error 100*(z_asymptotic - z_exact)/z_exact, negative
/// when the approximation undershoots. Stable down to ~1e-14 percent via
/// expm1 on the log difference; still well-defined (below -100%) when the
/// truncated series sum goes non-positive.
pub fn percent_error(params: CmpParams, order: u32, rel_tol: f64) -> Result<f64> {
    let eval = z_asymptotic(params, order)?;
    let (exact, _) = crate::exact::z_exact(params, rel_tol)?;
    let s = eval.series_sum();
    if s > 0.0 {
        let dlog = eval.prefactor_log + s.ln() - exact.log();
        Ok(100.0 * dlog.exp_m1())
    } else if s == 0.0 {
        Ok(-100.0)
    } else {
        // approximation is negative: (A - E)/E = -|A|/E - 1
        let dlog = eval.prefactor_log + (-s).ln() - exact.log();
        Ok(-100.0 - 100.0 * dlog.exp())
    }
}

/// Relative residual of the J-term inverse-factorial expansion
///
///   (Gamma(t+1))^-nu ~= nu^(nu(t+1/2)) / (2pi)^((nu-1)/2)
///                       * sum_{j<J} c_j / Gamma(nu*t + (1+nu)/2 + j)
///
/// evaluated fully in log domain.
pub fn verify_inverse_factorial(nu: f64, t: f64, j_terms: u32) -> Result<f64> {
    if !(nu > 0.0) || !(t > 0.0) {
        return Err(Error::Domain(format!(
            "verify_inverse_factorial requires nu > 0 and t > 0, got nu={nu}, t={t}"
        )));
    }
    check_order(j_terms)?;
    let lhs_log = -nu * ln_gamma(t + 1.0)?;

    // signed log-domain sum: scale by the largest term magnitude
    let mut logs = Vec::with_capacity(j_terms as usize);
    let mut signs = Vec::with_capacity(j_terms as usize);
    let mut shift = f64::NEG_INFINITY;
    for j in 0..j_terms as usize {
        let c = coeff(j, nu)?;
        let arg = nu * t + (1.0 + nu) / 2.0 + j as f64;
        let lg = ln_gamma(arg)?;
        if !lg.is_finite() {
            return Err(Error::Overflow(format!("lnGamma({arg}) is not finite")));
        }
        if c == 0.0 {
            logs.push(f64::NEG_INFINITY);
            signs.push(1.0);
            continue;
        }
        let l = c.abs().ln() - lg;
        shift = shift.max(l);
        logs.push(l);
        signs.push(c.signum());
    }
    let mut sum = KahanSum::new();
    for (l, s) in logs.iter().zip(&signs) {
        sum.add(s * (l - shift).exp());
    }
    let rhs_log = nu * (t + 0.5) * nu.ln()
        - (nu - 1.0) / 2.0 * (2.0 * std::f64::consts::PI).ln()
        + shift
        + sum.value().ln();
    Ok((rhs_log - lhs_log).exp_m1().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(l: f64, n: f64) -> CmpParams {
        CmpParams::new(l, n).unwrap()
    }

    #[test]
    fn coeff_hand_values() {
        assert_eq!(coeff(1, 3.0).unwrap(), 1.0 / 3.0);
        assert_eq!(coeff(2, 2.0).unwrap(), 0.0703125); // 81/1152
        for j in 1..8 {
            assert_eq!(coeff(j, 1.0).unwrap(), 0.0, "c_{j}(1)");
        }
        assert_eq!(coeff(0, 0.3).unwrap(), 1.0);
        assert!(coeff(8, 1.0).is_err());
        assert!(coeff(1, 0.0).is_err());
    }

    #[test]
    fn poisson_case_is_exact_at_all_orders() {
        for &lambda in &[0.3, 1.0, 4.2, 17.0] {
            for order in 1..=8 {
                let e = z_asymptotic(params(lambda, 1.0), order).unwrap();
                assert!(
                    (e.value.log() - lambda).abs() < 1e-12 * lambda.max(1.0),
                    "lambda={lambda} order={order}"
                );
                assert_eq!(e.terms[0], 1.0);
                for t in &e.terms[1..] {
                    assert_eq!(*t, 0.0);
                }
            }
        }
    }

    #[test]
    fn aeval_invariants() {
        let e = z_asymptotic(params(10.0, 3.0), 5).unwrap();
        assert_eq!(e.order_used, 5);
        assert_eq!(e.terms.len(), 5);
        assert_eq!(e.terms[0], 1.0);
        let s = e.series_sum();
        assert!(s > 0.0);
        assert!((e.value.log() - (e.prefactor_log + s.ln())).abs() < 1e-12);
    }

    #[test]
    fn order8_headline() {
        // relative error 1.59e-13 at (1.9, 0.1); allow double-rounding noise
        let pe = percent_error(params(1.9, 0.1), 8, 1e-13).unwrap();
        let rel = (pe / 100.0).abs();
        assert!(
            (0.5e-13..=5e-13).contains(&rel),
            "order-8 relative error {rel:e}"
        );
    }

    #[test]
    fn table_spot_values() {
        // printed table cells, half a unit in the last digit
        let pe = percent_error(params(10.0, 3.0), 3, 1e-13).unwrap();
        assert!((pe - -0.039).abs() < 0.0005, "{pe}");
        let pe = percent_error(params(1.9, 1.9), 1, 1e-13).unwrap();
        assert!((pe - -5.30).abs() < 0.005, "{pe}");
        let pe = percent_error(params(1.9, 1.9), 3, 1e-13).unwrap();
        assert!((pe - -0.633).abs() < 0.0005, "{pe}");
        let pe = percent_error(params(3.0, 5.0), 3, 1e-13).unwrap();
        assert!((pe - 2.48).abs() < 0.005, "{pe}");
    }

    #[test]
    fn order8_tracks_eighth_power() {
        // With all eight polynomials correct, the truncation error behaves
        // like |c_8| * x^-8; measured |c_8| stays below ~95 over these nu, so
        // 150*x^-8 certifies the order (any wrong integer inflates the error
        // by orders of magnitude, not a small constant).
        for &nu in &[0.5, 1.5, 2.0, 3.0] {
            for &a in &[5.0, 10.0, 20.0] {
                let lambda = a_pow(a, nu);
                let x = nu * a;
                let pe = percent_error(params(lambda, nu), 8, 1e-13).unwrap();
                let rel = (pe / 100.0).abs();
                let bound = 150.0 * x.powi(-8);
                assert!(
                    rel <= bound.max(1e-13),
                    "nu={nu} a={a}: rel {rel:e} vs bound {bound:e}"
                );
            }
        }
    }

    fn a_pow(a: f64, nu: f64) -> f64 {
        a.powf(nu)
    }

    #[test]
    fn error_decreases_along_lambda() {
        // |percent_error| eventually decreases along a geometric lambda grid
        for &nu in &[0.5, 1.2, 2.0] {
            for order in [1u32, 2, 3] {
                let mut prev = f64::INFINITY;
                for i in 0..6 {
                    let lambda = 4.0 * 2f64.powi(i);
                    let pe = percent_error(params(lambda, nu), order, 1e-13)
                        .unwrap()
                        .abs();
                    assert!(pe < prev, "nu={nu} order={order} lambda={lambda}");
                    prev = pe;
                }
            }
        }
    }

    #[test]
    fn inverse_factorial_examples() {
        // exact identity at nu = 1
        let r = verify_inverse_factorial(1.0, 10.0, 1).unwrap();
        assert!(r <= 1e-12, "{r:e}");
        // monotone improvement in t; at J=4 the residuals (~(nu t)^-4) sit
        // far above the ~1e-13 noise from rounding the large log-gammas, so
        // the ordering is actually resolvable in double precision
        let r50 = verify_inverse_factorial(2.0, 50.0, 4).unwrap();
        let r25 = verify_inverse_factorial(2.0, 25.0, 4).unwrap();
        assert!(r50 < r25, "{r50:e} !< {r25:e}");
        // golden residual from an arbitrary-precision evaluation of both sides
        let r = verify_inverse_factorial(0.5, 100.0, 4).unwrap();
        let golden = 6.521_174_991e-9;
        assert!(((r - golden) / golden).abs() < 1e-4, "{r:e}");
    }

    #[test]
    fn inverse_factorial_rejects_bad_input() {
        assert!(verify_inverse_factorial(0.0, 10.0, 2).is_err());
        assert!(verify_inverse_factorial(1.0, -3.0, 2).is_err());
        assert!(verify_inverse_factorial(1.0, 10.0, 0).is_err());
        assert!(verify_inverse_factorial(1.0, 10.0, 9).is_err());
    }

    #[test]
    fn z_asymptotic_rejects_bad_order() {
        assert!(z_asymptotic(params(1.0, 1.0), 0).is_err());
        assert!(z_asymptotic(params(1.0, 1.0), 9).is_err());
    }

    #[test]
    fn geometric_params_are_rejected() {
        let p = CmpParams::new(0.5, 0.0).unwrap();
        assert!(z_asymptotic(p, 1).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        // lambda^(1/nu) = 100^500 overflows f64
        let p = CmpParams::new(100.0, 0.002).unwrap();
        match z_asymptotic(p, 1) {
            Err(Error::Overflow(_)) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn c2_minus_half_c1_squared(nu in 0.01f64..12.0) {
            // c2 - c1^2/2 = (nu^2 - 1)/48
            let c1 = coeff(1, nu).unwrap();
            let c2 = coeff(2, nu).unwrap();
            let lhs = c2 - c1 * c1 / 2.0;
            let rhs = (nu * nu - 1.0) / 48.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn nu_one_all_orders(lambda in 0.1f64..30.0, order in 1u32..=8) {
            let e = z_asymptotic(params(lambda, 1.0), order).unwrap();
            prop_assert!((e.value.log() - lambda).abs() < 1e-12 * lambda.max(1.0));
        }
    }
}
