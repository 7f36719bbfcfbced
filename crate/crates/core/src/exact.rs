//! Exact evaluation of Z(lambda, nu), the pmf and raw moments by adaptive
//! truncation of the defining series sum_j lambda^j / (j!)^nu, with a
//! certified geometric tail bound.

use crate::error::{Error, Result};
use crate::kernel::{dd_ln, ln_factorial_dd, ln_gamma, KahanSum, LogValue};
use crate::moments::{CumulantSet, Provenance};
use crate::params::CmpParams;

/// Hard cap on series terms. Tiny nu with large lambda puts the peak index
/// lambda^(1/nu) astronomically far out; failing loudly beats silently wrong.
pub const DEFAULT_TERM_CAP: usize = 10_000_000;

/// Diagnostics from one adaptive truncation run.
#[derive(Debug, Clone, Copy)]
pub struct TruncationReport {
    /// Number of series terms actually summed.
    pub terms_used: usize,
    /// Natural log of the certified remainder (absolute, linear scale).
    pub tail_bound_log: f64,
    /// Index of the largest term, near lambda^(1/nu).
    pub peak_index: usize,
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol <= 0.1) {
        return Err(Error::InvalidParameters(format!(
            "rel_tol must lie in (0, 0.1], got {rel_tol}"
        )));
    }
    Ok(())
}

/// Index of the largest term of lambda^j (j!)^-nu * j^weight, found by the
/// ratio test. Errors when it exceeds the term cap.
fn peak_index(lambda: f64, nu: f64, weight: u32, cap: usize) -> Result<usize> {
    // t_{j+1}/t_j = lambda/(j+1)^nu * ((j+1)/j)^weight
    let ratio_ge_one = |j: usize| -> bool {
        let jn = (j + 1) as f64;
        let mut lr = lambda.ln() - nu * jn.ln();
        if weight > 0 {
            if j == 0 {
                return true; // t_0 = 0 for weighted sums
            }
            lr += weight as f64 * (jn / j as f64).ln();
        }
        lr >= 0.0
    };
    // coarse start from the unweighted peak
    let guess = lambda.powf(1.0 / nu);
    if !guess.is_finite() || guess > cap as f64 {
        return Err(Error::ResourceLimit { cap });
    }
    let mut p = guess.floor().max(0.0) as usize;
    while p > 0 && !ratio_ge_one(p - 1) {
        p -= 1;
    }
    while ratio_ge_one(p) {
        p += 1;
        if p > cap {
            return Err(Error::ResourceLimit { cap });
        }
    }
    Ok(p)
}

/// Core summation: S = sum_j lambda^j (j!)^-nu j^weight for nu > 0, summed on
/// linear-scaled terms (every addend divided by the peak term, so all lie in
/// [0, 1] and compensated summation keeps the certified error at n*eps).
fn sum_weighted(
    params: CmpParams,
    weight: u32,
    rel_tol: f64,
    cap: usize,
) -> Result<(LogValue, TruncationReport)> {
    let lambda = params.lambda();
    let nu = params.nu();
    debug_assert!(nu > 0.0);

    let p = peak_index(lambda, nu, weight, cap)?;
    let w = weight as f64;

    let mut sum = KahanSum::new();
    sum.add(1.0); // the peak term, scaled to exactly 1
    let mut terms_used = 1usize;

    // downward from the peak; terms fall off at least geometrically
    let mut t = 1.0f64;
    let mut j = p;
    while j > 0 {
        // t_{j-1} = t_j * j^nu / lambda * ((j-1)/j)^weight
        let mut r = (j as f64).powf(nu) / lambda;
        if weight > 0 {
            if j == 1 {
                break; // t_0 carries weight 0^n = 0
            }
            r *= ((j - 1) as f64 / j as f64).powi(weight as i32);
        }
        t *= r;
        if t < 1e-19 {
            break;
        }
        sum.add(t);
        terms_used += 1;
        j -= 1;
    }

    // upward past the peak until the geometric tail bound certifies far
    // below the requested tolerance (the certificate is rel_tol/2; we keep
    // summing further so the actual truncation error is negligible)
    let mut t = 1.0f64;
    let mut j = p;
    let mut tail_bound;
    loop {
        let mut r = lambda / ((j + 1) as f64).powf(nu);
        if weight > 0 && j > 0 {
            r *= ((j + 1) as f64 / j as f64).powi(weight as i32);
        } else if weight > 0 {
            r = lambda; // from t_0 = 0 the loop starts at the peak anyway
        }
        t *= r;
        j += 1;
        sum.add(t);
        terms_used += 1;
        if terms_used > cap {
            return Err(Error::ResourceLimit { cap });
        }
        if j > p {
            let r_next = {
                let mut rn = lambda / ((j + 1) as f64).powf(nu);
                if weight > 0 {
                    rn *= ((j + 1) as f64 / j as f64).powi(weight as i32);
                }
                rn
            };
            if r_next < 1.0 {
                tail_bound = t * r_next / (1.0 - r_next);
                let s = sum.value();
                if tail_bound <= s * (rel_tol * 1e-3).min(1e-16) || t == 0.0 {
                    break;
                }
            }
        }
    }

    // log of the peak term, in double-double: p*ln(lambda) - nu*lnGamma(p+1)
    // (+ weight*ln(p)). Plain f64 products here round at ~3e-14 absolute,
    // which alone would consume the 1e-13 error budget.
    let ln_lambda = dd_ln(lambda);
    let mut log_peak = ln_lambda
        .mul_f64(p as f64)
        .sub(ln_factorial_dd(p as u64).mul_f64(nu));
    if weight > 0 && p > 0 {
        log_peak = log_peak.add(dd_ln(p as f64).mul_f64(w));
    }

    let s = sum.value_dd();
    let log_sum = s.hi.ln() + s.lo / s.hi;
    let log_total = log_peak.add_f64(log_sum).to_f64();

    let report = TruncationReport {
        terms_used,
        tail_bound_log: tail_bound.ln() + log_peak.to_f64(),
        peak_index: p,
    };
    Ok((LogValue::from_log(log_total), report))
}

/// Z(lambda, nu) with a certified relative error of rel_tol + n*eps.
pub fn z_exact(params: CmpParams, rel_tol: f64) -> Result<(LogValue, TruncationReport)> {
    z_exact_capped(params, rel_tol, DEFAULT_TERM_CAP)
}

/// As [`z_exact`] with an explicit term cap.
pub fn z_exact_capped(
    params: CmpParams,
    rel_tol: f64,
    cap: usize,
) -> Result<(LogValue, TruncationReport)> {
    check_rel_tol(rel_tol)?;
    if params.is_geometric() {
        // Z(lambda, 0) = 1/(1-lambda), exact closed form; the series
        // converges but slowly near lambda -> 1.
        let z = LogValue::from_log(-(-params.lambda()).ln_1p());
        let report = TruncationReport {
            terms_used: 0,
            tail_bound_log: f64::NEG_INFINITY,
            peak_index: 0,
        };
        return Ok((z, report));
    }
    sum_weighted(params, 0, rel_tol, cap)
}

/// log P(X = j) = j ln(lambda) - nu lnGamma(j+1) - ln Z.
pub fn log_pmf(params: CmpParams, j: u64, rel_tol: f64) -> Result<f64> {
    let (z, _) = z_exact(params, rel_tol)?;
    let lg = if params.nu() == 0.0 {
        0.0
    } else {
        ln_gamma(j as f64 + 1.0)?
    };
    Ok(j as f64 * params.lambda().ln() - params.nu() * lg - z.log())
}

/// Raw moment E[X^n] = sum_j j^n pmf(j), tail-certified. n <= 10.
pub fn raw_moment_exact(params: CmpParams, n: u32, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    if n > 10 {
        return Err(Error::IndexOutOfRange(format!(
            "raw moments are supported up to n=10, got {n}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if params.is_geometric() {
        // sum the geometric series directly; ratio lambda < 1
        let lambda = params.lambda();
        let mut sum = KahanSum::new();
        let mut t = 1.0 - lambda; // pmf(0), weight 0
        let mut j = 1u64;
        loop {
            t *= lambda;
            sum.add(t * (j as f64).powi(n as i32));
            let tail = t * (j as f64 + 1.0).powi(n as i32) * lambda / (1.0 - lambda) * 2.0;
            if tail < sum.value() * (rel_tol * 1e-3).min(1e-16) {
                break;
            }
            j += 1;
            if j as usize > DEFAULT_TERM_CAP {
                return Err(Error::ResourceLimit {
                    cap: DEFAULT_TERM_CAP,
                });
            }
        }
        return Ok(sum.value());
    }
    let (num, _) = sum_weighted(params, n, rel_tol, DEFAULT_TERM_CAP)?;
    let (den, _) = sum_weighted(params, 0, rel_tol, DEFAULT_TERM_CAP)?;
    Ok((num.log() - den.log()).exp())
}

/// Exact cumulants kappa_1..kappa_n_max from exact raw moments via the
/// moment-cumulant recursion
/// kappa_n = mu'_n - sum_{k=1}^{n-1} C(n-1, k-1) kappa_k mu'_{n-k}.
pub fn cumulants_exact(params: CmpParams, n_max: u32, rel_tol: f64) -> Result<CumulantSet> {
    if n_max == 0 || n_max > 6 {
        return Err(Error::IndexOutOfRange(format!(
            "cumulants are supported for 1 <= n_max <= 6, got {n_max}"
        )));
    }
    let mus: Vec<f64> = (1..=n_max)
        .map(|n| raw_moment_exact(params, n, rel_tol))
        .collect::<Result<_>>()?;
    let mut kappas: Vec<f64> = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max as usize {
        let mut k = mus[n - 1];
        for m in 1..n {
            k -= binomial(n - 1, m - 1) * kappas[m - 1] * mus[n - m - 1];
        }
        kappas.push(k);
    }
    Ok(CumulantSet::new(kappas, Provenance::Exact))
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
