//! Asymptotic summary statistics (mean, variance, higher cumulants, skewness,
//! kurtosis, raw moments), partial Bell polynomials for cumulant-to-moment
//! conversion, and the Poisson-expectation convergence-rate check.
//!
//! All expansions are in powers of a = lambda^(1/nu); the remainders are
//! O(a^-4) relative to the leading term except for raw moments (O(a^-3)).

use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::kernel::{ln_gamma, KahanSum};
use crate::params::CmpParams;

/// How a statistic was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Asymptotic,
}

/// Ordered cumulants kappa_1..kappa_n.
#[derive(Debug, Clone)]
pub struct CumulantSet {
    values: Vec<f64>,
    provenance: Provenance,
    /// Expansion terms retained when asymptotic; 0 for exact sets.
    order_in_lambda: usize,
}

impl CumulantSet {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Self {
        Self {
            values,
            provenance,
            order_in_lambda: 0,
        }
    }

    pub fn with_order(values: Vec<f64>, order_in_lambda: usize) -> Self {
        Self {
            values,
            provenance: Provenance::Asymptotic,
            order_in_lambda,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn order_in_lambda(&self) -> usize {
        self.order_in_lambda
    }
}

/// Raw moments mu'_1..mu'_n and optionally the central moments mu_2..mu_n.
#[derive(Debug, Clone)]
pub struct MomentSet {
    pub raw: Vec<f64>,
    /// central[i] is mu_{i+2}; None when not requested.
    pub central: Option<Vec<f64>>,
    pub provenance: Provenance,
}

fn check_nu_positive(params: CmpParams) -> Result<(f64, f64)> {
    let nu = params.nu();
    if !(nu > 0.0) {
        return Err(Error::Domain(
            "asymptotic statistics require nu > 0".to_string(),
        ));
    }
    Ok((params.lambda(), nu))
}

/// The four retained terms of the mean expansion:
/// EX = a(1 - (nu-1)/(2nu) a^-1 - (nu^2-1)/(24nu^2) a^-2 - (nu^2-1)/(24nu^3) a^-3).
fn mean_terms(lambda: f64, nu: f64) -> [f64; 4] {
    let a = lambda.powf(1.0 / nu);
    let y = nu * nu - 1.0;
    [
        a,
        -(nu - 1.0) / (2.0 * nu),
        -y / (24.0 * nu * nu) / a,
        -y / (24.0 * nu * nu * nu) / (a * a),
    ]
}

pub fn mean_asym(params: CmpParams) -> Result<f64> {
    let (lambda, nu) = check_nu_positive(params)?;
    Ok(mean_terms(lambda, nu).iter().sum())
}

pub fn variance_asym(params: CmpParams) -> Result<f64> {
    cumulant_asym(params, 2)
}

/// kappa_n = (a/nu^(n-1))(1 + (-1)^n (nu^2-1)/(24nu^2) a^-2
///                           + (-2)^n (nu^2-1)/(48nu^3) a^-3), n >= 2.
pub fn cumulant_asym(params: CmpParams, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::IndexOutOfRange(format!(
            "cumulant_asym needs n >= 2 (kappa_1 is the mean), got {n}"
        )));
    }
    let (lambda, nu) = check_nu_positive(params)?;
    let a = lambda.powf(1.0 / nu);
    let y = nu * nu - 1.0;
    let s2 = (-1.0f64).powi(n as i32) * y / (24.0 * nu * nu) / (a * a);
    let s3 = (-2.0f64).powi(n as i32) * y / (48.0 * nu * nu * nu) / (a * a * a);
    Ok(a / nu.powi(n as i32 - 1) * (1.0 + s2 + s3))
}

/// gamma_1 = a^(-1/2)/sqrt(nu) (1 - 5(nu^2-1)/(48nu^2) a^-2 - 7(nu^2-1)/(24nu^3) a^-3).
pub fn skewness_asym(params: CmpParams) -> Result<f64> {
    let (lambda, nu) = check_nu_positive(params)?;
    let a = lambda.powf(1.0 / nu);
    let y = nu * nu - 1.0;
    Ok(1.0 / (a * nu).sqrt()
        * (1.0 - 5.0 * y / (48.0 * nu * nu) / (a * a) - 7.0 * y / (24.0 * nu * nu * nu) / (a * a * a)))
}

/// gamma_2 = a^-1/nu (1 - (nu^2-1)/(24nu^2) a^-2 + (nu^2-1)/(6nu^3) a^-3).
pub fn kurtosis_asym(params: CmpParams) -> Result<f64> {
    let (lambda, nu) = check_nu_positive(params)?;
    let a = lambda.powf(1.0 / nu);
    let y = nu * nu - 1.0;
    Ok(1.0 / (a * nu)
        * (1.0 - y / (24.0 * nu * nu) / (a * a) + y / (6.0 * nu * nu * nu) / (a * a * a)))
}

/// Exact gamma_1 = kappa_3 / kappa_2^(3/2) from series cumulants.
pub fn skewness_exact(params: CmpParams, rel_tol: f64) -> Result<f64> {
    let ks = crate::exact::cumulants_exact(params, 3, rel_tol)?;
    let v = ks.values();
    Ok(v[2] / v[1].powf(1.5))
}

/// Exact gamma_2 = kappa_4 / kappa_2^2 from series cumulants.
pub fn kurtosis_exact(params: CmpParams, rel_tol: f64) -> Result<f64> {
    let ks = crate::exact::cumulants_exact(params, 4, rel_tol)?;
    let v = ks.values();
    Ok(v[3] / (v[1] * v[1]))
}

/// Asymptotic kappa_1..kappa_n_max bundled for side-by-side reporting.
pub fn cumulants_asym(params: CmpParams, n_max: u32) -> Result<CumulantSet> {
    if n_max == 0 || n_max > 6 {
        return Err(Error::IndexOutOfRange(format!(
            "cumulants are supported for 1 <= n_max <= 6, got {n_max}"
        )));
    }
    let mut values = vec![mean_asym(params)?];
    for n in 2..=n_max {
        values.push(cumulant_asym(params, n)?);
    }
    Ok(CumulantSet::with_order(values, 3))
}

/// Partial Bell polynomial B_{n,k}(x_1..x_{n-k+1}) by the recurrence
/// B_{n,k} = sum_i C(n-1, i-1) x_i B_{n-i, k-1}.
pub fn bell_partial(n: u32, k: u32, x: &[f64]) -> Result<f64> {
    if k < 1 || k > n || n > 10 {
        return Err(Error::IndexOutOfRange(format!(
            "bell_partial needs 1 <= k <= n <= 10, got n={n}, k={k}"
        )));
    }
    let need = (n - k + 1) as usize;
    if x.len() < need {
        return Err(Error::IndexOutOfRange(format!(
            "bell_partial(n={n}, k={k}) needs {need} arguments, got {}",
            x.len()
        )));
    }
    fn rec(n: usize, k: usize, x: &[f64]) -> f64 {
        if n == 0 && k == 0 {
            return 1.0;
        }
        if n == 0 || k == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 1..=(n - k + 1) {
            acc += binomial(n - 1, i - 1) * x[i - 1] * rec(n - i, k - 1, x);
        }
        acc
    }
    Ok(rec(n as usize, k as usize, x))
}

/// mu'_n = sum_{k=1}^n B_{n,k}(kappa_1..kappa_{n-k+1}); central moments come
/// from the same formula with kappa_1 zeroed.
pub fn raw_moments_from_cumulants(cumulants: &CumulantSet) -> Result<MomentSet> {
    let ks = cumulants.values();
    let n_max = ks.len() as u32;
    if n_max == 0 || n_max > 10 {
        return Err(Error::IndexOutOfRange(format!(
            "raw_moments_from_cumulants supports 1..=10 cumulants, got {n_max}"
        )));
    }
    let moment = |kappas: &[f64], n: u32| -> Result<f64> {
        let mut acc = KahanSum::new();
        for k in 1..=n {
            acc.add(bell_partial(n, k, &kappas[..(n - k + 1) as usize])?);
        }
        Ok(acc.value())
    };
    let raw: Vec<f64> = (1..=n_max).map(|n| moment(ks, n)).collect::<Result<_>>()?;
    let central = if n_max >= 2 {
        let mut zeroed = ks.to_vec();
        zeroed[0] = 0.0;
        Some(
            (2..=n_max)
                .map(|n| moment(&zeroed, n))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    Ok(MomentSet {
        raw,
        central,
        provenance: cumulants.provenance(),
    })
}

/// mu'_n = lambda^(n/nu)(1 + n(n-nu)/(2nu) a^-1 + a2 a^-2) with
/// a2 = -n(nu-1)(6n^2 - 3n*nu - 15n + 4nu + 10)/(24nu^2)
///      + (C(n,3) + 3C(n,4))/nu^2.
pub fn raw_moment_asym(params: CmpParams, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::IndexOutOfRange(
            "raw_moment_asym needs n >= 1".to_string(),
        ));
    }
    let (lambda, nu) = check_nu_positive(params)?;
    let a = lambda.powf(1.0 / nu);
    let nf = n as f64;
    let a1 = nf * (nf - nu) / (2.0 * nu);
    let a2 = -nf * (nu - 1.0) * (6.0 * nf * nf - 3.0 * nf * nu - 15.0 * nf + 4.0 * nu + 10.0)
        / (24.0 * nu * nu)
        + (binomial(n as usize, 3) + 3.0 * binomial(n as usize, 4)) / (nu * nu);
    Ok(a.powi(n as i32) * (1.0 + a1 / a + a2 / (a * a)))
}

/// E[f_alpha(X_alpha)] for X_alpha ~ Poisson(alpha), where
/// f_alpha(x) = (alpha^x e^-alpha sqrt(2 pi alpha) / Gamma(x+1))^(nu-1);
/// the expectation tends to nu^(-1/2) at rate O(alpha^-1).
pub fn poisson_expectation(nu: f64, alpha: f64) -> Result<f64> {
    if !(nu > 0.0) || !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "poisson_expectation requires nu > 0 and alpha > 0, got nu={nu}, alpha={alpha}"
        )));
    }
    // term_j = exp(nu * log Po(alpha)-pmf(j) + (nu-1)/2 * ln(2 pi alpha));
    // summed with a max-shift so the peak is scaled to 1
    let half_log = 0.5 * (2.0 * std::f64::consts::PI * alpha).ln();
    let hi = (alpha + 40.0 * alpha.sqrt() + 100.0) as usize;
    let mut logs = Vec::with_capacity(hi + 1);
    let mut shift = f64::NEG_INFINITY;
    for j in 0..=hi {
        let lp = j as f64 * alpha.ln() - alpha - ln_gamma(j as f64 + 1.0)?;
        let l = nu * lp + (nu - 1.0) * half_log;
        shift = shift.max(l);
        logs.push(l);
    }
    let mut sum = KahanSum::new();
    for l in logs {
        sum.add((l - shift).exp());
    }
    Ok((shift + sum.value().ln()).exp())
}

/// Log-log regression slope of |E[f_alpha] - nu^(-1/2)| against alpha.
/// Returns -infinity at nu = 1, where the deviation is identically zero.
pub fn verify_poisson_expectation_limit(nu: f64, alphas: &[f64]) -> Result<f64> {
    if alphas.len() < 2 {
        return Err(Error::InvalidParameters(
            "need at least two alpha values for a slope".to_string(),
        ));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) || alphas[0] < 5.0 {
        return Err(Error::InvalidParameters(
            "alphas must be increasing and >= 5".to_string(),
        ));
    }
    if nu == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let target = nu.powf(-0.5);
    let pts: Vec<(f64, f64)> = alphas
        .iter()
        .map(|&a| {
            poisson_expectation(nu, a).map(|e| (a.ln(), (e - target).abs().ln()))
        })
        .collect::<Result<_>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
