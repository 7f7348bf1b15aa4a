//! Summary statistics and the significance checks used to compare ensembles.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Sum in ascending order, so the result does not depend on input order.
fn ordered_sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    ordered_sum(values) / values.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); 0 for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let sq: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    (ordered_sum(&sq) / (values.len() - 1) as f64).sqrt()
}

/// Outcome of a one-sided Welch test of `mean(a) > mean(b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub diff: f64,
    pub std_err: f64,
    pub dof: f64,
    pub t: f64,
    pub critical: f64,
    pub significant: bool,
}

/// One-sided Welch t-test that `mean(a) > mean(b)` at `confidence`.
pub fn welch_greater(a: &[f64], b: &[f64], confidence: f64) -> WelchTest {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (std_dev(a).powi(2) / na, std_dev(b).powi(2) / nb);
    let diff = mean(a) - mean(b);
    let std_err = (va + vb).sqrt();
    if std_err == 0.0 {
        return WelchTest {
            diff,
            std_err,
            dof: f64::INFINITY,
            t: if diff > 0.0 { f64::INFINITY } else { 0.0 },
            critical: 0.0,
            significant: diff > 0.0,
        };
    }
    let dof =
        (va + vb).powi(2) / (va.powi(2) / (na - 1.0).max(1.0) + vb.powi(2) / (nb - 1.0).max(1.0));
    let critical = StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(confidence);
    let t = diff / std_err;
    WelchTest {
        diff,
        std_err,
        dof,
        t,
        critical,
        significant: t > critical,
    }
}

/// Two-sided normal-approximation interval for the frequency of a binomial
/// with success probability `p` over `trials` trials.
pub fn binomial_interval(p: f64, trials: usize, confidence: f64) -> (f64, f64) {
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let half = z * (p * (1.0 - p) / trials as f64).sqrt();
    (p - half, p + half)
}
