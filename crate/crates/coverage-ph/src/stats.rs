//! Scenario comparison: trimming, log transform, and one-tailed rank tests.
//!
//! Both tests are rank-based, so the log transform cannot change their
//! p-values on tie-free data; it stays in the pipeline because the reporting
//! summarizes transformed values, and the invariance is asserted in tests
//! rather than assumed.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::StatsError;

/// A labeled sample of positive death times (post-trim).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub label: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Sample {
            label: label.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Direction of the one-tailed alternative, phrased for the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// First sample stochastically less than the second.
    Less,
    /// First sample stochastically greater than the second.
    Greater,
}

impl Alternative {
    pub fn describe(&self, a: &Sample, b: &Sample) -> String {
        match self {
            Alternative::Less => format!("{} stochastically less than {}", a.label, b.label),
            Alternative::Greater => format!("{} stochastically greater than {}", a.label, b.label),
        }
    }
}

/// Result of one hypothesis test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    pub p_one_tailed: f64,
    pub alternative: String,
    /// Set when the test ran outside its comfortable regime (small samples).
    pub warning: Option<String>,
}

/// Drop observations at or below the threshold, keeping order. "15 minutes
/// or less" is treated as noise, so only strictly greater values are
/// retained.
pub fn trim_short_deaths(
    deaths: &[f64],
    threshold: f64,
    label: impl Into<String>,
) -> Result<Sample, StatsError> {
    let values: Vec<f64> = deaths.iter().copied().filter(|&d| d > threshold).collect();
    if values.is_empty() {
        return Err(StatsError::EmptyAfterTrim(threshold));
    }
    Ok(Sample {
        label: label.into(),
        values,
    })
}

/// Natural log elementwise. Non-positive values are unreachable after a
/// trim at 15 minutes; the guard catches misuse.
pub fn log_transform(sample: &Sample) -> Result<Sample, StatsError> {
    let mut values = Vec::with_capacity(sample.values.len());
    for &v in &sample.values {
        if v <= 0.0 {
            return Err(StatsError::NonPositive(v));
        }
        values.push(v.ln());
    }
    Ok(Sample {
        label: sample.label.clone(),
        values,
    })
}

/// Midranks of the pooled values: tied observations share the mean of the
/// rank positions they occupy. Ranks are 1-based and sum to m(m+1)/2.
pub fn rank_with_ties(pooled: &[f64]) -> Vec<f64> {
    let m = pooled.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; m];
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end hold this tie group.
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = midrank;
        }
        start = end;
    }
    ranks
}

fn pooled_ranks(a: &Sample, b: &Sample) -> (Vec<f64>, Vec<f64>) {
    let mut pooled = Vec::with_capacity(a.len() + b.len());
    pooled.extend_from_slice(&a.values);
    pooled.extend_from_slice(&b.values);
    let ranks = rank_with_ties(&pooled);
    let (ra, rb) = ranks.split_at(a.len());
    (ra.to_vec(), rb.to_vec())
}

fn has_ties(a: &Sample, b: &Sample) -> bool {
    let mut pooled: Vec<f64> = a.values.iter().chain(b.values.iter()).copied().collect();
    pooled.sort_by(f64::total_cmp);
    pooled.windows(2).any(|w| w[0] == w[1])
}

/// Exact lower-tail probability P(U <= u) for tie-free samples of sizes m, n,
/// by counting rank arrangements with the classic recurrence
/// c(m, n, u) = c(m-1, n, u-n) + c(m, n-1, u).
fn exact_mann_whitney_lower(m: usize, n: usize, u: usize) -> f64 {
    let max_u = m * n;
    let u = u.min(max_u);
    // counts[i][j][v] built iteratively; counts fit f64 exactly for m+n <= 20.
    let mut counts = vec![vec![vec![0.0_f64; max_u + 1]; n + 1]; m + 1];
    for row in counts[0].iter_mut() {
        row[0] = 1.0;
    }
    for i in 1..=m {
        counts[i][0][0] = 1.0;
        for j in 1..=n {
            for v in 0..=max_u {
                let from_a = if v >= j { counts[i - 1][j][v - j] } else { 0.0 };
                let from_b = counts[i][j - 1][v];
                counts[i][j][v] = from_a + from_b;
            }
        }
    }
    let total: f64 = counts[m][n].iter().sum();
    let tail: f64 = counts[m][n][..=u].iter().sum();
    tail / total
}

/// One-tailed Mann-Whitney test. Uses the exact null distribution when the
/// pooled size is at most 20 and tie-free, otherwise the normal approximation
/// with tie correction and 0.5 continuity correction. The reported statistic
/// is U for the first sample.
pub fn mann_whitney_one_sided(
    a: &Sample,
    b: &Sample,
    alternative: Alternative,
) -> Result<TestResult, StatsError> {
    let m = a.len();
    let n = b.len();
    if m < 2 || n < 2 {
        return Err(StatsError::SampleTooSmall {
            need: 2,
            got: m.min(n),
        });
    }
    let (ranks_a, _) = pooled_ranks(a, b);
    let rank_sum_a: f64 = ranks_a.iter().sum();
    let u_a = rank_sum_a - (m * (m + 1)) as f64 / 2.0;
    let u_b = (m * n) as f64 - u_a;

    // Evidence for the alternative is a small U on the relevant side; both
    // directions reduce to a lower-tail probability.
    let u_dir = match alternative {
        Alternative::Less => u_a,
        Alternative::Greater => u_b,
    };

    let tie_free = !has_ties(a, b);
    let p = if m + n <= 20 && tie_free {
        exact_mann_whitney_lower(m, n, u_dir.round() as usize)
    } else {
        let mn = (m * n) as f64;
        let big_n = (m + n) as f64;
        let tie_term: f64 = tie_correction_sum(a, b);
        let variance = mn / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
        if variance <= 0.0 {
            return Err(StatsError::DegenerateRanks);
        }
        let z = (u_dir + 0.5 - mn / 2.0) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        normal.cdf(z)
    };

    Ok(TestResult {
        name: "mann-whitney".to_string(),
        statistic: u_a,
        p_one_tailed: p.clamp(0.0, 1.0),
        alternative: alternative.describe(a, b),
        warning: None,
    })
}

/// Sum of t^3 - t over pooled tie groups.
fn tie_correction_sum(a: &Sample, b: &Sample) -> f64 {
    let mut pooled: Vec<f64> = a.values.iter().chain(b.values.iter()).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end] == pooled[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        sum += t * t * t - t;
        start = end;
    }
    sum
}

/// One-tailed Brunner-Munzel test: rank-based statistic with unequal
/// variances and a t-distributed reference with estimated degrees of freedom.
/// Sizes below 10 are allowed but flagged with a warning.
pub fn brunner_munzel_one_sided(
    a: &Sample,
    b: &Sample,
    alternative: Alternative,
) -> Result<TestResult, StatsError> {
    let m = a.len();
    let n = b.len();
    if m < 2 || n < 2 {
        return Err(StatsError::SampleTooSmall {
            need: 2,
            got: m.min(n),
        });
    }
    let big_n = (m + n) as f64;
    let (pooled_a, pooled_b) = pooled_ranks(a, b);
    let within_a = rank_with_ties(&a.values);
    let within_b = rank_with_ties(&b.values);
    let mean_a = pooled_a.iter().sum::<f64>() / m as f64;
    let mean_b = pooled_b.iter().sum::<f64>() / n as f64;

    let var_part = |pooled: &[f64], within: &[f64], mean: f64| {
        let size = pooled.len() as f64;
        pooled
            .iter()
            .zip(within)
            .map(|(&r, &w)| {
                let dev = r - w - mean + (size + 1.0) / 2.0;
                dev * dev
            })
            .sum::<f64>()
            / (size - 1.0)
    };
    let v_a = var_part(&pooled_a, &within_a, mean_a);
    let v_b = var_part(&pooled_b, &within_b, mean_b);

    let pooled_variance = m as f64 * v_a + n as f64 * v_b;
    // Large positive statistic = first sample's ranks sit below the second's.
    let (statistic, p) = if pooled_variance <= 0.0 {
        // Zero rank variance happens for completely separated samples (the
        // statistic diverges, p collapses to 0 or 1) and for constant pooled
        // data (0/0: no test possible).
        if mean_a == mean_b {
            return Err(StatsError::DegenerateRanks);
        }
        let statistic = if mean_b > mean_a {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        let directed_positive = match alternative {
            Alternative::Less => statistic.is_sign_positive(),
            Alternative::Greater => statistic.is_sign_negative(),
        };
        (statistic, if directed_positive { 0.0 } else { 1.0 })
    } else {
        let statistic = (m * n) as f64 * (mean_b - mean_a) / (big_n * pooled_variance.sqrt());
        let df = pooled_variance.powi(2)
            / ((m as f64 * v_a).powi(2) / (m as f64 - 1.0)
                + (n as f64 * v_b).powi(2) / (n as f64 - 1.0));
        let directed = match alternative {
            Alternative::Less => statistic,
            Alternative::Greater => -statistic,
        };
        let t = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
        (statistic, t.sf(directed))
    };

    let warning = (m < 10 || n < 10)
        .then(|| format!("sample sizes {m} vs {n}: below the recommended minimum of 10"));

    Ok(TestResult {
        name: "brunner-munzel".to_string(),
        statistic,
        p_one_tailed: p.clamp(0.0, 1.0),
        alternative: alternative.describe(a, b),
        warning,
    })
}
