//! Two-way repeated-measures ANOVA, planned contrasts and the F
//! distribution.
//!
//! Each effect is tested against its own effect-by-subject interaction.
//! Degrees of freedom are uncorrected (no sphericity adjustment).

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("table shape {n}x{a}x{b} needs {expected} values, got {got}")]
    Shape {
        n: usize,
        a: usize,
        b: usize,
        expected: usize,
        got: usize,
    },
    #[error("need at least {need} {what}, got {got}")]
    TooFew {
        what: &'static str,
        need: usize,
        got: usize,
    },
    #[error("contrast needs {levels} weights summing to zero")]
    BadWeights { levels: usize },
    #[error("non-finite value in table")]
    NonFinite,
}

/// Responses of `n` subjects under every combination of factor A (`a`
/// levels) and factor B (`b` levels). Stored subject-major, then A, then B.
#[derive(Debug, Clone, PartialEq)]
pub struct WithinSubjectsTable {
    n: usize,
    a: usize,
    b: usize,
    values: Vec<f64>,
}

impl WithinSubjectsTable {
    pub fn new(n: usize, a: usize, b: usize, values: Vec<f64>) -> Result<Self, StatsError> {
        let expected = n * a * b;
        if values.len() != expected {
            return Err(StatsError::Shape {
                n,
                a,
                b,
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(WithinSubjectsTable { n, a, b, values })
    }

    pub fn from_fn(n: usize, a: usize, b: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self, StatsError> {
        let mut values = Vec::with_capacity(n * a * b);
        for i in 0..n {
            for j in 0..a {
                for k in 0..b {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::new(n, a, b, values)
    }

    pub fn subjects(&self) -> usize {
        self.n
    }

    pub fn levels_a(&self) -> usize {
        self.a
    }

    pub fn levels_b(&self) -> usize {
        self.b
    }

    pub fn get(&self, subject: usize, level_a: usize, level_b: usize) -> f64 {
        self.values[(subject * self.a + level_a) * self.b + level_b]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        WithinSubjectsTable {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectTest {
    pub ss: f64,
    pub df: f64,
    pub error_ss: f64,
    pub error_df: f64,
    pub ms: f64,
    pub error_ms: f64,
    pub f: f64,
    pub p: f64,
    /// The error term vanished, so `f`/`p` are conventions rather than a
    /// test.
    pub degenerate: bool,
}

impl EffectTest {
    fn new(ss: f64, df: f64, error_ss: f64, error_df: f64, zero: f64) -> Self {
        let ss = if ss <= zero { 0.0 } else { ss };
        let error_ss = if error_ss <= zero { 0.0 } else { error_ss };
        let ms = ss / df;
        let error_ms = error_ss / error_df;
        let (f, p, degenerate) = f_test(ms, error_ms, df, error_df);
        EffectTest {
            ss,
            df,
            error_ss,
            error_df,
            ms,
            error_ms,
            f,
            p,
            degenerate,
        }
    }
}

// F = numerator / error with the zero-error conventions: an effect with no
// error variance is infinitely significant, and nothing over nothing is 0.
fn f_test(num: f64, err: f64, df1: f64, df2: f64) -> (f64, f64, bool) {
    if err > 0.0 {
        let f = num / err;
        (f, f_sf(f, df1, df2), false)
    } else if num > 0.0 {
        (f64::INFINITY, 0.0, true)
    } else {
        (0.0, 1.0, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    pub a: EffectTest,
    pub b: EffectTest,
    pub ab: EffectTest,
    pub ss_subjects: f64,
    pub ss_total: f64,
}

// Below this, a sum of squares is rounding noise.
fn zero_floor(values: &[f64]) -> f64 {
    let scale: f64 = values.iter().map(|v| v * v).sum();
    1e-13 * scale.max(f64::MIN_POSITIVE)
}

struct Means {
    grand: f64,
    subj: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    ab: Vec<f64>,
    sa: Vec<f64>,
    sb: Vec<f64>,
}

fn means(t: &WithinSubjectsTable) -> Means {
    let (n, a, b) = (t.n, t.a, t.b);
    let mut m = Means {
        grand: 0.0,
        subj: vec![0.0; n],
        a: vec![0.0; a],
        b: vec![0.0; b],
        ab: vec![0.0; a * b],
        sa: vec![0.0; n * a],
        sb: vec![0.0; n * b],
    };
    for i in 0..n {
        for j in 0..a {
            for k in 0..b {
                let y = t.get(i, j, k);
                m.grand += y;
                m.subj[i] += y;
                m.a[j] += y;
                m.b[k] += y;
                m.ab[j * b + k] += y;
                m.sa[i * a + j] += y;
                m.sb[i * b + k] += y;
            }
        }
    }
    let (nf, af, bf) = (n as f64, a as f64, b as f64);
    m.grand /= nf * af * bf;
    m.subj.iter_mut().for_each(|v| *v /= af * bf);
    m.a.iter_mut().for_each(|v| *v /= nf * bf);
    m.b.iter_mut().for_each(|v| *v /= nf * af);
    m.ab.iter_mut().for_each(|v| *v /= nf);
    m.sa.iter_mut().for_each(|v| *v /= bf);
    m.sb.iter_mut().for_each(|v| *v /= af);
    m
}

pub fn rm_anova_2way(t: &WithinSubjectsTable) -> Result<AnovaResult, StatsError> {
    for (what, got) in [("subjects", t.n), ("levels of A", t.a), ("levels of B", t.b)] {
        if got < 2 {
            return Err(StatsError::TooFew { what, need: 2, got });
        }
    }
    let (n, a, b) = (t.n, t.a, t.b);
    let m = means(t);
    let g = m.grand;
    let sq = |x: f64| x * x;

    let ss_a = (n * b) as f64 * m.a.iter().map(|&x| sq(x - g)).sum::<f64>();
    let ss_b = (n * a) as f64 * m.b.iter().map(|&x| sq(x - g)).sum::<f64>();
    let ss_s = (a * b) as f64 * m.subj.iter().map(|&x| sq(x - g)).sum::<f64>();
    let mut ss_ab = 0.0;
    for j in 0..a {
        for k in 0..b {
            ss_ab += sq(m.ab[j * b + k] - m.a[j] - m.b[k] + g);
        }
    }
    ss_ab *= n as f64;
    let mut ss_as = 0.0;
    let mut ss_bs = 0.0;
    let mut ss_abs = 0.0;
    let mut ss_total = 0.0;
    for i in 0..n {
        for j in 0..a {
            ss_as += sq(m.sa[i * a + j] - m.a[j] - m.subj[i] + g);
        }
        for k in 0..b {
            ss_bs += sq(m.sb[i * b + k] - m.b[k] - m.subj[i] + g);
        }
        for j in 0..a {
            for k in 0..b {
                let y = t.get(i, j, k);
                ss_total += sq(y - g);
                ss_abs += sq(y - m.ab[j * b + k] - m.sa[i * a + j] - m.sb[i * b + k]
                    + m.a[j]
                    + m.b[k]
                    + m.subj[i]
                    - g);
            }
        }
    }
    ss_as *= b as f64;
    ss_bs *= a as f64;

    let zero = zero_floor(&t.values);
    let (nf, af, bf) = ((n - 1) as f64, (a - 1) as f64, (b - 1) as f64);
    Ok(AnovaResult {
        a: EffectTest::new(ss_a, af, ss_as, af * nf, zero),
        b: EffectTest::new(ss_b, bf, ss_bs, bf * nf, zero),
        ab: EffectTest::new(ss_ab, af * bf, ss_abs, af * bf * nf, zero),
        ss_subjects: ss_s,
        ss_total,
    })
}

/// One-factor repeated-measures ANOVA; `rows[i][j]` is subject `i` under
/// level `j`.
pub fn rm_anova_1way(rows: &[Vec<f64>]) -> Result<EffectTest, StatsError> {
    let n = rows.len();
    let a = rows.first().map_or(0, |r| r.len());
    let values: Vec<f64> = rows.iter().flatten().copied().collect();
    let t = WithinSubjectsTable::new(n, a, 1, values)?;
    if n < 2 {
        return Err(StatsError::TooFew {
            what: "subjects",
            need: 2,
            got: n,
        });
    }
    if a < 2 {
        return Err(StatsError::TooFew {
            what: "levels",
            need: 2,
            got: a,
        });
    }
    let m = means(&t);
    let g = m.grand;
    let ss_a = n as f64 * m.a.iter().map(|&x| (x - g) * (x - g)).sum::<f64>();
    let mut ss_err = 0.0;
    for i in 0..n {
        for j in 0..a {
            let r = t.get(i, j, 0) - m.a[j] - m.subj[i] + g;
            ss_err += r * r;
        }
    }
    let df = (a - 1) as f64;
    Ok(EffectTest::new(
        ss_a,
        df,
        ss_err,
        df * (n - 1) as f64,
        zero_floor(&t.values),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastResult {
    pub weights: Vec<f64>,
    /// Mean over subjects of the weighted level means.
    pub estimate: f64,
    /// `n · estimate²`, on one degree of freedom.
    pub ss: f64,
    /// Sum of squared deviations of the per-subject combinations.
    pub error_ss: f64,
    pub f: f64,
    pub df1: f64,
    pub df2: f64,
    pub p: f64,
    pub degenerate: bool,
}

/// Tests `Σ w_l · mean_l = 0` for one factor, averaging over the other.
pub fn planned_contrast(t: &WithinSubjectsTable, factor: Factor, weights: &[f64]) -> Result<ContrastResult, StatsError> {
    let levels = match factor {
        Factor::A => t.a,
        Factor::B => t.b,
    };
    let wsum: f64 = weights.iter().sum();
    let wabs: f64 = weights.iter().map(|w| w.abs()).sum();
    if weights.len() != levels || wsum.abs() > 1e-12 * wabs.max(1.0) {
        return Err(StatsError::BadWeights { levels });
    }
    if t.n < 2 {
        return Err(StatsError::TooFew {
            what: "subjects",
            need: 2,
            got: t.n,
        });
    }
    let combos: Vec<f64> = (0..t.n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .map(|(l, w)| {
                    let mean = match factor {
                        Factor::A => (0..t.b).map(|k| t.get(i, l, k)).sum::<f64>() / t.b as f64,
                        Factor::B => (0..t.a).map(|j| t.get(i, j, l)).sum::<f64>() / t.a as f64,
                    };
                    w * mean
                })
                .sum()
        })
        .collect();
    let n = t.n as f64;
    let mean = combos.iter().sum::<f64>() / n;
    let var = combos.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n - 1.0);
    let zero = zero_floor(&combos);
    let num = n * mean * mean;
    let num = if num <= zero { 0.0 } else { num };
    let var = if var * (n - 1.0) <= zero { 0.0 } else { var };
    let df2 = n - 1.0;
    let error_ss = var * df2;
    let (f, p, degenerate) = f_test(num, var, 1.0, df2);
    Ok(ContrastResult {
        weights: weights.to_vec(),
        estimate: mean,
        ss: num,
        error_ss,
        f,
        df1: 1.0,
        df2,
        p,
        degenerate,
    })
}

pub fn bonferroni(p: f64, m: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && m >= 1);
    (p * m as f64).min(1.0)
}

const BETACF_MAX_ITER: usize = 500;
const BETACF_EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, `0 <= x <= 1`.
pub fn betainc(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    // the continued fraction converges fast on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0) {
        front * betacf(a, b, x) / a
    } else {
        1.0 - front * betacf(b, a, 1.0 - x) / b
    }
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETACF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETACF_EPS {
            break;
        }
    }
    h
}

/// CDF of the F distribution with `d1`, `d2` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let dx = d1 * x;
    betainc(d1 / 2.0, d2 / 2.0, dx / (dx + d2))
}

/// Upper tail `P(F > x)`, evaluated directly to keep small p-values exact.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let dx = d1 * x;
    betainc(d2 / 2.0, d1 / 2.0, d2 / (dx + d2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_oneway() {
        let r = rm_anova_1way(&[vec![1.0, 3.0], vec![2.0, 6.0]]).unwrap();
        assert!((r.ss - 9.0).abs() < 1e-12);
        assert!((r.error_ss - 1.0).abs() < 1e-12);
        assert_eq!((r.df, r.error_df), (1.0, 1.0));
        assert!((r.f - 9.0).abs() < 1e-12);
    }

    #[test]
    fn df_structure() {
        let t = WithinSubjectsTable::from_fn(10, 3, 2, |i, j, k| (i * 7 + j * 3 + k * 5 % 4) as f64).unwrap();
        let r = rm_anova_2way(&t).unwrap();
        assert_eq!((r.a.df, r.a.error_df), (2.0, 18.0));
        assert_eq!((r.b.df, r.b.error_df), (1.0, 9.0));
        assert_eq!((r.ab.df, r.ab.error_df), (2.0, 18.0));
    }

    #[test]
    fn constant_table_is_degenerate_zero() {
        let t = WithinSubjectsTable::from_fn(10, 3, 2, |_, _, _| 0.1).unwrap();
        let r = rm_anova_2way(&t).unwrap();
        for e in [r.a, r.b, r.ab] {
            assert_eq!(e.ss, 0.0);
            assert_eq!(e.f, 0.0);
            assert_eq!(e.p, 1.0);
            assert!(e.degenerate);
        }
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            WithinSubjectsTable::new(2, 3, 2, vec![0.0; 11]),
            Err(StatsError::Shape { expected: 12, .. })
        ));
        let t = WithinSubjectsTable::new(1, 3, 2, vec![0.0; 6]).unwrap();
        assert!(rm_anova_2way(&t).is_err());
    }

    #[test]
    fn contrast_weights_checked() {
        let t = WithinSubjectsTable::from_fn(4, 3, 2, |i, j, _| (i + j) as f64).unwrap();
        assert!(planned_contrast(&t, Factor::A, &[1.0, 1.0, 1.0]).is_err());
        assert!(planned_contrast(&t, Factor::A, &[1.0, -1.0]).is_err());
        assert!(planned_contrast(&t, Factor::B, &[1.0, -1.0]).is_ok());
    }

    #[test]
    fn contrast_equal_nonzero_combos_degenerate() {
        // every subject shows the same +3 gap between level 0 and the rest
        let t = WithinSubjectsTable::from_fn(5, 3, 2, |i, j, _| i as f64 + if j == 0 { 3.0 } else { 0.0 }).unwrap();
        let c = planned_contrast(&t, Factor::A, &[2.0, -1.0, -1.0]).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.f, f64::INFINITY);
        assert_eq!(c.p, 0.0);
        assert!((c.estimate - 6.0).abs() < 1e-12);
    }

    #[test]
    fn bonferroni_cases() {
        assert!((bonferroni(0.01, 2) - 0.02).abs() < 1e-15);
        assert_eq!(bonferroni(0.9, 2), 1.0);
        assert_eq!(bonferroni(0.037, 1), 0.037);
    }

    #[test]
    fn f_cdf_basics() {
        assert_eq!(f_cdf(0.0, 3.0, 4.0), 0.0);
        assert!((f_cdf(1.0, 1.0, 1.0) - 0.5).abs() < 1e-10);
        assert_eq!(f_cdf(f64::INFINITY, 2.0, 3.0), 1.0);
    }

    #[test]
    fn betainc_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b
        for &x in &[0.05, 0.3, 0.5, 0.77, 0.99] {
            assert!((betainc(1.0, 1.0, x) - x).abs() < 1e-14);
            assert!((betainc(3.5, 1.0, x) - libm::pow(x, 3.5)).abs() < 1e-13);
            assert!((betainc(1.0, 4.0, x) - (1.0 - libm::pow(1.0 - x, 4.0))).abs() < 1e-13);
        }
    }
}
