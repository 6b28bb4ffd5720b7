//! Saddle-point probability masses and the regularized incomplete gamma split.
//!
//! The Poisson and binomial masses are written in terms of the deviance
//! `bd0(x, np) = x ln(x/np) + np - x` and the Stirling remainder
//! `stirlerr(n) = ln n! - (n + 1/2) ln n + n - ln sqrt(2 pi)`, which keeps
//! the relative error near machine precision even when the mass underflows.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `stirlerr(n)` for n = 1..=15, evaluated at 40 digits.
const STIRLERR_SMALL: [f64; 15] = [
    0.081_061_466_795_327_258,
    0.041_340_695_955_409_294,
    0.027_677_925_684_998_339,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_192,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_770,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_871,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_530,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

/// Stirling series remainder for an integer argument `n >= 1`.
pub(crate) fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    debug_assert!(n >= 1);
    if n <= 15 {
        return STIRLERR_SMALL[(n - 1) as usize];
    }
    let x = n as f64;
    let xx = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
}

/// Deviance `x ln(x/np) + np - x`, evaluated without cancellation near x = np.
pub(crate) fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1.0;
        loop {
            ej *= v2;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / np).ln() + np - x
}

/// Natural log of the Poisson mass at `x` for rate `lambda > 0`.
pub(crate) fn ln_poisson_pmf(x: u64, lambda: f64) -> f64 {
    if x == 0 {
        return -lambda;
    }
    let xf = x as f64;
    -stirlerr(x) - bd0(xf, lambda) - 0.5 * (2.0 * PI * xf).ln()
}

/// Natural log of the binomial mass `C(k, x) p^x (1-p)^(k-x)` for `0 < p < 1`.
pub(crate) fn ln_binomial_pmf(x: u64, k: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if x == 0 {
        return k as f64 * (-p).ln_1p();
    }
    if x == k {
        return k as f64 * p.ln();
    }
    let (xf, kf) = (x as f64, k as f64);
    let lc = stirlerr(k)
        - stirlerr(x)
        - stirlerr(k - x)
        - bd0(xf, kf * p)
        - bd0(kf - xf, kf * q);
    let lf = 2.0 * LN_SQRT_2PI + xf.ln() + (-xf / kf).ln_1p();
    lc - 0.5 * lf
}

/// `ln Pr(Poisson(lambda) >= m)`, i.e. the log of the regularized lower
/// incomplete gamma `P(m, lambda)`, for `m >= 1`.
///
/// Below `lambda < m + 1` the series `pmf(m) * sum_j lambda^j / ((m+1)...(m+j))`
/// is summed directly; above it the continued fraction for the upper function
/// `Q(m, lambda)` converges quickly and the tail is `1 - Q`.
pub(crate) fn ln_upper_poisson_tail(lambda: f64, m: u64) -> f64 {
    debug_assert!(m >= 1 && lambda > 0.0);
    let mf = m as f64;
    let ln_pmf = ln_poisson_pmf(m, lambda);
    if lambda < mf + 1.0 {
        let mut sum = Neumaier::default();
        let mut term = 1.0;
        sum.add(term);
        let mut j = 1.0;
        while j < 1.0e7 {
            term *= lambda / (mf + j);
            sum.add(term);
            if term < sum.total() * 1e-17 {
                break;
            }
            j += 1.0;
        }
        ln_pmf + sum.total().ln()
    } else {
        let upper = mf * ln_pmf.exp() * gamma_continued_fraction(mf, lambda);
        (-upper).ln_1p()
    }
}

/// Modified Lentz evaluation of the continued fraction in `Q(a, x)`;
/// the full function is `Q = x^a e^-x / Gamma(a) * cf`.
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    let mut i = 1.0;
    while i < 1.0e6 {
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
        i += 1.0;
    }
    h
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
