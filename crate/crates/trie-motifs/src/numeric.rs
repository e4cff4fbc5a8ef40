//! Small numeric utilities shared across the analytic modules: compensated
//! summation, log-space factorials, and composition enumeration.

/// Kahan–Neumaier compensated accumulator.
///
/// The alternating series in the variance coefficients and the per-level word
/// sums combine terms spanning many orders of magnitude; naive `+=` loses the
/// small corrections that the truncation certificates claim to account for.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Natural log of n! via Stirling's series (exact table below 2, series above).
///
/// Max relative error is ~1e-15 for n >= 10; small arguments use the exact
/// product. Having our own avoids pulling a special-functions crate for one
/// real-argument function (the complex Gamma lives in `analytics::gamma`).
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 20 {
        let mut acc = 0.0f64;
        for k in 2..=n {
            acc += (k as f64).ln();
        }
        return acc;
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Gamma(x): the three correction terms keep the
    // error below 1e-15 for x >= 21.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// ln C(n, k) in log space; requires k <= n.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Iterates all compositions of `total` into `parts` nonnegative summands,
/// invoking `f` once per composition. Used for per-level word aggregation
/// (words with the same symbol counts share P(w)) and the trie split
/// recursions; enumerating raw words would be m^level.
pub fn for_each_composition<F: FnMut(&[u32])>(total: u32, parts: usize, mut f: F) {
    assert!(parts >= 1);
    let mut buf = vec![0u32; parts];
    fill_composition(total, 0, &mut buf, &mut f);
}

fn fill_composition<F: FnMut(&[u32])>(rem: u32, idx: usize, buf: &mut Vec<u32>, f: &mut F) {
    if idx + 1 == buf.len() {
        buf[idx] = rem;
        f(buf);
        return;
    }
    for first in 0..=rem {
        buf[idx] = first;
        fill_composition(rem - first, idx + 1, buf, f);
    }
}

/// log of the multinomial coefficient total! / prod(parts_i!).
pub fn ln_multinomial(total: u32, parts: &[u32]) -> f64 {
    let mut acc = ln_factorial(total as u64);
    for &p in parts {
        acc -= ln_factorial(p as u64);
    }
    acc
}

/// Rounds to `digits` significant decimal digits. All reals the CLI emits go
/// through this so that regression tables are byte-comparable.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_exact_products() {
        let mut exact = 0.0f64;
        for n in 2..=60u64 {
            exact += (n as f64).ln();
            let got = ln_factorial(n);
            assert!(
                (got - exact).abs() <= 1e-12 * exact.max(1.0),
                "n={n}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn ln_binomial_small_values() {
        assert!((ln_binomial(4, 2) - 6f64.ln()).abs() < 1e-14);
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-13);
        assert_eq!(ln_binomial(7, 0), 0.0);
    }

    #[test]
    fn kahan_recovers_cancelling_series() {
        // sum 1 + 1e-16 * 10^4 - 1 should be ~1e-12, which naive f64
        // addition in this order gets badly wrong.
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        k.add(-1.0);
        assert!((k.value() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn compositions_count_and_total() {
        let mut count = 0usize;
        for_each_composition(5, 3, |c| {
            assert_eq!(c.iter().sum::<u32>(), 5);
            count += 1;
        });
        // C(5 + 3 - 1, 3 - 1) = 21
        assert_eq!(count, 21);
    }

    #[test]
    fn round_sig_examples() {
        assert_eq!(round_sig(0.000006114999, 4), 0.000006115);
        assert_eq!(round_sig(-1.569340663e-8, 9), -1.56934066e-8);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(round_sig(123456.789, 5), 123460.0);
    }
}
