//! Divisor counts `d(n)`, the summatory function `D(x)` and its error term `Δ(x)`.

use rug::Integer;

use crate::error::{Error, Result};
use crate::EULER_GAMMA;

/// Largest table accepted by [`sieve_divisors`].
pub const SIEVE_MAX: u64 = 100_000_000;
/// Default memory budget for [`sieve_divisors`]: 10 bytes per entry up to 10⁸.
pub const DEFAULT_BUDGET: u64 = 1_100_000_000;
const BYTES_PER_ENTRY: u64 = 10;

/// `d(n)` and `D(n) = Σ_{k≤n} d(k)` for `n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    n_max: u64,
    d: Vec<u16>,
    prefix: Vec<u64>,
}

impl DivisorTable {
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `d(n)` for `1 ≤ n ≤ n_max`.
    pub fn d(&self, n: u64) -> u16 {
        self.d[n as usize]
    }

    /// `D(n)`, with `D(0) = 0`.
    pub fn prefix(&self, n: u64) -> u64 {
        self.prefix[n as usize]
    }

    pub fn d_values(&self) -> &[u16] {
        &self.d[1..]
    }

    /// Writes `n,d,D` rows as CSV.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(["n", "d", "D"]).map_err(ser)?;
        for n in 1..=self.n_max {
            w.write_record([n.to_string(), self.d(n).to_string(), self.prefix(n).to_string()])
                .map_err(ser)?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
        Ok(())
    }
}

/// Divisor-count sieve by incrementing multiples, with the default budget.
pub fn sieve_divisors(n_max: u64) -> Result<DivisorTable> {
    sieve_divisors_with_budget(n_max, DEFAULT_BUDGET)
}

/// As [`sieve_divisors`], failing if `10·n_max` bytes exceed `budget`.
pub fn sieve_divisors_with_budget(n_max: u64, budget: u64) -> Result<DivisorTable> {
    if n_max < 1 || n_max > SIEVE_MAX {
        return Err(Error::domain("sieve_divisors", n_max as f64, "1 <= n_max <= 1e8"));
    }
    let required = BYTES_PER_ENTRY * (n_max + 1);
    if required > budget {
        return Err(Error::Budget {
            op: "sieve_divisors",
            required,
            budget,
        });
    }
    let n = n_max as usize;
    let mut d = vec![0u16; n + 1];
    for k in 1..=n {
        let mut m = k;
        while m <= n {
            d[m] += 1;
            m += k;
        }
    }
    let mut prefix = vec![0u64; n + 1];
    for i in 1..=n {
        prefix[i] = prefix[i - 1] + d[i] as u64;
    }
    Ok(DivisorTable { n_max, d, prefix })
}

/// `D(n)` by the hyperbola identity in `O(√n)`.
pub fn divisor_summatory_u64(n: u64) -> u128 {
    if n == 0 {
        return 0;
    }
    let r = n.isqrt();
    let mut sum: u128 = 0;
    for k in 1..=r {
        sum += (n / k) as u128;
    }
    2 * sum - (r as u128) * (r as u128)
}

/// `D(x) = D(⌊x⌋)` for real `x ≥ 1`, exactly.
pub fn divisor_summatory(x: f64) -> Result<Integer> {
    if !(x >= 1.0) || !x.is_finite() || x >= 1.8e19 {
        return Err(Error::domain("divisor_summatory", x, "1 <= x < 1.8e19"));
    }
    Ok(Integer::from(divisor_summatory_u64(x.floor() as u64)))
}

/// `Δ(x) = D(x) − x ln x − (2c − 1)x` for `x ≥ 2`.
pub fn delta_error(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::domain("delta_error", x, "x >= 2"));
    }
    let d = divisor_summatory(x)?.to_f64();
    Ok(delta_from(d, x))
}

fn delta_from(d: f64, x: f64) -> f64 {
    d - x * x.ln() - (2.0 * EULER_GAMMA - 1.0) * x
}

/// Extremes of `Δ(x)/√x` over a real interval, scanned at both one-sided
/// limits of every jump of `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaScan {
    pub lo: u64,
    pub hi: u64,
    pub max_abs_ratio: f64,
    pub argmax: f64,
    pub min_delta: f64,
    pub max_delta: f64,
    pub positive: u64,
    pub negative: u64,
}

/// Scans `x ∈ [lo, hi]` (integers `lo ≥ 2`). Between consecutive integers `Δ`
/// is decreasing, so its extremes are `Δ(N)` and `Δ((N+1)⁻)`.
pub fn delta_scan(lo: u64, hi: u64) -> Result<DeltaScan> {
    if lo < 2 || hi < lo {
        return Err(Error::precondition("delta_scan", format!("need 2 <= lo <= hi, got [{lo}, {hi}]")));
    }
    let mut stream = DivisorStream::new();
    stream.advance_to(lo - 1);
    let mut d = stream.prefix() as f64;
    let mut scan = DeltaScan {
        lo,
        hi,
        max_abs_ratio: 0.0,
        argmax: lo as f64,
        min_delta: f64::INFINITY,
        max_delta: f64::NEG_INFINITY,
        positive: 0,
        negative: 0,
    };
    let record = |x: f64, delta: f64, scan: &mut DeltaScan| {
        let ratio = delta.abs() / x.sqrt();
        if ratio > scan.max_abs_ratio {
            scan.max_abs_ratio = ratio;
            scan.argmax = x;
        }
        scan.min_delta = scan.min_delta.min(delta);
        scan.max_delta = scan.max_delta.max(delta);
        if delta > 0.0 {
            scan.positive += 1;
        } else if delta < 0.0 {
            scan.negative += 1;
        }
    };
    for n in lo..=hi {
        if n > lo {
            // left limit at n, where D still equals D(n − 1)
            record(n as f64, delta_from(d, n as f64), &mut scan);
        }
        stream.advance_to(n);
        d = stream.prefix() as f64;
        record(n as f64, delta_from(d, n as f64), &mut scan);
    }
    Ok(scan)
}

/// Streaming `D(n)` in increasing `n` by a segmented divisor sieve, in
/// memory independent of `n`.
#[derive(Debug, Clone)]
pub struct DivisorStream {
    seg_lo: u64,
    counts: Vec<u32>,
    pos: u64,
    prefix: u64,
}

const SEGMENT: u64 = 1 << 16;

impl Default for DivisorStream {
    fn default() -> Self {
        Self::new()
    }
}

impl DivisorStream {
    pub fn new() -> Self {
        Self {
            seg_lo: 1,
            counts: Vec::new(),
            pos: 0,
            prefix: 0,
        }
    }

    /// Current `n`; [`prefix`](Self::prefix) equals `D(n)`.
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn prefix(&self) -> u64 {
        self.prefix
    }

    fn fill(&mut self, lo: u64) {
        let hi = lo + SEGMENT;
        self.seg_lo = lo;
        self.counts.clear();
        self.counts.resize(SEGMENT as usize, 0);
        let r = (hi - 1).isqrt();
        for k in 1..=r {
            // multiples m = k·j in [lo, hi) with j ≥ k
            let first = (lo.div_ceil(k)).max(k) * k;
            let mut m = first;
            let square = k * k;
            while m < hi {
                self.counts[(m - lo) as usize] += if m == square { 1 } else { 2 };
                m += k;
            }
        }
    }

    /// Advances to `n ≥ position()`.
    pub fn advance_to(&mut self, n: u64) {
        assert!(n >= self.pos, "divisor stream only moves forward");
        while self.pos < n {
            let next = self.pos + 1;
            if self.counts.is_empty() || next >= self.seg_lo + SEGMENT {
                let lo = if self.counts.is_empty() { 1 } else { self.seg_lo + SEGMENT };
                self.fill(lo);
            }
            let seg_end = (self.seg_lo + SEGMENT - 1).min(n);
            let from = (next - self.seg_lo) as usize;
            let to = (seg_end - self.seg_lo) as usize;
            self.prefix += self.counts[from..=to].iter().map(|&c| c as u64).sum::<u64>();
            self.pos = seg_end;
        }
    }

    /// `D(n)` for each `n` of an ascending query list.
    pub fn prefix_many(queries: &[u64]) -> Result<Vec<u64>> {
        let mut stream = Self::new();
        let mut out = Vec::with_capacity(queries.len());
        for (i, &q) in queries.iter().enumerate() {
            if i > 0 && q < queries[i - 1] {
                return Err(Error::InvalidInput {
                    op: "divisor prefix stream",
                    index: i,
                    message: "queries must be ascending".into(),
                });
            }
            stream.advance_to(q);
            out.push(stream.prefix());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = sieve_divisors(100).unwrap();
        assert_eq!(t.d(1), 1);
        assert_eq!(t.d(12), 6);
        assert_eq!(t.d(7), 2);
        assert_eq!(t.prefix(10), 27);
        assert_eq!(divisor_summatory(10.9).unwrap(), 27);
        assert_eq!(divisor_summatory(1.0).unwrap(), 1);
    }

    #[test]
    fn delta_at_two() {
        let want = 3.0 - 2.0 * 2f64.ln() - (2.0 * EULER_GAMMA - 1.0) * 2.0;
        assert_eq!(delta_error(2.0).unwrap(), want);
        assert!(delta_error(1.5).is_err());
    }

    #[test]
    fn budget_and_domain() {
        assert!(matches!(
            sieve_divisors_with_budget(1000, 100),
            Err(Error::Budget { .. })
        ));
        assert!(sieve_divisors(0).is_err());
        assert!(sieve_divisors(SIEVE_MAX + 1).is_err());
    }

    #[test]
    fn stream_matches_table() {
        let t = sieve_divisors(300_000).unwrap();
        let mut s = DivisorStream::new();
        for n in [1u64, 2, 3, 65_535, 65_536, 65_537, 131_072, 299_999] {
            s.advance_to(n);
            assert_eq!(s.prefix(), t.prefix(n), "n={n}");
        }
    }
}
