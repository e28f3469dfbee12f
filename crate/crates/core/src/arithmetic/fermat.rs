//! Exact Fermat rationals `q = (xⁿ + yⁿ)/zⁿ`.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatRational {
    pub x: Integer,
    pub y: Integer,
    pub z: Integer,
    pub n: u32,
    /// `xⁿ + yⁿ`
    pub numerator: Integer,
    /// `zⁿ`
    pub denominator: Integer,
}

/// Builds `(xⁿ + yⁿ)/zⁿ`; exponents below 3 lie outside the class.
pub fn fermat_rational(x: u64, y: u64, z: u64, n: u32) -> Result<FermatRational> {
    FermatRational::new(Integer::from(x), Integer::from(y), Integer::from(z), n)
}

impl FermatRational {
    pub fn new(x: Integer, y: Integer, z: Integer, n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::FermatClass { n });
        }
        for (i, v) in [&x, &y, &z].into_iter().enumerate() {
            if *v <= 0 {
                return Err(Error::InvalidInput {
                    op: "fermat_rational",
                    index: i,
                    message: format!("{v} is not a positive integer"),
                });
            }
        }
        let numerator = Integer::from(&x).pow(n) + Integer::from(&y).pow(n);
        let denominator = Integer::from(&z).pow(n);
        Ok(Self {
            x,
            y,
            z,
            n,
            numerator,
            denominator,
        })
    }

    /// Exact `q = 1` test on integers.
    pub fn equals_one(&self) -> bool {
        self.numerator == self.denominator
    }

    /// `q` in lowest terms.
    pub fn value(&self) -> Rational {
        Rational::from((self.numerator.clone(), self.denominator.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    /// `|q − 1|`, exactly.
    pub fn gap(&self) -> Rational {
        let diff = Integer::from(&self.numerator - &self.denominator).abs();
        Rational::from((diff, self.denominator.clone()))
    }

    /// `1/zⁿ`, the least possible nonzero gap.
    pub fn gap_lower_bound(&self) -> Rational {
        Rational::from((Integer::from(1), self.denominator.clone()))
    }

    /// `q ≠ 1 ⇒ |q − 1| ≥ 1/zⁿ`, checked exactly.
    pub fn gap_bound_holds(&self) -> bool {
        self.equals_one() || self.gap() >= self.gap_lower_bound()
    }

    pub fn label(&self) -> String {
        format!("({},{},{},{})", self.x, self.y, self.z, self.n)
    }

    pub fn summary(&self) -> FermatSummary {
        FermatSummary {
            label: self.label(),
            q: self.value().to_string(),
            q_approx: self.to_f64(),
            gap: self.gap().to_string(),
            gap_approx: self.gap().to_f64(),
            gap_lower_bound: self.gap_lower_bound().to_string(),
            equals_one: self.equals_one(),
        }
    }
}

/// Serializable exact description of a Fermat rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermatSummary {
    pub label: String,
    pub q: String,
    pub q_approx: f64,
    pub gap: String,
    pub gap_approx: f64,
    pub gap_lower_bound: String,
    pub equals_one: bool,
}

/// Result of the exhaustive exact scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatScan {
    pub z_max: u64,
    pub n_range: (u32, u32),
    pub checked: u64,
    pub solutions: Vec<(u64, u64, u64, u32)>,
}

/// Checks every `x, y < z ≤ z_max` and `n_lo ≤ n ≤ n_hi` for `q = 1`.
pub fn fermat_scan(z_max: u64, n_lo: u32, n_hi: u32) -> Result<FermatScan> {
    if n_lo < 3 {
        return Err(Error::FermatClass { n: n_lo });
    }
    let mut checked = 0;
    let mut solutions = Vec::new();
    for n in n_lo..=n_hi {
        let powers: Vec<Integer> = (0..=z_max).map(|v| Integer::from(v).pow(n)).collect();
        for z in 2..=z_max {
            for x in 1..z {
                for y in 1..z {
                    checked += 1;
                    let sum = Integer::from(&powers[x as usize] + &powers[y as usize]);
                    if sum == powers[z as usize] {
                        solutions.push((x, y, z, n));
                    }
                }
            }
        }
    }
    Ok(FermatScan {
        z_max,
        n_range: (n_lo, n_hi),
        checked,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let a = fermat_rational(1, 1, 1, 3).unwrap();
        assert_eq!(a.value(), 2);
        assert_eq!(a.gap(), 1);
        let b = fermat_rational(6, 8, 9, 3).unwrap();
        assert_eq!(b.value(), Rational::from((728, 729)));
        assert!(!b.equals_one());
        assert_eq!(b.gap(), Rational::from((1, 729)));
        assert!(b.gap_bound_holds());
        let c = fermat_rational(2, 2, 2, 3).unwrap();
        assert_eq!(c.value(), 2);
        assert!(matches!(fermat_rational(3, 4, 5, 2), Err(Error::FermatClass { n: 2 })));
        assert!(fermat_rational(0, 1, 1, 3).is_err());
    }

    #[test]
    fn pythagorean_triple_would_be_caught() {
        // the scan arithmetic itself detects equality when it exists
        let powers: Vec<Integer> = (0..=5u32).map(|v| Integer::from(v).pow(2)).collect();
        assert_eq!(Integer::from(&powers[3] + &powers[4]), powers[5]);
    }
}
