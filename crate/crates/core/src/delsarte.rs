//! The `z`-substituted spectrum `A(z) = (1/|C|) (1+(q-1)z)^m B((1-z)/(1+(q-1)z))`.
//!
//! Two independent routes compute the same coefficients: expanding the
//! substitution as a polynomial in `z`, and summing Krawtchouk values
//! against the distance distribution. They must agree exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::code::{distance_enumerator, Code};
use crate::error::{Error, Result};
use crate::poly::RationalPolynomial;

/// Pascal triangle of exact binomial coefficients up to row `n`.
#[derive(Clone, Debug)]
pub struct Binomials {
    rows: Vec<Vec<BigInt>>,
}

impl Binomials {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![BigInt::one(); i + 1];
            for k in 1..i {
                row[k] = &rows[i - 1][k - 1] + &rows[i - 1][k];
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    /// `binom(n, k)`, zero outside `0 <= k <= n`.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        self.rows[n][k].clone()
    }
}

/// Krawtchouk value `K_i(j) = sum_s (-1)^s (q-1)^(i-s) binom(j,s) binom(m-j,i-s)`.
pub fn krawtchouk(binom: &Binomials, q: u32, m: usize, i: usize, j: usize) -> BigInt {
    let qm1 = BigInt::from(q - 1);
    (0..=i.min(j))
        .map(|s| {
            let term = num_traits::pow(qm1.clone(), i - s) * binom.get(j, s) * binom.get(m - j, i - s);
            if s % 2 == 1 {
                -term
            } else {
                term
            }
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelsarteSpectrum {
    /// `A_0 .. A_m`.
    pub coefficients: Vec<BigRational>,
    pub all_nonnegative: bool,
    pub min_coefficient: BigRational,
}

impl DelsarteSpectrum {
    fn from_coefficients(coefficients: Vec<BigRational>) -> Self {
        let min_coefficient = coefficients
            .iter()
            .min()
            .cloned()
            .unwrap_or_else(BigRational::zero);
        DelsarteSpectrum {
            all_nonnegative: !min_coefficient.is_negative(),
            min_coefficient,
            coefficients,
        }
    }

    pub fn polynomial(&self) -> RationalPolynomial {
        RationalPolynomial::new(self.coefficients.clone())
    }

    /// `A(z)`.
    pub fn eval(&self, z: &BigRational) -> BigRational {
        self.polynomial().eval(z)
    }

    /// Smallest index with a negative coefficient.
    pub fn first_negative(&self) -> Option<usize> {
        self.coefficients.iter().position(Signed::is_negative)
    }
}

/// Expand `(1/|C|) sum_j B_j (1-z)^j (1+(q-1)z)^(m-j)` as a polynomial in `z`.
pub fn spectrum_by_substitution(code: &Code) -> DelsarteSpectrum {
    let m = code.m();
    let q = code.q() as i64;
    let b = distance_enumerator(code).coefficients();
    let one_minus = RationalPolynomial::from_integers([1i64, -1]);
    let one_plus = RationalPolynomial::from_integers([1i64, q - 1]);

    let mut acc = RationalPolynomial::zero();
    for (j, bj) in b.iter().enumerate() {
        if bj.is_zero() {
            continue;
        }
        let term = &one_minus.pow(j as u32) * &one_plus.pow((m - j) as u32);
        acc = &acc + &term.scale(bj);
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(code.len()));
    let a = acc.scale(&inv);
    DelsarteSpectrum::from_coefficients((0..=m).map(|i| a.coeff(i)).collect())
}

/// `A_i = (1/|C|) sum_j B_j K_i(j)`.
pub fn spectrum_by_krawtchouk(code: &Code) -> DelsarteSpectrum {
    let m = code.m();
    let q = code.q() as u32;
    let binom = Binomials::new(m);
    let b = distance_enumerator(code).coefficients();
    let size = BigRational::from_integer(BigInt::from(code.len()));
    let coefficients = (0..=m)
        .map(|i| {
            let s = b.iter().enumerate().fold(BigRational::zero(), |acc, (j, bj)| {
                acc + bj * BigRational::from_integer(krawtchouk(&binom, q, m, i, j))
            });
            s / &size
        })
        .collect();
    DelsarteSpectrum::from_coefficients(coefficients)
}

/// `(true, None)` when every `A_i >= 0`, else `(false, Some(first bad index))`.
pub fn verify_nonnegativity(code: &Code) -> (bool, Option<usize>) {
    let spec = spectrum_by_substitution(code);
    match spec.first_negative() {
        None => (true, None),
        Some(i) => (false, Some(i)),
    }
}

/// Both routes plus every invariant the spectrum must satisfy.
///
/// Fails with [`Error::Consistency`] if the routes disagree, `A_0 != 1`,
/// `A(1) != q^m/|C|`, or any coefficient is negative.
pub fn checked_spectrum(code: &Code) -> Result<DelsarteSpectrum> {
    let by_sub = spectrum_by_substitution(code);
    let by_kraw = spectrum_by_krawtchouk(code);
    if by_sub != by_kraw {
        return Err(Error::Consistency(format!(
            "spectrum routes disagree for {code}"
        )));
    }
    if by_sub.coefficients[0] != BigRational::one() {
        return Err(Error::Consistency(format!("A_0 != 1 for {code}")));
    }
    let total: BigRational = by_sub.coefficients.iter().cloned().sum();
    let expected = BigRational::new(
        num_traits::pow(BigInt::from(code.q()), code.m()),
        BigInt::from(code.len()),
    );
    if total != expected {
        return Err(Error::Consistency(format!("A(1) != q^m/|C| for {code}")));
    }
    if let Some(i) = by_sub.first_negative() {
        return Err(Error::Consistency(format!(
            "A_{i} = {} < 0 for {code}",
            by_sub.coefficients[i]
        )));
    }
    Ok(by_sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rational(x, 1)).collect()
    }

    #[test]
    fn pascal() {
        let b = Binomials::new(6);
        assert_eq!(b.get(6, 3), BigInt::from(20));
        assert_eq!(b.get(4, 0), BigInt::one());
        assert_eq!(b.get(3, 5), BigInt::zero());
    }

    #[test]
    fn krawtchouk_hand_values() {
        let b = Binomials::new(2);
        // q = 2, m = 2: K_1(j) = 2 - 2j, K_2(j) = 1, -1, 1
        assert_eq!(krawtchouk(&b, 2, 2, 1, 0), BigInt::from(2));
        assert_eq!(krawtchouk(&b, 2, 2, 1, 2), BigInt::from(-2));
        assert_eq!(krawtchouk(&b, 2, 2, 2, 0), BigInt::from(1));
        assert_eq!(krawtchouk(&b, 2, 2, 2, 1), BigInt::from(-1));
        assert_eq!(krawtchouk(&b, 2, 2, 2, 2), BigInt::from(1));
    }

    #[test]
    fn repetition_code_spectrum() {
        let c = Code::from_strs(2, &["00", "11"]).unwrap();
        let s = spectrum_by_substitution(&c);
        assert_eq!(s.coefficients, ints(&[1, 0, 1]));
        assert_eq!(spectrum_by_krawtchouk(&c), s);
        assert_eq!(verify_nonnegativity(&c), (true, None));
        assert_eq!(s.eval(&rational(1, 2)), rational(5, 4));
    }

    #[test]
    fn full_code_collapses() {
        for (q, m) in [(2u8, 1usize), (2, 2), (2, 3), (3, 2)] {
            let c = Code::full(q, m).unwrap();
            let mut want = ints(&[1]);
            want.resize(m + 1, BigRational::zero());
            assert_eq!(spectrum_by_substitution(&c).coefficients, want);
            assert_eq!(spectrum_by_krawtchouk(&c).coefficients, want);
        }
    }

    #[test]
    fn seven_word_code() {
        let c = Code::from_strs(2, &["001", "010", "011", "100", "101", "110", "111"]).unwrap();
        let s = checked_spectrum(&c).unwrap();
        assert_eq!(s.coefficients[0], BigRational::one());
        assert!(s.all_nonnegative);
        assert_eq!(verify_nonnegativity(&c), (true, None));
    }

    #[test]
    fn negative_spectra_are_reported() {
        let s = DelsarteSpectrum::from_coefficients(vec![
            rational(1, 1),
            rational(-1, 3),
            rational(2, 1),
        ]);
        assert!(!s.all_nonnegative);
        assert_eq!(s.first_negative(), Some(1));
        assert_eq!(s.min_coefficient, rational(-1, 3));
    }
}
