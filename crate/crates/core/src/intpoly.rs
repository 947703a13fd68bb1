//! Integer-valued polynomials in one variable.
//!
//! A polynomial is stored in the binomial basis, `p(n) = Σ c_j·C(n, j)`, with
//! integer coefficients. A polynomial with rational coefficients takes integer
//! values on all integers exactly when its binomial-basis coefficients are all
//! integers, so membership is a structural property of the representation.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntPolyError {
    #[error("not an integral polynomial: binomial coefficient {index} is {value}")]
    NotIntegralPolynomial { index: usize, value: BigRational },
    #[error("parse error at column {column}: unexpected {token:?} ({reason})")]
    Parse {
        token: String,
        column: usize,
        reason: &'static str,
    },
}

/// `C(n, k)` for any integer `n` (negative `n` uses the falling-factorial definition).
pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = C(n, i) here; C(n, i+1) = C(n, i)·(n − i)/(i + 1) is exact.
        acc *= n - BigInt::from(i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// A polynomial mapping integers to integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntegralPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegralPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_binomial(vec![c.into()])
    }

    /// `n^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        Self::from_monomials(&coeffs).expect("n^k is integer valued")
    }

    /// `c·n^k` with integer `c`.
    pub fn term(c: i64, k: usize) -> Self {
        Self::monomial(k).scale(&BigInt::from(c))
    }

    /// Builds from binomial-basis coefficients, dropping trailing zeros.
    pub fn from_binomial(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_binomial_i64(coeffs: &[i64]) -> Self {
        Self::from_binomial(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Converts monomial-basis coefficients `a_0 + a_1 n + …` to the binomial basis.
    ///
    /// The binomial coefficients are the forward differences `Δ^j p(0)`.
    pub fn from_monomials(coeffs: &[BigRational]) -> Result<Self, IntPolyError> {
        let k = coeffs.len();
        let mut values: Vec<BigRational> = (0..k)
            .map(|n| {
                let n = BigRational::from_integer(BigInt::from(n));
                coeffs
                    .iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, c| acc * &n + c)
            })
            .collect();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let head = values[0].clone();
            if !head.is_integer() {
                return Err(IntPolyError::NotIntegralPolynomial {
                    index: j,
                    value: head,
                });
            }
            out.push(head.to_integer());
            for i in 0..values.len() - 1 {
                values[i] = &values[i + 1] - &values[i];
            }
            values.pop();
        }
        Ok(Self::from_binomial(out))
    }

    pub fn from_monomials_i64(coeffs: &[i64]) -> Self {
        let coeffs: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        Self::from_monomials(&coeffs).expect("integer coefficients give an integral polynomial")
    }

    /// Monomial-basis coefficients, lowest degree first, without trailing zeros.
    pub fn to_monomials(&self) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        // falling[j] holds the integer coefficients of n(n−1)…(n−j+1).
        let mut falling = vec![BigInt::one()];
        let mut factorial = BigInt::one();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                factorial *= BigInt::from(j);
                let shift = BigInt::from(j - 1);
                let mut next = vec![BigInt::zero(); falling.len() + 1];
                for (i, a) in falling.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * &shift;
                }
                falling = next;
            }
            if c.is_zero() {
                continue;
            }
            for (i, a) in falling.iter().enumerate() {
                out[i] += BigRational::new(a * c, factorial.clone());
            }
        }
        out
    }

    pub fn binomial_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial at −1.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() <= 0
    }

    /// All exponents of degree at most one: `p(n + m) = p(n) + p(m) − p(0)`.
    pub fn is_affine(&self) -> bool {
        self.degree() <= 1
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    /// Leading coefficient in the monomial basis.
    pub fn leading_coefficient(&self) -> Option<BigRational> {
        let k = self.coeffs.len().checked_sub(1)?;
        let factorial: BigInt = (1..=k).map(BigInt::from).product();
        Some(BigRational::new(self.coeffs[k].clone(), factorial))
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut basis = BigInt::one();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                basis *= n - BigInt::from(j - 1);
                basis /= BigInt::from(j);
            }
            acc += c * &basis;
        }
        acc
    }

    pub fn eval_i64(&self, n: i64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// `p(n)` as an `i64`, or `None` when the value does not fit.
    pub fn eval_small(&self, n: i64) -> Option<i64> {
        self.eval_i64(n).to_i64()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_binomial(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `q(n) = p(n + m) − p(m) − p(n)`.
    ///
    /// Uses Vandermonde's identity `C(n + m, j) = Σ_i C(m, j − i)·C(n, i)`, so the
    /// coefficient of `C(n, i)` in `p(n + m)` is `Σ_{j ≥ i} c_j·C(m, j − i)`.
    pub fn shift_diff(&self, m: &BigInt) -> Self {
        let k = self.coeffs.len();
        let binoms: Vec<BigInt> = (0..k).map(|t| binomial(m, t)).collect();
        let mut out = vec![BigInt::zero(); k];
        for (i, slot) in out.iter_mut().enumerate() {
            for j in i..k {
                *slot += &self.coeffs[j] * &binoms[j - i];
            }
            *slot -= &self.coeffs[i];
        }
        if let Some(c0) = out.first_mut() {
            *c0 -= self.eval(m);
        }
        Self::from_binomial(out)
    }

    pub fn shift_diff_i64(&self, m: i64) -> Self {
        self.shift_diff(&BigInt::from(m))
    }

    /// `p(n + m) − p(m)` as a polynomial in `n`.
    pub fn translate_vanishing(&self, m: &BigInt) -> Self {
        let k = self.coeffs.len();
        let mut out = vec![BigInt::zero(); k];
        for (i, slot) in out.iter_mut().enumerate() {
            for j in i..k {
                *slot += &self.coeffs[j] * binomial(m, j - i);
            }
        }
        if let Some(c0) = out.first_mut() {
            *c0 -= self.eval(m);
        }
        Self::from_binomial(out)
    }

    /// `p − p(0)`.
    pub fn zero_normalized(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        if let Some(c0) = coeffs.first_mut() {
            *c0 = BigInt::zero();
        }
        Self::from_binomial(coeffs)
    }
}

/// `p − q` is not constant.
pub fn essentially_distinct(p: &IntegralPolynomial, q: &IntegralPolynomial) -> bool {
    (p - q).degree() >= 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub degree: isize,
    pub is_constant: bool,
    pub essentially_distinct: bool,
    pub zero_normalized: IntegralPolynomial,
}

/// Degree facts about `p`, plus whether `p` and `q` differ by a nonconstant.
pub fn classify(p: &IntegralPolynomial, q: &IntegralPolynomial) -> Classification {
    Classification {
        degree: p.degree(),
        is_constant: p.is_constant(),
        essentially_distinct: essentially_distinct(p, q),
        zero_normalized: p.zero_normalized(),
    }
}

impl Add for &IntegralPolynomial {
    type Output = IntegralPolynomial;

    fn add(self, rhs: Self) -> IntegralPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_default();
                match rhs.coeffs.get(i) {
                    Some(b) => a + b,
                    None => a,
                }
            })
            .collect();
        IntegralPolynomial::from_binomial(coeffs)
    }
}

impl Sub for &IntegralPolynomial {
    type Output = IntegralPolynomial;

    fn sub(self, rhs: Self) -> IntegralPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &IntegralPolynomial {
    type Output = IntegralPolynomial;

    fn neg(self) -> IntegralPolynomial {
        IntegralPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Neg for IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn neg(self) -> Self {
        -&self
    }
}

impl fmt::Display for IntegralPolynomial {
    /// Monomial form, highest degree first: `n^2 + 3n`, `1/2n^2 - 1/2n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = self.to_monomials();
        let mut first = true;
        for (k, c) in mono.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if k == 0 || !abs.is_one() {
                write!(f, "{}", abs.numer())?;
                if !abs.is_integer() {
                    write!(f, "/{}", abs.denom())?;
                }
            }
            match k {
                0 => {}
                1 => f.write_str("n")?,
                _ => write!(f, "n^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntegralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegralPolynomial({self})")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var,
    Caret,
    Slash,
    Star,
    Plus,
    Minus,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize, String)>, IntPolyError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        let column = pos + 1;
        match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let value = text.parse::<BigInt>().expect("digits parse");
                out.push((Tok::Int(value), column, text));
                continue;
            }
            'n' => out.push((Tok::Var, column, "n".into())),
            '^' => out.push((Tok::Caret, column, "^".into())),
            '/' => out.push((Tok::Slash, column, "/".into())),
            '*' => out.push((Tok::Star, column, "*".into())),
            '+' => out.push((Tok::Plus, column, "+".into())),
            '-' => out.push((Tok::Minus, column, "-".into())),
            other => {
                return Err(IntPolyError::Parse {
                    token: other.to_string(),
                    column,
                    reason: "unknown character",
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, String)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn error(&self, reason: &'static str) -> IntPolyError {
        match self.toks.get(self.pos) {
            Some((_, column, text)) => IntPolyError::Parse {
                token: text.clone(),
                column: *column,
                reason,
            },
            None => IntPolyError::Parse {
                token: "end of input".into(),
                column: self.end_column,
                reason,
            },
        }
    }

    fn int(&mut self, reason: &'static str) -> Result<BigInt, IntPolyError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error(reason)),
        }
    }

    fn divisor(&mut self) -> Result<BigInt, IntPolyError> {
        let d = self.int("expected an integer denominator")?;
        if d.is_zero() {
            self.pos -= 1;
            return Err(self.error("zero denominator"));
        }
        Ok(d)
    }

    /// term := [int ['/' int]] ['*'] ['n' ['^' int]] ['/' int]
    fn term(&mut self) -> Result<(BigRational, usize), IntPolyError> {
        let mut coeff = BigRational::one();
        let mut seen = false;
        if let Some(Tok::Int(_)) = self.peek() {
            let num = self.int("expected a coefficient")?;
            let mut den = BigInt::one();
            if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                den = self.divisor()?;
            }
            coeff = BigRational::new(num, den);
            seen = true;
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                if self.peek() != Some(&Tok::Var) {
                    return Err(self.error("expected n after *"));
                }
            }
        }
        let mut power = 0usize;
        if self.peek() == Some(&Tok::Var) {
            self.pos += 1;
            seen = true;
            power = 1;
            if self.peek() == Some(&Tok::Caret) {
                self.pos += 1;
                let e = self.int("expected an integer exponent")?;
                power = e.to_usize().filter(|&e| e <= 64).ok_or_else(|| {
                    self.pos -= 1;
                    self.error("exponent out of range")
                })?;
            }
            if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                let d = self.divisor()?;
                coeff /= BigRational::from_integer(d);
            }
        }
        if !seen {
            return Err(self.error("expected a term"));
        }
        Ok((coeff, power))
    }

    fn expr(&mut self) -> Result<Vec<BigRational>, IntPolyError> {
        let mut coeffs: Vec<BigRational> = Vec::new();
        let mut sign = BigRational::one();
        match self.peek() {
            Some(Tok::Minus) => {
                sign = -sign;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        loop {
            let (c, k) = self.term()?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigRational::zero());
            }
            coeffs[k] += sign * c;
            match self.peek() {
                None => break,
                Some(Tok::Plus) => sign = BigRational::one(),
                Some(Tok::Minus) => sign = -BigRational::one(),
                Some(_) => return Err(self.error("expected + or -")),
            }
            self.pos += 1;
        }
        Ok(coeffs)
    }
}

/// Parses monomial syntax into rational coefficients without the integrality check.
pub fn parse_monomials(src: &str) -> Result<Vec<BigRational>, IntPolyError> {
    let toks = tokenize(src)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end_column: src.len() + 1,
    };
    parser.expr()
}

impl FromStr for IntegralPolynomial {
    type Err = IntPolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_monomials(&parse_monomials(s)?)
    }
}
