//! Points and tangent vectors of `C^n`, plus the textual complex-number syntax
//! shared by the command line and config files.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A vector of complex coordinates. Serialized as a list of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    pub fn new(coords: Vec<Complex64>) -> Self {
        ComplexVector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        ComplexVector(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn scalar(z: Complex64) -> Self {
        ComplexVector(vec![z])
    }

    pub fn from_reals(re: &[f64]) -> Self {
        ComplexVector(re.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    /// Hermitian product `<z, w> = sum z_j conj(w_j)`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).sum()
    }

    pub fn scale(&self, c: Complex64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| z * c).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex64, other: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Parses a vector of the given dimension.
    ///
    /// With `dim == 1` the whole string is one complex number, so `a,b` reads
    /// as `a + bi`. Otherwise components are separated by `;`, or by `,` when
    /// there is no `;`. A comma list of length `2 * dim` is read as
    /// `re, im` pairs.
    pub fn parse_with_dim(s: &str, dim: usize) -> Result<Self> {
        let s = s.trim();
        if dim == 1 {
            return Ok(ComplexVector::scalar(parse_complex(s)?));
        }
        let parts: Vec<&str> = if s.contains(';') {
            s.split(';').collect()
        } else {
            s.split(',').collect()
        };
        if parts.len() == dim {
            let coords = parts.iter().map(|p| parse_complex(p)).collect::<Result<Vec<_>>>()?;
            return Ok(ComplexVector(coords));
        }
        if parts.len() == 2 * dim && !s.contains(';') {
            let reals = parts
                .iter()
                .map(|p| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{p:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let coords = reals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            return Ok(ComplexVector(coords));
        }
        Err(Error::Parse(format!(
            "expected {dim} complex components in {s:?}, found {}",
            parts.len()
        )))
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;

    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<Complex64> for &ComplexVector {
    type Output = ComplexVector;

    fn mul(self, rhs: Complex64) -> ComplexVector {
        self.scale(rhs)
    }
}

impl From<Complex64> for ComplexVector {
    fn from(z: Complex64) -> Self {
        ComplexVector::scalar(z)
    }
}

impl fmt::Display for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| format_complex(*z)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl FromStr for ComplexVector {
    type Err = Error;

    /// Dimension is inferred: `;`-separated components, otherwise a single
    /// complex number.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains(';') {
            let n = s.split(';').count();
            ComplexVector::parse_with_dim(s, n)
        } else {
            ComplexVector::parse_with_dim(s, 1)
        }
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

/// Parses `a+bi`, `a-bi`, `bi`, `i`, `-i`, `a` or `a,b`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("not a complex number: {s:?}"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some((re, im)) = s.split_once(',') {
        let re = re.parse::<f64>().map_err(|_| err())?;
        let im = im.parse::<f64>().map_err(|_| err())?;
        return Ok(Complex64::new(re, im));
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // Split at the last sign that is not part of an exponent and not leading.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| err())?,
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| err())?
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_syntax() {
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), c(0.5, -0.25));
        assert_eq!(parse_complex("1e-3+2e-2i").unwrap(), c(1e-3, 2e-2));
        assert_eq!(parse_complex("0.3,0.4").unwrap(), c(0.3, 0.4));
        assert_eq!(parse_complex("-2").unwrap(), c(-2.0, 0.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn vector_syntax() {
        let v = ComplexVector::parse_with_dim("0,0", 2).unwrap();
        assert_eq!(v, ComplexVector::zeros(2));
        let v = ComplexVector::parse_with_dim("0.5,0", 2).unwrap();
        assert_eq!(v.0, vec![c(0.5, 0.0), c(0.0, 0.0)]);
        let v = ComplexVector::parse_with_dim("0.1+0.2i;0.3", 2).unwrap();
        assert_eq!(v.0, vec![c(0.1, 0.2), c(0.3, 0.0)]);
        let v = ComplexVector::parse_with_dim("0.1,0.2,0.3,0.4", 2).unwrap();
        assert_eq!(v.0, vec![c(0.1, 0.2), c(0.3, 0.4)]);
        let v = ComplexVector::parse_with_dim("0.3,0.4", 1).unwrap();
        assert_eq!(v.0, vec![c(0.3, 0.4)]);
        assert!(ComplexVector::parse_with_dim("1,2,3", 2).is_err());
    }

    #[test]
    fn json_is_list_of_pairs() {
        let v = ComplexVector(vec![c(1.0, -2.0)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[[1.0,-2.0]]");
    }
}
