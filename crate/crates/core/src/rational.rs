//! Exact rational helpers over `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qv(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

/// Parses `"3/7"`, `"-2"`, or a finite decimal such as `"0.25"` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_abs = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_abs.is_empty() { "0" } else { int_abs }, frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Q::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_to_f64(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::Invalid(format!("non-finite value {x}")))
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Positive rescaling of `v` to coprime integers; zero stays zero.
pub fn primitive(v: &[Q]) -> QVec {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

pub fn neg_vec(v: &[Q]) -> QVec {
    v.iter().map(|x| -x).collect()
}

pub fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Serde adapter that writes a rational as a string and reads strings, integers or floats.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(i) => Ok(Rat(q(i))),
            Raw::F(f) => from_f64(f).map(Rat).map_err(serde::de::Error::custom),
            Raw::S(s) => parse_q(&s).map(Rat).map_err(serde::de::Error::custom),
        }
    }
}

pub fn wrap_vec(v: &[Q]) -> Vec<Rat> {
    v.iter().cloned().map(Rat).collect()
}

pub fn unwrap_vec(v: &[Rat]) -> QVec {
    v.iter().map(|r| r.0.clone()).collect()
}

pub fn wrap_mat(m: &[QVec]) -> Vec<Vec<Rat>> {
    m.iter().map(|r| wrap_vec(r)).collect()
}

pub fn unwrap_mat(m: &[Vec<Rat>]) -> Vec<QVec> {
    m.iter().map(|r| unwrap_vec(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_q("3/7").unwrap(), qf(3, 7));
        assert_eq!(parse_q("-2").unwrap(), q(-2));
        assert_eq!(parse_q("0.25").unwrap(), qf(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), qf(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn primitive_scales_to_coprime_integers() {
        assert_eq!(primitive(&[qf(1, 2), q(1)]), qv(&[1, 2]));
        assert_eq!(primitive(&[q(0), q(-4), q(-2)]), qv(&[0, -2, -1]));
        assert_eq!(primitive(&qv(&[0, 0])), qv(&[0, 0]));
    }

    #[test]
    fn rat_round_trip() {
        let v = wrap_vec(&[qf(-3, 7), q(2)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-3/7","2"]"#);
        let back: Vec<Rat> = serde_json::from_str(r#"["-3/7", 2, 0.5]"#).unwrap();
        assert_eq!(unwrap_vec(&back), vec![qf(-3, 7), q(2), qf(1, 2)]);
    }
}
