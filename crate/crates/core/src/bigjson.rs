//! Serde helpers that write big integers as JSON numbers when they fit in
//! 64 bits and as decimal strings otherwise. Both forms are accepted on input.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;
use std::str::FromStr;

struct BigVisitor;

impl<'de> Visitor<'de> for BigVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        BigInt::from_str(v.trim()).map_err(E::custom)
    }
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(small) => s.serialize_i64(small),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        d.deserialize_any(BigVisitor)
    }
}

pub mod uint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match v.to_u64() {
            Some(small) => s.serialize_u64(small),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let v = d.deserialize_any(BigVisitor)?;
        v.to_biguint()
            .ok_or_else(|| de::Error::custom("expected a non-negative integer"))
    }
}

pub mod uint_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    #[derive(Deserialize)]
    struct Wrapped(#[serde(with = "super::uint")] BigUint);

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            match n.to_u64() {
                Some(small) => seq.serialize_element(&small)?,
                None => seq.serialize_element(&n.to_string())?,
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}
