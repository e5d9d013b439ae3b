//! JSON form of a series:
//! `{"ell": 3, "truncation": 12, "a": {"4": [re, im]}, "b": {"3": [re, im]}}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HarmonicSeries;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    ell: u32,
    truncation: u32,
    #[serde(default)]
    a: BTreeMap<u32, [f64; 2]>,
    #[serde(default)]
    b: BTreeMap<u32, [f64; 2]>,
}

fn to_pairs(table: &BTreeMap<u32, Complex64>) -> BTreeMap<u32, [f64; 2]> {
    table.iter().map(|(&k, c)| (k, [c.re, c.im])).collect()
}

fn from_pairs(table: BTreeMap<u32, [f64; 2]>) -> BTreeMap<u32, Complex64> {
    table
        .into_iter()
        .map(|(k, [re, im])| (k, Complex64::new(re, im)))
        .collect()
}

impl Serialize for HarmonicSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawSeries {
            ell: self.ell,
            truncation: self.truncation,
            a: to_pairs(&self.a),
            b: to_pairs(&self.b),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HarmonicSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSeries::deserialize(deserializer)?;
        HarmonicSeries::new(raw.ell, raw.truncation, from_pairs(raw.a), from_pairs(raw.b))
            .map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a complex number as `[re, im]`.
pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }

    pub mod option {
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
            z.map(|z| [z.re, z.im]).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
            Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| Complex64::new(re, im)))
        }
    }
}
