//! Serde adapters that write maps keyed by group elements as `[key, value]`
//! sequences, since JSON object keys must be strings.

use std::collections::BTreeMap;

use serde::de::{Deserialize, Deserializer};
use serde::ser::{Serialize, Serializer};

pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter())
}

pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
where
    K: Deserialize<'de> + Ord,
    V: Deserialize<'de>,
    D: Deserializer<'de>,
{
    Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
}

pub mod option {
    use super::*;

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(
        m: &Option<BTreeMap<K, V>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        m.as_ref().map(|m| m.iter().collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<Option<BTreeMap<K, V>>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Option::<Vec<(K, V)>>::deserialize(d)?.map(|v| v.into_iter().collect()))
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &[BTreeMap<K, V>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|m| m.iter().collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<Vec<BTreeMap<K, V>>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<Vec<(K, V)>>::deserialize(d)?.into_iter().map(|v| v.into_iter().collect()).collect())
    }
}
