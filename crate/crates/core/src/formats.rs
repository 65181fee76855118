//! On-disk vector set format.
//!
//! ```json
//! {"field": "complex", "n": 2, "m": 1, "vectors": [[[0.6, 0.0], [0.0, 0.8]]]}
//! ```
//!
//! Every entry is an `[re, im]` pair, real sets included.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Field, VectorSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSetFile {
    pub field: Field,
    pub n: usize,
    pub m: usize,
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl VectorSetFile {
    pub fn to_vector_set(&self) -> Result<VectorSet> {
        if self.vectors.len() != self.m {
            return Err(Error::Format(format!("header says m={} but {} vectors are present", self.m, self.vectors.len())));
        }
        if let Some((i, v)) = self.vectors.iter().enumerate().find(|(_, v)| v.len() != self.n) {
            return Err(Error::Format(format!("vector {i} has {} entries, header says n={}", v.len(), self.n)));
        }
        let vectors = self
            .vectors
            .iter()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        let vs = VectorSet::new(self.field, vectors)?;
        match &self.labels {
            Some(labels) => vs.with_labels(labels.clone()),
            None => Ok(vs),
        }
    }

    pub fn from_json(text: &str) -> Result<VectorSet> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.to_vector_set()
    }

    pub fn to_json(vs: &VectorSet) -> String {
        serde_json::to_string_pretty(&Self::from(vs)).expect("vector set serializes")
    }
}

impl From<&VectorSet> for VectorSetFile {
    fn from(vs: &VectorSet) -> Self {
        Self {
            field: vs.field(),
            n: vs.n(),
            m: vs.m(),
            vectors: vs.vectors().iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect(),
            labels: vs.labels().map(<[String]>::to_vec),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::random_unit_vectors;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let vs = VectorSetFile::from_json(
            r#"{"field":"complex","n":2,"m":1,"vectors":[[[0.6,0.0],[0.0,0.8]]],"labels":["a"]}"#,
        )
        .unwrap();
        assert_eq!(vs.vector(0), &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        assert_eq!(vs.labels().unwrap(), ["a".to_string()]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            r#"{"field":"complex","n":2,"m":2,"vectors":[[[1,0],[0,0]]]}"#,
            r#"{"field":"complex","n":3,"m":1,"vectors":[[[1,0],[0,0]]]}"#,
            r#"{"field":"real","n":1,"m":1,"vectors":[[[1,1]]]}"#,
            r#"{"field":"real","n":1,"m":1,"vectors":[[[1,0]]],"extra":1}"#,
            r#"{"field":"real","n":1,"m":1,"vectors":[[[NaN,0]]]}"#,
            r#"{"field":"real","n":1,"m":1,"vectors":[[[1e999,0]]]}"#,
            r#"{"field":"quaternion","n":1,"m":1,"vectors":[[[1,0]]]}"#,
        ] {
            assert!(VectorSetFile::from_json(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn json_round_trip(seed in any::<u64>(), m in 1usize..6, n in 1usize..5, real in any::<bool>()) {
            let field = if real { Field::Real } else { Field::Complex };
            let vs = random_unit_vectors(m, n, field, seed).unwrap();
            prop_assert_eq!(VectorSetFile::from_json(&VectorSetFile::to_json(&vs)).unwrap(), vs);
        }
    }
}
