//! JSON complex files: `{"vertices": n, "simplices": [[v0, ...], ...], "action": {...}}`.

use super::{SimplicialComplex, SimplicialGroupAction};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionFile {
    pub order: usize,
    pub generator: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub vertices: usize,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionFile>,
}

impl ComplexFile {
    /// Writes the facets in sorted order so the file is deterministic.
    pub fn from_complex(k: &SimplicialComplex, action: Option<ActionFile>) -> Self {
        let mut simplices = k.facets();
        simplices.sort();
        Self { vertices: k.n_vertices(), simplices, action }
    }

    /// The complex is the closure of the listed simplices.
    pub fn complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_facets(self.vertices, &self.simplices)
    }

    pub fn group_action(&self, k: &SimplicialComplex) -> Result<Option<SimplicialGroupAction>> {
        self.action
            .as_ref()
            .map(|a| SimplicialGroupAction::new(k, std::slice::from_ref(&a.generator), Some(a.order)))
            .transpose()
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::lens_join;

    #[test]
    fn roundtrip_with_action() {
        let (k, g) = lens_join(3, 1);
        let f = ComplexFile::from_complex(&k, Some(ActionFile { order: 3, generator: g }));
        let back = ComplexFile::parse(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let k2 = back.complex().unwrap();
        assert_eq!(k2, k);
        assert_eq!(back.group_action(&k2).unwrap().unwrap().order(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ComplexFile::parse(r#"{"vertices": 2, "simplices": [[0,1]], "extra": 1}"#).is_err());
    }
}
