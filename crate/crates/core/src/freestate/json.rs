//! JSON forms. Complex numbers are `[re, im]` pairs; matrices are flat
//! row-major lists of `dim * dim` pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{
    CMatrix, CVector, ClassicalFreestate, DensityMatrix, Effect, Freestate, FreestateError, PureState, C64,
};

fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn pairs_to_matrix(dim: usize, pairs: &[[f64; 2]]) -> Result<CMatrix, FreestateError> {
    if dim == 0 {
        return Err(FreestateError::ZeroDimension);
    }
    if pairs.len() != dim * dim {
        return Err(FreestateError::BadEntries { len: pairs.len(), dim });
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = pairs[i * dim + j];
        C64::new(re, im)
    }))
}

pub(super) fn serialize_matrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    MatrixWire {
        dim: m.nrows(),
        entries: matrix_to_pairs(m),
    }
    .serialize(s)
}

pub(super) fn serialize_vector<S: Serializer>(psi: &PureState, s: S) -> Result<S::Ok, S::Error> {
    psi.serialize(s)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixWire {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreestateWire {
    dim: usize,
    generators: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalWire {
    n: usize,
    generators: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureWire {
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for Freestate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FreestateWire {
            dim: self.dim,
            generators: self.generators.iter().map(|g| matrix_to_pairs(g.matrix())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Freestate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = FreestateWire::deserialize(d)?;
        let parse = || -> Result<Freestate, FreestateError> {
            let generators = w
                .generators
                .iter()
                .map(|g| DensityMatrix::new(pairs_to_matrix(w.dim, g)?))
                .collect::<Result<Vec<_>, _>>()?;
            let s = Freestate::new(generators)?;
            super::check_dim(w.dim, s.dim)?;
            Ok(s)
        };
        parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for ClassicalFreestate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ClassicalWire {
            n: self.n,
            generators: self.generators.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassicalFreestate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = ClassicalWire::deserialize(d)?;
        let s = ClassicalFreestate::new(w.generators).map_err(serde::de::Error::custom)?;
        super::check_dim(w.n, s.n).map_err(serde::de::Error::custom)?;
        Ok(s)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_matrix(self.matrix(), s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        pairs_to_matrix(w.dim, &w.entries)
            .and_then(DensityMatrix::new)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for Effect {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_matrix(self.matrix(), s)
    }
}

impl<'de> Deserialize<'de> for Effect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        pairs_to_matrix(w.dim, &w.entries)
            .and_then(Effect::new)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PureWire {
            amplitudes: self.0.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = PureWire::deserialize(d)?;
        let v = CVector::from_iterator(w.amplitudes.len(), w.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)));
        PureState::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn freestate_round_trip() {
        let s = Freestate::full_qubit();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with("{\"dim\":2,\"generators\":[[[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]"));
        let back: Freestate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn classical_round_trip_and_strictness() {
        let json = r#"{"n":2,"generators":[[0.9,0.1],[0.5,0.5]]}"#;
        let s: ClassicalFreestate = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), json);
        assert!(serde_json::from_str::<ClassicalFreestate>(r#"{"n":2,"generators":[[0.9,0.1]],"x":1}"#).is_err());
        assert!(serde_json::from_str::<ClassicalFreestate>(r#"{"n":3,"generators":[[0.9,0.1]]}"#).is_err());
    }

    #[test]
    fn invalid_generators_are_rejected() {
        let bad = r#"{"dim":2,"generators":[[[1.5,0],[0,0],[0,0],[-0.5,0]]]}"#;
        let err = serde_json::from_str::<Freestate>(bad).unwrap_err().to_string();
        assert!(err.contains("positive semidefinite"), "{err}");
        let short = r#"{"dim":2,"generators":[[[1,0]]]}"#;
        assert!(serde_json::from_str::<Freestate>(short).is_err());
    }

    #[test]
    fn pure_and_effect_forms() {
        let psi: PureState = serde_json::from_str(r#"{"amplitudes":[[0.6,0],[0,0.8]]}"#).unwrap();
        assert_eq!(psi.dim(), 2);
        let e: Effect = serde_json::from_str(r#"{"dim":2,"entries":[[1,0],[0,0],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(e, Effect::projector(&PureState::basis(2, 0)));
    }
}
