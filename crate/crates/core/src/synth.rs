//! Seeded synthetic service repositories.
//!
//! Every service gets 1-5 operations, 0-5 typed inputs and outputs per
//! operation, 0-3 distinct condition tokens from `0..=9` on each pre- and
//! postcondition, one active interval inside a 24 hour window, a shared
//! location and a single person id drawn from `A..=Z`.
//!
//! Services are drawn one after another from a single stream, so a
//! repository of `n` services is a prefix of the repository of `n + k`
//! services with the same seed.

use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Condition, Location, OperationDescription, Parameter, Person, ServiceDescription, StateRecord};

pub use crate::scoring::{derive_concept_sets, ConceptSets};

/// Identity of the random stream recorded in repository headers.
pub const GENERATOR_ID: &str = "rand_chacha::ChaCha8Rng/0.9 seed_from_u64";

/// Location shared by every generated service.
pub const SHARED_LOCATION: Location = Location { lat: 0.0, lon: 0.0, radius_m: 50.0 };

const SECONDS_PER_HOUR: f64 = 3600.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    pub n_services: usize,
    pub ops_per_service: [usize; 2],
    pub inputs_per_op: [usize; 2],
    pub outputs_per_op: [usize; 2],
    pub cond_params_per_op: [usize; 2],
    pub cond_token_range: [u32; 2],
    pub temporal_range_h: [f64; 2],
    pub people_alphabet: Vec<String>,
    pub type_alphabet_size: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n_services: 100,
            ops_per_service: [1, 5],
            inputs_per_op: [0, 5],
            outputs_per_op: [0, 5],
            cond_params_per_op: [0, 3],
            cond_token_range: [0, 9],
            temporal_range_h: [0.0, 24.0],
            people_alphabet: ('A'..='Z').map(String::from).collect(),
            type_alphabet_size: 10,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn with_services(n_services: usize, seed: u64) -> Self {
        GeneratorParams { n_services, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = |name: &str, r: [usize; 2]| {
            if r[0] > r[1] {
                Err(Error::arg(format!("{name} range {r:?} is reversed")))
            } else {
                Ok(())
            }
        };
        ordered("ops_per_service", self.ops_per_service)?;
        ordered("inputs_per_op", self.inputs_per_op)?;
        ordered("outputs_per_op", self.outputs_per_op)?;
        ordered("cond_params_per_op", self.cond_params_per_op)?;
        if self.ops_per_service[0] == 0 {
            return Err(Error::arg("services need at least one operation"));
        }
        let [lo, hi] = self.cond_token_range;
        if lo > hi {
            return Err(Error::arg(format!("cond_token_range {:?} is reversed", self.cond_token_range)));
        }
        if self.cond_params_per_op[1] > (hi - lo) as usize + 1 {
            return Err(Error::arg("more condition tokens per operation than distinct token values"));
        }
        let [t0, t1] = self.temporal_range_h;
        if !(t0 >= 0.0 && t0 < t1 && t1.is_finite()) {
            return Err(Error::arg(format!("temporal_range_h {:?} must satisfy 0 <= lo < hi", self.temporal_range_h)));
        }
        if self.people_alphabet.is_empty() || self.people_alphabet.iter().any(String::is_empty) {
            return Err(Error::arg("people_alphabet must hold non-empty ids"));
        }
        if self.type_alphabet_size == 0 {
            return Err(Error::arg("type_alphabet_size must be positive"));
        }
        Ok(())
    }
}

pub fn service_name(index: usize) -> String {
    format!("s{index:05}")
}

pub fn generate_repository(params: &GeneratorParams) -> Result<Vec<ServiceDescription>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    Ok((0..params.n_services).map(|i| generate_service(&mut rng, params, i)).collect())
}

fn generate_service(rng: &mut ChaCha8Rng, p: &GeneratorParams, index: usize) -> ServiceDescription {
    let n_ops = rng.random_range(p.ops_per_service[0]..=p.ops_per_service[1]);
    let operations = (0..n_ops)
        .map(|j| {
            let inputs = parameters(rng, p, p.inputs_per_op, "in");
            let outputs = parameters(rng, p, p.outputs_per_op, "out");
            let precondition = condition(rng, p);
            let postcondition = condition(rng, p);
            OperationDescription {
                name: format!("op{j}"),
                mode: "one-way".into(),
                inputs,
                outputs,
                precondition,
                postcondition,
                ..Default::default()
            }
        })
        .collect();

    let [lo, hi] = p.temporal_range_h;
    let x: f64 = rng.random_range(lo..=hi);
    let y: f64 = rng.random_range(lo..=hi);
    let (start, end) = if x <= y { (x, y) } else { (y, x) };
    let person = &p.people_alphabet[rng.random_range(0..p.people_alphabet.len())];

    ServiceDescription {
        name: service_name(index),
        description: "simulated service".into(),
        bindings: ["SOAP".to_string()].into_iter().collect(),
        categories: ["simulated".to_string()].into_iter().collect(),
        operations,
        states: vec![StateRecord::active(start * SECONDS_PER_HOUR, end * SECONDS_PER_HOUR, SHARED_LOCATION)],
        people: [Person::new(person.clone())].into_iter().collect(),
    }
}

fn parameters(rng: &mut ChaCha8Rng, p: &GeneratorParams, range: [usize; 2], prefix: &str) -> Vec<Parameter> {
    let n = rng.random_range(range[0]..=range[1]);
    (0..n)
        .map(|m| Parameter::new(format!("{prefix}{m}"), format!("t{}", rng.random_range(0..p.type_alphabet_size))))
        .collect()
}

fn condition(rng: &mut ChaCha8Rng, p: &GeneratorParams) -> Condition {
    let [lo, hi] = p.cond_token_range;
    let width = (hi - lo) as usize + 1;
    let k = rng.random_range(p.cond_params_per_op[0]..=p.cond_params_per_op[1]);
    Condition::from_tokens(index::sample(rng, width, k).into_iter().map(|i| lo + i as u32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepositoryHeader {
    pub generator: String,
    pub seed: u64,
    pub params: GeneratorParams,
}

/// On-disk repository: an optional provenance header and the services.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepositoryFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<RepositoryHeader>,
    pub services: Vec<ServiceDescription>,
}

impl RepositoryFile {
    pub fn generate(params: &GeneratorParams) -> Result<Self> {
        Ok(RepositoryFile {
            header: Some(RepositoryHeader {
                generator: GENERATOR_ID.into(),
                seed: params.seed,
                params: params.clone(),
            }),
            services: generate_repository(params)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("repository always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
