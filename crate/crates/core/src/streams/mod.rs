//! Stream sources: schemas and encoding, synthetic generators, CSV loading.

mod csv;
mod generators;
pub mod rng;
mod schema;

pub use self::csv::{load_csv, ColumnSpec, CsvSchema, CsvStream};
pub use generators::{
    sea_concept, GaussianParams, Generator, GeneratorConfig, GeneratorKind, HyperplaneParams, RandomTreeParams,
    RbfParams, SeaParams,
};
pub use schema::{AttrValue, Attribute, AttributeKind, StreamSchema};

use crate::error::Result;
use crate::instance_base::Instance;

/// A source of labeled instances sharing one schema.
pub trait InstanceStream {
    fn schema(&self) -> &StreamSchema;

    /// `None` once a finite stream is exhausted.
    fn next_instance(&mut self) -> Option<Result<Instance>>;
}
