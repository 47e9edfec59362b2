//! Batch toolkit for bibliographic authority control.
//!
//! The crate converts records among library formats (MARC 21 / ISO 2709,
//! MARCXML, Dublin Core, EAD, ISAD-G), selects authorized headings with a
//! weighted rule/case system, clusters variant name forms into VIAF-style
//! authority records, emits them as deterministic Linked Data and validates
//! conversions against an eleven-category error checklist.
//!
//! Modules:
//!
//! - [`record`] — canonical record and heading model, name normalization
//! - [`marc`] — MARC 21 in ISO 2709 binary and MARCXML
//! - [`codecs`] — Dublin Core, EAD and ISAD-G readers/writers
//! - [`crosswalk`] — any-to-any conversion through the canonical pivot
//! - [`rules`] — rule/case system for heading selection and uniform titles
//! - [`cluster`] — blocking, pairwise similarity and union-find clustering
//! - [`lod`] — URI minting, triple graphs, N-Triples and Turtle output
//! - [`validate`] — the error checklist and per-format error report
//! - [`fixtures`] — deterministic sample data used by tests and demos

pub mod cluster;
pub mod codecs;
pub mod crosswalk;
pub mod fixtures;
pub mod lod;
pub mod marc;
pub mod record;
pub mod rules;
pub mod similarity;
pub mod validate;

mod xmlutil;

pub use record::{
    normalize_for_match, parse_personal_name, AuthorityRecord, CanonicalRecord, Heading,
    HeadingKind,
};
