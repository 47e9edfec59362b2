//! Linked Data emission: URI minting, triple graphs, deterministic
//! N-Triples and Turtle serializers.
//!
//! Vocabulary is fixed to the four namespaces the authority graphs use:
//! FOAF (names), DC elements (titles), OWL (sameAs) and SKOS (prefLabel).
//! Output is byte-deterministic: graphs are sets, N-Triples lines are
//! sorted, Turtle groups subjects and fixes predicate order.

use crate::record::{heading_display, AuthorityRecord};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const FOAF_NAME: &str = "http://xmlns.com/foaf/0.1/name";
pub const DC_TITLE: &str = "http://purl.org/dc/elements/1.1/title";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LodError {
    #[error("invalid base URI {0:?}: must be absolute http(s) with a host")]
    InvalidBase(String),
    #[error("invalid language tag {0:?}")]
    BadLanguageTag(String),
    #[error("invalid IRI {0:?}")]
    BadIri(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Object {
    Uri(String),
    Literal { value: String, lang: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Object,
}

fn check_iri(iri: &str) -> Result<(), LodError> {
    let ok = (iri.starts_with("http://") || iri.starts_with("https://"))
        && !iri.chars().any(|c| c.is_whitespace() || c == '<' || c == '>' || c == '"');
    if ok {
        Ok(())
    } else {
        Err(LodError::BadIri(iri.to_string()))
    }
}

fn check_lang(tag: &str) -> Result<(), LodError> {
    let mut parts = tag.split('-');
    let primary = parts.next().unwrap_or("");
    let primary_ok =
        (1..=8).contains(&primary.len()) && primary.bytes().all(|b| b.is_ascii_alphabetic());
    let rest_ok = parts.all(|p| {
        (1..=8).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_alphanumeric())
    });
    if primary_ok && rest_ok {
        Ok(())
    } else {
        Err(LodError::BadLanguageTag(tag.to_string()))
    }
}

impl Triple {
    pub fn uri(subject: &str, predicate: &str, object: &str) -> Result<Triple, LodError> {
        check_iri(subject)?;
        check_iri(predicate)?;
        check_iri(object)?;
        Ok(Triple {
            subject: subject.to_string(),
            predicate: predicate.to_string(),
            object: Object::Uri(object.to_string()),
        })
    }

    pub fn literal(
        subject: &str,
        predicate: &str,
        value: &str,
        lang: Option<&str>,
    ) -> Result<Triple, LodError> {
        check_iri(subject)?;
        check_iri(predicate)?;
        if let Some(l) = lang {
            check_lang(l)?;
        }
        Ok(Triple {
            subject: subject.to_string(),
            predicate: predicate.to_string(),
            object: Object::Literal { value: value.to_string(), lang: lang.map(str::to_string) },
        })
    }
}

/// A set of triples under one base URI. Duplicate inserts are no-ops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleGraph {
    base_uri: String,
    triples: BTreeSet<Triple>,
}

impl TripleGraph {
    pub fn new(base_uri: &str) -> Result<TripleGraph, LodError> {
        validate_base(base_uri)?;
        Ok(TripleGraph {
            base_uri: base_uri.trim_end_matches('/').to_string(),
            triples: BTreeSet::new(),
        })
    }

    pub fn base_uri(&self) -> &str {
        &self.base_uri
    }

    pub fn insert(&mut self, t: Triple) {
        self.triples.insert(t);
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn triple_set(&self) -> &BTreeSet<Triple> {
        &self.triples
    }
}

fn validate_base(base: &str) -> Result<(), LodError> {
    let rest = base
        .strip_prefix("http://")
        .or_else(|| base.strip_prefix("https://"))
        .ok_or_else(|| LodError::InvalidBase(base.to_string()))?;
    let host = rest.split('/').next().unwrap_or("");
    if host.is_empty() {
        return Err(LodError::InvalidBase(base.to_string()));
    }
    Ok(())
}

/// Percent-encode a path segment (RFC 3986 pchar set, minus sub-delims we
/// do not need; unreserved chars pass through).
pub fn percent_encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => {
                out.push(b as char)
            }
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

/// Mint the authority's URI: base + "/authority/" + percent-encoded id.
/// Stable across runs; http(s) bases only.
pub fn mint_uri(a: &AuthorityRecord, base: &str) -> Result<String, LodError> {
    validate_base(base)?;
    Ok(format!(
        "{}/authority/{}",
        base.trim_end_matches('/'),
        percent_encode_segment(&a.authority_id)
    ))
}

/// Build the authority's graph: skos:prefLabel plus one foaf:name per
/// authorized-or-variant form, one dc:title per linked title, one
/// owl:sameAs per link. Triple count is therefore
/// variants + 1 + titles + sameAs + 1 (unique forms; the set dedupes).
pub fn build_graph(a: &AuthorityRecord, base: &str) -> Result<TripleGraph, LodError> {
    let mut g = TripleGraph::new(base)?;
    let subject = mint_uri(a, base)?;
    let authorized = heading_display(&a.authorized);
    g.insert(Triple::literal(&subject, SKOS_PREF_LABEL, &authorized, None)?);
    g.insert(Triple::literal(&subject, FOAF_NAME, &authorized, None)?);
    for v in &a.variants {
        g.insert(Triple::literal(&subject, FOAF_NAME, &heading_display(&v.heading), None)?);
    }
    for t in &a.linked_titles {
        g.insert(Triple::literal(&subject, DC_TITLE, &t.title, None)?);
    }
    for link in &a.same_as {
        g.insert(Triple::uri(&subject, OWL_SAME_AS, link)?);
    }
    Ok(g)
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn render_object(o: &Object) -> String {
    match o {
        Object::Uri(u) => format!("<{u}>"),
        Object::Literal { value, lang } => match lang {
            Some(l) => format!("\"{}\"@{l}", escape_literal(value)),
            None => format!("\"{}\"", escape_literal(value)),
        },
    }
}

/// N-Triples: one triple per line, lexicographically sorted, LF-terminated.
pub fn serialize_ntriples(g: &TripleGraph) -> String {
    let mut lines: Vec<String> = g
        .iter()
        .map(|t| format!("<{}> <{}> {} .", t.subject, t.predicate, render_object(&t.object)))
        .collect();
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

const TURTLE_PREFIXES: [(&str, &str); 4] = [
    ("dc", "http://purl.org/dc/elements/1.1/"),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("skos", "http://www.w3.org/2004/02/skos/core#"),
];

fn turtle_predicate(p: &str) -> String {
    for (prefix, ns) in TURTLE_PREFIXES {
        if let Some(local) = p.strip_prefix(ns) {
            if !local.is_empty() && local.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return format!("{prefix}:{local}");
            }
        }
    }
    format!("<{p}>")
}

fn predicate_rank(p: &str) -> usize {
    match p {
        SKOS_PREF_LABEL => 0,
        FOAF_NAME => 1,
        DC_TITLE => 2,
        OWL_SAME_AS => 3,
        _ => 4,
    }
}

/// Turtle: fixed prefix block, subjects grouped and sorted, predicates in
/// fixed order (prefLabel, name, title, sameAs, then others), objects
/// sorted.
pub fn serialize_turtle(g: &TripleGraph) -> String {
    let mut out = String::new();
    for (prefix, ns) in TURTLE_PREFIXES {
        out.push_str(&format!("@prefix {prefix}: <{ns}> .\n"));
    }
    // subject -> predicate -> objects
    let mut by_subject: BTreeMap<&str, BTreeMap<&str, BTreeSet<&Object>>> = BTreeMap::new();
    for t in g.iter() {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry(&t.predicate)
            .or_default()
            .insert(&t.object);
    }
    for (subject, predicates) in by_subject {
        out.push('\n');
        out.push_str(&format!("<{subject}>"));
        let mut preds: Vec<(&str, &BTreeSet<&Object>)> =
            predicates.iter().map(|(p, o)| (*p, o)).collect();
        preds.sort_by_key(|(p, _)| (predicate_rank(p), p.to_string()));
        let last_pred = preds.len() - 1;
        for (pi, (p, objects)) in preds.iter().enumerate() {
            let objs: Vec<String> = objects.iter().map(|o| render_object(o)).collect();
            out.push_str(&format!("\n  {} {}", turtle_predicate(p), objs.join(",\n    ")));
            out.push_str(if pi == last_pred { " ." } else { " ;" });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Heading, LinkedTitle, VariantHeading};

    fn small_authority() -> AuthorityRecord {
        AuthorityRecord {
            authority_id: "29541084".into(),
            authorized: Heading::personal("Chekhov", Some("Anton Pavlovich"), Some((1860, Some(1904)))),
            variants: vec![VariantHeading {
                heading: Heading::personal("Chehov", Some("Anton Pavlovich"), Some((1860, Some(1904)))),
                source_agency: "BNE".into(),
            }],
            non_bibliographic: Vec::new(),
            linked_titles: vec![LinkedTitle { title: "Вишнёвый сад".into(), occurrence_count: 3 }],
            same_as: vec!["http://dbpedia.org".into()],
        }
    }

    #[test]
    fn mint_uri_is_stable_and_percent_encoded() {
        let a = small_authority();
        let uri = mint_uri(&a, "http://example.org").unwrap();
        assert_eq!(uri, "http://example.org/authority/29541084");
        assert_eq!(uri, mint_uri(&a, "http://example.org/").unwrap());

        let mut spaced = small_authority();
        spaced.authority_id = "id with space".into();
        assert_eq!(
            mint_uri(&spaced, "http://example.org").unwrap(),
            "http://example.org/authority/id%20with%20space"
        );
    }

    #[test]
    fn non_http_base_is_rejected() {
        let a = small_authority();
        assert_eq!(
            mint_uri(&a, "ftp://x"),
            Err(LodError::InvalidBase("ftp://x".into()))
        );
        assert!(mint_uri(&a, "http://").is_err());
    }

    #[test]
    fn graph_counts_follow_the_formula() {
        // variants(1) + authorized name(1) + prefLabel(1) + titles(1) + sameAs(1)
        let g = build_graph(&small_authority(), "http://example.org").unwrap();
        assert_eq!(g.len(), 5);

        let mut bare = small_authority();
        bare.variants.clear();
        bare.linked_titles.clear();
        bare.same_as.clear();
        let g = build_graph(&bare, "http://example.org").unwrap();
        assert_eq!(g.len(), 2); // prefLabel + name
    }

    #[test]
    fn duplicate_variant_strings_deduplicate() {
        let mut a = small_authority();
        a.variants.push(a.variants[0].clone());
        let g = build_graph(&a, "http://example.org").unwrap();
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn ntriples_lines_are_sorted_and_escaped() {
        let mut g = TripleGraph::new("http://example.org").unwrap();
        g.insert(
            Triple::literal("http://example.org/a", DC_TITLE, "say \"hi\"\n", None).unwrap(),
        );
        g.insert(Triple::uri("http://example.org/a", OWL_SAME_AS, "http://dbpedia.org").unwrap());
        let nt = serialize_ntriples(&g);
        let lines: Vec<&str> = nt.lines().collect();
        assert_eq!(lines.len(), 2);
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(lines, sorted);
        assert!(nt.contains("\\\"hi\\\"\\n"));
        assert!(nt.ends_with('\n'));
    }

    #[test]
    fn empty_graph_serializations() {
        let g = TripleGraph::new("http://example.org").unwrap();
        assert_eq!(serialize_ntriples(&g), "");
        let ttl = serialize_turtle(&g);
        assert_eq!(ttl.lines().count(), 4);
        assert!(ttl.lines().all(|l| l.starts_with("@prefix")));
    }

    #[test]
    fn determinism_across_runs() {
        let a = small_authority();
        let g1 = build_graph(&a, "http://example.org").unwrap();
        let g2 = build_graph(&a, "http://example.org").unwrap();
        assert_eq!(serialize_ntriples(&g1), serialize_ntriples(&g2));
        assert_eq!(serialize_turtle(&g1), serialize_turtle(&g2));
    }

    #[test]
    fn bad_language_tag_is_rejected() {
        assert!(Triple::literal("http://x.org/s", DC_TITLE, "t", Some("en")).is_ok());
        assert!(Triple::literal("http://x.org/s", DC_TITLE, "t", Some("en-GB")).is_ok());
        assert!(matches!(
            Triple::literal("http://x.org/s", DC_TITLE, "t", Some("9x-")),
            Err(LodError::BadLanguageTag(_))
        ));
    }

    #[test]
    fn minted_uris_are_injective_on_ids() {
        let mut a = small_authority();
        let mut b = small_authority();
        a.authority_id = "a/b".into();
        b.authority_id = "a%2Fb".into();
        let ua = mint_uri(&a, "http://example.org").unwrap();
        let ub = mint_uri(&b, "http://example.org").unwrap();
        assert_ne!(ua, ub);
    }
}
