//! The variant-corpus pipeline: 110 forms cluster to one authority, the
//! authority emits a 113-triple graph, and the serializations are
//! deterministic and re-parse (via an independent N-Triples reader) to the
//! same graph.

use authkit_core::cluster::{authority_from_cluster, Clusterer, DEFAULT_THETA};
use authkit_core::fixtures::{
    cervantes_alias_table, cervantes_variant_entries, distractor_entries, QUIJOTE_DISPLAY_TITLE,
};
use authkit_core::lod::{build_graph, serialize_ntriples, serialize_turtle, Object, Triple};
use authkit_core::record::heading_display;
use std::collections::BTreeSet;

fn clusterer() -> Clusterer {
    Clusterer::new(DEFAULT_THETA).with_alias(cervantes_alias_table())
}

#[test]
fn the_110_forms_make_exactly_one_cluster() {
    let entries = cervantes_variant_entries();
    assert_eq!(entries.len(), 110);
    let clusters = clusterer().cluster(&entries);
    assert_eq!(clusters.len(), 1, "expected a single cluster");
    assert_eq!(clusters[0].members.len(), 110);
    assert_eq!(
        heading_display(&clusters[0].representative),
        "Cervantes Saavedra, Miguel de, 1547-1616"
    );
}

#[test]
fn ten_distractors_make_eleven_clusters() {
    let mut entries = cervantes_variant_entries();
    entries.extend(distractor_entries());
    let clusters = clusterer().cluster(&entries);
    assert_eq!(clusters.len(), 11);
    let sizes: Vec<usize> = clusters.iter().map(|c| c.members.len()).collect();
    assert_eq!(sizes.iter().filter(|&&s| s == 110).count(), 1);
    assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 10);
}

#[test]
fn the_cluster_emits_113_triples() {
    let entries = cervantes_variant_entries();
    let clusters = clusterer().cluster(&entries);
    let authority =
        authority_from_cluster(&clusters[0], &[], &["http://dbpedia.org".to_string()]);
    authority.validate().unwrap();
    assert_eq!(authority.variants.len(), 109);
    assert_eq!(authority.linked_titles.len(), 1);
    assert_eq!(authority.linked_titles[0].title, QUIJOTE_DISPLAY_TITLE);
    assert_eq!(authority.linked_titles[0].occurrence_count, 110);

    let graph = build_graph(&authority, "http://example.org").unwrap();
    // 110 names + prefLabel + dc:title + owl:sameAs
    assert_eq!(graph.len(), 113);
    let nt = serialize_ntriples(&graph);
    assert_eq!(nt.lines().count(), 113);
    assert!(nt.ends_with('\n'));
}

#[test]
fn emission_is_byte_identical_across_runs_and_input_orders() {
    let entries = cervantes_variant_entries();
    let emit = |entries: &[authkit_core::cluster::SourceEntry]| {
        let clusters = clusterer().cluster(entries);
        let authority =
            authority_from_cluster(&clusters[0], &[], &["http://dbpedia.org".to_string()]);
        let graph = build_graph(&authority, "http://example.org").unwrap();
        (serialize_ntriples(&graph), serialize_turtle(&graph))
    };
    let (nt1, ttl1) = emit(&entries);
    let mut reversed = entries.clone();
    reversed.reverse();
    let (nt2, ttl2) = emit(&reversed);
    assert_eq!(nt1, nt2);
    assert_eq!(ttl1, ttl2);
}

// --- independent N-Triples reader (test-side oracle) ------------------------

fn unescape(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('"') => out.push('"'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some('u') => {
                let hex: String = (&mut chars).take(4).collect();
                out.push(char::from_u32(u32::from_str_radix(&hex, 16).unwrap()).unwrap());
            }
            Some('U') => {
                let hex: String = (&mut chars).take(8).collect();
                out.push(char::from_u32(u32::from_str_radix(&hex, 16).unwrap()).unwrap());
            }
            other => panic!("bad escape {other:?}"),
        }
    }
    out
}

/// Minimal conformant reader for the N-Triples subset the emitter produces
/// (IRIs and literals with optional language tags). Written against the
/// grammar, not against the serializer.
fn read_ntriples(doc: &str) -> BTreeSet<(String, String, ObjectRepr)> {
    let mut out = BTreeSet::new();
    for line in doc.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line = line.strip_suffix('.').expect("statement ends with a dot").trim_end();
        let (subject, rest) = read_iri(line);
        let (predicate, rest) = read_iri(rest.trim_start());
        let object = read_object(rest.trim_start());
        out.insert((subject, predicate, object));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ObjectRepr {
    Iri(String),
    Literal(String, Option<String>),
}

fn read_iri(s: &str) -> (String, &str) {
    assert!(s.starts_with('<'), "expected IRI in {s:?}");
    let end = s.find('>').expect("closing angle bracket");
    (s[1..end].to_string(), &s[end + 1..])
}

fn read_object(s: &str) -> ObjectRepr {
    if s.starts_with('<') {
        let (iri, rest) = read_iri(s);
        assert!(rest.trim().is_empty());
        return ObjectRepr::Iri(iri);
    }
    assert!(s.starts_with('"'), "expected literal in {s:?}");
    // find the closing unescaped quote
    let bytes = s.as_bytes();
    let mut i = 1;
    loop {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => break,
            _ => i += 1,
        }
    }
    let value = unescape(&s[1..i]);
    let rest = &s[i + 1..];
    let lang = rest.strip_prefix('@').map(|l| l.trim().to_string());
    ObjectRepr::Literal(value, lang)
}

fn graph_as_set(g: &authkit_core::lod::TripleGraph) -> BTreeSet<(String, String, ObjectRepr)> {
    g.iter()
        .map(|t: &Triple| {
            let o = match &t.object {
                Object::Uri(u) => ObjectRepr::Iri(u.clone()),
                Object::Literal { value, lang } => ObjectRepr::Literal(value.clone(), lang.clone()),
            };
            (t.subject.clone(), t.predicate.clone(), o)
        })
        .collect()
}

#[test]
fn ntriples_output_reparses_to_an_equal_graph() {
    let entries = cervantes_variant_entries();
    let clusters = clusterer().cluster(&entries);
    let authority =
        authority_from_cluster(&clusters[0], &[], &["http://dbpedia.org".to_string()]);
    let graph = build_graph(&authority, "http://example.org").unwrap();
    let nt = serialize_ntriples(&graph);
    let reparsed = read_ntriples(&nt);
    assert_eq!(reparsed, graph_as_set(&graph));
}

#[test]
fn escapes_round_trip_through_the_independent_reader() {
    let mut g = authkit_core::lod::TripleGraph::new("http://example.org").unwrap();
    g.insert(
        Triple::literal(
            "http://example.org/x",
            authkit_core::lod::DC_TITLE,
            "quote \" backslash \\ newline \n tab \t done",
            Some("es"),
        )
        .unwrap(),
    );
    let nt = serialize_ntriples(&g);
    assert_eq!(read_ntriples(&nt), graph_as_set(&g));
}

// --- Turtle reader for the emitted subset ------------------------------------

fn expand_prefixed(s: &str, prefixes: &[(String, String)]) -> String {
    for (p, ns) in prefixes {
        if let Some(local) = s.strip_prefix(&format!("{p}:")) {
            return format!("{ns}{local}");
        }
    }
    panic!("unknown prefixed name {s:?}");
}

/// Reader for the emitted Turtle subset: prefix block, subject groups,
/// `;`-separated predicates, `,`-separated objects.
fn read_turtle(doc: &str) -> BTreeSet<(String, String, ObjectRepr)> {
    let mut prefixes: Vec<(String, String)> = Vec::new();
    let mut out = BTreeSet::new();
    let mut body = String::new();
    for line in doc.lines() {
        if let Some(rest) = line.strip_prefix("@prefix ") {
            let rest = rest.trim_end_matches(" .").trim_end_matches('.').trim();
            let (p, ns) = rest.split_once(':').unwrap();
            let ns = ns.trim().trim_start_matches('<').trim_end_matches('>');
            prefixes.push((p.trim().to_string(), ns.to_string()));
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    for group in body.split(" .\n") {
        let group = group.trim();
        if group.is_empty() {
            continue;
        }
        let (subject, rest) = read_iri(group);
        for pred_part in rest.split(" ;\n") {
            let pred_part = pred_part.trim();
            if pred_part.is_empty() {
                continue;
            }
            let (pred_token, objects) = pred_part.split_once(' ').unwrap();
            let predicate = if pred_token.starts_with('<') {
                read_iri(pred_token).0
            } else {
                expand_prefixed(pred_token, &prefixes)
            };
            for obj in objects.split(",\n") {
                out.insert((subject.clone(), predicate.clone(), read_object(obj.trim())));
            }
        }
    }
    out
}

#[test]
fn turtle_output_reparses_to_an_equal_graph() {
    let entries = cervantes_variant_entries();
    let clusters = clusterer().cluster(&entries);
    let authority =
        authority_from_cluster(&clusters[0], &[], &["http://dbpedia.org".to_string()]);
    let graph = build_graph(&authority, "http://example.org").unwrap();
    let ttl = serialize_turtle(&graph);
    assert_eq!(read_turtle(&ttl), graph_as_set(&graph));
}
