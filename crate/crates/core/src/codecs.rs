//! Dublin Core, EAD and ISAD-G readers/writers over [`CanonicalRecord`].
//!
//! Each codec declares its field map: the canonical slots it preserves.
//! Anything outside the declared map is lost by design, and the loss set is
//! exactly the undeclared slots (tested by slot-diffing round trips).
//! Dublin Core and ISAD-G are strict; EAD is lenient (unknown elements
//! produce warnings, not failures — archival corpora are heterogeneous).

use crate::record::{
    heading_display, parse_corporate_display, parse_personal_name, Carrier, CanonicalRecord,
    Heading, HeadingKind, IdScheme, Identifier, Note, NoteKind, SourceFormat,
};
use crate::xmlutil::{self, escape_attr, escape_text};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("record has no title")]
    MissingTitle,
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("line {line}: not an \"area.element: value\" line")]
    UnlabeledLine { line: usize },
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("line {line}: unknown element {label:?}")]
    UnknownElement { line: usize, label: String },
}

/// Canonical record slots, the unit of codec fidelity accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    RecordId,
    TitleMain,
    TitleSubtitle,
    TitleParallel,
    TitleAlternative,
    TitleUniform,
    ResponsibilityStatement,
    MainHeading,
    AddedHeadings,
    PublicationPlace,
    PublicationPublisher,
    PublicationDate,
    NoteTitleSource,
    NoteAccessMode,
    NoteRecordingDate,
    NoteOnlineAndPrint,
    NoteGeneral,
    Identifiers,
    Carrier,
}

impl Slot {
    pub const ALL: [Slot; 19] = [
        Slot::RecordId,
        Slot::TitleMain,
        Slot::TitleSubtitle,
        Slot::TitleParallel,
        Slot::TitleAlternative,
        Slot::TitleUniform,
        Slot::ResponsibilityStatement,
        Slot::MainHeading,
        Slot::AddedHeadings,
        Slot::PublicationPlace,
        Slot::PublicationPublisher,
        Slot::PublicationDate,
        Slot::NoteTitleSource,
        Slot::NoteAccessMode,
        Slot::NoteRecordingDate,
        Slot::NoteOnlineAndPrint,
        Slot::NoteGeneral,
        Slot::Identifiers,
        Slot::Carrier,
    ];

    /// Is the slot populated in this record?
    pub fn present_in(&self, r: &CanonicalRecord) -> bool {
        match self {
            Slot::RecordId => !r.record_id.is_empty(),
            Slot::TitleMain => !r.titles.main.is_empty(),
            Slot::TitleSubtitle => r.titles.subtitle.is_some(),
            Slot::TitleParallel => !r.titles.parallel.is_empty(),
            Slot::TitleAlternative => !r.titles.alternative.is_empty(),
            Slot::TitleUniform => r.titles.uniform.is_some(),
            Slot::ResponsibilityStatement => !r.responsibility.statement.is_empty(),
            Slot::MainHeading => r.main_heading.is_some(),
            Slot::AddedHeadings => !r.added_headings.is_empty(),
            Slot::PublicationPlace => r.publication.place.is_some(),
            Slot::PublicationPublisher => r.publication.publisher.is_some(),
            Slot::PublicationDate => r.publication.date.is_some(),
            Slot::NoteTitleSource => r.notes_of(NoteKind::TitleSource).next().is_some(),
            Slot::NoteAccessMode => r.notes_of(NoteKind::AccessMode).next().is_some(),
            Slot::NoteRecordingDate => r.notes_of(NoteKind::RecordingDate).next().is_some(),
            Slot::NoteOnlineAndPrint => {
                r.notes_of(NoteKind::OnlineAndPrintCatalogued).next().is_some()
            }
            Slot::NoteGeneral => r.notes_of(NoteKind::General).next().is_some(),
            Slot::Identifiers => !r.identifiers.is_empty(),
            Slot::Carrier => true,
        }
    }

    /// Slot-level equality between two records.
    pub fn equal_in(&self, a: &CanonicalRecord, b: &CanonicalRecord) -> bool {
        match self {
            Slot::RecordId => a.record_id == b.record_id,
            Slot::TitleMain => a.titles.main == b.titles.main,
            Slot::TitleSubtitle => a.titles.subtitle == b.titles.subtitle,
            Slot::TitleParallel => a.titles.parallel == b.titles.parallel,
            Slot::TitleAlternative => a.titles.alternative == b.titles.alternative,
            Slot::TitleUniform => a.titles.uniform == b.titles.uniform,
            Slot::ResponsibilityStatement => {
                a.responsibility.statement == b.responsibility.statement
            }
            Slot::MainHeading => a.main_heading == b.main_heading,
            Slot::AddedHeadings => a.added_headings == b.added_headings,
            Slot::PublicationPlace => a.publication.place == b.publication.place,
            Slot::PublicationPublisher => a.publication.publisher == b.publication.publisher,
            Slot::PublicationDate => a.publication.date == b.publication.date,
            Slot::NoteTitleSource => notes_eq(a, b, NoteKind::TitleSource),
            Slot::NoteAccessMode => notes_eq(a, b, NoteKind::AccessMode),
            Slot::NoteRecordingDate => notes_eq(a, b, NoteKind::RecordingDate),
            Slot::NoteOnlineAndPrint => notes_eq(a, b, NoteKind::OnlineAndPrintCatalogued),
            Slot::NoteGeneral => notes_eq(a, b, NoteKind::General),
            Slot::Identifiers => a.identifiers == b.identifiers,
            Slot::Carrier => a.carrier == b.carrier,
        }
    }
}

fn notes_eq(a: &CanonicalRecord, b: &CanonicalRecord, kind: NoteKind) -> bool {
    a.notes_of(kind).collect::<Vec<_>>() == b.notes_of(kind).collect::<Vec<_>>()
}

/// One declared mapping in a codec's field map.
#[derive(Debug, Clone)]
pub struct FieldMapEntry {
    pub source_path: &'static str,
    pub target: Slot,
    pub repeatable: bool,
}

const fn entry(source_path: &'static str, target: Slot, repeatable: bool) -> FieldMapEntry {
    FieldMapEntry { source_path, target, repeatable }
}

// ---------------------------------------------------------------------------
// Dublin Core (simple profile): title, creator, contributor, publisher,
// date, identifier, description, type — emitted in exactly that order.
// ---------------------------------------------------------------------------

pub const DC_FIELD_MAP: [FieldMapEntry; 8] = [
    entry("dc/title", Slot::TitleMain, false),
    entry("dc/creator", Slot::MainHeading, false),
    entry("dc/contributor", Slot::AddedHeadings, true),
    entry("dc/publisher", Slot::PublicationPublisher, false),
    entry("dc/date", Slot::PublicationDate, false),
    entry("dc/identifier", Slot::Identifiers, true),
    entry("dc/description", Slot::NoteGeneral, true),
    entry("dc/type", Slot::Carrier, false),
];

fn carrier_to_dc_type(c: Carrier) -> &'static str {
    match c {
        Carrier::Text => "Text",
        Carrier::SoundRecording => "Sound",
        Carrier::ElectronicResource => "InteractiveResource",
        Carrier::Archival => "Collection",
    }
}

fn carrier_from_dc_type(s: &str) -> Carrier {
    match s.trim().to_ascii_lowercase().as_str() {
        "sound" => Carrier::SoundRecording,
        "interactiveresource" | "software" | "electronic" => Carrier::ElectronicResource,
        "collection" | "archival" => Carrier::Archival,
        _ => Carrier::Text,
    }
}

pub fn serialize_dc(r: &CanonicalRecord) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<dc>\n");
    out.push_str(&format!("  <title>{}</title>\n", escape_text(&r.titles.main)));
    if let Some(h) = &r.main_heading {
        out.push_str(&format!(
            "  <creator>{}</creator>\n",
            escape_text(&heading_display(h))
        ));
    }
    for h in &r.added_headings {
        out.push_str(&format!(
            "  <contributor>{}</contributor>\n",
            escape_text(&heading_display(h))
        ));
    }
    if let Some(p) = &r.publication.publisher {
        out.push_str(&format!("  <publisher>{}</publisher>\n", escape_text(p)));
    }
    if let Some(d) = &r.publication.date {
        out.push_str(&format!("  <date>{}</date>\n", escape_text(d)));
    }
    for id in &r.identifiers {
        out.push_str(&format!(
            "  <identifier>{}:{}</identifier>\n",
            id.scheme.label(),
            escape_text(&id.value)
        ));
    }
    for n in r.notes_of(NoteKind::General) {
        out.push_str(&format!(
            "  <description>{}</description>\n",
            escape_text(&n.text)
        ));
    }
    out.push_str(&format!("  <type>{}</type>\n", carrier_to_dc_type(r.carrier)));
    out.push_str("</dc>\n");
    out
}

fn parse_identifier(text: &str) -> Identifier {
    if let Some((label, value)) = text.split_once(':') {
        if let Some(scheme) = IdScheme::from_label(label) {
            return Identifier::new(scheme, value);
        }
    }
    Identifier::new(IdScheme::LocalCode, text)
}

pub fn parse_dc(xml: &str) -> Result<CanonicalRecord, CodecError> {
    let root = xmlutil::parse_document(xml).map_err(CodecError::MalformedXml)?;
    let title = root
        .children_named("title")
        .next()
        .map(|e| e.text.trim().to_string())
        .filter(|t| !t.is_empty())
        .ok_or(CodecError::MissingTitle)?;
    let mut r = CanonicalRecord::new("", &title, SourceFormat::DublinCore);
    if let Some(c) = root.children_named("creator").next() {
        r.main_heading = Some(parse_personal_name(c.text.trim()).heading);
    }
    for c in root.children_named("contributor") {
        r.added_headings.push(parse_personal_name(c.text.trim()).heading);
    }
    if let Some(p) = root.children_named("publisher").next() {
        r.publication.publisher = Some(p.text.trim().to_string());
    }
    if let Some(d) = root.children_named("date").next() {
        r.publication.date = Some(d.text.trim().to_string());
    }
    for id in root.children_named("identifier") {
        let parsed = parse_identifier(id.text.trim());
        if r.identifier(parsed.scheme).is_none() {
            r.identifiers.push(parsed);
        }
    }
    for d in root.children_named("description") {
        r.notes.push(Note::new(NoteKind::General, d.text.trim()));
    }
    if let Some(t) = root.children_named("type").next() {
        r.carrier = carrier_from_dc_type(&t.text);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// EAD (minimal profile): eadheader/filedesc/titlestmt/titleproper,
// archdesc/did/{unitid,unitdate,origination/{persname,corpname}},
// archdesc/scopecontent/p. Parsing is lenient: unknown elements warn.
// ---------------------------------------------------------------------------

pub const EAD_FIELD_MAP: [FieldMapEntry; 6] = [
    entry("eadheader/filedesc/titlestmt/titleproper", Slot::TitleMain, false),
    entry("archdesc/did/unitid", Slot::RecordId, false),
    entry("archdesc/did/unitdate", Slot::PublicationDate, false),
    entry("archdesc/did/origination/persname", Slot::MainHeading, false),
    entry("archdesc/did/origination/*name[role]", Slot::AddedHeadings, true),
    entry("archdesc/scopecontent/p", Slot::NoteGeneral, true),
];

fn heading_to_ead_element(h: &Heading) -> (&'static str, String) {
    match h.kind {
        HeadingKind::Personal => ("persname", heading_display(h)),
        _ => ("corpname", heading_display(h)),
    }
}

pub fn serialize_ead(r: &CanonicalRecord) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<ead>\n");
    out.push_str("  <eadheader>\n    <filedesc>\n      <titlestmt>\n");
    out.push_str(&format!(
        "        <titleproper>{}</titleproper>\n",
        escape_text(&r.titles.main)
    ));
    out.push_str("      </titlestmt>\n    </filedesc>\n  </eadheader>\n");
    out.push_str("  <archdesc>\n    <did>\n");
    if !r.record_id.is_empty() {
        out.push_str(&format!("      <unitid>{}</unitid>\n", escape_text(&r.record_id)));
    }
    if let Some(d) = &r.publication.date {
        out.push_str(&format!("      <unitdate>{}</unitdate>\n", escape_text(d)));
    }
    if r.main_heading.is_some() || !r.added_headings.is_empty() {
        out.push_str("      <origination>\n");
        if let Some(h) = &r.main_heading {
            let (el, text) = heading_to_ead_element(h);
            out.push_str(&format!("        <{el}>{}</{el}>\n", escape_text(&text)));
        }
        for h in &r.added_headings {
            let (el, text) = heading_to_ead_element(h);
            match h.relators.first() {
                Some(role) => out.push_str(&format!(
                    "        <{el} role=\"{}\">{}</{el}>\n",
                    escape_attr(role),
                    escape_text(&text)
                )),
                None => out.push_str(&format!("        <{el}>{}</{el}>\n", escape_text(&text))),
            }
        }
        out.push_str("      </origination>\n");
    }
    out.push_str("    </did>\n");
    let general: Vec<_> = r.notes_of(NoteKind::General).collect();
    if !general.is_empty() {
        out.push_str("    <scopecontent>\n");
        for n in general {
            out.push_str(&format!("      <p>{}</p>\n", escape_text(&n.text)));
        }
        out.push_str("    </scopecontent>\n");
    }
    out.push_str("  </archdesc>\n</ead>\n");
    out
}

#[derive(Debug)]
pub struct EadParse {
    pub record: CanonicalRecord,
    pub warnings: Vec<String>,
}

const EAD_KNOWN: [&str; 13] = [
    "ead", "eadheader", "eadid", "filedesc", "titlestmt", "titleproper", "archdesc", "did",
    "unitid", "unittitle", "unitdate", "origination", "scopecontent",
];

fn walk_unknown(el: &xmlutil::Element, warnings: &mut Vec<String>) {
    if !EAD_KNOWN.contains(&el.name.as_str())
        && !["persname", "corpname", "p"].contains(&el.name.as_str())
    {
        warnings.push(format!("ignored unknown element <{}>", el.name));
    }
    for c in &el.children {
        walk_unknown(c, warnings);
    }
}

fn parse_name_element(el: &xmlutil::Element) -> Heading {
    let text = el.text.trim();
    let mut h = if el.name == "corpname" {
        parse_corporate_display(text)
    } else {
        parse_personal_name(text).heading
    };
    if let Some(role) = el.attr("role") {
        h.relators.push(role.to_string());
    }
    h
}

pub fn parse_ead(xml: &str) -> Result<EadParse, CodecError> {
    let root = xmlutil::parse_document(xml).map_err(CodecError::MalformedXml)?;
    let mut warnings = Vec::new();
    walk_unknown(&root, &mut warnings);

    let title = root
        .find("titleproper")
        .map(|e| e.text.trim().to_string())
        .filter(|t| !t.is_empty())
        .ok_or(CodecError::MissingTitle)?;
    let mut r = CanonicalRecord::new("", &title, SourceFormat::Ead);
    r.carrier = Carrier::Archival;
    if let Some(id) = root.find("unitid") {
        r.record_id = id.text.trim().to_string();
    }
    if let Some(d) = root.find("unitdate") {
        let text = d.text.trim();
        if !text.is_empty() {
            r.publication.date = Some(text.to_string());
        }
    }
    if let Some(orig) = root.find("origination") {
        for el in &orig.children {
            if el.name != "persname" && el.name != "corpname" {
                continue;
            }
            let h = parse_name_element(el);
            if r.main_heading.is_none() && h.relators.is_empty() {
                r.main_heading = Some(h);
            } else {
                r.added_headings.push(h);
            }
        }
    }
    if let Some(scope) = root.find("scopecontent") {
        for p in scope.children_named("p") {
            r.notes.push(Note::new(NoteKind::General, p.text.trim()));
        }
    }
    Ok(EadParse { record: r, warnings })
}

// ---------------------------------------------------------------------------
// ISAD-G: labeled "area.element: value" lines, LF-terminated, one element
// per line. Areas follow the seven description areas; the encoded elements
// are the declared map below. Strict: unknown labels and duplicate
// non-repeatable elements are errors.
// ---------------------------------------------------------------------------

pub const ISADG_FIELD_MAP: [FieldMapEntry; 5] = [
    entry("identity.reference", Slot::RecordId, false),
    entry("identity.title", Slot::TitleMain, false),
    entry("identity.dates", Slot::PublicationDate, false),
    entry("context.creator", Slot::MainHeading, false),
    entry("content.scope", Slot::NoteGeneral, true),
];

pub fn serialize_isadg(r: &CanonicalRecord) -> String {
    let mut out = String::new();
    if !r.record_id.is_empty() {
        out.push_str(&format!("identity.reference: {}\n", r.record_id));
    }
    out.push_str(&format!("identity.title: {}\n", r.titles.main));
    if let Some(d) = &r.publication.date {
        out.push_str(&format!("identity.dates: {d}\n"));
    }
    if let Some(h) = &r.main_heading {
        out.push_str(&format!("context.creator: {}\n", heading_display(h)));
    }
    for n in r.notes_of(NoteKind::General) {
        out.push_str(&format!("content.scope: {}\n", n.text));
    }
    out
}

pub fn parse_isadg(text: &str) -> Result<CanonicalRecord, CodecError> {
    let mut record_id = None;
    let mut title = None;
    let mut dates = None;
    let mut creator = None;
    let mut scopes: Vec<String> = Vec::new();

    let mut saw_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        saw_content = true;
        let (label, value) = line
            .split_once(':')
            .ok_or(CodecError::UnlabeledLine { line: line_no })?;
        let label = label.trim();
        if !label.contains('.') {
            return Err(CodecError::UnlabeledLine { line: line_no });
        }
        let value = value.trim().to_string();
        let set_unique = |slot: &mut Option<String>| {
            if slot.is_some() {
                Err(CodecError::DuplicateElement(label.to_string()))
            } else {
                *slot = Some(value.clone());
                Ok(())
            }
        };
        match label {
            "identity.reference" => set_unique(&mut record_id)?,
            "identity.title" => set_unique(&mut title)?,
            "identity.dates" => set_unique(&mut dates)?,
            "context.creator" => set_unique(&mut creator)?,
            "content.scope" => scopes.push(value),
            other => {
                return Err(CodecError::UnknownElement { line: line_no, label: other.to_string() })
            }
        }
    }
    if !saw_content {
        return Err(CodecError::UnlabeledLine { line: 1 });
    }
    let title = title.filter(|t| !t.is_empty()).ok_or(CodecError::MissingTitle)?;
    let mut r = CanonicalRecord::new(record_id.as_deref().unwrap_or(""), &title, SourceFormat::IsadG);
    r.carrier = Carrier::Archival;
    r.publication.date = dates;
    if let Some(c) = creator {
        r.main_heading = Some(parse_personal_name(&c).heading);
    }
    for s in scopes {
        r.notes.push(Note::new(NoteKind::General, s));
    }
    Ok(r)
}

/// Records in a multi-record ISAD-G file are separated by one blank line.
pub fn split_isadg_records(text: &str) -> Vec<&str> {
    text.split("\n\n")
        .map(|chunk| chunk.trim_matches('\n'))
        .filter(|chunk| !chunk.trim().is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::PartRole;

    fn full_record() -> CanonicalRecord {
        let mut r = CanonicalRecord::new("rec-1", "Don Quijote de la Mancha.", SourceFormat::DublinCore);
        r.main_heading = Some(
            parse_personal_name("Cervantes Saavedra, Miguel de, 1547-1616").heading,
        );
        r.added_headings
            .push(parse_personal_name("Cervantes, Miguel de, 1547-1616").heading);
        r.publication.publisher = Some("Francisco de Robles".into());
        r.publication.date = Some("1605".into());
        r.identifiers.push(Identifier::new(IdScheme::Isbn, "0393091635"));
        r.notes.push(Note::new(NoteKind::General, "First modern novel."));
        r
    }

    #[test]
    fn dc_round_trip_preserves_declared_slots() {
        let r = full_record();
        let xml = serialize_dc(&r);
        let back = parse_dc(&xml).unwrap();
        assert_eq!(back.titles.main, r.titles.main);
        assert_eq!(back.main_heading, r.main_heading);
        assert_eq!(back.added_headings, r.added_headings);
        assert_eq!(back.publication.publisher, r.publication.publisher);
        assert_eq!(back.publication.date, r.publication.date);
        assert_eq!(back.identifiers, r.identifiers);
        assert_eq!(
            back.notes_of(NoteKind::General).collect::<Vec<_>>(),
            r.notes_of(NoteKind::General).collect::<Vec<_>>()
        );
        assert_eq!(back.carrier, r.carrier);
    }

    #[test]
    fn dc_title_only_record() {
        let xml = "<dc><title>Entremeses</title></dc>";
        let r = parse_dc(xml).unwrap();
        assert_eq!(r.titles.main, "Entremeses");
        assert!(r.main_heading.is_none());
        assert!(r.added_headings.is_empty());
    }

    #[test]
    fn dc_without_title_is_missing_title() {
        let xml = "<dc><creator>Cervantes, Miguel de</creator></dc>";
        assert!(matches!(parse_dc(xml), Err(CodecError::MissingTitle)));
    }

    #[test]
    fn dc_serializer_is_deterministic() {
        let r = full_record();
        assert_eq!(serialize_dc(&r), serialize_dc(&r));
    }

    #[test]
    fn ead_corpname_with_role_becomes_added_heading_with_relator() {
        let xml = r#"<ead>
  <eadheader><filedesc><titlestmt><titleproper>Records of UNESCO</titleproper></titlestmt></filedesc></eadheader>
  <archdesc><did>
    <origination><corpname role="issuing body">UNESCO</corpname></origination>
  </did></archdesc>
</ead>"#;
        let parsed = parse_ead(xml).unwrap();
        let r = parsed.record;
        assert!(r.main_heading.is_none());
        assert_eq!(r.added_headings.len(), 1);
        let h = &r.added_headings[0];
        assert_eq!(h.kind, HeadingKind::Corporate);
        assert_eq!(h.relators, vec!["issuing body"]);
        assert_eq!(h.part(PartRole::BodyName), Some("UNESCO"));
    }

    #[test]
    fn ead_without_unitdate_has_no_date_and_no_error() {
        let xml = r#"<ead><eadheader><filedesc><titlestmt><titleproper>T</titleproper></titlestmt></filedesc></eadheader><archdesc><did/></archdesc></ead>"#;
        let parsed = parse_ead(xml).unwrap();
        assert!(parsed.record.publication.date.is_none());
    }

    #[test]
    fn ead_persname_with_dates() {
        let xml = r#"<ead><eadheader><filedesc><titlestmt><titleproper>T</titleproper></titlestmt></filedesc></eadheader>
<archdesc><did><origination><persname>Cervantes, Miguel de, 1547-1616</persname></origination></did></archdesc></ead>"#;
        let parsed = parse_ead(xml).unwrap();
        let h = parsed.record.main_heading.unwrap();
        assert_eq!(h.lifespan(), Some((1547, Some(1616))));
    }

    #[test]
    fn ead_unknown_elements_warn_but_parse() {
        let xml = r#"<ead><eadheader><filedesc><titlestmt><titleproper>T</titleproper></titlestmt></filedesc></eadheader>
<archdesc><did><physdesc>3 boxes</physdesc></did></archdesc></ead>"#;
        let parsed = parse_ead(xml).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("physdesc"));
    }

    #[test]
    fn ead_round_trip_preserves_declared_slots() {
        let mut r = full_record();
        r.record_id = "ES-GR-001".into();
        let xml = serialize_ead(&r);
        let back = parse_ead(&xml).unwrap().record;
        assert_eq!(back.record_id, r.record_id);
        assert_eq!(back.titles.main, r.titles.main);
        assert_eq!(back.main_heading, r.main_heading);
        assert_eq!(back.publication.date, r.publication.date);
    }

    #[test]
    fn isadg_round_trip() {
        let text = "identity.reference: ES-001\nidentity.title: Don Quijote de la Mancha.\nidentity.dates: 1605\ncontext.creator: Cervantes Saavedra, Miguel de\ncontent.scope: Autograph drafts.\n";
        let r = parse_isadg(text).unwrap();
        assert_eq!(r.titles.main, "Don Quijote de la Mancha.");
        assert_eq!(r.record_id, "ES-001");
        assert_eq!(
            r.main_heading.as_ref().and_then(|h| h.part(PartRole::Surname)),
            Some("Cervantes Saavedra")
        );
        assert_eq!(serialize_isadg(&r), text);
    }

    #[test]
    fn isadg_empty_input_is_unlabeled_line() {
        assert!(matches!(
            parse_isadg(""),
            Err(CodecError::UnlabeledLine { line: 1 })
        ));
    }

    #[test]
    fn isadg_duplicate_title_is_rejected() {
        let text = "identity.title: A\nidentity.title: B\n";
        assert!(matches!(
            parse_isadg(text),
            Err(CodecError::DuplicateElement(_))
        ));
    }

    #[test]
    fn isadg_unlabeled_line_is_rejected() {
        assert!(matches!(
            parse_isadg("just some text\n"),
            Err(CodecError::UnlabeledLine { line: 1 })
        ));
    }

    #[test]
    fn slot_diff_loss_set_is_exactly_the_undeclared_slots() {
        // A record with every slot populated (personal headings only, so the
        // flat text codecs can reproduce them).
        let mut r = full_record();
        r.record_id = "rec-9".into();
        r.titles.subtitle = Some("or, The Knight".into());
        r.titles.parallel.push("Le valeureux Don Quixote".into());
        r.titles.alternative.push("The ingenious gentleman".into());
        r.titles.uniform = Some("Don Quijote de la Mancha".into());
        r.responsibility.statement = "por Miguel de Cervantes".into();
        r.publication.place = Some("Madrid".into());
        r.notes.push(Note::new(NoteKind::TitleSource, "Title from cover."));
        r.notes.push(Note::new(NoteKind::AccessMode, "World Wide Web."));
        r.notes.push(Note::new(NoteKind::RecordingDate, "Recorded 1999."));
        r.notes.push(Note::new(
            NoteKind::OnlineAndPrintCatalogued,
            "Online and print catalogued.",
        ));
        for (name, map, round_trip) in [
            (
                "dc",
                &DC_FIELD_MAP[..],
                Box::new(|r: &CanonicalRecord| parse_dc(&serialize_dc(r)).unwrap())
                    as Box<dyn Fn(&CanonicalRecord) -> CanonicalRecord>,
            ),
            (
                "ead",
                &EAD_FIELD_MAP[..],
                Box::new(|r: &CanonicalRecord| parse_ead(&serialize_ead(r)).unwrap().record),
            ),
            (
                "isadg",
                &ISADG_FIELD_MAP[..],
                Box::new(|r: &CanonicalRecord| parse_isadg(&serialize_isadg(r)).unwrap()),
            ),
        ] {
            let back = round_trip(&r);
            let declared: std::collections::BTreeSet<Slot> =
                map.iter().map(|e| e.target).collect();
            for slot in Slot::ALL {
                // EAD has no main-heading-without-role vs added distinction
                // for corporates; our fixture only uses personal headings.
                if declared.contains(&slot) {
                    assert!(
                        slot.equal_in(&r, &back),
                        "{name}: declared slot {slot:?} was not preserved"
                    );
                } else if slot != Slot::Carrier {
                    assert!(
                        !slot.present_in(&back) || !slot.present_in(&r),
                        "{name}: undeclared slot {slot:?} leaked through"
                    );
                }
            }
        }
    }

    #[test]
    fn field_maps_have_unique_source_paths() {
        for map in [&DC_FIELD_MAP[..], &EAD_FIELD_MAP[..], &ISADG_FIELD_MAP[..]] {
            let mut seen = std::collections::BTreeSet::new();
            for e in map {
                assert!(seen.insert(e.source_path), "duplicate path {}", e.source_path);
            }
        }
    }
}
