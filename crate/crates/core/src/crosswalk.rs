//! BibRecord ⇄ CanonicalRecord mapping and any-to-any format conversion
//! through the canonical pivot.
//!
//! The MARC mapping table ships as `data/crosswalk.csv` (source_field,
//! subfield, canonical_slot, direction); the conversion code consults the
//! parsed table, so the file is auditable and a unit test cross-checks it.
//! Fields outside the table survive MARC→MARC round trips through a
//! carry-over list instead of being dropped.

use crate::codecs;
use crate::lod;
use crate::marc::{
    self, parse_iso2709, parse_marcxml_collection, serialize_iso2709,
    serialize_marcxml_collection, BibRecord, DataField, MarcError, Subfield, Tag,
};
use crate::record::{
    heading_display, parse_personal_name, Carrier, CanonicalRecord, Heading, HeadingDates,
    HeadingKind, IdScheme, Identifier, NamePart, Note, NoteKind, PartRole, SourceFormat,
};
use crate::xmlutil::{escape_attr, escape_text};
use std::collections::HashMap;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("{0} cannot be parsed, it is an output-only format")]
    NotASource(Format),
    #[error(transparent)]
    Marc(#[from] MarcError),
    #[error(transparent)]
    Codec(#[from] codecs::CodecError),
    #[error(transparent)]
    Lod(#[from] lod::LodError),
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("record {ordinal}: {source}")]
    Record {
        ordinal: usize,
        #[source]
        source: Box<ConvertError>,
    },
}

/// Formats the converter understands. The first five parse; FRBR and the
/// RDF serializations are output-only. Canonical is the crate's own
/// JSON-lines interchange form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    Marc21,
    MarcXml,
    Dc,
    Ead,
    Isadg,
    Canonical,
    Frbr,
    NTriples,
    Turtle,
}

impl Format {
    pub fn parse_name(name: &str) -> Result<Format, ConvertError> {
        match name.to_ascii_lowercase().as_str() {
            "marc21" => Ok(Format::Marc21),
            "marcxml" => Ok(Format::MarcXml),
            "dc" => Ok(Format::Dc),
            "ead" => Ok(Format::Ead),
            "isadg" => Ok(Format::Isadg),
            "canonical" => Ok(Format::Canonical),
            "frbr" => Ok(Format::Frbr),
            "ntriples" => Ok(Format::NTriples),
            "turtle" => Ok(Format::Turtle),
            other => Err(ConvertError::UnknownFormat(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Format::Marc21 => "marc21",
            Format::MarcXml => "marcxml",
            Format::Dc => "dc",
            Format::Ead => "ead",
            Format::Isadg => "isadg",
            Format::Canonical => "canonical",
            Format::Frbr => "frbr",
            Format::NTriples => "ntriples",
            Format::Turtle => "turtle",
        }
    }

    /// Report label, uppercase.
    pub fn label(&self) -> &'static str {
        match self {
            Format::Marc21 => "MARC21",
            Format::MarcXml => "MARCXML",
            Format::Dc => "DC",
            Format::Ead => "EAD",
            Format::Isadg => "ISAD-G",
            Format::Canonical => "CANONICAL",
            Format::Frbr => "FRBR",
            Format::NTriples => "NTRIPLES",
            Format::Turtle => "TURTLE",
        }
    }

    pub fn is_source(&self) -> bool {
        matches!(
            self,
            Format::Marc21 | Format::MarcXml | Format::Dc | Format::Ead | Format::Isadg
                | Format::Canonical
        )
    }

    fn source_format(&self) -> SourceFormat {
        match self {
            Format::Marc21 => SourceFormat::Marc21,
            Format::MarcXml => SourceFormat::MarcXml,
            Format::Dc => SourceFormat::DublinCore,
            Format::Ead => SourceFormat::Ead,
            Format::Isadg => SourceFormat::IsadG,
            _ => SourceFormat::FoafRdf,
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Format {
    type Err = ConvertError;
    fn from_str(s: &str) -> Result<Format, ConvertError> {
        Format::parse_name(s)
    }
}

#[derive(Debug, Clone)]
pub struct ConversionJob {
    pub source_format: Format,
    pub target_format: Format,
    pub strict: bool,
    pub agency: String,
    pub base_uri: String,
}

impl ConversionJob {
    pub fn new(source: Format, target: Format) -> Self {
        ConversionJob {
            source_format: source,
            target_format: target,
            strict: false,
            agency: String::new(),
            base_uri: "http://example.org".to_string(),
        }
    }
}

/// One row of the shipped crosswalk CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapRow {
    pub source_field: String,
    pub subfield: Option<char>,
    pub canonical_slot: String,
    pub direction: String,
}

pub fn mapping_table() -> &'static [MapRow] {
    static TABLE: OnceLock<Vec<MapRow>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows = Vec::new();
        for line in include_str!("../data/crosswalk.csv").lines().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 4, "malformed crosswalk row {line:?}");
            rows.push(MapRow {
                source_field: cols[0].to_string(),
                subfield: cols[1].chars().next(),
                canonical_slot: cols[2].to_string(),
                direction: cols[3].to_string(),
            });
        }
        rows
    })
}

fn mapped_tags() -> &'static HashMap<String, Vec<&'static MapRow>> {
    static INDEX: OnceLock<HashMap<String, Vec<&'static MapRow>>> = OnceLock::new();
    INDEX.get_or_init(|| {
        let mut m: HashMap<String, Vec<&'static MapRow>> = HashMap::new();
        for row in mapping_table() {
            m.entry(row.source_field.clone()).or_default().push(row);
        }
        m
    })
}

fn tag_is_mapped(t: Tag) -> bool {
    mapped_tags().contains_key(t.as_str())
}

/// Unmapped material preserved across MARC→canonical→MARC round trips:
/// the original leader, whole unmapped fields at their positions, and the
/// indicators plus unmapped subfields of mapped fields keyed by
/// (tag, occurrence).
#[derive(Debug, Clone, Default)]
pub struct CarryOver {
    pub leader: Option<String>,
    pub control_fields: Vec<(usize, marc::ControlField)>,
    pub data_fields: Vec<(usize, DataField)>,
    pub mapped_indicators: HashMap<(Tag, usize), (char, char)>,
    pub mapped_extras: HashMap<(Tag, usize), Vec<Subfield>>,
}

fn carrier_from_leader(leader: &str) -> Carrier {
    match leader.as_bytes().get(6).copied().unwrap_or(b'a') as char {
        'i' | 'j' => Carrier::SoundRecording,
        'm' => Carrier::ElectronicResource,
        'b' | 'p' | 't' => Carrier::Archival,
        _ => Carrier::Text,
    }
}

fn carrier_to_leader_char(c: Carrier) -> char {
    match c {
        Carrier::Text => 'a',
        Carrier::SoundRecording => 'i',
        Carrier::ElectronicResource => 'm',
        Carrier::Archival => 'p',
    }
}

const PERSONAL_SUBFIELDS: [char; 6] = ['a', 'd', 'q', 'c', 'e', '4'];
const CORPORATE_SUBFIELDS: [char; 4] = ['a', 'b', 'e', '4'];
const MEETING_SUBFIELDS: [char; 4] = ['a', 'n', 'd', 'c'];

fn personal_from_field(f: &DataField) -> Heading {
    let name = f.subfield('a').unwrap_or("").trim_end_matches(',').trim();
    let parsed = parse_personal_name(name);
    let mut h = parsed.heading;
    if let Some(d) = f.subfield('d') {
        let parsed = parse_personal_name(&format!("X, Y, {}", d.trim().trim_end_matches(',')));
        if parsed.heading.dates.is_some() {
            h.dates = parsed.heading.dates;
        }
    }
    if let Some(q) = f.subfield('q') {
        let q = q.trim().trim_start_matches('(').trim_end_matches(')');
        h.name_parts.push(NamePart::new(PartRole::FullerForm, q));
    }
    if let Some(c) = f.subfield('c') {
        h.qualifiers.push(c.trim().to_string());
    }
    for code in ['e', '4'] {
        for rel in f.subfields_of(code) {
            h.relators.push(rel.trim().trim_end_matches([',', '.']).to_string());
        }
    }
    h
}

fn corporate_from_field(f: &DataField) -> Heading {
    let a = f.subfield('a').unwrap_or("").trim();
    let bs: Vec<&str> = f.subfields_of('b').collect();
    let mut parts = Vec::new();
    let mut qualifiers = Vec::new();
    let strip_qualifier = |text: &str, qualifiers: &mut Vec<String>| -> String {
        let text = text.trim();
        if let (Some(i), true) = (text.rfind(" ("), text.ends_with(')')) {
            qualifiers.extend(
                text[i + 2..text.len() - 1]
                    .split(" : ")
                    .map(str::to_string),
            );
            text[..i].trim().to_string()
        } else {
            text.to_string()
        }
    };
    if bs.is_empty() {
        let body = strip_qualifier(a.trim_end_matches('.'), &mut qualifiers);
        parts.push(NamePart::new(PartRole::BodyName, body));
    } else {
        parts.push(NamePart::new(PartRole::Jurisdiction, a.trim_end_matches('.')));
        for (i, b) in bs.iter().enumerate() {
            let is_last = i + 1 == bs.len();
            let text = if is_last {
                strip_qualifier(b.trim_end_matches('.'), &mut qualifiers)
            } else {
                b.trim().trim_end_matches('.').to_string()
            };
            let role = if i == 0 { PartRole::BodyName } else { PartRole::SubordinateUnit };
            parts.push(NamePart::new(role, text));
        }
    }
    let mut h = Heading {
        kind: HeadingKind::Corporate,
        name_parts: parts,
        dates: None,
        qualifiers,
        relators: Vec::new(),
        source_agency: String::new(),
    };
    for code in ['e', '4'] {
        for rel in f.subfields_of(code) {
            h.relators.push(rel.trim().trim_end_matches([',', '.']).to_string());
        }
    }
    h
}

fn meeting_from_field(f: &DataField) -> Heading {
    let name = f.subfield('a').unwrap_or("").trim().trim_end_matches('.');
    let mut h = Heading::meeting(
        name,
        f.subfield('d').map(|s| s.trim().trim_end_matches([':', ' '])),
        f.subfield('c').map(|s| s.trim().trim_end_matches(')')),
    );
    if let Some(n) = f.subfield('n') {
        h.qualifiers.push(n.trim().to_string());
    }
    h
}

fn heading_from_field(f: &DataField) -> Heading {
    match &f.tag.as_str()[1..] {
        "00" => personal_from_field(f),
        "10" => corporate_from_field(f),
        "11" => meeting_from_field(f),
        _ => personal_from_field(f),
    }
}

fn lifespan_text(h: &Heading) -> Option<String> {
    match &h.dates {
        Some(HeadingDates::Lifespan { birth, death, open_range }) => Some(match death {
            Some(d) => format!("{birth}-{d}"),
            None if *open_range => format!("{birth}-"),
            None => birth.to_string(),
        }),
        _ => None,
    }
}

fn personal_to_field(t: &str, h: &Heading) -> DataField {
    let mut f = DataField::new(t, '1', ' ');
    let mut name = h.part(PartRole::Surname).unwrap_or("").to_string();
    if let Some(fore) = h.part(PartRole::Forename) {
        name.push_str(", ");
        name.push_str(fore);
    }
    let dates = lifespan_text(h);
    if dates.is_some() {
        name.push(',');
    }
    f.subfields.push(Subfield::new('a', name));
    if let Some(q) = h.part(PartRole::FullerForm) {
        f.subfields.push(Subfield::new('q', format!("({q})")));
    }
    for c in &h.qualifiers {
        f.subfields.push(Subfield::new('c', c.clone()));
    }
    if let Some(d) = dates {
        f.subfields.push(Subfield::new('d', d));
    }
    for r in &h.relators {
        f.subfields.push(Subfield::new('e', r.clone()));
    }
    f
}

fn corporate_to_field(t: &str, h: &Heading) -> DataField {
    let jurisdiction = h.part(PartRole::Jurisdiction);
    let ind1 = if jurisdiction.is_some() { '1' } else { '2' };
    let mut f = DataField::new(t, ind1, ' ');
    let qualifier_suffix = if h.qualifiers.is_empty() {
        String::new()
    } else {
        format!(" ({})", h.qualifiers.join(" : "))
    };
    let mut units: Vec<String> = Vec::new();
    for p in &h.name_parts {
        match p.role {
            PartRole::BodyName | PartRole::SubordinateUnit => units.push(p.text.clone()),
            _ => {}
        }
    }
    match jurisdiction {
        Some(j) => {
            f.subfields.push(Subfield::new('a', format!("{j}.")));
            if units.is_empty() {
                units.push(String::new());
            }
            let last = units.len() - 1;
            for (i, u) in units.iter().enumerate() {
                let text = if i == last { format!("{u}{qualifier_suffix}") } else { u.clone() };
                f.subfields.push(Subfield::new('b', text));
            }
        }
        None => {
            let body = units.first().cloned().unwrap_or_default();
            f.subfields.push(Subfield::new('a', format!("{body}{qualifier_suffix}")));
            for u in units.iter().skip(1) {
                f.subfields.push(Subfield::new('b', u.clone()));
            }
        }
    }
    for r in &h.relators {
        f.subfields.push(Subfield::new('e', r.clone()));
    }
    f
}

fn meeting_to_field(t: &str, h: &Heading) -> DataField {
    let mut f = DataField::new(t, '2', ' ');
    f.subfields.push(Subfield::new(
        'a',
        h.part(PartRole::MeetingName).unwrap_or("").to_string(),
    ));
    for q in &h.qualifiers {
        f.subfields.push(Subfield::new('n', q.clone()));
    }
    if let Some(HeadingDates::Event { date, place }) = &h.dates {
        if let Some(d) = date {
            f.subfields.push(Subfield::new('d', d.clone()));
        }
        if let Some(p) = place {
            f.subfields.push(Subfield::new('c', p.clone()));
        }
    }
    f
}

fn heading_to_field(h: &Heading, main: bool) -> DataField {
    match h.kind {
        HeadingKind::Personal => personal_to_field(if main { "100" } else { "700" }, h),
        HeadingKind::Corporate => corporate_to_field(if main { "110" } else { "710" }, h),
        HeadingKind::Meeting => meeting_to_field(if main { "111" } else { "711" }, h),
        HeadingKind::UniformTitle => {
            let mut f = DataField::new(if main { "130" } else { "730" }, '0', ' ');
            f.subfields.push(Subfield::new('a', heading_display(h)));
            f
        }
    }
}

fn mapped_subfield_codes(t: Tag) -> &'static [char] {
    match &t.as_str()[1..] {
        "00" => &PERSONAL_SUBFIELDS,
        "10" => &CORPORATE_SUBFIELDS,
        "11" => &MEETING_SUBFIELDS,
        _ => &[],
    }
}

/// MARC → canonical. The mapping is driven by the shipped table: 100/700
/// personal, 110/710 corporate, 111/711 meeting, 130/240 uniform title,
/// 245 titles/responsibility, 246 parallel or alternative title, 260/264
/// publication, 500/518/538 notes, 024/028 identifiers, leader/06 carrier.
/// Unmapped fields land in the returned [`CarryOver`].
pub fn marc_to_canonical(r: &BibRecord) -> (CanonicalRecord, CarryOver) {
    let mut c = CanonicalRecord::new("", "", SourceFormat::Marc21);
    let mut carry = CarryOver { leader: Some(r.leader.clone()), ..CarryOver::default() };
    c.carrier = carrier_from_leader(&r.leader);

    let mut occurrence: HashMap<Tag, usize> = HashMap::new();
    for (idx, f) in r.control_fields.iter().enumerate() {
        if f.tag.as_str() == "001" {
            c.record_id = f.value.clone();
        } else {
            carry.control_fields.push((idx, f.clone()));
        }
    }

    for (idx, f) in r.data_fields.iter().enumerate() {
        if !tag_is_mapped(f.tag) {
            carry.data_fields.push((idx, f.clone()));
            continue;
        }
        let occ = {
            let e = occurrence.entry(f.tag).or_insert(0);
            let v = *e;
            *e += 1;
            v
        };
        carry.mapped_indicators.insert((f.tag, occ), (f.ind1, f.ind2));
        let keep_extras = |codes: &[char], f: &DataField, carry: &mut CarryOver| {
            let extras: Vec<Subfield> = f
                .subfields
                .iter()
                .filter(|s| !codes.contains(&s.code))
                .cloned()
                .collect();
            if !extras.is_empty() {
                carry.mapped_extras.insert((f.tag, occ), extras);
            }
        };
        match f.tag.as_str() {
            "100" | "110" | "111" => {
                keep_extras(mapped_subfield_codes(f.tag), f, &mut carry);
                let h = heading_from_field(f);
                if c.main_heading.is_none() {
                    c.main_heading = Some(h);
                } else {
                    c.added_headings.push(h);
                }
            }
            "700" | "710" | "711" => {
                keep_extras(mapped_subfield_codes(f.tag), f, &mut carry);
                c.added_headings.push(heading_from_field(f));
            }
            "130" | "240" => {
                keep_extras(&['a'], f, &mut carry);
                if c.titles.uniform.is_none() {
                    c.titles.uniform = f.subfield('a').map(|s| s.trim().to_string());
                }
            }
            "245" => {
                keep_extras(&['a', 'b', 'c'], f, &mut carry);
                if let Some(a) = f.subfield('a') {
                    c.titles.main = a.trim_end().trim_end_matches(" /").to_string();
                }
                if let Some(b) = f.subfield('b') {
                    c.titles.subtitle = Some(b.trim_end().trim_end_matches(" /").to_string());
                }
                if let Some(st) = f.subfield('c') {
                    c.responsibility.statement = st.trim().to_string();
                }
            }
            "246" => {
                keep_extras(&['a'], f, &mut carry);
                if let Some(a) = f.subfield('a') {
                    if f.ind2 == '1' {
                        c.titles.parallel.push(a.trim().to_string());
                    } else {
                        c.titles.alternative.push(a.trim().to_string());
                    }
                }
            }
            "260" | "264" => {
                keep_extras(&['a', 'b', 'c'], f, &mut carry);
                if c.publication.place.is_none() {
                    c.publication.place = f
                        .subfield('a')
                        .map(|s| s.trim().trim_end_matches([':', ' ']).to_string());
                }
                if c.publication.publisher.is_none() {
                    c.publication.publisher = f
                        .subfield('b')
                        .map(|s| s.trim().trim_end_matches([',', ' ']).to_string());
                }
                if c.publication.date.is_none() {
                    c.publication.date = f.subfield('c').map(|s| s.trim().to_string());
                }
            }
            "500" | "518" | "538" => {
                keep_extras(&['a'], f, &mut carry);
                let kind = match f.tag.as_str() {
                    "500" => NoteKind::TitleSource,
                    "518" => NoteKind::RecordingDate,
                    _ => NoteKind::AccessMode,
                };
                if let Some(a) = f.subfield('a') {
                    c.notes.push(Note::new(kind, a.trim()));
                }
            }
            "024" | "028" => {
                keep_extras(&['a'], f, &mut carry);
                let scheme = if f.tag.as_str() == "024" {
                    IdScheme::Isan
                } else {
                    IdScheme::PublisherNumber
                };
                if let (Some(a), None) = (f.subfield('a'), c.identifier(scheme)) {
                    c.identifiers.push(Identifier::new(scheme, a.trim()));
                }
            }
            _ => carry.data_fields.push((idx, f.clone())),
        }
    }
    (c, carry)
}

/// Canonical → MARC, the inverse of [`marc_to_canonical`] on mapped slots.
/// Carried-over fields are re-emitted verbatim at their original positions;
/// carried indicators and extra subfields are re-applied per (tag,
/// occurrence).
pub fn canonical_to_marc(c: &CanonicalRecord, carry: &CarryOver) -> BibRecord {
    let mut r = BibRecord::default();
    if let Some(leader) = &carry.leader {
        r.leader = leader.clone();
    }
    // mapped slot wins over the carried leader byte
    let mut leader_bytes: Vec<u8> = r.leader.bytes().collect();
    leader_bytes.resize(marc::LEADER_LEN, b' ');
    leader_bytes[6] = carrier_to_leader_char(c.carrier) as u8;
    leader_bytes[9] = b'a';
    r.leader = String::from_utf8(leader_bytes).expect("ascii leader");

    if !c.record_id.is_empty() {
        r.add_control("001", &c.record_id);
    }
    for (idx, f) in &carry.control_fields {
        let at = (*idx).min(r.control_fields.len());
        r.control_fields.insert(at, f.clone());
    }

    let mut occurrence: HashMap<Tag, usize> = HashMap::new();
    let mut push = |fields: &mut Vec<DataField>, mut f: DataField| {
        let occ = {
            let e = occurrence.entry(f.tag).or_insert(0);
            let v = *e;
            *e += 1;
            v
        };
        if let Some((i1, i2)) = carry.mapped_indicators.get(&(f.tag, occ)) {
            f.ind1 = *i1;
            f.ind2 = *i2;
        }
        if let Some(extras) = carry.mapped_extras.get(&(f.tag, occ)) {
            f.subfields.extend(extras.iter().cloned());
        }
        fields.push(f);
    };

    let mut fields: Vec<DataField> = Vec::new();
    if let Some(h) = &c.main_heading {
        push(&mut fields, heading_to_field(h, true));
    }
    if let Some(u) = &c.titles.uniform {
        let t = if c.main_heading.is_some() { "240" } else { "130" };
        let mut f = DataField::new(t, '1', '0');
        f.subfields.push(Subfield::new('a', u.clone()));
        push(&mut fields, f);
    }
    if !c.titles.main.is_empty() || c.titles.subtitle.is_some() || !c.responsibility.statement.is_empty() {
        let mut f = DataField::new("245", '1', '0');
        f.subfields.push(Subfield::new('a', c.titles.main.clone()));
        if let Some(b) = &c.titles.subtitle {
            f.subfields.push(Subfield::new('b', b.clone()));
        }
        if !c.responsibility.statement.is_empty() {
            f.subfields.push(Subfield::new('c', c.responsibility.statement.clone()));
        }
        push(&mut fields, f);
    }
    for p in &c.titles.parallel {
        let mut f = DataField::new("246", '1', '1');
        f.subfields.push(Subfield::new('a', p.clone()));
        push(&mut fields, f);
    }
    for a in &c.titles.alternative {
        let mut f = DataField::new("246", '1', '3');
        f.subfields.push(Subfield::new('a', a.clone()));
        push(&mut fields, f);
    }
    if c.publication.place.is_some() || c.publication.publisher.is_some() || c.publication.date.is_some() {
        let mut f = DataField::new("264", ' ', '1');
        if let Some(p) = &c.publication.place {
            f.subfields.push(Subfield::new('a', p.clone()));
        }
        if let Some(p) = &c.publication.publisher {
            f.subfields.push(Subfield::new('b', p.clone()));
        }
        if let Some(d) = &c.publication.date {
            f.subfields.push(Subfield::new('c', d.clone()));
        }
        push(&mut fields, f);
    }
    for n in &c.notes {
        let t = match n.kind {
            NoteKind::TitleSource => "500",
            NoteKind::RecordingDate => "518",
            NoteKind::AccessMode => "538",
            _ => continue,
        };
        let mut f = DataField::new(t, ' ', ' ');
        f.subfields.push(Subfield::new('a', n.text.clone()));
        push(&mut fields, f);
    }
    for id in &c.identifiers {
        let t = match id.scheme {
            IdScheme::Isan => "024",
            IdScheme::PublisherNumber => "028",
            _ => continue,
        };
        let ind1 = if t == "024" { '7' } else { '0' };
        let mut f = DataField::new(t, ind1, ' ');
        f.subfields.push(Subfield::new('a', id.value.clone()));
        push(&mut fields, f);
    }
    for h in &c.added_headings {
        push(&mut fields, heading_to_field(h, false));
    }

    for (idx, f) in &carry.data_fields {
        let at = (*idx).min(fields.len());
        fields.insert(at, f.clone());
    }
    r.data_fields = fields;
    r
}

// ---------------------------------------------------------------------------
// FRBR profile output (stand-in serialization: the work/expression/
// manifestation grouping as plain XML; records sharing a normalized uniform
// title collapse under one work).
// ---------------------------------------------------------------------------

pub fn serialize_frbr(records: &[CanonicalRecord]) -> String {
    let mut groups: Vec<(String, String, Vec<&CanonicalRecord>)> = Vec::new();
    for r in records {
        let work_title = r.titles.uniform.clone().unwrap_or_else(|| r.titles.main.clone());
        let key = crate::record::normalize_for_match(&work_title);
        match groups.iter_mut().find(|(k, _, _)| *k == key) {
            Some((_, _, members)) => members.push(r),
            None => groups.push((key, work_title, vec![r])),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<frbr>\n");
    for (_, work_title, members) in &groups {
        out.push_str("  <work>\n");
        out.push_str(&format!("    <title>{}</title>\n", escape_text(work_title)));
        out.push_str("    <expression>\n");
        for m in members {
            out.push_str(&format!(
                "      <manifestation carrier=\"{}\">\n",
                escape_attr(&format!("{:?}", m.carrier))
            ));
            out.push_str(&format!(
                "        <title>{}</title>\n",
                escape_text(&m.titles.main)
            ));
            if !m.responsibility.statement.is_empty() {
                out.push_str(&format!(
                    "        <responsibility>{}</responsibility>\n",
                    escape_text(&m.responsibility.statement)
                ));
            }
            if let Some(d) = &m.publication.date {
                out.push_str(&format!("        <date>{}</date>\n", escape_text(d)));
            }
            out.push_str("      </manifestation>\n");
        }
        out.push_str("    </expression>\n");
        out.push_str("  </work>\n");
    }
    out.push_str("</frbr>\n");
    out
}

// ---------------------------------------------------------------------------
// Corpus conversion driver
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct ConvertOutcome {
    pub output: Vec<u8>,
    /// Per-record failures, tagged with the record ordinal (0-based).
    pub errors: Vec<(usize, ConvertError)>,
    pub converted: usize,
}

fn utf8(input: &[u8]) -> Result<&str, ConvertError> {
    std::str::from_utf8(input).map_err(|_| ConvertError::NotUtf8)
}

/// Parse a corpus file into canonical records (with MARC carry-over when
/// the source is a MARC serialization). Each failed record is reported
/// with its ordinal; good records keep flowing.
pub fn parse_corpus(
    input: &[u8],
    format: Format,
) -> Result<(Vec<(CanonicalRecord, CarryOver)>, Vec<(usize, ConvertError)>), ConvertError> {
    if !format.is_source() {
        return Err(ConvertError::NotASource(format));
    }
    let mut records: Vec<(CanonicalRecord, CarryOver)> = Vec::new();
    let mut errors = Vec::new();
    match format {
        Format::Marc21 => {
            for (i, chunk) in marc::split_records(input).into_iter().enumerate() {
                match parse_iso2709(chunk) {
                    Ok(r) => records.push(marc_to_canonical(&r)),
                    Err(e) => errors.push((i, ConvertError::Marc(e))),
                }
            }
        }
        Format::MarcXml => {
            for r in parse_marcxml_collection(utf8(input)?)? {
                records.push(marc_to_canonical(&r));
            }
        }
        Format::Dc => {
            let text = utf8(input)?;
            let root = crate::xmlutil::parse_document(text)
                .map_err(|e| ConvertError::Codec(codecs::CodecError::MalformedXml(e)))?;
            let chunks: Vec<String> = if root.name == "records" {
                root.children_named("dc")
                    .map(|el| rebuild_dc(el))
                    .collect()
            } else {
                vec![text.to_string()]
            };
            for (i, xml) in chunks.iter().enumerate() {
                match codecs::parse_dc(xml) {
                    Ok(r) => records.push((r, CarryOver::default())),
                    Err(e) => errors.push((i, ConvertError::Codec(e))),
                }
            }
        }
        Format::Ead => {
            let text = utf8(input)?;
            let root = crate::xmlutil::parse_document(text)
                .map_err(|e| ConvertError::Codec(codecs::CodecError::MalformedXml(e)))?;
            if root.name == "records" {
                for (i, el) in root.children_named("ead").enumerate() {
                    match codecs::parse_ead(&rebuild_ead(el)) {
                        Ok(p) => records.push((p.record, CarryOver::default())),
                        Err(e) => errors.push((i, ConvertError::Codec(e))),
                    }
                }
            } else {
                match codecs::parse_ead(text) {
                    Ok(p) => records.push((p.record, CarryOver::default())),
                    Err(e) => errors.push((0, ConvertError::Codec(e))),
                }
            }
        }
        Format::Isadg => {
            for (i, chunk) in codecs::split_isadg_records(utf8(input)?).into_iter().enumerate() {
                match codecs::parse_isadg(chunk) {
                    Ok(r) => records.push((r, CarryOver::default())),
                    Err(e) => errors.push((i, ConvertError::Codec(e))),
                }
            }
        }
        Format::Canonical => {
            for (i, line) in utf8(input)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CanonicalRecord>(line) {
                    Ok(r) => records.push((r, CarryOver::default())),
                    Err(e) => errors.push((
                        i,
                        ConvertError::Codec(codecs::CodecError::MalformedXml(e.to_string())),
                    )),
                }
            }
        }
        _ => unreachable!("is_source checked above"),
    }
    if format != Format::Canonical {
        for (r, _) in &mut records {
            r.source_format = format.source_format();
        }
    }
    Ok((records, errors))
}

// The mini-DOM loses the raw text of nested documents; rebuild a standalone
// document for the per-record codec parsers.
fn rebuild_dc(el: &crate::xmlutil::Element) -> String {
    let mut out = String::from("<dc>");
    for c in &el.children {
        out.push_str(&format!("<{0}>{1}</{0}>", c.name, escape_text(&c.text)));
    }
    out.push_str("</dc>");
    out
}

fn rebuild_ead(el: &crate::xmlutil::Element) -> String {
    fn walk(el: &crate::xmlutil::Element, out: &mut String) {
        out.push('<');
        out.push_str(&el.name);
        for (k, v) in &el.attrs {
            out.push_str(&format!(" {k}=\"{}\"", escape_attr(v)));
        }
        out.push('>');
        out.push_str(&escape_text(&el.text));
        for c in &el.children {
            walk(c, out);
        }
        out.push_str(&format!("</{}>", el.name));
    }
    let mut out = String::new();
    walk(el, &mut out);
    out
}

/// Serialize a canonical corpus into the target format.
pub fn serialize_corpus(
    records: &[(CanonicalRecord, CarryOver)],
    target: Format,
    base_uri: &str,
) -> Result<Vec<u8>, ConvertError> {
    Ok(match target {
        Format::Marc21 => {
            let mut out = Vec::new();
            for (c, carry) in records {
                out.extend_from_slice(&serialize_iso2709(&canonical_to_marc(c, carry))?);
            }
            out
        }
        Format::MarcXml => {
            let marc: Vec<BibRecord> =
                records.iter().map(|(c, carry)| canonical_to_marc(c, carry)).collect();
            serialize_marcxml_collection(&marc)?.into_bytes()
        }
        Format::Dc => {
            if records.len() == 1 {
                codecs::serialize_dc(&records[0].0).into_bytes()
            } else {
                let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<records>\n");
                for (c, _) in records {
                    let doc = codecs::serialize_dc(c);
                    let body = doc.splitn(2, '\n').nth(1).unwrap_or("");
                    out.push_str(body);
                }
                out.push_str("</records>\n");
                out.into_bytes()
            }
        }
        Format::Ead => {
            if records.len() == 1 {
                codecs::serialize_ead(&records[0].0).into_bytes()
            } else {
                let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<records>\n");
                for (c, _) in records {
                    let doc = codecs::serialize_ead(c);
                    let body = doc.splitn(2, '\n').nth(1).unwrap_or("");
                    out.push_str(body);
                }
                out.push_str("</records>\n");
                out.into_bytes()
            }
        }
        Format::Isadg => {
            let mut out = String::new();
            for (i, (c, _)) in records.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&codecs::serialize_isadg(c));
            }
            out.into_bytes()
        }
        Format::Canonical => {
            let mut out = String::new();
            for (c, _) in records {
                out.push_str(&serde_json::to_string(c).expect("canonical record serializes"));
                out.push('\n');
            }
            out.into_bytes()
        }
        Format::Frbr => {
            let canon: Vec<CanonicalRecord> = records.iter().map(|(c, _)| c.clone()).collect();
            serialize_frbr(&canon).into_bytes()
        }
        Format::NTriples | Format::Turtle => {
            let mut graph = lod::TripleGraph::new(base_uri)?;
            for (i, (c, _)) in records.iter().enumerate() {
                record_into_graph(c, i, &mut graph)?;
            }
            match target {
                Format::NTriples => lod::serialize_ntriples(&graph).into_bytes(),
                _ => lod::serialize_turtle(&graph).into_bytes(),
            }
        }
    })
}

/// FOAF-flavored description of one bibliographic record: dc:title for the
/// main title, foaf:name for every heading.
fn record_into_graph(
    c: &CanonicalRecord,
    ordinal: usize,
    graph: &mut lod::TripleGraph,
) -> Result<(), lod::LodError> {
    let id = if c.record_id.is_empty() {
        format!("record-{ordinal}")
    } else {
        c.record_id.clone()
    };
    let subject = format!(
        "{}/record/{}",
        graph.base_uri().trim_end_matches('/'),
        lod::percent_encode_segment(&id)
    );
    graph.insert(lod::Triple::literal(&subject, lod::DC_TITLE, &c.titles.main, None)?);
    for h in c.headings() {
        graph.insert(lod::Triple::literal(
            &subject,
            lod::FOAF_NAME,
            &heading_display(h),
            None,
        )?);
    }
    Ok(())
}

/// Convert one record (or a whole corpus file — multi-record containers are
/// understood) between two formats.
pub fn convert(input: &[u8], job: &ConversionJob) -> Result<Vec<u8>, ConvertError> {
    let outcome = convert_corpus(input, job)?;
    match outcome.errors.into_iter().next() {
        Some((ordinal, e)) => Err(ConvertError::Record { ordinal, source: Box::new(e) }),
        None => Ok(outcome.output),
    }
}

/// Convert a corpus file; per-record failures are collected, tagged with
/// their ordinal, and do not abort the batch.
pub fn convert_corpus(input: &[u8], job: &ConversionJob) -> Result<ConvertOutcome, ConvertError> {
    let (records, errors) = parse_corpus(input, job.source_format)?;
    let converted = records.len();
    let output = serialize_corpus(&records, job.target_format, &job.base_uri)?;
    Ok(ConvertOutcome { output, errors, converted })
}
