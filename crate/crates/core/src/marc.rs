//! MARC 21 records: bit-exact ISO 2709 binary reader/writer and the
//! MARCXML serialization.
//!
//! ISO 2709 framing constants: 24-byte leader, 12-byte directory entries
//! (3-digit tag, 4-digit length, 5-digit start), field terminator 0x1E,
//! subfield delimiter 0x1F, record terminator 0x1D. Only Unicode records
//! (leader/09 = 'a') are accepted; MARC-8 is out of scope.

use crate::xmlutil::{self, Element};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FIELD_TERMINATOR: u8 = 0x1E;
pub const RECORD_TERMINATOR: u8 = 0x1D;
pub const SUBFIELD_DELIMITER: u8 = 0x1F;
pub const LEADER_LEN: usize = 24;
pub const DIRECTORY_ENTRY_LEN: usize = 12;
pub const MAX_FIELD_LEN: usize = 9999;
pub const MAX_RECORD_LEN: usize = 99999;

pub const MARCXML_NAMESPACE: &str = "http://www.loc.gov/MARC21/slim";

#[derive(Debug, Error)]
pub enum MarcError {
    #[error("record truncated: declared length {declared} exceeds {actual} available bytes")]
    TruncatedRecord { declared: usize, actual: usize },
    #[error("directory mismatch at tag {tag}: {detail}")]
    DirectoryMismatch { tag: String, detail: String },
    #[error("bad leader: {0}")]
    BadLeader(String),
    #[error("unsupported encoding {0:?} at leader/09; only Unicode ('a') is supported")]
    EncodingUnsupported(char),
    #[error("field {tag} is {len} octets; the directory length is 4 digits (max {MAX_FIELD_LEN})")]
    FieldTooLong { tag: String, len: usize },
    #[error("record is {0} octets; the leader length is 5 digits (max {MAX_RECORD_LEN})")]
    RecordTooLong(usize),
    #[error("invalid tag {0:?}")]
    InvalidTag(String),
    #[error("field {tag} value contains reserved control byte {byte:#04x}")]
    ControlByteInValue { tag: String, byte: u8 },
    #[error("invalid UTF-8 in field {tag}")]
    InvalidUtf8 { tag: String },
    #[error("missing record terminator")]
    MissingRecordTerminator,
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("element {element} is missing its {attribute:?} attribute")]
    MissingTagAttribute {
        element: &'static str,
        attribute: &'static str,
    },
}

/// Three-character field tag (ASCII digits or letters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Tag([u8; 3]);

impl Tag {
    pub fn new(s: &str) -> Result<Tag, MarcError> {
        let b = s.as_bytes();
        if b.len() == 3 && b.iter().all(|c| c.is_ascii_alphanumeric()) {
            Ok(Tag([b[0], b[1], b[2]]))
        } else {
            Err(MarcError::InvalidTag(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).unwrap()
    }

    /// Control fields are 00X.
    pub fn is_control(&self) -> bool {
        self.0[0] == b'0' && self.0[1] == b'0'
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TryFrom<String> for Tag {
    type Error = String;
    fn try_from(s: String) -> Result<Tag, String> {
        Tag::new(&s).map_err(|e| e.to_string())
    }
}

impl From<Tag> for String {
    fn from(t: Tag) -> String {
        t.as_str().to_string()
    }
}

/// Convenience for literal tags in code and tests; panics on bad input.
pub fn tag(s: &str) -> Tag {
    Tag::new(s).expect("valid tag literal")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlField {
    pub tag: Tag,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subfield {
    pub code: char,
    pub value: String,
}

impl Subfield {
    pub fn new(code: char, value: impl Into<String>) -> Self {
        Subfield { code, value: value.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataField {
    pub tag: Tag,
    pub ind1: char,
    pub ind2: char,
    pub subfields: Vec<Subfield>,
}

impl DataField {
    pub fn new(t: &str, ind1: char, ind2: char) -> Self {
        DataField { tag: tag(t), ind1, ind2, subfields: Vec::new() }
    }

    pub fn with(mut self, code: char, value: &str) -> Self {
        self.subfields.push(Subfield::new(code, value));
        self
    }

    pub fn subfield(&self, code: char) -> Option<&str> {
        self.subfields
            .iter()
            .find(|s| s.code == code)
            .map(|s| s.value.as_str())
    }

    pub fn subfields_of(&self, code: char) -> impl Iterator<Item = &str> {
        self.subfields
            .iter()
            .filter(move |s| s.code == code)
            .map(|s| s.value.as_str())
    }
}

pub const DEFAULT_LEADER: &str = "00000nam a2200000   4500";

/// A parsed MARC record: 24-byte leader, ordered control fields, ordered
/// data fields. Field order is preserved exactly from the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub leader: String,
    pub control_fields: Vec<ControlField>,
    pub data_fields: Vec<DataField>,
}

impl Default for BibRecord {
    fn default() -> Self {
        BibRecord {
            leader: DEFAULT_LEADER.to_string(),
            control_fields: Vec::new(),
            data_fields: Vec::new(),
        }
    }
}

impl BibRecord {
    pub fn control(&self, t: &str) -> Option<&str> {
        let t = Tag::new(t).ok()?;
        self.control_fields
            .iter()
            .find(|f| f.tag == t)
            .map(|f| f.value.as_str())
    }

    pub fn add_control(&mut self, t: &str, value: &str) {
        self.control_fields.push(ControlField { tag: tag(t), value: value.to_string() });
    }

    pub fn field(&self, t: &str) -> Option<&DataField> {
        let t = Tag::new(t).ok()?;
        self.data_fields.iter().find(|f| f.tag == t)
    }

    pub fn fields_of<'a>(&'a self, t: &str) -> impl Iterator<Item = &'a DataField> {
        let t = Tag::new(t).ok();
        self.data_fields.iter().filter(move |f| Some(f.tag) == t)
    }

    /// Copy of the record with leader length/base-address digits recomputed
    /// from content and the structural constants (indicator count, subfield
    /// code length, entry map) forced. Serialization always emits this
    /// form; on records produced by the parser it is the identity.
    pub fn with_computed_leader(&self) -> BibRecord {
        let mut r = self.clone();
        let (record_len, base) = match self.encoded_lengths() {
            Ok(v) => v,
            Err(_) => (0, 0), // oversize; serialize_iso2709 reports properly
        };
        let mut leader: Vec<u8> = r.leader.bytes().collect();
        leader.resize(LEADER_LEN, b' ');
        leader[0..5].copy_from_slice(format!("{record_len:05}").as_bytes());
        leader[10] = b'2';
        leader[11] = b'2';
        leader[12..17].copy_from_slice(format!("{base:05}").as_bytes());
        leader[20..24].copy_from_slice(b"4500");
        r.leader = String::from_utf8(leader).expect("ascii leader digits");
        r
    }

    fn field_payloads(&self) -> Vec<(Tag, Vec<u8>)> {
        let mut out = Vec::new();
        for f in &self.control_fields {
            let mut bytes = f.value.as_bytes().to_vec();
            bytes.push(FIELD_TERMINATOR);
            out.push((f.tag, bytes));
        }
        for f in &self.data_fields {
            let mut bytes = Vec::new();
            let mut ind = [0u8; 4];
            bytes.extend_from_slice(f.ind1.encode_utf8(&mut ind).as_bytes());
            bytes.extend_from_slice(f.ind2.encode_utf8(&mut ind).as_bytes());
            for s in &f.subfields {
                bytes.push(SUBFIELD_DELIMITER);
                bytes.extend_from_slice(s.code.encode_utf8(&mut ind).as_bytes());
                bytes.extend_from_slice(s.value.as_bytes());
            }
            bytes.push(FIELD_TERMINATOR);
            out.push((f.tag, bytes));
        }
        out
    }

    fn encoded_lengths(&self) -> Result<(usize, usize), MarcError> {
        let payloads = self.field_payloads();
        let base = LEADER_LEN + DIRECTORY_ENTRY_LEN * payloads.len() + 1;
        let mut data_len = 0usize;
        for (t, bytes) in &payloads {
            if bytes.len() > MAX_FIELD_LEN {
                return Err(MarcError::FieldTooLong { tag: t.to_string(), len: bytes.len() });
            }
            data_len += bytes.len();
        }
        let total = base + data_len + 1;
        if total > MAX_RECORD_LEN {
            return Err(MarcError::RecordTooLong(total));
        }
        Ok((total, base))
    }

}

fn ascii_digits(bytes: &[u8]) -> Option<usize> {
    if bytes.iter().all(|b| b.is_ascii_digit()) {
        std::str::from_utf8(bytes).ok()?.parse().ok()
    } else {
        None
    }
}

fn check_value(t: Tag, v: &str) -> Result<(), MarcError> {
    for b in v.bytes() {
        if b < 0x20 {
            return Err(MarcError::ControlByteInValue { tag: t.to_string(), byte: b });
        }
    }
    Ok(())
}

fn validate_record(r: &BibRecord) -> Result<(), MarcError> {
    if r.leader.len() != LEADER_LEN {
        return Err(MarcError::BadLeader(format!(
            "leader must be {LEADER_LEN} characters, got {}",
            r.leader.len()
        )));
    }
    if !r.leader.is_ascii() {
        return Err(MarcError::BadLeader("leader must be ASCII".into()));
    }
    for f in &r.control_fields {
        check_value(f.tag, &f.value)?;
    }
    for f in &r.data_fields {
        for c in [f.ind1, f.ind2] {
            if !c.is_ascii() || (c as u8) < 0x20 {
                return Err(MarcError::DirectoryMismatch {
                    tag: f.tag.to_string(),
                    detail: format!("indicator {c:?} is not printable ASCII"),
                });
            }
        }
        for s in &f.subfields {
            if !s.code.is_ascii_graphic() && s.code != ' ' {
                return Err(MarcError::DirectoryMismatch {
                    tag: f.tag.to_string(),
                    detail: format!("subfield code {:?} is not printable ASCII", s.code),
                });
            }
            check_value(f.tag, &s.value)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Directory lengths/offsets must agree with actual terminator
    /// positions and tile the data region contiguously.
    #[default]
    Strict,
    /// Trust terminators over the directory: each entry's start offset is
    /// honored, the field runs to the next terminator.
    Lenient,
}

/// Parse one complete ISO 2709 record (strict directory validation).
pub fn parse_iso2709(bytes: &[u8]) -> Result<BibRecord, MarcError> {
    parse_iso2709_with(bytes, ParseMode::Strict)
}

pub fn parse_iso2709_with(bytes: &[u8], mode: ParseMode) -> Result<BibRecord, MarcError> {
    if bytes.len() < LEADER_LEN {
        return Err(MarcError::BadLeader(format!(
            "input is {} bytes, shorter than the {LEADER_LEN}-byte leader",
            bytes.len()
        )));
    }
    let declared = ascii_digits(&bytes[0..5])
        .ok_or_else(|| MarcError::BadLeader("record length positions 0-4 are not digits".into()))?;
    if declared > bytes.len() {
        return Err(MarcError::TruncatedRecord { declared, actual: bytes.len() });
    }
    if declared < LEADER_LEN + 2 {
        return Err(MarcError::BadLeader(format!("declared length {declared} is too small")));
    }
    let record = &bytes[..declared];
    let leader = std::str::from_utf8(&record[..LEADER_LEN])
        .map_err(|_| MarcError::BadLeader("leader is not UTF-8".into()))?
        .to_string();
    let coding = leader.as_bytes()[9] as char;
    if coding != 'a' {
        return Err(MarcError::EncodingUnsupported(coding));
    }
    let base = ascii_digits(&leader.as_bytes()[12..17])
        .ok_or_else(|| MarcError::BadLeader("base address positions 12-16 are not digits".into()))?;
    if base <= LEADER_LEN || base > declared {
        return Err(MarcError::BadLeader(format!("base address {base} out of range")));
    }
    if record[declared - 1] != RECORD_TERMINATOR {
        return Err(MarcError::MissingRecordTerminator);
    }
    let directory = &record[LEADER_LEN..base - 1];
    if record[base - 1] != FIELD_TERMINATOR {
        return Err(MarcError::BadLeader(
            "directory is not terminated by a field terminator at base-1".into(),
        ));
    }
    if directory.len() % DIRECTORY_ENTRY_LEN != 0 {
        return Err(MarcError::BadLeader(format!(
            "directory length {} is not a multiple of {DIRECTORY_ENTRY_LEN}",
            directory.len()
        )));
    }
    let data = &record[base..declared - 1];

    let mut out = BibRecord { leader, control_fields: Vec::new(), data_fields: Vec::new() };
    let mut expected_start = 0usize;
    for entry in directory.chunks(DIRECTORY_ENTRY_LEN) {
        let t = std::str::from_utf8(&entry[0..3])
            .ok()
            .and_then(|s| Tag::new(s).ok())
            .ok_or_else(|| MarcError::InvalidTag(String::from_utf8_lossy(&entry[0..3]).into_owned()))?;
        let len = ascii_digits(&entry[3..7]).ok_or_else(|| MarcError::DirectoryMismatch {
            tag: t.to_string(),
            detail: "length is not 4 digits".into(),
        })?;
        let start = ascii_digits(&entry[7..12]).ok_or_else(|| MarcError::DirectoryMismatch {
            tag: t.to_string(),
            detail: "start is not 5 digits".into(),
        })?;

        let field_bytes: &[u8] = match mode {
            ParseMode::Strict => {
                if start != expected_start {
                    return Err(MarcError::DirectoryMismatch {
                        tag: t.to_string(),
                        detail: format!("start {start} does not tile the data region (expected {expected_start})"),
                    });
                }
                let end = start.checked_add(len).filter(|&e| e <= data.len()).ok_or_else(|| {
                    MarcError::DirectoryMismatch {
                        tag: t.to_string(),
                        detail: format!("entry {start}+{len} exceeds data region of {}", data.len()),
                    }
                })?;
                if len == 0 || data[end - 1] != FIELD_TERMINATOR {
                    return Err(MarcError::DirectoryMismatch {
                        tag: t.to_string(),
                        detail: "field does not end with the field terminator where the directory says".into(),
                    });
                }
                expected_start = end;
                &data[start..end]
            }
            ParseMode::Lenient => {
                if start >= data.len() {
                    return Err(MarcError::DirectoryMismatch {
                        tag: t.to_string(),
                        detail: format!("start {start} beyond data region"),
                    });
                }
                let rel_end = data[start..]
                    .iter()
                    .position(|&b| b == FIELD_TERMINATOR)
                    .ok_or_else(|| MarcError::DirectoryMismatch {
                        tag: t.to_string(),
                        detail: "no field terminator after start offset".into(),
                    })?;
                &data[start..start + rel_end + 1]
            }
        };
        let content = &field_bytes[..field_bytes.len() - 1];
        let as_text = |b: &[u8]| -> Result<String, MarcError> {
            std::str::from_utf8(b)
                .map(str::to_string)
                .map_err(|_| MarcError::InvalidUtf8 { tag: t.to_string() })
        };
        if t.is_control() {
            out.control_fields.push(ControlField { tag: t, value: as_text(content)? });
        } else {
            if content.len() < 2 {
                return Err(MarcError::DirectoryMismatch {
                    tag: t.to_string(),
                    detail: "data field shorter than its two indicators".into(),
                });
            }
            let ind1 = content[0] as char;
            let ind2 = content[1] as char;
            let mut subfields = Vec::new();
            let rest = &content[2..];
            if !rest.is_empty() {
                if rest[0] != SUBFIELD_DELIMITER {
                    return Err(MarcError::DirectoryMismatch {
                        tag: t.to_string(),
                        detail: "data field content does not begin with a subfield delimiter".into(),
                    });
                }
                for chunk in rest[1..].split(|&b| b == SUBFIELD_DELIMITER) {
                    if chunk.is_empty() {
                        return Err(MarcError::DirectoryMismatch {
                            tag: t.to_string(),
                            detail: "empty subfield (missing code)".into(),
                        });
                    }
                    let text = as_text(chunk)?;
                    let mut chars = text.chars();
                    let code = chars.next().unwrap();
                    subfields.push(Subfield { code, value: chars.as_str().to_string() });
                }
            }
            out.data_fields.push(DataField { tag: t, ind1, ind2, subfields });
        }
    }
    if mode == ParseMode::Strict && expected_start != data.len() {
        return Err(MarcError::DirectoryMismatch {
            tag: "---".into(),
            detail: format!(
                "directory covers {expected_start} of {} data bytes",
                data.len()
            ),
        });
    }
    Ok(out)
}

/// Serialize to ISO 2709. Leader length and base address are recomputed;
/// the directory is written in field order (control fields first).
pub fn serialize_iso2709(r: &BibRecord) -> Result<Vec<u8>, MarcError> {
    validate_record(r)?;
    let (total, base) = r.encoded_lengths()?;
    let normalized = r.with_computed_leader();
    let payloads = r.field_payloads();

    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(normalized.leader.as_bytes());
    let mut start = 0usize;
    for (t, bytes) in &payloads {
        out.extend_from_slice(t.as_str().as_bytes());
        out.extend_from_slice(format!("{:04}", bytes.len()).as_bytes());
        out.extend_from_slice(format!("{start:05}").as_bytes());
        start += bytes.len();
    }
    out.push(FIELD_TERMINATOR);
    for (_, bytes) in &payloads {
        out.extend_from_slice(bytes);
    }
    out.push(RECORD_TERMINATOR);
    debug_assert_eq!(out.len(), total);
    debug_assert_eq!(base, LEADER_LEN + DIRECTORY_ENTRY_LEN * payloads.len() + 1);
    Ok(out)
}

/// Cut a multi-record file on the record terminator. Whitespace between
/// records is skipped; a trailing chunk without a terminator is returned
/// as-is so the caller can surface a per-record error.
pub fn split_records(bytes: &[u8]) -> Vec<&[u8]> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    while pos < bytes.len() {
        while pos < bytes.len() && (bytes[pos] as char).is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        match bytes[pos..].iter().position(|&b| b == RECORD_TERMINATOR) {
            Some(rel) => {
                out.push(&bytes[pos..pos + rel + 1]);
                pos += rel + 1;
            }
            None => {
                out.push(&bytes[pos..]);
                break;
            }
        }
    }
    out
}

fn record_xml_into(r: &BibRecord, out: &mut String, indent: usize, with_namespace: bool) {
    let pad = " ".repeat(indent);
    let normalized = r.with_computed_leader();
    if with_namespace {
        out.push_str(&format!("{pad}<record xmlns=\"{MARCXML_NAMESPACE}\">\n"));
    } else {
        out.push_str(&format!("{pad}<record>\n"));
    }
    out.push_str(&format!(
        "{pad}  <leader>{}</leader>\n",
        xmlutil::escape_text(&normalized.leader)
    ));
    for f in &r.control_fields {
        out.push_str(&format!(
            "{pad}  <controlfield tag=\"{}\">{}</controlfield>\n",
            f.tag,
            xmlutil::escape_text(&f.value)
        ));
    }
    for f in &r.data_fields {
        out.push_str(&format!(
            "{pad}  <datafield tag=\"{}\" ind1=\"{}\" ind2=\"{}\">\n",
            f.tag,
            xmlutil::escape_attr(&f.ind1.to_string()),
            xmlutil::escape_attr(&f.ind2.to_string())
        ));
        for s in &f.subfields {
            out.push_str(&format!(
                "{pad}    <subfield code=\"{}\">{}</subfield>\n",
                xmlutil::escape_attr(&s.code.to_string()),
                xmlutil::escape_text(&s.value)
            ));
        }
        out.push_str(&format!("{pad}  </datafield>\n"));
    }
    out.push_str(&format!("{pad}</record>\n"));
}

/// Serialize one record as a standalone MARCXML document (default
/// namespace, fixed attribute order, 2-space indent).
pub fn serialize_marcxml(r: &BibRecord) -> Result<String, MarcError> {
    validate_record(r)?;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    record_xml_into(r, &mut out, 0, true);
    Ok(out)
}

/// Serialize a corpus: one record emits a bare record document, several
/// are wrapped in a collection element.
pub fn serialize_marcxml_collection(records: &[BibRecord]) -> Result<String, MarcError> {
    if records.len() == 1 {
        return serialize_marcxml(&records[0]);
    }
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!("<collection xmlns=\"{MARCXML_NAMESPACE}\">\n"));
    for r in records {
        validate_record(r)?;
        record_xml_into(r, &mut out, 2, false);
    }
    out.push_str("</collection>\n");
    Ok(out)
}

fn record_from_element(el: &Element) -> Result<BibRecord, MarcError> {
    let leader = el
        .child("leader")
        .map(|l| l.text.clone())
        .ok_or_else(|| MarcError::BadLeader("missing leader element".into()))?;
    if leader.len() != LEADER_LEN {
        return Err(MarcError::BadLeader(format!(
            "leader element must hold {LEADER_LEN} characters, got {}",
            leader.len()
        )));
    }
    let mut r = BibRecord { leader, control_fields: Vec::new(), data_fields: Vec::new() };
    for child in &el.children {
        match child.name.as_str() {
            "controlfield" => {
                let t = child.attr("tag").ok_or(MarcError::MissingTagAttribute {
                    element: "controlfield",
                    attribute: "tag",
                })?;
                r.control_fields.push(ControlField {
                    tag: Tag::new(t)?,
                    value: child.text.clone(),
                });
            }
            "datafield" => {
                let t = child.attr("tag").ok_or(MarcError::MissingTagAttribute {
                    element: "datafield",
                    attribute: "tag",
                })?;
                let ind = |name: &str| child.attr(name).and_then(|s| s.chars().next()).unwrap_or(' ');
                let mut field = DataField {
                    tag: Tag::new(t)?,
                    ind1: ind("ind1"),
                    ind2: ind("ind2"),
                    subfields: Vec::new(),
                };
                for sf in child.children_named("subfield") {
                    let code = sf
                        .attr("code")
                        .and_then(|s| s.chars().next())
                        .ok_or(MarcError::MissingTagAttribute {
                            element: "subfield",
                            attribute: "code",
                        })?;
                    field.subfields.push(Subfield { code, value: sf.text.clone() });
                }
                r.data_fields.push(field);
            }
            _ => {}
        }
    }
    Ok(r)
}

/// Parse a MARCXML document holding one record.
pub fn parse_marcxml(xml: &str) -> Result<BibRecord, MarcError> {
    let root = xmlutil::parse_document(xml).map_err(MarcError::MalformedXml)?;
    let record_el = if root.name == "record" {
        &root
    } else {
        root.find("record")
            .ok_or_else(|| MarcError::MalformedXml("no record element".into()))?
    };
    record_from_element(record_el)
}

/// Parse a MARCXML document holding one record or a collection of records.
pub fn parse_marcxml_collection(xml: &str) -> Result<Vec<BibRecord>, MarcError> {
    let root = xmlutil::parse_document(xml).map_err(MarcError::MalformedXml)?;
    match root.name.as_str() {
        "record" => Ok(vec![record_from_element(&root)?]),
        "collection" => root
            .children_named("record")
            .map(record_from_element)
            .collect(),
        other => Err(MarcError::MalformedXml(format!(
            "expected record or collection, found {other:?}"
        ))),
    }
}
