//! Canonical record and heading model.
//!
//! Everything downstream (codecs, crosswalk, rules, clustering, RDF
//! emission, validation) consumes these types. All of them are immutable
//! value types: construct, validate, share.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::canonical_combining_class;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("personal heading must carry exactly one surname part, found {0}")]
    SurnameCount(usize),
    #[error("empty or whitespace-only name part")]
    EmptyNamePart,
    #[error("birth year {birth} is after death year {death}")]
    DatesReversed { birth: i32, death: i32 },
    #[error("titles.main must be non-empty")]
    EmptyMainTitle,
    #[error("duplicate identifier scheme {0}")]
    DuplicateIdentifierScheme(String),
    #[error("authorized form and a variant share the match key {0:?}")]
    VariantEqualsAuthorized(String),
    #[error("linked title {0:?} has occurrence count 0")]
    ZeroOccurrence(String),
}

/// Collapse a heading string to a match key: NFKD, diacritics stripped,
/// case-folded, punctuation to single spaces, whitespace collapsed, trimmed.
/// Deterministic and idempotent; empty input yields empty output.
pub fn normalize_for_match(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.nfkd() {
        if canonical_combining_class(c) != 0 {
            continue;
        }
        for lc in c.to_lowercase() {
            if lc.is_alphanumeric() {
                if pending_space && !out.is_empty() {
                    out.push(' ');
                }
                pending_space = false;
                out.push(lc);
            } else {
                pending_space = true;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingKind {
    Personal,
    Corporate,
    Meeting,
    UniformTitle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartRole {
    Surname,
    Forename,
    FullerForm,
    Jurisdiction,
    BodyName,
    SubordinateUnit,
    MeetingName,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NamePart {
    pub role: PartRole,
    pub text: String,
}

impl NamePart {
    pub fn new(role: PartRole, text: impl Into<String>) -> Self {
        NamePart { role, text: text.into() }
    }
}

/// Dates attached to a heading: a lifespan for persons, an event date and
/// place for meetings. An open lifespan ("1904-") keeps `death` absent and
/// sets `open_range`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HeadingDates {
    Lifespan {
        birth: i32,
        death: Option<i32>,
        open_range: bool,
    },
    Event {
        date: Option<String>,
        place: Option<String>,
    },
}

/// An access point: personal, corporate, meeting or uniform-title heading.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Heading {
    pub kind: HeadingKind,
    pub name_parts: Vec<NamePart>,
    pub dates: Option<HeadingDates>,
    pub qualifiers: Vec<String>,
    pub relators: Vec<String>,
    pub source_agency: String,
}

impl Heading {
    pub fn personal(surname: &str, forename: Option<&str>, dates: Option<(i32, Option<i32>)>) -> Self {
        let mut parts = vec![NamePart::new(PartRole::Surname, surname)];
        if let Some(f) = forename {
            parts.push(NamePart::new(PartRole::Forename, f));
        }
        Heading {
            kind: HeadingKind::Personal,
            name_parts: parts,
            dates: dates.map(|(birth, death)| HeadingDates::Lifespan {
                birth,
                death,
                open_range: false,
            }),
            qualifiers: Vec::new(),
            relators: Vec::new(),
            source_agency: String::new(),
        }
    }

    /// Degenerate personal heading for a mononym ("Homer").
    pub fn single_name(name: &str) -> Self {
        Heading::personal(name, None, None)
    }

    pub fn corporate(jurisdiction: Option<&str>, body: &str, qualifiers: &[&str]) -> Self {
        let mut parts = Vec::new();
        if let Some(j) = jurisdiction {
            parts.push(NamePart::new(PartRole::Jurisdiction, j));
        }
        parts.push(NamePart::new(PartRole::BodyName, body));
        Heading {
            kind: HeadingKind::Corporate,
            name_parts: parts,
            dates: None,
            qualifiers: qualifiers.iter().map(|q| q.to_string()).collect(),
            relators: Vec::new(),
            source_agency: String::new(),
        }
    }

    pub fn meeting(name: &str, date: Option<&str>, place: Option<&str>) -> Self {
        Heading {
            kind: HeadingKind::Meeting,
            name_parts: vec![NamePart::new(PartRole::MeetingName, name)],
            dates: Some(HeadingDates::Event {
                date: date.map(str::to_string),
                place: place.map(str::to_string),
            }),
            qualifiers: Vec::new(),
            relators: Vec::new(),
            source_agency: String::new(),
        }
    }

    pub fn uniform_title(title: &str) -> Self {
        Heading {
            kind: HeadingKind::UniformTitle,
            name_parts: vec![NamePart::new(PartRole::MeetingName, title)],
            dates: None,
            qualifiers: Vec::new(),
            relators: Vec::new(),
            source_agency: String::new(),
        }
    }

    pub fn with_agency(mut self, agency: &str) -> Self {
        self.source_agency = agency.to_string();
        self
    }

    pub fn with_relators(mut self, relators: &[&str]) -> Self {
        self.relators = relators.iter().map(|r| r.to_string()).collect();
        self
    }

    pub fn with_qualifiers(mut self, qualifiers: &[&str]) -> Self {
        self.qualifiers = qualifiers.iter().map(|q| q.to_string()).collect();
        self
    }

    pub fn part(&self, role: PartRole) -> Option<&str> {
        self.name_parts
            .iter()
            .find(|p| p.role == role)
            .map(|p| p.text.as_str())
    }

    pub fn parts(&self, role: PartRole) -> impl Iterator<Item = &str> {
        self.name_parts
            .iter()
            .filter(move |p| p.role == role)
            .map(|p| p.text.as_str())
    }

    /// A mononym: a personal heading whose only part is the surname.
    pub fn is_single_name(&self) -> bool {
        self.kind == HeadingKind::Personal
            && self.name_parts.len() == 1
            && self.name_parts[0].role == PartRole::Surname
    }

    pub fn lifespan(&self) -> Option<(i32, Option<i32>)> {
        match &self.dates {
            Some(HeadingDates::Lifespan { birth, death, .. }) => Some((*birth, *death)),
            _ => None,
        }
    }

    pub fn match_key(&self) -> String {
        normalize_for_match(&heading_display(self))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for p in &self.name_parts {
            if p.text.trim().is_empty() {
                return Err(ModelError::EmptyNamePart);
            }
        }
        if self.kind == HeadingKind::Personal {
            let surnames = self.parts(PartRole::Surname).count();
            if surnames != 1 {
                return Err(ModelError::SurnameCount(surnames));
            }
        }
        if let Some(HeadingDates::Lifespan { birth, death: Some(death), .. }) = &self.dates {
            if birth > death {
                return Err(ModelError::DatesReversed { birth: *birth, death: *death });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseWarning {
    /// A trailing token looked like dates but did not match the
    /// YYYY-YYYY / YYYY- / YYYY patterns (or was reversed); the heading is
    /// returned without dates.
    MalformedDates,
}

#[derive(Debug, Clone)]
pub struct ParsedName {
    pub heading: Heading,
    pub warnings: Vec<ParseWarning>,
}

fn parse_year_range(token: &str) -> Option<(i32, Option<i32>, bool)> {
    let token = token.trim().trim_end_matches('.');
    let (birth, rest) = token.split_at(token.len().min(4));
    if birth.len() != 4 || !birth.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let birth: i32 = birth.parse().ok()?;
    if rest.is_empty() {
        return Some((birth, None, false));
    }
    let rest = rest.strip_prefix('-')?;
    if rest.is_empty() {
        return Some((birth, None, true));
    }
    if rest.len() == 4 && rest.bytes().all(|b| b.is_ascii_digit()) {
        let death: i32 = rest.parse().ok()?;
        if birth <= death {
            return Some((birth, Some(death), false));
        }
    }
    None
}

/// Last whitespace-separated token if it carries a digit; candidates for the
/// trailing date pattern.
fn trailing_date_candidate(text: &str) -> Option<(usize, &str)> {
    let trimmed = text.trim_end();
    let start = trimmed.rfind(char::is_whitespace).map(|i| i + 1).unwrap_or(0);
    let token = &trimmed[start..];
    if token.bytes().any(|b| b.is_ascii_digit()) {
        Some((start, token))
    } else {
        None
    }
}

/// Parse a "Surname[, Forename][, dates]" heading string. A single token
/// yields a mononym. A trailing digit-bearing token that fails the strict
/// year pattern produces a [`ParseWarning::MalformedDates`] and a heading
/// without dates.
pub fn parse_personal_name(text: &str) -> ParsedName {
    let text = text.trim();
    let mut warnings = Vec::new();

    let (surname_raw, rest) = match text.find(',') {
        Some(i) => (&text[..i], text[i + 1..].trim()),
        None => (text, ""),
    };
    let surname = surname_raw.trim();

    if rest.is_empty() {
        // No forename segment; the surname itself may still end in dates
        // ("Cervantes 1547-1616" is not a layout we accept — single token
        // only), so treat the whole thing as a mononym.
        return ParsedName { heading: Heading::single_name(surname), warnings };
    }

    let mut forename_end = rest.len();
    let mut dates = None;
    if let Some((start, token)) = trailing_date_candidate(rest) {
        match parse_year_range(token) {
            Some((birth, death, open_range)) => {
                dates = Some(HeadingDates::Lifespan { birth, death, open_range });
                forename_end = start;
            }
            None => {
                warnings.push(ParseWarning::MalformedDates);
                forename_end = start;
            }
        }
    }
    let forename = rest[..forename_end]
        .trim_end()
        .trim_end_matches(',')
        .trim();

    let mut heading = if forename.is_empty() {
        Heading::single_name(surname)
    } else {
        Heading::personal(surname, Some(forename), None)
    };
    heading.dates = dates;
    ParsedName { heading, warnings }
}

/// Render a heading to its display string:
/// "Surname, Forename, birth-death" for persons,
/// "Jurisdiction. Body (Qualifier)" for corporates,
/// "Name (qualifier : date : place)" for meetings.
pub fn heading_display(h: &Heading) -> String {
    match h.kind {
        HeadingKind::Personal => {
            let mut out = h.part(PartRole::Surname).unwrap_or("").to_string();
            if let Some(f) = h.part(PartRole::Forename) {
                out.push_str(", ");
                out.push_str(f);
            }
            if let Some(ff) = h.part(PartRole::FullerForm) {
                out.push_str(" (");
                out.push_str(ff);
                out.push(')');
            }
            if let Some(HeadingDates::Lifespan { birth, death, open_range }) = &h.dates {
                out.push_str(", ");
                out.push_str(&birth.to_string());
                match death {
                    Some(d) => {
                        out.push('-');
                        out.push_str(&d.to_string());
                    }
                    None if *open_range => out.push('-'),
                    None => {}
                }
            }
            out
        }
        HeadingKind::Corporate => {
            let mut segments: Vec<&str> = Vec::new();
            for p in &h.name_parts {
                match p.role {
                    PartRole::Jurisdiction | PartRole::BodyName | PartRole::SubordinateUnit => {
                        segments.push(&p.text)
                    }
                    _ => {}
                }
            }
            let mut out = segments.join(". ");
            if !h.qualifiers.is_empty() {
                out.push_str(" (");
                out.push_str(&h.qualifiers.join(" : "));
                out.push(')');
            }
            out
        }
        HeadingKind::Meeting => {
            let mut out = h.part(PartRole::MeetingName).unwrap_or("").to_string();
            let mut inner: Vec<String> = h.qualifiers.clone();
            if let Some(HeadingDates::Event { date, place }) = &h.dates {
                if let Some(d) = date {
                    inner.push(d.clone());
                }
                if let Some(p) = place {
                    inner.push(p.clone());
                }
            }
            if !inner.is_empty() {
                out.push_str(" (");
                out.push_str(&inner.join(" : "));
                out.push(')');
            }
            out
        }
        HeadingKind::UniformTitle => h
            .name_parts
            .iter()
            .map(|p| p.text.as_str())
            .collect::<Vec<_>>()
            .join(" "),
    }
}

/// Split a corporate display string back into parts: a trailing
/// parenthetical becomes qualifiers, ". "-separated segments become
/// jurisdiction/body/subordinate units. Inverse of [`heading_display`] on
/// corporate headings this crate produces.
pub fn parse_corporate_display(text: &str) -> Heading {
    let text = text.trim();
    let (name_text, qualifiers) = match (text.rfind(" ("), text.ends_with(')')) {
        (Some(i), true) => {
            let inner = &text[i + 2..text.len() - 1];
            (
                text[..i].trim(),
                inner.split(" : ").map(str::to_string).collect(),
            )
        }
        _ => (text, Vec::new()),
    };
    let segments: Vec<&str> = name_text.split(". ").map(str::trim).collect();
    let mut parts = Vec::new();
    match segments.len() {
        0 => {}
        1 => parts.push(NamePart::new(PartRole::BodyName, segments[0])),
        _ => {
            parts.push(NamePart::new(PartRole::Jurisdiction, segments[0]));
            parts.push(NamePart::new(PartRole::BodyName, segments[1]));
            for s in &segments[2..] {
                parts.push(NamePart::new(PartRole::SubordinateUnit, *s));
            }
        }
    }
    Heading {
        kind: HeadingKind::Corporate,
        name_parts: parts,
        dates: None,
        qualifiers,
        relators: Vec::new(),
        source_agency: String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteKind {
    TitleSource,
    AccessMode,
    RecordingDate,
    OnlineAndPrintCatalogued,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub kind: NoteKind,
    pub text: String,
}

impl Note {
    pub fn new(kind: NoteKind, text: impl Into<String>) -> Self {
        Note { kind, text: text.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdScheme {
    Isan,
    PublisherNumber,
    LocalCode,
    Isbn,
    ViafId,
}

impl IdScheme {
    pub fn label(&self) -> &'static str {
        match self {
            IdScheme::Isan => "ISAN",
            IdScheme::PublisherNumber => "PUBNUM",
            IdScheme::LocalCode => "LOCAL",
            IdScheme::Isbn => "ISBN",
            IdScheme::ViafId => "VIAF",
        }
    }

    pub fn from_label(label: &str) -> Option<IdScheme> {
        match label {
            "ISAN" => Some(IdScheme::Isan),
            "PUBNUM" => Some(IdScheme::PublisherNumber),
            "LOCAL" => Some(IdScheme::LocalCode),
            "ISBN" => Some(IdScheme::Isbn),
            "VIAF" => Some(IdScheme::ViafId),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identifier {
    pub scheme: IdScheme,
    pub value: String,
}

impl Identifier {
    pub fn new(scheme: IdScheme, value: impl Into<String>) -> Self {
        Identifier { scheme, value: value.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    Text,
    SoundRecording,
    ElectronicResource,
    Archival,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    Marc21,
    MarcXml,
    DublinCore,
    Ead,
    IsadG,
    FoafRdf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Titles {
    pub main: String,
    pub subtitle: Option<String>,
    pub parallel: Vec<String>,
    pub alternative: Vec<String>,
    pub uniform: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Responsibility {
    pub statement: String,
    pub shared: Vec<Heading>,
    pub mixed: Vec<(Heading, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub place: Option<String>,
    pub publisher: Option<String>,
    pub date: Option<String>,
}

/// The format-neutral record every codec parses into and serializes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalRecord {
    pub record_id: String,
    pub titles: Titles,
    pub responsibility: Responsibility,
    pub main_heading: Option<Heading>,
    pub added_headings: Vec<Heading>,
    pub publication: Publication,
    pub notes: Vec<Note>,
    pub identifiers: Vec<Identifier>,
    pub carrier: Carrier,
    pub source_format: SourceFormat,
}

impl CanonicalRecord {
    pub fn new(record_id: &str, main_title: &str, source_format: SourceFormat) -> Self {
        CanonicalRecord {
            record_id: record_id.to_string(),
            titles: Titles { main: main_title.to_string(), ..Titles::default() },
            responsibility: Responsibility::default(),
            main_heading: None,
            added_headings: Vec::new(),
            publication: Publication::default(),
            notes: Vec::new(),
            identifiers: Vec::new(),
            carrier: Carrier::Text,
            source_format,
        }
    }

    pub fn headings(&self) -> impl Iterator<Item = &Heading> {
        self.main_heading.iter().chain(self.added_headings.iter())
    }

    pub fn notes_of(&self, kind: NoteKind) -> impl Iterator<Item = &Note> {
        self.notes.iter().filter(move |n| n.kind == kind)
    }

    pub fn identifier(&self, scheme: IdScheme) -> Option<&str> {
        self.identifiers
            .iter()
            .find(|i| i.scheme == scheme)
            .map(|i| i.value.as_str())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.titles.main.is_empty() {
            return Err(ModelError::EmptyMainTitle);
        }
        let mut seen = Vec::new();
        for id in &self.identifiers {
            if seen.contains(&id.scheme) {
                return Err(ModelError::DuplicateIdentifierScheme(
                    id.scheme.label().to_string(),
                ));
            }
            seen.push(id.scheme);
        }
        for h in self.headings() {
            h.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantHeading {
    pub heading: Heading,
    pub source_agency: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedTitle {
    pub title: String,
    pub occurrence_count: u64,
}

/// Authority record: one authorized form plus every variant form seen,
/// provenance, linked titles and sameAs links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorityRecord {
    pub authority_id: String,
    pub authorized: Heading,
    pub variants: Vec<VariantHeading>,
    pub non_bibliographic: Vec<VariantHeading>,
    pub linked_titles: Vec<LinkedTitle>,
    pub same_as: Vec<String>,
}

impl AuthorityRecord {
    pub fn validate(&self) -> Result<(), ModelError> {
        let auth_key = self.authorized.match_key();
        for v in self.variants.iter().chain(self.non_bibliographic.iter()) {
            if v.heading.match_key() == auth_key {
                return Err(ModelError::VariantEqualsAuthorized(auth_key));
            }
        }
        for t in &self.linked_titles {
            if t.occurrence_count == 0 {
                return Err(ModelError::ZeroOccurrence(t.title.clone()));
            }
        }
        Ok(())
    }
}
