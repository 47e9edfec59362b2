//! The eleven-check record evaluation (categories A through K) and the
//! per-format error report.
//!
//! Loss-detecting checks (B, C, F, G, H, I) compare the converted record
//! against its pre-conversion canonical snapshot; the rest look at the
//! converted record alone (K consults the case base's most-used title).

use crate::crosswalk::Format;
use crate::record::{heading_display, normalize_for_match, CanonicalRecord, HeadingDates, HeadingKind, NoteKind};
use crate::rules::{most_used_title, CaseBase, DEFAULT_THETA_TITLE};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("loss-detecting checks need the pre-conversion snapshot for record {0:?}")]
    MissingSnapshot(String),
    #[error("pair {ordinal}: record ids differ ({before:?} vs {after:?})")]
    IdMismatch { ordinal: usize, before: String, after: String },
}

/// The eleven checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCategory {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 11] = [
        ErrorCategory::A,
        ErrorCategory::B,
        ErrorCategory::C,
        ErrorCategory::D,
        ErrorCategory::E,
        ErrorCategory::F,
        ErrorCategory::G,
        ErrorCategory::H,
        ErrorCategory::I,
        ErrorCategory::J,
        ErrorCategory::K,
    ];

    pub fn letter(&self) -> char {
        match self {
            ErrorCategory::A => 'a',
            ErrorCategory::B => 'b',
            ErrorCategory::C => 'c',
            ErrorCategory::D => 'd',
            ErrorCategory::E => 'e',
            ErrorCategory::F => 'f',
            ErrorCategory::G => 'g',
            ErrorCategory::H => 'h',
            ErrorCategory::I => 'i',
            ErrorCategory::J => 'j',
            ErrorCategory::K => 'k',
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ErrorCategory::A => "conference heading lacks its place or date",
            ErrorCategory::B => "corporate access point lost its relator term",
            ErrorCategory::C => "numbered conference title lost its leading ellipsis",
            ErrorCategory::D => "sound recording with missing or non-date recording information",
            ErrorCategory::E => "electronic resource without an access-mode note",
            ErrorCategory::F => "author's family qualifier lost",
            ErrorCategory::G => "online/print cataloguing declaration lost",
            ErrorCategory::H => "place or date of publication lost",
            ErrorCategory::I => "title-source note lost",
            ErrorCategory::J => "sound recording with an incorrect recording-start date",
            ErrorCategory::K => "uniform title differs from the most-used form",
        }
    }
}

impl std::fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter().to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorFinding {
    pub category: ErrorCategory,
    pub record_id: String,
    pub format: String,
    pub detail: String,
}

fn family_qualifiers(h: &crate::record::Heading) -> Vec<&str> {
    h.qualifiers
        .iter()
        .filter(|q| q.to_ascii_lowercase().contains("family"))
        .map(|q| q.as_str())
        .collect()
}

fn has_year(text: &str) -> bool {
    let bytes = text.as_bytes();
    bytes
        .windows(4)
        .enumerate()
        .any(|(i, w)| {
            w.iter().all(|b| b.is_ascii_digit())
                && (i == 0 || !bytes[i - 1].is_ascii_digit())
                && (i + 4 == bytes.len() || !bytes[i + 4].is_ascii_digit())
        })
}

/// Run the eleven checks on a converted record against its pre-conversion
/// snapshot. The case base backs check K (uniform title vs most-used form).
pub fn check_record(
    before: Option<&CanonicalRecord>,
    after: &CanonicalRecord,
    fmt: Format,
    cb: &CaseBase,
) -> Result<Vec<ErrorFinding>, ValidateError> {
    let before =
        before.ok_or_else(|| ValidateError::MissingSnapshot(after.record_id.clone()))?;
    let mut findings = Vec::new();
    let mut push = |category: ErrorCategory, detail: String| {
        findings.push(ErrorFinding {
            category,
            record_id: after.record_id.clone(),
            format: fmt.label().to_string(),
            detail,
        });
    };

    // (a) meeting access point without event place or date
    for h in after.headings().filter(|h| h.kind == HeadingKind::Meeting) {
        let complete = matches!(
            &h.dates,
            Some(HeadingDates::Event { date: Some(_), place: Some(_) })
        );
        if !complete {
            push(
                ErrorCategory::A,
                format!("meeting heading {:?} lacks its date or place", heading_display(h)),
            );
        }
    }

    // (b) relator terms lost from corporate access points
    for bh in before.headings().filter(|h| h.kind == HeadingKind::Corporate) {
        if bh.relators.is_empty() {
            continue;
        }
        let key = bh.match_key();
        if let Some(ah) = after.headings().find(|h| h.match_key() == key) {
            if ah.relators.is_empty() {
                push(
                    ErrorCategory::B,
                    format!("heading {:?} lost relators {:?}", heading_display(bh), bh.relators),
                );
            }
        }
    }

    // (c) leading ellipsis dropped from a numbered conference title
    if before.titles.main.starts_with('…') {
        let numbered = before.titles.main.chars().any(|c| c.is_ascii_digit());
        if numbered && !after.titles.main.starts_with('…') {
            push(
                ErrorCategory::C,
                format!("title {:?} lost its leading ellipsis", before.titles.main),
            );
        }
    }

    // (d)+(j) sound recordings: recording-date note absent or not a date
    if after.carrier == crate::record::Carrier::SoundRecording {
        let notes: Vec<_> = after.notes_of(NoteKind::RecordingDate).collect();
        let defective = if notes.is_empty() {
            Some("no recording-date note".to_string())
        } else if notes.iter().all(|n| !has_year(&n.text)) {
            Some(format!("recording-date note {:?} carries no date", notes[0].text))
        } else {
            None
        };
        if let Some(detail) = defective {
            push(ErrorCategory::D, detail.clone());
            push(ErrorCategory::J, detail);
        }
    }

    // (e) electronic resources must declare an access mode
    if after.carrier == crate::record::Carrier::ElectronicResource
        && after.notes_of(NoteKind::AccessMode).next().is_none()
    {
        push(ErrorCategory::E, "no access-mode note".to_string());
    }

    // (f) family qualifier lost
    for bh in before.headings() {
        let fam = family_qualifiers(bh);
        if fam.is_empty() {
            continue;
        }
        let key = bh.match_key();
        if let Some(ah) = after.headings().find(|h| h.match_key() == key) {
            if family_qualifiers(ah).is_empty() {
                push(
                    ErrorCategory::F,
                    format!("heading {:?} lost family qualifier {:?}", heading_display(bh), fam[0]),
                );
            }
        }
    }

    // (g) online/print declaration lost
    if before.notes_of(NoteKind::OnlineAndPrintCatalogued).next().is_some()
        && after.notes_of(NoteKind::OnlineAndPrintCatalogued).next().is_none()
    {
        push(ErrorCategory::G, "online/print cataloguing note lost".to_string());
    }

    // (h) publication place or date lost
    let place_lost = before.publication.place.is_some() && after.publication.place.is_none();
    let date_lost = before.publication.date.is_some() && after.publication.date.is_none();
    if place_lost || date_lost {
        push(
            ErrorCategory::H,
            format!("publication {} lost", if place_lost { "place" } else { "date" }),
        );
    }

    // (i) title-source note lost
    if before.notes_of(NoteKind::TitleSource).next().is_some()
        && after.notes_of(NoteKind::TitleSource).next().is_none()
    {
        push(ErrorCategory::I, "title-source note lost".to_string());
    }

    // (k) uniform title differs from the case base's most-used form
    if let Some(uniform) = &after.titles.uniform {
        if let Some(best) = most_used_title(uniform, cb, DEFAULT_THETA_TITLE) {
            if normalize_for_match(&best) != normalize_for_match(uniform) {
                push(
                    ErrorCategory::K,
                    format!("uniform title {uniform:?}, most-used form is {best:?}"),
                );
            }
        }
    }

    Ok(findings)
}

/// One evaluated pair: the canonical record before conversion and the
/// record parsed back from the converted output.
#[derive(Debug, Clone)]
pub struct RecordPair {
    pub before: CanonicalRecord,
    pub after: CanonicalRecord,
    pub format: Format,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// (format label, category) → count.
    pub counts: BTreeMap<String, BTreeMap<ErrorCategory, u64>>,
    pub findings: Vec<ErrorFinding>,
}

impl ErrorReport {
    pub fn count(&self, fmt: Format, category: ErrorCategory) -> u64 {
        self.counts
            .get(fmt.label())
            .and_then(|m| m.get(&category))
            .copied()
            .unwrap_or(0)
    }

    pub fn total_for_label(&self, label: &str) -> u64 {
        self.counts
            .get(label)
            .map(|m| m.values().sum())
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().flat_map(|m| m.values()).sum()
    }
}

/// Aggregate the checks over a corpus of (before, after, format) pairs.
pub fn validate_corpus(pairs: &[RecordPair], cb: &CaseBase) -> Result<ErrorReport, ValidateError> {
    let mut report = ErrorReport::default();
    for (ordinal, pair) in pairs.iter().enumerate() {
        if pair.before.record_id != pair.after.record_id {
            return Err(ValidateError::IdMismatch {
                ordinal,
                before: pair.before.record_id.clone(),
                after: pair.after.record_id.clone(),
            });
        }
        let findings = check_record(Some(&pair.before), &pair.after, pair.format, cb)?;
        for f in &findings {
            *report
                .counts
                .entry(f.format.clone())
                .or_default()
                .entry(f.category)
                .or_insert(0) += 1;
        }
        report.findings.extend(findings);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    Text,
    Csv,
}

/// Render the report: a per-format table (formats sorted by descending
/// total, alphabetical on ties) or CSV rows "format,category,count".
pub fn render_report(report: &ErrorReport, mode: ReportMode) -> String {
    let mut labels: Vec<&String> = report.counts.keys().collect();
    labels.sort_by(|a, b| {
        report
            .total_for_label(b)
            .cmp(&report.total_for_label(a))
            .then_with(|| a.cmp(b))
    });
    match mode {
        ReportMode::Csv => {
            let mut out = String::from("format,category,count\n");
            for label in labels {
                let by_cat = &report.counts[label];
                for cat in ErrorCategory::ALL {
                    if let Some(n) = by_cat.get(&cat) {
                        out.push_str(&format!("{label},{cat},{n}\n"));
                    }
                }
            }
            out
        }
        ReportMode::Text => {
            let mut out = String::new();
            out.push_str(&format!("{:<10}", "format"));
            for cat in ErrorCategory::ALL {
                out.push_str(&format!("{cat:>5}"));
            }
            out.push_str(&format!("{:>7}\n", "total"));
            for label in labels {
                let by_cat = &report.counts[label];
                out.push_str(&format!("{label:<10}"));
                for cat in ErrorCategory::ALL {
                    out.push_str(&format!("{:>5}", by_cat.get(&cat).copied().unwrap_or(0)));
                }
                out.push_str(&format!("{:>7}\n", report.total_for_label(label)));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Carrier, Heading, Note, SourceFormat};

    fn base_record(id: &str) -> CanonicalRecord {
        let mut r = CanonicalRecord::new(id, "Obras completas", SourceFormat::Marc21);
        r.publication.place = Some("Madrid".into());
        r.publication.date = Some("1605".into());
        r
    }

    #[test]
    fn meeting_without_date_or_place_fires_a() {
        let before = {
            let mut r = base_record("r1");
            r.main_heading = Some(Heading::meeting("TED", None, None));
            r
        };
        let after = before.clone();
        let findings =
            check_record(Some(&before), &after, Format::Ead, &CaseBase::new()).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].category, ErrorCategory::A);
    }

    #[test]
    fn sound_recording_without_recording_date_fires_d_and_j() {
        let mut after = base_record("r2");
        after.carrier = Carrier::SoundRecording;
        let findings =
            check_record(Some(&after.clone()), &after, Format::Marc21, &CaseBase::new()).unwrap();
        let cats: Vec<ErrorCategory> = findings.iter().map(|f| f.category).collect();
        assert_eq!(cats, vec![ErrorCategory::D, ErrorCategory::J]);
    }

    #[test]
    fn non_date_recording_note_also_fires_d_and_j() {
        let mut after = base_record("r2b");
        after.carrier = Carrier::SoundRecording;
        after.notes.push(Note::new(NoteKind::RecordingDate, "recorded sometime"));
        let findings =
            check_record(Some(&after.clone()), &after, Format::Marc21, &CaseBase::new()).unwrap();
        assert_eq!(findings.len(), 2);
        // and a proper year silences it
        after.notes[0].text = "Recorded in 1999.".into();
        let findings =
            check_record(Some(&after.clone()), &after, Format::Marc21, &CaseBase::new()).unwrap();
        assert!(findings.is_empty());
    }

    #[test]
    fn fully_populated_record_is_clean() {
        let mut r = base_record("r3");
        r.main_heading = Some(Heading::meeting("TED", Some("1984"), Some("Monterey, Calif.")));
        r.notes.push(Note::new(NoteKind::TitleSource, "Title from cover."));
        let findings = check_record(Some(&r.clone()), &r, Format::Dc, &CaseBase::new()).unwrap();
        assert!(findings.is_empty());
    }

    #[test]
    fn relator_loss_fires_b() {
        let mut before = base_record("r4");
        before.added_headings.push(
            Heading::corporate(None, "UNESCO", &[]).with_relators(&["issuing body"]),
        );
        let mut after = before.clone();
        after.added_headings[0].relators.clear();
        let findings =
            check_record(Some(&before), &after, Format::Ead, &CaseBase::new()).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].category, ErrorCategory::B);
    }

    #[test]
    fn ellipsis_loss_fires_c() {
        let mut before = base_record("r5");
        before.titles.main = "…3rd Conference on Cataloguing".into();
        let mut after = before.clone();
        after.titles.main = "3rd Conference on Cataloguing".into();
        let findings =
            check_record(Some(&before), &after, Format::Isadg, &CaseBase::new()).unwrap();
        assert_eq!(findings[0].category, ErrorCategory::C);
    }

    #[test]
    fn missing_snapshot_is_an_error() {
        let after = base_record("r6");
        assert!(matches!(
            check_record(None, &after, Format::Dc, &CaseBase::new()),
            Err(ValidateError::MissingSnapshot(_))
        ));
    }

    #[test]
    fn uniform_title_divergence_fires_k() {
        let mut cb = CaseBase::new();
        for case in crate::fixtures::quijote_title_census() {
            cb.add(case);
        }
        let mut after = base_record("r7");
        after.titles.uniform = Some("El ingenioso hidalgo Don Quixote de la Mancha.".into());
        let findings =
            check_record(Some(&after.clone()), &after, Format::Marc21, &cb).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].category, ErrorCategory::K);
        // the most-used form itself is clean
        after.titles.uniform = Some(crate::fixtures::QUIJOTE_COLLOCATED_TITLE.into());
        let findings =
            check_record(Some(&after.clone()), &after, Format::Marc21, &cb).unwrap();
        assert!(findings.is_empty());
    }

    #[test]
    fn corpus_validation_counts_and_id_mismatch() {
        let before = base_record("x");
        let mut after = before.clone();
        after.publication.place = None;
        let pairs = vec![RecordPair { before: before.clone(), after, format: Format::Dc }];
        let report = validate_corpus(&pairs, &CaseBase::new()).unwrap();
        assert_eq!(report.count(Format::Dc, ErrorCategory::H), 1);
        assert_eq!(report.total(), 1);

        let bad = vec![RecordPair {
            before,
            after: base_record("y"),
            format: Format::Dc,
        }];
        assert!(matches!(
            validate_corpus(&bad, &CaseBase::new()),
            Err(ValidateError::IdMismatch { ordinal: 0, .. })
        ));
    }

    #[test]
    fn clean_corpus_is_all_zero() {
        let pairs: Vec<RecordPair> = (0..5)
            .map(|i| {
                let r = base_record(&format!("c{i}"));
                RecordPair { before: r.clone(), after: r, format: Format::MarcXml }
            })
            .collect();
        let report = validate_corpus(&pairs, &CaseBase::new()).unwrap();
        assert_eq!(report.total(), 0);
        assert!(report.findings.is_empty());
    }

    #[test]
    fn report_rendering_orders_by_descending_total() {
        let mut report = ErrorReport::default();
        let mut add = |label: &str, cat: ErrorCategory, n: u64| {
            *report
                .counts
                .entry(label.to_string())
                .or_default()
                .entry(cat)
                .or_insert(0) += n;
        };
        add("EAD", ErrorCategory::A, 16);
        add("EAD", ErrorCategory::B, 12);
        add("EAD", ErrorCategory::G, 13);
        add("DC", ErrorCategory::E, 2);
        let text = render_report(&report, ReportMode::Text);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].starts_with("EAD"));
        assert!(lines[1].ends_with("41"));
        assert!(lines[2].starts_with("DC"));

        let csv = render_report(&report, ReportMode::Csv);
        let mut rows = csv.lines();
        assert_eq!(rows.next(), Some("format,category,count"));
        assert_eq!(rows.next(), Some("EAD,A,16"));
        assert_eq!(rows.next(), Some("EAD,B,12"));
        assert_eq!(rows.next(), Some("EAD,G,13"));
        assert_eq!(rows.next(), Some("DC,E,2"));
    }

    #[test]
    fn empty_report_renders_header_only_csv() {
        let report = ErrorReport::default();
        assert_eq!(render_report(&report, ReportMode::Csv), "format,category,count\n");
    }

    #[test]
    fn tied_totals_break_alphabetically() {
        let mut report = ErrorReport::default();
        for label in ["TURTLE", "DC"] {
            *report
                .counts
                .entry(label.to_string())
                .or_default()
                .entry(ErrorCategory::E)
                .or_insert(0) += 1;
        }
        let text = render_report(&report, ReportMode::Text);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].starts_with("DC"));
        assert!(lines[2].starts_with("TURTLE"));
    }
}
