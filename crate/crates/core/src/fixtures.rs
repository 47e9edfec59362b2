//! Deterministic sample data shared by tests, benchmarks and demos: the
//! 110-form Cervantes variant corpus with its alias table, ten distractor
//! authors, the Quijote uniform-title census, and small record generators.
//!
//! Everything here is pure data construction — no randomness, identical
//! output on every call.

use crate::cluster::{AliasTable, OriginKind, SourceEntry};
use crate::marc::{BibRecord, DataField};
use crate::record::{
    CanonicalRecord, Carrier, Heading, Identifier, IdScheme, Note, NoteKind, SourceFormat,
};
use crate::rules::{Case, RuleSet, UNIFORM_TITLE_RULE_ID};

/// The collocating uniform title carried by the title census.
pub const QUIJOTE_COLLOCATED_TITLE: &str = "El ingenioso hidalgo Don Quijote de la Mancha";

/// The display form of the work title linked from the variant corpus.
pub const QUIJOTE_DISPLAY_TITLE: &str = "El Ingenioso Hidalgo Don Quijote de la Mancha";

/// Match key of the base (most complete) Cervantes form.
pub const CERVANTES_BASE_KEY: &str = "cervantes saavedra miguel de 1547 1616";

const SYNTHETIC_AGENCIES: [&str; 5] = ["UCM", "CSIC", "UB", "US", "UV"];

fn cervantes_entry(heading: Heading, agency: &str) -> SourceEntry {
    SourceEntry::new(heading, agency, &[QUIJOTE_DISPLAY_TITLE], OriginKind::AuthorityFile)
}

/// The six catalogued seed forms: the complete dated form plus five
/// genuinely different shapes (dateless, short surname, inverted,
/// Cyrillic, forename-only).
pub fn cervantes_seed_entries() -> Vec<SourceEntry> {
    vec![
        cervantes_entry(
            Heading::personal("Cervantes Saavedra", Some("Miguel de"), Some((1547, Some(1616)))),
            "LC",
        ),
        cervantes_entry(Heading::personal("Cervantes Saavedra", Some("Miguel de"), None), "BNE"),
        cervantes_entry(
            Heading::personal("Cervantes", Some("Miguel de"), Some((1547, Some(1616)))),
            "UGR",
        ),
        cervantes_entry(Heading::personal("De Cervantes Saavedra", Some("Miguel"), None), "KBR"),
        cervantes_entry(
            Heading::personal("Сервантес Сааведра", Some("Мигель Де"), Some((1547, Some(1616)))),
            "RSL",
        ),
        cervantes_entry(Heading::personal("Cervantes Saavedra", Some("Miguel"), None), "BNF"),
    ]
}

/// 104 synthetic expansions in the base block, each within merge distance
/// of the base form (forename variations over the dated compound surname).
pub fn cervantes_synthetic_entries() -> Vec<SourceEntry> {
    let mut out = Vec::new();
    let mut idx = 0usize;
    let mut push = |forename: String| {
        let agency = SYNTHETIC_AGENCIES[idx % SYNTHETIC_AGENCIES.len()];
        idx += 1;
        out.push(cervantes_entry(
            Heading::personal(
                "Cervantes Saavedra",
                Some(&forename),
                Some((1547, Some(1616))),
            ),
            agency,
        ));
    };
    for c in b'A'..=b'Z' {
        push(format!("Miguel {}. de", c as char));
    }
    for c in b'A'..=b'Z' {
        push(format!("Miguel de {}.", c as char));
    }
    for c in b'A'..=b'Z' {
        push(format!("M. {}. de", c as char));
    }
    for c in b'A'..=b'Z' {
        push(format!("Miguel {}. De", c as char));
    }
    out
}

/// The full 110-form corpus: seeds plus synthetic expansions.
pub fn cervantes_variant_entries() -> Vec<SourceEntry> {
    let mut entries = cervantes_seed_entries();
    entries.extend(cervantes_synthetic_entries());
    entries
}

/// Alias pairs linking the seed forms (different blocks or below the merge
/// threshold against dated forms) to the base key.
pub fn cervantes_alias_table() -> AliasTable {
    AliasTable::new(&[
        ("cervantes saavedra miguel de", CERVANTES_BASE_KEY),
        ("cervantes miguel de 1547 1616", CERVANTES_BASE_KEY),
        ("de cervantes saavedra miguel", CERVANTES_BASE_KEY),
        ("сервантес сааведра мигель де 1547 1616", CERVANTES_BASE_KEY),
        ("cervantes saavedra miguel", CERVANTES_BASE_KEY),
    ])
}

/// Ten clearly distinct authors, one entry each: every one lands in its
/// own block, so they cluster as ten singletons.
pub fn distractor_entries() -> Vec<SourceEntry> {
    let rows: [(&str, Option<&str>, Option<(i32, Option<i32>)>, &str, &str); 10] = [
        ("Chekhov", Some("Anton Pavlovich"), Some((1860, Some(1904))), "LC", "The Cherry Orchard"),
        ("Čechov", Some("Anton P."), Some((1860, Some(1904))), "NKP", "Three Sisters"),
        ("Homer", None, None, "LC", "Iliad"),
        ("Shakespeare", Some("William"), Some((1564, Some(1616))), "BL", "Hamlet"),
        ("Austen", Some("Jane"), Some((1775, Some(1817))), "BL", "Pride and Prejudice"),
        ("García Márquez", Some("Gabriel"), Some((1927, Some(2014))), "BNC", "Cien años de soledad"),
        ("Borges", Some("Jorge Luis"), Some((1899, Some(1986))), "BNA", "Ficciones"),
        ("Tolstoy", Some("Leo"), Some((1828, Some(1910))), "RSL", "War and Peace"),
        ("Unamuno", Some("Miguel de"), Some((1864, Some(1936))), "BNE", "Niebla"),
        ("Vega", Some("Lope de"), Some((1562, Some(1635))), "BNE", "Fuenteovejuna"),
    ];
    rows.iter()
        .map(|(surname, forename, dates, agency, title)| {
            SourceEntry::new(
                Heading::personal(surname, *forename, *dates),
                agency,
                &[title],
                OriginKind::AuthorityFile,
            )
        })
        .collect()
}

/// The title census: observed title forms with their occurrence counts.
/// Forms of the Quijote record the collocating uniform title as their
/// chosen heading; the other works keep themselves.
pub fn quijote_title_census() -> Vec<Case> {
    let rows: [(&str, u64, &str); 10] = [
        ("Don Quijote de la Mancha.", 6, QUIJOTE_COLLOCATED_TITLE),
        (QUIJOTE_COLLOCATED_TITLE, 14, QUIJOTE_COLLOCATED_TITLE),
        ("Don Quixote.", 4, QUIJOTE_COLLOCATED_TITLE),
        ("Novelas ejemplares.", 6, "Novelas ejemplares."),
        (QUIJOTE_COLLOCATED_TITLE, 238, QUIJOTE_COLLOCATED_TITLE),
        ("Entremeses", 3, "Entremeses"),
        ("Don Quijote", 2, QUIJOTE_COLLOCATED_TITLE),
        ("El ingenioso hidalgo Don Quixote de la Mancha.", 12, QUIJOTE_COLLOCATED_TITLE),
        ("Don Quichotte", 18, QUIJOTE_COLLOCATED_TITLE),
        ("Don Quichotte de la Manche", 11, QUIJOTE_COLLOCATED_TITLE),
    ];
    rows.iter()
        .enumerate()
        .map(|(i, (form, frequency, chosen))| Case {
            case_id: format!("census-{i:02}"),
            rule_id: UNIFORM_TITLE_RULE_ID.to_string(),
            input_key: crate::record::normalize_for_match(form),
            heading: Heading::uniform_title(chosen),
            agency: "LC".to_string(),
            frequency: *frequency,
        })
        .collect()
}

/// Expected uniform-title assignment for every census form.
pub fn quijote_expected_assignments() -> Vec<(&'static str, &'static str)> {
    vec![
        ("Don Quijote de la Mancha.", QUIJOTE_COLLOCATED_TITLE),
        (QUIJOTE_COLLOCATED_TITLE, QUIJOTE_COLLOCATED_TITLE),
        ("Don Quixote.", QUIJOTE_COLLOCATED_TITLE),
        ("Novelas ejemplares.", "Novelas ejemplares."),
        ("Entremeses", "Entremeses"),
        ("Don Quijote", QUIJOTE_COLLOCATED_TITLE),
        ("El ingenioso hidalgo Don Quixote de la Mancha.", QUIJOTE_COLLOCATED_TITLE),
        ("Don Quichotte", QUIJOTE_COLLOCATED_TITLE),
        ("Don Quichotte de la Manche", QUIJOTE_COLLOCATED_TITLE),
    ]
}

// ---------------------------------------------------------------------------
// Record generators (deterministic, LCG-driven variety)
// ---------------------------------------------------------------------------

/// Minimal multiplicative congruential generator; enough variety for
/// structured fixtures without pulling in an RNG.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg(seed.max(1))
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 33) as u32
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.next_u32() as usize % items.len()]
    }
}

const SAMPLE_SURNAMES: [&str; 8] = [
    "Cervantes Saavedra", "Chekhov", "Austen", "García Márquez", "Vega", "Borges", "Tolstoy",
    "Unamuno",
];
const SAMPLE_FORENAMES: [&str; 6] =
    ["Miguel de", "Anton Pavlovich", "Jane", "Gabriel", "Lope de", "Jorge Luis"];
const SAMPLE_TITLES: [&str; 6] = [
    "Don Quijote de la Mancha.",
    "Novelas ejemplares.",
    "The Cherry Orchard",
    "Cien años de soledad",
    "Fuenteovejuna",
    "Ficciones",
];
const SAMPLE_PUBLISHERS: [&str; 4] =
    ["Francisco de Robles", "Adolf Marks", "T. Egerton", "Editorial Sudamericana"];
const SAMPLE_PLACES: [&str; 4] = ["Madrid", "Sankt-Peterburg", "London", "Buenos Aires"];

/// `n` structurally varied, valid MARC records (UTF-8, control fields
/// first). Deterministic in `seed`.
pub fn sample_bib_records(n: usize, seed: u64) -> Vec<BibRecord> {
    let mut lcg = Lcg::new(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = BibRecord::default();
        r.add_control("001", &format!("rec-{i:05}"));
        r.add_control("008", "210101s1605    sp            000 1 spa  ");
        let surname = lcg.pick(&SAMPLE_SURNAMES);
        let forename = lcg.pick(&SAMPLE_FORENAMES);
        let birth = 1500 + (lcg.next_u32() % 400) as i32;
        let death = birth + 30 + (lcg.next_u32() % 60) as i32;
        r.data_fields.push(
            DataField::new("100", '1', ' ')
                .with('a', &format!("{surname}, {forename},"))
                .with('d', &format!("{birth}-{death}")),
        );
        let title = lcg.pick(&SAMPLE_TITLES);
        let mut f245 = DataField::new("245", '1', '0').with('a', title);
        if lcg.next_u32() % 2 == 0 {
            f245 = f245.with('b', "a subtitle");
        }
        if lcg.next_u32() % 2 == 0 {
            f245 = f245.with('c', &format!("{forename} {surname}."));
        }
        r.data_fields.push(f245);
        if lcg.next_u32() % 3 != 0 {
            r.data_fields.push(
                DataField::new("264", ' ', '1')
                    .with('a', lcg.pick(&SAMPLE_PLACES))
                    .with('b', lcg.pick(&SAMPLE_PUBLISHERS))
                    .with('c', &format!("{}", 1500 + (lcg.next_u32() % 500))),
            );
        }
        if lcg.next_u32() % 2 == 0 {
            r.data_fields
                .push(DataField::new("650", ' ', '0').with('a', "Spanish literature"));
        }
        if lcg.next_u32() % 3 == 0 {
            r.data_fields.push(
                DataField::new("710", '2', ' ')
                    .with('a', "UNESCO")
                    .with('e', "issuing body"),
            );
        }
        out.push(r);
    }
    out
}

/// Ten fully-populated canonical records covering every carrier class and
/// note kind; the conversion-matrix corpus.
pub fn sample_canonical_records() -> Vec<CanonicalRecord> {
    let mut out = Vec::new();
    for i in 0..10usize {
        let mut r = CanonicalRecord::new(
            &format!("corpus-{i:03}"),
            SAMPLE_TITLES[i % SAMPLE_TITLES.len()],
            SourceFormat::Marc21,
        );
        let surname = SAMPLE_SURNAMES[i % SAMPLE_SURNAMES.len()];
        let forename = SAMPLE_FORENAMES[i % SAMPLE_FORENAMES.len()];
        r.main_heading = Some(Heading::personal(
            surname,
            Some(forename),
            Some((1500 + i as i32, Some(1580 + i as i32))),
        ));
        if i % 2 == 0 {
            r.added_headings.push(Heading::personal("Shelton", Some("Thomas"), None));
        }
        r.publication.place = Some(SAMPLE_PLACES[i % SAMPLE_PLACES.len()].to_string());
        r.publication.publisher = Some(SAMPLE_PUBLISHERS[i % SAMPLE_PUBLISHERS.len()].to_string());
        r.publication.date = Some(format!("{}", 1600 + i));
        r.carrier = match i % 4 {
            0 => Carrier::Text,
            1 => Carrier::SoundRecording,
            2 => Carrier::ElectronicResource,
            _ => Carrier::Archival,
        };
        match r.carrier {
            Carrier::SoundRecording => {
                r.notes.push(Note::new(NoteKind::RecordingDate, "Recorded in 1999."))
            }
            Carrier::ElectronicResource => {
                r.notes.push(Note::new(NoteKind::AccessMode, "World Wide Web."))
            }
            _ => {}
        }
        r.notes.push(Note::new(NoteKind::General, "Corpus sample."));
        if i % 3 == 0 {
            r.identifiers.push(Identifier::new(IdScheme::Isan, format!("0000-{i:04}")));
        }
        out.push(r);
    }
    out
}
