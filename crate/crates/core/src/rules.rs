//! The rule/case system: weighted completeness scoring of candidate
//! headings, authorized-form selection, uniform-title assignment by case
//! frequency, and standard-number assignment.
//!
//! A rule weighs the features present in a heading; the deciding algorithm
//! picks the most complete candidate (argmax of the weighted sum). Cases
//! are stored precedents — input key, chosen heading, frequency — consulted
//! before rule evaluation and grown as the system is used.

use crate::record::{
    heading_display, normalize_for_match, AuthorityRecord, CanonicalRecord, Heading, HeadingDates,
    HeadingKind, IdScheme, Identifier, LinkedTitle, PartRole, VariantHeading,
};
use crate::similarity::{key_similarity, token_jaccard};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("rule {rule_id} does not apply to a {kind:?} heading")]
    RuleNotApplicable { rule_id: String, kind: HeadingKind },
    #[error("empty candidate list")]
    EmptyCandidates,
    #[error("no applicable rule for a {0:?} heading")]
    NoApplicableRule(HeadingKind),
    #[error("record {0:?} has no heading and no responsibility statement")]
    NoHeadings(String),
    #[error("rules file line {line}: {detail}")]
    RulesFile { line: usize, detail: String },
    #[error("case file line {line}: {detail}")]
    CaseFile { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The thirteen rule categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleCategory {
    PersonalAuthor,
    CorporateAuthor,
    NonGovernmental,
    Government,
    International,
    Religious,
    Event,
    Subtitle,
    ParallelTitle,
    AlternativeTitle,
    Responsibility,
    SharedResponsibility,
    MixedResponsibility,
}

impl RuleCategory {
    pub fn parse(s: &str) -> Option<RuleCategory> {
        Some(match s {
            "personal_author" => RuleCategory::PersonalAuthor,
            "corporate_author" => RuleCategory::CorporateAuthor,
            "non_governmental" => RuleCategory::NonGovernmental,
            "government" => RuleCategory::Government,
            "international" => RuleCategory::International,
            "religious" => RuleCategory::Religious,
            "event" => RuleCategory::Event,
            "subtitle" => RuleCategory::Subtitle,
            "parallel_title" => RuleCategory::ParallelTitle,
            "alternative_title" => RuleCategory::AlternativeTitle,
            "responsibility" => RuleCategory::Responsibility,
            "shared_responsibility" => RuleCategory::SharedResponsibility,
            "mixed_responsibility" => RuleCategory::MixedResponsibility,
            _ => return None,
        })
    }
}

/// Completeness features a rule can weigh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    JurisdictionPresent,
    BodyWordPresent,
    PlaceQualifierPresent,
    SurnamePresent,
    ForenamePresent,
    FullDatesPresent,
    PartialDatesPresent,
    FullerFormPresent,
    EventNumberPresent,
    EventDatePresent,
    EventPlacePresent,
}

impl Feature {
    pub fn parse(s: &str) -> Option<Feature> {
        Some(match s {
            "jurisdiction_present" => Feature::JurisdictionPresent,
            "body_word_present" => Feature::BodyWordPresent,
            "place_qualifier_present" => Feature::PlaceQualifierPresent,
            "surname_present" => Feature::SurnamePresent,
            "forename_present" => Feature::ForenamePresent,
            "full_dates_present" => Feature::FullDatesPresent,
            "partial_dates_present" => Feature::PartialDatesPresent,
            "fuller_form_present" => Feature::FullerFormPresent,
            "event_number_present" => Feature::EventNumberPresent,
            "event_date_present" => Feature::EventDatePresent,
            "event_place_present" => Feature::EventPlacePresent,
            _ => return None,
        })
    }
}

/// Features detected in a heading. FullerFormPresent covers both an
/// explicit fuller-form part and a compound surname (two or more tokens):
/// "Cervantes Saavedra" is the fuller form of "Cervantes".
pub fn features_of(h: &Heading) -> Vec<Feature> {
    let mut out = Vec::new();
    if h.part(PartRole::Jurisdiction).is_some() {
        out.push(Feature::JurisdictionPresent);
    }
    if h.part(PartRole::BodyName).is_some() {
        out.push(Feature::BodyWordPresent);
    }
    if !h.qualifiers.is_empty() {
        out.push(Feature::PlaceQualifierPresent);
    }
    if let Some(s) = h.part(PartRole::Surname) {
        out.push(Feature::SurnamePresent);
        if s.split_whitespace().count() >= 2 {
            out.push(Feature::FullerFormPresent);
        }
    }
    if h.part(PartRole::Forename).is_some() {
        out.push(Feature::ForenamePresent);
    }
    if h.part(PartRole::FullerForm).is_some() && !out.contains(&Feature::FullerFormPresent) {
        out.push(Feature::FullerFormPresent);
    }
    match &h.dates {
        Some(HeadingDates::Lifespan { death: Some(_), .. }) => out.push(Feature::FullDatesPresent),
        Some(HeadingDates::Lifespan { death: None, .. }) => out.push(Feature::PartialDatesPresent),
        Some(HeadingDates::Event { date, place }) => {
            if date.is_some() {
                out.push(Feature::EventDatePresent);
            }
            if place.is_some() {
                out.push(Feature::EventPlacePresent);
            }
        }
        None => {}
    }
    if h.kind == HeadingKind::Meeting
        && h.qualifiers.iter().any(|q| q.bytes().any(|b| b.is_ascii_digit()))
    {
        out.push(Feature::EventNumberPresent);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub rule_id: String,
    pub category: RuleCategory,
    pub feature_weights: Vec<(Feature, u32)>,
    /// Condition: the heading kinds this rule accepts.
    pub applies_to: Vec<HeadingKind>,
}

impl Rule {
    pub fn applies(&self, h: &Heading) -> bool {
        self.applies_to.contains(&h.kind)
    }

    pub fn validate(&self) -> Result<(), RulesError> {
        let mut seen = Vec::new();
        for (f, _) in &self.feature_weights {
            if seen.contains(f) {
                return Err(RulesError::RulesFile {
                    line: 0,
                    detail: format!("rule {} lists feature {f:?} twice", self.rule_id),
                });
            }
            seen.push(*f);
        }
        Ok(())
    }
}

/// Sum of the weights of features present in the heading. Pure and
/// deterministic; errors when the rule's condition rejects the heading.
pub fn score_heading(h: &Heading, r: &Rule) -> Result<u32, RulesError> {
    if !r.applies(h) {
        return Err(RulesError::RuleNotApplicable { rule_id: r.rule_id.clone(), kind: h.kind });
    }
    let present = features_of(h);
    Ok(r.feature_weights
        .iter()
        .filter(|(f, _)| present.contains(f))
        .map(|(_, w)| w)
        .sum())
}

/// Configured agency precedence: earlier entries win score ties.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgencyPriority {
    pub order: Vec<String>,
}

impl AgencyPriority {
    pub fn rank(&self, agency: &str) -> usize {
        self.order.iter().position(|a| a == agency).unwrap_or(usize::MAX)
    }
}

/// The deciding algorithm: argmax by score, ties broken by (a) configured
/// agency priority then (b) lexicographically smallest normalized form.
/// Invariant under uniform positive scaling of the rule's weights.
pub fn select_authorized<'a>(
    candidates: &'a [Heading],
    rule: &Rule,
    priority: &AgencyPriority,
) -> Result<&'a Heading, RulesError> {
    if candidates.is_empty() {
        return Err(RulesError::EmptyCandidates);
    }
    let mut best: Option<(&Heading, u32, usize, String)> = None;
    for h in candidates {
        let score = score_heading(h, rule)?;
        let rank = priority.rank(&h.source_agency);
        let norm = h.match_key();
        let better = match &best {
            None => true,
            Some((_, bs, br, bn)) => {
                (score, std::cmp::Reverse(rank), std::cmp::Reverse(norm.clone()))
                    > (*bs, std::cmp::Reverse(*br), std::cmp::Reverse(bn.clone()))
            }
        };
        if better {
            best = Some((h, score, rank, norm));
        }
    }
    Ok(best.expect("non-empty candidates").0)
}

/// A stored precedent: the normalized input it was recorded from and the
/// heading that was chosen for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub case_id: String,
    pub rule_id: String,
    pub input_key: String,
    pub heading: Heading,
    pub agency: String,
    pub frequency: u64,
}

impl Case {
    pub fn validate(&self) -> Result<(), String> {
        if self.frequency == 0 {
            return Err(format!("case {} has frequency 0", self.case_id));
        }
        if normalize_for_match(&self.input_key) != self.input_key {
            return Err(format!("case {} input_key is not normalized", self.case_id));
        }
        Ok(())
    }
}

/// FNV-1a 64-bit digest; the stable public hash behind minted local codes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Conventional rule id carried by uniform-title cases.
pub const UNIFORM_TITLE_RULE_ID: &str = "uniform-title";

/// An insertion-ordered case store with key and rule indices. Persisted as
/// JSON lines with fields exactly {case_id, rule_id, input_key, heading,
/// agency, frequency}; loading and saving a canonical file round-trips at
/// the byte level.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CaseBase {
    cases: Vec<Case>,
    by_key: HashMap<String, Vec<usize>>,
    by_rule: HashMap<String, Vec<usize>>,
}

impl CaseBase {
    pub fn new() -> CaseBase {
        CaseBase::default()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn add(&mut self, case: Case) {
        let idx = self.cases.len();
        self.by_key.entry(case.input_key.clone()).or_default().push(idx);
        self.by_rule.entry(case.rule_id.clone()).or_default().push(idx);
        self.cases.push(case);
    }

    pub fn of_rule(&self, rule_id: &str) -> impl Iterator<Item = &Case> {
        self.by_rule
            .get(rule_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.cases[i])
    }

    pub fn with_key(&self, key: &str) -> impl Iterator<Item = &Case> {
        self.by_key
            .get(key)
            .into_iter()
            .flatten()
            .map(move |&i| &self.cases[i])
    }

    fn bump_first_exact(&mut self, key: &str, kind: HeadingKind) -> bool {
        let idx = self
            .by_key
            .get(key)
            .into_iter()
            .flatten()
            .copied()
            .find(|&i| self.cases[i].heading.kind == kind);
        match idx {
            Some(i) => {
                self.cases[i].frequency += 1;
                true
            }
            None => false,
        }
    }

    fn next_case_id(&self, key: &str) -> String {
        format!("case-{:016x}", fnv1a64(format!("{key}|{}", self.cases.len()).as_bytes()))
    }

    pub fn load<R: BufRead>(reader: R) -> Result<CaseBase, RulesError> {
        let mut cb = CaseBase::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let case: Case = serde_json::from_str(&line).map_err(|e| RulesError::CaseFile {
                line: i + 1,
                detail: e.to_string(),
            })?;
            case.validate()
                .map_err(|detail| RulesError::CaseFile { line: i + 1, detail })?;
            cb.add(case);
        }
        Ok(cb)
    }

    pub fn save<W: Write>(&self, mut writer: W) -> Result<(), RulesError> {
        for case in &self.cases {
            serde_json::to_writer(&mut writer, case)
                .map_err(|e| RulesError::CaseFile { line: 0, detail: e.to_string() })?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn load_path(path: &std::path::Path) -> Result<CaseBase, RulesError> {
        let file = std::fs::File::open(path)?;
        CaseBase::load(std::io::BufReader::new(file))
    }

    pub fn save_path(&self, path: &std::path::Path) -> Result<(), RulesError> {
        let mut buf = Vec::new();
        self.save(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// Similarity gate for uniform-title case lookup.
pub const DEFAULT_THETA_TITLE: f64 = 0.80;

fn best_title_among<'a>(
    cb: &'a CaseBase,
    key: &str,
    theta_title: f64,
) -> Option<(&'a str, u64)> {
    let mut sums: Vec<(&str, u64)> = Vec::new();
    for case in cb.cases() {
        if case.heading.kind != HeadingKind::UniformTitle {
            continue;
        }
        if key_similarity(key, &case.input_key) < theta_title {
            continue;
        }
        let chosen = case
            .heading
            .name_parts
            .first()
            .map(|p| p.text.as_str())
            .unwrap_or("");
        match sums.iter_mut().find(|(t, _)| *t == chosen) {
            Some((_, sum)) => *sum += case.frequency,
            None => sums.push((chosen, case.frequency)),
        }
    }
    // max summed frequency; ties broken by the lexicographically smaller title
    sums.into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
}

/// Non-mutating query: the most-used title among cases similar to the
/// input, if any case qualifies.
pub fn most_used_title(title: &str, cb: &CaseBase, theta_title: f64) -> Option<String> {
    best_title_among(cb, &normalize_for_match(title), theta_title).map(|(t, _)| t.to_string())
}

/// Assign a uniform title by case frequency: among cases whose input key is
/// at least `theta_title`-similar, return the chosen title with the highest
/// summed frequency. An exact-key hit increments that case's frequency;
/// otherwise the decision is recorded as a new case with frequency 1. With
/// no qualifying case the input comes back unchanged (and is recorded).
pub fn assign_uniform_title(
    title: &str,
    cb: &mut CaseBase,
    theta_title: f64,
    agency: &str,
) -> String {
    let key = normalize_for_match(title);
    let winner = best_title_among(cb, &key, theta_title).map(|(t, _)| t.to_string());
    match winner {
        Some(win) => {
            if !cb.bump_first_exact(&key, HeadingKind::UniformTitle) {
                let case_id = cb.next_case_id(&key);
                cb.add(Case {
                    case_id,
                    rule_id: UNIFORM_TITLE_RULE_ID.to_string(),
                    input_key: key,
                    heading: Heading::uniform_title(&win),
                    agency: agency.to_string(),
                    frequency: 1,
                });
            }
            win
        }
        None => {
            let case_id = cb.next_case_id(&key);
            cb.add(Case {
                case_id,
                rule_id: UNIFORM_TITLE_RULE_ID.to_string(),
                input_key: key,
                heading: Heading::uniform_title(title),
                agency: agency.to_string(),
                frequency: 1,
            });
            title.to_string()
        }
    }
}

/// Standard-number precedence: ISAN, else publisher number, else a minted
/// local code "AUTH-" + FNV-1a 64 hex digest of the authorized form's match
/// key (stable across runs).
pub fn assign_standard_number(authorized: &Heading, known_ids: &[Identifier]) -> Identifier {
    for scheme in [IdScheme::Isan, IdScheme::PublisherNumber] {
        if let Some(id) = known_ids.iter().find(|i| i.scheme == scheme) {
            return id.clone();
        }
    }
    let digest = fnv1a64(authorized.match_key().as_bytes());
    Identifier::new(IdScheme::LocalCode, format!("AUTH-{digest:016x}"))
}

/// A parsed rules file: rules in file order plus the agency priority.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub priority: AgencyPriority,
}

impl RuleSet {
    /// First rule in file order whose condition accepts the heading.
    pub fn find_for(&self, h: &Heading) -> Option<&Rule> {
        self.rules.iter().find(|r| r.applies(h))
    }

    pub fn get(&self, rule_id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.rule_id == rule_id)
    }

    /// The rules shipped with the crate.
    pub fn default_rules() -> RuleSet {
        parse_rules(include_str!("../data/rules.default.txt")).expect("shipped rules parse")
    }
}

fn parse_kind(s: &str) -> Option<HeadingKind> {
    Some(match s {
        "personal" => HeadingKind::Personal,
        "corporate" => HeadingKind::Corporate,
        "meeting" => HeadingKind::Meeting,
        "uniform_title" => HeadingKind::UniformTitle,
        _ => return None,
    })
}

/// Parse the structured-text rules format (see data/rules.default.txt).
pub fn parse_rules(text: &str) -> Result<RuleSet, RulesError> {
    let mut set = RuleSet::default();
    let mut current: Option<Rule> = None;
    let err = |line: usize, detail: String| RulesError::RulesFile { line, detail };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("priority:") {
            set.priority.order = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            continue;
        }
        if let Some(id) = line.strip_prefix("rule ") {
            if let Some(rule) = current.take() {
                finish_rule(&mut set, rule, line_no)?;
            }
            current = Some(Rule {
                rule_id: id.trim().to_string(),
                category: RuleCategory::PersonalAuthor,
                feature_weights: Vec::new(),
                applies_to: Vec::new(),
            });
            continue;
        }
        let rule = current
            .as_mut()
            .ok_or_else(|| err(line_no, "directive outside a rule block".into()))?;
        if let Some(rest) = line.strip_prefix("category:") {
            rule.category = RuleCategory::parse(rest.trim())
                .ok_or_else(|| err(line_no, format!("unknown category {:?}", rest.trim())))?;
        } else if let Some(rest) = line.strip_prefix("applies:") {
            for k in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                rule.applies_to.push(
                    parse_kind(k).ok_or_else(|| err(line_no, format!("unknown kind {k:?}")))?,
                );
            }
        } else if let Some(rest) = line.strip_prefix("weights:") {
            for pair in rest.split_whitespace() {
                let (name, w) = pair
                    .split_once(':')
                    .ok_or_else(|| err(line_no, format!("weight {pair:?} is not name:int")))?;
                let feature = Feature::parse(name)
                    .ok_or_else(|| err(line_no, format!("unknown feature {name:?}")))?;
                let weight: u32 = w
                    .parse()
                    .map_err(|_| err(line_no, format!("weight {w:?} is not a non-negative integer")))?;
                rule.feature_weights.push((feature, weight));
            }
        } else {
            return Err(err(line_no, format!("unrecognized line {line:?}")));
        }
    }
    if let Some(rule) = current.take() {
        finish_rule(&mut set, rule, text.lines().count())?;
    }
    Ok(set)
}

fn finish_rule(set: &mut RuleSet, rule: Rule, line: usize) -> Result<(), RulesError> {
    rule.validate()?;
    if set.rules.iter().any(|r| r.rule_id == rule.rule_id) {
        return Err(RulesError::RulesFile {
            line,
            detail: format!("duplicate rule id {:?}", rule.rule_id),
        });
    }
    set.rules.push(rule);
    Ok(())
}

/// Token-overlap gate when gathering case candidates for a heading.
pub const DEFAULT_THETA_CASE: f64 = 0.5;

/// One audited selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleDecision {
    pub record_id: String,
    pub input_heading: String,
    pub rule_id: String,
    pub chosen_heading: String,
    pub score: u32,
    pub candidate_count: usize,
}

#[derive(Debug)]
pub struct AuthorizeOutcome {
    pub authority: AuthorityRecord,
    pub decisions: Vec<RuleDecision>,
}

fn gather_candidates(h: &Heading, rule: &Rule, cb: &CaseBase) -> Vec<Heading> {
    let own_key = h.match_key();
    let mut candidates = vec![h.clone()];
    for case in cb.of_rule(&rule.rule_id) {
        if case.heading.kind != h.kind {
            continue;
        }
        if token_jaccard(&own_key, &case.input_key) >= DEFAULT_THETA_CASE {
            let mut cand = case.heading.clone();
            if cand.source_agency.is_empty() {
                cand.source_agency = case.agency.clone();
            }
            candidates.push(cand);
        }
    }
    candidates
}

/// Apply the decision ("if, then") rules to one record: find the applicable
/// rule for each heading, gather candidates from the case base plus the
/// record's own form, select the authorized form, assign the uniform title
/// by case frequency and the standard number by precedence. Every selection
/// is logged with its rule id.
pub fn apply_decision_rules(
    record: &CanonicalRecord,
    rules: &RuleSet,
    cb: &mut CaseBase,
    theta_title: f64,
) -> Result<AuthorizeOutcome, RulesError> {
    let mut headings: Vec<Heading> = record.headings().cloned().collect();
    if headings.is_empty() {
        if record.responsibility.statement.is_empty() {
            return Err(RulesError::NoHeadings(record.record_id.clone()));
        }
        headings.push(crate::record::parse_personal_name(&record.responsibility.statement).heading);
    }

    let mut decisions = Vec::new();
    let mut primary: Option<(Heading, Vec<Heading>)> = None;
    for (i, h) in headings.iter().enumerate() {
        let rule = rules
            .find_for(h)
            .ok_or(RulesError::NoApplicableRule(h.kind))?;
        let candidates = gather_candidates(h, rule, cb);
        let chosen = select_authorized(&candidates, rule, &rules.priority)?.clone();
        decisions.push(RuleDecision {
            record_id: record.record_id.clone(),
            input_heading: heading_display(h),
            rule_id: rule.rule_id.clone(),
            chosen_heading: heading_display(&chosen),
            score: score_heading(&chosen, rule)?,
            candidate_count: candidates.len(),
        });
        if i == 0 {
            primary = Some((chosen, candidates));
        }
    }
    let (authorized, candidates) = primary.expect("at least one heading");

    let title_input = record
        .titles
        .uniform
        .clone()
        .unwrap_or_else(|| record.titles.main.clone());
    let uniform = assign_uniform_title(&title_input, cb, theta_title, &authorized.source_agency);

    let auth_key = authorized.match_key();
    let mut variants: Vec<VariantHeading> = Vec::new();
    for cand in candidates {
        if cand.match_key() == auth_key {
            continue;
        }
        let display = heading_display(&cand);
        if variants.iter().any(|v| heading_display(&v.heading) == display) {
            continue;
        }
        variants.push(VariantHeading {
            source_agency: cand.source_agency.clone(),
            heading: cand,
        });
    }

    let id = assign_standard_number(&authorized, &record.identifiers);
    let authority = AuthorityRecord {
        authority_id: id.value,
        authorized,
        variants,
        non_bibliographic: Vec::new(),
        linked_titles: vec![LinkedTitle { title: uniform, occurrence_count: 1 }],
        same_as: Vec::new(),
    };
    Ok(AuthorizeOutcome { authority, decisions })
}
