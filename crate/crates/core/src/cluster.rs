//! Variant-form clustering: block on surname+birth-year, score pairs with
//! a fixed similarity blend, merge connected components with union-find,
//! and pick each cluster's representative with the deciding algorithm.
//!
//! Entries in different blocks are never compared; cross-script forms only
//! merge through the explicit alias table (similarity 1.0 pairs shipped as
//! data), never by fuzzy matching.

use crate::record::{
    heading_display, normalize_for_match, AuthorityRecord, Heading, HeadingDates, Identifier,
    LinkedTitle, PartRole, VariantHeading,
};
use crate::rules::{assign_standard_number, select_authorized, RuleSet};
use crate::similarity::key_similarity;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_THETA: f64 = 0.85;
pub const DEFAULT_THETA_DUP: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginKind {
    AuthorityFile,
    Database,
    Publisher,
    OrgPage,
}

/// One name form as seen in one source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub heading: Heading,
    pub agency: String,
    pub titles: Vec<String>,
    pub origin_kind: OriginKind,
}

impl SourceEntry {
    pub fn new(heading: Heading, agency: &str, titles: &[&str], origin_kind: OriginKind) -> Self {
        SourceEntry {
            heading,
            agency: agency.to_string(),
            titles: titles.iter().map(|t| t.to_string()).collect(),
            origin_kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<SourceEntry>,
    pub preferred_by_agency: BTreeMap<String, Heading>,
    pub representative: Heading,
}

/// Blocking key: normalized surname (or body/meeting name) + "|" + birth
/// year when present, "?" otherwise.
pub fn block_key(h: &Heading) -> String {
    let name = h
        .part(PartRole::Surname)
        .or_else(|| h.part(PartRole::BodyName))
        .or_else(|| h.part(PartRole::MeetingName))
        .or_else(|| h.name_parts.first().map(|p| p.text.as_str()))
        .unwrap_or("");
    let year = match &h.dates {
        Some(HeadingDates::Lifespan { birth, .. }) => birth.to_string(),
        _ => "?".to_string(),
    };
    format!("{}|{}", normalize_for_match(name), year)
}

fn title_set(titles: &[String]) -> BTreeSet<String> {
    titles.iter().map(|t| normalize_for_match(t)).collect()
}

fn date_compat(a: &Heading, b: &Heading) -> f64 {
    match (a.lifespan(), b.lifespan()) {
        (Some(da), Some(db)) => {
            if da == db {
                1.0
            } else {
                0.0
            }
        }
        _ => 0.5,
    }
}

fn title_overlap(a: &SourceEntry, b: &SourceEntry) -> f64 {
    let sa = title_set(&a.titles);
    let sb = title_set(&b.titles);
    if sa.is_empty() || sb.is_empty() {
        return 0.5;
    }
    let inter = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    inter as f64 / union as f64
}

/// Pairwise similarity: 0.6·name + 0.2·dates + 0.2·titles, symmetric.
/// Structurally identical entries short-circuit to 1.0.
pub fn pair_similarity(a: &SourceEntry, b: &SourceEntry) -> f64 {
    if a.heading == b.heading && title_set(&a.titles) == title_set(&b.titles) {
        return 1.0;
    }
    let name_sim = key_similarity(&a.heading.match_key(), &b.heading.match_key());
    0.6 * name_sim + 0.2 * date_compat(&a.heading, &b.heading) + 0.2 * title_overlap(a, b)
}

/// Match-key pairs treated as similarity 1.0 (cross-script links etc.).
/// File form: one "key_a<TAB>key_b" pair per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AliasTable {
    pairs: Vec<(String, String)>,
}

impl AliasTable {
    pub fn new(pairs: &[(&str, &str)]) -> AliasTable {
        AliasTable {
            pairs: pairs
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<AliasTable, String> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = line
                .split_once('\t')
                .ok_or_else(|| format!("alias line {} has no tab separator", i + 1))?;
            pairs.push((a.to_string(), b.to_string()));
        }
        Ok(AliasTable { pairs })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.pairs {
            out.push_str(&format!("{a}\t{b}\n"));
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn aliased(&self, key_a: &str, key_b: &str) -> bool {
        self.pairs
            .iter()
            .any(|(a, b)| (a == key_a && b == key_b) || (a == key_b && b == key_a))
    }
}

/// Deterministic union-find with path compression and union by rank.
#[derive(Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Canonical sort key: entries are processed in this order everywhere, so
/// clustering is invariant under input permutation.
fn sort_key(e: &SourceEntry) -> (String, String, String, String) {
    (
        block_key(&e.heading),
        e.heading.match_key(),
        heading_display(&e.heading),
        format!("{}|{:?}|{}", e.agency, e.origin_kind, e.titles.join("\u{1f}")),
    )
}

#[derive(Debug, Clone)]
pub struct Clusterer {
    pub theta: f64,
    pub rules: RuleSet,
    pub alias: AliasTable,
}

impl Clusterer {
    pub fn new(theta: f64) -> Clusterer {
        Clusterer { theta, rules: RuleSet::default_rules(), alias: AliasTable::default() }
    }

    pub fn with_alias(mut self, alias: AliasTable) -> Clusterer {
        self.alias = alias;
        self
    }

    pub fn with_rules(mut self, rules: RuleSet) -> Clusterer {
        self.rules = rules;
        self
    }

    /// Cluster the entries: within each block, edges where similarity ≥ θ;
    /// alias-table pairs are edges regardless of block; clusters are the
    /// connected components. Deterministic for any input order.
    pub fn cluster(&self, entries: &[SourceEntry]) -> Vec<Cluster> {
        let mut ordered: Vec<SourceEntry> = entries.to_vec();
        ordered.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));

        let keys: Vec<String> = ordered.iter().map(|e| e.heading.match_key()).collect();
        let mut blocks: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in ordered.iter().enumerate() {
            blocks.entry(block_key(&e.heading)).or_default().push(i);
        }

        let mut uf = UnionFind::new(ordered.len());
        for members in blocks.values() {
            for (pos, &i) in members.iter().enumerate() {
                for &j in &members[pos + 1..] {
                    if pair_similarity(&ordered[i], &ordered[j]) >= self.theta {
                        uf.union(i, j);
                    }
                }
            }
        }
        if !self.alias.is_empty() {
            for i in 0..ordered.len() {
                for j in i + 1..ordered.len() {
                    if self.alias.aliased(&keys[i], &keys[j]) {
                        uf.union(i, j);
                    }
                }
            }
        }

        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..ordered.len() {
            let root = uf.find(i);
            groups.entry(root).or_default().push(i);
        }
        let mut clusters: Vec<Cluster> = Vec::new();
        for indices in groups.values() {
            let members: Vec<SourceEntry> =
                indices.iter().map(|&i| ordered[i].clone()).collect();
            let representative = self.pick_representative(&members);
            let mut preferred_by_agency = BTreeMap::new();
            let mut by_agency: BTreeMap<&str, Vec<&Heading>> = BTreeMap::new();
            for m in &members {
                by_agency.entry(m.agency.as_str()).or_default().push(&m.heading);
            }
            for (agency, headings) in by_agency {
                let owned: Vec<Heading> = headings.into_iter().cloned().collect();
                let preferred = self.pick_from(&owned);
                preferred_by_agency.insert(agency.to_string(), preferred);
            }
            clusters.push(Cluster { members, preferred_by_agency, representative });
        }
        // groups is keyed by root index over the canonically-sorted list, so
        // cluster order follows the smallest member; re-sort for stability.
        clusters.sort_by(|a, b| sort_key(&a.members[0]).cmp(&sort_key(&b.members[0])));
        clusters
    }

    fn pick_representative(&self, members: &[SourceEntry]) -> Heading {
        let headings: Vec<Heading> = members.iter().map(|m| m.heading.clone()).collect();
        self.pick_from(&headings)
    }

    fn pick_from(&self, headings: &[Heading]) -> Heading {
        if let Some(rule) = self.rules.find_for(&headings[0]) {
            if let Ok(h) = select_authorized(headings, rule, &self.rules.priority) {
                return h.clone();
            }
        }
        // no applicable rule (or mixed kinds): smallest normalized form
        headings
            .iter()
            .min_by_key(|h| h.match_key())
            .expect("non-empty members")
            .clone()
    }
}

/// Convenience wrapper over [`Clusterer`].
pub fn cluster(entries: &[SourceEntry], theta: f64) -> Vec<Cluster> {
    Clusterer::new(theta).cluster(entries)
}

/// Build the authority record for one cluster: representative as the
/// authorized form, library/database forms as variants, publisher/org-page
/// forms as non-bibliographic entries, titles counted across members.
pub fn authority_from_cluster(
    cluster: &Cluster,
    known_ids: &[Identifier],
    same_as: &[String],
) -> AuthorityRecord {
    let authorized = cluster.representative.clone();
    let auth_key = authorized.match_key();
    let mut variants: Vec<VariantHeading> = Vec::new();
    let mut non_bibliographic: Vec<VariantHeading> = Vec::new();
    let mut seen_variants: BTreeSet<String> = BTreeSet::new();
    let mut seen_non_bib: BTreeSet<String> = BTreeSet::new();

    let mut title_counts: Vec<(String, u64)> = Vec::new();
    for m in &cluster.members {
        for t in &m.titles {
            match title_counts.iter_mut().find(|(x, _)| x == t) {
                Some((_, n)) => *n += 1,
                None => title_counts.push((t.clone(), 1)),
            }
        }
        if m.heading.match_key() == auth_key {
            continue;
        }
        let display = heading_display(&m.heading);
        let v = VariantHeading { heading: m.heading.clone(), source_agency: m.agency.clone() };
        match m.origin_kind {
            OriginKind::Publisher | OriginKind::OrgPage => {
                if seen_non_bib.insert(display) {
                    non_bibliographic.push(v);
                }
            }
            _ => {
                if seen_variants.insert(display) {
                    variants.push(v);
                }
            }
        }
    }
    title_counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let id = assign_standard_number(&authorized, known_ids);
    AuthorityRecord {
        authority_id: id.value,
        authorized,
        variants,
        non_bibliographic,
        linked_titles: title_counts
            .into_iter()
            .map(|(title, occurrence_count)| LinkedTitle { title, occurrence_count })
            .collect(),
        same_as: same_as.to_vec(),
    }
}

/// All pairs of authority records whose authorized headings share a block
/// (or an alias link) and exceed `theta_dup`, sorted by descending
/// similarity. A record is never paired with itself.
pub fn detect_duplicates(
    store: &[AuthorityRecord],
    theta_dup: f64,
    alias: &AliasTable,
) -> Vec<(String, String, f64)> {
    let entries: Vec<(usize, SourceEntry, String)> = store
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let titles: Vec<String> = a.linked_titles.iter().map(|t| t.title.clone()).collect();
            let entry = SourceEntry {
                heading: a.authorized.clone(),
                agency: String::new(),
                titles,
                origin_kind: OriginKind::AuthorityFile,
            };
            let key = a.authorized.match_key();
            (i, entry, key)
        })
        .collect();

    let mut pairs: Vec<(String, String, f64)> = Vec::new();
    for x in 0..entries.len() {
        for y in x + 1..entries.len() {
            let (i, ea, ka) = &entries[x];
            let (j, eb, kb) = &entries[y];
            let same_block = block_key(&ea.heading) == block_key(&eb.heading);
            let aliased = alias.aliased(ka, kb);
            if !same_block && !aliased {
                continue;
            }
            let sim = if aliased { 1.0 } else { pair_similarity(ea, eb) };
            if sim >= theta_dup {
                let (a_id, b_id) = (store[*i].authority_id.clone(), store[*j].authority_id.clone());
                let (a_id, b_id) = if a_id <= b_id { (a_id, b_id) } else { (b_id, a_id) };
                pairs.push((a_id, b_id, sim));
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::parse_personal_name;

    fn entry(form: &str, agency: &str, titles: &[&str]) -> SourceEntry {
        SourceEntry::new(
            parse_personal_name(form).heading,
            agency,
            titles,
            OriginKind::AuthorityFile,
        )
    }

    #[test]
    fn block_key_examples() {
        let h = parse_personal_name("Chekhov, Anton Pavlovich, 1860-1904").heading;
        assert_eq!(block_key(&h), "chekhov|1860");
        let h = parse_personal_name("Homer").heading;
        assert_eq!(block_key(&h), "homer|?");
        let h = parse_personal_name("Čechov, Anton P. 1860-1904").heading;
        assert_eq!(block_key(&h), "cechov|1860");
    }

    #[test]
    fn identical_entries_score_one() {
        let a = entry("Cervantes, Miguel de, 1547-1616", "LC", &[]);
        assert_eq!(pair_similarity(&a, &a.clone()), 1.0);
    }

    #[test]
    fn conflicting_dates_cap_similarity() {
        let a = entry("Cervantes, Miguel de, 1547-1616", "LC", &["Don Quijote de la Mancha."]);
        let b = entry("Cervantes, Miguel de, 1647-1716", "BNE", &["Don Quijote de la Mancha."]);
        let sim = pair_similarity(&a, &b);
        assert!(sim <= 0.8, "sim {sim} should be capped by the date conflict");
        assert_eq!(pair_similarity(&a, &b), pair_similarity(&b, &a));
    }

    #[test]
    fn shared_title_variants_cross_the_merge_threshold() {
        // name keys differ by the 9-char " saavedra" infix over 38 chars:
        // 0.6·(29/38) + 0.2·1.0 + 0.2·1.0 = 0.8578947…
        let a = entry(
            "Cervantes Saavedra, Miguel de, 1547-1616",
            "LC",
            &["Don Quijote de la Mancha."],
        );
        let b = entry(
            "Cervantes, Miguel de, 1547-1616",
            "BNE",
            &["Don Quijote de la Mancha."],
        );
        let sim = pair_similarity(&a, &b);
        assert!((sim - (0.6 * (29.0 / 38.0) + 0.4)).abs() < 1e-12);
        assert!(sim >= DEFAULT_THETA);
    }

    #[test]
    fn different_blocks_never_merge() {
        let a = entry("Chekhov, Anton Pavlovich, 1860-1904", "LC", &[]);
        let b = entry("Čechov, Anton P. 1860-1904", "BNE", &[]);
        let clusters = cluster(&[a, b], 0.1);
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn alias_table_bridges_blocks() {
        let a = entry("Chekhov, Anton Pavlovich, 1860-1904", "LC", &[]);
        let b = entry("Čechov, Anton P. 1860-1904", "BNE", &[]);
        let alias = AliasTable::new(&[(
            "chekhov anton pavlovich 1860 1904",
            "cechov anton p 1860 1904",
        )]);
        let clusters = Clusterer::new(0.85).with_alias(alias).cluster(&[a, b]);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members.len(), 2);
    }

    /// Brute-force oracle: transitive closure of the thresholded similarity
    /// matrix (blocks and aliases respected), as member index sets.
    fn brute_force_clusters(
        entries: &[SourceEntry],
        theta: f64,
        alias: &AliasTable,
    ) -> BTreeSet<BTreeSet<String>> {
        let n = entries.len();
        let mut adjacent = vec![vec![false; n]; n];
        for i in 0..n {
            adjacent[i][i] = true;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let same_block =
                    block_key(&entries[i].heading) == block_key(&entries[j].heading);
                let aliased = alias.aliased(
                    &entries[i].heading.match_key(),
                    &entries[j].heading.match_key(),
                );
                if (same_block && pair_similarity(&entries[i], &entries[j]) >= theta) || aliased {
                    adjacent[i][j] = true;
                }
            }
        }
        // Warshall transitive closure
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if adjacent[i][k] && adjacent[k][j] {
                        adjacent[i][j] = true;
                    }
                }
            }
        }
        let mut out: BTreeSet<BTreeSet<String>> = BTreeSet::new();
        for i in 0..n {
            let set: BTreeSet<String> = (0..n)
                .filter(|&j| adjacent[i][j])
                .map(|j| format!("{}#{}", heading_display(&entries[j].heading), entries[j].agency))
                .collect();
            out.insert(set);
        }
        out
    }

    fn clusters_as_sets(clusters: &[Cluster]) -> BTreeSet<BTreeSet<String>> {
        clusters
            .iter()
            .map(|c| {
                c.members
                    .iter()
                    .map(|m| format!("{}#{}", heading_display(&m.heading), m.agency))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn five_entry_corpus_matches_brute_force() {
        let entries = vec![
            entry("Cervantes Saavedra, Miguel de, 1547-1616", "LC", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, Miguel, 1547-1616", "BNE", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, M. de, 1547-1616", "UGR", &["Novelas ejemplares."]),
            entry("Shakespeare, William, 1564-1616", "LC", &["Hamlet"]),
            entry("Shakespeare, W., 1564-1616", "BL", &["Hamlet"]),
        ];
        let alias = AliasTable::default();
        let got = clusters_as_sets(&cluster(&entries, DEFAULT_THETA));
        let want = brute_force_clusters(&entries, DEFAULT_THETA, &alias);
        assert_eq!(got, want);
    }

    #[test]
    fn order_invariance() {
        let mut entries = vec![
            entry("Cervantes Saavedra, Miguel de, 1547-1616", "LC", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, Miguel, 1547-1616", "BNE", &["Don Quijote de la Mancha."]),
            entry("Shakespeare, William, 1564-1616", "LC", &["Hamlet"]),
            entry("Vega, Lope de, 1562-1635", "BNE", &["Fuenteovejuna"]),
        ];
        let forward = cluster(&entries, DEFAULT_THETA);
        entries.reverse();
        let backward = cluster(&entries, DEFAULT_THETA);
        assert_eq!(forward, backward);
    }

    #[test]
    fn theta_monotonicity_refines_clusters() {
        let entries = vec![
            entry("Cervantes Saavedra, Miguel de, 1547-1616", "LC", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, Miguel, 1547-1616", "BNE", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, M. d., 1547-1616", "UGR", &["Entremeses"]),
        ];
        let coarse = cluster(&entries, 0.80);
        let fine = cluster(&entries, 0.95);
        // every fine cluster fits inside one coarse cluster
        for f in clusters_as_sets(&fine) {
            assert!(
                clusters_as_sets(&coarse).iter().any(|c| f.is_subset(c)),
                "fine cluster {f:?} is not a refinement"
            );
        }
    }

    #[test]
    fn representative_is_a_member_and_most_complete() {
        let entries = vec![
            entry("Cervantes Saavedra, Miguel de, 1547-1616", "LC", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, Miguel de", "BNE", &["Don Quijote de la Mancha."]),
        ];
        let alias = AliasTable::new(&[(
            "cervantes saavedra miguel de 1547 1616",
            "cervantes saavedra miguel de",
        )]);
        let clusters = Clusterer::new(DEFAULT_THETA).with_alias(alias).cluster(&entries);
        assert_eq!(clusters.len(), 1);
        let c = &clusters[0];
        assert!(c.members.iter().any(|m| m.heading == c.representative));
        assert_eq!(
            heading_display(&c.representative),
            "Cervantes Saavedra, Miguel de, 1547-1616"
        );
        assert_eq!(c.preferred_by_agency.len(), 2);
    }

    #[test]
    fn exact_duplicate_authorities_are_reported_once_at_one() {
        let h = parse_personal_name("Cervantes Saavedra, Miguel de, 1547-1616").heading;
        let make = |id: &str| AuthorityRecord {
            authority_id: id.to_string(),
            authorized: h.clone(),
            variants: Vec::new(),
            non_bibliographic: Vec::new(),
            linked_titles: Vec::new(),
            same_as: Vec::new(),
        };
        let dups = detect_duplicates(&[make("A"), make("B")], DEFAULT_THETA_DUP, &AliasTable::default());
        assert_eq!(dups.len(), 1);
        assert_eq!(dups[0], ("A".to_string(), "B".to_string(), 1.0));
    }

    #[test]
    fn empty_store_has_no_duplicates() {
        assert!(detect_duplicates(&[], DEFAULT_THETA_DUP, &AliasTable::default()).is_empty());
    }

    #[test]
    fn cross_block_transliterations_are_not_reported() {
        let make = |id: &str, form: &str| AuthorityRecord {
            authority_id: id.to_string(),
            authorized: parse_personal_name(form).heading,
            variants: Vec::new(),
            non_bibliographic: Vec::new(),
            linked_titles: Vec::new(),
            same_as: Vec::new(),
        };
        let store = [
            make("A", "Chekhov, Anton Pavlovich, 1860-1904"),
            make("B", "Čechov, Anton Pavlovič, 1860-1904"),
            make("C", "Chehov, Anton Pavlovich 1860-1904"),
        ];
        // documented limitation: different blocks, no alias — no pairs
        let dups = detect_duplicates(&store, DEFAULT_THETA_DUP, &AliasTable::default());
        assert!(dups.is_empty());
    }

    #[test]
    fn clustering_is_a_partition() {
        let entries = vec![
            entry("Cervantes Saavedra, Miguel de, 1547-1616", "LC", &["Don Quijote de la Mancha."]),
            entry("Cervantes Saavedra, Miguel, 1547-1616", "BNE", &["Don Quijote de la Mancha."]),
            entry("Shakespeare, William, 1564-1616", "LC", &["Hamlet"]),
        ];
        let clusters = cluster(&entries, DEFAULT_THETA);
        let total: usize = clusters.iter().map(|c| c.members.len()).sum();
        assert_eq!(total, entries.len());
    }

    #[test]
    fn alias_table_parse_and_render_round_trip() {
        let text = "a key\tb key\nc key\td key\n";
        let table = AliasTable::parse(text).unwrap();
        assert!(table.aliased("a key", "b key"));
        assert!(table.aliased("b key", "a key"));
        assert!(!table.aliased("a key", "c key"));
        assert_eq!(table.render(), text);
        assert!(AliasTable::parse("no tab here\n").is_err());
    }
}
