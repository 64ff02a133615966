//! Post parsing, activity filtering, and account labeling from source ratings.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Platform domains whose links say nothing about news sources.
pub const DEFAULT_PLATFORM_DOMAINS: &[&str] = &[
    "amazon.com",
    "yelp.com",
    "youtube.com",
    "youtu.be",
    "facebook.com",
    "fb.me",
    "twitter.com",
    "x.com",
    "t.co",
    "instagram.com",
    "tiktok.com",
    "linkedin.com",
    "reddit.com",
    "pinterest.com",
];

/// One sharing event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRecord {
    #[serde(rename = "account")]
    pub account_id: String,
    #[serde(rename = "post")]
    pub post_id: String,
    pub domains: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reshared_from: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawPost {
    account: Option<String>,
    #[serde(default)]
    post: Option<String>,
    #[serde(default)]
    domains: Vec<String>,
    #[serde(default)]
    reshared_from: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlatformBlocklist {
    domains: BTreeSet<String>,
}

impl Default for PlatformBlocklist {
    fn default() -> Self {
        Self::new(DEFAULT_PLATFORM_DOMAINS.iter().copied())
    }
}

impl PlatformBlocklist {
    pub fn new<I, S>(domains: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        PlatformBlocklist {
            domains: domains
                .into_iter()
                .map(|d| normalize_domain(d.as_ref()))
                .collect(),
        }
    }

    pub fn empty() -> Self {
        PlatformBlocklist {
            domains: BTreeSet::new(),
        }
    }

    /// True for a listed domain or any of its subdomains.
    pub fn is_blocked(&self, domain: &str) -> bool {
        if self.domains.contains(domain) {
            return true;
        }
        domain
            .char_indices()
            .filter(|&(_, c)| c == '.')
            .any(|(i, _)| self.domains.contains(&domain[i + 1..]))
    }
}

/// Pre-expanded mapping from shortener domains to their targets.
#[derive(Debug, Clone, Default)]
pub struct DomainMap {
    map: HashMap<String, String>,
}

impl DomainMap {
    /// Reads a CSV with header `from,to`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            from: String,
            to: String,
        }
        let mut map = HashMap::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: Row = row?;
            map.insert(normalize_domain(&row.from), normalize_domain(&row.to));
        }
        Ok(DomainMap { map })
    }

    pub fn insert(&mut self, from: &str, to: &str) {
        self.map
            .insert(normalize_domain(from), normalize_domain(to));
    }

    fn resolve<'a>(&'a self, domain: &'a str) -> &'a str {
        self.map.get(domain).map(String::as_str).unwrap_or(domain)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub blocklist: PlatformBlocklist,
    pub domain_map: Option<DomainMap>,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<PostRecord>,
    /// Lines that were not valid JSON objects.
    pub malformed: usize,
    pub missing_account: usize,
    /// Records whose domain list was empty after platform filtering.
    pub no_domains: usize,
}

impl ParseOutcome {
    pub fn skipped(&self) -> usize {
        self.malformed + self.missing_account + self.no_domains
    }
}

fn normalize_domain(d: &str) -> String {
    d.trim().trim_end_matches('.').to_ascii_lowercase()
}

/// Parses newline-delimited JSON post records.
pub fn parse_posts<R: BufRead>(input: R, opts: &ParseOptions) -> Result<ParseOutcome> {
    let mut out = ParseOutcome::default();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let raw: RawPost = match serde_json::from_str(trimmed) {
            Ok(r) => r,
            Err(e) => {
                out.malformed += 1;
                log::debug!("line {}: malformed record: {e}", lineno + 1);
                continue;
            }
        };
        let account_id = match raw.account.filter(|a| !a.is_empty()) {
            Some(a) => a,
            None => {
                warn!("line {}: record without account id skipped", lineno + 1);
                out.missing_account += 1;
                continue;
            }
        };
        let mut seen = HashSet::new();
        let mut domains = Vec::with_capacity(raw.domains.len());
        for d in &raw.domains {
            let d = normalize_domain(d);
            let d = match &opts.domain_map {
                Some(m) => m.resolve(&d).to_string(),
                None => d,
            };
            if d.is_empty() || opts.blocklist.is_blocked(&d) {
                continue;
            }
            if seen.insert(d.clone()) {
                domains.push(d);
            }
        }
        if domains.is_empty() {
            out.no_domains += 1;
            continue;
        }
        out.records.push(PostRecord {
            account_id,
            post_id: raw.post.unwrap_or_else(|| format!("line-{}", lineno + 1)),
            domains,
            reshared_from: raw.reshared_from.filter(|r| !r.is_empty()),
        });
    }
    Ok(out)
}

pub fn write_posts<W: Write>(mut out: W, records: &[PostRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActivityFilter {
    pub min_account_links: usize,
    pub min_domain_shares: usize,
}

impl Default for ActivityFilter {
    fn default() -> Self {
        ActivityFilter {
            min_account_links: 5,
            min_domain_shares: 5,
        }
    }
}

/// Drops rarely shared domains, then low-activity accounts, in one pass.
pub fn apply_activity_filters(records: &[PostRecord], filter: ActivityFilter) -> Vec<PostRecord> {
    let mut domain_counts: HashMap<&str, usize> = HashMap::new();
    for r in records {
        for d in &r.domains {
            *domain_counts.entry(d.as_str()).or_default() += 1;
        }
    }
    let kept: Vec<PostRecord> = records
        .iter()
        .filter_map(|r| {
            let domains: Vec<String> = r
                .domains
                .iter()
                .filter(|d| domain_counts[d.as_str()] >= filter.min_domain_shares)
                .cloned()
                .collect();
            (!domains.is_empty()).then(|| PostRecord {
                domains,
                ..r.clone()
            })
        })
        .collect();

    let mut links: HashMap<&str, usize> = HashMap::new();
    for r in &kept {
        *links.entry(r.account_id.as_str()).or_default() += r.domains.len();
    }
    let active: HashSet<String> = links
        .into_iter()
        .filter(|&(_, n)| n >= filter.min_account_links)
        .map(|(a, _)| a.to_string())
        .collect();
    kept.into_iter()
        .filter(|r| active.contains(&r.account_id))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRating {
    pub domain: String,
    pub score: f64,
}

/// Domain → rating lookup. Later duplicates replace earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RatingTable {
    ratings: HashMap<String, f64>,
}

impl RatingTable {
    pub fn new(ratings: impl IntoIterator<Item = SourceRating>) -> Result<Self> {
        let mut table = HashMap::new();
        for r in ratings {
            if !(0.0..=100.0).contains(&r.score) {
                return Err(Error::input(format!(
                    "rating for {} is {}, outside [0, 100]",
                    r.domain, r.score
                )));
            }
            let domain = normalize_domain(&r.domain);
            if let Some(prev) = table.insert(domain.clone(), r.score) {
                warn!(
                    "duplicate rating for {domain}: {prev} replaced by {}",
                    r.score
                );
            }
        }
        Ok(RatingTable { ratings: table })
    }

    /// Reads a CSV with header `domain,score`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = csv::Reader::from_reader(reader)
            .deserialize()
            .collect::<std::result::Result<Vec<SourceRating>, _>>()?;
        Self::new(rows)
    }

    pub fn get(&self, domain: &str) -> Option<f64> {
        self.ratings.get(domain).copied()
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let sorted: BTreeMap<_, _> = self.ratings.iter().collect();
        for (domain, &score) in sorted {
            w.serialize(SourceRating {
                domain: domain.clone(),
                score,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CredibilityLabel {
    High,
    Low,
}

impl fmt::Display for CredibilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CredibilityLabel::High => "high",
            CredibilityLabel::Low => "low",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountCredibility {
    pub account_id: String,
    pub score: Option<f64>,
    pub label: Option<CredibilityLabel>,
    /// Fraction of the account's distinct domains that carry a rating.
    pub confidence: f64,
}

/// Share-weighted mean rating per account, sorted by account id.
pub fn score_accounts(records: &[PostRecord], ratings: &RatingTable) -> Vec<AccountCredibility> {
    let mut shares: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for r in records {
        let per = shares.entry(r.account_id.as_str()).or_default();
        for d in &r.domains {
            *per.entry(d.as_str()).or_default() += 1;
        }
    }
    shares
        .into_iter()
        .map(|(account, per)| {
            let mut weighted = 0.0;
            let mut total = 0usize;
            let mut rated_distinct = 0usize;
            for (&d, &n) in &per {
                if let Some(rating) = ratings.get(d) {
                    weighted += n as f64 * rating;
                    total += n;
                    rated_distinct += 1;
                }
            }
            let score = (total > 0).then(|| weighted / total as f64);
            AccountCredibility {
                account_id: account.to_string(),
                score,
                label: None,
                confidence: if per.is_empty() {
                    0.0
                } else {
                    rated_distinct as f64 / per.len() as f64
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelingConfig {
    pub threshold: f64,
    /// Minimum confidence for an account to enter the ground-truth sets.
    pub confidence_floor: f64,
}

impl Default for LabelingConfig {
    fn default() -> Self {
        LabelingConfig {
            threshold: 60.0,
            confidence_floor: 1.0,
        }
    }
}

/// Known high- and low-credibility accounts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSets {
    pub high: BTreeSet<String>,
    pub low: BTreeSet<String>,
}

impl LabelSets {
    pub fn len(&self) -> usize {
        self.high.len() + self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.high.is_empty() && self.low.is_empty()
    }

    pub fn label_of(&self, account: &str) -> Option<CredibilityLabel> {
        if self.low.contains(account) {
            Some(CredibilityLabel::Low)
        } else if self.high.contains(account) {
            Some(CredibilityLabel::High)
        } else {
            None
        }
    }

    pub fn insert(&mut self, account: String, label: CredibilityLabel) {
        match label {
            CredibilityLabel::High => self.high.insert(account),
            CredibilityLabel::Low => self.low.insert(account),
        };
    }

    /// All labeled accounts in id order.
    pub fn accounts(&self) -> Vec<&str> {
        let mut all: Vec<&str> = self
            .high
            .iter()
            .chain(&self.low)
            .map(String::as_str)
            .collect();
        all.sort_unstable();
        all
    }

    /// Keeps only the given accounts.
    pub fn restrict_to<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> LabelSets {
        let mut out = LabelSets::default();
        for a in keep {
            if let Some(l) = self.label_of(a) {
                out.insert(a.to_string(), l);
            }
        }
        out
    }
}

pub fn label_accounts(
    credibilities: &[AccountCredibility],
    cfg: LabelingConfig,
) -> Result<(Vec<AccountCredibility>, LabelSets)> {
    if !(0.0..=100.0).contains(&cfg.threshold) {
        return Err(Error::config(format!(
            "label threshold {} outside [0, 100]",
            cfg.threshold
        )));
    }
    if !(0.0..=1.0).contains(&cfg.confidence_floor) {
        return Err(Error::config(format!(
            "confidence floor {} outside [0, 1]",
            cfg.confidence_floor
        )));
    }
    let mut sets = LabelSets::default();
    let labeled = credibilities
        .iter()
        .map(|c| {
            let label = c.score.map(|s| {
                if s < cfg.threshold {
                    CredibilityLabel::Low
                } else {
                    CredibilityLabel::High
                }
            });
            if let Some(l) = label {
                if c.confidence >= cfg.confidence_floor {
                    sets.insert(c.account_id.clone(), l);
                }
            }
            AccountCredibility { label, ..c.clone() }
        })
        .collect();
    Ok((labeled, sets))
}

pub fn write_credibilities<W: Write>(out: W, creds: &[AccountCredibility]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["account_id", "score", "label", "confidence"])?;
    for c in creds {
        w.write_record([
            c.account_id.clone(),
            c.score.map(|s| s.to_string()).unwrap_or_default(),
            c.label.map(|l| l.to_string()).unwrap_or_default(),
            c.confidence.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_credibilities<R: Read>(input: R) -> Result<Vec<AccountCredibility>> {
    #[derive(Deserialize)]
    struct Row {
        account_id: String,
        score: Option<f64>,
        label: Option<CredibilityLabel>,
        confidence: f64,
    }
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(input).deserialize() {
        let row: Row = row?;
        out.push(AccountCredibility {
            account_id: row.account_id,
            score: row.score,
            label: row.label,
            confidence: row.confidence,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(account: &str, id: &str, domains: &[&str]) -> PostRecord {
        PostRecord {
            account_id: account.into(),
            post_id: id.into(),
            domains: domains.iter().map(|d| d.to_string()).collect(),
            reshared_from: None,
        }
    }

    fn parse(text: &str) -> ParseOutcome {
        parse_posts(text.as_bytes(), &ParseOptions::default()).unwrap()
    }

    #[test]
    fn parses_single_record() {
        let out = parse(r#"{"account":"a1","post":"p1","domains":["Foo.com"]}"#);
        assert_eq!(out.records, vec![post("a1", "p1", &["foo.com"])]);
    }

    #[test]
    fn platform_only_record_is_dropped() {
        let out = parse(r#"{"account":"a1","post":"p2","domains":["youtube.com"]}"#);
        assert!(out.records.is_empty());
        assert_eq!(out.no_domains, 1);
        assert!(PlatformBlocklist::default().is_blocked("m.youtube.com"));
        assert!(!PlatformBlocklist::default().is_blocked("notyoutube.com"));
    }

    #[test]
    fn empty_input_and_bad_lines() {
        assert!(parse("").records.is_empty());
        let out = parse("not json\n{\"post\":\"p\",\"domains\":[\"a.com\"]}\n\n{\"account\":\"x\",\"post\":\"p\",\"domains\":[\"a.com\"],\"reshared_from\":\"y\"}");
        assert_eq!(out.malformed, 1);
        assert_eq!(out.missing_account, 1);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].reshared_from.as_deref(), Some("y"));
    }

    #[test]
    fn domain_map_expands_shorteners() {
        let mut map = DomainMap::default();
        map.insert("bit.ly", "news.com");
        let opts = ParseOptions {
            domain_map: Some(map),
            ..Default::default()
        };
        let out = parse_posts(
            r#"{"account":"a","post":"p","domains":["bit.ly","news.com"]}"#.as_bytes(),
            &opts,
        )
        .unwrap();
        assert_eq!(out.records[0].domains, vec!["news.com"]);
    }

    #[test]
    fn filters_low_activity_accounts_and_rare_domains() {
        let mut records = Vec::new();
        for i in 0..5 {
            records.push(post("busy", &format!("b{i}"), &["common.com"]));
        }
        for i in 0..4 {
            records.push(post("quiet", &format!("q{i}"), &["common.com"]));
        }
        records.push(post("busy", "rare", &["rare.com"]));
        let out = apply_activity_filters(&records, ActivityFilter::default());
        assert!(out.iter().all(|r| r.account_id == "busy"));
        // common.com appears 9 times and survives; rare.com once and is dropped.
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|r| r.domains == vec!["common.com"]));
    }

    #[test]
    fn domain_shared_exactly_threshold_times_is_kept() {
        let records: Vec<_> = (0..5)
            .map(|i| post(&format!("a{i}"), "p", &["d.com"]))
            .collect();
        let out = apply_activity_filters(
            &records,
            ActivityFilter {
                min_account_links: 1,
                min_domain_shares: 5,
            },
        );
        assert_eq!(out.len(), 5);
    }

    #[test]
    fn zero_thresholds_are_a_no_op() {
        let records = vec![
            post("a", "1", &["x.com"]),
            post("b", "2", &["y.com", "z.com"]),
        ];
        let out = apply_activity_filters(
            &records,
            ActivityFilter {
                min_account_links: 0,
                min_domain_shares: 0,
            },
        );
        assert_eq!(out, records);
    }

    fn ratings() -> RatingTable {
        RatingTable::new([
            SourceRating {
                domain: "x.com".into(),
                score: 90.0,
            },
            SourceRating {
                domain: "y.com".into(),
                score: 30.0,
            },
            SourceRating {
                domain: "w.com".into(),
                score: 10.0,
            },
            SourceRating {
                domain: "v.com".into(),
                score: 20.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn weighted_mean_score() {
        let records = vec![
            post("a", "1", &["x.com"]),
            post("a", "2", &["x.com"]),
            post("a", "3", &["x.com"]),
            post("a", "4", &["y.com"]),
        ];
        let c = score_accounts(&records, &ratings());
        assert_eq!(c[0].score, Some(75.0));
        assert_eq!(c[0].confidence, 1.0);
    }

    #[test]
    fn confidence_is_fraction_of_rated_distinct_domains() {
        let records = vec![post(
            "a",
            "1",
            &["x.com", "y.com", "w.com", "v.com", "unknown.org"],
        )];
        let c = score_accounts(&records, &ratings());
        assert!((c[0].confidence - 0.8).abs() < 1e-12);
    }

    #[test]
    fn unrated_only_account_has_no_score() {
        let c = score_accounts(&[post("a", "1", &["unknown.org"])], &ratings());
        assert_eq!(c[0].score, None);
        assert_eq!(c[0].confidence, 0.0);
        let (labeled, sets) = label_accounts(&c, LabelingConfig::default()).unwrap();
        assert_eq!(labeled[0].label, None);
        assert!(sets.is_empty());
    }

    #[test]
    fn rating_validation_and_duplicates() {
        assert!(RatingTable::new([SourceRating {
            domain: "a".into(),
            score: 101.0
        }])
        .is_err());
        let t = RatingTable::from_csv("domain,score\na.com,10\nA.com,20\n".as_bytes()).unwrap();
        assert_eq!(t.get("a.com"), Some(20.0));
        assert_eq!(t.len(), 1);
    }

    fn cred(id: &str, score: f64, confidence: f64) -> AccountCredibility {
        AccountCredibility {
            account_id: id.into(),
            score: Some(score),
            label: None,
            confidence,
        }
    }

    #[test]
    fn threshold_boundaries() {
        let creds = vec![
            cred("a", 59.9, 1.0),
            cred("b", 60.0, 1.0),
            cred("c", 75.0, 0.8),
        ];
        let (labeled, sets) = label_accounts(&creds, LabelingConfig::default()).unwrap();
        assert_eq!(labeled[0].label, Some(CredibilityLabel::Low));
        assert_eq!(labeled[1].label, Some(CredibilityLabel::High));
        assert_eq!(labeled[2].label, Some(CredibilityLabel::High));
        assert!(sets.low.contains("a"));
        assert!(sets.high.contains("b"));
        assert!(!sets.high.contains("c"));
    }

    #[test]
    fn bad_threshold_is_config_error() {
        let cfg = LabelingConfig {
            threshold: 120.0,
            ..Default::default()
        };
        assert!(matches!(label_accounts(&[], cfg), Err(Error::Config(_))));
    }

    #[test]
    fn credibility_csv_round_trip() {
        let creds = vec![
            AccountCredibility {
                account_id: "a".into(),
                score: Some(75.0),
                label: Some(CredibilityLabel::High),
                confidence: 1.0,
            },
            AccountCredibility {
                account_id: "b".into(),
                score: None,
                label: None,
                confidence: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_credibilities(&mut buf, &creds).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("account_id,score,label,confidence\n"));
        assert_eq!(read_credibilities(buf.as_slice()).unwrap(), creds);
    }
}
