//! Single-edge association rules between frequent patterns.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::{data_lines, read_to_string};
use crate::miner::{Delta, Extension, ExtensionSink, MinedPattern, PatternSet, CODE_SCHEME_VERSION};
use crate::pattern::{canonical_code, canonical_form, CanonicalCode, PEdge, Pattern, Strategy};

/// Minimum confidence used when none is given.
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.5;

/// `antecedent -> consequent`, where the consequent is the antecedent plus
/// `delta`. The delta is expressed in the antecedent's canonical numbering
/// and is the smallest such form over the antecedent's automorphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociationRule {
    pub antecedent: CanonicalCode,
    pub consequent: CanonicalCode,
    pub delta: Delta,
    pub support_a: usize,
    pub support_c: usize,
    pub confidence: f64,
}

impl AssociationRule {
    pub fn introduces_new_node(&self) -> bool {
        self.delta.introduces_node()
    }

    pub fn antecedent_pattern(&self, directed: bool) -> Result<Pattern> {
        self.antecedent.decode(directed)
    }

    pub fn consequent_pattern(&self, directed: bool) -> Result<Pattern> {
        self.consequent.decode(directed)
    }

    /// Builds the rule `p -> p + delta`, with `delta` in `p`'s numbering.
    pub fn from_parts(p: &Pattern, delta: Delta, support_a: usize, support_c: usize, strategy: Strategy) -> Result<Self> {
        if support_a == 0 || support_c == 0 || support_c > support_a {
            return Err(Error::invalid(format!("supports {support_a} -> {support_c}")));
        }
        let form = canonical_form(p, strategy)?;
        let canon = p.permute(&form.numbering);
        let delta = delta.permute(&form.numbering, p.directed());
        let consequent = canonical_code(&delta.apply(&canon), strategy)?;
        Ok(AssociationRule {
            antecedent: form.code,
            consequent,
            delta: normalize_delta(delta, &form.automorphisms, p.directed()),
            support_a,
            support_c,
            confidence: support_c as f64 / support_a as f64,
        })
    }

    fn key(&self) -> (&CanonicalCode, &CanonicalCode, &Delta) {
        (&self.antecedent, &self.consequent, &self.delta)
    }
}

impl fmt::Display for AssociationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.antecedent, self.consequent, self.delta, self.support_a, self.support_c, self.confidence
        )
    }
}

/// Smallest form of `delta` over the automorphisms of its antecedent.
pub fn normalize_delta(delta: Delta, automorphisms: &[Vec<u8>], directed: bool) -> Delta {
    automorphisms
        .iter()
        .map(|perm| delta.permute(perm, directed))
        .min()
        .unwrap_or(delta)
}

/// The rule for one mining extension, if it clears the confidence bar.
pub fn embedded_rule_sink(
    parent: &MinedPattern,
    delta: Delta,
    child_code: &CanonicalCode,
    child_support: usize,
    min_confidence: f64,
) -> Option<AssociationRule> {
    let confidence = child_support as f64 / parent.support as f64;
    if confidence < min_confidence || child_support == 0 {
        return None;
    }
    Some(AssociationRule {
        antecedent: parent.code.clone(),
        consequent: child_code.clone(),
        delta: normalize_delta(delta, &parent.automorphisms, parent.pattern.directed()),
        support_a: parent.support,
        support_c: child_support,
        confidence,
    })
}

/// Collects rules from mining extensions as they are found.
pub struct RuleCollector {
    min_confidence: f64,
    rules: Mutex<FxHashMap<(CanonicalCode, Delta), AssociationRule>>,
}

impl RuleCollector {
    pub fn new(min_confidence: f64) -> Self {
        RuleCollector {
            min_confidence,
            rules: Mutex::new(FxHashMap::default()),
        }
    }

    pub fn into_rule_set(self, patterns: &PatternSet) -> RuleSet {
        let rules = self.rules.into_inner().expect("rule collector poisoned");
        RuleSet::new(rules.into_values().collect(), patterns.directed, patterns.strategy)
    }
}

impl ExtensionSink for RuleCollector {
    fn offer(&self, ext: &Extension<'_>) {
        if let Some(rule) = embedded_rule_sink(ext.parent, ext.delta, ext.child_code, ext.child_support, self.min_confidence) {
            let key = (rule.antecedent.clone(), rule.delta);
            self.rules.lock().expect("rule collector poisoned").entry(key).or_insert(rule);
        }
    }
}

/// A sorted, duplicate-free rule list.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    pub directed: bool,
    pub strategy: Strategy,
    rules: Vec<AssociationRule>,
}

impl RuleSet {
    pub fn new(mut rules: Vec<AssociationRule>, directed: bool, strategy: Strategy) -> Self {
        rules.sort_by(|a, b| a.key().cmp(&b.key()));
        rules.dedup_by(|a, b| a.key() == b.key());
        RuleSet {
            directed,
            strategy,
            rules,
        }
    }

    pub fn empty(directed: bool) -> Self {
        RuleSet::new(Vec::new(), directed, Strategy::Bfs)
    }

    pub fn rules(&self) -> &[AssociationRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AssociationRule> {
        self.rules.iter()
    }

    /// Keeps the rules with confidence at least `c`.
    pub fn filtered(&self, c: f64) -> RuleSet {
        RuleSet {
            directed: self.directed,
            strategy: self.strategy,
            rules: self.rules.iter().filter(|r| r.confidence >= c).cloned().collect(),
        }
    }

    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# plexrules code-scheme v{CODE_SCHEME_VERSION} strategy={} directed={}",
            self.strategy, self.directed as u8
        )?;
        for r in &self.rules {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }

    pub fn dump_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dump(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("dump is utf-8")
    }

    pub fn parse_dump(text: &str, path: &Path) -> Result<RuleSet> {
        let header = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# plexrules code-scheme "))
            .ok_or_else(|| parse_err(path, 1, "missing `# plexrules code-scheme` header"))?;
        let mut version = None;
        let mut strategy = None;
        let mut directed = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix('v') {
                version = v.parse::<u32>().ok();
            } else if let Some(s) = tok.strip_prefix("strategy=") {
                strategy = s.parse::<Strategy>().ok();
            } else if let Some(d) = tok.strip_prefix("directed=") {
                directed = Some(d == "1");
            }
        }
        if version != Some(CODE_SCHEME_VERSION) {
            return Err(parse_err(path, 1, "unsupported code-scheme version"));
        }
        let (Some(strategy), Some(directed)) = (strategy, directed) else {
            return Err(parse_err(path, 1, "header lacks strategy or directed flag"));
        };
        let mut rules = Vec::new();
        for (line, fields) in data_lines(text) {
            let [a, c, d, sa, sc, conf] = fields[..] else {
                return Err(parse_err(path, line, "expected 6 tab-separated fields"));
            };
            let bad = |what: &str| parse_err(path, line, &format!("bad {what}"));
            let rule = AssociationRule {
                antecedent: a.parse().map_err(|_| bad("antecedent code"))?,
                consequent: c.parse().map_err(|_| bad("consequent code"))?,
                delta: d.parse().map_err(|_| bad("delta"))?,
                support_a: sa.parse().map_err(|_| bad("antecedent support"))?,
                support_c: sc.parse().map_err(|_| bad("consequent support"))?,
                confidence: conf.parse().map_err(|_| bad("confidence"))?,
            };
            if !(rule.confidence > 0.0 && rule.confidence <= 1.0) {
                return Err(bad("confidence"));
            }
            rules.push(rule);
        }
        Ok(RuleSet::new(rules, directed, strategy))
    }

    pub fn load(path: &Path) -> Result<RuleSet> {
        Self::parse_dump(&read_to_string(path)?, path)
    }
}

fn parse_err(path: &Path, line: usize, msg: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    }
}

/// Every injective map of `a`'s nodes into `c`'s that preserves labels and
/// sends each edge of `a` onto an edge of `c`.
fn pattern_maps(a: &Pattern, c: &Pattern) -> Vec<Vec<u8>> {
    fn rec(a: &Pattern, c: &Pattern, map: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        let x = map.len() as u8;
        if map.len() == a.k() {
            out.push(map.clone());
            return;
        }
        for y in 0..c.k() as u8 {
            if used[y as usize] || c.labels()[y as usize] != a.labels()[x as usize] {
                continue;
            }
            map.push(y);
            let ok = a.edges().iter().filter(|e| e.i.max(e.j) == x).all(|e| {
                let (t, h) = e.endpoints();
                c.has_edge(&PEdge::arc(map[t as usize], map[h as usize], e.layer, c.directed()))
            });
            if ok {
                used[y as usize] = true;
                rec(a, c, map, used, out);
                used[y as usize] = false;
            }
            map.pop();
        }
    }
    let mut out = Vec::new();
    rec(a, c, &mut Vec::with_capacity(a.k()), &mut vec![false; c.k()], &mut out);
    out
}

/// The deltas that turn `a` into `c`, normalized, if `c` contains `a` plus
/// exactly one edge.
fn containment_deltas(a: &MinedPattern, c: &MinedPattern) -> Vec<Delta> {
    let (ap, cp) = (&a.pattern, &c.pattern);
    let directed = cp.directed();
    let mut deltas = Vec::new();
    for map in pattern_maps(ap, cp) {
        let mut inverse = vec![None; cp.k()];
        for (x, &y) in map.iter().enumerate() {
            inverse[y as usize] = Some(x as u8);
        }
        let place = |y: u8| inverse[y as usize].unwrap_or(ap.k() as u8);
        let covered = |e: &PEdge| {
            let (t, h) = e.endpoints();
            match (inverse[t as usize], inverse[h as usize]) {
                (Some(x), Some(z)) => ap.has_edge(&PEdge::arc(x, z, e.layer, directed)),
                _ => false,
            }
        };
        let missing: Vec<&PEdge> = cp.edges().iter().filter(|e| !covered(e)).collect();
        let [e] = missing[..] else {
            continue;
        };
        let (t, h) = e.endpoints();
        let new_label = inverse
            .iter()
            .position(Option::is_none)
            .map(|y| cp.labels()[y]);
        let delta = Delta {
            edge: PEdge::arc(place(t), place(h), e.layer, directed),
            new_label,
        };
        deltas.push(normalize_delta(delta, &a.automorphisms, directed));
    }
    deltas.sort();
    deltas.dedup();
    deltas
}

/// Derives rules from a finished pattern set by testing, for every pair of
/// patterns whose edge counts differ by one, whether the larger contains the
/// smaller plus a single edge.
pub fn derive_rules_posthoc(patterns: &PatternSet, min_confidence: f64) -> Result<RuleSet> {
    validate_confidence(min_confidence)?;
    let mut by_edges: BTreeMap<usize, Vec<&MinedPattern>> = BTreeMap::new();
    for p in patterns.iter() {
        by_edges.entry(p.edge_count()).or_default().push(p);
    }
    let mut rules = Vec::new();
    for (&m, larger) in by_edges.range(1..) {
        let Some(smaller) = by_edges.get(&(m - 1)) else {
            continue;
        };
        for c in larger {
            for a in smaller {
                let grows = c.pattern.k() - a.pattern.k().min(c.pattern.k());
                if a.pattern.k() > c.pattern.k() || grows > 1 {
                    continue;
                }
                let confidence = c.support as f64 / a.support as f64;
                if confidence < min_confidence {
                    continue;
                }
                for delta in containment_deltas(a, c) {
                    rules.push(AssociationRule {
                        antecedent: a.code.clone(),
                        consequent: c.code.clone(),
                        delta,
                        support_a: a.support,
                        support_c: c.support,
                        confidence,
                    });
                }
            }
        }
    }
    Ok(RuleSet::new(rules, patterns.directed, patterns.strategy))
}

pub fn validate_confidence(c: f64) -> Result<()> {
    if (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(Error::invalid(format!("minimum confidence {c} outside [0, 1]")))
    }
}

/// Mines `g` and builds rules inside the search.
pub fn mine_with_rules(
    g: &crate::graph::MultiplexGraph,
    cfg: &crate::miner::MiningConfig,
    min_confidence: f64,
) -> Result<(PatternSet, RuleSet)> {
    validate_confidence(min_confidence)?;
    let collector = RuleCollector::new(min_confidence);
    let patterns = crate::miner::mine(g, cfg, Some(&collector))?;
    let rules = collector.into_rule_set(&patterns);
    Ok((patterns, rules))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MultiplexGraph;
    use crate::miner::{MiningConfig, Support};

    fn mined(p: Pattern, support: usize) -> MinedPattern {
        let form = canonical_form(&p, Strategy::Bfs).unwrap();
        MinedPattern {
            pattern: p.permute(&form.numbering),
            code: form.code,
            support,
            embedding_count: support,
            embeddings: None,
            automorphisms: form.automorphisms,
            parent: None,
        }
    }

    fn edge_pattern() -> Pattern {
        Pattern::new(vec![0, 0], vec![PEdge::arc(0, 1, 0, false)], false).unwrap()
    }

    #[test]
    fn confidence_threshold() {
        let parent = mined(edge_pattern(), 10);
        let delta = Delta {
            edge: PEdge::arc(1, 2, 0, false),
            new_label: Some(0),
        };
        let child = canonical_code(&delta.apply(&parent.pattern), Strategy::Bfs).unwrap();
        let r = embedded_rule_sink(&parent, delta, &child, 10, 0.8).unwrap();
        assert_eq!(r.confidence, 1.0);
        assert!(r.introduces_new_node());
        assert!(embedded_rule_sink(&parent, delta, &child, 7, 0.8).is_none());
    }

    #[test]
    fn delta_normalized_over_automorphisms() {
        // in a symmetric edge, growing from either end is the same rule
        let parent = mined(edge_pattern(), 5);
        let d0 = Delta {
            edge: PEdge::arc(0, 2, 0, false),
            new_label: Some(0),
        };
        let d1 = Delta {
            edge: PEdge::arc(1, 2, 0, false),
            new_label: Some(0),
        };
        let code = canonical_code(&d0.apply(&parent.pattern), Strategy::Bfs).unwrap();
        let r0 = embedded_rule_sink(&parent, d0, &code, 5, 0.5).unwrap();
        let r1 = embedded_rule_sink(&parent, d1, &code, 5, 0.5).unwrap();
        assert_eq!(r0, r1);
    }

    #[test]
    fn old_new_rule_shape() {
        // two-node antecedent, three-node consequent with a dangling new node
        let g = MultiplexGraph::from_edges(
            6,
            2,
            false,
            &[(0, 1, 0), (0, 2, 1), (3, 4, 0), (3, 5, 1)],
            None,
        )
        .unwrap();
        let (_, rules) = mine_with_rules(&g, &MiningConfig::new(Support::Absolute(2), 3), 0.5).unwrap();
        let r = rules
            .iter()
            .find(|r| r.antecedent.tuples.len() == 1 && r.consequent.node_count() == 3)
            .unwrap();
        assert!(r.introduces_new_node());
        assert_eq!(r.antecedent.node_count(), 2);
    }

    #[test]
    fn posthoc_empty_without_containment() {
        let g = MultiplexGraph::from_edges(4, 1, false, &[], None).unwrap();
        let (patterns, rules) = mine_with_rules(&g, &MiningConfig::new(Support::Absolute(1), 3), 0.5).unwrap();
        assert!(rules.is_empty());
        assert!(derive_rules_posthoc(&patterns, 0.5).unwrap().is_empty());
    }

    #[test]
    fn dump_roundtrip() {
        let g = MultiplexGraph::from_edges(5, 2, true, &[(0, 1, 0), (1, 2, 0), (2, 0, 1), (3, 4, 0), (4, 3, 1)], None)
            .unwrap();
        let (_, rules) = mine_with_rules(&g, &MiningConfig::new(Support::Absolute(1), 3), 0.2).unwrap();
        assert!(!rules.is_empty());
        let text = rules.dump_string();
        let back = RuleSet::parse_dump(&text, Path::new("mem")).unwrap();
        assert_eq!(back, rules);
        assert_eq!(back.dump_string(), text);
    }
}
