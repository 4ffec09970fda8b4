//! Structural balance of signed patterns and rules.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::LayerId;
use crate::pattern::Pattern;
use crate::rules::{AssociationRule, RuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    Excluded,
}

/// The sign carried by each layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMap {
    signs: Vec<Sign>,
}

impl SignMap {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.iter().all(|s| *s == Sign::Excluded) {
            return Err(Error::invalid("a sign map needs at least one signed layer"));
        }
        Ok(SignMap { signs })
    }

    /// Friendship positive; enemies and attacks negative; everything else
    /// excluded. Layer names match case-insensitively.
    pub fn pardus(layer_names: &[String]) -> Result<Self> {
        let signs = layer_names
            .iter()
            .map(|name| match name.to_ascii_lowercase().as_str() {
                "friendship" | "friend" | "friends" => Sign::Positive,
                "enemies" | "enemy" | "attacks" | "attack" => Sign::Negative,
                _ => Sign::Excluded,
            })
            .collect();
        SignMap::new(signs)
    }

    /// Parses `name=+,name=-,...`; unnamed layers are excluded.
    pub fn parse(spec: &str, layer_names: &[String]) -> Result<Self> {
        let mut signs = vec![Sign::Excluded; layer_names.len()];
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, sign) = item
                .rsplit_once('=')
                .ok_or_else(|| Error::invalid(format!("malformed sign `{item}`")))?;
            let l = layer_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::invalid(format!("unknown layer `{name}`")))?;
            signs[l] = match sign {
                "+" | "+1" | "1" => Sign::Positive,
                "-" | "-1" => Sign::Negative,
                "0" | "x" => Sign::Excluded,
                _ => return Err(Error::invalid(format!("malformed sign `{sign}`"))),
            };
        }
        SignMap::new(signs)
    }

    pub fn sign(&self, l: LayerId) -> Sign {
        self.signs.get(l as usize).copied().unwrap_or(Sign::Excluded)
    }

    /// Every positive layer negative and vice versa.
    pub fn negated(&self) -> SignMap {
        let signs = self
            .signs
            .iter()
            .map(|s| match s {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
                Sign::Excluded => Sign::Excluded,
            })
            .collect();
        SignMap { signs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrustrationResult {
    pub frustrated_edge_count: usize,
    pub signed_edge_count: usize,
    /// `witness_partition[x]` is the side of pattern node `x`; node 0 is on
    /// side `false`.
    pub witness_partition: Vec<bool>,
}

impl FrustrationResult {
    pub fn index(&self) -> f64 {
        self.frustrated_edge_count as f64 / self.signed_edge_count as f64
    }
}

/// Frustrated edges under a partition given as a bitmask of pattern nodes.
pub fn frustrated_under(signed: &[(u8, u8, bool)], side: u32) -> usize {
    signed
        .iter()
        .filter(|&&(a, b, positive)| {
            let apart = (side >> a & 1) != (side >> b & 1);
            positive == apart
        })
        .count()
}

fn signed_edges(p: &Pattern, signs: &SignMap) -> Vec<(u8, u8, bool)> {
    p.edges()
        .iter()
        .filter_map(|e| match signs.sign(e.layer) {
            Sign::Positive => Some((e.i, e.j, true)),
            Sign::Negative => Some((e.i, e.j, false)),
            Sign::Excluded => None,
        })
        .collect()
}

/// Minimum number of signed edges that are negative inside a group or
/// positive across groups, over all two-group partitions.
pub fn frustration(p: &Pattern, signs: &SignMap) -> Result<FrustrationResult> {
    let signed = signed_edges(p, signs);
    if signed.is_empty() {
        return Err(Error::rejected("pattern has no signed edges"));
    }
    let k = p.k();
    let mut best = (usize::MAX, 0u32);
    // node 0 stays on side 0
    for half in 0..1u32 << (k - 1) {
        let side = half << 1;
        let f = frustrated_under(&signed, side);
        if f < best.0 {
            best = (f, side);
        }
        if f == 0 {
            break;
        }
    }
    Ok(FrustrationResult {
        frustrated_edge_count: best.0,
        signed_edge_count: signed.len(),
        witness_partition: (0..k).map(|x| best.1 >> x & 1 == 1).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleFrustrationClass {
    Increasing,
    ZeroConsequent,
    Decreasing,
}

impl RuleFrustrationClass {
    pub const ALL: [RuleFrustrationClass; 3] = [
        RuleFrustrationClass::Increasing,
        RuleFrustrationClass::ZeroConsequent,
        RuleFrustrationClass::Decreasing,
    ];
}

impl fmt::Display for RuleFrustrationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleFrustrationClass::Increasing => "INCREASING",
            RuleFrustrationClass::ZeroConsequent => "ZERO_CONSEQUENT",
            RuleFrustrationClass::Decreasing => "DECREASING",
        })
    }
}

/// Classifies by frustrated-edge counts: more frustration in the consequent
/// is increasing, none on either side is zero-consequent, and the rest
/// (frustrated antecedent, no more frustration in the consequent) is
/// decreasing. Adding an edge never lowers the count, so decreasing rules
/// keep the count while the index drops.
pub fn classify_counts(antecedent: usize, consequent: usize) -> RuleFrustrationClass {
    if consequent > antecedent {
        RuleFrustrationClass::Increasing
    } else if consequent == 0 && antecedent == 0 {
        RuleFrustrationClass::ZeroConsequent
    } else {
        RuleFrustrationClass::Decreasing
    }
}

pub fn classify_rule(r: &AssociationRule, signs: &SignMap, directed: bool) -> Result<RuleFrustrationClass> {
    let a = frustration(&r.antecedent_pattern(directed)?, signs)?;
    let c = frustration(&r.consequent_pattern(directed)?, signs)?;
    Ok(classify_counts(a.frustrated_edge_count, c.frustrated_edge_count))
}

pub const PDF_BIN_WIDTH: f64 = 0.05;
const PDF_BINS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassSummary {
    pub class: RuleFrustrationClass,
    pub count: usize,
    pub share: f64,
    pub mean_confidence: f64,
    pub mean_support: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrustrationReport {
    pub total: usize,
    /// Rules with a side that has no signed edge.
    pub skipped: usize,
    pub classes: Vec<ClassSummary>,
    /// `(class, bin start, share of the class's rules)`, bins of
    /// [`PDF_BIN_WIDTH`] over `[0, 1]`, the last one closed.
    pub confidence_pdf: Vec<(RuleFrustrationClass, f64, f64)>,
    /// `(class, support, share of the class's rules with at least that
    /// consequent support)` at every observed support.
    pub support_ccdf: Vec<(RuleFrustrationClass, usize, f64)>,
}

impl FrustrationReport {
    pub fn class(&self, class: RuleFrustrationClass) -> &ClassSummary {
        self.classes.iter().find(|c| c.class == class).expect("all classes are listed")
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# rules {} skipped {}", self.total, self.skipped)?;
        writeln!(w, "class\tcount\tshare\tmean_confidence\tmean_support")?;
        for c in &self.classes {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                c.class, c.count, c.share, c.mean_confidence, c.mean_support
            )?;
        }
        writeln!(w)?;
        writeln!(w, "class\tconfidence_bin\tpdf")?;
        for (class, lo, share) in &self.confidence_pdf {
            writeln!(w, "{class}\t{lo:.2}\t{share}")?;
        }
        writeln!(w)?;
        writeln!(w, "class\tsupport\tccdf")?;
        for (class, s, ccdf) in &self.support_ccdf {
            writeln!(w, "{class}\t{s}\t{ccdf}")?;
        }
        Ok(())
    }
}

fn pdf_bin(confidence: f64) -> usize {
    ((confidence / PDF_BIN_WIDTH).floor() as usize).min(PDF_BINS - 1)
}

/// Class shares, confidence PDFs and support CCDFs of a rule set.
pub fn frustration_report(rules: &RuleSet, signs: &SignMap) -> Result<FrustrationReport> {
    if rules.is_empty() {
        return Err(Error::invalid("empty rule set"));
    }
    let mut by_class: BTreeMap<RuleFrustrationClass, Vec<&AssociationRule>> = BTreeMap::new();
    let mut skipped = 0;
    for r in rules.iter() {
        match classify_rule(r, signs, rules.directed) {
            Ok(class) => by_class.entry(class).or_default().push(r),
            Err(Error::Rejected(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let classified = rules.len() - skipped;
    let mut report = FrustrationReport {
        total: rules.len(),
        skipped,
        classes: Vec::new(),
        confidence_pdf: Vec::new(),
        support_ccdf: Vec::new(),
    };
    for class in RuleFrustrationClass::ALL {
        let members = by_class.get(&class).map(Vec::as_slice).unwrap_or(&[]);
        let n = members.len();
        let mean = |f: &dyn Fn(&AssociationRule) -> f64| {
            if n == 0 {
                0.0
            } else {
                members.iter().map(|r| f(r)).sum::<f64>() / n as f64
            }
        };
        report.classes.push(ClassSummary {
            class,
            count: n,
            share: if classified == 0 { 0.0 } else { n as f64 / classified as f64 },
            mean_confidence: mean(&|r| r.confidence),
            mean_support: mean(&|r| r.support_c as f64),
        });
        if n == 0 {
            continue;
        }
        let mut bins = [0usize; PDF_BINS];
        for r in members {
            bins[pdf_bin(r.confidence)] += 1;
        }
        for (b, count) in bins.iter().enumerate() {
            report.confidence_pdf.push((class, b as f64 * PDF_BIN_WIDTH, *count as f64 / n as f64));
        }
        let mut supports: Vec<usize> = members.iter().map(|r| r.support_c).collect();
        supports.sort_unstable();
        let mut i = 0;
        while i < supports.len() {
            let s = supports[i];
            report.support_ccdf.push((class, s, (n - i) as f64 / n as f64));
            while i < supports.len() && supports[i] == s {
                i += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PEdge;

    // layer 0 positive, layer 1 negative
    fn signs() -> SignMap {
        SignMap::new(vec![Sign::Positive, Sign::Negative]).unwrap()
    }

    fn triangle(layers: [LayerId; 3]) -> Pattern {
        let edges = vec![
            PEdge::arc(0, 1, layers[0], false),
            PEdge::arc(1, 2, layers[1], false),
            PEdge::arc(0, 2, layers[2], false),
        ];
        Pattern::new(vec![0; 3], edges, false).unwrap()
    }

    #[test]
    fn triangles() {
        let f = frustration(&triangle([0, 0, 0]), &signs()).unwrap();
        assert_eq!((f.frustrated_edge_count, f.signed_edge_count), (0, 3));
        let f = frustration(&triangle([0, 0, 1]), &signs()).unwrap();
        assert_eq!(f.frustrated_edge_count, 1);
        assert_eq!(f.index(), 1.0 / 3.0);
        let f = frustration(&triangle([0, 1, 1]), &signs()).unwrap();
        assert_eq!(f.frustrated_edge_count, 0);
        assert_eq!(f.witness_partition, vec![false, false, true]);
    }

    #[test]
    fn unsigned_pattern_rejected() {
        let only_excluded = SignMap::new(vec![Sign::Positive, Sign::Excluded]).unwrap();
        let p = Pattern::new(vec![0, 0], vec![PEdge::arc(0, 1, 1, false)], false).unwrap();
        assert!(matches!(frustration(&p, &only_excluded), Err(Error::Rejected(_))));
        assert!(SignMap::new(vec![Sign::Excluded]).is_err());
    }

    #[test]
    fn class_boundaries() {
        use RuleFrustrationClass::*;
        assert_eq!(classify_counts(0, 1), Increasing);
        assert_eq!(classify_counts(0, 0), ZeroConsequent);
        assert_eq!(classify_counts(1, 1), Decreasing);
        assert_eq!(classify_counts(2, 3), Increasing);
    }

    #[test]
    fn pardus_preset() {
        let names: Vec<String> = ["Friendship", "enemies", "attacks", "trade"].map(String::from).to_vec();
        let s = SignMap::pardus(&names).unwrap();
        assert_eq!(s.sign(0), Sign::Positive);
        assert_eq!(s.sign(1), Sign::Negative);
        assert_eq!(s.sign(2), Sign::Negative);
        assert_eq!(s.sign(3), Sign::Excluded);
        let parsed = SignMap::parse("trade=-, Friendship=+", &names).unwrap();
        assert_eq!(parsed.sign(3), Sign::Negative);
        assert_eq!(parsed.sign(1), Sign::Excluded);
        assert!(SignMap::parse("nope=+", &names).is_err());
    }
}
