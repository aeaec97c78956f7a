//! Partitioning a catalogue into classes of move-equivalent crystallizations.
//!
//! From each graph a bounded breadth-first search applies move families (each step ends with
//! [`reduce_to_rigid`]) and records every rigid crystallization reached together with the
//! number of ρ₃-switches on the way. Two graphs whose searches reach a common code share a
//! class; the ρ₃ counts fix the relative handle number `h`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::CatalogueEntry;
use crate::code::{canonical_code, from_code, Code};
use crate::graph::ColouredGraph;
use crate::invariants::{first_homology, HomologyResult};
use crate::moves::{add_dipole, cancel_generalized_dipole, delete_dipole, dipole_sites, find_dipoles, find_generalized_dipoles, reduce_to_rigid};
use crate::sum::prime_pieces;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("invalid budget {0:?}: expected m,n,inflate,len with positive integers")]
    BadBudget(String),
    #[error("unknown move family {0:?}")]
    UnknownFamily(String),
}

/// Limits of the per-graph search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBudget {
    /// How far above the starting order intermediate graphs may grow.
    pub max_order_inflation: usize,
    /// Largest `(m, n)` of a generalized dipole that is cancelled.
    pub max_gd_size: (usize, usize),
    /// Maximum number of steps from the starting graph.
    pub max_sequence_length: usize,
    /// Maximum number of distinct codes visited per graph.
    pub max_frontier: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_order_inflation: 4, max_gd_size: (4, 4), max_sequence_length: 12, max_frontier: 4000 }
    }
}

impl SearchBudget {
    /// Parses `m,n,inflate,len`.
    pub fn parse(s: &str) -> Result<Self, ClassifyError> {
        let bad = || ClassifyError::BadBudget(s.to_string());
        let v: Vec<usize> = s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        if v.len() != 4 || v.iter().any(|&x| x == 0) {
            return Err(bad());
        }
        Ok(SearchBudget { max_gd_size: (v[0], v[1]), max_order_inflation: v[2], max_sequence_length: v[3], ..Default::default() })
    }
}

/// A way of stepping from a rigid crystallization to nearby rigid crystallizations.
pub trait MoveFamily: Send + Sync {
    fn name(&self) -> &'static str;
    /// Results after reduction, with the ρ₃-switches spent; no intermediate graph exceeds
    /// `order_limit`.
    fn neighbours(&self, g: &ColouredGraph, budget: &SearchBudget, order_limit: usize) -> Vec<(ColouredGraph, usize)>;
}

/// Cancels one generalized dipole, then reduces.
pub struct GdCancel;

impl MoveFamily for GdCancel {
    fn name(&self) -> &'static str {
        "gd-cancel"
    }

    fn neighbours(&self, g: &ColouredGraph, budget: &SearchBudget, order_limit: usize) -> Vec<(ColouredGraph, usize)> {
        let (m, n) = budget.max_gd_size;
        find_generalized_dipoles(g, m, n)
            .iter()
            .filter_map(|d| cancel_generalized_dipole(g, d).ok())
            .filter(|h| h.order() <= order_limit)
            .map(|h| {
                let (r, log) = reduce_to_rigid(&h);
                (r, log.rho3_count)
            })
            .collect()
    }
}

/// Adds a dipole of type two, cancels a different dipole it created, then reduces.
pub struct DipoleExchange;

impl MoveFamily for DipoleExchange {
    fn name(&self) -> &'static str {
        "dipole-exchange"
    }

    fn neighbours(&self, g: &ColouredGraph, _budget: &SearchBudget, order_limit: usize) -> Vec<(ColouredGraph, usize)> {
        if g.order() + 2 > order_limit {
            return Vec::new();
        }
        let n = g.order();
        let mut out = Vec::new();
        for site in dipole_sites(g, 2) {
            let Ok(big) = add_dipole(g, &site) else { continue };
            for d in find_dipoles(&big) {
                if (d.x, d.y) == (n, n + 1) || (d.x < n && d.y < n) {
                    continue;
                }
                if let Ok(h) = delete_dipole(&big, &d) {
                    let (r, log) = reduce_to_rigid(&h);
                    out.push((r, log.rho3_count));
                }
            }
        }
        out
    }
}

pub const DEFAULT_MOVE_FAMILIES: [&str; 2] = ["gd-cancel", "dipole-exchange"];

pub fn move_families() -> Vec<Box<dyn MoveFamily>> {
    vec![Box::new(GdCancel), Box::new(DipoleExchange)]
}

pub fn move_family(name: &str) -> Result<Box<dyn MoveFamily>, ClassifyError> {
    move_families().into_iter().find(|f| f.name() == name).ok_or_else(|| ClassifyError::UnknownFamily(name.to_string()))
}

/// Codes reached from one graph with their ρ₃ counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    pub reached: BTreeMap<Code, usize>,
    /// The search stopped on a budget limit with unexplored graphs left.
    pub truncated: bool,
}

pub fn frontier(g: &ColouredGraph, families: &[Box<dyn MoveFamily>], budget: &SearchBudget) -> Frontier {
    let limit = g.order() + budget.max_order_inflation;
    let start = canonical_code(g);
    let mut reached = BTreeMap::new();
    reached.insert(start, 0usize);
    let mut queue = VecDeque::from([(g.clone(), 0usize, 0usize)]);
    let mut truncated = false;
    while let Some((cur, h, depth)) = queue.pop_front() {
        if depth == budget.max_sequence_length {
            truncated = true;
            continue;
        }
        for family in families {
            for (next, r3) in family.neighbours(&cur, budget, limit) {
                if next.order() > limit {
                    continue;
                }
                let code = canonical_code(&next);
                if reached.contains_key(&code) {
                    continue;
                }
                if reached.len() >= budget.max_frontier {
                    truncated = true;
                    continue;
                }
                reached.insert(code, h + r3);
                queue.push_back((next, h + r3, depth + 1));
            }
        }
    }
    Frontier { reached, truncated }
}

/// Cheap invariants used to refuse unsound merges: `H₁`, bipartiteness, regular genus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub homology: HomologyResult,
    pub bipartite: bool,
    pub genus: Option<usize>,
}

pub fn class_fingerprint(g: &ColouredGraph) -> Fingerprint {
    Fingerprint { homology: first_homology(g), bipartite: g.is_bipartite(), genus: g.regular_genus().ok() }
}

/// Whether `a = M #_x H` and `b = M #_y H` with `x - y = diff` is consistent with homology.
fn compatible(a: &Fingerprint, b: &Fingerprint, diff: i64) -> bool {
    a.homology.torsion == b.homology.torsion && a.homology.free_rank as i64 - b.homology.free_rank as i64 == diff
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub id: usize,
    pub representative: Code,
    /// `(code, h)` sorted by code.
    pub members: Vec<(Code, usize)>,
    /// Manifold of the `h = 0` subclass, when known.
    pub name: Option<String>,
    pub unresolved: bool,
}

impl ClassRecord {
    /// `M` for `h = 0`, `M #_h H` otherwise.
    pub fn member_name(&self, h: usize) -> Option<String> {
        self.name.as_ref().map(|m| if h == 0 { m.clone() } else { format!("{m} #_{h} H") })
    }
}

/// Union-find with potentials: `h(x) - h(root(x)) = pot[x]`.
struct WeightedUf {
    parent: Vec<usize>,
    pot: Vec<i64>,
}

impl WeightedUf {
    fn new(n: usize) -> Self {
        WeightedUf { parent: (0..n).collect(), pot: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, i64) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (r, d) = self.find(p);
        self.parent[x] = r;
        self.pot[x] += d;
        (r, self.pot[x])
    }

    /// Records `h(a) - h(b) = diff`; false if already joined inconsistently.
    fn union(&mut self, a: usize, b: usize, diff: i64) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa - pb == diff;
        }
        // keep the smaller index as root for determinism
        if ra < rb {
            self.parent[rb] = ra;
            self.pot[rb] = pa - pb - diff;
        } else {
            self.parent[ra] = rb;
            self.pot[ra] = diff + pb - pa;
        }
        true
    }
}

/// Result of [`gamma_class`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub classes: Vec<ClassRecord>,
    /// Merges refused because homology contradicted the handle counts.
    pub refused_merges: usize,
}

impl Classification {
    pub fn class_of(&self, code: &Code) -> Option<&ClassRecord> {
        self.classes.iter().find(|c| c.members.iter().any(|(m, _)| m == code))
    }

    pub fn unresolved(&self) -> usize {
        self.classes.iter().filter(|c| c.unresolved).count()
    }
}

/// Partitions `entries` (plus the `known` crystallizations, which only contribute names).
pub fn gamma_class(entries: &[CatalogueEntry], known: &[(Code, String)], budget: &SearchBudget, families: &[Box<dyn MoveFamily>]) -> Classification {
    let mut items: Vec<Code> = entries.iter().map(|e| e.code.clone()).collect();
    items.sort();
    items.dedup();
    let n_members = items.len();
    let mut names: HashMap<usize, String> = HashMap::new();
    for (code, name) in known {
        let idx = match items.iter().position(|c| c == code) {
            Some(i) => i,
            None => {
                items.push(code.clone());
                items.len() - 1
            }
        };
        names.entry(idx).or_insert_with(|| name.clone());
    }
    let graphs: Vec<ColouredGraph> = items.iter().map(|c| from_code(c).expect("catalogue codes are canonical")).collect();
    let results: Vec<(Frontier, Fingerprint)> = graphs
        .par_iter()
        .map(|g| {
            let (r, log) = reduce_to_rigid(g);
            let mut f = frontier(&r, families, budget);
            if log.rho3_count > 0 || canonical_code(&r) != canonical_code(g) {
                // a known graph that was not rigid: shift its frontier to its own level
                f.reached = f.reached.into_iter().map(|(c, h)| (c, h + log.rho3_count)).collect();
                f.reached.insert(canonical_code(g), 0);
            }
            (f, class_fingerprint(g))
        })
        .collect();

    let mut uf = WeightedUf::new(items.len());
    let mut refused = 0;
    let mut first_seen: HashMap<&Code, (usize, usize)> = HashMap::new();
    for (i, (f, _)) in results.iter().enumerate() {
        for (code, &h) in &f.reached {
            match first_seen.get(code) {
                None => {
                    first_seen.insert(code, (i, h));
                }
                Some(&(j, hj)) => {
                    // M_i = M_code #_h H and M_j = M_code #_hj H
                    let diff = h as i64 - hj as i64;
                    let (ri, pi) = uf.find(i);
                    let (rj, pj) = uf.find(j);
                    if ri == rj {
                        if pi - pj != diff {
                            refused += 1;
                        }
                    } else if compatible(&results[i].1, &results[j].1, diff) {
                        uf.union(i, j, diff);
                    } else {
                        refused += 1;
                    }
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
    for i in 0..items.len() {
        let (r, p) = uf.find(i);
        groups.entry(r).or_default().push((i, p));
    }
    let mut classes: Vec<ClassRecord> = Vec::new();
    for group in groups.values() {
        let members_idx: Vec<&(usize, i64)> = group.iter().filter(|(i, _)| *i < n_members).collect();
        if members_idx.is_empty() {
            continue;
        }
        let floor = group.iter().map(|x| x.1).min().unwrap();
        let mut members: Vec<(Code, usize)> = members_idx.iter().map(|&&(i, p)| (items[i].clone(), (p - floor) as usize)).collect();
        members.sort();
        let min_h = members.iter().map(|m| m.1).min().unwrap();
        let representative = members
            .iter()
            .filter(|m| m.1 == min_h)
            .map(|m| &m.0)
            .min_by_key(|c| (c.order(), (*c).clone()))
            .unwrap()
            .clone();
        // a known graph at level k names level 0 only when k = 0
        let name = group
            .iter()
            .filter(|(i, p)| names.contains_key(i) && *p == floor)
            .map(|(i, _)| names[i].clone())
            .min();
        let unresolved = members.len() == 1 && results[members_idx[0].0].0.truncated;
        classes.push(ClassRecord { id: 0, representative, members, name, unresolved });
    }
    classes.sort_by(|a, b| (a.representative.order(), &a.representative).cmp(&(b.representative.order(), &b.representative)));
    for (k, c) in classes.iter_mut().enumerate() {
        c.id = k + 1;
    }
    Classification { classes, refused_merges: refused }
}

/// Parses named codes and checks them.
pub fn ingest_known(texts: &[&str]) -> Result<Vec<(Code, String)>, crate::catalog::CatalogError> {
    let mut out = Vec::new();
    for t in texts {
        out.extend(crate::catalog::parse_known(t)?);
    }
    Ok(out)
}

/// Named crystallizations of genus at most one bundled with the library.
pub fn standard_known() -> Vec<(Code, String)> {
    use crate::library::{lens_3_1, rp3, s2_x_s1, twisted_s2_bundle};
    [
        (ColouredGraph::sphere(), "S3"),
        (rp3(), "L(2,1)"),
        (lens_3_1(), "L(3,1)"),
        (s2_x_s1(), "S1xS2"),
        (twisted_s2_bundle(), "S1x~S2"),
    ]
    .into_iter()
    .map(|(g, n)| (canonical_code(&reduce_to_rigid(&g).0), n.to_string()))
    .collect()
}

/// Name of a manifold of regular genus at most one, from genus, orientability and `H₁`.
/// Lens spaces are named only when `H₁` determines them.
pub fn small_genus_name(g: &ColouredGraph) -> Option<String> {
    let genus = g.regular_genus().ok()?;
    match genus {
        0 => Some("S3".into()),
        1 if !g.is_bipartite() => Some("S1x~S2".into()),
        1 => {
            let h = first_homology(g);
            if h.free_rank == 1 {
                return Some("S1xS2".into());
            }
            let p = h.order()?;
            let p: u64 = p.try_into().ok()?;
            Some(if [2, 3, 4, 6].contains(&p) { format!("L({p},1)") } else { format!("L({p},?)") })
        }
        _ => None,
    }
}

/// An entry satisfying the sharp split condition and its prime summands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumRecord {
    pub code: Code,
    pub summands: Vec<(Code, Option<String>)>,
}

impl SumRecord {
    pub fn name(&self) -> Option<String> {
        let names: Option<Vec<String>> = self.summands.iter().map(|s| s.1.clone()).collect();
        names.map(|n| n.join(" # "))
    }
}

pub fn detect_connected_sums(entries: &[CatalogueEntry], known: &[(Code, String)]) -> Vec<SumRecord> {
    let lookup: HashMap<&Code, &String> = known.iter().map(|(c, n)| (c, n)).collect();
    let mut out: Vec<SumRecord> = entries
        .par_iter()
        .filter_map(|e| {
            let g = from_code(&e.code).ok()?;
            let pieces = prime_pieces(&g);
            if pieces.len() < 2 {
                return None;
            }
            let mut summands: Vec<(Code, Option<String>)> = pieces
                .iter()
                .map(|p| {
                    let r = reduce_to_rigid(p).0;
                    let code = canonical_code(&r);
                    let name = lookup.get(&code).map(|s| s.to_string()).or_else(|| small_genus_name(&r));
                    (code, name)
                })
                .collect();
            summands.sort();
            Some(SumRecord { code: e.code.clone(), summands })
        })
        .collect();
    out.sort_by(|a, b| a.code.cmp(&b.code));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{generate_order, Pruned};
    use crate::library::{lens_3_1, rp3, s2_x_s1, twisted_s2_bundle};
    use crate::sum::connected_sum;

    fn entry(g: &ColouredGraph) -> CatalogueEntry {
        CatalogueEntry { code: canonical_code(g), bipartite: g.is_bipartite(), genus: g.regular_genus().unwrap() }
    }

    #[test]
    fn budget_parsing() {
        let b = SearchBudget::parse("3,2,6,10").unwrap();
        assert_eq!(b.max_gd_size, (3, 2));
        assert_eq!(b.max_order_inflation, 6);
        assert_eq!(b.max_sequence_length, 10);
        assert!(SearchBudget::parse("3,2,6").is_err());
        assert!(SearchBudget::parse("3,0,6,1").is_err());
        assert!(move_family("gd-cancel").is_ok());
        assert!(move_family("nope").is_err());
    }

    #[test]
    fn weighted_union_find_potentials() {
        let mut uf = WeightedUf::new(4);
        assert!(uf.union(1, 0, 2));
        assert!(uf.union(2, 1, -1));
        assert_eq!(uf.find(2).1 - uf.find(0).1, 1);
        assert!(!uf.union(2, 0, 3));
        assert!(uf.union(3, 2, 0));
        assert_eq!(uf.find(3).1 - uf.find(1).1, -1);
    }

    #[test]
    fn same_code_twice_is_one_class() {
        let g = rp3();
        let h = g.relabel(&(0..g.order()).rev().collect::<Vec<_>>(), &[1, 0, 3, 2]);
        let entries = [entry(&g), entry(&h)];
        let c = gamma_class(&entries, &[], &SearchBudget::default(), &move_families());
        assert_eq!(c.classes.len(), 1);
        assert_eq!(c.classes[0].members.len(), 1);
        assert_eq!(c.classes[0].members[0].1, 0);
    }

    #[test]
    fn known_graphs_name_classes() {
        let known = standard_known();
        let entries = [entry(&ColouredGraph::sphere()), entry(&rp3()), entry(&lens_3_1())];
        let c = gamma_class(&entries, &known, &SearchBudget::default(), &move_families());
        let names: Vec<Option<String>> = c.classes.iter().map(|r| r.name.clone()).collect();
        assert_eq!(names, vec![Some("S3".into()), Some("L(2,1)".into()), Some("L(3,1)".into())]);
        assert_eq!(c.classes[0].member_name(2).unwrap(), "S3 #_2 H");
        let empty = gamma_class(&[], &known, &SearchBudget::default(), &move_families());
        assert!(empty.classes.is_empty());
    }

    #[test]
    fn small_genus_names() {
        assert_eq!(small_genus_name(&ColouredGraph::sphere()).unwrap(), "S3");
        assert_eq!(small_genus_name(&rp3()).unwrap(), "L(2,1)");
        assert_eq!(small_genus_name(&s2_x_s1()).unwrap(), "S1xS2");
        assert_eq!(small_genus_name(&twisted_s2_bundle()).unwrap(), "S1x~S2");
    }

    #[test]
    fn manufactured_sum_is_detected() {
        let g = connected_sum(&rp3(), 0, &lens_3_1(), 0);
        let found = detect_connected_sums(&[entry(&g)], &standard_known());
        assert_eq!(found.len(), 1);
        let mut names: Vec<String> = found[0].summands.iter().map(|s| s.1.clone().unwrap()).collect();
        names.sort();
        assert_eq!(names, ["L(2,1)", "L(3,1)"]);
        assert!(detect_connected_sums(&[entry(&rp3())], &[]).is_empty());
    }

    #[test]
    fn census_classes_refine_fingerprints() {
        let mut entries = Vec::new();
        for p in 7..=9 {
            let r = generate_order(&Pruned, p, 2, None);
            for (codes, bip) in [(&r.bipartite, true), (&r.non_bipartite, false)] {
                for c in codes {
                    entries.push(CatalogueEntry { code: c.clone(), bipartite: bip, genus: 2 });
                }
            }
        }
        let a = gamma_class(&entries, &standard_known(), &SearchBudget::default(), &move_families());
        let b = gamma_class(&entries, &standard_known(), &SearchBudget::default(), &move_families());
        assert_eq!(a, b);
        assert_eq!(a.refused_merges, 0);
        let total: usize = a.classes.iter().map(|c| c.members.len()).sum();
        assert_eq!(total, entries.len());
        for c in &a.classes {
            let fps: Vec<(Fingerprint, usize)> =
                c.members.iter().map(|(code, h)| (class_fingerprint(&from_code(code).unwrap()), *h)).collect();
            for (f, h) in &fps {
                for (g, k) in &fps {
                    assert_eq!(f.homology.torsion, g.homology.torsion);
                    assert_eq!(f.homology.free_rank as i64 - g.homology.free_rank as i64, *h as i64 - *k as i64);
                }
            }
        }
    }
}
