//! Catalogue and class files, bundled manifold tables, and catalogue diffs.
//!
//! A catalogue file is plain text: `#` header lines, then one entry per line as
//! `order;code;B|N;genus` where `code` is itself `order;w1,w2,...`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::classify::ClassRecord;
use crate::code::Code;

pub const FORMAT_NAME: &str = "gem-census catalogue";
pub const FORMAT_VERSION: (u32, u32) = (1, 0);

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("malformed file at line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },
    #[error("unsupported format version {found} (expected {expected}.x)")]
    VersionMismatch { found: String, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn check_version(v: &str, line: usize) -> Result<(), CatalogError> {
    let v = v.trim_start_matches('v');
    let major: u32 = v.split('.').next().and_then(|m| m.parse().ok()).ok_or_else(|| malformed(line, "bad version"))?;
    if major != FORMAT_VERSION.0 {
        return Err(CatalogError::VersionMismatch { found: v.to_string(), expected: FORMAT_VERSION.0 });
    }
    Ok(())
}

fn malformed(line: usize, reason: impl Into<String>) -> CatalogError {
    CatalogError::MalformedFile { line, reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CatalogueEntry {
    pub code: Code,
    pub bipartite: bool,
    pub genus: usize,
}

impl CatalogueEntry {
    pub fn order(&self) -> usize {
        self.code.order()
    }
}

/// Entries sorted by `(order, code)` without duplicate codes, plus provenance lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalogue {
    /// `key: value` provenance pairs, in insertion order.
    pub provenance: Vec<(String, String)>,
    entries: Vec<CatalogueEntry>,
}

impl Catalogue {
    pub fn new() -> Self {
        Catalogue::default()
    }

    pub fn with_provenance(mut self, key: &str, value: impl ToString) -> Self {
        self.provenance.push((key.to_string(), value.to_string()));
        self
    }

    pub fn entries(&self) -> &[CatalogueEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts unless the code is already present; returns whether it was new.
    pub fn insert(&mut self, entry: CatalogueEntry) -> bool {
        match self.entries.binary_search_by(|e| e.code.cmp(&entry.code)) {
            Ok(_) => false,
            Err(pos) => {
                self.entries.insert(pos, entry);
                true
            }
        }
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = CatalogueEntry>) {
        let mut all: BTreeMap<Code, CatalogueEntry> =
            self.entries.drain(..).map(|e| (e.code.clone(), e)).collect();
        for e in entries {
            all.entry(e.code.clone()).or_insert(e);
        }
        self.entries = all.into_values().collect();
    }

    pub fn contains(&self, code: &Code) -> bool {
        self.entries.binary_search_by(|e| e.code.cmp(code)).is_ok()
    }

    /// Entries satisfying `keep`, with the same provenance.
    pub fn filtered(&self, keep: impl Fn(&CatalogueEntry) -> bool) -> Catalogue {
        Catalogue { provenance: self.provenance.clone(), entries: self.entries.iter().filter(|e| keep(e)).cloned().collect() }
    }

    /// `(bipartite, non-bipartite)` counts per order.
    pub fn counts_by_order(&self) -> BTreeMap<usize, (usize, usize)> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            let c = out.entry(e.order()).or_insert((0, 0));
            if e.bipartite {
                c.0 += 1;
            } else {
                c.1 += 1;
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# {FORMAT_NAME} v{}.{}\n", FORMAT_VERSION.0, FORMAT_VERSION.1);
        for (k, v) in &self.provenance {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        for e in &self.entries {
            s.push_str(&format!("{};{};{};{}\n", e.order(), e.code, if e.bipartite { "B" } else { "N" }, e.genus));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Catalogue, CatalogError> {
        let mut cat = Catalogue::new();
        let mut seen_version = false;
        let mut entries = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let h = h.trim();
                if let Some(v) = h.strip_prefix(FORMAT_NAME) {
                    check_version(v.trim(), line_no)?;
                    seen_version = true;
                } else if let Some((key, value)) = h.split_once(':') {
                    cat.provenance.push((key.trim().to_string(), value.trim().to_string()));
                }
                continue;
            }
            let fields: Vec<&str> = line.split(';').collect();
            if fields.len() != 5 {
                return Err(malformed(line_no, "expected order;code;B|N;genus"));
            }
            let code: Code = format!("{};{}", fields[1], fields[2])
                .parse()
                .map_err(|e: crate::code::CodeError| malformed(line_no, e.to_string()))?;
            let order: usize = fields[0].parse().map_err(|_| malformed(line_no, "bad order"))?;
            if order != code.order() {
                return Err(malformed(line_no, "order does not match code"));
            }
            let bipartite = match fields[3] {
                "B" => true,
                "N" => false,
                other => return Err(malformed(line_no, format!("bad bipartiteness flag {other:?}"))),
            };
            let genus = fields[4].parse().map_err(|_| malformed(line_no, "bad genus"))?;
            entries.push(CatalogueEntry { code, bipartite, genus });
        }
        if !seen_version && !entries.is_empty() {
            return Err(malformed(1, "missing version header"));
        }
        let n = entries.len();
        cat.extend(entries);
        if cat.len() != n {
            return Err(malformed(0, "duplicate codes"));
        }
        Ok(cat)
    }

    pub fn save(&self, path: &Path) -> Result<(), CatalogError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Catalogue, CatalogError> {
        Catalogue::parse(&fs::read_to_string(path)?)
    }
}

/// Codes present in exactly one of two catalogues, grouped by order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CatalogueDiff {
    pub only_left: BTreeMap<usize, Vec<Code>>,
    pub only_right: BTreeMap<usize, Vec<Code>>,
}

impl CatalogueDiff {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }

    /// The same diff seen from the other side.
    pub fn mirrored(&self) -> CatalogueDiff {
        CatalogueDiff { only_left: self.only_right.clone(), only_right: self.only_left.clone() }
    }
}

impl fmt::Display for CatalogueDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders: BTreeSet<usize> = self.only_left.keys().chain(self.only_right.keys()).copied().collect();
        for o in orders {
            writeln!(f, "order {o}")?;
            for c in self.only_left.get(&o).into_iter().flatten() {
                writeln!(f, "< {c}")?;
            }
            for c in self.only_right.get(&o).into_iter().flatten() {
                writeln!(f, "> {c}")?;
            }
        }
        Ok(())
    }
}

pub fn diff(a: &Catalogue, b: &Catalogue) -> CatalogueDiff {
    let mut d = CatalogueDiff::default();
    for e in a.entries() {
        if !b.contains(&e.code) {
            d.only_left.entry(e.order()).or_default().push(e.code.clone());
        }
    }
    for e in b.entries() {
        if !a.contains(&e.code) {
            d.only_right.entry(e.order()).or_default().push(e.code.clone());
        }
    }
    d
}

/// Per-order counts laid out as a two-row table (bipartite, then non-bipartite).
pub fn format_table1(counts: &BTreeMap<usize, (usize, usize)>) -> String {
    let orders: Vec<usize> = counts.keys().copied().collect();
    let width = orders.iter().map(|o| o.to_string().len()).max().unwrap_or(2).max(3);
    let row = |label: &str, f: &dyn Fn(&(usize, usize)) -> usize| {
        let mut s = format!("{label:<8}");
        for o in &orders {
            s.push_str(&format!(" {:>width$}", f(&counts[o])));
        }
        s
    };
    let mut s = format!("{:<8}", "2p");
    for o in &orders {
        s.push_str(&format!(" {o:>width$}"));
    }
    format!("{s}\n{}\n{}\n", row("bip", &|c| c.0), row("non-bip", &|c| c.1))
}

/// `(code, name)` pairs from a known-manifold file: `<code> <name...>` per line, `#` comments.
pub fn parse_known(text: &str) -> Result<Vec<(Code, String)>, CatalogError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (code, name) = line.split_once(char::is_whitespace).ok_or_else(|| malformed(k + 1, "expected <code> <name>"))?;
        let code: Code = code.parse().map_err(|e: crate::code::CodeError| malformed(k + 1, e.to_string()))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(malformed(k + 1, "empty name"));
        }
        out.push((code, name.to_string()));
    }
    Ok(out)
}

pub fn format_known(known: &[(Code, String)]) -> String {
    known.iter().map(|(c, n)| format!("{c} {n}\n")).collect()
}

/// One row of a bundled manifold table. Six-tuples are carried verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedRow {
    pub tetrahedra: usize,
    pub six_tuple: Option<String>,
    pub name: String,
    pub position: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedTable {
    pub rows: Vec<NamedRow>,
}

impl NamedTable {
    fn parse(text: &str) -> NamedTable {
        let rows = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let f: Vec<&str> = l.split('|').collect();
                match f.len() {
                    2 => NamedRow { tetrahedra: f[0].parse().unwrap(), six_tuple: None, name: f[1].into(), position: None },
                    _ => NamedRow {
                        tetrahedra: f[0].parse().unwrap(),
                        six_tuple: Some(f[1].into()),
                        name: f[2].into(),
                        position: Some(f[3].into()),
                    },
                }
            })
            .collect();
        NamedTable { rows }
    }

    pub fn to_text(&self) -> String {
        self.rows
            .iter()
            .map(|r| match (&r.six_tuple, &r.position) {
                (Some(t), Some(p)) => format!("{:>2}  {:<18} {:<5} {}\n", r.tetrahedra, t, p, r.name),
                _ => format!("{:>2}  {}\n", r.tetrahedra, r.name),
            })
            .collect()
    }
}

/// Prime orientable genus-two manifolds with crystallizations of at most 42 vertices.
pub fn table2() -> NamedTable {
    NamedTable::parse(include_str!("../data/table2.txt"))
}

/// Prime non-orientable genus-two manifolds with crystallizations of at most 42 vertices.
pub fn table3() -> NamedTable {
    NamedTable::parse(include_str!("../data/table3.txt"))
}

/// A Seifert manifold over S² with three exceptional fibres and the parameters of the
/// three layered solid tori that build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeifertRow {
    pub fibres: [(i64, i64); 3],
    pub tori: [(i64, i64, i64); 3],
}

fn numbers(s: &str) -> Vec<i64> {
    s.split(|c: char| !(c.is_ascii_digit() || c == '-'))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().unwrap())
        .collect()
}

/// Bundled list of Seifert manifolds and their layered-solid-torus triples.
pub fn seifert_table() -> Vec<SeifertRow> {
    include_str!("../data/seifert_lst.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (m, t) = l.split_once('|').unwrap();
            let m = numbers(m);
            let t = numbers(t);
            // leading "2" of S2 is the first number of the manifold part
            SeifertRow {
                fibres: [(m[1], m[2]), (m[3], m[4]), (m[5], m[6])],
                tori: [(t[0], t[1], t[2]), (t[3], t[4], t[5]), (t[6], t[7], t[8])],
            }
        })
        .collect()
}

/// Header line of class files.
pub const CLASS_FORMAT_NAME: &str = "gem-census classes";

/// Block format: `class <id> rep=<code> name=<name|?>` (with a trailing ` unresolved` when
/// flagged), then one `<code> h=<k>` line per member.
pub fn format_classes(classes: &[ClassRecord]) -> String {
    let mut out = format!("# {CLASS_FORMAT_NAME} v{}.{}\n", FORMAT_VERSION.0, FORMAT_VERSION.1);
    for c in classes {
        let name = c.name.as_deref().unwrap_or("?");
        out.push_str(&format!("class {} rep={} name={name}", c.id, c.representative));
        if c.unresolved {
            out.push_str(" unresolved");
        }
        out.push('\n');
        for (code, h) in &c.members {
            out.push_str(&format!("{code} h={h}\n"));
        }
    }
    out
}

pub fn parse_classes(text: &str) -> Result<Vec<ClassRecord>, CatalogError> {
    let mut out: Vec<ClassRecord> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let n = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if let Some(v) = h.trim().strip_prefix(CLASS_FORMAT_NAME) {
                check_version(v.trim(), n)?;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("class ") {
            let (rest, unresolved) = match rest.strip_suffix(" unresolved") {
                Some(r) => (r, true),
                None => (rest, false),
            };
            let mut parts = rest.splitn(3, ' ');
            let id = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| malformed(n, "bad class id"))?;
            let rep = parts.next().and_then(|t| t.strip_prefix("rep=")).ok_or_else(|| malformed(n, "missing rep="))?;
            let representative: Code = rep.parse().map_err(|e: crate::code::CodeError| malformed(n, e.to_string()))?;
            let name = parts.next().and_then(|t| t.strip_prefix("name=")).ok_or_else(|| malformed(n, "missing name="))?;
            let name = if name == "?" { None } else { Some(name.to_string()) };
            out.push(ClassRecord { id, representative, members: Vec::new(), name, unresolved });
            continue;
        }
        let class = out.last_mut().ok_or_else(|| malformed(n, "member line before any class header"))?;
        let (code, h) = line.split_once(" h=").ok_or_else(|| malformed(n, "expected <code> h=<k>"))?;
        let code: Code = code.parse().map_err(|e: crate::code::CodeError| malformed(n, e.to_string()))?;
        let h = h.trim().parse().map_err(|_| malformed(n, "bad h"))?;
        class.members.push((code, h));
    }
    for c in &out {
        if !c.members.iter().any(|(m, _)| *m == c.representative) {
            return Err(malformed(0, format!("class {} does not contain its representative", c.id)));
        }
    }
    Ok(out)
}

pub fn save_classes(classes: &[ClassRecord], path: &Path) -> Result<(), CatalogError> {
    fs::write(path, format_classes(classes))?;
    Ok(())
}

pub fn load_classes(path: &Path) -> Result<Vec<ClassRecord>, CatalogError> {
    parse_classes(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::canonical_code;
    use crate::graph::ColouredGraph;
    use crate::library::{lens_3_1, rp3};

    fn sample() -> Catalogue {
        let mut c = Catalogue::new().with_provenance("max order", 12).with_provenance("genus", 1);
        for g in [rp3(), lens_3_1(), ColouredGraph::sphere()] {
            c.insert(CatalogueEntry { code: canonical_code(&g), bipartite: g.is_bipartite(), genus: 1 });
        }
        c
    }

    #[test]
    fn round_trip_is_lossless_and_deterministic() {
        let c = sample();
        let text = c.to_text();
        let back = Catalogue::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
        assert!(text.starts_with("# gem-census catalogue v1.0\n# max order: 12\n"));
        assert_eq!(c.entries()[0].order(), 2);
    }

    #[test]
    fn version_and_format_errors() {
        let bad = "# gem-census catalogue v2.0\n";
        assert!(matches!(Catalogue::parse(bad), Err(CatalogError::VersionMismatch { .. })));
        let minor = "# gem-census catalogue v1.7\n2;2;1,1,1,1,0,0,0,0;B;0\n";
        assert_eq!(Catalogue::parse(minor).unwrap().len(), 1);
        for bad in [
            "# gem-census catalogue v1.0\n2;2;1,1,1,1,0,0,0,0;X;0\n",
            "# gem-census catalogue v1.0\n4;2;1,1,1,1,0,0,0,0;B;0\n",
            "# gem-census catalogue v1.0\n2;2;1,1,1;B;0\n",
            "2;2;1,1,1,1,0,0,0,0;B;0\n",
        ] {
            assert!(matches!(Catalogue::parse(bad), Err(CatalogError::MalformedFile { .. })), "{bad}");
        }
        assert!(Catalogue::parse("").unwrap().is_empty());
    }

    #[test]
    fn diff_properties() {
        let a = sample();
        assert!(diff(&a, &a).is_empty());
        let b = a.filtered(|e| e.order() <= 8);
        let d = diff(&a, &b);
        assert_eq!(d.only_left.len(), 1);
        assert_eq!(d.only_left[&12].len(), 1);
        assert!(d.only_right.is_empty());
        assert_eq!(diff(&b, &a), d.mirrored());
        assert!(d.to_string().starts_with("order 12\n< 12;"));
    }

    #[test]
    fn duplicate_insert_is_ignored() {
        let mut c = sample();
        let e = c.entries()[1].clone();
        assert!(!c.insert(e));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn bundled_tables() {
        let t2 = table2();
        assert_eq!(t2.rows.len(), 78);
        assert!(t2.rows.iter().all(|r| r.tetrahedra % 2 == 0 && !r.name.is_empty()));
        assert_eq!(t2.rows[0].tetrahedra, 18);
        assert!(t2.rows[0].name.starts_with("S3/Q8"));
        assert_eq!(table3().rows.len(), 7);
        assert_eq!(table3().rows[0].name, "RP2 x S1");
        let s = seifert_table();
        assert_eq!(s.len(), 24);
        assert_eq!(s[1].fibres, [(2, 1), (4, 1), (4, -1)]);
        assert_eq!(s[1].tori, [(2, 1, -3), (4, 1, -5), (4, -5, 1)]);
        for row in &s {
            for (a, t, g) in row.tori {
                assert_eq!(a + t + g, 0);
            }
        }
    }

    #[test]
    fn known_files() {
        assert!(parse_known("").unwrap().is_empty());
        let k = parse_known("# comment\n2;1,1,1,1,0,0,0,0 S3\n").unwrap();
        assert_eq!(k[0].1, "S3");
        assert_eq!(parse_known(&format_known(&k)).unwrap(), k);
        assert!(parse_known("2;1,1,1,1,0,0,0,0\n").is_err());
    }

    #[test]
    fn table1_layout() {
        let mut counts = BTreeMap::new();
        counts.insert(14, (1, 1));
        counts.insert(16, (2, 1));
        let t = format_table1(&counts);
        assert_eq!(t, "2p        14  16\nbip        1   2\nnon-bip    1   1\n");
    }

    #[test]
    fn class_file_round_trip() {
        let a: Code = "2;1,1,1,1,0,0,0,0".parse().unwrap();
        let b: Code = crate::canonical_code(&crate::library::rp3());
        let classes = vec![
            ClassRecord { id: 1, representative: a.clone(), members: vec![(a, 0)], name: Some("S3".into()), unresolved: false },
            ClassRecord { id: 2, representative: b.clone(), members: vec![(b, 1)], name: None, unresolved: true },
        ];
        let text = format_classes(&classes);
        assert!(text.contains("class 1 rep=2;1,1,1,1,0,0,0,0 name=S3\n2;1,1,1,1,0,0,0,0 h=0\n"));
        assert!(text.contains("name=? unresolved\n"));
        assert_eq!(parse_classes(&text).unwrap(), classes);
        assert!(matches!(parse_classes("# gem-census classes v2.0\n"), Err(CatalogError::VersionMismatch { .. })));
        assert!(matches!(parse_classes("2;1,1,1,1,0,0,0,0 h=0\n"), Err(CatalogError::MalformedFile { .. })));
    }
}
