//! Dipole moves, generalized dipole moves and ρ-pair switches.
//!
//! Every move here maps a gem to a gem of the same manifold, except the ρ₃ switch,
//! which splits off one S²-bundle-over-S¹ summand.

use std::fmt;

use thiserror::Error;

use crate::graph::{ColourSet, ColouredGraph, GraphError, NUM_COLOURS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("vertices ({0}, {1}) do not form a dipole")]
    NotADipole(usize, usize),
    #[error("deleting the dipole would leave an empty graph")]
    WouldAnnihilate,
    #[error("not a generalized dipole at pivot {0}")]
    NotAGeneralizedDipole(usize),
    #[error("not a rho-pair")]
    NotARhoPair,
    #[error("switch disconnects the graph")]
    Disconnects,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A k-dipole: two vertices joined by the edges of `colours` and lying in different
/// residues of the complementary colours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dipole {
    pub x: usize,
    pub y: usize,
    pub colours: ColourSet,
}

impl Dipole {
    pub fn kind(&self) -> usize {
        self.colours.len()
    }
}

/// Colours joining `x` and `y`.
fn joining_colours(g: &ColouredGraph, x: usize, y: usize) -> ColourSet {
    (0..NUM_COLOURS).filter(|&c| g.neighbour(x, c) == y).collect()
}

/// `Some(dipole)` when `x`,`y` form a dipole of type 1..=3.
pub fn dipole_at(g: &ColouredGraph, x: usize, y: usize) -> Option<Dipole> {
    let (x, y) = (x.min(y), x.max(y));
    if x == y || y >= g.order() {
        return None;
    }
    let colours = joining_colours(g, x, y);
    if colours.is_empty() || colours.len() == NUM_COLOURS {
        return None;
    }
    let (label, _) = g.residue_labels(colours.complement());
    (label[x] != label[y]).then_some(Dipole { x, y, colours })
}

/// All dipoles of type 1..=3 ordered by `(x, y)`.
pub fn find_dipoles(g: &ColouredGraph) -> Vec<Dipole> {
    let mut labels: [Option<Vec<u32>>; 16] = Default::default();
    let mut out = Vec::new();
    for x in 0..g.order() {
        let mut partners: Vec<usize> =
            (0..NUM_COLOURS).map(|c| g.neighbour(x, c)).filter(|&y| y > x).collect();
        partners.sort_unstable();
        partners.dedup();
        for y in partners {
            let colours = joining_colours(g, x, y);
            if colours.len() == NUM_COLOURS {
                continue;
            }
            let comp = colours.complement();
            let label = labels[comp.bits() as usize]
                .get_or_insert_with(|| g.residue_labels(comp).0);
            if label[x] != label[y] {
                out.push(Dipole { x, y, colours });
            }
        }
    }
    out
}

/// First dipole of the given type in `(x, y)` order.
pub fn first_dipole_of_type(g: &ColouredGraph, k: usize) -> Option<Dipole> {
    let mut labels: [Option<Vec<u32>>; 16] = Default::default();
    for x in 0..g.order() {
        let mut partners: Vec<usize> =
            (0..NUM_COLOURS).map(|c| g.neighbour(x, c)).filter(|&y| y > x).collect();
        partners.sort_unstable();
        partners.dedup();
        for y in partners {
            let colours = joining_colours(g, x, y);
            if colours.len() != k {
                continue;
            }
            let comp = colours.complement();
            let label = labels[comp.bits() as usize]
                .get_or_insert_with(|| g.residue_labels(comp).0);
            if label[x] != label[y] {
                return Some(Dipole { x, y, colours });
            }
        }
    }
    None
}

/// Removes `x`, `y` and joins, for each colour outside the dipole, their two neighbours.
pub fn delete_dipole(g: &ColouredGraph, d: &Dipole) -> Result<ColouredGraph, MoveError> {
    if g.order() <= 2 {
        return Err(MoveError::WouldAnnihilate);
    }
    if dipole_at(g, d.x, d.y) != Some(*d) {
        return Err(MoveError::NotADipole(d.x, d.y));
    }
    let mut rows = g.rows().to_vec();
    for c in d.colours.complement().iter() {
        let a = g.neighbour(d.x, c);
        let b = g.neighbour(d.y, c);
        rows[a][c] = b as u32;
        rows[b][c] = a as u32;
    }
    let keep: Vec<usize> = (0..g.order()).filter(|&v| v != d.x && v != d.y).collect();
    Ok(ColouredGraph::from_rows(ColouredGraph::renumber(&rows, &keep))?)
}

/// Where to insert a new dipole: the colours joining the new pair, and for each remaining
/// colour (in increasing order) a vertex `u` whose edge `(u, u')` of that colour is split,
/// `u` going to the first new vertex and `u'` to the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DipoleSite {
    pub colours: ColourSet,
    pub anchors: Vec<usize>,
}

/// Inserts two new vertices (numbered `order` and `order + 1`) forming a dipole.
pub fn add_dipole(g: &ColouredGraph, site: &DipoleSite) -> Result<ColouredGraph, MoveError> {
    let n = g.order();
    let (x, y) = (n, n + 1);
    let comp: Vec<usize> = site.colours.complement().iter().collect();
    if site.colours.is_empty() || site.colours.len() == NUM_COLOURS || comp.len() != site.anchors.len()
    {
        return Err(MoveError::NotADipole(x, y));
    }
    let mut rows = g.rows().to_vec();
    rows.push([0; NUM_COLOURS]);
    rows.push([0; NUM_COLOURS]);
    for c in site.colours.iter() {
        rows[x][c] = y as u32;
        rows[y][c] = x as u32;
    }
    for (&c, &u) in comp.iter().zip(&site.anchors) {
        if u >= n {
            return Err(MoveError::NotADipole(x, y));
        }
        let w = g.neighbour(u, c);
        rows[x][c] = u as u32;
        rows[u][c] = x as u32;
        rows[y][c] = w as u32;
        rows[w][c] = y as u32;
    }
    let out = ColouredGraph::from_rows(rows)?;
    if dipole_at(&out, x, y).map(|d| d.colours) != Some(site.colours) {
        return Err(MoveError::NotADipole(x, y));
    }
    Ok(out)
}

/// Sites adding a dipole of type `k` on `g` that pass the dipole test, in a fixed order.
pub fn dipole_sites(g: &ColouredGraph, k: usize) -> Vec<DipoleSite> {
    let mut out = Vec::new();
    for bits in 1u8..15 {
        let colours = ColourSet::from_bits(bits);
        if colours.len() != k {
            continue;
        }
        let comp: Vec<usize> = colours.complement().iter().collect();
        let mut anchors = vec![0usize; comp.len()];
        loop {
            let site = DipoleSite { colours, anchors: anchors.clone() };
            if add_dipole(g, &site).is_ok() {
                out.push(site);
            }
            // odometer over all vertices per anchor
            let mut pos = 0;
            loop {
                if pos == anchors.len() {
                    break;
                }
                anchors[pos] += 1;
                if anchors[pos] < g.order() {
                    break;
                }
                anchors[pos] = 0;
                pos += 1;
            }
            if pos == anchors.len() {
                break;
            }
        }
    }
    out
}

/// An (m,n)-dipole: an `{i,j}`-cycle `x0,x1..xm` and an `{h,k}`-cycle `x0,y1..yn` meeting only
/// in `x0`, where `x1` is `i`-adjacent and `xm` is `j`-adjacent to `x0` (same for `h`, `k`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedDipole {
    pub pivot: usize,
    /// `(i, j)`; always contains colour 0.
    pub first_colours: (usize, usize),
    pub second_colours: (usize, usize),
    /// `x1..xm`.
    pub first: Vec<usize>,
    /// `y1..yn`.
    pub second: Vec<usize>,
}

impl GeneralizedDipole {
    pub fn m(&self) -> usize {
        self.first.len()
    }

    pub fn n(&self) -> usize {
        self.second.len()
    }
}

const PARTITIONS: [((usize, usize), (usize, usize)); 3] =
    [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];

/// Cycle through `x0` starting along colour `a`, alternating with `b`; excludes `x0`.
fn trace_cycle(g: &ColouredGraph, x0: usize, a: usize, b: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = g.neighbour(x0, a);
    let mut colour = b;
    while cur != x0 {
        out.push(cur);
        cur = g.neighbour(cur, colour);
        colour = if colour == a { b } else { a };
    }
    out
}

fn generalized_dipole_at(
    g: &ColouredGraph,
    x0: usize,
    ((i, j), (h, k)): ((usize, usize), (usize, usize)),
) -> Option<GeneralizedDipole> {
    let first = trace_cycle(g, x0, i, j);
    let second = trace_cycle(g, x0, h, k);
    if first.iter().any(|v| second.contains(v)) {
        return None;
    }
    Some(GeneralizedDipole { pivot: x0, first_colours: (i, j), second_colours: (h, k), first, second })
}

/// All (m,n)-dipoles with `m <= max_m` and `n <= max_n`, by pivot then colour partition.
pub fn find_generalized_dipoles(g: &ColouredGraph, max_m: usize, max_n: usize) -> Vec<GeneralizedDipole> {
    let mut out = Vec::new();
    if max_m == 0 || max_n == 0 {
        return out;
    }
    for x0 in 0..g.order() {
        for part in PARTITIONS {
            if let Some(d) = generalized_dipole_at(g, x0, part) {
                if d.m() <= max_m && d.n() <= max_n {
                    out.push(d);
                }
            }
        }
    }
    out
}

/// Replaces the (m,n)-dipole by the product of its two paths (`m·n` new vertices numbered
/// row-major after the surviving vertices).
pub fn cancel_generalized_dipole(g: &ColouredGraph, d: &GeneralizedDipole) -> Result<ColouredGraph, MoveError> {
    let bad = || MoveError::NotAGeneralizedDipole(d.pivot);
    let part = (d.first_colours, d.second_colours);
    if !PARTITIONS.contains(&part) || generalized_dipole_at(g, d.pivot, part).as_ref() != Some(d) {
        return Err(bad());
    }
    let (i, j) = d.first_colours;
    let (h, k) = d.second_colours;
    let n_all = g.order();
    let m = d.m();
    let nn = d.n();
    // role: 0 = survivor, 1 = pivot, 2 = x_t (pos t-1), 3 = y_s (pos s-1)
    let mut role = vec![(0u8, 0usize); n_all];
    role[d.pivot] = (1, 0);
    for (t, &x) in d.first.iter().enumerate() {
        role[x] = (2, t);
    }
    for (s, &y) in d.second.iter().enumerate() {
        role[y] = (3, s);
    }
    let survivors: Vec<usize> = (0..n_all).filter(|&v| role[v].0 == 0).collect();
    let mut index = vec![u32::MAX; n_all];
    for (a, &v) in survivors.iter().enumerate() {
        index[v] = a as u32;
    }
    let base = survivors.len();
    let prod = |t: usize, s: usize| (base + t * nn + s) as u32;
    let total = base + m * nn;
    let mut rows = vec![[u32::MAX; NUM_COLOURS]; total];

    for &z in &survivors {
        for c in 0..NUM_COLOURS {
            let w = g.neighbour(z, c);
            rows[index[z] as usize][c] = match role[w] {
                (0, _) => index[w],
                (2, r) if c == h => prod(r, 0),
                (2, r) if c == k => prod(r, nn - 1),
                (3, s) if c == i => prod(0, s),
                (3, s) if c == j => prod(m - 1, s),
                _ => return Err(bad()),
            };
        }
    }
    for t in 0..m {
        for s in 0..nn {
            let me = prod(t, s) as usize;
            let x = d.first[t];
            let y = d.second[s];
            for c in 0..NUM_COLOURS {
                let on_first = c == i || c == j;
                let (own, other) = if on_first { (x, y) } else { (y, x) };
                let w = g.neighbour(own, c);
                // a step along the own path keeps the other coordinate; at a path end
                // the other coordinate's neighbour of this colour is used instead
                let target = match role[w] {
                    (2, t2) if on_first => prod(t2, s),
                    (3, s2) if !on_first => prod(t, s2),
                    _ => {
                        let w2 = g.neighbour(other, c);
                        match role[w2] {
                            (0, _) => index[w2],
                            (3, s2) if on_first => prod(t, s2),
                            (2, t2) if !on_first => prod(t2, s),
                            _ => return Err(bad()),
                        }
                    }
                };
                rows[me][c] = target;
            }
        }
    }
    Ok(ColouredGraph::from_rows(rows)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhoKind {
    Rho2,
    Rho3,
}

/// Two `colour`-edges sharing their `{colour,h}`-cycle for every `h` in `shared`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RhoPair {
    pub colour: usize,
    pub e: (usize, usize),
    pub f: (usize, usize),
    pub kind: RhoKind,
    pub shared: ColourSet,
}

/// ρ-pairs of a `K`-coloured graph considering only colours in `mask`: a pair of `i`-edges
/// sharing all `{i,h}`-cycles for `h` in `mask \ {i}` is reported with `shared` bits; callers
/// decide the kind.
pub(crate) fn rho_candidates<const K: usize>(
    rows: &[[u32; K]],
    mask: u8,
) -> Vec<(usize, (usize, usize), (usize, usize), u8)> {
    use crate::graph::component_labels;
    let n = rows.len();
    let mut labels: Vec<Option<Vec<u32>>> = vec![None; K * K];
    let mut out = Vec::new();
    for i in 0..K {
        if mask & (1 << i) == 0 {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..n)
            .filter_map(|v| {
                let w = rows[v][i] as usize;
                (v < w).then_some((v, w))
            })
            .collect();
        for h in 0..K {
            if h != i && mask & (1 << h) != 0 && labels[i * K + h].is_none() {
                labels[i * K + h] = Some(component_labels(rows, (1 << i) | (1 << h)).0);
            }
        }
        for a in 0..edges.len() {
            for b in a + 1..edges.len() {
                let mut shared = 0u8;
                for h in 0..K {
                    if let Some(l) = &labels[i * K + h] {
                        if l[edges[a].0] == l[edges[b].0] {
                            shared |= 1 << h;
                        }
                    }
                }
                if shared.count_ones() >= 2 {
                    out.push((i, edges[a], edges[b], shared));
                }
            }
        }
    }
    out
}

/// All ρ₂- and ρ₃-pairs ordered by colour, then edge pair.
pub fn find_rho_pairs(g: &ColouredGraph) -> Vec<RhoPair> {
    rho_candidates(g.rows(), 0b1111)
        .into_iter()
        .map(|(colour, e, f, shared)| {
            let shared = ColourSet::from_bits(shared);
            let kind = if shared.len() == 3 { RhoKind::Rho3 } else { RhoKind::Rho2 };
            RhoPair { colour, e, f, kind, shared }
        })
        .collect()
}

/// ρ-pairs seen by the colours in `colours` only (pairs sharing two cycles of those colours).
/// With three colours this is the "no ρ₂-pairs" notion used for 3-coloured graphs.
pub fn find_rho_pairs_within(g: &ColouredGraph, colours: ColourSet) -> Vec<RhoPair> {
    rho_candidates(g.rows(), colours.bits())
        .into_iter()
        .map(|(colour, e, f, shared)| {
            let shared = ColourSet::from_bits(shared);
            let kind = if shared.len() == 3 { RhoKind::Rho3 } else { RhoKind::Rho2 };
            RhoPair { colour, e, f, kind, shared }
        })
        .collect()
}

pub fn is_rigid(g: &ColouredGraph) -> bool {
    find_rho_pairs(g).is_empty()
}

/// Cross-swaps the two edges of a ρ-pair. Both edges are oriented along their shared
/// `{i,j}`-cycle (lowest shared `j`), walking from the smaller endpoint of `e`; then
/// `a→b`, `c→d` become `a–d`, `c–b`. Returns the new graph and whether the pair was a ρ₃-pair.
pub fn switch_rho_pair(g: &ColouredGraph, pair: &RhoPair) -> Result<(ColouredGraph, bool), MoveError> {
    let i = pair.colour;
    let found = find_rho_pairs(g);
    if !found.contains(pair) {
        return Err(MoveError::NotARhoPair);
    }
    let j = pair.shared.iter().next().ok_or(MoveError::NotARhoPair)?;
    let (a, b) = pair.e;
    let (c0, d0) = pair.f;
    let mut cur = b;
    let (c, d) = loop {
        let v = g.neighbour(cur, j);
        let w = g.neighbour(v, i);
        if (v, w) == (c0, d0) || (v, w) == (d0, c0) {
            break (v, w);
        }
        if v == a {
            return Err(MoveError::NotARhoPair);
        }
        cur = w;
    };
    let mut rows = g.rows().to_vec();
    rows[a][i] = d as u32;
    rows[d][i] = a as u32;
    rows[c][i] = b as u32;
    rows[b][i] = c as u32;
    let out = ColouredGraph::from_rows(rows).map_err(|e| match e {
        GraphError::Disconnected(_) => MoveError::Disconnects,
        other => MoveError::Graph(other),
    })?;
    Ok((out, pair.kind == RhoKind::Rho3))
}

/// One applied move, rendered as a trace token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    DeleteDipole { colours: ColourSet, x: usize, y: usize },
    AddDipole { colours: ColourSet, x: usize, y: usize },
    CancelGeneralized { pivot: usize, m: usize, n: usize },
    Switch { kind: RhoKind, colour: usize, e: (usize, usize), f: (usize, usize) },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &ColourSet| s.iter().map(|c| c.to_string()).collect::<String>();
        match self {
            Move::DeleteDipole { colours, x, y } => write!(f, "D-{{{}}}@({x},{y})", set(colours)),
            Move::AddDipole { colours, x, y } => write!(f, "D+{{{}}}@({x},{y})", set(colours)),
            Move::CancelGeneralized { pivot, m, n } => write!(f, "GD@({pivot},{m},{n})"),
            Move::Switch { kind, colour, e, f: ff } => {
                let k = if *kind == RhoKind::Rho3 { 3 } else { 2 };
                write!(f, "R{k}@{colour}:({},{}),({},{})", e.0, e.1, ff.0, ff.1)
            }
        }
    }
}

/// Applied moves and the number of ρ₃ switches among them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoveLog {
    pub moves: Vec<Move>,
    pub rho3_count: usize,
}

impl MoveLog {
    pub fn push(&mut self, m: Move) {
        if let Move::Switch { kind: RhoKind::Rho3, .. } = m {
            self.rho3_count += 1;
        }
        self.moves.push(m);
    }

    pub fn extend(&mut self, other: MoveLog) {
        for m in other.moves {
            self.push(m);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn trace(&self) -> String {
        self.moves.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// Cancels dipoles (type 1, then 2, then 3) and switches ρ-pairs (ρ₂ before ρ₃) until the
/// graph is rigid and dipole-free; for a gem the result is a rigid crystallization.
pub fn reduce_to_rigid(g: &ColouredGraph) -> (ColouredGraph, MoveLog) {
    let mut cur = g.clone();
    let mut log = MoveLog::default();
    'outer: loop {
        for k in 1..NUM_COLOURS {
            if let Some(d) = first_dipole_of_type(&cur, k) {
                if let Ok(next) = delete_dipole(&cur, &d) {
                    log.push(Move::DeleteDipole { colours: d.colours, x: d.x, y: d.y });
                    cur = next;
                    continue 'outer;
                }
            }
        }
        let pairs = find_rho_pairs(&cur);
        let pick = pairs
            .iter()
            .find(|p| p.kind == RhoKind::Rho2)
            .or_else(|| pairs.iter().find(|p| p.kind == RhoKind::Rho3));
        let Some(p) = pick else { break };
        match switch_rho_pair(&cur, p) {
            Ok((next, _)) => {
                log.push(Move::Switch { kind: p.kind, colour: p.colour, e: p.e, f: p.f });
                cur = next;
            }
            // Only reachable on non-gem input; stop rather than loop.
            Err(_) => break,
        }
    }
    (cur, log)
}
