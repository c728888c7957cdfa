//! Graph construction and distance-regularity data.
//!
//! Builders for the families under analysis (hypercubes, folded hypercubes,
//! incidence graphs of square 2-designs including the McFarland difference-set
//! construction) plus the per-pair sweep that certifies distance-regularity
//! and extracts the intersection array. The sweep is O(n^2 k); it is the trust
//! anchor for everything downstream, so it favours directness over speed.

use std::collections::VecDeque;

use crate::error::Error;

/// Simple undirected connected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
}

/// BFS shells of a base vertex.
#[derive(Debug, Clone)]
pub struct DistancePartition {
    pub base: usize,
    pub dist: Vec<usize>,
    pub shells: Vec<Vec<u32>>,
}

/// Intersection array of a distance-regular graph: `b_0..b_{D-1}`,
/// `c_1..c_D`, shell sizes `k_0..k_D`, and the in-shell counts `a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionArray {
    pub diameter: usize,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub a: Vec<u64>,
    pub k: Vec<u64>,
}

impl IntersectionArray {
    pub fn valency(&self) -> u64 {
        self.b[0]
    }

    /// `b_i`, with the conventional `b_D = 0`.
    pub fn b_at(&self, i: usize) -> u64 {
        if i < self.b.len() {
            self.b[i]
        } else {
            0
        }
    }

    /// `c_i`, with the conventional `c_0 = 0`.
    pub fn c_at(&self, i: usize) -> u64 {
        if i == 0 {
            0
        } else {
            self.c[i - 1]
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.a.iter().all(|&a| a == 0)
    }

    fn validate(&self, n: usize) -> Result<(), Error> {
        let d = self.diameter;
        if self.c[0] != 1 {
            return Err(Error::internal("c_1 != 1"));
        }
        for i in 0..d {
            if self.b[i] == 0 {
                return Err(Error::internal("vanishing b_i before the diameter"));
            }
        }
        for i in 1..=d {
            if self.c_at(i) == 0 {
                return Err(Error::internal("vanishing c_i"));
            }
        }
        if self.k.iter().sum::<u64>() != n as u64 {
            return Err(Error::internal("shell sizes do not sum to n"));
        }
        // standard two-way counting of edges between consecutive shells
        for i in 0..d {
            if self.k[i] * self.b[i] != self.k[i + 1] * self.c_at(i + 1) {
                return Err(Error::internal("k_i b_i != k_{i+1} c_{i+1}"));
            }
        }
        Ok(())
    }
}

/// Result of the distance-regularity sweep.
#[derive(Debug, Clone)]
pub struct DrgData {
    pub ia: IntersectionArray,
    pub bipartite: bool,
    /// All-pairs distances, row per vertex.
    pub dist: Vec<Vec<usize>>,
    /// Intersection numbers `p[h][i][j]`.
    pub p: Vec<Vec<Vec<u64>>>,
}

impl Graph {
    /// Builds a graph from an edge list, validating simplicity, symmetry and
    /// connectivity.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            let (u, v) = (u as usize, v as usize);
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("loop at vertex {u}")));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for list in &mut adj {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("duplicate edge"));
            }
        }
        let g = Graph { n, adj };
        if !g.is_connected() {
            return Err(Error::invalid("graph is not connected"));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    fn bfs_distances(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                let v = v as usize;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// BFS shells from `x`.
    pub fn distance_partition(&self, x: usize) -> Result<DistancePartition, Error> {
        if x >= self.n {
            return Err(Error::invalid(format!("vertex {x} out of range")));
        }
        let dist = self.bfs_distances(x);
        let diameter = dist.iter().copied().max().unwrap_or(0);
        let mut shells = vec![Vec::new(); diameter + 1];
        for (v, &d) in dist.iter().enumerate() {
            shells[d].push(v as u32);
        }
        Ok(DistancePartition { base: x, dist, shells })
    }

    pub fn all_pairs_distances(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|v| self.bfs_distances(v)).collect()
    }

    /// Certifies distance-regularity and returns the intersection array, the
    /// bipartite flag and the full intersection numbers.
    ///
    /// With `sweep` the counts `|G(y) ∩ G_{i-1}(x)|`, `|G(y) ∩ G_i(x)|`,
    /// `|G(y) ∩ G_{i+1}(x)|` are checked for every ordered pair; otherwise the
    /// counts from the first witness pair at each distance are trusted (the
    /// built-in families are covered by the standard theory). The full
    /// `p^h_{ij}` table is always extracted from one base vertex and
    /// cross-checked against a second.
    pub fn check_distance_regular(&self, sweep: bool) -> Result<DrgData, Error> {
        let dist = self.all_pairs_distances();
        let diameter = *dist
            .iter()
            .flat_map(|row| row.iter())
            .max()
            .expect("nonempty graph");

        let mut b = vec![u64::MAX; diameter + 1];
        let mut c = vec![u64::MAX; diameter + 1];
        let mut a = vec![u64::MAX; diameter + 1];
        let sources: Box<dyn Iterator<Item = usize>> = if sweep {
            Box::new(0..self.n)
        } else {
            Box::new(std::iter::once(0))
        };
        for x in sources {
            for y in 0..self.n {
                let i = dist[x][y];
                let (mut ci, mut ai, mut bi) = (0u64, 0u64, 0u64);
                for &z in &self.adj[y] {
                    let dz = dist[x][z as usize];
                    if dz + 1 == i {
                        ci += 1;
                    } else if dz == i {
                        ai += 1;
                    } else if dz == i + 1 {
                        bi += 1;
                    }
                }
                for (slot, val) in [(&mut c[i], ci), (&mut a[i], ai), (&mut b[i], bi)] {
                    if *slot == u64::MAX {
                        *slot = val;
                    } else if *slot != val {
                        return Err(Error::NotDistanceRegular {
                            witness: format!(
                                "pair (x={x}, y={y}) at distance {i} has conflicting counts"
                            ),
                        });
                    }
                }
            }
        }
        let k: Vec<u64> = (0..=diameter)
            .map(|i| dist[0].iter().filter(|&&d| d == i).count() as u64)
            .collect();
        let ia = IntersectionArray {
            diameter,
            b: b[..diameter].to_vec(),
            c: c[1..=diameter].to_vec(),
            a: a.clone(),
            k,
        };
        ia.validate(self.n)?;

        let p0 = self.intersection_numbers(0, &dist, diameter)?;
        let second = if self.n > 1 { 1 } else { 0 };
        let p1 = self.intersection_numbers(second, &dist, diameter)?;
        if p0 != p1 {
            return Err(Error::NotDistanceRegular {
                witness: format!("p^h_ij tables differ between base vertices 0 and {second}"),
            });
        }
        let bipartite = ia.is_bipartite();
        Ok(DrgData { ia, bipartite, dist, p: p0 })
    }

    /// `p^h_{ij}` computed from the first witness pair at each distance `h`
    /// seen from `x`.
    fn intersection_numbers(
        &self,
        x: usize,
        dist: &[Vec<usize>],
        diameter: usize,
    ) -> Result<Vec<Vec<Vec<u64>>>, Error> {
        let mut p = vec![vec![vec![0u64; diameter + 1]; diameter + 1]; diameter + 1];
        for h in 0..=diameter {
            let y = dist[x]
                .iter()
                .position(|&d| d == h)
                .ok_or_else(|| Error::internal("distance value with no witness"))?;
            for z in 0..self.n {
                let (i, j) = (dist[x][z], dist[y][z]);
                p[h][i][j] += 1;
            }
        }
        Ok(p)
    }
}

/// Hypercube H(D,2) on binary strings of length D.
pub fn build_hypercube(d: usize) -> Result<Graph, Error> {
    if d < 3 {
        return Err(Error::invalid("hypercube requires D >= 3"));
    }
    if d > 20 {
        return Err(Error::invalid("hypercube dimension too large"));
    }
    let n = 1usize << d;
    let mut edges = Vec::new();
    for v in 0..n as u32 {
        for bit in 0..d {
            let w = v ^ (1 << bit);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Antipodal quotient of H(2D,2): vertices are antipodal pairs, represented
/// by the lexicographically smaller member (top bit zero), with adjacency
/// inherited from the hypercube.
pub fn build_folded_cube(d: usize) -> Result<Graph, Error> {
    if d < 3 {
        return Err(Error::invalid("folded cube requires D >= 3"));
    }
    if d > 10 {
        return Err(Error::invalid("folded cube dimension too large"));
    }
    let bits = 2 * d;
    let mask: u32 = (1 << bits) - 1;
    let top: u32 = 1 << (bits - 1);
    let rep = |v: u32| if v & top == 0 { v } else { v ^ mask };
    // representatives are exactly 0..2^(2D-1)
    let n = 1usize << (bits - 1);
    let mut edges = Vec::new();
    for v in 0..n as u32 {
        for bit in 0..bits {
            let w = rep(v ^ (1 << bit));
            if v < w {
                edges.push((v, w));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Validated square 2-(v,k,lambda) design given by its 0/1 incidence matrix.
#[derive(Debug, Clone)]
pub struct SquareDesign {
    pub v: usize,
    pub k: u64,
    pub lambda: u64,
    pub matrix: Vec<Vec<u8>>,
}

/// Checks that `m` is the incidence matrix of a square 2-design with
/// `1 < k < v` (so the incidence graph is connected of diameter 3).
pub fn validate_design(m: &[Vec<u8>]) -> Result<SquareDesign, Error> {
    let v = m.len();
    if v < 3 {
        return Err(Error::invalid("design needs at least 3 points"));
    }
    if m.iter().any(|row| row.len() != v) {
        return Err(Error::invalid("incidence matrix must be square"));
    }
    if m.iter().flatten().any(|&e| e > 1) {
        return Err(Error::invalid("incidence matrix entries must be 0/1"));
    }
    let k = m[0].iter().map(|&e| e as u64).sum::<u64>();
    for row in m {
        if row.iter().map(|&e| e as u64).sum::<u64>() != k {
            return Err(Error::invalid("row sums are not constant"));
        }
    }
    for j in 0..v {
        let col: u64 = m.iter().map(|row| row[j] as u64).sum();
        if col != k {
            return Err(Error::invalid("column sums are not constant"));
        }
    }
    if k < 2 || k as usize >= v {
        return Err(Error::invalid("design requires 1 < k < v"));
    }
    let mut lambda = None;
    for r in 0..v {
        for s in r + 1..v {
            let common = (0..v).filter(|&j| m[r][j] == 1 && m[s][j] == 1).count() as u64;
            match lambda {
                None => lambda = Some(common),
                Some(l) if l != common => {
                    return Err(Error::invalid(format!(
                        "rows {r} and {s} share {common} columns, expected {l}"
                    )))
                }
                _ => {}
            }
        }
    }
    let lambda = lambda.ok_or_else(|| Error::invalid("design too small"))?;
    if lambda == 0 {
        return Err(Error::invalid("lambda = 0: not a 2-design"));
    }
    if lambda * (v as u64 - 1) != k * (k - 1) {
        return Err(Error::invalid("parameters violate lambda(v-1) = k(k-1)"));
    }
    Ok(SquareDesign {
        v,
        k,
        lambda,
        matrix: m.to_vec(),
    })
}

/// Incidence graph of a square 2-design: points 0..v, blocks v..2v, edges
/// where the incidence matrix has a 1. Diameter 3 is verified.
pub fn build_incidence_graph(m: &[Vec<u8>]) -> Result<Graph, Error> {
    let design = validate_design(m)?;
    let v = design.v;
    let mut edges = Vec::new();
    for p in 0..v {
        for b in 0..v {
            if design.matrix[p][b] == 1 {
                edges.push((p as u32, (v + b) as u32));
            }
        }
    }
    let g = Graph::from_edges(2 * v, &edges)?;
    let dp = g.distance_partition(0)?;
    if dp.shells.len() != 4 {
        return Err(Error::invalid(format!(
            "incidence graph has diameter {}, expected 3",
            dp.shells.len() - 1
        )));
    }
    Ok(g)
}

fn is_prime(t: u64) -> bool {
    if t < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= t {
        if t.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Incidence matrix of a square 2-(t^2(t+2), t(t+1), t) design of McFarland
/// type with d = 1, for prime t.
///
/// The difference set lives in G = Z_t x Z_t x Z_{t+2}: it is the union, over
/// the t+1 lines H_j through the origin of the plane over Z_t, of the coset
/// H_j x {g_j} with g_0, ..., g_t distinct in Z_{t+2}. Rows are group
/// elements, columns are translates of the difference set.
pub fn build_mcfarland_design(t: u64) -> Result<Vec<Vec<u8>>, Error> {
    if !is_prime(t) {
        return Err(Error::invalid(format!(
            "McFarland constructor requires prime t >= 2, got {t}"
        )));
    }
    let t = t as usize;
    let order = t * t * (t + 2);
    let index = |a: usize, b: usize, g: usize| (a * t + b) * (t + 2) + g;
    // lines through the origin of Z_t^2: t slopes plus the vertical line
    let mut difference_set = Vec::new();
    for (j, slope) in (0..t).map(Some).chain([None]).enumerate() {
        for s in 0..t {
            let (a, b) = match slope {
                Some(m) => (s, (m * s) % t),
                None => (0, s),
            };
            difference_set.push((a, b, j));
        }
    }
    let mut matrix = vec![vec![0u8; order]; order];
    for a in 0..t {
        for b in 0..t {
            for g in 0..t + 2 {
                let col = index(a, b, g);
                for &(da, db, dg) in &difference_set {
                    let row = index((a + da) % t, (b + db) % t, (g + dg) % (t + 2));
                    matrix[row][col] = 1;
                }
            }
        }
    }
    Ok(matrix)
}

/// Parses the edge-list text format: first line `n m`, then `m` lines `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::invalid("empty edge file"))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::invalid("bad edge file header"))?;
    let m: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::invalid("bad edge file header"))?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::invalid(format!("bad edge line {line:?}")))?;
        let v: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::invalid(format!("bad edge line {line:?}")))?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::invalid(format!(
            "edge count {} does not match header {m}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

/// Formats a graph in the edge-list text format.
pub fn format_edge_list(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("{} {}\n", g.vertex_count(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses the incidence-matrix text format: first line `v`, then `v` lines
/// of `v` space-separated 0/1 entries.
pub fn parse_incidence_matrix(text: &str) -> Result<Vec<Vec<u8>>, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let v: usize = lines
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::invalid("bad incidence file header"))?;
    let mut rows = Vec::with_capacity(v);
    for line in lines {
        let row: Result<Vec<u8>, _> = line.split_whitespace().map(|s| s.parse()).collect();
        let row = row.map_err(|_| Error::invalid(format!("bad incidence row {line:?}")))?;
        if row.len() != v {
            return Err(Error::invalid("incidence row has wrong length"));
        }
        rows.push(row);
    }
    if rows.len() != v {
        return Err(Error::invalid("incidence matrix has wrong number of rows"));
    }
    Ok(rows)
}
