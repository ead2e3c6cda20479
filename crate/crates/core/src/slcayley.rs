//! Three-matrix generating sets of SL(l+1, q), group enumeration, and the
//! low-boundary subset `S = S_0 ∪ S_0 B ∪ ... ∪ S_0 B^{l-1}`.
//!
//! Matrices are indexed from 0 internally; the public constructors
//! ([`transvection`], [`MatGF::entry`]) take 1-based positions to match the
//! usual `T_{i,j}` notation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, GfError};
use crate::report::ExactRatio;
use crate::spectral::RegularGraph;

/// Default cap on the number of group elements enumerated.
pub const DEFAULT_ORDER_CAP: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum SlError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("l must be at least 1")]
    ZeroRank,
    #[error("transvection needs distinct indices, got ({0}, {0})")]
    SameIndex(usize),
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrices have shapes {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrices live over different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("{dim}x{dim} matrices over GF({q}) do not fit a 128-bit key")]
    KeyTooWide { dim: usize, q: u32 },
    #[error("enumeration stopped at {found} elements (cap {cap})")]
    CapExceeded { found: usize, cap: usize },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Spectral(#[from] crate::spectral::SpectralError),
}

/// A square matrix over a finite field, entries stored as field codes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatGF {
    field: Field,
    dim: usize,
    entries: Vec<u32>,
}

impl fmt::Debug for MatGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatGF[{}]{:?}", self.field.spec(), self.rows())
    }
}

impl fmt::Display for MatGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl MatGF {
    pub fn identity(field: &Field, dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        MatGF {
            field: field.clone(),
            dim,
            entries,
        }
    }

    /// From rows of field codes.
    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self, SlError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(SlError::DimensionMismatch(dim, rows.iter().map(|r| r.len()).max().unwrap_or(0)));
        }
        let entries: Vec<u32> = rows.concat();
        if entries.iter().any(|&c| c >= field.q()) {
            return Err(GfError::Parse(format!("{rows:?}"), "entry code out of range".into()).into());
        }
        Ok(MatGF {
            field: field.clone(),
            dim,
            entries,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[(i - 1) * self.dim + (j - 1)]
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.dim + c]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == MatGF::identity(&self.field, self.dim)
    }

    /// Product; panics on shape mismatch (use [`MatGF::try_mul`] otherwise).
    pub fn mul(&self, other: &MatGF) -> MatGF {
        self.try_mul(other).expect("compatible matrices")
    }

    pub fn try_mul(&self, other: &MatGF) -> Result<MatGF, SlError> {
        if self.dim != other.dim {
            return Err(SlError::DimensionMismatch(self.dim, other.dim));
        }
        if self.field != other.field {
            return Err(SlError::FieldMismatch);
        }
        let n = self.dim;
        let f = &self.field;
        let mut out = vec![0u32; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.at(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    let b = other.at(k, c);
                    if b != 0 {
                        let slot = &mut out[r * n + c];
                        *slot = f.add(*slot, f.mul(a, b));
                    }
                }
            }
        }
        Ok(MatGF {
            field: f.clone(),
            dim: n,
            entries: out,
        })
    }

    /// Row reduction to echelon form; returns the determinant and, when
    /// requested, the inverse.
    fn eliminate(&self, want_inverse: bool) -> (u32, Option<MatGF>) {
        let n = self.dim;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut inv = MatGF::identity(f, n).entries;
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return (0, None);
            };
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                    inv.swap(piv * n + c, col * n + c);
                }
                det = f.neg(det);
            }
            let p = a[col * n + col];
            det = f.mul(det, p);
            let pinv = f.inv(p).expect("nonzero pivot");
            for c in 0..n {
                a[col * n + c] = f.mul(a[col * n + c], pinv);
                inv[col * n + c] = f.mul(inv[col * n + c], pinv);
            }
            for r in 0..n {
                if r == col || a[r * n + col] == 0 {
                    continue;
                }
                let factor = a[r * n + col];
                for c in 0..n {
                    a[r * n + c] = f.sub(a[r * n + c], f.mul(factor, a[col * n + c]));
                    if want_inverse {
                        inv[r * n + c] = f.sub(inv[r * n + c], f.mul(factor, inv[col * n + c]));
                    }
                }
            }
        }
        let inverse = want_inverse.then(|| MatGF {
            field: f.clone(),
            dim: n,
            entries: inv,
        });
        (det, inverse)
    }

    pub fn det(&self) -> u32 {
        self.eliminate(false).0
    }

    pub fn inverse(&self) -> Result<MatGF, SlError> {
        self.eliminate(true).1.ok_or(SlError::Singular)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<MatGF, SlError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = MatGF::identity(&self.field, self.dim);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Multiplicative order (assumes invertible).
    pub fn order(&self) -> u64 {
        let id = MatGF::identity(&self.field, self.dim);
        let mut cur = self.clone();
        let mut k = 1;
        while cur != id {
            cur = cur.mul(self);
            k += 1;
        }
        k
    }

    /// Row-major canonical serialization of the entries.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.entries.len() * self.field.digit_width() * self.field.k() as usize);
        for &c in &self.entries {
            self.field.write_canonical(c, &mut out);
        }
        out
    }

    /// Block-diagonal embedding `diag(self, 1, ..., 1)` into `dim` dimensions.
    pub fn embed(&self, dim: usize) -> MatGF {
        let mut out = MatGF::identity(&self.field, dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.entries[r * dim + c] = self.at(r, c);
            }
        }
        out
    }
}

/// Packs matrices into 128-bit keys whose numeric order is the
/// lexicographic order of the canonical serialization.
#[derive(Debug, Clone)]
pub struct KeyCodec {
    field: Field,
    dim: usize,
    bits: u32,
}

impl KeyCodec {
    pub fn new(field: &Field, dim: usize) -> Result<Self, SlError> {
        let bits = 32 - (field.q() - 1).leading_zeros();
        if (dim * dim) as u32 * bits > 128 {
            return Err(SlError::KeyTooWide { dim, q: field.q() });
        }
        Ok(KeyCodec {
            field: field.clone(),
            dim,
            bits,
        })
    }

    pub fn encode(&self, m: &MatGF) -> u128 {
        m.entries
            .iter()
            .fold(0u128, |acc, &c| (acc << self.bits) | self.field.lex_rank(c) as u128)
    }

    pub fn decode(&self, key: u128) -> MatGF {
        let n2 = self.dim * self.dim;
        let mask = (1u128 << self.bits) - 1;
        let entries = (0..n2)
            .map(|i| {
                let shift = (n2 - 1 - i) as u32 * self.bits;
                self.field.from_lex_rank(((key >> shift) & mask) as u32)
            })
            .collect();
        MatGF {
            field: self.field.clone(),
            dim: self.dim,
            entries,
        }
    }
}

fn check_rank(l: usize) -> Result<(), SlError> {
    if l == 0 {
        return Err(SlError::ZeroRank);
    }
    Ok(())
}

/// `T_{i,j}(delta) = I + delta e_{i,j}`, 1-based indices.
pub fn transvection(field: &Field, dim: usize, i: usize, j: usize, delta: u32) -> Result<MatGF, SlError> {
    for index in [i, j] {
        if index == 0 || index > dim {
            return Err(SlError::IndexOutOfRange { index, dim });
        }
    }
    if i == j {
        return Err(SlError::SameIndex(i));
    }
    let mut m = MatGF::identity(field, dim);
    m.entries[(i - 1) * dim + (j - 1)] = delta;
    Ok(m)
}

/// `A = T_{1,2}(1)` in dimension l+1.
pub fn gen_a(l: usize, field: &Field) -> Result<MatGF, SlError> {
    check_rank(l)?;
    transvection(field, l + 1, 1, 2, 1)
}

/// Ones on the subdiagonal and `(-1)^l` in the top-right corner.
pub fn gen_b(l: usize, field: &Field) -> Result<MatGF, SlError> {
    check_rank(l)?;
    let n = l + 1;
    let mut m = MatGF {
        field: field.clone(),
        dim: n,
        entries: vec![0; n * n],
    };
    m.entries[n - 1] = field.from_int(if l.is_multiple_of(2) { 1 } else { -1 });
    for i in 1..n {
        m.entries[i * n + i - 1] = 1;
    }
    Ok(m)
}

/// `diag(1/lambda, lambda, 1, ..., 1)` with `lambda` the field's primitive element.
pub fn gen_c(l: usize, field: &Field) -> Result<MatGF, SlError> {
    check_rank(l)?;
    let n = l + 1;
    let lambda = field.primitive_code();
    let mut m = MatGF::identity(field, n);
    m.entries[0] = field.inv(lambda).expect("primitive element is nonzero");
    m.entries[n + 1] = lambda;
    Ok(m)
}

/// |SL(n, q)| = prod_{i<n} (q^n - q^i) / (q - 1), or `None` on overflow.
pub fn sl_order(n: usize, q: u64) -> Option<u128> {
    if n == 0 {
        return Some(1);
    }
    let q = q as u128;
    let qn = q.checked_pow(n as u32)?;
    let mut prod: u128 = 1;
    for i in 0..n {
        prod = prod.checked_mul(qn - q.checked_pow(i as u32)?)?;
    }
    Some(prod / (q - 1))
}

/// The named generators and their deduplicated, identity-free union.
#[derive(Debug, Clone)]
pub struct GenSet {
    pub l: usize,
    pub named: Vec<(String, MatGF)>,
    pub connection: Vec<MatGF>,
    pub connection_names: Vec<String>,
}

impl GenSet {
    pub fn new(l: usize, field: &Field) -> Result<Self, SlError> {
        let base = [("A", gen_a(l, field)?), ("B", gen_b(l, field)?), ("C", gen_c(l, field)?)];
        let mut named = Vec::new();
        for (name, m) in base {
            let inv = m.inverse()?;
            named.push((name.to_string(), m));
            named.push((format!("{name}^-1"), inv));
        }
        let mut connection: Vec<MatGF> = Vec::new();
        let mut connection_names = Vec::new();
        for (name, m) in &named {
            if !m.is_identity() && !connection.contains(m) {
                connection.push(m.clone());
                connection_names.push(name.clone());
            }
        }
        Ok(GenSet {
            l,
            named,
            connection,
            connection_names,
        })
    }

    pub fn get(&self, name: &str) -> &MatGF {
        &self.named.iter().find(|(n, _)| n == name).expect("known generator").1
    }

    pub fn degree(&self) -> usize {
        self.connection.len()
    }

    pub fn field(&self) -> &Field {
        self.connection[0].field()
    }

    pub fn dim(&self) -> usize {
        self.l + 1
    }

    /// Whether the connection set is closed under inversion.
    pub fn is_symmetric(&self) -> bool {
        self.connection
            .iter()
            .all(|m| m.inverse().map(|i| self.connection.contains(&i)).unwrap_or(false))
    }
}

/// The result of a breadth-first closure from the identity.
#[derive(Debug, Clone)]
pub struct Enumeration {
    codec: KeyCodec,
    elements: Vec<u128>,
    index: HashMap<u128, u32>,
    pub complete: bool,
    pub cap: usize,
}

impl Enumeration {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn keys(&self) -> &[u128] {
        &self.elements
    }

    pub fn codec(&self) -> &KeyCodec {
        &self.codec
    }

    pub fn element(&self, i: usize) -> MatGF {
        self.codec.decode(self.elements[i])
    }

    pub fn index_of(&self, m: &MatGF) -> Option<u32> {
        self.index.get(&self.codec.encode(m)).copied()
    }
}

/// Level-synchronous BFS. Each level's products are computed in parallel,
/// deduplicated serially and sorted by key, so the vertex order depends only
/// on the generators.
pub fn bfs_enumerate(gens: &[MatGF], cap: usize) -> Result<Enumeration, SlError> {
    let first = gens.first().ok_or(SlError::ZeroRank)?;
    let codec = KeyCodec::new(first.field(), first.dim())?;
    let id = codec.encode(&MatGF::identity(first.field(), first.dim()));
    let mut elements = vec![id];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut frontier = vec![id];
    let mut complete = true;
    while !frontier.is_empty() {
        let products: Vec<u128> = frontier
            .par_iter()
            .flat_map_iter(|&k| {
                let m = codec.decode(k);
                gens.iter().map(move |g| m.mul(g)).collect::<Vec<_>>()
            })
            .map(|m| codec.encode(&m))
            .collect();
        let mut next: Vec<u128> = Vec::new();
        let mut fresh: HashSet<u128> = HashSet::new();
        for k in products {
            if !index.contains_key(&k) && fresh.insert(k) {
                next.push(k);
            }
        }
        next.sort_unstable();
        if elements.len() + next.len() > cap {
            let room = cap - elements.len();
            next.truncate(room);
            complete = false;
        }
        for &k in &next {
            index.insert(k, elements.len() as u32);
            elements.push(k);
        }
        if !complete {
            break;
        }
        frontier = next;
    }
    Ok(Enumeration {
        codec,
        elements,
        index,
        complete,
        cap,
    })
}

/// Cayley graph of SL(l+1, q) on the BFS vertex order.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    pub l: usize,
    pub q: u32,
    pub gens: GenSet,
    pub enumeration: Enumeration,
    /// `neighbors[u*d + t] = index(g_u * t)`.
    pub neighbors: Vec<u32>,
}

impl CayleyGraph {
    pub fn build(l: usize, field: &Field, cap: usize) -> Result<Self, SlError> {
        let gens = GenSet::new(l, field)?;
        let enumeration = bfs_enumerate(&gens.connection, cap)?;
        if !enumeration.complete {
            return Err(SlError::CapExceeded {
                found: enumeration.order(),
                cap,
            });
        }
        let d = gens.degree();
        let neighbors: Vec<u32> = (0..enumeration.order())
            .into_par_iter()
            .flat_map_iter(|u| {
                let m = enumeration.element(u);
                gens.connection
                    .iter()
                    .map(|t| enumeration.index_of(&m.mul(t)).expect("group is closed"))
                    .collect::<Vec<_>>()
            })
            .collect();
        debug_assert_eq!(neighbors.len(), d * enumeration.order());
        Ok(CayleyGraph {
            l,
            q: field.q(),
            gens,
            enumeration,
            neighbors,
        })
    }

    pub fn order(&self) -> usize {
        self.enumeration.order()
    }

    pub fn degree(&self) -> usize {
        self.gens.degree()
    }

    pub fn label(&self) -> String {
        format!("cayley sl l={} q={}", self.l, self.q)
    }

    /// Vertex permutation `u -> index(g * g_u)`; commutes with the adjacency.
    pub fn left_translation(&self, g: &MatGF) -> Vec<u32> {
        (0..self.order())
            .into_par_iter()
            .map(|u| {
                self.enumeration
                    .index_of(&g.mul(&self.enumeration.element(u)))
                    .expect("group is closed")
            })
            .collect()
    }

    /// First element in BFS order of maximal multiplicative order.
    pub fn element_of_max_order(&self) -> MatGF {
        let orders: Vec<u64> = (0..self.order())
            .into_par_iter()
            .map(|u| self.enumeration.element(u).order())
            .collect();
        let best = orders.iter().copied().max().unwrap_or(1);
        let u = orders.iter().position(|&o| o == best).unwrap_or(0);
        self.enumeration.element(u)
    }

    /// The adjacency as a [`RegularGraph`]; above the dense cap the left
    /// action of the unipotent radical `[[I, X], [0, I]]` is attached as an
    /// abelian symmetry for the split dense solver.
    pub fn regular_graph(&self) -> Result<RegularGraph, SlError> {
        let g = RegularGraph::from_neighbors(self.degree(), self.neighbors.clone())?;
        if self.order() > crate::spectral::DENSE_MAX {
            let perms = self
                .radical_generators()?
                .iter()
                .map(|h| self.left_translation(h))
                .collect::<Vec<_>>();
            return Ok(g.with_symmetry(&perms)?);
        }
        Ok(g)
    }

    /// `T_{i,j}(x^t)` for `i <= a < j`, `a = dim/2`, and each power basis
    /// element `x^t` of the field: free generators of an elementary abelian
    /// subgroup of order `q^(a(dim-a))`.
    pub fn radical_generators(&self) -> Result<Vec<MatGF>, SlError> {
        let dim = self.l + 1;
        let a = dim / 2;
        let field = self.gens.field().clone();
        let p = field.p();
        let mut out = Vec::new();
        for i in 1..=a {
            for j in a + 1..=dim {
                for t in 0..field.k() {
                    out.push(transvection(&field, dim, i, j, p.pow(t))?);
                }
            }
        }
        Ok(out)
    }

    /// Undirected edges `u < v`, ascending.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let d = self.degree();
        let mut out = Vec::with_capacity(self.order() * d / 2);
        for u in 0..self.order() {
            let mut nb: Vec<u32> = self.neighbors[u * d..(u + 1) * d]
                .iter()
                .copied()
                .filter(|&v| v as usize > u)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            out.extend(nb.into_iter().map(|v| (u as u32, v)));
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# cayley sl l={} q={} n={} d={}",
            self.l,
            self.q,
            self.order(),
            self.degree()
        )?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Writes the edge list of the SL(l+1, q) Cayley graph.
pub fn export_graph<W: Write>(l: usize, q: u64, cap: usize, w: W) -> Result<(), SlError> {
    let field = Field::from_order(q)?;
    let g = CayleyGraph::build(l, &field, cap)?;
    Ok(g.write_edge_list(w)?)
}

/// Structural membership in `S_i = S_0 B^i`.
#[derive(Debug, Clone)]
pub struct SubsetS {
    pub l: usize,
    b_inv_pows: Vec<MatGF>,
}

impl SubsetS {
    pub fn new(l: usize, field: &Field) -> Result<Self, SlError> {
        let binv = gen_b(l, field)?.inverse()?;
        let mut pows = vec![MatGF::identity(field, l + 1)];
        for i in 1..l {
            pows.push(pows[i - 1].mul(&binv));
        }
        Ok(SubsetS { l, b_inv_pows: pows })
    }

    /// Last row and last column equal to the last unit vector.
    pub fn in_s0(m: &MatGF) -> bool {
        let n = m.dim();
        (0..n).all(|c| m.at(n - 1, c) == u32::from(c == n - 1))
            && (0..n).all(|r| m.at(r, n - 1) == u32::from(r == n - 1))
    }

    /// The `i` with `m ∈ S_i`, if any.
    pub fn coset_of(&self, m: &MatGF) -> Option<usize> {
        self.b_inv_pows.iter().position(|p| SubsetS::in_s0(&m.mul(p)))
    }

    pub fn contains(&self, m: &MatGF) -> bool {
        self.coset_of(m).is_some()
    }

    /// Membership in `S_0 g`.
    pub fn in_coset(m: &MatGF, g_inv: &MatGF) -> bool {
        SubsetS::in_s0(&m.mul(g_inv))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetCount {
    pub coset: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub l: usize,
    pub q: u32,
    /// |SL(l+1, q)| from the order formula.
    pub group_order: Option<u128>,
    pub degree: usize,
    pub s0: u64,
    pub s: u64,
    pub boundary: u64,
    pub ratio: ExactRatio,
    pub bound: ExactRatio,
    pub within_bound: bool,
    pub cosets: Vec<CosetCount>,
    pub contained_in_cosets: bool,
    pub cosets_disjoint: bool,
    pub size_identity: bool,
    pub boundary_disjoint_from_s: bool,
    pub half_check: bool,
    pub sweep_boundary: u64,
    pub sweep_agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl BoundaryReport {
    pub fn pass(&self) -> bool {
        self.within_bound
            && self.contained_in_cosets
            && self.cosets_disjoint
            && self.size_identity
            && self.boundary_disjoint_from_s
            && self.half_check
            && self.sweep_agrees
    }
}

/// `l |SL(l, q)| < |SL(l+1, q)| / 2`.
pub fn half_check(l: usize, q: u64) -> Option<bool> {
    let small = sl_order(l, q)?;
    let big = sl_order(l + 1, q)?;
    Some(2 * (l as u128) * small < big)
}

/// Elements of SL(l, q) embedded as `diag(M, 1)`.
pub fn enumerate_s0(l: usize, field: &Field, cap: usize) -> Result<Vec<MatGF>, SlError> {
    check_rank(l)?;
    if l == 1 {
        return Ok(vec![MatGF::identity(field, 2)]);
    }
    let gens = GenSet::new(l - 1, field)?;
    let e = bfs_enumerate(&gens.connection, cap)?;
    if !e.complete {
        return Err(SlError::CapExceeded { found: e.order(), cap });
    }
    Ok((0..e.order()).map(|i| e.element(i).embed(l + 1)).collect())
}

pub fn boundary_exact(l: usize, q: u64) -> Result<BoundaryReport, SlError> {
    boundary_with_cap(l, q, DEFAULT_ORDER_CAP)
}

pub fn boundary_with_cap(l: usize, q: u64, cap: usize) -> Result<BoundaryReport, SlError> {
    let start = Instant::now();
    let field = Field::from_order(q)?;
    let gens = GenSet::new(l, &field)?;
    let subset = SubsetS::new(l, &field)?;
    let codec = KeyCodec::new(&field, l + 1)?;
    let s0 = enumerate_s0(l, &field, cap)?;
    let b = gens.get("B").clone();

    // S_i = S_0 B^i, checked to land in coset i exactly
    let mut bpow = MatGF::identity(&field, l + 1);
    let mut s_keys: HashSet<u128> = HashSet::new();
    let mut cosets_disjoint = true;
    let mut s_elems: Vec<MatGF> = Vec::with_capacity(l * s0.len());
    for i in 0..l {
        let layer: Vec<(MatGF, bool)> = s0
            .par_iter()
            .map(|m| {
                let x = m.mul(&bpow);
                let ok = subset.coset_of(&x) == Some(i);
                (x, ok)
            })
            .collect();
        for (x, ok) in layer {
            cosets_disjoint &= ok;
            cosets_disjoint &= s_keys.insert(codec.encode(&x));
            s_elems.push(x);
        }
        bpow = bpow.mul(&b);
    }
    let s_len = s_keys.len() as u64;
    let size_identity = s_len == (l * s0.len()) as u64;

    // the six candidate cosets S_0 g
    let b_l = bpow.clone();
    let b_lm1 = b.pow(l as i64 - 1)?;
    let named: Vec<(String, MatGF)> = vec![
        (format!("S_{l}"), b_l),
        ("S_0 B^-1".to_string(), b.inverse()?),
        (format!("S_{} A", l - 1), b_lm1.mul(gens.get("A"))),
        (format!("S_{} A^-1", l - 1), b_lm1.mul(gens.get("A^-1"))),
        (format!("S_{} C", l - 1), b_lm1.mul(gens.get("C"))),
        (format!("S_{} C^-1", l - 1), b_lm1.mul(gens.get("C^-1"))),
    ];
    let conn = &gens.connection;
    let in_s = |x: &MatGF| subset.contains(x);
    let mut restricted: HashSet<u128> = HashSet::new();
    for (_, g) in &named {
        let hits: Vec<u128> = s0
            .par_iter()
            .filter_map(|m| {
                let x = m.mul(g);
                (!in_s(&x) && conn.iter().any(|t| in_s(&x.mul(t)))).then(|| codec.encode(&x))
            })
            .collect();
        restricted.extend(hits);
    }

    // full sweep: {s t} \ S
    let sweep_hits: Vec<u128> = s_elems
        .par_iter()
        .flat_map_iter(|s| {
            conn.iter()
                .map(|t| s.mul(t))
                .filter(|x| !in_s(x))
                .map(|x| codec.encode(&x))
                .collect::<Vec<_>>()
        })
        .collect();
    let sweep: HashSet<u128> = sweep_hits.into_iter().collect();
    let sweep_agrees = sweep == restricted;

    let inverses: Vec<MatGF> = named
        .iter()
        .map(|(_, g)| g.inverse())
        .collect::<Result<_, _>>()?;
    let mut sweep_sorted: Vec<u128> = sweep.iter().copied().collect();
    sweep_sorted.sort_unstable();
    let membership: Vec<Vec<bool>> = sweep_sorted
        .par_iter()
        .map(|&k| {
            let x = codec.decode(k);
            inverses.iter().map(|gi| SubsetS::in_coset(&x, gi)).collect()
        })
        .collect();
    let contained_in_cosets = membership.iter().all(|m| m.iter().any(|&b| b));
    let cosets = named
        .iter()
        .enumerate()
        .map(|(j, (name, _))| CosetCount {
            coset: name.clone(),
            count: membership.iter().filter(|m| m[j]).count() as u64,
        })
        .collect();
    let boundary_disjoint_from_s = sweep.iter().all(|k| !s_keys.contains(k));

    let boundary = restricted.len() as u64;
    let ratio = ExactRatio::new(boundary, s_len);
    let bound = ExactRatio::new(6, l as u64);
    Ok(BoundaryReport {
        l,
        q: field.q(),
        group_order: sl_order(l + 1, q),
        degree: gens.degree(),
        s0: s0.len() as u64,
        s: s_len,
        boundary,
        ratio,
        bound,
        within_bound: ratio <= bound,
        cosets,
        contained_in_cosets,
        cosets_disjoint,
        size_identity,
        boundary_disjoint_from_s,
        half_check: half_check(l, q).unwrap_or(false),
        sweep_boundary: sweep.len() as u64,
        sweep_agrees,
        runtime_ms: Some(start.elapsed().as_millis() as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Field {
        Field::from_order(q).unwrap()
    }

    #[test]
    fn generator_examples() {
        let f2 = gf(2);
        let a = gen_a(2, &f2).unwrap();
        assert_eq!(a.rows(), vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let b = gen_b(2, &gf(5)).unwrap();
        assert_eq!(b.rows(), vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        let f7 = gf(7);
        assert_eq!(f7.primitive_code(), 3);
        let c = gen_c(2, &f7).unwrap();
        assert_eq!(c.rows(), vec![vec![5, 0, 0], vec![0, 3, 0], vec![0, 0, 1]]);
        assert!(gen_c(3, &f2).unwrap().is_identity());
        assert!(gen_a(0, &f2).is_err());
    }

    #[test]
    fn generators_have_determinant_one() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = gf(q);
            for l in 1..=5 {
                for m in [gen_a(l, &f), gen_b(l, &f), gen_c(l, &f)] {
                    assert_eq!(m.unwrap().det(), 1, "q={q} l={l}");
                }
            }
        }
    }

    #[test]
    fn b_power_is_scalar() {
        for q in [2u64, 3, 4, 5, 7] {
            let f = gf(q);
            for l in 1..=5 {
                let b = gen_b(l, &f).unwrap();
                let sign = f.from_int(if l.is_multiple_of(2) { 1 } else { -1 });
                let mut want = MatGF::identity(&f, l + 1);
                for i in 0..=l {
                    want.entries[i * (l + 1) + i] = sign;
                }
                assert_eq!(b.pow(l as i64 + 1).unwrap(), want);
            }
        }
    }

    #[test]
    fn transvection_basics() {
        let f = gf(3);
        assert!(transvection(&f, 3, 1, 2, 0).unwrap().is_identity());
        assert!(matches!(transvection(&f, 3, 2, 2, 1), Err(SlError::SameIndex(2))));
        assert!(transvection(&f, 3, 4, 1, 1).is_err());
    }

    #[test]
    fn inverse_and_det_against_cofactor_oracle() {
        let f = gf(5);
        let m = MatGF::from_rows(&f, &[vec![2, 1, 0], vec![0, 3, 4], vec![1, 0, 2]]).unwrap();
        // det by cofactor expansion mod 5
        let r = m.rows().iter().map(|r| r.iter().map(|&x| x as i64).collect::<Vec<_>>()).collect::<Vec<_>>();
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        assert_eq!(m.det(), det.rem_euclid(5) as u32);
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        let sing = MatGF::from_rows(&f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(sing.det(), 0);
        assert!(matches!(sing.inverse(), Err(SlError::Singular)));
    }

    #[test]
    fn order_formula_values() {
        assert_eq!(sl_order(2, 2), Some(6));
        assert_eq!(sl_order(2, 3), Some(24));
        assert_eq!(sl_order(3, 2), Some(168));
        assert_eq!(sl_order(3, 3), Some(5616));
        assert_eq!(sl_order(4, 2), Some(20160));
        assert_eq!(sl_order(5, 2), Some(9_999_360));
    }

    #[test]
    fn key_codec_round_trips_and_orders() {
        let f = gf(9);
        let codec = KeyCodec::new(&f, 3).unwrap();
        let g = GenSet::new(2, &f).unwrap();
        let mut mats: Vec<MatGF> = g.named.iter().map(|(_, m)| m.clone()).collect();
        mats.push(g.get("A").mul(g.get("B")).mul(g.get("C")));
        for m in &mats {
            assert_eq!(codec.decode(codec.encode(m)), *m);
        }
        for a in &mats {
            for b in &mats {
                assert_eq!(
                    codec.encode(a).cmp(&codec.encode(b)),
                    a.canonical_bytes().cmp(&b.canonical_bytes())
                );
            }
        }
        assert!(KeyCodec::new(&gf(4), 9).is_err());
    }

    #[test]
    fn q2_degenerates() {
        let g = GenSet::new(2, &gf(2)).unwrap();
        assert_eq!(g.degree(), 3);
        assert_eq!(g.connection_names, vec!["A", "B", "B^-1"]);
        assert!(g.is_symmetric());
        // lambda = -1 in GF(3), so C is an involution
        let g = GenSet::new(2, &gf(3)).unwrap();
        assert_eq!(g.degree(), 5);
        assert!(g.is_symmetric());
        // characteristic 2: A = A^-1
        assert_eq!(GenSet::new(3, &gf(4)).unwrap().degree(), 5);
        for q in [5u64, 7, 9] {
            let g = GenSet::new(3, &gf(q)).unwrap();
            assert_eq!(g.degree(), 6);
            assert!(g.is_symmetric());
        }
    }

    #[test]
    fn bfs_small_orders() {
        for (l, q) in [(1usize, 2u64), (1, 3), (2, 2)] {
            let g = GenSet::new(l, &gf(q)).unwrap();
            let e = bfs_enumerate(&g.connection, 1_000_000).unwrap();
            assert!(e.complete);
            assert_eq!(e.order() as u128, sl_order(l + 1, q).unwrap());
        }
        let g = GenSet::new(2, &gf(2)).unwrap();
        let e = bfs_enumerate(&g.connection, 100).unwrap();
        assert!(!e.complete);
        assert_eq!(e.order(), 100);
    }

    #[test]
    fn s0_membership_matches_block_form() {
        let f = gf(3);
        let s = SubsetS::new(3, &f).unwrap();
        let b = gen_b(3, &f).unwrap();
        let s0 = enumerate_s0(3, &f, 100_000).unwrap();
        assert_eq!(s0.len(), 5616);
        for m in s0.iter().take(50) {
            assert!(SubsetS::in_s0(m));
            assert_eq!(s.coset_of(&m.mul(&b)), Some(1));
            assert_eq!(s.coset_of(&m.mul(&b.pow(2).unwrap())), Some(2));
            assert_eq!(s.coset_of(&m.mul(&b.pow(3).unwrap())), None);
        }
    }

    #[test]
    fn boundary_small_cases() {
        let r = boundary_exact(2, 2).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!((r.s0, r.s), (6, 12));
        let c_cosets: u64 = r.cosets.iter().filter(|c| c.coset.contains('C')).map(|c| c.count).sum();
        assert_eq!(c_cosets, 0);
        let r = boundary_exact(1, 3).unwrap();
        assert_eq!(r.s, 1);
        assert!(r.boundary_disjoint_from_s && r.sweep_agrees);
    }

    #[test]
    fn half_check_examples() {
        assert_eq!(half_check(3, 2), Some(true));
        assert_eq!(half_check(2, 2), Some(true));
        assert_eq!(half_check(4, 2), Some(true));
    }

    #[test]
    fn edge_list_shape() {
        let g = CayleyGraph::build(2, &gf(2), 1000).unwrap();
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# cayley sl l=2 q=2 n=168 d=3"));
        let edges: Vec<(u32, u32)> = lines
            .map(|l| {
                let mut it = l.split(' ').map(|x| x.parse::<u32>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        assert_eq!(edges.len(), 168 * 3 / 2);
        assert!(edges.iter().all(|(u, v)| u < v));
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
    }
}
