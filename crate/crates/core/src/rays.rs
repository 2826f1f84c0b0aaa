//! Joint eigenbases of the pentagram contexts, and their reconciliation with
//! the published table of forty rays.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::pauli::PauliObservable;
use crate::pentagram::Pentagram;

pub const DIM: usize = 8;

/// Primitive integer direction with its first nonzero component positive.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ray([i64; DIM]);

impl Ray {
    pub fn components(&self) -> &[i64; DIM] {
        &self.0
    }

    pub fn dot(&self, other: &Ray) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.dot(self)
    }

    pub fn is_orthogonal(&self, other: &Ray) -> bool {
        self.dot(other) == 0
    }

    pub fn projector(&self) -> ExactMatrix {
        ExactMatrix::outer_projector(&self.0)
    }
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ray{:?}", self.0)
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0 {
            match c {
                -1 => write!(f, "1̄")?,
                c => write!(f, "{c}")?,
            }
        }
        Ok(())
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Divides out the content and fixes the sign of the leading component.
pub fn canonicalize(v: &[i64; DIM]) -> Result<Ray> {
    let lead = *v.iter().find(|&&c| c != 0).ok_or(Error::ZeroVector)?;
    let g = v.iter().fold(0, |g, &c| gcd(g, c));
    let s = if lead < 0 { -g } else { g };
    Ok(Ray(v.map(|c| c / s)))
}

/// A ray together with its eigenvalues on each observable of the context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenRay {
    pub signs: Vec<i8>,
    pub ray: Ray,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Octad {
    /// Pentagram context the basis diagonalizes (0-based).
    pub context: usize,
    pub rays: Vec<EigenRay>,
}

impl Octad {
    pub fn ray_set(&self) -> BTreeSet<Ray> {
        self.rays.iter().map(|e| e.ray).collect()
    }

    pub fn projector_sum(&self) -> ExactMatrix {
        ExactMatrix::sum(DIM, self.rays.iter().map(|e| e.ray.projector()).collect::<Vec<_>>().iter())
    }

    pub fn is_orthogonal_basis(&self) -> bool {
        self.rays.len() == DIM
            && self.rays.iter().tuple_combinations().all(|(a, b)| a.ray.is_orthogonal(&b.ray))
            && self.projector_sum().is_identity()
    }
}

/// Joint eigenbasis of commuting real observables on three qubits.
///
/// For each sign pattern `s`, `∏ (I + s_k O_k) / 2` projects onto the joint
/// eigenspace; sign patterns violating the context's product rule give the
/// zero matrix and are skipped. Every surviving projector must have rank 1;
/// its first nonzero column spans the range.
pub fn common_eigenbasis(observables: &[PauliObservable]) -> Result<Vec<EigenRay>> {
    for (a, b) in observables.iter().tuple_combinations() {
        if !a.commutes(b)? {
            return Err(Error::InvalidSystem(format!("{a} and {b} do not commute")));
        }
    }
    let matrices = observables.iter().map(|o| o.to_matrix()).collect::<Result<Vec<_>>>()?;
    let dim = matrices.first().map_or(0, |m| m.dim());
    let identity = ExactMatrix::identity(dim);

    let mut found = Vec::new();
    for pattern in 0u32..1 << observables.len() {
        let signs: Vec<i8> = (0..observables.len()).map(|k| if pattern >> k & 1 == 1 { -1 } else { 1 }).collect();
        let product = matrices
            .iter()
            .zip(&signs)
            .fold(identity.clone(), |acc, (m, &s)| &acc * &(&identity + &m.scale(s.into())));
        if product.is_zero() {
            continue;
        }
        let projector = ExactMatrix::new(dim, product.numerator().to_vec(), product.denominator() << observables.len());
        let rank = projector.projector_rank().unwrap_or(-1);
        if rank != 1 {
            return Err(Error::DegenerateEigenspace { signs, rank });
        }
        let col = (0..dim).find(|&c| projector.column(c).iter().any(|&x| x != 0)).expect("nonzero projector");
        let column: [i64; DIM] = projector
            .column(col)
            .try_into()
            .map_err(|_| Error::IncompleteEigenbasis { found: 0, dimension: dim })?;
        found.push(EigenRay { signs, ray: canonicalize(&column)? });
    }
    if found.len() != dim || dim != DIM {
        return Err(Error::IncompleteEigenbasis { found: found.len(), dimension: dim });
    }
    Ok(found)
}

/// One octad per pentagram context, in context order.
pub fn derive_octads(p: &Pentagram) -> Result<Vec<Octad>> {
    (0..p.contexts.len())
        .map(|c| Ok(Octad { context: c, rays: common_eigenbasis(&p.context_observables(c))? }))
        .collect()
}

/// Rows of the published ray table, transcribed symbol for symbol (`1̄` is
/// −1), including the rows that do not parse as valid rays.
pub const TABLE_ONE: [&str; 40] = [
    "10000000",
    "01000000",
    "00100000",
    "00010000",
    "00001000",
    "00000100",
    "00000010",
    "00000001",
    "11110000",
    "11 1̄1̄ 0000",
    "1 1̄ 1 1̄ 0000",
    "1 1̄ 1 1̄ 10000",
    "00001111",
    "000011 1̄1̄",
    "000011 1̄1̄",
    "00001 1̄1̄1̄",
    "11001100",
    "1100 1̄1̄00",
    "1 1̄ 001 1̄ 00",
    "1 1̄ 00 1̄ 100",
    "00110011",
    "001100 1̄1̄",
    "001 1̄ 001 1̄",
    "001 1̄ 00 1̄1̄",
    "10101010",
    "1010 1̄0 1̄0",
    "10 1̄ 010 1̄ 0",
    "10 1̄ 0 1̄ 010",
    "01010101",
    "01010 1̄ 0 1̄",
    "010 1̄ 010 1̄",
    "010 1̄ 0 1̄ 01",
    "100101 1̄ 0",
    "100 1̄ 0110",
    "10010 1̄ 10",
    "100 1̄ 0 1̄1̄ 0",
    "0110 1̄ 001",
    "01 1̄ 01001",
    "0 1̄ 101001",
    "0 1̄ 10 1̄ 001",
];

/// Rows are printed in blocks of eight, one block per basis.
pub const BLOCK: usize = 8;

/// Reads a printed row into its symbols; `1̄` counts as one symbol.
pub fn parse_printed_row(row: &str) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    for c in row.chars() {
        match c {
            '0' => out.push(0),
            '1' => out.push(1),
            '\u{304}' => {
                if let Some(last) = out.last_mut() {
                    *last = -*last;
                }
            }
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "defect", rename_all = "snake_case")]
pub enum RowDefect {
    /// Row does not have eight symbols.
    Malformed { symbols: usize },
    /// Row is printed identically to other rows.
    Duplicate { rows: Vec<usize> },
    /// Row parses but is not a joint eigenvector of any context.
    NotDerived,
    /// Row is a derived ray from a different basis than the rest of its block.
    WrongBlock { octad: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Matched,
    Flagged(RowDefect),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub id: usize,
    pub printed: String,
    /// Canonical form of the printed row, when it has eight symbols.
    pub parsed: Option<Ray>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reconciliation {
    pub rows: Vec<RowReport>,
    /// Derived octad (pentagram context, 0-based) behind each printed block.
    pub block_contexts: Vec<usize>,
}

impl Reconciliation {
    pub fn matched(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.status == RowStatus::Matched).map(|r| r.id).collect()
    }

    pub fn flagged(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.status != RowStatus::Matched).map(|r| r.id).collect()
    }
}

/// Matches printed rows against derived rays up to sign and scale.
///
/// A row counts as matched only if it parses, is printed once, and equals a
/// derived ray of the octad that the majority of its block belongs to.
pub fn reconcile_with_table(octads: &[Octad], table: &[&str]) -> Result<Reconciliation> {
    let owner: BTreeMap<Ray, usize> =
        octads.iter().flat_map(|o| o.rays.iter().map(move |e| (e.ray, o.context))).collect();

    let parsed: Vec<Option<Ray>> = table
        .iter()
        .map(|row| {
            let symbols = parse_printed_row(row);
            let arr: [i64; DIM] = symbols.try_into().ok()?;
            canonicalize(&arr).ok()
        })
        .collect();

    let mut by_value: BTreeMap<Ray, Vec<usize>> = BTreeMap::new();
    for (i, p) in parsed.iter().enumerate() {
        if let Some(r) = p {
            by_value.entry(*r).or_default().push(i + 1);
        }
    }

    let mut block_contexts = Vec::new();
    for block in parsed.chunks(BLOCK) {
        let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
        for r in block.iter().flatten() {
            if let Some(&ctx) = owner.get(r) {
                *votes.entry(ctx).or_default() += 1;
            }
        }
        let ctx = votes
            .iter()
            .max_by_key(|(ctx, n)| (**n, std::cmp::Reverse(**ctx)))
            .map(|(ctx, _)| *ctx)
            .ok_or_else(|| Error::InvalidSystem("a table block matches no derived octad".into()))?;
        block_contexts.push(ctx);
    }

    let rows = table
        .iter()
        .enumerate()
        .map(|(i, printed)| {
            let id = i + 1;
            let status = match parsed[i] {
                None => RowStatus::Flagged(RowDefect::Malformed { symbols: parse_printed_row(printed).len() }),
                Some(r) => {
                    let twins: Vec<usize> = by_value[&r].iter().copied().filter(|&j| j != id).collect();
                    if !twins.is_empty() {
                        RowStatus::Flagged(RowDefect::Duplicate { rows: twins })
                    } else {
                        match owner.get(&r) {
                            None => RowStatus::Flagged(RowDefect::NotDerived),
                            Some(&ctx) if ctx != block_contexts[i / BLOCK] => {
                                RowStatus::Flagged(RowDefect::WrongBlock { octad: ctx })
                            }
                            Some(_) => RowStatus::Matched,
                        }
                    }
                }
            };
            RowReport { id, printed: printed.to_string(), parsed: parsed[i], status }
        })
        .collect();

    Ok(Reconciliation { rows, block_contexts })
}

/// The forty rays under their table ids (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayStore {
    rays: Vec<Ray>,
    block_contexts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayRecord {
    pub id: usize,
    pub components: [i64; DIM],
    /// Printed block (1..5).
    pub octad: usize,
    /// Pentagram context the block diagonalizes (1..5).
    pub context: usize,
}

impl RayStore {
    pub fn new(rays: Vec<Ray>, block_contexts: Vec<usize>) -> Self {
        assert_eq!(rays.len(), block_contexts.len() * BLOCK);
        RayStore { rays, block_contexts }
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn get(&self, id: usize) -> Result<&Ray> {
        id.checked_sub(1).and_then(|i| self.rays.get(i)).ok_or(Error::UnknownRay(id))
    }

    pub fn ids(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.rays.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Ray)> {
        self.rays.iter().enumerate().map(|(i, r)| (i + 1, r))
    }

    /// Printed block (0-based) holding ray `id`.
    pub fn block_of(&self, id: usize) -> usize {
        (id - 1) / BLOCK
    }

    pub fn context_of(&self, id: usize) -> usize {
        self.block_contexts[self.block_of(id)]
    }

    pub fn block_contexts(&self) -> &[usize] {
        &self.block_contexts
    }

    pub fn records(&self) -> Vec<RayRecord> {
        self.iter()
            .map(|(id, r)| RayRecord {
                id,
                components: *r.components(),
                octad: self.block_of(id) + 1,
                context: self.context_of(id) + 1,
            })
            .collect()
    }
}

/// A flagged row and the derived ray that takes its id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Override {
    pub id: usize,
    pub printed: String,
    pub derived: Ray,
    /// The printed row, read literally, already equals the derived ray.
    pub printed_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdAssignment {
    pub overrides: Vec<Override>,
    /// Number of candidate id assignments examined.
    pub candidates: usize,
}

fn relations_orthogonal(rays: &[Ray], relations: &[Vec<usize>]) -> bool {
    let get = |id: usize| id.checked_sub(1).and_then(|i| rays.get(i));
    relations.iter().all(|rel| {
        rel.iter().tuple_combinations().all(|(&a, &b)| match (get(a), get(b)) {
            (Some(ra), Some(rb)) => ra.is_orthogonal(rb),
            _ => false,
        })
    })
}

/// Gives every flagged row a derived ray from its block's octad.
///
/// Within a block, the derived rays no matched row claimed are distributed
/// over the flagged rows. When more than one distribution is possible, the
/// one under which every set in `relations` is mutually orthogonal is taken;
/// exactly one must survive.
pub fn assign_ray_ids(
    octads: &[Octad],
    recon: &Reconciliation,
    relations: &[Vec<usize>],
) -> Result<(RayStore, IdAssignment)> {
    let n_rows = recon.rows.len();
    let mut rays: Vec<Option<Ray>> = vec![None; n_rows];
    let mut open_blocks = Vec::new();

    for (b, &ctx) in recon.block_contexts.iter().enumerate() {
        let octad = octads
            .iter()
            .find(|o| o.context == ctx)
            .ok_or_else(|| Error::InvalidSystem(format!("no octad for context {}", ctx + 1)))?;
        let rows = &recon.rows[b * BLOCK..((b + 1) * BLOCK).min(n_rows)];
        let mut free = octad.ray_set();
        let mut flagged = Vec::new();
        for row in rows {
            match (&row.status, row.parsed) {
                (RowStatus::Matched, Some(r)) => {
                    free.remove(&r);
                    rays[row.id - 1] = Some(r);
                }
                _ => flagged.push(row.id),
            }
        }
        if free.len() != flagged.len() {
            return Err(Error::InvalidSystem(format!(
                "block {}: {} flagged rows but {} unclaimed derived rays",
                b + 1,
                flagged.len(),
                free.len()
            )));
        }
        if !flagged.is_empty() {
            open_blocks.push((flagged, free.into_iter().collect::<Vec<_>>()));
        }
    }

    let per_block: Vec<Vec<Vec<Ray>>> = open_blocks
        .iter()
        .map(|(_, free)| free.iter().copied().permutations(free.len()).collect())
        .collect();

    let mut candidates = 0;
    let mut consistent: Vec<Vec<Ray>> = Vec::new();
    if open_blocks.is_empty() {
        candidates = 1;
        consistent.push(rays.into_iter().map(|r| r.expect("every id matched")).collect());
    } else {
        for choice in per_block.iter().map(|v| v.iter()).multi_cartesian_product() {
            candidates += 1;
            let mut trial = rays.clone();
            for ((rows, _), perm) in open_blocks.iter().zip(&choice) {
                for (&id, ray) in rows.iter().zip(perm.iter()) {
                    trial[id - 1] = Some(*ray);
                }
            }
            let trial: Vec<Ray> = trial.into_iter().map(|r| r.expect("every id filled")).collect();
            if relations_orthogonal(&trial, relations) {
                consistent.push(trial);
            }
        }
    }
    if consistent.len() != 1 {
        return Err(Error::AmbiguousRayIds { consistent: consistent.len() });
    }
    let resolved = consistent.pop().expect("one assignment");

    let overrides = recon
        .rows
        .iter()
        .filter(|r| r.status != RowStatus::Matched)
        .map(|r| Override {
            id: r.id,
            printed: r.printed.clone(),
            derived: resolved[r.id - 1],
            printed_agrees: r.parsed == Some(resolved[r.id - 1]),
        })
        .collect();

    Ok((RayStore::new(resolved, recon.block_contexts.clone()), IdAssignment { overrides, candidates }))
}
