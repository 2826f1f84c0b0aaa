//! The five-context, ten-observable three-qubit configuration and its
//! operator-level value-assignment contradiction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::PauliObservable;

/// Observables in a fixed id order: `X1 X2 X3 Z1 Z2 Z3 XXZ XZX ZXX ZZZ`.
const OBSERVABLES: [&str; 10] = ["XII", "IXI", "IIX", "ZII", "IZI", "IIZ", "XXZ", "XZX", "ZXX", "ZZZ"];

/// Context lines by observable id; the last one is the horizontal line.
const CONTEXTS: [[usize; 4]; 5] = [
    [0, 1, 5, 6], // X1 X2 Z3 · XXZ
    [0, 4, 2, 7], // X1 Z2 X3 · XZX
    [3, 1, 2, 8], // Z1 X2 X3 · ZXX
    [3, 4, 5, 9], // Z1 Z2 Z3 · ZZZ
    [9, 8, 7, 6], // ZZZ ZXX XZX XXZ
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pentagram {
    pub observables: Vec<PauliObservable>,
    pub contexts: Vec<Vec<usize>>,
    pub horizontal_context: usize,
}

pub fn build_pentagram() -> Pentagram {
    Pentagram {
        observables: OBSERVABLES.iter().map(|s| s.parse().expect("static Pauli string")).collect(),
        contexts: CONTEXTS.iter().map(|c| c.to_vec()).collect(),
        horizontal_context: 4,
    }
}

impl Pentagram {
    pub fn context_observables(&self, context: usize) -> Vec<PauliObservable> {
        self.contexts[context].iter().map(|&id| self.observables[id]).collect()
    }

    /// Swaps two contexts, carrying the horizontal marker along.
    pub fn swap_contexts(&mut self, a: usize, b: usize) {
        self.contexts.swap(a, b);
        if self.horizontal_context == a {
            self.horizontal_context = b;
        } else if self.horizontal_context == b {
            self.horizontal_context = a;
        }
    }

    /// Moves observable `i` to id `perm[i]`.
    pub fn relabel_observables(&self, perm: &[usize]) -> Pentagram {
        assert_eq!(perm.len(), self.observables.len());
        let mut observables = self.observables.clone();
        for (old, &new) in perm.iter().enumerate() {
            observables[new] = self.observables[old];
        }
        Pentagram {
            observables,
            contexts: self.contexts.iter().map(|c| c.iter().map(|&id| perm[id]).collect()).collect(),
            horizontal_context: self.horizontal_context,
        }
    }

    /// Product-rule constraints `∏ v(O) = sign(∏ O)`, one per context.
    pub fn sign_constraints(&self) -> Result<Vec<SignConstraint>> {
        self.contexts
            .iter()
            .enumerate()
            .map(|(i, ctx)| {
                let prod = PauliObservable::product(ctx.iter().map(|&id| &self.observables[id]))?;
                let target = prod
                    .scalar_sign()
                    .ok_or_else(|| Error::InvalidSystem(format!("context {} does not multiply to ±I", i + 1)))?;
                Ok(SignConstraint { members: ctx.clone(), target })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ContextCheck {
    pub context: usize,
    pub mutually_commuting: bool,
    /// `Some(±1)` when the ordered product is `±I`.
    pub product_sign: Option<i8>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PentagramReport {
    pub contexts: Vec<ContextCheck>,
    pub membership: Vec<usize>,
    pub failures: Vec<String>,
}

impl PentagramReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn product_signs(&self) -> Vec<Option<i8>> {
        self.contexts.iter().map(|c| c.product_sign).collect()
    }
}

/// Checks commutation within contexts, the `+I`/`−I` product pattern and
/// that every observable sits on exactly two lines. The checks do not depend
/// on context or observable order.
pub fn verify_pentagram(p: &Pentagram) -> PentagramReport {
    let mut failures = Vec::new();
    let mut contexts = Vec::with_capacity(p.contexts.len());

    for (i, ctx) in p.contexts.iter().enumerate() {
        let obs = p.context_observables(i);
        let mutually_commuting = obs
            .iter()
            .enumerate()
            .all(|(a, oa)| obs[a + 1..].iter().all(|ob| oa.commutes(ob).unwrap_or(false)));
        if !mutually_commuting {
            failures.push(format!("context {}: observables do not mutually commute", i + 1));
        }
        let product_sign = PauliObservable::product(obs.iter()).ok().and_then(|prod| prod.scalar_sign());
        if product_sign.is_none() {
            failures.push(format!("context {}: product is not ±I", i + 1));
        }
        if ctx.len() != 4 {
            failures.push(format!("context {}: has {} observables, expected 4", i + 1, ctx.len()));
        }
        contexts.push(ContextCheck { context: i, mutually_commuting, product_sign });
    }

    let negative: Vec<usize> = contexts.iter().filter(|c| c.product_sign == Some(-1)).map(|c| c.context).collect();
    match negative.as_slice() {
        [h] if *h == p.horizontal_context => {}
        [h] => failures.push(format!(
            "the −I context is {}, but context {} is marked horizontal",
            h + 1,
            p.horizontal_context + 1
        )),
        _ => failures.push(format!("{} contexts multiply to −I, expected exactly one", negative.len())),
    }
    if p.contexts.len() != 5 {
        failures.push(format!("{} contexts, expected 5", p.contexts.len()));
    }

    let mut membership = vec![0usize; p.observables.len()];
    for id in p.contexts.iter().flatten() {
        membership[*id] += 1;
    }
    for (id, &m) in membership.iter().enumerate() {
        if m != 2 {
            failures.push(format!("observable {} ({}) lies in {m} contexts, expected 2", id, p.observables[id]));
        }
    }

    PentagramReport { contexts, membership, failures }
}

/// `∏_{i ∈ members} v(i) = target` over `±1` values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignConstraint {
    pub members: Vec<usize>,
    pub target: i8,
}

/// Exhaustive count of `±1` assignments to `n_vars` variables meeting every
/// constraint. Bit `i` of the scan index set means `v(i) = −1`.
pub fn count_sign_solutions(n_vars: usize, constraints: &[SignConstraint]) -> u64 {
    assert!(n_vars < 32, "exhaustive scan limited to 31 variables");
    let masks: Vec<(u32, u32)> = constraints
        .iter()
        .map(|c| {
            // members may repeat; a repeated variable squares away
            let mask = c.members.iter().fold(0u32, |m, &i| m ^ (1 << i));
            (mask, u32::from(c.target < 0))
        })
        .collect();
    (0u32..1 << n_vars)
        .filter(|&a| masks.iter().all(|&(mask, want)| (a & mask).count_ones() % 2 == want))
        .count() as u64
}

/// Number of value maps `v: observables → {±1}` obeying the product rule on
/// every context.
pub fn count_sign_assignments(p: &Pentagram) -> Result<u64> {
    Ok(count_sign_solutions(p.observables.len(), &p.sign_constraints()?))
}

/// Every variable appears an even number of times and the targets multiply
/// to `−1`: multiplying all constraints gives `+1 = −1`.
pub fn parity_obstruction(n_vars: usize, constraints: &[SignConstraint]) -> bool {
    let mut counts = vec![0usize; n_vars];
    for i in constraints.iter().flat_map(|c| &c.members) {
        counts[*i] += 1;
    }
    let target: i8 = constraints.iter().map(|c| c.target).product();
    counts.iter().all(|c| c % 2 == 0) && target == -1
}
