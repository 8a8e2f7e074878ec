//! Checking the operad axioms on finite samples.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Colour, Op, SetOperad, Signature};
use crate::error::Result;
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
    }
}

#[derive(Clone, Debug)]
pub struct AxiomConfig {
    /// Hom-sets whose operations form the sample pool.
    pub signatures: Vec<Signature>,
    /// Largest arity of a composite that is checked.
    pub max_arity: usize,
}

/// Accumulates checks of individual laws.
pub struct AxiomChecker<'a> {
    o: &'a dyn SetOperad,
    pub report: AxiomReport,
}

/// `γ'` with `act(γ, o) ∘_i p = act(γ', o ∘_γ(i) p)`, where `p` has arity `k`.
pub fn equivariance_perm(gamma: &Permutation, i: usize, k: usize) -> Permutation {
    let n = gamma.len();
    let gi = gamma.apply(i);
    let shift = |a: usize| if a < gi { a } else { a + k - 1 };
    let mut images = Vec::with_capacity(n + k - 1);
    for q in 1..i {
        images.push(shift(gamma.apply(q)));
    }
    for r in 1..=k {
        images.push(gi - 1 + r);
    }
    for q in i + 1..=n {
        images.push(shift(gamma.apply(q)));
    }
    Permutation::new(images).expect("block substitution of a permutation")
}

/// `τ` acting on the block of `k` inputs starting at `i`, inside `Σ_{n+k-1}`.
pub fn block_perm_at(tau: &Permutation, i: usize, n: usize) -> Permutation {
    let left = Permutation::identity(i - 1);
    let right = Permutation::identity(n - i);
    left.direct_sum(tau).direct_sum(&right)
}

impl<'a> AxiomChecker<'a> {
    pub fn new(o: &'a dyn SetOperad) -> Self {
        AxiomChecker { o, report: AxiomReport::default() }
    }

    fn record(&mut self, law: &str, ok: Result<bool>, witness: impl FnOnce() -> String) {
        self.report.checks += 1;
        match ok {
            Ok(true) => {}
            Ok(false) => self.report.violations.push(Violation { law: law.to_string(), witness: witness() }),
            Err(e) => self.report.violations.push(Violation { law: law.to_string(), witness: format!("{}: {e}", witness()) }),
        }
    }

    /// The composite lies in the hom-set of the spliced signature.
    pub fn composite_typed(&mut self, a: &Op, i: usize, b: &Op) {
        let o = self.o;
        let ok = (|| {
            let s = o.signature(a)?.splice(i, &o.signature(b)?)?;
            let c = o.compose_at(a, i, b)?;
            Ok(o.signature(&c)? == s && o.hom(&s)?.contains(&c))
        })();
        let w = || format!("{} o_{i} {}", o.describe(a), o.describe(b));
        self.record("composite lies in the spliced hom-set", ok, w);
    }

    pub fn units(&mut self, a: &Op) {
        let o = self.o;
        let ok = (|| {
            let s = o.signature(a)?;
            let left = o.compose_at(&o.unit(&s.output)?, 1, a)? == *a;
            let mut right = true;
            for (i, c) in s.inputs.iter().enumerate() {
                right &= o.compose_at(a, i + 1, &o.unit(c)?)? == *a;
            }
            Ok(left && right)
        })();
        let w = || o.describe(a);
        self.record("unit", ok, w);
    }

    pub fn action(&mut self, a: &Op, sigma: &Permutation, tau: &Permutation) {
        let o = self.o;
        let ok = (|| Ok(o.act(tau, &o.act(sigma, a)?)? == o.act(&sigma.compose(tau)?, a)?))();
        let w = || format!("{} with {sigma:?} then {tau:?}", o.describe(a));
        self.record("right action", ok, w);
    }

    /// `act(γ, a) ∘_i b = act(γ', a ∘_γ(i) b)`.
    pub fn equivariance(&mut self, a: &Op, gamma: &Permutation, i: usize, b: &Op) {
        let o = self.o;
        let ok = (|| {
            let k = o.signature(b)?.arity();
            let lhs = o.compose_at(&o.act(gamma, a)?, i, b)?;
            let rhs = o.act(&equivariance_perm(gamma, i, k), &o.compose_at(a, gamma.apply(i), b)?)?;
            Ok(lhs == rhs)
        })();
        let w = || format!("{} acted by {gamma:?}, o_{i} {}", o.describe(a), o.describe(b));
        self.record("equivariance", ok, w);
    }

    /// `a ∘_i act(τ, b) = act(1 ⊕ τ ⊕ 1, a ∘_i b)`.
    pub fn inner_equivariance(&mut self, a: &Op, i: usize, b: &Op, tau: &Permutation) {
        let o = self.o;
        let ok = (|| {
            let n = o.signature(a)?.arity();
            let lhs = o.compose_at(a, i, &o.act(tau, b)?)?;
            let rhs = o.act(&block_perm_at(tau, i, n), &o.compose_at(a, i, b)?)?;
            Ok(lhs == rhs)
        })();
        let w = || format!("{} o_{i} ({} acted by {tau:?})", o.describe(a), o.describe(b));
        self.record("equivariance in the inserted operation", ok, w);
    }

    /// `(a ∘_i b) ∘_{i-1+j} c = a ∘_i (b ∘_j c)`.
    pub fn sequential(&mut self, a: &Op, i: usize, b: &Op, j: usize, c: &Op) {
        let o = self.o;
        let ok = (|| Ok(o.compose_at(&o.compose_at(a, i, b)?, i - 1 + j, c)? == o.compose_at(a, i, &o.compose_at(b, j, c)?)?))();
        let w = || format!("({} o_{i} {}) o_{} {}", o.describe(a), o.describe(b), i - 1 + j, o.describe(c));
        self.record("sequential associativity", ok, w);
    }

    /// For `i < j`: `(a ∘_j c) ∘_i b = (a ∘_i b) ∘_{j-1+k} c`, `k` the arity of `b`.
    pub fn parallel(&mut self, a: &Op, i: usize, b: &Op, j: usize, c: &Op) {
        let o = self.o;
        let ok = (|| {
            let k = o.signature(b)?.arity();
            Ok(o.compose_at(&o.compose_at(a, j, c)?, i, b)? == o.compose_at(&o.compose_at(a, i, b)?, j - 1 + k, c)?)
        })();
        let w = || format!("{} with {} at {i} and {} at {j}", o.describe(a), o.describe(b), o.describe(c));
        self.record("parallel associativity", ok, w);
    }
}

/// Exhaustive check over all operations of the configured hom-sets.
pub fn check_operad_axioms(o: &dyn SetOperad, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let mut pool: Vec<(Op, Signature)> = Vec::new();
    for s in &cfg.signatures {
        for op in o.hom(s)?.iter() {
            pool.push((op.clone(), s.clone()));
        }
    }
    let mut by_output: HashMap<Colour, Vec<usize>> = HashMap::new();
    for (k, (_, s)) in pool.iter().enumerate() {
        by_output.entry(s.output.clone()).or_default().push(k);
    }
    let empty = vec![];
    let feeding = |c: &Colour| by_output.get(c).unwrap_or(&empty);
    let max = cfg.max_arity;

    let mut ch = AxiomChecker::new(o);
    for (a, s) in &pool {
        ch.units(a);
        let n = s.arity();
        if n <= 3 {
            let all = Permutation::all(n);
            for sigma in &all {
                for tau in &all {
                    ch.action(a, sigma, tau);
                }
            }
        }
    }
    for (a, s) in &pool {
        let n = s.arity();
        for i in 1..=n {
            for &pb in feeding(&s.inputs[i - 1]) {
                let (b, sb) = &pool[pb];
                let k = sb.arity();
                if n + k - 1 > max {
                    continue;
                }
                ch.composite_typed(a, i, b);
                for tau in Permutation::all(k) {
                    ch.inner_equivariance(a, i, b, &tau);
                }
                // equivariance: a acted by γ receives b in slot i
                for gamma in Permutation::all(n) {
                    let gi = gamma.apply(i);
                    if s.inputs[gi - 1] == sb.output {
                        ch.equivariance(a, &gamma, i, b);
                    }
                }
                for j in 1..=k {
                    for &pc in feeding(&sb.inputs[j - 1]) {
                        let (c, sc) = &pool[pc];
                        if n + k + sc.arity() - 2 <= max {
                            ch.sequential(a, i, b, j, c);
                        }
                    }
                }
                for j in i + 1..=n {
                    for &pc in feeding(&s.inputs[j - 1]) {
                        let (c, sc) = &pool[pc];
                        if n + k + sc.arity() - 2 <= max {
                            ch.parallel(a, i, b, j, c);
                        }
                    }
                }
            }
        }
    }
    Ok(ch.report)
}
