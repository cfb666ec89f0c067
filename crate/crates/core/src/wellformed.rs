//! Finite-sum well-formedness checks on a transition table.
//!
//! Every condition quantifies over finitely many tuples and sums over the
//! legal push words only, so each check is an exhaustive scan of the table.
//! The general suite works on δ directly; the simplified suite reads the
//! table through `φ(q1, σ, τ, q, ω) = δ(q1, σ, τ, q, D(q), ω)`.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Direction, Entry, InputSym, Kind, QpaSpec, StackSym, StateId};

/// Identifies one well-formedness condition.
#[allow(non_camel_case_types, clippy::upper_case_acronyms)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConditionId {
    LPC,
    OCV,
    RVN,
    SEP1a,
    SEP1b,
    SEP2,
    SEP3a,
    SEP3b,
    LPC2,
    OCV2,
    RVN2,
    SEP_a,
    SEP_b,
}

impl ConditionId {
    pub const GENERAL: [ConditionId; 8] = [
        ConditionId::LPC,
        ConditionId::OCV,
        ConditionId::RVN,
        ConditionId::SEP1a,
        ConditionId::SEP1b,
        ConditionId::SEP2,
        ConditionId::SEP3a,
        ConditionId::SEP3b,
    ];

    pub const SIMPLIFIED: [ConditionId; 5] = [
        ConditionId::LPC2,
        ConditionId::OCV2,
        ConditionId::RVN2,
        ConditionId::SEP_a,
        ConditionId::SEP_b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::LPC => "LPC",
            ConditionId::OCV => "OCV",
            ConditionId::RVN => "RVN",
            ConditionId::SEP1a => "SEP1a",
            ConditionId::SEP1b => "SEP1b",
            ConditionId::SEP2 => "SEP2",
            ConditionId::SEP3a => "SEP3a",
            ConditionId::SEP3b => "SEP3b",
            ConditionId::LPC2 => "LPC2",
            ConditionId::OCV2 => "OCV2",
            ConditionId::RVN2 => "RVN2",
            ConditionId::SEP_a => "SEP_a",
            ConditionId::SEP_b => "SEP_b",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ConditionId::LPC | ConditionId::LPC2 => "local probability",
            ConditionId::OCV | ConditionId::OCV2 => "orthogonality of column vectors",
            ConditionId::RVN | ConditionId::RVN2 => "row vectors norm",
            ConditionId::SEP1a | ConditionId::SEP_a => "separability I (a)",
            ConditionId::SEP1b | ConditionId::SEP_b => "separability I (b)",
            ConditionId::SEP2 => "separability II",
            ConditionId::SEP3a => "separability III (a)",
            ConditionId::SEP3b => "separability III (b)",
        }
    }

    /// Conditions that correspond to column normalization/orthogonality of
    /// the evolution matrix; the rest concern row norms.
    pub fn is_column_condition(self) -> bool {
        !matches!(self, ConditionId::RVN | ConditionId::RVN2)
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single tuple for which a condition's sum misses its target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub witness: Vec<String>,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tolerance: f64,
    /// Reports kept per condition; violations beyond this are only counted.
    pub max_reports: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tolerance: 1e-9,
            max_reports: 100,
        }
    }
}

/// Result of evaluating one condition over its whole quantifier domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionOutcome {
    pub condition: ConditionId,
    pub passed: bool,
    pub violations: usize,
    pub tuples: usize,
    pub worst_residual: f64,
    pub reports: Vec<ConditionReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    General,
    Simplified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub suite: Suite,
    pub passed: bool,
    pub total_violations: usize,
    pub worst_residual: f64,
    pub conditions: Vec<ConditionOutcome>,
}

impl ConditionSummary {
    pub fn outcome(&self, id: ConditionId) -> Option<&ConditionOutcome> {
        self.conditions.iter().find(|c| c.condition == id)
    }

    pub fn failed(&self) -> Vec<ConditionId> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.condition)
            .collect()
    }

    /// Pass/fail restricted to the column conditions (everything except the row norm).
    pub fn columns_pass(&self) -> bool {
        self.conditions
            .iter()
            .filter(|c| c.condition.is_column_condition())
            .all(|c| c.passed)
    }

    pub fn rows_pass(&self) -> bool {
        self.conditions
            .iter()
            .filter(|c| !c.condition.is_column_condition())
            .all(|c| c.passed)
    }

    fn from_outcomes(suite: Suite, conditions: Vec<ConditionOutcome>) -> Self {
        ConditionSummary {
            suite,
            passed: conditions.iter().all(|c| c.passed),
            total_violations: conditions.iter().map(|c| c.violations).sum(),
            worst_residual: conditions
                .iter()
                .map(|c| c.worst_residual)
                .fold(0.0, f64::max),
            conditions,
        }
    }
}

struct Collector<'o> {
    outcome: ConditionOutcome,
    opts: &'o CheckOptions,
}

impl<'o> Collector<'o> {
    fn new(condition: ConditionId, opts: &'o CheckOptions) -> Self {
        Collector {
            outcome: ConditionOutcome {
                condition,
                passed: true,
                violations: 0,
                tuples: 0,
                worst_residual: 0.0,
                reports: Vec::new(),
            },
            opts,
        }
    }

    fn record(&mut self, residual: f64, witness: impl FnOnce() -> Vec<String>) {
        let o = &mut self.outcome;
        o.tuples += 1;
        o.worst_residual = o.worst_residual.max(residual);
        if residual > self.opts.tolerance {
            o.passed = false;
            o.violations += 1;
            if o.reports.len() < self.opts.max_reports {
                o.reports.push(ConditionReport {
                    condition: o.condition,
                    witness: witness(),
                    residual,
                });
            }
        }
    }

    fn finish(self) -> ConditionOutcome {
        self.outcome
    }
}

/// Column-indexed view of δ (or of φ for the simplified suite).
struct Table<'s> {
    spec: &'s QpaSpec,
    gamma: usize,
    delta: usize,
    cols: Vec<Vec<&'s Entry>>,
}

#[derive(Clone, Copy)]
struct Triple {
    q: StateId,
    sigma: InputSym,
    tau: StackSym,
    idx: usize,
}

impl<'s> Table<'s> {
    fn new(spec: &'s QpaSpec, simplified: bool) -> Self {
        let ab = spec.alphabets();
        let (gamma, delta) = (ab.gamma_len(), ab.delta_len());
        let mut cols = Vec::with_capacity(spec.state_count() * gamma * delta);
        for q in spec.states() {
            for s in ab.gamma() {
                for t in ab.delta() {
                    cols.push(
                        spec.column(q, s, t)
                            .iter()
                            .filter(|e| !simplified || spec.direction_of(e.to) == Some(e.dir))
                            .collect(),
                    );
                }
            }
        }
        Table {
            spec,
            gamma,
            delta,
            cols,
        }
    }

    fn triple(&self, q: StateId, sigma: InputSym, tau: StackSym) -> Triple {
        Triple {
            q,
            sigma,
            tau,
            idx: (q.0 * self.gamma + sigma.0) * self.delta + tau.0,
        }
    }

    fn triples_with(&self, sigma: InputSym) -> Vec<Triple> {
        let mut out = Vec::new();
        for q in self.spec.states() {
            for t in self.spec.alphabets().delta() {
                out.push(self.triple(q, sigma, t));
            }
        }
        out
    }

    fn all_triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for q in self.spec.states() {
            for s in self.spec.alphabets().gamma() {
                for t in self.spec.alphabets().delta() {
                    out.push(self.triple(q, s, t));
                }
            }
        }
        out
    }

    fn col(&self, t: Triple) -> &[&'s Entry] {
        &self.cols[t.idx]
    }

    /// δ(t, to, dir, push) for the column of `t`.
    fn value(&self, t: Triple, to: StateId, dir: Direction, push: &[StackSym]) -> Complex64 {
        self.col(t)
            .iter()
            .filter(|e| e.to == to && e.dir == dir && e.push == push)
            .map(|e| e.amp)
            .sum()
    }

    fn names(&self, t: Triple) -> [String; 3] {
        let ab = self.spec.alphabets();
        [
            self.spec.state_name(t.q).to_string(),
            ab.input_name(t.sigma).to_string(),
            ab.stack_name(t.tau).to_string(),
        ]
    }

    fn stack_name(&self, s: StackSym) -> String {
        self.spec.alphabets().stack_name(s).to_string()
    }

    fn pair_witness(&self, a: Triple, b: Triple) -> Vec<String> {
        let mut w = self.names(a).to_vec();
        w.extend(self.names(b));
        w
    }
}

fn local_probability(table: &Table, id: ConditionId, opts: &CheckOptions) -> ConditionOutcome {
    let mut c = Collector::new(id, opts);
    for t in table.all_triples() {
        let sum: f64 = table.col(t).iter().map(|e| e.amp.norm_sqr()).sum();
        c.record((sum - 1.0).abs(), || table.names(t).to_vec());
    }
    c.finish()
}

fn column_orthogonality(table: &Table, id: ConditionId, opts: &CheckOptions) -> ConditionOutcome {
    let mut c = Collector::new(id, opts);
    for sigma in table.spec.alphabets().gamma() {
        let triples = table.triples_with(sigma);
        for (i, &a) in triples.iter().enumerate() {
            for &b in &triples[i + 1..] {
                let ip: Complex64 = table
                    .col(a)
                    .iter()
                    .map(|e| e.amp.conj() * table.value(b, e.to, e.dir, &e.push))
                    .sum();
                c.record(ip.norm(), || table.pair_witness(a, b));
            }
        }
    }
    c.finish()
}

/// Row norm sum for target state `q1` entered from a cell holding `sigma`
/// with direction `d`, restricted to ω ∈ {ε, τ2, τ1τ2}.
fn incoming_weight(
    table: &Table,
    simplified: bool,
    sigma: InputSym,
    q1: StateId,
    d: Direction,
    tau1: StackSym,
    tau2: StackSym,
) -> f64 {
    if simplified && table.spec.direction_of(q1) != Some(d) {
        return 0.0;
    }
    table
        .spec
        .incoming(sigma, q1, d)
        .iter()
        .filter(|e| {
            e.push.is_empty() || e.push.as_slice() == [tau2] || e.push.as_slice() == [tau1, tau2]
        })
        .map(|e| e.amp.norm_sqr())
        .sum()
}

fn row_norm_general(table: &Table, opts: &CheckOptions) -> ConditionOutcome {
    let mut c = Collector::new(ConditionId::RVN, opts);
    let spec = table.spec;
    let ab = spec.alphabets();
    for q1 in spec.states() {
        for s1 in ab.gamma() {
            for s2 in ab.gamma() {
                for t1 in ab.delta() {
                    for t2 in ab.delta() {
                        let sum = incoming_weight(table, false, s1, q1, Direction::Advance, t1, t2)
                            + incoming_weight(table, false, s2, q1, Direction::Stay, t1, t2);
                        c.record((sum - 1.0).abs(), || {
                            vec![
                                spec.state_name(q1).to_string(),
                                ab.input_name(s1).to_string(),
                                ab.input_name(s2).to_string(),
                                ab.stack_name(t1).to_string(),
                                ab.stack_name(t2).to_string(),
                            ]
                        });
                    }
                }
            }
        }
    }
    c.finish()
}

fn row_norm_simplified(table: &Table, opts: &CheckOptions) -> ConditionOutcome {
    let mut c = Collector::new(ConditionId::RVN2, opts);
    let spec = table.spec;
    let ab = spec.alphabets();
    for q1 in spec.states() {
        let d = spec.direction_of(q1).unwrap_or(Direction::Stay);
        for s1 in ab.gamma() {
            for t1 in ab.delta() {
                for t2 in ab.delta() {
                    let sum = incoming_weight(table, true, s1, q1, d, t1, t2);
                    c.record((sum - 1.0).abs(), || {
                        vec![
                            spec.state_name(q1).to_string(),
                            ab.input_name(s1).to_string(),
                            ab.stack_name(t1).to_string(),
                            ab.stack_name(t2).to_string(),
                        ]
                    });
                }
            }
        }
    }
    c.finish()
}

/// Σ_{(q,τ)} δ*(a, q, d1, τ) δ(b, q, d2, τ3 τ) + Σ_q δ*(a, q, d1, ε) δ(b, q, d2, τ3).
/// With `d1 = d2 = None` the direction of `a`'s entry is reused for `b`.
fn depth_one_overlap(
    table: &Table,
    a: Triple,
    b: Triple,
    tau3: StackSym,
    dirs: Option<(Direction, Direction)>,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for e in table.col(a) {
        let d2 = match dirs {
            Some((d1, d2)) if e.dir == d1 => d2,
            Some(_) => continue,
            None => e.dir,
        };
        match e.push.as_slice() {
            [] => sum += e.amp.conj() * table.value(b, e.to, d2, &[tau3]),
            [t] => sum += e.amp.conj() * table.value(b, e.to, d2, &[tau3, *t]),
            _ => {}
        }
    }
    sum
}

/// Σ_q δ*(a, q, d1, ε) δ(b, q, d2, τ2 τ3) where τ2 is `b`'s popped symbol.
fn depth_two_overlap(
    table: &Table,
    a: Triple,
    b: Triple,
    tau3: StackSym,
    dirs: Option<(Direction, Direction)>,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for e in table.col(a) {
        if !e.push.is_empty() {
            continue;
        }
        let d2 = match dirs {
            Some((d1, d2)) if e.dir == d1 => d2,
            Some(_) => continue,
            None => e.dir,
        };
        sum += e.amp.conj() * table.value(b, e.to, d2, &[b.tau, tau3]);
    }
    sum
}

fn has_short_push(table: &Table, a: Triple) -> bool {
    table.col(a).iter().any(|e| e.push.len() <= 1)
}

fn separability_one(
    table: &Table,
    ids: (ConditionId, ConditionId),
    opts: &CheckOptions,
) -> (ConditionOutcome, ConditionOutcome) {
    let mut ca = Collector::new(ids.0, opts);
    let mut cb = Collector::new(ids.1, opts);
    let ab = table.spec.alphabets();
    for sigma in ab.gamma() {
        let triples = table.triples_with(sigma);
        for &a in &triples {
            let relevant = has_short_push(table, a);
            for &b in &triples {
                for tau3 in ab.delta() {
                    let witness = || {
                        let mut w = table.pair_witness(a, b);
                        w.push(table.stack_name(tau3));
                        w
                    };
                    if !relevant {
                        ca.record(0.0, witness);
                        cb.record(0.0, witness);
                        continue;
                    }
                    let ra = depth_one_overlap(table, a, b, tau3, None).norm();
                    ca.record(ra, witness);
                    let rb = depth_two_overlap(table, a, b, tau3, None).norm();
                    cb.record(rb, witness);
                }
            }
        }
    }
    (ca.finish(), cb.finish())
}

fn separability_two(table: &Table, opts: &CheckOptions) -> ConditionOutcome {
    let mut c = Collector::new(ConditionId::SEP2, opts);
    let triples = table.all_triples();
    for &a in &triples {
        let stays: Vec<&&Entry> = table
            .col(a)
            .iter()
            .filter(|e| e.dir == Direction::Stay)
            .collect();
        for &b in &triples {
            let ip: Complex64 = stays
                .iter()
                .map(|e| e.amp.conj() * table.value(b, e.to, Direction::Advance, &e.push))
                .sum();
            c.record(ip.norm(), || table.pair_witness(a, b));
        }
    }
    c.finish()
}

fn separability_three(table: &Table, opts: &CheckOptions) -> (ConditionOutcome, ConditionOutcome) {
    let mut ca = Collector::new(ConditionId::SEP3a, opts);
    let mut cb = Collector::new(ConditionId::SEP3b, opts);
    let ab = table.spec.alphabets();
    let triples = table.all_triples();
    for &a in &triples {
        let relevant = has_short_push(table, a);
        for &b in &triples {
            for tau3 in ab.delta() {
                for d1 in Direction::ALL {
                    let d2 = d1.other();
                    let witness = || {
                        let mut w = table.pair_witness(a, b);
                        w.push(table.stack_name(tau3));
                        w.push(d1.name().to_string());
                        w.push(d2.name().to_string());
                        w
                    };
                    if !relevant {
                        ca.record(0.0, witness);
                        cb.record(0.0, witness);
                        continue;
                    }
                    let ra = depth_one_overlap(table, a, b, tau3, Some((d1, d2))).norm();
                    ca.record(ra, witness);
                    let rb = depth_two_overlap(table, a, b, tau3, Some((d1, d2))).norm();
                    cb.record(rb, witness);
                }
            }
        }
    }
    (ca.finish(), cb.finish())
}

pub fn check_local_probability(spec: &QpaSpec, opts: &CheckOptions) -> Vec<ConditionReport> {
    local_probability(&Table::new(spec, false), ConditionId::LPC, opts).reports
}

pub fn check_column_orthogonality(spec: &QpaSpec, opts: &CheckOptions) -> Vec<ConditionReport> {
    column_orthogonality(&Table::new(spec, false), ConditionId::OCV, opts).reports
}

pub fn check_row_norm(spec: &QpaSpec, opts: &CheckOptions) -> Vec<ConditionReport> {
    row_norm_general(&Table::new(spec, false), opts).reports
}

/// SEP1a, SEP1b, SEP2, SEP3a and SEP3b, reports in that order.
pub fn check_separability(spec: &QpaSpec, opts: &CheckOptions) -> Vec<ConditionReport> {
    separability_outcomes(&Table::new(spec, false), opts)
        .into_iter()
        .flat_map(|o| o.reports)
        .collect()
}

fn separability_outcomes(table: &Table, opts: &CheckOptions) -> Vec<ConditionOutcome> {
    let (s1a, s1b) = separability_one(table, (ConditionId::SEP1a, ConditionId::SEP1b), opts);
    let s2 = separability_two(table, opts);
    let (s3a, s3b) = separability_three(table, opts);
    vec![s1a, s1b, s2, s3a, s3b]
}

/// Runs the full general suite on δ, whatever the spec's kind.
pub fn check_general(spec: &QpaSpec, opts: &CheckOptions) -> ConditionSummary {
    let table = Table::new(spec, false);
    let mut out = vec![
        local_probability(&table, ConditionId::LPC, opts),
        column_orthogonality(&table, ConditionId::OCV, opts),
        row_norm_general(&table, opts),
    ];
    out.extend(separability_outcomes(&table, opts));
    ConditionSummary::from_outcomes(Suite::General, out)
}

/// Runs the simplified suite on φ. Needs `D` defined for every state.
pub fn check_simplified_summary(spec: &QpaSpec, opts: &CheckOptions) -> Result<ConditionSummary> {
    if let Some(q) = spec.states().find(|&q| spec.direction_of(q).is_none()) {
        return Err(Error::MissingDirection(spec.state_name(q).to_string()));
    }
    let table = Table::new(spec, true);
    let (sa, sb) = separability_one(&table, (ConditionId::SEP_a, ConditionId::SEP_b), opts);
    let out = vec![
        local_probability(&table, ConditionId::LPC2, opts),
        column_orthogonality(&table, ConditionId::OCV2, opts),
        row_norm_simplified(&table, opts),
        sa,
        sb,
    ];
    Ok(ConditionSummary::from_outcomes(Suite::Simplified, out))
}

/// Reports of the simplified suite, in condition order.
pub fn check_simplified(spec: &QpaSpec, opts: &CheckOptions) -> Result<Vec<ConditionReport>> {
    Ok(check_simplified_summary(spec, opts)?
        .conditions
        .into_iter()
        .flat_map(|o| o.reports)
        .collect())
}

/// Dispatches on the spec's kind: general specs get the general suite,
/// simplified and reversible ones the simplified suite. A simplified spec
/// whose `D` is incomplete falls back to the general suite.
pub fn check_all(spec: &QpaSpec, opts: &CheckOptions) -> ConditionSummary {
    match spec.kind() {
        Kind::General => check_general(spec, opts),
        Kind::Simplified | Kind::Reversible => {
            check_simplified_summary(spec, opts).unwrap_or_else(|_| check_general(spec, opts))
        }
    }
}
