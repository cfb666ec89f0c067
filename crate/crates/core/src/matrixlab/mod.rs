//! Truncated evolution matrices and numerical checks of their properties.
//!
//! A [`ConfigWindow`] is a finite set of configurations over one framed
//! input. Its matrix is exact on *interior* indices: columns whose whole
//! successor set lies in the window, and rows whose whole predecessor set
//! does. Rows at the two ends need one more restriction. On the `#` cell a
//! row is interior only for states that no transition enters by advancing,
//! and one cell past `$` only for states that no transition enters by
//! staying; otherwise part of the row would come from outside the tape.
//! Every claim below is made on interior indices only.
//!
//! Matrices are 0-indexed; the 1-based entry `(UU*)₁₁` is `row_inner(m, 0, 0)`.

mod fixtures;
mod sparse;

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

pub use fixtures::{random_banded, random_banded_isometry, shift_fixture, IsometryShape};
pub use sparse::{MatrixDump, TruncatedMatrix};

use crate::error::{Error, Result};
use crate::evolve::{successors, Configuration, TapeContext};
use crate::model::{Direction, QpaSpec, StackSym};

pub const DEFAULT_WINDOW_CAP: usize = 1_000_000;

/// Where the forward exploration of a window starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Seed {
    /// The initial configuration only.
    #[default]
    Initial,
    /// Every `(q, h, Z0 w)` with `h` on the tape or one cell past `$`, and
    /// `w` any stack word of length at most the given depth. `Stacks(0)`
    /// seeds empty stacks only.
    Stacks(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowOptions {
    pub radius: usize,
    pub seed: Seed,
    pub cap: usize,
}

impl WindowOptions {
    pub fn new(radius: usize) -> Self {
        WindowOptions {
            radius,
            seed: Seed::Initial,
            cap: DEFAULT_WINDOW_CAP,
        }
    }

    pub fn seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

/// An ordered, duplicate-free set of configurations with its interior split.
///
/// Configurations whose head sits past `$` are targets of moves that advance
/// off the tape. They have rows but never columns of their own.
#[derive(Clone, Debug)]
pub struct ConfigWindow {
    tape: TapeContext,
    configs: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    interior_cols: Vec<usize>,
    interior_rows: Vec<usize>,
}

impl ConfigWindow {
    pub fn tape(&self) -> &TapeContext {
        &self.tape
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn interior_cols(&self) -> &[usize] {
        &self.interior_cols
    }

    pub fn interior_rows(&self) -> &[usize] {
        &self.interior_rows
    }

    fn on_tape(&self, c: &Configuration) -> bool {
        c.head < self.tape.len()
    }
}

/// All `(configuration, amplitude)` pairs that one step maps onto `c`.
pub fn predecessors(
    spec: &QpaSpec,
    tape: &TapeContext,
    c: &Configuration,
) -> Vec<(Configuration, Complex64)> {
    let mut out = Vec::new();
    for d in Direction::ALL {
        let shift = usize::from(d == Direction::Advance);
        if c.head < shift || c.head - shift >= tape.len() {
            continue;
        }
        let head = c.head - shift;
        for e in spec.incoming(tape.symbol(head), c.state, d) {
            if e.push.len() > c.stack.len() || !c.stack.ends_with(&e.push) {
                continue;
            }
            let mut stack = c.stack[..c.stack.len() - e.push.len()].to_vec();
            stack.push(e.top);
            let pred = Configuration {
                state: e.from,
                head,
                stack,
            };
            if pred.has_valid_stack() {
                out.push((pred, e.amp));
            }
        }
    }
    out
}

/// `Z0 w` for every stack word `w` of length at most `depth`, shortest first.
fn stacks_upto(spec: &QpaSpec, depth: usize) -> Vec<Vec<StackSym>> {
    let mut out = vec![vec![StackSym::BASE]];
    let mut layer = out.clone();
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|s| {
                spec.alphabets().stack_syms().map(move |t| {
                    let mut s = s.clone();
                    s.push(t);
                    s
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Window of radius `radius` around the initial configuration.
pub fn enumerate_window(spec: &QpaSpec, word: &str, radius: usize) -> Result<ConfigWindow> {
    enumerate_window_with(spec, word, &WindowOptions::new(radius))
}

/// Forward closure of the seeds for `radius` steps, plus one layer of
/// predecessors of everything reached.
pub fn enumerate_window_with(
    spec: &QpaSpec,
    word: &str,
    opts: &WindowOptions,
) -> Result<ConfigWindow> {
    let tape = TapeContext::new(spec, word)?;
    let mut configs: Vec<Configuration> = Vec::new();
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut insert = |c: Configuration, configs: &mut Vec<Configuration>| -> Result<bool> {
        if index.contains_key(&c) {
            return Ok(false);
        }
        if configs.len() >= opts.cap {
            return Err(Error::WindowCap { cap: opts.cap });
        }
        index.insert(c.clone(), configs.len());
        configs.push(c);
        Ok(true)
    };
    let seeds: Vec<Configuration> = match opts.seed {
        Seed::Initial => vec![Configuration::initial(spec)],
        Seed::Stacks(depth) => {
            let stacks = stacks_upto(spec, depth);
            let mut seeds = Vec::new();
            for head in 0..=tape.len() {
                for state in spec.states() {
                    for stack in &stacks {
                        seeds.push(Configuration {
                            state,
                            head,
                            stack: stack.clone(),
                        });
                    }
                }
            }
            seeds
        }
    };
    let mut frontier = Vec::new();
    for s in seeds {
        if insert(s.clone(), &mut configs)? {
            frontier.push(s);
        }
    }
    for _ in 0..opts.radius {
        let mut next = Vec::new();
        for c in &frontier {
            if c.head >= tape.len() {
                continue;
            }
            for (s, _) in successors(spec, &tape, c)? {
                if insert(s.clone(), &mut configs)? {
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let reached = configs.len();
    for i in 0..reached {
        let c = configs[i].clone();
        for (p, _) in predecessors(spec, &tape, &c) {
            insert(p, &mut configs)?;
        }
    }

    let mut window = ConfigWindow {
        tape,
        configs,
        index,
        interior_cols: Vec::new(),
        interior_rows: Vec::new(),
    };
    // entered[d][q]: some transition enters q with direction d
    let mut entered = [
        vec![false; spec.state_count()],
        vec![false; spec.state_count()],
    ];
    for (k, d) in [Direction::Stay, Direction::Advance]
        .into_iter()
        .enumerate()
    {
        for q in spec.states() {
            entered[k][q.0] = spec
                .alphabets()
                .gamma()
                .any(|sigma| !spec.incoming(sigma, q, d).is_empty());
        }
    }
    for (i, c) in window.configs.iter().enumerate() {
        if window.on_tape(c)
            && successors(spec, &window.tape, c)?
                .iter()
                .all(|(s, _)| window.index.contains_key(s))
        {
            window.interior_cols.push(i);
        }
        let whole_row = if c.head == 0 {
            !entered[1][c.state.0]
        } else if !window.on_tape(c) {
            !entered[0][c.state.0]
        } else {
            true
        };
        if whole_row
            && predecessors(spec, &window.tape, c)
                .iter()
                .all(|(p, _)| window.index.contains_key(p))
        {
            window.interior_rows.push(i);
        }
    }
    Ok(window)
}

/// Entry `(r, c)` is the amplitude with which configuration `c` moves to
/// configuration `r` in one step. Successors outside the window are dropped.
pub fn build_matrix(spec: &QpaSpec, window: &ConfigWindow) -> Result<TruncatedMatrix> {
    let mut columns = Vec::with_capacity(window.len());
    for c in &window.configs {
        let mut col = Vec::new();
        if window.on_tape(c) {
            for (s, amp) in successors(spec, &window.tape, c)? {
                if let Some(r) = window.index_of(&s) {
                    col.push((r, amp));
                }
            }
        }
        columns.push(col);
    }
    let mut m = TruncatedMatrix::from_columns(window.len(), columns)?;
    m.interior_cols = window.interior_cols.clone();
    m.interior_rows = window.interior_rows.clone();
    m.labels = window
        .configs
        .iter()
        .map(|c| c.display(spec).to_string())
        .collect();
    Ok(m)
}

/// Deviations of a truncated matrix from unitarity on its interior.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitarityReport {
    /// `max |(U*U − I)_ij|` over interior columns `i, j`.
    pub column_deviation: f64,
    /// `max | ‖row_r‖² − 1 |` over interior rows.
    pub row_deviation: f64,
    pub worst_column_pair: Option<(usize, usize)>,
    pub worst_row: Option<usize>,
    pub interior_cols: usize,
    pub interior_rows: usize,
    pub tolerance: f64,
    pub passed: bool,
}

fn max_with_arg<T: Copy>(best: &mut (f64, Option<T>), value: f64, at: T) {
    if value > best.0 {
        *best = (value, Some(at));
    }
}

/// `max |(U*U − I)_ij|` over interior columns, with a worst pair.
pub fn column_gram_deviation(m: &TruncatedMatrix) -> (f64, Option<(usize, usize)>) {
    let mut interior = vec![false; m.cols()];
    for &c in &m.interior_cols {
        interior[c] = true;
    }
    let mut best = (0.0, None);
    for &c in &m.interior_cols {
        let n: f64 = m.column(c).iter().map(|(_, v)| v.norm_sqr()).sum();
        max_with_arg(&mut best, (n - 1.0).abs(), (c, c));
    }
    let mut gram: HashMap<(usize, usize), Complex64> = HashMap::new();
    for row in m.row_lists() {
        let hits: Vec<_> = row.into_iter().filter(|(c, _)| interior[*c]).collect();
        for (i, &(ci, vi)) in hits.iter().enumerate() {
            for &(cj, vj) in &hits[i + 1..] {
                *gram.entry((ci, cj)).or_default() += vi.conj() * vj;
            }
        }
    }
    let mut pairs: Vec<_> = gram.into_iter().collect();
    pairs.sort_by_key(|(k, _)| *k);
    for (k, g) in pairs {
        max_with_arg(&mut best, g.norm(), k);
    }
    best
}

/// `Σ_c U_ic · conj(U_jc)`, i.e. entry `(i, j)` of `UU*`.
pub fn row_inner(m: &TruncatedMatrix, i: usize, j: usize) -> Complex64 {
    let rows = m.row_lists();
    let mut acc = Complex64::default();
    for &(c, a) in &rows[i] {
        acc += a * m.get(j, c).conj();
    }
    acc
}

fn row_norms_sqr(m: &TruncatedMatrix) -> Vec<f64> {
    let mut n = vec![0.0; m.rows()];
    for (r, _, v) in m.triplets() {
        n[r] += v.norm_sqr();
    }
    n
}

pub fn check_truncated_unitarity(m: &TruncatedMatrix, tolerance: f64) -> UnitarityReport {
    let (column_deviation, worst_column_pair) = column_gram_deviation(m);
    let norms = row_norms_sqr(m);
    let mut rows = (0.0, None);
    for &r in &m.interior_rows {
        max_with_arg(&mut rows, (norms[r] - 1.0).abs(), r);
    }
    UnitarityReport {
        column_deviation,
        row_deviation: rows.0,
        worst_column_pair,
        worst_row: rows.1,
        interior_cols: m.interior_cols.len(),
        interior_rows: m.interior_rows.len(),
        tolerance,
        passed: column_deviation <= tolerance && rows.0 <= tolerance,
    }
}

fn require_orthonormal_columns(m: &TruncatedMatrix, tolerance: f64) -> Result<()> {
    let (dev, _) = column_gram_deviation(m);
    if dev > tolerance {
        return Err(Error::Precondition(format!(
            "interior columns are not orthonormal (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

/// Largest interior row norm. Refuses matrices whose interior columns are
/// not orthonormal within `tolerance`.
pub fn row_norm_bound_probe(m: &TruncatedMatrix, tolerance: f64) -> Result<f64> {
    require_orthonormal_columns(m, tolerance)?;
    let norms = row_norms_sqr(m);
    Ok(m.interior_rows
        .iter()
        .map(|&r| norms[r].sqrt())
        .fold(0.0, f64::max))
}

/// Row structure of a column isometry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowStructure {
    /// `max |⟨row_i, row_j⟩|` over distinct interior rows.
    pub max_offdiagonal: f64,
    /// `max min(‖row‖², |‖row‖² − 1|)` over interior rows.
    pub max_zero_one_deviation: f64,
    pub rows_orthogonal: bool,
    pub norms_zero_one: bool,
}

/// Measures how far interior rows are from being pairwise orthogonal and
/// from having norm 0 or 1. Same precondition as [`row_norm_bound_probe`].
pub fn row_structure_probe(m: &TruncatedMatrix, tolerance: f64) -> Result<RowStructure> {
    require_orthonormal_columns(m, tolerance)?;
    let mut interior = vec![false; m.rows()];
    for &r in &m.interior_rows {
        interior[r] = true;
    }
    let mut inner: HashMap<(usize, usize), Complex64> = HashMap::new();
    for c in 0..m.cols() {
        let hits: Vec<_> = m.column(c).iter().filter(|(r, _)| interior[*r]).collect();
        for (i, &&(ri, vi)) in hits.iter().enumerate() {
            for &&(rj, vj) in &hits[i + 1..] {
                *inner.entry((ri, rj)).or_default() += vi * vj.conj();
            }
        }
    }
    let max_offdiagonal = inner.values().map(|v| v.norm()).fold(0.0, f64::max);
    let norms = row_norms_sqr(m);
    let max_zero_one_deviation = m
        .interior_rows
        .iter()
        .map(|&r| norms[r].min((norms[r] - 1.0).abs()))
        .fold(0.0, f64::max);
    Ok(RowStructure {
        max_offdiagonal,
        max_zero_one_deviation,
        rows_orthogonal: max_offdiagonal <= tolerance,
        norms_zero_one: max_zero_one_deviation <= tolerance,
    })
}

/// `max |((AB)C − A(BC))_ij|`.
pub fn banded_associativity_probe(
    a: &TruncatedMatrix,
    b: &TruncatedMatrix,
    c: &TruncatedMatrix,
) -> Result<f64> {
    let left = a.mul(b)?.mul(c)?;
    let right = a.mul(&b.mul(c)?)?;
    left.max_deviation(&right)
}
