//! Cycle-stepped systolic array simulator.
//!
//! Moves actual operand values through a grid of PE registers one cycle at a
//! time and counts cycles, MACs and SRAM events as they happen. It does its
//! own tiling and shares no code with the closed-form model, so the two can
//! be checked against each other. Limited to desk-scale problems.

use thiserror::Error;

use super::{ArrayDims, Dataflow, LayerStats};
use crate::workload::GemmShape;

pub const MAX_REFERENCE_PES: u64 = 4096;
pub const MAX_REFERENCE_DIM: u64 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TimingError {
    #[error(
        "reference simulation limited to rows·cols ≤ {MAX_REFERENCE_PES} and m, n, k ≤ {MAX_REFERENCE_DIM}; got {dims} array with gemm {gemm}"
    )]
    ScaleGuard { dims: ArrayDims, gemm: GemmShape },
    #[error("operand buffers do not match gemm {0}")]
    OperandShape(GemmShape),
    #[error("output ({row}, {col}) = {got}, direct product gives {want}")]
    FunctionalMismatch {
        row: usize,
        col: usize,
        got: i64,
        want: i64,
    },
}

#[derive(Debug, Clone)]
pub struct ReferenceRun {
    pub stats: LayerStats,
    /// Reconstructed `m x n` output, row-major.
    pub output: Vec<i64>,
    /// Number of PEs performing a MAC in each simulated cycle.
    pub active_trace: Vec<u64>,
}

#[derive(Default)]
struct Counters {
    reads: u64,
    writes: u64,
    trace: Vec<u64>,
    used_pe_folds: u64,
    folds: u64,
}

/// Runs the simulator on a fixed deterministic operand pattern.
pub fn simulate_reference(
    gemm: GemmShape,
    dims: ArrayDims,
    flow: Dataflow,
) -> Result<ReferenceRun, TimingError> {
    let (m, n, k) = (gemm.m as usize, gemm.n as usize, gemm.k as usize);
    let a: Vec<i64> = (0..m * k).map(|i| ((i * 7 + 3) % 11) as i64 - 5).collect();
    let b: Vec<i64> = (0..k * n).map(|i| ((i * 5 + 1) % 13) as i64 - 6).collect();
    simulate_reference_with(gemm, dims, flow, &a, &b)
}

/// Runs the simulator on caller-supplied operands: `a` is `m x k`, `b` is
/// `k x n`, both row-major.
pub fn simulate_reference_with(
    gemm: GemmShape,
    dims: ArrayDims,
    flow: Dataflow,
    a: &[i64],
    b: &[i64],
) -> Result<ReferenceRun, TimingError> {
    if dims.rows * dims.cols > MAX_REFERENCE_PES
        || gemm.m.max(gemm.n).max(gemm.k) > MAX_REFERENCE_DIM
    {
        return Err(TimingError::ScaleGuard { dims, gemm });
    }
    let (m, n, k) = (gemm.m as usize, gemm.n as usize, gemm.k as usize);
    if a.len() != m * k || b.len() != k * n {
        return Err(TimingError::OperandShape(gemm));
    }
    let (rows, cols) = (dims.rows as usize, dims.cols as usize);
    let mut out = vec![0i64; m * n];
    let mut ctr = Counters::default();
    let mut cycles = 0u64;

    match flow {
        Dataflow::OutputStationary => {
            for m0 in (0..m).step_by(rows) {
                for n0 in (0..n).step_by(cols) {
                    let r = rows.min(m - m0);
                    let c = cols.min(n - n0);
                    cycles += os_fold(
                        r,
                        c,
                        k,
                        |i, s| a[(m0 + i) * k + s],
                        |s, j| b[s * n + n0 + j],
                        |i, j, v| out[(m0 + i) * n + n0 + j] = v,
                        &mut ctr,
                    );
                }
            }
        }
        Dataflow::WeightStationary => {
            for k0 in (0..k).step_by(rows) {
                for n0 in (0..n).step_by(cols) {
                    let r = rows.min(k - k0);
                    let c = cols.min(n - n0);
                    cycles += stationary_fold(
                        r,
                        c,
                        m,
                        k0 > 0,
                        // weight tile: row = k index, col = filter
                        |i, j| b[(k0 + i) * n + n0 + j],
                        // stream p = output pixel
                        |p, i| a[p * k + k0 + i],
                        &mut out,
                        |p, j| p * n + n0 + j,
                        &mut ctr,
                    );
                }
            }
        }
        Dataflow::InputStationary => {
            for k0 in (0..k).step_by(rows) {
                for m0 in (0..m).step_by(cols) {
                    let r = rows.min(k - k0);
                    let c = cols.min(m - m0);
                    cycles += stationary_fold(
                        r,
                        c,
                        n,
                        k0 > 0,
                        // input tile: row = k index, col = output pixel
                        |i, j| a[(m0 + j) * k + k0 + i],
                        // stream q = filter
                        |q, i| b[(k0 + i) * n + q],
                        &mut out,
                        |q, j| (m0 + j) * n + q,
                        &mut ctr,
                    );
                }
            }
        }
    }

    for row in 0..m {
        for col in 0..n {
            let want: i64 = (0..k).map(|s| a[row * k + s] * b[s * n + col]).sum();
            let got = out[row * n + col];
            if got != want {
                return Err(TimingError::FunctionalMismatch {
                    row,
                    col,
                    got,
                    want,
                });
            }
        }
    }

    let mac_ops: u64 = ctr.trace.iter().sum();
    let pes = dims.rows * dims.cols;
    let stats = LayerStats {
        cycles,
        mac_ops,
        folds: ctr.folds,
        pes,
        mapping_efficiency: ctr.used_pe_folds as f64 / (pes * ctr.folds) as f64,
        compute_utilization: mac_ops as f64 / (pes * cycles) as f64,
        sram_reads: ctr.reads,
        sram_writes: ctr.writes,
    };
    Ok(ReferenceRun {
        stats,
        output: out,
        active_trace: ctr.trace,
    })
}

/// Output-stationary fold on an `r x c` region: row `i` receives `a(i, s)`
/// skewed by `i` cycles, column `j` receives `b(s, j)` skewed by `j` cycles.
/// Once every PE of a column holds its finished sum, the column shifts its
/// results out of the bottom edge one per cycle.
fn os_fold(
    r: usize,
    c: usize,
    k: usize,
    a: impl Fn(usize, usize) -> i64,
    b: impl Fn(usize, usize) -> i64,
    mut sink: impl FnMut(usize, usize, i64),
    ctr: &mut Counters,
) -> u64 {
    ctr.folds += 1;
    ctr.used_pe_folds += (r * c) as u64;
    // (stream index, value)
    let mut a_reg: Vec<Option<(usize, i64)>> = vec![None; r * c];
    let mut b_reg: Vec<Option<(usize, i64)>> = vec![None; r * c];
    let mut acc = vec![0i64; r * c];
    let mut seen = vec![0usize; r * c];
    let mut done_at: Vec<Option<usize>> = vec![None; c];
    let mut drained = vec![0usize; c];
    let mut written = 0;
    let mut t = 0usize;

    while written < r * c {
        let mut next_a = vec![None; r * c];
        let mut next_b = vec![None; r * c];
        for i in 0..r {
            for j in 0..c {
                next_a[i * c + j] = if j == 0 {
                    t.checked_sub(i).filter(|&s| s < k).map(|s| {
                        ctr.reads += 1;
                        (s, a(i, s))
                    })
                } else {
                    a_reg[i * c + j - 1]
                };
                next_b[i * c + j] = if i == 0 {
                    t.checked_sub(j).filter(|&s| s < k).map(|s| {
                        ctr.reads += 1;
                        (s, b(s, j))
                    })
                } else {
                    b_reg[(i - 1) * c + j]
                };
            }
        }
        a_reg = next_a;
        b_reg = next_b;

        let mut active = 0;
        for idx in 0..r * c {
            if let (Some((sa, va)), Some((sb, vb))) = (a_reg[idx], b_reg[idx]) {
                assert_eq!(sa, sb, "operand skew misaligned at PE {idx}");
                acc[idx] += va * vb;
                seen[idx] += 1;
                active += 1;
            }
        }

        for j in 0..c {
            match done_at[j] {
                Some(done) if done < t && drained[j] < r => {
                    let i = r - 1 - drained[j];
                    sink(i, j, acc[i * c + j]);
                    ctr.writes += 1;
                    drained[j] += 1;
                    written += 1;
                }
                None if (0..r).all(|i| seen[i * c + j] == k) => done_at[j] = Some(t),
                _ => {}
            }
        }

        ctr.trace.push(active);
        t += 1;
    }
    t as u64
}

/// Weight- or input-stationary fold: `r` cycles to shift the stationary
/// tile in from the top, then stream element `p` enters row `i` at cycle
/// `r + p + i` and partial sums flow down each column, leaving the bottom
/// row as finished (or partial) outputs. When `accumulate` is set, the top
/// row picks up the previous k-fold's partial sum from SRAM.
#[allow(clippy::too_many_arguments)]
fn stationary_fold(
    r: usize,
    c: usize,
    stream_len: usize,
    accumulate: bool,
    stationary: impl Fn(usize, usize) -> i64,
    streamed: impl Fn(usize, usize) -> i64,
    out: &mut [i64],
    out_index: impl Fn(usize, usize) -> usize,
    ctr: &mut Counters,
) -> u64 {
    ctr.folds += 1;
    ctr.used_pe_folds += (r * c) as u64;
    let mut held: Vec<Option<i64>> = vec![None; r * c];
    for t in 0..r {
        for i in (1..r).rev() {
            for j in 0..c {
                held[i * c + j] = held[(i - 1) * c + j];
            }
        }
        for (j, slot) in held[..c].iter_mut().enumerate() {
            *slot = Some(stationary(r - 1 - t, j));
            ctr.reads += 1;
        }
        ctr.trace.push(0);
    }
    let held: Vec<i64> = held
        .into_iter()
        .map(|w| w.expect("preload complete"))
        .collect();

    let mut a_reg: Vec<Option<(usize, i64)>> = vec![None; r * c];
    let mut psum: Vec<Option<(usize, i64)>> = vec![None; r * c];
    let mut written = 0;
    let mut t = r;

    while written < stream_len * c {
        let mut next_a = vec![None; r * c];
        for i in 0..r {
            for j in 0..c {
                next_a[i * c + j] = if j == 0 {
                    (t - r).checked_sub(i).filter(|&p| p < stream_len).map(|p| {
                        ctr.reads += 1;
                        (p, streamed(p, i))
                    })
                } else {
                    a_reg[i * c + j - 1]
                };
            }
        }
        a_reg = next_a;

        let mut next_psum = vec![None; r * c];
        let mut active = 0;
        for i in 0..r {
            for j in 0..c {
                let Some((p, x)) = a_reg[i * c + j] else {
                    continue;
                };
                let above = if i == 0 {
                    if accumulate {
                        ctr.reads += 1;
                        out[out_index(p, j)]
                    } else {
                        0
                    }
                } else {
                    let (pa, v) = psum[(i - 1) * c + j].expect("partial sum arrives with operand");
                    assert_eq!(pa, p, "partial sum misaligned at PE ({i}, {j})");
                    v
                };
                next_psum[i * c + j] = Some((p, above + x * held[i * c + j]));
                active += 1;
            }
        }
        psum = next_psum;
        for j in 0..c {
            if let Some((p, v)) = psum[(r - 1) * c + j] {
                out[out_index(p, j)] = v;
                ctr.writes += 1;
                written += 1;
            }
        }

        ctr.trace.push(active);
        t += 1;
    }
    t as u64
}
