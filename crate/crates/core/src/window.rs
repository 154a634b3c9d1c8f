//! Sliding-window maxima used to scatter per-cube values onto cells.
//!
//! Along one axis, cubes of side `k` are identified by their start. A cell `x`
//! is covered by the starts in `[x - k + 1, x]`; the value at `x` is the max of
//! the per-start values over that window intersected with the admissible
//! starts. Monotone deque, O(starts + cells) per axis.

use std::collections::VecDeque;

/// Admissible starts `s_lo .. s_lo + s_count` for side `k`, and the output
/// cells `x_lo .. x_lo + x_len`. Every output cell must be covered by at least
/// one admissible start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Span {
    pub s_lo: usize,
    pub s_count: usize,
    pub x_lo: usize,
    pub x_len: usize,
    pub k: usize,
}

impl Span {
    /// Side-`k` cubes contained in `[r0, r0 + m)`.
    pub fn inside(r0: usize, m: usize, k: usize) -> Span {
        Span {
            s_lo: r0,
            s_count: m + 1 - k,
            x_lo: r0,
            x_len: m,
            k,
        }
    }

    /// Side-`k` cubes of `[0, n)` that meet `[r0, r0 + m)`.
    pub fn meeting(n: usize, r0: usize, m: usize, k: usize) -> Span {
        let s_lo = (r0 + 1).saturating_sub(k);
        let s_hi = (n - k).min(r0 + m - 1);
        Span {
            s_lo,
            s_count: s_hi + 1 - s_lo,
            x_lo: r0,
            x_len: m,
            k,
        }
    }

    /// Degenerate span for the unused second axis in dimension 1.
    pub fn unit() -> Span {
        Span {
            s_lo: 0,
            s_count: 1,
            x_lo: 0,
            x_len: 1,
            k: 1,
        }
    }
}

pub(crate) fn cover_max_1d(starts: &[f64], span: Span) -> Vec<f64> {
    debug_assert_eq!(starts.len(), span.s_count);
    let s_hi = span.s_lo + span.s_count - 1;
    let mut out = Vec::with_capacity(span.x_len);
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next = span.s_lo;
    for x in span.x_lo..span.x_lo + span.x_len {
        let hi = x.min(s_hi);
        while next <= hi {
            while let Some(&back) = deque.back() {
                if starts[back - span.s_lo] <= starts[next - span.s_lo] {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(next);
            next += 1;
        }
        let lo = (x + 1).saturating_sub(span.k).max(span.s_lo);
        while let Some(&front) = deque.front() {
            if front < lo {
                deque.pop_front();
            } else {
                break;
            }
        }
        let front = *deque.front().expect("every output cell is covered");
        out.push(starts[front - span.s_lo]);
    }
    out
}

/// `starts` is row-major `rows.s_count x cols.s_count`; output is row-major
/// `rows.x_len x cols.x_len`.
pub(crate) fn cover_max_2d(starts: &[f64], rows: Span, cols: Span) -> Vec<f64> {
    debug_assert_eq!(starts.len(), rows.s_count * cols.s_count);
    let (sr, sc) = (rows.s_count, cols.s_count);
    let (xr, xc) = (rows.x_len, cols.x_len);
    let mut along_cols = vec![0.0; sr * xc];
    for r in 0..sr {
        let line = cover_max_1d(&starts[r * sc..(r + 1) * sc], cols);
        along_cols[r * xc..(r + 1) * xc].copy_from_slice(&line);
    }
    let mut out = vec![0.0; xr * xc];
    let mut column = vec![0.0; sr];
    for c in 0..xc {
        for r in 0..sr {
            column[r] = along_cols[r * xc + c];
        }
        for (i, v) in cover_max_1d(&column, rows).into_iter().enumerate() {
            out[i * xc + c] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(starts: &[f64], span: Span) -> Vec<f64> {
        (span.x_lo..span.x_lo + span.x_len)
            .map(|x| {
                (span.s_lo..span.s_lo + span.s_count)
                    .filter(|&s| s <= x && x < s + span.k)
                    .map(|s| starts[s - span.s_lo])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    fn values(count: usize, salt: usize) -> Vec<f64> {
        (0..count)
            .map(|s| ((s * 7 + salt) % 5) as f64 - 0.5 * s as f64)
            .collect()
    }

    #[test]
    fn whole_axis_matches_brute_force() {
        let n = 9;
        for k in 1..=n {
            let span = Span::inside(0, n, k);
            let starts = values(span.s_count, k);
            assert_eq!(cover_max_1d(&starts, span), brute(&starts, span), "k = {k}");
        }
    }

    #[test]
    fn sub_ranges_match_brute_force() {
        let n = 12;
        for r0 in 0..n {
            for m in 1..=n - r0 {
                for k in 1..=m {
                    let span = Span::inside(r0, m, k);
                    let starts = values(span.s_count, r0 + k);
                    assert_eq!(cover_max_1d(&starts, span), brute(&starts, span));
                }
                for k in 1..=n {
                    let span = Span::meeting(n, r0, m, k);
                    let starts = values(span.s_count, m + k);
                    assert_eq!(cover_max_1d(&starts, span), brute(&starts, span));
                }
            }
        }
    }

    #[test]
    fn two_dimensional_matches_brute_force() {
        let n = 6;
        for k in 1..=n {
            let rows = Span::meeting(n, 1, 3, k);
            let cols = Span::meeting(n, 2, 3, k);
            let starts = values(rows.s_count * cols.s_count, k);
            let got = cover_max_2d(&starts, rows, cols);
            for i in 0..rows.x_len {
                for j in 0..cols.x_len {
                    let (x, y) = (rows.x_lo + i, cols.x_lo + j);
                    let mut want = f64::NEG_INFINITY;
                    for si in 0..rows.s_count {
                        for sj in 0..cols.s_count {
                            let (s, t) = (rows.s_lo + si, cols.s_lo + sj);
                            if s <= x && x < s + k && t <= y && y < t + k {
                                want = want.max(starts[si * cols.s_count + sj]);
                            }
                        }
                    }
                    assert_eq!(got[i * cols.x_len + j], want);
                }
            }
        }
    }
}
