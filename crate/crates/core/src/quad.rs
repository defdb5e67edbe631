//! Globally adaptive Simpson integration on finite intervals.
//!
//! The rule samples both endpoints of every segment, so a jump anywhere in a
//! segment shows up in its error estimate. That makes it suitable for the
//! piecewise scale profiles, where interior-node rules can step over a
//! discontinuity sitting close to a segment end.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    refined: f64,
    left: (f64, f64),
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn segment<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Segment {
    let m = 0.5 * (a + b);
    let (fl, fr) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let whole = simpson(a, b, fa, fm, fb);
    let refined = simpson(a, m, fa, fl, fm) + simpson(m, b, fm, fr, fb);
    Segment {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        refined,
        left: (fl, fr),
        error: (refined - whole).abs(),
    }
}

impl Segment {
    fn value(&self) -> f64 {
        self.refined + (self.refined - self.whole) / 15.0
    }
}

/// Integrates `f` over `[a, b]` starting from 1024 equal panels.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    integrate_panels(f, a, b, abs_tol, 1024)
}

/// Integrates `f` over `[a, b]` from `panels` equal segments, bisecting the
/// worst segment until the summed error estimate is below `abs_tol`.
///
/// Features narrower than about a quarter panel can go unseen.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    panels: usize,
) -> Result<f64> {
    const MAX_SEGMENTS: usize = 400_000;
    let panels = panels.max(1);
    let mut heap = BinaryHeap::with_capacity(2 * panels);
    let h = (b - a) / panels as f64;
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=panels {
        let x1 = if i == panels { b } else { a + i as f64 * h };
        let f1 = f(x1);
        let fm = f(0.5 * (x0 + x1));
        heap.push(segment(&mut f, x0, x1, f0, fm, f1));
        x0 = x1;
        f0 = f1;
    }
    let mut total_err: f64 = heap.iter().map(|s| s.error).sum();
    let mut settled = 0.0;
    while total_err > abs_tol {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature(format!(
                "error estimate {total_err:e} above {abs_tol:e} after {MAX_SEGMENTS} segments"
            )));
        }
        let Some(seg) = heap.pop() else { break };
        total_err -= seg.error;
        let m = 0.5 * (seg.a + seg.b);
        if !(seg.a < m && m < seg.b) {
            // below floating-point resolution
            settled += seg.value();
            continue;
        }
        let (fl, fr) = seg.left;
        let left = segment(&mut f, seg.a, m, seg.fa, fl, seg.fm);
        let right = segment(&mut f, m, seg.b, seg.fm, fr, seg.fb);
        total_err += left.error + right.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 4096 == 0 {
            // re-sum to shed accumulated rounding in the running total
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(settled + heap.iter().map(Segment::value).sum::<f64>())
}
