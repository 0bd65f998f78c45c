//! Segment-segment intersection sweep over strip edge polylines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionStatus {
    Clear,
    Crossing,
    /// Some non-adjacent segments come closer than the near-miss band without crossing.
    Indeterminate,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    line: usize,
    index: usize,
    a: (f64, f64),
    b: (f64, f64),
}

impl Segment {
    fn xmin(&self) -> f64 {
        self.a.0.min(self.b.0)
    }
    fn xmax(&self) -> f64 {
        self.a.0.max(self.b.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepReport {
    pub status: IntersectionStatus,
    pub crossings: usize,
    pub near_misses: usize,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn proper_crossing(p: &Segment, q: &Segment) -> bool {
    let d1 = cross(q.a, q.b, p.a);
    let d2 = cross(q.a, q.b, p.b);
    let d3 = cross(p.a, p.b, q.a);
    let d4 = cross(p.a, p.b, q.b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

fn segment_distance(p: &Segment, q: &Segment) -> f64 {
    point_segment_distance(p.a, q.a, q.b)
        .min(point_segment_distance(p.b, q.a, q.b))
        .min(point_segment_distance(q.a, p.a, p.b))
        .min(point_segment_distance(q.b, p.a, p.b))
}

/// Sweep-and-prune over all segments of the given polylines. Segments that
/// share an endpoint on the same polyline are never compared.
pub fn sweep(polylines: &[Vec<(f64, f64)>], band: f64) -> SweepReport {
    let mut segs: Vec<Segment> = polylines
        .iter()
        .enumerate()
        .flat_map(|(line, pts)| {
            pts.windows(2).enumerate().map(move |(index, w)| Segment {
                line,
                index,
                a: w[0],
                b: w[1],
            })
        })
        .collect();
    segs.sort_by(|p, q| p.xmin().total_cmp(&q.xmin()));
    let mut crossings = 0;
    let mut near_misses = 0;
    for i in 0..segs.len() {
        let p = segs[i];
        let (ylo, yhi) = (p.a.1.min(p.b.1) - band, p.a.1.max(p.b.1) + band);
        for q in &segs[i + 1..] {
            if q.xmin() > p.xmax() + band {
                break;
            }
            if q.a.1.min(q.b.1) > yhi || q.a.1.max(q.b.1) < ylo {
                continue;
            }
            if p.line == q.line && p.index.abs_diff(q.index) <= 1 {
                continue;
            }
            if proper_crossing(&p, q) {
                crossings += 1;
            } else if segment_distance(&p, q) < band {
                near_misses += 1;
            }
        }
    }
    let status = if crossings > 0 {
        IntersectionStatus::Crossing
    } else if near_misses > 0 {
        IntersectionStatus::Indeterminate
    } else {
        IntersectionStatus::Clear
    };
    SweepReport {
        status,
        crossings,
        near_misses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_crossing_touching_and_clear() {
        let x = vec![vec![(0.0, 0.0), (2.0, 2.0)], vec![(0.0, 2.0), (2.0, 0.0)]];
        assert_eq!(sweep(&x, 1e-9).status, IntersectionStatus::Crossing);
        let touching = vec![vec![(0.0, 0.0), (2.0, 0.0)], vec![(1.0, 0.0), (1.0, 1.0)]];
        assert_eq!(sweep(&touching, 1e-9).status, IntersectionStatus::Indeterminate);
        let clear = vec![vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.5)], vec![(0.0, 1.0), (2.0, 1.5)]];
        assert_eq!(sweep(&clear, 1e-9).status, IntersectionStatus::Clear);
    }

    #[test]
    fn self_crossing_polyline() {
        let loop_line = vec![vec![(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, -1.0)]];
        let r = sweep(&loop_line, 1e-9);
        assert_eq!(r.status, IntersectionStatus::Crossing);
        assert_eq!(r.crossings, 1);
    }
}
