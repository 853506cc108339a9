use super::integrate::Trajectory;
use crate::vehicle::Point;

/// Yaw rates below this magnitude mask the pointwise ratio.
pub const DEFAULT_EPS_YAW: f64 = 1e-3;

/// Rearward amplification of unit `j` relative to unit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RwaSeries {
    pub i: usize,
    pub j: usize,
    /// `psi_dot_j / psi_dot_i`, `None` where `|psi_dot_i| < eps_yaw`.
    pub pointwise: Vec<Option<f64>>,
    /// `max |psi_dot_j| / max |psi_dot_i|`; `None` when unit `i` never turns.
    pub peak_ratio: Option<f64>,
    pub peak_time_i: f64,
    pub peak_time_j: f64,
}

impl RwaSeries {
    /// Time by which the peak yaw rate of `j` trails that of `i`.
    pub fn peak_lag(&self) -> f64 {
        self.peak_time_j - self.peak_time_i
    }

    pub fn valid_count(&self) -> usize {
        self.pointwise.iter().filter(|v| v.is_some()).count()
    }
}

fn peak(times: &[f64], series: &[f64]) -> (f64, f64) {
    let mut best = (0.0, times.first().copied().unwrap_or(0.0));
    for (t, v) in times.iter().zip(series) {
        if v.abs() > best.0 {
            best = (v.abs(), *t);
        }
    }
    best
}

pub fn rwa(traj: &Trajectory, i: usize, j: usize) -> RwaSeries {
    rwa_with(traj, i, j, DEFAULT_EPS_YAW)
}

/// # Panics
/// If `i` or `j` is not a unit of the trajectory.
pub fn rwa_with(traj: &Trajectory, i: usize, j: usize, eps_yaw: f64) -> RwaSeries {
    assert!(i >= 1 && j >= 1 && i <= traj.units() && j <= traj.units(), "unit index out of range");
    let (ri, rj) = (traj.yaw_rate_series(i), traj.yaw_rate_series(j));
    let pointwise = ri
        .iter()
        .zip(&rj)
        .map(|(a, b)| (a.abs() >= eps_yaw).then(|| b / a))
        .collect();
    let (pi, ti) = peak(&traj.times, &ri);
    let (pj, tj) = peak(&traj.times, &rj);
    RwaSeries {
        i,
        j,
        pointwise,
        peak_ratio: (pi >= eps_yaw).then(|| pj / pi),
        peak_time_i: ti,
        peak_time_j: tj,
    }
}

struct Polyline {
    segs: Vec<(Point, Point)>,
    first: Option<Point>,
}

impl Polyline {
    fn new(path: &[Point]) -> Self {
        let segs = path
            .windows(2)
            .filter(|w| (w[1] - w[0]).norm() > 0.0)
            .map(|w| (w[0], w[1] - w[0]))
            .collect();
        Polyline { segs, first: path.first().copied() }
    }

    fn signed_distance(&self, q: Point) -> f64 {
        if self.segs.is_empty() {
            return self.first.map_or(0.0, |p| (q - p).norm());
        }
        let last = self.segs.len() - 1;
        let (qx, qy) = (q.x, q.y);
        let (mut best, mut side) = (f64::INFINITY, 0.0);
        for (s, (a, d)) in self.segs.iter().enumerate() {
            let (rx, ry) = (qx - a.x, qy - a.y);
            let mut t = (rx * d.x + ry * d.y) / (d.x * d.x + d.y * d.y);
            if s > 0 {
                t = t.max(0.0);
            }
            if s < last {
                t = t.min(1.0);
            }
            let (ex, ey) = (rx - d.x * t, ry - d.y * t);
            let dist2 = ex * ex + ey * ey;
            if dist2 < best {
                best = dist2;
                side = d.x * ey - d.y * ex;
            }
        }
        let dist = best.sqrt();
        if side < 0.0 {
            -dist
        } else {
            dist
        }
    }
}

/// Signed distance from `q` to the polyline `path`, positive on the left of
/// the direction of travel. The first and last segments extend to infinity.
pub fn signed_distance_to_path(path: &[Point], q: Point) -> f64 {
    Polyline::new(path).signed_distance(q)
}

/// Lateral deviation of `target`'s path from `reference`'s path, per sample.
pub fn offtracking_paths(reference: &[Point], target: &[Point]) -> Vec<f64> {
    let line = Polyline::new(reference);
    target.iter().map(|q| line.signed_distance(*q)).collect()
}

/// Offtracking of unit `target_unit` against `reference_unit`, using each
/// unit's frame origin (wheel 1) as its reference point.
pub fn offtracking(traj: &Trajectory, reference_unit: usize, target_unit: usize) -> Vec<f64> {
    offtracking_paths(&traj.unit_path(reference_unit), &traj.unit_path(target_unit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_polyline() {
        let path = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert_eq!(signed_distance_to_path(&path, Point::new(0.5, 1.0)), 1.0);
        assert_eq!(signed_distance_to_path(&path, Point::new(1.5, -2.0)), -2.0);
        // Beyond the ends the path continues as a line.
        assert_eq!(signed_distance_to_path(&path, Point::new(-3.0, 0.5)), 0.5);
        assert_eq!(signed_distance_to_path(&path, Point::new(5.0, -0.5)), -0.5);
    }

    #[test]
    fn corner_uses_nearest_segment() {
        let path = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)];
        let d = signed_distance_to_path(&path, Point::new(0.5, 0.2));
        assert!((d - 0.2).abs() < 1e-15);
        let d = signed_distance_to_path(&path, Point::new(0.9, 0.5));
        assert!((d - 0.1).abs() < 1e-15);
    }
}
