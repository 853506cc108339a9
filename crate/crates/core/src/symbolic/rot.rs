use super::angle::AngleSum;
use super::expr::ScalarExpr;
use super::simplify::{simplify, trig};

/// Symbolic 2-vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec2Sym(pub [ScalarExpr; 2]);

/// Symbolic 2x2 matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2Sym(pub [[ScalarExpr; 2]; 2]);

impl Vec2Sym {
    pub fn new(x: ScalarExpr, y: ScalarExpr) -> Self {
        Vec2Sym([x, y])
    }

    pub fn zero() -> Self {
        Self::new(ScalarExpr::zero(), ScalarExpr::zero())
    }

    pub fn x(&self) -> &ScalarExpr {
        &self.0[0]
    }

    pub fn y(&self) -> &ScalarExpr {
        &self.0[1]
    }

    pub fn sub(&self, other: &Vec2Sym) -> Vec2Sym {
        Vec2Sym::new(self.x() - other.x(), self.y() - other.y()).simplified()
    }

    pub fn scale(&self, s: &ScalarExpr) -> Vec2Sym {
        Vec2Sym::new(self.x() * s, self.y() * s).simplified()
    }

    pub fn dot(&self, other: &Vec2Sym) -> ScalarExpr {
        simplify(&(self.x() * other.x() + self.y() * other.y()))
    }

    pub fn simplified(&self) -> Vec2Sym {
        Vec2Sym::new(simplify(self.x()), simplify(self.y()))
    }

    pub fn is_zero(&self) -> bool {
        self.simplified().0.iter().all(|e| e.is_zero())
    }
}

impl Mat2Sym {
    pub fn identity() -> Self {
        Mat2Sym([
            [ScalarExpr::one(), ScalarExpr::zero()],
            [ScalarExpr::zero(), ScalarExpr::one()],
        ])
    }

    pub fn entry(&self, r: usize, c: usize) -> &ScalarExpr {
        &self.0[r][c]
    }

    pub fn row(&self, r: usize) -> Vec2Sym {
        Vec2Sym::new(self.0[r][0].clone(), self.0[r][1].clone())
    }

    pub fn mul(&self, rhs: &Mat2Sym) -> Mat2Sym {
        let e = |r: usize, c: usize| {
            simplify(&(self.entry(r, 0) * rhs.entry(0, c) + self.entry(r, 1) * rhs.entry(1, c)))
        };
        Mat2Sym([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn apply(&self, v: &Vec2Sym) -> Vec2Sym {
        Vec2Sym::new(self.row(0).dot(v), self.row(1).dot(v))
    }

    pub fn transpose(&self) -> Mat2Sym {
        Mat2Sym([
            [self.0[0][0].clone(), self.0[1][0].clone()],
            [self.0[0][1].clone(), self.0[1][1].clone()],
        ])
    }

    pub fn simplified(&self) -> Mat2Sym {
        Mat2Sym([
            [simplify(&self.0[0][0]), simplify(&self.0[0][1])],
            [simplify(&self.0[1][0]), simplify(&self.0[1][1])],
        ])
    }
}

/// Planar rotation by a symbolic angle, with quarter turns folded into the
/// trig atoms.
pub fn rot(angle: &AngleSum) -> Mat2Sym {
    let c = trig(false, angle);
    let s = trig(true, angle);
    Mat2Sym([[c.clone(), simplify(&-&s)], [s, c]])
}

/// Inverse rotation, equal to `rot(-angle)`.
pub fn transpose_rot(angle: &AngleSum) -> Mat2Sym {
    rot(&-angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{eval, AngleVar, Bindings};

    fn psi(i: usize) -> AngleSum {
        AngleSum::var(AngleVar::yaw(i))
    }

    #[test]
    fn zero_angle_is_identity() {
        assert_eq!(rot(&AngleSum::zero()), Mat2Sym::identity());
        assert_eq!(transpose_rot(&AngleSum::zero()), Mat2Sym::identity());
    }

    #[test]
    fn quarter_turn_rewrite() {
        let m = rot(&psi(1).with_offset(1));
        let s = ScalarExpr::sin(psi(1));
        let c = ScalarExpr::cos(psi(1));
        let expected = Mat2Sym([
            [-s.clone(), -c.clone()],
            [c, -s],
        ]);
        assert_eq!(m, expected.simplified());
    }

    #[test]
    fn composition_adds_angles() {
        let a = psi(1);
        let b = psi(2);
        assert_eq!(rot(&a).mul(&rot(&b)), rot(&(&a + &b)));
        assert_eq!(transpose_rot(&a).mul(&rot(&a)), Mat2Sym::identity());
    }

    #[test]
    fn transpose_matches_negated_angle() {
        let a = psi(1) + AngleSum::var(AngleVar::steer(1, 2)).with_offset(1);
        assert_eq!(transpose_rot(&a), rot(&a).transpose());
        let mut b = Bindings::default();
        b.set_angle(AngleVar::yaw(1), 0.4);
        b.set_angle(AngleVar::steer(1, 2), -1.1);
        let m = transpose_rot(&a).mul(&rot(&a));
        for r in 0..2 {
            for c in 0..2 {
                let v = eval(m.entry(r, c), &b).unwrap();
                assert!((v - if r == c { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }
}
