//! Polynomial bump test functions with closed-form Laplacians.

use crate::error::{Error, Result};
use crate::point::{Ball, Point};

/// `φ(x) = (1 - |x-x₀|²/r²)⁴` inside `B_r(x₀)`, zero outside. C³ across the
/// support boundary; the Laplacian is exact, so distributional checks carry
/// no differentiation error on the test-function side.
#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    center: Point,
    radius: f64,
}

impl TestFunction {
    /// The support must lie strictly inside the unit ball.
    pub fn new(center: Point, radius: f64) -> Result<TestFunction> {
        if radius <= 0.0 {
            return Err(Error::Config("bump radius must be positive".into()));
        }
        if center.norm() + radius >= 1.0 {
            return Err(Error::Precondition(format!(
                "bump support B_{radius}({:?}) is not strictly inside B_1",
                center.coords()
            )));
        }
        Ok(TestFunction { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn support(&self) -> Ball {
        Ball::new(self.center, self.radius)
    }

    pub fn value(&self, x: &Point) -> f64 {
        let q = x.sub(&self.center).norm_sq() / (self.radius * self.radius);
        if q >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - q;
        w * w * w * w
    }

    pub fn gradient(&self, x: &Point) -> Point {
        let diff = x.sub(&self.center);
        let rsq = self.radius * self.radius;
        let q = diff.norm_sq() / rsq;
        if q >= 1.0 {
            return Point::zero(x.dim());
        }
        let w = 1.0 - q;
        diff.scale(-8.0 * w * w * w / rsq)
    }

    /// `Δφ = (8/r²) (6q w² - n w³)` with `q = |x-x₀|²/r²`, `w = 1-q`.
    pub fn laplacian(&self, x: &Point) -> f64 {
        let n = x.dim() as f64;
        let rsq = self.radius * self.radius;
        let q = x.sub(&self.center).norm_sq() / rsq;
        if q >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - q;
        8.0 / rsq * (6.0 * q * w * w - n * w * w * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_with_gradient_outside_support() {
        let phi = TestFunction::new(Point::xy(0.2, 0.0), 0.3).unwrap();
        let far = Point::xy(0.6, 0.0);
        assert_eq!(phi.value(&far), 0.0);
        assert_eq!(phi.gradient(&far).norm(), 0.0);
        assert_eq!(phi.laplacian(&far), 0.0);
    }

    #[test]
    fn laplacian_matches_finite_differences() {
        let phi = TestFunction::new(Point::xy(0.1, -0.05), 0.4).unwrap();
        let h = 1e-4;
        for p in [Point::xy(0.15, 0.0), Point::xy(0.3, 0.1), Point::xy(0.1, -0.05)] {
            let mut fd = -4.0 * phi.value(&p);
            for dir in [Point::xy(1.0, 0.0), Point::xy(0.0, 1.0)] {
                fd += phi.value(&p.offset(&dir, h)) + phi.value(&p.offset(&dir, -h));
            }
            fd /= h * h;
            assert!((fd - phi.laplacian(&p)).abs() < 1e-5, "at {:?}", p.coords());
        }
        let phi3 = TestFunction::new(Point::xyz(0.0, 0.1, 0.0), 0.35).unwrap();
        let p = Point::xyz(0.05, 0.2, -0.1);
        let mut fd = -6.0 * phi3.value(&p);
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            let dir = Point::new(&e);
            fd += phi3.value(&p.offset(&dir, h)) + phi3.value(&p.offset(&dir, -h));
        }
        fd /= h * h;
        assert!((fd - phi3.laplacian(&p)).abs() < 1e-5);
    }

    #[test]
    fn support_must_stay_inside_the_ball() {
        assert!(TestFunction::new(Point::xy(0.8, 0.0), 0.3).is_err());
        assert!(TestFunction::new(Point::xy(0.0, 0.0), -0.1).is_err());
    }
}
