use crate::scalar::Real;

/// Implicit domain description: `value > 0` inside, `< 0` outside.
pub trait LevelSet<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T], grad: &mut [T]);

    /// Number of smooth pieces whose pointwise maximum is `value`.
    fn n_components(&self) -> usize {
        1
    }

    fn component_value(&self, _i: usize, x: &[T]) -> T {
        self.value(x)
    }

    fn component_gradient(&self, _i: usize, x: &[T], grad: &mut [T]) {
        self.gradient(x, grad)
    }
}

/// Ball of radius `radius`: `φ(x) = r - |x - c|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sphere<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Real> Sphere<T> {
    pub fn new(center: Vec<T>, radius: T) -> Self {
        Self { center, radius }
    }

    fn distance(&self, x: &[T]) -> T {
        self.center.iter().zip(x).map(|(&c, &y)| (y - c) * (y - c)).sum::<T>().sqrt()
    }
}

impl<T: Real> LevelSet<T> for Sphere<T> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[T]) -> T {
        self.radius - self.distance(x)
    }

    fn gradient(&self, x: &[T], grad: &mut [T]) {
        let r = self.distance(x);
        for (a, g) in grad.iter_mut().enumerate() {
            *g = if r > T::zero() { -(x[a] - self.center[a]) / r } else { T::zero() };
        }
    }
}

/// Union of balls, `φ(x) = max_i (r_i - |x - c_i|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnionOfBalls<T> {
    pub balls: Vec<Sphere<T>>,
}

impl<T: Real> UnionOfBalls<T> {
    fn closest(&self, x: &[T]) -> Option<&Sphere<T>> {
        let mut best: Option<(&Sphere<T>, T)> = None;
        for b in &self.balls {
            let v = b.value(x);
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((b, v));
            }
        }
        best.map(|(b, _)| b)
    }
}

impl<T: Real> LevelSet<T> for UnionOfBalls<T> {
    fn dim(&self) -> usize {
        self.balls.first().map_or(0, |b| b.center.len())
    }

    fn value(&self, x: &[T]) -> T {
        self.balls.iter().map(|b| b.value(x)).fold(T::neg_infinity(), T::max)
    }

    fn gradient(&self, x: &[T], grad: &mut [T]) {
        match self.closest(x) {
            Some(b) => b.gradient(x, grad),
            None => grad.iter_mut().for_each(|g| *g = T::zero()),
        }
    }

    fn n_components(&self) -> usize {
        self.balls.len()
    }

    fn component_value(&self, i: usize, x: &[T]) -> T {
        self.balls[i].value(x)
    }

    fn component_gradient(&self, i: usize, x: &[T], grad: &mut [T]) {
        self.balls[i].gradient(x, grad)
    }
}

/// Half-space `{ x : n·x < offset }`, `φ(x) = offset - n·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Real> HalfSpace<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        Self { normal, offset }
    }
}

impl<T: Real> LevelSet<T> for HalfSpace<T> {
    fn dim(&self) -> usize {
        self.normal.len()
    }

    fn value(&self, x: &[T]) -> T {
        self.offset - crate::scalar::dot(&self.normal, x)
    }

    fn gradient(&self, _x: &[T], grad: &mut [T]) {
        for (g, &n) in grad.iter_mut().zip(&self.normal) {
            *g = -n;
        }
    }
}
