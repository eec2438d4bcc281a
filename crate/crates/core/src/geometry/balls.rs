use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Sphere, UnionOfBalls};

/// `n` balls of radius `r0 / n` with centers uniform in the box `[lo, hi]^dim`
/// shrunk by one radius on every side.
pub fn random_balls<T: Real>(n: usize, seed: u64, r0: f64, lo: f64, hi: f64, dim: usize) -> UnionOfBalls<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = r0 / n.max(1) as f64;
    let (a, b) = (lo + r, hi - r);
    let balls = (0..n)
        .map(|_| {
            let center = (0..dim).map(|_| T::lit(if b > a { rng.random_range(a..b) } else { 0.5 * (lo + hi) })).collect();
            Sphere::new(center, T::lit(r))
        })
        .collect();
    UnionOfBalls { balls }
}

/// One ball per line: `cx cy [cz] r`, shortest round-trip decimal form.
pub fn write_balls<T: Real>(balls: &UnionOfBalls<T>) -> String {
    let mut s = String::new();
    for b in &balls.balls {
        let fields: Vec<String> = b.center.iter().chain(std::iter::once(&b.radius)).map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", fields.join(" "));
    }
    s
}

pub fn read_balls<T: Real + std::str::FromStr>(text: &str, dim: usize) -> Result<UnionOfBalls<T>> {
    let mut balls = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| Error::BallFormat { line: i + 1, reason: format!("bad number {t:?}") }))
            .collect::<Result<Vec<T>>>()?;
        if vals.len() != dim + 1 {
            return Err(Error::BallFormat { line: i + 1, reason: format!("expected {} fields, found {}", dim + 1, vals.len()) });
        }
        balls.push(Sphere::new(vals[..dim].to_vec(), vals[dim]));
    }
    Ok(UnionOfBalls { balls })
}
