//! Exact rational points and orientation predicates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    pub fn new(x: Q, y: Q) -> Self {
        Pt { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Pt { x: Q::from_integer(BigInt::from(x)), y: Q::from_integer(BigInt::from(y)) }
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn midpoint(&self, o: &Pt) -> Pt {
        let two = Q::from_integer(BigInt::from(2));
        Pt { x: (&self.x + &o.x) / &two, y: (&self.y + &o.y) / two }
    }

    pub fn centroid(a: &Pt, b: &Pt, c: &Pt) -> Pt {
        let three = Q::from_integer(BigInt::from(3));
        Pt { x: (&a.x + &b.x + &c.x) / &three, y: (&a.y + &b.y + &c.y) / three }
    }

    /// Approximate coordinates for display.
    pub fn to_f64(&self) -> (f64, f64) {
        (q_to_f64(&self.x), q_to_f64(&self.y))
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Writes a rational as `p` or `p/q`.
pub fn q_to_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseQError(pub String);

impl fmt::Display for ParseQError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad rational {:?}", self.0)
    }
}

/// Parses `p` or `p/q` with a nonzero denominator.
pub fn parse_q(s: &str) -> Result<Q, ParseQError> {
    let err = || ParseQError(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| err())?;
    let d = BigInt::from_str(d).map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

pub fn cross(u: &Pt, v: &Pt) -> Q {
    &u.x * &v.y - &u.y * &v.x
}

/// Sign of the turn `a -> b -> c`: `Greater` for counter-clockwise.
pub fn orient(a: &Pt, b: &Pt, c: &Pt) -> Ordering {
    cross(&b.sub(a), &c.sub(a)).cmp(&Q::zero())
}

/// Whether `p` lies on the closed segment `ab`.
pub fn on_segment(a: &Pt, b: &Pt, p: &Pt) -> bool {
    orient(a, b, p) == Ordering::Equal
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Whether closed segments `ab` and `cd` share a point.
pub fn segments_intersect(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal && o3 != Ordering::Equal && o4 != Ordering::Equal {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Whether `p` is strictly inside triangle `abc` (any orientation).
pub fn strictly_inside(a: &Pt, b: &Pt, c: &Pt, p: &Pt) -> bool {
    let (o1, o2, o3) = (orient(a, b, p), orient(b, c, p), orient(c, a, p));
    o1 != Ordering::Equal && o1 == o2 && o2 == o3
}

fn upper(v: &Pt) -> bool {
    v.y.is_positive() || (v.y.is_zero() && v.x.is_positive())
}

/// Counter-clockwise angular order of nonzero direction vectors starting at
/// the positive x-axis.
pub fn angle_cmp(u: &Pt, v: &Pt) -> Ordering {
    match (upper(u), upper(v)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => Q::zero().cmp(&cross(u, v)),
    }
}

/// Whether direction `d` lies strictly inside the counter-clockwise sweep from
/// `from` to `to`. Equal `from` and `to` denote a full turn.
pub fn ccw_between(from: &Pt, d: &Pt, to: &Pt) -> bool {
    let same = |u: &Pt, v: &Pt| cross(u, v).is_zero() && (&u.x * &v.x + &u.y * &v.y).is_positive();
    if same(from, d) || same(to, d) {
        return false;
    }
    if same(from, to) {
        return true;
    }
    // Measure angles relative to `from`.
    // Rotate so that `from` maps to the positive x-axis (up to scaling).
    let rel = |v: &Pt| Pt { x: &v.x * &from.x + &v.y * &from.y, y: &v.y * &from.x - &v.x * &from.y };
    angle_cmp(&rel(d), &rel(to)) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicates() {
        let (a, b, c) = (Pt::int(0, 0), Pt::int(4, 0), Pt::int(0, 4));
        assert_eq!(orient(&a, &b, &c), Ordering::Greater);
        assert!(strictly_inside(&a, &b, &c, &Pt::int(1, 1)));
        assert!(!strictly_inside(&a, &b, &c, &Pt::int(2, 0)));
        assert!(segments_intersect(&a, &Pt::int(4, 4), &b, &c));
        assert!(!segments_intersect(&a, &b, &Pt::int(0, 1), &Pt::int(4, 1)));
        assert!(segments_intersect(&a, &b, &Pt::int(4, 0), &Pt::int(5, 5)));
        assert!(segments_intersect(&a, &Pt::int(2, 0), &Pt::int(1, 0), &Pt::int(3, 0)));
    }

    #[test]
    fn angular_sweeps() {
        let e = Pt::int(1, 0);
        let n = Pt::int(0, 1);
        let w = Pt::int(-1, 0);
        let s = Pt::int(0, -1);
        assert!(ccw_between(&e, &Pt::int(1, 1), &n));
        assert!(!ccw_between(&n, &Pt::int(1, 1), &e));
        assert!(ccw_between(&n, &s, &e));
        assert!(ccw_between(&e, &w, &e));
        assert!(!ccw_between(&e, &e, &e));
        assert!(ccw_between(&e, &n, &w) && !ccw_between(&w, &n, &e));
        assert_eq!(angle_cmp(&e, &n), Ordering::Less);
        assert_eq!(angle_cmp(&s, &w), Ordering::Greater);
    }

    #[test]
    fn rationals() {
        assert_eq!(q_to_string(&parse_q("6/4").unwrap()), "3/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
