use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use super::geom::{orient, parse_q, Pt};

#[derive(Debug, Error)]
pub enum PointParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("point {0}: expected [x, y] with integer or \"p/q\" coordinates")]
    Shape(usize),
    #[error("point {0}: {1}")]
    Coordinate(usize, String),
}

/// `count` distinct integer points, no three collinear, from a seeded stream.
pub fn random_points(count: usize, seed: u64) -> Vec<Pt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 64 + 16 * count as i64;
    let mut out: Vec<Pt> = Vec::with_capacity(count);
    while out.len() < count {
        let p = Pt::int(rng.gen_range(0..side), rng.gen_range(0..side));
        let clash = out.contains(&p)
            || out.iter().enumerate().any(|(i, a)| out[i + 1..].iter().any(|b| orient(a, b, &p).is_eq()));
        if !clash {
            out.push(p);
        }
    }
    out
}

/// Parses `[[x, y], ...]` or `{"points": [[x, y], ...]}`.
pub fn parse_points(text: &str) -> Result<Vec<Pt>, PointParseError> {
    let v: Value = serde_json::from_str(text)?;
    let list = match &v {
        Value::Array(a) => a,
        Value::Object(o) => match o.get("points") {
            Some(Value::Array(a)) if o.len() == 1 => a,
            _ => return Err(PointParseError::Shape(0)),
        },
        _ => return Err(PointParseError::Shape(0)),
    };
    list.iter()
        .enumerate()
        .map(|(i, p)| {
            let Some([x, y]) = p.as_array().and_then(|a| <&[Value; 2]>::try_from(a.as_slice()).ok()) else {
                return Err(PointParseError::Shape(i));
            };
            let coord = |c: &Value| match c {
                Value::Number(n) => n
                    .as_i64()
                    .map(|n| Pt::int(n, 0).x)
                    .ok_or_else(|| PointParseError::Coordinate(i, format!("{n} is not an integer"))),
                Value::String(s) => parse_q(s).map_err(|e| PointParseError::Coordinate(i, e.to_string())),
                _ => Err(PointParseError::Shape(i)),
            };
            Ok(Pt::new(coord(x)?, coord(y)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_are_general() {
        let p = random_points(12, 7);
        assert_eq!(p.len(), 12);
        assert_eq!(p, random_points(12, 7));
        assert_ne!(p, random_points(12, 8));
    }

    #[test]
    fn parses_both_shapes() {
        let a = parse_points(r#"[[0, 0], ["1/2", 3]]"#).unwrap();
        assert_eq!(a[1], Pt::new(parse_q("1/2").unwrap(), parse_q("3").unwrap()));
        assert_eq!(parse_points(r#"{"points": [[1, 2]]}"#).unwrap(), vec![Pt::int(1, 2)]);
        assert!(parse_points(r#"[[1]]"#).is_err());
        assert!(parse_points(r#"[[1, "x"]]"#).is_err());
        assert!(parse_points(r#"[[1.5, 2]]"#).is_err());
        assert!(parse_points(r#"{"pts": []}"#).is_err());
    }
}
