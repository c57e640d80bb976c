//! Command-line argument parsing for domains, points and maps.

use std::str::FromStr;

use kobageo::dynamics::{HoloMap, Moebius};
use kobageo::{Direction, Domain, DomainSpec, Error, Point, Result, C64};

/// `disk`, `bidisk`, `ball` (in `C^2`), `polydiskN`, `ballN`, a JSON spec, or
/// `@path` to a JSON file.
pub fn domain(arg: &str) -> Result<Domain> {
    let spec = match arg {
        "disk" => DomainSpec::unit_disk(),
        "bidisk" => DomainSpec::unit_polydisk(2),
        "ball" => DomainSpec::unit_ball(2),
        s if s.starts_with('@') => {
            let text = std::fs::read_to_string(&s[1..])
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", &s[1..])))?;
            DomainSpec::from_json(&text)?
        }
        s if s.starts_with('{') => DomainSpec::from_json(s)?,
        s => {
            let sized = |prefix: &str| s.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
            if let Some(d) = sized("polydisk") {
                DomainSpec::unit_polydisk(d)
            } else if let Some(d) = sized("ball") {
                DomainSpec::unit_ball(d)
            } else {
                return Err(Error::Input(format!("unknown domain shorthand {s:?}")));
            }
        }
    };
    Domain::from_spec(&spec)
}

fn numbers(arg: &str) -> Result<Vec<f64>> {
    arg.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("{t:?} is not a number")))
        })
        .collect()
}

/// `2d` numbers are read as `re,im` pairs, `d` numbers as real coordinates.
pub fn coords(arg: &str, dim: usize) -> Result<Vec<C64>> {
    let v = numbers(arg)?;
    if v.len() == 2 * dim {
        Ok(v.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
    } else if v.len() == dim {
        Ok(v.into_iter().map(|x| C64::new(x, 0.0)).collect())
    } else {
        Err(Error::Input(format!(
            "expected {dim} real or {} re,im values, got {}",
            2 * dim,
            v.len()
        )))
    }
}

pub fn point(arg: &str, dim: usize) -> Result<Point> {
    Point::new(coords(arg, dim)?)
}

pub fn direction(arg: &str, dim: usize) -> Result<Direction> {
    Direction::new(coords(arg, dim)?)
}

fn complex(t: &str) -> Result<C64> {
    C64::from_str(t.trim()).map_err(|_| Error::Input(format!("{t:?} is not a complex number")))
}

fn moebius(arg: &str) -> Result<Moebius> {
    let c: Vec<C64> = arg.split(',').map(complex).collect::<Result<_>>()?;
    match c.as_slice() {
        [a, b, cc, d] => Ok(Moebius::new(*a, *b, *cc, *d)),
        _ => Err(Error::Input(format!("a Moebius map needs four coefficients, got {}", c.len()))),
    }
}

/// Map forms:
/// `moebius:a,b,c,d`, `rotation:theta`, `product:a,b,c,d;a,b,c,d`,
/// `affine:s` (anchored at the distinguished boundary point of the domain),
/// `affine:s@x1,y1,...`, or a JSON map.
pub fn map(arg: &str, domain: &Domain) -> Result<HoloMap> {
    if arg.trim_start().starts_with('{') {
        return serde_json::from_str(arg).map_err(|e| Error::Input(format!("map: {e}")));
    }
    let (family, rest) = arg
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("map {arg:?} has no family prefix")))?;
    match family {
        "moebius" => Ok(HoloMap::DiskMoebius(moebius(rest)?)),
        "rotation" => {
            let th = rest
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("{rest:?} is not an angle")))?;
            Ok(HoloMap::DiskMoebius(Moebius::rotation(th)))
        }
        "product" => Ok(HoloMap::PolydiskProduct {
            factors: rest.split(';').map(moebius).collect::<Result<_>>()?,
        }),
        "affine" => {
            let (s, anchor) = match rest.split_once('@') {
                Some((s, a)) => (s, point(a, domain.dim())?),
                None => (
                    rest,
                    domain
                        .p0()
                        .ok_or_else(|| Error::Input("this domain has no default anchor; use affine:s@point".into()))?,
                ),
            };
            let s = s
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("{s:?} is not a contraction factor")))?;
            Ok(HoloMap::AffineContraction { s, anchor })
        }
        f => Err(Error::Input(format!("unknown map family {f:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_reals() {
        assert_eq!(coords("0.5,0.3", 2).unwrap(), vec![C64::new(0.5, 0.0), C64::new(0.3, 0.0)]);
        assert_eq!(coords("0.5,0.3", 1).unwrap(), vec![C64::new(0.5, 0.3)]);
        assert!(coords("1,2,3", 2).is_err());
    }

    #[test]
    fn moebius_shorthand() {
        let d = domain("disk").unwrap();
        let m = map("moebius:2,1,1,2", &d).unwrap();
        assert_eq!(m.apply(&[C64::new(0.0, 0.0)]), vec![C64::new(0.5, 0.0)]);
        assert!(map("moebius:1,2", &d).is_err());
    }
}
