// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON point files.

use std::fs;
use std::path::Path;

use rsdual::dual::check_closed_chamber;
use rsdual::rs_model::{canonicalize, lax_rs, wrap_two_pi};
use rsdual::{Coupling, PointP, PointPhat, PointPhatC, ToleranceConfig, C64};
use serde::{Deserialize, Serialize};

use crate::{malformed, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    P,
    Phat,
    PhatC,
}

/// Coordinates of one point; exactly the fields of the file's space are set.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Coords {
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qhat: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phat: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<[f64; 2]>>,
    #[serde(rename = "Z", skip_serializing_if = "Option::is_none")]
    z_big: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    n: usize,
    x: f64,
    space: Space,
    points: Vec<Coords>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    P(PointP),
    Phat(PointPhat),
    PhatC(PointPhatC),
}

#[derive(Debug, Clone)]
pub struct PointFile {
    pub n: usize,
    pub x: Coupling,
    pub space: Space,
    pub points: Vec<Point>,
}

fn need<T>(v: Option<T>, name: &str, space: Space) -> Result<T, Failure> {
    v.ok_or_else(|| malformed(format!("{space:?} point lacks '{name}'")))
}

fn check_len(v: &[f64], n: usize, name: &str) -> Result<(), Failure> {
    if v.len() != n {
        return Err(malformed(format!(
            "'{name}' has {} entries, expected {n}",
            v.len()
        )));
    }
    if v.iter().any(|a| !a.is_finite()) {
        return Err(malformed(format!("'{name}' has a non-finite entry")));
    }
    Ok(())
}

fn load_point(
    c: Coords,
    n: usize,
    x: Coupling,
    space: Space,
    tol: &ToleranceConfig,
) -> Result<Point, Failure> {
    let foreign = match space {
        Space::P => c.qhat.is_some() || c.phat.is_some() || c.z.is_some() || c.z_big.is_some(),
        Space::Phat => c.q.is_some() || c.p.is_some() || c.z.is_some() || c.z_big.is_some(),
        Space::PhatC => c.q.is_some() || c.p.is_some() || c.qhat.is_some() || c.phat.is_some(),
    };
    if foreign {
        return Err(malformed(format!(
            "coordinates of another space in a {space:?} point"
        )));
    }
    match space {
        Space::P => {
            let (q, p) = (need(c.q, "q", space)?, need(c.p, "p", space)?);
            check_len(&q, n, "q")?;
            check_len(&p, n, "p")?;
            let pt = canonicalize(&PointP::new(q, p).map_err(malformed)?).0;
            lax_rs(&pt, x, tol).map_err(malformed)?;
            Ok(Point::P(pt))
        }
        Space::Phat => {
            let (qhat, phat) = (need(c.qhat, "qhat", space)?, need(c.phat, "phat", space)?);
            check_len(&qhat, n, "qhat")?;
            check_len(&phat, n, "phat")?;
            check_closed_chamber(&phat, x, tol).map_err(malformed)?;
            Ok(Point::Phat(
                PointPhat::new(qhat.into_iter().map(wrap_two_pi).collect(), phat)
                    .map_err(malformed)?,
            ))
        }
        Space::PhatC => {
            let (z, big) = (need(c.z, "z", space)?, need(c.z_big, "Z", space)?);
            if z.len() + 1 != n {
                return Err(malformed(format!(
                    "'z' has {} entries, expected {}",
                    z.len(),
                    n.saturating_sub(1)
                )));
            }
            if z.iter().flatten().any(|a| !a.is_finite()) {
                return Err(malformed("'z' has a non-finite entry"));
            }
            let z = z.iter().map(|[re, im]| C64::new(*re, *im)).collect();
            Ok(Point::PhatC(
                PointPhatC::new(z, C64::new(big[0], big[1])).map_err(malformed)?,
            ))
        }
    }
}

impl PointFile {
    /// Reads and validates a point file. `P` points are brought to canonical
    /// form and `q̂` is wrapped into `[0, 2π)`.
    pub fn read(path: &Path, tol: &ToleranceConfig) -> Result<Self, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
        Self::parse(&text, tol)
    }

    pub fn parse(text: &str, tol: &ToleranceConfig) -> Result<Self, Failure> {
        let raw: RawFile =
            serde_json::from_str(text).map_err(|e| malformed(format!("point file: {e}")))?;
        if raw.n == 0 {
            return Err(malformed("n must be positive"));
        }
        let x = Coupling::new(raw.x).map_err(malformed)?;
        let points = raw
            .points
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                load_point(c, raw.n, x, raw.space, tol)
                    .map_err(|e| malformed(format!("point {i}: {}", message(&e))))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            n: raw.n,
            x,
            space: raw.space,
            points,
        })
    }

    pub fn to_json(&self) -> String {
        let points = self
            .points
            .iter()
            .map(|pt| match pt {
                Point::P(pt) => Coords {
                    q: Some(pt.q.clone()),
                    p: Some(pt.p.clone()),
                    ..Default::default()
                },
                Point::Phat(pt) => Coords {
                    qhat: Some(pt.q_hat.clone()),
                    phat: Some(pt.p_hat.clone()),
                    ..Default::default()
                },
                Point::PhatC(pt) => Coords {
                    z: Some(pt.z.iter().map(|c| [c.re, c.im]).collect()),
                    z_big: Some([pt.z_big.re, pt.z_big.im]),
                    ..Default::default()
                },
            })
            .collect();
        let raw = RawFile {
            n: self.n,
            x: self.x.get(),
            space: self.space,
            points,
        };
        serde_json::to_string_pretty(&raw).expect("point files serialize") + "\n"
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        fs::write(path, self.to_json())
            .map_err(|e| Failure::Numerical(format!("{}: {e}", path.display())))
    }
}

fn message(f: &Failure) -> String {
    match f {
        Failure::Checks => "failed checks".into(),
        Failure::Numerical(m) | Failure::Malformed(m) => m.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_each_space_and_round_trips() {
        let tol = ToleranceConfig::default();
        for text in [
            r#"{"n":2,"x":0.5,"space":"P","points":[{"q":[0.3,2.0],"p":[0.1,-0.2]}]}"#,
            r#"{"n":2,"x":0.5,"space":"Phat","points":[{"qhat":[7.0,1.0],"phat":[1.0,-1.0]}]}"#,
            r#"{"n":2,"x":0.5,"space":"PhatC","points":[{"z":[[0.0,0.0]],"Z":[1.0,0.5]}]}"#,
        ] {
            let f = PointFile::parse(text, &tol).unwrap();
            let g = PointFile::parse(&f.to_json(), &tol).unwrap();
            assert_eq!(f.points, g.points);
        }
        let f = PointFile::parse(
            r#"{"n":2,"x":0.5,"space":"P","points":[{"q":[0.3,2.0],"p":[0.1,-0.2]}]}"#,
            &tol,
        )
        .unwrap();
        assert_eq!(
            f.points[0],
            Point::P(PointP {
                q: vec![2.0, 0.3],
                p: vec![-0.2, 0.1]
            })
        );
    }

    #[test]
    fn rejects_malformed_points() {
        let tol = ToleranceConfig::default();
        for text in [
            r#"{"n":2,"x":0.5,"space":"P","points":[{"q":[0.3],"p":[0.1,-0.2]}]}"#,
            r#"{"n":2,"x":0.5,"space":"P","points":[{"q":[0.3,0.3],"p":[0.1,-0.2]}]}"#,
            r#"{"n":2,"x":0.5,"space":"P","points":[{"q":[0.3,2.0],"p":[0.1,-0.2],"phat":[1,0]}]}"#,
            r#"{"n":2,"x":0.5,"space":"Phat","points":[{"qhat":[0,1],"phat":[0.1,0.0]}]}"#,
            r#"{"n":2,"x":0.0,"space":"P","points":[]}"#,
            r#"{"n":2,"x":0.5,"space":"Q","points":[]}"#,
            r#"{"n":2,"x":0.5,"space":"PhatC","points":[{"z":[[0,0]],"Z":[0,0]}]}"#,
        ] {
            assert!(
                matches!(PointFile::parse(text, &tol), Err(Failure::Malformed(_))),
                "{text}"
            );
        }
    }
}
