//! Newton polygons: lower convex hulls of integer point sets, their edges
//! with exact rational slopes, and JSON/SVG renderings.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact slope of an edge.
pub type Slope = Ratio<i64>;

/// `"p/q"`, or `"p"` for integral values.
pub fn format_slope(s: &Slope) -> String {
    if *s.denom() == 1 {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Inverse of [`format_slope`].
pub fn parse_slope(text: &str) -> Option<Slope> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Ratio::new(n, d))
        }
        None => Some(Ratio::from_integer(text.trim().parse().ok()?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub length: i64,
    pub slope: Slope,
}

impl Edge {
    pub fn to_json(&self) -> EdgeJson {
        EdgeJson { length: self.length, slope: format_slope(&self.slope) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub length: i64,
    pub slope: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygonJson {
    pub vertices: Vec<[i64; 2]>,
    pub edges: Vec<EdgeJson>,
}

/// A point whose y-coordinate is either known or only bounded from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullPoint {
    Known(i64, i64),
    AtLeast(i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(i64, i64)>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    let (ax, ay) = ((a.0 - o.0) as i128, (a.1 - o.1) as i128);
    let (bx, by) = ((b.0 - o.0) as i128, (b.1 - o.1) as i128);
    ax * by - ay * bx
}

impl NewtonPolygon {
    /// Lower convex hull by the monotone chain; collinear points are not vertices.
    /// Several points with the same x keep only the lowest.
    pub fn from_points(points: &[(i64, i64)]) -> Self {
        let mut pts: Vec<(i64, i64)> = points.to_vec();
        pts.sort_unstable();
        pts.dedup_by(|b, a| a.0 == b.0);
        let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        NewtonPolygon { vertices: hull }
    }

    /// Hull of the known points, provided every lower-bounded point lies on
    /// or above it (so that the true hull cannot differ). Otherwise reports
    /// the index of the first offending point.
    pub fn from_bounded_points(points: &[HullPoint]) -> Result<Self> {
        let known: Vec<(i64, i64)> = points
            .iter()
            .filter_map(|p| match *p {
                HullPoint::Known(x, y) => Some((x, y)),
                HullPoint::AtLeast(..) => None,
            })
            .collect();
        let np = Self::from_points(&known);
        for p in points {
            if let HullPoint::AtLeast(x, y) = *p {
                let ok = match np.height_at(x) {
                    Some(h) => Ratio::from_integer(y) >= h,
                    None => false,
                };
                if !ok {
                    return Err(Error::AmbiguousValuation { index: x.max(0) as usize });
                }
            }
        }
        Ok(np)
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.vertices
            .windows(2)
            .map(|w| Edge { length: w[1].0 - w[0].0, slope: Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0) })
            .collect()
    }

    pub fn slopes(&self) -> Vec<Slope> {
        self.edges().iter().map(|e| e.slope).collect()
    }

    /// Vertices where two edges meet.
    pub fn break_points(&self) -> &[(i64, i64)] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    /// Height of the polygon above `x`; `None` outside its x-range.
    pub fn height_at(&self, x: i64) -> Option<Ratio<i64>> {
        let first = self.vertices.first()?;
        let last = self.vertices.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        if self.vertices.len() == 1 {
            return Some(Ratio::from_integer(first.1));
        }
        let w = self.vertices.windows(2).find(|w| x >= w[0].0 && x <= w[1].0)?;
        let slope = Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0);
        Some(Ratio::from_integer(w[0].1) + slope * (x - w[0].0))
    }

    pub fn to_json(&self) -> NewtonPolygonJson {
        NewtonPolygonJson {
            vertices: self.vertices.iter().map(|&(x, y)| [x, y]).collect(),
            edges: self.edges().iter().map(Edge::to_json).collect(),
        }
    }

    /// SVG 1.1 drawing with x = t-degree and y = σ-valuation growing upwards.
    pub fn to_svg(&self, points: &[(i64, i64)], title: &str) -> String {
        let all: Vec<(i64, i64)> = points.iter().chain(self.vertices.iter()).copied().collect();
        let (min_x, max_x) =
            (all.iter().map(|p| p.0).min().unwrap_or(0).min(0), all.iter().map(|p| p.0).max().unwrap_or(1).max(1));
        let (min_y, max_y) =
            (all.iter().map(|p| p.1).min().unwrap_or(0).min(0), all.iter().map(|p| p.1).max().unwrap_or(1).max(1));
        let unit = 60i64;
        let margin = 50i64;
        let width = (max_x - min_x) * unit + 2 * margin;
        let height = (max_y - min_y) * unit + 2 * margin;
        let px = |x: i64| margin + (x - min_x) * unit;
        let py = |y: i64| margin + (max_y - y) * unit;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(out, "  <title>{}</title>", escape(title));
        for x in min_x..=max_x {
            let _ = writeln!(
                out,
                r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#dddddd" stroke-width="1"/>"##,
                px(x),
                py(max_y),
                py(min_y)
            );
        }
        for y in min_y..=max_y {
            let _ = writeln!(
                out,
                r##"  <line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="#dddddd" stroke-width="1"/>"##,
                py(y),
                px(min_x),
                px(max_x)
            );
        }
        let _ = writeln!(
            out,
            r##"  <line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#000000" stroke-width="1"/>"##,
            px(min_x),
            py(0),
            px(max_x)
        );
        let _ = writeln!(
            out,
            r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#000000" stroke-width="1"/>"##,
            px(0),
            py(max_y),
            py(min_y)
        );
        let poly: Vec<String> = self.vertices.iter().map(|&(x, y)| format!("{},{}", px(x), py(y))).collect();
        let _ = writeln!(
            out,
            r##"  <polyline points="{}" fill="none" stroke="#1f4e9e" stroke-width="3"/>"##,
            poly.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(out, r##"  <circle cx="{}" cy="{}" r="5" fill="#555555"/>"##, px(x), py(y));
        }
        for &(x, y) in &self.vertices {
            let _ = writeln!(out, r##"  <circle cx="{}" cy="{}" r="6" fill="#1f4e9e"/>"##, px(x), py(y));
            let _ = writeln!(
                out,
                r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12">({x},{y})</text>"#,
                px(x) + 8,
                py(y) - 8
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Sorts edges by slope and merges edges of equal slope into one.
pub fn merge_edges(edges: impl IntoIterator<Item = Edge>) -> Vec<Edge> {
    let mut all: Vec<Edge> = edges.into_iter().collect();
    all.sort_by_key(|a| a.slope);
    let mut out: Vec<Edge> = Vec::with_capacity(all.len());
    for e in all {
        match out.last_mut() {
            Some(last) if last.slope == e.slope => last.length += e.length,
            _ => out.push(e),
        }
    }
    out
}
