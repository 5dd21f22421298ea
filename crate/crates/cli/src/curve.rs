use std::fmt::Write as _;

use arctic_core::arctic::{branch_curve, Branch, BranchId};
use arctic_core::{Model, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

/// One emitted curve sample; decimal strings keep the full requested precision.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CurveRow {
    pub model: String,
    pub branch: String,
    pub xi: String,
    pub x: String,
    pub y: String,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

pub fn sample_branches(params: &ModelParams, ids: &[BranchId], points: usize) -> CliResult<Vec<Branch>> {
    Ok(ids.iter().map(|&id| branch_curve(params, id, points)).collect::<arctic_core::Result<Vec<_>>>()?)
}

pub fn rows(branches: &[Branch], digits: usize) -> Vec<CurveRow> {
    branches
        .iter()
        .flat_map(|b| {
            b.samples.iter().map(move |s| CurveRow {
                model: b.model.name().to_string(),
                branch: b.id.name().to_string(),
                xi: s.xi.to_sig(digits),
                x: s.point.x.to_sig(digits),
                y: s.point.y.to_sig(digits),
                a: s.line.a.to_sig(digits),
                b: s.line.b.to_sig(digits),
            })
        })
        .collect()
}

pub fn to_csv(rows: &[CurveRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv(text: &str) -> CliResult<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<CurveRow>, _>>()?)
}

/// Boundary of the rescaled domain, counter-clockwise from the SE corner.
pub fn outline(model: Model) -> Vec<(f64, f64)> {
    match model {
        Model::SixV => vec![(0.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (-1.0, 0.0)],
        Model::SixVP => vec![(0.0, 0.0), (0.0, 2.0), (-1.0, 2.0), (-1.0, 0.0)],
        Model::TwentyV => vec![(0.0, 0.0), (0.0, 2.0), (-1.0, 2.0), (-1.0, 1.0)],
        Model::Dt => vec![(0.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (-2.0, 0.0)],
    }
}

pub const PX_PER_UNIT: f64 = 400.0;
const MARGIN: f64 = 20.0;

fn colour(id: BranchId) -> &'static str {
    match id {
        BranchId::Ne => "#c0392b",
        BranchId::Se => "#2471a3",
        BranchId::FullAnalytic => "#7d3c98",
        BranchId::Nw => "#d68910",
        BranchId::Sw => "#229954",
    }
}

pub fn to_svg(model: Model, branches: &[Branch]) -> String {
    let out = outline(model);
    let xmin = out.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let ymax = out.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let xmax = out.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ymin = out.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    // y axis flipped: plot y grows downwards
    let px = |x: f64, y: f64| (MARGIN + (x - xmin) * PX_PER_UNIT, MARGIN + (ymax - y) * PX_PER_UNIT);
    let w = 2.0 * MARGIN + (xmax - xmin) * PX_PER_UNIT;
    let h = 2.0 * MARGIN + (ymax - ymin) * PX_PER_UNIT;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let pts: Vec<String> = out
        .iter()
        .map(|&(x, y)| {
            let (a, b) = px(x, y);
            format!("{a:.4},{b:.4}")
        })
        .collect();
    let _ = writeln!(s, r#"  <polygon class="domain" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, pts.join(" "));
    for b in branches {
        let pts: Vec<String> = b
            .samples
            .iter()
            .map(|smp| {
                let (a, c) = px(smp.point.x.to_f64(), smp.point.y.to_f64());
                format!("{a:.4},{c:.4}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"  <polyline class="branch" data-branch="{}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            b.id.name(),
            pts.join(" "),
            colour(b.id)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Inverse of the SVG coordinate map, for reading plots back.
pub fn svg_to_plane(model: Model, px: f64, py: f64) -> (f64, f64) {
    let out = outline(model);
    let xmin = out.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let ymax = out.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    (xmin + (px - MARGIN) / PX_PER_UNIT, ymax - (py - MARGIN) / PX_PER_UNIT)
}
